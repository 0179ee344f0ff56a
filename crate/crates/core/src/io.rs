//! JSON file formats: states, canonical families, certificates, PPT reports
//! and generation manifests.
//!
//! Every float is written in scientific notation with 17 significant digits,
//! which round-trips `f64` exactly.

use std::io;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};
use sha2::{Digest, Sha256};

use crate::canonical::CanonicalFamily;
use crate::corpus::GenSpec;
use crate::error::{Error, Result};
use crate::linalg::ToleranceConfig;
use crate::matrix::ComplexMatrix;
use crate::separability::{ProductTerm, SeparableDecomposition};
use crate::tensor::TripartiteState;

/// Compact JSON with 17-significant-digit floats.
struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn write_null<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        CompactFormatter.write_null(writer)
    }
}

/// Serializes with full-precision floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn split_complex(values: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (values.iter().map(|z| z.re).collect(), values.iter().map(|z| z.im).collect())
}

fn join_complex(re: &[f64], im: &[f64]) -> Result<Vec<Complex64>> {
    if re.len() != im.len() {
        return Err(Error::Format(format!("re has {} entries but im has {}", re.len(), im.len())));
    }
    Ok(re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect())
}

/// `{"dims": [2, M, N], "n": 2MN, "re": [...], "im": [...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: [usize; 3],
    pub n: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateFile {
    pub fn from_state(state: &TripartiteState) -> Self {
        let (a, m, n) = state.dims();
        let (re, im) = split_complex(state.matrix().as_slice());
        Self { dims: [a, m, n], n: state.dim(), re, im }
    }

    pub fn to_state(&self, tol: &ToleranceConfig) -> Result<TripartiteState> {
        let [a, m, n] = self.dims;
        if a != 2 {
            return Err(Error::Format(format!("first subsystem must have dimension 2, got {a}")));
        }
        if m < 2 || n < 1 {
            return Err(Error::Format(format!("dims [2, {m}, {n}] need M >= 2 and N >= 1")));
        }
        if self.n != 2 * m * n {
            return Err(Error::Format(format!("n = {} does not match dims [2, {m}, {n}]", self.n)));
        }
        if self.re.len() != self.n * self.n {
            return Err(Error::Format(format!("expected {} entries, found {}", self.n * self.n, self.re.len())));
        }
        let mat = ComplexMatrix::from_vec(self.n, self.n, join_complex(&self.re, &self.im)?)?;
        TripartiteState::with_tolerance(m, n, mat, tol)
    }
}

/// `{"rows": r, "cols": c, "re": [...], "im": [...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let (re, im) = split_complex(m.as_slice());
        Self { rows: m.rows(), cols: m.cols(), re, im }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::from_vec(self.rows, self.cols, join_complex(&self.re, &self.im)?)
    }
}

/// `{"m": M, "n": N, "a": [A_1, …, A_{M−1}], "d": D, "f": F}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub m: usize,
    pub n: usize,
    pub a: Vec<MatrixJson>,
    pub d: MatrixJson,
    pub f: MatrixJson,
}

impl FamilyFile {
    pub fn from_family(family: &CanonicalFamily) -> Self {
        Self {
            m: family.m,
            n: family.n,
            a: family.a.iter().map(MatrixJson::from).collect(),
            d: MatrixJson::from(&family.d),
            f: MatrixJson::from(&family.f),
        }
    }

    pub fn to_family(&self) -> Result<CanonicalFamily> {
        let a = self.a.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        CanonicalFamily::new(self.m, self.n, a, self.d.to_matrix()?, self.f.to_matrix()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub w: f64,
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
    pub c: Vec<[f64; 2]>,
}

/// `{"trace": t, "terms": [{"w": w, "a": [[re, im], …], "b": …, "c": …}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub trace: f64,
    pub terms: Vec<TermJson>,
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn unpairs(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

impl CertificateFile {
    pub fn from_decomposition(dec: &SeparableDecomposition) -> Self {
        Self {
            trace: dec.trace_in,
            terms: dec
                .terms
                .iter()
                .map(|t| TermJson { w: t.weight, a: pairs(&t.vec_a), b: pairs(&t.vec_b), c: pairs(&t.vec_c) })
                .collect(),
        }
    }

    pub fn to_decomposition(&self) -> SeparableDecomposition {
        SeparableDecomposition {
            trace_in: self.trace,
            terms: self
                .terms
                .iter()
                .map(|t| ProductTerm { weight: t.w, vec_a: unpairs(&t.a), vec_b: unpairs(&t.b), vec_c: unpairs(&t.c) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub spec: GenSpec,
    pub file: String,
    pub sha256: String,
}

/// Generation manifest: one entry per emitted state file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    /// Adds an entry, replacing any earlier entry for the same file.
    pub fn record(&mut self, entry: ManifestEntry) {
        self.entries.retain(|e| e.file != entry.file);
        self.entries.push(entry);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{gen_family, gen_state, FamilyMode, Scramble};
    use crate::separability::{decompose, DEFAULT_TRIALS, PptReport};
    use crate::PsdVerdict;
    use proptest::prelude::*;

    #[test]
    fn floats_use_seventeen_digits() {
        let s = to_json(&vec![1.0f64, -0.1, 1e-300]).unwrap();
        assert_eq!(s, "[1.0000000000000000e0,-1.0000000000000001e-1,1.0000000000000000e-300]\n");
    }

    #[test]
    fn ppt_report_layout() {
        let v = PsdVerdict { min_eig: -0.5, ok: false };
        let rep = PptReport { t_a: v, t_b: v, t_c: v, overall_ppt: false };
        let s = to_json(&rep).unwrap();
        assert!(s.starts_with(r#"{"tA":{"min_eig":-5.0000000000000000e-1,"ok":false},"tB":"#), "{s}");
        assert!(s.trim_end().ends_with(r#""ppt":false}"#));
    }

    #[test]
    fn state_file_validation() {
        let tol = ToleranceConfig::default();
        let rho = gen_state(&GenSpec::new(2, 2, 0)).unwrap();
        let file = StateFile::from_state(&rho);
        assert_eq!(file.to_state(&tol).unwrap(), rho);

        let mut bad = file.clone();
        bad.re.pop();
        assert!(bad.to_state(&tol).is_err());
        let mut bad = file.clone();
        bad.dims = [3, 2, 2];
        assert!(bad.to_state(&tol).is_err());
        let mut bad = file.clone();
        bad.im[1] += 1.0;
        assert!(bad.to_state(&tol).is_err());
        assert!(from_json::<StateFile>("{\"dims\": [2, 2, 2], \"n\": 8").is_err());
    }

    #[test]
    fn family_and_certificate_round_trip() {
        let fam = gen_family(&GenSpec::new(3, 2, 4).mode(FamilyMode::Conjugated)).unwrap();
        let text = to_json(&FamilyFile::from_family(&fam)).unwrap();
        assert_eq!(from_json::<FamilyFile>(&text).unwrap().to_family().unwrap(), fam);

        let rho = gen_state(&GenSpec::new(3, 2, 4).scramble(Scramble::Unitary)).unwrap();
        let dec = decompose(&rho, &ToleranceConfig::default(), DEFAULT_TRIALS, 1).unwrap();
        let text = to_json(&CertificateFile::from_decomposition(&dec)).unwrap();
        assert_eq!(from_json::<CertificateFile>(&text).unwrap().to_decomposition(), dec);
    }

    #[test]
    fn manifest_replaces_same_file() {
        let mut man = Manifest::default();
        let entry = |h: &str| ManifestEntry { spec: GenSpec::new(2, 2, 0), file: "x.json".into(), sha256: h.into() };
        man.record(entry("a"));
        man.record(entry("b"));
        assert_eq!(man.entries.len(), 1);
        assert_eq!(man.entries[0].sha256, "b");
        let text = to_json(&man).unwrap();
        assert!(text.contains(r#""mode":"diagonal","scramble":"none""#), "{text}");
    }

    proptest! {
        #[test]
        fn full_precision_floats_round_trip(xs in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 0..32)) {
            let back: Vec<f64> = from_json(&to_json(&xs).unwrap()).unwrap();
            prop_assert_eq!(back, xs);
        }
    }
}
