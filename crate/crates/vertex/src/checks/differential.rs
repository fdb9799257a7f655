//! Nilpotency of the differential field, pair by pair and through the full
//! self-OPE, and `d² = 0` for the chiral-ring complexes.

use std::collections::BTreeSet;

use chiralkit_core::cohomology::{d_squared_witness, Differential, Ring};
use chiralkit_core::lattice::{pair_int, MPoint, NPoint, DIM, N_DENOM};
use chiralkit_core::model::{DifferentialTerm, Model};
use chiralkit_core::poly::{format_rational, parse_rational};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CheckError, CheckReport, Recorder};
use crate::coeff::CoeffFn;
use crate::field::{Field, Gen, Momentum};
use crate::ope::ope;

pub const ANSATZ_FORMAT: &str = "chiralkit-ansatz-v1";

fn fmt_m(m: &MPoint) -> String {
    format!("{:?}", m.coords())
}

/// The differential field `Σ F^i_m m_i^ferm e^m + Σ g_n n^ferm e^n`.
pub fn differential_field(model: &Model) -> Field {
    let mut d = Field::zero();
    for t in model.differential_terms() {
        match t {
            DifferentialTerm::M { index, momentum, coef } => {
                let x = Momentum::from_m(&momentum);
                let term = Field::gen(Gen::MF(index as u8)).wick(&Field::exp(x));
                d = d.add(&term.scale(&coef));
            }
            DifferentialTerm::N { momentum, coef } => {
                let x = Momentum::from_n(&momentum);
                let term = Field::lattice_fermion(&x).wick(&Field::exp(x));
                d = d.add(&term.scale(&coef));
            }
        }
    }
    d
}

/// The per-pair conditions for every M-term against every N-term: `m·n ≥ 0`,
/// and `m·n ≥ 1` whenever `m_i·n ≠ 0`. Pairs within `M` or within `N` are
/// always nonsingular because both lattices are isotropic.
pub fn check_differential_quintic(model: &Model) -> CheckReport {
    let mut rec = Recorder::new("prop3.4");
    let terms = model.differential_terms();
    let mut m_terms = Vec::new();
    let mut n_terms = Vec::new();
    for t in &terms {
        match t {
            DifferentialTerm::M { index, momentum, coef } if !coef.is_zero() => m_terms.push((*index, *momentum)),
            DifferentialTerm::N { momentum, coef } if !coef.is_zero() => n_terms.push(*momentum),
            _ => {}
        }
    }
    for (i, m) in &m_terms {
        for n in &n_terms {
            let mn = pair_int(m, n);
            let num = n.numerators()[*i];
            let min = if mn < 0 {
                Some("m·n < 0")
            } else if mn == 0 && num != 0 {
                Some("m·n = 0 but m_i·n ≠ 0")
            } else {
                None
            };
            if let Some(reason) = min {
                rec.fail(
                    format!("i={i}, m={}, n={n}", fmt_m(m)),
                    format!("{reason}: m·n = {mn}, m_{i}·n = {}", chiralkit_core::lattice::Q64::new(num, N_DENOM)),
                );
            }
        }
    }
    rec.note(format!("{} M-terms × {} N-terms", m_terms.len(), n_terms.len()));
    rec.finish()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnsatzError {
    #[error("unsupported format {0:?}, expected {ANSATZ_FORMAT:?}")]
    Format(String),
    #[error("{0}: m·deg^∨ must be 1")]
    MDegree(String),
    #[error("{0}: deg·n must be 1")]
    NDegree(String),
    #[error("m={m} and n={n} pair to {value} < 0")]
    NegativePairing { m: String, n: String, value: i64 },
    #[error("fermion index {0} out of range")]
    Index(usize),
    #[error("{0} is not listed in the point set")]
    Unlisted(String),
    #[error("bad coefficient {0:?}")]
    Coefficient(String),
    #[error("{0}")]
    Json(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnsatzFile {
    format: String,
    delta: Vec<MPoint>,
    delta_dual: Vec<NPoint>,
    #[serde(rename = "F")]
    f: Vec<MTermJson>,
    #[serde(rename = "G")]
    g: Vec<NTermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MTermJson {
    i: usize,
    m: MPoint,
    coef: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NTermJson {
    i: usize,
    n: NPoint,
    coef: String,
}

/// `D = Σ F^i_m m_i^ferm e^m + Σ G^i_n v_i^ferm e^n` over chosen subsets
/// `Δ ⊂ M` and `Δ^∨ ⊂ N` with `Δ·deg^∨ = deg·Δ^∨ = 1` and `Δ·Δ^∨ ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralAnsatz {
    delta: Vec<MPoint>,
    delta_dual: Vec<NPoint>,
    f: Vec<(usize, MPoint, BigRational)>,
    g: Vec<(usize, NPoint, BigRational)>,
}

impl GeneralAnsatz {
    pub fn new(
        delta: Vec<MPoint>,
        delta_dual: Vec<NPoint>,
        f: Vec<(usize, MPoint, BigRational)>,
        g: Vec<(usize, NPoint, BigRational)>,
    ) -> Result<Self, AnsatzError> {
        for m in &delta {
            if m.degree() != 1 {
                return Err(AnsatzError::MDegree(fmt_m(m)));
            }
        }
        for n in &delta_dual {
            if n.degree() != 1 {
                return Err(AnsatzError::NDegree(n.to_string()));
            }
        }
        for m in &delta {
            for n in &delta_dual {
                let v = pair_int(m, n);
                if v < 0 {
                    return Err(AnsatzError::NegativePairing {
                        m: fmt_m(m),
                        n: n.to_string(),
                        value: v,
                    });
                }
            }
        }
        let ms: BTreeSet<_> = delta.iter().collect();
        let ns: BTreeSet<_> = delta_dual.iter().collect();
        for (i, m, _) in &f {
            if *i >= DIM {
                return Err(AnsatzError::Index(*i));
            }
            if !ms.contains(m) {
                return Err(AnsatzError::Unlisted(fmt_m(m)));
            }
        }
        for (i, n, _) in &g {
            if *i >= DIM {
                return Err(AnsatzError::Index(*i));
            }
            if !ns.contains(n) {
                return Err(AnsatzError::Unlisted(n.to_string()));
            }
        }
        Ok(Self {
            delta,
            delta_dual,
            f,
            g,
        })
    }

    /// The quintic differential: `G^j_n = g_n (m_j·n)`.
    pub fn from_quintic(model: &Model) -> Self {
        let mut delta = BTreeSet::new();
        let mut delta_dual = BTreeSet::new();
        let mut f = Vec::new();
        let mut g = Vec::new();
        for t in model.differential_terms() {
            match t {
                DifferentialTerm::M { index, momentum, coef } => {
                    delta.insert(momentum);
                    f.push((index, momentum, coef));
                }
                DifferentialTerm::N { momentum, coef } => {
                    delta_dual.insert(momentum);
                    for j in 0..DIM {
                        let num = momentum.numerators()[j];
                        if num != 0 {
                            let c = &coef * BigRational::new(num.into(), N_DENOM.into());
                            g.push((j, momentum, c));
                        }
                    }
                }
            }
        }
        Self::new(delta.into_iter().collect(), delta_dual.into_iter().collect(), f, g)
            .expect("quintic data satisfies the ansatz conditions")
    }

    pub fn from_json_str(s: &str) -> Result<Self, AnsatzError> {
        let file: AnsatzFile = serde_json::from_str(s).map_err(|e| AnsatzError::Json(e.to_string()))?;
        if file.format != ANSATZ_FORMAT {
            return Err(AnsatzError::Format(file.format));
        }
        let coef = |c: &str| parse_rational(c).ok_or_else(|| AnsatzError::Coefficient(c.to_string()));
        let f = file
            .f
            .iter()
            .map(|t| Ok((t.i, t.m, coef(&t.coef)?)))
            .collect::<Result<Vec<_>, AnsatzError>>()?;
        let g = file
            .g
            .iter()
            .map(|t| Ok((t.i, t.n, coef(&t.coef)?)))
            .collect::<Result<Vec<_>, AnsatzError>>()?;
        Self::new(file.delta, file.delta_dual, f, g)
    }

    pub fn to_json_string(&self) -> String {
        let file = AnsatzFile {
            format: ANSATZ_FORMAT.to_string(),
            delta: self.delta.clone(),
            delta_dual: self.delta_dual.clone(),
            f: self
                .f
                .iter()
                .map(|(i, m, c)| MTermJson {
                    i: *i,
                    m: *m,
                    coef: format_rational(c),
                })
                .collect(),
            g: self
                .g
                .iter()
                .map(|(i, n, c)| NTermJson {
                    i: *i,
                    n: *n,
                    coef: format_rational(c),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("ansatz serializes") + "\n"
    }

    pub fn field(&self) -> Field {
        let mut d = Field::zero();
        for (i, m, c) in &self.f {
            let t = Field::gen(Gen::MF(*i as u8)).wick(&Field::exp(Momentum::from_m(m)));
            d = d.add(&t.mul_coeff(&CoeffFn::constant(c.clone())));
        }
        for (i, n, c) in &self.g {
            let t = Field::gen(Gen::NF(*i as u8)).wick(&Field::exp(Momentum::from_n(n)));
            d = d.add(&t.mul_coeff(&CoeffFn::constant(c.clone())));
        }
        d
    }

    /// Whether every M-term/N-term pair is nonsingular on its own.
    pub fn per_pair_ok(&self) -> bool {
        self.f.iter().filter(|t| !t.2.is_zero()).all(|(i, m, _)| {
            self.g.iter().filter(|t| !t.2.is_zero()).all(|(j, n, _)| {
                let mn = pair_int(m, n);
                mn >= 1 || (mn == 0 && i != j)
            })
        })
    }
}

/// Computes the full singular part of `D(z)D(w)`; passes iff it vanishes.
pub fn check_differential_general(a: &GeneralAnsatz) -> Result<CheckReport, CheckError> {
    let mut rec = Recorder::new("prop3.4-general");
    let d = a.field();
    let sing = ope(&d, &d)?;
    for (p, f) in sing.powers() {
        rec.fail(format!("D(z)D(w) at (z-w)^{p}"), f);
    }
    rec.note(format!(
        "per-pair sufficient condition {}",
        if a.per_pair_ok() { "holds" } else { "fails" }
    ));
    Ok(rec.finish())
}

/// The pairwise check on each model plus the exact self-OPE of its field.
pub fn verify_prop34(models: &[Model]) -> Result<CheckReport, CheckError> {
    let mut rec = Recorder::new("prop3.4");
    for (k, m) in models.iter().enumerate() {
        let r = check_differential_quintic(m);
        for w in r.witnesses {
            rec.fail(format!("model {k}: {}", w.subject), w.found);
        }
        let d = differential_field(m);
        let sing = ope(&d, &d)?;
        rec.expect(sing.is_zero(), format!("model {k}: D(z)D(w)"), &sing);
    }
    rec.note(format!("{} models, pairwise and full self-OPE", models.len()));
    Ok(rec.finish())
}

/// `d_{t+1}·d_t = 0` for `t ≤ t_top`, both rings, every model.
pub fn verify_d_squared(models: &[Model], t_top: u32) -> Result<CheckReport, CheckError> {
    let mut rec = Recorder::new("d-squared");
    for (k, m) in models.iter().enumerate() {
        for ring in [Ring::A, Ring::B] {
            let d = Differential::new(m, ring).map_err(|e| CheckError::Input(e.to_string()))?;
            for t in 0..=t_top {
                if let Some(w) = d_squared_witness(&d, t) {
                    rec.fail(
                        format!("model {k}, ring {ring}, t={t}"),
                        format!("entry {} -> {} is {}", w.source, w.target, w.value),
                    );
                }
            }
        }
    }
    rec.note(format!("{} models, t ≤ {t_top}", models.len()));
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chiralkit_core::model::{FivePolys, GParams};
    use chiralkit_core::poly::{rat};

    fn corrupted() -> Model {
        let mut polys = Model::fermat().f.polys().clone();
        polys[0].add_term([0, 5, 0, 0, 0], rat(1));
        Model::new(FivePolys::new_unchecked(polys), GParams::uniform(rat(1)))
    }

    #[test]
    fn fermat_passes() {
        let r = check_differential_quintic(&Model::fermat());
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn corrupted_fixture_witness() {
        let r = check_differential_quintic(&corrupted());
        assert!(!r.pass);
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0].subject, "i=0, m=[0, 5, 0, 0, 0], n=(1,0,0,0,0)");
    }

    #[test]
    fn zero_g_passes_vacuously() {
        let m = Model::new(Model::fermat().f, GParams::zero());
        assert!(check_differential_quintic(&m).pass);
    }

    #[test]
    fn quintic_embedding_is_nilpotent() {
        let a = GeneralAnsatz::from_quintic(&Model::fermat());
        assert!(a.per_pair_ok());
        assert!(check_differential_general(&a).unwrap().pass);
        assert_eq!(a.field(), differential_field(&Model::fermat()));
    }

    #[test]
    fn single_bad_pair_has_a_pole() {
        let m = MPoint::new([0, 5, 0, 0, 0]).unwrap();
        let n = NPoint::vertex(0);
        let a = GeneralAnsatz::new(vec![m], vec![n], vec![(0, m, rat(1))], vec![(0, n, rat(1))]).unwrap();
        assert!(!a.per_pair_ok());
        let r = check_differential_general(&a).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witnesses.len(), 1);
        assert!(r.witnesses[0].subject.contains("(z-w)^-1"));
    }

    #[test]
    fn m_only_ansatz_passes() {
        let pts = [MPoint::new([5, 0, 0, 0, 0]).unwrap(), MPoint::new([1, 1, 1, 1, 1]).unwrap()];
        let f = vec![(0, pts[0], rat(2)), (3, pts[1], rat(-7)), (0, pts[1], rat(1))];
        let a = GeneralAnsatz::new(pts.to_vec(), vec![], f, vec![]).unwrap();
        assert!(check_differential_general(&a).unwrap().pass);
    }

    #[test]
    fn ansatz_validation() {
        let bad = MPoint::new([5, 5, 0, 0, 0]).unwrap();
        assert!(matches!(GeneralAnsatz::new(vec![bad], vec![], vec![], vec![]), Err(AnsatzError::MDegree(_))));
        let m = MPoint::new([6, -1, 0, 0, 0]).unwrap();
        let n = NPoint::vertex(1);
        assert!(matches!(
            GeneralAnsatz::new(vec![m], vec![n], vec![], vec![]),
            Err(AnsatzError::NegativePairing { .. })
        ));
    }

    #[test]
    fn ansatz_json_round_trip() {
        let a = GeneralAnsatz::from_quintic(&Model::fermat());
        let b = GeneralAnsatz::from_json_str(&a.to_json_string()).unwrap();
        assert_eq!(a, b);
        let err = GeneralAnsatz::from_json_str(r#"{"format":"x","delta":[],"delta_dual":[],"F":[],"G":[]}"#);
        assert!(matches!(err, Err(AnsatzError::Format(_))));
    }

    #[test]
    fn d_squared_small() {
        let r = verify_d_squared(&[Model::fermat()], 2).unwrap();
        assert!(r.pass);
    }
}
