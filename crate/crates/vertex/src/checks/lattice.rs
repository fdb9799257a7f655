//! The lattice stress tensor and current, and checks on exponentials.

use chiralkit_core::lattice::{enum_graded_k, pair_int, LatticeEnv, MPoint, NPoint};
use chiralkit_core::sample::{random_kdual, random_m, rng};
use num_rational::BigRational;

use super::{CheckError, CheckReport, Recorder};
use crate::field::{cocycle, Field, Gen, Momentum};
use crate::ope::{expand, ope, ExpandOptions, Laurent};

fn deg_bos() -> Field {
    Field::lattice_boson(&Momentum::from_m(&LatticeEnv::quintic().deg))
}

fn degv_bos() -> Field {
    Field::lattice_boson(&Momentum::from_n(&LatticeEnv::quintic().degv))
}

/// `L = Σ m_i^bos n_i^bos + Σ (∂m_i^ferm) n_i^ferm − ∂(deg^∨)^bos`.
pub fn l_field() -> Field {
    let mut l = Field::zero();
    for i in 0..5u8 {
        l = l.add(&Field::gen(Gen::MB(i)).wick(&Field::gen(Gen::NB(i))));
        l = l.add(&Field::gen(Gen::MF(i)).derivative().wick(&Field::gen(Gen::NF(i))));
    }
    l.sub(&degv_bos().derivative())
}

/// `J = Σ m_i^ferm n_i^ferm + deg^bos − (deg^∨)^bos`.
pub fn j_field() -> Field {
    let mut j = Field::zero();
    for i in 0..5u8 {
        j = j.add(&Field::gen(Gen::MF(i)).wick(&Field::gen(Gen::NF(i))));
    }
    j.add(&deg_bos()).sub(&degv_bos())
}

/// `(L_0, J_0)` eigenvalues on `e^{(m,n)}`, read off from the engine:
/// the `(z−w)^{-2}` coefficient of `L(z)e^x(w)` and the `(z−w)^{-1}`
/// coefficient of `J(z)e^x(w)`.
///
/// For `x = (m, n)` these come out as `m·n + m·deg^∨` and `deg·n − m·deg^∨`;
/// the weight is whatever the declared `L` produces, with no separate
/// `x²/2` convention (the lattice is isotropic on each factor).
pub fn zero_mode_weight(m: &MPoint, n: &NPoint) -> Result<(BigRational, BigRational), CheckError> {
    let x = Momentum::new(m, n);
    let e = Field::exp(x);
    let weight = proportionality(&ope(&l_field(), &e)?.coeff(-2), &e)?;
    let charge = proportionality(&ope(&j_field(), &e)?.coeff(-1), &e)?;
    Ok((weight, charge))
}

fn proportionality(f: &Field, e: &Field) -> Result<BigRational, CheckError> {
    if f.is_zero() {
        return Ok(BigRational::from_integer(0.into()));
    }
    let (m, c) = f.terms().next().expect("nonzero");
    let k = c
        .as_constant()
        .ok_or_else(|| CheckError::Input(format!("non-constant coefficient in {f}")))?;
    let probe = Field::monomial(crate::CoeffFn::one(), m.factors.clone(), m.mom);
    if f.len() != 1 || probe != *e {
        return Err(CheckError::Input(format!("{f} is not a multiple of {e}")));
    }
    Ok(k)
}

/// `m_i^ferm e^m` has no singular OPE with `J` and a pure `(z−w)^{-2}`
/// term with coefficient itself against `L`, for every `m ∈ Δ` and every
/// `i`; likewise `v_i^ferm e^n` for `n ∈ Δ^∨`.
pub fn verify_lj_descend() -> Result<CheckReport, CheckError> {
    let mut rec = Recorder::new("prop3.5");
    let (l, j) = (l_field(), j_field());
    let mut cases = Vec::new();
    for m in enum_graded_k(1) {
        for i in 0..5u8 {
            let x = Field::gen(Gen::MF(i)).wick(&Field::exp(Momentum::from_m(&m)));
            cases.push((format!("m_{i}^ferm e^{m}"), x));
        }
    }
    for n in LatticeEnv::quintic().delta_dual_points() {
        for i in 0..5u8 {
            let x = Field::gen(Gen::NF(i)).wick(&Field::exp(Momentum::from_n(&n)));
            cases.push((format!("v_{i}^ferm e^{n}"), x));
        }
    }
    for (label, x) in &cases {
        let with_j = ope(x, &j)?;
        rec.expect(with_j.is_zero(), format!("{label} against J"), &with_j);
        let with_l = ope(x, &l)?;
        let expected = Laurent::from_terms([(-2, x.clone())]);
        rec.expect(with_l == expected, format!("{label} against L"), &with_l);
    }
    rec.note(format!("{} terms checked against L and J", cases.len()));
    Ok(rec.finish())
}

/// `e^{x_1}(z)e^{x_2}(w)` starts at `(z−w)^{m_1·n_2 + m_2·n_1}` with
/// coefficient `±e^{x_1+x_2}`: three fixed pairs and 50 seeded random ones.
pub fn verify_vertop(seed: u64) -> Result<CheckReport, CheckError> {
    let mut rec = Recorder::new("vertop");
    let env = LatticeEnv::quintic();
    let e0 = MPoint::axis(0, 5).expect("5e_0 ∈ M");
    let mut pairs = vec![
        ((env.deg, NPoint::zero()), (MPoint::zero(), env.degv)),
        ((e0, NPoint::zero()), (env.deg, NPoint::zero())),
        ((e0, NPoint::zero()), (MPoint::zero(), NPoint::vertex(0))),
    ];
    let mut r = rng(seed);
    for _ in 0..50 {
        let a = (random_m(&mut r, 4), random_kdual(&mut r, 3));
        let b = (random_m(&mut r, 4), random_kdual(&mut r, 3));
        pairs.push((a, b));
    }
    for ((m1, n1), (m2, n2)) in &pairs {
        let (x, y) = (Momentum::new(m1, n1), Momentum::new(m2, n2));
        let exponent = pair_int(m1, n2) + pair_int(m2, n1);
        let l = expand(&Field::exp(x), &Field::exp(y), exponent as i32, ExpandOptions::default())?;
        let sum = Momentum::new(&(*m1 + *m2), &(*n1 + *n2));
        let expected = Laurent::from_terms([(exponent as i32, Field::exp(sum).scale_int(cocycle(&x, &y)))]);
        rec.expect(
            l == expected,
            format!("e^({};{}) e^({};{})", m1, n1, m2, n2),
            format!("expected leading power {exponent}, got {l}"),
        );
    }
    rec.note(format!("{} momentum pairs", pairs.len()));
    Ok(rec.finish())
}
