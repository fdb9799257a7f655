//! Operator product expansions by Wick's theorem.
//!
//! For `A = :P f e^x:` at `z` and `B = :Q g e^y:` at `w` the product is
//! `ε(x,y)(z−w)^{⟨x,y⟩}` times a sum over contraction patterns: pairs of
//! elementary factors, lattice bosons against the opposite exponential, and
//! `a_i` against the opposite coefficient function (which differentiates it).
//! What is left at `z` is Taylor expanded around `w` inside the normal
//! ordering, `Z(z) = Σ_k (z−w)^k/k! ∂^k Z(w)`.

use std::collections::BTreeMap;
use std::fmt;

use chiralkit_core::lattice::same_cone;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::coeff::CoeffFn;
use crate::field::{cocycle, Factor, Field, Gen, Momentum, Monom};

/// Largest number of factors the engine multiplies in one term pair.
pub const FACTOR_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpeError {
    #[error("term pair has {count} factors, above the cap of {cap}")]
    TooManyFactors { count: usize, cap: usize },
    #[error("sigma truncation needs momenta with N-part in K^∨, got {0}")]
    NotInDualCone(String),
}

/// A truncated Laurent series in `z − w` with field coefficients at `w`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Laurent {
    terms: BTreeMap<i32, Field>,
}

impl Laurent {
    /// Coefficient of `(z−w)^p`.
    pub fn coeff(&self, p: i32) -> Field {
        self.terms.get(&p).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Powers with a nonzero coefficient, ascending.
    pub fn powers(&self) -> impl Iterator<Item = (i32, &Field)> {
        self.terms.iter().map(|(p, f)| (*p, f))
    }

    pub fn lowest_power(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    /// The part with negative powers.
    pub fn singular(&self) -> Laurent {
        Laurent {
            terms: self
                .terms
                .iter()
                .filter(|(p, _)| **p < 0)
                .map(|(p, f)| (*p, f.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (p, f) in &o.terms {
            out.add_at(*p, &f.neg());
        }
        out
    }

    fn add_at(&mut self, p: i32, f: &Field) {
        let e = self.terms.entry(p).or_default();
        *e = e.add(f);
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    /// Builds a series from `(power, coefficient)` pairs.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Field)>) -> Laurent {
        let mut out = Laurent::default();
        for (p, f) in terms {
            out.add_at(p, &f);
        }
        out
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, x)| format!("(z-w)^{p} [{x}]"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExpandOptions {
    /// Drop term pairs whose N-momenta do not share a cone of the fan.
    pub sigma: bool,
}

/// Singular part of `A(z)B(w)`.
pub fn ope(a: &Field, b: &Field) -> Result<Laurent, OpeError> {
    expand(a, b, -1, ExpandOptions::default())
}

/// Singular part with the fan truncation applied to exponentials.
pub fn sigma_truncated_ope(a: &Field, b: &Field) -> Result<Laurent, OpeError> {
    expand(a, b, -1, ExpandOptions { sigma: true })
}

/// `A_{(n)}B`, the coefficient of `(z−w)^{−n−1}`.
pub fn nth_product(a: &Field, b: &Field, n: i32) -> Result<Field, OpeError> {
    Ok(expand(a, b, -n - 1, ExpandOptions::default())?.coeff(-n - 1))
}

/// `Res_z A(z)B(w) = A_{(0)}B`.
pub fn residue_action(a: &Field, b: &Field) -> Result<Field, OpeError> {
    nth_product(a, b, 0)
}

/// `:AB: = A_{(−1)}B`.
pub fn normal_product(a: &Field, b: &Field) -> Result<Field, OpeError> {
    nth_product(a, b, -1)
}

/// All coefficients of `A(z)B(w)` up to and including `(z−w)^max_power`.
pub fn expand(a: &Field, b: &Field, max_power: i32, opts: ExpandOptions) -> Result<Laurent, OpeError> {
    let mut out = Laurent::default();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let count = ma.factors.len() + mb.factors.len();
            if count > FACTOR_CAP {
                return Err(OpeError::TooManyFactors { count, cap: FACTOR_CAP });
            }
            if opts.sigma && !cones_meet(&ma.mom, &mb.mom)? {
                continue;
            }
            pair_expand(ma, ca, mb, cb, max_power, &mut out);
        }
    }
    Ok(out)
}

fn cones_meet(x: &Momentum, y: &Momentum) -> Result<bool, OpeError> {
    same_cone(&x.n_point(), &y.n_point()).map_err(|e| OpeError::NotInDualCone(e.to_string()))
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn factorial(n: u32) -> BigRational {
    (1..=n as i64).fold(BigRational::one(), |acc, k| acc * rat(k))
}

/// `∂_z^p ∂_w^q` applied to `c/(z−w)^r`: coefficient and new order.
fn differentiate(c: BigRational, r: u32, p: u8, q: u8) -> (BigRational, u32) {
    let mut k = c;
    for s in 0..(p as u32 + q as u32) {
        k *= rat((r + s) as i64);
    }
    if p % 2 == 1 {
        k = -k;
    }
    (k, r + p as u32 + q as u32)
}

/// Contraction of `p(z)` with `q(w)`.
fn propagator(p: Factor, q: Factor) -> Option<(BigRational, u32)> {
    let (c, r) = match (p.gen, q.gen) {
        (Gen::A(i), Gen::B(j)) if i == j => (1, 1),
        (Gen::B(j), Gen::A(i)) if i == j => (-1, 1),
        (Gen::Phi(i), Gen::Psi(j)) | (Gen::Psi(j), Gen::Phi(i)) if i == j => (1, 1),
        (Gen::MB(i), Gen::NB(j)) | (Gen::NB(j), Gen::MB(i)) if i == j => (1, 2),
        (Gen::MF(i), Gen::NF(j)) | (Gen::NF(j), Gen::MF(i)) if i == j => (1, 1),
        _ => return None,
    };
    Some(differentiate(rat(c), r, p.der, q.der))
}

/// One contraction pattern in progress.
#[derive(Clone)]
struct State {
    scalar: BigRational,
    pole: u32,
    f: CoeffFn,
    g: CoeffFn,
    used_p: u32,
    used_q: u32,
    /// Contracted fermion pairs as (index in P, index in Q).
    pairs: Vec<(usize, usize)>,
}

fn pair_expand(ma: &Monom, ca: &CoeffFn, mb: &Monom, cb: &CoeffFn, max_power: i32, out: &mut Laurent) {
    let (x, y) = (ma.mom, mb.mom);
    let base = x.pairing(&y) as i32;
    let start = State {
        scalar: rat(cocycle(&x, &y)),
        pole: 0,
        f: ca.clone(),
        g: cb.clone(),
        used_p: 0,
        used_q: 0,
        pairs: Vec::new(),
    };
    let mut finished = Vec::new();
    contract_p(ma, mb, 0, start, &mut finished);
    for s in finished {
        let lowest = base - s.pole as i32;
        if lowest > max_power || s.scalar.is_zero() || s.f.is_zero() || s.g.is_zero() {
            continue;
        }
        emit(ma, mb, s, lowest, max_power, out);
    }
}

/// Chooses what `P[i]` contracts with, then moves on.
fn contract_p(ma: &Monom, mb: &Monom, i: usize, s: State, done: &mut Vec<State>) {
    if i == ma.factors.len() {
        contract_q(ma, mb, 0, s, done);
        return;
    }
    let p = ma.factors[i];
    contract_p(ma, mb, i + 1, s.clone(), done);
    for (j, &q) in mb.factors.iter().enumerate() {
        if s.used_q & (1 << j) != 0 {
            continue;
        }
        if let Some((c, r)) = propagator(p, q) {
            let mut t = s.clone();
            t.scalar *= c;
            t.pole += r;
            t.used_p |= 1 << i;
            t.used_q |= 1 << j;
            if p.gen.is_fermion() {
                t.pairs.push((i, j));
            }
            contract_p(ma, mb, i + 1, t, done);
        }
    }
    if p.gen.is_lattice_boson() {
        let k = mb.mom.pair_gen(p.gen);
        if !k.is_zero() {
            let (c, r) = differentiate(k, 1, p.der, 0);
            let mut t = s.clone();
            t.scalar *= c;
            t.pole += r;
            t.used_p |= 1 << i;
            contract_p(ma, mb, i + 1, t, done);
        }
    }
    if let Gen::A(k) = p.gen {
        let dg = s.g.partial(k);
        if !dg.is_zero() {
            let (c, r) = differentiate(BigRational::one(), 1, p.der, 0);
            let mut t = s;
            t.g = dg;
            t.scalar *= c;
            t.pole += r;
            t.used_p |= 1 << i;
            contract_p(ma, mb, i + 1, t, done);
        }
    }
}

/// Chooses what an uncontracted `Q[j]` contracts with on the `z` side.
fn contract_q(ma: &Monom, mb: &Monom, j: usize, s: State, done: &mut Vec<State>) {
    if j == mb.factors.len() {
        done.push(s);
        return;
    }
    let q = mb.factors[j];
    if s.used_q & (1 << j) != 0 {
        contract_q(ma, mb, j + 1, s, done);
        return;
    }
    contract_q(ma, mb, j + 1, s.clone(), done);
    if q.gen.is_lattice_boson() {
        let k = ma.mom.pair_gen(q.gen);
        if !k.is_zero() {
            let (c, r) = differentiate(-k, 1, 0, q.der);
            let mut t = s.clone();
            t.scalar *= c;
            t.pole += r;
            t.used_q |= 1 << j;
            contract_q(ma, mb, j + 1, t, done);
        }
    }
    if let Gen::A(k) = q.gen {
        let df = s.f.partial(k);
        if !df.is_zero() {
            let (c, r) = differentiate(-BigRational::one(), 1, 0, q.der);
            let mut t = s;
            t.f = df;
            t.scalar *= c;
            t.pole += r;
            t.used_q |= 1 << j;
            contract_q(ma, mb, j + 1, t, done);
        }
    }
}

/// Sign of bringing each contracted fermion pair together (`p` then `q`)
/// ahead of the untouched factors.
fn fermion_sign(ma: &Monom, mb: &Monom, s: &State) -> bool {
    let np = ma.factors.len();
    let is_f = |idx: usize| {
        if idx < np {
            ma.factors[idx].gen.is_fermion()
        } else {
            mb.factors[idx - np].gen.is_fermion()
        }
    };
    let mut order: Vec<usize> = Vec::new();
    let mut taken = vec![false; np + mb.factors.len()];
    for &(i, j) in &s.pairs {
        order.push(i);
        order.push(np + j);
        taken[i] = true;
        taken[np + j] = true;
    }
    for (idx, t) in taken.iter().enumerate() {
        if !t && is_f(idx) {
            order.push(idx);
        }
    }
    let mut inv = 0usize;
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            if order[a] > order[b] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

fn emit(ma: &Monom, mb: &Monom, s: State, lowest: i32, max_power: i32, out: &mut Laurent) {
    let mut scalar = s.scalar.clone();
    if fermion_sign(ma, mb, &s) {
        scalar = -scalar;
    }
    let rest_p: Vec<Factor> = (0..ma.factors.len())
        .filter(|i| s.used_p & (1 << i) == 0)
        .map(|i| ma.factors[i])
        .collect();
    let rest_q: Vec<Factor> = (0..mb.factors.len())
        .filter(|j| s.used_q & (1 << j) == 0)
        .map(|j| mb.factors[j])
        .collect();
    let w_part = Field::monomial(s.g.clone(), rest_q, mb.mom);
    let mut z_part = Field::monomial(s.f.clone(), rest_p, ma.mom);
    let mut k = 0;
    loop {
        let coef = scalar.clone() / factorial(k as u32);
        let mut product = Field::zero();
        for (m, c) in z_part.terms() {
            let zt = Field::monomial(c.clone(), m.factors.clone(), Momentum::default());
            product = product.add(&zt.wick(&w_part).shift_momentum(&m.mom));
        }
        out.add_at(lowest + k, &product.scale(&coef));
        if lowest + k >= max_power {
            break;
        }
        z_part = z_part.derivative();
        k += 1;
    }
}

impl Field {
    /// Adds `x` to the momentum of every term.
    fn shift_momentum(&self, x: &Momentum) -> Field {
        let mut out = Field::zero();
        for (m, c) in self.terms() {
            let mm = Monom {
                factors: m.factors.clone(),
                mom: m.mom.add(x),
            };
            out.add_monom(mm, c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chiralkit_core::lattice::{MPoint, NPoint};

    fn one() -> Field {
        Field::one()
    }

    #[test]
    fn basic_propagators() {
        let l = ope(&Field::a(1), &Field::b(1)).unwrap();
        assert_eq!(l, Laurent::from_terms([(-1, one())]));
        let l = ope(&Field::b(1), &Field::a(1)).unwrap();
        assert_eq!(l, Laurent::from_terms([(-1, one().neg())]));
        let l = ope(&Field::phi(2), &Field::psi(2)).unwrap();
        assert_eq!(l, Laurent::from_terms([(-1, one())]));
        let l = ope(&Field::psi(2), &Field::phi(2)).unwrap();
        assert_eq!(l, Laurent::from_terms([(-1, one())]));
        assert!(ope(&Field::a(1), &Field::b(2)).unwrap().is_zero());
        assert!(ope(&Field::a(1), &Field::a(1)).unwrap().is_zero());
    }

    #[test]
    fn derivative_propagator() {
        // a(z) ∂b(w) ~ 1/(z−w)^2
        let db = Field::b(1).derivative();
        let l = ope(&Field::a(1), &db).unwrap();
        assert_eq!(l, Laurent::from_terms([(-2, one())]));
    }

    #[test]
    fn skew_symmetry_of_residue() {
        // A_{(0)}B = −(−1)^{|A||B|} B_{(0)}A + ∂(B_{(1)}A) − … ; check on a
        // bosonic pair where only the first two terms survive.
        let a = Field::a(1).mul_coeff(&CoeffFn::var(2));
        let b = Field::a(2).mul_coeff(&CoeffFn::var(1).pow(2));
        let lhs = residue_action(&a, &b).unwrap();
        let rhs = residue_action(&b, &a)
            .unwrap()
            .neg()
            .add(&nth_product(&b, &a, 1).unwrap().derivative())
            .sub(&nth_product(&b, &a, 2).unwrap().derivative().derivative().scale(&BigRational::new(1.into(), 2.into())));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn function_contraction() {
        // a_1(z) y_1^2(w) ~ 2 y_1/(z−w); y_1^2(z) a_1(w) ~ −2y_1/(z−w) + …
        let f = Field::coeff(CoeffFn::var(1).pow(2));
        let l = ope(&Field::a(1), &f).unwrap();
        assert_eq!(l, Laurent::from_terms([(-1, Field::coeff(CoeffFn::var(1).scale(&rat(2))))]));
        let l = ope(&f, &Field::a(1)).unwrap();
        assert_eq!(l, Laurent::from_terms([(-1, Field::coeff(CoeffFn::var(1).scale(&rat(-2))))]));
    }

    #[test]
    fn normal_product_of_free_fields_is_wick() {
        let x = normal_product(&Field::phi(1), &Field::psi(1)).unwrap();
        assert_eq!(x, Field::phi(1).wick(&Field::psi(1)));
        let y = normal_product(&Field::a(1), &Field::b(1)).unwrap();
        assert_eq!(y, Field::a(1).mul_coeff(&CoeffFn::var(1)));
    }

    #[test]
    fn normal_product_with_function_corrects() {
        // (y_1)_{(−1)} a_1 = :y_1 a_1: − ∂(1)… the contraction −1/(z−w) has
        // no regular part, but y_1^2 contributes −2 b1'.
        let f = Field::coeff(CoeffFn::var(1).pow(2));
        let x = normal_product(&f, &Field::a(1)).unwrap();
        let expected = Field::a(1)
            .mul_coeff(&CoeffFn::var(1).pow(2))
            .sub(&Field::b(1).derivative().scale(&rat(2)));
        assert_eq!(x, expected);
    }

    #[test]
    fn exponentials() {
        let x = Momentum::new(&MPoint::axis(0, 5).unwrap(), &NPoint::zero());
        let y = Momentum::from_n(&NPoint::vertex(0));
        // ⟨x,y⟩ = 5, so the product is regular and starts at (z−w)^5.
        let l = expand(&Field::exp(x), &Field::exp(y), 5, ExpandOptions::default()).unwrap();
        assert_eq!(l.lowest_power(), Some(5));
        assert_eq!(l.coeff(5), Field::exp(x.add(&y)).scale_int(cocycle(&x, &y)));
        let ny = Momentum::from_n(&NPoint::from_integers([-1, 0, 0, 0, 0]));
        let l = ope(&Field::exp(x), &Field::exp(ny)).unwrap();
        assert_eq!(l.lowest_power(), Some(-5));
    }

    #[test]
    fn lattice_boson_contractions() {
        let x = Momentum::new(&MPoint::axis(1, 5).unwrap(), &NPoint::vertex(1));
        let l = ope(&Field::gen(Gen::MB(1)), &Field::exp(x)).unwrap();
        assert_eq!(l, Laurent::from_terms([(-1, Field::exp(x))]));
        let l = ope(&Field::gen(Gen::NB(1)), &Field::exp(x)).unwrap();
        assert_eq!(l, Laurent::from_terms([(-1, Field::exp(x).scale_int(5))]));
        let l = ope(&Field::gen(Gen::MB(1)), &Field::gen(Gen::NB(1))).unwrap();
        assert_eq!(l, Laurent::from_terms([(-2, one())]));
    }

    #[test]
    fn factor_cap() {
        let mut big = Field::one();
        for i in 0..9 {
            big = big.wick(&Field::a(i));
        }
        assert!(matches!(ope(&big, &big), Err(OpeError::TooManyFactors { .. })));
    }
}
