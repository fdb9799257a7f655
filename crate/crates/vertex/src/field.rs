//! Fields as finite sums of Wick-normal-ordered monomials in free
//! generators.
//!
//! Two free systems live side by side. The βγ-bc system on coordinates
//! `1..=N` has bosons `a_i`, `b^i` and fermions `φ^i`, `ψ_i`; the value of
//! `b^i` itself is a coordinate of the coefficient ring, so only derivatives
//! `∂^q b^i` (q ≥ 1) appear as factors. The lattice system on `M ⊕ N` has
//! bosons and fermions in the bases `m_i` of `M_Q` and `v_i` of `N`, plus
//! exponentials `e^x`.
//!
//! Wick normal ordering is supercommutative, so a monomial is stored with its
//! factors sorted; reordering contributes the sign of the fermion
//! permutation.

use std::collections::BTreeMap;
use std::fmt;

use chiralkit_core::lattice::{MPoint, NPoint, DIM, N_DENOM};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coeff::CoeffFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    A(u8),
    /// Only with a positive derivative order.
    B(u8),
    Phi(u8),
    Psi(u8),
    /// `m_i^bos`.
    MB(u8),
    /// `v_i^bos`.
    NB(u8),
    /// `m_i^ferm`.
    MF(u8),
    /// `v_i^ferm`.
    NF(u8),
}

impl Gen {
    pub fn is_fermion(self) -> bool {
        matches!(self, Gen::Phi(_) | Gen::Psi(_) | Gen::MF(_) | Gen::NF(_))
    }

    pub fn is_lattice_boson(self) -> bool {
        matches!(self, Gen::MB(_) | Gen::NB(_))
    }

    /// Conformal weight with respect to the standard free-field stress tensors.
    fn weight(self) -> i32 {
        match self {
            Gen::A(_) | Gen::Psi(_) | Gen::MB(_) | Gen::NB(_) | Gen::MF(_) => 1,
            Gen::B(_) | Gen::Phi(_) | Gen::NF(_) => 0,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::A(i) => write!(f, "a{i}"),
            Gen::B(i) => write!(f, "b{i}"),
            Gen::Phi(i) => write!(f, "φ{i}"),
            Gen::Psi(i) => write!(f, "ψ{i}"),
            Gen::MB(i) => write!(f, "mb{i}"),
            Gen::NB(i) => write!(f, "nb{i}"),
            Gen::MF(i) => write!(f, "mf{i}"),
            Gen::NF(i) => write!(f, "nf{i}"),
        }
    }
}

/// `∂^der gen`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub gen: Gen,
    pub der: u8,
}

impl Factor {
    pub fn new(gen: Gen, der: u8) -> Self {
        Self { gen, der }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.der {
            0 => write!(f, "{}", self.gen),
            1 => write!(f, "{}'", self.gen),
            d => write!(f, "∂{d}{}", self.gen),
        }
    }
}

/// A point `x = (m, n)` of `M ⊕ N`, with `n` stored as numerators over 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Momentum {
    pub m: [i64; DIM],
    pub n: [i64; DIM],
}

impl Momentum {
    pub fn new(m: &MPoint, n: &NPoint) -> Self {
        Self {
            m: *m.coords(),
            n: *n.numerators(),
        }
    }

    pub fn from_m(m: &MPoint) -> Self {
        Self::new(m, &NPoint::zero())
    }

    pub fn from_n(n: &NPoint) -> Self {
        Self::new(&MPoint::zero(), n)
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::default()
    }

    pub fn m_point(&self) -> MPoint {
        MPoint::new(self.m).expect("momentum M-part stays in M")
    }

    pub fn n_point(&self) -> NPoint {
        NPoint::from_numerators(self.n).expect("momentum N-part stays in N")
    }

    pub fn add(&self, o: &Momentum) -> Momentum {
        Momentum {
            m: std::array::from_fn(|i| self.m[i] + o.m[i]),
            n: std::array::from_fn(|i| self.n[i] + o.n[i]),
        }
    }

    /// `⟨x, y⟩ = m_x·n_y + m_y·n_x`.
    pub fn pairing(&self, o: &Momentum) -> i64 {
        let s: i64 = (0..DIM).map(|i| self.m[i] * o.n[i] + o.m[i] * self.n[i]).sum();
        debug_assert_eq!(s % N_DENOM, 0);
        s / N_DENOM
    }

    /// `⟨g, x⟩` for a lattice boson or fermion generator `g`.
    pub fn pair_gen(&self, g: Gen) -> BigRational {
        match g {
            Gen::MB(i) | Gen::MF(i) => BigRational::new(self.n[i as usize].into(), N_DENOM.into()),
            Gen::NB(i) | Gen::NF(i) => BigRational::from_integer(self.m[i as usize].into()),
            _ => BigRational::zero(),
        }
    }

    /// `x^bos` in the generator basis.
    pub fn boson(&self) -> Vec<(Gen, BigRational)> {
        let mut out = Vec::new();
        for i in 0..DIM {
            if self.m[i] != 0 {
                out.push((Gen::MB(i as u8), BigRational::from_integer(self.m[i].into())));
            }
        }
        for i in 0..DIM {
            if self.n[i] != 0 {
                out.push((Gen::NB(i as u8), BigRational::new(self.n[i].into(), N_DENOM.into())));
            }
        }
        out
    }

    /// Coordinates of the M-part in the basis `E_0 = 5e_0`, `E_i = e_i − e_0`.
    fn m_basis_coords(&self) -> [i64; DIM] {
        let mut c = self.m;
        c[0] = self.m.iter().sum::<i64>() / N_DENOM;
        c
    }

    /// Coordinates of the N-part in the dual basis `F_0 = deg^∨`, `F_i = e_i`.
    fn n_basis_coords(&self) -> [i64; DIM] {
        let mut d = [0; DIM];
        d[0] = self.n[0];
        for i in 1..DIM {
            d[i] = (self.n[i] - self.n[0]) / N_DENOM;
        }
        d
    }
}

impl fmt::Display for Momentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.m_point(), self.n_point())
    }
}

/// The lattice cocycle: bimultiplicative, determined on the ordered basis
/// `(E_0,…,E_4,F_0,…,F_4)` by `ε(e_α, e_β) = (−1)^{⟨e_α,e_β⟩}` for `α > β`
/// and `1` otherwise. Only `⟨F_a, E_a⟩ = 1` contributes.
pub fn cocycle(x: &Momentum, y: &Momentum) -> i64 {
    let (xn, ym) = (x.n_basis_coords(), y.m_basis_coords());
    let e: i64 = (0..DIM).map(|a| xn[a] * ym[a]).sum();
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The non-coefficient part of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monom {
    pub factors: Vec<Factor>,
    pub mom: Momentum,
}

/// Sorts `factors` into canonical order; `None` if a fermion repeats.
pub(crate) fn canonical(mut factors: Vec<Factor>) -> Option<(Vec<Factor>, bool)> {
    let mut inversions = 0usize;
    for i in 0..factors.len() {
        if !factors[i].gen.is_fermion() {
            continue;
        }
        for j in i + 1..factors.len() {
            if factors[j].gen.is_fermion() && factors[j] < factors[i] {
                inversions += 1;
            }
        }
    }
    factors.sort();
    if factors
        .windows(2)
        .any(|w| w[0] == w[1] && w[0].gen.is_fermion())
    {
        return None;
    }
    Some((factors, inversions % 2 == 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Field {
    terms: BTreeMap<Monom, CoeffFn>,
}

impl Field {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::coeff(CoeffFn::one())
    }

    /// A function of the coordinates `b^i`.
    pub fn coeff(c: CoeffFn) -> Self {
        let mut f = Self::zero();
        f.add_monom(Monom::default(), c);
        f
    }

    /// `c · :factors e^mom:` with the factors in the given order.
    pub fn monomial(c: CoeffFn, factors: Vec<Factor>, mom: Momentum) -> Self {
        let mut f = Self::zero();
        if let Some((factors, flip)) = canonical(factors) {
            f.add_monom(Monom { factors, mom }, if flip { c.neg() } else { c });
        }
        f
    }

    pub fn gen(g: Gen) -> Self {
        Self::monomial(CoeffFn::one(), vec![Factor::new(g, 0)], Momentum::default())
    }

    pub fn a(i: u8) -> Self {
        Self::gen(Gen::A(i))
    }

    pub fn b(i: u8) -> Self {
        Self::coeff(CoeffFn::var(i))
    }

    pub fn phi(i: u8) -> Self {
        Self::gen(Gen::Phi(i))
    }

    pub fn psi(i: u8) -> Self {
        Self::gen(Gen::Psi(i))
    }

    pub fn exp(x: Momentum) -> Self {
        Self::monomial(CoeffFn::one(), Vec::new(), x)
    }

    /// `x^bos`.
    pub fn lattice_boson(x: &Momentum) -> Self {
        let mut out = Self::zero();
        for (g, c) in x.boson() {
            out = out.add(&Self::gen(g).scale(&c));
        }
        out
    }

    /// `x^ferm`.
    pub fn lattice_fermion(x: &Momentum) -> Self {
        let mut out = Self::zero();
        for (g, c) in x.boson() {
            let g = match g {
                Gen::MB(i) => Gen::MF(i),
                Gen::NB(i) => Gen::NF(i),
                _ => unreachable!("boson() yields lattice bosons"),
            };
            out = out.add(&Self::gen(g).scale(&c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monom, &CoeffFn)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest number of factors in a term.
    pub fn max_factors(&self) -> usize {
        self.terms.keys().map(|m| m.factors.len()).max().unwrap_or(0)
    }

    pub(crate) fn add_monom(&mut self, m: Monom, c: CoeffFn) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot = slot.add(&c);
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, o: &Field) -> Field {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_monom(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Field) -> Field {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Field {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Field {
        self.mul_coeff(&CoeffFn::constant(c.clone()))
    }

    pub fn scale_int(&self, c: i64) -> Field {
        self.scale(&BigRational::from_integer(BigInt::from(c)))
    }

    /// Multiplies every coefficient by `c` (inside the Wick ordering).
    pub fn mul_coeff(&self, c: &CoeffFn) -> Field {
        let mut out = Field::zero();
        for (m, v) in &self.terms {
            out.add_monom(m.clone(), v.mul(c));
        }
        out
    }

    /// The Wick-normal-ordered product `:self other:` with no contractions.
    /// Momenta add without a cocycle factor.
    pub fn wick(&self, o: &Field) -> Field {
        let mut out = Field::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut fs = m1.factors.clone();
                fs.extend_from_slice(&m2.factors);
                out = out.add(&Field::monomial(c1.mul(c2), fs, m1.mom.add(&m2.mom)));
            }
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&CoeffFn) -> CoeffFn) -> Field {
        let mut out = Field::zero();
        for (m, c) in &self.terms {
            out.add_monom(m.clone(), f(c));
        }
        out
    }

    /// The translation derivative `∂`.
    pub fn derivative(&self) -> Field {
        let mut out = Field::zero();
        for (m, c) in &self.terms {
            for k in 0..m.factors.len() {
                let mut fs = m.factors.clone();
                fs[k].der += 1;
                out = out.add(&Field::monomial(c.clone(), fs, m.mom));
            }
            let deps = c.dependencies();
            for j in 0..32u8 {
                if deps & (1 << j) == 0 {
                    continue;
                }
                let dc = c.partial(j);
                let mut fs = m.factors.clone();
                fs.push(Factor::new(Gen::B(j), 1));
                out = out.add(&Field::monomial(dc, fs, m.mom));
            }
            for (g, k) in m.mom.boson() {
                let mut fs = m.factors.clone();
                fs.push(Factor::new(g, 0));
                out = out.add(&Field::monomial(c.mul(&CoeffFn::constant(k)), fs, m.mom));
            }
        }
        out
    }

    /// Sum of the conformal weights of the factors when every term has the
    /// same weight and no exponential.
    pub fn free_weight(&self) -> Option<i32> {
        let mut w = None;
        for m in self.terms.keys() {
            if !m.mom.is_zero() {
                return None;
            }
            let t: i32 = m.factors.iter().map(|f| f.gen.weight() + f.der as i32).sum();
            match w {
                None => w = Some(t),
                Some(v) if v != t => return None,
                _ => {}
            }
        }
        w
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if !m.factors.is_empty() || !m.mom.is_zero() {
                write!(f, "·:")?;
                let parts: Vec<String> = m.factors.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(" "))?;
                if !m.mom.is_zero() {
                    if !m.factors.is_empty() {
                        write!(f, " ")?;
                    }
                    write!(f, "e^{{{}}}", m.mom)?;
                }
                write!(f, ":")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermions_anticommute() {
        let x = Field::phi(1).wick(&Field::psi(1));
        let y = Field::psi(1).wick(&Field::phi(1));
        assert_eq!(x, y.neg());
        assert!(Field::phi(1).wick(&Field::phi(1)).is_zero());
        let z = Field::a(1).wick(&Field::phi(2));
        assert_eq!(z, Field::phi(2).wick(&Field::a(1)));
    }

    #[test]
    fn derivative_of_functions_uses_chain_rule() {
        // ∂(y_1^2) = 2 y_1 b1'
        let f = Field::coeff(CoeffFn::var(1).pow(2)).derivative();
        let expected = Field::monomial(
            CoeffFn::var(1).scale(&BigRational::from_integer(2.into())),
            vec![Factor::new(Gen::B(1), 1)],
            Momentum::default(),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn derivative_is_a_derivation() {
        let x = Field::phi(1).mul_coeff(&CoeffFn::var(2));
        let y = Field::psi(2).wick(&Field::a(1));
        let lhs = x.wick(&y).derivative();
        let rhs = x.derivative().wick(&y).add(&x.wick(&y.derivative()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_of_exponential() {
        let x = Momentum::new(&MPoint::axis(0, 5).unwrap(), &NPoint::vertex(1));
        let lhs = Field::exp(x).derivative();
        let rhs = Field::lattice_boson(&x).wick(&Field::exp(x));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cocycle_relation() {
        let pts = [
            Momentum::new(&MPoint::axis(0, 5).unwrap(), &NPoint::vertex(2)),
            Momentum::new(&MPoint::new([1, 1, 1, 1, 1]).unwrap(), &NPoint::zero()),
            Momentum::new(&MPoint::new([2, -1, 0, 3, 1]).unwrap(), &NPoint::from_integers([1, 1, 1, 1, 1])),
            Momentum::from_n(&NPoint::from_numerators([1, 1, 1, 1, 1]).unwrap()),
            Momentum::from_n(&NPoint::from_numerators([3, -2, 8, 3, 3]).unwrap()),
        ];
        for x in &pts {
            for y in &pts {
                let s = if x.pairing(y) % 2 == 0 { 1 } else { -1 };
                assert_eq!(cocycle(x, y), s * cocycle(y, x), "{x} {y}");
                for z in &pts {
                    assert_eq!(cocycle(&x.add(y), z), cocycle(x, z) * cocycle(y, z));
                }
            }
        }
    }
}
