//! The coefficient ring: Laurent polynomials over `Q` in coordinate
//! functions `y_j`, formal function symbols with their partial derivatives,
//! and constant parameters.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// The coordinate `y_j`, i.e. the value of the field `b^j`.
    Var(u8),
    /// `∂_{derivs} name(y)`, where the function depends only on the
    /// coordinates in `deps` (bit `j` for `y_j`).
    Fn { name: String, deps: u32, derivs: Vec<u8> },
    /// A constant symbol.
    Param(String),
}

impl Atom {
    /// `∂_j` of the atom, as a coefficient.
    fn partial(&self, j: u8) -> CoeffFn {
        match self {
            Atom::Var(k) if *k == j => CoeffFn::one(),
            Atom::Var(_) | Atom::Param(_) => CoeffFn::zero(),
            Atom::Fn { name, deps, derivs } => {
                if deps & (1 << j) == 0 {
                    return CoeffFn::zero();
                }
                let mut d = derivs.clone();
                d.push(j);
                d.sort_unstable();
                CoeffFn::atom(Atom::Fn {
                    name: name.clone(),
                    deps: *deps,
                    derivs: d,
                })
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(j) => write!(f, "y{j}"),
            Atom::Param(p) => write!(f, "{p}"),
            Atom::Fn { name, derivs, .. } => {
                if derivs.is_empty() {
                    write!(f, "{name}")
                } else {
                    let d: Vec<String> = derivs.iter().map(|j| j.to_string()).collect();
                    write!(f, "∂{}{name}", d.join(""))
                }
            }
        }
    }
}

/// A product of atoms with nonzero integer exponents.
pub type Monomial = BTreeMap<Atom, i32>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoeffFn {
    terms: BTreeMap<Monomial, BigRational>,
}

impl CoeffFn {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut out = Self::zero();
        out.add_term(Monomial::new(), c);
        out
    }

    pub fn int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn atom(a: Atom) -> Self {
        let mut m = Monomial::new();
        m.insert(a, 1);
        let mut out = Self::zero();
        out.add_term(m, BigRational::one());
        out
    }

    pub fn var(j: u8) -> Self {
        Self::atom(Atom::Var(j))
    }

    pub fn param(name: &str) -> Self {
        Self::atom(Atom::Param(name.to_string()))
    }

    /// A function symbol depending on the coordinates listed in `deps`.
    pub fn func(name: &str, deps: &[u8]) -> Self {
        Self::atom(Atom::Fn {
            name: name.to_string(),
            deps: deps.iter().fold(0, |m, j| m | (1 << j)),
            derivs: Vec::new(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this is a constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::new()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, o: &CoeffFn) -> CoeffFn {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &CoeffFn) -> CoeffFn {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> CoeffFn {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> CoeffFn {
        let mut out = CoeffFn::zero();
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, o: &CoeffFn) -> CoeffFn {
        let mut out = CoeffFn::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        out
    }

    /// Integer power; negative exponents need a single-term coefficient.
    pub fn pow(&self, e: i32) -> CoeffFn {
        if e >= 0 {
            let mut out = CoeffFn::one();
            for _ in 0..e {
                out = out.mul(self);
            }
            return out;
        }
        assert_eq!(self.terms.len(), 1, "only monomials can be inverted, got {self}");
        let (m, c) = self.terms.iter().next().expect("one term");
        let inv: Monomial = m.iter().map(|(a, k)| (a.clone(), -k * -e)).collect();
        let mut out = CoeffFn::zero();
        out.add_term(inv, num_traits::pow(c.recip(), (-e) as usize));
        out
    }

    /// `∂/∂y_j`.
    pub fn partial(&self, j: u8) -> CoeffFn {
        let mut out = CoeffFn::zero();
        for (m, c) in &self.terms {
            for (a, &e) in m {
                let da = a.partial(j);
                if da.is_zero() {
                    continue;
                }
                let mut rest = m.clone();
                if e == 1 {
                    rest.remove(a);
                } else {
                    rest.insert(a.clone(), e - 1);
                }
                let k = c * BigRational::from_integer(e.into());
                for (dm, dc) in &da.terms {
                    out.add_term(mono_mul(&rest, dm), &k * dc);
                }
            }
        }
        out
    }

    /// Coordinates `y_j` on which some term depends, directly or through a
    /// function symbol.
    pub fn dependencies(&self) -> u32 {
        let mut deps = 0;
        for m in self.terms.keys() {
            for a in m.keys() {
                match a {
                    Atom::Var(j) => deps |= 1 << j,
                    Atom::Fn { deps: d, .. } => deps |= d,
                    Atom::Param(_) => {}
                }
            }
        }
        deps
    }

    /// Replaces the function symbol `name` (and its derivatives) by
    /// `replacement` (and the matching derivatives).
    pub fn substitute(&self, name: &str, replacement: &CoeffFn) -> CoeffFn {
        let mut out = CoeffFn::zero();
        for (m, c) in &self.terms {
            let mut acc = CoeffFn::constant(c.clone());
            let mut kept = Monomial::new();
            for (a, &e) in m {
                match a {
                    Atom::Fn { name: n, derivs, .. } if n == name => {
                        let mut r = replacement.clone();
                        for j in derivs {
                            r = r.partial(*j);
                        }
                        acc = acc.mul(&r.pow(e));
                    }
                    _ => {
                        kept.insert(a.clone(), e);
                    }
                }
            }
            let mut k = CoeffFn::zero();
            k.add_term(kept, BigRational::one());
            out = out.add(&acc.mul(&k));
        }
        out
    }
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (atom, e) in b {
        let slot = out.entry(atom.clone()).or_insert(0);
        *slot += e;
        if *slot == 0 {
            out.remove(atom);
        }
    }
    out
}

impl fmt::Display for CoeffFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let abs = c.abs();
            let parts: Vec<String> = m
                .iter()
                .map(|(a, e)| if *e == 1 { a.to_string() } else { format!("{a}^{e}") })
                .collect();
            if parts.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", parts.join("·"))?;
            } else {
                write!(f, "{abs}·{}", parts.join("·"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> CoeffFn {
        CoeffFn::func("P", &[1, 2])
    }

    #[test]
    fn inverse_cancels() {
        let x = p().mul(&p().pow(-1));
        assert_eq!(x, CoeffFn::one());
    }

    #[test]
    fn derivative_of_inverse() {
        // ∂_1 P^{-1} = −P^{-2} ∂_1 P
        let lhs = p().pow(-1).partial(1);
        let rhs = p().pow(-2).mul(&p().partial(1)).neg();
        assert_eq!(lhs, rhs);
        assert!(p().partial(3).is_zero());
    }

    #[test]
    fn mixed_partials_commute() {
        assert_eq!(p().partial(1).partial(2), p().partial(2).partial(1));
    }

    #[test]
    fn leibniz() {
        let f = CoeffFn::var(1).mul(&p()).add(&CoeffFn::int(3));
        let g = p().pow(-1).mul(&CoeffFn::var(2));
        let lhs = f.mul(&g).partial(1);
        let rhs = f.partial(1).mul(&g).add(&f.mul(&g.partial(1)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_follows_derivatives() {
        // P ↦ y_2: ∂_2 P ↦ 1, ∂_1 P ↦ 0, P^{-1} ↦ y_2^{-1}.
        let e = p().partial(2).add(&p().partial(1)).add(&p().pow(-1));
        let s = e.substitute("P", &CoeffFn::var(2));
        assert_eq!(s, CoeffFn::one().add(&CoeffFn::var(2).pow(-1)));
    }

    #[test]
    fn params_are_constants() {
        let g = CoeffFn::param("g");
        assert!(g.partial(1).is_zero());
        assert_eq!(g.mul(&g.pow(-1)), CoeffFn::one());
    }
}
