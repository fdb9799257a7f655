//! Sparse homogeneous polynomials in `x_0, …, x_4` with exact rational
//! coefficients. Exponent vectors double as lattice points of `K`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::lattice::{MPoint, DIM};

pub type Exps = [u32; DIM];

/// Parse a decimal rational such as `"3"`, `"-7/2"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    degree: u32,
    terms: BTreeMap<Exps, BigRational>,
}

impl Poly {
    pub fn zero(degree: u32) -> Self {
        Self {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exps: Exps, coef: BigRational) -> Self {
        let mut p = Self::zero(exps.iter().sum());
        p.add_term(exps, coef);
        p
    }

    /// Builds a polynomial, rejecting terms of the wrong degree.
    pub fn from_terms<I>(degree: u32, terms: I) -> Result<Self, Exps>
    where
        I: IntoIterator<Item = (Exps, BigRational)>,
    {
        let mut p = Self::zero(degree);
        for (e, c) in terms {
            if e.iter().sum::<u32>() != degree {
                return Err(e);
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &Exps) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, exps: Exps, coef: BigRational) {
        debug_assert_eq!(exps.iter().sum::<u32>(), self.degree);
        if coef.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *slot += coef;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.degree, other.degree, "adding polynomials of different degree");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        let mut out = Poly::zero(self.degree);
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-BigRational::one())
    }

    /// Multiply by `x_i`.
    pub fn mul_var(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.degree + 1);
        for (e, c) in &self.terms {
            let mut e = *e;
            e[i] += 1;
            out.add_term(e, c.clone());
        }
        out
    }

    /// Divide by `x_i`; `None` when some term is not divisible.
    pub fn div_var(&self, i: usize) -> Option<Poly> {
        if self.degree == 0 {
            return if self.is_zero() { Some(self.clone()) } else { None };
        }
        let mut out = Poly::zero(self.degree - 1);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                return None;
            }
            let mut e = *e;
            e[i] -= 1;
            out.add_term(e, c.clone());
        }
        Some(out)
    }

    /// `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = *e;
            d[i] -= 1;
            out.add_term(d, c * rat(e[i] as i64));
        }
        out
    }

    /// Exponent vectors of a degree-5 polynomial read as points of `Δ`.
    pub fn support_points(&self) -> impl Iterator<Item = (MPoint, &BigRational)> {
        self.terms.iter().map(|(e, c)| {
            let m = MPoint::new(e.map(|x| x as i64)).expect("degree-5k exponent vectors lie in M");
            (m, c)
        })
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("x{i}") } else { format!("x{i}^{p}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&abs), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// All exponent vectors of total degree `d` in five variables, lexicographic.
pub fn monomials(d: u32) -> Vec<Exps> {
    fn rec(idx: usize, rem: u32, cur: &mut Exps, out: &mut Vec<Exps>) {
        if idx == DIM - 1 {
            cur[idx] = rem;
            out.push(*cur);
            return;
        }
        for c in 0..=rem {
            cur[idx] = c;
            rec(idx + 1, rem - c, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, d, &mut [0; DIM], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3"), Some(rat(3)));
        assert_eq!(parse_rational(" -7/2 "), Some(BigRational::new((-7).into(), 2.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&BigRational::new(6.into(), 4.into())), "3/2");
    }

    #[test]
    fn euler_identity_on_a_quintic() {
        let mut f = Poly::zero(5);
        f.add_term([4, 1, 0, 0, 0], rat(1));
        f.add_term([1, 1, 1, 1, 1], rat(-3));
        f.add_term([0, 0, 0, 0, 5], BigRational::new(2.into(), 7.into()));
        let mut sum = Poly::zero(5);
        for i in 0..DIM {
            sum = sum.add(&f.partial(i).mul_var(i));
        }
        assert_eq!(sum, f.scale(&rat(5)));
    }

    #[test]
    fn division_by_variable() {
        let p = Poly::monomial([2, 3, 0, 0, 0], rat(4));
        assert_eq!(p.div_var(0).unwrap(), Poly::monomial([1, 3, 0, 0, 0], rat(4)));
        assert!(p.div_var(2).is_none());
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(4).len(), 70);
        assert_eq!(monomials(5).len(), 126);
    }
}
