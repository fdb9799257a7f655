//! Seeded random model data.
//!
//! Random `(0,2)` models are sparse perturbations of Fermat:
//! `R^i = 5x_i^4 + (a few random degree-4 monomials)` with small nonzero
//! integer coefficients, and nonzero integer `g_n`.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{MPoint, NPoint, DIM};
use crate::model::{FivePolys, GParams, Model};
use crate::poly::{monomials, rat, Poly};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> BigRational {
    let v = rng.gen_range(1..=bound);
    rat(if rng.gen_bool(0.5) { v } else { -v })
}

/// A random model with `F^i = x_i R^i` as described above.
pub fn random_model(rng: &mut ChaCha8Rng) -> Model {
    let quartics = monomials(4);
    let polys = std::array::from_fn(|i| {
        let mut e = [0; DIM];
        e[i] = 4;
        let mut r = Poly::monomial(e, rat(5));
        let extra = rng.gen_range(1..=3);
        for mono in quartics.choose_multiple(rng, extra) {
            r.add_term(*mono, nonzero(rng, 3));
        }
        r.mul_var(i)
    });
    let f = FivePolys::new(polys).expect("x_i R^i is divisible by x_i");
    let g = GParams::from_list(std::array::from_fn(|_| nonzero(rng, 4)));
    Model::new(f, g)
}

/// A random point of `M`.
pub fn random_m(rng: &mut ChaCha8Rng, bound: i64) -> MPoint {
    loop {
        let c = std::array::from_fn(|_| rng.gen_range(-bound..=bound));
        if let Ok(m) = MPoint::new(c) {
            return m;
        }
    }
}

/// A random point of `K^∨` of degree at most `max_degree`.
pub fn random_kdual(rng: &mut ChaCha8Rng, max_degree: u32) -> NPoint {
    let l = rng.gen_range(0..=max_degree);
    let pts = crate::lattice::enum_graded_kdual(l);
    pts[rng.gen_range(0..pts.len())]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let a = random_model(&mut rng(7));
        let b = random_model(&mut rng(7));
        assert_eq!(a, b);
        assert!(a.f.validate().is_ok());
        let c = random_model(&mut rng(8));
        assert_ne!(a, c);
    }
}
