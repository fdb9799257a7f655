//! Fan truncation against a direct feasibility test: `n` lies in the cone
//! `σ_i = ⟨±deg^∨, v_j (j ≠ i)⟩` iff the unique solution of
//! `n = λ deg^∨ + Σ_{j≠i} μ_j v_j` has all `μ_j ≥ 0`.

use chiralkit_core::lattice::{enum_graded_kdual, NPoint, DIM};
use chiralkit_vertex::field::{Field, Momentum};
use chiralkit_vertex::ope::{expand, ExpandOptions};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// Solves `A x = y` for square invertible `A` by Gaussian elimination.
fn solve(mut a: Vec<Vec<BigRational>>, mut y: Vec<BigRational>) -> Vec<BigRational> {
    let k = y.len();
    for c in 0..k {
        let p = (c..k).find(|&r| !a[r][c].is_zero()).expect("invertible");
        a.swap(c, p);
        y.swap(c, p);
        for r in 0..k {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for cc in 0..k {
                    let t = &f * &a[c][cc];
                    a[r][cc] -= t;
                }
                let t = &f * &y[c];
                y[r] -= t;
            }
        }
    }
    (0..k).map(|r| &y[r] / &a[r][r]).collect()
}

fn in_cone(n: &NPoint, i: usize) -> bool {
    // Columns: deg^∨, then e_j for j ≠ i.
    let others: Vec<usize> = (0..DIM).filter(|&j| j != i).collect();
    let a = (0..DIM)
        .map(|row| {
            let mut r = vec![q(1, 5)];
            r.extend(others.iter().map(|&j| if j == row { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let y = n.numerators().iter().map(|&v| q(v, 5)).collect();
    solve(a, y)[1..].iter().all(|mu| !mu.is_negative())
}

fn share_cone(a: &NPoint, b: &NPoint) -> bool {
    (0..DIM).any(|i| in_cone(a, i) && in_cone(b, i))
}

/// Returns how many ordered pairs were kept.
fn compare_on(pts: &[NPoint]) -> usize {
    let mut kept = 0;
    for x in pts {
        for y in pts {
            let (ex, ey) = (Field::exp(Momentum::from_n(x)), Field::exp(Momentum::from_n(y)));
            let full = expand(&ex, &ey, 0, ExpandOptions::default()).unwrap();
            let cut = expand(&ex, &ey, 0, ExpandOptions { sigma: true }).unwrap();
            assert!(!full.is_zero());
            if share_cone(x, y) {
                assert_eq!(cut, full, "{x} {y}");
                kept += 1;
            } else {
                assert!(cut.is_zero(), "{x} {y}");
            }
        }
    }
    kept
}

#[test]
fn truncation_matches_cone_feasibility() {
    let pts: Vec<NPoint> = enum_graded_kdual(1).into_iter().chain(enum_graded_kdual(2)).collect();
    assert_eq!(pts.len(), 27);
    // Two points of degree at most 2 use at most four rays, so a cone
    // missing the fifth contains both.
    assert_eq!(compare_on(&pts), 27 * 27);
}

#[test]
fn truncation_drops_pairs_in_degree_four() {
    let pts: Vec<NPoint> = enum_graded_kdual(4).into_iter().step_by(5).collect();
    let kept = compare_on(&pts);
    assert!(kept < pts.len() * pts.len(), "nothing dropped");
}
