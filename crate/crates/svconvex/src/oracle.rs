//! Brute-force evaluators on finite grids and finite set families.
//!
//! These sweeps share no code with the LP/double-description paths of the
//! kernel: everything here is plain dot products, min/max folds and the
//! extended-real conventions. Grid results are certified one-sided bounds of
//! the exact values (the bound direction depends on the operation) and match
//! the kernel exactly at generator points of upper-set instances. This module
//! also hosts the one intentionally non-polyhedral construction: the
//! non-closed scalarization demo.

use num::Zero;
use serde::Serialize;

use crate::linalg::dot;
use crate::xreal::{idif, inf_of, sup_of, rat, Rat, XReal};

/// Finite sample of a set-valued function: each domain point carries finitely
/// many image points (generators). Evaluation away from the samples is
/// unknown, never extrapolated.
#[derive(Clone, Debug)]
pub struct GridSetFn {
    pub samples: Vec<(Vec<Rat>, Vec<Vec<Rat>>)>,
}

/// Finite sample of an extended-real-valued function.
#[derive(Clone, Debug)]
pub struct GridScalarFn {
    pub samples: Vec<(Vec<Rat>, XReal)>,
}

/// Scalarization sweep: `φ(x) = min over sampled z of -z*·z`, `+∞` on empty
/// sample sets. An upper bound of the exact scalarization (the sample is a
/// subset of the value); exact when the samples generate the value as
/// `points + C`.
pub fn grid_scalarize(g: &GridSetFn, zstar: &[Rat]) -> GridScalarFn {
    let samples = g
        .samples
        .iter()
        .map(|(x, zs)| {
            let vals: Vec<XReal> = zs
                .iter()
                .map(|z| XReal::Finite(-dot(zstar, z)))
                .collect();
            (x.clone(), inf_of(vals.iter()))
        })
        .collect();
    GridScalarFn { samples }
}

/// Conjugate sweep: `sup over sampled x of (x*·x ⊖ g(x))`. A lower bound of
/// the exact conjugate; exact when the sup is attained at a sampled point.
pub fn grid_conjugate(g: &GridScalarFn, xstar: &[Rat]) -> XReal {
    let vals: Vec<XReal> = g
        .samples
        .iter()
        .map(|(x, v)| idif(&XReal::Finite(dot(xstar, x)), v))
        .collect();
    sup_of(vals.iter())
}

/// Support sweep: `max over sampled points of w·p`; `-∞` on the empty sample.
/// A lower bound of the exact support value.
pub fn grid_support(points: &[Vec<Rat>], w: &[Rat]) -> XReal {
    let vals: Vec<XReal> = points
        .iter()
        .map(|p| XReal::Finite(dot(w, p)))
        .collect();
    sup_of(vals.iter())
}

/// Residual sweep: the lattice points `z` with `b + z ∈ A` for every sampled
/// generator `b` of `B`, membership decided by direct row evaluation against
/// the halfspace list of `A`. A superset of the exact residual in general;
/// exact when `A` is an upper set and the samples generate `B`.
pub fn grid_residual(
    a_rows: &[(Vec<Rat>, Rat)],
    b_points: &[Vec<Rat>],
    lattice: &[Vec<Rat>],
) -> Vec<Vec<Rat>> {
    lattice
        .iter()
        .filter(|z| {
            b_points.iter().all(|b| {
                a_rows
                    .iter()
                    .all(|(a, beta)| dot(a, b) + dot(a, z) >= *beta)
            })
        })
        .cloned()
        .collect()
}

/// Minkowski sweep: all pairwise sums of sampled points. An inner
/// approximation of the exact sum; the kernel's sum contains every output
/// point, with equality of hulls at generators.
pub fn grid_minkowski(a_points: &[Vec<Rat>], b_points: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut out = Vec::new();
    for a in a_points {
        for b in b_points {
            out.push(crate::linalg::add_vec(a, b));
        }
    }
    out
}

/// The non-closed scalarization phenomenon, reproduced on a rational grid:
/// `g(x) = {(1/x, 0)} + C` for `x ∈ (0, 2]`, empty otherwise, `z* = (0, -1)`.
/// The epigraph of `g` is closed while the scalarization jumps at 0.
#[derive(Clone, Debug, Serialize)]
pub struct NonclosedReport {
    /// Sampled positive abscissas with their scalarization values (all 0).
    pub positive_values: Vec<(String, XReal)>,
    /// `φ(0) = +∞`: the infimum over the empty value set.
    pub phi_at_zero: XReal,
    /// `cl φ(0) = 0`: the limit of the grid values as `x ↓ 0`.
    pub closure_at_zero: XReal,
}

pub fn nonclosed_scalarization_demo() -> NonclosedReport {
    let zstar = [rat(0, 1), rat(-1, 1)];
    // rational grid x = 1/k and x = 2/k down toward 0
    let mut grid: Vec<Rat> = Vec::new();
    for k in 1..=16i64 {
        grid.push(rat(1, k));
        grid.push(rat(2, k));
    }
    grid.sort();
    grid.dedup();

    let g = GridSetFn {
        samples: grid
            .iter()
            .map(|x| {
                let inv = Rat::new(x.denom().clone(), x.numer().clone());
                (vec![x.clone()], vec![vec![inv, Rat::zero()]])
            })
            .collect(),
    };
    let phi = grid_scalarize(&g, &zstar);
    let positive_values: Vec<(String, XReal)> = phi
        .samples
        .iter()
        .map(|(x, v)| (crate::xreal::rat_to_string(&x[0]), v.clone()))
        .collect();

    // x = 0 carries no image points: inf ∅ = +∞
    let empty_at_zero = GridSetFn {
        samples: vec![(vec![Rat::zero()], vec![])],
    };
    let phi_at_zero = grid_scalarize(&empty_at_zero, &zstar).samples[0].1.clone();

    // the limit along the grid: the infimum of values at x ↓ 0
    let closure_at_zero = inf_of(phi.samples.iter().map(|(_, v)| v));

    NonclosedReport {
        positive_values,
        phi_at_zero,
        closure_at_zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        rat(n, 1)
    }

    #[test]
    fn grid_conjugate_of_abs() {
        // |x| sampled on x ∈ {-10..10}, conjugate at x* = 1/2 → 0
        let samples: Vec<(Vec<Rat>, XReal)> = (-10..=10)
            .map(|k| (vec![r(k)], XReal::from_int(k.abs())))
            .collect();
        let g = GridScalarFn { samples };
        assert_eq!(grid_conjugate(&g, &[rat(1, 2)]), XReal::zero());
        // and at x* = 2 the grid certifies a lower bound that grows with |x|
        assert_eq!(grid_conjugate(&g, &[r(2)]), XReal::from_int(10));
    }

    #[test]
    fn grid_scalarize_vee() {
        // ḡ(x) = (x, |x|) sampled; z* = (0,-1) recovers |x| on samples
        let g = GridSetFn {
            samples: (-5..=5)
                .map(|k| (vec![r(k)], vec![vec![r(k), r(k.abs())]]))
                .collect(),
        };
        let phi = grid_scalarize(&g, &[r(0), r(-1)]);
        for (x, v) in &phi.samples {
            let abs = if x[0] < Rat::zero() { -&x[0] } else { x[0].clone() };
            assert_eq!(*v, XReal::Finite(abs));
        }
    }

    #[test]
    fn grid_residual_shifted_cones() {
        // A = {(1,2)} + Q²₊ as rows, B sampled by its generator (0,1):
        // lattice points of A ⊖ B = {(1,1)} + Q²₊
        let a_rows = vec![
            (vec![r(1), r(0)], r(1)),
            (vec![r(0), r(1)], r(2)),
        ];
        let b = vec![vec![r(0), r(1)]];
        let mut lattice = Vec::new();
        for i in -3..=3 {
            for j in -3..=3 {
                lattice.push(vec![r(i), r(j)]);
            }
        }
        let res = grid_residual(&a_rows, &b, &lattice);
        for z in &res {
            assert!(z[0] >= r(1) && z[1] >= r(1));
        }
        assert!(res.contains(&vec![r(1), r(1)]));
        assert_eq!(res.len(), 3 * 3);
    }

    #[test]
    fn nonclosed_demo_matches_expected_values() {
        let rep = nonclosed_scalarization_demo();
        assert!(rep
            .positive_values
            .iter()
            .all(|(_, v)| *v == XReal::zero()));
        assert_eq!(rep.phi_at_zero, XReal::PosInf);
        assert_eq!(rep.closure_at_zero, XReal::zero());
    }
}
