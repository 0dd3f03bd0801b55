//! Double description: enumerate the generators of `{y : M y ≥ 0}`.
//!
//! The incremental algorithm maintains a lineality basis plus a minimal set of
//! extreme rays (modulo lineality) and inserts one halfspace at a time, using
//! the combinatorial adjacency test on zero sets of the processed rows.

use num::{Signed, Zero};

use crate::linalg::{dot, is_zero_vec, primitive, reduce_mod_rowspace, rref, scale_vec, sub_vec};
use crate::xreal::Rat;

/// Generators of the cone `{y ∈ Q^dim : m·y ≥ 0 for every m in rows}`:
/// a lineality basis and extreme rays modulo that lineality.
pub struct ConeGenerators {
    pub lineality: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
}

pub fn dd_cone(dim: usize, rows: &[Vec<Rat>]) -> ConeGenerators {
    let mut lineality: Vec<Vec<Rat>> = (0..dim).map(|i| crate::linalg::unit(dim, i)).collect();
    let mut rays: Vec<Vec<Rat>> = Vec::new();
    let mut processed: Vec<Vec<Rat>> = Vec::new();

    let mut ordered: Vec<Vec<Rat>> = rows.iter().filter(|m| !is_zero_vec(m)).cloned().collect();
    ordered.sort_by(|a, b| crate::linalg::lex_cmp(a, b));
    ordered.dedup();

    for m in ordered {
        let pivot = lineality.iter().position(|l| !dot(&m, l).is_zero());
        if let Some(k) = pivot {
            // Split the lineality: one basis direction leaves the lineality
            // space and becomes a ray on the feasible side.
            let mut l = lineality.remove(k);
            if dot(&m, &l).is_negative() {
                l = crate::linalg::neg_vec(&l);
            }
            let ml = dot(&m, &l);
            for lj in lineality.iter_mut() {
                let f = dot(&m, lj) / &ml;
                if !f.is_zero() {
                    *lj = sub_vec(lj, &scale_vec(&f, &l));
                }
            }
            for r in rays.iter_mut() {
                let f = dot(&m, r) / &ml;
                if !f.is_zero() {
                    *r = primitive(&sub_vec(r, &scale_vec(&f, &l)));
                }
            }
            rays.push(primitive(&l));
            processed.push(m);
            continue;
        }

        let vals: Vec<Rat> = rays.iter().map(|r| dot(&m, r)).collect();
        if vals.iter().all(|v| !v.is_negative()) {
            processed.push(m);
            continue;
        }
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();

        let mut next: Vec<Vec<Rat>> = (0..rays.len())
            .filter(|&i| !vals[i].is_negative())
            .map(|i| rays[i].clone())
            .collect();
        for &i in &plus {
            for &j in &minus {
                if adjacent(&rays, &processed, i, j) {
                    let comb = sub_vec(
                        &scale_vec(&vals[i], &rays[j]),
                        &scale_vec(&vals[j], &rays[i]),
                    );
                    next.push(primitive(&comb));
                }
            }
        }
        next.sort_by(|a, b| crate::linalg::lex_cmp(a, b));
        next.dedup();
        rays = next;
        processed.push(m);
    }

    // Canonical output: RREF lineality, rays reduced modulo it.
    let (lin, pivots) = rref(&lineality);
    let lineality: Vec<Vec<Rat>> = lin.iter().map(|l| primitive(l)).collect();
    let mut out_rays: Vec<Vec<Rat>> = rays
        .iter()
        .map(|r| primitive(&reduce_mod_rowspace(r, &lin, &pivots)))
        .filter(|r| !is_zero_vec(r))
        .collect();
    out_rays.sort_by(|a, b| crate::linalg::lex_cmp(a, b));
    out_rays.dedup();
    ConeGenerators {
        lineality,
        rays: out_rays,
    }
}

/// Combinatorial adjacency: rays `i` and `j` are adjacent iff no further ray
/// is tight on every processed row on which both are tight.
fn adjacent(rays: &[Vec<Rat>], processed: &[Vec<Rat>], i: usize, j: usize) -> bool {
    let common: Vec<&Vec<Rat>> = processed
        .iter()
        .filter(|m| dot(m, &rays[i]).is_zero() && dot(m, &rays[j]).is_zero())
        .collect();
    for (k, r) in rays.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        if common.iter().all(|m| dot(m, r).is_zero()) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xreal::rat;

    fn r(n: i64) -> Rat {
        rat(n, 1)
    }

    #[test]
    fn positive_orthant() {
        let rows = vec![vec![r(1), r(0)], vec![r(0), r(1)]];
        let g = dd_cone(2, &rows);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays.len(), 2);
        assert!(g.rays.contains(&vec![r(1), r(0)]));
        assert!(g.rays.contains(&vec![r(0), r(1)]));
    }

    #[test]
    fn halfspace_keeps_lineality() {
        let rows = vec![vec![r(1), r(0)]];
        let g = dd_cone(2, &rows);
        assert_eq!(g.lineality.len(), 1);
        assert_eq!(g.rays.len(), 1);
    }

    #[test]
    fn whole_space() {
        let g = dd_cone(3, &[]);
        assert_eq!(g.lineality.len(), 3);
        assert!(g.rays.is_empty());
    }

    #[test]
    fn pointed_three_dim() {
        // x ≥ 0, y ≥ 0, z ≥ 0, x + y ≥ z  → four extreme rays
        let rows = vec![
            vec![r(1), r(0), r(0)],
            vec![r(0), r(1), r(0)],
            vec![r(0), r(0), r(1)],
            vec![r(1), r(1), r(-1)],
        ];
        let g = dd_cone(3, &rows);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays.len(), 4);
    }
}
