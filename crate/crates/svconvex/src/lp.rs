//! Exact rational linear programming: two-phase primal simplex with Bland's
//! rule. Termination is guaranteed and every answer is bit-exact; certificates
//! (optimal points, unbounded rays, Farkas multipliers) are rational vectors
//! that can be checked by direct substitution.

use num::{One, Signed, Zero};

use crate::linalg::{dot, zeros};
use crate::xreal::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub a: Vec<Rat>,
    pub rel: Rel,
    pub b: Rat,
}

impl Constraint {
    pub fn ge(a: Vec<Rat>, b: Rat) -> Self {
        Constraint { a, rel: Rel::Ge, b }
    }

    pub fn eq(a: Vec<Rat>, b: Rat) -> Self {
        Constraint { a, rel: Rel::Eq, b }
    }
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Infeasible,
    /// Feasible improving ray: `obj·ray > 0` for maximize, constraints stay
    /// satisfied along `point + t·ray` for the returned feasible `point`.
    Unbounded { point: Vec<Rat>, ray: Vec<Rat> },
    Optimal { point: Vec<Rat>, value: Rat },
}

struct Tableau {
    /// `m × (n+1)` rows; last column is the right-hand side.
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    n: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.n]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = &*x / &p;
        }
        for i in 0..self.rows.len() {
            if i != r && !self.rows[i][c].is_zero() {
                let f = self.rows[i][c].clone();
                for j in 0..=self.n {
                    let adj = &f * &self.rows[r][j];
                    self.rows[i][j] = &self.rows[i][j] - adj;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimize `cost` over the current feasible dictionary with Bland's rule.
    /// Columns `>= allowed` are never entered. Returns the unbounded entering
    /// column if the problem is unbounded below.
    fn simplex_min(&mut self, cost: &[Rat], allowed: usize) -> Option<usize> {
        loop {
            // reduced costs r_j = c_j - c_B · B^{-1} A_j, read off the dictionary
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut red = cost[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !cost[bi].is_zero() {
                        let adj = &cost[bi] * &self.rows[i][j];
                        red = red - adj;
                    }
                }
                if red.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return None;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][c].is_positive() {
                    let ratio = self.rhs(i) / &self.rows[i][c];
                    match &leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]) {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Some(c),
            }
        }
    }

    fn point(&self, nvars: usize) -> Vec<Rat> {
        let mut w = zeros(nvars);
        for (i, &bi) in self.basis.iter().enumerate() {
            if bi < nvars {
                w[bi] = self.rhs(i).clone();
            }
        }
        w
    }
}

/// Maximize `obj·x` subject to the constraints, `x` free in Q^d.
pub fn maximize(obj: &[Rat], constraints: &[Constraint]) -> LpOutcome {
    let d = obj.len();
    // free x = u - v with u, v >= 0; one slack per Ge row
    let n_slack = constraints.iter().filter(|c| c.rel == Rel::Ge).count();
    let n_real = 2 * d + n_slack;
    let m = constraints.len();
    let n_total = n_real + m;

    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut slack_idx = 0;
    for (i, con) in constraints.iter().enumerate() {
        debug_assert_eq!(con.a.len(), d, "constraint arity");
        let mut row = zeros(n_total + 1);
        for j in 0..d {
            row[j] = con.a[j].clone();
            row[d + j] = -&con.a[j];
        }
        if con.rel == Rel::Ge {
            row[2 * d + slack_idx] = -Rat::one();
            slack_idx += 1;
        }
        row[n_total] = con.b.clone();
        // normalize rhs >= 0 for the artificial start
        if row[n_total].is_negative() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
        row[n_real + i] = Rat::one();
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        basis: (n_real..n_total).collect(),
        n: n_total,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1 = zeros(n_total);
    for c in phase1.iter_mut().skip(n_real) {
        *c = Rat::one();
    }
    let unb = t.simplex_min(&phase1, n_total);
    debug_assert!(unb.is_none(), "phase 1 is bounded below by 0");
    let p1_value: Rat = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bi)| bi >= n_real)
        .map(|(i, _)| t.rhs(i).clone())
        .sum();
    if !p1_value.is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive remaining artificials out of the basis; drop dependent rows.
    let mut drop_rows = Vec::new();
    for i in 0..t.rows.len() {
        if t.basis[i] >= n_real {
            match (0..n_real).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => drop_rows.push(i),
            }
        }
    }
    for &i in drop_rows.iter().rev() {
        t.rows.remove(i);
        t.basis.remove(i);
    }

    // Phase 2: minimize -obj over (u, v, s).
    let mut cost = zeros(n_total);
    for j in 0..d {
        cost[j] = -&obj[j];
        cost[d + j] = obj[j].clone();
    }
    match t.simplex_min(&cost, n_real) {
        Some(c) => {
            let w = t.point(n_real);
            let mut wray = zeros(n_real);
            wray[c] = Rat::one();
            for (i, &bi) in t.basis.iter().enumerate() {
                if bi < n_real {
                    wray[bi] = -&t.rows[i][c];
                }
            }
            let point = (0..d).map(|j| &w[j] - &w[d + j]).collect();
            let ray = (0..d).map(|j| &wray[j] - &wray[d + j]).collect();
            LpOutcome::Unbounded { point, ray }
        }
        None => {
            let w = t.point(n_real);
            let point: Vec<Rat> = (0..d).map(|j| &w[j] - &w[d + j]).collect();
            let value = dot(obj, &point);
            LpOutcome::Optimal { point, value }
        }
    }
}

pub fn minimize(obj: &[Rat], constraints: &[Constraint]) -> LpOutcome {
    let neg: Vec<Rat> = obj.iter().map(|x| -x).collect();
    match maximize(&neg, constraints) {
        LpOutcome::Optimal { point, value } => LpOutcome::Optimal {
            point,
            value: -value,
        },
        other => other,
    }
}

/// Feasibility check.
pub fn feasible_point(constraints: &[Constraint], d: usize) -> Option<Vec<Rat>> {
    match maximize(&zeros(d), constraints) {
        LpOutcome::Optimal { point, .. } => Some(point),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded { .. } => unreachable!("zero objective cannot be unbounded"),
    }
}

/// Farkas certificate of infeasibility for `{x : a_i·x ≥ b_i (Ge), = b_i (Eq)}`:
/// multipliers `y` with `y_i ≥ 0` on Ge rows, `Σ y_i a_i = 0`, `Σ y_i b_i = 1`.
/// Returns `None` if the system is feasible.
pub fn farkas_certificate(constraints: &[Constraint], d: usize) -> Option<Vec<Rat>> {
    if feasible_point(constraints, d).is_some() {
        return None;
    }
    let m = constraints.len();
    let mut sys: Vec<Constraint> = Vec::new();
    // Σ y_i a_i = 0 (one equation per coordinate)
    for j in 0..d {
        let a: Vec<Rat> = constraints.iter().map(|c| c.a[j].clone()).collect();
        sys.push(Constraint::eq(a, Rat::zero()));
    }
    // Σ y_i b_i = 1
    let bs: Vec<Rat> = constraints.iter().map(|c| c.b.clone()).collect();
    sys.push(Constraint::eq(bs, Rat::one()));
    // y_i ≥ 0 on inequality rows
    for (i, c) in constraints.iter().enumerate() {
        if c.rel == Rel::Ge {
            let mut a = zeros(m);
            a[i] = Rat::one();
            sys.push(Constraint::ge(a, Rat::zero()));
        }
    }
    let y = feasible_point(&sys, m)?;
    debug_assert!({
        let comb: Vec<Rat> = (0..d)
            .map(|j| {
                constraints
                    .iter()
                    .zip(&y)
                    .map(|(c, yi)| &c.a[j] * yi)
                    .sum()
            })
            .collect();
        comb.iter().all(Zero::is_zero)
    });
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xreal::rat;

    fn r(n: i64) -> Rat {
        rat(n, 1)
    }

    #[test]
    fn simple_box() {
        // max x + y over the unit square
        let cons = vec![
            Constraint::ge(vec![r(1), r(0)], r(0)),
            Constraint::ge(vec![r(-1), r(0)], r(-1)),
            Constraint::ge(vec![r(0), r(1)], r(0)),
            Constraint::ge(vec![r(0), r(-1)], r(-1)),
        ];
        match maximize(&[r(1), r(1)], &cons) {
            LpOutcome::Optimal { point, value } => {
                assert_eq!(value, r(2));
                assert_eq!(point, vec![r(1), r(1)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn detects_infeasibility_with_certificate() {
        // x >= 1 and -x >= 0
        let cons = vec![
            Constraint::ge(vec![r(1)], r(1)),
            Constraint::ge(vec![r(-1)], r(0)),
        ];
        assert!(matches!(maximize(&[r(0)], &cons), LpOutcome::Infeasible));
        let y = farkas_certificate(&cons, 1).unwrap();
        let combo = &y[0] * &cons[0].b + &y[1] * &cons[1].b;
        assert!(combo.is_positive());
    }

    #[test]
    fn detects_unboundedness_with_ray() {
        let cons = vec![Constraint::ge(vec![r(1), r(0)], r(0))];
        match maximize(&[r(1), r(0)], &cons) {
            LpOutcome::Unbounded { point, ray } => {
                assert!(dot(&[r(1), r(0)], &ray).is_positive());
                // point + t*ray stays feasible
                assert!(point[0] >= r(0));
                assert!(ray[0] >= r(0));
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn equality_rows() {
        // max y  s.t. x + y = 1, x >= 0, y >= 0
        let cons = vec![
            Constraint::eq(vec![r(1), r(1)], r(1)),
            Constraint::ge(vec![r(1), r(0)], r(0)),
            Constraint::ge(vec![r(0), r(1)], r(0)),
        ];
        match maximize(&[r(0), r(1)], &cons) {
            LpOutcome::Optimal { point, value } => {
                assert_eq!(value, r(1));
                assert_eq!(point, vec![r(0), r(1)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn exact_fractions() {
        // max x s.t. 3x <= 1  (i.e. -3x >= -1)
        let cons = vec![Constraint::ge(vec![rat(-3, 1)], rat(-1, 1))];
        match maximize(&[r(1)], &cons) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(1, 3)),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_guard() {
        // A classically degenerate instance; Bland's rule must terminate.
        let cons = vec![
            Constraint::ge(vec![r(1), r(0), r(0)], r(0)),
            Constraint::ge(vec![r(0), r(1), r(0)], r(0)),
            Constraint::ge(vec![r(0), r(0), r(1)], r(0)),
            Constraint::ge(
                vec![rat(-3, 4), r(20), rat(-1, 2)],
                r(-6),
            ),
            Constraint::ge(vec![rat(1, 4), r(-8), r(-1)], r(-9)),
            Constraint::ge(vec![r(0), r(0), r(-1)], r(-1)),
        ];
        let obj = [rat(3, 4), r(-20), rat(1, 2)];
        assert!(matches!(
            maximize(&obj, &cons),
            LpOutcome::Optimal { .. } | LpOutcome::Unbounded { .. }
        ));
    }
}
