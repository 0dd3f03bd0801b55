//! Set-valued duality as executable checks with witnesses: the chain rule,
//! the sandwich theorem, Fenchel–Rockafellar duality, and the fundamental
//! duality formula. Every dual value is computed from an exact-rational dual
//! LP over the scalarized conjugates; witnesses are deterministic (Bland's
//! rule breaks ties).

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, is_zero_vec, neg_vec, primitive, zeros, LinMap};
use crate::lp::{self, Constraint, LpOutcome};
use crate::polyhedra::Polyhedron;
use crate::scalar_fn::ScalarFn;
use crate::upperset_fn::{HalfSpaceValue, SetFn, UpperSet};
use crate::xreal::{idif, inf_add, Rat, XReal};

// ---------------------------------------------------------------------------
// halfspace-level arithmetic
// ---------------------------------------------------------------------------

/// Level of a halfspace value with `z* = 0` collapsed to `±∞`, so that level
/// arithmetic matches Minkowski arithmetic on the represented sets.
fn canonical_level(v: &HalfSpaceValue) -> XReal {
    if is_zero_vec(v.zstar()) {
        return match v.alpha() {
            XReal::PosInf => XReal::PosInf,
            XReal::Finite(a) if a.is_positive() => XReal::PosInf,
            _ => XReal::NegInf,
        };
    }
    v.alpha().clone()
}

/// Minkowski sum of two halfspace values sharing a direction:
/// `H_a(z*) + H_b(z*) = H_{inf_add(a, b)}(z*)`, with `∅` dominating.
pub fn hsv_add(a: &HalfSpaceValue, b: &HalfSpaceValue) -> Result<HalfSpaceValue> {
    if a.zstar() != b.zstar() {
        return Err(Error::dim("hsv_add: directions differ"));
    }
    let level = inf_add(&canonical_level(a), &canonical_level(b));
    let out = HalfSpaceValue::new(a.space().clone(), a.zstar().to_vec(), level)?;
    debug_assert!(out
        .materialize()
        .equal(&a.materialize().minkowski_sum(&b.materialize()).unwrap()));
    Ok(out)
}

/// `H(z*) ⊖ V = H_{idif(0, level(V))}(z*)`.
fn h_residual(v: &HalfSpaceValue) -> Result<HalfSpaceValue> {
    let level = idif(&XReal::zero(), &canonical_level(v));
    HalfSpaceValue::new(v.space().clone(), v.zstar().to_vec(), level)
}

// ---------------------------------------------------------------------------
// the shared dual LP
// ---------------------------------------------------------------------------

/// `inf over y* of g_conj(T*·y*) + f_conj(-y*)` with a minimizing `y*`:
/// the scalar dual functional shared by the sandwich theorem and
/// Fenchel–Rockafellar duality. `t` maps `X → Y`.
fn dual_pair_value(
    g_conj: &ScalarFn,
    f_conj: &ScalarFn,
    t: &LinMap,
) -> Result<(XReal, Option<Vec<Rat>>)> {
    let p = f_conj.n(); // dim Y* = dim Y
    let nvars = p + 2; // (y*, s1, s2)
    let mut sys = Vec::new();
    for (a, b) in g_conj.epi().hrep().rows.iter() {
        let (au, c) = a.split_at(g_conj.n());
        // a·(T* y*) = (T a)·y*
        let ta = t.apply(au)?;
        let mut row = ta;
        row.push(c[0].clone());
        row.push(Rat::zero());
        sys.push(Constraint::ge(row, b.clone()));
    }
    for (a, b) in f_conj.epi().hrep().rows.iter() {
        let (ay, c) = a.split_at(p);
        let mut row = neg_vec(ay);
        row.push(Rat::zero());
        row.push(c[0].clone());
        sys.push(Constraint::ge(row, b.clone()));
    }
    let mut obj = zeros(nvars);
    obj[p] = -Rat::one();
    obj[p + 1] = -Rat::one();
    Ok(match lp::maximize(&obj, &sys) {
        LpOutcome::Infeasible => (XReal::PosInf, None),
        LpOutcome::Unbounded { .. } => (XReal::NegInf, None),
        LpOutcome::Optimal { point, value } => (XReal::Finite(-value), Some(point[..p].to_vec())),
    })
}

// ---------------------------------------------------------------------------
// inf-convolution of conjugates
// ---------------------------------------------------------------------------

/// Infimal convolution of the conjugates of `g1` and `g2` at `(x*, z*, r)`:
/// the closed union over splits `x₁* + x₂* = x*`, `r₁ + r₂ = r` of
/// `g1*(x₁*, z*, r₁) + g2*(x₂*, z*, r₂)`, computed by one exact LP over the
/// split variable. `r` must be finite.
pub fn conj_inf_convolve(
    g1: &SetFn,
    g2: &SetFn,
    xstar: &[Rat],
    zstar: &[Rat],
    r: &Rat,
) -> Result<HalfSpaceValue> {
    if g1.space() != g2.space() {
        return Err(Error::cone("conj_inf_convolve: ordering cones differ"));
    }
    let phi1_conj = g1.scalarize(zstar)?.conjugate();
    let phi2_conj = g2.scalarize(zstar)?.conjugate();
    let id = LinMap::identity(g1.n());
    let (v, _) = crate::scalar_fn::conv_conjugates_at(&phi1_conj, &phi2_conj, &id, xstar)?;
    let level = idif(&v, &XReal::Finite(r.clone()));
    HalfSpaceValue::new(g1.space().clone(), zstar.to_vec(), level)
}

// ---------------------------------------------------------------------------
// set-valued chain rule
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ChainRuleEntry {
    #[serde(with = "crate::xreal::serde_rats")]
    pub xstar: Vec<Rat>,
    #[serde(with = "crate::xreal::serde_rats")]
    pub zstar: Vec<Rat>,
    pub r: XReal,
    /// `(g □ Sf)*` against its attainment form and the real-split infimum.
    pub square_lhs: HalfSpaceValue,
    pub square_attain: HalfSpaceValue,
    pub square_rsplit: HalfSpaceValue,
    pub square_lhs_eq_attain: bool,
    pub square_attain_eq_rsplit: bool,
    /// `(g + fT)*` against the completion-decorated infimum over `y*` and the
    /// Minkowski convolution `(g* □ T*f*)`.
    pub sum_lhs: HalfSpaceValue,
    pub sum_mid: HalfSpaceValue,
    pub sum_rhs: HalfSpaceValue,
    /// `lhs ⊇ mid ⊇ rhs`, unconditional.
    pub chain_ok: bool,
    pub qualified: bool,
    /// `lhs = mid = rhs`; asserted when qualified.
    pub sum_equalities_hold: bool,
    #[serde(with = "crate::xreal::serde_rats_opt")]
    pub witness: Option<Vec<Rat>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainRuleReport {
    pub entries: Vec<ChainRuleEntry>,
}

/// Evaluate the set-valued chain rule at the given dual triples.
/// `g : X → P^△(Z)`, `f : Y → P^△(Z)`, `T : X → Y`, `S : Y → X`.
pub fn set_chain_rule(
    g: &SetFn,
    f: &SetFn,
    t: &LinMap,
    s: &LinMap,
    triples: &[(Vec<Rat>, Vec<Rat>, XReal)],
) -> Result<ChainRuleReport> {
    if g.space() != f.space() {
        return Err(Error::cone("set_chain_rule: ordering cones differ"));
    }
    if t.cols() != g.n() || t.rows() != f.n() || s.cols() != f.n() || s.rows() != g.n() {
        return Err(Error::dim("set_chain_rule: operator arity mismatch"));
    }
    let t_adj = t.adjoint();
    let s_adj = s.adjoint();
    let sf = f.pushforward(s)?;
    let square = g.inf_convolve(&sf)?;
    let ft = f.compose(t)?;
    let sum = g.add(&ft)?;
    let dom_g_empty = g.epi().is_empty();
    let dom_f_empty = f.epi().is_empty();

    let mut entries = Vec::new();
    for (xstar, zstar, r) in triples {
        let phi_g = g.scalarize(zstar)?;
        let phi_f = f.scalarize(zstar)?;
        let phi_g_conj = phi_g.conjugate();
        let phi_f_conj = phi_f.conjugate();

        // (a) the convolution rule
        let square_lhs = square.conjugate(xstar, zstar, r)?;
        let sstar_x = s_adj.apply(xstar)?;
        let rho = phi_f_conj.eval(&sstar_x);
        let g_part = g.conjugate(xstar, zstar, &idif(r, &rho))?;
        let f_part = f.conjugate(&sstar_x, zstar, &rho)?;
        let square_attain = hsv_add(&g_part, &f_part)?;
        let split_level = match r {
            XReal::Finite(rr) => idif(
                &inf_add(&phi_g_conj.eval(xstar), &rho),
                &XReal::Finite(rr.clone()),
            ),
            // the real-split infimum is defined for finite r; the completions
            // extend it monotonically
            XReal::PosInf => XReal::NegInf,
            XReal::NegInf => XReal::PosInf,
        };
        let square_rsplit = HalfSpaceValue::new(g.space().clone(), zstar.to_vec(), split_level)?;

        // (b)/(c) the sum rule
        let sum_lhs = sum.conjugate(xstar, zstar, r)?;
        let (conv_value, witness) =
            crate::scalar_fn::conv_conjugates_at(&phi_g_conj, &phi_f_conj, &t_adj, xstar)?;
        let rhs_level = idif(&conv_value, r);
        let sum_rhs = HalfSpaceValue::new(g.space().clone(), zstar.to_vec(), rhs_level.clone())?;
        let f_scal_improper = phi_f.takes_neg_inf();
        let mid_level = if dom_f_empty {
            XReal::NegInf
        } else if f_scal_improper {
            if dom_g_empty {
                XReal::NegInf
            } else {
                XReal::PosInf
            }
        } else {
            rhs_level
        };
        let sum_mid = HalfSpaceValue::new(g.space().clone(), zstar.to_vec(), mid_level)?;

        // z*-level qualification for the strong form
        let phi_ft = phi_f.compose_linear(t)?;
        let degenerate = phi_ft.takes_neg_inf()
            && !phi_ft.dom().intersect(&phi_g.dom())?.is_empty();
        let proper_feasible = phi_g.is_proper()
            && phi_f.is_proper()
            && !phi_g.dom().linear_image(t)?.intersect(&phi_f.dom())?.is_empty();
        let qualified = degenerate || proper_feasible;

        let chain_ok = sum_lhs.contains(&sum_mid) && sum_mid.contains(&sum_rhs);
        let sum_equalities_hold = sum_lhs.equal(&sum_mid) && sum_mid.equal(&sum_rhs);

        entries.push(ChainRuleEntry {
            xstar: xstar.clone(),
            zstar: zstar.clone(),
            r: r.clone(),
            square_lhs_eq_attain: square_lhs.equal(&square_attain),
            square_attain_eq_rsplit: square_attain.equal(&square_rsplit),
            square_lhs,
            square_attain,
            square_rsplit,
            sum_lhs,
            sum_mid,
            sum_rhs,
            chain_ok,
            qualified,
            sum_equalities_hold,
            witness,
        });
    }
    Ok(ChainRuleReport { entries })
}

// ---------------------------------------------------------------------------
// sandwich theorem
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    #[serde(with = "crate::xreal::serde_rats")]
    pub ystar: Vec<Rat>,
    #[serde(with = "crate::xreal::serde_rats")]
    pub z0: Vec<Rat>,
    /// `g(x) ⊆ S_(T*y*, z*)(x) + {-z₀} ⊆ H(z*) ⊖ fT(x)` for all x.
    pub inclusions_verified: bool,
    /// `z₀ ∈ g*(T*y*, z*) ∩ (H(z*) ⊖ f*(-y*, z*))`.
    pub membership_verified: bool,
    pub qualified: bool,
    pub touching: Option<TouchingReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TouchingReport {
    #[serde(with = "crate::xreal::serde_rats")]
    pub x0: Vec<Rat>,
    /// `g*(T*y*, z*) = {z₀} + H(z*)` and `f*(-y*, z*) = {-z₀} + H(z*)`.
    pub conjugate_equalities_hold: bool,
}

/// Sandwich theorem along a fixed direction: from the premise
/// `g(x) ⊆ H(z*) ⊖ fT(x)` for all `x`, produce `(y*, z₀)` realizing the
/// separating conaffine function, verify both inclusions and the conjugate
/// memberships exactly.
pub fn sandwich(g: &SetFn, f: &SetFn, t: &LinMap, zstar: &[Rat]) -> Result<SandwichReport> {
    if g.space() != f.space() {
        return Err(Error::cone("sandwich: ordering cones differ"));
    }
    if t.cols() != g.n() || t.rows() != f.n() {
        return Err(Error::dim("sandwich: operator arity mismatch"));
    }
    let phi_g = g.scalarize(zstar)?;
    let phi_ft = f.scalarize(zstar)?.compose_linear(t)?;

    // premise: 0 ≤ (φ_g ⊕ φ_fT)(x) for all x
    let h = phi_g.pointwise_inf_add(&phi_ft)?;
    let n = g.n();
    let mut sys = Vec::new();
    for (a, b) in h.epi().hrep().rows.iter() {
        sys.push(Constraint::ge(a.clone(), b.clone()));
    }
    let mut obj = zeros(n + 1);
    obj[n] = -Rat::one();
    let premise_min = match lp::maximize(&obj, &sys) {
        LpOutcome::Infeasible => XReal::PosInf,
        LpOutcome::Unbounded { point, ray } => {
            // push the feasible point along the ray until the value is negative
            let mut p = point;
            if !ray[n].is_negative() {
                // value coordinate does not decrease along the ray; the
                // epigraph itself is a slab, any point has value -∞
            } else {
                let target = -Rat::one();
                let step = (&target - &p[n]) / &ray[n];
                for i in 0..=n {
                    p[i] = &p[i] + &step * &ray[i];
                }
            }
            return Err(premise_violation(g, zstar, &p[..n], &phi_ft));
        }
        LpOutcome::Optimal { point, value } => {
            let v = -value;
            if v.is_negative() {
                return Err(premise_violation(g, zstar, &point[..n], &phi_ft));
            }
            XReal::Finite(v)
        }
    };

    let phi_f = f.scalarize(zstar)?;
    let qualified = phi_g.is_proper()
        && phi_f.is_proper()
        && !phi_g.dom().linear_image(t)?.intersect(&phi_f.dom())?.is_empty();

    // dual pair: s₀ = inf over y* of φ*_g(T*y*) + φ*_f(-y*), attained
    let (s0, witness) = dual_pair_value(&phi_g.conjugate(), &phi_f.conjugate(), t)?;
    let ystar = witness.ok_or_else(|| {
        Error::PremiseViolated("sandwich: dual problem has no finite witness".to_string())
    })?;
    if let XReal::Finite(v) = &s0 {
        debug_assert!(!v.is_positive(), "weak duality from the premise");
    }

    // choose z₀ with z*·z₀ = φ*_f(-y*)
    let t_adj = t.adjoint();
    let tystar = t_adj.apply(&ystar)?;
    let c = f
        .scalarize(zstar)?
        .conjugate()
        .eval(&neg_vec(&ystar));
    let znorm: Rat = zstar.iter().map(|z| z * z).sum();
    let z0: Vec<Rat> = match (&c, znorm.is_zero()) {
        (XReal::Finite(cv), false) => zstar.iter().map(|z| z * cv / &znorm).collect(),
        _ => zeros(g.space().m()),
    };

    // the middle conaffine level: a(x) = (T*y*)·x + z*·z₀
    let zc = dot(zstar, &z0);
    let affine_mid = ScalarFn::make_affine(&tystar, &-zc.clone());
    let incl1 = affine_mid.le(&phi_g);
    let affine_neg = ScalarFn::make_affine(&neg_vec(&tystar), &zc);
    let incl2 = affine_neg.le(&phi_ft);
    let inclusions_verified = incl1 && incl2;

    // z₀ ∈ g*(T*y*, z*) and z₀ ∈ H(z*) ⊖ f*(-y*, z*)
    let g_conj_at = g.conjugate(&tystar, zstar, &XReal::zero())?;
    let f_conj_at = f.conjugate(&neg_vec(&ystar), zstar, &XReal::zero())?;
    let membership_verified = g_conj_at.materialize().contains_point(&z0)
        && h_residual(&f_conj_at)?.materialize().contains_point(&z0);

    // touching: the scalar gap closes at some x₀
    let touching = if premise_min == XReal::zero() {
        let argmin = {
            let mut obj = zeros(n + 1);
            obj[n] = -Rat::one();
            match lp::maximize(&obj, &sys) {
                LpOutcome::Optimal { point, .. } => Some(point[..n].to_vec()),
                _ => None,
            }
        };
        argmin.map(|x0| {
            let h0 = HalfSpaceValue::new(g.space().clone(), zstar.to_vec(), XReal::zero())
                .expect("H(z*) is a halfspace value");
            let left = g_conj_at
                .materialize()
                .equal(&Polyhedron::singleton(z0.clone()).minkowski_sum(&h0.materialize()).unwrap());
            let right = f_conj_at.materialize().equal(
                &Polyhedron::singleton(neg_vec(&z0))
                    .minkowski_sum(&h0.materialize())
                    .unwrap(),
            );
            TouchingReport {
                x0,
                conjugate_equalities_hold: left && right,
            }
        })
    } else {
        None
    };

    Ok(SandwichReport {
        ystar,
        z0,
        inclusions_verified,
        membership_verified,
        qualified,
        touching,
    })
}

fn premise_violation(g: &SetFn, zstar: &[Rat], x: &[Rat], phi_ft: &ScalarFn) -> Error {
    // recover a point z ∈ g(x) outside H(z*) ⊖ fT(x)
    let slice = g.eval_slice(x);
    let z = slice
        .body()
        .argmax(&zstar.to_vec())
        .map(|(p, _)| p)
        .unwrap_or_else(|| zeros(zstar.len()));
    let bound = idif(&XReal::zero(), &phi_ft.eval(x));
    Error::PremiseViolated(format!(
        "sandwich premise fails at x = [{}]: z = [{}] in g(x) but -z*·z = {} < required {}",
        x.iter()
            .map(crate::xreal::rat_to_string)
            .collect::<Vec<_>>()
            .join(", "),
        z.iter()
            .map(crate::xreal::rat_to_string)
            .collect::<Vec<_>>()
            .join(", "),
        idif(&XReal::zero(), &XReal::Finite(dot(zstar, &z)).negate()),
        bound,
    ))
}

// ---------------------------------------------------------------------------
// Fenchel–Rockafellar duality
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct DualityEntry {
    #[serde(with = "crate::xreal::serde_rats")]
    pub zstar: Vec<Rat>,
    pub dual_value: HalfSpaceValue,
    /// `D(z*) ⊇ P`, unconditional.
    pub weak_ok: bool,
    pub qualified: bool,
    /// `cl(P + H(z*)) = D(z*)`; `None` for `z* = 0` (nothing to check).
    pub strong_ok: Option<bool>,
    #[serde(with = "crate::xreal::serde_rats_opt")]
    pub witness: Option<Vec<Rat>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub primal: UpperSet,
    pub entries: Vec<DualityEntry>,
    /// `P = ⋂ D(z*)` over the direction set; `None` when not asserted
    /// (improper data).
    pub intersection_equals_primal: Option<bool>,
}

/// Facet directions of an upper set: `z* = -a` for each constraint normal,
/// primitive, zero dropped.
pub fn facet_directions(body: &Polyhedron) -> Vec<Vec<Rat>> {
    let mut dirs: Vec<Vec<Rat>> = body
        .hrep()
        .rows
        .iter()
        .map(|(a, _)| primitive(&neg_vec(a)))
        .filter(|z| !is_zero_vec(z))
        .collect();
    dirs.sort_by(|a, b| crate::linalg::lex_cmp(a, b));
    dirs.dedup();
    dirs
}

/// Fenchel–Rockafellar duality: `P = cl co ⋃ₓ (g(x) + f(Tx))` against the
/// per-direction dual values
/// `D(z*) = ⋂_{y*} H(z*) ⊖ (g*(T*y*, z*) + f*(-y*, z*))`, each computed as a
/// single halfspace from the scalar dual optimum. Directions `None` means
/// "auto": the facet normals of `P` plus the extreme rays of `C⁻`.
pub fn fenchel_rockafellar(
    g: &SetFn,
    f: &SetFn,
    t: &LinMap,
    directions: Option<&[Vec<Rat>]>,
) -> Result<DualityReport> {
    if g.space() != f.space() {
        return Err(Error::cone("fenchel_rockafellar: ordering cones differ"));
    }
    if t.cols() != g.n() || t.rows() != f.n() {
        return Err(Error::dim("fenchel_rockafellar: operator arity mismatch"));
    }
    let space = g.space().clone();
    let n = g.n();
    let m = space.m();

    let ft = f.compose(t)?;
    let sum = g.add(&ft)?;
    let primal_body = sum.epi().project(&(n..n + m).collect::<Vec<_>>())?;
    let primal = UpperSet::new(space.clone(), primal_body.clone())?;

    let dirs: Vec<Vec<Rat>> = match directions {
        Some(ds) => ds.to_vec(),
        None => {
            let mut ds = facet_directions(&primal_body);
            ds.extend(space.dual_rays().iter().cloned());
            ds.sort_by(|a, b| crate::linalg::lex_cmp(a, b));
            ds.dedup();
            ds
        }
    };

    let g_proper = g.properness()?.proper;
    let f_proper = f.properness()?.proper;

    let mut entries = Vec::new();
    let mut intersection: Option<Polyhedron> = None;
    for zstar in &dirs {
        if is_zero_vec(zstar) {
            // H(0) = Z and D(0) = Z: nothing to check
            let dual_value =
                HalfSpaceValue::new(space.clone(), zstar.clone(), XReal::NegInf)?;
            entries.push(DualityEntry {
                zstar: zstar.clone(),
                weak_ok: true,
                qualified: false,
                strong_ok: None,
                witness: None,
                dual_value,
            });
            continue;
        }
        let phi_g = g.scalarize(zstar)?;
        let phi_f = f.scalarize(zstar)?;
        let (value, witness) = dual_pair_value(&phi_g.conjugate(), &phi_f.conjugate(), t)?;
        let d_level = idif(&XReal::zero(), &value);
        let dual_value = HalfSpaceValue::new(space.clone(), zstar.clone(), d_level)?;
        let d_poly = dual_value.materialize();

        let weak_ok = d_poly.contains_poly(&primal_body);

        let degenerate = {
            let phi_ft = phi_f.compose_linear(t)?;
            phi_ft.takes_neg_inf() && !phi_ft.dom().intersect(&phi_g.dom())?.is_empty()
        };
        let proper_feasible = phi_g.is_proper()
            && phi_f.is_proper()
            && !phi_g.dom().linear_image(t)?.intersect(&phi_f.dom())?.is_empty();
        let qualified = degenerate || proper_feasible;

        // cl(P + H(z*)) = H_{inf_add(0, -σ(z*|P))}(z*)
        let closure_level = inf_add(&XReal::zero(), &primal_body.support(zstar).negate());
        let closure = HalfSpaceValue::new(space.clone(), zstar.clone(), closure_level)?;
        let strong_ok = Some(closure.materialize().equal(&d_poly));

        intersection = Some(match intersection {
            None => d_poly,
            Some(acc) => acc.intersect(&d_poly)?,
        });
        entries.push(DualityEntry {
            zstar: zstar.clone(),
            dual_value,
            weak_ok,
            qualified,
            strong_ok,
            witness,
        });
    }

    let intersection_equals_primal = if g_proper && f_proper {
        intersection.map(|acc| acc.equal(&primal_body))
    } else {
        None
    };

    Ok(DualityReport {
        primal,
        entries,
        intersection_equals_primal,
    })
}

// ---------------------------------------------------------------------------
// fundamental duality formula
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct FundamentalEntry {
    #[serde(with = "crate::xreal::serde_rats")]
    pub zstar: Vec<Rat>,
    pub zstar_proper: bool,
    /// When improper, only the unconditional inclusion is reported.
    pub weak_only: bool,
    /// `cl ⋃ₓ (h(x,0) + H(z*))`.
    pub lhs: HalfSpaceValue,
    /// `⋂_{y*} H(z*) ⊖ h*(0, y*, z*)`.
    pub rhs: HalfSpaceValue,
    pub equal: bool,
    #[serde(with = "crate::xreal::serde_rats_opt")]
    pub witness: Option<Vec<Rat>>,
    pub attainment: Option<FundamentalAttainment>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FundamentalAttainment {
    #[serde(with = "crate::xreal::serde_rats")]
    pub xbar: Vec<Rat>,
    /// `cl(h(x̄,0) + H(z*)) = lhs` decided on slices.
    pub attains_direct: bool,
    /// The subdifferential inclusion
    /// `h*(0, ȳ*, z*) ⊇ S_((0,ȳ*),z*)(x̄,0) ⊖ h(x̄,0)`.
    pub subdiff_inclusion: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FundamentalDualityReport {
    pub entries: Vec<FundamentalEntry>,
    /// `cl co ⋃ₓ h(x, 0)`.
    pub projection: UpperSet,
    /// Part (b): the facet-direction intersection reproduces the projection;
    /// `None` when some facet direction is improper.
    pub intersection_equals_projection: Option<bool>,
}

/// Fundamental duality formula for `h : X × Y → P^△(Z)`; the last `ny`
/// domain coordinates are the perturbation block.
pub fn fundamental_duality(
    h: &SetFn,
    ny: usize,
    directions: Option<&[Vec<Rat>]>,
    xbar: Option<&[Rat]>,
) -> Result<FundamentalDualityReport> {
    let n = h.n();
    if ny > n {
        return Err(Error::dim("perturbation block exceeds the domain"));
    }
    let nx = n - ny;
    let space = h.space().clone();
    let m = space.m();

    // precondition: (x₀, 0) ∈ dom h for some x₀
    let dom = h.dom();
    let mut slice_rows = dom.hrep().rows.clone();
    for j in 0..ny {
        let mut a = zeros(n);
        a[nx + j] = Rat::one();
        slice_rows.push((a.clone(), Rat::zero()));
        slice_rows.push((neg_vec(&a), Rat::zero()));
    }
    let dom_slice = Polyhedron::from_hrep(n, slice_rows);
    if dom_slice.is_empty() {
        return Err(Error::PremiseViolated(
            "fundamental_duality: no x with (x, 0) in dom h".to_string(),
        ));
    }

    // cl co ⋃ₓ h(x,0): restrict the epigraph to y = 0, project out y and keep z
    let mut restricted_rows = h.epi().hrep().rows.clone();
    for j in 0..ny {
        let mut a = zeros(n + m);
        a[nx + j] = Rat::one();
        restricted_rows.push((a.clone(), Rat::zero()));
        restricted_rows.push((neg_vec(&a), Rat::zero()));
    }
    let restricted = Polyhedron::from_hrep(n + m, restricted_rows);
    let projection_body = restricted.project(&(n..n + m).collect::<Vec<_>>())?;
    let projection = UpperSet::new(space.clone(), projection_body.clone())?;

    let dirs: Vec<Vec<Rat>> = match directions {
        Some(ds) => ds.to_vec(),
        None => {
            let mut ds = facet_directions(&projection_body);
            ds.extend(space.dual_rays().iter().cloned());
            ds.sort_by(|a, b| crate::linalg::lex_cmp(a, b));
            ds.dedup();
            ds
        }
    };

    let mut entries = Vec::new();
    let mut intersection: Option<Polyhedron> = None;
    let mut all_facets_proper = true;
    for zstar in &dirs {
        if is_zero_vec(zstar) {
            continue;
        }
        let phi = h.scalarize(zstar)?;
        let zstar_proper = phi.is_proper();
        let rep = crate::scalar_fn::fundamental_duality_scalar(&phi, ny, xbar)?;
        let lhs = HalfSpaceValue::new(space.clone(), zstar.clone(), rep.value.clone())?;
        let rhs = HalfSpaceValue::new(space.clone(), zstar.clone(), rep.dual_value.clone())?;
        let equal = lhs.equal(&rhs);
        let weak_only = !zstar_proper;
        if !zstar_proper {
            all_facets_proper = false;
        }

        let attainment = match (xbar, &rep.attainment) {
            (Some(xb), Some(att)) => {
                let attains_direct = att.value_at_xbar == rep.value;
                let subdiff_inclusion = match &rep.witness {
                    Some(ystar) => {
                        let mut dual_point = zeros(nx);
                        dual_point.extend(ystar.clone());
                        let conj_value = h.conjugate(&dual_point, zstar, &XReal::zero())?;
                        // S_((0,ȳ*),z*)(x̄, 0) = H₀(z*); residuate by the slice
                        let mut point = xb.to_vec();
                        point.extend(zeros(ny));
                        let slice = h.eval_slice(&point);
                        let h0 =
                            HalfSpaceValue::new(space.clone(), zstar.clone(), XReal::zero())?;
                        let rhs_set = h0.materialize().star_difference(slice.body())?;
                        conj_value.materialize().contains_poly(&rhs_set)
                    }
                    None => false,
                };
                Some(FundamentalAttainment {
                    xbar: xb.to_vec(),
                    attains_direct,
                    subdiff_inclusion,
                })
            }
            _ => None,
        };

        intersection = Some(match intersection {
            None => rhs.materialize(),
            Some(acc) => acc.intersect(&rhs.materialize())?,
        });
        entries.push(FundamentalEntry {
            zstar: zstar.clone(),
            zstar_proper,
            weak_only,
            lhs,
            rhs,
            equal,
            witness: rep.witness.clone(),
            attainment,
        });
    }

    let intersection_equals_projection = if all_facets_proper {
        intersection.map(|acc| acc.equal(&projection_body))
    } else {
        None
    };

    Ok(FundamentalDualityReport {
        entries,
        projection,
        intersection_equals_projection,
    })
}

// ---------------------------------------------------------------------------
// literal continuity hypothesis
// ---------------------------------------------------------------------------

/// The literal neighborhood qualification: there is `z₀ ∈ g(x₀)` such that
/// `{x : z₀ ∈ g(x)}` is a neighborhood of `x₀` (checked as strict feasibility
/// of every facet of that region at `x₀`).
pub fn neighborhood_qualification(g: &SetFn, x0: &[Rat], z0: &[Rat]) -> bool {
    let mut point = x0.to_vec();
    point.extend(z0.to_vec());
    if !g.epi().contains_point(&point) {
        return false;
    }
    let n = g.n();
    for (a, b) in &g.epi().hrep().rows {
        let (ax, az) = a.split_at(n);
        let residue = b - dot(az, z0);
        if is_zero_vec(ax) {
            if !(dot(ax, x0) >= residue) {
                return false;
            }
        } else if !(dot(ax, x0) > residue) {
            return false;
        }
    }
    true
}
