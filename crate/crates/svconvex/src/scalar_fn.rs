//! Polyhedral extended-real-valued convex functions, represented by their
//! epigraphs in `Q^{n+1}`.
//!
//! A `ScalarFn` is always closed: its epigraph is a canonical polyhedron whose
//! recession cone contains the upward direction. Improper functions are
//! first-class: a function taking `-∞` is a vertical slab (all value rows
//! vanish), the constant `+∞` has an empty epigraph.

use num::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, neg_vec, zeros, LinMap};
use crate::lp::{self, Constraint, LpOutcome};
use crate::polyhedra::Polyhedron;
use crate::xreal::{idif, inf_add, sup_add, Rat, XReal};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarFn {
    n: usize,
    epi: Polyhedron,
}

impl ScalarFn {
    /// Wrap an epigraph polyhedron; every row must have a nonnegative value
    /// coefficient (the upward ray is a recession direction).
    pub fn from_epi(n: usize, epi: Polyhedron) -> Result<ScalarFn> {
        if epi.dim() != n + 1 {
            return Err(Error::dim(format!(
                "epigraph of an n={n} function lives in Q^{}",
                n + 1
            )));
        }
        if epi.hrep().rows.iter().any(|(a, _)| a[n].is_negative()) {
            return Err(Error::dim(
                "not an epigraph: a row bounds the value from above".to_string(),
            ));
        }
        Ok(ScalarFn { n, epi })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epi(&self) -> &Polyhedron {
        &self.epi
    }

    /// Affine function `x ↦ x*·x - r`.
    pub fn make_affine(xstar: &[Rat], r: &Rat) -> ScalarFn {
        let n = xstar.len();
        let mut a = neg_vec(xstar);
        a.push(Rat::one());
        ScalarFn {
            n,
            epi: Polyhedron::from_hrep(n + 1, vec![(a, -r.clone())]),
        }
    }

    /// Closed improper inf-extension of the affine function: `-∞` where
    /// `x*·x ≤ r`, `+∞` elsewhere. The epigraph is the vertical slab over the
    /// halfspace.
    pub fn make_improper_ext(xstar: &[Rat], r: &Rat) -> ScalarFn {
        let n = xstar.len();
        let mut a = neg_vec(xstar);
        a.push(Rat::zero());
        ScalarFn {
            n,
            epi: Polyhedron::from_hrep(n + 1, vec![(a, -r.clone())]),
        }
    }

    /// Indicator function of a polyhedron: 0 on it, `+∞` outside.
    pub fn make_indicator(p: &Polyhedron) -> ScalarFn {
        let n = p.dim();
        let mut rows: Vec<(Vec<Rat>, Rat)> = p
            .hrep()
            .rows
            .iter()
            .map(|(a, b)| {
                let mut row = a.clone();
                row.push(Rat::zero());
                (row, b.clone())
            })
            .collect();
        let mut up = zeros(n + 1);
        up[n] = Rat::one();
        rows.push((up, Rat::zero()));
        ScalarFn {
            n,
            epi: Polyhedron::from_hrep(n + 1, rows),
        }
    }

    /// Constant function.
    pub fn make_const(n: usize, value: &XReal) -> ScalarFn {
        match value {
            XReal::PosInf => ScalarFn {
                n,
                epi: Polyhedron::empty(n + 1),
            },
            XReal::NegInf => ScalarFn {
                n,
                epi: Polyhedron::whole_space(n + 1),
            },
            XReal::Finite(c) => ScalarFn::make_affine(&zeros(n), &-c.clone()),
        }
    }

    /// Pointwise maximum of affine pieces `x ↦ x*·x - r`.
    pub fn from_max_affine(n: usize, pieces: &[(Vec<Rat>, Rat)]) -> ScalarFn {
        let rows = pieces
            .iter()
            .map(|(xstar, r)| {
                let mut a = neg_vec(xstar);
                a.push(Rat::one());
                (a, -r.clone())
            })
            .collect();
        ScalarFn {
            n,
            epi: Polyhedron::from_hrep(n + 1, rows),
        }
    }

    /// `min { r : (x, r) ∈ epi }`, with `+∞` on an empty slice and `-∞` on a
    /// slice unbounded below. Direct row evaluation; no LP needed.
    pub fn eval(&self, x: &[Rat]) -> XReal {
        debug_assert_eq!(x.len(), self.n);
        let mut best: Option<Rat> = None;
        for (a, b) in &self.epi.hrep().rows {
            let (ax, c) = a.split_at(self.n);
            let residue = b - dot(ax, x);
            if c[0].is_zero() {
                if residue.is_positive() {
                    return XReal::PosInf;
                }
            } else {
                let bound = residue / &c[0];
                best = Some(match best {
                    None => bound,
                    Some(cur) => {
                        if bound > cur {
                            bound
                        } else {
                            cur
                        }
                    }
                });
            }
        }
        match best {
            Some(v) => XReal::Finite(v),
            None => XReal::NegInf,
        }
    }

    /// Effective domain, as the projection of the epigraph.
    pub fn dom(&self) -> Polyhedron {
        self.epi
            .project(&(0..self.n).collect::<Vec<_>>())
            .expect("projection indices in range")
    }

    /// Does the function take the value `-∞` anywhere? For closed polyhedral
    /// epigraphs this happens exactly when every row is a pure domain row.
    pub fn takes_neg_inf(&self) -> bool {
        !self.epi.is_empty()
            && self
                .epi
                .hrep()
                .rows
                .iter()
                .all(|(a, _)| a[self.n].is_zero())
    }

    pub fn is_const_pos_inf(&self) -> bool {
        self.epi.is_empty()
    }

    /// Proper: finite somewhere, `-∞` nowhere.
    pub fn is_proper(&self) -> bool {
        !self.epi.is_empty() && !self.takes_neg_inf()
    }

    /// `g ≤ f` pointwise (epigraph containment).
    pub fn le(&self, other: &ScalarFn) -> bool {
        self.epi.contains_poly(&other.epi)
    }

    pub fn equal(&self, other: &ScalarFn) -> bool {
        self.n == other.n && self.epi.equal(&other.epi)
    }

    /// Legendre–Fenchel conjugate, built from the generators of the epigraph:
    /// `g*(x*) = max over vertices (v, ρ) of x*·v - ρ`, `+∞` as soon as some
    /// epigraph ray `(d, σ)` has `x*·d > σ`.
    pub fn conjugate(&self) -> ScalarFn {
        let n = self.n;
        if self.epi.is_empty() {
            // g ≡ +∞ ⇒ g* ≡ -∞
            return ScalarFn::make_const(n, &XReal::NegInf);
        }
        if self.takes_neg_inf() {
            // a -∞ value anywhere forces g* ≡ +∞
            return ScalarFn::make_const(n, &XReal::PosInf);
        }
        let vr = self.epi.vrep();
        let mut rows = Vec::new();
        for g in &vr.vertices {
            let (v, rho) = g.split_at(n);
            let mut a = neg_vec(v);
            a.push(Rat::one());
            rows.push((a, -&rho[0]));
        }
        for g in &vr.rays {
            let (d, sigma) = g.split_at(n);
            let mut a = neg_vec(d);
            a.push(Rat::zero());
            rows.push((a, -&sigma[0]));
        }
        ScalarFn {
            n,
            epi: Polyhedron::from_hrep(n + 1, rows),
        }
    }

    pub fn biconjugate(&self) -> ScalarFn {
        self.conjugate().conjugate()
    }

    /// Closed inf-convolution: the epigraph is the Minkowski sum of the
    /// epigraphs. Attainment is a separate question; see
    /// [`ScalarFn::convolution_attains`].
    pub fn inf_convolve(&self, other: &ScalarFn) -> Result<ScalarFn> {
        if self.n != other.n {
            return Err(Error::dim("inf_convolve: domain dimensions differ"));
        }
        Ok(ScalarFn {
            n: self.n,
            epi: self.epi.minkowski_sum(&other.epi)?,
        })
    }

    /// Is the inf in `(self □ other)(x)` attained? Decided by LP boundedness
    /// over the split variable; returns a minimizing split when it exists.
    pub fn convolution_attains(&self, other: &ScalarFn, x: &[Rat]) -> Result<Option<Vec<Rat>>> {
        if self.n != other.n {
            return Err(Error::dim("convolution_attains: dimensions differ"));
        }
        // minimize s1 + s2 over {(y, s1, s2) : (x - y, s1) ∈ epi self, (y, s2) ∈ epi other}
        let n = self.n;
        let nvars = n + 2;
        let mut sys = Vec::new();
        for (a, b) in &self.epi.hrep().rows {
            let (ax, c) = a.split_at(n);
            // a·(x-y) + c s1 ≥ b  →  -a·y + c s1 ≥ b - a·x
            let mut row = neg_vec(ax);
            row.push(c[0].clone());
            row.push(Rat::zero());
            sys.push(Constraint::ge(row, b - dot(ax, x)));
        }
        for (a, b) in &other.epi.hrep().rows {
            let (ax, c) = a.split_at(n);
            let mut row = ax.to_vec();
            row.push(Rat::zero());
            row.push(c[0].clone());
            sys.push(Constraint::ge(row, b.clone()));
        }
        let mut obj = zeros(nvars);
        obj[n] = -Rat::one();
        obj[n + 1] = -Rat::one();
        match lp::maximize(&obj, &sys) {
            LpOutcome::Optimal { point, .. } => Ok(Some(point[..n].to_vec())),
            _ => Ok(None),
        }
    }

    /// Composition with a linear map: `(fT)(x) = f(Tx)` via H-rep
    /// substitution.
    pub fn compose_linear(&self, t: &LinMap) -> Result<ScalarFn> {
        if t.rows() != self.n {
            return Err(Error::dim("compose_linear: map lands in the wrong space"));
        }
        let n = t.cols();
        let adj = t.adjoint();
        let rows = self
            .epi
            .hrep()
            .rows
            .iter()
            .map(|(a, b)| {
                let (ax, c) = a.split_at(self.n);
                let mut row = adj.apply(ax).expect("arity checked");
                row.push(c[0].clone());
                (row, b.clone())
            })
            .collect();
        Ok(ScalarFn {
            n,
            epi: Polyhedron::from_hrep(n + 1, rows),
        })
    }

    /// Pushforward `(Tg)(y) = inf { g(x) : Tx = y }` via epigraph projection.
    pub fn pushforward(t: &LinMap, g: &ScalarFn) -> Result<ScalarFn> {
        if t.cols() != g.n {
            return Err(Error::dim("pushforward: map acts on the wrong space"));
        }
        let m = t.rows();
        // lift (x, r) ↦ (Tx, r)
        let mut lifted = Vec::new();
        for row in &t.matrix {
            let mut r = row.clone();
            r.push(Rat::zero());
            lifted.push(r);
        }
        let mut last = zeros(g.n + 1);
        last[g.n] = Rat::one();
        lifted.push(last);
        let map = LinMap::new(lifted)?;
        let image = g.epi.linear_image(&map)?;
        // the polyhedral image is already an epigraph; re-adding the upward
        // ray keeps the invariant explicit
        let up = Polyhedron::from_generators(m + 1, &[zeros(m + 1)], &[{
            let mut u = zeros(m + 1);
            u[m] = Rat::one();
            u
        }]);
        Ok(ScalarFn {
            n: m,
            epi: image.minkowski_sum(&up)?,
        })
    }

    /// Pointwise inf-addition `h(x) = inf_add(g(x), f(x))`, built from the
    /// lifted sum `{(x, r₁ + r₂)}`; the lift realizes the `+∞`-dominance of
    /// the inf-addition automatically.
    pub fn pointwise_inf_add(&self, other: &ScalarFn) -> Result<ScalarFn> {
        if self.n != other.n {
            return Err(Error::dim("pointwise_inf_add: dimensions differ"));
        }
        let n = self.n;
        // coordinates (x, r1, r2), mapped through (x, r1, r2) ↦ (x, r1 + r2)
        let total = n + 2;
        let mut rows = Vec::new();
        for (a, b) in &self.epi.hrep().rows {
            let (ax, c) = a.split_at(n);
            let mut row = ax.to_vec();
            row.extend([c[0].clone(), Rat::zero()]);
            rows.push((row, b.clone()));
        }
        for (a, b) in &other.epi.hrep().rows {
            let (ax, c) = a.split_at(n);
            let mut row = ax.to_vec();
            row.extend([Rat::zero(), c[0].clone()]);
            rows.push((row, b.clone()));
        }
        let lifted = Polyhedron::from_hrep(total, rows);
        let mut matrix = Vec::new();
        for i in 0..n {
            let mut row = zeros(total);
            row[i] = Rat::one();
            matrix.push(row);
        }
        let mut sum_row = zeros(total);
        sum_row[n] = Rat::one();
        sum_row[n + 1] = Rat::one();
        matrix.push(sum_row);
        Ok(ScalarFn {
            n,
            epi: lifted.linear_image(&LinMap::new(matrix)?)?,
        })
    }

    /// Lattice infimum in the closed-convex image space: `cl co min(g, f)`,
    /// the hull of the epigraph union.
    pub fn lattice_inf(&self, other: &ScalarFn) -> Result<ScalarFn> {
        if self.n != other.n {
            return Err(Error::dim("lattice_inf: dimensions differ"));
        }
        Ok(ScalarFn {
            n: self.n,
            epi: self.epi.hull_union(&other.epi)?,
        })
    }
}

impl Serialize for ScalarFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ScalarFn", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("epi", &self.epi)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct ScalarFnJson {
    n: usize,
    epi: Polyhedron,
}

impl<'de> Deserialize<'de> for ScalarFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = ScalarFnJson::deserialize(d)?;
        ScalarFn::from_epi(json.n, json.epi).map_err(|e| D::Error::custom(e.to_string()))
    }
}

// ---------------------------------------------------------------------------
// scalar duality
// ---------------------------------------------------------------------------

/// Outcome of the scalar fundamental duality formula
/// `inf_x h(x, 0) = sup_{y*} 0 ⊖ h*(0, y*)` for `h` on a product space.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarDualityReport {
    pub value: XReal,
    pub dual_value: XReal,
    #[serde(with = "crate::xreal::serde_rats_opt")]
    pub witness: Option<Vec<Rat>>,
    /// True when the polyhedral qualification classifies the instance and the
    /// equality is asserted; false means "qualification not established".
    pub equality_asserted: bool,
    pub equal: bool,
    pub attainment: Option<AttainmentReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AttainmentReport {
    #[serde(with = "crate::xreal::serde_rats")]
    pub xbar: Vec<Rat>,
    pub value_at_xbar: XReal,
    pub attains: bool,
    pub subgradient_holds: bool,
}

/// Fundamental duality for `h : Q^{nx} × Q^{ny} → R ∪ {±∞}`; the last `ny`
/// coordinates form the perturbation block.
pub fn fundamental_duality_scalar(
    h: &ScalarFn,
    ny: usize,
    xbar: Option<&[Rat]>,
) -> Result<ScalarDualityReport> {
    let n = h.n();
    if ny > n {
        return Err(Error::dim("perturbation block exceeds the domain"));
    }
    let nx = n - ny;

    // primal: minimize r over {(x, r) : (x, 0, r) ∈ epi h}
    let mut sys = Vec::new();
    for (a, b) in h.epi().hrep().rows.iter() {
        let (ax, rest) = a.split_at(nx);
        let (_ay, c) = rest.split_at(ny);
        let mut row = ax.to_vec();
        row.push(c[0].clone());
        sys.push(Constraint::ge(row, b.clone()));
    }
    let mut obj = zeros(nx + 1);
    obj[nx] = -Rat::one();
    let value = match lp::maximize(&obj, &sys) {
        LpOutcome::Infeasible => XReal::PosInf,
        LpOutcome::Unbounded { .. } => XReal::NegInf,
        LpOutcome::Optimal { value, .. } => XReal::Finite(-value),
    };

    // dual: minimize s over {(y*, s) : (0, y*, s) ∈ epi h*}
    let conj = h.conjugate();
    let mut dsys = Vec::new();
    for (a, b) in conj.epi().hrep().rows.iter() {
        let (_axstar, rest) = a.split_at(nx);
        let row = rest.to_vec(); // (a_y*, c)
        dsys.push(Constraint::ge(row, b.clone()));
    }
    let mut dobj = zeros(ny + 1);
    dobj[ny] = -Rat::one();
    let (dual_value, witness) = match lp::maximize(&dobj, &dsys) {
        LpOutcome::Infeasible => (XReal::NegInf, None),
        LpOutcome::Unbounded { .. } => (XReal::PosInf, None),
        LpOutcome::Optimal { point, value } => (XReal::Finite(value), Some(point[..ny].to_vec())),
    };

    let slice_nonempty = value != XReal::PosInf;
    let equality_asserted = (h.is_proper() && slice_nonempty)
        || h.is_const_pos_inf()
        || (h.takes_neg_inf() && value == XReal::NegInf);
    let equal = value == dual_value;

    let attainment = xbar.map(|xb| {
        let mut point = xb.to_vec();
        point.extend(zeros(ny));
        let value_at_xbar = h.eval(&point);
        let attains = value_at_xbar == value;
        let subgradient_holds = match &witness {
            Some(ystar) => {
                let mut dual_point = zeros(nx);
                dual_point.extend(ystar.clone());
                let conj_at = conj.eval(&dual_point);
                conj_at == idif(&XReal::zero(), &value_at_xbar)
            }
            None => false,
        };
        AttainmentReport {
            xbar: xb.to_vec(),
            value_at_xbar,
            attains,
            subgradient_holds,
        }
    });

    Ok(ScalarDualityReport {
        value,
        dual_value,
        witness,
        equality_asserted,
        equal,
        attainment,
    })
}

// ---------------------------------------------------------------------------
// scalar chain rule
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ScalarChainEntry {
    #[serde(with = "crate::xreal::serde_rats")]
    pub xstar: Vec<Rat>,
    /// `(g □ Sf)*` at `x*`, and the two sums it is compared against.
    pub square_lhs: XReal,
    pub square_sup_sum: XReal,
    pub square_inf_sum: XReal,
    /// `(g ⊕ fT)*` at `x*` with the two dominating convolution values.
    pub sum_lhs: XReal,
    pub sum_mid: XReal,
    pub sum_rhs: XReal,
    #[serde(with = "crate::xreal::serde_rats_opt")]
    pub sum_witness: Option<Vec<Rat>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarChainReport {
    /// Either the improper shortcut or proper-with-feasible-composition holds.
    pub qualified: bool,
    pub improper_case: bool,
    pub entries: Vec<ScalarChainEntry>,
}

/// Evaluate the scalar chain-rule identities at sampled dual points:
/// conjugates of `g □ Sf` and `g ⊕ fT` against the sup-/inf-convolutions of
/// the conjugates, with a dual witness under the polyhedral qualification.
pub fn chain_conjugate_check(
    g: &ScalarFn,
    f: &ScalarFn,
    t: &LinMap,
    s: &LinMap,
    xstars: &[Vec<Rat>],
) -> Result<ScalarChainReport> {
    if t.cols() != g.n() || t.rows() != f.n() || s.rows() != g.n() || s.cols() != f.n() {
        return Err(Error::dim("chain_conjugate_check: operator arity mismatch"));
    }
    let g_conj = g.conjugate();
    let f_conj = f.conjugate();
    let t_adj = t.adjoint();
    let s_adj = s.adjoint();

    let square = g.inf_convolve(&ScalarFn::pushforward(s, f)?)?;
    let square_conj = square.conjugate();
    let sum = g.pointwise_inf_add(&f.compose_linear(t)?)?;
    let sum_conj = sum.conjugate();

    // T*f* as a function of u: pushforward of f* under T*.
    let t_push_fconj = ScalarFn::pushforward(&t_adj, &f_conj)?;

    let improper_case = g.is_const_pos_inf() || f.is_const_pos_inf();
    let f_comp = f.compose_linear(t)?;
    let fcomp_neg_inf_region_meets_dom_g = if f_comp.takes_neg_inf() {
        !f_comp.dom().intersect(&g.dom())?.is_empty()
    } else {
        false
    };
    let proper_feasible = g.is_proper()
        && f.is_proper()
        && !g.dom().linear_image(t)?.intersect(&f.dom())?.is_empty();
    let qualified = fcomp_neg_inf_region_meets_dom_g || proper_feasible;

    let mut entries = Vec::new();
    for xstar in xstars {
        if xstar.len() != g.n() {
            return Err(Error::dim("chain_conjugate_check: dual point arity"));
        }
        let square_lhs = square_conj.eval(xstar);
        let fs = f_conj.eval(&s_adj.apply(xstar)?);
        let square_sup_sum = sup_add(&g_conj.eval(xstar), &fs);
        let square_inf_sum = inf_add(&g_conj.eval(xstar), &fs);

        let sum_lhs = sum_conj.eval(xstar);
        let (sum_rhs, sum_witness) = conv_conjugates_at(&g_conj, &f_conj, &t_adj, xstar)?;
        let sum_mid = if g_conj.takes_neg_inf() || t_push_fconj.takes_neg_inf() {
            XReal::NegInf
        } else {
            sum_rhs.clone()
        };
        entries.push(ScalarChainEntry {
            xstar: xstar.clone(),
            square_lhs,
            square_sup_sum,
            square_inf_sum,
            sum_lhs,
            sum_mid,
            sum_rhs,
            sum_witness,
        });
    }
    Ok(ScalarChainReport {
        qualified,
        improper_case,
        entries,
    })
}

/// `(g* □ T*f*)(x*) = inf_{y*} g*(x* - T*y*) + f*(y*)` by exact LP, with the
/// minimizing `y*`.
pub fn conv_conjugates_at(
    g_conj: &ScalarFn,
    f_conj: &ScalarFn,
    t_adj: &LinMap,
    xstar: &[Rat],
) -> Result<(XReal, Option<Vec<Rat>>)> {
    let ny = f_conj.n();
    // variables (y*, s1, s2)
    let nvars = ny + 2;
    let mut sys = Vec::new();
    for (a, b) in g_conj.epi().hrep().rows.iter() {
        let (au, c) = a.split_at(g_conj.n());
        // a·(x* - T*y*) + c s1 ≥ b;  a·T*y* = (Tᵀᵀ… ) — apply the adjoint of T*
        let at = t_adj.adjoint().apply(au)?;
        let mut row = neg_vec(&at);
        row.push(c[0].clone());
        row.push(Rat::zero());
        sys.push(Constraint::ge(row, b - dot(au, xstar)));
    }
    for (a, b) in f_conj.epi().hrep().rows.iter() {
        let (ay, c) = a.split_at(ny);
        let mut row = ay.to_vec();
        row.push(Rat::zero());
        row.push(c[0].clone());
        sys.push(Constraint::ge(row, b.clone()));
    }
    let mut obj = zeros(nvars);
    obj[ny] = -Rat::one();
    obj[ny + 1] = -Rat::one();
    Ok(match lp::maximize(&obj, &sys) {
        LpOutcome::Infeasible => (XReal::PosInf, None),
        LpOutcome::Unbounded { .. } => (XReal::NegInf, None),
        LpOutcome::Optimal { point, value } => (XReal::Finite(-value), Some(point[..ny].to_vec())),
    })
}
