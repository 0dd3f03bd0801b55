//! The set-valued layer: ordered image space, upper sets `A = A + C`,
//! epigraphical-type set-valued functions, scalarization/setification,
//! conaffine minorants, and set-valued conjugation.
//!
//! Everything here is polyhedral and closed convex: the image lattice in play
//! is the family of closed convex upper sets ordered by `⊇`, with `∅` greatest
//! and the whole space least. Scalarizations tie every construction back to
//! the scalar layer, which is where all values are actually computed.

use num::Signed;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, neg_vec, primitive, zeros, LinMap};
use crate::polyhedra::{Cone, Polyhedron};
use crate::scalar_fn::ScalarFn;
use crate::xreal::{idif, parse_rat, rat_to_string, Rat, XReal};

/// Image space `Q^m` ordered by a polyhedral cone `C` with `{0} ⊊ C` and
/// `{0} ⊊ C⁻`. The extreme rays of the polar are the canonical scalarization
/// directions.
#[derive(Clone, Debug)]
pub struct OrderedSpace {
    m: usize,
    cone: Cone,
    polar: Cone,
    dual_rays: Vec<Vec<Rat>>,
}

impl PartialEq for OrderedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.cone.as_polyhedron() == other.cone.as_polyhedron()
    }
}

impl Eq for OrderedSpace {}

impl OrderedSpace {
    pub fn new(m: usize, cone_rays: &[Vec<Rat>]) -> Result<OrderedSpace> {
        let cone = Cone::from_rays(m, cone_rays)?;
        if cone.is_trivial() {
            return Err(Error::cone("ordering cone must strictly contain {0}"));
        }
        let polar = cone.polar();
        if polar.is_trivial() {
            return Err(Error::cone(
                "negative dual cone must strictly contain {0} (C may not be dense)",
            ));
        }
        let dual_rays = polar.generators().to_vec();
        Ok(OrderedSpace {
            m,
            cone,
            polar,
            dual_rays,
        })
    }

    /// `Q^m` with the componentwise order.
    pub fn orthant(m: usize) -> OrderedSpace {
        let rays: Vec<Vec<Rat>> = (0..m).map(|i| crate::linalg::unit(m, i)).collect();
        OrderedSpace::new(m, &rays).expect("orthant order is admissible")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn polar(&self) -> &Cone {
        &self.polar
    }

    /// Extreme rays of `C⁻`, primitive and sorted.
    pub fn dual_rays(&self) -> &[Vec<Rat>] {
        &self.dual_rays
    }

    pub fn contains_dual(&self, zstar: &[Rat]) -> bool {
        zstar.len() == self.m && self.polar.contains(zstar)
    }

    fn require_dual(&self, zstar: &[Rat]) -> Result<()> {
        if !self.contains_dual(zstar) {
            return Err(Error::NotInDualCone(format!(
                "[{}]",
                zstar
                    .iter()
                    .map(rat_to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        Ok(())
    }
}

impl Serialize for OrderedSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("OrderedSpace", 2)?;
        st.serialize_field("m", &self.m)?;
        let rays: Vec<Vec<String>> = self
            .cone
            .generators()
            .iter()
            .map(|r| r.iter().map(rat_to_string).collect())
            .collect();
        st.serialize_field("cone_rays", &rays)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct OrderedSpaceJson {
    m: usize,
    cone_rays: Vec<Vec<String>>,
}

impl<'de> Deserialize<'de> for OrderedSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = OrderedSpaceJson::deserialize(d)?;
        let rays: Result<Vec<Vec<Rat>>> = json
            .cone_rays
            .iter()
            .map(|row| row.iter().map(|s| parse_rat(s)).collect())
            .collect();
        let rays = rays.map_err(|e| D::Error::custom(e.to_string()))?;
        OrderedSpace::new(json.m, &rays).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Closed convex upper set `A = A + C` in an ordered space. `∅` is the
/// greatest and the whole space the least element of the lattice (order `⊇`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperSet {
    space: OrderedSpace,
    body: Polyhedron,
}

impl UpperSet {
    pub fn new(space: OrderedSpace, body: Polyhedron) -> Result<UpperSet> {
        if body.dim() != space.m {
            return Err(Error::dim("upper set lives in the ordered space"));
        }
        if !body.recession_contains(&space.cone) {
            return Err(Error::cone("body violates A = A + C"));
        }
        Ok(UpperSet { space, body })
    }

    /// Force the upper-set property by adding the cone.
    pub fn closure_of(space: OrderedSpace, body: &Polyhedron) -> Result<UpperSet> {
        let cone_poly = Polyhedron::from_generators(
            space.m,
            &[zeros(space.m)],
            &space.cone.generators().to_vec(),
        );
        let body = body.minkowski_sum(&cone_poly)?;
        Ok(UpperSet { space, body })
    }

    pub fn empty(space: OrderedSpace) -> UpperSet {
        let m = space.m;
        UpperSet {
            space,
            body: Polyhedron::empty(m),
        }
    }

    pub fn whole(space: OrderedSpace) -> UpperSet {
        let m = space.m;
        UpperSet {
            space,
            body: Polyhedron::whole_space(m),
        }
    }

    pub fn space(&self) -> &OrderedSpace {
        &self.space
    }

    pub fn body(&self) -> &Polyhedron {
        &self.body
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.body.is_whole_space()
    }

    pub fn equal(&self, other: &UpperSet) -> bool {
        self.body.equal(&other.body)
    }

    pub fn add(&self, other: &UpperSet) -> Result<UpperSet> {
        Ok(UpperSet {
            space: self.space.clone(),
            body: self.body.minkowski_sum(&other.body)?,
        })
    }

    /// Lattice supremum (intersection).
    pub fn sup(&self, other: &UpperSet) -> Result<UpperSet> {
        Ok(UpperSet {
            space: self.space.clone(),
            body: self.body.intersect(&other.body)?,
        })
    }

    /// Lattice infimum in the closed convex lattice: `cl co (A ∪ B)`.
    pub fn inf_closed(&self, other: &UpperSet) -> Result<UpperSet> {
        Ok(UpperSet {
            space: self.space.clone(),
            body: self.body.hull_union(&other.body)?,
        })
    }

    /// Inf-residuation `A ⊖ B = {z : B + z ⊆ A}`: each constraint of `A`
    /// shifts by the support of `B` in the negated normal direction.
    pub fn residual(&self, other: &UpperSet) -> Result<UpperSet> {
        Ok(UpperSet {
            space: self.space.clone(),
            body: self.body.star_difference(&other.body)?,
        })
    }
}

impl Serialize for UpperSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("UpperSet", 2)?;
        st.serialize_field("space", &self.space)?;
        st.serialize_field("body", &self.body)?;
        st.end()
    }
}

/// Value of a set-valued conjugate: the halfspace `H_α(z*) = {z : α ≤ -z*·z}`,
/// or `Z` (α = -∞), or `∅` (α = +∞). For `z* = 0` the value is `Z` when
/// `α ≤ 0` and `∅` otherwise.
#[derive(Clone, Debug)]
pub struct HalfSpaceValue {
    space: OrderedSpace,
    zstar: Vec<Rat>,
    alpha: XReal,
}

impl HalfSpaceValue {
    pub fn new(space: OrderedSpace, zstar: Vec<Rat>, alpha: XReal) -> Result<HalfSpaceValue> {
        space.require_dual(&zstar)?;
        Ok(HalfSpaceValue {
            space,
            zstar,
            alpha,
        })
    }

    pub fn space(&self) -> &OrderedSpace {
        &self.space
    }

    pub fn zstar(&self) -> &[Rat] {
        &self.zstar
    }

    pub fn alpha(&self) -> &XReal {
        &self.alpha
    }

    /// The value as a concrete polyhedron.
    pub fn materialize(&self) -> Polyhedron {
        let m = self.space.m;
        if crate::linalg::is_zero_vec(&self.zstar) {
            return match &self.alpha {
                XReal::PosInf => Polyhedron::empty(m),
                XReal::Finite(a) if a.is_positive() => Polyhedron::empty(m),
                _ => Polyhedron::whole_space(m),
            };
        }
        match &self.alpha {
            XReal::NegInf => Polyhedron::whole_space(m),
            XReal::PosInf => Polyhedron::empty(m),
            XReal::Finite(a) => {
                Polyhedron::from_hrep(m, vec![(neg_vec(&self.zstar), a.clone())])
            }
        }
    }

    pub fn as_upper_set(&self) -> UpperSet {
        UpperSet {
            space: self.space.clone(),
            body: self.materialize(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.materialize().is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.materialize().is_whole_space()
    }

    /// Set equality of the represented values.
    pub fn equal(&self, other: &HalfSpaceValue) -> bool {
        self.materialize().equal(&other.materialize())
    }

    pub fn contains(&self, other: &HalfSpaceValue) -> bool {
        self.materialize().contains_poly(&other.materialize())
    }
}

impl Serialize for HalfSpaceValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HalfSpaceValue", 3)?;
        let zs: Vec<String> = self.zstar.iter().map(rat_to_string).collect();
        st.serialize_field("zstar", &zs)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("hrep", &self.materialize())?;
        st.end()
    }
}

/// Conaffine dual object `S_(x*, z*, r)`: `x ↦ H_{x*·x - r}(z*)` with the
/// completion `r = +∞ ↦ Z`, `r = -∞ ↦ ∅`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conaffine {
    pub xstar: Vec<Rat>,
    pub zstar: Vec<Rat>,
    pub r: XReal,
}

impl Conaffine {
    pub fn new(space: &OrderedSpace, xstar: Vec<Rat>, zstar: Vec<Rat>, r: XReal) -> Result<Self> {
        space.require_dual(&zstar)?;
        Ok(Conaffine { xstar, zstar, r })
    }

    /// Conlinear case `r = 0`.
    pub fn conlinear(space: &OrderedSpace, xstar: Vec<Rat>, zstar: Vec<Rat>) -> Result<Self> {
        Conaffine::new(space, xstar, zstar, XReal::zero())
    }

    pub fn eval(&self, space: &OrderedSpace, x: &[Rat]) -> HalfSpaceValue {
        let level = idif(&XReal::Finite(dot(&self.xstar, x)), &self.r);
        HalfSpaceValue {
            space: space.clone(),
            zstar: self.zstar.clone(),
            alpha: level,
        }
    }
}

/// Set-valued function of epigraphical type: `g : Q^n → P^△`, stored as its
/// (= graph) epigraph in `Q^{n+m}`, whose recession cone contains `{0} × C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFn {
    n: usize,
    space: OrderedSpace,
    epi: Polyhedron,
}

impl SetFn {
    pub fn from_epi(n: usize, space: OrderedSpace, epi: Polyhedron) -> Result<SetFn> {
        if epi.dim() != n + space.m {
            return Err(Error::dim(format!(
                "epigraph of a SetFn with n={n}, m={} lives in Q^{}",
                space.m,
                n + space.m
            )));
        }
        for ray in space.cone.generators() {
            let mut lifted = zeros(n);
            lifted.extend(ray.clone());
            let ok = epi
                .hrep()
                .rows
                .iter()
                .all(|(a, _)| !dot(a, &lifted).is_negative());
            if !ok {
                return Err(Error::cone("epigraph recession cone misses {0} × C"));
            }
        }
        Ok(SetFn { n, space, epi })
    }

    /// Epigraph as the hull of generators plus the lifted ordering cone.
    pub fn from_generators(
        n: usize,
        space: OrderedSpace,
        vertices: &[Vec<Rat>],
        extra_rays: &[Vec<Rat>],
    ) -> Result<SetFn> {
        let mut rays = extra_rays.to_vec();
        for c in space.cone.generators() {
            let mut lifted = zeros(n);
            lifted.extend(c.clone());
            rays.push(lifted);
        }
        let epi = Polyhedron::from_generators(n + space.m, vertices, &rays);
        SetFn::from_epi(n, space, epi)
    }

    /// Constant function `g ≡ A`.
    pub fn constant(n: usize, value: &UpperSet) -> Result<SetFn> {
        let space = value.space.clone();
        let m = space.m;
        let rows = value
            .body
            .hrep()
            .rows
            .iter()
            .map(|(a, b)| {
                let mut row = zeros(n);
                row.extend(a.clone());
                (row, b.clone())
            })
            .collect();
        SetFn::from_epi(n, space, Polyhedron::from_hrep(n + m, rows))
    }

    /// `g ≡ ∅` (the greatest element pointwise).
    pub fn constant_empty(n: usize, space: OrderedSpace) -> SetFn {
        let m = space.m;
        SetFn {
            n,
            space,
            epi: Polyhedron::empty(n + m),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &OrderedSpace {
        &self.space
    }

    pub fn epi(&self) -> &Polyhedron {
        &self.epi
    }

    pub fn equal(&self, other: &SetFn) -> bool {
        self.n == other.n && self.space == other.space && self.epi.equal(&other.epi)
    }

    pub fn dom(&self) -> Polyhedron {
        self.epi
            .project(&(0..self.n).collect::<Vec<_>>())
            .expect("projection indices in range")
    }

    /// `g(x)` as an upper set (the epigraph slice).
    pub fn eval_slice(&self, x: &[Rat]) -> UpperSet {
        debug_assert_eq!(x.len(), self.n);
        let m = self.space.m;
        let rows = self
            .epi
            .hrep()
            .rows
            .iter()
            .map(|(a, b)| {
                let (ax, az) = a.split_at(self.n);
                (az.to_vec(), b - dot(ax, x))
            })
            .collect();
        UpperSet {
            space: self.space.clone(),
            body: Polyhedron::from_hrep(m, rows),
        }
    }

    /// Scalarization `φ_{g,z*}(x) = inf { -z*·z : z ∈ g(x) }`: the image of
    /// the epigraph under `(x, z) ↦ (x, -z*·z)` with the upward ray re-added.
    /// For `z* = 0` this is the indicator of the domain.
    pub fn scalarize(&self, zstar: &[Rat]) -> Result<ScalarFn> {
        self.space.require_dual(zstar)?;
        let n = self.n;
        if self.epi.is_empty() {
            return ScalarFn::from_epi(n, Polyhedron::empty(n + 1));
        }
        let mut matrix = Vec::new();
        for i in 0..n {
            let mut row = zeros(n + self.space.m);
            row[i] = num::One::one();
            matrix.push(row);
        }
        let mut last = zeros(n);
        last.extend(neg_vec(zstar));
        matrix.push(last);
        let map = LinMap::new(matrix)?;
        let image = self.epi.linear_image(&map)?;
        let up = Polyhedron::from_generators(n + 1, &[zeros(n + 1)], &[{
            let mut u = zeros(n + 1);
            u[n] = num::One::one();
            u
        }]);
        ScalarFn::from_epi(n, image.minkowski_sum(&up)?)
    }

    /// Setification `S_(f,z*)(x) = {z : f(x) ≤ -z*·z}` by H-rep substitution
    /// `r := -z*·z` in the epigraph of `f`.
    pub fn setify(f: &ScalarFn, space: &OrderedSpace, zstar: &[Rat]) -> Result<SetFn> {
        space.require_dual(zstar)?;
        let n = f.n();
        let m = space.m;
        let rows = f
            .epi()
            .hrep()
            .rows
            .iter()
            .map(|(a, b)| {
                let (ax, c) = a.split_at(n);
                let mut row = ax.to_vec();
                row.extend(zstar.iter().map(|z| -(&c[0] * z)));
                (row, b.clone())
            })
            .collect();
        SetFn::from_epi(n, space.clone(), Polyhedron::from_hrep(n + m, rows))
    }

    /// Canonical finite scalarization set: the `z* = -c_i` read off the facet
    /// normals `(a_i, c_i)` of the epigraph, plus the extreme rays of `C⁻`.
    /// Directions are primitive and deduplicated; `z* = 0` appears exactly
    /// when the epigraph has pure domain facets.
    pub fn scalarization_directions(&self) -> Vec<Vec<Rat>> {
        let mut dirs: Vec<Vec<Rat>> = Vec::new();
        for (a, _) in &self.epi.hrep().rows {
            let (_, az) = a.split_at(self.n);
            let z = primitive(&neg_vec(az));
            dirs.push(z);
        }
        dirs.extend(self.space.dual_rays.iter().cloned());
        dirs.sort_by(|a, b| crate::linalg::lex_cmp(a, b));
        dirs.dedup();
        dirs
    }

    /// Set-valued conjugate `g*(x*, z*, r)`, computed through the conjugate
    /// of the scalarization: `g*(x*, z*, r) = H_{φ*(x*) ⊖ r}(z*)`, with the
    /// completions at `r = ±∞`.
    pub fn conjugate(&self, xstar: &[Rat], zstar: &[Rat], r: &XReal) -> Result<HalfSpaceValue> {
        self.space.require_dual(zstar)?;
        let alpha = match r {
            XReal::PosInf => XReal::NegInf,
            XReal::NegInf => {
                if self.dom().is_empty() {
                    XReal::NegInf
                } else {
                    XReal::PosInf
                }
            }
            XReal::Finite(_) => {
                let phi_conj = self.scalarize(zstar)?.conjugate();
                idif(&phi_conj.eval(xstar), r)
            }
        };
        Ok(HalfSpaceValue {
            space: self.space.clone(),
            zstar: zstar.to_vec(),
            alpha,
        })
    }

    /// The `z* = 0` branch through the support function of the domain:
    /// `g*(x*, 0, r) = Z` iff `σ(x*|dom g) ≤ r`, `∅` otherwise.
    pub fn conjugate_zero_direction(&self, xstar: &[Rat], r: &XReal) -> HalfSpaceValue {
        let sigma = self.dom().support(xstar);
        HalfSpaceValue {
            space: self.space.clone(),
            zstar: zeros(self.space.m),
            alpha: idif(&sigma, r),
        }
    }

    /// Is the conaffine function a pointwise minorant of `g` (its value always
    /// contains `g(x)`)? Decided by the scalar test: `x ↦ x*·x - r` must
    /// minorize the scalarization along `z*`.
    pub fn minorant_check(&self, a: &Conaffine) -> Result<bool> {
        self.space.require_dual(&a.zstar)?;
        match &a.r {
            XReal::PosInf => Ok(true),
            XReal::NegInf => Ok(self.epi.is_empty()),
            XReal::Finite(r) => {
                let affine = ScalarFn::make_affine(&a.xstar, r);
                let phi = self.scalarize(&a.zstar)?;
                Ok(affine.le(&phi))
            }
        }
    }

    /// Biconjugate: the closed convex hull of the epigraph, computed two
    /// independent ways and cross-checked exactly:
    /// (i) the canonical hull of the generator representation;
    /// (ii) the intersection of the conaffine lifts `S_(φ**_{g,z*}, z*)` over
    /// the facet-derived directions together with the extreme rays of `C⁻`.
    /// A mismatch is a theorem-level failure, reported as a hard error.
    pub fn biconjugate(&self) -> Result<SetFn> {
        let total = self.n + self.space.m;
        // (i) canonical epigraph (constructors keep it canonical)
        let route_hull = self.epi.clone();

        // (ii) facet-direction conaffine intersection
        let mut route_lifts = Polyhedron::whole_space(total);
        if self.epi.is_empty() {
            // every scalarization is ≡ +∞ and every lift is empty
            route_lifts = Polyhedron::empty(total);
        } else {
            for zstar in self.scalarization_directions() {
                let phi_bi = self.scalarize(&zstar)?.biconjugate();
                let lift = SetFn::setify(&phi_bi, &self.space, &zstar)?;
                route_lifts = route_lifts.intersect(&lift.epi)?;
            }
        }
        if !route_hull.equal(&route_lifts) {
            return Err(Error::TheoremViolation(
                "biconjugate routes disagree: generator hull vs conaffine intersection"
                    .to_string(),
            ));
        }
        Ok(SetFn {
            n: self.n,
            space: self.space.clone(),
            epi: route_hull,
        })
    }

    /// `cl co g(x)` as the intersection of the setified scalarizations over
    /// the canonical direction set; must coincide with the slice of the
    /// biconjugate.
    pub fn descalarize(&self, x: &[Rat]) -> Result<UpperSet> {
        let m = self.space.m;
        let mut body = Polyhedron::whole_space(m);
        for zstar in self.scalarization_directions() {
            let phi = self.scalarize(&zstar)?;
            let value = HalfSpaceValue {
                space: self.space.clone(),
                zstar: zstar.clone(),
                alpha: phi.eval(x),
            };
            body = body.intersect(&value.materialize())?;
        }
        Ok(UpperSet {
            space: self.space.clone(),
            body,
        })
    }

    fn require_same_space(&self, other: &SetFn) -> Result<()> {
        if self.space != other.space {
            return Err(Error::cone("ordering cones differ"));
        }
        Ok(())
    }

    /// Pointwise Minkowski sum `(g + f)(x) = g(x) + f(x)`, via the lifted sum
    /// `{(x, z₁ + z₂)}` with auxiliary-variable elimination.
    pub fn add(&self, other: &SetFn) -> Result<SetFn> {
        self.require_same_space(other)?;
        if self.n != other.n {
            return Err(Error::dim("add: domain dimensions differ"));
        }
        let n = self.n;
        let m = self.space.m;
        // coordinates (x, z1, z2); image under (x, z1, z2) ↦ (x, z1 + z2)
        let total = n + 2 * m;
        let mut rows = Vec::new();
        for (a, b) in &self.epi.hrep().rows {
            let (ax, az) = a.split_at(n);
            let mut row = ax.to_vec();
            row.extend(az.to_vec());
            row.extend(zeros(m));
            rows.push((row, b.clone()));
        }
        for (a, b) in &other.epi.hrep().rows {
            let (ax, az) = a.split_at(n);
            let mut row = ax.to_vec();
            row.extend(zeros(m));
            row.extend(az.to_vec());
            rows.push((row, b.clone()));
        }
        let lifted = Polyhedron::from_hrep(total, rows);
        let mut matrix = Vec::new();
        for i in 0..n {
            let mut row = zeros(total);
            row[i] = num::One::one();
            matrix.push(row);
        }
        for j in 0..m {
            let mut row = zeros(total);
            row[n + j] = num::One::one();
            row[n + m + j] = num::One::one();
            matrix.push(row);
        }
        let image = lifted.linear_image(&LinMap::new(matrix)?)?;
        SetFn::from_epi(n, self.space.clone(), image)
    }

    /// Inf-convolution: `cl co` of the Minkowski sum of the epigraphs in
    /// `X × Z`.
    pub fn inf_convolve(&self, other: &SetFn) -> Result<SetFn> {
        self.require_same_space(other)?;
        if self.n != other.n {
            return Err(Error::dim("inf_convolve: domain dimensions differ"));
        }
        Ok(SetFn {
            n: self.n,
            space: self.space.clone(),
            epi: self.epi.minkowski_sum(&other.epi)?,
        })
    }

    /// Composition `(gT)(x) = g(Tx)` by H-rep substitution on the domain
    /// block.
    pub fn compose(&self, t: &LinMap) -> Result<SetFn> {
        if t.rows() != self.n {
            return Err(Error::dim("compose: map lands in the wrong space"));
        }
        let n = t.cols();
        let m = self.space.m;
        let adj = t.adjoint();
        let rows = self
            .epi
            .hrep()
            .rows
            .iter()
            .map(|(a, b)| {
                let (ax, az) = a.split_at(self.n);
                let mut row = adj.apply(ax).expect("arity checked");
                row.extend(az.to_vec());
                (row, b.clone())
            })
            .collect();
        SetFn::from_epi(n, self.space.clone(), Polyhedron::from_hrep(n + m, rows))
    }

    /// Pushforward `(Tg)(y) = inf { g(x) : Tx = y }` (union of slices over the
    /// fiber, hulled), via epigraph projection.
    pub fn pushforward(&self, t: &LinMap) -> Result<SetFn> {
        if t.cols() != self.n {
            return Err(Error::dim("pushforward: map acts on the wrong space"));
        }
        let p = t.rows();
        let m = self.space.m;
        let mut matrix = Vec::new();
        for row in &t.matrix {
            let mut r = row.clone();
            r.extend(zeros(m));
            matrix.push(r);
        }
        for j in 0..m {
            let mut r = zeros(self.n + m);
            r[self.n + j] = num::One::one();
            matrix.push(r);
        }
        let image = self.epi.linear_image(&LinMap::new(matrix)?)?;
        SetFn::from_epi(p, self.space.clone(), image)
    }

    /// Lattice infimum in the closed convex image lattice: hull of the
    /// epigraph union.
    pub fn lattice_inf(&self, other: &SetFn) -> Result<SetFn> {
        self.require_same_space(other)?;
        if self.n != other.n {
            return Err(Error::dim("lattice_inf: domain dimensions differ"));
        }
        Ok(SetFn {
            n: self.n,
            space: self.space.clone(),
            epi: self.epi.hull_union(&other.epi)?,
        })
    }

    /// Does some slice equal the whole image space? For canonical epigraphs
    /// this happens exactly when every facet is a pure domain row.
    pub fn has_full_slice(&self) -> bool {
        !self.epi.is_empty()
            && self
                .epi
                .hrep()
                .rows
                .iter()
                .all(|(a, _)| crate::linalg::is_zero_vec(&a[self.n..]))
    }

    /// `z*`-properness: the scalarization along `z*` is a proper scalar
    /// function.
    pub fn zstar_proper(&self, zstar: &[Rat]) -> Result<bool> {
        Ok(self.scalarize(zstar)?.is_proper())
    }

    pub fn properness(&self) -> Result<PropernessReport> {
        let dom_nonempty = !self.epi.is_empty();
        let has_full_slice = self.has_full_slice();
        let proper = dom_nonempty && !has_full_slice;
        let mut witness = None;
        for zstar in self.scalarization_directions() {
            if crate::linalg::is_zero_vec(&zstar) {
                continue;
            }
            if self.zstar_proper(&zstar)? {
                witness = Some(zstar);
                break;
            }
        }
        // the equivalence: proper ⇔ z*-proper for some z* ≠ 0
        if proper != witness.is_some() {
            return Err(Error::TheoremViolation(
                "properness does not match the z*-properness scan".to_string(),
            ));
        }
        Ok(PropernessReport {
            proper,
            dom_nonempty,
            has_full_slice,
            zstar_witness: witness,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropernessReport {
    pub proper: bool,
    pub dom_nonempty: bool,
    pub has_full_slice: bool,
    #[serde(with = "crate::xreal::serde_rats_opt")]
    pub zstar_witness: Option<Vec<Rat>>,
}

impl Serialize for SetFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SetFn", 3)?;
        st.serialize_field("space", &self.space)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("epi", &self.epi)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct SetFnJson {
    space: OrderedSpace,
    n: usize,
    epi: Polyhedron,
}

impl<'de> Deserialize<'de> for SetFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = SetFnJson::deserialize(d)?;
        SetFn::from_epi(json.n, json.space, json.epi).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xreal::rat;

    fn r(n: i64) -> Rat {
        rat(n, 1)
    }

    fn q2() -> OrderedSpace {
        OrderedSpace::orthant(2)
    }

    /// ḡ(x) = (x, |x|) with C = Q²₊: epi = {(x, z1, z2) : z1 ≥ x, z2 ≥ |x|}.
    fn vee() -> SetFn {
        let epi = Polyhedron::from_hrep(
            3,
            vec![
                (vec![r(-1), r(1), r(0)], r(0)),
                (vec![r(1), r(0), r(1)], r(0)),
                (vec![r(-1), r(0), r(1)], r(0)),
            ],
        );
        SetFn::from_epi(1, q2(), epi).unwrap()
    }

    #[test]
    fn space_validation() {
        assert!(OrderedSpace::new(2, &[]).is_err());
        // a halfplane cone: C⁻ is a ray, still admissible
        let half = OrderedSpace::new(2, &[vec![r(1), r(0)], vec![r(-1), r(0)], vec![r(0), r(1)]]);
        assert!(half.is_ok());
        // the whole space as cone has trivial polar
        let all = OrderedSpace::new(
            2,
            &[
                vec![r(1), r(0)],
                vec![r(-1), r(0)],
                vec![r(0), r(1)],
                vec![r(0), r(-1)],
            ],
        );
        assert!(all.is_err());
    }

    #[test]
    fn eval_slice_examples() {
        let g = vee();
        let s = g.eval_slice(&[r(1)]);
        let expected = Polyhedron::from_hrep(
            2,
            vec![(vec![r(1), r(0)], r(1)), (vec![r(0), r(1)], r(1))],
        );
        assert!(s.body().equal(&expected));
        // outside the domain the slice is empty
        let empty = SetFn::constant_empty(1, q2());
        assert!(empty.eval_slice(&[r(0)]).is_empty());
        // g ≡ Z has whole-space slices
        let whole = SetFn::constant(1, &UpperSet::whole(q2())).unwrap();
        assert!(whole.eval_slice(&[r(5)]).is_whole());
    }

    #[test]
    fn scalarize_examples() {
        let g = vee();
        // z* = (0,-1) picks out |x| (grid-derived)
        let phi = g.scalarize(&[r(0), r(-1)]).unwrap();
        let abs = ScalarFn::from_max_affine(1, &[(vec![r(1)], r(0)), (vec![r(-1)], r(0))]);
        assert!(phi.equal(&abs));
        // z* = (-1,0) picks out x
        let phi = g.scalarize(&[r(-1), r(0)]).unwrap();
        let lin = ScalarFn::make_affine(&[r(1)], &r(0));
        assert!(phi.equal(&lin));
        // z* = 0 is the indicator of the domain (the whole line here)
        let phi = g.scalarize(&[r(0), r(0)]).unwrap();
        let ind = ScalarFn::make_indicator(&Polyhedron::whole_space(1));
        assert!(phi.equal(&ind));
        // directions outside C⁻ are rejected
        assert!(g.scalarize(&[r(1), r(0)]).is_err());
    }

    #[test]
    fn setify_examples() {
        let abs = ScalarFn::from_max_affine(1, &[(vec![r(1)], r(0)), (vec![r(-1)], r(0))]);
        let s = SetFn::setify(&abs, &q2(), &[r(0), r(-1)]).unwrap();
        // slices {z : |x| ≤ z₂}
        let slice = s.eval_slice(&[r(-2)]);
        let expected = Polyhedron::from_hrep(2, vec![(vec![r(0), r(1)], r(2))]);
        assert!(slice.body().equal(&expected));
        // z* = 0: slice is Z where f(x) ≤ 0
        let neg = ScalarFn::make_affine(&[r(0)], &r(1)); // constant -1
        let s0 = SetFn::setify(&neg, &q2(), &[r(0), r(0)]).unwrap();
        assert!(s0.eval_slice(&[r(7)]).is_whole());
        // f ≡ +∞ setifies to ≡ ∅
        let top = ScalarFn::make_const(1, &XReal::PosInf);
        let se = SetFn::setify(&top, &q2(), &[r(0), r(-1)]).unwrap();
        assert!(se.epi().is_empty());
    }

    #[test]
    fn conaffine_eval_conventions() {
        let space = q2();
        // x* = 0, z* = (0,-1), r = 0: constant halfspace {z₂ ≥ 0}
        let a = Conaffine::conlinear(&space, vec![r(0)], vec![r(0), r(-1)]).unwrap();
        let v = a.eval(&space, &[r(3)]);
        let expected = Polyhedron::from_hrep(2, vec![(vec![r(0), r(1)], r(0))]);
        assert!(v.materialize().equal(&expected));
        // r = +∞ gives Z
        let a = Conaffine::new(&space, vec![r(1)], vec![r(0), r(-1)], XReal::PosInf).unwrap();
        assert!(a.eval(&space, &[r(5)]).is_whole());
        // z* = 0, x* = 1, r = 0 at x = 2: empty value
        let a = Conaffine::conlinear(&space, vec![r(1)], vec![r(0), r(0)]).unwrap();
        assert!(a.eval(&space, &[r(2)]).is_empty());
        assert!(a.eval(&space, &[r(-1)]).is_whole());
    }

    #[test]
    fn minorant_checks() {
        let g = vee();
        let space = q2();
        // -x ≤ |x|: minorant along z* = (0,-1)
        let a = Conaffine::conlinear(&space, vec![r(-1)], vec![r(0), r(-1)]).unwrap();
        assert!(g.minorant_check(&a).unwrap());
        // 2x is not (witness x = 1)
        let a = Conaffine::conlinear(&space, vec![r(2)], vec![r(0), r(-1)]).unwrap();
        assert!(!g.minorant_check(&a).unwrap());
        // r = +∞: value Z, always a minorant
        let a = Conaffine::new(&space, vec![r(9)], vec![r(0), r(-1)], XReal::PosInf).unwrap();
        assert!(g.minorant_check(&a).unwrap());
    }

    #[test]
    fn conjugate_examples() {
        let g = vee();
        // (x*, z*, r) = (0, (0,-1), 0): φ = |x|, φ*(0) = 0 → H₀((0,-1)) = {z₂ ≥ 0}
        let v = g.conjugate(&[r(0)], &[r(0), r(-1)], &XReal::zero()).unwrap();
        let expected = Polyhedron::from_hrep(2, vec![(vec![r(0), r(1)], r(0))]);
        assert!(v.materialize().equal(&expected));
        // r = -∞ with nonempty domain: ∅
        let v = g.conjugate(&[r(0)], &[r(0), r(-1)], &XReal::NegInf).unwrap();
        assert!(v.is_empty());
        // g ≡ ∅: conjugate ≡ Z
        let empty = SetFn::constant_empty(1, q2());
        let v = empty
            .conjugate(&[r(4)], &[r(0), r(-1)], &XReal::zero())
            .unwrap();
        assert!(v.is_whole());
    }

    #[test]
    fn conjugate_zero_direction_examples() {
        // dom g = [0,1]
        let space = q2();
        let g = SetFn::from_generators(
            1,
            space,
            &[vec![r(0), r(0), r(0)], vec![r(1), r(0), r(0)]],
            &[],
        )
        .unwrap();
        let v = g.conjugate_zero_direction(&[r(1)], &XReal::from_int(1));
        assert!(v.is_whole());
        let v = g.conjugate_zero_direction(&[r(1)], &XReal::Finite(rat(1, 2)));
        assert!(v.is_empty());
        // empty domain: Z for all (x*, r)
        let empty = SetFn::constant_empty(1, q2());
        let v = empty.conjugate_zero_direction(&[r(3)], &XReal::from_int(-7));
        assert!(v.is_whole());
        // cross-check against the general formula
        let via_general = g
            .conjugate(&[r(1)], &[r(0), r(0)], &XReal::from_int(1))
            .unwrap();
        assert!(via_general.is_whole());
    }

    #[test]
    fn biconjugate_routes_agree() {
        // convex closed epigraph: fixed point
        let g = vee();
        let bi = g.biconjugate().unwrap();
        assert!(bi.equal(&g));
        // union-like generators over two domain points
        let space = q2();
        let g = SetFn::from_generators(
            1,
            space,
            &[vec![r(0), r(0), r(1)], vec![r(1), r(1), r(0)]],
            &[],
        )
        .unwrap();
        let bi = g.biconjugate().unwrap();
        assert!(bi.equal(&g)); // constructor already hulled the generators
        assert!(!bi.epi().is_empty());
        // g ≡ ∅ is a fixed point too
        let empty = SetFn::constant_empty(1, q2());
        assert!(empty.biconjugate().unwrap().equal(&empty));
    }

    #[test]
    fn descalarize_matches_slices() {
        let g = vee();
        let d = g.descalarize(&[r(1)]).unwrap();
        let expected = Polyhedron::from_hrep(
            2,
            vec![(vec![r(1), r(0)], r(1)), (vec![r(0), r(1)], r(1))],
        );
        assert!(d.body().equal(&expected));
        // g ≡ Z descalarizes to Z
        let whole = SetFn::constant(1, &UpperSet::whole(q2())).unwrap();
        assert!(whole.descalarize(&[r(0)]).unwrap().is_whole());
        // outside the closed convex domain: ∅
        let space = q2();
        let dom01 = SetFn::from_generators(
            1,
            space,
            &[vec![r(0), r(0), r(0)], vec![r(1), r(0), r(0)]],
            &[],
        )
        .unwrap();
        assert!(dom01.descalarize(&[r(5)]).unwrap().is_empty());
    }

    #[test]
    fn residual_examples() {
        let space = q2();
        let a = UpperSet::new(
            space.clone(),
            Polyhedron::from_generators(
                2,
                &[vec![r(1), r(2)]],
                &[vec![r(1), r(0)], vec![r(0), r(1)]],
            ),
        )
        .unwrap();
        let b = UpperSet::new(
            space.clone(),
            Polyhedron::from_generators(
                2,
                &[vec![r(0), r(1)]],
                &[vec![r(1), r(0)], vec![r(0), r(1)]],
            ),
        )
        .unwrap();
        let res = a.residual(&b).unwrap();
        let expected = Polyhedron::from_generators(
            2,
            &[vec![r(1), r(1)]],
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
        );
        assert!(res.body().equal(&expected));
        // A ⊖ ∅ = Z
        let res = a.residual(&UpperSet::empty(space)).unwrap();
        assert!(res.is_whole());
    }

    #[test]
    fn setfn_algebra() {
        let g = vee();
        let space = q2();
        // adding the constant-C function is the identity (C is the zero element)
        let cone_value = UpperSet::closure_of(
            space.clone(),
            &Polyhedron::singleton(vec![r(0), r(0)]),
        )
        .unwrap();
        let const_c = SetFn::constant(1, &cone_value).unwrap();
        let sum = g.add(&const_c).unwrap();
        assert!(sum.equal(&g));
        // adding the constant ∅ collapses to ∅
        let empty = SetFn::constant_empty(1, space);
        let sum = g.add(&empty).unwrap();
        assert!(sum.epi().is_empty());
        // scalarize(f + g, z*) = φ_f ⊕ φ_g
        let zstar = vec![r(0), r(-1)];
        let twice = g.add(&g).unwrap();
        let lhs = twice.scalarize(&zstar).unwrap();
        let phi = g.scalarize(&zstar).unwrap();
        let rhs = phi.pointwise_inf_add(&phi).unwrap();
        assert!(lhs.equal(&rhs));
    }

    #[test]
    fn properness_reports() {
        let g = vee();
        let rep = g.properness().unwrap();
        assert!(rep.proper && rep.dom_nonempty && !rep.has_full_slice);
        assert!(rep.zstar_witness.is_some());

        let whole = SetFn::constant(1, &UpperSet::whole(q2())).unwrap();
        let rep = whole.properness().unwrap();
        assert!(!rep.proper && rep.has_full_slice);

        // 0-properness holds for every function with nonempty domain
        assert!(g.scalarize(&[r(0), r(0)]).unwrap().is_proper());
    }

    #[test]
    fn json_round_trip() {
        let g = vee();
        let s = serde_json::to_string(&g).unwrap();
        let back: SetFn = serde_json::from_str(&s).unwrap();
        assert!(g.equal(&back));
    }
}
