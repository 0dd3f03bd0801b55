//! Exact rational polyhedral geometry: dual H-/V-representations, double
//! description conversion, Fourier–Motzkin projection, exact LP queries, and
//! the set operations the convex-analysis layers are built on.
//!
//! Every polyhedron is stored with a canonical H-representation: implicit
//! equalities in reduced echelon form (emitted as row pairs), facet rows
//! reduced modulo the affine hull, primitive-integer normals, no redundant
//! rows, lexicographically sorted. Set equality is therefore a syntactic
//! comparison of canonical forms.

mod dd;

use std::sync::OnceLock;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, dot, is_zero_vec, lex_cmp, neg_vec, primitive, reduce_mod_rowspace, rref, zeros,
};
use crate::lp::{self, Constraint, LpOutcome};
use crate::xreal::{parse_rat, rat_to_string, Rat, XReal};

pub use crate::linalg::LinMap;

/// Inequality system `{ v ∈ Q^dim : A v ≥ b }`. Zero rows encode the whole
/// space; the canonical empty set is the single row `0·v ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRep {
    pub dim: usize,
    /// Rows `(a, b)` meaning `a·v ≥ b`.
    pub rows: Vec<(Vec<Rat>, Rat)>,
}

impl HRep {
    pub fn whole_space(dim: usize) -> Self {
        HRep { dim, rows: vec![] }
    }

    pub fn empty(dim: usize) -> Self {
        HRep {
            dim,
            rows: vec![(zeros(dim), Rat::one())],
        }
    }

    pub fn is_empty_marker(&self) -> bool {
        self.rows.len() == 1 && is_zero_vec(&self.rows[0].0) && self.rows[0].1.is_positive()
    }

    fn constraints(&self) -> Vec<Constraint> {
        self.rows
            .iter()
            .map(|(a, b)| Constraint::ge(a.clone(), b.clone()))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct HRepJson {
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    b: Vec<String>,
}

impl Serialize for HRep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let json = HRepJson {
            a: self
                .rows
                .iter()
                .map(|(a, _)| a.iter().map(rat_to_string).collect())
                .collect(),
            b: self.rows.iter().map(|(_, b)| rat_to_string(b)).collect(),
        };
        json.serialize(s)
    }
}

impl HRep {
    pub(crate) fn from_json(dim: usize, json: &HRepJson) -> Result<HRep> {
        if json.a.len() != json.b.len() {
            return Err(Error::dim("H-rep: |A| != |b|"));
        }
        let mut rows = Vec::new();
        for (a_row, b_str) in json.a.iter().zip(&json.b) {
            if a_row.len() != dim {
                return Err(Error::dim(format!(
                    "H-rep row has {} entries, ambient dimension is {dim}",
                    a_row.len()
                )));
            }
            let a: Vec<Rat> = a_row.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?;
            rows.push((a, parse_rat(b_str)?));
        }
        Ok(HRep { dim, rows })
    }
}

/// Generator system: `conv(vertices) + cone(rays)`. Empty vertex list encodes
/// the empty set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VRep {
    pub dim: usize,
    pub vertices: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct VRepJson {
    vertices: Vec<Vec<String>>,
    rays: Vec<Vec<String>>,
}

impl Serialize for VRep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let json = VRepJson {
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(rat_to_string).collect())
                .collect(),
            rays: self
                .rays
                .iter()
                .map(|r| r.iter().map(rat_to_string).collect())
                .collect(),
        };
        json.serialize(s)
    }
}

impl VRep {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub(crate) fn from_json(dim: usize, json: &VRepJson) -> Result<VRep> {
        let parse_list = |rows: &[Vec<String>]| -> Result<Vec<Vec<Rat>>> {
            rows.iter()
                .map(|row| {
                    if row.len() != dim {
                        return Err(Error::dim(format!(
                            "V-rep generator has {} entries, ambient dimension is {dim}",
                            row.len()
                        )));
                    }
                    row.iter().map(|s| parse_rat(s)).collect()
                })
                .collect()
        };
        Ok(VRep {
            dim,
            vertices: parse_list(&json.vertices)?,
            rays: parse_list(&json.rays)?,
        })
    }
}

/// Closed convex polyhedron with eagerly canonicalized H-representation and a
/// lazily derived V-representation. Immutable after construction; the lazy
/// cache is a `OnceLock`, so sharing across threads is safe.
#[derive(Debug)]
pub struct Polyhedron {
    dim: usize,
    hrep: HRep,
    vrep: OnceLock<VRep>,
}

impl Clone for Polyhedron {
    fn clone(&self) -> Self {
        Polyhedron {
            dim: self.dim,
            hrep: self.hrep.clone(),
            vrep: self.vrep.clone(),
        }
    }
}

impl PartialEq for Polyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.hrep == other.hrep
    }
}

impl Eq for Polyhedron {}

impl Polyhedron {
    /// Canonicalize an arbitrary inequality list.
    pub fn from_hrep(dim: usize, rows: Vec<(Vec<Rat>, Rat)>) -> Polyhedron {
        Polyhedron {
            dim,
            hrep: canonical_hrep(dim, rows),
            vrep: OnceLock::new(),
        }
    }

    /// Hull of a generator list: `conv(vertices) + cone(rays)`. The facet
    /// rows coming out of the double description step are already
    /// irredundant, so canonicalization needs no LP here.
    pub fn from_generators(dim: usize, vertices: &[Vec<Rat>], rays: &[Vec<Rat>]) -> Polyhedron {
        if vertices.is_empty() {
            return Polyhedron::empty(dim);
        }
        let rows = generators_to_rows(dim, vertices, rays);
        Polyhedron {
            dim,
            hrep: canonical_from_facet_rows(dim, rows, vertices, rays),
            vrep: OnceLock::new(),
        }
    }

    pub fn whole_space(dim: usize) -> Polyhedron {
        Polyhedron::from_hrep(dim, vec![])
    }

    pub fn empty(dim: usize) -> Polyhedron {
        Polyhedron {
            dim,
            hrep: HRep::empty(dim),
            vrep: OnceLock::new(),
        }
    }

    pub fn singleton(point: Vec<Rat>) -> Polyhedron {
        let dim = point.len();
        Polyhedron::from_generators(dim, &[point], &[])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hrep(&self) -> &HRep {
        &self.hrep
    }

    /// Minimal dual representation, derived from the canonical H-rep by double
    /// description and LP generator pruning. Idempotent and deterministic.
    pub fn vrep(&self) -> &VRep {
        self.vrep.get_or_init(|| hrep_to_vrep(&self.hrep))
    }

    pub fn is_empty(&self) -> bool {
        self.hrep.is_empty_marker()
    }

    pub fn is_whole_space(&self) -> bool {
        self.hrep.rows.is_empty()
    }

    pub fn contains_point(&self, v: &[Rat]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        self.hrep.rows.iter().all(|(a, b)| dot(a, v) >= *b)
    }

    /// Does every point of `other` lie in `self`? Decided on generators
    /// against the H-rep.
    pub fn contains_poly(&self, other: &Polyhedron) -> bool {
        if other.is_empty() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        let vr = other.vrep();
        vr.vertices.iter().all(|v| self.contains_point(v))
            && vr.rays.iter().all(|r| {
                self.hrep
                    .rows
                    .iter()
                    .all(|(a, _)| !dot(a, r).is_negative())
            })
    }

    /// Canonical forms make equality a syntactic check.
    pub fn equal(&self, other: &Polyhedron) -> bool {
        self == other
    }

    /// Support value `sup { w·v : v ∈ self }`; `-∞` on the empty set, `+∞`
    /// when unbounded in direction `w`.
    pub fn support(&self, w: &[Rat]) -> XReal {
        if self.is_empty() {
            return XReal::NegInf;
        }
        match lp::maximize(w, &self.hrep.constraints()) {
            LpOutcome::Infeasible => XReal::NegInf,
            LpOutcome::Unbounded { .. } => XReal::PosInf,
            LpOutcome::Optimal { value, .. } => XReal::Finite(value),
        }
    }

    /// Maximize `w·v` and return a maximizer when the problem is bounded.
    pub fn argmax(&self, w: &[Rat]) -> Option<(Vec<Rat>, Rat)> {
        if self.is_empty() {
            return None;
        }
        match lp::maximize(w, &self.hrep.constraints()) {
            LpOutcome::Optimal { point, value } => Some((point, value)),
            _ => None,
        }
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.dim != other.dim {
            return Err(Error::dim("intersect: ambient dimensions differ"));
        }
        let mut rows = self.hrep.rows.clone();
        rows.extend(other.hrep.rows.clone());
        Ok(Polyhedron::from_hrep(self.dim, rows))
    }

    /// Minkowski sum, realized on generators; polyhedral sums are closed, so
    /// this equals `cl(A + B)`. Convention: `A + ∅ = ∅`.
    pub fn minkowski_sum(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.dim != other.dim {
            return Err(Error::dim("minkowski_sum: ambient dimensions differ"));
        }
        if self.is_empty() || other.is_empty() {
            return Ok(Polyhedron::empty(self.dim));
        }
        let (p, q) = (self.vrep(), other.vrep());
        let mut vertices = Vec::new();
        for v in &p.vertices {
            for w in &q.vertices {
                vertices.push(linalg::add_vec(v, w));
            }
        }
        let mut rays = p.rays.clone();
        rays.extend(q.rays.clone());
        Ok(Polyhedron::from_generators(self.dim, &vertices, &rays))
    }

    /// Closed convex hull of the union, realized by concatenating generators.
    pub fn hull_union(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.dim != other.dim {
            return Err(Error::dim("hull_union: ambient dimensions differ"));
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        let (p, q) = (self.vrep(), other.vrep());
        let mut vertices = p.vertices.clone();
        vertices.extend(q.vertices.clone());
        let mut rays = p.rays.clone();
        rays.extend(q.rays.clone());
        Ok(Polyhedron::from_generators(self.dim, &vertices, &rays))
    }

    /// Exact projection onto the kept coordinates (Fourier–Motzkin with LP
    /// redundancy pruning after each elimination).
    pub fn project(&self, keep: &[usize]) -> Result<Polyhedron> {
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.iter().any(|&k| k >= self.dim) {
            return Err(Error::dim("project: index out of range"));
        }
        let out_dim = keep.len();
        if self.is_empty() {
            return Ok(Polyhedron::empty(out_dim));
        }
        let mut rows = self.hrep.rows.clone();
        let mut drop: Vec<usize> = (0..self.dim).filter(|i| !keep.contains(i)).collect();
        drop.sort_unstable();
        for &col in drop.iter().rev() {
            rows = syntactic_prune(eliminate_column(rows, col));
            if rows.len() > 32 {
                // full LP pruning only when the row count starts to blow up
                let dim_now = rows.first().map_or(out_dim, |(a, _)| a.len());
                rows = canonical_hrep(dim_now, rows).rows;
            }
        }
        Ok(Polyhedron::from_hrep(out_dim, rows))
    }

    /// Image under a linear map, exact: linear images commute with hulls, so
    /// the image is generated by the images of the generators.
    pub fn linear_image(&self, map: &LinMap) -> Result<Polyhedron> {
        if map.cols() != self.dim {
            return Err(Error::dim("linear_image: map arity mismatch"));
        }
        let out = map.rows();
        if self.is_empty() {
            return Ok(Polyhedron::empty(out));
        }
        let v = self.vrep();
        let vertices: Vec<Vec<Rat>> = v
            .vertices
            .iter()
            .map(|p| map.apply(p))
            .collect::<Result<_>>()?;
        let rays: Vec<Vec<Rat>> = v
            .rays
            .iter()
            .map(|r| map.apply(r))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|r| !is_zero_vec(r))
            .collect();
        Ok(Polyhedron::from_generators(out, &vertices, &rays))
    }

    /// Preimage `{x : M x ∈ self}` by H-rep substitution.
    pub fn preimage(&self, map: &LinMap) -> Result<Polyhedron> {
        if map.rows() != self.dim {
            return Err(Error::dim("preimage: map arity mismatch"));
        }
        let adj = map.adjoint();
        let rows = self
            .hrep
            .rows
            .iter()
            .map(|(a, b)| {
                let sub = adj.apply(a).expect("arity checked");
                (sub, b.clone())
            })
            .collect();
        Ok(Polyhedron::from_hrep(map.cols(), rows))
    }

    /// Star difference `{z : other + z ⊆ self}`: each row bound shifts by the
    /// support of `other` in the negated normal direction.
    pub fn star_difference(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.dim != other.dim {
            return Err(Error::dim("star_difference: ambient dimensions differ"));
        }
        let mut rows = Vec::new();
        for (a, b) in &self.hrep.rows {
            let shift = crate::xreal::idif(
                &XReal::Finite(b.clone()),
                &other.support(&neg_vec(a)).negate(),
            );
            match shift {
                XReal::NegInf => continue,
                XReal::Finite(v) => rows.push((a.clone(), v)),
                XReal::PosInf => return Ok(Polyhedron::empty(self.dim)),
            }
        }
        Ok(Polyhedron::from_hrep(self.dim, rows))
    }

    /// Does the recession cone of `self` contain the given cone?
    pub fn recession_contains(&self, cone: &Cone) -> bool {
        cone.generators().iter().all(|ray| {
            self.hrep
                .rows
                .iter()
                .all(|(a, _)| !dot(a, ray).is_negative())
        })
    }

    /// The recession cone `{y : A y ≥ 0}`.
    pub fn recession_cone(&self) -> Cone {
        if self.is_empty() {
            return Cone::origin(self.dim);
        }
        let rows = self
            .hrep
            .rows
            .iter()
            .map(|(a, _)| (a.clone(), Rat::zero()))
            .collect();
        Cone(Polyhedron::from_hrep(self.dim, rows))
    }
}

/// Polyhedral cone: `b = 0` in canonical form and the only vertex is the
/// origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone(Polyhedron);

impl Cone {
    pub fn origin(dim: usize) -> Cone {
        Cone(Polyhedron::singleton(zeros(dim)))
    }

    pub fn whole_space(dim: usize) -> Cone {
        Cone(Polyhedron::whole_space(dim))
    }

    pub fn from_rays(dim: usize, rays: &[Vec<Rat>]) -> Result<Cone> {
        for r in rays {
            if r.len() != dim {
                return Err(Error::dim("cone ray arity mismatch"));
            }
        }
        Ok(Cone(Polyhedron::from_generators(dim, &[zeros(dim)], rays)))
    }

    pub fn from_polyhedron(p: Polyhedron) -> Result<Cone> {
        if p.is_empty() {
            return Err(Error::cone("a cone cannot be empty"));
        }
        if !p.hrep.rows.iter().all(|(_, b)| b.is_zero()) {
            return Err(Error::cone("canonical form has nonzero offsets"));
        }
        Ok(Cone(p))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_polyhedron(&self) -> &Polyhedron {
        &self.0
    }

    /// Extreme-ray list (plus ± pairs for lineality directions).
    pub fn generators(&self) -> &[Vec<Rat>] {
        &self.0.vrep().rays
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.0.contains_point(v)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators().is_empty()
    }

    /// Negative dual cone `{y : y·c ≤ 0 for all c ∈ self}`.
    pub fn polar(&self) -> Cone {
        let rows = self
            .generators()
            .iter()
            .map(|g| (neg_vec(g), Rat::zero()))
            .collect();
        Cone(Polyhedron::from_hrep(self.dim(), rows))
    }
}

impl Serialize for Polyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Polyhedron", 2)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("hrep", &self.hrep)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct PolyhedronJson {
    dim: usize,
    hrep: Option<HRepJson>,
    vrep: Option<VRepJson>,
}

impl<'de> Deserialize<'de> for Polyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = PolyhedronJson::deserialize(d)?;
        Polyhedron::from_parts(json).map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl Polyhedron {
    fn from_parts(json: PolyhedronJson) -> Result<Polyhedron> {
        let dim = json.dim;
        match (&json.hrep, &json.vrep) {
            (None, None) => Err(Error::schema("/", "polyhedron needs hrep or vrep")),
            (Some(h), None) => {
                let h = HRep::from_json(dim, h)?;
                Ok(Polyhedron::from_hrep(dim, h.rows))
            }
            (None, Some(v)) => {
                let v = VRep::from_json(dim, v)?;
                Ok(Polyhedron::from_generators(dim, &v.vertices, &v.rays))
            }
            (Some(h), Some(v)) => {
                let h = HRep::from_json(dim, h)?;
                let v = VRep::from_json(dim, v)?;
                let from_h = Polyhedron::from_hrep(dim, h.rows);
                let from_v = Polyhedron::from_generators(dim, &v.vertices, &v.rays);
                if !from_h.contains_poly(&from_v) || !from_v.contains_poly(&from_h) {
                    return Err(Error::schema(
                        "/",
                        "hrep and vrep describe different sets",
                    ));
                }
                Ok(from_h)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// canonical form
// ---------------------------------------------------------------------------

fn canonical_hrep(dim: usize, raw: Vec<(Vec<Rat>, Rat)>) -> HRep {
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (a, b) in raw {
        debug_assert_eq!(a.len(), dim);
        if is_zero_vec(&a) {
            if b.is_positive() {
                return HRep::empty(dim);
            }
            continue;
        }
        rows.push((a, b));
    }
    let cons: Vec<Constraint> = rows
        .iter()
        .map(|(a, b)| Constraint::ge(a.clone(), b.clone()))
        .collect();
    if lp::feasible_point(&cons, dim).is_none() {
        return HRep::empty(dim);
    }

    // Implicit equalities: rows whose value is constant over the set.
    let mut eq_aug: Vec<Vec<Rat>> = Vec::new();
    let mut ineqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (a, b) in &rows {
        let tight = match lp::maximize(a, &cons) {
            LpOutcome::Optimal { value, .. } => value == *b,
            _ => false,
        };
        if tight {
            let mut aug = a.clone();
            aug.push(b.clone());
            eq_aug.push(aug);
        } else {
            ineqs.push((a.clone(), b.clone()));
        }
    }
    let (eq_rref, pivots) = rref(&eq_aug);
    debug_assert!(pivots.iter().all(|&p| p < dim), "feasible system");

    // Reduce inequality rows modulo the affine hull; primitive scaling of the
    // joint (a, b) vector keeps the facet representative unique.
    let mut reduced: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (a, b) in ineqs {
        let mut aug = a;
        aug.push(b);
        let aug = reduce_mod_rowspace(&aug, &eq_rref, &pivots);
        let aug = primitive(&aug);
        let (a_part, b_part) = aug.split_at(dim);
        if is_zero_vec(a_part) {
            continue;
        }
        reduced.push((a_part.to_vec(), b_part[0].clone()));
    }
    // Duplicate normals: keep the strongest bound.
    reduced.sort_by(|(a1, b1), (a2, b2)| lex_cmp(a1, a2).then(b1.cmp(b2)).reverse());
    reduced.dedup_by(|next, kept| next.0 == kept.0);

    // LP redundancy elimination against equalities + surviving rows.
    let eq_cons: Vec<Constraint> = eq_rref
        .iter()
        .map(|aug| {
            let (a, b) = aug.split_at(dim);
            Constraint::eq(a.to_vec(), b[0].clone())
        })
        .collect();
    let mut kept: Vec<(Vec<Rat>, Rat)> = reduced.clone();
    let mut i = 0;
    while i < kept.len() {
        let mut sys = eq_cons.clone();
        for (j, (a, b)) in kept.iter().enumerate() {
            if j != i {
                sys.push(Constraint::ge(a.clone(), b.clone()));
            }
        }
        let redundant = match lp::minimize(&kept[i].0, &sys) {
            LpOutcome::Optimal { value, .. } => value >= kept[i].1,
            LpOutcome::Unbounded { .. } => false,
            LpOutcome::Infeasible => unreachable!("subsystem of a feasible system"),
        };
        if redundant {
            kept.remove(i);
        } else {
            i += 1;
        }
    }

    let mut out: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for aug in &eq_rref {
        let aug = primitive(aug);
        let (a, b) = aug.split_at(dim);
        out.push((a.to_vec(), b[0].clone()));
        out.push((neg_vec(a), -&b[0]));
    }
    out.extend(kept);
    out.sort_by(|(a1, b1), (a2, b2)| lex_cmp(a1, a2).then(b1.cmp(b2)));
    HRep { dim, rows: out }
}

/// Canonicalization for facet rows produced by double description over a
/// known-nonempty generator set. Implicit equalities are detected by
/// generator tightness (a row is an equality iff every vertex is tight and
/// every ray orthogonal), and the facet rows are irredundant by construction,
/// so no LP runs here. The output coincides with [`canonical_hrep`].
fn canonical_from_facet_rows(
    dim: usize,
    rows: Vec<(Vec<Rat>, Rat)>,
    vertices: &[Vec<Rat>],
    rays: &[Vec<Rat>],
) -> HRep {
    let mut eq_aug: Vec<Vec<Rat>> = Vec::new();
    let mut ineqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (a, b) in rows {
        if is_zero_vec(&a) {
            continue;
        }
        let tight = vertices.iter().all(|v| dot(&a, v) == b)
            && rays.iter().all(|r| dot(&a, r).is_zero());
        if tight {
            let mut aug = a;
            aug.push(b);
            eq_aug.push(aug);
        } else {
            ineqs.push((a, b));
        }
    }
    let (eq_rref, pivots) = rref(&eq_aug);
    debug_assert!(pivots.iter().all(|&p| p < dim), "nonempty set");

    let mut reduced: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (a, b) in ineqs {
        let mut aug = a;
        aug.push(b);
        let aug = primitive(&reduce_mod_rowspace(&aug, &eq_rref, &pivots));
        let (a_part, b_part) = aug.split_at(dim);
        if is_zero_vec(a_part) {
            continue;
        }
        reduced.push((a_part.to_vec(), b_part[0].clone()));
    }
    reduced.sort_by(|(a1, b1), (a2, b2)| lex_cmp(a1, a2).then(b1.cmp(b2)).reverse());
    reduced.dedup_by(|next, kept| next.0 == kept.0);

    let mut out: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for aug in &eq_rref {
        let aug = primitive(aug);
        let (a, b) = aug.split_at(dim);
        out.push((a.to_vec(), b[0].clone()));
        out.push((neg_vec(a), -&b[0]));
    }
    out.extend(reduced);
    out.sort_by(|(a1, b1), (a2, b2)| lex_cmp(a1, a2).then(b1.cmp(b2)));
    HRep { dim, rows: out }
}

/// Cheap row cleanup between elimination steps: primitive scaling, duplicate
/// normals collapsed to their strongest bound, trivially-true rows dropped.
fn syntactic_prune(rows: Vec<(Vec<Rat>, Rat)>) -> Vec<(Vec<Rat>, Rat)> {
    let mut cleaned: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (a, b) in rows {
        if is_zero_vec(&a) {
            if b.is_positive() {
                // keep a single infeasibility marker; final canonicalization
                // resolves it
                return vec![(a, Rat::one())];
            }
            continue;
        }
        // scale so the normal is primitive integer; the bound follows along
        let prim = primitive(&a);
        let pivot = a.iter().position(|x| !x.is_zero()).expect("nonzero");
        let factor = &prim[pivot] / &a[pivot];
        cleaned.push((prim, &b * factor));
    }
    cleaned.sort_by(|(a1, b1), (a2, b2)| lex_cmp(a1, a2).then(b1.cmp(b2)).reverse());
    cleaned.dedup_by(|next, kept| next.0 == kept.0);
    cleaned
}

fn eliminate_column(rows: Vec<(Vec<Rat>, Rat)>, col: usize) -> Vec<(Vec<Rat>, Rat)> {
    let strip = |a: &[Rat]| -> Vec<Rat> {
        a.iter()
            .enumerate()
            .filter(|(j, _)| *j != col)
            .map(|(_, x)| x.clone())
            .collect()
    };
    let mut out = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (a, b) in &rows {
        match a[col].cmp(&Rat::zero()) {
            std::cmp::Ordering::Equal => out.push((strip(a), b.clone())),
            std::cmp::Ordering::Greater => pos.push((a.clone(), b.clone())),
            std::cmp::Ordering::Less => neg.push((a.clone(), b.clone())),
        }
    }
    for (ap, bp) in &pos {
        for (an, bn) in &neg {
            // |an[col]|·(ap,bp) + ap[col]·(an,bn): the eliminated coefficient cancels
            let cp = &ap[col];
            let cn = -&an[col];
            let a: Vec<Rat> = ap
                .iter()
                .zip(an)
                .map(|(x, y)| &cn * x + cp * y)
                .collect();
            let b = &cn * bp + cp * bn;
            out.push((strip(&a), b));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// dual representation
// ---------------------------------------------------------------------------

fn hrep_to_vrep(hrep: &HRep) -> VRep {
    let dim = hrep.dim;
    if hrep.is_empty_marker() {
        return VRep {
            dim,
            vertices: vec![],
            rays: vec![],
        };
    }
    // Homogenize: {(v, t) : A v - b t ≥ 0, t ≥ 0}
    let mut cone_rows: Vec<Vec<Rat>> = Vec::new();
    for (a, b) in &hrep.rows {
        let mut row = a.clone();
        row.push(-b);
        cone_rows.push(row);
    }
    let mut t_row = zeros(dim + 1);
    t_row[dim] = Rat::one();
    cone_rows.push(t_row);

    let gens = dd::dd_cone(dim + 1, &cone_rows);
    let mut vertices: Vec<Vec<Rat>> = Vec::new();
    let mut rays: Vec<Vec<Rat>> = Vec::new();
    for g in &gens.rays {
        let t = &g[dim];
        if t.is_positive() {
            vertices.push(g[..dim].iter().map(|x| x / t).collect());
        } else {
            debug_assert!(t.is_zero(), "t ≥ 0 is a cone constraint");
            rays.push(primitive(&g[..dim]));
        }
    }
    for l in &gens.lineality {
        debug_assert!(l[dim].is_zero(), "lineality is orthogonal to t ≥ 0");
        rays.push(primitive(&l[..dim]));
        rays.push(primitive(&neg_vec(&l[..dim])));
    }
    if vertices.is_empty() {
        // No generator pierces t = 1: the set is empty.
        return VRep {
            dim,
            vertices: vec![],
            rays: vec![],
        };
    }
    prune_generators(dim, &mut vertices, &mut rays);
    vertices.sort_by(|a, b| lex_cmp(a, b));
    rays.sort_by(|a, b| lex_cmp(a, b));
    VRep {
        dim,
        vertices,
        rays,
    }
}

/// Remove generators expressible by the others (one LP per generator).
fn prune_generators(dim: usize, vertices: &mut Vec<Vec<Rat>>, rays: &mut Vec<Vec<Rat>>) {
    rays.sort_by(|a, b| lex_cmp(a, b));
    rays.dedup();
    vertices.sort_by(|a, b| lex_cmp(a, b));
    vertices.dedup();
    // Rays first: r ∈ cone(other rays)?
    let mut i = 0;
    while i < rays.len() {
        let others: Vec<Vec<Rat>> = rays
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, r)| r.clone())
            .collect();
        if in_cone(dim, &rays[i], &others) {
            rays.remove(i);
        } else {
            i += 1;
        }
    }
    // Vertices: v ∈ conv(other vertices) + cone(rays)?
    let mut i = 0;
    while i < vertices.len() {
        if vertices.len() == 1 {
            break;
        }
        let others: Vec<Vec<Rat>> = vertices
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.clone())
            .collect();
        if in_hull(dim, &vertices[i], &others, rays) {
            vertices.remove(i);
        } else {
            i += 1;
        }
    }
}

fn in_cone(dim: usize, target: &[Rat], rays: &[Vec<Rat>]) -> bool {
    if rays.is_empty() {
        return is_zero_vec(target);
    }
    let n = rays.len();
    let mut sys = Vec::new();
    for c in 0..dim {
        let a: Vec<Rat> = rays.iter().map(|r| r[c].clone()).collect();
        sys.push(Constraint::eq(a, target[c].clone()));
    }
    for k in 0..n {
        let mut a = zeros(n);
        a[k] = Rat::one();
        sys.push(Constraint::ge(a, Rat::zero()));
    }
    lp::feasible_point(&sys, n).is_some()
}

fn in_hull(dim: usize, target: &[Rat], vertices: &[Vec<Rat>], rays: &[Vec<Rat>]) -> bool {
    if vertices.is_empty() {
        return false;
    }
    let nv = vertices.len();
    let nr = rays.len();
    let n = nv + nr;
    let mut sys = Vec::new();
    for c in 0..dim {
        let mut a: Vec<Rat> = vertices.iter().map(|v| v[c].clone()).collect();
        a.extend(rays.iter().map(|r| r[c].clone()));
        sys.push(Constraint::eq(a, target[c].clone()));
    }
    let mut simplex_row = vec![Rat::one(); nv];
    simplex_row.extend(zeros(nr));
    sys.push(Constraint::eq(simplex_row, Rat::one()));
    for k in 0..n {
        let mut a = zeros(n);
        a[k] = Rat::one();
        sys.push(Constraint::ge(a, Rat::zero()));
    }
    lp::feasible_point(&sys, n).is_some()
}

/// Facet rows of `conv(vertices) + cone(rays)` via double description on the
/// cone of valid inequalities.
fn generators_to_rows(
    dim: usize,
    vertices: &[Vec<Rat>],
    rays: &[Vec<Rat>],
) -> Vec<(Vec<Rat>, Rat)> {
    if vertices.is_empty() {
        return vec![(zeros(dim), Rat::one())];
    }
    // {(a, β) : a·v + β ≥ 0 ∀v; a·r ≥ 0 ∀r}
    let mut cone_rows: Vec<Vec<Rat>> = Vec::new();
    for v in vertices {
        let mut row = v.clone();
        row.push(Rat::one());
        cone_rows.push(row);
    }
    for r in rays {
        let mut row = r.clone();
        row.push(Rat::zero());
        cone_rows.push(row);
    }
    let gens = dd::dd_cone(dim + 1, &cone_rows);
    let mut rows = Vec::new();
    for g in &gens.rays {
        let (a, beta) = g.split_at(dim);
        if is_zero_vec(a) {
            continue;
        }
        rows.push((a.to_vec(), -&beta[0]));
    }
    for l in &gens.lineality {
        let (a, beta) = l.split_at(dim);
        if is_zero_vec(a) {
            continue;
        }
        rows.push((a.to_vec(), -&beta[0]));
        rows.push((neg_vec(a), beta[0].clone()));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xreal::rat;

    fn r(n: i64) -> Rat {
        rat(n, 1)
    }

    fn orthant2() -> Polyhedron {
        Polyhedron::from_hrep(
            2,
            vec![
                (vec![r(1), r(0)], r(0)),
                (vec![r(0), r(1)], r(0)),
            ],
        )
    }

    #[test]
    fn to_vrep_orthant() {
        let p = orthant2();
        let v = p.vrep();
        assert_eq!(v.vertices, vec![vec![r(0), r(0)]]);
        assert_eq!(v.rays.len(), 2);
        assert!(v.rays.contains(&vec![r(1), r(0)]));
        assert!(v.rays.contains(&vec![r(0), r(1)]));
    }

    #[test]
    fn to_hrep_from_generators() {
        // vertices {(0,1),(1,0)}, rays {(1,0),(0,1)} → {x ≥ 0, y ≥ 0, x+y ≥ 1}
        let p = Polyhedron::from_generators(
            2,
            &[vec![r(0), r(1)], vec![r(1), r(0)]],
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
        );
        let q = Polyhedron::from_hrep(
            2,
            vec![
                (vec![r(1), r(0)], r(0)),
                (vec![r(0), r(1)], r(0)),
                (vec![r(1), r(1)], r(1)),
            ],
        );
        // containment both directions (LP oracle), then canonical equality
        assert!(p.contains_poly(&q) && q.contains_poly(&p));
        assert!(p.equal(&q));
    }

    #[test]
    fn infeasible_is_empty() {
        let p = Polyhedron::from_hrep(1, vec![(vec![r(1)], r(1)), (vec![r(-1)], r(0))]);
        assert!(p.is_empty());
        assert!(p.vrep().is_empty());
    }

    #[test]
    fn project_epigraph_to_domain() {
        // {z ≥ x, z ≥ -x} in (x,z): projection to x is the whole line
        let p = Polyhedron::from_hrep(
            2,
            vec![
                (vec![r(-1), r(1)], r(0)),
                (vec![r(1), r(1)], r(0)),
            ],
        );
        let px = p.project(&[0]).unwrap();
        assert!(px.is_whole_space());
    }

    #[test]
    fn project_segment() {
        // {0 ≤ x ≤ 1, z = x} → {0 ≤ z ≤ 1}
        let p = Polyhedron::from_hrep(
            2,
            vec![
                (vec![r(1), r(0)], r(0)),
                (vec![r(-1), r(0)], r(-1)),
                (vec![r(1), r(-1)], r(0)),
                (vec![r(-1), r(1)], r(0)),
            ],
        );
        let pz = p.project(&[1]).unwrap();
        let expected =
            Polyhedron::from_hrep(1, vec![(vec![r(1)], r(0)), (vec![r(-1)], r(-1))]);
        assert!(pz.equal(&expected));
    }

    #[test]
    fn project_cube_matches_vertex_hull() {
        // unit cube in 3D onto first two coordinates = unit square; the oracle
        // projects generators and re-hulls.
        let mut rows = Vec::new();
        for i in 0..3 {
            let mut a = zeros(3);
            a[i] = r(1);
            rows.push((a.clone(), r(0)));
            rows.push((neg_vec(&a), r(-1)));
        }
        let cube = Polyhedron::from_hrep(3, rows);
        let square = cube.project(&[0, 1]).unwrap();
        let images: Vec<Vec<Rat>> = cube
            .vrep()
            .vertices
            .iter()
            .map(|v| v[..2].to_vec())
            .collect();
        let hull = Polyhedron::from_generators(2, &images, &[]);
        assert!(square.equal(&hull));
    }

    #[test]
    fn support_values() {
        let mut rows = Vec::new();
        for i in 0..2 {
            let mut a = zeros(2);
            a[i] = r(1);
            rows.push((a.clone(), r(-1)));
            rows.push((neg_vec(&a), r(-1)));
        }
        let box2 = Polyhedron::from_hrep(2, rows);
        assert_eq!(box2.support(&[r(1), r(1)]), XReal::from_int(2));
        assert_eq!(Polyhedron::empty(2).support(&[r(1), r(0)]), XReal::NegInf);
        // {(1,2)} + Q²₊ in direction (0,-1) → -2
        let shifted = Polyhedron::from_generators(
            2,
            &[vec![r(1), r(2)]],
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
        );
        assert_eq!(shifted.support(&[r(0), r(-1)]), XReal::from_int(-2));
    }

    #[test]
    fn minkowski_and_hull_union() {
        let shifted = Polyhedron::from_generators(
            2,
            &[vec![r(1), r(2)]],
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
        );
        // + upper half-plane {z₂ ≥ 0} → {z₂ ≥ 2}
        let half = Polyhedron::from_hrep(2, vec![(vec![r(0), r(1)], r(0))]);
        let sum = shifted.minkowski_sum(&half).unwrap();
        let expected = Polyhedron::from_hrep(2, vec![(vec![r(0), r(1)], r(2))]);
        assert!(sum.equal(&expected));

        assert!(shifted
            .minkowski_sum(&Polyhedron::empty(2))
            .unwrap()
            .is_empty());

        let a = Polyhedron::from_generators(2, &[vec![r(0), r(1)]], &[vec![r(1), r(0)], vec![r(0), r(1)]]);
        let b = Polyhedron::from_generators(2, &[vec![r(1), r(0)]], &[vec![r(1), r(0)], vec![r(0), r(1)]]);
        let u = a.hull_union(&b).unwrap();
        let expected = Polyhedron::from_hrep(
            2,
            vec![
                (vec![r(1), r(0)], r(0)),
                (vec![r(0), r(1)], r(0)),
                (vec![r(1), r(1)], r(1)),
            ],
        );
        assert!(u.equal(&expected));
    }

    #[test]
    fn containment_and_equality() {
        let orthant = orthant2();
        let shifted = Polyhedron::from_generators(
            2,
            &[vec![r(1), r(1)]],
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
        );
        assert!(orthant.contains_poly(&shifted));
        assert!(!shifted.contains_poly(&orthant));
        let doubled = Polyhedron::from_hrep(
            1,
            vec![(vec![r(1)], r(0)), (vec![r(2)], r(0))],
        );
        let single = Polyhedron::from_hrep(1, vec![(vec![r(1)], r(0))]);
        assert!(doubled.equal(&single));
    }

    #[test]
    fn polar_cones() {
        let orthant = Cone::from_rays(2, &[vec![r(1), r(0)], vec![r(0), r(1)]]).unwrap();
        let polar = orthant.polar();
        let mut gens = polar.generators().to_vec();
        gens.sort_by(|a, b| lex_cmp(a, b));
        assert_eq!(gens, vec![vec![r(-1), r(0)], vec![r(0), r(-1)]]);

        let origin = Cone::origin(2);
        assert!(origin.polar().as_polyhedron().is_whole_space());

        // polar of the ray (1,1) is the halfplane z₁ + z₂ ≤ 0
        let ray = Cone::from_rays(2, &[vec![r(1), r(1)]]).unwrap();
        let polar = ray.polar();
        let expected = Polyhedron::from_hrep(2, vec![(vec![r(-1), r(-1)], r(0))]);
        assert!(polar.as_polyhedron().equal(&expected));
        // definition check on generators
        for g in ray.generators() {
            for p in polar.generators() {
                assert!(!dot(g, p).is_positive());
            }
        }
        // involution on closed cones
        assert!(polar
            .polar()
            .as_polyhedron()
            .equal(ray.as_polyhedron()));
        let back = orthant.polar().polar();
        assert!(back.as_polyhedron().equal(orthant.as_polyhedron()));
    }

    fn orthant2_cone() -> Cone {
        Cone::from_rays(2, &[vec![r(1), r(0)], vec![r(0), r(1)]]).unwrap()
    }

    #[test]
    fn recession_checks() {
        let orthant_cone = orthant2_cone();
        let shifted = Polyhedron::from_generators(
            2,
            &[vec![r(1), r(2)]],
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
        );
        assert!(shifted.recession_contains(&orthant_cone));
        let mut rows = Vec::new();
        for i in 0..2 {
            let mut a = zeros(2);
            a[i] = r(1);
            rows.push((a.clone(), r(0)));
            rows.push((neg_vec(&a), r(-1)));
        }
        let square = Polyhedron::from_hrep(2, rows);
        assert!(!square.recession_contains(&orthant_cone));
        assert!(Polyhedron::empty(2).recession_contains(&orthant_cone));
    }

    #[test]
    fn star_difference_translation() {
        let a = Polyhedron::from_generators(
            2,
            &[vec![r(1), r(2)]],
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
        );
        let b = Polyhedron::from_generators(
            2,
            &[vec![r(0), r(1)]],
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
        );
        let d = a.star_difference(&b).unwrap();
        let expected = Polyhedron::from_generators(
            2,
            &[vec![r(1), r(1)]],
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
        );
        assert!(d.equal(&expected));
        // A ⊖ ∅ = Z
        assert!(a
            .star_difference(&Polyhedron::empty(2))
            .unwrap()
            .is_whole_space());
    }

    #[test]
    fn whole_space_round_trip() {
        let p = Polyhedron::whole_space(2);
        let v = p.vrep();
        assert_eq!(v.vertices.len(), 1);
        assert_eq!(v.rays.len(), 4);
        let q = Polyhedron::from_generators(2, &v.vertices, &v.rays);
        assert!(p.equal(&q));
    }

    #[test]
    fn json_round_trip() {
        let p = Polyhedron::from_generators(
            2,
            &[vec![r(0), r(1)], vec![r(1), r(0)]],
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
        );
        let s = serde_json::to_string(&p).unwrap();
        let q: Polyhedron = serde_json::from_str(&s).unwrap();
        assert!(p.equal(&q));
    }
}
