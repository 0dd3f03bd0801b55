//! Property tests for the kernel invariants: representation round trips,
//! support arithmetic, lattice laws, residual adjunction, and the scalar
//! conjugation calculus on randomized small instances.

use proptest::prelude::*;

use svconvex::linalg::LinMap;
use svconvex::polyhedra::Polyhedron;
use svconvex::scalar_fn::ScalarFn;
use svconvex::upperset_fn::{OrderedSpace, SetFn, UpperSet};
use svconvex::xreal::{inf_add, rat, sup_add, Rat, XReal};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=2).prop_map(|(n, d)| rat(n, d))
}

fn point(dim: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec(small_rat(), dim)
}

/// Random polyhedron from an H-rep with a handful of rows.
fn hrep_poly(dim: usize) -> impl Strategy<Value = Polyhedron> {
    prop::collection::vec((point(dim), small_rat()), 1..=6)
        .prop_map(move |rows| Polyhedron::from_hrep(dim, rows))
}

/// Random polyhedron from generators (always nonempty).
fn vrep_poly(dim: usize) -> impl Strategy<Value = Polyhedron> {
    (
        prop::collection::vec(point(dim), 1..=4),
        prop::collection::vec(point(dim), 0..=2),
    )
        .prop_map(move |(vs, rs)| Polyhedron::from_generators(dim, &vs, &rs))
}

fn any_poly(dim: usize) -> impl Strategy<Value = Polyhedron> {
    prop_oneof![hrep_poly(dim), vrep_poly(dim)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip_preserves_set(p in any_poly(3)) {
        let v = p.vrep().clone();
        let q = Polyhedron::from_generators(3, &v.vertices, &v.rays);
        prop_assert!(p.equal(&q));
    }

    #[test]
    fn round_trip_dim4(p in hrep_poly(4)) {
        let v = p.vrep().clone();
        let q = Polyhedron::from_generators(4, &v.vertices, &v.rays);
        prop_assert!(p.equal(&q));
    }

    #[test]
    fn support_adds_over_minkowski(p in vrep_poly(2), q in vrep_poly(2), w in point(2)) {
        let sum = p.minkowski_sum(&q).unwrap();
        let lhs = sum.support(&w);
        let rhs = inf_add(&p.support(&w), &q.support(&w));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn empty_support_is_neg_inf(w in point(3)) {
        prop_assert_eq!(Polyhedron::empty(3).support(&w), XReal::NegInf);
    }

    #[test]
    fn hull_union_is_join_intersect_is_meet(p in any_poly(2), q in any_poly(2)) {
        let join = p.hull_union(&q).unwrap();
        prop_assert!(join.contains_poly(&p));
        prop_assert!(join.contains_poly(&q));
        let meet = p.intersect(&q).unwrap();
        prop_assert!(p.contains_poly(&meet));
        prop_assert!(q.contains_poly(&meet));
    }

    #[test]
    fn projection_commutes_with_generator_image(p in vrep_poly(3)) {
        let proj = p.project(&[0, 1]).unwrap();
        let v = p.vrep();
        let vs: Vec<Vec<Rat>> = v.vertices.iter().map(|x| x[..2].to_vec()).collect();
        let rs: Vec<Vec<Rat>> = v.rays.iter().map(|x| x[..2].to_vec()).collect();
        let hull = Polyhedron::from_generators(2, &vs, &rs);
        prop_assert!(proj.equal(&hull));
    }

    #[test]
    fn residual_adjunction(a in vrep_poly(2), b in vrep_poly(2), z in point(2)) {
        // z ∈ A ⊖ B  ⇔  B + {z} ⊆ A
        let res = a.star_difference(&b).unwrap();
        let shifted = b.minkowski_sum(&Polyhedron::singleton(z.clone())).unwrap();
        prop_assert_eq!(res.contains_point(&z), a.contains_poly(&shifted));
    }

    #[test]
    fn fenchel_young(pieces in prop::collection::vec((point(1), small_rat()), 1..=3),
                     x in small_rat(), xs in small_rat()) {
        let g = ScalarFn::from_max_affine(1, &pieces);
        let conj = g.conjugate();
        let lhs = inf_add(&g.eval(&[x.clone()]), &conj.eval(&[xs.clone()]));
        let rhs = XReal::Finite(&x * &xs);
        prop_assert!(lhs >= rhs);
    }

    #[test]
    fn biconjugation_fixed_point(pieces in prop::collection::vec((point(2), small_rat()), 1..=3)) {
        // max-affine functions are proper closed convex: g** = g
        let g = ScalarFn::from_max_affine(2, &pieces);
        prop_assert!(g.biconjugate().equal(&g));
    }

    #[test]
    fn conjugate_of_convolution_is_sup_sum(
        p1 in prop::collection::vec((point(1), small_rat()), 1..=2),
        p2 in prop::collection::vec((point(1), small_rat()), 1..=2),
        xs in small_rat(),
    ) {
        let g = ScalarFn::from_max_affine(1, &p1);
        let f = ScalarFn::from_max_affine(1, &p2);
        let conv = g.inf_convolve(&f).unwrap();
        let lhs = conv.conjugate().eval(&[xs.clone()]);
        let rhs = sup_add(&g.conjugate().eval(&[xs.clone()]), &f.conjugate().eval(&[xs]));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugate_of_pushforward(
        pieces in prop::collection::vec((point(1), small_rat()), 1..=3),
        t00 in -3i64..=3,
        ys in small_rat(),
    ) {
        // (Tg)*(y*) = g*(T*y*)
        let g = ScalarFn::from_max_affine(1, &pieces);
        let t = LinMap::new(vec![vec![rat(t00, 1)]]).unwrap();
        let tg = ScalarFn::pushforward(&t, &g).unwrap();
        let lhs = tg.conjugate().eval(&[ys.clone()]);
        let rhs = g.conjugate().eval(&t.adjoint().apply(&[ys]).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugation_is_antitone(
        p1 in prop::collection::vec((point(1), small_rat()), 1..=3),
        p2 in prop::collection::vec((point(1), small_rat()), 0..=2),
    ) {
        // adding pieces grows the function, so the conjugate shrinks
        let g = ScalarFn::from_max_affine(1, &p1);
        let mut all = p1.clone();
        all.extend(p2);
        let f = ScalarFn::from_max_affine(1, &all);
        prop_assert!(g.le(&f));
        prop_assert!(f.conjugate().le(&g.conjugate()));
    }
}

// -- set-valued invariants --------------------------------------------------

fn space2() -> OrderedSpace {
    OrderedSpace::orthant(2)
}

fn setfn_gen(n: usize) -> impl Strategy<Value = SetFn> {
    prop::collection::vec(point(n + 2), 1..=4).prop_map(move |vs| {
        SetFn::from_generators(n, space2(), &vs, &[]).expect("cone rays appended")
    })
}

fn upper_gen() -> impl Strategy<Value = UpperSet> {
    prop::collection::vec(point(2), 1..=3).prop_map(|vs| {
        UpperSet::closure_of(space2(), &Polyhedron::from_generators(2, &vs, &[])).unwrap()
    })
}

fn dual_dir() -> impl Strategy<Value = Vec<Rat>> {
    // nonzero z* in C⁻ for the componentwise order: both entries ≤ 0
    (0i64..=3, 0i64..=3)
        .prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0)
        .prop_map(|(a, b)| vec![rat(-a, 1), rat(-b, 1)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn upper_residual_adjunction(a in upper_gen(), b in upper_gen(), z in point(2)) {
        let res = a.residual(&b).unwrap();
        let shifted = b
            .body()
            .minkowski_sum(&Polyhedron::singleton(z.clone()))
            .unwrap();
        prop_assert_eq!(
            res.body().contains_point(&z),
            a.body().contains_poly(&shifted)
        );
    }

    #[test]
    fn scalarization_commutes_with_sum(g in setfn_gen(1), f in setfn_gen(1), z in dual_dir()) {
        let sum = g.add(&f).unwrap();
        let lhs = sum.scalarize(&z).unwrap();
        let rhs = g
            .scalarize(&z)
            .unwrap()
            .pointwise_inf_add(&f.scalarize(&z).unwrap())
            .unwrap();
        prop_assert!(lhs.equal(&rhs));
    }

    #[test]
    fn conjugate_ignores_closure(g in setfn_gen(1), z in dual_dir(), xs in small_rat(), r in small_rat()) {
        let bi = g.biconjugate().unwrap();
        let a = g.conjugate(&[xs.clone()], &z, &XReal::Finite(r.clone())).unwrap();
        let b = bi.conjugate(&[xs], &z, &XReal::Finite(r)).unwrap();
        prop_assert!(a.equal(&b));
    }

    #[test]
    fn scalarization_residual_inequality(g in setfn_gen(1), f in setfn_gen(1),
                                         z in dual_dir(), x in small_rat()) {
        // φ_f(x) ⊖ φ_g(x) ≤ φ_{f ⊖ g, z*}(x), with equality when f(x) is the
        // halfspace at its own level
        let xv = vec![x];
        let fs = f.eval_slice(&xv);
        let gs = g.eval_slice(&xv);
        let phi_f = f.scalarize(&z).unwrap().eval(&xv);
        let phi_g = g.scalarize(&z).unwrap().eval(&xv);
        let lhs = svconvex::xreal::idif(&phi_f, &phi_g);
        let residual_slice = fs.residual(&gs).unwrap();
        let rhs = residual_slice.body().support(&z).negate();
        prop_assert!(lhs <= rhs, "lhs = {lhs}, rhs = {rhs}");
    }
}
