use proptest::prelude::*;
use twoproj::dagger::{self, ObliqueProj};
use twoproj::numeric::{self, dist, op_norm, pinv, polar_decompose};
use twoproj::polar::{self, PartialIsometry};
use twoproj::products::{self, Criterion};
use twoproj::random::{self, rng_from_seed};
use twoproj::subspace::{classify_pair, Subspace};
use twoproj::{halmos, Mat, Tol};

fn tol() -> Tol {
    Tol::default()
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: std::env::var("PROPTEST_CASES").ok().and_then(|v| v.parse().ok()).unwrap_or(48),
        ..ProptestConfig::default()
    }
}

fn pair(n: usize, seed: u64) -> (Mat, Mat) {
    let mut rng = rng_from_seed(seed);
    let (m, k) = random::random_projection_pair::<f64>(n, &mut rng);
    (m.projector(), k.projector())
}

fn product(n: usize, seed: u64) -> Mat {
    let (p, q) = pair(n, seed);
    p * q
}

fn dims() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=8, any::<u64>())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn products_are_members((n, seed) in dims()) {
        let t = product(n, seed);
        let crim = products::is_in_x(&t, &tol(), Criterion::Crimmins).unwrap();
        let seb = products::is_in_x(&t, &tol(), Criterion::Sebestyen).unwrap();
        prop_assert!(crim.residual <= 1e-10, "crimmins {:e}", crim.residual);
        prop_assert!(seb.member);
        let pair = products::canonical_factorization(&t, &tol()).unwrap();
        prop_assert!(dist(&pair.product(), &t) <= 1e-10);
        prop_assert!(products::nelson_neumann_check(&t, &tol()).unwrap());
    }

    #[test]
    fn contractions_are_rejected_by_both_criteria((n, seed) in (2usize..=8, any::<u64>())) {
        let g = random::random_contraction::<f64>(n, &mut rng_from_seed(seed));
        let crim = products::is_in_x(&g, &tol(), Criterion::Crimmins).unwrap();
        let seb = products::is_in_x(&g, &tol(), Criterion::Sebestyen).unwrap();
        prop_assert!(!crim.member && crim.residual > 1e-6);
        prop_assert_eq!(crim.member, seb.member);
        prop_assert!(!dagger::greville_check(&g, &tol()).unwrap());
    }

    #[test]
    fn range_and_kernel_are_complementary((n, seed) in dims()) {
        let t = product(n, seed);
        let range = Subspace::range_of(&t, &tol()).unwrap();
        let kernel = Subspace::kernel_of(&t, &tol()).unwrap();
        prop_assert!(range.meet(&kernel, &tol()).unwrap().is_zero());
        prop_assert_eq!(range.join(&kernel, &tol()).unwrap().dim(), n);
    }

    #[test]
    fn gap_is_the_larger_cross_norm((n, seed) in dims()) {
        let (p, q) = pair(n, seed);
        let class = classify_pair(&p, &q, &tol()).unwrap();
        let expect = class.norm_p_iq.max(class.norm_q_ip);
        prop_assert!((class.norm_p_minus_q - expect).abs() <= 1e-10);
        prop_assert!(class.consistent());
    }

    #[test]
    fn canonical_pair_is_strictly_closest((n, seed) in dims()) {
        let t = product(n, seed);
        let can = products::canonical_factorization(&t, &tol()).unwrap();
        if op_norm(&t) > 0.0 {
            prop_assert!(can.gap() < 1.0 - 1e-8);
        }
        let d_can = (&can.p - &can.q) * (&can.p - &can.q);
        for other in products::sample_factorizations(&t, 4, seed, &tol()).unwrap().iter().skip(1) {
            prop_assert!(dist(&other.product(), &t) <= 1e-9);
            prop_assert!(other.gap() >= 1.0 - 1e-8);
            let d = (&other.p - &other.q) * (&other.p - &other.q);
            prop_assert!(numeric::min_eigenvalue(&(d - &d_can)) >= -1e-10);
        }
    }

    #[test]
    fn canonical_gap_from_compression((n, seed) in dims()) {
        let t = product(n, seed);
        let can = products::canonical_factorization(&t, &tol()).unwrap();
        let s = &t * t.adjoint();
        let ps = Subspace::range_of(&s, &tol()).unwrap().projector();
        prop_assert!((can.gap().powi(2) - op_norm(&(ps - &s))).abs() <= 1e-8);
    }

    #[test]
    fn ando_roundtrip((n, seed) in dims()) {
        let (p, q) = pair(n, seed);
        let d = products::ando_extract(&p, &q, &tol()).unwrap();
        let rebuilt = products::ando_build(&d, &tol()).unwrap();
        prop_assert!(dist(&rebuilt, &q) <= 1e-9, "{:e}", dist(&rebuilt, &q));
    }

    #[test]
    fn ando_build_yields_projections((n, seed) in dims()) {
        let d = random::random_ando_data::<f64>(n, &tol(), &mut rng_from_seed(seed)).unwrap();
        let q = products::ando_build(&d, &tol()).unwrap();
        prop_assert!(numeric::projector_residual(&q) <= 1e-9);
        prop_assert!(dist(&(&d.p * &q * &d.p), &d.a) <= 1e-9);
    }

    #[test]
    fn compressions_of_sampled_pairs((n, seed) in dims()) {
        let (p, q) = pair(n, seed);
        let a = products::compression_sqrt(&p, &q, &tol()).unwrap();
        for h in products::sqrt_solutions(&p, &q, 3, seed, &tol()).unwrap() {
            prop_assert!(numeric::projector_residual(&h) <= 1e-9);
            prop_assert!(dist(&(&p * &h * &p), &a) <= 1e-9);
        }
    }

    #[test]
    fn dagger_is_a_bijection((n, seed) in dims()) {
        let t = product(n, seed);
        let e = dagger::dagger_of_product(&t, &tol()).unwrap();
        let scale = e.conditioning.powi(2).max(1.0);
        prop_assert!(dagger::idempotent_residual(&e.e) <= 1e-9 * scale);
        prop_assert!(dist(&pinv(&e.e, &tol()).unwrap(), &t) <= 1e-9);
        prop_assert!(dist(&dagger::product_of_dagger(&e, &tol()).unwrap(), &t) <= 1e-9);
        prop_assert!(dagger::greville_check(&t, &tol()).unwrap());
        let parts = dagger::projection_polar_parts(&e, &tol()).unwrap();
        prop_assert!(parts.max_residual() <= 1e-9 * scale);
    }

    #[test]
    fn oblique_roundtrip((n, seed) in (2usize..=8, any::<u64>())) {
        let mut rng = rng_from_seed(seed);
        let m = random::random_subspace::<f64>(n, &mut rng);
        let k = random::haar_subspace::<f64>(n, n - m.dim(), &mut rng);
        let e = dagger::oblique_projector(&m, &k, &tol()).unwrap();
        let t = dagger::product_of_dagger(&e, &tol()).unwrap();
        prop_assert!(products::is_in_x(&t, &tol(), Criterion::Crimmins).unwrap().member);
        let back = dagger::dagger_of_product(&t, &tol()).unwrap();
        prop_assert!(dist(&back.e, &e.e) <= 1e-9 * e.conditioning.powi(2).max(1.0));
    }

    #[test]
    fn isometric_parts_square_to_the_product((n, seed) in dims()) {
        let t = product(n, seed);
        let v = PartialIsometry::isometric_part(&t, &tol()).unwrap();
        prop_assert!(polar::is_jx(&v, &tol()));
        prop_assert!(dist(&polar::square_map(&v, &tol()).unwrap(), &t) <= 1e-9);
        let kernel = Subspace::kernel_of(&v.v, &tol()).unwrap();
        prop_assert_eq!(v.final_space.join(&kernel, &tol()).unwrap().dim(), n);
        let back = PartialIsometry::isometric_part(&(&v.v * &v.v), &tol()).unwrap();
        prop_assert!(dist(&back.v, &v.v) <= 1e-9);
    }

    #[test]
    fn positive_parts_are_compressions((n, seed) in dims()) {
        let t = product(n, seed);
        let a = polar_decompose(&t, &tol()).unwrap().abs_adj;
        prop_assert!(products::is_in_y(&a, &tol()).unwrap());
    }

    #[test]
    fn fibers_over_compressions((n, seed) in dims()) {
        let mut rng = rng_from_seed(seed);
        let a = random::random_y_member::<f64>(n, &mut rng);
        let u = random::random_fiber_isometry(&a, &tol(), &mut rng).unwrap();
        let t = polar::fiber_build(&a, &u, &tol()).unwrap();
        prop_assert!(products::is_in_x(&t, &tol(), Criterion::Crimmins).unwrap().member);
        let abs_adj = polar_decompose(&t, &tol()).unwrap().abs_adj;
        prop_assert!(dist(&abs_adj, &a) <= 1e-9);
    }

    #[test]
    fn halmos_form_reproduces_the_pair((n, seed) in dims()) {
        let (p, q) = pair(n, seed);
        let h = halmos::halmos_decompose(&p, &q, &tol()).unwrap();
        h.validate(&tol()).unwrap();
        let (pr, qr) = halmos::halmos_reconstruct(&h, &tol()).unwrap();
        prop_assert!(dist(&pr, &p) <= 1e-9 && dist(&qr, &q) <= 1e-9);
        let prods = halmos::halmos_products(&h, &tol()).unwrap();
        prop_assert!(dist(&prods.pq, &(&p * &q)) <= 1e-9);
        prop_assert!(dist(&prods.pqp, &(&p * &q * &p)) <= 1e-9);
        prop_assert!(dist(&prods.p_minus_q, &(&p - &q)) <= 1e-9);
        prop_assert!((halmos::gap_from_form(&h) - dist(&p, &q)).abs() <= 1e-9);
        let (direct, _) = numeric::hermitian_eigen(&(&p * &q * &p));
        for (a, b) in halmos::pqp_spectrum(&h).iter().zip(direct.iter()) {
            prop_assert!((a - b).abs() <= 1e-7);
        }
        let counts = products::spectrum_counts(&(&p * &q), &tol()).unwrap();
        prop_assert_eq!(halmos::spectrum_counts_from_form(&h, &tol()), counts);
    }

    #[test]
    fn friedrichs_angle_duality((n, seed) in dims()) {
        let mut rng = rng_from_seed(seed);
        let m = random::random_subspace::<f64>(n, &mut rng);
        let k = random::random_subspace::<f64>(n, &mut rng);
        let direct = m.friedrichs_cos(&k, &tol()).unwrap();
        let dual = m.complement().friedrichs_cos(&k.complement(), &tol()).unwrap();
        prop_assert!((direct - dual).abs() <= 1e-8, "{} vs {}", direct, dual);
    }

    #[test]
    fn range_identities_below_a_projection((n, seed) in dims()) {
        let (p, a) = random::random_projection_and_contraction::<f64>(n, &mut rng_from_seed(seed));
        prop_assert!(products::range_identities(&p, &a, &tol()).unwrap().hold());
    }

    #[test]
    fn pseudoinverse_identities((n, seed) in dims(), rank_frac in 0.0f64..=1.0) {
        let mut rng = rng_from_seed(seed);
        let r = ((n as f64) * rank_frac).round() as usize;
        let g = random::gaussian::<f64>(n, r, &mut rng) * random::gaussian::<f64>(r, n, &mut rng);
        let x = pinv(&g, &tol()).unwrap();
        let scale = op_norm(&g).max(1.0) * op_norm(&x).max(1.0);
        prop_assert!(numeric::penrose_residual(&g, &x) <= 1e-9 * scale.powi(2));
        prop_assert_eq!(numeric::numerical_rank(&g, &tol()).unwrap(), r);
    }

    #[test]
    fn square_root_of_square((n, seed) in dims()) {
        let b = random::random_psd_unit::<f64>(n, &mut rng_from_seed(seed));
        let root = numeric::positive_sqrt(&(&b * &b), &tol()).unwrap();
        prop_assert!(dist(&root, &b) <= 1e-8);
    }

    #[test]
    fn y_members_have_two_gap_strata((n, seed) in (2usize..=6, any::<u64>())) {
        let s = random::random_y_member::<f64>(n, &mut rng_from_seed(seed));
        let r = products::ys_norms_sampled(&s, 3, seed, &tol()).unwrap();
        prop_assert!(r.two_strata, "{:?}", r);
    }
}

#[test]
fn single_precision_pipeline() {
    let tol = twoproj::Tol32::default();
    let mut rng = rng_from_seed(5);
    for n in 2..6 {
        let (m, k) = random::random_projection_pair::<f32>(n, &mut rng);
        let t: twoproj::Mat32 = m.projector() * k.projector();
        assert!(products::is_in_x(&t, &tol, Criterion::Crimmins).unwrap().member);
        let pair = products::canonical_factorization(&t, &tol).unwrap();
        assert!(dist(&pair.product(), &t) < 1e-4);
    }
}

#[test]
fn oblique_from_matrix_matches_construction() {
    let mut rng = rng_from_seed(17);
    let m = random::haar_subspace::<f64>(5, 2, &mut rng);
    let k = random::haar_subspace::<f64>(5, 3, &mut rng);
    let e = dagger::oblique_projector(&m, &k, &tol()).unwrap();
    let wrapped = ObliqueProj::from_matrix(e.e.clone(), &tol()).unwrap();
    assert!(wrapped.range.approx_eq(&m, &tol()));
    assert!(wrapped.nullspace.approx_eq(&k, &tol()));
    assert!(dist(&(&e.e * &e.e), &e.e) < 1e-10 * e.conditioning.powi(2));
}
