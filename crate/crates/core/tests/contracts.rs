use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ncsym::domains;
use ncsym::linalg::{self, c, diag, op_norm, rmat, Constraint};
use ncsym::verify;
use ncsym::{girard, parse, sqrtlib, symbasis, Assignment, CMatrix, Error, MatrixTuple};

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm(&(a - b)) / (1.0 + op_norm(a))
}

#[test]
fn both_generation_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in -4i64..=7 {
        let (p_t, _) = girard::girard_via_t(n).unwrap();
        let p = girard::girard(n).p;
        for level in 1..=3 {
            let w = girard::sample_admissible(&mut rng, n, level).unwrap();
            let via_t = p_t.eval(&girard::uv_assignment(&w).unwrap()).unwrap();
            let via_pi = p.eval(&domains::pi_assignment(&w).unwrap()).unwrap();
            assert!(rel(&via_t, &via_pi) <= 1e-8, "n = {n}, level = {level}");
        }
    }
}

#[test]
fn level_one_collapses_to_classical_newton_girard() {
    for (x, y) in [(4.0, 2.0), (0.5, -1.25), (3.0, 7.0)] {
        let w = MatrixTuple::pair(diag(&[c(x, 0.0)]), diag(&[c(y, 0.0)])).unwrap();
        let a = domains::pi_assignment(&w).unwrap();
        let (e1, e2) = (x + y, x * y);
        let p2 = girard::girard(2).p.eval(&a).unwrap()[(0, 0)];
        assert!((p2 - c(e1 * e1 - 2.0 * e2, 0.0)).norm() <= 1e-12);
        let p3 = girard::girard(3).p.eval(&a).unwrap()[(0, 0)];
        assert!((p3 - c(e1.powi(3) - 3.0 * e1 * e2, 0.0)).norm() <= 1e-12 * (1.0 + e1.abs().powi(3)));
        let pm1 = girard::girard(-1).p.eval(&a).unwrap()[(0, 0)];
        assert!((pm1 - c(e1 / e2, 0.0)).norm() <= 1e-12 * (1.0 + (e1 / e2).abs()));
    }
}

#[test]
fn polynomial_form_matches_recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 0..=8 {
        let poly = girard::polynomial_form(n);
        for level in 2..=3 {
            let w = linalg::random_tuple(&mut rng, level, 2, &[Constraint::VInvertible]).unwrap();
            let half = c(0.5, 0.0);
            let uv = MatrixTuple::pair((w.get(0) + w.get(1)) * half, (w.get(0) - w.get(1)) * half).unwrap();
            let a = poly.evaluate(&uv).unwrap();
            let b = girard::girard(n as i64).p.eval(&domains::pi_assignment(&w).unwrap()).unwrap();
            assert!(rel(&a, &b) <= 1e-8);
        }
    }
}

#[test]
fn hat_domain_contains_direct_sum_closed_sets() {
    let a = MatrixTuple::single(diag(&[c(2.0, 0.0)])).unwrap();
    let aa = linalg::direct_sum(&a, &a).unwrap();
    let aaa = linalg::direct_sum(&aa, &a).unwrap();
    let d = vec![a.clone(), aa.clone(), aaa.clone()];
    let hat = verify::hat_domain(&d).unwrap();
    for x in [&a, &aa] {
        assert!(hat.iter().any(|h| h.max_abs_diff(x) == 0.0));
    }
}

#[test]
fn square_root_maps_are_nc_on_their_domain() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let set = domains::SimpleSet::new(vec![c(1.0, 0.0), c(3.0, 1.0)], 0.3).unwrap();
    let samples: Vec<MatrixTuple> =
        (0..5).map(|i| MatrixTuple::single(verify::sample_in_discs(&mut rng, &set, 1 + i % 3)).unwrap()).collect();
    let spec = ncsym::funcalc::BranchSpec::new(set, vec![-1, 1]).unwrap();
    let f = |x: &MatrixTuple| ncsym::funcalc::sqrt_base(x.get(0), &spec);
    let rep = verify::check_nc_properties(&f, &samples, &mut rng, verify::NC_TOL).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn error_paths() {
    assert!(matches!(parse::parse("x*u"), Err(Error::MixedChart)));
    assert!(matches!(parse::parse("x + * y"), Err(Error::Parse { .. })));
    assert!(matches!(parse::parse_ratexpr("inv(alpha + beta)").unwrap().expand(), Err(Error::NotLaurent(_))));

    let zero = Assignment::new([("alpha", CMatrix::zeros(2, 2))]).unwrap();
    assert!(matches!(parse::parse_ratexpr("inv(alpha)").unwrap().eval(&zero), Err(Error::Singularity { .. })));

    let xy = parse::parse_poly("x*y", &["x", "y"], ncsym::Chart::Standard).unwrap();
    assert!(matches!(symbasis::decompose_symmetric(&xy), Err(Error::NotSymmetric(_))));

    let nil = rmat(2, &[0.0, 1.0, 0.0, 0.0]);
    assert!(matches!(sqrtlib::all_square_roots(&nil), Err(Error::NoSquareRoot)));

    let v = diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
    let w = MatrixTuple::pair(v.clone(), -v).unwrap();
    assert!(matches!(domains::fiber(&w, domains::FIBER_TOL), Err(Error::Unsupported(_))));

    assert_eq!(Error::Parse { pos: 0, msg: String::new() }.exit_code(), 3);
    assert_eq!(Error::NotSymmetric(1).exit_code(), 2);
}

#[test]
fn semisimple_singular_roots_are_flagged_as_extension() {
    let x = diag(&[c(0.0, 0.0), c(4.0, 0.0), c(9.0, 0.0)]);
    let set = sqrtlib::all_square_roots(&x).unwrap();
    assert!(set.extension);
    assert_eq!(set.len(), 4);
    for y in &set.roots {
        assert!(op_norm(&(y * y - &x)) <= 1e-10);
    }
    let json = set.to_json();
    let back = sqrtlib::RootSet::from_json(&json).unwrap();
    assert_eq!(back.len(), 4);
}
