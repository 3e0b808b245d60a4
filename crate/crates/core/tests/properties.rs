use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ncsym::domains::{self, SimpleSet};
use ncsym::funcalc::{involution_i, matrix_function, sqrt_branch_s, BranchSpec, Germ, ScalarBranch};
use ncsym::linalg::{self, c, diag, identity, op_norm, random_similarity, Constraint};
use ncsym::symbasis;
use ncsym::{parse, sqrtlib, Assignment, CMatrix, Chart, FreePoly, MatrixTuple, RatExpr, Word};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm(&(a - b)) / (1.0 + op_norm(a))
}

fn poly_strategy(d: usize) -> impl Strategy<Value = FreePoly> {
    prop::collection::vec((prop::collection::vec(0..d as u8, 0..5), -4i32..=4, -4i32..=4), 0..6).prop_map(
        move |terms| {
            let mut p = FreePoly::zero(d);
            for (w, re, im) in terms {
                let m = FreePoly::monomial(d, Chart::Standard, Word::new(w), c(re as f64, im as f64));
                p = &p + &m;
            }
            p
        },
    )
}

fn pair(seed: u64, level: usize) -> MatrixTuple {
    linalg::random_tuple(&mut rng(seed), level, 2, &[Constraint::UnitNorm]).unwrap()
}

/// Diagonalizable matrix with eigenvalues near `k` centers of modulus in
/// `[1, 4]`, pairwise at least 1 apart and away from the negative axis;
/// each eigenvalue is within `spread` of its center.
fn clustered(r: &mut ChaCha8Rng, n: usize, k: usize, spread: f64) -> (CMatrix, Vec<Complex64>) {
    let centers = loop {
        let cs: Vec<Complex64> =
            (0..k).map(|_| Complex64::from_polar(r.random_range(1.0..4.0), r.random_range(-2.3..2.3))).collect();
        if domains::separation(&cs) >= 1.0 {
            break cs;
        }
    };
    let eig: Vec<Complex64> = (0..n)
        .map(|i| {
            let z = centers[if i < k { i } else { r.random_range(0..k) }];
            z + Complex64::from_polar(spread * r.random::<f64>(), r.random_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let p = random_similarity(r, n);
    (&p * diag(&eig) * p.clone().try_inverse().unwrap(), centers)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        rng_seed: RngSeed::Fixed(0x6e63_7379),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn tuple_json_round_trip_is_bit_exact(seed in any::<u64>(), level in 1usize..5, d in 1usize..4) {
        let mut r = rng(seed);
        let mats: Vec<CMatrix> = (0..d)
            .map(|_| DMatrix::from_fn(level, level, |_, _| c(r.random::<f64>() * 1e3 - 5e2, r.random::<f64>() * 1e-7)))
            .collect();
        let t = MatrixTuple::new(mats).unwrap();
        let text = serde_json::to_string(&linalg::tuple_to_json(&t)).unwrap();
        let back = linalg::tuple_from_json(&text).unwrap();
        prop_assert!(t.mats().iter().zip(back.mats()).all(|(a, b)| a == b));
    }

    #[test]
    fn polynomial_text_round_trip(p in poly_strategy(2)) {
        let back = parse::parse_poly(&p.to_string(), &["x", "y"], Chart::Standard).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn uv_change_of_variables_round_trip(p in poly_strategy(2)) {
        let back = p.to_uv().unwrap().from_uv().unwrap();
        prop_assert!((&back - &p).max_abs_coeff() <= 1e-12);
    }

    #[test]
    fn symmetry_is_even_v_parity(p in poly_strategy(2)) {
        let (_, odd) = p.to_uv().unwrap().v_parity_split().unwrap();
        prop_assert_eq!(p.is_symmetric().unwrap(), odd.is_zero());
        let s = p.symmetrize().unwrap();
        let (_, odd) = s.to_uv().unwrap().v_parity_split().unwrap();
        prop_assert!(odd.is_zero());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(p in poly_strategy(2), q in poly_strategy(2), seed in any::<u64>(), level in 1usize..4) {
        let x = pair(seed, level);
        let lhs = (&p * &q).evaluate(&x).unwrap();
        let rhs = p.evaluate(&x).unwrap() * q.evaluate(&x).unwrap();
        prop_assert!(rel(&lhs, &rhs) <= 1e-10);
        let sum = (&p + &q).evaluate(&x).unwrap();
        prop_assert!(rel(&sum, &(p.evaluate(&x).unwrap() + q.evaluate(&x).unwrap())) <= 1e-10);
    }

    #[test]
    fn evaluation_respects_similarity_and_direct_sums(p in poly_strategy(2), seed in any::<u64>(), level in 1usize..4) {
        let mut r = rng(seed);
        let x = pair(seed, level);
        let y = pair(seed.wrapping_add(1), 2);
        let s = random_similarity(&mut r, level);
        let xs = linalg::conjugate(&s, &x).unwrap();
        let si = s.clone().try_inverse().unwrap();
        let px = p.evaluate(&x).unwrap();
        prop_assert!(rel(&(&si * &px * &s), &p.evaluate(&xs).unwrap()) <= 1e-8);
        let sum = p.evaluate(&linalg::direct_sum(&x, &y).unwrap()).unwrap();
        let expect = linalg::block_diag(&px, &p.evaluate(&y).unwrap());
        prop_assert!(rel(&expect, &sum) <= 1e-10);
    }

    #[test]
    fn even_part_gives_power_sums(n in 0usize..7, seed in any::<u64>(), level in 1usize..4) {
        let w = pair(seed, level);
        let half = c(0.5, 0.0);
        let uv = MatrixTuple::pair((w.get(0) + w.get(1)) * half, (w.get(0) - w.get(1)) * half).unwrap();
        let s = FreePoly::s_even(n).evaluate(&uv).unwrap() * c(2.0, 0.0);
        let mut xn = identity(level);
        let mut yn = identity(level);
        for _ in 0..n {
            xn = &xn * w.get(0);
            yn = &yn * w.get(1);
        }
        prop_assert!(rel(&(xn + yn), &s) <= 1e-8);
    }

    #[test]
    fn ratexpr_text_round_trip(seed in any::<u64>()) {
        let e = random_expr(&mut rng(seed), 4);
        let back = parse::parse_ratexpr(&e.to_string()).unwrap();
        let a = random_assignment(&mut rng(seed ^ 0x5eed), 3);
        match (e.eval(&a), back.eval(&a)) {
            (Ok(x), Ok(y)) => prop_assert!(rel(&x, &y) <= 1e-9),
            (Err(_), Err(_)) => {}
            (l, r) => prop_assert!(false, "{} vs {}: {:?} / {:?}", e, back, l.is_ok(), r.is_ok()),
        }
    }

    #[test]
    fn ratexpr_eval_respects_direct_sums_and_similarity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = random_expr(&mut r, 3);
        let a = random_assignment(&mut r, 2);
        let b = random_assignment(&mut r, 3);
        let (Ok(ea), Ok(eb)) = (e.eval(&a), e.eval(&b)) else { return Ok(()) };
        let ab = Assignment::new(
            ["alpha", "beta", "gamma"].map(|k| (k, linalg::block_diag(a.get(k).unwrap(), b.get(k).unwrap()))),
        ).unwrap();
        if let Ok(eab) = e.eval(&ab) {
            prop_assert!(rel(&linalg::block_diag(&ea, &eb), &eab) <= 1e-7);
        }
        let s = random_similarity(&mut r, 2);
        let si = s.clone().try_inverse().unwrap();
        let conj = Assignment::new(["alpha", "beta", "gamma"].map(|k| (k, &si * a.get(k).unwrap() * &s))).unwrap();
        if let Ok(ec) = e.eval(&conj) {
            prop_assert!(rel(&(&si * &ea * &s), &ec) <= 1e-7);
        }
    }

    #[test]
    fn ratexpr_level_one_is_scalar_arithmetic(x in 0.5f64..2.0, y in 0.5f64..2.0, z in 0.5f64..2.0) {
        let e = parse::parse_ratexpr("alpha*inv(beta + gamma) - 3*alpha^2*inv(gamma)").unwrap();
        let one = |t: f64| diag(&[c(t, 0.0)]);
        let a = Assignment::new([("alpha", one(x)), ("beta", one(y)), ("gamma", one(z))]).unwrap();
        let got = e.eval(&a).unwrap()[(0, 0)];
        let expect = x / (y + z) - 3.0 * x * x / z;
        prop_assert!((got - c(expect, 0.0)).norm() <= 1e-12 * (1.0 + expect.abs()));
    }

    #[test]
    fn substitution_composes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = random_expr(&mut r, 3);
        let f: HashMap<String, RatExpr> = ["alpha", "beta", "gamma"].iter().map(|k| (k.to_string(), random_expr(&mut r, 2))).collect();
        let g: HashMap<String, RatExpr> = ["alpha", "beta", "gamma"].iter().map(|k| (k.to_string(), random_expr(&mut r, 2))).collect();
        let fg: HashMap<String, RatExpr> = f.iter().map(|(k, v)| (k.clone(), v.substitute(&g))).collect();
        let lhs = e.substitute(&f).substitute(&g);
        let rhs = e.substitute(&fg);
        let a = random_assignment(&mut r, 2);
        match (lhs.eval(&a), rhs.eval(&a)) {
            (Ok(x), Ok(y)) => prop_assert!(rel(&x, &y) <= 1e-8),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "one side singular"),
        }
    }

    #[test]
    fn spectrum_of_direct_sum_is_union(seed in any::<u64>(), n1 in 1usize..4, n2 in 1usize..4) {
        let mut r = rng(seed);
        let (a, b) = (linalg::random_complex(&mut r, n1), linalg::random_complex(&mut r, n2));
        let mut joint: Vec<Complex64> = linalg::spectrum(&a).unwrap().eigenvalues().to_vec();
        joint.extend(linalg::spectrum(&b).unwrap().eigenvalues());
        let ab = linalg::spectrum(&linalg::block_diag(&a, &b)).unwrap();
        for z in ab.eigenvalues() {
            let (i, d) = joint.iter().enumerate().map(|(i, w)| (i, (z - w).norm())).min_by(|p, q| p.1.total_cmp(&q.1)).unwrap();
            prop_assert!(d <= 1e-8 * (1.0 + z.norm()));
            joint.remove(i);
        }
        prop_assert!(joint.is_empty());
    }

    #[test]
    fn op_norm_is_submultiplicative_and_unitarily_invariant(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let (a, b) = (linalg::random_complex(&mut r, n), linalg::random_complex(&mut r, n));
        prop_assert!(op_norm(&(&a * &b)) <= op_norm(&a) * op_norm(&b) * (1.0 + 1e-10));
        let q = linalg::random_complex(&mut r, n).qr().q();
        prop_assert!((op_norm(&(&q * &a * q.adjoint())) - op_norm(&a)).abs() <= 1e-10 * (1.0 + op_norm(&a)));
    }

    #[test]
    fn in_q_implies_invertible(seed in any::<u64>(), n in 1usize..5) {
        let x = linalg::random_complex(&mut rng(seed), n);
        if linalg::in_Q(&x, 1e-10).unwrap() {
            prop_assert!(linalg::in_I(&x, 1e-12));
        }
    }

    #[test]
    fn functional_calculus_is_multiplicative(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let x = linalg::random_unit_norm(&mut r, n);
        let coeffs = |r: &mut ChaCha8Rng| (0..4).map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect::<Vec<_>>();
        let (f, g) = (Germ::Polynomial(coeffs(&mut r)), Germ::Polynomial(coeffs(&mut r)));
        let fg = matrix_function(&x, &ScalarBranch::Entire(Germ::Product(vec![f.clone(), g.clone()]))).unwrap();
        let fx = matrix_function(&x, &ScalarBranch::Entire(f)).unwrap();
        let gx = matrix_function(&x, &ScalarBranch::Entire(g)).unwrap();
        prop_assert!(rel(&fg, &(fx * gx)) <= 1e-9);
    }

    #[test]
    fn every_root_is_in_alg_x_and_commutes(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let k = r.random_range(1..=n.min(3));
        let (x, _) = clustered(&mut r, n, k, 0.0);
        let set = sqrtlib::all_square_roots(&x).unwrap();
        prop_assert_eq!(set.len(), 1 << k);
        for y in &set.roots {
            prop_assert!(linalg::alg_residual(&x, y) <= 1e-8);
            prop_assert!(linalg::commutator_norm(&x, y) <= 1e-8 * op_norm(&x));
        }
    }

    #[test]
    fn enumeration_matches_brute_force_on_distinct_eigenvalues(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let eig: Vec<Complex64> = loop {
            let e: Vec<Complex64> = (0..n).map(|_| Complex64::from_polar(r.random_range(1.0..3.0), r.random_range(-2.5..2.5))).collect();
            if domains::separation(&e) > 0.5 { break e; }
        };
        let p = random_similarity(&mut r, n);
        let pi = p.clone().try_inverse().unwrap();
        let x = &p * diag(&eig) * &pi;
        let set = sqrtlib::all_square_roots(&x).unwrap();
        prop_assert_eq!(set.len(), 1 << n);
        for mask in 0..1u32 << n {
            let d: Vec<Complex64> = eig.iter().enumerate().map(|(i, z)| if mask >> i & 1 == 1 { -z.sqrt() } else { z.sqrt() }).collect();
            let o = &p * diag(&d) * &pi;
            let best = set.roots.iter().map(|y| op_norm(&(y - &o))).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-7 * (1.0 + op_norm(&x)));
        }
    }

    #[test]
    fn subordination_in_some_direction(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (quarter_isolated(&mut r), quarter_isolated(&mut r));
        prop_assert!(a.is_subordinate(&b) || b.is_subordinate(&a));
    }

    #[test]
    fn u_gamma_is_closed_under_sums_with_w_gamma(seed in any::<u64>(), n1 in 1usize..4, n2 in 1usize..4) {
        let mut r = rng(seed);
        let k = r.random_range(1..=n1.min(3));
        let (x1, centers) = clustered(&mut r, n1, k, 0.05);
        let set = SimpleSet::new(centers, 0.2).unwrap();
        let u1 = linalg::random_complex(&mut r, n1);
        prop_assume!(domains::in_U_gamma(&u1, &x1, &set, domains::COMMUTE_TOL).unwrap());
        let eig: Vec<Complex64> = (0..n2)
            .map(|_| set.centers()[r.random_range(0..k)] + Complex64::from_polar(r.random_range(0.0..0.05), r.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let s = random_similarity(&mut r, n2);
        let x2 = &s * diag(&eig) * s.clone().try_inverse().unwrap();
        let u2 = linalg::random_complex(&mut r, n2);
        prop_assert!(domains::in_W_gamma(&u2, &x2, &set).unwrap());
        let (u, x) = (linalg::block_diag(&u1, &u2), linalg::block_diag(&x1, &x2));
        prop_assert!(domains::in_U_gamma(&u, &x, &set, domains::COMMUTE_TOL).unwrap());
    }

    #[test]
    fn pi_of_omega_is_phi(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let k = r.random_range(1..=n.min(3));
        let (x, centers) = clustered(&mut r, n, k, 0.05);
        let tau: Vec<i8> = (0..k).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
        let spec = BranchSpec::from_centers(centers, 0.2, tau).unwrap();
        let u = linalg::random_complex(&mut r, n);
        let w = domains::omega(&u, &x, &spec).unwrap();
        let p = domains::pi(&w).unwrap();
        let f = domains::phi(&u, &x, &spec).unwrap();
        for (a, b) in p.iter().zip(&f) {
            prop_assert!(rel(b, a) <= 1e-9);
        }
    }

    #[test]
    fn decomposition_is_linear(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = ncsym::verify::random_symmetric_poly(&mut r, 5, 4);
        let q = ncsym::verify::random_symmetric_poly(&mut r, 5, 4);
        let lhs = symbasis::decompose_symmetric(&(&p + &q)).unwrap();
        let rhs = symbasis::decompose_symmetric(&p).unwrap().add(&symbasis::decompose_symmetric(&q).unwrap());
        prop_assert_eq!(lhs.expand_back(), rhs.expand_back());
    }
}

fn quarter_isolated(r: &mut ChaCha8Rng) -> SimpleSet {
    loop {
        let k = r.random_range(1..=4);
        let cs: Vec<Complex64> = (0..k).map(|_| c(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0))).collect();
        let cap = (0.25 * domains::separation(&cs)).min(cs.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min));
        if cap.is_finite() && cap > 1e-3 || k == 1 && cap > 1e-3 {
            let set = SimpleSet::new(cs, cap.min(2.0) * r.random_range(0.5..0.999)).unwrap();
            if set.is_quarter_isolated() {
                return set;
            }
        }
    }
}

fn random_expr(r: &mut ChaCha8Rng, depth: usize) -> RatExpr {
    let leaf = |r: &mut ChaCha8Rng| match r.random_range(0..4) {
        0 => RatExpr::var("alpha"),
        1 => RatExpr::var("beta"),
        2 => RatExpr::var("gamma"),
        _ => RatExpr::real(r.random_range(-3..=3) as f64),
    };
    if depth == 0 {
        return leaf(r);
    }
    match r.random_range(0..5) {
        0 => leaf(r),
        1 => random_expr(r, depth - 1) + random_expr(r, depth - 1),
        2 => random_expr(r, depth - 1) * random_expr(r, depth - 1),
        3 => random_expr(r, depth - 1) - random_expr(r, depth - 1),
        _ => random_expr(r, depth - 1).inv(),
    }
}

fn random_assignment(r: &mut ChaCha8Rng, n: usize) -> Assignment {
    Assignment::new(["alpha", "beta", "gamma"].map(|k| (k, linalg::random_unit_norm(r, n)))).unwrap()
}

#[test]
fn branch_squares_and_involutions_across_sizes() {
    let mut r = rng(404);
    for n in [2usize, 3, 4, 6] {
        for _ in 0..100 {
            let k = r.random_range(1..=n.min(4));
            let (x, centers) = clustered(&mut r, n, k, 0.05);
            let tau: Vec<i8> = (0..k).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
            let spec = BranchSpec::from_centers(centers, 0.2, tau).unwrap();
            let s = sqrt_branch_s(&x, &spec).unwrap();
            let i = involution_i(&x, &spec).unwrap();
            assert!(rel(&x, &(&s * &s)) <= 1e-8, "S^2 = x at n = {n}");
            assert!(rel(&identity(n), &(&i * &i)) <= 1e-8, "I^2 = I at n = {n}");
            assert!(linalg::alg_residual(&x, &s) <= 1e-8);
            assert!(linalg::alg_residual(&x, &i) <= 1e-8);
        }
    }
}

#[test]
fn zero_polynomial_has_degree_minus_one() {
    assert_eq!(FreePoly::zero(2).degree(), -1);
    let p = &FreePoly::x() - &FreePoly::x();
    assert!(p.is_zero() && p.terms().count() == 0);
}
