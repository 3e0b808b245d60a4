//! Noncommutative Newton-Girard formulae: rational expressions `P_n` in
//! `(alpha, beta, gamma)` with `x^n + y^n = P_n(pi(x, y))` for every integer
//! `n`.

use rand::Rng;

use crate::domains::pi_assignment;
use crate::error::{Error, Result};
use crate::linalg::{self, op_norm, rcond, CMatrix, Constraint, GENERATION_ATTEMPTS, GENERATION_MARGIN};
use crate::ratexpr::{Assignment, LaurentWord, RatExpr};
use crate::symbasis::{gens_of_laurent, uv_word};
use crate::verify::Report;
use crate::words::{FreePoly, MatrixTuple, Word, MAX_CHANGE_OF_VARIABLES_DEGREE};

/// `P_n` and the auxiliary `Q_n` (which equals `v q_n`, `q_n = x^n - y^n`).
#[derive(Clone, Debug)]
pub struct GirardPair {
    pub n: i64,
    pub p: RatExpr,
    pub q: RatExpr,
}

fn vars() -> (RatExpr, RatExpr, RatExpr) {
    (RatExpr::var("alpha"), RatExpr::var("beta"), RatExpr::var("gamma"))
}

/// `P_0 = 2, Q_0 = 0; P_{n+1} = alpha P_n + Q_n, Q_{n+1} = beta P_n + gamma beta^-1 Q_n`.
pub fn girard_positive(n: usize) -> GirardPair {
    let (alpha, beta, gamma) = vars();
    let gb = RatExpr::product(vec![gamma, beta.inv()]);
    let mut p = RatExpr::real(2.0);
    let mut q = RatExpr::zero();
    for _ in 0..n {
        let p_next = &(&alpha * &p) + &q;
        let q_next = &(&beta * &p) + &(&gb * &q);
        p = p_next;
        q = q_next;
    }
    GirardPair { n: n as i64, p, q }
}

/// The four expressions whose invertibility the negative recursion needs:
/// `alpha - beta gamma^-1 beta`, `beta - gamma beta^-1 alpha`,
/// `beta - alpha beta^-1 gamma`, `gamma - beta alpha^-1 beta`.
pub fn negative_domain_expressions() -> [RatExpr; 4] {
    let (a, b, g) = vars();
    let sandwich = |x: &RatExpr, y: &RatExpr, z: &RatExpr| RatExpr::product(vec![x.clone(), y.inv(), z.clone()]);
    [&a - &sandwich(&b, &g, &b), &b - &sandwich(&g, &b, &a), &b - &sandwich(&a, &b, &g), &g - &sandwich(&b, &a, &b)]
}

/// `P_{-n}` for `n >= 1`.
pub fn girard_negative(n: usize) -> Result<GirardPair> {
    if n == 0 {
        return Err(Error::Precondition("girard_negative needs n >= 1".into()));
    }
    let (_, beta, _) = vars();
    let [e1, e2, e3, e4] = negative_domain_expressions();
    let a = e1.inv();
    let b = e2.inv();
    let c = &beta * &e3.inv();
    let d = &beta * &e4.inv();
    let mut p = RatExpr::real(2.0);
    let mut q = RatExpr::zero();
    for _ in 0..n {
        let p_next = &(&a * &p) + &(&b * &q);
        let q_next = &(&c * &p) + &(&d * &q);
        p = p_next;
        q = q_next;
    }
    Ok(GirardPair { n: -(n as i64), p, q })
}

pub fn girard(n: i64) -> GirardPair {
    if n >= 0 {
        girard_positive(n as usize)
    } else {
        girard_negative(n.unsigned_abs() as usize).expect("n >= 1")
    }
}

/// `(p_n, q_n)` directly in `u, v`: `2 (s_even(n), s_odd(n))` for `n >= 0`;
/// for `n < 0` the first column of `T^n (2, 0)` with
/// `T^-1 = [[f, g], [g, f]]`, `f = (u - v u^-1 v)^-1`, `g = (v - u v^-1 u)^-1`.
pub fn girard_via_t(n: i64) -> Result<(RatExpr, RatExpr)> {
    let two = num_complex::Complex64::new(2.0, 0.0);
    if n >= 0 {
        let n = n as usize;
        if n > MAX_CHANGE_OF_VARIABLES_DEGREE {
            return Err(Error::Unsupported(format!("word expansion of degree {n}")));
        }
        return Ok((
            RatExpr::from_poly(&FreePoly::s_even(n)).scale(two),
            RatExpr::from_poly(&FreePoly::s_odd(n)).scale(two),
        ));
    }
    let (u, v) = (RatExpr::var("u"), RatExpr::var("v"));
    let f1 = (&u - &RatExpr::product(vec![v.clone(), u.inv(), v.clone()])).inv();
    let g1 = (&v - &RatExpr::product(vec![u.clone(), v.inv(), u.clone()])).inv();
    let (mut f, mut g) = (f1.clone(), g1.clone());
    for _ in 1..n.unsigned_abs() {
        let f_next = &(&f1 * &f) + &(&g1 * &g);
        let g_next = &(&g1 * &f) + &(&f1 * &g);
        f = f_next;
        g = g_next;
    }
    Ok((f.scale(two), g.scale(two)))
}

/// `2 s_even(n)`, the pi-free polynomial form of `p_n` in `u, v`.
pub fn polynomial_form(n: usize) -> FreePoly {
    FreePoly::s_even(n).scale(num_complex::Complex64::new(2.0, 0.0))
}

fn display_key(w: &LaurentWord) -> (bool, Word, LaurentWord) {
    match gens_of_laurent(w) {
        Some(g) => (false, uv_word(&g), w.clone()),
        None => (true, Word::empty(), w.clone()),
    }
}

/// Text of `P_n`: the expanded Laurent form, ordered by the `(u, v)` word
/// each term stands for, when `P_n` is a Laurent polynomial; otherwise the
/// expression tree.
pub fn format_girard(pair: &GirardPair) -> String {
    match pair.p.expand() {
        Ok(l) => l.format_sorted_by(display_key),
        Err(_) => pair.p.to_string(),
    }
}

fn matrix_power(m: &CMatrix, n: i64) -> Result<CMatrix> {
    let base = if n < 0 { linalg::inverse(m, linalg::DEFAULT_TOL)? } else { m.clone() };
    let mut acc = linalg::identity(m.nrows());
    for _ in 0..n.unsigned_abs() {
        acc = &acc * &base;
    }
    Ok(acc)
}

/// `||x^n + y^n - P_n(pi(w))|| / (1 + ||x^n + y^n||)`.
pub fn girard_residual(n: i64, w: &MatrixTuple) -> Result<f64> {
    if w.d() != 2 {
        return Err(Error::Precondition("expected a pair".into()));
    }
    let lhs = matrix_power(w.get(0), n)? + matrix_power(w.get(1), n)?;
    let rhs = girard(n).p.eval(&pi_assignment(w)?)?;
    Ok(op_norm(&(&lhs - &rhs)) / (1.0 + op_norm(&lhs)))
}

/// Smallest reciprocal condition number among the matrices the recursion
/// for index `n` inverts at `w`.
pub fn admissibility(n: i64, w: &MatrixTuple) -> Result<f64> {
    let a = pi_assignment(w)?;
    let mut worst = rcond(&linalg::half_difference(w)?);
    if n < 0 {
        worst = worst.min(rcond(w.get(0))).min(rcond(w.get(1)));
        for name in ["alpha", "beta", "gamma"] {
            worst = worst.min(rcond(a.get(name).expect("pi assigns all three")));
        }
        for e in negative_domain_expressions() {
            match e.eval(&a) {
                Ok(m) => worst = worst.min(rcond(&m)),
                Err(Error::Singularity { .. }) => return Ok(0.0),
                Err(err) => return Err(err),
            }
        }
    }
    Ok(worst)
}

/// One-check report for `p_n = P_n o pi` at `w`.
pub fn verify_girard(n: i64, w: &MatrixTuple, tol: f64) -> Result<Report> {
    if admissibility(n, w)? <= linalg::DEFAULT_TOL {
        return Err(Error::Domain(format!("sample at level {} is outside the domain of P_{n}", w.n())));
    }
    let r = girard_residual(n, w)?;
    let mut rep = Report::new(None).tolerance("girard", tol);
    rep.push(format!("girard n={n} level={}", w.n()), r <= tol, r, Some(format!("pair at level {}", w.n())));
    Ok(rep)
}

/// Draws a pair at `level` whose recursion inverses all have reciprocal
/// condition above the generation margin.
pub fn sample_admissible<R: Rng + ?Sized>(rng: &mut R, n: i64, level: usize) -> Result<MatrixTuple> {
    for _ in 0..GENERATION_ATTEMPTS {
        let w = linalg::random_tuple(rng, level, 2, &[Constraint::VInvertible])?;
        if admissibility(n, &w)? > GENERATION_MARGIN {
            return Ok(w);
        }
    }
    Err(Error::Domain(format!("no admissible sample for n = {n} at level {level} in {GENERATION_ATTEMPTS} draws")))
}

/// `trials` seeded samples per level.
pub fn verify_girard_random<R: Rng + ?Sized>(
    rng: &mut R,
    n: i64,
    levels: &[usize],
    trials: usize,
    tol: f64,
) -> Result<Report> {
    let mut rep = Report::new(None).tolerance("girard", tol);
    for &level in levels {
        for t in 0..trials {
            let w = sample_admissible(rng, n, level)?;
            let r = girard_residual(n, &w)?;
            rep.push(format!("girard n={n} level={level} trial={t}"), r <= tol, r, Some(format!("trial {t}")));
        }
    }
    Ok(rep)
}

/// `P_n(pi(w))` for a level-1 pair, read as a scalar.
pub fn scalar_value(n: i64, x: f64, y: f64) -> Result<num_complex::Complex64> {
    let w = MatrixTuple::pair(linalg::real_diag(&[x]), linalg::real_diag(&[y]))?;
    Ok(girard(n).p.eval(&pi_assignment(&w)?)?[(0, 0)])
}

/// Assignment of `u, v` from a pair.
pub fn uv_assignment(w: &MatrixTuple) -> Result<Assignment> {
    Assignment::new([("u", linalg::half_sum(w)?), ("v", linalg::half_difference(w)?)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_indices_print_as_tabulated() {
        assert_eq!(format_girard(&girard(0)), "2");
        assert_eq!(format_girard(&girard(1)), "2*alpha");
        assert_eq!(format_girard(&girard(2)), "2*(alpha^2 + beta)");
        assert_eq!(format_girard(&girard(3)), "2*(alpha^3 + alpha*beta + gamma + beta*alpha)");
    }

    #[test]
    fn scalar_anchor_4_2() {
        for n in -3..=6 {
            let expect = 4f64.powi(n as i32) + 2f64.powi(n as i32);
            let got = scalar_value(n, 4.0, 2.0).unwrap();
            assert!((got - c(expect, 0.0)).norm() < 1e-12 * expect.max(1.0), "n = {n}");
        }
        assert!((scalar_value(-1, 4.0, 2.0).unwrap() - c(0.75, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn negative_auxiliary_at_scalar_anchor() {
        let w = MatrixTuple::pair(linalg::real_diag(&[4.0]), linalg::real_diag(&[2.0])).unwrap();
        let q = girard(-1).q.eval(&pi_assignment(&w).unwrap()).unwrap()[(0, 0)];
        assert!((q - c(-0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dag_grows_linearly() {
        let small = girard(10).p.dag_size();
        let big = girard(20).p.dag_size();
        assert!(big < 3 * small, "{small} -> {big}");
    }

    #[test]
    fn via_t_matches_pi_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [-3i64, -1, 0, 2, 5] {
            let w = sample_admissible(&mut rng, n, 3).unwrap();
            let (p, q) = girard_via_t(n).unwrap();
            let a = uv_assignment(&w).unwrap();
            let pair = girard(n);
            let pa = pi_assignment(&w).unwrap();
            let p1 = p.eval(&a).unwrap();
            let p2 = pair.p.eval(&pa).unwrap();
            assert!(op_norm(&(&p1 - &p2)) <= 1e-8 * (1.0 + op_norm(&p1)), "p, n = {n}");
            let vq = a.get("v").unwrap() * q.eval(&a).unwrap();
            let q2 = pair.q.eval(&pa).unwrap();
            assert!(op_norm(&(&vq - &q2)) <= 1e-8 * (1.0 + op_norm(&vq)), "q, n = {n}");
        }
    }

    #[test]
    fn via_t_examples() {
        let (p, q) = girard_via_t(0).unwrap();
        assert_eq!((p.to_string(), q.to_string()), ("2".to_string(), "0".to_string()));
        assert_eq!(girard_via_t(2).unwrap().0.to_string(), "2*(u^2 + v^2)");
        assert_eq!(girard_via_t(-1).unwrap().0.to_string(), "2*inv(u - v*inv(u)*v)");
    }

    #[test]
    fn verify_examples() {
        let w = MatrixTuple::pair(linalg::real_diag(&[4.0]), linalg::real_diag(&[2.0])).unwrap();
        let rep = verify_girard(1, &w, 1e-12).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.max_residual(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert!(verify_girard_random(&mut rng, 4, &[3], 5, 1e-8).unwrap().passed());
        assert!(verify_girard_random(&mut rng, -2, &[2], 5, 1e-7).unwrap().passed());
    }
}
