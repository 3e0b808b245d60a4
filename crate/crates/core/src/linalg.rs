//! Dense complex linear algebra: spectra, norms, direct sums, similarity,
//! block evaluation of polynomial matrices and seeded random generators.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{FreePoly, MatrixTuple};

pub type CMatrix = DMatrix<Complex64>;

/// Default relative tolerance for rank, invertibility and spectral tests.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Margin used by [`random_tuple`] so that generated samples satisfy their
/// predicates robustly, not just barely.
pub const GENERATION_MARGIN: f64 = 1e-3;

/// Resampling cap for [`random_tuple`].
pub const GENERATION_ATTEMPTS: usize = 200;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square matrix from row-major entries.
pub fn cmat(n: usize, rows: &[Complex64]) -> CMatrix {
    DMatrix::from_row_slice(n, n, rows)
}

/// Square matrix from real row-major entries.
pub fn rmat(n: usize, rows: &[f64]) -> CMatrix {
    DMatrix::from_row_iterator(n, n, rows.iter().map(|&x| c(x, 0.0)))
}

pub fn diag(values: &[Complex64]) -> CMatrix {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    diag(&values.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
}

pub fn identity(n: usize) -> CMatrix {
    DMatrix::identity(n, n)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest over largest singular value; zero for the zero matrix.
pub fn rcond(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&hi) = s.first() else { return 0 };
    if hi == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * hi).count()
}

/// Invertibility: smallest singular value above `tol` times the largest.
#[allow(non_snake_case)]
pub fn in_I(x: &CMatrix, tol: f64) -> bool {
    rcond(x) > tol
}

/// `sigma(x)` and `sigma(-x)` are disjoint: every `|l_i + l_j|`, including
/// `i = j`, exceeds `tol * (1 + max |l|)`.
#[allow(non_snake_case)]
pub fn in_Q(x: &CMatrix, tol: f64) -> Result<bool> {
    let spec = spectrum(x)?;
    let ev = spec.eigenvalues();
    let scale = 1.0 + spec.spectral_radius();
    for (i, a) in ev.iter().enumerate() {
        for b in &ev[i..] {
            if (a + b).norm() <= tol * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `min |l_i + l_j|` over eigenvalue pairs, including `i = j`.
pub fn min_pair_sum(x: &CMatrix) -> Result<f64> {
    let spec = spectrum(x)?;
    let ev = spec.eigenvalues();
    let mut m = f64::INFINITY;
    for (i, a) in ev.iter().enumerate() {
        for b in &ev[i..] {
            m = m.min((a + b).norm());
        }
    }
    Ok(m)
}

/// Eigenvalues with algebraic multiplicity, sorted by (real, imaginary).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
}

/// A group of nearby eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub center: Complex64,
    pub members: Vec<Complex64>,
}

impl Cluster {
    /// Largest distance from the center to a member.
    pub fn spread(&self) -> f64 {
        self.members.iter().map(|z| (z - self.center).norm()).fold(0.0, f64::max)
    }
}

impl Spectrum {
    pub fn from_eigenvalues(mut eigenvalues: Vec<Complex64>) -> Self {
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Spectrum { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Single-linkage grouping: eigenvalues closer than `gap` (directly or
    /// through a chain) share a cluster. Clusters come back sorted by center.
    pub fn clusters(&self, gap: f64) -> Vec<Cluster> {
        let n = self.eigenvalues.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            let mut j = i;
            while p[j] != r {
                let next = p[j];
                p[j] = r;
                j = next;
            }
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                if (self.eigenvalues[i] - self.eigenvalues[j]).norm() <= gap {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<Complex64>> = Default::default();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(self.eigenvalues[i]);
        }
        let mut out: Vec<Cluster> = groups
            .into_values()
            .map(|members| {
                let center = members.iter().sum::<Complex64>() / members.len() as f64;
                Cluster { center, members }
            })
            .collect();
        out.sort_by(|a, b| a.center.re.total_cmp(&b.center.re).then(a.center.im.total_cmp(&b.center.im)));
        out
    }
}

/// Convergence thresholds tried in turn; exactly repeated eigenvalues can
/// stall the QR iteration just above machine epsilon.
const SCHUR_EPS: [f64; 4] = [f64::EPSILON, 8.0 * f64::EPSILON, 1e-14, 1e-13];

/// Eigenvalues via the complex Schur form.
pub fn spectrum(x: &CMatrix) -> Result<Spectrum> {
    if !x.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix has no spectrum", x.nrows(), x.ncols())));
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let schur = SCHUR_EPS
        .iter()
        .find_map(|&eps| Schur::try_new(x.clone(), eps, 10_000))
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok(Spectrum::from_eigenvalues((0..t.nrows()).map(|i| t[(i, i)]).collect()))
}

/// Block diagonal `a (+) b`.
pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (n1, n2) = (a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(n1 + n2, a.ncols() + b.ncols());
    m.view_mut((0, 0), (n1, a.ncols())).copy_from(a);
    m.view_mut((n1, a.ncols()), (n2, b.ncols())).copy_from(b);
    m
}

/// Componentwise direct sum of two tuples of the same arity.
pub fn direct_sum(x: &MatrixTuple, y: &MatrixTuple) -> Result<MatrixTuple> {
    if x.d() != y.d() {
        return Err(Error::Dimension(format!("direct sum of a {}-tuple and a {}-tuple", x.d(), y.d())));
    }
    MatrixTuple::new(x.mats().iter().zip(y.mats()).map(|(a, b)| block_diag(a, b)).collect())
}

/// Inverse with the relative singularity test of [`in_I`].
pub fn inverse(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let rc = rcond(m);
    if rc <= tol {
        return Err(Error::Precondition(format!("matrix is singular (reciprocal condition {rc:e})")));
    }
    m.clone().try_inverse().ok_or_else(|| Error::Numerical("LU inverse failed".into()))
}

/// Componentwise `s^{-1} x^j s`.
pub fn conjugate(s: &CMatrix, x: &MatrixTuple) -> Result<MatrixTuple> {
    if s.nrows() != x.n() || s.ncols() != x.n() {
        return Err(Error::Dimension("similarity of the wrong size".into()));
    }
    let si = inverse(s, DEFAULT_TOL)?;
    x.map(|m| &si * m * s)
}

pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm(&(a * b - b * a))
}

/// Block matrix `[delta_ij(x)]` of size `(I n) x (J n)`.
pub fn eval_delta(delta: &[Vec<FreePoly>], x: &MatrixTuple) -> Result<CMatrix> {
    let rows = delta.len();
    let cols = delta.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || delta.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("delta must be a non-empty rectangular array".into()));
    }
    let n = x.n();
    let mut out = DMatrix::zeros(rows * n, cols * n);
    for (i, row) in delta.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            out.view_mut((i * n, j * n), (n, n)).copy_from(&p.evaluate(x)?);
        }
    }
    Ok(out)
}

/// Membership in the basic set `{x : ||delta(x)|| < 1}`.
#[allow(non_snake_case)]
pub fn in_B_delta(delta: &[Vec<FreePoly>], x: &MatrixTuple) -> Result<bool> {
    Ok(op_norm(&eval_delta(delta, x)?) < 1.0)
}

fn frob_dot(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(p, q)| p.conj() * q).sum()
}

/// Relative least-squares residual of `y` against `span{I, x, ..., x^{n-1}}`,
/// using a Frobenius-orthonormal Krylov basis.
pub fn alg_residual(x: &CMatrix, y: &CMatrix) -> f64 {
    let n = x.nrows();
    let ynorm = y.norm();
    if ynorm == 0.0 {
        return 0.0;
    }
    let mut basis: Vec<CMatrix> = vec![identity(n) / c((n as f64).sqrt(), 0.0)];
    while basis.len() < n {
        let mut w = x * basis.last().expect("non-empty basis");
        let before = w.norm();
        if before == 0.0 {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let h = frob_dot(b, &w);
                w -= b * h;
            }
        }
        let after = w.norm();
        if after <= 1e-12 * before {
            break;
        }
        basis.push(w / c(after, 0.0));
    }
    let mut r = y.clone();
    for _ in 0..2 {
        for b in &basis {
            let h = frob_dot(b, &r);
            r -= b * h;
        }
    }
    r.norm() / ynorm
}

/// Complex Gaussian entries with unit variance.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Complex Gaussian matrix rescaled to unit operator norm.
pub fn random_unit_norm<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let m = random_complex(rng, n);
    let s = op_norm(&m);
    m / c(s, 0.0)
}

/// `I + g/2` with `||g|| = 1`; condition number at most 3.
pub fn random_similarity<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    identity(n) + random_unit_norm(rng, n) * c(0.5, 0.0)
}

/// Predicates that [`random_tuple`] can enforce. The `V*` constraints refer
/// to `v = (w^1 - w^2)/2` and need `d = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    VInvertible,
    VInQ,
    /// Simple spectrum of `v` (of `x^1` when `d = 1`).
    DistinctEigenvalues,
    UnitNorm,
    /// `v` has distinct nonzero eigenvalues, no two summing to zero, and `u`
    /// has no zero entry in an eigenbasis of `v`.
    GenericU,
}

/// `v = (w^1 - w^2)/2` for a pair.
pub fn half_difference(w: &MatrixTuple) -> Result<CMatrix> {
    if w.d() != 2 {
        return Err(Error::Precondition(format!("expected a pair, got d = {}", w.d())));
    }
    Ok((w.get(0) - w.get(1)) * c(0.5, 0.0))
}

/// `u = (w^1 + w^2)/2` for a pair.
pub fn half_sum(w: &MatrixTuple) -> Result<CMatrix> {
    if w.d() != 2 {
        return Err(Error::Precondition(format!("expected a pair, got d = {}", w.d())));
    }
    Ok((w.get(0) + w.get(1)) * c(0.5, 0.0))
}

fn min_eigen_gap(x: &CMatrix) -> Result<f64> {
    let ev = spectrum(x)?;
    let e = ev.eigenvalues();
    let mut gap = f64::INFINITY;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            gap = gap.min((e[i] - e[j]).norm());
        }
    }
    Ok(gap / (1.0 + ev.spectral_radius()))
}

fn satisfies(w: &MatrixTuple, constraints: &[Constraint]) -> Result<bool> {
    for con in constraints {
        let ok = match con {
            Constraint::VInvertible => rcond(&half_difference(w)?) > GENERATION_MARGIN,
            Constraint::VInQ => in_Q(&half_difference(w)?, GENERATION_MARGIN)?,
            Constraint::DistinctEigenvalues => {
                let m = if w.d() == 1 { w.get(0).clone() } else { half_difference(w)? };
                min_eigen_gap(&m)? > GENERATION_MARGIN
            }
            Constraint::UnitNorm | Constraint::GenericU => true,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn generic_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    // eigenvalues of v: modulus in [0.5, 1.5], pairwise and antipodally separated
    let mu: Vec<Complex64> = loop {
        let cand: Vec<Complex64> = (0..n)
            .map(|_| {
                let r = rng.random_range(0.5..1.5);
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(r, t)
            })
            .collect();
        let ok = (0..n)
            .all(|i| (i..n).all(|j| (cand[i] + cand[j]).norm() > 0.2 && (i == j || (cand[i] - cand[j]).norm() > 0.2)));
        if ok {
            break cand;
        }
    };
    let a = DMatrix::from_fn(n, n, |_, _| loop {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let z = c(re, im);
        if z.norm() > 0.3 {
            break z;
        }
    });
    let p = random_similarity(rng, n);
    let pi = p.clone().try_inverse().expect("similarity with condition <= 3");
    let v = &p * diag(&mu) * &pi;
    let u = &p * a * &pi;
    // stack as [u | v] so the caller can split
    let mut out = DMatrix::zeros(n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(&u);
    out.view_mut((0, n), (n, n)).copy_from(&v);
    out
}

/// Seeded random level-`n` tuple satisfying `constraints`, resampling up to
/// [`GENERATION_ATTEMPTS`] times.
pub fn random_tuple<R: Rng + ?Sized>(
    rng: &mut R,
    level: usize,
    d: usize,
    constraints: &[Constraint],
) -> Result<MatrixTuple> {
    if level == 0 || d == 0 {
        return Err(Error::Dimension("level and d must be positive".into()));
    }
    let needs_pair = constraints.iter().any(|c| {
        matches!(c, Constraint::VInvertible | Constraint::VInQ | Constraint::GenericU)
            || (*c == Constraint::DistinctEigenvalues && d != 1)
    });
    if needs_pair && d != 2 {
        return Err(Error::Precondition(format!("constraints on v need d = 2, got {d}")));
    }
    let unit = constraints.contains(&Constraint::UnitNorm);
    for _ in 0..GENERATION_ATTEMPTS {
        let w = if constraints.contains(&Constraint::GenericU) {
            let uv = generic_pair(rng, level);
            let u = uv.columns(0, level).into_owned();
            let v = uv.columns(level, level).into_owned();
            let mut a = &u + &v;
            let mut b = &u - &v;
            if unit {
                let s = op_norm(&a).max(op_norm(&b));
                a /= c(s, 0.0);
                b /= c(s, 0.0);
            }
            MatrixTuple::pair(a, b)?
        } else {
            MatrixTuple::new(
                (0..d).map(|_| if unit { random_unit_norm(rng, level) } else { random_complex(rng, level) }).collect(),
            )?
        };
        if satisfies(&w, constraints)? {
            return Ok(w);
        }
    }
    Err(Error::Generation {
        what: format!("level {level}, d = {d}, constraints {constraints:?}"),
        attempts: GENERATION_ATTEMPTS,
    })
}

/// JSON form of a matrix tuple: `entries[j][row][col] = [re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TupleJson {
    pub n: usize,
    pub d: usize,
    pub entries: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Json("matrix rows must form a square array".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

impl From<MatrixTuple> for TupleJson {
    fn from(t: MatrixTuple) -> Self {
        TupleJson { n: t.n(), d: t.d(), entries: t.mats().iter().map(matrix_to_rows).collect() }
    }
}

impl TryFrom<TupleJson> for MatrixTuple {
    type Error = Error;

    fn try_from(j: TupleJson) -> Result<Self> {
        if j.entries.len() != j.d {
            return Err(Error::Json(format!("d = {} but {} matrices", j.d, j.entries.len())));
        }
        let mats = j
            .entries
            .iter()
            .map(|rows| {
                if rows.len() != j.n {
                    return Err(Error::Json(format!("n = {} but a matrix has {} rows", j.n, rows.len())));
                }
                matrix_from_rows(rows)
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixTuple::new(mats)
    }
}

pub fn tuple_to_json(t: &MatrixTuple) -> serde_json::Value {
    serde_json::to_value(TupleJson::from(t.clone())).expect("tuple JSON is always representable")
}

pub fn tuple_from_json(text: &str) -> Result<MatrixTuple> {
    let j: TupleJson = serde_json::from_str(text)?;
    MatrixTuple::try_from(j)
}
