//! The free square root `sqrt(x) = { y in alg(x) : y^2 = x }`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::{separation, SimpleSet};
use crate::error::{Error, Result};
use crate::funcalc::{all_taus, matrix_function, BranchSpec, Germ, ScalarBranch, CLUSTER_GAP_REL, DOMAIN_MARGIN};
use crate::linalg::{in_I, matrix_from_rows, matrix_to_rows, op_norm, singular_values, spectrum, CMatrix};

/// Singular values below this times the largest count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// `sqrt(x)` is nonempty iff `x` has no Jordan block of size 2 or more at
/// eigenvalue 0, i.e. iff `rank x = rank x^2`.
pub fn sqrt_exists(x: &CMatrix, tol: f64) -> bool {
    if x.nrows() == 0 || in_I(x, tol) {
        return true;
    }
    let s1 = singular_values(x);
    let hi = s1[0];
    if hi == 0.0 {
        return true;
    }
    let r1 = s1.iter().filter(|s| **s > tol * hi).count();
    let s2 = singular_values(&(x * x));
    let r2 = s2.iter().filter(|s| **s > tol * hi * hi).count();
    r1 == r2
}

/// All `2^k` square roots of `x` lying in `alg(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub base: CMatrix,
    /// Number of nonzero spectral clusters.
    pub k: usize,
    pub roots: Vec<CMatrix>,
    /// Sign vector that produced each root.
    pub taus: Vec<Vec<i8>>,
    /// `||y^2 - x|| / (1 + ||x||)` per root.
    pub residuals: Vec<f64>,
    /// Set when `x` is singular: the zero eigenspace is sent to 0.
    pub extension: bool,
}

#[derive(Serialize, Deserialize)]
struct RootSetJson {
    base: Vec<Vec<[f64; 2]>>,
    k: usize,
    roots: Vec<Vec<Vec<[f64; 2]>>>,
    taus: Vec<Vec<i8>>,
    residuals: Vec<f64>,
    extension: bool,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RootSetJson {
            base: matrix_to_rows(&self.base),
            k: self.k,
            roots: self.roots.iter().map(matrix_to_rows).collect(),
            taus: self.taus.clone(),
            residuals: self.residuals.clone(),
            extension: self.extension,
        })
        .expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let j: RootSetJson = serde_json::from_value(value.clone())?;
        Ok(RootSet {
            base: matrix_from_rows(&j.base)?,
            k: j.k,
            roots: j.roots.iter().map(|r| matrix_from_rows(r)).collect::<Result<_>>()?,
            taus: j.taus,
            residuals: j.residuals,
            extension: j.extension,
        })
    }
}

fn residual(x: &CMatrix, y: &CMatrix) -> f64 {
    op_norm(&(y * y - x)) / (1.0 + op_norm(x))
}

/// Enumerates `sqrt(x)` with the default clustering gap.
pub fn all_square_roots(x: &CMatrix) -> Result<RootSet> {
    all_square_roots_with_gap(x, None)
}

/// Enumerates `sqrt(x)`: one root per sign vector over the nonzero spectral
/// clusters. For singular `x` with semisimple zero part, the zero cluster
/// gets the zero germ and the result is flagged as an extension.
pub fn all_square_roots_with_gap(x: &CMatrix, gap: Option<f64>) -> Result<RootSet> {
    if !x.is_square() {
        return Err(Error::Dimension("square matrix expected".into()));
    }
    if in_I(x, RANK_TOL) {
        let spec = BranchSpec::from_spectrum(x, gap)?;
        let mut roots = Vec::new();
        let mut taus = Vec::new();
        for tau in all_taus(spec.k()) {
            let y = crate::funcalc::sqrt_branch_s(x, &spec.with_tau(tau.clone())?)?;
            roots.push(y);
            taus.push(tau);
        }
        return Ok(finish(x, spec.k(), roots, taus, false));
    }
    if !sqrt_exists(x, RANK_TOL) {
        return Err(Error::NoSquareRoot);
    }
    let spec = spectrum(x)?;
    let gap = gap.unwrap_or(CLUSTER_GAP_REL * spec.spectral_radius().max(1.0));
    let clusters = spec.clusters(gap);
    let zero = clusters
        .iter()
        .position(|cl| cl.center.norm() <= gap)
        .ok_or_else(|| Error::Clustering("singular matrix without a cluster at 0".into()))?;
    let nonzero: Vec<Complex64> =
        clusters.iter().enumerate().filter(|(i, _)| *i != zero).map(|(_, cl)| cl.center).collect();
    let mut centers = vec![Complex64::new(0.0, 0.0)];
    centers.extend(&nonzero);
    let min_mod = nonzero.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min);
    let r = 0.5 * min_mod.min(0.25 * separation(&centers));
    let r = if r.is_finite() { r } else { gap.max(1.0) };
    for cl in &clusters {
        if cl.spread() >= r * (1.0 - DOMAIN_MARGIN) {
            return Err(Error::Clustering(format!("cluster at {} is too wide", cl.center)));
        }
    }
    let set = SimpleSet::new(centers, r)?;
    let k = nonzero.len();
    let mut roots = Vec::new();
    let mut taus = Vec::new();
    for tau in all_taus(k) {
        let mut germs = vec![Germ::Constant(Complex64::new(0.0, 0.0))];
        germs.extend(nonzero.iter().zip(&tau).map(|(c, t)| Germ::Sqrt { center: *c, sign: *t }));
        let y = matrix_function(x, &ScalarBranch::piecewise(set.clone(), germs)?)?;
        roots.push(y);
        taus.push(tau);
    }
    Ok(finish(x, k, roots, taus, true))
}

fn finish(x: &CMatrix, k: usize, roots: Vec<CMatrix>, taus: Vec<Vec<i8>>, extension: bool) -> RootSet {
    let residuals = roots.iter().map(|y| residual(x, y)).collect();
    RootSet { base: x.clone(), k, roots, taus, residuals, extension }
}

/// Points `(m, n)` of the square-root Riemann surface over `m`.
pub fn riemann_fiber(m: &CMatrix) -> Result<Vec<(CMatrix, CMatrix)>> {
    Ok(all_square_roots(m)?.roots.into_iter().map(|n| (m.clone(), n)).collect())
}

/// `y -> (y^2, y)`.
pub fn sigma_map(y: &CMatrix) -> (CMatrix, CMatrix) {
    (y * y, y.clone())
}

pub fn sigma_inverse(pair: &(CMatrix, CMatrix)) -> CMatrix {
    pair.1.clone()
}
