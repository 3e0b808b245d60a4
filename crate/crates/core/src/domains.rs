//! Simple sets, free-domain predicates, and the maps `pi`, `Phi`, `omega`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcalc::{all_taus, involution_i, sqrt_branch_s, BranchSpec, DOMAIN_MARGIN};
use crate::linalg::{
    commutator_norm, half_difference, half_sum, in_I, in_Q, op_norm, rcond, spectrum, CMatrix, DEFAULT_TOL,
};
use crate::ratexpr::Assignment;
use crate::sqrtlib::all_square_roots;
use crate::words::{FreePoly, MatrixTuple};

/// Relative commutator size below which `u` counts as commuting with an
/// involution.
pub const COMMUTE_TOL: f64 = 1e-8;

/// Relative tolerance for matching `v' u v'` against `v u v` in [`fiber`].
pub const FIBER_TOL: f64 = 1e-7;

/// Finite union of open discs of a common radius around nonzero centers.
#[derive(Clone, Debug, PartialEq)]
pub struct SimpleSet {
    centers: Vec<Complex64>,
    radius: f64,
}

impl SimpleSet {
    pub fn new(centers: Vec<Complex64>, radius: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::Precondition("a simple set needs at least one center".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Precondition(format!("radius must be positive, got {radius}")));
        }
        for (i, a) in centers.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::Precondition("non-finite center".into()));
            }
            if centers[..i].contains(a) {
                return Err(Error::Precondition(format!("repeated center {a}")));
            }
        }
        Ok(SimpleSet { centers, radius })
    }

    pub fn centers(&self) -> &[Complex64] {
        &self.centers
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    /// Smallest distance between distinct centers; infinite for one center.
    pub fn separation(&self) -> f64 {
        separation(&self.centers)
    }

    pub fn is_t_isolated(&self, t: f64) -> bool {
        self.radius < t * self.separation()
    }

    /// Quarter-isolated with zero outside every disc.
    pub fn is_quarter_isolated(&self) -> bool {
        self.is_t_isolated(0.25) && self.radius < min_modulus(&self.centers)
    }

    /// Each disc of `self` meets at most one disc of `other`.
    pub fn is_subordinate(&self, other: &SimpleSet) -> bool {
        self.centers
            .iter()
            .all(|c| other.centers.iter().filter(|d| (*c - **d).norm() < self.radius + other.radius).count() <= 1)
    }

    /// Index of the disc containing `z`, with discs shrunk by `margin * r`.
    pub fn disc_of(&self, z: Complex64, margin: f64) -> Option<usize> {
        let r = self.radius * (1.0 - margin);
        self.centers.iter().position(|c| (z - c).norm() < r)
    }
}

pub fn separation(centers: &[Complex64]) -> f64 {
    let mut s = f64::INFINITY;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            s = s.min((centers[i] - centers[j]).norm());
        }
    }
    s
}

fn min_modulus(centers: &[Complex64]) -> f64 {
    centers.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min)
}

/// `r = min(min |c|, sep / 4) / 2`: keeps zero outside the discs and the set
/// quarter-isolated.
pub fn default_radius(centers: &[Complex64]) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::Precondition("no centers".into()));
    }
    if centers.iter().any(|c| c.norm() == 0.0) {
        return Err(Error::Precondition("0 is a center".into()));
    }
    Ok(0.5 * min_modulus(centers).min(0.25 * separation(centers)))
}

/// `pi(w) = (u, v^2, v u v)` with `u = (w^1 + w^2)/2`, `v = (w^1 - w^2)/2`.
pub fn pi(w: &MatrixTuple) -> Result<[CMatrix; 3]> {
    let u = half_sum(w)?;
    let v = half_difference(w)?;
    let v2 = &v * &v;
    let vuv = &v * &u * &v;
    Ok([u, v2, vuv])
}

/// `pi(w)` as an assignment to `alpha, beta, gamma`.
pub fn pi_assignment(w: &MatrixTuple) -> Result<Assignment> {
    let [a, b, g] = pi(w)?;
    Assignment::new([("alpha", a), ("beta", b), ("gamma", g)])
}

/// `sigma(x)` lies in the discs of `set`, shrunk by the containment margin.
#[allow(non_snake_case)]
pub fn in_D_gamma(x: &CMatrix, set: &SimpleSet) -> Result<bool> {
    Ok(spectrum(x)?.eigenvalues().iter().all(|z| set.disc_of(*z, DOMAIN_MARGIN).is_some()))
}

/// Largest distance from an eigenvalue of `x` to its nearest center, in
/// units of the radius. Below 1 inside the discs.
pub fn disc_distance(x: &CMatrix, set: &SimpleSet) -> Result<f64> {
    Ok(spectrum(x)?
        .eigenvalues()
        .iter()
        .map(|z| set.centers().iter().map(|c| (z - c).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
        / set.radius())
}

/// Same as [`in_D_gamma`]; `u` is unconstrained.
#[allow(non_snake_case)]
pub fn in_W_gamma(_u: &CMatrix, x: &CMatrix, set: &SimpleSet) -> Result<bool> {
    in_D_gamma(x, set)
}

/// `u` fails to commute with `I_{gamma tau}(x)` for every nonconstant sign
/// vector `tau`. Vacuously true for one disc.
#[allow(non_snake_case)]
pub fn in_U_gamma(u: &CMatrix, x: &CMatrix, set: &SimpleSet, tol: f64) -> Result<bool> {
    if !in_D_gamma(x, set)? {
        return Err(Error::SpectrumOutsideDomain("x is not in D_gamma".into()));
    }
    let base = BranchSpec::new(set.clone(), vec![1; set.k()])?;
    let scale = tol * op_norm(u);
    for tau in all_taus(set.k()) {
        let spec = base.with_tau(tau)?;
        if spec.is_constant_tau() {
            continue;
        }
        if commutator_norm(u, &involution_i(x, &spec)?) <= scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `||u I_{gamma tau}(x) - I_{gamma tau}(x) u||`; zero on the variety.
pub fn variety_residual_v(u: &CMatrix, x: &CMatrix, spec: &BranchSpec) -> Result<f64> {
    Ok(commutator_norm(u, &involution_i(x, spec)?))
}

/// `Phi(u, x) = (u, x, S u S)` with `S = S_{gamma tau}(x)`.
pub fn phi(u: &CMatrix, x: &CMatrix, spec: &BranchSpec) -> Result<[CMatrix; 3]> {
    let s = sqrt_branch_s(x, spec)?;
    let sus = &s * u * &s;
    Ok([u.clone(), x.clone(), sus])
}

/// `omega(u, x) = (u + S, u - S)`.
pub fn omega(u: &CMatrix, x: &CMatrix, spec: &BranchSpec) -> Result<MatrixTuple> {
    let s = sqrt_branch_s(x, spec)?;
    MatrixTuple::pair(u + &s, u - &s)
}

/// `(u, x) = ((w^1 + w^2)/2, (w^1 - w^2)^2 / 4)`.
pub fn omega_inverse(w: &MatrixTuple) -> Result<(CMatrix, CMatrix)> {
    let v = half_difference(w)?;
    Ok((half_sum(w)?, &v * &v))
}

/// All pairs with the same `pi` value as `w` among `(u + v', u - v')`, `v'`
/// ranging over the square roots of `v^2`. Generic pairs give `{w, w^f}`.
pub fn fiber(w: &MatrixTuple, tol: f64) -> Result<Vec<MatrixTuple>> {
    let u = half_sum(w)?;
    let v = half_difference(w)?;
    if !in_I(&v, DEFAULT_TOL) {
        return Err(Error::Unsupported("fiber over a pair with singular w^1 - w^2".into()));
    }
    let vuv = &v * &u * &v;
    let bound = tol * (1.0 + op_norm(&vuv));
    let mut out = Vec::new();
    for r in all_square_roots(&(&v * &v))?.roots {
        if op_norm(&(&r * &u * &r - &vuv)) <= bound {
            out.push(MatrixTuple::pair(&u + &r, &u - &r)?);
        }
    }
    Ok(out)
}

/// `v = (w^1 - w^2)/2` has spectrum disjoint from that of `-v`.
#[allow(non_snake_case)]
pub fn in_S_o(w: &MatrixTuple, tol: f64) -> Result<bool> {
    in_Q(&half_difference(w)?, tol)
}

/// Membership of `x` in the free closure of `{p = 0}`: `p(x)` singular.
pub fn in_free_closure_of_variety(p: &FreePoly, x: &CMatrix) -> Result<bool> {
    let px = p.evaluate(&MatrixTuple::single(x.clone())?)?;
    Ok(rcond(&px) <= DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, identity, real_diag, rmat};

    fn set(centers: &[f64], r: f64) -> SimpleSet {
        SimpleSet::new(centers.iter().map(|x| c(*x, 0.0)).collect(), r).unwrap()
    }

    #[test]
    fn isolation_examples() {
        let s = set(&[1.0, 5.0], 0.5);
        assert_eq!(s.separation(), 4.0);
        assert!(s.is_t_isolated(0.25));
        assert!(!set(&[1.0, 2.0], 0.3).is_t_isolated(0.25));
        assert!(set(&[3.0], 2.9).is_t_isolated(0.25));
    }

    #[test]
    fn subordination_examples() {
        let d1 = set(&[1.0, 5.0], 0.2);
        assert!(set(&[0.9], 0.05).is_subordinate(&d1));
        assert!(!set(&[3.0], 2.5).is_subordinate(&d1));
    }

    #[test]
    fn default_radius_examples() {
        assert_eq!(default_radius(&[c(1.0, 0.0), c(5.0, 0.0)]).unwrap(), 0.5);
        assert_eq!(default_radius(&[c(2.0, 0.0)]).unwrap(), 1.0);
        assert!((default_radius(&[c(1.0, 0.0), c(1.2, 0.0)]).unwrap() - 0.025).abs() < 1e-15);
        assert!(default_radius(&[c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn spectral_membership() {
        let s = set(&[1.0, 5.0], 0.5);
        assert!(in_D_gamma(&real_diag(&[1.0, 5.0]), &s).unwrap());
        assert!(!in_D_gamma(&real_diag(&[1.0, 3.0]), &s).unwrap());
        assert!(in_W_gamma(&rmat(2, &[9.0, 8.0, 7.0, 6.0]), &real_diag(&[1.0, 5.0]), &s).unwrap());
    }

    #[test]
    fn u_gamma_examples() {
        let x = real_diag(&[1.0, 4.0]);
        let s = set(&[1.0, 4.0], 0.5);
        assert!(!in_U_gamma(&real_diag(&[2.0, 3.0]), &x, &s, COMMUTE_TOL).unwrap());
        assert!(in_U_gamma(&rmat(2, &[0.0, 1.0, 1.0, 0.0]), &x, &s, COMMUTE_TOL).unwrap());
        assert!(in_U_gamma(&real_diag(&[2.0]), &real_diag(&[1.0]), &set(&[1.0], 0.5), COMMUTE_TOL).unwrap());
        let spec = BranchSpec::new(s, vec![1, -1]).unwrap();
        assert_eq!(variety_residual_v(&real_diag(&[2.0, 3.0]), &x, &spec).unwrap(), 0.0);
    }

    #[test]
    fn pi_examples() {
        let w = MatrixTuple::pair(real_diag(&[4.0]), real_diag(&[2.0])).unwrap();
        let [a, b, g] = pi(&w).unwrap();
        assert_eq!((a[(0, 0)], b[(0, 0)], g[(0, 0)]), (c(3.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)));
        let m = rmat(2, &[1.0, 2.0, 3.0, 4.0]);
        let [a, b, g] = pi(&MatrixTuple::pair(m.clone(), m.clone()).unwrap()).unwrap();
        assert_eq!(a, m);
        assert!(op_norm(&b) == 0.0 && op_norm(&g) == 0.0);
    }

    #[test]
    fn omega_examples() {
        let u = rmat(2, &[1.0, 2.0, 0.5, -1.0]);
        let spec = BranchSpec::from_centers(vec![c(1.0, 0.0)], 0.5, vec![1]).unwrap();
        let w = omega(&u, &identity(2), &spec).unwrap();
        assert!(op_norm(&(w.get(0) - (&u + identity(2)))) < 1e-14);
        assert!(op_norm(&(w.get(1) - (&u - identity(2)))) < 1e-14);
        let (u2, x2) = omega_inverse(&w).unwrap();
        assert!(op_norm(&(u2 - &u)) < 1e-14 && op_norm(&(x2 - identity(2))) < 1e-14);
        let [_, _, sus] = phi(&u, &identity(2), &spec).unwrap();
        assert!(op_norm(&(sus - &u)) < 1e-14);
    }

    #[test]
    fn fiber_examples() {
        let w = MatrixTuple::pair(real_diag(&[4.0]), real_diag(&[2.0])).unwrap();
        let f = fiber(&w, FIBER_TOL).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.iter().any(|t| t.max_abs_diff(&w) < 1e-12));
        assert!(f.iter().any(|t| t.max_abs_diff(&w.flip().unwrap()) < 1e-12));
        let v = real_diag(&[1.0, 2.0]);
        let degenerate = MatrixTuple::pair(v.clone(), -v).unwrap();
        assert_eq!(fiber(&degenerate, FIBER_TOL).unwrap().len(), 4);
        let singular = MatrixTuple::pair(real_diag(&[1.0, 1.0]), real_diag(&[1.0, 0.0])).unwrap();
        assert!(matches!(fiber(&singular, FIBER_TOL), Err(Error::Unsupported(_))));
    }

    #[test]
    fn s_o_examples() {
        let w = MatrixTuple::pair(real_diag(&[4.0]), real_diag(&[2.0])).unwrap();
        assert!(in_S_o(&w, DEFAULT_TOL).unwrap());
        let m = rmat(2, &[1.0, 2.0, 3.0, 4.0]);
        assert!(!in_S_o(&MatrixTuple::pair(m.clone(), m).unwrap(), DEFAULT_TOL).unwrap());
        let w = MatrixTuple::pair(real_diag(&[1.0, -1.0]), real_diag(&[-1.0, 1.0])).unwrap();
        assert!(!in_S_o(&w, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn free_closure_examples() {
        let z = FreePoly::var(1, 0);
        assert!(in_free_closure_of_variety(&z, &real_diag(&[0.0, 1.0])).unwrap());
        let zm1 = &z - &FreePoly::one(1);
        assert!(!in_free_closure_of_variety(&zm1, &(identity(2) * c(2.0, 0.0))).unwrap());
    }
}
