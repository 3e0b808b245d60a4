//! Holomorphic functional calculus by Hermite interpolation on the spectrum.
//!
//! For `f` holomorphic near `sigma(x)`, `f(x) = p(x)` where `p` matches `f`
//! and its derivatives at every eigenvalue up to the multiplicity. Every
//! result therefore lies in the algebra generated by `x`.

use num_complex::Complex64;

use crate::domains::{default_radius, SimpleSet};
use crate::error::{Error, Result};
use crate::linalg::{identity, spectrum, CMatrix};

/// Eigenvalues closer than this times the spectral radius become one
/// confluent interpolation node.
pub const MERGE_REL: f64 = 1e-6;

/// Spectral containment uses discs shrunk by this fraction of the radius.
pub const DOMAIN_MARGIN: f64 = 1e-8;

/// Default single-linkage gap for spectral clustering, relative to
/// `max(1, spectral radius)`.
pub const CLUSTER_GAP_REL: f64 = 1e-3;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A simple set with a sign per disc.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSpec {
    set: SimpleSet,
    tau: Vec<i8>,
}

impl BranchSpec {
    /// Requires zero outside every disc and quarter-isolation.
    pub fn new(set: SimpleSet, tau: Vec<i8>) -> Result<Self> {
        if tau.len() != set.k() {
            return Err(Error::Precondition(format!("{} signs for {} centers", tau.len(), set.k())));
        }
        if tau.iter().any(|t| *t != 1 && *t != -1) {
            return Err(Error::Precondition("signs must be +1 or -1".into()));
        }
        if !set.is_quarter_isolated() {
            return Err(Error::Precondition(format!(
                "radius {} violates r < min|c| or r < sep/4 (sep = {})",
                set.radius(),
                set.separation()
            )));
        }
        Ok(BranchSpec { set, tau })
    }

    pub fn from_centers(centers: Vec<Complex64>, radius: f64, tau: Vec<i8>) -> Result<Self> {
        Self::new(SimpleSet::new(centers, radius)?, tau)
    }

    /// Clusters `sigma(x)` and puts a disc of the default radius around each
    /// cluster mean; all signs `+1`.
    pub fn from_spectrum(x: &CMatrix, gap: Option<f64>) -> Result<Self> {
        let spec = spectrum(x)?;
        let gap = gap.unwrap_or(CLUSTER_GAP_REL * spec.spectral_radius().max(1.0));
        let clusters = spec.clusters(gap);
        if let Some(cl) = clusters.iter().find(|cl| cl.center.norm() <= gap) {
            return Err(Error::Clustering(format!("cluster at {} contains 0", cl.center)));
        }
        let centers: Vec<Complex64> = clusters.iter().map(|cl| cl.center).collect();
        let r = default_radius(&centers)?;
        for cl in &clusters {
            if cl.spread() >= r * (1.0 - DOMAIN_MARGIN) {
                return Err(Error::Clustering(format!(
                    "cluster at {} has spread {:e}, radius is {:e}",
                    cl.center,
                    cl.spread(),
                    r
                )));
            }
        }
        let k = centers.len();
        Self::new(SimpleSet::new(centers, r)?, vec![1; k])
    }

    pub fn set(&self) -> &SimpleSet {
        &self.set
    }

    pub fn centers(&self) -> &[Complex64] {
        self.set.centers()
    }

    pub fn radius(&self) -> f64 {
        self.set.radius()
    }

    pub fn tau(&self) -> &[i8] {
        &self.tau
    }

    pub fn k(&self) -> usize {
        self.tau.len()
    }

    pub fn with_tau(&self, tau: Vec<i8>) -> Result<Self> {
        Self::new(self.set.clone(), tau)
    }

    pub fn is_constant_tau(&self) -> bool {
        self.tau.iter().all(|t| *t == self.tau[0])
    }
}

/// All sign vectors of length `k`, in binary order with `+1` first.
pub fn all_taus(k: usize) -> Vec<Vec<i8>> {
    (0..1usize << k).map(|m| (0..k).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect()).collect()
}

/// A scalar function known through its Taylor coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum Germ {
    Constant(Complex64),
    /// Coefficients in ascending degree.
    Polynomial(Vec<Complex64>),
    /// `sign * sqrt(c) * sqrt(1 + (z - c)/c)`, principal roots; holomorphic
    /// on the half plane where `Re(z/c) > 0`.
    Sqrt {
        center: Complex64,
        sign: i8,
    },
    Product(Vec<Germ>),
}

impl Germ {
    pub fn identity() -> Self {
        Germ::Polynomial(vec![ZERO, ONE])
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        self.taylor(z, 1)[0]
    }

    /// `f^(k)(z0) / k!` for `k < m`.
    pub fn taylor(&self, z0: Complex64, m: usize) -> Vec<Complex64> {
        match self {
            Germ::Constant(a) => {
                let mut t = vec![ZERO; m];
                if m > 0 {
                    t[0] = *a;
                }
                t
            }
            Germ::Polynomial(p) => (0..m)
                .map(|k| {
                    // sum_j p_j C(j, k) z0^(j-k)
                    let mut acc = ZERO;
                    let mut binom = 1.0;
                    let mut zp = ONE;
                    for (j, pj) in p.iter().enumerate().skip(k) {
                        if j > k {
                            binom = binom * j as f64 / (j - k) as f64;
                            zp *= z0;
                        }
                        acc += pj * zp * binom;
                    }
                    acc
                })
                .collect(),
            Germ::Sqrt { center, sign } => {
                let s0 = center.sqrt() * (ONE + (z0 - center) / center).sqrt() * *sign as f64;
                let mut out = Vec::with_capacity(m);
                let mut b = 1.0;
                let mut zk = ONE;
                for k in 0..m {
                    if k > 0 {
                        b *= (0.5 - (k - 1) as f64) / k as f64;
                        zk *= z0;
                    }
                    out.push(s0 * b / zk);
                }
                out
            }
            Germ::Product(fs) => {
                let mut acc = vec![ZERO; m];
                if m > 0 {
                    acc[0] = ONE;
                }
                for f in fs {
                    let t = f.taylor(z0, m);
                    let mut next = vec![ZERO; m];
                    for i in 0..m {
                        for j in 0..m - i {
                            next[i + j] += acc[i] * t[j];
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }
}

/// Which germ applies where: one entire germ, or one germ per disc of a
/// simple set.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarBranch {
    Entire(Germ),
    Piecewise { set: SimpleSet, germs: Vec<Germ> },
}

impl ScalarBranch {
    pub fn piecewise(set: SimpleSet, germs: Vec<Germ>) -> Result<Self> {
        if germs.len() != set.k() {
            return Err(Error::Precondition(format!("{} germs for {} discs", germs.len(), set.k())));
        }
        Ok(ScalarBranch::Piecewise { set, germs })
    }

    /// Locally constant `tau`.
    pub fn involution(spec: &BranchSpec) -> Self {
        ScalarBranch::Piecewise {
            set: spec.set.clone(),
            germs: spec.tau.iter().map(|t| Germ::Constant(Complex64::new(*t as f64, 0.0))).collect(),
        }
    }

    /// `s_gamma`, the base square root, with every sign `+1`.
    pub fn base_sqrt(spec: &BranchSpec) -> Self {
        ScalarBranch::Piecewise {
            set: spec.set.clone(),
            germs: spec.centers().iter().map(|c| Germ::Sqrt { center: *c, sign: 1 }).collect(),
        }
    }

    /// `s_gamma * iota_tau`.
    pub fn signed_sqrt(spec: &BranchSpec) -> Self {
        ScalarBranch::Piecewise {
            set: spec.set.clone(),
            germs: spec.centers().iter().zip(&spec.tau).map(|(c, t)| Germ::Sqrt { center: *c, sign: *t }).collect(),
        }
    }

    fn germ_at(&self, z: Complex64) -> Result<&Germ> {
        match self {
            ScalarBranch::Entire(g) => Ok(g),
            ScalarBranch::Piecewise { set, germs } => set
                .disc_of(z, DOMAIN_MARGIN)
                .map(|i| &germs[i])
                .ok_or_else(|| Error::SpectrumOutsideDomain(format!("eigenvalue {z} lies in no disc"))),
        }
    }
}

struct Node {
    z: Complex64,
    mult: usize,
    germ_index: usize,
}

/// `f(x)` for the germ(s) in `branch`.
pub fn matrix_function(x: &CMatrix, branch: &ScalarBranch) -> Result<CMatrix> {
    let n = x.nrows();
    let spec = spectrum(x)?;
    let rho = spec.spectral_radius();
    let merge = MERGE_REL * rho;

    // group eigenvalues into confluent nodes
    let clusters = spec.clusters(merge);
    let mut germs: Vec<&Germ> = Vec::new();
    let mut nodes: Vec<Node> = Vec::new();
    for cl in &clusters {
        let g = branch.germ_at(cl.center)?;
        for z in &cl.members {
            let gz = branch.germ_at(*z)?;
            if !std::ptr::eq(gz, g) {
                return Err(Error::IllConditionedInterpolation(format!(
                    "eigenvalues near {} straddle two discs",
                    cl.center
                )));
            }
        }
        let gi = match germs.iter().position(|h| std::ptr::eq(*h, g)) {
            Some(i) => i,
            None => {
                germs.push(g);
                germs.len() - 1
            }
        };
        nodes.push(Node { z: cl.center, mult: cl.members.len(), germ_index: gi });
    }

    // confluent divided differences; `zs` lists each node `mult` times
    let mut zs = Vec::with_capacity(n);
    let mut taylor = Vec::with_capacity(n);
    for nd in &nodes {
        let t = germs[nd.germ_index].taylor(nd.z, nd.mult);
        for _ in 0..nd.mult {
            zs.push(nd.z);
            taylor.push(t.clone());
        }
    }
    let mut table: Vec<Complex64> = taylor.iter().map(|t| t[0]).collect();
    let mut coef = vec![table[0]];
    #[allow(clippy::needless_range_loop)]
    for order in 1..n {
        let mut next = Vec::with_capacity(n - order);
        for i in 0..n - order {
            let j = i + order;
            let v = if zs[i] == zs[j] { taylor[i][order] } else { (table[i + 1] - table[i]) / (zs[j] - zs[i]) };
            next.push(v);
        }
        coef.push(next[0]);
        table = next;
    }
    if coef.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::IllConditionedInterpolation("non-finite divided difference".into()));
    }

    // Newton form, Horner from the top
    let eye = identity(n);
    let mut p = &eye * coef[n - 1];
    for k in (0..n - 1).rev() {
        p = (x - &eye * zs[k]) * p + &eye * coef[k];
    }
    if p.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::IllConditionedInterpolation("non-finite result".into()));
    }
    Ok(p)
}

/// `I_{gamma tau}(x)`: the spectral involution with sign `tau_i` on the
/// part of the spectrum in disc `i`.
pub fn involution_i(x: &CMatrix, spec: &BranchSpec) -> Result<CMatrix> {
    matrix_function(x, &ScalarBranch::involution(spec))
}

/// `S_gamma(x)`, the base square root.
pub fn sqrt_base(x: &CMatrix, spec: &BranchSpec) -> Result<CMatrix> {
    matrix_function(x, &ScalarBranch::base_sqrt(spec))
}

/// `S_{gamma tau}(x) = S_gamma(x) I_{gamma tau}(x)`.
pub fn sqrt_branch_s(x: &CMatrix, spec: &BranchSpec) -> Result<CMatrix> {
    matrix_function(x, &ScalarBranch::signed_sqrt(spec))
}
