//! Symmetric polynomials in the generators `u, v^2, vuv, vu^2v, ...` and
//! their rational reduction to `(alpha, beta, gamma) = (u, v^2, vuv)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ratexpr::{LaurentWord, RatExpr};
use crate::text;
use crate::words::{Chart, FreePoly, Word};

const U_LETTER: u8 = 0;
const V_LETTER: u8 = 1;

/// `U` stands for `u`, `M(j)` for `v u^j v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    U,
    M(u32),
}

impl Gen {
    /// Degree of the `(u, v)` word it stands for.
    pub fn weight(self) -> usize {
        match self {
            Gen::U => 1,
            Gen::M(j) => j as usize + 2,
        }
    }

    fn uv_letters(self) -> Vec<u8> {
        match self {
            Gen::U => vec![U_LETTER],
            Gen::M(j) => {
                let mut l = vec![V_LETTER];
                l.extend(std::iter::repeat_n(U_LETTER, j as usize));
                l.push(V_LETTER);
                l
            }
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::U => f.write_str("U"),
            Gen::M(j) => write!(f, "M{j}"),
        }
    }
}

/// The `(u, v)` word a generator word expands to.
pub fn uv_word(gens: &[Gen]) -> Word {
    Word::new(gens.iter().flat_map(|g| g.uv_letters()).collect())
}

/// Noncommutative polynomial in `U, M0, M1, ...`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenPoly {
    terms: BTreeMap<Vec<Gen>, Complex64>,
}

impl GenPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(gens: Vec<Gen>, c: Complex64) -> Self {
        let mut g = Self::zero();
        g.add_term(gens, c);
        g
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(Vec::new(), c)
    }

    pub fn generator(g: Gen) -> Self {
        Self::monomial(vec![g], Complex64::new(1.0, 0.0))
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<Gen>, Complex64)>>(terms: I) -> Self {
        let mut g = Self::zero();
        for (w, c) in terms {
            g.add_term(w, c);
        }
        g
    }

    fn add_term(&mut self, w: Vec<Gen>, c: Complex64) {
        if c == Complex64::default() {
            return;
        }
        let e = self.terms.entry(w.clone()).or_default();
        *e += c;
        if *e == Complex64::default() {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Gen>, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &[Gen]) -> Complex64 {
        self.terms.get(w).copied().unwrap_or_default()
    }

    /// Number of terms; see [`Self::is_zero`] for emptiness.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, x)| (w.clone(), x * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), *c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut w = a.clone();
                w.extend(b);
                out.add_term(w, x * y);
            }
        }
        out
    }

    /// Substitutes `U -> u`, `M_j -> v u^j v`; exact.
    pub fn expand_back(&self) -> FreePoly {
        let mut out = FreePoly::zero_in(2, Chart::Uv);
        for (w, c) in &self.terms {
            out = &out + &FreePoly::monomial(2, Chart::Uv, uv_word(w), *c);
        }
        out
    }
}

impl fmt::Display for GenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(&Vec<Gen>, &Complex64)> = self.terms.iter().collect();
        terms.sort_by_key(|(w, _)| uv_word(w));
        let rendered: Vec<(Complex64, String)> = terms
            .into_iter()
            .map(|(w, c)| {
                let syms: Vec<String> = w.iter().map(|g| g.to_string()).collect();
                (*c, text::power_product(&syms))
            })
            .collect();
        f.write_str(&text::join_terms_factored(&rendered))
    }
}

/// Splits an even-`v` word into `U` letters and `v u^j v` blocks. `None`
/// when the number of `v`s is odd.
pub fn factor_word(w: &Word) -> Option<Vec<Gen>> {
    let mut out = Vec::new();
    let mut open: Option<u32> = None;
    for &l in w.letters() {
        match (l, open) {
            (U_LETTER, None) => out.push(Gen::U),
            (U_LETTER, Some(j)) => open = Some(j + 1),
            (_, None) => open = Some(0),
            (_, Some(j)) => {
                out.push(Gen::M(j));
                open = None;
            }
        }
    }
    open.is_none().then_some(out)
}

/// Rewrites a symmetric `p(x, y)` in the generators. Accepts either chart;
/// a `(u, v)` polynomial must already have even `v`-degree in every term.
pub fn decompose_symmetric(p: &FreePoly) -> Result<GenPoly> {
    if p.d() != 2 {
        return Err(Error::Precondition(format!("expected two variables, got d = {}", p.d())));
    }
    let uv = match p.chart() {
        Chart::Standard => p.to_uv()?,
        Chart::Uv => p.clone(),
    };
    let (even, odd) = uv.v_parity_split()?;
    if !odd.is_zero() {
        return Err(Error::NotSymmetric(odd.len()));
    }
    Ok(GenPoly::from_terms(even.terms().map(|(w, c)| (factor_word(w).expect("even v-count"), *c))))
}

/// `U -> alpha`, `M_0 -> beta`, `M_j -> gamma (beta^-1 gamma)^(j-1)`.
pub fn reduce_to_pi(g: &GenPoly) -> RatExpr {
    let alpha = RatExpr::var("alpha");
    let beta = RatExpr::var("beta");
    let gamma = RatExpr::var("gamma");
    let beta_inv = beta.inv();
    let image = |gen: &Gen| -> Vec<RatExpr> {
        match gen {
            Gen::U => vec![alpha.clone()],
            Gen::M(0) => vec![beta.clone()],
            Gen::M(j) => {
                let mut f = vec![gamma.clone()];
                for _ in 1..*j {
                    f.push(beta_inv.clone());
                    f.push(gamma.clone());
                }
                f
            }
        }
    };
    RatExpr::sum(g.terms.iter().map(|(w, c)| RatExpr::product(w.iter().flat_map(image).collect()).scale(*c)).collect())
}

/// `F` with `p = F o pi` wherever `beta` is invertible.
pub fn factor_through_pi(p: &FreePoly) -> Result<RatExpr> {
    Ok(reduce_to_pi(&decompose_symmetric(p)?))
}

/// Reads a free-group word in `alpha, beta, gamma` back as a generator word,
/// when it has the shape produced by [`reduce_to_pi`].
pub fn gens_of_laurent(w: &LaurentWord) -> Option<Vec<Gen>> {
    let l = w.letters();
    let mut out = Vec::new();
    let mut i = 0;
    while i < l.len() {
        match (l[i].name.as_str(), l[i].inverted) {
            ("alpha", false) => out.push(Gen::U),
            ("beta", false) => out.push(Gen::M(0)),
            ("gamma", false) => {
                let mut j = 1;
                while i + 2 < l.len()
                    && l[i + 1].name == "beta"
                    && l[i + 1].inverted
                    && l[i + 2].name == "gamma"
                    && !l[i + 2].inverted
                {
                    j += 1;
                    i += 2;
                }
                out.push(Gen::M(j));
            }
            _ => return None,
        }
        i += 1;
    }
    Some(out)
}

/// Generator words of total weight `d`.
pub fn generator_words(d: usize) -> Vec<Vec<Gen>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in std::iter::once(Gen::U).chain((0..d.saturating_sub(1) as u32).map(Gen::M)) {
        let w = first.weight();
        if w > d {
            continue;
        }
        for mut rest in generator_words(d - w) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Dimension of the homogeneous degree-`d` symmetric polynomials in `x, y`,
/// counted as the number of distinct symmetrized monomials.
pub fn symmetric_dimension(d: usize) -> usize {
    let mut basis: BTreeSet<Vec<(Word, (u64, u64))>> = BTreeSet::new();
    for mask in 0..(1u64 << d) {
        let m = FreePoly::monomial(2, Chart::Standard, Word::from_mask(mask, d), Complex64::new(1.0, 0.0));
        let s = m.symmetrize().expect("pair polynomial");
        basis.insert(s.terms().map(|(w, c)| (w.clone(), (c.re.to_bits(), c.im.to_bits()))).collect());
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real_diag};
    use crate::ratexpr::Assignment;

    fn x() -> FreePoly {
        FreePoly::x()
    }
    fn y() -> FreePoly {
        FreePoly::y()
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(decompose_symmetric(&(x() + y())).unwrap().to_string(), "2*U");
        let g = decompose_symmetric(&(&x() * &y() + &y() * &x())).unwrap();
        assert_eq!(g.to_string(), "2*U^2 - 2*M0");
        let g = decompose_symmetric(&(x().pow(3) + y().pow(3))).unwrap();
        assert_eq!(g.to_string(), "2*(U^3 + U*M0 + M1 + M0*U)");
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        assert!(matches!(decompose_symmetric(&x()), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn zero_polynomial() {
        let g = decompose_symmetric(&FreePoly::zero(2)).unwrap();
        assert!(g.is_zero());
        assert_eq!(reduce_to_pi(&g), RatExpr::zero());
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_to_pi(&GenPoly::generator(Gen::M(2))).to_string(), "gamma*inv(beta)*gamma");
        assert_eq!(reduce_to_pi(&GenPoly::generator(Gen::M(0))).to_string(), "beta");
        let f = factor_through_pi(&(x().pow(4) + y().pow(4))).unwrap();
        let expanded = f.expand().unwrap();
        assert_eq!(expanded.len(), 8);
        for (_, coef) in expanded.terms() {
            assert_eq!(*coef, c(2.0, 0.0));
        }
    }

    #[test]
    fn scalar_factorization_at_4_2() {
        let at = |f: &RatExpr| {
            let a = Assignment::new([
                ("alpha", real_diag(&[3.0])),
                ("beta", real_diag(&[1.0])),
                ("gamma", real_diag(&[3.0])),
            ])
            .unwrap();
            f.eval(&a).unwrap()[(0, 0)]
        };
        assert_eq!(at(&factor_through_pi(&(x() + y())).unwrap()), c(6.0, 0.0));
        assert_eq!(at(&factor_through_pi(&(&x() * &y() + &y() * &x())).unwrap()), c(16.0, 0.0));
    }

    #[test]
    fn pascoe_polynomial_needs_beta_inverse() {
        let d = &x() - &y();
        let s = &x() + &y();
        let p = &(&(&d * &s) * &s) * &d;
        let g = decompose_symmetric(&p).unwrap();
        assert_eq!(g, GenPoly::monomial(vec![Gen::M(2)], c(16.0, 0.0)));
        assert_eq!(reduce_to_pi(&g).to_string(), "16*gamma*inv(beta)*gamma");
    }

    #[test]
    fn laurent_words_map_back_to_generators() {
        let g = GenPoly::from_terms([
            (vec![Gen::U, Gen::M(3), Gen::M(0)], c(1.0, 0.0)),
            (vec![Gen::M(1), Gen::M(2)], c(1.0, 0.0)),
        ]);
        let l = reduce_to_pi(&g).expand().unwrap();
        let back: BTreeSet<Vec<Gen>> = l.terms().map(|(w, _)| gens_of_laurent(w).unwrap()).collect();
        let expect: BTreeSet<Vec<Gen>> = g.terms().map(|(w, _)| w.clone()).collect();
        assert_eq!(back, expect);
    }

    #[test]
    fn dimension_count() {
        for d in 1..=8 {
            assert_eq!(symmetric_dimension(d), 1 << (d - 1));
            assert_eq!(generator_words(d).len(), 1 << (d - 1));
        }
    }
}
