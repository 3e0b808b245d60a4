//! Free words and free polynomials over `d` noncommuting letters.
//!
//! Letters are stored 0-based. With `d = 2` the standard chart names them
//! `x, y`; the `(u, v)` chart (`u = (x+y)/2`, `v = (x-y)/2`) names them `u, v`.
//! The chart is carried by the polynomial so that a change of variables
//! cannot be applied twice.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::text;

/// Longest word accepted by the `(x, y) <-> (u, v)` substitutions, which
/// enumerate all `2^len` target words.
pub const MAX_CHANGE_OF_VARIABLES_DEGREE: usize = 24;

/// A word in the free monoid; the empty word is the unit.
///
/// Words order degree-lexicographically: shorter first, then letterwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Exchanges letters 0 and 1.
    pub fn flipped(&self) -> Word {
        Word(self.0.iter().map(|&l| 1 - l).collect())
    }

    /// Number of occurrences of `letter`.
    pub fn count(&self, letter: u8) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    fn mask(&self) -> u64 {
        self.0.iter().enumerate().fold(0u64, |m, (i, &l)| m | (u64::from(l & 1) << i))
    }

    /// Binary word of length `len` whose letter `i` is bit `i` of `mask`.
    pub fn from_mask(mask: u64, len: usize) -> Word {
        Word((0..len).map(|i| ((mask >> i) & 1) as u8).collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    /// Letters are the original variables (`x, y` when `d = 2`).
    Standard,
    /// Letters are `u = (x+y)/2` and `v = (x-y)/2`.
    Uv,
}

/// A complex linear combination of words, kept in canonical form: no
/// stored coefficient is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FreePoly {
    d: usize,
    chart: Chart,
    terms: BTreeMap<Word, Complex64>,
}

impl FreePoly {
    pub fn zero(d: usize) -> Self {
        Self::zero_in(d, Chart::Standard)
    }

    pub fn zero_in(d: usize, chart: Chart) -> Self {
        assert!(d >= 1, "a free polynomial needs at least one letter");
        assert!(chart == Chart::Standard || d == 2, "the (u,v) chart has two letters");
        FreePoly { d, chart, terms: BTreeMap::new() }
    }

    pub fn constant(d: usize, c: Complex64) -> Self {
        Self::constant_in(d, Chart::Standard, c)
    }

    pub fn constant_in(d: usize, chart: Chart, c: Complex64) -> Self {
        let mut p = Self::zero_in(d, chart);
        p.add_term(Word::empty(), c);
        p
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, Complex64::new(1.0, 0.0))
    }

    /// The single letter `j` (0-based).
    pub fn var(d: usize, j: usize) -> Self {
        Self::var_in(d, Chart::Standard, j)
    }

    pub fn var_in(d: usize, chart: Chart, j: usize) -> Self {
        assert!(j < d, "letter {j} out of range for d = {d}");
        Self::monomial(d, chart, Word::new(vec![j as u8]), Complex64::new(1.0, 0.0))
    }

    pub fn x() -> Self {
        Self::var(2, 0)
    }

    pub fn y() -> Self {
        Self::var(2, 1)
    }

    pub fn u() -> Self {
        Self::var_in(2, Chart::Uv, 0)
    }

    pub fn v() -> Self {
        Self::var_in(2, Chart::Uv, 1)
    }

    pub fn monomial(d: usize, chart: Chart, w: Word, c: Complex64) -> Self {
        let mut p = Self::zero_in(d, chart);
        assert!(w.letters().iter().all(|&l| (l as usize) < d), "word {w:?} uses a letter outside 0..{d}");
        p.add_term(w, c);
        p
    }

    /// Builds a polynomial from terms, summing repeated words.
    pub fn from_terms<I>(d: usize, chart: Chart, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, Complex64)>,
    {
        let mut p = Self::zero_in(d, chart);
        for (w, c) in terms {
            if let Some(&l) = w.letters().iter().find(|&&l| l as usize >= d) {
                return Err(Error::Dimension(format!("letter {l} in a polynomial with d = {d}")));
            }
            p.add_term(w, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, w: Word, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = *e.get() + c;
                if s == Complex64::new(0.0, 0.0) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// Maximal word length; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|w| w.len() as i64).max().unwrap_or(-1)
    }

    /// Number of terms; see [`Self::is_zero`] for emptiness.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Complex64 {
        self.terms.get(w).copied().unwrap_or_default()
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero_in(self.d, self.chart);
        for (w, &a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant_in(self.d, self.chart, Complex64::new(1.0, 0.0));
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Terms of exact word length `k`.
    pub fn homogeneous_part(&self, k: usize) -> Self {
        let mut out = Self::zero_in(self.d, self.chart);
        for (w, &c) in self.terms.iter().filter(|(w, _)| w.len() == k) {
            out.add_term(w.clone(), c);
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Dimension(format!("d = {} vs d = {}", self.d, other.d)));
        }
        if self.chart != other.chart {
            return Err(Error::Chart(format!("{:?} vs {:?}", self.chart, other.chart)));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero_in(self.d, self.chart);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        Ok(out)
    }

    /// Evaluates at a tuple of `d` matrices. The empty word contributes a
    /// multiple of the identity.
    pub fn evaluate(&self, x: &MatrixTuple) -> Result<CMatrix> {
        if x.d() != self.d {
            return Err(Error::Dimension(format!("polynomial in {} letters evaluated at a {}-tuple", self.d, x.d())));
        }
        let n = x.n();
        let mut prefixes: HashMap<Vec<u8>, CMatrix> = HashMap::new();
        let mut acc = DMatrix::zeros(n, n);
        for (w, &c) in &self.terms {
            let m = word_product(w.letters(), x, &mut prefixes);
            acc += m * c;
        }
        Ok(acc)
    }

    fn require_pair(&self, op: &str) -> Result<()> {
        if self.d != 2 {
            return Err(Error::Precondition(format!("{op} needs d = 2, got d = {}", self.d)));
        }
        Ok(())
    }

    /// `w -> w^f`: exchange the two letters. Standard chart only.
    pub fn flip(&self) -> Result<Self> {
        self.require_pair("flip")?;
        if self.chart != Chart::Standard {
            return Err(Error::Chart("flip acts on x,y letters".into()));
        }
        let mut out = Self::zero_in(2, Chart::Standard);
        for (w, &c) in &self.terms {
            out.add_term(w.flipped(), c);
        }
        Ok(out)
    }

    /// `(p + p^f) / 2`.
    pub fn symmetrize(&self) -> Result<Self> {
        let f = self.flip()?;
        Ok((self + &f).scale(Complex64::new(0.5, 0.0)))
    }

    pub fn is_symmetric(&self) -> Result<bool> {
        Ok(*self == self.flip()?)
    }

    /// Substitutes `x -> u + v`, `y -> u - v`.
    pub fn to_uv(&self) -> Result<Self> {
        self.require_pair("to_uv")?;
        if self.chart != Chart::Standard {
            return Err(Error::Chart("to_uv applied to a polynomial already in (u,v)".into()));
        }
        self.sign_expand(Chart::Uv, 1.0)
    }

    /// Substitutes `u -> (x + y)/2`, `v -> (x - y)/2`.
    pub fn from_uv(&self) -> Result<Self> {
        self.require_pair("from_uv")?;
        if self.chart != Chart::Uv {
            return Err(Error::Chart("from_uv applied to a polynomial in x,y".into()));
        }
        self.sign_expand(Chart::Standard, 0.5)
    }

    /// Both substitutions have the form
    /// `coef(t) = scale^len * sum_s c_s * (-1)^{#positions where s and t both have letter 1}`.
    /// Each source word is processed together with its flip so that the
    /// contributions of a flip-invariant pair to odd targets cancel exactly.
    fn sign_expand(&self, target: Chart, scale: f64) -> Result<Self> {
        if let Some(deg) = self.terms.keys().map(Word::len).max() {
            if deg > MAX_CHANGE_OF_VARIABLES_DEGREE {
                return Err(Error::Unsupported(format!(
                    "change of variables on degree {deg} > {MAX_CHANGE_OF_VARIABLES_DEGREE}"
                )));
            }
        }
        let mut out = Self::zero_in(2, target);
        let mut seen: HashSet<Word> = HashSet::new();
        for (w, &c) in &self.terms {
            if seen.contains(w) {
                continue;
            }
            let fw = w.flipped();
            let self_paired = fw == *w;
            let cf = if self_paired { Complex64::default() } else { self.coeff(&fw) };
            seen.insert(fw);
            let len = w.len();
            let smask = w.mask();
            let factor = scale.powi(len as i32);
            for t in 0..(1u64 << len) {
                let pair = if self_paired {
                    c
                } else if t.count_ones() % 2 == 0 {
                    c + cf
                } else {
                    c - cf
                };
                if pair == Complex64::default() {
                    continue;
                }
                let sign = if (smask & t).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                out.add_term(Word::from_mask(t, len), pair * (sign * factor));
            }
        }
        Ok(out)
    }

    /// Splits a `(u,v)`-chart polynomial by the parity of the number of `v`s.
    pub fn v_parity_split(&self) -> Result<(Self, Self)> {
        self.require_pair("v_parity_split")?;
        if self.chart != Chart::Uv {
            return Err(Error::Chart("v_parity_split reads letters as (u,v)".into()));
        }
        let mut even = Self::zero_in(2, Chart::Uv);
        let mut odd = Self::zero_in(2, Chart::Uv);
        for (w, &c) in &self.terms {
            if w.count(1) % 2 == 0 {
                even.add_term(w.clone(), c);
            } else {
                odd.add_term(w.clone(), c);
            }
        }
        Ok((even, odd))
    }

    /// Sum of all degree-`n` words in `u, v` with an even number of `v`s.
    pub fn s_even(n: usize) -> Self {
        Self::parity_sum(n, 0)
    }

    /// Sum of all degree-`n` words in `u, v` with an odd number of `v`s.
    pub fn s_odd(n: usize) -> Self {
        Self::parity_sum(n, 1)
    }

    fn parity_sum(n: usize, parity: u32) -> Self {
        assert!(n <= MAX_CHANGE_OF_VARIABLES_DEGREE, "degree {n} too large to enumerate");
        let mut out = Self::zero_in(2, Chart::Uv);
        for t in 0..(1u64 << n) {
            if t.count_ones() % 2 == parity {
                out.add_term(Word::from_mask(t, n), Complex64::new(1.0, 0.0));
            }
        }
        out
    }

    /// Replaces letter `j` by `images[j]` everywhere.
    pub fn substitute(&self, images: &[FreePoly]) -> Result<Self> {
        if images.len() != self.d {
            return Err(Error::Dimension(format!("{} images for {} letters", images.len(), self.d)));
        }
        let Some(first) = images.first() else {
            return Err(Error::Dimension("no images".into()));
        };
        for im in images {
            first.check_compatible(im)?;
        }
        let unit = Self::constant_in(first.d, first.chart, Complex64::new(1.0, 0.0));
        let mut out = Self::zero_in(first.d, first.chart);
        for (w, &c) in &self.terms {
            let mut m = unit.clone();
            for &l in w.letters() {
                m = &m * &images[l as usize];
            }
            out = &out + &m.scale(c);
        }
        Ok(out)
    }

    pub(crate) fn letter_name(&self, l: u8) -> String {
        letter_name(self.d, self.chart, l)
    }
}

pub(crate) fn letter_name(d: usize, chart: Chart, l: u8) -> String {
    match (chart, d) {
        (Chart::Uv, _) => ["u", "v"][l as usize].to_string(),
        (Chart::Standard, 1) => "x".to_string(),
        (Chart::Standard, 2) => ["x", "y"][l as usize].to_string(),
        (Chart::Standard, _) => format!("x{}", l + 1),
    }
}

fn word_product(letters: &[u8], x: &MatrixTuple, memo: &mut HashMap<Vec<u8>, CMatrix>) -> CMatrix {
    if letters.is_empty() {
        return DMatrix::identity(x.n(), x.n());
    }
    if let Some(m) = memo.get(letters) {
        return m.clone();
    }
    let (head, last) = letters.split_at(letters.len() - 1);
    let m = word_product(head, x, memo) * x.get(last[0] as usize);
    memo.insert(letters.to_vec(), m.clone());
    m
}

impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<(Complex64, String)> = self
            .terms
            .iter()
            .map(|(w, &c)| {
                let syms: Vec<String> = w.letters().iter().map(|&l| self.letter_name(l)).collect();
                (c, text::power_product(&syms))
            })
            .collect();
        f.write_str(&text::join_terms(names.iter().map(|(c, m)| (*c, m.as_str()))))
    }
}

impl Add for &FreePoly {
    type Output = FreePoly;
    fn add(self, rhs: &FreePoly) -> FreePoly {
        self.checked_add(rhs).expect("incompatible polynomials")
    }
}

impl Add for FreePoly {
    type Output = FreePoly;
    fn add(self, rhs: FreePoly) -> FreePoly {
        &self + &rhs
    }
}

impl Sub for &FreePoly {
    type Output = FreePoly;
    fn sub(self, rhs: &FreePoly) -> FreePoly {
        self + &(-rhs)
    }
}

impl Sub for FreePoly {
    type Output = FreePoly;
    fn sub(self, rhs: FreePoly) -> FreePoly {
        &self - &rhs
    }
}

impl Mul for &FreePoly {
    type Output = FreePoly;
    fn mul(self, rhs: &FreePoly) -> FreePoly {
        self.checked_mul(rhs).expect("incompatible polynomials")
    }
}

impl Mul for FreePoly {
    type Output = FreePoly;
    fn mul(self, rhs: FreePoly) -> FreePoly {
        &self * &rhs
    }
}

impl Neg for &FreePoly {
    type Output = FreePoly;
    fn neg(self) -> FreePoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Neg for FreePoly {
    type Output = FreePoly;
    fn neg(self) -> FreePoly {
        -&self
    }
}

/// A point of level `n`: `d` square matrices of the same size `n >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    n: usize,
    mats: Vec<CMatrix>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let first = mats.first().ok_or_else(|| Error::Dimension("a tuple needs at least one matrix".into()))?;
        let n = first.nrows();
        if n == 0 {
            return Err(Error::Dimension("level must be at least 1".into()));
        }
        for (j, m) in mats.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension(format!(
                    "component {j} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(MatrixTuple { n, mats })
    }

    pub fn single(m: CMatrix) -> Result<Self> {
        Self::new(vec![m])
    }

    pub fn pair(a: CMatrix, b: CMatrix) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn get(&self, j: usize) -> &CMatrix {
        &self.mats[j]
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn into_mats(self) -> Vec<CMatrix> {
        self.mats
    }

    /// Applies `f` to every component.
    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        Self::new(self.mats.iter().map(f).collect())
    }

    /// `(w^1, w^2) -> (w^2, w^1)`.
    pub fn flip(&self) -> Result<Self> {
        if self.d() != 2 {
            return Err(Error::Precondition(format!("flip needs a pair, got d = {}", self.d())));
        }
        Self::pair(self.mats[1].clone(), self.mats[0].clone())
    }

    /// Largest componentwise entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n != other.n || self.d() != other.d() {
            return f64::INFINITY;
        }
        self.mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}
