//! Noncommutative rational expressions.
//!
//! An expression is an immutable DAG; sub-expressions are shared through
//! `Arc`, so recursive constructions (the Newton-Girard families) grow
//! linearly. Constructors flatten nested sums and products and fold scalar
//! arithmetic, nothing more.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, identity, op_norm, rcond, CMatrix};
use crate::text;

/// An `Inverse` child is singular when its reciprocal condition number is
/// below this.
pub const SINGULARITY_TOL: f64 = 1e-10;

/// Resampling cap per (level, trial) in [`equivalent_probabilistic`].
pub const RETRY_CAP: usize = 50;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug)]
pub enum Node {
    Var(String),
    Scalar(Complex64),
    Sum(Vec<RatExpr>),
    /// Ordered factors.
    Product(Vec<RatExpr>),
    ScalarMul(Complex64, RatExpr),
    Inverse(RatExpr),
}

#[derive(Clone, Debug)]
pub struct RatExpr(Arc<Node>);

impl RatExpr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn var(name: &str) -> Self {
        RatExpr(Arc::new(Node::Var(name.to_string())))
    }

    pub fn scalar(z: Complex64) -> Self {
        RatExpr(Arc::new(Node::Scalar(z)))
    }

    pub fn real(x: f64) -> Self {
        Self::scalar(c(x, 0.0))
    }

    pub fn zero() -> Self {
        Self::scalar(ZERO)
    }

    pub fn one() -> Self {
        Self::scalar(ONE)
    }

    pub fn as_scalar(&self) -> Option<Complex64> {
        match self.node() {
            Node::Scalar(z) => Some(*z),
            _ => None,
        }
    }

    /// Sum with nested sums flattened and scalar terms folded.
    pub fn sum(terms: Vec<RatExpr>) -> Self {
        let mut flat = Vec::new();
        let mut constant = ZERO;
        for t in terms {
            match t.node() {
                Node::Sum(inner) => {
                    for s in inner {
                        match s.node() {
                            Node::Scalar(z) => constant += z,
                            _ => flat.push(s.clone()),
                        }
                    }
                }
                Node::Scalar(z) => constant += z,
                _ => flat.push(t),
            }
        }
        if constant != ZERO {
            flat.push(Self::scalar(constant));
        }
        match flat.len() {
            0 => Self::zero(),
            1 => flat.pop().expect("one term"),
            _ => RatExpr(Arc::new(Node::Sum(flat))),
        }
    }

    /// Ordered product with nested products flattened and scalar factors
    /// pulled out front.
    pub fn product(factors: Vec<RatExpr>) -> Self {
        let mut flat = Vec::new();
        let mut coef = ONE;
        fn push(e: &RatExpr, flat: &mut Vec<RatExpr>, coef: &mut Complex64) {
            match e.node() {
                Node::Scalar(z) => *coef *= z,
                Node::ScalarMul(z, inner) => {
                    *coef *= z;
                    push(inner, flat, coef);
                }
                Node::Product(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(e.clone()),
            }
        }
        for f in &factors {
            push(f, &mut flat, &mut coef);
        }
        if coef == ZERO {
            return Self::zero();
        }
        let core = match flat.len() {
            0 => return Self::scalar(coef),
            1 => flat.pop().expect("one factor"),
            _ => RatExpr(Arc::new(Node::Product(flat))),
        };
        core.scale(coef)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        if z == ONE {
            return self.clone();
        }
        if z == ZERO {
            return Self::zero();
        }
        match self.node() {
            Node::Scalar(a) => Self::scalar(a * z),
            Node::ScalarMul(a, inner) => inner.scale(a * z),
            _ => RatExpr(Arc::new(Node::ScalarMul(z, self.clone()))),
        }
    }

    pub fn inv(&self) -> Self {
        match self.node() {
            Node::Scalar(a) if *a != ZERO => Self::scalar(ONE / a),
            _ => RatExpr(Arc::new(Node::Inverse(self.clone()))),
        }
    }

    /// Integer power; negative exponents invert the positive power.
    pub fn pow(&self, k: i32) -> Self {
        let p = Self::product(vec![self.clone(); k.unsigned_abs() as usize]);
        if k < 0 {
            p.inv()
        } else {
            p
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        fn walk(e: &RatExpr, out: &mut BTreeSet<String>, seen: &mut std::collections::HashSet<usize>) {
            if !seen.insert(e.key()) {
                return;
            }
            match e.node() {
                Node::Var(n) => {
                    out.insert(n.clone());
                }
                Node::Scalar(_) => {}
                Node::Sum(ch) | Node::Product(ch) => ch.iter().for_each(|x| walk(x, out, seen)),
                Node::ScalarMul(_, x) | Node::Inverse(x) => walk(x, out, seen),
            }
        }
        walk(self, &mut out, &mut seen);
        out
    }

    /// A free polynomial as a sum of products of its letters.
    pub fn from_poly(p: &crate::words::FreePoly) -> Self {
        let letters: Vec<RatExpr> = (0..p.d() as u8).map(|l| Self::var(&p.letter_name(l))).collect();
        Self::sum(
            p.terms()
                .map(|(w, z)| {
                    Self::product(w.letters().iter().map(|l| letters[*l as usize].clone()).collect()).scale(*z)
                })
                .collect(),
        )
    }

    /// Number of distinct nodes in the DAG.
    pub fn dag_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        fn walk(e: &RatExpr, seen: &mut std::collections::HashSet<usize>) {
            if !seen.insert(e.key()) {
                return;
            }
            match e.node() {
                Node::Sum(ch) | Node::Product(ch) => ch.iter().for_each(|x| walk(x, seen)),
                Node::ScalarMul(_, x) | Node::Inverse(x) => walk(x, seen),
                _ => {}
            }
        }
        walk(self, &mut seen);
        seen.len()
    }

    /// Bottom-up evaluation; shared nodes are evaluated once.
    pub fn eval(&self, a: &Assignment) -> Result<CMatrix> {
        let mut memo = HashMap::new();
        self.eval_memo(a, &mut memo)
    }

    fn eval_memo(&self, a: &Assignment, memo: &mut HashMap<usize, CMatrix>) -> Result<CMatrix> {
        if let Some(m) = memo.get(&self.key()) {
            return Ok(m.clone());
        }
        let n = a.n();
        let m = match self.node() {
            Node::Var(name) => {
                a.get(name).cloned().ok_or_else(|| Error::Assignment(format!("variable `{name}` is not assigned")))?
            }
            Node::Scalar(z) => identity(n) * *z,
            Node::Sum(ch) => {
                let mut acc = CMatrix::zeros(n, n);
                for x in ch {
                    acc += x.eval_memo(a, memo)?;
                }
                acc
            }
            Node::Product(ch) => {
                let mut acc = identity(n);
                for x in ch {
                    acc *= x.eval_memo(a, memo)?;
                }
                acc
            }
            Node::ScalarMul(z, x) => x.eval_memo(a, memo)? * *z,
            Node::Inverse(x) => {
                let inner = x.eval_memo(a, memo)?;
                let rc = rcond(&inner);
                if rc < SINGULARITY_TOL {
                    return Err(Error::Singularity { expr: truncate(&x.to_string(), 512), rcond: rc });
                }
                inner.try_inverse().ok_or_else(|| Error::Numerical("LU inverse failed".into()))?
            }
        };
        memo.insert(self.key(), m.clone());
        Ok(m)
    }

    /// Simultaneous substitution of variables; untouched shared nodes stay
    /// shared.
    pub fn substitute(&self, map: &HashMap<String, RatExpr>) -> RatExpr {
        let mut memo = HashMap::new();
        self.subst_memo(map, &mut memo)
    }

    fn subst_memo(&self, map: &HashMap<String, RatExpr>, memo: &mut HashMap<usize, RatExpr>) -> RatExpr {
        if let Some(e) = memo.get(&self.key()) {
            return e.clone();
        }
        let out = match self.node() {
            Node::Var(name) => map.get(name).cloned().unwrap_or_else(|| self.clone()),
            Node::Scalar(_) => self.clone(),
            Node::Sum(ch) => Self::sum(ch.iter().map(|x| x.subst_memo(map, memo)).collect()),
            Node::Product(ch) => Self::product(ch.iter().map(|x| x.subst_memo(map, memo)).collect()),
            Node::ScalarMul(z, x) => x.subst_memo(map, memo).scale(*z),
            Node::Inverse(x) => x.subst_memo(map, memo).inv(),
        };
        memo.insert(self.key(), out.clone());
        out
    }

    /// Expands into the free group algebra: valid when every inverted
    /// sub-expression expands to a single monomial.
    pub fn expand(&self) -> Result<Laurent> {
        let mut memo = HashMap::new();
        self.expand_memo(&mut memo)
    }

    fn expand_memo(&self, memo: &mut HashMap<usize, Laurent>) -> Result<Laurent> {
        if let Some(l) = memo.get(&self.key()) {
            return Ok(l.clone());
        }
        let out = match self.node() {
            Node::Var(name) => Laurent::monomial(LaurentWord::letter(name, false), ONE),
            Node::Scalar(z) => Laurent::monomial(LaurentWord::default(), *z),
            Node::Sum(ch) => {
                let mut acc = Laurent::default();
                for x in ch {
                    acc = acc.add(&x.expand_memo(memo)?);
                }
                acc
            }
            Node::Product(ch) => {
                let mut acc = Laurent::monomial(LaurentWord::default(), ONE);
                for x in ch {
                    acc = acc.mul(&x.expand_memo(memo)?);
                }
                acc
            }
            Node::ScalarMul(z, x) => x.expand_memo(memo)?.scale(*z),
            Node::Inverse(x) => {
                let inner = x.expand_memo(memo)?;
                if inner.terms.len() != 1 {
                    return Err(Error::NotLaurent(format!("inverse of a {}-term expression", inner.terms.len())));
                }
                let (w, z) = inner.terms.iter().next().expect("one term");
                Laurent::monomial(w.inverse(), ONE / z)
            }
        };
        memo.insert(self.key(), out.clone());
        Ok(out)
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Sum(_) => 0,
            Node::ScalarMul(..) => 1,
            Node::Scalar(z) if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) => 1,
            Node::Product(_) => 2,
            _ => 3,
        }
    }

    fn write_factor(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn truncate(s: &str, max: usize) -> String {
    if s.len() <= max {
        s.to_string()
    } else {
        let mut end = max;
        while !s.is_char_boundary(end) {
            end -= 1;
        }
        format!("{}...", &s[..end])
    }
}

/// Structural equality.
impl PartialEq for RatExpr {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.node(), other.node()) {
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Scalar(a), Node::Scalar(b)) => a == b,
            (Node::Sum(a), Node::Sum(b)) | (Node::Product(a), Node::Product(b)) => a == b,
            (Node::ScalarMul(z, a), Node::ScalarMul(w, b)) => z == w && a == b,
            (Node::Inverse(a), Node::Inverse(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Var(n) => f.write_str(n),
            Node::Scalar(z) => f.write_str(&text::scalar(*z)),
            Node::Sum(ch) => {
                for (i, t) in ch.iter().enumerate() {
                    let negated = match t.node() {
                        Node::ScalarMul(z, inner) if is_negative(*z) => Some(inner.scale(-*z)),
                        Node::Scalar(z) if is_negative(*z) => Some(RatExpr::scalar(-*z)),
                        _ => None,
                    };
                    match (i, negated) {
                        (0, Some(e)) => {
                            f.write_str("-")?;
                            e.write_factor(f, 1)?;
                        }
                        (0, None) => write!(f, "{t}")?,
                        (_, Some(e)) => {
                            f.write_str(" - ")?;
                            e.write_factor(f, 1)?;
                        }
                        (_, None) => write!(f, " + {t}")?,
                    }
                }
                Ok(())
            }
            Node::Product(ch) => {
                let mut i = 0;
                let mut first = true;
                while i < ch.len() {
                    let mut j = i + 1;
                    while j < ch.len() && ch[j] == ch[i] {
                        j += 1;
                    }
                    if !first {
                        f.write_str("*")?;
                    }
                    first = false;
                    if j - i > 1 {
                        ch[i].write_factor(f, 3)?;
                        write!(f, "^{}", j - i)?;
                    } else {
                        ch[i].write_factor(f, 2)?;
                    }
                    i = j;
                }
                Ok(())
            }
            Node::ScalarMul(z, x) => {
                if *z == -ONE {
                    f.write_str("-")?;
                    x.write_factor(f, 2)
                } else {
                    f.write_str(&text::scalar(*z))?;
                    f.write_str("*")?;
                    x.write_factor(f, 2)
                }
            }
            Node::Inverse(x) => write!(f, "inv({x})"),
        }
    }
}

fn is_negative(z: Complex64) -> bool {
    (z.im == 0.0 && z.re < 0.0) || (z.re == 0.0 && z.im < 0.0)
}

impl Add for &RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: &RatExpr) -> RatExpr {
        RatExpr::sum(vec![self.clone(), rhs.clone()])
    }
}

impl Add for RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: RatExpr) -> RatExpr {
        RatExpr::sum(vec![self, rhs])
    }
}

impl Sub for &RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: &RatExpr) -> RatExpr {
        RatExpr::sum(vec![self.clone(), -rhs])
    }
}

impl Sub for RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: RatExpr) -> RatExpr {
        &self - &rhs
    }
}

impl Mul for &RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: &RatExpr) -> RatExpr {
        RatExpr::product(vec![self.clone(), rhs.clone()])
    }
}

impl Mul for RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: RatExpr) -> RatExpr {
        RatExpr::product(vec![self, rhs])
    }
}

impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        self.scale(-ONE)
    }
}

impl Neg for RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        self.scale(-ONE)
    }
}

/// Values for the free variables of an expression; all of one size `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    n: usize,
    values: BTreeMap<String, CMatrix>,
}

impl Assignment {
    /// Empty assignment at level `n`; scalars evaluate to multiples of `I_n`.
    pub fn with_level(n: usize) -> Self {
        Assignment { n, values: BTreeMap::new() }
    }

    pub fn new<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, CMatrix)>,
        S: Into<String>,
    {
        let mut values = BTreeMap::new();
        let mut n = None;
        for (name, m) in pairs {
            let name = name.into();
            if !m.is_square() || m.nrows() == 0 {
                return Err(Error::Assignment(format!("`{name}` is not a non-empty square matrix")));
            }
            match n {
                None => n = Some(m.nrows()),
                Some(k) if k != m.nrows() => {
                    return Err(Error::Assignment(format!("`{name}` is {0}x{0}, other values are {k}x{k}", m.nrows())))
                }
                _ => {}
            }
            values.insert(name, m);
        }
        let n = n.ok_or_else(|| Error::Assignment("empty assignment; use with_level".into()))?;
        Ok(Assignment { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, name: &str) -> Option<&CMatrix> {
        self.values.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &CMatrix)> {
        self.values.iter()
    }
}

/// Outcome of randomized identity testing. Equality is only ever claimed on
/// the samples drawn.
#[derive(Clone, Debug)]
pub enum Verdict {
    EqualOnSamples {
        /// `(level, largest relative residual seen)`.
        levels: Vec<(usize, f64)>,
    },
    Distinct {
        level: usize,
        residual: f64,
        witness: Assignment,
    },
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::EqualOnSamples { .. })
    }
}

/// Compares two expressions on random assignments: complex Gaussian
/// entries rescaled to unit operator norm. Samples where either side hits a
/// singular inverse are redrawn, at most [`RETRY_CAP`] times.
pub fn equivalent_probabilistic<R: Rng + ?Sized>(
    e1: &RatExpr,
    e2: &RatExpr,
    levels: &[usize],
    trials: usize,
    tol: f64,
    rng: &mut R,
) -> Result<Verdict> {
    let vars: Vec<String> = e1.free_variables().union(&e2.free_variables()).cloned().collect();
    let mut summary = Vec::new();
    for &n in levels {
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let mut attempt = 0;
            let (a, r1, r2) = loop {
                if attempt == RETRY_CAP {
                    return Err(Error::Inconclusive(format!("{RETRY_CAP} consecutive singular samples at level {n}")));
                }
                attempt += 1;
                let a = if vars.is_empty() {
                    Assignment::with_level(n)
                } else {
                    Assignment::new(vars.iter().map(|v| (v.clone(), linalg::random_unit_norm(rng, n))))?
                };
                match (e1.eval(&a), e2.eval(&a)) {
                    (Ok(r1), Ok(r2)) => break (a, r1, r2),
                    (Err(Error::Singularity { .. }), _) | (_, Err(Error::Singularity { .. })) => continue,
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            };
            let residual = op_norm(&(&r1 - &r2)) / (1.0 + op_norm(&r1).max(op_norm(&r2)));
            if residual > tol {
                return Ok(Verdict::Distinct { level: n, residual, witness: a });
            }
            worst = worst.max(residual);
        }
        summary.push((n, worst));
    }
    Ok(Verdict::EqualOnSamples { levels: summary })
}

/// A letter of the free group: a variable or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub name: String,
    pub inverted: bool,
}

/// A reduced word in the free group on the variable names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentWord(Vec<Letter>);

impl LaurentWord {
    pub fn letter(name: &str, inverted: bool) -> Self {
        LaurentWord(vec![Letter { name: name.to_string(), inverted }])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        LaurentWord::default().mul(&LaurentWord(letters))
    }

    /// Concatenation followed by free reduction at the seam.
    pub fn mul(&self, other: &LaurentWord) -> LaurentWord {
        let mut out = self.0.clone();
        for l in &other.0 {
            match out.last() {
                Some(last) if last.name == l.name && last.inverted != l.inverted => {
                    out.pop();
                }
                _ => out.push(l.clone()),
            }
        }
        LaurentWord(out)
    }

    pub fn inverse(&self) -> LaurentWord {
        LaurentWord(self.0.iter().rev().map(|l| Letter { name: l.name.clone(), inverted: !l.inverted }).collect())
    }

    fn render(&self) -> String {
        let syms: Vec<String> =
            self.0.iter().map(|l| if l.inverted { format!("inv({})", l.name) } else { l.name.clone() }).collect();
        text::power_product(&syms)
    }
}

/// Element of the group algebra of the free group: a canonical form for
/// polynomials in variables and their inverses.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Laurent {
    terms: BTreeMap<LaurentWord, Complex64>,
}

impl Laurent {
    pub fn monomial(w: LaurentWord, z: Complex64) -> Self {
        let mut l = Laurent::default();
        l.add_term(w, z);
        l
    }

    pub fn from_terms<I: IntoIterator<Item = (LaurentWord, Complex64)>>(terms: I) -> Self {
        let mut l = Laurent::default();
        for (w, z) in terms {
            l.add_term(w, z);
        }
        l
    }

    fn add_term(&mut self, w: LaurentWord, z: Complex64) {
        if z == ZERO {
            return;
        }
        let e = self.terms.entry(w).or_insert(ZERO);
        *e += z;
        if *e == ZERO {
            self.terms.retain(|_, v| *v != ZERO);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LaurentWord, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (w, z) in &other.terms {
            out.add_term(w.clone(), *z);
        }
        out
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }

    pub fn scale(&self, z: Complex64) -> Laurent {
        Laurent::from_terms(self.terms.iter().map(|(w, x)| (w.clone(), x * z)))
    }

    /// Back to an expression tree (sum of scaled products).
    pub fn to_ratexpr(&self) -> RatExpr {
        RatExpr::sum(
            self.terms
                .iter()
                .map(|(w, z)| {
                    let factors =
                        w.0.iter()
                            .map(|l| {
                                let v = RatExpr::var(&l.name);
                                if l.inverted {
                                    v.inv()
                                } else {
                                    v
                                }
                            })
                            .collect();
                    RatExpr::product(factors).scale(*z)
                })
                .collect(),
        )
    }

    /// Text form with terms ordered by `key` instead of the default word
    /// order.
    pub fn format_sorted_by<K: Ord>(&self, key: impl Fn(&LaurentWord) -> K) -> String {
        let mut terms: Vec<(&LaurentWord, &Complex64)> = self.terms.iter().collect();
        terms.sort_by_key(|(w, _)| key(w));
        let rendered: Vec<(Complex64, String)> = terms.into_iter().map(|(w, z)| (*z, w.render())).collect();
        text::join_terms_factored(&rendered)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_sorted_by(|w| w.clone()))
    }
}
