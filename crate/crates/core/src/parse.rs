//! Text grammar for polynomials, generator polynomials and rational
//! expressions.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary | <juxtaposed '('> unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := number ['i'] | 'i' | ident | 'inv' '(' expr ')' | '(' expr ')'
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ratexpr::RatExpr;
use crate::symbasis::{Gen, GenPoly};
use crate::words::{Chart, FreePoly};

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(Complex64),
    Ident(String),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64),
    Inv(Box<Ast>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Complex64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let ch = b[i];
        let start = i;
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((i, Tok::Plus)),
            b'-' => out.push((i, Tok::Minus)),
            b'*' => out.push((i, Tok::Star)),
            b'^' => out.push((i, Tok::Caret)),
            b'(' => out.push((i, Tok::LParen)),
            b')' => out.push((i, Tok::RParen)),
            b'0'..=b'9' | b'.' => {
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                    i += 1;
                }
                if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                    let mut j = i + 1;
                    if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                        j += 1;
                    }
                    if j < b.len() && b[j].is_ascii_digit() {
                        while j < b.len() && b[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let x: f64 =
                    text[start..i].parse().map_err(|_| err(start, format!("bad number `{}`", &text[start..i])))?;
                let imaginary = i < b.len()
                    && b[i] == b'i'
                    && !(i + 1 < b.len() && (b[i + 1].is_ascii_alphanumeric() || b[i + 1] == b'_'));
                if imaginary {
                    i += 1;
                    out.push((start, Tok::Num(Complex64::new(0.0, x))));
                } else {
                    out.push((start, Tok::Num(Complex64::new(x, 0.0))));
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                if word == "i" {
                    out.push((start, Tok::Num(Complex64::new(0.0, 1.0))));
                } else {
                    out.push((start, Tok::Ident(word.to_string())));
                }
                continue;
            }
            _ => return Err(err(i, format!("unexpected character `{}`", text[i..].chars().next().unwrap_or('?')))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(err(pos, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::LParen) => {
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(z)) if z.im == 0.0 && z.re.fract() == 0.0 && z.re >= 0.0 && z.re <= 1e6 => {
                let k = z.re as i64;
                Ok(Ast::Pow(Box::new(base), if negative { -k } else { k }))
            }
            _ => Err(err(pos, "exponent must be an integer")),
        }
    }

    fn atom(&mut self) -> Result<Ast> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(z)) => Ok(Ast::Num(z)),
            Some(Tok::Ident(name)) if name == "inv" => {
                self.expect(Tok::LParen, "`(` after inv")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Ast::Inv(Box::new(inner)))
            }
            Some(Tok::Ident(name)) => Ok(Ast::Ident(name)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(_) => Err(err(pos, "expected a number, name, or `(`")),
            None => Err(err(pos, "unexpected end of input")),
        }
    }
}

/// Parses text into a syntax tree.
pub fn parse_ast(text: &str) -> Result<Ast> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len() };
    let ast = p.expr()?;
    if p.at < p.toks.len() {
        return Err(err(p.pos(), "unexpected trailing input"));
    }
    Ok(ast)
}

/// What a piece of text denotes.
#[derive(Clone, Debug, PartialEq)]
pub enum Parsed {
    Poly(FreePoly),
    Gens(GenPoly),
    Rational(RatExpr),
}

fn generator(name: &str) -> Option<Gen> {
    if name == "U" {
        return Some(Gen::U);
    }
    let j = name.strip_prefix('M')?;
    if j.is_empty() || !j.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    j.parse().ok().map(Gen::M)
}

fn walk<'a>(a: &'a Ast, names: &mut Vec<&'a str>, rational: &mut bool) {
    match a {
        Ast::Num(_) => {}
        Ast::Ident(n) => names.push(n),
        Ast::Neg(x) => walk(x, names, rational),
        Ast::Add(x, y) | Ast::Sub(x, y) | Ast::Mul(x, y) => {
            walk(x, names, rational);
            walk(y, names, rational);
        }
        Ast::Pow(x, k) => {
            *rational |= *k < 0;
            walk(x, names, rational);
        }
        Ast::Inv(x) => {
            *rational = true;
            walk(x, names, rational);
        }
    }
}

/// Parses and classifies: a rational expression when `inv`, a negative
/// power, or one of `alpha, beta, gamma` occurs; a generator polynomial for
/// `U, M0, M1, ...`; otherwise a polynomial in `x, y` or in `u, v`.
pub fn parse(text: &str) -> Result<Parsed> {
    let ast = parse_ast(text)?;
    let mut names = Vec::new();
    let mut rational = false;
    walk(&ast, &mut names, &mut rational);
    let xy = names.iter().any(|n| *n == "x" || *n == "y");
    let uv = names.iter().any(|n| *n == "u" || *n == "v");
    if xy && uv {
        return Err(Error::MixedChart);
    }
    let gens = names.iter().any(|n| generator(n).is_some());
    if gens {
        if let Some(bad) = names.iter().find(|n| generator(n).is_none()) {
            return Err(err(0, format!("`{bad}` cannot appear next to generator symbols")));
        }
        if rational {
            return Err(err(0, "generator polynomials have no inverses"));
        }
        return Ok(Parsed::Gens(to_gens(&ast)?));
    }
    rational |= names.iter().any(|n| matches!(*n, "alpha" | "beta" | "gamma"));
    if rational {
        return Ok(Parsed::Rational(to_ratexpr(&ast)));
    }
    let chart = if uv { Chart::Uv } else { Chart::Standard };
    let letters: &[&str] = if uv { &["u", "v"] } else { &["x", "y"] };
    Ok(Parsed::Poly(to_poly(&ast, letters, chart)?))
}

/// Parses a polynomial in the given letters.
pub fn parse_poly(text: &str, letters: &[&str], chart: Chart) -> Result<FreePoly> {
    to_poly(&parse_ast(text)?, letters, chart)
}

pub fn parse_ratexpr(text: &str) -> Result<RatExpr> {
    Ok(to_ratexpr(&parse_ast(text)?))
}

/// Comma-separated complex literals such as `1, -2+1i`.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>> {
    text.split(',')
        .map(|s| parse_ratexpr(s)?.as_scalar().ok_or_else(|| err(0, format!("`{}` is not a complex number", s.trim()))))
        .collect()
}

pub fn parse_genpoly(text: &str) -> Result<GenPoly> {
    to_gens(&parse_ast(text)?)
}

fn to_poly(a: &Ast, letters: &[&str], chart: Chart) -> Result<FreePoly> {
    let d = letters.len();
    Ok(match a {
        Ast::Num(z) => FreePoly::constant_in(d, chart, *z),
        Ast::Ident(n) => {
            let j = letters.iter().position(|l| l == n).ok_or_else(|| err(0, format!("unknown variable `{n}`")))?;
            FreePoly::var_in(d, chart, j)
        }
        Ast::Neg(x) => -to_poly(x, letters, chart)?,
        Ast::Add(x, y) => to_poly(x, letters, chart)? + to_poly(y, letters, chart)?,
        Ast::Sub(x, y) => to_poly(x, letters, chart)? - to_poly(y, letters, chart)?,
        Ast::Mul(x, y) => to_poly(x, letters, chart)? * to_poly(y, letters, chart)?,
        Ast::Pow(x, k) if *k >= 0 => to_poly(x, letters, chart)?.pow(*k as u32),
        Ast::Pow(..) | Ast::Inv(_) => return Err(err(0, "inverse in a polynomial")),
    })
}

fn to_ratexpr(a: &Ast) -> RatExpr {
    match a {
        Ast::Num(z) => RatExpr::scalar(*z),
        Ast::Ident(n) => RatExpr::var(n),
        Ast::Neg(x) => -to_ratexpr(x),
        Ast::Add(x, y) => to_ratexpr(x) + to_ratexpr(y),
        Ast::Sub(x, y) => to_ratexpr(x) - to_ratexpr(y),
        Ast::Mul(x, y) => to_ratexpr(x) * to_ratexpr(y),
        Ast::Pow(x, k) => to_ratexpr(x).pow(*k as i32),
        Ast::Inv(x) => to_ratexpr(x).inv(),
    }
}

fn to_gens(a: &Ast) -> Result<GenPoly> {
    Ok(match a {
        Ast::Num(z) => GenPoly::constant(*z),
        Ast::Ident(n) => GenPoly::generator(generator(n).ok_or_else(|| err(0, format!("unknown generator `{n}`")))?),
        Ast::Neg(x) => to_gens(x)?.scale(Complex64::new(-1.0, 0.0)),
        Ast::Add(x, y) => to_gens(x)?.add(&to_gens(y)?),
        Ast::Sub(x, y) => to_gens(x)?.add(&to_gens(y)?.scale(Complex64::new(-1.0, 0.0))),
        Ast::Mul(x, y) => to_gens(x)?.mul(&to_gens(y)?),
        Ast::Pow(x, k) if *k >= 0 => {
            let base = to_gens(x)?;
            let mut acc = GenPoly::constant(Complex64::new(1.0, 0.0));
            for _ in 0..*k {
                acc = acc.mul(&base);
            }
            acc
        }
        Ast::Pow(..) | Ast::Inv(_) => return Err(err(0, "inverse in a generator polynomial")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::girard::girard;
    use crate::linalg::c;

    #[test]
    fn polynomial_with_two_terms() {
        match parse("x*y + y*x").unwrap() {
            Parsed::Poly(p) => {
                assert_eq!(p.len(), 2);
                assert_eq!(p.to_string(), "x*y + y*x");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn p2_text_is_p2() {
        let Parsed::Rational(e) = parse("2*(alpha^2 + beta)").unwrap() else { panic!() };
        assert_eq!(e.expand().unwrap(), girard(2).p.expand().unwrap());
    }

    #[test]
    fn inverse_node() {
        let Parsed::Rational(e) = parse("inv(beta)").unwrap() else { panic!() };
        assert!(matches!(e.node(), crate::ratexpr::Node::Inverse(_)));
        let Parsed::Rational(e) = parse("x^-2").unwrap() else { panic!() };
        assert_eq!(e.to_string(), "inv(x^2)");
    }

    #[test]
    fn complex_literals_and_juxtaposition() {
        let Parsed::Poly(p) = parse("(1+2i)*x - 2i*y^0 + 3(x)(y)").unwrap_or_else(|e| panic!("{e}")) else { panic!() };
        assert_eq!(p.len(), 3);
        let Parsed::Poly(q) = parse("-1.5e-3i*u").unwrap() else { panic!() };
        assert_eq!(q.to_string(), "-0.0015i*u");
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("x*u"), Err(Error::MixedChart)));
        assert!(matches!(parse("x + * y"), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse("x^1.5"), Err(Error::Parse { .. })));
        assert!(matches!(parse("(x + y"), Err(Error::Parse { pos: 6, .. })));
        assert!(matches!(parse("x $ y"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse("z + x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn generator_polynomials() {
        let Parsed::Gens(g) = parse("2*(U^3 + U*M0 + M1 + M0*U)").unwrap() else { panic!() };
        assert_eq!(g.len(), 4);
        assert_eq!(g.coeff(&[Gen::M(1)]), c(2.0, 0.0));
        assert_eq!(g.to_string(), "2*(U^3 + U*M0 + M1 + M0*U)");
    }

    #[test]
    fn printed_ratexpr_reparses_structurally() {
        for n in -2..=4 {
            let e = girard(n).p;
            let back = parse_ratexpr(&e.to_string()).unwrap();
            assert_eq!(back, e, "n = {n}: {e}");
        }
    }
}
