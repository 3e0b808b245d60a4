//! Shared pieces of the textual expression format.

use num_complex::Complex64;

fn real(x: f64) -> String {
    // `{}` on f64 is the shortest representation that parses back exactly.
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

/// Formats a complex scalar so that it can stand alone as a factor.
pub fn scalar(c: Complex64) -> String {
    if c.im == 0.0 {
        real(c.re)
    } else if c.re == 0.0 {
        format!("{}i", real(c.im))
    } else if c.im < 0.0 {
        format!("({}-{}i)", real(c.re), real(-c.im))
    } else {
        format!("({}+{}i)", real(c.re), real(c.im))
    }
}

fn is_negative(c: Complex64) -> bool {
    (c.im == 0.0 && c.re < 0.0) || (c.re == 0.0 && c.im < 0.0)
}

/// Joins `(coefficient, monomial)` pairs into `a*m1 + b*m2 - ...`. An empty
/// monomial string denotes the unit.
pub fn join_terms<'a, I>(terms: I) -> String
where
    I: IntoIterator<Item = (Complex64, &'a str)>,
{
    let mut out = String::new();
    for (i, (c, m)) in terms.into_iter().enumerate() {
        let (sign, c) = if is_negative(c) { ("-", -c) } else { ("+", c) };
        if i == 0 {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push(' ');
            out.push_str(sign);
            out.push(' ');
        }
        if m.is_empty() {
            out.push_str(&scalar(c));
        } else if c == Complex64::new(1.0, 0.0) {
            out.push_str(m);
        } else {
            out.push_str(&scalar(c));
            out.push('*');
            out.push_str(m);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Like [`join_terms`] but pulls out a common coefficient when every term
/// shares it, e.g. `2*(a + b)`.
pub fn join_terms_factored(terms: &[(Complex64, String)]) -> String {
    let one = Complex64::new(1.0, 0.0);
    if terms.len() > 1 {
        let c0 = terms[0].0;
        if c0 != one && terms.iter().all(|(c, _)| *c == c0) {
            let inner = join_terms(terms.iter().map(|(_, m)| (one, m.as_str())));
            return if is_negative(c0) {
                if c0 == -one {
                    format!("-({inner})")
                } else {
                    format!("-{}*({inner})", scalar(-c0))
                }
            } else {
                format!("{}*({inner})", scalar(c0))
            };
        }
    }
    join_terms(terms.iter().map(|(c, m)| (*c, m.as_str())))
}

/// Writes a sequence of symbol names as a product, compressing runs into
/// integer powers: `[a, a, b] -> a^2*b`.
pub fn power_product<S: AsRef<str>>(symbols: &[S]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < symbols.len() {
        let mut j = i + 1;
        while j < symbols.len() && symbols[j].as_ref() == symbols[i].as_ref() {
            j += 1;
        }
        if j - i == 1 {
            parts.push(symbols[i].as_ref().to_string());
        } else {
            parts.push(format!("{}^{}", symbols[i].as_ref(), j - i));
        }
        i = j;
    }
    parts.join("*")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars() {
        assert_eq!(scalar(Complex64::new(2.0, 0.0)), "2");
        assert_eq!(scalar(Complex64::new(0.0, -1.5)), "-1.5i");
        assert_eq!(scalar(Complex64::new(1.0, 2.0)), "(1+2i)");
        assert_eq!(scalar(Complex64::new(-0.0, 0.0)), "0");
    }

    #[test]
    fn factored_terms() {
        let two = Complex64::new(2.0, 0.0);
        let t = vec![(two, "a".to_string()), (two, "b".to_string())];
        assert_eq!(join_terms_factored(&t), "2*(a + b)");
        let t = vec![(two, "a".to_string()), (-two, "b".to_string())];
        assert_eq!(join_terms_factored(&t), "2*a - 2*b");
    }

    #[test]
    fn powers() {
        assert_eq!(power_product(&["a", "a", "b", "a"]), "a^2*b*a");
    }
}
