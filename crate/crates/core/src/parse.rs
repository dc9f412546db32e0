//! Text shorthand for tower elements.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := uint | 'u' | 'v' | '(' expr ')' | '-' atom
//! ```
//!
//! `u` is the generator of K over GF(p), `v` the generator of L over K.
//! Examples: `v^2+v+1`, `(u+1)*v^2+u`.

use crate::error::{Error, Result};
use crate::tower::{FieldElement, TowerField};

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    tower: &'a TowerField,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at position {}", self.pos))
    }

    fn uint(&mut self) -> Result<u128> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail("expected integer"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| self.fail("integer overflow"))
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = self.tower.add(&acc, &self.term()?);
            } else if self.eat('-') {
                acc = self.tower.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = self.tower.mul(&acc, &self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.uint()?;
            Ok(self.tower.pow(&base, e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<FieldElement> {
        self.skip_ws();
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.tower.neg(&self.atom()?))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.fail("expected ')'"));
                }
                Ok(inner)
            }
            Some('u') => {
                self.pos += 1;
                if self.tower.s() < 2 {
                    return Err(self.fail("'u' requires s >= 2"));
                }
                Ok(self.tower.embed_k(&self.tower.k_gen()))
            }
            Some('v') => {
                self.pos += 1;
                Ok(self.tower.v())
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.uint()? % self.tower.p() as u128;
                Ok(self.tower.scalar_mul_int(k as u64, &self.tower.one()))
            }
            _ => Err(self.fail("expected element")),
        }
    }
}

/// Parses the shorthand grammar into a tower element.
pub fn parse_element(tower: &TowerField, text: &str) -> Result<FieldElement> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        tower,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.fail("trailing input"));
    }
    Ok(e)
}

/// Renders an element in the same shorthand, low powers of v first.
pub fn render_element(tower: &TowerField, x: &FieldElement) -> String {
    let mut parts = Vec::new();
    for (j, c) in x.coords().iter().enumerate() {
        if tower.k_is_zero(c) {
            continue;
        }
        let coeff = render_k(tower, c);
        let needs_parens = coeff.contains('+') || coeff.contains('-');
        let part = match j {
            0 => coeff,
            _ => {
                let vp = if j == 1 { "v".to_string() } else { format!("v^{j}") };
                if coeff == "1" {
                    vp
                } else if needs_parens {
                    format!("({coeff})*{vp}")
                } else {
                    format!("{coeff}*{vp}")
                }
            }
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

fn render_k(_tower: &TowerField, c: &crate::tower::KElem) -> String {
    let mut parts = Vec::new();
    for (t, &a) in c.coeffs().iter().enumerate() {
        if a == 0 {
            continue;
        }
        let part = match (t, a) {
            (0, _) => format!("{a}"),
            (1, 1) => "u".to_string(),
            (1, _) => format!("{a}*u"),
            (_, 1) => format!("u^{t}"),
            (_, _) => format!("{a}*u^{t}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{make_tower, TowerParams, DEFAULT_SIZE_GUARD};

    fn tower(p: u64, s: usize, n: usize) -> TowerField {
        make_tower(TowerParams { p, s, n }, DEFAULT_SIZE_GUARD).unwrap()
    }

    #[test]
    fn basic_expressions() {
        let f8 = tower(2, 1, 3);
        assert_eq!(parse_element(&f8, "v").unwrap(), f8.v());
        assert_eq!(parse_element(&f8, "1+1").unwrap(), f8.zero());
        assert_eq!(
            parse_element(&f8, "v^3").unwrap(),
            f8.add(&f8.v(), &f8.one()),
        );
        assert_eq!(
            parse_element(&f8, "(v+1)*(v+1)").unwrap(),
            f8.mul(&f8.add(&f8.v(), &f8.one()), &f8.add(&f8.v(), &f8.one())),
        );
    }

    #[test]
    fn subtraction_and_negation() {
        let f9 = tower(3, 1, 2);
        let two_v = parse_element(&f9, "2*v").unwrap();
        assert_eq!(parse_element(&f9, "-v").unwrap(), two_v);
        assert_eq!(parse_element(&f9, "v-v").unwrap(), f9.zero());
    }

    #[test]
    fn u_generator() {
        let t = tower(2, 2, 3);
        let u = parse_element(&t, "u").unwrap();
        // u generates GF(4): u^2 + u + 1 = 0
        let lhs = t.add(&t.add(&t.mul(&u, &u), &u), &t.one());
        assert!(t.is_zero(&lhs));
        assert!(parse_element(&tower(2, 1, 3), "u").is_err());
    }

    #[test]
    fn rejects_garbage() {
        let f8 = tower(2, 1, 3);
        assert!(parse_element(&f8, "v+").is_err());
        assert!(parse_element(&f8, "(v").is_err());
        assert!(parse_element(&f8, "v)").is_err());
        assert!(parse_element(&f8, "w").is_err());
        assert!(parse_element(&f8, "").is_err());
    }

    #[test]
    fn render_round_trip() {
        for t in [tower(2, 1, 4), tower(3, 1, 2), tower(2, 2, 2)] {
            for idx in 0..t.order() {
                let x = t.element_from_index(idx);
                let text = render_element(&t, &x);
                assert_eq!(parse_element(&t, &text).unwrap(), x, "{text}");
            }
        }
    }
}
