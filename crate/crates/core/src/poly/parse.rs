//! Text grammar for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' INTEGER)?
//! atom   := INTEGER ('/' INTEGER)? | IDENT | '(' expr ')'
//! ```
//!
//! `IDENT` is `[A-Za-z][A-Za-z0-9_]*`. There is no implicit multiplication
//! and `/` only occurs inside fraction literals. The printer emits exactly
//! this grammar, terms in descending graded-lex order.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::polynomial::grlex_cmp;
use super::{Polynomial, Rational, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: undeclared variable `{name}`")]
    UndeclaredVariable {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("{line}:{column}: exponent must be a non-negative integer")]
    BadExponent { line: usize, column: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Caret => f.write_str("^"),
            Tok::Slash => f.write_str("/"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            Tok::Int(s.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' => Tok::Plus,
                '-' | '\u{2212}' => Tok::Minus,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                '/' => Tok::Slash,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ParseError::Syntax {
                        line: l,
                        column: col,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        column += i - start;
        out.push(Lexed {
            tok,
            line: l,
            column: col,
        });
    }
    out.push(Lexed {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Lexed>,
    pos: usize,
    vars: &'a VarSet,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let (line, column) = self.here();
        ParseError::Syntax {
            line,
            column,
            message: format!("expected {what}, found `{}`", self.peek()),
        }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.pos += 1;
        let (line, column) = self.here();
        let k = match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                if *self.peek() == Tok::Slash {
                    return Err(ParseError::BadExponent { line, column });
                }
                u32::try_from(&n).map_err(|_| ParseError::BadExponent { line, column })?
            }
            Tok::Minus | Tok::Ident(_) | Tok::LParen => {
                return Err(ParseError::BadExponent { line, column })
            }
            _ => return Err(self.unexpected("an exponent")),
        };
        Ok(base.pow(k))
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let (line, column) = self.here();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                let mut value = Rational::from_integer(n);
                if *self.peek() == Tok::Slash {
                    self.pos += 1;
                    match self.peek().clone() {
                        Tok::Int(d) if !d.is_zero() => {
                            self.pos += 1;
                            value /= Rational::from_integer(d);
                        }
                        Tok::Int(_) => {
                            return Err(ParseError::Syntax {
                                line,
                                column,
                                message: "zero denominator".into(),
                            })
                        }
                        _ => return Err(self.unexpected("a denominator")),
                    }
                }
                Ok(Polynomial::constant(self.vars, value))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                Polynomial::var(self.vars, &name).map_err(|_| ParseError::UndeclaredVariable {
                    line,
                    column,
                    name,
                })
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.unexpected("a number, variable or `(`")),
        }
    }
}

/// Parses `src` as a polynomial over `vars`.
pub fn parse(src: &str, vars: &VarSet) -> Result<Polynomial, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, vars };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(out)
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by(|a, b| grlex_cmp(b.0, a.0));
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut first = true;
            if !mag.is_one() || e.iter().all(|&x| x == 0) {
                write_rational(f, &mag)?;
                first = false;
            }
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(self.vars().name(i))?;
                if x > 1 {
                    write!(f, "^{x}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> VarSet {
        VarSet::of(&["x", "y", "z"])
    }

    #[test]
    fn precedence_and_fractions() {
        let p = parse("-x^2 + 3/4*y*(z - 1)", &v()).unwrap();
        assert_eq!(p.to_string(), "-x^2 + 3/4*y*z - 3/4*y");
        assert_eq!(parse("2^3", &v()).unwrap().to_string(), "8");
        assert_eq!(parse(" - (x)", &v()).unwrap().to_string(), "-x");
    }

    #[test]
    fn syntax_error_points_at_token() {
        match parse("x +* y", &v()) {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 4)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_implicit_multiplication_and_division() {
        assert!(parse("2x", &v()).is_err());
        assert!(parse("x y", &v()).is_err());
        assert!(parse("x/2", &v()).is_err());
    }

    #[test]
    fn exponent_errors() {
        assert!(matches!(
            parse("x^-1", &v()),
            Err(ParseError::BadExponent { .. })
        ));
        assert!(matches!(
            parse("x^1/2", &v()),
            Err(ParseError::BadExponent { .. })
        ));
        assert!(matches!(
            parse("x^y", &v()),
            Err(ParseError::BadExponent { .. })
        ));
    }

    #[test]
    fn undeclared_variable() {
        assert!(matches!(
            parse("x + w", &v()),
            Err(ParseError::UndeclaredVariable { column: 5, .. })
        ));
    }

    #[test]
    fn multiline_positions() {
        match parse("x +\n  )", &v()) {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
