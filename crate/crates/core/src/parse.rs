//! Parser for the plain text form.
//!
//! ```text
//! expression := [ "+" | "-" ] term { ("+"|"-") term } | "0" ;
//! term       := [ scalar "*" ] factor { factor } ;
//! scalar     := rational | unknown | "(" linform ")" ;
//! linform    := [ "-" ] atom { ("+"|"-") atom } ;
//! atom       := rational | [ rational "*" ] unknown ;
//! rational   := [ "-" ] integer [ "/" integer ] ;
//! unknown    := "c" integer ;
//! factor     := "<" insertion { insertion } ">" [ "_" integer ] ;
//! insertion  := label [ "^" integer ] ;
//! label      := "x" | "i" | "j" | dummy-identifier ;
//! ```
//!
//! Whitespace and commas separate tokens and are otherwise ignored. Dummy identifiers
//! are lowercase alphanumeric words starting with a letter, other than `x`, `i`, `j`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::Expression;
use crate::scalar::{Rational, Scalar, Unknown};
use crate::term::{Correlator, Insertion, InvalidTerm, Label, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        pos: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("at byte {pos}: {source}")]
    Semantic { pos: usize, source: InvalidTerm },
    #[error("at byte {pos}: integer out of range")]
    Overflow { pos: usize },
    #[error("at byte {pos}: zero denominator")]
    ZeroDenominator { pos: usize },
    #[error("at byte {pos}: unknown c{index} is outside c1..c30")]
    UnknownOutOfRange { pos: usize, index: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lt,
    Gt,
    Caret,
    Underscore,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Int(String),
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lt => f.write_str("'<'"),
            Tok::Gt => f.write_str("'>'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::Underscore => f.write_str("'_'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Int(s) => write!(f, "integer {s}"),
            Tok::Ident(s) => write!(f, "identifier {s}"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        let start = pos;
        let tok = match b {
            b' ' | b'\t' | b'\r' | b'\n' | b',' => {
                pos += 1;
                continue;
            }
            b'<' => Tok::Lt,
            b'>' => Tok::Gt,
            b'^' => Tok::Caret,
            b'_' => Tok::Underscore,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                out.push((start, Tok::Int(src[start..pos].to_string())));
                continue;
            }
            b'a'..=b'z' => {
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_lowercase() || bytes[pos].is_ascii_digit())
                {
                    pos += 1;
                }
                out.push((start, Tok::Ident(src[start..pos].to_string())));
                continue;
            }
            _ => {
                let found = src[start..]
                    .chars()
                    .next()
                    .map(|c| format!("character {c:?}"))
                    .unwrap_or_default();
                return Err(ParseError::Syntax {
                    pos: start,
                    expected: vec!["token"],
                    found,
                });
            }
        };
        out.push((start, tok));
        pos += 1;
    }
    out.push((src.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

fn unknown_index(ident: &str) -> Option<&str> {
    let digits = ident.strip_prefix('c')?;
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then_some(digits)
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.at + offset).min(self.toks.len() - 1);
        &self.toks[idx].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            expected,
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(vec![name]))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Tok::Plus => {
                self.bump();
                Some(false)
            }
            Tok::Minus => {
                self.bump();
                Some(true)
            }
            _ => None,
        }
    }

    fn expression(&mut self) -> Result<Vec<(Scalar, Term)>, ParseError> {
        if matches!(self.peek(), Tok::Int(s) if s.bytes().all(|b| b == b'0'))
            && *self.peek_at(1) == Tok::Eof
        {
            self.bump();
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut negate = self.sign().unwrap_or(false);
        loop {
            let (scalar, term) = self.term()?;
            out.push((if negate { -scalar } else { scalar }, term));
            match self.sign() {
                Some(n) => negate = n,
                None => break,
            }
        }
        if *self.peek() != Tok::Eof {
            return Err(self.error(vec!["'+'", "'-'", "'<'", "end of input"]));
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Scalar, Term), ParseError> {
        let scalar = if *self.peek() == Tok::Lt {
            Scalar::one()
        } else {
            let s = self.scalar()?;
            self.expect(Tok::Star, "'*'")?;
            s
        };
        let term = self.product()?;
        Ok((scalar, term))
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let start = self.pos();
        let mut factors = vec![self.factor()?];
        while *self.peek() == Tok::Lt {
            factors.push(self.factor()?);
        }
        let term = Term::new(factors);
        term.check()
            .map_err(|source| ParseError::Semantic { pos: start, source })?;
        Ok(term)
    }

    fn scalar(&mut self) -> Result<Scalar, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let s = self.linform()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(s)
            }
            Tok::Ident(id) if unknown_index(&id).is_some() => Ok(Scalar::unknown(self.unknown()?)),
            Tok::Minus | Tok::Int(_) => Ok(Scalar::from(self.rational()?)),
            _ => Err(self.error(vec!["rational", "unknown", "'('", "'<'"])),
        }
    }

    fn linform(&mut self) -> Result<Scalar, ParseError> {
        let mut out = Scalar::zero();
        let mut negate = self.eat(&Tok::Minus);
        loop {
            let atom = self.atom()?;
            out = if negate { &out - &atom } else { &out + &atom };
            match self.sign() {
                Some(n) => negate = n,
                None => break,
            }
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Scalar, ParseError> {
        match self.peek().clone() {
            Tok::Ident(id) if unknown_index(&id).is_some() => Ok(Scalar::unknown(self.unknown()?)),
            Tok::Minus | Tok::Int(_) => {
                let q = self.rational()?;
                if self.eat(&Tok::Star) {
                    Ok(Scalar::term(q, self.unknown()?))
                } else {
                    Ok(Scalar::from(q))
                }
            }
            _ => Err(self.error(vec!["rational", "unknown"])),
        }
    }

    fn unknown(&mut self) -> Result<Unknown, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(id) => match unknown_index(&id) {
                Some(digits) => {
                    self.bump();
                    digits
                        .parse::<u32>()
                        .ok()
                        .and_then(Unknown::new)
                        .ok_or_else(|| ParseError::UnknownOutOfRange {
                            pos,
                            index: digits.to_string(),
                        })
                }
                None => Err(self.error(vec!["unknown"])),
            },
            _ => Err(self.error(vec!["unknown"])),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let negative = self.eat(&Tok::Minus);
        let numer = self.big_int()?;
        let denom = if self.eat(&Tok::Slash) {
            let pos = self.pos();
            let d = self.big_int()?;
            if d.is_zero() {
                return Err(ParseError::ZeroDenominator { pos });
            }
            d
        } else {
            BigInt::one()
        };
        let q = Rational::new(numer, denom);
        Ok(if negative { -q } else { q })
    }

    fn big_int(&mut self) -> Result<BigInt, ParseError> {
        match self.peek().clone() {
            Tok::Int(digits) => {
                self.bump();
                Ok(digits.parse().expect("lexer yields decimal digits"))
            }
            _ => Err(self.error(vec!["integer"])),
        }
    }

    fn small_int(&mut self) -> Result<u32, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(digits) => {
                self.bump();
                digits.parse().map_err(|_| ParseError::Overflow { pos })
            }
            _ => Err(self.error(vec!["integer"])),
        }
    }

    fn factor(&mut self) -> Result<Correlator, ParseError> {
        self.expect(Tok::Lt, "'<'")?;
        let mut insertions = vec![self.insertion()?];
        while matches!(self.peek(), Tok::Ident(_)) {
            insertions.push(self.insertion()?);
        }
        self.expect(Tok::Gt, "'>'")?;
        let genus = if self.eat(&Tok::Underscore) {
            self.small_int()?
        } else {
            0
        };
        Ok(Correlator::new(genus, insertions))
    }

    fn insertion(&mut self) -> Result<Insertion, ParseError> {
        let label = match self.peek().clone() {
            Tok::Ident(id) => {
                self.bump();
                match id.as_str() {
                    "x" => Label::External,
                    "i" => Label::HalfEdgeI,
                    "j" => Label::HalfEdgeJ,
                    _ => Label::dummy(id),
                }
            }
            _ => return Err(self.error(vec!["label"])),
        };
        let psi = if self.eat(&Tok::Caret) {
            self.small_int()?
        } else {
            0
        };
        Ok(Insertion::new(label, psi))
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(vec!["end of input"]))
        }
    }
}

/// Parses an expression, canonicalizing and collecting its terms.
pub fn parse_expression(src: &str) -> Result<Expression, ParseError> {
    let mut out = Expression::zero();
    for (scalar, term) in parse_terms(src)? {
        out.add_term(scalar, &term)
            .expect("parsed terms are validated");
    }
    Ok(out)
}

/// Parses an expression into its terms as written: validated, not canonicalized, with
/// zero coefficients and repeats kept.
pub fn parse_terms(src: &str) -> Result<Vec<(Scalar, Term)>, ParseError> {
    Parser::new(src)?.expression()
}

/// Parses a single product of brackets (no coefficient). The term is validated but keeps
/// its written dummy names and order.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.product()?;
    p.finish()?;
    Ok(t)
}

/// Parses a linear form such as `-1/80*c3 - c8 + 1/24*c15`.
pub fn parse_scalar(src: &str) -> Result<Scalar, ParseError> {
    let mut p = Parser::new(src)?;
    let s = p.linform()?;
    p.finish()?;
    Ok(s)
}
