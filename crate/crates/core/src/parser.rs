//! Equation parser and canonical formatter.
//!
//! Grammar (whitespace insignificant, explicit `*` required):
//!
//! ```text
//! equation := expr "=" expr
//! expr     := term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := ("+" | "-") factor | primary ["^" signed_int]
//! primary  := integer | variable | "(" expr ")"
//! variable := letter (letter | digit | "_")*
//! ```
//!
//! A `^` after an integer or a parenthesised expression is accepted as well;
//! only variables may carry negative exponents, and only in Laurent mode.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{PolyError, Polynomial};

/// Largest exponent accepted on a parenthesised expression or integer.
const MAX_GROUP_EXPONENT: i64 = 255;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub offset: usize,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected {found}, expected {expected}")]
    Unexpected { found: String, expected: &'static str },
    #[error("missing `=`")]
    MissingEquals,
    #[error("more than one `=`")]
    ExtraEquals,
    #[error("empty {0} side")]
    EmptySide(&'static str),
    #[error("exponent {0} out of range (|e| must be below 2^31)")]
    ExponentOverflow(BigInt),
    #[error("negative exponent requires Laurent mode (enable the `laurent` parse option / --laurent flag)")]
    NegativeExponentWithoutLaurent,
    #[error("exponent {0} not allowed on a parenthesised expression or integer")]
    GroupExponent(i64),
    #[error("{0}")]
    Polynomial(PolyError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept negative exponents on variables.
    pub laurent: bool,
}

/// A parsed equation `lhs = rhs`, normalized as `lhs − rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub lhs_text: String,
    pub rhs_text: String,
    pub normalized: Polynomial,
    /// Variables in order of first appearance.
    pub variable_order: Vec<String>,
    /// Nonzero constant term present (inhomogeneous case).
    pub has_constant_term: bool,
}

impl Equation {
    pub fn constant_term(&self) -> BigInt {
        self.normalized.constant_term()
    }
}

/// Exponent vector of a product form `x1^c1 * … * xn^cn = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductForm {
    pub variables: Vec<String>,
    pub exponents: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Equals,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::Ident(s) => format!("variable `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Equals => "`=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.chars().count(), |nl| {
        before[nl + 1..].chars().count()
    }) + 1;
    (line, col)
}

fn error(text: &str, offset: usize, kind: ParseErrorKind) -> ParseError {
    let (line, col) = line_col(text, offset);
    ParseError {
        kind,
        offset,
        line,
        col,
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = text[i..].chars().next().expect("in bounds");
        let start = i;
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' => Tok::Equals,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(text[start..i].parse().expect("digits")), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            other => return Err(error(text, start, ParseErrorKind::UnexpectedChar(other))),
        };
        out.push((tok, start));
        i += c.len_utf8();
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: Vec<String>,
    opts: ParseOptions,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        error(self.text, self.offset(), kind)
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        self.err(ParseErrorKind::Unexpected {
            found: self.peek().describe(),
            expected,
        })
    }

    fn poly_err(&self, e: PolyError) -> ParseError {
        self.err(ParseErrorKind::Polynomial(e))
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let f = self.factor()?;
            acc = acc.mul(&f).map_err(|e| self.poly_err(e))?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(self.factor()?.neg())
            }
            Tok::Plus => {
                self.bump();
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let start = self.offset();
        let negative = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        match self.bump() {
            Tok::Int(v) => {
                let v = if negative { -v } else { v };
                let limit = BigInt::one() << 31;
                if v >= limit || v <= -limit.clone() {
                    return Err(error(self.text, start, ParseErrorKind::ExponentOverflow(v)));
                }
                Ok(i64::try_from(&v).expect("bounded"))
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("an integer exponent"))
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(v) => {
                let base = Polynomial::constant(self.vars.clone(), v);
                self.group_exponent(base)
            }
            Tok::Ident(name) => {
                let i = self.vars.iter().position(|v| *v == name).expect("collected");
                let mut e = 1;
                if *self.peek() == Tok::Caret {
                    self.bump();
                    let exp_at = self.offset();
                    e = self.signed_int()?;
                    if e < 0 && !self.opts.laurent {
                        return Err(error(
                            self.text,
                            exp_at,
                            ParseErrorKind::NegativeExponentWithoutLaurent,
                        ));
                    }
                }
                let mut exps = vec![0i32; self.vars.len()];
                exps[i] = e as i32;
                Polynomial::from_terms(self.vars.clone(), [(exps, 1)], self.opts.laurent)
                    .map_err(|err| error(self.text, at, ParseErrorKind::Polynomial(err)))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                self.group_exponent(inner)
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("an integer, a variable or `(`"))
            }
        }
    }

    fn group_exponent(&mut self, base: Polynomial) -> Result<Polynomial, ParseError> {
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let e = self.signed_int()?;
        if !(0..=MAX_GROUP_EXPONENT).contains(&e) {
            return Err(error(self.text, at, ParseErrorKind::GroupExponent(e)));
        }
        base.pow(e as u32)
            .map_err(|err| error(self.text, at, ParseErrorKind::Polynomial(err)))
    }
}

/// Variables in order of first appearance.
fn collect_variables(toks: &[(Tok, usize)]) -> Vec<String> {
    let mut vars: Vec<String> = Vec::new();
    for (t, _) in toks {
        if let Tok::Ident(s) = t {
            if !vars.contains(s) {
                vars.push(s.clone());
            }
        }
    }
    vars
}

pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    parse_equation_with(text, ParseOptions::default())
}

pub fn parse_equation_with(text: &str, opts: ParseOptions) -> Result<Equation, ParseError> {
    let toks = lex(text)?;
    let eqs: Vec<usize> = toks
        .iter()
        .filter(|(t, _)| *t == Tok::Equals)
        .map(|(_, o)| *o)
        .collect();
    match eqs.len() {
        0 => return Err(error(text, text.len(), ParseErrorKind::MissingEquals)),
        1 => {}
        _ => return Err(error(text, eqs[1], ParseErrorKind::ExtraEquals)),
    }
    let eq_at = eqs[0];
    if toks[0].0 == Tok::Equals {
        return Err(error(text, eq_at, ParseErrorKind::EmptySide("left-hand")));
    }
    let eq_index = toks.iter().position(|(t, _)| *t == Tok::Equals).expect("one");
    if toks[eq_index + 1].0 == Tok::End {
        return Err(error(text, text.len(), ParseErrorKind::EmptySide("right-hand")));
    }

    let vars = collect_variables(&toks);
    let mut p = Parser {
        text,
        toks,
        pos: 0,
        vars: vars.clone(),
        opts,
    };
    let lhs = p.expr()?;
    if *p.peek() != Tok::Equals {
        return Err(p.unexpected("an operator or `=`"));
    }
    p.bump();
    let rhs = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    let mut normalized = lhs.sub(&rhs);
    if opts.laurent {
        normalized = normalized.into_laurent();
    }
    Ok(Equation {
        lhs_text: text[..eq_at].trim().to_string(),
        rhs_text: text[eq_at + 1..].trim().to_string(),
        has_constant_term: !normalized.constant_term().is_zero(),
        normalized,
        variable_order: vars,
    })
}

/// Recognizes `x1^c1 * x2^c2 * … = 1`; `None` for anything else.
///
/// Repeated variables have their exponents added.
pub fn parse_product_form(text: &str) -> Option<ProductForm> {
    let toks = lex(text).ok()?;
    let mut variables: Vec<String> = Vec::new();
    let mut exponents: Vec<i64> = Vec::new();
    let mut i = 0;
    loop {
        let Tok::Ident(name) = &toks[i].0 else {
            return None;
        };
        i += 1;
        let mut e: i64 = 1;
        if toks[i].0 == Tok::Caret {
            i += 1;
            let negative = match toks[i].0 {
                Tok::Minus => {
                    i += 1;
                    true
                }
                Tok::Plus => {
                    i += 1;
                    false
                }
                _ => false,
            };
            let Tok::Int(v) = &toks[i].0 else {
                return None;
            };
            i += 1;
            e = i64::try_from(v).ok()?;
            if negative {
                e = -e;
            }
        }
        match variables.iter().position(|v| v == name) {
            Some(k) => exponents[k] = exponents[k].checked_add(e)?,
            None => {
                variables.push(name.clone());
                exponents.push(e);
            }
        }
        match &toks[i].0 {
            Tok::Star => i += 1,
            Tok::Equals => break,
            _ => return None,
        }
    }
    i += 1;
    match (&toks[i].0, &toks.get(i + 1)?.0) {
        (Tok::Int(one), Tok::End) if one.is_one() => {}
        _ => return None,
    }
    if exponents.iter().all(Zero::is_zero) {
        return None;
    }
    Some(ProductForm {
        variables,
        exponents,
    })
}

/// Canonical text: graded-lex terms, explicit coefficients and operators.
pub fn format(p: &Polynomial) -> String {
    p.to_string()
}

/// Parses canonical text (or any expression) as a polynomial `expr = 0`.
pub fn parse_polynomial(text: &str, opts: ParseOptions) -> Result<Polynomial, ParseError> {
    let eq = parse_equation_with(&format!("{text} = 0"), opts)?;
    Ok(eq.normalized)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schur_square() {
        let eq = parse_equation("x + y = z^2").unwrap();
        assert_eq!(format(&eq.normalized), "1*x + 1*y + -1*z^2");
        assert!(!eq.has_constant_term);
        assert_eq!(eq.variable_order, vec!["x", "y", "z"]);
        assert_eq!(eq.lhs_text, "x + y");
        assert_eq!(eq.rhs_text, "z^2");
    }

    #[test]
    fn product_expansion() {
        let eq = parse_equation("x*(y1+y2) = z^2").unwrap();
        assert_eq!(format(&eq.normalized), "1*x*y1 + 1*x*y2 + -1*z^2");
    }

    #[test]
    fn trivial_identity_is_zero() {
        let eq = parse_equation("x = x").unwrap();
        assert!(eq.normalized.is_zero());
        assert_eq!(format(&eq.normalized), "0");
    }

    #[test]
    fn constant_term_flag() {
        let eq = parse_equation("x + y - z = 1").unwrap();
        assert!(eq.has_constant_term);
        assert_eq!(eq.constant_term(), BigInt::from(-1));
    }

    #[test]
    fn unary_minus_binds_to_factor() {
        let eq = parse_equation("-x^2 = y").unwrap();
        assert_eq!(format(&eq.normalized), "-1*y + -1*x^2");
        let eq = parse_equation("x - -y = 0").unwrap();
        assert_eq!(format(&eq.normalized), "1*x + 1*y");
    }

    #[test]
    fn group_power() {
        let eq = parse_equation("x1*x2 = (y1+y2)^2").unwrap();
        assert_eq!(
            format(&eq.normalized),
            "1*x1*x2 + -1*y1^2 + -2*y1*y2 + -1*y2^2"
        );
    }

    #[test]
    fn implicit_multiplication_rejected() {
        let e = parse_equation("x(y1+y2) = z").unwrap_err();
        assert_eq!((e.line, e.col), (1, 2));
        assert!(matches!(e.kind, ParseErrorKind::Unexpected { .. }));
    }

    #[test]
    fn error_positions() {
        let e = parse_equation("x + y").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingEquals);
        let e = parse_equation(" = y").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptySide("left-hand"));
        let e = parse_equation("x =").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptySide("right-hand"));
        let e = parse_equation("x + $ = y").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedChar('$'));
        assert_eq!((e.offset, e.line, e.col), (4, 1, 5));
        let e = parse_equation("x = y\n + * z").unwrap_err();
        assert_eq!((e.line, e.col), (2, 4));
        assert!(e.to_string().starts_with("2:4:"));
    }

    #[test]
    fn exponent_limits() {
        let e = parse_equation("x^2147483648 = y").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ExponentOverflow(_)));
        assert!(parse_equation("x^2147483647 = y").is_ok());
        let e = parse_equation("x^-1 = y").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NegativeExponentWithoutLaurent);
        assert!(e.kind.to_string().contains("laurent"));
        let eq = parse_equation_with("x^-1 = y", ParseOptions { laurent: true }).unwrap();
        assert_eq!(format(&eq.normalized), "1*x^-1 + -1*y");
    }

    #[test]
    fn product_forms() {
        let pf = parse_product_form("x^1 * y^1 * z^-2 = 1").unwrap();
        assert_eq!(pf.exponents, vec![1, 1, -2]);
        assert_eq!(pf.variables, vec!["x", "y", "z"]);
        assert_eq!(parse_product_form("x^2 = 1").unwrap().exponents, vec![2]);
        assert_eq!(parse_product_form("x + y = 1"), None);
        assert_eq!(parse_product_form("x*y = z"), None);
        assert_eq!(parse_product_form("x*y*x^-1 = 1").unwrap().exponents, vec![0, 1]);
    }

    #[test]
    fn canonical_roundtrip_examples() {
        for s in ["x + y = z^2", "x*(y1+y2) = z^2", "3*x1 - 2*x2*x3^4 + 7 = 0", "x = x"] {
            let p = parse_equation(s).unwrap().normalized;
            let q = parse_polynomial(&format(&p), ParseOptions::default()).unwrap();
            assert_eq!(p.embed(q.variables()).unwrap(), q);
        }
    }
}
