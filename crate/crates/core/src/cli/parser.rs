//! Expression syntax for noncommutative q-polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := '-' term | factor ('*' factor)*
//! factor := atom ['^' signed-int]
//! atom   := rational | 'i' | 'q' ['^' '(' signed-int '/' '2' ')' | '^' signed-int]
//!         | identifier | '(' expr ')'
//! ```
//!
//! Juxtaposition is not multiplication; products keep their written order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ncalg::{AlgebraSpec, NCPoly};
use crate::qcoeff::{GaussRat, LaurentScalar};

/// Position in the source, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Rational(BigRational),
    Imaginary,
    /// `q^(k/2)`, stored as `k`.
    QPower(i32),
    Symbol(String),
    Sum(Box<Expr>, Box<Expr>),
    Difference(Box<Expr>, Box<Expr>),
    /// Factors in written order.
    Product(Vec<Expr>),
    Power(Box<Expr>, i32),
    Negation(Box<Expr>),
    Group(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

fn syntax(span: Span, message: impl Into<String>) -> Error {
    Error::Syntax {
        line: span.line,
        column: span.column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut k = 0;
    while k < chars.len() {
        let (off, ch) = chars[k];
        let start = Span {
            line,
            column: col,
            offset: off,
            len: 1,
        };
        if ch == '\n' {
            line += 1;
            col = 1;
            k += 1;
            continue;
        }
        if ch.is_whitespace() {
            col += 1;
            k += 1;
            continue;
        }
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, span: start });
            col += 1;
            k += 1;
            continue;
        }
        let mut j = k;
        if ch.is_ascii_digit() {
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[k..j].iter().map(|c| c.1).collect();
            let n: BigInt = text.parse().map_err(|_| syntax(start, "bad integer"))?;
            out.push(Token {
                tok: Tok::Int(n),
                span: Span { len: j - k, ..start },
            });
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_' || chars[j].1 == '\'') {
                j += 1;
            }
            let text: String = chars[k..j].iter().map(|c| c.1).collect();
            out.push(Token {
                tok: Tok::Ident(text),
                span: Span { len: j - k, ..start },
            });
        } else {
            return Err(syntax(start, format!("unexpected character `{ch}`")));
        }
        col += j - k;
        k = j;
    }
    out.push(Token {
        tok: Tok::End,
        span: Span {
            line,
            column: col,
            offset: src.len(),
            len: 0,
        },
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn join(a: Span, b: Span) -> Span {
    Span {
        len: (b.offset + b.len).saturating_sub(a.offset),
        ..a
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Span> {
        if *self.peek() == want {
            Ok(self.bump().span)
        } else {
            Err(syntax(self.span(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = self.peek().clone();
            if op != Tok::Plus && op != Tok::Minus {
                return Ok(lhs);
            }
            self.bump();
            let rhs = self.term()?;
            let span = join(lhs.span, rhs.span);
            let kind = if op == Tok::Plus {
                ExprKind::Sum(Box::new(lhs), Box::new(rhs))
            } else {
                ExprKind::Difference(Box::new(lhs), Box::new(rhs))
            };
            lhs = Expr { kind, span };
        }
    }

    fn term(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().span;
            let inner = self.term()?;
            let span = join(start, inner.span);
            return Ok(Expr {
                kind: ExprKind::Negation(Box::new(inner)),
                span,
            });
        }
        let first = self.factor()?;
        let mut factors = vec![first];
        while *self.peek() == Tok::Star {
            self.bump();
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().unwrap());
        }
        let span = join(factors[0].span, factors[factors.len() - 1].span);
        Ok(Expr {
            kind: ExprKind::Product(factors),
            span,
        })
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let span = self.span();
        match self.bump().tok {
            Tok::Int(n) => {
                let n = if neg { -n } else { n };
                i64::try_from(n).ok().filter(|v| v.abs() <= 1 << 20).ok_or_else(|| syntax(span, "exponent too large"))
            }
            _ => Err(syntax(span, "expected an integer exponent")),
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let atom = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(atom);
        }
        if matches!(atom.kind, ExprKind::QPower(_)) {
            return Err(syntax(self.span(), "repeated exponent"));
        }
        self.bump();
        let e = self.signed_int()?;
        let span = join(atom.span, self.prev_span());
        Ok(Expr {
            kind: ExprKind::Power(Box::new(atom), e as i32),
            span,
        })
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.bump();
        let span = t.span;
        match t.tok {
            Tok::Int(n) => {
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let dspan = self.span();
                    let d = match self.bump().tok {
                        Tok::Int(d) => d,
                        _ => return Err(syntax(dspan, "expected a denominator")),
                    };
                    if d.is_zero() {
                        return Err(syntax(dspan, "zero denominator"));
                    }
                    return Ok(Expr {
                        kind: ExprKind::Rational(BigRational::new(n, d)),
                        span: join(span, dspan),
                    });
                }
                Ok(Expr {
                    kind: ExprKind::Rational(BigRational::from_integer(n)),
                    span,
                })
            }
            Tok::Ident(name) if name == "i" => Ok(Expr {
                kind: ExprKind::Imaginary,
                span,
            }),
            Tok::Ident(name) if name == "q" => {
                if *self.peek() != Tok::Caret {
                    return Ok(Expr {
                        kind: ExprKind::QPower(2),
                        span,
                    });
                }
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let k = self.signed_int()?;
                    self.expect(Tok::Slash, "`/`")?;
                    let two = self.span();
                    match self.bump().tok {
                        Tok::Int(d) if d == BigInt::from(2) => {}
                        _ => return Err(syntax(two, "half-integer exponent must be written k/2")),
                    }
                    let end = self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr {
                        kind: ExprKind::QPower(k as i32),
                        span: join(span, end),
                    });
                }
                let k = self.signed_int()?;
                Ok(Expr {
                    kind: ExprKind::QPower(2 * k as i32),
                    span: join(span, self.prev_span()),
                })
            }
            Tok::Ident(name) => Ok(Expr {
                kind: ExprKind::Symbol(name),
                span,
            }),
            Tok::LParen => {
                let inner = self.expr()?;
                let end = self.expect(Tok::RParen, "`)`")?;
                Ok(Expr {
                    kind: ExprKind::Group(Box::new(inner)),
                    span: join(span, end),
                })
            }
            Tok::End => Err(syntax(span, "unexpected end of input")),
            other => Err(syntax(span, format!("unexpected {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Int(_) => "number",
        Tok::Ident(_) => "identifier",
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/`",
        Tok::Caret => "`^`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::End => "end of input",
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.span(), format!("unexpected {}", describe(p.peek()))));
    }
    Ok(e)
}

/// Lowers to a normal-ordered polynomial in `spec`.
pub fn lower(spec: &AlgebraSpec, e: &Expr) -> Result<NCPoly> {
    match &e.kind {
        ExprKind::Rational(r) => Ok(NCPoly::scalar(LaurentScalar::constant(GaussRat::real(r.clone())))),
        ExprKind::Imaginary => Ok(NCPoly::scalar(LaurentScalar::i())),
        ExprKind::QPower(k) => Ok(NCPoly::scalar(LaurentScalar::s_pow(*k))),
        ExprKind::Symbol(name) => spec.gen(name).map_err(|_| syntax(e.span, format!("unknown generator `{name}`"))),
        ExprKind::Sum(x, y) => Ok(&lower(spec, x)? + &lower(spec, y)?),
        ExprKind::Difference(x, y) => Ok(&lower(spec, x)? - &lower(spec, y)?),
        ExprKind::Product(fs) => {
            let mut acc = NCPoly::one();
            for f in fs {
                acc = spec.multiply(&acc, &lower(spec, f)?)?;
            }
            Ok(acc)
        }
        ExprKind::Power(x, k) => {
            let base = lower(spec, x)?;
            if *k >= 0 {
                return spec.pow(&base, *k as u32);
            }
            let inv = base
                .as_scalar()
                .and_then(|c| c.inverse())
                .ok_or_else(|| syntax(e.span, "negative powers apply to monomial scalars only"))?;
            Ok(NCPoly::scalar(inv.pow(k.unsigned_abs())))
        }
        ExprKind::Negation(x) => Ok(-&lower(spec, x)?),
        ExprKind::Group(x) => lower(spec, x),
    }
}

/// [`parse`] followed by [`lower`].
pub fn parse_poly(spec: &AlgebraSpec, src: &str) -> Result<NCPoly> {
    lower(spec, &parse(src)?)
}

/// Canonical text; [`parse_poly`] inverts it.
pub fn print_canonical(spec: &AlgebraSpec, p: &NCPoly) -> String {
    spec.render(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::specs;

    #[test]
    fn ordered_products() {
        let e = parse("q^(1/2)*a*b - b*a").unwrap();
        let ExprKind::Difference(lhs, rhs) = e.kind else { panic!() };
        let ExprKind::Product(fs) = lhs.kind else { panic!() };
        assert_eq!(fs[0].kind, ExprKind::QPower(1));
        assert_eq!(fs[1].kind, ExprKind::Symbol("a".into()));
        let ExprKind::Product(gs) = rhs.kind else { panic!() };
        assert_eq!(gs[0].kind, ExprKind::Symbol("b".into()));
    }

    #[test]
    fn lowering_examples() {
        let spec = specs::slq2();
        let p = parse_poly(&spec, "d*a").unwrap();
        let expected = &spec.word(&["a", "d"]).unwrap()
            - &spec.word(&["b", "c"]).unwrap().scale(&(&LaurentScalar::q() - &LaurentScalar::q_pow(-1)));
        assert_eq!(p, expected);
        let det = parse_poly(&spec, "(a*d - q*b*c)").unwrap();
        assert_eq!(print_canonical(&spec, &det), "a*d - q*b*c");
        assert_eq!(print_canonical(&spec, &NCPoly::zero()), "0");
        assert_eq!(parse_poly(&spec, "q^-1*q").unwrap(), NCPoly::one());
        assert_eq!(parse_poly(&spec, "a^2").unwrap(), spec.word(&["a", "a"]).unwrap());
        assert_eq!(parse_poly(&spec, "(2*q)^-1").unwrap(), NCPoly::scalar(LaurentScalar::q_pow(-1).scale(&GaussRat::from_ratio(1, 2))));
    }

    #[test]
    fn errors_carry_positions() {
        let spec = specs::slq2();
        match parse("a +\n  * b") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        match parse_poly(&spec, "a*zz") {
            Err(Error::Syntax { line, column, message }) => {
                assert_eq!((line, column), (1, 3));
                assert!(message.contains("zz"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse("a b").is_err());
        assert!(parse("q^(1/3)").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse_poly(&spec, "a^-1").is_err());
        assert!(parse("").is_err());
    }
}
