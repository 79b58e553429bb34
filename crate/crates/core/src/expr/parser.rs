//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' ['-' | '+'] integer)?
//! atom   := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`.

use super::{BinOp, Expr, Func, Var};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num { value: f64, integral: bool },
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Tok::End, start));
        };
        let tok = match c {
            b'0'..=b'9' | b'.' => self.number()?,
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c as char)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        Ok((tok, start))
    }

    fn number(&mut self) -> Result<Tok> {
        let start = self.pos;
        let mut integral = true;
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            integral = false;
            n += digits(self);
        }
        if n == 0 {
            return Err(Error::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // Not an exponent after all: leave `e` for the next token.
                self.pos = save;
            } else {
                integral = false;
            }
        }
        let text = &self.src[start..self.pos];
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        Ok(Tok::Num { value, integral })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Error {
        let found = match self.peek() {
            Tok::Num { value, .. } => format!("number {value}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        };
        Error::Syntax {
            offset: self.offset(),
            message: format!("expected {wanted}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::binary(op, lhs, self.term()?);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let sign = match self.peek() {
            Tok::Op('-') => {
                self.bump();
                -1
            }
            Tok::Op('+') => {
                self.bump();
                1
            }
            _ => 1,
        };
        let at = self.offset();
        match *self.peek() {
            Tok::Num { value, integral }
                if (integral || value.fract() == 0.0) && value <= i32::MAX as f64 =>
            {
                self.bump();
                Ok(Expr::pow(base, sign * value as i32))
            }
            _ => Err(Error::NonIntegerExponent { offset: at }),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num { value, .. } => {
                self.bump();
                Ok(Expr::Const(value))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "x" => return Ok(Expr::Var(Var::X)),
                    "y" => return Ok(Expr::Var(Var::Y)),
                    _ => {}
                }
                if *self.peek() != Tok::LParen {
                    return Err(Error::Syntax {
                        offset: at,
                        message: format!("unknown variable `{name}`; only x and y are defined"),
                    });
                }
                let func = Func::from_name(&name).ok_or(Error::UnknownFunction {
                    name: name.clone(),
                    offset: at,
                })?;
                self.bump();
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::call(func, arg))
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected("`)`"))
        }
    }
}

/// Parses expression text into a tree.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: Lexer::tokens(text)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syntax_offset(src: &str) -> usize {
        match parse(src) {
            Err(Error::Syntax { offset, .. }) => offset,
            other => panic!("{src}: expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn operator_without_operand() {
        assert_eq!(syntax_offset("x+*y"), 2);
        assert_eq!(syntax_offset("x+"), 2);
        assert_eq!(syntax_offset("(x"), 2);
        assert_eq!(syntax_offset("x y"), 2);
        assert_eq!(syntax_offset("x ? y"), 2);
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(parse(" x ^ 2 +y").unwrap(), parse("x^2+y").unwrap());
    }

    #[test]
    fn exponents_must_be_integers() {
        assert!(matches!(
            parse("x^2.5"),
            Err(Error::NonIntegerExponent { offset: 2 })
        ));
        assert!(matches!(
            parse("x^y"),
            Err(Error::NonIntegerExponent { offset: 2 })
        ));
        assert_eq!(parse("x^2.0").unwrap(), Expr::pow(Expr::x(), 2));
        assert_eq!(parse("x^-1").unwrap(), Expr::pow(Expr::x(), -1));
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(
            parse("1 + tan(x)"),
            Err(Error::UnknownFunction { offset: 4, .. })
        ));
        assert!(matches!(parse("z+1"), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn precedence() {
        let e = parse("-x^2").unwrap();
        assert_eq!(e.eval(3.0, 0.0).unwrap(), -9.0);
        assert_eq!(parse("2*3^2").unwrap().eval(0.0, 0.0).unwrap(), 18.0);
        assert_eq!(parse("8/4/2").unwrap().eval(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(parse("1-2-3").unwrap().eval(0.0, 0.0).unwrap(), -4.0);
        assert_eq!(parse("1.5e2+.5").unwrap().eval(0.0, 0.0).unwrap(), 150.5);
    }
}
