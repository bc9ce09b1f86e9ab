//! Recursive-descent reader for the infix form produced by `Display`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' exponent)?
//! atom  := number | 'I' | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Exponents are integers or half-integers written `(k/2)`.

use super::expr::{half_phase_of, parse_rational, trig_of};
use super::{Coeff, Expr, SymError};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

pub fn parse(s: &str) -> Result<Expr, SymError> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> SymError {
        SymError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), SymError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.eat(b'/') {
                let d = self.unary()?;
                acc = acc.div_expr(&d)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, SymError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SymError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let (num, den) = self.exponent()?;
        match den {
            1 => {
                if num < 0 && base.is_zero() {
                    return Err(SymError::DivisionByZero);
                }
                Ok(base.powi(num))
            }
            2 => Ok(base.sqrt()?.powi(num)),
            _ => Err(self.err("only integer and half-integer exponents are supported")),
        }
    }

    fn exponent(&mut self) -> Result<(i64, i64), SymError> {
        if self.eat(b'(') {
            let neg = self.eat(b'-');
            let n = self.integer()?;
            let d = if self.eat(b'/') { self.integer()? } else { 1 };
            self.expect(b')')?;
            return Ok((if neg { -n } else { n }, d));
        }
        let neg = self.eat(b'-');
        let n = self.integer()?;
        Ok((if neg { -n } else { n }, 1))
    }

    fn integer(&mut self) -> Result<i64, SymError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err("expected integer"))
    }

    fn atom(&mut self) -> Result<Expr, SymError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                let lit = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let r = parse_rational(lit).ok_or_else(|| self.err("bad number"))?;
                Ok(Expr::big_rational(r))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                if self.peek() == Some(b'(') {
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(b')')?;
                    return self.call(&name, arg);
                }
                if name == "I" {
                    return Ok(Expr::i());
                }
                Ok(Expr::sym(&name))
            }
            _ => Err(self.err("expected operand")),
        }
    }

    fn call(&self, name: &str, arg: Expr) -> Result<Expr, SymError> {
        match name {
            "sin" | "cos" => {
                if arg.is_zero() {
                    return Ok(if name == "sin" { Expr::zero() } else { Expr::one() });
                }
                trig_of(&arg, name == "sin")
            }
            "sqrt" => arg.sqrt(),
            "exp" => {
                // exp(I*k*s/2): divide out I/2 and require an integer combination
                let lin = arg.scale(&(&Coeff::i() * &Coeff::from_int(-2)));
                half_phase_of(&lin)
            }
            _ => Err(self.err(&format!("unknown function {name}"))),
        }
    }
}
