use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::color::Color;
use crate::diagram::{Diagram, DiagramJson};
use crate::lincomb::{LinComb, Q};
use crate::Error;

pub type Bindings = HashMap<String, Color>;

/// Parses `a=1+,b=2-` into a binding table.
pub fn parse_bindings(s: &str) -> Result<Bindings, Error> {
    let mut out = Bindings::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("bad binding `{part}`")))?;
        let k = k.trim();
        if k.is_empty() || !k.chars().all(|c| c.is_alphanumeric() || c == '_') || k.chars().next().unwrap().is_ascii_digit() {
            return Err(Error::Parse(format!("bad symbol `{k}`")));
        }
        out.insert(k.to_string(), v.parse()?);
    }
    Ok(out)
}

struct Parser<'a> {
    s: &'a str,
    i: usize,
    binds: &'a Bindings,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, Error> {
        Err(Error::Parse(format!("{msg} at offset {} in `{}`", self.i, self.s)))
    }
    fn ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.i += c.len_utf8();
            } else {
                break;
            }
        }
    }
    fn peek(&self) -> Option<char> {
        self.s[self.i..].chars().next()
    }
    fn eat(&mut self, c: char) -> bool {
        self.ws();
        if self.peek() == Some(c) {
            self.i += c.len_utf8();
            true
        } else {
            false
        }
    }
    fn expect(&mut self, c: char) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(&format!("expected `{c}`"))
        }
    }
    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let st = self.i;
        while let Some(c) = self.peek() {
            if f(c) {
                self.i += c.len_utf8();
            } else {
                break;
            }
        }
        &self.s[st..self.i]
    }

    fn expr(&mut self) -> Result<LinComb<Q>, Error> {
        let mut out = LinComb::new();
        self.ws();
        if self.s[self.i..].trim() == "0" {
            self.i = self.s.len();
            return Ok(out);
        }
        let mut sign = Q::one();
        if self.eat('-') || self.eat('−') {
            sign = -sign;
        } else {
            self.eat('+');
        }
        loop {
            let (c, ds) = self.term()?;
            for d in ds {
                out.add_diagram(&d, &(&sign * &c));
            }
            self.ws();
            if self.peek().is_none() {
                return Ok(out);
            }
            sign = if self.eat('+') {
                Q::one()
            } else if self.eat('-') || self.eat('−') {
                -Q::one()
            } else {
                return self.err("expected `+` or `-`");
            };
        }
    }

    fn rational(&mut self) -> Result<Q, Error> {
        self.ws();
        let neg = self.eat('-');
        self.ws();
        let n = self.take_while(|c| c.is_ascii_digit());
        let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad number in `{}`", self.s)))?;
        let mut x = Q::from_integer(n);
        if self.eat('/') {
            self.ws();
            let d = self.take_while(|c| c.is_ascii_digit());
            let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad number in `{}`", self.s)))?;
            if d.is_zero() {
                return self.err("zero denominator");
            }
            x /= Q::from_integer(d);
        }
        Ok(if neg { -x } else { x })
    }

    fn term(&mut self) -> Result<(Q, Vec<Diagram>), Error> {
        self.ws();
        let mut coef = Q::one();
        if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '-') {
            coef = self.rational()?;
            if !self.eat('*') {
                // a bare number is not an atom
                return self.err("expected `*` after coefficient");
            }
        }
        Ok((coef, vec![self.atom()?]))
    }

    fn atom(&mut self) -> Result<Diagram, Error> {
        self.ws();
        if self.peek() == Some('{') {
            let st = self.i;
            let mut depth = 0;
            for (k, c) in self.s[st..].char_indices() {
                match c {
                    '{' => depth += 1,
                    '}' => {
                        depth -= 1;
                        if depth == 0 {
                            self.i = st + k + 1;
                            let j: DiagramJson = serde_json::from_str(&self.s[st..self.i])
                                .map_err(|e| Error::Parse(format!("bad JSON diagram: {e}")))?;
                            return Diagram::from_json(&j);
                        }
                    }
                    _ => {}
                }
            }
            return self.err("unterminated JSON diagram");
        }
        let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
        self.expect('(')?;
        match name {
            "O" => {
                let cs = self.colors(')')?;
                self.expect(')')?;
                if cs.is_empty() {
                    return self.err("O needs at least one color");
                }
                Ok(Diagram::one_loop(&cs))
            }
            "T" => {
                let cs = self.colors(')')?;
                self.expect(')')?;
                if cs.len() < 3 {
                    return self.err("T needs at least 3 colors");
                }
                Ok(Diagram::tree(&cs))
            }
            "theta" => {
                let a = self.colors(';')?;
                self.expect(';')?;
                let b = self.colors(';')?;
                self.expect(';')?;
                let c = self.colors(')')?;
                self.expect(')')?;
                Ok(Diagram::theta(&a, &b, &c))
            }
            "strut" => {
                let cs = self.colors(')')?;
                self.expect(')')?;
                if cs.len() != 2 {
                    return self.err("strut needs 2 colors");
                }
                Ok(Diagram::strut(cs[0], cs[1]))
            }
            _ => self.err(&format!("unknown atom `{name}`")),
        }
    }

    fn colors(&mut self, end: char) -> Result<Vec<Color>, Error> {
        let mut out = Vec::new();
        self.ws();
        if self.peek() == Some(end) {
            return Ok(out);
        }
        loop {
            self.ws();
            let tok = self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '+' || c == '-' || c == '−');
            if tok.is_empty() {
                return self.err("expected color");
            }
            let c = if tok.starts_with(|c: char| c.is_ascii_digit()) {
                tok.parse::<Color>()?
            } else {
                *self.binds.get(tok).ok_or_else(|| Error::Parse(format!("unbound color symbol `{tok}`")))?
            };
            out.push(c);
            if !self.eat(',') {
                return Ok(out);
            }
        }
    }
}

/// Parses an expression into a canonical linear combination over ℚ.
pub fn parse(text: &str, binds: &Bindings) -> Result<LinComb<Q>, Error> {
    let mut p = Parser { s: text, i: 0, binds };
    p.expr()
}

/// Parses a single diagram atom without canonicalizing it.
pub fn parse_diagram(text: &str, binds: &Bindings) -> Result<Diagram, Error> {
    let mut p = Parser { s: text, i: 0, binds };
    let d = p.atom()?;
    p.ws();
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(d)
}

pub fn serialize_diagram(d: &Diagram) -> String {
    serde_json::to_string(&d.to_json()).unwrap()
}
