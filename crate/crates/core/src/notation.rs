//! Exponent notation for system configurations: `CA(2, 3^4)`,
//! `MCA(2, 7^1 6^1 2^8 3^2)`, optionally with a leading `N;` slot
//! (`CA(N; 2, 3^4)`), the positional form `CA(2, 4, 3)` (d, k, v) and
//! Unicode superscript exponents (`3⁴`).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{FactorSpec, Strength};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigNotation {
    pub spec: FactorSpec,
    pub strength: Strength,
    pub source: String,
}

impl ConfigNotation {
    /// Builds a configuration from a strength and explicit level counts.
    pub fn from_levels(d: usize, levels: Vec<u32>) -> Result<Self> {
        if d > levels.len() {
            return Err(Error::validation(format!(
                "strength {d} exceeds factor count {}",
                levels.len()
            )));
        }
        let spec = FactorSpec::new(levels)?;
        let strength = Strength::for_spec(d, &spec)?;
        let mut out = Self {
            spec,
            strength,
            source: String::new(),
        };
        out.source = out.canonical();
        Ok(out)
    }

    /// Canonical exponent notation, grouping runs of equal level counts.
    pub fn canonical(&self) -> String {
        let levels = self.spec.levels();
        let mut runs: Vec<(u32, usize)> = Vec::new();
        for &v in levels {
            match runs.last_mut() {
                Some((last, n)) if *last == v => *n += 1,
                _ => runs.push((v, 1)),
            }
        }
        let terms: Vec<String> = runs.iter().map(|(v, n)| format!("{v}^{n}")).collect();
        let prefix = if runs.len() == 1 { "CA" } else { "MCA" };
        format!("{prefix}({}, {})", self.strength, terms.join(" "))
    }
}

impl fmt::Display for ConfigNotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl FromStr for ConfigNotation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_notation(s)
    }
}

pub fn parse_notation(s: &str) -> Result<ConfigNotation> {
    let mut p = Parser::new(s);
    p.skip_ws();
    let word = p.word();
    if !word.eq_ignore_ascii_case("CA") && !word.eq_ignore_ascii_case("MCA") {
        return Err(Error::parse(0, "expected `CA(` or `MCA(`"));
    }
    p.skip_ws();
    p.expect('(')?;
    p.skip_ws();

    // Optional size slot: `N;` or a number followed by `;`.
    let save = p.pos;
    if p.eat('N') || p.eat('n') {
        p.skip_ws();
        p.expect(';')?;
    } else if p.number().is_ok() {
        p.skip_ws();
        if !p.eat(';') {
            p.pos = save;
        }
    }
    p.skip_ws();

    let d_pos = p.offset();
    let d = p.number()? as usize;
    p.skip_ws();
    p.expect(',')?;
    p.skip_ws();

    let mut levels = Vec::new();
    let first_pos = p.offset();
    let (v, exp) = p.term()?;
    p.skip_ws();
    if exp.is_none() && p.eat(',') {
        // Positional form: d, k, v.
        p.skip_ws();
        let v_pos = p.offset();
        let k = v;
        let v = p.number()?;
        let v = u32::try_from(v).map_err(|_| Error::parse(v_pos, "level count too large"))?;
        levels.extend(std::iter::repeat_n(v, k as usize));
        p.skip_ws();
    } else {
        push_term(&mut levels, v, exp.unwrap_or(1), first_pos)?;
        while !p.at(')') && !p.done() {
            let pos = p.offset();
            let (v, exp) = p.term()?;
            push_term(&mut levels, v, exp.unwrap_or(1), pos)?;
            p.skip_ws();
        }
    }
    p.expect(')')?;
    p.skip_ws();
    if !p.done() {
        return Err(Error::parse(p.offset(), "unexpected trailing input"));
    }
    if levels.len() > 4096 {
        return Err(Error::parse(first_pos, "too many factors"));
    }
    if d > levels.len() {
        return Err(Error::validation(format!(
            "strength {d} exceeds factor count {} (at position {d_pos})",
            levels.len()
        )));
    }
    let mut out = ConfigNotation::from_levels(d, levels)?;
    out.source = s.to_string();
    Ok(out)
}

fn push_term(levels: &mut Vec<u32>, v: u64, count: u64, pos: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::parse(pos, "level count too large"))?;
    if count == 0 {
        return Err(Error::parse(pos, "exponent must be at least 1"));
    }
    if count > 4096 {
        return Err(Error::parse(pos, "exponent too large"));
    }
    levels.extend(std::iter::repeat_n(v, count as usize));
    Ok(())
}

fn superscript_digit(c: char) -> Option<u64> {
    "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|s| s == c).map(|d| d as u64)
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            chars: src.char_indices().collect(),
            pos: 0,
            len: src.len(),
            _src: src,
        }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn done(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn at(&self, c: char) -> bool {
        self.peek() == Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.at(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |f| format!("`{f}`"));
            Err(Error::parse(self.offset(), format!("expected `{c}`, found {found}")))
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn word(&mut self) -> String {
        let mut w = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_alphabetic) {
            w.push(c);
            self.pos += 1;
        }
        w
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.offset();
        let mut value: u64 = 0;
        let mut digits = 0;
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            value = value
                .checked_mul(10)
                .and_then(|x| x.checked_add(d as u64))
                .ok_or_else(|| Error::parse(start, "number too large"))?;
            digits += 1;
            self.pos += 1;
        }
        if digits == 0 {
            return Err(Error::parse(start, "expected a number"));
        }
        Ok(value)
    }

    /// `v`, `v^n` or `v` followed by superscript digits.
    fn term(&mut self) -> Result<(u64, Option<u64>)> {
        let v = self.number()?;
        let save = self.pos;
        self.skip_ws();
        if self.eat('^') {
            self.skip_ws();
            return Ok((v, Some(self.number()?)));
        }
        if self.peek().and_then(superscript_digit).is_some() {
            let mut n = 0u64;
            while let Some(d) = self.peek().and_then(superscript_digit) {
                n = n.saturating_mul(10).saturating_add(d);
                self.pos += 1;
            }
            return Ok((v, Some(n)));
        }
        self.pos = save;
        Ok((v, None))
    }
}
