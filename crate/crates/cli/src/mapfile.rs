//! Map files: a JSON schema for programs and a `var = expression` text form
//! for people.
//!
//! JSON:
//!
//! ```json
//! {"domain_vars": ["x", "y"], "codomain_vars": ["s", "t"],
//!  "images": [[[1, 1, {"s": 2}]], [[1, 1, {"s": 1, "t": 1}], [-1, 2, {"t": 2}]]]}
//! ```
//!
//! Each term is `[numerator, denominator, exponents]`; numerators and
//! denominators are JSON integers or decimal strings, exponents either an
//! object keyed by codomain name or a dense array in codomain order.
//!
//! Text:
//!
//! ```text
//! # the cusp
//! codomain: a b
//! x = (a + b)^2
//! y = a^2 - b^2
//! z = (a - b)^2
//! ```

use std::collections::HashMap;

use implicit_core::polyring::PolyError;
use implicit_core::{Monomial, QPoly, Rational, RingMap};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown variable `{name}`{}", location(*.line))]
    UnknownVariable { name: String, line: Option<usize> },
    #[error("zero denominator{}", location(*.line))]
    ZeroDenominator { line: Option<usize> },
    #[error("invalid map: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn location(line: Option<usize>) -> String {
    line.map(|l| format!(" on line {l}")).unwrap_or_default()
}

impl From<PolyError> for MapError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::InvalidMap(msg) => MapError::Invalid(msg),
            other => MapError::Invalid(other.to_string()),
        }
    }
}

/// Parses either format, choosing JSON when the first non-blank character is `{`.
pub fn parse_map(source: &str) -> Result<RingMap, MapError> {
    if source.trim_start().starts_with('{') {
        parse_json(source)
    } else {
        parse_text(source)
    }
}

pub fn parse_map_file(path: &std::path::Path) -> Result<RingMap, MapError> {
    parse_map(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------- JSON

pub fn parse_json(source: &str) -> Result<RingMap, MapError> {
    let value: Value = serde_json::from_str(source).map_err(|e| MapError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| invalid("top level must be an object"))?;
    let domain = string_list(obj, "domain_vars")?;
    let codomain = string_list(obj, "codomain_vars")?;
    let index: HashMap<&str, usize> = codomain
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let images_json = obj
        .get("images")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("`images` must be an array"))?;
    let m = codomain.len();
    let mut images = Vec::with_capacity(images_json.len());
    for (i, img) in images_json.iter().enumerate() {
        let terms = img
            .as_array()
            .ok_or_else(|| invalid(&format!("image {i} must be an array of terms")))?;
        let mut poly = QPoly::zero(m);
        for term in terms {
            let parts = term.as_array().filter(|p| p.len() == 3).ok_or_else(|| {
                invalid(&format!("image {i}: a term must be [num, den, exponents]"))
            })?;
            let num = json_integer(&parts[0])?;
            let den = json_integer(&parts[1])?;
            if den.is_zero() {
                return Err(MapError::ZeroDenominator { line: None });
            }
            let mono = json_exponents(&parts[2], &index, m)?;
            poly.add_term(mono, Rational::new(num, den));
        }
        images.push(poly);
    }
    Ok(RingMap::new(domain, codomain, images)?)
}

fn invalid(msg: &str) -> MapError {
    MapError::Invalid(msg.to_string())
}

fn string_list(obj: &Map<String, Value>, key: &str) -> Result<Vec<String>, MapError> {
    obj.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| invalid(&format!("`{key}` must be an array of names")))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| invalid(&format!("`{key}` must contain strings")))
        })
        .collect()
}

fn json_integer(v: &Value) -> Result<BigInt, MapError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| invalid(&format!("coefficient {n} is not an integer"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| invalid(&format!("coefficient `{s}` is not an integer"))),
        other => Err(invalid(&format!("coefficient {other} is not an integer"))),
    }
}

fn json_exponents(v: &Value, index: &HashMap<&str, usize>, m: usize) -> Result<Monomial, MapError> {
    let exponent = |e: &Value| {
        e.as_u64()
            .and_then(|e| u32::try_from(e).ok())
            .ok_or_else(|| invalid(&format!("exponent {e} is not a small nonnegative integer")))
    };
    match v {
        Value::Object(map) => {
            let mut pairs = Vec::with_capacity(map.len());
            for (name, e) in map {
                let var = *index
                    .get(name.as_str())
                    .ok_or_else(|| MapError::UnknownVariable {
                        name: name.clone(),
                        line: None,
                    })?;
                pairs.push((var, exponent(e)?));
            }
            Ok(Monomial::from_pairs(pairs))
        }
        Value::Array(dense) => {
            if dense.len() != m {
                return Err(invalid(&format!(
                    "dense exponent record has {} entries, expected {m}",
                    dense.len()
                )));
            }
            let exps = dense
                .iter()
                .map(exponent)
                .collect::<Result<Vec<u32>, _>>()?;
            Ok(Monomial::from_dense(&exps))
        }
        other => Err(invalid(&format!(
            "exponents {other} must be an object or array"
        ))),
    }
}

fn json_number(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => json!(i),
        None => json!(v.to_string()),
    }
}

/// A polynomial as a list of `[num, den, {var: exp}]` terms, leading term first.
pub fn terms_json(poly: &QPoly, names: &[String]) -> Value {
    Value::Array(
        poly.terms()
            .map(|(mono, c)| {
                let exps: Map<String, Value> = mono
                    .iter()
                    .map(|(v, e)| (names[v].clone(), json!(e)))
                    .collect();
                json!([json_number(c.numer()), json_number(c.denom()), exps])
            })
            .collect(),
    )
}

pub fn emit_json(map: &RingMap) -> String {
    let images: Vec<Value> = map
        .images()
        .iter()
        .map(|img| terms_json(img, map.codomain_names()))
        .collect();
    let value = json!({
        "domain_vars": map.domain_names(),
        "codomain_vars": map.codomain_names(),
        "images": images,
    });
    let mut out = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
    out.push('\n');
    out
}

// ---------------------------------------------------------------- text

pub fn emit_text(map: &RingMap) -> String {
    let mut out = format!("codomain: {}\n", map.codomain_names().join(" "));
    for (name, img) in map.domain_names().iter().zip(map.images()) {
        out.push_str(&format!("{name} = {}\n", img.display(map.codomain_names())));
    }
    out
}

pub fn parse_text(source: &str) -> Result<RingMap, MapError> {
    let mut codomain: Option<Vec<String>> = None;
    let mut domain = Vec::new();
    let mut images = Vec::new();
    for (k, raw) in source.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.trim_start().strip_prefix("codomain:") {
            if codomain.is_some() {
                return Err(syntax(line_no, 1, "duplicate `codomain:` header"));
            }
            let names: Vec<String> = rest
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            for name in &names {
                if !is_identifier(name) {
                    return Err(syntax(
                        line_no,
                        1,
                        &format!("`{name}` is not a variable name"),
                    ));
                }
            }
            codomain = Some(names);
            continue;
        }
        let names = codomain
            .as_ref()
            .ok_or_else(|| syntax(line_no, 1, "expected a `codomain:` header first"))?;
        let Some(eq) = line.find('=') else {
            return Err(syntax(line_no, 1, "expected `name = expression`"));
        };
        let lhs = line[..eq].trim();
        if !is_identifier(lhs) {
            return Err(syntax(
                line_no,
                1,
                &format!("`{lhs}` is not a variable name"),
            ));
        }
        let index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut parser = Parser {
            chars: line.char_indices().skip_while(|&(i, _)| i <= eq).collect(),
            pos: 0,
            line: line_no,
            index: &index,
            m: names.len(),
        };
        let poly = parser.expression()?;
        parser.skip_space();
        if let Some(&(col, c)) = parser.chars.get(parser.pos) {
            return Err(syntax(line_no, col + 1, &format!("unexpected `{c}`")));
        }
        domain.push(lhs.to_string());
        images.push(poly);
    }
    let codomain = codomain.ok_or_else(|| invalid("missing `codomain:` header"))?;
    Ok(RingMap::new(domain, codomain, images)?)
}

fn syntax(line: usize, column: usize, message: &str) -> MapError {
    MapError::Syntax {
        line,
        column,
        message: message.to_string(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Recursive-descent parser for `+ - * / ^`, parentheses, integers and names.
/// Division is only by nonzero constants; exponents are nonnegative integers.
struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    index: &'a HashMap<&'a str, usize>,
    m: usize,
}

impl Parser<'_> {
    fn skip_space(&mut self) {
        while self
            .chars
            .get(self.pos)
            .is_some_and(|(_, c)| c.is_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_space();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .or(self.chars.last())
            .map_or(1, |&(i, _)| i + 1)
    }

    fn error(&self, message: &str) -> MapError {
        syntax(self.line, self.column(), message)
    }

    fn expression(&mut self) -> Result<QPoly, MapError> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<QPoly, MapError> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let column = self.column();
            let rhs = self.unary()?;
            if op == '*' {
                acc = &acc * &rhs;
            } else {
                let divisor = constant_value(&rhs)
                    .ok_or_else(|| syntax(self.line, column, "can only divide by a constant"))?;
                if divisor.is_zero() {
                    return Err(MapError::ZeroDenominator {
                        line: Some(self.line),
                    });
                }
                acc = acc.scale(&divisor.recip());
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<QPoly, MapError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<QPoly, MapError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_space();
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected a nonnegative integer exponent"));
            }
            let e: u32 = digits
                .parse()
                .map_err(|_| self.error("exponent is too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn atom(&mut self) -> Result<QPoly, MapError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expression()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits();
                let value: BigInt = digits.parse().expect("nonempty digit string");
                Ok(QPoly::constant(self.m, Rational::from_integer(value)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let line = self.line;
                let mut name = String::new();
                while let Some(&(_, c)) = self.chars.get(self.pos) {
                    if !(c.is_ascii_alphanumeric() || c == '_') {
                        break;
                    }
                    name.push(c);
                    self.pos += 1;
                }
                let var = *self
                    .index
                    .get(name.as_str())
                    .ok_or(MapError::UnknownVariable {
                        name,
                        line: Some(line),
                    })?;
                Ok(QPoly::variable(self.m, var))
            }
            Some(c) => Err(self.error(&format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

fn constant_value(p: &QPoly) -> Option<Rational> {
    match p.len() {
        0 => Some(Rational::zero()),
        1 => {
            let (mono, c) = p.terms().next().expect("one term");
            mono.is_one().then(|| c.clone())
        }
        _ => None,
    }
}

/// `true` when every coefficient is an integer of modest size (used by callers
/// choosing a compact rendering).
pub fn is_small_integral(poly: &QPoly) -> bool {
    poly.terms()
        .all(|(_, c)| c.denom().is_one() && c.numer().abs() < BigInt::from(1u64 << 53))
}
