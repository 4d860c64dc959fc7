//! Line-oriented text format for singular subalgebroids (`.sfo` files).
//!
//! ```text
//! # rotations of the plane
//! vars: x y
//! ambient: tangent
//! generators:
//!   - -y*dx + x*dy
//! ```
//!
//! `ambient` is `tangent` (the default), `action <name>` or
//! `liealgebra <name>` with `<name>` one of `so2 so3 su2 gl2 t2` or `custom`;
//! `custom` takes its realization from a `matrices:` block whose items are
//! rational matrices written row-major with `;` between rows. Generators are
//! ℚ-polynomial combinations of frame symbols: `d<var>` for the tangent
//! bundle, `e1, e2, …` for algebra frames.

use std::fmt::Write as _;

use num::{Signed, ToPrimitive};
use thiserror::Error;

use crate::poly::{format_rational, parse_rational, FreeModuleElem, GroebnerConfig, Poly, Rational};

use super::{AmbientAlgebroid, AmbientKind, GeometryError, RatMatrix, SingularSubalgebroid};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct DslError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, DslError> {
    Err(DslError { line, col, message: message.into() })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        match c {
            ' ' | '\t' => {
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, col));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, col));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // p/q literal
                if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                match parse_rational(&text) {
                    Some(r) => out.push((Tok::Num(r), col)),
                    None => return err(line, col, format!("malformed rational `{text}`")),
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            other => return err(line, col, format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Value {
    Scalar(Poly),
    Section(Vec<Poly>),
}

struct ExprParser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    ctx: &'a Context,
}

struct Context {
    vars: Vec<String>,
    frame: Vec<String>,
    nvars: usize,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Value, DslError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    let col = self.col();
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.add(acc, rhs, false, col)?;
                }
                Some(Tok::Minus) => {
                    let col = self.col();
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.add(acc, rhs, true, col)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value, DslError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            let col = self.col();
            self.pos += 1;
            let rhs = self.unary()?;
            acc = self.mul(acc, rhs, col)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Value, DslError> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            let v = self.unary()?;
            return Ok(match v {
                Value::Scalar(p) => Value::Scalar(-p),
                Value::Section(s) => Value::Section(s.iter().map(|p| -p).collect()),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Value, DslError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let col = self.col();
            let exp = match self.next() {
                Some((Tok::Num(r), _)) if r.is_integer() && !r.is_negative() => r.to_integer().to_u32(),
                _ => None,
            };
            let Some(e) = exp else {
                return err(self.line, col, "exponent must be a non-negative integer");
            };
            return match base {
                Value::Scalar(p) => Ok(Value::Scalar(p.pow(e))),
                Value::Section(s) if e == 1 => Ok(Value::Section(s)),
                Value::Section(_) => err(self.line, col, "frame symbols cannot be raised to a power"),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value, DslError> {
        let col = self.col();
        match self.next() {
            Some((Tok::Num(r), _)) => Ok(Value::Scalar(Poly::constant(self.ctx.nvars, r))),
            Some((Tok::Ident(name), _)) => {
                let n = self.ctx.nvars;
                if let Some(i) = self.ctx.vars.iter().position(|v| *v == name) {
                    Ok(Value::Scalar(Poly::var(n, i)))
                } else if let Some(a) = self.ctx.frame.iter().position(|f| *f == name) {
                    let mut s = vec![Poly::zero(n); self.ctx.frame.len()];
                    s[a] = Poly::one(n);
                    Ok(Value::Section(s))
                } else {
                    err(self.line, col, format!("unknown identifier `{name}`"))
                }
            }
            Some((Tok::LParen, _)) => {
                let v = self.expr()?;
                match self.next() {
                    Some((Tok::RParen, _)) => Ok(v),
                    _ => err(self.line, self.toks.get(self.pos - 1).map(|t| t.1).unwrap_or(self.end_col), "expected `)`"),
                }
            }
            Some(_) => err(self.line, col, "expected a number, variable, frame symbol or `(`"),
            None => err(self.line, col, "unexpected end of expression"),
        }
    }

    fn add(&self, a: Value, b: Value, negate: bool, col: usize) -> Result<Value, DslError> {
        let b = if negate {
            match b {
                Value::Scalar(p) => Value::Scalar(-p),
                Value::Section(s) => Value::Section(s.iter().map(|p| -p).collect()),
            }
        } else {
            b
        };
        match (a, b) {
            (Value::Scalar(p), Value::Scalar(q)) => Ok(Value::Scalar(&p + &q)),
            (Value::Section(s), Value::Section(t)) => Ok(Value::Section(s.iter().zip(&t).map(|(p, q)| p + q).collect())),
            (Value::Scalar(p), v @ Value::Section(_)) | (v @ Value::Section(_), Value::Scalar(p)) if p.is_zero() => Ok(v),
            _ => err(self.line, col, "cannot add a scalar to a section"),
        }
    }

    fn mul(&self, a: Value, b: Value, col: usize) -> Result<Value, DslError> {
        match (a, b) {
            (Value::Scalar(p), Value::Scalar(q)) => Ok(Value::Scalar(&p * &q)),
            (Value::Scalar(p), Value::Section(s)) | (Value::Section(s), Value::Scalar(p)) => {
                Ok(Value::Section(s.iter().map(|c| &p * c).collect()))
            }
            _ => err(self.line, col, "product of two frame symbols is not a section"),
        }
    }
}

fn parse_section(text: &str, line: usize, col0: usize, ctx: &Context) -> Result<FreeModuleElem, DslError> {
    let toks = lex(text, line, col0)?;
    let end_col = col0 + text.chars().count();
    if toks.is_empty() {
        return err(line, col0, "empty expression");
    }
    let mut p = ExprParser { toks, pos: 0, line, end_col, ctx };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return err(line, p.col(), "unexpected token after expression");
    }
    match v {
        Value::Section(s) => Ok(FreeModuleElem::new(ctx.nvars, s)),
        Value::Scalar(s) if s.is_zero() => Ok(FreeModuleElem::zero(ctx.nvars, ctx.frame.len())),
        Value::Scalar(_) => err(line, col0, "generator must be linear in the frame symbols"),
    }
}

fn parse_matrix(text: &str, line: usize, col0: usize) -> Result<RatMatrix, DslError> {
    let mut rows = Vec::new();
    for row in text.split(';') {
        let mut r = Vec::new();
        for tok in row.split_whitespace() {
            match parse_rational(tok) {
                Some(v) => r.push(v),
                None => return err(line, col0, format!("malformed rational `{tok}`")),
            }
        }
        rows.push(r);
    }
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return err(line, col0, "matrix must be square");
    }
    Ok(rows)
}

#[derive(PartialEq, Clone, Copy)]
enum Block {
    None,
    Matrices,
    Generators,
}

/// Parse the text format into a singular subalgebroid (involutivity unchecked).
pub fn parse(source: &str) -> Result<SingularSubalgebroid, GeometryError> {
    parse_with_config(source, GroebnerConfig::default())
}

pub fn parse_with_config(source: &str, config: GroebnerConfig) -> Result<SingularSubalgebroid, GeometryError> {
    let mut vars: Option<Vec<String>> = None;
    let mut ambient_spec: Option<(String, Option<String>, usize)> = None;
    let mut matrices: Vec<RatMatrix> = Vec::new();
    let mut gen_lines: Vec<(String, usize, usize)> = Vec::new();
    let mut block = Block::None;

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let trimmed = content.trim();
        if let Some(rest) = trimmed.strip_prefix('-') {
            let col = indent + 2 + (rest.len() - rest.trim_start().len());
            match block {
                Block::Generators => gen_lines.push((rest.trim().to_string(), line, col)),
                Block::Matrices => matrices.push(parse_matrix(rest, line, col)?),
                Block::None => return Err(err::<()>(line, indent + 1, "list item outside of a block").unwrap_err().into()),
            }
            continue;
        }
        let Some((key, value)) = trimmed.split_once(':') else {
            return Err(DslError { line, col: indent + 1, message: format!("expected `key: value`, found `{trimmed}`") }.into());
        };
        let value = value.trim();
        match key.trim() {
            "vars" => {
                let vs: Vec<String> = value.split_whitespace().map(str::to_string).collect();
                for v in &vs {
                    if !v.chars().next().is_some_and(|c| c.is_alphabetic()) || !v.chars().all(|c| c.is_alphanumeric() || c == '_') {
                        return Err(DslError { line, col: indent + 1, message: format!("invalid variable name `{v}`") }.into());
                    }
                }
                vars = Some(vs);
                block = Block::None;
            }
            "ambient" => {
                let mut parts = value.split_whitespace();
                let kind = parts.next().unwrap_or("").to_string();
                let name = parts.next().map(str::to_string);
                ambient_spec = Some((kind, name, line));
                block = Block::None;
            }
            "matrices" => {
                block = Block::Matrices;
            }
            "generators" => {
                block = Block::Generators;
            }
            other => {
                return Err(DslError { line, col: indent + 1, message: format!("unknown key `{other}`") }.into());
            }
        }
    }

    let vars = vars.unwrap_or_default();
    let (kind, name, aline) = ambient_spec.unwrap_or(("tangent".into(), None, 0));
    let ambient = match kind.as_str() {
        "tangent" => AmbientAlgebroid::tangent(vars.len()),
        "action" | "liealgebra" => {
            let name = name.ok_or_else(|| DslError { line: aline, col: 1, message: "missing algebra name".into() })?;
            let mats = if name == "custom" {
                if matrices.is_empty() {
                    return Err(DslError { line: aline, col: 1, message: "custom algebra needs a matrices block".into() }.into());
                }
                matrices.clone()
            } else {
                super::algebroid::named_realization(&name).ok_or(GeometryError::UnknownAlgebra(name.clone()))?
            };
            if kind == "action" {
                AmbientAlgebroid::linear_action(&name, mats)?
            } else {
                AmbientAlgebroid::lie_algebra(&name, mats)?
            }
        }
        other => return Err(DslError { line: aline, col: 1, message: format!("unknown ambient `{other}`") }.into()),
    };
    if vars.len() != ambient.base_dim() {
        return Err(GeometryError::DimensionMismatch { expected: ambient.base_dim(), found: vars.len() });
    }
    let frame: Vec<String> = (0..ambient.rank()).map(|a| ambient.frame_symbol(a, &vars)).collect();
    let ctx = Context { vars: vars.clone(), frame, nvars: vars.len() };
    let gens = gen_lines
        .iter()
        .map(|(text, line, col)| parse_section(text, *line, *col, &ctx))
        .collect::<Result<Vec<_>, _>>()?;
    SingularSubalgebroid::new(ambient, vars, gens, config)
}

/// Parse a single section expression against an existing subalgebroid's
/// variables and frame.
pub fn parse_section_for(b: &SingularSubalgebroid, text: &str) -> Result<FreeModuleElem, DslError> {
    let frame: Vec<String> = (0..b.rank()).map(|a| b.ambient().frame_symbol(a, b.vars())).collect();
    let ctx = Context { vars: b.vars().to_vec(), frame, nvars: b.base_dim() };
    parse_section(text, 1, 1, &ctx)
}

/// Parse a scalar polynomial in the given variables.
pub fn parse_poly(text: &str, vars: &[String]) -> Result<Poly, DslError> {
    let ctx = Context { vars: vars.to_vec(), frame: Vec::new(), nvars: vars.len() };
    let toks = lex(text, 1, 1)?;
    if toks.is_empty() {
        return err(1, 1, "empty expression");
    }
    let end_col = 1 + text.chars().count();
    let mut p = ExprParser { toks, pos: 0, line: 1, end_col, ctx: &ctx };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return err(1, p.col(), "unexpected token after expression");
    }
    match v {
        Value::Scalar(s) => Ok(s),
        Value::Section(_) => err(1, 1, "expected a scalar polynomial"),
    }
}

/// Render a section as a DSL expression.
pub fn section_expr(ambient: &AmbientAlgebroid, vars: &[String], e: &FreeModuleElem) -> String {
    let mut s = String::new();
    for (a, p) in e.components().iter().enumerate() {
        let sym = ambient.frame_symbol(a, vars);
        for (m, c) in p.terms() {
            let neg = c.is_negative();
            let abs = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = Poly::monomial(p.nvars(), m.clone(), abs.clone()).display_with(vars);
            if m.is_one() {
                if abs == Rational::from_integer(1.into()) {
                    s.push_str(&sym);
                } else {
                    let _ = write!(s, "{}*{}", format_rational(&abs), sym);
                }
            } else {
                let _ = write!(s, "{}*{}", mono, sym);
            }
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

/// Render in the text format; `parse(&print(b))` reproduces `b`.
pub fn print(b: &SingularSubalgebroid) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vars: {}", b.vars().join(" "));
    let amb = b.ambient();
    let named = amb.name().map(|n| super::algebroid::named_realization(n).as_deref() == Some(amb.matrices()));
    match amb.kind() {
        AmbientKind::Tangent => {
            let _ = writeln!(s, "ambient: tangent");
        }
        AmbientKind::LinearAction { name } | AmbientKind::LieAlgebra { name } => {
            let kw = if matches!(amb.kind(), AmbientKind::LinearAction { .. }) { "action" } else { "liealgebra" };
            if named == Some(true) {
                let _ = writeln!(s, "ambient: {kw} {name}");
            } else {
                let _ = writeln!(s, "ambient: {kw} custom");
                let _ = writeln!(s, "matrices:");
                for m in amb.matrices() {
                    let rows: Vec<String> = m
                        .iter()
                        .map(|r| r.iter().map(format_rational).collect::<Vec<_>>().join(" "))
                        .collect();
                    let _ = writeln!(s, "  - {}", rows.join("; "));
                }
            }
        }
    }
    let _ = writeln!(s, "generators:");
    for g in b.generators() {
        let _ = writeln!(s, "  - {}", section_expr(amb, b.vars(), g));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn square_field() {
        let b = parse("vars: x\ngenerators:\n - x^2*dx").unwrap();
        assert_eq!(b.generators(), &[FreeModuleElem::new(1, vec![Poly::var(1, 0).pow(2)])]);
        assert_eq!(b.rank(), 1);
    }

    #[test]
    fn rotation_module() {
        let b = parse("vars: x y\ngenerators:\n - -y*dx + x*dy").unwrap();
        let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
        assert_eq!(b.generators(), &[FreeModuleElem::new(2, vec![-&y, x])]);
    }

    #[test]
    fn trailing_operator_is_an_error() {
        let e = parse("vars: x\ngenerators:\n - dx + ").unwrap_err();
        match e {
            GeometryError::Dsl(d) => {
                assert_eq!(d.line, 3);
                assert!(d.message.contains("end of expression"), "{d}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_cases() {
        let unknown = parse("vars: x\ngenerators:\n - z*dx").unwrap_err();
        assert!(matches!(unknown, GeometryError::Dsl(DslError { line: 3, col: 4, .. })), "{unknown:?}");
        assert!(parse("vars: x\ngenerators:\n - 1/0*dx").is_err());
        assert!(parse("vars: x\ngenerators:\n - x").is_err());
        assert!(parse("vars: x y\ngenerators:\n - dx*dy").is_err());
        assert!(parse("vars: x\nambient: action so2\ngenerators:\n - e1").is_err());
    }

    #[test]
    fn rationals_and_parentheses() {
        let b = parse("vars: x y\ngenerators:\n - 3/2*(x + y)^2*dx - 0.5*dy").unwrap();
        let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
        let expect0 = (&x + &y).pow(2).scale(&rat(3, 2));
        assert_eq!(b.generators()[0].component(0), &expect0);
        assert_eq!(b.generators()[0].component(1), &Poly::constant(2, rat(-1, 2)));
    }

    #[test]
    fn algebra_frames_and_custom_matrices() {
        let b = parse("vars:\nambient: liealgebra so3\ngenerators:\n - e3\n - e1 + 2*e2").unwrap();
        assert_eq!(b.rank(), 3);
        assert_eq!(b.base_dim(), 0);
        let c = parse("vars: x y\nambient: action custom\nmatrices:\n  - 0 -1; 1 0\ngenerators:\n  - x*e1").unwrap();
        assert_eq!(c.rank(), 1);
        let printed = print(&c);
        assert_eq!(parse(&printed).unwrap(), c);
    }

    #[test]
    fn print_round_trip() {
        for src in [
            "vars: x\ngenerators:\n - x^2*dx",
            "vars: x y\ngenerators:\n - -y*dx + x*dy",
            "vars: x y\ngenerators:\n - x*dx\n - y*dx\n - x*dy\n - y*dy",
            "vars: x y z\nambient: action so3\ngenerators:\n - e1\n - -3/4*x*y*e2 + e3",
            "vars: x y\ngenerators:\n - (x^2 - 2*y + 1/3)*dy\n - 0",
        ] {
            let b = parse(src).unwrap();
            let again = parse(&print(&b)).unwrap();
            assert_eq!(again, b, "round trip failed for {src}");
        }
    }

    #[test]
    fn scalar_polynomials() {
        let vars = vec!["l".to_string(), "x".to_string()];
        let p = parse_poly("l*(1 + x^2)", &vars).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert!(parse_poly("l*dx", &vars).is_err());
    }
}
