//! Line-oriented `.mds` documents.
//!
//! ```text
//! [stack]
//! name = "gerby P1"
//! grading = [0]
//! var x0 : (2)
//! var x1 : (2)
//! irr x0
//! irr x1
//!
//! [fan]
//! dim = 2
//! ray x = (1, 0) mult 1
//! cone (x, y)
//!
//! [roots]
//! root (1) order 2
//! ```
//!
//! `#` starts a comment. Polynomials are checked against the declared
//! variables when the document is built.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::abelian::{AbelianGroup, GroupElement};
use crate::error::{Error, Result};
use crate::gradedring::{CoxPresentation, Polynomial, Variable};
use crate::stack::{GerbeFactorization, StackData};
use crate::toric::StackyFan;

/// Source position (1-based line and column) of a parsed item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub degree: Vec<BigInt>,
    pub pos: Pos,
}

/// Polynomial text, parsed against the variables at build time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyLine {
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StackDocument {
    pub name: Option<String>,
    pub grading: Option<Vec<BigInt>>,
    pub vars: Vec<VarDecl>,
    pub rels: Vec<PolyLine>,
    pub irr: Vec<PolyLine>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayDecl {
    pub name: String,
    pub vector: Vec<BigInt>,
    pub mult: BigInt,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FanDocument {
    pub dim: Option<usize>,
    pub rays: Vec<RayDecl>,
    pub cones: Vec<(Vec<String>, Pos)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDecl {
    pub degree: Vec<BigInt>,
    pub order: BigInt,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Document {
    pub stack: Option<StackDocument>,
    pub fan: Option<FanDocument>,
    pub roots: Option<Vec<RootDecl>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Stack,
    Fan,
    Roots,
}

fn syntax(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

/// Cursor over one line.
struct Line<'a> {
    text: &'a str,
    at: usize,
    line: usize,
}

impl<'a> Line<'a> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.text[..self.at].chars().count() + 1,
        }
    }

    /// Position of the next non-blank character.
    fn here(&mut self) -> Pos {
        self.skip_ws();
        self.pos()
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.at..];
        self.at += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.at..].chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn err(&mut self, message: impl Into<String>) -> Error {
        self.skip_ws();
        syntax(self.pos(), message)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(d) if d == c => {
                self.at += c.len_utf8();
                Ok(())
            }
            Some(d) => Err(self.err(format!("expected `{c}`, found `{d}`"))),
            None => Err(self.err(format!("expected `{c}`, found end of line"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = &self.text[self.at..];
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() => {}
            Some((_, c)) => return Err(self.err(format!("expected a name, found `{c}`"))),
            None => return Err(self.err("expected a name, found end of line")),
        }
        let end = chars
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        self.at += end;
        Ok(rest[..end].to_string())
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let here = self.at;
        match self.ident() {
            Ok(w) if w == kw => Ok(()),
            _ => {
                self.at = here;
                Err(self.err(format!("expected `{kw}`")))
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let rest = &self.text[self.at..];
        let sign = usize::from(rest.starts_with('-'));
        let digits = rest[sign..]
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .count();
        if digits == 0 {
            return Err(self.err("expected an integer"));
        }
        let n: BigInt = rest[..sign + digits].parse().expect("validated digits");
        self.at += sign + digits;
        Ok(n)
    }

    fn natural(&mut self) -> Result<usize> {
        let p = self.here();
        let n = self.integer()?;
        usize::try_from(n).map_err(|_| syntax(p, "expected a nonnegative integer"))
    }

    /// `open item (, item)* close`, possibly empty.
    fn list<T>(
        &mut self,
        open: char,
        close: char,
        mut item: impl FnMut(&mut Self) -> Result<T>,
    ) -> Result<Vec<T>> {
        self.expect(open)?;
        let mut out = vec![];
        if self.peek() == Some(close) {
            self.at += close.len_utf8();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            match self.peek() {
                Some(',') => self.at += 1,
                Some(c) if c == close => {
                    self.at += c.len_utf8();
                    return Ok(out);
                }
                _ => return Err(self.err(format!("expected `,` or `{close}`"))),
            }
        }
    }

    fn string(&mut self) -> Result<String> {
        self.expect('"')?;
        let rest = &self.text[self.at..];
        let Some(end) = rest.find('"') else {
            return Err(self.err("unterminated string"));
        };
        self.at += end + 1;
        Ok(rest[..end].to_string())
    }

    /// The rest of the line, with its starting position.
    fn rest(&mut self) -> Result<PolyLine> {
        self.skip_ws();
        let pos = self.pos();
        let text = self.text[self.at..].trim_end().to_string();
        if text.is_empty() {
            return Err(self.err("expected a polynomial"));
        }
        self.at = self.text.len();
        Ok(PolyLine { text, pos })
    }

    fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            let c = self.peek().unwrap_or(' ');
            Err(self.err(format!("unexpected `{c}`")))
        }
    }
}

fn strip_comment(line: &str) -> &str {
    // a `#` inside a quoted name is kept
    let mut in_string = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_string = !in_string,
            '#' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut doc = Document::default();
    let mut section: Option<Section> = None;
    for (k, raw) in text.lines().enumerate() {
        let mut l = Line {
            text: strip_comment(raw),
            at: 0,
            line: k + 1,
        };
        if l.at_end() {
            continue;
        }
        if l.peek() == Some('[') {
            let start = l.here();
            let names = l.list('[', ']', |l| l.ident())?;
            l.finish()?;
            let sec = match names.as_slice() {
                [s] if s == "stack" => Section::Stack,
                [s] if s == "fan" => Section::Fan,
                [s] if s == "roots" => Section::Roots,
                _ => {
                    return Err(syntax(
                        start,
                        format!("unknown section [{}]", names.join(", ")),
                    ))
                }
            };
            let fresh = match sec {
                Section::Stack => doc.stack.replace(StackDocument::default()).is_none(),
                Section::Fan => doc.fan.replace(FanDocument::default()).is_none(),
                Section::Roots => doc.roots.replace(vec![]).is_none(),
            };
            if !fresh {
                return Err(syntax(start, "section declared twice"));
            }
            section = Some(sec);
            continue;
        }
        match section {
            None => return Err(l.err("content before the first section header")),
            Some(Section::Stack) => stack_line(&mut l, doc.stack.as_mut().expect("open section"))?,
            Some(Section::Fan) => fan_line(&mut l, doc.fan.as_mut().expect("open section"))?,
            Some(Section::Roots) => root_line(&mut l, doc.roots.as_mut().expect("open section"))?,
        }
    }
    if let Some(s) = &doc.stack {
        check_stack(s)?;
    }
    if let Some(f) = &doc.fan {
        check_fan(f)?;
    }
    if let (Some(roots), Some(s)) = (&doc.roots, &doc.stack) {
        let k = s.grading.as_ref().map_or(0, Vec::len);
        for r in roots {
            if r.degree.len() != k {
                return Err(syntax(
                    r.pos,
                    format!(
                        "root degree has {} coordinates, grading has {k}",
                        r.degree.len()
                    ),
                ));
            }
        }
    }
    Ok(doc)
}

fn stack_line(l: &mut Line, s: &mut StackDocument) -> Result<()> {
    let start = l.here();
    let kw = l.ident()?;
    match kw.as_str() {
        "name" => {
            l.expect('=')?;
            s.name = Some(l.string()?);
        }
        "grading" => {
            l.expect('=')?;
            let g = l.list('[', ']', |l| {
                let p = l.here();
                let m = l.integer()?;
                if m < BigInt::from(0) {
                    return Err(syntax(p, "grading factors must be nonnegative"));
                }
                Ok(m)
            })?;
            if s.grading.replace(g).is_some() {
                return Err(syntax(start, "grading declared twice"));
            }
        }
        "var" => {
            let name = l.ident()?;
            l.expect(':')?;
            let pos = l.here();
            let degree = l.list('(', ')', |l| l.integer())?;
            s.vars.push(VarDecl { name, degree, pos });
        }
        "rel" => s.rels.push(l.rest()?),
        "irr" => s.irr.push(l.rest()?),
        other => return Err(syntax(start, format!("unknown [stack] entry `{other}`"))),
    }
    l.finish()
}

fn fan_line(l: &mut Line, f: &mut FanDocument) -> Result<()> {
    let start = l.here();
    let kw = l.ident()?;
    match kw.as_str() {
        "dim" => {
            l.expect('=')?;
            if f.dim.replace(l.natural()?).is_some() {
                return Err(syntax(start, "dim declared twice"));
            }
        }
        "ray" => {
            let name = l.ident()?;
            l.expect('=')?;
            let pos = l.here();
            let vector = l.list('(', ')', |l| l.integer())?;
            let mult = if l.at_end() {
                BigInt::from(1)
            } else {
                l.keyword("mult")?;
                l.integer()?
            };
            f.rays.push(RayDecl {
                name,
                vector,
                mult,
                pos,
            });
        }
        "cone" => {
            let pos = l.here();
            let names = l.list('(', ')', |l| l.ident())?;
            f.cones.push((names, pos));
        }
        other => return Err(syntax(start, format!("unknown [fan] entry `{other}`"))),
    }
    l.finish()
}

fn root_line(l: &mut Line, roots: &mut Vec<RootDecl>) -> Result<()> {
    l.keyword("root")?;
    let pos = l.here();
    let degree = l.list('(', ')', |l| l.integer())?;
    l.keyword("order")?;
    let order = l.integer()?;
    roots.push(RootDecl { degree, order, pos });
    l.finish()
}

fn check_stack(s: &StackDocument) -> Result<()> {
    let k = s.grading.as_ref().map_or(0, Vec::len);
    let mut seen = BTreeSet::new();
    for v in &s.vars {
        if !seen.insert(v.name.as_str()) {
            return Err(syntax(v.pos, format!("duplicate variable `{}`", v.name)));
        }
        if v.degree.len() != k {
            return Err(syntax(
                v.pos,
                format!(
                    "degree of `{}` has {} coordinates, grading has {k}",
                    v.name,
                    v.degree.len()
                ),
            ));
        }
    }
    Ok(())
}

fn check_fan(f: &FanDocument) -> Result<()> {
    let Some(d) = f.dim else {
        return Err(syntax(
            Pos { line: 1, column: 1 },
            "[fan] section without `dim`",
        ));
    };
    let mut seen = BTreeSet::new();
    for r in &f.rays {
        if !seen.insert(r.name.as_str()) {
            return Err(syntax(r.pos, format!("duplicate ray `{}`", r.name)));
        }
        if r.vector.len() != d {
            return Err(syntax(
                r.pos,
                format!(
                    "ray `{}` has {} coordinates, dim is {d}",
                    r.name,
                    r.vector.len()
                ),
            ));
        }
    }
    for (names, pos) in &f.cones {
        if let Some(n) = names.iter().find(|n| !seen.contains(n.as_str())) {
            return Err(syntax(*pos, format!("cone mentions undeclared ray `{n}`")));
        }
    }
    Ok(())
}

/// Parses polynomial text, moving error positions into document coordinates.
fn parse_poly(line: &PolyLine, names: &[String]) -> Result<Polynomial> {
    Polynomial::parse(&line.text, names).map_err(|e| match e {
        Error::Syntax {
            column, message, ..
        } => syntax(
            Pos {
                line: line.pos.line,
                column: line.pos.column + column - 1,
            },
            message,
        ),
        Error::UnknownVariable(v) => syntax(line.pos, format!("unknown variable `{v}`")),
        other => other,
    })
}

fn presentation(s: &StackDocument) -> Result<CoxPresentation> {
    let grading = AbelianGroup::new(s.grading.clone().unwrap_or_default())?;
    let variables: Vec<Variable> = s
        .vars
        .iter()
        .map(|v| Variable {
            name: v.name.clone(),
            degree: GroupElement(v.degree.clone()),
        })
        .collect();
    let names: Vec<String> = variables.iter().map(|v| v.name.clone()).collect();
    let rels = s
        .rels
        .iter()
        .map(|l| parse_poly(l, &names))
        .collect::<Result<_>>()?;
    let irr = s
        .irr
        .iter()
        .map(|l| parse_poly(l, &names))
        .collect::<Result<_>>()?;
    CoxPresentation::new(grading, variables, rels, irr)
}

fn stack_section(doc: &Document) -> Result<&StackDocument> {
    doc.stack
        .as_ref()
        .ok_or_else(|| Error::Document("no [stack] section".into()))
}

/// Builds the `[stack]` section, rejecting inhomogeneous polynomials.
pub fn build(doc: &Document) -> Result<StackData> {
    let s = stack_section(doc)?;
    StackData::new(
        s.name.clone().unwrap_or_else(|| "unnamed".into()),
        presentation(s)?,
    )
}

/// Like [`build`] but leaves homogeneity to be reported by validation.
pub fn build_unchecked(doc: &Document) -> Result<StackData> {
    let s = stack_section(doc)?;
    Ok(StackData::unchecked(
        s.name.clone().unwrap_or_else(|| "unnamed".into()),
        presentation(s)?,
    ))
}

pub fn build_fan(doc: &Document) -> Result<StackyFan> {
    let f = doc
        .fan
        .as_ref()
        .ok_or_else(|| Error::Document("no [fan] section".into()))?;
    let names: Vec<String> = f.rays.iter().map(|r| r.name.clone()).collect();
    Ok(StackyFan {
        dim: f.dim.unwrap_or(0),
        names: names.clone(),
        rays: f.rays.iter().map(|r| r.vector.clone()).collect(),
        multiplicities: f.rays.iter().map(|r| r.mult.clone()).collect(),
        max_cones: f
            .cones
            .iter()
            .map(|(c, _)| {
                c.iter()
                    .map(|n| names.iter().position(|m| m == n).expect("checked at parse"))
                    .collect()
            })
            .collect(),
    })
}

/// A `[stack]` section holding the rigidified stack and a `[roots]` section.
pub fn build_factorization(doc: &Document) -> Result<GerbeFactorization> {
    let rigidified = build(doc)?;
    let roots = doc
        .roots
        .as_ref()
        .ok_or_else(|| Error::Document("no [roots] section".into()))?
        .iter()
        .map(|r| (GroupElement(r.degree.clone()), r.order.clone()))
        .collect();
    Ok(GerbeFactorization { rigidified, roots })
}
