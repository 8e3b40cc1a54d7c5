//! Sparse multivariate polynomials over `Q`.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sparse exponent vector: variable index → positive exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExponentVector(BTreeMap<usize, u32>);

impl ExponentVector {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(i: usize) -> Self {
        Self::var_pow(i, 1)
    }

    pub fn var_pow(i: usize, e: u32) -> Self {
        let mut m = BTreeMap::new();
        if e > 0 {
            m.insert(i, e);
        }
        Self(m)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut out = Self::default();
        for (i, e) in pairs {
            if e > 0 {
                *out.0.entry(i).or_insert(0) += e;
            }
        }
        out
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|(&i, &e)| (i, e))
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.0.keys().copied().collect()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.values().map(|&e| u64::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// `Some(i)` when this is exactly `x_i^e` for some `e ≥ 1`.
    pub fn as_pure_power(&self) -> Option<(usize, u32)> {
        if self.0.len() == 1 {
            self.0.iter().next().map(|(&i, &e)| (i, e))
        } else {
            None
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&i, &e) in &other.0 {
            *out.0.entry(i).or_insert(0) += e;
        }
        out
    }

    pub fn without(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.0.remove(&i);
        out
    }

    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Self {
        Self::from_pairs(self.0.iter().map(|(&i, &e)| (f(i), e)))
    }

    /// Squarefree part `∏_{i ∈ supp} x_i`.
    pub fn radical(&self) -> Self {
        Self(self.0.keys().map(|&i| (i, 1)).collect())
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().all(|(i, e)| other.exponent(*i) >= *e)
    }
}

/// Graded lexicographic order: total degree first, then the larger exponent
/// of the lowest-index variable wins.
impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let vars: BTreeSet<usize> = self.0.keys().chain(other.0.keys()).copied().collect();
                for i in vars {
                    match self.exponent(i).cmp(&other.exponent(i)) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial with exact rational coefficients; no zero coefficients are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Polynomial {
    terms: BTreeMap<ExponentVector, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(c, ExponentVector::one())
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn var(i: usize) -> Self {
        Self::term(BigRational::one(), ExponentVector::var(i))
    }

    pub fn monomial(e: ExponentVector) -> Self {
        Self::term(BigRational::one(), e)
    }

    pub fn term(c: BigRational, e: ExponentVector) -> Self {
        let mut p = Self::zero();
        p.add_term(c, e);
        p
    }

    fn add_term(&mut self, c: BigRational, e: ExponentVector) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &BigRational)> {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&ExponentVector, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_nonzero_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().is_some_and(ExponentVector::is_one)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms
            .keys()
            .flat_map(|e| e.0.keys().copied())
            .collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.recip()),
            None => Self::zero(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replaces `x_var` by `value` everywhere.
    pub fn substitute(&self, var: usize, value: &Polynomial) -> Self {
        let mut out = Self::zero();
        let mut powers: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e.exponent(var);
            let rest = Self::term(c.clone(), e.without(var));
            if k == 0 {
                out = &out + &rest;
                continue;
            }
            let vp = powers.entry(k).or_insert_with(|| value.pow(k)).clone();
            out = &out + &(&rest * &vp);
        }
        out
    }

    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(c.clone(), e.remap(&f));
        }
        out
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    /// Parses the text syntax: integer or rational coefficients, `+ - * ^`,
    /// parentheses, and the given variable names. Juxtaposition is rejected.
    pub fn parse(text: &str, names: &[String]) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            names,
            len: text.len(),
        };
        let poly = p.expr()?;
        if let Some(t) = p.tokens.get(p.pos) {
            return Err(syntax(t.col, format!("unexpected `{}`", t.kind)));
        }
        Ok(poly)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(c.clone(), e.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(c1 * c2, e1.mul(e2));
            }
        }
        out
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

fn write_monomial(f: &mut fmt::Formatter<'_>, e: &ExponentVector, names: &[String]) -> fmt::Result {
    for (k, (i, p)) in e.iter().enumerate() {
        if k > 0 {
            write!(f, "*")?;
        }
        match names.get(i) {
            Some(n) => write!(f, "{n}")?,
            None => write!(f, "x{i}")?,
        }
        if p > 1 {
            write!(f, "^{p}")?;
        }
    }
    Ok(())
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if e.is_one() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write_monomial(f, e, self.names)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum TokKind {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Int(n) => write!(f, "{n}"),
            TokKind::Ident(s) => write!(f, "{s}"),
            TokKind::Sym(c) => write!(f, "{c}"),
        }
    }
}

struct Token {
    kind: TokKind,
    /// 1-based column.
    col: usize,
}

fn syntax(column: usize, message: String) -> Error {
    Error::Syntax {
        line: 1,
        column,
        message,
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = vec![];
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        let col = pos + 1;
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().map(|&(_, c)| c).collect();
            out.push(Token {
                kind: TokKind::Int(s.parse().expect("digits")),
                col,
            });
        } else if c.is_ascii_alphabetic() {
            let start = k;
            while k < chars.len() && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            let s: String = chars[start..k].iter().map(|&(_, c)| c).collect();
            out.push(Token {
                kind: TokKind::Ident(s),
                col,
            });
        } else if "+-*^/()".contains(c) {
            out.push(Token {
                kind: TokKind::Sym(c),
                col,
            });
            k += 1;
        } else {
            return Err(syntax(col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a [String],
    len: usize,
}

impl Parser<'_> {
    fn peek_sym(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token {
                kind: TokKind::Sym(c),
                ..
            }) => Some(*c),
            _ => None,
        }
    }

    fn col(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len + 1, |t| t.col)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero();
        let mut sign = match self.peek_sym() {
            Some('-') => {
                self.pos += 1;
                -1
            }
            Some('+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek_sym() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek_sym() == Some('*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        if let Some(t) = self.tokens.get(self.pos) {
            if !matches!(t.kind, TokKind::Sym('+' | '-' | ')')) {
                return Err(syntax(
                    t.col,
                    format!("expected operator before `{}`", t.kind),
                ));
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.primary()?;
        if self.peek_sym() == Some('^') {
            self.pos += 1;
            let col = self.col();
            match self.tokens.get(self.pos).map(|t| &t.kind) {
                Some(TokKind::Int(n)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| syntax(col, format!("exponent {n} too large")))?;
                    self.pos += 1;
                    Ok(base.pow(e))
                }
                _ => Err(syntax(
                    col,
                    "expected a nonnegative integer exponent".into(),
                )),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Polynomial> {
        let col = self.col();
        let Some(tok) = self.tokens.get(self.pos) else {
            return Err(syntax(col, "unexpected end of polynomial".into()));
        };
        match tok.kind.clone() {
            TokKind::Int(n) => {
                self.pos += 1;
                if self.peek_sym() == Some('/') {
                    self.pos += 1;
                    let dcol = self.col();
                    match self.tokens.get(self.pos).map(|t| &t.kind) {
                        Some(TokKind::Int(d)) if !d.is_zero() => {
                            let d = d.clone();
                            self.pos += 1;
                            Ok(Polynomial::constant(BigRational::new(n, d)))
                        }
                        _ => Err(syntax(
                            dcol,
                            "expected a nonzero integer denominator".into(),
                        )),
                    }
                } else {
                    Ok(Polynomial::constant(BigRational::from_integer(n)))
                }
            }
            TokKind::Ident(name) => {
                self.pos += 1;
                match self.names.iter().position(|n| *n == name) {
                    Some(i) => Ok(Polynomial::var(i)),
                    None => Err(Error::UnknownVariable(name)),
                }
            }
            TokKind::Sym('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek_sym() != Some(')') {
                    return Err(syntax(self.col(), "expected `)`".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(syntax(col, format!("unexpected `{other}`"))),
        }
    }
}
