//! Graded presentations `k[x_1..x_n]/(relations)` with an irrelevant ideal.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::poly::{ExponentVector, Polynomial};
use crate::abelian::{AbelianGroup, GroupElement};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub degree: GroupElement,
}

/// `k[x_1, …, x_n] / (relations)`, graded by `grading`, together with
/// generators of the irrelevant ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxPresentation {
    pub grading: AbelianGroup,
    pub variables: Vec<Variable>,
    pub relations: Vec<Polynomial>,
    pub irrelevant: Vec<Polynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Homogeneity {
    Homogeneous {
        degree: GroupElement,
    },
    Inhomogeneous {
        term_degrees: Vec<(String, GroupElement)>,
    },
}

impl Homogeneity {
    pub fn is_homogeneous(&self) -> bool {
        matches!(self, Homogeneity::Homogeneous { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyHomogeneity {
    pub polynomial: String,
    #[serde(flatten)]
    pub status: Homogeneity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomogeneityReport {
    pub relations: Vec<PolyHomogeneity>,
    pub irrelevant: Vec<PolyHomogeneity>,
    pub pass: bool,
}

impl HomogeneityReport {
    pub fn failures(&self) -> impl Iterator<Item = &PolyHomogeneity> {
        self.relations
            .iter()
            .chain(&self.irrelevant)
            .filter(|p| !p.status.is_homogeneous())
    }
}

impl CoxPresentation {
    /// Builds a presentation, checking name uniqueness and degree arity.
    /// Homogeneity is not enforced here; see [`CoxPresentation::check_homogeneous`].
    pub fn new(
        grading: AbelianGroup,
        variables: Vec<Variable>,
        relations: Vec<Polynomial>,
        irrelevant: Vec<Polynomial>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &variables {
            if !seen.insert(v.name.as_str()) {
                return Err(Error::DuplicateName(v.name.clone()));
            }
            grading.check_element(&v.degree)?;
        }
        let n = variables.len();
        for p in relations.iter().chain(&irrelevant) {
            if let Some(&i) = p.variables().iter().find(|&&i| i >= n) {
                return Err(Error::UnknownVariable(format!("x{i}")));
            }
        }
        let variables = variables
            .into_iter()
            .map(|v| Variable {
                degree: grading.reduce(&v.degree),
                name: v.name,
            })
            .collect();
        Ok(Self {
            grading,
            variables,
            relations,
            irrelevant,
        })
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn parse_polynomial(&self, text: &str) -> Result<Polynomial> {
        Polynomial::parse(text, &self.names())
    }

    pub fn show(&self, p: &Polynomial) -> String {
        p.display(&self.names()).to_string()
    }

    /// `Σ e_i · deg(x_i)`, torsion coordinates reduced.
    pub fn degree_of_monomial(&self, e: &ExponentVector) -> Result<GroupElement> {
        let mut acc = self.grading.zero();
        for (i, k) in e.iter() {
            let v = self
                .variables
                .get(i)
                .ok_or_else(|| Error::UnknownVariable(format!("x{i}")))?;
            acc = self
                .grading
                .add(&acc, &self.grading.scale(&BigInt::from(k), &v.degree));
        }
        Ok(acc)
    }

    pub fn homogeneity(&self, p: &Polynomial) -> Homogeneity {
        let names = self.names();
        let degs: Vec<(String, GroupElement)> = p
            .terms()
            .rev()
            .map(|(e, _)| {
                let d = self
                    .degree_of_monomial(e)
                    .expect("presentation polynomials use declared variables");
                (
                    Polynomial::monomial(e.clone()).display(&names).to_string(),
                    d,
                )
            })
            .collect();
        match degs.first() {
            None => Homogeneous {
                degree: self.grading.zero(),
            },
            Some((_, d0)) if degs.iter().all(|(_, d)| d == d0) => {
                Homogeneous { degree: d0.clone() }
            }
            Some(_) => Inhomogeneous { term_degrees: degs },
        }
    }

    /// Degree of a homogeneous polynomial, or an error naming the offending terms.
    pub fn degree_of(&self, p: &Polynomial) -> Result<GroupElement> {
        match self.homogeneity(p) {
            Homogeneous { degree } => Ok(degree),
            Inhomogeneous { term_degrees } => Err(Error::Inhomogeneous {
                poly: self.show(p),
                detail: term_degrees
                    .iter()
                    .map(|(m, d)| format!("deg {m} = {d}"))
                    .collect::<Vec<_>>()
                    .join(", "),
            }),
        }
    }

    pub fn check_homogeneous(&self) -> HomogeneityReport {
        let check = |p: &Polynomial| PolyHomogeneity {
            polynomial: self.show(p),
            status: self.homogeneity(p),
        };
        let relations: Vec<_> = self.relations.iter().map(check).collect();
        let irrelevant: Vec<_> = self.irrelevant.iter().map(check).collect();
        let pass = relations
            .iter()
            .chain(&irrelevant)
            .all(|p| p.status.is_homogeneous());
        HomogeneityReport {
            relations,
            irrelevant,
            pass,
        }
    }

    /// Binomial relations `a·m + b·x` that eliminate the variable `x := −(a/b)·m`.
    /// Returns `(relation index, x, value)`.
    ///
    /// When `m = z^r` is a power of a single variable, `x` must not be the
    /// target of another such relation; choosing between two would make the
    /// result depend on the order of elimination. For any other monomial `m`,
    /// `x` must not occur in another relation at all.
    pub fn simple_root_relations(&self) -> Vec<(usize, usize, Polynomial)> {
        let all: Vec<(usize, usize, Polynomial, bool)> = self
            .relations
            .iter()
            .enumerate()
            .filter_map(|(k, rel)| simple_root(rel).map(|(x, val, pure)| (k, x, val, pure)))
            .collect();
        all.iter()
            .filter(|(k, x, _, pure)| {
                if *pure {
                    !all.iter().any(|(k2, x2, _, p2)| k2 != k && x2 == x && *p2)
                } else {
                    !self
                        .relations
                        .iter()
                        .enumerate()
                        .any(|(k2, r)| k2 != *k && r.variables().contains(x))
                }
            })
            .map(|(k, x, val, _)| (*k, *x, val.clone()))
            .collect()
    }

    /// Removes variable `x` by substituting `value` for it and dropping relation `k`.
    fn eliminate(&self, k: usize, x: usize, value: &Polynomial) -> Self {
        let shift = |i: usize| if i > x { i - 1 } else { i };
        let sub = |p: &Polynomial| p.substitute(x, value).remap(shift);
        let relations = self
            .relations
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, p)| sub(p))
            .filter(|p| !p.is_zero())
            .collect();
        let irrelevant = self.irrelevant.iter().map(sub).collect();
        let mut variables = self.variables.clone();
        variables.remove(x);
        Self {
            grading: self.grading.clone(),
            variables,
            relations,
            irrelevant,
        }
    }

    /// Repeatedly eliminates variables through simple root relations
    /// `z^r − x`, always taking the first eligible relation.
    pub fn eliminate_simple_roots(&self) -> Self {
        self.eliminate_simple_roots_by(|_| 0)
    }

    /// Like [`eliminate_simple_roots`](Self::eliminate_simple_roots), with
    /// `choose` picking which of the currently eligible relations to use.
    pub fn eliminate_simple_roots_by(&self, mut choose: impl FnMut(usize) -> usize) -> Self {
        let mut cur = self.clone();
        loop {
            let cands = cur.simple_root_relations();
            if cands.is_empty() {
                return cur;
            }
            let (k, x, val) = &cands[choose(cands.len()) % cands.len()];
            cur = cur.eliminate(*k, *x, val);
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.eliminate_simple_roots().relations.is_empty()
    }
}

use Homogeneity::{Homogeneous, Inhomogeneous};

/// Recognizes `a·m + b·x` with `x` a variable not dividing the monomial `m`.
/// Prefers pure powers `m = z^r`; among equal kinds the lower-indexed
/// variable is eliminated. The flag tells whether `m` is a pure power.
fn simple_root(rel: &Polynomial) -> Option<(usize, Polynomial, bool)> {
    if rel.len() != 2 {
        return None;
    }
    let terms: Vec<(&ExponentVector, &BigRational)> = rel.terms().collect();
    let as_var = |e: &ExponentVector| e.as_pure_power().filter(|&(_, p)| p == 1).map(|(i, _)| i);
    let mut options = vec![];
    for (lin, other) in [(0, 1), (1, 0)] {
        let (le, lc) = terms[lin];
        let (me, mc) = terms[other];
        if let Some(x) = as_var(le) {
            if me.exponent(x) == 0 {
                let value = Polynomial::term(-(mc / lc), me.clone());
                options.push((x, value, me.as_pure_power().is_some()));
            }
        }
    }
    options.into_iter().min_by_key(|(x, _, pure)| (!pure, *x))
}
