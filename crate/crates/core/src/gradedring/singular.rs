//! Singular loci of single relations whose terms have pairwise disjoint support.
//!
//! For `f = Σ c_k m_k` with disjoint supports, `∂f/∂x_j` is the single
//! monomial `c_k e_j m_k / x_j` for the unique term `m_k` containing `x_j`, so
//! the singular locus is a union of coordinate subspaces and can be computed
//! combinatorially.

use std::collections::BTreeSet;

use serde::Serialize;

use super::poly::Polynomial;
use super::presentation::CoxPresentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityVerdict {
    /// No relations: the total space is an affine space.
    Smooth,
    /// Every singular stratum lies inside `V(J_irr)`.
    SmoothOnComplement,
    /// Some singular stratum meets the complement of `V(J_irr)`.
    Singular,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityReport {
    pub verdict: SingularityVerdict,
    /// Each stratum is the set of variables forced to vanish.
    pub strata: Vec<Vec<String>>,
    /// Strata not contained in `V(J_irr)`.
    pub uncovered: Vec<Vec<String>>,
    pub explanation: String,
}

impl SingularityReport {
    fn unknown(explanation: impl Into<String>) -> Self {
        Self {
            verdict: SingularityVerdict::Unknown,
            strata: vec![],
            uncovered: vec![],
            explanation: explanation.into(),
        }
    }
}

/// Minimal coordinate strata on which all partials of the term vanish.
fn term_strata(exps: &[(usize, u32)]) -> Vec<BTreeSet<usize>> {
    let mut out: Vec<BTreeSet<usize>> = exps
        .iter()
        .filter(|&&(_, e)| e >= 2)
        .map(|&(i, _)| BTreeSet::from([i]))
        .collect();
    let linear: Vec<usize> = exps
        .iter()
        .filter(|&&(_, e)| e == 1)
        .map(|&(i, _)| i)
        .collect();
    for (a, &i) in linear.iter().enumerate() {
        for &j in &linear[a + 1..] {
            out.push(BTreeSet::from([i, j]));
        }
    }
    out
}

fn minimalize(mut sets: Vec<BTreeSet<usize>>) -> Vec<BTreeSet<usize>> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut out: Vec<BTreeSet<usize>> = vec![];
    for s in sets {
        if !out.iter().any(|t| t.is_subset(&s)) {
            out.push(s);
        }
    }
    out.sort();
    out
}

/// Whether `g` vanishes identically on `{x_i = 0 : i ∈ stratum}`.
fn vanishes_on(g: &Polynomial, stratum: &BTreeSet<usize>) -> bool {
    g.terms()
        .all(|(e, _)| e.iter().any(|(i, _)| stratum.contains(&i)))
}

/// Singular locus of `Spec R` for a presentation with one relation of the
/// form `Σ c_k m_k`: at least two terms, pairwise disjoint supports, every term
/// of total degree `≥ 2`. Anything else reports `Unknown`.
pub fn binomial_singular_locus(p: &CoxPresentation) -> SingularityReport {
    let [rel] = p.relations.as_slice() else {
        return SingularityReport::unknown(format!(
            "expected exactly one relation, found {}",
            p.relations.len()
        ));
    };
    if rel.len() < 2 {
        return SingularityReport::unknown("relation has fewer than two terms");
    }
    let mut seen = BTreeSet::new();
    let mut per_term = vec![];
    for (e, _) in rel.terms() {
        if e.total_degree() < 2 {
            return SingularityReport::unknown(format!(
                "term {} has total degree below 2",
                p.show(&Polynomial::monomial(e.clone()))
            ));
        }
        for i in e.support() {
            if !seen.insert(i) {
                return SingularityReport::unknown("terms do not have disjoint supports");
            }
        }
        per_term.push(term_strata(&e.iter().collect::<Vec<_>>()));
    }

    // the locus is the intersection over terms of the union of their strata
    let mut acc: Vec<BTreeSet<usize>> = vec![BTreeSet::new()];
    for strata in &per_term {
        let mut next = vec![];
        for a in &acc {
            for s in strata {
                next.push(a.union(s).copied().collect());
            }
        }
        acc = minimalize(next);
    }

    let names = p.names();
    let to_names = |s: &BTreeSet<usize>| s.iter().map(|&i| names[i].clone()).collect::<Vec<_>>();
    let uncovered: Vec<BTreeSet<usize>> = acc
        .iter()
        .filter(|s| !p.irrelevant.iter().any(|g| vanishes_on(g, s)))
        .cloned()
        .collect();
    let (verdict, explanation) = if uncovered.is_empty() {
        (
            SingularityVerdict::SmoothOnComplement,
            "every singular stratum lies in V(J_irr)".to_string(),
        )
    } else {
        let shown: Vec<String> = uncovered
            .iter()
            .map(|s| {
                format!(
                    "{{{}}}",
                    to_names(s)
                        .iter()
                        .map(|n| format!("{n}=0"))
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect();
        (
            SingularityVerdict::Singular,
            format!(
                "singular stratum not excluded by J_irr: {}",
                shown.join(" ")
            ),
        )
    };
    SingularityReport {
        verdict,
        strata: acc.iter().map(to_names).collect(),
        uncovered: uncovered.iter().map(to_names).collect(),
        explanation,
    }
}

/// Smoothness of `Spec R \ V(J_irr)`: eliminate simple root relations, then
/// polynomial rings are smooth and single disjoint-support relations are
/// analyzed combinatorially.
pub fn smoothness(p: &CoxPresentation) -> SingularityReport {
    let e = p.eliminate_simple_roots();
    if e.relations.is_empty() {
        return SingularityReport {
            verdict: SingularityVerdict::Smooth,
            strata: vec![],
            uncovered: vec![],
            explanation: "polynomial ring after eliminating root relations".into(),
        };
    }
    binomial_singular_locus(&e)
}
