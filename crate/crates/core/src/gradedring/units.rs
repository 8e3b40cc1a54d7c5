//! Whether the degree-zero part of the Cox ring reduces to constants.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::poly::{ExponentVector, Polynomial};
use super::presentation::CoxPresentation;
use crate::abelian::{integer_kernel, AbelianGroup, GroupElement, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum UnitCheck {
    Pass { explanation: String },
    Fail { witness: String },
    Unknown { explanation: String },
}

/// Subsets examined before giving up.
const CIRCUIT_SEARCH_LIMIT: u128 = 100_000;

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            if rec(i + 1, n, k, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f)
}

/// A nonnegative integer combination of the columns of `vectors` summing to
/// zero with minimal support, if one exists among subsets of size `≤ rank+1`.
pub(crate) fn nonnegative_circuit(
    vectors: &[Vec<BigInt>],
    dim: usize,
) -> Result<Option<Vec<(usize, BigInt)>>, ()> {
    let m = vectors.len();
    let max_k = (dim + 1).min(m);
    let total: u128 = (1..=max_k).map(|k| binomial(m, k)).sum();
    if total > CIRCUIT_SEARCH_LIMIT {
        return Err(());
    }
    let mut found = None;
    for k in 1..=max_k {
        let hit = for_each_subset(m, k, &mut |s| {
            let cols: Vec<Vec<BigInt>> = s.iter().map(|&j| vectors[j].clone()).collect();
            let ker = integer_kernel(&IntMatrix::from_columns(dim, &cols));
            if ker.cols() != 1 {
                return false;
            }
            let y = ker.column(0);
            let pos = y.iter().all(|c| c.is_positive());
            let neg = y.iter().all(|c| c.is_negative());
            if pos || neg {
                found = Some(s.iter().zip(y).map(|(&j, c)| (j, c.abs())).collect());
                true
            } else {
                false
            }
        });
        if hit {
            break;
        }
    }
    Ok(found)
}

/// Certifies that only constants have degree zero when the free parts of all
/// variable degrees lie in a common open half-space; reports a nonconstant
/// degree-zero monomial when the free parts admit a nonnegative relation.
pub fn degree_zero_subalgebra_check(p: &CoxPresentation) -> UnitCheck {
    let canon = p.grading.canonical();
    let group: &AbelianGroup = &canon.group;
    let n_tors = group.torsion().len();
    let f = group.free_rank();
    let degs: Vec<GroupElement> = p
        .variables
        .iter()
        .map(|v| canon.projection.apply(&v.degree))
        .collect();
    let names = p.names();

    if let Some(i) = degs.iter().position(|d| group.is_zero_element(d)) {
        return UnitCheck::Fail {
            witness: names[i].clone(),
        };
    }
    let free_part = |d: &GroupElement| d.0[n_tors..].to_vec();
    let with_free: Vec<usize> = (0..degs.len())
        .filter(|&i| free_part(&degs[i]).iter().any(|c| !c.is_zero()))
        .collect();
    let vectors: Vec<Vec<BigInt>> = with_free.iter().map(|&i| free_part(&degs[i])).collect();

    match nonnegative_circuit(&vectors, f) {
        Err(()) => UnitCheck::Unknown {
            explanation: "circuit search bound exceeded".into(),
        },
        Ok(Some(circuit)) => {
            let mut torsion = group.zero();
            for (j, c) in &circuit {
                torsion = group.add(&torsion, &group.scale(c, &degs[with_free[*j]]));
            }
            let k = group
                .element_order(&torsion)
                .expect("free part of the witness degree vanishes");
            let k = k.to_u32().unwrap_or(u32::MAX);
            let exps = circuit.iter().map(|(j, c)| {
                (
                    with_free[*j],
                    c.to_u32().unwrap_or(u32::MAX).saturating_mul(k),
                )
            });
            let w = Polynomial::monomial(ExponentVector::from_pairs(exps));
            UnitCheck::Fail {
                witness: w.display(&names).to_string(),
            }
        }
        Ok(None) if with_free.len() == degs.len() => UnitCheck::Pass {
            explanation: "free parts of all degrees lie in an open half-space".into(),
        },
        Ok(None) => UnitCheck::Unknown {
            explanation: format!(
                "variables with torsion-only degree: {}",
                (0..degs.len())
                    .filter(|i| !with_free.contains(i))
                    .map(|i| names[i].as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        },
    }
}
