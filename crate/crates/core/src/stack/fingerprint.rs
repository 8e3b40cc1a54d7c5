//! Canonical forms of stacks and a bounded isomorphism test between them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{orient_free_part, StackData};
use crate::abelian::{
    hermite_normal_form, integer_kernel, quotient, solve_integer, AbelianGroup, GroupElement,
    GroupHom, IntMatrix,
};
use crate::gradedring::{ExponentVector, Polynomial};

/// Variable bijections tried before giving up.
const BIJECTION_LIMIT: u128 = 50_000;
/// Largest torsion subgroup whose automorphisms are enumerated.
const TORSION_ORDER_LIMIT: u64 = 10_000;
/// Candidate torsion endomorphisms examined per comparison.
const AUTOMORPHISM_CANDIDATE_LIMIT: u128 = 200_000;

/// A stack after eliminating simple root relations, with its grading in
/// invariant-factor coordinates, the free part of the degrees in Hermite form,
/// variables sorted by `(degree, name)`, monic relations and a normalized
/// irrelevant ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub grading: AbelianGroup,
    pub names: Vec<String>,
    pub degrees: Vec<GroupElement>,
    pub relations: Vec<Polynomial>,
    pub irrelevant: Vec<Polynomial>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equivalence {
    Equal,
    NotEqual,
    /// A search bound was exceeded.
    Unknown,
}

pub fn graded_fingerprint(x: &StackData) -> Fingerprint {
    let cox = x.cox.eliminate_simple_roots();
    let canon = cox.grading.canonical();
    let group = canon.group.clone();
    let degs: Vec<GroupElement> = cox
        .variables
        .iter()
        .map(|v| canon.projection.apply(&v.degree))
        .collect();
    let orient = orient_free_part(&group, &degs);
    let degs: Vec<GroupElement> = degs.iter().map(|d| orient.apply(d)).collect();

    let mut order: Vec<usize> = (0..degs.len()).collect();
    order.sort_by(|&i, &j| {
        degs[i]
            .0
            .cmp(&degs[j].0)
            .then_with(|| cox.variables[i].name.cmp(&cox.variables[j].name))
    });
    let mut position = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let remap = |p: &Polynomial| p.remap(|i| position[i]);
    Fingerprint {
        grading: group,
        names: order
            .iter()
            .map(|&i| cox.variables[i].name.clone())
            .collect(),
        degrees: order.iter().map(|&i| degs[i].clone()).collect(),
        relations: normalize_relations(cox.relations.iter().map(remap)),
        irrelevant: normalize_irrelevant(cox.irrelevant.iter().map(remap)),
    }
}

fn normalize_relations(polys: impl Iterator<Item = Polynomial>) -> Vec<Polynomial> {
    let mut out: Vec<Polynomial> = polys.filter(|p| !p.is_zero()).map(|p| p.monic()).collect();
    out.sort();
    out.dedup();
    out
}

/// Monomial generators are replaced by their radicals and reduced to the
/// minimal ones; a unit generator collapses the ideal to `(1)`.
fn normalize_irrelevant(polys: impl Iterator<Item = Polynomial>) -> Vec<Polynomial> {
    let polys: Vec<Polynomial> = polys.filter(|p| !p.is_zero()).collect();
    if polys.iter().any(|p| p.is_nonzero_constant()) {
        return vec![Polynomial::one()];
    }
    let mut monomials: Vec<ExponentVector> = polys
        .iter()
        .filter(|p| p.is_monomial())
        .map(|p| p.leading_term().expect("nonzero").0.radical())
        .collect();
    monomials.sort();
    monomials.dedup();
    let minimal: Vec<&ExponentVector> = monomials
        .iter()
        .filter(|m| !monomials.iter().any(|o| o != *m && o.divides(m)))
        .collect();
    let mut out: Vec<Polynomial> = minimal
        .into_iter()
        .map(|m| Polynomial::monomial(m.clone()))
        .collect();
    out.extend(polys.iter().filter(|p| !p.is_monomial()).map(|p| p.monic()));
    out.sort();
    out.dedup();
    out
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "grading {}", self.grading)?;
        for (n, d) in self.names.iter().zip(&self.degrees) {
            writeln!(f, "var {n} : {d}")?;
        }
        for r in &self.relations {
            writeln!(f, "rel {}", r.display(&self.names))?;
        }
        for g in &self.irrelevant {
            writeln!(f, "irr {}", g.display(&self.names))?;
        }
        Ok(())
    }
}

/// Element order of the degree, then per polynomial (kind, index, exponents).
type Profile = (Option<BigInt>, Vec<(u8, usize, Vec<u32>)>);

/// Exponent profile of a variable across all polynomials, invariant under
/// renaming.
fn profile(fp: &Fingerprint, i: usize) -> Profile {
    let mut prof = vec![];
    for (kind, list) in [(0u8, &fp.relations), (1u8, &fp.irrelevant)] {
        for p in list.iter() {
            let mut exps: Vec<u32> = p.terms().map(|(e, _)| e.exponent(i)).collect();
            if exps.iter().all(|&e| e == 0) {
                continue;
            }
            exps.sort_unstable();
            prof.push((kind, p.len(), exps));
        }
    }
    prof.sort();
    (fp.grading.element_order(&fp.degrees[i]), prof)
}

impl Fingerprint {
    /// Searches for a renaming of variables and a grading automorphism taking
    /// `self` to `other`.
    pub fn compare(&self, other: &Fingerprint) -> Equivalence {
        if self.grading != other.grading
            || self.names.len() != other.names.len()
            || self.relations.len() != other.relations.len()
            || self.irrelevant.len() != other.irrelevant.len()
        {
            return Equivalence::NotEqual;
        }
        let n = self.names.len();
        let mut classes: BTreeMap<_, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for i in 0..n {
            classes.entry(profile(self, i)).or_default().0.push(i);
            classes.entry(profile(other, i)).or_default().1.push(i);
        }
        let classes: Vec<(Vec<usize>, Vec<usize>)> = classes.into_values().collect();
        if classes.iter().any(|(a, b)| a.len() != b.len()) {
            return Equivalence::NotEqual;
        }
        let count = classes.iter().try_fold(1u128, |acc, (a, _)| {
            (1..=a.len() as u128).try_fold(acc, |x, k| x.checked_mul(k))
        });
        if count.is_none_or(|c| c > BIJECTION_LIMIT) {
            return Equivalence::Unknown;
        }

        let mut pi = vec![usize::MAX; n];
        let mut saw_unknown = false;
        let found = search(&classes, 0, &mut pi, &mut |pi| {
            let relabel = |p: &Polynomial| p.remap(|i| pi[i]);
            if normalize_relations(self.relations.iter().map(relabel)) != other.relations
                || normalize_irrelevant(self.irrelevant.iter().map(relabel)) != other.irrelevant
            {
                return false;
            }
            let mut target = vec![GroupElement(vec![]); n];
            for i in 0..n {
                target[i] = other.degrees[pi[i]].clone();
            }
            match grading_match(&self.grading, &self.degrees, &target) {
                Equivalence::Equal => true,
                Equivalence::Unknown => {
                    saw_unknown = true;
                    false
                }
                Equivalence::NotEqual => false,
            }
        });
        if found {
            Equivalence::Equal
        } else if saw_unknown {
            Equivalence::Unknown
        } else {
            Equivalence::NotEqual
        }
    }
}

/// Runs `visit` on every bijection respecting `classes` until it returns true.
fn search(
    classes: &[(Vec<usize>, Vec<usize>)],
    c: usize,
    pi: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    let Some((from, to)) = classes.get(c) else {
        return visit(pi);
    };
    let mut used = vec![false; to.len()];
    fn assign(
        from: &[usize],
        to: &[usize],
        k: usize,
        used: &mut Vec<bool>,
        pi: &mut Vec<usize>,
        next: &mut dyn FnMut(&mut Vec<usize>) -> bool,
    ) -> bool {
        if k == from.len() {
            return next(pi);
        }
        for j in 0..to.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            pi[from[k]] = to[j];
            if assign(from, to, k + 1, used, pi, next) {
                return true;
            }
            used[j] = false;
        }
        false
    }
    assign(from, to, 0, &mut used, pi, &mut |pi| {
        search(classes, c + 1, pi, visit)
    })
}

/// Lattice of integer relations among `degrees`, as a Hermite basis.
fn relation_lattice(group: &AbelianGroup, degrees: &[GroupElement]) -> IntMatrix {
    let n = degrees.len();
    let d = IntMatrix::from_columns(
        group.dim(),
        &degrees.iter().map(|e| e.0.clone()).collect::<Vec<_>>(),
    );
    let ker = integer_kernel(&d.hconcat(&group.relation_matrix()));
    let rows: Vec<Vec<BigInt>> = (0..ker.cols())
        .map(|j| ker.column(j)[..n].to_vec())
        .collect();
    hermite_basis(n, &rows)
}

fn hermite_basis(width: usize, rows: &[Vec<BigInt>]) -> IntMatrix {
    let m = IntMatrix::from_columns(width, rows).transpose();
    let (_, h) = hermite_normal_form(&m);
    let nonzero: Vec<usize> = (0..h.rows())
        .filter(|&i| h.row(i).iter().any(|c| !c.is_zero()))
        .collect();
    h.select_rows(&nonzero)
}

fn generates(group: &AbelianGroup, gens: &[GroupElement]) -> bool {
    quotient(group, gens).group.is_trivial()
}

/// Whether some automorphism of `group` (invariant-factor form) sends each
/// `a[i]` to `b[i]`.
pub(crate) fn grading_match(
    group: &AbelianGroup,
    a: &[GroupElement],
    b: &[GroupElement],
) -> Equivalence {
    let (gen_a, gen_b) = (generates(group, a), generates(group, b));
    if gen_a != gen_b {
        return Equivalence::NotEqual;
    }
    if gen_a {
        return if relation_lattice(group, a) == relation_lattice(group, b) {
            Equivalence::Equal
        } else {
            Equivalence::NotEqual
        };
    }

    let torsion = group.torsion();
    let t = torsion.len();
    let f = group.free_rank();
    let free =
        |v: &[GroupElement]| -> Vec<Vec<BigInt>> { v.iter().map(|e| e.0[t..].to_vec()).collect() };
    let (fa, fb) = (free(a), free(b));
    if hermite_normal_form(&IntMatrix::from_columns(f, &fa)).1
        != hermite_normal_form(&IntMatrix::from_columns(f, &fb)).1
    {
        return Equivalence::NotEqual;
    }
    if t == 0 {
        return Equivalence::Equal;
    }
    let tors_group = AbelianGroup::new(torsion.clone()).expect("torsion factors are valid moduli");
    let Some(order) = tors_group.order().and_then(|o| o.to_u64()) else {
        return Equivalence::Unknown;
    };
    if order > TORSION_ORDER_LIMIT {
        return Equivalence::Unknown;
    }

    // images of the generators: elements killed by the generator's order
    let elements = enumerate(&torsion);
    let candidates: Vec<Vec<&Vec<BigInt>>> = torsion
        .iter()
        .map(|m| {
            elements
                .iter()
                .filter(|x| {
                    tors_group.is_zero_element(&tors_group.scale(m, &GroupElement((*x).clone())))
                })
                .collect()
        })
        .collect();
    let total = candidates
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128));
    if total.is_none_or(|c| c > AUTOMORPHISM_CANDIDATE_LIMIT) {
        return Equivalence::Unknown;
    }

    let n = a.len();
    let tor_a: Vec<Vec<BigInt>> = a.iter().map(|e| e.0[..t].to_vec()).collect();
    let tor_b: Vec<Vec<BigInt>> = b.iter().map(|e| e.0[..t].to_vec()).collect();
    // β is solved one torsion row at a time: F_aᵀ β_k ≡ c_k (mod m_k)
    let fa_t = IntMatrix::from_columns(f, &fa).transpose();
    let mut idx = vec![0usize; t];
    loop {
        let cols: Vec<Vec<BigInt>> = (0..t).map(|j| candidates[j][idx[j]].clone()).collect();
        let alpha = IntMatrix::from_columns(t, &cols);
        let ok = (0..t).all(|k| {
            let m = &torsion[k];
            let rhs: Vec<BigInt> = (0..n)
                .map(|i| {
                    let img: BigInt = (0..t).map(|j| &alpha[(k, j)] * &tor_a[i][j]).sum();
                    &tor_b[i][k] - img
                })
                .collect();
            let system = fa_t.hconcat(&IntMatrix::diagonal(&vec![m.clone(); n]));
            solve_integer(&system, &rhs).is_some()
        });
        if ok {
            let hom = GroupHom::new(tors_group.clone(), tors_group.clone(), alpha)
                .expect("orders respected");
            if hom.is_injective() {
                return Equivalence::Equal;
            }
        }
        // odometer over candidate images
        let mut j = t;
        loop {
            if j == 0 {
                return Equivalence::NotEqual;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < candidates[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// All elements of `⊕ Z/m_i`, as coordinate vectors.
fn enumerate(moduli: &[BigInt]) -> Vec<Vec<BigInt>> {
    let mut out = vec![vec![]];
    for m in moduli {
        let m = m.to_u64().expect("bounded torsion");
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..m).map(move |c| {
                    let mut w = v.clone();
                    w.push(BigInt::from(c));
                    w
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn els(v: &[&[i64]]) -> Vec<GroupElement> {
        v.iter().map(|c| GroupElement::from_i64(c)).collect()
    }

    #[test]
    fn sign_automorphism_of_z() {
        let z = AbelianGroup::free(1);
        assert_eq!(
            grading_match(&z, &els(&[&[1], &[1]]), &els(&[&[-1], &[-1]])),
            Equivalence::Equal
        );
        assert_eq!(
            grading_match(&z, &els(&[&[1], &[2]]), &els(&[&[1], &[1]])),
            Equivalence::NotEqual
        );
    }

    #[test]
    fn torsion_automorphisms() {
        let g = AbelianGroup::from_moduli(&[5]).unwrap();
        assert_eq!(grading_match(&g, &[], &[]), Equivalence::Equal);
        assert_eq!(
            grading_match(&g, &els(&[&[1]]), &els(&[&[2]])),
            Equivalence::Equal
        );
        assert_eq!(
            grading_match(&g, &els(&[&[1]]), &els(&[&[0]])),
            Equivalence::NotEqual
        );
        // in Z/2 + Z, (t, v) -> (t + v, v) is an automorphism moving (1, 1) to (0, 1)
        let h = AbelianGroup::from_moduli(&[2, 0]).unwrap();
        assert_eq!(
            grading_match(&h, &els(&[&[1, 1]]), &els(&[&[0, 1]])),
            Equivalence::Equal
        );
        // but the torsion part of an even free class cannot change
        assert_eq!(
            grading_match(&h, &els(&[&[1, 2]]), &els(&[&[0, 2]])),
            Equivalence::NotEqual
        );
    }

    #[test]
    fn irrelevant_normalization() {
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let p = |s: &str| Polynomial::parse(s, &names).unwrap();
        let n = normalize_irrelevant([p("x^2*y"), p("x*y*z"), p("z^3")].into_iter());
        assert_eq!(n, vec![p("z"), p("x*y")]);
        assert_eq!(
            normalize_irrelevant([p("x"), p("2")].into_iter()),
            vec![p("1")]
        );
    }
}
