//! Quotient stacks `[Spec R \ V(J_irr) / Hom(A, k^*)]` given by Cox data, and
//! the constructions that act on them.

mod fingerprint;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::abelian::{
    dual_group, hermite_normal_form, pushout_root, subgroup_cokernel, AbelianGroup,
    DiagonalizableGroupDescriptor, GroupElement, GroupHom, IntMatrix,
};
use crate::error::{Error, Result};
use crate::gradedring::{
    degree_zero_subalgebra_check, smoothness, CoxPresentation, ExponentVector, Polynomial,
    SingularityVerdict, UnitCheck, Variable,
};

pub use fingerprint::{graded_fingerprint, Equivalence, Fingerprint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RootKind {
    /// Root of the divisor cut out by `section`, stored as text.
    DivisorRoot {
        section: String,
        #[serde(serialize_with = "crate::abelian::serialize_int")]
        order: BigInt,
    },
    LineBundleRoot {
        degree: GroupElement,
        #[serde(serialize_with = "crate::abelian::serialize_int")]
        order: BigInt,
    },
}

impl RootKind {
    pub fn order(&self) -> &BigInt {
        match self {
            RootKind::DivisorRoot { order, .. } | RootKind::LineBundleRoot { order, .. } => order,
        }
    }
}

/// One root construction applied to a stack. The tautological class is
/// expressed in the grading produced by that construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootRecord {
    #[serde(flatten)]
    pub kind: RootKind,
    pub tautological_class: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackData {
    pub name: String,
    /// The grading group is `cox.grading`.
    pub cox: CoxPresentation,
    pub provenance: Vec<RootRecord>,
}

impl StackData {
    /// Fails with [`Error::Inhomogeneous`] on the first inhomogeneous polynomial.
    pub fn new(name: impl Into<String>, cox: CoxPresentation) -> Result<Self> {
        let report = cox.check_homogeneous();
        if let Some(bad) = report.failures().next() {
            return Err(Error::Inhomogeneous {
                poly: bad.polynomial.clone(),
                detail: describe_failure(&bad.status),
            });
        }
        Ok(Self::unchecked(name, cox))
    }

    pub fn unchecked(name: impl Into<String>, cox: CoxPresentation) -> Self {
        Self {
            name: name.into(),
            cox,
            provenance: vec![],
        }
    }

    pub fn grading(&self) -> &AbelianGroup {
        &self.cox.grading
    }

    pub fn degrees(&self) -> Vec<GroupElement> {
        self.cox
            .variables
            .iter()
            .map(|v| v.degree.clone())
            .collect()
    }

    /// The point `Spec k`.
    pub fn point() -> Self {
        let cox = CoxPresentation::new(AbelianGroup::trivial(), vec![], vec![], vec![])
            .expect("empty presentation");
        Self::unchecked("point", cox)
    }

    /// Weighted projective stack `P(w_0, …, w_n)` with variables `x0, …, xn`.
    pub fn weighted_projective(weights: &[i64]) -> Self {
        let vars = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Variable {
                name: format!("x{i}"),
                degree: GroupElement::from_i64(&[w]),
            })
            .collect();
        let irr = (0..weights.len()).map(Polynomial::var).collect();
        let cox = CoxPresentation::new(AbelianGroup::free(1), vars, vec![], irr)
            .expect("well-formed presentation");
        let name = format!(
            "P({})",
            weights
                .iter()
                .map(|w| w.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        Self::unchecked(name, cox)
    }
}

fn describe_failure(h: &crate::gradedring::Homogeneity) -> String {
    match h {
        crate::gradedring::Homogeneity::Inhomogeneous { term_degrees } => term_degrees
            .iter()
            .map(|(t, d)| format!("deg {t} = {d}"))
            .collect::<Vec<_>>()
            .join(", "),
        crate::gradedring::Homogeneity::Homogeneous { .. } => String::new(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Fail,
    Unknown,
    Pass,
}

impl Verdict {
    pub fn meet(self, other: Verdict) -> Verdict {
        self.min(other)
    }

    /// Process exit code: 0 pass, 1 fail, 2 unknown.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Unknown => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub check: String,
    pub verdict: Verdict,
    /// Witness for failures, explanation otherwise.
    pub detail: String,
}

impl Diagnostic {
    pub fn new(check: impl Into<String>, verdict: Verdict, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            verdict,
            detail: detail.into(),
        }
    }
}

pub fn overall(diagnostics: &[Diagnostic]) -> Verdict {
    diagnostics
        .iter()
        .fold(Verdict::Pass, |acc, d| acc.meet(d.verdict))
}

pub fn validate(x: &StackData) -> Vec<Diagnostic> {
    let mut out = vec![];
    let hom = x.cox.check_homogeneous();
    out.push(match hom.failures().next() {
        None => Diagnostic::new(
            "homogeneity",
            Verdict::Pass,
            "all relations and irrelevant generators are homogeneous",
        ),
        Some(bad) => Diagnostic::new(
            "homogeneity",
            Verdict::Fail,
            format!("{}: {}", bad.polynomial, describe_failure(&bad.status)),
        ),
    });
    out.push(match degree_zero_subalgebra_check(&x.cox) {
        UnitCheck::Pass { explanation } => Diagnostic::new("units", Verdict::Pass, explanation),
        UnitCheck::Fail { witness } => Diagnostic::new(
            "units",
            Verdict::Fail,
            format!("nonconstant monomial of degree 0: {witness}"),
        ),
        UnitCheck::Unknown { explanation } => {
            Diagnostic::new("units", Verdict::Unknown, explanation)
        }
    });
    let s = smoothness(&x.cox);
    let v = match s.verdict {
        SingularityVerdict::Smooth | SingularityVerdict::SmoothOnComplement => Verdict::Pass,
        SingularityVerdict::Singular => Verdict::Fail,
        SingularityVerdict::Unknown => Verdict::Unknown,
    };
    out.push(Diagnostic::new("smoothness", v, s.explanation));
    out.push(Diagnostic::new(
        "finite_generation",
        Verdict::Pass,
        "finite presentation",
    ));
    out.push(Diagnostic::new(
        "grading_finitely_generated",
        Verdict::Pass,
        format!("grading {}", x.grading()),
    ));
    out
}

/// A variable name not yet used: `z`, `z1`, `z2`, ...
fn fresh_name(cox: &CoxPresentation) -> String {
    std::iter::once("z".to_string())
        .chain((1..).map(|i| format!("z{i}")))
        .find(|n| cox.var_index(n).is_none())
        .expect("unbounded name supply")
}

/// Rewrites the grading along `phi`, an isomorphism onto its target.
fn regrade(cox: &CoxPresentation, phi: &GroupHom) -> CoxPresentation {
    CoxPresentation {
        grading: phi.target.clone(),
        variables: cox
            .variables
            .iter()
            .map(|v| Variable {
                name: v.name.clone(),
                degree: phi.apply(&v.degree),
            })
            .collect(),
        relations: cox.relations.clone(),
        irrelevant: cox.irrelevant.clone(),
    }
}

/// Automorphism of an invariant-form group, identity on torsion, putting the
/// free parts of `degrees` into Hermite normal form.
pub fn orient_free_part(group: &AbelianGroup, degrees: &[GroupElement]) -> GroupHom {
    let t = group.torsion().len();
    let n = group.dim();
    let f = n - t;
    let cols: Vec<Vec<BigInt>> = degrees.iter().map(|d| d.0[t..].to_vec()).collect();
    let (u, _) = hermite_normal_form(&IntMatrix::from_columns(f, &cols));
    let mut m = IntMatrix::identity(n);
    for i in 0..f {
        for j in 0..f {
            m[(t + i, t + j)] = u[(i, j)].clone();
        }
    }
    GroupHom::new(group.clone(), group.clone(), m).expect("unimodular on the free part")
}

/// Adjoins `z` with `z^r = s`, extending the grading by an `r`-th root of `deg s`.
pub fn divisor_root(x: &StackData, s: &Polynomial, r: &BigInt) -> Result<StackData> {
    let d = x.cox.degree_of(s)?;
    let r_u32 = r
        .try_into()
        .map_err(|_| Error::NonPositiveOrder(r.clone()))?;
    if r_u32 == 0 {
        return Err(Error::NonPositiveOrder(r.clone()));
    }
    let pr = pushout_root(x.grading(), &d, r)?;
    let mut cox = regrade(&x.cox, &pr.iota);
    let z = cox.variables.len();
    cox.variables.push(Variable {
        name: fresh_name(&x.cox),
        degree: pr.tautological.clone(),
    });
    cox.relations
        .push(&Polynomial::monomial(ExponentVector::var_pow(z, r_u32)) - s);
    let orient = orient_free_part(&cox.grading, &degrees_of(&cox));
    let cox = regrade(&cox, &orient);
    let mut provenance = x.provenance.clone();
    provenance.push(RootRecord {
        kind: RootKind::DivisorRoot {
            section: x.cox.show(s),
            order: r.clone(),
        },
        tautological_class: orient.apply(&pr.tautological),
    });
    Ok(StackData {
        name: format!("{}[{}-root of {}]", x.name, r, x.cox.show(s)),
        cox,
        provenance,
    })
}

/// Extends the grading by an `r`-th root of the line bundle of degree `d`;
/// the ring is unchanged.
pub fn line_bundle_root(x: &StackData, d: &GroupElement, r: &BigInt) -> Result<StackData> {
    line_bundle_root_with_inclusion(x, d, r).map(|(y, _)| y)
}

/// As [`line_bundle_root`], also returning the inclusion of the old grading
/// into the new one.
fn line_bundle_root_with_inclusion(
    x: &StackData,
    d: &GroupElement,
    r: &BigInt,
) -> Result<(StackData, GroupHom)> {
    let pr = pushout_root(x.grading(), d, r)?;
    let cox = regrade(&x.cox, &pr.iota);
    let orient = orient_free_part(&cox.grading, &degrees_of(&cox));
    let cox = regrade(&cox, &orient);
    let inclusion = pr.iota.then(&orient);
    let mut provenance = x.provenance.clone();
    provenance.push(RootRecord {
        kind: RootKind::LineBundleRoot {
            degree: x.grading().reduce(d),
            order: r.clone(),
        },
        tautological_class: orient.apply(&pr.tautological),
    });
    Ok((
        StackData {
            name: format!("{}[{}-root of O{}]", x.name, r, d),
            cox,
            provenance,
        },
        inclusion,
    ))
}

fn degrees_of(cox: &CoxPresentation) -> Vec<GroupElement> {
    cox.variables.iter().map(|v| v.degree.clone()).collect()
}

/// Subgroup generated by the variable degrees, and the generic stabilizer
/// `Hom(A / A_eff, k^*)`.
#[derive(Clone, Debug)]
pub struct EffectiveDegrees {
    pub group: AbelianGroup,
    pub inclusion: GroupHom,
    pub stabilizer: DiagonalizableGroupDescriptor,
}

pub fn effective_degree_subgroup(x: &StackData) -> EffectiveDegrees {
    let sc =
        subgroup_cokernel(x.grading(), &x.degrees()).expect("variable degrees lie in the grading");
    EffectiveDegrees {
        group: sc.sub,
        inclusion: sc.inclusion,
        stabilizer: dual_group(&sc.cokernel),
    }
}

/// A rigid stack together with the line-bundle roots that rebuild the original.
#[derive(Clone, Debug)]
pub struct GerbeFactorization {
    pub rigidified: StackData,
    pub roots: Vec<(GroupElement, BigInt)>,
}

pub fn rigidify(x: &StackData) -> Result<GerbeFactorization> {
    let a = x.grading();
    let sc = subgroup_cokernel(a, &x.degrees())?;
    if sc.cokernel.free_rank() > 0 {
        return Err(Error::InfiniteStabilizer(format!(
            "{}: degrees generate a subgroup of infinite index (quotient {})",
            x.name, sc.cokernel
        )));
    }
    let sub_gens: Vec<GroupElement> = (0..sc.sub.dim())
        .map(|i| sc.inclusion.apply(&sc.sub.generator(i)))
        .collect();
    let to_sub = |e: &GroupElement| -> GroupElement {
        let c = a
            .express_in(&sub_gens, e)
            .expect("element of the effective subgroup");
        sc.sub.reduce(&GroupElement(c))
    };
    let mut cox = CoxPresentation {
        grading: sc.sub.clone(),
        variables: x
            .cox
            .variables
            .iter()
            .map(|v| Variable {
                name: v.name.clone(),
                degree: to_sub(&v.degree),
            })
            .collect(),
        relations: x.cox.relations.clone(),
        irrelevant: x.cox.irrelevant.clone(),
    };
    let orient = orient_free_part(&cox.grading, &degrees_of(&cox));
    cox = regrade(&cox, &orient);
    let roots = sc
        .cokernel
        .moduli()
        .iter()
        .zip(&sc.lifts)
        .map(|(r, m)| {
            let l = a.scale(r, m);
            (orient.apply(&to_sub(&l)), r.clone())
        })
        .collect();
    let rigidified = StackData {
        name: format!("{}[rigidified]", x.name),
        cox,
        provenance: vec![],
    };
    Ok(GerbeFactorization { rigidified, roots })
}

/// Takes the roots in order. Every degree is read in the rigidified grading
/// and carried along the inclusions produced by the earlier roots.
pub fn reconstruct(f: &GerbeFactorization) -> Result<StackData> {
    let mut acc = f.rigidified.clone();
    let mut to_acc = GroupHom::identity(acc.grading());
    for (l, r) in &f.roots {
        f.rigidified.grading().check_element(l)?;
        let (next, inclusion) = line_bundle_root_with_inclusion(&acc, &to_acc.apply(l), r)?;
        to_acc = to_acc.then(&inclusion);
        acc = next;
    }
    Ok(acc)
}

pub fn is_toric(x: &StackData) -> bool {
    x.cox.is_polynomial()
}

/// Eliminates simple root relations and replaces monomial irrelevant
/// generators by their radicals.
pub fn simplify(x: &StackData) -> StackData {
    let mut cox = x.cox.eliminate_simple_roots();
    let mut irrelevant: Vec<Polynomial> = vec![];
    for g in &cox.irrelevant {
        let g = match g.leading_term() {
            Some((e, _)) if g.is_monomial() => Polynomial::monomial(e.radical()),
            _ => g.clone(),
        };
        if !irrelevant.contains(&g) {
            irrelevant.push(g);
        }
    }
    cox.irrelevant = irrelevant;
    StackData {
        name: x.name.clone(),
        cox,
        provenance: x.provenance.clone(),
    }
}

/// The toric stack obtained by dropping all relations, with a warning when the
/// grading has torsion.
pub fn ambient_toric(x: &StackData) -> (StackData, Option<String>) {
    let mut cox = x.cox.clone();
    cox.relations.clear();
    let torsion = x.grading().canonical().group.torsion();
    let warning = (!torsion.is_empty()).then(|| {
        format!(
            "grading {} has torsion; the embedding is only guaranteed for a free class group",
            x.grading().canonical().group
        )
    });
    (
        StackData {
            name: format!("{}[ambient]", x.name),
            cox,
            provenance: x.provenance.clone(),
        },
        warning,
    )
}

/// `∏ r_i` over a factorization, for comparison with `|A / A_eff|`.
pub fn root_order_product(f: &GerbeFactorization) -> BigInt {
    f.roots
        .iter()
        .fold(BigInt::one(), |acc, (_, r)| acc * r.abs())
}
