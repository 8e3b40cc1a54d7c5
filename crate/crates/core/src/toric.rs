//! Stacky fans and their Cox data.
//!
//! A ray `ρ_i` with multiplicity `a_i` contributes the lattice vector
//! `b_i = a_i ρ_i`. The grading group is `Z^n / {(⟨m, b_i⟩)_i : m ∈ Z^d}` and the
//! variable `x_i` has the class of `e_i`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::abelian::{cokernel, integer_kernel, smith_normal_form, IntMatrix};
use crate::error::{Error, Result};
use crate::gradedring::{
    nonnegative_circuit, CoxPresentation, ExponentVector, Polynomial, Variable,
};
use crate::stack::{orient_free_part, Diagnostic, StackData, Verdict};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackyFan {
    pub dim: usize,
    pub names: Vec<String>,
    pub rays: Vec<Vec<BigInt>>,
    pub multiplicities: Vec<BigInt>,
    /// Maximal cones as sets of ray indices.
    pub max_cones: Vec<Vec<usize>>,
}

impl StackyFan {
    /// Rays named `x0, x1, …`, all multiplicities 1.
    pub fn from_i64(dim: usize, rays: &[&[i64]], max_cones: &[&[usize]]) -> Self {
        Self {
            dim,
            names: (0..rays.len()).map(|i| format!("x{i}")).collect(),
            rays: rays
                .iter()
                .map(|r| r.iter().map(|&c| BigInt::from(c)).collect())
                .collect(),
            multiplicities: vec![BigInt::one(); rays.len()],
            max_cones: max_cones.iter().map(|c| c.to_vec()).collect(),
        }
    }

    pub fn with_multiplicities(mut self, mult: &[i64]) -> Self {
        self.multiplicities = mult.iter().map(|&m| BigInt::from(m)).collect();
        self
    }

    fn cone_matrix(&self, cone: &[usize]) -> IntMatrix {
        IntMatrix::from_columns(
            self.dim,
            &cone
                .iter()
                .map(|&i| self.rays[i].clone())
                .collect::<Vec<_>>(),
        )
    }

    fn show_cone(&self, cone: &[usize]) -> String {
        format!(
            "({})",
            cone.iter()
                .map(|&i| self.names[i].as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank()
}

/// Whether two simplicial cones meet in their common face: no point of both
/// has a positive coordinate on a ray outside the common face. Modulo the span
/// of the common rays this asks for a nonnegative circuit among the remaining
/// rays of one cone and the negated remaining rays of the other.
fn meet_properly(fan: &StackyFan, s: &[usize], t: &[usize]) -> bool {
    let common: Vec<usize> = s.iter().copied().filter(|i| t.contains(i)).collect();
    let common_m = fan.cone_matrix(&common);
    // rows of `proj` cut out the span of the common rays
    let proj = if common.is_empty() {
        IntMatrix::identity(fan.dim)
    } else {
        integer_kernel(&common_m.transpose()).transpose()
    };
    let mut vectors: Vec<Vec<BigInt>> = vec![];
    for &i in s.iter().filter(|i| !common.contains(i)) {
        vectors.push(proj.mul_vec(&fan.rays[i]));
    }
    for &j in t.iter().filter(|j| !common.contains(j)) {
        vectors.push(proj.mul_vec(&fan.rays[j]).into_iter().map(|c| -c).collect());
    }
    if vectors.is_empty() {
        return true;
    }
    matches!(nonnegative_circuit(&vectors, proj.rows()), Ok(None))
}

pub fn validate_fan(fan: &StackyFan) -> Vec<Diagnostic> {
    let mut out = vec![];
    let n = fan.rays.len();
    let mut push = |check: &str, fails: Vec<String>, ok: &str| {
        out.push(if fails.is_empty() {
            Diagnostic::new(check, Verdict::Pass, ok)
        } else {
            Diagnostic::new(check, Verdict::Fail, fails.join("; "))
        });
    };

    let mut shape = vec![];
    if fan.names.len() != n || fan.multiplicities.len() != n {
        shape.push(format!(
            "{} rays, {} names, {} multiplicities",
            n,
            fan.names.len(),
            fan.multiplicities.len()
        ));
    }
    for (i, r) in fan.rays.iter().enumerate() {
        if r.len() != fan.dim {
            shape.push(format!(
                "ray {} has {} coordinates, expected {}",
                fan.names[i],
                r.len(),
                fan.dim
            ));
        }
    }
    for (i, m) in fan.multiplicities.iter().enumerate() {
        if !m.is_positive() {
            shape.push(format!("ray {} has multiplicity {}", fan.names[i], m));
        }
    }
    for c in &fan.max_cones {
        if c.iter().any(|&i| i >= n) || c.iter().collect::<BTreeSet<_>>().len() != c.len() {
            shape.push(format!("cone {c:?} has invalid or repeated ray indices"));
        }
    }
    let shape_ok = shape.is_empty();
    push(
        "shape",
        shape,
        "coordinates, multiplicities and cone indices are consistent",
    );
    if !shape_ok {
        return out;
    }

    let primitive: Vec<String> = (0..n)
        .filter(|&i| fan.rays[i].iter().fold(BigInt::zero(), |g, c| g.gcd(c)) != BigInt::one())
        .map(|i| {
            format!(
                "ray {} = {:?} is not primitive",
                fan.names[i],
                fan.rays[i]
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
            )
        })
        .collect();
    push("primitive", primitive, "all rays primitive");

    let mut distinct = vec![];
    for i in 0..n {
        for j in i + 1..n {
            if fan.rays[i] == fan.rays[j] {
                distinct.push(format!(
                    "rays {} and {} coincide",
                    fan.names[i], fan.names[j]
                ));
            }
        }
    }
    push("distinct", distinct, "rays pairwise distinct");

    let simplicial: Vec<String> = fan
        .max_cones
        .iter()
        .filter(|c| rank(&fan.cone_matrix(c)) != c.len())
        .map(|c| format!("cone {} has linearly dependent rays", fan.show_cone(c)))
        .collect();
    let simplicial_ok = simplicial.is_empty();
    push("simplicial", simplicial, "every maximal cone is simplicial");

    let mut improper = vec![];
    if simplicial_ok {
        for (a, s) in fan.max_cones.iter().enumerate() {
            for t in &fan.max_cones[a + 1..] {
                if !meet_properly(fan, s, t) {
                    improper.push(format!(
                        "cones {} and {} overlap beyond a common face",
                        fan.show_cone(s),
                        fan.show_cone(t)
                    ));
                }
            }
        }
        push(
            "intersections",
            improper,
            "maximal cones meet along common faces",
        );
    }
    out
}

fn ensure_valid(fan: &StackyFan) -> Result<()> {
    match validate_fan(fan)
        .into_iter()
        .find(|d| d.verdict == Verdict::Fail)
    {
        Some(d) => Err(Error::InvalidFan(format!("{}: {}", d.check, d.detail))),
        None => Ok(()),
    }
}

/// Cox data: one variable per ray, no relations, irrelevant ideal generated by
/// `∏_{i ∉ σ} x_i` over maximal cones `σ`.
pub fn fan_to_stack(fan: &StackyFan) -> Result<StackData> {
    ensure_valid(fan)?;
    let n = fan.rays.len();
    let b: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            fan.rays[i]
                .iter()
                .map(|c| c * &fan.multiplicities[i])
                .collect()
        })
        .collect();
    // n × d: row i is b_i, so column k is m = e_k paired with every b_i
    let m = IntMatrix::from_columns(fan.dim, &b).transpose();
    let (group, proj) = cokernel(&m);
    let degrees: Vec<_> = (0..n)
        .map(|i| proj.apply(&proj.source.generator(i)))
        .collect();
    let orient = orient_free_part(&group, &degrees);
    let variables = (0..n)
        .map(|i| Variable {
            name: fan.names[i].clone(),
            degree: orient.apply(&degrees[i]),
        })
        .collect();
    let irrelevant = fan
        .max_cones
        .iter()
        .map(|c| {
            Polynomial::monomial(ExponentVector::from_pairs(
                (0..n).filter(|i| !c.contains(i)).map(|i| (i, 1)),
            ))
        })
        .collect();
    let cox = CoxPresentation::new(group, variables, vec![], irrelevant)?;
    StackData::new("fan", cox)
}

/// [`fan_to_stack`] with all multiplicities set to 1.
pub fn canonical_from_fan(fan: &StackyFan) -> Result<StackData> {
    let mut reduced = fan.clone();
    reduced.multiplicities = vec![BigInt::one(); fan.rays.len()];
    fan_to_stack(&reduced)
}

pub fn root_along_ray(fan: &StackyFan, i: usize, r: &BigInt) -> Result<StackyFan> {
    if i >= fan.rays.len() {
        return Err(Error::InvalidFan(format!(
            "ray index {i} out of range (fan has {} rays)",
            fan.rays.len()
        )));
    }
    if !r.is_positive() {
        return Err(Error::NonPositiveOrder(r.clone()));
    }
    let mut out = fan.clone();
    out.multiplicities[i] = &out.multiplicities[i] * r;
    Ok(out)
}

fn unimodular_cones(fan: &StackyFan) -> bool {
    fan.max_cones.iter().all(|c| {
        smith_normal_form(&fan.cone_matrix(c))
            .diagonal()
            .iter()
            .all(|d| d.is_one())
    })
}

pub fn is_smooth_fan(fan: &StackyFan) -> bool {
    fan.multiplicities.iter().all(|m| m.is_one()) && unimodular_cones(fan)
}

/// Whether the fan without multiplicities is smooth, so that the
/// torus-invariant prime divisors cross normally.
pub fn snc_invariant_divisors(fan: &StackyFan) -> bool {
    unimodular_cones(fan)
}
