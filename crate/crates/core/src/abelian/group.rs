//! Finitely generated abelian groups in cyclic coordinates, and their homomorphisms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::matrix::IntMatrix;
use super::snf::{integer_kernel, smith_normal_form, solve_integer};
use crate::error::{Error, Result};

/// An element of an [`AbelianGroup`], given by its coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct GroupElement(#[serde(serialize_with = "serialize_ints")] pub Vec<BigInt>);

impl GroupElement {
    pub fn from_i64(coords: &[i64]) -> Self {
        Self(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `⊕_i Z/m_i`, one cyclic coordinate per modulus, where `m_i = 0` stands for `Z`.
///
/// Groups produced by [`cokernel`], [`quotient`] and friends are in
/// invariant-factor form: torsion moduli `d_1 | d_2 | …` (all `≥ 2`) followed
/// by zeros. User-declared groups keep whatever coordinates they were given,
/// so that the degrees of ring variables stay addressable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianGroup {
    #[serde(serialize_with = "serialize_ints")]
    moduli: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn new(moduli: Vec<BigInt>) -> Result<Self> {
        if let Some(m) = moduli.iter().find(|m| m.is_negative()) {
            return Err(Error::Group(format!("negative modulus {m}")));
        }
        Ok(Self { moduli })
    }

    pub fn from_moduli(moduli: &[i64]) -> Result<Self> {
        Self::new(moduli.iter().map(|&m| BigInt::from(m)).collect())
    }

    /// `⊕ Z/d_i ⊕ Z^free_rank`; the `d_i` must be `≥ 2` and form a divisibility chain.
    pub fn from_invariants(torsion: &[BigInt], free_rank: usize) -> Result<Self> {
        if torsion.iter().any(|d| d < &BigInt::from(2)) {
            return Err(Error::Group("invariant factors must be at least 2".into()));
        }
        if torsion.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(Error::Group(
                "invariant factors must form a divisibility chain".into(),
            ));
        }
        let mut moduli = torsion.to_vec();
        moduli.extend(std::iter::repeat_n(BigInt::zero(), free_rank));
        Ok(Self { moduli })
    }

    pub fn trivial() -> Self {
        Self { moduli: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        Self {
            moduli: vec![BigInt::zero(); rank],
        }
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    /// True when the coordinates are already the invariant-factor decomposition.
    pub fn is_invariant_form(&self) -> bool {
        let split = self
            .moduli
            .iter()
            .position(Zero::is_zero)
            .unwrap_or(self.moduli.len());
        let (tors, free) = self.moduli.split_at(split);
        free.iter().all(Zero::is_zero)
            && tors.iter().all(|d| d >= &BigInt::from(2))
            && tors.windows(2).all(|w| w[1].is_multiple_of(&w[0]))
    }

    /// Invariant-factor form together with the isomorphism from `self` onto it.
    pub fn canonical(&self) -> Quotient {
        quotient(self, &[])
    }

    pub fn free_rank(&self) -> usize {
        if self.is_invariant_form() {
            return self.moduli.iter().filter(|m| m.is_zero()).count();
        }
        self.canonical().group.free_rank()
    }

    /// Invariant factors `d_1 | … | d_k`, all `≥ 2`.
    pub fn torsion(&self) -> Vec<BigInt> {
        if self.is_invariant_form() {
            return self
                .moduli
                .iter()
                .filter(|m| !m.is_zero())
                .cloned()
                .collect();
        }
        self.canonical().group.torsion()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.moduli.iter().any(Zero::is_zero) {
            return None;
        }
        Some(self.moduli.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.order().is_some_and(|o| o.is_one())
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![BigInt::zero(); self.dim()])
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut e = self.zero();
        e.0[i] = BigInt::one();
        self.reduce(&e)
    }

    pub fn check_element(&self, e: &GroupElement) -> Result<()> {
        if e.len() != self.dim() {
            return Err(Error::Arity {
                expected: self.dim(),
                found: e.len(),
            });
        }
        Ok(())
    }

    /// Torsion coordinates reduced into `[0, m)`.
    pub fn reduce(&self, e: &GroupElement) -> GroupElement {
        GroupElement(reduce_coords(&self.moduli, &e.0))
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let v: Vec<BigInt> = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
        self.reduce(&GroupElement(v))
    }

    pub fn scale(&self, k: &BigInt, a: &GroupElement) -> GroupElement {
        self.reduce(&GroupElement(a.0.iter().map(|x| x * k).collect()))
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.scale(&BigInt::from(-1), a)
    }

    pub fn is_zero_element(&self, a: &GroupElement) -> bool {
        self.reduce(a).0.iter().all(Zero::is_zero)
    }

    /// Order of an element, `None` when it has infinite order.
    pub fn element_order(&self, a: &GroupElement) -> Option<BigInt> {
        let a = self.reduce(a);
        let mut ord = BigInt::one();
        for (x, m) in a.0.iter().zip(&self.moduli) {
            if x.is_zero() {
                continue;
            }
            if m.is_zero() {
                return None;
            }
            ord = ord.lcm(&(m / x.gcd(m)));
        }
        Some(ord)
    }

    /// The relation lattice `diag(moduli)` as a square matrix.
    pub fn relation_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.moduli)
    }

    /// `⊕` of two groups, coordinates concatenated.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut moduli = self.moduli.clone();
        moduli.extend_from_slice(&other.moduli);
        Self { moduli }
    }

    /// Whether `x` lies in the subgroup generated by `gens`; returns the
    /// coefficients of one expression when it does.
    pub fn express_in(&self, gens: &[GroupElement], x: &GroupElement) -> Option<Vec<BigInt>> {
        let n = self.dim();
        let g = IntMatrix::from_columns(n, &gens.iter().map(|e| e.0.clone()).collect::<Vec<_>>());
        let m = g.hconcat(&self.relation_matrix());
        let sol = solve_integer(&m, &x.0)?;
        Some(sol[..gens.len()].to_vec())
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .moduli
            .iter()
            .filter(|m| !m.is_one())
            .map(|m| {
                if m.is_zero() {
                    "Z".to_string()
                } else {
                    format!("Z/{m}")
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Integers as JSON numbers when they fit in `i64`, as decimal strings otherwise.
pub(crate) fn serialize_ints<S: Serializer>(
    v: &[BigInt],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        match x.to_i64() {
            Some(i) => seq.serialize_element(&i)?,
            None => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

pub(crate) fn serialize_int<S: Serializer>(
    x: &BigInt,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(i) => s.serialize_i64(i),
        None => s.serialize_str(&x.to_string()),
    }
}

pub(crate) fn reduce_coords(moduli: &[BigInt], v: &[BigInt]) -> Vec<BigInt> {
    v.iter()
        .zip(moduli)
        .map(|(x, m)| {
            if m.is_zero() {
                x.clone()
            } else {
                x.mod_floor(m)
            }
        })
        .collect()
}

/// A homomorphism given by an integer matrix on coordinates
/// (`target.dim() × source.dim()`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    pub source: AbelianGroup,
    pub target: AbelianGroup,
    pub matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(source: AbelianGroup, target: AbelianGroup, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::Group(format!(
                "hom matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.dim(),
                source.dim()
            )));
        }
        let h = Self {
            source,
            target,
            matrix,
        };
        if !h.is_well_defined() {
            return Err(Error::Group(
                "matrix does not respect the source relations".into(),
            ));
        }
        Ok(h)
    }

    pub fn identity(group: &AbelianGroup) -> Self {
        Self {
            source: group.clone(),
            target: group.clone(),
            matrix: IntMatrix::identity(group.dim()),
        }
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        self.target.reduce(&GroupElement(self.matrix.mul_vec(&x.0)))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupHom) -> GroupHom {
        assert_eq!(self.target, other.source, "composition of mismatched homs");
        GroupHom {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: &other.matrix * &self.matrix,
        }
    }

    /// Each source relation `m_j e_j` must land in the target relation lattice.
    pub fn is_well_defined(&self) -> bool {
        self.source.moduli.iter().enumerate().all(|(j, m)| {
            m.is_zero() || {
                let col: Vec<BigInt> = self.matrix.column(j).iter().map(|x| x * m).collect();
                self.target.is_zero_element(&GroupElement(col))
            }
        })
    }

    /// Generators of the kernel, in source coordinates.
    pub fn kernel_generators(&self) -> Vec<GroupElement> {
        let n = self.source.dim();
        let stacked = self.matrix.hconcat(&self.target.relation_matrix());
        let k = integer_kernel(&stacked);
        (0..k.cols())
            .map(|j| GroupElement(k.column(j)[..n].to_vec()))
            .map(|e| self.source.reduce(&e))
            .filter(|e| !self.source.is_zero_element(e))
            .collect()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_generators().is_empty()
    }

    pub fn is_surjective(&self) -> bool {
        let gens: Vec<GroupElement> = (0..self.source.dim())
            .map(|j| self.apply(&self.source.generator(j)))
            .collect();
        (0..self.target.dim()).all(|i| {
            self.target
                .express_in(&gens, &self.target.generator(i))
                .is_some()
        })
    }
}

/// `Hom(A, k^*)`: a torus times a product of roots of unity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalizableGroupDescriptor {
    pub torus_rank: usize,
    #[serde(serialize_with = "serialize_ints")]
    pub roots_of_unity: Vec<BigInt>,
}

impl DiagonalizableGroupDescriptor {
    pub fn is_trivial(&self) -> bool {
        self.torus_rank == 0 && self.roots_of_unity.is_empty()
    }
}

impl fmt::Display for DiagonalizableGroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        if self.torus_rank > 0 {
            parts.push(format!("Gm^{}", self.torus_rank));
        }
        parts.extend(self.roots_of_unity.iter().map(|r| format!("mu_{r}")));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

pub fn dual_group(a: &AbelianGroup) -> DiagonalizableGroupDescriptor {
    let canon = if a.is_invariant_form() {
        a.clone()
    } else {
        a.canonical().group
    };
    DiagonalizableGroupDescriptor {
        torus_rank: canon.free_rank(),
        roots_of_unity: canon.torsion(),
    }
}

/// `A / ⟨gens⟩` in invariant-factor form.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: AbelianGroup,
    /// `A → A/⟨gens⟩`.
    pub projection: GroupHom,
    /// Preimages of the quotient's coordinate generators, as columns in `A` coordinates.
    pub section: IntMatrix,
}

impl Quotient {
    pub fn lift(&self, x: &GroupElement) -> GroupElement {
        GroupElement(self.section.mul_vec(&x.0))
    }
}

pub fn quotient(a: &AbelianGroup, gens: &[GroupElement]) -> Quotient {
    let n = a.dim();
    let g = IntMatrix::from_columns(n, &gens.iter().map(|e| e.0.clone()).collect::<Vec<_>>());
    let m = a.relation_matrix().hconcat(&g);
    let snf = smith_normal_form(&m);
    let diag = snf.diagonal();
    // m has at least n columns, so the diagonal has length n
    let keep: Vec<usize> = (0..n).filter(|&i| !diag[i].is_one()).collect();
    let group = AbelianGroup {
        moduli: keep.iter().map(|&i| diag[i].clone()).collect(),
    };
    let mut proj = snf.u.select_rows(&keep);
    for (r, m) in group.moduli.iter().enumerate() {
        if !m.is_zero() {
            for c in 0..proj.cols() {
                let v = proj[(r, c)].mod_floor(m);
                proj[(r, c)] = v;
            }
        }
    }
    let section = snf.u_inv.select_columns(&keep);
    Quotient {
        projection: GroupHom {
            source: a.clone(),
            target: group.clone(),
            matrix: proj,
        },
        group,
        section,
    }
}

/// `Z^rows / (column span of m)`, with the projection from `Z^rows`.
pub fn cokernel(m: &IntMatrix) -> (AbelianGroup, GroupHom) {
    let ambient = AbelianGroup::free(m.rows());
    let gens: Vec<GroupElement> = (0..m.cols()).map(|j| GroupElement(m.column(j))).collect();
    let q = quotient(&ambient, &gens);
    (q.group, q.projection)
}

/// The subgroup generated by `gens`, in invariant-factor form, with its inclusion.
pub fn subgroup(a: &AbelianGroup, gens: &[GroupElement]) -> (AbelianGroup, GroupHom) {
    let n = a.dim();
    let k = gens.len();
    let g = IntMatrix::from_columns(n, &gens.iter().map(|e| e.0.clone()).collect::<Vec<_>>());
    // relations among the generators: kernel of Z^k → A
    let ker = integer_kernel(&g.hconcat(&a.relation_matrix()));
    let rel_cols: Vec<Vec<BigInt>> = (0..ker.cols())
        .map(|j| ker.column(j)[..k].to_vec())
        .collect();
    let free_k = AbelianGroup::free(k);
    let rels: Vec<GroupElement> = rel_cols.into_iter().map(GroupElement).collect();
    let q = quotient(&free_k, &rels);
    let incl_matrix = reduce_matrix_rows(&(&g * &q.section), &a.moduli);
    let incl = GroupHom {
        source: q.group.clone(),
        target: a.clone(),
        matrix: incl_matrix,
    };
    (q.group, incl)
}

fn reduce_matrix_rows(m: &IntMatrix, moduli: &[BigInt]) -> IntMatrix {
    let mut out = m.clone();
    for (i, md) in moduli.iter().enumerate() {
        if md.is_zero() {
            continue;
        }
        for j in 0..out.cols() {
            let v = out[(i, j)].mod_floor(md);
            out[(i, j)] = v;
        }
    }
    out
}

/// Result of adjoining an `r`-th root of `d` to `A`.
#[derive(Clone, Debug)]
pub struct PushoutRoot {
    /// `A' = (A ⊕ Z) / ⟨(d, −r)⟩`.
    pub group: AbelianGroup,
    /// The inclusion `A → A'`.
    pub iota: GroupHom,
    /// Class of `(0, 1)`: the tautological class, with `r·t = ι(d)`.
    pub tautological: GroupElement,
}

pub fn pushout_root(a: &AbelianGroup, d: &GroupElement, r: &BigInt) -> Result<PushoutRoot> {
    a.check_element(d)?;
    if !r.is_positive() {
        return Err(Error::NonPositiveOrder(r.clone()));
    }
    let n = a.dim();
    let ext = a.direct_sum(&AbelianGroup::free(1));
    let mut rel = d.0.clone();
    rel.push(-r);
    let q = quotient(&ext, &[GroupElement(rel)]);
    let iota_cols: Vec<usize> = (0..n).collect();
    let iota = GroupHom {
        source: a.clone(),
        target: q.group.clone(),
        matrix: q.projection.matrix.select_columns(&iota_cols),
    };
    let tautological = q.projection.apply(&ext.generator(n));
    Ok(PushoutRoot {
        group: q.group,
        iota,
        tautological,
    })
}

/// Output of [`subgroup_cokernel`].
#[derive(Clone, Debug)]
pub struct SubgroupCokernel {
    pub sub: AbelianGroup,
    pub inclusion: GroupHom,
    pub cokernel: AbelianGroup,
    pub projection: GroupHom,
    /// One lift in `A` per coordinate generator of the cokernel.
    pub lifts: Vec<GroupElement>,
}

/// Boxes larger than this fall back to the SNF section for lifts.
const LIFT_SEARCH_LIMIT: u64 = 200_000;

pub fn subgroup_cokernel(a: &AbelianGroup, gens: &[GroupElement]) -> Result<SubgroupCokernel> {
    for g in gens {
        a.check_element(g)?;
    }
    let (sub, inclusion) = subgroup(a, gens);
    let q = quotient(a, gens);
    let lifts = (0..q.group.dim())
        .map(|i| {
            let target = q.group.generator(i);
            lex_min_lift(a, &q, &target).unwrap_or_else(|| a.reduce(&q.lift(&target)))
        })
        .collect();
    Ok(SubgroupCokernel {
        sub,
        inclusion,
        cokernel: q.group,
        projection: q.projection,
        lifts,
    })
}

/// Lexicographically least lift with nonnegative coordinates, each below
/// the coordinate modulus (torsion) or the exponent of a finite cokernel (free).
fn lex_min_lift(a: &AbelianGroup, q: &Quotient, target: &GroupElement) -> Option<GroupElement> {
    let exponent = q.group.order().map(|_| {
        q.group
            .moduli
            .iter()
            .fold(BigInt::one(), |acc, m| acc.lcm(m))
    })?;
    let bounds: Vec<u64> = a
        .moduli
        .iter()
        .map(|m| {
            if m.is_zero() {
                exponent.clone()
            } else {
                m.clone()
            }
        })
        .map(|b| b.to_u64())
        .collect::<Option<_>>()?;
    let total = bounds
        .iter()
        .try_fold(1u64, |acc, &b| acc.checked_mul(b.max(1)))?;
    if total > LIFT_SEARCH_LIMIT {
        return None;
    }
    let mut cur = vec![0u64; bounds.len()];
    loop {
        let e = GroupElement(cur.iter().map(|&c| BigInt::from(c)).collect());
        if q.projection.apply(&e) == *target {
            return Some(e);
        }
        // odometer: last coordinate fastest
        let mut i = cur.len();
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < bounds[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}
