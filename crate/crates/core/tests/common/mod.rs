//! Shared helpers for the integration tests: corpus loading, small exact
//! oracles on plain integers, and seeded random generators.
#![allow(dead_code)]

use std::path::PathBuf;

use mdstack::abelian::{AbelianGroup, GroupElement};
use mdstack::gradedring::{CoxPresentation, Polynomial, Variable};
use mdstack::io::{build, build_fan, parse_document, Document};
use mdstack::stack::{graded_fingerprint, Equivalence, StackData, Verdict};
use mdstack::toric::{validate_fan, StackyFan};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "mds"))
        .collect();
    v.sort();
    v
}

pub fn document(name: &str) -> Document {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{name}.mds"))).unwrap();
    parse_document(&text).unwrap()
}

pub fn corpus_stack(name: &str) -> StackData {
    build(&document(name)).unwrap()
}

pub fn corpus_fan(name: &str) -> StackyFan {
    build_fan(&document(name)).unwrap()
}

/// Every corpus entry with a `[stack]` section.
pub fn corpus_stacks() -> Vec<(String, StackData)> {
    corpus_files()
        .into_iter()
        .filter_map(|p| {
            let doc = parse_document(&std::fs::read_to_string(&p).unwrap()).unwrap();
            doc.stack.as_ref()?;
            Some((
                p.file_stem().unwrap().to_string_lossy().into_owned(),
                build(&doc).unwrap(),
            ))
        })
        .collect()
}

pub fn same(a: &StackData, b: &StackData) -> bool {
    graded_fingerprint(a).compare(&graded_fingerprint(b)) == Equivalence::Equal
}

pub fn int(i: i64) -> BigInt {
    BigInt::from(i)
}

pub fn small(v: &[BigInt]) -> Vec<i128> {
    v.iter().map(|x| x.to_i128().unwrap()).collect()
}

/// Determinant by cofactor expansion; only for small matrices.
pub fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// gcd of all k×k minors.
pub fn determinantal_divisor(m: &[Vec<i128>], k: usize) -> i128 {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut g = 0;
    for r in subsets(rows, k) {
        for c in subsets(cols, k) {
            let minor: Vec<Vec<i128>> = r
                .iter()
                .map(|&i| c.iter().map(|&j| m[i][j]).collect())
                .collect();
            g = gcd(g, det(&minor));
            if g == 1 {
                return 1;
            }
        }
    }
    g
}

/// Invariant factors greater than one and free rank of `Z^rows / (column span of m)`.
pub fn cokernel_invariants(m: &[Vec<i128>], rows: usize) -> (Vec<i128>, usize) {
    let mut factors = vec![];
    let mut prev = 1;
    let mut rank = 0;
    for k in 1..=rows.min(m.first().map_or(0, |r| r.len())) {
        let d = determinantal_divisor(m, k);
        if d == 0 {
            break;
        }
        factors.push(d / prev);
        prev = d;
        rank = k;
    }
    factors.retain(|&f| f != 1);
    (factors, rows - rank)
}

/// `(torsion, free rank)` of the group with the given moduli, via determinantal divisors.
pub fn group_invariants(moduli: &[BigInt]) -> (Vec<i128>, usize) {
    let n = moduli.len();
    let m: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        moduli[i].to_i128().unwrap()
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    cokernel_invariants(&m, n)
}

/// Relation matrix for `A / ⟨gens⟩`, with `A` given by moduli: the columns
/// are the generators followed by the moduli.
pub fn quotient_matrix(moduli: &[BigInt], gens: &[GroupElement]) -> Vec<Vec<i128>> {
    let n = moduli.len();
    (0..n)
        .map(|i| {
            let mut row: Vec<i128> = gens.iter().map(|g| g.0[i].to_i128().unwrap()).collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    moduli[i].to_i128().unwrap()
                } else {
                    0
                }
            }));
            row
        })
        .collect()
}

/// Order of `A / ⟨gens⟩`, or `None` if infinite.
pub fn quotient_order(moduli: &[BigInt], gens: &[GroupElement]) -> Option<i128> {
    let (t, free) = cokernel_invariants(&quotient_matrix(moduli, gens), moduli.len());
    (free == 0).then(|| t.iter().product())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed)
}

fn primitive(v: &[i64]) -> bool {
    v.iter().fold(0i128, |g, &x| gcd(g, x as i128)) == 1
}

/// A random simplicial stacky fan with `dim ≤ 3` and at most six rays, every
/// ray lying in some cone.
pub fn random_fan(rng: &mut ChaCha8Rng) -> StackyFan {
    loop {
        let dim = rng.gen_range(1..=3usize);
        let target = if dim == 1 {
            rng.gen_range(1..=2)
        } else {
            rng.gen_range(dim..=6)
        };
        let mut rays: Vec<Vec<i64>> = vec![];
        let mut tries = 0;
        while rays.len() < target && tries < 200 {
            tries += 1;
            let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-2..=2)).collect();
            if primitive(&v) && !rays.contains(&v) {
                rays.push(v);
            }
        }
        let n = rays.len();
        let mut candidates: Vec<Vec<usize>> =
            (1..=dim.min(n)).flat_map(|k| subsets(n, k)).collect();
        candidates.shuffle(rng);
        candidates.sort_by_key(|c| std::cmp::Reverse(c.len()));
        let mult: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let ray_refs: Vec<&[i64]> = rays.iter().map(|r| r.as_slice()).collect();
        let mut cones: Vec<Vec<usize>> = vec![];
        for c in candidates {
            if cones.iter().any(|d| c.iter().all(|i| d.contains(i))) {
                continue;
            }
            let mut trial = cones.clone();
            trial.push(c);
            let refs: Vec<&[usize]> = trial.iter().map(|c| c.as_slice()).collect();
            let fan = StackyFan::from_i64(dim, &ray_refs, &refs).with_multiplicities(&mult);
            if validate_fan(&fan)
                .iter()
                .all(|d| d.verdict == Verdict::Pass)
            {
                cones = trial;
            }
        }
        let used: Vec<usize> = (0..n)
            .filter(|i| cones.iter().any(|c| c.contains(i)))
            .collect();
        if used.is_empty() {
            continue;
        }
        let rays: Vec<&[i64]> = used.iter().map(|&i| rays[i].as_slice()).collect();
        let mult: Vec<i64> = used.iter().map(|&i| mult[i]).collect();
        let cones: Vec<Vec<usize>> = cones
            .iter()
            .map(|c| {
                c.iter()
                    .map(|i| used.iter().position(|u| u == i).unwrap())
                    .collect()
            })
            .collect();
        let refs: Vec<&[usize]> = cones.iter().map(|c| c.as_slice()).collect();
        return StackyFan::from_i64(dim, &rays, &refs).with_multiplicities(&mult);
    }
}

/// A random polynomial stack whose degrees generate a finite-index subgroup
/// of its grading; the irrelevant ideal is generated by the variables.
pub fn random_polynomial_stack(rng: &mut ChaCha8Rng) -> StackData {
    loop {
        let free = rng.gen_range(0..=2usize);
        let torsion = rng.gen_range(0..=2usize);
        let mut moduli: Vec<i64> = (0..torsion).map(|_| rng.gen_range(2..=6)).collect();
        moduli.extend(std::iter::repeat_n(0, free));
        let moduli: Vec<BigInt> = moduli.into_iter().map(BigInt::from).collect();
        let n = rng.gen_range(1..=4usize);
        let degrees: Vec<GroupElement> = (0..n)
            .map(|_| {
                GroupElement(
                    moduli
                        .iter()
                        .map(|m| {
                            if *m == int(0) {
                                int(rng.gen_range(1..=4))
                            } else {
                                int(rng.gen_range(0..m.to_i64().unwrap()))
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        if quotient_order(&moduli, &degrees).is_none() {
            continue;
        }
        let vars: Vec<Variable> = degrees
            .into_iter()
            .enumerate()
            .map(|(i, degree)| Variable {
                name: format!("x{i}"),
                degree,
            })
            .collect();
        let irr = (0..n).map(Polynomial::var).collect();
        let cox =
            CoxPresentation::new(AbelianGroup::new(moduli).unwrap(), vars, vec![], irr).unwrap();
        return StackData::new("random", cox).unwrap();
    }
}
