//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! nonzero status if any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use mdstack::abelian::{smith_normal_form, AbelianGroup, GroupElement, IntMatrix};
use mdstack::gradedring::{smoothness, Polynomial, SingularityVerdict};
use mdstack::stack::{
    ambient_toric, divisor_root, effective_degree_subgroup, graded_fingerprint, is_toric,
    line_bundle_root, reconstruct, rigidify, root_order_product, simplify, validate, Equivalence,
    StackData, Verdict,
};
use mdstack::toric::{fan_to_stack, root_along_ray};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn mdstack(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mdstack"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn corpus_path(name: &str) -> String {
    corpus_dir()
        .join(format!("{name}.mds"))
        .to_string_lossy()
        .into_owned()
}

fn dicyclic() -> Outcome {
    let x = corpus_stack("dicyclic-n2");
    let d = validate(&x);
    let get = |c: &str| d.iter().find(|x| x.check == c).map(|x| x.verdict);
    ensure!(
        get("homogeneity") == Some(Verdict::Pass),
        "homogeneity {:?}",
        get("homogeneity")
    );
    ensure!(
        get("smoothness") == Some(Verdict::Fail),
        "smoothness {:?}",
        get("smoothness")
    );
    let s = smoothness(&x.cox);
    ensure!(
        s.verdict == SingularityVerdict::Singular,
        "verdict {:?}",
        s.verdict
    );
    let uvw = vec!["u".to_string(), "v".into(), "w".into()];
    ensure!(
        s.uncovered == vec![uvw.clone()],
        "uncovered strata {:?}",
        s.uncovered
    );
    ensure!(
        x.cox.irrelevant == vec![Polynomial::one()],
        "J_irr is not (1)"
    );
    ensure!(!is_toric(&x), "reported toric");
    ensure!(
        x.grading().canonical().group == AbelianGroup::from_moduli(&[2, 2]).unwrap(),
        "grading {}",
        x.grading()
    );

    let path = corpus_path("dicyclic-n2");
    let (code, out) = mdstack(&["validate", &path]);
    ensure!(code == 1, "validate exit code {code}");
    ensure!(
        out.contains("grading: Z/2 + Z/2"),
        "validate output:\n{out}"
    );
    ensure!(out.contains("homogeneity: pass"), "validate output:\n{out}");
    ensure!(
        out.contains("smoothness: fail") && out.contains("{u=0, v=0, w=0}"),
        "validate output:\n{out}"
    );
    let (code, out) = mdstack(&["is-toric", &path]);
    ensure!(
        code == 1 && out.trim() == "false",
        "is-toric gave {code} {out:?}"
    );
    Ok("stratum {u=v=w=0} uncovered, grading Z/2 + Z/2, not toric".into())
}

fn b_mu_r() -> Outcome {
    for r in [2, 5] {
        let x = line_bundle_root(&StackData::point(), &GroupElement(vec![]), &int(r))
            .map_err(|e| e.to_string())?;
        ensure!(
            x.grading().canonical().group == AbelianGroup::from_moduli(&[r]).unwrap(),
            "grading {}",
            x.grading()
        );
        let f = rigidify(&x).map_err(|e| e.to_string())?;
        ensure!(
            f.rigidified.grading().is_trivial(),
            "rigidified grading {}",
            f.rigidified.grading()
        );
        ensure!(
            f.rigidified.cox.variables.is_empty(),
            "rigidified has variables"
        );
        ensure!(
            same(&f.rigidified, &StackData::point()),
            "rigidified is not the point"
        );
        ensure!(
            f.roots.len() == 1 && f.roots[0].1 == int(r),
            "roots {:?}",
            f.roots
        );
        ensure!(
            f.roots[0].0 .0.iter().all(|c| c.is_zero()),
            "root degree {}",
            f.roots[0].0
        );
        let back = reconstruct(&f).map_err(|e| e.to_string())?;
        ensure!(same(&back, &x), "round trip differs for r = {r}");
        let corpus = corpus_stack(&format!("bmu{r}"));
        ensure!(same(&corpus, &x), "corpus bmu{r} differs");
    }
    Ok("r = 2, 5".into())
}

fn root_of_p1() -> Outcome {
    let p1 = corpus_stack("p1");
    let s = p1.cox.parse_polynomial("x1").unwrap();
    let root = divisor_root(&p1, &s, &int(3)).map_err(|e| e.to_string())?;
    let t = root
        .provenance
        .last()
        .ok_or("no provenance")?
        .tautological_class
        .clone();
    let o1 = root.cox.variables[root.cox.var_index("x0").unwrap()]
        .degree
        .clone();
    ensure!(
        root.grading().scale(&int(3), &t) == o1,
        "3t = {} but O(1) = {o1}",
        root.grading().scale(&int(3), &t)
    );
    let y = simplify(&root);
    ensure!(
        y.cox.relations.is_empty() && y.cox.variables.len() == 2,
        "not a polynomial ring on 2 variables"
    );
    ensure!(
        *y.grading() == AbelianGroup::free(1),
        "grading {}",
        y.grading()
    );
    let mut d: Vec<i64> = y
        .degrees()
        .iter()
        .map(|g| g.0[0].to_i64().unwrap())
        .collect();
    d.sort();
    ensure!(d == vec![1, 3], "degrees {d:?}");
    ensure!(is_toric(&y) && is_toric(&root), "not toric");
    ensure!(
        same(&root, &corpus_stack("p1-root3")),
        "differs from corpus p1-root3"
    );
    Ok("degrees {3, 1}, 3t = O(1)".into())
}

/// Checks the Cox data of a fan against determinantal divisors of the ray
/// matrix and against the expected grading and degrees.
fn check_fan(
    name: &str,
    expected_moduli: &[i64],
    expected: &[&[i64]],
) -> std::result::Result<(), String> {
    let fan = corpus_fan(name);
    let x = fan_to_stack(&fan).map_err(|e| e.to_string())?;
    let n = fan.rays.len();
    let b: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            fan.rays[i]
                .iter()
                .map(|c| (c * &fan.multiplicities[i]).to_i128().unwrap())
                .collect()
        })
        .collect();
    let oracle = cokernel_invariants(&b, n);
    let ours = group_invariants(x.grading().moduli());
    ensure!(
        ours == oracle,
        "{name}: grading invariants {ours:?}, oracle {oracle:?}"
    );
    let expected_moduli: Vec<BigInt> = expected_moduli.iter().map(|&m| int(m)).collect();
    ensure!(
        group_invariants(&expected_moduli) == oracle,
        "{name}: expected grading disagrees with oracle"
    );

    // A family of degrees presents coker(B) exactly when every column of B is
    // a relation among them and they generate the group.
    let presents = |moduli: &[BigInt], degs: &[GroupElement]| -> bool {
        let g = AbelianGroup::new(moduli.to_vec()).unwrap();
        let relations = (0..fan.dim).all(|j| {
            let sum = (0..n).fold(g.zero(), |acc, i| {
                g.add(&acc, &g.scale(&BigInt::from(b[i][j]), &degs[i]))
            });
            g.is_zero_element(&sum)
        });
        relations && quotient_order(moduli, degs) == Some(1)
    };
    ensure!(
        presents(x.grading().moduli(), &x.degrees()),
        "{name}: computed degrees do not present the cokernel"
    );
    let expected: Vec<GroupElement> = expected.iter().map(|d| GroupElement::from_i64(d)).collect();
    ensure!(
        presents(&expected_moduli, &expected),
        "{name}: expected degrees do not present the cokernel"
    );
    let exp = mdstack::stack::StackData::new(
        "expected",
        mdstack::gradedring::CoxPresentation {
            grading: AbelianGroup::new(expected_moduli).unwrap(),
            variables: x
                .cox
                .variables
                .iter()
                .zip(expected)
                .map(|(v, degree)| mdstack::gradedring::Variable {
                    name: v.name.clone(),
                    degree,
                })
                .collect(),
            relations: vec![],
            irrelevant: x.cox.irrelevant.clone(),
        },
    )
    .map_err(|e| e.to_string())?;
    ensure!(
        same(&x, &exp),
        "{name}: not equivalent to the expected Cox data"
    );
    Ok(())
}

fn toric_cox() -> Outcome {
    check_fan("p2-fan", &[0], &[&[1], &[1], &[1]])?;
    check_fan("p1xp1-fan", &[0, 0], &[&[1, 0], &[1, 0], &[0, 1], &[0, 1]])?;
    check_fan("p121-fan", &[0], &[&[1], &[2], &[1]])?;
    check_fan("a2mu2-fan", &[2], &[&[1], &[1]])?;
    Ok("P2, P1xP1, P(1,2,1), A2/mu2".into())
}

fn fan_root_commutation() -> Outcome {
    let mut rng = rng(0x5eed_0005);
    let mut checks = 0;
    for k in 0..100 {
        let fan = random_fan(&mut rng);
        let base = fan_to_stack(&fan).map_err(|e| format!("fan {k}: {e}"))?;
        for i in 0..fan.rays.len() {
            for r in 1..=4 {
                let r = int(r);
                let lhs = fan_to_stack(&root_along_ray(&fan, i, &r).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                let rhs =
                    divisor_root(&base, &Polynomial::var(i), &r).map_err(|e| e.to_string())?;
                let c = graded_fingerprint(&lhs).compare(&graded_fingerprint(&rhs));
                ensure!(
                    c == Equivalence::Equal,
                    "fan {k} {fan:?}, ray {i}, r = {r}: {c:?}"
                );
                checks += 1;
            }
        }
    }
    Ok(format!("100 fans, {checks} comparisons"))
}

fn tower_collapse() -> Outcome {
    let mut checks = 0;
    for (name, x) in corpus_stacks() {
        // Eliminate the stack's own simple roots first so that only the tower's
        // relations are left to collapse.
        let x = simplify(&x);
        if x.cox.variables.len() < 2 {
            continue;
        }
        // s = x_0 x_1 is homogeneous and never eliminable against a root.
        let s = &Polynomial::var(0) * &Polynomial::var(1);
        for r1 in 1..=4i64 {
            for r2 in 1..=4i64 {
                let a = divisor_root(&x, &s, &int(r1)).map_err(|e| e.to_string())?;
                let z1 = a.cox.variables.len() - 1;
                let a =
                    divisor_root(&a, &Polynomial::var(z1), &int(r2)).map_err(|e| e.to_string())?;
                let z2 = a.cox.variables.len() - 1;
                let names = (a.cox.names()[z1].clone(), a.cox.names()[z2].clone());
                let y = a.cox.eliminate_simple_roots();
                let base_rels = &x.cox.relations;
                let extra: Vec<&Polynomial> = y
                    .relations
                    .iter()
                    .filter(|p| !base_rels.contains(p))
                    .collect();
                if r1 * r2 == 1 {
                    ensure!(extra.is_empty(), "{name}: r1 = r2 = 1 leaves {extra:?}");
                } else {
                    ensure!(
                        y.var_index(&names.0).is_none(),
                        "{name}: {} survives",
                        names.0
                    );
                    let expected = y
                        .parse_polynomial(&format!("{}^{} - {}", names.1, r1 * r2, y.show(&s)))
                        .unwrap();
                    ensure!(
                        extra.len() == 1 && extra[0].monic() == expected.monic(),
                        "{name}, r1 = {r1}, r2 = {r2}: relations {:?}",
                        extra.iter().map(|p| y.show(p)).collect::<Vec<_>>()
                    );
                }
                let b = divisor_root(&x, &s, &int(r1 * r2)).map_err(|e| e.to_string())?;
                ensure!(
                    same(&a, &b),
                    "{name}, r1 = {r1}, r2 = {r2}: fingerprints differ"
                );
                checks += 1;
            }
        }
    }
    ensure!(checks > 0, "no corpus stack with two variables");
    Ok(format!("{checks} towers"))
}

fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut out = IntMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            out[(i, j)] = (0..a.cols()).map(|k| &a[(i, k)] * &b[(k, j)]).sum();
        }
    }
    out
}

fn random_unimodular(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let c = BigInt::from(rng.gen_range(-3..=3));
        for k in 0..n {
            let add = &c * &m[(j, k)];
            m[(i, k)] += add;
        }
    }
    m
}

fn snf_suite() -> Outcome {
    let mut rng = rng(0x5eed_0007);
    for k in 0..120 {
        let (rows, cols) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let data = (0..rows * cols)
            .map(|_| BigInt::from(rng.gen_range(-20..=20)))
            .collect();
        let m = IntMatrix::new(rows, cols, data);
        let f = smith_normal_form(&m);
        ensure!(mul(&mul(&f.u, &m), &f.v) == f.s, "matrix {k}: U M V != S");
        ensure!(
            f.u.is_unimodular() && f.v.is_unimodular(),
            "matrix {k}: U or V not unimodular"
        );
        ensure!(
            mul(&f.u, &f.u_inv) == IntMatrix::identity(rows),
            "matrix {k}: U_inv is not the inverse"
        );
        for i in 0..rows {
            for j in 0..cols {
                ensure!(
                    i == j || f.s[(i, j)].is_zero(),
                    "matrix {k}: S not diagonal"
                );
            }
        }
        let d = f.diagonal();
        ensure!(
            d.iter().all(|x| !x.is_negative()),
            "matrix {k}: negative factor"
        );
        for w in d.windows(2) {
            let ok = if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (&w[1] % &w[0]).is_zero()
            };
            ensure!(ok, "matrix {k}: divisibility fails in {d:?}");
        }
        let plain: Vec<Vec<i128>> = (0..rows).map(|i| small(&m.row(i))).collect();
        let mut prefix = BigInt::one();
        for (i, di) in d.iter().enumerate() {
            prefix *= di;
            let oracle = determinantal_divisor(&plain, i + 1);
            ensure!(
                prefix == BigInt::from(oracle),
                "matrix {k}: d_{} = {prefix}, minors give {oracle}",
                i + 1
            );
        }
        let p = random_unimodular(&mut rng, rows);
        let q = random_unimodular(&mut rng, cols);
        let g = smith_normal_form(&mul(&mul(&p, &m), &q));
        ensure!(
            g.diagonal() == d,
            "matrix {k}: factors change under unimodular transforms"
        );
    }
    Ok("120 matrices".into())
}

fn rigidify_round_trip() -> Outcome {
    let mut rng = rng(0x5eed_0008);
    let mut stacks = corpus_stacks();
    for i in 0..50 {
        stacks.push((format!("random {i}"), random_polynomial_stack(&mut rng)));
    }
    let mut checked = 0;
    for (name, x) in &stacks {
        let eff = effective_degree_subgroup(x);
        let index = quotient_order(x.grading().moduli(), &x.degrees());
        let f = match rigidify(x) {
            Ok(f) => f,
            Err(e) => {
                ensure!(
                    index.is_none(),
                    "{name}: rigidify failed with finite stabilizer: {e}"
                );
                continue;
            }
        };
        ensure!(
            !eff.stabilizer.is_trivial() || f.roots.is_empty(),
            "{name}: roots without stabilizer"
        );
        let back = reconstruct(&f).map_err(|e| format!("{name}: {e}"))?;
        ensure!(
            same(&back, x),
            "{name}: reconstruct(rigidify(X)) differs from X"
        );
        let index = index.ok_or(format!(
            "{name}: rigidify succeeded with infinite stabilizer"
        ))?;
        ensure!(
            root_order_product(&f) == BigInt::from(index),
            "{name}: product of orders {} != {index}",
            root_order_product(&f)
        );
        let r = effective_degree_subgroup(&f.rigidified);
        ensure!(
            r.stabilizer.is_trivial(),
            "{name}: rigidified stack still has a generic stabilizer"
        );
        checked += 1;
    }
    Ok(format!("{checked} stacks"))
}

fn ambient() -> Outcome {
    let q = corpus_stack("quadric");
    let (amb, warning) = ambient_toric(&q);
    ensure!(warning.is_none(), "unexpected warning {warning:?}");
    ensure!(
        amb.cox.relations.is_empty() && is_toric(&amb),
        "ambient is not toric"
    );
    ensure!(
        amb.grading() == q.grading() && amb.degrees() == q.degrees(),
        "grading or degrees changed"
    );
    ensure!(amb.cox.irrelevant == q.cox.irrelevant, "J_irr changed");
    let p3 = StackData::weighted_projective(&[1, 1, 1, 1]);
    ensure!(same(&amb, &p3), "ambient is not P3");
    let (_, warning) = ambient_toric(&corpus_stack("dicyclic-n2"));
    ensure!(
        warning.as_deref().is_some_and(|w| w.contains("torsion")),
        "no torsion warning"
    );

    let (code, out) = mdstack(&["ambient", &corpus_path("quadric")]);
    ensure!(
        code == 0 && !out.contains("rel "),
        "ambient quadric: {code}\n{out}"
    );
    let out = Command::new(env!("CARGO_BIN_EXE_mdstack"))
        .args(["ambient", &corpus_path("dicyclic-n2")])
        .output()
        .unwrap();
    ensure!(
        String::from_utf8_lossy(&out.stderr).contains("torsion"),
        "CLI omits the torsion warning"
    );
    Ok("quadric embeds in P3; dicyclic warns".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "AC1 dicyclic counterexample",
            dicyclic,
            Duration::from_secs(1),
        ),
        (
            "AC2 B mu_r rigidify/reconstruct",
            b_mu_r,
            Duration::from_secs(1),
        ),
        ("AC3 root stack of P1", root_of_p1, Duration::from_secs(1)),
        (
            "AC4 toric Cox construction",
            toric_cox,
            Duration::from_secs(1),
        ),
        (
            "AC5 fan/root commutation",
            fan_root_commutation,
            Duration::from_secs(30),
        ),
        ("AC6 tower collapse", tower_collapse, Duration::from_secs(5)),
        (
            "AC7 Smith normal form properties",
            snf_suite,
            Duration::from_secs(10),
        ),
        (
            "AC8 rigidify round trip",
            rigidify_round_trip,
            Duration::from_secs(10),
        ),
        ("AC9 ambient embedding", ambient, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed <= limit => Ok(msg),
            Ok(msg) => Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}")),
            Err(e) => Err(e),
        };
        match outcome {
            Ok(msg) => println!("PASS {name} ({elapsed:.2?}): {msg}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name} ({elapsed:.2?}): {e}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
