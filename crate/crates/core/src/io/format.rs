//! Writing stacks, fans and factorizations back out, as `.mds` text or JSON.

use std::fmt::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::abelian::{AbelianGroup, GroupElement};
use crate::stack::{Diagnostic, GerbeFactorization, RootKind, StackData, Verdict};
use crate::toric::StackyFan;

/// Version of the JSON report layout.
pub const SCHEMA: u32 = 1;

fn tuple(e: &GroupElement) -> String {
    e.to_string()
}

fn grading_line(g: &AbelianGroup) -> String {
    format!(
        "[{}]",
        g.moduli()
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    )
}

pub fn stack_to_text(x: &StackData) -> String {
    let mut out = String::from("[stack]\n");
    let _ = writeln!(out, "name = \"{}\"", x.name.replace('"', "'"));
    let _ = writeln!(out, "grading = {}", grading_line(x.grading()));
    for r in &x.provenance {
        let _ = match &r.kind {
            RootKind::DivisorRoot { section, order } => {
                writeln!(
                    out,
                    "# root of order {order} of the divisor {section}; tautological class {}",
                    r.tautological_class
                )
            }
            RootKind::LineBundleRoot { degree, order } => {
                writeln!(
                    out,
                    "# root of order {order} of O{degree}; tautological class {}",
                    r.tautological_class
                )
            }
        };
    }
    for v in &x.cox.variables {
        let _ = writeln!(out, "var {} : {}", v.name, tuple(&v.degree));
    }
    for p in &x.cox.relations {
        let _ = writeln!(out, "rel {}", x.cox.show(p));
    }
    for p in &x.cox.irrelevant {
        let _ = writeln!(out, "irr {}", x.cox.show(p));
    }
    out
}

pub fn factorization_to_text(f: &GerbeFactorization) -> String {
    let mut out = stack_to_text(&f.rigidified);
    out.push_str("\n[roots]\n");
    for (l, r) in &f.roots {
        let _ = writeln!(out, "root {} order {r}", tuple(l));
    }
    out
}

pub fn fan_to_text(fan: &StackyFan) -> String {
    let mut out = String::from("[fan]\n");
    let _ = writeln!(out, "dim = {}", fan.dim);
    for ((name, ray), m) in fan.names.iter().zip(&fan.rays).zip(&fan.multiplicities) {
        let coords = ray
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "ray {name} = ({coords}) mult {m}");
    }
    for c in &fan.max_cones {
        let names = c
            .iter()
            .map(|&i| fan.names[i].as_str())
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "cone ({names})");
    }
    out
}

fn ints(v: &[num_bigint::BigInt]) -> Value {
    serde_json::to_value(GroupElement(v.to_vec())).expect("integers serialize")
}

pub fn stack_to_json(x: &StackData) -> Value {
    json!({
        "name": x.name,
        "grading": ints(x.grading().moduli()),
        "group": x.grading().canonical().group.to_string(),
        "variables": x.cox.variables.iter().map(|v| json!({"name": v.name, "degree": ints(&v.degree.0)})).collect::<Vec<_>>(),
        "relations": x.cox.relations.iter().map(|p| x.cox.show(p)).collect::<Vec<_>>(),
        "irrelevant": x.cox.irrelevant.iter().map(|p| x.cox.show(p)).collect::<Vec<_>>(),
        "provenance": x.provenance,
    })
}

pub fn factorization_to_json(f: &GerbeFactorization) -> Value {
    json!({
        "rigidified": stack_to_json(&f.rigidified),
        "roots": f.roots.iter().map(|(l, r)| json!({"degree": ints(&l.0), "order": ints(std::slice::from_ref(r))[0]})).collect::<Vec<_>>(),
    })
}

pub fn fan_to_json(fan: &StackyFan) -> Value {
    json!({
        "dim": fan.dim,
        "rays": fan.names.iter().zip(&fan.rays).zip(&fan.multiplicities).map(|((n, r), m)| {
            json!({"name": n, "vector": ints(r), "mult": ints(std::slice::from_ref(m))[0]})
        }).collect::<Vec<_>>(),
        "cones": fan.max_cones.iter().map(|c| c.iter().map(|&i| fan.names[i].clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

/// Machine-readable record of one command.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub version: &'static str,
    pub command: String,
    pub inputs: Vec<String>,
    pub verdict: Verdict,
    pub diagnostics: Vec<Diagnostic>,
    pub output: Value,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: Vec<String>) -> Self {
        Self {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            inputs,
            verdict: Verdict::Pass,
            diagnostics: vec![],
            output: Value::Null,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
