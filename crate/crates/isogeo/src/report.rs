//! Deterministic output: a small JSON value type with a byte-stable
//! renderer, emitters for the library's result structs, and the CSV
//! trajectory format.
//!
//! The renderer is hand-rolled so that output is reproducible across
//! runs and platforms: object keys keep insertion order, every float is
//! printed as `{:.16e}` (17 significant digits, which round-trips f64
//! exactly), and non-finite floats become `null`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geodesic::{Congruence, Trajectory};
use crate::lightlike::SurfaceDiag;
use crate::petrov::{Classification, PrincipalDirection};
use crate::petrov::roots::{ClusteredRoot, ProjRoot};

type C = Complex<f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    /// Render with two-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => out.push_str(&i.to_string()),
            Json::Num(v) => {
                if v.is_finite() {
                    out.push_str(&format!("{v:.16e}"));
                } else {
                    out.push_str("null");
                }
            }
            Json::Str(s) => write_escaped(out, s),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                // Arrays of scalars stay on one line; anything nested breaks.
                let flat = items
                    .iter()
                    .all(|i| !matches!(i, Json::Arr(_) | Json::Obj(_)));
                if flat {
                    out.push('[');
                    for (k, item) in items.iter().enumerate() {
                        if k > 0 {
                            out.push_str(", ");
                        }
                        item.write(out, depth);
                    }
                    out.push(']');
                } else {
                    out.push('[');
                    for (k, item) in items.iter().enumerate() {
                        if k > 0 {
                            out.push(',');
                        }
                        out.push('\n');
                        indent(out, depth + 1);
                        item.write(out, depth + 1);
                    }
                    out.push('\n');
                    indent(out, depth);
                    out.push(']');
                }
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (k, (key, val)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    indent(out, depth + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    val.write(out, depth + 1);
                }
                out.push('\n');
                indent(out, depth);
                out.push('}');
            }
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

pub fn vec4(x: &[f64; 4]) -> Json {
    Json::Arr(x.iter().map(|&v| Json::Num(v)).collect())
}

pub fn complex(z: C) -> Json {
    Json::Obj(vec![
        ("re".into(), Json::Num(z.re)),
        ("im".into(), Json::Num(z.im)),
    ])
}

pub fn root_json(r: &ProjRoot) -> Json {
    match r {
        ProjRoot::Finite(z) => Json::Obj(vec![
            ("kind".into(), Json::str("finite")),
            ("re".into(), Json::Num(z.re)),
            ("im".into(), Json::Num(z.im)),
        ]),
        ProjRoot::Infinity => Json::Obj(vec![("kind".into(), Json::str("infinity"))]),
    }
}

fn cluster_json(c: &ClusteredRoot) -> Json {
    Json::Obj(vec![
        ("root".into(), root_json(&c.root)),
        ("multiplicity".into(), Json::Int(c.multiplicity as i64)),
    ])
}

fn direction_json(d: &PrincipalDirection) -> Json {
    Json::Obj(vec![
        ("direction".into(), vec4(&d.direction)),
        ("multiplicity".into(), Json::Int(d.multiplicity as i64)),
        ("root".into(), root_json(&d.root)),
    ])
}

pub fn classification_json(c: &Classification) -> Json {
    let opt_str = |s: &Option<String>| match s {
        Some(v) => Json::str(v.clone()),
        None => Json::Null,
    };
    Json::Obj(vec![
        ("point".into(), vec4(&c.point)),
        ("type".into(), Json::str(c.petrov_type.to_string())),
        ("weyl_max".into(), Json::Num(c.weyl_max)),
        ("curvature_scale".into(), Json::Num(c.curvature_scale)),
        (
            "scalars".into(),
            Json::Arr(c.scalars.a.iter().map(|&z| complex(z)).collect()),
        ),
        (
            "quartic".into(),
            Json::Arr(c.quartic.iter().map(|&z| complex(z)).collect()),
        ),
        (
            "roots".into(),
            Json::Arr(c.roots.iter().map(cluster_json).collect()),
        ),
        (
            "principal_directions".into(),
            Json::Arr(c.principal_directions.iter().map(direction_json).collect()),
        ),
        ("ambiguity".into(), opt_str(&c.ambiguity)),
        (
            "tetrad".into(),
            Json::Arr(
                c.tetrad
                    .e
                    .iter()
                    .map(|row| Json::Arr(row.iter().map(|&z| complex(z)).collect()))
                    .collect(),
            ),
        ),
    ])
}

pub fn surface_json(d: &SurfaceDiag) -> Json {
    Json::Obj(vec![
        ("point".into(), vec4(&d.point)),
        ("level".into(), Json::Num(d.level)),
        ("lightlike".into(), Json::Bool(d.lightlike)),
        ("normal".into(), vec4(&d.normal)),
        ("normal_norm".into(), Json::Num(d.normal_norm)),
        ("normal_scale".into(), Json::Num(d.normal_scale)),
        ("generator".into(), vec4(&d.generator)),
        ("induced_rank".into(), Json::Int(d.induced_rank as i64)),
        (
            "induced_singular_values".into(),
            Json::Arr(
                d.induced_singular_values
                    .iter()
                    .map(|&v| Json::Num(v))
                    .collect(),
            ),
        ),
        ("kernel_alignment".into(), Json::Num(d.kernel_alignment)),
        (
            "pregeodesic_residual".into(),
            Json::Num(d.pregeodesic_residual),
        ),
        ("kappa".into(), Json::Num(d.kappa)),
    ])
}

pub fn trajectory_json(t: &Trajectory, null_norms: &[f64]) -> Result<Json> {
    if null_norms.len() != t.samples.len() {
        return Err(Error::Report(format!(
            "{} samples but {} null norms",
            t.samples.len(),
            null_norms.len()
        )));
    }
    let samples = t
        .samples
        .iter()
        .zip(null_norms)
        .map(|(smp, &nn)| {
            Json::Obj(vec![
                ("s".into(), Json::Num(smp.s)),
                ("x".into(), vec4(&smp.x)),
                ("xi".into(), vec4(&smp.xi)),
                ("nullnorm".into(), Json::Num(nn)),
            ])
        })
        .collect();
    Ok(Json::Obj(vec![
        ("termination".into(), Json::str(t.termination.to_string())),
        ("samples".into(), Json::Arr(samples)),
    ]))
}

pub fn congruence_json(c: &Congruence) -> Json {
    let samples = c
        .samples
        .iter()
        .map(|smp| {
            Json::Obj(vec![
                ("s".into(), Json::Num(smp.s)),
                ("x".into(), vec4(&smp.x)),
                ("xi".into(), vec4(&smp.xi)),
                ("root".into(), root_json(&smp.root)),
                ("type".into(), Json::str(smp.petrov_type.to_string())),
            ])
        })
        .collect();
    Json::Obj(vec![
        ("termination".into(), Json::str(c.termination.to_string())),
        ("samples".into(), Json::Arr(samples)),
    ])
}

/// CSV header used by [`trajectory_csv`]. Column order is stable.
pub const TRAJECTORY_CSV_HEADER: &str = "s,x0,x1,x2,x3,xi0,xi1,xi2,xi3,nullnorm";

pub fn trajectory_csv(t: &Trajectory, null_norms: &[f64]) -> Result<String> {
    if null_norms.len() != t.samples.len() {
        return Err(Error::Report(format!(
            "{} samples but {} null norms",
            t.samples.len(),
            null_norms.len()
        )));
    }
    let mut out = String::from(TRAJECTORY_CSV_HEADER);
    out.push('\n');
    for (smp, &nn) in t.samples.iter().zip(null_norms) {
        out.push_str(&format!("{:.16e}", smp.s));
        for v in smp.x.iter().chain(smp.xi.iter()) {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push_str(&format!(",{nn:.16e}\n"));
    }
    Ok(out)
}
