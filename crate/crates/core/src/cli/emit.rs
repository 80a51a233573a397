//! Deterministic text and JSON artifacts.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ncalg::{AlgebraSpec, NCPoly};
use crate::qcoeff::LaurentScalar;
use crate::repr::{self, DMatrix};
use crate::sigma::{self, Mat4};
use crate::spinor::{EpsilonTensor, Mat2};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    DMatrix,
    Eta,
    Sigma,
    BarSigma,
}

impl Kind {
    pub fn parse(s: &str) -> Result<Kind> {
        match s {
            "dmatrix" => Ok(Kind::DMatrix),
            "eta" => Ok(Kind::Eta),
            "sigma" => Ok(Kind::Sigma),
            "barsigma" => Ok(Kind::BarSigma),
            other => Err(Error::InvalidSpec(format!("unknown artifact `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmitOptions {
    /// Doubled spin for `dmatrix`.
    pub j2: Option<i64>,
    /// Numeric specialization point.
    pub q: Option<f64>,
    pub format: Format,
    /// For `eta`: the trace contraction instead of the tabulated metric.
    pub derived: bool,
}

/// Parses `"3/2"`, `"1"`, `"0.5"` into a doubled spin.
pub fn parse_j(s: &str) -> Result<i64> {
    let bad = || Error::OutOfRange(format!("invalid spin `{s}`"));
    let j2 = if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        match d.trim() {
            "2" => n,
            "1" => 2 * n,
            _ => return Err(bad()),
        }
    } else if let Ok(n) = s.parse::<i64>() {
        2 * n
    } else {
        let x: f64 = s.parse().map_err(|_| bad())?;
        let d = 2.0 * x;
        if d.fract() != 0.0 {
            return Err(bad());
        }
        d as i64
    };
    if !(0..=repr::MAX_J2).contains(&j2) {
        return Err(Error::OutOfRange(format!("spin {s} outside 0 ..= {}", repr::MAX_J2 as f64 / 2.0)));
    }
    Ok(j2)
}

pub fn parse_q(s: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(q) if q.is_finite() && q > 0.0 => Ok(q),
        _ => Err(Error::Specialize(format!("q must be a positive finite number, got `{s}`"))),
    }
}

/// 15 significant digits, shortest form.
pub fn fmt_real(x: f64) -> String {
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        "0".to_string()
    } else {
        format!("{rounded}")
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    let (re, im) = (fmt_real(z.re), fmt_real(z.im));
    match (re.as_str(), im.as_str()) {
        (_, "0") => re,
        ("0", _) => format!("{im}*i"),
        _ => {
            if let Some(mag) = im.strip_prefix('-') {
                format!("({re} - {mag}*i)")
            } else {
                format!("({re} + {im}*i)")
            }
        }
    }
}

fn complex_json(z: Complex64) -> Value {
    let r = |x: f64| -> f64 { fmt_real(x).parse().unwrap_or(0.0) };
    json!([r(z.re), r(z.im)])
}

fn scalar_text(x: &LaurentScalar, q: Option<f64>) -> Result<String> {
    match q {
        Some(q) => Ok(fmt_complex(x.specialize(q)?)),
        None => Ok(x.to_string()),
    }
}

fn scalar_json(x: &LaurentScalar, q: Option<f64>) -> Result<Value> {
    match q {
        Some(q) => Ok(complex_json(x.specialize(q)?)),
        None => Ok(x.to_json()),
    }
}

fn poly_text(spec: &AlgebraSpec, p: &NCPoly, q: Option<f64>) -> Result<String> {
    let Some(q) = q else { return Ok(spec.render(p)) };
    let mut parts = Vec::new();
    for (w, c) in p.terms() {
        let text = fmt_complex(c.specialize(q)?);
        if text == "0" {
            continue;
        }
        let names: Vec<&str> = w.0.iter().map(|&g| spec.generator_name(g)).collect();
        parts.push(match (names.is_empty(), text.as_str()) {
            (true, _) => text,
            (false, "1") => names.join("*"),
            (false, _) => format!("{text}*{}", names.join("*")),
        });
    }
    Ok(if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
}

fn poly_json(spec: &AlgebraSpec, p: &NCPoly, q: Option<f64>) -> Result<Value> {
    let Some(q) = q else { return Ok(spec.to_json(p)) };
    let mut out = Vec::new();
    for (w, c) in p.terms() {
        let names: Vec<&str> = w.0.iter().map(|&g| spec.generator_name(g)).collect();
        out.push(json!({ "word": names, "coeff": complex_json(c.specialize(q)?) }));
    }
    Ok(Value::Array(out))
}

fn rows_of<T>(n: usize, m: usize, f: impl Fn(usize, usize) -> Result<T>) -> Result<Vec<Vec<T>>> {
    (0..n).map(|r| (0..m).map(|c| f(r, c)).collect()).collect()
}

fn json_grid(rows: Vec<Vec<Value>>) -> Value {
    Value::Array(rows.into_iter().map(Value::Array).collect())
}

fn grid_text(rows: Vec<Vec<String>>) -> String {
    let width = rows.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
        let _ = writeln!(out, "[ {} ]", cells.join("  "));
    }
    out
}

fn pretty(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("serializable"))
}

fn mat4_artifact(name: &str, m: &Mat4, opts: &EmitOptions) -> Result<String> {
    Ok(match opts.format {
        Format::Text => format!("{name}\n{}", grid_text(rows_of(4, 4, |r, c| scalar_text(&m[r][c], opts.q))?)),
        Format::Json => {
            let entries = json_grid(rows_of(4, 4, |r, c| scalar_json(&m[r][c], opts.q))?);
            pretty(&json!({ "kind": name, "q": opts.q, "entries": entries }))
        }
    })
}

fn mat2_set_artifact(name: &str, set: &[Mat2; 4], opts: &EmitOptions) -> Result<String> {
    Ok(match opts.format {
        Format::Text => {
            let mut out = String::new();
            for (k, m) in set.iter().enumerate() {
                let rows = rows_of(2, 2, |r, c| scalar_text(&m[r][c], opts.q))?;
                let _ = write!(out, "{name}^{k}\n{}", grid_text(rows));
            }
            out
        }
        Format::Json => {
            let mats = set
                .iter()
                .map(|m| Ok(json_grid(rows_of(2, 2, |r, c| scalar_json(&m[r][c], opts.q))?)))
                .collect::<Result<Vec<_>>>()?;
            pretty(&json!({ "kind": name, "q": opts.q, "matrices": mats }))
        }
    })
}

fn dmatrix_artifact(d: &DMatrix, opts: &EmitOptions) -> Result<String> {
    let spec: &Arc<AlgebraSpec> = d.entries.spec();
    let n = d.dim();
    Ok(match opts.format {
        Format::Text => {
            let rows = rows_of(n, n, |r, c| poly_text(spec, d.entries.get(r, c), opts.q))?;
            let norms = d.norm_sq.iter().map(|x| scalar_text(x, opts.q)).collect::<Result<Vec<_>>>()?;
            format!(
                "D(j = {}), basis m = j .. -j, unnormalized\n{}norm_sq: [{}]\n",
                repr::j_label(d.j2),
                grid_text(rows),
                norms.join(", ")
            )
        }
        Format::Json => {
            let mut v = d.to_json();
            if opts.q.is_some() {
                v["entries"] = json_grid(rows_of(n, n, |r, c| poly_json(spec, d.entries.get(r, c), opts.q))?);
                v["norm_sq"] = Value::Array(d.norm_sq.iter().map(|x| scalar_json(x, opts.q)).collect::<Result<_>>()?);
                v["q"] = json!(opts.q);
            }
            pretty(&v)
        }
    })
}

pub fn emit(kind: Kind, opts: &EmitOptions) -> Result<String> {
    match kind {
        Kind::DMatrix => {
            let j2 = opts
                .j2
                .ok_or_else(|| Error::OutOfRange("dmatrix needs --j".into()))?;
            dmatrix_artifact(&repr::derive_dmatrix(j2)?, opts)
        }
        Kind::Eta => {
            let m = if opts.derived {
                sigma::compute_bar_sigma(&EpsilonTensor::contravariant()).contraction()
            } else {
                sigma::printed_eta()
            };
            mat4_artifact("eta", &m, opts)
        }
        Kind::Sigma => mat2_set_artifact("sigma", &sigma::pauli(), opts),
        Kind::BarSigma => {
            let set = sigma::compute_bar_sigma(&EpsilonTensor::contravariant());
            mat2_set_artifact("barsigma", &set.bar_sigma, opts)
        }
    }
}
