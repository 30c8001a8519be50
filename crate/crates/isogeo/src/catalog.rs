//! Text catalog of metric specifications.
//!
//! The format is line oriented and documented at the top of the built-in
//! catalog (also printed by the CLI's `catalog` subcommand): `metric NAME`
//! ... `end` blocks containing `chart`, `param`, `guard` and `g I J`
//! lines. Errors carry 1-based line numbers.

use crate::error::{Error, Result};
use crate::metric::MetricSpec;

/// Source text of the metrics shipped with the crate.
pub const BUILTIN: &str = include_str!("catalog_builtin.txt");

#[derive(Debug, Clone)]
pub struct Catalog {
    metrics: Vec<MetricSpec>,
}

impl Catalog {
    /// The built-in catalog. Parsing it is covered by tests, so this
    /// cannot fail at runtime.
    pub fn builtin() -> Catalog {
        Catalog::parse(BUILTIN).expect("built-in catalog parses")
    }

    pub fn parse(src: &str) -> Result<Catalog> {
        // an open block: (starting line, metric name, body lines with numbers)
        type Block = (usize, String, Vec<(usize, String)>);
        let mut metrics: Vec<MetricSpec> = Vec::new();
        let mut block: Option<Block> = None;

        for (idx, raw) in src.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }

            if let Some(name) = line.strip_prefix("metric ") {
                if block.is_some() {
                    return Err(err(line_no, "`metric` inside an unterminated block"));
                }
                let name = name.trim();
                if name.is_empty() {
                    return Err(err(line_no, "metric needs a name"));
                }
                if metrics.iter().any(|m| m.name == name) {
                    return Err(err(line_no, &format!("duplicate metric `{name}`")));
                }
                block = Some((line_no, name.to_string(), Vec::new()));
            } else if line == "end" {
                let (start, name, lines) = block
                    .take()
                    .ok_or_else(|| err(line_no, "`end` without a matching `metric`"))?;
                metrics.push(build(start, &name, &lines)?);
            } else {
                match block {
                    Some((_, _, ref mut lines)) => lines.push((line_no, line.to_string())),
                    None => {
                        return Err(err(
                            line_no,
                            "directive outside a `metric ... end` block",
                        ))
                    }
                }
            }
        }
        if let Some((start, name, _)) = block {
            return Err(err(start, &format!("metric `{name}` is never closed by `end`")));
        }
        Ok(Catalog { metrics })
    }

    pub fn get(&self, name: &str) -> Option<&MetricSpec> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.metrics.iter().map(|m| m.name.as_str()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MetricSpec> {
        self.metrics.iter()
    }

    /// Overlay `other` on top of self; same-named metrics are replaced.
    pub fn merge(mut self, other: Catalog) -> Catalog {
        for m in other.metrics {
            if let Some(slot) = self.metrics.iter_mut().find(|x| x.name == m.name) {
                *slot = m;
            } else {
                self.metrics.push(m);
            }
        }
        self
    }
}

fn err(line: usize, msg: &str) -> Error {
    Error::Catalog {
        line,
        msg: msg.to_string(),
    }
}

/// Assemble one metric from its block lines: chart and params establish
/// the symbol table, then guard/components parse against it.
fn build(start: usize, name: &str, lines: &[(usize, String)]) -> Result<MetricSpec> {
    let mut chart: Option<[String; 4]> = None;
    let mut params: Vec<(String, f64)> = Vec::new();

    for (no, line) in lines {
        if let Some(rest) = line.strip_prefix("chart ") {
            let names: Vec<&str> = rest.split_whitespace().collect();
            if names.len() != 4 {
                return Err(err(*no, &format!("chart needs 4 names, got {}", names.len())));
            }
            if chart.is_some() {
                return Err(err(*no, "chart given twice"));
            }
            let mut arr: [String; 4] = Default::default();
            for (i, n) in names.iter().enumerate() {
                arr[i] = n.to_string();
            }
            if (1..4).any(|i| arr[..i].contains(&arr[i])) {
                return Err(err(*no, "chart names must be distinct"));
            }
            chart = Some(arr);
        } else if let Some(rest) = line.strip_prefix("param ") {
            let mut it = rest.split_whitespace();
            let pname = it
                .next()
                .ok_or_else(|| err(*no, "param needs a name and a value"))?;
            let pval = it
                .next()
                .ok_or_else(|| err(*no, "param needs a default value"))?;
            if it.next().is_some() {
                return Err(err(*no, "param takes exactly one value"));
            }
            let v: f64 = pval
                .parse()
                .map_err(|_| err(*no, &format!("cannot read `{pval}` as a number")))?;
            if params.iter().any(|(n, _)| n == pname) {
                return Err(err(*no, &format!("parameter `{pname}` declared twice")));
            }
            params.push((pname.to_string(), v));
        }
    }

    let chart = chart.ok_or_else(|| err(start, &format!("metric `{name}` has no chart line")))?;
    let chart_refs: [&str; 4] = std::array::from_fn(|i| chart[i].as_str());
    let param_refs: Vec<(&str, f64)> = params.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    let mut spec = MetricSpec::new(name, chart_refs, &param_refs);

    let mut any_component = false;
    for (no, line) in lines {
        if line.starts_with("chart ") || line.starts_with("param ") {
            continue;
        }
        if let Some(rest) = line.strip_prefix("guard ") {
            spec.set_guard(rest.trim())
                .map_err(|e| err(*no, &e.to_string()))?;
        } else if let Some(rest) = line.strip_prefix("g ") {
            let rest = rest.trim_start();
            let (i, rest) = take_index(rest).ok_or_else(|| {
                err(*no, "component line must look like `g I J EXPR` with I, J in 0..4")
            })?;
            let (j, expr_src) = take_index(rest)
                .ok_or_else(|| err(*no, "component line is missing its second index"))?;
            if expr_src.trim().is_empty() {
                return Err(err(*no, "component line has no expression"));
            }
            spec.set_component(i, j, expr_src.trim())
                .map_err(|e| err(*no, &e.to_string()))?;
            any_component = true;
        } else {
            return Err(err(*no, &format!("unrecognized directive `{line}`")));
        }
    }
    if !any_component {
        return Err(err(start, &format!("metric `{name}` has no components")));
    }
    Ok(spec)
}

/// Split one leading index 0..=3 off a component line.
fn take_index(s: &str) -> Option<(usize, &str)> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    let (_, c) = chars.next()?;
    let idx = c.to_digit(10)? as usize;
    if idx > 3 {
        return None;
    }
    let rest = &s[c.len_utf8()..];
    // index must be its own token
    if rest.chars().next().is_some_and(|c| !c.is_whitespace()) {
        return None;
    }
    Some((idx, rest))
}
