//! Metric specifications and their pointwise jet evaluation.
//!
//! A [`MetricSpec`] is the user-facing description of a Lorentzian metric:
//! a chart (4 coordinate names), the 10 independent component expressions
//! g_ij (i <= j), named parameters with defaults, and an optional domain
//! guard expression (the point is valid iff guard > 0).
//!
//! [`MetricSpec::metric_jet`] evaluates everything needed downstream at one
//! point: g, its inverse, and the exact first and second derivatives dg,
//! d2g coming straight from the component jets. Validation enforces symmetry
//! (structural), nondegeneracy and signature (1,3) -- exactly one positive
//! eigenvalue.

use crate::error::{Error, Result};
use crate::expr::{self, eval_jet2, eval_value, Expr, Jet2};
use nalgebra::Matrix4;
use std::collections::BTreeMap;

pub type Params = BTreeMap<String, f64>;

/// 4x4 component matrix.
pub type Mat4 = [[f64; 4]; 4];

/// Packed index for symmetric component storage, i <= j.
#[inline]
pub(crate) fn sym_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * 4 + j - i * (i + 1) / 2
}

/// Declarative metric: chart, components, parameters, optional guard.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    pub name: String,
    pub chart: [String; 4],
    /// Component expressions in packed (i <= j) order; missing entries are 0.
    components: [Expr; 10],
    pub params: Params,
    pub domain_guard: Option<Expr>,
}

impl MetricSpec {
    /// New metric with all components zero (to be filled via
    /// [`set_component`](Self::set_component)).
    pub fn new(name: &str, chart: [&str; 4], params: &[(&str, f64)]) -> MetricSpec {
        MetricSpec {
            name: name.to_string(),
            chart: chart.map(|c| c.to_string()),
            components: std::array::from_fn(|_| Expr::Num(0.0)),
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            domain_guard: None,
        }
    }

    fn chart_refs(&self) -> [&str; 4] {
        std::array::from_fn(|i| self.chart[i].as_str())
    }

    fn param_names(&self) -> Vec<&str> {
        self.params.keys().map(|k| k.as_str()).collect()
    }

    /// Parse `src` against this metric's chart and parameter names.
    pub fn parse_expr(&self, src: &str) -> Result<Expr> {
        expr::parse(src, &self.chart_refs(), &self.param_names())
    }

    /// Set g_ij (symmetric slot) from source text.
    pub fn set_component(&mut self, i: usize, j: usize, src: &str) -> Result<()> {
        let e = self.parse_expr(src)?;
        self.components[sym_index(i, j)] = e;
        Ok(())
    }

    pub fn set_component_expr(&mut self, i: usize, j: usize, e: Expr) {
        self.components[sym_index(i, j)] = e;
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[sym_index(i, j)]
    }

    pub fn set_guard(&mut self, src: &str) -> Result<()> {
        self.domain_guard = Some(self.parse_expr(src)?);
        Ok(())
    }

    /// Coordinate index by name.
    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.chart.iter().position(|c| c == name)
    }

    /// Defaults overlaid with `overrides`; rejects overrides that don't name
    /// a declared parameter (catches typos before they silently no-op).
    pub fn resolve_params(&self, overrides: &Params) -> Result<Params> {
        let mut out = self.params.clone();
        for (k, v) in overrides {
            if !out.contains_key(k) {
                return Err(Error::UnknownSymbol(k.clone()));
            }
            out.insert(k.clone(), *v);
        }
        Ok(out)
    }

    /// The conformally rescaled metric sigma * g, sharing chart and params.
    /// The factor must be an expression over the same chart/params.
    pub fn conformally_scaled(&self, sigma: &Expr) -> MetricSpec {
        let mut out = self.clone();
        out.name = format!("{}*{}", sigma, self.name);
        for slot in out.components.iter_mut() {
            // keep structural zeros zero; scaling them only adds noise
            if !matches!(slot, Expr::Num(v) if *v == 0.0) {
                *slot = Expr::product(sigma.clone(), slot.clone());
            }
        }
        out
    }

    /// True iff the domain guard (when present) is positive at the point.
    pub fn guard_ok(&self, point: &[f64; 4], params: &Params) -> bool {
        match &self.domain_guard {
            None => true,
            Some(g) => matches!(eval_value(g, point, params), Ok(v) if v > 0.0),
        }
    }

    /// Evaluate metric + exact derivatives at a point, with validation.
    /// `params` must be fully resolved (see [`resolve_params`](Self::resolve_params)).
    pub fn metric_jet(&self, point: &[f64; 4], params: &Params) -> Result<MetricJet> {
        if let Some(guard) = &self.domain_guard {
            let v = eval_value(guard, point, params).map_err(|e| self.invalid(point, &e.to_string()))?;
            if v <= 0.0 {
                return Err(self.invalid(point, &format!("domain guard `{}` = {:e} is not positive", guard, v)));
            }
        }

        let mut jets: [Jet2; 10] = [Jet2::constant(0.0); 10];
        for i in 0..4 {
            for j in i..4 {
                let e = &self.components[sym_index(i, j)];
                jets[sym_index(i, j)] =
                    eval_jet2(e, point, params).map_err(|e| self.invalid(point, &e.to_string()))?;
            }
        }

        let mut g = [[0.0; 4]; 4];
        let mut dg = [[[0.0; 4]; 4]; 4];
        let mut d2g = [[[[0.0; 4]; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let jet = &jets[sym_index(i, j)];
                g[i][j] = jet.val;
                for k in 0..4 {
                    dg[k][i][j] = jet.grad[k];
                    for l in 0..4 {
                        d2g[k][l][i][j] = jet.hess(k, l);
                    }
                }
            }
        }

        let scale = g
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return Err(self.invalid(point, "all metric components vanish"));
        }

        let gm = Matrix4::from_fn(|i, j| g[i][j]);
        // Scale-normalized determinant: |det(g/s)| stays O(1) for healthy
        // metrics regardless of units.
        let det = gm.determinant();
        if (det / scale.powi(4)).abs() <= 1e-12 {
            return Err(self.invalid(
                point,
                &format!("degenerate: |det g| = {:e} at scale {:e}", det.abs(), scale),
            ));
        }

        let eig = nalgebra::SymmetricEigen::new(gm);
        let positive = eig.eigenvalues.iter().filter(|&&l| l > 0.0).count();
        if positive != 1 {
            return Err(self.invalid(
                point,
                &format!(
                    "signature is ({},{}), expected (1,3)",
                    positive,
                    4 - positive
                ),
            ));
        }

        let inv = gm
            .try_inverse()
            .ok_or_else(|| self.invalid(point, "metric not invertible"))?;
        let residual = (gm * inv - Matrix4::identity())
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let inv_scale = inv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual > 1e-12 * (1.0 + scale * inv_scale) {
            return Err(self.invalid(
                point,
                &format!("inverse check failed: |g*g^-1 - id| = {:e}", residual),
            ));
        }
        let mut g_inv = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g_inv[i][j] = inv[(i, j)];
            }
        }

        Ok(MetricJet {
            point: *point,
            g,
            g_inv,
            dg,
            d2g,
            scale,
        })
    }

    fn invalid(&self, point: &[f64; 4], msg: &str) -> Error {
        Error::MetricInvalid {
            name: self.name.clone(),
            point: *point,
            msg: msg.to_string(),
        }
    }
}

/// Metric data at one point: components, inverse and exact derivatives.
///
/// Index conventions: `dg[k][i][j]` = d_k g_ij, `d2g[k][l][i][j]` =
/// d_k d_l g_ij (symmetric in k,l and in i,j).
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub point: [f64; 4],
    pub g: Mat4,
    pub g_inv: Mat4,
    pub dg: [Mat4; 4],
    pub d2g: [[Mat4; 4]; 4],
    /// max |g_ij|, the natural scale for relative tolerances.
    pub scale: f64,
}

impl MetricJet {
    /// g(u, v) for coordinate-component vectors.
    pub fn inner(&self, u: &[f64; 4], v: &[f64; 4]) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += self.g[i][j] * u[i] * v[j];
            }
        }
        s
    }

    /// Raise an index: (g^-1 N)_i.
    pub fn raise(&self, n: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += self.g_inv[i][j] * n[j];
            }
        }
        out
    }
}
