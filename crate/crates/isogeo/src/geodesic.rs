//! Geodesic integration and the diagnostics built on top of it:
//! conformal-invariance residuals for lightlike trajectories and the
//! integration of principal-direction fields.
//!
//! The integrator is a hand-rolled adaptive Dormand-Prince RK4(5) on the
//! first-order system dx/ds = xi, dxi/ds = -Gamma(xi, xi), i.e. geodesics
//! in the affine gauge. Leaving the metric's domain is not an error: a
//! failing right-hand side makes the stepper halve its step until it pins
//! the boundary, then reports [`Termination::DomainExit`] with everything
//! accepted so far.

use crate::curvature::christoffel;
use crate::error::{Error, Result};
use crate::expr::{eval_jet2, Expr};
use crate::metric::{MetricSpec, Params};
use crate::petrov::{self, roots::chordal, ClassifySettings, PetrovType, ProjRoot};

/// Integration controls. Tolerances are per-component: a step is accepted
/// when the embedded 4th/5th order difference stays below
/// `atol + rtol * |y|`.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial trial step (sign follows the integration direction).
    pub h_init: f64,
    /// Below this step size the run stops instead of grinding.
    pub h_min: f64,
    /// Cap on the step size. Error control alone can take steps large
    /// enough to starve downstream cubic interpolation of sample density;
    /// cap it when the trajectory feeds a curve comparison.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: f64::INFINITY,
            max_steps: 200_000,
        }
    }
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Reached the requested affine parameter.
    ParameterEnd,
    /// The metric stopped being evaluable (guard or math domain); the
    /// trajectory ends just inside the boundary.
    DomainExit,
    /// Error control pushed the step below `h_min` with the metric still
    /// healthy; results near the end are suspect.
    StepUnderflow,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Termination::ParameterEnd => "parameter-end",
            Termination::DomainExit => "domain-exit",
            Termination::StepUnderflow => "step-underflow",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub s: f64,
    pub x: [f64; 4],
    pub xi: [f64; 4],
}

/// An integrated geodesic: accepted steps in order, plus why it stopped.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn start(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn end(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the start")
    }

    /// Affine parameter span actually covered.
    pub fn affine_length(&self) -> f64 {
        (self.end().s - self.start().s).abs()
    }

    /// g(xi, xi) at every sample -- the invariant that must stay pinned at
    /// zero along a lightlike geodesic.
    pub fn null_norms(&self, spec: &MetricSpec, params: &Params) -> Result<Vec<f64>> {
        self.samples
            .iter()
            .map(|smp| {
                let jet = spec.metric_jet(&smp.x, params)?;
                Ok(jet.inner(&smp.xi, &smp.xi))
            })
            .collect()
    }
}

// Dormand-Prince coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;

/// Right-hand side of a first-order system; an error means "left the
/// evaluable domain" and is handled by step halving, not propagated.
pub(crate) type Rhs<'a, const N: usize> = dyn FnMut(f64, &[f64; N]) -> Result<[f64; N]> + 'a;

/// Called with every accepted (s, y, y') including the initial state.
pub(crate) type Recorder<'a, const N: usize> = dyn FnMut(f64, &[f64; N], &[f64; N]) + 'a;

/// Adaptive RK4(5) over a fixed-size state.
pub(crate) fn dopri45<const N: usize>(
    f: &mut Rhs<'_, N>,
    s0: f64,
    s_end: f64,
    y0: [f64; N],
    opts: &GeodesicOptions,
    record: &mut Recorder<'_, N>,
) -> Result<Termination> {
    let dir = if s_end >= s0 { 1.0 } else { -1.0 };
    let span = (s_end - s0).abs();
    if span == 0.0 {
        let k = f(s0, &y0)?;
        record(s0, &y0, &k);
        return Ok(Termination::ParameterEnd);
    }

    let mut s = s0;
    let mut y = y0;
    // the very first evaluation must succeed; a bad start is a real error
    let mut k1 = f(s, &y)?;
    record(s, &y, &k1);

    let mut h = opts.h_init.abs().min(span).min(opts.h_max) * dir;
    let mut steps = 0usize;

    let lin = |y: &[f64; N], parts: &[(f64, &[f64; N])], h: f64| -> [f64; N] {
        let mut out = *y;
        for (c, k) in parts {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
        out
    };

    loop {
        if steps >= opts.max_steps {
            return Err(Error::Geodesic(format!(
                "step budget ({}) exhausted at s = {s}",
                opts.max_steps
            )));
        }
        steps += 1;

        // clamp the final step onto the endpoint
        if (s + h - s_end) * dir > 0.0 {
            h = s_end - s;
        }

        let stages = (|| -> Result<([f64; N], [f64; N], [f64; N])> {
            let k2 = f(s + C2 * h, &lin(&y, &[(A21, &k1)], h))?;
            let k3 = f(s + C3 * h, &lin(&y, &[(A31, &k1), (A32, &k2)], h))?;
            let k4 = f(s + C4 * h, &lin(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h))?;
            let k5 = f(
                s + C5 * h,
                &lin(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
            )?;
            let k6 = f(
                s + h,
                &lin(
                    &y,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    h,
                ),
            )?;
            let y5 = lin(
                &y,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                h,
            );
            let k7 = f(s + h, &y5)?;
            let y4 = lin(
                &y,
                &[
                    (E1, &k1),
                    (E3, &k3),
                    (E4, &k4),
                    (E5, &k5),
                    (E6, &k6),
                    (E7, &k7),
                ],
                h,
            );
            Ok((y5, y4, k7))
        })();

        let (y5, y4, k7) = match stages {
            Ok(t) => t,
            Err(_) => {
                // domain boundary somewhere inside this step
                h *= 0.5;
                if h.abs() < opts.h_min {
                    return Ok(Termination::DomainExit);
                }
                continue;
            }
        };

        let mut err: f64 = 0.0;
        for i in 0..N {
            let tol = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err = err.max(((y5[i] - y4[i]) / tol).abs());
        }

        if err <= 1.0 {
            s += h;
            y = y5;
            k1 = k7; // first-same-as-last
            record(s, &y, &k1);
            if (s - s_end) * dir >= 0.0 {
                return Ok(Termination::ParameterEnd);
            }
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h.abs() > opts.h_max {
            h = opts.h_max * dir;
        }
        if h.abs() < opts.h_min {
            return Ok(Termination::StepUnderflow);
        }
    }
}

/// Integrate the geodesic equation from `(x0, xi0)` up to affine parameter
/// `s_end` (from 0; negative runs backward). `params` must be resolved.
pub fn integrate_geodesic(
    spec: &MetricSpec,
    params: &Params,
    x0: &[f64; 4],
    xi0: &[f64; 4],
    s_end: f64,
    opts: &GeodesicOptions,
) -> Result<Trajectory> {
    let mut rhs = |_s: f64, y: &[f64; 8]| -> Result<[f64; 8]> {
        let x = [y[0], y[1], y[2], y[3]];
        let xi = [y[4], y[5], y[6], y[7]];
        let jet = spec.metric_jet(&x, params)?;
        let gamma = christoffel(&jet);
        let acc = gamma.contract(&xi, &xi);
        Ok([xi[0], xi[1], xi[2], xi[3], -acc[0], -acc[1], -acc[2], -acc[3]])
    };

    let mut samples = Vec::new();
    let y0 = [x0[0], x0[1], x0[2], x0[3], xi0[0], xi0[1], xi0[2], xi0[3]];
    let termination = dopri45(
        &mut rhs,
        0.0,
        s_end,
        y0,
        opts,
        &mut |s, y, _dy| {
            samples.push(Sample {
                s,
                x: [y[0], y[1], y[2], y[3]],
                xi: [y[4], y[5], y[6], y[7]],
            });
        },
    )?;
    Ok(Trajectory {
        samples,
        termination,
    })
}

/// Adjust the time component of `xi` so the vector is lightlike, keeping
/// the spatial components fixed. Of the two solutions of
/// `g_00 c^2 + 2 g_0k xi^k c + g_kl xi^k xi^l = 0` the one closer to the
/// incoming `xi[0]` wins.
pub fn project_null(spec: &MetricSpec, params: &Params, x: &[f64; 4], xi: &[f64; 4]) -> Result<[f64; 4]> {
    let jet = spec.metric_jet(x, params)?;
    let a = jet.g[0][0];
    let mut b = 0.0;
    let mut c = 0.0;
    for k in 1..4 {
        b += 2.0 * jet.g[0][k] * xi[k];
        for l in 1..4 {
            c += jet.g[k][l] * xi[k] * xi[l];
        }
    }

    let pick = |roots: &[f64]| -> Result<f64> {
        roots
            .iter()
            .copied()
            .min_by(|p, q| {
                (p - xi[0])
                    .abs()
                    .partial_cmp(&(q - xi[0]).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or_else(|| {
                Error::Geodesic("no real lightlike completion for these spatial components".into())
            })
    };

    let t = if a.abs() <= 1e-14 * jet.scale {
        if b.abs() <= 1e-14 * jet.scale {
            return Err(Error::Geodesic(
                "time direction degenerate here; cannot project onto the light cone".into(),
            ));
        }
        -c / b
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(Error::Geodesic(format!(
                "no real lightlike completion: discriminant {disc:e} < 0"
            )));
        }
        let sq = disc.sqrt();
        // split the quadratic the numerically stable way
        let q = -0.5 * (b + b.signum() * sq);
        if q == 0.0 {
            pick(&[0.0])?
        } else {
            pick(&[q / a, c / q])?
        }
    };

    let mut out = *xi;
    out[0] = t;
    // belt and braces: the result must actually be null
    let n = jet.inner(&out, &out);
    let size: f64 = out.iter().map(|v| v * v).sum();
    if n.abs() > 1e-9 * jet.scale * size.max(1e-30) {
        return Err(Error::Geodesic(format!(
            "projection left a residual norm {n:e}; spatial data may be degenerate"
        )));
    }
    Ok(out)
}

/// Pointwise residual of the lightlike-geodesic equation under a conformal
/// rescaling g -> sigma g:
///
/// ```text
/// r^i = (Gamma~ - Gamma)(xi, xi)^i - (d log sigma . xi) xi^i
///     = -1/2 sigma^i g(xi, xi) / sigma
/// ```
///
/// which vanishes exactly when xi is null -- the analytic content of
/// conformal invariance, checked here term by term rather than through the
/// closed form on the right. Returns the max Euclidean norm of r over the
/// trajectory samples, scaled by 1/max(1, |xi|^2).
pub fn conformal_equation_residual(
    spec: &MetricSpec,
    params: &Params,
    sigma: &Expr,
    traj: &Trajectory,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for smp in &traj.samples {
        let jet = spec.metric_jet(&smp.x, params)?;
        let base = christoffel(&jet);
        let sj = eval_jet2(sigma, &smp.x, params)?;
        let conf = crate::curvature::conformal_connection(&jet, &base, &sj)?;

        let mut dlog_xi = 0.0;
        for k in 0..4 {
            dlog_xi += sj.grad[k] / sj.val * smp.xi[k];
        }

        let gx = base.contract(&smp.xi, &smp.xi);
        let cx = conf.contract(&smp.xi, &smp.xi);
        let mut r2 = 0.0;
        for i in 0..4 {
            let ri = cx[i] - gx[i] - dlog_xi * smp.xi[i];
            r2 += ri * ri;
        }

        let size: f64 = smp.xi.iter().map(|v| v * v).sum();
        worst = worst.max(r2.sqrt() / size.max(1.0));
    }
    Ok(worst)
}

/// Cubic-Hermite densification of the coordinate path x(s), splitting each
/// accepted step so consecutive dense points sit at most `h_max` apart
/// (Euclidean, in coordinates).
pub fn densify(traj: &Trajectory, h_max: f64) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    let n = traj.samples.len();
    if n == 0 {
        return out;
    }
    out.push(traj.samples[0].x);
    for w in traj.samples.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let ds = q.s - p.s;
        let gap: f64 = (0..4)
            .map(|i| (q.x[i] - p.x[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        let pieces = ((gap / h_max).ceil() as usize).clamp(1, 256);
        for j in 1..=pieces {
            let t = j as f64 / pieces as f64;
            let (h00, h10, h01, h11) = hermite_basis(t);
            let mut x = [0.0; 4];
            for i in 0..4 {
                x[i] = h00 * p.x[i]
                    + h10 * ds * p.xi[i]
                    + h01 * q.x[i]
                    + h11 * ds * q.xi[i];
            }
            out.push(x);
        }
    }
    out
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// max over `from` points of the distance to the polyline `to`.
pub fn polyline_max_min_distance(from: &[[f64; 4]], to: &[[f64; 4]]) -> f64 {
    let mut worst = 0.0f64;
    for p in from {
        let mut best = f64::INFINITY;
        if to.len() == 1 {
            best = dist(p, &to[0]);
        }
        for seg in to.windows(2) {
            best = best.min(point_segment_distance(p, &seg[0], &seg[1]));
            if best == 0.0 {
                break;
            }
        }
        worst = worst.max(best);
    }
    worst
}

fn dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
}

fn point_segment_distance(p: &[f64; 4], a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let mut ab2 = 0.0;
    let mut ap_ab = 0.0;
    for i in 0..4 {
        let d = b[i] - a[i];
        ab2 += d * d;
        ap_ab += (p[i] - a[i]) * d;
    }
    let t = if ab2 == 0.0 {
        0.0
    } else {
        (ap_ab / ab2).clamp(0.0, 1.0)
    };
    let mut s = 0.0;
    for i in 0..4 {
        let c = a[i] + t * (b[i] - a[i]);
        s += (p[i] - c) * (p[i] - c);
    }
    s.sqrt()
}

/// How far apart two trajectories are *as unparameterized point sets*: the
/// coordinate-shorter curve is densified and measured against the other.
/// Reparameterizations (affine or not) don't move this number, which is
/// exactly what a conformal rescaling is allowed to do to a lightlike
/// geodesic.
///
/// Resolution floor: the comparison runs against straight chords of length
/// `h_max`, so deviations below (path curvature) * h_max^2 / 8 drown in
/// the chordal error. Pick h_max accordingly (1e-3 resolves ~1e-7 on
/// mildly curved paths); integrating the inputs with a matching
/// [`GeodesicOptions::h_max`] keeps the interpolation honest.
pub fn trajectory_deviation(a: &Trajectory, b: &Trajectory, h_max: f64) -> f64 {
    let arc = |t: &Trajectory| -> f64 {
        t.samples
            .windows(2)
            .map(|w| dist(&w[0].x, &w[1].x))
            .sum()
    };
    let da = densify(a, h_max);
    let db = densify(b, h_max);
    if arc(a) <= arc(b) {
        polyline_max_min_distance(&da, &db)
    } else {
        polyline_max_min_distance(&db, &da)
    }
}

/// Controls for principal-congruence integration.
#[derive(Debug, Clone)]
pub struct CongruenceOptions {
    /// Fixed RK4 step in the congruence parameter.
    pub step: f64,
    pub n_steps: usize,
    pub classify: ClassifySettings,
}

impl Default for CongruenceOptions {
    fn default() -> Self {
        CongruenceOptions {
            step: 0.05,
            n_steps: 200,
            classify: ClassifySettings::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CongruenceSample {
    pub s: f64,
    pub x: [f64; 4],
    /// Unit (Euclidean) principal direction used as the velocity here.
    pub xi: [f64; 4],
    pub root: ProjRoot,
    pub petrov_type: PetrovType,
}

#[derive(Debug, Clone)]
pub struct Congruence {
    pub samples: Vec<CongruenceSample>,
    pub termination: Termination,
}

/// Follow a principal null direction field from `x0`, tracking its quartic
/// root by chordal continuity. `root_index` selects the starting cluster
/// (as ordered by the classification: multiplicity desc, finite first).
///
/// Fixed-step RK4 on dx/ds = xi(x): the field is only defined up to scale,
/// so adaptive error control would chase an arbitrary normalization; each
/// step uses the previous root and orientation as its matching reference.
/// If two clusters come close enough to confuse the matching the run stops
/// with [`Error::AmbiguousRoot`] -- guessing there would silently hop
/// between congruences.
pub fn integrate_principal_congruence(
    spec: &MetricSpec,
    params: &Params,
    x0: &[f64; 4],
    root_index: usize,
    opts: &CongruenceOptions,
) -> Result<Congruence> {
    let first = petrov::classify_at(spec, x0, params, &opts.classify)?;
    if first.roots.is_empty() {
        return Err(Error::AmbiguousRoot {
            s: 0.0,
            msg: "conformally flat here: no principal directions to follow".into(),
        });
    }
    if root_index >= first.roots.len() {
        return Err(Error::AmbiguousRoot {
            s: 0.0,
            msg: format!(
                "root index {root_index} out of range; classification found {} distinct roots",
                first.roots.len()
            ),
        });
    }

    let mut prev_root = first.roots[root_index].root;
    let mut prev_xi = unit(&first.principal_directions[root_index].direction);
    let mut samples = vec![CongruenceSample {
        s: 0.0,
        x: *x0,
        xi: prev_xi,
        root: prev_root,
        petrov_type: first.petrov_type,
    }];

    let h = opts.step;
    let mut x = *x0;
    let mut termination = Termination::ParameterEnd;

    'outer: for n in 0..opts.n_steps {
        let s = n as f64 * h;
        // classical RK4; stages share the entering root/orientation
        let mut ks = [[0.0f64; 4]; 4];
        let shifts = [0.0, 0.5, 0.5, 1.0];
        for stage in 0..4 {
            let mut xs = x;
            if stage > 0 {
                for i in 0..4 {
                    xs[i] += h * shifts[stage] * ks[stage - 1][i];
                }
            }
            match field_at(spec, params, &xs, &prev_root, &prev_xi, s, &opts.classify) {
                Ok((xi, _, _)) => ks[stage] = xi,
                Err(Error::AmbiguousRoot { s, msg }) => {
                    return Err(Error::AmbiguousRoot { s, msg })
                }
                Err(_) => {
                    termination = Termination::DomainExit;
                    break 'outer;
                }
            }
        }
        let mut next = x;
        for i in 0..4 {
            next[i] += h / 6.0 * (ks[0][i] + 2.0 * ks[1][i] + 2.0 * ks[2][i] + ks[3][i]);
        }

        let (xi, root, ptype) =
            match field_at(spec, params, &next, &prev_root, &prev_xi, s + h, &opts.classify) {
                Ok(t) => t,
                Err(Error::AmbiguousRoot { s, msg }) => {
                    return Err(Error::AmbiguousRoot { s, msg })
                }
                Err(_) => {
                    termination = Termination::DomainExit;
                    break;
                }
            };
        x = next;
        prev_root = root;
        prev_xi = xi;
        samples.push(CongruenceSample {
            s: s + h,
            x,
            xi,
            root,
            petrov_type: ptype,
        });
    }

    Ok(Congruence {
        samples,
        termination,
    })
}

/// Evaluate the tracked principal field at a point: classify, match the
/// cluster nearest to `prev_root`, orient against `prev_xi`.
fn field_at(
    spec: &MetricSpec,
    params: &Params,
    x: &[f64; 4],
    prev_root: &ProjRoot,
    prev_xi: &[f64; 4],
    s: f64,
    settings: &ClassifySettings,
) -> Result<([f64; 4], ProjRoot, PetrovType)> {
    let c = petrov::classify_at(spec, x, params, settings)?;
    if c.roots.is_empty() {
        return Err(Error::AmbiguousRoot {
            s,
            msg: "field entered a conformally flat region; no roots to track".into(),
        });
    }

    let mut dists: Vec<(f64, usize)> = c
        .roots
        .iter()
        .enumerate()
        .map(|(i, cl)| (chordal(prev_root, &cl.root), i))
        .collect();
    dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    let (d1, best) = dists[0];
    if let Some(&(d2, _)) = dists.get(1) {
        // a clean match is much closer to one cluster than to any other;
        // refuse to choose when the margin collapses
        if d1 > settings.cluster_radius && d2 < 2.0 * d1 {
            return Err(Error::AmbiguousRoot {
                s,
                msg: format!(
                    "nearest roots at chordal distances {d1:.3e} and {d2:.3e}; \
                     continuation cannot tell them apart (try a smaller step)"
                ),
            });
        }
    }
    if d1 > 0.5 {
        return Err(Error::AmbiguousRoot {
            s,
            msg: format!(
                "tracked root jumped by chordal distance {d1:.3e} in one step; \
                 reduce the step size"
            ),
        });
    }

    let mut xi = unit(&petrov::principal_direction(&c.tetrad, &c.roots[best].root));
    let dot: f64 = (0..4).map(|i| xi[i] * prev_xi[i]).sum();
    if dot < 0.0 {
        for v in xi.iter_mut() {
            *v = -*v;
        }
    }
    Ok((xi, c.roots[best].root, c.petrov_type))
}

fn unit(v: &[f64; 4]) -> [f64; 4] {
    let n: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n == 0.0 {
        *v
    } else {
        v.map(|a| a / n)
    }
}

/// Residual of the pregeodesic property for an arbitrary direction field:
///
/// ```text
/// r = |D - kappa xi| / |xi|^2,   D^i = xi^j d_j xi^i + Gamma^i(xi, xi)
/// ```
///
/// with kappa the least-squares multiple of xi (pregeodesic means D is
/// parallel to xi, so r measures the non-parallel remainder). The
/// directional derivative comes from central differences along xi with
/// step `1e-5 (1 + |x|)`; the field closure must return a consistently
/// oriented vector for nearby points.
pub fn pregeodesic_residual(
    spec: &MetricSpec,
    params: &Params,
    x: &[f64; 4],
    field: &mut dyn FnMut(&[f64; 4]) -> Result<[f64; 4]>,
) -> Result<f64> {
    let xi = field(x)?;
    let norm: f64 = xi.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Geodesic("direction field vanishes at the base point".into()));
    }
    let v = xi.map(|a| a / norm);
    let xmax = x.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let h = 1e-5 * (1.0 + xmax);

    let mut xp = *x;
    let mut xm = *x;
    for i in 0..4 {
        xp[i] += h * v[i];
        xm[i] -= h * v[i];
    }
    let mut fp = field(&xp)?;
    let mut fm = field(&xm)?;
    // orient both against the base value in case the caller's normalization
    // flips sign between nearby points
    for f in [&mut fp, &mut fm] {
        let dot: f64 = (0..4).map(|i| f[i] * xi[i]).sum();
        if dot < 0.0 {
            for a in f.iter_mut() {
                *a = -*a;
            }
        }
    }

    let jet = spec.metric_jet(x, params)?;
    let gamma = christoffel(&jet);
    let acc = gamma.contract(&xi, &xi);

    let mut d = [0.0; 4];
    for i in 0..4 {
        d[i] = norm * (fp[i] - fm[i]) / (2.0 * h) + acc[i];
    }

    let xi2: f64 = xi.iter().map(|a| a * a).sum();
    let kappa: f64 = (0..4).map(|i| d[i] * xi[i]).sum::<f64>() / xi2;
    let mut r2 = 0.0;
    for i in 0..4 {
        let ri = d[i] - kappa * xi[i];
        r2 += ri * ri;
    }
    Ok(r2.sqrt() / xi2)
}
