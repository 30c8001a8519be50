//! Lightlike hypersurface diagnostics.
//!
//! A level set F = const is lightlike at a point when its normal
//! N_i = d_i F has vanishing norm g^ij N_i N_j there. On such a surface
//! the raised normal l = g^-1 N is tangent to the surface, spans the
//! kernel of the (degenerate) induced metric, and its integral curves --
//! the generators -- are pregeodesics: l^j grad_j l^i = kappa l^i.
//!
//! [`surface_diag`] measures all of that at one point with exact
//! derivatives (the field l inherits dF's jet, no finite differences);
//! [`flow_generator`] integrates a generator so tests and the CLI can
//! watch level drift and capture behavior like horizons attracting
//! neighboring generators.

use crate::curvature::christoffel;
use crate::error::{Error, Result};
use crate::expr::{eval_jet2, Expr};
use crate::geodesic::{dopri45, GeodesicOptions, Sample, Trajectory};
use crate::metric::{MetricSpec, Params};
use nalgebra::Matrix3;

/// Everything measured about a level set of F at one point.
#[derive(Debug, Clone)]
pub struct SurfaceDiag {
    pub point: [f64; 4],
    /// F at the point: which level set this is about.
    pub level: f64,
    /// Covariant normal N_i = d_i F.
    pub normal: [f64; 4],
    /// g^ij N_i N_j.
    pub normal_norm: f64,
    /// Termwise scale sum_ij |g^ij N_i N_j|, the yardstick for "zero".
    pub normal_scale: f64,
    /// |normal_norm| <= 1e-9 * normal_scale.
    pub lightlike: bool,
    /// Raised normal l^i = g^ij N_j (the generator direction when
    /// lightlike).
    pub generator: [f64; 4],
    /// Rank of the induced 3x3 metric on the tangent space (2 when
    /// lightlike, 3 otherwise).
    pub induced_rank: usize,
    /// Singular values (eigenvalue magnitudes) of the induced metric,
    /// descending.
    pub induced_singular_values: [f64; 3],
    /// Sine of the angle between the induced-metric kernel direction and
    /// the generator (only meaningful when the rank drops to 2).
    pub kernel_alignment: f64,
    /// |D - kappa l| / |l|^2 with D^i = l^j d_j l^i + Gamma^i(l, l).
    pub pregeodesic_residual: f64,
    /// Least-squares proportionality D ~ kappa l.
    pub kappa: f64,
}

/// Relative tolerance deciding "the normal is null here".
pub const LIGHTLIKE_TOL: f64 = 1e-9;

/// Rank cutoff for the induced metric: singular values below this fraction
/// of the largest count as zero.
const RANK_TOL: f64 = 1e-9;

/// Diagnose the level set of `f` through `x`. `params` must be resolved.
pub fn surface_diag(
    spec: &MetricSpec,
    params: &Params,
    f: &Expr,
    x: &[f64; 4],
) -> Result<SurfaceDiag> {
    let jet = spec.metric_jet(x, params)?;
    let fj = eval_jet2(f, x, params)?;
    let n = fj.grad;

    let n_size: f64 = n.iter().map(|a| a * a).sum();
    if n_size == 0.0 {
        return Err(Error::Surface(format!(
            "dF vanishes at {x:?}; the level set is not a hypersurface there"
        )));
    }

    let l = jet.raise(&n);
    let mut norm = 0.0;
    let mut scale = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let term = jet.g_inv[i][j] * n[i] * n[j];
            norm += term;
            scale += term.abs();
        }
    }
    let lightlike = norm.abs() <= LIGHTLIKE_TOL * scale;

    // tangent basis of ker dF: drop the coordinate with the largest |N_i|
    // and tilt the other three back into the surface
    let mut pivot = 0usize;
    for i in 1..4 {
        if n[i].abs() > n[pivot].abs() {
            pivot = i;
        }
    }
    let mut basis = [[0.0f64; 4]; 3];
    let mut slot = 0;
    for j in 0..4 {
        if j == pivot {
            continue;
        }
        basis[slot][j] = 1.0;
        basis[slot][pivot] = -n[j] / n[pivot];
        slot += 1;
    }

    let induced = Matrix3::from_fn(|a, b| jet.inner(&basis[a], &basis[b]));
    // the induced metric is symmetric, so rank and kernel come from its
    // eigendecomposition; a general SVD would compute the near-null vector
    // about sqrt(eps) worse
    let eig = induced.symmetric_eigen();
    let mut min_idx = 0;
    for i in 1..3 {
        if eig.eigenvalues[i].abs() < eig.eigenvalues[min_idx].abs() {
            min_idx = i;
        }
    }
    let mut sv = [0.0f64; 3];
    for i in 0..3 {
        sv[i] = eig.eigenvalues[i].abs();
    }
    sv.sort_by(|p, q| q.partial_cmp(p).unwrap_or(std::cmp::Ordering::Equal));
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * sv[0].max(f64::MIN_POSITIVE)).count();

    // kernel direction: eigenvector of the near-zero eigenvalue, pushed
    // back up to a spacetime vector through the basis
    let kernel_alignment = if rank == 2 {
        let col = eig.eigenvectors.column(min_idx);
        let mut k = [0.0f64; 4];
        for a in 0..3 {
            for i in 0..4 {
                k[i] += col[a] * basis[a][i];
            }
        }
        sin_angle(&k, &l)
    } else {
        f64::NAN
    };

    // exact first derivatives of the generator field:
    // d_j l^i = d_j(g^ik) N_k + g^ik d_j d_k F
    //         = -g^ia (d_j g_ab) g^bk N_k + g^ik (d_j d_k F)
    let mut dl = [[0.0f64; 4]; 4]; // dl[j][i]
    for j in 0..4 {
        for i in 0..4 {
            let mut s = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    s -= jet.g_inv[i][a] * jet.dg[j][a][b] * l[b];
                }
            }
            for k in 0..4 {
                s += jet.g_inv[i][k] * fj.hess(j, k);
            }
            dl[j][i] = s;
        }
    }

    let gamma = christoffel(&jet);
    let acc = gamma.contract(&l, &l);
    let mut d = [0.0f64; 4];
    for i in 0..4 {
        let mut s = acc[i];
        for j in 0..4 {
            s += l[j] * dl[j][i];
        }
        d[i] = s;
    }

    let l2: f64 = l.iter().map(|a| a * a).sum();
    let kappa = (0..4).map(|i| d[i] * l[i]).sum::<f64>() / l2;
    let mut r2 = 0.0;
    for i in 0..4 {
        let ri = d[i] - kappa * l[i];
        r2 += ri * ri;
    }

    Ok(SurfaceDiag {
        point: *x,
        level: fj.val,
        normal: n,
        normal_norm: norm,
        normal_scale: scale,
        lightlike,
        generator: l,
        induced_rank: rank,
        induced_singular_values: sv,
        kernel_alignment,
        pregeodesic_residual: r2.sqrt() / l2,
        kappa,
    })
}

fn sin_angle(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let na: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return f64::NAN;
    }
    let dot: f64 = (0..4).map(|i| a[i] * b[i]).sum::<f64>() / (na * nb);
    (1.0 - dot * dot).max(0.0).sqrt()
}

/// Integrate a generator: dx/ds = l(x) = g^-1 dF from `x0`. The recorded
/// `xi` is the generator field at each sample.
pub fn flow_generator(
    spec: &MetricSpec,
    params: &Params,
    f: &Expr,
    x0: &[f64; 4],
    s_end: f64,
    opts: &GeodesicOptions,
) -> Result<Trajectory> {
    let mut rhs = |_s: f64, x: &[f64; 4]| -> Result<[f64; 4]> {
        let jet = spec.metric_jet(x, params)?;
        let fj = eval_jet2(f, x, params)?;
        Ok(jet.raise(&fj.grad))
    };
    let mut samples = Vec::new();
    let termination = dopri45(&mut rhs, 0.0, s_end, *x0, opts, &mut |s, x, dx| {
        samples.push(Sample {
            s,
            x: *x,
            xi: *dx,
        });
    })?;
    Ok(Trajectory {
        samples,
        termination,
    })
}

/// Largest |F(x(s)) - F(x(0))| along a trajectory: how far the flow bled
/// off its level set.
pub fn level_drift(params: &Params, f: &Expr, traj: &Trajectory) -> Result<f64> {
    let mut base = None;
    let mut worst = 0.0f64;
    for smp in &traj.samples {
        let v = crate::expr::eval_value(f, &smp.x, params)?;
        match base {
            None => base = Some(v),
            Some(b) => worst = worst.max((v - b).abs()),
        }
    }
    Ok(worst)
}
