//! Quartic root finding on the projective line, with multiplicity
//! clustering.
//!
//! Roots at zero and infinity are peeled off exactly by dropping trailing
//! and leading coefficients that vanish relative to the coefficient scale.
//! What remains (degree <= 4) goes through closed forms for degrees 1-2
//! and a bounded simultaneous (Weierstrass) iteration for 3-4, followed
//! by one Newton polish per root.
//!
//! Near-equal roots are then merged by greedy clustering in the chordal
//! metric of the Riemann sphere, d(z, w) = 2|z - w| / sqrt((1+|z|^2)(1+|w|^2)),
//! which treats infinity like any other point. The cluster radius is the
//! caller's knob: an m-fold root computed in f64 scatters its copies by
//! roughly eps^(1/m) (about 2e-4 for a quadruple root), so radii far below
//! 1e-3 silently split high-multiplicity roots instead of resolving them.
//! Each m-member cluster center is then refined as a root of the (m-1)-th
//! derivative polynomial, where an m-fold root of p sits as a simple root;
//! that pins it far below the scatter radius.

use crate::error::{Error, Result};
use num_complex::Complex64;

type C = Complex64;

/// Point on the projective line: a finite complex number or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjRoot {
    Finite(C),
    Infinity,
}

impl ProjRoot {
    pub fn is_finite(&self) -> bool {
        matches!(self, ProjRoot::Finite(_))
    }

    /// Position on the unit Riemann sphere; chordal distance between two
    /// projective points is the Euclidean distance of their images.
    fn sphere(&self) -> [f64; 3] {
        match self {
            ProjRoot::Infinity => [0.0, 0.0, 1.0],
            ProjRoot::Finite(z) => {
                let d = 1.0 + z.norm_sqr();
                [2.0 * z.re / d, 2.0 * z.im / d, (z.norm_sqr() - 1.0) / d]
            }
        }
    }
}

impl std::fmt::Display for ProjRoot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProjRoot::Infinity => write!(f, "inf"),
            ProjRoot::Finite(z) => {
                if z.im >= 0.0 {
                    write!(f, "{}+{}i", z.re, z.im)
                } else {
                    write!(f, "{}{}i", z.re, z.im)
                }
            }
        }
    }
}

/// Chordal distance on the Riemann sphere (range [0, 2]).
pub fn chordal(a: &ProjRoot, b: &ProjRoot) -> f64 {
    let pa = a.sphere();
    let pb = b.sphere();
    let mut s = 0.0;
    for i in 0..3 {
        s += (pa[i] - pb[i]) * (pa[i] - pb[i]);
    }
    s.sqrt()
}

/// A root cluster: representative value and how many of the four quartic
/// roots landed in it.
#[derive(Debug, Clone)]
pub struct ClusteredRoot {
    pub root: ProjRoot,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct QuarticRoots {
    /// Clusters sorted by multiplicity (desc), finite values first.
    pub clusters: Vec<ClusteredRoot>,
    /// Set when two cluster centers sit between one and two radii apart:
    /// the partition (hence the classification) is sensitive to the radius.
    pub ambiguity: Option<String>,
}

impl QuarticRoots {
    /// Cluster sizes, largest first (e.g. [2, 1, 1]).
    pub fn partition(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }
}

/// Relative threshold below which a leading/trailing coefficient counts as
/// zero, sending a root exactly to infinity/zero.
const PEEL_TOL: f64 = 1e-12;

/// All four roots of `c[0] z^4 + c[1] z^3 + c[2] z^2 + c[3] z + c[4]` on
/// the projective line, clustered with the given chordal radius.
pub fn quartic_roots(c: &[C; 5], cluster_radius: f64) -> Result<QuarticRoots> {
    let scale = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if scale == 0.0 {
        return Err(Error::Roots(
            "all quartic coefficients vanish; no principal directions exist".into(),
        ));
    }
    if !(cluster_radius > 0.0 && cluster_radius < 1.0) {
        return Err(Error::Roots(format!(
            "cluster radius must lie in (0, 1), got {cluster_radius:e}"
        )));
    }

    let mut coeffs: Vec<C> = c.to_vec();
    let mut roots: Vec<ProjRoot> = Vec::with_capacity(4);

    while coeffs.len() > 1 && coeffs[0].norm() < PEEL_TOL * scale {
        coeffs.remove(0);
        roots.push(ProjRoot::Infinity);
    }
    while coeffs.len() > 1 && coeffs[coeffs.len() - 1].norm() < PEEL_TOL * scale {
        coeffs.pop();
        roots.push(ProjRoot::Finite(C::new(0.0, 0.0)));
    }

    let finite = finite_roots(&coeffs)?;
    for z in finite {
        roots.push(ProjRoot::Finite(polish(&coeffs, z)));
    }
    debug_assert_eq!(roots.len(), 4);

    Ok(cluster(roots, cluster_radius, c))
}

/// Roots of the peeled polynomial (nonzero ends, degree = len-1 <= 4).
fn finite_roots(c: &[C]) -> Result<Vec<C>> {
    match c.len() {
        0 | 1 => Ok(Vec::new()),
        2 => Ok(vec![-c[1] / c[0]]),
        3 => {
            // stable quadratic: pick the sqrt branch aligned with b so the
            // additions never cancel, then get the mate from the product
            let (a, b, cc) = (c[0], c[1], c[2]);
            let disc = b * b - 4.0 * a * cc;
            let mut s = disc.sqrt();
            if (b.conj() * s).re < 0.0 {
                s = -s;
            }
            let q = -0.5 * (b + s);
            if q.norm() == 0.0 {
                // b = 0 and disc = 0: double root at the origin of the
                // shifted variable
                let z = (-cc / a).sqrt();
                return Ok(vec![z, -z]);
            }
            Ok(vec![q / a, cc / q])
        }
        4 | 5 => {
            let monic: Vec<C> = c.iter().map(|z| z / c[0]).collect();
            Ok(simultaneous_roots(&monic))
        }
        n => Err(Error::Roots(format!("unexpected polynomial length {n}"))),
    }
}

/// All roots of a monic polynomial at once by Weierstrass iteration:
/// z_k <- z_k - p(z_k) / prod_{j != k} (z_k - z_j), sweeping in place.
///
/// Simple roots converge quadratically; an m-fold root converges linearly
/// and stalls at its intrinsic f64 scatter (~eps^(1/m)), which the caller's
/// chordal clustering is sized to absorb, so the sweep cap below is a cost
/// bound rather than a failure mode.
fn simultaneous_roots(monic: &[C]) -> Vec<C> {
    let n = monic.len() - 1;
    // every root lies inside the Cauchy bound 1 + max |coefficient|
    let radius = 1.0 + monic[1..].iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let seed = C::new(0.4, 0.9); // breaks the real-axis symmetry of the start
    let mut z: Vec<C> = (1..=n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..500 {
        let mut worst = 0.0f64;
        for k in 0..n {
            let (p, _) = horner(monic, z[k]);
            let mut denom = C::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            let w = p / denom;
            if !(w.re.is_finite() && w.im.is_finite()) {
                // iterates collided; nudge apart and keep sweeping
                let nudge = C::new(1e-8, 2e-8) * (1.0 + z[k].norm());
                z[k] += nudge;
                worst = f64::INFINITY;
                continue;
            }
            z[k] -= w;
            worst = worst.max(w.norm() / (1.0 + z[k].norm()));
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

/// One guarded Newton step against the peeled polynomial.
fn polish(c: &[C], z: C) -> C {
    let (p, dp) = horner(c, z);
    if dp.norm() == 0.0 {
        return z;
    }
    let z1 = z - p / dp;
    let (p1, _) = horner(c, z1);
    if p1.norm() < p.norm() {
        z1
    } else {
        z
    }
}

/// Center of an m-member cluster, refined as the nearby root of the
/// (m-1)-th derivative.
///
/// Any estimate driven by p itself is stuck at the eps^(1/m) wall: below
/// that distance |p| is rounding noise. But an m-fold root of p is a
/// SIMPLE root of p^(m-1) at the same point, so Newton on the derivative
/// polynomial has ordinary simple-root conditioning and lands within ~eps.
/// When the cluster is really several distinct roots huddled together, the
/// nearest root of p^(m-1) is their interior stationary point -- still the
/// natural center to report.
fn polish_multiple(c: &[C; 5], z0: C, m: usize) -> C {
    let mut q: Vec<C> = c.to_vec();
    for _ in 1..m {
        let n = q.len() - 1;
        q = q[..n]
            .iter()
            .enumerate()
            .map(|(i, v)| v * ((n - i) as f64))
            .collect();
    }
    let mut z = z0;
    for _ in 0..8 {
        let (p, dp) = horner(&q, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        // the true center sits within the scatter radius of the start; a
        // step that wants to leave the neighborhood is chasing one of the
        // derivative's other roots, so stop rather than follow it
        if step.norm() > 0.05 * (1.0 + z.norm()) {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Polynomial value and derivative at z (coefficients high-to-low).
fn horner(c: &[C], z: C) -> (C, C) {
    let mut p = C::new(0.0, 0.0);
    let mut dp = C::new(0.0, 0.0);
    for &ck in c {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// Greedy chordal clustering with one centroid refinement pass; finite
/// multi-member centers get the multiplicity-aware polish against the
/// original quartic.
fn cluster(points: Vec<ProjRoot>, radius: f64, quartic: &[C; 5]) -> QuarticRoots {
    let mut remaining = points;
    let mut clusters: Vec<ClusteredRoot> = Vec::new();

    while let Some(seed) = remaining.first().copied() {
        let take: Vec<ProjRoot> = remaining
            .iter()
            .copied()
            .filter(|p| chordal(&seed, p) <= radius)
            .collect();
        let center = centroid(&take);
        // re-gather around the centroid so membership doesn't depend on
        // which scattered copy happened to come first
        let take: Vec<ProjRoot> = remaining
            .iter()
            .copied()
            .filter(|p| chordal(&center, p) <= radius)
            .collect();
        let (take, center) = if take.is_empty() {
            (vec![seed], seed)
        } else {
            let c = centroid(&take);
            (take, c)
        };
        // remove exactly the members that were gathered; counting handles
        // coincident copies that plain value comparison would conflate
        let mut to_remove = take.len();
        let mut kept = Vec::with_capacity(remaining.len());
        for p in remaining.drain(..) {
            if to_remove > 0 && chordal(&center, &p) <= radius {
                to_remove -= 1;
            } else {
                kept.push(p);
            }
        }
        remaining = kept;
        // membership is settled; the polish only sharpens the reported value
        let root = match center {
            ProjRoot::Finite(z) if take.len() >= 2 => {
                ProjRoot::Finite(polish_multiple(quartic, z, take.len()))
            }
            other => other,
        };
        clusters.push(ClusteredRoot {
            root,
            multiplicity: take.len(),
        });
    }

    let mut ambiguity = None;
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            let d = chordal(&clusters[i].root, &clusters[j].root);
            if d < 2.0 * radius {
                ambiguity = Some(format!(
                    "root separation {:.3e} is within twice the cluster radius {:.1e}; \
                     multiplicity pattern may be unreliable",
                    d, radius
                ));
            }
        }
    }

    clusters.sort_by(|a, b| {
        b.multiplicity
            .cmp(&a.multiplicity)
            .then_with(|| match (&a.root, &b.root) {
                (ProjRoot::Finite(_), ProjRoot::Infinity) => std::cmp::Ordering::Less,
                (ProjRoot::Infinity, ProjRoot::Finite(_)) => std::cmp::Ordering::Greater,
                (ProjRoot::Infinity, ProjRoot::Infinity) => std::cmp::Ordering::Equal,
                (ProjRoot::Finite(x), ProjRoot::Finite(y)) => x
                    .re
                    .partial_cmp(&y.re)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal)),
            })
    });

    QuarticRoots { clusters, ambiguity }
}

/// Chordal centroid: average on the sphere, renormalized, mapped back.
fn centroid(points: &[ProjRoot]) -> ProjRoot {
    if points.iter().all(|p| matches!(p, ProjRoot::Infinity)) {
        return ProjRoot::Infinity;
    }
    if let [single] = points {
        return *single;
    }
    let mut acc = [0.0; 3];
    for p in points {
        let s = p.sphere();
        for i in 0..3 {
            acc[i] += s[i];
        }
    }
    let n = (acc[0] * acc[0] + acc[1] * acc[1] + acc[2] * acc[2]).sqrt();
    if n == 0.0 {
        // antipodal degenerate average; fall back to the first member
        return points[0];
    }
    for a in acc.iter_mut() {
        *a /= n;
    }
    if 1.0 - acc[2] < 1e-14 {
        return ProjRoot::Infinity;
    }
    ProjRoot::Finite(C::new(
        acc[0] / (1.0 - acc[2]),
        acc[1] / (1.0 - acc[2]),
    ))
}
