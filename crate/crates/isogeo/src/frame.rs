//! Orthonormal frames and complex null tetrads.
//!
//! The tetrad convention: from an orthonormal frame (u1, u2, u3, u4) with
//! u4 timelike (g(u4,u4) = +1) and u1..u3 spacelike (-1), build
//!
//! ```text
//! e1 = (u4 + u1)/sqrt(2)        real null
//! e4 = (u4 - u1)/sqrt(2)        real null
//! e2 = (u2 - i u3)/sqrt(2)      complex null
//! e3 = conj(e2)
//! ```
//!
//! whose only nonzero pairings are g(e1,e4) = 1 and g(e2,e3) = -1. The
//! metric is bilinearly extended to complex vectors (no conjugation).
//!
//! Frames come from Gram-Schmidt over the coordinate basis; if every seed
//! ordering hits a (near-)null pivot -- which genuinely happens, e.g. on a
//! horizon where two coordinate directions degenerate -- we fall back to
//! the metric's own eigenbasis, which is orthogonal by construction.

use crate::curvature::Tensor4;
use crate::error::{Error, Result};
use crate::metric::MetricJet;
use nalgebra::Matrix4;
use num_complex::Complex64;

type C = Complex64;

/// Orthonormal frame: `u[0..3]` spacelike, `u[3]` timelike.
#[derive(Debug, Clone)]
pub struct OrthoFrame {
    pub u: [[f64; 4]; 4],
}

/// Relative pivot tolerance: a candidate direction whose norm falls below
/// this fraction of its Euclidean size (times the metric scale) counts as
/// numerically null and forces a different seed.
const PIVOT_TOL: f64 = 1e-10;

fn gram_schmidt(m: &MetricJet, order: [usize; 4]) -> Option<OrthoFrame> {
    let mut vecs: Vec<[f64; 4]> = Vec::with_capacity(4);
    let mut signs: Vec<f64> = Vec::with_capacity(4);
    for &seed in &order {
        let mut w = [0.0; 4];
        w[seed] = 1.0;
        // two projection passes: the second mops up the rounding the first
        // leaves behind when the frame is poorly scaled
        for _ in 0..2 {
            for (u, eps) in vecs.iter().zip(&signs) {
                let c = m.inner(&w, u) * eps;
                for i in 0..4 {
                    w[i] -= c * u[i];
                }
            }
        }
        let n2 = m.inner(&w, &w);
        let wlen2: f64 = w.iter().map(|x| x * x).sum();
        if n2.abs() < PIVOT_TOL * m.scale * wlen2 {
            return None;
        }
        let inv = 1.0 / n2.abs().sqrt();
        vecs.push(w.map(|x| x * inv));
        signs.push(n2.signum());
    }
    arrange(vecs, signs)
}

/// Orthonormal frame straight from the eigenvectors of g (symmetric), used
/// when no coordinate seed ordering survives Gram-Schmidt.
fn eigen_frame(m: &MetricJet) -> Option<OrthoFrame> {
    let gm = Matrix4::from_fn(|i, j| m.g[i][j]);
    let eig = nalgebra::SymmetricEigen::new(gm);
    let mut vecs = Vec::with_capacity(4);
    let mut signs = Vec::with_capacity(4);
    for k in 0..4 {
        let lam = eig.eigenvalues[k];
        if lam.abs() <= 1e-12 * m.scale {
            return None;
        }
        let col = eig.eigenvectors.column(k);
        let s = 1.0 / lam.abs().sqrt();
        vecs.push([col[0] * s, col[1] * s, col[2] * s, col[3] * s]);
        signs.push(lam.signum());
    }
    arrange(vecs, signs)
}

/// Order as (spacelike, spacelike, spacelike, timelike); the relative order
/// of the spacelike legs is kept, so chart-aligned seeds stay chart-aligned.
fn arrange(vecs: Vec<[f64; 4]>, signs: Vec<f64>) -> Option<OrthoFrame> {
    if signs.iter().filter(|&&s| s > 0.0).count() != 1 {
        return None;
    }
    let mut u = [[0.0; 4]; 4];
    let mut slot = 0;
    for (v, s) in vecs.iter().zip(&signs) {
        if *s > 0.0 {
            u[3] = *v;
        } else {
            u[slot] = *v;
            slot += 1;
        }
    }
    Some(OrthoFrame { u })
}

/// Orthonormal frame at the point of `m`, preferring coordinate-aligned
/// Gram-Schmidt and falling back to the metric eigenbasis.
pub fn orthonormal_frame(m: &MetricJet) -> Result<OrthoFrame> {
    // identity order first, then every other permutation
    let mut orders: Vec<[usize; 4]> = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            if b == a {
                continue;
            }
            for c in 0..4 {
                if c == a || c == b {
                    continue;
                }
                orders.push([a, b, c, 6 - a - b - c]);
            }
        }
    }
    for order in orders {
        if let Some(f) = gram_schmidt(m, order) {
            return Ok(f);
        }
    }
    eigen_frame(m).ok_or_else(|| Error::DegenerateFrame {
        point: m.point,
        msg: "no seed basis yields an orthonormal frame; metric is numerically degenerate here"
            .into(),
    })
}

/// Complex null tetrad `e[0]=e1, e[1]=e2, e[2]=e3, e[3]=e4`.
#[derive(Debug, Clone)]
pub struct NullTetrad {
    pub e: [[C; 4]; 4],
}

impl NullTetrad {
    pub fn from_frame(f: &OrthoFrame) -> NullTetrad {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut e = [[C::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            e[0][i] = C::new(s * (f.u[3][i] + f.u[0][i]), 0.0);
            e[3][i] = C::new(s * (f.u[3][i] - f.u[0][i]), 0.0);
            e[1][i] = C::new(s * f.u[1][i], -s * f.u[2][i]);
            e[2][i] = e[1][i].conj();
        }
        NullTetrad { e }
    }

    /// Bilinear metric pairing of two tetrad legs.
    pub fn pair(&self, m: &MetricJet, a: usize, b: usize) -> C {
        inner_c(m, &self.e[a], &self.e[b])
    }

    /// max |g(e_a, e_b) - eta_ab| over all leg pairs, where eta has
    /// eta_14 = 1, eta_23 = -1 and zeros elsewhere.
    pub fn pairing_residual(&self, m: &MetricJet) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                let want = eta(a, b);
                let got = self.pair(m, a, b);
                worst = worst.max((got - want).norm());
            }
        }
        worst
    }

    /// Covariant legs l_a = g e_a, used by the reconstruction identity
    /// g_ij = l1_i l4_j + l4_i l1_j - l2_i l3_j - l3_i l2_j.
    pub fn lowered(&self, m: &MetricJet) -> [[C; 4]; 4] {
        let mut l = [[C::new(0.0, 0.0); 4]; 4];
        for a in 0..4 {
            for i in 0..4 {
                let mut s = C::new(0.0, 0.0);
                for j in 0..4 {
                    s += m.g[i][j] * self.e[a][j];
                }
                l[a][i] = s;
            }
        }
        l
    }

    /// Boost e1 -> A e1, e4 -> e4/A (A real, nonzero).
    pub fn boost(&self, a: f64) -> NullTetrad {
        let mut e = self.e;
        for i in 0..4 {
            e[0][i] *= a;
            e[3][i] /= a;
        }
        NullTetrad { e }
    }

    /// Spin e2 -> exp(i theta) e2, e3 -> exp(-i theta) e3.
    pub fn spin(&self, theta: f64) -> NullTetrad {
        let ph = C::from_polar(1.0, theta);
        let mut e = self.e;
        for i in 0..4 {
            e[1][i] *= ph;
            e[2][i] *= ph.conj();
        }
        NullTetrad { e }
    }

    /// Null rotation fixing e1:
    /// e2 += c e1, e3 += conj(c) e1, e4 += conj(c) e2 + c e3 + |c|^2 e1.
    pub fn rotate_about_e1(&self, c: C) -> NullTetrad {
        let mut e = self.e;
        let cc = (c * c.conj()).re;
        for i in 0..4 {
            e[3][i] += c.conj() * self.e[1][i] + c * self.e[2][i] + cc * self.e[0][i];
            e[1][i] += c * self.e[0][i];
            e[2][i] += c.conj() * self.e[0][i];
        }
        NullTetrad { e }
    }

    /// Null rotation fixing e4 (mirror of [`rotate_about_e1`](Self::rotate_about_e1)).
    pub fn rotate_about_e4(&self, c: C) -> NullTetrad {
        let mut e = self.e;
        let cc = (c * c.conj()).re;
        for i in 0..4 {
            e[0][i] += c.conj() * self.e[1][i] + c * self.e[2][i] + cc * self.e[3][i];
            e[1][i] += c * self.e[3][i];
            e[2][i] += c.conj() * self.e[3][i];
        }
        NullTetrad { e }
    }
}

fn eta(a: usize, b: usize) -> C {
    match (a.min(b), a.max(b)) {
        (0, 3) => C::new(1.0, 0.0),
        (1, 2) => C::new(-1.0, 0.0),
        _ => C::new(0.0, 0.0),
    }
}

/// Bilinear (unconjugated) complex extension of the metric pairing.
pub fn inner_c(m: &MetricJet, u: &[C; 4], v: &[C; 4]) -> C {
    let mut s = C::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            s += m.g[i][j] * u[i] * v[j];
        }
    }
    s
}

/// Frame component T_abcd = T_ijkl v1^i v2^j v3^k v4^l of a rank-4 tensor.
pub fn frame_component(t: &Tensor4, v1: &[C; 4], v2: &[C; 4], v3: &[C; 4], v4: &[C; 4]) -> C {
    let mut s = C::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            let vij = v1[i] * v2[j];
            if vij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..4 {
                for l in 0..4 {
                    s += t[i][j][k][l] * vij * v3[k] * v4[l];
                }
            }
        }
    }
    s
}

/// The ten independent Weyl frame scalars.
///
/// `a[u]` are the self-dual family C_1212, C_1214, C_1234, C_1434, C_3434;
/// `b[u]` the conjugate family C_1313, C_1314, C_1324, C_1424, C_2424.
/// For a real Weyl tensor b[u] = conj(a[u]); both are kept so that tests
/// can check that redundancy instead of assuming it.
#[derive(Debug, Clone)]
pub struct WeylScalars {
    pub a: [C; 5],
    pub b: [C; 5],
}

impl WeylScalars {
    pub fn max_abs(&self) -> f64 {
        self.a
            .iter()
            .chain(self.b.iter())
            .fold(0.0f64, |m, z| m.max(z.norm()))
    }
}

/// Contract the lowered Weyl tensor against the tetrad.
pub fn weyl_scalars(c: &Tensor4, t: &NullTetrad) -> WeylScalars {
    let [e1, e2, e3, e4] = &t.e;
    WeylScalars {
        a: [
            frame_component(c, e1, e2, e1, e2),
            frame_component(c, e1, e2, e1, e4),
            frame_component(c, e1, e2, e3, e4),
            frame_component(c, e1, e4, e3, e4),
            frame_component(c, e3, e4, e3, e4),
        ],
        b: [
            frame_component(c, e1, e3, e1, e3),
            frame_component(c, e1, e3, e1, e4),
            frame_component(c, e1, e3, e2, e4),
            frame_component(c, e1, e4, e2, e4),
            frame_component(c, e2, e4, e2, e4),
        ],
    }
}

/// Build the coordinate components of the (lowered) Weyl-symmetric tensor
/// that has the given frame scalars in the given tetrad. The ten scalars
/// fix ten of the 21 bivector components; the other eleven follow from the
/// trace and cyclic identities, so the output is trace-free with full
/// Riemann symmetries for *any* scalar values with b[u] = conj(a[u]).
///
/// Mostly a test instrument: it manufactures tensors of prescribed
/// algebraic type without needing a metric that realizes them.
pub fn weyl_from_scalars(s: &WeylScalars, t: &NullTetrad, m: &MetricJet) -> Tensor4 {
    let zero = C::new(0.0, 0.0);
    let [a0, a1, a2, a3, a4] = s.a;
    let [b0, b1, b2, b3, b4] = s.b;

    // bivector pair order: (e1e2, e1e3, e1e4, e2e3, e2e4, e3e4)
    let mut big = [[zero; 6]; 6];
    let upper = [
        [a0, zero, a1, -a1, zero, a2],
        [zero, b0, b1, b1, b2, zero],
        [zero, zero, a2 + b2, b2 - a2, b3, a3],
        [zero, zero, zero, a2 + b2, b3, -a3],
        [zero, zero, zero, zero, b4, zero],
        [zero, zero, zero, zero, zero, a4],
    ];
    for i in 0..6 {
        for j in i..6 {
            big[i][j] = upper[i][j];
            big[j][i] = upper[i][j];
        }
    }

    // coframe dual to the tetrad: theta^a(e_b) = delta^a_b
    let l = t.lowered(m);
    let theta: [[C; 4]; 4] = [
        l[3],
        l[2].map(|z| -z),
        l[1].map(|z| -z),
        l[0],
    ];

    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut omega = [[[zero; 4]; 4]; 6];
    for (p, &(a, b)) in PAIRS.iter().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                omega[p][i][j] = theta[a][i] * theta[b][j] - theta[a][j] * theta[b][i];
            }
        }
    }

    let mut out = [[[[0.0f64; 4]; 4]; 4]; 4];
    for pa in 0..6 {
        for pb in 0..6 {
            let coeff = big[pa][pb];
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            for i in 0..4 {
                for j in 0..4 {
                    let w = coeff * omega[pa][i][j];
                    if w.norm_sqr() == 0.0 {
                        continue;
                    }
                    for k in 0..4 {
                        for ll in 0..4 {
                            // conjugation-consistent scalars make the total
                            // real; the imaginary parts cancel pairwise
                            out[i][j][k][ll] += (w * omega[pb][k][ll]).re;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Residual of the eleven trace/cyclic identities that pin down every Weyl
/// frame component not covered by the ten scalars. Zero (to rounding) for
/// any tensor that is trace-free with Riemann symmetries.
pub fn trace_identity_residual(c: &Tensor4, t: &NullTetrad, s: &WeylScalars) -> f64 {
    let [e1, e2, e3, e4] = &t.e;
    let fc = |p: &[C; 4], q: &[C; 4], r: &[C; 4], w: &[C; 4]| frame_component(c, p, q, r, w);
    let zero = C::new(0.0, 0.0);
    let checks = [
        (fc(e1, e2, e1, e3), zero),
        (fc(e1, e2, e2, e4), zero),
        (fc(e1, e3, e3, e4), zero),
        (fc(e2, e4, e3, e4), zero),
        (fc(e1, e2, e2, e3), -s.a[1]),
        (fc(e2, e3, e3, e4), -s.a[3]),
        (fc(e1, e3, e2, e3), s.b[1]),
        (fc(e2, e3, e2, e4), s.b[3]),
        (fc(e1, e4, e1, e4), s.a[2] + s.b[2]),
        (fc(e2, e3, e2, e3), s.a[2] + s.b[2]),
        (fc(e1, e4, e2, e3), s.b[2] - s.a[2]),
    ];
    checks
        .iter()
        .fold(0.0f64, |m, (got, want)| m.max((got - want).norm()))
}
