//! Christoffel symbols, Riemann/Ricci/Weyl tensors, conformal connection.
//!
//! Sign conventions, fixed here once and used consistently everywhere:
//!
//! ```text
//! Gamma^i_jk = 1/2 g^im (d_j g_mk + d_k g_mj - d_m g_jk)
//! R^i_jkl    = d_l Gamma^i_jk - d_k Gamma^i_jl
//!              + Gamma^i_ml Gamma^m_jk - Gamma^i_mk Gamma^m_jl
//! Ric_jk     = R^i_jki          (contraction on the 1st and 4th slots)
//! R          = g^jk Ric_jk
//! C_ijkl     = R_ijkl + (g_i[k S_l]j - g_j[k S_l]i) - (R/3) g_i[k g_l]j
//! ```
//!
//! The Riemann sign is chosen so that the 1st-4th contraction above *is*
//! the honest Ricci tensor (positive for a round sphere); the Weyl
//! decomposition is written for that same convention, which is exactly
//! what makes it trace-free (`g^ik C_ijkl = 0`) and zero on constant
//! curvature and conformally flat metrics. Petrov types and every absolute
//! value quoted in tests are invariant under the global sign choice.

use crate::error::{Error, Result};
use crate::expr::Jet2;
use crate::metric::{Mat4, MetricJet};

/// Rank-4 tensor of coordinate components.
pub type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

/// Gamma^i_jk, symmetric in (j,k). Indexed `gamma[i][j][k]`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    pub gamma: [[[f64; 4]; 4]; 4],
}

impl Christoffel {
    /// Contraction Gamma^i_jk u^j v^k.
    pub fn contract(&self, u: &[f64; 4], v: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for i in 0..4 {
            let mut s = 0.0;
            for j in 0..4 {
                for k in 0..4 {
                    s += self.gamma[i][j][k] * u[j] * v[k];
                }
            }
            out[i] = s;
        }
        out
    }
}

/// Levi-Civita connection coefficients from the metric jet.
pub fn christoffel(m: &MetricJet) -> Christoffel {
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in j..4 {
                let mut s = 0.0;
                for mm in 0..4 {
                    s += m.g_inv[i][mm] * (m.dg[j][mm][k] + m.dg[k][mm][j] - m.dg[mm][j][k]);
                }
                let v = 0.5 * s;
                gamma[i][j][k] = v;
                gamma[i][k][j] = v;
            }
        }
    }
    Christoffel { gamma }
}

/// d_l Gamma^i_jk, indexed `dgamma[l][i][j][k]`. Uses the exact d2g from
/// the jets plus d g^im = -g^ia (d g_ab) g^bm.
pub fn christoffel_derivs(m: &MetricJet) -> Tensor4 {
    // dginv[l][i][m] = d_l g^im
    let mut dginv = [[[0.0; 4]; 4]; 4];
    for l in 0..4 {
        for i in 0..4 {
            for mm in 0..4 {
                let mut s = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        s -= m.g_inv[i][a] * m.dg[l][a][b] * m.g_inv[b][mm];
                    }
                }
                dginv[l][i][mm] = s;
            }
        }
    }

    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4];
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                for k in j..4 {
                    let mut s = 0.0;
                    for mm in 0..4 {
                        let a = m.dg[j][mm][k] + m.dg[k][mm][j] - m.dg[mm][j][k];
                        let da =
                            m.d2g[l][j][mm][k] + m.d2g[l][k][mm][j] - m.d2g[l][mm][j][k];
                        s += dginv[l][i][mm] * a + m.g_inv[i][mm] * da;
                    }
                    let v = 0.5 * s;
                    dgamma[l][i][j][k] = v;
                    dgamma[l][i][k][j] = v;
                }
            }
        }
    }
    dgamma
}

/// Riemann tensor in both index positions plus derived contractions.
#[derive(Debug, Clone)]
pub struct Curvature {
    pub christoffel: Christoffel,
    /// R^i_jkl
    pub riemann_up: Tensor4,
    /// R_ijkl = g_im R^m_jkl
    pub riemann_down: Tensor4,
    /// Ric_jk = R^i_jki
    pub ricci: Mat4,
    /// R = g^jk Ric_jk
    pub scalar: f64,
    /// C_ijkl (fully lowered Weyl)
    pub weyl_down: Tensor4,
    /// max |R_ijkl|: the curvature scale used for relative tolerances and
    /// the type-O zero test.
    pub scale: f64,
}

/// Full curvature stack at one point.
pub fn curvature(m: &MetricJet) -> Curvature {
    let gamma = christoffel(m);
    let dgamma = christoffel_derivs(m);
    let riemann_up = riemann_up(&gamma, &dgamma);
    let riemann_down = lower_first(m, &riemann_up);
    let (ricci, scalar) = ricci_and_scalar(m, &riemann_up);
    let weyl_down = weyl(m, &riemann_down, &ricci, scalar);
    let scale = max_abs(&riemann_down);
    Curvature {
        christoffel: gamma,
        riemann_up,
        riemann_down,
        ricci,
        scalar,
        weyl_down,
        scale,
    }
}

/// R^i_jkl = d_l Gamma^i_jk - d_k Gamma^i_jl
///           + Gamma^i_ml Gamma^m_jk - Gamma^i_mk Gamma^m_jl
pub fn riemann_up(gamma: &Christoffel, dgamma: &Tensor4) -> Tensor4 {
    let g = &gamma.gamma;
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in (k + 1)..4 {
                    let mut s = dgamma[l][i][j][k] - dgamma[k][i][j][l];
                    for mm in 0..4 {
                        s += g[i][mm][l] * g[mm][j][k] - g[i][mm][k] * g[mm][j][l];
                    }
                    r[i][j][k][l] = s;
                    r[i][j][l][k] = -s;
                }
            }
        }
    }
    r
}

pub fn lower_first(m: &MetricJet, up: &Tensor4) -> Tensor4 {
    let mut down = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut s = 0.0;
                    for mm in 0..4 {
                        s += m.g[i][mm] * up[mm][j][k][l];
                    }
                    down[i][j][k][l] = s;
                }
            }
        }
    }
    down
}

/// Ricci (1st-4th contraction) and scalar curvature.
pub fn ricci_and_scalar(m: &MetricJet, up: &Tensor4) -> (Mat4, f64) {
    let mut ric = [[0.0; 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            let mut s = 0.0;
            for i in 0..4 {
                s += up[i][j][k][i];
            }
            ric[j][k] = s;
        }
    }
    let mut scalar = 0.0;
    for j in 0..4 {
        for k in 0..4 {
            scalar += m.g_inv[j][k] * ric[j][k];
        }
    }
    (ric, scalar)
}

/// Trace-free part of the lowered Riemann tensor (n = 4):
///
/// C_ijkl = R_ijkl + 1/2 (g_ik S_lj - g_il S_kj - g_jk S_li + g_jl S_ki)
///          - R/6 (g_ik g_lj - g_il g_kj)
pub fn weyl(m: &MetricJet, down: &Tensor4, ricci: &Mat4, scalar: f64) -> Tensor4 {
    let g = &m.g;
    let mut c = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    c[i][j][k][l] = down[i][j][k][l]
                        + 0.5
                            * (g[i][k] * ricci[l][j] - g[i][l] * ricci[k][j]
                                - g[j][k] * ricci[l][i]
                                + g[j][l] * ricci[k][i])
                        - scalar / 6.0 * (g[i][k] * g[l][j] - g[i][l] * g[k][j]);
                }
            }
        }
    }
    c
}

/// Quadratic curvature invariant R_ijkl R^ijkl (Kretschmann scalar).
pub fn kretschmann(m: &MetricJet, down: &Tensor4) -> f64 {
    // raise all four indices one at a time
    let mut t1 = [[[[0.0; 4]; 4]; 4]; 4];
    contract_first(&m.g_inv, down, &mut t1);
    let mut t2 = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        let mut tmp = [[[[0.0; 4]; 4]; 4]; 4];
        for b in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut s = 0.0;
                    for j in 0..4 {
                        s += m.g_inv[b][j] * t1[a][j][k][l];
                    }
                    tmp[a][b][k][l] = s;
                }
            }
        }
        t2[a] = tmp[a];
    }
    let mut t3 = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for l in 0..4 {
                    let mut s = 0.0;
                    for k in 0..4 {
                        s += m.g_inv[c][k] * t2[a][b][k][l];
                    }
                    t3[a][b][c][l] = s;
                }
            }
        }
    }
    let mut total = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut up = 0.0;
                    for l in 0..4 {
                        up += m.g_inv[d][l] * t3[a][b][c][l];
                    }
                    total += down[a][b][c][d] * up;
                }
            }
        }
    }
    total
}

fn contract_first(ginv: &Mat4, t: &Tensor4, out: &mut Tensor4) {
    for a in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut s = 0.0;
                    for i in 0..4 {
                        s += ginv[a][i] * t[i][j][k][l];
                    }
                    out[a][j][k][l] = s;
                }
            }
        }
    }
}

pub fn max_abs(t: &Tensor4) -> f64 {
    let mut m = 0.0f64;
    for a in t.iter().flatten().flatten().flatten() {
        m = m.max(a.abs());
    }
    m
}

/// Connection of the conformally rescaled metric sigma*g, directly from the
/// base-metric connection:
///
///   Gamma~^i_jl = Gamma^i_jl + 1/2 (delta^i_j s_l + delta^i_l s_j - s^i g_jl)
///
/// with s_k = d_k log sigma and s^i = g^ik s_k. `sigma` is the factor's jet
/// at the same point; it must be positive there.
pub fn conformal_connection(
    m: &MetricJet,
    base: &Christoffel,
    sigma: &Jet2,
) -> Result<Christoffel> {
    if sigma.val <= 0.0 {
        return Err(Error::EvalDomain {
            subexpr: "sigma".into(),
            msg: format!("conformal factor must be positive, got {:e}", sigma.val),
        });
    }
    let mut s_low = [0.0; 4];
    for k in 0..4 {
        s_low[k] = sigma.grad[k] / sigma.val;
    }
    let s_up = m.raise(&s_low);

    let mut gamma = base.gamma;
    for i in 0..4 {
        for j in 0..4 {
            for l in 0..4 {
                let mut corr = -s_up[i] * m.g[j][l];
                if i == j {
                    corr += s_low[l];
                }
                if i == l {
                    corr += s_low[j];
                }
                gamma[i][j][l] += 0.5 * corr;
            }
        }
    }
    Ok(Christoffel { gamma })
}
