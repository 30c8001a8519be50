//! Algebraic classification of the Weyl tensor at a point.
//!
//! In a null tetrad the self-dual Weyl scalars a0..a4 define the principal
//! quartic
//!
//! ```text
//! a0 L^4 - 4 a1 L^3 + 6 a2 L^2 - 4 a3 L + a4 = 0
//! ```
//!
//! whose projective roots mark the principal null 2-planes; the root
//! multiplicity partition is the classification:
//!
//! ```text
//! {1,1,1,1} -> I    {2,1,1} -> II    {2,2} -> D
//! {3,1}     -> III  {4}     -> N     all scalars ~ 0 -> O
//! ```
//!
//! Each root L also yields a real principal null direction
//! `xi = L conj(L) e1 - L e2 - conj(L) e3 + e4` (L = infinity gives e1).
//! The quartic and its roots depend on the tetrad, but the partition does
//! not; callers who need tetrad-independent output should look at the type
//! and the directions, not at raw root values.

pub mod roots;

use crate::curvature::{curvature, Tensor4};
use crate::error::Result;
use crate::frame::{orthonormal_frame, weyl_scalars, NullTetrad, WeylScalars};
use crate::metric::{MetricJet, MetricSpec, Params};
use num_complex::Complex64;
pub use roots::{ClusteredRoot, ProjRoot, QuarticRoots};

type C = Complex64;

/// The six algebraic types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PetrovType {
    I,
    II,
    D,
    III,
    N,
    O,
}

impl std::fmt::Display for PetrovType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PetrovType::I => "I",
            PetrovType::II => "II",
            PetrovType::D => "D",
            PetrovType::III => "III",
            PetrovType::N => "N",
            PetrovType::O => "O",
        };
        f.write_str(s)
    }
}

/// Knobs for the classification; the defaults are what the CLI exposes.
#[derive(Debug, Clone, Copy)]
pub struct ClassifySettings {
    /// Chordal radius used to merge quartic roots into multiplicity
    /// clusters. f64 scatter of an m-fold root goes like eps^(1/m), so
    /// values much below 1e-3 split quadruple roots.
    pub cluster_radius: f64,
    /// Weyl scalars below this fraction of the curvature scale count as
    /// zero (type O). Compared with <=, so exactly flat metrics land in O.
    pub weyl_zero_tol: f64,
}

impl Default for ClassifySettings {
    fn default() -> Self {
        ClassifySettings {
            cluster_radius: 1e-3,
            weyl_zero_tol: 1e-9,
        }
    }
}

/// A principal null direction with the root it came from.
#[derive(Debug, Clone)]
pub struct PrincipalDirection {
    /// Real null coordinate components, scaled so the largest-magnitude
    /// component is exactly 1.
    pub direction: [f64; 4],
    pub multiplicity: usize,
    pub root: ProjRoot,
}

/// Everything the classification produced at one point.
#[derive(Debug, Clone)]
pub struct Classification {
    pub point: [f64; 4],
    pub petrov_type: PetrovType,
    pub scalars: WeylScalars,
    /// [a0, -4 a1, 6 a2, -4 a3, a4]
    pub quartic: [C; 5],
    /// Empty for type O.
    pub roots: Vec<ClusteredRoot>,
    pub principal_directions: Vec<PrincipalDirection>,
    /// Root-separation warning from the clusterer, when any.
    pub ambiguity: Option<String>,
    /// max |R_ijkl| (lowered), the scale all tolerances are relative to.
    pub curvature_scale: f64,
    /// max |a_u| over the scalars.
    pub weyl_max: f64,
    /// The tetrad the scalars/roots refer to.
    pub tetrad: NullTetrad,
}

/// Classify the metric at a point. `params` must be resolved.
pub fn classify_at(
    spec: &MetricSpec,
    point: &[f64; 4],
    params: &Params,
    settings: &ClassifySettings,
) -> Result<Classification> {
    let jet = spec.metric_jet(point, params)?;
    let cur = curvature(&jet);
    classify_tensor(&jet, &cur.weyl_down, cur.scale, settings)
}

/// Classify a given (lowered, Weyl-symmetric) tensor against the metric at
/// the same point. Split out from [`classify_at`] so synthetic tensors can
/// be classified directly.
pub fn classify_tensor(
    jet: &MetricJet,
    weyl_down: &Tensor4,
    curvature_scale: f64,
    settings: &ClassifySettings,
) -> Result<Classification> {
    let frame = orthonormal_frame(jet)?;
    let tetrad = NullTetrad::from_frame(&frame);
    let scalars = weyl_scalars(weyl_down, &tetrad);
    let weyl_max = scalars.max_abs();

    let quartic = principal_quartic(&scalars);

    if weyl_max <= settings.weyl_zero_tol * curvature_scale {
        return Ok(Classification {
            point: jet.point,
            petrov_type: PetrovType::O,
            scalars,
            quartic,
            roots: Vec::new(),
            principal_directions: Vec::new(),
            ambiguity: None,
            curvature_scale,
            weyl_max,
            tetrad,
        });
    }

    let solved = roots::quartic_roots(&quartic, settings.cluster_radius)?;
    let petrov_type = type_from_partition(&solved.partition());
    let principal_directions = solved
        .clusters
        .iter()
        .map(|cl| PrincipalDirection {
            direction: principal_direction(&tetrad, &cl.root),
            multiplicity: cl.multiplicity,
            root: cl.root,
        })
        .collect();

    Ok(Classification {
        point: jet.point,
        petrov_type,
        scalars,
        quartic,
        roots: solved.clusters,
        principal_directions,
        ambiguity: solved.ambiguity,
        curvature_scale,
        weyl_max,
        tetrad,
    })
}

/// Quartic coefficients from the scalars, highest power first.
pub fn principal_quartic(s: &WeylScalars) -> [C; 5] {
    [
        s.a[0],
        -4.0 * s.a[1],
        6.0 * s.a[2],
        -4.0 * s.a[3],
        s.a[4],
    ]
}

fn type_from_partition(partition: &[usize]) -> PetrovType {
    match partition {
        [4] => PetrovType::N,
        [3, 1] => PetrovType::III,
        [2, 2] => PetrovType::D,
        [2, 1, 1] => PetrovType::II,
        _ => PetrovType::I,
    }
}

/// Real null direction for a quartic root in the given tetrad.
pub fn principal_direction(t: &NullTetrad, root: &ProjRoot) -> [f64; 4] {
    let mut xi = [0.0f64; 4];
    match root {
        ProjRoot::Infinity => {
            for i in 0..4 {
                xi[i] = t.e[0][i].re;
            }
        }
        ProjRoot::Finite(l) => {
            let ll = l.norm_sqr();
            for i in 0..4 {
                // l conj(l) e1 - 2 Re(l e2) + e4, which is real termwise
                xi[i] = ll * t.e[0][i].re - 2.0 * (l * t.e[1][i]).re + t.e[3][i].re;
            }
        }
    }
    // scale so the largest component is exactly 1 (projectively harmless,
    // makes output deterministic)
    let mut pivot = 0usize;
    for i in 1..4 {
        if xi[i].abs() > xi[pivot].abs() {
            pivot = i;
        }
    }
    if xi[pivot] != 0.0 {
        let inv = 1.0 / xi[pivot];
        for x in xi.iter_mut() {
            *x *= inv;
        }
    }
    xi
}
