//! Command-line front end: classification, geodesics, conformal path
//! comparison, lightlike hypersurface diagnostics and principal
//! congruences over the metric catalog.
//!
//! Exit codes: 0 on success, 1 when an explicit check comes back negative
//! (a non-lightlike surface, a conformal deviation above `--check-tol`,
//! an ambiguous classification or root tracking), 2 on errors.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isogeo::catalog::Catalog;
use isogeo::geodesic::{
    densify, integrate_geodesic, integrate_principal_congruence, polyline_max_min_distance,
    project_null, CongruenceOptions, GeodesicOptions, Trajectory,
};
use isogeo::lightlike::{flow_generator, level_drift, surface_diag};
use isogeo::metric::{MetricSpec, Params};
use isogeo::petrov::{classify_at, ClassifySettings, Classification};
use isogeo::report::{self, Json};
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "isogeo",
    version,
    about = "Curvature, Petrov type and lightlike-geodesic diagnostics for metric expressions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List catalog metrics, or show one entry in full
    Catalog(CatalogArgs),
    /// Petrov classification at a point or over a coordinate grid
    Classify(ClassifyArgs),
    /// Integrate a geodesic from a point and velocity
    Geodesic(GeodesicArgs),
    /// Compare a ray's path before and after a conformal rescaling
    Conformal(ConformalArgs),
    /// Level-set diagnostics and generator flow
    Hypersurface(HypersurfaceArgs),
    /// Follow a principal null direction field
    Principal(PrincipalArgs),
}

#[derive(Args)]
struct Common {
    /// Catalog metric to work with
    #[arg(long)]
    metric: String,
    /// Extra catalog file; its entries shadow same-named built-ins
    #[arg(long, value_name = "FILE")]
    catalog: Option<PathBuf>,
    /// Parameter overrides: "M=2,a=0.3"
    #[arg(long, value_name = "LIST", default_value = "")]
    params: String,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
    /// Write the payload to a file instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CatalogArgs {
    /// Show this entry instead of listing names
    #[arg(long)]
    metric: Option<String>,
    /// Extra catalog file; its entries shadow same-named built-ins
    #[arg(long, value_name = "FILE")]
    catalog: Option<PathBuf>,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
    /// Write the payload to a file instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: Common,
    /// Base point "c0,c1,c2,c3"
    #[arg(long, value_name = "POINT")]
    point: String,
    /// Sweep one coordinate: "r=2.5:10:16" (name or index, lo:hi:count).
    /// May be given twice for a product grid (first axis outer).
    #[arg(long, value_name = "AXIS")]
    grid: Vec<String>,
    /// Chordal radius for merging quartic roots into one cluster
    #[arg(long, default_value_t = 1e-3)]
    tol_root: f64,
    /// Weyl magnitudes below this fraction of the curvature scale count as zero
    #[arg(long, default_value_t = 1e-9)]
    tol_weyl_zero: f64,
}

#[derive(Args)]
struct GeodesicArgs {
    #[command(flatten)]
    common: Common,
    /// Base point "c0,c1,c2,c3"
    #[arg(long, value_name = "POINT")]
    point: String,
    /// Initial velocity "v0,v1,v2,v3"
    #[arg(long, value_name = "VEC")]
    velocity: String,
    /// Re-solve the velocity's time component so the start is exactly null
    #[arg(long)]
    project_null: bool,
    /// Affine parameter span to integrate
    #[arg(long, default_value_t = 10.0)]
    span: f64,
    /// Relative step-error tolerance
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
    /// Absolute step-error tolerance
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    /// Step size cap (denser samples for downstream interpolation)
    #[arg(long)]
    h_max: Option<f64>,
    /// Emit the trajectory as CSV rows instead of text or JSON
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct ConformalArgs {
    #[command(flatten)]
    common: Common,
    /// Base point "c0,c1,c2,c3"
    #[arg(long, value_name = "POINT")]
    point: String,
    /// Initial velocity "v0,v1,v2,v3"
    #[arg(long, value_name = "VEC")]
    velocity: String,
    /// Positive scale factor applied to every metric component
    #[arg(long, value_name = "EXPR")]
    sigma: String,
    /// Re-solve the velocity's time component so the start is exactly null
    #[arg(long)]
    project_null: bool,
    /// Affine parameter span for both runs
    #[arg(long, default_value_t = 8.0)]
    span: f64,
    /// Exit 1 when the path deviation exceeds this
    #[arg(long, value_name = "TOL")]
    check_tol: Option<f64>,
}

#[derive(Args)]
struct HypersurfaceArgs {
    #[command(flatten)]
    common: Common,
    /// Base point "c0,c1,c2,c3" (must lie on the level set of interest)
    #[arg(long, value_name = "POINT")]
    point: String,
    /// Level function F; the surface is its zero set through the point
    #[arg(long, value_name = "EXPR")]
    surface: String,
    /// Also integrate the generator flow over this parameter span
    #[arg(long, value_name = "SPAN")]
    flow: Option<f64>,
    /// Emit the flow trajectory as CSV rows (implies --flow output only)
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct PrincipalArgs {
    #[command(flatten)]
    common: Common,
    /// Base point "c0,c1,c2,c3"
    #[arg(long, value_name = "POINT")]
    point: String,
    /// Which root cluster to follow (classification order)
    #[arg(long, default_value_t = 0)]
    root_index: usize,
    /// Fixed integration step
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Number of steps
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Chordal radius for merging quartic roots into one cluster
    #[arg(long, default_value_t = 1e-3)]
    tol_root: f64,
    /// Weyl magnitudes below this fraction of the curvature scale count as zero
    #[arg(long, default_value_t = 1e-9)]
    tol_weyl_zero: f64,
}

/// How a successfully executed command wants the process to exit.
enum Verdict {
    Pass,
    /// An explicit check came back negative (exit 1).
    Negative(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Catalog(a) => cmd_catalog(a),
        Cmd::Classify(a) => cmd_classify(a),
        Cmd::Geodesic(a) => cmd_geodesic(a),
        Cmd::Conformal(a) => cmd_conformal(a),
        Cmd::Hypersurface(a) => cmd_hypersurface(a),
        Cmd::Principal(a) => cmd_principal(a),
    };
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Negative(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn load_catalog(extra: &Option<PathBuf>) -> Result<Catalog, AnyError> {
    let mut cat = Catalog::builtin();
    if let Some(path) = extra {
        let src = fs::read_to_string(path)
            .map_err(|e| format!("cannot read catalog file {}: {e}", path.display()))?;
        cat = cat.merge(Catalog::parse(&src)?);
    }
    Ok(cat)
}

fn parse_params(src: &str) -> Result<Params, AnyError> {
    let mut out = Params::new();
    for item in src.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("parameter `{item}` is not of the form name=value"))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| format!("parameter `{item}` has a non-numeric value"))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn parse_vec4(src: &str, what: &str) -> Result<[f64; 4], AnyError> {
    let parts: Vec<&str> = src.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("{what} `{src}` needs exactly 4 comma-separated numbers").into());
    }
    let mut out = [0.0f64; 4];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .parse()
            .map_err(|_| format!("{what} component `{p}` is not a number"))?;
    }
    Ok(out)
}

/// Resolve the metric and its parameters out of the shared flags.
fn setup(common: &Common) -> Result<(Catalog, MetricSpec, Params), AnyError> {
    let cat = load_catalog(&common.catalog)?;
    let spec = cat
        .get(&common.metric)
        .ok_or_else(|| {
            format!(
                "no metric `{}` in the catalog (available: {})",
                common.metric,
                cat.names().join(", ")
            )
        })?
        .clone();
    let params = spec.resolve_params(&parse_params(&common.params)?)?;
    Ok((cat, spec, params))
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<(), AnyError> {
    match out {
        Some(path) => {
            fs::write(path, payload)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
        None => print!("{payload}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------
// catalog

fn cmd_catalog(args: CatalogArgs) -> Result<Verdict, AnyError> {
    let cat = load_catalog(&args.catalog)?;
    let payload = match &args.metric {
        None => {
            if args.json {
                Json::Arr(cat.names().into_iter().map(Json::str).collect()).render()
            } else {
                let mut s = String::new();
                for name in cat.names() {
                    let _ = writeln!(s, "{name}");
                }
                s
            }
        }
        Some(name) => {
            let spec = cat
                .get(name)
                .ok_or_else(|| format!("no metric `{name}` in the catalog"))?;
            if args.json {
                spec_json(spec).render()
            } else {
                spec_text(spec)
            }
        }
    };
    emit(&args.out, &payload)?;
    Ok(Verdict::Pass)
}

fn spec_json(spec: &MetricSpec) -> Json {
    let mut components = Vec::new();
    for i in 0..4 {
        for j in i..4 {
            let e = spec.component(i, j);
            if !matches!(e, isogeo::expr::Expr::Num(v) if *v == 0.0) {
                components.push(Json::Obj(vec![
                    ("i".into(), Json::Int(i as i64)),
                    ("j".into(), Json::Int(j as i64)),
                    ("expr".into(), Json::str(e.to_string())),
                ]));
            }
        }
    }
    Json::Obj(vec![
        ("name".into(), Json::str(spec.name.clone())),
        (
            "chart".into(),
            Json::Arr(spec.chart.iter().map(|c| Json::str(c.clone())).collect()),
        ),
        (
            "params".into(),
            Json::Obj(
                spec.params
                    .iter()
                    .map(|(k, v)| (k.clone(), Json::Num(*v)))
                    .collect(),
            ),
        ),
        (
            "guard".into(),
            match &spec.domain_guard {
                Some(g) => Json::str(g.to_string()),
                None => Json::Null,
            },
        ),
        ("components".into(), Json::Arr(components)),
    ])
}

fn spec_text(spec: &MetricSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "metric {}", spec.name);
    let _ = writeln!(s, "  chart {}", spec.chart.join(" "));
    for (k, v) in &spec.params {
        let _ = writeln!(s, "  param {k} = {v}");
    }
    for i in 0..4 {
        for j in i..4 {
            let e = spec.component(i, j);
            if !matches!(e, isogeo::expr::Expr::Num(v) if *v == 0.0) {
                let _ = writeln!(s, "  g {} {} = {}", spec.chart[i], spec.chart[j], e);
            }
        }
    }
    if let Some(g) = &spec.domain_guard {
        let _ = writeln!(s, "  guard {g}");
    }
    s
}

// ---------------------------------------------------------------------
// classify

/// One swept coordinate axis: index, inclusive endpoints, sample count.
struct GridAxis {
    index: usize,
    values: Vec<f64>,
}

fn parse_grid_axis(src: &str, spec: &MetricSpec) -> Result<GridAxis, AnyError> {
    let (name, rest) = src
        .split_once('=')
        .ok_or_else(|| format!("grid `{src}` is not of the form axis=lo:hi:count"))?;
    let name = name.trim();
    let index = match spec.chart.iter().position(|c| c == name) {
        Some(i) => i,
        None => name
            .parse::<usize>()
            .ok()
            .filter(|&i| i < 4)
            .ok_or_else(|| {
                format!(
                    "grid axis `{name}` is neither a chart coordinate of `{}` nor an index 0..3",
                    spec.name
                )
            })?,
    };
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{src}` needs lo:hi:count after the axis").into());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| format!("grid lo `{}`", parts[0]))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| format!("grid hi `{}`", parts[1]))?;
    let n: usize = parts[2].trim().parse().map_err(|_| format!("grid count `{}`", parts[2]))?;
    if n == 0 {
        return Err(format!("grid `{src}` has zero samples").into());
    }
    let values = if n == 1 {
        vec![lo]
    } else {
        (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect()
    };
    Ok(GridAxis { index, values })
}

fn cmd_classify(args: ClassifyArgs) -> Result<Verdict, AnyError> {
    let (_cat, spec, params) = setup(&args.common)?;
    let base = parse_vec4(&args.point, "point")?;
    let settings = ClassifySettings {
        cluster_radius: args.tol_root,
        weyl_zero_tol: args.tol_weyl_zero,
    };
    if args.grid.len() > 2 {
        return Err("at most two --grid axes are supported".into());
    }
    let axes: Vec<GridAxis> = args
        .grid
        .iter()
        .map(|g| parse_grid_axis(g, &spec))
        .collect::<Result<_, _>>()?;

    let mut points = Vec::new();
    match axes.as_slice() {
        [] => points.push(base),
        [a] => {
            for &v in &a.values {
                let mut x = base;
                x[a.index] = v;
                points.push(x);
            }
        }
        [a, b] => {
            for &va in &a.values {
                for &vb in &b.values {
                    let mut x = base;
                    x[a.index] = va;
                    x[b.index] = vb;
                    points.push(x);
                }
            }
        }
        _ => unreachable!(),
    }

    // grid points behind the domain guard are reported, not fatal; a bad
    // single point is an error outright
    let results: Vec<Result<Classification, isogeo::Error>> = points
        .par_iter()
        .map(|x| classify_at(&spec, x, &params, &settings))
        .collect();
    if points.len() == 1 {
        let cls = match &results[0] {
            Ok(c) => c,
            Err(e) => return Err(e.to_string().into()),
        };
        let ambiguous = cls.ambiguity.clone();
        let payload = if args.common.json {
            report::classification_json(cls).render()
        } else {
            classification_text(cls)
        };
        emit(&args.common.out, &payload)?;
        return Ok(match ambiguous {
            Some(msg) => Verdict::Negative(format!("classification ambiguous: {msg}")),
            None => Verdict::Pass,
        });
    }

    let mut ambiguous = None;
    let payload = if args.common.json {
        let mut items = Vec::new();
        for (x, r) in points.iter().zip(&results) {
            items.push(match r {
                Ok(c) => {
                    if ambiguous.is_none() {
                        ambiguous = c.ambiguity.clone();
                    }
                    report::classification_json(c)
                }
                Err(e) => Json::Obj(vec![
                    ("point".into(), report::vec4(x)),
                    ("skipped".into(), Json::str(e.to_string())),
                ]),
            });
        }
        Json::Arr(items).render()
    } else {
        let mut s = String::new();
        for (x, r) in points.iter().zip(&results) {
            match r {
                Ok(c) => {
                    if ambiguous.is_none() {
                        ambiguous = c.ambiguity.clone();
                    }
                    let flag = if c.ambiguity.is_some() { "  AMBIGUOUS" } else { "" };
                    let _ = writeln!(
                        s,
                        "{}  {}  weyl {:.3e}  scale {:.3e}{flag}",
                        point_text(x),
                        c.petrov_type,
                        c.weyl_max,
                        c.curvature_scale
                    );
                }
                Err(e) => {
                    let _ = writeln!(s, "{}  skipped: {e}", point_text(x));
                }
            }
        }
        s
    };
    emit(&args.common.out, &payload)?;
    Ok(match ambiguous {
        Some(msg) => Verdict::Negative(format!("classification ambiguous: {msg}")),
        None => Verdict::Pass,
    })
}

fn point_text(x: &[f64; 4]) -> String {
    format!("({:.6}, {:.6}, {:.6}, {:.6})", x[0], x[1], x[2], x[3])
}

fn classification_text(c: &Classification) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "point: {}", point_text(&c.point));
    let _ = writeln!(s, "type: {}", c.petrov_type);
    let _ = writeln!(
        s,
        "weyl max: {:.6e}   curvature scale: {:.6e}",
        c.weyl_max, c.curvature_scale
    );
    for root in &c.roots {
        let _ = writeln!(s, "root: {} (x{})", root_text(&root.root), root.multiplicity);
    }
    for d in &c.principal_directions {
        let _ = writeln!(
            s,
            "principal direction (x{}): [{:.6}, {:.6}, {:.6}, {:.6}]",
            d.multiplicity, d.direction[0], d.direction[1], d.direction[2], d.direction[3]
        );
    }
    if let Some(a) = &c.ambiguity {
        let _ = writeln!(s, "ambiguity: {a}");
    }
    s
}

fn root_text(r: &isogeo::petrov::roots::ProjRoot) -> String {
    match r {
        isogeo::petrov::roots::ProjRoot::Infinity => "infinity".to_string(),
        isogeo::petrov::roots::ProjRoot::Finite(z) => format!("{:.6e}{:+.6e}i", z.re, z.im),
    }
}

// ---------------------------------------------------------------------
// geodesic

fn trajectory_text(traj: &Trajectory, norms: &[f64]) -> String {
    let mut s = String::new();
    let end = traj.end();
    let worst = norms.iter().fold(0.0f64, |m, n| m.max(n.abs()));
    let _ = writeln!(s, "termination: {}", traj.termination);
    let _ = writeln!(s, "samples: {}", traj.samples.len());
    let _ = writeln!(s, "affine span: {:.6}", traj.affine_length());
    let _ = writeln!(s, "final point: {}", point_text(&end.x));
    let _ = writeln!(s, "max |g(xi,xi)|: {:.6e}", worst);
    s
}

fn cmd_geodesic(args: GeodesicArgs) -> Result<Verdict, AnyError> {
    let (_cat, spec, params) = setup(&args.common)?;
    let x0 = parse_vec4(&args.point, "point")?;
    let mut xi = parse_vec4(&args.velocity, "velocity")?;
    if args.project_null {
        xi = project_null(&spec, &params, &x0, &xi)?;
    }
    let opts = GeodesicOptions {
        rtol: args.rtol,
        atol: args.atol,
        h_max: args.h_max.unwrap_or(f64::INFINITY),
        ..GeodesicOptions::default()
    };
    let traj = integrate_geodesic(&spec, &params, &x0, &xi, args.span, &opts)?;
    let norms = traj.null_norms(&spec, &params)?;
    let payload = if args.csv {
        report::trajectory_csv(&traj, &norms)?
    } else if args.common.json {
        report::trajectory_json(&traj, &norms)?.render()
    } else {
        trajectory_text(&traj, &norms)
    };
    emit(&args.common.out, &payload)?;
    Ok(Verdict::Pass)
}

// ---------------------------------------------------------------------
// conformal

fn cmd_conformal(args: ConformalArgs) -> Result<Verdict, AnyError> {
    let (_cat, spec, params) = setup(&args.common)?;
    let x0 = parse_vec4(&args.point, "point")?;
    let mut xi = parse_vec4(&args.velocity, "velocity")?;
    if args.project_null {
        xi = project_null(&spec, &params, &x0, &xi)?;
    }
    let sigma = spec.parse_expr(&args.sigma)?;
    let scaled = spec.conformally_scaled(&sigma);

    let opts = GeodesicOptions::default();
    let base = integrate_geodesic(&spec, &params, &x0, &xi, args.span, &opts)?;
    let other = integrate_geodesic(&scaled, &params, &x0, &xi, args.span, &opts)?;

    // the two runs cover different affine spans of (ideally) one path, so
    // measure the shorter polyline's distance from the longer one
    let h = (args.span / 2000.0).max(1e-3);
    let da = densify(&base, h);
    let db = densify(&other, h);
    let deviation = if polyline_arc(&da) <= polyline_arc(&db) {
        polyline_max_min_distance(&da, &db)
    } else {
        polyline_max_min_distance(&db, &da)
    };

    let payload = if args.common.json {
        Json::Obj(vec![
            ("metric".into(), Json::str(spec.name.clone())),
            ("sigma".into(), Json::str(sigma.to_string())),
            ("span".into(), Json::Num(args.span)),
            ("deviation".into(), Json::Num(deviation)),
            (
                "base_termination".into(),
                Json::str(base.termination.to_string()),
            ),
            (
                "scaled_termination".into(),
                Json::str(other.termination.to_string()),
            ),
        ])
        .render()
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "sigma: {sigma}");
        let _ = writeln!(
            s,
            "base run: {} over {:.6}",
            base.termination,
            base.affine_length()
        );
        let _ = writeln!(
            s,
            "scaled run: {} over {:.6}",
            other.termination,
            other.affine_length()
        );
        let _ = writeln!(s, "max path deviation: {deviation:.6e}");
        s
    };
    emit(&args.common.out, &payload)?;

    if let Some(tol) = args.check_tol {
        if deviation > tol {
            return Ok(Verdict::Negative(format!(
                "path deviation {deviation:.3e} exceeds {tol:.3e}"
            )));
        }
    }
    Ok(Verdict::Pass)
}

fn polyline_arc(p: &[[f64; 4]]) -> f64 {
    let mut s = 0.0;
    for w in p.windows(2) {
        let mut d = 0.0;
        for i in 0..4 {
            d += (w[1][i] - w[0][i]) * (w[1][i] - w[0][i]);
        }
        s += d.sqrt();
    }
    s
}

// ---------------------------------------------------------------------
// hypersurface

fn cmd_hypersurface(args: HypersurfaceArgs) -> Result<Verdict, AnyError> {
    let (_cat, spec, params) = setup(&args.common)?;
    let x0 = parse_vec4(&args.point, "point")?;
    let f = spec.parse_expr(&args.surface)?;
    let diag = surface_diag(&spec, &params, &f, &x0)?;

    let flow = match args.flow {
        Some(span) => {
            let traj = flow_generator(&spec, &params, &f, &x0, span, &GeodesicOptions::default())?;
            let drift = level_drift(&params, &f, &traj)?;
            Some((traj, drift))
        }
        None => None,
    };

    let payload = if args.csv {
        let (traj, _) = flow
            .as_ref()
            .ok_or("--csv needs --flow: only the generator flow has rows to print")?;
        let norms = traj.null_norms(&spec, &params)?;
        report::trajectory_csv(traj, &norms)?
    } else if args.common.json {
        let mut obj = match report::surface_json(&diag) {
            Json::Obj(fields) => fields,
            other => vec![("diag".into(), other)],
        };
        if let Some((traj, drift)) = &flow {
            let norms = traj.null_norms(&spec, &params)?;
            obj.push(("flow".into(), report::trajectory_json(traj, &norms)?));
            obj.push(("level_drift".into(), Json::Num(*drift)));
        }
        Json::Obj(obj).render()
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "surface: {f} = {:.6e} at {}", diag.level, point_text(&x0));
        let _ = writeln!(
            s,
            "normal norm: {:.6e} (scale {:.6e})   lightlike: {}",
            diag.normal_norm, diag.normal_scale, diag.lightlike
        );
        let _ = writeln!(s, "induced rank: {}", diag.induced_rank);
        let _ = writeln!(s, "kernel alignment: {:.6e}", diag.kernel_alignment);
        let _ = writeln!(s, "pregeodesic residual: {:.6e}", diag.pregeodesic_residual);
        let _ = writeln!(s, "generator kappa: {:.6e}", diag.kappa);
        if let Some((traj, drift)) = &flow {
            let norms = traj.null_norms(&spec, &params)?;
            let worst = norms.iter().fold(0.0f64, |m, n| m.max(n.abs()));
            let _ = writeln!(s, "flow: {} over {:.6}", traj.termination, traj.affine_length());
            let _ = writeln!(s, "level drift: {:.6e}   max |g(xi,xi)|: {:.6e}", drift, worst);
        }
        s
    };
    emit(&args.common.out, &payload)?;

    if !diag.lightlike {
        return Ok(Verdict::Negative(format!(
            "level set of `{f}` is not lightlike at {} (normal norm {:.3e} vs scale {:.3e})",
            point_text(&x0),
            diag.normal_norm,
            diag.normal_scale
        )));
    }
    Ok(Verdict::Pass)
}

// ---------------------------------------------------------------------
// principal

fn cmd_principal(args: PrincipalArgs) -> Result<Verdict, AnyError> {
    let (_cat, spec, params) = setup(&args.common)?;
    let x0 = parse_vec4(&args.point, "point")?;
    let opts = CongruenceOptions {
        step: args.step,
        n_steps: args.steps,
        classify: ClassifySettings {
            cluster_radius: args.tol_root,
            weyl_zero_tol: args.tol_weyl_zero,
        },
    };
    let cong = match integrate_principal_congruence(&spec, &params, &x0, args.root_index, &opts) {
        Ok(c) => c,
        // ambiguity is a verdict, not a crash: the field stopped being
        // trackable, which is exactly what this command tests for
        Err(isogeo::Error::AmbiguousRoot { s, msg }) => {
            return Ok(Verdict::Negative(format!(
                "root tracking ambiguous at s = {s}: {msg}"
            )));
        }
        Err(e) => return Err(e.into()),
    };

    let payload = if args.common.json {
        report::congruence_json(&cong).render()
    } else {
        let mut s = String::new();
        let first = &cong.samples[0];
        let last = cong.samples.last().unwrap();
        let _ = writeln!(s, "termination: {}", cong.termination);
        let _ = writeln!(s, "samples: {}", cong.samples.len());
        let _ = writeln!(
            s,
            "start: {}  type {}  root {}",
            point_text(&first.x),
            first.petrov_type,
            root_text(&first.root)
        );
        let _ = writeln!(
            s,
            "end:   {}  type {}  root {}",
            point_text(&last.x),
            last.petrov_type,
            root_text(&last.root)
        );
        s
    };
    emit(&args.common.out, &payload)?;
    Ok(Verdict::Pass)
}
