//! `ein` — batch frontend for conformal flow classification and the
//! numerical experiments on Einstein's universe.
//!
//! Exit codes: 0 success (and experiment pass), 1 experiment verified
//! fail, 2 usage or validation error, 3 low-confidence verdict under
//! `--strict`.

mod input;
mod output;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};

use ein_core::classify::{classify_affine_field, ClassificationReport, RANK_TOL};
use ein_core::geodesics::{
    geodesic_chart, geodesic_from_o, segment_length_l0, ConformalGeodesic, GeodesicSegment,
    QuadratureConfig,
};
use ein_core::harness::{
    geometric_time_grid, run_piege, run_reparametrization, run_segment_bound,
    run_semicomplete_contraction, run_translation_stability, ExperimentReport,
};
use ein_core::liealg::{alg_nminus, exp_field};
use ein_core::model::{chart_j, inverse_chart, rho_o_to_basepoint, Chart};
use ein_core::parabolic::{act_on_ein, from_affine_field, AffineConformalMap};
use ein_core::spectral::jordan_chevalley;
use ein_core::Signature;

use input::{parse_field_specs, parse_signature, parse_vector, FieldSpec, MatrixSpec};
use output::{csv_float, open_output, read_input, to_json_string};

#[derive(Parser)]
#[command(name = "ein", version, about = "Conformal flows on Einstein's universe: classify, trace, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify conformal fields: fixed point, linearizability, essentiality.
    Classify(ClassifyArgs),
    /// Trace the orbit of a chart point under a field's flow (CSV).
    Orbit(OrbitArgs),
    /// Evaluate geodesics or measure their flat-metric segment length.
    #[command(subcommand)]
    Geodesic(GeodesicCommand),
    /// Run a named experiment and emit its report (exit 1 on verified fail).
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Multiplicative Jordan decomposition of an O(p,q) matrix.
    Jordan(JordanArgs),
    /// Develop the lift t -> exp(t X) and trace its projection (CSV).
    Develop(DevelopArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Field specification JSON (object or array), `-` for stdin.
    #[arg(long)]
    input: String,
    #[arg(long)]
    output: Option<String>,
    /// Rank tolerance override for every field in the batch.
    #[arg(long)]
    tol: Option<f64>,
    /// Exit 3 when any verdict is low-confidence.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long)]
    input: String,
    /// Start point in affine chart coordinates, comma separated.
    #[arg(long)]
    start: String,
    #[arg(long, default_value_t = 0.0)]
    t_min: f64,
    #[arg(long)]
    t_max: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Subcommand)]
enum GeodesicCommand {
    /// Chart-at-infinity coordinates along a geodesic (CSV).
    Evaluate(GeodesicArgs),
    /// Flat-metric length of the segment [0, s_end] (JSON).
    Length(GeodesicLengthArgs),
}

#[derive(Args)]
struct GeodesicArgs {
    #[arg(long, value_parser = parse_sig_arg)]
    sig: Signature,
    /// Direction vector for the chart form (timelike/spacelike).
    #[arg(long)]
    v: Option<String>,
    /// Offset vector for the chart form (defaults to zero).
    #[arg(long)]
    v0: Option<String>,
    /// Lowest-grade generator vector (straight chart line; any causal type).
    #[arg(long)]
    w: Option<String>,
    #[arg(long)]
    s_max: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct GeodesicLengthArgs {
    #[arg(long, value_parser = parse_sig_arg)]
    sig: Signature,
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    v0: Option<String>,
    #[arg(long)]
    w: Option<String>,
    #[arg(long)]
    s_end: f64,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Flat-metric length bound 8 n R for segments inside B(o, R).
    SegmentBound(SegmentBoundArgs),
    /// Trap dichotomy for translation-rotation flows (Riemannian).
    Piege(PiegeArgs),
    /// Hausdorff collapse of chart balls under translation flows.
    TranslationStability(TranslationStabilityArgs),
    /// Reparametrization law along a lightlike direction.
    Reparam(ReparamArgs),
    /// Containment and collapse of forward-invariant segments.
    Semicomplete(SemicompleteArgs),
}

#[derive(Args)]
struct SegmentBoundArgs {
    #[arg(long, value_parser = parse_sig_arg)]
    sig: Signature,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    traces_csv: Option<String>,
}

#[derive(Args)]
struct PiegeArgs {
    /// Field specification JSON; must be a scale-free, fixed-point-free
    /// translation-rotation field in Riemannian signature.
    #[arg(long)]
    input: String,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 1e4)]
    t_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    traces_csv: Option<String>,
}

#[derive(Args)]
struct TranslationStabilityArgs {
    #[arg(long)]
    input: String,
    /// Euclidean center of the sampled chart ball.
    #[arg(long)]
    center: String,
    #[arg(long, default_value_t = 1.0)]
    ball_radius: f64,
    #[arg(long, default_value_t = 1e4)]
    t_max: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    traces_csv: Option<String>,
}

#[derive(Args)]
struct ReparamArgs {
    #[arg(long, value_parser = parse_sig_arg)]
    sig: Signature,
    /// Curve direction; defaults to the first basis vector.
    #[arg(long)]
    u: Option<String>,
    /// Translation part; defaults to minus the last basis vector.
    #[arg(long)]
    t_vec: Option<String>,
    /// Scale factor of the map (with a diagonal orthogonal part).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Diagonal of the orthogonal part; defaults to the identity.
    #[arg(long)]
    a_diag: Option<String>,
    #[arg(long, default_value_t = 10)]
    k_max: u32,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct SemicompleteArgs {
    #[arg(long)]
    input: String,
    #[arg(long, default_value_t = 0.5)]
    region_radius: f64,
    #[arg(long, default_value_t = 1e3)]
    t_max: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct JordanArgs {
    #[arg(long, value_parser = parse_sig_arg)]
    sig: Signature,
    /// JSON document {"matrix": [n*n row-major reals]}, `-` for stdin.
    #[arg(long)]
    input: String,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct DevelopArgs {
    #[arg(long)]
    input: String,
    /// Development basepoint time.
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long)]
    t_max: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long)]
    output: Option<String>,
}

fn parse_sig_arg(text: &str) -> Result<Signature, String> {
    parse_signature(text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Orbit(args) => cmd_orbit(args),
        Command::Geodesic(GeodesicCommand::Evaluate(args)) => cmd_geodesic_evaluate(args),
        Command::Geodesic(GeodesicCommand::Length(args)) => cmd_geodesic_length(args),
        Command::Verify(v) => cmd_verify(v),
        Command::Jordan(args) => cmd_jordan(args),
        Command::Develop(args) => cmd_develop(args),
    }
}

fn cmd_classify(args: ClassifyArgs) -> anyhow::Result<u8> {
    let text = read_input(&args.input)?;
    let specs = parse_field_specs(&text)?;
    let batch = text.trim_start().starts_with('[');

    let mut reports: Vec<ClassificationReport> = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let f = spec.to_affine_field().with_context(|| format!("entry {i}"))?;
        let tol = args.tol.or(spec.tol()).unwrap_or(RANK_TOL);
        let report = classify_affine_field(&f, tol).with_context(|| format!("entry {i}"))?;
        reports.push(report);
    }

    let low = reports.iter().any(|r| r.low_confidence);
    let json = if batch {
        to_json_string(&reports)?
    } else {
        to_json_string(&reports[0])?
    };
    let mut out = open_output(args.output.as_deref())?;
    writeln!(out, "{json}")?;
    Ok(if args.strict && low { 3 } else { 0 })
}

fn cmd_orbit(args: OrbitArgs) -> anyhow::Result<u8> {
    let text = read_input(&args.input)?;
    let specs = parse_field_specs(&text)?;
    if specs.len() != 1 {
        bail!("orbit expects a single field specification");
    }
    let spec = &specs[0];
    let sig = spec.signature()?;
    let f = spec.to_affine_field()?;
    let x_field = from_affine_field(&f)?;
    let start = parse_vector(&args.start, sig.n())?;
    let z0 = chart_j(sig, &start)?;
    if args.steps == 0 || !(args.t_max > args.t_min) {
        bail!("need steps > 0 and t_max > t_min");
    }

    let mut out = open_output(args.output.as_deref())?;
    write_coord_header(&mut out, "t", sig.n())?;
    for k in 0..=args.steps {
        let t = args.t_min + (args.t_max - args.t_min) * (k as f64) / (args.steps as f64);
        let h = exp_field(&x_field, t)?;
        let z = act_on_ein(&h, &z0)?;
        write_coord_row(&mut out, sig.n(), t, inverse_chart(&z, Chart::J), rho_o_to_basepoint(&z))?;
    }
    Ok(0)
}

fn build_geodesic(
    sig: Signature,
    v: Option<&str>,
    v0: Option<&str>,
    w: Option<&str>,
) -> anyhow::Result<ConformalGeodesic> {
    match (v, w) {
        (Some(v), None) => {
            let v = parse_vector(v, sig.n())?;
            let v0 = match v0 {
                Some(text) => parse_vector(text, sig.n())?,
                None => DVector::zeros(sig.n()),
            };
            Ok(geodesic_chart(sig, &v, &v0)?)
        }
        (None, Some(w)) => {
            if v0.is_some() {
                bail!("--v0 only applies to the chart form (--v)");
            }
            let w = parse_vector(w, sig.n())?;
            Ok(geodesic_from_o(sig, &alg_nminus(sig, &w)?)?)
        }
        _ => bail!("pass exactly one of --v (chart form) or --w (generator form)"),
    }
}

fn cmd_geodesic_evaluate(args: GeodesicArgs) -> anyhow::Result<u8> {
    let geo = build_geodesic(args.sig, args.v.as_deref(), args.v0.as_deref(), args.w.as_deref())?;
    if args.steps == 0 || !(args.s_max > 0.0) {
        bail!("need steps > 0 and s_max > 0");
    }
    let mut out = open_output(args.output.as_deref())?;
    write_coord_header(&mut out, "s", args.sig.n())?;
    for k in 0..=args.steps {
        let s = args.s_max * (k as f64) / (args.steps as f64);
        let z = geo.eval(s)?;
        write_coord_row(
            &mut out,
            args.sig.n(),
            s,
            inverse_chart(&z, Chart::JInfinity),
            rho_o_to_basepoint(&z),
        )?;
    }
    Ok(0)
}

fn cmd_geodesic_length(args: GeodesicLengthArgs) -> anyhow::Result<u8> {
    let geo = build_geodesic(args.sig, args.v.as_deref(), args.v0.as_deref(), args.w.as_deref())?;
    let seg = GeodesicSegment::new(geo, args.s_end)?;
    let estimate = segment_length_l0(&seg, &QuadratureConfig::default())?;
    #[derive(serde::Serialize)]
    struct LengthOut {
        length: f64,
        error_estimate: f64,
        s_end: f64,
    }
    let json = to_json_string(&LengthOut {
        length: estimate.length,
        error_estimate: estimate.error_estimate,
        s_end: args.s_end,
    })?;
    let mut out = open_output(args.output.as_deref())?;
    writeln!(out, "{json}")?;
    Ok(0)
}

fn emit_report(
    report: &ExperimentReport,
    output: Option<&str>,
    traces_csv: Option<&str>,
) -> anyhow::Result<u8> {
    let json = to_json_string(report)?;
    let mut out = open_output(output)?;
    writeln!(out, "{json}")?;
    if let Some(path) = traces_csv {
        let mut csv = open_output(Some(path))?;
        writeln!(csv, "index,t,observable")?;
        if let Some(rows) = &report.traces {
            for row in rows {
                writeln!(csv, "{},{},{}", row.index, csv_float(row.t), csv_float(row.observable))?;
            }
        }
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn load_single_field(path: &str) -> anyhow::Result<(FieldSpec, Signature)> {
    let text = read_input(path)?;
    let specs = parse_field_specs(&text)?;
    if specs.len() != 1 {
        bail!("this command expects a single field specification");
    }
    let sig = specs[0].signature()?;
    Ok((specs.into_iter().next().unwrap(), sig))
}

fn cmd_verify(v: VerifyCommand) -> anyhow::Result<u8> {
    match v {
        VerifyCommand::SegmentBound(args) => {
            let report = run_segment_bound(args.sig, args.radius, args.samples, args.seed)?;
            emit_report(&report, args.output.as_deref(), args.traces_csv.as_deref())
        }
        VerifyCommand::Piege(args) => {
            let (spec, sig) = load_single_field(&args.input)?;
            let f = spec.to_affine_field()?;
            let seed = spec.seed().unwrap_or(args.seed);
            let report = run_piege(sig, &f, args.radius, args.samples, args.t_max, seed)?;
            emit_report(&report, args.output.as_deref(), args.traces_csv.as_deref())
        }
        VerifyCommand::TranslationStability(args) => {
            let (spec, sig) = load_single_field(&args.input)?;
            let f = spec.to_affine_field()?;
            let center = parse_vector(&args.center, sig.n())?;
            let grid = geometric_time_grid(1e-1, args.t_max, 8);
            let seed = spec.seed().unwrap_or(args.seed);
            let report = run_translation_stability(
                sig,
                &f,
                &center,
                args.ball_radius,
                &grid,
                args.samples,
                seed,
            )?;
            emit_report(&report, args.output.as_deref(), args.traces_csv.as_deref())
        }
        VerifyCommand::Reparam(args) => {
            let sig = args.sig;
            let n = sig.n();
            let u = match &args.u {
                Some(text) => parse_vector(text, n)?,
                None => ein_core::forms::basis_vector(n, 0),
            };
            let t_vec = match &args.t_vec {
                Some(text) => parse_vector(text, n)?,
                None => -ein_core::forms::basis_vector(n, n - 1),
            };
            let a = match &args.a_diag {
                Some(text) => DMatrix::from_diagonal(&parse_vector(text, n)?),
                None => DMatrix::identity(n, n),
            };
            let h = AffineConformalMap::new(sig, args.scale, a, t_vec)?;
            let s_grid: Vec<f64> = (1..=100).map(|i| i as f64 / 100.0).collect();
            let report = run_reparametrization(sig, &h, &u, &s_grid, args.k_max)?;
            emit_report(&report, args.output.as_deref(), None)
        }
        VerifyCommand::Semicomplete(args) => {
            let (spec, sig) = load_single_field(&args.input)?;
            let f = spec.to_affine_field()?;
            let grid = geometric_time_grid(1e-1, args.t_max, 8);
            let seed = spec.seed().unwrap_or(args.seed);
            let report = run_semicomplete_contraction(
                sig,
                &f,
                args.region_radius,
                &grid,
                args.samples,
                seed,
            )?;
            emit_report(&report, args.output.as_deref(), None)
        }
    }
}

fn cmd_jordan(args: JordanArgs) -> anyhow::Result<u8> {
    let text = read_input(&args.input)?;
    let spec: MatrixSpec =
        serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("invalid matrix document: {e}"))?;
    let a = spec.to_matrix(args.sig)?;
    let factors = jordan_chevalley(args.sig, &a)?;
    let residuals = factors.residuals(args.sig, &a);

    #[derive(serde::Serialize)]
    struct JordanOut {
        semisimple: Vec<f64>,
        elliptic: Vec<f64>,
        unipotent: Vec<f64>,
        residuals: std::collections::BTreeMap<String, f64>,
    }
    let row_major = |m: &DMatrix<f64>| -> Vec<f64> {
        let mut v = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                v.push(m[(i, j)]);
            }
        }
        v
    };
    let mut res = std::collections::BTreeMap::new();
    res.insert("product".into(), residuals.product);
    res.insert("commutation".into(), residuals.commutation);
    res.insert("membership".into(), residuals.membership);
    res.insert("unipotent_nilpotency".into(), residuals.unipotent_nilpotency);
    let json = to_json_string(&JordanOut {
        semisimple: row_major(&factors.semisimple),
        elliptic: row_major(&factors.elliptic),
        unipotent: row_major(&factors.unipotent),
        residuals: res,
    })?;
    let mut out = open_output(args.output.as_deref())?;
    writeln!(out, "{json}")?;
    Ok(0)
}

fn cmd_develop(args: DevelopArgs) -> anyhow::Result<u8> {
    let (spec, sig) = load_single_field(&args.input)?;
    let f = spec.to_affine_field()?;
    let x_field = from_affine_field(&f)?;
    if args.steps == 0 || !(args.t_max > args.t0) {
        bail!("need steps > 0 and t_max > t0");
    }
    let lift = |t: f64| exp_field(&x_field, t);
    let dev = ein_core::geodesics::develop_flat(lift, args.t0)?;

    let mut out = open_output(args.output.as_deref())?;
    write_coord_header(&mut out, "t", sig.n())?;
    for k in 0..=args.steps {
        let t = args.t0 + (args.t_max - args.t0) * (k as f64) / (args.steps as f64);
        let z = ein_core::geodesics::project_development(&dev(t)?)?;
        write_coord_row(
            &mut out,
            sig.n(),
            t,
            inverse_chart(&z, Chart::JInfinity),
            rho_o_to_basepoint(&z),
        )?;
    }
    Ok(0)
}

fn write_coord_header(out: &mut dyn Write, param: &str, n: usize) -> anyhow::Result<()> {
    write!(out, "{param}")?;
    for i in 1..=n {
        write!(out, ",x{i}")?;
    }
    writeln!(out, ",rho_o_distance")?;
    Ok(())
}

fn write_coord_row(
    out: &mut dyn Write,
    n: usize,
    param: f64,
    coords: Option<DVector<f64>>,
    rho: Option<f64>,
) -> anyhow::Result<()> {
    write!(out, "{}", csv_float(param))?;
    match coords {
        Some(x) => {
            for value in x.iter() {
                write!(out, ",{}", csv_float(*value))?;
            }
        }
        None => {
            // The point left the chart; mark every coordinate cell.
            for _ in 0..n {
                write!(out, ",OUTSIDE")?;
            }
        }
    }
    match rho {
        Some(d) => writeln!(out, ",{}", csv_float(d))?,
        None => writeln!(out, ",OUTSIDE")?,
    }
    Ok(())
}
