//! Command-line front end. Payloads go to stdout as JSON, diagnostics to stderr.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::foliation::{self, FoliationSpec};
use crate::gm::{self, CurveSystem, Multicurve, QdData};
use crate::pillowcase::certificate::{self, decade_grid};
use crate::pillowcase::lshape::{hm_solve_with, HmOptions};
use crate::surface::{self, SurfaceSignature};
use crate::torus::{self, Foliation, TorusPoint};

/// Significant digits kept in printed floats.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    InvalidInput,
    NoConverge,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::InvalidInput => 2,
            Status::NoConverge => 3,
        }
    }
}

/// Rows written by `--csv`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl CommandResult {
    fn ok(payload: Value) -> Self {
        Self {
            status: Status::Ok,
            payload,
            diagnostics: Vec::new(),
            table: None,
        }
    }

    fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    fn failed(err: &Error) -> Self {
        let status = match err {
            Error::NoConvergence { .. } => Status::NoConverge,
            _ => Status::InvalidInput,
        };
        Self {
            status,
            payload: json!({ "status": status, "error": err.to_string() }),
            diagnostics: vec![err.to_string()],
            table: None,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "horoboundary",
    version,
    about = "Horoboundary and extremal length experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the tabular part of the output to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Override the solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override the solver iteration cap.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Worker threads for scans.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Visual-compactification and global-section tests for a surface.
    Classify(SigArgs),
    /// Internal indecomposability of a vertical foliation given as JSON.
    Infusible {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        sig: OptSigArgs,
    },
    /// Gardiner-Masur functions on a curve system.
    Gm {
        #[command(subcommand)]
        cmd: GmCmd,
    },
    /// Closed-form experiments on the torus.
    Torus {
        #[command(subcommand)]
        cmd: TorusCmd,
    },
    /// Lower bound on the dimension of fibers of the projection.
    Dimfiber(SigArgs),
    /// Extremal length along a line in the five-marked sphere.
    Pillow {
        #[command(subcommand)]
        cmd: PillowCmd,
    },
}

#[derive(Args, Debug)]
struct SigArgs {
    #[arg(long, default_value_t = 0)]
    g: u32,
    #[arg(long, default_value_t = 0)]
    bm: u32,
    #[arg(long, default_value_t = 0)]
    bu: u32,
    #[arg(long, default_value_t = 0)]
    p: u32,
}

impl SigArgs {
    fn signature(&self) -> SurfaceSignature {
        SurfaceSignature::new(self.g, self.bm, self.bu, self.p)
    }
}

#[derive(Args, Debug)]
struct OptSigArgs {
    #[arg(long)]
    g: Option<u32>,
    #[arg(long)]
    bm: Option<u32>,
    #[arg(long)]
    bu: Option<u32>,
    #[arg(long)]
    p: Option<u32>,
}

impl OptSigArgs {
    fn signature(&self) -> Option<SurfaceSignature> {
        if self.g.is_none() && self.bm.is_none() && self.bu.is_none() && self.p.is_none() {
            return None;
        }
        Some(SurfaceSignature::new(
            self.g.unwrap_or(0),
            self.bm.unwrap_or(0),
            self.bu.unwrap_or(0),
            self.p.unwrap_or(0),
        ))
    }
}

#[derive(Subcommand, Debug)]
enum GmCmd {
    /// Evaluate the Busemann function of a quadratic differential.
    Busemann {
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate the minimal function and compare with the Busemann one.
    Minimal {
        #[arg(long)]
        input: PathBuf,
    },
    /// Coefficients of the twisted fiber polynomial.
    Xialpha {
        #[arg(long)]
        c: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        eta: Option<Vec<f64>>,
        /// Evaluate at this coordinate vector.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
    },
    /// Least-squares degree-2 fit of sampled values.
    Fit {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sequence {
    Constant,
    Harmonic,
    Exponential,
}

#[derive(Subcommand, Debug)]
enum TorusCmd {
    /// Teichmüller distance between two points.
    Dist {
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        tau1: (f64, f64),
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        tau2: (f64, f64),
    },
    /// Point on the Teichmüller ray.
    Ray {
        #[command(flatten)]
        qd: QdArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Busemann horofunction of the ray evaluated at a point.
    Xi {
        #[command(flatten)]
        qd: QdArgs,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        x: (f64, f64),
    },
    /// Convergence table of rescaled extremal lengths along rays.
    Walsh {
        #[command(flatten)]
        qd: QdArgs,
        /// Test foliation.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        f: (f64, f64),
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// How the vertical classes approach the limit.
        #[arg(long, value_enum, default_value_t = Sequence::Constant)]
        sequence: Sequence,
    },
    /// Point on the horocycle and its horofunction deviation from the Busemann one.
    Horocycle {
        #[command(flatten)]
        qd: QdArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
}

#[derive(Args, Debug)]
struct QdArgs {
    /// Base point `x,y`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0,1")]
    tau: (f64, f64),
    /// Vertical direction `p,q`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0,1")]
    dir: (f64, f64),
}

impl QdArgs {
    fn qd(&self) -> Result<torus::TorusQd> {
        torus::make_qd(
            TorusPoint::new(self.tau.0, self.tau.1)?,
            Foliation::new(self.dir.0, self.dir.1)?,
        )
    }
}

#[derive(Subcommand, Debug)]
enum PillowCmd {
    /// Solve for one value of t.
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Solve on a log-spaced grid.
    Scan {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Regularity certificate near t = 0, with the torus control.
    Certify {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5")]
        eps: Vec<f64>,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 1e-5)]
    tmin: f64,
    #[arg(long, default_value_t = 1e-2)]
    tmax: f64,
    #[arg(long, default_value_t = 8)]
    per_decade: usize,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let mut it = s.split(',').map(str::trim);
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((
            a.parse().map_err(|e| format!("{a}: {e}"))?,
            b.parse().map_err(|e| format!("{b}: {e}"))?,
        )),
        _ => Err(format!("expected two comma-separated numbers, got `{s}`")),
    }
}

/// Parse `args` (including the program name), run, print and return the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            let payload = json!({ "status": Status::InvalidInput, "error": e.kind().to_string() });
            let _ = writeln!(out, "{payload}");
            return Status::InvalidInput.exit_code();
        }
    };
    let mut result = dispatch_parsed(&cli);
    if result.status == Status::Ok {
        if let (Some(path), Some(table)) = (&cli.csv, &result.table) {
            if let Err(e) = write_csv(path, table) {
                result = CommandResult::failed(&e);
            }
        } else if cli.csv.is_some() {
            result
                .diagnostics
                .push("this subcommand has no tabular output; --csv ignored".into());
        }
    }
    for d in &result.diagnostics {
        let _ = writeln!(err, "{d}");
    }
    let mut payload = result.payload;
    round_floats(&mut payload, SIGNIFICANT_DIGITS);
    let _ = writeln!(out, "{payload}");
    result.status.exit_code()
}

/// Run a command line without printing.
pub fn dispatch(args: &[String]) -> std::result::Result<CommandResult, String> {
    Cli::try_parse_from(args)
        .map(|c| dispatch_parsed(&c))
        .map_err(|e| e.to_string())
}

fn dispatch_parsed(cli: &Cli) -> CommandResult {
    let res = match &cli.command {
        Command::Classify(s) => classify(s.signature()),
        Command::Infusible { spec, sig } => infusible(spec, sig.signature()),
        Command::Dimfiber(s) => dimfiber(s.signature()),
        Command::Gm { cmd } => run_gm(cmd),
        Command::Torus { cmd } => run_torus(cmd),
        Command::Pillow { cmd } => run_pillow(cmd, cli),
    };
    res.unwrap_or_else(|e| CommandResult::failed(&e))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload types serialize")
}

/// Round every float to `digits` significant digits.
pub fn round_floats(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let r: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
                if let Some(num) = serde_json::Number::from_f64(r) {
                    *n = num;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| round_floats(x, digits)),
        Value::Object(o) => o.values_mut().for_each(|x| round_floats(x, digits)),
        _ => {}
    }
}

fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let io = |e: csv::Error| Error::invalid(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(
            row.iter()
                .map(|x| format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)),
        )
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

fn classify(sig: SurfaceSignature) -> Result<CommandResult> {
    let report = surface::classify(&sig);
    let mut payload = to_value(&report);
    payload["signature"] = to_value(&sig);
    Ok(CommandResult::ok(payload))
}

fn dimfiber(sig: SurfaceSignature) -> Result<CommandResult> {
    Ok(CommandResult::ok(json!({
        "signature": sig,
        "euler_characteristic": sig.euler_characteristic(),
        "sigma": surface::sigma(&sig).to_string(),
        "dim_lower_bound": surface::dim_lower_bound(&sig),
    })))
}

fn infusible(path: &Path, sig: Option<SurfaceSignature>) -> Result<CommandResult> {
    let spec: FoliationSpec = read_json(path)?;
    let problems = spec.structural_problems();
    if !problems.is_empty() {
        return Err(Error::invalid(problems.join("; ")));
    }
    let mut payload = json!({
        "internally_indecomposable": foliation::is_internally_indecomposable(&spec),
        "infusible": foliation::is_infusible(&spec),
        "indecomposables": spec.total_indecomposables(),
        "per_part": spec.interior_parts.iter().map(|p| foliation::indecomposable_count(p)).collect::<Vec<_>>(),
    });
    if let Some(sig) = sig {
        payload["validation"] = to_value(&foliation::validate(&spec, &sig));
        payload["component_bound"] = json!(foliation::component_bound(&sig));
    }
    Ok(CommandResult::ok(payload))
}

type Weights = BTreeMap<String, f64>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QdInput {
    components: Vec<Weights>,
    horizontal: Weights,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GmInput {
    system: CurveSystem,
    qd: QdInput,
    /// Rescale the differential to unit area first.
    #[serde(default)]
    normalize: bool,
    #[serde(default)]
    boundary: Vec<Weights>,
    #[serde(default)]
    groups: Vec<Weights>,
    /// Multicurves to evaluate at; each single curve when empty.
    #[serde(default)]
    evaluate: Vec<Weights>,
}

struct GmSetup {
    sys: CurveSystem,
    qd: QdData,
    points: Vec<Multicurve>,
    boundary: Vec<Multicurve>,
    groups: Vec<Multicurve>,
}

fn gm_setup(input: GmInput) -> Result<GmSetup> {
    let sys = input.system;
    let mc = |w: &Weights| sys.multicurve(w);
    let comps = input
        .qd
        .components
        .iter()
        .map(mc)
        .collect::<Result<Vec<_>>>()?;
    let mut qd = QdData {
        components: comps,
        horizontal: mc(&input.qd.horizontal)?,
    };
    // boundary parts and groups rescale with the vertical foliation
    let mut scale = 1.0;
    if input.normalize {
        scale = qd.area(&sys)?.sqrt().recip();
        qd = qd.normalized(&sys)?;
    }
    let points = if input.evaluate.is_empty() {
        sys.labels()
            .iter()
            .map(|l| sys.curve(l))
            .collect::<Result<Vec<_>>>()?
    } else {
        input.evaluate.iter().map(mc).collect::<Result<Vec<_>>>()?
    };
    let boundary = input
        .boundary
        .iter()
        .map(|w| mc(w).map(|m| m.scaled(scale)))
        .collect::<Result<Vec<_>>>()?;
    let groups = input
        .groups
        .iter()
        .map(|w| mc(w).map(|m| m.scaled(scale)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GmSetup {
        sys,
        qd,
        points,
        boundary,
        groups,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FitSample {
    x: Vec<f64>,
    value: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FitInput {
    samples: Vec<FitSample>,
    /// Values are already squared.
    #[serde(default)]
    squared: bool,
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn run_gm(cmd: &GmCmd) -> Result<CommandResult> {
    match cmd {
        GmCmd::Busemann { input } => {
            let s = gm_setup(read_json(input)?)?;
            let f = gm::busemann_fn(&s.sys, &s.qd)?;
            let values = s
                .points
                .iter()
                .map(|m| f.eval(m))
                .collect::<Result<Vec<_>>>()?;
            Ok(CommandResult::ok(
                json!({ "area": s.qd.area(&s.sys)?, "values": values }),
            ))
        }
        GmCmd::Minimal { input } => {
            let s = gm_setup(read_json(input)?)?;
            let lower = gm::minimal_fn(&s.sys, &s.qd, &s.boundary, &s.groups)?;
            let upper = gm::busemann_fn(&s.sys, &s.qd)?;
            let values = s
                .points
                .iter()
                .map(|m| lower.eval(m))
                .collect::<Result<Vec<_>>>()?;
            let busemann = s
                .points
                .iter()
                .map(|m| upper.eval(m))
                .collect::<Result<Vec<_>>>()?;
            let ordered = values.iter().zip(&busemann).all(|(a, b)| *a <= b + 1e-12);
            Ok(CommandResult::ok(
                json!({ "values": values, "busemann": busemann, "ordered": ordered }),
            ))
        }
        GmCmd::Xialpha { c, alpha, eta, at } => {
            let form = gm::xi_alpha(*c, alpha, eta.as_deref())?;
            let eta_used = form.eta.clone().unwrap_or_default();
            let check = gm::derivative_check(&form, 1.0, &eta_used, 1e-10)?;
            let mut payload = json!({
                "variables": 3 * c,
                "coefficients": form.coefficients(),
                "coefficient_sum": form.coefficient_sum(),
                "eta": eta_used,
                "derivative_check": check,
            });
            if let Some(x) = at {
                if x.len() != form.dim() {
                    return Err(Error::invalid(format!(
                        "--at needs {} coordinates",
                        form.dim()
                    )));
                }
                payload["value"] = json!(form.eval(x));
            }
            Ok(CommandResult::ok(payload))
        }
        GmCmd::Fit { input } => {
            let inp: FitInput = read_json(input)?;
            let samples: Vec<(Vec<f64>, f64)> = inp
                .samples
                .into_iter()
                .map(|s| {
                    let v = if inp.squared {
                        s.value
                    } else {
                        s.value * s.value
                    };
                    (s.x, v)
                })
                .collect();
            let fit = gm::polynomial_fit(&samples)?;
            Ok(CommandResult::ok(json!({
                "coefficients": matrix_rows(&fit.form.b),
                "coefficient_sum": fit.form.coefficient_sum(),
                "residual": fit.residual,
                "rcond": fit.rcond,
            })))
        }
    }
}

fn point_json(p: TorusPoint) -> Value {
    json!({ "x": p.x, "y": p.y })
}

fn run_torus(cmd: &TorusCmd) -> Result<CommandResult> {
    match cmd {
        TorusCmd::Dist { tau1, tau2 } => {
            let a = TorusPoint::new(tau1.0, tau1.1)?;
            let b = TorusPoint::new(tau2.0, tau2.1)?;
            Ok(CommandResult::ok(
                json!({ "distance": torus::distance(a, b) }),
            ))
        }
        TorusCmd::Ray { qd, t } => {
            let qd = qd.qd()?;
            let p = torus::ray(&qd, *t);
            Ok(CommandResult::ok(
                json!({ "point": point_json(p), "distance": torus::distance(qd.base, p) }),
            ))
        }
        TorusCmd::Xi { qd, x } => {
            let qd = qd.qd()?;
            let x = TorusPoint::new(x.0, x.1)?;
            let v = torus::xi_eval(&torus::busemann_gm(&qd), x)?;
            Ok(CommandResult::ok(
                json!({ "xi": v, "v_hat": qd.v_hat, "h_hat": qd.h_hat }),
            ))
        }
        TorusCmd::Walsh {
            qd: args,
            f,
            n_max,
            sequence,
        } => {
            let limit = args.qd()?;
            let base = limit.base;
            let (p, q) = args.dir;
            let seq = *sequence;
            let qd_of = move |n: usize| -> Result<torus::TorusQd> {
                let shift = match seq {
                    Sequence::Constant => 0.0,
                    Sequence::Harmonic => 1.0 / n as f64,
                    Sequence::Exponential => (-3.0 * n as f64).exp(),
                };
                torus::make_qd(base, Foliation::new(p + shift, q)?)
            };
            let rows = torus::walsh_limit_table(
                qd_of,
                |n| n as f64,
                &limit,
                Foliation::new(f.0, f.1)?,
                *n_max,
            )?;
            let table = Table {
                header: ["n", "t", "value", "busemann_n", "limit", "bound_holds"]
                    .map(String::from)
                    .to_vec(),
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.n as f64,
                            r.t,
                            r.value,
                            r.busemann_n,
                            r.limit,
                            f64::from(u8::from(r.bound_holds)),
                        ]
                    })
                    .collect(),
            };
            let last_gap = rows.last().map(|r| (r.value - r.limit).abs());
            let all_bounds = rows.iter().all(|r| r.bound_holds);
            Ok(CommandResult::ok(
                json!({ "rows": rows, "final_gap": last_gap, "bounds_hold": all_bounds }),
            )
            .with_table(table))
        }
        TorusCmd::Horocycle { qd, t } => {
            let qd = qd.qd()?;
            let p = torus::horocycle(&qd, *t);
            let dev = torus::horocycle_deviation(&qd, *t, &torus::probe_grid(qd.base))?;
            Ok(CommandResult::ok(
                json!({ "point": point_json(p), "deviation": dev }),
            ))
        }
    }
}

fn hm_options(cli: &Cli) -> Result<HmOptions> {
    let mut o = HmOptions::default();
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(Error::invalid("--tol must be positive"));
        }
        o.tol = t;
    }
    if let Some(m) = cli.max_iter {
        if m == 0 {
            return Err(Error::invalid("--max-iter must be positive"));
        }
        o.max_iter = m;
    }
    Ok(o)
}

fn run_pillow(cmd: &PillowCmd, cli: &Cli) -> Result<CommandResult> {
    let opts = hm_options(cli)?;
    match cmd {
        PillowCmd::Solve { t } => {
            let s = hm_solve_with(*t, &opts, None)?;
            Ok(CommandResult::ok(to_value(&s)))
        }
        PillowCmd::Scan { grid } => {
            let ts = decade_grid(grid.tmax, grid.tmin, grid.per_decade)?;
            let sols = certificate::scan(&ts, &opts, cli.jobs)?;
            let table = Table {
                header: [
                    "t",
                    "a",
                    "b",
                    "l",
                    "g",
                    "ext",
                    "t_match",
                    "invariant_match",
                    "closure",
                ]
                .map(String::from)
                .to_vec(),
                rows: sols
                    .iter()
                    .map(|s| {
                        let r = s.residuals;
                        vec![
                            s.t,
                            s.a,
                            s.b,
                            s.l,
                            s.g,
                            s.ext,
                            r.t_match,
                            r.invariant_match,
                            r.closure,
                        ]
                    })
                    .collect(),
            };
            Ok(CommandResult::ok(json!({ "rows": sols })).with_table(table))
        }
        PillowCmd::Certify { grid, eps } => {
            let ts = decade_grid(grid.tmax, grid.tmin, grid.per_decade)?;
            if eps.iter().any(|e| !(*e > 0.0)) {
                return Err(Error::invalid("eps values must be positive"));
            }
            let cert = certificate::nonsmooth_certificate(&ts, eps, &opts, cli.jobs)?;
            let control = certificate::torus_control(TorusPoint::new(0.3, 1.2)?, &ts, eps)?;
            let mut header = vec!["t".to_string(), "g".into(), "r".into()];
            header.extend(eps.iter().map(|e| format!("s_{e}")));
            header.push("r_control".into());
            let rows = cert
                .rows
                .iter()
                .zip(&control.rows)
                .map(|(r, c)| {
                    let mut v = vec![r.t, r.g, r.r];
                    v.extend(&r.s);
                    v.push(c.r);
                    v
                })
                .collect();
            let mut res = CommandResult::ok(json!({ "certificate": cert, "control": control }));
            if cert.fit.unstable {
                res.diagnostics.push(
                    "log-aware fit flagged unstable: residual exceeds 10% of c t / log t".into(),
                );
            }
            Ok(res.with_table(Table { header, rows }))
        }
    }
}
