//! Command-line front end: every major library operation as a subcommand.
//!
//! Scalar results print to stdout as `key = value` lines; tabular results go
//! to CSV files (fixed 12-significant-digit decimal cells, lowercase
//! `inf`/`nan`, header always present), and every output file gets a
//! `<name>.manifest` companion recording the full parameter set so the file
//! can be reproduced byte-for-byte (the timestamp entry aside).
//!
//! Exit status is 0 whenever the requested computation completed; physics
//! flags such as a divergent ratio or an undefined (nan) quantity are
//! reported in the output, never through the exit code.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wqed::collision::{build_bin_unitary, one_photon_error, BinConfig};
use wqed::config::load_config;
use wqed::one_photon::{
    emission_probabilities, photon_waveform, r1_closed, Channel, RatioState,
};
use wqed::params::CLASSIFY_TOL;
use wqed::report::{fmt_sig, CsvTable, RunManifest};
use wqed::sweep::{run_sweep, GridAxis, Quantity, SweepSpec};
use wqed::trajectory::{
    herald_statistics, sample_trajectory, ClickLabel, Detection, TrajectoryConfig,
};
use wqed::two_photon::{bunching_report, default_modes, noon_fidelity, noon_fidelity_ideal};
use wqed::{C64, ConditionClass, QubitVector, SystemParams};

const ABOUT: &str = "Two identical emitters coupled to a bidirectional waveguide: \
decay channels, directional single- and two-photon emission, path-entangled \
pair generation, and click-trajectory heralding.";

const LONG_ABOUT: &str = "Two identical emitters coupled to a bidirectional waveguide.

Conventions:
  * qubit-pair basis order is ee, eg, ge, gg (first letter = qubit 1);
  * gamma defaults to 1, so times are in units of 1/gamma;
  * the operating point defaults to the controlled antiresonance
    theta = pi/2, g_c = 1 unless --theta/--theta-pi/--gc say otherwise;
  * --theta takes radians, --theta-pi takes multiples of pi (use the latter
    to hit resonances and antiresonances exactly);
  * a flat `key = value` file passed with --config supplies defaults for any
    long flag (dashes and underscores interchangeable); explicit flags win.

Scalars print as `key = value` lines. CSV files use fixed 12-significant-digit
decimal cells with lowercase inf/nan and always carry a header row; every
output file is accompanied by `<name>.manifest` listing tool version, full
parameters, seeds, and a timestamp.";

#[derive(Parser)]
#[command(name = "wqed", version, about = ABOUT, long_about = LONG_ABOUT)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Collective decay rates, coherent shift, and the condition class
    Rates(RatesArgs),
    /// No-click propagator at time t: all 16 entries and survival factors
    Kraus(KrausArgs),
    /// Single-photon emission waveform into each direction
    Emit1(Emit1Args),
    /// Left/right single-photon emission ratio in closed form
    Ratio1(Ratio1Args),
    /// Two-photon direction probabilities and the bunching ratio
    TwoPhoton(TwoPhotonArgs),
    /// Fidelity of the emitted pair with the path-entangled two-photon state
    Noon(NoonArgs),
    /// Grid scan over phase and coupling control, written as CSV
    Sweep(SweepArgs),
    /// Click-trajectory Monte Carlo herald statistics
    Trajectories(TrajArgs),
    /// Convergence of the time-bin simulator against the closed forms
    Validate(ValidateArgs),
}

fn main() -> ExitCode {
    // Die silently on a closed pipe (e.g. `wqed kraus | head`) like other
    // line-oriented tools, instead of panicking on EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.cmd {
        Cmd::Rates(a) => cmd_rates(a),
        Cmd::Kraus(a) => cmd_kraus(a),
        Cmd::Emit1(a) => cmd_emit1(a),
        Cmd::Ratio1(a) => cmd_ratio1(a),
        Cmd::TwoPhoton(a) => cmd_two_photon(a),
        Cmd::Noon(a) => cmd_noon(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Trajectories(a) => cmd_trajectories(a),
        Cmd::Validate(a) => cmd_validate(a),
    }
}

// ---------------------------------------------------------------------------
// shared flags and config merging

/// Physical operating point, shared by every subcommand.
#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// Single-emitter decay rate into the guide (sets the time unit)
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,

    /// Propagation phase between the emitters, in radians
    #[arg(long, conflicts_with = "theta_pi", allow_hyphen_values = true)]
    theta: Option<f64>,

    /// Propagation phase as a multiple of pi (exact at special points)
    #[arg(long, allow_hyphen_values = true)]
    theta_pi: Option<f64>,

    /// Coherent exchange control g_c, in units of gamma
    #[arg(long, allow_hyphen_values = true)]
    gc: Option<f64>,

    /// Flat `key = value` file merged under the flags (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Key-value pairs from --config; later occurrences of a key win.
struct Cfg(HashMap<String, String>);

impl Cfg {
    fn load(path: Option<&Path>) -> Result<Cfg, String> {
        let mut map = HashMap::new();
        if let Some(p) = path {
            for (k, v) in load_config(p).map_err(|e| e.to_string())? {
                map.insert(k, v);
            }
        }
        Ok(Cfg(map))
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        self.0
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| format!("config {key} = {v:?}: {e}"))
            })
            .transpose()
    }

    fn flag(&self, key: &str) -> Result<bool, String> {
        match self.str(key) {
            None => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(v) => Err(format!("config {key} = {v:?}: expected true/false")),
        }
    }
}

fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: &Cfg, key: &str) -> Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.parse(key),
    }
}

impl ParamArgs {
    fn cfg(&self) -> Result<Cfg, String> {
        Cfg::load(self.config.as_deref())
    }

    /// Flag > config > default; the default operating point is the even
    /// controlled antiresonance (theta = pi/2, g_c = 1, gamma = 1).
    fn resolve(&self, cfg: &Cfg) -> Result<SystemParams, String> {
        let pi = std::f64::consts::PI;
        let gamma = pick(self.gamma, cfg, "gamma")?.unwrap_or(1.0);
        let theta = match (self.theta, self.theta_pi) {
            (Some(t), _) => t,
            (None, Some(m)) => m * pi,
            (None, None) => match (cfg.parse::<f64>("theta")?, cfg.parse::<f64>("theta_pi")?) {
                (Some(_), Some(_)) => {
                    return Err("config sets both theta and theta_pi; keep one".to_string())
                }
                (Some(t), None) => t,
                (None, Some(m)) => m * pi,
                (None, None) => 0.5 * pi,
            },
        };
        let g_c = pick(self.gc, cfg, "gc")?.unwrap_or(1.0);
        SystemParams::new(gamma, theta, g_c).map_err(|e| e.to_string())
    }
}

// ---------------------------------------------------------------------------
// small output helpers

fn kv(key: &str, value: impl std::fmt::Display) {
    println!("{key} = {value}");
}

fn kvf(key: &str, x: f64) {
    kv(key, fmt_sig(x));
}

fn fmt_c(z: C64) -> String {
    format!("({}, {})", fmt_sig(z.re), fmt_sig(z.im))
}

fn print_params(cmd: &str, p: &SystemParams) {
    kv("command", cmd);
    kvf("gamma", p.gamma);
    kvf("theta", p.theta);
    kvf("g_c", p.g_c);
    kv("condition_class", p.classify(CLASSIFY_TOL));
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn manifest(cmd: &str, p: &SystemParams) -> RunManifest {
    let mut m = RunManifest::new(env!("CARGO_PKG_VERSION"));
    m.set("command", cmd);
    m.set_float("gamma", p.gamma);
    m.set_float("theta", p.theta);
    m.set_float("g_c", p.g_c);
    m.set("timestamp_unix", unix_now());
    m
}

fn write_manifest(m: &RunManifest, out: &Path) -> Result<(), String> {
    let path = m
        .write_alongside(out)
        .map_err(|e| format!("cannot write manifest next to {}: {e}", out.display()))?;
    kv("manifest", path.display());
    Ok(())
}

fn write_file(path: &Path, body: &str) -> Result<(), String> {
    std::fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// state name parsing

fn parse_state(name: &str, theta: f64) -> Result<QubitVector, String> {
    let key = name.to_ascii_lowercase().replace('_', "");
    Ok(match key.as_str() {
        "ee" => QubitVector::ee(),
        "eg" => QubitVector::eg(),
        "ge" => QubitVector::ge(),
        "gg" => QubitVector::gg(),
        "psil" | "psileft" => QubitVector::psi_left(theta),
        "psir" | "psiright" => QubitVector::psi_right(theta),
        "psi+" | "psip" | "psiplus" => QubitVector::psi_plus(),
        "psi-" | "psim" | "psiminus" => QubitVector::psi_minus(),
        "phi+" | "phip" | "phiplus" => QubitVector::phi_plus(),
        "phi-" | "phim" | "phiminus" => QubitVector::phi_minus(),
        _ => {
            return Err(format!(
                "unknown state {name:?}; known: ee, eg, ge, gg, psiL, psiR, psi+, psi-, phi+, phi-"
            ))
        }
    })
}

fn parse_ratio_state(name: &str) -> Result<RatioState, String> {
    let key = name.to_ascii_lowercase().replace('_', "");
    match key.as_str() {
        "eg" => Ok(RatioState::FirstExcited),
        "ge" => Ok(RatioState::SecondExcited),
        "psil" | "psileft" => Ok(RatioState::PsiLeft),
        "psir" | "psiright" => Ok(RatioState::PsiRight),
        _ => Err(format!(
            "state {name:?} has no closed-form ratio; known: eg, ge, psiL, psiR"
        )),
    }
}

fn parse_detection(name: &str) -> Result<Detection, String> {
    match name.to_ascii_lowercase().as_str() {
        "directional" | "dir" => Ok(Detection::Directional),
        "parity" | "par" => Ok(Detection::Parity),
        _ => Err(format!(
            "unknown detection {name:?}; known: directional, parity"
        )),
    }
}

fn label_key(l: ClickLabel) -> &'static str {
    match l {
        ClickLabel::Right => "R",
        ClickLabel::Left => "L",
        ClickLabel::Plus => "plus",
        ClickLabel::Minus => "minus",
    }
}

// ---------------------------------------------------------------------------
// rates

#[derive(Args)]
struct RatesArgs {
    #[command(flatten)]
    params: ParamArgs,
}

fn cmd_rates(a: RatesArgs) -> Result<(), String> {
    let cfg = a.params.cfg()?;
    let p = a.params.resolve(&cfg)?;
    let r = p.rates();
    print_params("rates", &p);
    kvf("gamma_plus", r.gamma_plus);
    kvf("gamma_minus", r.gamma_minus);
    kvf("delta", r.delta);
    kv("mu_plus", fmt_c(r.mu_plus));
    kv("mu_minus", fmt_c(r.mu_minus));
    Ok(())
}

// ---------------------------------------------------------------------------
// kraus

#[derive(Args)]
struct KrausArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Evolution time (units of 1/gamma when gamma = 1)
    #[arg(long)]
    t: Option<f64>,
}

fn cmd_kraus(a: KrausArgs) -> Result<(), String> {
    let cfg = a.params.cfg()?;
    let p = a.params.resolve(&cfg)?;
    let t = pick(a.t, &cfg, "t")?.unwrap_or(1.0);
    let k = wqed::ops::kraus(&p, t).map_err(|e| e.to_string())?;
    let r = p.rates();
    let e_plus = (-r.mu_plus * 0.5 * t).exp();
    let e_minus = (-r.mu_minus * 0.5 * t).exp();
    print_params("kraus", &p);
    kvf("t", t);
    kv("e_plus", fmt_c(e_plus));
    kv("e_minus", fmt_c(e_minus));
    kvf("survival_ee", k.0[0][0].norm_sqr());
    kvf("survival_psi_plus", e_plus.norm_sqr());
    kvf("survival_psi_minus", e_minus.norm_sqr());
    for i in 0..4 {
        for j in 0..4 {
            kv(&format!("k[{i}][{j}]"), fmt_c(k.0[i][j]));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// emit1

/// CSV columns: t, re_right, im_right, density_right, re_left, im_left,
/// density_left.
#[derive(Args)]
struct Emit1Args {
    #[command(flatten)]
    params: ParamArgs,

    /// Initial single-excitation state (eg, ge, psiL, psiR, psi+, psi-, ...)
    #[arg(long)]
    state: Option<String>,

    /// Sampling horizon for the waveform table
    #[arg(long)]
    tmax: Option<f64>,

    /// Number of sample times in [0, tmax]
    #[arg(long)]
    points: Option<usize>,

    /// Write the sampled waveform as CSV (with a .manifest companion)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_emit1(a: Emit1Args) -> Result<(), String> {
    let cfg = a.params.cfg()?;
    let p = a.params.resolve(&cfg)?;
    let state_name = pick(a.state, &cfg, "state")?.unwrap_or_else(|| "eg".to_string());
    let tmax = pick(a.tmax, &cfg, "tmax")?.unwrap_or(10.0 / p.gamma);
    let points = pick(a.points, &cfg, "points")?.unwrap_or(201);
    let out = match a.out {
        Some(o) => Some(o),
        None => cfg.str("out").map(PathBuf::from),
    };
    if points < 2 {
        return Err(format!("need at least 2 sample points, got {points}"));
    }
    if !(tmax > 0.0) || !tmax.is_finite() {
        return Err(format!("tmax must be positive and finite, got {tmax}"));
    }

    let initial = parse_state(&state_name, p.theta)?;
    let wf_r = photon_waveform(&p, &initial, Channel::Right).map_err(|e| e.to_string())?;
    let wf_l = photon_waveform(&p, &initial, Channel::Left).map_err(|e| e.to_string())?;
    let dir = emission_probabilities(&p, &initial).map_err(|e| e.to_string())?;

    print_params("emit1", &p);
    kv("state", &state_name);
    kvf("p_right", dir.p_right);
    kvf("p_left", dir.p_left);
    kvf("p_total", dir.total());
    kvf("r1", dir.ratio.value);
    kv("divergent", dir.ratio.divergent);

    if let Some(out) = out {
        let mut table = CsvTable::new([
            "t",
            "re_right",
            "im_right",
            "density_right",
            "re_left",
            "im_left",
            "density_left",
        ]);
        for i in 0..points {
            let t = tmax * i as f64 / (points - 1) as f64;
            let (vr, vl) = (wf_r.value(t), wf_l.value(t));
            table.push_row([
                fmt_sig(t),
                fmt_sig(vr.re),
                fmt_sig(vr.im),
                fmt_sig(vr.norm_sqr()),
                fmt_sig(vl.re),
                fmt_sig(vl.im),
                fmt_sig(vl.norm_sqr()),
            ]);
        }
        table
            .write(&out)
            .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
        kv("wrote", out.display());
        let mut m = manifest("emit1", &p);
        m.set("state", &state_name)
            .set_float("tmax", tmax)
            .set("points", points)
            .set("out", out.display());
        write_manifest(&m, &out)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// ratio1

#[derive(Args)]
struct Ratio1Args {
    #[command(flatten)]
    params: ParamArgs,

    /// Initial state with a closed-form ratio: eg, ge, psiL, psiR
    #[arg(long)]
    state: Option<String>,
}

fn cmd_ratio1(a: Ratio1Args) -> Result<(), String> {
    let cfg = a.params.cfg()?;
    let p = a.params.resolve(&cfg)?;
    let state_name = pick(a.state, &cfg, "state")?.unwrap_or_else(|| "eg".to_string());
    let which = parse_ratio_state(&state_name)?;
    let ratio = r1_closed(&p, which);
    let dir = emission_probabilities(&p, &which.vector(p.theta)).map_err(|e| e.to_string())?;
    print_params("ratio1", &p);
    kv("state", &state_name);
    kvf("p_right", dir.p_right);
    kvf("p_left", dir.p_left);
    kvf("r1", ratio.value);
    kv("divergent", ratio.divergent);
    Ok(())
}

// ---------------------------------------------------------------------------
// two-photon

#[derive(Args)]
struct TwoPhotonArgs {
    #[command(flatten)]
    params: ParamArgs,
}

fn cmd_two_photon(a: TwoPhotonArgs) -> Result<(), String> {
    let cfg = a.params.cfg()?;
    let p = a.params.resolve(&cfg)?;
    let rep = bunching_report(&p).map_err(|e| e.to_string())?;
    print_params("two-photon", &p);
    kvf("P_RR", rep.p_rr);
    kvf("P_LL", rep.p_ll);
    kvf("P_RL", rep.p_rl);
    kvf("P_LR", rep.p_lr);
    kvf("p_parallel", rep.p_parallel);
    kvf("p_antiparallel", rep.p_antiparallel);
    kvf("r2_oracle", rep.r2.unwrap_or(f64::NAN));
    kvf("r2_printed", rep.r2_printed);
    kv("partial_decay", rep.partial_decay);
    Ok(())
}

// ---------------------------------------------------------------------------
// noon

#[derive(Args)]
struct NoonArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Evolution time since the pair started decaying
    #[arg(long)]
    t: Option<f64>,

    /// Evaluate even away from a controlled antiresonance
    #[arg(long)]
    force: bool,
}

fn cmd_noon(a: NoonArgs) -> Result<(), String> {
    let cfg = a.params.cfg()?;
    let p = a.params.resolve(&cfg)?;
    let t = pick(a.t, &cfg, "t")?.unwrap_or(1.0);
    let force = a.force || cfg.flag("force")?;
    let class = p.classify(CLASSIFY_TOL);
    if !matches!(class, ConditionClass::ControlledAntiresonance { .. }) && !force {
        return Err(format!(
            "the path-entangled pair needs a controlled antiresonance; \
             this point classifies as `{class}` (pass --force to evaluate anyway)"
        ));
    }
    let modes = default_modes(p.gamma);
    let f = noon_fidelity(&p, t, (&modes.0, &modes.1)).map_err(|e| e.to_string())?;
    print_params("noon", &p);
    kvf("t", t);
    kvf("gamma_t", p.gamma * t);
    kvf("F", f);
    kvf("F_ideal", noon_fidelity_ideal(p.gamma, t));
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

/// CSV columns: theta, g_c, then the requested quantities in the order
/// given (default: r1_eg, r1_psiL, r2_oracle, r2_printed, P_RR, P_LL, P_RL,
/// P_LR, gamma_plus, gamma_minus, delta, condition_class).
#[derive(Args)]
struct SweepArgs {
    /// Single-emitter decay rate
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,

    /// Phase axis start (radians)
    #[arg(long, allow_hyphen_values = true)]
    theta_start: Option<f64>,

    /// Phase axis stop (radians)
    #[arg(long, allow_hyphen_values = true)]
    theta_stop: Option<f64>,

    /// Number of phase grid points
    #[arg(long)]
    theta_count: Option<usize>,

    /// Coupling-control axis start
    #[arg(long, allow_hyphen_values = true)]
    gc_start: Option<f64>,

    /// Coupling-control axis stop
    #[arg(long, allow_hyphen_values = true)]
    gc_stop: Option<f64>,

    /// Number of coupling grid points
    #[arg(long)]
    gc_count: Option<usize>,

    /// Comma-separated quantity list (default: all)
    #[arg(long)]
    quantities: Option<String>,

    /// Output CSV path (required; a .manifest is written next to it)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Flat `key = value` file merged under the flags (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
}

fn cmd_sweep(a: SweepArgs) -> Result<(), String> {
    let cfg = Cfg::load(a.config.as_deref())?;
    let tau = 2.0 * std::f64::consts::PI;
    let gamma = pick(a.gamma, &cfg, "gamma")?.unwrap_or(1.0);
    let theta = GridAxis::new(
        pick(a.theta_start, &cfg, "theta_start")?.unwrap_or(0.0),
        pick(a.theta_stop, &cfg, "theta_stop")?.unwrap_or(tau),
        pick(a.theta_count, &cfg, "theta_count")?.unwrap_or(101),
    )
    .map_err(|e| e.to_string())?;
    let g_c = GridAxis::new(
        pick(a.gc_start, &cfg, "gc_start")?.unwrap_or(-2.0),
        pick(a.gc_stop, &cfg, "gc_stop")?.unwrap_or(2.0),
        pick(a.gc_count, &cfg, "gc_count")?.unwrap_or(81),
    )
    .map_err(|e| e.to_string())?;
    let quantities = match pick(a.quantities, &cfg, "quantities")? {
        None => Quantity::ALL.to_vec(),
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Quantity::parse)
            .collect::<wqed::error::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?,
    };
    let out = match a.out {
        Some(o) => o,
        None => cfg
            .str("out")
            .map(PathBuf::from)
            .ok_or("sweep needs --out <file.csv>")?,
    };

    let spec = SweepSpec::new(gamma, theta, g_c, quantities).map_err(|e| e.to_string())?;
    let result = run_sweep(&spec).map_err(|e| e.to_string())?;
    let table = result.to_csv();
    table
        .write(&out)
        .map_err(|e| format!("cannot write {}: {e}", out.display()))?;

    kv("command", "sweep");
    kvf("gamma", gamma);
    kv("rows", table.n_rows());
    kv("wrote", out.display());

    let mut m = RunManifest::new(env!("CARGO_PKG_VERSION"));
    m.set("command", "sweep")
        .set_float("gamma", gamma)
        .set_float("theta_start", theta.start)
        .set_float("theta_stop", theta.stop)
        .set("theta_count", theta.count)
        .set_float("gc_start", g_c.start)
        .set_float("gc_stop", g_c.stop)
        .set("gc_count", g_c.count)
        .set(
            "quantities",
            spec.quantities
                .iter()
                .map(|q| q.column())
                .collect::<Vec<_>>()
                .join(","),
        )
        .set("rows", table.n_rows())
        .set("out", out.display())
        .set("timestamp_unix", unix_now());
    write_manifest(&m, &out)
}

// ---------------------------------------------------------------------------
// trajectories

/// Statistics print as `key = value` and are byte-identical for the same
/// (seed, n). Optional --dump writes one line per trajectory:
/// `traj=<i> n_clicks=<k> t1=<time> ch1=<label> [t2=... ch2=...]`.
#[derive(Args)]
struct TrajArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Number of trajectories
    #[arg(long)]
    n: Option<usize>,

    /// Master seed; same (seed, n) reproduces the statistics exactly
    #[arg(long)]
    seed: Option<u64>,

    /// Time step (gamma * dt must stay at or below 1e-2)
    #[arg(long)]
    dt: Option<f64>,

    /// Simulation horizon per trajectory
    #[arg(long)]
    tmax: Option<f64>,

    /// Initial state (default ee)
    #[arg(long)]
    state: Option<String>,

    /// Detection basis: directional (R/L) or parity (+/-)
    #[arg(long)]
    detection: Option<String>,

    /// Freeze the conditional state after the first click
    #[arg(long)]
    freeze: bool,

    /// Write the statistics block to this file too (plus .manifest)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write one structured text record per trajectory (plus .manifest)
    #[arg(long)]
    dump: Option<PathBuf>,
}

fn cmd_trajectories(a: TrajArgs) -> Result<(), String> {
    let cfg = a.params.cfg()?;
    let p = a.params.resolve(&cfg)?;
    let n = pick(a.n, &cfg, "n")?.unwrap_or(10_000);
    let seed = pick(a.seed, &cfg, "seed")?.unwrap_or(1);
    let dt = pick(a.dt, &cfg, "dt")?.unwrap_or(1e-3 / p.gamma);
    let tmax = pick(a.tmax, &cfg, "tmax")?.unwrap_or(20.0 / p.gamma);
    let state_name = pick(a.state, &cfg, "state")?.unwrap_or_else(|| "ee".to_string());
    let detection = parse_detection(
        &pick(a.detection, &cfg, "detection")?.unwrap_or_else(|| "directional".to_string()),
    )?;
    let freeze = a.freeze || cfg.flag("freeze")?;
    let out = match a.out {
        Some(o) => Some(o),
        None => cfg.str("out").map(PathBuf::from),
    };

    let initial = parse_state(&state_name, p.theta)?;
    let config = TrajectoryConfig::new(dt, tmax)
        .map_err(|e| e.to_string())?
        .with_detection(detection)
        .with_freeze_after_first_click(freeze);
    let stats = herald_statistics(&p, &initial, &config, n, seed).map_err(|e| e.to_string())?;

    let labels = stats.labels;
    let keys = [label_key(labels[0]), label_key(labels[1])];
    let det_name = match detection {
        Detection::Directional => "directional",
        Detection::Parity => "parity",
    };

    let mut block = String::new();
    let mut push = |k: &str, v: String| {
        let _ = writeln!(block, "{k} = {v}");
    };
    push("command", "trajectories".to_string());
    push("gamma", fmt_sig(p.gamma));
    push("theta", fmt_sig(p.theta));
    push("g_c", fmt_sig(p.g_c));
    push("condition_class", p.classify(CLASSIFY_TOL).to_string());
    push("initial", state_name.clone());
    push("detection", det_name.to_string());
    push("dt", fmt_sig(dt));
    push("t_max", fmt_sig(tmax));
    push("freeze_after_first_click", freeze.to_string());
    push("n", n.to_string());
    push("seed", seed.to_string());
    push("no_click_fraction", fmt_sig(stats.no_click_fraction));
    push("n_first_clicks", stats.n_first_clicks.to_string());
    push("first_click_mean", fmt_sig(stats.first_click_mean));
    push("first_click_se", fmt_sig(stats.first_click_se));
    for ch in 0..2 {
        push(
            &format!("count_{}", keys[ch]),
            stats.channel_counts[ch].to_string(),
        );
    }
    for ch in 0..2 {
        push(
            &format!("freq_{}", keys[ch]),
            fmt_sig(stats.channel_frequencies[ch]),
        );
    }
    const HERALD_BASIS: [&str; 4] = ["psi_plus", "psi_minus", "phi_plus", "phi_minus"];
    for ch in 0..2 {
        for (b, name) in HERALD_BASIS.iter().enumerate() {
            push(
                &format!("herald_{}_{name}", keys[ch]),
                fmt_sig(stats.herald_fidelity[ch][b]),
            );
        }
    }
    push("n_second_clicks", stats.n_second_clicks.to_string());
    push("second_click_mean", fmt_sig(stats.second_click_mean));
    push("second_click_se", fmt_sig(stats.second_click_se));
    // ordered (first, second) channel pairs: (0,0), (1,1), (0,1), (1,0)
    let pair_order = [(0, 0), (1, 1), (0, 1), (1, 0)];
    for (slot, (i, j)) in pair_order.into_iter().enumerate() {
        push(
            &format!("pairs_{}_{}", keys[i], keys[j]),
            stats.pair_counts[slot].to_string(),
        );
    }
    print!("{block}");

    let mut base = manifest("trajectories", &p);
    base.set("initial", &state_name)
        .set("detection", det_name)
        .set_float("dt", dt)
        .set_float("t_max", tmax)
        .set("freeze_after_first_click", freeze)
        .set("n", n)
        .set("seed", seed);

    if let Some(out) = out {
        write_file(&out, &block)?;
        kv("wrote", out.display());
        let mut m = base.clone();
        m.set("out", out.display());
        write_manifest(&m, &out)?;
    }

    if let Some(dump) = a.dump.or_else(|| cfg.str("dump").map(PathBuf::from)) {
        let mut body = String::new();
        for i in 0..n {
            let rec = sample_trajectory(&p, &initial, &config, seed, i as u64)
                .map_err(|e| e.to_string())?;
            let _ = write!(body, "traj={i} n_clicks={}", rec.clicks.len());
            for (k, c) in rec.clicks.iter().enumerate() {
                let _ = write!(body, " t{}={} ch{}={}", k + 1, fmt_sig(c.time), k + 1, c.label);
            }
            body.push('\n');
        }
        write_file(&dump, &body)?;
        kv("dumped", dump.display());
        let mut m = base;
        m.set("dump", dump.display());
        write_manifest(&m, &dump)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// validate

/// Runs the time-bin simulator at each --dt (repeatable) and compares the
/// one-photon waveform against the closed form; consecutive dt pairs give
/// the error ratio and the measured convergence order (first-order scheme:
/// halving dt should halve the error, order about 1).
#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Bin width; repeat the flag to compare several (default 1e-3, 5e-4)
    #[arg(long = "dt")]
    dt: Vec<f64>,

    /// Initial single-excitation state for the waveform comparison
    #[arg(long)]
    state: Option<String>,

    /// Simulation horizon
    #[arg(long)]
    tmax: Option<f64>,
}

fn cmd_validate(a: ValidateArgs) -> Result<(), String> {
    let cfg = a.params.cfg()?;
    let p = a.params.resolve(&cfg)?;
    let state_name = pick(a.state, &cfg, "state")?.unwrap_or_else(|| "eg".to_string());
    let tmax = pick(a.tmax, &cfg, "tmax")?.unwrap_or(10.0 / p.gamma);
    let mut dts = if a.dt.is_empty() {
        match cfg.parse::<f64>("dt")? {
            Some(d) => vec![d],
            None => vec![1e-3 / p.gamma, 5e-4 / p.gamma],
        }
    } else {
        a.dt.clone()
    };
    dts.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    dts.dedup();

    let initial = parse_state(&state_name, p.theta)?;
    print_params("validate", &p);
    kv("state", &state_name);
    kvf("t_max", tmax);
    kv("n_dt", dts.len());

    let mut l2 = Vec::with_capacity(dts.len());
    for (i, &dt) in dts.iter().enumerate() {
        let tag = i + 1;
        let bu = build_bin_unitary(&p, dt).map_err(|e| e.to_string())?;
        let config = BinConfig::from_horizon(dt, tmax).map_err(|e| e.to_string())?;
        let err = one_photon_error(&p, &initial, config).map_err(|e| e.to_string())?;
        kvf(&format!("dt_{tag}"), dt);
        kvf(&format!("unitarity_defect_{tag}"), bu.unitarity_defect());
        kvf(&format!("excitation_leak_{tag}"), bu.excitation_leak());
        kvf(&format!("l2_error_{tag}"), err.l2);
        kvf(&format!("max_error_{tag}"), err.max_abs);
        l2.push(err.l2);
    }
    for i in 0..dts.len().saturating_sub(1) {
        let ratio = l2[i] / l2[i + 1];
        let order = ratio.ln() / (dts[i] / dts[i + 1]).ln();
        kvf(&format!("error_ratio_{}_{}", i + 1, i + 2), ratio);
        kvf(&format!("convergence_order_{}_{}", i + 1, i + 2), order);
    }
    Ok(())
}
