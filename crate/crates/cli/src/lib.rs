//! The `dscone` command-line front end.
//!
//! [`run`] parses the arguments, executes one subcommand and returns the
//! exit code with a single JSON report. Exit codes: 0 the property holds,
//! 1 it fails with a certificate, 2 inconclusive, 64 usage or parse error.

pub mod acceptance;
pub mod certify;

use clap::{Parser, Subcommand, ValueEnum};
use cones::{cp_decompose, is_mom, qubit_separability, ConeStatus, ConeVerdict, CpOptions};
use dsmatrix::DSMatrix;
use hierarchy::{ds_extendibility, mom_ext_feasible, nn_ext_feasible, pnn_member, rsos_member, HierarchyStatus};
use numkernel::NumericContext;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use soscone::{is_sos_tensor, structured_sos_level, SosStatus};
use std::path::{Path, PathBuf};
use std::time::Instant;
use symtensor::SymTensor;
use witnesslib::{detect, library, qutrit3_search, Witness, WitnessJson};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable naming a NumericContext JSON file.
pub const CONFIG_ENV: &str = "DSCONE_CONFIG";

/// Highest hierarchy level accepted without `--max-level`.
pub const DEFAULT_MAX_LEVEL: u32 = 4;

#[derive(Parser, Debug)]
#[command(name = "dscone", version, about = "Certified cone membership tests for mixtures of Dicke states")]
struct Cli {
    /// NumericContext JSON file; overrides the environment variable.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized routines; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Record wall-clock time per check (makes reports non-reproducible).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// λ, Q and W parametrizations of a DS state, with its validity.
    Param {
        #[arg(long)]
        input: PathBuf,
    },
    /// PPT test across every bipartition up to `level` legs.
    Ppt {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to ⌊n/2⌋, which covers every bipartition.
        #[arg(long)]
        level: Option<u32>,
    },
    /// Separability: exact for qubits, otherwise PPT, library witnesses and
    /// a completely positive decomposition.
    Sep {
        #[arg(long)]
        input: PathBuf,
    },
    /// Witness library commands.
    Witness {
        #[command(subcommand)]
        action: WitnessAction,
    },
    /// SOS test of `p_T(x⊙x)`, or of a structured level with `--level`.
    Sos {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        level: Option<u32>,
    },
    /// Membership in a level of a hierarchy.
    Hierarchy {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
        max_level: u32,
    },
    /// Bosonic extendibility, PPT bosonic with `--ppt`.
    Extend {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        ppt: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
        max_level: u32,
    },
    /// Marginal after tracing out `traced` parties.
    Marginal {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        traced: u32,
    },
    /// Reproduction runs.
    Repro {
        #[command(subcommand)]
        target: ReproTarget,
    },
    /// Witness data integrity followed by the acceptance criteria.
    Selftest {
        /// Witness library JSON (an array of witnesses) used instead of the
        /// built-in one.
        #[arg(long)]
        library: Option<PathBuf>,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum WitnessAction {
    /// Every shipped witness as SymTensor JSON with its provenance.
    List,
    /// Pairs a state with a named witness. The check holds when the pairing
    /// is at least `−eps_witness` and fails with the pairing as certificate
    /// otherwise.
    Detect {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        witness: String,
    },
}

#[derive(Subcommand, Debug)]
enum ReproTarget {
    /// The PPT entangled three-qutrit state detected by the Robinson witness.
    Qutrit3,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Rsos,
    Pnn,
    Nnext,
    Momext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum CheckStatus {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    status: CheckStatus,
    verdict: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Report {
    tool: &'static str,
    version: &'static str,
    command: String,
    input_digest: Option<String>,
    seed: u64,
    context: NumericContext,
    checks: Vec<Check>,
    exit_code: i32,
}

#[derive(Debug, Serialize)]
struct ErrorReport {
    tool: &'static str,
    version: &'static str,
    error: String,
    exit_code: i32,
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

/// Check collection with optional timing.
struct Runner {
    timings: bool,
    checks: Vec<Check>,
    inputs: Vec<u8>,
    read_any: bool,
}

impl Runner {
    fn read(&mut self, path: &Path) -> Result<String, Usage> {
        let bytes = std::fs::read(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        self.inputs.extend_from_slice(&(bytes.len() as u64).to_le_bytes());
        self.inputs.extend_from_slice(&bytes);
        self.read_any = true;
        String::from_utf8(bytes).map_err(|e| Usage(format!("{}: {e}", path.display())))
    }

    fn state(&mut self, path: &Path) -> Result<DSMatrix, Usage> {
        let text = self.read(path)?;
        DSMatrix::from_json_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))
    }

    fn tensor(&mut self, path: &Path) -> Result<SymTensor, Usage> {
        let text = self.read(path)?;
        SymTensor::from_json_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))
    }

    fn check<F>(&mut self, name: impl Into<String>, f: F) -> Result<(), Usage>
    where
        F: FnOnce() -> Result<(CheckStatus, Value), Usage>,
    {
        let start = Instant::now();
        let (status, verdict) = f()?;
        let wall_time_ms = self.timings.then(|| start.elapsed().as_secs_f64() * 1e3);
        self.checks.push(Check { name: name.into(), status, verdict, wall_time_ms });
        Ok(())
    }
}

fn cone_status(s: ConeStatus) -> CheckStatus {
    match s {
        ConeStatus::Member => CheckStatus::Holds,
        ConeStatus::NonMember => CheckStatus::Fails,
        ConeStatus::Inconclusive => CheckStatus::Inconclusive,
    }
}

fn hierarchy_status(s: HierarchyStatus) -> CheckStatus {
    match s {
        HierarchyStatus::Member => CheckStatus::Holds,
        HierarchyStatus::NonMember => CheckStatus::Fails,
        HierarchyStatus::Inconclusive => CheckStatus::Inconclusive,
    }
}

fn sos_status(s: SosStatus) -> CheckStatus {
    match s {
        SosStatus::Sos => CheckStatus::Holds,
        SosStatus::NotSos => CheckStatus::Fails,
        SosStatus::Inconclusive => CheckStatus::Inconclusive,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("verdicts serialize")
}

fn load_context(cli: &Cli) -> Result<NumericContext, Usage> {
    let path = cli.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut ctx = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", p.display())))?
        }
        None => NumericContext::default(),
    };
    if let Some(seed) = cli.seed {
        ctx.seed = seed;
    }
    Ok(ctx)
}

/// The verdict of a witness pairing, with the witness embedded so the
/// certificate can be checked from the state alone.
fn pairing_verdict(w: &Witness, pairing: f64, entangled: bool) -> Value {
    json!({
        "witness_name": w.name,
        "entangled": entangled,
        "certificate": {
            "kind": "pairing",
            "witness": w.tensor.to_json(),
            "pairing": pairing,
        },
    })
}

fn load_library(runner: &mut Runner, path: Option<&Path>) -> Result<Vec<Witness>, Usage> {
    match path {
        None => Ok(library()),
        Some(p) => {
            let text = runner.read(p)?;
            let docs: Vec<WitnessJson> =
                serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
            docs.iter().map(|d| d.to_witness().map_err(Usage::from)).collect()
        }
    }
}

fn param(runner: &mut Runner, input: &Path) -> Result<(), Usage> {
    let x = runner.state(input)?;
    runner.check("param", || {
        let q = x.q_view();
        let negative = q.iter().filter(|(_, v)| *v < 0.0).min_by(|a, b| a.1.total_cmp(&b.1));
        let status = if negative.is_some() { CheckStatus::Fails } else { CheckStatus::Holds };
        let mut verdict = json!({
            "n": x.order(),
            "d": x.dim(),
            "trace": x.trace(),
            "rank": x.rank(),
            "lambda": x.lambda().to_json(),
            "q": q.to_json(),
            "w": x.w_view().to_json(),
        });
        if let Some((alpha, value)) = negative {
            verdict["certificate"] = json!({"kind": "negative_entry", "alpha": alpha, "value": value});
        }
        Ok((status, verdict))
    })
}

fn ppt(runner: &mut Runner, input: &Path, level: Option<u32>, ctx: &NumericContext) -> Result<(), Usage> {
    let x = runner.state(input)?;
    let k = level.unwrap_or(x.order() / 2);
    if k > x.order() / 2 {
        return Err(Usage(format!("level {k} exceeds ⌊n/2⌋ = {}", x.order() / 2)));
    }
    runner.check(format!("ppt(k={k})"), || {
        let v = is_mom(&x.q_view(), k, ctx.eps_psd)?;
        Ok((cone_status(v.status), to_value(&v)))
    })
}

fn sep(runner: &mut Runner, input: &Path, ctx: &NumericContext) -> Result<(), Usage> {
    let x = runner.state(input)?;
    let q = x.q_view();
    if x.dim() == 2 {
        return runner.check("qubit_separability", || {
            let v = qubit_separability(&q, ctx.eps_psd)?;
            Ok((cone_status(v.status), to_value(&v)))
        });
    }
    let mom = is_mom(&q, x.order() / 2, ctx.eps_psd)?;
    let failed_ppt = mom.is_non_member();
    runner.check("ppt", || Ok((cone_status(mom.status), to_value(&mom))))?;
    if failed_ppt {
        return Ok(());
    }
    let mut detected = false;
    for w in library().iter().filter(|w| w.copositive == Some(true) && w.order() == x.order() && w.dim() == x.dim()) {
        let det = detect(&x, w, ctx)?;
        detected |= det.entangled;
        let status = if det.entangled { CheckStatus::Fails } else { CheckStatus::Holds };
        runner.check(format!("witness:{}", w.name), || Ok((status, pairing_verdict(w, det.pairing, det.entangled))))?;
    }
    if detected {
        return Ok(());
    }
    runner.check("cp_decomposition", || {
        let v = cp_decompose(&q, &CpOptions::for_tensor(&q, ctx));
        Ok((cone_status(v.status), to_value(&v)))
    })
}

fn witness_list(runner: &mut Runner) -> Result<(), Usage> {
    for w in library() {
        runner.check(format!("witness:{}", w.name), || Ok((CheckStatus::Holds, to_value(&w.to_json()))))?;
    }
    Ok(())
}

fn witness_detect(runner: &mut Runner, state: &Path, name: &str, ctx: &NumericContext) -> Result<(), Usage> {
    let x = runner.state(state)?;
    let w = library()
        .into_iter()
        .find(|w| w.name == name)
        .ok_or_else(|| Usage(format!("unknown witness {name}; see `witness list`")))?;
    let det = detect(&x, &w, ctx)?;
    let status = if det.entangled { CheckStatus::Fails } else { CheckStatus::Holds };
    runner.check(format!("witness:{name}"), || Ok((status, pairing_verdict(&w, det.pairing, det.entangled))))
}

fn sos(runner: &mut Runner, input: &Path, level: Option<u32>, ctx: &NumericContext) -> Result<(), Usage> {
    let t = runner.tensor(input)?;
    let name = level.map_or("sos".to_string(), |l| format!("sos(l={l})"));
    runner.check(name, || {
        let v = match level {
            Some(l) => structured_sos_level(&t, l, ctx)?,
            None => is_sos_tensor(&t, ctx)?,
        };
        Ok((sos_status(v.status), to_value(&v)))
    })
}

fn check_level(level: u32, max_level: u32) -> Result<(), Usage> {
    if level > max_level {
        return Err(Usage(format!("level {level} exceeds the cap {max_level}; pass --max-level to raise it")));
    }
    Ok(())
}

fn hierarchy_cmd(
    runner: &mut Runner,
    family: FamilyArg,
    level: u32,
    input: &Path,
    max_level: u32,
    ctx: &NumericContext,
) -> Result<(), Usage> {
    check_level(level, max_level)?;
    let v = match family {
        FamilyArg::Rsos => rsos_member(&runner.tensor(input)?, level, ctx)?,
        FamilyArg::Pnn => pnn_member(&runner.tensor(input)?, level, ctx),
        FamilyArg::Nnext => nn_ext_feasible(&runner.state(input)?.q_view(), level, ctx),
        FamilyArg::Momext => mom_ext_feasible(&runner.state(input)?.q_view(), level, ctx)?,
    };
    runner.check(format!("{}(r={level})", v.family), || Ok((hierarchy_status(v.status), to_value(&v))))
}

fn extend(runner: &mut Runner, input: &Path, level: u32, ppt: bool, max_level: u32, ctx: &NumericContext) -> Result<(), Usage> {
    check_level(level, max_level)?;
    let x = runner.state(input)?;
    let name = if ppt { "ppt_bosonic_extension" } else { "bosonic_extension" };
    runner.check(format!("{name}(r={level})"), || {
        let v = ds_extendibility(&x, level, ppt, ctx)?;
        Ok((hierarchy_status(v.status), to_value(&v)))
    })
}

fn marginal(runner: &mut Runner, input: &Path, traced: u32) -> Result<(), Usage> {
    let x = runner.state(input)?;
    runner.check(format!("marginal(traced={traced})"), || {
        let m = x.marginal(traced)?;
        Ok((CheckStatus::Holds, json!({"marginal": m.to_json(), "trace": m.trace()})))
    })
}

fn repro_qutrit3(runner: &mut Runner, ctx: &NumericContext) -> Result<(), Usage> {
    let res = qutrit3_search();
    let mom: ConeVerdict = is_mom(&res.state.q_view(), 1, ctx.eps_psd)?;
    let robinson = library().into_iter().find(|w| w.name == "robinson").expect("shipped witness");
    let det = detect(&res.state, &robinson, ctx)?;
    runner.check("qutrit3_optimum", || {
        let holds = (-0.03..=-0.015).contains(&res.eta) && res.state.lambda().values().iter().all(|&l| l >= 0.0);
        let status = if holds { CheckStatus::Holds } else { CheckStatus::Fails };
        Ok((
            status,
            json!({
                "eta": res.eta,
                "p": res.p,
                "q": res.q,
                "r": res.r,
                "trace": res.state.trace(),
                "grid_points": res.grid_points,
                "refinement_steps": res.refinement_steps,
                "state": res.state.to_json(),
            }),
        ))
    })?;
    runner.check("ppt(k=1)", || Ok((cone_status(mom.status), to_value(&mom))))?;
    runner.check("detected_by_robinson", || {
        let status = if det.entangled { CheckStatus::Holds } else { CheckStatus::Fails };
        Ok((status, to_value(&det)))
    })
}

fn selftest(runner: &mut Runner, path: Option<&Path>, only: &[u32], ctx: &NumericContext) -> Result<(), Usage> {
    let lib = load_library(runner, path)?;
    runner.check("library_integrity", || {
        Ok(match acceptance::library_integrity(&lib) {
            Ok(()) => (CheckStatus::Holds, json!({"witnesses": lib.len()})),
            Err(e) => (CheckStatus::Fails, json!({"invariant": e})),
        })
    })?;
    for (id, name) in acceptance::CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        runner.check(format!("criterion {id}: {name}"), || {
            let r = acceptance::run_criterion(id, ctx, &lib);
            let status = if r.passed { CheckStatus::Holds } else { CheckStatus::Fails };
            Ok((status, to_value(&r)))
        })?;
    }
    Ok(())
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Param { .. } => "param".into(),
        Command::Ppt { .. } => "ppt".into(),
        Command::Sep { .. } => "sep".into(),
        Command::Witness { action: WitnessAction::List } => "witness list".into(),
        Command::Witness { action: WitnessAction::Detect { .. } } => "witness detect".into(),
        Command::Sos { .. } => "sos".into(),
        Command::Hierarchy { family, .. } => format!("hierarchy {}", format!("{family:?}").to_lowercase()),
        Command::Extend { .. } => "extend".into(),
        Command::Marginal { .. } => "marginal".into(),
        Command::Repro { target: ReproTarget::Qutrit3 } => "repro qutrit3".into(),
        Command::Selftest { .. } => "selftest".into(),
    }
}

fn dispatch(cli: &Cli, runner: &mut Runner, ctx: &NumericContext) -> Result<(), Usage> {
    match &cli.command {
        Command::Param { input } => param(runner, input),
        Command::Ppt { input, level } => ppt(runner, input, *level, ctx),
        Command::Sep { input } => sep(runner, input, ctx),
        Command::Witness { action: WitnessAction::List } => witness_list(runner),
        Command::Witness { action: WitnessAction::Detect { state, witness } } => {
            witness_detect(runner, state, witness, ctx)
        }
        Command::Sos { input, level } => sos(runner, input, *level, ctx),
        Command::Hierarchy { family, level, input, max_level } => {
            hierarchy_cmd(runner, *family, *level, input, *max_level, ctx)
        }
        Command::Extend { input, level, ppt, max_level } => extend(runner, input, *level, *ppt, *max_level, ctx),
        Command::Marginal { input, traced } => marginal(runner, input, *traced),
        Command::Repro { target: ReproTarget::Qutrit3 } => repro_qutrit3(runner, ctx),
        Command::Selftest { library, only } => selftest(runner, library.as_deref(), only, ctx),
    }
}

fn usage_report(msg: String) -> (i32, String) {
    let report = ErrorReport { tool: "dscone", version: env!("CARGO_PKG_VERSION"), error: msg, exit_code: EXIT_USAGE };
    (EXIT_USAGE, serde_json::to_string_pretty(&report).expect("report serializes"))
}

/// Runs one invocation; `argv[0]` is the program name. Returns the exit
/// code and the report (help and version text for those flags).
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (EXIT_HOLDS, e.to_string()),
                _ => usage_report(e.to_string()),
            };
        }
    };
    let ctx = match load_context(&cli) {
        Ok(c) => c,
        Err(Usage(msg)) => return usage_report(msg),
    };
    let mut runner = Runner { timings: cli.timings, checks: Vec::new(), inputs: Vec::new(), read_any: false };
    if let Err(Usage(msg)) = dispatch(&cli, &mut runner, &ctx) {
        return usage_report(msg);
    }
    let statuses: Vec<CheckStatus> = runner.checks.iter().map(|c| c.status).collect();
    let exit_code = if statuses.contains(&CheckStatus::Fails) {
        EXIT_FAILS
    } else if statuses.contains(&CheckStatus::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_HOLDS
    };
    let input_digest = runner.read_any.then(|| hex::encode(Sha256::digest(&runner.inputs)));
    let report = Report {
        tool: "dscone",
        version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command),
        input_digest,
        seed: ctx.seed,
        context: ctx,
        checks: runner.checks,
        exit_code,
    };
    (exit_code, serde_json::to_string_pretty(&report).expect("report serializes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        let (code, out) = run(["dscone", "frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["exit_code"], 64);
    }

    #[test]
    fn level_cap_is_enforced() {
        assert!(check_level(4, DEFAULT_MAX_LEVEL).is_ok());
        assert!(check_level(5, DEFAULT_MAX_LEVEL).is_err());
        assert!(check_level(5, 6).is_ok());
    }

    #[test]
    fn witness_list_holds() {
        let (code, out) = run(["dscone", "witness", "list"]);
        assert_eq!(code, EXIT_HOLDS);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["input_digest"].is_null());
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["verdict"]["provenance"].is_string()));
    }
}
