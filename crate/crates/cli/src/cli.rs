//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use photon_subset::applications::{
    bloch_of_random_photon, projector_expectation_product, reduced_purity_direct, reduced_purity_formula, stokes,
};
use photon_subset::correlations::{correlation_table, expectation, CorrelationIndex};
use photon_subset::linear_optics::apply_unitary;
use photon_subset::loss::{loss_fixed_n_decomposition, loss_general_decomposition, loss_kraus, Transmission};
use photon_subset::removal::remove_k;
use photon_subset::subset::{random_subset, subset_weights, SubsetMethod};
use photon_subset::{BeamState, OccupationVector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::{self, read_with_digest};
use crate::random::{random_state, StateKind};
use crate::verify::{run_suite, Bound, Check, Suite, VerifyOptions, DEFAULT_SEED};
use crate::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "photon-subset",
    version,
    about = "Photon subsets, removal and loss on sparse multimode Fock states"
)]
struct Cli {
    /// Also write a JSON run report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// State JSON to read.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the result; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Hermiticity tolerance for the input state.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SubsetArg {
    Direct,
    Convex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LossArg {
    Kraus,
    #[value(name = "fixedN", alias = "fixed-n")]
    FixedN,
    General,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProjectArg {
    Series,
    Direct,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Remove photons without regard to mode.
    Reduce {
        #[command(flatten)]
        io: InputArgs,
        /// Number of photons to remove.
        #[arg(long, default_value_t = 1)]
        remove: u32,
        /// Renormalize the retained state to unit trace.
        #[arg(long)]
        normalize: bool,
    },
    /// State of q photons picked at random from the beam.
    Subset {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value = "direct")]
        method: SubsetArg,
    },
    /// Normally ordered correlations.
    Correlate {
        #[command(flatten)]
        io: InputArgs,
        /// Creation exponents, e.g. "2,0".
        #[arg(long, requires = "l", conflicts_with = "all_order")]
        k: Option<String>,
        /// Annihilation exponents, e.g. "1,1".
        #[arg(long, requires = "k")]
        l: Option<String>,
        /// Print every balanced correlation of this order as CSV.
        #[arg(long = "all-order", required_unless_present = "k")]
        all_order: Option<u32>,
    },
    /// Uniform beam-splitter loss.
    Loss {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long)]
        eta: f64,
        #[arg(long, value_enum, default_value = "kraus")]
        method: LossArg,
    },
    /// Passive linear optical network.
    Transform {
        #[command(flatten)]
        io: InputArgs,
        /// Unitary JSON: {"re": [[..]], "im": [[..]]}.
        #[arg(long)]
        unitary: PathBuf,
    },
    /// Purity of a q-photon reduction of a pure fixed-N state.
    Purity {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long)]
        q: u32,
    },
    /// Stokes parameters and the Bloch vector of one random photon.
    Stokes {
        #[command(flatten)]
        io: InputArgs,
    },
    /// Photon-number projector expectation.
    Project {
        #[command(flatten)]
        io: InputArgs,
        /// Occupation per mode, e.g. "2" or "1,0".
        #[arg(long)]
        m: String,
        #[arg(long, value_enum, default_value = "series")]
        method: ProjectArg,
    },
    /// Seeded random state from the test families.
    Random {
        #[arg(long)]
        modes: usize,
        #[arg(long = "max-photons")]
        max_photons: u32,
        #[arg(long, value_enum, default_value = "mixed")]
        kind: StateKind,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run property suites and print a report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Single transmission for the loss suites.
        #[arg(long)]
        eta: Option<f64>,
        /// Single subset size for the uniqueness search.
        #[arg(long)]
        q: Option<u32>,
        /// Replaces every suite tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn example(subcommand: Option<&str>) -> &'static str {
    match subcommand {
        Some("reduce") => "photon-subset reduce --input noon.json --remove 1",
        Some("subset") => "photon-subset subset --input state.json --q 2 --method direct",
        Some("correlate") => "photon-subset correlate --input state.json --k 2,0 --l 1,1",
        Some("loss") => "photon-subset loss --input state.json --eta 0.5 --method kraus",
        Some("transform") => "photon-subset transform --input state.json --unitary U.json",
        Some("purity") => "photon-subset purity --input state.json --q 1",
        Some("stokes") => "photon-subset stokes --input state.json",
        Some("project") => "photon-subset project --input state.json --m 2 --method series",
        Some("random") => "photon-subset random --modes 2 --max-photons 3 --kind mixed --seed 7",
        Some("verify") => "photon-subset verify all --seed 42",
        _ => "photon-subset reduce --input noon.json --remove 1",
    }
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
pub struct RunReport {
    command: String,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    checks: Vec<Check>,
    wall_time: f64,
}

#[derive(Default)]
struct Context {
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    checks: Vec<Check>,
}

impl Context {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let (text, sha256) = read_with_digest(path)?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256,
        });
        Ok(text)
    }

    fn load(&mut self, args: &InputArgs) -> Result<BeamState, CliError> {
        let tolerance = match args.tolerance {
            Some(t) if t.is_finite() && t >= 0.0 => t,
            Some(t) => {
                return Err(CliError::Usage {
                    flag: "--tolerance".into(),
                    message: format!("{t} is not a non-negative number"),
                })
            }
            None => io::default_tolerance()?,
        };
        let text = self.read(&args.input)?;
        Ok(io::parse_state(&text, tolerance)?.0)
    }

    fn emit(&mut self, target: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
        match target {
            Some(path) => {
                std::fs::write(path, text)
                    .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
                self.outputs.push(path.display().to_string());
            }
            None => {
                out.write_all(text.as_bytes())
                    .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))?;
                self.outputs.push("-".into());
            }
        }
        Ok(())
    }
}

fn parse_occupations(flag: &str, raw: &str) -> Result<OccupationVector, CliError> {
    let values = raw
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<Vec<u32>, _>>()
        .map_err(|_| CliError::Usage {
            flag: flag.into(),
            message: format!("expected comma-separated photon numbers, found {raw:?}"),
        })?;
    Ok(OccupationVector::new(values)?)
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Photon number shared by every term.
fn fixed_photon_number(rho: &BeamState) -> Result<u32, CliError> {
    let n = rho.max_photons().ok_or(photon_subset::Error::EmptyState)?;
    rho.require_fixed(n)?;
    Ok(n)
}

fn execute(command: &Command, ctx: &mut Context, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Reduce {
            io: args,
            remove,
            normalize,
        } => {
            let rho = ctx.load(args)?;
            let result = remove_k(&rho, *remove);
            let state = if *normalize {
                result.normalized()?
            } else {
                result.state.clone()
            };
            let meta =
                json!({ "removed": result.removed, "trace_retained": result.trace_retained, "normalized": normalize });
            ctx.emit(args.output.as_deref(), &io::state_json(&state, Some(meta)), out)
        }
        Command::Subset { io: args, q, method } => {
            let rho = ctx.load(args)?;
            let method = match method {
                SubsetArg::Direct => SubsetMethod::Direct,
                SubsetArg::Convex => SubsetMethod::Convex,
            };
            let state = random_subset(&rho, *q, method)?;
            let weights = subset_weights(&rho.sector_decompose()?, *q)?;
            let meta = json!({
                "q": q,
                "method": format!("{method:?}").to_lowercase(),
                "normalization": weights.normalization,
                "weights": weights.weights.iter().map(|(n, w)| (n.to_string(), json!(w))).collect::<serde_json::Map<String, Value>>(),
            });
            ctx.emit(args.output.as_deref(), &io::state_json(&state, Some(meta)), out)
        }
        Command::Correlate {
            io: args,
            k,
            l,
            all_order,
        } => {
            let rho = ctx.load(args)?;
            if let (Some(k), Some(l)) = (k, l) {
                let idx = CorrelationIndex::new(parse_occupations("--k", k)?, parse_occupations("--l", l)?)?;
                if idx.modes() != rho.modes() {
                    return Err(CliError::Usage {
                        flag: "--k".into(),
                        message: format!("state has {} modes, index has {}", rho.modes(), idx.modes()),
                    });
                }
                let v = expectation(&rho, &idx)?;
                let doc =
                    json!({ "k": idx.creators.as_slice(), "l": idx.annihilators.as_slice(), "re": v.re, "im": v.im });
                return ctx.emit(args.output.as_deref(), &io::to_json(&doc), out);
            }
            let order = all_order.expect("clap requires --all-order without --k");
            if order > photon_subset::MAX_PHOTONS {
                return Err(CliError::Usage {
                    flag: "--all-order".into(),
                    message: format!("order {order} is above the photon cap"),
                });
            }
            let join = |v: &OccupationVector| v.as_slice().iter().map(u32::to_string).collect::<Vec<_>>().join(",");
            let mut csv = String::from("k,l,re,im\n");
            for (idx, v) in correlation_table(&rho, order) {
                csv.push_str(&format!(
                    "\"{}\",\"{}\",{},{}\n",
                    join(&idx.creators),
                    join(&idx.annihilators),
                    fmt(v.re),
                    fmt(v.im)
                ));
            }
            ctx.emit(args.output.as_deref(), &csv, out)
        }
        Command::Loss { io: args, eta, method } => {
            let rho = ctx.load(args)?;
            let eta = Transmission::new(*eta)?;
            let state = match method {
                LossArg::Kraus => loss_kraus(&rho, eta),
                LossArg::General => loss_general_decomposition(&rho, eta)?,
                LossArg::FixedN => loss_fixed_n_decomposition(&rho, fixed_photon_number(&rho)?, eta)?,
            };
            ctx.emit(args.output.as_deref(), &io::state_json(&state, None), out)
        }
        Command::Transform { io: args, unitary } => {
            let rho = ctx.load(args)?;
            let u = io::parse_unitary(&ctx.read(unitary)?)?;
            let state = apply_unitary(&rho, &u)?;
            ctx.emit(args.output.as_deref(), &io::state_json(&state, None), out)
        }
        Command::Purity { io: args, q } => {
            let rho = ctx.load(args)?;
            let n = fixed_photon_number(&rho)?;
            let formula = reduced_purity_formula(&rho, n, *q)?;
            let direct = reduced_purity_direct(&rho, n, *q)?;
            ctx.checks.push(Check::at_most(
                "purity: formula vs direct",
                (formula - direct).abs(),
                1e-10,
            ));
            let doc = json!({ "n": n, "q": q, "formula": formula, "direct": direct });
            ctx.emit(args.output.as_deref(), &io::to_json(&doc), out)
        }
        Command::Stokes { io: args } => {
            let rho = ctx.load(args)?;
            let s = stokes(&rho)?;
            let mut doc = json!({ "s0": s.s0, "s1": s.s1, "s2": s.s2, "s3": s.s3 });
            if let Some(normalized) = s.normalized() {
                let bloch = bloch_of_random_photon(&rho)?;
                let err = normalized
                    .iter()
                    .zip(&bloch)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                ctx.checks
                    .push(Check::at_most("stokes: Bloch vector vs normalized Stokes", err, 1e-11));
                doc["bloch"] = json!(bloch);
            }
            ctx.emit(args.output.as_deref(), &io::to_json(&doc), out)
        }
        Command::Project { io: args, m, method } => {
            let rho = ctx.load(args)?;
            let m = parse_occupations("--m", m)?;
            if m.modes() != rho.modes() {
                return Err(CliError::Usage {
                    flag: "--m".into(),
                    message: format!("state has {} modes, --m has {}", rho.modes(), m.modes()),
                });
            }
            let p = projector_expectation_product(&rho, &m)?;
            let (name, value) = match method {
                ProjectArg::Series => ("series", p.series),
                ProjectArg::Direct => ("direct", p.direct),
            };
            let doc = json!({ "m": m.as_slice(), "method": name, "value": value });
            ctx.emit(args.output.as_deref(), &io::to_json(&doc), out)
        }
        Command::Random {
            modes,
            max_photons,
            kind,
            seed,
            output,
        } => {
            let state = random_state(*modes, *max_photons, *kind, *seed)?;
            let meta = json!({ "kind": format!("{kind:?}"), "seed": seed, "max_photons": max_photons });
            ctx.emit(output.as_deref(), &io::state_json(&state, Some(meta)), out)
        }
        Command::Verify { .. } => unreachable!("handled by run"),
    }
}

fn write_report(path: &Path, report: &RunReport) -> Result<(), CliError> {
    std::fs::write(path, io::to_json(report))
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Runs the command line and returns the process exit status: 0 on success,
/// 1 when a check fails, 2 on usage or input errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let subcommand = args.get(1).and_then(|s| s.to_str()).map(str::to_owned);
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{}", e.render());
            } else {
                let _ = write!(err, "{}", e.render());
                let _ = writeln!(err, "example: {}", example(subcommand.as_deref()));
            }
            return code;
        }
    };
    let start = Instant::now();
    let mut ctx = Context::default();
    let result = match &cli.command {
        Command::Verify {
            suite,
            seed,
            eta,
            q,
            tolerance,
            ..
        } => {
            let opts = VerifyOptions {
                seed: *seed,
                eta: *eta,
                q: *q,
                tolerance: *tolerance,
            };
            run_suite(*suite, &opts)
                .map(|checks| ctx.checks = checks)
                .map_err(CliError::from)
        }
        command => execute(command, &mut ctx, out),
    };
    if let Err(e) = result {
        return fail(&e, subcommand.as_deref(), err);
    }
    for c in &ctx.checks {
        let _ = writeln!(
            err,
            "[{}] {}: {:e} {} {:e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.max_error,
            if c.bound == Bound::AtMost { "<=" } else { ">" },
            c.tolerance
        );
    }
    if let Command::Verify { output, .. } = &cli.command {
        ctx.outputs
            .push(output.as_ref().map_or("-".into(), |p| p.display().to_string()));
    }
    let report = report(&args, ctx, start);
    let mut written = Ok(());
    if let Command::Verify { output, .. } = &cli.command {
        written = match output {
            Some(path) => write_report(path, &report),
            None => out
                .write_all(io::to_json(&report).as_bytes())
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}"))),
        };
    }
    if let (Ok(()), Some(path)) = (&written, cli.report.as_deref()) {
        written = write_report(path, &report);
    }
    if let Err(e) = written {
        return fail(&e, subcommand.as_deref(), err);
    }
    if report.checks.iter().all(|c| c.pass) {
        0
    } else {
        1
    }
}

fn fail(e: &CliError, subcommand: Option<&str>, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    let _ = writeln!(err, "example: {}", example(subcommand));
    2
}

fn report(args: &[OsString], ctx: Context, start: Instant) -> RunReport {
    RunReport {
        command: args.iter().map(|a| a.to_string_lossy()).collect::<Vec<_>>().join(" "),
        inputs: ctx.inputs,
        outputs: ctx.outputs,
        checks: ctx.checks,
        wall_time: start.elapsed().as_secs_f64(),
    }
}
