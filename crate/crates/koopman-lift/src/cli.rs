//! Command-line driver. Subcommands cover the whole pipeline: `validate`
//! a system file, `lift` it, print or export the lifted `matrices`,
//! `simulate` the original and lifted dynamics side by side, and
//! `residual-check` the exactness identity at random states.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use crate::io::{
    fmt_g17, parse_order, parse_spec, plot_script, read_samples, render_lifting, render_symbolic,
    write_matrix, write_trajectory, Diagnostic, SpecDocument,
};
use crate::lifting::{compute_lifting, DEFAULT_CAP};
use crate::model::{KoopmanModel, NumericModel, SweepConfig};
use crate::sim::{
    compare, expm_propagate, integrate_lifted, integrate_nonlinear, InputSignal, Trajectory,
};

/// Relative-residual bound for `residual-check`; an exact lifting sits
/// many orders of magnitude below it.
const RESIDUAL_THRESHOLD: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "koopman-lift",
    version,
    about = "Exact linear embeddings of lower-triangular polynomial systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a system file and check its triangular structure
    Validate {
        /// JSON system file
        spec: PathBuf,
    },
    /// Print the lifted observables and their per-state decomposition
    Lift {
        /// JSON system file
        spec: PathBuf,
    },
    /// Print or export the lifted system matrices A, C, dPhi/dx, and B
    Matrices {
        /// JSON system file
        spec: PathBuf,
        /// Observable-order file: one exponent vector per line
        #[arg(long)]
        order: Option<PathBuf>,
        /// Substitute bound parameter values and emit A and C as CSV
        #[arg(long)]
        numeric: bool,
        /// Write files into this directory instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the system, its lifted form, or both with error tracking
    Simulate {
        /// JSON system file
        spec: PathBuf,
        /// What to integrate
        #[arg(long, value_enum, default_value = "both")]
        mode: Mode,
        /// zero | step:<amp>@<t> | file:<path> (default: the file's sim input)
        #[arg(long)]
        input: Option<InputArg>,
        /// Integration step (default: the file's sim.h)
        #[arg(long, value_parser = positive_f64)]
        h: Option<f64>,
        /// Time horizon (default: the file's sim.T)
        #[arg(long = "T", value_parser = nonnegative_f64)]
        t_end: Option<f64>,
        /// Initial state, comma-separated (default: the file's sim.x0)
        #[arg(long)]
        x0: Option<StateList>,
        /// Propagate the lifted system with the matrix exponential
        /// instead of RK4 (zero input only)
        #[arg(long)]
        expm: bool,
        /// Write CSVs and a plot script into this directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check J(x) f(x) = A Phi(x) at random states; exit 1 over threshold
    ResidualCheck {
        /// JSON system file
        spec: PathBuf,
        /// Number of random states
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// RNG seed
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Half-width of the sampling box, centered at the origin
        #[arg(long = "box", default_value_t = 1.0, value_parser = positive_f64)]
        box_radius: f64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Nonlinear,
    Lifted,
    Both,
}

/// `--input` argument: parsed at the command line, resolved against the
/// system's input map later.
#[derive(Clone, Debug)]
enum InputArg {
    Zero,
    Step { amplitudes: Vec<f64>, onset: f64 },
    File(PathBuf),
}

impl FromStr for InputArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "zero" {
            return Ok(InputArg::Zero);
        }
        if let Some(rest) = s.strip_prefix("step:") {
            let (amp_part, onset_part) = rest
                .split_once('@')
                .ok_or_else(|| "step input is step:<amp>@<t>".to_string())?;
            let amplitudes = parse_float_list(amp_part)?;
            if amplitudes.is_empty() {
                return Err("step input needs at least one amplitude".into());
            }
            let onset: f64 = onset_part
                .trim()
                .parse()
                .map_err(|_| format!("bad step time {onset_part:?}"))?;
            if !onset.is_finite() || onset < 0.0 {
                return Err("step time must be nonnegative".into());
            }
            return Ok(InputArg::Step { amplitudes, onset });
        }
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err("file input is file:<path>".into());
            }
            return Ok(InputArg::File(PathBuf::from(path)));
        }
        Err(format!(
            "unknown input {s:?}: expected zero, step:<amp>@<t>, or file:<path>"
        ))
    }
}

/// `--x0` argument: comma-separated reals.
#[derive(Clone, Debug)]
struct StateList(Vec<f64>);

impl FromStr for StateList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let values = parse_float_list(s)?;
        if values.is_empty() {
            return Err("expected at least one value".into());
        }
        Ok(StateList(values))
    }
}

fn parse_float_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|f| {
            let f = f.trim();
            f.parse::<f64>()
                .map_err(|_| format!("{f:?} is not a number"))
        })
        .collect()
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("must be a positive finite number".into())
    }
}

fn nonnegative_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err("must be a nonnegative finite number".into())
    }
}

/// Why a command failed: located parse diagnostics print bare (one per
/// line, already carrying file coordinates), everything else prints with
/// an `error:` prefix. Both exit 1.
enum Failure {
    Diagnostics(Vec<Diagnostic>),
    Message(String),
}

fn msg<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Message(e.to_string())
}

/// Run the CLI on explicit arguments and return the process exit code:
/// 0 success, 1 diagnostic or check failure, 2 usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };

    let outcome = match cli.command {
        Command::Validate { spec } => cmd_validate(&spec),
        Command::Lift { spec } => cmd_lift(&spec),
        Command::Matrices {
            spec,
            order,
            numeric,
            out,
        } => cmd_matrices(&spec, order.as_deref(), numeric, out.as_deref()),
        Command::Simulate {
            spec,
            mode,
            input,
            h,
            t_end,
            x0,
            expm,
            out,
        } => cmd_simulate(&spec, mode, input, h, t_end, x0, expm, out.as_deref()),
        Command::ResidualCheck {
            spec,
            samples,
            seed,
            box_radius,
        } => cmd_residual_check(&spec, samples as usize, seed, box_radius),
    };

    match outcome {
        Ok(code) => code,
        Err(Failure::Diagnostics(diags)) => {
            for d in &diags {
                eprintln!("{d}");
            }
            1
        }
        Err(Failure::Message(m)) => {
            eprintln!("error: {m}");
            1
        }
    }
}

fn load_document(path: &Path) -> Result<SpecDocument, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Message(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text).map_err(Failure::Diagnostics)
}

fn build_model(doc: &SpecDocument) -> Result<KoopmanModel, Failure> {
    let lifting = compute_lifting(&doc.system, DEFAULT_CAP).map_err(msg)?;
    KoopmanModel::build(doc.system.clone(), lifting).map_err(msg)
}

fn cmd_validate(spec: &Path) -> Result<i32, Failure> {
    let doc = load_document(spec)?;
    let n_u = doc.system.n_u();
    if n_u > 0 {
        println!("ok: {} states, {} input channels", doc.system.n_x(), n_u);
    } else {
        println!("ok: {} states, autonomous", doc.system.n_x());
    }
    Ok(0)
}

fn cmd_lift(spec: &Path) -> Result<i32, Failure> {
    let doc = load_document(spec)?;
    let model = build_model(&doc)?;
    print!("{}", render_lifting(&model));
    Ok(0)
}

fn cmd_matrices(
    spec: &Path,
    order: Option<&Path>,
    numeric: bool,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let doc = load_document(spec)?;
    let mut model = build_model(&doc)?;

    if let Some(order_path) = order {
        let text = fs::read_to_string(order_path)
            .map_err(|e| Failure::Message(format!("cannot read {}: {e}", order_path.display())))?;
        let wanted = parse_order(&text, doc.system.n_x()).map_err(msg)?;
        model = model.reorder(&wanted).map_err(msg)?;
    }

    if numeric {
        let numeric_model = model.to_numeric().map_err(msg)?;
        let a_csv = write_matrix(numeric_model.a());
        let c_csv = write_matrix(&model.c_matrix());
        match out {
            Some(dir) => {
                write_file(dir, "A.csv", &a_csv)?;
                write_file(dir, "C.csv", &c_csv)?;
            }
            None => {
                let (n, n_x) = (model.dim(), model.n_x());
                print!("A ({n}x{n}):\n{a_csv}\nC ({n_x}x{n}):\n{c_csv}");
            }
        }
    } else {
        let text = render_symbolic(&model);
        match out {
            Some(dir) => write_file(dir, "matrices.txt", &text)?,
            None => print!("{text}"),
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    spec: &Path,
    mode: Mode,
    input: Option<InputArg>,
    h: Option<f64>,
    t_end: Option<f64>,
    x0: Option<StateList>,
    expm: bool,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let doc = load_document(spec)?;
    let sim = doc.sim.as_ref();

    let x0 = x0
        .map(|s| s.0)
        .or_else(|| sim.map(|s| s.x0.clone()))
        .ok_or_else(|| {
            Failure::Message("no initial state: pass --x0 or add a sim section".into())
        })?;
    let h = h
        .or(sim.map(|s| s.h))
        .ok_or_else(|| Failure::Message("no step size: pass --h or add a sim section".into()))?;
    let t_end = t_end
        .or(sim.map(|s| s.t_end))
        .ok_or_else(|| Failure::Message("no horizon: pass --T or add a sim section".into()))?;

    let n_x = doc.system.n_x();
    if x0.len() != n_x {
        return Err(Failure::Message(format!(
            "initial state has {} values, the system has {} states",
            x0.len(),
            n_x
        )));
    }

    let signal = resolve_input(input, sim.and_then(|s| s.input.clone()), doc.system.n_u())?;
    if expm && !signal.is_zero() {
        return Err(Failure::Message(
            "matrix-exponential propagation needs a zero input".into(),
        ));
    }
    if expm && mode == Mode::Nonlinear {
        return Err(Failure::Message(
            "--expm only applies to the lifted system (use --mode lifted or both)".into(),
        ));
    }

    let x_names: Vec<String> = (1..=n_x).map(|i| format!("x{i}")).collect();

    match mode {
        Mode::Nonlinear => {
            let system = doc.system.compile().map_err(msg)?;
            let traj = integrate_nonlinear(&system, &x0, &signal, h, t_end).map_err(msg)?;
            let csv = write_trajectory(&traj, &x_names).map_err(msg)?;
            deliver(out, "nonlinear.csv", &csv)?;
        }
        Mode::Lifted => {
            let numeric = build_model(&doc)?.to_numeric().map_err(msg)?;
            let traj = run_lifted(&numeric, &x0, &signal, h, t_end, expm)?;
            let z_names = observable_names(&numeric);
            let csv = write_trajectory(&traj, &z_names).map_err(msg)?;
            deliver(out, "lifted.csv", &csv)?;
        }
        Mode::Both => {
            let system = doc.system.compile().map_err(msg)?;
            let numeric = build_model(&doc)?.to_numeric().map_err(msg)?;
            let nonlinear = integrate_nonlinear(&system, &x0, &signal, h, t_end).map_err(msg)?;
            let lifted = run_lifted(&numeric, &x0, &signal, h, t_end, expm)?;
            let report = compare(&nonlinear, &lifted.project(n_x)).map_err(msg)?;

            let err_names: Vec<String> = x_names.iter().map(|n| format!("err_{n}")).collect();
            let err_csv = write_trajectory(&report.series, &err_names).map_err(msg)?;

            match out {
                Some(dir) => {
                    let nl_csv = write_trajectory(&nonlinear, &x_names).map_err(msg)?;
                    let z_names = observable_names(&numeric);
                    let z_csv = write_trajectory(&lifted, &z_names).map_err(msg)?;
                    write_file(dir, "nonlinear.csv", &nl_csv)?;
                    write_file(dir, "lifted.csv", &z_csv)?;
                    write_file(dir, "error.csv", &err_csv)?;
                    let script = plot_script(
                        "nonlinear vs projected lifted",
                        &[
                            ("nonlinear.csv", x_names.clone()),
                            ("error.csv", err_names.clone()),
                        ],
                    );
                    write_file(dir, "plot.gp", &script)?;
                    print_error_summary(&x_names, &report.per_channel_max, report.sup, false);
                }
                None => {
                    print!("{err_csv}");
                    print_error_summary(&x_names, &report.per_channel_max, report.sup, true);
                }
            }
        }
    }
    Ok(0)
}

/// Integrate the lifted system from the lifted initial state, with RK4
/// or, under `--expm`, the matrix exponential.
fn run_lifted(
    numeric: &NumericModel,
    x0: &[f64],
    signal: &InputSignal,
    h: f64,
    t_end: f64,
    expm: bool,
) -> Result<Trajectory, Failure> {
    let z0 = numeric.lifting().lift(x0);
    if expm {
        expm_propagate(numeric.a(), &z0, h, t_end).map_err(msg)
    } else {
        integrate_lifted(numeric, &z0, signal, h, t_end).map_err(msg)
    }
}

fn resolve_input(
    flag: Option<InputArg>,
    default: Option<InputSignal>,
    n_u: usize,
) -> Result<InputSignal, Failure> {
    let arg = match flag {
        None => return Ok(default.unwrap_or_else(|| InputSignal::zero(n_u))),
        Some(arg) => arg,
    };
    match arg {
        InputArg::Zero => Ok(InputSignal::zero(n_u)),
        InputArg::Step { amplitudes, onset } => {
            if n_u == 0 {
                return Err(Failure::Message("the system declares no input map".into()));
            }
            let amps = if amplitudes.len() == 1 && n_u > 1 {
                vec![amplitudes[0]; n_u]
            } else {
                amplitudes
            };
            if amps.len() != n_u {
                return Err(Failure::Message(format!(
                    "step input has {} amplitudes, the input map has {} channels",
                    amps.len(),
                    n_u
                )));
            }
            Ok(InputSignal::step(amps, onset))
        }
        InputArg::File(path) => {
            if n_u == 0 {
                return Err(Failure::Message("the system declares no input map".into()));
            }
            let text = fs::read_to_string(&path)
                .map_err(|e| Failure::Message(format!("cannot read {}: {e}", path.display())))?;
            let (names, times, rows) = read_samples(&text).map_err(msg)?;
            if names.len() != n_u {
                return Err(Failure::Message(format!(
                    "input file has {} channels, the input map has {}",
                    names.len(),
                    n_u
                )));
            }
            InputSignal::sampled(times, rows).map_err(msg)
        }
    }
}

fn cmd_residual_check(
    spec: &Path,
    samples: usize,
    seed: u64,
    box_radius: f64,
) -> Result<i32, Failure> {
    let doc = load_document(spec)?;
    let numeric = build_model(&doc)?.to_numeric().map_err(msg)?;
    let config = SweepConfig {
        samples,
        seed,
        box_radius,
        tolerance: RESIDUAL_THRESHOLD,
    };
    let report = numeric.residual_sweep(&config);
    let r = fmt_g17(box_radius);
    println!(
        "sampled {} states in [-{r}, {r}]^{} (seed {seed})",
        report.samples,
        doc.system.n_x()
    );
    println!("max absolute residual: {}", fmt_g17(report.max_absolute));
    println!("max relative residual: {}", fmt_g17(report.max_relative));
    if report.passed() {
        println!("within threshold 1e-09");
        Ok(0)
    } else {
        let worst: Vec<String> = report.worst_point.iter().map(|v| fmt_g17(*v)).collect();
        println!("exceeds threshold 1e-09 at x = ({})", worst.join(", "));
        Ok(1)
    }
}

fn observable_names(numeric: &NumericModel) -> Vec<String> {
    numeric
        .lifting()
        .observables()
        .iter()
        .map(ToString::to_string)
        .collect()
}

fn print_error_summary(names: &[String], per_channel: &[f64], sup: f64, to_stderr: bool) {
    for (name, e) in names.iter().zip(per_channel) {
        let line = format!("max error {name}: {}", fmt_g17(*e));
        if to_stderr {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    let line = format!("sup error: {}", fmt_g17(sup));
    if to_stderr {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

/// Print to stdout, or write into the output directory when one is given.
fn deliver(out: Option<&Path>, name: &str, contents: &str) -> Result<(), Failure> {
    match out {
        Some(dir) => write_file(dir, name, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Message(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| Failure::Message(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_argument_forms_parse() {
        assert!(matches!("zero".parse(), Ok(InputArg::Zero)));
        let step: InputArg = "step:0.5@1.25".parse().unwrap();
        match step {
            InputArg::Step { amplitudes, onset } => {
                assert_eq!(amplitudes, vec![0.5]);
                assert_eq!(onset, 1.25);
            }
            other => panic!("expected step, got {other:?}"),
        }
        let multi: InputArg = "step:0.5,-1,2@0".parse().unwrap();
        match multi {
            InputArg::Step { amplitudes, .. } => assert_eq!(amplitudes, vec![0.5, -1.0, 2.0]),
            other => panic!("expected step, got {other:?}"),
        }
        let file: InputArg = "file:u.csv".parse().unwrap();
        match file {
            InputArg::File(p) => assert_eq!(p, PathBuf::from("u.csv")),
            other => panic!("expected file, got {other:?}"),
        }
    }

    #[test]
    fn bad_input_arguments_are_rejected() {
        assert!("step:0.5".parse::<InputArg>().is_err());
        assert!("step:abc@1".parse::<InputArg>().is_err());
        assert!("step:1@-2".parse::<InputArg>().is_err());
        assert!("file:".parse::<InputArg>().is_err());
        assert!("ramp:1".parse::<InputArg>().is_err());
    }

    #[test]
    fn state_list_parses_comma_separated_reals() {
        let StateList(v) = "1,2.5,-3".parse().unwrap();
        assert_eq!(v, vec![1.0, 2.5, -3.0]);
        assert!("".parse::<StateList>().is_err());
        assert!("1,x".parse::<StateList>().is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["koopman-lift", "frobnicate"]), 2);
        assert_eq!(run(["koopman-lift"]), 2);
        assert_eq!(run(["koopman-lift", "simulate", "x.json", "--h", "-1"]), 2);
        assert_eq!(
            run(["koopman-lift", "residual-check", "x.json", "--samples", "0"]),
            2
        );
    }

    #[test]
    fn missing_file_exits_one() {
        assert_eq!(run(["koopman-lift", "validate", "/no/such/file.json"]), 1);
    }
}
