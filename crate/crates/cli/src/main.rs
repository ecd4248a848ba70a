//! cvqt: teleportation fidelities, no-cloning thresholds, and public-channel
//! security margins for continuous-variable microwave links.
//!
//! Verbs: `fidelity` (one operating point), `sweep` (2-D grid to CSV on
//! stdout), `nocloning` and `security` (scalar reports, `--json` optional),
//! `reproduce` (registered figure-data recipes to CSV files + manifest).
//! Exit codes: 0 success, 2 usage or configuration error, 3 physics or
//! convergence error.

mod gformat;
mod recipes;
mod sweep;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cvqt_core::security::{self, HolevoPipeline, SecureOutcome};
use cvqt_core::teleport;
use cvqt_core::{config, Error, Result};

use gformat::g9;
use sweep::{Axis, Scene, SweepGrid};

#[derive(Parser)]
#[command(name = "cvqt", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file with key=value lines ('#' comments).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Parameter override, repeatable; applied after --config.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Emit machine-readable JSON instead of key = value lines.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Teleportation fidelity and output statistics at one operating point.
    Fidelity,
    /// Evaluate a quantity over a 2-D parameter grid; CSV on stdout.
    Sweep {
        /// First (outer) axis, name:min:max:count[:linear|log|db].
        #[arg(long, value_name = "SPEC")]
        axis1: String,
        /// Second (inner) axis, same form.
        #[arg(long, value_name = "SPEC")]
        axis2: String,
        /// fidelity | f_nc | mutual_information | holevo | secure_fidelity.
        #[arg(long, value_name = "NAME")]
        quantity: String,
        /// Override both axis counts, AxB.
        #[arg(long, value_name = "AxB")]
        grid: Option<String>,
    },
    /// No-cloning threshold of a codebook.
    Nocloning {
        /// gaussian:sigma2=S | truncuniform:N=X | truncgaussian:sigma2=S,N=X.
        #[arg(value_name = "CODEBOOK")]
        codebook: String,
        /// Upper edge of the amplification scan.
        #[arg(long, value_name = "A")]
        a_max: Option<f64>,
    },
    /// Information balance and secure fidelity at one operating point.
    Security {
        /// Codebook spec; defaults to gaussian:sigma2=1.
        #[arg(value_name = "CODEBOOK")]
        codebook: Option<String>,
        /// Evaluate the infinite-amplification limit instead.
        #[arg(long)]
        asymptotic: bool,
        /// Use the two-mode von Neumann pipeline for the eavesdropper bound.
        #[arg(long)]
        von_neumann: bool,
    },
    /// Write a registered figure-data recipe: CSV files plus a JSON manifest.
    Reproduce {
        /// One of the registered figure ids (see `reproduce --help`).
        #[arg(value_name = "ID")]
        id: String,
        /// Output directory, created if missing.
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
        /// Override the recipe's grid resolution, AxB.
        #[arg(long, value_name = "AxB")]
        grid: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is a
            // usage error.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        // Ignore a second initialization (tests drive main repeatedly).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for problems in what the user asked for, 3 for parameter sets whose
/// physics or numerics fail.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parameter(_) => 2,
        Error::Dimension(_)
        | Error::Unphysical(_)
        | Error::NonConvergence { .. }
        | Error::Bracket(_) => 3,
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Fidelity => {
            let scene = build_scene(cli)?;
            cmd_fidelity(&scene, cli.json)
        }
        Command::Sweep {
            axis1,
            axis2,
            quantity,
            grid,
        } => {
            let scene = build_scene(cli)?;
            let mut axis1 = Axis::parse(axis1)?;
            let mut axis2 = Axis::parse(axis2)?;
            if let Some(g) = grid {
                let (c1, c2) = sweep::parse_grid_counts(g)?;
                axis1.count = c1;
                axis2.count = c2;
            }
            let grid = SweepGrid {
                axis1,
                axis2,
                quantity: quantity.parse()?,
                scene,
            };
            let values = grid.run()?;
            let stdout = std::io::stdout();
            let mut out = std::io::BufWriter::new(stdout.lock());
            grid.write_csv(&mut out, &values)
                .and_then(|()| out.flush())
                .map_err(|e| Error::Config(format!("stdout: {e}")))?;
            Ok(())
        }
        Command::Nocloning { codebook, a_max } => {
            let mut scene = build_scene(cli)?;
            scene.codebook = codebook.parse()?;
            if let Some(a) = a_max {
                scene.a_max = *a;
            }
            cmd_nocloning(&scene, cli.json)
        }
        Command::Security {
            codebook,
            asymptotic,
            von_neumann,
        } => {
            let mut scene = build_scene(cli)?;
            if let Some(cb) = codebook {
                scene.codebook = cb.parse()?;
            }
            cmd_security(&scene, *asymptotic, *von_neumann, cli.json)
        }
        Command::Reproduce { id, out, grid } => {
            let counts = grid.as_deref().map(sweep::parse_grid_counts).transpose()?;
            let overrides = collect_pairs(cli)?;
            let written = recipes::run_recipe(id, out, counts, &overrides)?;
            for path in written
                .csv_paths
                .iter()
                .chain(std::iter::once(&written.manifest_path))
            {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn collect_pairs(cli: &Cli) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
        pairs.extend(config::parse_lines(&text)?);
    }
    for s in &cli.set {
        pairs.push(config::parse_pair(s)?);
    }
    Ok(pairs)
}

fn build_scene(cli: &Cli) -> Result<Scene> {
    let mut scene = Scene::default();
    scene.apply_pairs(&collect_pairs(cli)?)?;
    Ok(scene)
}

fn cmd_fidelity(scene: &Scene, json: bool) -> Result<()> {
    let cfg = &scene.cfg;
    let result = teleport::run_chain(cfg)?;
    let v = result.bob_state.v();
    let v_out = 0.5 * (v[(0, 0)] + v[(1, 1)]);
    let gain = cfg.gain()?;
    let eta = cfg.eta();
    let eps_ff = cfg.eps_ff();
    // G eta (1 - eps_ff) = 4 keeps the output displacement on the input.
    let matching_ratio = gain * eta * (1.0 - eps_ff) / 4.0;
    let matched = (matching_ratio - 1.0).abs() <= 1e-9;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "fidelity": result.fidelity,
                "v_out": v_out,
                "k": result.displacement_gain,
                "matched": matched,
                "matching_ratio": matching_ratio,
                "gain": gain,
                "eta": eta,
                "eps_ff": eps_ff,
            })
        );
    } else {
        println!("fidelity = {}", g9(result.fidelity));
        println!("v_out = {}", g9(v_out));
        println!("k = {}", g9(result.displacement_gain));
        println!(
            "matched = {matched} (G eta (1 - eps_ff) / 4 = {})",
            g9(matching_ratio)
        );
    }
    Ok(())
}

fn cmd_nocloning(scene: &Scene, json: bool) -> Result<()> {
    let result = cvqt_core::nocloning::threshold_with_amax(&scene.codebook, scene.a_max)?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "codebook": scene.codebook.to_string(),
                "f_nc": result.f_nc,
                "a_opt": result.a_opt,
            })
        );
    } else {
        println!("codebook = {}", scene.codebook);
        println!("f_nc = {}", g9(result.f_nc));
        println!("a_opt = {}", g9(result.a_opt));
    }
    Ok(())
}

fn cmd_security(scene: &Scene, asymptotic: bool, von_neumann: bool, json: bool) -> Result<()> {
    if asymptotic {
        let s_db = scene.cfg.squeezing_db;
        let (fidelity, reachable) = security::secure_fidelity_asymptotic(s_db)?;
        if json {
            println!(
                "{}",
                serde_json::json!({
                    "squeezing_db": s_db,
                    "secure_fidelity": fidelity,
                    "reachable": reachable,
                })
            );
        } else {
            println!("secure_fidelity = {}", g9(fidelity));
            println!("reachable = {reachable}");
        }
        return Ok(());
    }

    let p = scene.security_params()?;
    let pipeline = if von_neumann {
        HolevoPipeline::VonNeumann
    } else {
        HolevoPipeline::DifferentialEntropy
    };
    let point = security::finite_parameter_point_with(
        p.squeezing_db,
        p.gain,
        p.eta,
        p.eps_ff,
        p.t_ff,
        p.carrier_frequency,
        &p.codebook,
        pipeline,
    )?;
    let outcome = security::secure_fidelity(
        p.squeezing_db,
        p.gain,
        p.eta,
        p.eps_ff,
        p.carrier_frequency,
        &p.codebook,
    )?;
    let (outcome_name, secure_fidelity, crossing_t_ff) = match outcome {
        SecureOutcome::Crossing { fidelity, t_ff } => ("crossing", Some(fidelity), Some(t_ff)),
        SecureOutcome::AlwaysSecure { fidelity } => ("always_secure", Some(fidelity), None),
        SecureOutcome::NeverSecure => ("never_secure", None, None),
    };
    if json {
        println!(
            "{}",
            serde_json::json!({
                "codebook": p.codebook.to_string(),
                "squeezing_db": p.squeezing_db,
                "gain": p.gain,
                "eta": p.eta,
                "eps_ff": p.eps_ff,
                "t_ff": p.t_ff,
                "mutual_information": point.mutual_information,
                "holevo": point.holevo,
                "margin": point.margin(),
                "fidelity": point.fidelity,
                "v_out": point.v_out,
                "k": point.k,
                "w_ff": point.w_ff,
                "eve_saturated": point.eve_saturated,
                "outcome": outcome_name,
                "secure_fidelity": secure_fidelity,
                "crossing_t_ff": crossing_t_ff,
            })
        );
    } else {
        println!("codebook = {}", p.codebook);
        println!("mutual_information = {}", g9(point.mutual_information));
        println!("holevo = {}", g9(point.holevo));
        println!("margin = {}", g9(point.margin()));
        println!("fidelity = {}", g9(point.fidelity));
        println!("v_out = {}", g9(point.v_out));
        println!("k = {}", g9(point.k));
        println!("w_ff = {}", g9(point.w_ff));
        println!("eve_saturated = {}", point.eve_saturated);
        println!("outcome = {outcome_name}");
        if let Some(f) = secure_fidelity {
            println!("secure_fidelity = {}", g9(f));
        }
        if let Some(t) = crossing_t_ff {
            println!("crossing_t_ff = {}", g9(t));
        }
    }
    Ok(())
}
