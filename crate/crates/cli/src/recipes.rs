//! Registered figure-data recipes: named operating points with bound grids,
//! regenerated end to end into CSV files plus a JSON manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use cvqt_core::{units, Error, Result};

use crate::sweep::{Axis, Quantity, Scale, Scene, SweepGrid};

/// Every id `reproduce` accepts.
pub const RECIPE_IDS: [&str; 13] = [
    "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig5a", "fig5b", "fig5c", "fig6a",
    "fig6b", "fig6c", "figB1",
];

/// One reproducible data product.
pub struct Recipe {
    pub id: &'static str,
    pub summary: &'static str,
    pub preset: &'static str,
    /// Overrides applied on top of the preset, recorded in the manifest.
    pub fixed: Vec<(&'static str, String)>,
    pub axis1: Axis,
    pub axis2: Axis,
    /// Quantities evaluated on the same grid; one CSV per entry.
    pub quantities: Vec<Quantity>,
}

fn axis(name: &str, min: f64, max: f64, count: usize, scale: Scale) -> Axis {
    Axis {
        name: name.to_string(),
        min,
        max,
        count,
        scale,
    }
}

/// Feedforward loss fraction matching the per-segment share of the realistic
/// chain's loss budget (1.6 dB over 15 segments).
fn realistic_ff_loss() -> String {
    units::loss_db_to_eps(1.6 / 15.0)
        .expect("positive attenuation")
        .to_string()
}

/// Look up a recipe by id.
pub fn recipe(id: &str) -> Result<Recipe> {
    // The lossless matched operating point: 5 GHz carrier, 10-photon input,
    // 10 dB squeezing, -20 dB coupling.
    let ideal_fixed = || {
        vec![
            ("squeezing_db", "10".to_string()),
            ("eta_db", "-20".to_string()),
            ("alpha2", "10".to_string()),
            ("frequency_ghz", "5".to_string()),
            ("matched_gain", "true".to_string()),
        ]
    };
    let trunc_codebook = || vec![("codebook", "truncgaussian:sigma2=1,N=1".to_string())];
    let information_fixed = || {
        let mut fixed = ideal_fixed();
        fixed.push(("codebook", "gaussian:sigma2=1".to_string()));
        fixed
    };

    let r = match id {
        "fig2a" => Recipe {
            id: "fig2a",
            summary: "teleportation fidelity vs feedforward loss fraction and bath \
                      temperature, lossless matched link",
            preset: "ideal",
            fixed: ideal_fixed(),
            axis1: axis("eps_ff", 0.0, 0.99, 101, Scale::Linear),
            axis2: axis("t_ff", 1e-3, 100.0, 101, Scale::Log),
            quantities: vec![Quantity::Fidelity],
        },
        "fig2b" => Recipe {
            id: "fig2b",
            summary: "teleportation fidelity vs entanglement-distribution loss fraction \
                      and bath temperature, lossless matched link",
            preset: "ideal",
            fixed: ideal_fixed(),
            axis1: axis("eps_ent", 0.0, 0.99, 101, Scale::Linear),
            axis2: axis("t_ent", 1e-3, 100.0, 101, Scale::Log),
            quantities: vec![Quantity::Fidelity],
        },
        "fig2c" => Recipe {
            id: "fig2c",
            summary: "teleportation fidelity vs squeezing level and entanglement-channel \
                      loss: more squeezing stops paying once the channel decoheres it",
            preset: "ideal",
            fixed: {
                let mut fixed = ideal_fixed();
                fixed.push(("t_ent", "0".to_string()));
                fixed
            },
            axis1: axis("squeezing_db", 0.0, 20.0, 101, Scale::Linear),
            axis2: axis("eps_ent", 0.0, 0.5, 101, Scale::Linear),
            quantities: vec![Quantity::Fidelity],
        },
        "fig3a" => Recipe {
            id: "fig3a",
            summary: "teleportation fidelity vs feedforward loss and temperature at the \
                      experimentally grounded operating point (fixed 21 dB gain)",
            preset: "realistic",
            fixed: vec![],
            axis1: axis("eps_ff", 0.0, 0.99, 101, Scale::Linear),
            axis2: axis("t_ff", 1e-3, 100.0, 101, Scale::Log),
            quantities: vec![Quantity::Fidelity],
        },
        "fig3b" => Recipe {
            id: "fig3b",
            summary: "teleportation fidelity vs coupler transmissivity and amplifier \
                      gain; the ridge follows the displacement-matching condition",
            preset: "realistic",
            fixed: vec![("eps_ff", realistic_ff_loss())],
            axis1: axis("eta_db", -30.0, 0.0, 101, Scale::Linear),
            axis2: axis("gain_db", 0.0, 40.0, 101, Scale::Linear),
            quantities: vec![Quantity::Fidelity],
        },
        "fig3c" => Recipe {
            id: "fig3c",
            summary: "teleportation fidelity vs coupler transmissivity and feedforward \
                      temperature with the gain matched at every point",
            preset: "realistic",
            fixed: vec![
                ("matched_gain", "true".to_string()),
                ("eps_ff", realistic_ff_loss()),
            ],
            axis1: axis("eta_db", -30.0, -10.0, 101, Scale::Linear),
            axis2: axis("t_ff", 0.01, 300.0, 101, Scale::Log),
            quantities: vec![Quantity::Fidelity],
        },
        "fig5a" => Recipe {
            id: "fig5a",
            summary: "no-cloning threshold of the truncated Gaussian codebook over \
                      width and truncation",
            preset: "ideal",
            fixed: trunc_codebook(),
            axis1: axis("sigma2", 0.01, 100.0, 101, Scale::Log),
            axis2: axis("n_cut", 1e-3, 100.0, 101, Scale::Log),
            quantities: vec![Quantity::Fnc],
        },
        "fig5b" => Recipe {
            id: "fig5b",
            summary: "truncated-Gaussian no-cloning threshold toward the untruncated \
                      limit (N up to 1e4)",
            preset: "ideal",
            fixed: trunc_codebook(),
            axis1: axis("sigma2", 0.01, 100.0, 101, Scale::Log),
            axis2: axis("n_cut", 0.1, 1e4, 101, Scale::Log),
            quantities: vec![Quantity::Fnc],
        },
        "fig5c" => Recipe {
            id: "fig5c",
            summary: "truncated-Gaussian no-cloning threshold toward the flat-codebook \
                      limit (sigma2 up to 1e6)",
            preset: "ideal",
            fixed: trunc_codebook(),
            axis1: axis("n_cut", 1e-3, 1e3, 101, Scale::Log),
            axis2: axis("sigma2", 0.1, 1e6, 101, Scale::Log),
            quantities: vec![Quantity::Fnc],
        },
        "fig6a" => Recipe {
            id: "fig6a",
            summary: "channel mutual information and eavesdropper bound vs feedforward \
                      temperature for several feedforward losses",
            preset: "ideal",
            fixed: information_fixed(),
            axis1: axis("t_ff", 1e-3, 1e4, 101, Scale::Log),
            axis2: axis("eps_ff", 0.1, 0.9, 5, Scale::Linear),
            quantities: vec![Quantity::MutualInformation, Quantity::Holevo],
        },
        "fig6b" => Recipe {
            id: "fig6b",
            summary: "teleportation fidelity on the same grid as the information \
                      balance, for reading off fidelity at the security crossing",
            preset: "ideal",
            fixed: information_fixed(),
            axis1: axis("t_ff", 1e-3, 1e4, 101, Scale::Log),
            axis2: axis("eps_ff", 0.1, 0.9, 5, Scale::Linear),
            quantities: vec![Quantity::Fidelity],
        },
        "fig6c" => Recipe {
            id: "fig6c",
            summary: "secure fidelity vs amplification and squeezing with the coupler \
                      matched to the gain; -1 marks points with no security window",
            preset: "ideal",
            fixed: vec![
                ("codebook", "gaussian:sigma2=1".to_string()),
                ("matched_eta", "true".to_string()),
                ("eps_ff", "0.9".to_string()),
                ("frequency_ghz", "5".to_string()),
            ],
            axis1: axis("gain_db", 17.0, 40.0, 61, Scale::Linear),
            axis2: axis("squeezing_db", 0.0, 10.0, 61, Scale::Linear),
            quantities: vec![Quantity::SecureFidelity],
        },
        "figB1" => Recipe {
            id: "figB1",
            summary: "secure fidelity of truncated Gaussian codebooks across truncation \
                      photon numbers: flat in N, matching the Gaussian-codebook value",
            preset: "ideal",
            fixed: vec![
                ("codebook", "truncgaussian:sigma2=1,N=1".to_string()),
                ("matched_eta", "true".to_string()),
                ("eps_ff", "0.99".to_string()),
                ("gain_db", "70".to_string()),
                ("frequency_ghz", "5".to_string()),
            ],
            axis1: axis("n_cut", 0.1, 100.0, 9, Scale::Log),
            axis2: axis("squeezing_db", 4.0, 12.0, 3, Scale::Linear),
            quantities: vec![Quantity::SecureFidelity],
        },
        other => {
            return Err(Error::Config(format!(
                "unknown figure id '{other}' (expected one of {})",
                RECIPE_IDS.join(", ")
            )))
        }
    };
    Ok(r)
}

/// Files written by one `reproduce` run.
pub struct RecipeOutput {
    pub csv_paths: Vec<PathBuf>,
    pub manifest_path: PathBuf,
}

/// Run a recipe and write its CSVs and manifest into `out_dir`. User
/// overrides land after the recipe's fixed parameters and are recorded
/// separately in the manifest.
pub fn run_recipe(
    id: &str,
    out_dir: &Path,
    grid_counts: Option<(usize, usize)>,
    overrides: &[(String, String)],
) -> Result<RecipeOutput> {
    let recipe = recipe(id)?;
    let start = Instant::now();

    let mut scene = Scene::default();
    scene.apply("preset", recipe.preset)?;
    for (k, v) in &recipe.fixed {
        scene.apply(k, v)?;
    }
    scene.apply_pairs(overrides)?;

    let mut axis1 = recipe.axis1.clone();
    let mut axis2 = recipe.axis2.clone();
    if let Some((c1, c2)) = grid_counts {
        axis1.count = c1;
        axis2.count = c2;
    }

    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut csv_paths = Vec::new();
    let mut file_names = Vec::new();
    for &quantity in &recipe.quantities {
        let grid = SweepGrid {
            axis1: axis1.clone(),
            axis2: axis2.clone(),
            quantity,
            scene: scene.clone(),
        };
        let values = grid.run()?;
        let name = if recipe.quantities.len() == 1 {
            format!("{id}.csv")
        } else {
            format!("{id}_{}.csv", quantity.name())
        };
        let path = out_dir.join(&name);
        let mut buf = Vec::new();
        grid.write_csv(&mut buf, &values).expect("vec write");
        std::fs::write(&path, buf).map_err(|e| io_err(&path, e))?;
        file_names.push(name);
        csv_paths.push(path);
    }

    let manifest = manifest_json(
        &recipe,
        &axis1,
        &axis2,
        overrides,
        &file_names,
        start.elapsed().as_secs_f64(),
    );
    let manifest_path = out_dir.join(format!("{id}_manifest.json"));
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, text + "\n").map_err(|e| io_err(&manifest_path, e))?;
    Ok(RecipeOutput {
        csv_paths,
        manifest_path,
    })
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

fn manifest_json(
    recipe: &Recipe,
    axis1: &Axis,
    axis2: &Axis,
    overrides: &[(String, String)],
    files: &[String],
    runtime_seconds: f64,
) -> serde_json::Value {
    let mut parameters = serde_json::Map::new();
    for (k, v) in &recipe.fixed {
        parameters.insert((*k).to_string(), typed_value(v));
    }
    let mut extra = serde_json::Map::new();
    for (k, v) in overrides {
        extra.insert(k.clone(), typed_value(v));
    }
    serde_json::json!({
        "figure": recipe.id,
        "summary": recipe.summary,
        "preset": recipe.preset,
        "parameters": parameters,
        "overrides": extra,
        "quantities": recipe.quantities.iter().map(|q| q.name()).collect::<Vec<_>>(),
        "axis1": axis_json(axis1),
        "axis2": axis_json(axis2),
        "files": files,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "runtime_seconds": runtime_seconds,
    })
}

fn typed_value(v: &str) -> serde_json::Value {
    match v {
        "true" => return true.into(),
        "false" => return false.into(),
        _ => {}
    }
    if let Ok(x) = v.parse::<f64>() {
        if let Some(n) = serde_json::Number::from_f64(x) {
            return serde_json::Value::Number(n);
        }
    }
    v.into()
}

fn axis_json(a: &Axis) -> serde_json::Value {
    serde_json::json!({
        "name": a.name,
        "min": a.min,
        "max": a.max,
        "count": a.count,
        "scale": a.scale.name(),
    })
}
