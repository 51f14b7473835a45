use serde_json::{json, Map, Value};
use zitter_core::dynamics::{default_time_grid, expectation_trajectory, uniform_grid, Observable};
use zitter_core::fw_transform::{fw_diagonalize, fw_hamiltonian, fw_residuals, fw_velocity};
use zitter_core::representations::ModeOperators;
use zitter_core::wavepacket::{gaussian_packet, mode_state, packet_trajectory, MomentumGrid, DEFAULT_GRID_POINTS};

use crate::config::{Command, Format, RunConfig};
use crate::output::{csv_bytes, json_bytes, matrix_json, sci, write_output};
use crate::verify::run_suite;
use crate::{CliError, EXIT_OK, EXIT_VERIFICATION};

/// What a successful dispatch leaves for the terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    /// Human-readable summary for standard output (empty when the data went there).
    pub summary: String,
    /// Diagnostic for standard error.
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn ok(summary: String) -> Self {
        Outcome { exit_code: EXIT_OK, summary, diagnostic: None }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Verify => cmd_verify(cfg),
        Command::Traj => cmd_traj(cfg),
        Command::Packet => cmd_packet(cfg),
        Command::Fw => cmd_fw(cfg),
    }
}

fn build_mode(cfg: &RunConfig) -> Result<ModeOperators, CliError> {
    Ok(ModeOperators::build(cfg.kind, cfg.mass, cfg.momentum, cfg.gfv_n)?)
}

fn mode_json(mode: &ModeOperators) -> Value {
    json!({
        "kind": mode.kind.name(),
        "mass": mode.mass,
        "momentum": mode.momentum,
        "gfv_n": mode.gfv_n,
        "energy": mode.energy,
        "descriptor": mode.descriptor().to_string(),
    })
}

fn written(cfg: &RunConfig, what: &str) -> String {
    match &cfg.output_path {
        Some(p) => format!("wrote {what} to {}\n", p.display()),
        None => String::new(),
    }
}

/// Column-oriented table written as CSV (one row per sample) or JSON (one array per column).
fn emit_table(cfg: &RunConfig, meta: Value, columns: Vec<(String, Vec<f64>)>, descriptor: &str) -> Result<(), CliError> {
    let n = columns.first().map_or(0, |c| c.1.len());
    let bytes = match cfg.format {
        Format::Csv => {
            let mut header: Vec<String> = columns.iter().map(|c| c.0.clone()).collect();
            header.push("mode".into());
            let rows: Vec<Vec<String>> = (0..n)
                .map(|i| {
                    let mut row: Vec<String> = columns.iter().map(|c| sci(c.1[i])).collect();
                    row.push(descriptor.to_string());
                    row
                })
                .collect();
            csv_bytes(&header, &rows)?
        }
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("mode".into(), meta);
            for (name, values) in columns {
                obj.insert(name, json!(values));
            }
            json_bytes(&Value::Object(obj))?
        }
    };
    write_output(cfg.output_path.as_deref(), &bytes)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = run_suite(cfg)?;
    if cfg.output_path.is_some() {
        let bytes = match cfg.format {
            Format::Csv => {
                let (header, rows) = report.csv_rows();
                csv_bytes(&header, &rows)?
            }
            Format::Json => json_bytes(&report.json())?,
        };
        write_output(cfg.output_path.as_deref(), &bytes)?;
    }
    let diagnostic = report.first_failure().map(|c| {
        format!("verification failed: {} (max residual {:.3e} > tolerance {:.1e})", c.identity, c.residual, c.tolerance)
    });
    Ok(Outcome {
        exit_code: if report.passed() { EXIT_OK } else { EXIT_VERIFICATION },
        summary: report.text() + &written(cfg, "report"),
        diagnostic,
    })
}

/// Velocity and displacement expectations of a single-mode state.
pub fn cmd_traj(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mode = build_mode(cfg)?;
    let state = mode_state(&mode, cfg.composition)?;
    let times = match cfg.t_max {
        Some(t_max) => uniform_grid(t_max, cfg.n_samples),
        None => default_time_grid(mode.energy, cfg.n_samples),
    };
    let mut columns = vec![("t".to_string(), times.clone())];
    for k in 0..3 {
        for obs in [Observable::Velocity(k), Observable::Displacement(k)] {
            let traj = expectation_trajectory(&mode, &state, obs, &times)?;
            columns.push((format!("re_{obs}"), traj.samples.iter().map(|z| z.re).collect()));
            columns.push((format!("im_{obs}"), traj.samples.iter().map(|z| z.im).collect()));
        }
    }
    let descriptor = format!("{} state={}", mode.descriptor(), cfg.composition);
    let mut meta = mode_json(&mode);
    meta["composition"] = json!(cfg.composition.to_string());
    meta["descriptor"] = json!(descriptor);
    emit_table(cfg, meta, columns, &descriptor)?;
    Ok(Outcome::ok(written(cfg, "trajectory")))
}

/// Position expectation, charge norm and sector purity of a Gaussian packet along x.
pub fn cmd_packet(cfg: &RunConfig) -> Result<Outcome, CliError> {
    // Rejects massless ST and a degenerate centre before any grid work.
    let centre = ModeOperators::build(cfg.kind, cfg.mass, [cfg.p0, 0.0, 0.0], cfg.gfv_n)?;
    let grid = MomentumGrid::default_for(0, cfg.p0, cfg.sigma_p)?;
    let packet = gaussian_packet(cfg.kind, cfg.mass, cfg.gfv_n, cfg.sigma_p, grid, cfg.composition)?;
    let times = match cfg.t_max {
        Some(t_max) => uniform_grid(t_max, cfg.n_samples),
        None => default_time_grid(centre.energy, cfg.n_samples),
    };
    let traj = packet_trajectory(&packet, &times)?;
    let mut descriptor = format!(
        "kind={} m={} p0={} sigma_p={} state={} grid={}",
        cfg.kind, cfg.mass, cfg.p0, cfg.sigma_p, cfg.composition, DEFAULT_GRID_POINTS
    );
    if let Some(n) = cfg.gfv_n {
        descriptor += &format!(" N={n}");
    }
    let meta = json!({
        "kind": cfg.kind.name(),
        "mass": cfg.mass,
        "p0": cfg.p0,
        "sigma_p": cfg.sigma_p,
        "gfv_n": cfg.gfv_n,
        "composition": cfg.composition.to_string(),
        "grid_points": DEFAULT_GRID_POINTS,
        "descriptor": descriptor,
    });
    let columns = vec![
        ("t".to_string(), traj.times),
        ("x_expect".to_string(), traj.x),
        ("norm".to_string(), traj.norm),
        ("sector_purity".to_string(), traj.purity),
    ];
    emit_table(cfg, meta, columns, &descriptor)?;
    Ok(Outcome::ok(written(cfg, "packet trajectory")))
}

/// FW transform of one mode with its residuals, as JSON.
pub fn cmd_fw(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mode = build_mode(cfg)?;
    let t = fw_diagonalize(&mode)?;
    let h_fw = fw_hamiltonian(&mode, &t)?;
    let v_fw = fw_velocity(&mode, &t)?;
    let r = fw_residuals(&mode, &t)?;
    let value = json!({
        "mode": mode_json(&mode),
        "dim": mode.dim(),
        "H": matrix_json(&mode.hamiltonian),
        "H_FW": matrix_json(&h_fw),
        "T": matrix_json(&t.forward),
        "T_inv": matrix_json(&t.inverse),
        "v_FW": v_fw.iter().map(matrix_json).collect::<Vec<_>>(),
        "residuals": {
            "hamiltonian": r.hamiltonian,
            "velocity": r.velocity,
            "commutator": r.commutator,
            "inverse": r.inverse,
            "unitarity": r.unitarity,
        },
    });
    write_output(cfg.output_path.as_deref(), &json_bytes(&value)?)?;
    Ok(Outcome::ok(written(cfg, "FW transform")))
}
