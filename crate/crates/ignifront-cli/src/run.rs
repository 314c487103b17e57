use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use ignifront::explicit_region::flux_at_r;
use ignifront::export::fmt_g17;
use ignifront::front_solver::{solve_front, FrontSolution};
use ignifront::model::Model;
use ignifront::pde_verifier::{
    comoving_drift, measure_speed, simulate_lab_frame, SimulationConfig,
};
use ignifront::phase_plane::{
    melnikov_dvdc_on, phase_portrait, separatrix, v_at_hl, PortraitWindow, SeparatrixOptions,
};
use ignifront::phi_curve::{critical_point, geometric_grid, sample_phi};
use ignifront::psi_curve::sample_psi;

use crate::config::RunConfig;
use crate::json17;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Module(ignifront::Error),
    Io(std::io::Error),
    /// clap already printed the diagnostic.
    Silent,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Module(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Silent => write!(f, "invalid usage"),
        }
    }
}

impl CliError {
    /// 1 for validation problems, 2 for usage and numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Module(e) if e.is_validation() => 1,
            _ => 2,
        }
    }
}

impl From<ignifront::Error> for CliError {
    fn from(e: ignifront::Error) -> Self {
        CliError::Module(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser)]
#[command(
    name = "ignifront",
    about = "Traveling-front solver for a two-interface ignition model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key=value configuration file (q, h, theta_ig, theta_hl required).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: $IGNIFRONT_OUT or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for (R*, c*), write front.json and profile.csv.
    Solve(Common),
    /// Tabulate the interface-compatibility curve; writes phi.csv and critical.json.
    Phi(Common),
    /// Tabulate the separatrix-matching curve; writes psi.csv.
    Psi(Common),
    /// Direction field and separatrix at a fixed speed; writes portrait.csv,
    /// boundary.csv and separatrix.csv.
    Portrait(Common),
    /// Separatrix-height sensitivity table; writes melnikov.csv.
    Melnikov(Common),
    /// Cross-validate the solved front against a time-dependent simulation;
    /// writes xig.csv and report.json.
    PdeCheck(Common),
}

pub fn run(args: &[String]) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Err(CliError::Silent)
            } else {
                Ok(())
            };
        }
    };
    match &cli.command {
        Command::Solve(c) => with_setup(c, cmd_solve),
        Command::Phi(c) => with_setup(c, cmd_phi),
        Command::Psi(c) => with_setup(c, cmd_psi),
        Command::Portrait(c) => with_setup(c, cmd_portrait),
        Command::Melnikov(c) => with_setup(c, cmd_melnikov),
        Command::PdeCheck(c) => with_setup(c, cmd_pde_check),
    }
}

fn with_setup(
    common: &Common,
    cmd: impl FnOnce(&RunConfig, &Path) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let cfg = RunConfig::load(&common.config)?;
    let out = common
        .out
        .clone()
        .or_else(|| std::env::var_os("IGNIFRONT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out)?;
    cmd(&cfg, &out)
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<(), CliError> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn solve_from_config(cfg: &RunConfig) -> Result<(Model, FrontSolution), CliError> {
    let model = Model::quartic(cfg.params);
    let sol = solve_front(&model, &cfg.solve_options()?)?;
    Ok((model, sol))
}

fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (_, sol) = solve_from_config(cfg)?;
    write_file(out, "front.json", json17::to_string(&sol.summary()).as_bytes())?;

    let lm = sol.tail().saddle().lambda_minus.abs();
    let x_min = cfg.f64_or("profile_x_min", -10.0 / sol.c_star)?;
    let x_max = cfg.f64_or("profile_x_max", sol.r_star + 10.0 / lm)?;
    let points = cfg.usize_or("profile_points", 2001)?;
    if !(x_max > x_min) || points < 2 {
        return Err(CliError::Usage(format!(
            "profile grid [{x_min}, {x_max}] x {points} is not usable"
        )));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| x_min + (x_max - x_min) * i as f64 / (points - 1) as f64)
        .collect();
    let mut csv = Vec::new();
    sol.write_profile_csv(&grid, &mut csv)?;
    write_file(out, "profile.csv", &csv)?;

    let certs = sol.certificates;
    println!("R_star = {}", fmt_g17(sol.r_star));
    println!("c_star = {}", fmt_g17(sol.c_star));
    println!(
        "interface_flux = {}",
        fmt_g17(flux_at_r(&cfg.params, sol.r_star, sol.c_star))
    );
    println!(
        "jumps: theta(0) = {}, flux(0) = {}, theta(R) = {}, flux(R) = {}",
        fmt_g17(certs.theta_jump_at_zero),
        fmt_g17(certs.flux_jump_at_zero),
        fmt_g17(certs.theta_jump_at_interface),
        fmt_g17(certs.flux_jump_at_interface)
    );
    println!(
        "monotone = {}, delta_increasing = {}",
        certs.monotone, certs.delta_increasing_on_bracket
    );
    Ok(())
}

fn cmd_phi(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let critical = critical_point(&cfg.params)?;
    write_file(out, "critical.json", json17::to_string(&critical).as_bytes())?;
    let n = cfg.usize_or("phi_points", 256)?;
    let r_min = cfg.f64_or("phi_r_min_factor", 1e-3)? * critical.r0;
    let samples = sample_phi(&cfg.params, &geometric_grid(r_min, critical.r0, n))?;
    let mut csv = Vec::new();
    samples.write_csv(&mut csv)?;
    write_file(out, "phi.csv", &csv)?;
    println!(
        "phi: {} points on [{}, {}], c0 = {}",
        n,
        fmt_g17(r_min),
        fmt_g17(critical.r0),
        fmt_g17(critical.c0)
    );
    Ok(())
}

fn cmd_psi(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let critical = critical_point(&cfg.params)?;
    let model = Model::quartic(cfg.params);
    let n = cfg.usize_or("psi_points", 64)?;
    let r_max = cfg.f64_or("psi_r_max_factor", 3.0)? * critical.r0;
    let grid: Vec<f64> = (0..n)
        .map(|i| r_max * i as f64 / (n - 1) as f64)
        .collect();
    let samples = sample_psi(&model, &grid)?;
    let mut csv = Vec::new();
    samples.write_csv(&mut csv)?;
    write_file(out, "psi.csv", &csv)?;
    println!(
        "psi: {} points on [0, {}], psi(0) = {}",
        n,
        fmt_g17(r_max),
        fmt_g17(samples.points[0].1)
    );
    Ok(())
}

fn cmd_portrait(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let model = Model::quartic(cfg.params);
    let c = cfg.f64_or("portrait_c", 1.0)?;
    let thl = cfg.params.theta_hl;
    let tp = model.theta_plus();
    let v0_hl = (2.0 * model.potential(tp).map_err(CliError::Module)?).sqrt();
    let window = PortraitWindow {
        u_min: cfg.f64_or("portrait_u_min", thl)?,
        u_max: cfg.f64_or("portrait_u_max", tp)?,
        v_min: cfg.f64_or("portrait_v_min", 0.0)?,
        v_max: cfg.f64_or("portrait_v_max", 1.1 * v0_hl)?,
    };
    if !(window.u_max > window.u_min && window.v_max > window.v_min) {
        return Err(CliError::Usage("portrait window is empty".into()));
    }
    let nu = cfg.usize_or("portrait_nu", 41)?;
    let nv = cfg.usize_or("portrait_nv", 41)?;
    let portrait = phase_portrait(&model, c, &window, nu, nv);
    let mut csv = Vec::new();
    portrait.write_field_csv(&mut csv)?;
    write_file(out, "portrait.csv", &csv)?;
    let mut csv = Vec::new();
    portrait.write_boundary_csv(&mut csv)?;
    write_file(out, "boundary.csv", &csv)?;

    let traj = separatrix(&model, c, &SeparatrixOptions::default())?;
    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    write_file(out, "separatrix.csv", &csv)?;
    println!(
        "portrait at c = {}: {} field samples, v_hl = {}",
        fmt_g17(c),
        nu * nv,
        fmt_g17(traj.v_hl)
    );
    Ok(())
}

fn cmd_melnikov(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let model = Model::quartic(cfg.params);
    let c_min = cfg.f64_or("melnikov_c_min", 0.0)?;
    let c_max = cfg.f64_or("melnikov_c_max", 3.0)?;
    let n = cfg.usize_or("melnikov_points", 10)?;
    let thl = cfg.params.theta_hl;
    let opts = SeparatrixOptions::default();

    let mut csv = String::from("c,v_hl,dv_dc_melnikov,dv_dc_fd,rel_err\n");
    for i in 0..n {
        let c = c_min + (c_max - c_min) * i as f64 / (n - 1) as f64;
        let traj = separatrix(&model, c, &opts)?;
        let mel = melnikov_dvdc_on(&traj, thl)?;
        let delta = 1e-4 * c.max(1.0);
        let fd = if c - delta >= 0.0 {
            (v_at_hl(&model, c + delta)? - v_at_hl(&model, c - delta)?) / (2.0 * delta)
        } else {
            // One-sided second-order difference at the c = 0 end.
            (-3.0 * traj.v_hl + 4.0 * v_at_hl(&model, c + delta)?
                - v_at_hl(&model, c + 2.0 * delta)?)
                / (2.0 * delta)
        };
        let rel_err = (mel - fd).abs() / fd.abs();
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g17(c),
            fmt_g17(traj.v_hl),
            fmt_g17(mel),
            fmt_g17(fd),
            fmt_g17(rel_err)
        ));
    }
    write_file(out, "melnikov.csv", csv.as_bytes())?;
    println!("melnikov: {n} speeds on [{c_min}, {c_max}]");
    Ok(())
}

#[derive(serde::Serialize)]
struct PdeReport {
    q: f64,
    h: f64,
    theta_ig: f64,
    theta_hl: f64,
    theta_plus: f64,
    r_star: f64,
    c_star: f64,
    dx: f64,
    final_time: f64,
    c_measured: f64,
    speed_rel_error: f64,
    drift_time: f64,
    drift: f64,
    translation_offset: f64,
}

fn cmd_pde_check(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (model, sol) = solve_from_config(cfg)?;

    let mut sim_cfg = SimulationConfig::default_for_speed(sol.c_star);
    if let Some(dx) = cfg.opt_f64("pde_dx")? {
        sim_cfg.dx = dx;
    }
    if let Some(l) = cfg.opt_f64("pde_half_length")? {
        sim_cfg.half_length = l;
    }
    if let Some(t) = cfg.opt_f64("pde_final_time")? {
        sim_cfg.final_time = t;
        sim_cfg.record_dt = (t / 400.0).max(1e-6);
    }
    if let Some(w) = cfg.opt_f64("pde_smoothing_width")? {
        sim_cfg.smoothing_width = w;
    }
    if let Some(w) = cfg.opt_f64("pde_window_fraction")? {
        sim_cfg.window_fraction = w;
    }
    if let Some(r) = cfg.opt_f64("pde_record_dt")? {
        sim_cfg.record_dt = r;
    }
    if let Some(m) = cfg.opt_f64("pde_edge_margin")? {
        sim_cfg.edge_margin = m;
    }
    sim_cfg.snapshot_times = cfg.snapshot_times()?;

    let sim = simulate_lab_frame(&model, &sim_cfg)?;
    let mut csv = Vec::new();
    sim.series.write_csv(&mut csv)?;
    write_file(out, "xig.csv", &csv)?;
    for (i, snap) in sim.snapshots.iter().enumerate() {
        let mut csv = Vec::new();
        snap.write_csv(&sim.grid, &mut csv)?;
        write_file(out, &format!("snapshot_{i:03}.csv"), &csv)?;
    }
    let c_measured = measure_speed(&sim.series, sim_cfg.window_fraction)?;

    let mut drift_cfg = sim_cfg.clone();
    drift_cfg.final_time = cfg.f64_or("pde_drift_time", 10.0)?;
    drift_cfg.snapshot_times = Vec::new();
    let report = comoving_drift(&model, &sol, &drift_cfg)?;

    let pde = PdeReport {
        q: cfg.params.q,
        h: cfg.params.h,
        theta_ig: cfg.params.theta_ig,
        theta_hl: cfg.params.theta_hl,
        theta_plus: model.theta_plus(),
        r_star: sol.r_star,
        c_star: sol.c_star,
        dx: sim_cfg.dx,
        final_time: sim_cfg.final_time,
        c_measured,
        speed_rel_error: (c_measured - sol.c_star).abs() / sol.c_star,
        drift_time: drift_cfg.final_time,
        drift: report.drift,
        translation_offset: report.translation_offset,
    };
    write_file(out, "report.json", json17::to_string(&pde).as_bytes())?;
    println!("c_star     = {}", fmt_g17(sol.c_star));
    println!("c_measured = {}", fmt_g17(c_measured));
    println!("rel_error  = {}", fmt_g17(pde.speed_rel_error));
    println!("drift      = {}", fmt_g17(report.drift));
    Ok(())
}
