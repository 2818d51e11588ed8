//! Time-stepping driver: operator-split step sequence
//! transport -> momentum -> flow rule -> thermal -> audit, plus run
//! artifacts (energies.csv, field snapshots, manifest.txt).

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::audit::{build_report, EnergyReport, CSV_HEADER};
use crate::config::{config_hash, serialize, SolverConfig};
use crate::error::{Result, SimError};
use crate::fields::Grid;
use crate::mechanics::{flow_rule_step, momentum_step};
use crate::snapshot::write_state;
use crate::tensorkin::det;
use crate::thermal::{assemble_sources, heat_step, temperature_nonnegativity_monitor};
use crate::transport::{
    advect_plastic_distortion, advect_reference_map, derived_kinematics, renormalize_isochoric,
    StateFields,
};

/// An in-memory simulation; output writing is separate so library tests
/// can run without touching the filesystem.
pub struct Simulation {
    pub config: SolverConfig,
    pub grid: Grid,
    pub state: StateFields,
    pub step_index: usize,
    pub reports: Vec<EnergyReport>,
    /// Largest per-step |det Fp - 1| observed before renormalization.
    pub max_pre_renorm_det_dev: f64,
    /// Validation warnings captured at construction.
    pub warnings: Vec<String>,
}

impl Simulation {
    pub fn new(config: SolverConfig) -> Result<Self> {
        let warnings = crate::config::validate(&config)?;
        let grid = Grid::new(config.nx, config.ny, config.lx, config.ly)?;
        let state = crate::scenario::initial_state(&grid, &config)?;

        let mut sim = Simulation {
            config,
            grid,
            state,
            step_index: 0,
            reports: Vec::new(),
            max_pre_renorm_det_dev: 0.0,
            warnings,
        };
        let report0 = sim.report_for_current_state(0.0)?;
        sim.reports.push(report0);
        Ok(sim)
    }

    fn report_for_current_state(&self, boundary_heat_in: f64) -> Result<EnergyReport> {
        let kin = derived_kinematics(&self.grid, &self.state)?;
        let sources = assemble_sources(
            &self.grid,
            &self.state.xi,
            &self.state.theta,
            &kin,
            &self.state.v,
            &self.state.lp,
            &self.config.material,
            &self.config.dissipation,
            &self.config.cutoff,
        )?;
        build_report(
            &self.grid,
            &self.state,
            &self.config.material,
            self.config.gravity,
            &sources.dissipative,
            &sources.adiabatic,
            boundary_heat_in,
            &self.config.audit,
            self.step_index,
            self.reports.last(),
            self.config.dt,
        )
    }

    /// Advances one step and appends the step's report.
    pub fn step(&mut self) -> Result<()> {
        let cfg = &self.config;
        let dt = cfg.dt;
        let cap = cfg.cfl_cap;

        // quarantine guard: constitutive laws must never see a state
        // below the hard temperature floor
        let pre_monitor =
            temperature_nonnegativity_monitor(&self.grid, &self.state.theta, cfg.material.alpha);
        if pre_monitor.min_theta < cfg.audit.theta_abort {
            return Err(SimError::InvariantViolation(format!(
                "temperature fell to {} (abort threshold {})",
                pre_monitor.min_theta, cfg.audit.theta_abort
            )));
        }

        // transport (plastic update uses the previous step's rate)
        let xi_new = advect_reference_map(&self.grid, &self.state.xi, &self.state.v, dt, cap)?;
        let fp_adv = advect_plastic_distortion(
            &self.grid,
            &self.state.fp,
            &self.state.v,
            &self.state.lp,
            dt,
            cap,
        )?;
        let pre_dev = fp_adv
            .data
            .iter()
            .fold(0.0f64, |m, t| m.max((det(t) - 1.0).abs()));
        self.max_pre_renorm_det_dev = self.max_pre_renorm_det_dev.max(pre_dev);
        let fp_new = renormalize_isochoric(&fp_adv)?;

        let mut work = self.state.clone();
        work.xi = xi_new;
        work.fp = fp_new;
        let kin = derived_kinematics(&self.grid, &work)?;

        // momentum
        let (v_new, _ws) = momentum_step(
            &self.grid,
            &work,
            &kin,
            &cfg.material,
            &cfg.dissipation,
            &cfg.cutoff,
            cfg.gravity,
            dt,
            cap,
            &cfg.solver,
        )?;
        work.v = v_new;

        // flow rule
        let lp_new = flow_rule_step(
            &self.grid,
            &work,
            &kin,
            &cfg.material,
            &cfg.dissipation,
            &cfg.cutoff,
            &cfg.solver,
        )?;

        // thermal
        let sources = assemble_sources(
            &self.grid,
            &work.xi,
            &work.theta,
            &kin,
            &work.v,
            &lp_new,
            &cfg.material,
            &cfg.dissipation,
            &cfg.cutoff,
        )?;
        let heat = heat_step(
            &self.grid,
            &self.state.w,
            &self.state.theta,
            &work.xi,
            &kin,
            &work.v,
            &sources,
            &cfg.material,
            dt,
            self.state.t,
            &cfg.solver,
        )?;

        work.w = heat.w;
        work.theta = heat.theta;
        work.lp = lp_new;
        work.t = self.state.t + dt;
        crate::transport::apply_boundary_conditions(&self.grid, &mut work);
        self.state = work;
        self.step_index += 1;

        // monitors
        let monitor =
            temperature_nonnegativity_monitor(&self.grid, &self.state.theta, cfg.material.alpha);
        if monitor.min_theta < cfg.audit.theta_abort {
            return Err(SimError::InvariantViolation(format!(
                "temperature fell to {} (abort threshold {})",
                monitor.min_theta, cfg.audit.theta_abort
            )));
        }
        if !self.state.all_finite() {
            return Err(SimError::InvariantViolation(
                "non-finite value in state fields".into(),
            ));
        }

        let report = build_report(
            &self.grid,
            &self.state,
            &cfg.material,
            cfg.gravity,
            &sources.dissipative,
            &sources.adiabatic,
            heat.boundary_heat_in,
            &cfg.audit,
            self.step_index,
            self.reports.last(),
            dt,
        )?;
        self.reports.push(report);
        Ok(())
    }

    /// Runs the configured number of steps without writing artifacts.
    pub fn run_in_memory(&mut self) -> Result<()> {
        for _ in 0..self.config.n_steps {
            self.step()?;
        }
        Ok(())
    }
}

/// Artifacts of an on-disk run.
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub reports: Vec<EnergyReport>,
    pub max_pre_renorm_det_dev: f64,
    pub warnings: Vec<String>,
}

fn write_manifest(dir: &Path, cfg: &SolverConfig) -> Result<()> {
    let manifest = format!(
        "config_hash = {}\nversion = {}\nscenario = {}\ngrid = {}x{}\ndt = {}\nn_steps = {}\nlin_tol = {}\nlin_max_iter = {}\npicard_tol = {}\npicard_max = {}\ntheta_abort = {}\neps_scale = {}\ndet_fp_tolerance = 1e-8\nenthalpy_roundtrip_tolerance = 1e-9\n",
        config_hash(cfg),
        env!("CARGO_PKG_VERSION"),
        cfg.scenario,
        cfg.nx,
        cfg.ny,
        cfg.dt,
        cfg.n_steps,
        cfg.solver.lin_tol,
        cfg.solver.lin_max_iter,
        cfg.solver.picard_tol,
        cfg.solver.picard_max,
        cfg.audit.theta_abort,
        cfg.audit.eps_scale,
    );
    std::fs::write(dir.join("manifest.txt"), manifest)?;
    Ok(())
}

/// Executes the configured scenario end to end, writing `energies.csv`,
/// `manifest.txt`, the resolved config, and field snapshots (step 0 and
/// the final step always included).
pub fn run_scenario(config: &SolverConfig, out_dir: &Path) -> Result<RunArtifacts> {
    std::fs::create_dir_all(out_dir)?;
    let mut sim = Simulation::new(config.clone())?;
    write_manifest(out_dir, &sim.config)?;
    std::fs::write(out_dir.join("config.resolved"), serialize(&sim.config))?;

    let fields_dir = out_dir.join("fields");
    let mut csv = std::io::BufWriter::new(std::fs::File::create(out_dir.join("energies.csv"))?);
    writeln!(csv, "{CSV_HEADER}")?;
    writeln!(csv, "{}", crate::audit::csv_row(&sim.reports[0]))?;
    write_state(&fields_dir, &sim.grid, &sim.state, 0)?;

    let n_steps = sim.config.n_steps;
    for step in 1..=n_steps {
        sim.step()?;
        writeln!(csv, "{}", crate::audit::csv_row(sim.reports.last().unwrap()))?;
        if step % sim.config.snapshot_every == 0 || step == n_steps {
            write_state(&fields_dir, &sim.grid, &sim.state, step)?;
        }
    }
    csv.flush()?;

    Ok(RunArtifacts {
        out_dir: out_dir.to_path_buf(),
        reports: sim.reports,
        max_pre_renorm_det_dev: sim.max_pre_renorm_det_dev,
        warnings: sim.warnings,
    })
}

/// Recomputes energy reports from stored snapshots (the `audit` verb).
/// Rate terms are state formulas, so every row is reproducible; balance
/// residuals are filled only between consecutive snapshot steps.
pub fn recompute_reports(config: &SolverConfig, out_dir: &Path) -> Result<Vec<EnergyReport>> {
    let grid = Grid::new(config.nx, config.ny, config.lx, config.ly)?;
    let fields_dir = out_dir.join("fields");
    let steps = crate::snapshot::snapshot_steps(&fields_dir)?;
    if steps.is_empty() {
        return Err(SimError::Validation(format!(
            "no snapshots found under {}",
            fields_dir.display()
        )));
    }
    let mut reports: Vec<EnergyReport> = Vec::new();
    let mut prev: Option<(usize, EnergyReport)> = None;
    for &step in &steps {
        let t = step as f64 * config.dt;
        let state = crate::snapshot::read_state(&fields_dir, &grid, step, t)?;
        let kin = derived_kinematics(&grid, &state)?;
        let sources = assemble_sources(
            &grid,
            &state.xi,
            &state.theta,
            &kin,
            &state.v,
            &state.lp,
            &config.material,
            &config.dissipation,
            &config.cutoff,
        )?;
        let prev_report = match &prev {
            Some((prev_step, r)) if step == prev_step + 1 => Some(r),
            _ => None,
        };
        let report = build_report(
            &grid,
            &state,
            &config.material,
            config.gravity,
            &sources.dissipative,
            &sources.adiabatic,
            0.0,
            &config.audit,
            step,
            prev_report,
            config.dt,
        )?;
        reports.push(report);
        prev = Some((step, report));
    }
    Ok(reports)
}

/// Maps errors onto the documented process exit codes: 2 config error,
/// 3 solver failure, 4 invariant violation.
pub fn exit_code_for(err: &SimError) -> i32 {
    match err {
        SimError::Parse(_) | SimError::Validation(_) | SimError::UnknownName { .. } => 2,
        SimError::InvariantViolation(_) | SimError::NegativeEnthalpy { .. } => 4,
        _ => 3,
    }
}
