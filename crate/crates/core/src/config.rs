//! Line-oriented `key = value` configuration with `[section]` headers.
//!
//! Parsing starts from the named scenario's recommended configuration and
//! applies the file's keys on top, so an empty file is a valid complete
//! run. Within a section keys are applied in canonical order, which makes
//! files order-insensitive (the variant selector of an enum-like key is
//! always applied before its parameters).

use std::collections::BTreeMap;

use crate::audit::AuditParams;
use crate::constitutive::{
    BoundaryFluxModel, ConductivityModel, CutoffParams, DissipationParams, MaterialModel,
    Modulation, PlasticViscosity,
};
use crate::error::{Result, SimError};
use crate::mechanics::SolverParams;

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub cfl_cap: f64,
    pub scenario: String,
    pub amplitude: f64,
    pub theta0: f64,
    pub perturbation: f64,
    pub gravity: [f64; 2],
    pub material_preset: String,
    pub material: MaterialModel,
    pub dissipation: DissipationParams,
    pub cutoff: CutoffParams,
    pub solver: SolverParams,
    pub audit: AuditParams,
    pub out_dir: String,
    pub snapshot_every: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        crate::scenario::recommended_config("static").expect("static scenario exists")
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    value.parse().map_err(|_| {
        SimError::Parse(format!("line {line}: key '{key}': expected a number, got '{value}'"))
    })
}

fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize> {
    value.parse().map_err(|_| {
        SimError::Parse(format!(
            "line {line}: key '{key}': expected a nonnegative integer, got '{value}'"
        ))
    })
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(SimError::Parse(format!(
            "line {line}: key '{key}': expected true or false, got '{value}'"
        ))),
    }
}

/// Canonical application order within each section; the parser walks this
/// list so variant selectors land before their parameters.
const SECTION_KEYS: &[(&str, &[&str])] = &[
    ("grid", &["nx", "ny", "lx", "ly"]),
    ("time", &["dt", "n_steps", "cfl_cap"]),
    (
        "scenario",
        &["name", "amplitude", "theta0", "perturbation", "gx", "gy"],
    ),
    (
        "material",
        &[
            "preset",
            "k_e",
            "g_e",
            "h_e",
            "c",
            "c1",
            "alpha",
            "viscosity",
            "m0",
            "theta_melt",
            "m_floor",
            "kappa",
            "rho_r",
            "flux",
            "flux_coeff",
            "flux_theta_ext",
            "modulation",
            "mod_gx",
            "mod_gy",
            "mod_scale",
            "mod_period",
        ],
    ),
    ("dissipation", &["nu0", "nu1", "nu2", "p", "q"]),
    ("cutoff", &["lambda", "enabled"]),
    (
        "solver",
        &[
            "lin_tol",
            "lin_max_iter",
            "picard_tol",
            "picard_max",
            "momentum_picard_iters",
        ],
    ),
    (
        "audit",
        &["include_hardening_in_total", "eps_scale", "theta_abort"],
    ),
    ("output", &["dir", "snapshot_every", "seed"]),
];

fn apply_key(cfg: &mut SolverConfig, section: &str, key: &str, value: &str, line: usize) -> Result<()> {
    match (section, key) {
        ("grid", "nx") => cfg.nx = parse_usize(key, value, line)?,
        ("grid", "ny") => cfg.ny = parse_usize(key, value, line)?,
        ("grid", "lx") => cfg.lx = parse_f64(key, value, line)?,
        ("grid", "ly") => cfg.ly = parse_f64(key, value, line)?,
        ("time", "dt") => cfg.dt = parse_f64(key, value, line)?,
        ("time", "n_steps") => cfg.n_steps = parse_usize(key, value, line)?,
        ("time", "cfl_cap") => cfg.cfl_cap = parse_f64(key, value, line)?,
        ("scenario", "name") => {} // consumed up front
        ("scenario", "amplitude") => cfg.amplitude = parse_f64(key, value, line)?,
        ("scenario", "theta0") => cfg.theta0 = parse_f64(key, value, line)?,
        ("scenario", "perturbation") => cfg.perturbation = parse_f64(key, value, line)?,
        ("scenario", "gx") => cfg.gravity[0] = parse_f64(key, value, line)?,
        ("scenario", "gy") => cfg.gravity[1] = parse_f64(key, value, line)?,
        ("material", "preset") => {
            cfg.material = crate::constitutive::material_preset(value).map_err(|_| {
                SimError::Parse(format!("line {line}: unknown material preset '{value}'"))
            })?;
            cfg.material_preset = value.to_string();
        }
        ("material", "k_e") => cfg.material.k_e = parse_f64(key, value, line)?,
        ("material", "g_e") => cfg.material.g_e = parse_f64(key, value, line)?,
        ("material", "h_e") => cfg.material.h_e = parse_f64(key, value, line)?,
        ("material", "c") => cfg.material.c = parse_f64(key, value, line)?,
        ("material", "c1") => cfg.material.c1 = parse_f64(key, value, line)?,
        ("material", "alpha") => cfg.material.alpha = parse_f64(key, value, line)?,
        ("material", "viscosity") => {
            cfg.material.viscosity = match value {
                "constant" => PlasticViscosity::Constant(1.0),
                "melting_ramp" => PlasticViscosity::MeltingRamp {
                    m0: 1.0,
                    theta_melt: 3.0,
                    m_floor: 0.05,
                },
                _ => {
                    return Err(SimError::Parse(format!(
                        "line {line}: viscosity must be 'constant' or 'melting_ramp', got '{value}'"
                    )))
                }
            }
        }
        ("material", "m0") => {
            let v = parse_f64(key, value, line)?;
            match &mut cfg.material.viscosity {
                PlasticViscosity::Constant(m) => *m = v,
                PlasticViscosity::MeltingRamp { m0, .. } => *m0 = v,
            }
        }
        ("material", "theta_melt") => {
            let v = parse_f64(key, value, line)?;
            if let PlasticViscosity::MeltingRamp { theta_melt, .. } = &mut cfg.material.viscosity {
                *theta_melt = v;
            }
        }
        ("material", "m_floor") => {
            let v = parse_f64(key, value, line)?;
            if let PlasticViscosity::MeltingRamp { m_floor, .. } = &mut cfg.material.viscosity {
                *m_floor = v;
            }
        }
        ("material", "kappa") => {
            cfg.material.conductivity = ConductivityModel::Constant(parse_f64(key, value, line)?)
        }
        ("material", "rho_r") => cfg.material.rho_r = parse_f64(key, value, line)?,
        ("material", "flux") => {
            cfg.material.boundary_flux = match value {
                "insulated" => BoundaryFluxModel::Insulated,
                "newton" => BoundaryFluxModel::NewtonCooling {
                    coeff: 1.0,
                    theta_ext: 1.0,
                },
                _ => {
                    return Err(SimError::Parse(format!(
                        "line {line}: flux must be 'insulated' or 'newton', got '{value}'"
                    )))
                }
            }
        }
        ("material", "flux_coeff") => {
            let v = parse_f64(key, value, line)?;
            if let BoundaryFluxModel::NewtonCooling { coeff, .. } = &mut cfg.material.boundary_flux
            {
                *coeff = v;
            }
        }
        ("material", "flux_theta_ext") => {
            let v = parse_f64(key, value, line)?;
            if let BoundaryFluxModel::NewtonCooling { theta_ext, .. } =
                &mut cfg.material.boundary_flux
            {
                *theta_ext = v;
            }
        }
        ("material", "modulation") => {
            cfg.material.modulation = match value {
                "uniform" => Modulation::Uniform,
                "linear" => Modulation::Linear { gx: 0.0, gy: 0.0 },
                "checkerboard" => Modulation::Checkerboard {
                    scale: 3.0,
                    period: 0.25,
                },
                _ => {
                    return Err(SimError::Parse(format!(
                        "line {line}: modulation must be 'uniform', 'linear' or 'checkerboard'"
                    )))
                }
            }
        }
        ("material", "mod_gx") => {
            let v = parse_f64(key, value, line)?;
            if let Modulation::Linear { gx, .. } = &mut cfg.material.modulation {
                *gx = v;
            }
        }
        ("material", "mod_gy") => {
            let v = parse_f64(key, value, line)?;
            if let Modulation::Linear { gy, .. } = &mut cfg.material.modulation {
                *gy = v;
            }
        }
        ("material", "mod_scale") => {
            let v = parse_f64(key, value, line)?;
            if let Modulation::Checkerboard { scale, .. } = &mut cfg.material.modulation {
                *scale = v;
            }
        }
        ("material", "mod_period") => {
            let v = parse_f64(key, value, line)?;
            if let Modulation::Checkerboard { period, .. } = &mut cfg.material.modulation {
                *period = v;
            }
        }
        ("dissipation", "nu0") => cfg.dissipation.nu0 = parse_f64(key, value, line)?,
        ("dissipation", "nu1") => cfg.dissipation.nu1 = parse_f64(key, value, line)?,
        ("dissipation", "nu2") => cfg.dissipation.nu2 = parse_f64(key, value, line)?,
        ("dissipation", "p") => cfg.dissipation.p = parse_f64(key, value, line)?,
        ("dissipation", "q") => cfg.dissipation.q = parse_f64(key, value, line)?,
        ("cutoff", "lambda") => cfg.cutoff.lambda = parse_f64(key, value, line)?,
        ("cutoff", "enabled") => cfg.cutoff.enabled = parse_bool(key, value, line)?,
        ("solver", "lin_tol") => cfg.solver.lin_tol = parse_f64(key, value, line)?,
        ("solver", "lin_max_iter") => cfg.solver.lin_max_iter = parse_usize(key, value, line)?,
        ("solver", "picard_tol") => cfg.solver.picard_tol = parse_f64(key, value, line)?,
        ("solver", "picard_max") => cfg.solver.picard_max = parse_usize(key, value, line)?,
        ("solver", "momentum_picard_iters") => {
            cfg.solver.momentum_picard_iters = parse_usize(key, value, line)?
        }
        ("audit", "include_hardening_in_total") => {
            cfg.audit.include_hardening_in_total = parse_bool(key, value, line)?
        }
        ("audit", "eps_scale") => cfg.audit.eps_scale = parse_f64(key, value, line)?,
        ("audit", "theta_abort") => cfg.audit.theta_abort = parse_f64(key, value, line)?,
        ("output", "dir") => cfg.out_dir = value.to_string(),
        ("output", "snapshot_every") => cfg.snapshot_every = parse_usize(key, value, line)?,
        ("output", "seed") => cfg.seed = parse_usize(key, value, line)? as u64,
        _ => {
            return Err(SimError::Parse(format!(
                "line {line}: unknown key '{key}' in section [{section}]"
            )))
        }
    }
    Ok(())
}

/// Parses and validates a configuration. Returns the resolved config plus
/// non-fatal warnings (e.g. exponents at the analysis boundary).
pub fn parse_config(text: &str) -> Result<(SolverConfig, Vec<String>)> {
    // lexical pass
    let mut entries: BTreeMap<(String, String), (String, usize)> = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if stripped.is_empty() {
            continue;
        }
        if let Some(name) = stripped.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| SimError::Parse(format!("line {line}: malformed section header")))?
                .trim()
                .to_string();
            if !SECTION_KEYS.iter().any(|(s, _)| *s == name) {
                return Err(SimError::Parse(format!(
                    "line {line}: unknown section [{name}]"
                )));
            }
            section = name;
            continue;
        }
        let (key, value) = stripped.split_once('=').ok_or_else(|| {
            SimError::Parse(format!("line {line}: expected 'key = value', got '{stripped}'"))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if section.is_empty() {
            return Err(SimError::Parse(format!(
                "line {line}: key '{key}' appears before any [section] header"
            )));
        }
        let known = SECTION_KEYS
            .iter()
            .find(|(s, _)| *s == section)
            .map(|(_, keys)| keys.contains(&key.as_str()))
            .unwrap_or(false);
        if !known {
            return Err(SimError::Parse(format!(
                "line {line}: unknown key '{key}' in section [{section}]"
            )));
        }
        if entries
            .insert((section.clone(), key.clone()), (value, line))
            .is_some()
        {
            return Err(SimError::Parse(format!(
                "line {line}: duplicate key '{key}' in section [{section}]"
            )));
        }
    }

    // scenario name first: it decides the recommended defaults
    let scenario = entries
        .get(&("scenario".to_string(), "name".to_string()))
        .map(|(v, _)| v.clone())
        .unwrap_or_else(|| "static".to_string());
    let mut cfg = crate::scenario::recommended_config(&scenario)?;

    // apply keys in canonical order
    for (section, keys) in SECTION_KEYS {
        for key in keys.iter() {
            if let Some((value, line)) = entries.get(&(section.to_string(), key.to_string())) {
                apply_key(&mut cfg, section, key, value, *line)?;
            }
        }
    }

    let warnings = validate(&cfg)?;
    Ok((cfg, warnings))
}

/// Structural validation; returns warnings for admissible but
/// hypothesis-stretching settings.
pub fn validate(cfg: &SolverConfig) -> Result<Vec<String>> {
    if cfg.dt <= 0.0 {
        return Err(SimError::Validation("dt must be > 0".into()));
    }
    if cfg.n_steps < 1 {
        return Err(SimError::Validation("n_steps must be >= 1".into()));
    }
    if cfg.nx < 8 || cfg.ny < 8 {
        return Err(SimError::Validation("grid must be at least 8 x 8".into()));
    }
    if cfg.lx <= 0.0 || cfg.ly <= 0.0 {
        return Err(SimError::Validation("grid extent must be positive".into()));
    }
    if !(cfg.cfl_cap > 0.0 && cfg.cfl_cap <= 0.95) {
        return Err(SimError::Validation(
            "cfl_cap must lie in (0, 0.95]".into(),
        ));
    }
    if cfg.snapshot_every == 0 {
        return Err(SimError::Validation("snapshot_every must be >= 1".into()));
    }
    if !crate::scenario::scenario_names().contains(&cfg.scenario.as_str()) {
        return Err(SimError::UnknownName {
            name: cfg.scenario.clone(),
        });
    }
    cfg.material.validate()?;
    cfg.cutoff.validate()?;
    let mut warnings = cfg.dissipation.validate(2)?;
    if cfg.theta0 < 0.0 {
        return Err(SimError::Validation(
            "initial temperature must be >= 0".into(),
        ));
    }
    if cfg.perturbation < 0.0 {
        return Err(SimError::Validation("perturbation must be >= 0".into()));
    }
    if cfg.solver.lin_tol <= 0.0 || cfg.solver.lin_max_iter == 0 {
        return Err(SimError::Validation(
            "solver tolerances must be positive".into(),
        ));
    }
    if cfg.material.c1 < 1e-6 {
        warnings.push(format!(
            "thermal coupling c1 = {} is effectively zero; adiabatic effects are disabled",
            cfg.material.c1
        ));
    }
    Ok(warnings)
}

/// Canonical full serialization; `parse_config(serialize(cfg))`
/// reconstructs an identical configuration.
pub fn serialize(cfg: &SolverConfig) -> String {
    let mut s = String::new();
    use std::fmt::Write;
    writeln!(s, "[grid]").unwrap();
    writeln!(s, "nx = {}", cfg.nx).unwrap();
    writeln!(s, "ny = {}", cfg.ny).unwrap();
    writeln!(s, "lx = {}", cfg.lx).unwrap();
    writeln!(s, "ly = {}", cfg.ly).unwrap();
    writeln!(s, "\n[time]").unwrap();
    writeln!(s, "dt = {}", cfg.dt).unwrap();
    writeln!(s, "n_steps = {}", cfg.n_steps).unwrap();
    writeln!(s, "cfl_cap = {}", cfg.cfl_cap).unwrap();
    writeln!(s, "\n[scenario]").unwrap();
    writeln!(s, "name = {}", cfg.scenario).unwrap();
    writeln!(s, "amplitude = {}", cfg.amplitude).unwrap();
    writeln!(s, "theta0 = {}", cfg.theta0).unwrap();
    writeln!(s, "perturbation = {}", cfg.perturbation).unwrap();
    writeln!(s, "gx = {}", cfg.gravity[0]).unwrap();
    writeln!(s, "gy = {}", cfg.gravity[1]).unwrap();
    writeln!(s, "\n[material]").unwrap();
    writeln!(s, "preset = {}", cfg.material_preset).unwrap();
    writeln!(s, "k_e = {}", cfg.material.k_e).unwrap();
    writeln!(s, "g_e = {}", cfg.material.g_e).unwrap();
    writeln!(s, "h_e = {}", cfg.material.h_e).unwrap();
    writeln!(s, "c = {}", cfg.material.c).unwrap();
    writeln!(s, "c1 = {}", cfg.material.c1).unwrap();
    writeln!(s, "alpha = {}", cfg.material.alpha).unwrap();
    match &cfg.material.viscosity {
        PlasticViscosity::Constant(m) => {
            writeln!(s, "viscosity = constant").unwrap();
            writeln!(s, "m0 = {m}").unwrap();
        }
        PlasticViscosity::MeltingRamp {
            m0,
            theta_melt,
            m_floor,
        } => {
            writeln!(s, "viscosity = melting_ramp").unwrap();
            writeln!(s, "m0 = {m0}").unwrap();
            writeln!(s, "theta_melt = {theta_melt}").unwrap();
            writeln!(s, "m_floor = {m_floor}").unwrap();
        }
    }
    let ConductivityModel::Constant(kap) = &cfg.material.conductivity;
    writeln!(s, "kappa = {kap}").unwrap();
    writeln!(s, "rho_r = {}", cfg.material.rho_r).unwrap();
    match &cfg.material.boundary_flux {
        BoundaryFluxModel::Insulated => writeln!(s, "flux = insulated").unwrap(),
        BoundaryFluxModel::NewtonCooling { coeff, theta_ext } => {
            writeln!(s, "flux = newton").unwrap();
            writeln!(s, "flux_coeff = {coeff}").unwrap();
            writeln!(s, "flux_theta_ext = {theta_ext}").unwrap();
        }
    }
    match &cfg.material.modulation {
        Modulation::Uniform => writeln!(s, "modulation = uniform").unwrap(),
        Modulation::Linear { gx, gy } => {
            writeln!(s, "modulation = linear").unwrap();
            writeln!(s, "mod_gx = {gx}").unwrap();
            writeln!(s, "mod_gy = {gy}").unwrap();
        }
        Modulation::Checkerboard { scale, period } => {
            writeln!(s, "modulation = checkerboard").unwrap();
            writeln!(s, "mod_scale = {scale}").unwrap();
            writeln!(s, "mod_period = {period}").unwrap();
        }
    }
    writeln!(s, "\n[dissipation]").unwrap();
    writeln!(s, "nu0 = {}", cfg.dissipation.nu0).unwrap();
    writeln!(s, "nu1 = {}", cfg.dissipation.nu1).unwrap();
    writeln!(s, "nu2 = {}", cfg.dissipation.nu2).unwrap();
    writeln!(s, "p = {}", cfg.dissipation.p).unwrap();
    writeln!(s, "q = {}", cfg.dissipation.q).unwrap();
    writeln!(s, "\n[cutoff]").unwrap();
    writeln!(s, "lambda = {}", cfg.cutoff.lambda).unwrap();
    writeln!(s, "enabled = {}", cfg.cutoff.enabled).unwrap();
    writeln!(s, "\n[solver]").unwrap();
    writeln!(s, "lin_tol = {}", cfg.solver.lin_tol).unwrap();
    writeln!(s, "lin_max_iter = {}", cfg.solver.lin_max_iter).unwrap();
    writeln!(s, "picard_tol = {}", cfg.solver.picard_tol).unwrap();
    writeln!(s, "picard_max = {}", cfg.solver.picard_max).unwrap();
    writeln!(
        s,
        "momentum_picard_iters = {}",
        cfg.solver.momentum_picard_iters
    )
    .unwrap();
    writeln!(s, "\n[audit]").unwrap();
    writeln!(
        s,
        "include_hardening_in_total = {}",
        cfg.audit.include_hardening_in_total
    )
    .unwrap();
    writeln!(s, "eps_scale = {}", cfg.audit.eps_scale).unwrap();
    writeln!(s, "theta_abort = {}", cfg.audit.theta_abort).unwrap();
    writeln!(s, "\n[output]").unwrap();
    writeln!(s, "dir = {}", cfg.out_dir).unwrap();
    writeln!(s, "snapshot_every = {}", cfg.snapshot_every).unwrap();
    writeln!(s, "seed = {}", cfg.seed).unwrap();
    s
}

/// SHA-256 of the canonical serialization, for the run manifest.
pub fn config_hash(cfg: &SolverConfig) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(serialize(cfg).as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
