//! Diagnostic scan for the free-decay audit scenario: isolates which
//! physics contributes the mechanical-balance residual floor.

use eplast_core::driver::Simulation;
use eplast_core::scenario::recommended_config;

struct Variant {
    label: &'static str,
    amp: f64,
    nu0: f64,
    k_e: f64,
    g_e: f64,
    m0: f64,
    steps: usize,
}

fn run_case(v: &Variant, dt_scale: f64) -> (f64, usize, f64) {
    let mut cfg = recommended_config("shear_heating").unwrap();
    cfg.amplitude = v.amp;
    cfg.dissipation.nu0 = v.nu0;
    cfg.dissipation.nu1 = 1e-6;
    cfg.dissipation.nu2 = 1e-6;
    cfg.material.k_e = v.k_e;
    cfg.material.g_e = v.g_e;
    cfg.material.viscosity = eplast_core::constitutive::PlasticViscosity::Constant(v.m0);
    let h = 1.0 / 64.0;
    cfg.dt = 0.5 * h / v.amp * dt_scale;
    cfg.n_steps = (v.steps as f64 / dt_scale) as usize;
    let mut sim = Simulation::new(cfg).unwrap();
    if let Err(e) = sim.run_in_memory() {
        println!("  FAILED: {e}");
        return (f64::NAN, 0, f64::NAN);
    }
    let peak_d = sim
        .reports
        .iter()
        .fold(0.0f64, |m, r| m.max(r.dissipation_rate));
    let (mut max_res, mut arg) = (0.0f64, 0usize);
    for (k, r) in sim.reports.iter().enumerate().skip(1) {
        if r.mech_residual > max_res {
            max_res = r.mech_residual;
            arg = k;
        }
    }
    let drift = (sim.reports.last().unwrap().total - sim.reports[0].total).abs()
        / sim.reports[0].total;
    (max_res / peak_d, arg, drift)
}

fn main() {
    let variants = [
        Variant { label: "baseline A=0.5", amp: 0.5, nu0: 0.05, k_e: 0.1, g_e: 0.05, m0: 2.0, steps: 300 },
        Variant { label: "no plasticity (M=1e9)", amp: 0.5, nu0: 0.05, k_e: 0.1, g_e: 0.05, m0: 1e9, steps: 300 },
        Variant { label: "fluid (K=G=0)", amp: 0.5, nu0: 0.05, k_e: 0.0, g_e: 0.0, m0: 2.0, steps: 300 },
        Variant { label: "stiffer visc nu0=0.2", amp: 0.5, nu0: 0.2, k_e: 0.1, g_e: 0.05, m0: 2.0, steps: 300 },
        Variant { label: "softer elastic K=.02 G=.01", amp: 0.5, nu0: 0.05, k_e: 0.02, g_e: 0.01, m0: 2.0, steps: 300 },
    ];
    for v in &variants {
        let (r1, a1, d1) = run_case(v, 1.0);
        let (r2, a2, d2) = run_case(v, 0.5);
        println!(
            "{}: res/peakD {r1:.3e} @step {a1} (half {r2:.3e} @ {a2}, ratio {:.2}); drift {d1:.2e} (half {d2:.2e}, ratio {:.2})",
            v.label,
            r1 / r2,
            d1 / d2
        );
    }
}
