use std::time::Instant;
use eplast_core::*;
fn main() {
    let cfg = scenario::recommended_config("shear_heating").unwrap();
    let mut sim = driver::Simulation::new(cfg).unwrap();
    // warmup
    sim.step().unwrap();
    let t0 = Instant::now();
    let grid = sim.grid;
    let state = sim.state.clone();
    let kin = transport::derived_kinematics(&grid, &state).unwrap();
    println!("derived_kinematics: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let c = sim.config.clone();
    let (_v, _) = mechanics::momentum_step(&grid, &state, &kin, &c.material, &c.dissipation, &c.cutoff, c.gravity, c.dt, c.cfl_cap, &c.solver).unwrap();
    println!("momentum_step: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let lp = mechanics::flow_rule_step(&grid, &state, &kin, &c.material, &c.dissipation, &c.cutoff, &c.solver).unwrap();
    println!("flow_rule_step: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let sources = thermal::assemble_sources(&grid, &state.xi, &state.theta, &kin, &state.v, &lp, &c.material, &c.dissipation, &c.cutoff).unwrap();
    println!("assemble_sources: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let _h = thermal::heat_step(&grid, &state.w, &state.theta, &state.xi, &kin, &state.v, &sources, &c.material, c.dt, 0.0, &c.solver).unwrap();
    println!("heat_step: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let _r = audit::build_report(&grid, &state, &c.material, c.gravity, &sources.dissipative, &sources.adiabatic, 0.0, &c.audit, 1, None, c.dt).unwrap();
    println!("build_report: {:?}", t0.elapsed());

    let t0 = Instant::now();
    for _ in 0..3 { sim.step().unwrap(); }
    println!("3 full steps: {:?}", t0.elapsed());
}
