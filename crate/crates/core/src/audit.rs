//! Per-step energy functionals and the residuals of the two balance laws;
//! the simulator's primary verification surface.
//!
//! Every energy integral is recomputed from state alone so reports are
//! reproducible from snapshots; the rate terms (dissipation, adiabatic
//! exchange, boundary influx) are shared bit-for-bit with the thermal
//! step. All reductions use fixed-order pairwise summation.

use crate::constitutive::MaterialModel;
use crate::error::Result;
use crate::fields::{pairwise_sum, Grid, ScalarField};
use crate::tensorkin::det;
use crate::transport::{
    advect_scalar, advect_tensor, departure_offsets, derived_kinematics, Kinematics, StateFields,
};

/// One row of the energy audit.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnergyReport {
    pub step: usize,
    pub t: f64,
    /// sum det(grad xi) rho_R |v|^2/2 (J).
    pub kinetic: f64,
    /// sum det(grad xi) phi(Fe) (J).
    pub stored: f64,
    /// sum det(grad xi) phihat(Fp) (J).
    pub hardening: f64,
    /// sum w (J).
    pub heat: f64,
    /// Conserved total; includes hardening when the audit switch says so.
    pub total: f64,
    /// Total derived mass sum rho_R(xi) det(grad xi) (kg).
    pub mass: f64,
    /// sum xi_d (W), nonnegative.
    pub dissipation_rate: f64,
    /// sum det(grad xi) rho_R g . v (W).
    pub gravity_power: f64,
    /// Boundary heat influx applied by the thermal step (W).
    pub boundary_heat_in: f64,
    /// Energy flow rate from heat into mechanics (W); enters the two
    /// balances with opposite signs.
    pub adiabatic_exchange: f64,
    pub mech_residual: f64,
    pub total_residual: f64,
    pub mech_residual_rel: f64,
    pub total_residual_rel: f64,
    pub min_theta: f64,
    pub max_det_fp_dev: f64,
    pub cfl: f64,
}

/// Audit configuration: scale floor for dimensionless ratios and the
/// switch counting hardening inside the conserved total.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditParams {
    pub include_hardening_in_total: bool,
    pub eps_scale: f64,
    /// Hard abort threshold for min theta (exit code 4 below this).
    pub theta_abort: f64,
}

impl Default for AuditParams {
    fn default() -> Self {
        AuditParams {
            include_hardening_in_total: true,
            eps_scale: 1e-12,
            theta_abort: -1e-6,
        }
    }
}

/// State-derived energy integrals (everything except the rate terms).
pub fn state_energies(
    grid: &Grid,
    state: &StateFields,
    kin: &Kinematics,
    material: &MaterialModel,
) -> Result<(f64, f64, f64, f64)> {
    let n = grid.n_cells();
    let mut kin_e = vec![0.0; n];
    let mut sto_e = vec![0.0; n];
    let mut hard_e = vec![0.0; n];
    for c in 0..n {
        let x = state.xi.data[c];
        let jinv = kin.det_grad_xi.data[c];
        let v = state.v.data[c];
        kin_e[c] = 0.5 * jinv * material.rho_ref(x) * (v[0] * v[0] + v[1] * v[1]);
        sto_e[c] = jinv * material.stored_energy(x, &kin.fe.data[c])?;
        hard_e[c] = jinv * material.hardening_energy(x, &state.fp.data[c]).0;
    }
    let vol = grid.cell_vol();
    Ok((
        pairwise_sum(&kin_e) * vol,
        pairwise_sum(&sto_e) * vol,
        pairwise_sum(&hard_e) * vol,
        pairwise_sum(&state.w.data) * vol,
    ))
}

/// Gravity power sum det(grad xi) rho_R g . v.
pub fn gravity_power(
    grid: &Grid,
    state: &StateFields,
    kin: &Kinematics,
    material: &MaterialModel,
    gravity: [f64; 2],
) -> f64 {
    let terms: Vec<f64> = (0..grid.n_cells())
        .map(|c| {
            let rho = material.rho_ref(state.xi.data[c]) * kin.det_grad_xi.data[c];
            rho * (gravity[0] * state.v.data[c][0] + gravity[1] * state.v.data[c][1])
        })
        .collect();
    pairwise_sum(&terms) * grid.cell_vol()
}

/// Assembles the report for a completed step. `dissipation` and
/// `adiabatic` are the per-cell source fields actually injected into the
/// thermal step; `adiabatic_exchange` is minus their integral.
#[allow(clippy::too_many_arguments)]
pub fn build_report(
    grid: &Grid,
    state: &StateFields,
    material: &MaterialModel,
    gravity: [f64; 2],
    dissipation: &ScalarField,
    adiabatic: &ScalarField,
    boundary_heat_in: f64,
    params: &AuditParams,
    step: usize,
    prev: Option<&EnergyReport>,
    dt: f64,
) -> Result<EnergyReport> {
    let kin = derived_kinematics(grid, state)?;
    let (kinetic, stored, hardening, heat) = state_energies(grid, state, &kin, material)?;
    let vol = grid.cell_vol();
    let dissipation_rate = pairwise_sum(&dissipation.data) * vol;
    let adiabatic_exchange = -pairwise_sum(&adiabatic.data) * vol;
    let grav = gravity_power(grid, state, &kin, material, gravity);
    let total = kinetic
        + stored
        + heat
        + if params.include_hardening_in_total {
            hardening
        } else {
            0.0
        };

    let mass_terms: Vec<f64> = (0..grid.n_cells())
        .map(|c| material.rho_ref(state.xi.data[c]) * kin.det_grad_xi.data[c])
        .collect();
    let mass = pairwise_sum(&mass_terms) * vol;

    let max_det_fp_dev = state
        .fp
        .data
        .iter()
        .fold(0.0f64, |m, t| m.max((det(t) - 1.0).abs()));
    let min_theta = state.theta.min();
    let cfl = crate::transport::cfl_number(grid, &state.v, dt);

    let mut report = EnergyReport {
        step,
        t: state.t,
        kinetic,
        stored,
        hardening,
        heat,
        total,
        mass,
        dissipation_rate,
        gravity_power: grav,
        boundary_heat_in,
        adiabatic_exchange,
        min_theta,
        max_det_fp_dev,
        cfl,
        ..Default::default()
    };

    if let Some(prev) = prev {
        report.mech_residual = mechanical_balance_residual(prev, &report, dt);
        report.total_residual = total_balance_residual(prev, &report, dt);
        let scale = report
            .dissipation_rate
            .max(report.gravity_power.abs())
            .max(params.eps_scale);
        report.mech_residual_rel = report.mech_residual / scale;
        report.total_residual_rel = report.total_residual / scale;
    }
    Ok(report)
}

/// Residual of the energy-dissipation balance over one step (W):
/// |d/dt (kinetic + stored + hardening) + dissipation - gravity power
///  - adiabatic exchange|.
pub fn mechanical_balance_residual(prev: &EnergyReport, curr: &EnergyReport, dt: f64) -> f64 {
    let mech_prev = prev.kinetic + prev.stored + prev.hardening;
    let mech_curr = curr.kinetic + curr.stored + curr.hardening;
    ((mech_curr - mech_prev) / dt + curr.dissipation_rate
        - curr.gravity_power
        - curr.adiabatic_exchange)
        .abs()
}

/// Residual of the total-energy balance over one step (W):
/// |d/dt total - boundary heat influx - gravity power|.
pub fn total_balance_residual(prev: &EnergyReport, curr: &EnergyReport, dt: f64) -> f64 {
    ((curr.total - prev.total) / dt - curr.boundary_heat_in - curr.gravity_power).abs()
}

/// Discrete residuals of the transport identities for the deformation
/// gradient, the Jacobian, and the continuity equation; diagnostic only.
#[derive(Clone, Copy, Debug)]
pub struct KinematicIdentityReport {
    /// Volume-averaged |(F' - advected F)/dt - (grad v) F'|.
    pub deformation_gradient_residual: f64,
    /// Volume-averaged |(J' - advected J)/dt - J' div v|.
    pub jacobian_residual: f64,
    /// Volume-weighted L1 continuity defect.
    pub continuity_residual: f64,
}

pub fn kinematic_identity_suite(
    grid: &Grid,
    prev: &StateFields,
    curr: &StateFields,
    material: &MaterialModel,
    dt: f64,
) -> Result<KinematicIdentityReport> {
    let kin_prev = derived_kinematics(grid, prev)?;
    let kin_curr = derived_kinematics(grid, curr)?;
    let n = grid.n_cells();

    let f_prev = crate::fields::TensorField {
        nx: grid.nx,
        ny: grid.ny,
        data: kin_prev
            .grad_xi
            .data
            .iter()
            .map(|g| crate::tensorkin::inverse(g).expect("det grad xi > 0"))
            .collect(),
    };
    let f_curr = crate::fields::TensorField {
        nx: grid.nx,
        ny: grid.ny,
        data: kin_curr
            .grad_xi
            .data
            .iter()
            .map(|g| crate::tensorkin::inverse(g).expect("det grad xi > 0"))
            .collect(),
    };
    let j_prev = ScalarField {
        nx: grid.nx,
        ny: grid.ny,
        data: f_prev.data.iter().map(det).collect(),
    };
    let j_curr = ScalarField {
        nx: grid.nx,
        ny: grid.ny,
        data: f_curr.data.iter().map(det).collect(),
    };

    let v = &curr.v;
    let dep = departure_offsets(grid, v, dt);
    let f_adv = advect_tensor(grid, &f_prev, &dep);
    let j_adv = advect_scalar(grid, &j_prev, &dep);
    let grad_v = crate::fields::gradient_vector(grid, v);
    let div_v = crate::fields::divergence_vec(grid, v);

    let mut f_res = vec![0.0; n];
    let mut j_res = vec![0.0; n];
    for c in 0..n {
        let rate = grad_v.data[c].matmul(&f_curr.data[c]);
        f_res[c] = f_curr.data[c]
            .sub(&f_adv.data[c])
            .scale(1.0 / dt)
            .sub(&rate)
            .norm();
        j_res[c] = ((j_curr.data[c] - j_adv.data[c]) / dt - j_curr.data[c] * div_v.data[c]).abs();
    }

    let rho_prev = crate::transport::derived_density(grid, &prev.xi, material)?;
    let rho_curr = crate::transport::derived_density(grid, &curr.xi, material)?;
    let continuity = crate::transport::continuity_residual(grid, &rho_prev, &rho_curr, v, dt);

    let volfrac = 1.0 / n as f64;
    Ok(KinematicIdentityReport {
        deformation_gradient_residual: pairwise_sum(&f_res) * volfrac,
        jacobian_residual: pairwise_sum(&j_res) * volfrac,
        continuity_residual: continuity,
    })
}

/// Fixed CSV column order; documented in the README.
pub const CSV_HEADER: &str = "step,t_s,kinetic_J,stored_J,hardening_J,heat_J,total_J,mass_kg,dissipation_W,gravity_power_W,boundary_heat_in_W,adiabatic_exchange_W,mech_residual_W,total_residual_W,mech_residual_rel,total_residual_rel,min_theta_K,max_det_fp_dev,cfl";

pub fn csv_row(r: &EnergyReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.step,
        r.t,
        r.kinetic,
        r.stored,
        r.hardening,
        r.heat,
        r.total,
        r.mass,
        r.dissipation_rate,
        r.gravity_power,
        r.boundary_heat_in,
        r.adiabatic_exchange,
        r.mech_residual,
        r.total_residual,
        r.mech_residual_rel,
        r.total_residual_rel,
        r.min_theta,
        r.max_det_fp_dev,
        r.cfl
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::material_preset;
    use crate::fields::{TensorField, VectorField};
    use crate::tensorkin::Tensor2;

    fn rest_state(grid: &Grid, theta0: f64, material: &MaterialModel) -> StateFields {
        let xi = VectorField::from_fn(grid, |i, j| grid.cell_center(i, j));
        let theta = ScalarField::new_fill(grid, theta0);
        let mut w = ScalarField::new_fill(grid, 0.0);
        for c in 0..grid.n_cells() {
            w.data[c] = material
                .heat_internal_energy(xi.data[c], &Tensor2::identity(2), theta0)
                .unwrap()
                .0;
        }
        StateFields {
            v: VectorField::new_fill(grid, [0.0, 0.0]),
            xi,
            fp: TensorField::new_fill(grid, Tensor2::identity(2)),
            w,
            theta,
            lp: TensorField::new_fill(grid, Tensor2::zero(2)),
            t: 0.0,
        }
    }

    #[test]
    fn static_state_has_zero_residuals() {
        let grid = Grid::new(16, 16, 1.0, 1.0).unwrap();
        let m = material_preset("neo_hookean_default").unwrap();
        let state = rest_state(&grid, 1.0, &m);
        let zeros = ScalarField::new_fill(&grid, 0.0);
        let params = AuditParams::default();
        let r0 = build_report(
            &grid, &state, &m, [0.0, 0.0], &zeros, &zeros, 0.0, &params, 0, None, 1e-3,
        )
        .unwrap();
        let r1 = build_report(
            &grid,
            &state,
            &m,
            [0.0, 0.0],
            &zeros,
            &zeros,
            0.0,
            &params,
            1,
            Some(&r0),
            1e-3,
        )
        .unwrap();
        assert_eq!(r1.mech_residual, 0.0);
        assert_eq!(r1.total_residual, 0.0);
        assert_eq!(r1.kinetic, 0.0);
        assert!(r1.stored.abs() < 1e-12);
        assert!(r1.heat > 0.0);
    }

    #[test]
    fn reports_are_reproducible_from_state() {
        let grid = Grid::new(16, 16, 1.0, 1.0).unwrap();
        let m = material_preset("neo_hookean_default").unwrap();
        let state = rest_state(&grid, 2.0, &m);
        let zeros = ScalarField::new_fill(&grid, 0.0);
        let params = AuditParams::default();
        let a = build_report(
            &grid, &state, &m, [0.0, -1.0], &zeros, &zeros, 0.0, &params, 0, None, 1e-3,
        )
        .unwrap();
        let b = build_report(
            &grid, &state, &m, [0.0, -1.0], &zeros, &zeros, 0.0, &params, 0, None, 1e-3,
        )
        .unwrap();
        assert_eq!(a.kinetic.to_bits(), b.kinetic.to_bits());
        assert_eq!(a.stored.to_bits(), b.stored.to_bits());
        assert_eq!(a.heat.to_bits(), b.heat.to_bits());
    }

    #[test]
    fn kinematic_suite_zero_velocity() {
        let grid = Grid::new(16, 16, 1.0, 1.0).unwrap();
        let m = material_preset("neo_hookean_default").unwrap();
        let state = rest_state(&grid, 1.0, &m);
        let r = kinematic_identity_suite(&grid, &state, &state, &m, 1e-3).unwrap();
        assert_eq!(r.deformation_gradient_residual, 0.0);
        assert_eq!(r.jacobian_residual, 0.0);
        assert_eq!(r.continuity_residual, 0.0);
    }

    #[test]
    fn csv_round_trip_format() {
        let r = EnergyReport {
            step: 3,
            t: 0.125,
            kinetic: 1.0 / 3.0,
            ..Default::default()
        };
        let row = csv_row(&r);
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        let third: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(third, 1.0 / 3.0, "shortest round-trip formatting");
    }
}
