//! Enthalpy-form heat equation step: semi-Lagrangian advection with the
//! compression correction, dissipative and adiabatic sources, an implicit
//! conduction solve in flux form (exactly conservative up to the boundary
//! flux), and per-cell temperature recovery by enthalpy inversion.
//!
//! The enthalpy w is the authoritative thermal state; theta is a derived
//! cache. Negative-temperature states never reach the constitutive laws:
//! the monitor quarantines round-off undershoot and the driver aborts on
//! anything below the hard floor.

use crate::constitutive::{cutoff_pi, det_lambda, CutoffParams, MaterialModel};
use crate::error::{Result, SimError};
use crate::fields::{
    divergence_vec, gradient_vector, pairwise_sum, Grid, ScalarField, TensorField,
    VectorField,
};
use crate::mechanics::SolverParams;
use crate::solver::conjugate_gradient;
use crate::transport::{departure_offsets, interp_scalar_at, Kinematics};

/// Per-cell heat sources for one step.
pub struct HeatSources {
    /// Dissipation rate density xi_d >= 0 (shared with the audit).
    pub dissipative: ScalarField,
    /// Signed adiabatic exchange density det(grad xi) gamma'_Fe : dFe.
    pub adiabatic: ScalarField,
}

/// Outcome of one thermal step.
pub struct HeatOutcome {
    pub w: ScalarField,
    pub theta: ScalarField,
    /// Total boundary heat influx actually applied (W).
    pub boundary_heat_in: f64,
    /// Total compression power actually applied (W), the -w div v term.
    pub compression_power: f64,
}

/// Report of the temperature non-negativity monitor; never mutates state.
#[derive(Clone, Copy, Debug)]
pub struct TemperatureMonitor {
    pub min_theta: f64,
    pub fraction_below_zero: f64,
    /// Lyapunov quantity: integral of |min(0, theta)|^{1+alpha} over the
    /// domain.
    pub neg_part_integral: f64,
}

/// Signed thermo-mechanical exchange density
/// det(grad xi) gamma'_Fe : (grad_v Fe - Fe Lp), with the cutoff applied
/// as pi_lambda / det_lambda when enabled.
pub fn adiabatic_power(
    grid: &Grid,
    xi: &VectorField,
    theta: &ScalarField,
    kin: &Kinematics,
    grad_v: &TensorField,
    lp: &TensorField,
    material: &MaterialModel,
    cutoff: &CutoffParams,
) -> Result<ScalarField> {
    let mut out = ScalarField::new_fill(grid, 0.0);
    for c in 0..grid.n_cells() {
        let fe = &kin.fe.data[c];
        let th = theta.data[c].max(0.0);
        let gam = material.thermal_energy(xi.data[c], fe, th)?;
        let rate = grad_v.data[c]
            .matmul(fe)
            .sub(&fe.matmul(&lp.data[c]));
        let contraction = gam.d_fe.ddot(&rate);
        out.data[c] = if cutoff.enabled {
            // det Fe / det_lambda is exactly 1 on the plateau, so the
            // regularized route degenerates to the plain one there
            let pi = cutoff_pi(fe, cutoff.lambda);
            let ratio = kin.det_fe.data[c] / det_lambda(fe, cutoff);
            kin.det_grad_xi.data[c] * contraction * (pi * ratio)
        } else {
            kin.det_grad_xi.data[c] * contraction
        };
    }
    Ok(out)
}

fn invert_with_guess(
    material: &MaterialModel,
    x: [f64; 2],
    fe: &crate::tensorkin::Tensor2,
    w: f64,
    guess: f64,
) -> Result<f64> {
    // cheap acceptance of the guess avoids perturbing static states
    if guess >= 0.0 {
        if let Ok((om, _)) = material.heat_internal_energy(x, fe, guess) {
            if om == w {
                return Ok(guess);
            }
        }
    }
    material.invert_enthalpy(x, fe, w)
}

/// Recovers the temperature field from enthalpy per cell.
pub fn invert_enthalpy_field(
    grid: &Grid,
    material: &MaterialModel,
    xi: &VectorField,
    kin: &Kinematics,
    w: &ScalarField,
    guess: &ScalarField,
) -> Result<ScalarField> {
    let mut theta = ScalarField::new_fill(grid, 0.0);
    for c in 0..grid.n_cells() {
        theta.data[c] = invert_with_guess(
            material,
            xi.data[c],
            &kin.fe.data[c],
            w.data[c],
            guess.data[c],
        )?;
    }
    Ok(theta)
}

/// One enthalpy-form heat step.
///
/// Order: semi-Lagrangian advection of w with the back-traced volume
/// change (1 - dt div v), explicit dissipative/adiabatic sources, implicit
/// conduction with kappa lagged at the step's start, final inversion
/// w -> theta.
#[allow(clippy::too_many_arguments)]
pub fn heat_step(
    grid: &Grid,
    w_old: &ScalarField,
    theta_old: &ScalarField,
    xi: &VectorField,
    kin: &Kinematics,
    v_new: &VectorField,
    sources: &HeatSources,
    material: &MaterialModel,
    dt: f64,
    t_now: f64,
    params: &SolverParams,
) -> Result<HeatOutcome> {
    let n = grid.n_cells();
    let vol = grid.cell_vol();

    // 1. advection with compression correction
    let dep = departure_offsets(grid, v_new, dt);
    let divv = divergence_vec(grid, v_new);
    let mut w_star = ScalarField::new_fill(grid, 0.0);
    let mut compression = vec![0.0; n];
    for c in 0..n {
        let w_adv = interp_scalar_at(grid, w_old, c % grid.nx, c / grid.nx, dep[c]);
        compression[c] = -w_adv * divv.data[c];
        let val = w_adv * (1.0 - dt * divv.data[c])
            + dt * (sources.dissipative.data[c] + sources.adiabatic.data[c]);
        if val < -1e-12 {
            return Err(SimError::NegativeEnthalpy {
                w: val,
                i: c % grid.nx,
                j: c / grid.nx,
            });
        }
        w_star.data[c] = val.max(0.0);
    }
    let compression_power = pairwise_sum(&compression) * vol;

    // 2. linearize the enthalpy around the advected state
    let theta_star = invert_enthalpy_field(grid, material, xi, kin, &w_star, theta_old)?;
    let mut capacity = vec![0.0; n];
    for c in 0..n {
        let (_, dom) = material.heat_internal_energy(xi.data[c], &kin.fe.data[c], theta_star.data[c])?;
        capacity[c] = dom;
    }

    // 3. conduction coefficients, lagged at the step's start temperature
    let kappa_cell: Vec<f64> = (0..n)
        .map(|c| material.kappa(xi.data[c], &kin.fe.data[c], theta_old.data[c].max(0.0)))
        .collect();
    let newton = match material.boundary_flux {
        crate::constitutive::BoundaryFluxModel::NewtonCooling { coeff, theta_ext } => {
            Some((coeff, theta_ext))
        }
        crate::constitutive::BoundaryFluxModel::Insulated => None,
    };

    let face_k_x = |i: usize, j: usize| {
        0.5 * (kappa_cell[grid.idx(i, j)] + kappa_cell[grid.idx(i + 1, j)])
    };
    let face_k_y = |i: usize, j: usize| {
        0.5 * (kappa_cell[grid.idx(i, j)] + kappa_cell[grid.idx(i, j + 1)])
    };
    let n_boundary_faces = |i: usize, j: usize| -> f64 {
        let mut faces = 0.0;
        if i == 0 {
            faces += grid.hy;
        }
        if i == grid.nx - 1 {
            faces += grid.hy;
        }
        if j == 0 {
            faces += grid.hx;
        }
        if j == grid.ny - 1 {
            faces += grid.hx;
        }
        faces
    };

    // SPD operator: (C vol / dt) theta + conduction + implicit Newton flux
    let apply = |x: &[f64], out: &mut [f64]| {
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let c = grid.idx(i, j);
                let mut acc = capacity[c] * vol / dt * x[c];
                if i > 0 {
                    acc += face_k_x(i - 1, j) * (x[c] - x[grid.idx(i - 1, j)]) / grid.hx * grid.hy;
                }
                if i + 1 < grid.nx {
                    acc += face_k_x(i, j) * (x[c] - x[grid.idx(i + 1, j)]) / grid.hx * grid.hy;
                }
                if j > 0 {
                    acc += face_k_y(i, j - 1) * (x[c] - x[grid.idx(i, j - 1)]) / grid.hy * grid.hx;
                }
                if j + 1 < grid.ny {
                    acc += face_k_y(i, j) * (x[c] - x[grid.idx(i, j + 1)]) / grid.hy * grid.hx;
                }
                if let Some((coeff, _)) = newton {
                    acc += coeff * n_boundary_faces(i, j) * x[c];
                }
                out[c] = acc;
            }
        }
    };

    let mut b = vec![0.0; n];
    let mut diag = vec![0.0; n];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.idx(i, j);
            b[c] = capacity[c] * vol / dt * theta_star.data[c];
            let mut d = capacity[c] * vol / dt;
            if i > 0 {
                d += face_k_x(i - 1, j) / grid.hx * grid.hy;
            }
            if i + 1 < grid.nx {
                d += face_k_x(i, j) / grid.hx * grid.hy;
            }
            if j > 0 {
                d += face_k_y(i, j - 1) / grid.hy * grid.hx;
            }
            if j + 1 < grid.ny {
                d += face_k_y(i, j) / grid.hy * grid.hx;
            }
            if let Some((coeff, theta_ext)) = newton {
                let faces = n_boundary_faces(i, j);
                d += coeff * faces;
                b[c] += coeff * theta_ext * faces;
            }
            diag[c] = d;
        }
    }

    let mut theta_new = theta_star.data.clone();
    conjugate_gradient(
        apply,
        &b,
        &mut theta_new,
        &diag,
        params.lin_tol,
        params.lin_max_iter,
        "conduction",
    )?;

    // 4. conservative enthalpy update from the solved fluxes
    let mut w_new = w_star.clone();
    let mut boundary_total = 0.0;
    let mut boundary_terms = Vec::new();
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.idx(i, j);
            let mut influx = 0.0;
            if i > 0 {
                influx +=
                    face_k_x(i - 1, j) * (theta_new[grid.idx(i - 1, j)] - theta_new[c]) / grid.hx
                        * grid.hy;
            }
            if i + 1 < grid.nx {
                influx += face_k_x(i, j) * (theta_new[grid.idx(i + 1, j)] - theta_new[c]) / grid.hx
                    * grid.hy;
            }
            if j > 0 {
                influx +=
                    face_k_y(i, j - 1) * (theta_new[grid.idx(i, j - 1)] - theta_new[c]) / grid.hy
                        * grid.hx;
            }
            if j + 1 < grid.ny {
                influx += face_k_y(i, j) * (theta_new[grid.idx(i, j + 1)] - theta_new[c]) / grid.hy
                    * grid.hx;
            }
            let faces = n_boundary_faces(i, j);
            if faces > 0.0 {
                let x = grid.cell_center(i, j);
                let h = match newton {
                    Some((coeff, theta_ext)) => coeff * (theta_ext - theta_new[c]),
                    None => material.h_flux(t_now, x, theta_new[c]),
                };
                influx += h * faces;
                boundary_terms.push(h * faces);
            }
            let val = w_new.data[c] + dt * influx / vol;
            if val < -1e-12 {
                return Err(SimError::NegativeEnthalpy {
                    w: val,
                    i,
                    j,
                });
            }
            w_new.data[c] = val.max(0.0);
        }
    }
    if !boundary_terms.is_empty() {
        boundary_total = pairwise_sum(&boundary_terms);
    }

    // 5. final inversion
    let theta_field = invert_enthalpy_field(grid, material, xi, kin, &w_new, &theta_star)?;

    Ok(HeatOutcome {
        w: w_new,
        theta: theta_field,
        boundary_heat_in: boundary_total,
        compression_power,
    })
}

/// Reports min theta, the volume fraction below zero, and the
/// (1+alpha)-power integral of the negative part.
pub fn temperature_nonnegativity_monitor(
    grid: &Grid,
    theta: &ScalarField,
    alpha: f64,
) -> TemperatureMonitor {
    let mut min_theta = f64::INFINITY;
    let mut below = 0usize;
    let mut terms = Vec::new();
    for &t in &theta.data {
        min_theta = min_theta.min(t);
        if t < 0.0 {
            below += 1;
            terms.push((-t).powf(1.0 + alpha));
        }
    }
    TemperatureMonitor {
        min_theta,
        fraction_below_zero: below as f64 / grid.n_cells() as f64,
        neg_part_integral: if terms.is_empty() {
            0.0
        } else {
            pairwise_sum(&terms) * grid.cell_vol()
        },
    }
}

/// Convenience wrapper building the heat sources from mechanics output.
#[allow(clippy::too_many_arguments)]
pub fn assemble_sources(
    grid: &Grid,
    xi: &VectorField,
    theta: &ScalarField,
    kin: &Kinematics,
    v_new: &VectorField,
    lp_new: &TensorField,
    material: &MaterialModel,
    diss: &crate::constitutive::DissipationParams,
    cutoff: &CutoffParams,
) -> Result<HeatSources> {
    let grad_v = gradient_vector(grid, v_new);
    let dissipative = crate::mechanics::dissipation_density(
        grid,
        v_new,
        lp_new,
        theta,
        material,
        diss,
        &kin.det_grad_xi,
    );
    let adiabatic = adiabatic_power(grid, xi, theta, kin, &grad_v, lp_new, material, cutoff)?;
    Ok(HeatSources {
        dissipative,
        adiabatic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{material_preset, BoundaryFluxModel, MaterialModel};
    use crate::fields::integrate;
    use crate::tensorkin::Tensor2;
    use crate::transport::{derived_kinematics, StateFields};

    fn grid() -> Grid {
        Grid::new(24, 24, 1.0, 1.0).unwrap()
    }

    fn rest_state(grid: &Grid, material: &MaterialModel, theta0: impl Fn(usize, usize) -> f64) -> StateFields {
        let xi = VectorField::from_fn(grid, |i, j| grid.cell_center(i, j));
        let theta = ScalarField::from_fn(grid, &theta0);
        let mut state = StateFields {
            v: VectorField::new_fill(grid, [0.0, 0.0]),
            xi,
            fp: TensorField::new_fill(grid, Tensor2::identity(2)),
            w: ScalarField::new_fill(grid, 0.0),
            theta,
            lp: TensorField::new_fill(grid, Tensor2::zero(2)),
            t: 0.0,
        };
        // enthalpy consistent with the derived elastic strain, exactly as
        // the driver constructs it
        let kin = derived_kinematics(grid, &state).unwrap();
        for c in 0..grid.n_cells() {
            let (om, _) = material
                .heat_internal_energy(state.xi.data[c], &kin.fe.data[c], state.theta.data[c])
                .unwrap();
            state.w.data[c] = om;
        }
        state
    }

    fn zero_sources(grid: &Grid) -> HeatSources {
        HeatSources {
            dissipative: ScalarField::new_fill(grid, 0.0),
            adiabatic: ScalarField::new_fill(grid, 0.0),
        }
    }

    #[test]
    fn isolated_uniform_state_is_unchanged() {
        let g = grid();
        let m = material_preset("neo_hookean_default").unwrap();
        let state = rest_state(&g, &m, |_, _| 1.3);
        let kin = derived_kinematics(&g, &state).unwrap();
        let out = heat_step(
            &g,
            &state.w,
            &state.theta,
            &state.xi,
            &kin,
            &state.v,
            &zero_sources(&g),
            &m,
            1e-3,
            0.0,
            &SolverParams::default(),
        )
        .unwrap();
        assert_eq!(out.w, state.w, "enthalpy must be a bit-identical fixed point");
        assert_eq!(out.theta, state.theta);
        assert_eq!(out.boundary_heat_in, 0.0);
    }

    #[test]
    fn pure_conduction_conserves_total_enthalpy() {
        let g = Grid::new(32, 32, 1.0, 1.0).unwrap();
        let m = material_preset("neo_hookean_default").unwrap();
        let state = rest_state(&g, &m, |i, j| {
            let [x, y] = g.cell_center(i, j);
            1.0 + 2.0 * (-60.0 * ((x - 0.5).powi(2) + (y - 0.5).powi(2))).exp()
        });
        let kin = derived_kinematics(&g, &state).unwrap();
        let total0 = integrate(&g, &state.w);
        let mut w = state.w.clone();
        let mut theta = state.theta.clone();
        for _ in 0..20 {
            let out = heat_step(
                &g,
                &w,
                &theta,
                &state.xi,
                &kin,
                &state.v,
                &zero_sources(&g),
                &m,
                5e-3,
                0.0,
                &SolverParams::default(),
            )
            .unwrap();
            w = out.w;
            theta = out.theta;
        }
        let total1 = integrate(&g, &w);
        assert!(
            (total1 - total0).abs() <= 1e-10 * total0,
            "conduction drift {}",
            (total1 - total0).abs() / total0
        );
        // the bump must actually be spreading
        assert!(theta.max_abs() < state.theta.max_abs());
    }

    #[test]
    fn uniform_dissipative_heating_integrates_exactly() {
        let g = grid();
        let m = material_preset("neo_hookean_default").unwrap();
        let state = rest_state(&g, &m, |_, _| 0.5);
        let kin = derived_kinematics(&g, &state).unwrap();
        let s = 0.7;
        let sources = HeatSources {
            dissipative: ScalarField::new_fill(&g, s),
            adiabatic: ScalarField::new_fill(&g, 0.0),
        };
        let dt = 2e-3;
        let out = heat_step(
            &g,
            &state.w,
            &state.theta,
            &state.xi,
            &kin,
            &state.v,
            &sources,
            &m,
            dt,
            0.0,
            &SolverParams::default(),
        )
        .unwrap();
        for c in 0..g.n_cells() {
            assert!((out.w.data[c] - (state.w.data[c] + s * dt)).abs() <= 1e-14);
        }
        // inversion round-trip contract after the step
        for c in 0..g.n_cells() {
            let (om, _) = m
                .heat_internal_energy(state.xi.data[c], &kin.fe.data[c], out.theta.data[c])
                .unwrap();
            assert!((om - out.w.data[c]).abs() <= 1e-9 * out.w.data[c].max(1.0));
        }
    }

    #[test]
    fn newton_cooling_drives_toward_ambient() {
        let g = grid();
        let m = MaterialModel {
            boundary_flux: BoundaryFluxModel::NewtonCooling {
                coeff: 0.5,
                theta_ext: 2.0,
            },
            ..material_preset("neo_hookean_default").unwrap()
        };
        let state = rest_state(&g, &m, |_, _| 1.0);
        let kin = derived_kinematics(&g, &state).unwrap();
        let out = heat_step(
            &g,
            &state.w,
            &state.theta,
            &state.xi,
            &kin,
            &state.v,
            &zero_sources(&g),
            &m,
            5e-3,
            0.0,
            &SolverParams::default(),
        )
        .unwrap();
        assert!(out.boundary_heat_in > 0.0, "colder body must gain heat");
        let total0 = integrate(&g, &state.w);
        let total1 = integrate(&g, &out.w);
        assert!(
            (total1 - total0 - 5e-3 * out.boundary_heat_in).abs() <= 1e-10 * total0.max(1.0),
            "boundary bookkeeping must match the enthalpy gain"
        );
    }

    #[test]
    fn adiabatic_power_examples() {
        let g = grid();
        let m = material_preset("neo_hookean_default").unwrap();
        let state = rest_state(&g, &m, |_, _| 1.5);
        let kin = derived_kinematics(&g, &state).unwrap();
        let lp = TensorField::new_fill(&g, Tensor2::zero(2));

        // theta = 0: gamma'_Fe vanishes
        let zero_theta = ScalarField::new_fill(&g, 0.0);
        let grad_v = gradient_vector(&g, &state.v);
        let s = adiabatic_power(
            &g,
            &state.xi,
            &zero_theta,
            &kin,
            &grad_v,
            &lp,
            &m,
            &CutoffParams::default(),
        )
        .unwrap();
        assert!(s.data.iter().all(|&x| x == 0.0));

        // rigid rotation: trace-free grad v kills the contraction
        let rot = VectorField::from_fn(&g, |i, j| {
            let [x, y] = g.cell_center(i, j);
            [-(y - 0.5), x - 0.5]
        });
        let grad_rot = gradient_vector(&g, &rot);
        let s = adiabatic_power(
            &g,
            &state.xi,
            &state.theta,
            &kin,
            &grad_rot,
            &lp,
            &m,
            &CutoffParams::default(),
        )
        .unwrap();
        for &x in &s.data {
            assert!(x.abs() <= 1e-12);
        }

        // uniform expansion cools: sign of -c1 theta^alpha div v
        let expand = VectorField::from_fn(&g, |i, j| {
            let [x, y] = g.cell_center(i, j);
            [0.2 * (x - 0.5), 0.2 * (y - 0.5)]
        });
        let grad_exp = gradient_vector(&g, &expand);
        let s = adiabatic_power(
            &g,
            &state.xi,
            &state.theta,
            &kin,
            &grad_exp,
            &lp,
            &m,
            &CutoffParams::default(),
        )
        .unwrap();
        let theta = 1.5f64;
        let expect = -m.c1 * theta.powf(m.alpha) * 0.4;
        for &x in &s.data {
            assert!((x - expect).abs() <= 1e-10 * expect.abs());
        }
    }

    #[test]
    fn monitor_examples() {
        let g = grid();
        let alpha = 1.5;
        let clean = ScalarField::new_fill(&g, 0.3);
        let r = temperature_nonnegativity_monitor(&g, &clean, alpha);
        assert!(r.min_theta >= 0.0);
        assert_eq!(r.fraction_below_zero, 0.0);
        assert_eq!(r.neg_part_integral, 0.0);

        let mut one_bad = clean.clone();
        one_bad.set(3, 4, -0.1);
        let r = temperature_nonnegativity_monitor(&g, &one_bad, alpha);
        assert_eq!(r.min_theta, -0.1);
        assert!((r.fraction_below_zero - 1.0 / g.n_cells() as f64).abs() < 1e-15);
        let expect = 0.1f64.powf(1.0 + alpha) * g.cell_vol();
        assert!((r.neg_part_integral - expect).abs() <= 1e-15);
    }
}
