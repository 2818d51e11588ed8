//! One time step of the momentum balance and of the plastic flow rule.
//!
//! Momentum: semi-Lagrangian advection of velocity, explicit elastic
//! stress and gravity, then a frozen-coefficient implicit solve for the
//! Stokes viscosity and hyperviscosity. The implicit operator is built
//! from exact adjoint pairs, so the discrete power drained from the
//! kinetic energy equals the quadrature of the dissipation density.
//!
//! Flow rule: M(theta) Lp - div(nu2 |grad Lp|^{q-2} grad Lp)/det(grad xi)
//! = dev(Mandel force), solved by frozen-coefficient Picard sweeps with a
//! conjugate-gradient inner solve; the Neumann condition enters through
//! the mirror ghosts of the gradient operator.

use crate::constitutive::{cutoff_pi, CutoffParams, DissipationParams, MaterialModel};
use crate::error::{Result, SimError};
use crate::fields::{
    divergence, grad3_mirror, grad3_mirror_t, gradient_vector, gradient_vector_t, Field, Grid,
    ScalarField, Tensor3Field, TensorField, VectorField,
};
use crate::solver::conjugate_gradient;
use crate::tensorkin::{dev, Tensor2};
use crate::transport::{departure_offsets, interp_vector_quintic_at, Kinematics, StateFields};

/// Iterative-solver tolerances and caps, exposed in the configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverParams {
    pub lin_tol: f64,
    pub lin_max_iter: usize,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub momentum_picard_iters: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            lin_tol: 1e-9,
            lin_max_iter: 500,
            picard_tol: 1e-8,
            picard_max: 30,
            momentum_picard_iters: 1,
        }
    }
}

/// Per-step mechanical fields kept for the audit and the thermal step.
pub struct MomentumWorkspace {
    /// Elastic Cauchy stress (symmetric per cell).
    pub t_e: TensorField,
    /// Actual density rho_R(xi) det(grad xi).
    pub rho: ScalarField,
    /// Density used in the gravity term (det_lambda blend when the cutoff
    /// is enabled; equal to `rho` otherwise).
    pub rho_g: ScalarField,
}

fn vec_to_flat(v: &VectorField) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * v.data.len());
    for val in &v.data {
        out.push(val[0]);
        out.push(val[1]);
    }
    out
}

fn flat_to_vec(flat: &[f64], nx: usize, ny: usize) -> VectorField {
    Field {
        nx,
        ny,
        data: (0..nx * ny).map(|c| [flat[2 * c], flat[2 * c + 1]]).collect(),
    }
}

fn tensor_to_flat(t: &TensorField) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * t.data.len());
    for val in &t.data {
        out.push(val.get(0, 0));
        out.push(val.get(0, 1));
        out.push(val.get(1, 0));
        out.push(val.get(1, 1));
    }
    out
}

fn flat_to_tensor(flat: &[f64], nx: usize, ny: usize) -> TensorField {
    Field {
        nx,
        ny,
        data: (0..nx * ny)
            .map(|c| {
                Tensor2::from_rows2([
                    [flat[4 * c], flat[4 * c + 1]],
                    [flat[4 * c + 2], flat[4 * c + 3]],
                ])
            })
            .collect(),
    }
}

fn power_coeff(norm: f64, exponent: f64) -> f64 {
    if exponent == 2.0 {
        1.0
    } else {
        norm.powf(exponent - 2.0)
    }
}

/// Viscous force (the exact negative gradient of the frozen-coefficient
/// dissipation form) evaluated at `v`; shared by the operator application
/// and the nonlinear residual.
fn viscous_force(
    grid: &Grid,
    v: &VectorField,
    a0: &ScalarField,
    a1: &ScalarField,
    diss: &DissipationParams,
) -> VectorField {
    let vol = grid.cell_vol();
    let e = {
        let g = gradient_vector(grid, v);
        Field {
            nx: g.nx,
            ny: g.ny,
            data: g.data.iter().map(|t| t.sym()).collect(),
        }
    };
    let mut stress: TensorField = Field {
        nx: e.nx,
        ny: e.ny,
        data: e
            .data
            .iter()
            .zip(a0.data.iter())
            .map(|(t, &a)| t.scale(diss.nu0 * a * vol))
            .collect(),
    };
    if diss.nu1 > 0.0 {
        let ke = grad3_mirror(grid, &e);
        let weighted: Tensor3Field = Field {
            nx: ke.nx,
            ny: ke.ny,
            data: ke
                .data
                .iter()
                .zip(a1.data.iter())
                .map(|(t, &a)| t.scale(diss.nu1 * a * vol))
                .collect(),
        };
        let hyper = grad3_mirror_t(grid, &weighted);
        for c in 0..stress.data.len() {
            stress.data[c] = stress.data[c].add(&hyper.data[c]);
        }
    }
    let sym_stress: TensorField = Field {
        nx: stress.nx,
        ny: stress.ny,
        data: stress.data.iter().map(|t| t.sym()).collect(),
    };
    gradient_vector_t(grid, &sym_stress)
}

/// Semi-implicit velocity update for the momentum balance.
#[allow(clippy::too_many_arguments)]
pub fn momentum_step(
    grid: &Grid,
    state: &StateFields,
    kin: &Kinematics,
    material: &MaterialModel,
    diss: &DissipationParams,
    cutoff: &CutoffParams,
    gravity: [f64; 2],
    dt: f64,
    cfl_cap: f64,
    params: &SolverParams,
) -> Result<(VectorField, MomentumWorkspace)> {
    let n = grid.n_cells();
    let vol = grid.cell_vol();

    let cfl = crate::transport::cfl_number(grid, &state.v, dt);
    if cfl > cfl_cap {
        return Err(SimError::CflViolation { cfl, cap: cfl_cap });
    }

    // Stress and densities from the transported state.
    let mut t_e = TensorField::new_fill(grid, Tensor2::zero(2));
    let mut rho = ScalarField::new_fill(grid, 0.0);
    let mut rho_g = ScalarField::new_fill(grid, 0.0);
    for c in 0..n {
        let x = state.xi.data[c];
        let theta = state.theta.data[c].max(0.0);
        t_e.data[c] = material.elastic_cauchy_stress_cut(x, &kin.fe.data[c], theta, cutoff)?;
        let rr = material.rho_ref(x);
        rho.data[c] = rr * kin.det_grad_xi.data[c];
        rho_g.data[c] = if cutoff.enabled {
            // grouped so pi = 1 reproduces rho bit-identically
            let pi = cutoff_pi(&kin.fe.data[c], cutoff.lambda);
            rr * (pi * kin.det_grad_xi.data[c] + (1.0 - pi))
        } else {
            rho.data[c]
        };
    }

    // Explicit part: advect momentum, add elastic force and gravity.
    let div_te = divergence(grid, &t_e);
    let dep = departure_offsets(grid, &state.v, dt);
    let mut v_star = VectorField::new_fill(grid, [0.0, 0.0]);
    for (c, p) in dep.iter().enumerate() {
        let adv = interp_vector_quintic_at(grid, &state.v, c % grid.nx, c / grid.nx, *p);
        let gscale = rho_g.data[c] / rho.data[c];
        v_star.data[c] = [
            adv[0] + dt * (div_te.data[c][0] / rho.data[c] + gscale * gravity[0]),
            adv[1] + dt * (div_te.data[c][1] / rho.data[c] + gscale * gravity[1]),
        ];
    }
    crate::fields::zero_boundary_ring(grid, &mut v_star);

    let workspace = MomentumWorkspace { t_e, rho, rho_g };

    if diss.nu0 == 0.0 && diss.nu1 == 0.0 {
        return Ok((v_star, workspace));
    }

    // Implicit dissipative solve with lagged power-law coefficients.
    let mass: Vec<f64> = workspace.rho.data.iter().map(|r| r * vol / dt).collect();
    let mut v_cur = state.v.clone();
    let mut v_next = v_star.clone();
    let mut prev_residual = f64::INFINITY;

    for sweep in 0..params.momentum_picard_iters.max(1) {
        let e_lag = {
            let g = gradient_vector(grid, &v_cur);
            Field {
                nx: g.nx,
                ny: g.ny,
                data: g.data.iter().map(|t| t.sym()).collect(),
            }
        };
        let a0: ScalarField = Field {
            nx: grid.nx,
            ny: grid.ny,
            data: e_lag
                .data
                .iter()
                .map(|t| power_coeff(t.norm(), diss.p))
                .collect(),
        };
        let a1: ScalarField = if diss.nu1 > 0.0 {
            let ke = grad3_mirror(grid, &e_lag);
            Field {
                nx: grid.nx,
                ny: grid.ny,
                data: ke
                    .data
                    .iter()
                    .map(|t| power_coeff(t.norm(), diss.p))
                    .collect(),
            }
        } else {
            ScalarField::new_fill(grid, 0.0)
        };

        let apply = |xflat: &[f64], out: &mut [f64]| {
            let v = flat_to_vec(xflat, grid.nx, grid.ny);
            let f = viscous_force(grid, &v, &a0, &a1, diss);
            for c in 0..n {
                let (i, j) = (c % grid.nx, c / grid.nx);
                if grid.is_boundary(i, j) {
                    out[2 * c] = xflat[2 * c];
                    out[2 * c + 1] = xflat[2 * c + 1];
                } else {
                    out[2 * c] = mass[c] * xflat[2 * c] + f.data[c][0];
                    out[2 * c + 1] = mass[c] * xflat[2 * c + 1] + f.data[c][1];
                }
            }
        };

        let c2 = 1.5 * (1.0 / (grid.hx * grid.hx) + 1.0 / (grid.hy * grid.hy));
        let mut diag = vec![1.0; 2 * n];
        for c in 0..n {
            let (i, j) = (c % grid.nx, c / grid.nx);
            if !grid.is_boundary(i, j) {
                let d = mass[c]
                    + vol * (diss.nu0 * a0.data[c] * c2 + diss.nu1 * a1.data[c] * c2 * c2);
                diag[2 * c] = d;
                diag[2 * c + 1] = d;
            }
        }

        let b: Vec<f64> = {
            let mut b = vec![0.0; 2 * n];
            for c in 0..n {
                let (i, j) = (c % grid.nx, c / grid.nx);
                if !grid.is_boundary(i, j) {
                    b[2 * c] = mass[c] * v_star.data[c][0];
                    b[2 * c + 1] = mass[c] * v_star.data[c][1];
                }
            }
            b
        };

        let mut x = vec_to_flat(&v_next);
        conjugate_gradient(
            apply,
            &b,
            &mut x,
            &diag,
            params.lin_tol,
            params.lin_max_iter,
            "momentum",
        )?;
        v_next = flat_to_vec(&x, grid.nx, grid.ny);
        crate::fields::zero_boundary_ring(grid, &mut v_next);

        if params.momentum_picard_iters > 1 {
            // nonlinear residual with self-consistent coefficients
            let e_new = {
                let g = gradient_vector(grid, &v_next);
                Field {
                    nx: g.nx,
                    ny: g.ny,
                    data: g.data.iter().map(|t| t.sym()).collect(),
                }
            };
            let a0n: ScalarField = Field {
                nx: grid.nx,
                ny: grid.ny,
                data: e_new
                    .data
                    .iter()
                    .map(|t| power_coeff(t.norm(), diss.p))
                    .collect(),
            };
            let a1n: ScalarField = if diss.nu1 > 0.0 {
                let ke = grad3_mirror(grid, &e_new);
                Field {
                    nx: grid.nx,
                    ny: grid.ny,
                    data: ke
                        .data
                        .iter()
                        .map(|t| power_coeff(t.norm(), diss.p))
                        .collect(),
                }
            } else {
                ScalarField::new_fill(grid, 0.0)
            };
            let f = viscous_force(grid, &v_next, &a0n, &a1n, diss);
            let mut res2 = 0.0;
            let mut scale2 = 0.0;
            for c in 0..n {
                let (i, j) = (c % grid.nx, c / grid.nx);
                if grid.is_boundary(i, j) {
                    continue;
                }
                for a in 0..2 {
                    let r = mass[c] * (v_next.data[c][a] - v_star.data[c][a]) + f.data[c][a];
                    res2 += r * r;
                    scale2 += (mass[c] * v_star.data[c][a]).powi(2);
                }
            }
            let residual = res2.sqrt() / scale2.sqrt().max(1e-300);
            if residual <= params.picard_tol {
                break;
            }
            if residual > prev_residual * (1.0 + 1e-12) && sweep > 0 {
                return Err(SimError::NoConvergence {
                    what: "momentum Picard",
                    iterations: sweep + 1,
                    residual,
                });
            }
            prev_residual = residual;
        }
        v_cur = v_next.clone();
    }

    Ok((v_next, workspace))
}

/// Solves the plastic flow rule for the distortion rate field.
#[allow(clippy::too_many_arguments)]
pub fn flow_rule_step(
    grid: &Grid,
    state: &StateFields,
    kin: &Kinematics,
    material: &MaterialModel,
    diss: &DissipationParams,
    cutoff: &CutoffParams,
    params: &SolverParams,
) -> Result<TensorField> {
    let n = grid.n_cells();
    let vol = grid.cell_vol();

    let mut mandel = TensorField::new_fill(grid, Tensor2::zero(2));
    let mut m_theta = ScalarField::new_fill(grid, 0.0);
    for c in 0..n {
        let theta = state.theta.data[c].max(0.0);
        mandel.data[c] = material.mandel_driving_force_cut(
            state.xi.data[c],
            &kin.fe.data[c],
            &state.fp.data[c],
            theta,
            cutoff,
        )?;
        m_theta.data[c] = material.viscosity.value(theta);
    }

    if diss.nu2 == 0.0 {
        let mut lp = TensorField::new_fill(grid, Tensor2::zero(2));
        for c in 0..n {
            lp.data[c] = dev(&mandel.data[c].scale(1.0 / m_theta.data[c]));
        }
        return Ok(lp);
    }

    let mass: Vec<f64> = (0..n)
        .map(|c| kin.det_grad_xi.data[c] * m_theta.data[c] * vol)
        .collect();
    let rhs_field: TensorField = Field {
        nx: grid.nx,
        ny: grid.ny,
        data: (0..n)
            .map(|c| mandel.data[c].scale(kin.det_grad_xi.data[c] * vol))
            .collect(),
    };
    let b = tensor_to_flat(&rhs_field);
    let b_norm = crate::fields::pairwise_sum(&b.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();

    let mut lp_cur = state.lp.clone();
    let mut prev_residual = f64::INFINITY;
    let c2 = 1.5 * (1.0 / (grid.hx * grid.hx) + 1.0 / (grid.hy * grid.hy));

    let nonlinear_residual = |lp: &TensorField| -> f64 {
        let klp = grad3_mirror(grid, lp);
        let weighted: Tensor3Field = Field {
            nx: grid.nx,
            ny: grid.ny,
            data: klp
                .data
                .iter()
                .map(|t| t.scale(diss.nu2 * power_coeff(t.norm(), diss.q) * vol))
                .collect(),
        };
        let grad_term = grad3_mirror_t(grid, &weighted);
        let mut res2 = 0.0;
        for c in 0..n {
            let r = lp.data[c]
                .scale(mass[c])
                .add(&grad_term.data[c])
                .sub(&rhs_field.data[c]);
            res2 += r.ddot(&r);
        }
        res2.sqrt()
    };

    for sweep in 0..params.picard_max {
        let klp = grad3_mirror(grid, &lp_cur);
        let bcoef: ScalarField = Field {
            nx: grid.nx,
            ny: grid.ny,
            data: klp
                .data
                .iter()
                .map(|t| power_coeff(t.norm(), diss.q))
                .collect(),
        };

        let apply = |xflat: &[f64], out: &mut [f64]| {
            let l = flat_to_tensor(xflat, grid.nx, grid.ny);
            let kl = grad3_mirror(grid, &l);
            let weighted: Tensor3Field = Field {
                nx: grid.nx,
                ny: grid.ny,
                data: kl
                    .data
                    .iter()
                    .zip(bcoef.data.iter())
                    .map(|(t, &bc)| t.scale(diss.nu2 * bc * vol))
                    .collect(),
            };
            let grad_term = grad3_mirror_t(grid, &weighted);
            for c in 0..n {
                let t = l.data[c].scale(mass[c]).add(&grad_term.data[c]);
                out[4 * c] = t.get(0, 0);
                out[4 * c + 1] = t.get(0, 1);
                out[4 * c + 2] = t.get(1, 0);
                out[4 * c + 3] = t.get(1, 1);
            }
        };

        let mut diag = vec![0.0; 4 * n];
        for c in 0..n {
            let d = mass[c] + diss.nu2 * bcoef.data[c] * vol * c2;
            for k in 0..4 {
                diag[4 * c + k] = d;
            }
        }

        let mut x = tensor_to_flat(&lp_cur);
        conjugate_gradient(
            apply,
            &b,
            &mut x,
            &diag,
            params.lin_tol,
            params.lin_max_iter,
            "flow rule",
        )?;
        lp_cur = flat_to_tensor(&x, grid.nx, grid.ny);

        if diss.q == 2.0 {
            break; // coefficient is exact; single sweep solves the system
        }
        let residual = nonlinear_residual(&lp_cur) / b_norm.max(1e-300);
        if residual <= params.picard_tol {
            break;
        }
        if residual > prev_residual * (1.0 + 1e-12) {
            return Err(SimError::NoConvergence {
                what: "flow-rule Picard",
                iterations: sweep + 1,
                residual,
            });
        }
        prev_residual = residual;
        if sweep + 1 == params.picard_max {
            return Err(SimError::NoConvergence {
                what: "flow-rule Picard",
                iterations: params.picard_max,
                residual,
            });
        }
    }

    for t in lp_cur.data.iter_mut() {
        *t = dev(t);
    }
    Ok(lp_cur)
}

/// Dissipation rate density
/// xi_d = nu0 |e(v)|^p + nu1 |grad e(v)|^p + nu2 |grad Lp|^q
///        + det(grad xi) M(theta) |Lp|^2,
/// computed with the same discrete operators as the implicit solves.
pub fn dissipation_density(
    grid: &Grid,
    v: &VectorField,
    lp: &TensorField,
    theta: &ScalarField,
    material: &MaterialModel,
    diss: &DissipationParams,
    det_grad_xi: &ScalarField,
) -> ScalarField {
    let e = {
        let g = gradient_vector(grid, v);
        Field {
            nx: g.nx,
            ny: g.ny,
            data: g.data.iter().map(|t| t.sym()).collect(),
        }
    };
    let ke = grad3_mirror(grid, &e);
    let klp = grad3_mirror(grid, lp);
    let mut out = ScalarField::new_fill(grid, 0.0);
    for c in 0..grid.n_cells() {
        let m = material.viscosity.value(theta.data[c].max(0.0));
        out.data[c] = diss.nu0 * e.data[c].norm().powf(diss.p)
            + diss.nu1 * ke.data[c].norm().powf(diss.p)
            + diss.nu2 * klp.data[c].norm().powf(diss.q)
            + det_grad_xi.data[c] * m * lp.data[c].ddot(&lp.data[c]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{material_preset, MaterialModel, PlasticViscosity};
    use crate::transport::derived_kinematics;

    // power-of-two spacing keeps the identity reference map's discrete
    // gradient exact, so uniform states are stress-free to the bit
    fn grid() -> Grid {
        Grid::new(16, 16, 1.0, 1.0).unwrap()
    }

    fn uniform_state(grid: &Grid, stretch: f64, theta0: f64) -> StateFields {
        // xi = (x/s, s y) gives grad xi = diag(1/s, s), det = 1
        StateFields {
            v: VectorField::new_fill(grid, [0.0, 0.0]),
            xi: VectorField::from_fn(grid, |i, j| {
                let [x, y] = grid.cell_center(i, j);
                [x / stretch, stretch * y]
            }),
            fp: TensorField::new_fill(grid, Tensor2::identity(2)),
            w: ScalarField::new_fill(grid, 0.0),
            theta: ScalarField::new_fill(grid, theta0),
            lp: TensorField::new_fill(grid, Tensor2::zero(2)),
            t: 0.0,
        }
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let g = grid();
        let m = material_preset("neo_hookean_default").unwrap();
        let state = uniform_state(&g, 1.0, 0.0);
        let kin = derived_kinematics(&g, &state).unwrap();
        let diss = DissipationParams {
            nu0: 0.1,
            nu1: 1e-4,
            nu2: 0.0,
            p: 2.0,
            q: 2.0,
        };
        let (v, _) = momentum_step(
            &g,
            &state,
            &kin,
            &m,
            &diss,
            &CutoffParams::default(),
            [0.0, 0.0],
            1e-3,
            0.9,
            &SolverParams::default(),
        )
        .unwrap();
        assert!(v.max_norm() == 0.0, "stress-free rest state must stay at rest");
    }

    #[test]
    fn gravity_on_fluid_like_state() {
        let g = grid();
        let m = MaterialModel {
            k_e: 0.0,
            g_e: 0.0,
            ..material_preset("neo_hookean_default").unwrap()
        };
        let state = uniform_state(&g, 1.0, 0.0);
        let kin = derived_kinematics(&g, &state).unwrap();
        let diss = DissipationParams {
            nu0: 0.01,
            nu1: 0.0,
            nu2: 0.0,
            p: 2.0,
            q: 2.0,
        };
        let dt = 1e-3;
        let grav = [0.0, -2.0];
        let (v, _) = momentum_step(
            &g,
            &state,
            &kin,
            &m,
            &diss,
            &CutoffParams::default(),
            grav,
            dt,
            0.9,
            &SolverParams::default(),
        )
        .unwrap();
        let center = v.get(12, 12);
        assert!((center[1] - dt * grav[1]).abs() <= 1e-3 * (dt * grav[1]).abs());
        assert!(center[0].abs() <= 1e-12);
        // walls stay pinned
        assert_eq!(v.get(0, 5), [0.0, 0.0]);
    }

    #[test]
    fn flow_rule_pointwise_limit() {
        let g = grid();
        // strong shear stretch gives a nonzero deviatoric Mandel force
        let m = MaterialModel {
            h_e: 0.0,
            viscosity: PlasticViscosity::Constant(2.0),
            ..material_preset("neo_hookean_default").unwrap()
        };
        let state = uniform_state(&g, 1.3, 0.0);
        let kin = derived_kinematics(&g, &state).unwrap();
        let diss = DissipationParams {
            nu0: 0.1,
            nu1: 0.0,
            nu2: 0.0,
            p: 2.0,
            q: 2.0,
        };
        let lp = flow_rule_step(
            &g,
            &state,
            &kin,
            &m,
            &diss,
            &CutoffParams::default(),
            &SolverParams::default(),
        )
        .unwrap();
        let c = g.idx(10, 10);
        let expect = dev(
            &m.mandel_driving_force(state.xi.data[c], &kin.fe.data[c], &state.fp.data[c], 0.0)
                .unwrap()
                .scale(0.5),
        );
        assert!(lp.data[c].sub(&expect).norm() <= 1e-12 * expect.norm());
        assert!(expect.norm() > 1e-3, "driving force should be nontrivial");
        // trace-free per cell
        for t in &lp.data {
            assert!(t.trace().abs() <= 1e-12);
        }
    }

    #[test]
    fn flow_rule_gradient_term_vanishes_on_uniform_field() {
        let g = grid();
        let m = MaterialModel {
            h_e: 0.0,
            viscosity: PlasticViscosity::Constant(2.0),
            ..material_preset("neo_hookean_default").unwrap()
        };
        let state = uniform_state(&g, 1.3, 0.0);
        let kin = derived_kinematics(&g, &state).unwrap();
        let pointwise = flow_rule_step(
            &g,
            &state,
            &kin,
            &m,
            &DissipationParams {
                nu0: 0.1,
                nu1: 0.0,
                nu2: 0.0,
                p: 2.0,
                q: 2.0,
            },
            &CutoffParams::default(),
            &SolverParams::default(),
        )
        .unwrap();
        let with_grad = flow_rule_step(
            &g,
            &state,
            &kin,
            &m,
            &DissipationParams {
                nu0: 0.1,
                nu1: 0.0,
                nu2: 0.5,
                p: 2.0,
                q: 2.0,
            },
            &CutoffParams::default(),
            &SolverParams::default(),
        )
        .unwrap();
        for c in 0..g.n_cells() {
            assert!(
                pointwise.data[c].sub(&with_grad.data[c]).norm()
                    <= 1e-7 * pointwise.data[c].norm().max(1e-8)
            );
        }
    }

    #[test]
    fn zero_mandel_force_gives_zero_rate() {
        let g = grid();
        let m = MaterialModel {
            h_e: 0.0,
            ..material_preset("neo_hookean_default").unwrap()
        };
        let state = uniform_state(&g, 1.0, 0.0);
        let kin = derived_kinematics(&g, &state).unwrap();
        let lp = flow_rule_step(
            &g,
            &state,
            &kin,
            &m,
            &DissipationParams {
                nu0: 0.1,
                nu1: 0.0,
                nu2: 0.3,
                p: 2.0,
                q: 2.0,
            },
            &CutoffParams::default(),
            &SolverParams::default(),
        )
        .unwrap();
        for t in &lp.data {
            assert!(t.norm() <= 1e-14);
        }
    }

    #[test]
    fn dissipation_density_examples() {
        let g = grid();
        let m = material_preset("neo_hookean_default").unwrap();
        let diss = DissipationParams::default();
        let theta = ScalarField::new_fill(&g, 1.0);
        let detgx = ScalarField::new_fill(&g, 1.0);
        let zero_v = VectorField::new_fill(&g, [0.0, 0.0]);
        let zero_lp = TensorField::new_fill(&g, Tensor2::zero(2));
        let d = dissipation_density(&g, &zero_v, &zero_lp, &theta, &m, &diss, &detgx);
        assert!(d.data.iter().all(|&x| x == 0.0));

        // rigid rotation: e(v) = 0 kills every velocity term
        let rot = VectorField::from_fn(&g, |i, j| {
            let [x, y] = g.cell_center(i, j);
            [-(y - 0.5), x - 0.5]
        });
        let d = dissipation_density(&g, &rot, &zero_lp, &theta, &m, &diss, &detgx);
        assert!(d.data.iter().all(|&x| x.abs() < 1e-20));

        // plastic term is det(grad xi) M |Lp|^2 and nonnegative
        let lp = TensorField::new_fill(&g, Tensor2::diag(2, &[0.3, -0.3]));
        let d = dissipation_density(&g, &zero_v, &lp, &theta, &m, &diss, &detgx);
        for &x in &d.data {
            assert!((x - 1.0 * 0.18).abs() < 1e-12);
        }
    }
}
