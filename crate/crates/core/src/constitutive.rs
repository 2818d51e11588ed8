//! Material laws: neo-Hookean stored energy with isotropic hardening,
//! thermal coupling, quadratic plastic dissipation, enthalpy and its
//! inversion, conductivity and boundary-flux models, and the cutoff
//! regularizers used as an optional numerical safeguard.
//!
//! All densities are referential (J/m^3 of the reference configuration);
//! the field solver converts with det(grad xi) where needed. Position
//! dependence enters through a multiplicative modulation evaluated at the
//! referential point carried by the reference mapping.

use crate::error::{Result, SimError};
use crate::tensorkin::{cofactor, det, dev, Tensor2};

/// Referential position (the solver is 2-D; constitutive formulas are
/// dimension-generic in the tensor argument).
pub type RefPoint = [f64; 2];

/// Plastic viscosity M(theta), bounded below by a positive constant.
#[derive(Clone, Debug, PartialEq)]
pub enum PlasticViscosity {
    Constant(f64),
    /// M(theta) = m0 * max(0, 1 - theta/theta_melt) + m_floor, a melting
    /// ramp that weakens plastic resistance with temperature.
    MeltingRamp {
        m0: f64,
        theta_melt: f64,
        m_floor: f64,
    },
}

impl PlasticViscosity {
    pub fn value(&self, theta: f64) -> f64 {
        match *self {
            PlasticViscosity::Constant(m) => m,
            PlasticViscosity::MeltingRamp {
                m0,
                theta_melt,
                m_floor,
            } => m0 * (1.0 - theta / theta_melt).max(0.0) + m_floor,
        }
    }

    pub fn infimum(&self) -> f64 {
        match *self {
            PlasticViscosity::Constant(m) => m,
            PlasticViscosity::MeltingRamp { m_floor, .. } => m_floor,
        }
    }
}

/// Thermal conductivity kappa(X, Fe, theta); presets are constant but the
/// full signature is kept for the solver interfaces.
#[derive(Clone, Debug, PartialEq)]
pub enum ConductivityModel {
    Constant(f64),
}

impl ConductivityModel {
    pub fn value(&self, _x: RefPoint, _fe: &Tensor2, _theta: f64) -> f64 {
        match *self {
            ConductivityModel::Constant(k) => k,
        }
    }

    pub fn infimum(&self) -> f64 {
        match *self {
            ConductivityModel::Constant(k) => k,
        }
    }
}

/// Boundary heat flux h(t, x, theta); positive values mean influx.
///
/// Both presets satisfy the admissibility diagnostic
/// theta * h(theta) <= C (1 + theta) on theta >= 0.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryFluxModel {
    Insulated,
    /// h = coeff * (theta_ext - theta), Newton cooling toward theta_ext.
    NewtonCooling { coeff: f64, theta_ext: f64 },
}

impl BoundaryFluxModel {
    pub fn value(&self, _t: f64, _x: [f64; 2], theta: f64) -> f64 {
        match *self {
            BoundaryFluxModel::Insulated => 0.0,
            BoundaryFluxModel::NewtonCooling { coeff, theta_ext } => coeff * (theta_ext - theta),
        }
    }
}

/// Multiplicative spatial modulation of K_E, G_E, H_E and rho_R, evaluated
/// at the referential point.
#[derive(Clone, Debug, PartialEq)]
pub enum Modulation {
    Uniform,
    /// factor = 1 + gx*X1 + gy*X2 (clamped away from zero).
    Linear { gx: f64, gy: f64 },
    /// Two-phase checkerboard with cell side `period`: factor is 1 on even
    /// parity cells and `scale` on odd ones.
    Checkerboard { scale: f64, period: f64 },
}

impl Modulation {
    pub fn factor(&self, x: RefPoint) -> f64 {
        match *self {
            Modulation::Uniform => 1.0,
            Modulation::Linear { gx, gy } => (1.0 + gx * x[0] + gy * x[1]).max(0.05),
            Modulation::Checkerboard { scale, period } => {
                let ix = (x[0] / period).floor() as i64;
                let iy = (x[1] / period).floor() as i64;
                if (ix + iy).rem_euclid(2) == 0 {
                    1.0
                } else {
                    scale
                }
            }
        }
    }
}

/// Stokes/plastic-gradient dissipation coefficients and exponents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DissipationParams {
    pub nu0: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub p: f64,
    pub q: f64,
}

impl Default for DissipationParams {
    fn default() -> Self {
        // p = q = 4 honors the exponent hypothesis p, q > d in d = 2.
        DissipationParams {
            nu0: 0.3,
            nu1: 1e-4,
            nu2: 1e-4,
            p: 4.0,
            q: 4.0,
        }
    }
}

impl DissipationParams {
    /// Returns warnings (does not reject p = q = 2, which is convenient
    /// for linear testing but leaves the exponent hypothesis set).
    pub fn validate(&self, dim: usize) -> Result<Vec<String>> {
        if self.nu0 < 0.0 || self.nu1 < 0.0 || self.nu2 < 0.0 {
            return Err(SimError::Validation(
                "viscosity coefficients nu0, nu1, nu2 must be >= 0".into(),
            ));
        }
        if self.p < 2.0 || self.q < 2.0 {
            return Err(SimError::Validation(
                "exponents p, q must be >= 2".into(),
            ));
        }
        let mut warnings = Vec::new();
        if self.p <= dim as f64 {
            warnings.push(format!(
                "exponent p = {} does not exceed the space dimension {}; proceeding anyway",
                self.p, dim
            ));
        }
        if self.q <= dim as f64 {
            warnings.push(format!(
                "exponent q = {} does not exceed the space dimension {}; proceeding anyway",
                self.q, dim
            ));
        }
        Ok(warnings)
    }
}

/// Cutoff level for the stress regularizer; inactive when `enabled` is
/// false or the state stays on the plateau.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffParams {
    pub lambda: f64,
    pub enabled: bool,
}

impl Default for CutoffParams {
    fn default() -> Self {
        CutoffParams {
            lambda: 0.5,
            enabled: false,
        }
    }
}

impl CutoffParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(SimError::Validation(format!(
                "cutoff lambda must lie in (0, 1], got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Constitutive data set: neo-Hookean elasticity, quadratic hardening,
/// power-law thermal coupling, quadratic plastic dissipation.
#[derive(Clone, Debug, PartialEq)]
pub struct MaterialModel {
    /// Bulk modulus (Pa).
    pub k_e: f64,
    /// Shear modulus (Pa).
    pub g_e: f64,
    /// Hardening modulus (Pa); zero admits perfect plasticity.
    pub h_e: f64,
    /// Heat-capacity coefficient (Pa/K).
    pub c: f64,
    /// Thermal-coupling coefficient (Pa/K^alpha).
    pub c1: f64,
    /// Coupling exponent, 1 < alpha <= 2.
    pub alpha: f64,
    /// Plastic viscosity M(theta) (Pa s).
    pub viscosity: PlasticViscosity,
    /// Thermal conductivity model.
    pub conductivity: ConductivityModel,
    /// Boundary heat-flux model.
    pub boundary_flux: BoundaryFluxModel,
    /// Referential mass density baseline (kg/m^3).
    pub rho_r: f64,
    /// Spatial modulation of K_E, G_E, H_E, rho_R.
    pub modulation: Modulation,
}

impl MaterialModel {
    pub fn validate(&self) -> Result<()> {
        if self.k_e < 0.0 || self.g_e < 0.0 || self.h_e < 0.0 {
            return Err(SimError::Validation(
                "moduli K_E, G_E, H_E must be >= 0".into(),
            ));
        }
        if self.c <= 0.0 {
            return Err(SimError::Validation("heat capacity c must be > 0".into()));
        }
        if self.c1 <= 0.0 {
            return Err(SimError::Validation(
                "thermal coupling c1 must be > 0".into(),
            ));
        }
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(SimError::Validation(format!(
                "alpha must lie in (1, 2], got {}",
                self.alpha
            )));
        }
        if self.viscosity.infimum() <= 0.0 {
            return Err(SimError::Validation(
                "plastic viscosity must have a positive infimum".into(),
            ));
        }
        if self.conductivity.infimum() <= 0.0 {
            return Err(SimError::Validation(
                "conductivity must have a positive infimum".into(),
            ));
        }
        if self.rho_r <= 0.0 {
            return Err(SimError::Validation(
                "referential density must be > 0".into(),
            ));
        }
        Ok(())
    }

    #[inline]
    fn modulated(&self, x: RefPoint) -> (f64, f64, f64) {
        let f = self.modulation.factor(x);
        (self.k_e * f, self.g_e * f, self.h_e * f)
    }

    /// Referential mass density at X, including modulation.
    pub fn rho_ref(&self, x: RefPoint) -> f64 {
        self.rho_r * self.modulation.factor(x)
    }

    /// Stored elastic energy density
    /// phi = K/2 (J-1)^2 + G/2 (J^{-2/d} tr(Fe Fe^T) - d), J = det Fe.
    pub fn stored_energy(&self, x: RefPoint, fe: &Tensor2) -> Result<f64> {
        let j = det(fe);
        if j <= 0.0 {
            return Err(SimError::NonPositiveDeterminant { det: j });
        }
        let (k, g, _) = self.modulated(x);
        let d = fe.dim() as f64;
        let i1 = fe.ddot(fe); // tr(Fe Fe^T)
        Ok(0.5 * k * (j - 1.0) * (j - 1.0) + 0.5 * g * (j.powf(-2.0 / d) * i1 - d))
    }

    /// Analytic derivative d phi / d Fe.
    pub fn stored_stress(&self, x: RefPoint, fe: &Tensor2) -> Result<Tensor2> {
        let j = det(fe);
        if j <= 0.0 {
            return Err(SimError::NonPositiveDeterminant { det: j });
        }
        let (k, g, _) = self.modulated(x);
        let d = fe.dim() as f64;
        let cof = cofactor(fe);
        let i1 = fe.ddot(fe);
        let vol = cof.scale(k * (j - 1.0));
        let iso = fe
            .scale(g * j.powf(-2.0 / d))
            .add(&cof.scale(-g / d * j.powf(-2.0 / d - 1.0) * i1));
        Ok(vol.add(&iso))
    }

    /// Thermal part of the free energy and its partials.
    ///
    /// gamma = c theta (1 - ln theta) - c1 J theta^alpha, with the
    /// heat-capacity sign fixed so the enthalpy comes out as
    /// omega = c theta / J + c1 (alpha - 1) theta^alpha.
    pub fn thermal_energy(&self, _x: RefPoint, fe: &Tensor2, theta: f64) -> Result<ThermalEnergy> {
        if theta < 0.0 {
            return Err(SimError::NegativeTemperature { theta });
        }
        let j = det(fe);
        if j <= 0.0 {
            return Err(SimError::NonPositiveDeterminant { det: j });
        }
        let cof = cofactor(fe);
        if theta == 0.0 {
            return Ok(ThermalEnergy {
                gamma: 0.0,
                d_fe: Tensor2::zero(fe.dim()),
                d_theta: if self.c > 0.0 { f64::INFINITY } else { 0.0 },
            });
        }
        let ta = theta.powf(self.alpha);
        Ok(ThermalEnergy {
            gamma: self.c * theta * (1.0 - theta.ln()) - self.c1 * j * ta,
            d_fe: cof.scale(-self.c1 * ta),
            d_theta: -self.c * theta.ln() - self.c1 * j * self.alpha * theta.powf(self.alpha - 1.0),
        })
    }

    /// Hardening energy H/2 |Fp|^2 and its gradient H Fp.
    pub fn hardening_energy(&self, x: RefPoint, fp: &Tensor2) -> (f64, Tensor2) {
        let (_, _, h) = self.modulated(x);
        (0.5 * h * fp.ddot(fp), fp.scale(h))
    }

    /// Elastic Cauchy stress T_e = (phi' + gamma'_Fe) Fe^T / det Fe.
    pub fn elastic_cauchy_stress(&self, x: RefPoint, fe: &Tensor2, theta: f64) -> Result<Tensor2> {
        self.elastic_cauchy_stress_cut(x, fe, theta, &CutoffParams::default())
    }

    /// Cutoff variant: T = [(pi phi)'_Fe + pi gamma'_Fe] Fe^T / det Fe,
    /// where (pi phi)' carries the product rule. Reduces to the plain
    /// stress when the cutoff is disabled or on its plateau.
    pub fn elastic_cauchy_stress_cut(
        &self,
        x: RefPoint,
        fe: &Tensor2,
        theta: f64,
        cut: &CutoffParams,
    ) -> Result<Tensor2> {
        let j = det(fe);
        if j <= 0.0 {
            return Err(SimError::NonPositiveDeterminant { det: j });
        }
        let phi_p = self.stored_stress(x, fe)?;
        let gam = self.thermal_energy(x, fe, theta)?;
        let combined = if cut.enabled {
            let pi = cutoff_pi(fe, cut.lambda);
            let dpi = cutoff_pi_grad(fe, cut.lambda);
            let phi = self.stored_energy(x, fe)?;
            phi_p
                .scale(pi)
                .add(&dpi.scale(phi))
                .add(&gam.d_fe.scale(pi))
        } else {
            phi_p.add(&gam.d_fe)
        };
        Ok(combined.matmul(&fe.transpose()).scale(1.0 / j))
    }

    /// Deviatoric Mandel driving force
    /// dev(Fe^T phi'_Fe + Fe^T gamma'_Fe - phihat'_Fp Fp^T).
    pub fn mandel_driving_force(
        &self,
        x: RefPoint,
        fe: &Tensor2,
        fp: &Tensor2,
        theta: f64,
    ) -> Result<Tensor2> {
        self.mandel_driving_force_cut(x, fe, fp, theta, &CutoffParams::default())
    }

    /// Cutoff variant of the Mandel force, mirroring the regularized flow
    /// rule: dev(Fe^T (pi phi)'_Fe + pi Fe^T gamma'_Fe - phihat'_Fp Fp^T).
    pub fn mandel_driving_force_cut(
        &self,
        x: RefPoint,
        fe: &Tensor2,
        fp: &Tensor2,
        theta: f64,
        cut: &CutoffParams,
    ) -> Result<Tensor2> {
        let phi_p = self.stored_stress(x, fe)?;
        let gam = self.thermal_energy(x, fe, theta)?;
        let fet = fe.transpose();
        let elastic_part = if cut.enabled {
            let pi = cutoff_pi(fe, cut.lambda);
            let dpi = cutoff_pi_grad(fe, cut.lambda);
            let phi = self.stored_energy(x, fe)?;
            fet.matmul(&phi_p.scale(pi).add(&dpi.scale(phi)))
                .add(&fet.matmul(&gam.d_fe).scale(pi))
        } else {
            fet.matmul(&phi_p.add(&gam.d_fe))
        };
        let (_, hard_grad) = self.hardening_energy(x, fp);
        Ok(dev(&elastic_part.sub(&hard_grad.matmul(&fp.transpose()))))
    }

    /// Gradient of the quadratic dissipation potential
    /// zeta(theta; Lp) = M(theta)/2 |Lp|^2, i.e. M(theta) Lp.
    pub fn plastic_dissipation_gradient(&self, theta: f64, lp: &Tensor2) -> Result<Tensor2> {
        let trace = lp.trace();
        let norm = lp.norm();
        if trace.abs() > 1e-10 * norm {
            return Err(SimError::NonDeviatoricInput { trace, norm });
        }
        Ok(lp.scale(self.viscosity.value(theta)))
    }

    /// Heat part of the internal energy (enthalpy density)
    /// omega = c theta / J + c1 (alpha - 1) theta^alpha and its
    /// theta-derivative. Strictly increasing in theta.
    pub fn heat_internal_energy(
        &self,
        _x: RefPoint,
        fe: &Tensor2,
        theta: f64,
    ) -> Result<(f64, f64)> {
        if theta < 0.0 {
            return Err(SimError::NegativeTemperature { theta });
        }
        let j = det(fe);
        if j <= 0.0 {
            return Err(SimError::NonPositiveDeterminant { det: j });
        }
        let a = self.alpha;
        let omega = self.c * theta / j + self.c1 * (a - 1.0) * theta.powf(a);
        let d_omega = self.c / j
            + if theta > 0.0 {
                self.c1 * a * (a - 1.0) * theta.powf(a - 1.0)
            } else {
                0.0
            };
        Ok((omega, d_omega))
    }

    /// Inverts omega(X, Fe, .) at fixed Fe by bisection-guarded Newton.
    pub fn invert_enthalpy(&self, x: RefPoint, fe: &Tensor2, w: f64) -> Result<f64> {
        if w < 0.0 {
            return Err(SimError::InvariantViolation(format!(
                "invert_enthalpy requires w >= 0, got {w:.6e}"
            )));
        }
        if w == 0.0 {
            return Ok(0.0);
        }
        let j = det(fe);
        if j <= 0.0 {
            return Err(SimError::NonPositiveDeterminant { det: j });
        }
        let f = |theta: f64| -> (f64, f64) {
            let (om, dom) = self.heat_internal_energy(x, fe, theta).expect("theta >= 0");
            (om - w, dom)
        };
        // Bracket [lo, hi] with f(lo) <= 0 <= f(hi).
        let mut lo = 0.0;
        let mut hi = (w * j / self.c).max(1.0);
        let mut grow = 0;
        while f(hi).0 < 0.0 {
            hi *= 2.0;
            grow += 1;
            if grow > 200 {
                return Err(SimError::NoConvergence {
                    what: "enthalpy inversion bracketing",
                    iterations: grow,
                    residual: f(hi).0,
                });
            }
        }
        let tol = 1e-12 * w.max(1.0);
        let mut theta = hi.min(w * j / self.c);
        for _ in 0..100 {
            let (fv, dfv) = f(theta);
            if fv.abs() <= tol {
                return Ok(theta);
            }
            if fv > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let newton = theta - fv / dfv;
            theta = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        let residual = f(theta).0;
        if residual.abs() <= 1e-10 * w.max(1.0) {
            return Ok(theta);
        }
        Err(SimError::NoConvergence {
            what: "enthalpy inversion",
            iterations: 100,
            residual,
        })
    }

    /// Conductivity at a referential point and elastic state.
    pub fn kappa(&self, x: RefPoint, fe: &Tensor2, theta: f64) -> f64 {
        self.conductivity.value(x, fe, theta)
    }

    /// Boundary heat influx at time t, boundary point x.
    pub fn h_flux(&self, t: f64, x: [f64; 2], theta: f64) -> f64 {
        self.boundary_flux.value(t, x, theta)
    }
}

/// Thermal free-energy contribution and partials.
#[derive(Clone, Copy, Debug)]
pub struct ThermalEnergy {
    pub gamma: f64,
    pub d_fe: Tensor2,
    pub d_theta: f64,
}

fn blend_up(x: f64) -> f64 {
    // cubic with value 0 at x=0, 1 at x=1, zero slope at both ends
    3.0 * x * x - 2.0 * x * x * x
}

fn blend_up_deriv(x: f64) -> f64 {
    6.0 * x - 6.0 * x * x
}

/// Cutoff function pi_lambda(Fe): 1 on the plateau
/// {det Fe >= lambda, |Fe| <= 1/lambda}, 0 on
/// {det Fe <= lambda/2 or |Fe| >= 2/lambda}, and the published cubic
/// blend in between (C^1 across all transitions).
pub fn cutoff_pi(fe: &Tensor2, lambda: f64) -> f64 {
    det_factor(det(fe), lambda) * norm_factor(fe.norm(), lambda)
}

fn det_factor(j: f64, lambda: f64) -> f64 {
    if j >= lambda {
        1.0
    } else if j <= 0.5 * lambda {
        0.0
    } else {
        // 3/l^2 (2j - l)^2 - 2/l^3 (2j - l)^3 with (2j - l) in (0, l)
        let u = (2.0 * j - lambda) / lambda;
        blend_up(u)
    }
}

fn det_factor_deriv(j: f64, lambda: f64) -> f64 {
    if j >= lambda || j <= 0.5 * lambda {
        0.0
    } else {
        let u = (2.0 * j - lambda) / lambda;
        blend_up_deriv(u) * 2.0 / lambda
    }
}

fn norm_factor(n: f64, lambda: f64) -> f64 {
    if n <= 1.0 / lambda {
        1.0
    } else if n >= 2.0 / lambda {
        0.0
    } else {
        // 3 (l n - 2)^2 + 2 (l n - 2)^3 with (l n - 2) in (-1, 0)
        let x = lambda * n - 2.0;
        3.0 * x * x + 2.0 * x * x * x
    }
}

fn norm_factor_deriv(n: f64, lambda: f64) -> f64 {
    if n <= 1.0 / lambda || n >= 2.0 / lambda {
        0.0
    } else {
        let x = lambda * n - 2.0;
        (6.0 * x + 6.0 * x * x) * lambda
    }
}

/// Gradient of pi_lambda with respect to Fe.
pub fn cutoff_pi_grad(fe: &Tensor2, lambda: f64) -> Tensor2 {
    let j = det(fe);
    let n = fe.norm();
    let fd = det_factor(j, lambda);
    let fn_ = norm_factor(n, lambda);
    let mut grad = cofactor(fe).scale(det_factor_deriv(j, lambda) * fn_);
    if n > 0.0 {
        grad = grad.add(&fe.scale(fd * norm_factor_deriv(n, lambda) / n));
    }
    grad
}

/// Regularized determinant det_lambda = pi_lambda det Fe + 1 - pi_lambda.
/// Grouped so the plateau value equals det Fe bit-identically.
pub fn det_lambda(fe: &Tensor2, params: &CutoffParams) -> f64 {
    let pi = cutoff_pi(fe, params.lambda);
    pi * det(fe) + (1.0 - pi)
}

/// Named material presets addressable from the configuration file.
pub fn material_preset(name: &str) -> Result<MaterialModel> {
    let base = MaterialModel {
        k_e: 1.0,
        g_e: 0.5,
        h_e: 0.5,
        c: 1.0,
        c1: 0.02,
        alpha: 1.5,
        viscosity: PlasticViscosity::Constant(1.0),
        conductivity: ConductivityModel::Constant(0.02),
        boundary_flux: BoundaryFluxModel::Insulated,
        rho_r: 1.0,
        modulation: Modulation::Uniform,
    };
    let m = match name {
        "neo_hookean_default" => base,
        "jeffreys" => MaterialModel {
            h_e: 0.0,
            viscosity: PlasticViscosity::Constant(20.0),
            ..base
        },
        "melting_ramp" => MaterialModel {
            viscosity: PlasticViscosity::MeltingRamp {
                m0: 1.0,
                theta_melt: 3.0,
                m_floor: 0.05,
            },
            ..base
        },
        "checkerboard" => MaterialModel {
            modulation: Modulation::Checkerboard {
                scale: 3.0,
                period: 0.25,
            },
            ..base
        },
        "kelvin_voigt" => MaterialModel {
            g_e: 0.0,
            h_e: 0.0,
            viscosity: PlasticViscosity::Constant(50.0),
            ..base
        },
        _ => {
            return Err(SimError::UnknownName {
                name: name.to_string(),
            })
        }
    };
    m.validate()?;
    Ok(m)
}

pub fn material_preset_names() -> &'static [&'static str] {
    &[
        "neo_hookean_default",
        "jeffreys",
        "melting_ramp",
        "checkerboard",
        "kelvin_voigt",
    ]
}

/// Human-readable parameter listing for a named preset.
pub fn describe_material(name: &str) -> Result<String> {
    let m = material_preset(name)?;
    let visc = match &m.viscosity {
        PlasticViscosity::Constant(v) => format!("constant M = {v}"),
        PlasticViscosity::MeltingRamp {
            m0,
            theta_melt,
            m_floor,
        } => format!("melting ramp M = {m0} * max(0, 1 - theta/{theta_melt}) + {m_floor}"),
    };
    let kappa = match &m.conductivity {
        ConductivityModel::Constant(k) => format!("constant kappa = {k}"),
    };
    let modulation = match &m.modulation {
        Modulation::Uniform => "uniform".to_string(),
        Modulation::Linear { gx, gy } => format!("linear 1 + {gx} X1 + {gy} X2"),
        Modulation::Checkerboard { scale, period } => {
            format!("checkerboard scale {scale}, period {period}")
        }
    };
    Ok(format!(
        "{name}:\n  K_E = {} Pa\n  G_E = {} Pa\n  H_E = {} Pa\n  c = {} Pa/K\n  c1 = {} Pa/K^alpha\n  alpha = {}\n  M(theta): {visc}\n  {kappa}\n  rho_R = {} kg/m^3\n  modulation: {modulation}",
        m.k_e, m.g_e, m.h_e, m.c, m.c1, m.alpha, m.rho_r
    ))
}
