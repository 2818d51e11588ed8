//! Fixed-dimension dense tensor algebra and the pointwise kinematic
//! relations of finite-strain plasticity: deformation gradient from the
//! reference mapping, the multiplicative elastic/plastic split, and the
//! velocity-gradient decomposition.
//!
//! Dimension `d` is a runtime parameter restricted to 2 or 3. Values are
//! plain `Copy` structs; every operation is pure and re-entrant.

use crate::error::{Result, SimError};

/// Relative floor below which a determinant is treated as singular.
pub const SINGULARITY_FLOOR: f64 = 1e-12;

/// Dense d-by-d second-order tensor, row-major in a fixed backing array.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor2 {
    dim: usize,
    a: [f64; 9],
}

/// Dense d-by-d-by-d third-order tensor (gradients of second-order fields).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    a: [f64; 27],
}

impl Tensor2 {
    pub fn zero(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
        Tensor2 { dim, a: [0.0; 9] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zero(dim);
        for i in 0..dim {
            t.set(i, i, 1.0);
        }
        t
    }

    pub fn diag(dim: usize, entries: &[f64]) -> Self {
        let mut t = Self::zero(dim);
        for i in 0..dim {
            t.set(i, i, entries[i]);
        }
        t
    }

    pub fn from_rows2(rows: [[f64; 2]; 2]) -> Self {
        let mut t = Self::zero(2);
        for i in 0..2 {
            for j in 0..2 {
                t.set(i, j, rows[i][j]);
            }
        }
        t
    }

    pub fn from_rows3(rows: [[f64; 3]; 3]) -> Self {
        let mut t = Self::zero(3);
        for i in 0..3 {
            for j in 0..3 {
                t.set(i, j, rows[i][j]);
            }
        }
        t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.dim + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.dim + j] += v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(i, j, self.get(j, i));
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.a[..self.dim * self.dim]
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a[..self.dim * self.dim].iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut t = *self;
        for x in t.a[..self.dim * self.dim].iter_mut() {
            *x *= s;
        }
        t
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut t = *self;
        for (x, y) in t.a[..self.dim * self.dim]
            .iter_mut()
            .zip(other.a[..self.dim * self.dim].iter())
        {
            *x += y;
        }
        t
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut t = Self::zero(d);
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.get(i, k) * other.get(k, j);
                }
                t.set(i, j, s);
            }
        }
        t
    }

    /// Double contraction A : B = sum_ij A_ij B_ij.
    pub fn ddot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.a[..self.dim * self.dim]
            .iter()
            .zip(other.a[..self.dim * self.dim].iter())
            .map(|(x, y)| x * y)
            .sum()
    }

    /// Matrix-vector product A v (d = 2 only used by the field solver).
    pub fn apply2(&self, v: [f64; 2]) -> [f64; 2] {
        debug_assert_eq!(self.dim, 2);
        [
            self.get(0, 0) * v[0] + self.get(0, 1) * v[1],
            self.get(1, 0) * v[0] + self.get(1, 1) * v[1],
        ]
    }

    pub fn sym(&self) -> Self {
        let mut t = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(i, j, 0.5 * (self.get(i, j) + self.get(j, i)));
            }
        }
        t
    }
}

impl Tensor3 {
    pub fn zero(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
        Tensor3 { dim, a: [0.0; 27] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.a[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.a[(i * self.dim + j) * self.dim + k] = v;
    }

    pub fn norm(&self) -> f64 {
        let n = self.dim * self.dim * self.dim;
        self.a[..n].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut t = *self;
        let n = self.dim * self.dim * self.dim;
        for x in t.a[..n].iter_mut() {
            *x *= s;
        }
        t
    }

    /// Triple contraction A ::: B.
    pub fn tdot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim * self.dim * self.dim;
        self.a[..n]
            .iter()
            .zip(other.a[..n].iter())
            .map(|(x, y)| x * y)
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        let n = self.dim * self.dim * self.dim;
        self.a[..n].iter().all(|x| x.is_finite())
    }
}

/// Exact determinant (closed form for d = 2, 3).
pub fn det(a: &Tensor2) -> f64 {
    match a.dim {
        2 => a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0),
        3 => {
            a.get(0, 0) * (a.get(1, 1) * a.get(2, 2) - a.get(1, 2) * a.get(2, 1))
                - a.get(0, 1) * (a.get(1, 0) * a.get(2, 2) - a.get(1, 2) * a.get(2, 0))
                + a.get(0, 2) * (a.get(1, 0) * a.get(2, 1) - a.get(1, 1) * a.get(2, 0))
        }
        _ => unreachable!(),
    }
}

/// Cofactor matrix, satisfying A (Cof A)^T = det(A) I.
pub fn cofactor(a: &Tensor2) -> Tensor2 {
    let mut c = Tensor2::zero(a.dim);
    match a.dim {
        2 => {
            c.set(0, 0, a.get(1, 1));
            c.set(0, 1, -a.get(1, 0));
            c.set(1, 0, -a.get(0, 1));
            c.set(1, 1, a.get(0, 0));
        }
        3 => {
            for i in 0..3 {
                for j in 0..3 {
                    let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
                    let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                    c.set(
                        i,
                        j,
                        a.get(i1, j1) * a.get(i2, j2) - a.get(i1, j2) * a.get(i2, j1),
                    );
                }
            }
        }
        _ => unreachable!(),
    }
    c
}

/// Inverse with a singularity floor of `SINGULARITY_FLOOR * ||A||^d`.
pub fn inverse(a: &Tensor2) -> Result<Tensor2> {
    let d = det(a);
    let floor = SINGULARITY_FLOOR * a.norm().powi(a.dim as i32);
    if d.abs() <= floor || !d.is_finite() {
        return Err(SimError::SingularMatrix { det: d, floor });
    }
    // A^{-1} = Cof(A)^T / det A
    Ok(cofactor(a).transpose().scale(1.0 / d))
}

/// Deviatoric part A - (tr A / d) I.
pub fn dev(a: &Tensor2) -> Tensor2 {
    let mean = a.trace() / a.dim as f64;
    let mut t = *a;
    for i in 0..a.dim {
        t.add_at(i, i, -mean);
    }
    t
}

/// Spatial deformation gradient F = (grad xi)^{-1}.
pub fn deformation_gradient(grad_xi: &Tensor2) -> Result<Tensor2> {
    inverse(grad_xi)
}

/// Elastic strain reconstructed from the plastic distortion and the
/// reference-mapping gradient: Fe = (Fp grad xi)^{-1}, so Fe Fp grad xi = I.
pub fn elastic_strain(fp: &Tensor2, grad_xi: &Tensor2) -> Result<Tensor2> {
    inverse(&fp.matmul(grad_xi))
}

/// Elastic distortion rate from the velocity-gradient decomposition:
/// returns grad v - Fe Lp Fe^{-1}, which equals dFe/dt Fe^{-1}.
pub fn velocity_gradient_split(grad_v: &Tensor2, fe: &Tensor2, lp: &Tensor2) -> Result<Tensor2> {
    let fe_inv = inverse(fe)?;
    Ok(grad_v.sub(&fe.matmul(lp).matmul(&fe_inv)))
}

/// Matrix exponential by scaling-and-squaring with a 6-term Taylor core.
///
/// Accurate to round-off for the small per-step plastic increments it is
/// used on; preserves det(exp L) = 1 for trace-free L to the same level.
pub fn matrix_exp(a: &Tensor2) -> Tensor2 {
    // scale until the core argument is below 1/64 so the 6-term Taylor
    // truncation sits at round-off
    let norm = a.norm();
    let s = if norm > 0.015625 {
        (norm / 0.015625).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scale(0.5f64.powi(s));
    // Taylor sum I + B + B^2/2! + ... + B^6/6!
    let mut result = Tensor2::identity(a.dim);
    let mut term = Tensor2::identity(a.dim);
    for k in 1..=6 {
        term = term.matmul(&b).scale(1.0 / k as f64);
        result = result.add(&term);
    }
    for _ in 0..s {
        result = result.matmul(&result);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn tensor_close(a: &Tensor2, b: &Tensor2, tol: f64) {
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                assert_close(a.get(i, j), b.get(i, j), tol);
            }
        }
    }

    /// Brute-force cofactor-expansion determinant, kept independent of `det`.
    fn det_oracle(a: &Tensor2) -> f64 {
        fn perm_det(m: &[Vec<f64>]) -> f64 {
            let n = m.len();
            if n == 1 {
                return m[0][0];
            }
            let mut s = 0.0;
            for j in 0..n {
                let minor: Vec<Vec<f64>> = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&k| k != j)
                            .map(|k| m[i][k])
                            .collect::<Vec<_>>()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * m[0][j] * perm_det(&minor);
            }
            s
        }
        let rows: Vec<Vec<f64>> = (0..a.dim())
            .map(|i| (0..a.dim()).map(|j| a.get(i, j)).collect())
            .collect();
        perm_det(&rows)
    }

    #[test]
    fn det_identity_and_diag() {
        assert_eq!(det(&Tensor2::identity(2)), 1.0);
        assert_eq!(det(&Tensor2::diag(2, &[2.0, 2.0])), 4.0);
    }

    #[test]
    fn det_matches_cofactor_expansion_oracle() {
        let a = Tensor2::from_rows3([[1.3, -0.2, 0.8], [0.4, 2.1, -1.1], [-0.7, 0.5, 0.9]]);
        let d = det(&a);
        let oracle = det_oracle(&a);
        assert!((d - oracle).abs() <= 1e-14 * oracle.abs().max(1.0));
    }

    #[test]
    fn cofactor_identity_and_diag_swap() {
        tensor_close(&cofactor(&Tensor2::identity(2)), &Tensor2::identity(2), 0.0);
        tensor_close(&cofactor(&Tensor2::identity(3)), &Tensor2::identity(3), 0.0);
        let c = cofactor(&Tensor2::diag(2, &[3.0, 5.0]));
        tensor_close(&c, &Tensor2::diag(2, &[5.0, 3.0]), 0.0);
    }

    #[test]
    fn cofactor_matches_inverse_route() {
        let a = Tensor2::from_rows3([[2.0, 0.3, -0.5], [0.1, 1.7, 0.4], [-0.2, 0.6, 1.2]]);
        // Cof A = det(A) A^{-T}
        let expect = inverse(&a).unwrap().transpose().scale(det(&a));
        tensor_close(&cofactor(&a), &expect, 1e-12);
    }

    #[test]
    fn inverse_examples_and_singular() {
        tensor_close(
            &inverse(&Tensor2::identity(2)).unwrap(),
            &Tensor2::identity(2),
            0.0,
        );
        tensor_close(
            &inverse(&Tensor2::diag(2, &[2.0, 4.0])).unwrap(),
            &Tensor2::diag(2, &[0.5, 0.25]),
            0.0,
        );
        let singular = Tensor2::from_rows2([[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(
            inverse(&singular),
            Err(SimError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn dev_examples() {
        let z = dev(&Tensor2::identity(2));
        assert_eq!(z.norm(), 0.0);
        let already = Tensor2::diag(2, &[2.0, -2.0]);
        tensor_close(&dev(&already), &already, 0.0);
        tensor_close(
            &dev(&Tensor2::diag(2, &[3.0, 1.0])),
            &Tensor2::diag(2, &[1.0, -1.0]),
            0.0,
        );
    }

    #[test]
    fn deformation_gradient_examples() {
        tensor_close(
            &deformation_gradient(&Tensor2::identity(2)).unwrap(),
            &Tensor2::identity(2),
            0.0,
        );
        tensor_close(
            &deformation_gradient(&Tensor2::diag(2, &[0.5, 0.5])).unwrap(),
            &Tensor2::diag(2, &[2.0, 2.0]),
            0.0,
        );
        let g = Tensor2::from_rows2([[1.1, 0.3], [-0.2, 0.9]]);
        let f = deformation_gradient(&g).unwrap();
        tensor_close(&f.matmul(&g), &Tensor2::identity(2), 1e-12);
    }

    #[test]
    fn elastic_strain_examples() {
        let id = Tensor2::identity(2);
        tensor_close(&elastic_strain(&id, &id).unwrap(), &id, 0.0);
        // Fp = I reduces to Fe = F
        let g = Tensor2::from_rows2([[0.8, 0.1], [0.05, 1.2]]);
        let fe = elastic_strain(&id, &g).unwrap();
        let f = deformation_gradient(&g).unwrap();
        tensor_close(&fe, &f, 1e-13);
        // det multiplicativity with isochoric Fp
        let s = 0.3f64;
        let fp = Tensor2::diag(2, &[s.exp(), (-s).exp()]);
        let fe = elastic_strain(&fp, &g).unwrap();
        assert_close(det(&fe), det(&f), 1e-12 * det(&f).abs());
        // exact inverse composition Fe Fp grad_xi = I
        tensor_close(&fe.matmul(&fp).matmul(&g), &Tensor2::identity(2), 1e-12);
    }

    #[test]
    fn velocity_gradient_split_examples() {
        let id = Tensor2::identity(2);
        let grad_v = Tensor2::from_rows2([[0.2, -0.4], [0.1, 0.3]]);
        let zero = Tensor2::zero(2);
        tensor_close(
            &velocity_gradient_split(&grad_v, &id, &zero).unwrap(),
            &grad_v,
            0.0,
        );
        let lp = Tensor2::diag(2, &[0.5, -0.5]);
        tensor_close(
            &velocity_gradient_split(&zero, &id, &lp).unwrap(),
            &lp.scale(-1.0),
            0.0,
        );
        // identity rearrangement: result * Fe + Fe * Lp = grad_v * Fe
        let fe = Tensor2::from_rows2([[1.2, 0.2], [-0.1, 0.85]]);
        let r = velocity_gradient_split(&grad_v, &fe, &lp).unwrap();
        let lhs = r.matmul(&fe).add(&fe.matmul(&lp));
        tensor_close(&lhs, &grad_v.matmul(&fe), 1e-12);
    }

    #[test]
    fn matrix_exp_closed_form_diag() {
        let l = Tensor2::diag(2, &[0.3, -0.3]);
        let e = matrix_exp(&l);
        tensor_close(
            &e,
            &Tensor2::diag(2, &[0.3f64.exp(), (-0.3f64).exp()]),
            1e-12,
        );
    }

    proptest! {
        #[test]
        fn dev_is_trace_free(entries in prop::array::uniform4(-10.0f64..10.0)) {
            let a = Tensor2::from_rows2([[entries[0], entries[1]], [entries[2], entries[3]]]);
            prop_assert!(dev(&a).trace().abs() <= 1e-13);
        }

        #[test]
        fn cofactor_algebra(entries in prop::array::uniform4(-5.0f64..5.0)) {
            let a = Tensor2::from_rows2([[entries[0], entries[1]], [entries[2], entries[3]]]);
            let lhs = a.matmul(&cofactor(&a).transpose());
            let rhs = Tensor2::identity(2).scale(det(&a));
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((lhs.get(i, j) - rhs.get(i, j)).abs() <= 1e-12 * a.norm().powi(2).max(1.0));
                }
            }
        }

        #[test]
        fn exp_of_trace_free_has_unit_det(s in -0.5f64..0.5, t in -0.5f64..0.5, tau in 0.01f64..1.0) {
            // L trace-free; det exp(tau L) must equal e^{tr} = 1
            let l = Tensor2::from_rows2([[s, t], [t * 0.5, -s]]).scale(tau);
            let e = matrix_exp(&l);
            prop_assert!((det(&e) - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn elastic_strain_is_inverse_composition(
            g in prop::array::uniform4(-0.3f64..0.3),
            s in -0.4f64..0.4,
        ) {
            let grad_xi = Tensor2::from_rows2([[1.0 + g[0], g[1]], [g[2], 1.0 + g[3]]]);
            let fp = Tensor2::diag(2, &[s.exp(), (-s).exp()]);
            if let Ok(fe) = elastic_strain(&fp, &grad_xi) {
                let comp = fe.matmul(&fp).matmul(&grad_xi);
                for i in 0..2 {
                    for j in 0..2 {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((comp.get(i, j) - expect).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}
