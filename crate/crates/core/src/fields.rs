//! 2-D structured grid, cell-centered discrete fields, and the finite
//! difference operators of the solver.
//!
//! Stencils are second-order centered in the interior with one-sided
//! closures at the boundary; Neumann-type quantities use a one-layer
//! mirror-even ghost rule instead. For every derivative operator used
//! inside an implicit solve the exact discrete transpose is provided, so
//! the assembled systems are symmetric by construction and the discrete
//! power identities hold to round-off.

use rayon::prelude::*;

use crate::error::{Result, SimError};
use crate::tensorkin::{Tensor2, Tensor3};

/// Uniform cell-centered grid on [0, lx] x [0, ly].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub lx: f64,
    pub ly: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(SimError::Validation(format!(
                "grid must be at least 8 x 8 cells, got {nx} x {ny}"
            )));
        }
        if lx <= 0.0 || ly <= 0.0 {
            return Err(SimError::Validation("grid extent must be positive".into()));
        }
        Ok(Grid {
            nx,
            ny,
            hx: lx / nx as f64,
            hy: ly / ny as f64,
            lx,
            ly,
        })
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        [(i as f64 + 0.5) * self.hx, (j as f64 + 0.5) * self.hy]
    }

    #[inline]
    pub fn cell_vol(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// True for cells in the outermost ring, where the velocity is pinned.
    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }
}

/// Per-cell storage of a `Copy` value type.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T: Copy> {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<T>,
}

impl<T: Copy> Field<T> {
    pub fn new_fill(grid: &Grid, value: T) -> Self {
        Field {
            nx: grid.nx,
            ny: grid.ny,
            data: vec![value; grid.n_cells()],
        }
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(grid.n_cells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                data.push(f(i, j));
            }
        }
        Field {
            nx: grid.nx,
            ny: grid.ny,
            data,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.nx + i] = v;
    }
}

pub type ScalarField = Field<f64>;
pub type VectorField = Field<[f64; 2]>;
pub type TensorField = Field<Tensor2>;
pub type Tensor3Field = Field<Tensor3>;

impl ScalarField {
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
    pub fn min(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &x| m.min(x))
    }
}

impl VectorField {
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x[0].is_finite() && x[1].is_finite())
    }
    pub fn max_norm(&self) -> f64 {
        self.data
            .iter()
            .fold(0.0f64, |m, v| m.max((v[0] * v[0] + v[1] * v[1]).sqrt()))
    }
}

impl TensorField {
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|t| t.is_finite())
    }
}

/// Fixed-order pairwise summation; deterministic regardless of thread
/// count because it always reduces in cell-index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Midpoint quadrature of a per-cell density.
pub fn integrate(grid: &Grid, f: &ScalarField) -> f64 {
    pairwise_sum(&f.data) * grid.cell_vol()
}

// ---------------------------------------------------------------------------
// 1-D derivative kernels.
//
// `line_deriv` is the centered stencil with second-order one-sided closure;
// `line_deriv_mirror` realizes a zero-normal-derivative ghost layer. The
// `_t` variants are the exact matrix transposes in gathered form (verified
// by an adjointness property test). Lines must have at least 7 entries.
// ---------------------------------------------------------------------------

#[inline]
fn line_deriv(get: &impl Fn(usize) -> f64, n: usize, h: f64, i: usize) -> f64 {
    let s = 1.0 / (2.0 * h);
    if i == 0 {
        // -3 f0 + 4 f1 - f2, in difference form so constants vanish exactly
        (3.0 * (get(1) - get(0)) + (get(1) - get(2))) * s
    } else if i == n - 1 {
        // 3 f_{n-1} - 4 f_{n-2} + f_{n-3}
        (3.0 * (get(n - 1) - get(n - 2)) + (get(n - 3) - get(n - 2))) * s
    } else {
        (get(i + 1) - get(i - 1)) * s
    }
}

#[inline]
fn line_deriv_t(get: &impl Fn(usize) -> f64, n: usize, h: f64, k: usize) -> f64 {
    let s = 1.0 / (2.0 * h);
    if k == 0 {
        (-3.0 * get(0) - get(1)) * s
    } else if k == 1 {
        (4.0 * get(0) - get(2)) * s
    } else if k == 2 {
        (-get(0) + get(1) - get(3)) * s
    } else if k == n - 3 {
        (get(n - 4) - get(n - 2) + get(n - 1)) * s
    } else if k == n - 2 {
        (get(n - 3) - 4.0 * get(n - 1)) * s
    } else if k == n - 1 {
        (get(n - 2) + 3.0 * get(n - 1)) * s
    } else {
        (get(k - 1) - get(k + 1)) * s
    }
}

#[inline]
fn line_deriv_mirror(get: &impl Fn(usize) -> f64, n: usize, h: f64, i: usize) -> f64 {
    let s = 1.0 / (2.0 * h);
    if i == 0 {
        (get(1) - get(0)) * s
    } else if i == n - 1 {
        (get(n - 1) - get(n - 2)) * s
    } else {
        (get(i + 1) - get(i - 1)) * s
    }
}

#[inline]
fn line_deriv_mirror_t(get: &impl Fn(usize) -> f64, n: usize, h: f64, k: usize) -> f64 {
    let s = 1.0 / (2.0 * h);
    if k == 0 {
        (-get(0) - get(1)) * s
    } else if k == 1 {
        (get(0) - get(2)) * s
    } else if k == n - 2 {
        (get(n - 3) - get(n - 1)) * s
    } else if k == n - 1 {
        (get(n - 2) + get(n - 1)) * s
    } else {
        (get(k - 1) - get(k + 1)) * s
    }
}

// ---------------------------------------------------------------------------
// Field-level operators (d = 2). Row-parallel; outputs are written to
// disjoint cells from read-only inputs, so results are bit-identical for
// any worker count.
// ---------------------------------------------------------------------------

/// Gradient of a scalar field: second-order centered in the interior,
/// one-sided at the boundary. Exact for affine fields.
pub fn gradient(grid: &Grid, f: &ScalarField) -> VectorField {
    let (nx, ny, hx, hy) = (grid.nx, grid.ny, grid.hx, grid.hy);
    let data = &f.data;
    let mut out = vec![[0.0; 2]; nx * ny];
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            let gx = {
                let get = |k: usize| data[j * nx + k];
                line_deriv(&get, nx, hx, i)
            };
            let gy = {
                let get = |k: usize| data[k * nx + i];
                line_deriv(&get, ny, hy, j)
            };
            *o = [gx, gy];
        }
    });
    Field { nx, ny, data: out }
}

/// Gradient of a vector field, (grad v)_{ab} = d v_a / d x_b.
pub fn gradient_vector(grid: &Grid, v: &VectorField) -> TensorField {
    let (nx, ny, hx, hy) = (grid.nx, grid.ny, grid.hx, grid.hy);
    let data = &v.data;
    let mut out = vec![Tensor2::zero(2); nx * ny];
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            let mut t = Tensor2::zero(2);
            for a in 0..2 {
                let gx = {
                    let get = |k: usize| data[j * nx + k][a];
                    line_deriv(&get, nx, hx, i)
                };
                let gy = {
                    let get = |k: usize| data[k * nx + i][a];
                    line_deriv(&get, ny, hy, j)
                };
                t.set(a, 0, gx);
                t.set(a, 1, gy);
            }
            *o = t;
        }
    });
    Field { nx, ny, data: out }
}

/// Exact transpose of `gradient_vector`: maps a tensor field S to the
/// vector field with components (grad^T S)_a = sum_b D_b^T S_{ab}.
pub fn gradient_vector_t(grid: &Grid, s: &TensorField) -> VectorField {
    let (nx, ny, hx, hy) = (grid.nx, grid.ny, grid.hx, grid.hy);
    let data = &s.data;
    let mut out = vec![[0.0; 2]; nx * ny];
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            let mut v = [0.0; 2];
            for a in 0..2 {
                let tx = {
                    let get = |k: usize| data[j * nx + k].get(a, 0);
                    line_deriv_t(&get, nx, hx, i)
                };
                let ty = {
                    let get = |k: usize| data[k * nx + i].get(a, 1);
                    line_deriv_t(&get, ny, hy, j)
                };
                v[a] = tx + ty;
            }
            *o = v;
        }
    });
    Field { nx, ny, data: out }
}

/// Symmetric velocity gradient e(v) = sym(grad v).
pub fn sym_velocity_gradient(grid: &Grid, v: &VectorField) -> TensorField {
    let g = gradient_vector(grid, v);
    Field {
        nx: g.nx,
        ny: g.ny,
        data: g.data.iter().map(|t| t.sym()).collect(),
    }
}

/// Centered divergence of a tensor field, (div T)_a = d T_{ab} / d x_b.
pub fn divergence(grid: &Grid, t: &TensorField) -> VectorField {
    let (nx, ny, hx, hy) = (grid.nx, grid.ny, grid.hx, grid.hy);
    let data = &t.data;
    let mut out = vec![[0.0; 2]; nx * ny];
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            let mut v = [0.0; 2];
            for a in 0..2 {
                let dx = {
                    let get = |k: usize| data[j * nx + k].get(a, 0);
                    line_deriv(&get, nx, hx, i)
                };
                let dy = {
                    let get = |k: usize| data[k * nx + i].get(a, 1);
                    line_deriv(&get, ny, hy, j)
                };
                v[a] = dx + dy;
            }
            *o = v;
        }
    });
    Field { nx, ny, data: out }
}

/// Centered divergence of a vector field.
pub fn divergence_vec(grid: &Grid, v: &VectorField) -> ScalarField {
    let (nx, ny, hx, hy) = (grid.nx, grid.ny, grid.hx, grid.hy);
    let data = &v.data;
    let mut out = vec![0.0; nx * ny];
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            let dx = {
                let get = |k: usize| data[j * nx + k][0];
                line_deriv(&get, nx, hx, i)
            };
            let dy = {
                let get = |k: usize| data[k * nx + i][1];
                line_deriv(&get, ny, hy, j)
            };
            *o = dx + dy;
        }
    });
    Field { nx, ny, data: out }
}

/// Gradient of a tensor field with mirror-even ghosts,
/// (grad T)_{abk} = d T_{ab} / d x_k with zero normal derivative at the
/// boundary. Used for the hyperstress and the plastic-rate gradient.
pub fn grad3_mirror(grid: &Grid, t: &TensorField) -> Tensor3Field {
    let (nx, ny, hx, hy) = (grid.nx, grid.ny, grid.hx, grid.hy);
    let data = &t.data;
    let mut out = vec![Tensor3::zero(2); nx * ny];
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            let mut g = Tensor3::zero(2);
            for a in 0..2 {
                for b in 0..2 {
                    let dx = {
                        let get = |k: usize| data[j * nx + k].get(a, b);
                        line_deriv_mirror(&get, nx, hx, i)
                    };
                    let dy = {
                        let get = |k: usize| data[k * nx + i].get(a, b);
                        line_deriv_mirror(&get, ny, hy, j)
                    };
                    g.set(a, b, 0, dx);
                    g.set(a, b, 1, dy);
                }
            }
            *o = g;
        }
    });
    Field { nx, ny, data: out }
}

/// Exact transpose of `grad3_mirror`.
pub fn grad3_mirror_t(grid: &Grid, h3: &Tensor3Field) -> TensorField {
    let (nx, ny, hx, hy) = (grid.nx, grid.ny, grid.hx, grid.hy);
    let data = &h3.data;
    let mut out = vec![Tensor2::zero(2); nx * ny];
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            let mut t = Tensor2::zero(2);
            for a in 0..2 {
                for b in 0..2 {
                    let tx = {
                        let get = |k: usize| data[j * nx + k].get(a, b, 0);
                        line_deriv_mirror_t(&get, nx, hx, i)
                    };
                    let ty = {
                        let get = |k: usize| data[k * nx + i].get(a, b, 1);
                        line_deriv_mirror_t(&get, ny, hy, j)
                    };
                    t.set(a, b, tx + ty);
                }
            }
            *o = t;
        }
    });
    Field { nx, ny, data: out }
}

/// Hyperviscous operator div(nu |grad e|^{p-2} grad e) realized through
/// the exact adjoint, so that sum(result : e) = -sum(nu |grad e|^p) holds
/// to round-off for every field.
pub fn p_laplacian_operator(grid: &Grid, e_field: &TensorField, nu: f64, exponent: f64) -> TensorField {
    let k = grad3_mirror(grid, e_field);
    let weighted = Field {
        nx: k.nx,
        ny: k.ny,
        data: k
            .data
            .iter()
            .map(|g| {
                let coeff = if exponent == 2.0 {
                    nu
                } else {
                    nu * g.norm().powf(exponent - 2.0)
                };
                g.scale(coeff)
            })
            .collect(),
    };
    let div = grad3_mirror_t(grid, &weighted);
    Field {
        nx: div.nx,
        ny: div.ny,
        data: div.data.iter().map(|t| t.scale(-1.0)).collect(),
    }
}

/// Zeroes the velocity on the outermost cell ring (sticky-air wall).
pub fn zero_boundary_ring(grid: &Grid, v: &mut VectorField) {
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if grid.is_boundary(i, j) {
                v.set(i, j, [0.0, 0.0]);
            }
        }
    }
}
