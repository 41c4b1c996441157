//! Orthonormal Hermite functions and Gauss–Hermite quadrature.
//!
//! The functions `h_n(x) = (2^n n! √π)^(-1/2) H_n(x) e^(-x²/2)` are
//! orthonormal in `L²(ℝ)`. A rule with `M` nodes integrates every product
//! `h_i h_j` with `i, j < M` exactly, so inner products of truncated
//! expansions become finite weighted sums over the nodes. Weights are stated
//! against plain Lebesgue measure, i.e. `∫ f ≈ Σ_k w_k f(x_k)` for `f` that
//! already carries the Gaussian factor.
//!
//! Multidimensional bases are tensor products of the 1-D basis with
//! lexicographic flattening (first axis slowest).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Evaluate the `n`th orthonormal Hermite function at `x` by the upward
/// three-term recurrence.
pub fn eval_hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fill `out[n] = h_n(x)` for `n < out.len()`.
pub fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = 2f64.sqrt() * x * out[0];
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// Nodes (ascending) and Lebesgue-measure weights of the `m`-point
/// Gauss–Hermite rule for Hermite functions.
///
/// Nodes start from the Golub–Welsch eigenvalues and are polished by Newton
/// steps on `h_m`; weights are the Christoffel numbers `1 / Σ_{n<m} h_n(x)²`,
/// which avoids forming `e^{x²}` explicitly.
pub fn gauss_hermite_rule(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let jacobi = DMatrix::from_fn(m, m, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let mut buf = vec![0.0; m + 1];
    let mf = m as f64;
    for x in nodes.iter_mut() {
        for _ in 0..10 {
            hermite_functions(*x, &mut buf);
            let f = buf[m];
            let df = (2.0 * mf).sqrt() * buf[m - 1] - *x * buf[m];
            if df == 0.0 {
                break;
            }
            let step = f / df;
            *x -= step;
            if step.abs() <= 1e-16 * (1.0 + x.abs()) {
                break;
            }
        }
    }
    // exact reflection symmetry
    for k in 0..m / 2 {
        let a = 0.5 * (nodes[m - 1 - k] - nodes[k]);
        nodes[k] = -a;
        nodes[m - 1 - k] = a;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }

    let weights = nodes
        .iter()
        .map(|&x| {
            hermite_functions(x, &mut buf[..m]);
            1.0 / buf[..m].iter().map(|h| h * h).sum::<f64>()
        })
        .collect();
    (nodes, weights)
}

/// Serializable basis descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub dim: usize,
    pub order: usize,
    pub quad_nodes: usize,
}

/// Truncated tensor-product Hermite basis with its quadrature grid.
#[derive(Clone)]
pub struct HermiteBasis {
    dim: usize,
    order: usize,
    quad_nodes: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    point_weights: Vec<f64>,
    // K × size, entry (k, i) = φ_i(x_k)
    samples: DMatrix<C64>,
    // size × K, entry (i, k) = w_k φ_i(x_k)
    analysis: DMatrix<C64>,
}

impl std::fmt::Debug for HermiteBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HermiteBasis")
            .field("dim", &self.dim)
            .field("order", &self.order)
            .field("quad_nodes", &self.quad_nodes)
            .finish_non_exhaustive()
    }
}

impl PartialEq for HermiteBasis {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor() == other.descriptor()
    }
}

impl HermiteBasis {
    /// Build a basis of `order` functions per axis in `dim` dimensions with a
    /// `quad_nodes`-point rule per axis.
    pub fn new(dim: usize, order: usize, quad_nodes: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBasis("dim must be at least 1".into()));
        }
        if order == 0 {
            return Err(Error::InvalidBasis("order must be at least 1".into()));
        }
        if quad_nodes < order {
            return Err(Error::InvalidBasis(format!(
                "quad_nodes ({quad_nodes}) must be at least order ({order})"
            )));
        }
        let size = checked_pow(order, dim)?;
        let points = checked_pow(quad_nodes, dim)?;

        let (nodes, weights) = gauss_hermite_rule(quad_nodes);
        let mut table = vec![0.0; quad_nodes * order];
        for (k, &x) in nodes.iter().enumerate() {
            hermite_functions(x, &mut table[k * order..(k + 1) * order]);
        }

        let point_weights: Vec<f64> = (0..points)
            .map(|p| {
                multi_index(p, quad_nodes, dim)
                    .iter()
                    .map(|&k| weights[k])
                    .product()
            })
            .collect();
        let samples = DMatrix::from_fn(points, size, |p, i| {
            let pk = multi_index(p, quad_nodes, dim);
            let ni = multi_index(i, order, dim);
            let v: f64 = pk
                .iter()
                .zip(&ni)
                .map(|(&k, &n)| table[k * order + n])
                .product();
            C64::new(v, 0.0)
        });
        let analysis = DMatrix::from_fn(size, points, |i, p| samples[(p, i)] * point_weights[p]);

        Ok(Self {
            dim,
            order,
            quad_nodes,
            nodes,
            weights,
            point_weights,
            samples,
            analysis,
        })
    }

    /// Basis with the default rule of `2 * order` nodes per axis.
    pub fn with_default_quadrature(dim: usize, order: usize) -> Result<Self> {
        Self::new(dim, order, 2 * order)
    }

    pub fn from_descriptor(d: BasisDescriptor) -> Result<Self> {
        Self::new(d.dim, d.order, d.quad_nodes)
    }

    pub fn descriptor(&self) -> BasisDescriptor {
        BasisDescriptor {
            dim: self.dim,
            order: self.order,
            quad_nodes: self.quad_nodes,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn quad_nodes(&self) -> usize {
        self.quad_nodes
    }

    /// 1-D quadrature abscissae, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// 1-D quadrature weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of basis functions, `order^dim`.
    pub fn size(&self) -> usize {
        self.samples.ncols()
    }

    /// Number of grid points, `quad_nodes^dim`.
    pub fn num_points(&self) -> usize {
        self.samples.nrows()
    }

    /// Coordinates of grid point `k`.
    pub fn point(&self, k: usize) -> Vec<f64> {
        multi_index(k, self.quad_nodes, self.dim)
            .into_iter()
            .map(|j| self.nodes[j])
            .collect()
    }

    /// Product weights of all grid points.
    pub fn point_weights(&self) -> &[f64] {
        &self.point_weights
    }

    /// Per-axis quantum numbers of basis function `i`.
    pub fn quantum_numbers(&self, i: usize) -> Vec<usize> {
        multi_index(i, self.order, self.dim)
    }

    /// Oscillator energy `|n| + d/2` of basis function `i`.
    pub fn energy(&self, i: usize) -> f64 {
        self.quantum_numbers(i).iter().sum::<usize>() as f64 + 0.5 * self.dim as f64
    }

    /// Evaluate basis function `i` at an arbitrary point.
    pub fn eval(&self, i: usize, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.quantum_numbers(i)
            .iter()
            .zip(x)
            .map(|(&n, &xi)| eval_hermite_function(n, xi))
            .product()
    }

    /// Grid samples of the basis, shape `(num_points, size)`.
    pub fn sample_matrix(&self) -> &DMatrix<C64> {
        &self.samples
    }

    /// Quadrature analysis operator, shape `(size, num_points)`.
    pub fn analysis_matrix(&self) -> &DMatrix<C64> {
        &self.analysis
    }

    /// Fourier coefficients `c_i = Σ_k w_k φ_i(x_k) f(x_k)` of grid samples.
    pub fn project_function(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.num_points() {
            return Err(Error::LengthMismatch {
                expected: self.num_points(),
                got: samples.len(),
            });
        }
        Ok((0..self.size())
            .map(|i| {
                samples
                    .iter()
                    .enumerate()
                    .map(|(k, f)| self.analysis[(i, k)].re * f)
                    .sum()
            })
            .collect())
    }

    /// Grid samples `f(x_k) = Σ_i c_i φ_i(x_k)` of a coefficient vector.
    pub fn synthesize(&self, coefficients: &[f64]) -> Result<Vec<f64>> {
        if coefficients.len() != self.size() {
            return Err(Error::LengthMismatch {
                expected: self.size(),
                got: coefficients.len(),
            });
        }
        Ok((0..self.num_points())
            .map(|k| {
                coefficients
                    .iter()
                    .enumerate()
                    .map(|(i, c)| self.samples[(k, i)].re * c)
                    .sum()
            })
            .collect())
    }
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or_else(|| Error::InvalidBasis(format!("{base}^{exp} overflows")))
}

/// Lexicographic decomposition of `flat` into `dim` digits in base `base`.
pub(crate) fn multi_index(mut flat: usize, base: usize, dim: usize) -> Vec<usize> {
    let mut digits = vec![0; dim];
    for d in (0..dim).rev() {
        digits[d] = flat % base;
        flat /= base;
    }
    digits
}
