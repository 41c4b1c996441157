//! One-factor observables, their expectations on the combined system, and
//! free evolution under `H₁ ⊗ I + I ⊗ H₂`.
//!
//! For a state with component functions `c_i` the expectation of the lift
//! `I ⊗ Q` is `Σ_ij ⟨c_i, c_j⟩ Q_ij`, i.e. `Q` acts on the values of the
//! fiber. The Gram matrix `⟨c_i, c_j⟩ = (A†A)_ij` is what a density-matrix
//! treatment would call the reduced state of the second factor.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::state::{random_gaussian, same_basis};
use crate::{Error, FiberState, HermiteBasis, Result, TensorState, C64};

/// Hermiticity tolerance for observable matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Which factor an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// `Q ⊗ I`
    First,
    /// `I ⊗ Q`
    Second,
}

/// Hermitian matrix on one factor's basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    basis: HermiteBasis,
    matrix: DMatrix<C64>,
}

impl Observable {
    pub fn new(basis: &HermiteBasis, matrix: DMatrix<C64>) -> Result<Self> {
        let n = basis.size();
        if matrix.shape() != (n, n) {
            return Err(Error::BasisMismatch(format!(
                "observable shape {:?} does not match basis size {n}",
                matrix.shape()
            )));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self {
            basis: basis.clone(),
            matrix,
        })
    }

    /// Diagonal observable; missing trailing entries are zero.
    pub fn diagonal(basis: &HermiteBasis, diag: &[f64]) -> Result<Self> {
        let n = basis.size();
        if diag.len() > n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: diag.len(),
            });
        }
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        Self::new(basis, m)
    }

    pub fn identity(basis: &HermiteBasis) -> Self {
        let n = basis.size();
        Self {
            basis: basis.clone(),
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Random Hermitian matrix `(G + G†)/2` with complex Gaussian `G`.
    pub fn random(basis: &HermiteBasis, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(basis, &mut rng)
    }

    pub fn random_with<R: Rng>(basis: &HermiteBasis, rng: &mut R) -> Self {
        let g = random_gaussian(basis.size(), basis.size(), rng);
        let m = (&g + g.adjoint()) * C64::new(0.5, 0.0);
        Self {
            basis: basis.clone(),
            matrix: m,
        }
    }

    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `G[i][j] = ⟨c_i, c_j⟩ = (A†A)[i][j]`, the Gram matrix of the component
/// functions. Positive semidefinite with trace `‖s‖²`.
pub fn reduced_gram(s: &TensorState) -> DMatrix<C64> {
    s.amplitudes().adjoint() * s.amplitudes()
}

/// Gram matrix of the first-factor components, `(conj(A) Aᵀ)[m][n]`.
pub fn reduced_gram_first(s: &TensorState) -> DMatrix<C64> {
    s.amplitudes().map(|z| z.conj()) * s.amplitudes().transpose()
}

/// The same Gram matrix computed in the fiber picture by quadrature,
/// `Σ_k w_k conj(w(x_k)[i]) w(x_k)[j]`.
pub fn fiber_gram(f: &FiberState) -> DMatrix<C64> {
    let w = DVector::from_iterator(
        f.basis_v().num_points(),
        f.basis_v()
            .point_weights()
            .iter()
            .map(|&x| C64::new(x, 0.0)),
    );
    let weighted = DMatrix::from_diagonal(&w) * f.values();
    f.values().adjoint() * weighted
}

/// `Σ_ij G_ij Q_ij`.
fn contract(gram: &DMatrix<C64>, q: &DMatrix<C64>) -> C64 {
    gram.iter().zip(q.iter()).map(|(g, q)| g * q).sum()
}

/// Normalized expectation of `I ⊗ Q`.
pub fn expectation_lifted(q: &Observable, s: &TensorState) -> Result<f64> {
    expectation(q, s, Factor::Second)
}

/// Normalized expectation of `Q ⊗ I`.
pub fn expectation_lifted_first(q: &Observable, s: &TensorState) -> Result<f64> {
    expectation(q, s, Factor::First)
}

pub fn expectation(q: &Observable, s: &TensorState, factor: Factor) -> Result<f64> {
    let (basis, gram) = match factor {
        Factor::First => (s.basis_v(), reduced_gram_first(s)),
        Factor::Second => (s.basis_w(), reduced_gram(s)),
    };
    same_basis(&q.basis, basis, "observable and state")?;
    let n2 = s.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(contract(&gram, &q.matrix).re / n2)
}

/// Expectation of `I ⊗ Q` with `Q` applied to each fiber value:
/// `Σ_k w_k ⟨w(x_k), Q w(x_k)⟩ / ‖w‖²`.
pub fn expectation_fiber(q: &Observable, f: &FiberState) -> Result<f64> {
    same_basis(&q.basis, f.basis_w(), "observable and fiber")?;
    let n2 = f.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::ZeroState);
    }
    let qv = f.values() * q.matrix.transpose();
    let total: C64 = f
        .values()
        .row_iter()
        .zip(qv.row_iter())
        .zip(f.basis_v().point_weights())
        .map(|((v, qv), &w)| v.dotc(&qv) * w)
        .sum();
    Ok(total.re / n2)
}

fn phases(basis: &HermiteBasis, t: f64) -> Vec<C64> {
    (0..basis.size())
        .map(|n| C64::from_polar(1.0, -basis.energy(n) * t))
        .collect()
}

/// Exact free evolution with both factors under the oscillator Hamiltonian:
/// `A[m][i] ↦ e^{-i(E_m + E_i)t} A[m][i]`.
pub fn evolve_free(s: &TensorState, t: f64) -> TensorState {
    let pv = phases(s.basis_v(), t);
    let pw = phases(s.basis_w(), t);
    let a = s.amplitudes();
    s.with_amplitudes(DMatrix::from_fn(a.nrows(), a.ncols(), |m, i| {
        pv[m] * pw[i] * a[(m, i)]
    }))
}

/// Free evolution acting directly on a fiber: each component function is
/// propagated on the grid by the first factor's oscillator, and each value
/// vector is rotated by the second factor's phases.
pub fn evolve_fiber(f: &FiberState, t: f64) -> FiberState {
    let bv = f.basis_v();
    let pv = DVector::from_vec(phases(bv, t));
    let propagator = bv.sample_matrix() * DMatrix::from_diagonal(&pv) * bv.analysis_matrix();
    let pw = DVector::from_vec(phases(f.basis_w(), t));
    f.with_values(propagator * f.values() * DMatrix::from_diagonal(&pw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{isomorphism::to_fiber, FactorVector};
    use std::f64::consts::PI;

    fn basis() -> HermiteBasis {
        HermiteBasis::new(1, 6, 12).unwrap()
    }

    fn unit(b: &HermiteBasis, i: usize) -> FactorVector {
        FactorVector::unit(b, i).unwrap()
    }

    fn bell(b: &HermiteBasis) -> TensorState {
        let e00 = TensorState::product(&unit(b, 0), &unit(b, 0));
        let e11 = TensorState::product(&unit(b, 1), &unit(b, 1));
        let h = C64::new(0.5f64.sqrt(), 0.0);
        TensorState::superpose(h, &e00, h, &e11).unwrap()
    }

    #[test]
    fn rejects_non_hermitian() {
        let b = basis();
        let mut m = DMatrix::<C64>::zeros(6, 6);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            Observable::new(&b, m),
            Err(Error::NotHermitian(_))
        ));
        let m = DMatrix::<C64>::zeros(5, 5);
        assert!(matches!(
            Observable::new(&b, m),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn eigenstate_and_symmetric_superposition() {
        let b = basis();
        let q = Observable::diagonal(&b, &[1.0, -1.0]).unwrap();
        let psi = FactorVector::random(&b, &mut rand::rng());
        let s = TensorState::product(&psi, &unit(&b, 0));
        assert!((expectation_lifted(&q, &s).unwrap() - 1.0).abs() < 1e-12);
        assert!(expectation_lifted(&q, &bell(&b)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn first_factor_mirror() {
        let b = basis();
        let s = TensorState::random(&b, &b, 4, None).unwrap();
        let id = Observable::identity(&b);
        assert!((expectation_lifted_first(&id, &s).unwrap() - 1.0).abs() < 1e-12);
        let q = Observable::diagonal(&b, &[1.0, -1.0]).unwrap();
        let phi = FactorVector::random(&b, &mut rand::rng());
        let s = TensorState::product(&unit(&b, 0), &phi);
        assert!((expectation_lifted_first(&q, &s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_state_and_mismatch() {
        let b = basis();
        let q = Observable::identity(&b);
        assert_eq!(
            expectation_lifted(&q, &TensorState::zero(&b, &b)),
            Err(Error::ZeroState)
        );
        let other = HermiteBasis::new(1, 4, 8).unwrap();
        let s = TensorState::random(&other, &other, 1, None).unwrap();
        assert!(matches!(
            expectation_lifted(&q, &s),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn gram_of_product_and_bell() {
        let b = basis();
        let psi = FactorVector::random(&b, &mut rand::rng());
        let phi = FactorVector::random(&b, &mut rand::rng());
        let g = reduced_gram(&TensorState::product(&psi, &phi));
        // ⟨c_i, c_j⟩ = conj(φ_i) φ_j for unit ψ
        let expected = phi.coefficients().map(|z| z.conj()) * phi.coefficients().transpose();
        assert!((g - expected).camax() < 1e-14);

        let g = reduced_gram(&bell(&b));
        let mut expected = DMatrix::<C64>::zeros(6, 6);
        expected[(0, 0)] = C64::new(0.5, 0.0);
        expected[(1, 1)] = C64::new(0.5, 0.0);
        assert!((g - expected).camax() < 1e-15);
    }

    #[test]
    fn fiber_gram_matches_tensor_gram() {
        let b = basis();
        let s = TensorState::random(&b, &b, 8, None).unwrap();
        let g1 = reduced_gram(&s);
        let g2 = fiber_gram(&to_fiber(&s));
        assert!((g1 - g2).camax() < 1e-12);
    }

    #[test]
    fn evolution_identity_and_period() {
        let b = basis();
        let s = TensorState::random(&b, &b, 5, None).unwrap();
        assert_eq!(evolve_free(&s, 0.0), s);
        let back = evolve_free(&s, 2.0 * PI);
        assert!(back.max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn fiber_evolution_commutes_with_isomorphism() {
        let b = basis();
        let s = TensorState::random(&b, &b, 6, None).unwrap();
        let t = 0.77;
        let a = to_fiber(&evolve_free(&s, t));
        let c = evolve_fiber(&to_fiber(&s), t);
        assert!((a.values() - c.values()).camax() < 1e-12);
    }
}
