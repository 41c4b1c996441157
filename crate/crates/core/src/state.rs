//! Product-basis and fiber representations of bipartite states.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, HermiteBasis, Result, C64};

/// A vector of one factor space, given by its Hermite coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorVector {
    basis: HermiteBasis,
    coefficients: DVector<C64>,
}

impl FactorVector {
    pub fn new(basis: &HermiteBasis, coefficients: DVector<C64>) -> Result<Self> {
        if coefficients.len() != basis.size() {
            return Err(Error::LengthMismatch {
                expected: basis.size(),
                got: coefficients.len(),
            });
        }
        Ok(Self {
            basis: basis.clone(),
            coefficients,
        })
    }

    pub fn from_slice(basis: &HermiteBasis, coefficients: &[C64]) -> Result<Self> {
        Self::new(basis, DVector::from_column_slice(coefficients))
    }

    /// Unit vector `e_i`.
    pub fn unit(basis: &HermiteBasis, i: usize) -> Result<Self> {
        if i >= basis.size() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: basis.size(),
            });
        }
        let mut c = DVector::zeros(basis.size());
        c[i] = C64::new(1.0, 0.0);
        Ok(Self {
            basis: basis.clone(),
            coefficients: c,
        })
    }

    /// Random unit vector with i.i.d. complex Gaussian coefficients.
    pub fn random<R: Rng>(basis: &HermiteBasis, rng: &mut R) -> Self {
        let c = random_gaussian(basis.size(), 1, rng).column(0).normalize();
        Self {
            basis: basis.clone(),
            coefficients: c,
        }
    }

    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &DVector<C64> {
        &self.coefficients
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.norm()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &FactorVector) -> Result<C64> {
        same_basis(&self.basis, &other.basis, "factor vectors")?;
        Ok(self.coefficients.dotc(&other.coefficients))
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            basis: self.basis.clone(),
            coefficients: &self.coefficients * a,
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// Samples of the represented function on the basis grid.
    pub fn samples(&self) -> DVector<C64> {
        self.basis.sample_matrix() * &self.coefficients
    }
}

/// A state of `V ⊗ W` as the amplitude matrix `A[m][i]` of `h_m ⊗ h_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorState {
    basis_v: HermiteBasis,
    basis_w: HermiteBasis,
    amplitudes: DMatrix<C64>,
}

impl TensorState {
    pub fn new(
        basis_v: &HermiteBasis,
        basis_w: &HermiteBasis,
        amplitudes: DMatrix<C64>,
    ) -> Result<Self> {
        if amplitudes.shape() != (basis_v.size(), basis_w.size()) {
            return Err(Error::BasisMismatch(format!(
                "amplitude shape {:?} does not match bases ({}, {})",
                amplitudes.shape(),
                basis_v.size(),
                basis_w.size()
            )));
        }
        Ok(Self {
            basis_v: basis_v.clone(),
            basis_w: basis_w.clone(),
            amplitudes,
        })
    }

    pub fn zero(basis_v: &HermiteBasis, basis_w: &HermiteBasis) -> Self {
        Self {
            basis_v: basis_v.clone(),
            basis_w: basis_w.clone(),
            amplitudes: DMatrix::zeros(basis_v.size(), basis_w.size()),
        }
    }

    /// `ψ ⊗ φ`.
    pub fn product(psi: &FactorVector, phi: &FactorVector) -> Self {
        Self {
            basis_v: psi.basis.clone(),
            basis_w: phi.basis.clone(),
            amplitudes: &psi.coefficients * phi.coefficients.transpose(),
        }
    }

    /// `a·s1 + b·s2`, unnormalized.
    pub fn superpose(a: C64, s1: &TensorState, b: C64, s2: &TensorState) -> Result<Self> {
        s1.check_compatible(s2)?;
        Ok(Self {
            basis_v: s1.basis_v.clone(),
            basis_w: s1.basis_w.clone(),
            amplitudes: &s1.amplitudes * a + &s2.amplitudes * b,
        })
    }

    /// Normalized random state. With `schmidt_rank = Some(r)` the state is
    /// `Σ_r σ_r u_r ⊗ v_r` with random orthonormal `u_r`, `v_r` and strictly
    /// positive `σ_r`; otherwise amplitudes are i.i.d. complex Gaussians.
    pub fn random(
        basis_v: &HermiteBasis,
        basis_w: &HermiteBasis,
        seed: u64,
        schmidt_rank: Option<usize>,
    ) -> Result<Self> {
        match schmidt_rank {
            Some(r) => random_state_with_spectrum(basis_v, basis_w, seed, r).map(|(s, _)| s),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random_gaussian(basis_v.size(), basis_w.size(), &mut rng);
                let norm = a.norm();
                Self::new(basis_v, basis_w, a / C64::new(norm, 0.0))
            }
        }
    }

    pub fn basis_v(&self) -> &HermiteBasis {
        &self.basis_v
    }

    pub fn basis_w(&self) -> &HermiteBasis {
        &self.basis_w
    }

    pub fn amplitudes(&self) -> &DMatrix<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DMatrix<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|a| *a == C64::new(0.0, 0.0))
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            basis_v: self.basis_v.clone(),
            basis_w: self.basis_w.clone(),
            amplitudes: &self.amplitudes * a,
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// Standard inner product `Σ conj(A1) A2`.
    pub fn inner(&self, other: &TensorState) -> Result<C64> {
        self.check_compatible(other)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Exchange the roles of the two factors.
    pub fn swap_factors(&self) -> Self {
        Self {
            basis_v: self.basis_w.clone(),
            basis_w: self.basis_v.clone(),
            amplitudes: self.amplitudes.transpose(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &TensorState) -> Result<f64> {
        self.check_compatible(other)?;
        Ok((&self.amplitudes - &other.amplitudes)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_compatible(&self, other: &TensorState) -> Result<()> {
        same_basis(&self.basis_v, &other.basis_v, "first factor")?;
        same_basis(&self.basis_w, &other.basis_w, "second factor")
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: DMatrix<C64>) -> Self {
        debug_assert_eq!(amplitudes.shape(), self.amplitudes.shape());
        Self {
            basis_v: self.basis_v.clone(),
            basis_w: self.basis_w.clone(),
            amplitudes,
        }
    }
}

/// The state as a `W`-valued function sampled on the grid of the first
/// factor: row `k` holds `w(x_k)` in the `W` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberState {
    basis_v: HermiteBasis,
    basis_w: HermiteBasis,
    values: DMatrix<C64>,
}

impl FiberState {
    pub fn new(
        basis_v: &HermiteBasis,
        basis_w: &HermiteBasis,
        values: DMatrix<C64>,
    ) -> Result<Self> {
        if values.shape() != (basis_v.num_points(), basis_w.size()) {
            return Err(Error::BasisMismatch(format!(
                "fiber shape {:?} does not match grid ({}, {})",
                values.shape(),
                basis_v.num_points(),
                basis_w.size()
            )));
        }
        Ok(Self {
            basis_v: basis_v.clone(),
            basis_w: basis_w.clone(),
            values,
        })
    }

    pub fn basis_v(&self) -> &HermiteBasis {
        &self.basis_v
    }

    pub fn basis_w(&self) -> &HermiteBasis {
        &self.basis_w
    }

    pub fn values(&self) -> &DMatrix<C64> {
        &self.values
    }

    /// `w(x_k)` as a vector of `W`.
    pub fn value_at(&self, k: usize) -> Result<FactorVector> {
        if k >= self.values.nrows() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.values.nrows(),
            });
        }
        FactorVector::new(&self.basis_w, self.values.row(k).transpose())
    }

    /// `Σ_k w_k ⟨w1(x_k), w2(x_k)⟩_W`.
    pub fn inner(&self, other: &FiberState) -> Result<C64> {
        same_basis(&self.basis_v, &other.basis_v, "fiber grids")?;
        same_basis(&self.basis_w, &other.basis_w, "fiber value spaces")?;
        let w = self.basis_v.point_weights();
        Ok(self
            .values
            .row_iter()
            .zip(other.values.row_iter())
            .zip(w)
            .map(|((a, b), &wk)| a.dotc(&b) * wk)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        let w = self.basis_v.point_weights();
        self.values
            .row_iter()
            .zip(w)
            .map(|(r, &wk)| wk * r.norm_squared())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|a| *a == C64::new(0.0, 0.0))
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            basis_v: self.basis_v.clone(),
            basis_w: self.basis_w.clone(),
            values: &self.values * a,
        }
    }

    pub(crate) fn with_values(&self, values: DMatrix<C64>) -> Self {
        Self {
            basis_v: self.basis_v.clone(),
            basis_w: self.basis_w.clone(),
            values,
        }
    }
}

/// Random normalized state of planted Schmidt rank, returned together with
/// the planted coefficients (descending, unit 2-norm).
pub fn random_state_with_spectrum(
    basis_v: &HermiteBasis,
    basis_w: &HermiteBasis,
    seed: u64,
    rank: usize,
) -> Result<(TensorState, Vec<f64>)> {
    let max = basis_v.size().min(basis_w.size());
    if rank == 0 || rank > max {
        return Err(Error::RankOutOfRange { rank, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_isometry(basis_v.size(), rank, &mut rng);
    let v = random_isometry(basis_w.size(), rank, &mut rng);
    let mut sigma: Vec<f64> = (0..rank).map(|_| rng.random_range(0.1..1.0)).collect();
    let total = sigma.iter().map(|s| s * s).sum::<f64>().sqrt();
    sigma.iter_mut().for_each(|s| *s /= total);
    sigma.sort_by(|a, b| b.total_cmp(a));

    let mut a = DMatrix::zeros(basis_v.size(), basis_w.size());
    for (r, &s) in sigma.iter().enumerate() {
        a += u.column(r) * v.column(r).transpose() * C64::new(s, 0.0);
    }
    Ok((TensorState::new(basis_v, basis_w, a)?, sigma))
}

pub(crate) fn random_gaussian<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `n × r` matrix with orthonormal columns.
pub(crate) fn random_isometry<R: Rng>(n: usize, r: usize, rng: &mut R) -> DMatrix<C64> {
    random_gaussian(n, r, rng).qr().q()
}

pub(crate) fn same_basis(a: &HermiteBasis, b: &HermiteBasis, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::BasisMismatch(format!(
            "{what}: {:?} vs {:?}",
            a.descriptor(),
            b.descriptor()
        )));
    }
    Ok(())
}
