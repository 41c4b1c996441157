//! Schmidt analysis and the value-span criterion.
//!
//! A state is decomposable exactly when the values `w(x)` of its fiber all
//! lie on one complex line of `W`. With rows scaled by `√w_k`, the sampled
//! value matrix is `D^{1/2} H A` where `D^{1/2} H` has orthonormal columns,
//! so its singular values are the Schmidt coefficients themselves.

use nalgebra::{DMatrix, DVector};

use crate::{Error, FactorVector, FiberState, Result, TensorState, C64};

/// `A = Σ_r σ_r u_r v_rᵀ`, i.e. the state is `Σ_r σ_r u_r ⊗ v_r`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
    /// Columns `u_r`, orthonormal.
    pub left: DMatrix<C64>,
    /// Columns `v_r`, orthonormal.
    pub right: DMatrix<C64>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let mut a = DMatrix::zeros(self.left.nrows(), self.right.nrows());
        for (r, &s) in self.singular_values.iter().enumerate() {
            a += self.left.column(r) * self.right.column(r).transpose() * C64::new(s, 0.0);
        }
        a
    }

    pub fn rank(&self, tol: f64) -> usize {
        numerical_rank(&self.singular_values, tol)
    }
}

/// Count `σ_r ≥ tol·σ_0`; values at the threshold count.
pub fn numerical_rank(singular_values: &[f64], tol: f64) -> usize {
    let Some(&top) = singular_values.first() else {
        return 0;
    };
    singular_values.iter().filter(|&&s| s >= tol * top).count()
}

fn sorted_svd(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>, DMatrix<C64>) {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv = order.iter().map(|&r| svd.singular_values[r]).collect();
    let left = DMatrix::from_columns(&order.iter().map(|&r| u.column(r)).collect::<Vec<_>>());
    let right = DMatrix::from_columns(
        &order
            .iter()
            .map(|&r| v_t.row(r).transpose())
            .collect::<Vec<_>>(),
    );
    (sv, left, right)
}

pub fn schmidt_decompose(s: &TensorState) -> Result<SchmidtDecomposition> {
    if s.is_zero() {
        return Err(Error::ZeroState);
    }
    let (singular_values, left, right) = sorted_svd(s.amplitudes().clone());
    Ok(SchmidtDecomposition {
        singular_values,
        left,
        right,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "rank tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Schmidt coefficients only, descending.
pub fn schmidt_coefficients(s: &TensorState) -> Result<Vec<f64>> {
    if s.is_zero() {
        return Err(Error::ZeroState);
    }
    let mut sv: Vec<f64> = s
        .amplitudes()
        .clone()
        .singular_values()
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

pub fn schmidt_rank(s: &TensorState, tol: f64) -> Result<usize> {
    check_tol(tol)?;
    Ok(numerical_rank(&schmidt_coefficients(s)?, tol))
}

/// Singular values of the weighted value matrix with rows `√w_k·w(x_k)`.
pub fn value_span_singular_values(f: &FiberState) -> Result<Vec<f64>> {
    if f.is_zero() {
        return Err(Error::ZeroState);
    }
    let w = DVector::from_iterator(
        f.basis_v().num_points(),
        f.basis_v()
            .point_weights()
            .iter()
            .map(|&x| C64::new(x.sqrt(), 0.0)),
    );
    let m = DMatrix::from_diagonal(&w) * f.values();
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Dimension of the span of the fiber's values, at relative tolerance.
pub fn value_span_rank(f: &FiberState, tol: f64) -> Result<usize> {
    check_tol(tol)?;
    Ok(numerical_rank(&value_span_singular_values(f)?, tol))
}

/// Factors `(ψ, φ)` of a decomposable state, or `None` when the Schmidt rank
/// exceeds one.
///
/// The gauge `(λψ, φ/λ)` is fixed by making the largest-magnitude entry of
/// `φ` real and positive (first such entry on ties); `φ` has unit norm.
pub fn is_decomposable(s: &TensorState, tol: f64) -> Result<Option<(FactorVector, FactorVector)>> {
    check_tol(tol)?;
    let d = schmidt_decompose(s)?;
    if d.rank(tol) != 1 {
        return Ok(None);
    }
    let v = d.right.column(0);
    let mut imax = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[imax].norm() {
            imax = i;
        }
    }
    let phase = v[imax] / v[imax].norm();
    let mut phi = v.map(|z| z / phase);
    phi[imax] = C64::new(v[imax].norm(), 0.0);
    let psi = d.left.column(0).map(|z| z * phase * d.singular_values[0]);
    Ok(Some((
        FactorVector::new(s.basis_v(), psi)?,
        FactorVector::new(s.basis_w(), phi)?,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{isomorphism::to_fiber, state::random_state_with_spectrum, HermiteBasis, RANK_TOL};

    fn basis() -> HermiteBasis {
        HermiteBasis::new(1, 6, 12).unwrap()
    }

    fn bell(b: &HermiteBasis) -> TensorState {
        let u = |i| FactorVector::unit(b, i).unwrap();
        let h = C64::new(0.5f64.sqrt(), 0.0);
        TensorState::superpose(
            h,
            &TensorState::product(&u(0), &u(0)),
            h,
            &TensorState::product(&u(1), &u(1)),
        )
        .unwrap()
    }

    #[test]
    fn product_and_bell_spectra() {
        let b = basis();
        let mut rng = rand::rng();
        let s = TensorState::product(
            &FactorVector::random(&b, &mut rng),
            &FactorVector::random(&b, &mut rng),
        );
        let d = schmidt_decompose(&s).unwrap();
        assert!((d.singular_values[0] - 1.0).abs() < 1e-12);
        assert!(d.singular_values[1..].iter().all(|&x| x < 1e-12));
        assert_eq!(schmidt_rank(&s, RANK_TOL).unwrap(), 1);

        let d = schmidt_decompose(&bell(&b)).unwrap();
        let h = 0.5f64.sqrt();
        assert!(
            (d.singular_values[0] - h).abs() < 1e-14 && (d.singular_values[1] - h).abs() < 1e-14
        );
        assert_eq!(schmidt_rank(&bell(&b), RANK_TOL).unwrap(), 2);
        assert_eq!(value_span_rank(&to_fiber(&bell(&b)), RANK_TOL).unwrap(), 2);
    }

    #[test]
    fn planted_spectrum_is_recovered() {
        let b = basis();
        let (s, planted) = random_state_with_spectrum(&b, &b, 17, 3).unwrap();
        let d = schmidt_decompose(&s).unwrap();
        for (got, want) in d.singular_values.iter().zip(&planted) {
            assert!((got - want).abs() < 1e-8);
        }
        assert!((d.reconstruct() - s.amplitudes()).camax() < 1e-10);
        let total: f64 = d.singular_values.iter().map(|x| x * x).sum();
        assert!((total - s.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn zero_state_rejected() {
        let b = basis();
        let z = TensorState::zero(&b, &b);
        assert!(matches!(schmidt_decompose(&z), Err(Error::ZeroState)));
        assert!(matches!(schmidt_rank(&z, 1e-8), Err(Error::ZeroState)));
        assert!(matches!(
            value_span_rank(&to_fiber(&z), 1e-8),
            Err(Error::ZeroState)
        ));
        assert!(matches!(is_decomposable(&z, 1e-8), Err(Error::ZeroState)));
        let s = bell(&b);
        assert!(matches!(
            schmidt_rank(&s, 0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn threshold_ties_count() {
        assert_eq!(numerical_rank(&[1.0, 1e-8, 0.5e-8], 1e-8), 2);
    }

    #[test]
    fn witness_reconstructs_and_is_gauge_fixed() {
        let b = basis();
        let mut rng = rand::rng();
        let psi = FactorVector::random(&b, &mut rng).scale(C64::new(0.0, 2.0));
        let phi = FactorVector::random(&b, &mut rng);
        let s = TensorState::product(&psi, &phi);
        let (wpsi, wphi) = is_decomposable(&s, RANK_TOL)
            .unwrap()
            .expect("decomposable");
        let diff = TensorState::product(&wpsi, &wphi).max_abs_diff(&s).unwrap();
        assert!(diff < 1e-12);
        let top = wphi
            .coefficients()
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        assert!(top.im == 0.0 && top.re > 0.0);
        // recovered factors agree with the inputs up to a reciprocal phase pair
        let lambda = wphi.inner(&phi).unwrap();
        assert!((lambda.norm() - 1.0).abs() < 1e-12);
        assert!((wphi.scale(lambda).coefficients() - phi.coefficients()).camax() < 1e-12);

        assert!(is_decomposable(&bell(&b), RANK_TOL).unwrap().is_none());
    }

    #[test]
    fn perturbed_product_is_still_decomposable() {
        let b = basis();
        let mut rng = rand::rng();
        let s = TensorState::product(
            &FactorVector::random(&b, &mut rng),
            &FactorVector::random(&b, &mut rng),
        );
        let noise = TensorState::random(&b, &b, 3, None).unwrap();
        let p =
            TensorState::superpose(C64::new(1.0, 0.0), &s, C64::new(1e-12, 0.0), &noise).unwrap();
        assert!(is_decomposable(&p, RANK_TOL).unwrap().is_some());
    }
}
