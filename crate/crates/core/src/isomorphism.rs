//! The isometry between `V ⊗ W` and `W`-valued square-integrable functions.
//!
//! Forward: `w(x) = Σ_m A[m][·] h_m(x)`, so a product `ψ ⊗ φ` maps to
//! `ψ(x)·φ`. Inverse: the Hermite coefficients of each component function
//! `c_i(x) = w(x)[i]`, obtained by quadrature. Both directions are dense
//! products against the grid tables of the first factor's basis.

use crate::state::same_basis;
use crate::{Error, FactorVector, FiberState, Result, TensorState};

/// Sample the state as a `W`-valued function on the first factor's grid.
pub fn to_fiber(s: &TensorState) -> FiberState {
    let values = s.basis_v().sample_matrix() * s.amplitudes();
    FiberState::new(s.basis_v(), s.basis_w(), values).expect("shape follows from bases")
}

/// Recover amplitudes by projecting every component function onto the
/// first factor's basis. Content outside the truncated span is dropped; see
/// [`truncation_residual`].
pub fn from_fiber(f: &FiberState) -> TensorState {
    let amplitudes = f.basis_v().analysis_matrix() * f.values();
    TensorState::new(f.basis_v(), f.basis_w(), amplitudes).expect("shape follows from bases")
}

/// Component function `c_i` as a coefficient vector of the first factor.
pub fn component_function(f: &FiberState, i: usize) -> Result<FactorVector> {
    let n = f.basis_w().size();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let c = f.basis_v().analysis_matrix() * f.values().column(i);
    FactorVector::new(f.basis_v(), c)
}

/// Quadrature norm of the part of `f` lost by [`from_fiber`].
pub fn truncation_residual(f: &FiberState) -> f64 {
    let back = to_fiber(&from_fiber(f));
    f.with_values(f.values() - back.values()).norm()
}

/// The mirror picture: the state as a `V`-valued function on the second
/// factor's grid.
pub fn to_fiber_swapped(s: &TensorState) -> FiberState {
    to_fiber(&s.swap_factors())
}

/// Inverse of [`to_fiber_swapped`].
pub fn from_fiber_swapped(f: &FiberState) -> TensorState {
    from_fiber(f).swap_factors()
}

/// `Σ_i ⟨c_i, c'_i⟩` from projected component functions.
pub fn component_inner(f1: &FiberState, f2: &FiberState) -> Result<crate::C64> {
    same_basis(f1.basis_v(), f2.basis_v(), "fiber grids")?;
    same_basis(f1.basis_w(), f2.basis_w(), "fiber value spaces")?;
    (0..f1.basis_w().size())
        .map(|i| component_function(f1, i)?.inner(&component_function(f2, i)?))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{HermiteBasis, C64};
    use nalgebra::DMatrix;

    fn basis() -> HermiteBasis {
        HermiteBasis::new(1, 8, 16).unwrap()
    }

    #[test]
    fn product_with_ground_state() {
        let b = basis();
        let phi = FactorVector::random(&b, &mut rand::rng());
        let s = TensorState::product(&FactorVector::unit(&b, 0).unwrap(), &phi);
        let f = to_fiber(&s);
        for k in 0..b.num_points() {
            let h0 = crate::eval_hermite_function(0, b.nodes()[k]);
            for i in 0..b.size() {
                assert!((f.values()[(k, i)] - phi.coefficients()[i] * h0).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let b = basis();
        let z = TensorState::zero(&b, &b);
        assert!(to_fiber(&z).is_zero());
        assert!(from_fiber(&to_fiber(&z)).is_zero());
    }

    #[test]
    fn constant_fiber_projects_the_constant_function() {
        let b = basis();
        let v: Vec<C64> = (0..8).map(|i| C64::new(i as f64 - 3.0, 0.5)).collect();
        let values = DMatrix::from_fn(b.num_points(), 8, |_, i| v[i]);
        let f = FiberState::new(&b, &b, values).unwrap();
        let s = from_fiber(&f);
        // oracle: the Hermite projection of f(x) = 1 on the same grid
        let ones = vec![1.0; b.num_points()];
        let proj = b.project_function(&ones).unwrap();
        for (m, pm) in proj.iter().enumerate() {
            for (i, vi) in v.iter().enumerate() {
                let expected = vi * pm;
                assert!((s.amplitudes()[(m, i)] - expected).norm() < 1e-12);
            }
        }
        // a constant is not in the truncated span, so something is lost
        assert!(truncation_residual(&f) > 1e-3);
    }

    #[test]
    fn component_functions_of_product() {
        let b = basis();
        let psi = FactorVector::random(&b, &mut rand::rng());
        let s = TensorState::product(&psi, &FactorVector::unit(&b, 3).unwrap());
        let f = to_fiber(&s);
        for i in 0..8 {
            let c = component_function(&f, i).unwrap();
            if i == 3 {
                assert!((c.coefficients() - psi.coefficients()).camax() < 1e-12);
            } else {
                assert!(c.norm() < 1e-12);
            }
        }
        assert!(matches!(
            component_function(&f, 8),
            Err(Error::IndexOutOfRange { index: 8, len: 8 })
        ));
    }

    #[test]
    fn swapped_round_trip() {
        let bv = HermiteBasis::new(1, 5, 10).unwrap();
        let bw = basis();
        let s = TensorState::random(&bv, &bw, 11, None).unwrap();
        let f = to_fiber_swapped(&s);
        assert_eq!(f.basis_v(), &bw);
        let back = from_fiber_swapped(&f);
        assert!(back.max_abs_diff(&s).unwrap() < 1e-12);
    }
}
