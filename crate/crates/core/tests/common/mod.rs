#![allow(dead_code)]

use fiberqm::{HermiteBasis, TensorState, C64};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn desk_basis() -> HermiteBasis {
    HermiteBasis::new(1, 8, 16).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Row-major vectorization, index `m * N_W + i`.
pub fn vec_state(s: &TensorState) -> DVector<C64> {
    let a = s.amplitudes();
    DVector::from_fn(a.nrows() * a.ncols(), |k, _| {
        a[(k / a.ncols(), k % a.ncols())]
    })
}

/// Explicit Kronecker product, independent of the library.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// `⟨v, M v⟩ / ⟨v, v⟩` on the vectorized state.
pub fn quadratic_form(m: &DMatrix<C64>, s: &TensorState) -> C64 {
    let v = vec_state(s);
    v.dotc(&(m * &v)) / v.norm_squared()
}

pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.qr().q()
}

pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
