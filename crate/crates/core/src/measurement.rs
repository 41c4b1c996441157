//! Projective measurement of one-factor observables.
//!
//! Outcome probabilities follow the Born rule on the (possibly unnormalized)
//! input, `p = ‖(I ⊗ P)s‖² / ‖s‖²`, and each outcome carries the reduced
//! state `(I ⊗ P)s / ‖(I ⊗ P)s‖`. When `P` has rank one the reduced state is
//! decomposable; degenerate eigenspaces need not collapse entanglement.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::observables::hermitian_deviation;
use crate::state::same_basis;
use crate::{Error, Factor, Observable, Result, TensorState, C64};

/// Eigenvalues closer than this fraction of the spectral diameter share a
/// projector.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Outcomes below this probability are dropped.
pub const MIN_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub eigenvalue: f64,
    pub projector: DMatrix<C64>,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub eigenvalue: f64,
    pub probability: f64,
    pub post_state: TensorState,
}

/// Counts per eigenvalue, ascending by eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bins: Vec<(f64, u64)>,
}

impl Histogram {
    pub fn count(&self, eigenvalue: f64) -> u64 {
        self.bins
            .iter()
            .find(|(e, _)| *e == eigenvalue)
            .map_or(0, |(_, c)| *c)
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().map(|(_, c)| c).sum()
    }
}

/// Eigenspaces of a Hermitian observable, ascending by eigenvalue.
pub fn spectral_decompose(q: &Observable, degeneracy_tol: f64) -> Vec<Eigenspace> {
    spectral_decompose_matrix(q.matrix(), degeneracy_tol).expect("observables are Hermitian")
}

/// As [`spectral_decompose`], for a raw matrix that may fail the
/// Hermiticity check.
pub fn spectral_decompose_matrix(m: &DMatrix<C64>, degeneracy_tol: f64) -> Result<Vec<Eigenspace>> {
    let dev = hermitian_deviation(m);
    if dev > crate::observables::HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lo = eig.eigenvalues[order[0]];
    let hi = eig.eigenvalues[order[n - 1]];
    let threshold = degeneracy_tol * (hi - lo);

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match clusters.last_mut() {
            Some(c) if eig.eigenvalues[k] - eig.eigenvalues[*c.last().unwrap()] <= threshold => {
                c.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }
    Ok(clusters
        .into_iter()
        .map(|c| {
            let mut p = DMatrix::zeros(n, n);
            for &k in &c {
                let v = eig.eigenvectors.column(k);
                p += v * v.adjoint();
            }
            Eigenspace {
                eigenvalue: c.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / c.len() as f64,
                projector: p,
                dim: c.len(),
            }
        })
        .collect())
}

pub fn measure(
    q: &Observable,
    s: &TensorState,
    factor: Factor,
    degeneracy_tol: f64,
) -> Result<Vec<MeasurementOutcome>> {
    let basis = match factor {
        Factor::First => s.basis_v(),
        Factor::Second => s.basis_w(),
    };
    same_basis(q.basis(), basis, "observable and state")?;
    let n2 = s.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::ZeroState);
    }
    let mut outcomes = Vec::new();
    for space in spectral_decompose(q, degeneracy_tol) {
        let projected = match factor {
            Factor::First => &space.projector * s.amplitudes(),
            Factor::Second => s.amplitudes() * space.projector.transpose(),
        };
        let p2 = projected.norm_squared();
        let probability = p2 / n2;
        if probability < MIN_PROBABILITY {
            continue;
        }
        let post = s.with_amplitudes(projected / C64::new(p2.sqrt(), 0.0));
        outcomes.push(MeasurementOutcome {
            eigenvalue: space.eigenvalue,
            probability,
            post_state: post,
        });
    }
    Ok(outcomes)
}

/// Measure `I ⊗ Q`.
pub fn measure_second(q: &Observable, s: &TensorState) -> Result<Vec<MeasurementOutcome>> {
    measure(q, s, Factor::Second, DEFAULT_DEGENERACY_TOL)
}

/// Measure `Q ⊗ I`.
pub fn measure_first(q: &Observable, s: &TensorState) -> Result<Vec<MeasurementOutcome>> {
    measure(q, s, Factor::First, DEFAULT_DEGENERACY_TOL)
}

/// Repeated independent shots of `I ⊗ Q`, seeded.
pub fn sample_measurement(
    q: &Observable,
    s: &TensorState,
    seed: u64,
    n_shots: u64,
) -> Result<Histogram> {
    sample_measurement_with(q, s, Factor::Second, seed, n_shots)
}

pub fn sample_measurement_with(
    q: &Observable,
    s: &TensorState,
    factor: Factor,
    seed: u64,
    n_shots: u64,
) -> Result<Histogram> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
    }
    let outcomes = measure(q, s, factor, DEFAULT_DEGENERACY_TOL)?;
    let mut cumulative = Vec::with_capacity(outcomes.len());
    let mut acc = 0.0;
    for o in &outcomes {
        acc += o.probability;
        cumulative.push(acc);
    }
    let mut counts = vec![0u64; outcomes.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_shots {
        let u = rng.random::<f64>() * acc;
        let k = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(outcomes.len() - 1);
        counts[k] += 1;
    }
    Ok(Histogram {
        bins: outcomes.iter().map(|o| o.eigenvalue).zip(counts).collect(),
    })
}
