//! Pointer classes of the second factor and their classical reduction.
//!
//! The basis of `W` is partitioned into classes Ω of macroscopically
//! indistinguishable states. A vector of `W` reduces to a positive atomic
//! measure on Ω with weight `Σ_{i∈ω} |v_i|²` on class `ω`; a fiber reduces
//! to one such measure per grid node. Macroscopic observables are the
//! diagonal matrices constant on each class. For those, the expectation only
//! sees the class-diagonal blocks of the Gram matrix, so interference
//! between classes drops out exactly.
//!
//! Given an entangled state `α ψ⊗φ + β ψ'⊗φ'` whose second factors are
//! orthogonal inside every class, the decomposable state `ψ ⊗ (αφ + βφ')`
//! has the same class weights and hence the same expectation for every
//! macroscopic observable, even though its Schmidt rank is one.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::observables::reduced_gram;
use crate::state::{random_gaussian, same_basis};
use crate::{
    expectation_lifted, isomorphism::to_fiber, schmidt_rank, Error, FactorVector, HermiteBasis,
    Observable, Result, TensorState, C64, EQ_TOL, RANK_TOL,
};

/// Label given to indices left out of a textual class list.
pub const REST_LABEL: &str = "rest";

/// Disjoint, exhaustive classes of `W`-basis indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerPartition {
    basis: HermiteBasis,
    classes: Vec<Vec<usize>>,
    labels: Vec<String>,
    class_of: Vec<usize>,
}

impl PointerPartition {
    pub fn new(
        basis: &HermiteBasis,
        classes: Vec<Vec<usize>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = basis.size();
        if classes.is_empty() {
            return Err(Error::InvalidPartition(
                "at least one class is required".into(),
            ));
        }
        if labels.len() != classes.len() {
            return Err(Error::InvalidPartition(format!(
                "{} labels for {} classes",
                labels.len(),
                classes.len()
            )));
        }
        let mut class_of = vec![usize::MAX; n];
        for (c, members) in classes.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidPartition(format!("class {c} is empty")));
            }
            for &i in members {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} outside basis of size {n}"
                    )));
                }
                if class_of[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} appears in two classes"
                    )));
                }
                class_of[i] = c;
            }
        }
        if let Some(i) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "index {i} is not in any class"
            )));
        }
        Ok(Self {
            basis: basis.clone(),
            classes,
            labels,
            class_of,
        })
    }

    /// Classes labelled by their member lists.
    pub fn from_classes(basis: &HermiteBasis, classes: Vec<Vec<usize>>) -> Result<Self> {
        let labels = classes.iter().map(|c| join(c)).collect();
        Self::new(basis, classes, labels)
    }

    /// Parse `"0,1|2,3"`. Indices not listed form one extra class labelled
    /// [`REST_LABEL`].
    pub fn parse(basis: &HermiteBasis, text: &str) -> Result<Self> {
        let mut classes = Vec::new();
        for part in text.split('|') {
            let members = part
                .split(',')
                .map(|t| {
                    t.trim().parse::<usize>().map_err(|_| {
                        Error::InvalidPartition(format!("bad index {t:?} in {text:?}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            classes.push(members);
        }
        let mut labels: Vec<String> = classes.iter().map(|c| join(c)).collect();
        let listed: Vec<bool> = {
            let mut seen = vec![false; basis.size()];
            for &i in classes.iter().flatten() {
                if i < seen.len() {
                    seen[i] = true;
                }
            }
            seen
        };
        let rest: Vec<usize> = (0..basis.size()).filter(|&i| !listed[i]).collect();
        if !rest.is_empty() {
            classes.push(rest);
            labels.push(REST_LABEL.to_string());
        }
        Self::new(basis, classes, labels)
    }

    /// The trivial partition: everything is indistinguishable.
    pub fn single_class(basis: &HermiteBasis) -> Self {
        Self::from_classes(basis, vec![(0..basis.size()).collect()]).expect("valid")
    }

    /// The finest partition: every basis state is its own class.
    pub fn singletons(basis: &HermiteBasis) -> Self {
        Self::from_classes(basis, (0..basis.size()).map(|i| vec![i]).collect()).expect("valid")
    }

    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }
}

fn join(c: &[usize]) -> String {
    c.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Positive atomic measure on the classes of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalMeasure {
    partition: Arc<PointerPartition>,
    weights: Vec<f64>,
}

impl ClassicalMeasure {
    pub fn new(partition: Arc<PointerPartition>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != partition.len() {
            return Err(Error::LengthMismatch {
                expected: partition.len(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "measure weight {w} is not a finite nonnegative number"
            )));
        }
        Ok(Self { partition, weights })
    }

    /// Unit mass on class `omega`.
    pub fn indicator(partition: Arc<PointerPartition>, omega: usize) -> Result<Self> {
        if omega >= partition.len() {
            return Err(Error::IndexOutOfRange {
                index: omega,
                len: partition.len(),
            });
        }
        let mut w = vec![0.0; partition.len()];
        w[omega] = 1.0;
        Ok(Self {
            partition,
            weights: w,
        })
    }

    pub fn partition(&self) -> &PointerPartition {
        &self.partition
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ_ω q_ω µ(ω)`, unnormalized.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, q)| w * q).sum()
    }
}

/// Real value per class; acts on `W` as the class-constant diagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroObservable {
    partition: Arc<PointerPartition>,
    class_values: Vec<f64>,
}

impl MacroObservable {
    pub fn new(partition: &PointerPartition, class_values: Vec<f64>) -> Result<Self> {
        if class_values.len() != partition.len() {
            return Err(Error::LengthMismatch {
                expected: partition.len(),
                got: class_values.len(),
            });
        }
        Ok(Self {
            partition: Arc::new(partition.clone()),
            class_values,
        })
    }

    /// Class values uniform in `[-1, 1]`.
    pub fn random<R: Rng>(partition: &PointerPartition, rng: &mut R) -> Self {
        let class_values = (0..partition.len())
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        Self {
            partition: Arc::new(partition.clone()),
            class_values,
        }
    }

    pub fn class_values(&self) -> &[f64] {
        &self.class_values
    }

    pub fn partition(&self) -> &PointerPartition {
        &self.partition
    }

    /// The induced diagonal matrix on `W`.
    pub fn to_observable(&self) -> Observable {
        let p = &self.partition;
        let diag: Vec<f64> = (0..p.basis.size())
            .map(|i| self.class_values[p.class_of(i)])
            .collect();
        Observable::diagonal(&p.basis, &diag).expect("diagonal matrices are Hermitian")
    }
}

/// One classical measure per grid node of the first factor.
#[derive(Debug, Clone)]
pub struct ClassicalFiberState {
    basis_v: HermiteBasis,
    partition: Arc<PointerPartition>,
    node_measures: Vec<ClassicalMeasure>,
}

impl ClassicalFiberState {
    pub fn basis_v(&self) -> &HermiteBasis {
        &self.basis_v
    }

    pub fn partition(&self) -> &PointerPartition {
        &self.partition
    }

    pub fn node_measures(&self) -> &[ClassicalMeasure] {
        &self.node_measures
    }

    /// `Σ_k w_k µ_k`, the class weights of the whole state.
    pub fn integrated(&self) -> ClassicalMeasure {
        let mut total = vec![0.0; self.partition.len()];
        for (mu, &w) in self.node_measures.iter().zip(self.basis_v.point_weights()) {
            for (t, m) in total.iter_mut().zip(&mu.weights) {
                *t += w * m;
            }
        }
        ClassicalMeasure {
            partition: self.partition.clone(),
            weights: total,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.integrated().mass()
    }
}

fn class_weights<'a>(p: &PointerPartition, v: impl Iterator<Item = &'a C64>) -> Vec<f64> {
    let mut w = vec![0.0; p.len()];
    for (i, z) in v.enumerate() {
        w[p.class_of(i)] += z.norm_sqr();
    }
    w
}

/// `µ(ω) = Σ_{i∈ω} |v_i|²`.
pub fn coarse_grain_vector(v: &FactorVector, p: &PointerPartition) -> Result<ClassicalMeasure> {
    same_basis(v.basis(), &p.basis, "vector and partition")?;
    Ok(ClassicalMeasure {
        partition: Arc::new(p.clone()),
        weights: class_weights(p, v.coefficients().iter()),
    })
}

/// Coarse-grain each fiber value `w(x_k)`.
pub fn coarse_grain_state(s: &TensorState, p: &PointerPartition) -> Result<ClassicalFiberState> {
    same_basis(s.basis_w(), &p.basis, "state and partition")?;
    let partition = Arc::new(p.clone());
    let f = to_fiber(s);
    let node_measures = f
        .values()
        .row_iter()
        .map(|row| ClassicalMeasure {
            partition: partition.clone(),
            weights: class_weights(p, row.iter()),
        })
        .collect();
    Ok(ClassicalFiberState {
        basis_v: s.basis_v().clone(),
        partition,
        node_measures,
    })
}

/// `Σ_ω q_ω µ(ω) / ‖s‖²` from the coarse-grained state.
pub fn macro_expectation(m: &MacroObservable, s: &TensorState) -> Result<f64> {
    let n2 = s.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::ZeroState);
    }
    let mu = coarse_grain_state(s, &m.partition)?.integrated();
    Ok(mu.integrate(&m.class_values) / n2)
}

/// The Gram matrix `⟨c_i, c_j⟩` with every entry between different classes
/// set to zero.
pub fn class_block_gram(s: &TensorState, p: &PointerPartition) -> Result<DMatrix<C64>> {
    same_basis(s.basis_w(), &p.basis, "state and partition")?;
    let mut g = reduced_gram(s);
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            if p.class_of(i) != p.class_of(j) {
                g[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }
    Ok(g)
}

/// Two branches `α ψ⊗φ + β ψ'⊗φ'` with unit factors and `φ ⟂ φ'`.
#[derive(Debug, Clone)]
pub struct Branches {
    pub alpha: C64,
    pub psi: FactorVector,
    pub phi: FactorVector,
    pub beta: C64,
    pub psi_prime: FactorVector,
    pub phi_prime: FactorVector,
}

impl Branches {
    pub fn new(
        alpha: C64,
        psi: FactorVector,
        phi: FactorVector,
        beta: C64,
        psi_prime: FactorVector,
        phi_prime: FactorVector,
    ) -> Result<Self> {
        same_basis(psi.basis(), psi_prime.basis(), "first-factor branches")?;
        same_basis(phi.basis(), phi_prime.basis(), "second-factor branches")?;
        for (name, v) in [
            ("psi", &psi),
            ("phi", &phi),
            ("psi'", &psi_prime),
            ("phi'", &phi_prime),
        ] {
            if (v.norm() - 1.0).abs() > EQ_TOL {
                return Err(Error::InvalidBranches(format!(
                    "{name} is not a unit vector (norm {})",
                    v.norm()
                )));
            }
        }
        let overlap = phi.inner(&phi_prime)?.norm();
        if overlap > EQ_TOL {
            return Err(Error::InvalidBranches(format!(
                "second factors are not orthogonal (|<phi, phi'>| = {overlap:e})"
            )));
        }
        if alpha.norm() == 0.0 && beta.norm() == 0.0 {
            return Err(Error::InvalidBranches("both amplitudes are zero".into()));
        }
        Ok(Self {
            alpha,
            psi,
            phi,
            beta,
            psi_prime,
            phi_prime,
        })
    }

    /// Random branches with `|α|² = alpha2`, `|β|² = 1 - alpha2`.
    ///
    /// `φ` and `φ'` are random unit vectors supported on two different
    /// classes; with a single class, or with probability 1/4 when the drawn
    /// class has room, both live in the same class and are orthogonalized
    /// against each other there.
    pub fn random(
        basis_v: &HermiteBasis,
        partition: &PointerPartition,
        alpha2: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha2) {
            return Err(Error::InvalidArgument(format!(
                "|alpha|^2 must lie in [0, 1], got {alpha2}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bw = partition.basis();
        let a = rng.random_range(0..partition.len());
        let roomy = partition.classes[a].len() >= 2;
        let merged = roomy && (partition.len() == 1 || rng.random_bool(0.25));

        let (phi, phi_prime) = if merged {
            let support = &partition.classes[a];
            let q = crate::state::random_isometry(support.len(), 2, &mut rng);
            (
                embed(bw, support, q.column(0).into_owned()),
                embed(bw, support, q.column(1).into_owned()),
            )
        } else {
            if partition.len() == 1 {
                return Err(Error::InvalidPartition(
                    "a single one-element class cannot hold two orthogonal branches".into(),
                ));
            }
            let mut b = rng.random_range(0..partition.len() - 1);
            if b >= a {
                b += 1;
            }
            let v = |rng: &mut ChaCha8Rng, c: usize| {
                let support = &partition.classes[c];
                let g = random_gaussian(support.len(), 1, rng).column(0).normalize();
                embed(bw, support, g)
            };
            (v(&mut rng, a), v(&mut rng, b))
        };
        let psi = FactorVector::random(basis_v, &mut rng);
        let psi_prime = FactorVector::random(basis_v, &mut rng);
        let alpha = C64::from_polar(alpha2.sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
        let beta = C64::from_polar(
            (1.0 - alpha2).sqrt(),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        Self::new(alpha, psi, phi, beta, psi_prime, phi_prime)
    }

    /// `α ψ⊗φ + β ψ'⊗φ'`.
    pub fn entangled(&self) -> TensorState {
        TensorState::superpose(
            self.alpha,
            &TensorState::product(&self.psi, &self.phi),
            self.beta,
            &TensorState::product(&self.psi_prime, &self.phi_prime),
        )
        .expect("branch bases checked at construction")
    }

    /// Whether `φ` and `φ'` are orthogonal inside every class, which is
    /// what makes the surrogate exact for every macroscopic observable.
    pub fn separated_by(&self, p: &PointerPartition) -> bool {
        let mut overlap = vec![C64::new(0.0, 0.0); p.len()];
        for (i, (a, b)) in self
            .phi
            .coefficients()
            .iter()
            .zip(self.phi_prime.coefficients().iter())
            .enumerate()
        {
            overlap[p.class_of(i)] += a.conj() * b;
        }
        overlap.iter().all(|z| z.norm() <= EQ_TOL)
    }
}

fn embed(basis: &HermiteBasis, support: &[usize], v: DVector<C64>) -> FactorVector {
    let mut c = DVector::zeros(basis.size());
    for (&i, z) in support.iter().zip(v.iter()) {
        c[i] = *z;
    }
    FactorVector::new(basis, c).expect("size matches basis")
}

/// The decomposable state `ψ ⊗ (αφ + βφ')` matching the entangled state's
/// class weights.
pub fn surrogate_decomposable(b: &Branches, p: &PointerPartition) -> Result<TensorState> {
    same_basis(b.phi.basis(), &p.basis, "branches and partition")?;
    let second = FactorVector::new(
        b.phi.basis(),
        b.phi.coefficients() * b.alpha + b.phi_prime.coefficients() * b.beta,
    )?;
    Ok(TensorState::product(&b.psi, &second))
}

/// A microscopic observable that tells the entangled state from its
/// surrogate: `Δ = conj(G_ent − G_sur)` scaled to unit spectral norm, whose
/// expectation gap is `‖Δ‖_F² / ‖Δ‖_2`. `None` when the Gram matrices
/// coincide.
pub fn distinguishing_observable(b: &Branches, p: &PointerPartition) -> Result<Option<Observable>> {
    let ent = b.entangled();
    let sur = surrogate_decomposable(b, p)?;
    let delta = (reduced_gram(&ent) - reduced_gram(&sur)).map(|z| z.conj());
    let delta = (&delta + delta.adjoint()) * C64::new(0.5, 0.0);
    let spectral = delta
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, e| m.max(e.abs()));
    if spectral <= EQ_TOL {
        return Ok(None);
    }
    Observable::new(p.basis(), delta / C64::new(spectral, 0.0)).map(Some)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub class_values: Vec<f64>,
    pub e_entangled: f64,
    pub e_surrogate: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndistinguishabilityReport {
    pub max_deviation: f64,
    pub rank_entangled: usize,
    pub rank_surrogate: usize,
    pub positive_control_gap: f64,
    pub trials: Vec<TrialRecord>,
}

/// Compare the entangled state and its surrogate over `trials` random
/// macroscopic observables, plus one microscopic positive control.
pub fn indistinguishability_report(
    b: &Branches,
    p: &PointerPartition,
    trials: usize,
    seed: u64,
) -> Result<IndistinguishabilityReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let ent = b.entangled();
    let sur = surrogate_decomposable(b, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let observables: Vec<MacroObservable> = (0..trials)
        .map(|_| MacroObservable::random(p, &mut rng))
        .collect();

    let records = observables
        .iter()
        .enumerate()
        .map(|(trial, m)| {
            let e_entangled = macro_expectation(m, &ent)?;
            let e_surrogate = macro_expectation(m, &sur)?;
            Ok(TrialRecord {
                trial,
                class_values: m.class_values.clone(),
                e_entangled,
                e_surrogate,
                deviation: (e_entangled - e_surrogate).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let positive_control_gap = match distinguishing_observable(b, p)? {
        Some(q) => (expectation_lifted(&q, &ent)? - expectation_lifted(&q, &sur)?).abs(),
        None => 0.0,
    };

    Ok(IndistinguishabilityReport {
        max_deviation: records.iter().map(|r| r.deviation).fold(0.0, f64::max),
        rank_entangled: schmidt_rank(&ent, RANK_TOL)?,
        rank_surrogate: schmidt_rank(&sur, RANK_TOL)?,
        positive_control_gap,
        trials: records,
    })
}
