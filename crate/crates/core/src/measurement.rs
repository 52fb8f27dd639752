//! Photodetection on one mode of a two-mode state.
//!
//! An inefficient detector is treated through the true photon number `k` in
//! the watched mode, which is a classical latent variable once the mode is
//! absorbed. Conditioning on a count outcome therefore yields an exact
//! mixture of pure states, one per `k`, represented as a [`BranchEnsemble`].

use crate::error::{Error, Result};
use crate::fock::{fidelity, PureState, TwoModeState};
use crate::operators::check_probability;
use crate::real::{ln_factorials, Real};

/// Which mode of a [`TwoModeState`] a detector observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    First,
    Second,
}

impl Mode {
    pub fn other(self) -> Self {
        match self {
            Mode::First => Mode::Second,
            Mode::Second => Mode::First,
        }
    }
}

/// Photodetector that registers each incident photon with probability `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel<T> {
    eta: T,
}

impl<T: Real> DetectorModel<T> {
    pub fn new(eta: T) -> Result<Self> {
        check_probability("eta", eta)?;
        Ok(Self { eta })
    }

    pub fn perfect() -> Self {
        Self { eta: T::one() }
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    /// Probability of registering exactly `counts` clicks from `photons`
    /// incident photons: `C(photons, counts) ηᶜ (1−η)^{photons−counts}`.
    pub fn count_probability(&self, photons: usize, counts: usize) -> T {
        self.count_probability_with(&ln_factorials(photons), photons, counts)
    }

    fn count_probability_with(&self, ln_fact: &[T], photons: usize, counts: usize) -> T {
        if counts > photons {
            return T::zero();
        }
        let binom = (ln_fact[photons] - ln_fact[counts] - ln_fact[photons - counts]).exp();
        let miss = T::one() - self.eta;
        binom * self.eta.powi(counts as i32) * miss.powi((photons - counts) as i32)
    }
}

/// A heralded outcome: its probability and, unless the event is impossible,
/// the conditional state of the unobserved mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditional<T, S> {
    pub probability: T,
    pub state: Option<S>,
}

impl<T: Real, S> Conditional<T, S> {
    pub fn impossible() -> Self {
        Self {
            probability: T::zero(),
            state: None,
        }
    }

    pub fn is_impossible(&self) -> bool {
        self.state.is_none()
    }

    /// The conditional state, or [`Error::ImpossibleEvent`].
    pub fn into_state(self) -> Result<S> {
        self.state.ok_or(Error::ImpossibleEvent)
    }
}

/// One pure component of a mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T> {
    pub weight: T,
    pub state: PureState<T>,
}

/// Weighted mixture of unit-norm pure states with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchEnsemble<T> {
    branches: Vec<Branch<T>>,
}

impl<T: Real> BranchEnsemble<T> {
    /// Normalizes the weights and states of the given branches. Branches of
    /// zero weight are dropped.
    pub fn new(branches: impl IntoIterator<Item = (T, PureState<T>)>) -> Result<Self> {
        let mut kept = Vec::new();
        for (weight, state) in branches {
            if !(weight >= T::zero() && weight.is_finite()) {
                return Err(Error::OutOfDomain {
                    name: "branch weight",
                    value: weight.as_f64(),
                    domain: "[0, ∞)",
                });
            }
            if weight > T::zero() {
                kept.push(Branch {
                    weight,
                    state: state.normalized()?,
                });
            }
        }
        let total: T = kept.iter().map(|b| b.weight).sum();
        if kept.is_empty() || total <= T::zero() {
            return Err(Error::EmptyEnsemble);
        }
        for b in &mut kept {
            b.weight /= total;
        }
        Ok(Self { branches: kept })
    }

    /// Ensemble holding a single pure state.
    pub fn pure(state: PureState<T>) -> Result<Self> {
        Self::new([(T::one(), state)])
    }

    pub fn branches(&self) -> &[Branch<T>] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Photon-number distribution of the mixture.
    pub fn photon_distribution(&self) -> Vec<T> {
        let len = self
            .branches
            .iter()
            .map(|b| b.state.cutoff() + 1)
            .max()
            .unwrap_or(0);
        let mut out = vec![T::zero(); len];
        for b in &self.branches {
            for (n, a) in b.state.amplitudes().iter().enumerate() {
                out[n] += b.weight * a.norm_sqr();
            }
        }
        out
    }
}

fn total_norm<T: Real>(s: &TwoModeState<T>) -> Result<T> {
    let norm = s.norm_sqr();
    if norm <= T::zero() {
        Err(Error::ZeroNorm)
    } else {
        Ok(norm)
    }
}

/// Unnormalized state of the unwatched mode given `m` photons in `watched`.
fn slice<T: Real>(s: &TwoModeState<T>, watched: Mode, m: usize) -> PureState<T> {
    let (c1, c2) = s.cutoffs();
    let amps = match watched {
        Mode::First => (0..=c2).map(|k| s.amplitude(m, k)).collect(),
        Mode::Second => (0..=c1).map(|j| s.amplitude(j, m)).collect(),
    };
    PureState::from_raw(amps)
}

fn watched_cutoff<T: Real>(s: &TwoModeState<T>, watched: Mode) -> usize {
    match watched {
        Mode::First => s.cutoffs().0,
        Mode::Second => s.cutoffs().1,
    }
}

/// Photon-number distribution of the watched mode.
pub fn watched_distribution<T: Real>(s: &TwoModeState<T>, watched: Mode) -> Result<Vec<T>> {
    let norm = total_norm(s)?;
    Ok((0..=watched_cutoff(s, watched))
        .map(|m| slice(s, watched, m).norm_sqr() / norm)
        .collect())
}

/// Projects `watched` onto exactly `m` photons (ideal number-resolving
/// detection).
pub fn project_counts<T: Real>(
    s: &TwoModeState<T>,
    watched: Mode,
    m: usize,
) -> Result<Conditional<T, PureState<T>>> {
    let norm = total_norm(s)?;
    if m > watched_cutoff(s, watched) {
        return Ok(Conditional::impossible());
    }
    let out = slice(s, watched, m);
    let weight = out.norm_sqr();
    if weight <= T::zero() {
        return Ok(Conditional::impossible());
    }
    Ok(Conditional {
        probability: weight / norm,
        state: Some(out.normalized()?),
    })
}

/// Conditions on the detector registering exactly `counts` clicks.
///
/// A watched-mode photon number `k` contributes with weight
/// `C(k, counts) ηᶜᵒᵘⁿᵗˢ (1−η)^{k−counts} pₖ`; each contributing `k` becomes one
/// branch of the returned ensemble.
pub fn condition_counts_inefficient<T: Real>(
    s: &TwoModeState<T>,
    watched: Mode,
    det: &DetectorModel<T>,
    counts: usize,
) -> Result<Conditional<T, BranchEnsemble<T>>> {
    let norm = total_norm(s)?;
    let mut branches = Vec::new();
    let mut probability = T::zero();
    let top = watched_cutoff(s, watched);
    let lf = ln_factorials::<T>(top);
    for k in counts..=top {
        let part = slice(s, watched, k);
        let weight = det.count_probability_with(&lf, k, counts) * part.norm_sqr() / norm;
        if weight > T::zero() {
            probability += weight;
            branches.push((weight, part));
        }
    }
    if branches.is_empty() {
        return Ok(Conditional::impossible());
    }
    Ok(Conditional {
        probability,
        state: Some(BranchEnsemble::new(branches)?),
    })
}

/// Conditions on the detector registering no clicks, the normally ordered
/// POVM element `:exp(−η a†a): = Σₖ (1−η)ᵏ |k⟩⟨k|`.
pub fn condition_zero_counts_inefficient<T: Real>(
    s: &TwoModeState<T>,
    watched: Mode,
    det: &DetectorModel<T>,
) -> Result<Conditional<T, BranchEnsemble<T>>> {
    condition_counts_inefficient(s, watched, det, 0)
}

/// Fidelity of a mixture with a pure target, `Σᵢ wᵢ F(ψᵢ, target)`.
pub fn ensemble_fidelity<T: Real>(e: &BranchEnsemble<T>, target: &PureState<T>) -> Result<T> {
    if e.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    e.branches
        .iter()
        .try_fold(T::zero(), |acc, b| Ok(acc + b.weight * fidelity(&b.state, target)?))
}
