//! Truncated photon-number-basis states.
//!
//! Single-mode states are amplitude vectors over `|0⟩..=|cutoff⟩`; two-mode
//! states are dense `(cutoff₁ + 1) × (cutoff₂ + 1)` arrays. Conditional
//! branches are allowed to be sub-normalized: their squared norm carries the
//! probability of the branch.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{ln_factorials, Real};

/// Complex probability amplitude.
pub type Amplitude<T> = Complex<T>;

/// Largest squared norm accepted from a caller, above 1.
const NORM_SLACK: f64 = 1e-9;

/// Truncations that discard at least this much probability are refused.
const MAX_TRUNCATION_LOSS: f64 = 1e-6;

/// How the Fock cutoff is chosen for a state of given mean photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy<T> {
    /// Poisson tail mass allowed beyond the cutoff (before padding).
    pub tail_tol: T,
    /// Extra basis states appended after the tail bound is met.
    pub padding: usize,
}

impl<T: Real> CutoffPolicy<T> {
    pub fn new(tail_tol: T, padding: usize) -> Result<Self> {
        if !(tail_tol > T::zero() && tail_tol < T::one()) {
            return Err(Error::OutOfDomain {
                name: "tail_tol",
                value: tail_tol.as_f64(),
                domain: "(0, 1)",
            });
        }
        Ok(Self { tail_tol, padding })
    }
}

impl<T: Real> Default for CutoffPolicy<T> {
    fn default() -> Self {
        Self {
            tail_tol: T::lit(1e-12),
            padding: 20,
        }
    }
}

/// Poisson probabilities `e^{-μ} μⁿ / n!` for `n = 0..=max`, evaluated in
/// log space so that large means neither overflow nor underflow early.
pub(crate) fn poisson_pmf<T: Real>(mean: T, max: usize) -> Vec<T> {
    if mean == T::zero() {
        let mut p = vec![T::zero(); max + 1];
        p[0] = T::one();
        return p;
    }
    let ln_mean = mean.ln();
    ln_factorials::<T>(max)
        .into_iter()
        .enumerate()
        .map(|(n, lf)| (T::from_count(n) * ln_mean - mean - lf).exp())
        .collect()
}

/// Index beyond which the Poisson(μ) mass is far below double precision.
fn poisson_support_bound<T: Real>(mean: T) -> usize {
    let m = mean.as_f64();
    (m + 40.0 * m.sqrt() + 60.0).ceil() as usize
}

/// Probability mass of Poisson(`mean`) strictly above `cutoff`.
pub fn poisson_tail<T: Real>(mean: T, cutoff: usize) -> T {
    let bound = poisson_support_bound(mean);
    if cutoff >= bound {
        return T::zero();
    }
    // summed from the top so small terms are not swamped
    poisson_pmf(mean, bound)[cutoff + 1..]
        .iter()
        .rev()
        .fold(T::zero(), |acc, &p| acc + p)
}

/// Smallest `N` whose Poisson tail above `N` is below `policy.tail_tol`,
/// plus `policy.padding`.
pub fn choose_cutoff<T: Real>(mean_photons: T, policy: &CutoffPolicy<T>) -> usize {
    debug_assert!(mean_photons.is_finite() && mean_photons >= T::zero());
    if mean_photons <= T::zero() {
        return policy.padding;
    }
    let bound = poisson_support_bound(mean_photons);
    let pmf = poisson_pmf(mean_photons, bound);
    let mut tail = T::zero();
    // walk down from the top; the first index whose tail reaches the
    // tolerance is one past the answer
    let mut n = bound;
    while n > 0 {
        let next = tail + pmf[n];
        if next >= policy.tail_tol {
            break;
        }
        tail = next;
        n -= 1;
    }
    n + policy.padding
}

/// Single-mode state over the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    amps: Vec<Amplitude<T>>,
}

impl<T: Real> PureState<T> {
    /// Builds a state from amplitudes `|0⟩..=|amps.len() - 1⟩`.
    ///
    /// The amplitudes must be finite and the squared norm at most `1 + 1e-9`.
    pub fn new(amps: Vec<Amplitude<T>>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ZeroNorm);
        }
        if let Some(bad) = amps.iter().find(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::OutOfDomain {
                name: "amplitude",
                value: bad.norm_sqr().as_f64(),
                domain: "finite",
            });
        }
        let state = Self { amps };
        let norm = state.norm_sqr();
        if norm > T::one() + T::tolerance(NORM_SLACK) {
            return Err(Error::OutOfDomain {
                name: "squared norm",
                value: norm.as_f64(),
                domain: "[0, 1 + 1e-9]",
            });
        }
        Ok(state)
    }

    /// Builds a state without the normalization bound. Used by operators whose
    /// output is legitimately unnormalized.
    pub(crate) fn from_raw(amps: Vec<Amplitude<T>>) -> Self {
        debug_assert!(!amps.is_empty());
        Self { amps }
    }

    /// The zero vector with the given cutoff.
    pub fn zero(cutoff: usize) -> Self {
        Self {
            amps: vec![Complex::new(T::zero(), T::zero()); cutoff + 1],
        }
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amplitudes(&self) -> &[Amplitude<T>] {
        &self.amps
    }

    /// Amplitude on `|n⟩`; zero beyond the cutoff.
    pub fn amplitude(&self, n: usize) -> Amplitude<T> {
        self.amps
            .get(n)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, zero-padding the shorter vector.
    pub fn inner(&self, other: &Self) -> Amplitude<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Unit-norm copy.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr();
        if norm <= T::zero() {
            return Err(Error::ZeroNorm);
        }
        let scale = T::one() / norm.sqrt();
        Ok(Self::from_raw(self.amps.iter().map(|a| a * scale).collect()))
    }

    /// `c · self`. The result may exceed unit norm.
    pub fn scaled(&self, c: Amplitude<T>) -> Self {
        Self::from_raw(self.amps.iter().map(|a| a * c).collect())
    }

    /// Copy with a larger (or equal) cutoff, zero-padded. Shrinking is only
    /// allowed when every dropped amplitude is exactly zero.
    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        let zero = Complex::new(T::zero(), T::zero());
        if cutoff < self.cutoff() && self.amps[cutoff + 1..].iter().any(|a| *a != zero) {
            return Err(Error::InsufficientCutoff {
                required: self.highest_occupied().unwrap_or(0),
                available: cutoff,
            });
        }
        let mut amps = self.amps.clone();
        amps.resize(cutoff + 1, zero);
        Ok(Self::from_raw(amps))
    }

    /// Largest photon number carrying a nonzero amplitude.
    pub fn highest_occupied(&self) -> Option<usize> {
        let zero = Complex::new(T::zero(), T::zero());
        self.amps.iter().rposition(|a| *a != zero)
    }
}

/// Coherent state `|α⟩` truncated at `cutoff`.
///
/// Amplitudes are `e^{-|α|²/2} αⁿ / √(n!)`, computed in log space. A cutoff
/// discarding `1e-6` or more of the Poisson mass is rejected.
pub fn make_coherent<T: Real>(alpha: Amplitude<T>, cutoff: usize) -> Result<PureState<T>> {
    let mean = alpha.norm_sqr();
    if !mean.is_finite() {
        return Err(Error::OutOfDomain {
            name: "alpha",
            value: mean.as_f64(),
            domain: "finite",
        });
    }
    let tail = poisson_tail(mean, cutoff);
    if tail >= T::lit(MAX_TRUNCATION_LOSS) {
        return Err(Error::TruncationLoss {
            cutoff,
            tail: tail.as_f64(),
            limit: MAX_TRUNCATION_LOSS,
        });
    }
    if mean == T::zero() {
        return make_fock(0, cutoff);
    }
    let (modulus, phase) = alpha.to_polar();
    let ln_modulus = modulus.ln();
    let half = T::lit(0.5);
    let amps = ln_factorials::<T>(cutoff)
        .into_iter()
        .enumerate()
        .map(|(n, lf)| {
            let n = T::from_count(n);
            let ln_mag = n * ln_modulus - half * mean - half * lf;
            Complex::from_polar(ln_mag.exp(), n * phase)
        })
        .collect();
    Ok(PureState::from_raw(amps))
}

/// Coherent state with the cutoff chosen by the default policy.
pub fn coherent<T: Real>(alpha: Amplitude<T>) -> Result<PureState<T>> {
    make_coherent(alpha, choose_cutoff(alpha.norm_sqr(), &CutoffPolicy::default()))
}

/// Fock state `|n⟩` with the given cutoff.
pub fn make_fock<T: Real>(n: usize, cutoff: usize) -> Result<PureState<T>> {
    if n > cutoff {
        return Err(Error::FockIndexOutOfRange { n, cutoff });
    }
    let mut state = PureState::zero(cutoff);
    state.amps[n] = Complex::new(T::one(), T::zero());
    Ok(state)
}

/// `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`.
pub fn fidelity<T: Real>(a: &PureState<T>, b: &PureState<T>) -> Result<T> {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na <= T::zero() || nb <= T::zero() {
        return Err(Error::ZeroNorm);
    }
    Ok(a.inner(b).norm_sqr() / (na * nb))
}

/// Normalized photon-number distribution `|aₙ|² / ‖a‖²`.
pub fn photon_distribution<T: Real>(s: &PureState<T>) -> Result<Vec<T>> {
    let norm = s.norm_sqr();
    if norm <= T::zero() {
        return Err(Error::ZeroNorm);
    }
    Ok(s.amps.iter().map(|a| a.norm_sqr() / norm).collect())
}

/// Joint state of two modes, stored densely as `amps[j * (cutoff₂ + 1) + k]`
/// for `|j⟩ ⊗ |k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState<T> {
    amps: Vec<Amplitude<T>>,
    cutoffs: (usize, usize),
}

impl<T: Real> TwoModeState<T> {
    /// The zero vector with the given per-mode cutoffs.
    pub fn zero(cutoffs: (usize, usize)) -> Self {
        Self {
            amps: vec![Complex::new(T::zero(), T::zero()); (cutoffs.0 + 1) * (cutoffs.1 + 1)],
            cutoffs,
        }
    }

    /// Builds a joint state from a row-major amplitude array.
    pub fn new(cutoffs: (usize, usize), amps: Vec<Amplitude<T>>) -> Result<Self> {
        if amps.len() != (cutoffs.0 + 1) * (cutoffs.1 + 1) {
            return Err(Error::OutOfDomain {
                name: "amplitude count",
                value: amps.len() as f64,
                domain: "(cutoff₁ + 1)(cutoff₂ + 1)",
            });
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::OutOfDomain {
                name: "amplitude",
                value: f64::NAN,
                domain: "finite",
            });
        }
        let state = Self { amps, cutoffs };
        let norm = state.norm_sqr();
        if norm > T::one() + T::tolerance(NORM_SLACK) {
            return Err(Error::OutOfDomain {
                name: "squared norm",
                value: norm.as_f64(),
                domain: "[0, 1 + 1e-9]",
            });
        }
        Ok(state)
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        self.cutoffs
    }

    #[inline]
    fn index(&self, j: usize, k: usize) -> usize {
        j * (self.cutoffs.1 + 1) + k
    }

    /// Amplitude on `|j⟩ ⊗ |k⟩`; zero outside the stored range.
    pub fn amplitude(&self, j: usize, k: usize) -> Amplitude<T> {
        if j > self.cutoffs.0 || k > self.cutoffs.1 {
            return Complex::new(T::zero(), T::zero());
        }
        self.amps[self.index(j, k)]
    }

    pub(crate) fn amplitude_mut(&mut self, j: usize, k: usize) -> &mut Amplitude<T> {
        let idx = self.index(j, k);
        &mut self.amps[idx]
    }

    pub fn amplitudes(&self) -> &[Amplitude<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Iterates `(j, k, amplitude)` over entries with nonzero amplitude.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, Amplitude<T>)> + '_ {
        let zero = Complex::new(T::zero(), T::zero());
        let width = self.cutoffs.1 + 1;
        self.amps
            .iter()
            .enumerate()
            .filter(move |(_, a)| **a != zero)
            .map(move |(i, a)| (i / width, i % width, *a))
    }

    /// Largest total photon number `j + k` with nonzero amplitude.
    pub fn max_total_photons(&self) -> Option<usize> {
        self.nonzero().map(|(j, k, _)| j + k).max()
    }
}
