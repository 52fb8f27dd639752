//! Ladder operators and the two-mode beamsplitter.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{Amplitude, PureState, TwoModeState};
use crate::real::{ln_factorials, Real};

/// Bare raising operator `Ê⁺ = Σ |n+1⟩⟨n|`.
///
/// The cutoff grows by one so the top amplitude is never lost.
pub fn bare_raise<T: Real>(s: &PureState<T>) -> PureState<T> {
    let mut amps = Vec::with_capacity(s.cutoff() + 2);
    amps.push(Complex::new(T::zero(), T::zero()));
    amps.extend_from_slice(s.amplitudes());
    PureState::from_raw(amps)
}

/// Bare lowering operator `Ê⁻ = Σ |n-1⟩⟨n|`. The vacuum component is
/// discarded and the cutoff shrinks by one (lowering a cutoff-0 state gives
/// the cutoff-0 zero vector).
pub fn bare_lower<T: Real>(s: &PureState<T>) -> PureState<T> {
    let amps = s.amplitudes();
    if amps.len() == 1 {
        return PureState::zero(0);
    }
    PureState::from_raw(amps[1..].to_vec())
}

/// Creation operator `a†`. The result is not normalized.
pub fn std_raise<T: Real>(s: &PureState<T>) -> PureState<T> {
    let mut amps = Vec::with_capacity(s.cutoff() + 2);
    amps.push(Complex::new(T::zero(), T::zero()));
    amps.extend(
        s.amplitudes()
            .iter()
            .enumerate()
            .map(|(n, a)| a * T::from_count(n + 1).sqrt()),
    );
    PureState::from_raw(amps)
}

/// Annihilation operator `a`. The result is not normalized.
pub fn std_lower<T: Real>(s: &PureState<T>) -> PureState<T> {
    let amps = s.amplitudes();
    if amps.len() == 1 {
        return PureState::zero(0);
    }
    PureState::from_raw(
        amps.iter()
            .enumerate()
            .skip(1)
            .map(|(n, a)| a * T::from_count(n).sqrt())
            .collect(),
    )
}

/// Product state `a ⊗ b`.
pub fn tensor<T: Real>(a: &PureState<T>, b: &PureState<T>) -> TwoModeState<T> {
    let mut out = TwoModeState::zero((a.cutoff(), b.cutoff()));
    for (j, aj) in a.amplitudes().iter().enumerate() {
        for (k, bk) in b.amplitudes().iter().enumerate() {
            *out.amplitude_mut(j, k) = aj * bk;
        }
    }
    out
}

/// Lossless two-port beamsplitter.
///
/// The input creation operators are expressed through the output ones as
///
/// ```text
/// a₁† = |t| e^{iφ_T} a₃† − |r| e^{−iφ_R} a₄†
/// a₂† = |r| e^{iφ_R} a₃† + |t| e^{−iφ_T} a₄†
/// ```
///
/// where modes 1, 2 are the first and second input modes and modes 3, 4 the
/// first and second output modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamsplitterParams<T> {
    pub t_mag: T,
    pub r_mag: T,
    pub phi_t: T,
    pub phi_r: T,
}

impl<T: Real> BeamsplitterParams<T> {
    pub fn new(t_mag: T, r_mag: T, phi_t: T, phi_r: T) -> Result<Self> {
        for (name, v) in [("|t|", t_mag), ("|r|", r_mag)] {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::OutOfDomain {
                    name,
                    value: v.as_f64(),
                    domain: "[0, 1]",
                });
            }
        }
        if !(phi_t.is_finite() && phi_r.is_finite()) {
            return Err(Error::OutOfDomain {
                name: "phase",
                value: if phi_t.is_finite() { phi_r } else { phi_t }.as_f64(),
                domain: "finite",
            });
        }
        let sum = t_mag * t_mag + r_mag * r_mag;
        if (sum - T::one()).abs() > T::tolerance(1e-12) {
            return Err(Error::NonUnitaryBeamsplitter { sum: sum.as_f64() });
        }
        Ok(Self {
            t_mag,
            r_mag,
            phi_t,
            phi_r,
        })
    }

    /// Beamsplitter with reflection probability `|r|² = reflectivity` in the
    /// default phase convention `φ_T = 0`, `φ_R = π`.
    pub fn from_reflectivity(reflectivity: T) -> Result<Self> {
        check_probability("reflectivity", reflectivity)?;
        Self::new(
            (T::one() - reflectivity).sqrt(),
            reflectivity.sqrt(),
            T::zero(),
            T::PI(),
        )
    }

    /// Reflection probability `|r|²`.
    pub fn reflectivity(&self) -> T {
        self.r_mag * self.r_mag
    }

    /// Parameters of the inverse transformation.
    pub fn inverse(&self) -> Self {
        Self {
            t_mag: self.t_mag,
            r_mag: self.r_mag,
            phi_t: -self.phi_t,
            phi_r: self.phi_r + T::PI(),
        }
    }

    /// Rows give `a₁†` and `a₂†` in terms of `(a₃†, a₄†)`.
    fn mode_matrix(&self) -> [[Amplitude<T>; 2]; 2] {
        let e = |phase: T| Complex::from_polar(T::one(), phase);
        [
            [e(self.phi_t) * self.t_mag, -e(-self.phi_r) * self.r_mag],
            [e(self.phi_r) * self.r_mag, e(-self.phi_t) * self.t_mag],
        ]
    }
}

pub(crate) fn check_probability<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name,
            value: v.as_f64(),
            domain: "[0, 1]",
        })
    }
}

/// Applies the beamsplitter, sizing both output cutoffs to `cutoff₁ + cutoff₂`.
pub fn beamsplitter<T: Real>(s: &TwoModeState<T>, p: &BeamsplitterParams<T>) -> TwoModeState<T> {
    let (c1, c2) = s.cutoffs();
    let total = c1 + c2;
    beamsplitter_into(s, p, (total, total)).expect("structural cutoff always suffices")
}

/// Applies the beamsplitter into an output of the given cutoffs.
///
/// Each nonzero input `|j, k⟩` is expanded by substituting the mode relations
/// into `(a₁†)ʲ (a₂†)ᵏ / √(j! k!)`; output amplitudes stay inside the block of
/// total photon number `j + k`. Fails if a populated block does not fit.
pub fn beamsplitter_into<T: Real>(
    s: &TwoModeState<T>,
    p: &BeamsplitterParams<T>,
    out_cutoffs: (usize, usize),
) -> Result<TwoModeState<T>> {
    let required = s.max_total_photons().unwrap_or(0);
    let available = out_cutoffs.0.min(out_cutoffs.1);
    if required > available {
        return Err(Error::InsufficientCutoff { required, available });
    }

    let [[u11, u12], [u21, u22]] = p.mode_matrix();
    let pows = |u: Amplitude<T>| -> Vec<Amplitude<T>> {
        let mut v = Vec::with_capacity(required + 1);
        let mut acc = Complex::new(T::one(), T::zero());
        for _ in 0..=required {
            v.push(acc);
            acc *= u;
        }
        v
    };
    let (p11, p12, p21, p22) = (pows(u11), pows(u12), pows(u21), pows(u22));
    let lf = ln_factorials::<T>(required);
    let half = T::lit(0.5);

    let mut out = TwoModeState::zero(out_cutoffs);
    for (j, k, c) in s.nonzero() {
        let n = j + k;
        let norm_in = lf[j] + lf[k];
        for a in 0..=j {
            let ln_ca = lf[j] - lf[a] - lf[j - a];
            let first = p11[a] * p12[j - a];
            for b in 0..=k {
                let m = a + b;
                let ln_mag = ln_ca + lf[k] - lf[b] - lf[k - b] + half * (lf[m] + lf[n - m] - norm_in);
                let term = first * p21[b] * p22[k - b] * ln_mag.exp();
                *out.amplitude_mut(m, n - m) += c * term;
            }
        }
    }
    Ok(out)
}
