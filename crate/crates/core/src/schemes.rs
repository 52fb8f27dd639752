//! Heralded photon-addition schemes built from the state, operator and
//! measurement primitives.
//!
//! In every single-beamsplitter setup the coherent state enters the first
//! input port and the ancilla photon the second; the detector watches the
//! first output port and the heralded state leaves through the second.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{coherent, fidelity, make_fock, Amplitude, PureState, TwoModeState};
use crate::measurement::{
    condition_counts_inefficient, condition_zero_counts_inefficient, ensemble_fidelity, project_counts,
    BranchEnsemble, Conditional, DetectorModel, Mode,
};
use crate::operators::{bare_raise, beamsplitter, check_probability, tensor, BeamsplitterParams};
use crate::real::Real;

const DETECTOR: Mode = Mode::First;

/// Result of one heralded photon-addition attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleBsOutcome<T> {
    /// Beamsplitter reflection probability `|r|²`.
    pub reflectivity: T,
    pub eta: T,
    /// Probability that the detector stays silent.
    pub p_success: T,
    /// Fidelity of the accepted output with `Ê⁺|α⟩`; zero when no output can
    /// be accepted.
    pub fidelity_vs_bare: T,
    /// Accepted output, `None` when `p_success` is zero.
    pub output: Option<BranchEnsemble<T>>,
}

/// Coherent input, ancilla photon and ideal target for a fixed `α`, reused
/// across reflectivities.
#[derive(Debug, Clone)]
pub struct AdditionSetup<T> {
    alpha: Amplitude<T>,
    input: TwoModeState<T>,
    target: PureState<T>,
}

impl<T: Real> AdditionSetup<T> {
    pub fn new(alpha: Amplitude<T>) -> Result<Self> {
        let coh = coherent(alpha)?;
        let input = tensor(&coh, &make_fock(1, 1)?);
        let target = bare_raise(&coh);
        Ok(Self { alpha, input, target })
    }

    pub fn alpha(&self) -> Amplitude<T> {
        self.alpha
    }

    /// `Ê⁺|α⟩`.
    pub fn target(&self) -> &PureState<T> {
        &self.target
    }

    /// Joint state of both output ports for reflectivity `|r|²`.
    pub fn joint_output(&self, reflectivity: T) -> Result<TwoModeState<T>> {
        let params = BeamsplitterParams::from_reflectivity(reflectivity)?;
        Ok(beamsplitter(&self.input, &params))
    }

    pub fn run(&self, reflectivity: T, eta: T) -> Result<SingleBsOutcome<T>> {
        let det = DetectorModel::new(eta)?;
        let joint = self.joint_output(reflectivity)?;
        let heralded = condition_zero_counts_inefficient(&joint, DETECTOR, &det)?;
        let fidelity_vs_bare = match &heralded.state {
            Some(e) => ensemble_fidelity(e, &self.target)?,
            None => T::zero(),
        };
        Ok(SingleBsOutcome {
            reflectivity,
            eta,
            p_success: heralded.probability,
            fidelity_vs_bare,
            output: heralded.state,
        })
    }
}

/// Mixes `|α⟩` with a single photon on a beamsplitter of reflectivity
/// `reflectivity` and accepts when a detector of efficiency `eta` stays
/// silent.
pub fn run_single_bs<T: Real>(alpha: Amplitude<T>, reflectivity: T, eta: T) -> Result<SingleBsOutcome<T>> {
    AdditionSetup::new(alpha)?.run(reflectivity, eta)
}

/// Zero-count probability for mean photon number `alpha_sq` and reflectivity
/// `R` with an ideal detector, `(1−R) e^{−A(1−R)} (1 + AR)`.
pub fn closed_form_p0<T: Real>(alpha_sq: T, reflectivity: T) -> T {
    let transmit = T::one() - reflectivity;
    transmit * (-alpha_sq * transmit).exp() * (T::one() + alpha_sq * reflectivity)
}

/// Reflectivity maximizing [`closed_form_p0`]:
/// `(A − 3 + √(A² + 2A + 5)) / 2A`, which is positive only for `A > 1/2`.
/// Below that the optimum sits at `R = 0`.
pub fn optimal_reflectivity<T: Real>(alpha_sq: T) -> T {
    let half = T::lit(0.5);
    if alpha_sq <= half {
        return T::zero();
    }
    if alpha_sq.is_infinite() {
        return T::one();
    }
    let two = T::lit(2.0);
    let root = (alpha_sq * alpha_sq + two * alpha_sq + T::lit(5.0)).sqrt();
    ((alpha_sq - T::lit(3.0) + root) / (two * alpha_sq)).max(T::zero()).min(T::one())
}

/// State left behind when the detector registers exactly one photon
/// (ideal detector).
pub fn failed_branch<T: Real>(alpha: Amplitude<T>, reflectivity: T) -> Result<Conditional<T, PureState<T>>> {
    let joint = AdditionSetup::new(alpha)?.joint_output(reflectivity)?;
    project_counts(&joint, DETECTOR, 1)
}

/// Probabilities and fidelities of the two-stage feedforward scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeOutcome<T> {
    /// Zero counts at the first detector.
    pub p1_0: T,
    pub f1: T,
    /// One count at the first detector, triggering the second stage.
    pub p1_1: T,
    /// Zero counts at the second detector given that the second stage ran.
    pub p2_0: T,
    pub f2: T,
    /// Success-weighted mean fidelity of accepted outputs.
    pub f_mean: T,
    /// `p1_0 + p1_1 · p2_0`.
    pub p_total: T,
    /// Mixture of every accepted output, `None` when nothing is accepted.
    pub output: Option<BranchEnsemble<T>>,
}

/// Two-stage scheme: on a single count at the first detector the failed
/// state is sent, with a fresh photon, through a second beamsplitter and
/// accepted if the second detector stays silent. Two or more counts at the
/// first detector, or any count at the second, is a terminal failure.
///
/// With an inefficient detector the one-count herald is the binomial POVM
/// element `Σₖ k η (1−η)^{k−1} |k⟩⟨k|`, so the second stage receives a mixture
/// over the true photon number `k ≥ 1`.
pub fn run_cascade<T: Real>(
    alpha: Amplitude<T>,
    reflectivity1: T,
    reflectivity2: T,
    eta: T,
) -> Result<CascadeOutcome<T>> {
    let setup = AdditionSetup::new(alpha)?;
    run_cascade_with(&setup, reflectivity1, reflectivity2, eta)
}

/// [`run_cascade`] with a prepared input, for sweeps at fixed `α`.
pub fn run_cascade_with<T: Real>(
    setup: &AdditionSetup<T>,
    reflectivity1: T,
    reflectivity2: T,
    eta: T,
) -> Result<CascadeOutcome<T>> {
    let det = DetectorModel::new(eta)?;
    let second = BeamsplitterParams::from_reflectivity(reflectivity2)?;
    let target = setup.target();
    let joint = setup.joint_output(reflectivity1)?;

    let stage1 = condition_zero_counts_inefficient(&joint, DETECTOR, &det)?;
    let failed = condition_counts_inefficient(&joint, DETECTOR, &det, 1)?;

    let f1 = match &stage1.state {
        Some(e) => ensemble_fidelity(e, target)?,
        None => T::zero(),
    };

    let ancilla = make_fock(1, 1)?;
    let mut p2_0 = T::zero();
    let mut stage2_branches = Vec::new();
    if let Some(retry) = &failed.state {
        for branch in retry.branches() {
            let joint2 = beamsplitter(&tensor(&branch.state, &ancilla), &second);
            let accepted = condition_zero_counts_inefficient(&joint2, DETECTOR, &det)?;
            let Some(e) = accepted.state else { continue };
            let w = branch.weight * accepted.probability;
            p2_0 += w;
            stage2_branches.extend(e.branches().iter().map(|b| (w * b.weight, b.state.clone())));
        }
    }
    let stage2 = if stage2_branches.is_empty() {
        None
    } else {
        Some(BranchEnsemble::new(stage2_branches)?)
    };
    let f2 = match &stage2 {
        Some(e) => ensemble_fidelity(e, target)?,
        None => T::zero(),
    };

    let p1_0 = stage1.probability;
    let p1_1 = failed.probability;
    let retry_weight = p1_1 * p2_0;
    let p_total = p1_0 + retry_weight;
    let f_mean = if p_total > T::zero() {
        (p1_0 * f1 + retry_weight * f2) / p_total
    } else {
        T::zero()
    };

    let mut accepted = Vec::new();
    for (weight, ensemble) in [(p1_0, &stage1.state), (retry_weight, &stage2)] {
        if let Some(e) = ensemble {
            accepted.extend(e.branches().iter().map(|b| (weight * b.weight, b.state.clone())));
        }
    }
    let output = if accepted.iter().any(|(w, _)| *w > T::zero()) {
        Some(BranchEnsemble::new(accepted)?)
    } else {
        None
    };

    Ok(CascadeOutcome {
        p1_0,
        f1,
        p1_1,
        p2_0,
        f2,
        f_mean,
        p_total,
        output,
    })
}

/// Unnormalized state accepted by the second stage of the cascade with ideal
/// detectors; its squared norm is `P₁(1) · P₂(0)`. Returns the zero vector
/// when that branch is impossible.
pub fn cascade_second_stage_state<T: Real>(
    alpha: Amplitude<T>,
    reflectivity1: T,
    reflectivity2: T,
) -> Result<PureState<T>> {
    let second = BeamsplitterParams::from_reflectivity(reflectivity2)?;
    let failed = failed_branch(alpha, reflectivity1)?;
    let Some(state) = failed.state else {
        return Ok(PureState::zero(0));
    };
    let joint2 = beamsplitter(&tensor(&state, &make_fock(1, 1)?), &second);
    let accepted = project_counts(&joint2, DETECTOR, 0)?;
    match accepted.state {
        Some(s) => {
            let scale = (failed.probability * accepted.probability).sqrt();
            Ok(s.scaled(Complex::new(scale, T::zero())))
        }
        None => Ok(PureState::zero(state.cutoff() + 1)),
    }
}

/// One stage of the Fock-state ladder `|n⟩ → |n+1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscherStage<T> {
    /// Optimal transmission amplitude `√(n/(n+1))`.
    pub transmission: T,
    /// Probability `(n/(n+1))ⁿ` that the stage detector stays silent.
    pub p_zero: T,
}

pub fn escher_stage<T: Real>(n: usize) -> Result<EscherStage<T>> {
    if n == 0 {
        return Err(Error::OutOfDomain {
            name: "n",
            value: 0.0,
            domain: "n ≥ 1",
        });
    }
    let ratio = T::from_count(n) / T::from_count(n + 1);
    Ok(EscherStage {
        transmission: ratio.sqrt(),
        p_zero: ratio.powi(n as i32),
    })
}

/// Runs one ladder stage on a state, returning the silent-detector
/// probability and the heralded state.
///
/// The carried state enters the first port and is transmitted with
/// amplitude `√(n/(n+1))` into the first output; the detector watches the
/// second output.
fn ladder_step<T: Real>(state: &PureState<T>, n: usize) -> Result<Conditional<T, PureState<T>>> {
    let stage = escher_stage::<T>(n)?;
    let r = (T::one() - stage.transmission * stage.transmission).max(T::zero()).sqrt();
    let params = BeamsplitterParams::new(stage.transmission, r, T::zero(), T::PI())?;
    let joint = beamsplitter(&tensor(state, &make_fock(1, 1)?), &params);
    project_counts(&joint, Mode::Second, 0)
}

/// Simulated silent-detector probability for inputs `(|n⟩, |1⟩)` at the
/// optimal transmission.
pub fn simulate_escher_stage<T: Real>(n: usize) -> Result<T> {
    Ok(ladder_step(&make_fock(n, n)?, n)?.probability)
}

/// Probability that all `N − 1` detectors of the ladder stay silent, so that
/// `N` single photons become `|N⟩`: `Πₙ (n/(n+1))ⁿ` for `n = 1..N−1`.
pub fn escher_cascade<T: Real>(photons: usize) -> Result<T> {
    if photons == 0 {
        return Err(Error::OutOfDomain {
            name: "N",
            value: 0.0,
            domain: "N ≥ 1",
        });
    }
    (1..photons).try_fold(T::one(), |acc, n| Ok(acc * escher_stage::<T>(n)?.p_zero))
}

/// Runs the full ladder by simulation, returning the overall success
/// probability and the final state.
pub fn simulate_escher_cascade<T: Real>(photons: usize) -> Result<(T, PureState<T>)> {
    let mut state = make_fock(1, 1)?;
    let mut prob = T::one();
    for n in 1..photons {
        let step = ladder_step(&state, n)?;
        prob *= step.probability;
        state = step.into_state()?;
    }
    Ok((prob, state))
}

/// Fidelity of the untouched input `|α⟩` with `Ê⁺|α⟩`.
pub fn do_nothing_fidelity<T: Real>(alpha: Amplitude<T>) -> Result<T> {
    let coh = coherent(alpha)?;
    fidelity(&coh, &bare_raise(&coh))
}

/// Zero-count probability at one `α` for a fixed beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterizationPoint<T> {
    pub alpha: T,
    pub reflectivity: T,
    pub p_zero_counts: T,
}

/// Zero-count probability across an `α` grid at fixed reflectivity. Uses
/// the closed form for an ideal detector and simulation otherwise.
pub fn characterization_curve<T: Real>(
    reflectivity: T,
    alpha_grid: &[T],
    eta: T,
) -> Result<Vec<CharacterizationPoint<T>>> {
    check_probability("reflectivity", reflectivity)?;
    check_probability("eta", eta)?;
    if alpha_grid.is_empty() {
        return Err(Error::OutOfDomain {
            name: "alpha grid length",
            value: 0.0,
            domain: "≥ 1",
        });
    }
    alpha_grid
        .iter()
        .map(|&alpha| {
            let p = if eta == T::one() {
                closed_form_p0(alpha * alpha, reflectivity)
            } else {
                run_single_bs(Complex::new(alpha, T::zero()), reflectivity, eta)?.p_success
            };
            Ok(CharacterizationPoint {
                alpha,
                reflectivity,
                p_zero_counts: p,
            })
        })
        .collect()
}

/// Location `α²` and height of the zero-count peak for a highly reflecting
/// beamsplitter: `α² = (2R−1)/(R(1−R))`, `p = R e^{−2+1/R}`. Only defined for
/// `R ∈ (1/2, 1)`.
pub fn characterization_peak<T: Real>(reflectivity: T) -> Option<(T, T)> {
    let half = T::lit(0.5);
    if !(reflectivity > half && reflectivity < T::one()) {
        return None;
    }
    let two = T::lit(2.0);
    let alpha_sq = (two * reflectivity - T::one()) / (reflectivity * (T::one() - reflectivity));
    let peak = reflectivity * (T::one() / reflectivity - two).exp();
    Some((alpha_sq, peak))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    fn a(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn single_bs_half_reflectivity() {
        let out = run_single_bs(a(1.0), 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(out.p_success, 0.5 * (-0.5f64).exp() * 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.p_success, 0.454898, epsilon = 1e-6);
    }

    #[test]
    fn perfect_mirror_never_succeeds() {
        let out = run_single_bs(a(1.0), 1.0, 1.0).unwrap();
        assert_eq!(out.p_success, 0.0);
        assert!(out.output.is_none());
        assert_eq!(out.fidelity_vs_bare, 0.0);
    }

    #[test]
    fn vacuum_input_transmits_photon() {
        let out = run_single_bs(a(0.0), 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(out.p_success, 0.5, epsilon = 1e-15);
        let dist = out.output.unwrap().photon_distribution();
        assert_abs_diff_eq!(dist[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.fidelity_vs_bare, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_limits() {
        for r in [0.0, 0.3, 0.9] {
            assert_abs_diff_eq!(closed_form_p0(0.0, r), 1.0 - r, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(closed_form_p0(1.0, 0.5), 0.454898, epsilon = 1e-6);
        let p = closed_form_p0(100.0, optimal_reflectivity(100.0));
        assert!((p - 1.0 / E).abs() < 0.01, "{p}");
    }

    #[test]
    fn optimal_reflectivity_values() {
        assert_eq!(optimal_reflectivity(0.5), 0.0);
        assert_eq!(optimal_reflectivity(0.2), 0.0);
        assert_abs_diff_eq!(optimal_reflectivity(4.0), (1.0 + 29f64.sqrt()) / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(optimal_reflectivity(4.0), 0.798145, epsilon = 1e-6);
        assert!(optimal_reflectivity(1e8) > 1.0 - 1e-7);
        assert_eq!(optimal_reflectivity(f64::INFINITY), 1.0);
    }

    #[test]
    fn failed_branch_vacuum_input() {
        let out = failed_branch(a(0.0), 0.3).unwrap();
        assert_abs_diff_eq!(out.probability, 0.3, epsilon = 1e-15);
        let s = out.state.unwrap();
        assert_abs_diff_eq!(s.amplitude(0).norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ladder_stage_values() {
        let s1 = escher_stage::<f64>(1).unwrap();
        assert_abs_diff_eq!(s1.transmission, 0.5f64.sqrt(), epsilon = 1e-16);
        assert_eq!(s1.p_zero, 0.5);
        let big = escher_stage::<f64>(1_000_000).unwrap();
        assert!((big.p_zero - 1.0 / E).abs() < 1e-6);
        assert!(escher_stage::<f64>(0).is_err());
    }

    #[test]
    fn escher_stage_simulation_n5() {
        let p: f64 = simulate_escher_stage(5).unwrap();
        assert_abs_diff_eq!(p, (5.0f64 / 6.0).powi(5), epsilon = 1e-12);
    }

    #[test]
    fn escher_cascade_values() {
        assert_eq!(escher_cascade::<f64>(1).unwrap(), 1.0);
        assert_eq!(escher_cascade::<f64>(2).unwrap(), 0.5);
        assert_abs_diff_eq!(escher_cascade::<f64>(3).unwrap(), 2.0 / 9.0, epsilon = 1e-15);
        let (p, state) = simulate_escher_cascade::<f64>(4).unwrap();
        assert_abs_diff_eq!(p, escher_cascade::<f64>(4).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(state.amplitude(4).norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn do_nothing_baseline() {
        assert_eq!(do_nothing_fidelity(a(0.0)).unwrap(), 0.0);
        let mut prev = 0.0;
        for i in 1..=50 {
            let f = do_nothing_fidelity(a(0.1 * i as f64)).unwrap();
            assert!(f > prev && f < 1.0, "alpha {}", 0.1 * i as f64);
            prev = f;
        }
    }

    #[test]
    fn do_nothing_alpha_one_series() {
        // |Σ qₙ qₙ₊₁|² by direct summation with explicit factorials
        let mut fact = 1.0f64;
        let mut q = Vec::new();
        for n in 0..=40 {
            if n > 0 {
                fact *= n as f64;
            }
            q.push((-0.5f64).exp() / fact.sqrt());
        }
        let overlap: f64 = (0..40).map(|n| q[n] * q[n + 1]).sum();
        let norm: f64 = q.iter().map(|x| x * x).sum();
        let expected = overlap * overlap / (norm * norm);
        assert_abs_diff_eq!(do_nothing_fidelity(a(1.0)).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn characterization_examples() {
        let curve = characterization_curve(0.9, &[0.0, 1.0, 3.0], 1.0).unwrap();
        assert_abs_diff_eq!(curve[0].p_zero_counts, 0.1, epsilon = 1e-15);
        let (asq, peak) = characterization_peak(0.99f64).unwrap();
        assert_abs_diff_eq!(asq, 0.98 / (0.99 * 0.01), epsilon = 1e-9);
        assert_abs_diff_eq!(asq.sqrt(), 9.95, epsilon = 1e-2);
        assert_abs_diff_eq!(peak, 0.3679, epsilon = 1e-4);
        let (_, peak) = characterization_peak(0.9).unwrap();
        assert_abs_diff_eq!(peak, 0.370, epsilon = 1e-3);
        assert!(peak > 1.0 / E);
        assert!(characterization_peak(0.5).is_none());
        assert!(characterization_curve(0.9, &[], 1.0).is_err());
    }

    #[test]
    fn characterization_inefficient_uses_simulation() {
        let curve = characterization_curve(0.9, &[0.0, 1.5], 0.7).unwrap();
        // vacuum input: the lone photon reaches the detector with prob 0.9
        // and is missed there with prob 0.3
        assert_abs_diff_eq!(curve[0].p_zero_counts, 0.1 + 0.9 * 0.3, epsilon = 1e-12);
        let ideal = closed_form_p0(2.25, 0.9);
        assert!(curve[1].p_zero_counts > ideal);
    }

    #[test]
    fn cascade_dead_second_branch() {
        let out = run_cascade(a(0.0), 0.0, 0.4, 1.0).unwrap();
        assert_eq!(out.p1_1, 0.0);
        assert_eq!(out.f_mean, out.f1);
        assert_abs_diff_eq!(out.f1, 1.0, epsilon = 1e-15);
        let other = run_cascade(a(0.0), 0.0, 0.9, 1.0).unwrap();
        assert_eq!(out.f_mean, other.f_mean);
        assert_eq!(out.p_total, other.p_total);
    }

    #[test]
    fn cascade_invariants() {
        for eta in [1.0, 0.7] {
            let out = run_cascade(a(1.3), 0.6, 0.75, eta).unwrap();
            assert_abs_diff_eq!(out.p_total, out.p1_0 + out.p1_1 * out.p2_0, epsilon = 1e-12);
            assert_abs_diff_eq!(
                out.f_mean,
                (out.p1_0 * out.f1 + out.p1_1 * out.p2_0 * out.f2) / out.p_total,
                epsilon = 1e-12
            );
            let single = run_single_bs(a(1.3), 0.6, eta).unwrap();
            assert_abs_diff_eq!(out.p1_0, single.p_success, epsilon = 1e-14);
            assert_abs_diff_eq!(out.f1, single.fidelity_vs_bare, epsilon = 1e-14);
            assert!(out.p_total <= 1.0 && out.p_total >= out.p1_0);
        }
    }
}
