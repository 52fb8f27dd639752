//! Truncated Fock-space simulation of heralded photon addition.
//!
//! A coherent state and a single photon meet on a beamsplitter; when the
//! detector on one output stays silent, the other output approximates the
//! bare raising operator `Ê⁺ = Σ |n+1⟩⟨n|` applied to the coherent state.
//! For a strong coherent beam and a highly reflecting beamsplitter the
//! silent-detector probability tends to `1/e`.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases at the crate root fix the working precision to `f64`.

pub mod error;
pub mod fock;
pub mod measurement;
pub mod operators;
pub mod optimize;
pub mod real;
pub mod schemes;

pub use error::{Error, Result};
pub use fock::{
    choose_cutoff, coherent, fidelity, make_coherent, make_fock, photon_distribution, poisson_tail, Amplitude,
    CutoffPolicy, PureState, TwoModeState,
};
pub use measurement::{
    condition_counts_inefficient, condition_zero_counts_inefficient, ensemble_fidelity, project_counts,
    watched_distribution, Branch, BranchEnsemble, Conditional, DetectorModel, Mode,
};
pub use operators::{
    bare_lower, bare_raise, beamsplitter, beamsplitter_into, std_lower, std_raise, tensor, BeamsplitterParams,
};
pub use optimize::{
    maximize_scalar, optimize_single_bs, optimize_single_bs_with, try_maximize_scalar, Objective,
    OptimizationResult, OptimizedSingleBs, SearchMethod,
};
pub use real::Real;
pub use schemes::{
    cascade_second_stage_state, characterization_curve, characterization_peak, closed_form_p0,
    do_nothing_fidelity, escher_cascade, escher_stage, failed_branch, optimal_reflectivity, run_cascade,
    run_cascade_with, run_single_bs, simulate_escher_cascade, simulate_escher_stage, AdditionSetup,
    CascadeOutcome, CharacterizationPoint, EscherStage, SingleBsOutcome,
};

pub type Amplitude64 = Amplitude<f64>;
pub type PureState64 = PureState<f64>;
pub type TwoModeState64 = TwoModeState<f64>;
pub type BeamsplitterParams64 = BeamsplitterParams<f64>;
pub type DetectorModel64 = DetectorModel<f64>;
pub type BranchEnsemble64 = BranchEnsemble<f64>;
pub type SingleBsOutcome64 = SingleBsOutcome<f64>;
pub type CascadeOutcome64 = CascadeOutcome<f64>;
pub type CharacterizationPoint64 = CharacterizationPoint<f64>;
pub type AdditionSetup64 = AdditionSetup<f64>;

pub type Amplitude32 = Amplitude<f32>;
pub type PureState32 = PureState<f32>;
pub type TwoModeState32 = TwoModeState<f32>;
pub type SingleBsOutcome32 = SingleBsOutcome<f32>;
