//! Deterministic one-dimensional maximization.

use crate::error::{Error, Result};
use crate::fock::Amplitude;
use crate::operators::check_probability;
use crate::real::Real;
use crate::schemes::{AdditionSetup, SingleBsOutcome};

/// Points in the unimodality pre-scan.
pub const PRESCAN_POINTS: usize = 1001;

/// Default final bracket width.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Differences smaller than this are treated as flat during the pre-scan.
const SCAN_NOISE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    /// Pre-scan was unimodal; golden-section search over the full interval.
    GoldenSection,
    /// Pre-scan was not unimodal; golden-section search inside the best grid
    /// cell only.
    GridFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult<T> {
    pub x_star: T,
    pub f_star: T,
    pub evaluations: usize,
    pub method: SearchMethod,
}

/// Counts evaluations and rejects non-finite objective values.
struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F> Counted<F> {
    fn eval<T: Real>(&mut self, x: T) -> Result<T>
    where
        F: FnMut(T) -> Result<T>,
    {
        self.evaluations += 1;
        let y = (self.f)(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteObjective { x: x.as_f64() })
        }
    }
}

/// Maximizes `f` on `[lo, hi]`. See [`try_maximize_scalar`].
pub fn maximize_scalar<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<OptimizationResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    try_maximize_scalar(|x| Ok(f(x)), lo, hi, tol)
}

/// Maximizes a fallible objective on `[lo, hi]`.
///
/// A [`PRESCAN_POINTS`]-point grid is evaluated first. If its discrete
/// differences change sign at most once (rising then falling, ignoring
/// differences below `1e-12`) golden-section search runs over the whole
/// interval; otherwise it is confined to the neighbourhood of the best grid
/// point. The returned point is never worse than any grid point, and ties go
/// to the smaller `x`.
pub fn try_maximize_scalar<T, F>(f: F, lo: T, hi: T, tol: T) -> Result<OptimizationResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInterval {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    if tol.is_nan() || tol <= T::zero() {
        return Err(Error::OutOfDomain {
            name: "tol",
            value: tol.as_f64(),
            domain: "(0, ∞)",
        });
    }
    let mut f = Counted { f, evaluations: 0 };

    let steps = T::from_count(PRESCAN_POINTS - 1);
    let grid: Vec<T> = (0..PRESCAN_POINTS)
        .map(|i| {
            if i == PRESCAN_POINTS - 1 {
                hi
            } else {
                lo + (hi - lo) * T::from_count(i) / steps
            }
        })
        .collect();
    let values = grid.iter().map(|&x| f.eval(x)).collect::<Result<Vec<T>>>()?;

    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }

    let (method, a, b) = if is_unimodal(&values) {
        (SearchMethod::GoldenSection, lo, hi)
    } else {
        let a = grid[best.saturating_sub(1)];
        let b = grid[(best + 1).min(PRESCAN_POINTS - 1)];
        (SearchMethod::GridFallback, a, b)
    };

    let (x_gold, f_gold) = golden_section(&mut f, a, b, tol)?;
    let (x_star, f_star) = if f_gold > values[best] || (f_gold == values[best] && x_gold < grid[best]) {
        (x_gold, f_gold)
    } else {
        (grid[best], values[best])
    };

    Ok(OptimizationResult {
        x_star,
        f_star,
        evaluations: f.evaluations,
        method,
    })
}

fn is_unimodal<T: Real>(values: &[T]) -> bool {
    let noise = T::tolerance(SCAN_NOISE);
    let mut falling = false;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d < -noise {
            falling = true;
        } else if d > noise && falling {
            return false;
        }
    }
    true
}

fn golden_section<T, F>(f: &mut Counted<F>, mut a: T, mut b: T, tol: T) -> Result<(T, T)>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    // 1/φ
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = f.eval(c)?;
    let mut fd = f.eval(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f.eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f.eval(d)?;
        }
    }
    let x = (a + b) / T::lit(2.0);
    Ok((x, f.eval(x)?))
}

/// Quantity maximized by [`optimize_single_bs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Probability,
    Fidelity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedSingleBs<T> {
    pub reflectivity: T,
    pub outcome: SingleBsOutcome<T>,
    pub search: OptimizationResult<T>,
}

/// Chooses the reflectivity in `[0, 1]` maximizing the success probability
/// or the fidelity with `Ê⁺|α⟩`.
pub fn optimize_single_bs<T: Real>(
    alpha: Amplitude<T>,
    eta: T,
    objective: Objective,
) -> Result<OptimizedSingleBs<T>> {
    check_probability("eta", eta)?;
    let setup = AdditionSetup::new(alpha)?;
    optimize_single_bs_with(&setup, eta, objective)
}

/// [`optimize_single_bs`] with a prepared input.
pub fn optimize_single_bs_with<T: Real>(
    setup: &AdditionSetup<T>,
    eta: T,
    objective: Objective,
) -> Result<OptimizedSingleBs<T>> {
    let score = |o: &SingleBsOutcome<T>| match objective {
        Objective::Probability => o.p_success,
        Objective::Fidelity => o.fidelity_vs_bare,
    };
    let search = try_maximize_scalar(
        |r| setup.run(r, eta).map(|o| score(&o)),
        T::zero(),
        T::one(),
        T::tolerance(DEFAULT_TOL),
    )?;
    let outcome = setup.run(search.x_star, eta)?;
    Ok(OptimizedSingleBs {
        reflectivity: search.x_star,
        outcome,
        search,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{closed_form_p0, optimal_reflectivity};
    use num_complex::Complex;
    use std::f64::consts::E;

    #[test]
    fn quadratic_peak() {
        let res = maximize_scalar(|x: f64| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-9).unwrap();
        assert!((res.x_star - 0.3).abs() < 1e-9, "{}", res.x_star);
        assert_eq!(res.method, SearchMethod::GoldenSection);
        assert_eq!(res.f_star, -(res.x_star - 0.3) * (res.x_star - 0.3));
        assert!(res.evaluations > PRESCAN_POINTS);
    }

    #[test]
    fn closed_form_peak_matches_analytic_optimum() {
        let res = maximize_scalar(|r: f64| closed_form_p0(4.0, r), 0.0, 1.0, 1e-9).unwrap();
        assert!((res.x_star - optimal_reflectivity(4.0)).abs() < 1e-6);
        assert!((res.x_star - 0.798145).abs() < 1e-6);
    }

    #[test]
    fn plateau_breaks_ties_low() {
        let res = maximize_scalar(|_x: f64| 2.5, -1.0, 3.0, 1e-9).unwrap();
        assert_eq!(res.x_star, -1.0);
        assert_eq!(res.f_star, 2.5);
    }

    #[test]
    fn boundary_maximum() {
        let res = maximize_scalar(|x: f64| x, 0.0, 1.0, 1e-9).unwrap();
        assert_eq!(res.x_star, 1.0);
    }

    #[test]
    fn bimodal_uses_fallback() {
        // taller peak at 0.8, decoy at 0.2
        let f = |x: f64| (-(x - 0.2).powi(2) * 200.0).exp() + 1.5 * (-(x - 0.8).powi(2) * 200.0).exp();
        let res = maximize_scalar(f, 0.0, 1.0, 1e-9).unwrap();
        assert_eq!(res.method, SearchMethod::GridFallback);
        assert!((res.x_star - 0.8).abs() < 1e-4, "{}", res.x_star);
    }

    #[test]
    fn non_finite_objective_reports_location() {
        let err = maximize_scalar(|x: f64| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, 1e-9).unwrap_err();
        match err {
            Error::NonFiniteObjective { x } => assert!(x > 0.5 && x <= 0.501),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_interval_rejected() {
        assert!(maximize_scalar(|x: f64| x, 1.0, 1.0, 1e-9).is_err());
        assert!(maximize_scalar(|x: f64| x, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn bracketing_against_prescan() {
        let f = |x: f64| (3.0 * x).sin() * (-x).exp();
        let res = maximize_scalar(f, 0.0, 2.0, 1e-9).unwrap();
        for i in 0..PRESCAN_POINTS {
            let x = 2.0 * i as f64 / (PRESCAN_POINTS - 1) as f64;
            assert!(res.f_star >= f(x));
        }
    }

    #[test]
    fn probability_optimum_matches_analytic() {
        let opt = optimize_single_bs(Complex::new(2.0f64, 0.0), 1.0, Objective::Probability).unwrap();
        assert!((opt.reflectivity - optimal_reflectivity(4.0)).abs() < 1e-6);
    }

    #[test]
    fn fidelity_and_probability_optima_coincide_at_alpha_three() {
        let alpha = Complex::new(3.0f64, 0.0);
        let p = optimize_single_bs(alpha, 1.0, Objective::Probability).unwrap();
        let f = optimize_single_bs(alpha, 1.0, Objective::Fidelity).unwrap();
        assert!((p.reflectivity - f.reflectivity).abs() < 0.02);
    }

    #[test]
    fn carburettor_limit_at_alpha_ten() {
        let opt = optimize_single_bs(Complex::new(10.0, 0.0), 1.0, Objective::Probability).unwrap();
        let p = opt.outcome.p_success;
        assert!((1.0 / E..=1.0 / E + 0.01).contains(&p), "{p}");
    }

    #[test]
    fn repeated_calls_are_bit_identical() {
        let alpha = Complex::new(1.1, 0.0);
        let a = optimize_single_bs(alpha, 0.8, Objective::Fidelity).unwrap();
        let b = optimize_single_bs(alpha, 0.8, Objective::Fidelity).unwrap();
        assert_eq!(a, b);
    }
}
