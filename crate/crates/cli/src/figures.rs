//! Figure datasets. Each figure has fixed columns, default parameters, and
//! an allowlist of overridable parameters.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt;
use std::path::PathBuf;

use carburettor::{
    bare_raise, characterization_curve, coherent, do_nothing_fidelity, failed_branch, fidelity,
    optimal_reflectivity, optimize_single_bs, photon_distribution, run_cascade_with, run_single_bs,
    std_raise, AdditionSetup, Amplitude64, Objective,
};
use clap::ValueEnum;
use rayon::prelude::*;

use crate::{CliError, Format};

/// Reflectivity used when studying inefficient detectors.
pub const INEFFICIENT_REFLECTIVITY: f64 = 0.869;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FigureName {
    /// Photon-number populations of |α⟩, a†|α⟩ and Ê⁺|α⟩
    Pncompare,
    /// Optimal reflectivity and success probability against α
    Prob,
    /// Fidelity of the scheme and of a† with Ê⁺|α⟩
    Fid,
    /// Success probability at fixed reflectivity for several efficiencies
    EtaCurves,
    /// Scheme against do-nothing fidelity with inefficient detectors
    Basefid,
    /// Two-stage cascade over a reflectivity grid
    CascadeScatter,
    /// Zero-count probability against α for highly reflecting beamsplitters
    Characbs,
    /// Photon-number distribution after a single count
    Pnfail,
}

impl FigureName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pncompare => "pncompare",
            Self::Prob => "prob",
            Self::Fid => "fid",
            Self::EtaCurves => "eta_curves",
            Self::Basefid => "basefid",
            Self::CascadeScatter => "cascade_scatter",
            Self::Characbs => "characbs",
            Self::Pnfail => "pnfail",
        }
    }

    /// Parameters this figure accepts.
    pub fn allowed(self) -> &'static [Param] {
        use Param::*;
        match self {
            Self::Pncompare => &[Grid],
            Self::Prob => &[AlphaMax, Eta, Grid],
            Self::Fid => &[AlphaMax, Grid],
            Self::EtaCurves => &[AlphaMax, RSq, Grid],
            Self::Basefid => &[AlphaMax, RSq, Grid],
            Self::CascadeScatter => &[Eta, Grid],
            Self::Characbs => &[AlphaMax, Eta, Grid],
            Self::Pnfail => &[RSq, Grid],
        }
    }
}

impl fmt::Display for FigureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Param {
    AlphaMax,
    Eta,
    RSq,
    Grid,
}

impl Param {
    pub fn key(self) -> &'static str {
        match self {
            Self::AlphaMax => "alpha_max",
            Self::Eta => "eta",
            Self::RSq => "r_sq",
            Self::Grid => "grid",
        }
    }

    pub fn flag(self) -> String {
        format!("--{}", self.key().replace('_', "-"))
    }

    fn from_key(key: &str) -> Option<Self> {
        [Self::AlphaMax, Self::Eta, Self::RSq, Self::Grid]
            .into_iter()
            .find(|p| p.key() == key)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureRequest {
    pub figure: FigureName,
    /// Overrides keyed by `alpha_max`, `eta`, `r_sq` or `grid`.
    pub params: BTreeMap<String, f64>,
    pub out_path: PathBuf,
    pub format: Format,
}

/// Validated parameter values, defaults filled in per figure.
#[derive(Debug, Clone, Copy)]
struct Params {
    alpha_max: f64,
    eta: f64,
    r_sq: Option<f64>,
    grid: usize,
}

impl FigureRequest {
    fn params(&self) -> Result<Params, CliError> {
        let allowed = self.figure.allowed();
        let mut given = BTreeMap::new();
        for (key, &value) in &self.params {
            let param = Param::from_key(key)
                .filter(|p| allowed.contains(p))
                .ok_or_else(|| CliError::UnknownParam {
                    figure: self.figure,
                    key: key.clone(),
                    allowed: allowed.iter().map(|p| p.flag()).collect::<Vec<_>>().join(", "),
                })?;
            given.insert(param, value);
        }
        let (alpha_max, grid) = match self.figure {
            FigureName::Pncompare | FigureName::Pnfail => (0.0, 10),
            FigureName::Prob => (10.0, 100),
            FigureName::Fid => (7.0, 70),
            FigureName::EtaCurves => (4.0, 80),
            FigureName::Basefid => (2.0, 100),
            FigureName::CascadeScatter => (0.0, 50),
            FigureName::Characbs => (40.0, 400),
        };
        let p = Params {
            alpha_max: given.get(&Param::AlphaMax).copied().unwrap_or(alpha_max),
            eta: given.get(&Param::Eta).copied().unwrap_or(1.0),
            r_sq: given.get(&Param::RSq).copied(),
            grid: match given.get(&Param::Grid) {
                None => grid,
                Some(&g) if g.fract() == 0.0 && (1.0..=1e6).contains(&g) => g as usize,
                Some(&g) => return Err(invalid("grid", g, "a whole number in [1, 1000000]")),
            },
        };
        if allowed.contains(&Param::AlphaMax) && !(p.alpha_max.is_finite() && p.alpha_max > 0.0) {
            return Err(invalid("alpha_max", p.alpha_max, "(0, ∞)"));
        }
        if !(0.0..=1.0).contains(&p.eta) {
            return Err(invalid("eta", p.eta, "[0, 1]"));
        }
        if let Some(r) = p.r_sq {
            if !(0.0..=1.0).contains(&r) {
                return Err(invalid("r_sq", r, "[0, 1]"));
            }
        }
        if self.figure == FigureName::CascadeScatter && p.grid < 2 {
            return Err(invalid("grid", p.grid as f64, "≥ 2 for cascade_scatter"));
        }
        Ok(p)
    }
}

fn invalid(key: &'static str, value: f64, domain: &'static str) -> CliError {
    CliError::InvalidParam { key, value, domain }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub figure: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

fn real(x: f64) -> Amplitude64 {
    Amplitude64::new(x, 0.0)
}

/// `grid + 1` evenly spaced points on `[0, max]`.
fn sweep(max: f64, grid: usize) -> Vec<f64> {
    (0..=grid).map(|i| max * i as f64 / grid as f64).collect()
}

fn padded(mut v: Vec<f64>, len: usize) -> Vec<f64> {
    v.resize(len, 0.0);
    v
}

/// Validates the request and computes its dataset. Nothing is written.
pub fn compute(req: &FigureRequest) -> Result<Dataset, CliError> {
    let p = req.params()?;
    let (columns, rows) = match req.figure {
        FigureName::Pncompare => pncompare(p)?,
        FigureName::Prob => prob(p)?,
        FigureName::Fid => fid(p)?,
        FigureName::EtaCurves => eta_curves(p)?,
        FigureName::Basefid => basefid(p)?,
        FigureName::CascadeScatter => cascade_scatter(p)?,
        FigureName::Characbs => characbs(p)?,
        FigureName::Pnfail => pnfail(p)?,
    };
    Ok(Dataset {
        figure: req.figure.as_str(),
        columns,
        rows,
    })
}

type Table = (Vec<&'static str>, Vec<Vec<f64>>);

fn pncompare(p: Params) -> Result<Table, CliError> {
    let coh = coherent(real(1.0))?;
    let len = p.grid + 1;
    let c = padded(photon_distribution(&coh)?, len);
    let s = padded(photon_distribution(&std_raise(&coh).normalized()?)?, len);
    let b = padded(photon_distribution(&bare_raise(&coh))?, len);
    let rows = (0..len).map(|n| vec![n as f64, c[n], s[n], b[n]]).collect();
    Ok((vec!["n", "coherent", "std_raise", "bare_raise"], rows))
}

fn prob(p: Params) -> Result<Table, CliError> {
    let rows = sweep(p.alpha_max, p.grid)
        .into_par_iter()
        .map(|a| {
            let r = optimal_reflectivity(a * a);
            let out = run_single_bs(real(a), r, p.eta)?;
            Ok(vec![a, r, out.p_success])
        })
        .collect::<Result<_, CliError>>()?;
    Ok((vec!["alpha", "r_opt_sq", "p_success"], rows))
}

fn fid(p: Params) -> Result<Table, CliError> {
    let rows = sweep(p.alpha_max, p.grid)
        .into_par_iter()
        .map(|a| {
            let opt = optimize_single_bs(real(a), 1.0, Objective::Fidelity)?;
            let coh = coherent(real(a))?;
            let f_std = fidelity(&std_raise(&coh).normalized()?, &bare_raise(&coh))?;
            Ok(vec![a, opt.outcome.fidelity_vs_bare, f_std])
        })
        .collect::<Result<_, CliError>>()?;
    Ok((vec!["alpha", "fid_bare_impl", "fid_std_raise"], rows))
}

fn eta_curves(p: Params) -> Result<Table, CliError> {
    let r = p.r_sq.unwrap_or(INEFFICIENT_REFLECTIVITY);
    let points: Vec<(f64, f64)> = [1.0, 0.8, 0.6, 0.4]
        .into_iter()
        .flat_map(|eta| sweep(p.alpha_max, p.grid).into_iter().map(move |a| (eta, a)))
        .collect();
    let rows = points
        .into_par_iter()
        .map(|(eta, a)| Ok(vec![a, r, eta, run_single_bs(real(a), r, eta)?.p_success]))
        .collect::<Result<_, CliError>>()?;
    Ok((vec!["alpha", "r_sq", "eta", "p_success"], rows))
}

fn basefid(p: Params) -> Result<Table, CliError> {
    let r = p.r_sq.unwrap_or(INEFFICIENT_REFLECTIVITY);
    let points: Vec<(f64, f64)> = [0.8, 0.6, 0.4]
        .into_iter()
        .flat_map(|eta| sweep(p.alpha_max, p.grid).into_iter().map(move |a| (eta, a)))
        .collect();
    let rows = points
        .into_par_iter()
        .map(|(eta, a)| {
            let base = do_nothing_fidelity(real(a))?;
            let scheme = run_single_bs(real(a), r, eta)?;
            Ok(vec![a, r, eta, base, scheme.fidelity_vs_bare])
        })
        .collect::<Result<_, CliError>>()?;
    Ok((vec!["alpha", "r_sq", "eta", "fid_do_nothing", "fid_scheme"], rows))
}

fn cascade_scatter(p: Params) -> Result<Table, CliError> {
    let axis: Vec<f64> = (0..p.grid)
        .map(|i| 0.01 + 0.98 * i as f64 / (p.grid - 1) as f64)
        .collect();
    let mut rows = Vec::new();
    for alpha in [1.0, SQRT_2, 2.0, 3.0] {
        let setup = AdditionSetup::new(real(alpha))?;
        let pairs: Vec<(f64, f64)> = axis
            .iter()
            .flat_map(|&r1| axis.iter().map(move |&r2| (r1, r2)))
            .collect();
        let block: Vec<Vec<f64>> = pairs
            .into_par_iter()
            .map(|(r1, r2)| {
                let out = run_cascade_with(&setup, r1, r2, p.eta)?;
                Ok(vec![alpha, r1, r2, out.p_total, out.f_mean])
            })
            .collect::<Result<_, CliError>>()?;
        rows.extend(block);
    }
    Ok((vec!["alpha", "r1_sq", "r2_sq", "p_total", "f_mean"], rows))
}

fn characbs(p: Params) -> Result<Table, CliError> {
    let alphas = sweep(p.alpha_max, p.grid);
    let curves = [0.9, 0.95, 0.99, 0.999]
        .into_par_iter()
        .map(|r| Ok(characterization_curve(r, &alphas, p.eta)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows = curves
        .into_iter()
        .flatten()
        .map(|pt| vec![pt.reflectivity, pt.alpha, pt.p_zero_counts])
        .collect();
    Ok((vec!["r_sq", "alpha", "p_zero_counts"], rows))
}

fn pnfail(p: Params) -> Result<Table, CliError> {
    let alpha = 2.0;
    let r = p.r_sq.unwrap_or_else(|| optimal_reflectivity(alpha * alpha));
    let state = failed_branch(real(alpha), r)?.into_state()?;
    let dist = padded(photon_distribution(&state.normalized()?)?, p.grid + 1);
    let rows = dist.into_iter().enumerate().map(|(n, q)| vec![n as f64, q]).collect();
    Ok((vec!["n", "probability"], rows))
}
