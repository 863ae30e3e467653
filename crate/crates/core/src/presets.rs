//! Built-in scenarios reproducing the worked examples, each with the curve
//! it plots over the `x = -ln y` grid and the sign or monotonicity that the
//! curve is claimed to show.

use rayon::prelude::*;
use serde::Serialize;

use crate::conditions::{TheoremId, TheoremSpec};
use crate::error::{Error, Result};
use crate::orders::UNDERFLOW;
use crate::scenario::{Level, Scenario, StructureSpec, SystemSpec, ThetaSpec, SCHEMA_VERSION};
use crate::shape::{monotone_margin, Direction, MONOTONE_TOL};
use crate::systems::{EvalGrid, Lifetime, Provenance, RedundantSystem, SurvivalCurve};

/// Curve drawn for a preset; A is `systems[0]`, B is `systems[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Plotted {
    /// `sf_B - sf_A`
    SfDifference,
    /// `sf_B / sf_A`
    SfRatio,
    /// `F_B / F_A`
    CdfRatio,
    /// `f_A / f_B`
    PdfRatio,
    /// `Σ_j rh(t; b_j)` over the blocks of A.
    SumRevHazard,
    /// Reversed hazard of A.
    RevHazard,
}

impl Plotted {
    pub fn description(&self) -> &'static str {
        match self {
            Plotted::SfDifference => "sf_B - sf_A",
            Plotted::SfRatio => "sf_B / sf_A",
            Plotted::CdfRatio => "cdf_B / cdf_A",
            Plotted::PdfRatio => "pdf_A / pdf_B",
            Plotted::SumRevHazard => "sum of block reversed hazards of A",
            Plotted::RevHazard => "reversed hazard of A",
        }
    }
}

/// Property the plotted curve is claimed to have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    NonNegative,
    NonPositive,
    /// Values of both signs with magnitude above 1e-4.
    BothSigns,
    Nondecreasing,
    Nonincreasing,
}

/// Absolute tolerance of the sign claims.
pub const SIGN_TOL: f64 = 1e-9;
/// Magnitude both signs must reach for [`Claim::BothSigns`].
pub const BOTH_SIGNS_MAGNITUDE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: &'static str,
    pub title: &'static str,
    pub scenario: Scenario,
    pub plotted: Plotted,
    pub claim: Claim,
}

pub const IDS: [&str; 12] =
    ["ex3.1", "ex3.2", "ex3.3", "ex3.4", "ex3.5", "ex3.6", "ex3.7", "ex3.8", "ex4.1", "ex4.2", "ex4.3", "ex4.4"];

fn component(b: &[f64], theta: f64) -> SystemSpec {
    SystemSpec { level: Level::Component, b: b.to_vec(), theta: ThetaSpec::Scalar(theta) }
}

fn system(b: &[f64], theta: &[f64]) -> SystemSpec {
    SystemSpec { level: Level::System, b: b.to_vec(), theta: ThetaSpec::PerSubsystem(theta.to_vec()) }
}

#[allow(clippy::too_many_arguments)]
fn scenario(
    family: &str,
    alpha: Option<f64>,
    structure: StructureSpec,
    copula: &str,
    systems: Vec<SystemSpec>,
    theta_range: Option<[f64; 2]>,
    theorem: Option<TheoremSpec>,
) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        family: family.into(),
        alpha,
        structure,
        copula: copula.into(),
        systems,
        theta_range,
        grid: None,
        theorem,
        pool: None,
    }
}

const B_31: [f64; 4] = [1.2, 0.5, 0.4, 0.2];
const B_31_STAR: [f64; 4] = [1.0, 0.5, 0.3, 0.2];
const B_33: [f64; 4] = [0.05, 0.05, 0.04, 0.02];
const B_33_STAR: [f64; 4] = [0.06, 0.05, 0.03, 0.02];
const B_35: [f64; 4] = [0.5, 0.5, 0.4, 0.2];
const B_35_STAR: [f64; 4] = [0.6, 0.5, 0.3, 0.2];

/// Looks up a preset by id (`ex3.1` … `ex4.4`).
pub fn preset(id: &str) -> Result<Preset> {
    use StructureSpec::{KOfN, PathSets};
    let k34 = || KOfN([3, 4]);
    let k23 = || KOfN([2, 3]);
    let parallel_series = || PathSets(vec![vec![1], vec![2, 3, 4]]);
    let thm = |id| Some(TheoremSpec::primary(id));
    let (title, scenario, plotted, claim) = match id {
        "ex3.1" => (
            "Lomax spares, Gumbel 3-of-4: st order",
            scenario(
                "lomax",
                None,
                k34(),
                "gumbel",
                vec![component(&B_31, 20.0), component(&B_31_STAR, 25.0)],
                Some([15.0, 30.0]),
                thm(TheoremId::T3_1),
            ),
            Plotted::SfDifference,
            Claim::NonNegative,
        ),
        "ex3.2" => (
            "Generalized exponential spares, Clayton parallel-series: reversed st order",
            scenario(
                "generalized_exponential",
                None,
                parallel_series(),
                "clayton",
                vec![component(&B_31, 3.0), component(&B_31_STAR, 4.0)],
                Some([2.0, 10.0]),
                thm(TheoremId::T3_2),
            ),
            Plotted::SfDifference,
            Claim::NonPositive,
        ),
        "ex3.3" => (
            "Inverted exponential spares, Gumbel 3-of-4: hr order",
            scenario(
                "inverted_exponential",
                None,
                k34(),
                "gumbel",
                vec![component(&B_33, 6.0), component(&B_33_STAR, 7.0)],
                Some([5.0, 20.0]),
                thm(TheoremId::T3_3),
            ),
            Plotted::SfRatio,
            Claim::Nondecreasing,
        ),
        "ex3.4" => (
            "Inverted exponential spares, Gumbel 3-of-4: reversed hr order",
            scenario(
                "inverted_exponential",
                None,
                k34(),
                "gumbel",
                vec![component(&B_33, 10.0), component(&B_33_STAR, 7.0)],
                Some([5.0, 20.0]),
                thm(TheoremId::T3_4),
            ),
            Plotted::SfRatio,
            Claim::Nonincreasing,
        ),
        "ex3.5" => (
            "Pareto I spares, Gumbel 3-of-4: rh order",
            scenario(
                "pareto1",
                Some(1.5),
                k34(),
                "gumbel",
                vec![component(&B_35, 20.0), component(&B_35_STAR, 25.0)],
                Some([15.0, 30.0]),
                thm(TheoremId::T3_5),
            ),
            Plotted::CdfRatio,
            Claim::Nondecreasing,
        ),
        "ex3.6" => (
            "Generalized exponential spares, Gumbel 3-of-4: reversed rh order",
            scenario(
                "generalized_exponential",
                None,
                k34(),
                "gumbel",
                vec![component(&B_35, 20.0), component(&B_35_STAR, 15.0)],
                Some([15.0, 30.0]),
                thm(TheoremId::T3_6),
            ),
            Plotted::CdfRatio,
            Claim::Nonincreasing,
        ),
        "ex3.7" => (
            "Inverted exponential spares, Clayton parallel-series: lr order",
            scenario(
                "inverted_exponential",
                None,
                parallel_series(),
                "clayton",
                vec![component(&B_33, 7.0), component(&B_33_STAR, 6.0)],
                Some([5.0, 10.0]),
                thm(TheoremId::T3_7),
            ),
            Plotted::PdfRatio,
            Claim::Nonincreasing,
        ),
        "ex3.8" => (
            "Weibull spares, Clayton 2-of-3: DRHR system",
            scenario(
                "weibull",
                None,
                k23(),
                "clayton",
                vec![component(&[1.6, 0.5, 0.3, 0.2], 15.0)],
                Some([15.0, 30.0]),
                thm(TheoremId::T3_8),
            ),
            Plotted::SumRevHazard,
            Claim::Nonincreasing,
        ),
        "ex4.1" => (
            "Rayleigh matching spare, Clayton 3-of-4: system- vs component-level redundancy",
            scenario(
                "rayleigh",
                None,
                k34(),
                "clayton",
                vec![system(&[1.5, 1.5], &[8.5, 8.5]), component(&[1.5, 1.5], 8.5)],
                None,
                None,
            ),
            Plotted::SfDifference,
            Claim::BothSigns,
        ),
        "ex4.2" => (
            "Lomax subsystems, Gumbel 3-of-4: system-level st order",
            scenario(
                "lomax",
                None,
                k34(),
                "gumbel",
                vec![
                    system(&[0.9, 0.4, 0.1, 0.08], &[20.0, 21.0, 22.0, 23.0]),
                    system(&[0.9, 0.5, 0.05, 0.03], &[20.0, 21.0, 22.0, 23.0]),
                ],
                Some([15.0, 30.0]),
                thm(TheoremId::T4_1),
            ),
            Plotted::SfDifference,
            Claim::NonNegative,
        ),
        "ex4.3" => (
            "Shifted exponential subsystems, Clayton 2-of-3: system-level rh order",
            scenario(
                "shifted_exponential",
                None,
                k23(),
                "clayton",
                vec![system(&[0.5, 0.5, 0.5, 0.4], &[2.0; 4]), system(&[0.9, 0.5, 0.3, 0.2], &[2.0; 4])],
                None,
                thm(TheoremId::T4_3),
            ),
            Plotted::CdfRatio,
            Claim::Nondecreasing,
        ),
        "ex4.4" => (
            "Pareto I subsystems, Clayton 3-of-4: DRHR system",
            scenario(
                "pareto1",
                Some(1.5),
                k34(),
                "clayton",
                vec![system(&[0.5, 0.4, 0.3, 0.2], &[2.0, 3.0, 4.0, 5.0])],
                None,
                thm(TheoremId::T4_4),
            ),
            Plotted::RevHazard,
            Claim::Nonincreasing,
        ),
        other => {
            return Err(Error::Parameter(format!("unknown example `{other}`; expected one of {}", IDS.join(", "))))
        }
    };
    Ok(Preset { id: IDS.iter().find(|&&k| k == id).expect("known id"), title, scenario, plotted, claim })
}

pub fn all() -> Vec<Preset> {
    IDS.iter().map(|id| preset(id).expect("built-in preset")).collect()
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (num > UNDERFLOW && den > UNDERFLOW).then(|| num / den)
}

/// Evaluates the plotted quantity of `scenario` on `grid`. Ratio curves
/// skip points outside the common support or where a side underflows.
pub fn plotted_curve(scenario: &Scenario, plotted: Plotted, grid: &EvalGrid) -> Result<SurvivalCurve> {
    let a = scenario.build_system(0)?;
    let b = match plotted {
        Plotted::SumRevHazard | Plotted::RevHazard => None,
        _ => Some(scenario.build_system(1)?),
    };
    let start = a.support_start().max(b.as_ref().map_or(0.0, |b| b.support_start()));
    let grid = match plotted {
        Plotted::SfDifference | Plotted::SfRatio => grid.clone(),
        _ => grid.after(start),
    };
    let points = grid
        .times()
        .par_iter()
        .zip(grid.ys())
        .map(|(&t, &y)| {
            let v = match (plotted, &b) {
                (Plotted::SfDifference, Some(b)) => Some(b.sf(t)? - a.sf(t)?),
                (Plotted::SfRatio, Some(b)) => ratio(b.sf(t)?, a.sf(t)?),
                (Plotted::CdfRatio, Some(b)) => ratio(b.cdf(t)?, a.cdf(t)?),
                (Plotted::PdfRatio, Some(b)) => ratio(a.pdf(t)?, b.pdf(t)?),
                (Plotted::SumRevHazard, _) => Some(sum_block_rev_hazard(&a, t)?),
                (Plotted::RevHazard, _) => Some(a.rev_hazard(t)?),
                _ => unreachable!("pair curves always build system B"),
            };
            Ok(v.map(|v| (y, t, v)))
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64, f64)> = points.into_iter().flatten().collect();
    Ok(SurvivalCurve {
        y: points.iter().map(|p| p.0).collect(),
        x: points.iter().map(|p| p.1).collect(),
        value: points.iter().map(|p| p.2).collect(),
        stderr: None,
        provenance: Provenance::ClosedForm,
    })
}

fn sum_block_rev_hazard(sys: &RedundantSystem, t: f64) -> Result<f64> {
    let family = sys.family();
    sys.b().iter().map(|&b| crate::distributions::LifetimeModel::new(family, b)?.rev_hazard(t)).sum()
}

/// Margin by which `values` satisfy `claim` (negative when violated).
pub fn claim_margin(claim: Claim, values: &[f64]) -> f64 {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    match claim {
        Claim::NonNegative => min,
        Claim::NonPositive => -max,
        Claim::BothSigns => (-min).min(max) - BOTH_SIGNS_MAGNITUDE,
        Claim::Nondecreasing => monotone_margin(values, Direction::Increasing).0,
        Claim::Nonincreasing => monotone_margin(values, Direction::Decreasing).0,
    }
}

/// Whether `values` satisfy `claim` within tolerance.
pub fn claim_holds(claim: Claim, values: &[f64]) -> bool {
    if values.len() < 2 {
        return false;
    }
    let m = claim_margin(claim, values);
    match claim {
        Claim::NonNegative | Claim::NonPositive => m >= -SIGN_TOL,
        Claim::BothSigns => m > 0.0,
        Claim::Nondecreasing | Claim::Nonincreasing => m >= -MONOTONE_TOL,
    }
}

impl Preset {
    pub fn curve(&self, grid: &EvalGrid) -> Result<SurvivalCurve> {
        plotted_curve(&self.scenario, self.plotted, grid)
    }
}
