//! Numerical checks of the sufficient conditions under which two spare
//! allocations are stochastically ordered, and of the aging-class results.
//!
//! Every condition quantified over `u`, `θ`, `b` or `t` is checked on a
//! finite grid and reported with its worst point and margin. A negative
//! margin beyond [`MONOTONE_TOL`] fails the condition.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copulas::CopulaFamily;
use crate::distributions::{check_b_grid, LifetimeFamily, LifetimeModel};
use crate::error::{check_len, Error, Result};
use crate::orders::{check_order, partial_sum_margin, tol_for, OrderKind, OrderVerdict, Relation};
use crate::prob::UnitValue;
use crate::scenario::{Level, Scenario, SystemSpec};
use crate::shape::{convexity_margin, linspace, monotone_margin, Direction, MONOTONE_TOL};
use crate::structure::{CoherentStructure, Distortion};
use crate::systems::{EvalGrid, Lifetime};

pub const U_POINTS: usize = 400;
pub const U_MIN: f64 = 0.01;
pub const U_MAX: f64 = 0.99;
pub const THETA_POINTS: usize = 20;
pub const B_POINTS: usize = 20;

/// Scalar functions of a distortion that enter the conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RatioKind {
    /// `(1 - u) q'(u) / q(u)`
    R1,
    /// `(1 - u) q'(u) / (1 - q(u))`
    R2,
    /// `(1 - u) q''(u) / q'(u) - 1`
    R3,
    /// `u q'(u) / (1 - q(u))`
    R4,
}

impl RatioKind {
    pub const ALL: [RatioKind; 4] = [RatioKind::R1, RatioKind::R2, RatioKind::R3, RatioKind::R4];

    pub fn name(&self) -> &'static str {
        match self {
            RatioKind::R1 => "r1",
            RatioKind::R2 => "r2",
            RatioKind::R3 => "r3",
            RatioKind::R4 => "r4",
        }
    }

    fn at(self, u: UnitValue, e: &crate::structure::DistortionEval) -> Result<f64> {
        let (num, den) = match self {
            RatioKind::R1 => (u.complement() * e.dq, e.q),
            RatioKind::R2 => (u.complement() * e.dq, e.q_bar),
            RatioKind::R3 => (u.complement() * e.d2q, e.dq),
            RatioKind::R4 => (u.value() * e.dq, e.q_bar),
        };
        if den == 0.0 {
            return Err(Error::Pole(format!("{} at u = {} has a zero denominator", self.name(), u.value())));
        }
        Ok(if self == RatioKind::R3 { num / den - 1.0 } else { num / den })
    }
}

/// Evaluates one of the ratios at `u ∈ (0, 1)`.
pub fn ratio_q(kind: RatioKind, d: &Distortion, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("ratio {} needs 0 < u < 1, got {u}", kind.name())));
    }
    let uv = UnitValue::from_value(u);
    kind.at(uv, &d.eval(uv)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    T3_1,
    T3_2,
    T3_3,
    T3_4,
    T3_5,
    T3_6,
    T3_7,
    T3_8,
    T4_1,
    T4_2,
    T4_3,
    T4_4,
}

impl TheoremId {
    pub const ALL: [TheoremId; 12] = [
        TheoremId::T3_1,
        TheoremId::T3_2,
        TheoremId::T3_3,
        TheoremId::T3_4,
        TheoremId::T3_5,
        TheoremId::T3_6,
        TheoremId::T3_7,
        TheoremId::T3_8,
        TheoremId::T4_1,
        TheoremId::T4_2,
        TheoremId::T4_3,
        TheoremId::T4_4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::T3_1 => "T3_1",
            TheoremId::T3_2 => "T3_2",
            TheoremId::T3_3 => "T3_3",
            TheoremId::T3_4 => "T3_4",
            TheoremId::T3_5 => "T3_5",
            TheoremId::T3_6 => "T3_6",
            TheoremId::T3_7 => "T3_7",
            TheoremId::T3_8 => "T3_8",
            TheoremId::T4_1 => "T4_1",
            TheoremId::T4_2 => "T4_2",
            TheoremId::T4_3 => "T4_3",
            TheoremId::T4_4 => "T4_4",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parameter(format!("unknown theorem `{name}`")))
    }

    /// Whether a bracketed second checklist with the opposite direction
    /// exists.
    pub fn has_dual(&self) -> bool {
        matches!(self, TheoremId::T3_3 | TheoremId::T3_4 | TheoremId::T3_5 | TheoremId::T3_6 | TheoremId::T3_7)
    }

    /// Redundancy level of the systems the theorem talks about.
    pub fn level(&self) -> Level {
        match self {
            TheoremId::T4_1 | TheoremId::T4_2 | TheoremId::T4_3 | TheoremId::T4_4 => Level::System,
            _ => Level::Component,
        }
    }

    /// Whether the theorem compares two systems (as opposed to an aging
    /// class of one).
    pub fn is_pair(&self) -> bool {
        !matches!(self, TheoremId::T3_8 | TheoremId::T4_4)
    }
}

/// A theorem and which of its bracketed checklists to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremSpec {
    pub id: TheoremId,
    #[serde(default)]
    pub dual: bool,
}

impl TheoremSpec {
    pub fn primary(id: TheoremId) -> Self {
        TheoremSpec { id, dual: false }
    }

    pub fn dual(id: TheoremId) -> Self {
        TheoremSpec { id, dual: true }
    }

    /// Primary and, where it exists, dual checklist.
    pub fn variants(id: TheoremId) -> Vec<TheoremSpec> {
        if id.has_dual() {
            vec![Self::primary(id), Self::dual(id)]
        } else {
            vec![Self::primary(id)]
        }
    }

    /// What the theorem concludes when every condition holds. System A is
    /// `systems[0]`, system B is `systems[1]`.
    pub fn conclusion(&self) -> Conclusion {
        use Relation::{ABelowB, BBelowA};
        let (kind, primary) = match self.id {
            TheoremId::T3_1 | TheoremId::T4_1 => (OrderKind::St, ABelowB),
            TheoremId::T3_2 | TheoremId::T4_2 => (OrderKind::St, BBelowA),
            TheoremId::T3_3 => (OrderKind::Hr, ABelowB),
            TheoremId::T3_4 => (OrderKind::Hr, BBelowA),
            TheoremId::T3_5 | TheoremId::T4_3 => (OrderKind::Rh, ABelowB),
            TheoremId::T3_6 => (OrderKind::Rh, BBelowA),
            TheoremId::T3_7 => return Conclusion::Order { kind: OrderKind::Lr, relation: ABelowB },
            TheoremId::T3_8 | TheoremId::T4_4 => return Conclusion::Drhr,
        };
        let relation = if self.dual { primary.flipped() } else { primary };
        Conclusion::Order { kind, relation }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Order { kind: OrderKind, relation: Relation },
    /// System A has a nonincreasing reversed hazard rate.
    Drhr,
}

/// Outcome of one numerically checked condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub id: String,
    pub description: String,
    pub grid: String,
    pub pass: bool,
    /// Coordinates of the worst point, empty for scalar hypotheses.
    pub worst_point: BTreeMap<String, f64>,
    /// Smallest margin seen; negative values are violations.
    pub margin: f64,
}

impl ConditionReport {
    fn new(id: &str, description: &str, grid: String, margin: f64, worst: &[(&str, f64)], tol: f64) -> Self {
        let margin = if margin.is_finite() { margin } else if margin > 0.0 { 0.0 } else { f64::MIN };
        ConditionReport {
            id: id.into(),
            description: description.into(),
            grid,
            pass: margin >= -tol,
            worst_point: worst.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            margin,
        }
    }
}

/// Either an independently checked order or an aging-class check.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Verification {
    Order(OrderVerdict),
    Aging(ConditionReport),
}

impl Verification {
    /// Whether the independent check is compatible with `conclusion`.
    pub fn agrees_with(&self, conclusion: &Conclusion) -> bool {
        match (self, conclusion) {
            (Verification::Order(v), Conclusion::Order { kind, relation }) => {
                v.kind == *kind && v.relation.supports(*relation == Relation::ABelowB)
            }
            (Verification::Aging(r), Conclusion::Drhr) => r.pass,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCertificate {
    pub theorem: TheoremSpec,
    pub conditions: Vec<ConditionReport>,
    pub all_pass: bool,
    pub implied: Conclusion,
    /// Independent check of the conclusion, run when every condition holds.
    pub verified: Option<Verification>,
    pub agrees: Option<bool>,
}

/// Grid densities for the condition checks. `t` defaults to the scenario's
/// evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckGrids {
    pub u: Vec<f64>,
    pub theta_points: usize,
    pub b_points: usize,
    pub t: Option<EvalGrid>,
}

impl Default for CheckGrids {
    fn default() -> Self {
        CheckGrids { u: linspace(U_MIN, U_MAX, U_POINTS), theta_points: THETA_POINTS, b_points: B_POINTS, t: None }
    }
}

fn describe_u(u: &[f64]) -> String {
    format!("u: {} points on [{}, {}]", u.len(), u[0], u[u.len() - 1])
}

fn describe_theta(thetas: &[f64]) -> String {
    format!("theta: {} points on [{}, {}]", thetas.len(), thetas[0], thetas[thetas.len() - 1])
}

fn describe_tb(t: &[f64], b: &[f64]) -> String {
    format!(
        "t: {} points on [{:.3e}, {:.3e}]; b: {} points on [{}, {}]",
        t.len(),
        t[0],
        t[t.len() - 1],
        b.len(),
        b[0],
        b[b.len() - 1]
    )
}

fn direction_word(dir: Direction) -> &'static str {
    match dir {
        Direction::Increasing => "increasing",
        Direction::Decreasing => "decreasing",
    }
}

/// Worst of `(margin, coordinates)` candidates.
fn worst_of<I: IntoIterator<Item = (f64, Vec<(&'static str, f64)>)>>(items: I) -> (f64, Vec<(&'static str, f64)>) {
    items
        .into_iter()
        .fold((f64::INFINITY, Vec::new()), |acc, item| if item.0 < acc.0 { item } else { acc })
}

fn distortions(structure: &CoherentStructure, copula: CopulaFamily, thetas: &[f64]) -> Result<Vec<Distortion>> {
    let base = Distortion::new(structure, copula, thetas[0])?;
    thetas.iter().map(|&t| base.with_theta(t)).collect()
}

fn ratio_table(kind: Option<RatioKind>, ds: &[Distortion], u: &[f64]) -> Result<Vec<Vec<f64>>> {
    ds.par_iter()
        .map(|d| {
            u.iter()
                .map(|&x| match kind {
                    Some(k) => ratio_q(k, d, x),
                    None => d.q(x),
                })
                .collect()
        })
        .collect()
}

fn kind_label(kind: Option<RatioKind>) -> &'static str {
    kind.map_or("q", |k| k.name())
}

/// `kind` (or `q` itself when `None`) is monotone in `u` at every θ.
pub fn ratio_monotone_in_u(
    kind: Option<RatioKind>,
    dir: Direction,
    structure: &CoherentStructure,
    copula: CopulaFamily,
    thetas: &[f64],
    u: &[f64],
) -> Result<ConditionReport> {
    let ds = distortions(structure, copula, thetas)?;
    let table = ratio_table(kind, &ds, u)?;
    let (margin, worst) = worst_of(table.iter().zip(thetas).map(|(row, &th)| {
        let (m, i) = monotone_margin(row, dir);
        (m, vec![("u", u[i]), ("theta", th)])
    }));
    let label = kind_label(kind);
    Ok(ConditionReport::new(
        &format!("{label}_{}_in_u", direction_word(dir)),
        &format!("{label} is {} in u", direction_word(dir)),
        format!("{}; {}", describe_u(u), describe_theta(thetas)),
        margin,
        &worst,
        MONOTONE_TOL,
    ))
}

/// `kind` (or `q` itself when `None`) is monotone in θ at every `u`.
pub fn ratio_monotone_in_theta(
    kind: Option<RatioKind>,
    dir: Direction,
    structure: &CoherentStructure,
    copula: CopulaFamily,
    thetas: &[f64],
    u: &[f64],
) -> Result<ConditionReport> {
    let ds = distortions(structure, copula, thetas)?;
    let table = ratio_table(kind, &ds, u)?;
    let (margin, worst) = worst_of((0..u.len()).map(|j| {
        let column: Vec<f64> = table.iter().map(|row| row[j]).collect();
        let (m, i) = monotone_margin(&column, dir);
        let th = if thetas.len() > 1 { thetas[i] } else { thetas[0] };
        (m, vec![("u", u[j]), ("theta", th)])
    }));
    let label = kind_label(kind);
    Ok(ConditionReport::new(
        &format!("{label}_{}_in_theta", direction_word(dir)),
        &format!("{label} is {} in theta", direction_word(dir)),
        format!("{}; {}", describe_u(u), describe_theta(thetas)),
        margin,
        &worst,
        MONOTONE_TOL,
    ))
}

/// `R3 <= 0` on the `u` × θ grid.
pub fn r3_nonpositive(
    structure: &CoherentStructure,
    copula: CopulaFamily,
    thetas: &[f64],
    u: &[f64],
) -> Result<ConditionReport> {
    let ds = distortions(structure, copula, thetas)?;
    let table = ratio_table(Some(RatioKind::R3), &ds, u)?;
    let (margin, worst) = worst_of(table.iter().zip(thetas).flat_map(|(row, &th)| {
        row.iter().zip(u).map(move |(&r, &x)| (-r, vec![("u", x), ("theta", th)]))
    }));
    Ok(ConditionReport::new(
        "r3_nonpositive",
        "r3 <= 0",
        format!("{}; {}", describe_u(u), describe_theta(thetas)),
        margin,
        &worst,
        MONOTONE_TOL,
    ))
}

/// Shape properties in the parameter `b`, checked at fixed `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BProperty<'a> {
    CdfIncreasing,
    CdfDecreasing,
    CdfLogConcave,
    CdfLogConvex,
    RevHazardConcave,
    RevHazardConvex,
    /// The time derivative of the reversed hazard is convex in `b`.
    RevHazardDtConvex,
    HazardIncreasing,
    HazardConvex,
    /// `F̄ q'(F̄) / (1 - q(F̄))` is increasing in `b`.
    CompositeIncreasing(&'a Distortion),
    /// `F̄ q'(F̄) / (1 - q(F̄))` is convex in `b`.
    CompositeConvex(&'a Distortion),
}

impl BProperty<'_> {
    fn id(&self) -> &'static str {
        match self {
            BProperty::CdfIncreasing => "cdf_increasing_in_b",
            BProperty::CdfDecreasing => "cdf_decreasing_in_b",
            BProperty::CdfLogConcave => "cdf_log_concave_in_b",
            BProperty::CdfLogConvex => "cdf_log_convex_in_b",
            BProperty::RevHazardConcave => "rev_hazard_concave_in_b",
            BProperty::RevHazardConvex => "rev_hazard_convex_in_b",
            BProperty::RevHazardDtConvex => "rev_hazard_dt_convex_in_b",
            BProperty::HazardIncreasing => "hazard_increasing_in_b",
            BProperty::HazardConvex => "hazard_convex_in_b",
            BProperty::CompositeIncreasing(_) => "composite_increasing_in_b",
            BProperty::CompositeConvex(_) => "composite_convex_in_b",
        }
    }

    fn description(&self) -> &'static str {
        match self {
            BProperty::CdfIncreasing => "F(t; b) is increasing in b",
            BProperty::CdfDecreasing => "F(t; b) is decreasing in b",
            BProperty::CdfLogConcave => "F(t; b) is log-concave in b",
            BProperty::CdfLogConvex => "F(t; b) is log-convex in b",
            BProperty::RevHazardConcave => "reversed hazard is concave in b",
            BProperty::RevHazardConvex => "reversed hazard is convex in b",
            BProperty::RevHazardDtConvex => "time derivative of the reversed hazard is convex in b",
            BProperty::HazardIncreasing => "hazard is increasing in b",
            BProperty::HazardConvex => "hazard is convex in b",
            BProperty::CompositeIncreasing(_) => "sf q'(sf) / (1 - q(sf)) is increasing in b",
            BProperty::CompositeConvex(_) => "sf q'(sf) / (1 - q(sf)) is convex in b",
        }
    }

    fn value(&self, m: &LifetimeModel, t: f64) -> Result<f64> {
        match self {
            BProperty::CdfIncreasing | BProperty::CdfDecreasing => Ok(m.cdf(t)),
            BProperty::CdfLogConcave | BProperty::CdfLogConvex => Ok(m.ln_cdf(t)),
            BProperty::RevHazardConcave | BProperty::RevHazardConvex => m.rev_hazard(t),
            BProperty::RevHazardDtConvex => m.rev_hazard_dt(t),
            BProperty::HazardIncreasing | BProperty::HazardConvex => m.hazard(t),
            BProperty::CompositeIncreasing(d) | BProperty::CompositeConvex(d) => {
                let s = m.survival(t);
                RatioKind::R4.at(s, &d.eval(s)?)
            }
        }
    }

    fn margin(&self, b: &[f64], ys: &[f64]) -> (f64, usize) {
        match self {
            BProperty::CdfIncreasing | BProperty::HazardIncreasing | BProperty::CompositeIncreasing(_) => {
                monotone_margin(ys, Direction::Increasing)
            }
            BProperty::CdfDecreasing => monotone_margin(ys, Direction::Decreasing),
            BProperty::CdfLogConcave | BProperty::RevHazardConcave => convexity_margin(b, ys, Direction::Decreasing),
            BProperty::CdfLogConvex
            | BProperty::RevHazardConvex
            | BProperty::RevHazardDtConvex
            | BProperty::HazardConvex
            | BProperty::CompositeConvex(_) => convexity_margin(b, ys, Direction::Increasing),
        }
    }
}

/// Checks a shape property in `b` at every `t` of `t_grid`. Every `t` must
/// lie inside the support of every `b` on the grid.
pub fn check_b_shape(
    property: BProperty<'_>,
    family: LifetimeFamily,
    t_grid: &[f64],
    b_grid: &[f64],
) -> Result<ConditionReport> {
    check_b_grid(b_grid)?;
    if t_grid.is_empty() {
        return Err(Error::Grid("empty t-grid".into()));
    }
    let start = b_grid.iter().map(|&b| family.support_start(b)).fold(0.0, f64::max);
    if let Some(&t) = t_grid.iter().find(|&&t| !(t > start)) {
        return Err(Error::Domain(format!("t = {t} is outside the support for b up to {}", b_grid[b_grid.len() - 1])));
    }
    let models = b_grid.iter().map(|&b| LifetimeModel::new(family, b)).collect::<Result<Vec<_>>>()?;
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let ys = models.iter().map(|m| property.value(m, t)).collect::<Result<Vec<f64>>>()?;
            if let Some(i) = ys.iter().position(|y| !y.is_finite()) {
                return Err(Error::Domain(format!("{} is not finite at t = {t}, b = {}", property.id(), b_grid[i])));
            }
            let (m, i) = property.margin(b_grid, &ys);
            Ok((m, vec![("t", t), ("b", b_grid[i])]))
        })
        .collect::<Result<Vec<_>>>()?;
    let (margin, worst) = worst_of(rows);
    Ok(ConditionReport::new(
        property.id(),
        property.description(),
        describe_tb(t_grid, b_grid),
        margin,
        &worst,
        MONOTONE_TOL,
    ))
}

/// Passes iff `rev_hazard` is nonincreasing on `t_grid`.
pub fn check_drhr<F>(rev_hazard: F, t_grid: &[f64]) -> Result<ConditionReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if t_grid.len() < 2 {
        return Err(Error::Grid(format!("DRHR check needs at least 2 times, got {}", t_grid.len())));
    }
    let ys = t_grid.par_iter().map(|&t| rev_hazard(t)).collect::<Result<Vec<f64>>>()?;
    let (margin, i) = monotone_margin(&ys, Direction::Decreasing);
    Ok(ConditionReport::new(
        "drhr",
        "reversed hazard is nonincreasing in t",
        format!("t: {} points on [{:.3e}, {:.3e}]", t_grid.len(), t_grid[0], t_grid[t_grid.len() - 1]),
        margin,
        &[("t", t_grid[i])],
        MONOTONE_TOL,
    ))
}

fn scalar_report(id: &str, description: &str, margin: f64, tol: f64) -> ConditionReport {
    ConditionReport::new(id, description, "scalar".into(), margin, &[], tol)
}

fn ordered_report(id: &str, description: &str, v: &[f64], dir: Direction) -> ConditionReport {
    let sign = if dir == Direction::Increasing { 1.0 } else { -1.0 };
    let margin = v.windows(2).map(|w| sign * (w[1] - w[0])).fold(f64::INFINITY, f64::min);
    let margin = if margin.is_finite() { margin } else { 0.0 };
    scalar_report(id, description, margin, 0.0)
}

fn majorization_report(b: &[f64], b_star: &[f64], weak: bool) -> Result<ConditionReport> {
    check_len(b.len(), b_star.len())?;
    let margin = partial_sum_margin(b_star, b, !weak)?;
    let tol = tol_for(b_star, b);
    Ok(if weak {
        scalar_report("b_weakly_supermajorized", "b* weakly supermajorizes b", margin, tol)
    } else {
        scalar_report("b_majorized", "b* majorizes b", margin, tol)
    })
}

fn theta_order_report(theta_a: f64, theta_b: f64, a_below: bool) -> ConditionReport {
    if a_below {
        scalar_report("theta_order", "theta_A <= theta_B", theta_b - theta_a, 0.0)
    } else {
        scalar_report("theta_order", "theta_A >= theta_B", theta_a - theta_b, 0.0)
    }
}

fn shared_theta_report(a: &[f64], b: &[f64]) -> ConditionReport {
    let spread = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let spread = if a.len() == b.len() { spread } else { f64::INFINITY };
    scalar_report("theta_shared", "both systems use the same theta vector", -spread, 0.0)
}

/// Sorted, deduplicated θ-grid over the interval plus the systems' own θ.
fn theta_grid(interval: [f64; 2], points: usize, extra: &[f64]) -> Vec<f64> {
    let mut v = if interval[0] < interval[1] { linspace(interval[0], interval[1], points.max(2)) } else { vec![interval[0]] };
    v.extend_from_slice(extra);
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    v
}

/// b-grid spanning every parameter in use, widened when degenerate.
fn b_grid(values: &[f64], points: usize) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi - lo <= 1e-9 * hi { (0.9 * lo, 1.1 * hi) } else { (lo, hi) };
    linspace(lo, hi, points.max(3))
}

struct Ctx<'a> {
    scenario: &'a Scenario,
    grids: &'a CheckGrids,
    structure: CoherentStructure,
    copula: CopulaFamily,
    family: LifetimeFamily,
    t_grid: EvalGrid,
}

impl Ctx<'_> {
    fn system(&self, i: usize, level: Level) -> Result<&SystemSpec> {
        let s = self.scenario.system(i)?;
        if s.level != level {
            return Err(Error::Shape(format!("system {i} is {:?}-level, the theorem needs {level:?}-level", s.level)));
        }
        Ok(s)
    }

    /// Times of the t-grid inside the support of every `b` in `bs`.
    fn times_after(&self, bs: &[f64]) -> Result<Vec<f64>> {
        let start = bs.iter().map(|&b| self.family.support_start(b)).fold(0.0, f64::max);
        let t = self.t_grid.after(start);
        if t.len() < 3 {
            return Err(Error::Grid(format!("fewer than 3 grid times exceed the support start {start}")));
        }
        Ok(t.times().to_vec())
    }

    fn b_shape(&self, property: BProperty<'_>, bgrid: &[f64], times: &[f64]) -> Result<ConditionReport> {
        check_b_shape(property, self.family, times, bgrid)
    }

    fn u_monotone(&self, kind: Option<RatioKind>, dir: Direction, thetas: &[f64]) -> Result<ConditionReport> {
        ratio_monotone_in_u(kind, dir, &self.structure, self.copula, thetas, &self.grids.u)
    }

    fn theta_monotone(&self, kind: Option<RatioKind>, dir: Direction, thetas: &[f64]) -> Result<ConditionReport> {
        ratio_monotone_in_theta(kind, dir, &self.structure, self.copula, thetas, &self.grids.u)
    }
}

fn flip(dir: Direction) -> Direction {
    match dir {
        Direction::Increasing => Direction::Decreasing,
        Direction::Decreasing => Direction::Increasing,
    }
}

/// Runs the checklist of `spec` on `scenario` (system A = `systems[0]`,
/// system B = `systems[1]`) and, when every condition holds, verifies the
/// conclusion independently.
pub fn check_theorem(spec: TheoremSpec, scenario: &Scenario, grids: &CheckGrids) -> Result<TheoremCertificate> {
    if spec.dual && !spec.id.has_dual() {
        return Err(Error::Parameter(format!("{} has no dual checklist", spec.id.name())));
    }
    let ctx = Ctx {
        scenario,
        grids,
        structure: scenario.coherent_structure()?,
        copula: scenario.copula_family()?,
        family: scenario.lifetime_family()?,
        t_grid: match &grids.t {
            Some(g) => g.clone(),
            None => scenario.grid()?,
        },
    };
    if grids.u.len() < 3 {
        return Err(Error::Grid("u-grid needs at least 3 points".into()));
    }
    let level = spec.id.level();
    let a = ctx.system(0, level)?;
    let b = if spec.id.is_pair() { Some(ctx.system(1, level)?) } else { None };
    let mut all_b: Vec<f64> = a.b.clone();
    let mut all_theta: Vec<f64> = a.thetas();
    if let Some(b) = b {
        check_len(a.b.len(), b.b.len())?;
        all_b.extend_from_slice(&b.b);
        all_theta.extend(b.thetas());
    }
    let thetas = theta_grid(scenario.theta_interval(), grids.theta_points, &all_theta);
    let bgrid = b_grid(&all_b, grids.b_points);
    let times = ctx.times_after(&bgrid)?;
    let (inc, dec) = (Direction::Increasing, Direction::Decreasing);
    // Direction of the bracketed alternatives: primary reads left of the
    // brackets, dual reads inside them.
    let pick = |primary: Direction| if spec.dual { flip(primary) } else { primary };

    let mut reports = Vec::new();
    match spec.id {
        TheoremId::T3_1 | TheoremId::T3_2 => {
            let b = b.expect("pair");
            let up = spec.id == TheoremId::T3_1;
            let dir = if up { inc } else { dec };
            reports.push(theta_order_report(a.thetas()[0], b.thetas()[0], true));
            reports.push(ctx.theta_monotone(None, dir, &thetas)?);
            reports.push(ctx.b_shape(if up { BProperty::CdfIncreasing } else { BProperty::CdfDecreasing }, &bgrid, &times)?);
            reports.push(ctx.b_shape(if up { BProperty::CdfLogConcave } else { BProperty::CdfLogConvex }, &bgrid, &times)?);
            reports.push(majorization_report(&a.b, &b.b, true)?);
        }
        TheoremId::T3_3 | TheoremId::T3_4 => {
            let b = b.expect("pair");
            let third = spec.id == TheoremId::T3_3;
            reports.push(theta_order_report(a.thetas()[0], b.thetas()[0], third));
            reports.push(ctx.b_shape(if third { BProperty::CdfLogConcave } else { BProperty::CdfLogConvex }, &bgrid, &times)?);
            let rh_concave = third != spec.dual;
            reports.push(ctx.b_shape(
                if rh_concave { BProperty::RevHazardConcave } else { BProperty::RevHazardConvex },
                &bgrid,
                &times,
            )?);
            reports.push(ctx.u_monotone(Some(RatioKind::R1), pick(dec), &thetas)?);
            reports.push(ctx.theta_monotone(Some(RatioKind::R1), pick(dec), &thetas)?);
            reports.push(majorization_report(&a.b, &b.b, false)?);
        }
        TheoremId::T3_5 | TheoremId::T3_6 => {
            let b = b.expect("pair");
            let fifth = spec.id == TheoremId::T3_5;
            reports.push(theta_order_report(a.thetas()[0], b.thetas()[0], fifth));
            reports.push(ctx.b_shape(if fifth { BProperty::CdfLogConcave } else { BProperty::CdfLogConvex }, &bgrid, &times)?);
            let rh_convex = fifth != spec.dual;
            reports.push(ctx.b_shape(
                if rh_convex { BProperty::RevHazardConvex } else { BProperty::RevHazardConcave },
                &bgrid,
                &times,
            )?);
            reports.push(ctx.u_monotone(Some(RatioKind::R2), pick(inc), &thetas)?);
            reports.push(ctx.theta_monotone(Some(RatioKind::R2), pick(inc), &thetas)?);
            reports.push(majorization_report(&a.b, &b.b, false)?);
        }
        TheoremId::T3_7 => {
            let b = b.expect("pair");
            reports.push(theta_order_report(a.thetas()[0], b.thetas()[0], spec.dual));
            reports.push(ctx.b_shape(BProperty::CdfLogConcave, &bgrid, &times)?);
            reports.push(drhr_over_b(&ctx, &bgrid)?);
            reports.push(ctx.b_shape(BProperty::RevHazardConvex, &bgrid, &times)?);
            reports.push(ctx.b_shape(BProperty::RevHazardDtConvex, &bgrid, &times)?);
            reports.push(r3_nonpositive(&ctx.structure, ctx.copula, &thetas, &grids.u)?);
            reports.push(ctx.u_monotone(Some(RatioKind::R3), dec, &thetas)?);
            reports.push(ctx.theta_monotone(Some(RatioKind::R3), pick(inc), &thetas)?);
            reports.push(majorization_report(&a.b, &b.b, false)?);
        }
        TheoremId::T3_8 => {
            let own = a.thetas();
            reports.push(ctx.u_monotone(Some(RatioKind::R2), inc, &own[..1])?);
            let models = a.b.iter().map(|&bj| LifetimeModel::new(ctx.family, bj)).collect::<Result<Vec<_>>>()?;
            let own_times = ctx.times_after(&a.b)?;
            let mut r = check_drhr(|t| models.iter().map(|m| m.rev_hazard(t)).sum(), &own_times)?;
            r.id = "sum_rev_hazard_decreasing".into();
            r.description = "sum of the blocks' reversed hazards is nonincreasing in t".into();
            reports.push(r);
        }
        TheoremId::T4_1 | TheoremId::T4_2 => {
            let b = b.expect("pair");
            let up = spec.id == TheoremId::T4_1;
            let own = a.thetas();
            reports.push(shared_theta_report(&own, &b.thetas()));
            reports.push(ctx.b_shape(if up { BProperty::CdfIncreasing } else { BProperty::CdfDecreasing }, &bgrid, &times)?);
            reports.push(ctx.b_shape(if up { BProperty::CdfLogConcave } else { BProperty::CdfLogConvex }, &bgrid, &times)?);
            let dir = if up { inc } else { dec };
            reports.push(ctx.u_monotone(Some(RatioKind::R2), dir, &thetas)?);
            reports.push(ctx.theta_monotone(Some(RatioKind::R2), dir, &thetas)?);
            reports.push(ordered_report("b_decreasing", "b is in decreasing order", &a.b, dec));
            reports.push(ordered_report("b_star_decreasing", "b* is in decreasing order", &b.b, dec));
            if up {
                reports.push(ordered_report("theta_increasing", "theta is in increasing order", &own, inc));
            }
            reports.push(majorization_report(&a.b, &b.b, false)?);
        }
        TheoremId::T4_3 => {
            let b = b.expect("pair");
            let own = a.thetas();
            let spread = all_theta.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                - all_theta.iter().copied().fold(f64::INFINITY, f64::min);
            reports.push(scalar_report("theta_common", "every subsystem uses the same theta", -spread, 0.0));
            let d = Distortion::new(&ctx.structure, ctx.copula, own[0])?;
            reports.push(ctx.b_shape(BProperty::HazardIncreasing, &bgrid, &times)?);
            reports.push(ctx.b_shape(BProperty::HazardConvex, &bgrid, &times)?);
            reports.push(ctx.b_shape(BProperty::CompositeIncreasing(&d), &bgrid, &times)?);
            reports.push(ctx.b_shape(BProperty::CompositeConvex(&d), &bgrid, &times)?);
            reports.push(majorization_report(&a.b, &b.b, false)?);
        }
        TheoremId::T4_4 => {
            let mut own = a.thetas();
            own.sort_by(f64::total_cmp);
            own.dedup();
            reports.push(ctx.u_monotone(Some(RatioKind::R4), inc, &own)?);
            let mut worst: Option<ConditionReport> = None;
            for &bj in &a.b {
                let m = LifetimeModel::new(ctx.family, bj)?;
                let r = check_drhr(|t| m.rev_hazard(t), &ctx.times_after(&[bj])?)?;
                if worst.as_ref().is_none_or(|w| r.margin < w.margin) {
                    let mut r = r;
                    r.worst_point.insert("b".into(), bj);
                    worst = Some(r);
                }
            }
            let mut r = worst.expect("nonempty b");
            r.id = "components_drhr".into();
            r.description = "every F(t; b_j) has a nonincreasing reversed hazard".into();
            reports.push(r);
        }
    }

    let all_pass = reports.iter().all(|r| r.pass);
    let implied = spec.conclusion();
    let verified = if all_pass { Some(verify(&implied, scenario, &ctx.t_grid)?) } else { None };
    let agrees = verified.as_ref().map(|v| v.agrees_with(&implied));
    Ok(TheoremCertificate { theorem: spec, conditions: reports, all_pass, implied, verified, agrees })
}

/// Primary checklist if it passes, otherwise the dual one where it exists;
/// the primary certificate when neither passes.
pub fn check_theorem_any(id: TheoremId, scenario: &Scenario, grids: &CheckGrids) -> Result<TheoremCertificate> {
    let primary = check_theorem(TheoremSpec::primary(id), scenario, grids)?;
    if primary.all_pass || !id.has_dual() {
        return Ok(primary);
    }
    let dual = check_theorem(TheoremSpec::dual(id), scenario, grids)?;
    Ok(if dual.all_pass { dual } else { primary })
}

fn drhr_over_b(ctx: &Ctx<'_>, bgrid: &[f64]) -> Result<ConditionReport> {
    let times = ctx.times_after(bgrid)?;
    let models = bgrid.iter().map(|&b| LifetimeModel::new(ctx.family, b)).collect::<Result<Vec<_>>>()?;
    let rows = models
        .iter()
        .map(|m| {
            let r = check_drhr(|t| m.rev_hazard(t), &times)?;
            Ok((r.margin, vec![("t", r.worst_point["t"]), ("b", m.b())]))
        })
        .collect::<Result<Vec<_>>>()?;
    let (margin, worst) = worst_of(rows);
    Ok(ConditionReport::new(
        "cdf_drhr",
        "F(t; b) has a nonincreasing reversed hazard for every b",
        describe_tb(&times, bgrid),
        margin,
        &worst,
        MONOTONE_TOL,
    ))
}

fn verify(conclusion: &Conclusion, scenario: &Scenario, grid: &EvalGrid) -> Result<Verification> {
    let a = scenario.build_system(0)?;
    match conclusion {
        Conclusion::Order { kind, .. } => {
            let b = scenario.build_system(1)?;
            Ok(Verification::Order(check_order(*kind, &a, &b, grid)?))
        }
        Conclusion::Drhr => {
            let times = grid.after(a.support_start());
            Ok(Verification::Aging(check_drhr(|t| a.rev_hazard(t), times.times())?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::CoherentStructure;

    #[test]
    fn ratio_closed_forms() {
        // Series system under independence: q = u^n, R1 = n (1 - u) / u.
        let s = CoherentStructure::series(3).unwrap();
        let d = Distortion::new(&s, CopulaFamily::Gumbel, 1.0).unwrap();
        for u in [0.1, 0.5, 0.9] {
            let r1 = ratio_q(RatioKind::R1, &d, u).unwrap();
            assert!((r1 - 3.0 * (1.0 - u) / u).abs() < 1e-12);
            let r4 = ratio_q(RatioKind::R4, &d, u).unwrap();
            assert!((r4 - 3.0 * u.powi(3) / (1.0 - u.powi(3))).abs() < 1e-12);
        }
        let report = ratio_monotone_in_u(
            Some(RatioKind::R1),
            Direction::Decreasing,
            &s,
            CopulaFamily::Gumbel,
            &[1.0],
            &linspace(U_MIN, U_MAX, U_POINTS),
        )
        .unwrap();
        assert!(report.pass);
        assert!(ratio_q(RatioKind::R2, &d, 1.0).is_err());
    }

    #[test]
    fn gumbel_r2_increasing_in_u() {
        let s = CoherentStructure::k_out_of_n(3, 4).unwrap();
        let u = linspace(U_MIN, U_MAX, U_POINTS);
        let r = ratio_monotone_in_u(Some(RatioKind::R2), Direction::Increasing, &s, CopulaFamily::Gumbel, &[20.0], &u)
            .unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn clayton_r3_nonpositive() {
        let s = CoherentStructure::new(4, vec![vec![1], vec![2, 3, 4]]).unwrap();
        let u = linspace(U_MIN, U_MAX, U_POINTS);
        let thetas = linspace(5.0, 10.0, THETA_POINTS);
        assert!(r3_nonpositive(&s, CopulaFamily::Clayton, &thetas, &u).unwrap().pass);
        let dec = ratio_monotone_in_u(Some(RatioKind::R3), Direction::Decreasing, &s, CopulaFamily::Clayton, &thetas, &u)
            .unwrap();
        assert!(dec.pass, "{dec:?}");
    }

    #[test]
    fn b_shapes() {
        let t = EvalGrid::default().times().iter().copied().filter(|&t| (0.1..=5.0).contains(&t)).collect::<Vec<_>>();
        let lomax_b = linspace(0.2, 1.2, 20);
        let r = check_b_shape(BProperty::CdfLogConcave, LifetimeFamily::Lomax, &t, &lomax_b).unwrap();
        assert!(r.pass, "{r:?}");
        let inv_b = linspace(0.02, 0.06, 20);
        for p in [BProperty::RevHazardConcave, BProperty::RevHazardConvex] {
            assert!(check_b_shape(p, LifetimeFamily::InvertedExponential, &t, &inv_b).unwrap().pass);
        }
        let ge = check_b_shape(BProperty::CdfLogConvex, LifetimeFamily::GeneralizedExponential, &t, &lomax_b).unwrap();
        assert!(ge.pass);
        let wrong = check_b_shape(BProperty::CdfLogConvex, LifetimeFamily::Lomax, &t, &lomax_b).unwrap();
        assert!(!wrong.pass && wrong.margin < 0.0);
        let pareto = LifetimeFamily::ParetoI { alpha: 1.5 };
        assert!(matches!(check_b_shape(BProperty::CdfIncreasing, pareto, &[0.5, 1.0], &lomax_b), Err(Error::Domain(_))));
    }

    #[test]
    fn drhr_checks() {
        let t = EvalGrid::default().times().to_vec();
        let exp = LifetimeModel::new(LifetimeFamily::Weibull, 1.0).unwrap();
        assert!(check_drhr(|x| exp.rev_hazard(x), &t).unwrap().pass);
        assert!(check_drhr(|_| Ok(0.0), &t).unwrap().pass);
        let weibull = [1.6, 0.5, 0.3, 0.2].map(|b| LifetimeModel::new(LifetimeFamily::Weibull, b).unwrap());
        let sum = check_drhr(|x| weibull.iter().map(|m| m.rev_hazard(x)).sum(), &t).unwrap();
        assert!(sum.pass, "{sum:?}");
        assert!(!check_drhr(Ok, &t).unwrap().pass);
    }

    #[test]
    fn conclusions_and_names() {
        assert_eq!(
            TheoremSpec::dual(TheoremId::T3_4).conclusion(),
            Conclusion::Order { kind: OrderKind::Hr, relation: Relation::ABelowB }
        );
        assert_eq!(TheoremSpec::primary(TheoremId::T4_4).conclusion(), Conclusion::Drhr);
        for id in TheoremId::ALL {
            assert_eq!(TheoremId::from_name(id.name()).unwrap(), id);
        }
        let json = serde_json::to_string(&TheoremSpec::primary(TheoremId::T3_1)).unwrap();
        assert_eq!(json, r#"{"id":"T3_1","dual":false}"#);
    }
}
