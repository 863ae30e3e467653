//! Majorization and grid-based stochastic-order checks.
//!
//! For lifetimes `A` and `B`:
//!
//! * `A <=st B` iff `sf_A <= sf_B` everywhere,
//! * `A <=hr B` iff `sf_B / sf_A` is nondecreasing,
//! * `A <=rh B` iff `F_B / F_A` is nondecreasing,
//! * `A <=lr B` iff `f_B / f_A` is nondecreasing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::shape::{monotone_margin, Direction, MONOTONE_TOL};
use crate::systems::{EvalGrid, Lifetime};

/// Absolute tolerance of the pointwise survival comparison.
pub const ST_TOL: f64 = 1e-9;
/// Ratios are only formed where both sides exceed this.
pub const UNDERFLOW: f64 = 1e-300;
const MAJORIZATION_TOL: f64 = 1e-12;
const CROSSING_TOL_Y: f64 = 1e-8;

fn ascending(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Smallest slack of the ascending partial-sum inequalities
/// `Σ_{i<=j} x_(i) <= Σ_{i<=j} y_(i)`. With `equal_totals` the last
/// inequality becomes an equality and a mismatch counts as negative slack.
pub fn partial_sum_margin(x: &[f64], y: &[f64], equal_totals: bool) -> Result<f64> {
    check_len(x.len(), y.len())?;
    let (xs, ys) = (ascending(x), ascending(y));
    let n = xs.len();
    let (mut sx, mut sy) = (0.0, 0.0);
    let mut margin = f64::INFINITY;
    for j in 0..n {
        sx += xs[j];
        sy += ys[j];
        let slack = if j + 1 == n && equal_totals { -(sy - sx).abs() } else { sy - sx };
        margin = margin.min(slack);
    }
    Ok(margin)
}

pub(crate) fn tol_for(x: &[f64], y: &[f64]) -> f64 {
    let scale = x.iter().chain(y).map(|v| v.abs()).sum::<f64>().max(1.0);
    MAJORIZATION_TOL * scale
}

/// True iff `x` majorizes `y`: ascending partial sums of `x` never exceed
/// those of `y` and the totals agree.
pub fn majorize(x: &[f64], y: &[f64]) -> Result<bool> {
    Ok(partial_sum_margin(x, y, true)? >= -tol_for(x, y))
}

/// True iff `x` weakly supermajorizes `y`: ascending partial sums of `x`
/// never exceed those of `y`.
pub fn weak_supermajorize(x: &[f64], y: &[f64]) -> Result<bool> {
    Ok(partial_sum_margin(x, y, false)? >= -tol_for(x, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    St,
    Hr,
    Rh,
    Lr,
}

impl OrderKind {
    pub const ALL: [OrderKind; 4] = [OrderKind::St, OrderKind::Hr, OrderKind::Rh, OrderKind::Lr];

    pub fn name(&self) -> &'static str {
        match self {
            OrderKind::St => "st",
            OrderKind::Hr => "hr",
            OrderKind::Rh => "rh",
            OrderKind::Lr => "lr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "A_below_B")]
    ABelowB,
    #[serde(rename = "B_below_A")]
    BBelowA,
    #[serde(rename = "crossing")]
    Crossing,
    #[serde(rename = "indistinguishable")]
    Indistinguishable,
}

impl Relation {
    pub fn flipped(self) -> Self {
        match self {
            Relation::ABelowB => Relation::BBelowA,
            Relation::BBelowA => Relation::ABelowB,
            other => other,
        }
    }

    /// Whether this verdict is compatible with the claim `A <= B` (or
    /// `B <= A` when `a_below_b` is false).
    pub fn supports(self, a_below_b: bool) -> bool {
        match self {
            Relation::Indistinguishable => true,
            Relation::ABelowB => a_below_b,
            Relation::BBelowA => !a_below_b,
            Relation::Crossing => false,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Relation::ABelowB => "A_below_B",
            Relation::BBelowA => "B_below_A",
            Relation::Crossing => "crossing",
            Relation::Indistinguishable => "indistinguishable",
        }
    }
}

/// Outcome of one grid-based order check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub kind: OrderKind,
    pub relation: Relation,
    /// Worst departure from the reported relation (absolute for st, relative
    /// per step for the ratio orders); for crossings, the smaller of the two
    /// directional violations.
    pub max_violation: f64,
    /// Times where the comparison changes direction.
    pub crossings: Vec<f64>,
    /// Grid points that entered the verdict.
    pub points_used: usize,
    /// Grid points left out: outside the common support or with an
    /// underflowing ratio.
    pub points_dropped: usize,
    /// Set when one support starts later, at `value`. Ratios are formed from
    /// there on; on the stretch before it only the earlier-starting system
    /// can fail, which favours the later one in every order, so that
    /// direction is folded into the relation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restricted_from: Option<f64>,
}

fn side_values<L: Lifetime + ?Sized>(kind: OrderKind, sys: &L, t: f64) -> Result<f64> {
    match kind {
        OrderKind::St | OrderKind::Hr => sys.sf(t),
        OrderKind::Rh => sys.cdf(t),
        OrderKind::Lr => sys.pdf(t),
    }
}

fn ratio_at<A, B>(kind: OrderKind, a: &A, b: &B, t: f64) -> Result<Option<f64>>
where
    A: Lifetime + ?Sized,
    B: Lifetime + ?Sized,
{
    let num = side_values(kind, b, t)?;
    let den = side_values(kind, a, t)?;
    if num <= UNDERFLOW || den <= UNDERFLOW {
        return Ok(None);
    }
    Ok(Some(num / den))
}

/// Compares `a` and `b` in the order `kind` on `grid`.
pub fn check_order<A, B>(kind: OrderKind, a: &A, b: &B, grid: &EvalGrid) -> Result<OrderVerdict>
where
    A: Lifetime + ?Sized,
    B: Lifetime + ?Sized,
{
    if grid.len() < 3 {
        return Err(Error::Grid(format!("order check needs at least 3 points, got {}", grid.len())));
    }
    match kind {
        OrderKind::St => check_st(a, b, grid),
        _ => check_ratio(kind, a, b, grid),
    }
}

/// Relation and worst violation implied by the differences `sf_B - sf_A`.
pub fn st_relation(diffs: &[f64]) -> (Relation, f64) {
    let min = diffs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let a_below = min >= -ST_TOL;
    let b_below = max <= ST_TOL;
    match (a_below, b_below) {
        (true, true) => (Relation::Indistinguishable, min.abs().max(max.abs())),
        (true, false) => (Relation::ABelowB, (-min).max(0.0)),
        (false, true) => (Relation::BBelowA, max.max(0.0)),
        (false, false) => (Relation::Crossing, (-min).min(max)),
    }
}

fn check_st<A, B>(a: &A, b: &B, grid: &EvalGrid) -> Result<OrderVerdict>
where
    A: Lifetime + ?Sized,
    B: Lifetime + ?Sized,
{
    let ts = grid.times();
    let diffs = ts
        .par_iter()
        .map(|&t| Ok(b.sf(t)? - a.sf(t)?))
        .collect::<Result<Vec<f64>>>()?;
    let (relation, max_violation) = st_relation(&diffs);
    let mut crossings = Vec::new();
    if relation == Relation::Crossing {
        let significant: Vec<(usize, f64)> =
            diffs.iter().enumerate().filter(|(_, d)| d.abs() > ST_TOL).map(|(i, d)| (i, d.signum())).collect();
        for w in significant.windows(2) {
            if w[0].1 != w[1].1 {
                let f = |t: f64| -> Option<f64> { Some(b.sf(t).ok()? - a.sf(t).ok()?) };
                crossings.push(bisect_in_y(ts[w[0].0], ts[w[1].0], w[0].1, f));
            }
        }
    }
    Ok(OrderVerdict {
        kind: OrderKind::St,
        relation,
        max_violation,
        crossings,
        points_used: ts.len(),
        points_dropped: 0,
        restricted_from: None,
    })
}

fn check_ratio<A, B>(kind: OrderKind, a: &A, b: &B, grid: &EvalGrid) -> Result<OrderVerdict>
where
    A: Lifetime + ?Sized,
    B: Lifetime + ?Sized,
{
    let start = a.support_start().max(b.support_start());
    let all = grid.times();
    let inside: Vec<f64> = all.iter().copied().filter(|&t| t > start).collect();
    let restricted_from = if inside.len() < all.len() && start > 0.0 { Some(start) } else { None };
    let values = inside
        .par_iter()
        .map(|&t| Ok(ratio_at(kind, a, b, t)?.map(|r| (t, r))))
        .collect::<Result<Vec<Option<(f64, f64)>>>>()?;
    let kept: Vec<(f64, f64)> = values.into_iter().flatten().collect();
    let points_dropped = all.len() - kept.len();
    if kept.len() < 2 {
        return Err(Error::Grid(format!(
            "{} check has {} usable points after dropping {points_dropped}",
            kind.name(),
            kept.len()
        )));
    }
    let ts: Vec<f64> = kept.iter().map(|p| p.0).collect();
    let rs: Vec<f64> = kept.iter().map(|p| p.1).collect();
    let (inc, _) = monotone_margin(&rs, Direction::Increasing);
    let (dec, _) = monotone_margin(&rs, Direction::Decreasing);
    let up = inc >= -MONOTONE_TOL;
    let down = dec >= -MONOTONE_TOL;
    let (mut relation, mut max_violation) = match (up, down) {
        (true, true) => (Relation::Indistinguishable, (-inc).max(-dec).max(0.0)),
        (true, false) => (Relation::ABelowB, (-inc).max(0.0)),
        (false, true) => (Relation::BBelowA, (-dec).max(0.0)),
        (false, false) => (Relation::Crossing, (-inc).min(-dec)),
    };
    let mut crossings = Vec::new();
    let (sa, sb) = (a.support_start(), b.support_start());
    let gap = all.iter().any(|&t| t > sa.min(sb) && t <= start);
    if restricted_from.is_some() && sa != sb && gap {
        let later_above = if sa < sb { Relation::ABelowB } else { Relation::BBelowA };
        match relation {
            Relation::Indistinguishable => relation = later_above,
            r if r == later_above.flipped() => {
                relation = Relation::Crossing;
                max_violation = if later_above == Relation::ABelowB { -inc } else { -dec };
                crossings.push(start);
            }
            _ => {}
        }
    }
    if relation == Relation::Crossing {
        let significant: Vec<(usize, f64)> = rs
            .windows(2)
            .enumerate()
            .filter_map(|(i, w)| {
                let scale = w[0].abs().max(w[1].abs());
                let step = (w[1] - w[0]) / scale;
                (step.abs() > MONOTONE_TOL).then_some((i, step.signum()))
            })
            .collect();
        for w in significant.windows(2) {
            if w[0].1 != w[1].1 {
                let slope = |t: f64| -> Option<f64> {
                    let h = 1e-6 * t.max(1e-6);
                    let hi = ratio_at(kind, a, b, t + h).ok()??;
                    let lo = ratio_at(kind, a, b, (t - h).max(start + 0.5 * h)).ok()??;
                    Some(hi - lo)
                };
                crossings.push(bisect_in_y(ts[w[0].0], ts[w[1].0 + 1], w[0].1, slope));
            }
        }
    }
    Ok(OrderVerdict { kind, relation, max_violation, crossings, points_used: kept.len(), points_dropped, restricted_from })
}

/// Locates a sign change of `f` between times `t_lo < t_hi`, where `f` has
/// sign `sign_lo` at `t_lo`, bisecting in `y = e^-t` until the bracket is
/// narrower than 1e-8. Returns the crossing time.
fn bisect_in_y<F: Fn(f64) -> Option<f64>>(t_lo: f64, t_hi: f64, sign_lo: f64, f: F) -> f64 {
    let (mut y_a, mut y_b) = ((-t_lo).exp(), (-t_hi).exp());
    for _ in 0..200 {
        if (y_a - y_b).abs() < CROSSING_TOL_Y {
            break;
        }
        let y_mid = 0.5 * (y_a + y_b);
        match f(-y_mid.ln()) {
            Some(v) if v.signum() == sign_lo && v != 0.0 => y_a = y_mid,
            Some(_) => y_b = y_mid,
            None => break,
        }
    }
    -(0.5 * (y_a + y_b)).ln()
}

/// Classification reported by [`schur_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchurClass {
    SchurConvex,
    SchurConcave,
    /// No difference beyond rounding was seen in either direction.
    Constant,
    /// Both directions violated; the pairs are `(x, y)` with `x` majorizing
    /// `y`, one against each class.
    Neither { against_convex: (Vec<f64>, Vec<f64>), against_concave: (Vec<f64>, Vec<f64>) },
}

/// Probes `f` with random pairs related by a single T-transform, i.e.
/// `y = λ x + (1 - λ) x∘τ` for a random transposition `τ`, so that `x`
/// majorizes `y`. Schur-convex functions satisfy `f(x) >= f(y)`.
pub fn schur_probe<F>(f: F, dim: usize, lo: f64, hi: f64, trials: usize, seed: u64) -> Result<SchurClass>
where
    F: Fn(&[f64]) -> f64,
{
    if trials < 100 {
        return Err(Error::Parameter(format!("schur probe needs at least 100 trials, got {trials}")));
    }
    if dim < 2 || !(lo < hi) {
        return Err(Error::Parameter(format!("schur probe needs dim >= 2 and lo < hi, got {dim}, [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut against_convex = None;
    let mut against_concave = None;
    for _ in 0..trials {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(lo..hi)).collect();
        let i = rng.random_range(0..dim);
        let mut j = rng.random_range(0..dim - 1);
        if j >= i {
            j += 1;
        }
        let lambda: f64 = rng.random_range(0.0..1.0);
        let mut y = x.clone();
        y[i] = lambda * x[i] + (1.0 - lambda) * x[j];
        y[j] = lambda * x[j] + (1.0 - lambda) * x[i];
        let (fx, fy) = (f(&x), f(&y));
        let tol = 1e-12 * fx.abs().max(fy.abs());
        if fx < fy - tol && against_convex.is_none() {
            against_convex = Some((x.clone(), y.clone()));
        }
        if fx > fy + tol && against_concave.is_none() {
            against_concave = Some((x, y));
        }
    }
    Ok(match (against_convex, against_concave) {
        (None, None) => SchurClass::Constant,
        (None, Some(_)) => SchurClass::SchurConvex,
        (Some(_), None) => SchurClass::SchurConcave,
        (Some(a), Some(b)) => SchurClass::Neither { against_convex: a, against_concave: b },
    })
}
