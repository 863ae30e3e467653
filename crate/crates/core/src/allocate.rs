//! Exhaustive allocation of a spare pool: every choice of `slots` spares is
//! built into a system, compared pairwise in the usual stochastic order,
//! ranked and, where the hypotheses of an ordering theorem hold, certified.

use std::cell::RefCell;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::conditions::{check_theorem, CheckGrids, Conclusion, TheoremId, TheoremSpec};
use crate::copulas::CopulaFamily;
use crate::distributions::LifetimeFamily;
use crate::error::{Error, Result};
use crate::orders::{majorize, st_relation, weak_supermajorize, Relation};
use crate::quad::integrate;
use crate::scenario::{self, Level, Scenario, StructureSpec, SystemSpec, ThetaSpec, SCHEMA_VERSION};
use crate::structure::CoherentStructure;
use crate::systems::{EvalGrid, Lifetime};

/// Largest number of allocations that is enumerated.
pub const ENUMERATION_BOUND: usize = 10_000;
/// Largest number of allocations for which the pairwise dominance matrix is
/// built; above it the ranking falls back to mean lifetimes.
pub const DOMINANCE_BOUND: usize = 1_000;
/// Largest number of allocations for which pairwise theorem certificates
/// are attempted.
pub const CERTIFICATE_BOUND: usize = 100;
/// Mean-lifetime integration stops here when the survival has not yet
/// dropped below [`SF_CUTOFF`].
pub const MEAN_HORIZON: f64 = 1e6;
pub const SF_CUTOFF: f64 = 1e-10;
const MEAN_REL_TOL: f64 = 1e-6;

/// Spares available for `slots` positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SparePool {
    family: LifetimeFamily,
    candidates: Vec<f64>,
    slots: usize,
}

impl SparePool {
    pub fn new(family: LifetimeFamily, candidates: Vec<f64>, slots: usize) -> Result<Self> {
        if slots > candidates.len() {
            return Err(Error::Parameter(format!("{} candidates cannot fill {slots} slots", candidates.len())));
        }
        for &b in &candidates {
            family.model(b)?;
        }
        let count = binomial(candidates.len(), slots);
        if count > ENUMERATION_BOUND as u128 {
            return Err(Error::TooLarge { what: format!("{count} allocations"), bound: ENUMERATION_BOUND });
        }
        Ok(SparePool { family, candidates, slots })
    }

    pub fn family(&self) -> LifetimeFamily {
        self.family
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    pub fn slots(&self) -> usize {
        self.slots
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// The fixed part of every allocation: structure, copula and the base unit.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationBase {
    pub structure: StructureSpec,
    pub copula: CopulaFamily,
    pub theta: f64,
    pub b0: f64,
    pub level: Level,
}

impl AllocationBase {
    /// Base taken from `systems[0]` of a scenario (its level, first θ and
    /// first b), together with the scenario's pool.
    pub fn from_scenario(s: &Scenario) -> Result<(Self, SparePool)> {
        let sys = s.system(0)?;
        let pool = s.pool.as_ref().ok_or_else(|| Error::Scenario("allocation needs a `pool`".into()))?;
        let base = AllocationBase {
            structure: s.structure.clone(),
            copula: s.copula_family()?,
            theta: sys.theta.values()[0],
            b0: sys.b[0],
            level: sys.level,
        };
        Ok((base, SparePool::new(s.lifetime_family()?, pool.candidates.clone(), pool.slots)?))
    }

    fn spec(&self, b: Vec<f64>) -> SystemSpec {
        let theta = match self.level {
            Level::Component => ThetaSpec::Scalar(self.theta),
            Level::System => ThetaSpec::PerSubsystem(vec![self.theta; b.len()]),
        };
        SystemSpec { level: self.level, b, theta }
    }

    fn pair_scenario(&self, family: LifetimeFamily, a: &[f64], b: &[f64]) -> Scenario {
        Scenario {
            schema_version: SCHEMA_VERSION,
            family: family.token().into(),
            alpha: family.alpha(),
            structure: self.structure.clone(),
            copula: self.copula.token().into(),
            systems: vec![self.spec(a.to_vec()), self.spec(b.to_vec())],
            theta_range: None,
            grid: None,
            theorem: None,
            pool: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    /// Indices into the candidate list, ascending.
    pub chosen: Vec<usize>,
    /// Chosen spare parameters in decreasing order.
    pub spares: Vec<f64>,
    /// Full parameter vector `(b0, spares…)`.
    pub b: Vec<f64>,
    /// Tie-breaking heuristic only; not an ordering result.
    pub mean_lifetime: f64,
    /// True when the integral was cut at [`MEAN_HORIZON`].
    pub mean_truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MajorizationKind {
    Majorizes,
    WeaklySupermajorizes,
}

/// `upper` majorizes (or weakly supermajorizes) `lower`, as spare vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MajorizationPair {
    pub upper: usize,
    pub lower: usize,
    pub kind: MajorizationKind,
}

/// Outcome of a theorem checklist on allocations `a` (system A) and `b`
/// (system B).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCertificate {
    pub a: usize,
    pub b: usize,
    pub theorem: TheoremSpec,
    pub all_pass: bool,
    pub implied: Conclusion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationReport {
    pub level: Level,
    pub allocations: Vec<Allocation>,
    /// Index of the recommended allocation (first in the ranking).
    pub chosen: usize,
    /// Allocation indices from best to worst.
    pub ranking: Vec<usize>,
    /// `dominance[i][j]` is the st relation with `i` as A and `j` as B.
    pub dominance: Option<Vec<Vec<Relation>>>,
    pub majorization: Vec<MajorizationPair>,
    pub certificates: Vec<PairCertificate>,
}

impl AllocationReport {
    pub fn chosen_allocation(&self) -> &Allocation {
        &self.allocations[self.chosen]
    }

    /// Human-readable ranking table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>4}  {:<28}  {:>14}  {:>9}", "rank", "spares", "mean lifetime", "dominates");
        for (rank, &i) in self.ranking.iter().enumerate() {
            let a = &self.allocations[i];
            let spares = a.spares.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(", ");
            let mean = if a.mean_truncated { format!(">={:.6}", a.mean_lifetime) } else { format!("{:.6}", a.mean_lifetime) };
            let dominated = self.dominance.as_ref().map_or("-".to_string(), |d| {
                d[i].iter().filter(|r| **r == Relation::BBelowA).count().to_string()
            });
            let _ = writeln!(out, "{:>4}  {:<28}  {:>14}  {:>9}", rank + 1, format!("({spares})"), mean, dominated);
        }
        out
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// `∫ sf` from the support start, over doubling segments until the survival
/// falls below [`SF_CUTOFF`] or the horizon is reached.
pub fn mean_lifetime<L: Lifetime + ?Sized>(sys: &L) -> Result<(f64, bool)> {
    let start = sys.support_start();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let sf = |t: f64| match sys.sf(t) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let mut total = start;
    let mut lo = start;
    let mut width = 1.0;
    loop {
        let hi = (lo + width).min(MEAN_HORIZON.max(start + 1.0));
        let part = integrate(sf, lo, hi, MEAN_REL_TOL, 1e-14);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        total += part?;
        if sf(hi) < SF_CUTOFF {
            return Ok((total, false));
        }
        if hi >= MEAN_HORIZON {
            return Ok((total, true));
        }
        lo = hi;
        width *= 2.0;
    }
}

/// Orders allocations: better means higher mean lifetime, then larger
/// spare parameters, then lower index.
fn better(a: &Allocation, ia: usize, b: &Allocation, ib: usize) -> std::cmp::Ordering {
    let scale = a.mean_lifetime.abs().max(b.mean_lifetime.abs());
    let diff = a.mean_lifetime - b.mean_lifetime;
    let by_mean = if diff.abs() <= 1e-9 * scale { std::cmp::Ordering::Equal } else { b.mean_lifetime.total_cmp(&a.mean_lifetime) };
    by_mean
        .then_with(|| {
            b.spares.iter().zip(&a.spares).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
        .then(ia.cmp(&ib))
}

/// Kahn's topological order of the strict st dominance, choosing the best
/// available allocation (by [`better`]) at every step.
fn rank(allocations: &[Allocation], dominance: Option<&Vec<Vec<Relation>>>) -> Vec<usize> {
    let n = allocations.len();
    let mut order: Vec<usize> = (0..n).collect();
    let Some(dom) = dominance else {
        order.sort_by(|&i, &j| better(&allocations[i], i, &allocations[j], j));
        return order;
    };
    // `dom[i][j] == ABelowB` means j dominates i: j must come first.
    let mut blockers: Vec<usize> = (0..n).map(|i| (0..n).filter(|&j| dom[i][j] == Relation::ABelowB).count()).collect();
    let mut done = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let next = (0..n)
            .filter(|&i| !done[i] && blockers[i] == 0)
            .min_by(|&i, &j| better(&allocations[i], i, &allocations[j], j))
            .expect("strict st dominance is acyclic");
        done[next] = true;
        out.push(next);
        for (i, count) in blockers.iter_mut().enumerate() {
            if !done[i] && dom[i][next] == Relation::ABelowB {
                *count -= 1;
            }
        }
    }
    out
}

/// Enumerates, compares and ranks every allocation of `pool` on `base`.
pub fn recommend(pool: &SparePool, base: &AllocationBase) -> Result<AllocationReport> {
    let structure: CoherentStructure = base.structure.build()?;
    let family = pool.family;
    let grid = EvalGrid::default();
    let combos = combinations(pool.candidates.len(), pool.slots);
    let built = combos
        .par_iter()
        .map(|chosen| {
            let mut spares: Vec<f64> = chosen.iter().map(|&i| pool.candidates[i]).collect();
            spares.sort_by(|x, y| y.total_cmp(x));
            let mut b = vec![base.b0];
            b.extend_from_slice(&spares);
            let sys = scenario::build(&base.spec(b.clone()), &structure, base.copula, family)?;
            let (mean, truncated) = mean_lifetime(&sys)?;
            let curve = grid.times().iter().map(|&t| sys.sf(t)).collect::<Result<Vec<f64>>>()?;
            Ok((
                Allocation { chosen: chosen.clone(), spares, b, mean_lifetime: mean, mean_truncated: truncated },
                curve,
            ))
        })
        .collect::<Result<Vec<(Allocation, Vec<f64>)>>>()?;
    let (allocations, curves): (Vec<Allocation>, Vec<Vec<f64>>) = built.into_iter().unzip();
    let n = allocations.len();

    let dominance = (n <= DOMINANCE_BOUND).then(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let diffs: Vec<f64> = curves[j].iter().zip(&curves[i]).map(|(b, a)| b - a).collect();
                        st_relation(&diffs).0
                    })
                    .collect()
            })
            .collect::<Vec<Vec<Relation>>>()
    });

    let mut majorization = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || allocations[i].spares == allocations[j].spares {
                continue;
            }
            let (upper, lower) = (&allocations[i].spares, &allocations[j].spares);
            if majorize(upper, lower)? {
                majorization.push(MajorizationPair { upper: i, lower: j, kind: MajorizationKind::Majorizes });
            } else if weak_supermajorize(upper, lower)? {
                majorization.push(MajorizationPair { upper: i, lower: j, kind: MajorizationKind::WeaklySupermajorizes });
            }
        }
    }

    let mut certificates = Vec::new();
    if n <= CERTIFICATE_BOUND {
        let theorems: &[TheoremId] = match base.level {
            Level::Component => &[TheoremId::T3_1, TheoremId::T3_2],
            Level::System => &[TheoremId::T4_1, TheoremId::T4_2],
        };
        let grids = CheckGrids::default();
        for pair in &majorization {
            let needs_full = base.level == Level::System;
            if needs_full && pair.kind != MajorizationKind::Majorizes {
                continue;
            }
            // System A carries the majorized vector, system B the majorizing one.
            let (a, b) = (pair.lower, pair.upper);
            let s = base.pair_scenario(family, &allocations[a].b, &allocations[b].b);
            for &id in theorems {
                let cert = check_theorem(TheoremSpec::primary(id), &s, &grids)?;
                certificates.push(PairCertificate { a, b, theorem: cert.theorem, all_pass: cert.all_pass, implied: cert.implied });
            }
        }
    }

    let ranking = rank(&allocations, dominance.as_ref());
    Ok(AllocationReport { level: base.level, chosen: ranking[0], allocations, ranking, dominance, majorization, certificates })
}
