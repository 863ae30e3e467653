//! Simulation oracle for the closed-form survival functions.
//!
//! Draws are made in fixed-size chunks. Chunk `c` uses its own ChaCha8
//! stream `c` under the master seed, and chunks are merged in index order,
//! so estimates do not depend on the number of worker threads.
//!
//! Survival-copula convention: a block lifetime is `T = Ḡ⁻¹(U)` with `Ḡ`
//! decreasing, so `P(T_1 > t_1, …, T_n > t_n) = P(U_1 < Ḡ(t_1), …) =
//! C(Ḡ(t_1), …, Ḡ(t_n))`. The sampled copula therefore acts as the
//! survival copula of the block lifetimes, which is the dependence the
//! distortion is built from.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::CoherentStructure;
use crate::systems::{ComponentLevelSystem, EvalGrid, Lifetime, Provenance, RedundantSystem, SurvivalCurve, SystemLevelSystem};

pub const MIN_SAMPLES: usize = 10_000;
/// Draws per chunk; part of the reproducibility contract.
pub const CHUNK: usize = 4096;
const BISECTION_CAP: usize = 200;
const BISECTION_REL_TOL: f64 = 1e-10;

/// Empirical survival function with binomial standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub estimates: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
}

impl McEstimate {
    fn from_lifetimes(mut lifetimes: Vec<f64>, grid: &EvalGrid, seed: u64) -> Self {
        lifetimes.sort_by(f64::total_cmp);
        let n = lifetimes.len();
        let nf = n as f64;
        let estimates: Vec<f64> = grid
            .times()
            .iter()
            .map(|&t| (n - lifetimes.partition_point(|&l| l <= t)) as f64 / nf)
            .collect();
        let stderr = estimates.iter().map(|p| (p * (1.0 - p) / nf).sqrt()).collect();
        McEstimate { y: grid.ys().to_vec(), x: grid.times().to_vec(), estimates, stderr, n_samples: n, seed }
    }

    /// Number of grid points where `closed_form` lies within `k` standard
    /// errors of the estimate. A zero standard error requires exact
    /// agreement up to 1e-12.
    pub fn count_within(&self, closed_form: &[f64], k: f64) -> usize {
        self.estimates
            .iter()
            .zip(&self.stderr)
            .zip(closed_form)
            .filter(|((p, se), c)| (*p - *c).abs() <= (k * *se).max(1e-12))
            .count()
    }

    pub fn to_curve(&self) -> SurvivalCurve {
        SurvivalCurve {
            y: self.y.clone(),
            x: self.x.clone(),
            value: self.estimates.clone(),
            stderr: Some(self.stderr.clone()),
            provenance: Provenance::MonteCarlo { n_samples: self.n_samples, seed: self.seed },
        }
    }

    /// CSV with header `y,x,estimate,stderr`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Output(format!("csv output: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["y", "x", "estimate", "stderr"]).map_err(io)?;
        for i in 0..self.x.len() {
            w.serialize((self.y[i], self.x[i], self.estimates[i], self.stderr[i])).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Output(format!("csv output: {e}")))
    }
}

fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::Parameter(format!("at least {MIN_SAMPLES} samples are required, got {n_samples}")));
    }
    Ok(())
}

/// Runs `draw` once per sample, chunk by chunk, in a reproducible order.
fn chunked<F>(n_samples: usize, seed: u64, draw: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = n_samples.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n_samples - c * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.concat()
}

/// Solves `Ḡ(t) = u` for the block survival `Ḡ = 1 - Π_j F(t; b_j)` by
/// root bracketing on `ln Π_j F`. Flat regions resolve to their infimum.
fn block_inverse(sys: &ComponentLevelSystem, u: f64) -> f64 {
    let models = sys.models();
    if models.len() == 1 {
        return models[0].inverse_sf(u);
    }
    let target = (-u).ln_1p();
    if target == f64::NEG_INFINITY {
        return sys.support_start();
    }
    // Π F = 1 - u needs every F_j >= 1 - u and is reached once every
    // F_j >= (1 - u)^(1/k).
    let k = models.len() as f64;
    let each = -(target / k).exp_m1();
    let mut lo = models.iter().map(|m| m.inverse_sf(u)).fold(sys.support_start(), f64::max);
    let mut hi = models.iter().map(|m| m.inverse_sf(each)).fold(lo, f64::max);
    if !hi.is_finite() {
        hi = lo.max(1.0);
        while sys.ln_block_cdf(hi) < target && hi < f64::MAX / 4.0 {
            hi *= 2.0;
        }
    }
    // Bisection safeguarded false position (Illinois variant) on ln Π F.
    let f = |t: f64| sys.ln_block_cdf(t) - target;
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    let mut side = 0i8;
    for _ in 0..BISECTION_CAP {
        if hi - lo <= BISECTION_REL_TOL * hi || f_hi == 0.0 {
            break;
        }
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let mid = if f_lo.is_finite() && secant > lo && secant < hi { secant } else { 0.5 * (lo + hi) };
        let f_mid = f(mid);
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    hi
}


fn structure_of(sys: &ComponentLevelSystem) -> Result<&CoherentStructure> {
    sys.distortion()
        .structure()
        .ok_or_else(|| Error::Structure("simulation needs the structure behind the distortion".into()))
}

/// Simulates a system with redundancy at the component level.
pub fn simulate_component_level(
    sys: &ComponentLevelSystem,
    grid: &EvalGrid,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(n_samples)?;
    let structure = structure_of(sys)?;
    let sampler = sys.distortion().copula().sampler()?;
    let n = structure.n();
    let lifetimes = chunked(n_samples, seed, |rng| {
        let mut u = vec![0.0; n];
        sampler.fill(rng, &mut u);
        let blocks: Vec<f64> = u.iter().map(|&ui| block_inverse(sys, ui)).collect();
        structure.lifetime(&blocks)
    });
    Ok(McEstimate::from_lifetimes(lifetimes, grid, seed))
}

/// Simulates a system with redundancy at the system level: independent
/// copies of the structure, copy `j` with its own θ_j and marginal b_j.
pub fn simulate_system_level(
    sys: &SystemLevelSystem,
    grid: &EvalGrid,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(n_samples)?;
    let structure = sys.structure();
    let samplers = sys.distortions().iter().map(|d| d.copula().sampler()).collect::<Result<Vec<_>>>()?;
    let n = structure.n();
    let lifetimes = chunked(n_samples, seed, |rng| {
        let mut u = vec![0.0; n];
        let mut comps = vec![0.0; n];
        let mut best = f64::NEG_INFINITY;
        for (sampler, model) in samplers.iter().zip(sys.models()) {
            sampler.fill(rng, &mut u);
            for (c, &ui) in comps.iter_mut().zip(&u) {
                *c = model.inverse_sf(ui);
            }
            best = best.max(structure.lifetime(&comps));
        }
        best
    });
    Ok(McEstimate::from_lifetimes(lifetimes, grid, seed))
}

pub fn simulate(sys: &RedundantSystem, grid: &EvalGrid, n_samples: usize, seed: u64) -> Result<McEstimate> {
    match sys {
        RedundantSystem::Component(s) => simulate_component_level(s, grid, n_samples, seed),
        RedundantSystem::System(s) => simulate_system_level(s, grid, n_samples, seed),
    }
}

/// `points` times at which the closed-form survival equals evenly spaced
/// levels in `[0.05, 0.95]`, so every point carries information.
pub fn quantile_grid<L: Lifetime + ?Sized>(sys: &L, points: usize) -> Result<EvalGrid> {
    if points < 2 {
        return Err(Error::Grid(format!("quantile grid needs at least 2 points, got {points}")));
    }
    let start = sys.support_start();
    let mut times = Vec::with_capacity(points);
    for level in crate::shape::linspace(0.95, 0.05, points) {
        let mut lo = start;
        let mut hi = start + 1.0;
        while sys.sf(hi)? > level {
            hi = start + 2.0 * (hi - start);
            if !hi.is_finite() {
                return Err(Error::Domain(format!("survival never drops to {level}")));
            }
        }
        for _ in 0..BISECTION_CAP {
            if hi - lo <= BISECTION_REL_TOL * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if sys.sf(mid)? > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        times.push(hi);
    }
    EvalGrid::from_times(times)
}
