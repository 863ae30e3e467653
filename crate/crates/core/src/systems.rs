//! Lifetimes of systems with active spares, at component or system level.
//!
//! Component level: every component position is a block of `m + 1` parallel
//! units with parameters `b_0..b_m`. Blocks are did with block survival
//! `1 - Π_j F(t; b_j)`, so the system survival is `q(1 - Π_j F(t; b_j))`.
//!
//! System level: `m + 1` independent copies of the whole structure run in
//! parallel, copy `j` built from components `F(·; b_j)` under dependence
//! `θ_j`, so the system cdf is `Π_j (1 - q_{θ_j}(1 - F(t; b_j)))`.

use rayon::prelude::*;
use serde::Serialize;

use crate::copulas::CopulaFamily;
use crate::distributions::{LifetimeFamily, LifetimeModel};
use crate::error::{check_len, Error, Result};
use crate::prob::UnitValue;
use crate::structure::{CoherentStructure, Distortion};

/// A nonnegative random lifetime described by its distribution functions.
pub trait Lifetime: Sync {
    /// Survival probability with the cdf as its accurate complement.
    fn survival(&self, t: f64) -> Result<UnitValue>;
    fn pdf(&self, t: f64) -> Result<f64>;
    fn hazard(&self, t: f64) -> Result<f64>;
    fn rev_hazard(&self, t: f64) -> Result<f64>;
    /// Infimum of the support.
    fn support_start(&self) -> f64;

    fn sf(&self, t: f64) -> Result<f64> {
        Ok(self.survival(t)?.value())
    }

    fn cdf(&self, t: f64) -> Result<f64> {
        Ok(self.survival(t)?.complement())
    }
}

impl Lifetime for LifetimeModel {
    fn survival(&self, t: f64) -> Result<UnitValue> {
        check_time(t)?;
        Ok(LifetimeModel::survival(self, t))
    }

    fn pdf(&self, t: f64) -> Result<f64> {
        LifetimeModel::pdf(self, t)
    }

    fn hazard(&self, t: f64) -> Result<f64> {
        LifetimeModel::hazard(self, t)
    }

    fn rev_hazard(&self, t: f64) -> Result<f64> {
        LifetimeModel::rev_hazard(self, t)
    }

    fn support_start(&self) -> f64 {
        LifetimeModel::support_start(self)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() {
        return Err(Error::Domain("time is NaN".into()));
    }
    Ok(())
}

fn build_models(family: LifetimeFamily, b: &[f64]) -> Result<Vec<LifetimeModel>> {
    if b.is_empty() {
        return Err(Error::Parameter("parameter vector is empty".into()));
    }
    b.iter().map(|&bj| LifetimeModel::new(family, bj)).collect()
}

fn latest_start(models: &[LifetimeModel]) -> f64 {
    models.iter().map(|m| m.support_start()).fold(f64::NEG_INFINITY, f64::max)
}

fn check_interior(t: f64, start: f64, what: &str) -> Result<()> {
    check_time(t)?;
    if t <= start {
        return Err(Error::Domain(format!("{what} is defined for t > {start}, got {t}")));
    }
    Ok(())
}

fn hazard_from(pdf: f64, sf: f64, t: f64) -> Result<f64> {
    if sf == 0.0 {
        return Err(Error::Pole(format!("hazard at t = {t}: survival is zero")));
    }
    Ok(pdf / sf)
}

/// Active redundancy at the component level.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLevelSystem {
    distortion: Distortion,
    family: LifetimeFamily,
    b: Vec<f64>,
    models: Vec<LifetimeModel>,
}

impl ComponentLevelSystem {
    /// `b[0]` is the original unit of every block, `b[1..]` its spares.
    pub fn new(distortion: Distortion, family: LifetimeFamily, b: Vec<f64>) -> Result<Self> {
        let models = build_models(family, &b)?;
        Ok(ComponentLevelSystem { distortion, family, b, models })
    }

    pub fn distortion(&self) -> &Distortion {
        &self.distortion
    }

    pub fn family(&self) -> LifetimeFamily {
        self.family
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn models(&self) -> &[LifetimeModel] {
        &self.models
    }

    /// ln Π_j F(t; b_j), `-inf` while some unit cannot have failed yet.
    pub(crate) fn ln_block_cdf(&self, t: f64) -> f64 {
        self.models.iter().map(|m| m.ln_cdf(t)).sum()
    }

    /// Survival of one block, `1 - Π_j F(t; b_j)`.
    pub fn block_survival(&self, t: f64) -> UnitValue {
        UnitValue::from_ln_complement(self.ln_block_cdf(t))
    }

    fn block_eval(&self, t: f64) -> Result<(f64, crate::structure::DistortionEval)> {
        let ln_p = self.ln_block_cdf(t);
        let e = self.distortion.eval(UnitValue::from_ln_complement(ln_p))?;
        Ok((ln_p.exp(), e))
    }

    fn sum_rev_hazard(&self, t: f64) -> Result<f64> {
        self.models.iter().map(|m| m.rev_hazard(t)).sum()
    }
}

impl Lifetime for ComponentLevelSystem {
    fn survival(&self, t: f64) -> Result<UnitValue> {
        check_time(t)?;
        Ok(self.block_eval(t)?.1.q_unit())
    }

    /// `q'(v) Π F Σ r̃h` with `v = 1 - Π F`.
    fn pdf(&self, t: f64) -> Result<f64> {
        check_interior(t, self.support_start(), "pdf")?;
        let (p, e) = self.block_eval(t)?;
        if p == 0.0 {
            return Ok(0.0);
        }
        Ok(e.dq * p * self.sum_rev_hazard(t)?)
    }

    fn hazard(&self, t: f64) -> Result<f64> {
        let pdf = self.pdf(t)?;
        hazard_from(pdf, self.sf(t)?, t)
    }

    /// `q'(v) (1 - v) Σ r̃h / (1 - q(v))` with `v = 1 - Π F`.
    fn rev_hazard(&self, t: f64) -> Result<f64> {
        check_interior(t, self.support_start(), "reversed hazard")?;
        let (p, e) = self.block_eval(t)?;
        if e.q_bar == 0.0 {
            return Err(Error::Pole(format!("reversed hazard at t = {t}: cdf is zero")));
        }
        Ok(e.dq * p / e.q_bar * self.sum_rev_hazard(t)?)
    }

    fn support_start(&self) -> f64 {
        latest_start(&self.models)
    }
}

/// Active redundancy at the system level: `m + 1` independent copies of the
/// structure in parallel.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemLevelSystem {
    structure: CoherentStructure,
    copula_family: CopulaFamily,
    thetas: Vec<f64>,
    family: LifetimeFamily,
    b: Vec<f64>,
    models: Vec<LifetimeModel>,
    distortions: Vec<Distortion>,
}

impl SystemLevelSystem {
    pub fn new(
        structure: CoherentStructure,
        copula_family: CopulaFamily,
        thetas: Vec<f64>,
        family: LifetimeFamily,
        b: Vec<f64>,
    ) -> Result<Self> {
        check_len(thetas.len(), b.len())?;
        let models = build_models(family, &b)?;
        let base = Distortion::new(&structure, copula_family, thetas[0])?;
        let distortions = thetas.iter().map(|&th| base.with_theta(th)).collect::<Result<Vec<_>>>()?;
        Ok(SystemLevelSystem { structure, copula_family, thetas, family, b, models, distortions })
    }

    pub fn structure(&self) -> &CoherentStructure {
        &self.structure
    }

    pub fn copula_family(&self) -> CopulaFamily {
        self.copula_family
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn family(&self) -> LifetimeFamily {
        self.family
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn distortions(&self) -> &[Distortion] {
        &self.distortions
    }

    pub fn models(&self) -> &[LifetimeModel] {
        &self.models
    }

    fn subsystems(&self, t: f64) -> Result<Vec<(UnitValue, crate::structure::DistortionEval)>> {
        self.models
            .iter()
            .zip(&self.distortions)
            .map(|(m, d)| {
                let s = m.survival(t);
                Ok((s, d.eval(s)?))
            })
            .collect()
    }
}

impl Lifetime for SystemLevelSystem {
    fn survival(&self, t: f64) -> Result<UnitValue> {
        check_time(t)?;
        let ln_cdf: f64 = self.subsystems(t)?.iter().map(|(_, e)| e.q_unit().ln_complement()).sum();
        Ok(UnitValue::from_ln_complement(ln_cdf))
    }

    /// `Σ_j q'_j(F̄_j) f_j Π_{k≠j} (1 - q_k(F̄_k))`.
    fn pdf(&self, t: f64) -> Result<f64> {
        check_interior(t, self.support_start(), "pdf")?;
        let subs = self.subsystems(t)?;
        let n = subs.len();
        let mut prefix = vec![1.0; n + 1];
        for (i, (_, e)) in subs.iter().enumerate() {
            prefix[i + 1] = prefix[i] * e.q_bar;
        }
        let mut suffix = 1.0;
        let mut total = 0.0;
        for i in (0..n).rev() {
            let f = self.models[i].pdf(t)?;
            total += subs[i].1.dq * f * prefix[i] * suffix;
            suffix *= subs[i].1.q_bar;
        }
        Ok(total)
    }

    fn hazard(&self, t: f64) -> Result<f64> {
        let pdf = self.pdf(t)?;
        hazard_from(pdf, self.sf(t)?, t)
    }

    /// `Σ_j q'_j(F̄_j) F̄_j h_j / (1 - q_j(F̄_j))`.
    fn rev_hazard(&self, t: f64) -> Result<f64> {
        check_interior(t, self.support_start(), "reversed hazard")?;
        let mut total = 0.0;
        for ((s, e), m) in self.subsystems(t)?.iter().zip(&self.models) {
            if e.q_bar == 0.0 {
                return Err(Error::Pole(format!("reversed hazard at t = {t}: cdf is zero")));
            }
            total += e.dq * s.value() / e.q_bar * m.hazard(t)?;
        }
        Ok(total)
    }

    fn support_start(&self) -> f64 {
        latest_start(&self.models)
    }
}

/// Either redundancy level behind one type.
#[derive(Debug, Clone, PartialEq)]
pub enum RedundantSystem {
    Component(ComponentLevelSystem),
    System(SystemLevelSystem),
}

impl RedundantSystem {
    pub fn b(&self) -> &[f64] {
        match self {
            RedundantSystem::Component(s) => s.b(),
            RedundantSystem::System(s) => s.b(),
        }
    }

    pub fn family(&self) -> LifetimeFamily {
        match self {
            RedundantSystem::Component(s) => s.family(),
            RedundantSystem::System(s) => s.family(),
        }
    }

    fn inner(&self) -> &dyn Lifetime {
        match self {
            RedundantSystem::Component(s) => s,
            RedundantSystem::System(s) => s,
        }
    }
}

impl Lifetime for RedundantSystem {
    fn survival(&self, t: f64) -> Result<UnitValue> {
        self.inner().survival(t)
    }

    fn pdf(&self, t: f64) -> Result<f64> {
        self.inner().pdf(t)
    }

    fn hazard(&self, t: f64) -> Result<f64> {
        self.inner().hazard(t)
    }

    fn rev_hazard(&self, t: f64) -> Result<f64> {
        self.inner().rev_hazard(t)
    }

    fn support_start(&self) -> f64 {
        self.inner().support_start()
    }
}

/// Evaluation points `x = -ln y`, stored in increasing time order.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    y: Vec<f64>,
    x: Vec<f64>,
}

pub const DEFAULT_GRID_POINTS: usize = 2000;
pub const DEFAULT_Y_MIN: f64 = 1e-4;
pub const DEFAULT_Y_MAX: f64 = 1.0 - 1e-4;

impl Default for EvalGrid {
    fn default() -> Self {
        EvalGrid::uniform_y(DEFAULT_GRID_POINTS, DEFAULT_Y_MIN, DEFAULT_Y_MAX).expect("valid default grid")
    }
}

impl EvalGrid {
    /// `points` values of `y` equally spaced on `[y_min, y_max] ⊂ (0, 1)`.
    pub fn uniform_y(points: usize, y_min: f64, y_max: f64) -> Result<Self> {
        if points < 2 {
            return Err(Error::Grid(format!("grid needs at least 2 points, got {points}")));
        }
        if !(0.0 < y_min && y_min < y_max && y_max < 1.0) {
            return Err(Error::Grid(format!("need 0 < y_min < y_max < 1, got [{y_min}, {y_max}]")));
        }
        let y: Vec<f64> = crate::shape::linspace(y_max, y_min, points);
        let x = y.iter().map(|v| -v.ln()).collect();
        Ok(EvalGrid { y, x })
    }

    /// Grid from explicit, strictly increasing nonnegative times.
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Grid("empty time grid".into()));
        }
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Grid("times must be finite, nonnegative and strictly increasing".into()));
        }
        let y = times.iter().map(|t| (-t).exp()).collect();
        Ok(EvalGrid { y, x: times })
    }

    pub fn times(&self) -> &[f64] {
        &self.x
    }

    pub fn ys(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Keeps only times strictly above `start`.
    pub fn after(&self, start: f64) -> EvalGrid {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.x[i] > start).collect();
        EvalGrid { y: keep.iter().map(|&i| self.y[i]).collect(), x: keep.iter().map(|&i| self.x[i]).collect() }
    }
}

/// Which function of a lifetime a curve holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Sf,
    Cdf,
    Pdf,
    Hazard,
    RevHazard,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [Quantity::Sf, Quantity::Cdf, Quantity::Pdf, Quantity::Hazard, Quantity::RevHazard];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Sf => "sf",
            Quantity::Cdf => "cdf",
            Quantity::Pdf => "pdf",
            Quantity::Hazard => "hazard",
            Quantity::RevHazard => "rev_hazard",
        }
    }

    pub fn eval<L: Lifetime + ?Sized>(&self, sys: &L, t: f64) -> Result<f64> {
        match self {
            Quantity::Sf => sys.sf(t),
            Quantity::Cdf => sys.cdf(t),
            Quantity::Pdf => sys.pdf(t),
            Quantity::Hazard => sys.hazard(t),
            Quantity::RevHazard => sys.rev_hazard(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    MonteCarlo { n_samples: usize, seed: u64 },
}

/// Values of one function on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalCurve {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub value: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<Vec<f64>>,
    pub provenance: Provenance,
}

impl SurvivalCurve {
    /// Evaluates `quantity` at every grid point; points are independent so
    /// the work is spread over threads without affecting the result.
    pub fn evaluate<L: Lifetime + ?Sized>(sys: &L, grid: &EvalGrid, quantity: Quantity) -> Result<Self> {
        let value = grid
            .times()
            .par_iter()
            .map(|&t| quantity.eval(sys, t))
            .collect::<Result<Vec<f64>>>()?;
        Ok(SurvivalCurve {
            y: grid.ys().to_vec(),
            x: grid.times().to_vec(),
            value,
            stderr: None,
            provenance: Provenance::ClosedForm,
        })
    }

    /// CSV with header `y,x,value[,stderr]`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Output(format!("csv output: {e}"));
        let mut header = vec!["y", "x", "value"];
        if self.stderr.is_some() {
            header.push("stderr");
        }
        w.write_record(&header).map_err(io)?;
        for i in 0..self.x.len() {
            let mut row = vec![format!("{:?}", self.y[i]), format!("{:?}", self.x[i]), format!("{:?}", self.value[i])];
            if let Some(se) = &self.stderr {
                row.push(format!("{:?}", se[i]));
            }
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Output(format!("csv output: {e}")))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn component(
        structure: CoherentStructure,
        copula: CopulaFamily,
        theta: f64,
        family: LifetimeFamily,
        b: &[f64],
    ) -> ComponentLevelSystem {
        let d = Distortion::new(&structure, copula, theta).unwrap();
        ComponentLevelSystem::new(d, family, b.to_vec()).unwrap()
    }

    fn ex31() -> ComponentLevelSystem {
        component(
            CoherentStructure::k_out_of_n(3, 4).unwrap(),
            CopulaFamily::Gumbel,
            20.0,
            LifetimeFamily::Lomax,
            &[1.2, 0.5, 0.4, 0.2],
        )
    }

    fn ex38() -> ComponentLevelSystem {
        component(
            CoherentStructure::k_out_of_n(2, 3).unwrap(),
            CopulaFamily::Clayton,
            15.0,
            LifetimeFamily::Weibull,
            &[1.6, 0.5, 0.3, 0.2],
        )
    }

    #[test]
    fn boundary_values() {
        let s = ex31();
        assert_eq!(s.sf(0.0).unwrap(), 1.0);
        assert_eq!(s.sf(f64::INFINITY).unwrap(), 0.0);
        let sys = SystemLevelSystem::new(
            CoherentStructure::k_out_of_n(3, 4).unwrap(),
            CopulaFamily::Clayton,
            vec![8.5, 8.5],
            LifetimeFamily::Rayleigh,
            vec![1.5, 1.5],
        )
        .unwrap();
        assert_eq!(sys.sf(0.0).unwrap(), 1.0);
        assert!(sys.pdf(0.0).is_err());
    }

    #[test]
    fn single_unit_reductions() {
        let one = CoherentStructure::series(1).unwrap();
        let marginal = LifetimeModel::new(LifetimeFamily::Lomax, 0.7).unwrap();
        let s = component(one.clone(), CopulaFamily::Clayton, 2.0, LifetimeFamily::Lomax, &[0.7]);
        for &t in &[0.1, 1.0, 7.0] {
            assert!((s.sf(t).unwrap() - marginal.sf(t)).abs() < 1e-15);
            let pdf = s.pdf(t).unwrap();
            assert!((pdf - marginal.pdf(t).unwrap()).abs() < 1e-14 * pdf);
            let rh = s.rev_hazard(t).unwrap();
            assert!((rh - marginal.rev_hazard(t).unwrap()).abs() < 1e-13 * rh);
        }
        // Component and system level coincide for a single-component structure.
        let b = [0.9, 0.4, 0.2];
        let c = component(one.clone(), CopulaFamily::Gumbel, 3.0, LifetimeFamily::Weibull, &b);
        let sys = SystemLevelSystem::new(one, CopulaFamily::Gumbel, vec![3.0; 3], LifetimeFamily::Weibull, b.to_vec()).unwrap();
        for &t in EvalGrid::default().times() {
            assert!((c.sf(t).unwrap() - sys.sf(t).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn system_level_single_copy() {
        let k34 = CoherentStructure::k_out_of_n(3, 4).unwrap();
        let sys = SystemLevelSystem::new(k34.clone(), CopulaFamily::Gumbel, vec![4.0], LifetimeFamily::Lomax, vec![0.6]).unwrap();
        let d = Distortion::new(&k34, CopulaFamily::Gumbel, 4.0).unwrap();
        let m = LifetimeModel::new(LifetimeFamily::Lomax, 0.6).unwrap();
        for &t in &[0.05, 0.5, 3.0, 40.0] {
            assert!((sys.sf(t).unwrap() - d.q(m.sf(t)).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn densities_match_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s31 = ex31();
        let s41 = SystemLevelSystem::new(
            CoherentStructure::k_out_of_n(3, 4).unwrap(),
            CopulaFamily::Clayton,
            vec![8.5, 8.5],
            LifetimeFamily::Rayleigh,
            vec![1.5, 1.5],
        )
        .unwrap();
        let systems: [&dyn Lifetime; 2] = [&s31, &s41];
        for sys in systems {
            for _ in 0..100 {
                let t: f64 = rng.random_range(0.05..4.0);
                // Difference whichever side of the distribution is small.
                let side = |x: f64| {
                    let s = sys.survival(x).unwrap();
                    if s.complement() < 0.5 { s.complement() } else { -s.value() }
                };
                let fd = numdiff::derivative(side, t, 1e-4 * t);
                let pdf = sys.pdf(t).unwrap();
                assert!((fd - pdf).abs() <= 1e-5 * pdf, "t={t}: {fd} vs {pdf}");
                let rh = sys.rev_hazard(t).unwrap();
                assert!((rh - pdf / sys.cdf(t).unwrap()).abs() <= 1e-9 * rh);
                let h = sys.hazard(t).unwrap();
                assert!((h - pdf / sys.sf(t).unwrap()).abs() <= 1e-9 * h);
            }
        }
    }

    #[test]
    fn rev_hazard_consistent_for_weibull_block() {
        let s = ex38();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let t: f64 = rng.random_range(1e-3..6.0);
            let rh = s.rev_hazard(t).unwrap();
            let ratio = s.pdf(t).unwrap() / s.cdf(t).unwrap();
            assert!((rh - ratio).abs() <= 1e-9 * rh, "t={t}");
        }
    }

    #[test]
    fn density_normalized() {
        let s = component(
            CoherentStructure::new(4, vec![vec![1], vec![2, 3, 4]]).unwrap(),
            CopulaFamily::Clayton,
            7.0,
            LifetimeFamily::InvertedExponential,
            &[0.05, 0.05, 0.04, 0.02],
        );
        let mut total = 0.0;
        let mut lo = 0.0;
        let mut hi = 1e-3;
        while hi <= 1e6 {
            total += crate::quad::integrate(|t| s.pdf(t.max(1e-300)).unwrap(), lo, hi, 1e-10, 1e-14).unwrap();
            lo = hi;
            hi *= 2.0;
        }
        let mass = total + s.sf(lo).unwrap();
        assert!((mass - 1.0).abs() < 1e-4, "mass {mass}");
    }

    #[test]
    fn sf_curves_nonincreasing() {
        let grid = EvalGrid::default();
        let curve = SurvivalCurve::evaluate(&ex31(), &grid, Quantity::Sf).unwrap();
        for w in curve.value.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
        assert!(curve.value.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn default_grid_shape() {
        let g = EvalGrid::default();
        assert_eq!(g.len(), 2000);
        assert!((g.ys()[0] - (1.0 - 1e-4)).abs() < 1e-15);
        assert!((g.times()[1999] + 1e-4f64.ln()).abs() < 1e-12);
        assert!(g.times().windows(2).all(|w| w[1] > w[0]));
        assert!(EvalGrid::uniform_y(1, 0.1, 0.9).is_err());
        assert!(EvalGrid::uniform_y(10, 0.0, 0.9).is_err());
        assert!(EvalGrid::from_times(vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn csv_layout() {
        let grid = EvalGrid::from_times(vec![0.5, 1.0]).unwrap();
        let curve = SurvivalCurve::evaluate(&ex31(), &grid, Quantity::Sf).unwrap();
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("y,x,value\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
