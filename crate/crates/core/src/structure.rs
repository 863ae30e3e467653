//! Coherent structures and their distortion functions.
//!
//! For did components with survival copula `C`, the system reliability is
//! `q(u) = Σ_j a_j D_j(u)` where `u` is the common component reliability,
//! `D_j` the copula's partial diagonal and `a_j` the signed inclusion–exclusion
//! coefficient of all path-set unions of size `j`.
//!
//! Near `u = 1` the individual terms all approach one and cancel, so `1 - q`
//! and `q'` are evaluated there from power series whose coefficients are
//! exact integer moments of the coefficient map.

use std::collections::BTreeMap;

use crate::copulas::{CopulaFamily, CopulaSpec};
use crate::error::{Error, Result};
use crate::prob::UnitValue;

/// Largest number of minimal path sets accepted by the inclusion–exclusion
/// enumeration.
pub const MAX_PATH_SETS: usize = 25;

const MAX_COMPONENTS: usize = 64;

/// A coherent system given by its minimal path sets over components `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentStructure {
    n: usize,
    path_sets: Vec<Vec<usize>>,
    masks: Vec<u64>,
    k_of_n: Option<(usize, usize)>,
}

impl CoherentStructure {
    /// Validates minimality (no path set contains another) and relevance
    /// (every component lies on some path set).
    pub fn new(n: usize, path_sets: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Structure("a structure needs at least one component".into()));
        }
        if n > MAX_COMPONENTS {
            return Err(Error::TooLarge { what: format!("{n} components"), bound: MAX_COMPONENTS });
        }
        if path_sets.is_empty() {
            return Err(Error::Structure("no path sets given".into()));
        }
        let mut masks = Vec::with_capacity(path_sets.len());
        let mut normalized = Vec::with_capacity(path_sets.len());
        for set in &path_sets {
            if set.is_empty() {
                return Err(Error::Structure("empty path set".into()));
            }
            let mut mask = 0u64;
            for &c in set {
                if c == 0 || c > n {
                    return Err(Error::Structure(format!("component {c} outside 1..={n}")));
                }
                let bit = 1u64 << (c - 1);
                if mask & bit != 0 {
                    return Err(Error::Structure(format!("component {c} repeated in a path set")));
                }
                mask |= bit;
            }
            let mut sorted = set.clone();
            sorted.sort_unstable();
            masks.push(mask);
            normalized.push(sorted);
        }
        for (i, &a) in masks.iter().enumerate() {
            for (k, &b) in masks.iter().enumerate() {
                if i != k && a & b == a {
                    return Err(Error::Structure(format!(
                        "path set {:?} is contained in {:?}",
                        normalized[i], normalized[k]
                    )));
                }
            }
        }
        let union = masks.iter().fold(0u64, |acc, m| acc | m);
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if union != full {
            let missing: Vec<usize> = (1..=n).filter(|c| union & (1 << (c - 1)) == 0).collect();
            return Err(Error::Structure(format!("components {missing:?} are irrelevant")));
        }
        Ok(CoherentStructure { n, path_sets: normalized, masks, k_of_n: None })
    }

    /// The system works iff at least `k` of its `n` components work.
    pub fn k_out_of_n(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Structure(format!("k-out-of-n needs 1 <= k <= n, got k={k}, n={n}")));
        }
        let count = binomial(n as u64, k as u64);
        if count > MAX_PATH_SETS as u128 * 1000 {
            return Err(Error::TooLarge { what: format!("{count} path sets"), bound: MAX_PATH_SETS });
        }
        let mut sets = Vec::new();
        let mut current = Vec::with_capacity(k);
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for c in start..=n {
                cur.push(c);
                rec(c + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(1, n, k, &mut current, &mut sets);
        let mut s = CoherentStructure::new(n, sets)?;
        s.k_of_n = Some((k, n));
        Ok(s)
    }

    pub fn series(n: usize) -> Result<Self> {
        Self::k_out_of_n(n, n)
    }

    pub fn parallel(n: usize) -> Result<Self> {
        Self::k_out_of_n(1, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn path_sets(&self) -> &[Vec<usize>] {
        &self.path_sets
    }

    /// `(k, n)` when built by [`CoherentStructure::k_out_of_n`].
    pub fn as_k_of_n(&self) -> Option<(usize, usize)> {
        self.k_of_n
    }

    /// Structure lifetime from component lifetimes: best path, weakest link.
    pub fn lifetime(&self, components: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for set in &self.path_sets {
            let mut worst = f64::INFINITY;
            for &c in set {
                worst = worst.min(components[c - 1]);
            }
            best = best.max(worst);
        }
        best
    }

    /// Signed coefficients `a_j` by inclusion–exclusion over all nonempty
    /// sub-collections of path sets.
    pub fn distortion_coefficients(&self) -> Result<BTreeMap<usize, i64>> {
        if self.masks.len() > MAX_PATH_SETS {
            return Err(Error::TooLarge {
                what: format!("{} path sets", self.masks.len()),
                bound: MAX_PATH_SETS,
            });
        }
        let mut counts = vec![0i64; self.n + 1];
        fn rec(masks: &[u64], idx: usize, union: u64, size: usize, counts: &mut [i64]) {
            for i in idx..masks.len() {
                let u = union | masks[i];
                let sign = if size.is_multiple_of(2) { 1 } else { -1 };
                counts[u.count_ones() as usize] += sign;
                rec(masks, i + 1, u, size + 1, counts);
            }
        }
        rec(&self.masks, 0, 0, 0, &mut counts);
        Ok(counts
            .into_iter()
            .enumerate()
            .filter(|&(_, a)| a != 0)
            .collect())
    }

    /// Reliability polynomial `Σ a_j u^j` for independent components.
    pub fn reliability_polynomial(&self, u: f64) -> Result<f64> {
        Ok(self
            .distortion_coefficients()?
            .iter()
            .map(|(&j, &a)| a as f64 * u.powi(j as i32))
            .sum())
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Number of series terms kept near `u = 1`.
const SERIES_TERMS: usize = 160;
/// Series are used while their geometric ratio stays below this.
const SERIES_RATIO: f64 = 0.2;

/// Value of `q` with accurate `1 - q` and the first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionEval {
    pub q: f64,
    pub q_bar: f64,
    pub dq: f64,
    pub d2q: f64,
}

impl DistortionEval {
    pub fn q_unit(&self) -> UnitValue {
        UnitValue::new(self.q, self.q_bar)
    }
}

/// Distortion function of a structure under an exchangeable copula.
#[derive(Debug, Clone, PartialEq)]
pub struct Distortion {
    coeffs: Vec<(usize, i64)>,
    copula: CopulaSpec,
    structure: Option<CoherentStructure>,
    j_max: usize,
    abs_sum: f64,
    /// Exact moments Σ a_j j^k.
    moments: Vec<f64>,
    /// Gumbel moments Σ a_j c_j^k with c_j = j^(1/θ).
    gumbel_moments: Vec<f64>,
    /// FGM coefficients of the polynomial Σ a_j (1 - p)^j in powers of p.
    fgm_poly: Vec<f64>,
}

impl Distortion {
    pub fn new(structure: &CoherentStructure, family: CopulaFamily, theta: f64) -> Result<Self> {
        let copula = CopulaSpec::new(family, theta, structure.n())?;
        let mut d = Self::from_coefficients(structure.distortion_coefficients()?, copula)?;
        d.structure = Some(structure.clone());
        Ok(d)
    }

    /// Builds a distortion from an explicit coefficient map, which must sum
    /// to one and only use subset sizes up to the copula dimension.
    pub fn from_coefficients(coeffs: BTreeMap<usize, i64>, copula: CopulaSpec) -> Result<Self> {
        let coeffs: Vec<(usize, i64)> = coeffs.into_iter().filter(|&(_, a)| a != 0).collect();
        if coeffs.iter().map(|&(_, a)| a).sum::<i64>() != 1 {
            return Err(Error::Structure("distortion coefficients must sum to 1".into()));
        }
        if let Some(&(j, _)) = coeffs.iter().find(|&&(j, _)| j == 0 || j > copula.dim()) {
            return Err(Error::Structure(format!(
                "subset size {j} outside 1..={}",
                copula.dim()
            )));
        }
        let j_max = coeffs.iter().map(|&(j, _)| j).max().unwrap_or(1);
        let abs_sum = coeffs.iter().map(|&(_, a)| a.abs() as f64).sum();
        let moments = integer_moments(&coeffs);
        let mut d = Distortion {
            coeffs,
            copula,
            structure: None,
            j_max,
            abs_sum,
            moments,
            gumbel_moments: Vec::new(),
            fgm_poly: Vec::new(),
        };
        d.prepare_family_terms();
        Ok(d)
    }

    fn prepare_family_terms(&mut self) {
        self.gumbel_moments.clear();
        self.fgm_poly.clear();
        match self.copula.family() {
            CopulaFamily::Gumbel => {
                // c_j^k = j^k exp(k ln j (1/θ - 1)); splitting off the exact
                // integer moment keeps the sum accurate for θ near 1.
                let shift = 1.0 / self.copula.theta() - 1.0;
                for k in 0..=SERIES_TERMS {
                    let mut extra = 0.0;
                    for &(j, a) in &self.coeffs {
                        let jf = j as f64;
                        extra += a as f64 * jf.powi(k as i32) * (k as f64 * jf.ln() * shift).exp_m1();
                    }
                    self.gumbel_moments.push(self.moments[k] + extra);
                }
            }
            CopulaFamily::Fgm => {
                let n = self.copula.dim();
                let mut poly = vec![0i128; n + 1];
                for &(j, a) in &self.coeffs {
                    for (k, c) in poly.iter_mut().enumerate().take(j + 1) {
                        let sign = if k % 2 == 0 { 1 } else { -1 };
                        *c += sign * a as i128 * binomial(j as u64, k as u64) as i128;
                    }
                }
                self.fgm_poly = poly.into_iter().map(|c| c as f64).collect();
            }
            CopulaFamily::Clayton => {}
        }
    }

    /// Same coefficients under a different dependence parameter.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        let copula = CopulaSpec::new(self.copula.family(), theta, self.copula.dim())?;
        let mut d = self.clone();
        d.copula = copula;
        d.prepare_family_terms();
        Ok(d)
    }

    pub fn coefficients(&self) -> BTreeMap<usize, i64> {
        self.coeffs.iter().copied().collect()
    }

    pub fn copula(&self) -> &CopulaSpec {
        &self.copula
    }

    pub fn theta(&self) -> f64 {
        self.copula.theta()
    }

    pub fn structure(&self) -> Option<&CoherentStructure> {
        self.structure.as_ref()
    }

    pub fn q(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.eval(UnitValue::from_value(u))?.q)
    }

    /// `q'(u)`, with `u` clamped to `[1e-12, 1 - 1e-12]`.
    pub fn q_prime(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.eval(UnitValue::from_value(u.clamp(1e-12, 1.0 - 1e-12)))?.dq)
    }

    /// `q''(u)`, with `u` clamped to `[1e-12, 1 - 1e-12]`.
    pub fn q_second(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.eval(UnitValue::from_value(u.clamp(1e-12, 1.0 - 1e-12)))?.d2q)
    }

    /// Full evaluation at a complement-aware argument.
    pub fn eval(&self, u: UnitValue) -> Result<DistortionEval> {
        if !u.is_valid() {
            return Err(Error::Domain(format!(
                "distortion argument ({}, {}) outside [0, 1]",
                u.value(),
                u.complement()
            )));
        }
        if u.value() == 0.0 {
            // q(0) = 0 exactly; derivatives are taken just inside the interval.
            let inner = self.eval(UnitValue::from_value(1e-12))?;
            return Ok(DistortionEval { q: 0.0, q_bar: 1.0, dq: inner.dq, d2q: inner.d2q });
        }
        let series = match self.copula.family() {
            CopulaFamily::Clayton => self.clayton_series(u),
            CopulaFamily::Gumbel => self.gumbel_series(u),
            CopulaFamily::Fgm => self.fgm_near_one(u),
        };
        match series {
            Some(e) => Ok(e),
            None => self.direct(u),
        }
    }

    fn direct(&self, u: UnitValue) -> Result<DistortionEval> {
        let (mut q, mut q_bar, mut dq, mut d2q) = (0.0, 0.0, 0.0, 0.0);
        for &(j, a) in &self.coeffs {
            let t = self.copula.diagonal(j, u)?;
            let a = a as f64;
            q += a * t.value;
            q_bar += a * t.complement;
            dq += a * t.d1;
            d2q += a * t.d2;
        }
        Ok(DistortionEval { q, q_bar, dq, d2q })
    }

    /// Expansion of Σ a_j (1 + j z)^(-1/θ) in z = u^-θ - 1.
    fn clayton_series(&self, u: UnitValue) -> Option<DistortionEval> {
        let theta = self.copula.theta();
        let ln_u = u.ln_value();
        let z = (-theta * ln_u).exp_m1();
        let ratio = self.j_max as f64 * z.abs() * (1.0 / theta.abs()).max(1.0);
        if !(ratio <= SERIES_RATIO) {
            return None;
        }
        let e = -1.0 / theta;
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        let mut psi = 1.0;
        let mut z_pow = [1.0, 0.0, 0.0]; // z^k, z^(k-1), z^(k-2)
        let mut bound = self.abs_sum;
        for k in 1..=SERIES_TERMS {
            psi *= (e - (k - 1) as f64) / k as f64;
            z_pow = [z_pow[0] * z, z_pow[0], z_pow[1]];
            let c = psi * self.moments[k];
            let kf = k as f64;
            s0 += c * z_pow[0];
            s1 += kf * c * z_pow[1];
            s2 += kf * (kf - 1.0) * c * z_pow[2];
            bound *= ratio;
            if k >= 3 && converged(bound * kf * kf, &[s0, s1 * z, s2 * z * z]) {
                break;
            }
        }
        let q_bar = -s0;
        // z' = -θ (1 + z) / u, z'' = θ (θ + 1) (1 + z) / u².
        let uv = u.value();
        let dz = -theta * (1.0 + z) / uv;
        let d2z = theta * (theta + 1.0) * (1.0 + z) / (uv * uv);
        Some(DistortionEval { q: 1.0 - q_bar, q_bar, dq: s1 * dz, d2q: s2 * dz * dz + s1 * d2z })
    }

    /// Expansion of Σ a_j exp(-c_j L) in L = -ln u.
    fn gumbel_series(&self, u: UnitValue) -> Option<DistortionEval> {
        let theta = self.copula.theta();
        let l = -u.ln_value();
        let c_max = (self.j_max as f64).powf(1.0 / theta);
        let ratio = c_max * l;
        if !(ratio <= SERIES_RATIO) {
            return None;
        }
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        // (-L)^k / k!, (-L)^(k-1) / (k-1)!, (-L)^(k-2) / (k-2)!
        let mut pw = [1.0, 0.0, 0.0];
        let mut bound = self.abs_sum;
        for k in 1..=SERIES_TERMS {
            let next = pw[0] * (-l) / k as f64;
            pw = [next, pw[0], pw[1]];
            let nu = self.gumbel_moments[k];
            s0 += nu * pw[0];
            s1 -= nu * pw[1];
            s2 += nu * pw[2];
            bound *= ratio / k as f64;
            if k >= 3 && converged(bound * (k * k) as f64, &[s0, s1 * l, s2 * l * l]) {
                break;
            }
        }
        // s1 = dq/dL, s2 = d²q/dL²; L' = -1/u, L'' = 1/u².
        let q_bar = -s0;
        let uv = u.value();
        let dq = -s1 / uv;
        let d2q = (s2 + s1) / (uv * uv);
        Some(DistortionEval { q: 1.0 - q_bar, q_bar, dq, d2q })
    }

    /// Exact re-expansion in p = 1 - u for the upper half of the interval.
    fn fgm_near_one(&self, u: UnitValue) -> Option<DistortionEval> {
        let uv = u.value();
        if uv < 0.5 {
            return None;
        }
        let p = u.complement();
        let theta = self.copula.theta();
        let n = self.copula.dim();
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for k in (1..self.fgm_poly.len()).rev() {
            let kf = k as f64;
            s0 = s0 * p + self.fgm_poly[k];
            s1 = s1 * p + kf * self.fgm_poly[k];
            if k >= 2 {
                s2 = s2 * p + kf * (kf - 1.0) * self.fgm_poly[k];
            }
        }
        // Horner sums: s0 = Σ_{k≥1} β_k p^(k-1), s1 = Σ k β_k p^(k-1),
        // s2 = Σ k(k-1) β_k p^(k-2).
        let poly_tail = s0 * p;
        // A one-dimensional copula has no dependence term.
        let a_n = if n < 2 { 0.0 } else { self
            .coeffs
            .iter()
            .find(|&&(j, _)| j == n)
            .map(|&(_, a)| a as f64)
            .unwrap_or(0.0) };
        let nf = n as f64;
        let s = uv * p;
        let ni = n as i32;
        let g = s.powi(ni);
        let g1 = nf * s.powi(ni - 1) * (1.0 - 2.0 * uv);
        let g2 = if n >= 2 {
            nf * ((nf - 1.0) * s.powi(ni - 2) * (1.0 - 2.0 * uv).powi(2) - 2.0 * s.powi(ni - 1))
        } else {
            -2.0
        };
        let extra = a_n * theta;
        let q_bar = -poly_tail - extra * g;
        let dq = -s1 + extra * g1;
        let d2q = s2 + extra * g2;
        Some(DistortionEval { q: 1.0 - q_bar, q_bar, dq, d2q })
    }

    /// Largest |q(u) - printed form| over `u_grid`.
    pub fn check_closed_form(&self, form: PrintedForm, u_grid: &[f64]) -> Result<f64> {
        let theta = self.copula.theta();
        let mut worst: f64 = 0.0;
        for &u in u_grid {
            let dev = (self.q(u)? - form.eval(theta, u)).abs();
            worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
        }
        Ok(worst)
    }
}

fn converged(bound: f64, sums: &[f64]) -> bool {
    if bound == 0.0 {
        return true;
    }
    let scale = sums
        .iter()
        .map(|s| s.abs())
        .filter(|&s| s > 0.0)
        .fold(f64::INFINITY, f64::min);
    scale.is_finite() && bound <= 1e-17 * scale
}

fn check_unit(u: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("distortion argument {u} outside [0, 1]")));
    }
    Ok(())
}

/// Σ a_j j^k for k = 0..=SERIES_TERMS, exact while the integers fit.
fn integer_moments(coeffs: &[(usize, i64)]) -> Vec<f64> {
    let mut out = Vec::with_capacity(SERIES_TERMS + 1);
    for k in 0..=SERIES_TERMS {
        let exact = coeffs.iter().try_fold(0i128, |acc, &(j, a)| {
            let p = (j as i128).checked_pow(k as u32)?;
            acc.checked_add(p.checked_mul(a as i128)?)
        });
        out.push(match exact {
            Some(v) => v as f64,
            None => coeffs.iter().map(|&(j, a)| a as f64 * (j as f64).powi(k as i32)).sum(),
        });
    }
    out
}

/// The four distortions printed in closed form for the worked examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrintedForm {
    /// 3-out-of-4 under Gumbel: 4 e^{-(3 L^θ)^{1/θ}} - 3 e^{-(4 L^θ)^{1/θ}}.
    GumbelThreeOfFour,
    /// Component 1 in parallel with the series 2-3-4 under Clayton:
    /// u + (3u^{-θ} - 2)^{-1/θ} - (4u^{-θ} - 3)^{-1/θ}.
    ClaytonParallelSeries,
    /// 2-out-of-3 under Clayton: 3(2u^{-θ} - 1)^{-1/θ} - 2(3u^{-θ} - 2)^{-1/θ}.
    ClaytonTwoOfThree,
    /// 3-out-of-4 under Clayton: 4(3u^{-θ} - 2)^{-1/θ} - 3(4u^{-θ} - 3)^{-1/θ}.
    ClaytonThreeOfFour,
}

impl PrintedForm {
    pub const ALL: [PrintedForm; 4] = [
        PrintedForm::GumbelThreeOfFour,
        PrintedForm::ClaytonParallelSeries,
        PrintedForm::ClaytonTwoOfThree,
        PrintedForm::ClaytonThreeOfFour,
    ];

    pub fn eval(&self, theta: f64, u: f64) -> f64 {
        let clayton = |j: f64| (j * u.powf(-theta) - (j - 1.0)).powf(-1.0 / theta);
        match self {
            PrintedForm::GumbelThreeOfFour => {
                let l = -u.ln();
                4.0 * (-(3.0 * l.powf(theta)).powf(1.0 / theta)).exp()
                    - 3.0 * (-(4.0 * l.powf(theta)).powf(1.0 / theta)).exp()
            }
            PrintedForm::ClaytonParallelSeries => u + clayton(3.0) - clayton(4.0),
            PrintedForm::ClaytonTwoOfThree => 3.0 * clayton(2.0) - 2.0 * clayton(3.0),
            PrintedForm::ClaytonThreeOfFour => 4.0 * clayton(3.0) - 3.0 * clayton(4.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn coeffs(pairs: &[(usize, i64)]) -> BTreeMap<usize, i64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn coefficient_examples() {
        let k34 = CoherentStructure::k_out_of_n(3, 4).unwrap();
        assert_eq!(k34.distortion_coefficients().unwrap(), coeffs(&[(3, 4), (4, -3)]));
        let ps = CoherentStructure::new(4, vec![vec![1], vec![2, 3, 4]]).unwrap();
        assert_eq!(ps.distortion_coefficients().unwrap(), coeffs(&[(1, 1), (3, 1), (4, -1)]));
        let k23 = CoherentStructure::k_out_of_n(2, 3).unwrap();
        assert_eq!(k23.distortion_coefficients().unwrap(), coeffs(&[(2, 3), (3, -2)]));
        let series = CoherentStructure::new(3, vec![vec![1, 2, 3]]).unwrap();
        assert_eq!(series.distortion_coefficients().unwrap(), coeffs(&[(3, 1)]));
    }

    #[test]
    fn invalid_structures() {
        assert!(CoherentStructure::new(3, vec![vec![1], vec![1, 2], vec![3]]).is_err());
        assert!(CoherentStructure::new(3, vec![vec![1, 2]]).is_err());
        assert!(CoherentStructure::new(3, vec![vec![4]]).is_err());
        assert!(CoherentStructure::new(0, vec![]).is_err());
        let big = CoherentStructure::k_out_of_n(4, 8).unwrap();
        assert!(matches!(big.distortion_coefficients(), Err(Error::TooLarge { bound: 25, .. })));
    }

    #[test]
    fn lifetime_max_min() {
        let s = CoherentStructure::new(4, vec![vec![1], vec![2, 3, 4]]).unwrap();
        assert_eq!(s.lifetime(&[1.0, 5.0, 3.0, 4.0]), 3.0);
        assert_eq!(s.lifetime(&[6.0, 5.0, 3.0, 4.0]), 6.0);
        let k23 = CoherentStructure::k_out_of_n(2, 3).unwrap();
        assert_eq!(k23.lifetime(&[1.0, 3.0, 2.0]), 2.0);
    }

    #[test]
    fn spot_values() {
        let k23 = CoherentStructure::k_out_of_n(2, 3).unwrap();
        let d = Distortion::new(&k23, CopulaFamily::Clayton, 1.0).unwrap();
        assert!((d.q(0.5).unwrap() - 0.5).abs() < 1e-15);
        let k34 = CoherentStructure::k_out_of_n(3, 4).unwrap();
        let g = Distortion::new(&k34, CopulaFamily::Gumbel, 1.0).unwrap();
        let u: f64 = 0.9;
        assert!((g.q(u).unwrap() - (4.0 * u.powi(3) - 3.0 * u.powi(4))).abs() < 1e-15);
        for d in [d, g] {
            assert_eq!(d.q(0.0).unwrap(), 0.0);
            assert_eq!(d.q(1.0).unwrap(), 1.0);
            assert!(d.q(1.5).is_err());
        }
    }

    fn reference_case(name: &str) -> Distortion {
        let k23 = CoherentStructure::k_out_of_n(2, 3).unwrap();
        let k34 = CoherentStructure::k_out_of_n(3, 4).unwrap();
        let ps = CoherentStructure::new(4, vec![vec![1], vec![2, 3, 4]]).unwrap();
        match name {
            "c23_15" => Distortion::new(&k23, CopulaFamily::Clayton, 15.0),
            "g34_20" => Distortion::new(&k34, CopulaFamily::Gumbel, 20.0),
            "c1234_7" => Distortion::new(&ps, CopulaFamily::Clayton, 7.0),
            "f34_05" => Distortion::new(&k34, CopulaFamily::Fgm, 0.5),
            "cneg23" => Distortion::new(&k23, CopulaFamily::Clayton, -0.5),
            _ => unreachable!(),
        }
        .unwrap()
    }

    // 1 - q, q' and q'' at u = 1 - p from 60-digit arithmetic.
    #[allow(clippy::excessive_precision)]
    const NEAR_ONE: &[(&str, f64, f64, f64, f64)] = &[
        ("c23_15", 1e-3, 0.000046342522354983109957, 0.091080386631895770136, -86.368752225955918384),
        ("c23_15", 1e-6, 4.7998288056278185778e-11, 0.000095994864225110928951, -95.989728675323716154),
        ("c23_15", 1e-10, 4.7999999828800000563e-19, 9.5999999486400002251e-9, -95.999998972800006754),
        ("c23_15", 0.3, 0.29591770120668868772, 1.0067459097048191522, 0.020835027587432565509),
        ("g34_20", 1e-3, 0.0010105449203729950488, 1.0105409923316951823, 0.0078597346943264504113),
        ("g34_20", 1e-6, 1.0105488426648778523e-6, 1.0105488387404819288, 0.0078487954931105971471),
        ("g34_20", 1e-10, 1.0105488465888795137e-10, 1.0105488465884870745, 0.0078487845563345501967),
        ("g34_20", 0.3, 0.30275193826419702818, 1.0075560985032314737, 0.012748108279117475132),
        ("c1234_7", 1e-3, 0.000023483217131873856941, 0.04646063081501866736, -44.964713974323881623),
        ("c1234_7", 1e-6, 2.3999472011459751869e-11, 0.000047998416045838759352, -47.996832137515037441),
        ("c1234_7", 1e-10, 2.3999999947200000115e-19, 4.7999999841600000458e-9, -47.999999683200001375),
        ("c1234_7", 0.3, 0.27631666341763124739, 1.029391653829891282, -0.058531495961647518728),
        ("f34_05", 1e-3, 5.9920044940089940015e-6, 0.011976017970053958012, -11.952053880269748084),
        ("f34_05", 1e-6, 5.999992000004499994e-12, 0.00001199997600001799997, -11.99995200005399988),
        ("f34_05", 1e-10, 5.9999999992e-20, 1.19999999976e-9, -11.999999995200000001),
        ("f34_05", 0.3, 0.351217215, 1.7862264, -0.855876),
        ("cneg23", 1e-3, 1.5007504690783712873e-6, 0.0030022518766421029173, -3.0045056315698909424),
        ("cneg23", 1e-6, 1.5000007500004687503e-12, 3.0000022500018750016e-6, -3.0000045000056250066),
        ("cneg23", 1e-10, 1.500000000075e-20, 3.000000000225e-10, -3.0000000004500000001),
        ("cneg23", 0.3, 0.16007968159109342426, 1.1713716560063618398, -5.1224083257188298856),
    ];

    #[test]
    fn accurate_near_one() {
        for &(name, p, q_bar, dq, d2q) in NEAR_ONE {
            let d = reference_case(name);
            let e = d.eval(UnitValue::from_complement(p)).unwrap();
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
            assert!(rel(e.q_bar, q_bar) < 1e-11, "{name} p={p}: 1-q {} vs {q_bar}", e.q_bar);
            assert!(rel(e.dq, dq) < 1e-10, "{name} p={p}: q' {} vs {dq}", e.dq);
            assert!(rel(e.d2q, d2q) < 1e-8, "{name} p={p}: q'' {} vs {d2q}", e.d2q);
        }
    }

    #[test]
    fn regimes_join_smoothly() {
        for name in ["c23_15", "g34_20", "c1234_7", "f34_05", "cneg23"] {
            let d = reference_case(name);
            let mut prev: Option<DistortionEval> = None;
            let mut p = 1e-6;
            while p < 0.5 {
                let e = d.eval(UnitValue::from_complement(p)).unwrap();
                assert!((e.q + e.q_bar - 1.0).abs() < 1e-15);
                if let Some(prev) = prev {
                    // Moving p by 0.5% moves q_bar by at most a few percent.
                    assert!((e.q_bar / prev.q_bar - 1.0).abs() < 0.05, "{name} p={p}");
                    assert!((e.dq / prev.dq - 1.0).abs() < 0.05, "{name} p={p}");
                }
                prev = Some(e);
                p *= 1.005;
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        for name in ["c23_15", "g34_20", "c1234_7", "f34_05", "cneg23"] {
            let d = reference_case(name);
            for &u in &[0.2, 0.47, 0.7, 0.93] {
                if name == "cneg23" && u < 0.45 {
                    continue;
                }
                let f = |x: f64| d.q(x).unwrap();
                let fd1 = crate::numdiff::derivative(f, u, 1e-4);
                let fd2 = crate::numdiff::second_derivative(f, u, 1e-3);
                let d1 = d.q_prime(u).unwrap();
                let d2 = d.q_second(u).unwrap();
                assert!((d1 - fd1).abs() <= 1e-6 * d1.abs().max(1e-3), "{name} u={u}");
                assert!((d2 - fd2).abs() <= 1e-6 * d2.abs().max(1.0), "{name} u={u}: {d2} vs {fd2}");
            }
        }
    }

    #[test]
    fn closed_forms() {
        let grid: Vec<f64> = (1..=10_000).map(|i| i as f64 / 10_000.0).collect();
        let k34 = CoherentStructure::k_out_of_n(3, 4).unwrap();
        let g = Distortion::new(&k34, CopulaFamily::Gumbel, 20.0).unwrap();
        assert!(g.check_closed_form(PrintedForm::GumbelThreeOfFour, &grid).unwrap() <= 1e-12);
        let k23 = CoherentStructure::k_out_of_n(2, 3).unwrap();
        let c = Distortion::new(&k23, CopulaFamily::Clayton, 15.0).unwrap();
        assert!(c.check_closed_form(PrintedForm::ClaytonTwoOfThree, &grid).unwrap() <= 1e-12);
        let series = CoherentStructure::series(4).unwrap();
        let s = Distortion::new(&series, CopulaFamily::Clayton, 15.0).unwrap();
        for form in PrintedForm::ALL {
            assert!(s.check_closed_form(form, &grid).unwrap() > 1e-3);
        }
    }

    #[test]
    fn independence_reduction() {
        let structures = [
            CoherentStructure::k_out_of_n(3, 4).unwrap(),
            CoherentStructure::new(4, vec![vec![1], vec![2, 3, 4]]).unwrap(),
            CoherentStructure::new(5, vec![vec![1, 2], vec![3, 4], vec![1, 5], vec![2, 3, 5]]).unwrap(),
        ];
        for s in &structures {
            let g = Distortion::new(s, CopulaFamily::Gumbel, 1.0).unwrap();
            let f = Distortion::new(s, CopulaFamily::Fgm, 0.0).unwrap();
            for i in 0..=200 {
                let u = i as f64 / 200.0;
                let poly = s.reliability_polynomial(u).unwrap();
                assert!((g.q(u).unwrap() - poly).abs() <= 1e-14);
                assert!((f.q(u).unwrap() - poly).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn single_component_is_identity() {
        let one = CoherentStructure::series(1).unwrap();
        for (fam, th) in [(CopulaFamily::Clayton, 3.0), (CopulaFamily::Gumbel, 2.0), (CopulaFamily::Fgm, 0.5)] {
            let d = Distortion::new(&one, fam, th).unwrap();
            for &u in &[0.0, 0.3, 0.999] {
                assert!((d.q(u).unwrap() - u).abs() < 1e-15);
            }
            assert!((d.q_prime(0.4).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn nondecreasing_on_fine_grid() {
        let cases = ["c23_15", "g34_20", "c1234_7", "f34_05", "cneg23"];
        for name in cases {
            let d = reference_case(name);
            let mut last = 0.0;
            for i in 0..=10_000 {
                let u = i as f64 / 10_000.0;
                // Negative Clayton is grounded below u = 4/9 for j = 3.
                if name == "cneg23" && u < 0.45 {
                    continue;
                }
                let q = d.q(u).unwrap();
                assert!(q >= last - 1e-15, "{name} u={u}");
                assert!(d.q_prime(u).unwrap() >= -1e-9);
                last = q;
            }
        }
    }

    fn random_structure(n: usize, picks: &[u32]) -> Option<CoherentStructure> {
        let full = (1u32 << n) - 1;
        let mut masks: Vec<u32> = picks.iter().map(|m| (m & full).max(1)).collect();
        masks.sort_unstable();
        masks.dedup();
        let minimal: Vec<u32> = masks
            .iter()
            .copied()
            .filter(|&a| !masks.iter().any(|&b| b != a && b & a == b))
            .collect();
        let sets: Vec<Vec<usize>> = minimal
            .iter()
            .map(|m| (1..=n).filter(|c| m & (1 << (c - 1)) != 0).collect())
            .collect();
        CoherentStructure::new(n, sets).ok()
    }

    proptest! {
        #[test]
        fn coefficients_sum_to_one(n in 1usize..=6, picks in proptest::collection::vec(any::<u32>(), 1..8)) {
            if let Some(s) = random_structure(n, &picks) {
                let c = s.distortion_coefficients().unwrap();
                prop_assert_eq!(c.values().sum::<i64>(), 1);
                let d = Distortion::new(&s, CopulaFamily::Clayton, 2.0).unwrap();
                prop_assert!(d.q(1.0).unwrap() == 1.0 && d.q(0.0).unwrap() == 0.0);
            }
        }
    }
}
