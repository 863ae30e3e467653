//! Clayton, Gumbel and Farlie–Gumbel–Morgenstern copulas: their partial
//! diagonal sections and exact samplers.
//!
//! The partial diagonal `D_j(u)` is the copula evaluated with `j` arguments
//! equal to `u` and the remaining ones equal to 1:
//!
//! * Clayton: `(j u^-θ - (j - 1))^(-1/θ)`
//! * Gumbel: `exp(-(j (-ln u)^θ)^(1/θ)) = u^(j^(1/θ))`
//! * FGM: `u^j` for `j < n`, `u^n (1 + θ (1 - u)^n)` for `j = n`
//!
//! For FGM every strict subset of coordinates is independent, so the
//! dependence is only visible to structures that use all `n` components
//! at once.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{Error, Result};
use crate::prob::UnitValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CopulaFamily {
    Clayton,
    Gumbel,
    Fgm,
}

impl CopulaFamily {
    pub fn token(&self) -> &'static str {
        match self {
            CopulaFamily::Clayton => "clayton",
            CopulaFamily::Gumbel => "gumbel",
            CopulaFamily::Fgm => "fgm",
        }
    }

    pub fn from_token(token: &str) -> Result<Self> {
        match token {
            "clayton" => Ok(CopulaFamily::Clayton),
            "gumbel" => Ok(CopulaFamily::Gumbel),
            "fgm" => Ok(CopulaFamily::Fgm),
            other => Err(Error::Parameter(format!("unknown copula family `{other}`"))),
        }
    }

    pub fn check_theta(&self, theta: f64) -> Result<()> {
        let ok = theta.is_finite()
            && match self {
                CopulaFamily::Clayton => theta >= -1.0 && theta != 0.0,
                CopulaFamily::Gumbel => theta >= 1.0,
                CopulaFamily::Fgm => (-1.0..=1.0).contains(&theta),
            };
        if ok {
            Ok(())
        } else {
            let range = match self {
                CopulaFamily::Clayton => "[-1, inf) without 0",
                CopulaFamily::Gumbel => "[1, inf)",
                CopulaFamily::Fgm => "[-1, 1]",
            };
            Err(Error::Parameter(format!("{} theta {theta} outside {range}", self.token())))
        }
    }
}

/// An exchangeable copula of dimension `dim`.
///
/// `dim = 1` is accepted as the trivial one-dimensional copula so that
/// single-component structures go through the same code paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopulaSpec {
    family: CopulaFamily,
    theta: f64,
    dim: usize,
}

impl CopulaSpec {
    pub fn new(family: CopulaFamily, theta: f64, dim: usize) -> Result<Self> {
        family.check_theta(theta)?;
        if dim == 0 {
            return Err(Error::Parameter("copula dimension must be positive".into()));
        }
        Ok(CopulaSpec { family, theta, dim })
    }

    pub fn family(&self) -> CopulaFamily {
        self.family
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `C(u, .., u, 1, .., 1)` with `j` arguments at `u`.
    pub fn partial_diagonal(&self, j: usize, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("copula argument {u} outside [0, 1]")));
        }
        Ok(self.diagonal(j, UnitValue::from_value(u))?.value)
    }

    /// Diagonal value, its complement and first two derivatives in `u`,
    /// evaluated directly from the closed forms.
    pub(crate) fn diagonal(&self, j: usize, u: UnitValue) -> Result<DiagonalTerm> {
        if j > self.dim {
            return Err(Error::Parameter(format!("subset size {j} exceeds dimension {}", self.dim)));
        }
        let uv = u.value();
        if j == 0 {
            return Ok(DiagonalTerm { value: 1.0, complement: 0.0, d1: 0.0, d2: 0.0 });
        }
        if j == 1 {
            return Ok(DiagonalTerm { value: uv, complement: u.complement(), d1: 1.0, d2: 0.0 });
        }
        let jf = j as f64;
        let theta = self.theta;
        match self.family {
            CopulaFamily::Clayton => {
                if uv == 0.0 {
                    return Ok(DiagonalTerm { value: 0.0, complement: 1.0, d1: clayton_d1_at_zero(jf, theta), d2: f64::NAN });
                }
                let ln_u = u.ln_value();
                // w = j - (j - 1) u^θ, written to keep w - 1 accurate for small θ.
                let w_minus_1 = -(jf - 1.0) * (theta * ln_u).exp_m1();
                let w = 1.0 + w_minus_1;
                if !(w > 0.0) {
                    return Err(Error::Domain(format!(
                        "Clayton theta {theta}: u = {uv} lies in the grounded region for j = {j}"
                    )));
                }
                let ln_w = w_minus_1.ln_1p();
                let ln_value = ln_u - ln_w / theta;
                let value = ln_value.exp();
                let complement = -ln_value.exp_m1();
                let d1 = jf * (-(1.0 / theta + 1.0) * ln_w).exp();
                let d2 = jf * (jf - 1.0) * (theta + 1.0)
                    * ((theta - 1.0) * ln_u - (1.0 / theta + 2.0) * ln_w).exp();
                Ok(DiagonalTerm { value, complement, d1, d2 })
            }
            CopulaFamily::Gumbel => {
                let c = jf.powf(1.0 / theta);
                if uv == 0.0 {
                    return Ok(DiagonalTerm { value: 0.0, complement: 1.0, d1: if c == 1.0 { 1.0 } else { 0.0 }, d2: f64::NAN });
                }
                let ln_u = u.ln_value();
                let value = (c * ln_u).exp();
                let complement = -(c * ln_u).exp_m1();
                let d1 = c * ((c - 1.0) * ln_u).exp();
                let d2 = c * (c - 1.0) * ((c - 2.0) * ln_u).exp();
                Ok(DiagonalTerm { value, complement, d1, d2 })
            }
            CopulaFamily::Fgm => {
                let p = u.complement();
                if j < self.dim {
                    let value = uv.powi(j as i32);
                    let complement = if uv < 0.5 { 1.0 - value } else { -(jf * (-p).ln_1p()).exp_m1() };
                    let d1 = jf * uv.powi(j as i32 - 1);
                    let d2 = jf * (jf - 1.0) * uv.powi(j as i32 - 2);
                    return Ok(DiagonalTerm { value, complement, d1, d2 });
                }
                // g(u) = (u (1 - u))^n; D = u^n + θ g.
                let n = j as i32;
                let s = uv * p;
                let g = s.powi(n);
                let g1 = jf * s.powi(n - 1) * (1.0 - 2.0 * uv);
                let g2 = jf * ((jf - 1.0) * s.powi(n - 2) * (1.0 - 2.0 * uv).powi(2) - 2.0 * s.powi(n - 1));
                let un = uv.powi(n);
                let value = un + theta * g;
                let complement = if uv < 0.5 {
                    1.0 - value
                } else {
                    -(jf * (-p).ln_1p()).exp_m1() - theta * g
                };
                let d1 = jf * uv.powi(n - 1) + theta * g1;
                let d2 = jf * (jf - 1.0) * uv.powi(n - 2) + theta * g2;
                Ok(DiagonalTerm { value, complement, d1, d2 })
            }
        }
    }

    /// `count` iid rows of dimension `dim`, deterministic in `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let sampler = self.sampler()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::with_capacity(count);
        for _ in 0..count {
            let mut row = vec![0.0; self.dim];
            sampler.fill(&mut rng, &mut row);
            rows.push(row);
        }
        Ok(rows)
    }

    pub fn sampler(&self) -> Result<CopulaSampler> {
        let kind = match self.family {
            CopulaFamily::Clayton if self.theta < 0.0 => {
                return Err(Error::UnsupportedSampler(format!(
                    "Clayton with negative theta {} has no frailty representation",
                    self.theta
                )))
            }
            CopulaFamily::Clayton => SamplerKind::Clayton(
                Gamma::new(1.0 / self.theta, 1.0)
                    .map_err(|e| Error::Parameter(format!("Clayton frailty: {e}")))?,
            ),
            CopulaFamily::Gumbel if self.theta == 1.0 => SamplerKind::Independent,
            CopulaFamily::Gumbel => SamplerKind::Gumbel,
            CopulaFamily::Fgm if self.theta == 0.0 => SamplerKind::Independent,
            CopulaFamily::Fgm => SamplerKind::Fgm,
        };
        let kind = if self.dim == 1 { SamplerKind::Independent } else { kind };
        Ok(CopulaSampler { spec: *self, kind })
    }
}

fn clayton_d1_at_zero(j: f64, theta: f64) -> f64 {
    if theta > 0.0 {
        j * j.powf(-1.0 / theta - 1.0)
    } else {
        f64::NAN
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct DiagonalTerm {
    pub value: f64,
    pub complement: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Independent,
    Clayton(Gamma<f64>),
    Gumbel,
    Fgm,
}

/// Draws rows from a copula using a caller-owned generator.
#[derive(Debug, Clone)]
pub struct CopulaSampler {
    spec: CopulaSpec,
    kind: SamplerKind,
}

impl CopulaSampler {
    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    /// Overwrites `out` (length `dim`) with one draw.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let theta = self.spec.theta;
        match &self.kind {
            SamplerKind::Independent => {
                for x in out.iter_mut() {
                    *x = rng.sample(Open01);
                }
            }
            SamplerKind::Clayton(gamma) => {
                // Frailty V ~ Gamma(1/θ) has Laplace transform (1 + s)^(-1/θ).
                let v: f64 = gamma.sample(rng);
                for x in out.iter_mut() {
                    let e: f64 = Exp1.sample(rng);
                    *x = (-(e / v).ln_1p() / theta).exp();
                }
            }
            SamplerKind::Gumbel => {
                // Positive stable frailty with Laplace transform exp(-s^α).
                let alpha = 1.0 / theta;
                let w: f64 = std::f64::consts::PI * rng.sample::<f64, _>(Open01);
                let e: f64 = Exp1.sample(rng);
                let ln_s = (alpha * w).sin().ln() - w.sin().ln() / alpha
                    + (1.0 - alpha) / alpha * (((1.0 - alpha) * w).sin().ln() - e.ln());
                for x in out.iter_mut() {
                    let e: f64 = Exp1.sample(rng);
                    *x = (-(alpha * (e.ln() - ln_s)).exp()).exp();
                }
            }
            SamplerKind::Fgm => {
                // Density 1 + θ Π(1 - 2u_i) is bounded by 1 + |θ|.
                let bound = 1.0 + theta.abs();
                loop {
                    let mut prod = 1.0;
                    for x in out.iter_mut() {
                        *x = rng.sample(Open01);
                        prod *= 1.0 - 2.0 * *x;
                    }
                    let accept: f64 = rng.random::<f64>() * bound;
                    if accept <= 1.0 + theta * prod {
                        break;
                    }
                }
            }
        }
    }
}
