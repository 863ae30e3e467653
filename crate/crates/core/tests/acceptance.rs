//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion. Runs as a
//! plain binary so the lines are printed on every `cargo test`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spares_core::conditions::{check_theorem, CheckGrids, TheoremId};
use spares_core::montecarlo::{quantile_grid, simulate};
use spares_core::orders::{check_order, majorize, weak_supermajorize};
use spares_core::presets::{self, claim_holds, claim_margin, Claim, Plotted};
use spares_core::scenario::{Scenario, ThetaSpec};
use spares_core::structure::PrintedForm;
use spares_core::{
    CoherentStructure, CopulaFamily, Distortion, EvalGrid, Lifetime, OrderKind, OrderVerdict, Relation,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn scenario(id: &str) -> Scenario {
    presets::preset(id).expect("built-in preset").scenario
}

fn curve(id: &str, plotted: Plotted) -> Result<Vec<f64>, String> {
    Ok(presets::plotted_curve(&scenario(id), plotted, &EvalGrid::default()).map_err(err)?.value)
}

fn coefficients() -> Outcome {
    let cases: [(CoherentStructure, &[(usize, i64)]); 3] = [
        (CoherentStructure::k_out_of_n(3, 4).map_err(err)?, &[(3, 4), (4, -3)]),
        (CoherentStructure::new(4, vec![vec![1], vec![2, 3, 4]]).map_err(err)?, &[(1, 1), (3, 1), (4, -1)]),
        (CoherentStructure::k_out_of_n(2, 3).map_err(err)?, &[(2, 3), (3, -2)]),
    ];
    for (s, want) in cases {
        let got = s.distortion_coefficients().map_err(err)?;
        let want: BTreeMap<usize, i64> = want.iter().copied().collect();
        if got != want {
            return Err(format!("{:?}: got {got:?}, want {want:?}", s.path_sets()));
        }
    }
    Ok("3-of-4, parallel-series and 2-of-3 coefficients match exactly".into())
}

fn closed_forms() -> Outcome {
    let u: Vec<f64> = (1..=10_000).map(|i| i as f64 / 10_001.0).collect();
    let cases = [
        ("ex3.1", PrintedForm::GumbelThreeOfFour),
        ("ex3.2", PrintedForm::ClaytonParallelSeries),
        ("ex3.8", PrintedForm::ClaytonTwoOfThree),
        ("ex4.1", PrintedForm::ClaytonThreeOfFour),
    ];
    let mut worst: f64 = 0.0;
    for (id, form) in cases {
        let s = scenario(id);
        let structure = s.coherent_structure().map_err(err)?;
        let family = s.copula_family().map_err(err)?;
        let mut thetas: Vec<f64> = s.systems.iter().flat_map(|sys| sys.thetas()).collect();
        thetas.dedup();
        for theta in thetas {
            let d = Distortion::new(&structure, family, theta).map_err(err)?;
            let dev = d.check_closed_form(form, &u).map_err(err)?;
            if dev > 1e-12 {
                return Err(format!("{id} theta {theta}: max deviation {dev:e}"));
            }
            worst = worst.max(dev);
        }
    }
    Ok(format!("max |q - printed| = {worst:.2e} over 10^4 points"))
}

fn sign_claim(id: &str, plotted: Plotted, claim: Claim) -> Outcome {
    let v = curve(id, plotted)?;
    let margin = claim_margin(claim, &v);
    ensure(claim_holds(claim, &v), format!("{id}: {} points, {claim:?} margin {margin:.3e}", v.len()))
}

fn rh_and_lr() -> Outcome {
    let a = sign_claim("ex3.5", Plotted::CdfRatio, Claim::Nondecreasing)?;
    let b = sign_claim("ex3.7", Plotted::PdfRatio, Claim::Nonincreasing)?;
    Ok(format!("{a}; {b}"))
}

fn drhr() -> Outcome {
    let mut parts = Vec::new();
    for id in ["ex3.8", "ex4.4"] {
        parts.push(sign_claim(id, Plotted::RevHazard, Claim::Nonincreasing)?);
    }
    Ok(parts.join("; "))
}

fn monte_carlo() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for id in ["ex3.1", "ex3.7", "ex4.1", "ex4.2"] {
        let s = scenario(id);
        let start = Instant::now();
        let mut worst = usize::MAX;
        for i in 0..s.systems.len() {
            let sys = s.build_system(i).map_err(err)?;
            let grid = quantile_grid(&sys, 20).map_err(err)?;
            let est = simulate(&sys, &grid, 100_000, 20_240_601 + i as u64).map_err(err)?;
            let closed: Vec<f64> = grid.times().iter().map(|&t| sys.sf(t)).collect::<Result<_, _>>().map_err(err)?;
            worst = worst.min(est.count_within(&closed, 4.0));
        }
        let secs = start.elapsed().as_secs_f64();
        ok &= worst >= 19 && secs < 30.0;
        parts.push(format!("{id}: {worst}/20 within 4 SE in {secs:.1}s"));
    }
    ensure(ok, parts.join("; "))
}

/// Random T-transform `λx + (1-λ)x∘τ_ij`.
fn t_transform(x: &mut [f64], rng: &mut ChaCha8Rng) {
    if x.len() < 2 {
        return;
    }
    let i = rng.random_range(0..x.len());
    let j = (i + rng.random_range(1..x.len())) % x.len();
    let lambda: f64 = rng.random();
    let (xi, xj) = (x[i], x[j]);
    x[i] = lambda * xi + (1.0 - lambda) * xj;
    x[j] = lambda * xj + (1.0 - lambda) * xi;
}

fn perturb_theta(s: &Scenario, theta: f64, rng: &mut ChaCha8Rng) -> f64 {
    let mut t = theta * rng.random_range(-0.2f64..0.2).exp();
    if let Some([lo, hi]) = s.theta_range {
        t = t.clamp(lo, hi);
    }
    if s.copula_family().ok() == Some(CopulaFamily::Gumbel) {
        t = t.max(1.0);
    }
    t
}

/// A random neighbour of a preset: T-transformed parameter vectors,
/// perturbed dependence and, at random, the two systems swapped.
fn randomize(base: &Scenario, rng: &mut ChaCha8Rng) -> Scenario {
    let mut s = base.clone();
    let scalar_theta = base.systems.iter().all(|sys| matches!(sys.theta, ThetaSpec::Scalar(_)));
    let shared = perturb_theta(base, base.systems[0].thetas()[0], rng);
    for sys in &mut s.systems {
        if rng.random_bool(0.7) {
            t_transform(&mut sys.b, rng);
        }
        if rng.random_bool(0.5) {
            sys.theta = match &sys.theta {
                ThetaSpec::Scalar(t) => ThetaSpec::Scalar(if scalar_theta { perturb_theta(base, *t, rng) } else { shared }),
                ThetaSpec::PerSubsystem(v) => ThetaSpec::PerSubsystem(v.iter().map(|&t| perturb_theta(base, t, rng)).collect()),
            };
        }
    }
    if s.systems.len() == 2 && rng.random_bool(0.25) {
        s.systems.swap(0, 1);
    }
    s
}

/// Geometric time grid reaching until both survival functions fall below
/// 1e-13. The order implications only hold over the whole support: on a
/// window that cuts off a heavy tail a density ratio can be monotone while
/// the survival functions still cross.
fn covering_grid<L: Lifetime>(a: &L, b: &L, points: usize) -> Result<EvalGrid, String> {
    let start = a.support_start().max(b.support_start());
    let mut hi = start.max(1.0);
    while (a.sf(hi).map_err(err)? > 1e-13 || b.sf(hi).map_err(err)? > 1e-13) && hi < 1e12 {
        hi *= 2.0;
    }
    let lo = if start > 0.0 { start } else { 1e-6 };
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    EvalGrid::from_times((0..points).map(|i| lo * (ratio * i as f64).exp()).collect()).map_err(err)
}

fn all_verdicts(s: &Scenario) -> Result<Vec<OrderVerdict>, String> {
    let (a, b) = (s.build_system(0).map_err(err)?, s.build_system(1).map_err(err)?);
    let grid = covering_grid(&a, &b, 600)?;
    OrderKind::ALL.iter().map(|&k| check_order(k, &a, &b, &grid).map_err(err)).collect()
}

struct Sweep {
    detail: String,
    contradictions: Vec<String>,
    pairs: Vec<(Scenario, Vec<OrderVerdict>)>,
}

const TRIALS: usize = 200;

fn theorem_sweep() -> Result<Sweep, String> {
    let clock = Instant::now();
    let grids = CheckGrids::default();
    let presets = presets::all();
    let mut contradictions = Vec::new();
    let mut pairs = Vec::new();
    let mut own = 0;
    let mut certified = 0;
    let mut tried = 0;
    let mut failures = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(314_159);
    for p in &presets {
        let Some(spec) = p.scenario.theorem else { continue };
        let cert = check_theorem(spec, &p.scenario, &grids).map_err(err)?;
        if !cert.all_pass || cert.agrees != Some(true) {
            return Err(format!("{} does not certify its own theorem {}", p.id, spec.id.name()));
        }
        own += 1;
        if p.scenario.systems.len() == 2 {
            pairs.push((p.scenario.clone(), all_verdicts(&p.scenario)?));
        }
    }
    for id in TheoremId::ALL {
        // Theorems without a worked example start from one of the same shape.
        let base = presets
            .iter()
            .find(|p| p.scenario.theorem.map(|t| t.id) == Some(id))
            .or_else(|| {
                presets.iter().find(|p| {
                    p.scenario.theorem.map(|t| (t.id.level(), t.id.is_pair())) == Some((id.level(), id.is_pair()))
                })
            })
            .ok_or_else(|| format!("no base scenario for {}", id.name()))?;
        let spec = match base.scenario.theorem {
            Some(t) if t.id == id => t,
            _ => spares_core::conditions::TheoremSpec::primary(id),
        };
        for trial in 0..TRIALS {
            let s = randomize(&base.scenario, &mut rng);
            if s.validate().is_err() {
                continue;
            }
            tried += 1;
            match check_theorem(spec, &s, &grids) {
                Ok(c) if c.all_pass => {
                    certified += 1;
                    if c.agrees != Some(true) {
                        contradictions.push(format!("{} trial {trial}: {}", spec.id.name(), s.to_json()));
                    }
                }
                Ok(_) => {}
                Err(_) => failures += 1,
            }
            if s.systems.len() == 2 && trial % 4 == 0 {
                if let Ok(v) = all_verdicts(&s) {
                    pairs.push((s.clone(), v));
                }
            }
        }
    }
    let detail = format!(
        "{own} example scenarios certify their own theorem; {certified} of {tried} random scenarios over {} theorems certified, \
         {} contradicted, {failures} not evaluable; sweep {:.1}s",
        TheoremId::ALL.len(),
        contradictions.len(),
        clock.elapsed().as_secs_f64()
    );
    Ok(Sweep { detail, contradictions, pairs })
}

fn certificates(sweep: &Result<Sweep, String>) -> Outcome {
    let sweep = sweep.as_ref().map_err(Clone::clone)?;
    if let Some(first) = sweep.contradictions.first() {
        return Err(format!("{}; first: {first}", sweep.detail));
    }
    Ok(sweep.detail.clone())
}

fn hierarchy(sweep: &Result<Sweep, String>) -> Outcome {
    let sweep = sweep.as_ref().map_err(Clone::clone)?;
    let mut pairs = sweep.pairs.clone();
    // Random pairs from every family and copula, independent of any theorem.
    let mut rng = ChaCha8Rng::seed_from_u64(2_718);
    let ids = presets::IDS;
    for _ in 0..200 {
        let mut s = scenario(ids[rng.random_range(0..ids.len())]);
        if s.systems.len() < 2 {
            s.systems.push(s.systems[0].clone());
        }
        for sys in &mut s.systems {
            for b in &mut sys.b {
                *b *= rng.random_range(0.5..2.0);
            }
        }
        if s.validate().is_ok() {
            if let Ok(v) = all_verdicts(&s) {
                pairs.push((s, v));
            }
        }
    }
    let find = |v: &[OrderVerdict], k: OrderKind| v.iter().find(|x| x.kind == k).expect("all kinds").relation;
    let implications = [
        (OrderKind::Lr, OrderKind::Hr),
        (OrderKind::Lr, OrderKind::Rh),
        (OrderKind::Hr, OrderKind::St),
        (OrderKind::Rh, OrderKind::St),
    ];
    let mut strict = 0;
    for (s, v) in &pairs {
        for (strong, weak) in implications {
            let r = find(v, strong);
            let a_below_b = match r {
                Relation::ABelowB => true,
                Relation::BBelowA => false,
                _ => continue,
            };
            strict += 1;
            if !find(v, weak).supports(a_below_b) {
                return Err(format!(
                    "{} {} but {} {}; scenario {}",
                    strong.name(),
                    r.name(),
                    weak.name(),
                    find(v, weak).name(),
                    serde_json::to_string(s).unwrap_or_default()
                ));
            }
        }
    }
    Ok(format!("{} pairs, {strict} strict implications checked, none violated", pairs.len()))
}

fn majorization_facts() -> Outcome {
    let (b31, b31s) = ([1.2, 0.5, 0.4, 0.2], [1.0, 0.5, 0.3, 0.2]);
    let (b33, b33s) = ([0.05, 0.05, 0.04, 0.02], [0.06, 0.05, 0.03, 0.02]);
    let facts = [
        ("b* weakly supermajorizes b (st example)", weak_supermajorize(&b31s, &b31), true),
        ("b does not weakly supermajorize b* (st example)", weak_supermajorize(&b31, &b31s), false),
        ("no majorization without equal totals (st example)", majorize(&b31s, &b31), false),
        ("b* majorizes b (hr example)", majorize(&b33s, &b33), true),
        ("b does not majorize b* (hr example)", majorize(&b33, &b33s), false),
        ("majorization implies weak supermajorization (hr example)", weak_supermajorize(&b33s, &b33), true),
    ];
    for (what, got, want) in facts {
        if got.map_err(err)? != want {
            return Err(format!("{what}: expected {want}"));
        }
    }
    Ok("6 relations reproduced".into())
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let sweep = theorem_sweep();
    let criteria: Vec<Criterion> = vec![
        ("distortion coefficients are exact", Box::new(coefficients)),
        ("generic distortion matches the printed closed forms", Box::new(closed_forms)),
        ("st example: sf difference nonnegative", Box::new(|| sign_claim("ex3.1", Plotted::SfDifference, Claim::NonNegative))),
        ("hr example: sf ratio nondecreasing", Box::new(|| sign_claim("ex3.3", Plotted::SfRatio, Claim::Nondecreasing))),
        ("rh and lr examples: cdf ratio and density ratio monotone", Box::new(rh_and_lr)),
        ("level comparison: difference takes both signs", Box::new(|| sign_claim("ex4.1", Plotted::SfDifference, Claim::BothSigns))),
        ("system-level st example: sf difference nonnegative", Box::new(|| sign_claim("ex4.2", Plotted::SfDifference, Claim::NonNegative))),
        ("DRHR: reversed hazards nonincreasing", Box::new(drhr)),
        ("Monte Carlo oracle agrees with closed forms", Box::new(monte_carlo)),
        ("theorem certificates are sound", Box::new(|| certificates(&sweep))),
        ("order hierarchy is respected", Box::new(|| hierarchy(&sweep))),
        ("majorization facts of the worked examples", Box::new(majorization_facts)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
