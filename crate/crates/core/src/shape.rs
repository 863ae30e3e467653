//! Sign tests of first and second differences shared by the order and
//! condition checks.

/// Tolerance on relative successive differences below which a sequence still
/// counts as monotone (or convex).
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        }
    }
}

/// Smallest signed, locally scaled step `dir * (y[i+1] - ext) / scale`,
/// where `ext` is the running extreme of `y[..=i]` in direction `dir`, and
/// the index `i` where it occurs. Measuring against the running extreme keeps
/// a slow drift of individually tolerable steps from passing as monotone.
/// Nonnegative means monotone in `dir`.
pub fn monotone_margin(ys: &[f64], dir: Direction) -> (f64, usize) {
    let mut worst = (f64::INFINITY, 0);
    let Some(&first) = ys.first() else {
        return worst;
    };
    let mut ext = first;
    for (i, &y) in ys.iter().enumerate().skip(1) {
        let scale = ext.abs().max(y.abs());
        let m = if scale == 0.0 { 0.0 } else { dir.sign() * (y - ext) / scale };
        if m < worst.0 {
            worst = (m, i - 1);
        }
        if dir.sign() * (y - ext) > 0.0 {
            ext = y;
        }
    }
    worst
}

/// Smallest signed change of successive slopes, relative to the slopes
/// themselves with a floor at the rounding level of the values. Nonnegative
/// means convex for `Increasing`, concave for `Decreasing`.
pub fn convexity_margin(xs: &[f64], ys: &[f64], dir: Direction) -> (f64, usize) {
    let mut worst = (f64::INFINITY, 0);
    for i in 1..xs.len().saturating_sub(1) {
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        let s0 = (ys[i] - ys[i - 1]) / h0;
        let s1 = (ys[i + 1] - ys[i]) / h1;
        let level = ys[i - 1].abs().max(ys[i].abs()).max(ys[i + 1].abs());
        let floor = 64.0 * f64::EPSILON * level / h0.min(h1);
        let scale = s0.abs().max(s1.abs()).max(floor);
        let m = if scale == 0.0 { 0.0 } else { dir.sign() * (s1 - s0) / scale };
        if m < worst.0 {
            worst = (m, i);
        }
    }
    worst
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_and_convex_signs() {
        let xs = linspace(0.0, 1.0, 11);
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!(monotone_margin(&ys, Direction::Increasing).0 >= 0.0);
        assert!(monotone_margin(&ys, Direction::Decreasing).0 < 0.0);
        assert!(convexity_margin(&xs, &ys, Direction::Increasing).0 > 0.0);
        assert!(convexity_margin(&xs, &ys, Direction::Decreasing).0 < 0.0);
    }

    #[test]
    fn slow_drift_is_not_monotone() {
        // Every step is within tolerance, the accumulated reversal is not.
        let ys: Vec<f64> = (0..1000).map(|i| 1.0 + 5e-10 * i as f64).collect();
        assert!(monotone_margin(&ys, Direction::Decreasing).0 < -MONOTONE_TOL);
        let noisy: Vec<f64> = (0..1000).map(|i| -(i as f64) + if i % 2 == 0 { 1e-12 } else { 0.0 }).collect();
        assert!(monotone_margin(&noisy, Direction::Decreasing).0 >= -MONOTONE_TOL);
    }

    #[test]
    fn linear_is_both() {
        let xs = linspace(0.02, 0.06, 20);
        let ys: Vec<f64> = xs.iter().map(|b| -b / 0.7).collect();
        assert!(convexity_margin(&xs, &ys, Direction::Increasing).0 > -MONOTONE_TOL);
        assert!(convexity_margin(&xs, &ys, Direction::Decreasing).0 > -MONOTONE_TOL);
    }
}
