//! Numerical verdicts on finite samples of an infinite process: boundary
//! profiles, layer sums and truncation scans.

use serde::{Deserialize, Serialize};

/// Points used by every tail fit.
pub const TAIL_POINTS: usize = 5;

/// Least-squares slope of `ln y` against `ln x`. Non-positive samples are
/// rejected.
pub fn fit_loglog(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    linear_slope(&xs, &ys)
}

/// Slope of the least-squares line through `(x, y)`.
pub fn linear_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Log-log slope over the last `k` samples.
pub fn fit_tail_exponent(points: &[(f64, f64)], k: usize) -> Option<f64> {
    let start = points.len().saturating_sub(k);
    fit_loglog(&points[start..])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileVerdict {
    Unbounded,
    Bounded,
    Compact,
}

/// Exponent threshold separating decay from blow-up in a boundary profile.
pub const PROFILE_EPS: f64 = 0.05;

/// Classifies a profile `value(d)` sampled toward the boundary (`d`
/// decreasing) by the power `e` in `value ≈ C d^e` over the last samples.
pub fn profile_verdict(points: &[(f64, f64)]) -> (ProfileVerdict, Option<f64>) {
    let start = points.len().saturating_sub(TAIL_POINTS);
    let tail = &points[start..];
    if tail.is_empty() {
        return (ProfileVerdict::Bounded, None);
    }
    if tail.iter().all(|p| p.1 == 0.0) {
        return (ProfileVerdict::Compact, None);
    }
    if tail.iter().any(|p| !p.1.is_finite()) {
        return (ProfileVerdict::Unbounded, None);
    }
    let floor = tail.iter().map(|p| p.1.abs()).fold(0.0, f64::max) * 1e-300;
    let pts: Vec<(f64, f64)> = tail.iter().map(|&(d, v)| (d, v.abs().max(floor))).collect();
    match fit_loglog(&pts) {
        Some(e) if e < -PROFILE_EPS => (ProfileVerdict::Unbounded, Some(e)),
        Some(e) if e > PROFILE_EPS => (ProfileVerdict::Compact, Some(e)),
        e => (ProfileVerdict::Bounded, e),
    }
}

/// True when the last layer contributions do not decay and the partial sum
/// is still growing appreciably.
pub fn layers_diverge(contributions: &[f64]) -> bool {
    let n = contributions.len();
    if n < TAIL_POINTS + 1 {
        return false;
    }
    let tail = &contributions[n - TAIL_POINTS..];
    let flat = tail.windows(2).all(|w| w[1] >= 0.95 * w[0]) && tail[0] > 0.0;
    let total: f64 = contributions.iter().sum();
    let before: f64 = contributions[..n - TAIL_POINTS].iter().sum();
    flat && total > 1.1 * before
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    Saturating,
    Growing,
    Inconclusive,
}

/// Human-readable statement of [`growth_verdict`].
pub const GROWTH_RULE: &str = "q = last increment / previous increment; saturating if |q| < 0.95 or (last/previous value < 1.05 and q < 1); growing if the log-log slope exceeds 0.05; inconclusive otherwise";

/// Verdict on a quantity sampled at doubling truncations `N`. Increments
/// shrinking geometrically mean saturation, a positive log-log slope of
/// the values means growth.
pub fn growth_verdict(ns: &[usize], values: &[f64]) -> (GrowthVerdict, Option<f64>) {
    let k = values.len();
    if k < 3 || ns.len() != k {
        return (GrowthVerdict::Inconclusive, None);
    }
    let slope = fit_loglog(&ns.iter().zip(values).map(|(n, v)| (*n as f64, *v)).collect::<Vec<_>>());
    let last = values[k - 1] - values[k - 2];
    let prev = values[k - 2] - values[k - 3];
    let q = if prev.abs() > 0.0 { last / prev } else if last.abs() == 0.0 { 0.0 } else { f64::INFINITY };
    let ratio = values[k - 1] / values[k - 2];
    if q.abs() < 0.95 || (ratio < 1.05 && q < 1.0) {
        return (GrowthVerdict::Saturating, slope);
    }
    match slope {
        Some(s) if s > 0.05 => (GrowthVerdict::Growing, slope),
        _ => (GrowthVerdict::Inconclusive, slope),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesVerdict {
    Converges,
    Diverges,
    Inconclusive,
}

/// Verdict on `Σ_m a_m` from the slope of `ln a_m` against `m` over the last
/// terms; a convergent tail is extrapolated geometrically.
pub fn series_verdict(terms: &[f64]) -> (SeriesVerdict, f64, Option<f64>) {
    let sum: f64 = crate::quad::sum_ascending(terms);
    let n = terms.len();
    let start = n.saturating_sub(TAIL_POINTS);
    let tail = &terms[start..];
    if tail.iter().all(|t| *t == 0.0) && n > 0 {
        return (SeriesVerdict::Converges, sum, None);
    }
    if tail.iter().any(|t| !(*t > 0.0)) {
        return (SeriesVerdict::Inconclusive, sum, None);
    }
    let xs: Vec<f64> = (start..n).map(|i| i as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|t| t.ln()).collect();
    let slope = linear_slope(&xs, &ys);
    match slope {
        Some(s) if s < -0.01 => {
            let q = s.exp();
            let extra = terms[n - 1] * q / (1.0 - q);
            (SeriesVerdict::Converges, sum + extra, slope)
        }
        Some(s) if s > 0.01 => (SeriesVerdict::Diverges, f64::INFINITY, slope),
        _ => (SeriesVerdict::Inconclusive, sum, slope),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_slope_of_power() {
        let pts: Vec<(f64, f64)> = (1..8).map(|i| (i as f64, 3.0 * (i as f64).powf(-1.5))).collect();
        assert!((fit_loglog(&pts).unwrap() + 1.5).abs() < 1e-12);
        assert!(fit_loglog(&[(1.0, 0.0), (2.0, 1.0)]).is_none());
    }

    #[test]
    fn profiles() {
        let decaying: Vec<(f64, f64)> = (0..10).map(|m| (0.5f64.powi(m), 0.5f64.powi(m))).collect();
        assert_eq!(profile_verdict(&decaying).0, ProfileVerdict::Compact);
        let flat: Vec<(f64, f64)> = (0..10).map(|m| (0.5f64.powi(m), 2.0)).collect();
        assert_eq!(profile_verdict(&flat).0, ProfileVerdict::Bounded);
        let blow: Vec<(f64, f64)> = (0..10).map(|m| (0.5f64.powi(m), 2f64.powi(m / 2))).collect();
        assert_eq!(profile_verdict(&blow).0, ProfileVerdict::Unbounded);
    }

    #[test]
    fn layer_sums() {
        assert!(layers_diverge(&[1.0; 12]));
        let geo: Vec<f64> = (0..12).map(|m| 0.5f64.powi(m)).collect();
        assert!(!layers_diverge(&geo));
    }

    #[test]
    fn growth() {
        let ns = [16, 32, 64, 128];
        let sat: Vec<f64> = ns.iter().map(|n| 1.0 - 1.0 / *n as f64).collect();
        assert_eq!(growth_verdict(&ns, &sat).0, GrowthVerdict::Saturating);
        let grow: Vec<f64> = ns.iter().map(|n| (*n as f64).sqrt()).collect();
        assert_eq!(growth_verdict(&ns, &grow).0, GrowthVerdict::Growing);
        let log: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
        assert_eq!(growth_verdict(&ns, &log).0, GrowthVerdict::Growing);
    }

    #[test]
    fn series() {
        let conv: Vec<f64> = (0..20).map(|m| 0.9f64.powi(m)).collect();
        let (v, s, _) = series_verdict(&conv);
        assert_eq!(v, SeriesVerdict::Converges);
        assert!((s - 10.0).abs() < 1e-9);
        let div: Vec<f64> = (0..20).map(|m| 1.1f64.powi(m)).collect();
        assert_eq!(series_verdict(&div).0, SeriesVerdict::Diverges);
    }
}
