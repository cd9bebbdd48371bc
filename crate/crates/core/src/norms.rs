//! Norms, seminorms and sup-functionals of analytic functions on the disk.
//!
//! Area integrals are reduced to `2∫_0^1 r h(r) M(r) dr` where `M(r)` is a
//! circle mean, computed by FFT for series without a closed form and by
//! graded Gauss–Legendre toward singular directions otherwise.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{self, ProfileVerdict};
use crate::error::{param, Result};
use crate::geometry::{weighted_square_measure, DiskPoint};
use crate::quad::{integrate_arc, integrate_circle, sum_ascending, RadialGrid};
use crate::series::{derivative, ring_size, ring_values, AnalyticFn};
use crate::weights::Weight;

const RADIAL_ORDER: usize = 20;
/// Relative disagreement between two refinement levels that triggers a
/// warning.
pub const REFINE_TOL: f64 = 1e-8;
/// Radius excluded around the origin in `C¹(ω*)` quotients.
pub const STAR_EXCLUSION: f64 = 1e-8;

/// Mean of `|f|^p` over the circle of radius `r = 1 - d`. `level` doubles
/// the angular resolution.
pub fn circle_mean_pow(f: &AnalyticFn, r: f64, d: f64, p: f64, level: u32) -> f64 {
    if r == 0.0 {
        return f.coeff(0).norm().powf(p);
    }
    match f.closed_form() {
        Some(cf) if !f.is_exact() => {
            let width = d.max(cf.singular_gap()).max(1e-300);
            let order = 16 + 8 * level as usize;
            let v = integrate_circle(|t| cf.eval(Complex64::from_polar(r, t)).norm().powf(p), &cf.singular_directions(), width, order);
            v / (2.0 * PI)
        }
        _ => {
            let deg = if f.is_exact() {
                f.degree().unwrap_or(0)
            } else {
                f.truncation()
            };
            let m = ring_size(deg) << level;
            let vals = ring_values(f, r, m);
            if p == 2.0 {
                vals.iter().map(|v| v.norm_sqr()).sum::<f64>() / m as f64
            } else {
                vals.iter().map(|v| v.norm().powf(p)).sum::<f64>() / m as f64
            }
        }
    }
}

/// Panel integrals of `g(r, d)` over `[lo, 1 - 2^{-depth}]`, computed in
/// parallel; entries carry the boundary layer index.
pub(crate) fn radial_panels<G>(lo: f64, depth: u32, order: usize, g: G) -> Vec<(Option<u32>, f64)>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    let grid = RadialGrid::plain(lo, depth, order);
    let rule = grid.rule();
    grid.panels
        .par_iter()
        .map(|p| {
            let parts: Vec<f64> = p.nodes(rule).map(|n| n.w * g(n.r, n.d)).collect();
            (p.layer, sum_ascending(&parts))
        })
        .collect()
}

/// A norm value with an accuracy note when two refinement levels disagree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    /// Coefficient-formula value, for `p = 2`.
    pub coefficient_value: Option<f64>,
    pub warning: Option<String>,
}

fn area_integral(f: &AnalyticFn, w: &Weight, p: f64, level: u32) -> f64 {
    let depth = w.max_depth();
    let panels = radial_panels(0.0, depth, RADIAL_ORDER, |r, d| 2.0 * r * w.density(d) * circle_mean_pow(f, r, d, p, level));
    let parts: Vec<f64> = panels.iter().map(|x| x.1).collect();
    let dm = 0.5f64.powi(depth as i32);
    let edge = circle_mean_pow(f, 1.0 - dm, dm, p, level) * 2.0 * (1.0 - dm);
    sum_ascending(&parts) + edge * w.hat_d(dm)
}

/// `Σ_j |f̂_j|² · 2ω_{2j+1}` over the retained coefficients.
pub fn coefficient_norm_sq(f: &AnalyticFn, w: &Weight) -> f64 {
    let parts: Vec<f64> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(j, c)| c.norm_sqr() * w.basis_norm_sq(j))
        .collect();
    sum_ascending(&parts)
}

/// `(∫_D |f|^p ω dA)^{1/p}`.
pub fn bergman_norm(f: &AnalyticFn, w: &Weight, p: f64) -> Result<NormValue> {
    if !(p > 0.0) {
        return param(format!("Bergman norm needs p > 0, got {p}"));
    }
    let a = area_integral(f, w, p, 0);
    let b = area_integral(f, w, p, 1);
    let warning = ((a - b).abs() > REFINE_TOL * b.abs().max(f64::MIN_POSITIVE))
        .then(|| format!("refinement levels disagree: {a:e} vs {b:e}"));
    let coefficient_value = (p == 2.0).then(|| coefficient_norm_sq(f, w).sqrt());
    Ok(NormValue {
        value: b.powf(1.0 / p),
        coefficient_value,
        warning,
    })
}

/// `ω(D)|f(0)|² + 4∫_D |f'|² ω* dA`.
pub fn littlewood_paley_p2(f: &AnalyticFn, w: &Weight) -> Result<f64> {
    let fp = derivative(f, 1)?;
    let head = w.total_mass() * f.coeff(0).norm_sqr();
    if fp.is_zero() {
        return Ok(head);
    }
    let table = w.star_table(1)?;
    let body = table.integrate_with(|r, d| 2.0 * r * circle_mean_pow(&fp, r, d, 2.0, 0));
    Ok(head + 4.0 * body)
}

/// `sup_{u ∈ Γ_z} |f(u)|`, from samples along the two edges of the cone.
pub fn nontangential_max(f: &AnalyticFn, z: Complex64, samples: usize) -> f64 {
    let r = z.norm();
    let th = z.arg();
    let mut best = f.eval(z).norm();
    for i in 0..samples {
        let rho = r * i as f64 / samples as f64;
        let half = 0.5 * (1.0 - rho / r.max(f64::MIN_POSITIVE));
        for s in [-1.0, 1.0] {
            let u = Complex64::from_polar(rho, th + s * half);
            best = best.max(f.eval(u).norm());
        }
    }
    best
}

/// `(∫_D (Nf)^p ω dA)^{1/p}` with `Nf(z) = sup_{u ∈ Γ_z} |f(u)|`; comparable
/// to, and never below, the Bergman norm.
pub fn nontangential_norm(f: &AnalyticFn, w: &Weight, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return param(format!("nontangential norm needs p > 0, got {p}"));
    }
    const ANGLES: usize = 64;
    const EDGE: usize = 32;
    let depth: u32 = 30;
    let panels = radial_panels(0.0, depth, 12, |r, d| {
        let mean: f64 = (0..ANGLES)
            .map(|k| {
                let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / ANGLES as f64);
                nontangential_max(f, z, EDGE).powf(p)
            })
            .sum::<f64>()
            / ANGLES as f64;
        2.0 * r * w.density(d) * mean
    });
    let parts: Vec<f64> = panels.iter().map(|x| x.1).collect();
    let dm = 0.5f64.powi(depth as i32);
    let edge = (0..ANGLES)
        .map(|k| nontangential_max(f, Complex64::from_polar(1.0 - dm, 2.0 * PI * k as f64 / ANGLES as f64), EDGE).powf(p))
        .sum::<f64>()
        / ANGLES as f64;
    Ok((sum_ascending(&parts) + 2.0 * edge * w.hat_d(dm)).powf(1.0 / p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupValue {
    pub value: f64,
    pub argmax: (f64, f64),
    /// The series could not be trusted at every evaluated point.
    pub lower_bound_only: bool,
}

/// `sup_z (1 - |z|²)^m |g^{(m)}(z)|` over dyadic radii `1 - 2^{-k}`,
/// `k ≤ 20`, with `2^{⌈k/2⌉+4}` angles, refined locally at the maximum.
pub fn bloch_seminorm(g: &AnalyticFn, m: usize) -> Result<SupValue> {
    if m == 0 {
        return param("Bloch seminorm order must be at least 1");
    }
    let gm = derivative(g, m)?;
    let trusted = gm.is_exact() || gm.closed_form().is_some() || gm.tail_bound(1.0).is_some();
    let value = |d: f64, th: f64| {
        let r = 1.0 - d;
        (d * (2.0 - d)).powi(m as i32) * gm.eval(Complex64::from_polar(r, th)).norm()
    };
    let mut cands: Vec<(f64, f64, f64)> = Vec::new();
    let mut ds: Vec<(f64, usize)> = (0..16).map(|i| (1.0 - i as f64 / 16.0, 64)).collect();
    for k in 1..=20u32 {
        ds.push((0.5f64.powi(k as i32), 1usize << (k.div_ceil(2) + 4)));
    }
    let dirs = gm.singular_directions();
    let evals: Vec<Vec<(f64, f64, f64)>> = ds
        .par_iter()
        .map(|&(d, na)| {
            let mut out = Vec::with_capacity(na + dirs.len());
            let mut angles: Vec<f64> = (0..na).map(|i| 2.0 * PI * i as f64 / na as f64).collect();
            angles.extend(dirs.iter().copied());
            for th in angles {
                out.push((value(d, th), d, th));
            }
            out
        })
        .collect();
    for e in evals {
        cands.extend(e);
    }
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = cands[0];
    for &(v0, d0, t0) in cands.iter().take(4) {
        let (v, d, t) = refine_max(&value, v0, d0, t0);
        if v > best.0 {
            best = (v, d, t);
        }
    }
    let r = 1.0 - best.1;
    Ok(SupValue {
        value: best.0,
        argmax: (r * best.2.cos(), r * best.2.sin()),
        lower_bound_only: !trusted,
    })
}

/// Alternating golden-section search in `log d` and `θ` around a grid maximum.
fn refine_max<F: Fn(f64, f64) -> f64>(f: &F, v0: f64, d0: f64, t0: f64) -> (f64, f64, f64) {
    let (mut v, mut d, mut t) = (v0, d0, t0);
    let mut span_l = std::f64::consts::LN_2;
    let mut span_t = 0.2;
    for _ in 0..6 {
        let lo = (d.ln() - span_l).max(-20.0 * std::f64::consts::LN_2);
        let hi = (d.ln() + span_l).min(0.0);
        let l = golden_max(|x| f(x.exp(), t), lo, hi);
        if f(l.exp(), t) > v {
            d = l.exp();
            v = f(d, t);
        }
        let tt = golden_max(|x| f(d, x), t - span_t, t + span_t);
        if f(d, tt) > v {
            t = tt;
            v = f(d, t);
        }
        span_l *= 0.5;
        span_t *= 0.5;
    }
    (v, d, t)
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    for _ in 0..60 {
        if fc > fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = f(e);
        }
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientProfile {
    pub profile: Vec<((f64, f64), f64)>,
    pub sup: f64,
    /// Boundary trend of the quotient along the apex sequence.
    pub trend: ProfileVerdict,
    pub trend_exponent: Option<f64>,
    pub notes: Vec<String>,
    pub exclusion_radius: f64,
}

/// `∫_{S_a} |h|² ω* dA` for the Carleson square at `a`.
pub(crate) fn square_star_integral(h: &AnalyticFn, w: &Weight, a: DiskPoint) -> Result<f64> {
    let table = w.star_table(1)?;
    let ra = a.norm();
    let th = a.arg();
    let half = 0.5 * (1.0 - ra);
    let dirs = h.singular_directions();
    let lo = ra.max(STAR_EXCLUSION);
    let panels = radial_panels(lo, w.max_depth(), RADIAL_ORDER, |r, d| {
        let ang = integrate_arc(|t| h.eval(Complex64::from_polar(r, t)).norm_sqr(), th - half, th + half, &dirs, d, 16);
        r * table.eval_d(d) * ang
    });
    let parts: Vec<f64> = panels.iter().map(|x| x.1).collect();
    Ok(sum_ascending(&parts) / PI)
}

/// `∫_{S_a} |g'|² ω* dA / ω(S_a)` at each apex, with the running sup and
/// the boundary trend.
pub fn c1_star_functional(g: &AnalyticFn, w: &Weight, apexes: &[DiskPoint]) -> Result<QuotientProfile> {
    let gp = derivative(g, 1)?;
    let mut notes = Vec::new();
    let kept: Vec<DiskPoint> = apexes
        .iter()
        .copied()
        .filter(|a| {
            let keep = a.norm() > 0.0;
            if !keep {
                notes.push("apex at the origin skipped".to_string());
            }
            keep
        })
        .collect();
    let values: Vec<Result<f64>> = kept
        .par_iter()
        .map(|&a| {
            if gp.is_zero() {
                return Ok(0.0);
            }
            Ok(square_star_integral(&gp, w, a)? / weighted_square_measure(w, a)?)
        })
        .collect();
    let mut profile = Vec::with_capacity(kept.len());
    for (a, v) in kept.iter().zip(values) {
        profile.push(((a.re, a.im), v?));
    }
    let sup = profile.iter().map(|p| p.1).fold(0.0, f64::max);
    let trend_pts: Vec<(f64, f64)> = kept.iter().zip(&profile).map(|(a, p)| (1.0 - a.norm(), p.1)).collect();
    let (trend, trend_exponent) = detect::profile_verdict(&trend_pts);
    Ok(QuotientProfile {
        profile,
        sup,
        trend,
        trend_exponent,
        notes,
        exclusion_radius: STAR_EXCLUSION,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovValue {
    /// The seminorm, `+∞` when flagged infinite.
    pub value: f64,
    pub infinite: bool,
    pub reason: String,
    /// Contributions of the dyadic boundary layers.
    pub layers: Vec<f64>,
}

/// `(∫_D |g^{(m)}|^p (1 - |z|)^{mp - 2} dA)^{1/p}` with layer-based
/// divergence detection.
pub fn besov_seminorm(g: &AnalyticFn, p: f64, m: usize) -> Result<BesovValue> {
    if !(p > 0.0) || m == 0 {
        return param(format!("Besov seminorm needs p > 0 and m >= 1 (p = {p}, m = {m})"));
    }
    let gm = derivative(g, m)?;
    if gm.is_zero() {
        return Ok(BesovValue {
            value: 0.0,
            infinite: false,
            reason: "derivative vanishes identically".into(),
            layers: vec![],
        });
    }
    let mp = m as f64 * p;
    if mp <= 1.0 {
        return Ok(BesovValue {
            value: f64::INFINITY,
            infinite: true,
            reason: format!("mp = {mp} <= 1 with nonzero derivative"),
            layers: vec![],
        });
    }
    let panels = radial_panels(0.0, 40, RADIAL_ORDER, |r, d| 2.0 * r * d.powf(mp - 2.0) * circle_mean_pow(&gm, r, d, p, 0));
    let inner: f64 = panels.iter().filter(|x| x.0.is_none()).map(|x| x.1).sum();
    let layers: Vec<f64> = panels.iter().filter(|x| x.0.is_some()).map(|x| x.1).collect();
    if detect::layers_diverge(&layers) {
        return Ok(BesovValue {
            value: f64::INFINITY,
            infinite: true,
            reason: "boundary layer contributions do not decay".into(),
            layers,
        });
    }
    let (_, total, _) = detect::series_verdict(&layers);
    let total = if total.is_finite() { total } else { layers.iter().sum() };
    Ok(BesovValue {
        value: (inner + total).powf(1.0 / p),
        infinite: false,
        reason: "layer sum converges".into(),
        layers,
    })
}

/// Radial × angular product rule for `∫_D F(z) ω(z) dA(z)`.
#[derive(Debug, Clone)]
pub struct DiskQuadrature {
    pub grid: RadialGrid,
    pub angles: usize,
}

impl DiskQuadrature {
    pub fn new(depth: u32, order: usize, angles: usize) -> Self {
        DiskQuadrature {
            grid: RadialGrid::plain(0.0, depth, order),
            angles,
        }
    }

    pub fn integrate<F: Fn(Complex64) -> f64 + Sync>(&self, w: &Weight, f: F) -> f64 {
        let na = self.angles;
        let mean = |r: f64| {
            (0..na)
                .map(|k| f(Complex64::from_polar(r, 2.0 * PI * k as f64 / na as f64)))
                .sum::<f64>()
                / na as f64
        };
        let body = self.grid.integrate(|r, d| 2.0 * r * w.density(d) * mean(r));
        let dm = self.grid.d_min();
        body + 2.0 * (1.0 - dm) * mean(1.0 - dm) * w.hat_d(dm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{carleson, log_singular};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn bergman_examples() {
        let w = Weight::standard(0.0).unwrap();
        let one = AnalyticFn::real_polynomial(&[1.0]);
        assert!((bergman_norm(&one, &w, 2.0).unwrap().value - 1.0).abs() < 1e-10);
        let z = AnalyticFn::monomial(1);
        let v = bergman_norm(&z, &w, 2.0).unwrap();
        assert!((v.value.powi(2) - 0.5).abs() < 1e-10);
        assert!(v.warning.is_none());
        let f = carleson(c(0.5), 2.0, 200).unwrap();
        let v = bergman_norm(&f, &w, 2.0).unwrap();
        assert!((v.value.powi(2) - 1.0 / 9.0).abs() < 1e-9, "{}", v.value);
        assert!((v.coefficient_value.unwrap().powi(2) - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn littlewood_paley_examples() {
        let w = Weight::standard(0.0).unwrap();
        let z = AnalyticFn::monomial(1);
        assert!((littlewood_paley_p2(&z, &w).unwrap() - 0.5).abs() < 1e-9);
        let one = AnalyticFn::real_polynomial(&[1.0]);
        assert!((littlewood_paley_p2(&one, &w).unwrap() - 1.0).abs() < 1e-12);
        let w1 = Weight::standard(1.0).unwrap();
        let f = AnalyticFn::real_polynomial(&[1.0, 2.0, 0.0, 1.0]);
        let lp = littlewood_paley_p2(&f, &w1).unwrap();
        let co = coefficient_norm_sq(&f, &w1);
        assert!((lp - co).abs() < 1e-8 * co, "{lp} {co}");
    }

    #[test]
    fn nontangential_examples() {
        let w = Weight::standard(0.0).unwrap();
        let one = AnalyticFn::real_polynomial(&[1.0]);
        assert!((nontangential_norm(&one, &w, 3.0).unwrap() - 1.0).abs() < 1e-8);
        let z = AnalyticFn::monomial(1);
        let n = nontangential_norm(&z, &w, 2.0).unwrap();
        let b = bergman_norm(&z, &w, 2.0).unwrap().value;
        assert!(n >= b * (1.0 - 1e-9) && n <= 4.0 * b, "{n} {b}");
    }

    #[test]
    fn bloch_examples() {
        let z = AnalyticFn::monomial(1);
        assert!((bloch_seminorm(&z, 1).unwrap().value - 1.0).abs() < 1e-12);
        let l = bloch_seminorm(&log_singular(64), 1).unwrap();
        assert!((l.value - 2.0).abs() < 2e-4, "{}", l.value);
        assert!(!l.lower_bound_only);
        let z2 = AnalyticFn::monomial(2);
        let v = bloch_seminorm(&z2, 1).unwrap().value;
        assert!((v - 4.0 / (3.0 * 3f64.sqrt())).abs() < 1e-9, "{v}");
    }

    #[test]
    fn besov_examples() {
        let z = AnalyticFn::monomial(1);
        let v = besov_seminorm(&z, 2.0, 1).unwrap();
        assert!(!v.infinite && (v.value - 1.0).abs() < 1e-9, "{:?}", v.value);
        assert!(besov_seminorm(&z, 1.0, 1).unwrap().infinite);
        let l = besov_seminorm(&log_singular(64), 2.0, 1).unwrap();
        assert!(l.infinite, "{}", l.reason);
    }

    #[test]
    fn c1_star_examples() {
        let w = Weight::standard(0.0).unwrap();
        let apexes: Vec<DiskPoint> = [0.3, 0.6, 0.9, 0.99].iter().map(|r| DiskPoint::new(*r, 0.0).unwrap()).collect();
        let q = c1_star_functional(&AnalyticFn::monomial(1), &w, &apexes).unwrap();
        assert!(q.profile.iter().all(|p| p.1 > 0.0 && p.1 <= 1.0), "{:?}", q.profile);
        let k = c1_star_functional(&AnalyticFn::real_polynomial(&[3.0]), &w, &apexes).unwrap();
        assert!(k.profile.iter().all(|p| p.1 == 0.0));
        let mut with_origin = apexes.clone();
        with_origin.push(DiskPoint::origin());
        let s = c1_star_functional(&AnalyticFn::monomial(1), &w, &with_origin).unwrap();
        assert_eq!(s.profile.len(), 4);
        assert_eq!(s.notes.len(), 1);
    }

    #[test]
    fn disk_quadrature_moments() {
        let q = DiskQuadrature::new(40, 20, 32);
        for w in [Weight::standard(0.0).unwrap(), Weight::standard(2.5).unwrap(), Weight::log_doubling(2.0).unwrap()] {
            for j in [0usize, 3, 10] {
                let v = q.integrate(&w, |z| z.norm_sqr().powi(j as i32));
                let exact = w.basis_norm_sq(j);
                assert!(((v - exact) / exact).abs() < 1e-9, "{v} {exact}");
            }
        }
    }
}
