//! Gauss–Legendre rules and the panel layouts used for every radial and
//! angular integral in the crate.
//!
//! Radial integrals over `[lo, 1)` are split into dyadic boundary layers
//! `d ∈ [2^{-m-1}, 2^{-m}]` in the distance-to-boundary variable `d = 1 - r`,
//! so that integrands concentrating at the unit circle are resolved. Nodes
//! carry both `r` and `d`; integrands should prefer `d` near the boundary.

use std::f64::consts::PI;
use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    bary: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        // barycentric weights for interpolation through Gauss nodes
        let bary = nodes
            .iter()
            .zip(&weights)
            .enumerate()
            .map(|(i, (x, w))| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * ((1.0 - x * x) * w).sqrt()
            })
            .collect();
        GaussLegendre {
            nodes,
            weights,
            bary,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Barycentric interpolation of values sampled at the nodes, `t` in `[-1, 1]`.
    pub fn interpolate(&self, values: &[f64], t: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((x, b), v) in self.nodes.iter().zip(&self.bary).zip(values) {
            let diff = t - x;
            if diff == 0.0 {
                return *v;
            }
            let c = b / diff;
            num += c * v;
            den += c;
        }
        num / den
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, dp)
}

/// Shared rule of the given order; common orders are built once.
pub fn gauss_legendre(n: usize) -> &'static GaussLegendre {
    static RULES: [OnceLock<GaussLegendre>; 65] = [const { OnceLock::new() }; 65];
    assert!(n <= 64, "rule order {n} not cached");
    RULES[n].get_or_init(|| GaussLegendre::new(n))
}

/// Adaptive Gauss–Legendre: a 16-point panel is accepted when it agrees
/// with the sum over its two halves.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    let rule = gauss_legendre(16);
    let whole = rule.integrate(a, b, &mut f);
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut total = 0.0;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &mut f);
        let right = rule.integrate(mid, hi, &mut f);
        let refined = left + right;
        let tol = abs_tol.max(rel_tol * refined.abs());
        if (refined - est).abs() <= tol || depth >= 40 {
            total += refined;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    total
}

/// A quadrature node on the radial interval with both coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialNode {
    pub r: f64,
    pub d: f64,
    pub w: f64,
}

/// One panel of a radial layout, parametrised by `r` near the origin and by
/// `d = 1 - r` near the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub in_d: bool,
    /// Dyadic boundary layer index `m` for `d ∈ [2^{-m-1}, 2^{-m}]`.
    pub layer: Option<u32>,
}

impl Panel {
    pub fn nodes<'a>(&'a self, rule: &'a GaussLegendre) -> impl Iterator<Item = RadialNode> + 'a {
        rule.mapped(self.lo, self.hi).map(move |(x, w)| {
            if self.in_d {
                RadialNode { r: 1.0 - x, d: x, w }
            } else {
                RadialNode { r: x, d: 1.0 - x, w }
            }
        })
    }

    fn contains_d(&self, d: f64) -> bool {
        if self.in_d {
            d >= self.lo && d <= self.hi
        } else {
            let r = 1.0 - d;
            r >= self.lo && r <= self.hi
        }
    }

    fn local(&self, d: f64) -> f64 {
        let x = if self.in_d { d } else { 1.0 - d };
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }
}

/// Panel layout for radial integrals over `[lo, 1)`.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub panels: Vec<Panel>,
    pub order: usize,
    pub max_depth: u32,
    pub lo: f64,
}

/// Number of dyadic panels used toward the origin when the lower limit is 0.
pub const ORIGIN_LAYERS: u32 = 52;

impl RadialGrid {
    /// Layout over `[lo, 1 - 2^{-max_depth}]`. With `lo == 0` the interval
    /// `[0, 1/2]` is refined dyadically toward the origin, which resolves
    /// logarithmic singularities there.
    pub fn new(lo: f64, max_depth: u32, order: usize) -> Self {
        Self::build(lo, max_depth, order, true)
    }

    /// Same layout without the refinement toward the origin.
    pub fn plain(lo: f64, max_depth: u32, order: usize) -> Self {
        Self::build(lo, max_depth, order, false)
    }

    fn build(lo: f64, max_depth: u32, order: usize, origin_refine: bool) -> Self {
        assert!((0.0..1.0).contains(&lo));
        let mut panels = Vec::new();
        if lo < 0.5 {
            if lo == 0.0 && !origin_refine {
                panels.push(Panel {
                    lo: 0.0,
                    hi: 0.5,
                    in_d: false,
                    layer: None,
                });
            } else if lo == 0.0 {
                for k in (1..=ORIGIN_LAYERS).rev() {
                    panels.push(Panel {
                        lo: 0.5f64.powi(k as i32 + 1),
                        hi: 0.5f64.powi(k as i32),
                        in_d: false,
                        layer: None,
                    });
                }
            } else {
                let mut k = (-lo.log2()).floor() as i32;
                let mut start = lo;
                while k >= 1 {
                    let b = 0.5f64.powi(k);
                    if b > start {
                        panels.push(Panel {
                            lo: start,
                            hi: b,
                            in_d: false,
                            layer: None,
                        });
                        start = b;
                    }
                    k -= 1;
                }
                if start < 0.5 {
                    panels.push(Panel {
                        lo: start,
                        hi: 0.5,
                        in_d: false,
                        layer: None,
                    });
                }
            }
        }
        let d_start = (1.0 - lo).min(0.5);
        let mut m = (-d_start.log2()).floor() as u32;
        let mut hi = d_start;
        while m < max_depth {
            let lo_d = 0.5f64.powi(m as i32 + 1);
            if lo_d < hi {
                panels.push(Panel {
                    lo: lo_d,
                    hi,
                    in_d: true,
                    layer: Some(m),
                });
                hi = lo_d;
            }
            m += 1;
        }
        RadialGrid {
            panels,
            order,
            max_depth,
            lo,
        }
    }

    pub fn rule(&self) -> &'static GaussLegendre {
        gauss_legendre(self.order)
    }

    /// Smallest distance to the boundary covered by the panels.
    pub fn d_min(&self) -> f64 {
        0.5f64.powi(self.max_depth as i32)
    }

    pub fn nodes(&self) -> impl Iterator<Item = RadialNode> + '_ {
        let rule = self.rule();
        self.panels.iter().flat_map(move |p| p.nodes(rule))
    }

    pub fn node_count(&self) -> usize {
        self.panels.len() * self.order
    }

    /// Per-panel integrals of `f(r, d)`.
    pub fn panel_integrals<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> Vec<f64> {
        let rule = self.rule();
        self.panels
            .iter()
            .map(|p| p.nodes(rule).map(|n| n.w * f(n.r, n.d)).sum())
            .collect()
    }

    pub fn integrate<F: FnMut(f64, f64) -> f64>(&self, f: F) -> f64 {
        let parts = self.panel_integrals(f);
        sum_ascending(&parts)
    }

    /// Index of the panel holding distance `d`, if covered.
    pub fn locate(&self, d: f64) -> Option<usize> {
        self.panels.iter().position(|p| p.contains_d(d))
    }

    /// Interpolates a function tabulated at `nodes()` (same ordering).
    pub fn interpolate(&self, values: &[f64], d: f64) -> Option<f64> {
        let idx = self.locate(d)?;
        let n = self.order;
        let p = &self.panels[idx];
        Some(self.rule().interpolate(&values[idx * n..(idx + 1) * n], p.local(d)))
    }
}

/// Sums small-magnitude terms first; deterministic regardless of origin.
pub fn sum_ascending(parts: &[f64]) -> f64 {
    let mut v: Vec<f64> = parts.to_vec();
    v.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap_or(std::cmp::Ordering::Equal));
    v.iter().sum()
}

/// Breakpoints on `[c - π, c + π)` graded geometrically toward each singular
/// direction at scale `width`.
pub fn graded_breakpoints(singular: &[f64], width: f64, base: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = Vec::new();
    let c = singular.first().copied().unwrap_or(0.0);
    let wrap = |t: f64| {
        let mut x = (t - c + PI).rem_euclid(2.0 * PI) - PI;
        if x >= PI {
            x -= 2.0 * PI;
        }
        x + c
    };
    for i in 0..base {
        pts.push(c - PI + 2.0 * PI * i as f64 / base as f64);
    }
    let w = width.max(1e-300);
    for &s in singular {
        pts.push(wrap(s));
        let mut h = w;
        while h < PI {
            pts.push(wrap(s + h));
            pts.push(wrap(s - h));
            h *= 2.0;
        }
    }
    pts.push(c + PI);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-300);
    pts
}

/// Integral over a full circle with grading toward singular directions.
pub fn integrate_circle<F: FnMut(f64) -> f64>(mut f: F, singular: &[f64], width: f64, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let pts = graded_breakpoints(singular, width, 8);
    let parts: Vec<f64> = pts
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .collect();
    sum_ascending(&parts)
}

/// Integral over `[a, b]` with grading toward singular directions inside it.
pub fn integrate_arc<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    singular: &[f64],
    width: f64,
    order: usize,
) -> f64 {
    let rule = gauss_legendre(order);
    let mut pts = vec![a, b];
    for i in 1..4 {
        pts.push(a + (b - a) * i as f64 / 4.0);
    }
    for &s0 in singular {
        // nearest representative of the direction
        let s = s0 + 2.0 * PI * ((0.5 * (a + b) - s0) / (2.0 * PI)).round();
        let mut h = width.max(1e-300);
        if s > a && s < b {
            pts.push(s);
        }
        while h < (b - a) {
            for t in [s + h, s - h] {
                if t > a && t < b {
                    pts.push(t);
                }
            }
            h *= 2.0;
        }
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let parts: Vec<f64> = pts
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .collect();
    sum_ascending(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(10);
        let v = rule.integrate(0.0, 1.0, |x| x.powi(19));
        assert!((v - 1.0 / 20.0).abs() < 1e-15);
        let s: f64 = rule.weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let rule = GaussLegendre::new(7);
        assert_eq!(rule.nodes()[3], 0.0);
        assert!((rule.integrate(-1.0, 1.0, |x| x * x) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn interpolation_reproduces_low_degree() {
        let rule = gauss_legendre(12);
        let vals: Vec<f64> = rule.nodes().iter().map(|x| x.powi(5) - 2.0 * x).collect();
        let t = 0.3137;
        assert!((rule.interpolate(&vals, t) - (t.powi(5) - 2.0 * t)).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let v = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, 1e-13, 1e-15);
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn radial_grid_resolves_log_and_boundary_layers() {
        let grid = RadialGrid::new(0.0, 50, 24);
        // ∫ r log(1/r) dr = 1/4
        let v = grid.integrate(|r, _| -r * r.ln());
        assert!((v - 0.25).abs() < 1e-14, "{v}");
        // ∫ (1-r)^{-1/2} dr = 2, minus the uncovered tail 2 sqrt(d_min)
        let v = grid.integrate(|_, d| d.powf(-0.5));
        let expect = 2.0 - 2.0 * grid.d_min().sqrt();
        assert!((v - expect).abs() < 1e-12, "{v}");
    }

    #[test]
    fn grid_from_interior_point() {
        let grid = RadialGrid::new(0.3, 40, 20);
        let v = grid.integrate(|r, _| r * r);
        assert!((v - (1.0 - 0.027) / 3.0).abs() < 1e-12);
        assert!((grid.panels[0].lo - 0.3).abs() < 1e-15);
    }

    #[test]
    fn grid_interpolation() {
        let grid = RadialGrid::new(0.0, 30, 16);
        let vals: Vec<f64> = grid.nodes().map(|n| n.r.exp()).collect();
        for &r in &[1e-6, 0.2, 0.5, 0.77, 0.999] {
            let v = grid.interpolate(&vals, 1.0 - r).unwrap();
            assert!((v - f64::exp(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_with_peak() {
        // ∫ dθ / |1 - r e^{iθ}|^2 = 2π / (1 - r^2)
        let r: f64 = 1.0 - 1e-9;
        let v = integrate_circle(
            |t| 1.0 / ((1.0 - r).powi(2) + 4.0 * r * (0.5 * t).sin().powi(2)),
            &[0.0],
            1e-9,
            16,
        );
        let exact = 2.0 * PI / ((1.0 - r) * (1.0 + r));
        assert!((v / exact - 1.0).abs() < 1e-8, "{v} {exact}");
    }
}
