//! Radial weights on the unit disk and the scalar quantities derived from
//! them: the tail integral `ω̂`, the logarithmic tail `ω*` (and its
//! iterates), odd/even moments `ω_j`, doubling diagnostics and the
//! kernel-derivative weight transform.
//!
//! Radii are handled through the distance to the boundary `d = 1 - r`
//! wherever precision near the circle matters. The area measure is
//! normalized (`A(D) = 1`), so `ω(D) = 2ω_1`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::detect;
use crate::error::{domain, param, LabError, Result};
use crate::quad::{RadialGrid, RadialNode};

/// Deepest dyadic boundary layer used by weight integrals.
pub const DEFAULT_MAX_DEPTH: u32 = 40;
const ORDER: usize = 20;
const TABLE_DEPTH: u32 = 44;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightKind {
    /// `(1 - r²)^α`
    StandardAlpha { alpha: f64 },
    /// `[(1 - r) log(e/(1 - r))^β]^{-1}`
    LogDoubling { beta: f64 },
    /// `exp(-c/(1 - r))`, not doubling
    Exponential { c: f64 },
    /// Piecewise-linear interpolation of the log-density in `r`,
    /// constant beyond the sampled range.
    Tabulated { radii: Vec<f64>, log_density: Vec<f64> },
    /// `υ(t) = 2^k/(k-1)! ∫_t^1 s ω(s) ((s² - t²)/2)^{k-1} ds`, the k-fold
    /// iterate of `υ(t) = 2∫_t^1 s ω(s) ds`.
    Upsilon { base: Box<WeightKind>, k: u32 },
}

struct Inner {
    kind: WeightKind,
    base: Option<Weight>,
    max_depth: u32,
    moments: Mutex<HashMap<u64, f64>>,
    hats: Mutex<HashMap<u64, f64>>,
    star_tables: [OnceLock<Arc<RadialTable>>; 3],
}

/// A radial weight with memoized derived quantities. Cloning is cheap and
/// clones share caches.
#[derive(Clone)]
pub struct Weight {
    inner: Arc<Inner>,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight").field("kind", &self.inner.kind).finish()
    }
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        self.inner.kind == other.inner.kind
    }
}

impl Weight {
    pub fn new(kind: WeightKind) -> Result<Self> {
        Self::with_depth(kind, DEFAULT_MAX_DEPTH)
    }

    pub fn with_depth(kind: WeightKind, max_depth: u32) -> Result<Self> {
        let base = match &kind {
            WeightKind::StandardAlpha { alpha } if !(*alpha > -1.0) => {
                return param(format!("standard weight needs alpha > -1, got {alpha}"))
            }
            WeightKind::LogDoubling { beta } if !(*beta > 1.0) => {
                return param(format!("log-doubling weight needs beta > 1, got {beta}"))
            }
            WeightKind::Exponential { c } if !(*c > 0.0) => {
                return param(format!("exponential weight needs c > 0, got {c}"))
            }
            WeightKind::Tabulated { radii, log_density } => {
                if radii.len() < 2 || radii.len() != log_density.len() {
                    return param("tabulated weight needs at least two (radius, density) samples");
                }
                if radii.windows(2).any(|w| !(w[0] < w[1])) || radii[0] < 0.0 || radii[radii.len() - 1] >= 1.0 {
                    return param("tabulated radii must increase strictly inside [0, 1)");
                }
                if log_density.iter().any(|v| !v.is_finite()) {
                    return param("tabulated densities must be positive and finite");
                }
                None
            }
            WeightKind::Upsilon { base, k } => {
                if *k == 0 {
                    return param("upsilon transform order must be at least 1");
                }
                Some(Weight::with_depth((**base).clone(), max_depth)?)
            }
            _ => None,
        };
        Ok(Weight {
            inner: Arc::new(Inner {
                kind,
                base,
                max_depth,
                moments: Mutex::new(HashMap::new()),
                hats: Mutex::new(HashMap::new()),
                star_tables: [OnceLock::new(), OnceLock::new(), OnceLock::new()],
            }),
        })
    }

    pub fn standard(alpha: f64) -> Result<Self> {
        Self::new(WeightKind::StandardAlpha { alpha })
    }

    pub fn log_doubling(beta: f64) -> Result<Self> {
        Self::new(WeightKind::LogDoubling { beta })
    }

    pub fn exponential(c: f64) -> Result<Self> {
        Self::new(WeightKind::Exponential { c })
    }

    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.iter().any(|(_, v)| !(*v > 0.0)) {
            return param("tabulated densities must be positive");
        }
        let radii = samples.iter().map(|s| s.0).collect();
        let log_density = samples.iter().map(|s| s.1.ln()).collect();
        Self::new(WeightKind::Tabulated { radii, log_density })
    }

    /// Reads a two-column text file of `radius density` pairs. Blank lines
    /// and lines starting with `#` are ignored.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let mut samples = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() < 2 {
                return Err(LabError::Parse(format!("line {}: expected two columns", no + 1)));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| LabError::Parse(format!("line {}: {e}", no + 1)))
            };
            samples.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::tabulated(&samples)
    }

    /// Parses `std:alpha=<real>`, `log:beta=<real>`, `exp:c=<real>` or
    /// `file:<path>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (head, rest) = spec
            .split_once(':')
            .ok_or_else(|| LabError::Parse(format!("weight spec `{spec}` lacks a kind prefix")))?;
        let value = |key: &str| -> Result<f64> {
            let v = rest
                .strip_prefix(key)
                .and_then(|s| s.strip_prefix('='))
                .ok_or_else(|| LabError::Parse(format!("weight spec `{spec}`: expected {key}=<real>")))?;
            v.trim()
                .parse::<f64>()
                .map_err(|e| LabError::Parse(format!("weight spec `{spec}`: {e}")))
        };
        match head {
            "std" => Self::standard(value("alpha")?),
            "log" => Self::log_doubling(value("beta")?),
            "exp" => Self::exponential(value("c")?),
            "file" => Self::from_file(rest),
            other => Err(LabError::Parse(format!("unknown weight kind `{other}`"))),
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.inner.kind
    }

    pub fn max_depth(&self) -> u32 {
        self.inner.max_depth
    }

    /// Short description used in reports.
    pub fn label(&self) -> String {
        kind_label(&self.inner.kind)
    }

    /// Density value at `r ∈ [0, 1)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return domain(format!("weight evaluated at r = {r}, outside [0, 1)"));
        }
        Ok(self.density(1.0 - r))
    }

    /// Density as a function of the distance `d = 1 - r`, `d ∈ (0, 1]`.
    pub fn density(&self, d: f64) -> f64 {
        match &self.inner.kind {
            WeightKind::StandardAlpha { alpha } => (d * (2.0 - d)).powf(*alpha),
            WeightKind::LogDoubling { beta } => 1.0 / (d * (1.0 - d.ln()).powf(*beta)),
            WeightKind::Exponential { c } => (-c / d).exp(),
            WeightKind::Tabulated { radii, log_density } => tabulated_density(radii, log_density, 1.0 - d),
            WeightKind::Upsilon { k, .. } => self.upsilon_density(*k, d),
        }
    }

    fn base(&self) -> &Weight {
        self.inner.base.as_ref().expect("upsilon weight has a base")
    }

    fn upsilon_density(&self, k: u32, dt: f64) -> f64 {
        let base = self.base();
        let t = 1.0 - dt;
        let scale = 2f64.powi(k as i32) / factorial(k - 1);
        let h = |s: f64, ds: f64| {
            // s² - t² = (dt - ds)(2 - dt - ds)
            let q = 0.5 * (dt - ds) * (2.0 - dt - ds);
            s * q.max(0.0).powi(k as i32 - 1)
        };
        scale * base.integrate_against(t, h)
    }

    /// `∫_lo^1 h(s) ω(s) ds` where `h(s, d)` receives both `s` and `1 - s`.
    /// The region beyond the deepest layer is closed with the weight's tail
    /// mass times the integrand factor at the last layer.
    pub fn integrate_against<H: Fn(f64, f64) -> f64>(&self, lo: f64, h: H) -> f64 {
        let grid = RadialGrid::plain(lo, self.inner.max_depth, ORDER);
        let body = grid.integrate(|r, d| h(r, d) * self.density(d));
        let dm = grid.d_min().min(1.0 - lo);
        body + h(1.0 - dm, dm) * self.tail_mass(dm)
    }

    /// `∫_0^{dm} ω` for a tiny `dm`, from the boundary asymptotics.
    fn tail_mass(&self, dm: f64) -> f64 {
        match &self.inner.kind {
            WeightKind::StandardAlpha { alpha } => {
                2f64.powf(*alpha) * dm.powf(alpha + 1.0) / (alpha + 1.0)
                    * (1.0 - alpha * (alpha + 1.0) * dm / (2.0 * (alpha + 2.0)))
            }
            WeightKind::LogDoubling { beta } => (1.0 - dm.ln()).powf(1.0 - beta) / (beta - 1.0),
            WeightKind::Exponential { .. } => 0.0,
            _ => {
                let a = self.density(dm);
                let b = self.density(2.0 * dm);
                if a <= 0.0 || b <= 0.0 {
                    return 0.0;
                }
                let e = (b / a).log2();
                if e > -1.0 {
                    a * dm / (e + 1.0)
                } else {
                    a * dm
                }
            }
        }
    }

    /// `ω̂(r) = ∫_r^1 ω(s) ds`, with `ω̂(1) = 0`.
    pub fn hat(&self, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return domain(format!("hat evaluated at r = {r}, outside [0, 1]"));
        }
        Ok(self.hat_d(1.0 - r))
    }

    /// `ω̂` as a function of `d = 1 - r`.
    pub fn hat_d(&self, d: f64) -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        match &self.inner.kind {
            WeightKind::LogDoubling { beta } => return (1.0 - d.ln()).powf(1.0 - beta) / (beta - 1.0),
            WeightKind::Exponential { c } => return exp_hat(*c, d),
            _ => {}
        }
        let key = d.to_bits();
        if let Some(v) = self.inner.hats.lock().unwrap().get(&key) {
            return *v;
        }
        let dm = 0.5f64.powi(self.inner.max_depth as i32);
        let v = if d <= dm {
            self.tail_mass(d)
        } else {
            self.integrate_against(1.0 - d, |_, _| 1.0)
        };
        self.inner.hats.lock().unwrap().insert(key, v);
        v
    }

    /// `ω*(r) = ∫_r^1 s ω(s) log(s/r) ds` for `0 < r < 1`.
    pub fn star(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return domain(format!("star needs 0 < r < 1, got {r}"));
        }
        Ok(self.star_d(1.0 - r))
    }

    pub(crate) fn star_d(&self, dr: f64) -> f64 {
        let r = 1.0 - dr;
        self.integrate_against(r, |s, ds| s * ((dr - ds) / r).ln_1p())
    }

    /// `ω_j = ∫_0^1 t^j ω(t) dt`.
    pub fn moment(&self, j: u32) -> f64 {
        self.moment_real(j as f64)
    }

    /// Moment of real order `x ≥ 0`.
    pub fn moment_real(&self, x: f64) -> f64 {
        let key = x.to_bits();
        if let Some(v) = self.inner.moments.lock().unwrap().get(&key) {
            return *v;
        }
        let v = self.integrate_against(0.0, |_, d| (x * (-d).ln_1p()).exp());
        self.inner.moments.lock().unwrap().insert(key, v);
        v
    }

    /// `‖z^j‖² = 2ω_{2j+1}` in `A²_ω`.
    pub fn basis_norm_sq(&self, j: usize) -> f64 {
        2.0 * self.moment(2 * j as u32 + 1)
    }

    /// `ω(D) = 2ω_1`.
    pub fn total_mass(&self) -> f64 {
        2.0 * self.moment(1)
    }

    /// Ratios `ω̂(1-2^{-m}) / ω̂(1-2^{-m-1})` for `m = 0..depth`.
    pub fn doubling_profile(&self, depth: usize) -> Result<DoublingProfile> {
        if depth < 2 {
            return param("doubling profile needs depth >= 2");
        }
        let mut ratios = Vec::with_capacity(depth);
        let mut truncated = false;
        for m in 0..depth {
            let a = self.hat_d(0.5f64.powi(m as i32));
            let b = self.hat_d(0.5f64.powi(m as i32 + 1));
            if !(b > 1e-300) || !a.is_finite() {
                truncated = true;
                break;
            }
            ratios.push(a / b);
        }
        let max = ratios.iter().cloned().fold(f64::NAN, f64::max);
        let verdict = doubling_verdict(&ratios);
        Ok(DoublingProfile {
            ratios,
            max_ratio: max,
            verdict,
            truncated,
        })
    }

    /// `ω̂(r) / ((1 - r) ω(r))` at each radius, with a boundedness verdict.
    pub fn regular_ratio_profile(&self, radii: &[f64]) -> Result<RatioProfile> {
        let mut values = Vec::with_capacity(radii.len());
        for &r in radii {
            if !(0.0..1.0).contains(&r) {
                return domain(format!("regular ratio at r = {r}"));
            }
            let d = 1.0 - r;
            values.push((r, self.hat_d(d) / (d * self.density(d))));
        }
        let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let hi = values.iter().map(|v| v.1).fold(0.0, f64::max);
        let tail: Vec<(f64, f64)> = values.iter().map(|(r, v)| (1.0 - r, *v)).collect();
        let slope = detect::fit_tail_exponent(&tail, 5);
        let bounded = lo > 0.0 && hi.is_finite() && hi / lo <= REGULAR_SPREAD && slope.is_none_or(|s| s.abs() <= 0.05);
        Ok(RatioProfile {
            values,
            min: lo,
            max: hi,
            tail_exponent: slope,
            bounded,
        })
    }

    /// The weight `υ` whose odd moments satisfy
    /// `2υ_{2(j-k)+1} = (j-k)!/j! · 2ω_{2j+1}` for every `j ≥ k`.
    pub fn upsilon_transform(&self, k: u32) -> Result<Weight> {
        if k == 0 {
            return Ok(self.clone());
        }
        let (base, k_total) = match &self.inner.kind {
            WeightKind::Upsilon { base, k: k0 } => ((**base).clone(), k0 + k),
            other => (other.clone(), k),
        };
        Weight::with_depth(
            WeightKind::Upsilon {
                base: Box::new(base),
                k: k_total,
            },
            self.inner.max_depth,
        )
    }

    /// `ω^{*n}` tabulated on the shared radial layout (`n ∈ 1..=3`).
    pub fn star_table(&self, n: usize) -> Result<Arc<RadialTable>> {
        if !(1..=3).contains(&n) {
            return Err(LabError::Unsupported(format!("iterated star of order {n} (only 1..=3)")));
        }
        if let Some(t) = self.inner.star_tables[n - 1].get() {
            return Ok(t.clone());
        }
        let table = if n == 1 {
            let grid = Arc::new(RadialGrid::new(0.0, TABLE_DEPTH, ORDER));
            let values: Vec<f64> = {
                use rayon::prelude::*;
                let nodes: Vec<RadialNode> = grid.nodes().collect();
                nodes.par_iter().map(|nd| self.star_d(nd.d)).collect()
            };
            RadialTable::new(grid, values)
        } else {
            let prev = self.star_table(n - 1)?;
            prev.star_of()
        };
        let table = Arc::new(table);
        let _ = self.inner.star_tables[n - 1].set(table.clone());
        Ok(self.inner.star_tables[n - 1].get().cloned().unwrap_or(table))
    }
}

const REGULAR_SPREAD: f64 = 50.0;

fn kind_label(kind: &WeightKind) -> String {
    match kind {
        WeightKind::StandardAlpha { alpha } => format!("std:alpha={alpha}"),
        WeightKind::LogDoubling { beta } => format!("log:beta={beta}"),
        WeightKind::Exponential { c } => format!("exp:c={c}"),
        WeightKind::Tabulated { radii, .. } => format!("tabulated:{}", radii.len()),
        WeightKind::Upsilon { base, k } => format!("upsilon:k={k}({})", kind_label(base)),
    }
}

/// `∫_0^d e^{-c/s} ds = c e^{-x} ∫_0^∞ e^{-v} (x + v)^{-2} dv` with `x = c/d`.
fn exp_hat(c: f64, d: f64) -> f64 {
    let x = c / d;
    if x > 745.0 {
        return 0.0;
    }
    let inner = crate::quad::adaptive(
        |t: f64| {
            let v = t / (1.0 - t);
            (-v).exp() / ((x + v) * (x + v) * (1.0 - t) * (1.0 - t))
        },
        0.0,
        1.0,
        1e-12,
        1e-20 / (x * x),
    );
    c * (-x).exp() * inner
}

fn tabulated_density(radii: &[f64], logd: &[f64], r: f64) -> f64 {
    let n = radii.len();
    if r <= radii[0] {
        return logd[0].exp();
    }
    if r >= radii[n - 1] {
        return logd[n - 1].exp();
    }
    let i = radii.partition_point(|x| *x <= r) - 1;
    let t = (r - radii[i]) / (radii[i + 1] - radii[i]);
    (logd[i] * (1.0 - t) + logd[i + 1] * t).exp()
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DoublingVerdict {
    DoublingLike,
    NonDoubling,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoublingProfile {
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub verdict: DoublingVerdict,
    /// Set when `ω̂` underflowed before the requested depth.
    pub truncated: bool,
}

/// Non-doubling: five consecutive ratio steps each growing by at least 1.2.
/// Doubling-like: the last steps change by less than 2%.
fn doubling_verdict(ratios: &[f64]) -> DoublingVerdict {
    const STEP: f64 = 1.2;
    const WINDOW: usize = 5;
    let steps: Vec<f64> = ratios.windows(2).map(|w| w[1] / w[0]).collect();
    let growing = steps.windows(WINDOW).any(|w| w.iter().all(|s| *s >= STEP));
    if growing {
        return DoublingVerdict::NonDoubling;
    }
    match steps.last() {
        Some(s) if (s - 1.0).abs() < 0.02 => DoublingVerdict::DoublingLike,
        _ => DoublingVerdict::Inconclusive,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioProfile {
    pub values: Vec<(f64, f64)>,
    pub min: f64,
    pub max: f64,
    pub tail_exponent: Option<f64>,
    pub bounded: bool,
}

/// A radial function tabulated at the nodes of a [`RadialGrid`] that starts
/// at the origin, evaluated between nodes by barycentric interpolation.
#[derive(Debug, Clone)]
pub struct RadialTable {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialTable {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        assert_eq!(grid.node_count(), values.len());
        RadialTable { grid, values }
    }

    /// Tabulates `f(r, d)` on the layout shared by the star tables.
    pub(crate) fn from_fn<F: Fn(f64, f64) -> f64 + Sync>(f: F) -> Self {
        use rayon::prelude::*;
        let grid = Arc::new(RadialGrid::new(0.0, TABLE_DEPTH, ORDER));
        let nodes: Vec<RadialNode> = grid.nodes().collect();
        let values = nodes.par_iter().map(|nd| f(nd.r, nd.d)).collect();
        RadialTable::new(grid, values)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at distance `d` from the boundary. Beyond the deepest layer the
    /// table is continued by the power law fitted to its last two nodes.
    pub fn eval_d(&self, d: f64) -> f64 {
        if let Some(v) = self.grid.interpolate(&self.values, d) {
            return v;
        }
        let n = self.values.len();
        if d < 0.5 {
            // beyond the deepest layer
            let nodes: Vec<RadialNode> = self.grid.nodes().collect();
            let (a, b) = (nodes[n - 1], nodes[n - 1 - self.grid.order]);
            let (va, vb) = (self.values[n - 1], self.values[n - 1 - self.grid.order]);
            if va > 0.0 && vb > 0.0 {
                let e = (vb / va).ln() / (b.d / a.d).ln();
                return va * (d / a.d).powf(e);
            }
            return va;
        }
        // below the innermost origin layer; the function is locally logarithmic
        self.values[0]
    }

    /// Integral `∫_0^1 f(r) · table(r) dr` over the table's own nodes.
    pub fn integrate_with<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let parts: Vec<f64> = self
            .grid
            .nodes()
            .zip(&self.values)
            .map(|(nd, v)| nd.w * f(nd.r, nd.d) * v)
            .collect();
        crate::quad::sum_ascending(&parts)
    }

    /// Table of `F*(r) = ∫_r^1 s F(s) log(s/r) ds` for this table's `F`.
    pub(crate) fn star_of(&self) -> RadialTable {
        use rayon::prelude::*;
        let grid = self.grid.clone();
        let rule = grid.rule();
        let order = grid.order;
        let nodes: Vec<RadialNode> = grid.nodes().collect();
        let panel_of: Vec<usize> = (0..nodes.len()).map(|i| i / order).collect();
        // mass of the tabulated function below the deepest layer, as a power law
        let dm = grid.d_min();
        let tail = {
            let f = self.eval_d(dm);
            let g = self.eval_d(2.0 * dm);
            if f > 0.0 && g > 0.0 {
                let e = (g / f).log2();
                if e > -1.0 { f * dm / (e + 1.0) } else { f * dm }
            } else {
                0.0
            }
        };
        let values: Vec<f64> = nodes
            .par_iter()
            .enumerate()
            .map(|(i, nd)| {
                let pi = panel_of[i];
                let r = nd.r;
                let dr = nd.d;
                let kernel = |s: f64, ds: f64| s * ((dr - ds) / r).ln_1p();
                let mut parts = Vec::new();
                // partial panel from r to the panel's outer edge
                let p = grid.panels[pi];
                let part: f64 = if p.in_d {
                    rule.mapped(p.lo, dr)
                        .map(|(x, w)| w * kernel(1.0 - x, x) * self.eval_d(x))
                        .sum()
                } else {
                    rule.mapped(r, p.hi)
                        .map(|(x, w)| w * kernel(x, 1.0 - x) * self.eval_d(1.0 - x))
                        .sum()
                };
                parts.push(part);
                for (j, q) in nodes.iter().enumerate().skip((pi + 1) * order) {
                    parts.push(q.w * kernel(q.r, q.d) * self.values[j]);
                }
                parts.push(kernel(1.0 - dm, dm) * tail);
                crate::quad::sum_ascending(&parts)
            })
            .collect();
        RadialTable::new(grid, values)
    }
}
