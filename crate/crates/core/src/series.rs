//! Analytic functions on the disk as truncated Taylor series, with the
//! calculus needed for generalized Volterra operators
//! `T_g^{n,k} f = I^n(f^{(k)} g^{(n-k)})`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, LabError, Result};

/// Default number of retained coefficients minus one.
pub const DEFAULT_TRUNCATION: usize = 512;

/// What is known about the coefficients beyond the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Tail {
    /// All neglected coefficients vanish.
    Exact,
    /// `|f̂_j| ≤ bound · ratio^j` for every neglected `j`.
    Geometric { ratio: f64, bound: f64 },
    Unknown,
}

/// Singular families with closed-form values for all derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// `log(1/(1 - z))`
    LogSingular,
    /// `(1 - z)^{-s}`
    PowerSingular { s: f64 },
    /// `((1 - |a|)/(1 - āz))^γ`
    Carleson { a: (f64, f64), gamma: f64 },
}

/// `family^{(order)}(e^{iθ} z)` scaled by `scale`: the derivative of order
/// `order` of `scale' · F(e^{iθ} z)` where the chain-rule factor is folded
/// into `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub family: Family,
    pub order: u32,
    pub rotation: f64,
    pub scale: (f64, f64),
}

impl ClosedForm {
    fn new(family: Family) -> Self {
        ClosedForm {
            family,
            order: 0,
            rotation: 0.0,
            scale: (1.0, 0.0),
        }
    }

    fn scale_c(&self) -> Complex64 {
        Complex64::new(self.scale.0, self.scale.1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = z * Complex64::from_polar(1.0, self.rotation);
        let m = self.order;
        let v = match self.family {
            Family::LogSingular => {
                if m == 0 {
                    -(Complex64::new(1.0, 0.0) - w).ln()
                } else {
                    let one_w = Complex64::new(1.0, 0.0) - w;
                    one_w.powi(-(m as i32)) * factorial(m - 1)
                }
            }
            Family::PowerSingular { s } => {
                let one_w = Complex64::new(1.0, 0.0) - w;
                one_w.powf(-s - m as f64) * pochhammer(s, m)
            }
            Family::Carleson { a, gamma } => {
                let a = Complex64::new(a.0, a.1);
                let ab = a.conj();
                let one = Complex64::new(1.0, 0.0) - ab * w;
                let c = (1.0 - a.norm()).powf(gamma) * pochhammer(gamma, m);
                ab.powu(m) * one.powf(-gamma - m as f64) * c
            }
        };
        v * self.scale_c()
    }

    /// Boundary directions where the function is singular.
    pub fn singular_directions(&self) -> Vec<f64> {
        match self.family {
            Family::LogSingular | Family::PowerSingular { .. } => vec![-self.rotation],
            Family::Carleson { a, .. } => {
                if a.0 == 0.0 && a.1 == 0.0 {
                    vec![]
                } else {
                    vec![a.1.atan2(a.0) - self.rotation]
                }
            }
        }
    }

    /// Distance scale of the singularity from the unit circle.
    pub fn singular_gap(&self) -> f64 {
        match self.family {
            Family::Carleson { a, .. } => {
                let r = a.0.hypot(a.1);
                if r == 0.0 {
                    1.0
                } else {
                    (1.0 / r - 1.0).max(0.0)
                }
            }
            _ => 0.0,
        }
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Rising factorial `(x)_m`.
pub(crate) fn pochhammer(x: f64, m: u32) -> f64 {
    (0..m).map(|i| x + i as f64).product()
}

/// `(j + k)! / j!`
fn falling(j: usize, k: usize) -> f64 {
    ((j + 1)..=(j + k)).map(|i| i as f64).product()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFn {
    coeffs: Vec<Complex64>,
    tail: Tail,
    closed: Option<ClosedForm>,
}

impl AnalyticFn {
    pub fn new(coeffs: Vec<Complex64>, tail: Tail) -> Result<Self> {
        if coeffs.is_empty() {
            return param("an analytic function needs at least one coefficient");
        }
        if let Tail::Geometric { ratio, bound } = tail {
            if !(ratio > 0.0 && ratio < 1.0) || !(bound >= 0.0) {
                return param(format!("geometric tail needs 0 < q < 1 and M >= 0 (q = {ratio}, M = {bound})"));
            }
        }
        Ok(AnalyticFn {
            coeffs,
            tail,
            closed: None,
        })
    }

    /// A polynomial with the given coefficients.
    pub fn polynomial(coeffs: &[Complex64]) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            coeffs.to_vec()
        };
        AnalyticFn {
            coeffs,
            tail: Tail::Exact,
            closed: None,
        }
    }

    pub fn real_polynomial(coeffs: &[f64]) -> Self {
        let c: Vec<Complex64> = coeffs.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        Self::polynomial(&c)
    }

    /// `z^j`
    pub fn monomial(j: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); j + 1];
        c[j] = Complex64::new(1.0, 0.0);
        Self::polynomial(&c)
    }

    pub fn zero() -> Self {
        Self::polynomial(&[])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.tail == Tail::Exact
    }

    /// Highest nonzero coefficient index; `None` for the zero function.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0))
    }

    /// True when the function is known to vanish identically.
    pub fn is_zero(&self) -> bool {
        self.is_exact() && self.degree().is_none()
    }

    /// Drops the closed form, keeping only coefficients and tail.
    pub fn without_closed_form(mut self) -> Self {
        self.closed = None;
        self
    }

    /// Coefficients beyond `n` are dropped; the tail becomes unknown unless
    /// they were zero already.
    pub fn truncate(&self, n: usize) -> Self {
        if n >= self.truncation() {
            return self.clone();
        }
        let dropped_zero = self.coeffs[n + 1..].iter().all(|c| c.norm() == 0.0);
        let tail = match self.tail {
            Tail::Exact if dropped_zero => Tail::Exact,
            Tail::Geometric { ratio, bound } => {
                let extra = self.coeffs[n + 1..]
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.norm() / ratio.powi((n + 1 + i) as i32))
                    .fold(0.0, f64::max);
                Tail::Geometric {
                    ratio,
                    bound: bound.max(extra),
                }
            }
            _ => Tail::Unknown,
        };
        AnalyticFn {
            coeffs: self.coeffs[..=n].to_vec(),
            tail,
            closed: self.closed,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let tail = match self.tail {
            Tail::Geometric { ratio, bound } => Tail::Geometric {
                ratio,
                bound: bound * c.norm(),
            },
            t => t,
        };
        let closed = self.closed.map(|mut cf| {
            let s = cf.scale_c() * c;
            cf.scale = (s.re, s.im);
            cf
        });
        AnalyticFn {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            tail,
            closed,
        }
    }

    /// Coefficientwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let n = combined_truncation(self, other, self.truncation().max(other.truncation()));
        let coeffs = (0..=n).map(|j| self.coeff(j) + other.coeff(j)).collect();
        let tail = match (self.tail, other.tail) {
            (Tail::Exact, Tail::Exact) => Tail::Exact,
            _ => Tail::Unknown,
        };
        AnalyticFn {
            coeffs,
            tail,
            closed: None,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `f(e^{iθ} z)`
    pub fn rotate(&self, theta: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * Complex64::from_polar(1.0, j as f64 * theta))
            .collect();
        let closed = self.closed.map(|mut cf| {
            cf.rotation += theta;
            cf
        });
        AnalyticFn {
            coeffs,
            tail: self.tail,
            closed,
        }
    }

    /// Horner evaluation of the retained coefficients.
    pub fn eval_series(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Closed form where available, otherwise the truncated series.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.closed {
            Some(cf) => cf.eval(z),
            None => self.eval_series(z),
        }
    }

    /// Bound on the neglected part of the series at modulus `r`, if known.
    pub fn tail_bound(&self, r: f64) -> Option<f64> {
        match self.tail {
            Tail::Exact => Some(0.0),
            Tail::Geometric { ratio, bound } => {
                let q = ratio * r;
                if q >= 1.0 {
                    None
                } else {
                    Some(bound * q.powi(self.truncation() as i32 + 1) / (1.0 - q))
                }
            }
            Tail::Unknown => None,
        }
    }

    /// Boundary directions of singular behavior, if any are known.
    pub fn singular_directions(&self) -> Vec<f64> {
        self.closed.map(|c| c.singular_directions()).unwrap_or_default()
    }
}

/// Truncation honored by a combination of two series: exact inputs never
/// limit it.
fn combined_truncation(f: &AnalyticFn, g: &AnalyticFn, both_exact: usize) -> usize {
    match (f.is_exact(), g.is_exact()) {
        (true, true) => both_exact,
        (true, false) => g.truncation(),
        (false, true) => f.truncation(),
        (false, false) => f.truncation().min(g.truncation()),
    }
}

/// `f^{(k)}` with coefficient `j` equal to `(j+k)!/j! f̂_{j+k}`. For a
/// polynomial of degree below `k` the result is the zero polynomial.
pub fn derivative(f: &AnalyticFn, k: usize) -> Result<AnalyticFn> {
    if k == 0 {
        return Ok(f.clone());
    }
    let n = f.truncation();
    if k > n {
        if f.is_exact() {
            return Ok(AnalyticFn::zero());
        }
        return Err(LabError::Empty(format!(
            "derivative of order {k} exceeds the truncation {n}"
        )));
    }
    let coeffs: Vec<Complex64> = (0..=n - k).map(|j| f.coeffs[j + k] * falling(j, k)).collect();
    let tail = match f.tail {
        Tail::Exact => Tail::Exact,
        Tail::Geometric { ratio, bound } => derivative_tail(ratio, bound, k, n),
        Tail::Unknown => Tail::Unknown,
    };
    let closed = f.closed.map(|mut cf| {
        cf.order += k as u32;
        let s = cf.scale_c() * Complex64::from_polar(1.0, k as f64 * cf.rotation);
        cf.scale = (s.re, s.im);
        cf
    });
    Ok(AnalyticFn { coeffs, tail, closed })
}

/// Envelope `M' q'^j` of `(j+k)!/j! M q^{j+k}` for `j > n - k`.
fn derivative_tail(q: f64, m: f64, k: usize, n: usize) -> Tail {
    let q2 = 0.5 * (1.0 + q);
    let lr = (q2 / q).ln();
    // log of (j+k)^k (q/q2)^j peaks near j = k/ln(q2/q) - k
    let j_star = (k as f64 / lr - k as f64).max((n - k + 1) as f64).ceil() as usize;
    let lo = j_star.saturating_sub(2).max(n - k + 1);
    let peak = (lo..=j_star + 2)
        .map(|j| falling(j, k) * q.powi((j + k) as i32) / q2.powi(j as i32))
        .fold(0.0, f64::max);
    Tail::Geometric {
        ratio: q2,
        bound: m * peak,
    }
}

/// `I^n f`: coefficient `m` moves to `m + n` with factor `m!/(m+n)!`.
pub fn integrate(f: &AnalyticFn, n: usize) -> Result<AnalyticFn> {
    if n == 0 {
        return param("integration order must be at least 1");
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    coeffs.extend(f.coeffs.iter().enumerate().map(|(m, c)| c / falling(m, n)));
    let tail = match f.tail {
        Tail::Exact => Tail::Exact,
        Tail::Geometric { ratio, bound } => Tail::Geometric {
            ratio,
            bound: bound / ratio.powi(n as i32),
        },
        Tail::Unknown => Tail::Unknown,
    };
    Ok(AnalyticFn {
        coeffs,
        tail,
        closed: None,
    })
}

/// Cauchy product. The honored truncation is the smaller truncation among
/// non-polynomial inputs; polynomial factors do not limit it.
pub fn cauchy_product(f: &AnalyticFn, g: &AnalyticFn) -> AnalyticFn {
    let n = combined_truncation(f, g, f.truncation() + g.truncation());
    let zero = Complex64::new(0.0, 0.0);
    let mut coeffs = vec![zero; n + 1];
    for (i, a) in f.coeffs.iter().enumerate().take(n + 1) {
        if *a == zero {
            continue;
        }
        for (j, b) in g.coeffs.iter().enumerate().take(n + 1 - i) {
            coeffs[i + j] += a * b;
        }
    }
    let tail = if f.is_exact() && g.is_exact() {
        Tail::Exact
    } else {
        Tail::Unknown
    };
    AnalyticFn {
        coeffs,
        tail,
        closed: None,
    }
}

/// `T_g^{n,k} f = I^n(f^{(k)} g^{(n-k)})`.
pub fn apply_tgnk(g: &AnalyticFn, f: &AnalyticFn, n: usize, k: usize) -> Result<AnalyticFn> {
    if k >= n {
        return param(format!("generalized Volterra operator needs 0 <= k < n (n = {n}, k = {k})"));
    }
    let fk = derivative(f, k)?;
    let gnk = derivative(g, n - k)?;
    integrate(&cauchy_product(&fk, &gnk), n)
}

/// Symbol families nameable from configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SymbolSpec {
    Log,
    Pow { s: f64 },
    Carleson { a: f64, gamma: f64 },
    Poly { coeffs: Vec<f64> },
    Lacunary,
}

impl SymbolSpec {
    /// Parses `log`, `pow:s=<real>`, `carleson:a=<real>,gamma=<real>`,
    /// `poly:<c0,c1,...>` or `lacunary`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (head, rest) = text.split_once(':').unwrap_or((text, ""));
        let bad = |why: &str| LabError::Parse(format!("symbol `{text}`: {why}"));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(&e.to_string()));
        let keyed = |key: &str| -> Result<f64> {
            for part in rest.split(',') {
                if let Some((k, v)) = part.split_once('=') {
                    if k.trim() == key {
                        return num(v);
                    }
                }
            }
            Err(bad(&format!("missing {key}=<real>")))
        };
        match head {
            "log" => Ok(SymbolSpec::Log),
            "lacunary" => Ok(SymbolSpec::Lacunary),
            "pow" => Ok(SymbolSpec::Pow { s: keyed("s")? }),
            "carleson" => Ok(SymbolSpec::Carleson {
                a: keyed("a")?,
                gamma: keyed("gamma")?,
            }),
            "poly" => {
                let coeffs = rest.split(',').map(num).collect::<Result<Vec<f64>>>()?;
                if coeffs.is_empty() {
                    return Err(bad("no coefficients"));
                }
                Ok(SymbolSpec::Poly { coeffs })
            }
            other => Err(bad(&format!("unknown family `{other}`"))),
        }
    }

    pub fn build(&self, n: usize) -> Result<AnalyticFn> {
        match self {
            SymbolSpec::Log => Ok(log_singular(n)),
            SymbolSpec::Pow { s } => power_singular(*s, n),
            SymbolSpec::Carleson { a, gamma } => carleson(Complex64::new(*a, 0.0), *gamma, n),
            SymbolSpec::Poly { coeffs } => Ok(AnalyticFn::real_polynomial(coeffs)),
            SymbolSpec::Lacunary => Ok(lacunary(n)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SymbolSpec::Log => "log".into(),
            SymbolSpec::Pow { s } => format!("pow:s={s}"),
            SymbolSpec::Carleson { a, gamma } => format!("carleson:a={a},gamma={gamma}"),
            SymbolSpec::Poly { coeffs } => {
                let c: Vec<String> = coeffs.iter().map(|x| x.to_string()).collect();
                format!("poly:{}", c.join(","))
            }
            SymbolSpec::Lacunary => "lacunary".into(),
        }
    }
}

/// `log(1/(1 - z))`; the coefficient tail `1/j` is not geometric.
pub fn log_singular(n: usize) -> AnalyticFn {
    let mut coeffs = vec![Complex64::new(0.0, 0.0)];
    coeffs.extend((1..=n).map(|j| Complex64::new(1.0 / j as f64, 0.0)));
    AnalyticFn {
        coeffs,
        tail: Tail::Unknown,
        closed: Some(ClosedForm::new(Family::LogSingular)),
    }
}

/// `(1 - z)^{-s}` with coefficients `(s)_j / j!`.
pub fn power_singular(s: f64, n: usize) -> Result<AnalyticFn> {
    if !(s > 0.0) {
        return param(format!("power-singular symbol needs s > 0, got {s}"));
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut c = 1.0;
    for j in 0..=n {
        coeffs.push(Complex64::new(c, 0.0));
        c *= (s + j as f64) / (j as f64 + 1.0);
    }
    Ok(AnalyticFn {
        coeffs,
        tail: Tail::Unknown,
        closed: Some(ClosedForm::new(Family::PowerSingular { s })),
    })
}

/// `F_a(z) = ((1 - |a|)/(1 - āz))^γ`.
pub fn carleson(a: Complex64, gamma: f64, n: usize) -> Result<AnalyticFn> {
    let r = a.norm();
    if !(r < 1.0) {
        return param(format!("Carleson symbol needs |a| < 1, got {r}"));
    }
    if !(gamma > 0.0) {
        return param(format!("Carleson symbol needs gamma > 0, got {gamma}"));
    }
    let scale = (1.0 - r).powf(gamma);
    let ab = a.conj();
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut c = Complex64::new(scale, 0.0);
    for j in 0..=n {
        coeffs.push(c);
        c *= ab * ((gamma + j as f64) / (j as f64 + 1.0));
    }
    let tail = if r == 0.0 {
        Tail::Exact
    } else {
        // |c_{j+1}/c_j| = |a|(j+γ)/(j+1) is bounded by q for j > n
        let q = if gamma > 1.0 {
            r * (n as f64 + 1.0 + gamma) / (n as f64 + 2.0)
        } else {
            r
        };
        if q < 1.0 {
            let next = c.norm();
            Tail::Geometric {
                ratio: q,
                bound: next / q.powi(n as i32 + 1),
            }
        } else {
            Tail::Unknown
        }
    };
    let closed = ClosedForm::new(Family::Carleson { a: (a.re, a.im), gamma });
    Ok(AnalyticFn {
        coeffs,
        tail,
        closed: Some(closed),
    })
}

/// `Σ_j z^{2^j}` over `2^j ≤ n`.
pub fn lacunary(n: usize) -> AnalyticFn {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut p = 1usize;
    while p <= n {
        coeffs[p] = Complex64::new(1.0, 0.0);
        p *= 2;
    }
    AnalyticFn {
        coeffs,
        tail: Tail::Unknown,
        closed: None,
    }
}

/// Values of `f` at `r e^{2πi k/m}`, `k = 0..m`, from the retained
/// coefficients. Coefficients beyond `m` are folded onto their residues.
pub fn ring_values(f: &AnalyticFn, r: f64, m: usize) -> Vec<Complex64> {
    use rustfft::FftPlanner;
    use std::cell::RefCell;
    thread_local! {
        static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let lr = r.ln();
    for (j, c) in f.coeffs.iter().enumerate() {
        let w = if j == 0 { 1.0 } else { (j as f64 * lr).exp() };
        buf[j % m] += c * w;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(m));
    fft.process(&mut buf);
    buf
}

/// Ring size that resolves a polynomial of the given degree.
pub fn ring_size(degree: usize) -> usize {
    (4 * (degree + 1)).next_power_of_two().max(64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn close(a: &AnalyticFn, b: &[f64], tol: f64) {
        for (j, v) in b.iter().enumerate() {
            assert!((a.coeff(j) - c(*v)).norm() <= tol, "coeff {j}: {} vs {v}", a.coeff(j));
        }
        for j in b.len()..=a.truncation() {
            assert!(a.coeff(j).norm() <= tol, "coeff {j} should vanish");
        }
    }

    #[test]
    fn derivative_examples() {
        close(&derivative(&AnalyticFn::monomial(2), 1).unwrap(), &[0.0, 2.0], 0.0);
        close(&derivative(&AnalyticFn::monomial(3), 2).unwrap(), &[0.0, 6.0], 0.0);
        let mut e = Vec::new();
        let mut fact = 1.0;
        for j in 0..=20 {
            if j > 0 {
                fact *= j as f64;
            }
            e.push(c(1.0 / fact));
        }
        let f = AnalyticFn::new(e.clone(), Tail::Unknown).unwrap();
        let d = derivative(&f, 1).unwrap();
        assert_eq!(d.truncation(), 19);
        for (j, ej) in e.iter().enumerate().take(19) {
            assert!((d.coeff(j) - ej).norm() < 1e-15);
        }
        assert!(matches!(derivative(&f, 21), Err(LabError::Empty(_))));
        assert!(derivative(&AnalyticFn::monomial(1), 3).unwrap().is_zero());
    }

    #[test]
    fn integrate_examples() {
        close(&integrate(&AnalyticFn::real_polynomial(&[1.0]), 1).unwrap(), &[0.0, 1.0], 0.0);
        let v = integrate(&AnalyticFn::real_polynomial(&[0.0, 2.0]), 2).unwrap();
        close(&v, &[0.0, 0.0, 0.0, 1.0 / 3.0], 1e-16);
        let f = AnalyticFn::real_polynomial(&[1.0, -2.0, 0.5, 3.0]);
        let back = derivative(&integrate(&f, 3).unwrap(), 3).unwrap();
        for j in 0..=3 {
            assert!((back.coeff(j) - f.coeff(j)).norm() < 1e-15);
        }
    }

    #[test]
    fn product_examples() {
        let p = cauchy_product(&AnalyticFn::real_polynomial(&[1.0, 1.0]), &AnalyticFn::real_polynomial(&[1.0, -1.0]));
        close(&p, &[1.0, 0.0, -1.0], 0.0);
        let geo = power_singular(1.0, 30).unwrap();
        let p = cauchy_product(&geo, &AnalyticFn::real_polynomial(&[1.0, -1.0]));
        assert_eq!(p.truncation(), 30);
        close(&p, &[1.0], 0.0);
        assert!(cauchy_product(&geo, &AnalyticFn::zero()).coeffs().iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn volterra_examples() {
        let one = AnalyticFn::real_polynomial(&[1.0]);
        let z = AnalyticFn::monomial(1);
        close(&apply_tgnk(&z, &one, 1, 0).unwrap(), &[0.0, 1.0], 0.0);
        let z2 = AnalyticFn::monomial(2);
        close(&apply_tgnk(&z2, &z, 2, 1).unwrap(), &[0.0, 0.0, 0.0, 1.0 / 3.0], 1e-16);
        assert!(matches!(apply_tgnk(&z, &one, 2, 2), Err(LabError::Parameter(_))));
    }

    #[test]
    fn symbol_examples() {
        let f = carleson(c(0.5), 2.0, 40).unwrap();
        assert!((f.coeff(1) - c(0.25)).norm() < 1e-15);
        let l = log_singular(10);
        assert_eq!(l.coeff(0), c(0.0));
        assert!((l.coeff(7) - c(1.0 / 7.0)).norm() < 1e-16);
        let p = power_singular(1.0, 10).unwrap();
        assert!(p.coeffs().iter().all(|x| (x - c(1.0)).norm() < 1e-15));
        assert!(power_singular(0.0, 5).is_err());
        assert!(carleson(c(1.0), 1.0, 5).is_err());
        assert!(carleson(c(0.5), 0.0, 5).is_err());
    }

    #[test]
    fn closed_forms_match_series() {
        let n = 400;
        let z = Complex64::from_polar(0.9, 0.7);
        for f in [
            log_singular(n),
            power_singular(0.5, n).unwrap(),
            power_singular(2.5, n).unwrap(),
            carleson(c(0.5), 2.0, n).unwrap(),
            carleson(Complex64::from_polar(0.6, 1.0), 0.5, n).unwrap(),
        ] {
            for k in 0..3 {
                let d = derivative(&f, k).unwrap();
                let a = d.eval(z);
                let b = d.eval_series(z);
                assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "{a} {b}");
            }
            let rf = f.rotate(0.4);
            assert!((rf.eval(z) - rf.eval_series(z)).norm() < 1e-10 * rf.eval(z).norm().max(1.0));
        }
    }

    #[test]
    fn geometric_tail_bounds_hold() {
        let f = carleson(c(0.9), 3.0, 60).unwrap();
        let long = carleson(c(0.9), 3.0, 2000).unwrap();
        let check = |g: &AnalyticFn, full: &AnalyticFn| {
            if let Tail::Geometric { ratio, bound } = g.tail() {
                for j in g.truncation() + 1..=full.truncation() {
                    assert!(full.coeff(j).norm() <= bound * ratio.powi(j as i32) * (1.0 + 1e-12), "j = {j}");
                }
            } else {
                panic!("expected geometric tail");
            }
        };
        check(&f, &long);
        check(&derivative(&f, 2).unwrap(), &derivative(&long, 2).unwrap());
        check(&integrate(&f, 2).unwrap(), &integrate(&long, 2).unwrap());
    }

    #[test]
    fn recurrence_and_reduction_identities() {
        let f = AnalyticFn::real_polynomial(&[1.0, 1.0, 1.0]);
        let g = AnalyticFn::real_polynomial(&[1.0, 2.0, 0.0, 1.0]);
        let n = 3;
        let lhs = apply_tgnk(&g, &f, 1, 0).unwrap();
        let mut rhs = apply_tgnk(&g, &f, n, 0).unwrap();
        let binom = [1.0, 2.0, 1.0];
        for (k, b) in binom.iter().enumerate().take(n).skip(1) {
            rhs = rhs.add(&apply_tgnk(&g, &f, n, k).unwrap().scale(c(*b)));
        }
        // Σ_{k=1}^{n-1} (f g')^{(k-1)}(0) z^k / k!
        let fg = cauchy_product(&f, &derivative(&g, 1).unwrap());
        let mut poly = vec![c(0.0); n];
        for (k, slot) in poly.iter_mut().enumerate().skip(1) {
            *slot = fg.coeff(k - 1) / k as f64;
        }
        rhs = rhs.add(&AnalyticFn::polynomial(&poly));
        for j in 0..=lhs.truncation().max(rhs.truncation()) {
            assert!((lhs.coeff(j) - rhs.coeff(j)).norm() < 1e-14, "j = {j}");
        }
    }

    #[test]
    fn symbol_parsing() {
        assert_eq!(SymbolSpec::parse("log").unwrap(), SymbolSpec::Log);
        assert_eq!(SymbolSpec::parse("pow:s=0.5").unwrap(), SymbolSpec::Pow { s: 0.5 });
        assert_eq!(
            SymbolSpec::parse("carleson:a=0.5,gamma=2").unwrap(),
            SymbolSpec::Carleson { a: 0.5, gamma: 2.0 }
        );
        assert_eq!(
            SymbolSpec::parse("poly:0,1,2").unwrap(),
            SymbolSpec::Poly {
                coeffs: vec![0.0, 1.0, 2.0]
            }
        );
        assert!(SymbolSpec::parse("pow:t=1").is_err());
        assert!(SymbolSpec::parse("wave").is_err());
        let l = lacunary(20);
        assert_eq!(l.degree(), Some(16));
    }

    #[test]
    fn ring_values_match_horner() {
        let f = carleson(c(0.7), 2.0, 100).unwrap().without_closed_form();
        let m = ring_size(100);
        let v = ring_values(&f, 0.8, m);
        for k in [0, 17, m / 3] {
            let z = Complex64::from_polar(0.8, 2.0 * PI * k as f64 / m as f64);
            assert!((v[k] - f.eval_series(z)).norm() < 1e-12);
        }
    }
}
