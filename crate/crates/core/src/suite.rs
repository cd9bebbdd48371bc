//! Batteries of end-to-end checks: acceptance, criterion-vs-spectral
//! agreement, and frozen regression bands.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{
    cor43_with_scan, thm32_with_scan, thm33_with_scan, thm42_with_scan, toeplitz_cross_check, volterra_cross_check, CriterionReport,
    Verdict, DEFAULT_NS,
};
use crate::detect::{linear_slope, GrowthVerdict};
use crate::error::{LabError, Result};
use crate::geometry::{make_lattice, region_contains, DiskPoint, Region};
use crate::hardy::{assemble_hardy_volterra, cor52_hardy_schatten, gk_norm, hardy_norm, thm54_hardy_toeplitz, truncated_kernel_pairing};
use crate::norms::{bergman_norm, littlewood_paley_p2};
use crate::operators::{
    assemble_toeplitz, assemble_volterra, growth_scan, schatten_from_values, singular_values, star_n, MeasureSpec, Radial, Space,
    Statistic,
};
use crate::series::{log_singular, power_singular, AnalyticFn, DEFAULT_TRUNCATION};
use crate::weights::{DoublingVerdict, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Battery {
    Acceptance,
    Agreement,
    Regression,
}

impl Battery {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "acceptance" => Ok(Battery::Acceptance),
            "agreement" => Ok(Battery::Agreement),
            "regression" => Ok(Battery::Regression),
            _ => Err(LabError::Parse(format!("unknown battery '{s}' (acceptance, agreement, regression)"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Battery::Acceptance => "acceptance",
            Battery::Agreement => "agreement",
            Battery::Regression => "regression",
        }
    }
}

/// One named sub-condition of a check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Part {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub battery: Battery,
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub parts: Vec<Part>,
    pub seconds: f64,
}

impl Check {
    pub fn summary(&self) -> String {
        let detail: Vec<String> = self
            .parts
            .iter()
            .map(|p| format!("{}{}: {}", if p.passed { "" } else { "!" }, p.name, p.detail))
            .collect();
        format!(
            "{} {} [{}] {} ({:.1}s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.battery.as_str(),
            self.name,
            self.seconds,
            detail.join("; ")
        )
    }

    pub fn part(&self, name: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.name == name)
    }
}

#[derive(Default)]
struct Parts(Vec<Part>);

impl Parts {
    fn add(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push(Part {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

type CheckFn = fn(&mut Parts) -> Result<()>;

fn run_one(battery: Battery, id: &str, name: &str, f: CheckFn, limit_s: Option<f64>) -> Check {
    let start = Instant::now();
    let mut parts = Parts::default();
    if let Err(e) = f(&mut parts) {
        parts.add("error", false, e.to_string());
    }
    let seconds = start.elapsed().as_secs_f64();
    if let Some(l) = limit_s {
        parts.add("runtime", seconds < l, format!("{seconds:.1}s < {l}s"));
    }
    Check {
        battery,
        id: id.into(),
        name: name.into(),
        passed: parts.0.iter().all(|p| p.passed),
        parts: parts.0,
        seconds,
    }
}

/// Identifiers of the acceptance checks, in order.
pub const ACCEPTANCE_IDS: [&str; 10] = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "10"];

const ACCEPTANCE: [(&str, &str, CheckFn, Option<f64>); 9] = [
    ("1", "Littlewood-Paley exactness", acc_littlewood_paley, Some(10.0)),
    ("2", "Volterra closed-form spectrum", acc_volterra_spectrum, Some(60.0)),
    ("3", "adjoint/Toeplitz identity", acc_adjoint_identity, None),
    ("4", "kernel-moment transform", acc_upsilon, None),
    ("5", "Schatten threshold agreement", acc_schatten_threshold, None),
    ("6", "downward boundedness threshold", acc_downward, None),
    ("7", "geometry invariants", acc_geometry, None),
    ("8", "doubling diagnostic", acc_doubling, None),
    ("9", "reproducing property", acc_reproducing, None),
];

/// Full-suite runtime budget in seconds.
pub const SUITE_BUDGET_S: f64 = 900.0;

/// Runs one acceptance check by id.
pub fn acceptance_check(id: &str) -> Result<Check> {
    if id == "10" {
        return Ok(acceptance_agreement(&run_agreement(), 0.0));
    }
    ACCEPTANCE
        .iter()
        .find(|c| c.0 == id)
        .map(|c| run_one(Battery::Acceptance, c.0, c.1, c.2, c.3))
        .ok_or_else(|| LabError::Parse(format!("unknown acceptance check '{id}'")))
}

fn acceptance_agreement(rows: &[Check], extra_s: f64) -> Check {
    let secs: f64 = rows.iter().map(|c| c.seconds).sum::<f64>() + extra_s;
    let ok = rows.iter().filter(|c| c.passed).count();
    let failed: Vec<&str> = rows.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
    let mut parts = Parts::default();
    parts.add("pairs", rows.len() >= 12, format!("{} pairs >= 12", rows.len()));
    parts.add(
        "agree",
        failed.is_empty(),
        if failed.is_empty() { format!("{ok}/{} agree", rows.len()) } else { format!("disagree: {}", failed.join(",")) },
    );
    parts.add("runtime", secs < SUITE_BUDGET_S, format!("suite {secs:.1}s < {SUITE_BUDGET_S}s"));
    Check {
        battery: Battery::Acceptance,
        id: "10".into(),
        name: "agreement suite".into(),
        passed: parts.0.iter().all(|p| p.passed),
        parts: parts.0,
        seconds: secs,
    }
}

pub fn run(battery: Battery) -> Vec<Check> {
    match battery {
        Battery::Acceptance => {
            let mut out: Vec<Check> = ACCEPTANCE.iter().map(|c| run_one(Battery::Acceptance, c.0, c.1, c.2, c.3)).collect();
            let before: f64 = out.iter().map(|c| c.seconds).sum();
            out.push(acceptance_agreement(&run_agreement(), before));
            out
        }
        Battery::Agreement => run_agreement(),
        Battery::Regression => REGRESSION.iter().map(|c| run_one(Battery::Regression, c.0, c.1, c.2, None)).collect(),
    }
}

pub fn write_csv<W: Write>(checks: &[Check], mut out: W) -> Result<()> {
    writeln!(out, "battery,id,name,passed,seconds,detail")?;
    for c in checks {
        let detail: Vec<String> = c.parts.iter().map(|p| format!("{}={}:{}", p.name, p.passed, p.detail)).collect();
        writeln!(
            out,
            "{},{},{},{},{:.3},{}",
            c.battery.as_str(),
            c.id,
            csv_field(&c.name),
            c.passed,
            c.seconds,
            csv_field(&detail.join("; "))
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> AnalyticFn {
    let deg = rng.random_range(0..=max_deg);
    let c: Vec<Complex64> = (0..=deg)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    AnalyticFn::polynomial(&c)
}

fn std_weight(alpha: f64) -> Result<Weight> {
    Weight::standard(alpha)
}

fn acc_littlewood_paley(parts: &mut Parts) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let polys: Vec<AnalyticFn> = (0..25).map(|_| random_poly(&mut rng, 12)).collect();
    for alpha in [0.0, 1.0, 3.0] {
        let w = std_weight(alpha)?;
        let mut worst = 0.0f64;
        for f in &polys {
            let lp = littlewood_paley_p2(f, &w)?;
            let n2 = bergman_norm(f, &w, 2.0)?.value.powi(2);
            worst = worst.max((lp - n2).abs() / n2);
        }
        parts.add(&format!("alpha={alpha}"), worst <= 1e-8, format!("max rel err {worst:.2e} <= 1e-8"));
    }
    Ok(())
}

fn acc_volterra_spectrum(parts: &mut Parts) -> Result<()> {
    let w = std_weight(0.0)?;
    let z = AnalyticFn::monomial(1);
    let mut partial = Vec::new();
    let mut err = 0.0f64;
    let mut s2 = f64::NAN;
    for n in [128usize, 256, 512] {
        let sv = singular_values(&assemble_volterra(&z, &w, 1, 0, n)?)?;
        partial.push(schatten_from_values(&sv, 1.0));
        if n == 512 {
            for (j, s) in sv.iter().enumerate() {
                err = err.max((s - 1.0 / (((j + 1) * (j + 2)) as f64).sqrt()).abs());
            }
            s2 = schatten_from_values(&sv, 2.0);
        }
    }
    parts.add("a", err <= 1e-10, format!("max |s_j - closed form| {err:.2e} <= 1e-10"));
    let want = (1.0 - 1.0 / 514.0f64).sqrt();
    parts.add("b", (s2 - want).abs() <= 1e-9, format!("Schatten-2 {s2:.12} vs {want:.12}"));
    let logs: Vec<f64> = [128.0f64, 256.0, 512.0].iter().map(|n| n.ln()).collect();
    let slope = linear_slope(&logs, &partial).unwrap_or(f64::NAN);
    let rel = (slope - 0.5).abs() / 0.5;
    parts.add("c", rel <= 0.05, format!("Schatten-1 slope in log N {slope:.4} vs 0.5 (rel err {rel:.3} <= 0.05)"));
    Ok(())
}

fn acc_adjoint_identity(parts: &mut Parts) -> Result<()> {
    let w = std_weight(0.0)?;
    for deg in [1usize, 2] {
        let g = AnalyticFn::monomial(deg);
        let m = assemble_volterra(&g, &w, 1, 0, 64)?;
        let t = assemble_toeplitz(&MeasureSpec::star_density(&g, &w, 1, 0)?, &w, 0, 64)?;
        let gram = m.gram();
        let c = m.cols;
        let mut err = 0.0f64;
        for i in 0..c {
            for j in 0..c {
                err = err.max((gram[i * c + j] - t.get(i, j)).norm());
            }
        }
        parts.add(&format!("g=z^{deg}"), err <= 1e-9, format!("max entry err {err:.2e} <= 1e-9"));
    }
    Ok(())
}

fn factorial_ratio(j: usize, k: usize) -> f64 {
    // (j-k)!/j!
    (j - k + 1..=j).map(|i| 1.0 / i as f64).product()
}

fn acc_upsilon(parts: &mut Parts) -> Result<()> {
    let radii: Vec<f64> = (0..=40).map(|i| 1.0 - 0.5 * (0.002f64).powf(i as f64 / 40.0)).collect();
    for alpha in [0.0, 1.0] {
        let w = std_weight(alpha)?;
        for k in [1usize, 2] {
            let u = w.upsilon_transform(k as u32)?;
            let mut worst = 0.0f64;
            for j in k..=k + 50 {
                let lhs = u.basis_norm_sq(j - k);
                let rhs = factorial_ratio(j, k) * w.basis_norm_sq(j);
                worst = worst.max((lhs - rhs).abs() / rhs);
            }
            let prof = u.regular_ratio_profile(&radii)?;
            parts.add(
                &format!("alpha={alpha},k={k}"),
                worst <= 1e-9 && prof.bounded,
                format!("moment rel err {worst:.1e}; ratio band [{:.3},{:.3}] bounded={}", prof.min, prof.max, prof.bounded),
            );
        }
    }
    Ok(())
}

fn acc_schatten_threshold(parts: &mut Parts) -> Result<()> {
    let w = std_weight(0.0)?;
    let z = AnalyticFn::monomial(1);
    let lat = make_lattice(1.0)?;
    let mu = MeasureSpec::star_density(&z, &w, 1, 0)?;
    let lo = thm42_with_scan(&mu, &w, 0, Some(0.4), 1.0, &lat, &DEFAULT_NS)?;
    let hi = thm42_with_scan(&mu, &w, 0, Some(0.6), 1.0, &lat, &DEFAULT_NS)?;
    flip(parts, "bergman", &lo, &hi);
    let lo = cor52_with_hardy_scan(&z, 0.9)?;
    let hi = cor52_with_hardy_scan(&z, 1.1)?;
    flip(parts, "hardy", &lo, &hi);
    // the Hardy singular values themselves
    let sv = singular_values(&assemble_hardy_volterra(&z, 1, 0, 256)?)?;
    let err = sv.iter().enumerate().map(|(j, s)| (s - 1.0 / (j + 1) as f64).abs()).fold(0.0, f64::max);
    parts.add("hardy-spectrum", err < 1e-12, format!("max |s_j - 1/(j+1)| {err:.1e}"));
    Ok(())
}

fn flip(parts: &mut Parts, name: &str, lo: &CriterionReport, hi: &CriterionReport) {
    let ok = lo.verdict == Verdict::Fails && hi.verdict == Verdict::Holds && !lo.disagrees() && !hi.disagrees();
    let g = |r: &CriterionReport| r.cross_check.as_ref().map(|c| format!("{:?}", c.growth)).unwrap_or_default();
    parts.add(
        name,
        ok,
        format!(
            "p={}: {} / spectral {}; p={}: {} / spectral {}",
            lo.params.get("p").map(|v| v.to_string()).unwrap_or_default(),
            lo.verdict.as_str(),
            g(lo),
            hi.params.get("p").map(|v| v.to_string()).unwrap_or_default(),
            hi.verdict.as_str(),
            g(hi)
        ),
    );
}

fn cor52_with_hardy_scan(g: &AnalyticFn, p: f64) -> Result<CriterionReport> {
    let mut rep = cor52_hardy_schatten(g, p, 1, 0)?;
    volterra_cross_check(&mut rep, g, &Space::Hardy, Statistic::Schatten { p }, 1, 0, &DEFAULT_NS)?;
    Ok(rep)
}

fn acc_downward(parts: &mut Parts) -> Result<()> {
    let w = std_weight(0.0)?;
    for (s, want, growth) in [(0.25, Verdict::Holds, GrowthVerdict::Saturating), (0.75, Verdict::Fails, GrowthVerdict::Growing)] {
        let g = power_singular(s, DEFAULT_TRUNCATION)?;
        let rep = thm33_with_scan(&g, &w, 4.0, 2.0, 1, 0, &DEFAULT_NS)?;
        let cc = rep.cross_check.as_ref();
        let got = cc.map(|c| c.growth);
        parts.add(
            &format!("s={s}"),
            rep.verdict == want && got == Some(growth),
            format!("verdict {} (want {}), probe scan {:?} (want {:?})", rep.verdict.as_str(), want.as_str(), got, growth),
        );
    }
    Ok(())
}

fn acc_geometry(parts: &mut Parts) -> Result<()> {
    for r in [0.5, 1.0, 2.0] {
        let lat = make_lattice(r)?;
        let sep = lat.min_separation(1500);
        let cov = lat.covering_fraction(10_000);
        parts.add(
            &format!("lattice r={r}"),
            sep >= r / 5.0 - 1e-12 && cov == 1.0,
            format!("min separation {sep:.4} >= {:.2}, covered {cov}", r / 5.0),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0usize;
    let mut inside = 0usize;
    let mut pairs = 0usize;
    for _ in 0..50 {
        let u = DiskPoint::polar(rng.random_range(0.2..0.999), rng.random_range(-PI..PI))?;
        for i in 0..10_000 {
            let z = if i % 2 == 0 {
                let t = rng.random_range(u.norm()..1.0);
                DiskPoint::polar(t, u.arg() + rng.random_range(-0.5..0.5))?
            } else {
                DiskPoint::polar(rng.random::<f64>().sqrt() * 0.999_999, rng.random_range(-PI..PI))?
            };
            pairs += 1;
            if region_contains(&Region::tent(u), z)? {
                inside += 1;
                if !region_contains(&Region::carleson_square(u), z)? {
                    violations += 1;
                }
            }
        }
    }
    parts.add(
        "tent in square",
        violations == 0 && pairs >= 500_000,
        format!("{violations} violations over {pairs} pairs ({inside} in tents)"),
    );
    Ok(())
}

fn acc_doubling(parts: &mut Parts) -> Result<()> {
    for alpha in [0.0, 1.0, 2.0] {
        let prof = std_weight(alpha)?.doubling_profile(12)?;
        let last = *prof.ratios.last().unwrap_or(&f64::NAN);
        let want = 2f64.powf(alpha + 1.0);
        let rel = (last - want).abs() / want;
        parts.add(&format!("alpha={alpha}"), rel <= 0.01, format!("ratio {last:.5} vs {want} (rel {rel:.1e})"));
    }
    let e = Weight::exponential(1.0)?.doubling_profile(12)?;
    parts.add("exp c=1", e.verdict == DoublingVerdict::NonDoubling, format!("{:?}", e.verdict));
    Ok(())
}

fn acc_reproducing(parts: &mut Parts) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let spaces = [Space::Bergman(std_weight(0.0)?), Space::Bergman(std_weight(1.0)?), Space::Hardy];
    for space in &spaces {
        let mut worst = 0.0f64;
        for t in 0..4 {
            let deg = if t == 0 { 64 } else { rng.random_range(1..=64) };
            let c: Vec<Complex64> = (0..=deg)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let f = AnalyticFn::polynomial(&c);
            for _ in 0..3 {
                let z = Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(-PI..PI));
                let v = truncated_kernel_pairing(&f, space, z, 64)?;
                worst = worst.max((v - f.eval_series(z)).norm());
            }
        }
        parts.add(&space.label(), worst <= 1e-10, format!("max |<f,K_z> - f(z)| {worst:.1e} <= 1e-10"));
    }
    Ok(())
}

// ---------------------------------------------------------------- agreement

type PairFn = fn() -> Result<CriterionReport>;

const AGREEMENT: [(&str, &str, PairFn); 19] = [
    ("cor43-z-p2", "Volterra g=z in S_2", || cor43_with_scan(&AnalyticFn::monomial(1), &w0(), 2.0, 1, 0, &[64, 128, 256])),
    ("cor43-z-p1", "Volterra g=z not in S_1", || cor43_with_scan(&AnalyticFn::monomial(1), &w0(), 1.0, 1, 0, &[128, 256, 512])),
    ("cor43-z2-n2-p0.75", "g=z^2, n=2 in S_0.75", || cor43_with_scan(&AnalyticFn::monomial(2), &w0(), 0.75, 2, 0, &DEFAULT_NS)),
    ("cor43-z2-n2-p0.4", "g=z^2, n=2 not in S_0.4", || cor43_with_scan(&AnalyticFn::monomial(2), &w0(), 0.4, 2, 0, &DEFAULT_NS)),
    ("cor52-z-p1.1", "Hardy Volterra g=z in S_1.1", || cor52_with_hardy_scan(&AnalyticFn::monomial(1), 1.1)),
    ("cor52-z-p0.9", "Hardy Volterra g=z not in S_0.9", || cor52_with_hardy_scan(&AnalyticFn::monomial(1), 0.9)),
    ("thm42-star-p0.6", "star density in S_0.6", || star_pair(0.6)),
    ("thm42-star-p0.4", "star density not in S_0.4", || star_pair(0.4)),
    ("thm42-atom", "atom at the origin", atom_pair),
    ("thm54-gap1-p1.5", "Hardy (1-|w|) in S_1.5", || gap_pair(1.0, 1.5)),
    ("thm54-gap1-p0.4", "Hardy (1-|w|) not in S_0.4", || gap_pair(1.0, 0.4)),
    ("thm54-gaph-p2.5", "Hardy (1-|w|)^-1/2 in S_2.5", || gap_pair(-0.5, 2.5)),
    ("thm54-gaph-p1.5", "Hardy (1-|w|)^-1/2 not in S_1.5", || gap_pair(-0.5, 1.5)),
    ("thm32-log-n2k1", "log symbol, n=2, k=1 bounded", || thm32_with_scan(&log_singular(DEFAULT_TRUNCATION), &w0(), 2.0, 2, 1, &DEFAULT_NS)),
    ("thm32-z5", "z^5 bounded", || thm32_with_scan(&AnalyticFn::monomial(5), &w0(), 2.0, 1, 0, &DEFAULT_NS)),
    ("thm32-log-k0", "log symbol, k=0 bounded", || thm32_with_scan(&log_singular(DEFAULT_TRUNCATION), &w0(), 2.0, 1, 0, &DEFAULT_NS)),
    ("thm32-pow0.5", "(1-z)^-1/2 unbounded", || {
        thm32_with_scan(&power_singular(0.5, DEFAULT_TRUNCATION)?, &w0(), 2.0, 1, 0, &DEFAULT_NS)
    }),
    ("thm33-s0.25", "pow s=0.25 compact A^4 -> A^2", || thm33_pair(0.25)),
    ("thm33-s0.75", "pow s=0.75 not bounded A^4 -> A^2", || thm33_pair(0.75)),
];

fn w0() -> Weight {
    Weight::standard(0.0).expect("standard weight")
}

fn star_pair(p: f64) -> Result<CriterionReport> {
    let w = w0();
    let mu = MeasureSpec::star_density(&AnalyticFn::monomial(1), &w, 1, 0)?;
    thm42_with_scan(&mu, &w, 0, Some(p), 1.0, &make_lattice(1.0)?, &DEFAULT_NS)
}

fn atom_pair() -> Result<CriterionReport> {
    let w = w0();
    let mu = MeasureSpec::atoms(vec![(DiskPoint::origin(), 1.0)])?;
    thm42_with_scan(&mu, &w, 0, Some(0.3), 1.0, &make_lattice(1.0)?, &DEFAULT_NS)
}

fn gap_pair(exponent: f64, p: f64) -> Result<CriterionReport> {
    let mu = MeasureSpec::Radial(Radial::Gap { exponent });
    let mut rep = thm54_hardy_toeplitz(&mu, 0, Some(p), 1.0, &make_lattice(1.0)?)?;
    toeplitz_cross_check(&mut rep, &mu, &Space::Hardy, 0, Some(p), &DEFAULT_NS)?;
    Ok(rep)
}

fn thm33_pair(s: f64) -> Result<CriterionReport> {
    thm33_with_scan(&power_singular(s, DEFAULT_TRUNCATION)?, &w0(), 4.0, 2.0, 1, 0, &DEFAULT_NS)
}

/// Each curated pair passes when the criterion verdict is decisive and the
/// spectral surrogate implies the same verdict.
pub fn run_agreement() -> Vec<Check> {
    AGREEMENT
        .iter()
        .map(|(id, name, f)| {
            let start = Instant::now();
            let mut parts = Parts::default();
            match f() {
                Ok(rep) => match &rep.cross_check {
                    Some(cc) => parts.add(
                        "agree",
                        cc.agrees && rep.verdict != Verdict::Inconclusive,
                        format!("criterion {} / {} {:?} implies {}", rep.verdict.as_str(), cc.method, cc.growth, cc.implied.as_str()),
                    ),
                    None => parts.add("agree", false, "no spectral cross-check"),
                },
                Err(e) => parts.add("error", false, e.to_string()),
            }
            Check {
                battery: Battery::Agreement,
                id: (*id).into(),
                name: (*name).into(),
                passed: parts.0.iter().all(|p| p.passed),
                parts: parts.0,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

// --------------------------------------------------------------- regression

const REGRESSION: [(&str, &str, CheckFn); 6] = [
    ("gk-band", "G_k to Hardy norm ratio band", reg_gk_band),
    ("star2-limit", "second iterated star asymptotic", reg_star2),
    ("hardy-norms", "Hardy norms of model symbols", reg_hardy_norms),
    ("lattice-size", "lattice ring layout", reg_lattice),
    ("thm31-exponents", "boundedness profile exponents", reg_thm31),
    ("spectral-sums", "Schatten sums of the Volterra shift", reg_spectral),
];

fn reg_gk_band(parts: &mut Parts) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..20 {
        let mut c: Vec<Complex64> = (0..=rng.random_range(3..12))
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        for k in [1usize, 2] {
            c.iter_mut().take(k).for_each(|x| *x = Complex64::new(0.0, 0.0));
            let f = AnalyticFn::polynomial(&c);
            for p in [1.0, 2.0, 4.0] {
                let r = gk_norm(&f, p, k)?.powf(p) / hardy_norm(&f, p)?.value.powf(p);
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    parts.add("band", lo >= 0.05 && hi <= 20.0, format!("ratios in [{lo:.4}, {hi:.4}] within [0.05, 20]"));
    Ok(())
}

fn reg_star2(parts: &mut Parts) -> Result<()> {
    let w = w0();
    for r in [0.999, 0.9999] {
        let d: f64 = 1.0 - r;
        let ratio = star_n(&w, 2, r)? / (d.powi(3) * w.hat(r)?);
        parts.add(&format!("r={r}"), (ratio * 24.0 - 1.0).abs() < 2e-3, format!("24 x ratio = {:.5}", ratio * 24.0));
    }
    Ok(())
}

fn reg_hardy_norms(parts: &mut Parts) -> Result<()> {
    let a = hardy_norm(&AnalyticFn::real_polynomial(&[1.0, 1.0]), 2.0)?.value;
    parts.add("1+z", (a - 2f64.sqrt()).abs() < 1e-15, format!("{a}"));
    let b = hardy_norm(&AnalyticFn::monomial(3), 3.0)?.value;
    parts.add("z^3 p=3", (b - 1.0).abs() < 1e-12, format!("{b}"));
    let c = hardy_norm(&power_singular(0.4, 4000)?, 2.0)?;
    // partial sum over 4001 coefficients; the full sum is Γ(0.2)/Γ(0.6)² ≈ 1.4388²
    parts.add("pow 0.4", (c.value - 1.369910).abs() < 1e-5, format!("{:.6}", c.value));
    Ok(())
}

fn reg_lattice(parts: &mut Parts) -> Result<()> {
    let lat = make_lattice(1.0)?;
    let n = lat.rings.len();
    parts.add("rings", (35..=40).contains(&n), format!("{n} rings, step {:.3}", lat.step));
    Ok(())
}

fn reg_thm31(parts: &mut Parts) -> Result<()> {
    let w = w0();
    let rep = crate::criteria::thm31_boundedness(&power_singular(0.5, DEFAULT_TRUNCATION)?, &w, 1.0, 2.0, 1, 0)?;
    let e = rep.evidence.get("tail_exponent").and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    parts.add("pow 0.5", rep.verdict == Verdict::Fails && (e + 1.5).abs() <= 0.05, format!("{} exponent {e:.4}", rep.verdict.as_str()));
    let rep = crate::criteria::thm31_boundedness(&log_singular(DEFAULT_TRUNCATION), &w, 1.0, 2.0, 2, 1)?;
    let e = rep.evidence.get("tail_exponent").and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    parts.add("log n=2 k=1", rep.verdict == Verdict::Fails && (e + 1.0).abs() <= 0.05, format!("{} exponent {e:.4}", rep.verdict.as_str()));
    Ok(())
}

fn reg_spectral(parts: &mut Parts) -> Result<()> {
    let w = w0();
    let z = AnalyticFn::monomial(1);
    let scan = growth_scan(|n| assemble_volterra(&z, &w, 1, 0, n), &DEFAULT_NS, Statistic::Schatten { p: 1.0 })?;
    let slope = scan.loglog_slope.unwrap_or(f64::NAN);
    parts.add("S_1 growing", scan.verdict == GrowthVerdict::Growing, format!("{:?}, slope {slope:.3}", scan.verdict));
    let scan = growth_scan(|n| assemble_volterra(&z, &w, 1, 0, n), &DEFAULT_NS, Statistic::Schatten { p: 2.0 })?;
    parts.add("S_2 saturating", scan.verdict == GrowthVerdict::Saturating, format!("{:?}", scan.verdict));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_names_roundtrip() {
        for b in [Battery::Acceptance, Battery::Agreement, Battery::Regression] {
            assert_eq!(Battery::parse(b.as_str()).unwrap(), b);
        }
        assert!(Battery::parse("nope").is_err());
        assert!(AGREEMENT.len() >= 12);
    }

    #[test]
    fn csv_quotes_fields() {
        let c = Check {
            battery: Battery::Regression,
            id: "x".into(),
            name: "a, b".into(),
            passed: true,
            parts: vec![],
            seconds: 0.0,
        };
        let mut out = Vec::new();
        write_csv(&[c], &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.lines().nth(1).unwrap().contains("\"a, b\""));
    }
}
