//! Truncated matrices of generalized Volterra and Toeplitz operators in the
//! orthonormal monomial basis, their singular values and growth scans.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{self, GrowthVerdict};
use crate::error::{param, LabError, Result};
use crate::geometry::{pseudo_c, BergmanDisk, DiskPoint};
use crate::quad::{gauss_legendre, integrate_arc, sum_ascending};
use crate::series::{apply_tgnk, derivative, AnalyticFn};
use crate::weights::{RadialTable, Weight};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
/// Sweep cap for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 80;

/// Function space carrying the orthonormal monomial basis.
#[derive(Debug, Clone)]
pub enum Space {
    Bergman(Weight),
    Hardy,
}

impl Space {
    /// `‖z^j‖²`.
    pub fn basis_norm_sq(&self, j: usize) -> f64 {
        match self {
            Space::Bergman(w) => w.basis_norm_sq(j),
            Space::Hardy => 1.0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Space::Bergman(w) => format!("bergman({})", w.label()),
            Space::Hardy => "hardy".into(),
        }
    }
}

/// Radial profiles `ρ(|w|)` used as densities against `dA`.
#[derive(Debug, Clone)]
pub enum Radial {
    /// `(1 - |w|)^e`, `e > -1`.
    Gap { exponent: f64 },
    /// The weight itself.
    Weight(Weight),
    /// `ω^{*n}`.
    Star { weight: Weight, n: usize },
    /// `τ_1 = log(1/|w|)`, `τ_{m+1} = τ_m^*`.
    LogStar { n: usize },
    /// `(1 - |w|)^β ω(S_w)` with `S_w` the Carleson square at `w`.
    SquareWeight { weight: Weight, beta: f64 },
}

pub(crate) fn log_star_table(n: usize) -> Result<Arc<RadialTable>> {
    static TABLES: [OnceLock<Arc<RadialTable>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if !(1..=3).contains(&n) {
        return Err(LabError::Unsupported(format!("iterated star of order {n} (only 1..=3)")));
    }
    if let Some(t) = TABLES[n - 1].get() {
        return Ok(t.clone());
    }
    let t = if n == 1 {
        Arc::new(RadialTable::from_fn(|_, d| -(-d).ln_1p()))
    } else {
        Arc::new(log_star_table(n - 1)?.star_of())
    };
    Ok(TABLES[n - 1].get_or_init(|| t).clone())
}

impl Radial {
    pub fn label(&self) -> String {
        match self {
            Radial::Gap { exponent } => format!("(1-|w|)^{exponent}"),
            Radial::Weight(w) => w.label(),
            Radial::Star { weight, n } => format!("star{n}[{}]", weight.label()),
            Radial::LogStar { n } => format!("logstar{n}"),
            Radial::SquareWeight { weight, beta } => format!("(1-|w|)^{beta}*square[{}]", weight.label()),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Radial::Gap { exponent } if !(*exponent > -1.0) => {
                param(format!("density (1-|w|)^{exponent} is not integrable near the boundary"))
            }
            Radial::Star { n, .. } | Radial::LogStar { n } if !(1..=3).contains(n) => {
                Err(LabError::Unsupported(format!("iterated star of order {n} (only 1..=3)")))
            }
            Radial::SquareWeight { beta, .. } if !beta.is_finite() => param("symbol-density needs a finite beta"),
            _ => Ok(()),
        }
    }

    fn table(&self) -> Result<Option<Arc<RadialTable>>> {
        Ok(match self {
            Radial::Star { weight, n } => Some(weight.star_table(*n)?),
            Radial::LogStar { n } => Some(log_star_table(*n)?),
            Radial::SquareWeight { weight, beta } => {
                let w = weight.clone();
                let b = *beta;
                Some(Arc::new(RadialTable::from_fn(move |r, d| {
                    d.powf(b + 1.0) / PI * w.integrate_against(r, |s, _| s)
                })))
            }
            _ => None,
        })
    }

    /// Density at distance `d = 1 - |w|` from the boundary.
    pub fn density_d(&self, d: f64) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            Radial::Gap { exponent } => d.powf(*exponent),
            Radial::Weight(w) => w.density(d),
            Radial::SquareWeight { weight, beta } => {
                d.powf(beta + 1.0) / PI * weight.integrate_against(1.0 - d, |s, _| s)
            }
            _ => self.table()?.map(|t| t.eval_d(d)).unwrap_or(0.0),
        })
    }

    /// `R_s = 2∫_0^1 r^{2s+1} ρ(r) dr = ∫ |w|^{2s} ρ dA` for `s = 0..count`.
    pub fn moments(&self, count: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let out: Vec<f64> = match self {
            Radial::Gap { exponent } => {
                // 2 (2s+1)! Γ(e+1) / Γ(2s+e+3)
                let e = *exponent;
                let mut acc = 1.0 / (e + 1.0);
                let mut v = Vec::with_capacity(count);
                let mut m = 0usize;
                for s in 0..count {
                    while m < 2 * s + 1 {
                        m += 1;
                        acc *= m as f64 / (e + 1.0 + m as f64);
                    }
                    v.push(2.0 * acc);
                }
                v
            }
            Radial::Weight(w) => (0..count).map(|s| w.basis_norm_sq(s)).collect(),
            _ => {
                let table = self.table()?.expect("tabulated profile");
                (0..count)
                    .into_par_iter()
                    .map(|s| 2.0 * table.integrate_with(|_, d| ((2 * s + 1) as f64 * (-d).ln_1p()).exp()))
                    .collect()
            }
        };
        if let Some(s) = out.iter().position(|v| !v.is_finite()) {
            return Err(LabError::Numerical(format!("radial moment of order {s} of {} diverges", self.label())));
        }
        Ok(out)
    }
}

/// Positive Borel measures on the disk.
#[derive(Debug, Clone)]
pub enum MeasureSpec {
    Atoms(Vec<(DiskPoint, f64)>),
    Radial(Radial),
    /// `scale · |h(w)|² ρ(|w|) dA(w)`.
    Modulated { h: AnalyticFn, radial: Radial, scale: f64, label: String },
}

const MEASURE_KEYS: [&str; 9] = ["g", "n", "k", "beta", "e", "re", "im", "mass", "space"];

/// Splits `key=value` pairs whose values may themselves contain commas, as in
/// `g=poly:0,1,n=1`: a piece whose key is not a measure key continues the
/// previous value.
fn measure_fields(rest: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for piece in rest.split(',').filter(|p| !p.trim().is_empty()) {
        match piece.split_once('=') {
            Some((k, v)) if MEASURE_KEYS.contains(&k.trim()) => out.push((k.trim().into(), v.trim().into())),
            _ => match out.last_mut() {
                Some(last) => {
                    last.1.push(',');
                    last.1.push_str(piece.trim());
                }
                None => return Err(LabError::Parse(format!("measure field `{piece}` has no key"))),
            },
        }
    }
    Ok(out)
}

impl MeasureSpec {
    /// Parses `atom:re=<x>,im=<y>,mass=<m>` (several separated by `;`),
    /// `star:g=<symbol>,n=<int>,k=<int>`, `hardy-star:g=..,n=..,k=..`,
    /// `symbol:g=..,n=..,k=..,beta=<real>`, `gap:e=<real>` and `weight`.
    pub fn parse(text: &str, w: &Weight, truncation: usize) -> Result<Self> {
        let text = text.trim();
        let (head, rest) = text.split_once(':').unwrap_or((text, ""));
        let bad = |why: String| LabError::Parse(format!("measure `{text}`: {why}"));
        if head == "atom" {
            let mut atoms = Vec::new();
            for one in rest.split(';') {
                let f = measure_fields(one)?;
                let get = |key: &str, dflt: Option<f64>| -> Result<f64> {
                    match f.iter().find(|(k, _)| k == key) {
                        Some((_, v)) => v.parse().map_err(|_| bad(format!("{key} = `{v}` is not a number"))),
                        None => dflt.ok_or_else(|| bad(format!("missing {key}"))),
                    }
                };
                atoms.push((DiskPoint::new(get("re", Some(0.0))?, get("im", Some(0.0))?)?, get("mass", Some(1.0))?));
            }
            return MeasureSpec::atoms(atoms);
        }
        let f = measure_fields(rest)?;
        let field = |key: &str| f.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let real = |key: &str| -> Result<f64> {
            let v = field(key).ok_or_else(|| bad(format!("missing {key}")))?;
            v.parse().map_err(|_| bad(format!("{key} = `{v}` is not a number")))
        };
        let int = |key: &str| -> Result<usize> {
            let v = field(key).ok_or_else(|| bad(format!("missing {key}")))?;
            v.parse().map_err(|_| bad(format!("{key} = `{v}` is not a non-negative integer")))
        };
        let symbol = || -> Result<AnalyticFn> {
            let g = field("g").ok_or_else(|| bad("missing g".into()))?;
            crate::series::SymbolSpec::parse(g)?.build(truncation)
        };
        match head {
            "star" => MeasureSpec::star_density(&symbol()?, w, int("n")?, int("k")?),
            "hardy-star" => MeasureSpec::hardy_star_density(&symbol()?, int("n")?, int("k")?),
            "symbol" => MeasureSpec::symbol_density(&symbol()?, w, int("n")?, int("k")?, real("beta")?),
            "gap" => {
                let r = Radial::Gap { exponent: real("e")? };
                r.validate()?;
                Ok(MeasureSpec::Radial(r))
            }
            "weight" => Ok(MeasureSpec::Radial(Radial::Weight(w.clone()))),
            other => Err(bad(format!("unknown measure family `{other}`"))),
        }
    }
    pub fn atoms(atoms: Vec<(DiskPoint, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(LabError::Empty("atomic measure without atoms".into()));
        }
        if let Some((_, m)) = atoms.iter().find(|(_, m)| !(*m > 0.0 && m.is_finite())) {
            return param(format!("atom masses must be positive and finite, got {m}"));
        }
        Ok(MeasureSpec::Atoms(atoms))
    }

    /// `|g^{(n-k)}|² (1-|w|)^β ω(S_w) dA`.
    pub fn symbol_density(g: &AnalyticFn, w: &Weight, n: usize, k: usize, beta: f64) -> Result<Self> {
        check_nk(n, k)?;
        Ok(MeasureSpec::Modulated {
            h: derivative(g, n - k)?,
            radial: Radial::SquareWeight { weight: w.clone(), beta },
            scale: 1.0,
            label: format!("symbol-density(n={n},k={k},beta={beta})"),
        })
    }

    /// `4^n |g^{(n-k)}|² ω^{*n} dA`, the measure of `(T_g^{n,k})^* T_g^{n,k}`.
    pub fn star_density(g: &AnalyticFn, w: &Weight, n: usize, k: usize) -> Result<Self> {
        check_nk(n, k)?;
        Ok(MeasureSpec::Modulated {
            h: derivative(g, n - k)?,
            radial: Radial::Star { weight: w.clone(), n },
            scale: 4f64.powi(n as i32),
            label: format!("star-density(n={n},k={k},{})", w.label()),
        })
    }

    /// Hardy analogue: `2^{2n-1} |g^{(n-k)}|² τ_n dA`.
    pub fn hardy_star_density(g: &AnalyticFn, n: usize, k: usize) -> Result<Self> {
        check_nk(n, k)?;
        Ok(MeasureSpec::Modulated {
            h: derivative(g, n - k)?,
            radial: Radial::LogStar { n },
            scale: 2f64.powi(2 * n as i32 - 1),
            label: format!("hardy-star-density(n={n},k={k})"),
        })
    }

    pub fn label(&self) -> String {
        match self {
            MeasureSpec::Atoms(a) => format!("atoms({})", a.len()),
            MeasureSpec::Radial(r) => format!("radial[{}]", r.label()),
            MeasureSpec::Modulated { label, .. } => label.clone(),
        }
    }

    /// True when the measure is invariant under rotations.
    pub fn is_radial(&self) -> bool {
        match self {
            MeasureSpec::Atoms(_) => false,
            MeasureSpec::Radial(_) => true,
            MeasureSpec::Modulated { h, .. } => {
                h.is_exact() && h.coeffs().iter().filter(|c| **c != ZERO).count() <= 1
            }
        }
    }

    /// Mixed moments `m_{a,b} = ∫ w^a w̄^b dμ` for `a, b < size`.
    fn moment_matrix(&self, size: usize) -> Result<Vec<Complex64>> {
        let mut m = vec![ZERO; size * size];
        match self {
            MeasureSpec::Atoms(atoms) => {
                m.par_chunks_mut(size).enumerate().for_each(|(a, row)| {
                    for (b, slot) in row.iter_mut().enumerate() {
                        *slot = atoms
                            .iter()
                            .map(|(p, mass)| {
                                let z = p.z();
                                z.powu(a as u32) * z.conj().powu(b as u32) * *mass
                            })
                            .sum();
                    }
                });
            }
            MeasureSpec::Radial(r) => {
                for (s, v) in r.moments(size)?.into_iter().enumerate() {
                    m[s * size + s] = Complex64::new(v, 0.0);
                }
            }
            MeasureSpec::Modulated { h, radial, scale, .. } => {
                let hc: Vec<Complex64> = h.coeffs().to_vec();
                let len = hc.len();
                let rm = radial.moments(size + len)?;
                m.par_chunks_mut(size).enumerate().for_each(|(a, row)| {
                    for (b, slot) in row.iter_mut().enumerate() {
                        // Σ_l h_l conj(h_{l'}) R_{a+l}, with a + l = b + l'
                        let mut acc = ZERO;
                        for (l, hl) in hc.iter().enumerate() {
                            if a + l < b {
                                continue;
                            }
                            let lp = a + l - b;
                            if lp >= len {
                                break;
                            }
                            acc += hl * hc[lp].conj() * rm[a + l];
                        }
                        *slot = acc * *scale;
                    }
                });
            }
        }
        Ok(m)
    }

    /// `μ(Δ(z, R))` for the Bergman-metric disk of radius `R`.
    pub fn ball_measure(&self, z: DiskPoint, radius: f64) -> Result<f64> {
        if !(radius > 0.0) {
            return param(format!("ball radius must be positive, got {radius}"));
        }
        let ball = BergmanDisk::new(z.z(), radius);
        let rho_max = radius.tanh();
        match self {
            MeasureSpec::Atoms(atoms) => Ok(atoms
                .iter()
                .filter(|(p, _)| pseudo_c(z.z(), p.z()) < rho_max)
                .map(|(_, m)| m)
                .sum()),
            MeasureSpec::Radial(r) => {
                r.validate()?;
                let table = r.table()?;
                let dens = |d: f64| match (&table, r) {
                    (Some(t), _) => t.eval_d(d),
                    (None, r) => r.density_d(d).unwrap_or(f64::NAN),
                };
                Ok(disk_integral(&ball, |t, d, phi| 2.0 * phi * dens(d) * t / PI))
            }
            MeasureSpec::Modulated { h, radial, scale, .. } => {
                radial.validate()?;
                let table = radial.table()?;
                let dens = |d: f64| match &table {
                    Some(t) => t.eval_d(d),
                    None => radial.density_d(d).unwrap_or(f64::NAN),
                };
                let sing = h.singular_directions();
                let c_arg = ball.center.arg();
                let v = disk_integral(&ball, |t, d, phi| {
                    let arc = integrate_arc(
                        |th| h.eval(Complex64::from_polar(t, th)).norm_sqr(),
                        c_arg - phi,
                        c_arg + phi,
                        &sing,
                        d.max(1e-300),
                        16,
                    );
                    arc * dens(d) * t / PI
                });
                Ok(v * scale)
            }
        }
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k >= n {
        return param(format!("needs 0 <= k < n (n = {n}, k = {k})"));
    }
    Ok(())
}

/// `∫ f(t, 1 - t, φ(t)) dt` over the radii met by a Euclidean disk, where
/// `φ(t)` is the half angle it subtends on the circle of radius `t`.
/// Substituting `t = A - B cos ψ` absorbs the square-root endpoints; the
/// outer end is graded toward the boundary.
fn disk_integral<F: Fn(f64, f64, f64) -> f64>(ball: &BergmanDisk, f: F) -> f64 {
    let c = ball.center.norm();
    let s = ball.radius;
    let rule = gauss_legendre(16);
    let mut parts = Vec::new();
    let t_hi = c + s;
    let d_hi = ball.gap;
    if s > c {
        // full circles around the origin
        let t0 = s - c;
        parts.push(rule.integrate(0.0, t0, |t| f(t, 1.0 - t, PI)));
        let (a, b) = (0.5 * (t0 + t_hi), 0.5 * (t_hi - t0));
        parts.extend(psi_parts(a, b, d_hi, t0, &f, ball));
    } else {
        let t_lo = c - s;
        let (a, b) = (0.5 * (t_lo + t_hi), 0.5 * (t_hi - t_lo));
        parts.extend(psi_parts(a, b, d_hi, t_lo, &f, ball));
    }
    sum_ascending(&parts)
}

fn psi_parts<F: Fn(f64, f64, f64) -> f64>(a: f64, b: f64, d_hi: f64, t_in: f64, f: &F, ball: &BergmanDisk) -> Vec<f64> {
    let rule = gauss_legendre(16);
    // breakpoints in ψ ∈ [0, π], graded toward π at scale √(gap / b)
    let mut pts = vec![0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI];
    let mut h = (2.0 * d_hi / b).sqrt().max(1e-160);
    while h < PI / 4.0 {
        pts.push(PI - h);
        h *= 2.0;
    }
    // the subtended angle varies on the scale of the inner radius
    {
        let mut h = (2.0 * t_in / b).sqrt().max(1e-8);
        while h < PI / 4.0 {
            pts.push(h);
            h *= 2.0;
        }
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    pts.windows(2)
        .map(|w| {
            rule.integrate(w[0], w[1], |psi| {
                let (sp, cp) = psi.sin_cos();
                let t = a - b * cp;
                // d = 1 - t, without cancellation near the outer end
                let d = d_hi + b * (1.0 + cp);
                let phi = ball.angular_half_width(t).unwrap_or(0.0);
                if phi == 0.0 {
                    return 0.0;
                }
                f(t, d, phi) * b * sp
            })
        })
        .collect()
}

/// Truncated operator matrix in the orthonormal monomial basis. Columns
/// are the images of `e_0, …, e_N`; rows run over every degree those images
/// reach when that is finite, and stop at `N` otherwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorMatrix {
    /// Row-major entries.
    pub entries: Vec<Complex64>,
    pub rows: usize,
    pub cols: usize,
    /// Degree `N` of the truncated domain.
    pub truncation: usize,
    pub space: String,
    pub provenance: String,
    /// Orthonormal-basis mass of image coefficients beyond the kept rows.
    pub dropped_mass: f64,
}

impl OperatorMatrix {
    pub fn new(entries: Vec<Complex64>, rows: usize, truncation: usize, space: String, provenance: String) -> Result<Self> {
        let cols = truncation + 1;
        if rows < cols || entries.len() != rows * cols {
            return param(format!("expected a {rows}x{cols} matrix, got {} entries", entries.len()));
        }
        if entries.iter().any(|e| !(e.re.is_finite() && e.im.is_finite())) {
            return Err(LabError::Numerical(format!("non-finite entry in {provenance}")));
        }
        Ok(OperatorMatrix {
            entries,
            rows,
            cols,
            truncation,
            space,
            provenance,
            dropped_mass: 0.0,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i < self.rows && j < self.cols {
            self.entries[i * self.cols + j]
        } else {
            ZERO
        }
    }

    /// `Mᴴ M`, row-major `cols × cols`.
    pub fn gram(&self) -> Vec<Complex64> {
        let n = self.cols;
        let mut out = vec![ZERO; n * n];
        out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = (0..self.rows).map(|r| self.get(r, i).conj() * self.get(r, j)).sum();
            }
        });
        out
    }

    /// Restriction to the first `n + 1` columns, keeping the same number of
    /// extra rows.
    pub fn principal(&self, n: usize) -> OperatorMatrix {
        let n = n.min(self.truncation);
        let cols = n + 1;
        let rows = self.rows - self.cols + cols;
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            entries.extend((0..cols).map(|j| self.get(i, j)));
        }
        let dropped = (cols..self.rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .filter(|(i, _)| *i >= rows)
            .map(|(i, j)| self.get(i, j).norm_sqr())
            .sum::<f64>();
        OperatorMatrix {
            entries,
            rows,
            cols,
            truncation: n,
            space: self.space.clone(),
            provenance: self.provenance.clone(),
            dropped_mass: (self.dropped_mass.powi(2) + dropped).sqrt(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Dense CSV: one matrix row per line, alternating real and imaginary
    /// parts.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .flat_map(|j| {
                    let e = self.get(i, j);
                    [format!("{:e}", e.re), format!("{:e}", e.im)]
                })
                .collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Binary layout: `u64` rows, `u64` columns, then row-major
    /// `(re, im)` pairs of `f64`, all little-endian.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.rows as u64).to_le_bytes())?;
        out.write_all(&(self.cols as u64).to_le_bytes())?;
        for e in &self.entries {
            out.write_all(&e.re.to_le_bytes())?;
            out.write_all(&e.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the binary layout back; returns `(rows, cols, entries)`.
    pub fn read_binary<R: Read>(mut input: R) -> Result<(usize, usize, Vec<Complex64>)> {
        let mut b8 = [0u8; 8];
        input.read_exact(&mut b8)?;
        let rows = u64::from_le_bytes(b8) as usize;
        input.read_exact(&mut b8)?;
        let cols = u64::from_le_bytes(b8) as usize;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            input.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            input.read_exact(&mut b8)?;
            entries.push(Complex64::new(re, f64::from_le_bytes(b8)));
        }
        Ok((rows, cols, entries))
    }
}

/// `T_g^{n,k}` on `A²_ω`.
pub fn assemble_volterra(g: &AnalyticFn, w: &Weight, n: usize, k: usize, big_n: usize) -> Result<OperatorMatrix> {
    assemble_volterra_in(g, &Space::Bergman(w.clone()), n, k, big_n)
}

/// `T_g^{n,k}` in the orthonormal basis of `space`.
pub fn assemble_volterra_in(g: &AnalyticFn, space: &Space, n: usize, k: usize, big_n: usize) -> Result<OperatorMatrix> {
    check_nk(n, k)?;
    if big_n < n {
        return param(format!("truncation N = {big_n} must be at least n = {n}"));
    }
    if !g.is_exact() && g.truncation() + k < big_n {
        return param(format!(
            "symbol retains {} coefficients; degree {big_n} needs at least {}",
            g.truncation() + 1,
            big_n - k + 1
        ));
    }
    let cols = big_n + 1;
    // z^j ↦ row j + l for the symbol coefficient of degree l
    let rows = match g.degree() {
        Some(d) if g.is_exact() => cols + d,
        _ => cols,
    };
    let norms: Vec<f64> = (0..rows.max(cols + g.truncation() + k + 1)).map(|j| space.basis_norm_sq(j).sqrt()).collect();
    let columns: Vec<(Vec<Complex64>, f64)> = (0..cols)
        .into_par_iter()
        .map(|j| {
            let t = apply_tgnk(g, &AnalyticFn::monomial(j), n, k)?;
            let col: Vec<Complex64> = (0..rows).map(|i| t.coeff(i) * (norms[i] / norms[j])).collect();
            let dropped: f64 = t
                .coeffs()
                .iter()
                .enumerate()
                .skip(rows)
                .map(|(i, c)| c.norm_sqr() * (norms[i] / norms[j]).powi(2))
                .sum();
            Ok((col, dropped))
        })
        .collect::<Result<_>>()?;
    let mut entries = vec![ZERO; rows * cols];
    let mut dropped = 0.0;
    for (j, (col, dm)) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            entries[i * cols + j] = v;
        }
        dropped += dm;
    }
    let mut m = OperatorMatrix::new(entries, rows, big_n, space.label(), format!("volterra(n={n},k={k})"))?;
    m.dropped_mass = dropped.sqrt();
    Ok(m)
}

/// `T_{μ,k}` on `A²_ω`.
pub fn assemble_toeplitz(mu: &MeasureSpec, w: &Weight, k: usize, big_n: usize) -> Result<OperatorMatrix> {
    assemble_toeplitz_in(mu, &Space::Bergman(w.clone()), k, big_n)
}

/// `T_{μ,k}` in the orthonormal basis of `space`.
pub fn assemble_toeplitz_in(mu: &MeasureSpec, space: &Space, k: usize, big_n: usize) -> Result<OperatorMatrix> {
    if big_n < k {
        return param(format!("truncation N = {big_n} must be at least k = {k}"));
    }
    let dim = big_n + 1;
    let size = dim - k;
    let mom = mu.moment_matrix(size)?;
    // i!/(i-k)! / ‖z^i‖
    let scale: Vec<f64> = (0..dim)
        .map(|i| {
            if i < k {
                0.0
            } else {
                ((i - k + 1)..=i).map(|x| x as f64).product::<f64>() / space.basis_norm_sq(i).sqrt()
            }
        })
        .collect();
    let mut entries = vec![ZERO; dim * dim];
    for i in k..dim {
        for j in k..dim {
            // ∫ w^{j-k} conj(w)^{i-k} dμ
            entries[i * dim + j] = mom[(j - k) * size + (i - k)] * (scale[i] * scale[j]);
        }
    }
    OperatorMatrix::new(entries, dim, big_n, space.label(), format!("toeplitz({},k={k})", mu.label()))
}

/// Singular values in descending order by one-sided Jacobi rotations.
pub fn singular_values(m: &OperatorMatrix) -> Result<Vec<f64>> {
    let cols: Vec<Vec<Complex64>> = (0..m.cols).map(|j| (0..m.rows).map(|i| m.get(i, j)).collect()).collect();
    jacobi_singular_values(cols)
}

/// Singular values of the matrix whose columns are given.
pub fn jacobi_singular_values(mut cols: Vec<Vec<Complex64>>) -> Result<Vec<f64>> {
    let n = cols.len();
    let tol = 1e-15;
    let mut norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x.norm_sqr()).sum()).collect();
    let mut converged = n < 2;
    let mut residual = 0.0f64;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        residual = 0.0;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let (left, right) = cols.split_at_mut(q);
                let (ap, aq) = (&mut left[p], &mut right[0]);
                let gamma: Complex64 = ap.iter().zip(aq.iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                let rel = g / (alpha * beta).sqrt();
                residual = residual.max(rel);
                if rel <= tol {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ph = phase.conj();
                let (mut np, mut nq) = (0.0, 0.0);
                for (x, y) in ap.iter_mut().zip(aq.iter_mut()) {
                    let yq = *y * ph;
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                    np += x.norm_sqr();
                    nq += y.norm_sqr();
                }
                norms[p] = np;
                norms[q] = nq;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LabError::Numerical(format!(
            "Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps (residual {residual:.3e})"
        )));
    }
    let mut sv: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv)
}

pub fn schatten_norm(m: &OperatorMatrix, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return param(format!("Schatten exponent must be positive, got {p}"));
    }
    Ok(schatten_from_values(&singular_values(m)?, p))
}

pub fn schatten_from_values(sv: &[f64], p: f64) -> f64 {
    let parts: Vec<f64> = sv.iter().map(|s| s.powf(p)).collect();
    sum_ascending(&parts).powf(1.0 / p)
}

/// Largest singular value.
pub fn operator_norm(m: &OperatorMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "statistic", rename_all = "kebab-case")]
pub enum Statistic {
    OperatorNorm,
    Schatten { p: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthScan {
    pub ns: Vec<usize>,
    pub statistic: Statistic,
    /// The statistic at each `N`.
    pub values: Vec<f64>,
    /// Quantity the verdict is read from: the norm itself, or `Σ λ^p` for
    /// Schatten scans.
    pub monitored: Vec<f64>,
    pub dropped_mass: Vec<f64>,
    pub verdict: GrowthVerdict,
    pub loglog_slope: Option<f64>,
    pub rule: String,
}

/// Evaluates `statistic` on the family at each truncation and classifies
/// the sequence.
pub fn growth_scan<F>(assembler: F, ns: &[usize], statistic: Statistic) -> Result<GrowthScan>
where
    F: Fn(usize) -> Result<OperatorMatrix> + Sync,
{
    if ns.len() < 3 {
        return param("growth scan needs at least three truncations");
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return param("growth scan truncations must increase");
    }
    if let Statistic::Schatten { p } = statistic {
        if !(p > 0.0) {
            return param(format!("Schatten exponent must be positive, got {p}"));
        }
    }
    let rows: Vec<(f64, f64, f64)> = ns
        .par_iter()
        .map(|&n| {
            let m = assembler(n)?;
            let sv = singular_values(&m)?;
            Ok(match statistic {
                Statistic::OperatorNorm => {
                    let v = sv.first().copied().unwrap_or(0.0);
                    (v, v, m.dropped_mass)
                }
                Statistic::Schatten { p } => {
                    let sum = sum_ascending(&sv.iter().map(|s| s.powf(p)).collect::<Vec<_>>());
                    (sum.powf(1.0 / p), sum, m.dropped_mass)
                }
            })
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let monitored: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (verdict, slope) = detect::growth_verdict(ns, &monitored);
    Ok(GrowthScan {
        ns: ns.to_vec(),
        statistic,
        values,
        monitored,
        dropped_mass: rows.iter().map(|r| r.2).collect(),
        verdict,
        loglog_slope: slope,
        rule: detect::GROWTH_RULE.into(),
    })
}

/// `ω^{*n}(r)` for `n ≤ 3`.
pub fn star_n(w: &Weight, n: usize, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(LabError::Domain(format!("star_n needs 0 < r < 1, got {r}")));
    }
    match n {
        0 => param("star_n needs n >= 1"),
        1 => w.star(r),
        2 | 3 => {
            let below = w.star_table(n - 1)?;
            // ∫_r^1 s F(s) log(s/r) ds against the tabulated lower iterate
            let d = 1.0 - r;
            let kernel = |ds: f64| (1.0 - ds) * ((d - ds) / r).ln_1p();
            let mut parts = Vec::new();
            let rule = gauss_legendre(24);
            let mut hi = d;
            while hi > 1e-15 * d.max(1e-300) && hi > 1e-300 {
                let lo = 0.5 * hi;
                parts.push(rule.integrate(lo, hi, |ds| kernel(ds) * below.eval_d(ds)));
                hi = lo;
            }
            Ok(sum_ascending(&parts))
        }
        _ => Err(LabError::Unsupported(format!("iterated star of order {n} (only 1..=3)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::carleson;

    #[test]
    fn measure_grammar() {
        let w = Weight::standard(0.0).unwrap();
        let m = MeasureSpec::parse("star:g=poly:0,1,n=1,k=0", &w, 64).unwrap();
        assert_eq!(m.label(), MeasureSpec::star_density(&AnalyticFn::monomial(1), &w, 1, 0).unwrap().label());
        let c = MeasureSpec::parse("symbol:g=carleson:a=0.5,gamma=2,n=2,k=1,beta=0.5", &w, 64).unwrap();
        assert!(matches!(c, MeasureSpec::Modulated { .. }));
        let a = MeasureSpec::parse("atom:re=0.5,im=0,mass=2;re=0,im=0.1", &w, 64).unwrap();
        assert!(matches!(a, MeasureSpec::Atoms(ref v) if v.len() == 2 && v[0].1 == 2.0));
        assert!(MeasureSpec::parse("gap:e=-0.5", &w, 64).is_ok());
        assert!(MeasureSpec::parse("gap:e=-2", &w, 64).is_err());
        assert!(MeasureSpec::parse("star:g=log,n=1", &w, 64).is_err());
        assert!(MeasureSpec::parse("blob", &w, 64).is_err());
    }

    fn std0() -> Weight {
        Weight::standard(0.0).unwrap()
    }

    #[test]
    fn volterra_weighted_shift() {
        let m = assemble_volterra(&AnalyticFn::monomial(1), &std0(), 1, 0, 20).unwrap();
        for i in 0..=20 {
            for j in 0..=20 {
                let expect = if i == j + 1 { 1.0 / (((j + 1) * (j + 2)) as f64).sqrt() } else { 0.0 };
                assert!((m.get(i, j).re - expect).abs() < 1e-12, "{i} {j}");
            }
        }
        let c = assemble_volterra(&AnalyticFn::real_polynomial(&[3.0]), &std0(), 1, 0, 10).unwrap();
        assert_eq!(c.frobenius(), 0.0);
        assert_eq!((m.rows, m.cols, m.dropped_mass), (22, 21, 0.0));
        assert!((m.get(21, 20).re - 1.0 / (21.0f64 * 22.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn volterra_second_order_by_hand() {
        // T f = I²(f'·2z): z^j ↦ 2j z^{j+2}/((j+1)(j+2)) in raw coefficients
        let w = std0();
        let m = assemble_volterra(&AnalyticFn::monomial(2), &w, 2, 1, 6).unwrap();
        for j in 0..=2usize {
            for i in 0..=6usize {
                let raw = if i == j + 2 { 2.0 * j as f64 / ((j + 1) * (j + 2)) as f64 } else { 0.0 };
                let expect = raw * ((j + 1) as f64).sqrt() / ((i + 1) as f64).sqrt();
                assert!((m.get(i, j).re - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn toeplitz_examples() {
        let w = std0();
        let atom = MeasureSpec::atoms(vec![(DiskPoint::origin(), 1.0)]).unwrap();
        let m = assemble_toeplitz(&atom, &w, 0, 8).unwrap();
        assert!((m.get(0, 0).re - 1.0).abs() < 1e-14);
        assert!(m.entries.iter().skip(1).all(|e| e.norm() == 0.0));
        let sv = singular_values(&m).unwrap();
        assert!((sv[0] - 1.0).abs() < 1e-14 && sv[1] == 0.0);
        assert!((schatten_norm(&m, 0.3).unwrap() - 1.0).abs() < 1e-14);

        let star = MeasureSpec::star_density(&AnalyticFn::monomial(1), &w, 1, 0).unwrap();
        let t = assemble_toeplitz(&star, &w, 0, 40).unwrap();
        for j in 0..=40 {
            assert!((t.get(j, j).re - 1.0 / ((j + 1) * (j + 2)) as f64).abs() < 1e-10, "{j}");
        }
    }

    #[test]
    fn atoms_give_hermitian_matrices() {
        let pts = vec![
            (DiskPoint::new(0.3, 0.4).unwrap(), 0.7),
            (DiskPoint::new(-0.8, 0.1).unwrap(), 1.3),
            (DiskPoint::new(0.05, -0.9).unwrap(), 0.2),
        ];
        let mu = MeasureSpec::atoms(pts).unwrap();
        for k in 0..3 {
            let m = assemble_toeplitz(&mu, &Weight::standard(1.5).unwrap(), k, 30).unwrap();
            for i in 0..=30 {
                for j in 0..=30 {
                    assert!((m.get(i, j) - m.get(j, i).conj()).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn adjoint_identity_small() {
        let w = std0();
        for g in [AnalyticFn::monomial(1), AnalyticFn::monomial(2)] {
            let v = assemble_volterra(&g, &w, 1, 0, 64).unwrap();
            let t = assemble_toeplitz(&MeasureSpec::star_density(&g, &w, 1, 0).unwrap(), &w, 0, 64).unwrap();
            let gram = v.gram();
            for i in 0..=64 {
                for j in 0..=64 {
                    assert!((gram[i * 65 + j] - t.get(i, j)).norm() < 1e-9, "{i} {j}");
                }
            }
        }
    }

    #[test]
    fn singular_values_of_shift() {
        let m = assemble_volterra(&AnalyticFn::monomial(1), &std0(), 1, 0, 100).unwrap();
        let sv = singular_values(&m).unwrap();
        let expect: Vec<f64> = (0..=100).map(|j| 1.0 / (((j + 1) * (j + 2)) as f64).sqrt()).collect();
        assert_eq!(sv.len(), 101);
        for (a, b) in sv.iter().zip(&expect) {
            assert!((a - b).abs() <= 1e-10 * b.max(1e-13));
        }
        let s2 = schatten_norm(&assemble_volterra(&AnalyticFn::monomial(1), &std0(), 1, 0, 512).unwrap(), 2.0).unwrap();
        assert!((s2 - (1.0f64 - 1.0 / 514.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn jacobi_handles_complex_rotations() {
        let a = Complex64::new(0.3, 0.7);
        let cols = vec![vec![Complex64::new(1.0, 0.0), a], vec![a.conj(), Complex64::new(0.0, 2.0)]];
        let sv = jacobi_singular_values(cols.clone()).unwrap();
        // invariants of the 2×2 case
        let det = (cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1]).norm();
        let fro: f64 = cols.iter().flatten().map(|x| x.norm_sqr()).sum();
        assert!((sv[0] * sv[1] - det).abs() < 1e-13);
        assert!((sv[0] * sv[0] + sv[1] * sv[1] - fro).abs() < 1e-13);
    }

    #[test]
    fn growth_scan_examples() {
        let g = AnalyticFn::monomial(1);
        let w = std0();
        let asm = |n| assemble_volterra(&g, &w, 1, 0, n);
        let s = growth_scan(asm, &[32, 64, 128], Statistic::OperatorNorm).unwrap();
        assert_eq!(s.verdict, GrowthVerdict::Saturating);
        assert!(s.values.iter().all(|v| (v - 0.5f64.sqrt()).abs() < 1e-12));
        let s1 = growth_scan(asm, &[64, 128, 256, 512], Statistic::Schatten { p: 1.0 }).unwrap();
        assert_eq!(s1.verdict, GrowthVerdict::Growing);
        assert!(growth_scan(asm, &[32, 64], Statistic::OperatorNorm).is_err());
    }

    #[test]
    fn radial_densities_are_diagonal() {
        let w = Weight::standard(0.5).unwrap();
        for r in [Radial::Gap { exponent: 0.5 }, Radial::Weight(w.clone()), Radial::Star { weight: w.clone(), n: 2 }] {
            let m = assemble_toeplitz(&MeasureSpec::Radial(r), &w, 1, 24).unwrap();
            for i in 0..=24 {
                for j in 0..=24 {
                    if i != j {
                        assert!(m.get(i, j).norm() < 1e-12);
                    }
                }
            }
        }
        assert!(Radial::Gap { exponent: -1.0 }.moments(3).is_err());
    }

    #[test]
    fn radial_moments_closed_forms() {
        // ∫ r^m ω^{*n} dr = ω_{m+2n} / Π (m+1+2i)²
        let w = Weight::standard(1.0).unwrap();
        for n in 1..=3usize {
            let r = Radial::Star { weight: w.clone(), n }.moments(12).unwrap();
            for (s, v) in r.iter().enumerate() {
                let m = 2 * s + 1;
                let denom: f64 = (0..n).map(|i| ((m + 1 + 2 * i) as f64).powi(2)).product();
                let exact = 2.0 * w.moment((m + 2 * n) as u32) / denom;
                assert!(((v - exact) / exact).abs() < 1e-9, "n={n} s={s}");
            }
        }
        let g = Radial::Gap { exponent: 1.0 }.moments(4).unwrap();
        for (s, v) in g.iter().enumerate() {
            let j = s as f64;
            assert!((v - 2.0 / ((2.0 * j + 2.0) * (2.0 * j + 3.0))).abs() < 1e-15);
        }
        let l = Radial::LogStar { n: 2 }.moments(5).unwrap();
        for (s, v) in l.iter().enumerate() {
            let m = (2 * s + 1) as f64;
            assert!(((v - 2.0 / ((m + 1.0).powi(2) * (m + 3.0).powi(2))) * (m + 3.0).powi(4)).abs() < 1e-8);
        }
    }

    #[test]
    fn ball_measure_matches_area() {
        // normalized area of the Euclidean disk Δ(a, R)
        let lebesgue = MeasureSpec::Radial(Radial::Gap { exponent: 0.0 });
        for (a, rad) in [(0.0, 0.5), (0.5, 1.0), (0.95, 2.0), (0.999, 5.0)] {
            let z = DiskPoint::new(a, 0.0).unwrap();
            let b = BergmanDisk::new(z.z(), rad);
            let v = lebesgue.ball_measure(z, rad).unwrap();
            assert!(((v - b.radius * b.radius) / (b.radius * b.radius)).abs() < 1e-9, "{a} {rad} {v}");
        }
        let atoms = MeasureSpec::atoms(vec![(DiskPoint::new(0.5, 0.0).unwrap(), 2.0)]).unwrap();
        assert_eq!(atoms.ball_measure(DiskPoint::new(0.6, 0.0).unwrap(), 1.0).unwrap(), 2.0);
        assert_eq!(atoms.ball_measure(DiskPoint::new(-0.6, 0.0).unwrap(), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn modulated_ball_measure_against_direct_quadrature() {
        let w = std0();
        let g = carleson(Complex64::new(0.4, 0.2), 2.0, 200).unwrap();
        let mu = MeasureSpec::star_density(&g, &w, 1, 0).unwrap();
        let z = DiskPoint::new(0.8, 0.3).unwrap();
        let v = mu.ball_measure(z, 0.8).unwrap();
        let b = BergmanDisk::new(z.z(), 0.8);
        let h = derivative(&g, 1).unwrap();
        // polar coordinates about the Euclidean center
        let rule = gauss_legendre(48);
        let direct = rule.integrate(0.0, b.radius, |rho| {
            rule.integrate(0.0, 2.0 * PI, |th| {
                let p = b.center + Complex64::from_polar(rho, th);
                4.0 * h.eval(p).norm_sqr() * w.star(p.norm()).unwrap() * rho / PI
            })
        });
        assert!(((v - direct) / direct).abs() < 1e-7, "{v} {direct}");
    }

    #[test]
    fn star_n_examples() {
        let w = std0();
        assert_eq!(star_n(&w, 1, 0.4).unwrap(), w.star(0.4).unwrap());
        assert!(matches!(star_n(&w, 4, 0.5), Err(LabError::Unsupported(_))));
        // α = 0: ω*(s) = (s² - 1)/4 - log(s)/2; second iterate by nested adaptive quadrature
        let r: f64 = 0.9;
        let inner = |s: f64| (s * s - 1.0) / 4.0 - s.ln() / 2.0;
        let direct = crate::quad::adaptive(|s| s * inner(s) * (s / r).ln(), r, 1.0, 1e-13, 1e-20);
        assert!((star_n(&w, 2, r).unwrap() - direct).abs() < 1e-7 * direct.max(1e-12));
        // ω** ~ (1-r)⁴/24 while (1-r)³ω̂ = (1-r)⁴
        for r in [0.999, 0.9999] {
            let ratio = star_n(&w, 2, r).unwrap() / ((1.0 - r).powi(3) * w.hat(r).unwrap());
            assert!((ratio * 24.0 - 1.0).abs() < 2e-3, "{ratio}");
        }
    }

    #[test]
    fn binary_roundtrip() {
        let m = assemble_volterra(&AnalyticFn::monomial(1), &std0(), 1, 0, 5).unwrap();
        let mut buf = Vec::new();
        m.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 42 * 16);
        let (r, c, e) = OperatorMatrix::read_binary(&buf[..]).unwrap();
        assert_eq!((r, c), (7, 6));
        assert_eq!(e, m.entries);
        let mut csv = Vec::new();
        m.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 7);
    }
}
