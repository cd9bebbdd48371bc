//! Points, regions and lattices of the unit disk.
//!
//! Distances are pseudohyperbolic `ρ(z, w) = |z - w| / |1 - z̄w|` and the
//! Bergman (hyperbolic) distance `β = atanh ρ`. Bergman disks `Δ(a, R)` use
//! `β`; such a disk is a Euclidean disk, which [`BergmanDisk`] describes.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, LabError, Result};
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub re: f64,
    pub im: f64,
}

impl DiskPoint {
    /// A point of the open disk.
    pub fn new(re: f64, im: f64) -> Result<Self> {
        let p = DiskPoint { re, im };
        if !(p.norm_sqr() < 1.0) {
            return domain(format!("point ({re}, {im}) is not in the open unit disk"));
        }
        Ok(p)
    }

    pub fn polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn origin() -> Self {
        DiskPoint { re: 0.0, im: 0.0 }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn arg(&self) -> f64 {
        self.im.atan2(self.re)
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.z()
    }
}

/// `|z - w| / |1 - z̄w|`.
pub fn pseudohyperbolic(z: DiskPoint, w: DiskPoint) -> f64 {
    pseudo_c(z.z(), w.z())
}

pub(crate) fn pseudo_c(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    // |1 - z̄w|² = |z - w|² + (1 - |z|²)(1 - |w|²)
    let den = (num * num + (1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr())).sqrt();
    (num / den).min(1.0 - f64::EPSILON / 2.0)
}

/// `β(z, w) = ½ log((1 + ρ)/(1 - ρ))`.
pub fn bergman_distance(z: DiskPoint, w: DiskPoint) -> f64 {
    pseudohyperbolic(z, w).atanh()
}

/// Signed angular difference wrapped to `(-π, π]`.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// `S_a = {re^{iθ}: |a| < r < 1, |arg a - θ| < (1 - |a|)/2}`
    CarlesonSquare { apex: DiskPoint },
    /// `Γ_z = {re^{iθ}: |θ - arg z| < ½(1 - r/|z|)}`; the vertex may lie on
    /// the unit circle.
    Cone { vertex: (f64, f64) },
    /// `T_u = {z: u ∈ Γ_z}`
    Tent { base: DiskPoint },
    /// `{z: β(center, z) < radius}`
    BergmanDisk { center: DiskPoint, radius: f64 },
}

impl Region {
    pub fn carleson_square(apex: DiskPoint) -> Self {
        Region::CarlesonSquare { apex }
    }

    pub fn cone(vertex: Complex64) -> Self {
        Region::Cone {
            vertex: (vertex.re, vertex.im),
        }
    }

    pub fn tent(base: DiskPoint) -> Self {
        Region::Tent { base }
    }

    pub fn bergman_disk(center: DiskPoint, radius: f64) -> Self {
        Region::BergmanDisk { center, radius }
    }
}

fn in_cone(vertex: Complex64, z: Complex64) -> bool {
    let v = vertex.norm();
    let r = z.norm();
    if r == 0.0 {
        // arg 0 is undefined; the half-width at r = 0 is 1/2, so the origin
        // belongs to every cone by continuity of the closed condition
        return true;
    }
    angle_gap(z.arg(), vertex.arg()).abs() < 0.5 * (1.0 - r / v)
}

pub fn region_contains(reg: &Region, z: DiskPoint) -> Result<bool> {
    match reg {
        Region::CarlesonSquare { apex } => {
            let a = apex.norm();
            if a == 0.0 {
                return domain("Carleson square apex must be nonzero");
            }
            let r = z.norm();
            Ok(r > a && angle_gap(apex.arg(), z.arg()).abs() < 0.5 * (1.0 - a))
        }
        Region::Cone { vertex } => {
            let v = Complex64::new(vertex.0, vertex.1);
            let n = v.norm();
            if n == 0.0 {
                return domain("cone vertex must be nonzero");
            }
            if n > 1.0 {
                return domain("cone vertex must lie in the closed unit disk");
            }
            Ok(in_cone(v, z.z()))
        }
        Region::Tent { base } => {
            if base.norm() == 0.0 {
                return domain("tent base must be nonzero");
            }
            if z.norm() == 0.0 {
                return Ok(false);
            }
            Ok(in_cone(z.z(), base.z()))
        }
        Region::BergmanDisk { center, radius } => Ok(bergman_distance(*center, z) < *radius),
    }
}

/// `ω(S_a) = (1 - |a|)/π ∫_{|a|}^1 s ω(s) ds`.
pub fn weighted_square_measure(w: &Weight, a: DiskPoint) -> Result<f64> {
    let r = a.norm();
    if r == 0.0 {
        return domain("Carleson square apex must be nonzero");
    }
    Ok((1.0 - r) / PI * w.integrate_against(r, |s, _| s))
}

/// The Bergman disk `Δ(a, R)` as a Euclidean disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BergmanDisk {
    pub center: Complex64,
    pub radius: f64,
    /// `1 - |center| - radius`, computed without cancellation.
    pub gap: f64,
}

impl BergmanDisk {
    pub fn new(a: Complex64, beta_radius: f64) -> Self {
        let big_r = beta_radius.tanh();
        let r2 = big_r * big_r;
        let am = a.norm();
        let den = 1.0 - r2 * am * am;
        let center = a * ((1.0 - r2) / den);
        let radius = big_r * (1.0 - am * am) / den;
        let gap = (1.0 - am) * (1.0 - big_r) / (1.0 + am * big_r);
        BergmanDisk { center, radius, gap }
    }

    /// Half the angle subtended by the disk on the circle `|w| = t`,
    /// measured from the direction of the center.
    pub fn angular_half_width(&self, t: f64) -> Option<f64> {
        let c = self.center.norm();
        if t <= 0.0 {
            return None;
        }
        if c == 0.0 {
            return (t < self.radius).then_some(PI);
        }
        // |t e^{iφ} - c| < s  ⇔  cos φ > (t² + c² - s²) / (2tc)
        let x = (t * t + (c - self.radius) * (c + self.radius)) / (2.0 * t * c);
        if x >= 1.0 {
            None
        } else if x <= -1.0 {
            Some(PI)
        } else {
            Some(x.acos())
        }
    }
}

/// One ring of a [`Lattice`]: `count` equally spaced points at `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub index: usize,
    pub radius: f64,
    /// `1 - radius`, kept separately for precision.
    pub gap: f64,
    pub count: usize,
    /// Number of points on earlier rings.
    pub offset: usize,
}

impl Ring {
    pub fn point(&self, i: usize) -> DiskPoint {
        let th = 2.0 * PI * i as f64 / self.count as f64;
        DiskPoint {
            re: self.radius * th.cos(),
            im: self.radius * th.sin(),
        }
    }
}

/// Default boundary cutoff `1 - |a_j|` of lattice rings.
pub const LATTICE_CUTOFF: f64 = 1e-6;

/// An r-lattice stored ring by ring; points are generated on demand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lattice {
    pub r: f64,
    /// Bergman distance between consecutive rings.
    pub step: f64,
    pub cutoff: f64,
    pub rings: Vec<Ring>,
}

/// Ring spacing as a fraction of `r/5`.
const KAPPA: f64 = 1.0;

pub fn make_lattice(r: f64) -> Result<Lattice> {
    make_lattice_with_cutoff(r, LATTICE_CUTOFF)
}

pub fn make_lattice_with_cutoff(r: f64, cutoff: f64) -> Result<Lattice> {
    if !(r > 0.0) || !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(LabError::Parameter(format!("lattice needs r > 0 and 0 < cutoff < 1 (r = {r})")));
    }
    if r > 2.0 {
        return Err(LabError::Construction(format!(
            "r = {r} exceeds 2; rings would be too sparse for the covering check"
        )));
    }
    let step = r / 5.0 * KAPPA;
    let rho = step.tanh();
    let mut rings = vec![Ring {
        index: 0,
        radius: 0.0,
        gap: 1.0,
        count: 1,
        offset: 0,
    }];
    let mut offset = 1usize;
    let mut m = 1usize;
    loop {
        let b = m as f64 * step;
        let t = b.tanh();
        // 1 - tanh b = 2 / (e^{2b} + 1)
        let gap = 2.0 / ((2.0 * b).exp() + 1.0);
        // same-ring neighbours at angle Δ have ρ ≥ tanh(step) iff
        // sin²(Δ/2) ≥ ρ²(1 - t²)² / (4t²(1 - ρ²))
        let one_minus_t2 = gap * (1.0 + t);
        let x = rho * rho * one_minus_t2 * one_minus_t2 / (4.0 * t * t * (1.0 - rho * rho));
        let count = if x >= 1.0 {
            1
        } else {
            let delta = 2.0 * x.sqrt().asin();
            ((2.0 * PI / delta).floor() as usize).max(1)
        };
        rings.push(Ring {
            index: m,
            radius: t,
            gap,
            count,
            offset,
        });
        offset += count;
        if gap < cutoff {
            break;
        }
        m += 1;
        if m > 100_000 {
            return Err(LabError::Construction("ring construction did not reach the cutoff".into()));
        }
    }
    Ok(Lattice {
        r,
        step,
        cutoff,
        rings,
    })
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.rings.last().map_or(0, |g| g.offset + g.count)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `i`-th point in order of increasing modulus.
    pub fn point(&self, i: usize) -> Option<DiskPoint> {
        if i >= self.len() {
            return None;
        }
        let k = self.rings.partition_point(|g| g.offset <= i) - 1;
        let g = &self.rings[k];
        Some(g.point(i - g.offset))
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, DiskPoint)> + '_ {
        self.rings
            .iter()
            .flat_map(|g| (0..g.count).map(move |i| (g.index, g.point(i))))
    }

    /// Nearest lattice point to `z` in the Bergman distance, with the
    /// distance.
    pub fn nearest(&self, z: DiskPoint) -> (DiskPoint, f64) {
        let b = z.norm().atanh();
        let m0 = (b / self.step).round() as isize;
        let mut best = (DiskPoint::origin(), f64::INFINITY);
        let last = self.rings.len() as isize - 1;
        for m in (m0 - 2)..=(m0 + 2) {
            let m = m.clamp(0, last) as usize;
            let g = &self.rings[m];
            let pos = z.arg().rem_euclid(2.0 * PI) / (2.0 * PI) * g.count as f64;
            let i0 = pos.floor() as isize;
            for di in -1..=2 {
                let i = (i0 + di).rem_euclid(g.count as isize) as usize;
                let p = g.point(i);
                let d = bergman_distance(p, z);
                if d < best.1 {
                    best = (p, d);
                }
            }
        }
        best
    }

    /// Minimum pairwise Bergman distance among the first `n` points.
    pub fn min_separation(&self, n: usize) -> f64 {
        let pts: Vec<DiskPoint> = self.points().take(n).map(|p| p.1).collect();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                best = best.min(bergman_distance(pts[i], pts[j]));
            }
        }
        best
    }

    /// Fraction of `samples` quasi-random points of `|z| < 1 - cutoff` lying
    /// within Bergman distance `5r` of the lattice.
    pub fn covering_fraction(&self, samples: usize) -> f64 {
        let mut hit = 0usize;
        let mut tested = 0usize;
        for k in 1..=samples {
            let u = radical_inverse(k as u64, 2);
            let v = radical_inverse(k as u64, 3);
            let z = DiskPoint {
                re: u.sqrt() * (2.0 * PI * v).cos(),
                im: u.sqrt() * (2.0 * PI * v).sin(),
            };
            if 1.0 - z.norm() < self.cutoff {
                continue;
            }
            tested += 1;
            if self.nearest(z).1 < 5.0 * self.r {
                hit += 1;
            }
        }
        if tested == 0 {
            1.0
        } else {
            hit as f64 / tested as f64
        }
    }

    /// Writes `re,im,modulus,ring` rows, at most `limit` points.
    pub fn write_csv<W: Write>(&self, mut out: W, limit: Option<usize>) -> Result<()> {
        writeln!(out, "re,im,modulus,ring")?;
        let n = limit.unwrap_or(usize::MAX);
        for (ring, p) in self.points().take(n) {
            writeln!(out, "{:.17e},{:.17e},{:.17e},{}", p.re, p.im, p.norm(), ring)?;
        }
        Ok(())
    }
}

/// Van der Corput radical inverse in the given base.
pub fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut x = 0.0;
    while k > 0 {
        x += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(re, im).unwrap()
    }

    #[test]
    fn distances() {
        let w = p(0.3, -0.4);
        assert!((pseudohyperbolic(DiskPoint::origin(), w) - 0.5).abs() < 1e-15);
        assert!((pseudohyperbolic(p(0.5, 0.0), p(-0.5, 0.0)) - 0.8).abs() < 1e-15);
        assert_eq!(pseudohyperbolic(w, w), 0.0);
        assert!((bergman_distance(DiskPoint::origin(), p(0.5, 0.0)) - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!(DiskPoint::new(1.0, 0.0).is_err());
    }

    #[test]
    fn regions() {
        let sq = Region::carleson_square(p(0.5, 0.0));
        assert!(region_contains(&sq, p(0.75, 0.0)).unwrap());
        assert!(!region_contains(&sq, DiskPoint::polar(0.75, 0.3).unwrap()).unwrap());
        let cone = Region::cone(Complex64::new(0.8, 0.0));
        assert!(region_contains(&cone, p(0.4, 0.0)).unwrap());
        assert!(region_contains(&Region::cone(Complex64::new(1.0, 0.0)), p(0.9, 0.0)).unwrap());
        assert!(region_contains(&Region::carleson_square(DiskPoint::origin()), p(0.1, 0.0)).is_err());
        assert!(region_contains(&Region::cone(Complex64::new(0.0, 0.0)), p(0.1, 0.0)).is_err());
        let disk = Region::bergman_disk(p(0.5, 0.0), 1.0);
        assert!(region_contains(&disk, p(0.5, 0.1)).unwrap());
    }

    #[test]
    fn square_measure() {
        let w = Weight::standard(0.0).unwrap();
        let v = weighted_square_measure(&w, p(0.5, 0.0)).unwrap();
        assert!((v - 0.5 / PI * 0.375).abs() < 1e-12);
        assert!(weighted_square_measure(&w, DiskPoint::origin()).is_err());
    }

    #[test]
    fn bergman_disk_is_euclidean_disk() {
        let a = Complex64::from_polar(0.9, 0.7);
        let d = BergmanDisk::new(a, 0.8);
        // points at β = R on the boundary circle
        for k in 0..16 {
            let w = d.center + Complex64::from_polar(d.radius, k as f64 * 0.4);
            let b = pseudo_c(a, w).atanh();
            assert!((b - 0.8).abs() < 1e-10, "{b}");
        }
        assert!((d.gap - (1.0 - d.center.norm() - d.radius)).abs() < 1e-14);
    }

    #[test]
    fn lattice_small_checks() {
        let l = make_lattice(1.0).unwrap();
        assert_eq!(l.point(0).unwrap(), DiskPoint::origin());
        assert!(l.min_separation(500) >= 0.2 - 1e-12);
        assert!(make_lattice(2.5).is_err());
        let last = l.rings.last().unwrap();
        assert!(last.gap < 1e-6);
        let mut prev = 0.0;
        for (_, q) in l.points().take(2000) {
            assert!(q.norm() >= prev - 1e-15);
            prev = q.norm();
        }
    }

    #[test]
    fn csv_export() {
        let l = make_lattice(2.0).unwrap();
        let mut buf = Vec::new();
        l.write_csv(&mut buf, Some(3)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("re,im,modulus,ring"));
    }
}
