//! The Hardy space `H²` with orthonormal basis `z^j`: norms, the `G_k`
//! function, operator matrices and the lattice criteria with `ω̂ ≡ 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{toeplitz_criterion, volterra_schatten, CriterionReport};
use crate::error::{param, Result};
use crate::geometry::Lattice;
use crate::norms::{circle_mean_pow, DiskQuadrature};
use crate::operators::{assemble_toeplitz_in, assemble_volterra_in, log_star_table, MeasureSpec, OperatorMatrix, Space};
use crate::quad::{gauss_legendre, sum_ascending};
use crate::series::{derivative, ring_size, ring_values, AnalyticFn};

/// Angular nodes for boundary means of functions that are not polynomials.
pub const BOUNDARY_NODES: usize = 1 << 12;
const MAX_LAYERS: i32 = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyNorm {
    pub value: f64,
    pub infinite: bool,
    /// Radius of the last circle used; 1 for exact formulas.
    pub radius: f64,
    pub note: Option<String>,
}

/// `‖f‖_{H^p} = sup_r M_p(f, r)`.
pub fn hardy_norm(f: &AnalyticFn, p: f64) -> Result<HardyNorm> {
    if !(p > 0.0) {
        return param(format!("Hardy norm needs p > 0, got {p}"));
    }
    if p == 2.0 {
        let parts: Vec<f64> = f.coeffs().iter().map(|c| c.norm_sqr()).collect();
        return Ok(HardyNorm {
            value: sum_ascending(&parts).sqrt(),
            infinite: false,
            radius: 1.0,
            note: (!f.is_exact()).then(|| format!("sum over {} retained coefficients", f.truncation() + 1)),
        });
    }
    if f.is_exact() {
        let m = ring_size(f.degree().unwrap_or(0)).max(BOUNDARY_NODES);
        let vals = ring_values(f, 1.0, m);
        let v = vals.iter().map(|x| x.norm().powf(p)).sum::<f64>() / m as f64;
        return Ok(HardyNorm {
            value: v.powf(1.0 / p),
            infinite: false,
            radius: 1.0,
            note: None,
        });
    }
    // circles 1 - 2^{-m} until the means stabilize or keep growing
    let mut means = Vec::new();
    for m in 1..=MAX_LAYERS {
        let d = 0.5f64.powi(m);
        means.push(circle_mean_pow(f, 1.0 - d, d, p, 1));
        let n = means.len();
        if n >= 3 {
            let (a, b, c) = (means[n - 3], means[n - 2], means[n - 1]);
            if (c - b).abs() <= 1e-10 * c.abs() && (b - a).abs() <= 1e-9 * b.abs() {
                return Ok(HardyNorm {
                    value: c.powf(1.0 / p),
                    infinite: false,
                    radius: 1.0 - d,
                    note: None,
                });
            }
        }
    }
    let incs: Vec<f64> = means.windows(2).map(|w| w[1] - w[0]).collect();
    let diverging = crate::detect::layers_diverge(&incs) || {
        let n = means.len();
        crate::detect::fit_loglog(&[(1.0, means[n - 6]), (32.0, means[n - 1])]).is_some_and(|s| s > 0.01)
    };
    let d = 0.5f64.powi(MAX_LAYERS);
    let last = *means.last().unwrap_or(&0.0);
    Ok(HardyNorm {
        value: if diverging { f64::INFINITY } else { last.powf(1.0 / p) },
        infinite: diverging,
        radius: 1.0 - d,
        note: Some(if diverging {
            "circle means keep growing toward the boundary".into()
        } else {
            "circle means not fully stabilized".into()
        }),
    })
}

/// `(∫ G_k(f)^p dθ/2π)^{1/p}` with
/// `G_k(f)(θ)² = ∫_0^1 |f^{(k)}(re^{iθ})|² (1-r)^{2k-1} dr`.
pub fn gk_norm(f: &AnalyticFn, p: f64, k: usize) -> Result<f64> {
    if !(p > 0.0) || k == 0 {
        return param(format!("G_k norm needs p > 0 and k >= 1 (p = {p}, k = {k})"));
    }
    if let Some(j) = (0..k).find(|&j| f.coeff(j).norm() != 0.0) {
        return param(format!("G_{k} norm needs the coefficients below degree {k} to vanish; coefficient {j} is nonzero"));
    }
    let fk = derivative(f, k)?;
    let m = if fk.is_exact() {
        ring_size(fk.degree().unwrap_or(0)).max(BOUNDARY_NODES)
    } else {
        BOUNDARY_NODES.max(ring_size(fk.truncation()))
    };
    let rule = gauss_legendre(16);
    let mut nodes = Vec::new();
    for layer in 0..MAX_LAYERS {
        let hi = 0.5f64.powi(layer);
        for (d, w) in rule.mapped(0.5 * hi, hi) {
            nodes.push((d, w));
        }
    }
    let rows: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|&(d, wt)| {
            let vals = ring_values(&fk, 1.0 - d, m);
            let s = wt * d.powi(2 * k as i32 - 1);
            vals.iter().map(|v| v.norm_sqr() * s).collect()
        })
        .collect();
    // fixed summation order keeps results reproducible across thread counts
    let mut g2 = vec![0.0; m];
    for row in &rows {
        g2.iter_mut().zip(row).for_each(|(x, y)| *x += y);
    }
    let mean = g2.iter().map(|v| v.powf(p / 2.0)).sum::<f64>() / m as f64;
    Ok(mean.powf(1.0 / p))
}

/// `|f(0)|² + 2∫_D |f'|² log(1/|z|) dA`, equal to `‖f‖²_{H²}`.
pub fn hardy_littlewood_paley(f: &AnalyticFn) -> Result<f64> {
    let fp = derivative(f, 1)?;
    let head = f.coeff(0).norm_sqr();
    if fp.is_zero() {
        return Ok(head);
    }
    let table = log_star_table(1)?;
    let body = table.integrate_with(|r, d| 2.0 * r * circle_mean_pow(&fp, r, d, 2.0, 0));
    Ok(head + 2.0 * body)
}

pub fn assemble_hardy_volterra(g: &AnalyticFn, n: usize, k: usize, big_n: usize) -> Result<OperatorMatrix> {
    assemble_volterra_in(g, &Space::Hardy, n, k, big_n)
}

pub fn assemble_hardy_toeplitz(mu: &MeasureSpec, k: usize, big_n: usize) -> Result<OperatorMatrix> {
    assemble_toeplitz_in(mu, &Space::Hardy, k, big_n)
}

/// Lattice criteria for `T_{μ,k}` on `H²`.
pub fn thm54_hardy_toeplitz(mu: &MeasureSpec, k: usize, p: Option<f64>, r: f64, lat: &Lattice) -> Result<CriterionReport> {
    toeplitz_criterion("thm54", mu, &Space::Hardy, k, p, r, lat)
}

/// `T_g^{n,k} ∈ S_p(H²)` via `g ∈ B_{p,n-k}`.
pub fn cor52_hardy_schatten(g: &AnalyticFn, p: f64, n: usize, k: usize) -> Result<CriterionReport> {
    volterra_schatten("cor52", g, &Space::Hardy, p, n, k)
}

/// `⟨f, K_z^N⟩` with the truncated reproducing kernel
/// `K_z^N(w) = Σ_{j≤N} (z̄w)^j / ‖z^j‖²`, by quadrature in the space's own
/// inner product.
pub fn truncated_kernel_pairing(f: &AnalyticFn, space: &Space, z: Complex64, big_n: usize) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return param(format!("kernel point must lie in the disk, got |z| = {}", z.norm()));
    }
    // conj(K_z(w)) = Σ_j z^j w̄^j / ‖z^j‖²
    let kc: Vec<Complex64> = (0..=big_n).map(|j| z.powu(j as u32) / space.basis_norm_sq(j)).collect();
    let deg = f.degree().unwrap_or(f.truncation()).max(big_n);
    let m = ring_size(2 * deg);
    let conj_kernel = |w: Complex64| {
        let wb = w.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in kc.iter().rev() {
            acc = acc * wb + c;
        }
        acc
    };
    match space {
        Space::Hardy => {
            let vals = ring_values(f, 1.0, m);
            let s: Complex64 = vals
                .iter()
                .enumerate()
                .map(|(i, v)| v * conj_kernel(Complex64::from_polar(1.0, 2.0 * PI * i as f64 / m as f64)))
                .sum();
            Ok(s / m as f64)
        }
        Space::Bergman(w) => {
            let q = DiskQuadrature::new(w.max_depth(), 20, m);
            let re = q.integrate(w, |u| (f.eval_series(u) * conj_kernel(u)).re);
            let im = q.integrate(w, |u| (f.eval_series(u) * conj_kernel(u)).im);
            Ok(Complex64::new(re, im))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::singular_values;
    use crate::series::power_singular;
    use crate::weights::Weight;

    #[test]
    fn hardy_norm_examples() {
        let f = AnalyticFn::real_polynomial(&[1.0, 1.0]);
        assert!((hardy_norm(&f, 2.0).unwrap().value - 2f64.sqrt()).abs() < 1e-15);
        for p in [1.0, 3.0] {
            assert!((hardy_norm(&AnalyticFn::monomial(4), p).unwrap().value - 1.0).abs() < 1e-12);
        }
        let s = hardy_norm(&power_singular(0.4, 4000).unwrap(), 2.0).unwrap();
        assert!(s.value.is_finite() && s.value > 1.0);
        // (1-z)^{-0.3} ∈ H^1, (1-z)^{-1.2} ∉ H^1
        let a = hardy_norm(&power_singular(0.3, 64).unwrap(), 1.0).unwrap();
        assert!(!a.infinite, "{a:?}");
        let b = hardy_norm(&power_singular(1.2, 64).unwrap(), 1.0).unwrap();
        assert!(b.infinite, "{b:?}");
    }

    #[test]
    fn gk_examples() {
        let z = AnalyticFn::monomial(1);
        assert!((gk_norm(&z, 2.0, 1).unwrap().powi(2) - 0.5).abs() < 1e-12);
        let z2 = AnalyticFn::monomial(2);
        assert!((gk_norm(&z2, 2.0, 1).unwrap().powi(2) - 1.0 / 3.0).abs() < 1e-12);
        assert!(gk_norm(&AnalyticFn::real_polynomial(&[1.0, 1.0]), 2.0, 1).is_err());
        assert!(gk_norm(&z, 2.0, 2).is_err());
    }

    #[test]
    fn gk_equivalence_band() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let deg = rng.random_range(3..12);
            let c: Vec<Complex64> = (0..=deg)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            for k in [1usize, 2] {
                let mut ck = c.clone();
                ck.iter_mut().take(k).for_each(|x| *x = Complex64::new(0.0, 0.0));
                let f = AnalyticFn::polynomial(&ck);
                for p in [1.0, 2.0, 4.0] {
                    let ratio = gk_norm(&f, p, k).unwrap().powf(p) / hardy_norm(&f, p).unwrap().value.powf(p);
                    assert!((0.05..=20.0).contains(&ratio), "{ratio} k={k} p={p}");
                }
            }
        }
    }

    #[test]
    fn littlewood_paley_constant_two() {
        let f = AnalyticFn::real_polynomial(&[0.5, -1.0, 0.25, 2.0]);
        let a = hardy_littlewood_paley(&f).unwrap();
        let b = hardy_norm(&f, 2.0).unwrap().value.powi(2);
        assert!((a - b).abs() < 1e-10 * b, "{a} {b}");
    }

    #[test]
    fn hardy_matrices() {
        let m = assemble_hardy_volterra(&AnalyticFn::monomial(1), 1, 0, 50).unwrap();
        for j in 0..=50 {
            assert!((m.get(j + 1, j).re - 1.0 / (j + 1) as f64).abs() < 1e-15);
        }
        let sv = singular_values(&m).unwrap();
        for (j, s) in sv.iter().enumerate() {
            assert!((s - 1.0 / (j + 1) as f64).abs() < 1e-12);
        }
        let atom = MeasureSpec::atoms(vec![(crate::geometry::DiskPoint::origin(), 1.0)]).unwrap();
        let t = assemble_hardy_toeplitz(&atom, 0, 10).unwrap();
        assert!((singular_values(&t).unwrap()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hardy_adjoint_identity() {
        // MᴴM for g = z against the log(1/|w|) density with constant 2
        let g = AnalyticFn::monomial(1);
        let m = assemble_hardy_volterra(&g, 1, 0, 40).unwrap();
        let t = assemble_hardy_toeplitz(&MeasureSpec::hardy_star_density(&g, 1, 0).unwrap(), 0, 40).unwrap();
        let gram = m.gram();
        for i in 0..=40 {
            assert!((gram[i * 41 + i].re - 1.0 / ((i + 1) * (i + 1)) as f64).abs() < 1e-8);
            for j in 0..=40 {
                assert!((gram[i * 41 + j] - t.get(i, j)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn kernels_reproduce() {
        let f = AnalyticFn::polynomial(
            &(0..=20).map(|j| Complex64::new((j as f64).sin(), 0.3 * (j as f64).cos())).collect::<Vec<_>>(),
        );
        let z = Complex64::new(0.3, -0.5);
        for space in [Space::Hardy, Space::Bergman(Weight::standard(1.0).unwrap())] {
            let v = truncated_kernel_pairing(&f, &space, z, 24).unwrap();
            assert!((v - f.eval_series(z)).norm() < 1e-10, "{}", space.label());
        }
    }
}
