use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use bergman_lab::criteria::{
    cor43_schatten_volterra, cor43_with_scan, thm31_boundedness, thm32_fixed_p, thm32_with_scan, thm33_downward, thm33_with_scan,
    thm42_toeplitz, thm42_with_scan, toeplitz_cross_check, volterra_cross_check, CriterionReport,
};
use bergman_lab::geometry::{bergman_distance, make_lattice, pseudohyperbolic, weighted_square_measure, DiskPoint};
use bergman_lab::hardy::{
    assemble_hardy_toeplitz, assemble_hardy_volterra, cor52_hardy_schatten, gk_norm, hardy_littlewood_paley, hardy_norm,
    thm54_hardy_toeplitz,
};
use bergman_lab::norms::{besov_seminorm, bergman_norm, bloch_seminorm, coefficient_norm_sq, littlewood_paley_p2, nontangential_norm};
use bergman_lab::operators::{
    assemble_toeplitz_in, assemble_volterra_in, growth_scan, singular_values, GrowthScan, MeasureSpec, OperatorMatrix, Space, Statistic,
};
use bergman_lab::series::{AnalyticFn, SymbolSpec, DEFAULT_TRUNCATION};
use bergman_lab::suite::{self, Battery};
use bergman_lab::Weight;

use crate::config::Params;
use crate::{CliError, CriterionId, GeometryAction, HardyAction, NormsAction, OperatorAction, Output, WeightsAction};

type Res<T> = Result<T, CliError>;

/// Fills parameters every command shares, so the recorded config is complete.
pub fn with_defaults(mut p: Params) -> Params {
    p.weight.get_or_insert_with(|| "std:alpha=0".into());
    p.truncation.get_or_insert(DEFAULT_TRUNCATION);
    p.space.get_or_insert_with(|| "bergman".into());
    p.r.get_or_insert(1.0);
    p.ns.get_or_insert_with(|| bergman_lab::criteria::DEFAULT_NS.to_vec());
    p.n.get_or_insert(1);
    p.k.get_or_insert(0);
    p.cross_check.get_or_insert(false);
    p
}

fn req<T: Clone>(v: &Option<T>, name: &str) -> Res<T> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing --{name}")))
}

fn weight(p: &Params) -> Res<Weight> {
    Ok(Weight::parse(&req(&p.weight, "weight")?)?)
}

fn symbol(text: &Option<String>, name: &str, p: &Params) -> Res<AnalyticFn> {
    let t = req(text, name)?;
    Ok(SymbolSpec::parse(&t)?.build(req(&p.truncation, "truncation")?)?)
}

fn measure(p: &Params, w: &Weight) -> Res<MeasureSpec> {
    Ok(MeasureSpec::parse(&req(&p.measure, "measure")?, w, req(&p.truncation, "truncation")?)?)
}

fn space(p: &Params) -> Res<Space> {
    match req(&p.space, "space")?.as_str() {
        "bergman" => Ok(Space::Bergman(weight(p)?)),
        "hardy" => Ok(Space::Hardy),
        other => Err(CliError::Config(format!("unknown space `{other}` (bergman, hardy)"))),
    }
}

fn point(v: &Option<Vec<f64>>, name: &str) -> Res<DiskPoint> {
    let v = req(v, name)?;
    if v.len() != 2 {
        return Err(CliError::Config(format!("--{name} takes re,im")));
    }
    Ok(DiskPoint::new(v[0], v[1])?)
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn csv_rows<I: IntoIterator<Item = String>>(header: &str, rows: I) -> Vec<u8> {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s.into_bytes()
}

fn g17(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn weights(action: WeightsAction, p: &Params) -> Res<Output> {
    let w = weight(p)?;
    Ok(match action {
        WeightsAction::Doubling => {
            let prof = w.doubling_profile(p.depth.unwrap_or(12))?;
            let csv = csv_rows("m,ratio", prof.ratios.iter().enumerate().map(|(m, r)| format!("{m},{}", g17(*r))));
            Output {
                result: json!({ "weight": w.label(), "doubling": prof }),
                files: vec![("profile.csv".into(), csv)],
                failed: false,
            }
        }
        WeightsAction::Profile => {
            let radii = p.radii.clone().unwrap_or_else(|| vec![0.0, 0.5, 0.9, 0.99, 0.999]);
            let mut rows = Vec::new();
            let mut vals = Vec::new();
            for &r in &radii {
                let (e, h, s) = (w.eval(r)?, w.hat(r)?, w.star(r)?);
                rows.push(format!("{},{},{},{}", g17(r), g17(e), g17(h), g17(s)));
                vals.push(json!({ "r": r, "density": e, "hat": h, "star": s }));
            }
            Output {
                result: json!({ "weight": w.label(), "profile": vals }),
                files: vec![("profile.csv".into(), csv_rows("r,density,hat,star", rows))],
                failed: false,
            }
        }
        WeightsAction::Regular => {
            let radii = p
                .radii
                .clone()
                .unwrap_or_else(|| (0..=40).map(|i| 1.0 - 0.5 * 0.002f64.powf(i as f64 / 40.0)).collect());
            let prof = w.regular_ratio_profile(&radii)?;
            let csv = csv_rows("r,ratio", prof.values.iter().map(|(r, v)| format!("{},{}", g17(*r), g17(*v))));
            Output {
                result: json!({ "weight": w.label(), "regular": prof }),
                files: vec![("profile.csv".into(), csv)],
                failed: false,
            }
        }
        WeightsAction::Upsilon => {
            let k = req(&p.k, "k")?;
            let u = w.upsilon_transform(k as u32)?;
            let count = p.big_n.unwrap_or(50);
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for j in k..=k + count {
                let lhs = u.basis_norm_sq(j - k);
                let ratio: f64 = (j - k + 1..=j).map(|i| 1.0 / i as f64).product();
                let rhs = ratio * w.basis_norm_sq(j);
                worst = worst.max((lhs - rhs).abs() / rhs);
                rows.push(format!("{j},{},{}", g17(lhs), g17(rhs)));
            }
            Output {
                result: json!({ "weight": w.label(), "upsilon": u.label(), "k": k, "max_relative_error": worst }),
                files: vec![("moments.csv".into(), csv_rows("j,upsilon_moment,identity_rhs", rows))],
                failed: false,
            }
        }
    })
}

pub fn geometry(action: GeometryAction, p: &Params) -> Res<Output> {
    Ok(match action {
        GeometryAction::Lattice => {
            let lat = make_lattice(req(&p.r, "r")?)?;
            let mut csv = Vec::new();
            lat.write_csv(&mut csv, Some(p.limit.unwrap_or(10_000)))?;
            Output {
                result: json!({
                    "r": lat.r, "step": lat.step, "cutoff": lat.cutoff, "rings": lat.rings.len(), "points": lat.len(),
                    "min_separation_first_500": lat.min_separation(500),
                }),
                files: vec![("lattice.csv".into(), csv)],
                failed: false,
            }
        }
        GeometryAction::Distance => {
            let (z, w) = (point(&p.z, "z")?, point(&p.w_point, "w")?);
            Output {
                result: json!({ "pseudohyperbolic": pseudohyperbolic(z, w), "bergman_distance": bergman_distance(z, w) }),
                ..Default::default()
            }
        }
        GeometryAction::Square => {
            let a = point(&p.z, "z")?;
            let w = weight(p)?;
            Output {
                result: json!({ "weight": w.label(), "apex": [a.re, a.im], "measure": weighted_square_measure(&w, a)? }),
                ..Default::default()
            }
        }
    })
}

pub fn norms(action: NormsAction, p: &Params) -> Res<Output> {
    let w = weight(p)?;
    let result = match action {
        NormsAction::Bergman => {
            let f = symbol(&p.f, "f", p)?;
            json!({ "weight": w.label(), "p": req(&p.p, "p")?, "norm": bergman_norm(&f, &w, req(&p.p, "p")?)? })
        }
        NormsAction::LittlewoodPaley => {
            let f = symbol(&p.f, "f", p)?;
            json!({
                "weight": w.label(),
                "littlewood_paley": littlewood_paley_p2(&f, &w)?,
                "coefficient_norm_sq": coefficient_norm_sq(&f, &w),
            })
        }
        NormsAction::Nontangential => {
            let f = symbol(&p.f, "f", p)?;
            json!({ "weight": w.label(), "p": req(&p.p, "p")?, "norm": nontangential_norm(&f, &w, req(&p.p, "p")?)? })
        }
        NormsAction::Bloch => {
            let g = symbol(&p.g, "g", p)?;
            json!({ "m": req(&p.m, "m")?, "bloch": bloch_seminorm(&g, req(&p.m, "m")?)? })
        }
        NormsAction::Besov => {
            let g = symbol(&p.g, "g", p)?;
            json!({ "p": req(&p.p, "p")?, "m": req(&p.m, "m")?, "besov": besov_seminorm(&g, req(&p.p, "p")?, req(&p.m, "m")?)? })
        }
    };
    Ok(Output {
        result,
        ..Default::default()
    })
}

fn matrix_output(m: &OperatorMatrix, p: &Params) -> Res<Output> {
    let mut files = Vec::new();
    let mut result = json!({
        "rows": m.rows, "cols": m.cols, "truncation": m.truncation, "space": m.space,
        "provenance": m.provenance, "dropped_mass": m.dropped_mass, "frobenius": m.frobenius(),
    });
    if p.svd.unwrap_or(false) {
        let sv = singular_values(m)?;
        result["operator_norm"] = json!(sv.first().copied().unwrap_or(0.0));
        result["leading_singular_values"] = json!(sv.iter().take(10).collect::<Vec<_>>());
        files.push(("spectrum.csv".into(), csv_rows("j,singular_value", sv.iter().enumerate().map(|(j, s)| format!("{j},{}", g17(*s))))));
    }
    if p.binary.unwrap_or(false) {
        let mut b = Vec::new();
        m.write_binary(&mut b)?;
        files.push(("matrix.bin".into(), b));
    }
    if p.matrix_csv.unwrap_or(false) {
        let mut b = Vec::new();
        m.write_csv(&mut b)?;
        files.push(("matrix.csv".into(), b));
    }
    Ok(Output {
        result,
        files,
        failed: false,
    })
}

fn statistic(p: &Params) -> Res<Statistic> {
    match p.statistic.as_deref().unwrap_or("norm") {
        "norm" => Ok(Statistic::OperatorNorm),
        "schatten" => Ok(Statistic::Schatten { p: req(&p.p, "p")? }),
        other => Err(CliError::Config(format!("unknown statistic `{other}` (norm, schatten)"))),
    }
}

fn scan_output(scan: GrowthScan) -> Output {
    let rows = (0..scan.ns.len()).map(|i| {
        format!("{},{},{},{}", scan.ns[i], g17(scan.values[i]), g17(scan.monitored[i]), g17(scan.dropped_mass[i]))
    });
    let csv = csv_rows("N,value,monitored,dropped_mass", rows);
    Output {
        result: to_value(&scan),
        files: vec![("scan.csv".into(), csv)],
        failed: false,
    }
}

pub fn operator(action: OperatorAction, p: &Params) -> Res<Output> {
    let sp = space(p)?;
    let (n, k) = (req(&p.n, "n")?, req(&p.k, "k")?);
    match action {
        OperatorAction::Volterra => {
            let g = symbol(&p.g, "g", p)?;
            matrix_output(&assemble_volterra_in(&g, &sp, n, k, req(&p.big_n, "N")?)?, p)
        }
        OperatorAction::Toeplitz => {
            let mu = measure(p, &weight(p)?)?;
            matrix_output(&assemble_toeplitz_in(&mu, &sp, k, req(&p.big_n, "N")?)?, p)
        }
        OperatorAction::ScanVolterra => {
            let g = symbol(&p.g, "g", p)?;
            let scan = growth_scan(|big| assemble_volterra_in(&g, &sp, n, k, big), &req(&p.ns, "ns")?, statistic(p)?)?;
            Ok(scan_output(scan))
        }
        OperatorAction::ScanToeplitz => {
            let mu = measure(p, &weight(p)?)?;
            let scan = growth_scan(|big| assemble_toeplitz_in(&mu, &sp, k, big), &req(&p.ns, "ns")?, statistic(p)?)?;
            Ok(scan_output(scan))
        }
    }
}

fn report_output(rep: &CriterionReport) -> Res<Output> {
    let mut files = vec![("report.json".into(), rep.to_json()?.into_bytes())];
    let mut csv = Vec::new();
    rep.write_csv(&mut csv)?;
    files.push(("profile.csv".into(), csv));
    if let Some(cc) = &rep.cross_check {
        let mut s = String::from("N,value,monitored\n");
        for i in 0..cc.ns.len() {
            let _ = writeln!(s, "{},{},{}", cc.ns[i], g17(cc.values[i]), g17(cc.monitored[i]));
        }
        files.push(("scan.csv".into(), s.into_bytes()));
    }
    Ok(Output {
        result: to_value(rep),
        files,
        failed: false,
    })
}

pub fn criteria(id: CriterionId, p: &Params) -> Res<Output> {
    let w = weight(p)?;
    let (n, k) = (req(&p.n, "n")?, req(&p.k, "k")?);
    let cross = p.cross_check.unwrap_or(false);
    let ns = req(&p.ns, "ns")?;
    let rep = match id {
        CriterionId::Thm31 => thm31_boundedness(&symbol(&p.g, "g", p)?, &w, req(&p.p, "p")?, req(&p.q, "q")?, n, k)?,
        CriterionId::Thm32 => {
            let g = symbol(&p.g, "g", p)?;
            let pp = p.p.unwrap_or(2.0);
            if cross {
                thm32_with_scan(&g, &w, pp, n, k, &ns)?
            } else {
                thm32_fixed_p(&g, &w, pp, n, k)?
            }
        }
        CriterionId::Thm33 => {
            let g = symbol(&p.g, "g", p)?;
            if cross {
                thm33_with_scan(&g, &w, req(&p.p, "p")?, req(&p.q, "q")?, n, k, &ns)?
            } else {
                thm33_downward(&g, &w, req(&p.p, "p")?, req(&p.q, "q")?, n, k)?
            }
        }
        CriterionId::Thm42 => {
            let mu = measure(p, &w)?;
            let r = req(&p.r, "r")?;
            let lat = make_lattice(r)?;
            if cross {
                thm42_with_scan(&mu, &w, k, p.p, r, &lat, &ns)?
            } else {
                thm42_toeplitz(&mu, &w, k, p.p, r, &lat)?
            }
        }
        CriterionId::Cor43 => {
            let g = symbol(&p.g, "g", p)?;
            if cross {
                cor43_with_scan(&g, &w, req(&p.p, "p")?, n, k, &ns)?
            } else {
                cor43_schatten_volterra(&g, &w, req(&p.p, "p")?, n, k)?
            }
        }
    };
    report_output(&rep)
}

pub fn hardy(action: HardyAction, p: &Params) -> Res<Output> {
    let (n, k) = (req(&p.n, "n")?, req(&p.k, "k")?);
    let simple = |v: Value| {
        Ok(Output {
            result: v,
            ..Default::default()
        })
    };
    match action {
        HardyAction::Norm => {
            let f = symbol(&p.f, "f", p)?;
            simple(json!({ "space": "hardy", "p": req(&p.p, "p")?, "norm": hardy_norm(&f, req(&p.p, "p")?)? }))
        }
        HardyAction::Gk => {
            let f = symbol(&p.f, "f", p)?;
            let pp = req(&p.p, "p")?;
            simple(json!({ "space": "hardy", "p": pp, "k": k, "gk_norm": gk_norm(&f, pp, k)?, "hardy_norm": hardy_norm(&f, pp)? }))
        }
        HardyAction::LittlewoodPaley => {
            let f = symbol(&p.f, "f", p)?;
            let exact: f64 = f.coeffs().iter().map(|c: &Complex64| c.norm_sqr()).sum();
            simple(json!({ "space": "hardy", "littlewood_paley": hardy_littlewood_paley(&f)?, "coefficient_norm_sq": exact }))
        }
        HardyAction::Volterra => matrix_output(&assemble_hardy_volterra(&symbol(&p.g, "g", p)?, n, k, req(&p.big_n, "N")?)?, p),
        HardyAction::Toeplitz => matrix_output(&assemble_hardy_toeplitz(&measure(p, &weight(p)?)?, k, req(&p.big_n, "N")?)?, p),
        HardyAction::Thm54 => {
            let mu = measure(p, &weight(p)?)?;
            let r = req(&p.r, "r")?;
            let mut rep = thm54_hardy_toeplitz(&mu, k, p.p, r, &make_lattice(r)?)?;
            if p.cross_check.unwrap_or(false) {
                toeplitz_cross_check(&mut rep, &mu, &Space::Hardy, k, p.p, &req(&p.ns, "ns")?)?;
            }
            report_output(&rep)
        }
        HardyAction::Cor52 => {
            let g = symbol(&p.g, "g", p)?;
            let pp = req(&p.p, "p")?;
            let mut rep = cor52_hardy_schatten(&g, pp, n, k)?;
            if p.cross_check.unwrap_or(false) {
                volterra_cross_check(&mut rep, &g, &Space::Hardy, Statistic::Schatten { p: pp }, n, k, &req(&p.ns, "ns")?)?;
            }
            report_output(&rep)
        }
    }
}

pub fn suite(battery: Battery) -> Res<Output> {
    let checks = suite::run(battery);
    let mut csv = Vec::new();
    suite::write_csv(&checks, &mut csv)?;
    let failed = checks.iter().any(|c| !c.passed);
    Ok(Output {
        result: json!({
            "battery": battery.as_str(),
            "passed": checks.iter().filter(|c| c.passed).count(),
            "total": checks.len(),
            "checks": checks,
        }),
        files: vec![("summary.csv".into(), csv)],
        failed,
    })
}
