use bergman_lab::criteria::{thm31_boundedness, toeplitz_cross_check, Verdict};
use bergman_lab::geometry::make_lattice;
use bergman_lab::hardy::{cor52_hardy_schatten, thm54_hardy_toeplitz};
use bergman_lab::operators::{MeasureSpec, Radial, Space};
use bergman_lab::series::{log_singular, power_singular, AnalyticFn};
use bergman_lab::suite::{run, write_csv, Battery};
use bergman_lab::Weight;

#[test]
fn regression_battery_passes() {
    let checks = run(Battery::Regression);
    for c in &checks {
        println!("{}", c.summary());
    }
    assert!(checks.iter().all(|c| c.passed));
    let mut out = Vec::new();
    write_csv(&checks, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), checks.len() + 1);
}

#[test]
fn schatten_verdicts_monotone_in_p() {
    let z = AnalyticFn::monomial(1);
    let mut seen_hold = false;
    for p in [0.5, 0.8, 0.95, 1.05, 1.5, 3.0] {
        let v = cor52_hardy_schatten(&z, p, 1, 0).unwrap().verdict;
        if seen_hold {
            assert_eq!(v, Verdict::Holds, "p = {p}");
        }
        seen_hold |= v == Verdict::Holds;
    }
    assert!(seen_hold);
}

#[test]
fn compactness_implies_boundedness() {
    let w = Weight::standard(0.0).unwrap();
    let symbols = [
        AnalyticFn::monomial(2),
        power_singular(0.5, 512).unwrap(),
        log_singular(512),
        AnalyticFn::real_polynomial(&[1.0, -0.5, 0.25]),
    ];
    for g in &symbols {
        for (p, q, n, k) in [(1.0, 2.0, 1, 0), (1.0, 2.0, 2, 1), (2.0, 3.0, 2, 0)] {
            let r = thm31_boundedness(g, &w, p, q, n, k).unwrap();
            if r.compactness == Some(Verdict::Holds) {
                assert_eq!(r.verdict, Verdict::Holds);
            }
        }
    }
}

#[test]
fn hardy_toeplitz_report_is_the_shared_evaluator() {
    let lat = make_lattice(1.0).unwrap();
    let mu = MeasureSpec::Radial(Radial::Gap { exponent: 1.0 });
    let a = thm54_hardy_toeplitz(&mu, 0, Some(1.5), 1.0, &lat).unwrap();
    let b = thm54_hardy_toeplitz(&mu, 0, Some(1.5), 1.0, &lat).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.verdict, Verdict::Holds);
    assert_eq!(a.compactness, Some(Verdict::Holds));
    let mut c = a.clone();
    toeplitz_cross_check(&mut c, &mu, &Space::Hardy, 0, Some(1.5), &[64, 128, 256]).unwrap();
    assert!(c.cross_check.unwrap().agrees);
}
