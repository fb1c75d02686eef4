use biharmonic::extraction::{tail_integral, Weight};
use biharmonic::integrator::{integrate, IntegratorControls};
use biharmonic::oracle::{compare, picard_solve, PicardConfig};
use biharmonic::report::{report_json, reports_csv, run_case, sweep_json, CaseSpec, Verdict, CSV_HEADER};
use biharmonic::sweep::{run_sweep, SweepConfig};
use biharmonic::{OriginData, Problem};
use serde_json::Value;

fn spec(n: usize, alpha: f64, u0: f64, lap0: f64, rmax: Option<f64>) -> CaseSpec<f64> {
    let mut s = CaseSpec::new(Problem::new(n, alpha).unwrap(), OriginData::new(u0, lap0).unwrap());
    s.rmax = rmax;
    s
}

#[test]
fn oracle_matches_integrator_on_mixed_cells() {
    for (n, alpha, lap0) in [(1, 0.5, 0.5), (2, -1.0, 0.0), (3, 0.25, -0.1), (4, 1.0, 0.5), (7, -3.0, 1.0)] {
        let p = Problem::new(n, alpha).unwrap();
        let o = OriginData::new(1.0, lap0).unwrap();
        let sol = picard_solve(&p, &o, &PicardConfig::new(4.0)).unwrap();
        let controls = IntegratorControls::new(4.0).with_extra_radii(sol.radii());
        let traj = integrate(&p, &o, &controls).unwrap();
        let a = compare(&sol, &traj, 4.0).unwrap();
        assert_eq!(a.halvings, 0);
        assert!(a.scaled_difference < 1e-8, "n={n} alpha={alpha}: {}", a.scaled_difference);
    }
}

#[test]
fn oracle_flag_is_reported() {
    let mut s = spec(3, 0.0, 1.0, 0.0, Some(10.0));
    s.oracle = true;
    let r = run_case(&s).unwrap().report;
    let o = r.oracle.expect("oracle outcome");
    assert!(o.passed, "{:?}", o.error);
    assert_eq!(r.verdict, Verdict::Verified);
}

#[test]
fn solution_dependent_example_verifies() {
    let r = run_case(&spec(3, -2.0, 1.0, 0.5, Some(1e5))).unwrap().report;
    assert_eq!(r.verdict, Verdict::Verified);
    let d = r.functionals.as_ref().and_then(|f| f.d).unwrap();
    let c = r.law.as_ref().unwrap().constant;
    assert!((c - (0.5 + d) / 6.0).abs() < 1e-14 * c);
}

#[test]
fn json_is_deterministic_apart_from_timing() {
    let strip = |s: &str| -> Value {
        let mut v: Value = serde_json::from_str(s).unwrap();
        v.as_object_mut().unwrap().remove("seconds");
        v
    };
    let s = spec(2, 0.5, 1.0, 0.5, Some(1e4));
    let a = report_json(&run_case(&s).unwrap().report);
    let b = report_json(&run_case(&s).unwrap().report);
    assert_eq!(strip(&a), strip(&b));
    let v = strip(&a);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "verified");
}

#[test]
fn csv_and_json_agree() {
    let cfg = SweepConfig::<f64>::parse("n = 1\nn = 3\nalpha = 0\nalpha = 0.5\nrmax = 1e4\ncase = 3 2\n").unwrap();
    let reports = run_sweep(&cfg, 3).unwrap();
    let csv_text = reports_csv(&reports).unwrap();
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let json: Value = serde_json::from_str(&sweep_json(&reports)).unwrap();
    let list = json["reports"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(list.len(), 5);
    for (row, (rep, j)) in rows.iter().zip(reports.iter().zip(list)) {
        assert_eq!(row[0].parse::<usize>().unwrap(), rep.problem.n);
        assert_eq!(&row[8], rep.verdict.label());
        if let Some(c) = rep.estimated_constant {
            // 17 significant digits survive the text round trip
            assert_eq!(row[5].parse::<f64>().unwrap(), c);
            assert_eq!(j["estimated_constant"].as_f64().unwrap(), c);
        }
    }
    assert_eq!(&rows[4][8], "refused");
}

#[test]
fn power_law_sweep_meets_band() {
    let cfg = SweepConfig::<f64>::parse("n = 1\nn = 2\nn = 3\nn = 5\nalpha = -0.5\nalpha = 0\nalpha = 0.5\nlap0 = 0.5\n").unwrap();
    let reports = run_sweep(&cfg, 4).unwrap();
    assert_eq!(reports.len(), 12);
    for r in &reports {
        let e = r.rel_error.unwrap();
        assert!(e <= 1e-3, "n={} alpha={}: {e}", r.problem.n, r.problem.alpha);
    }
}

#[test]
fn tail_completion_is_stable_under_truncation() {
    for (n, alpha, weight) in [(3, -2.0, Weight::TimesT), (1, -1.0, Weight::Plain), (4, -3.0, Weight::TimesT)] {
        let p = Problem::new(n, alpha).unwrap();
        let o = OriginData::<f64>::new(1.0, 0.5).unwrap();
        let full = tail_integral(&integrate(&p, &o, &IntegratorControls::new(1e5)).unwrap(), weight).unwrap();
        let half = tail_integral(&integrate(&p, &o, &IntegratorControls::new(5e4)).unwrap(), weight).unwrap();
        let (a, b) = (full.value(), half.value());
        assert!(a > 0.0 && b > 0.0);
        let allowed = 3.0 * full.error_estimate.max(half.error_estimate) + 1e-12 * a;
        assert!((a - b).abs() <= allowed, "n={n}: {a} vs {b}, allowed {allowed}");
    }
}

#[test]
fn generic_over_f32() {
    let p = Problem::<f32>::new(3, 0.0).unwrap();
    let o = OriginData::<f32>::new(1.0, 0.0).unwrap();
    let traj = integrate(&p, &o, &IntegratorControls::new(10.0f32)).unwrap();
    let u = traj.last().u;
    let exact = 1.0 + 1e4 / 120.0;
    assert!(((u - exact) / exact).abs() < 1e-4, "{u}");
}
