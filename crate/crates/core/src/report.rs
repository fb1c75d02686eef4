//! Single-case verification pipeline and report encoding.
//!
//! classify -> integrate -> functionals -> predicted law -> ratio series ->
//! limit estimate (+ intermediate limits) -> optional oracle check.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::asymptotics::{classify, predicted_law, snap_alpha, ConstantSpec, LawForm, LawInputs, RegimeTag};
use crate::error::{Error, Result};
use crate::extraction::{
    estimate_limit, intermediate_limits, ratio_series, tail_integral, FitModel, FunctionalValues, IntermediateLimit,
    LimitEstimate, Weight,
};
use crate::integrator::{integrate, integrate_linear_renormalized, IntegratorControls, StepStats, Trajectory};
use crate::oracle::{compare, picard_solve, OracleAgreement, PicardConfig};
use crate::problem::{OriginData, Problem};
use crate::scalar::Real;

pub const SCHEMA_VERSION: u32 = 1;
/// Intermediate limits in the log-critical regimes.
pub const INTERMEDIATE_BAND: f64 = 0.05;
/// Oracle agreement: `sup |u_oracle - u| <= band (1 + sup u)`.
pub const ORACLE_BAND: f64 = 1e-8;
/// Oracle comparison interval `[0, ORACLE_RADIUS]`.
pub const ORACLE_RADIUS: f64 = 5.0;

pub const CSV_HEADER: [&str; 12] = [
    "n",
    "alpha",
    "regime",
    "law_form",
    "predicted_constant",
    "estimated_constant",
    "rel_error",
    "band",
    "pass_fail",
    "termination",
    "rmax",
    "seconds",
];

/// One verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec<T> {
    pub problem: Problem<T>,
    pub origin: OriginData<T>,
    /// Defaults to [`default_rmax`].
    pub rmax: Option<T>,
    pub rel_tol: Option<T>,
    pub abs_tol: Option<T>,
    /// `None` picks among [`default_models`] by smallest window spread.
    pub fit: Option<FitModel>,
    pub oracle: bool,
}

impl<T: Real> CaseSpec<T> {
    pub fn new(problem: Problem<T>, origin: OriginData<T>) -> Self {
        Self { problem, origin, rmax: None, rel_tol: None, abs_tol: None, fit: None, oracle: false }
    }
}

/// Integration range used when none is given.
pub fn default_rmax<T: Real>(n: usize, alpha: T) -> T {
    T::lit(match classify(n, alpha).tag {
        RegimeTag::ExpGrowth => 3000.0,
        RegimeTag::PowerLaw => 1e7,
        RegimeTag::SolutionDependent if n != 2 => 1e5,
        _ => 1e6,
    })
}

/// Relative tolerance band for the headline constant.
pub fn band<T: Real>(n: usize, alpha: T) -> T {
    T::lit(match classify(n, alpha).tag {
        RegimeTag::ExpGrowth => 1e-6,
        RegimeTag::PowerLaw => 1e-3,
        RegimeTag::SolutionDependent if n == 2 => 0.02,
        RegimeTag::SolutionDependent => 1e-3,
        _ => 0.10,
    })
}

/// Fit models tried when none is requested.
pub fn default_models(n: usize, tag: RegimeTag) -> &'static [FitModel] {
    match tag {
        RegimeTag::LogCritical => &[FitModel::InverseLogFit],
        RegimeTag::SolutionDependent if n == 2 => &[FitModel::InverseLogFit],
        _ => &[FitModel::PowerCorrectionFit, FitModel::AitkenAccel, FitModel::LastValue],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    VerificationFailed,
    IntegrationFailed,
    Refused,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Verified => 0,
            Verdict::VerificationFailed => 1,
            Verdict::Refused => 2,
            Verdict::IntegrationFailed => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Verified => "pass",
            Verdict::VerificationFailed => "fail",
            Verdict::IntegrationFailed => "integration_failure",
            Verdict::Refused => "refused",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Verdict::Verified, Verdict::VerificationFailed, Verdict::IntegrationFailed, Verdict::Refused]
            .into_iter()
            .find(|v| v.label() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawSummary<T> {
    pub form: LawForm<T>,
    pub label: String,
    pub constant: T,
    pub constant_source: ConstantSpec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TerminationSummary<T> {
    pub kind: &'static str,
    pub radius: Option<T>,
}

/// Properties every positive solution with `alpha < 1` has: `Δu` is
/// nondecreasing and eventually positive, `u` grows at least like `r^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaLemmaCheck<T> {
    /// Largest drop `(Δu_i - Δu_{i+1}) / max(|Δu_i|, |Δu_{i+1}|)`.
    pub max_relative_decrease: T,
    pub allowed_decrease: T,
    pub min_lap_final_decade: T,
    pub min_u_over_r2_final_decade: T,
    pub holds: bool,
}

pub fn gamma_lemma_check<T: Real>(traj: &Trajectory<T>) -> GammaLemmaCheck<T> {
    let allowed = T::lit(10.0) * traj.controls.rel_tol;
    let mut drop = T::zero();
    for w in traj.samples.windows(2) {
        let scale = w[0].v.abs().max(w[1].v.abs());
        if scale > T::zero() {
            drop = drop.max((w[0].v - w[1].v) / scale);
        }
    }
    let r_last = traj.last().r;
    let tail = traj.samples.iter().filter(|s| s.r >= r_last / T::lit(10.0));
    let min_lap = tail.clone().fold(T::infinity(), |m, s| m.min(s.v));
    let min_ratio = tail.fold(T::infinity(), |m, s| m.min(s.u / (s.r * s.r)));
    GammaLemmaCheck {
        max_relative_decrease: drop,
        allowed_decrease: allowed,
        min_lap_final_decade: min_lap,
        min_u_over_r2_final_decade: min_ratio,
        holds: drop <= allowed && min_lap > T::zero() && min_ratio > T::zero(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOutcome<T> {
    pub agreement: Option<OracleAgreement<T>>,
    pub band: T,
    pub passed: bool,
    pub error: Option<String>,
}

/// Oracle versus integrator on `[0, min(rmax, ORACLE_RADIUS)]`.
pub fn oracle_check<T: Real>(
    problem: &Problem<T>,
    origin: &OriginData<T>,
    rmax: T,
    rel_tol: T,
    abs_tol: T,
) -> OracleOutcome<T> {
    let radius = rmax.min(T::lit(ORACLE_RADIUS));
    let band = T::lit(ORACLE_BAND);
    let run = || -> Result<OracleAgreement<T>> {
        let solution = picard_solve(problem, origin, &PicardConfig::new(radius))?;
        let controls = IntegratorControls::new(solution.radius)
            .with_tolerances(rel_tol, abs_tol)
            .with_extra_radii(solution.radii());
        let traj = integrate(problem, origin, &controls)?;
        compare(&solution, &traj, radius)
    };
    match run() {
        Ok(a) => OracleOutcome { passed: a.scaled_difference <= band, agreement: Some(a), band, error: None },
        Err(e) => OracleOutcome { agreement: None, band, passed: false, error: Some(e.to_string()) },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport<T> {
    pub problem: Problem<T>,
    pub origin: OriginData<T>,
    pub regime: RegimeTag,
    pub law: Option<LawSummary<T>>,
    pub fit_model: Option<FitModel>,
    pub headline: Option<LimitEstimate<T>>,
    pub estimated_constant: Option<T>,
    pub rel_error: Option<T>,
    pub band: Option<T>,
    pub intermediates: Vec<IntermediateLimit<T>>,
    pub intermediate_band: Option<T>,
    pub functionals: Option<FunctionalValues<T>>,
    pub oracle: Option<OracleOutcome<T>>,
    pub gamma_lemma: Option<GammaLemmaCheck<T>>,
    pub termination: Option<TerminationSummary<T>>,
    pub rmax: Option<T>,
    pub rel_tol: Option<T>,
    pub abs_tol: Option<T>,
    pub steps: Option<StepStats>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl<T: Real> CaseReport<T> {
    fn empty(problem: Problem<T>, origin: OriginData<T>, regime: RegimeTag, verdict: Verdict) -> Self {
        Self {
            problem,
            origin,
            regime,
            law: None,
            fit_model: None,
            headline: None,
            estimated_constant: None,
            rel_error: None,
            band: None,
            intermediates: Vec::new(),
            intermediate_band: None,
            functionals: None,
            oracle: None,
            gamma_lemma: None,
            termination: None,
            rmax: None,
            rel_tol: None,
            abs_tol: None,
            steps: None,
            verdict,
            notes: Vec::new(),
            seconds: 0.0,
        }
    }

    /// Row for a case the pipeline refused to run.
    pub fn refused(problem: Problem<T>, origin: OriginData<T>, error: &Error) -> Self {
        let mut r = Self::empty(problem, origin, classify(problem.n, problem.alpha).tag, Verdict::Refused);
        r.notes.push(error.to_string());
        r
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }
}

/// Report plus the data behind it.
#[derive(Debug, Clone)]
pub struct CaseRun<T> {
    pub report: CaseReport<T>,
    /// `(r, u/f)` along the trajectory; empty if the law is unavailable.
    pub ratios: Vec<(T, T)>,
    pub trajectory: Trajectory<T>,
}

/// Estimate with `model`, or the candidate with the smallest window spread.
pub fn choose_estimate<T: Real>(series: &[(T, T)], model: Option<FitModel>, candidates: &[FitModel]) -> Result<LimitEstimate<T>> {
    if let Some(m) = model {
        return estimate_limit(series, m);
    }
    let mut best: Option<LimitEstimate<T>> = None;
    let mut first_err = None;
    for &m in candidates {
        match estimate_limit(series, m) {
            Ok(e) if e.value.is_finite() && best.as_ref().map_or(true, |b| e.uncertainty < b.uncertainty) => best = Some(e),
            Ok(_) => {}
            Err(err) => {
                first_err.get_or_insert(err);
            }
        }
    }
    best.ok_or_else(|| first_err.unwrap_or(Error::DegenerateFit("no candidate model")))
}

/// Runs the pipeline. `Err` is reserved for refusals and invalid input;
/// integration and verification failures are reported in the verdict.
pub fn run_case<T: Real>(spec: &CaseSpec<T>) -> Result<CaseRun<T>> {
    let start = Instant::now();
    let problem = snap_alpha(&spec.problem);
    let (n, alpha) = (problem.n, problem.alpha);
    let regime = classify(n, alpha);
    if regime.tag.is_catalog_only() || alpha > T::one() {
        return Err(Error::CatalogOnly { alpha: alpha.as_f64(), regime: regime.tag.name() });
    }
    let origin = OriginData::new(spec.origin.u0, spec.origin.lap0)?;
    let rmax = spec.rmax.unwrap_or_else(|| default_rmax(n, alpha));
    let mut controls = IntegratorControls::new(rmax);
    let rel_tol = spec.rel_tol.unwrap_or(controls.rel_tol);
    let abs_tol = spec.abs_tol.unwrap_or(rel_tol * T::lit(1e-3));
    controls = controls.with_tolerances(rel_tol, abs_tol);

    let traj = if regime.tag == RegimeTag::ExpGrowth {
        integrate_linear_renormalized(n, &origin, &controls)?
    } else {
        integrate(&problem, &origin, &controls)?
    };

    let mut report = CaseReport::empty(problem, origin, regime.tag, Verdict::Verified);
    report.rmax = Some(rmax);
    report.rel_tol = Some(rel_tol);
    report.abs_tol = Some(abs_tol);
    report.steps = Some(traj.stats);
    report.band = Some(band(n, alpha));
    report.termination = Some(TerminationSummary { kind: traj.termination.label(), radius: traj.termination.stop_radius() });
    let mut ratios = Vec::new();
    let mut ok = true;

    if !traj.reached_rmax() {
        report.verdict = Verdict::IntegrationFailed;
        report.notes.push(format!("integration stopped early: {}", traj.termination.label()));
    } else {
        let mut inputs = LawInputs { u0: Some(origin.u0), lap0: Some(origin.lap0), ..Default::default() };
        if regime.tag == RegimeTag::SolutionDependent {
            let weight = if n == 1 { Weight::Plain } else { Weight::TimesT };
            match tail_integral(&traj, weight) {
                Ok(f) => {
                    inputs.d = f.d;
                    inputs.n_integral = f.n;
                    report.functionals = Some(f);
                }
                Err(e) => report.notes.push(format!("functional: {e}")),
            }
        }
        if alpha < T::one() {
            let g = gamma_lemma_check(&traj);
            ok &= g.holds;
            report.gamma_lemma = Some(g);
        }
        match predicted_law(&problem, Some(&inputs)) {
            Ok(law) => {
                report.law = Some(LawSummary {
                    form: law.form,
                    label: law.form.label(),
                    constant: law.constant,
                    constant_source: law.source.clone(),
                });
                match ratio_series(&traj, &law).and_then(|s| {
                    let e = choose_estimate(&s, spec.fit, default_models(n, regime.tag))?;
                    Ok((s, e))
                }) {
                    Ok((s, e)) => {
                        let rel = (e.value - T::one()).abs();
                        ok &= rel <= band(n, alpha);
                        report.estimated_constant = Some(law.constant * e.value);
                        report.rel_error = Some(rel);
                        report.fit_model = Some(e.model);
                        report.headline = Some(e);
                        ratios = s;
                    }
                    Err(e) => {
                        ok = false;
                        report.notes.push(format!("headline: {e}"));
                    }
                }
            }
            Err(e) => {
                ok = false;
                report.notes.push(format!("law: {e}"));
            }
        }
        if regime.tag == RegimeTag::LogCritical {
            let model = spec.fit.unwrap_or(FitModel::InverseLogFit);
            report.intermediate_band = Some(T::lit(INTERMEDIATE_BAND));
            match intermediate_limits(&traj, model) {
                Ok(list) => {
                    ok &= list.iter().all(|l| l.rel_error <= T::lit(INTERMEDIATE_BAND));
                    report.intermediates = list;
                }
                Err(e) => {
                    ok = false;
                    report.notes.push(format!("intermediate limits: {e}"));
                }
            }
        }
        if !ok {
            report.verdict = Verdict::VerificationFailed;
        }
    }

    if spec.oracle {
        let o = oracle_check(&problem, &origin, rmax, rel_tol, abs_tol);
        if !o.passed && report.verdict == Verdict::Verified {
            report.verdict = Verdict::VerificationFailed;
        }
        report.oracle = Some(o);
    }
    report.seconds = start.elapsed().as_secs_f64();
    Ok(CaseRun { report, ratios, trajectory: traj })
}

/// Writes a JSON value with every non-integer number as 17 significant
/// digits.
pub fn write_json(value: &Value, pretty: bool) -> String {
    let mut out = String::new();
    emit(value, pretty, 0, &mut out);
    out
}

fn emit(value: &Value, pretty: bool, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| {
        if pretty {
            out.push('\n');
            out.push_str(&"  ".repeat(d));
        }
    };
    match value {
        Value::Number(x) if x.is_f64() => out.push_str(&format_real(x.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) if !items.is_empty() => {
            out.push('[');
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                pad(depth + 1, out);
                emit(v, pretty, depth + 1, out);
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push('{');
            for (i, (k, v)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                pad(depth + 1, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(if pretty { ": " } else { ":" });
                emit(v, pretty, depth + 1, out);
            }
            pad(depth, out);
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// `{:.16e}`; non-finite values become `null`.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn tagged<S: Serialize>(body: &S, key: Option<&str>) -> Value {
    let inner = serde_json::to_value(body).expect("reports serialize");
    let mut map = match (key, inner) {
        (None, Value::Object(m)) => m,
        (Some(k), v) => {
            let mut m = serde_json::Map::new();
            m.insert(k.into(), v);
            m
        }
        (None, v) => {
            let mut m = serde_json::Map::new();
            m.insert("report".into(), v);
            m
        }
    };
    map.insert("schema".into(), Value::from(SCHEMA_VERSION));
    Value::Object(map)
}

/// Single report with the top-level `schema` field.
pub fn report_json<T: Real>(report: &CaseReport<T>) -> String {
    write_json(&tagged(report, None), true)
}

/// Sweep reports under `reports`.
pub fn sweep_json<T: Real>(reports: &[CaseReport<T>]) -> String {
    write_json(&tagged(&reports, Some("reports")), true)
}

fn opt<T: Real>(x: Option<T>) -> String {
    x.map(|v| format_real(v.as_f64())).unwrap_or_default()
}

/// One CSV row per report under [`CSV_HEADER`].
pub fn reports_csv<T: Real>(reports: &[CaseReport<T>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        w.write_record([
            r.problem.n.to_string(),
            format_real(r.problem.alpha.as_f64()),
            r.regime.name().to_string(),
            r.law.as_ref().map(|l| l.label.clone()).unwrap_or_default(),
            opt(r.law.as_ref().map(|l| l.constant)),
            opt(r.estimated_constant),
            opt(r.rel_error),
            opt(r.band),
            r.verdict.label().to_string(),
            r.termination.map(|t| t.kind.to_string()).unwrap_or_default(),
            opt(r.rmax),
            format_real(r.seconds),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Plot-ready `r,ratio` table.
pub fn ratio_table_csv<T: Real>(ratios: &[(T, T)]) -> String {
    let mut out = String::from("r,ratio\n");
    for (r, q) in ratios {
        out.push_str(&format!("{},{}\n", format_real(r.as_f64()), format_real(q.as_f64())));
    }
    out
}
