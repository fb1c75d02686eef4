//! `(n, alpha)` sweeps from a flat `key = value` config.
//!
//! ```text
//! # cross product of every n with every alpha
//! n = 1
//! n = 3
//! alpha = -1/3
//! alpha = 0.5
//! u0 = 1
//! lap0 = 0.5
//! rmax = 1e4        # optional, per-regime default otherwise
//! rel_tol = 1e-12
//! fit = power       # last | invlog | power | aitken
//! oracle = true
//! # extra cells: n alpha [u0 lap0 [rmax]]
//! case = 2 -1 1 0 1e6
//! ```

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extraction::FitModel;
use crate::problem::{OriginData, Problem};
use crate::report::{run_case, CaseReport, CaseSpec};
use crate::scalar::Real;

/// Parses a real, accepting `p/q` fractions such as `-1/3`.
pub fn parse_real<T: Real>(s: &str) -> Option<T> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?,
        None => s.parse::<f64>().ok()?,
    };
    v.is_finite().then(|| T::from_f64(v)).flatten()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig<T> {
    pub ns: Vec<usize>,
    pub alphas: Vec<T>,
    pub u0: T,
    pub lap0: T,
    pub rmax: Option<T>,
    pub rel_tol: Option<T>,
    pub abs_tol: Option<T>,
    pub fit: Option<FitModel>,
    pub oracle: bool,
    /// Explicit cells appended after the cross product.
    pub cases: Vec<CaseSpec<T>>,
}

impl<T: Real> SweepConfig<T> {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = SweepConfig {
            ns: Vec::new(),
            alphas: Vec::new(),
            u0: T::one(),
            lap0: T::zero(),
            rmax: None,
            rel_tol: None,
            abs_tol: None,
            fit: None,
            oracle: false,
            cases: Vec::new(),
        };
        let mut raw_cases = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Config(format!("line {}: {what}: {line}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let real = || parse_real::<T>(value).ok_or_else(|| bad("not a number"));
            match key {
                "n" => c.ns.push(value.parse().ok().filter(|&n: &usize| n >= 1).ok_or_else(|| bad("n must be >= 1"))?),
                "alpha" => c.alphas.push(real()?),
                "u0" => c.u0 = real()?,
                "lap0" => c.lap0 = real()?,
                "rmax" => c.rmax = Some(real()?),
                "rel_tol" => c.rel_tol = Some(real()?),
                "abs_tol" => c.abs_tol = Some(real()?),
                "fit" => c.fit = Some(FitModel::parse(value).ok_or_else(|| bad("unknown fit model"))?),
                "oracle" => c.oracle = value.parse().map_err(|_| bad("expected true or false"))?,
                "case" => raw_cases.push((lineno + 1, value.to_string())),
                _ => return Err(bad("unknown key")),
            }
        }
        for (lineno, value) in raw_cases {
            let f: Vec<&str> = value.split_whitespace().collect();
            let bad = || Error::Config(format!("line {lineno}: case needs `n alpha [u0 lap0 [rmax]]`: {value}"));
            if !matches!(f.len(), 2 | 4 | 5) {
                return Err(bad());
            }
            let n: usize = f[0].parse().map_err(|_| bad())?;
            let num = |i: usize| parse_real::<T>(f[i]).ok_or_else(bad);
            let alpha = num(1)?;
            let (u0, lap0) = if f.len() >= 4 { (num(2)?, num(3)?) } else { (c.u0, c.lap0) };
            let mut spec = CaseSpec::new(Problem::new(n, alpha)?, OriginData::new(u0, lap0)?);
            spec.rmax = if f.len() == 5 { Some(num(4)?) } else { c.rmax };
            c.cases.push(c.apply(spec));
        }
        if c.cases.is_empty() && c.alphas.is_empty() {
            return Err(Error::Config("empty alpha list".into()));
        }
        if c.cases.is_empty() && c.ns.is_empty() {
            return Err(Error::Config("empty n list".into()));
        }
        Ok(c)
    }

    fn apply(&self, mut spec: CaseSpec<T>) -> CaseSpec<T> {
        spec.rel_tol = self.rel_tol;
        spec.abs_tol = self.abs_tol;
        spec.fit = self.fit;
        spec.oracle = self.oracle;
        spec
    }

    /// Cases in config order: the `n`-major cross product, then `case` lines.
    pub fn specs(&self) -> Result<Vec<CaseSpec<T>>> {
        let origin = OriginData::new(self.u0, self.lap0)?;
        let mut out = Vec::new();
        for &n in &self.ns {
            for &alpha in &self.alphas {
                let mut spec = self.apply(CaseSpec::new(Problem::new(n, alpha)?, origin));
                spec.rmax = self.rmax;
                out.push(spec);
            }
        }
        out.extend(self.cases.iter().cloned());
        Ok(out)
    }
}

/// Runs every case on `jobs` worker threads; reports come back in config
/// order. Refused cases become `refused` rows.
pub fn run_sweep<T: Real>(config: &SweepConfig<T>, jobs: usize) -> Result<Vec<CaseReport<T>>> {
    let specs = config.specs()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| {
        specs
            .par_iter()
            .map(|s| match run_case(s) {
                Ok(run) => run.report,
                Err(e) => CaseReport::refused(s.problem, s.origin, &e),
            })
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    #[test]
    fn fractions_parse() {
        assert_eq!(parse_real::<f64>("-1/3"), Some(-1.0 / 3.0));
        assert_eq!(parse_real::<f64>(" 1e4 "), Some(1e4));
        assert_eq!(parse_real::<f64>("1/0"), None);
        assert_eq!(parse_real::<f64>("x"), None);
    }

    #[test]
    fn config_order_is_n_major_then_cases() {
        let c = SweepConfig::<f64>::parse("n = 1\nn = 3\nalpha = 0\nalpha = 0.5 # comment\ncase = 2 -1 1 0 1e6\n").unwrap();
        let order: Vec<(usize, f64)> = c.specs().unwrap().iter().map(|s| (s.problem.n, s.problem.alpha)).collect();
        assert_eq!(order, vec![(1, 0.0), (1, 0.5), (3, 0.0), (3, 0.5), (2, -1.0)]);
        assert_eq!(c.cases[0].rmax, Some(1e6));
    }

    #[test]
    fn bad_configs_are_rejected() {
        for text in ["n = 3\n", "alpha = 0\n", "n = 3\nalpha = 0\nbogus = 1\n", "n = 0\nalpha = 0\n", "case = 3\n", "n = 3\nalpha = q\n"] {
            assert!(matches!(SweepConfig::<f64>::parse(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn refused_cells_are_marked() {
        let c = SweepConfig::<f64>::parse("n = 3\nalpha = 0\nalpha = 1.5\nrmax = 10\n").unwrap();
        let r = run_sweep(&c, 2).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].verdict, Verdict::Verified);
        assert_eq!(r[1].verdict, Verdict::Refused);
    }
}
