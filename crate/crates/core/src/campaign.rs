//! Randomized property campaigns.
//!
//! A campaign runs every selected suite over `trials` random instances.
//! Trial `t` of suite `s` draws from stream `(t << 8) | s` of the seeded
//! generator, so results do not depend on thread count or on which other
//! suites were selected.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    aggregate_bounds, aggregate_corollary_bounds, aggregate_renormalized_bounds, equal_weight_bounds,
    johnson_robinson_bounds, relaxed_weighted_bounds, submatrix_bounds, thompson_bounds, tightest_bounds,
    weighted_window_bounds, BoundInterval, Window,
};
use crate::error::{Error, Result};
use crate::hierarchy::{hierarchy_check_all, nodal_check, szasz_check};
use crate::linalg::{
    delete_one, eigendecompose, eigenvalues, eigenvector_eigenvalue_identity_residual, interlacing_violation,
    HermitianMatrix, Spectrum,
};
use crate::majorization::{build_star_vectors, build_transport, majorizes, DOUBLY_STOCHASTIC_TOL};
use crate::random::{generate, secular_problem, stream, RandomModel, Stream};
use crate::secular::solve_secular;

pub const SCHEMA_VERSION: &str = "1";
pub const MAX_DIM: usize = 64;
const MAX_RECORDED_FAILURES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Interlacing,
    Thompson,
    Weighted,
    Aggregate,
    Corollary,
    Transport,
    Stars,
    Hierarchy,
    Szasz,
    Identity,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Interlacing,
        Suite::Thompson,
        Suite::Weighted,
        Suite::Aggregate,
        Suite::Corollary,
        Suite::Transport,
        Suite::Stars,
        Suite::Hierarchy,
        Suite::Szasz,
        Suite::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Interlacing => "interlacing",
            Suite::Thompson => "thompson",
            Suite::Weighted => "weighted",
            Suite::Aggregate => "aggregate",
            Suite::Corollary => "corollary",
            Suite::Transport => "transport",
            Suite::Stars => "stars",
            Suite::Hierarchy => "hierarchy",
            Suite::Szasz => "szasz",
            Suite::Identity => "identity",
        }
    }

    pub fn from_name(name: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown suite `{name}`")))
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).unwrap() as u64
    }

    /// Relative tolerance; each suite multiplies it by its own scale.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Interlacing | Suite::Transport | Suite::Stars | Suite::Szasz => 1e-9,
            _ => 1e-8,
        }
    }

    /// Largest dimension the suite will run at; larger draws are clamped.
    pub fn n_cap(self) -> usize {
        match self {
            Suite::Hierarchy => 8,
            Suite::Szasz => 10,
            Suite::Transport => 12,
            _ => MAX_DIM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    pub trials: usize,
    pub n_range: [usize; 2],
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub tolerance_overrides: BTreeMap<Suite, f64>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 0,
            trials: 200,
            n_range: [2, 6],
            suites: Suite::ALL.to_vec(),
            tolerance_overrides: BTreeMap::new(),
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let [lo, hi] = self.n_range;
        if lo < 2 || lo > hi || hi > MAX_DIM {
            return Err(Error::Config(format!(
                "n_range [{lo}, {hi}] must satisfy 2 <= min <= max <= {MAX_DIM}"
            )));
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        for (s, &t) in &self.tolerance_overrides {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!("tolerance for {} must be positive", s.name())));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, suite: Suite) -> f64 {
        self.tolerance_overrides
            .get(&suite)
            .copied()
            .unwrap_or(suite.default_tolerance())
    }
}

/// Running minimum of relative slacks for one trial.
struct Checks {
    tol: f64,
    worst: f64,
    failure: Option<String>,
}

impl Checks {
    fn new(tol: f64) -> Self {
        Checks {
            tol,
            worst: f64::INFINITY,
            failure: None,
        }
    }

    /// Records `slack / scale`; fails when it drops below `−tol`.
    fn slack(&mut self, slack: f64, scale: f64, what: impl FnOnce() -> String) {
        let rel = slack / scale.max(1.0);
        if rel < self.worst || rel.is_nan() {
            self.worst = if rel.is_nan() { f64::NEG_INFINITY } else { rel };
        }
        if (rel.is_nan() || rel < -self.tol) && self.failure.is_none() {
            self.failure = Some(format!("{}: relative slack {rel:e}", what()));
        }
    }

    fn interval(&mut self, iv: &BoundInterval, actual: f64, scale: f64, what: impl Fn() -> String) {
        self.slack(actual - iv.lower, scale, || format!("{} lower", what()));
        self.slack(iv.upper - actual, scale, || format!("{} upper", what()));
    }

    fn flag(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub n: usize,
    pub pass: bool,
    pub worst_relative_slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

fn hermitian_instance(trial: usize, rng: &mut Stream, n: usize) -> Result<HermitianMatrix> {
    let model = match trial % 4 {
        3 => RandomModel::Diagonal,
        _ => RandomModel::GaussianHermitian,
    };
    generate(&model, n, rng)
}

fn deleted_spectra(a: &HermitianMatrix) -> Result<Vec<Spectrum>> {
    (1..=a.dim()).map(|k| eigenvalues(&delete_one(a, k)?)).collect()
}

fn aggregate_actual(minors: &[Spectrum], w: Window) -> f64 {
    minors
        .iter()
        .map(|m| m.values()[w.ell - 1..w.r].iter().sum::<f64>())
        .sum()
}

fn run_interlacing(c: &mut Checks, trial: usize, rng: &mut Stream, n: usize) -> Result<()> {
    let a = hermitian_instance(trial, rng, n)?;
    let lambda = eigenvalues(&a)?;
    for (k, mu) in deleted_spectra(&a)?.iter().enumerate() {
        c.slack(-interlacing_violation(&lambda, mu), lambda.spread(), || {
            format!("k={}", k + 1)
        });
    }
    Ok(())
}

fn run_thompson(c: &mut Checks, trial: usize, rng: &mut Stream, n: usize) -> Result<()> {
    let a = hermitian_instance(trial, rng, n)?;
    let lambda = eigenvalues(&a)?;
    let minors = deleted_spectra(&a)?;
    let scale = n as f64 * lambda.spread();
    for j in 1..n {
        let col: Vec<f64> = minors.iter().map(|m| m.at(j)).collect();
        let total: f64 = col.iter().sum();
        c.interval(&thompson_bounds(&lambda, j)?, total, scale, || {
            format!("thompson j={j}")
        });
        let (max_lower, min_upper) = johnson_robinson_bounds(&lambda, j)?;
        let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = col.iter().copied().fold(f64::INFINITY, f64::min);
        c.slack(max - max_lower, lambda.spread(), || {
            format!("johnson-robinson max j={j}")
        });
        c.slack(min_upper - min, lambda.spread(), || {
            format!("johnson-robinson min j={j}")
        });
        let cor = aggregate_corollary_bounds(&lambda, Window::single(j, n)?)?;
        c.slack(cor.lower - n as f64 * max_lower, scale, || {
            format!("corollary vs johnson-robinson j={j}")
        });
    }
    let trace_gap = minors.iter().map(|m| m.values().iter().sum::<f64>()).sum::<f64>() - (n - 1) as f64 * a.trace();
    c.slack(-trace_gap.abs(), scale, || "trace identity".into());
    Ok(())
}

fn run_weighted(c: &mut Checks, trial: usize, rng: &mut Stream, n: usize) -> Result<()> {
    let equal = trial.is_multiple_of(3);
    let prob = secular_problem(n, rng, equal)?;
    let roots = solve_secular(&prob);
    let spread = prob.spread();
    let scale = n as f64 * spread;
    let lambda = Spectrum::new(prob.poles().to_vec());
    for w in Window::all(n) {
        let actual = roots.window_sum(w.ell, w.r);
        let main = weighted_window_bounds(&prob, w)?;
        let relaxed = relaxed_weighted_bounds(&prob, w)?;
        let tag = || format!("window ({}, {})", w.ell, w.r);
        c.interval(&main, actual, scale, || format!("weighted {}", tag()));
        c.interval(&relaxed, actual, scale, || format!("relaxed {}", tag()));
        c.slack(main.lower - relaxed.lower, scale, || {
            format!("weighted within relaxed lower {}", tag())
        });
        c.slack(relaxed.upper - main.upper, scale, || {
            format!("weighted within relaxed upper {}", tag())
        });
        if equal {
            c.interval(&equal_weight_bounds(&lambda, w)?, actual, scale, || {
                format!("equal weight {}", tag())
            });
        }
    }
    Ok(())
}

fn run_aggregate(c: &mut Checks, trial: usize, rng: &mut Stream, n: usize) -> Result<()> {
    let a = hermitian_instance(trial, rng, n)?;
    let decomp = eigendecompose(&a)?;
    let lambda = &decomp.spectrum;
    let minors = deleted_spectra(&a)?;
    let scale = n as f64 * lambda.spread();
    for w in Window::all(n) {
        let actual = aggregate_actual(&minors, w);
        let tag = || format!("window ({}, {})", w.ell, w.r);
        c.interval(&aggregate_bounds(lambda, w)?, actual, scale, || {
            format!("aggregate {}", tag())
        });
        match aggregate_renormalized_bounds(&decomp, w) {
            Ok(iv) => c.interval(&iv, actual, scale, || format!("renormalized {}", tag())),
            Err(Error::DegenerateTail(_)) => {}
            Err(e) => return Err(e),
        }
        for k in 1..=n {
            let mu = &minors[k - 1];
            let sum: f64 = mu.values()[w.ell - 1..w.r].iter().sum();
            match submatrix_bounds(&decomp, k, w) {
                Ok(iv) => c.interval(&iv, sum, scale, || format!("submatrix k={k} {}", tag())),
                Err(Error::DegenerateTail(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}

fn run_corollary(c: &mut Checks, trial: usize, rng: &mut Stream, n: usize) -> Result<()> {
    let a = hermitian_instance(trial, rng, n)?;
    let lambda = eigenvalues(&a)?;
    let minors = deleted_spectra(&a)?;
    let scale = n as f64 * lambda.spread();
    for w in Window::all(n) {
        let actual = aggregate_actual(&minors, w);
        let tag = || format!("window ({}, {})", w.ell, w.r);
        c.interval(&aggregate_corollary_bounds(&lambda, w)?, actual, scale, || {
            format!("corollary {}", tag())
        });
        c.interval(&tightest_bounds(&lambda, w)?, actual, scale, || {
            format!("tightest {}", tag())
        });
    }
    Ok(())
}

fn distinct_spectrum(rng: &mut Stream, n: usize) -> Spectrum {
    loop {
        let l = Spectrum::new((0..n).map(|_| crate::random::gaussian(rng)).collect());
        if l.min_gap() > 1e-6 * l.spread() {
            return l;
        }
    }
}

fn run_transport(c: &mut Checks, rng: &mut Stream, n: usize) -> Result<()> {
    let lambda = distinct_spectrum(rng, n);
    let (_, d) = build_transport(&lambda)?;
    let stars = build_star_vectors(&lambda)?;
    c.slack(d.min_entry() + 1e-12, 1.0, || "transport entry sign".into());
    c.slack(DOUBLY_STOCHASTIC_TOL - d.max_sum_deviation(), 1.0, || {
        "doubly stochastic sums".into()
    });
    let residual = d
        .apply(stars.lambda_star.values())
        .iter()
        .zip(stars.mu_star.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    c.slack(-residual, lambda.spread(), || "transport image".into());
    Ok(())
}

fn run_stars(c: &mut Checks, rng: &mut Stream, n: usize) -> Result<()> {
    let lambda = distinct_spectrum(rng, n);
    let s = build_star_vectors(&lambda)?;
    for (x, y, tag) in [
        (&s.lambda_star, &s.mu_star, "lambda* over mu*"),
        (&s.mu_star, &s.nu_star, "mu* over nu*"),
    ] {
        let scale = x.default_tolerance() / 1e-9;
        let rep = majorizes(x, y, c.tol * scale)?;
        c.slack(rep.min_gap, scale, || tag.into());
        c.slack(-rep.total_residual, scale, || format!("{tag} totals"));
    }
    Ok(())
}

fn run_hierarchy(c: &mut Checks, trial: usize, rng: &mut Stream, n: usize) -> Result<()> {
    let a = hermitian_instance(trial, rng, n)?;
    let spread = eigenvalues(&a)?.spread();
    for rep in hierarchy_check_all(&a)? {
        let scale = rep.length as f64 * spread;
        c.slack(rep.min_gap, scale, || format!("hierarchy k={} m={}", rep.k, rep.m));
        c.slack(-rep.total_residual, scale, || {
            format!("hierarchy total k={} m={}", rep.k, rep.m)
        });
    }
    let nodal = nodal_check(&a)?;
    let scale = n as f64 * spread;
    c.slack(nodal.min_node_gap, scale, || "nodal gap".into());
    c.slack(-nodal.final_residual, scale, || "nodal equality".into());
    Ok(())
}

fn run_szasz(c: &mut Checks, rng: &mut Stream, n: usize) -> Result<()> {
    let a = generate(&RandomModel::PsdGram, n, rng)?;
    let rep = szasz_check(&a)?;
    let logs = &rep.normalized_logs;
    for m in 1..=n {
        for k in 1..m {
            let (lhs, rhs) = (logs[m - 1], logs[k - 1]);
            if lhs == f64::NEG_INFINITY {
                continue;
            }
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            c.slack(rhs - lhs, scale, || format!("szasz k={k} m={m}"));
        }
    }
    Ok(())
}

fn run_identity(c: &mut Checks, rng: &mut Stream, n: usize) -> Result<()> {
    loop {
        let a = generate(&RandomModel::GaussianHermitian, n, rng)?;
        match eigenvector_eigenvalue_identity_residual(&a) {
            Ok(res) => {
                c.slack(-res, 1.0, || "eigenvector-eigenvalue identity".into());
                return Ok(());
            }
            Err(Error::DegenerateSpectrum { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Runs one trial of one suite.
pub fn run_trial(config: &CampaignConfig, suite: Suite, trial: usize) -> TrialOutcome {
    let mut rng = stream(config.seed, ((trial as u64) << 8) | suite.index());
    let [lo, hi] = config.n_range;
    let n = rng.gen_range(lo..=hi).min(suite.n_cap());
    let mut c = Checks::new(config.tolerance(suite));
    let res = match suite {
        Suite::Interlacing => run_interlacing(&mut c, trial, &mut rng, n),
        Suite::Thompson => run_thompson(&mut c, trial, &mut rng, n),
        Suite::Weighted => run_weighted(&mut c, trial, &mut rng, n),
        Suite::Aggregate => run_aggregate(&mut c, trial, &mut rng, n),
        Suite::Corollary => run_corollary(&mut c, trial, &mut rng, n),
        Suite::Transport => run_transport(&mut c, &mut rng, n),
        Suite::Stars => run_stars(&mut c, &mut rng, n),
        Suite::Hierarchy => run_hierarchy(&mut c, trial, &mut rng, n),
        Suite::Szasz => run_szasz(&mut c, &mut rng, n),
        Suite::Identity => run_identity(&mut c, &mut rng, n),
    };
    if let Err(e) = res {
        c.flag(false, || format!("error: {e}"));
    }
    TrialOutcome {
        trial,
        n,
        pass: c.failure.is_none(),
        worst_relative_slack: c.worst,
        failure: c.failure,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub tolerance: f64,
    pub n_cap: usize,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub worst_relative_slack: f64,
    pub failures: Vec<TrialOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub schema: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub n_range: [usize; 2],
    pub suites: Vec<SuiteSummary>,
    pub all_pass: bool,
    /// Only field that varies between identical runs.
    pub wall_time_s: f64,
}

impl CampaignReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with `wall_time_s` zeroed, for comparing runs.
    pub fn to_json_without_timing(&self) -> String {
        CampaignReport {
            wall_time_s: 0.0,
            ..self.clone()
        }
        .to_json()
    }
}

/// Thread count from `SPECBOUNDS_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("SPECBOUNDS_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
}

fn summarize(config: &CampaignConfig, suite: Suite) -> SuiteSummary {
    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, suite, t))
        .collect();
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let worst = outcomes
        .iter()
        .map(|o| o.worst_relative_slack)
        .fold(f64::INFINITY, f64::min);
    SuiteSummary {
        suite,
        tolerance: config.tolerance(suite),
        n_cap: suite.n_cap().min(config.n_range[1]),
        trials: outcomes.len(),
        passed,
        failed: outcomes.len() - passed,
        worst_relative_slack: worst,
        failures: outcomes
            .into_iter()
            .filter(|o| !o.pass)
            .take(MAX_RECORDED_FAILURES)
            .collect(),
    }
}

pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_cap() {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let summaries: Vec<SuiteSummary> = pool.install(|| suites.iter().map(|&s| summarize(config, s)).collect());
    Ok(CampaignReport {
        schema: SCHEMA_VERSION,
        seed: config.seed,
        trials: config.trials,
        n_range: config.n_range,
        all_pass: summaries.iter().all(|s| s.failed == 0),
        suites: summaries,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(suites: &[Suite], trials: usize, n_range: [usize; 2]) -> CampaignConfig {
        CampaignConfig {
            seed: 42,
            trials,
            n_range,
            suites: suites.to_vec(),
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(CampaignConfig::default().validate().is_ok());
        assert!(matches!(config(&[], 10, [2, 6]).validate(), Err(Error::Config(_))));
        assert!(config(&[Suite::Stars], 0, [2, 6]).validate().is_err());
        assert!(config(&[Suite::Stars], 1, [1, 6]).validate().is_err());
        assert!(config(&[Suite::Stars], 1, [5, 4]).validate().is_err());
        assert!(config(&[Suite::Stars], 1, [2, 65]).validate().is_err());
        assert_eq!(Suite::from_name("szasz").unwrap(), Suite::Szasz);
        assert!(Suite::from_name("nope").is_err());
    }

    #[test]
    fn interlacing_campaign_passes() {
        let r = run_campaign(&config(&[Suite::Interlacing], 100, [2, 6])).unwrap();
        assert!(r.all_pass);
        assert_eq!((r.suites[0].passed, r.suites[0].trials), (100, 100));
    }

    #[test]
    fn every_suite_passes_small() {
        let r = run_campaign(&config(&Suite::ALL, 12, [2, 5])).unwrap();
        for s in &r.suites {
            assert_eq!(s.failed, 0, "{:?}", s);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let c = config(&[Suite::Weighted, Suite::Thompson], 20, [2, 6]);
        let a = run_campaign(&c).unwrap().to_json_without_timing();
        let b = run_campaign(&c).unwrap().to_json_without_timing();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": \"1\""));
    }

    #[test]
    fn trial_streams_ignore_suite_selection() {
        let c = config(&[Suite::Stars], 5, [2, 8]);
        let alone = run_trial(&c, Suite::Stars, 3);
        let both = run_trial(&config(&[Suite::Stars, Suite::Szasz], 5, [2, 8]), Suite::Stars, 3);
        assert_eq!(alone, both);
    }

    #[test]
    fn checks_track_worst_and_first_failure() {
        let mut c = Checks::new(1e-9);
        c.slack(0.5, 2.0, || "a".into());
        c.slack(-1e-12, 1.0, || "b".into());
        assert!(c.failure.is_none());
        c.slack(-3.0, 10.0, || "c".into());
        c.slack(-5.0, 1.0, || "d".into());
        assert_eq!(c.worst, -5.0);
        assert!(c.failure.unwrap().starts_with("c:"));
        let mut c = Checks::new(1e-9);
        c.slack(f64::NAN, 1.0, || "nan".into());
        assert!(c.failure.is_some());
    }
}
