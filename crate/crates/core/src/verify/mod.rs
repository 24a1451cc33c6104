//! Randomized property harness over grids of factor dimensions.
//!
//! Every suite draws its instances from a per-trial seed derived from the
//! configuration seed, the suite, the cell `(m, n)` and the trial index, so a
//! report is a pure function of its [`SuiteConfig`] and any trial can be
//! rerun alone with [`replay`]. Defects are largest entrywise deviations
//! unless a suite says otherwise.

mod suites;
mod trace;

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};

pub use suites::{GEKAD_MAX_TOTAL_DIM, GEKAD_TRIALS, ISOMETRY_GENERAL_MAX_DIM, ISOMETRY_GENERAL_TRIALS};
pub use trace::{Trace, TraceValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Aac,
    Agree,
    Mult,
    Isometry,
    Commute,
    Module,
    Slices,
    Kompa,
    Wittstock,
    Cp,
    Gekad,
    Uniq,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Aac,
        Suite::Agree,
        Suite::Mult,
        Suite::Isometry,
        Suite::Commute,
        Suite::Module,
        Suite::Slices,
        Suite::Kompa,
        Suite::Wittstock,
        Suite::Cp,
        Suite::Gekad,
        Suite::Uniq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Aac => "aac",
            Suite::Agree => "agree",
            Suite::Mult => "mult",
            Suite::Isometry => "isometry",
            Suite::Commute => "commute",
            Suite::Module => "module",
            Suite::Slices => "slices",
            Suite::Kompa => "kompa",
            Suite::Wittstock => "wittstock",
            Suite::Cp => "cp",
            Suite::Gekad => "gekad",
            Suite::Uniq => "uniq",
        }
    }

    /// Parses a comma-separated list of names, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s.trim() == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        s.split(',').map(|part| part.trim().parse()).collect()
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deliberate faults for checking that the harness detects them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fault {
    /// The block path transposes its outer block index.
    CorruptBlockAmplify,
    /// The `cp` suite receives the transpose map in place of a CP map.
    MislabelNonCp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    pub m_range: RangeInclusive<usize>,
    pub n_range: RangeInclusive<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Tolerance for the algebraic identities.
    pub tol: f64,
    /// Tolerance for the optimization-based general isometry check.
    pub tol_general: f64,
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            m_range: 1..=4,
            n_range: 1..=4,
            trials: 200,
            seed: 0,
            tol: 1e-9,
            tol_general: 1e-6,
            fault: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if !(self.tol > 0.0) || !(self.tol_general > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        for (name, r) in [("m", &self.m_range), ("n", &self.n_range)] {
            if r.is_empty() || *r.start() < 1 || *r.end() > 8 {
                return Err(Error::InvalidConfig(format!("{name} range must lie within 1..=8")));
            }
        }
        if self.suites.is_empty() {
            return Err(Error::InvalidConfig("no suites selected".into()));
        }
        Ok(())
    }
}

/// Outcome of one named check across all trials of a suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub suite: String,
    pub name: String,
    pub trials_run: usize,
    pub max_defect: f64,
    pub tol: f64,
    pub pass: bool,
    pub worst_case_seed: u64,
    pub worst_case_m: usize,
    pub worst_case_n: usize,
    /// Largest solution-space dimension seen, for rank-style checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution_space_dim: Option<usize>,
    /// Wall time of the whole suite; not serialized, so reports of equal
    /// configurations are byte-identical.
    #[serde(skip)]
    pub elapsed: Duration,
}

/// One measured quantity of a trial.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub check: &'static str,
    pub defect: f64,
    pub solution_space_dim: Option<usize>,
}

impl Measurement {
    pub(crate) fn new(check: &'static str, defect: f64) -> Self {
        Self {
            check,
            defect,
            solution_space_dim: None,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b))
}

/// Seed of trial `t` of `suite` in cell `(m, n)`.
pub fn trial_seed(base: u64, suite: Suite, m: usize, n: usize, t: usize) -> u64 {
    let tag = suite as u64 + 1;
    mix(mix(mix(mix(base, tag), m as u64), n as u64), t as u64)
}

#[derive(Default)]
struct Aggregate {
    trials: usize,
    worst: f64,
    seed: u64,
    m: usize,
    n: usize,
    solution_dim: Option<usize>,
    seen: bool,
}

impl Aggregate {
    fn record(&mut self, meas: &Measurement, seed: u64, m: usize, n: usize) {
        self.trials += 1;
        let defect = if meas.defect.is_nan() { f64::INFINITY } else { meas.defect };
        if !self.seen || defect > self.worst {
            self.worst = defect;
            self.seed = seed;
            self.m = m;
            self.n = n;
            self.seen = true;
        }
        if let Some(dim) = meas.solution_space_dim {
            self.solution_dim = Some(self.solution_dim.map_or(dim, |d| d.max(dim)));
        }
    }
}

/// Runs every configured suite over the `(m, n)` grid.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<PropertyReport>> {
    config.validate()?;
    let mut reports = Vec::new();
    for &suite in &config.suites {
        let started = Instant::now();
        let mut aggregates: Vec<(&'static str, Aggregate)> = Vec::new();
        for m in config.m_range.clone() {
            for n in config.n_range.clone() {
                let trials = suites::trials_for(suite, m, n, config.trials);
                for t in 0..trials {
                    let seed = trial_seed(config.seed, suite, m, n, t);
                    let opts = suites::TrialOptions {
                        general_isometry: t < ISOMETRY_GENERAL_TRIALS,
                        fault: config.fault,
                    };
                    let mut trace = Trace::disabled();
                    for meas in suites::run_trial(suite, m, n, seed, &opts, &mut trace)? {
                        let slot = match aggregates.iter().position(|(c, _)| *c == meas.check) {
                            Some(i) => i,
                            None => {
                                aggregates.push((meas.check, Aggregate::default()));
                                aggregates.len() - 1
                            }
                        };
                        aggregates[slot].1.record(&meas, seed, m, n);
                    }
                }
            }
        }
        let elapsed = started.elapsed();
        if aggregates.is_empty() {
            // No cell of the grid admits this suite.
            reports.push(PropertyReport {
                suite: suite.name().into(),
                name: suite.name().into(),
                trials_run: 0,
                max_defect: 0.0,
                tol: config.tol,
                pass: true,
                worst_case_seed: 0,
                worst_case_m: 0,
                worst_case_n: 0,
                solution_space_dim: None,
                elapsed,
            });
        }
        for (check, agg) in aggregates {
            let tol = suites::tolerance(check, config);
            let dim_ok = agg.solution_dim.is_none_or(|d| d == 0);
            reports.push(PropertyReport {
                suite: suite.name().into(),
                name: check.into(),
                trials_run: agg.trials,
                max_defect: agg.worst,
                tol,
                pass: agg.worst <= tol && dim_ok,
                worst_case_seed: agg.seed,
                worst_case_m: agg.m,
                worst_case_n: agg.n,
                solution_space_dim: agg.solution_dim,
                elapsed,
            });
        }
    }
    Ok(reports)
}

/// A single rerun trial with its intermediate values.
#[derive(Clone, Debug)]
pub struct Replay {
    pub suite: Suite,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub measurements: Vec<Measurement>,
    pub trace: Trace,
}

impl Replay {
    pub fn defect(&self, check: &str) -> Option<f64> {
        self.measurements.iter().find(|m| m.check == check).map(|m| m.defect)
    }
}

impl fmt::Display for Replay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "replay {} seed={} m={} n={}", self.suite, self.seed, self.m, self.n)?;
        write!(f, "{}", self.trace)?;
        for meas in &self.measurements {
            write!(f, "check {}: defect {:e}", meas.check, meas.defect)?;
            if let Some(d) = meas.solution_space_dim {
                write!(f, ", solution-space dimension {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Reruns one trial with tracing. `seed` is a trial seed as reported in
/// [`PropertyReport::worst_case_seed`].
pub fn replay(suite: Suite, seed: u64, m: usize, n: usize, fault: Option<Fault>) -> Result<Replay> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidConfig("dimensions must be at least 1".into()));
    }
    let mut trace = Trace::enabled();
    let opts = suites::TrialOptions {
        general_isometry: true,
        fault,
    };
    let measurements = suites::run_trial(suite, m, n, seed, &opts, &mut trace)?;
    Ok(Replay {
        suite,
        seed,
        m,
        n,
        measurements,
        trace,
    })
}
