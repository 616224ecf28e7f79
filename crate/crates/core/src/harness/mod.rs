//! Config-driven seeded experiments: entropy continuity under perturbation
//! and the Abramov formula, with CSV and SVG output.
//!
//! Seeds and rates run in parallel; rows are always assembled in config order,
//! so a fixed config yields byte-identical output.
//!
//! CSV schema, version 1:
//!
//! * continuity: `eps,seed,metric,distance,h_x,h_y,delta_h,budget,hard_pass,soft_pass`
//! * abramov: `seed,n,m,m_induced,mu_e_hat,h_base,h_induced,product,residual,mean_return,kac_residual,overflow_mass,alpha_hat,flagged`
//!
//! Entropies, budgets and residuals are in the configured unit.

mod config;
mod svg;

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

pub use config::{ExperimentConfig, OutputPaths, Unit};
pub use svg::{continuity_svg, return_time_svg};

use crate::channels::{budget, indel_channel, substitute_channel, ChannelError, ChannelKind};
use crate::entropy::{estimate_entropy_rate, EntropyError};
use crate::generate::{quasi_generic_path, sample_path, GenerateError};
use crate::induced::{abramov_check, kac_check, AbramovEstimate, AbramovOptions, InducedError, KacCheck, MarkedSet};
use crate::metrics::{edit_fn_fast, hamming_dn, MetricError};
use crate::process::{ProcessSpec, SpecError};
use crate::rng::Seed;
use crate::word::Word;

pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Above this length indel experiments report the certificate bound instead
/// of the exact edit distance.
pub const EXACT_FBAR_LIMIT: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Induced(#[from] InducedError),
    #[error("nothing to plot: the report is empty")]
    EmptyReport,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Typical path for ergodic specs, quasi-generic path for mixtures.
pub fn realize(spec: &ProcessSpec, n: usize, schedule: usize, seed: Seed) -> Result<Word, HarnessError> {
    if spec.is_ergodic() {
        Ok(sample_path(spec, n, seed)?)
    } else {
        Ok(quasi_generic_path(spec, n, schedule, seed)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityRow {
    pub eps: f64,
    pub seed: Seed,
    /// `dbar`, `fbar` or `fbar_cert` (certificate upper bound).
    pub metric: &'static str,
    pub distance: f64,
    pub h_x: f64,
    pub h_y: f64,
    pub delta_h: f64,
    pub budget: f64,
    pub hard_pass: bool,
    pub soft_pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityReport {
    pub unit: Unit,
    pub alphabet_size: usize,
    pub rows: Vec<ContinuityRow>,
    pub warnings: Vec<String>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

impl ContinuityReport {
    pub fn all_hard_pass(&self) -> bool {
        self.rows.iter().all(|r| r.hard_pass)
    }

    pub fn all_soft_pass(&self) -> bool {
        self.rows.iter().all(|r| r.soft_pass)
    }

    /// Distinct rates in first-seen order.
    pub fn eps_values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.eps) {
                out.push(r.eps);
            }
        }
        out
    }

    /// Median `|Δh|` over seeds, per rate, in nats.
    pub fn median_delta_by_eps(&self) -> Vec<(f64, f64)> {
        self.eps_values()
            .into_iter()
            .map(|e| {
                let vals = self.rows.iter().filter(|r| r.eps == e).map(|r| r.delta_h).collect();
                (e, median(vals))
            })
            .collect()
    }

    /// Number of decreases of the median `|Δh|` along increasing rates.
    pub fn median_inversions(&self) -> usize {
        let mut med = self.median_delta_by_eps();
        med.sort_by(|a, b| a.0.total_cmp(&b.0));
        med.windows(2).filter(|w| w[1].1 < w[0].1).count()
    }

    pub fn to_csv(&self) -> String {
        let u = self.unit;
        let mut out = String::from("eps,seed,metric,distance,h_x,h_y,delta_h,budget,hard_pass,soft_pass\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.eps,
                r.seed.0,
                r.metric,
                r.distance,
                u.convert(r.h_x),
                u.convert(r.h_y),
                u.convert(r.delta_h),
                u.convert(r.budget),
                r.hard_pass,
                r.soft_pass
            );
        }
        out
    }

    /// Reads back a CSV written by [`ContinuityReport::to_csv`] (values are taken
    /// to be in `unit` and converted back to nats).
    pub fn from_csv(text: &str, unit: Unit, alphabet_size: usize) -> Result<Self, HarnessError> {
        let to_nats = |v: f64| match unit {
            Unit::Nats => v,
            Unit::Bits => v * std::f64::consts::LN_2,
        };
        let mut rows = Vec::new();
        for (no, line) in text.lines().enumerate().skip(1).filter(|(_, l)| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            let err = || HarnessError::Config(format!("continuity CSV line {}: malformed row", no + 1));
            if f.len() != 10 {
                return Err(err());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| err());
            let flag = |s: &str| s.parse::<bool>().map_err(|_| err());
            let metric = match f[2] {
                "dbar" => "dbar",
                "fbar" => "fbar",
                "fbar_cert" => "fbar_cert",
                _ => return Err(err()),
            };
            rows.push(ContinuityRow {
                eps: num(f[0])?,
                seed: Seed(f[1].parse().map_err(|_| err())?),
                metric,
                distance: num(f[3])?,
                h_x: to_nats(num(f[4])?),
                h_y: to_nats(num(f[5])?),
                delta_h: to_nats(num(f[6])?),
                budget: to_nats(num(f[7])?),
                hard_pass: flag(f[8])?,
                soft_pass: flag(f[9])?,
            });
        }
        Ok(ContinuityReport {
            unit,
            alphabet_size,
            rows,
            warnings: Vec::new(),
        })
    }
}

/// Budget with its `eps -> 0` limit filled in.
fn budget_or_zero(eps: f64, l: usize) -> Result<f64, ChannelError> {
    if eps == 0.0 {
        Ok(0.0)
    } else {
        budget(eps, l)
    }
}

/// For every seed and rate: realize `x`, perturb it, and compare both entropy
/// estimates with the budget.
pub fn run_continuity(cfg: &ExperimentConfig, spec: &ProcessSpec) -> Result<ContinuityReport, HarnessError> {
    let l = spec.alphabet().size();
    let warnings = cfg.validate(l)?;
    if cfg.eps.is_empty() {
        return Err(HarnessError::Config("eps grid is empty".into()));
    }
    let per_seed: Vec<Vec<ContinuityRow>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<ContinuityRow>, HarnessError> {
            let x = realize(spec, cfg.n, cfg.schedule, seed)?;
            let h_x = estimate_entropy_rate(&x, cfg.m)?.slope;
            cfg.eps
                .par_iter()
                .map(|&eps| continuity_row(cfg, &x, h_x, eps, seed, l))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    // Rows ordered by rate, then seed.
    let mut rows = Vec::with_capacity(cfg.eps.len() * cfg.seeds.len());
    for k in 0..cfg.eps.len() {
        rows.extend(per_seed.iter().map(|r| r[k].clone()));
    }
    Ok(ContinuityReport {
        unit: cfg.unit,
        alphabet_size: l,
        rows,
        warnings,
    })
}

fn continuity_row(
    cfg: &ExperimentConfig,
    x: &Word,
    h_x: f64,
    eps: f64,
    seed: Seed,
    l: usize,
) -> Result<ContinuityRow, HarnessError> {
    let (y, metric, distance) = match cfg.channel {
        ChannelKind::Substitution => {
            let (y, _) = substitute_channel(x, eps, seed)?;
            let d = hamming_dn(x, &y)?;
            (y, "dbar", d)
        }
        ChannelKind::Indel => {
            let (y, cert) = indel_channel(x, eps, seed)?;
            if x.len() <= EXACT_FBAR_LIMIT {
                let d = edit_fn_fast(x, &y)?;
                (y, "fbar", d)
            } else {
                let d = (x.len() - cert.len()) as f64 / x.len() as f64;
                (y, "fbar_cert", d)
            }
        }
    };
    let h_y = if y == *x {
        h_x
    } else {
        estimate_entropy_rate(&y, cfg.m)?.slope
    };
    let delta_h = (h_x - h_y).abs();
    let budget = budget_or_zero(eps, l)?;
    Ok(ContinuityRow {
        eps,
        seed,
        metric,
        distance,
        h_x,
        h_y,
        delta_h,
        budget,
        hard_pass: delta_h <= budget + cfg.slack,
        soft_pass: delta_h <= cfg.soft_tolerance,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbramovRow {
    pub seed: Seed,
    pub n: usize,
    pub estimate: AbramovEstimate,
    pub kac: KacCheck,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbramovReport {
    pub unit: Unit,
    pub rows: Vec<AbramovRow>,
    pub warnings: Vec<String>,
}

impl AbramovReport {
    pub fn median_residual(&self) -> f64 {
        median(self.rows.iter().map(|r| r.estimate.residual).collect())
    }

    pub fn median_induced(&self) -> f64 {
        median(self.rows.iter().map(|r| r.estimate.h_induced).collect())
    }

    pub fn to_csv(&self) -> String {
        let u = self.unit;
        let mut out = String::from(
            "seed,n,m,m_induced,mu_e_hat,h_base,h_induced,product,residual,mean_return,kac_residual,overflow_mass,alpha_hat,flagged\n",
        );
        for r in &self.rows {
            let e = &r.estimate;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.seed.0,
                r.n,
                e.m_base,
                e.m_induced,
                e.mu_e_hat,
                u.convert(e.h_base),
                u.convert(e.h_induced),
                u.convert(e.mu_e_hat * e.h_induced),
                u.convert(e.residual),
                e.mean_return,
                r.kac.kac_residual,
                e.overflow_mass,
                e.alpha_hat,
                e.flagged
            );
        }
        out
    }
}

/// Per-seed Abramov and Kac checks on realizations of `spec`.
pub fn run_abramov(cfg: &ExperimentConfig, spec: &ProcessSpec) -> Result<AbramovReport, HarnessError> {
    let warnings = cfg.validate(spec.alphabet().size())?;
    let mark = MarkedSet::new(spec.alphabet(), &cfg.mark)?;
    let opts = AbramovOptions {
        r_max: cfg.r_max,
        ..AbramovOptions::default()
    };
    let rows = cfg
        .seeds
        .par_iter()
        .map(|&seed| -> Result<AbramovRow, HarnessError> {
            let w = realize(spec, cfg.n, cfg.schedule, seed)?;
            let estimate = abramov_check(&w, &mark, cfg.m, &opts)?;
            let name = crate::induced::induce(&w, &mark)?;
            let kac = kac_check(&name.census(), mark.density(&w))?;
            Ok(AbramovRow {
                seed,
                n: cfg.n,
                estimate,
                kac,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(AbramovReport {
        unit: cfg.unit,
        rows,
        warnings,
    })
}

/// Writes the continuity scatter plot.
pub fn emit_plots(report: &ContinuityReport, path: &Path) -> Result<(), HarnessError> {
    let svg = continuity_svg(report)?;
    std::fs::write(path, svg)?;
    Ok(())
}
