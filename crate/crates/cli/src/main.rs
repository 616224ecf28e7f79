use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use shiftdist::channels::{indel_channel, substitute_channel};
use shiftdist::entropy::{entropy_profile, undersampling_guard};
use shiftdist::harness::{
    continuity_svg, realize, return_time_svg, run_abramov, run_continuity, ContinuityReport, ExperimentConfig, Unit,
};
use shiftdist::induced::induce;
use shiftdist::metrics::{distance_profile, geometric_checkpoints, verify_hat_f_certificate, MatchCertificate};
use shiftdist::{Alphabet, MarkedSet, ProcessSpec, Seed, Word};

/// Symbolic sequences: distances, entropy estimates, induced systems and
/// perturbation experiments.
#[derive(Parser)]
#[command(name = "shiftdist", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment config (TOML); used by `continuity` and `abramov`.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Base seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Entropy unit; nats unless a config says otherwise.
    #[arg(long, global = true, value_enum)]
    unit: Option<UnitArg>,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Csv)]
    emit: Emit,
    /// Write the table or plot here instead of standard output.
    #[arg(short, long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Nats,
    Bits,
}

impl From<UnitArg> for Unit {
    fn from(u: UnitArg) -> Unit {
        match u {
            UnitArg::Nats => Unit::Nats,
            UnitArg::Bits => Unit::Bits,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Csv,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Metric {
    Dbar,
    Fbar,
}

#[derive(Clone, Copy, ValueEnum)]
enum Channel {
    Sub,
    Indel,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a word from a process spec (quasi-generic for mixtures).
    Gen {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        /// Block-length growth parameter for mixtures.
        #[arg(long, default_value_t = 100)]
        schedule: usize,
        /// Output word file (`.rle` for text, raw bytes otherwise).
        out: PathBuf,
    },
    /// Distance profile of two equal-length words.
    Dist {
        left: PathBuf,
        right: PathBuf,
        /// Restrict to one metric; both are computed by default.
        #[arg(long, value_enum)]
        metric: Option<Metric>,
        /// Prefix lengths; ten geometric points by default.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<usize>,
        /// Match certificate to check against `--eps` (exit 2 if it fails).
        #[arg(long, value_name = "FILE", requires = "eps")]
        certificate: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Block entropies and rate estimates for m = 1..=M.
    Entropy {
        word: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Pass a word through a noisy channel.
    Perturb {
        input: PathBuf,
        out: PathBuf,
        #[arg(long, value_enum)]
        channel: Channel,
        #[arg(long)]
        eps: f64,
        /// Where to write the match certificate (index pairs, one per line).
        #[arg(long, value_name = "FILE")]
        certificate: Option<PathBuf>,
    },
    /// Return-time histogram of a word to a set of marked letters.
    Induce {
        word: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        mark: Vec<u8>,
        /// Bars shown in the SVG histogram.
        #[arg(long, default_value_t = 32)]
        bars: usize,
    },
    /// Per-seed Abramov residuals (exit 2 if the median exceeds the tolerance).
    Abramov {
        #[arg(long, value_name = "FILE")]
        spec: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Number of seeds, starting at `--seed`.
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        mark: Vec<u8>,
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
    /// Run a continuity experiment (exit 2 if any row exceeds its budget).
    Continuity,
    /// Re-render the continuity plot from a CSV.
    Plot {
        csv: PathBuf,
        /// Alphabet size used for the budget curve.
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
    },
}

/// Ran to completion; `Fail` means a checked criterion did not hold.
enum Verdict {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Verdict> {
    let g = &cli.global;
    let unit = g.unit.map_or(Unit::Nats, Unit::from);
    match &cli.command {
        Command::Gen { spec, n, schedule, out } => {
            let spec = ProcessSpec::from_file(spec)?;
            let word = realize(&spec, *n, *schedule, Seed(g.seed))?;
            word.save(out).with_context(|| format!("writing {}", out.display()))?;
            Ok(Verdict::Pass)
        }
        Command::Dist {
            left,
            right,
            metric,
            checkpoints,
            certificate,
            eps,
        } => dist(g, left, right, *metric, checkpoints, certificate.as_deref(), *eps),
        Command::Entropy { word, m } => {
            let w = load(word)?;
            let guard = undersampling_guard(w.len(), w.alphabet().size());
            let mut csv = String::from("m,H_m,ratio,slope,n,flag\n");
            for e in entropy_profile(&w, *m)? {
                let flag = if e.undersampled { "undersampled" } else { "ok" };
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{flag}",
                    e.m,
                    unit.convert(e.h_m),
                    unit.convert(e.ratio),
                    unit.convert(e.slope),
                    e.n
                );
            }
            if *m > guard {
                eprintln!("warning: m > {guard} exceeds the undersampling guard for this word");
            }
            emit(g, &csv)?;
            Ok(Verdict::Pass)
        }
        Command::Perturb {
            input,
            out,
            channel,
            eps,
            certificate,
        } => {
            let x = load(input)?;
            let seed = Seed(g.seed);
            let (y, cert) = match channel {
                Channel::Sub => {
                    let (y, changed) = substitute_channel(&x, *eps, seed)?;
                    let kept: Vec<usize> = (0..x.len()).filter(|i| changed.binary_search(i).is_err()).collect();
                    (y, MatchCertificate::new(kept.clone(), kept)?)
                }
                Channel::Indel => indel_channel(&x, *eps, seed)?,
            };
            y.save(out).with_context(|| format!("writing {}", out.display()))?;
            if let Some(path) = certificate {
                std::fs::write(path, cert.to_text()).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(Verdict::Pass)
        }
        Command::Induce { word, mark, bars } => {
            let w = load(word)?;
            let mark = MarkedSet::new(w.alphabet(), mark)?;
            let census = induce(&w, &mark)?.census();
            let text = match g.emit {
                Emit::Svg => return_time_svg(&census, *bars)?,
                Emit::Csv => {
                    let mut csv = String::from("r,count,mass\n");
                    for (r, count, mass) in census.iter() {
                        let _ = writeln!(csv, "{r},{count},{mass}");
                    }
                    csv
                }
            };
            emit(g, &text)?;
            Ok(Verdict::Pass)
        }
        Command::Abramov {
            spec,
            n,
            m,
            seeds,
            mark,
            tolerance,
        } => {
            let mut cfg = match &g.config {
                Some(path) => ExperimentConfig::from_file(path)?,
                None => {
                    let (Some(n), Some(m)) = (n, m) else {
                        bail!("abramov needs --n and --m, or --config");
                    };
                    ExperimentConfig::new(*n, *m, [g.seed])
                }
            };
            if let Some(path) = spec {
                cfg.spec_file = Some(path.canonicalize().with_context(|| format!("reading {}", path.display()))?);
                cfg.process = None;
            }
            if let Some(n) = n {
                cfg.n = *n;
            }
            if let Some(m) = m {
                cfg.m = *m;
            }
            if let Some(k) = seeds {
                cfg.seeds = (g.seed..g.seed + k).map(Seed).collect();
            }
            if !mark.is_empty() {
                cfg.mark = mark.clone();
            }
            if let Some(u) = g.unit {
                cfg.unit = u.into();
            }
            let unit = cfg.unit;
            let spec = cfg.process_spec()?;
            let report = run_abramov(&cfg, &spec)?;
            warn_all(&report.warnings);
            emit(g, &report.to_csv())?;
            let median = report.median_residual();
            eprintln!("median residual {:.6} {}", unit.convert(median), unit.name());
            Ok(if median <= *tolerance { Verdict::Pass } else { Verdict::Fail })
        }
        Command::Continuity => {
            let Some(path) = &g.config else {
                bail!("continuity needs --config FILE");
            };
            let mut cfg = ExperimentConfig::from_file(path)?;
            if let Some(u) = g.unit {
                cfg.unit = u.into();
            }
            let spec = cfg.process_spec()?;
            let report = run_continuity(&cfg, &spec)?;
            warn_all(&report.warnings);
            let svg = continuity_svg(&report)?;
            let csv = report.to_csv();
            if let Some(p) = &cfg.output.csv {
                write_file(&cfg.resolve(p), &csv)?;
            }
            if let Some(p) = &cfg.output.svg {
                write_file(&cfg.resolve(p), &svg)?;
            }
            emit(g, if g.emit == Emit::Svg { &svg } else { &csv })?;
            summarize(&report);
            Ok(if report.all_hard_pass() { Verdict::Pass } else { Verdict::Fail })
        }
        Command::Plot { csv, alphabet } => {
            let text = std::fs::read_to_string(csv).with_context(|| format!("reading {}", csv.display()))?;
            let report = ContinuityReport::from_csv(&text, unit, *alphabet)?;
            emit(g, &continuity_svg(&report)?)?;
            Ok(Verdict::Pass)
        }
    }
}

fn dist(
    g: &Global,
    left: &Path,
    right: &Path,
    metric: Option<Metric>,
    checkpoints: &[usize],
    certificate: Option<&Path>,
    eps: Option<f64>,
) -> Result<Verdict> {
    let (u, w) = (load(left)?, load(right)?);
    let alphabet = Alphabet::new(u.alphabet().size().max(w.alphabet().size()))?;
    let (u, w) = (u.widen(alphabet)?, w.widen(alphabet)?);
    if u.len() != w.len() {
        bail!("words have different lengths ({} and {})", u.len(), w.len());
    }
    let checkpoints = if checkpoints.is_empty() {
        geometric_checkpoints(u.len(), 10)
    } else {
        checkpoints.to_vec()
    };
    let profile = distance_profile(&u, &w, &checkpoints)?;
    let show_d = metric != Some(Metric::Fbar);
    let show_f = metric != Some(Metric::Dbar);
    let mut csv = String::from("n,dbar_n,fbar_n\n");
    for p in &profile.checkpoints {
        let d = if show_d { p.dbar.to_string() } else { String::new() };
        let f = if show_f { p.fbar.to_string() } else { String::new() };
        let _ = writeln!(csv, "{},{d},{f}", p.n);
    }
    emit(g, &csv)?;
    if show_d {
        eprintln!("dbar limsup estimate {}", profile.limsup_estimate_d);
    }
    if show_f {
        eprintln!("fbar limsup estimate {}", profile.limsup_estimate_f);
    }
    if let (Some(path), Some(eps)) = (certificate, eps) {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cert = MatchCertificate::from_text(&text).map_err(anyhow::Error::msg)?;
        let ok = verify_hat_f_certificate(&u, &w, &cert, eps)?;
        eprintln!("certificate at eps = {eps}: {}", if ok { "valid" } else { "rejected" });
        if !ok {
            return Ok(Verdict::Fail);
        }
    }
    Ok(Verdict::Pass)
}

fn load(path: &Path) -> Result<Word> {
    Word::load(path, None).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(g: &Global, text: &str) -> Result<()> {
    match &g.output {
        Some(path) => write_file(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn summarize(report: &ContinuityReport) {
    let unit = report.unit;
    for (eps, median) in report.median_delta_by_eps() {
        eprintln!("eps {eps}: median |delta h| {:.6} {}", unit.convert(median), unit.name());
    }
    let failing = report.rows.iter().filter(|r| !r.hard_pass).count();
    let soft = report.rows.iter().filter(|r| !r.soft_pass).count();
    eprintln!(
        "{} rows, {failing} over budget, {soft} over the soft tolerance, {} median inversions",
        report.rows.len(),
        report.median_inversions()
    );
}
