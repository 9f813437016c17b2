use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use permcensus::census::{self, CensusOpts, CensusReport, Statistic, BUDGET_ENV, DEFAULT_BUDGET};
use permcensus::constructions::{self, ConverterSpec, VerifyMode, VerifyReport};
use permcensus::formulas::{self, BoundSet};
use permcensus::matrix::{self, FMatrix};
use permcensus::report::FieldInfo;
use permcensus::{Error, Fe, FieldCtx, FieldSpec, PerAlgo};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser, Debug)]
#[command(
    name = "permcensus",
    version,
    about = "Permanent and determinant censuses over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Maximum number of matrices an exhaustive run may evaluate.
    #[arg(long, global = true, env = BUDGET_ENV, default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    /// Permanent algorithm used by censuses.
    #[arg(long, global = true, value_enum, default_value_t = Algo::Auto)]
    per_algo: Algo,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exhaustive census over all n x n matrices.
    Census {
        #[arg(long)]
        field: FieldSpec,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Key::Joint)]
        key: Key,
        /// Rank for `--key vr`; all ranks when omitted.
        #[arg(long)]
        r: Option<usize>,
    },
    /// Minimal field size beyond which the upper bound falls below |D_n|.
    Thresholds {
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
    /// Monte Carlo estimate of P(stat(A) = target).
    Prob {
        #[arg(long)]
        field: FieldSpec,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Stat::Per)]
        stat: Stat,
        #[arg(long, default_value = "0")]
        target: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a permanent/determinant converter.
    Verify {
        #[arg(long, value_enum)]
        map: MapName,
        #[arg(long)]
        field: FieldSpec,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        /// Input dimension for ex1, ex2 and delta.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Output dimension for ex2 (default: n).
        #[arg(long)]
        m: Option<usize>,
        /// alpha for delta, as a field element.
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lower and upper bound polynomials for |P_n|.
    Bounds {
        #[arg(long)]
        n: usize,
    },
    /// Time Laplace against Ryser for each n.
    Bench {
        #[arg(long, default_value = "3^2")]
        field: FieldSpec,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Minimum wall time per (n, algorithm) cell, in milliseconds.
        #[arg(long, default_value_t = 200)]
        min_ms: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Algo {
    Auto,
    Laplace,
    Ryser,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Key {
    Joint,
    Nr,
    Vr,
    Values,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Stat {
    Per,
    Det,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MapName {
    Polya2,
    Psi33,
    Ex1,
    Ex2,
    Delta,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Exhaustive,
    Random,
}

enum Failure {
    Usage(String),
    Budget(Error),
    Counterexample,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(e)) => {
            eprintln!("error: {e}");
            if let Error::BudgetExceeded { required, .. } = &e {
                eprintln!("rerun with --budget {required} (or set {BUDGET_ENV}) to allow it");
            }
            ExitCode::from(2)
        }
        Err(Failure::Counterexample) => ExitCode::from(3),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.budget == 0 {
        return Err(Failure::Usage("--budget must be positive".into()));
    }
    let workers = match cli.workers {
        Some(0) => return Err(Failure::Usage("--workers must be positive".into())),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let opts = CensusOpts {
        workers,
        budget: cli.budget,
        per_algo: match cli.per_algo {
            Algo::Auto => PerAlgo::Auto,
            Algo::Laplace => PerAlgo::Laplace,
            Algo::Ryser => PerAlgo::Ryser,
        },
    };
    let fmt = |default| cli.format.unwrap_or(default);

    let (text, failed) = match &cli.cmd {
        Cmd::Census { field, n, key, r } => {
            let f = field.build()?;
            let report = census_report(&f, *n, *key, *r, &opts)?;
            (render_census(&report, fmt(Format::Json)), false)
        }
        Cmd::Thresholds { n_min, n_max } => {
            let rows = formulas::threshold_table(*n_min, *n_max)?;
            let out = match fmt(Format::Csv) {
                Format::Json => json(&rows),
                _ => {
                    let mut s = String::from("n,i,q\n");
                    for r in &rows {
                        s.push_str(&format!("{},{},{}\n", r.n, r.i, r.q));
                    }
                    s
                }
            };
            (out, false)
        }
        Cmd::Prob {
            field,
            n,
            stat,
            target,
            trials,
            seed,
        } => {
            let f = field.build()?;
            (
                cmd_prob(
                    &f,
                    *n,
                    *stat,
                    target,
                    *trials,
                    *seed,
                    &opts,
                    fmt(Format::Text),
                )?,
                false,
            )
        }
        Cmd::Verify {
            map,
            field,
            mode,
            n,
            m,
            alpha,
            trials,
            seed,
        } => {
            let f = field.build()?;
            let report = cmd_verify(
                &f,
                *map,
                *mode,
                *n,
                m.unwrap_or(*n),
                alpha,
                *trials,
                *seed,
                &opts,
            )?;
            let out = match fmt(Format::Text) {
                Format::Json => json(&report),
                Format::Csv => format!(
                    "map,q,n,mode,checked,pass\n{},{},{},{},{},{}\n",
                    report.map, report.field.q, report.n, report.mode, report.checked, report.pass
                ),
                Format::Text => report.to_text(),
            };
            (out, !report.pass)
        }
        Cmd::Bounds { n } => {
            if *n < 1 {
                return Err(Failure::Usage("--n must be at least 1".into()));
            }
            let table = formulas::BoundTable::build((*n).max(4));
            let set = table.bound_set(*n);
            (render_bounds(&set, fmt(Format::Json)), false)
        }
        Cmd::Bench {
            field,
            n_min,
            n_max,
            min_ms,
        } => {
            let f = field.build()?;
            (bench(&f, *n_min, *n_max, *min_ms)?, false)
        }
    };

    match &cli.output {
        Some(path) => fs::write(path, &text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    if failed {
        return Err(Failure::Counterexample);
    }
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn census_report(
    f: &FieldCtx,
    n: usize,
    key: Key,
    r: Option<usize>,
    opts: &CensusOpts,
) -> Result<CensusReport, Failure> {
    Ok(match key {
        Key::Joint => census::census_joint(f, n, opts)?.report(f),
        Key::Values => census::census_value_classes(f, n, opts)?.report(f),
        Key::Nr => census::census_nr(f, n, opts)?.report(),
        Key::Vr => {
            let start = Instant::now();
            let ranks: Vec<usize> = match r {
                Some(r) => vec![r],
                None => (0..=n).collect(),
            };
            let mut counts = BTreeMap::new();
            for r in ranks {
                counts.insert(format!("r={r}"), census::census_vr(f, n, r, opts)?);
            }
            CensusReport {
                field: FieldInfo::of(f),
                n,
                total: num_pow(f.q(), 2 * n),
                counts,
                summary: BTreeMap::new(),
                elapsed_ms: start.elapsed().as_millis() as u64,
                workers: opts.workers,
                seed: None,
            }
        }
    })
}

fn num_pow(q: u32, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

fn render_census(report: &CensusReport, format: Format) -> String {
    match format {
        Format::Json => json(report),
        Format::Text => report.to_text(),
        Format::Csv => {
            let mut s = String::from("key,count\n");
            for (k, v) in report.counts.iter().chain(&report.summary) {
                s.push_str(&format!("{k},{v}\n"));
            }
            s
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_prob(
    f: &FieldCtx,
    n: usize,
    stat: Stat,
    target: &str,
    trials: u64,
    seed: u64,
    opts: &CensusOpts,
    format: Format,
) -> Result<String, Failure> {
    let target = f.parse_element(target)?;
    let stat = match stat {
        Stat::Per => Statistic::Per,
        Stat::Det => Statistic::Det,
    };
    let est = census::sample_prob(f, n, stat, target, trials, seed, opts.workers)?;
    let exact = census::exact_probability(f, n, stat, target)
        .map(|(num, den)| (num, den, "polynomial"))
        .or_else(|| exact_by_census(f, n, stat, target, opts).map(|(a, b)| (a, b, "census")));

    let mut fields: Vec<(&str, String)> = vec![
        ("q", f.q().to_string()),
        ("n", n.to_string()),
        ("stat", format!("{stat:?}").to_lowercase()),
        ("target", f.format(target)),
        ("trials", est.trials.to_string()),
        ("hits", est.hits.to_string()),
        ("estimate", format!("{:.9}", est.estimate)),
        ("std_error", format!("{:.9}", est.std_error)),
        ("seed", est.seed.to_string()),
    ];
    if let Some((num, den, source)) = &exact {
        fields.push(("exact", format!("{num}/{den}")));
        fields.push(("exact_value", format!("{:.9}", ratio(num, den))));
        fields.push(("exact_source", source.to_string()));
    }
    Ok(match format {
        Format::Text => fields
            .iter()
            .map(|(k, v)| format!("{k:<13} {v}\n"))
            .collect(),
        Format::Csv => {
            let keys: Vec<_> = fields.iter().map(|(k, _)| *k).collect();
            let vals: Vec<_> = fields.iter().map(|(_, v)| v.as_str()).collect();
            format!("{}\n{}\n", keys.join(","), vals.join(","))
        }
        Format::Json => {
            let mut v = serde_json::to_value(&est).expect("estimate serializes");
            v["field"] = serde_json::to_value(FieldInfo::of(f)).unwrap();
            v["n"] = n.into();
            v["target"] = f.format(target).into();
            if let Some((num, den, source)) = exact {
                v["exact"] = serde_json::json!({
                    "numerator": num.to_string(),
                    "denominator": den.to_string(),
                    "value": ratio(&num, &den),
                    "source": source,
                });
            }
            json(&v)
        }
    })
}

fn exact_by_census(
    f: &FieldCtx,
    n: usize,
    stat: Statistic,
    target: Fe,
    opts: &CensusOpts,
) -> Option<(BigUint, BigUint)> {
    let classes = census::census_value_classes(f, n, opts).ok()?;
    let hist = match stat {
        Statistic::Per => &classes.per,
        Statistic::Det => &classes.det,
    };
    Some((hist[target.index() as usize].clone(), num_pow(f.q(), n * n)))
}

fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    // Scale down together so both fit in f64 range.
    let shift = den.bits().saturating_sub(1000);
    let (a, b) = (num >> shift, den >> shift);
    a.to_string().parse::<f64>().unwrap() / b.to_string().parse::<f64>().unwrap()
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    f: &FieldCtx,
    map: MapName,
    mode: Mode,
    n: usize,
    m: usize,
    alpha: &str,
    trials: u64,
    seed: u64,
    opts: &CensusOpts,
) -> Result<VerifyReport, Failure> {
    let spec: ConverterSpec = match map {
        MapName::Polya2 => constructions::polya2_spec(),
        MapName::Psi33 => constructions::psi33_spec(),
        MapName::Ex1 => constructions::ex1_spec(n),
        MapName::Ex2 => constructions::ex2_spec(n, m),
        MapName::Delta => constructions::delta_spec(n, f.parse_element(alpha)?),
    };
    let mode = match mode {
        Mode::Exhaustive => VerifyMode::Exhaustive,
        Mode::Random => VerifyMode::Random { trials, seed },
    };
    Ok(constructions::verify_converter(&spec, f, mode, opts)?)
}

fn render_bounds(set: &BoundSet, format: Format) -> String {
    let coeffs = |p: &formulas::IntPoly| -> Vec<String> {
        p.coeffs().iter().map(|c| c.to_string()).collect()
    };
    match format {
        Format::Json => json(set),
        Format::Text => {
            let mut s = format!("n = {}\nL = {}\nU = {}\n", set.n, set.lower, set.upper);
            if let Some(p) = &set.n0 {
                s.push_str(&format!("N0 = {p}\n"));
            }
            if let Some(p) = &set.n1 {
                s.push_str(&format!("N1 = {p}\n"));
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("bound,coefficients\n");
            let mut row = |name: &str, p: &formulas::IntPoly| {
                s.push_str(&format!("{name},\"{}\"\n", coeffs(p).join(" ")));
            };
            row("lower", &set.lower);
            row("upper", &set.upper);
            if let Some(p) = &set.n0 {
                row("n0", p);
            }
            if let Some(p) = &set.n1 {
                row("n1", p);
            }
            s
        }
    }
}

fn bench(f: &FieldCtx, n_min: usize, n_max: usize, min_ms: u64) -> Result<String, Failure> {
    if n_min < 1 || n_min > n_max || n_max > matrix::MAX_DIM {
        return Err(Failure::Usage(format!(
            "need 1 <= n-min <= n-max <= {}",
            matrix::MAX_DIM
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut s = String::from("n,laplace_ns,ryser_ns,faster\n");
    for n in n_min..=n_max {
        let pool: Vec<FMatrix> = (0..64)
            .map(|_| {
                let e = (0..n * n)
                    .map(|_| f.element(rng.gen_range(0..f.q())).unwrap())
                    .collect();
                FMatrix::new(f, n, e).unwrap()
            })
            .collect();
        let lap = time_per_call(&pool, min_ms, |a| matrix::per_laplace(f, a));
        let rys = time_per_call(&pool, min_ms, |a| matrix::per_ryser(f, a));
        let faster = if lap <= rys { "laplace" } else { "ryser" };
        s.push_str(&format!("{n},{lap:.1},{rys:.1},{faster}\n"));
    }
    Ok(s)
}

fn time_per_call(pool: &[FMatrix], min_ms: u64, per: impl Fn(&FMatrix) -> Fe) -> f64 {
    let mut calls = 0u64;
    let mut sink = 0u32;
    let start = Instant::now();
    loop {
        for a in pool {
            sink ^= std::hint::black_box(per(a)).index();
        }
        calls += pool.len() as u64;
        if start.elapsed().as_millis() as u64 >= min_ms {
            break;
        }
    }
    std::hint::black_box(sink);
    start.elapsed().as_nanos() as f64 / calls as f64
}
