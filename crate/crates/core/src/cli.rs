//! Command-line front end: argument parsing, `key=value` config files,
//! thread control and deterministic CSV/JSON emission.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{Map, Value};

use crate::diagonal::{self, Interval};
use crate::empirics::{self, Setting};
use crate::error::{Error, Result};
use crate::euler;
use crate::gaussian::{self, IdealSet};
use crate::rmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    Moments,
    Diagonal,
    Constants,
    Lemmas,
    Gaussian,
    Discriminants,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstantSetting {
    #[value(name = "T")]
    T,
    #[value(name = "S")]
    S,
    #[value(name = "N")]
    N,
    /// Landau–Ramanujan constant.
    #[value(name = "LR")]
    Lr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RatioSetting {
    #[value(name = "T")]
    T,
    #[value(name = "S")]
    S,
    #[value(name = "N")]
    N,
}

impl From<RatioSetting> for Setting {
    fn from(s: RatioSetting) -> Self {
        match s {
            RatioSetting::T => Setting::T,
            RatioSetting::S => Setting::S,
            RatioSetting::N => Setting::N,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "symvar", version, about = "Symplectic variance predictions for divisor sums")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "SYMVAR_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// File of `key=value` lines supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed selecting the sampled ranges of randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated Euler-product constant with its tail bound.
    Constants {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum)]
        setting: ConstantSetting,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
    },
    /// Exact symplectic moment.
    Moment {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u64,
        #[arg(long = "N")]
        big_n: u64,
        /// Also evaluate the Weyl-integral oracle (rank <= 4).
        #[arg(long)]
        oracle: bool,
    },
    /// Leading coefficient `γ_k(c)`.
    Gamma {
        #[arg(long)]
        k: u32,
        /// Rational or decimal `c`.
        #[arg(long, default_value = "1")]
        c: String,
    },
    /// Diagonal sum over `Ax < n, m <= Bx` with `nm` a square.
    Diagonal {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        x: u64,
        #[arg(long, default_value = "0,1")]
        interval: String,
        /// Apply the local-factor weight (T setting).
        #[arg(long)]
        weighted: bool,
        /// Floating-point evaluation (no exact rational).
        #[arg(long)]
        approx: bool,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
    },
    /// Variance over fundamental discriminants in `(y, 2y]`.
    VarianceT {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
    },
    /// Log-weighted variance over primes in `(y, 2y]`.
    VarianceS {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
    },
    /// Angular-window variance of Gaussian ideals.
    VarianceN {
        #[arg(long = "l")]
        l: u32,
        #[arg(long)]
        x: u64,
        #[arg(long = "K")]
        k_window: f64,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
    },
    /// Empirical against conjectured variances over a grid of `x`.
    Ratios {
        #[arg(long, value_enum)]
        setting: RatioSetting,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        c: f64,
        /// Comma-separated list.
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
    },
    /// Run the brute-force and quadrature oracles.
    OracleCheck {
        #[arg(long, value_enum, default_value = "all")]
        scope: Scope,
    },
}

/// A CSV/JSON cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(i) => Value::from(i),
                Err(_) => Value::from(v.to_string()),
            },
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Result of one subcommand: a table plus a one-line summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Emit a single JSON object rather than an array.
    pub single: bool,
    pub summary: String,
    /// Set when an oracle comparison failed.
    pub failed: bool,
}

impl Report {
    fn new(columns: Vec<&'static str>, single: bool) -> Self {
        Report { columns, rows: Vec::new(), single, summary: String::new(), failed: false }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let objects: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(map)
            })
            .collect();
        let value = if self.single && objects.len() == 1 {
            objects.into_iter().next().expect("one row")
        } else {
            Value::Array(objects)
        };
        let mut s = serde_json::to_string_pretty(&value).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Parses `p/q`, an integer or a decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Validation(format!("cannot parse {s:?} as a rational"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        return Ok(BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32)));
    }
    Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
}

fn constants(k: u32, setting: ConstantSetting, cutoff: u64) -> Result<Report> {
    let c = match setting {
        ConstantSetting::T => euler::a_t(k, cutoff)?,
        ConstantSetting::S => euler::a_s(k, cutoff)?,
        ConstantSetting::N => euler::a_n(k, cutoff)?,
        ConstantSetting::Lr => euler::landau_ramanujan(cutoff)?,
    };
    let rec = c.record();
    let mut r = Report::new(vec!["name", "k_or_l", "value_decimal_string", "cutoff", "tail_bound"], true);
    r.summary = format!("{}({}) = {} (log tail bound {:e})", rec.name, rec.k_or_l, c.value.to_f64(), rec.tail_bound);
    r.push(vec![
        rec.name.into(),
        rec.k_or_l.into(),
        rec.value_decimal_string.into(),
        rec.cutoff.into(),
        rec.tail_bound.into(),
    ]);
    Ok(r)
}

fn moment(k: u32, n: u64, big_n: u64, oracle: bool) -> Result<Report> {
    let value = rmt::symplectic_moment(k, n, big_n)?;
    let mut r = Report::new(vec!["k", "n", "N", "value", "oracle"], true);
    let oracle_cell = if oracle {
        let rank = u32::try_from(big_n).map_err(|_| Error::Capacity("rank too large for the oracle".into()))?;
        Cell::Float(rmt::sp_weyl_oracle(k, n, rank)?)
    } else {
        Cell::Text(String::new())
    };
    r.summary = value.to_string();
    r.push(vec![k.into(), n.into(), big_n.into(), value.to_string().into(), oracle_cell]);
    Ok(r)
}

fn gamma(k: u32, c: &str) -> Result<Report> {
    let c = parse_rational(c)?;
    let lead = rmt::gamma_leading_coefficient(k)?;
    let value = rmt::gamma_value(k, &c)?;
    let mut r = Report::new(vec!["k", "c", "degree", "leading_coefficient", "gamma", "gamma_f64"], true);
    r.summary = format!("gamma_{k}({c}) = {value}");
    r.push(vec![
        k.into(),
        c.to_string().into(),
        rmt::moment_degree(k).into(),
        lead.to_string().into(),
        value.to_string().into(),
        crate::rational_to_f64(&value).into(),
    ]);
    Ok(r)
}

fn endpoint_string(i: &Interval) -> (String, String) {
    (i.a.to_string(), i.b.to_string())
}

fn diagonal_cmd(k: u32, x: u64, interval: &str, weighted: bool, approx: bool, cutoff: u64) -> Result<Report> {
    let interval = Interval::parse(interval)?;
    let (exact, value) = if approx {
        (String::new(), diagonal::diagonal_sum_approx(k, x, interval, weighted)?)
    } else {
        let d = diagonal::diagonal_sum(k, x, interval, weighted)?;
        (d.value.to_string(), crate::rational_to_f64(&d.value))
    };
    let setting = if weighted { 'T' } else { 'S' };
    let predicted = if x >= 3 {
        diagonal::predicted_diagonal(k, x as f64, setting, &interval, cutoff)?
    } else {
        f64::NAN
    };
    let (a, b) = endpoint_string(&interval);
    let mut r = Report::new(
        vec!["k", "x", "A", "B", "weighted", "value_exact", "value", "predicted", "ratio"],
        true,
    );
    r.summary = format!("D = {value} (predicted {predicted}, ratio {})", value / predicted);
    r.push(vec![
        k.into(),
        x.into(),
        a.into(),
        b.into(),
        weighted.into(),
        exact.into(),
        value.into(),
        predicted.into(),
        (value / predicted).into(),
    ]);
    Ok(r)
}

fn variance_t(k: u32, x: u64, y: u64) -> Result<Report> {
    let emp = empirics::empirical_variance_t(k, x, y)?;
    let diag = diagonal_reference(k, x, true)?;
    let mut r = Report::new(vec!["setting", "k", "x", "y", "empirical", "diagonal", "ratio"], true);
    r.summary = format!("Var_T = {emp} (diagonal {diag}, ratio {})", emp / diag);
    r.push(vec!["T".into(), k.into(), x.into(), y.into(), emp.into(), diag.into(), (emp / diag).into()]);
    Ok(r)
}

fn variance_s(k: u32, x: u64, y: u64) -> Result<Report> {
    let emp = empirics::empirical_variance_s(k, x, y)?;
    let diag = diagonal_reference(k, x, false)? / 4.0 * empirics::prime_log_density(y);
    let mut r = Report::new(vec!["setting", "k", "x", "y", "empirical", "diagonal", "ratio"], true);
    r.summary = format!("Var_S = {emp} (diagonal {diag}, ratio {})", emp / diag);
    r.push(vec!["S".into(), k.into(), x.into(), y.into(), emp.into(), diag.into(), (emp / diag).into()]);
    Ok(r)
}

/// Diagonal sum over `(0, 1]`: exact where affordable, floating otherwise.
fn diagonal_reference(k: u32, x: u64, weighted: bool) -> Result<f64> {
    if !weighted || x <= diagonal::MAX_EXACT_WEIGHTED_BOUND {
        let d = diagonal::diagonal_sum(k, x, Interval::unit(), weighted)?;
        Ok(crate::rational_to_f64(&d.value))
    } else {
        diagonal::diagonal_sum_approx(k, x, Interval::unit(), weighted)
    }
}

fn variance_n(l: u32, x: u64, k_window: f64, cutoff: u64) -> Result<Report> {
    let set = IdealSet::new(x, l)?;
    let exact = gaussian::variance_exact_of(&set, k_window)?;
    let diag = gaussian::variance_diagonal_of(&set, k_window)?;
    // outside c <= 1/2 there is no prediction
    let predicted = match gaussian::predicted_variance_n(l, k_window, x as f64, cutoff) {
        Ok(p) => p,
        Err(Error::Range(_)) => f64::NAN,
        Err(e) => return Err(e),
    };
    let mut r = Report::new(vec!["l", "x", "K", "var_exact", "var_diagonal", "predicted", "ratio"], true);
    r.summary = format!("Var_N = {exact} (diagonal {diag}, predicted {predicted})");
    r.push(vec![
        l.into(),
        x.into(),
        k_window.into(),
        exact.into(),
        diag.into(),
        predicted.into(),
        (exact / predicted).into(),
    ]);
    Ok(r)
}

fn ratios(setting: RatioSetting, k: u32, c: f64, xs: &[u64], cutoff: u64) -> Result<Report> {
    let rows = empirics::ratio_report(setting.into(), k, c, xs, cutoff)?;
    let mut r = Report::new(vec!["setting", "k", "x", "y_or_K", "empirical", "predicted", "ratio"], false);
    for row in &rows {
        r.push(vec![
            row.setting.as_str().into(),
            row.k.into(),
            row.x.into(),
            row.y_or_k.into(),
            row.empirical.into(),
            row.predicted.into(),
            row.ratio.into(),
        ]);
    }
    let last = rows.last().map_or(f64::NAN, |r| r.ratio);
    r.summary = format!("{} rows, final ratio {last}", rows.len());
    Ok(r)
}

/// One oracle comparison.
struct Check {
    scope: &'static str,
    name: String,
    computed: f64,
    reference: f64,
    tolerance: f64,
    relative: bool,
}

impl Check {
    fn pass(&self) -> bool {
        let err = (self.computed - self.reference).abs();
        let scale = if self.relative { self.reference.abs() } else { 1.0 };
        err <= self.tolerance * scale
    }
}

fn moment_checks(out: &mut Vec<Check>) -> Result<()> {
    for k in 1..=2u32 {
        for big_n in 1..=2u64 {
            for n in 0..=rmt::max_valid_n(k, big_n) {
                let exact = rmt::symplectic_moment(k, n, big_n)?;
                out.push(Check {
                    scope: "moments",
                    name: format!("Sp({}) k={k} n={n}", 2 * big_n),
                    computed: exact.to_string().parse().expect("integer"),
                    reference: rmt::sp_weyl_oracle(k, n, big_n as u32)?,
                    tolerance: 1e-6,
                    relative: false,
                });
            }
        }
    }
    Ok(())
}

fn diagonal_checks(out: &mut Vec<Check>) -> Result<()> {
    for k in 1..=3u32 {
        for x in [60u64, 250] {
            for (a, b) in [(0u64, 1u64), (1, 2)] {
                for weighted in [false, true] {
                    let iv = Interval::from_ints(a, b)?;
                    let fast = diagonal::diagonal_sum(k, x, iv, weighted)?;
                    let slow = diagonal::diagonal_sum_bruteforce(k, x, iv, weighted)?;
                    let equal = fast.value == slow.value;
                    out.push(Check {
                        scope: "diagonal",
                        name: format!("k={k} x={x} ({a},{b}) weighted={weighted} exact equality"),
                        computed: if equal { 0.0 } else { 1.0 },
                        reference: 0.0,
                        tolerance: 0.0,
                        relative: false,
                    });
                }
            }
        }
    }
    Ok(())
}

/// `b = 0.764223653589220662990698731250092328116790541…`
const LANDAU_RAMANUJAN: f64 = 0.764_223_653_589_220_7;

fn constant_checks(out: &mut Vec<Check>) -> Result<()> {
    let cutoff = 200_000;
    let a_s = euler::a_s(1, cutoff)?;
    out.push(Check {
        scope: "constants",
        name: format!("a_S(1) vs 12/pi^2 (cutoff {cutoff})"),
        computed: a_s.value.to_f64(),
        reference: euler::twelve_over_pi_squared().to_f64(),
        tolerance: a_s.abs_error_bound(),
        relative: false,
    });
    let a_n = euler::a_n(1, cutoff)?;
    out.push(Check {
        scope: "constants",
        name: format!("a_N(1) vs 3/pi (cutoff {cutoff})"),
        computed: a_n.value.to_f64(),
        reference: 3.0 / std::f64::consts::PI,
        tolerance: a_n.abs_error_bound(),
        relative: false,
    });
    for l in 1..=3 {
        let a = euler::a_n(l, 20_000)?;
        out.push(Check {
            scope: "constants",
            name: format!("a_N({l}) folded vs unfolded"),
            computed: a.value.to_f64(),
            reference: euler::a_n_unfolded(l, 20_000)?.to_f64(),
            tolerance: 1e-14,
            relative: true,
        });
    }
    let lr = euler::landau_ramanujan(cutoff)?;
    out.push(Check {
        scope: "constants",
        name: format!("Landau-Ramanujan (cutoff {cutoff})"),
        computed: lr.value.to_f64(),
        reference: LANDAU_RAMANUJAN,
        tolerance: lr.abs_error_bound(),
        relative: false,
    });
    Ok(())
}

fn lemma_checks(out: &mut Vec<Check>) -> Result<()> {
    let y = 50.0;
    for n in 1..=3u32 {
        for m in 0..=3u32 {
            out.push(Check {
                scope: "lemmas",
                name: format!("I(m={m}, n={n}, Y={y})"),
                computed: diagonal::lemma_i_numeric(m, n, y, 24),
                reference: diagonal::lemma_i(m, n, y)?,
                tolerance: 1e-4,
                relative: true,
            });
        }
        out.push(Check {
            scope: "lemmas",
            name: format!("J(n={n}, Y={y})"),
            computed: diagonal::lemma_j_numeric(n, y, 24),
            reference: diagonal::lemma_j(n, y)?,
            tolerance: 1e-4,
            relative: true,
        });
    }
    Ok(())
}

fn gaussian_checks(out: &mut Vec<Check>) -> Result<()> {
    for l in 1..=2u32 {
        let set = IdealSet::new(200, l)?;
        let k_window = (std::f64::consts::PI / set.min_angle_gap()).ceil();
        out.push(Check {
            scope: "gaussian",
            name: format!("exact vs diagonal l={l} x=200 K={k_window}"),
            computed: gaussian::variance_exact_of(&set, k_window)?,
            reference: gaussian::variance_diagonal_of(&set, k_window)?,
            tolerance: 1e-10,
            relative: true,
        });
    }
    let set = IdealSet::new(10, 1)?;
    let (riemann, _) = gaussian::variance_riemann(&set, 50.0, 100_000, false)?;
    out.push(Check {
        scope: "gaussian",
        name: "exact vs Riemann sum l=1 x=10 K=50".into(),
        computed: gaussian::variance_exact_of(&set, 50.0)?,
        reference: riemann,
        tolerance: 1e-8,
        relative: false,
    });
    Ok(())
}

fn discriminant_checks(out: &mut Vec<Check>, seed: u64) -> Result<()> {
    let lo = seed.saturating_mul(10_000);
    let hi = lo + 10_000;
    let listed = crate::arith::enumerate_fundamental_discriminants(lo.max(1) as f64, hi as f64)?;
    let direct = (lo.max(1) + 1..=hi).filter(|&r| crate::arith::is_fundamental_discriminant(r)).count();
    out.push(Check {
        scope: "discriminants",
        name: format!("sieve vs trial division on ({}, {hi}]", lo.max(1)),
        computed: listed.len() as f64,
        reference: direct as f64,
        tolerance: 0.0,
        relative: false,
    });
    Ok(())
}

fn oracle_check(scope: Scope, seed: u64) -> Result<Report> {
    let mut checks = Vec::new();
    let all = scope == Scope::All;
    if all || scope == Scope::Moments {
        moment_checks(&mut checks)?;
    }
    if all || scope == Scope::Diagonal {
        diagonal_checks(&mut checks)?;
    }
    if all || scope == Scope::Constants {
        constant_checks(&mut checks)?;
    }
    if all || scope == Scope::Lemmas {
        lemma_checks(&mut checks)?;
    }
    if all || scope == Scope::Gaussian {
        gaussian_checks(&mut checks)?;
    }
    if all || scope == Scope::Discriminants {
        discriminant_checks(&mut checks, seed)?;
    }
    let mut r = Report::new(vec!["scope", "check", "computed", "reference", "tolerance", "relative", "pass"], false);
    let mut failures = 0;
    for c in &checks {
        let pass = c.pass();
        failures += usize::from(!pass);
        r.push(vec![
            c.scope.into(),
            c.name.clone().into(),
            c.computed.into(),
            c.reference.into(),
            c.tolerance.into(),
            c.relative.into(),
            pass.into(),
        ]);
    }
    r.failed = failures > 0;
    r.summary = format!("{} checks, {failures} failed", checks.len());
    Ok(r)
}

/// Executes a parsed command.
pub fn execute(command: &Command, seed: u64) -> Result<Report> {
    match *command {
        Command::Constants { k, setting, cutoff } => constants(k, setting, cutoff),
        Command::Moment { k, n, big_n, oracle } => moment(k, n, big_n, oracle),
        Command::Gamma { k, ref c } => gamma(k, c),
        Command::Diagonal { k, x, ref interval, weighted, approx, cutoff } => {
            diagonal_cmd(k, x, interval, weighted, approx, cutoff)
        }
        Command::VarianceT { k, x, y } => variance_t(k, x, y),
        Command::VarianceS { k, x, y } => variance_s(k, x, y),
        Command::VarianceN { l, x, k_window, cutoff } => variance_n(l, x, k_window, cutoff),
        Command::Ratios { setting, k, c, ref x, cutoff } => ratios(setting, k, c, x, cutoff),
        Command::OracleCheck { scope } => oracle_check(scope, seed),
    }
}

/// Runs `command` on a pool of `threads` workers (all cores for 0).
pub fn execute_with_threads(command: &Command, seed: u64, threads: usize) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Validation(format!("cannot start {threads} threads: {e}")))?;
    pool.install(|| execute(command, seed))
}

/// Parses a config file: `key=value` per line, `#` comments, blank lines
/// ignored. The `subcommand` key names the command.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Validation(format!("config line {}: expected key=value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Validation(format!("config line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

const SUBCOMMANDS: [&str; 9] = [
    "constants",
    "moment",
    "gamma",
    "diagonal",
    "variance-t",
    "variance-s",
    "variance-n",
    "ratios",
    "oracle-check",
];

/// Splices config entries into the argument list as flags placed directly
/// after the subcommand, so explicit flags (which come later) win.
pub fn merge_config(args: Vec<OsString>, entries: &[(String, String)]) -> Result<Vec<OsString>> {
    let mut flags: Vec<OsString> = Vec::new();
    let mut sub_from_config = None;
    for (k, v) in entries {
        match k.as_str() {
            "subcommand" => sub_from_config = Some(v.clone()),
            "config" => return Err(Error::Validation("config files cannot nest".into())),
            _ => match v.as_str() {
                "true" => flags.push(format!("--{k}").into()),
                "false" => {}
                _ => {
                    flags.push(format!("--{k}").into());
                    flags.push(v.into());
                }
            },
        }
    }
    let pos = args.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let mut out = args;
    let insert_at = match pos {
        Some(p) => p + 1,
        None => {
            let sub = sub_from_config
                .ok_or_else(|| Error::Validation("no subcommand on the command line or in the config".into()))?;
            out.push(sub.into());
            out.len()
        }
    };
    out.splice(insert_at..insert_at, flags);
    Ok(out)
}

fn write_output(global: &GlobalArgs, text: &str) -> Result<()> {
    match &global.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Full CLI run; returns the process exit code.
pub fn main_with_args(args: Vec<OsString>) -> i32 {
    let args = match config_path(&args) {
        Some(path) => {
            let merged = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
                .and_then(|t| parse_config(&t))
                .and_then(|entries| merge_config(args, &entries));
            match merged {
                Ok(a) => a,
                Err(e) => return report_error(&e),
            }
        }
        None => args,
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = execute_with_threads(&cli.command, cli.global.seed, cli.global.threads)
        .and_then(|report| write_output(&cli.global, &report.render(cli.global.format)).map(|_| report));
    match result {
        Ok(report) => {
            eprintln!("{}", report.summary);
            if report.failed {
                1
            } else {
                0
            }
        }
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &Error) -> i32 {
    let cat = e.category();
    let mut line = String::new();
    let _ = write!(line, "error[{}]: {e}", cat.as_str());
    eprintln!("{line}");
    cat.exit_code()
}
