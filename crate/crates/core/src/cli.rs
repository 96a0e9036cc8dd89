//! Command-line front end.
//!
//! Human output is line based: optional `step …` trace lines, then one
//! `player <i> <value>` line per player, then `total <value>`. Machine output
//! is a single JSON document with the fields `command`, `players`, `values`,
//! `total` and `trace`, holding the same numbers.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::apportionment::{apportion_isv, coalition_game_from_regions, dhondt, game_from_approvals, ApportionmentError};
use crate::approx::{
    decode_query, sample_shapley, sample_shapley_matrix, SampleError, SamplerConfig, SubprocessOracle, DEFAULT_SAMPLES,
};
use crate::coalition::Coalition;
use crate::format::{self, parse_rational, rational_text, FormatError};
use crate::game::{harsanyi_dividends, in_core, is_convex, is_positive, is_size_bounded, shapley_exact, shapley_matrix_exact};
use crate::isv::{indivisible_shapley, IsvEvent, IsvResult};
use crate::large::{isv_large_traced, normalize_attributions, LargeError, DEFAULT_ALPHA};
use crate::matching::isv_allocation;
use crate::scalar::Scalar;
use crate::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_ORACLE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "isv", version, about = "Shapley values and indivisible Shapley values of coalitional games")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = OutputFormat::Human, global = true)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OutputFormat {
    Human,
    Machine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact Shapley value of a game file.
    Shapley { game: PathBuf },
    /// Nonzero Harsanyi dividends of a game file.
    Dividends { game: PathBuf },
    /// Convexity, positivity and size-boundedness; core membership with --vector.
    Check {
        game: PathBuf,
        /// Comma-separated payoff vector, e.g. `1,1/2,0`.
        #[arg(long)]
        vector: Option<String>,
    },
    /// Indivisible Shapley value of a game file.
    Isv { game: PathBuf },
    /// Exact Shapley value matrix of a game file.
    Matrix { game: PathBuf },
    /// Sampled Shapley value (or matrix) of an external oracle.
    Sample {
        n: usize,
        /// Shell command speaking the query protocol.
        #[arg(long)]
        oracle: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        matrix: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Average over all permutations instead of sampling.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Greedy integer payoffs for an external oracle.
    Large {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        total: u64,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Assigns jointly owned objects to owners.
    Allocate { owners: PathBuf },
    /// Seat apportionment from approval ballots.
    Apportion {
        ballots: PathBuf,
        #[arg(long)]
        seats: u64,
    },
    /// D'Hondt seat apportionment.
    Dhondt {
        #[arg(required = true)]
        votes: Vec<u64>,
        #[arg(long)]
        seats: u64,
    },
    /// Seat game of a party coalition over regional vote tables, and its
    /// indivisible Shapley value.
    Coalition {
        regional: PathBuf,
        /// Member parties, comma separated; all parties by default.
        #[arg(long)]
        members: Option<String>,
    },
    /// Answers protocol queries on standard input from a game file.
    #[command(hide = true)]
    Oracle { game: PathBuf },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: FormatError },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Oracle(String),
    #[error("write failed: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Oracle(_) => EXIT_ORACLE,
            _ => EXIT_INVALID,
        }
    }

    fn invalid(e: impl fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<SampleError> for CliError {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::Oracle { .. } => CliError::Oracle(e.to_string()),
            other => CliError::invalid(other),
        }
    }
}

impl From<LargeError> for CliError {
    fn from(e: LargeError) -> Self {
        match e {
            LargeError::Sampling(inner) => inner.into(),
            other => CliError::invalid(other),
        }
    }
}

/// A printed number: integers stay JSON numbers, everything else is text.
#[derive(Serialize, Clone, Debug)]
#[serde(untagged)]
enum Cell {
    Int(i64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(v) => f.write_str(v),
        }
    }
}

impl From<&Rational> for Cell {
    fn from(value: &Rational) -> Self {
        match value.to_i64_exact() {
            Some(v) => Cell::Int(v),
            None => Cell::Text(rational_text(value)),
        }
    }
}

impl From<f64> for Cell {
    fn from(value: f64) -> Self {
        Cell::Text(value.to_string())
    }
}

impl From<i64> for Cell {
    fn from(value: i64) -> Self {
        Cell::Int(value)
    }
}

#[derive(Serialize, Debug)]
#[serde(untagged)]
enum Values {
    Players(Vec<Cell>),
    Rows(Vec<Vec<Cell>>),
    Labeled(Vec<(String, Cell)>),
    Flags(Vec<(&'static str, bool)>),
}

#[derive(Serialize, Debug)]
struct Report {
    command: &'static str,
    players: usize,
    values: Values,
    total: Cell,
    trace: Vec<Vec<Cell>>,
    /// Human rendering of `trace`, one line per entry.
    #[serde(skip)]
    trace_lines: Vec<String>,
}

impl Report {
    fn new(command: &'static str, players: usize, values: Values, total: Cell) -> Self {
        Report {
            command,
            players,
            values,
            total,
            trace: Vec::new(),
            trace_lines: Vec::new(),
        }
    }

    fn push_trace(&mut self, human: String, cells: Vec<Cell>) {
        self.trace_lines.push(human);
        self.trace.push(cells);
    }

    fn with_isv_trace(mut self, result: &IsvResult, label: impl Fn(usize) -> usize) -> Self {
        for (k, step) in result.trace.iter().enumerate() {
            let player = label(step.player) as i64;
            let mut cells = vec![Cell::Int(player)];
            match step.event {
                IsvEvent::FloorAssigned(units) => {
                    cells.push(Cell::Text("floor".into()));
                    cells.push(Cell::Int(units));
                }
                IsvEvent::RemovedZero => cells.push(Cell::Text("remove".into())),
                IsvEvent::GrantedUnit => cells.push(Cell::Text("grant".into())),
            }
            let text: Vec<String> = cells.iter().map(Cell::to_string).collect();
            self.push_trace(format!("step {k} {}", text.join(" ")), cells);
        }
        self
    }

    fn render(&self, style: OutputFormat, out: &mut dyn Write) -> io::Result<()> {
        if style == OutputFormat::Machine {
            serde_json::to_writer(&mut *out, self)?;
            return writeln!(out);
        }
        for line in &self.trace_lines {
            writeln!(out, "{line}")?;
        }
        match &self.values {
            Values::Players(cells) => {
                for (i, v) in cells.iter().enumerate() {
                    writeln!(out, "player {i} {v}")?;
                }
            }
            Values::Rows(rows) => {
                for (i, row) in rows.iter().enumerate() {
                    let text: Vec<String> = row.iter().map(Cell::to_string).collect();
                    writeln!(out, "row {i} {}", text.join(" "))?;
                }
            }
            Values::Labeled(entries) => {
                for (label, v) in entries {
                    writeln!(out, "{label} {v}")?;
                }
            }
            Values::Flags(flags) => {
                for (name, flag) in flags {
                    writeln!(out, "{name}: {}", if *flag { "yes" } else { "no" })?;
                }
            }
        }
        writeln!(out, "total {}", self.total)
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> Result<T, FormatError>) -> Result<T, CliError> {
    let text = read_file(path)?;
    parse(&text).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn rational_cells(values: &[Rational]) -> Vec<Cell> {
    values.iter().map(Cell::from).collect()
}

fn int_total(values: &[i64]) -> Cell {
    Cell::Int(values.iter().sum())
}

fn float_total(values: &[f64]) -> Cell {
    Cell::from(values.iter().fold(0.0, |acc, v| acc + v))
}

fn parse_players_list(text: &str) -> Result<Coalition, CliError> {
    format::parse_coalition(1, text).map_err(|e| CliError::Invalid(format!("invalid player list `{text}`: {e}")))
}

fn sampler(k: usize, seed: u64, workers: usize, exhaustive: bool) -> SamplerConfig {
    SamplerConfig {
        exhaustive,
        ..SamplerConfig::sampled(k, seed).with_workers(workers.max(1))
    }
}

fn spawn_oracle(command: &str, n: usize) -> Result<SubprocessOracle, CliError> {
    SubprocessOracle::shell(command, n).map_err(|e| CliError::Oracle(e.to_string()))
}

fn execute(command: Command, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<Option<Report>, CliError> {
    let report = match command {
        Command::Shapley { game } => {
            let game = load(&game, format::parse_game)?;
            let sv = shapley_exact(&game);
            Report::new("shapley", game.players(), Values::Players(rational_cells(&sv)), game.grand_value().into())
        }
        Command::Dividends { game } => {
            let game = load(&game, format::parse_game)?;
            let dividends = harsanyi_dividends(&game);
            let entries = dividends
                .nonzero()
                .map(|(s, d)| (format!("dividend {}", format::write_coalition(s)), Cell::from(d)))
                .collect();
            Report::new("dividends", game.players(), Values::Labeled(entries), game.grand_value().into())
        }
        Command::Check { game, vector } => {
            let game = load(&game, format::parse_game)?;
            let mut flags = vec![
                ("convex", is_convex(&game)),
                ("positive", is_positive(&game)),
                ("size-bounded", is_size_bounded(&game)),
            ];
            if let Some(text) = vector {
                let payoff = text
                    .split(',')
                    .map(|t| parse_rational(t.trim()).ok_or_else(|| CliError::Invalid(format!("invalid payoff `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                flags.push(("in-core", in_core(&game, &payoff).map_err(CliError::invalid)?));
            }
            Report::new("check", game.players(), Values::Flags(flags), game.grand_value().into())
        }
        Command::Isv { game } => {
            let game = load(&game, format::parse_game)?;
            let result = indivisible_shapley(&game).map_err(CliError::invalid)?;
            Report::new(
                "isv",
                game.players(),
                Values::Players(result.payoffs.iter().map(|&v| Cell::Int(v)).collect()),
                int_total(&result.payoffs),
            )
            .with_isv_trace(&result, |i| i)
        }
        Command::Matrix { game } => {
            let game = load(&game, format::parse_game)?;
            let m = shapley_matrix_exact(&game);
            let rows = m.rows().map(rational_cells).collect();
            Report::new("matrix", game.players(), Values::Rows(rows), game.grand_value().into())
        }
        Command::Sample {
            n,
            oracle,
            k,
            seed,
            matrix,
            workers,
            exhaustive,
        } => {
            let oracle = spawn_oracle(&oracle, n)?;
            let cfg = sampler(k, seed, workers, exhaustive);
            if matrix {
                let m = sample_shapley_matrix::<f64, _>(&oracle, &cfg)?;
                let total = float_total(&m.rows().flatten().copied().collect::<Vec<_>>());
                let rows = m.rows().map(|r| r.iter().map(|&v| Cell::from(v)).collect()).collect();
                Report::new("sample", n, Values::Rows(rows), total)
            } else {
                let sv = sample_shapley::<f64, _>(&oracle, &cfg)?;
                Report::new(
                    "sample",
                    n,
                    Values::Players(sv.iter().map(|&v| Cell::from(v)).collect()),
                    float_total(&sv),
                )
            }
        }
        Command::Large {
            oracle,
            n,
            total,
            alpha,
            k,
            seed,
            workers,
        } => {
            if total == 0 {
                return Err(CliError::invalid(LargeError::ZeroUnits));
            }
            let oracle = spawn_oracle(&oracle, n)?;
            let cfg = sampler(k, seed, workers, false);
            let phi = sample_shapley::<f64, _>(&oracle, &cfg)?;
            let matrix = sample_shapley_matrix::<f64, _>(&oracle, &cfg)?;
            let (phi, matrix) = normalize_attributions(&phi, &matrix, total as f64)?;
            let (grants, steps) = isv_large_traced(&phi, &matrix, total, alpha)?;
            let mut report = Report::new(
                "large",
                n,
                Values::Players(grants.iter().map(|&v| Cell::Int(v)).collect()),
                int_total(&grants),
            );
            for (k, step) in steps.iter().enumerate() {
                report.push_trace(format!("step {k} {}", step.player), vec![Cell::Int(step.player as i64)]);
            }
            report
        }
        Command::Allocate { owners } => {
            let list = load(&owners, format::parse_owners)?;
            let (allocation, counts) = isv_allocation(&list);
            let mut report = Report::new(
                "allocate",
                list.players(),
                Values::Players(counts.iter().map(|&v| Cell::Int(v)).collect()),
                int_total(&counts),
            );
            for (object, &player) in allocation.assignment.iter().enumerate() {
                report.push_trace(
                    format!("{object} -> {player}"),
                    vec![Cell::Int(object as i64), Cell::Int(player as i64)],
                );
            }
            report
        }
        Command::Apportion { ballots, seats } => {
            let profile = load(&ballots, format::parse_ballots)?;
            let game = game_from_approvals(&profile, seats).map_err(CliError::invalid)?;
            let result = indivisible_shapley(&game).map_err(CliError::invalid)?;
            debug_assert_eq!(Ok(result.payoffs.clone()), apportion_isv(&profile, seats));
            Report::new(
                "apportion",
                game.players(),
                Values::Players(result.payoffs.iter().map(|&v| Cell::Int(v)).collect()),
                int_total(&result.payoffs),
            )
            .with_isv_trace(&result, |i| i)
        }
        Command::Dhondt { votes, seats } => {
            if seats == 0 {
                return Err(CliError::invalid(ApportionmentError::ZeroSeats));
            }
            let won = dhondt(&votes, seats).map_err(CliError::invalid)?;
            Report::new(
                "dhondt",
                votes.len(),
                Values::Players(won.iter().map(|&v| Cell::Int(v)).collect()),
                int_total(&won),
            )
        }
        Command::Coalition { regional, members } => {
            let (rv, outsiders) = load(&regional, format::parse_regions)?;
            let members = match members {
                Some(text) => parse_players_list(&text)?,
                None => Coalition::grand(rv.parties().len()),
            };
            let game = coalition_game_from_regions(&rv, members, &outsiders).map_err(CliError::invalid)?;
            let result = indivisible_shapley(&game).map_err(CliError::invalid)?;
            let parties: Vec<usize> = members.iter().collect();
            let mut report = Report::new(
                "coalition",
                game.players(),
                Values::Players(result.payoffs.iter().map(|&v| Cell::Int(v)).collect()),
                game.grand_value().into(),
            );
            for (s, value) in game.nonzero_entries() {
                let merged: Coalition = s.iter().map(|k| parties[k]).collect();
                let label = format::write_coalition(merged);
                report.push_trace(
                    format!("value {label} {}", Cell::from(value)),
                    vec![Cell::Text(label), value.into()],
                );
            }
            report
        }
        Command::Oracle { game } => {
            let game = load(&game, format::parse_game)?;
            serve_oracle(&game, input, out)?;
            return Ok(None);
        }
    };
    Ok(Some(report))
}

/// Replies to one query line at a time until end of input.
fn serve_oracle(game: &crate::Game, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let n = game.players();
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let query = line.trim();
        let coalition =
            decode_query(query, n).ok_or_else(|| CliError::Invalid(format!("malformed query `{query}`")))?;
        let value = game.value(coalition);
        if value.denom().is_one() || value.is_zero() {
            writeln!(out, "{}", value.numer())?;
        } else {
            writeln!(out, "{}", value.to_f64())?;
        }
        out.flush()?;
    }
}

/// Runs the command line `args` (program name first) with the given input
/// and output streams and returns the exit status.
pub fn run_with_input<I, S>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let style = cli.format;
    let outcome = execute(cli.command, input, out)
        .and_then(|report| report.map_or(Ok(()), |r| r.render(style, out).map_err(CliError::from)));
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the command line reading standard input.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdin = io::stdin();
    let mut input = stdin.lock();
    run_with_input(args, &mut input, out, err)
}
