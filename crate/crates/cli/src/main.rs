use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use castor::macro_cert::{build_certificate, cross_check_grid, Certificate};
use castor::search::{emit_table, run_search_with, SearchConfig, SearchReport};
use castor::sim::{Configuration, Step};
use castor::{
    count_raw_machines, decide, parse_machine, DeciderLimits, KnownBounds, Mode, RunKind,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable naming a known-bounds file.
const BOUNDS_ENV: &str = "CASTOR_KNOWN_BOUNDS";

#[derive(Parser)]
#[command(
    name = "castor",
    version,
    about = "Search and verify blank-to-blank halting Turing machines"
)]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, global = true, default_value_t = Format::Plain)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    /// Tab-separated line records.
    Records,
    /// JSON documents (search and table only).
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine from the blank tape.
    Simulate {
        machine: String,
        #[arg(long, default_value_t = 10_000_000)]
        max_steps: u64,
        /// Print one line per step: step, state, head, read, written.
        #[arg(long)]
        trace: bool,
    },
    /// Classify a single machine.
    Decide {
        machine: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Enumerate and decide a whole (states, symbols) class.
    Search(SearchArgs),
    /// Check the macro certificate of the six-state candidate.
    Verify {
        /// Verify this exported certificate instead of the built-in one.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Also cross-check every macro rule on k0 ≤ 5, k1 ≤ 25, k2 ≤ 50.
        #[arg(long)]
        cross_check_grid: bool,
        /// Print the certificate in its line format.
        #[arg(long)]
        export: bool,
    },
    /// Number of raw transition tables, (2m(n+1))^(nm).
    Count {
        #[arg(long)]
        states: u32,
        #[arg(long, default_value_t = 2)]
        symbols: u32,
    },
    /// Render a states × symbols grid from saved search reports.
    Table { reports: Vec<PathBuf> },
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = 100_000)]
    max_steps: u64,
    #[arg(long, default_value_t = 16)]
    backward_depth: usize,
    #[arg(long, default_value_t = 4)]
    cycler_memory: usize,
    /// Only exhaustive deciders: disables the escape rule.
    #[arg(long)]
    strict: bool,
    /// Known-bounds file; defaults to $CASTOR_KNOWN_BOUNDS, then the built-in table.
    #[arg(long)]
    bounds: Option<PathBuf>,
    /// Ignore all known bounds.
    #[arg(long, conflicts_with = "bounds")]
    no_bounds: bool,
    /// Disable the translated-cycler check.
    #[arg(long)]
    no_translated: bool,
}

impl LimitArgs {
    fn limits(&self) -> Result<DeciderLimits> {
        let known_bounds = if self.no_bounds {
            KnownBounds::empty()
        } else if let Some(p) = &self.bounds {
            load_bounds(p)?
        } else if let Some(p) = std::env::var_os(BOUNDS_ENV) {
            load_bounds(Path::new(&p))?
        } else {
            KnownBounds::builtin()
        };
        let limits = DeciderLimits {
            max_steps: self.max_steps,
            backward_depth: self.backward_depth,
            known_bounds,
            escape_enabled: true,
            translated_enabled: !self.no_translated,
            cycler_memory: self.cycler_memory,
        };
        Ok(if self.strict { limits.strict() } else { limits })
    }
}

fn load_bounds(p: &Path) -> Result<KnownBounds> {
    KnownBounds::load(p).with_context(|| format!("loading known bounds from {}", p.display()))
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    symbols: usize,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long, default_value = "default")]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Resume from and periodically save to this file.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one record per machine here.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Sample: stop each subtree after this many nodes.
    #[arg(long)]
    node_budget: Option<u64>,
}

/// Failure classes, mapped to exit codes.
enum Outcome {
    Conclusive,
    Inconclusive,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Conclusive) => ExitCode::from(0),
        Ok(Outcome::Inconclusive) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let outcome = match &cli.command {
        Command::Simulate {
            machine,
            max_steps,
            trace,
        } => simulate(&mut out, cli.format, machine, *max_steps, *trace)?,
        Command::Decide { machine, limits } => {
            let table = parse_machine(machine)?;
            let d = decide(&table, &limits.limits()?);
            match cli.format {
                Format::Records => writeln!(out, "{machine}\t{}\t{}", d.kind(), d.detail())?,
                _ => writeln!(out, "{d}")?,
            }
            if d.is_conclusive() {
                Outcome::Conclusive
            } else {
                Outcome::Inconclusive
            }
        }
        Command::Search(args) => search(&mut out, cli.format, args)?,
        Command::Verify {
            certificate,
            cross_check_grid: grid,
            export,
        } => verify(&mut out, certificate.as_deref(), *grid, *export)?,
        Command::Count { states, symbols } => {
            if *states == 0 || *symbols < 2 {
                bail!("need at least one state and two symbols");
            }
            writeln!(out, "{}", count_raw_machines(*states, *symbols))?;
            Outcome::Conclusive
        }
        Command::Table { reports } => {
            let mut loaded = Vec::new();
            for p in reports {
                let text =
                    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                loaded.push(
                    SearchReport::from_json(&text)
                        .with_context(|| format!("parsing {}", p.display()))?,
                );
            }
            let doc = emit_table(&loaded);
            match cli.format {
                Format::Json => writeln!(out, "{}", doc.to_json())?,
                Format::Records => {
                    for c in &doc.cells {
                        let steps = c.steps.map_or("—".to_owned(), |s| s.to_string());
                        let machine = c.machine.as_deref().unwrap_or("—");
                        writeln!(
                            out,
                            "{}\t{}\t{steps}\t{}\t{machine}",
                            c.n_states, c.n_symbols, c.proven
                        )?;
                    }
                }
                Format::Plain => write!(out, "{}", doc.render_text())?,
            }
            Outcome::Conclusive
        }
    };
    out.flush()?;
    Ok(outcome)
}

fn simulate(
    out: &mut impl Write,
    format: Format,
    machine: &str,
    max_steps: u64,
    trace: bool,
) -> Result<Outcome> {
    let table = parse_machine(machine)?;
    let mut c = Configuration::start();
    while c.steps < max_steps {
        let (state, head, read) = (c.state, c.head, c.read());
        let step = c.step(&table);
        if trace {
            if let Some(t) = table.get(state, read) {
                writeln!(
                    out,
                    "{}\t{}\t{head}\t{read}\t{}",
                    c.steps,
                    state.letter(),
                    t.write
                )?;
            }
        }
        match step {
            Step::Continue => {}
            Step::Halted => break,
            Step::Undefined(s, sym) => {
                out.flush()?;
                bail!(
                    "undefined transition ({}, {sym}) reached at step {}",
                    s.letter(),
                    c.steps
                )
            }
        }
    }
    let kind = if !c.is_halted() {
        RunKind::Cutoff
    } else if c.tape.is_blank() {
        RunKind::HaltedBlank
    } else {
        RunKind::HaltedDirty
    };
    match format {
        Format::Records => writeln!(out, "{machine}\t{}\t{}\t{}", kind.as_str(), c.steps, c.head)?,
        _ => {
            writeln!(out, "{} {}", kind.as_str(), c.steps)?;
            writeln!(out, "head {}", c.head)?;
        }
    }
    Ok(if kind == RunKind::Cutoff {
        Outcome::Inconclusive
    } else {
        Outcome::Conclusive
    })
}

fn search(out: &mut impl Write, format: Format, args: &SearchArgs) -> Result<Outcome> {
    let config = SearchConfig {
        n_states: args.states,
        n_symbols: args.symbols,
        limits: args.limits.limits()?,
        mode: args.mode,
        strict: args.limits.strict,
        workers: args.workers,
        checkpoint: args.checkpoint.clone(),
        node_budget: args.node_budget,
    };
    let report = match &args.records {
        Some(p) => {
            let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(f);
            let r = run_search_with(config, Some(&mut w))?;
            w.flush()?;
            r
        }
        None if format == Format::Records => {
            run_search_with(config, Some(&mut *out as &mut dyn Write))?
        }
        None => run_search_with(config, None)?,
    };
    if let Some(p) = &args.out {
        fs::write(p, report.to_json()).with_context(|| format!("writing {}", p.display()))?;
    }
    match format {
        Format::Json => writeln!(out, "{}", report.to_json())?,
        Format::Records => {
            if let Some(c) = &report.champion {
                writeln!(out, "champion\t{}\t{}\t{}", c.machine, c.steps, c.proven)?;
            }
            for (k, v) in &report.counts {
                writeln!(out, "count\t{k}\t{v}")?;
            }
            writeln!(out, "nodes\t{}", report.nodes)?;
        }
        Format::Plain => write_summary(out, &report)?,
    }
    eprintln!("wall time {:.3}s", report.wall_time.as_secs_f64());
    Ok(if report.unknown.total == 0 && report.complete {
        Outcome::Conclusive
    } else {
        Outcome::Inconclusive
    })
}

fn write_summary(out: &mut impl Write, r: &SearchReport) -> io::Result<()> {
    let c = &r.config;
    writeln!(
        out,
        "class ({}, {}) mode {} strict {} max-steps {}",
        c.n_states,
        c.n_symbols,
        c.mode.as_str(),
        c.strict,
        c.max_steps
    )?;
    match &r.champion {
        Some(ch) => writeln!(
            out,
            "champion {} {} steps{}",
            ch.machine,
            ch.steps,
            if ch.proven { " (proven)" } else { "" }
        )?,
        None => writeln!(out, "champion none")?,
    }
    for (k, v) in &r.counts {
        writeln!(out, "{k} {v}")?;
    }
    for (k, v) in &r.reasons {
        writeln!(out, "  {k} {v}")?;
    }
    writeln!(out, "machines {}", r.emitted())?;
    writeln!(out, "nodes {} pruned {}", r.nodes, r.pruned_equivalent)?;
    if !r.complete {
        writeln!(out, "sampled: node budget reached, best so far only")?;
    }
    Ok(())
}

fn verify(
    out: &mut impl Write,
    certificate: Option<&Path>,
    grid: bool,
    export: bool,
) -> Result<Outcome> {
    let cert = match certificate {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Certificate::parse(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => build_certificate(),
    };
    cert.verify().context("certificate rejected")?;
    if export {
        write!(out, "{}", cert.export())?;
    }
    writeln!(
        out,
        "certificate ok: {} macro steps, total {}, cross-check passed",
        cert.steps.len(),
        cert.total
    )?;
    if grid {
        let g = cross_check_grid(5, 25, 50);
        writeln!(
            out,
            "grid: {} of {} in-domain macro steps agree with simulation ({} out of domain)",
            g.passed, g.checked, g.out_of_domain
        )?;
        if g.passed != g.checked {
            return Ok(Outcome::Inconclusive);
        }
    }
    Ok(Outcome::Conclusive)
}
