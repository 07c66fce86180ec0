//! Command-line front end: argument parsing, experiment dispatch, and the
//! CSV artifact writers.
//!
//! Every artifact starts with `#`-prefixed metadata lines pinning the full
//! scenario, seed, and conventions, so a CSV is self-describing and a rerun
//! with the same arguments reproduces it byte for byte.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::precoders::{PrecoderKind, BWP_CELL_LIMIT};
use crate::sim::{
    capture_constellation, run_ber_experiment, run_oracle_dominance, BerTable, ConstellationDump,
};

const LONG_ABOUT: &str = "\
Compares one-bit downlink precoding designs (passive, max-min, max-sum-min, \
bwp) by seeded Monte-Carlo simulation over frequency-selective Rayleigh \
channels and writes CSV artifacts.

The active designs shape the interference their slot causes later, which \
costs taps-1 slots of lookahead latency at the transmitter. Trials run in \
parallel; set ONEBIT_SIM_WORKERS to pin the worker count (results are \
identical for any value).";

#[derive(Debug, Parser)]
#[command(name = "onebit-sim", version, about = "One-bit MIMO precoding simulator", long_about = LONG_ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte-Carlo BER sweep over an SNR grid.
    BerSweep(BerSweepArgs),
    /// BER comparison across channel tap counts.
    LSweep(LSweepArgs),
    /// Rotated-sample dump of one noise-free precoded block.
    Constellation(ConstellationArgs),
    /// Exhaustive-search dominance check of the LP designs at toy sizes.
    OracleCheck(OracleCheckArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Base-station antennas (N).
    #[arg(long, default_value_t = 16)]
    antennas: usize,
    /// Single-antenna users (K).
    #[arg(long, default_value_t = 4)]
    users: usize,
    /// PSK constellation order (D); the LP designs need at least 4.
    #[arg(long, default_value_t = 8)]
    psk: u32,
    /// Coherence-block length in symbol slots.
    #[arg(long, default_value_t = 256)]
    block_length: usize,
    /// Total transmit power ρ.
    #[arg(long, default_value_t = 1.0)]
    power: f64,
    /// Master seed; fixes every random draw.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// Comma-separated designs to run: passive, max-min, max-sum-min, bwp.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "passive,max-min,max-sum-min"
    )]
    methods: Vec<String>,
    /// Allow block-wise LPs beyond antennas × block-length = 4096 cells.
    #[arg(long)]
    allow_large_bwp: bool,
}

#[derive(Debug, Args)]
struct BerSweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Channel taps (L); the active designs look ahead L-1 slots.
    #[arg(long, default_value_t = 3)]
    taps: usize,
    #[command(flatten)]
    methods: MethodArgs,
    /// Comma-separated SNR grid in dB (SNR = power / noise variance).
    #[arg(long, value_delimiter = ',', default_value = "0,5,10,15,20")]
    snr_db: Vec<f64>,
    /// Paired Monte-Carlo trials.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct LSweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Comma-separated tap counts to compare.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    taps_list: Vec<usize>,
    #[command(flatten)]
    methods: MethodArgs,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',', default_value = "20")]
    snr_db: Vec<f64>,
    /// Paired Monte-Carlo trials per tap count.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ConstellationArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Channel taps (L).
    #[arg(long, default_value_t = 3)]
    taps: usize,
    #[command(flatten)]
    methods: MethodArgs,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OracleCheckArgs {
    /// Seed of the random instances.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random instances per toy scenario.
    #[arg(long, default_value_t = 100)]
    instances: usize,
}

/// A fully validated run request; what [`run`] executes.
#[derive(Clone, Debug, PartialEq)]
pub enum RunSpec {
    /// BER-vs-SNR sweep.
    BerSweep {
        /// Scenario; the noise variance is derived per SNR point.
        config: SystemConfig<f64>,
        /// Designs under test.
        methods: Vec<PrecoderKind>,
        /// SNR grid in dB.
        snr_db: Vec<f64>,
        /// Trials per cell.
        trials: usize,
        /// CSV destination.
        out: PathBuf,
        /// Cell cap forwarded to the block-wise design.
        bwp_limit: Option<usize>,
    },
    /// BER-vs-tap-count sweep.
    LSweep {
        /// Scenario template; `n_taps` is overridden per tap count.
        config: SystemConfig<f64>,
        /// Tap counts under test.
        taps_list: Vec<usize>,
        /// Designs under test.
        methods: Vec<PrecoderKind>,
        /// SNR grid in dB.
        snr_db: Vec<f64>,
        /// Trials per cell.
        trials: usize,
        /// CSV destination.
        out: PathBuf,
        /// Cell cap forwarded to the block-wise design.
        bwp_limit: Option<usize>,
    },
    /// Noise-free rotated-sample dump.
    Constellation {
        /// Scenario to capture.
        config: SystemConfig<f64>,
        /// Designs under test.
        methods: Vec<PrecoderKind>,
        /// CSV destination.
        out: PathBuf,
        /// Cell cap forwarded to the block-wise design.
        bwp_limit: Option<usize>,
    },
    /// Exhaustive-vs-LP dominance sweep; prints, writes no file.
    OracleCheck {
        /// Seed of the random instances.
        seed: u64,
        /// Instances per toy scenario.
        instances: usize,
    },
}

/// Parses command-line arguments into a validated [`RunSpec`].
pub fn parse_cli<I, S>(args: I) -> Result<RunSpec>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    build_spec(cli)
}

/// Full CLI entry point: parse, run, and map the outcome to an exit code
/// (0 success, 1 runtime failure, 2 usage error). `--help`/`--version` go
/// through clap's standard handling.
pub fn cli_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let spec = match build_spec(cli) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(&spec) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn build_spec(cli: Cli) -> Result<RunSpec> {
    match cli.command {
        Command::BerSweep(args) => {
            let config = scenario_config(&args.scenario, args.taps)?;
            let (methods, bwp_limit) = parse_methods(&args.methods, &config)?;
            check_grid(&args.snr_db, args.trials)?;
            Ok(RunSpec::BerSweep {
                config,
                methods,
                snr_db: args.snr_db,
                trials: args.trials,
                out: args.out,
                bwp_limit,
            })
        }
        Command::LSweep(args) => {
            if args.taps_list.is_empty() || args.taps_list.contains(&0) {
                return Err(Error::InvalidArgument(
                    "--taps-list needs at least one positive tap count".into(),
                ));
            }
            let max_taps = *args.taps_list.iter().max().expect("non-empty");
            let config = scenario_config(&args.scenario, max_taps)?;
            let (methods, bwp_limit) = parse_methods(&args.methods, &config)?;
            check_grid(&args.snr_db, args.trials)?;
            Ok(RunSpec::LSweep {
                config,
                taps_list: args.taps_list,
                methods,
                snr_db: args.snr_db,
                trials: args.trials,
                out: args.out,
                bwp_limit,
            })
        }
        Command::Constellation(args) => {
            let config = scenario_config(&args.scenario, args.taps)?;
            let (methods, bwp_limit) = parse_methods(&args.methods, &config)?;
            Ok(RunSpec::Constellation {
                config,
                methods,
                out: args.out,
                bwp_limit,
            })
        }
        Command::OracleCheck(args) => {
            if args.instances == 0 {
                return Err(Error::InvalidArgument(
                    "--instances must be positive".into(),
                ));
            }
            Ok(RunSpec::OracleCheck {
                seed: args.seed,
                instances: args.instances,
            })
        }
    }
}

fn scenario_config(args: &ScenarioArgs, taps: usize) -> Result<SystemConfig<f64>> {
    let config = SystemConfig {
        n_antennas: args.antennas,
        n_users: args.users,
        n_taps: taps,
        psk_order: args.psk,
        total_power: args.power,
        // Sweeps derive the noise variance from each SNR point; this field
        // only seeds validation (SNR 0 dB).
        noise_variance: args.power,
        block_length: args.block_length,
        rng_seed: args.seed,
    };
    config.validate()?;
    if config.psk_order < 4 {
        return Err(Error::InvalidArgument(
            "--psk must be at least 4: the LP designs are undefined for BPSK".into(),
        ));
    }
    Ok(config)
}

fn parse_methods(
    args: &MethodArgs,
    config: &SystemConfig<f64>,
) -> Result<(Vec<PrecoderKind>, Option<usize>)> {
    if args.methods.is_empty() {
        return Err(Error::InvalidArgument(
            "--methods must name at least one design".into(),
        ));
    }
    let methods: Vec<PrecoderKind> = args
        .methods
        .iter()
        .map(|name| name.parse())
        .collect::<Result<_>>()?;
    let bwp_limit = if args.allow_large_bwp {
        None
    } else {
        Some(BWP_CELL_LIMIT)
    };
    if methods.contains(&PrecoderKind::Bwp) {
        let cells = config.n_antennas * config.block_length;
        if bwp_limit.is_some_and(|limit| cells > limit) {
            return Err(Error::InvalidArgument(format!(
                "bwp would solve one LP over antennas × block-length = {cells} cells \
                 (cap {BWP_CELL_LIMIT}); shrink the scenario or pass --allow-large-bwp"
            )));
        }
    }
    Ok((methods, bwp_limit))
}

fn check_grid(snr_db: &[f64], trials: usize) -> Result<()> {
    if snr_db.is_empty() || snr_db.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument(
            "--snr-db needs a non-empty finite grid".into(),
        ));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("--trials must be positive".into()));
    }
    Ok(())
}

/// Executes a validated run request.
pub fn run(spec: &RunSpec) -> Result<()> {
    match spec {
        RunSpec::BerSweep {
            config,
            methods,
            snr_db,
            trials,
            out,
            bwp_limit,
        } => {
            let table = with_worker_pool(|| {
                run_ber_experiment(config, methods, snr_db, *trials, *bwp_limit)
            })?;
            emit_ber_csv(&table, out)?;
            println!(
                "wrote {}: {} methods x {} SNR points, {} trials",
                out.display(),
                methods.len(),
                snr_db.len(),
                trials
            );
            Ok(())
        }
        RunSpec::LSweep {
            config,
            taps_list,
            methods,
            snr_db,
            trials,
            out,
            bwp_limit,
        } => {
            let tables = with_worker_pool(|| {
                taps_list
                    .iter()
                    .map(|&taps| {
                        let scenario = SystemConfig {
                            n_taps: taps,
                            ..config.clone()
                        };
                        let table =
                            run_ber_experiment(&scenario, methods, snr_db, *trials, *bwp_limit)?;
                        Ok((taps, table))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            emit_l_sweep_csv(&tables, out)?;
            println!(
                "wrote {}: {} tap counts x {} methods, {} trials each",
                out.display(),
                taps_list.len(),
                methods.len(),
                trials
            );
            Ok(())
        }
        RunSpec::Constellation {
            config,
            methods,
            out,
            bwp_limit,
        } => {
            let dumps = with_worker_pool(|| {
                methods
                    .iter()
                    .map(|&kind| capture_constellation(config, kind, *bwp_limit))
                    .collect::<Result<Vec<_>>>()
            })?;
            emit_constellation_csv(&dumps, config, out)?;
            println!(
                "wrote {}: {} methods x {} samples",
                out.display(),
                methods.len(),
                config.block_length * config.n_users
            );
            Ok(())
        }
        RunSpec::OracleCheck { seed, instances } => {
            let checks = with_worker_pool(|| run_oracle_dominance::<f64>(*seed, *instances, 1e-7))?;
            let mut violations = 0usize;
            for check in &checks {
                violations += check.violations;
                println!(
                    "N={} K={} L={} {}: {} instances, {} violations, \
                     quantized-excess {:+.3e}, relaxation-deficit {:+.3e}",
                    check.n_antennas,
                    check.n_users,
                    check.n_taps,
                    check.kind,
                    check.instances,
                    check.violations,
                    check.worst_quantized_excess,
                    check.worst_relaxation_deficit
                );
            }
            if violations > 0 {
                println!("oracle-check: FAIL");
                return Err(Error::Numerical(format!(
                    "{violations} dominance violations; the LP designs disagree with the \
                     exhaustive oracle"
                )));
            }
            println!("oracle-check: PASS");
            Ok(())
        }
    }
}

/// Runs `f` under the pool requested by `ONEBIT_SIM_WORKERS`, or the
/// ambient rayon pool when the variable is unset.
fn with_worker_pool<F, R>(f: F) -> Result<R>
where
    F: FnOnce() -> Result<R> + Send,
    R: Send,
{
    match std::env::var("ONEBIT_SIM_WORKERS") {
        Err(_) => f(),
        Ok(raw) => {
            let workers: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "ONEBIT_SIM_WORKERS must be a positive integer, got '{raw}'"
                ))
            })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?;
            pool.install(f)
        }
    }
}

fn scenario_metadata<W: Write>(
    out: &mut W,
    command: &str,
    config: &SystemConfig<f64>,
    taps: Option<usize>,
) -> std::io::Result<()> {
    writeln!(out, "# onebit-sim v{}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# command: {command}")?;
    writeln!(out, "# antennas: {}", config.n_antennas)?;
    writeln!(out, "# users: {}", config.n_users)?;
    if let Some(taps) = taps {
        writeln!(out, "# taps: {taps}")?;
    }
    writeln!(out, "# psk: {}", config.psk_order)?;
    writeln!(out, "# block_length: {}", config.block_length)?;
    writeln!(out, "# power: {}", config.total_power)?;
    writeln!(out, "# seed: {}", config.rng_seed)?;
    writeln!(
        out,
        "# amplitude: gamma = sqrt(power / (2 * antennas)), applied inside the designs"
    )?;
    Ok(())
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn method_labels(methods: &[PrecoderKind]) -> String {
    methods
        .iter()
        .map(|m| m.label())
        .collect::<Vec<_>>()
        .join(",")
}

/// Cell rows of one BER table, sorted by `(method, snr_db)`.
fn sorted_ber_rows(table: &BerTable<f64>) -> Vec<(PrecoderKind, usize)> {
    let mut kinds = table.kinds.clone();
    kinds.sort_by_key(|k| k.label());
    let mut snr_order: Vec<usize> = (0..table.snr_db.len()).collect();
    snr_order.sort_by(|&a, &b| {
        table.snr_db[a]
            .partial_cmp(&table.snr_db[b])
            .expect("finite grid")
    });
    kinds
        .into_iter()
        .flat_map(|kind| snr_order.iter().map(move |&si| (kind, si)))
        .collect()
}

fn write_ber_row<W: Write>(
    out: &mut W,
    prefix: &str,
    table: &BerTable<f64>,
    kind: PrecoderKind,
    snr_index: usize,
) -> std::io::Result<()> {
    let cell = table
        .cell(kind, snr_index)
        .expect("row indices from the table");
    writeln!(
        out,
        "{prefix}{},{},{},{},{},{},{}",
        kind.label(),
        cell.snr_db,
        cell.outcome.bit_errors,
        cell.outcome.bits_total,
        cell.outcome.ber(),
        cell.outcome.ci95_halfwidth(),
        cell.outcome.is_reliable()
    )
}

/// Writes a BER sweep as CSV: metadata comments, a header, then one row
/// per (method, SNR) sorted by method label and ascending SNR.
pub fn write_ber_csv<W: Write>(table: &BerTable<f64>, out: &mut W) -> Result<()> {
    scenario_metadata(out, "ber-sweep", &table.config, Some(table.config.n_taps))?;
    writeln!(out, "# methods: {}", method_labels(&table.kinds))?;
    writeln!(out, "# snr_db: {}", join_f64(&table.snr_db))?;
    writeln!(out, "# trials: {}", table.n_trials)?;
    writeln!(out, "# ci_reliable: false when bit_errors < 20")?;
    writeln!(
        out,
        "method,snr_db,bit_errors,bits_total,ber,ci95_halfwidth,ci_reliable"
    )?;
    for (kind, si) in sorted_ber_rows(table) {
        write_ber_row(out, "", table, kind, si)?;
    }
    Ok(())
}

/// Writes an l-sweep as CSV; like [`write_ber_csv`] with a leading `taps`
/// column, sorted by `(taps, method, snr_db)`.
pub fn write_l_sweep_csv<W: Write>(tables: &[(usize, BerTable<f64>)], out: &mut W) -> Result<()> {
    let (_, first) = tables
        .first()
        .ok_or_else(|| Error::InvalidArgument("no tap counts were run".into()))?;
    scenario_metadata(out, "l-sweep", &first.config, None)?;
    writeln!(
        out,
        "# taps_list: {}",
        tables
            .iter()
            .map(|(l, _)| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )?;
    writeln!(out, "# methods: {}", method_labels(&first.kinds))?;
    writeln!(out, "# snr_db: {}", join_f64(&first.snr_db))?;
    writeln!(out, "# trials: {}", first.n_trials)?;
    writeln!(out, "# ci_reliable: false when bit_errors < 20")?;
    writeln!(
        out,
        "taps,method,snr_db,bit_errors,bits_total,ber,ci95_halfwidth,ci_reliable"
    )?;
    let mut order: Vec<usize> = (0..tables.len()).collect();
    order.sort_by_key(|&i| tables[i].0);
    for i in order {
        let (taps, table) = &tables[i];
        for (kind, si) in sorted_ber_rows(table) {
            write_ber_row(out, &format!("{taps},"), table, kind, si)?;
        }
    }
    Ok(())
}

/// Writes rotated-sample dumps as CSV: one row per (method, slot, user),
/// methods sorted by label, samples in slot-major order.
pub fn write_constellation_csv<W: Write>(
    dumps: &[ConstellationDump<f64>],
    config: &SystemConfig<f64>,
    out: &mut W,
) -> Result<()> {
    scenario_metadata(out, "constellation", config, Some(config.n_taps))?;
    let kinds: Vec<PrecoderKind> = dumps.iter().map(|d| d.kind).collect();
    writeln!(out, "# methods: {}", method_labels(&kinds))?;
    writeln!(out, "# noise: none (rotated noiseless samples)")?;
    writeln!(out, "method,slot,user,re_z,im_z,margin")?;
    let mut order: Vec<usize> = (0..dumps.len()).collect();
    order.sort_by_key(|&i| dumps[i].kind.label());
    for i in order {
        let dump = &dumps[i];
        for point in &dump.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                dump.kind.label(),
                point.slot,
                point.user,
                point.rotated.re,
                point.rotated.im,
                point.margin
            )?;
        }
    }
    Ok(())
}

/// Writes [`write_ber_csv`] output to a file.
pub fn emit_ber_csv(table: &BerTable<f64>, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_ber_csv(table, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Writes [`write_l_sweep_csv`] output to a file.
pub fn emit_l_sweep_csv(tables: &[(usize, BerTable<f64>)], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_l_sweep_csv(tables, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Writes [`write_constellation_csv`] output to a file.
pub fn emit_constellation_csv(
    dumps: &[ConstellationDump<f64>],
    config: &SystemConfig<f64>,
    path: &Path,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_constellation_csv(dumps, config, &mut out)?;
    out.flush()?;
    Ok(())
}
