use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mirfso_core::codec::{
    build_packet, manchester_encode, read_chips, read_payloads, write_chips, write_payloads,
    ChipStream, CodecError, FrameSync, Payload, Slicer, PAYLOAD_BYTES, SYNC_WORD,
};
use mirfso_core::experiments::{self, stepped, Mode};
use mirfso_core::sim::eye_export;
use mirfso_core::{Error, OutputFormat, PerReport, ScenarioConfig, Table};

const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

/// Mid-infrared free-space optical link simulator.
#[derive(Debug, Parser)]
#[command(name = "mirfso", version)]
struct Cli {
    /// Scenario file of `section.key = value` lines.
    #[arg(long, global = true, conflicts_with = "paper_defaults")]
    config: Option<PathBuf>,
    /// Use the built-in reference constants (the default when no file is given).
    #[arg(long, global = true)]
    paper_defaults: bool,
    /// Override one key, e.g. `--set atmosphere.visibility_km=23`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Monte Carlo seed; overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
            Format::Table => OutputFormat::Table,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum ModeArg {
    #[default]
    Analytic,
    Montecarlo,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Analytic => Mode::Analytic,
            ModeArg::Montecarlo => Mode::MonteCarlo,
        }
    }
}

#[derive(Debug, Args)]
struct Wavelengths {
    /// Comma-separated wavelengths in nm.
    #[arg(long, value_delimiter = ',', default_values_t = [1557.7, 3998.6, 4720.0])]
    wavelengths_nm: Vec<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Loss components against distance.
    Attenuation {
        #[command(flatten)]
        wavelengths: Wavelengths,
        #[arg(long, default_value_t = 20_000.0)]
        d_max_m: f64,
        #[arg(long, default_value_t = 100.0)]
        step_m: f64,
    },
    /// Packet error rate against SNR.
    PerVsSnr {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        snr_from_db: f64,
        #[arg(long, default_value_t = 16.0, allow_negative_numbers = true)]
        snr_to_db: f64,
        #[arg(long, default_value_t = 0.5)]
        snr_step_db: f64,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
    },
    /// Maximal optical attenuation against PER target.
    Moa {
        /// Comma-separated PER targets in (0, 1).
        #[arg(long, value_delimiter = ',',
              default_values_t = [1e-1, 1e-2, 1e-3, 1e-4, 1.6e-5, 1e-6])]
        per_targets: Vec<f64>,
    },
    /// Longest error-free link per wavelength.
    LinkLength {
        #[command(flatten)]
        wavelengths: Wavelengths,
        /// Defaults to `run.per_target`.
        #[arg(long)]
        per_target: Option<f64>,
    },
    /// SNR against channel attenuation for several modulation depths.
    RegimeScan {
        /// Comma-separated modulation depths in (0, 1].
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5, 0.25])]
        mds: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        moa_from_db: f64,
        #[arg(long, default_value_t = 60.0)]
        moa_to_db: f64,
        #[arg(long, default_value_t = 0.5)]
        moa_step_db: f64,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
    },
    /// PER against modulation depth at fixed attenuation.
    MdScan {
        #[arg(long, default_value_t = 0.001)]
        md_from: f64,
        #[arg(long, default_value_t = 0.02)]
        md_to: f64,
        #[arg(long, default_value_t = 0.001)]
        md_step: f64,
        /// Defaults to `run.oa_db`.
        #[arg(long, allow_negative_numbers = true)]
        oa_db: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
    },
    /// Smallest modulation depth meeting `run.per_target`.
    MdThreshold {
        /// Defaults to `run.oa_db`.
        #[arg(long, allow_negative_numbers = true)]
        oa_db: Option<f64>,
    },
    /// One Monte Carlo run at `run.oa_db` and `laser.md`.
    Simulate {
        #[arg(long, allow_negative_numbers = true)]
        oa_db: Option<f64>,
        #[arg(long)]
        md: Option<f64>,
        /// Also write eye-diagram traces as CSV.
        #[arg(long)]
        eye: Option<PathBuf>,
    },
    /// Frame payloads and write their Manchester chips.
    Encode {
        /// Payload as 8 hex digits; repeatable.
        #[arg(long = "payload-hex", value_name = "HEX")]
        payloads_hex: Vec<String>,
        /// Binary payload file.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Recover payloads from a chip file.
    Decode {
        /// Binary chip file.
        input: PathBuf,
        /// Also write recovered payloads as a binary payload file.
        #[arg(long)]
        payloads_out: Option<PathBuf>,
    },
    /// Print the effective configuration.
    Config,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config() || matches!(e, Error::Io(_)) {
        EXIT_CONFIG
    } else {
        EXIT_DOMAIN
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::from_path(path)?,
        None => ScenarioConfig::reference(),
    };
    for o in &cli.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = load_config(&cli)?;
    let fmt = |default: OutputFormat| cli.format.map_or(default, OutputFormat::from);
    let emit = |table: Table, default: OutputFormat| -> Result<(), Error> {
        let mut out = open_out(cli.out.as_deref())?;
        table.write(fmt(default), &mut out)?;
        out.flush()?;
        Ok(())
    };
    // JSON for a one-row result is the bare object.
    let emit_single = |table: Table, default: OutputFormat| -> Result<(), Error> {
        match fmt(default) {
            OutputFormat::Json => {
                let mut out = open_out(cli.out.as_deref())?;
                serde_json::to_writer_pretty(&mut out, &table.to_json()[0])
                    .map_err(io::Error::other)?;
                writeln!(out)?;
                out.flush()?;
                Ok(())
            }
            _ => emit(table, default),
        }
    };

    match &cli.command {
        Command::Attenuation {
            wavelengths,
            d_max_m,
            step_m,
        } => emit(
            experiments::attenuation(&cfg, &wavelengths.wavelengths_nm, *d_max_m, *step_m)?,
            OutputFormat::Csv,
        ),
        Command::PerVsSnr {
            snr_from_db,
            snr_to_db,
            snr_step_db,
            mode,
        } => {
            let snrs = stepped(*snr_from_db, *snr_to_db, *snr_step_db)?;
            emit(
                experiments::per_vs_snr(&cfg, &snrs, (*mode).into())?,
                OutputFormat::Csv,
            )
        }
        Command::Moa { per_targets } => {
            emit(experiments::moa(&cfg, per_targets)?, OutputFormat::Csv)
        }
        Command::LinkLength {
            wavelengths,
            per_target,
        } => emit(
            experiments::link_length(
                &cfg,
                &wavelengths.wavelengths_nm,
                per_target.unwrap_or(cfg.run.per_target),
            )?,
            OutputFormat::Table,
        ),
        Command::RegimeScan {
            mds,
            moa_from_db,
            moa_to_db,
            moa_step_db,
            mode,
        } => {
            let moas = stepped(*moa_from_db, *moa_to_db, *moa_step_db)?;
            emit(
                experiments::regime_scan(&cfg, mds, &moas, (*mode).into())?,
                OutputFormat::Csv,
            )
        }
        Command::MdScan {
            md_from,
            md_to,
            md_step,
            oa_db,
            mode,
        } => {
            let mds = stepped(*md_from, *md_to, *md_step)?;
            emit(
                experiments::md_scan(&cfg, &mds, oa_db.unwrap_or(cfg.run.oa_db), (*mode).into())?,
                OutputFormat::Csv,
            )
        }
        Command::MdThreshold { oa_db } => {
            let oa = oa_db.unwrap_or(cfg.run.oa_db);
            let t = experiments::md_threshold(&cfg, oa)?;
            let mut table = Table::new(["oa_db", "per_target", "md", "snr_db", "status"]);
            table.push(vec![
                oa.into(),
                cfg.run.per_target.into(),
                t.md.into(),
                t.snr_db.into(),
                format!("{:?}", t.status).into(),
            ]);
            emit_single(table, OutputFormat::Json)
        }
        Command::Simulate { oa_db, md, eye } => {
            let mut cfg = cfg.clone();
            if let Some(oa) = oa_db {
                cfg.run.oa_db = *oa;
            }
            if let Some(md) = md {
                cfg.laser.md = *md;
            }
            let outcome = experiments::simulate(&cfg)?;
            if let Some(path) = eye {
                eye_export(&outcome.eye, BufWriter::new(File::create(path)?))?;
            }
            let report = PerReport::from(&outcome);
            match fmt(OutputFormat::Json) {
                OutputFormat::Json => {
                    let mut out = open_out(cli.out.as_deref())?;
                    serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::other)?;
                    writeln!(out)?;
                    out.flush()?;
                    Ok(())
                }
                other => {
                    let mut t = Table::new([
                        "packets_sent",
                        "packets_errored",
                        "per",
                        "ci95_low",
                        "ci95_high",
                        "saturation_flag",
                        "seed",
                    ]);
                    t.push(vec![
                        report.packets_sent.into(),
                        report.packets_errored.into(),
                        report.per.into(),
                        report.ci95_low.into(),
                        report.ci95_high.into(),
                        report.saturation_flag.into(),
                        report.seed.into(),
                    ]);
                    emit_single(t, other)
                }
            }
        }
        Command::Encode {
            payloads_hex,
            input,
        } => {
            let mut payloads = Vec::new();
            if let Some(path) = input {
                payloads.extend(read_payloads(File::open(path)?)?);
            }
            for h in payloads_hex {
                payloads.push(parse_payload_hex(h)?);
            }
            if payloads.is_empty() {
                return Err(Error::Usage("no payloads given".into()));
            }
            let mut chips = Vec::new();
            for p in &payloads {
                chips.extend(manchester_encode(&build_packet(p)?.to_bits()).chips);
            }
            let Some(path) = &cli.out else {
                return Err(Error::Usage("encode needs --out for the chip file".into()));
            };
            let mut out = BufWriter::new(File::create(path)?);
            write_chips(&mut out, &ChipStream::new(chips))?;
            out.flush()?;
            Ok(())
        }
        Command::Decode {
            input,
            payloads_out,
        } => {
            let stream = read_chips(File::open(input)?)?;
            let frames = decode_all(&stream);
            let mut t = Table::new(["frame", "sync_chip", "payload_hex", "preamble_intact"]);
            for (i, (chip, payload, intact)) in frames.iter().enumerate() {
                t.push(vec![
                    (i as u64).into(),
                    (*chip as u64).into(),
                    hex(payload).into(),
                    (*intact).into(),
                ]);
            }
            if let Some(path) = payloads_out {
                let payloads: Vec<Payload> = frames.iter().map(|f| f.1).collect();
                let mut w = BufWriter::new(File::create(path)?);
                write_payloads(&mut w, &payloads)?;
                w.flush()?;
            }
            emit(t, OutputFormat::Csv)
        }
        Command::Config => {
            let mut out = open_out(cli.out.as_deref())?;
            write!(out, "{cfg}")?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Every frame in order. A sync loss ends the scan; a corrupt payload is dropped.
fn decode_all(stream: &ChipStream) -> Vec<(usize, Payload, bool)> {
    let sync_chips = 2 * 8 * SYNC_WORD.len();
    let frame_tail = sync_chips + 2 * 8 * PAYLOAD_BYTES;
    let sync = FrameSync::new(Slicer::Strict);
    let mut frames = Vec::new();
    let mut offset = 0;
    while offset < stream.len() {
        let rest = ChipStream::new(stream.chips[offset..].to_vec());
        match sync.extract(&rest) {
            Ok(f) => {
                frames.push((offset + f.sync_chip, f.payload, f.preamble_intact));
                offset += f.sync_chip + frame_tail;
            }
            Err(CodecError::Violation { position }) => offset += 2 * position.max(1),
            Err(_) => break,
        }
    }
    frames
}

fn parse_payload_hex(s: &str) -> Result<Payload, Error> {
    let s = s.trim_start_matches("0x");
    let bad = || Error::Usage(format!("payload `{s}` is not {} hex bytes", PAYLOAD_BYTES));
    if s.len() != 2 * PAYLOAD_BYTES {
        return Err(bad());
    }
    let mut p = [0u8; PAYLOAD_BYTES];
    for (i, b) in p.iter_mut().enumerate() {
        *b = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).map_err(|_| bad())?;
    }
    Ok(p)
}

fn hex(p: &Payload) -> String {
    p.iter().map(|b| format!("{b:02X}")).collect()
}
