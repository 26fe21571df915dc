//! BER sweep CLI for the Zak-OTFS simulator.

use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

use zak_otfs::sim::{load_config, run_ber_sweep, write_resolved_config, write_results, RawConfig};

/// Monte-Carlo 4-QAM BER sweep over a doubly-spread channel, comparing
/// banded frequency-domain LMMSE equalization against the dense
/// delay-Doppler baseline.
#[derive(Debug, Parser)]
#[command(name = "zak-otfs", version, about)]
struct Cli {
    /// Config file (flat TOML key-value); flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// SNR grid in dB, comma separated (e.g. "0,5,10,15").
    #[arg(long, value_delimiter = ',')]
    snr_db: Option<Vec<f64>>,
    /// Frames per SNR point.
    #[arg(long)]
    frames: Option<usize>,
    /// Equalizer selection: fd_banded, dd_dense, or both.
    #[arg(long)]
    equalizer: Option<String>,
    /// Band width override (4k+1) for the banded solver.
    #[arg(long)]
    band: Option<usize>,
    /// Master RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tap source: analytic or sounding.
    #[arg(long)]
    taps: Option<String>,
    /// Worker threads for the frame loop (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> zak_otfs::Result<()> {
    let mut raw = match &cli.config {
        Some(path) => {
            // Parse eagerly for line diagnostics, then re-resolve after the
            // CLI overrides are applied.
            load_config(path)?;
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<RawConfig>(&text)
                .map_err(|e| zak_otfs::ZakOtfsError::Config(e.to_string()))?
        }
        None => RawConfig::default(),
    };
    if let Some(v) = cli.snr_db {
        raw.snr_db = Some(v);
    }
    if let Some(v) = cli.frames {
        raw.frames_per_snr = Some(v);
    }
    if let Some(v) = cli.equalizer {
        raw.equalizer = Some(v);
    }
    if let Some(v) = cli.band {
        raw.band = Some(v);
    }
    if let Some(v) = cli.seed {
        raw.seed = Some(v);
    }
    if let Some(v) = cli.out {
        raw.out = Some(v.to_string_lossy().into_owned());
    }
    if let Some(v) = cli.taps {
        raw.taps = Some(v);
    }
    if let Some(v) = cli.threads {
        raw.threads = Some(v);
    }
    let cfg = raw.resolve()?;

    #[cfg(not(feature = "parallel"))]
    if cfg.threads.map_or(false, |t| t > 1) {
        eprintln!("note: built without the `parallel` feature; running single-threaded");
    }

    eprintln!(
        "frame {}x{} (B = {:.0} kHz, T = {:.3} ms), profile {}, band {}, {} frames/point, seed {}",
        cfg.params.m,
        cfg.params.n,
        cfg.params.b_hz / 1e3,
        cfg.params.t_s * 1e3,
        cfg.profile,
        cfg.band,
        cfg.frames_per_snr,
        cfg.seed
    );

    write_resolved_config(&cfg, cfg.out.with_extension("config.toml"))?;
    let records = run_ber_sweep(&cfg)?;
    write_results(&records, &cfg.out)?;

    println!("snr_db  equalizer  ber          bit_errors/bits    wall_s");
    for r in &records {
        println!(
            "{:>6.1}  {:<9}  {:<11.4e}  {:>9}/{:<9}  {:>7.2}",
            r.snr_db, r.equalizer, r.ber, r.bit_errors, r.bits, r.wall_time_s
        );
    }
    eprintln!(
        "wrote {} and {}",
        cfg.out.display(),
        cfg.out.with_extension("plot.csv").display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
