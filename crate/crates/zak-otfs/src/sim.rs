//! Monte-Carlo BER harness: configuration, per-frame simulation, SNR sweep,
//! and CSV output.
//!
//! Reproducibility: every frame derives its random streams from
//! `(master seed, SNR index, frame index, purpose)` through a splitmix64
//! chain (purposes 0 = channel draw, 1 = data bits, 2 = noise), so results
//! are independent of the execution schedule. Frames within an SNR point are
//! embarrassingly parallel; with the `parallel` feature they run on a rayon
//! pool and are reduced in frame order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::channel::{
    apply_dd_io, effective_dd_taps, snr_to_noise_var, ChannelProfile, EffectiveDdChannel,
};
use crate::equalizer::{
    decide_grid, lmmse_dd_dense, lmmse_fd_banded, recover_symbols,
};
use crate::error::{Result, ZakOtfsError};
use crate::fd::{build_banded_matrix, dd_to_fd_response};
use crate::params::FrameParams;
use crate::qam::Constellation;
use crate::waveform::{make_gaussian_pulses, sound_effective_channel, PulsePair};
use crate::zak::{embed_symbols, idfzt};

/// Which equalizer(s) to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualizerKind {
    FdBanded,
    DdDense,
    Both,
}

impl EqualizerKind {
    pub fn runs_fd(self) -> bool {
        matches!(self, Self::FdBanded | Self::Both)
    }

    pub fn runs_dd(self) -> bool {
        matches!(self, Self::DdDense | Self::Both)
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "fd_banded" => Ok(Self::FdBanded),
            "dd_dense" => Ok(Self::DdDense),
            "both" => Ok(Self::Both),
            other => Err(ZakOtfsError::Config(format!(
                "unknown equalizer '{other}' (expected fd_banded, dd_dense, or both)"
            ))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Self::FdBanded => "fd_banded",
            Self::DdDense => "dd_dense",
            Self::Both => "both",
        }
    }
}

/// How the receiver obtains the effective channel taps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TapSource {
    /// Closed-form filter-cascade taps.
    Analytic,
    /// Waveform-level channel sounding with a unit DD impulse.
    Sounding,
}

impl TapSource {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "sounding" => Ok(Self::Sounding),
            other => Err(ZakOtfsError::Config(format!(
                "unknown tap source '{other}' (expected analytic or sounding)"
            ))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::Sounding => "sounding",
        }
    }
}

/// Raw key-value configuration as read from the config file; every field is
/// optional and falls back to the reference defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub nu_p_hz: Option<f64>,
    pub b_hz: Option<f64>,
    pub t_s: Option<f64>,
    pub tau_max_s: Option<f64>,
    pub nu_max_hz: Option<f64>,
    pub alpha_g: Option<f64>,
    pub beta_g: Option<f64>,
    pub q: Option<usize>,
    pub profile: Option<String>,
    pub snr_db: Option<Vec<f64>>,
    pub frames_per_snr: Option<usize>,
    pub equalizer: Option<String>,
    pub band: Option<usize>,
    pub seed: Option<u64>,
    pub taps: Option<String>,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

impl RawConfig {
    /// Resolves defaults and validates cross-field consistency.
    pub fn resolve(&self) -> Result<SimConfig> {
        match (self.m, self.n) {
            (Some(_), None) => {
                return Err(ZakOtfsError::Config(
                    "m is set but n is missing; set both or neither".into(),
                ))
            }
            (None, Some(_)) => {
                return Err(ZakOtfsError::Config(
                    "n is set but m is missing; set both or neither".into(),
                ))
            }
            _ => {}
        }
        let m = self.m.unwrap_or(31);
        let n = self.n.unwrap_or(37);

        // Any one of nu_p, B, T pins the grid; extras must agree. Explicit
        // B and T are used verbatim so a resolved config reloads bit-exact.
        let mut nu_p = self.nu_p_hz;
        if let Some(b) = self.b_hz {
            let cand = b / m as f64;
            check_consistent("b_hz", nu_p, cand)?;
            nu_p.get_or_insert(cand);
        }
        if let Some(t) = self.t_s {
            if t <= 0.0 {
                return Err(ZakOtfsError::Config("t_s must be positive".into()));
            }
            let cand = n as f64 / t;
            check_consistent("t_s", nu_p, cand)?;
            nu_p.get_or_insert(cand);
        }
        let nu_p = nu_p.unwrap_or(30_000.0);
        let b_hz = self.b_hz.unwrap_or(m as f64 * nu_p);
        let t_s = self.t_s.unwrap_or(n as f64 / nu_p);

        let params = FrameParams::new(
            m,
            n,
            b_hz,
            t_s,
            self.tau_max_s.unwrap_or(2.51e-6),
            self.nu_max_hz.unwrap_or(815.0),
            self.alpha_g.unwrap_or(1.584),
            self.beta_g.unwrap_or(1.584),
            self.q.unwrap_or(16),
        )
        .map_err(|e| ZakOtfsError::Config(e.to_string()))?;

        let band = match self.band {
            Some(b) => {
                if b < 5 || (b - 1) % 4 != 0 || (b - 1) / 4 > params.l_max {
                    return Err(ZakOtfsError::Config(format!(
                        "band must be 4k+1 with 1 <= k <= l_max = {} (full band {}), got {b}",
                        params.l_max,
                        params.full_band_width()
                    )));
                }
                b
            }
            None => params.full_band_width(),
        };

        let equalizer = match &self.equalizer {
            Some(s) => EqualizerKind::parse(s)?,
            None => EqualizerKind::FdBanded,
        };
        let taps = match &self.taps {
            Some(s) => TapSource::parse(s)?,
            None => TapSource::Analytic,
        };
        let snr_db = self.snr_db.clone().unwrap_or_else(|| vec![0.0, 5.0, 10.0, 15.0]);
        if snr_db.is_empty() {
            return Err(ZakOtfsError::Config("snr_db list is empty".into()));
        }
        let frames_per_snr = self.frames_per_snr.unwrap_or(100);
        if frames_per_snr == 0 {
            return Err(ZakOtfsError::Config("frames_per_snr must be >= 1".into()));
        }

        Ok(SimConfig {
            params,
            profile: self.profile.clone().unwrap_or_else(|| "veh-a".into()),
            snr_db,
            frames_per_snr,
            equalizer,
            band,
            seed: self.seed.unwrap_or(1),
            taps,
            out: PathBuf::from(self.out.clone().unwrap_or_else(|| "ber.csv".into())),
            threads: self.threads,
        })
    }
}

fn check_consistent(field: &str, current: Option<f64>, candidate: f64) -> Result<()> {
    if let Some(v) = current {
        if (v - candidate).abs() > 1e-9 * v.abs().max(candidate.abs()) {
            return Err(ZakOtfsError::Config(format!(
                "{field} conflicts with the already-derived Doppler period ({v} vs {candidate})"
            )));
        }
    }
    Ok(())
}

/// Fully resolved simulation configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: FrameParams,
    /// Built-in profile name (`veh-a`) or a path to a profile file.
    pub profile: String,
    pub snr_db: Vec<f64>,
    pub frames_per_snr: usize,
    pub equalizer: EqualizerKind,
    /// Band width `b` of the regularized normal matrix (`4k + 1`).
    pub band: usize,
    pub seed: u64,
    pub taps: TapSource,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

impl SimConfig {
    pub fn default_resolved() -> Self {
        RawConfig::default().resolve().expect("defaults are valid")
    }

    /// Expands back to the flat key-value form with every field populated.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            m: Some(self.params.m),
            n: Some(self.params.n),
            nu_p_hz: Some(self.params.nu_p()),
            b_hz: Some(self.params.b_hz),
            t_s: Some(self.params.t_s),
            tau_max_s: Some(self.params.tau_max_s),
            nu_max_hz: Some(self.params.nu_max_hz),
            alpha_g: Some(self.params.alpha_g),
            beta_g: Some(self.params.beta_g),
            q: Some(self.params.q),
            profile: Some(self.profile.clone()),
            snr_db: Some(self.snr_db.clone()),
            frames_per_snr: Some(self.frames_per_snr),
            equalizer: Some(self.equalizer.as_str().into()),
            band: Some(self.band),
            seed: Some(self.seed),
            taps: Some(self.taps.as_str().into()),
            out: Some(self.out.to_string_lossy().into_owned()),
            threads: self.threads,
        }
    }

    fn resolve_profile(&self) -> Result<ChannelProfile> {
        if self.profile == "veh-a" {
            Ok(ChannelProfile::veh_a())
        } else {
            ChannelProfile::from_file(&self.profile)
        }
    }
}

/// Loads a config file (flat TOML key-value). An empty file resolves to the
/// full default configuration.
pub fn load_config(path: impl AsRef<Path>) -> Result<SimConfig> {
    let text = std::fs::read_to_string(&path)?;
    let raw: RawConfig = toml::from_str(&text)
        .map_err(|e| ZakOtfsError::Config(format!("{}: {e}", path.as_ref().display())))?;
    raw.resolve()
}

/// Writes the fully-resolved configuration next to the results.
pub fn write_resolved_config(cfg: &SimConfig, path: impl AsRef<Path>) -> Result<()> {
    let text = toml::to_string(&cfg.to_raw())
        .map_err(|e| ZakOtfsError::Config(format!("serialize config: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// One row of the BER sweep output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub snr_db: f64,
    pub equalizer: String,
    pub band_width: usize,
    pub frames: usize,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub wall_time_s: f64,
    pub seed: u64,
}

/// Per-frame simulation output.
#[derive(Debug, Clone, Default)]
pub struct FrameOutcome {
    pub n_symbols: usize,
    pub n_bits: usize,
    pub fd_bit_errors: Option<u64>,
    pub fd_secs: f64,
    pub dd_bit_errors: Option<u64>,
    pub dd_secs: f64,
    /// Hard decisions agreeing between the two paths (when both run).
    pub symbols_agree: Option<usize>,
}

/// Derives the per-frame stream seed from
/// `(master, snr index, frame index, purpose)` via a splitmix64 chain.
pub fn frame_seed(master: u64, snr_idx: usize, frame_idx: usize, purpose: u64) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut s = splitmix64(master);
    s = splitmix64(s ^ (snr_idx as u64).wrapping_mul(0xA24B_AED4_963E_E407));
    s = splitmix64(s ^ (frame_idx as u64).wrapping_mul(0x9FB2_1C65_1E98_DF25));
    splitmix64(s ^ purpose)
}

const PURPOSE_CHANNEL: u64 = 0;
const PURPOSE_BITS: u64 = 1;
const PURPOSE_NOISE: u64 = 2;

/// Shared immutable state for a sweep.
pub struct SimContext {
    pub params: FrameParams,
    pub profile: ChannelProfile,
    pub pulses: PulsePair,
    pub constellation: Constellation,
    pub equalizer: EqualizerKind,
    pub taps: TapSource,
    pub band: usize,
    pub seed: u64,
    /// Linear SNR per sweep point.
    pub rho: Vec<f64>,
    pub noise_var: Vec<f64>,
}

impl SimContext {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        let profile = cfg.resolve_profile()?;
        let pulses = make_gaussian_pulses(&cfg.params)?;
        let rho: Vec<f64> = cfg.snr_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
        let noise_var = rho
            .iter()
            .map(|&r| snr_to_noise_var(r, 1.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: cfg.params.clone(),
            profile,
            pulses,
            constellation: Constellation::qam4(),
            equalizer: cfg.equalizer,
            taps: cfg.taps,
            band: cfg.band,
            seed: cfg.seed,
            rho,
            noise_var,
        })
    }

    fn effective_taps(&self, seed: u64) -> Result<EffectiveDdChannel> {
        let chan = self.profile.draw(&self.params, seed)?;
        match self.taps {
            TapSource::Analytic => effective_dd_taps(&chan, &self.pulses, &self.params),
            TapSource::Sounding => sound_effective_channel(&chan, &self.pulses, &self.params),
        }
    }
}

/// Runs one frame: draw channel, compute taps, transmit random 4-QAM, add
/// noise per the SNR point, equalize over the selected path(s), count bit
/// errors.
pub fn simulate_frame(ctx: &SimContext, snr_idx: usize, frame_idx: usize) -> Result<FrameOutcome> {
    let params = &ctx.params;
    let mn = params.mn();
    let eff = ctx.effective_taps(frame_seed(ctx.seed, snr_idx, frame_idx, PURPOSE_CHANNEL))?;

    let n_bits = mn * ctx.constellation.bits_per_symbol();
    let mut rng = ChaCha8Rng::seed_from_u64(frame_seed(
        ctx.seed,
        snr_idx,
        frame_idx,
        PURPOSE_BITS,
    ));
    let bits: Vec<u8> = (0..n_bits).map(|_| rng.random::<bool>() as u8).collect();
    let syms = ctx.constellation.map_bits(&bits)?;
    let x_dd = embed_symbols(&syms, params)?;
    let y_dd = apply_dd_io(
        &x_dd,
        &eff,
        ctx.noise_var[snr_idx],
        frame_seed(ctx.seed, snr_idx, frame_idx, PURPOSE_NOISE),
    )?;
    let rho = ctx.rho[snr_idx];

    let mut out = FrameOutcome {
        n_symbols: mn,
        n_bits,
        ..Default::default()
    };
    let mut fd_decisions = None;
    if ctx.equalizer.runs_fd() {
        let t0 = Instant::now();
        let hf = dd_to_fd_response(&eff);
        let mut h = build_banded_matrix(&hf, params)?;
        let l_band = (ctx.band - 1) / 4;
        if l_band < h.l_max() {
            h = h.truncate_band(l_band)?;
        }
        let y_fd = idfzt(&y_dd);
        let s_hat = lmmse_fd_banded(&h, &y_fd, rho)?;
        let est = recover_symbols(&s_hat, params, &ctx.constellation)?;
        out.fd_secs = t0.elapsed().as_secs_f64();
        out.fd_bit_errors = Some(count_diffs(&est.bits, &bits));
        fd_decisions = Some(est.decisions);
    }
    if ctx.equalizer.runs_dd() {
        let t0 = Instant::now();
        let x_hat = lmmse_dd_dense(&eff, &y_dd, rho)?;
        let est = decide_grid(x_hat, &ctx.constellation);
        out.dd_secs = t0.elapsed().as_secs_f64();
        out.dd_bit_errors = Some(count_diffs(&est.bits, &bits));
        if let Some(fd) = &fd_decisions {
            out.symbols_agree = Some(
                fd.iter()
                    .zip(&est.decisions)
                    .filter(|(a, b)| a == b)
                    .count(),
            );
        }
    }
    Ok(out)
}

fn count_diffs(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Sequential frame runner (always available).
pub fn run_frames_sequential<F>(count: usize, f: F) -> Result<Vec<FrameOutcome>>
where
    F: Fn(usize) -> Result<FrameOutcome> + Sync,
{
    (0..count).map(f).collect()
}

/// Parallel frame runner on a rayon pool; results are collected in frame
/// order so the reduction is schedule-independent.
#[cfg(feature = "parallel")]
pub fn run_frames_parallel<F>(
    count: usize,
    threads: Option<usize>,
    f: F,
) -> Result<Vec<FrameOutcome>>
where
    F: Fn(usize) -> Result<FrameOutcome> + Sync,
{
    use rayon::prelude::*;
    let run = || (0..count).into_par_iter().map(|i| f(i)).collect();
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| ZakOtfsError::Config(format!("thread pool: {e}")))?;
            pool.install(run)
        }
        None => run(),
    }
}

fn run_frames<F>(count: usize, threads: Option<usize>, f: F) -> Result<Vec<FrameOutcome>>
where
    F: Fn(usize) -> Result<FrameOutcome> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        run_frames_parallel(count, threads, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        run_frames_sequential(count, f)
    }
}

/// Runs the full sweep: for each SNR point, `frames_per_snr` independent
/// frames per the reproducible seeding scheme, aggregated into one record
/// per `(SNR, equalizer)` pair.
pub fn run_ber_sweep(cfg: &SimConfig) -> Result<Vec<BerRecord>> {
    let ctx = SimContext::new(cfg)?;
    let mut records = Vec::new();
    for (si, &snr_db) in cfg.snr_db.iter().enumerate() {
        let outcomes = run_frames(cfg.frames_per_snr, cfg.threads, |fi| {
            simulate_frame(&ctx, si, fi)
        })?;
        let bits: u64 = outcomes.iter().map(|o| o.n_bits as u64).sum();
        if ctx.equalizer.runs_fd() {
            let errors: u64 = outcomes.iter().filter_map(|o| o.fd_bit_errors).sum();
            let wall: f64 = outcomes.iter().map(|o| o.fd_secs).sum();
            records.push(BerRecord {
                snr_db,
                equalizer: "fd_banded".into(),
                band_width: cfg.band,
                frames: cfg.frames_per_snr,
                bits,
                bit_errors: errors,
                ber: errors as f64 / bits as f64,
                wall_time_s: wall,
                seed: cfg.seed,
            });
        }
        if ctx.equalizer.runs_dd() {
            let errors: u64 = outcomes.iter().filter_map(|o| o.dd_bit_errors).sum();
            let wall: f64 = outcomes.iter().map(|o| o.dd_secs).sum();
            records.push(BerRecord {
                snr_db,
                equalizer: "dd_dense".into(),
                band_width: cfg.band,
                frames: cfg.frames_per_snr,
                bits,
                bit_errors: errors,
                ber: errors as f64 / bits as f64,
                wall_time_s: wall,
                seed: cfg.seed,
            });
        }
    }
    Ok(records)
}

/// Writes records as CSV plus a pivoted plot-data variant
/// (`<out>.plot.csv`: one row per SNR, one BER column per equalizer).
pub fn write_results(records: &[BerRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    // Header-only output still needs the column names.
    if records.is_empty() {
        std::fs::write(
            path,
            "snr_db,equalizer,band_width,frames,bits,bit_errors,ber,wall_time_s,seed\n",
        )?;
    }

    let plot = path.with_extension("plot.csv");
    let mut eq_names: Vec<String> = Vec::new();
    for r in records {
        if !eq_names.contains(&r.equalizer) {
            eq_names.push(r.equalizer.clone());
        }
    }
    let mut snrs: Vec<f64> = Vec::new();
    for r in records {
        if !snrs.iter().any(|&s| s == r.snr_db) {
            snrs.push(r.snr_db);
        }
    }
    let mut f = std::fs::File::create(&plot)?;
    write!(f, "snr_db")?;
    for name in &eq_names {
        write!(f, ",ber_{name}")?;
    }
    writeln!(f)?;
    for &snr in &snrs {
        write!(f, "{snr}")?;
        for name in &eq_names {
            let ber = records
                .iter()
                .find(|r| r.snr_db == snr && &r.equalizer == name)
                .map(|r| r.ber);
            match ber {
                Some(b) => write!(f, ",{b}")?,
                None => write!(f, ",")?,
            }
        }
        writeln!(f)?;
    }
    Ok(())
}

/// Builds an identity-channel context with synthetic single-tap channel,
/// used by tests and sanity checks.
pub fn identity_taps(params: &FrameParams) -> EffectiveDdChannel {
    EffectiveDdChannel::identity(params.clone())
}

/// Convenience: equalize one frame with both paths against explicit taps and
/// the given received frame (no channel draw). Used by benchmarks.
pub fn equalize_fd_once(
    eff: &EffectiveDdChannel,
    y_dd: &crate::frame::QuasiPeriodicDdFrame,
    rho: f64,
    band: usize,
    constellation: &Constellation,
) -> Result<Vec<usize>> {
    let params = eff.params();
    let hf = dd_to_fd_response(eff);
    let mut h = build_banded_matrix(&hf, params)?;
    let l_band = (band - 1) / 4;
    if l_band < h.l_max() {
        h = h.truncate_band(l_band)?;
    }
    let s_hat = lmmse_fd_banded(&h, &idfzt(y_dd), rho)?;
    Ok(recover_symbols(&s_hat, params, constellation)?.decisions)
}
