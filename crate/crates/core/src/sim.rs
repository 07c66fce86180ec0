//! Seeded Monte-Carlo BER experiments.
//!
//! Trials are *paired*: within one trial every precoder kind sees the same
//! channel, symbol, and noise draws, and across the SNR grid only the noise
//! scale changes (common random numbers). Differences between methods and
//! grid points therefore have far lower variance than the raw BERs.
//! Each trial owns a dedicated ChaCha stream derived from the master seed
//! and the trial index, and trial results reduce by summation, so a run is
//! bit-for-bit reproducible regardless of how rayon schedules the work.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::constraints::SwpKind;
use crate::error::{Error, Result};
use crate::model::{
    rotated_noiseless_signal, safety_margin, Channel, SymbolBlock, SystemConfig, TransmitBlock,
};
use crate::precoders::{
    exhaustive_search_oracle, horizon_objective, precode_block, precode_slot, PrecoderKind,
};
use crate::scalar::Scalar;

/// The reproducible generator of one trial: the master seed fixes the
/// ChaCha key and the trial index selects a dedicated stream, so trials
/// are independent and can run in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws an `L`-tap Rayleigh channel with entries `CN(0, 1/L)`, keeping the
/// average channel energy per user independent of the tap count. Draw
/// order is fixed: taps outermost, then users, then antennas, real rail
/// before imaginary.
///
/// The configuration must have passed [`SystemConfig::validate`].
pub fn draw_channel<T: Scalar>(config: &SystemConfig<T>, rng: &mut impl Rng) -> Channel<T>
where
    StandardNormal: Distribution<T>,
{
    let rail_std = (T::one() / T::cast_usize(2 * config.n_taps)).sqrt();
    let taps = (0..config.n_taps)
        .map(|_| {
            let mut entries = Vec::with_capacity(config.n_users * config.n_antennas);
            for _ in 0..config.n_users * config.n_antennas {
                let re: T = rng.sample(StandardNormal);
                let im: T = rng.sample(StandardNormal);
                entries.push(Complex::new(re * rail_std, im * rail_std));
            }
            Array2::from_shape_vec((config.n_users, config.n_antennas), entries)
                .expect("shape matches the entry count")
        })
        .collect();
    Channel::new(taps).expect("validated config gives valid taps")
}

/// Draws one block of uniform i.i.d. symbol indices (slot-major, user-minor
/// order). The configuration must have passed [`SystemConfig::validate`].
pub fn draw_symbols<T: Scalar>(config: &SystemConfig<T>, rng: &mut impl Rng) -> SymbolBlock<T> {
    let mut indices = Vec::with_capacity(config.block_length * config.n_users);
    for _ in 0..config.block_length * config.n_users {
        indices.push(rng.random_range(0..config.psk_order));
    }
    let indices = Array2::from_shape_vec((config.block_length, config.n_users), indices)
        .expect("shape matches the entry count");
    SymbolBlock::from_indices(indices, config.psk_order).expect("indices are in range")
}

/// Received samples of slot `t` for all users:
/// `y = γ Σ_ℓ H_ℓ x_{t-ℓ} + noise`, with pre-block slots silent.
pub fn received_signal<T: Scalar>(
    channel: &Channel<T>,
    block: &TransmitBlock<T>,
    t: usize,
    noise: ArrayView1<'_, Complex<T>>,
    gamma: T,
) -> Result<Array1<Complex<T>>> {
    if t >= block.block_length() {
        return Err(Error::InvalidArgument(format!(
            "slot {t} outside block of length {}",
            block.block_length()
        )));
    }
    if noise.len() != channel.n_users() {
        return Err(Error::Dimension(format!(
            "noise vector has length {}, expected {}",
            noise.len(),
            channel.n_users()
        )));
    }
    let mut acc = Array1::<Complex<T>>::zeros(channel.n_users());
    for ell in 0..channel.n_taps() {
        if let Some(slot) = t.checked_sub(ell) {
            acc += &channel.tap(ell).dot(&block.slot(slot));
        }
    }
    Ok(Array1::from_shape_fn(channel.n_users(), |k| {
        acc[k] * gamma + noise[k]
    }))
}

/// Maps a received sample to the index of the PSK sector containing it:
/// sector `d` is `[2πd/D, 2π(d+1)/D)`. Samples exactly on a boundary fall
/// into the counterclockwise sector, and the origin detects as 0, so the
/// map is total and deterministic.
pub fn detect_psk<T: Scalar>(y: Complex<T>, psk_order: u32) -> u32 {
    let tau = T::TAU();
    let mut angle = y.arg(); // in (-π, π], and arg(0) = 0
    if angle < T::zero() {
        angle += tau;
    }
    let sector = (angle * T::cast(f64::from(psk_order)) / tau).floor();
    (sector.to_u64().unwrap_or(0) as u32) % psk_order
}

/// Bit errors between a sent and a detected symbol index under the Gray
/// labeling `g(d) = d xor (d >> 1)`, which gives adjacent PSK sectors a
/// Hamming distance of one.
pub fn count_bit_errors(d_true: u32, d_detected: u32, psk_order: u32) -> Result<u32> {
    if psk_order < 2 || !psk_order.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "psk order must be a power of two >= 2, got {psk_order}"
        )));
    }
    if d_true >= psk_order || d_detected >= psk_order {
        return Err(Error::InvalidArgument(format!(
            "symbol indices {d_true}, {d_detected} out of range for {psk_order}-PSK"
        )));
    }
    let gray = |d: u32| d ^ (d >> 1);
    Ok((gray(d_true) ^ gray(d_detected)).count_ones())
}

/// Error counts accumulated over any number of slots/users/trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Gray-coded bit errors.
    pub bit_errors: u64,
    /// Bits carried (symbols × bits per symbol).
    pub bits_total: u64,
    /// Wrong symbol decisions.
    pub symbol_errors: u64,
    /// Symbols carried.
    pub symbols_total: u64,
}

impl TrialOutcome {
    /// Adds another outcome's counts into this one.
    pub fn merge(&mut self, other: &TrialOutcome) {
        self.bit_errors += other.bit_errors;
        self.bits_total += other.bits_total;
        self.symbol_errors += other.symbol_errors;
        self.symbols_total += other.symbols_total;
    }

    /// Bit error rate (0 when nothing was counted yet).
    pub fn ber(&self) -> f64 {
        if self.bits_total == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits_total as f64
        }
    }

    /// Symbol error rate.
    pub fn ser(&self) -> f64 {
        if self.symbols_total == 0 {
            0.0
        } else {
            self.symbol_errors as f64 / self.symbols_total as f64
        }
    }

    /// Normal-approximation 95% confidence half-width of [`Self::ber`].
    pub fn ci95_halfwidth(&self) -> f64 {
        if self.bits_total == 0 {
            return 0.0;
        }
        let p = self.ber();
        1.96 * (p * (1.0 - p) / self.bits_total as f64).sqrt()
    }

    /// Whether the half-width is trustworthy; below ~20 errors the normal
    /// approximation degrades badly.
    pub fn is_reliable(&self) -> bool {
        self.bit_errors >= 20
    }
}

/// One (kind, SNR) cell of a BER sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct BerCell<T> {
    /// Precoder kind of this cell.
    pub kind: PrecoderKind,
    /// Operating SNR in dB.
    pub snr_db: T,
    /// Accumulated counts over all trials.
    pub outcome: TrialOutcome,
}

/// A completed sweep: counts for every requested kind × SNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct BerTable<T> {
    /// Scenario the sweep ran under.
    pub config: SystemConfig<T>,
    /// Kinds, in the order requested.
    pub kinds: Vec<PrecoderKind>,
    /// SNR grid in dB, in the order requested.
    pub snr_db: Vec<T>,
    /// Trials accumulated into every cell.
    pub n_trials: usize,
    /// Cells in kind-major, SNR-minor order.
    pub cells: Vec<BerCell<T>>,
}

impl<T: Scalar> BerTable<T> {
    /// The cell of a kind at one SNR grid index.
    pub fn cell(&self, kind: PrecoderKind, snr_index: usize) -> Option<&BerCell<T>> {
        let ki = self.kinds.iter().position(|&k| k == kind)?;
        self.cells.get(ki * self.snr_db.len() + snr_index)
    }
}

/// Runs a paired Monte-Carlo BER sweep.
///
/// `bwp_limit` is forwarded to [`precode_block`] and only matters when
/// `kinds` contains the block-wise design. Trials run in parallel under
/// the ambient rayon pool.
pub fn run_ber_experiment<T: Scalar>(
    config: &SystemConfig<T>,
    kinds: &[PrecoderKind],
    snr_db: &[T],
    n_trials: usize,
    bwp_limit: Option<usize>,
) -> Result<BerTable<T>>
where
    StandardNormal: Distribution<T>,
{
    config.validate()?;
    if kinds.is_empty() {
        return Err(Error::InvalidArgument("no precoder kinds requested".into()));
    }
    if snr_db.is_empty() {
        return Err(Error::InvalidArgument("empty SNR grid".into()));
    }
    if snr_db.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument(
            "SNR grid entries must be finite".into(),
        ));
    }
    if n_trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    // SNR = ρ / σ², so each grid point fixes a noise scale.
    let ten = T::cast(10.0);
    let sigmas: Vec<T> = snr_db
        .iter()
        .map(|&snr| (config.total_power / ten.powf(snr / ten)).sqrt())
        .collect();

    let per_trial: Vec<Vec<TrialOutcome>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|trial| run_trial(config, kinds, &sigmas, trial, bwp_limit))
        .collect::<Result<_>>()?;

    let mut cells: Vec<BerCell<T>> = kinds
        .iter()
        .flat_map(|&kind| {
            snr_db.iter().map(move |&snr| BerCell {
                kind,
                snr_db: snr,
                outcome: TrialOutcome::default(),
            })
        })
        .collect();
    for outcomes in &per_trial {
        for (cell, outcome) in cells.iter_mut().zip(outcomes.iter()) {
            cell.outcome.merge(outcome);
        }
    }
    Ok(BerTable {
        config: config.clone(),
        kinds: kinds.to_vec(),
        snr_db: snr_db.to_vec(),
        n_trials,
        cells,
    })
}

/// One paired trial; returns kind-major, SNR-minor outcomes.
fn run_trial<T: Scalar>(
    config: &SystemConfig<T>,
    kinds: &[PrecoderKind],
    sigmas: &[T],
    trial: u64,
    bwp_limit: Option<usize>,
) -> Result<Vec<TrialOutcome>>
where
    StandardNormal: Distribution<T>,
{
    let mut rng = trial_rng(config.rng_seed, trial);
    let channel = draw_channel(config, &mut rng);
    let symbols = draw_symbols(config, &mut rng);
    // Unit-variance complex noise, drawn once and scaled per SNR point.
    let t_c = config.block_length;
    let k_users = config.n_users;
    let rail = T::FRAC_1_SQRT_2();
    let mut noise_entries = Vec::with_capacity(t_c * k_users);
    for _ in 0..t_c * k_users {
        let re: T = rng.sample(StandardNormal);
        let im: T = rng.sample(StandardNormal);
        noise_entries.push(Complex::new(re * rail, im * rail));
    }
    let noise = Array2::from_shape_vec((t_c, k_users), noise_entries)
        .expect("shape matches the entry count");

    let gamma = config.gamma();
    let bits_per_symbol = u64::from(config.bits_per_symbol());
    let zero_noise = Array1::<Complex<T>>::zeros(k_users);
    let mut outcomes = vec![TrialOutcome::default(); kinds.len() * sigmas.len()];
    for (ki, &kind) in kinds.iter().enumerate() {
        // The designs do not depend on σ, so precode once per kind.
        let designed = precode_block(kind, &channel, &symbols, config, bwp_limit)?;
        let noiseless: Vec<Array1<Complex<T>>> = (0..t_c)
            .map(|t| {
                received_signal(
                    &channel,
                    &designed.transmit_block,
                    t,
                    zero_noise.view(),
                    gamma,
                )
            })
            .collect::<Result<_>>()?;
        for (si, &sigma) in sigmas.iter().enumerate() {
            let outcome = &mut outcomes[ki * sigmas.len() + si];
            for t in 0..t_c {
                for user in 0..k_users {
                    let y = noiseless[t][user] + noise[(t, user)] * sigma;
                    let detected = detect_psk(y, config.psk_order);
                    let sent = symbols.index_at(t, user);
                    outcome.bit_errors +=
                        u64::from(count_bit_errors(sent, detected, config.psk_order)?);
                    outcome.bits_total += bits_per_symbol;
                    outcome.symbol_errors += u64::from(sent != detected);
                    outcome.symbols_total += 1;
                }
            }
        }
    }
    Ok(outcomes)
}

/// One user's rotated noiseless sample in a captured block.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstellationPoint<T> {
    /// Slot index within the block.
    pub slot: usize,
    /// User index.
    pub user: usize,
    /// Rotated sample `conj(s) · y`.
    pub rotated: Complex<T>,
    /// Safety margin of the sample.
    pub margin: T,
}

/// Every rotated sample of one noise-free precoded block.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstellationDump<T> {
    /// The design that produced the block.
    pub kind: PrecoderKind,
    /// Points in slot-major, user-minor order.
    pub points: Vec<ConstellationPoint<T>>,
}

/// Precodes one seeded block (trial stream 0) without noise and captures
/// all rotated samples — the standard way to eyeball how hard each design
/// pushes the samples away from the decision boundaries.
pub fn capture_constellation<T: Scalar>(
    config: &SystemConfig<T>,
    kind: PrecoderKind,
    bwp_limit: Option<usize>,
) -> Result<ConstellationDump<T>>
where
    StandardNormal: Distribution<T>,
{
    config.validate()?;
    let mut rng = trial_rng(config.rng_seed, 0);
    let channel = draw_channel(config, &mut rng);
    let symbols = draw_symbols(config, &mut rng);
    let designed = precode_block(kind, &channel, &symbols, config, bwp_limit)?;
    let theta = config.theta();
    let gamma = config.gamma();

    let mut points = Vec::with_capacity(config.block_length * config.n_users);
    for t in 0..config.block_length {
        let recent: Vec<ArrayView1<'_, Complex<T>>> = (0..channel.n_taps())
            .filter_map(|ell| t.checked_sub(ell))
            .map(|slot| designed.transmit_block.slot(slot))
            .collect();
        let z = rotated_noiseless_signal(&channel, &recent, symbols.symbols_at(t), gamma)?;
        for (user, &sample) in z.values.iter().enumerate() {
            points.push(ConstellationPoint {
                slot: t,
                user,
                rotated: sample,
                margin: safety_margin(sample, theta),
            });
        }
    }
    Ok(ConstellationDump { kind, points })
}

/// Outcome of the exhaustive-vs-LP dominance check for one configuration.
#[derive(Clone, Debug)]
pub struct DominanceCheck<T> {
    /// Antennas in the checked scenario.
    pub n_antennas: usize,
    /// Users in the checked scenario.
    pub n_users: usize,
    /// Channel taps in the checked scenario.
    pub n_taps: usize,
    /// Symbol-wise objective that was checked.
    pub kind: SwpKind,
    /// Random instances evaluated.
    pub instances: usize,
    /// Instances where either dominance inequality failed beyond tolerance.
    pub violations: usize,
    /// Worst observed `quantized LP − exhaustive` gap (≤ 0 means the
    /// exhaustive search always won, as it must).
    pub worst_quantized_excess: T,
    /// Worst observed `exhaustive − relaxed LP` gap (≤ 0 means the
    /// relaxation always upper-bounds the exhaustive optimum).
    pub worst_relaxation_deficit: T,
}

/// Sweeps toy scenarios (`N ≤ 3`, `K ≤ 2`, `L ≤ 3`) and verifies on random
/// instances that, per slot, the exhaustive one-bit optimum is sandwiched
/// between the quantized LP design and the relaxed LP bound:
/// `quantized ≤ exhaustive ≤ relaxed` (up to `tolerance`).
pub fn run_oracle_dominance<T: Scalar>(
    seed: u64,
    instances_per_config: usize,
    tolerance: T,
) -> Result<Vec<DominanceCheck<T>>>
where
    StandardNormal: Distribution<T>,
{
    let mut checks = Vec::new();
    let mut config_index = 0u64;
    for n_antennas in 1..=3usize {
        for n_users in 1..=2usize.min(n_antennas) {
            for n_taps in 1..=3usize {
                for kind in [SwpKind::MaxMin, SwpKind::MaxSumMin] {
                    let mut rng = trial_rng(seed, config_index);
                    config_index += 1;
                    let config = SystemConfig {
                        n_antennas,
                        n_users,
                        n_taps,
                        psk_order: 8,
                        total_power: T::one(),
                        noise_variance: T::one(),
                        block_length: n_taps,
                        rng_seed: seed,
                    };
                    let mut check = DominanceCheck {
                        n_antennas,
                        n_users,
                        n_taps,
                        kind,
                        instances: instances_per_config,
                        violations: 0,
                        worst_quantized_excess: T::neg_infinity(),
                        worst_relaxation_deficit: T::neg_infinity(),
                    };
                    for _ in 0..instances_per_config {
                        let channel = draw_channel(&config, &mut rng);
                        let symbols = draw_symbols(&config, &mut rng);
                        let history = random_one_bit_history(n_antennas, n_taps - 1, &mut rng);
                        let past: Vec<ArrayView1<'_, Complex<T>>> =
                            history.iter().map(|x| x.view()).collect();

                        let precoder_kind = match kind {
                            SwpKind::Passive => PrecoderKind::PassiveSwp,
                            SwpKind::MaxMin => PrecoderKind::ActiveMaxMin,
                            SwpKind::MaxSumMin => PrecoderKind::ActiveMaxSumMin,
                        };
                        let design =
                            precode_slot(precoder_kind, &channel, &symbols, &past, 0, &config)?;
                        let quantized = horizon_objective(
                            kind,
                            &channel,
                            &symbols,
                            &past,
                            0,
                            design.signal.view(),
                            &config,
                        )?;
                        let (_, exhaustive) =
                            exhaustive_search_oracle(kind, &channel, &symbols, &past, 0, &config)?;

                        let excess = quantized - exhaustive;
                        let deficit = exhaustive - design.relaxed_objective;
                        check.worst_quantized_excess = check.worst_quantized_excess.max(excess);
                        check.worst_relaxation_deficit =
                            check.worst_relaxation_deficit.max(deficit);
                        if excess > tolerance || deficit > tolerance {
                            check.violations += 1;
                        }
                    }
                    checks.push(check);
                }
            }
        }
    }
    Ok(checks)
}

/// Random one-bit vectors standing in for designs of slots before `t`.
fn random_one_bit_history<T: Scalar>(
    n_antennas: usize,
    depth: usize,
    rng: &mut impl Rng,
) -> Vec<Array1<Complex<T>>> {
    let rail = |up: bool| if up { T::one() } else { -T::one() };
    (0..depth)
        .map(|_| {
            let mut entries = Vec::with_capacity(n_antennas);
            for _ in 0..n_antennas {
                let re = rail(rng.random::<bool>());
                let im = rail(rng.random::<bool>());
                entries.push(Complex::new(re, im));
            }
            Array1::from_vec(entries)
        })
        .collect()
}
