//! The four transmit designs: relax-and-quantize symbol-wise precoding in
//! its passive and two active variants, plus the block-wise LP baseline.
//!
//! Every design follows the same recipe: assemble a margin-maximization LP
//! (see [`crate::constraints`]), solve it over the relaxed box
//! `[-1, 1]^{2N}`, and quantize the rails elementwise to `{±1}`. The
//! variants differ only in how much future interference the LP can see.
//! For oracle-grade cross-checks at toy sizes, [`exhaustive_search_oracle`]
//! scores every one of the `4^N` one-bit vectors with the same objective
//! the LPs relax.

use ndarray::{s, Array1, Array2, ArrayView1};
use num_complex::Complex;

use crate::constraints::{assemble_bwp_lp, assemble_swp_lp, SwpKind};
use crate::error::{Error, Result};
use crate::lp;
use crate::model::{
    min_margin_over_users, rotated_noiseless_signal, Channel, SymbolBlock, SystemConfig,
    TransmitBlock,
};
use crate::scalar::Scalar;

/// Default cap on `N · T_c` for the block-wise design, kept small because
/// its LP couples every slot (thousands of variables) and exists as a
/// quality baseline, not an operating point.
pub const BWP_CELL_LIMIT: usize = 4096;

/// The transmit designs this crate compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrecoderKind {
    /// Per-slot design ignoring the interference it causes later.
    PassiveSwp,
    /// Per-slot design maximizing the worst margin over its horizon.
    ActiveMaxMin,
    /// Per-slot design maximizing the summed per-slot worst margins.
    ActiveMaxSumMin,
    /// One joint LP over the whole coherence block.
    Bwp,
}

impl PrecoderKind {
    /// All kinds, in presentation order.
    pub const ALL: [PrecoderKind; 4] = [
        PrecoderKind::PassiveSwp,
        PrecoderKind::ActiveMaxMin,
        PrecoderKind::ActiveMaxSumMin,
        PrecoderKind::Bwp,
    ];

    /// Stable label used in CLI arguments and CSV columns.
    pub fn label(self) -> &'static str {
        match self {
            PrecoderKind::PassiveSwp => "passive",
            PrecoderKind::ActiveMaxMin => "max-min",
            PrecoderKind::ActiveMaxSumMin => "max-sum-min",
            PrecoderKind::Bwp => "bwp",
        }
    }

    /// The symbol-wise formulation behind this kind, if it has one.
    pub fn swp_kind(self) -> Option<SwpKind> {
        match self {
            PrecoderKind::PassiveSwp => Some(SwpKind::Passive),
            PrecoderKind::ActiveMaxMin => Some(SwpKind::MaxMin),
            PrecoderKind::ActiveMaxSumMin => Some(SwpKind::MaxSumMin),
            PrecoderKind::Bwp => None,
        }
    }
}

impl std::str::FromStr for PrecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PrecoderKind::ALL
            .into_iter()
            .find(|kind| kind.label() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown precoder '{s}'; expected one of passive, max-min, max-sum-min, bwp"
                ))
            })
    }
}

impl std::fmt::Display for PrecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Elementwise one-bit quantization of a rail vector `[Re x; Im x]` back
/// into `N` complex points of `{±1 ± j}`. Zero rails round up, so the map
/// is total and deterministic.
pub fn sign_quantize<T: Scalar>(rails: ArrayView1<'_, T>) -> Result<Array1<Complex<T>>> {
    if !rails.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "rail vector length {} is odd; expected [Re x; Im x]",
            rails.len()
        )));
    }
    let n = rails.len() / 2;
    let sign = |v: T| if v >= T::zero() { T::one() } else { -T::one() };
    Ok(Array1::from_shape_fn(n, |i| {
        Complex::new(sign(rails[i]), sign(rails[n + i]))
    }))
}

/// One designed slot: the quantized transmit vector and the relaxed LP
/// optimum that produced it (a margin for the passive/max-min kinds, a
/// margin sum for max-sum-min).
#[derive(Clone, Debug, PartialEq)]
pub struct SlotDesign<T> {
    /// Quantized one-bit transmit vector, length `N`.
    pub signal: Array1<Complex<T>>,
    /// Optimal objective of the relaxed design LP.
    pub relaxed_objective: T,
}

/// Designs one slot with a symbol-wise kind. `past` lists the already
/// designed vectors newest-first; the block-wise kind has no per-slot form
/// and is rejected.
pub fn precode_slot<T: Scalar>(
    kind: PrecoderKind,
    channel: &Channel<T>,
    block: &SymbolBlock<T>,
    past: &[ArrayView1<'_, Complex<T>>],
    t: usize,
    config: &SystemConfig<T>,
) -> Result<SlotDesign<T>> {
    let swp = kind.swp_kind().ok_or_else(|| {
        Error::InvalidArgument("block-wise precoding has no per-slot design".into())
    })?;
    let problem = assemble_swp_lp(channel, block, past, t, swp, config)?;
    let optimum =
        lp::solve(&problem)?.into_optimal(&format!("{} design at slot {t}", kind.label()))?;
    let signal = sign_quantize(optimum.values.slice(s![..2 * config.n_antennas]))?;
    Ok(SlotDesign {
        signal,
        relaxed_objective: optimum.objective_value,
    })
}

/// A designed coherence block plus per-slot diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecodeResult<T> {
    /// The quantized one-bit transmit block.
    pub transmit_block: TransmitBlock<T>,
    /// Relaxed LP optimum per slot. The block-wise design solves a single
    /// LP, so its (shared) optimum is replicated across all slots.
    pub relaxed_objectives: Vec<T>,
    /// Worst-user safety margin per slot of the *quantized* block under the
    /// full physical interference, the quantity that actually decides
    /// detection errors.
    pub achieved_min_margins: Vec<T>,
}

/// Designs a whole coherence block with any kind.
///
/// `bwp_limit` caps `N · T_c` for the block-wise kind ([`BWP_CELL_LIMIT`]
/// is the CLI default); `None` removes the cap. Symbol-wise kinds design
/// slots in order, feeding each design into the next slots' interference
/// terms.
pub fn precode_block<T: Scalar>(
    kind: PrecoderKind,
    channel: &Channel<T>,
    block: &SymbolBlock<T>,
    config: &SystemConfig<T>,
    bwp_limit: Option<usize>,
) -> Result<PrecodeResult<T>> {
    let t_c = block.block_length();
    let n = config.n_antennas;
    let (signals, relaxed_objectives) = if kind == PrecoderKind::Bwp {
        if let Some(limit) = bwp_limit {
            let cells = n * t_c;
            if cells > limit {
                return Err(Error::Config(format!(
                    "block-wise LP size n_antennas * block_length = {cells} exceeds the cap of \
                     {limit}"
                )));
            }
        }
        let problem = assemble_bwp_lp(channel, block, config)?;
        let optimum = lp::solve(&problem)?.into_optimal("block-wise design")?;
        let mut signals = Array2::zeros((t_c, n));
        for t in 0..t_c {
            let rails = optimum.values.slice(s![2 * n * t..2 * n * (t + 1)]);
            signals.row_mut(t).assign(&sign_quantize(rails)?);
        }
        (signals, vec![optimum.objective_value; t_c])
    } else {
        let mut signals = Array2::zeros((t_c, n));
        let mut objectives = Vec::with_capacity(t_c);
        for t in 0..t_c {
            let past: Vec<ArrayView1<'_, Complex<T>>> = (0..t)
                .rev()
                .take(config.n_taps.saturating_sub(1))
                .map(|i| signals.row(i))
                .collect();
            let design = precode_slot(kind, channel, block, &past, t, config)?;
            objectives.push(design.relaxed_objective);
            signals.row_mut(t).assign(&design.signal);
        }
        (signals, objectives)
    };

    let achieved_min_margins = achieved_margins(channel, block, &signals, config)?;
    Ok(PrecodeResult {
        transmit_block: TransmitBlock::from_signals(signals)?,
        relaxed_objectives,
        achieved_min_margins,
    })
}

/// Worst-user margin of every slot of a quantized block under the full
/// in-block interference.
fn achieved_margins<T: Scalar>(
    channel: &Channel<T>,
    block: &SymbolBlock<T>,
    signals: &Array2<Complex<T>>,
    config: &SystemConfig<T>,
) -> Result<Vec<T>> {
    let theta = config.theta();
    let gamma = config.gamma();
    let mut margins = Vec::with_capacity(block.block_length());
    for t in 0..block.block_length() {
        let recent: Vec<ArrayView1<'_, Complex<T>>> = (0..channel.n_taps())
            .filter_map(|ell| t.checked_sub(ell))
            .map(|slot| signals.row(slot))
            .collect();
        let z = rotated_noiseless_signal(channel, &recent, block.symbols_at(t), gamma)?;
        margins.push(min_margin_over_users(&z, theta)?);
    }
    Ok(margins)
}

/// Scores a candidate one-bit vector for slot `t` with the objective the
/// symbol-wise LPs relax: the worst-user margin per horizon slot, either
/// minimized (passive, max-min) or summed (max-sum-min) across the
/// horizon. Horizon slots after `t` assume the not-yet-designed vectors
/// are silent, exactly like the LP does.
pub fn horizon_objective<T: Scalar>(
    kind: SwpKind,
    channel: &Channel<T>,
    block: &SymbolBlock<T>,
    past: &[ArrayView1<'_, Complex<T>>],
    t: usize,
    candidate: ArrayView1<'_, Complex<T>>,
    config: &SystemConfig<T>,
) -> Result<T> {
    if candidate.len() != config.n_antennas {
        return Err(Error::Dimension(format!(
            "candidate has length {}, expected {}",
            candidate.len(),
            config.n_antennas
        )));
    }
    let t_c = block.block_length();
    if t >= t_c {
        return Err(Error::InvalidArgument(format!(
            "slot {t} outside block of length {t_c}"
        )));
    }
    let gamma = config.gamma();
    let theta = config.theta();
    let horizon = kind.horizon(config.n_taps, t_c, t);
    let silent = Array1::<Complex<T>>::zeros(config.n_antennas);

    let mut total = T::zero();
    let mut worst = T::infinity();
    for ell in 0..horizon {
        // Seen from slot t + ell: `ell` silent future vectors, the
        // candidate, then the fixed past.
        let mut recent: Vec<ArrayView1<'_, Complex<T>>> = Vec::with_capacity(ell + 1 + past.len());
        recent.extend(std::iter::repeat_n(silent.view(), ell));
        recent.push(candidate);
        recent.extend(past.iter().copied());
        let z = rotated_noiseless_signal(channel, &recent, block.symbols_at(t + ell), gamma)?;
        let slot_margin = min_margin_over_users(&z, theta)?;
        total += slot_margin;
        worst = worst.min(slot_margin);
    }
    Ok(match kind {
        SwpKind::Passive | SwpKind::MaxMin => worst,
        SwpKind::MaxSumMin => total,
    })
}

/// Exhaustively maximizes [`horizon_objective`] over all `4^N` one-bit
/// vectors. Ties break toward the lexicographically first candidate in
/// enumeration order (antenna 0's real rail is the least significant bit,
/// a cleared bit meaning `-1`). Capped at `N ≤ 8`.
pub fn exhaustive_search_oracle<T: Scalar>(
    kind: SwpKind,
    channel: &Channel<T>,
    block: &SymbolBlock<T>,
    past: &[ArrayView1<'_, Complex<T>>],
    t: usize,
    config: &SystemConfig<T>,
) -> Result<(Array1<Complex<T>>, T)> {
    let n = config.n_antennas;
    if n > 8 {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search over 4^{n} candidates is capped at 8 antennas"
        )));
    }
    let rail = |bit: bool| if bit { T::one() } else { -T::one() };
    let mut best: Option<(Array1<Complex<T>>, T)> = None;
    for code in 0u64..(1u64 << (2 * n)) {
        let candidate = Array1::from_shape_fn(n, |i| {
            Complex::new(
                rail(code >> (2 * i) & 1 == 1),
                rail(code >> (2 * i + 1) & 1 == 1),
            )
        });
        let objective = horizon_objective(kind, channel, block, past, t, candidate.view(), config)?;
        if best
            .as_ref()
            .is_none_or(|(_, incumbent)| objective > *incumbent)
        {
            best = Some((candidate, objective));
        }
    }
    Ok(best.expect("4^N candidates with N >= 1"))
}
