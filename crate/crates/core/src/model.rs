//! Scenario configuration, channel and signal containers, and the
//! safety-margin geometry every precoder in this crate optimizes.
//!
//! The downlink model: an `N`-antenna base station serves `K` single-antenna
//! users through an `L`-tap frequency-selective channel. Each antenna feeds a
//! pair of one-bit DACs, so the per-slot transmit vector lives in
//! `{±1 ± j}^N`. After scaling by the per-rail amplitude `γ = sqrt(ρ / 2N)`,
//! user `k` observes the tap convolution plus noise. Rotating the noiseless
//! observation by the conjugate of the intended D-PSK symbol moves the
//! "correct decision" region onto the sector `|arg z| < θ` with `θ = π / D`;
//! the *safety margin* of a rotated sample is its distance to that sector's
//! boundary, `Re(z)·sin θ − |Im(z)|·cos θ`.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameters of one downlink scenario.
///
/// Fields are public for easy literal construction; run
/// [`SystemConfig::validate`] before feeding a hand-built value to the rest
/// of the crate. Derived quantities (`gamma`, `theta`) are methods so they
/// cannot drift out of sync with the fields they come from.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig<T> {
    /// Number of base-station antennas `N`.
    pub n_antennas: usize,
    /// Number of single-antenna users `K`.
    pub n_users: usize,
    /// Number of channel taps `L` (1 = frequency-flat).
    pub n_taps: usize,
    /// PSK constellation order `D`; must be a power of two.
    pub psk_order: u32,
    /// Total transmit power `ρ`.
    pub total_power: T,
    /// Receiver noise variance `σ²`.
    pub noise_variance: T,
    /// Coherence-block length `T_c` in symbol slots.
    pub block_length: usize,
    /// Master seed; every random draw in a scenario derives from it.
    pub rng_seed: u64,
}

impl<T: Scalar> SystemConfig<T> {
    /// Checks the mutual consistency of all fields.
    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 {
            return Err(Error::Config("n_users must be positive".into()));
        }
        if self.n_antennas < self.n_users {
            return Err(Error::Config(format!(
                "n_antennas ({}) must be at least n_users ({})",
                self.n_antennas, self.n_users
            )));
        }
        if self.n_taps == 0 {
            return Err(Error::Config("n_taps must be positive".into()));
        }
        if self.block_length == 0 {
            return Err(Error::Config("block_length must be positive".into()));
        }
        if self.psk_order < 2 || !self.psk_order.is_power_of_two() {
            return Err(Error::Config(format!(
                "psk_order must be a power of two >= 2, got {}",
                self.psk_order
            )));
        }
        if !self.total_power.is_finite() || self.total_power <= T::zero() {
            return Err(Error::Config(
                "total_power must be positive and finite".into(),
            ));
        }
        if !self.noise_variance.is_finite() || self.noise_variance <= T::zero() {
            return Err(Error::Config(
                "noise_variance must be positive and finite".into(),
            ));
        }
        Ok(())
    }

    /// Per-rail amplitude `γ = sqrt(ρ / 2N)`.
    pub fn gamma(&self) -> T {
        (self.total_power / T::cast_usize(2 * self.n_antennas)).sqrt()
    }

    /// Decision-sector half-angle `θ = π / D`.
    pub fn theta(&self) -> T {
        T::PI() / T::cast(f64::from(self.psk_order))
    }

    /// Bits carried by one PSK symbol, `log2(D)`.
    pub fn bits_per_symbol(&self) -> u32 {
        self.psk_order.trailing_zeros()
    }
}

/// A frequency-selective channel realization: `L` complex tap matrices,
/// each `K × N`. Tap `0` is the current-slot response, tap `ℓ` acts on the
/// transmit vector sent `ℓ` slots ago.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel<T> {
    taps: Vec<Array2<Complex<T>>>,
}

impl<T: Scalar> Channel<T> {
    /// Builds a channel from tap matrices, validating the shapes agree.
    pub fn new(taps: Vec<Array2<Complex<T>>>) -> Result<Self> {
        let first = taps
            .first()
            .ok_or_else(|| Error::InvalidArgument("channel needs at least one tap".into()))?;
        let (k, n) = first.dim();
        if k == 0 || n == 0 {
            return Err(Error::InvalidArgument(
                "channel taps must be non-empty matrices".into(),
            ));
        }
        if let Some(bad) = taps.iter().find(|tap| tap.dim() != (k, n)) {
            return Err(Error::Dimension(format!(
                "all taps must share one shape; expected {:?}, found {:?}",
                (k, n),
                bad.dim()
            )));
        }
        Ok(Self { taps })
    }

    /// Number of taps `L`.
    pub fn n_taps(&self) -> usize {
        self.taps.len()
    }

    /// Number of users `K` (rows of each tap).
    pub fn n_users(&self) -> usize {
        self.taps[0].nrows()
    }

    /// Number of antennas `N` (columns of each tap).
    pub fn n_antennas(&self) -> usize {
        self.taps[0].ncols()
    }

    /// Tap matrix `H_ℓ`. Panics if `ell >= n_taps()`.
    pub fn tap(&self, ell: usize) -> &Array2<Complex<T>> {
        &self.taps[ell]
    }

    /// All taps, ordered by delay.
    pub fn taps(&self) -> &[Array2<Complex<T>>] {
        &self.taps
    }
}

/// The D-PSK point with index `d`: `exp(jπ(2d + 1) / D)`.
///
/// Indices place the `D` points strictly between the decision boundaries at
/// angles `2πd / D`, so symbol `d` owns the sector `[2πd/D, 2π(d+1)/D)`.
pub fn make_psk_symbol<T: Scalar>(d: u32, psk_order: u32) -> Result<Complex<T>> {
    if psk_order < 2 || !psk_order.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "psk order must be a power of two >= 2, got {psk_order}"
        )));
    }
    if d >= psk_order {
        return Err(Error::InvalidArgument(format!(
            "symbol index {d} out of range for {psk_order}-PSK"
        )));
    }
    let angle = T::PI() * T::cast(f64::from(2 * d + 1)) / T::cast(f64::from(psk_order));
    Ok(Complex::from_polar(T::one(), angle))
}

/// One coherence block of user symbols: indices and the matching PSK points,
/// both `T_c × K`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolBlock<T> {
    indices: Array2<u32>,
    symbols: Array2<Complex<T>>,
    psk_order: u32,
}

impl<T: Scalar> SymbolBlock<T> {
    /// Builds a block from symbol indices, mapping each to its PSK point.
    pub fn from_indices(indices: Array2<u32>, psk_order: u32) -> Result<Self> {
        let (t_c, k) = indices.dim();
        if t_c == 0 || k == 0 {
            return Err(Error::InvalidArgument(
                "symbol block must have at least one slot and one user".into(),
            ));
        }
        let mut symbols = Array2::zeros((t_c, k));
        for ((t, user), &d) in indices.indexed_iter() {
            symbols[(t, user)] = make_psk_symbol(d, psk_order)?;
        }
        Ok(Self {
            indices,
            symbols,
            psk_order,
        })
    }

    /// Block length `T_c`.
    pub fn block_length(&self) -> usize {
        self.indices.nrows()
    }

    /// Number of users `K`.
    pub fn n_users(&self) -> usize {
        self.indices.ncols()
    }

    /// Constellation order `D`.
    pub fn psk_order(&self) -> u32 {
        self.psk_order
    }

    /// All symbol indices, `T_c × K`.
    pub fn indices(&self) -> &Array2<u32> {
        &self.indices
    }

    /// All PSK points, `T_c × K`.
    pub fn symbols(&self) -> &Array2<Complex<T>> {
        &self.symbols
    }

    /// Symbol index for user `k` at slot `t`.
    pub fn index_at(&self, t: usize, user: usize) -> u32 {
        self.indices[(t, user)]
    }

    /// PSK points of all users at slot `t`.
    pub fn symbols_at(&self, t: usize) -> ArrayView1<'_, Complex<T>> {
        self.symbols.row(t)
    }
}

/// One coherence block of one-bit transmit vectors, `T_c × N`, every entry
/// in `{±1 ± j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmitBlock<T> {
    signals: Array2<Complex<T>>,
}

impl<T: Scalar> TransmitBlock<T> {
    /// Wraps a signal matrix, rejecting entries outside `{±1 ± j}`.
    pub fn from_signals(signals: Array2<Complex<T>>) -> Result<Self> {
        let (t_c, n) = signals.dim();
        if t_c == 0 || n == 0 {
            return Err(Error::InvalidArgument(
                "transmit block must have at least one slot and one antenna".into(),
            ));
        }
        let one = T::one();
        if signals
            .iter()
            .any(|v| v.re.abs() != one || v.im.abs() != one)
        {
            return Err(Error::InvalidArgument(
                "transmit entries must lie in {±1 ± j} exactly".into(),
            ));
        }
        Ok(Self { signals })
    }

    /// Block length `T_c`.
    pub fn block_length(&self) -> usize {
        self.signals.nrows()
    }

    /// Number of antennas `N`.
    pub fn n_antennas(&self) -> usize {
        self.signals.ncols()
    }

    /// All transmit vectors, `T_c × N`.
    pub fn signals(&self) -> &Array2<Complex<T>> {
        &self.signals
    }

    /// Transmit vector of slot `t`.
    pub fn slot(&self, t: usize) -> ArrayView1<'_, Complex<T>> {
        self.signals.row(t)
    }
}

/// Noiseless received samples of one slot after derotation by the intended
/// symbols: entry `k` is `γ · conj(s_k) · Σ_ℓ (H_ℓ x_{t-ℓ})_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotatedSignal<T> {
    /// One rotated sample per user.
    pub values: Array1<Complex<T>>,
}

impl<T: Scalar> RotatedSignal<T> {
    /// Safety margin of each user's sample.
    pub fn margins(&self, theta: T) -> Array1<T> {
        self.values.mapv(|z| safety_margin(z, theta))
    }
}

/// Computes the rotated noiseless signal `z_t` for one slot.
///
/// `recent_signals` holds the transmit vectors newest-first: index 0 is
/// `x_t`, index 1 is `x_{t-1}`, and so on. Slots before the start of the
/// block are silent, so passing fewer than `L` vectors treats the missing
/// ones as zero; vectors beyond tap `L-1` are ignored. Entries need not be
/// one-bit points — relaxed-valued vectors are accepted, which the linearity
/// tests rely on.
pub fn rotated_noiseless_signal<T: Scalar>(
    channel: &Channel<T>,
    recent_signals: &[ArrayView1<'_, Complex<T>>],
    symbols: ArrayView1<'_, Complex<T>>,
    gamma: T,
) -> Result<RotatedSignal<T>> {
    let k_users = channel.n_users();
    let n_antennas = channel.n_antennas();
    if symbols.len() != k_users {
        return Err(Error::Dimension(format!(
            "expected {} symbols, got {}",
            k_users,
            symbols.len()
        )));
    }
    if let Some(bad) = recent_signals.iter().find(|x| x.len() != n_antennas) {
        return Err(Error::Dimension(format!(
            "transmit vectors must have length {}, got {}",
            n_antennas,
            bad.len()
        )));
    }
    let mut combined = Array1::<Complex<T>>::zeros(k_users);
    for (ell, x) in recent_signals.iter().take(channel.n_taps()).enumerate() {
        combined += &channel.tap(ell).dot(x);
    }
    let values = Array1::from_shape_fn(k_users, |k| symbols[k].conj() * combined[k] * gamma);
    Ok(RotatedSignal { values })
}

/// Distance of a rotated sample to the decision-sector boundary:
/// `Re(z)·sin θ − |Im(z)|·cos θ`. Positive means `z` lies strictly inside
/// the correct sector `|arg z| < θ`; the value is the Euclidean distance to
/// its nearest edge.
pub fn safety_margin<T: Scalar>(z: Complex<T>, theta: T) -> T {
    z.re * theta.sin() - z.im.abs() * theta.cos()
}

/// Smallest safety margin across users — the quantity the max–min designs
/// push up. Errors on an empty sample vector.
pub fn min_margin_over_users<T: Scalar>(z: &RotatedSignal<T>, theta: T) -> Result<T> {
    if z.values.is_empty() {
        return Err(Error::InvalidArgument(
            "margin minimum over zero users is undefined".into(),
        ));
    }
    Ok(z.values
        .iter()
        .fold(T::infinity(), |acc, &v| acc.min(safety_margin(v, theta))))
}
