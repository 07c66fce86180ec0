//! Real-valued LP constraint assembly.
//!
//! The margin condition for one user is piecewise linear: with the rotated
//! sample split as `z = (Aξ + Re u) + j(Bξ + Im u)` — where `ξ = [Re x; Im x]`
//! stacks the transmit vector's rails, `A`/`B` realify the effective channel
//! `W = γ diag(conj(s)) H`, and `u` collects interference from already-fixed
//! slots — requiring `margin(z) ≥ δ` is equivalent to the two row families
//!
//! ```text
//! ( B − tan θ · A) ξ + δ / cos θ ≤ tan θ · Re u − Im u
//! (−B − tan θ · A) ξ + δ / cos θ ≤ tan θ · Re u + Im u
//! ```
//!
//! obtained by splitting `|Im z|` into its two signs and dividing by `cos θ`.
//! This module builds those blocks and assembles them into complete LPs for
//! the symbol-wise (per-slot) and block-wise designs.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lp::LpProblem;
use crate::model::{Channel, SymbolBlock, SystemConfig};
use crate::scalar::Scalar;

/// How a symbol-wise LP treats the design horizon and its margin variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SwpKind {
    /// Design for the current slot only; interference the new vector causes
    /// in later slots is ignored.
    Passive,
    /// Maximize one margin shared across the whole reachable horizon.
    MaxMin,
    /// Maximize the sum of per-slot margins over the horizon.
    MaxSumMin,
}

impl SwpKind {
    /// Number of horizon slots a design at slot `t` looks at: 1 for the
    /// passive kind, otherwise `L` truncated at the end of the block.
    ///
    /// Panics if `t >= block_length`.
    pub fn horizon(self, n_taps: usize, block_length: usize, t: usize) -> usize {
        assert!(
            t < block_length,
            "slot index {t} outside block of length {block_length}"
        );
        match self {
            SwpKind::Passive => 1,
            SwpKind::MaxMin | SwpKind::MaxSumMin => n_taps.min(block_length - t),
        }
    }

    /// Number of margin variables the kind appends to the `2N` rail
    /// variables for a given horizon.
    pub fn margin_vars(self, horizon: usize) -> usize {
        match self {
            SwpKind::Passive | SwpKind::MaxMin => 1,
            SwpKind::MaxSumMin => horizon,
        }
    }
}

impl std::fmt::Display for SwpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SwpKind::Passive => "passive",
            SwpKind::MaxMin => "max-min",
            SwpKind::MaxSumMin => "max-sum-min",
        })
    }
}

/// Effective channel seen by the design variable through one tap:
/// `W = γ · diag(conj(s)) · tap`, shape `K × N`.
pub fn build_w<T: Scalar>(
    symbols: ArrayView1<'_, Complex<T>>,
    tap: ArrayView2<'_, Complex<T>>,
    gamma: T,
) -> Result<Array2<Complex<T>>> {
    if symbols.len() != tap.nrows() {
        return Err(Error::Dimension(format!(
            "symbol count {} does not match tap rows {}",
            symbols.len(),
            tap.nrows()
        )));
    }
    Ok(Array2::from_shape_fn(tap.dim(), |(k, n)| {
        symbols[k].conj() * tap[(k, n)] * gamma
    }))
}

/// Realification of `W`: returns `(A, B)`, each `K × 2N`, such that for
/// `ξ = [Re x; Im x]` the products satisfy `A ξ = Re(W x)` and
/// `B ξ = Im(W x)`.
pub fn build_ab<T: Scalar>(w: ArrayView2<'_, Complex<T>>) -> (Array2<T>, Array2<T>) {
    let (k, n) = w.dim();
    let mut a = Array2::zeros((k, 2 * n));
    let mut b = Array2::zeros((k, 2 * n));
    for ((i, j), v) in w.indexed_iter() {
        a[(i, j)] = v.re;
        a[(i, j + n)] = -v.im;
        b[(i, j)] = v.im;
        b[(i, j + n)] = v.re;
    }
    (a, b)
}

/// Fixed interference seen at horizon slot `t + ell` from transmit vectors
/// that were already designed:
/// `u = γ · diag(conj(s_{t+ell})) · Σ_{ℓ' > ell} H_{ℓ'} x_{t+ell-ℓ'}`.
///
/// `past` holds the designed vectors newest-first (`past[0]` is `x_{t-1}`);
/// entries older than the deepest tap are ignored and missing ones count as
/// silence, matching the state at the head of a block. For `ell = L - 1`
/// the sum is empty and `u = 0`.
pub fn build_isi_vector<T: Scalar>(
    symbols_future: ArrayView1<'_, Complex<T>>,
    channel: &Channel<T>,
    past: &[ArrayView1<'_, Complex<T>>],
    ell: usize,
    gamma: T,
) -> Result<Array1<Complex<T>>> {
    let n_taps = channel.n_taps();
    if ell >= n_taps {
        return Err(Error::InvalidArgument(format!(
            "horizon offset {ell} out of range for {n_taps} taps"
        )));
    }
    if symbols_future.len() != channel.n_users() {
        return Err(Error::Dimension(format!(
            "expected {} symbols, got {}",
            channel.n_users(),
            symbols_future.len()
        )));
    }
    if let Some(bad) = past.iter().find(|x| x.len() != channel.n_antennas()) {
        return Err(Error::Dimension(format!(
            "past transmit vectors must have length {}, got {}",
            channel.n_antennas(),
            bad.len()
        )));
    }
    let mut acc = Array1::<Complex<T>>::zeros(channel.n_users());
    for tap_idx in (ell + 1)..n_taps {
        let past_idx = tap_idx - ell - 1;
        let Some(x) = past.get(past_idx) else {
            break; // deeper taps reach even further back: all silent
        };
        acc += &channel.tap(tap_idx).dot(x);
    }
    Ok(Array1::from_shape_fn(channel.n_users(), |k| {
        symbols_future[k].conj() * acc[k] * gamma
    }))
}

/// Constraint block of one horizon slot: `2K × (2N + margin_vars)` rows
/// `[B − tanθ·A | e]` over `[−B − tanθ·A | e]`, where `e` puts `1 / cos θ`
/// in the margin column `margin_index` and zero elsewhere.
pub fn build_q<T: Scalar>(
    a: ArrayView2<'_, T>,
    b: ArrayView2<'_, T>,
    theta: T,
    margin_vars: usize,
    margin_index: usize,
) -> Result<Array2<T>> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "A {:?} and B {:?} must agree in shape",
            a.dim(),
            b.dim()
        )));
    }
    if margin_index >= margin_vars {
        return Err(Error::InvalidArgument(format!(
            "margin index {margin_index} out of range for {margin_vars} margin variables"
        )));
    }
    let (tan_theta, sec_theta) = sector_slopes(theta)?;
    let (k, width) = a.dim();
    let mut q = Array2::zeros((2 * k, width + margin_vars));
    for i in 0..k {
        for j in 0..width {
            q[(i, j)] = b[(i, j)] - tan_theta * a[(i, j)];
            q[(k + i, j)] = -b[(i, j)] - tan_theta * a[(i, j)];
        }
        q[(i, width + margin_index)] = sec_theta;
        q[(k + i, width + margin_index)] = sec_theta;
    }
    Ok(q)
}

/// Right-hand side matching [`build_q`] for fixed interference `u`:
/// `[tanθ·Re u − Im u]` stacked over `[tanθ·Re u + Im u]`.
pub fn build_c<T: Scalar>(u: ArrayView1<'_, Complex<T>>, theta: T) -> Result<Array1<T>> {
    let (tan_theta, _) = sector_slopes(theta)?;
    let k = u.len();
    Ok(Array1::from_shape_fn(2 * k, |i| {
        if i < k {
            tan_theta * u[i].re - u[i].im
        } else {
            tan_theta * u[i - k].re + u[i - k].im
        }
    }))
}

/// `(tan θ, 1 / cos θ)`, rejecting sector angles where the split-row form
/// degenerates. Valid PSK orders give `θ = π/D ≤ π/4`, well inside range.
fn sector_slopes<T: Scalar>(theta: T) -> Result<(T, T)> {
    // Written to reject NaN along with out-of-range values.
    if !theta.is_finite() || theta <= T::zero() || theta >= T::FRAC_PI_2() {
        return Err(Error::InvalidArgument(format!(
            "sector half-angle must lie in (0, π/2), got {theta}"
        )));
    }
    Ok((theta.tan(), T::one() / theta.cos()))
}

/// Assembles the symbol-wise design LP for slot `t`.
///
/// Variables are `[Re x_t; Im x_t]` (boxed to `[-1, 1]`) followed by the
/// kind's margin variables (free). Rows come in `2K` blocks, one per
/// horizon slot in increasing lookahead order; the objective maximizes the
/// margin (or their sum). Needs `psk_order >= 4` so that the sector slopes
/// are finite.
pub fn assemble_swp_lp<T: Scalar>(
    channel: &Channel<T>,
    block: &SymbolBlock<T>,
    past: &[ArrayView1<'_, Complex<T>>],
    t: usize,
    kind: SwpKind,
    config: &SystemConfig<T>,
) -> Result<LpProblem<T>> {
    check_scenario(channel, block, config)?;
    let t_c = block.block_length();
    if t >= t_c {
        return Err(Error::InvalidArgument(format!(
            "slot {t} outside block of length {t_c}"
        )));
    }
    let gamma = config.gamma();
    let theta = config.theta();
    let k_users = config.n_users;
    let rail_vars = 2 * config.n_antennas;
    let horizon = kind.horizon(config.n_taps, t_c, t);
    let margin_vars = kind.margin_vars(horizon);
    let n_vars = rail_vars + margin_vars;

    let mut matrix = Array2::zeros((2 * k_users * horizon, n_vars));
    let mut rhs = Array1::zeros(2 * k_users * horizon);
    for ell in 0..horizon {
        let symbols = block.symbols_at(t + ell);
        let w = build_w(symbols, channel.tap(ell).view(), gamma)?;
        let (a, b) = build_ab(w.view());
        let margin_index = match kind {
            SwpKind::MaxSumMin => ell,
            _ => 0,
        };
        let q = build_q(a.view(), b.view(), theta, margin_vars, margin_index)?;
        let u = build_isi_vector(symbols, channel, past, ell, gamma)?;
        let c = build_c(u.view(), theta)?;
        let rows = 2 * k_users * ell..2 * k_users * (ell + 1);
        matrix.slice_mut(s![rows.clone(), ..]).assign(&q);
        rhs.slice_mut(s![rows]).assign(&c);
    }

    let mut objective = Array1::zeros(n_vars);
    objective.slice_mut(s![rail_vars..]).fill(T::one());
    Ok(LpProblem {
        objective,
        ineq_matrix: matrix,
        ineq_rhs: rhs,
        lower_bounds: boxed_lower(rail_vars, margin_vars),
        upper_bounds: boxed_upper(rail_vars, margin_vars),
    })
}

/// Assembles the block-wise design LP covering all `T_c` slots at once.
///
/// Variables are the rail splits of every slot in order (`ξ_0 … ξ_{T_c-1}`)
/// plus one shared margin variable; rows are `2K` per slot, and each slot's
/// block couples every in-block transmit vector its taps can reach. There
/// is no fixed interference — the right-hand side is zero.
pub fn assemble_bwp_lp<T: Scalar>(
    channel: &Channel<T>,
    block: &SymbolBlock<T>,
    config: &SystemConfig<T>,
) -> Result<LpProblem<T>> {
    check_scenario(channel, block, config)?;
    let gamma = config.gamma();
    let theta = config.theta();
    let k_users = config.n_users;
    let t_c = block.block_length();
    let rail_vars = 2 * config.n_antennas;
    let n_vars = rail_vars * t_c + 1;
    let margin_col = rail_vars * t_c;

    let mut matrix = Array2::zeros((2 * k_users * t_c, n_vars));
    for t in 0..t_c {
        let symbols = block.symbols_at(t);
        for ell in 0..config.n_taps.min(t + 1) {
            let w = build_w(symbols, channel.tap(ell).view(), gamma)?;
            let (a, b) = build_ab(w.view());
            let q = build_q(a.view(), b.view(), theta, 1, 0)?;
            let rows = 2 * k_users * t..2 * k_users * (t + 1);
            let cols = rail_vars * (t - ell)..rail_vars * (t - ell + 1);
            matrix
                .slice_mut(s![rows.clone(), cols])
                .assign(&q.slice(s![.., ..rail_vars]));
            matrix
                .slice_mut(s![rows, margin_col..margin_col + 1])
                .assign(&q.slice(s![.., rail_vars..]));
        }
    }

    let mut objective = Array1::zeros(n_vars);
    objective[margin_col] = T::one();
    Ok(LpProblem {
        objective,
        ineq_matrix: matrix,
        ineq_rhs: Array1::zeros(2 * k_users * t_c),
        lower_bounds: boxed_lower(rail_vars * t_c, 1),
        upper_bounds: boxed_upper(rail_vars * t_c, 1),
    })
}

fn boxed_lower<T: Scalar>(rail_vars: usize, margin_vars: usize) -> Array1<T> {
    let mut lower = Array1::from_elem(rail_vars + margin_vars, -T::one());
    lower.slice_mut(s![rail_vars..]).fill(T::neg_infinity());
    lower
}

fn boxed_upper<T: Scalar>(rail_vars: usize, margin_vars: usize) -> Array1<T> {
    let mut upper = Array1::from_elem(rail_vars + margin_vars, T::one());
    upper.slice_mut(s![rail_vars..]).fill(T::infinity());
    upper
}

fn check_scenario<T: Scalar>(
    channel: &Channel<T>,
    block: &SymbolBlock<T>,
    config: &SystemConfig<T>,
) -> Result<()> {
    config.validate()?;
    if config.psk_order < 4 {
        return Err(Error::Config(format!(
            "LP precoding requires psk_order >= 4 (sector slopes diverge at order {}); \
             only detection supports order 2",
            config.psk_order
        )));
    }
    if channel.n_users() != config.n_users
        || channel.n_antennas() != config.n_antennas
        || channel.n_taps() != config.n_taps
    {
        return Err(Error::Dimension(format!(
            "channel is {}x{} with {} taps but config says {}x{} with {}",
            channel.n_users(),
            channel.n_antennas(),
            channel.n_taps(),
            config.n_users,
            config.n_antennas,
            config.n_taps
        )));
    }
    if block.n_users() != config.n_users
        || block.block_length() != config.block_length
        || block.psk_order() != config.psk_order
    {
        return Err(Error::Dimension(
            "symbol block does not match the scenario configuration".into(),
        ));
    }
    Ok(())
}
