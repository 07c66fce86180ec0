//! One-bit downlink precoding simulator for massive MIMO over
//! frequency-selective channels.
//!
//! A base station with `N` antennas and one-bit DACs serves `K` users
//! through an `L`-tap channel. Because every antenna can only emit
//! `{±1 ± j}` per slot, beamforming is a combinatorial problem; this crate
//! implements the standard relax-and-quantize workaround: design the
//! transmit vector by linear programming over the box `[-1, 1]^{2N}`,
//! maximizing a safety margin of the users' decision variables, then
//! quantize to the one-bit alphabet.
//!
//! Four designs are provided, from cheapest to most capable:
//!
//! * **passive** — per-slot design that treats inter-symbol interference
//!   from already-designed slots as a fixed disturbance;
//! * **max-min** — per-slot design that also shapes the interference the
//!   current vector will cause in the next `L - 1` slots, maximizing the
//!   worst margin over that horizon;
//! * **max-sum-min** — like max-min but maximizing the *sum* of per-slot
//!   worst margins, which trades worst-case guarantees for average quality;
//! * **bwp** — one joint LP over the whole coherence block (expensive, an
//!   upper-bound baseline).
//!
//! [`sim`] runs seeded, paired Monte-Carlo BER experiments over these
//! designs; `onebit-sim` is the command-line front end writing CSV
//! artifacts. The numerical core is generic over the float type via
//! [`Scalar`]; the `*F64` aliases below fix the common choice.

pub mod cli;
pub mod constraints;
pub mod error;
pub mod lp;
pub mod model;
pub mod precoders;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// [`model::SystemConfig`] at the working precision of the CLI.
pub type SystemConfigF64 = model::SystemConfig<f64>;
/// [`model::Channel`] over `f64`.
pub type ChannelF64 = model::Channel<f64>;
/// [`model::SymbolBlock`] over `f64`.
pub type SymbolBlockF64 = model::SymbolBlock<f64>;
/// [`model::TransmitBlock`] over `f64`.
pub type TransmitBlockF64 = model::TransmitBlock<f64>;
/// [`lp::LpProblem`] over `f64`.
pub type LpProblemF64 = lp::LpProblem<f64>;
/// [`sim::BerTable`] over `f64`.
pub type BerTableF64 = sim::BerTable<f64>;
