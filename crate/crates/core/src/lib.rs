//! Kelly-criterion analysis of a biased binary Bernoulli game.
//!
//! A player stakes a fixed fraction `F` of current wealth on each of `N`
//! independent trials won with probability `p`. The crate covers the
//! binomial machinery ([`bernoulli`]), entropy ([`entropy`]), the log-utility
//! `U(F, p)` and its Kelly and break-even points ([`kelly`]), seeded
//! Monte Carlo with martingale checks ([`martingale`]), and variance and
//! fractional-Kelly trade-offs ([`risk`]).
//!
//! ```
//! use kelly_core::{kelly_fraction, utility, GameParams};
//!
//! let game = GameParams::new(0.6)?;
//! let stake = kelly_fraction(game)?;
//! assert!((stake.get() - 0.2).abs() < 1e-15);
//! assert!(utility(stake, game).value() > 0.0);
//! # Ok::<(), kelly_core::KellyError>(())
//! ```

pub mod bernoulli;
pub mod entropy;
pub mod enumeration;
pub mod error;
pub mod kelly;
pub mod martingale;
pub mod risk;

pub use bernoulli::{BinomialSpec, GameParams, Substream, TrialCounts};
pub use error::{KellyError, Result};
pub use kelly::{
    classify, f_star, f_star_approx, kelly_fraction, regime_partition, utility, BetFraction,
    Regime, UtilityValue,
};
pub use martingale::{simulate, Recording, SimConfig, TrajectoryBatch, Wager};
