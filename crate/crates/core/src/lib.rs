//! Two-user SISO interference channel with improper Gaussian signaling.
//!
//! Signals are handled in the real composite form: every user transmits a
//! 2×2 covariance `Q = P [[p, α], [α, 1−p]]` and each cross link applies a
//! gain `√g` and a rotation by its phase.

pub mod asymptotics;
pub mod channel;
pub mod error;
pub mod game;
pub mod math;
pub mod rank_one;
pub mod rates;
pub mod region;
pub mod verify;

pub use channel::{random_channel, ChannelParams, ChannelScenario, Covariance2, PowerConfig, User};
pub use error::{Error, Result};
pub use math::{Angle, Mat2};
pub use rates::RatePoint;
