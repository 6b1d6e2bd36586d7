//! Key distribution with mutually unbiased bases under a computational
//! timelock.
//!
//! Alice encodes a key bit `x` into one of the `d/2` vectors of the
//! `x`-half of a basis `θ` drawn from a complete family of `d + 1` mutually
//! unbiased bases in `ℂ^d`. The choice of `θ` reaches Bob under a short-lived
//! encryption, so an eavesdropper who cannot store quantum states long
//! enough has to measure without knowing the basis.
//!
//! - [`mub`] builds and verifies the bases for `d = 2^k`.
//! - [`protocol`] covers encoding, Bob's measurement, Monte Carlo runs and
//!   privacy amplification.
//! - [`security`] holds every bound on the eavesdropper, with exact oracles
//!   for small `d`.
//! - [`ratemodel`] turns loss, detector noise and those bounds into a
//!   secret-key rate versus distance.
//!
//! ```
//! use mubqct::mub::{build_mub_family, verify_unbiasedness};
//!
//! let family = build_mub_family(3)?; // d = 8
//! assert_eq!(family.num_bases(), 9);
//! assert!(verify_unbiasedness(&family, 1e-9).passed);
//! # Ok::<(), mubqct::Error>(())
//! ```

pub mod error;
pub mod fmt;
pub mod gf2k;
pub mod linalg;
pub mod mub;
pub mod protocol;
pub mod ratemodel;
pub mod security;

pub use error::{Error, Result};
