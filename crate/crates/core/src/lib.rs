//! Joint optimization of the port-switching matrix of a lens-type redirective intelligent
//! surface (RedRIS), the base-station MMSE precoder, and the receive scaling, for the
//! multi-user MIMO downlink in single-cell and multi-cell settings.
//!
//! The crate is `no_std` with `alloc`; the `std` feature (on by default) only forwards to
//! the dependencies.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod channel;
pub mod error;
pub mod linalg;

pub use error::{Error, Result};
pub mod baselines;
pub mod cascade;
pub mod matching;
pub mod multicell;
pub mod perm_opt;
pub mod precoding;
pub mod reduction;
pub mod single_cell;

pub use cascade::{effective_channel, LensCascade};
pub use channel::{ChannelScenario, ChannelSet, CsiErrorModel, DftOperator, LosMode};
pub use matching::MatchingMatrix;
pub use precoding::Precoder;
