//! Strictly increasing continuous singular functions on `[0, 1]` with a
//! nonzero finite derivative at every point of a prescribed `F_σ` null set
//! `M = ∪ Fₙ`, evaluated with exact rational enclosures.
//!
//! Layers, bottom up: [`foundation`] (rationals, enclosures), [`nullsets`]
//! (closed null sets and level chains), [`partition`] (cells of a gap),
//! [`cantor`] (per-cell staircases), [`construction`] (`gₙ` and `f`),
//! [`verify`] (checks and reports) and [`cli`].

pub mod cantor;
pub mod cli;
pub mod construction;
pub mod error;
pub mod foundation;
pub mod nullsets;
pub mod partition;
pub mod verify;

pub use construction::SingularFunction;
pub use error::{Error, Result};
pub use foundation::{Enclosure, Interval, Rational};
pub use nullsets::{Caps, ClosedNullSet, Generator, LevelChain, Stream};
