//! A finite-group symmetric-cipher laboratory.
//!
//! The crate implements the one-key Even-Mansour scheme
//! `E_k(m) = P(m·k)·k` over an arbitrary finite group, the r-round group
//! Feistel cipher on `G × G`, and the composition
//! `Ψ_k(x) = F_{g,f,f,g}(x·k)·k`, together with the attacks against them,
//! executable security games, exact bound formulas and the statistics used
//! to compare measurements against those bounds.
//!
//! All randomness flows through [`Coins`], so any procedure can be run
//! either on a seeded stream or under [`exhaustive::exact_distribution`],
//! which computes its exact output distribution over small groups.

pub mod attacks;
pub mod coins;
pub mod em;
pub mod error;
pub mod exhaustive;
pub mod feistel;
pub mod games;
pub mod group;
pub mod oracle;
pub mod stats;

pub use coins::{Coins, SeededCoins};
pub use error::{Error, Result};
pub use group::{Element, Group};
pub use oracle::{Direction, LazyFunction, LazyPermutation};
