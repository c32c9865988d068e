//! Randomness sources.
//!
//! Every random choice in the crate goes through [`Coins`], which draws a
//! uniform index below some bound. Monte Carlo code uses [`SeededCoins`];
//! the exhaustive enumerator in [`crate::exhaustive`] substitutes a replay
//! source that walks every branch of the choice tree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub trait Coins: Send {
    /// Uniform index in `0..n`. `n` must be positive.
    fn below(&mut self, n: u128) -> Result<u128>;

    /// Tells the source that the value just drawn was thrown away by a
    /// resampling loop that will draw again from an unchanged state.
    /// `raises_flag` records whether the loop set a bad-event flag while
    /// discarding. Seeded sources ignore this.
    fn discard(&mut self, raises_flag: bool) -> Result<()> {
        let _ = raises_flag;
        Ok(())
    }

    /// A source for a separately owned oracle. Seeded sources derive an
    /// independent child stream; replay sources hand out another handle on
    /// the same choice sequence.
    fn fork(&mut self) -> Box<dyn Coins>;
}

impl<C: Coins + ?Sized> Coins for &mut C {
    fn below(&mut self, n: u128) -> Result<u128> {
        (**self).below(n)
    }

    fn discard(&mut self, raises_flag: bool) -> Result<()> {
        (**self).discard(raises_flag)
    }

    fn fork(&mut self) -> Box<dyn Coins> {
        (**self).fork()
    }
}

impl<C: Coins + ?Sized> Coins for Box<C> {
    fn below(&mut self, n: u128) -> Result<u128> {
        (**self).below(n)
    }

    fn discard(&mut self, raises_flag: bool) -> Result<()> {
        (**self).discard(raises_flag)
    }

    fn fork(&mut self) -> Box<dyn Coins> {
        (**self).fork()
    }
}

/// Seeded ChaCha8 stream.
///
/// Trial streams are derived as `(master seed, trial index)` pairs by using
/// the trial index as the ChaCha stream id, so the randomness a trial sees
/// does not depend on scheduling order.
#[derive(Clone, Debug)]
pub struct SeededCoins(ChaCha8Rng);

impl SeededCoins {
    pub fn from_seed(seed: u64) -> Self {
        SeededCoins(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn for_trial(master: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master);
        rng.set_stream(trial);
        SeededCoins(rng)
    }

    /// Derives an independent child stream, advancing this one.
    pub fn split(&mut self) -> SeededCoins {
        SeededCoins(ChaCha8Rng::from_rng(&mut self.0))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.random()
    }
}

impl Coins for SeededCoins {
    fn below(&mut self, n: u128) -> Result<u128> {
        if n == 0 {
            return Err(Error::Precondition("cannot draw below 0".into()));
        }
        Ok(self.0.random_range(0..n))
    }

    fn fork(&mut self) -> Box<dyn Coins> {
        Box::new(self.split())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededCoins::from_seed(7);
        let mut b = SeededCoins::from_seed(7);
        for _ in 0..32 {
            assert_eq!(a.below(1000).unwrap(), b.below(1000).unwrap());
        }
    }

    #[test]
    fn trial_streams_differ() {
        let mut a = SeededCoins::for_trial(1, 0);
        let mut b = SeededCoins::for_trial(1, 1);
        let xs: Vec<_> = (0..8).map(|_| a.below(1 << 40).unwrap()).collect();
        let ys: Vec<_> = (0..8).map(|_| b.below(1 << 40).unwrap()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn zero_bound_rejected() {
        assert!(SeededCoins::from_seed(0).below(0).is_err());
    }
}
