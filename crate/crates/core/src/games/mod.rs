//! Executable security games, bad-event detectors and bound formulas.

pub mod advantage;
pub mod bounds;
pub mod em_games;
pub mod problems;
pub mod psi_games;
pub mod transcript;

use crate::error::{Error, Result};

/// Query allowances. `s`/`t` count cipher and public-permutation queries
/// in the Even-Mansour setting; `qc`, `qf`, `qg` count cipher (both
/// directions together), `f` and `g` queries in the Ψ setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryBudget {
    pub s: u64,
    pub t: u64,
    pub qc: u64,
    pub qf: u64,
    pub qg: u64,
}

impl QueryBudget {
    pub fn unlimited() -> Self {
        QueryBudget {
            s: u64::MAX,
            t: u64::MAX,
            qc: u64::MAX,
            qf: u64::MAX,
            qg: u64::MAX,
        }
    }

    pub fn em(s: u64, t: u64) -> Self {
        QueryBudget { s, t, ..QueryBudget::unlimited() }
    }

    pub fn psi(qc: u64, qf: u64, qg: u64) -> Self {
        QueryBudget { qc, qf, qg, ..QueryBudget::unlimited() }
    }
}

pub(crate) fn charge(used: &mut u64, limit: u64, what: &str) -> Result<()> {
    if *used >= limit {
        return Err(Error::Budget(format!("more than {limit} {what} queries")));
    }
    *used += 1;
    Ok(())
}

/// Monotone bad-event flag.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GameFlag {
    bad: bool,
}

impl GameFlag {
    pub fn raise(&mut self) {
        self.bad = true;
    }

    pub fn is_bad(&self) -> bool {
        self.bad
    }
}
