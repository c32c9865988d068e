//! Monte Carlo estimates of distinguishing advantage.

use num_rational::BigRational;
use rayon::prelude::*;

use super::bounds::{em_bad_key_bound, psi_bound};
use super::psi_games::{PsiOracles, PsiRecorder, PsiWorld, PsiWorldOracles};
use super::{charge, QueryBudget};
use crate::coins::{Coins, SeededCoins};
use crate::em::{EmInstance, EmOracles, IdealCipher};
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::stats;

#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageEstimate {
    /// `|p̂_real − p̂_ideal|`
    pub measured: f64,
    pub samples: u64,
    /// Sum of the two worlds' 99% Clopper–Pearson halfwidths.
    pub ci_halfwidth: f64,
    pub bound: BigRational,
    pub real_rate: f64,
    pub ideal_rate: f64,
}

impl AdvantageEstimate {
    /// True when `measured ≤ bound + ci_halfwidth`.
    pub fn within_bound(&self) -> bool {
        self.measured <= super::bounds::approx(&self.bound) + self.ci_halfwidth
    }

    /// Aggregates per-sample `(real, ideal)` outputs.
    pub fn from_samples(outputs: &[(bool, bool)], bound: BigRational) -> Result<AdvantageEstimate> {
        let samples = outputs.len() as u64;
        if samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        let real_hits = outputs.iter().filter(|o| o.0).count() as u64;
        let ideal_hits = outputs.iter().filter(|o| o.1).count() as u64;
        let real_rate = real_hits as f64 / samples as f64;
        let ideal_rate = ideal_hits as f64 / samples as f64;
        Ok(AdvantageEstimate {
            measured: (real_rate - ideal_rate).abs(),
            samples,
            ci_halfwidth: stats::halfwidth(real_hits, samples, stats::CONFIDENCE)?
                + stats::halfwidth(ideal_hits, samples, stats::CONFIDENCE)?,
            bound,
            real_rate,
            ideal_rate,
        })
    }
}

/// The adversary's output in each world, one pair per sample.
///
/// Sample `i` derives one stream from `(seed, i)`. The adversary gets the
/// same coins in both worlds; each world gets its own.
pub fn sample_worlds<W, A, R, I>(
    adversary: A,
    real: R,
    ideal: I,
    samples: u64,
    seed: u64,
) -> Result<Vec<(bool, bool)>>
where
    W: ?Sized,
    A: Fn(&mut W, &mut dyn Coins) -> Result<bool> + Sync,
    R: Fn(&mut dyn Coins) -> Result<Box<W>> + Sync,
    I: Fn(&mut dyn Coins) -> Result<Box<W>> + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut base = SeededCoins::for_trial(seed, i);
            let adv_seed = base.next_u64();
            let mut real_coins = base.split();
            let mut ideal_coins = base.split();
            let mut world = real(&mut real_coins)?;
            let r = adversary(&mut world, &mut SeededCoins::from_seed(adv_seed))?;
            let mut world = ideal(&mut ideal_coins)?;
            let d = adversary(&mut world, &mut SeededCoins::from_seed(adv_seed))?;
            Ok((r, d))
        })
        .collect()
}

/// Plays `adversary` against both worlds `samples` times and compares how
/// often it outputs 1.
pub fn estimate_advantage<W, A, R, I>(
    adversary: A,
    real: R,
    ideal: I,
    samples: u64,
    seed: u64,
    bound: BigRational,
) -> Result<AdvantageEstimate>
where
    W: ?Sized,
    A: Fn(&mut W, &mut dyn Coins) -> Result<bool> + Sync,
    R: Fn(&mut dyn Coins) -> Result<Box<W>> + Sync,
    I: Fn(&mut dyn Coins) -> Result<Box<W>> + Sync,
{
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    AdvantageEstimate::from_samples(&sample_worlds(adversary, real, ideal, samples, seed)?, bound)
}

/// Per-sample outputs in the Ψ setting, every world wrapped in a recorder
/// that enforces `budget` and the no-repeat rule.
pub fn psi_samples<A>(
    adversary: A,
    real: PsiWorld,
    ideal: PsiWorld,
    g: &Group,
    budget: QueryBudget,
    samples: u64,
    seed: u64,
) -> Result<Vec<(bool, bool)>>
where
    A: Fn(&mut dyn PsiOracles, &mut dyn Coins) -> Result<bool> + Sync,
{
    let world = |w: PsiWorld| {
        move |coins: &mut dyn Coins| -> Result<Box<dyn PsiOracles>> {
            let oracles = PsiWorldOracles::new(w, g, coins)?;
            Ok(Box::new(PsiRecorder::new(oracles, budget)))
        }
    };
    sample_worlds(
        |o: &mut (dyn PsiOracles + 'static), c: &mut dyn Coins| adversary(o, c),
        world(real),
        world(ideal),
        samples,
        seed,
    )
}

/// Advantage in the Ψ setting. The bound is `psi_bound(q_c, q_f, q_g, |G|)`.
pub fn psi_advantage<A>(
    adversary: A,
    real: PsiWorld,
    ideal: PsiWorld,
    g: &Group,
    budget: QueryBudget,
    samples: u64,
    seed: u64,
) -> Result<AdvantageEstimate>
where
    A: Fn(&mut dyn PsiOracles, &mut dyn Coins) -> Result<bool> + Sync,
{
    let bound = psi_bound(budget.qc, budget.qf, budget.qg, g.order())?;
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    let outputs = psi_samples(adversary, real, ideal, g, budget, samples, seed)?;
    AdvantageEstimate::from_samples(&outputs, bound)
}

/// Budget enforcement for the Even-Mansour oracles.
struct EmBudget<O> {
    inner: O,
    budget: QueryBudget,
    s_used: u64,
    t_used: u64,
}

impl<O: EmOracles> EmOracles for EmBudget<O> {
    fn group(&self) -> &Group {
        self.inner.group()
    }
    fn encrypt(&mut self, m: &Element) -> Result<Element> {
        charge(&mut self.s_used, self.budget.s, "cipher")?;
        self.inner.encrypt(m)
    }
    fn decrypt(&mut self, c: &Element) -> Result<Element> {
        charge(&mut self.s_used, self.budget.s, "cipher")?;
        self.inner.decrypt(c)
    }
    fn permute(&mut self, x: &Element) -> Result<Element> {
        charge(&mut self.t_used, self.budget.t, "permutation")?;
        self.inner.permute(x)
    }
    fn permute_inverse(&mut self, y: &Element) -> Result<Element> {
        charge(&mut self.t_used, self.budget.t, "permutation")?;
        self.inner.permute_inverse(y)
    }
}

/// Per-sample outputs of `adversary` against one-key Even-Mansour (real)
/// and an independent random permutation (ideal), both next to a public
/// random permutation.
pub fn em_samples<A>(
    adversary: A,
    g: &Group,
    budget: QueryBudget,
    samples: u64,
    seed: u64,
) -> Result<Vec<(bool, bool)>>
where
    A: Fn(&mut dyn EmOracles, &mut dyn Coins) -> Result<bool> + Sync,
{
    let wrap = |o: Box<dyn EmOracles>| -> Box<dyn EmOracles> {
        Box::new(EmBudget {
            inner: o,
            budget,
            s_used: 0,
            t_used: 0,
        })
    };
    sample_worlds(
        |o: &mut (dyn EmOracles + 'static), c: &mut dyn Coins| adversary(o, c),
        |c: &mut dyn Coins| Ok(wrap(Box::new(EmInstance::generate(g, c)?))),
        |c: &mut dyn Coins| Ok(wrap(Box::new(IdealCipher::generate(g, c)))),
        samples,
        seed,
    )
}

/// Advantage in the Even-Mansour setting. The bound is `min(1, 2st/|G|)`.
pub fn em_advantage<A>(
    adversary: A,
    g: &Group,
    budget: QueryBudget,
    samples: u64,
    seed: u64,
) -> Result<AdvantageEstimate>
where
    A: Fn(&mut dyn EmOracles, &mut dyn Coins) -> Result<bool> + Sync,
{
    let bound = em_bad_key_bound(budget.s, budget.t, g.order())?;
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    AdvantageEstimate::from_samples(&em_samples(adversary, g, budget, samples, seed)?, bound)
}

/// Slide-relation distinguisher using `d + 1` queries of each kind: `d`
/// distinct cipher and permutation queries, then one check of the first
/// proposed key `k = x⁻¹·y`. Outputs 1 iff that check passes.
pub fn slide_relation_adversary(
    oracles: &mut dyn EmOracles,
    d: u128,
    coins: &mut dyn Coins,
) -> Result<bool> {
    let g = oracles.group().clone();
    let xs = g.sample_distinct(d, coins)?;
    let ys = g.sample_distinct(d, coins)?;
    let ex: Vec<Element> = xs.iter().map(|x| oracles.encrypt(x)).collect::<Result<_>>()?;
    let py: Vec<Element> = ys.iter().map(|y| oracles.permute(y)).collect::<Result<_>>()?;
    for (x, e) in xs.iter().zip(&ex) {
        let x_inv = g.inv(x)?;
        for (y, p) in ys.iter().zip(&py) {
            if g.div(e, y)? == g.op(p, &x_inv)? {
                let k = g.op(&x_inv, y)?;
                let probe = loop {
                    let v = g.sample(coins)?;
                    if !xs.contains(&v) || xs.len() as u128 >= g.order() {
                        break v;
                    }
                    coins.discard(false)?;
                };
                let c = oracles.encrypt(&probe)?;
                let y2 = oracles.permute(&g.op(&probe, &k)?)?;
                return Ok(g.op(&y2, &k)? == c);
            }
        }
    }
    Ok(false)
}
