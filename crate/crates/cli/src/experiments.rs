//! Dispatch from a config to the library and assembly of the report.

use std::time::Instant;

use rayon::prelude::*;

use grouplab::attacks::{ceil_sqrt, f1_trial, f2_trial, f3_trial, slide_attack, SlideConfig};
use grouplab::em::EmInstance;
use grouplab::feistel::{PairCipher, PairPermutation, RoundFunctionChain};
use grouplab::games::advantage::{em_samples, psi_samples, sample_worlds, slide_relation_adversary};
use grouplab::games::bounds::{
    approx, bad_bound, badg_bound, em_bad_key_bound, psi_bound,
};
use grouplab::games::em_games::{exhaustive_game_equivalence, EmPairing, EmQuery};
use grouplab::games::problems::{run_cp, run_efp, slide_crack, slide_forgery};
use grouplab::games::psi_games::{bad_trial, badg_trial, PsiWorld};
use grouplab::games::QueryBudget;
use grouplab::{Coins, Group, SeededCoins};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::report::{Aggregate, BoundValue, Rate, Report, TrialRecord};

const VERIFY_CHECKS: u32 = 8;

struct Outcome {
    trials: Vec<TrialRecord>,
    aggregate: Aggregate,
    bound: Vec<BoundValue>,
}

/// Runs `cfg` and returns its report. Optional flags the experiment reads
/// are resolved to their defaults and echoed in `report.config`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let g = cfg.group()?;
    let mut cfg = cfg.clone();
    let out = match cfg.experiment {
        Experiment::Slide => slide(&mut cfg, &g)?,
        Experiment::Feistel1 => feistel(&cfg, &g, 1)?,
        Experiment::Feistel2 => feistel(&cfg, &g, 2)?,
        Experiment::Feistel3 => feistel(&cfg, &g, 3)?,
        Experiment::PsiAdvantage => psi_advantage(&mut cfg, &g)?,
        Experiment::EmAdvantage => em_advantage(&mut cfg, &g)?,
        Experiment::Efp | Experiment::Cp => problem(&mut cfg, &g)?,
        Experiment::GameEquivalence => game_equivalence(&cfg, &g)?,
        Experiment::BadEventRate => bad_events(&mut cfg, &g)?,
    };
    Ok(Report {
        config: cfg,
        trials: out.trials,
        aggregate: out.aggregate,
        bound: out.bound,
        duration_ms: start.elapsed().as_millis() as u64,
    })
}

fn resolve_d(cfg: &mut ExperimentConfig, g: &Group) -> Result<u128, CliError> {
    let d = cfg.d.map_or_else(|| ceil_sqrt(g.order()), u128::from);
    if d == 0 || d > g.order() {
        return Err(CliError::config("d", format!("must lie in 1..={}", g.order())));
    }
    cfg.d = Some(d as u64);
    Ok(d)
}

fn require_trials(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.trials == 0 {
        return Err(CliError::config("trials", "this experiment needs at least one sample"));
    }
    Ok(())
}

fn per_trial<T: Send>(
    cfg: &ExperimentConfig,
    run: impl Fn(&mut SeededCoins) -> grouplab::Result<T> + Sync,
) -> Result<Vec<T>, CliError> {
    Ok((0..cfg.trials)
        .into_par_iter()
        .map(|i| run(&mut SeededCoins::for_trial(cfg.seed, i)))
        .collect::<grouplab::Result<Vec<T>>>()?)
}

fn success(trials: Vec<TrialRecord>, bound: Vec<BoundValue>) -> Result<Outcome, CliError> {
    Ok(Outcome {
        aggregate: Aggregate::SuccessRate(Rate::count(&trials, |t| t.verdict)?),
        trials,
        bound,
    })
}

fn slide(cfg: &mut ExperimentConfig, g: &Group) -> Result<Outcome, CliError> {
    let d = resolve_d(cfg, g)?;
    let sc = SlideConfig { d, verify_checks: VERIFY_CHECKS };
    let rows = per_trial(cfg, |c| {
        let mut inst = EmInstance::generate(g, c)?;
        let planted = inst.key().clone();
        let out = slide_attack(&mut inst, &sc, c)?;
        Ok((out.key.as_ref() == Some(&planted), out))
    })?;
    let trials = rows
        .into_iter()
        .enumerate()
        .map(|(i, (hit, o))| TrialRecord {
            trial: i as u64,
            verdict: hit,
            detail: format!(
                "recovered={} candidates={} verified={} enc={} perm={}",
                o.key.is_some(),
                o.candidates,
                o.verified,
                o.enc_queries,
                o.perm_queries
            ),
        })
        .collect();
    let bound = em_bad_key_bound(d as u64, d as u64, g.order())?;
    success(trials, vec![BoundValue::new("em_bad_key_bound(s=d,t=d)", &bound)])
}

fn feistel(cfg: &ExperimentConfig, g: &Group, rounds: usize) -> Result<Outcome, CliError> {
    let adversary = |o: &mut (dyn PairCipher + 'static), c: &mut dyn Coins| match rounds {
        1 => f1_trial(o, c),
        2 => {
            let probe = o.group().sample_non_identity(c)?;
            f2_trial(o, &probe, c)
        }
        _ => f3_trial(o, c),
    };
    let outputs = sample_worlds(
        adversary,
        |c: &mut dyn Coins| -> grouplab::Result<Box<dyn PairCipher>> {
            Ok(Box::new(RoundFunctionChain::random(g, rounds, c)?))
        },
        |c: &mut dyn Coins| -> grouplab::Result<Box<dyn PairCipher>> {
            Ok(Box::new(PairPermutation::new(g, c)?))
        },
        cfg.trials,
        cfg.seed,
    )?;
    Ok(Outcome {
        aggregate: Aggregate::Distinguisher {
            cipher: Rate::count(&outputs, |o| o.0)?,
            random: Rate::count(&outputs, |o| o.1)?,
        },
        trials: pair_records(&outputs, "random"),
        bound: vec![],
    })
}

fn pair_records(outputs: &[(bool, bool)], other: &str) -> Vec<TrialRecord> {
    outputs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| TrialRecord {
            trial: i as u64,
            verdict: a,
            detail: format!("{other}={b}"),
        })
        .collect()
}

fn advantage(outputs: &[(bool, bool)], bound: &num_rational::BigRational) -> Result<Aggregate, CliError> {
    let real = Rate::count(outputs, |o| o.0)?;
    let ideal = Rate::count(outputs, |o| o.1)?;
    let measured = (real.rate - ideal.rate).abs();
    let ci_halfwidth = real.ci_halfwidth + ideal.ci_halfwidth;
    Ok(Aggregate::Advantage {
        real,
        ideal,
        measured,
        ci_halfwidth,
        within_bound: measured <= approx(bound) + ci_halfwidth,
    })
}

fn psi_advantage(cfg: &mut ExperimentConfig, g: &Group) -> Result<Outcome, CliError> {
    require_trials(cfg)?;
    let qc = *cfg.qc.get_or_insert(3);
    let qf = *cfg.qf.get_or_insert(0);
    let qg = *cfg.qg.get_or_insert(0);
    if qc < 3 {
        return Err(CliError::config("qc", "the three-round adversary makes 3 cipher queries"));
    }
    let outputs = psi_samples(
        |o, c| f3_trial(o, c),
        PsiWorld::Psi,
        PsiWorld::Random,
        g,
        QueryBudget::psi(qc, qf, qg),
        cfg.trials,
        cfg.seed,
    )?;
    let bound = psi_bound(qc, qf, qg, g.order())?;
    Ok(Outcome {
        aggregate: advantage(&outputs, &bound)?,
        trials: pair_records(&outputs, "ideal"),
        bound: vec![BoundValue::new("psi_bound", &bound)],
    })
}

fn em_advantage(cfg: &mut ExperimentConfig, g: &Group) -> Result<Outcome, CliError> {
    require_trials(cfg)?;
    let d = resolve_d(cfg, g)?;
    let need = d as u64 + 1;
    let s = *cfg.s.get_or_insert(need);
    let t = *cfg.t.get_or_insert(need);
    if s < need || t < need {
        return Err(CliError::config("s", format!("--s and --t must be at least d+1 = {need}")));
    }
    let outputs = em_samples(
        |o, c| slide_relation_adversary(o, d, c),
        g,
        QueryBudget::em(s, t),
        cfg.trials,
        cfg.seed,
    )?;
    let bound = em_bad_key_bound(s, t, g.order())?;
    Ok(Outcome {
        aggregate: advantage(&outputs, &bound)?,
        trials: pair_records(&outputs, "ideal"),
        bound: vec![BoundValue::new("em_bad_key_bound", &bound)],
    })
}

/// EFP and CP through the slide attack. Without --s/--t the budget is
/// unlimited, since verification spends a data-dependent number of queries.
fn problem(cfg: &mut ExperimentConfig, g: &Group) -> Result<Outcome, CliError> {
    let d = resolve_d(cfg, g)?;
    let sc = SlideConfig { d, verify_checks: VERIFY_CHECKS };
    let mut budget = QueryBudget::unlimited();
    budget.s = cfg.s.unwrap_or(u64::MAX);
    budget.t = cfg.t.unwrap_or(u64::MAX);
    let efp = cfg.experiment == Experiment::Efp;
    let wins = per_trial(cfg, |c| {
        let mut adv = c.split();
        if efp {
            run_efp(|o| slide_forgery(o, &sc, &mut adv), g, budget, c)
        } else {
            run_cp(|o, c0| slide_crack(o, c0, &sc, &mut adv), g, budget, c)
        }
    })?;
    let trials = wins
        .into_iter()
        .enumerate()
        .map(|(i, w)| TrialRecord {
            trial: i as u64,
            verdict: w,
            detail: String::new(),
        })
        .collect();
    let bound = em_bad_key_bound(d as u64, d as u64, g.order())?;
    success(trials, vec![BoundValue::new("em_bad_key_bound(s=d,t=d)", &bound)])
}

fn query_name(g: &Group, q: &EmQuery) -> String {
    let (tag, e) = match q {
        EmQuery::Encrypt(e) => ("E", e),
        EmQuery::Decrypt(e) => ("D", e),
        EmQuery::Permute(e) => ("P", e),
        EmQuery::PermuteInverse(e) => ("Pinv", e),
    };
    format!("{tag}({})", g.format(e))
}

/// Scripts of length 1, then 2, in a fixed order.
fn scripts(g: &Group) -> Result<Vec<Vec<EmQuery>>, CliError> {
    let mut qs = Vec::new();
    for e in g.elements()? {
        qs.push(EmQuery::Encrypt(e.clone()));
        qs.push(EmQuery::Decrypt(e.clone()));
        qs.push(EmQuery::Permute(e.clone()));
        qs.push(EmQuery::PermuteInverse(e));
    }
    let mut out: Vec<Vec<EmQuery>> = qs.iter().map(|q| vec![q.clone()]).collect();
    for a in &qs {
        for b in &qs {
            out.push(vec![a.clone(), b.clone()]);
        }
    }
    Ok(out)
}

fn game_equivalence(cfg: &ExperimentConfig, g: &Group) -> Result<Outcome, CliError> {
    if cfg.trials == 0 {
        return success(vec![], vec![]);
    }
    let all = scripts(g)?;
    let take = (cfg.trials as usize).min(all.len());
    let rows = all[..take]
        .par_iter()
        .map(|s| {
            let x = exhaustive_game_equivalence(EmPairing::XXPrime, g, s)?;
            let r = exhaustive_game_equivalence(EmPairing::RRPrime, g, s)?;
            Ok((x, r))
        })
        .collect::<grouplab::Result<Vec<_>>>()?;
    let trials = rows
        .iter()
        .zip(&all)
        .enumerate()
        .map(|(i, (&(x, r), s))| TrialRecord {
            trial: i as u64,
            verdict: x && r,
            detail: format!(
                "x_xprime={x} r_rprime={r} script={}",
                s.iter().map(|q| query_name(g, q)).collect::<Vec<_>>().join(";")
            ),
        })
        .collect();
    success(trials, vec![])
}

fn bad_events(cfg: &mut ExperimentConfig, g: &Group) -> Result<Outcome, CliError> {
    require_trials(cfg)?;
    let qc = *cfg.qc.get_or_insert(3);
    let qf = *cfg.qf.get_or_insert(2);
    let qg = *cfg.qg.get_or_insert(2);
    let rows = per_trial(cfg, |c| {
        Ok((badg_trial(g, qc, qg, &mut c.split())?, bad_trial(g, qc, qf, &mut c.split())?))
    })?;
    let badg = Rate::count(&rows, |r| r.0)?;
    let bad = Rate::count(&rows, |r| r.1)?;
    let bg = badg_bound(qc, qg, g.order())?;
    let bb = bad_bound(qc, qf, g.order())?;
    let trials = rows
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| TrialRecord {
            trial: i as u64,
            verdict: a || b,
            detail: format!("badg={a} bad={b}"),
        })
        .collect();
    Ok(Outcome {
        aggregate: Aggregate::BadEvents {
            badg_within_bound: badg.rate <= approx(&bg) + badg.ci_halfwidth,
            bad_within_bound: bad.rate <= approx(&bb) + bad.ci_halfwidth,
            badg,
            bad,
        },
        trials,
        bound: vec![BoundValue::new("badg_bound", &bg), BoundValue::new("bad_bound", &bb)],
    })
}
