//! Simulated replication of the random-versus-adaptive recommendation study.
//!
//! Each simulated user answers `n_polls` polls. A poll shows a recommended
//! order, the user's target order is drawn, and the user sorts with insertion
//! sort; the poll's time is the weighted drag cost of that sort.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Strategy, TargetSpec};
use crate::models::{MallowsParams, PreferenceModel};
use crate::order::{kendall_tau, LinearOrder};
use crate::recommend::{borda_recommend, brute_force_optimum, solve, Solver};
use crate::sorting::{run_sort, time_of, SortStrategy};

#[derive(Debug, Clone, PartialEq)]
pub struct PollRecord {
    /// 1-based user id.
    pub user: usize,
    /// 1-based poll index.
    pub poll: usize,
    pub strategy: Strategy,
    pub recommended: LinearOrder,
    pub target: LinearOrder,
    pub time: f64,
    pub dkt: u64,
    pub moves: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PollSummary {
    pub poll: usize,
    pub mean_time: f64,
    pub mean_dkt: f64,
    pub mean_moves: f64,
}

/// Perturbs each alternative's rank in `truth` by independent `N(0, std^2)`
/// noise and re-sorts by the noisy score (ties by index).
pub fn gaussian_noisy_order<R: Rng + ?Sized>(truth: &LinearOrder, std: f64, rng: &mut R) -> Result<LinearOrder> {
    let noise = Normal::new(0.0, std)
        .ok()
        .filter(|_| std > 0.0)
        .ok_or_else(|| Error::invalid(format!("noise standard deviation must be positive, got {std}")))?;
    let scores: Vec<f64> = (0..truth.len()).map(|a| (truth.position(a) + 1) as f64 + noise.sample(rng)).collect();
    let mut order: Vec<usize> = (0..truth.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    LinearOrder::new(order)
}

/// Borda ranking of the uniform distribution over `history`, or `fallback()`
/// when there is no history yet.
pub fn adaptive_borda_strategy(
    history: &[LinearOrder],
    fallback: impl FnOnce() -> Result<LinearOrder>,
) -> Result<LinearOrder> {
    if history.is_empty() {
        return fallback();
    }
    let model = PreferenceModel::uniform(history.to_vec())?;
    Ok(borda_recommend(&model.pairwise_marginals()))
}

/// Random ground truth for `m` alternatives drawn from `seed`.
pub fn ground_truth(m: usize, seed: u64) -> LinearOrder {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    LinearOrder::new(order).expect("shuffled permutation")
}

/// The distribution targets are drawn from; `None` means always the truth.
fn target_model(cfg: &ExperimentConfig, truth: &LinearOrder) -> Result<Option<PreferenceModel>> {
    Ok(match &cfg.target {
        TargetSpec::FixedTruth => None,
        TargetSpec::MallowsAroundTruth { phi } => {
            Some(PreferenceModel::mallows(MallowsParams::new(truth.clone(), *phi)?))
        }
        TargetSpec::Model { model } => Some(model.build()?),
    })
}

/// Recommendation that does not depend on the poll, for the model-based strategies.
fn static_recommendation(
    cfg: &ExperimentConfig,
    truth: &LinearOrder,
    model: Option<&PreferenceModel>,
) -> Result<Option<LinearOrder>> {
    let point;
    let model = match model {
        Some(m) => m,
        None => {
            point = PreferenceModel::uniform(vec![truth.clone()])?;
            &point
        }
    };
    Ok(match cfg.strategy {
        Strategy::Exact => Some(solve(model, Solver::Exact, cfg.brute_force_cap)?.0),
        Strategy::BruteForce => Some(brute_force_optimum(&model.pairwise_marginals(), cfg.brute_force_cap)?.0),
        Strategy::Random | Strategy::AdaptiveBorda => None,
    })
}

/// Runs the configured experiment. Records come out sorted by (user, poll) and
/// are bit-identical across runs with the same configuration.
///
/// User `u` draws targets from stream `2u` and recommendation noise from
/// stream `2u + 1` of a ChaCha generator keyed by `cfg.seed`, so different
/// strategies with the same seed see the same targets.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<PollRecord>> {
    cfg.validate()?;
    let truth = ground_truth(cfg.m, cfg.truth_seed);
    let model = target_model(cfg, &truth)?;
    let fixed = static_recommendation(cfg, &truth, model.as_ref())?;
    let sort = SortStrategy::all_insertion(cfg.m);

    let mut records = Vec::with_capacity(cfg.n_users * cfg.n_polls);
    for user in 0..cfg.n_users {
        let mut target_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        target_rng.set_stream(2 * user as u64);
        let mut noise_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        noise_rng.set_stream(2 * user as u64 + 1);

        let mut history: Vec<LinearOrder> = Vec::with_capacity(cfg.n_polls);
        let mut user_noise: Option<LinearOrder> = None;
        for poll in 0..cfg.n_polls {
            let mut noisy = || -> Result<LinearOrder> {
                if cfg.fixed_noise_per_user {
                    if let Some(o) = &user_noise {
                        return Ok(o.clone());
                    }
                }
                let o = gaussian_noisy_order(&truth, cfg.noise_std, &mut noise_rng)?;
                user_noise = Some(o.clone());
                Ok(o)
            };
            let recommended = match cfg.strategy {
                Strategy::Random => noisy()?,
                Strategy::AdaptiveBorda => adaptive_borda_strategy(&history, noisy)?,
                Strategy::Exact | Strategy::BruteForce => fixed.clone().expect("static recommendation"),
            };
            let target = match &model {
                Some(m) => m.sample(&mut target_rng),
                None => truth.clone(),
            };
            let (f, _) = run_sort(&recommended, &target, &sort)?;
            records.push(PollRecord {
                user: user + 1,
                poll: poll + 1,
                strategy: cfg.strategy,
                time: time_of(&f, &cfg.user_weight)?,
                dkt: kendall_tau(&recommended, &target)?,
                moves: f.num_moves(),
                recommended,
                target: target.clone(),
            });
            history.push(target);
        }
    }
    Ok(records)
}

/// Mean time, distance and move count for each poll index, in poll order.
pub fn per_poll_averages(records: &[PollRecord]) -> Vec<PollSummary> {
    let n_polls = records.iter().map(|r| r.poll).max().unwrap_or(0);
    (1..=n_polls)
        .map(|poll| {
            let rs: Vec<&PollRecord> = records.iter().filter(|r| r.poll == poll).collect();
            let n = rs.len().max(1) as f64;
            PollSummary {
                poll,
                mean_time: rs.iter().map(|r| r.time).sum::<f64>() / n,
                mean_dkt: rs.iter().map(|r| r.dkt as f64).sum::<f64>() / n,
                mean_moves: rs.iter().map(|r| r.moves as f64).sum::<f64>() / n,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sorting::WeightFunction;

    fn cfg(strategy: Strategy, target: TargetSpec) -> ExperimentConfig {
        ExperimentConfig {
            m: 6,
            n_users: 4,
            n_polls: 5,
            truth_seed: 3,
            seed: 9,
            noise_std: 2.0,
            strategy,
            fixed_noise_per_user: false,
            user_weight: WeightFunction::Linear,
            target,
            brute_force_cap: 9,
        }
    }

    #[test]
    fn noisy_order_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let truth = ground_truth(8, 5);
        for _ in 0..50 {
            assert_eq!(gaussian_noisy_order(&truth, 1e-9, &mut rng).unwrap(), truth);
        }
        assert!(gaussian_noisy_order(&truth, 0.0, &mut rng).is_err());
        assert!(gaussian_noisy_order(&truth, -1.0, &mut rng).is_err());
    }

    #[test]
    fn adaptive_borda_examples() {
        let s1 = LinearOrder::new(vec![2, 4, 0, 1, 3]).unwrap();
        let unused = || -> Result<LinearOrder> { unreachable!() };
        assert_eq!(adaptive_borda_strategy(std::slice::from_ref(&s1), unused).unwrap(), s1);
        assert_eq!(adaptive_borda_strategy(&vec![s1.clone(); 4], unused).unwrap(), s1);
        let fb = adaptive_borda_strategy(&[], || Ok(LinearOrder::identity(5))).unwrap();
        assert_eq!(fb, LinearOrder::identity(5));
    }

    #[test]
    fn exact_strategy_on_point_target_costs_nothing() {
        for strategy in [Strategy::Exact, Strategy::BruteForce] {
            let recs = run_experiment(&cfg(strategy, TargetSpec::FixedTruth)).unwrap();
            assert_eq!(recs.len(), 20);
            assert!(recs.iter().all(|r| r.time == 0.0 && r.dkt == 0 && r.moves == 0));
        }
    }

    #[test]
    fn records_are_ordered_and_consistent() {
        let c = cfg(Strategy::AdaptiveBorda, TargetSpec::MallowsAroundTruth { phi: 0.6 });
        let recs = run_experiment(&c).unwrap();
        let keys: Vec<_> = recs.iter().map(|r| (r.user, r.poll)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        for r in &recs {
            let (f, _) = run_sort(&r.recommended, &r.target, &SortStrategy::all_insertion(6)).unwrap();
            assert_eq!(r.time, time_of(&f, &WeightFunction::Linear).unwrap());
            assert_eq!(r.time, r.dkt as f64);
        }
        assert_eq!(run_experiment(&c).unwrap(), recs);
    }

    #[test]
    fn strategies_share_targets() {
        let t = TargetSpec::MallowsAroundTruth { phi: 0.5 };
        let a = run_experiment(&cfg(Strategy::Random, t.clone())).unwrap();
        let b = run_experiment(&cfg(Strategy::AdaptiveBorda, t)).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.target == y.target));
    }

    #[test]
    fn fixed_noise_repeats_recommendation() {
        let mut c = cfg(Strategy::Random, TargetSpec::FixedTruth);
        c.fixed_noise_per_user = true;
        let recs = run_experiment(&c).unwrap();
        for u in 1..=4 {
            let mine: Vec<_> = recs.iter().filter(|r| r.user == u).collect();
            assert!(mine.iter().all(|r| r.recommended == mine[0].recommended));
        }
    }

    #[test]
    fn averages_per_poll() {
        let recs = run_experiment(&cfg(Strategy::Random, TargetSpec::FixedTruth)).unwrap();
        let avg = per_poll_averages(&recs);
        assert_eq!(avg.len(), 5);
        let manual: f64 = recs.iter().filter(|r| r.poll == 2).map(|r| r.time).sum::<f64>() / 4.0;
        assert_eq!(avg[1].mean_time, manual);
    }
}
