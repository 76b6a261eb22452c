//! Hard instances: Kemeny aggregation encoded as a Plackett-Luce mixture.
//!
//! Voter `l` becomes a component with weight `1/n` and item weights
//! `theta_i = m^(4 (m - rank_l(a_i)))`. Each component then puts almost all
//! of its pairwise mass on the voter's own order, so `n` times the expected
//! linear time of any order is within 1/2 of its Kemeny cost.

use crate::error::{Error, Result};
use crate::models::{PlackettLuceParams, PreferenceModel};
use crate::order::{kendall_tau, LinearOrder};

/// Total Kendall's tau distance from `s` to every order of `profile`.
pub fn kemeny_cost(s: &LinearOrder, profile: &[LinearOrder]) -> Result<u64> {
    profile.iter().map(|o| kendall_tau(s, o)).sum()
}

/// Builds the `n`-component mixture for a profile of `n` orders. Weights are
/// built as logarithms, `4 (m - rank) ln m`, since they overflow `f64` quickly.
pub fn kemeny_hard_instance(profile: &[LinearOrder]) -> Result<PreferenceModel> {
    let n = profile.len();
    if n == 0 {
        return Err(Error::invalid("hard instance needs a non-empty profile"));
    }
    let m = profile[0].len();
    let ln_m = (m as f64).ln();
    let components = profile
        .iter()
        .map(|o| {
            if o.len() != m {
                return Err(Error::invalid("profile orders disagree on the number of alternatives"));
            }
            let log_theta = (0..m).map(|a| 4.0 * (m - (o.position(a) + 1)) as f64 * ln_m).collect();
            PlackettLuceParams::from_log_theta(log_theta)
        })
        .collect::<Result<Vec<_>>>()?;
    PreferenceModel::mixture_pl(vec![1.0 / n as f64; n], components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recommend::expected_time_linear;

    #[test]
    fn single_voter_order_is_cheap() {
        let s1 = LinearOrder::new(vec![3, 0, 2, 1, 4]).unwrap();
        let model = kemeny_hard_instance(std::slice::from_ref(&s1)).unwrap();
        let e = expected_time_linear(&s1, &model.pairwise_marginals()).unwrap();
        assert!(e <= 0.5);
        assert!(e > 0.0);
    }

    #[test]
    fn log_weights_follow_ranks() {
        let s1 = LinearOrder::new(vec![1, 0, 2]).unwrap();
        let PreferenceModel::MixturePl(mix) = kemeny_hard_instance(&[s1]).unwrap() else {
            panic!("expected a Plackett-Luce mixture");
        };
        let lt = mix.components()[0].log_theta();
        let unit = 4.0 * 3f64.ln();
        assert!((lt[1] - lt[0] - unit).abs() < 1e-12);
        assert!((lt[0] - lt[2] - unit).abs() < 1e-12);
    }

    #[test]
    fn kemeny_cost_sums_distances() {
        let id = LinearOrder::identity(4);
        let profile = vec![id.clone(), id.reversed(), id.clone()];
        assert_eq!(kemeny_cost(&id, &profile).unwrap(), 6);
        assert!(kemeny_hard_instance(&[]).is_err());
    }
}
