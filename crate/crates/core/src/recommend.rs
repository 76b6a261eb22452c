//! Recommendation solvers.
//!
//! Under linear weights the expected sorting time of a recommendation `s` is
//! its expected Kendall's tau distance to the user's order, which depends on
//! the preference distribution only through its pairwise marginals:
//! `E[time(s)] = sum over (i above j in s) of Pr(j above i)`.
//! Every linear-weight objective here is evaluated that way, exactly.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::models::{MallowsParams, PairwiseMarginalMatrix, PlackettLuceParams, PreferenceModel};
use crate::order::{next_permutation, LinearOrder};
use crate::sorting::{run_sort, time_of, SortStrategy, WeightFunction};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 9;

/// Approximation factor of the Borda ordering for tournaments with `b = 1`.
pub const BORDA_APPROX_FACTOR: f64 = 5.0;

const IMPROVEMENT_TOL: f64 = 1e-12;

fn check_dim(s: &LinearOrder, marginals: &PairwiseMarginalMatrix) -> Result<()> {
    if s.len() != marginals.m() {
        return Err(Error::invalid(format!("order has {} alternatives, marginals have {}", s.len(), marginals.m())));
    }
    Ok(())
}

/// Expected sorting time of `s` under linear weights.
pub fn expected_time_linear(s: &LinearOrder, marginals: &PairwiseMarginalMatrix) -> Result<f64> {
    check_dim(s, marginals)?;
    Ok(objective_unchecked(s.as_slice(), marginals))
}

fn objective_unchecked(seq: &[usize], marginals: &PairwiseMarginalMatrix) -> f64 {
    let mut total = 0.0;
    for (p, &i) in seq.iter().enumerate() {
        for &j in &seq[p + 1..] {
            total += marginals.get(j, i);
        }
    }
    total
}

/// Monte Carlo estimate of `E[time_w(s, tau)]` for `tau ~ model`, with its
/// standard error. Users are simulated with insertion sort.
pub fn expected_time_mc<R: Rng + ?Sized>(
    s: &LinearOrder,
    model: &PreferenceModel,
    w: &WeightFunction,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::invalid("Monte Carlo estimate needs at least one sample"));
    }
    if s.len() != model.m() {
        return Err(Error::invalid("order and model disagree on the number of alternatives"));
    }
    w.check_dim(s.len())?;
    let strategy = SortStrategy::all_insertion(s.len());
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for n in 1..=samples {
        let tau = model.sample(rng);
        let (f, _) = run_sort(s, &tau, &strategy)?;
        let x = time_of(&f, w)?;
        let delta = x - mean;
        mean += delta / n as f64;
        m2 += delta * (x - mean);
    }
    let se = if samples > 1 { (m2 / (samples - 1) as f64 / samples as f64).sqrt() } else { 0.0 };
    Ok((mean, se))
}

/// Optimal order for a single Plackett-Luce model: decreasing weight, ties by index.
pub fn exact_single_pl(params: &PlackettLuceParams) -> LinearOrder {
    let lt = params.log_theta();
    let mut order: Vec<usize> = (0..params.m()).collect();
    order.sort_by(|&a, &b| lt[b].total_cmp(&lt[a]).then(a.cmp(&b)));
    LinearOrder::new(order).expect("sorted indices")
}

/// Optimal order for a single Mallows model: its reference order.
pub fn exact_single_mallows(params: &MallowsParams) -> LinearOrder {
    params.reference().clone()
}

/// Optimal order for the uniform distribution over one or two orders. With two,
/// both achieve the optimum; the first is returned.
pub fn exact_uniform_small(profile: &[LinearOrder]) -> Result<LinearOrder> {
    match profile {
        [first] | [first, _] => Ok(first.clone()),
        [] => Err(Error::invalid("profile is empty")),
        _ => Err(Error::UnsupportedSize(format!("exact uniform solver handles 1 or 2 orders, got {}", profile.len()))),
    }
}

/// Enumerates all `m!` orders in lexicographic order and returns the first one
/// with minimum expected linear time, with that objective.
pub fn brute_force_optimum(marginals: &PairwiseMarginalMatrix, cap: usize) -> Result<(LinearOrder, f64)> {
    let m = marginals.m();
    if m > cap {
        return Err(Error::ResourceLimit { what: "brute-force m", got: m, cap });
    }
    let mut seq: Vec<usize> = (0..m).collect();
    let mut best = seq.clone();
    let mut best_obj = objective_unchecked(&seq, marginals);
    while next_permutation(&mut seq) {
        let obj = objective_unchecked(&seq, marginals);
        if obj < best_obj - IMPROVEMENT_TOL * best_obj.abs().max(1.0) {
            best_obj = obj;
            best.copy_from_slice(&seq);
        }
    }
    Ok((LinearOrder::new(best).expect("enumerated permutation"), best_obj))
}

/// Borda ordering: increasing weighted indegree `sum_j Pr(a_j above a_i)`, ties by index.
pub fn borda_recommend(marginals: &PairwiseMarginalMatrix) -> LinearOrder {
    let m = marginals.m();
    let indegree: Vec<f64> = (0..m).map(|i| (0..m).filter(|&j| j != i).map(|j| marginals.get(j, i)).sum()).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| indegree[a].total_cmp(&indegree[b]).then(a.cmp(&b)));
    LinearOrder::new(order).expect("sorted indices")
}

/// Steepest descent over adjacent transpositions. Stops when no swap lowers
/// the objective by more than 1e-12.
pub fn local_search_refine(start: &LinearOrder, marginals: &PairwiseMarginalMatrix) -> Result<LinearOrder> {
    Ok(local_search_with_count(start, marginals)?.0)
}

/// As [`local_search_refine`], also returning the number of swaps applied.
pub fn local_search_with_count(
    start: &LinearOrder,
    marginals: &PairwiseMarginalMatrix,
) -> Result<(LinearOrder, usize)> {
    check_dim(start, marginals)?;
    let mut seq = start.as_slice().to_vec();
    let mut swaps = 0;
    loop {
        // Swapping a (above) with b changes the objective by p[a][b] - p[b][a].
        let best = seq
            .windows(2)
            .enumerate()
            .map(|(p, w)| (p, marginals.get(w[0], w[1]) - marginals.get(w[1], w[0])))
            .filter(|&(_, delta)| delta < -IMPROVEMENT_TOL)
            .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
        match best {
            Some((p, _)) => {
                seq.swap(p, p + 1);
                swaps += 1;
            }
            None => break,
        }
    }
    Ok((LinearOrder::new(seq).expect("swaps preserve the permutation"), swaps))
}

/// Weighted feedback arc set instance on a complete digraph, with
/// `w[i][j] + w[j][i] = b` for every pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TournamentInstance {
    m: usize,
    w: Vec<f64>,
    b: f64,
}

impl TournamentInstance {
    pub fn new(rows: Vec<Vec<f64>>, b: f64) -> Result<Self> {
        if !(b > 0.0 && b <= 1.0) {
            return Err(Error::invalid(format!("tournament constant b = {b} outside (0, 1]")));
        }
        let m = rows.len();
        let mut w = Vec::with_capacity(m * m);
        for row in &rows {
            if row.len() != m {
                return Err(Error::invalid("tournament weight matrix is not square"));
            }
            w.extend_from_slice(row);
        }
        for i in 0..m {
            if w[i * m + i] != 0.0 {
                return Err(Error::invalid(format!("self-loop weight at {i} must be 0")));
            }
            for j in i + 1..m {
                let (a, c) = (w[i * m + j], w[j * m + i]);
                if a < 0.0 || c < 0.0 || (a + c - b).abs() > PairwiseMarginalMatrix::PAIRING_TOL {
                    return Err(Error::invalid(format!("weights on pair ({i},{j}) must be >= 0 and sum to {b}")));
                }
            }
        }
        Ok(TournamentInstance { m, w, b })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.m + j]
    }

    /// Total weight of edges `j -> i` pointing backwards under `s` (i above j).
    pub fn objective(&self, s: &LinearOrder) -> Result<f64> {
        if s.len() != self.m {
            return Err(Error::invalid("order and tournament disagree on the number of vertices"));
        }
        let seq = s.as_slice();
        let mut total = 0.0;
        for (p, &i) in seq.iter().enumerate() {
            for &j in &seq[p + 1..] {
                total += self.weight(j, i);
            }
        }
        Ok(total)
    }
}

/// The tournament with `w[i][j] = Pr(a_i above a_j)` and `b = 1`; its feedback
/// arc weight equals the expected linear time for every order.
pub fn to_wfast(marginals: &PairwiseMarginalMatrix) -> TournamentInstance {
    TournamentInstance { m: marginals.m(), w: marginals.rows().into_iter().flatten().collect(), b: 1.0 }
}

/// `w_ref(l) / beta <= w(l) <= alpha * w_ref(l)` for every `l` in `1..m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosenessBounds {
    pub alpha: f64,
    pub beta: f64,
}

impl ClosenessBounds {
    pub fn factor(&self) -> f64 {
        self.alpha * self.beta
    }
}

/// Smallest `alpha, beta >= 1` sandwiching `w` around `reference` on `1..m`.
pub fn closeness_bounds(w: &WeightFunction, reference: &WeightFunction, m: usize) -> Result<ClosenessBounds> {
    let wt = w.to_table(m)?;
    let rt = reference.to_table(m)?;
    if let Some(l) = (0..wt.len()).find(|&i| wt[i] <= 0.0 || rt[i] <= 0.0) {
        return Err(Error::invalid(format!(
            "closeness bounds need strictly positive weights (zero at distance {})",
            l + 1
        )));
    }
    let ratios = || wt.iter().zip(&rt).map(|(a, b)| a / b);
    let alpha = ratios().fold(1.0, f64::max);
    let beta = ratios().map(|r| 1.0 / r).fold(1.0, f64::max);
    Ok(ClosenessBounds { alpha, beta })
}

/// Result of [`recommend_general_weights`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralRecommendation {
    pub order: LinearOrder,
    /// `E[time_w(order)] <= guarantee * min_s E[time_w(s)]`.
    pub guarantee: f64,
    pub bounds: ClosenessBounds,
    /// Scale `c` of the linear reference `c * l` the bounds were taken against.
    pub reference_scale: f64,
    /// Whether the linear subproblem was solved exactly.
    pub exact: bool,
}

/// Recommends for an arbitrary positive weight function by solving the
/// linear-weight problem and certifying the loss through closeness bounds.
///
/// The reference is the linear function `c * l` with `c = min_l w(l) / l`;
/// rescaling the reference does not move the linear optimum and this choice
/// minimizes `alpha * beta`. Up to `cap` alternatives the linear problem is
/// solved by enumeration, beyond it by Borda plus local search, which costs
/// the Borda factor in the guarantee.
pub fn recommend_general_weights(
    model: &PreferenceModel,
    w: &WeightFunction,
    cap: usize,
) -> Result<GeneralRecommendation> {
    let m = model.m();
    let table = w.to_table(m)?;
    let scale = table.iter().enumerate().map(|(i, x)| x / (i + 1) as f64).fold(f64::INFINITY, f64::min);
    let scale = if scale.is_finite() { scale } else { 1.0 };
    let reference = WeightFunction::Table { w: (1..m).map(|l| scale * l as f64).collect() };
    let bounds = closeness_bounds(w, &reference, m)?;

    let marginals = model.pairwise_marginals();
    let (order, exact) = if m <= cap {
        (brute_force_optimum(&marginals, cap)?.0, true)
    } else {
        (local_search_refine(&borda_recommend(&marginals), &marginals)?, false)
    };
    let solver_factor = if exact { 1.0 } else { BORDA_APPROX_FACTOR };
    Ok(GeneralRecommendation {
        order,
        guarantee: bounds.factor() * solver_factor,
        bounds,
        reference_scale: scale,
        exact,
    })
}

/// Decision form: is there an order whose expected linear time is at most `delta`?
pub fn admits_recommendation_within(marginals: &PairwiseMarginalMatrix, delta: f64, cap: usize) -> Result<bool> {
    Ok(brute_force_optimum(marginals, cap)?.1 <= delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Polynomial exact algorithm for single-component models and small profiles.
    Exact,
    Borda,
    BruteForce,
    /// Borda followed by adjacent-swap local search.
    Local,
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Solver::Exact),
            "borda" => Ok(Solver::Borda),
            "brute" | "brute-force" | "brute_force" => Ok(Solver::BruteForce),
            "local" => Ok(Solver::Local),
            _ => Err(Error::invalid(format!("unknown solver `{s}` (exact, borda, brute, local)"))),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Exact => "exact",
            Solver::Borda => "borda",
            Solver::BruteForce => "brute",
            Solver::Local => "local",
        })
    }
}

/// Runs `solver` on `model` under linear weights; returns the order and its exact objective.
pub fn solve(model: &PreferenceModel, solver: Solver, cap: usize) -> Result<(LinearOrder, f64)> {
    let marginals = model.pairwise_marginals();
    let order = match solver {
        Solver::Exact => match model {
            PreferenceModel::MixturePl(mix) if mix.len() == 1 => exact_single_pl(&mix.components()[0]),
            PreferenceModel::MixtureMallows(mix) if mix.len() == 1 => exact_single_mallows(&mix.components()[0]),
            PreferenceModel::Uniform(p) => exact_uniform_small(p.orders())?,
            _ => return Err(Error::UnsupportedSize("exact solver covers single-component mixtures only".into())),
        },
        Solver::Borda => borda_recommend(&marginals),
        Solver::BruteForce => return brute_force_optimum(&marginals, cap),
        Solver::Local => local_search_refine(&borda_recommend(&marginals), &marginals)?,
    };
    let obj = expected_time_linear(&order, &marginals)?;
    Ok((order, obj))
}
