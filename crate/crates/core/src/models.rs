//! Preference distributions over linear orders: mixtures of Plackett-Luce
//! models, mixtures of Mallows models, and the uniform distribution over a
//! profile.

use rand::Rng;

use crate::error::{Error, Result};
use crate::order::{kendall_tau, LinearOrder};

const GAMMA_SUM_TOL: f64 = 1e-9;

/// Plackett-Luce item weights, normalized to sum to one.
///
/// The weights are kept both directly and as logarithms; the log form stays
/// exact when the raw weights span hundreds of orders of magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PlackettLuceParams {
    theta: Vec<f64>,
    log_theta: Vec<f64>,
}

impl PlackettLuceParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(t) = theta.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::invalid(format!("Plackett-Luce weight {t} is not positive and finite")));
        }
        Self::from_log_theta(theta.iter().map(|t| t.ln()).collect())
    }

    /// Builds the model from unnormalized log-weights.
    pub fn from_log_theta(log_theta: Vec<f64>) -> Result<Self> {
        if log_theta.is_empty() {
            return Err(Error::invalid("Plackett-Luce model needs at least one alternative"));
        }
        if let Some(l) = log_theta.iter().find(|l| !l.is_finite()) {
            return Err(Error::invalid(format!("log-weight {l} is not finite")));
        }
        let lse = log_sum_exp(&log_theta);
        let log_theta: Vec<f64> = log_theta.iter().map(|l| l - lse).collect();
        let theta = log_theta.iter().map(|l| l.exp()).collect();
        Ok(PlackettLuceParams { theta, log_theta })
    }

    pub fn m(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn log_theta(&self) -> &[f64] {
        &self.log_theta
    }

    /// `Pr(a_i above a_j) = theta_i / (theta_i + theta_j)`, as a logistic of the
    /// log-weight difference.
    pub fn pairwise(&self, i: usize, j: usize) -> f64 {
        1.0 / (1.0 + (self.log_theta[j] - self.log_theta[i]).exp())
    }

    /// Probability of `s` as a product of stagewise choices.
    pub fn probability(&self, s: &LinearOrder) -> Result<f64> {
        check_dim(self.m(), s)?;
        let logs: Vec<f64> = s.as_slice().iter().map(|&a| self.log_theta[a]).collect();
        let mut log_p = 0.0;
        for k in 0..logs.len().saturating_sub(1) {
            log_p += logs[k] - log_sum_exp(&logs[k..]);
        }
        Ok(log_p.exp())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LinearOrder {
        let mut remaining: Vec<usize> = (0..self.m()).collect();
        let mut out = Vec::with_capacity(self.m());
        while remaining.len() > 1 {
            let max = remaining.iter().map(|&a| self.log_theta[a]).fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = remaining.iter().map(|&a| (self.log_theta[a] - max).exp()).collect();
            let pick = pick_weighted(&weights, rng);
            out.push(remaining.remove(pick));
        }
        out.extend(remaining);
        LinearOrder::new(out).expect("sampled permutation")
    }
}

/// Mallows model: a reference order and a dispersion `phi` in `[0, 1]`.
///
/// `phi = 0` is the point mass on the reference order.
#[derive(Debug, Clone, PartialEq)]
pub struct MallowsParams {
    reference: LinearOrder,
    phi: f64,
}

impl MallowsParams {
    pub fn new(reference: LinearOrder, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&phi) {
            return Err(Error::invalid(format!("Mallows dispersion {phi} outside [0, 1]")));
        }
        if reference.is_empty() {
            return Err(Error::invalid("Mallows model needs at least one alternative"));
        }
        Ok(MallowsParams { reference, phi })
    }

    pub fn m(&self) -> usize {
        self.reference.len()
    }

    pub fn reference(&self) -> &LinearOrder {
        &self.reference
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Normalizing constant `prod_{i=1..m} (1 + phi + ... + phi^{i-1})`.
    pub fn normalizer(&self) -> f64 {
        (1..=self.m()).map(|i| geometric_sum(self.phi, i)).product()
    }

    pub fn probability(&self, s: &LinearOrder) -> Result<f64> {
        check_dim(self.m(), s)?;
        let d = kendall_tau(s, &self.reference)?;
        if self.phi == 0.0 {
            return Ok(if d == 0 { 1.0 } else { 0.0 });
        }
        Ok(self.phi.powf(d as f64) / self.normalizer())
    }

    pub fn pairwise(&self, i: usize, j: usize) -> f64 {
        let delta = self.reference.position(j) as i64 - self.reference.position(i) as i64;
        mallows_g(self.phi, delta).expect("distinct alternatives")
    }

    // Repeated insertion: the i-th reference item goes to slot j (0 = top) of the
    // current i-item list with weight phi^(i - j), which adds i - j inversions.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LinearOrder {
        let mut out: Vec<usize> = Vec::with_capacity(self.m());
        let mut weights = Vec::with_capacity(self.m());
        for (i, &a) in self.reference.as_slice().iter().enumerate() {
            weights.clear();
            weights.extend((0..=i).map(|j| self.phi.powi((i - j) as i32)));
            let slot = pick_weighted(&weights, rng);
            out.insert(slot, a);
        }
        LinearOrder::new(out).expect("sampled permutation")
    }
}

/// Pairwise marginal of a Mallows model for a pair whose reference ranks differ
/// by `delta = rank(a_j) - rank(a_i)`: the probability that `a_i` is ranked above `a_j`.
pub fn mallows_g(phi: f64, delta: i64) -> Result<f64> {
    if delta == 0 {
        return Err(Error::invalid("mallows_g is undefined at delta = 0"));
    }
    let d = delta.unsigned_abs() as usize;
    // powi(0.0, 0) == 1, so phi = 0 gives g = 1 for positive delta.
    let num: f64 = (1..=d).map(|z| z as f64 * phi.powi(z as i32 - 1)).sum();
    let g = num / (geometric_sum(phi, d) * geometric_sum(phi, d + 1));
    Ok(if delta > 0 { g } else { 1.0 - g })
}

fn geometric_sum(phi: f64, terms: usize) -> f64 {
    (0..terms).map(|z| phi.powi(z as i32)).sum()
}

/// Convex combination of `k` component models.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture<C> {
    gamma: Vec<f64>,
    components: Vec<C>,
}

pub trait Component {
    fn m(&self) -> usize;
}

impl Component for PlackettLuceParams {
    fn m(&self) -> usize {
        self.m()
    }
}

impl Component for MallowsParams {
    fn m(&self) -> usize {
        self.m()
    }
}

impl<C: Component> Mixture<C> {
    /// Validates the mixing weights (non-negative, summing to one within 1e-9)
    /// and rescales them to sum to exactly one.
    pub fn new(gamma: Vec<f64>, components: Vec<C>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("mixture needs at least one component"));
        }
        if gamma.len() != components.len() {
            return Err(Error::invalid(format!("{} mixing weights for {} components", gamma.len(), components.len())));
        }
        if let Some(g) = gamma.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::invalid(format!("mixing weight {g} is negative or not finite")));
        }
        let total: f64 = gamma.iter().sum();
        if (total - 1.0).abs() > GAMMA_SUM_TOL {
            return Err(Error::invalid(format!("mixing weights sum to {total}, expected 1")));
        }
        let m = components[0].m();
        if components.iter().any(|c| c.m() != m) {
            return Err(Error::invalid("mixture components disagree on the number of alternatives"));
        }
        let gamma = gamma.iter().map(|g| g / total).collect();
        Ok(Mixture { gamma, components })
    }

    pub fn single(component: C) -> Self {
        Mixture { gamma: vec![1.0], components: vec![component] }
    }

    pub fn m(&self) -> usize {
        self.components[0].m()
    }
}

impl<C> Mixture<C> {
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn components(&self) -> &[C] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &C)> {
        self.gamma.iter().copied().zip(self.components.iter())
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> &C {
        &self.components[pick_weighted(&self.gamma, rng)]
    }
}

/// A non-empty multiset of orders over the same alternatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    orders: Vec<LinearOrder>,
}

impl Profile {
    pub fn new(orders: Vec<LinearOrder>) -> Result<Self> {
        let first = orders.first().ok_or_else(|| Error::invalid("profile is empty"))?;
        if orders.iter().any(|o| o.len() != first.len()) {
            return Err(Error::invalid("profile orders disagree on the number of alternatives"));
        }
        Ok(Profile { orders })
    }

    pub fn orders(&self) -> &[LinearOrder] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn m(&self) -> usize {
        self.orders[0].len()
    }
}

/// A distribution over linear orders.
#[derive(Debug, Clone, PartialEq)]
pub enum PreferenceModel {
    MixturePl(Mixture<PlackettLuceParams>),
    MixtureMallows(Mixture<MallowsParams>),
    Uniform(Profile),
}

impl PreferenceModel {
    pub fn plackett_luce(params: PlackettLuceParams) -> Self {
        PreferenceModel::MixturePl(Mixture::single(params))
    }

    pub fn mallows(params: MallowsParams) -> Self {
        PreferenceModel::MixtureMallows(Mixture::single(params))
    }

    pub fn mixture_pl(gamma: Vec<f64>, components: Vec<PlackettLuceParams>) -> Result<Self> {
        Mixture::new(gamma, components).map(PreferenceModel::MixturePl)
    }

    pub fn mixture_mallows(gamma: Vec<f64>, components: Vec<MallowsParams>) -> Result<Self> {
        Mixture::new(gamma, components).map(PreferenceModel::MixtureMallows)
    }

    pub fn uniform(profile: Vec<LinearOrder>) -> Result<Self> {
        Profile::new(profile).map(PreferenceModel::Uniform)
    }

    /// Number of alternatives.
    pub fn m(&self) -> usize {
        match self {
            PreferenceModel::MixturePl(mix) => mix.m(),
            PreferenceModel::MixtureMallows(mix) => mix.m(),
            PreferenceModel::Uniform(p) => p.m(),
        }
    }

    pub fn probability(&self, s: &LinearOrder) -> Result<f64> {
        check_dim(self.m(), s)?;
        match self {
            PreferenceModel::MixturePl(mix) => mix.iter().map(|(g, c)| c.probability(s).map(|p| g * p)).sum(),
            PreferenceModel::MixtureMallows(mix) => mix.iter().map(|(g, c)| c.probability(s).map(|p| g * p)).sum(),
            PreferenceModel::Uniform(p) => {
                let hits = p.orders().iter().filter(|o| *o == s).count();
                Ok(hits as f64 / p.len() as f64)
            }
        }
    }

    /// Draws one order. Deterministic given the state of `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LinearOrder {
        match self {
            PreferenceModel::MixturePl(mix) => mix.pick(rng).sample(rng),
            PreferenceModel::MixtureMallows(mix) => mix.pick(rng).sample(rng),
            PreferenceModel::Uniform(p) => p.orders()[rng.random_range(0..p.len())].clone(),
        }
    }

    /// Closed-form pairwise marginals.
    pub fn pairwise_marginals(&self) -> PairwiseMarginalMatrix {
        let m = self.m();
        match self {
            PreferenceModel::MixturePl(mix) => {
                PairwiseMarginalMatrix::from_upper(m, |i, j| mix.iter().map(|(g, c)| g * c.pairwise(i, j)).sum())
            }
            PreferenceModel::MixtureMallows(mix) => {
                PairwiseMarginalMatrix::from_upper(m, |i, j| mix.iter().map(|(g, c)| g * c.pairwise(i, j)).sum())
            }
            PreferenceModel::Uniform(p) => PairwiseMarginalMatrix::from_upper(m, |i, j| {
                let above = p.orders().iter().filter(|o| o.prefers(i, j)).count();
                above as f64 / p.len() as f64
            }),
        }
    }
}

/// `p[i][j] = Pr(a_i ranked above a_j)`, with `p[i][j] + p[j][i] = 1` off the
/// diagonal and zeros on it.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseMarginalMatrix {
    m: usize,
    p: Vec<f64>,
}

impl PairwiseMarginalMatrix {
    pub const PAIRING_TOL: f64 = 1e-12;

    /// Fills `p[i][j]` for `i < j` from `upper` (clamped to `[0, 1]`) and sets
    /// `p[j][i]` to its complement.
    pub fn from_upper(m: usize, mut upper: impl FnMut(usize, usize) -> f64) -> Self {
        let mut p = vec![0.0; m * m];
        for i in 0..m {
            for j in i + 1..m {
                let v = upper(i, j).clamp(0.0, 1.0);
                p[i * m + j] = v;
                p[j * m + i] = 1.0 - v;
            }
        }
        PairwiseMarginalMatrix { m, p }
    }

    /// Validates an explicit square matrix.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let mut p = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::invalid(format!("row {i} has {} entries, expected {m}", row.len())));
            }
            p.extend_from_slice(row);
        }
        for i in 0..m {
            if p[i * m + i] != 0.0 {
                return Err(Error::invalid(format!("diagonal entry ({i},{i}) must be 0")));
            }
            for j in 0..m {
                let v = p[i * m + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::invalid(format!("entry ({i},{j}) = {v} outside [0, 1]")));
                }
                if i < j && (v + p[j * m + i] - 1.0).abs() > Self::PAIRING_TOL {
                    return Err(Error::invalid(format!("entries ({i},{j}) and ({j},{i}) do not sum to 1")));
                }
            }
        }
        Ok(PairwiseMarginalMatrix { m, p })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.m + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.p.chunks(self.m.max(1)).take(self.m).map(|r| r.to_vec()).collect()
    }
}

fn check_dim(m: usize, s: &LinearOrder) -> Result<()> {
    if s.len() != m {
        return Err(Error::invalid(format!("order has {} alternatives, model has {m}", s.len())));
    }
    Ok(())
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Index drawn with probability proportional to `weights` (not all zero).
fn pick_weighted<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        if u < w {
            return i;
        }
        u -= w;
        last = i;
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::all_orders;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pl_probability_examples() {
        let two = PlackettLuceParams::new(vec![0.5, 0.5]).unwrap();
        assert!(close(two.probability(&LinearOrder::identity(2)).unwrap(), 0.5, 1e-15));
        assert!(close(two.probability(&LinearOrder::identity(2).reversed()).unwrap(), 0.5, 1e-15));

        let uni = PlackettLuceParams::new(vec![1.0; 3]).unwrap();
        for s in all_orders(3) {
            assert!(close(uni.probability(&s).unwrap(), 1.0 / 6.0, 1e-15));
        }

        let pl = PlackettLuceParams::new(vec![0.5, 0.3, 0.2]).unwrap();
        assert!(close(pl.probability(&LinearOrder::identity(3)).unwrap(), 0.3, 1e-15));
        let total: f64 = all_orders(3).map(|s| pl.probability(&s).unwrap()).sum();
        assert!(close(total, 1.0, 1e-14));
        assert!(pl.probability(&LinearOrder::identity(4)).is_err());
    }

    #[test]
    fn pl_normalizes_on_construction() {
        let pl = PlackettLuceParams::new(vec![2.0, 6.0]).unwrap();
        assert!(close(pl.theta()[0], 0.25, 1e-15));
        assert!(close(pl.theta().iter().sum::<f64>(), 1.0, 1e-15));
        assert!(PlackettLuceParams::new(vec![1.0, 0.0]).is_err());
        assert!(PlackettLuceParams::new(vec![]).is_err());
    }

    #[test]
    fn pl_extreme_weights_stay_finite() {
        // 6^(4*5) ~ 3.6e15 and 1; pairwise needs log-space to stay exact-ish.
        let logs: Vec<f64> = (0..6).map(|r| 4.0 * (6 - 1 - r) as f64 * 6f64.ln()).collect();
        let pl = PlackettLuceParams::from_log_theta(logs).unwrap();
        let p = pl.pairwise(5, 0);
        assert!(p > 0.0 && p < 1e-15);
        assert!(close(pl.pairwise(0, 5), 1.0, 1e-15));
    }

    #[test]
    fn mallows_probability_examples() {
        for s in all_orders(3) {
            let mm = MallowsParams::new(LinearOrder::identity(3), 1.0).unwrap();
            assert!(close(mm.probability(&s).unwrap(), 1.0 / 6.0, 1e-15));
        }
        let mm = MallowsParams::new(LinearOrder::identity(2), 0.5).unwrap();
        assert!(close(mm.probability(&LinearOrder::identity(2)).unwrap(), 2.0 / 3.0, 1e-15));

        let point = MallowsParams::new(LinearOrder::identity(3), 0.0).unwrap();
        assert_eq!(point.probability(&LinearOrder::identity(3)).unwrap(), 1.0);
        assert_eq!(point.probability(&LinearOrder::identity(3).reversed()).unwrap(), 0.0);
        assert!(MallowsParams::new(LinearOrder::identity(3), 1.5).is_err());
    }

    #[test]
    fn mallows_normalizer_matches_enumeration() {
        for m in 1..=6 {
            for phi in [0.1, 0.5, 0.9, 1.0] {
                let mm = MallowsParams::new(LinearOrder::identity(m), phi).unwrap();
                let brute: f64 = all_orders(m).map(|s| phi.powf(kendall_tau(&s, mm.reference()).unwrap() as f64)).sum();
                assert!(close(mm.normalizer(), brute, 1e-10 * brute));
            }
        }
    }

    #[test]
    fn mallows_g_examples() {
        for d in 1..10 {
            assert!(close(mallows_g(1.0, d).unwrap(), 0.5, 1e-15));
            assert_eq!(mallows_g(0.0, d).unwrap(), 1.0);
        }
        assert!(close(mallows_g(0.5, 1).unwrap(), 2.0 / 3.0, 1e-15));
        assert!(close(mallows_g(0.5, -1).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(mallows_g(0.5, 0).is_err());
    }

    #[test]
    fn mallows_g_at_least_half() {
        for step in 0..=10 {
            let phi = step as f64 / 10.0;
            for d in 1..=20 {
                assert!(mallows_g(phi, d).unwrap() >= 0.5 - 1e-15, "phi={phi} d={d}");
            }
        }
    }

    #[test]
    fn marginal_examples() {
        let pl = PreferenceModel::plackett_luce(PlackettLuceParams::new(vec![0.3, 0.3, 0.4]).unwrap());
        assert_eq!(pl.pairwise_marginals().get(0, 1), 0.5);

        let mm = PreferenceModel::mallows(MallowsParams::new(LinearOrder::identity(2), 0.5).unwrap());
        let brute: f64 = all_orders(2).filter(|s| s.prefers(0, 1)).map(|s| mm.probability(&s).unwrap()).sum();
        assert!(close(mm.pairwise_marginals().get(0, 1), brute, 1e-15));
        assert!(close(brute, 2.0 / 3.0, 1e-15));

        let flat = PreferenceModel::mallows(MallowsParams::new(LinearOrder::identity(5), 1.0).unwrap());
        let m = flat.pairwise_marginals();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert!(close(m.get(i, j), 0.5, 1e-15));
                }
            }
        }
    }

    #[test]
    fn marginal_matrix_validation() {
        assert!(PairwiseMarginalMatrix::from_rows(vec![vec![0.0, 0.3], vec![0.7, 0.0]]).is_ok());
        assert!(PairwiseMarginalMatrix::from_rows(vec![vec![0.0, 0.3], vec![0.6, 0.0]]).is_err());
        assert!(PairwiseMarginalMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.0]]).is_err());
        assert!(PairwiseMarginalMatrix::from_rows(vec![vec![0.0]; 2]).is_err());
    }

    #[test]
    fn mixture_validation() {
        let a = PlackettLuceParams::new(vec![1.0, 2.0]).unwrap();
        let b = PlackettLuceParams::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(PreferenceModel::mixture_pl(vec![0.5, 0.5], vec![a.clone(), b]).is_err());
        assert!(PreferenceModel::mixture_pl(vec![0.6, 0.6], vec![a.clone(), a.clone()]).is_err());
        assert!(PreferenceModel::mixture_pl(vec![1.0], vec![a.clone(), a.clone()]).is_err());
        assert!(PreferenceModel::mixture_pl(vec![-0.5, 1.5], vec![a.clone(), a]).is_err());
        assert!(PreferenceModel::uniform(vec![]).is_err());
    }

    #[test]
    fn sampling_special_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s1 = LinearOrder::new(vec![2, 0, 1]).unwrap();
        let uni = PreferenceModel::uniform(vec![s1.clone()]).unwrap();
        let point = PreferenceModel::mallows(MallowsParams::new(s1.clone(), 0.0).unwrap());
        for _ in 0..100 {
            assert_eq!(uni.sample(&mut rng), s1);
            assert_eq!(point.sample(&mut rng), s1);
        }
    }

    #[test]
    fn pl_sample_frequency() {
        let model = PreferenceModel::plackett_luce(PlackettLuceParams::new(vec![0.5, 0.3, 0.2]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let id = LinearOrder::identity(3);
        let n = 100_000;
        let hits = (0..n).filter(|_| model.sample(&mut rng) == id).count();
        assert!(close(hits as f64 / n as f64, 0.3, 0.01));
    }
}
