//! Enumeration oracles and random instance generators shared by the
//! integration tests. Nothing here goes through the closed-form marginals.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::seq::SliceRandom;
use rand::Rng;

use ranktime::order::all_orders;
use ranktime::sorting::{run_sort, time_of, SortStrategy};
use ranktime::{kendall_tau, LinearOrder, MallowsParams, PlackettLuceParams, PreferenceModel, WeightFunction};

pub fn random_order<R: Rng>(m: usize, rng: &mut R) -> LinearOrder {
    let mut v: Vec<usize> = (0..m).collect();
    v.shuffle(rng);
    LinearOrder::new(v).unwrap()
}

fn random_gamma<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|g| g / total).collect()
}

pub fn random_pl<R: Rng>(m: usize, k: usize, rng: &mut R) -> PreferenceModel {
    let comps = (0..k)
        .map(|_| PlackettLuceParams::new((0..m).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap())
        .collect();
    PreferenceModel::mixture_pl(random_gamma(k, rng), comps).unwrap()
}

pub fn random_mallows<R: Rng>(m: usize, k: usize, rng: &mut R) -> PreferenceModel {
    let comps =
        (0..k).map(|_| MallowsParams::new(random_order(m, rng), rng.random_range(0.05..=1.0)).unwrap()).collect();
    PreferenceModel::mixture_mallows(random_gamma(k, rng), comps).unwrap()
}

pub fn random_uniform<R: Rng>(m: usize, n: usize, rng: &mut R) -> PreferenceModel {
    PreferenceModel::uniform((0..n).map(|_| random_order(m, rng)).collect()).unwrap()
}

/// One of the three families, chosen by `family % 3`.
pub fn random_model<R: Rng>(family: usize, m: usize, rng: &mut R) -> PreferenceModel {
    let k = rng.random_range(1..=3);
    match family % 3 {
        0 => random_pl(m, k, rng),
        1 => random_mallows(m, k, rng),
        _ => {
            let n = rng.random_range(1..=6);
            random_uniform(m, n, rng)
        }
    }
}

/// `(order, probability)` for every order of the model's alternatives.
pub fn support(model: &PreferenceModel) -> Vec<(LinearOrder, f64)> {
    all_orders(model.m())
        .map(|s| {
            let p = model.probability(&s).unwrap();
            (s, p)
        })
        .collect()
}

/// `Pr(a_i above a_j)` by summing probabilities over all orders.
pub fn enumerated_marginals(model: &PreferenceModel) -> Vec<Vec<f64>> {
    let m = model.m();
    let mut p = vec![vec![0.0; m]; m];
    for (s, prob) in support(model) {
        for i in 0..m {
            for j in 0..m {
                if i != j && s.prefers(i, j) {
                    p[i][j] += prob;
                }
            }
        }
    }
    p
}

/// `E[d_kt(s, tau)]` by enumeration.
pub fn enumerated_expected_dkt(s: &LinearOrder, model: &PreferenceModel) -> f64 {
    support(model).iter().map(|(t, p)| p * kendall_tau(s, t).unwrap() as f64).sum()
}

/// `E[time_w(s, tau)]` by enumeration, simulating each sort.
pub fn enumerated_expected_time(s: &LinearOrder, supp: &[(LinearOrder, f64)], w: &WeightFunction) -> f64 {
    let strategy = SortStrategy::all_insertion(s.len());
    supp.iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(t, p)| {
            let (f, _) = run_sort(s, t, &strategy).unwrap();
            p * time_of(&f, w).unwrap()
        })
        .sum()
}

/// Minimum of `E[time_w]` over all orders, by enumeration.
pub fn enumerated_optimum(model: &PreferenceModel, w: &WeightFunction) -> f64 {
    let supp = support(model);
    all_orders(model.m()).map(|s| enumerated_expected_time(&s, &supp, w)).fold(f64::INFINITY, f64::min)
}
