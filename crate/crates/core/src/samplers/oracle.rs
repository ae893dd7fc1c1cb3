//! Brute-force exact output distributions for small instances.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_complex::Complex64;

use super::NoiseParams;
use crate::error::{Error, Result};
use crate::linalg::{binomial, ideal_probability, permanent, ComplexMatrix, FockPattern, Unitary};
use crate::numeric::CompensatedSum;

/// Exact distribution keyed by output pattern.
pub type Distribution = BTreeMap<FockPattern, f64>;

/// Default cap on the number of (pattern, partition, subset) evaluations.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// Every output multiset of `k` photons over `m` modes.
pub fn all_patterns(m: usize, k: usize) -> impl Iterator<Item = FockPattern> {
    let mut empty = (k == 0).then(|| FockPattern::vacuum(m));
    let rest = (k > 0)
        .then(|| (0..m).combinations_with_replacement(k))
        .into_iter()
        .flatten()
        .map(move |modes| FockPattern::from_modes(m, &modes).expect("modes in range"));
    std::iter::from_fn(move || empty.take()).chain(rest)
}

/// Exact distribution of indistinguishable photons entering `input_modes`.
pub fn ideal_distribution(u: &Unitary, input_modes: &[usize]) -> Result<Distribution> {
    let m = u.dim();
    let input = FockPattern::from_modes(m, input_modes)?;
    if !input.is_collision_free() {
        return Err(Error::InvalidInput("input modes must be distinct".into()));
    }
    all_patterns(m, input_modes.len())
        .map(|s| ideal_probability(u, &input, &s).map(|p| (s, p)))
        .collect()
}

/// Exact output distribution of photons in modes `0..n`, conditioned on
/// exactly `lost` of them being lost.
///
/// Averages over the equally likely survivor subsets, sums over interfering
/// subsets `G` with weight `x^|G| (1 - x)^(k - |G|)`, and convolves the ideal
/// distribution of `G` with classical placements of the remaining photons.
/// Refuses with [`Error::BudgetExceeded`] when
/// `C(n, lost) 2^k C(m + k - 1, k)` exceeds `budget`, with `k = n - lost`.
pub fn exact_noisy_distribution(
    u: &Unitary,
    n: usize,
    noise: NoiseParams,
    lost: usize,
    budget: u128,
) -> Result<Distribution> {
    let m = u.dim();
    if n > m || lost > n {
        return Err(Error::InvalidInput(format!(
            "need lost <= n <= m, got lost={lost}, n={n}, m={m}"
        )));
    }
    let k = n - lost;
    let required = binomial(n, lost)
        .saturating_mul(1u128.checked_shl(k as u32).unwrap_or(u128::MAX))
        .saturating_mul(binomial(m + k - 1, k));
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }

    let x = noise.x();
    let subsets = binomial(n, lost) as f64;
    let mut ideal_cache: HashMap<Vec<usize>, Distribution> = HashMap::new();
    let mut acc: BTreeMap<FockPattern, CompensatedSum> = BTreeMap::new();

    for survivors in (0..n).combinations(k) {
        for mask in 0u32..(1 << k) {
            let size = mask.count_ones() as i32;
            let weight = x.powi(size) * (1.0 - x).powi(k as i32 - size);
            if weight == 0.0 {
                continue;
            }
            let (group, singles): (Vec<usize>, Vec<usize>) =
                survivors.iter().enumerate().partition_map(|(bit, &mode)| {
                    if mask >> bit & 1 == 1 {
                        itertools::Either::Left(mode)
                    } else {
                        itertools::Either::Right(mode)
                    }
                });
            if !ideal_cache.contains_key(&group) {
                let dist = ideal_distribution(u, &group)?;
                ideal_cache.insert(group.clone(), dist);
            }
            let mut dist = ideal_cache[&group].clone();
            for &s in &singles {
                dist = place_one(u, s, &dist);
            }
            for (pattern, p) in dist {
                acc.entry(pattern).or_default().add(weight * p / subsets);
            }
        }
    }
    Ok(acc.into_iter().map(|(s, p)| (s, p.value())).collect())
}

fn place_one(u: &Unitary, input: usize, dist: &Distribution) -> Distribution {
    let mut out = Distribution::new();
    for (pattern, &p) in dist {
        for j in 0..u.dim() {
            let q = u.transition_probability(j, input);
            if q == 0.0 {
                continue;
            }
            let mut next = pattern.clone();
            next.add_photon(j);
            *out.entry(next).or_insert(0.0) += p * q;
        }
    }
    out
}

/// Total variation distance `sum |p - q| / 2` over the union of supports.
pub fn tvd(p: &Distribution, q: &Distribution) -> f64 {
    let mut acc = CompensatedSum::new();
    for (s, &a) in p {
        acc.add((a - q.get(s).copied().unwrap_or(0.0)).abs());
    }
    for (s, &b) in q {
        if !p.contains_key(s) {
            acc.add(b.abs());
        }
    }
    acc.value() / 2.0
}

/// Normalised histogram of observed patterns.
pub fn empirical<'a>(patterns: impl IntoIterator<Item = &'a FockPattern>) -> Distribution {
    let mut counts: BTreeMap<FockPattern, usize> = BTreeMap::new();
    let mut total = 0usize;
    for p in patterns {
        *counts.entry(p.clone()).or_insert(0) += 1;
        total += 1;
    }
    counts.into_iter().map(|(s, c)| (s, c as f64 / total as f64)).collect()
}

/// `H_ab = sum_{j < block} conj(U_ja) U_jb` over the listed input modes.
fn block_gram(u: &Unitary, inputs: &[usize], block: usize) -> ComplexMatrix {
    let a = u.matrix();
    let k = inputs.len();
    let mut h = ComplexMatrix::zeros(k, k);
    for (r, &ia) in inputs.iter().enumerate() {
        for (c, &ib) in inputs.iter().enumerate() {
            h[(r, c)] = (0..block).map(|j| a[(j, ia)].conj() * a[(j, ib)]).sum::<Complex64>();
        }
    }
    h
}

/// Exact probability that every photon from `input_modes` exits in the first
/// `block` modes, for pairwise overlap `x`.
///
/// Uses `Perm(H_G) prod_{i not in G} H_ii` summed over interfering subsets `G`,
/// where `H` is the Gram matrix of the input columns restricted to the block.
pub fn bunching_probability(u: &Unitary, input_modes: &[usize], block: usize, x: f64) -> Result<f64> {
    let m = u.dim();
    if block > m {
        return Err(Error::InvalidInput(format!("block size {block} exceeds {m} modes")));
    }
    let k = input_modes.len();
    if k > 30 {
        return Err(Error::Unsupported(format!(
            "{k} photons is too many for subset expansion"
        )));
    }
    let h = block_gram(u, input_modes, block);
    let mut acc = CompensatedSum::new();
    let mut rows = Vec::with_capacity(k);
    for mask in 0u32..(1 << k) {
        let size = mask.count_ones() as i32;
        let weight = x.powi(size) * (1.0 - x).powi(k as i32 - size);
        if weight == 0.0 {
            continue;
        }
        rows.clear();
        let mut classical = 1.0;
        for i in 0..k {
            if mask >> i & 1 == 1 {
                rows.push(i);
            } else {
                classical *= h[(i, i)].re;
            }
        }
        acc.add(weight * permanent(&h.select(&rows, &rows))?.re * classical);
    }
    Ok(acc.value())
}

/// Exact `TVD(D_ad, uniform)` over collision-free patterns, by enumeration.
pub fn dad_uniform_tvd(m: usize, n: usize, block: usize, alpha: f64) -> Result<f64> {
    if block < n || block > m {
        return Err(Error::InvalidInput(format!(
            "block size K = {block} outside [{n}, {m}]"
        )));
    }
    let total = binomial(m, n) as f64;
    let inner = binomial(block, n) as f64;
    let outer = total - inner;
    let mut acc = CompensatedSum::new();
    for modes in (0..m).combinations(n) {
        let p = if modes.iter().all(|&j| j < block) {
            alpha / inner
        } else {
            (1.0 - alpha) / outer
        };
        acc.add((p - 1.0 / total).abs());
    }
    Ok(acc.value() / 2.0)
}
