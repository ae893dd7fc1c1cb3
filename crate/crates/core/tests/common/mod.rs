//! Reference implementations used only by the tests. They share no code with
//! the library beyond its matrix type.
#![allow(dead_code)]

use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex64;
use pqf::linalg::{ComplexMatrix, Unitary};
use rand::Rng;

/// Sum over all `n!` permutations.
pub fn naive_permanent(a: &ComplexMatrix) -> Complex64 {
    let n = a.rows();
    assert_eq!(n, a.cols());
    (0..n)
        .permutations(n)
        .map(|p| p.iter().enumerate().map(|(r, &c)| a[(r, c)]).product::<Complex64>())
        .sum()
}

pub fn random_matrix<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..n * n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::new(n, n, data).unwrap()
}

/// Occupation vectors of `k` photons in `m` modes.
pub fn multisets(m: usize, k: usize) -> Vec<Vec<u16>> {
    if m == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in multisets(m - 1, k - first) {
            rest.insert(0, first as u16);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: u16) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

/// Output distribution of photons entering `inputs` whose internal states
/// have pairwise overlap `x`, from the double sum over permutations weighted
/// by the Gram matrix.
pub fn gram_distribution(u: &Unitary, inputs: &[usize], x: f64) -> BTreeMap<Vec<u16>, f64> {
    let m = u.dim();
    let n = inputs.len();
    let gram = |a: usize, b: usize| if a == b { 1.0 } else { x };
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    multisets(m, n)
        .into_iter()
        .map(|occ| {
            let outs: Vec<usize> = occ
                .iter()
                .enumerate()
                .flat_map(|(j, &s)| std::iter::repeat_n(j, s as usize))
                .collect();
            let a = |k: usize, i: usize| u.matrix()[(outs[k], inputs[i])];
            let mut total = 0.0;
            for s in &perms {
                for r in &perms {
                    let mut term = Complex64::new(1.0, 0.0);
                    for k in 0..n {
                        term *= a(k, s[k]) * a(k, r[k]).conj() * gram(s[k], r[k]);
                    }
                    total += term.re;
                }
            }
            let norm: f64 = occ.iter().map(|&s| factorial(s)).product();
            (occ, total / norm)
        })
        .collect()
}

/// Distribution of the photons in modes `0..n` given that `lost` of them were
/// lost, each subset of survivors being equally likely.
pub fn lossy_gram_distribution(u: &Unitary, n: usize, x: f64, lost: usize) -> BTreeMap<Vec<u16>, f64> {
    let subsets: Vec<Vec<usize>> = (0..n).combinations(n - lost).collect();
    let weight = 1.0 / subsets.len() as f64;
    let mut out = BTreeMap::new();
    for s in subsets {
        for (occ, p) in gram_distribution(u, &s, x) {
            *out.entry(occ).or_insert(0.0) += weight * p;
        }
    }
    out
}

pub fn tvd(p: &BTreeMap<Vec<u16>, f64>, q: &BTreeMap<Vec<u16>, f64>) -> f64 {
    let keys: std::collections::BTreeSet<_> = p.keys().chain(q.keys()).collect();
    keys.into_iter()
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
        / 2.0
}

/// Convert a library distribution to occupation-vector keys.
pub fn as_occupations(d: &pqf::samplers::oracle::Distribution) -> BTreeMap<Vec<u16>, f64> {
    d.iter().map(|(k, &v)| (k.occupations().to_vec(), v)).collect()
}
