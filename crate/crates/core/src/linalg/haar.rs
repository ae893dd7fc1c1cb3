use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, Unitary};
use crate::error::{Error, Result};
use crate::rng::{self, SimRng};

/// Haar-random `m x m` unitary from a fixed seed.
pub fn haar_random_unitary(m: usize, seed: u64) -> Result<Unitary> {
    haar_random_unitary_with(m, &mut rng::seeded(seed))
}

/// Haar-random unitary drawn from `rng`.
///
/// Gram-Schmidt on the columns of a complex Ginibre matrix (each column
/// projected twice). The implied `R` factor has a positive real diagonal, so
/// `Q` is already the phase-fixed, Haar-distributed factor.
pub fn haar_random_unitary_with(m: usize, rng: &mut SimRng) -> Result<Unitary> {
    if m == 0 {
        return Err(Error::InvalidDimension("unitary needs m >= 1".into()));
    }
    Unitary::new(haar_random_columns(m, m, rng)?)
}

/// First `k` columns of a Haar-random `m x m` unitary, as an `m x k` matrix.
pub fn haar_random_columns(m: usize, k: usize, rng: &mut SimRng) -> Result<ComplexMatrix> {
    if k > m {
        return Err(Error::InvalidDimension(format!(
            "cannot take {k} columns of a {m}-mode unitary"
        )));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..k)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();

    for c in 0..k {
        let (done, rest) = cols.split_at_mut(c);
        let v = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(q) {
                    *x -= proj * a;
                }
            }
        }
        let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm < f64::EPSILON {
            return Err(Error::InvalidInput("degenerate Ginibre draw".into()));
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
    }

    let mut matrix = ComplexMatrix::zeros(m, k);
    for (c, col) in cols.iter().enumerate() {
        for (j, &z) in col.iter().enumerate() {
            matrix[(j, c)] = z;
        }
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_deviation;

    #[test]
    fn unitary_to_tolerance() {
        for (m, seed) in [(1, 0), (4, 1), (17, 2), (64, 3)] {
            let u = haar_random_unitary(m, seed).unwrap();
            assert!(unitarity_deviation(u.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn columns_are_a_prefix_of_the_unitary() {
        let u = haar_random_unitary_with(6, &mut rng::seeded(5)).unwrap();
        let cols = haar_random_columns(6, 2, &mut rng::seeded(5)).unwrap();
        for j in 0..6 {
            for k in 0..2 {
                assert_eq!(cols[(j, k)], u.matrix()[(j, k)]);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = haar_random_unitary(5, 42).unwrap();
        let b = haar_random_unitary(5, 42).unwrap();
        let c = haar_random_unitary(5, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn second_moment_of_entry() {
        let mut rng = rng::seeded(9);
        let draws = 4000;
        let mean = (0..draws)
            .map(|_| {
                haar_random_unitary_with(4, &mut rng)
                    .unwrap()
                    .transition_probability(0, 0)
            })
            .sum::<f64>()
            / draws as f64;
        assert!((mean - 0.25).abs() < 0.01, "E|U_11|^2 = {mean}");
    }

    #[test]
    fn fourth_moment_of_entry() {
        // E|U_11|^4 = 2 / (m (m + 1)).
        let mut rng = rng::seeded(10);
        let draws = 20000;
        let mean = (0..draws)
            .map(|_| {
                haar_random_unitary_with(3, &mut rng)
                    .unwrap()
                    .transition_probability(0, 0)
                    .powi(2)
            })
            .sum::<f64>()
            / draws as f64;
        assert!((mean - 1.0 / 6.0).abs() < 0.006, "E|U_11|^4 = {mean}");
    }

    #[test]
    fn phase_of_diagonal_is_uniform() {
        // A Householder QR without phase fixing biases arg(U_11); Haar does not.
        let mut rng = rng::seeded(11);
        let draws = 4000;
        let mean: Complex64 = (0..draws)
            .map(|_| {
                let z = haar_random_unitary_with(3, &mut rng).unwrap().matrix()[(0, 0)];
                z / z.norm()
            })
            .sum::<Complex64>()
            / draws as f64;
        assert!(mean.norm() < 0.05, "mean phase {mean}");
    }
}
