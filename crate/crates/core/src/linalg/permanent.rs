use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Permanent of a square complex matrix.
///
/// Glynn's formula with Gray-code ordering of the sign vectors, `O(n 2^n)`.
/// The empty matrix has permanent 1.
pub fn permanent(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "permanent needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let a = m.as_slice();
    Ok(match n {
        0 => Complex64::new(1.0, 0.0),
        1 => a[0],
        2 => a[0] * a[3] + a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] + a[5] * a[7]) + a[1] * (a[3] * a[8] + a[5] * a[6]) + a[2] * (a[3] * a[7] + a[4] * a[6])
        }
        _ => glynn(a, n),
    })
}

fn glynn(a: &[Complex64], n: usize) -> Complex64 {
    // Column sums sum_i delta_i a_ij, starting from delta = (+1, ..., +1).
    let mut sums = vec![Complex64::new(0.0, 0.0); n];
    for row in a.chunks_exact(n) {
        for (s, &x) in sums.iter_mut().zip(row) {
            *s += x;
        }
    }
    let mut delta = vec![true; n];
    let mut positive = true;
    let mut total = sums.iter().product::<Complex64>();

    // Row 0 keeps delta = +1; rows 1..n are flipped in Gray-code order.
    let steps: u64 = 1 << (n - 1);
    for k in 1..steps {
        let row = k.trailing_zeros() as usize + 1;
        let sign = if delta[row] { -2.0 } else { 2.0 };
        delta[row] = !delta[row];
        positive = !positive;
        for (s, &x) in sums.iter_mut().zip(&a[row * n..(row + 1) * n]) {
            *s += x * sign;
        }
        let prod = sums.iter().product::<Complex64>();
        if positive {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total / (steps as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[Vec<f64>]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn small_known_values() {
        assert_eq!(
            permanent(&ComplexMatrix::identity(3)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(permanent(&real(&vec![vec![1.0; 3]; 3])).unwrap().re, 6.0);
        assert_eq!(permanent(&real(&[vec![1.0, 2.0], vec![3.0, 4.0]])).unwrap().re, 10.0);
        assert_eq!(
            permanent(&ComplexMatrix::zeros(0, 0)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn glynn_path_on_identity_and_ones() {
        for n in 4..=8 {
            let p = permanent(&ComplexMatrix::identity(n)).unwrap();
            assert_eq!(p, Complex64::new(1.0, 0.0));
            let ones = permanent(&real(&vec![vec![1.0; n]; n])).unwrap();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert_eq!(ones.re, fact);
        }
    }

    #[test]
    fn four_by_four_integer_matrix() {
        // Brute-force sum over all 24 permutations.
        let m = real(&[
            vec![1.0, 2.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0, 0.0],
            vec![2.0, 0.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0, 2.0],
        ]);
        assert!((permanent(&m).unwrap().re - 16.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(permanent(&ComplexMatrix::zeros(2, 3)), Err(Error::Shape(_))));
    }
}
