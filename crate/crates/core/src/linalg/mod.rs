//! Dense complex matrices, unitaries, Fock patterns and ideal output
//! probabilities of a linear interferometer.
//!
//! Convention: `U[(j, k)]` is the amplitude for a photon entering mode `k`
//! to leave through mode `j`, i.e. the creation operator of input mode `k`
//! maps to `sum_j U[(j, k)] a_j^dag`. Modes are 0-based in code and 1-based in
//! file formats and CLI output.

mod haar;
mod permanent;

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub use haar::{haar_random_columns, haar_random_unitary, haar_random_unitary_with};
pub use permanent::permanent;

/// Dense row-major complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from nested rows of real numbers.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = rhs.row(k);
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Largest `|self - other|` entry.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Multiply row `i` by `c` in place.
    pub fn scale_row(&mut self, i: usize, c: Complex64) {
        let cols = self.cols;
        for z in &mut self.data[i * cols..(i + 1) * cols] {
            *z *= c;
        }
    }

    /// Select rows and columns by index lists (repeats allowed).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self[(r, c)]);
            }
        }
        Self {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// An `m x m` unitary, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    matrix: ComplexMatrix,
}

impl Unitary {
    /// Validate `matrix` against the default unitarity tolerance.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Tolerances::DEFAULT.unitarity)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "unitary must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if matrix.rows() == 0 {
            return Err(Error::InvalidDimension("unitary needs m >= 1".into()));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > tol {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension("unitary needs m >= 1".into()));
        }
        Ok(Self {
            matrix: ComplexMatrix::identity(m),
        })
    }

    /// Two-mode transformation with transmissivity angle `theta` and phase
    /// `phi`: `[[cos t, i e^{-i phi} sin t], [i e^{i phi} sin t, cos t]]`.
    ///
    /// `theta = pi/4, phi = 0` is the balanced beam splitter.
    pub fn beam_splitter(theta: f64, phi: f64) -> Self {
        let i = Complex64::new(0.0, 1.0);
        let (s, c) = theta.sin_cos();
        let data = vec![
            Complex64::new(c, 0.0),
            i * Complex64::from_polar(1.0, -phi) * s,
            i * Complex64::from_polar(1.0, phi) * s,
            Complex64::new(c, 0.0),
        ];
        Self {
            matrix: ComplexMatrix { rows: 2, cols: 2, data },
        }
    }

    /// `(1/sqrt 2) [[1, i], [i, 1]]` with bit-exact entries.
    pub fn balanced_beam_splitter() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let data = vec![
            Complex64::new(a, 0.0),
            Complex64::new(0.0, a),
            Complex64::new(0.0, a),
            Complex64::new(a, 0.0),
        ];
        Self {
            matrix: ComplexMatrix { rows: 2, cols: 2, data },
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `|U[(j, k)]|^2`: probability that a lone photon entering `k` exits at `j`.
    pub fn transition_probability(&self, j: usize, k: usize) -> f64 {
        self.matrix[(j, k)].norm_sqr()
    }

    /// Unchecked construction for products of validated unitaries.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(unitarity_deviation(&matrix) < 1e-8);
        Self { matrix }
    }
}

impl Mul for &Unitary {
    type Output = Unitary;

    fn mul(self, rhs: &Unitary) -> Unitary {
        let product = self.matrix.matmul(&rhs.matrix).expect("unitaries of equal dimension");
        Unitary::from_trusted(product)
    }
}

/// `max |U^dag U - I|` over all entries.
pub fn unitarity_deviation(matrix: &ComplexMatrix) -> f64 {
    let n = matrix.cols();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..matrix.rows() {
                acc += matrix[(r, a)].conj() * matrix[(r, b)];
            }
            if a == b {
                acc -= 1.0;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// Occupation numbers over `m` modes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockPattern(Vec<u16>);

impl FockPattern {
    pub fn new(occupations: Vec<u16>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(m: usize) -> Self {
        Self(vec![0; m])
    }

    /// `k` photons in modes `0..k` of `m`.
    pub fn canonical(m: usize, k: usize) -> Result<Self> {
        if k > m {
            return Err(Error::InvalidInput(format!(
                "cannot place {k} photons one per mode in {m} modes"
            )));
        }
        let mut occ = vec![0; m];
        occ[..k].fill(1);
        Ok(Self(occ))
    }

    /// Pattern holding one photon per listed mode (repeats stack).
    pub fn from_modes(m: usize, modes: &[usize]) -> Result<Self> {
        let mut occ = vec![0u16; m];
        for &j in modes {
            if j >= m {
                return Err(Error::InvalidInput(format!("mode {j} out of range 0..{m}")));
            }
            occ[j] += 1;
        }
        Ok(Self(occ))
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&s| usize::from(s)).sum()
    }

    pub fn occupations(&self) -> &[u16] {
        &self.0
    }

    pub fn is_collision_free(&self) -> bool {
        self.0.iter().all(|&s| s <= 1)
    }

    /// Mode index repeated once per photon, ascending.
    pub fn photon_modes(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total());
        for (j, &s) in self.0.iter().enumerate() {
            for _ in 0..s {
                out.push(j);
            }
        }
        out
    }

    /// Whether every photon sits in modes `0..k`.
    pub fn confined_to_first(&self, k: usize) -> bool {
        self.0[k.min(self.0.len())..].iter().all(|&s| s == 0)
    }

    /// Product of occupation factorials.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&s| factorial(usize::from(s))).product()
    }

    pub(crate) fn add_photon(&mut self, j: usize) {
        self.0[j] += 1;
    }
}

impl fmt::Debug for FockPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ">")
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Binomial coefficient as `u128`; saturates instead of overflowing.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `n x n` matrix `U_{T,S}`: `s_i` copies of row `i`, then `t_j` copies
/// of column `j`.
pub fn submatrix_for(u: &Unitary, input: &FockPattern, output: &FockPattern) -> Result<ComplexMatrix> {
    let m = u.dim();
    if input.modes() != m || output.modes() != m {
        return Err(Error::Shape(format!(
            "patterns must have {m} modes, got input {} and output {}",
            input.modes(),
            output.modes()
        )));
    }
    if input.total() != output.total() {
        return Err(Error::Shape(format!(
            "photon numbers differ: input {} vs output {}",
            input.total(),
            output.total()
        )));
    }
    Ok(u.matrix().select(&output.photon_modes(), &input.photon_modes()))
}

/// `|Perm(U_{T,S})|^2 / (prod s_i! prod t_j!)`.
pub fn ideal_probability(u: &Unitary, input: &FockPattern, output: &FockPattern) -> Result<f64> {
    let sub = submatrix_for(u, input, output)?;
    let amp = permanent(&sub)?;
    Ok(amp.norm_sqr() / (output.factorial_product() * input.factorial_product()))
}
