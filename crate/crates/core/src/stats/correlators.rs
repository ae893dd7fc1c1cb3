use serde::{Deserialize, Serialize};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::FockPattern;
use crate::numeric::CompensatedSum;
use crate::samplers::ClickRecord;

/// Index of the pair `(i, j)`, `i < j`, in the row-major upper triangle.
pub fn pair_index(i: usize, j: usize, m: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * (2 * m - i - 1) / 2 + (j - i - 1)
}

/// Number of interleaved subsamples used for the unbiased moment estimates.
pub const SPLITS: usize = 4;

/// Integer sums over the records of one subsample.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PartialSums {
    pub records: u64,
    /// `sum n_i` per mode; empty until the first record.
    pub singles: Vec<u64>,
    /// `sum n_i n_j` per pair `i < j`; empty until the first record.
    pub pairs: Vec<u64>,
}

impl PartialSums {
    fn ensure(&mut self, m: usize) {
        if self.singles.is_empty() {
            self.singles = vec![0; m];
            self.pairs = vec![0; m * m.saturating_sub(1) / 2];
        }
    }

    fn merge(&mut self, other: &PartialSums, m: usize) {
        if other.records == 0 {
            return;
        }
        self.ensure(m);
        self.records += other.records;
        for (a, b) in self.singles.iter_mut().zip(&other.singles) {
            *a += b;
        }
        for (a, b) in self.pairs.iter_mut().zip(&other.pairs) {
            *a += b;
        }
    }

    /// Unbiased covariances of all pairs; needs two or more records.
    fn covariances(&self, m: usize) -> Vec<f64> {
        let k = self.records as f64;
        let mut out = Vec::with_capacity(self.pairs.len());
        for i in 0..m {
            for j in i + 1..m {
                let p = self.pairs[pair_index(i, j, m)] as f64;
                out.push((p - self.singles[i] as f64 * self.singles[j] as f64 / k) / (k - 1.0));
            }
        }
        out
    }
}

/// Integer sufficient statistics of one loss sector for one unitary.
///
/// Records are dealt round-robin into [`SPLITS`] subsamples. Integer sums make
/// merging exact and independent of the order in which tallies are combined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorCounts {
    pub m: usize,
    /// Size of the mode block used by the bunching estimator.
    pub block: usize,
    pub records: u64,
    pub splits: Vec<PartialSums>,
    /// Records with every photon in modes `0..block`.
    pub bunched: u64,
    /// Records with at least one multiply occupied mode.
    pub collisions: u64,
}

impl SectorCounts {
    pub fn new(m: usize, block: usize) -> Self {
        Self {
            m,
            block,
            records: 0,
            splits: vec![PartialSums::default(); SPLITS],
            bunched: 0,
            collisions: 0,
        }
    }

    /// Add a record to the next subsample in turn.
    pub fn add(&mut self, pattern: &FockPattern) {
        self.add_to(pattern, (self.records % SPLITS as u64) as usize);
    }

    /// Add a record to subsample `split`.
    pub fn add_to(&mut self, pattern: &FockPattern, split: usize) {
        let occ = pattern.occupations();
        debug_assert_eq!(occ.len(), self.m);
        let split = &mut self.splits[split % SPLITS];
        self.records += 1;
        split.ensure(self.m);
        split.records += 1;
        let occupied: Vec<(usize, u64)> = occ
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0)
            .map(|(i, &s)| (i, u64::from(s)))
            .collect();
        for (a, &(i, si)) in occupied.iter().enumerate() {
            split.singles[i] += si;
            for &(j, sj) in &occupied[a + 1..] {
                split.pairs[pair_index(i, j, self.m)] += si * sj;
            }
        }
        if occupied.iter().all(|&(i, _)| i < self.block) {
            self.bunched += 1;
        }
        if occupied.iter().any(|&(_, s)| s > 1) {
            self.collisions += 1;
        }
    }

    pub fn merge(&mut self, other: &SectorCounts) {
        assert_eq!((self.m, self.block), (other.m, other.block));
        self.records += other.records;
        for (a, b) in self.splits.iter_mut().zip(&other.splits) {
            a.merge(b, self.m);
        }
        self.bunched += other.bunched;
        self.collisions += other.collisions;
    }

    /// Sums over all subsamples.
    pub fn totals(&self) -> PartialSums {
        let mut total = PartialSums::default();
        for s in &self.splits {
            total.merge(s, self.m);
        }
        total
    }

    /// Fraction of records confined to the block, `None` when empty.
    pub fn bunching_fraction(&self) -> Option<f64> {
        (self.records > 0).then(|| self.bunched as f64 / self.records as f64)
    }

    /// Unbiased covariances `C_ij = <n_i n_j> - <n_i><n_j>`.
    pub fn cdataset(&self, sector: usize) -> Result<CDataSet> {
        if self.records < 2 {
            return Err(Error::InsufficientData(format!(
                "sector {sector} has {} records, need 2",
                self.records
            )));
        }
        CDataSet::new(self.m, sector, self.totals().covariances(self.m))
    }

    /// Unbiased estimates of `mean_pairs C^k`, `k = 1, 2, 3`.
    ///
    /// Powers of a single estimate are biased by its sampling noise, so
    /// `C^2` and `C^3` are estimated from products of covariances of disjoint
    /// subsamples.
    pub fn raw_moments(&self, sector: usize) -> Result<[f64; 3]> {
        if let Some(s) = self.splits.iter().find(|s| s.records < 2) {
            return Err(Error::InsufficientData(format!(
                "sector {sector}: subsample with {} records, need 2",
                s.records
            )));
        }
        let first = self.cdataset(sector)?.raw_moments()[0];
        let parts: Vec<Vec<f64>> = self.splits.iter().map(|s| s.covariances(self.m)).collect();
        let pairs = parts[0].len();
        let mut acc = [CompensatedSum::new(); 2];
        for p in 0..pairs {
            let c: Vec<f64> = parts.iter().map(|v| v[p]).collect();
            let (mut second, mut third) = (0.0, 0.0);
            for (a, b) in (0..SPLITS).tuple_combinations() {
                second += c[a] * c[b];
            }
            for (a, b, d) in (0..SPLITS).tuple_combinations() {
                third += c[a] * c[b] * c[d];
            }
            acc[0].add(second);
            acc[1].add(third);
        }
        let n2 = (SPLITS * (SPLITS - 1) / 2) as f64;
        let n3 = (SPLITS * (SPLITS - 1) * (SPLITS - 2) / 6) as f64;
        let count = pairs as f64;
        Ok([first, acc[0].value() / (n2 * count), acc[1].value() / (n3 * count)])
    }
}

/// Two-mode correlators `C_ij` for all pairs `i < j` in one loss sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CDataSet {
    pub m: usize,
    pub sector: usize,
    pub values: Vec<f64>,
}

impl CDataSet {
    pub fn new(m: usize, sector: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != m * m.saturating_sub(1) / 2 {
            return Err(Error::Shape(format!(
                "{m} modes need {} correlators, got {}",
                m * m.saturating_sub(1) / 2,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite correlator {v}")));
        }
        Ok(Self { m, sector, values })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.values[pair_index(a, b, self.m)]
    }

    /// Raw moments `mean C^k` for `k = 1, 2, 3` over all pairs.
    pub fn raw_moments(&self) -> [f64; 3] {
        let count = self.values.len() as f64;
        let mut acc = [CompensatedSum::new(); 3];
        for &c in &self.values {
            acc[0].add(c);
            acc[1].add(c * c);
            acc[2].add(c * c * c);
        }
        acc.map(|s| s.value() / count)
    }
}

/// Correlators from the records of one sector.
pub fn compute_cdataset(records: &[ClickRecord], m: usize) -> Result<CDataSet> {
    let first = records
        .first()
        .ok_or_else(|| Error::InsufficientData("empty sector".into()))?;
    let mut counts = SectorCounts::new(m, m);
    for r in records {
        if r.lost != first.lost {
            return Err(Error::InvalidInput(format!(
                "records mix sectors {} and {}",
                first.lost, r.lost
            )));
        }
        if r.pattern.modes() != m {
            return Err(Error::Shape(format!(
                "pattern has {} modes, expected {m}",
                r.pattern.modes()
            )));
        }
        counts.add(&r.pattern);
    }
    counts.cdataset(first.lost)
}
