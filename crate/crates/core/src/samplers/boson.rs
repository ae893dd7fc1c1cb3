use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{apply_loss, collapse_internal, weighted_choice, ClickRecord, NoiseParams};
use crate::error::{Error, Result};
use crate::linalg::{permanent, FockPattern, Unitary};

fn check_inputs(m: usize, input_modes: &[usize]) -> Result<()> {
    if input_modes.len() > m {
        return Err(Error::InvalidInput(format!(
            "{} photons do not fit in {m} modes",
            input_modes.len()
        )));
    }
    let mut seen = vec![false; m];
    for &k in input_modes {
        if k >= m {
            return Err(Error::InvalidInput(format!("input mode {k} out of range 0..{m}")));
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::InvalidInput(format!("input mode {k} listed twice")));
        }
    }
    Ok(())
}

/// Exact sample of indistinguishable photons entering `input_modes`.
///
/// Chain-rule sampling over output modes: after shuffling the input columns,
/// the `k`-th output mode is drawn with weight equal to the squared permanent
/// of the `k x k` minor built from the previous picks plus the candidate row,
/// expanded along that row (Clifford & Clifford, algorithm B).
pub fn sample_ideal_output<R: Rng + ?Sized>(u: &Unitary, input_modes: &[usize], rng: &mut R) -> Result<FockPattern> {
    let m = u.dim();
    check_inputs(m, input_modes)?;
    let a = u.matrix();
    let mut cols = input_modes.to_vec();
    cols.shuffle(rng);

    let mut picked = Vec::with_capacity(cols.len());
    let mut weights = vec![0.0; m];
    let mut minor_cols = Vec::with_capacity(cols.len());
    for step in 0..cols.len() {
        let cofactors = (0..=step)
            .map(|skip| {
                minor_cols.clear();
                minor_cols.extend(
                    cols[..=step]
                        .iter()
                        .enumerate()
                        .filter(|&(l, _)| l != skip)
                        .map(|(_, &c)| c),
                );
                permanent(&a.select(&picked, &minor_cols))
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, w) in weights.iter_mut().enumerate() {
            let amp: Complex64 = cols[..=step].iter().zip(&cofactors).map(|(&c, &p)| a[(i, c)] * p).sum();
            *w = amp.norm_sqr();
        }
        picked.push(weighted_choice(&weights, rng)?);
    }
    FockPattern::from_modes(m, &picked)
}

/// Photons in modes `0..n` with loss and partial distinguishability.
pub fn sample_noisy_output<R: Rng + ?Sized>(
    u: &Unitary,
    n: usize,
    noise: NoiseParams,
    rng: &mut R,
) -> Result<ClickRecord> {
    let m = u.dim();
    if n > m {
        return Err(Error::InvalidInput(format!("{n} photons do not fit in {m} modes")));
    }
    let survivors = apply_loss(n, noise.lambda(), rng);
    let part = collapse_internal(&survivors, noise.x(), rng);
    let mut out = sample_ideal_output(u, &part.interfering, rng)?;
    place_classically(u, &part.singletons, &mut out, rng)?;
    ClickRecord::new(0, out, n)
}

/// Fully distinguishable photons in modes `0..n`, no loss.
pub fn sample_distinguishable<R: Rng + ?Sized>(u: &Unitary, n: usize, rng: &mut R) -> Result<FockPattern> {
    let m = u.dim();
    if n > m {
        return Err(Error::InvalidInput(format!("{n} photons do not fit in {m} modes")));
    }
    let mut out = FockPattern::vacuum(m);
    let inputs: Vec<usize> = (0..n).collect();
    place_classically(u, &inputs, &mut out, rng)?;
    Ok(out)
}

fn place_classically<R: Rng + ?Sized>(u: &Unitary, inputs: &[usize], out: &mut FockPattern, rng: &mut R) -> Result<()> {
    let mut weights = vec![0.0; u.dim()];
    for &k in inputs {
        for (j, w) in weights.iter_mut().enumerate() {
            *w = u.transition_probability(j, k);
        }
        out.add_photon(weighted_choice(&weights, rng)?);
    }
    Ok(())
}
