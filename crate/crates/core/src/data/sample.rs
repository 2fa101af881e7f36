use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Label};
use crate::{Error, Result};

/// Deterministic subsample of `n` rows, returned in original order.
///
/// Stratified mode splits the quota per class proportionally (largest
/// remainder), so each class count is within one row of exact proportion.
pub fn subsample(data: &Dataset, n: usize, stratified: bool, seed: u64) -> Result<Dataset> {
    let total = data.n_rows();
    if n > total {
        return Err(Error::invalid(format!(
            "cannot subsample {n} rows from {total}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = if !stratified {
        index::sample(&mut rng, total, n).into_vec()
    } else {
        let by_class: Vec<Vec<usize>> = Label::ALL
            .iter()
            .map(|&c| (0..total).filter(|&i| data.label(i) == c).collect())
            .collect();
        let quotas = proportional_quotas(n, [by_class[0].len(), by_class[1].len()]);
        by_class
            .iter()
            .zip(quotas)
            .flat_map(|(rows, q)| {
                index::sample(&mut rng, rows.len(), q)
                    .into_iter()
                    .map(|j| rows[j])
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    picked.sort_unstable();
    Ok(data.select(&picked))
}

fn proportional_quotas(n: usize, counts: [usize; 2]) -> [usize; 2] {
    let total = counts[0] + counts[1];
    if total == 0 {
        return [0, 0];
    }
    let exact = counts.map(|c| n as f64 * c as f64 / total as f64);
    let mut q = exact.map(|e| e.floor() as usize);
    let short = n - q[0] - q[1];
    if short > 0 {
        // at most one row goes to the class with the larger remainder
        let frac = [exact[0] - q[0] as f64, exact[1] - q[1] as f64];
        let k = if frac[1] > frac[0] { 1 } else { 0 };
        q[k] += short;
    }
    [q[0].min(counts[0]), q[1].min(counts[1])]
}
