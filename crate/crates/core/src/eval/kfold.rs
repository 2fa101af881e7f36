use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Label};
use crate::{Error, Result};

/// Row indices of one train/test split, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// `k` stratified folds. Each class is shuffled on its own and dealt
/// round-robin, so per-fold class counts differ by at most one.
pub fn stratified_kfold(data: &Dataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::invalid("cross-validation needs at least 2 folds"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; data.n_rows()];
    for class in Label::ALL {
        let mut rows: Vec<usize> = (0..data.n_rows()).filter(|&i| data.label(i) == class).collect();
        if rows.len() < k {
            return Err(Error::invalid(format!(
                "class {class} has {} rows, fewer than {k} folds",
                rows.len()
            )));
        }
        rows.shuffle(&mut rng);
        for (pos, row) in rows.into_iter().enumerate() {
            fold_of[row] = pos % k;
        }
    }
    Ok((0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..data.n_rows()).partition(|&i| fold_of[i] == f);
            Fold { train, test }
        })
        .collect())
}
