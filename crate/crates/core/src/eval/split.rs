use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Train and test row indices, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for a given run and retry attempt, derived from the master seed.
pub fn derive_seed(master: u64, run: u64, attempt: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ run) ^ attempt.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

fn train_count(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
}

/// Random split of `labels` into train and test rows.
///
/// Stratified: every class is split separately, `round(fraction · n_c)` of its
/// rows going to training (at least one row on each side). Otherwise the
/// whole set is shuffled and cut once.
pub fn split_indices(labels: &[i8], fraction: f64, stratify: bool, seed: u64) -> Result<SplitIndices> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train fraction must lie strictly between 0 and 1, got {fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    if stratify {
        let mut classes: Vec<i8> = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        for class in classes {
            let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            if members.len() < 2 {
                return Err(Error::InvalidInput(format!(
                    "class {class} has {} member(s); a split needs at least 2",
                    members.len()
                )));
            }
            members.shuffle(&mut rng);
            let k = train_count(members.len(), fraction);
            train.extend_from_slice(&members[..k]);
            test.extend_from_slice(&members[k..]);
        }
    } else {
        if labels.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a split needs at least 2 rows, got {}",
                labels.len()
            )));
        }
        let mut all: Vec<usize> = (0..labels.len()).collect();
        all.shuffle(&mut rng);
        let k = train_count(all.len(), fraction);
        train.extend_from_slice(&all[..k]);
        test.extend_from_slice(&all[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test })
}
