//! Seeded fixtures shared by the benchmarks.

use fedcal_core::partition::split;
use fedcal_core::synthetic;
use fedcal_core::{Dataset, NaiveBayes, PartitionMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Fixture {
    pub model: NaiveBayes,
    pub global: Dataset,
    pub local: Vec<Dataset>,
}

/// `n` nodes with `m_v` mixed-type instances each, split i.i.d.
pub fn fixture(n: usize, m_v: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ds = synthetic::mixed(n * m_v, 4, 4, 3, &mut rng).expect("valid shape");
    let plan = split(PartitionMode::Iid, &ds, n, m_v, &mut rng).expect("enough data");
    Fixture {
        model: NaiveBayes::new(ds.schema().clone()),
        global: ds.subset(&plan.global_sample()),
        local: plan.local_datasets(&ds),
    }
}
