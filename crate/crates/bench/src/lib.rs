//! Seeded inputs shared by the benchmarks in `benches/`.

use opmod_core::{sample, z_from_bounded, AlgebraDescriptor, ModuleDescriptor, RegularOp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Operators on a module of rank `rank` over a single `d x d` block.
pub struct Fixture {
    pub desc: ModuleDescriptor,
    pub general: RegularOp,
    pub normal: RegularOp,
    pub positive: RegularOp,
}

pub fn fixture(rank: usize, d: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let algebra = AlgebraDescriptor::new(vec![d]).expect("block size is positive");
    let desc = ModuleDescriptor::new(algebra, rank).expect("rank is positive");
    Fixture {
        general: z_from_bounded(&sample::operator(&mut rng, &desc, &desc, 1.0)),
        normal: z_from_bounded(&sample::normal(&mut rng, &desc)),
        positive: z_from_bounded(&sample::positive(&mut rng, &desc, 0.1)),
        desc,
    }
}
