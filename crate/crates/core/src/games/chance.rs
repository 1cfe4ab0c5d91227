use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counter-based stream for chance event `event` of the game seeded with `seed`.
pub(crate) fn event_rng(seed: u64, event: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(event);
    rng
}

/// Event index of the opening shuffle/deal.
pub(crate) const DEAL: u64 = 0;
