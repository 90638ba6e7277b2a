//! Seeded source of update events.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One update event: an absolute time and a pick inside the eligible set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    /// Index into the eligible set the caller passed to
    /// [`EventStream::next_event`], in `0..eligible`.
    pub pick: usize,
}

/// Deterministic stream of `(time, pick)` pairs.
///
/// With `eligible = k`, the gap to the next event is exponential with rate
/// `k` and the pick is uniform on `0..k`. When every one of `n` sites stays
/// eligible this makes each site's event times a rate-one Poisson process,
/// and thinning keeps that law when the caller narrows eligibility between
/// events. Event times are strictly increasing.
#[derive(Debug, Clone)]
pub struct EventStream {
    rng: ChaCha8Rng,
    now: f64,
}

impl EventStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            now: 0.0,
        }
    }

    /// Current absolute time: the time of the last event delivered.
    pub fn now(&self) -> f64 {
        self.now
    }

    /// Advance to the next event among `eligible` candidates, or `None` when
    /// nothing is eligible.
    pub fn next_event(&mut self, eligible: usize) -> Option<Event> {
        if eligible == 0 {
            return None;
        }
        let u: f64 = self.rng.random();
        let gap = -(1.0 - u).ln() / eligible as f64;
        let mut time = self.now + gap;
        if time <= self.now {
            // A zero-sized gap (u rounded to 0, or a gap below resolution at
            // large times) would break strict monotonicity; nudge one ulp.
            time = f64_next_up(self.now);
        }
        self.now = time;
        let pick = self.rng.random_range(0..eligible);
        Some(Event { time, pick })
    }
}

fn f64_next_up(x: f64) -> f64 {
    // Only called for finite, non-negative x.
    f64::from_bits(x.to_bits() + 1)
}

/// Deterministically derive an independent stream seed from a master seed,
/// so replicas (and nested uses inside one replica) never share randomness.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
