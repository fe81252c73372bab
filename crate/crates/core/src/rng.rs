//! Counter-based random numbers: draw j of record i is a stateless mix
//! of (seed, record index, draw counter), so streams never overlap, any
//! record can be regenerated in isolation, and chunked parallel
//! generation gives the same output as a sequential run.

use rand::RngCore;

#[inline]
fn mix64(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { key: mix64(seed) }
    }

    /// The draw stream for one record index.
    pub fn stream(&self, record: u64) -> RecordStream {
        RecordStream {
            key: mix64(self.key ^ mix64(record)),
            counter: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RecordStream {
    key: u64,
    counter: u64,
}

impl RecordStream {
    #[inline]
    pub fn next_raw(&mut self) -> u64 {
        let v = mix64(self.key ^ mix64(self.counter));
        self.counter += 1;
        v
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_raw() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }
}

impl RngCore for RecordStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_raw() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.next_raw()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = self.next_raw().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
