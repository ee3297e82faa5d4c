//! MT19937 engine with the inversion machinery that makes it attackable:
//! tempering can be undone, and a full state can be rebuilt from 624
//! consecutive outputs.

use crate::Seed32;

/// Number of 32-bit words in the generator state.
pub const STATE_WORDS: usize = 624;

const M: usize = 397;
const MATRIX_A: u32 = 0x9908_b0df;
const UPPER_MASK: u32 = 0x8000_0000;
const LOWER_MASK: u32 = 0x7fff_ffff;
const INIT_MULTIPLIER: u32 = 1_812_433_253;

/// Internal generator state: 624 words plus a cursor into the current block.
///
/// The cursor is in `[0, 624]`; `624` means the next draw will twist. Two
/// states built from the same seed produce identical output sequences.
#[derive(Clone, PartialEq, Eq)]
pub struct MtState {
    words: Vec<u32>,
    cursor: usize,
}

impl std::fmt::Debug for MtState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MtState")
            .field("cursor", &self.cursor)
            .field("words[0..4]", &&self.words[..4])
            .finish()
    }
}

impl MtState {
    /// Standard scalar initialization from a 32-bit seed.
    pub fn from_seed(seed: Seed32) -> Self {
        let mut state = MtState {
            words: vec![0u32; STATE_WORDS],
            cursor: STATE_WORDS,
        };
        state.reseed(seed);
        state
    }

    /// Reinitializes in place, without reallocating. Exhaustive seed scans
    /// keep one state per worker and reseed it for every candidate.
    pub fn reseed(&mut self, seed: Seed32) {
        let w = &mut self.words;
        w[0] = seed.value();
        for i in 1..STATE_WORDS {
            let prev = w[i - 1];
            w[i] = INIT_MULTIPLIER
                .wrapping_mul(prev ^ (prev >> 30))
                .wrapping_add(i as u32);
        }
        self.cursor = STATE_WORDS;
    }

    /// Rebuilds a state from exactly 624 consecutive outputs of a running
    /// generator. The returned state predicts every subsequent draw of the
    /// source exactly, regardless of where in its block the source was when
    /// the window was captured.
    pub fn from_outputs(outputs: &[u32; STATE_WORDS]) -> Self {
        let words = outputs.iter().map(|&z| untemper(z)).collect();
        MtState {
            words,
            cursor: STATE_WORDS,
        }
    }

    /// Draws the next tempered 32-bit output and advances the cursor.
    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        if self.cursor == STATE_WORDS {
            self.twist();
            self.cursor = 0;
        }
        let y = self.words[self.cursor];
        self.cursor += 1;
        temper(y)
    }

    /// Unbiased draw in `[0, n)` by rejection sampling: raw draws at or above
    /// `2^32 - (2^32 mod n)` are discarded, so every residue class keeps
    /// exactly `floor(2^32 / n)` accepted raw values.
    ///
    /// `n` must be in `[1, 2^32]`; `n = 2^32` degenerates to a raw draw.
    #[inline]
    pub fn next_in_range(&mut self, n: u64) -> u32 {
        RangeSampler::new(n).sample(self)
    }

    /// The flawed column selection: truncate one raw draw to a byte, then
    /// reduce modulo the column count `p` (`1 <= p <= 256`). Always consumes
    /// exactly one draw.
    #[inline]
    pub fn next_biased_column(&mut self, p: u32) -> u32 {
        biased_column_of(self.next_u32(), p)
    }

    /// Cursor position within the current block.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    fn twist(&mut self) {
        let w = &mut self.words;
        for i in 0..STATE_WORDS {
            let x = (w[i] & UPPER_MASK) | (w[(i + 1) % STATE_WORDS] & LOWER_MASK);
            let mut next = w[(i + M) % STATE_WORDS] ^ (x >> 1);
            if x & 1 != 0 {
                next ^= MATRIX_A;
            }
            w[i] = next;
        }
    }
}

/// Acceptance threshold for unbiased range reduction: the largest multiple
/// of `n` that fits in `2^32`.
#[inline]
pub fn rejection_threshold(n: u64) -> u64 {
    assert!(n >= 1 && n <= 1 << 32, "range size out of [1, 2^32]: {n}");
    (1u64 << 32) - ((1u64 << 32) % n)
}

/// Pure mapping behind [`MtState::next_biased_column`], exposed so the bias
/// analyzer can enumerate it over all byte values.
#[inline]
pub fn biased_column_of(raw: u32, p: u32) -> u32 {
    assert!(p >= 1 && p <= 256, "column count out of [1, 256]: {p}");
    (raw & 0xff) % p
}

/// The MT19937 output transform.
#[inline]
pub fn temper(x: u32) -> u32 {
    let mut y = x;
    y ^= y >> 11;
    y ^= (y << 7) & 0x9d2c_5680;
    y ^= (y << 15) & 0xefc6_0000;
    y ^= y >> 18;
    y
}

/// Exact inverse of [`temper`] for every 32-bit value.
#[inline]
pub fn untemper(z: u32) -> u32 {
    let mut y = z;
    y = invert_xor_shr(y, 18);
    y = invert_xor_shl_masked(y, 15, 0xefc6_0000);
    y = invert_xor_shl_masked(y, 7, 0x9d2c_5680);
    invert_xor_shr(y, 11)
}

/// Inverts `y = x ^ (x >> shift)` by recovering bits top-down.
#[inline]
fn invert_xor_shr(z: u32, shift: u32) -> u32 {
    let mut x = z;
    let mut done = shift;
    while done < 32 {
        x = z ^ (x >> shift);
        done += shift;
    }
    x
}

/// Inverts `y = x ^ ((x << shift) & mask)` by recovering bits bottom-up.
#[inline]
fn invert_xor_shl_masked(z: u32, shift: u32, mask: u32) -> u32 {
    let mut x = z;
    let mut done = shift;
    while done < 32 {
        x = z ^ ((x << shift) & mask);
        done += shift;
    }
    x
}
