//! Counter-based random streams.
//!
//! Every trial owns a ChaCha8 key derived from `(master_seed, trial)`. Each
//! matrix role gets its own ChaCha stream id, and column `j` of a matrix
//! starts at a fixed word offset inside that stream. Column `j` therefore has
//! the same entries no matter how many other columns are drawn, in which
//! order, or on which thread.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ComplexMatrix;

/// Words reserved per column: 2^24 words = 2^22 complex entries, since each
/// entry consumes two u64 draws.
const COLUMN_STRIDE_BITS: u32 = 24;
pub const MAX_ROWS: usize = 1 << (COLUMN_STRIDE_BITS - 2);

/// Which random quantity a stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    /// Main (or estimated main) channel `H`.
    Main,
    /// Eavesdropper channel `G`.
    Wiretap,
    /// Estimation-error component `H_tilde`.
    EstimationError,
    /// Randomized user selection.
    Selection,
}

impl StreamRole {
    fn id(self) -> u64 {
        match self {
            StreamRole::Main => 0,
            StreamRole::Wiretap => 1,
            StreamRole::EstimationError => 2,
            StreamRole::Selection => 3,
        }
    }
}

/// Random streams of one Monte Carlo trial.
#[derive(Debug, Clone)]
pub struct TrialStreams {
    key: [u8; 32],
}

impl TrialStreams {
    pub fn new(master_seed: u64, trial: u64) -> Self {
        let w0 = splitmix64(master_seed);
        let w1 = splitmix64(trial ^ 0xD1B5_4A32_D192_ED03);
        let w2 = splitmix64(w0 ^ w1.rotate_left(29));
        let w3 = splitmix64(w2.wrapping_add(0x8CB9_2BA7_2F3D_8DD7));
        let mut key = [0u8; 32];
        for (chunk, w) in key.chunks_exact_mut(8).zip([w0, w1, w2, w3]) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        Self { key }
    }

    /// Fresh generator positioned at the start of the role's stream.
    pub fn rng(&self, role: StreamRole) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(role.id());
        rng
    }

    /// Column `col` of a `rows`-row CN(0, 1) matrix for `role`.
    pub fn column(&self, role: StreamRole, col: usize, rows: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(rows);
        self.fill_column(role, col, rows, &mut out);
        out
    }

    pub(crate) fn fill_column(
        &self,
        role: StreamRole,
        col: usize,
        rows: usize,
        out: &mut Vec<Complex64>,
    ) {
        assert!(rows <= MAX_ROWS, "at most {MAX_ROWS} rows per column");
        let mut rng = self.rng(role);
        rng.set_word_pos((col as u128) << COLUMN_STRIDE_BITS);
        out.clear();
        out.extend((0..rows).map(|_| complex_normal(&mut rng)));
    }

    /// `rows x cols` matrix of i.i.d. CN(0, 1) entries.
    pub fn matrix(&self, role: StreamRole, rows: usize, cols: usize) -> ComplexMatrix {
        let mut buf = Vec::with_capacity(rows);
        let columns: Vec<Vec<Complex64>> = (0..cols)
            .map(|j| {
                self.fill_column(role, j, rows, &mut buf);
                buf.clone()
            })
            .collect();
        ComplexMatrix::from_columns(&columns).expect("equal column lengths")
    }

    /// Only the listed columns, in the listed order. Equal to
    /// `self.matrix(role, rows, K).select_columns(indices)` for any `K`.
    pub fn columns(&self, role: StreamRole, rows: usize, indices: &[usize]) -> ComplexMatrix {
        let columns: Vec<Vec<Complex64>> = indices
            .iter()
            .map(|&j| self.column(role, j, rows))
            .collect();
        ComplexMatrix::from_columns(&columns).expect("equal column lengths")
    }

    /// Uniform random ordering prefix: the first `served` entries of a
    /// Fisher–Yates shuffle of `0..users`. The result for `served = k` is a
    /// prefix of the result for any larger `served`.
    pub fn shuffled_prefix(&self, users: usize, served: usize) -> Vec<usize> {
        let mut rng = self.rng(StreamRole::Selection);
        let mut idx: Vec<usize> = (0..users).collect();
        for i in 0..served.min(users) {
            let j = rng.random_range(i..users);
            idx.swap(i, j);
        }
        idx.truncate(served);
        idx
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// Box–Muller with a fixed two-draw budget per entry, so word offsets stay
// predictable. |z|^2 = -ln(u1) ~ Exp(1); re and im are each N(0, 1/2).
fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1 = unit_open_closed(rng.next_u64());
    let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let radius = (-u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    Complex64::new(radius * c, radius * s)
}

// Uniform on (0, 1].
fn unit_open_closed(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_matrix() {
        let a = TrialStreams::new(7, 3).matrix(StreamRole::Main, 10, 100);
        let b = TrialStreams::new(7, 3).matrix(StreamRole::Main, 10, 100);
        assert_eq!(a, b);
    }

    #[test]
    fn roles_and_trials_differ() {
        let s = TrialStreams::new(7, 3);
        let h = s.column(StreamRole::Main, 0, 4);
        assert_ne!(h, s.column(StreamRole::Wiretap, 0, 4));
        assert_ne!(h, TrialStreams::new(7, 4).column(StreamRole::Main, 0, 4));
        assert_ne!(h, TrialStreams::new(8, 3).column(StreamRole::Main, 0, 4));
    }

    #[test]
    fn column_subset_commutes_with_sampling() {
        let s = TrialStreams::new(11, 0);
        let full = s.matrix(StreamRole::Wiretap, 6, 40);
        let picked = [39, 2, 17];
        assert_eq!(
            s.columns(StreamRole::Wiretap, 6, &picked),
            full.select_columns(&picked)
        );
    }

    #[test]
    fn fewer_rows_is_a_row_prefix() {
        let s = TrialStreams::new(5, 9);
        let tall = s.column(StreamRole::Wiretap, 3, 30);
        let short = s.column(StreamRole::Wiretap, 3, 25);
        assert_eq!(&tall[..25], &short[..]);
    }

    #[test]
    fn shuffled_prefix_is_prefix_consistent() {
        let s = TrialStreams::new(1, 1);
        let long = s.shuffled_prefix(50, 20);
        let short = s.shuffled_prefix(50, 5);
        assert_eq!(&long[..5], &short[..]);
        let mut sorted = s.shuffled_prefix(50, 50);
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn open_interval_edges() {
        assert!(unit_open_closed(0) > 0.0);
        assert_eq!(unit_open_closed(u64::MAX), 1.0);
    }
}
