//! Longest common subsequences: quadratic DP, a linear-space certificate
//! search and a bit-parallel length computation.

use crate::word::Symbol;

/// LCS length by the textbook recurrence, keeping two rows.
pub fn lcs_length_dp(a: &[Symbol], b: &[Symbol]) -> usize {
    let (a, b) = if b.len() > a.len() { (b, a) } else { (a, b) };
    let mut prev = vec![0u32; b.len() + 1];
    let mut cur = vec![0u32; b.len() + 1];
    for &x in a {
        for (j, &y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()] as usize
}

/// Row `LCS(a, b[..j])` for every `j`.
fn forward_row(a: &[Symbol], b: &[Symbol]) -> Vec<u32> {
    let mut prev = vec![0u32; b.len() + 1];
    let mut cur = vec![0u32; b.len() + 1];
    for &x in a {
        for (j, &y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev
}

/// Row `LCS(a, b[j..])` for every `j`.
fn backward_row(a: &[Symbol], b: &[Symbol]) -> Vec<u32> {
    let n = b.len();
    let mut prev = vec![0u32; n + 1];
    let mut cur = vec![0u32; n + 1];
    for &x in a.iter().rev() {
        for j in (0..n).rev() {
            cur[j] = if x == b[j] {
                prev[j + 1] + 1
            } else {
                prev[j].max(cur[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev
}

/// Sub-problems with at most this many table cells are solved with a full table.
const TABLE_CELLS: usize = 1 << 20;

/// Index pairs of one optimal common subsequence, in increasing order.
///
/// Linear space: the first word is halved, the split point of the second word
/// is the leftmost column maximizing forward plus backward scores, and small
/// sub-problems fall back to a full suffix table walked greedily from the left.
/// The output is a deterministic function of the inputs.
pub fn lcs_pairs(a: &[Symbol], b: &[Symbol]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    hirschberg(a, 0, b, 0, &mut out);
    out
}

fn hirschberg(a: &[Symbol], a_off: usize, b: &[Symbol], b_off: usize, out: &mut Vec<(usize, usize)>) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    if a.len() == 1 || (a.len() + 1) * (b.len() + 1) <= TABLE_CELLS {
        table_pairs(a, a_off, b, b_off, out);
        return;
    }
    let mid = a.len() / 2;
    let fwd = forward_row(&a[..mid], b);
    let bwd = backward_row(&a[mid..], b);
    let split = (0..=b.len())
        .max_by(|&x, &y| (fwd[x] + bwd[x]).cmp(&(fwd[y] + bwd[y])).then(y.cmp(&x)))
        .expect("non-empty range");
    hirschberg(&a[..mid], a_off, &b[..split], b_off, out);
    hirschberg(&a[mid..], a_off + mid, &b[split..], b_off + split, out);
}

fn table_pairs(a: &[Symbol], a_off: usize, b: &[Symbol], b_off: usize, out: &mut Vec<(usize, usize)>) {
    let (la, lb) = (a.len(), b.len());
    let width = lb + 1;
    // suffix[i * width + j] = LCS(a[i..], b[j..])
    let mut suffix = vec![0u32; (la + 1) * width];
    for i in (0..la).rev() {
        let (row, below) = suffix[i * width..(i + 2) * width].split_at_mut(width);
        let x = a[i];
        for j in (0..lb).rev() {
            row[j] = if x == b[j] { below[j + 1] + 1 } else { below[j].max(row[j + 1]) };
        }
    }
    let (mut i, mut j) = (0, 0);
    while i < la && j < lb {
        if a[i] == b[j] {
            out.push((a_off + i, b_off + j));
            i += 1;
            j += 1;
        } else if suffix[(i + 1) * width + j] >= suffix[i * width + j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
}

/// Bit-parallel LCS against a fixed first word (Allison–Dix / Hyyrö row
/// update, 64 columns per machine word).
///
/// After feeding `b[..j]`, the number of zero bits among the low `i` bits of
/// the state equals `LCS(a[..i], b[..j])`.
pub struct BitParallelLcs {
    len: usize,
    words: usize,
    /// `masks[s * words + k]`: bit `r` of word `k` set when `a[64 k + r] == s`.
    masks: Vec<u64>,
    alphabet: usize,
}

impl BitParallelLcs {
    pub fn new(a: &[Symbol]) -> Self {
        let words = a.len().div_ceil(64).max(1);
        let alphabet = a.iter().copied().max().map_or(1, |m| m as usize + 1);
        let mut masks = vec![0u64; alphabet * words];
        for (i, &s) in a.iter().enumerate() {
            masks[s as usize * words + i / 64] |= 1u64 << (i % 64);
        }
        BitParallelLcs {
            len: a.len(),
            words,
            masks,
            alphabet,
        }
    }

    /// Feeds `b` letter by letter; `visit(j, state)` is called after the first
    /// `j` letters for every `j` in `1..=b.len()`.
    pub fn scan(&self, b: &[Symbol], mut visit: impl FnMut(usize, &[u64])) {
        let mut v = vec![u64::MAX; self.words];
        let zero = vec![0u64; self.words];
        for (j, &s) in b.iter().enumerate() {
            let m = if (s as usize) < self.alphabet {
                &self.masks[s as usize * self.words..(s as usize + 1) * self.words]
            } else {
                &zero[..]
            };
            let mut carry = 0u64;
            for k in 0..self.words {
                let vk = v[k];
                let u = vk & m[k];
                let (sum, c1) = vk.overflowing_add(u);
                let (sum, c2) = sum.overflowing_add(carry);
                carry = (c1 | c2) as u64;
                v[k] = sum | (vk & !m[k]);
            }
            visit(j + 1, &v);
        }
    }

    /// Zeros among the low `i` bits of a state.
    pub fn prefix_lcs(state: &[u64], i: usize) -> usize {
        let full = i / 64;
        let mut ones: usize = state[..full].iter().map(|w| w.count_ones() as usize).sum();
        let rem = i % 64;
        if rem > 0 {
            ones += (state[full] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        i - ones
    }

    pub fn lcs(&self, b: &[Symbol]) -> usize {
        let mut last = 0;
        let len = self.len;
        self.scan(b, |j, v| {
            if j == b.len() {
                last = Self::prefix_lcs(v, len);
            }
        });
        last
    }
}

pub fn lcs_length_bitparallel(a: &[Symbol], b: &[Symbol]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    BitParallelLcs::new(a).lcs(b)
}
