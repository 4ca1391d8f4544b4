//! Bit-packed vectors and row reduction over GF(2).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Builds a vector from raw words, masking bits past `len`.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(len.div_ceil(64), 0);
        let mut v = Self { len, words };
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of `self AND other`.
    pub fn dot(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }
}

/// Row-reduced echelon form of an augmented system `rows · x = rhs`.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<BitVec>,
    pub rhs: Vec<bool>,
    /// Pivot column of each retained row.
    pub pivots: Vec<usize>,
    /// False if some zero row has a non-zero right-hand side.
    pub consistent: bool,
}

/// Gauss-Jordan elimination, choosing pivots in the given column order.
pub fn reduce(rows: &[BitVec], rhs: &[bool], column_order: &[usize]) -> Echelon {
    let mut rows = rows.to_vec();
    let mut rhs = rhs.to_vec();
    let mut pivots = Vec::new();
    let mut next = 0;
    for &col in column_order {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, found);
        rhs.swap(next, found);
        let (pivot_row, pivot_rhs) = (rows[next].clone(), rhs[next]);
        for r in 0..rows.len() {
            if r != next && rows[r].get(col) {
                rows[r].xor_assign(&pivot_row);
                rhs[r] ^= pivot_rhs;
            }
        }
        pivots.push(col);
        next += 1;
    }
    let consistent = rhs[next..].iter().all(|b| !b);
    rows.truncate(next);
    rhs.truncate(next);
    Echelon {
        rows,
        rhs,
        pivots,
        consistent,
    }
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns that are not pivots, in increasing order.
    pub fn free_columns(&self, width: usize) -> Vec<usize> {
        let mut is_pivot = vec![false; width];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..width).filter(|&c| !is_pivot[c]).collect()
    }

    /// The solution with every free variable set from `free_values`.
    pub fn solution(&self, width: usize, free: &[usize], free_values: &BitVec) -> BitVec {
        let mut x = BitVec::zeros(width);
        for (i, &c) in free.iter().enumerate() {
            x.set(c, free_values.get(i));
        }
        for (row, (&p, &b)) in self.rows.iter().zip(self.pivots.iter().zip(&self.rhs)) {
            // pivot value = rhs + sum over free columns in the row
            let mut v = b;
            for &c in free {
                if row.get(c) && x.get(c) {
                    v = !v;
                }
            }
            x.set(p, v);
        }
        x
    }

    /// Kernel vector with a single free column `c` set.
    pub fn kernel_vector(&self, width: usize, c: usize) -> BitVec {
        let mut x = BitVec::zeros(width);
        x.set(c, true);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if row.get(c) {
                x.set(p, true);
            }
        }
        x
    }
}
