// SPDX-License-Identifier: Apache-2.0

use alloc::vec;
use alloc::vec::Vec;

/// Sparse vector over node ids, stored as `(id, value)` pairs sorted by id.
/// Absent entries are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

/// A candidate solution: values in `[0, 1]`, the source and sink implicit.
pub type Solution = SparseVector;

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from arbitrary pairs. Later duplicates overwrite earlier ones;
    /// explicit zeros are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Self {
        let mut entries: Vec<(usize, f64)> = pairs.into_iter().collect();
        entries.reverse();
        entries.sort_by_key(|&(i, _)| i);
        entries.dedup_by_key(|&mut (i, _)| i);
        entries.retain(|&(_, v)| v != 0.0);
        Self { entries }
    }

    pub fn from_dense(values: &[f64]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v != 0.0)
                .map(|(i, &v)| (i, v))
                .collect(),
        }
    }

    /// Indicator vector of `ids`.
    pub fn indicator<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        Self::from_pairs(ids.into_iter().map(|i| (i, 1.0)))
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn get(&self, id: usize) -> f64 {
        match self.entries.binary_search_by_key(&id, |&(i, _)| i) {
            Ok(k) => self.entries[k].1,
            Err(_) => 0.0,
        }
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// Ids of strictly positive entries.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().filter(|&&(_, v)| v > 0.0).map(|&(i, _)| i)
    }

    pub fn max_id(&self) -> Option<usize> {
        self.entries.last().map(|&(i, _)| i)
    }

    /// `max_i |a_i − b_i|` over the union of supports.
    pub fn max_abs_diff(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut p, mut q) = (0, 0);
        let mut worst: f64 = 0.0;
        while p < a.len() || q < b.len() {
            let diff = match (a.get(p), b.get(q)) {
                (Some(&(i, x)), Some(&(j, y))) => match i.cmp(&j) {
                    core::cmp::Ordering::Equal => {
                        p += 1;
                        q += 1;
                        x - y
                    }
                    core::cmp::Ordering::Less => {
                        p += 1;
                        x
                    }
                    core::cmp::Ordering::Greater => {
                        q += 1;
                        y
                    }
                },
                (Some(&(_, x)), None) => {
                    p += 1;
                    x
                }
                (None, Some(&(_, y))) => {
                    q += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            worst = worst.max(libm::fabs(diff));
        }
        worst
    }
}

impl FromIterator<(usize, f64)> for SparseVector {
    fn from_iter<T: IntoIterator<Item = (usize, f64)>>(iter: T) -> Self {
        Self::from_pairs(iter)
    }
}
