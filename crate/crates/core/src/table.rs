// SPDX-License-Identifier: Apache-2.0

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

/// Per-node storage defaulting to `T::default()`.
///
/// The dense form keeps an epoch stamp per slot so a reset is `O(1)`: a slot
/// whose stamp differs from the current epoch reads as the default. The sparse
/// form is used when the graph is too large to shadow densely.
#[derive(Debug, Clone)]
pub(crate) enum NodeTable<T> {
    Dense {
        values: Vec<T>,
        stamps: Vec<u32>,
        epoch: u32,
    },
    Sparse(BTreeMap<usize, T>),
}

impl<T: Copy + Default> NodeTable<T> {
    pub(crate) fn dense(n: usize) -> Self {
        NodeTable::Dense {
            values: vec![T::default(); n],
            stamps: vec![0; n],
            epoch: 1,
        }
    }

    pub(crate) fn sparse() -> Self {
        NodeTable::Sparse(BTreeMap::new())
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> T {
        match self {
            NodeTable::Dense {
                values,
                stamps,
                epoch,
            } => {
                if stamps[i] == *epoch {
                    values[i]
                } else {
                    T::default()
                }
            }
            NodeTable::Sparse(map) => map.get(&i).copied().unwrap_or_default(),
        }
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, v: T) {
        match self {
            NodeTable::Dense {
                values,
                stamps,
                epoch,
            } => {
                values[i] = v;
                stamps[i] = *epoch;
            }
            NodeTable::Sparse(map) => {
                map.insert(i, v);
            }
        }
    }

    pub(crate) fn clear(&mut self) {
        match self {
            NodeTable::Dense { stamps, epoch, .. } => {
                if *epoch == u32::MAX {
                    stamps.iter_mut().for_each(|s| *s = 0);
                    *epoch = 1;
                } else {
                    *epoch += 1;
                }
            }
            NodeTable::Sparse(map) => map.clear(),
        }
    }
}
