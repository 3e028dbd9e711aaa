// SPDX-License-Identifier: Apache-2.0

//! Deterministic synthetic graphs.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, NodeSet};

/// Identifier of the random generator, recorded in run metadata.
pub const RNG_NAME: &str = "chacha8";

/// Stream used by the planted-partition generator.
pub const GENERATOR_STREAM: u64 = 0;

/// Seeded generator on a given stream.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
}

/// `rows × cols` grid with unit edges between axis neighbors. Node `(r, c)` has id `r·cols + c`.
pub fn grid(spec: GridSpec) -> Result<Graph> {
    let GridSpec { rows, cols } = spec;
    if rows == 0 || cols == 0 || rows.saturating_mul(cols) < 2 {
        return Err(Error::Parameter("grid needs at least two nodes"));
    }
    let mut b = GraphBuilder::new(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let id = r * cols + c;
            if c + 1 < cols {
                b.add_edge(id, id + 1, 1.0)?;
            }
            if r + 1 < rows {
                b.add_edge(id, id + cols, 1.0)?;
            }
        }
    }
    Ok(b.build())
}

/// Id of the center node of a grid.
pub fn grid_center(spec: GridSpec) -> usize {
    (spec.rows / 2) * spec.cols + spec.cols / 2
}

/// True when `node` lies on the outer boundary of the grid.
pub fn grid_is_boundary(spec: GridSpec, node: usize) -> bool {
    let (r, c) = (node / spec.cols, node % spec.cols);
    r == 0 || c == 0 || r + 1 == spec.rows || c + 1 == spec.cols
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedPartitionSpec {
    pub blocks: usize,
    pub block_size: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub rng_seed: u64,
}

/// Random block graph with unit weights. Node `i` belongs to block `i / block_size`.
///
/// Every pair is drawn once, in lexicographic order. Afterwards each block is
/// made internally connected: its within-block components are joined in order
/// of their smallest node, each to a uniformly chosen node of the part already
/// joined.
pub fn planted_partition(spec: PlantedPartitionSpec) -> Result<(Graph, Vec<NodeSet>)> {
    let PlantedPartitionSpec {
        blocks,
        block_size,
        p_in,
        p_out,
        rng_seed,
    } = spec;
    if blocks < 2 || block_size == 0 {
        return Err(Error::Parameter("need at least two nonempty blocks"));
    }
    let n = blocks
        .checked_mul(block_size)
        .ok_or(Error::Parameter("block count times block size overflows"))?;
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) {
        return Err(Error::Parameter("probabilities must lie in [0, 1]"));
    }
    if p_in < p_out {
        return Err(Error::Parameter("p_in must be at least p_out"));
    }
    let mut rng = rng(rng_seed, GENERATOR_STREAM);
    let mut b = GraphBuilder::new(n);
    let mut within: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in (u + 1)..n {
            let same = u / block_size == v / block_size;
            let p = if same { p_in } else { p_out };
            if rng.random::<f64>() < p {
                b.add_edge(u, v, 1.0)?;
                if same {
                    within[u].push(v);
                    within[v].push(u);
                }
            }
        }
    }

    for blk in 0..blocks {
        let first = blk * block_size;
        let members = first..first + block_size;
        let mut comp = vec![usize::MAX; block_size];
        let mut joined: Vec<usize> = Vec::new();
        for root in members.clone() {
            if comp[root - first] != usize::MAX {
                continue;
            }
            let mut nodes = vec![root];
            comp[root - first] = root;
            let mut k = 0;
            while k < nodes.len() {
                let u = nodes[k];
                for &v in &within[u] {
                    if comp[v - first] == usize::MAX {
                        comp[v - first] = root;
                        nodes.push(v);
                    }
                }
                k += 1;
            }
            if !joined.is_empty() {
                let a = nodes[rng.random_range(0..nodes.len())];
                let z = joined[rng.random_range(0..joined.len())];
                b.add_edge(a, z, 1.0)?;
            }
            joined.extend(nodes);
        }
    }

    let truth = (0..blocks)
        .map(|blk| NodeSet::new((blk * block_size..(blk + 1) * block_size).collect()))
        .collect();
    Ok((b.build(), truth))
}
