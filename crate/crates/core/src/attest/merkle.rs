//! Binary SHA-256 Merkle tree. An odd node at the end of a level is paired
//! with itself.

use rayon::prelude::*;

use crate::hash::Digest;

const PAR_THRESHOLD: usize = 4096;

#[inline]
pub fn node_hash(left: &Digest, right: &Digest) -> Digest {
    Digest::of_parts(&[left.as_bytes(), right.as_bytes()])
}

/// Path length for a tree over `m` leaves: `ceil(log2 m)`, zero for one leaf.
pub fn depth(m: u64) -> usize {
    if m <= 1 {
        0
    } else {
        (64 - (m - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone)]
pub struct MerkleTree {
    levels: Vec<Vec<Digest>>,
}

impl MerkleTree {
    /// Panics on an empty leaf set.
    pub fn commit(leaves: Vec<Digest>) -> Self {
        assert!(!leaves.is_empty(), "merkle tree needs at least one leaf");
        let mut levels = vec![leaves];
        while levels.last().unwrap().len() > 1 {
            let cur = levels.last().unwrap();
            let pair = |c: &[Digest]| node_hash(&c[0], c.get(1).unwrap_or(&c[0]));
            let next: Vec<Digest> = if cur.len() >= PAR_THRESHOLD {
                cur.par_chunks(2).map(pair).collect()
            } else {
                cur.chunks(2).map(pair).collect()
            };
            levels.push(next);
        }
        MerkleTree { levels }
    }

    pub fn root(&self) -> Digest {
        self.levels.last().unwrap()[0]
    }

    pub fn len(&self) -> usize {
        self.levels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn leaf(&self, index: usize) -> Digest {
        self.levels[0][index]
    }

    /// Sibling hashes from the leaf level upward.
    pub fn path(&self, index: usize) -> Vec<Digest> {
        let mut idx = index;
        let mut out = Vec::with_capacity(self.levels.len() - 1);
        for level in &self.levels[..self.levels.len() - 1] {
            let sib = idx ^ 1;
            out.push(*level.get(sib).unwrap_or(&level[idx]));
            idx >>= 1;
        }
        out
    }
}

/// Checks `path` links `leaf` at `index` to `root` in a tree of `m` leaves.
/// A self-paired tail node must carry its own hash as sibling.
pub fn verify_path(root: &Digest, m: u64, index: u64, leaf: &Digest, path: &[Digest]) -> bool {
    if index >= m || path.len() != depth(m) {
        return false;
    }
    let mut idx = index;
    let mut width = m;
    let mut h = *leaf;
    for sib in path {
        h = if idx.is_multiple_of(2) {
            if idx + 1 >= width && sib != &h {
                return false;
            }
            node_hash(&h, sib)
        } else {
            node_hash(sib, &h)
        };
        idx >>= 1;
        width = width.div_ceil(2);
    }
    &h == root
}
