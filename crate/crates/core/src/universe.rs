//! The data universe and, for graph data, the indexing of unordered vertex
//! pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite data universe `X`.
///
/// Graph universes carry a vertex count `V` and index the `V(V-1)/2`
/// unordered pairs `{i, j}`, `i < j`, in row-major upper-triangular order.
/// Self-loops are not part of the universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Universe {
    size: usize,
    vertex_count: Option<usize>,
}

impl Universe {
    /// A plain universe of `size` items.
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Validation("universe must be nonempty".into()));
        }
        Ok(Self { size, vertex_count: None })
    }

    /// The universe of unordered pairs over `vertex_count` vertices.
    pub fn graph(vertex_count: usize) -> Result<Self> {
        if vertex_count < 2 {
            return Err(Error::Validation(format!(
                "a graph universe needs at least 2 vertices, got {vertex_count}"
            )));
        }
        Ok(Self {
            size: vertex_count * (vertex_count - 1) / 2,
            vertex_count: Some(vertex_count),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vertex_count(&self) -> Option<usize> {
        self.vertex_count
    }

    pub fn is_graph(&self) -> bool {
        self.vertex_count.is_some()
    }

    /// Vertex count, or a domain-mismatch error for non-graph universes.
    pub fn require_graph(&self) -> Result<usize> {
        self.vertex_count
            .ok_or_else(|| Error::DomainMismatch("operation requires a graph universe".into()))
    }

    /// Index of the unordered pair `{i, j}`. Order of the arguments does not matter.
    pub fn pair_index(&self, i: usize, j: usize) -> Result<usize> {
        let v = self.require_graph()?;
        if i == j {
            return Err(Error::Validation(format!("self-loop {{{i}, {i}}} is not in the universe")));
        }
        if i >= v || j >= v {
            return Err(Error::Validation(format!(
                "vertex out of range: {{{i}, {j}}} with |V| = {v}"
            )));
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Ok(row_start(v, a) + (b - a - 1))
    }

    /// The pair `(i, j)`, `i < j`, stored at universe index `e`.
    pub fn pair_of(&self, e: usize) -> Result<(usize, usize)> {
        let v = self.require_graph()?;
        if e >= self.size {
            return Err(Error::Validation(format!(
                "universe index {e} out of range [0, {})",
                self.size
            )));
        }
        // largest row a with row_start(a) <= e
        let (mut lo, mut hi) = (0usize, v - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if row_start(v, mid) <= e {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo, lo + 1 + (e - row_start(v, lo))))
    }

    /// Iterates `(index, i, j)` over all pairs in index order.
    /// Empty for non-graph universes.
    pub fn pairs(&self) -> Pairs {
        Pairs { v: self.vertex_count.unwrap_or(0), i: 0, j: 1, e: 0 }
    }
}

fn row_start(v: usize, a: usize) -> usize {
    a * (2 * v - a - 1) / 2
}

/// Iterator over the unordered vertex pairs of a graph universe.
#[derive(Debug, Clone)]
pub struct Pairs {
    v: usize,
    i: usize,
    j: usize,
    e: usize,
}

impl Iterator for Pairs {
    type Item = (usize, usize, usize);

    fn next(&mut self) -> Option<Self::Item> {
        if self.v < 2 || self.i >= self.v - 1 {
            return None;
        }
        let item = (self.e, self.i, self.j);
        self.e += 1;
        self.j += 1;
        if self.j == self.v {
            self.i += 1;
            self.j = self.i + 1;
        }
        Some(item)
    }
}
