use crate::game::VertexId;

/// A set of vertex ids from a fixed universe `0..universe`, backed by a
/// bit vector.
///
/// All iteration is in ascending id order, which keeps every algorithm built
/// on top of this type deterministic.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexSet {
    blocks: Vec<u64>,
    universe: usize,
}

impl VertexSet {
    /// The empty set over `0..universe`.
    pub fn empty(universe: usize) -> Self {
        VertexSet {
            blocks: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    /// The full set `{0, 1, …, universe-1}`.
    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for block in set.blocks.iter_mut() {
            *block = u64::MAX;
        }
        set.clear_tail();
        set
    }

    /// Builds a set from arbitrary ids. Panics if an id is outside the
    /// universe.
    pub fn from_ids<I: IntoIterator<Item = VertexId>>(universe: usize, ids: I) -> Self {
        let mut set = Self::empty(universe);
        for id in ids {
            set.insert(id);
        }
        set
    }

    /// Size of the universe this set draws from (not the cardinality).
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, v: VertexId) {
        assert!(
            v < self.universe,
            "vertex {v} outside universe {}",
            self.universe
        );
        self.blocks[v / 64] |= 1u64 << (v % 64);
    }

    pub fn remove(&mut self, v: VertexId) {
        assert!(
            v < self.universe,
            "vertex {v} outside universe {}",
            self.universe
        );
        self.blocks[v / 64] &= !(1u64 << (v % 64));
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.universe && self.blocks[v / 64] & (1u64 << (v % 64)) != 0
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// In-place union.
    pub fn union_with(&mut self, other: &VertexSet) {
        self.check_same_universe(other);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    /// In-place intersection.
    pub fn intersect_with(&mut self, other: &VertexSet) {
        self.check_same_universe(other);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    /// In-place difference (`self \ other`).
    pub fn subtract(&mut self, other: &VertexSet) {
        self.check_same_universe(other);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.check_same_universe(other);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & b == 0)
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.check_same_universe(other);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & !b == 0)
    }

    /// Iterates the elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &block)| {
            let base = i * 64;
            BitIter { block }.map(move |bit| base + bit)
        })
    }

    fn clear_tail(&mut self) {
        let tail = self.universe % 64;
        if tail != 0
            && let Some(last) = self.blocks.last_mut()
        {
            *last &= (1u64 << tail) - 1;
        }
    }

    fn check_same_universe(&self, other: &VertexSet) {
        assert_eq!(
            self.universe, other.universe,
            "vertex sets from different universes"
        );
    }
}

struct BitIter {
    block: u64,
}

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.block == 0 {
            return None;
        }
        let bit = self.block.trailing_zeros() as usize;
        self.block &= self.block - 1;
        Some(bit)
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
