//! External archive of validated solutions.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::classifier::FeatureMask;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub mask: FeatureMask,
    pub opt_fitness: f64,
    pub sel_fitness: f64,
    pub iteration_found: usize,
}

impl ArchiveEntry {
    /// Ascending Sel-fitness, then fewer features, then lexicographic bits.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.sel_fitness
            .total_cmp(&other.sel_fitness)
            .then(self.mask.cardinality().cmp(&other.mask.cardinality()))
            .then_with(|| self.mask.cmp(&other.mask))
    }
}

/// The `capacity` best distinct masks by Sel-fitness seen so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    capacity: usize,
    entries: Vec<ArchiveEntry>,
}

impl Archive {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "archive capacity must be at least 1");
        Archive { capacity, entries: Vec::with_capacity(capacity) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn head(&self) -> Option<&ArchiveEntry> {
        self.entries.first()
    }

    pub fn into_entries(self) -> Vec<ArchiveEntry> {
        self.entries
    }

    /// Groups `candidates` with the current entries, ranks, and keeps the
    /// best `capacity`. A mask already present keeps its original entry.
    pub fn merge(&mut self, candidates: impl IntoIterator<Item = ArchiveEntry>) {
        for c in candidates {
            if !self.entries.iter().any(|e| e.mask == c.mask) {
                self.entries.push(c);
            }
        }
        self.entries.sort_by(ArchiveEntry::rank_cmp);
        self.entries.truncate(self.capacity);
    }

    /// Checks ordering, uniqueness and capacity.
    pub fn is_consistent(&self) -> bool {
        self.entries.len() <= self.capacity
            && self.entries.windows(2).all(|w| w[0].rank_cmp(&w[1]) == Ordering::Less && w[0].mask != w[1].mask)
            && self.entries.iter().enumerate().all(|(i, e)| self.entries[i + 1..].iter().all(|f| f.mask != e.mask))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(bits: &[bool], sel: f64, it: usize) -> ArchiveEntry {
        ArchiveEntry {
            mask: FeatureMask::from_bits(bits.to_vec()),
            opt_fitness: 0.0,
            sel_fitness: sel,
            iteration_found: it,
        }
    }

    #[test]
    fn capacity_one_keeps_best() {
        let mut a = Archive::new(1);
        a.merge([entry(&[true, false], 0.3, 0), entry(&[false, true], 0.2, 0)]);
        assert_eq!(a.head().unwrap().sel_fitness, 0.2);
        a.merge([entry(&[true, true], 0.25, 1)]);
        assert_eq!(a.entries().len(), 1);
        assert_eq!(a.head().unwrap().mask.bits(), &[false, true]);
    }

    #[test]
    fn ties_prefer_fewer_features_then_bits() {
        let mut a = Archive::new(3);
        a.merge([entry(&[true, true], 0.1, 0), entry(&[true, false], 0.1, 0), entry(&[false, true], 0.1, 0)]);
        let order: Vec<_> = a.entries().iter().map(|e| e.mask.bits().to_vec()).collect();
        assert_eq!(order, vec![vec![false, true], vec![true, false], vec![true, true]]);
        assert!(a.is_consistent());
    }

    #[test]
    fn duplicates_keep_first_entry() {
        let mut a = Archive::new(4);
        a.merge([entry(&[true], 0.1, 0)]);
        a.merge([entry(&[true], 0.1, 5), entry(&[true], 0.1, 6)]);
        assert_eq!(a.entries().len(), 1);
        assert_eq!(a.head().unwrap().iteration_found, 0);
    }
}
