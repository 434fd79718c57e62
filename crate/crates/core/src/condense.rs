//! Condensed Nearest Neighbors prototype selection.
//!
//! The store starts with the first sample of each label in a seeded scan
//! order. Each pass walks the remaining samples in that order and adds every
//! sample the current store misclassifies under 1-NN (Euclidean, all
//! dimensions, ties to the lowest source index). Passes repeat until one adds
//! nothing, at which point the store classifies the whole source correctly.

use rand::seq::SliceRandom;

use crate::dichotomy::{DissimilaritySample, PairLabel};
use crate::error::{Error, Result};
use crate::rng::{self, tag};

#[derive(Debug, Clone, PartialEq)]
pub struct CondensedSet {
    samples: Vec<DissimilaritySample>,
    kept_indices: Vec<usize>,
}

impl CondensedSet {
    pub fn samples(&self) -> &[DissimilaritySample] {
        &self.samples
    }

    /// Indices into the source list, strictly increasing.
    pub fn kept_indices(&self) -> &[usize] {
        &self.kept_indices
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Wraps samples without condensing, e.g. to train on a full set.
    pub fn uncondensed(samples: Vec<DissimilaritySample>) -> Self {
        let kept_indices = (0..samples.len()).collect();
        CondensedSet { samples, kept_indices }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Label of the nearest store member; ties go to the lowest source index.
pub(crate) fn nearest_label(samples: &[DissimilaritySample], store: &[usize], query: &[f64]) -> PairLabel {
    let mut best = (f64::INFINITY, usize::MAX);
    for &i in store {
        let d = squared_distance(&samples[i].values, query);
        if d < best.0 || (d == best.0 && i < best.1) {
            best = (d, i);
        }
    }
    samples[best.1].label()
}

pub fn condense(samples: &[DissimilaritySample], seed: u64) -> Result<CondensedSet> {
    if samples.is_empty() {
        return Err(Error::Data("cannot condense an empty sample set".into()));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut rng::stream(seed, &[tag::CONDENSE]));

    let mut in_store = vec![false; samples.len()];
    let mut store = Vec::new();
    for label in [PairLabel::Positive, PairLabel::Negative] {
        if let Some(&i) = order.iter().find(|&&i| samples[i].label() == label) {
            in_store[i] = true;
            store.push(i);
        }
    }
    if store.len() < 2 {
        return Err(Error::Data("condensing needs both positive and negative samples".into()));
    }

    loop {
        let mut added = false;
        for &i in &order {
            if in_store[i] {
                continue;
            }
            if nearest_label(samples, &store, &samples[i].values) != samples[i].label() {
                in_store[i] = true;
                store.push(i);
                added = true;
            }
        }
        if !added {
            break;
        }
    }

    store.sort_unstable();
    Ok(CondensedSet { samples: store.iter().map(|&i| samples[i].clone()).collect(), kept_indices: store })
}
