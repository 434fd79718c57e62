use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Binary selection over the dissimilarity dimensions.
///
/// Masks order lexicographically by bit (dimension 0 first, unselected before
/// selected). The hex form packs four dimensions per digit, most significant
/// bit first, zero-padded at the end.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureMask {
    bits: Vec<bool>,
    cardinality: usize,
}

impl FeatureMask {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let cardinality = bits.iter().filter(|&&b| b).count();
        FeatureMask { bits, cardinality }
    }

    pub fn all(dim: usize) -> Self {
        FeatureMask::from_bits(vec![true; dim])
    }

    pub fn none(dim: usize) -> Self {
        FeatureMask::from_bits(vec![false; dim])
    }

    /// Mask selecting exactly `indices`.
    pub fn from_indices(dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = vec![false; dim];
        for i in indices {
            bits[i] = true;
        }
        FeatureMask::from_bits(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn is_selected(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.bits[i] != value {
            self.bits[i] = value;
            if value {
                self.cardinality += 1;
            } else {
                self.cardinality -= 1;
            }
        }
    }

    /// Gathers the selected entries of `values`.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        self.selected().map(|i| values[i]).collect()
    }

    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(4)
            .map(|nibble| {
                let v = nibble.iter().enumerate().fold(0u32, |acc, (k, &b)| acc | (u32::from(b) << (3 - k)));
                char::from_digit(v, 16).expect("nibble < 16")
            })
            .collect()
    }

    pub fn from_hex(hex: &str, dim: usize) -> Result<Self> {
        if hex.len() != dim.div_ceil(4) {
            return Err(Error::Schema(format!(
                "mask hex has {} digits, {} expected for {dim} dimensions",
                hex.len(),
                dim.div_ceil(4)
            )));
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let v = c.to_digit(16).ok_or_else(|| Error::Schema(format!("invalid hex digit {c:?} in mask")))?;
            bits.extend((0..4).map(|k| v & (1 << (3 - k)) != 0));
        }
        if bits[dim..].iter().any(|&b| b) {
            return Err(Error::Schema("mask hex has bits set past its dimension".into()));
        }
        bits.truncate(dim);
        Ok(FeatureMask::from_bits(bits))
    }
}

impl fmt::Debug for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeatureMask({}/{} {})", self.cardinality, self.dim(), self.to_hex())
    }
}

#[derive(Serialize, Deserialize)]
struct MaskRepr {
    dim: usize,
    hex: String,
}

impl Serialize for FeatureMask {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MaskRepr { dim: self.dim(), hex: self.to_hex() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FeatureMask {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MaskRepr::deserialize(d)?;
        FeatureMask::from_hex(&repr.hex, repr.dim).map_err(serde::de::Error::custom)
    }
}
