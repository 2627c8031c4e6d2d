//! Physical-node layouts and the flat binary spin state.
//!
//! A layout groups `bits_per_node` consecutive bits per logical node. Node
//! `i`, bit `k` lives at flat index `i * bits_per_node + k`.
//!
//! * One-hot: `q` bits per node, value = index of the single hot bit.
//! * Binary vector: `ceil(log2 q)` bits per node, least-significant bit
//!   first, so bit `k` carries weight `2^k`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ColoringInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncodingKind {
    OneHot,
    BinaryVector,
}

/// Number of bits needed to represent `values` distinct values, `ceil(log2 values)`.
pub fn bits_for(values: usize) -> usize {
    if values <= 1 {
        0
    } else {
        (usize::BITS - (values - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingLayout {
    pub kind: EncodingKind,
    pub num_nodes: usize,
    /// Number of legal values per node (`q` colors or `N` tour positions).
    pub values: usize,
    pub bits_per_node: usize,
    pub total_bits: usize,
}

impl EncodingLayout {
    pub fn new(kind: EncodingKind, num_nodes: usize, values: usize) -> Self {
        let bits_per_node = match kind {
            EncodingKind::OneHot => values,
            EncodingKind::BinaryVector => bits_for(values),
        };
        EncodingLayout {
            kind,
            num_nodes,
            values,
            bits_per_node,
            total_bits: num_nodes * bits_per_node,
        }
    }

    pub fn one_hot(num_nodes: usize, values: usize) -> Self {
        Self::new(EncodingKind::OneHot, num_nodes, values)
    }

    pub fn binary(num_nodes: usize, values: usize) -> Self {
        Self::new(EncodingKind::BinaryVector, num_nodes, values)
    }

    #[inline]
    pub fn bit_index(&self, node: usize, k: usize) -> usize {
        node * self.bits_per_node + k
    }

    /// `(node, k)` of a flat bit index.
    #[inline]
    pub fn split(&self, bit: usize) -> (usize, usize) {
        (bit / self.bits_per_node, bit % self.bits_per_node)
    }

    /// Raw binary value of a node regardless of range (binary layouts only).
    pub fn raw_value(&self, state: &BitState, node: usize) -> usize {
        let base = node * self.bits_per_node;
        (0..self.bits_per_node).fold(0, |acc, k| acc | ((state.bits[base + k] as usize) << k))
    }

    fn check(&self, state: &BitState, node: usize) -> Result<()> {
        if state.len() != self.total_bits {
            return Err(Error::LengthMismatch {
                expected: self.total_bits,
                got: state.len(),
            });
        }
        if node >= self.num_nodes {
            return Err(Error::IndexOutOfRange {
                what: "node",
                index: node,
                limit: self.num_nodes,
            });
        }
        Ok(())
    }

    /// Decoded value of `node`; `None` marks an invalid assignment (binary
    /// value `>= values`, or zero / several hot bits in a one-hot group).
    pub fn decode(&self, state: &BitState, node: usize) -> Result<Option<usize>> {
        self.check(state, node)?;
        let base = node * self.bits_per_node;
        let group = &state.bits[base..base + self.bits_per_node];
        Ok(match self.kind {
            EncodingKind::BinaryVector => {
                let v = self.raw_value(state, node);
                (v < self.values).then_some(v)
            }
            EncodingKind::OneHot => {
                let mut hot = group.iter().enumerate().filter(|(_, &b)| b == 1);
                match (hot.next(), hot.next()) {
                    (Some((k, _)), None) => Some(k),
                    _ => None,
                }
            }
        })
    }

    pub fn decode_all(&self, state: &BitState) -> Result<Vec<Option<usize>>> {
        (0..self.num_nodes).map(|i| self.decode(state, i)).collect()
    }

    /// Writes `value` into the bits of `node`.
    pub fn encode(&self, state: &mut BitState, node: usize, value: usize) -> Result<()> {
        self.check(state, node)?;
        if value >= self.values {
            return Err(Error::InvalidParameter(format!(
                "value {value} out of range for {} values",
                self.values
            )));
        }
        let base = node * self.bits_per_node;
        for k in 0..self.bits_per_node {
            let bit = match self.kind {
                EncodingKind::BinaryVector => (value >> k) & 1,
                EncodingKind::OneHot => usize::from(k == value),
            };
            state.bits[base + k] = bit as u8;
        }
        Ok(())
    }

    /// Encodes a full assignment of values.
    pub fn encode_all(&self, values: &[usize]) -> Result<BitState> {
        if values.len() != self.num_nodes {
            return Err(Error::LengthMismatch {
                expected: self.num_nodes,
                got: values.len(),
            });
        }
        let mut state = BitState::zeros(self.total_bits);
        for (i, &v) in values.iter().enumerate() {
            self.encode(&mut state, i, v)?;
        }
        Ok(state)
    }
}

/// Flat binary spin state. Values are always 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitState {
    bits: Vec<u8>,
}

impl BitState {
    pub fn zeros(len: usize) -> Self {
        BitState { bits: vec![0; len] }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "bit {pos} has non-binary value {}",
                bits[pos]
            )));
        }
        Ok(BitState { bits })
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        BitState {
            bits: (0..len).map(|_| rng.random::<bool>() as u8).collect(),
        }
    }

    /// State whose bits are the low `len` bits of `word`, bit 0 first.
    pub fn from_word(word: u64, len: usize) -> Self {
        BitState {
            bits: (0..len).map(|k| ((word >> k) & 1) as u8).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits[i] == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value as u8;
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.bits[i] ^= 1;
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

/// Physical nodes (bits) a mapping needs for an instance: `N * q` for one-hot,
/// `N * ceil(log2 q)` for the binary vector encoding.
pub fn physical_node_count(instance: &ColoringInstance, kind: EncodingKind) -> usize {
    EncodingLayout::new(kind, instance.num_nodes(), instance.q).total_bits
}
