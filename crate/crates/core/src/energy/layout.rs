use serde::{Deserialize, Serialize};

use super::bitstring::Bitstring;
use crate::{Error, Result};

/// Partition of the `M` binary variables into one contiguous block per residue.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct BlockLayout {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl From<Vec<usize>> for BlockLayout {
    fn from(sizes: Vec<usize>) -> Self {
        Self::new(sizes)
    }
}

impl From<BlockLayout> for Vec<usize> {
    fn from(layout: BlockLayout) -> Self {
        layout.sizes
    }
}

/// Result of decoding a bitstring against a block layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    /// One rotamer index per residue.
    Valid(Vec<usize>),
    /// Blocks whose weight differs from one, with their weights.
    Invalid { violations: Vec<BlockViolation> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockViolation {
    pub block: usize,
    pub weight: usize,
}

impl Decoded {
    pub fn is_valid(&self) -> bool {
        matches!(self, Decoded::Valid(_))
    }

    pub fn configuration(&self) -> Option<&[usize]> {
        match self {
            Decoded::Valid(c) => Some(c),
            Decoded::Invalid { .. } => None,
        }
    }
}

impl BlockLayout {
    pub fn new(sizes: Vec<usize>) -> Self {
        let offsets = sizes
            .iter()
            .scan(0, |acc, &n| {
                let start = *acc;
                *acc += n;
                Some(start)
            })
            .collect();
        Self { sizes, offsets }
    }

    pub fn uniform(num_blocks: usize, size: usize) -> Self {
        Self::new(vec![size; num_blocks])
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, block: usize) -> usize {
        self.sizes[block]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn offset(&self, block: usize) -> usize {
        self.offsets[block]
    }

    /// Total number of variables `M`.
    pub fn dimension(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Block that owns variable `var`.
    pub fn block_of(&self, var: usize) -> usize {
        match self.offsets.binary_search(&var) {
            Ok(mut b) => {
                // Zero-sized blocks share an offset with their successor.
                while self.sizes[b] == 0 {
                    b += 1;
                }
                b
            }
            Err(b) => b - 1,
        }
    }

    /// `Some(n)` when every block has the same size.
    pub fn uniform_size(&self) -> Option<usize> {
        let first = *self.sizes.first()?;
        self.sizes.iter().all(|&s| s == first).then_some(first)
    }

    pub fn block_weights(&self, bits: &Bitstring) -> Vec<usize> {
        self.sizes
            .iter()
            .zip(&self.offsets)
            .map(|(&n, &off)| (off..off + n).filter(|&k| bits.get(k)).count())
            .collect()
    }

    pub fn is_valid(&self, bits: &Bitstring) -> bool {
        bits.len() == self.dimension()
            && self.sizes.iter().zip(&self.offsets).all(|(&n, &off)| {
                let mask = block_mask(off, n);
                (bits.as_u64() & mask).count_ones() == 1
            })
    }

    pub fn decode(&self, bits: &Bitstring) -> Result<Decoded> {
        if bits.len() != self.dimension() {
            return Err(Error::LengthMismatch {
                expected: self.dimension(),
                got: bits.len(),
            });
        }
        let mut config = Vec::with_capacity(self.num_blocks());
        let mut violations = Vec::new();
        for (block, (&n, &off)) in self.sizes.iter().zip(&self.offsets).enumerate() {
            let chunk = (bits.as_u64() & block_mask(off, n)) >> off;
            let weight = chunk.count_ones() as usize;
            if weight == 1 {
                config.push(chunk.trailing_zeros() as usize);
            } else {
                violations.push(BlockViolation { block, weight });
            }
        }
        Ok(if violations.is_empty() {
            Decoded::Valid(config)
        } else {
            Decoded::Invalid { violations }
        })
    }

    /// Check that `config` picks one in-range rotamer per block.
    pub fn check_configuration(&self, config: &[usize]) -> Result<()> {
        if config.len() != self.num_blocks() {
            return Err(Error::LengthMismatch {
                expected: self.num_blocks(),
                got: config.len(),
            });
        }
        for (block, &rot) in config.iter().enumerate() {
            if rot >= self.sizes[block] {
                return Err(Error::IndexOutOfRange(format!(
                    "rotamer {rot} of residue {block} (has {})",
                    self.sizes[block]
                )));
            }
        }
        Ok(())
    }

    /// Inverse of [`decode`](Self::decode) on valid configurations.
    pub fn encode(&self, config: &[usize]) -> Result<Bitstring> {
        self.check_configuration(config)?;
        let mut value = 0u64;
        for (block, &rot) in config.iter().enumerate() {
            value |= 1 << (self.offsets[block] + rot);
        }
        Bitstring::new(value, self.dimension())
    }
}

fn block_mask(offset: usize, size: usize) -> u64 {
    if size == 0 {
        0
    } else if size >= 64 {
        u64::MAX << offset
    } else {
        ((1u64 << size) - 1) << offset
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_follow_sizes() {
        let layout = BlockLayout::new(vec![2, 3, 1]);
        assert_eq!(layout.offsets(), &[0, 2, 5]);
        assert_eq!(layout.dimension(), 6);
        assert_eq!(layout.block_of(0), 0);
        assert_eq!(layout.block_of(2), 1);
        assert_eq!(layout.block_of(4), 1);
        assert_eq!(layout.block_of(5), 2);
        assert_eq!(layout.uniform_size(), None);
    }

    #[test]
    fn decode_valid_string() {
        let layout = BlockLayout::uniform(2, 2);
        let bits: Bitstring = "0110".parse().unwrap();
        assert_eq!(layout.decode(&bits).unwrap(), Decoded::Valid(vec![1, 0]));
    }

    #[test]
    fn decode_reports_offending_blocks() {
        let layout = BlockLayout::uniform(2, 2);
        let bits: Bitstring = "1100".parse().unwrap();
        let decoded = layout.decode(&bits).unwrap();
        assert_eq!(
            decoded,
            Decoded::Invalid {
                violations: vec![
                    BlockViolation { block: 0, weight: 2 },
                    BlockViolation { block: 1, weight: 0 }
                ]
            }
        );
        assert_eq!(layout.block_weights(&bits), vec![2, 0]);
    }

    #[test]
    fn decode_rejects_wrong_length() {
        let layout = BlockLayout::uniform(2, 2);
        let bits: Bitstring = "011".parse().unwrap();
        assert!(matches!(
            layout.decode(&bits),
            Err(Error::LengthMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn exactly_n_pow_n_valid_strings() {
        let layout = BlockLayout::uniform(2, 4);
        let valid = (0u64..256)
            .filter(|&v| layout.is_valid(&Bitstring::new(v, 8).unwrap()))
            .count();
        assert_eq!(valid, 16);
    }

    #[test]
    fn encode_inverts_decode() {
        let layout = BlockLayout::new(vec![3, 2, 4]);
        for a in 0..3 {
            for b in 0..2 {
                for c in 0..4 {
                    let bits = layout.encode(&[a, b, c]).unwrap();
                    assert_eq!(layout.decode(&bits).unwrap(), Decoded::Valid(vec![a, b, c]));
                }
            }
        }
        assert!(layout.encode(&[3, 0, 0]).is_err());
    }
}
