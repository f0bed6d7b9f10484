use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

pub const MAX_BITS: usize = 64;

/// A computational-basis bitstring of up to 64 variables.
///
/// Bit `k` of the packed value is variable (qubit) `k`. The text form lists
/// variable 0 first, so `"0110"` has bits 1 and 2 set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    value: u64,
    len: u8,
}

impl Bitstring {
    pub fn new(value: u64, len: usize) -> Result<Self> {
        if len > MAX_BITS {
            return Err(Error::TooManyQubits(len, MAX_BITS));
        }
        if len < MAX_BITS && value >> len != 0 {
            return Err(Error::IndexOutOfRange(format!(
                "value {value:#x} has bits beyond length {len}"
            )));
        }
        Ok(Self {
            value,
            len: len as u8,
        })
    }

    /// Caller guarantees `len <= 64` and no bits at or above `len`.
    pub(crate) fn from_raw(value: u64, len: usize) -> Self {
        debug_assert!(len <= MAX_BITS);
        Self {
            value,
            len: len as u8,
        }
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let value = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &b)| acc | (u64::from(b) << k));
        Self::new(value, bits.len())
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_u64(&self) -> u64 {
        self.value
    }

    pub fn get(&self, k: usize) -> bool {
        debug_assert!(k < self.len());
        (self.value >> k) & 1 == 1
    }

    pub fn with_bit(self, k: usize, on: bool) -> Self {
        debug_assert!(k < self.len());
        let value = if on {
            self.value | (1 << k)
        } else {
            self.value & !(1 << k)
        };
        Self { value, ..self }
    }

    pub fn flipped(self, k: usize) -> Self {
        debug_assert!(k < self.len());
        Self {
            value: self.value ^ (1 << k),
            ..self
        }
    }

    pub fn hamming_weight(&self) -> usize {
        self.value.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|k| self.get(k))
    }

    pub fn to_bits(&self) -> Vec<bool> {
        self.iter().collect()
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("bad bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
