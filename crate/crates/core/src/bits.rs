//! Fixed-width bit vectors over circuit lines.
//!
//! Bit `i` of the packed word is the value on line `i`. The textual form
//! lists line 0 first, so `"110"` means line 0 = 1, line 1 = 1, line 2 = 0.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest number of lines a packed vector can hold.
pub const MAX_LINES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitsError {
    #[error("bit string contains non-binary character {0:?}")]
    BadDigit(char),
    #[error("bit vector width {0} exceeds the {MAX_LINES}-line limit")]
    TooWide(usize),
    #[error("value {value} does not fit in {width} bits")]
    ValueOutOfRange { value: u64, width: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    value: u64,
    width: usize,
}

impl BitVector {
    pub fn new(value: u64, width: usize) -> Result<Self, BitsError> {
        if width > MAX_LINES {
            return Err(BitsError::TooWide(width));
        }
        if value & !mask(width) != 0 {
            return Err(BitsError::ValueOutOfRange { value, width });
        }
        Ok(Self { value, width })
    }

    pub fn zeros(width: usize) -> Result<Self, BitsError> {
        Self::new(0, width)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, BitsError> {
        if bits.len() > MAX_LINES {
            return Err(BitsError::TooWide(bits.len()));
        }
        let value = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        Ok(Self {
            value,
            width: bits.len(),
        })
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, line: usize) -> bool {
        line < self.width && (self.value >> line) & 1 == 1
    }

    /// Returns a copy with `line` set to `bit`. Lines outside the width are ignored.
    pub fn with(mut self, line: usize, bit: bool) -> Self {
        if line < self.width {
            self.value = (self.value & !(1 << line)) | (u64::from(bit) << line);
        }
        self
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.width).map(|i| self.get(i)).collect()
    }
}

/// Mask with the low `width` bits set.
#[inline]
pub fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitsError::BadDigit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bits(&bits)
    }
}
