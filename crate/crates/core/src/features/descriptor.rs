use std::fmt;
use std::str::FromStr;

/// 256-bit binary descriptor. Bit `b` lives in byte `b / 8` at position
/// `b % 8` (least significant first).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BinaryDescriptor([u64; 4]);

impl BinaryDescriptor {
    pub const BITS: usize = 256;
    pub const BYTES: usize = 32;

    pub const ZERO: Self = Self([0; 4]);
    pub const ONES: Self = Self([u64::MAX; 4]);

    pub fn from_words(words: [u64; 4]) -> Self {
        Self(words)
    }

    #[inline]
    pub fn words(&self) -> &[u64; 4] {
        &self.0
    }

    pub fn from_bytes(bytes: &[u8; 32]) -> Self {
        let mut words = [0u64; 4];
        for (w, chunk) in words.iter_mut().zip(bytes.chunks_exact(8)) {
            *w = u64::from_le_bytes(chunk.try_into().unwrap());
        }
        Self(words)
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for (chunk, w) in out.chunks_exact_mut(8).zip(self.0) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        out
    }

    #[inline]
    pub fn bit(&self, b: usize) -> bool {
        (self.0[b / 64] >> (b % 64)) & 1 == 1
    }

    #[inline]
    pub fn set_bit(&mut self, b: usize, value: bool) {
        let mask = 1u64 << (b % 64);
        if value {
            self.0[b / 64] |= mask;
        } else {
            self.0[b / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Number of differing bits.
#[inline]
pub fn hamming(a: &BinaryDescriptor, b: &BinaryDescriptor) -> u32 {
    (a.0[0] ^ b.0[0]).count_ones()
        + (a.0[1] ^ b.0[1]).count_ones()
        + (a.0[2] ^ b.0[2]).count_ones()
        + (a.0[3] ^ b.0[3]).count_ones()
}

impl fmt::Debug for BinaryDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryDescriptor({})", self.to_hex())
    }
}

impl fmt::Display for BinaryDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("descriptor hex must be 64 hex digits")]
pub struct ParseDescriptorError;

impl FromStr for BinaryDescriptor {
    type Err = ParseDescriptorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 64 || !s.is_ascii() {
            return Err(ParseDescriptorError);
        }
        let mut bytes = [0u8; 32];
        for (i, b) in bytes.iter_mut().enumerate() {
            *b = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).map_err(|_| ParseDescriptorError)?;
        }
        Ok(Self::from_bytes(&bytes))
    }
}
