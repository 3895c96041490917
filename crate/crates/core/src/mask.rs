//! Binary feature masks: the search-space point shared by every optimizer.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

/// Fixed-length inclusion flags over a dataset's attributes.
///
/// Bit `i` is attribute column `i`. The textual form lists bit 0 first, so
/// `"0101"` selects columns 1 and 3. Ordering is lexicographic over that
/// textual form (`false < true`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureMask {
    bits: Vec<bool>,
}

impl FeatureMask {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            bits: vec![true; n],
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    /// Each bit set independently with probability 0.5, redrawn until at
    /// least one bit is set.
    pub fn random_nonempty<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1, "mask needs at least one attribute");
        loop {
            let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            if bits.iter().any(|&b| b) {
                return Self { bits };
            }
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn toggle(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when no attribute is selected.
    pub fn is_blank(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Indices of the selected attributes, ascending.
    pub fn selected(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn hamming(&self, other: &FeatureMask) -> usize {
        assert_eq!(self.len(), other.len(), "mask length mismatch");
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeatureMask({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid mask character {0:?}; expected '0' or '1'")]
pub struct ParseMaskError(pub char);

impl FromStr for FeatureMask {
    type Err = ParseMaskError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseMaskError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(FeatureMask::from_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn text_form_lists_bit_zero_first() {
        let m: FeatureMask = "0101".parse().unwrap();
        assert_eq!(m.selected(), vec![1, 3]);
        assert_eq!(m.to_string(), "0101");
        assert!("01x".parse::<FeatureMask>().is_err());
    }

    #[test]
    fn ordering_is_lexicographic() {
        let a: FeatureMask = "0011".parse().unwrap();
        let b: FeatureMask = "0100".parse().unwrap();
        assert!(a < b);
    }

    #[test]
    fn random_single_bit_is_forced_on() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            assert_eq!(FeatureMask::random_nonempty(1, &mut rng).to_string(), "1");
        }
    }

    #[test]
    fn hamming_counts_differences() {
        let a: FeatureMask = "110010".parse().unwrap();
        let b: FeatureMask = "011011".parse().unwrap();
        assert_eq!(a.hamming(&b), 3);
    }
}
