use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monomer kind in the two-letter alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Monomer {
    /// Hydrophobic.
    A,
    /// Hydrophilic.
    B,
}

impl Monomer {
    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'A' => Some(Monomer::A),
            'B' => Some(Monomer::B),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Monomer::A => 'A',
            Monomer::B => 'B',
        }
    }
}

/// Non-bonded interaction coefficient between two monomer kinds.
///
/// `AA` attracts strongly, `BB` weakly, mixed pairs repel weakly.
#[inline]
pub fn interaction(si: Monomer, sj: Monomer) -> f64 {
    match (si, sj) {
        (Monomer::A, Monomer::A) => 1.0,
        (Monomer::B, Monomer::B) => 0.5,
        _ => -0.5,
    }
}

/// A chain of A/B monomers with a display label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequence {
    label: String,
    residues: Vec<Monomer>,
}

impl Sequence {
    pub fn new(label: impl Into<String>, residues: Vec<Monomer>) -> Result<Self> {
        if residues.len() < 3 {
            return Err(Error::SequenceTooShort(residues.len()));
        }
        Ok(Self { label: label.into(), residues })
    }

    /// Parses a string over `{A, B}`.
    pub fn parse(label: impl Into<String>, text: &str) -> Result<Self> {
        let residues = text
            .chars()
            .enumerate()
            .map(|(index, ch)| Monomer::from_char(ch).ok_or(Error::InvalidResidue { ch, index }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, residues)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn residues(&self) -> &[Monomer] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// Number of free angles, `2L - 5`.
    pub fn dimension(&self) -> usize {
        2 * self.residues.len() - 5
    }

    /// Copy of this sequence with the last `n` monomers removed.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        let keep = self.residues.len().saturating_sub(n);
        Self::new(self.label.clone(), self.residues[..keep].to_vec())
    }

    /// Dense row-major `L x L` table of interaction coefficients.
    pub(crate) fn coefficient_table(&self) -> Vec<f64> {
        let n = self.residues.len();
        let mut table = vec![0.0; n * n];
        for (i, &si) in self.residues.iter().enumerate() {
            for (j, &sj) in self.residues.iter().enumerate() {
                table[i * n + j] = interaction(si, sj);
            }
        }
        table
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.residues {
            write!(f, "{}", m.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Sequence::parse("", s)
    }
}

/// Maps one-letter amino-acid codes to A/B with the Kyte-Doolittle partition.
///
/// Returns the raw monomer list; the length check happens when a [`Sequence`]
/// is built from it.
pub fn kd_transform(raw: &str) -> Result<Vec<Monomer>> {
    raw.chars()
        .enumerate()
        .map(|(index, ch)| match ch {
            'I' | 'V' | 'P' | 'L' | 'C' | 'M' | 'A' | 'G' => Ok(Monomer::A),
            'D' | 'E' | 'H' | 'F' | 'K' | 'N' | 'Q' | 'R' | 'S' | 'T' | 'W' | 'Y' => Ok(Monomer::B),
            _ => Err(Error::InvalidResidue { ch, index }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(m: &[Monomer]) -> String {
        m.iter().map(|m| m.as_char()).collect()
    }

    #[test]
    fn kd_examples() {
        assert_eq!(ab(&kd_transform("GIDE").unwrap()), "AABB");
        assert_eq!(ab(&kd_transform("IVPLCMAG").unwrap()), "AAAAAAAA");
        assert_eq!(ab(&kd_transform("DEHFKNQRSTWY").unwrap()), "BBBBBBBBBBBB");
    }

    #[test]
    fn kd_single_residue_fails_only_at_sequence_construction() {
        let w = kd_transform("W").unwrap();
        assert_eq!(ab(&w), "B");
        assert!(matches!(Sequence::new("w", w), Err(Error::SequenceTooShort(1))));
    }

    #[test]
    fn kd_rejects_unknown_letter() {
        match kd_transform("GIXE") {
            Err(Error::InvalidResidue { ch, index }) => {
                assert_eq!(ch, 'X');
                assert_eq!(index, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn interaction_table() {
        use Monomer::*;
        assert_eq!(interaction(A, A), 1.0);
        assert_eq!(interaction(B, B), 0.5);
        assert_eq!(interaction(A, B), -0.5);
        assert_eq!(interaction(B, A), -0.5);
    }

    #[test]
    fn parse_and_dimension() {
        let s = Sequence::parse("1BXP", "ABBBBBBABBBAB").unwrap();
        assert_eq!(s.len(), 13);
        assert_eq!(s.dimension(), 21);
        assert_eq!(s.to_string(), "ABBBBBBABBBAB");
        assert!(Sequence::parse("x", "AB").is_err());
        assert!(matches!(
            Sequence::parse("x", "ABC"),
            Err(Error::InvalidResidue { ch: 'C', index: 2 })
        ));
    }
}
