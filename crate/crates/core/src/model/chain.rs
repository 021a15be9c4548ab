use std::fmt::Write as _;

use super::conformation::Conformation;
use super::energy::{bend_term, combine, pair_term, positions_into, EnergyModel, Point};
use super::sequence::Sequence;
use crate::error::{Error, Result};

/// A conformation together with its positions and per-term energy caches.
///
/// `bend[i]` holds `1 - cos(theta_{i+1})`; `pairs` is a flat upper-triangular
/// table of `d^-12 - c d^-6` for every monomer pair `(i, j)` with `j >= i + 2`.
/// The cached `energy` is kept up to date incrementally by local moves.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub(crate) angles: Vec<f64>,
    pub(crate) positions: Vec<Point>,
    pub(crate) bend: Vec<f64>,
    pub(crate) pairs: Vec<f64>,
    pub(crate) energy: f64,
}

/// Offset of row `i` in the flat pair table of a chain with `n` monomers.
#[inline]
pub(crate) fn row_offset(n: usize, i: usize) -> usize {
    i * (n - 2) - i * i.saturating_sub(1) / 2
}

/// Flat index of pair `(i, j)`, `j >= i + 2`.
#[inline]
pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(j >= i + 2 && j < n);
    row_offset(n, i) + (j - i - 2)
}

/// Number of entries in the pair table.
pub(crate) fn pair_count(n: usize) -> usize {
    (n - 1) * (n - 2) / 2
}

impl Chain {
    pub fn new(model: &EnergyModel, conf: &Conformation) -> Result<Self> {
        if conf.length() != model.length() {
            return Err(Error::Dimension { expected: model.dimension(), actual: conf.dimension() });
        }
        Ok(Self::from_angles(model, conf.angles().to_vec()))
    }

    pub fn from_sequence(seq: &Sequence, conf: &Conformation) -> Result<Self> {
        Self::new(&EnergyModel::new(seq), conf)
    }

    pub(crate) fn from_angles(model: &EnergyModel, angles: Vec<f64>) -> Self {
        let n = model.length();
        let mut positions = Vec::with_capacity(n);
        positions_into(n, &angles, &mut positions);
        let mut chain = Self {
            angles,
            positions,
            bend: vec![0.0; n - 2],
            pairs: vec![0.0; pair_count(n)],
            energy: 0.0,
        };
        chain.rebuild_caches(model);
        chain
    }

    /// Recomputes every cache entry and the total energy from the current
    /// angles and positions.
    pub fn rebuild_caches(&mut self, model: &EnergyModel) {
        let n = self.positions.len();
        for (b, &t) in self.bend.iter_mut().zip(&self.angles[..n - 2]) {
            *b = bend_term(t);
        }
        for i in 0..n - 2 {
            for j in i + 2..n {
                let d2 = (self.positions[j] - self.positions[i]).norm_squared();
                self.pairs[pair_index(n, i, j)] = pair_term(d2, model.coeff(i, j));
            }
        }
        self.energy = self.cache_sum();
    }

    /// Total energy obtained by summing the caches.
    pub fn cache_sum(&self) -> f64 {
        combine(self.bend.iter().sum(), self.pairs.iter().sum())
    }

    pub fn length(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Cached raw energy.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn bend_cache(&self) -> &[f64] {
        &self.bend
    }

    /// Pair-term cache entry for monomers `i < j` (0-based, `j >= i + 2`).
    pub fn pair_cache(&self, i: usize, j: usize) -> f64 {
        self.pairs[pair_index(self.length(), i, j)]
    }

    pub fn conformation(&self) -> Conformation {
        Conformation::new(self.length(), self.angles.clone())
            .expect("chain angles are kept in range")
    }

    /// Text dump of both caches, one entry per line, for diffing.
    pub fn dump_caches(&self) -> String {
        let n = self.length();
        let mut out = String::new();
        for (i, b) in self.bend.iter().enumerate() {
            let _ = writeln!(out, "E1 {} {:.17e}", i + 1, b);
        }
        for i in 0..n - 2 {
            for j in i + 2..n {
                let _ = writeln!(out, "E2 {} {} {:.17e}", i + 1, j + 1, self.pair_cache(i, j));
            }
        }
        out
    }
}
