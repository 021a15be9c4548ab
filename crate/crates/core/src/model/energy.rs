use nalgebra::Vector3;

use super::conformation::Conformation;
use super::sequence::Sequence;
use crate::error::{Error, Result};

pub type Point = Vector3<f64>;

/// Squared distance below which two monomers are treated as coincident.
pub(crate) const CLASH_DIST2: f64 = 1e-24;

/// Unit bond vector for a bond-angle / torsion pair.
#[inline]
pub(crate) fn bond_direction(theta: f64, beta: f64) -> Point {
    let (st, ct) = theta.sin_cos();
    let (sb, cb) = beta.sin_cos();
    Point::new(ct * cb, st * cb, sb)
}

/// Writes the chain positions for a flat angle vector into `out`.
pub(crate) fn positions_into(length: usize, angles: &[f64], out: &mut Vec<Point>) {
    out.clear();
    let theta = &angles[..length - 2];
    let beta = &angles[length - 2..];
    out.push(Point::zeros());
    out.push(Point::new(0.0, 1.0, 0.0));
    let (s1, c1) = theta[0].sin_cos();
    out.push(Point::new(c1, 1.0 + s1, 0.0));
    for i in 3..length {
        let prev = out[i - 1];
        out.push(prev + bond_direction(theta[i - 2], beta[i - 3]));
    }
}

/// Maps angles to Cartesian positions with unit bonds.
///
/// The first monomer sits at the origin, the second at `(0, 1, 0)` and the
/// third in the `z = 0` plane.
pub fn compute_positions(conf: &Conformation) -> Vec<Point> {
    let mut out = Vec::with_capacity(conf.length());
    positions_into(conf.length(), conf.angles(), &mut out);
    out
}

/// Bending term for a single bond angle, `1 - cos(theta)`.
#[inline]
pub(crate) fn bend_term(theta: f64) -> f64 {
    1.0 - theta.cos()
}

/// Lennard-Jones style pair term `d^-12 - c d^-6` from a squared distance.
#[inline]
pub(crate) fn pair_term(dist2: f64, coeff: f64) -> f64 {
    if dist2 < CLASH_DIST2 {
        return f64::INFINITY;
    }
    let inv6 = (1.0 / dist2).powi(3);
    inv6 * inv6 - coeff * inv6
}

/// Combines the raw bend and pair sums into the model energy.
#[inline]
pub(crate) fn combine(bend_sum: f64, pair_sum: f64) -> f64 {
    0.25 * bend_sum + 4.0 * pair_sum
}

/// Reusable energy evaluator for one sequence.
///
/// Holds the interaction table and a scratch position buffer so repeated
/// evaluations do not allocate.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    length: usize,
    coeff: Vec<f64>,
    scratch: Vec<Point>,
}

impl EnergyModel {
    pub fn new(seq: &Sequence) -> Self {
        Self {
            length: seq.len(),
            coeff: seq.coefficient_table(),
            scratch: Vec::with_capacity(seq.len()),
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        2 * self.length - 5
    }

    #[inline]
    pub(crate) fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeff[i * self.length + j]
    }

    /// Raw energy of a flat angle vector; the caller guarantees its length.
    pub fn evaluate(&mut self, angles: &[f64]) -> f64 {
        debug_assert_eq!(angles.len(), self.dimension());
        let mut scratch = std::mem::take(&mut self.scratch);
        positions_into(self.length, angles, &mut scratch);
        let e = self.energy_of(&angles[..self.length - 2], &scratch);
        self.scratch = scratch;
        e
    }

    /// Raw energy from bond angles and already computed positions.
    pub(crate) fn energy_of(&self, theta: &[f64], pos: &[Point]) -> f64 {
        let bend: f64 = theta.iter().map(|&t| bend_term(t)).sum();
        let n = self.length;
        let mut pair = 0.0;
        for i in 0..n - 2 {
            let pi = pos[i];
            let row = &self.coeff[i * n..(i + 1) * n];
            for j in i + 2..n {
                let d2 = (pos[j] - pi).norm_squared();
                if d2 < CLASH_DIST2 {
                    return f64::INFINITY;
                }
                let inv6 = (1.0 / d2).powi(3);
                pair += inv6 * inv6 - row[j] * inv6;
            }
        }
        combine(bend, pair)
    }
}

/// Raw model energy (lower is better).
///
/// Returns `+inf` when two monomers coincide.
pub fn energy(seq: &Sequence, conf: &Conformation) -> Result<f64> {
    if conf.length() != seq.len() {
        return Err(Error::Dimension { expected: seq.dimension(), actual: conf.dimension() });
    }
    Ok(EnergyModel::new(seq).evaluate(conf.angles()))
}

/// Display convention: energies are negated so that higher is better.
#[inline]
pub fn reported_energy(raw: f64) -> f64 {
    -raw
}
