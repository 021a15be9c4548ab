use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the `[-pi, pi]` range check for values converted from degrees.
const RANGE_SLACK: f64 = 1e-12;

/// Bond and torsion angles of a chain, in radians.
///
/// Stored as a single vector ordered `theta_1..theta_{L-2}, beta_1..beta_{L-3}`,
/// which is also the layout the optimizer works on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conformation {
    length: usize,
    angles: Vec<f64>,
}

impl Conformation {
    /// Builds a conformation for a chain of `length` monomers from radians.
    pub fn new(length: usize, angles: Vec<f64>) -> Result<Self> {
        let conf = Self::new_unchecked_range(length, angles)?;
        if let Some((index, &value)) = conf
            .angles
            .iter()
            .enumerate()
            .find(|(_, a)| !a.is_finite() || a.abs() > PI + RANGE_SLACK)
        {
            return Err(Error::AngleRange { index, value });
        }
        Ok(conf)
    }

    /// Like [`Conformation::new`] but wraps every component into `(-pi, pi]` first.
    pub fn new_wrapped(length: usize, angles: Vec<f64>) -> Result<Self> {
        let angles = angles.into_iter().map(wrap_full).collect();
        Self::new(length, angles)
    }

    fn new_unchecked_range(length: usize, angles: Vec<f64>) -> Result<Self> {
        if length < 3 {
            return Err(Error::SequenceTooShort(length));
        }
        let expected = 2 * length - 5;
        if angles.len() != expected {
            return Err(Error::Dimension { expected, actual: angles.len() });
        }
        Ok(Self { length, angles })
    }

    /// Infers the chain length from the number of angles (`D = 2L - 5`).
    pub fn from_angles(angles: Vec<f64>) -> Result<Self> {
        let d = angles.len();
        if d.is_multiple_of(2) {
            return Err(Error::Geometry(format!(
                "{d} angles cannot describe a chain; the count must be odd (2L - 5)"
            )));
        }
        Self::new((d + 5) / 2, angles)
    }

    pub fn from_degrees(length: usize, degrees: &[f64]) -> Result<Self> {
        Self::new(length, degrees.iter().map(|d| d.to_radians()).collect())
    }

    /// All-zero angles: the planar zig-zag along the x axis.
    pub fn zeros(length: usize) -> Result<Self> {
        Self::new(length, vec![0.0; 2 * length.max(3) - 5])
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn theta(&self) -> &[f64] {
        &self.angles[..self.length - 2]
    }

    pub fn beta(&self) -> &[f64] {
        &self.angles[self.length - 2..]
    }

    pub fn to_degrees(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a.to_degrees()).collect()
    }

    pub fn into_angles(self) -> Vec<f64> {
        self.angles
    }
}

/// Wraps any finite angle into `(-pi, pi]`.
pub fn wrap_full(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let c = Conformation::new(5, vec![0.1, 0.2, 0.3, -0.1, -0.2]).unwrap();
        assert_eq!(c.theta(), &[0.1, 0.2, 0.3]);
        assert_eq!(c.beta(), &[-0.1, -0.2]);
        assert_eq!(c.dimension(), 5);
    }

    #[test]
    fn rejects_bad_dimension_and_range() {
        assert!(matches!(
            Conformation::new(5, vec![0.0; 4]),
            Err(Error::Dimension { expected: 5, actual: 4 })
        ));
        assert!(matches!(
            Conformation::new(3, vec![4.0]),
            Err(Error::AngleRange { index: 0, .. })
        ));
        assert!(Conformation::new(3, vec![PI]).is_ok());
        assert!(Conformation::new(3, vec![-PI]).is_ok());
    }

    #[test]
    fn from_angles_infers_length() {
        assert_eq!(Conformation::from_angles(vec![0.0; 21]).unwrap().length(), 13);
        assert!(Conformation::from_angles(vec![0.0; 20]).is_err());
    }

    #[test]
    fn wrap_full_range() {
        assert_eq!(wrap_full(0.3), 0.3);
        assert!((wrap_full(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_full(-PI) - PI).abs() < 1e-12);
        assert!((wrap_full(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-12);
    }
}
