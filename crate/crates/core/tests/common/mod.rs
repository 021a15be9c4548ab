//! Test-side reference implementation of the energy, written from the
//! model definition without touching the library's internals.

#![allow(dead_code)]

pub type P3 = [f64; 3];

pub fn coefficient(a: u8, b: u8) -> f64 {
    match (a, b) {
        (b'A', b'A') => 1.0,
        (b'B', b'B') => 0.5,
        _ => -0.5,
    }
}

/// Monomer coordinates from `theta_1..theta_{L-2}, beta_1..beta_{L-3}`.
pub fn positions(len: usize, angles: &[f64]) -> Vec<P3> {
    assert_eq!(angles.len(), 2 * len - 5);
    let (theta, beta) = angles.split_at(len - 2);
    let mut p = vec![[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [theta[0].cos(), 1.0 + theta[0].sin(), 0.0]];
    for i in 3..len {
        let t = theta[i - 2];
        let b = beta[i - 3];
        let q = p[i - 1];
        p.push([q[0] + t.cos() * b.cos(), q[1] + t.sin() * b.cos(), q[2] + b.sin()]);
    }
    p
}

pub fn dist(a: P3, b: P3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Raw energy from explicit positions and bend angles.
pub fn energy_from(residues: &str, theta: &[f64], pos: &[P3]) -> f64 {
    let s = residues.as_bytes();
    let bend: f64 = theta.iter().map(|t| 0.25 * (1.0 - t.cos())).sum();
    let mut lj = 0.0;
    for i in 0..pos.len() {
        for j in i + 2..pos.len() {
            let d = dist(pos[i], pos[j]);
            lj += 4.0 * (d.powi(-12) - coefficient(s[i], s[j]) * d.powi(-6));
        }
    }
    bend + lj
}

pub fn energy(residues: &str, angles: &[f64]) -> f64 {
    let len = residues.len();
    energy_from(residues, &angles[..len - 2], &positions(len, angles))
}
