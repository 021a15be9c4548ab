//! Local movements of two consecutive monomers and their incremental energy.
//!
//! A move at pivot `n` (1-based, `2 <= n <= L-1`) rotates the bond from
//! monomer `n` to `n+1` and then places monomer `n+2` so that the bond into
//! monomer `n+3` keeps unit length. Only monomers `n+1` and `n+2` change
//! position, so the energy change touches `O(L)` pair terms instead of the
//! whole `L^2 / 2` table.
//!
//! Two chain ends need special handling:
//!
//! * `n = L-1` moves only the last monomer.
//! * `n = L-2` has no fourth point to close the polygon on, so the last
//!   monomer is carried along rigidly with the bond vector it had before.
//!
//! The fragment `e_i^p` in the published update line is read as `e_b^p`: an
//! accepted move replaces the best-population energy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    bend_term, bond_direction, combine, pair_index, pair_term, wrap_full, Chain, Conformation,
    EnergyModel, Point, CLASH_DIST2,
};

/// Pair terms above this magnitude make the incremental update lose too many
/// digits; the new energy is then re-summed from the caches instead.
const LARGE_TERM: f64 = 1e6;

/// Below this residual length the closing point of a move is undefined.
const DEGENERATE: f64 = 1e-12;

/// How the angle pair of a proposal is applied to the incumbent angles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleMode {
    /// New angle = incumbent + proposal value. A zero proposal is the identity.
    #[default]
    Offset,
    /// New angle = proposal value.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMoveProposal {
    /// 1-based pivot monomer; monomers `n+1` and `n+2` move.
    pub n: usize,
    pub dtheta: f64,
    /// Ignored when `n = 2`.
    pub dbeta: f64,
}

impl LocalMoveProposal {
    pub fn new(n: usize, dtheta: f64, dbeta: f64) -> Self {
        Self { n, dtheta, dbeta }
    }

    fn validate(&self, length: usize) -> Result<()> {
        if self.n < 2 || self.n + 1 > length {
            return Err(Error::Geometry(format!(
                "move pivot {} outside 2..={} for a chain of {length}",
                self.n,
                length - 1
            )));
        }
        if !self.dtheta.is_finite() || !self.dbeta.is_finite() {
            return Err(Error::Geometry("non-finite move offsets".into()));
        }
        Ok(())
    }
}

/// Result of [`move_geometry`], completed by [`delta_energy`].
#[derive(Debug, Clone, Default)]
pub struct MoveOutcome {
    pub feasible: bool,
    /// 0-based index of the first moved monomer (`n` in 1-based terms plus one).
    first: usize,
    moved: usize,
    new_positions: [Point; 2],
    /// Flat angle index and new value for every angle the move rewrites.
    angle_updates: Vec<(usize, f64)>,
    /// New pair terms, `length` entries per moved monomer indexed by partner.
    pair_terms: Vec<f64>,
    evaluated: bool,
    pub delta_e1: f64,
    pub delta_e2: f64,
    pub new_energy: f64,
    /// Pair terms computed by the last [`delta_energy`] call.
    pub pair_evaluations: usize,
}

impl MoveOutcome {
    /// `(monomer index, new position)` for each moved monomer, 0-based.
    pub fn new_positions(&self) -> impl Iterator<Item = (usize, Point)> + '_ {
        (0..self.moved).map(move |k| (self.first + k, self.new_positions[k]))
    }

    pub fn angle_updates(&self) -> &[(usize, f64)] {
        &self.angle_updates
    }

    fn infeasible(&mut self) {
        self.feasible = false;
        self.evaluated = false;
        self.moved = 0;
        self.angle_updates.clear();
    }
}

/// Converts a bond vector to `(theta, beta)`, choosing between the two
/// equivalent representations the one closest to the incumbent pair.
///
/// `(theta, beta)` and `(theta + pi, pi - beta)` describe the same direction
/// but give different bending energy, so the choice is kept stable.
pub(crate) fn direction_to_angles(dir: Point, prev_theta: f64, prev_beta: f64) -> (f64, f64) {
    let d = dir / dir.norm();
    let beta = d.z.clamp(-1.0, 1.0).asin();
    let rho = d.x.hypot(d.y);
    let theta = if rho < 1e-12 { prev_theta } else { d.y.atan2(d.x) };
    let alt_theta = wrap_full(theta + PI);
    let alt_beta = wrap_full(PI - beta);
    let dist = |t: f64, b: f64| circular(t, prev_theta) + circular(b, prev_beta);
    if dist(alt_theta, alt_beta) < dist(theta, beta) {
        (alt_theta, alt_beta)
    } else {
        (theta, beta)
    }
}

fn circular(a: f64, b: f64) -> f64 {
    wrap_full(a - b).abs()
}

/// Flat index of the torsion angle for the bond into 0-based monomer `m >= 3`.
#[inline]
fn beta_index(length: usize, m: usize) -> usize {
    length - 2 + m - 3
}

/// Computes the new positions of the moved monomers (offset interpretation).
pub fn move_geometry(chain: &Chain, proposal: LocalMoveProposal) -> Result<MoveOutcome> {
    let mut out = MoveOutcome::default();
    move_geometry_into(chain, proposal, AngleMode::Offset, &mut out)?;
    Ok(out)
}

/// Allocation-free variant of [`move_geometry`] writing into `out`.
pub fn move_geometry_into(
    chain: &Chain,
    proposal: LocalMoveProposal,
    mode: AngleMode,
    out: &mut MoveOutcome,
) -> Result<()> {
    let length = chain.length();
    proposal.validate(length)?;
    let n = proposal.n;
    let angles = chain.angles();
    let pos = chain.positions();

    // Bond into monomer `first` (0-based) is driven by theta_{n-1}, beta_{n-2}.
    let first = n;
    let anchor = n - 1;
    let ti = first - 2;
    let bi = (first >= 3).then(|| beta_index(length, first));

    let apply = |old: f64, p: f64| match mode {
        AngleMode::Offset => wrap_full(old + p),
        AngleMode::Absolute => wrap_full(p),
    };
    let theta = apply(angles[ti], proposal.dtheta);
    let beta = bi.map(|b| apply(angles[b], proposal.dbeta));

    let x2 = pos[anchor] + bond_direction(theta, beta.unwrap_or(0.0));

    out.first = first;
    out.feasible = true;
    out.evaluated = false;
    out.angle_updates.clear();
    out.angle_updates.push((ti, theta));
    if let (Some(b), Some(v)) = (bi, beta) {
        out.angle_updates.push((b, v));
    }

    if first == length - 1 {
        out.moved = 1;
        out.new_positions[0] = x2;
        return Ok(());
    }
    if first == length - 2 {
        out.moved = 2;
        out.new_positions = [x2, x2 + (pos[first + 1] - pos[first])];
        return Ok(());
    }

    let p3 = pos[first + 1];
    let p4 = pos[first + 2];
    let v = p4 - x2;
    let dist2 = v.norm_squared();
    if dist2 > 4.0 {
        out.infeasible();
        return Ok(());
    }
    let dist = dist2.sqrt();
    if dist < DEGENERATE {
        out.infeasible();
        return Ok(());
    }
    let c = x2 + v * 0.5;
    let half_chord = (1.0 - dist2 / 4.0).max(0.0).sqrt();
    let axis = v / dist;
    let w = p3 - c;
    let residual = w - axis * w.dot(&axis);
    let rnorm = residual.norm();
    if rnorm < DEGENERATE {
        out.infeasible();
        return Ok(());
    }
    let x3 = c + residual * (half_chord / rnorm);

    out.moved = 2;
    out.new_positions = [x2, x3];

    // Re-derive the two downstream bonds so angles and positions agree.
    for (m, dir) in [(first + 1, x3 - x2), (first + 2, p4 - x3)] {
        let t_idx = m - 2;
        let b_idx = beta_index(length, m);
        let (t, b) = direction_to_angles(dir, angles[t_idx], angles[b_idx]);
        out.angle_updates.push((t_idx, t));
        out.angle_updates.push((b_idx, b));
    }
    Ok(())
}

/// Energy change of a feasible move: fills `delta_e1`, `delta_e2` and
/// `new_energy` on the outcome and returns `new_energy`.
///
/// `new_energy = E - (delta_e1 / 4 + 4 delta_e2)` where the deltas are
/// old-minus-new sums over the rewritten bend terms and over every pair with
/// at least one moved endpoint.
pub fn delta_energy(model: &EnergyModel, chain: &Chain, outcome: &mut MoveOutcome) -> Result<f64> {
    if !outcome.feasible {
        return Err(Error::Contract("delta_energy called on an infeasible move"));
    }
    let n = chain.length();
    if model.length() != n {
        return Err(Error::Dimension { expected: chain.angles().len(), actual: model.dimension() });
    }

    let mut delta_e1 = 0.0;
    for &(idx, value) in &outcome.angle_updates {
        if idx < n - 2 {
            delta_e1 += chain.bend[idx] - bend_term(value);
        }
    }

    outcome.pair_terms.clear();
    outcome.pair_terms.resize(2 * n, 0.0);
    let mut delta_e2 = 0.0;
    let mut large = false;
    let mut count = 0;
    for k in 0..outcome.moved {
        let m = outcome.first + k;
        let pm = outcome.new_positions[k];
        for other in 0..n {
            if other.abs_diff(m) < 2 {
                continue;
            }
            // Moved monomers are adjacent, so every partner here is unmoved.
            let d2 = (chain.positions[other] - pm).norm_squared();
            let new = if d2 < CLASH_DIST2 { f64::INFINITY } else { pair_term(d2, model.coeff(m, other)) };
            let (i, j) = if other < m { (other, m) } else { (m, other) };
            let old = chain.pairs[pair_index(n, i, j)];
            outcome.pair_terms[k * n + other] = new;
            large |= !(old.abs() < LARGE_TERM && new.abs() < LARGE_TERM);
            delta_e2 += old - new;
            count += 1;
        }
    }

    let new_energy = if large || !chain.energy.is_finite() {
        resummed_energy(chain, outcome)
    } else {
        chain.energy - combine(delta_e1, delta_e2)
    };

    outcome.delta_e1 = delta_e1;
    outcome.delta_e2 = delta_e2;
    outcome.new_energy = new_energy;
    outcome.pair_evaluations = count;
    outcome.evaluated = true;
    Ok(new_energy)
}

/// Full re-summation of the caches with the outcome's new terms substituted.
fn resummed_energy(chain: &Chain, outcome: &MoveOutcome) -> f64 {
    let n = chain.length();
    let mut bend = chain.bend.clone();
    for &(idx, value) in &outcome.angle_updates {
        if idx < n - 2 {
            bend[idx] = bend_term(value);
        }
    }
    let moved = |i: usize| (i >= outcome.first && i < outcome.first + outcome.moved).then(|| i - outcome.first);
    let mut pair = 0.0;
    for i in 0..n - 2 {
        for j in i + 2..n {
            pair += match (moved(i), moved(j)) {
                (Some(k), _) => outcome.pair_terms[k * n + j],
                (None, Some(k)) => outcome.pair_terms[k * n + i],
                (None, None) => chain.pairs[pair_index(n, i, j)],
            };
        }
    }
    combine(bend.iter().sum(), pair)
}

/// Applies an evaluated feasible move to the chain and its caches.
pub fn commit_move(chain: &mut Chain, outcome: &MoveOutcome) -> Result<()> {
    if !outcome.feasible {
        return Err(Error::Contract("commit_move called on an infeasible move"));
    }
    if !outcome.evaluated {
        return Err(Error::Contract("commit_move called before delta_energy"));
    }
    let n = chain.length();
    for k in 0..outcome.moved {
        chain.positions[outcome.first + k] = outcome.new_positions[k];
    }
    for &(idx, value) in &outcome.angle_updates {
        chain.angles[idx] = value;
        if idx < n - 2 {
            chain.bend[idx] = bend_term(value);
        }
    }
    for k in 0..outcome.moved {
        let m = outcome.first + k;
        for other in 0..n {
            if other.abs_diff(m) < 2 {
                continue;
            }
            let (i, j) = if other < m { (other, m) } else { (m, other) };
            chain.pairs[pair_index(n, i, j)] = outcome.pair_terms[k * n + other];
        }
    }
    chain.energy = outcome.new_energy;
    Ok(())
}

/// Tolerance on bond lengths accepted by [`angles_from_positions`].
const BOND_TOLERANCE: f64 = 1e-6;

/// Inverse of the angle-to-position map, picking `beta` in `[-pi/2, pi/2]`.
///
/// The input may be any rigid placement of the chain; it is re-anchored so
/// the first bond points along `+y` and the second lies in the `z = 0` plane.
pub fn angles_from_positions(positions: &[Point]) -> Result<Conformation> {
    angles_from_positions_impl(positions, None)
}

/// Like [`angles_from_positions`] but chooses, bond by bond, the angle
/// representation closest to `reference`. Both representations describe the
/// same geometry but carry different bending energy.
pub fn angles_from_positions_near(positions: &[Point], reference: &Conformation) -> Result<Conformation> {
    if reference.length() != positions.len() {
        return Err(Error::Dimension {
            expected: 2 * positions.len().max(3) - 5,
            actual: reference.dimension(),
        });
    }
    angles_from_positions_impl(positions, Some(reference))
}

fn angles_from_positions_impl(positions: &[Point], reference: Option<&Conformation>) -> Result<Conformation> {
    let length = positions.len();
    if length < 3 {
        return Err(Error::SequenceTooShort(length));
    }
    for (i, w) in positions.windows(2).enumerate() {
        let d = (w[1] - w[0]).norm();
        if (d - 1.0).abs() > BOND_TOLERANCE {
            return Err(Error::Geometry(format!(
                "bond {}-{} has length {d}, expected 1",
                i + 1,
                i + 2
            )));
        }
    }
    let frame = anchoring_frame(positions);
    let bond = |m: usize| frame.transform(positions[m] - positions[m - 1]);

    let mut angles = vec![0.0; 2 * length - 5];
    let b2 = bond(2);
    angles[0] = b2.y.atan2(b2.x);
    for m in 3..length {
        let (pt, pb) = match reference {
            Some(r) => (r.angles()[m - 2], r.angles()[beta_index(length, m)]),
            None => (0.0, 0.0),
        };
        let (t, b) = match reference {
            Some(_) => direction_to_angles(bond(m), pt, pb),
            None => principal_angles(bond(m)),
        };
        angles[m - 2] = t;
        angles[beta_index(length, m)] = b;
    }
    Conformation::new(length, angles)
}

fn principal_angles(dir: Point) -> (f64, f64) {
    let d = dir / dir.norm();
    let beta = d.z.clamp(-1.0, 1.0).asin();
    let theta = if d.x.hypot(d.y) < 1e-12 { 0.0 } else { d.y.atan2(d.x) };
    (theta, beta)
}

/// Rotation taking an arbitrarily placed chain into the canonical frame.
struct Frame {
    rows: Option<[Point; 3]>,
}

impl Frame {
    fn transform(&self, v: Point) -> Point {
        match &self.rows {
            None => v,
            Some([ex, ey, ez]) => Point::new(ex.dot(&v), ey.dot(&v), ez.dot(&v)),
        }
    }
}

fn anchoring_frame(p: &[Point]) -> Frame {
    let anchored = p[0].norm() < BOND_TOLERANCE
        && (p[1] - Point::new(0.0, 1.0, 0.0)).norm() < BOND_TOLERANCE
        && p[2].z.abs() < BOND_TOLERANCE;
    if anchored {
        return Frame { rows: None };
    }
    let ey = (p[1] - p[0]).normalize();
    let b2 = p[2] - p[1];
    let perp = b2 - ey * b2.dot(&ey);
    let ex = if perp.norm() > 1e-9 {
        perp.normalize()
    } else {
        // Collinear start: any direction orthogonal to the first bond.
        let trial = if ey.x.abs() < 0.9 { Point::x() } else { Point::z() };
        (trial - ey * trial.dot(&ey)).normalize()
    };
    let ez = ex.cross(&ey);
    Frame { rows: Some([ex, ey, ez]) }
}
