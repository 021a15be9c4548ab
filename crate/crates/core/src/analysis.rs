//! Conformation comparison: superposed RMSD, mirror images, clustering and
//! the bundled archive of published best solutions.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::io::parse_angle_blocks;
use crate::model::{best_known, compute_positions, Conformation, Point};

/// Default RMSD threshold for single-linkage clustering.
pub const DEFAULT_CLUSTER_THRESHOLD: f64 = 0.1;

fn centroid(points: &[Point]) -> Point {
    points.iter().fold(Vector3::zeros(), |acc, p| acc + p) / points.len() as f64
}

/// Minimum RMSD between `a` and `b` over proper rigid motions.
///
/// Kabsch superposition with the sign correction that keeps the rotation's
/// determinant at +1, so mirror images are not superposed onto each other.
pub fn superposed_rmsd(a: &[Point], b: &[Point]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension { expected: a.len(), actual: b.len() });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput("position set"));
    }
    let (ca, cb) = (centroid(a), centroid(b));
    let mut h = Matrix3::zeros();
    for (p, q) in a.iter().zip(b) {
        h += (p - ca) * (q - cb).transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let mut d = Matrix3::identity();
    if (u * v_t).determinant() < 0.0 {
        // Flip the weakest direction to stay a proper rotation.
        let k = svd.singular_values.imin();
        d[(k, k)] = -1.0;
    }
    let rot = v_t.transpose() * d * u.transpose();
    let sum: f64 = a.iter().zip(b).map(|(p, q)| (rot * (p - ca) - (q - cb)).norm_squared()).sum();
    Ok((sum / a.len() as f64).sqrt())
}

/// RMSD between the chains of two conformations of the same length.
pub fn conformation_rmsd(a: &Conformation, b: &Conformation) -> Result<f64> {
    superposed_rmsd(&compute_positions(a), &compute_positions(b))
}

/// Reflection through the XY-plane: every torsion angle negated.
pub fn mirror(conf: &Conformation) -> Conformation {
    let l = conf.length();
    let mut angles = conf.angles().to_vec();
    for b in &mut angles[l - 2..] {
        *b = -*b;
    }
    Conformation::new(l, angles).expect("negation keeps angles in range")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Indices into the clustered entries.
    pub members: Vec<usize>,
    pub best_energy: f64,
    /// Index of the member with `best_energy`.
    pub best: usize,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Single-linkage clustering of `(conformation, reported energy)` pairs
/// under `superposed_rmsd <= threshold`. Clusters are ordered by their
/// smallest member index.
pub fn cluster_solutions(entries: &[(Conformation, f64)], threshold: f64) -> Result<Vec<Cluster>> {
    if let Some((first, _)) = entries.first() {
        if let Some((c, _)) = entries.iter().find(|(c, _)| c.length() != first.length()) {
            return Err(Error::Dimension { expected: first.dimension(), actual: c.dimension() });
        }
    }
    let positions: Vec<Vec<Point>> = entries.iter().map(|(c, _)| compute_positions(c)).collect();
    let n = entries.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri == rj {
                continue;
            }
            if superposed_rmsd(&positions[i], &positions[j])? <= threshold {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for (i, entry) in entries.iter().enumerate() {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push(Cluster { members: Vec::new(), best_energy: f64::NEG_INFINITY, best: i });
        }
        let c = &mut clusters[slot[r]];
        c.members.push(i);
        if entry.1 > c.best_energy {
            c.best_energy = entry.1;
            c.best = i;
        }
    }
    Ok(clusters)
}

/// A stored solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub label: String,
    pub conformation: Conformation,
    /// Reported energy the solution is published with.
    pub energy: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionArchive {
    pub entries: Vec<ArchiveEntry>,
}

const PUBLISHED: &str = include_str!("../data/solutions.txt");

impl SolutionArchive {
    /// Parses angle blocks in degrees. Entries take their energy from the
    /// built-in best-known list; labels without one are rejected.
    pub fn parse(text: &str, provenance: &str) -> Result<Self> {
        let entries = parse_angle_blocks(text)?
            .into_iter()
            .map(|b| {
                let energy = best_known(&b.label).ok_or_else(|| Error::UnknownSequence(b.label.clone()))?;
                Ok(ArchiveEntry {
                    conformation: b.to_conformation(true)?,
                    label: b.label,
                    energy,
                    provenance: provenance.to_string(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { entries })
    }

    /// The published best solutions for the built-in sequences.
    pub fn published() -> Self {
        Self::parse(PUBLISHED, "published").expect("bundled archive parses")
    }

    pub fn for_label<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a ArchiveEntry> + 'a {
        self.entries.iter().filter(move |e| e.label.eq_ignore_ascii_case(label))
    }
}
