//! Rigid formation alignment and loss.
//!
//! The loss between two ordered point sets is the squared Frobenius residual
//! after the optimal rotation and translation of the first set onto the
//! second (2D Procrustes with a closed-form angle). A team "is in formation"
//! when this loss is near zero, regardless of where the team sits on the map
//! or how the shape is oriented.

use serde::{Deserialize, Serialize};

/// Ordered 2D point set; index order is the agent index order and matters.
#[derive(Debug, Clone, PartialEq)]
pub struct Positions(pub Vec<[f64; 2]>);

impl Positions {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn centroid(&self) -> [f64; 2] {
        let k = self.0.len() as f64;
        let (sx, sy) = self
            .0
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p[0], sy + p[1]));
        [sx / k, sy / k]
    }
}

impl From<Vec<[f64; 2]>> for Positions {
    fn from(points: Vec<[f64; 2]>) -> Self {
        Positions(points)
    }
}

/// Desired formation given as integer cell offsets, one per agent.
///
/// The anchor is irrelevant for the loss (translation invariant); it only
/// matters when the shape is placed on a map to derive start/goal cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormationSpec {
    pub offsets: Vec<(i32, i32)>,
}

impl FormationSpec {
    pub fn new(offsets: Vec<(i32, i32)>) -> Self {
        FormationSpec { offsets }
    }

    /// Horizontal line of `k` agents, one cell apart.
    pub fn line(k: usize) -> Self {
        FormationSpec {
            offsets: (0..k as i32).map(|i| (i, 0)).collect(),
        }
    }

    /// Vertical line of `k` agents.
    pub fn column(k: usize) -> Self {
        FormationSpec {
            offsets: (0..k as i32).map(|i| (0, i)).collect(),
        }
    }

    /// Near-square block filled row-major.
    pub fn square(k: usize) -> Self {
        let side = (k as f64).sqrt().ceil() as i32;
        FormationSpec {
            offsets: (0..k as i32).map(|i| (i % side, i / side)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn positions(&self) -> Positions {
        Positions(
            self.offsets
                .iter()
                .map(|&(x, y)| [x as f64, y as f64])
                .collect(),
        )
    }

    /// Offsets recentered on their centroid, as real coordinates.
    pub fn centered(&self) -> Vec<[f64; 2]> {
        let pos = self.positions();
        let c = pos.centroid();
        pos.0.iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect()
    }
}

/// Optimal rigid registration of one point set onto another.
#[derive(Debug, Clone)]
pub struct AlignmentResult {
    /// Rotation angle in radians.
    pub theta: f64,
    /// 2x2 rotation matrix M(theta); points transform as row-vector * M.
    pub rotation: [[f64; 2]; 2],
    /// Translation applied after rotation.
    pub translation: [f64; 2],
    /// Squared Frobenius residual at the optimum; always >= 0.
    pub loss: f64,
}

fn rotation_matrix(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

fn apply(m: &[[f64; 2]; 2], p: [f64; 2]) -> [f64; 2] {
    // Row vector times matrix.
    [
        p[0] * m[0][0] + p[1] * m[1][0],
        p[0] * m[0][1] + p[1] * m[1][1],
    ]
}

/// Finds the rotation and translation of `x1` minimizing the squared residual
/// against `x2`, and the residual itself.
///
/// The angle comes from the quadrant-aware arctangent of the centered cross
/// sums; both point sets are centered before the angle sums so the optimum is
/// invariant to where either formation sits. Coincident (degenerate) point
/// sets get theta = 0, where every angle attains the same loss.
///
/// Panics if the sets differ in length or have fewer than two points.
pub fn align(x1: &Positions, x2: &Positions) -> AlignmentResult {
    assert_eq!(x1.len(), x2.len(), "point sets must have equal length");
    assert!(x1.len() >= 2, "need at least 2 points to align");

    let c1 = x1.centroid();
    let c2 = x2.centroid();

    let mut num = 0.0;
    let mut den = 0.0;
    for (p, q) in x1.0.iter().zip(&x2.0) {
        let (xa, ya) = (p[0] - c1[0], p[1] - c1[1]);
        let (wb, zb) = (q[0] - c2[0], q[1] - c2[1]);
        num += wb * ya - zb * xa;
        den += wb * xa + zb * ya;
    }

    let theta = if num == 0.0 && den == 0.0 {
        0.0
    } else {
        num.atan2(den)
    };
    let rotation = rotation_matrix(theta);

    let rc1 = apply(&rotation, c1);
    let translation = [c2[0] - rc1[0], c2[1] - rc1[1]];

    let mut loss = 0.0;
    for (p, q) in x1.0.iter().zip(&x2.0) {
        let r = apply(&rotation, *p);
        let dx = q[0] - r[0] - translation[0];
        let dy = q[1] - r[1] - translation[1];
        loss += dx * dx + dy * dy;
    }

    AlignmentResult {
        theta,
        rotation,
        translation,
        loss,
    }
}

/// Residual of the optimal rigid registration of `x1` onto `x2`.
pub fn formation_loss(x1: &Positions, x2: &Positions) -> f64 {
    align(x1, x2).loss
}

/// Per-step change of the formation loss against a desired shape:
/// loss(next) - loss(prev). Negative means the team moved into formation.
pub fn delta_loss(prev: &Positions, next: &Positions, desired: &FormationSpec) -> f64 {
    let target = desired.positions();
    formation_loss(next, &target) - formation_loss(prev, &target)
}
