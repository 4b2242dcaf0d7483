use crate::geo::CartesianPoint;
use crate::model::Trajectory;

use super::{ved, CompressionThreshold};

/// Indices retained by Douglas-Peucker over `points`, in ascending order.
///
/// Each pending segment is split at its farthest interior point (earliest
/// index on ties) while that distance exceeds `eps`. An explicit stack keeps
/// long trajectories clear of call-depth limits.
pub fn dp_compress_indices(points: &[CartesianPoint], eps: CompressionThreshold) -> Vec<usize> {
    let n = points.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let eps = eps.meters();
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;

    let mut stack = vec![(0usize, n - 1)];
    while let Some((s, e)) = stack.pop() {
        if e - s < 2 {
            continue;
        }
        let (ps, pe) = (points[s], points[e]);
        let mut best = s;
        let mut best_d = 0.0;
        for (i, p) in points.iter().enumerate().take(e).skip(s + 1) {
            let d = ved(p, &ps, &pe);
            if d > best_d {
                best_d = d;
                best = i;
            }
        }
        if best_d > eps {
            keep[best] = true;
            stack.push((best, e));
            stack.push((s, best));
        }
    }
    keep.iter()
        .enumerate()
        .filter_map(|(i, &k)| k.then_some(i))
        .collect()
}

/// Douglas-Peucker compression of a single trajectory.
pub fn dp_compress(traj: &Trajectory, eps: CompressionThreshold) -> Trajectory {
    let positions: Vec<CartesianPoint> = traj.positions().collect();
    let kept = dp_compress_indices(&positions, eps);
    traj.select(&kept).expect("a subsequence of a valid trajectory is valid")
}
