//! Exact minimal enclosing ball in `R^d` (Welzl's recursion, move-to-front variant).

use super::ComplexError;
use crate::geometry::squared_distance;

/// Relative tolerance for ball membership and the Čech radius test.
pub const MEB_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    /// Closed membership with relative tolerance [`MEB_TOL`].
    pub fn contains(&self, p: &[f64]) -> bool {
        self.radius >= 0.0 && squared_distance(&self.center, p).sqrt() <= self.radius * (1.0 + MEB_TOL) + f64::EPSILON
    }
}

/// Smallest closed ball containing every point.
pub fn min_enclosing_ball<P: AsRef<[f64]>>(points: &[P]) -> Result<Ball, ComplexError> {
    let pts: Vec<&[f64]> = points.iter().map(AsRef::as_ref).collect();
    let Some(first) = pts.first() else {
        return Err(ComplexError::EmptyPointSet);
    };
    let dim = first.len();
    if let Some(bad) = pts.iter().position(|p| p.len() != dim) {
        return Err(ComplexError::MixedDimensions { index: bad, expected: dim, got: pts[bad].len() });
    }
    Ok(enclosing_ball_unchecked(&pts))
}

pub(crate) fn enclosing_ball_unchecked(pts: &[&[f64]]) -> Ball {
    let dim = pts[0].len();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    let mut support = Vec::with_capacity(dim + 1);
    move_to_front(pts, &mut order, pts.len(), &mut support, dim)
}

fn move_to_front(pts: &[&[f64]], order: &mut Vec<usize>, end: usize, support: &mut Vec<usize>, dim: usize) -> Ball {
    let mut ball = ball_through(pts, support, dim);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        let idx = order[i];
        if !ball.contains(pts[idx]) {
            support.push(idx);
            ball = move_to_front(pts, order, i, support, dim);
            support.pop();
            order.remove(i);
            order.insert(0, idx);
        }
    }
    ball
}

/// Smallest ball with all `support` points on its boundary. Affinely dependent
/// support points are dropped from the linear solve; the radius is then taken
/// as the largest distance to any support point so containment still holds.
fn ball_through(pts: &[&[f64]], support: &[usize], dim: usize) -> Ball {
    match support {
        [] => Ball { center: vec![0.0; dim], radius: -1.0 },
        [a] => Ball { center: pts[*a].to_vec(), radius: 0.0 },
        [base, rest @ ..] => {
            let p0 = pts[*base];
            let vs: Vec<Vec<f64>> = rest.iter().map(|&i| pts[i].iter().zip(p0).map(|(x, y)| x - y).collect()).collect();
            let m = vs.len();
            // Gram system: sum_j lambda_j (v_i . v_j) = |v_i|^2 / 2
            let mut a = vec![vec![0.0; m + 1]; m];
            for i in 0..m {
                for j in 0..m {
                    a[i][j] = dot(&vs[i], &vs[j]);
                }
                a[i][m] = dot(&vs[i], &vs[i]) / 2.0;
            }
            let lambda = solve_dropping_dependent(a);
            let mut center = p0.to_vec();
            for (l, v) in lambda.iter().zip(&vs) {
                for (c, x) in center.iter_mut().zip(v) {
                    *c += l * x;
                }
            }
            let radius = support.iter().map(|&i| squared_distance(&center, pts[i]).sqrt()).fold(0.0, f64::max);
            Ball { center, radius }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gauss-Jordan with partial pivoting on an augmented `m x (m+1)` system.
/// Variables whose pivot vanishes are fixed at zero.
fn solve_dropping_dependent(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let m = a.len();
    let scale = a.iter().enumerate().map(|(i, row)| row[i].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut pivot_row_of = vec![None; m];
    let mut row = 0;
    for col in 0..m {
        let Some(best) = (row..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())) else { break };
        if a[best][col].abs() <= 1e-12 * scale {
            continue;
        }
        a.swap(row, best);
        let piv = a[row][col];
        for r in 0..m {
            if r != row && a[r][col] != 0.0 {
                let f = a[r][col] / piv;
                for c in col..=m {
                    a[r][c] -= f * a[row][c];
                }
            }
        }
        pivot_row_of[col] = Some(row);
        row += 1;
    }
    (0..m).map(|col| pivot_row_of[col].map_or(0.0, |r| a[r][m] / a[r][col])).collect()
}
