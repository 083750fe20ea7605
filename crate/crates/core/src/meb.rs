//! Minimal enclosing balls via Welzl's algorithm with move-to-front.

/// Containment slack; filtration values stay deterministic because the
/// support solve itself is exact arithmetic on the inputs.
const CONTAINMENT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn empty(dim: usize) -> Self {
        Ball {
            center: vec![0.0; dim],
            radius: -1.0,
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        crate::pointcloud::euclidean(&self.center, p) <= self.radius + CONTAINMENT_TOL
    }
}

/// Smallest ball enclosing all points. Points must share a dimension and the
/// slice must be nonempty.
pub fn minimal_enclosing_ball(points: &[&[f64]]) -> Ball {
    assert!(!points.is_empty(), "minimal_enclosing_ball of no points");
    let dim = points[0].len();
    let mut order: Vec<usize> = (0..points.len()).collect();
    let mut boundary = Vec::with_capacity(dim + 1);
    welzl(points, &mut order, points.len(), &mut boundary, dim)
}

/// Radius of the minimal enclosing ball; the Čech filtration value of a simplex.
pub fn meb_radius(points: &[&[f64]]) -> f64 {
    minimal_enclosing_ball(points).radius.max(0.0)
}

fn welzl(
    points: &[&[f64]],
    order: &mut [usize],
    end: usize,
    boundary: &mut Vec<usize>,
    dim: usize,
) -> Ball {
    let mut ball = ball_on_boundary(points, boundary, dim);
    if boundary.len() == dim + 1 {
        return ball;
    }
    let mut i = 0;
    while i < end {
        let p = order[i];
        if !ball.contains(points[p]) {
            boundary.push(p);
            ball = welzl(points, order, i, boundary, dim);
            boundary.pop();
            order[..=i].rotate_right(1);
        }
        i += 1;
    }
    ball
}

/// Unique smallest ball with every listed point on its boundary.
fn ball_on_boundary(points: &[&[f64]], boundary: &[usize], dim: usize) -> Ball {
    match boundary.len() {
        0 => Ball::empty(dim),
        1 => Ball {
            center: points[boundary[0]].to_vec(),
            radius: 0.0,
        },
        _ => {
            if let Some(ball) = circumball(points, boundary, dim) {
                ball
            } else {
                // Affinely dependent support; the last point adds nothing.
                ball_on_boundary(points, &boundary[..boundary.len() - 1], dim)
            }
        }
    }
}

/// Circumball of affinely independent points: the center lies in their
/// affine hull, found from the Gram system
///   sum_j lambda_j 2 (p_i - p0) . (p_j - p0) = |p_i - p0|^2.
fn circumball(points: &[&[f64]], boundary: &[usize], dim: usize) -> Option<Ball> {
    let k = boundary.len() - 1;
    let p0 = points[boundary[0]];
    let diffs: Vec<Vec<f64>> = boundary[1..]
        .iter()
        .map(|&b| points[b].iter().zip(p0).map(|(a, c)| a - c).collect())
        .collect();
    let mut a = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            a[i * k + j] = 2.0 * dot(&diffs[i], &diffs[j]);
        }
        rhs[i] = dot(&diffs[i], &diffs[i]);
    }
    let lambda = solve(&mut a, &mut rhs, k)?;
    let mut center = p0.to_vec();
    for (l, d) in lambda.iter().zip(&diffs) {
        for (c, v) in center.iter_mut().zip(d) {
            *c += l * v;
        }
    }
    let radius = crate::pointcloud::euclidean(&center, p0);
    debug_assert_eq!(center.len(), dim);
    Some(Ball { center, radius })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; None when singular.
fn solve(a: &mut [f64], rhs: &mut [f64], k: usize) -> Option<Vec<f64>> {
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| {
            a[i * k + col].abs().total_cmp(&a[j * k + col].abs())
        })?;
        if a[pivot * k + col].abs() < 1e-12 {
            return None;
        }
        if pivot != col {
            for c in 0..k {
                a.swap(col * k + c, pivot * k + c);
            }
            rhs.swap(col, pivot);
        }
        for row in (col + 1)..k {
            let f = a[row * k + col] / a[col * k + col];
            if f == 0.0 {
                continue;
            }
            for c in col..k {
                a[row * k + c] -= f * a[col * k + c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut acc = rhs[row];
        for c in (row + 1)..k {
            acc -= a[row * k + c] * x[c];
        }
        x[row] = acc / a[row * k + row];
    }
    Some(x)
}
