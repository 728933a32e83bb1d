//! Exact-sign planar predicates on f64 coordinates.
//!
//! The orientation test evaluates the 2x2 determinant with a floating-point
//! fast path guarded by a forward error bound; when the bound cannot certify
//! the sign, the determinant is re-evaluated exactly as a nonoverlapping
//! floating-point expansion (Dekker/Knuth error-free transformations).

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
    Collinear,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Adds one f64 to a nonoverlapping expansion, keeping it nonoverlapping.
fn grow_expansion(e: &[f64], b: f64, out: &mut Vec<f64>) {
    out.clear();
    let mut q = b;
    for &ei in e {
        let (sum, err) = two_sum(q, ei);
        if err != 0.0 {
            out.push(err);
        }
        q = sum;
    }
    out.push(q);
}

/// Sign of an exactly accumulated sum of f64 terms.
fn exact_sign(terms: &[f64]) -> f64 {
    let mut e: Vec<f64> = Vec::with_capacity(terms.len() + 4);
    let mut scratch: Vec<f64> = Vec::with_capacity(terms.len() + 4);
    for &t in terms {
        grow_expansion(&e, t, &mut scratch);
        std::mem::swap(&mut e, &mut scratch);
    }
    // Largest-magnitude component is last; its sign is the sign of the sum.
    for &c in e.iter().rev() {
        if c != 0.0 {
            return c.signum();
        }
    }
    0.0
}

/// Sign of the signed area of triangle (a, b, c): positive when
/// counterclockwise, negative when clockwise, zero when collinear.
pub fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Orientation {
    let detleft = (a[0] - c[0]) * (b[1] - c[1]);
    let detright = (a[1] - c[1]) * (b[0] - c[0]);
    let det = detleft - detright;

    // Forward error bound for the naive evaluation (Shewchuk's ccwerrbound).
    let detsum = detleft.abs() + detright.abs();
    const ERRBOUND: f64 = 3.3306690738754716e-16;
    if det.abs() > ERRBOUND * detsum {
        return classify(det);
    }

    // Exact path: expand det = ax by - ax cy + ay cx - ay bx + bx cy - by cx.
    let mut terms = [0.0f64; 12];
    let mut k = 0;
    for (p, q, s) in [
        (a[0], b[1], 1.0),
        (a[0], c[1], -1.0),
        (a[1], c[0], 1.0),
        (a[1], b[0], -1.0),
        (b[0], c[1], 1.0),
        (b[1], c[0], -1.0),
    ] {
        let (hi, lo) = two_product(p, q);
        terms[k] = s * hi;
        terms[k + 1] = s * lo;
        k += 2;
    }
    classify(exact_sign(&terms))
}

fn classify(v: f64) -> Orientation {
    if v > 0.0 {
        Orientation::Counterclockwise
    } else if v < 0.0 {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// True when p lies on the closed segment [a, b].
pub fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    if orient2d(a, b, p) != Orientation::Collinear {
        return false;
    }
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Strict interior test by winding number; points on the boundary return false.
pub fn point_in_polygon(vertices: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = vertices.len();
    let mut winding = 0i32;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if on_segment(a, b, p) {
            return false;
        }
        if a[1] <= p[1] {
            if b[1] > p[1] && orient2d(a, b, p) == Orientation::Counterclockwise {
                winding += 1;
            }
        } else if b[1] <= p[1] && orient2d(a, b, p) == Orientation::Clockwise {
            winding -= 1;
        }
    }
    winding != 0
}

/// Euclidean distance from p to the closed segment [a, b].
pub fn point_segment_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    let qx = a[0] + t * dx;
    let qy = a[1] + t * dy;
    ((p[0] - qx).powi(2) + (p[1] - qy).powi(2)).sqrt()
}

/// True when the open segments (a, b) and (c, d) intersect, or when they
/// overlap collinearly in more than a point, or when an endpoint of one lies
/// strictly inside the other. Shared endpoints alone do not count.
pub fn segments_properly_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    use Orientation::Collinear;
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);

    if o1 != Collinear && o2 != Collinear && o3 != Collinear && o4 != Collinear {
        return o1 != o2 && o3 != o4;
    }

    let ends_touch = |p: [f64; 2], q: [f64; 2]| p == q;
    let shared = ends_touch(a, c) || ends_touch(a, d) || ends_touch(b, c) || ends_touch(b, d);

    // Collinear configurations: any overlap beyond a shared endpoint is improper.
    let mut hits = 0;
    for (s0, s1, p) in [(a, b, c), (a, b, d), (c, d, a), (c, d, b)] {
        if on_segment(s0, s1, p) {
            hits += 1;
        }
    }
    if shared {
        hits > 2
    } else {
        hits > 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_basic() {
        assert_eq!(
            orient2d([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]),
            Orientation::Counterclockwise
        );
        assert_eq!(
            orient2d([0.0, 0.0], [0.0, 1.0], [1.0, 0.0]),
            Orientation::Clockwise
        );
        assert_eq!(
            orient2d([0.0, 0.0], [1.0, 1.0], [2.0, 2.0]),
            Orientation::Collinear
        );
    }

    #[test]
    fn orientation_near_degenerate_is_exact() {
        // Points nearly collinear: naive determinant underflows to noise but
        // the exact path must classify consistently under permutation.
        let a = [0.1, 0.1];
        let b = [0.1 + 1e-17, 0.1 + 1e-17];
        let c = [0.2, 0.2];
        let o1 = orient2d(a, b, c);
        let o2 = orient2d(b, c, a);
        let o3 = orient2d(c, a, b);
        assert_eq!(o1, o2);
        assert_eq!(o2, o3);
    }

    #[test]
    fn polygon_membership() {
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(point_in_polygon(&square, [0.5, 0.5]));
        assert!(!point_in_polygon(&square, [1.5, 0.5]));
        assert!(!point_in_polygon(&square, [1.0, 0.5])); // on edge
        assert!(!point_in_polygon(&square, [0.0, 0.0])); // vertex
    }

    #[test]
    fn nonconvex_membership() {
        // L-shape
        let poly = [
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ];
        assert!(point_in_polygon(&poly, [0.5, 1.5]));
        assert!(!point_in_polygon(&poly, [1.5, 1.5]));
        assert!(point_in_polygon(&poly, [1.5, 0.5]));
    }

    #[test]
    fn segment_distance() {
        let d = point_segment_distance([0.0, 0.0], [1.0, 0.0], [0.5, 0.25]);
        assert!((d - 0.25).abs() < 1e-15);
        let d = point_segment_distance([0.0, 0.0], [1.0, 0.0], [2.0, 0.0]);
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn proper_intersections() {
        assert!(segments_properly_intersect(
            [0.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [1.0, 0.0]
        ));
        // Shared endpoint only: not proper.
        assert!(!segments_properly_intersect(
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0]
        ));
        // Collinear overlap: improper.
        assert!(segments_properly_intersect(
            [0.0, 0.0],
            [2.0, 0.0],
            [1.0, 0.0],
            [3.0, 0.0]
        ));
        // Disjoint parallel.
        assert!(!segments_properly_intersect(
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [1.0, 1.0]
        ));
    }
}
