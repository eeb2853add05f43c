//! Planar points and the small set of predicates the rest of the crate relies on.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn lerp(self, other: Point, s: f64) -> Point {
        Point::new(self.x + s * (other.x - self.x), self.y + s * (other.y - self.y))
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn angle_to(self, other: Point) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }
}

/// Twice the signed area of the triangle `(a, b, c)`; positive when counterclockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Signed area of a closed polygon (shoelace formula).
pub fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let p = points[i];
            let q = points[(i + 1) % n];
            p.x * q.y - q.x * p.y
        })
        .sum();
    0.5 * twice
}

/// Winding number of a closed polygon around `p`. Points on the polygon give an
/// unspecified but finite answer; callers pick test points off the curve.
pub fn winding_number(polygon: &[Point], p: Point) -> i32 {
    let n = polygon.len();
    let mut wn = 0;
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && orient(a, b, p) > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && orient(a, b, p) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Whether the closed segments `ab` and `cd` intersect at a point that is not a
/// shared endpoint. Collinear overlaps count as intersections.
pub fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let shares = |p: Point, q: Point| p == q;
    let shared = shares(a, c) || shares(a, d) || shares(b, c) || shares(b, d);
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if shared {
        // Segments meeting at an endpoint only overlap if collinear and pointing the same way.
        if o1 == 0.0 && o2 == 0.0 {
            let (p, q, r) = if shares(a, c) {
                (a, b, d)
            } else if shares(a, d) {
                (a, b, c)
            } else if shares(b, c) {
                (b, a, d)
            } else {
                (b, a, c)
            };
            let dot = (q.x - p.x) * (r.x - p.x) + (q.y - p.y) * (r.y - p.y);
            return dot > 0.0;
        }
        return false;
    }
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    let on = |p: Point, q: Point, r: Point| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (o1 == 0.0 && on(a, b, c))
        || (o2 == 0.0 && on(a, b, d))
        || (o3 == 0.0 && on(c, d, a))
        || (o4 == 0.0 && on(c, d, b))
}

/// Barycentric coordinates of `p` with respect to the triangle `(a, b, c)`.
pub fn barycentric(a: Point, b: Point, c: Point, p: Point) -> [f64; 3] {
    let det = orient(a, b, c);
    let l1 = orient(p, b, c) / det;
    let l2 = orient(a, p, c) / det;
    [l1, l2, 1.0 - l1 - l2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_area_and_winding() {
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_eq!(signed_area(&sq), 1.0);
        assert_eq!(winding_number(&sq, Point::new(0.5, 0.5)), 1);
        assert_eq!(winding_number(&sq, Point::new(1.5, 0.5)), 0);
    }

    #[test]
    fn crossing_segments() {
        let o = Point::new(0.0, 0.0);
        let a = Point::new(1.0, 1.0);
        let b = Point::new(1.0, 0.0);
        let c = Point::new(0.0, 1.0);
        assert!(segments_cross(o, a, b, c));
        assert!(!segments_cross(o, a, o, b));
        assert!(segments_cross(o, a, o, Point::new(2.0, 2.0)));
    }
}
