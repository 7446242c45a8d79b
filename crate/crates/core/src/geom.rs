//! Planar geometry helpers for the channel model.

/// 2-D point in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Angle of `other` as seen from `self`, in radians in (-pi, pi].
    pub fn angle_to(&self, other: &Point) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }
}

/// Distance from point `p` to the closed segment `a`-`b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let abx = b.x - a.x;
    let aby = b.y - a.y;
    let len2 = abx * abx + aby * aby;
    if len2 == 0.0 {
        return p.distance(&a);
    }
    let t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
    let t = t.clamp(0.0, 1.0);
    let proj = Point::new(a.x + t * abx, a.y + t * aby);
    p.distance(&proj)
}

/// True iff the segment `a`-`b` intersects the closed disk of radius `r`
/// around `center`. Tangency counts as intersection, and endpoints inside
/// the disk count as blocked.
pub fn segment_hits_disk(a: Point, b: Point, center: Point, r: f64) -> bool {
    point_segment_distance(center, a, b) <= r
}
