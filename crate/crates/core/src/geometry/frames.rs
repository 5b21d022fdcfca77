use super::{EdgeId, Point};
#[allow(unused_imports)]
use num_traits::Float;

/// Translation of the corner to the origin followed by a rotation that puts
/// the interior-angle bisector on the positive x-axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidMotion {
    pub origin: Point,
    /// Direction of the bisector in world coordinates.
    pub angle: f64,
}

impl RigidMotion {
    pub fn new(origin: Point, angle: f64) -> Self {
        Self { origin, angle }
    }

    /// World point to corner coordinates.
    pub fn to_local(&self, p: Point) -> Point {
        (p - self.origin).rotate(-self.angle)
    }

    /// Corner coordinates to world point.
    pub fn to_world(&self, q: Point) -> Point {
        q.rotate(self.angle) + self.origin
    }

    /// Rotates a direction from corner coordinates into the world frame.
    pub fn vector_to_world(&self, v: Point) -> Point {
        v.rotate(self.angle)
    }

    pub fn vector_to_local(&self, v: Point) -> Point {
        v.rotate(-self.angle)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrameSide {
    /// The side `y = a x / b` (incoming edge of the loop).
    Upper,
    /// The side `y = -a x / b` (outgoing edge of the loop).
    Lower,
}

/// Tangent/normal frame of one side of a corner, in corner coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerFrame {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Unit tangent pointing away from the corner along the side.
    pub tangent: Point,
    /// Outward unit normal.
    pub normal: Point,
    pub side: FrameSide,
    pub edge: EdgeId,
}

impl CornerFrame {
    fn new(theta0: f64, side: FrameSide, edge: EdgeId) -> Self {
        let half = 0.5 * theta0;
        let a: f64 = 1.0;
        let b = half.cos() / half.sin();
        let c = a.hypot(b);
        let (tangent, normal) = match side {
            FrameSide::Upper => (Point::new(b / c, a / c), Point::new(-a / c, b / c)),
            FrameSide::Lower => (Point::new(b / c, -a / c), Point::new(-a / c, -b / c)),
        };
        Self {
            a,
            b,
            c,
            tangent,
            normal,
            side,
            edge,
        }
    }
}

/// Both side frames of a corner together with the motion into corner coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerFrames {
    pub theta0: f64,
    pub motion: RigidMotion,
    pub upper: CornerFrame,
    pub lower: CornerFrame,
}

impl CornerFrames {
    pub(super) fn new(theta0: f64, motion: RigidMotion, upper: EdgeId, lower: EdgeId) -> Self {
        Self {
            theta0,
            motion,
            upper: CornerFrame::new(theta0, FrameSide::Upper, upper),
            lower: CornerFrame::new(theta0, FrameSide::Lower, lower),
        }
    }

    pub fn frame(&self, side: FrameSide) -> &CornerFrame {
        match side {
            FrameSide::Upper => &self.upper,
            FrameSide::Lower => &self.lower,
        }
    }

    /// Outward normal of a side in world coordinates.
    pub fn world_normal(&self, side: FrameSide) -> Point {
        self.motion.vector_to_world(self.frame(side).normal)
    }

    pub fn world_tangent(&self, side: FrameSide) -> Point {
        self.motion.vector_to_world(self.frame(side).tangent)
    }
}
