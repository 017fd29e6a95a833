//! Planar rigid-body poses and angle helpers.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Normalizes an angle into the half-open interval `(-pi, pi]`.
pub fn normalize_angle<T: Real>(a: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut a = a % two_pi;
    if a > T::PI() {
        a -= two_pi;
    } else if a <= -T::PI() {
        a += two_pi;
    }
    a
}

/// An SE(2) pose: position in meters, heading in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2<T> {
    pub x: T,
    pub y: T,
    pub theta: T,
}

impl<T: Real> Pose2<T> {
    pub fn new(x: T, y: T, theta: T) -> Self {
        Self { x, y, theta }
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// Rotation matrix column entries `(cos theta, sin theta)`.
    pub fn rot(&self) -> (T, T) {
        (self.theta.cos(), self.theta.sin())
    }

    /// `self * other`: applies `other` in this pose's frame.
    pub fn compose(&self, other: &Pose2<T>) -> Pose2<T> {
        let (c, s) = self.rot();
        Pose2::new(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            normalize_angle(self.theta + other.theta),
        )
    }

    /// The pose `p` with `self.compose(p) == identity`.
    pub fn inverse(&self) -> Pose2<T> {
        let (c, s) = self.rot();
        Pose2::new(
            -(c * self.x + s * self.y),
            s * self.x - c * self.y,
            normalize_angle(-self.theta),
        )
    }

    /// Relative pose of `other` expressed in this pose's frame:
    /// `self.compose(&self.relative_to(other)) == other`.
    pub fn relative_to(&self, other: &Pose2<T>) -> Pose2<T> {
        self.inverse().compose(other)
    }

    /// Maps a point from this pose's frame to the world frame.
    pub fn transform_point(&self, px: T, py: T) -> (T, T) {
        let (c, s) = self.rot();
        (self.x + c * px - s * py, self.y + s * px + c * py)
    }

    /// Euclidean distance between the positions of two poses.
    pub fn distance(&self, other: &Pose2<T>) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}
