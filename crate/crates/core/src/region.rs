//! Square search regions and rectangular search domains.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::C64;

/// Axis-aligned square `center ± half_side` (both axes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub center: C64,
    pub half_side: f64,
    pub depth: usize,
}

impl Region {
    pub fn new(center: C64, half_side: f64) -> Self {
        Self {
            center,
            half_side,
            depth: 0,
        }
    }

    /// Square spanning `[xmin, xmin + side] × [ymin, ymin + side]`.
    pub fn from_corner(xmin: f64, ymin: f64, side: f64) -> Self {
        Self::new(C64::new(xmin + side / 2.0, ymin + side / 2.0), side / 2.0)
    }

    /// `h(S)`, the side length.
    pub fn size(&self) -> f64 {
        2.0 * self.half_side
    }

    pub fn contains(&self, z: C64) -> bool {
        (z.re - self.center.re).abs() <= self.half_side
            && (z.im - self.center.im).abs() <= self.half_side
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            xmin: self.center.re - self.half_side,
            xmax: self.center.re + self.half_side,
            ymin: self.center.im - self.half_side,
            ymax: self.center.im + self.half_side,
        }
    }

    /// The four equal quadrants, one level deeper.
    pub fn subdivide(&self) -> [Region; 4] {
        let q = self.half_side / 2.0;
        let child = |dx: f64, dy: f64| Region {
            center: self.center + C64::new(dx * q, dy * q),
            half_side: q,
            depth: self.depth + 1,
        };
        [
            child(1.0, 1.0),
            child(-1.0, 1.0),
            child(1.0, -1.0),
            child(-1.0, -1.0),
        ]
    }
}

pub fn subdivide(r: &Region) -> [Region; 4] {
    r.subdivide()
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.bounds();
        write!(
            f,
            "[{}, {}] x [{}, {}] (depth {})",
            b.xmin, b.xmax, b.ymin, b.ymax, self.depth
        )
    }
}

/// Closed rectangle `[xmin, xmax] × [ymin, ymax]` in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Bounds {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Option<Self> {
        let finite = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite());
        (finite && xmin < xmax && ymin < ymax).then_some(Self {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    /// Smallest square with the same center that covers the rectangle.
    pub fn enclosing_square(&self) -> Region {
        let half = 0.5 * (self.xmax - self.xmin).max(self.ymax - self.ymin);
        Region::new(
            C64::new(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax)),
            half,
        )
    }

    /// Euclidean distance from `z` to the rectangle, zero inside.
    pub fn distance_outside(&self, z: C64) -> f64 {
        let dx = (self.xmin - z.re).max(z.re - self.xmax).max(0.0);
        let dy = (self.ymin - z.im).max(z.im - self.ymax).max(0.0);
        dx.hypot(dy)
    }

    /// Distance from `z` to the rectangle's boundary curve.
    pub fn distance_to_boundary(&self, z: C64) -> f64 {
        let outside = self.distance_outside(z);
        if outside > 0.0 {
            return outside;
        }
        (z.re - self.xmin)
            .min(self.xmax - z.re)
            .min(z.im - self.ymin)
            .min(self.ymax - z.im)
    }
}
