//! Trapezoidal quadrature on circles.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::region::Region;

/// `n`-point trapezoidal rule on the circle `|z - center| = radius`.
///
/// `(1/2πi) Σ w_j g(z_j)` approximates `(1/2πi) ∮ g(z) dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub center: C64,
    pub radius: f64,
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `exp(2πi j/n)`, computed from the reduced fraction so that nested rules
/// share bitwise-identical nodes. Quarter turns are exact.
fn root_of_unity(j: usize, n: usize) -> C64 {
    let g = gcd(j, n).max(1);
    let (p, q) = (j / g, n / g);
    if (4 * p) % q == 0 {
        return match (4 * p / q) % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    let (s, c) = (2.0 * PI * p as f64 / q as f64).sin_cos();
    C64::new(c, s)
}

impl Contour {
    /// Circle through the given center; `n` must be even and at least 2.
    pub fn circle(center: C64, radius: f64, n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "quadrature node count must be even and >= 2, got {n}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("contour radius must be positive, got {radius}")));
        }
        let two_pi_i = C64::new(0.0, 2.0 * PI);
        let (nodes, weights) = (0..n)
            .map(|j| {
                let offset = root_of_unity(j, n) * radius;
                (center + offset, two_pi_i * offset / n as f64)
            })
            .unzip();
        Ok(Self {
            center,
            radius,
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(1/2πi) Σ w_j g(z_j)`
    pub fn integrate(&self, g: impl Fn(C64) -> C64) -> C64 {
        let sum: C64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * g(z))
            .sum();
        sum / C64::new(0.0, 2.0 * PI)
    }

    /// The rule on every other node, i.e. the `n/2`-point rule.
    pub fn coarsened(&self) -> Option<Contour> {
        let n = self.len();
        if !n.is_multiple_of(4) {
            // coarse rule would have an odd count
            return None;
        }
        Some(Contour {
            center: self.center,
            radius: self.radius,
            nodes: self.nodes.iter().step_by(2).copied().collect(),
            weights: self.weights.iter().step_by(2).map(|w| w * 2.0).collect(),
        })
    }
}

/// Circle circumscribing the square region, with `n` trapezoidal nodes.
pub fn make_contour(r: &Region, n: usize) -> Result<Contour> {
    Contour::circle(r.center, r.half_side * SQRT_2, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_point_unit_circle() {
        let r = Region::new(C64::new(0.0, 0.0), 1.0 / SQRT_2);
        let c = make_contour(&r, 4).unwrap();
        let expected = [
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ];
        for (z, e) in c.nodes.iter().zip(expected) {
            assert!((z - e).norm() < 1e-15);
        }
        for (w, e) in c.weights.iter().zip(expected) {
            let target = C64::new(0.0, 2.0 * PI) * e / 4.0;
            assert!((w - target).norm() < 1e-15);
        }
    }

    #[test]
    fn odd_or_tiny_counts_rejected() {
        let r = Region::new(C64::new(0.0, 0.0), 1.0);
        assert!(matches!(make_contour(&r, 5), Err(Error::Config(_))));
        assert!(matches!(make_contour(&r, 0), Err(Error::Config(_))));
        assert!(make_contour(&r, 2).is_ok());
    }

    #[test]
    fn simple_pole_at_center_is_exact() {
        for n in [2, 4, 8, 16, 64] {
            let c = Contour::circle(C64::new(3.0, -2.0), 0.7, n).unwrap();
            let center = c.center;
            let value = c.integrate(|z| 1.0 / (z - center));
            assert!((value - 1.0).norm() < 1e-15, "n = {n}: {value}");
        }
    }

    #[test]
    fn outside_pole_decays() {
        let c8 = Contour::circle(C64::new(0.0, 0.0), 1.0, 8).unwrap();
        let c16 = Contour::circle(C64::new(0.0, 0.0), 1.0, 16).unwrap();
        let pole = C64::new(2.0, 0.0);
        let g = |z: C64| 1.0 / (z - pole);
        let (a, b) = (c8.integrate(g).norm(), c16.integrate(g).norm());
        // closed form of the trapezoid error: rho^-n / (1 - rho^-n)
        assert!((a - 2f64.powi(-8) / (1.0 - 2f64.powi(-8))).abs() < 1e-15);
        assert!(a / b >= 10.0);
    }

    #[test]
    fn nested_rule_is_bitwise_coarse_rule() {
        for n in [2, 4, 6, 8, 12, 32] {
            let center = C64::new(18.6, 0.1);
            let fine = Contour::circle(center, 0.283, 2 * n).unwrap();
            let coarse = Contour::circle(center, 0.283, n).unwrap();
            let nested = fine.coarsened().unwrap();
            assert_eq!(nested, coarse, "n = {n}");
        }
    }
}
