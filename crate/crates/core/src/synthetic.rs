//! Pencils with exactly known spectra, and independent projection oracles.
//!
//! `A = diag(λ_1..λ_k, 1..1)`, `B = diag(1..1, 0..0)`, optionally conjugated by
//! a product of random complex Givens rotations `Q`, giving `(Q A Qᴴ, Q B Qᴴ)`.
//! Unitary similarity leaves the generalized spectrum and its conditioning
//! untouched while destroying the diagonal structure.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contour::Contour;
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use crate::lu::solve_node_direct;
use crate::pencil::{make_pencil, Pencil, ProbeVector};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    None,
    GivensSimilarity { seed: u64, rotations: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// Finite spectrum.
    pub eigenvalues: Vec<C64>,
    /// Rows with `B` singular (eigenvalues at infinity).
    pub infinite_count: usize,
    pub transform: Transform,
}

/// `G = [[c, -conj(s)], [s, c]]` acting on coordinates `i`, `j`.
#[derive(Debug, Clone, Copy)]
struct Givens {
    i: usize,
    j: usize,
    c: f64,
    s: C64,
}

impl Givens {
    fn apply(&self, x: &mut [C64]) {
        let (xi, xj) = (x[self.i], x[self.j]);
        x[self.i] = self.c * xi - self.s.conj() * xj;
        x[self.j] = self.s * xi + self.c * xj;
    }

    fn apply_adjoint(&self, x: &mut [C64]) {
        let (xi, xj) = (x[self.i], x[self.j]);
        x[self.i] = self.c * xi + self.s.conj() * xj;
        x[self.j] = -self.s * xi + self.c * xj;
    }
}

impl SyntheticSpec {
    pub fn diagonal(eigenvalues: Vec<C64>) -> Self {
        Self {
            eigenvalues,
            infinite_count: 0,
            transform: Transform::None,
        }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len() + self.infinite_count
    }

    fn rotations(&self) -> Vec<Givens> {
        let Transform::GivensSimilarity { seed, rotations } = self.transform else {
            return Vec::new();
        };
        let n = self.n();
        if n < 2 {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..rotations)
            .map(|_| {
                let i = rng.random_range(0..n);
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                let theta: f64 = rng.random_range(0.1..(0.5 * PI - 0.1));
                let phi: f64 = rng.random_range(0.0..TAU);
                Givens {
                    i,
                    j,
                    c: theta.cos(),
                    s: C64::from_polar(theta.sin(), phi),
                }
            })
            .collect()
    }

    /// `Q x`
    pub fn apply_q(&self, x: &mut [C64]) {
        for g in self.rotations() {
            g.apply(x);
        }
    }

    /// `Qᴴ x`
    pub fn apply_q_adjoint(&self, x: &mut [C64]) {
        for g in self.rotations().iter().rev() {
            g.apply_adjoint(x);
        }
    }

    /// Finite eigenvalues inside the closed rectangle.
    pub fn eigenvalues_in(&self, bounds: &crate::region::Bounds) -> Vec<C64> {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|&l| bounds.distance_outside(l) == 0.0)
            .collect()
    }
}

/// Layout of a random test spectrum around a square search domain.
#[derive(Debug, Clone)]
pub struct RandomSpectrum {
    pub dim: usize,
    /// Eigenvalues placed inside `domain`.
    pub interior: usize,
    pub infinite_count: usize,
    /// Emit interior eigenvalues as `a ± bi` pairs where possible.
    pub conjugate_pairs: bool,
    pub domain: crate::region::Bounds,
    /// Minimum distance between any two finite eigenvalues.
    pub separation: f64,
    /// Minimum distance of any eigenvalue from the domain boundary.
    pub margin: f64,
    pub rotations: usize,
}

impl RandomSpectrum {
    /// Samples a spectrum: `interior` eigenvalues inside the domain, the other
    /// finite ones outside it at up to five domain widths away.
    pub fn sample(&self, seed: u64) -> SyntheticSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.domain;
        let width = (d.xmax - d.xmin).max(d.ymax - d.ymin);
        let finite = self.dim - self.infinite_count;
        let mut eigenvalues: Vec<C64> = Vec::with_capacity(finite);
        let far_enough = |z: C64, existing: &[C64]| {
            existing.iter().all(|e| (e - z).norm() >= self.separation)
        };

        while eigenvalues.len() < self.interior {
            let z = C64::new(
                rng.random_range(d.xmin + self.margin..d.xmax - self.margin),
                rng.random_range(d.ymin + self.margin..d.ymax - self.margin),
            );
            let pair = self.conjugate_pairs && eigenvalues.len() + 2 <= self.interior;
            if pair {
                let conj = z.conj();
                let conj_inside = d.distance_to_boundary(conj) >= self.margin
                    && d.distance_outside(conj) == 0.0;
                if conj_inside
                    && (z - conj).norm() >= self.separation
                    && far_enough(z, &eigenvalues)
                    && far_enough(conj, &eigenvalues)
                {
                    eigenvalues.push(z);
                    eigenvalues.push(conj);
                }
            } else if far_enough(z, &eigenvalues) {
                eigenvalues.push(z);
            }
        }
        while eigenvalues.len() < finite {
            let z = C64::new(
                rng.random_range(d.xmin - 5.0 * width..d.xmax + 5.0 * width),
                rng.random_range(d.ymin - 5.0 * width..d.ymax + 5.0 * width),
            );
            if d.distance_outside(z) >= self.margin && far_enough(z, &eigenvalues) {
                eigenvalues.push(z);
            }
        }
        // interleave interior and exterior eigenvalues
        let mut order: Vec<usize> = (0..finite).collect();
        for i in (1..finite).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        SyntheticSpec {
            eigenvalues: order.into_iter().map(|i| eigenvalues[i]).collect(),
            infinite_count: self.infinite_count,
            transform: if self.rotations > 0 {
                Transform::GivensSimilarity {
                    seed: seed ^ 0x9E37_79B9_7F4A_7C15,
                    rotations: self.rotations,
                }
            } else {
                Transform::None
            },
        }
    }
}

/// Three test squares with 1, 2 and 0 enclosed eigenvalues, embedded in a
/// spectrum that runs along the real axis from 0.5 to 30.
#[derive(Debug, Clone)]
pub struct ThreeRegionBenchmark {
    pub spec: SyntheticSpec,
    /// `[18.4, 18.8] × [-0.2, 0.2]`, one eigenvalue.
    pub one: crate::region::Region,
    /// `[14.6, 14.8] × [-0.1, 0.1]`, two eigenvalues.
    pub two: crate::region::Region,
    /// `[19.7, 19.9] × [-0.1, 0.1]`, empty.
    pub empty: crate::region::Region,
}

impl ThreeRegionBenchmark {
    pub fn new(infinite_count: usize, seed: u64) -> Self {
        use crate::region::Region;
        let one = Region::from_corner(18.4, -0.2, 0.4);
        let two = Region::from_corner(14.6, -0.1, 0.2);
        let empty = Region::from_corner(19.7, -0.1, 0.2);
        let mut eigenvalues: Vec<C64> = (0..60)
            .map(|k| C64::new(0.5 + 0.5 * k as f64, 0.15 * (1.7 * k as f64).sin()))
            .filter(|z| [one.center, two.center, empty.center].iter().all(|c| (z - c).norm() > 0.45))
            .collect();
        eigenvalues.extend([
            C64::new(18.63, 0.07),
            C64::new(14.66, -0.03),
            C64::new(14.75, 0.04),
        ]);
        Self {
            spec: SyntheticSpec {
                eigenvalues,
                infinite_count,
                transform: Transform::GivensSimilarity { seed, rotations: 150 },
            },
            one,
            two,
            empty,
        }
    }
}

type Rows = Vec<BTreeMap<usize, C64>>;

fn similarity(rows: &mut Rows, g: &Givens) {
    // rows: G · M
    let (ri, rj) = (std::mem::take(&mut rows[g.i]), std::mem::take(&mut rows[g.j]));
    let mut new_i = BTreeMap::new();
    let mut new_j = BTreeMap::new();
    for (&col, &v) in &ri {
        *new_i.entry(col).or_insert(ZERO) += g.c * v;
        *new_j.entry(col).or_insert(ZERO) += g.s * v;
    }
    for (&col, &v) in &rj {
        *new_i.entry(col).or_insert(ZERO) += -g.s.conj() * v;
        *new_j.entry(col).or_insert(ZERO) += g.c * v;
    }
    rows[g.i] = new_i;
    rows[g.j] = new_j;
    // columns: (G M) · Gᴴ
    for row in rows.iter_mut() {
        let vi = row.get(&g.i).copied();
        let vj = row.get(&g.j).copied();
        if vi.is_none() && vj.is_none() {
            continue;
        }
        let (vi, vj) = (vi.unwrap_or(ZERO), vj.unwrap_or(ZERO));
        row.insert(g.i, g.c * vi - g.s * vj);
        row.insert(g.j, g.s.conj() * vi + g.c * vj);
    }
}

fn to_sparse(rows: Rows) -> SparseMatrix {
    let n = rows.len();
    let triplets = rows
        .into_iter()
        .enumerate()
        .flat_map(|(i, row)| row.into_iter().map(move |(j, v)| (i, j, v)));
    SparseMatrix::from_triplets(n, n, triplets).expect("indices within bounds")
}

pub fn synth_pencil(spec: &SyntheticSpec) -> Pencil {
    let n = spec.n();
    let k = spec.eigenvalues.len();
    let diag_a: Vec<C64> = spec
        .eigenvalues
        .iter()
        .copied()
        .chain(std::iter::repeat_n(ONE, spec.infinite_count))
        .collect();
    let mut a: Rows = (0..n).map(|i| BTreeMap::from([(i, diag_a[i])])).collect();
    let mut b: Rows = (0..n)
        .map(|i| {
            if i < k {
                BTreeMap::from([(i, ONE)])
            } else {
                BTreeMap::new()
            }
        })
        .collect();
    for g in spec.rotations() {
        similarity(&mut a, &g);
        similarity(&mut b, &g);
    }
    make_pencil(to_sparse(a), Some(to_sparse(b))).expect("square by construction")
}

/// Closed-form projection: in the diagonal frame, keep the probe components
/// of eigenvalues strictly inside the circle.
pub fn exact_projection(spec: &SyntheticSpec, f: &ProbeVector, c: &Contour) -> Result<Vec<C64>> {
    if f.len() != spec.n() {
        return Err(Error::dim(format!(
            "probe of length {} for synthetic pencil of dimension {}",
            f.len(),
            spec.n()
        )));
    }
    for &l in &spec.eigenvalues {
        if ((l - c.center).norm() - c.radius).abs() < 1e-12 * c.radius {
            return Err(Error::OnContour { eigenvalue: l });
        }
    }
    let mut g = f.values().to_vec();
    spec.apply_q_adjoint(&mut g);
    for (i, gi) in g.iter_mut().enumerate() {
        let inside = spec
            .eigenvalues
            .get(i)
            .is_some_and(|&l| (l - c.center).norm() < c.radius);
        if !inside {
            *gi = ZERO;
        }
    }
    spec.apply_q(&mut g);
    Ok(g)
}

/// Trapezoidal projection with a direct factorization at every node.
pub fn brute_projection(
    p: &Pencil,
    f: &ProbeVector,
    center: C64,
    radius: f64,
    n_large: usize,
) -> Result<Vec<C64>> {
    if n_large < 64 {
        return Err(Error::Config(format!(
            "brute-force projection needs at least 64 nodes, got {n_large}"
        )));
    }
    let contour = Contour::circle(center, radius, n_large)?;
    let mut sum = vec![ZERO; p.dim()];
    for (&z, &w) in contour.nodes.iter().zip(&contour.weights) {
        let x = solve_node_direct(p, z, f.values())?;
        for (s, xi) in sum.iter_mut().zip(&x) {
            *s += w * xi;
        }
    }
    let scale = C64::new(0.0, 1.0 / (2.0 * PI));
    Ok(sum.into_iter().map(|v| v * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, sub};
    use crate::pencil::random_probe;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn untransformed_is_diagonal() {
        let spec = SyntheticSpec::diagonal(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let p = synth_pencil(&spec);
        assert_eq!(p.a(), &SparseMatrix::from_diagonal(&spec.eigenvalues));
        assert_eq!(p.b(), &SparseMatrix::identity(3));
    }

    #[test]
    fn infinite_rows_make_b_singular() {
        let spec = SyntheticSpec {
            eigenvalues: vec![c(2.0, 0.0), c(3.0, 0.0)],
            infinite_count: 1,
            transform: Transform::None,
        };
        let p = synth_pencil(&spec);
        assert_eq!(p.b().get(2, 2), ZERO);
        assert_eq!(p.a().get(2, 2), ONE);
        // A - zB is singular exactly at the finite eigenvalues
        assert!(crate::lu::factorize_shift(&p, c(2.0, 0.0)).is_err());
        assert!(crate::lu::factorize_shift(&p, c(2.5, 0.0)).is_ok());
    }

    #[test]
    fn q_is_unitary() {
        let spec = SyntheticSpec {
            eigenvalues: (0..20).map(|i| c(i as f64, 0.0)).collect(),
            infinite_count: 3,
            transform: Transform::GivensSimilarity { seed: 5, rotations: 60 },
        };
        let f = random_probe(23, 1).unwrap();
        let mut x = f.values().to_vec();
        spec.apply_q(&mut x);
        assert!((norm2(&x) - 1.0).abs() < 1e-13);
        spec.apply_q_adjoint(&mut x);
        assert!(norm2(&sub(&x, f.values())) < 1e-13);
    }

    #[test]
    fn similarity_preserves_resolvent() {
        // (QAQᴴ - zQBQᴴ)⁻¹ f = Q (A - zB)⁻¹ Qᴴ f
        let spec = SyntheticSpec {
            eigenvalues: (0..15).map(|i| c(i as f64 * 0.7, (i % 4) as f64 - 1.5)).collect(),
            infinite_count: 2,
            transform: Transform::GivensSimilarity { seed: 11, rotations: 40 },
        };
        let p = synth_pencil(&spec);
        assert!(p.a().nnz() > spec.n());
        let f = random_probe(spec.n(), 2).unwrap();
        let z = c(3.3, 0.2);
        let x = solve_node_direct(&p, z, f.values()).unwrap();
        let mut g = f.values().to_vec();
        spec.apply_q_adjoint(&mut g);
        for (i, gi) in g.iter_mut().enumerate() {
            *gi /= match spec.eigenvalues.get(i) {
                Some(&l) => l - z,
                None => ONE,
            };
        }
        spec.apply_q(&mut g);
        assert!(norm2(&sub(&x, &g)) < 1e-12 * norm2(&g));
    }

    #[test]
    fn exact_projection_cases() {
        let spec = SyntheticSpec::diagonal(vec![c(2.0, 0.0), c(5.0, 0.0)]);
        let f = ProbeVector::from_values(vec![c(FRAC_1_SQRT_2, 0.0); 2], 0);
        let around_two = Contour::circle(c(2.0, 0.0), 1.0, 8).unwrap();
        let p = exact_projection(&spec, &f, &around_two).unwrap();
        assert_eq!(p, vec![c(FRAC_1_SQRT_2, 0.0), ZERO]);
        let nothing = Contour::circle(c(10.0, 0.0), 1.0, 8).unwrap();
        assert!(exact_projection(&spec, &f, &nothing).unwrap().iter().all(|v| *v == ZERO));
        let everything = Contour::circle(c(3.5, 0.0), 5.0, 8).unwrap();
        assert_eq!(exact_projection(&spec, &f, &everything).unwrap(), f.values());
        let through = Contour::circle(c(3.0, 0.0), 1.0, 8).unwrap();
        assert!(matches!(
            exact_projection(&spec, &f, &through),
            Err(Error::OnContour { .. })
        ));
    }

    #[test]
    fn exact_projection_mask_is_idempotent() {
        let spec = SyntheticSpec::diagonal((0..10).map(|i| c(i as f64, 0.0)).collect());
        let f = random_probe(10, 3).unwrap();
        let contour = Contour::circle(c(4.5, 0.0), 2.2, 8).unwrap();
        let once = exact_projection(&spec, &f, &contour).unwrap();
        let twice = exact_projection(&spec, &ProbeVector::from_values(once.clone(), 0), &contour)
            .unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn brute_matches_exact_on_diagonal() {
        let spec = SyntheticSpec::diagonal((0..12).map(|i| c(i as f64, 0.3 * i as f64)).collect());
        let p = synth_pencil(&spec);
        let f = random_probe(12, 4).unwrap();
        let (center, radius) = (c(5.0, 1.5), 1.2);
        let brute = brute_projection(&p, &f, center, radius, 128).unwrap();
        let contour = Contour::circle(center, radius, 128).unwrap();
        let exact = exact_projection(&spec, &f, &contour).unwrap();
        assert!(norm2(&sub(&brute, &exact)) < 1e-8);
    }

    #[test]
    fn brute_projection_contracts() {
        let spec = SyntheticSpec::diagonal(vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let p = synth_pencil(&spec);
        let zero = ProbeVector::from_values(vec![ZERO; 2], 0);
        let out = brute_projection(&p, &zero, c(1.0, 0.0), 0.5, 64).unwrap();
        assert!(out.iter().all(|v| *v == ZERO));
        assert!(matches!(
            brute_projection(&p, &zero, c(1.0, 0.0), 0.5, 32),
            Err(Error::Config(_))
        ));
    }
}
