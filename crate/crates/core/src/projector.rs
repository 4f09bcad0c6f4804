//! Approximate spectral projection `Pf` and the region indicators built on it.
//!
//! `Pf ≈ (1/2πi) Σ w_j (z_j B - A)⁻¹ f` over a circular trapezoidal rule.
//! Node solves go through the nearest cached Krylov basis; a node whose
//! residual exceeds `eps` gets its own basis at `σ = z_j`, where the reduced
//! solve is exact.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::arnoldi::KrylovBasis;
use crate::cache::ShiftCache;
use crate::config::Config;
use crate::contour::{make_contour, Contour};
use crate::error::{Error, Result};
use crate::linalg::{axpy, norm2, C64, ZERO};
use crate::lu::solve_node_direct;
use crate::pencil::{Pencil, ProbeVector};
use crate::region::Region;

/// Denominator floor of the nested indicator.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;
/// Admissibility threshold of the double-projection indicator.
pub const LEGACY_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub vector: Vec<C64>,
    pub n_nodes: usize,
    pub max_node_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Indicator {
    pub value: f64,
    pub coarse_norm: f64,
    pub fine_norm: f64,
    pub admissible: bool,
}

enum NodeSolution {
    Reduced { basis: Arc<KrylovBasis>, y: Vec<C64> },
    Full(Vec<C64>),
}

struct SolvedNodes {
    solutions: Vec<NodeSolution>,
    max_residual: f64,
}

/// Relative radial displacement of a quadrature node that hit the spectrum.
pub const NODE_PERTURBATION: f64 = 1e-8;

fn solve_node(
    p: &Pencil,
    rhs: &[C64],
    z: C64,
    cache: &ShiftCache,
    cfg: &Config,
) -> Result<(NodeSolution, f64)> {
    if !cfg.krylov_reuse {
        cache.counters().record_factorization();
        return Ok((NodeSolution::Full(solve_node_direct(p, z, rhs)?), 0.0));
    }
    let nearest = match cache.select_basis(z) {
        Ok(b) => b,
        Err(Error::CacheEmpty) => cache.ensure_basis(p, rhs, cache.seed_shift(z), cfg)?,
        Err(e) => return Err(e),
    };
    let accepted = match nearest.solve_shifted(z) {
        Ok(s) if s.residual <= cfg.eps => Some((nearest, s)),
        Ok(_) | Err(Error::ReducedSingular { .. }) => None,
        Err(e) => return Err(e),
    };
    let (basis, solve) = match accepted {
        Some(found) => found,
        None => {
            let fresh = cache.ensure_basis(p, rhs, z, cfg)?;
            let s = fresh.solve_shifted(z)?;
            (fresh, s)
        }
    };
    Ok((NodeSolution::Reduced { basis, y: solve.y }, solve.residual))
}

/// Solves `(A - z B) x = rhs` for every node of `c`, through the cache unless
/// Krylov reuse is disabled. A node that sits on an eigenvalue is pushed
/// outward by `1e-8` times the region size and retried once.
fn solve_nodes(
    p: &Pencil,
    rhs: &[C64],
    c: &Contour,
    cache: &ShiftCache,
    cfg: &Config,
) -> Result<SolvedNodes> {
    solve_some_nodes(p, rhs, c, 0..c.len(), cache, cfg)
}

fn solve_some_nodes(
    p: &Pencil,
    rhs: &[C64],
    c: &Contour,
    indices: impl Iterator<Item = usize>,
    cache: &ShiftCache,
    cfg: &Config,
) -> Result<SolvedNodes> {
    if cfg.krylov_reuse {
        cache.bind_rhs(rhs)?;
    }
    let mut solutions = Vec::with_capacity(c.len());
    let mut max_residual = 0.0f64;
    let region_size = c.radius * std::f64::consts::SQRT_2;
    for z in indices.map(|j| c.nodes[j]) {
        cache.counters().record_node_solve();
        let (solution, residual) = match solve_node(p, rhs, z, cache, cfg) {
            Err(
                Error::ShiftIsEigenvalue { .. }
                | Error::ShiftConstructionFailed { .. }
                | Error::ReducedSingular { .. },
            ) => {
                let outward = (z - c.center) / (z - c.center).norm();
                let moved = z + outward * (NODE_PERTURBATION * region_size);
                solve_node(p, rhs, moved, cache, cfg)?
            }
            other => other?,
        };
        max_residual = max_residual.max(residual);
        solutions.push(solution);
    }
    Ok(SolvedNodes {
        solutions,
        max_residual,
    })
}

/// Reduced solutions sharing one basis, with their weights.
type BasisGroup<'a> = (&'a Arc<KrylovBasis>, Vec<(C64, &'a [C64])>);

/// `-(1/2πi) Σ w_j x_j`, grouping reduced solutions by basis so each basis
/// contributes a single `V (Σ w_j y_j)` product. Groups are summed in order
/// of first appearance.
fn combine(
    n: usize,
    solutions: &[NodeSolution],
    weights: impl IntoIterator<Item = (usize, C64)>,
) -> Result<Vec<C64>> {
    let mut groups: Vec<BasisGroup> = Vec::new();
    let mut out = vec![ZERO; n];
    for (idx, w) in weights {
        match &solutions[idx] {
            NodeSolution::Full(x) => axpy(w, x, &mut out),
            NodeSolution::Reduced { basis, y } => {
                match groups.iter_mut().find(|(b, _)| Arc::ptr_eq(b, basis)) {
                    Some((_, pairs)) => pairs.push((w, y.as_slice())),
                    None => groups.push((basis, vec![(w, y.as_slice())])),
                }
            }
        }
    }
    for (basis, pairs) in groups {
        let part = basis.accumulate_reduced(pairs)?;
        axpy(C64::new(1.0, 0.0), &part, &mut out);
    }
    // -1/(2πi) = i/(2π)
    let scale = C64::new(0.0, 1.0 / (2.0 * PI));
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(out)
}

/// Projects `rhs` with the given rule.
pub fn project_vector(
    p: &Pencil,
    rhs: &[C64],
    c: &Contour,
    cache: &ShiftCache,
    cfg: &Config,
) -> Result<ProjectionResult> {
    if rhs.len() != p.dim() {
        return Err(Error::dim(format!(
            "probe of length {} for pencil of dimension {}",
            rhs.len(),
            p.dim()
        )));
    }
    let solved = solve_nodes(p, rhs, c, cache, cfg)?;
    let vector = combine(p.dim(), &solved.solutions, c.weights.iter().copied().enumerate())?;
    Ok(ProjectionResult {
        vector,
        n_nodes: c.len(),
        max_node_residual: solved.max_residual,
    })
}

pub fn project(
    p: &Pencil,
    f: &ProbeVector,
    c: &Contour,
    cache: &ShiftCache,
    cfg: &Config,
) -> Result<ProjectionResult> {
    project_vector(p, f.values(), c, cache, cfg)
}

/// Projections with `n` and `2n` nodes from one set of `2n` node solves.
pub fn nested_projections(
    p: &Pencil,
    rhs: &[C64],
    r: &Region,
    n: usize,
    cache: &ShiftCache,
    cfg: &Config,
) -> Result<(ProjectionResult, ProjectionResult)> {
    if rhs.len() != p.dim() {
        return Err(Error::dim(format!(
            "probe of length {} for pencil of dimension {}",
            rhs.len(),
            p.dim()
        )));
    }
    let fine = make_contour(r, 2 * n)?;
    let solved = solve_nodes(p, rhs, &fine, cache, cfg)?;
    let fine_vec = combine(p.dim(), &solved.solutions, fine.weights.iter().copied().enumerate())?;
    // even-indexed nodes of the 2n rule are the n rule with doubled weights
    let coarse_weights = fine
        .weights
        .iter()
        .enumerate()
        .step_by(2)
        .map(|(i, w)| (i, w * 2.0));
    let coarse_vec = combine(p.dim(), &solved.solutions, coarse_weights)?;
    Ok((
        ProjectionResult {
            vector: coarse_vec,
            n_nodes: n,
            max_node_residual: solved.max_residual,
        },
        ProjectionResult {
            vector: fine_vec,
            n_nodes: 2 * n,
            max_node_residual: solved.max_residual,
        },
    ))
}

/// `δ_S = |Pf|_{2n₀}| / |Pf|_{n₀}|`; admissible when above `cfg.delta0`.
pub fn indicator(
    p: &Pencil,
    f: &ProbeVector,
    r: &Region,
    cache: &ShiftCache,
    cfg: &Config,
) -> Result<Indicator> {
    if cfg.n0 < 2 {
        return Err(Error::Config("n0 must be at least 2".to_string()));
    }
    let (coarse, fine) = nested_projections(p, f.values(), r, cfg.n0, cache, cfg)?;
    Ok(ratio_indicator(norm2(&coarse.vector), norm2(&fine.vector), cfg.delta0))
}

pub fn ratio_indicator(coarse_norm: f64, fine_norm: f64, delta0: f64) -> Indicator {
    let value = if coarse_norm > UNDERFLOW_FLOOR {
        fine_norm / coarse_norm
    } else {
        0.0
    };
    Indicator {
        value,
        coarse_norm,
        fine_norm,
        admissible: value > delta0,
    }
}

/// Outcome of testing a region with the nested indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Screening {
    pub indicator: Indicator,
    /// `|Pf|_{4n₀}| / |Pf|_{2n₀}|`, computed only when `indicator` rejects
    /// and `cfg.confirm_rejections` is set.
    pub confirmation: Option<f64>,
    pub admissible: bool,
}

/// Nested indicator, with a rejection double-checked one doubling further.
///
/// A small `δ_S` means either that `Pf` is negligible or that the `n₀`-point
/// rule has not converged yet, e.g. when the enclosed eigenvalue has a tiny
/// probe component and eigenvalues just outside the circle alias into the
/// coarse sum. The second ratio reuses the `2n₀` solves, which are the even
/// nodes of the `4n₀` rule.
pub fn screen(
    p: &Pencil,
    f: &ProbeVector,
    r: &Region,
    cache: &ShiftCache,
    cfg: &Config,
) -> Result<Screening> {
    if cfg.n0 < 2 {
        return Err(Error::Config("n0 must be at least 2".to_string()));
    }
    let n = cfg.n0;
    let rule = make_contour(r, 4 * n)?;
    let even = solve_some_nodes(p, f.values(), &rule, (0..4 * n).step_by(2), cache, cfg)?;
    // node 2k of the 4n rule is node k of the 2n rule (weight x2) and node k/2
    // of the n rule (weight x4)
    let fine = combine(
        p.dim(),
        &even.solutions,
        (0..2 * n).map(|k| (k, rule.weights[2 * k] * 2.0)),
    )?;
    let coarse = combine(
        p.dim(),
        &even.solutions,
        (0..n).map(|k| (2 * k, rule.weights[4 * k] * 4.0)),
    )?;
    let (fine_norm, coarse_norm) = (norm2(&fine), norm2(&coarse));
    let ind = ratio_indicator(coarse_norm, fine_norm, cfg.delta0);
    if ind.admissible || !cfg.confirm_rejections || !(fine_norm > UNDERFLOW_FLOOR) {
        return Ok(Screening {
            indicator: ind,
            confirmation: None,
            admissible: ind.admissible,
        });
    }
    let odd = solve_some_nodes(p, f.values(), &rule, (1..4 * n).step_by(2), cache, cfg)?;
    let mut all = Vec::with_capacity(4 * n);
    for (e, o) in even.solutions.into_iter().zip(odd.solutions) {
        all.push(e);
        all.push(o);
    }
    let finest = combine(p.dim(), &all, rule.weights.iter().copied().enumerate())?;
    let ratio = norm2(&finest) / fine_norm;
    Ok(Screening {
        indicator: ind,
        confirmation: Some(ratio),
        admissible: ratio > cfg.delta0,
    })
}

/// `|P (Pf / |Pf|)|` at `2 n₀` nodes; admissible above 0.1.
///
/// The second projection has a different right-hand side, so it runs on a
/// sibling cache that shares factorizations but builds its own bases.
pub fn legacy_indicator(
    p: &Pencil,
    f: &ProbeVector,
    r: &Region,
    cache: &ShiftCache,
    cfg: &Config,
) -> Result<Indicator> {
    if cfg.n0 < 2 {
        return Err(Error::Config("n0 must be at least 2".to_string()));
    }
    let contour = make_contour(r, 2 * cfg.n0)?;
    let first = project(p, f, &contour, cache, cfg)?;
    let first_norm = norm2(&first.vector);
    if !(first_norm > UNDERFLOW_FLOOR) {
        return Ok(Indicator {
            value: 0.0,
            coarse_norm: first_norm,
            fine_norm: 0.0,
            admissible: false,
        });
    }
    let normalized: Vec<C64> = first.vector.iter().map(|v| v / first_norm).collect();
    let second_cache = cache.sibling();
    let second = project_vector(p, &normalized, &contour, &second_cache, cfg)?;
    let value = norm2(&second.vector);
    Ok(Indicator {
        value,
        coarse_norm: first_norm,
        fine_norm: value,
        admissible: value > LEGACY_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::{make_pencil, random_probe};
    use crate::sparse::SparseMatrix;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag(d: &[C64]) -> Pencil {
        make_pencil(SparseMatrix::from_diagonal(d), None).unwrap()
    }

    fn two_by_two() -> (Pencil, ProbeVector) {
        let p = diag(&[c(2.0, 0.0), c(5.0, 0.0)]);
        let f = ProbeVector::from_values(vec![c(FRAC_1_SQRT_2, 0.0); 2], 0);
        (p, f)
    }

    fn cfg() -> Config {
        Config {
            m: 2,
            ..Config::default()
        }
    }

    #[test]
    fn projects_onto_enclosed_eigenvector() {
        let (p, f) = two_by_two();
        let contour = Contour::circle(c(2.0, 0.0), 0.7, 16).unwrap();
        let cache = ShiftCache::new(64);
        let out = project(&p, &f, &contour, &cache, &cfg()).unwrap();
        assert!((out.vector[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-6);
        assert!(out.vector[1].norm() < 1e-6);
        assert!(out.max_node_residual <= cfg().eps);
        assert_eq!(out.n_nodes, 16);
    }

    #[test]
    fn empty_contour_projects_to_nearly_zero() {
        let (p, f) = two_by_two();
        let contour = Contour::circle(c(10.0, 0.0), 0.5, 16).unwrap();
        let cache = ShiftCache::new(64);
        let out = project(&p, &f, &contour, &cache, &cfg()).unwrap();
        assert!(norm2(&out.vector) < 1e-4);
    }

    #[test]
    fn zero_probe_projects_to_zero() {
        let (p, _) = two_by_two();
        let f = ProbeVector::from_values(vec![ZERO; 2], 0);
        let contour = Contour::circle(c(2.0, 0.0), 0.7, 8).unwrap();
        let out = project(&p, &f, &contour, &ShiftCache::new(16), &cfg()).unwrap();
        assert!(out.vector.iter().all(|v| *v == ZERO));
        let ind = indicator(&p, &f, &Region::new(c(2.0, 0.0), 0.5), &ShiftCache::new(16), &cfg())
            .unwrap();
        assert_eq!(ind.value, 0.0);
        assert!(!ind.admissible);
    }

    #[test]
    fn probe_length_checked() {
        let (p, _) = two_by_two();
        let f = ProbeVector::from_values(vec![ZERO; 3], 0);
        let contour = Contour::circle(c(2.0, 0.0), 0.7, 8).unwrap();
        assert!(matches!(
            project(&p, &f, &contour, &ShiftCache::new(16), &cfg()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn underflow_gives_zero_indicator() {
        let ind = ratio_indicator(1e-320, 1e-321, 0.2);
        assert_eq!(ind.value, 0.0);
        assert!(!ind.admissible);
        let ind = ratio_indicator(0.5, 0.45, 0.2);
        assert!((ind.value - 0.9).abs() < 1e-15 && ind.admissible);
    }

    #[test]
    fn indicator_separates_populated_and_empty() {
        let spectrum: Vec<C64> = (0..30).map(|i| c(1.0 + i as f64 * 0.5, 0.1 * i as f64)).collect();
        let p = diag(&spectrum);
        let f = random_probe(30, 3).unwrap();
        let cache = ShiftCache::new(64);
        let config = Config { m: 20, ..Config::default() };
        let full = indicator(&p, &f, &Region::new(c(3.0, 0.4), 0.1), &cache, &config).unwrap();
        assert!(full.value > 0.9 && full.admissible, "{full:?}");
        let empty = indicator(&p, &f, &Region::new(c(3.25, -1.0), 0.1), &cache, &config).unwrap();
        assert!(empty.value < 0.1 && !empty.admissible, "{empty:?}");
    }

    #[test]
    fn direct_mode_matches_krylov_mode() {
        let spectrum: Vec<C64> = (0..20).map(|i| c(i as f64, (i % 3) as f64 - 1.0)).collect();
        let p = diag(&spectrum);
        let f = random_probe(20, 9).unwrap();
        let contour = Contour::circle(c(4.2, 0.1), 1.1, 16).unwrap();
        let krylov_cfg = Config { m: 20, ..Config::default() };
        let direct_cfg = Config { krylov_reuse: false, ..krylov_cfg.clone() };
        let a = project(&p, &f, &contour, &ShiftCache::new(64), &krylov_cfg).unwrap();
        let cache = ShiftCache::new(64);
        let b = project(&p, &f, &contour, &cache, &direct_cfg).unwrap();
        assert!(norm2(&crate::linalg::sub(&a.vector, &b.vector)) < 1e-9);
        let snap = cache.counters().snapshot();
        assert_eq!((snap.factorizations, snap.node_solves), (16, 16));
    }

    #[test]
    fn legacy_indicator_behaviour() {
        let spectrum: Vec<C64> = (0..30).map(|i| c(1.0 + i as f64 * 0.5, 0.1 * i as f64)).collect();
        let p = diag(&spectrum);
        let f = random_probe(30, 4).unwrap();
        let cache = ShiftCache::new(128);
        let config = Config { m: 20, ..Config::default() };
        let full = legacy_indicator(&p, &f, &Region::new(c(3.0, 0.4), 0.1), &cache, &config).unwrap();
        assert!((full.value - 1.0).abs() < 1e-3 && full.admissible, "{full:?}");
        let empty =
            legacy_indicator(&p, &f, &Region::new(c(3.25, -1.0), 0.1), &cache, &config).unwrap();
        assert!(empty.value < 0.01 && !empty.admissible, "{empty:?}");
    }
}
