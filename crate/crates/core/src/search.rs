//! Recursive quadtree search for the eigenvalues inside a region.
//!
//! A region is tested with the spectral-projection indicator; admissible
//! regions are split into four quadrants until their size drops to `d0`,
//! at which point the center is reported. One probe vector and one shift
//! cache serve the whole recursion.

use std::sync::Mutex;

use serde::Serialize;

use crate::cache::{CounterSnapshot, ShiftCache};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::pencil::{random_probe, Pencil, ProbeVector};
use crate::projector::{legacy_indicator, screen, Screening};
use crate::region::{Bounds, Region};

/// Estimates within this many multiples of `d0` from the search boundary are flagged.
pub const BOUNDARY_BAND: f64 = 10.0;
/// Dedup tolerance in multiples of `d0`.
pub const DEDUP_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueEstimate {
    /// Center of the final box.
    pub value: C64,
    pub box_half_side: f64,
    pub indicator_value: f64,
    pub depth: usize,
    /// Within `10 d0` of the boundary of the search domain.
    pub boundary: bool,
}

/// One tested region, for plotting the search tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionRecord {
    pub re: f64,
    pub im: f64,
    pub half_side: f64,
    pub depth: usize,
    pub indicator: f64,
    /// Second ratio at `4 n0` nodes, when a rejection was double-checked.
    pub confirmation: Option<f64>,
    pub admissible: bool,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub estimates: Vec<EigenvalueEstimate>,
    pub counters: CounterSnapshot,
    pub regions: Vec<RegionRecord>,
    /// Shifts of the cached Krylov bases, in insertion order.
    pub shifts: Vec<C64>,
}

struct Search<'a> {
    pencil: &'a Pencil,
    probe: ProbeVector,
    cfg: &'a Config,
    cache: &'a ShiftCache,
    regions: Mutex<Vec<RegionRecord>>,
}

impl Search<'_> {
    fn test(&self, region: &Region) -> Result<Screening> {
        self.cache.counters().record_region();
        let ind = if self.cfg.legacy_indicator {
            legacy_indicator(self.pencil, &self.probe, region, self.cache, self.cfg).map(|i| {
                Screening {
                    indicator: i,
                    confirmation: None,
                    admissible: i.admissible,
                }
            })
        } else {
            screen(self.pencil, &self.probe, region, self.cache, self.cfg)
        };
        let ind = ind.map_err(|e| match e {
            Error::ShiftBudgetExceeded { budget, .. } => Error::ShiftBudgetExceeded {
                budget,
                region: Some(region.to_string()),
            },
            e => e,
        })?;
        self.regions.lock().unwrap().push(RegionRecord {
            re: region.center.re,
            im: region.center.im,
            half_side: region.half_side,
            depth: region.depth,
            indicator: ind.indicator.value,
            confirmation: ind.confirmation,
            admissible: ind.admissible,
        });
        Ok(ind)
    }

    fn recurse(&self, region: Region, parallel: bool) -> Result<Vec<EigenvalueEstimate>> {
        if region.depth > self.cfg.max_depth {
            return Err(Error::Internal(format!(
                "recursion exceeded max depth {} at region {region}",
                self.cfg.max_depth
            )));
        }
        let ind = self.test(&region)?;
        if !ind.admissible {
            return Ok(Vec::new());
        }
        if region.size() > self.cfg.d0 {
            let children = region.subdivide();
            let found: Vec<Result<Vec<EigenvalueEstimate>>> = if parallel {
                use rayon::prelude::*;
                children
                    .par_iter()
                    .map(|c| self.recurse(*c, parallel))
                    .collect()
            } else {
                children.iter().map(|c| self.recurse(*c, parallel)).collect()
            };
            let mut out = Vec::new();
            for r in found {
                out.extend(r?);
            }
            Ok(out)
        } else {
            Ok(vec![EigenvalueEstimate {
                value: region.center,
                box_half_side: region.half_side,
                indicator_value: ind.indicator.value,
                depth: region.depth,
                boundary: false,
            }])
        }
    }
}

/// Initial shifts: centers of a `g × g` grid over the region.
fn initial_shifts(root: &Region, g: usize) -> Vec<C64> {
    let mut shifts = Vec::with_capacity(g * g);
    for row in 0..g {
        for col in 0..g {
            let fx = (2 * col + 1) as f64 / g as f64 - 1.0;
            let fy = (2 * row + 1) as f64 / g as f64 - 1.0;
            shifts.push(root.center + C64::new(fx, fy) * root.half_side);
        }
    }
    shifts
}

/// Runs the search over a rectangle, using the enclosing square as the root.
///
/// Estimates farther than `d0` outside the rectangle are dropped; the rest
/// are deduplicated and sorted by real then imaginary part.
pub fn search(p: &Pencil, bounds: &Bounds, cfg: &Config) -> Result<SearchOutcome> {
    search_with_probe(p, bounds, cfg, random_probe(p.dim(), cfg.seed)?)
}

pub fn search_with_probe(
    p: &Pencil,
    bounds: &Bounds,
    cfg: &Config,
    probe: ProbeVector,
) -> Result<SearchOutcome> {
    search_in(p, bounds, cfg, probe, &ShiftCache::new(cfg.shift_budget))
}

/// Search using a caller-owned cache, which keeps its bases afterwards.
pub fn search_in(
    p: &Pencil,
    bounds: &Bounds,
    cfg: &Config,
    probe: ProbeVector,
    cache: &ShiftCache,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    let root = bounds.enclosing_square();
    if cfg.krylov_reuse {
        for sigma in initial_shifts(&root, cfg.initial_shift_grid) {
            cache.ensure_basis(p, probe.values(), sigma, cfg)?;
        }
    }
    let search = Search {
        pencil: p,
        probe,
        cfg,
        cache,
        regions: Mutex::new(Vec::new()),
    };
    let raw = if cfg.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        pool.install(|| search.recurse(root, true))?
    } else {
        search.recurse(root, false)?
    };

    let mut kept: Vec<EigenvalueEstimate> = raw
        .into_iter()
        .filter(|e| bounds.distance_outside(e.value) <= cfg.d0)
        .collect();
    for e in &mut kept {
        e.boundary = bounds.distance_to_boundary(e.value) <= BOUNDARY_BAND * cfg.d0;
    }
    let estimates = dedup(kept, DEDUP_FACTOR * cfg.d0);

    let mut regions = search.regions.into_inner().unwrap();
    regions.sort_by(|a, b| {
        a.depth
            .cmp(&b.depth)
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im))
    });
    Ok(SearchOutcome {
        estimates,
        counters: cache.counters().snapshot(),
        regions,
        shifts: cache.shifts(),
    })
}

/// All eigenvalues of the pencil inside the square `root`.
pub fn rim_c(p: &Pencil, root: &Region, cfg: &Config) -> Result<Vec<EigenvalueEstimate>> {
    Ok(search(p, &root.bounds(), cfg)?.estimates)
}

fn lexicographic(a: C64, b: C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Single-linkage clustering at distance `tol`; each cluster keeps its member
/// with the largest indicator (ties: smallest `(Re, Im)`). Output is sorted
/// by `(Re, Im)`.
pub fn dedup(estimates: Vec<EigenvalueEstimate>, tol: f64) -> Vec<EigenvalueEstimate> {
    let n = estimates.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (estimates[i].value - estimates[j].value).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut best: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        let better = match best[root] {
            None => true,
            Some(k) => {
                let (a, b) = (&estimates[i], &estimates[k]);
                a.indicator_value > b.indicator_value
                    || (a.indicator_value == b.indicator_value
                        && lexicographic(a.value, b.value).is_lt())
            }
        };
        if better {
            best[root] = Some(i);
        }
    }
    let mut out: Vec<EigenvalueEstimate> = best.into_iter().flatten().map(|i| estimates[i]).collect();
    out.sort_by(|a, b| lexicographic(a.value, b.value));
    out
}
