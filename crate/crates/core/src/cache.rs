//! Shared store of Arnoldi factorizations keyed by shift.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock, RwLock};

use crate::arnoldi::{build_basis_with, KrylovBasis};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::lu::{factorize_shift, ShiftedFactorization};
use crate::pencil::Pencil;

/// Maximum number of shift perturbations tried when a requested shift is an
/// eigenvalue.
pub const MAX_SHIFT_PERTURBATIONS: usize = 3;
pub const SHIFT_PERTURBATION: f64 = 1e-8;

/// Event counters shared by everything that solves against one pencil.
#[derive(Debug, Default)]
pub struct Counters {
    factorizations: AtomicUsize,
    bases: AtomicUsize,
    node_solves: AtomicUsize,
    regions: AtomicUsize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CounterSnapshot {
    pub factorizations: usize,
    pub bases: usize,
    pub node_solves: usize,
    pub regions: usize,
}

impl Counters {
    pub fn record_factorization(&self) {
        self.factorizations.fetch_add(1, Ordering::Relaxed);
    }

    pub fn record_node_solve(&self) {
        self.node_solves.fetch_add(1, Ordering::Relaxed);
    }

    pub fn record_region(&self) {
        self.regions.fetch_add(1, Ordering::Relaxed);
    }

    fn record_basis(&self) {
        self.bases.fetch_add(1, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            factorizations: self.factorizations.load(Ordering::Relaxed),
            bases: self.bases.load(Ordering::Relaxed),
            node_solves: self.node_solves.load(Ordering::Relaxed),
            regions: self.regions.load(Ordering::Relaxed),
        }
    }
}

/// Factorizations of `A - σB`, shared between caches that use different
/// right-hand sides.
#[derive(Debug, Default)]
struct FactorPool {
    entries: RwLock<Vec<Arc<ShiftedFactorization>>>,
}

impl FactorPool {
    fn get(&self, sigma: C64) -> Option<Arc<ShiftedFactorization>> {
        self.entries
            .read()
            .unwrap()
            .iter()
            .find(|f| f.sigma() == sigma)
            .cloned()
    }

    fn nearest(&self, z: C64) -> Option<C64> {
        self.entries
            .read()
            .unwrap()
            .iter()
            .map(|f| f.sigma())
            .min_by(|a, b| compare_distance(*a, *b, z))
    }

    fn insert(&self, f: Arc<ShiftedFactorization>) -> Arc<ShiftedFactorization> {
        let mut entries = self.entries.write().unwrap();
        if let Some(existing) = entries.iter().find(|e| e.sigma() == f.sigma()) {
            return existing.clone();
        }
        entries.push(f.clone());
        f
    }
}

/// Orders shifts by distance to `z`, ties by `(Re σ, Im σ)`.
fn compare_distance(a: C64, b: C64, z: C64) -> std::cmp::Ordering {
    (a - z)
        .norm()
        .total_cmp(&(b - z).norm())
        .then(a.re.total_cmp(&b.re))
        .then(a.im.total_cmp(&b.im))
}

#[derive(Debug)]
struct Entry {
    requested: C64,
    basis: Arc<KrylovBasis>,
}

/// Krylov bases for one right-hand side, at most `budget` of them.
///
/// Reads are concurrent; insertions are serialized and a racing duplicate
/// build loses to the basis already stored.
#[derive(Debug)]
pub struct ShiftCache {
    budget: usize,
    entries: RwLock<Vec<Entry>>,
    /// Right-hand side the bases were built for, fixed by first use.
    rhs: OnceLock<Vec<C64>>,
    pool: Arc<FactorPool>,
    counters: Arc<Counters>,
}

impl ShiftCache {
    pub fn new(budget: usize) -> Self {
        Self {
            budget,
            entries: RwLock::new(Vec::new()),
            rhs: OnceLock::new(),
            pool: Arc::new(FactorPool::default()),
            counters: Arc::new(Counters::default()),
        }
    }

    /// Empty cache for another right-hand side that reuses this cache's
    /// factorizations and counters.
    pub fn sibling(&self) -> Self {
        Self {
            budget: self.budget,
            entries: RwLock::new(Vec::new()),
            rhs: OnceLock::new(),
            pool: self.pool.clone(),
            counters: self.counters.clone(),
        }
    }

    /// Ties the cache to `rhs` on first use; later calls must pass the same
    /// vector.
    pub fn bind_rhs(&self, rhs: &[C64]) -> Result<()> {
        let bound = self.rhs.get_or_init(|| rhs.to_vec());
        if bound.as_ptr() == rhs.as_ptr() || bound.as_slice() == rhs {
            Ok(())
        } else {
            Err(Error::ForeignRhs)
        }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    pub fn shifts(&self) -> Vec<C64> {
        self.entries.read().unwrap().iter().map(|e| e.basis.sigma()).collect()
    }

    pub fn bases(&self) -> Vec<Arc<KrylovBasis>> {
        self.entries.read().unwrap().iter().map(|e| e.basis.clone()).collect()
    }

    /// Closest shift with a factorization already available, falling back to `z`.
    pub fn seed_shift(&self, z: C64) -> C64 {
        self.pool.nearest(z).unwrap_or(z)
    }

    /// The basis whose shift is nearest to `z`.
    pub fn select_basis(&self, z: C64) -> Result<Arc<KrylovBasis>> {
        self.entries
            .read()
            .unwrap()
            .iter()
            .min_by(|a, b| compare_distance(a.basis.sigma(), b.basis.sigma(), z))
            .map(|e| e.basis.clone())
            .ok_or(Error::CacheEmpty)
    }

    fn lookup(&self, sigma: C64) -> Option<Arc<KrylovBasis>> {
        self.entries
            .read()
            .unwrap()
            .iter()
            .find(|e| e.requested == sigma || e.basis.sigma() == sigma)
            .map(|e| e.basis.clone())
    }

    fn factorization(&self, p: &Pencil, sigma: C64) -> Result<Arc<ShiftedFactorization>> {
        if let Some(f) = self.pool.get(sigma) {
            return Ok(f);
        }
        let f = Arc::new(factorize_shift(p, sigma)?);
        self.counters.record_factorization();
        Ok(self.pool.insert(f))
    }

    /// Returns the basis at `sigma`, building it on a miss.
    ///
    /// A shift that turns out to be an eigenvalue is moved by
    /// `(1 + i)·1e-8·max(1, |σ|)` and retried up to three times.
    pub fn ensure_basis(
        &self,
        p: &Pencil,
        rhs: &[C64],
        sigma: C64,
        cfg: &Config,
    ) -> Result<Arc<KrylovBasis>> {
        self.bind_rhs(rhs)?;
        if let Some(b) = self.lookup(sigma) {
            return Ok(b);
        }
        if self.len() >= self.budget {
            return Err(Error::ShiftBudgetExceeded {
                budget: self.budget,
                region: None,
            });
        }
        let mut shift = sigma;
        let mut attempt = 0;
        let basis = loop {
            let built = self
                .factorization(p, shift)
                .and_then(|f| build_basis_with(p, f, rhs, cfg.m));
            match built {
                Ok(b) => break b,
                Err(Error::ShiftIsEigenvalue { .. }) if attempt < MAX_SHIFT_PERTURBATIONS => {
                    attempt += 1;
                    shift += C64::new(1.0, 1.0) * SHIFT_PERTURBATION * shift.norm().max(1.0);
                }
                Err(Error::ShiftIsEigenvalue { .. }) => {
                    return Err(Error::ShiftConstructionFailed { sigma })
                }
                Err(e) => return Err(e),
            }
        };
        self.counters.record_basis();

        let mut entries = self.entries.write().unwrap();
        if let Some(e) = entries.iter().find(|e| e.requested == sigma) {
            return Ok(e.basis.clone());
        }
        if entries.len() >= self.budget {
            return Err(Error::ShiftBudgetExceeded {
                budget: self.budget,
                region: None,
            });
        }
        let basis = Arc::new(basis);
        entries.push(Entry {
            requested: sigma,
            basis: basis.clone(),
        });
        Ok(basis)
    }
}
