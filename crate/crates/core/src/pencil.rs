//! Matrix pencils `(A, B)` and random probe vectors.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::sparse::SparseMatrix;

/// The generalized eigenproblem `A x = λ B x`. `B` may be singular.
#[derive(Debug, Clone)]
pub struct Pencil {
    a: SparseMatrix,
    b: SparseMatrix,
}

impl Pencil {
    /// Validates dimensions. When `b` is `None` the pencil is the standard
    /// problem with `B = I`.
    pub fn new(a: SparseMatrix, b: Option<SparseMatrix>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dim(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let b = b.unwrap_or_else(|| SparseMatrix::identity(a.nrows()));
        if b.nrows() != a.nrows() || b.ncols() != a.ncols() {
            return Err(Error::dim(format!(
                "B is {}x{} but A is {}x{}",
                b.nrows(),
                b.ncols(),
                a.nrows(),
                a.ncols()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn b(&self) -> &SparseMatrix {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `A - z B` as a sparse matrix.
    pub fn shifted(&self, z: Complex64) -> SparseMatrix {
        self.a
            .add_scaled(-z, &self.b)
            .expect("pencil dimensions validated at construction")
    }
}

pub fn make_pencil(a: SparseMatrix, b: Option<SparseMatrix>) -> Result<Pencil> {
    Pencil::new(a, b)
}

/// Unit-norm random vector driving the spectral projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeVector {
    values: Vec<Complex64>,
    seed: u64,
}

impl ProbeVector {
    /// Wraps an arbitrary vector. The caller is responsible for the norm;
    /// `random_probe` is the normal way to get one.
    pub fn from_values(values: Vec<Complex64>, seed: u64) -> Self {
        Self { values, seed }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Complex standard-normal entries from a ChaCha8 stream seeded with `seed`,
/// normalized to unit Euclidean norm.
pub fn random_probe(n: usize, seed: u64) -> Result<ProbeVector> {
    if n == 0 {
        return Err(Error::dim("probe dimension must be at least 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<Complex64> = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    let norm = norm2(&values);
    values.iter_mut().for_each(|v| *v /= norm);
    Ok(ProbeVector { values, seed })
}
