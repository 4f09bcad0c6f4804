//! Factorizes `A - σB` once and reuses it for several right-hand sides.
//!
//!     cargo run --example shifted_solve

use rimc::linalg::{norm2, sub};
use rimc::lu::{factorize_shift, solve_node_direct};
use rimc::pencil::random_probe;
use rimc::synthetic::{synth_pencil, SyntheticSpec, Transform};
use rimc::Complex64 as C64;

fn main() -> rimc::Result<()> {
    let spec = SyntheticSpec {
        eigenvalues: (1..=40).map(|k| C64::new(k as f64, 0.1 * k as f64)).collect(),
        infinite_count: 10,
        transform: Transform::GivensSimilarity { seed: 3, rotations: 120 },
    };
    let p = synth_pencil(&spec);
    let sigma = C64::new(7.5, 0.3);
    let fact = factorize_shift(&p, sigma)?;
    println!(
        "n = {}, nnz(A) = {}, nnz(L+U) = {}, pivot ratio = {:.3e}",
        p.dim(),
        p.a().nnz(),
        fact.factor_nnz(),
        fact.pivot_ratio()
    );

    let shifted = p.shifted(sigma);
    for seed in 0..3 {
        let f = random_probe(p.dim(), seed)?;
        let x = fact.solve(f.values())?;
        let r = sub(&shifted.matvec(&x)?, f.values());
        println!("seed {seed}: |x| = {:.4e}, |(A - σB)x - f| = {:.2e}", norm2(&x), norm2(&r));
    }

    // a shift on the spectrum is refused
    match solve_node_direct(&p, C64::new(5.0, 0.5), random_probe(p.dim(), 0)?.values()) {
        Err(e) => println!("z = 5+0.5i: {e}"),
        Ok(_) => println!("z = 5+0.5i unexpectedly solvable"),
    }
    Ok(())
}
