//! Reads a pencil from Matrix Market files, or writes a small demo pencil to a
//! temporary directory and reads it back.
//!
//!     cargo run --example read_matrix_market -- [A.mtx [B.mtx]]

use rimc::mtx::{read_matrix_market_file, write_matrix_market_file};
use rimc::pencil::Pencil;
use rimc::sparse::SparseMatrix;
use rimc::Complex64 as C64;

fn main() -> rimc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (a_path, b_path) = if args.is_empty() {
        let dir = std::env::temp_dir().join(format!("rimc-demo-{}", std::process::id()));
        std::fs::create_dir_all(&dir)?;
        let a = SparseMatrix::from_triplets(
            3,
            3,
            [
                (0, 0, C64::new(1.0, 1.0)),
                (1, 1, C64::new(2.0, 0.0)),
                (2, 2, C64::new(3.0, -1.0)),
                (0, 2, C64::new(0.5, 0.0)),
            ],
        )?;
        let b = SparseMatrix::from_diagonal(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        write_matrix_market_file(dir.join("a.mtx"), &a)?;
        write_matrix_market_file(dir.join("b.mtx"), &b)?;
        println!("wrote demo pencil to {}", dir.display());
        (dir.join("a.mtx"), Some(dir.join("b.mtx")))
    } else {
        (args[0].clone().into(), args.get(1).map(Into::into))
    };

    let a = read_matrix_market_file(&a_path)?;
    let b = b_path.map(read_matrix_market_file).transpose()?;
    let pencil = Pencil::new(a, b)?;
    println!("dimension {}", pencil.dim());
    println!("nnz(A) = {}, nnz(B) = {}", pencil.a().nnz(), pencil.b().nnz());
    for (i, j, v) in pencil.a().triplets().take(10) {
        println!("A[{i},{j}] = {v}");
    }
    Ok(())
}
