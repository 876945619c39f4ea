//! The null-space basis `V` in its two modes.

use lcqo::{build_null_basis, LcqoProblem};
use nalgebra::{DMatrix, DVector};

fn show(name: &str, a: DMatrix<f64>) -> lcqo::Result<()> {
    let (m, n) = a.shape();
    let problem = LcqoProblem::from_dense(a, DVector::from_element(m, 1.0), DVector::zeros(n), DMatrix::zeros(n, n))?;
    let basis = build_null_basis(&problem)?;
    let v = basis.to_dense();
    println!("{name}: mode {:?}", basis.mode());
    println!("  basic columns {:?}, nonbasic {:?}", basis.basis_columns(), basis.nonbasis_columns());
    println!("  ||A V||_max = {:.2e}", (problem.a() * &v).amax());
    print!("  V ={v:.3}");
    Ok(())
}

fn main() -> lcqo::Result<()> {
    // columns 3 and 1 are unit vectors, so no factorization is needed
    show(
        "identity block",
        DMatrix::from_row_slice(2, 4, &[2.0, 0.0, -1.0, 1.0, 1.0, 1.0, 3.0, 0.0]),
    )?;
    // no unit columns: V = [-B^{-1} N; I] up to column order
    show(
        "general",
        DMatrix::from_row_slice(2, 4, &[2.0, 1.0, 1.0, -1.0, 1.0, 3.0, 0.5, 2.0]),
    )?;
    Ok(())
}
