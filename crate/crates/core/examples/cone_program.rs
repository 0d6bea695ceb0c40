//! The interior-point solver on its own: minimize `c^T x` subject to
//! `G x + s = h` with `s` in a product of nonnegative orthants and
//! second-order cones.
//!
//! ```text
//! cargo run --example cone_program
//! ```

use nalgebra::DMatrix;
use relp::conic::cones::Cone;
use relp::conic::{ipm, ConeProgram, IpmSettings};

fn main() -> relp::Result<()> {
    // Closest point to (3, 1) with x >= 0, y >= 0 and x + y <= 2, via
    // minimize t subject to ||(x - 3, y - 1)|| <= t.
    let g = DMatrix::from_row_slice(
        6,
        3,
        &[
            -1.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, //
            1.0, 1.0, 0.0, //
            0.0, 0.0, -1.0, //
            -1.0, 0.0, 0.0, //
            0.0, -1.0, 0.0,
        ],
    );
    let prog = ConeProgram {
        c: vec![0.0, 0.0, 1.0],
        g,
        h: vec![0.0, 0.0, 2.0, 0.0, -3.0, -1.0],
        cones: vec![Cone::NonNeg(3), Cone::Soc(3)],
    };
    let sol = ipm::solve(&prog, &IpmSettings::default())?;
    println!("status {:?} after {} iterations", sol.status, sol.iterations);
    println!("x = {:.6}, y = {:.6}, distance {:.6} (expected 2, 0, sqrt 2)", sol.x[0], sol.x[1], sol.x[2]);
    println!("gap {:.1e}, residuals {:.1e} / {:.1e}", sol.gap, sol.primal_residual, sol.dual_residual);
    Ok(())
}
