//! Generate a random instance and solve it with the default settings.
//!
//!     cargo run --release --example generate_and_solve -- 6 24 42

use lcqo::{residuals, solve, synthesize_instance, SolverConfig};

fn main() -> lcqo::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let m = args.first().copied().unwrap_or(5);
    let n = args.get(1).copied().unwrap_or(20);
    let seed = args.get(2).copied().unwrap_or(1) as u64;

    let (problem, start) = synthesize_instance(m, n, 0.5, seed)?;
    let config = SolverConfig::default();
    let (centering, result) = solve(&problem, &start, &config)?;

    println!("instance    m = {m}, n = {n}, seed = {seed}");
    println!("theta       {:.4e} (max {:.4e})", result.theta, result.theta_max);
    println!("status      {:?} after {} iterations ({} centering)", result.status, result.iterations(), centering.steps());
    println!("objective   {:.10}", problem.objective(&result.point.x));
    println!("gap         {:.3e} (target {:.1e})", result.point.gap(), n as f64 * config.eps);
    let (rp, rd) = residuals(&problem, &result.point)?;
    println!("residuals   primal {:.2e}, dual {:.2e}", rp.amax(), rd.amax());

    println!("\n{:>6} {:>12} {:>12} {:>12}", "k", "mu", "dist/mu", "||r||/||rc||");
    let stride = (result.trace.len() / 10).max(1);
    for t in result.trace.iter().step_by(stride) {
        println!(
            "{:>6} {:>12.4e} {:>12.4e} {:>12.4e}",
            t.k,
            t.mu,
            t.neighborhood_distance / t.mu,
            t.r_norm / t.rc_norm
        );
    }
    Ok(())
}
