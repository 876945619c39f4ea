//! Writes the per-iteration trace as JSON lines and reads it back.

use lcqo::driver::{read_trace_jsonl, write_trace_jsonl};
use lcqo::{run_ifqipm, synthesize_instance, BackendKind, SolverConfig};

fn main() -> lcqo::Result<()> {
    let (problem, start) = synthesize_instance(3, 10, 0.5, 2)?;
    let config = SolverConfig::default().with_backend(BackendKind::Noisy);
    let result = run_ifqipm(&problem, &start, &config)?;

    let path = std::env::temp_dir().join("lcqo_trace.jsonl");
    write_trace_jsonl(&path, &result.trace)?;
    let back = read_trace_jsonl(&path)?;
    println!("{} rows written to {}", back.len(), path.display());
    let first = std::fs::read_to_string(&path).map_err(|e| lcqo::Error::Io { path: path.clone(), source: e })?;
    println!("first row: {}", first.lines().next().unwrap_or(""));
    Ok(())
}
