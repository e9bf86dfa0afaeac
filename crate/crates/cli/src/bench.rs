use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use flowdec_core::oracle::{self, search_space_bound, SEARCH_LIMIT};
use flowdec_core::scenario::{generate, ScenarioParams};
use flowdec_core::{total_reward, Instance};

use crate::{positive, PlannerArg};

#[derive(Args)]
pub struct BenchArgs {
    /// Grid size as ROWSxCOLS, or N for a square grid
    #[arg(long, value_parser = parse_grid)]
    grid: (usize, usize),
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive)]
    horizons: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive)]
    fleets: Vec<usize>,
    #[arg(long, value_parser = positive)]
    fleet_size: usize,
    /// Objects per reward type
    #[arg(long, default_value_t = 3, value_parser = positive)]
    objects: usize,
    #[arg(long, default_value_t = 1, value_parser = positive)]
    repeats: usize,
    /// Repeat r of every cell uses seed + r
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "flowdec")]
    algorithms: Vec<PlannerArg>,
    /// Also run the exact solver where its search-space bound allows
    #[arg(long)]
    with_oracle: bool,
    /// Run cells concurrently; timings are then marked unreliable
    #[arg(long)]
    parallel: bool,
    /// CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| match t.trim().parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("invalid grid dimension {t:?}")),
    };
    match s.split_once(['x', 'X']) {
        Some((r, c)) => Ok((parse(r)?, parse(c)?)),
        None => parse(s).map(|n| (n, n)),
    }
}

#[derive(Debug, Clone, Serialize)]
struct BenchmarkRow {
    #[serde(rename = "T")]
    horizon: usize,
    #[serde(rename = "F")]
    fleets: usize,
    a: usize,
    n: usize,
    repeat: usize,
    seed: u64,
    algorithm: &'static str,
    runtime_ms: f64,
    value: f64,
    oracle_value: Option<f64>,
    approx_ratio: Option<f64>,
    timing_reliable: bool,
}

struct Cell {
    params: ScenarioParams,
    repeat: usize,
}

fn run_cell(cell: &Cell, args: &BenchArgs, reliable: bool) -> anyhow::Result<Vec<BenchmarkRow>> {
    let p = &cell.params;
    let instance: Instance = generate(p).map_err(|e| anyhow!(e))?;
    let oracle_value = if args.with_oracle && search_space_bound(&instance) <= SEARCH_LIMIT {
        Some(oracle::exact_solve(&instance).map_err(|e| anyhow!(e))?.opt)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(args.algorithms.len());
    for alg in &args.algorithms {
        let planner = alg.planner();
        let started = Instant::now();
        let plan = planner
            .plan(&instance)
            .map_err(|e| anyhow!(e))
            .with_context(|| {
                format!(
                    "{} on T={} F={} seed={}",
                    planner.name(),
                    p.horizon,
                    p.fleets,
                    p.seed
                )
            })?;
        let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
        let value = total_reward(&plan, &instance).map_err(|e| anyhow!(e))?;
        let approx_ratio = oracle_value.map(|opt| if opt > 0.0 { value / opt } else { 1.0 });
        rows.push(BenchmarkRow {
            horizon: p.horizon,
            fleets: p.fleets,
            a: p.fleet_size,
            n: p.vertex_count(),
            repeat: cell.repeat,
            seed: p.seed,
            algorithm: planner.name(),
            runtime_ms,
            value,
            oracle_value,
            approx_ratio,
            timing_reliable: reliable,
        });
    }
    Ok(rows)
}

pub fn run(args: &BenchArgs) -> anyhow::Result<()> {
    let (rows, cols) = args.grid;
    let mut cells = Vec::new();
    for &t in &args.horizons {
        for &f in &args.fleets {
            for r in 0..args.repeats {
                let Some(seed) = args.seed.checked_add(r as u64) else {
                    bail!("seed {} + repeat {r} overflows", args.seed);
                };
                cells.push(Cell {
                    params: ScenarioParams {
                        rows,
                        cols,
                        horizon: t,
                        fleets: f,
                        fleet_size: args.fleet_size,
                        objects: args.objects,
                        seed,
                    },
                    repeat: r,
                });
            }
        }
    }

    let results: Vec<anyhow::Result<Vec<BenchmarkRow>>> = if args.parallel {
        cells.par_iter().map(|c| run_cell(c, args, false)).collect()
    } else {
        cells.iter().map(|c| run_cell(c, args, true)).collect()
    };

    let sink: Box<dyn std::io::Write> = match &args.out {
        Some(path) => Box::new(
            std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for result in results {
        for row in result? {
            w.serialize(row).context("writing CSV")?;
        }
    }
    w.flush().context("writing CSV")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("10x12"), Ok((10, 12)));
        assert_eq!(parse_grid("4"), Ok((4, 4)));
        assert_eq!(parse_grid("3X2"), Ok((3, 2)));
        assert!(parse_grid("0x3").is_err());
        assert!(parse_grid("ax3").is_err());
    }
}
