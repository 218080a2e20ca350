use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use cliffopt::db::files::{verify_files, write_database, DbHandle};
use cliffopt::db::linear::{advantage_scan, gl_bfs, render_matrix};
use cliffopt::db::stats::verify_counts;
use cliffopt::db::{augment, bfs_generate, Database, DbError};
use cliffopt::design::{optimize_design, LpMode};
use cliffopt::reduce::reduce_full;
use cliffopt::sym::tableau::{group_order, random_clifford, Tableau};
use cliffopt::synth;

/// Optimal-CNOT-count Clifford circuit databases: generation, verification,
/// synthesis, statistics, advantage scanning and 2-design optimization.
#[derive(Parser)]
#[command(name = "cliffopt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Qubit count (2..=5; 6 needs --allow-n6).
    #[arg(long)]
    qubits: u8,
    /// Database directory.
    #[arg(long, default_value = "db")]
    db: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct InputSel {
    /// Read the element from a tableau text file (2n lines of 2n '0'/'1').
    #[arg(long, conflicts_with = "random")]
    tableau: Option<PathBuf>,
    /// Use seeded random elements instead of a file.
    #[arg(long)]
    random: bool,
    /// Seed for --random.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of random elements.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Keep the bulk records on disk instead of loading them into RAM.
    #[arg(long)]
    file_backed: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, augment and write the database for one qubit count.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Permit the n=6 computation (terabytes, months).
        #[arg(long)]
        allow_n6: bool,
    },
    /// Check file checksums and the exact group-count identities.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Print per-cost class counts (and element counts with --elements).
    Stats {
        #[command(flatten)]
        common: Common,
        /// Also count group elements per cost via automorphism sizes.
        #[arg(long)]
        elements: bool,
    },
    /// CNOT cost of an element.
    Cost {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: InputSel,
    },
    /// Extract an optimal circuit.
    Synth {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: InputSel,
    },
    /// Minimum-average-cost 2-design over the class distribution.
    Design {
        #[command(flatten)]
        common: Common,
        /// Exact rational solve (default for n <= 3).
        #[arg(long, conflicts_with = "float")]
        exact: bool,
        /// Double-precision solve (default for n >= 4).
        #[arg(long)]
        float: bool,
    },
    /// Linear maps cheaper as Clifford circuits than as CNOT circuits.
    Advantage {
        #[command(flatten)]
        common: Common,
    },
    /// Mean reduction and synthesis latencies.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        file_backed: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type CmdResult = Result<(), Box<dyn std::error::Error>>;

fn open_handle(common: &Common, file_backed: bool) -> Result<DbHandle, DbError> {
    if file_backed {
        DbHandle::open_file_backed(&common.db, common.qubits)
    } else {
        DbHandle::open_ram(&common.db, common.qubits)
    }
}

fn load_inputs(n: u8, input: &InputSel) -> Result<Vec<Tableau>, Box<dyn std::error::Error>> {
    if let Some(path) = &input.tableau {
        let text = std::fs::read_to_string(path)?;
        let t: Tableau = text.parse()?;
        if t.n() != n {
            return Err(format!("tableau has {} qubits, expected {n}", t.n()).into());
        }
        if !t.is_symplectic() {
            return Err("input matrix is not symplectic".into());
        }
        Ok(vec![t])
    } else if input.random {
        Ok((0..input.count)
            .map(|i| random_clifford(n, 600, input.seed.wrapping_add(i as u64)))
            .collect())
    } else {
        Err("provide --tableau FILE or --random".into())
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Generate { common, allow_n6 } => {
            let t0 = Instant::now();
            let mut db = bfs_generate(common.qubits, common.threads, allow_n6)?;
            augment(&mut db, common.threads)?;
            let manifest = write_database(&db, &common.db)?;
            println!(
                "generated n={} k_max={} classes={} bytes={} in {:.2?}",
                common.qubits,
                db.k_max(),
                db.total_classes(),
                db.total_bytes(),
                t0.elapsed()
            );
            for k in 0..=db.k_max() {
                println!("shard {k}: {} records", manifest.counts[k]);
            }
            Ok(())
        }
        Command::Verify { common } => {
            verify_files(&common.db, common.qubits)?;
            println!("checksums ok");
            let db = load_db(&common)?;
            let report = verify_counts(&db, common.threads)?;
            for (k, count) in report.per_cost.iter().enumerate() {
                println!("|C_{}^{}| = {}", common.qubits, k, count);
            }
            println!(
                "total {} matches group order {}",
                report.total, report.group_order
            );
            let (avg, dec) = synth::average_cost(&report);
            println!("average cost {avg} = {dec:.6}");
            Ok(())
        }
        Command::Stats { common, elements } => {
            let db = load_db(&common)?;
            println!("cost  classes");
            for k in 0..=db.k_max() {
                println!("{k:>4}  {}", db.shard(k).len());
            }
            println!("total {} classes, {} bytes", db.total_classes(), db.total_bytes());
            if elements {
                let report = verify_counts(&db, common.threads)?;
                println!("cost  elements");
                for (k, count) in report.per_cost.iter().enumerate() {
                    println!("{k:>4}  {count}");
                }
                println!("group order {}", group_order(common.qubits));
                let (avg, dec) = synth::average_cost(&report);
                println!("average cost {avg} = {dec:.6}");
            }
            Ok(())
        }
        Command::Cost { common, input } => {
            let handle = open_handle(&common, input.file_backed)?;
            for t in load_inputs(common.qubits, &input)? {
                println!("{}", synth::cost(&t, &handle)?);
            }
            Ok(())
        }
        Command::Synth { common, input } => {
            let handle = open_handle(&common, input.file_backed)?;
            for t in load_inputs(common.qubits, &input)? {
                let circuit = synth::synthesize(&t, &handle)?;
                if circuit.replay() != t {
                    return Err("internal error: synthesized circuit fails replay".into());
                }
                println!("# cnot count {}", circuit.cnot_count());
                print!("{circuit}");
            }
            Ok(())
        }
        Command::Design { common, exact, float } => {
            let db = load_db(&common)?;
            let mode = if exact {
                LpMode::Exact
            } else if float {
                LpMode::Float
            } else if common.qubits <= 3 {
                LpMode::Exact
            } else {
                LpMode::Float
            };
            let handle = DbHandle::Ram(db.clone());
            let dist = optimize_design(&db, &handle, mode, common.threads, 10)?;
            print!("{}", render_design_json(&dist));
            Ok(())
        }
        Command::Advantage { common } => {
            let handle = open_handle(&common, false)?;
            let lin = gl_bfs(common.qubits);
            let hits = advantage_scan(&lin, &handle)?;
            println!(
                "# scanned {} invertible matrices, {} hits",
                lin.total(),
                hits.len()
            );
            for h in &hits {
                println!(
                    "# cnot-only cost {} vs clifford cost {}",
                    h.cnot_cost, h.clifford_cost
                );
                print!("{}", render_matrix(common.qubits, h.matrix_key));
                print!("{}", h.circuit);
                println!();
            }
            Ok(())
        }
        Command::Bench { common, count, seed, file_backed } => {
            let handle = open_handle(&common, file_backed)?;
            let n = common.qubits;
            let inputs: Vec<Tableau> =
                (0..count).map(|i| random_clifford(n, 600, seed + i as u64)).collect();
            let t0 = Instant::now();
            let mut perm_sets = 0usize;
            let mut combos = 0usize;
            for t in &inputs {
                let red = reduce_full(t);
                perm_sets += red.info.perm_candidates;
                combos += red.info.combo_product;
            }
            let reduce_elapsed = t0.elapsed();
            let t0 = Instant::now();
            for t in &inputs {
                let c = synth::synthesize(t, &handle)?;
                std::hint::black_box(&c);
            }
            let synth_elapsed = t0.elapsed();
            println!(
                "reduce_full: mean {:.3} us over {count} samples (mean |S| {:.3}, mean M {:.3})",
                reduce_elapsed.as_secs_f64() * 1e6 / count as f64,
                perm_sets as f64 / count as f64,
                combos as f64 / count as f64
            );
            println!(
                "synthesize:  mean {:.3} us over {count} samples",
                synth_elapsed.as_secs_f64() * 1e6 / count as f64
            );
            Ok(())
        }
    }
}

fn load_db(common: &Common) -> Result<Database, DbError> {
    cliffopt::db::files::load_ram(&common.db, common.qubits)
}

fn render_design_json(dist: &cliffopt::design::DesignDistribution) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    s.push_str(&format!("  \"qubits\": {},\n", dist.n));
    s.push_str(&format!(
        "  \"mode\": \"{}\",\n",
        match dist.mode {
            LpMode::Exact => "exact",
            LpMode::Float => "float",
        }
    ));
    match &dist.average_cost_exact {
        Some(r) => s.push_str(&format!("  \"average_cost\": \"{r}\",\n")),
        None => s.push_str("  \"average_cost\": null,\n"),
    }
    s.push_str(&format!("  \"average_cost_decimal\": {:.12},\n", dist.average_cost));
    match &dist.residual_exact {
        Some(r) => s.push_str(&format!("  \"max_mixing_residual\": \"{r}\",\n")),
        None => s.push_str("  \"max_mixing_residual\": null,\n"),
    }
    s.push_str(&format!("  \"max_mixing_residual_decimal\": {:e},\n", dist.residual));
    s.push_str("  \"entries\": [\n");
    for (i, e) in dist.entries.iter().enumerate() {
        s.push_str("    {\n");
        match &e.probability_exact {
            Some(r) => s.push_str(&format!("      \"probability\": \"{r}\",\n")),
            None => s.push_str("      \"probability\": null,\n"),
        }
        s.push_str(&format!("      \"probability_decimal\": {:.12},\n", e.probability));
        s.push_str(&format!("      \"cost\": {},\n", e.cost));
        let gates: Vec<String> = e
            .circuit
            .to_string()
            .lines()
            .map(|l| format!("\"{l}\""))
            .collect();
        s.push_str(&format!("      \"circuit\": [{}]\n", gates.join(", ")));
        s.push_str(if i + 1 == dist.entries.len() { "    }\n" } else { "    },\n" });
    }
    s.push_str("  ]\n}\n");
    s
}
