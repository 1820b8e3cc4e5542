use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use laminate::envelope::{dual_bound_s1, envelope_upper_s1, envelope_upper_ssym};
use laminate::norms::{schatten1, ssym};
use laminate::pipeline::{
    cell_laminates, load_field, relaxation_estimate, run_experiment, verify_counterexample,
    write_csv, ConvergenceTable, ExperimentConfig,
};
use laminate::{Matrix, Mode, NormKind, Result, SymMatrix};

#[derive(Parser)]
#[command(name = "laminate", version, about = "Laminate approximations of BV and BD fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build laminates for a field and print the convergence table as CSV.
    Run(RunArgs),
    /// Identity field on the unit square: Frobenius variation tends to 2, not √2.
    Counterexample {
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
        k: Vec<u32>,
        #[arg(long = "subdiv", default_value_t = 2)]
        subdivisions: usize,
    },
    /// Frobenius variation of the finest laminate against the Schatten target.
    Relax(RunArgs),
    /// Two-sided envelope bounds for a single matrix.
    Oracle {
        /// Rows separated by ';', entries by ',' (e.g. "1,0;0,-1").
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "bd")]
    mode: Mode,
    /// Builtin name or path to a JSON field file.
    #[arg(long, default_value = "identity2d")]
    field: String,
    #[arg(long = "subdiv", default_value_t = 4)]
    subdivisions: usize,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    k: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "frobenius,schatten1,ssym")]
    norms: Vec<NormKind>,
    /// Directory for convergence.csv and manifest.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "mc-samples", default_value_t = 100_000)]
    mc_samples: usize,
    /// Also write the per-cell laminates for every k as JSON into `--out`.
    #[arg(long, requires = "out")]
    laminates: bool,
}

impl RunArgs {
    fn config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(self.mode, &self.field);
        cfg.subdivisions = self.subdivisions;
        cfg.ks = self.k.clone();
        cfg.norms = self.norms.clone();
        cfg.out_dir = self.out.clone();
        cfg.seed = self.seed;
        cfg.mc_samples = self.mc_samples;
        cfg
    }
}

fn parse_matrix(s: &str) -> Result<Matrix> {
    let rows = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| laminate::Error::InvalidConfig(format!("bad entry '{x}': {e}")))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows)
}

fn write_laminates(cfg: &ExperimentConfig) -> Result<()> {
    let dir = cfg.out_dir.as_ref().expect("checked by clap");
    let loaded = load_field(cfg)?;
    for &k in &cfg.ks {
        let lams = cell_laminates(&loaded.field, cfg.mode, k)?;
        let f = std::fs::File::create(dir.join(format!("laminates_k{k}.json")))?;
        serde_json::to_writer(f, &lams)?;
    }
    Ok(())
}

fn print_table(table: &ConvergenceTable) -> Result<()> {
    eprintln!(
        "{} [{}]: {} cells, {} interior faces, target {:.12}",
        table.field, table.mode, table.mesh.cells, table.mesh.interior_faces, table.target
    );
    let sampled: usize = table.rows.iter().map(|r| r.sampled_faces).sum();
    if sampled > 0 {
        eprintln!("warning: {sampled} face integrals used sampling");
    }
    write_csv(std::io::stdout().lock(), table)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config();
            let table = run_experiment(&cfg)?;
            if args.laminates {
                write_laminates(&cfg)?;
            }
            print_table(&table)?;
        }
        Command::Relax(args) => {
            let report = relaxation_estimate(&args.config())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Counterexample { k, subdivisions } => {
            let report = verify_counterexample(&k, subdivisions)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.passed() {
                return Err(laminate::Error::InvalidConfig("counterexample checks failed".into()));
            }
        }
        Command::Oracle {
            matrix,
            samples,
            trials,
            seed,
        } => {
            let a = parse_matrix(&matrix)?;
            let (lower, dual) = dual_bound_s1(&a, samples, seed);
            let upper = envelope_upper_s1(&a, trials, seed.wrapping_add(1));
            let mut out = json!({
                "schatten1": schatten1(&a),
                "s1_lower": lower,
                "s1_upper": upper.upper,
                "s1_dual_witness": dual,
                "s1_random_best": upper.best_random,
                "s1_accepted": upper.accepted,
            });
            if a.is_square() && a.sub(&a.transpose()).frobenius_norm() <= 1e-12 * (1.0 + a.frobenius_norm()) {
                let s = SymMatrix::from_matrix(&a)?;
                let up = envelope_upper_ssym(&s, trials, seed.wrapping_add(2));
                out["ssym"] = json!(ssym(&s));
                out["ssym_upper"] = json!(up.upper);
                out["ssym_random_best"] = json!(up.best_random);
                out["ssym_accepted"] = json!(up.accepted);
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
