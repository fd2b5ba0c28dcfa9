use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use strip_pressure::lattice::candidate_boundary_rows;
use strip_pressure::model_file::parse_word_str;
use strip_pressure::pressure::{check, compute_strip, prepare_with, StripDetail};
use strip_pressure::transfer::SUMMATION_MODE;
use strip_pressure::{
    entropy_run, load_model, run_pressure, ColumnBudget, Error, Model, PeriodicRow, PerronOptions,
    RunConfig, StripMethod, P_C_RIGOROUS,
};

#[derive(Parser)]
#[command(
    name = "strip-pressure",
    version,
    about = "Pressure of nearest-neighbor Z^2 shifts from strip transfer matrices",
    after_help = "MODEL is a model file path or a built-in such as \"hard_square\", \
                  \"hard_core a=0.5\", \"ising beta=0.02 h=0\", \"checkerboard k=4\", \"zero k=2\".\n\
                  Exit codes: 0 success, 2 gate failed, 3 numerical failure, 4 input or parse error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the applicability gate.
    Check {
        model: String,
        /// Percolation threshold bound; values above 0.556 are not rigorous.
        #[arg(long, default_value_t = P_C_RIGOROUS)]
        pc: f64,
    },
    /// Sweep strip heights and estimate the pressure.
    Run(SweepArgs),
    /// Same sweep with the zero interaction: topological entropy.
    Entropy(SweepArgs),
    /// Perron data of a single strip.
    EigenReport {
        model: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        strip: StripArgs,
        /// Write the transfer matrix edge list (recoded method only).
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// List candidate periodic boundary rows.
    BoundaryRows {
        model: String,
        #[arg(long, default_value_t = 4)]
        max_period: usize,
        /// Rows verified above and below each candidate.
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Recoded,
    Cyclic,
}

impl From<Method> for StripMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Recoded => StripMethod::Recoded,
            Method::Cyclic => StripMethod::Cyclic,
        }
    }
}

#[derive(Args)]
struct StripArgs {
    /// Top boundary word, e.g. "0" or "1 2".
    #[arg(long)]
    t: Option<String>,
    /// Bottom boundary word.
    #[arg(long)]
    b: Option<String>,
    /// Block length; a multiple of both row periods.
    #[arg(long)]
    block: Option<usize>,
    #[arg(long, value_enum, default_value_t = Method::Recoded)]
    method: Method,
    /// Relative width of the eigenvalue enclosure.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    max_columns: Option<usize>,
    #[arg(long)]
    max_edges: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    model: String,
    #[arg(long)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    #[command(flatten)]
    strip: StripArgs,
    /// Run even if the applicability gate fails.
    #[arg(long)]
    force: bool,
    #[arg(long, default_value_t = P_C_RIGOROUS)]
    pc: f64,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Resume from, and update, this file.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

fn row(
    model: &Model,
    word: Option<&str>,
    default: Option<&PeriodicRow>,
    which: &str,
) -> anyhow::Result<PeriodicRow> {
    match word {
        Some(w) => Ok(PeriodicRow::new(parse_word_str(model.sft.alphabet(), w)?)?),
        None => match default {
            Some(r) => Ok(r.clone()),
            None => Err(Error::Input(format!(
                "model has no default {which} row; pass --{}",
                &which[..1]
            ))
            .into()),
        },
    }
}

fn budget(args: &StripArgs) -> ColumnBudget {
    let mut b = ColumnBudget::default();
    if let Some(c) = args.max_columns {
        b.max_columns = c;
    }
    if let Some(e) = args.max_edges {
        b.max_edges = e;
    }
    b
}

fn banner(pc: f64) {
    if pc > P_C_RIGOROUS {
        println!("*** NON-RIGOROUS: p_c bound {pc} is a simulation estimate, above the proven {P_C_RIGOROUS} ***");
    }
}

fn sweep(args: SweepArgs, entropy: bool) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let top = row(&model, args.strip.t.as_deref(), model.top.as_ref(), "top")?;
    let bottom = row(
        &model,
        args.strip.b.as_deref(),
        model.bottom.as_ref(),
        "bottom",
    )?;
    let mut cfg = RunConfig::with_rows(model, top, bottom, args.n_min, args.n_max);
    cfg.period = args.strip.block;
    cfg.rel_tol = args.strip.tol;
    cfg.p_c_bound = args.pc;
    cfg.force = args.force;
    cfg.budget = budget(&args.strip);
    cfg.checkpoint = args.checkpoint;
    cfg.method = args.strip.method.into();

    banner(args.pc);
    let run = if entropy {
        entropy_run(&cfg)?
    } else {
        run_pressure(&cfg)?
    };
    print!("{}", run.gate.render());
    print!("{}", run.render());
    if let Some(out) = &args.out {
        run.save_csv(out)
            .with_context(|| format!("writing {}", out.display()))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn eigen_report(
    model: &str,
    n: usize,
    args: StripArgs,
    dump: Option<PathBuf>,
) -> anyhow::Result<()> {
    let model = load_model(model)?;
    let t = row(&model, args.t.as_deref(), model.top.as_ref(), "top")?;
    let b = row(&model, args.b.as_deref(), model.bottom.as_ref(), "bottom")?;
    let mut cfg = RunConfig::with_rows(model.clone(), t.clone(), b.clone(), 1, 2);
    cfg.period = args.block;
    let p = cfg.block_length()?;
    let method: StripMethod = args.method.into();
    if dump.is_some() && method == StripMethod::Cyclic && p > 1 {
        bail!(Error::Input("--dump needs the recoded method".into()));
    }
    let prep = prepare_with(&model, &t, &b, p, method)?;
    let out = compute_strip(&prep, n, &PerronOptions::with_tol(args.tol), &budget(&args))?;
    let pd = out.perron();
    println!("model: {}", model.name);
    println!("n = {n}, block length p = {p} ({})", prep.method.label());
    println!(
        "columns: {} raw, {} after trimming",
        out.raw_columns, out.columns
    );
    println!("edges: {}", out.edges);
    println!(
        "lambda in [{:.15e}, {:.15e}]",
        pd.lambda_lo(),
        pd.lambda_hi()
    );
    println!(
        "log lambda = {:.15e} (relative width {:.3e})",
        pd.log_lambda(),
        pd.relative_width()
    );
    println!("iterations: {}", pd.iterations);
    println!("eigenvector residual: {:.3e}", pd.residual);
    println!("entropy per block: {:.15e}", out.entropy());
    println!("expected energy per block: {:.15e}", out.expected_phi());
    println!("identity residual: {:.3e}", out.identity_residual());
    println!("summation: {SUMMATION_MODE}");
    if let (Some(path), StripDetail::Recoded { transfer, .. }) = (dump, &out.detail) {
        fs::write(&path, transfer.dump()).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn real_main(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Check { model, pc } => {
            let m = load_model(&model)?;
            banner(pc);
            let report = check(&m, pc)?;
            println!("model: {}", m.name);
            print!("{}", report.render());
            if !report.passes {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Run(args) => sweep(args, false)?,
        Command::Entropy(args) => sweep(args, true)?,
        Command::EigenReport {
            model,
            n,
            strip,
            dump,
        } => eigen_report(&model, n, strip, dump)?,
        Command::BoundaryRows {
            model,
            max_period,
            depth,
        } => {
            let m = load_model(&model)?;
            let names = m.sft.alphabet();
            for c in candidate_boundary_rows(&m.sft, max_period, depth)? {
                let word: Vec<&str> = c.row.word().iter().map(|&s| names.name(s)).collect();
                println!(
                    "{} (period {}, depth {})",
                    word.join(" "),
                    c.row.period(),
                    c.verified_depth
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(1, Error::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
