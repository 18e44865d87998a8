use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::Failure;

/// Symmetric forms, majorization certificates, variational eigenvalue sums
/// and randomized concavity suites.
#[derive(Parser, Debug)]
#[command(name = "liebconc", version)]
struct Cli {
    /// Print progress and summaries to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate symmetric forms.
    #[command(subcommand)]
    Forms(FormsCmd),
    /// Majorization relations, bridges and certificates.
    #[command(subcommand)]
    Major(MajorCmd),
    /// Variational formulas for partial eigenvalue sums.
    #[command(subcommand)]
    Variational(VariationalCmd),
    /// Randomized concavity suites.
    #[command(subcommand)]
    Suite(SuiteCmd),
}

#[derive(Subcommand, Debug)]
enum FormsCmd {
    /// Print φ(x) for a vector or φ(λ(A)) for a Hermitian matrix.
    Eval {
        /// Form descriptor JSON, e.g. '{"kind":"KTrace","k":2}', or a path to one.
        #[arg(long)]
        form: String,
        /// Comma-separated vector.
        #[arg(
            long,
            conflicts_with = "matrix",
            required_unless_present = "matrix",
            allow_hyphen_values = true
        )]
        vector: Option<String>,
        /// Hermitian matrix JSON (inline or path).
        #[arg(long)]
        matrix: Option<String>,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    /// The vector expected to be majorized.
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// The majorizing vector.
    #[arg(long, allow_hyphen_values = true)]
    b: String,
}

#[derive(Subcommand, Debug)]
enum MajorCmd {
    /// Print the strongest relation a ≺ b (strong), a ≺_w b (weak) or none.
    Check(PairArgs),
    /// Print c with a ≤ c ≺ b; requires a ≺_w b.
    Bridge(PairArgs),
    /// Write a T-transform certificate of a ≺ b as JSON.
    Certify {
        #[command(flatten)]
        pair: PairArgs,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Args, Debug)]
struct MatrixArg {
    /// Hermitian matrix JSON (inline or path).
    #[arg(long, conflicts_with = "a_diag", required_unless_present = "a_diag")]
    a: Option<String>,
    /// Diagonal of A as a comma-separated vector.
    #[arg(long, allow_hyphen_values = true)]
    a_diag: Option<String>,
}

#[derive(Subcommand, Debug)]
enum VariationalCmd {
    /// Idempotent formula: Σ_{i≤k} λ↑_i(f(M*AM)) = inf tr f(M*G*AGM).
    F00 {
        #[command(flatten)]
        a: MatrixArg,
        /// Square matrix M (inline JSON or path); identity when omitted.
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        k: usize,
        /// Scalar function: identity, sqrt, square, pow:<r>, or JSON.
        #[arg(long, default_value = "identity")]
        f: String,
        /// Random idempotents to sample.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, env = "LIEBCONC_SEED", default_value_t = 42)]
        seed: u64,
        /// Relative tolerance of the contract checks.
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Shift formula: Σ_{i≤k} λ↑_i(f(A)) = inf_{rank H = n−k} tr f(H + A).
    Fni0 {
        #[command(flatten)]
        a: MatrixArg,
        #[arg(long)]
        k: usize,
        /// Scalar function, increasing and vanishing at −∞.
        #[arg(long, default_value = "exp")]
        f: String,
        /// Comma-separated increasing δ grid.
        #[arg(long, default_value = "1,2,5,10,20")]
        deltas: String,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct SuiteRunArgs {
    /// Map under test.
    #[arg(long, value_parser = ["lieb", "explog", "classic"])]
    map: Option<String>,
    /// Base configuration JSON (inline or path); flags override it.
    #[arg(long)]
    config: Option<String>,
    /// Number of trials [default: 1000].
    #[arg(long)]
    trials: Option<usize>,
    /// Suite seed [default: 42].
    #[arg(long, env = "LIEBCONC_SEED")]
    seed: Option<u64>,
    /// Deficit tolerance relative to scale [default: 1e-7].
    #[arg(long)]
    tolerance: Option<f64>,
    /// Forms as a JSON array of specs, e.g. '[{"random_k":"KTrace"},{"fixed":{"kind":"Trace"}}]'.
    #[arg(long)]
    forms: Option<String>,
    /// Inclusive range of the output dimension, "LO,HI".
    #[arg(long)]
    dims: Option<String>,
    /// Inclusive range of m (A's dimension, or explog argument count), "LO,HI".
    #[arg(long)]
    m_dims: Option<String>,
    /// Also run the p + q > 1 negative control (violations are expected).
    #[arg(long)]
    negative_control: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Leave the timestamp field null.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum SuiteCmd {
    /// Run a concavity suite and write its report.
    Run(SuiteRunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = cli.verbose;
    let result = match cli.command {
        Command::Forms(FormsCmd::Eval {
            form,
            vector,
            matrix,
        }) => commands::forms_eval(&form, vector, matrix),
        Command::Major(cmd) => match cmd {
            MajorCmd::Check(p) => commands::major_check(&p.a, &p.b),
            MajorCmd::Bridge(p) => commands::major_bridge(&p.a, &p.b),
            MajorCmd::Certify { pair, out } => {
                commands::major_certify(&pair.a, &pair.b, out.as_deref())
            }
        },
        Command::Variational(VariationalCmd::F00 {
            a,
            m,
            k,
            f,
            trials,
            seed,
            tolerance,
        }) => commands::variational_f00(
            &commands::MatrixSource {
                json: a.a,
                diag: a.a_diag,
            },
            m.as_deref(),
            k,
            &f,
            trials,
            seed,
            tolerance,
        ),
        Command::Variational(VariationalCmd::Fni0 {
            a,
            k,
            f,
            deltas,
            tolerance,
        }) => commands::variational_fni0(
            &commands::MatrixSource {
                json: a.a,
                diag: a.a_diag,
            },
            k,
            &f,
            &deltas,
            tolerance,
        ),
        Command::Suite(SuiteCmd::Run(args)) => commands::suite_run(
            commands::SuiteRequest {
                map: args.map,
                config: args.config,
                trials: args.trials,
                seed: args.seed,
                tolerance: args.tolerance,
                forms: args.forms,
                dims: args.dims,
                m_dims: args.m_dims,
                negative_control: args.negative_control,
                out: args.out,
                csv: args.format == Format::Csv,
                timestamp: !args.no_timestamp,
            },
            verbose,
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
