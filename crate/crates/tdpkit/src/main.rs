use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tdpkit::cli::{self, JobCommand, JobSpec};

/// Exact verification, analysis and synthesis for tridiagonal pairs.
///
/// Exit codes: 0 when all checks passed or the requested object was
/// produced, 1 when checks ran and failed (the report says which), 2 on
/// input or usage errors. Reports go to stdout as JSON on exits 0 and 1.
#[derive(Parser)]
#[command(name = "tdpkit", version)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the four defining conditions on an operator pair
    Check(JobArgs),
    /// Extract the parameter array and classification conditions of a pair
    Params(JobArgs),
    /// Recognize eigenvalue sequences as q-Racah data
    QracahFit(JobArgs),
    /// Generate eigenvalue sequences from q-Racah parameters
    Generate(JobArgs),
    /// Build a split-basis candidate pair and verify it end to end
    Construct(JobArgs),
    /// Test scalar-action identities for polynomials in the split operators
    MuTest(JobArgs),
    /// Build a deterministic corpus of instance files with a manifest
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Input JSON file
    input: PathBuf,
    /// Scalar field when the input file omits one: "rational" or "gf:p"
    #[arg(long)]
    field: Option<String>,
    /// Seed for randomized subroutines; fixed so equal jobs give equal reports
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorpusArgs {
    /// Optional grid restriction file
    input: Option<PathBuf>,
    /// Seed recorded in the manifest and used by verification subroutines
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the instance files and manifest.json
    #[arg(long)]
    out: PathBuf,
    /// Refuse to build more than this many instances
    #[arg(long)]
    max_instances: Option<usize>,
}

fn job_spec(command: JobCommand, args: JobArgs) -> Result<JobSpec, String> {
    let field = args.field.as_deref().map(cli::parse_field_flag).transpose()?;
    Ok(JobSpec {
        command,
        input_path: Some(args.input),
        output_path: args.out,
        seed: args.seed,
        field,
        max_instances: None,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TDPKIT_LOG")).init();
    let parsed = CliArgs::parse();
    let spec = match parsed.command {
        Command::Check(a) => job_spec(JobCommand::Check, a),
        Command::Params(a) => job_spec(JobCommand::Params, a),
        Command::QracahFit(a) => job_spec(JobCommand::QracahFit, a),
        Command::Generate(a) => job_spec(JobCommand::Generate, a),
        Command::Construct(a) => job_spec(JobCommand::Construct, a),
        Command::MuTest(a) => job_spec(JobCommand::MuTest, a),
        Command::Corpus(a) => Ok(JobSpec {
            command: JobCommand::Corpus,
            input_path: a.input,
            output_path: Some(a.out),
            seed: a.seed,
            field: None,
            max_instances: a.max_instances,
        }),
    };
    let spec = match spec {
        Ok(spec) => spec,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match cli::run(&spec) {
        Ok(output) => {
            print!("{}", cli::render(&output.report));
            ExitCode::from(u8::try_from(output.exit_code).unwrap_or(1))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
