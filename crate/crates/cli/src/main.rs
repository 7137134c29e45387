mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use mk3_core::forms::{FamilyParams, Mk3Form};

#[derive(Debug, Parser)]
#[command(name = "mk3", version, about = "Arithmetic of Markoff-type K3 surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Exit with status 1 when the verdict is negative.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Args, Clone)]
#[group(required = true, multiple = false)]
struct FormArgs {
    /// Family parameters A,m,C,k of (x²−A²)(y²−A²)(z²−A²) − m(xyz+C)² − k.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "A,m,C,k")]
    family: Option<Vec<BigInt>>,

    /// Raw coefficients a,b,c,d,e.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "a,b,c,d,e")]
    coeffs: Option<Vec<BigInt>>,
}

/// The form a subcommand works on, remembering family parameters when given.
#[derive(Debug, Clone)]
pub struct FormInput {
    pub form: Mk3Form,
    pub family: Option<FamilyParams>,
}

impl FormArgs {
    fn resolve(&self) -> FormInput {
        match (&self.family, &self.coeffs) {
            (Some(f), _) => {
                let [a, m, c, k] = exact::<4>(f, "--family");
                let params = FamilyParams::new(a, m, c, k);
                FormInput { form: params.expand(), family: Some(params) }
            }
            (None, Some(c)) => {
                let [a, b, c, d, e] = exact::<5>(c, "--coeffs");
                FormInput { form: Mk3Form::new(a, b, c, d, e), family: None }
            }
            (None, None) => usage_error("one of --family or --coeffs is required"),
        }
    }
}

fn exact<const N: usize>(v: &[BigInt], flag: &str) -> [BigInt; N] {
    v.to_vec()
        .try_into()
        .unwrap_or_else(|v: Vec<BigInt>| usage_error(&format!("{flag} expects {N} comma-separated integers, got {}", v.len())))
}

/// Report a usage problem found after parsing and exit with status 2.
pub fn usage_error(msg: &str) -> ! {
    Cli::command().error(clap::error::ErrorKind::ValueValidation, msg).exit()
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LatticeName {
    #[value(name = "S")]
    S,
    #[value(name = "Sprime")]
    Sprime,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModuleName {
    #[value(name = "caseS")]
    CaseS,
    #[value(name = "caseSprime")]
    CaseSprime,
    #[value(name = "picU")]
    PicU,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Smoothness of the projective closure modulo a prime.
    Smooth {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        p: u64,
    },
    /// Non-degeneracy of the form (and the family criterion when applicable).
    Nondegen {
        #[command(flatten)]
        form: FormArgs,
    },
    /// Point count over F_{p^n}.
    Count {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        threads: Option<usize>,
        /// Checkpoint file; an existing file for the same job is resumed.
        #[arg(long, value_name = "FILE")]
        resume: Option<PathBuf>,
        /// Sum over every row instead of using the x ↔ y reduction.
        #[arg(long)]
        no_reduction: bool,
        /// Allow runs with n ≥ 6.
        #[arg(long)]
        slow: bool,
    },
    /// Characteristic polynomial of Frobenius on the transcendental part.
    Zeta {
        /// Counts as CSV lines `n,N_n` or a JSON record; defaults to the seven published counts at p = 7.
        #[arg(long, value_name = "FILE")]
        counts: Option<PathBuf>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Upper bound on the geometric Picard rank.
    PicardBound {
        #[arg(long, value_name = "FILE")]
        counts: Option<PathBuf>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Determinant and half-class scan of a Gram matrix.
    Lattice {
        #[arg(long, conflicts_with = "gram", required_unless_present = "gram")]
        builtin: Option<LatticeName>,
        /// Whitespace- or comma-separated rows, optional `names:` line.
        #[arg(long, value_name = "FILE")]
        gram: Option<PathBuf>,
    },
    /// H¹ of ⟨σ⟩ acting on a lattice.
    H1 {
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        builtin: Option<ModuleName>,
        /// Integer matrix of σ, one row per line.
        #[arg(long, value_name = "FILE")]
        matrix: Option<PathBuf>,
    },
    /// Local solubility certificates for the reference family at k.
    Local {
        #[arg(long, allow_hyphen_values = true)]
        k: BigInt,
    },
    /// Brauer–Manin verdict for k = ℓ².
    Bm {
        #[arg(long, allow_hyphen_values = true)]
        ell: BigInt,
    },
    /// Seed point on the elliptic fiber and its first multiples.
    Ec {
        #[arg(long, allow_hyphen_values = true)]
        ell: BigInt,
        /// Shift A used to map points onto the fiber.
        #[arg(long, allow_hyphen_values = true, default_value = "6")]
        shift: BigInt,
        /// Number of multiples to list.
        #[arg(long, default_value_t = 5)]
        n: i64,
    },
    /// Orbit of the fiber seed point under the Vieta involutions.
    Orbit {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "-12")]
        ell: BigInt,
        #[arg(long, default_value = "1000000000000000000000000000000")]
        height_bound: BigInt,
        #[arg(long, default_value_t = 5000)]
        steps: usize,
    },
    /// Every integral point, with infinite families described by generators.
    Integral {
        #[command(flatten)]
        form: FormArgs,
    },
    /// Progression and prime counts up to M (CSV).
    Survey {
        #[arg(long = "M", value_delimiter = ',', default_value = "1000000,10000000,100000000")]
        bounds: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        modulus: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Smooth { form, p } => commands::smooth(&form.resolve(), p),
        Command::Nondegen { form } => commands::nondegen(&form.resolve()),
        Command::Count { form, p, n, threads, resume, no_reduction, slow } => {
            commands::count(&form.resolve(), p, n, threads, resume, !no_reduction, slow)
        }
        Command::Zeta { counts, p } => commands::zeta(counts.as_deref(), p, false),
        Command::PicardBound { counts, p } => commands::zeta(counts.as_deref(), p, true),
        Command::Lattice { builtin, gram } => commands::lattice(builtin, gram.as_deref()),
        Command::H1 { builtin, matrix } => commands::h1(builtin, matrix.as_deref()),
        Command::Local { k } => commands::local(&k),
        Command::Bm { ell } => commands::bm(&ell),
        Command::Ec { ell, shift, n } => commands::ec(&ell, &shift, n),
        Command::Orbit { form, ell, height_bound, steps } => commands::orbit(&form.resolve(), &ell, &height_bound, steps),
        Command::Integral { form } => commands::integral(&form.resolve()),
        Command::Survey { bounds, modulus } => commands::survey(&bounds, modulus),
    };
    match result {
        Ok(report) => {
            if let Err(e) = output::emit(&report, cli.out.as_deref()) {
                eprintln!("mk3: cannot write output: {e}");
                return ExitCode::from(3);
            }
            if cli.strict && report.negative {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("mk3: {e}");
            ExitCode::from(3)
        }
    }
}
