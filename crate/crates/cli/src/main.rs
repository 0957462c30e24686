use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod cache;
mod commands;
mod render;

use commands::{CliResult, DeltaRequest, IRequest};
use render::{Format, Report};

#[derive(Parser)]
#[command(name = "orbiqrr", version, about = "Exact genus-zero computations for twisted orbifold Gromov-Witten theory")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Twist {
    /// Built-in target name (point, BmuR, Pn, WPS1,1,2) or a config file.
    #[arg(long)]
    target: String,
    /// Bundle name: one of the config's bundles, or O<k>, char<j>, trivial<k>, zero.
    #[arg(long)]
    bundle: String,
}

#[derive(Args)]
struct SChoice {
    /// Use the Euler-class values s_0 = ln λ, s_k = (−1)^{k−1}(k−1)!/λ^k.
    #[arg(long, conflicts_with = "s")]
    euler: bool,
    /// Comma-separated rationals s_0,s_1,…
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
}

#[derive(Args)]
struct DeltaArgs {
    #[command(flatten)]
    twist: Twist,
    #[command(flatten)]
    s: SChoice,
    #[arg(long, allow_hyphen_values = true)]
    zmax: i32,
    /// Emit Δ⁻¹ instead of Δ.
    #[arg(long)]
    inverse: bool,
    #[arg(long)]
    check_symplectic: bool,
}

impl DeltaArgs {
    fn request(&self) -> DeltaRequest<'_> {
        DeltaRequest {
            target: &self.twist.target,
            bundle: &self.twist.bundle,
            euler: self.s.euler,
            s: self.s.s.as_deref(),
            zmax: self.zmax,
            inverse: self.inverse,
            check_symplectic: self.check_symplectic,
        }
    }
}

#[derive(Args)]
struct IArgs {
    #[arg(long)]
    target: String,
    #[arg(long)]
    bundle: Option<String>,
    #[arg(long)]
    max_degree: u32,
    /// Set λ = 0 before output.
    #[arg(long)]
    nonequivariant: bool,
    /// J-function rows to use instead of the built-in closed form.
    #[arg(long)]
    jfile: Option<PathBuf>,
}

impl IArgs {
    fn request(&self) -> IRequest<'_> {
        IRequest {
            target: &self.target,
            bundle: self.bundle.as_deref(),
            max_degree: self.max_degree,
            nonequivariant: self.nonequivariant,
            jfile: self.jfile.as_deref(),
        }
    }
}

#[derive(Subcommand)]
enum TargetCmd {
    /// Parse and validate a target config file.
    Validate { file: PathBuf },
    /// Print a target (built-in or config) as JSON.
    Show { target: String },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// String, dilaton, divisor or TRR on a correlator table.
    Universal {
        #[arg(long, default_value = "point")]
        target: String,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        table: Option<PathBuf>,
        /// Size of the built-in table, or the J-function degree for the divisor shift.
        #[arg(long, default_value_t = 8)]
        nmax: usize,
        /// Order in the shift parameter for the divisor shift.
        #[arg(long, default_value_t = 3)]
        order: u32,
    },
    /// Scalar part of [Â, Â′] compared with the closed-form cocycle.
    Cocycle {
        #[arg(long, default_value = "point")]
        target: String,
        #[arg(long = "B1", default_value = "id")]
        b1: String,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        m1: i32,
        #[arg(long = "B2", default_value = "id")]
        b2: String,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        m2: i32,
        #[arg(long = "K", default_value_t = 6)]
        k: u32,
    },
    /// The quantized string operator applied to a truncated genus-zero potential.
    String {
        #[arg(long, default_value = "point")]
        target: String,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[arg(long = "K", default_value_t = 6)]
        k: u32,
    },
    /// Serre-duality consistency of Δ and Δ^∨ at generic s.
    Serre {
        #[command(flatten)]
        twist: Twist,
        #[arg(long, default_value_t = 2)]
        smax: usize,
        #[arg(long, default_value_t = 3)]
        zmax: i32,
    },
    /// M*(−z)M(z) = 1 for Δ.
    Symplectic(DeltaArgs),
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate or display target configurations.
    Target {
        #[command(subcommand)]
        action: TargetCmd,
    },
    /// Exact value of the Bernoulli polynomial B_m(x).
    Bernoulli {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// The quantum Riemann-Roch operator Δ through z^zmax.
    Delta(DeltaArgs),
    /// J-function, or its hypergeometric modification by a bundle.
    Ifunction(IArgs),
    /// F, G and τ from the small I-function.
    MirrorMap(IArgs),
    /// Genus-zero and instanton numbers of a Calabi-Yau hypersurface.
    Invariants {
        #[arg(long)]
        target: String,
        #[arg(long)]
        bundle: String,
        #[arg(long)]
        max_degree: u32,
        #[arg(long, default_value = "quintic")]
        mode: String,
    },
    /// Quantize B z^m as a differential operator on the Fock space.
    Quantize {
        #[arg(long)]
        target: String,
        /// id, zero, mult:<component>/<basis>, a JSON matrix, or @file.
        #[arg(long = "B")]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        m: i32,
        #[arg(long = "K")]
        k: u32,
        /// Use the closed formula without checking that B z^m is infinitesimally symplectic.
        #[arg(long)]
        formula: bool,
    },
    /// Consistency checks.
    Check {
        #[command(subcommand)]
        which: CheckCmd,
    },
}

fn run(cmd: &Cmd) -> CliResult<Report> {
    match cmd {
        Cmd::Target { action: TargetCmd::Validate { file } } => commands::target_validate(file),
        Cmd::Target { action: TargetCmd::Show { target } } => commands::target_show(target),
        Cmd::Bernoulli { m, x } => commands::bernoulli(*m, x),
        Cmd::Delta(a) => commands::delta(&a.request()),
        Cmd::Ifunction(a) => commands::ifunction(&a.request()),
        Cmd::MirrorMap(a) => commands::mirror(&a.request()),
        Cmd::Invariants { target, bundle, max_degree, mode } => commands::invariants(target, bundle, *max_degree, mode),
        Cmd::Quantize { target, b, m, k, formula } => commands::quantize(target, b, *m, *k, *formula),
        Cmd::Check { which } => match which {
            CheckCmd::Universal { target, kind, table, nmax, order } => {
                commands::check_universal(target, kind, table.as_deref(), *nmax, *order)
            }
            CheckCmd::Cocycle { target, b1, m1, b2, m2, k } => commands::check_cocycle(target, [(b1, *m1), (b2, *m2)], *k),
            CheckCmd::String { target, table, nmax, k } => commands::check_string(target, table.as_deref(), *nmax, *k),
            CheckCmd::Serre { twist, smax, zmax } => commands::check_serre(&twist.target, &twist.bundle, *smax, *zmax),
            CheckCmd::Symplectic(a) => commands::check_symplectic(&a.request()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match run(&cli.cmd) {
        Ok(r) => {
            let _ = out.write_all(r.render(cli.format).as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let Some(r) = &e.report {
                let _ = out.write_all(r.render(cli.format).as_bytes());
            }
            if e.report.is_none() || cli.format != Format::Json {
                let _ = writeln!(out, "{}", e.to_json());
            }
            eprintln!("orbiqrr: {}", e.message);
            ExitCode::from(1)
        }
    }
}
