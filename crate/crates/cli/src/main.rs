use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use magnet_core::atlas::{
    builtin_p2_double_scalar, from_smooth_complete_fan, load_atlas, WeightAtlas,
};
use magnet_core::lattice::parse_vector_list;
use magnet_core::monoid::set_bound_multiplier;
use magnet_core::oracle::{run_oracle, Fault};
use magnet_core::report::{
    analyze, classify, describe_attractor, render_dot_poset, render_dot_strata, render_json,
    render_text,
};
use magnet_core::Error;

const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

const BOUND_ENV: &str = "MAGNET_MEMBERSHIP_BOUND_MULT";

#[derive(Parser)]
#[command(
    name = "magnets",
    version,
    about = "Pure magnets, attractors and lambdafiability of torus actions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate pure magnets and report attractors, strata and witnesses.
    Analyze {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Purify the magnet generated by a list of vectors and describe its attractor.
    Classify {
        #[command(flatten)]
        source: Source,
        /// Generators as "a1,b1;a2,b2;...".
        #[arg(long, allow_hyphen_values = true)]
        generators: String,
        #[arg(long, value_enum, default_value_t = ClassifyFormat::Text)]
        format: ClassifyFormat,
    },
    /// Recompute everything by brute force and compare with the engine.
    Oracle {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, hide = true, default_value_t = InjectedFault::None)]
        inject_fault: InjectedFault,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct Source {
    /// A builtin atlas.
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// Rays of a smooth complete fan in cyclic order, e.g. "1,0;0,1;-1,-1".
    #[arg(long, allow_hyphen_values = true)]
    fan: Option<String>,
    /// A JSON atlas file.
    #[arg(long)]
    atlas: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    P2DoubleScalar,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    DotPoset,
    DotStrata,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifyFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum InjectedFault {
    None,
    StabilityOffByOne,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Capacity(_)) {
            EXIT_CAPACITY
        } else {
            EXIT_INPUT
        };
        let mut message = e.to_string();
        if let Error::InvalidAtlas(violations) = &e {
            for v in violations {
                message.push_str(&format!("\n  - {v}"));
            }
        }
        Failure { code, message }
    }
}

fn input_failure(message: String) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message,
    }
}

impl Source {
    /// Without a selector, the builtin P² atlas is used.
    fn load(&self) -> Result<WeightAtlas, Failure> {
        if let Some(path) = &self.atlas {
            let text = fs::read_to_string(path)
                .map_err(|e| input_failure(format!("cannot read {}: {e}", path.display())))?;
            return Ok(load_atlas(&text)?);
        }
        if let Some(fan) = &self.fan {
            return Ok(from_smooth_complete_fan(&parse_vector_list(fan)?)?);
        }
        match self.builtin {
            Some(Builtin::P2DoubleScalar) | None => Ok(builtin_p2_double_scalar()),
        }
    }

    fn is_empty(&self) -> bool {
        self.builtin.is_none() && self.fan.is_none() && self.atlas.is_none()
    }
}

fn require_source(source: &Source) -> Result<(), Failure> {
    if source.is_empty() {
        Err(input_failure(
            "one of --builtin, --fan or --atlas is required".to_string(),
        ))
    } else {
        Ok(())
    }
}

fn configure_bound() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(BOUND_ENV) else {
        return Ok(());
    };
    let mult: u32 = raw.trim().parse().map_err(|_| {
        input_failure(format!(
            "{BOUND_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    set_bound_multiplier(mult).map_err(Failure::from)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| input_failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_bound()?;
    match cli.command {
        Command::Analyze {
            source,
            format,
            out,
        } => {
            require_source(&source)?;
            let atlas = source.load()?;
            let report = analyze(&atlas)?;
            let text = match format {
                Format::Json => render_json(&report),
                Format::DotPoset => render_dot_poset(&report),
                Format::DotStrata => render_dot_strata(&report, &atlas),
                Format::Text => render_text(&report, &atlas),
            };
            emit(&text, out.as_ref())
        }
        Command::Classify {
            source,
            generators,
            format,
        } => {
            let atlas = source.load()?;
            let gens = parse_vector_list(&generators)?;
            let c = classify(&atlas, &gens)?;
            let text = match format {
                ClassifyFormat::Json => render_json(&c),
                ClassifyFormat::Text => {
                    let components = c
                        .attractor
                        .component_count()
                        .map_or("unavailable".to_string(), |n| n.to_string());
                    let verdict = match &c.witness {
                        Some(f) => format!("lambdafiable, f = {f}"),
                        None => "not lambdafiable".to_string(),
                    };
                    format!(
                        "purification: {}\npure: {}\nattractor: {}\ncomponents: {components}\n{verdict}\n",
                        c.purification,
                        if c.is_pure { "yes" } else { "no" },
                        describe_attractor(&c.attractor, &atlas),
                    )
                }
            };
            emit(&text, None)
        }
        Command::Oracle {
            source,
            inject_fault,
        } => {
            require_source(&source)?;
            let atlas = source.load()?;
            let fault = match inject_fault {
                InjectedFault::None => Fault::None,
                InjectedFault::StabilityOffByOne => Fault::StabilityOffByOne,
            };
            let outcome = run_oracle(&atlas, fault)?;
            match &outcome.mismatch {
                None => {
                    println!("{}", outcome.summary());
                    Ok(())
                }
                Some(first) => Err(Failure {
                    code: EXIT_MISMATCH,
                    message: format!("mismatch: {first}\n{}", outcome.summary()),
                }),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
