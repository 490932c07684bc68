//! Batch front end: every pipeline of `fraisse-core` as a subcommand.
//!
//! Exit status 0 means success, 1 a property failure (the report carries the
//! witness), 2 a usage, parse or input error.

mod commands;
mod demo;
mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fraisse_core::report::Format;
use fraisse_core::Error;

pub use output::{Outcome, TextReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "fraisse",
    version,
    about = "Amalgamation classes, n-pair encodings and extension axioms"
)]
pub struct CommandSpec {
    /// Report layout.
    #[arg(long, global = true, default_value = "full", value_parser = parse_format)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// List the members of a class up to isomorphism.
    EnumerateAge(ClassSize),
    /// Check hereditary, joint embedding and amalgamation properties.
    CheckClass(CheckClass),
    /// Build a finite approximation of the generic structure.
    BuildGeneric(BuildGeneric),
    /// Count quantifier-free n-types realised in a class.
    TypeCount(ClassSize),
    /// Encode a structure into the fixed vocabulary through n-pairs.
    Encode(Encode),
    /// Read a structure back from its encoding.
    Decode(Decode),
    /// Amalgamate D1 and D2 over C.
    Amalgamate(Amalgamate),
    /// Generate axiom schemes, optionally verifying them on a structure.
    Axioms(Axioms),
    /// Compare two layers of a layered presentation.
    LayerCheck(LayerCheck),
    /// Find the layer from which a sentence holds in every approximant.
    Stabilize(Stabilize),
    /// Back-and-forth game over a fixed P-part.
    BnfOverP(BnfOverP),
    /// Per-sort shadows and a horizon-relative categoricity verdict.
    GadgetVerdict(GadgetVerdict),
    /// Axioms of a gadget layer and their rewrites into the fixed vocabulary.
    GadgetAxioms(GadgetAxioms),
    /// Run a built-in, self-verifying pipeline.
    Demo(Demo),
}

#[derive(Args, Debug, Clone)]
pub struct ClassSize {
    /// Builtin class name, or `encoded-<builtin>`.
    #[arg(long)]
    pub class: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1 << 22)]
    pub cap: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Factors,
    OnePoint,
}

#[derive(Args, Debug, Clone)]
pub struct CheckClass {
    #[arg(long)]
    pub class: String,
    #[arg(long)]
    pub bound: usize,
    #[arg(long, value_enum, default_value = "factors")]
    pub scope: ScopeArg,
    /// Extra random one-point problems (one-point scope).
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1 << 20)]
    pub amalgam_cap: u64,
    #[arg(long, default_value_t = 1 << 22)]
    pub cap: u64,
}

#[derive(Args, Debug, Clone)]
pub struct BuildGeneric {
    #[arg(long)]
    pub class: String,
    #[arg(long)]
    pub level: usize,
    #[arg(long, default_value_t = 64)]
    pub size_cap: usize,
    /// Demand indices never acted on, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub skip: Vec<usize>,
    /// Write the structure file here.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Encode {
    /// Structure file with one structure.
    #[arg(long)]
    pub input: PathBuf,
    /// Tuples to label, one `<symbol> <elem> ...` per line. Default: every tuple.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Decode {
    /// Encoded structure file.
    #[arg(long)]
    pub input: PathBuf,
    /// The encoded vocabulary, e.g. `R/1,E/2`, when the file has only the fixed symbols.
    #[arg(long)]
    pub l0: Option<String>,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Amalgamate {
    #[arg(long)]
    pub class: String,
    /// Structure file holding `c`, `d1` and `d2`; embeddings follow element names.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1 << 20)]
    pub cap: u64,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Axioms {
    #[arg(long)]
    pub class: String,
    /// Largest number of quantifiers.
    #[arg(long)]
    pub budget: usize,
    #[arg(long, default_value = "abcd")]
    pub schemes: String,
    #[arg(long)]
    pub max_arity: Option<usize>,
    /// Structure file to check the axioms on.
    #[arg(long)]
    pub verify: Option<PathBuf>,
    /// Write the axiom file here.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct LayerSource {
    /// Layer file. Without it, the constants-over-an-order example is used.
    #[arg(long)]
    pub layers: Option<PathBuf>,
    /// Number of constants in the built-in example.
    #[arg(long, default_value_t = 3)]
    pub constants: usize,
    /// Generic approximation level of each layer.
    #[arg(long, default_value_t = 4)]
    pub level: usize,
    #[arg(long, default_value_t = 6)]
    pub size_cap: usize,
    /// Copies of each labelled tuple in an approximant.
    #[arg(long, default_value_t = 4)]
    pub multiplicity: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct LayerCheck {
    #[command(flatten)]
    pub source: LayerSource,
    #[arg(long)]
    pub lower: usize,
    #[arg(long)]
    pub upper: usize,
    #[arg(long, default_value_t = 3)]
    pub bound: usize,
    #[arg(long, default_value_t = 1 << 22)]
    pub cap: u64,
}

#[derive(Args, Debug, Clone)]
pub struct Stabilize {
    #[command(flatten)]
    pub source: LayerSource,
    /// Sentence in S-expression syntax.
    #[arg(long, conflicts_with = "sentence_file")]
    pub sentence: Option<String>,
    #[arg(long)]
    pub sentence_file: Option<PathBuf>,
    #[arg(long)]
    pub horizon: usize,
}

#[derive(Args, Debug, Clone)]
pub struct BnfOverP {
    #[command(flatten)]
    pub source: LayerSource,
    /// First encoded structure; with `--right`, replaces the built layer.
    #[arg(long, requires = "right")]
    pub left: Option<PathBuf>,
    #[arg(long, requires = "left")]
    pub right: Option<PathBuf>,
    /// Layer whose approximants are compared when no files are given.
    #[arg(long, default_value_t = 1)]
    pub layer: usize,
    /// Seeds of the two independent builds.
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2])]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// P-element identification `a=b,...`. Default: any isomorphism of the P-parts.
    #[arg(long, value_delimiter = ',')]
    pub identify: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct GadgetVerdict {
    /// Enumeration table, one `e n x` triple per line.
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub index: u64,
    #[arg(long)]
    pub horizon: u64,
    /// Shadow size counted as evidence of an infinite set.
    #[arg(long, default_value_t = 8)]
    pub flag: usize,
}

#[derive(Args, Debug, Clone)]
pub struct GadgetAxioms {
    /// Predicate codes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub codes: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    pub layer: u64,
    #[arg(long)]
    pub budget: usize,
    #[arg(long, default_value = "abcd")]
    pub schemes: String,
    #[arg(long, default_value_t = fraisse_core::gadget::DEFAULT_ATOM_CAP)]
    pub atom_cap: usize,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Rado,
    Dlo,
    Constants,
    Gadget,
}

#[derive(Args, Debug, Clone)]
pub struct Demo {
    #[arg(value_enum)]
    pub name: DemoName,
}

/// Run a parsed command: the rendered report and any files to write.
pub fn run_command(spec: &CommandSpec) -> Result<Outcome, Error> {
    let mut out = match &spec.command {
        Command::EnumerateAge(a) => commands::enumerate_age(a),
        Command::CheckClass(a) => commands::check_class(a),
        Command::BuildGeneric(a) => commands::build_generic(a),
        Command::TypeCount(a) => commands::type_count(a),
        Command::Encode(a) => commands::encode(a),
        Command::Decode(a) => commands::decode(a),
        Command::Amalgamate(a) => commands::amalgamate(a),
        Command::Axioms(a) => commands::axioms(a),
        Command::LayerCheck(a) => commands::layer_check(a),
        Command::Stabilize(a) => commands::stabilize(a),
        Command::BnfOverP(a) => commands::bnf_over_p(a),
        Command::GadgetVerdict(a) => commands::gadget_verdict(a),
        Command::GadgetAxioms(a) => commands::gadget_axioms(a),
        Command::Demo(a) => demo::run(a.name),
    }?;
    out.text = out.report.render(spec.format);
    Ok(out)
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Property(_) => EXIT_PROPERTY,
        _ => EXIT_USAGE,
    }
}

/// Parse `args` (program name first), run, write the report and artifacts.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let spec = match CommandSpec::try_parse_from(args) {
        Ok(s) => s,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match run_command(&spec) {
        Ok(out) => {
            for (path, text) in &out.files {
                if let Err(e) = std::fs::write(path, text) {
                    let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            match &spec.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &out.text) {
                        let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                        return EXIT_USAGE;
                    }
                }
                None => {
                    let _ = write!(stdout, "{}", out.text);
                }
            }
            if out.report.passed() {
                EXIT_OK
            } else {
                EXIT_PROPERTY
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
