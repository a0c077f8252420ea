//! The `reflectix` command line tool.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O or usage error |
//! | 2 | malformed bytes |
//! | 3 | incompatible with the type |
//! | 4 | unknown type or bad type syntax |
//! | 5 | expression parse error |
//! | 6 | representation rejected |
//! | 7 | unknown constructor |
//! | 8 | no descriptor |
//! | 9 | round trip produced a different value |
//! | 10 | any other error |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::demo::{self, expr};
use crate::error::Error;
use crate::generics::equal;
use crate::safeser::{self, decode_graph, encode_graph, ValueGraph, ValueNode};
use crate::typerep::TypeRep;
use crate::uniplate::DEFAULT_FUEL;
use crate::value::Value;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_INCOMPATIBLE: i32 = 3;
pub const EXIT_TYPE: i32 = 4;
pub const EXIT_PARSE: i32 = 5;
pub const EXIT_REJECTED: i32 = 6;
pub const EXIT_UNKNOWN_CONSTRUCTOR: i32 = 7;
pub const EXIT_NO_DESCRIPTOR: i32 = 8;
pub const EXIT_MISMATCH: i32 = 9;
pub const EXIT_OTHER: i32 = 10;

/// Environment variable overriding the rewrite fuel of `simplify-more`.
pub const FUEL_VAR: &str = "REFLECTIX_FUEL";

#[derive(Parser, Debug)]
#[command(name = "reflectix", version, about = "Inspect, validate and round-trip serialized value graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the nodes of a serialized graph.
    Inspect { file: PathBuf },
    /// Check a serialized graph against a type.
    Validate {
        #[arg(long = "type", value_name = "TYPE")]
        ty: String,
        file: PathBuf,
    },
    /// Run an expression pass on an s-expression file.
    DemoExpr {
        #[arg(long, value_enum)]
        pass: Pass,
        file: PathBuf,
    },
    /// Serialize the value in a file, read it back and compare.
    Roundtrip {
        #[arg(long = "type", value_name = "TYPE")]
        ty: String,
        file: PathBuf,
        /// Damage the intermediate bytes before reading them back.
        #[arg(long)]
        corrupt: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Pass {
    Simplify,
    ConstFold,
    SimplifyMore,
    Abstract,
    FreeVars,
    Constants,
    Height,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MalformedBytes { .. } => EXIT_MALFORMED,
        Error::Incompatible { .. } => EXIT_INCOMPATIBLE,
        Error::UnknownType(_) | Error::TypeSyntax { .. } => EXIT_TYPE,
        Error::Parse { .. } => EXIT_PARSE,
        Error::RepresentationRejected { .. } => EXIT_REJECTED,
        Error::UnknownConstructor(_) => EXIT_UNKNOWN_CONSTRUCTOR,
        Error::NoDescriptor(_) => EXIT_NO_DESCRIPTOR,
        _ => EXIT_OTHER,
    }
}

enum Failure {
    Io(PathBuf, std::io::Error),
    Usage(String),
    Lib(Error),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<String, Failure>;

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    demo::init();
    let outcome = match cli.command {
        Command::Inspect { file } => inspect(&file),
        Command::Validate { ty, file } => validate(&ty, &file),
        Command::DemoExpr { pass, file } => demo_expr(pass, &file),
        Command::Roundtrip { ty, file, corrupt } => roundtrip(&ty, &file, corrupt),
    };
    match outcome {
        Ok(text) => {
            print!("{text}");
            let _ = std::io::stdout().flush();
            EXIT_OK
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            EXIT_IO
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_IO
        }
        Err(Failure::Mismatch) => {
            println!("mismatch");
            EXIT_MISMATCH
        }
        Err(Failure::Lib(e)) => {
            if matches!(e, Error::Incompatible { .. }) {
                println!("incompatible");
            }
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn inspect(file: &Path) -> Outcome {
    let g = decode_graph(&read_bytes(file)?)?;
    Ok(format!("{} nodes\n{}", g.len(), g.render()))
}

fn validate(ty: &str, file: &Path) -> Outcome {
    let t = TypeRep::parse(ty)?;
    let bytes = read_bytes(file)?;
    safeser::validate(&t, &bytes)?;
    Ok("compatible\n".into())
}

fn fuel() -> Result<u64, Failure> {
    match std::env::var(FUEL_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{FUEL_VAR} must be a non-negative integer, got `{s}`"))),
        Err(_) => Ok(DEFAULT_FUEL),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn demo_expr(pass: Pass, file: &Path) -> Outcome {
    let e = expr::parse(&read_text(file)?)?;
    let out = match pass {
        Pass::Simplify => expr::print(&expr::simplify(&e)?)?,
        Pass::ConstFold => expr::print(&expr::const_fold(&e)?)?,
        Pass::SimplifyMore => expr::print(&expr::simplify_more(&e, fuel()?)?)?,
        Pass::Abstract => expr::print(&expr::abstract_(&e)?.0)?,
        Pass::FreeVars => join(&expr::free_vars(&e)?),
        Pass::Constants => join(&expr::constants(&e)?),
        Pass::Height => expr::height(&e)?.to_string(),
    };
    Ok(out + "\n")
}

/// Reads the value for `roundtrip`: an expression, or an integer literal for
/// `Int` and `Nat`.
fn read_value(t: &TypeRep, text: &str) -> Result<Value, Failure> {
    if *t == demo::expr_ty() {
        return Ok(expr::parse(text)?);
    }
    if *t == TypeRep::int() || *t == demo::nat() {
        let s = text.trim();
        return s.parse::<i64>().map(Value::Int).map_err(|_| {
            Failure::Lib(Error::Parse {
                line: 1,
                col: 1,
                reason: format!("invalid integer `{s}`"),
            })
        });
    }
    Err(Failure::Usage(format!("roundtrip supports Expr, Int and Nat, not {t}")))
}

/// Replaces the root with a byte string, which no supported type accepts.
fn corrupt(bytes: &[u8]) -> Result<Vec<u8>, Error> {
    let g = decode_graph(bytes)?;
    let mut nodes = g.nodes().to_vec();
    nodes[g.root() as usize] = ValueNode::Bytes(b"corrupt".to_vec());
    encode_graph(&ValueGraph::new(nodes, g.root())?)
}

fn roundtrip(ty: &str, file: &Path, damage: bool) -> Outcome {
    let t = TypeRep::parse(ty)?;
    let v = read_value(&t, &read_text(file)?)?;
    let mut bytes = safeser::serialize(&t, &v)?;
    if damage {
        bytes = corrupt(&bytes)?;
    }
    let back = safeser::deserialize(&t, &bytes)?;
    if equal(&t, &back, &v)? {
        Ok(format!("ok ({} bytes)\n", bytes.len()))
    } else {
        Err(Failure::Mismatch)
    }
}
