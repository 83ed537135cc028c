//! `cobarforge`: command-line front end to the cobar and May-model engine.

mod cache;
mod commands;
mod svg;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cobarforge::conventions::ConventionTable;

use cache::{fingerprint, Cache, Entry};
use commands::{Outcome, Usage};

#[derive(Parser, Debug)]
#[command(name = "cobarforge", version, about = "Milnor coalgebra, cobar complex and May-model computations over F2")]
pub struct Cli {
    /// Coalgebra variant: `stable` sets ξ0 = 1, `unstable` keeps ξ0.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Stable)]
    pub mode: ModeArg,
    /// Largest stem t − s in the window.
    #[arg(long, global = true)]
    pub max_stem: Option<u64>,
    /// Largest filtration s in the window.
    #[arg(long, global = true)]
    pub max_filt: Option<u64>,
    /// Largest internal degree t of a cobar chart cell.
    #[arg(long, global = true)]
    pub max_t: Option<u64>,
    /// Convention preset (`standard`, `strict`) or path to a JSON table.
    #[arg(long, global = true, default_value = "standard")]
    pub conventions: String,
    /// Result cache directory.
    #[arg(long, global = true, env = "COBARFORGE_CACHE")]
    pub cache_dir: Option<PathBuf>,
    /// Bypass the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Stable,
    Unstable,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Svg,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Coproduct ∇ of a Milnor polynomial.
    Nabla { expr: String },
    /// Operation e_i on a Milnor polynomial.
    Eop { i: u32, expr: String },
    /// Operation Q_j on a Milnor polynomial.
    Qop { j: u32, expr: String },
    /// Cup-i product x ∪_i y under the active conventions.
    Cupk { i: u32, x: String, y: String },
    /// Cobar differential of a sum of bar words.
    CobarD { word: String },
    /// Cup-i product of two cobar cochains.
    CobarCup { i: usize, u: String, v: String },
    /// Adams chart from cobar homology, or a May-model page with --may.
    ExtChart {
        /// Compute the page of the transferred May model instead.
        #[arg(long)]
        may: bool,
        /// Page number for --may.
        #[arg(long, default_value_t = 2)]
        page: u32,
    },
    /// Transferred differential of a PS⁻¹X word, split by filtration jump.
    MayD {
        expr: String,
        #[arg(long, default_value_t = 8)]
        max_jump: u64,
    },
    /// Run a built-in verification.
    Verify {
        #[arg(value_enum)]
        target: Target,
        /// Index for the parametrised targets.
        #[arg(long)]
        n: Option<u32>,
    },
    /// Run the h_n² pipeline for a given n.
    Kervaire { n: u32 },
    /// Check SDR side conditions and coherence on all small complexes.
    FhoVerify,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// e_i: squaring, Cartan formula, coproduct compatibility.
    Thm10,
    /// e_i and Q_j tables on generators.
    Thm11,
    /// Closed homotopy-operation formula against the explicit model.
    Thm12,
    /// Cobar cup-i products: base cases, Hirsch relation, d² = 0.
    Thm15,
    /// d(h_n) against its closed form.
    Thm22,
    /// d1 of the h^4 chain.
    Star,
    /// Full h_n² pipeline.
    Thm23,
}

fn load_conventions(arg: &str) -> Result<ConventionTable, Usage> {
    if let Ok(t) = ConventionTable::preset(arg) {
        return Ok(t);
    }
    let path = std::path::Path::new(arg);
    if !path.exists() {
        return Err(Usage(format!("unknown convention preset `{arg}` and no such file")));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{arg}: {e}")))?;
    ConventionTable::from_json(&text).map_err(|e| Usage(format!("{arg}: {e}")))
}

fn default_cache_dir() -> PathBuf {
    std::env::var_os("HOME")
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir)
        .join(".cache")
        .join("cobarforge")
}

fn run(cli: &Cli) -> Result<Outcome, Usage> {
    let conv = load_conventions(&cli.conventions)?;
    let prepared = commands::prepare(cli, &conv)?;
    let key = fingerprint(
        &serde_json::json!({
            "command": prepared.canonical,
            "mode": cli.mode,
            "window": [cli.max_stem, cli.max_filt, cli.max_t],
            "format": cli.format,
            "conventions": conv.hash(),
            "version": cobarforge::VERSION,
        })
        .to_string(),
    );
    let cache = (!cli.no_cache).then(|| Cache::new(cli.cache_dir.clone().unwrap_or_else(default_cache_dir)));
    if let Some(hit) = cache.as_ref().and_then(|c| c.lookup(&key)) {
        eprintln!("cached");
        return Ok(Outcome { exit: hit.exit, body: hit.body });
    }
    let out = commands::execute(cli, &conv, prepared)?;
    if let Some(c) = &cache {
        if let Err(e) = c.store(&key, &Entry { exit: out.exit, body: out.body.clone() }) {
            eprintln!("warning: cache write to {} failed: {e}", c.dir().display());
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(&out.body);
            let _ = stdout.flush();
            ExitCode::from(out.exit)
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
