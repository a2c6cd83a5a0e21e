//! Command-line front end: configuration merging, dispatch, artifact
//! writing and the reproduction criteria.

pub mod args;
pub mod commands;
pub mod criteria;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use skewlab_core::{Error, ErrorKind, DEFAULT_BITS};

use args::{Cli, Command};
use commands::Env;
use output::{json_bytes, write_atomic, Artifacts};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERACY: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;
pub const EXIT_CRITERION: i32 = 5;

pub const DEFAULT_SEED: u64 = 1;

/// On-disk configuration file.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub precision_bits: Option<u32>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub params: Map<String, Value>,
}

/// Fully resolved run configuration, written into every output header.
#[derive(Serialize, Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    pub params: Value,
    pub precision_bits: u32,
    pub seed: u64,
    pub version: &'static str,
}

fn merge<T: Serialize + DeserializeOwned>(file: &Map<String, Value>, flags: &T) -> Result<T> {
    let mut base = file.clone();
    if let Value::Object(f) = serde_json::to_value(flags)? {
        for (k, v) in f {
            if !v.is_null() {
                base.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| Error::Config(format!("config params: {e}")).into())
}

macro_rules! merged {
    ($cmd:expr, $file:expr, $($variant:ident),*) => {
        match $cmd {
            $(Command::$variant(a) => {
                let m = merge($file, &a)?;
                let v = serde_json::to_value(&m)?;
                (Command::$variant(m), v)
            })*
        }
    };
}

/// Applies the config file under the flags.
pub fn resolve(cli: Cli) -> Result<(Command, RunConfig, Env)> {
    let file: ConfigFile = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("reading {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => ConfigFile::default(),
    };
    let name = cli.command.name();
    if let Some(c) = &file.command {
        if c != name {
            return Err(Error::Config(format!("config is for `{c}` but `{name}` was requested")).into());
        }
    }
    let (command, params) = merged!(
        cli.command, &file.params, Cf, Ostrowski, Badmargin, Sums, Fourier, Coboundary, Partition, Eqfunct, Gaps, Schmidt, Recur, Essval, Weyl,
        Conjugation, Reproduce, Bench
    );
    let bits = cli.bits.or(file.precision_bits).unwrap_or(DEFAULT_BITS);
    if !(64..=65536).contains(&bits) {
        return Err(Error::Config(format!("precision {bits} bits outside 64..=65536")).into());
    }
    let seed = cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let out_dir = cli.out_dir.or(file.output_dir).or_else(|| std::env::var_os("OUTPUT_DIR").map(PathBuf::from));
    let rc = RunConfig { command: name.to_string(), params, precision_bits: bits, seed, version: env!("CARGO_PKG_VERSION") };
    Ok((command, rc, Env { bits, seed, out_dir }))
}

/// Exit status for an error escaping a command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>().map(Error::kind) {
        Some(ErrorKind::Config) => EXIT_CONFIG,
        Some(ErrorKind::Degeneracy) => EXIT_DEGENERACY,
        Some(ErrorKind::Precision) => EXIT_PRECISION,
        None => 1,
    }
}

/// Document printed to stdout and stored next to the CSV tables.
pub fn report(rc: &RunConfig, art: &Artifacts) -> Value {
    serde_json::json!({
        "probe": rc.command,
        "config": rc,
        "verdict": art.verdict.map(|p| if p { "pass" } else { "fail" }),
        "evidence": art.summary,
        "tables": art.tables.iter().map(|(n, _)| format!("{}-{n}.csv", rc.command)).collect::<Vec<_>>(),
    })
}

/// Writes every artifact; all bytes are rendered before the first write.
pub fn persist(rc: &RunConfig, env: &Env, art: &Artifacts) -> Result<Value> {
    let doc = report(rc, art);
    let mut files: Vec<(PathBuf, Vec<u8>)> = art.files.clone();
    if let Some(dir) = &env.out_dir {
        for (name, t) in &art.tables {
            files.push((dir.join(format!("{}-{name}.csv", rc.command)), t.to_csv()?));
        }
        files.push((dir.join(format!("{}.json", rc.command)), json_bytes(&doc)?));
    }
    for (path, bytes) in &files {
        write_atomic(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(doc)
}

/// Parses arguments, runs one command and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let go = || -> Result<i32> {
        let (command, rc, env) = resolve(cli)?;
        let art = commands::dispatch(&command, &env)?;
        let doc = persist(&rc, &env, &art)?;
        // a closed pipe downstream is not an error of the run
        let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&doc)?);
        Ok(match (&command, art.verdict) {
            (Command::Reproduce(_), Some(false)) => EXIT_CRITERION,
            _ => EXIT_OK,
        })
    };
    match go() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
