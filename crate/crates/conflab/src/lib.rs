//! Command-line front end for `conflab-core`: argument parsing, JSON reports,
//! CSV grid emission and the self-check suite.

pub mod args;
pub mod error;
pub mod grid;
pub mod input;
pub mod report;
pub mod run;
pub mod suite;

pub use args::Cli;
pub use error::{CliError, CliResult};
pub use report::ReportDocument;

/// Applies `CONFLAB_THREADS` to the global rayon pool.
pub fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("CONFLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::usage(format!("CONFLAB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot size the thread pool: {e}")))
}

/// Parses `argv`, runs, writes the report and returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|_| {
        let doc = run::execute(&cli)?;
        doc.write(cli.out.as_deref())?;
        Ok(doc.exit_code())
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("conflab: {e}");
            e.exit_code()
        }
    }
}
