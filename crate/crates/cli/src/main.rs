use std::process::ExitCode;

use fractalab_cli::cli::{Cli, Invocation};

fn main() -> ExitCode {
    let cli = match Cli::parse_from_args(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = cli.invocation().and_then(|inv| match inv {
        Invocation::ExportGallery(dir) => {
            for path in fractalab_cli::export_gallery(&dir)? {
                println!("{}", path.display());
            }
            Ok(0)
        }
        Invocation::Experiment(cfg) => {
            let run = fractalab_cli::run(&cfg)?;
            for line in &run.summary {
                println!("{line}");
            }
            for w in &run.manifest.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("report: {}", run.report_path.display());
            Ok(run.exit_code())
        }
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
