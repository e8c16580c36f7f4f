use std::process::ExitCode;

use areba_bench::{parse_cli, run_experiment, write_csv, write_per_rep_csv, Metric};

fn main() -> ExitCode {
    let (cli, config) = match parse_cli(std::env::args_os()) {
        Ok(parsed) => parsed,
        Err(e) => e.exit(),
    };
    let result = match run_experiment(&config) {
        Ok(result) => result,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    for (path, write) in [
        (&cli.out, write_csv as fn(_, _) -> _),
        (&cli.per_rep_out, write_per_rep_csv),
    ] {
        if let Some(path) = path {
            if let Err(e) = write(&result, path) {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    println!(
        "learner {} over {} repetitions, {} steps",
        result.learner,
        config.reps,
        result.steps()
    );
    for metric in Metric::ALL {
        if let Some((mean, se)) = result.final_value(metric) {
            println!("final {:<12} {mean:.4} (se {se:.4})", metric.name());
        }
    }
    ExitCode::SUCCESS
}
