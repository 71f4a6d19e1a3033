//! `outage`: evaluate, tabulate, simulate and cross-check the outage
//! statistics of a link in a Poisson network.
//!
//! Exit codes: 0 ok, 2 bad input, 3 validation failure, 4 numerically
//! unstable analytic evaluation (Monte Carlo advised).

mod args;
mod eval;
mod output;
mod params;
mod simulate;
mod validate;

use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::Parser;
use outage_core::figures;

use args::{Cli, Command};

#[derive(Debug)]
struct ValidationFailed(usize);

impl std::fmt::Display for ValidationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) outside 3 standard errors", self.0)
    }
}

impl std::error::Error for ValidationFailed {}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| anyhow!("cannot set up {threads} worker threads: {e}"))?;
    }
    match cli.command {
        Command::Eval {
            quantity,
            params,
            optn,
        } => {
            let s = params::resolve(&params)?;
            let result = eval::run(quantity, &s, &optn)?;
            let name = format!("eval {}", quantity_name(&quantity));
            let head = output::header(&name, &s, &params.config, None, &result.extra);
            output::emit(&(head + &result.body), &s.out)
        }
        Command::Figure { name, list, params } => {
            if list {
                return output::emit(&(figures::figure_names().join("\n") + "\n"), &None);
            }
            let name = name.expect("clap enforces a name without --list");
            let s = params::resolve(&params)?;
            let table = figures::generate(&name)?;
            let extra = vec![
                ("figure", table.name.clone()),
                ("rows", table.rows().to_string()),
            ];
            let mut text = format!(
                "# outage {}\n# command: figure {name}\n",
                env!("CARGO_PKG_VERSION")
            );
            for (k, v) in extra {
                text.push_str(&format!("# {k} = {v}\n"));
            }
            text.push_str("# parameters are fixed per figure; see the column labels\n");
            text.push_str(&table.to_csv());
            output::emit(&text, &s.out)
        }
        Command::Simulate { quantity, params } => {
            let s = params::resolve(&params)?;
            let scenario = s.scenario()?;
            if s.reps < 2 {
                eprintln!("warning: --reps {} gives no standard error", s.reps);
            }
            let result = simulate::run(quantity, &s, &scenario)?;
            let name = format!("simulate {}", sim_name(&quantity));
            let head = output::header(&name, &s, &params.config, Some(&scenario), &result.extra);
            output::emit(&(head + &result.body), &s.out)
        }
        Command::Validate {
            params,
            force_mismatch,
        } => {
            let s = params::resolve(&params)?;
            let scenario = s.scenario()?;
            let outcome = validate::run(&s, &scenario, force_mismatch)?;
            let head = output::header(
                "validate",
                &s,
                &params.config,
                Some(&scenario),
                &outcome.report.extra,
            );
            output::emit(&(head + &outcome.report.body), &s.out)?;
            if outcome.failures > 0 {
                return Err(ValidationFailed(outcome.failures).into());
            }
            Ok(())
        }
    }
}

fn quantity_name(q: &args::Quantity) -> String {
    use clap::ValueEnum;
    q.to_possible_value().map_or_else(String::new, |v| v.get_name().to_string())
}

fn sim_name(q: &args::SimQuantity) -> String {
    use clap::ValueEnum;
    q.to_possible_value().map_or_else(String::new, |v| v.get_name().to_string())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ValidationFailed>().is_some() {
        return 3;
    }
    match err.downcast_ref::<outage_core::Error>() {
        Some(e) if e.is_stability() => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = exit_code(&err);
            eprintln!("error: {err:#}");
            if code == 4 {
                eprintln!("hint: estimate this quantity with `outage simulate` instead");
            }
            ExitCode::from(code)
        }
    }
}
