//! `conceptkit`: validate, simulate, and check concept designs from the command line.

mod commands;
mod config;

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conceptkit::ui::Milli;

use config::{CliConfig, Format};

#[derive(Parser, Debug)]
#[command(name = "conceptkit", version, about = "Concept specifications and dark-pattern checks")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Trace depth for behavioural comparison (1 to 8).
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Steps within which an action counts as reachable in the UI.
    #[arg(long, global = true)]
    max_steps: Option<u32>,
    /// Largest tolerated prominence gap between paired controls.
    #[arg(long, global = true)]
    epsilon: Option<Milli>,
    /// Default reach ratio for parity rules.
    #[arg(long, global = true)]
    max_ratio: Option<Milli>,
    /// Idioms needed before a UI evokes a concept.
    #[arg(long, global = true)]
    evoke_k: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// A key=value file of defaults; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    no_color: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and statically check source files.
    Validate {
        #[arg(required = true)]
        paths: Vec<String>,
    },
    /// Run an action script against an app and print the trace.
    Simulate {
        app: String,
        /// Script file, one call per line.
        #[arg(long, conflicts_with = "calls")]
        script: Option<PathBuf>,
        /// Inline script, calls separated by `;`.
        #[arg(long)]
        calls: Option<String>,
        /// Entity domain, e.g. `Item=a,b`. Repeatable.
        #[arg(long = "domain", value_name = "SORT=IDS")]
        domains: Vec<String>,
        /// Print the final state after the trace.
        #[arg(long)]
        state: bool,
    },
    /// Check a design against a catalog standard.
    Check {
        /// A scenario file naming the standard, design, and beneficiary.
        scenario: Option<String>,
        #[arg(long, conflicts_with = "scenario")]
        standard: Option<String>,
        #[arg(long, requires = "standard")]
        app: Option<String>,
        #[arg(long, requires = "app")]
        ui: Option<String>,
        /// Who benefits from deviations: user, provider, or neutral.
        #[arg(long, default_value = "provider")]
        benefit: String,
        /// Check a catalog entry's standard design against itself.
        #[arg(long = "self", value_name = "ENTRY", conflicts_with_all = ["scenario", "standard"])]
        self_entry: Option<String>,
    },
    /// Run every scenario in the shipped corpus or a directory.
    Corpus {
        /// Directory of `.scenario` files; defaults to the shipped patterns.
        dir: Option<PathBuf>,
        /// Also run the shipped case studies.
        #[arg(long, conflicts_with = "dir")]
        all: bool,
    },
    /// Inspect the shipped catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    List,
    Show { name: String },
}

fn resolve_config(opts: &GlobalOpts) -> Result<CliConfig, String> {
    let mut cfg = CliConfig::default();
    if let Some(p) = &opts.config {
        let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
        cfg.apply_file(&p.display().to_string(), &text).map_err(|e| e.to_string())?;
    }
    let c = &mut cfg.check;
    if let Some(v) = opts.depth {
        c.depth = v;
    }
    if let Some(v) = opts.max_steps {
        c.max_steps = v;
    }
    if let Some(v) = opts.epsilon {
        c.epsilon = v;
    }
    if let Some(v) = opts.max_ratio {
        c.max_ratio = v;
    }
    if let Some(v) = opts.evoke_k {
        c.evoke_k = v;
    }
    if let Some(f) = opts.format {
        cfg.format = f;
    }
    if opts.no_color || std::env::var_os("CONCEPTKIT_NO_COLOR").is_some() || !std::io::stdout().is_terminal() {
        cfg.color = false;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve_config(&cli.opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out = match cli.command {
        Command::Validate { paths } => commands::validate(&paths),
        Command::Simulate { app, script, calls, domains, state } => {
            commands::simulate(&app, script.as_deref(), calls.as_deref(), &domains, state)
        }
        Command::Check { scenario, standard, app, ui, benefit, self_entry } => {
            match (scenario, standard, app, self_entry) {
                (Some(s), _, _, _) => commands::check(&commands::CheckTarget::Scenario(s), &cfg),
                (_, _, _, Some(e)) => commands::check(&commands::CheckTarget::SelfCheck(e), &cfg),
                (_, Some(standard), Some(app), _) => {
                    commands::check(&commands::CheckTarget::Design { standard, app, ui, benefit }, &cfg)
                }
                _ => commands::Outcome::fail("check needs a scenario, --standard with --app, or --self"),
            }
        }
        Command::Corpus { dir, all } => commands::corpus(dir.as_deref(), all, &cfg),
        Command::Catalog { action: CatalogCmd::List } => commands::catalog_list(),
        Command::Catalog { action: CatalogCmd::Show { name } } => commands::catalog_show(&name),
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.stdout.as_bytes());
    let _ = stdout.flush();
    if !out.stderr.is_empty() {
        eprint!("{}", out.stderr);
    }
    ExitCode::from(out.code)
}
