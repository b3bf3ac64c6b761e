use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use koszulkit::massey::{DEFAULT_SEED, SEED_ENV};
use koszulkit_cli::acceptance::{bundles, file_checks, run_all};
use koszulkit_cli::corpus::{entry, CORPUS};
use koszulkit_cli::{digest, registry, CliError, Input, Options, Report, EXIT_INVARIANT, EXIT_OK};

#[derive(Parser)]
#[command(name = "koszulkit", version, about = "Exact checks on nonhomogeneous quadratic presentations")]
struct Cli {
    /// Emit one JSON document instead of tables
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the leading-form algebra with gr_N A
    SelfConsistency { file: PathBuf },
    /// Koszulity of H*(Cob C) in a weight window
    Koszul {
        file: PathBuf,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Quadratic dual of the leading quadratic relations
    Dual {
        file: PathBuf,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Cohomology of Cob C and Cob gr C
    Cohomology {
        file: PathBuf,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Eilenberg-Moore pages with audit
    EmPages {
        file: PathBuf,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        rmax: Option<usize>,
    },
    /// Tuple and tensor Massey products
    Massey {
        file: PathBuf,
        #[arg(long)]
        window: Option<usize>,
        /// H^1 basis indices, three or four, comma separated
        #[arg(long, value_delimiter = ',')]
        classes: Option<Vec<usize>>,
    },
    /// K iff (QF and K(pi,1))
    MainTheorem {
        file: PathBuf,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        rmax: Option<usize>,
    },
    /// Non-formality certificate
    CertifyNonformal {
        file: PathBuf,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Acceptance criteria on the bundled corpus, or checks on the given files
    CorpusRun { files: Vec<PathBuf> },
    /// List the registered checks
    List,
}

fn seed() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Err(_) => Ok(DEFAULT_SEED),
        Ok(s) => s.trim().parse().map_err(|_| CliError::Input(format!("{SEED_ENV}={s} is not an unsigned integer"))),
    }
}

fn fields(inputs: &[&Input]) -> String {
    let set: std::collections::BTreeSet<String> = inputs.iter().map(|i| i.presentation.field.name()).collect();
    set.into_iter().collect::<Vec<_>>().join(",")
}

fn corpus_run(files: &[PathBuf], seed: u64) -> Result<(Report, bool), CliError> {
    if files.is_empty() {
        let inputs: Vec<Input> =
            CORPUS.iter().map(|e| Input::parse(&format!("{}.kpres", e.name), e.text)).collect::<Result<_, _>>()?;
        let refs: Vec<&Input> = inputs.iter().collect();
        let joined: String = inputs.iter().map(|i| format!("{} {}\n", i.name, i.digest)).collect();
        let trunc = inputs.iter().map(|i| i.presentation.trunc).max().unwrap_or(0);
        let mut r = Report::new("corpus-run", "bundled corpus", &digest(&joined), &fields(&refs), trunc);
        for e in CORPUS {
            r.window(e.name, e.window);
        }
        let outcomes = run_all(seed);
        let mut ok = true;
        for o in &outcomes {
            let name = format!("criterion-{}", o.id);
            if o.pass {
                r.verdict(&name, format!("PASS: {}", o.title), None);
            } else {
                ok = false;
                r.negative(&name, format!("FAIL: {}", o.title), None);
                r.witness(&name, o.detail.clone());
            }
        }
        let rows = outcomes
            .iter()
            .map(|o| vec![o.id.to_string(), if o.pass { "PASS" } else { "FAIL" }.to_string(), o.detail.clone()])
            .collect();
        r.table("acceptance", &["criterion", "result", "detail"], rows);
        r.check(&format!("seed {seed}"));
        return Ok((r, ok));
    }
    let mut inputs = Vec::new();
    for f in files {
        inputs.push(Input::read(f)?);
    }
    inputs.sort_by(|a, b| a.name.cmp(&b.name));
    let refs: Vec<&Input> = inputs.iter().collect();
    let joined: String = inputs.iter().map(|i| format!("{} {}\n", i.name, i.digest)).collect();
    let trunc = inputs.iter().map(|i| i.presentation.trunc).max().unwrap_or(0);
    let names = inputs.iter().map(|i| i.name.clone()).collect::<Vec<_>>().join(",");
    let mut r = Report::new("corpus-run", &names, &digest(&joined), &fields(&refs), trunc);
    let with_windows: Vec<(Input, usize)> = inputs
        .iter()
        .map(|i| {
            let w = entry(i.stem()).map(|e| e.window).unwrap_or(i.presentation.trunc);
            (i.clone(), w)
        })
        .collect();
    for (i, w) in &with_windows {
        r.window(&i.name, *w);
    }
    let mut ok = true;
    for b in bundles(with_windows) {
        for (check, res) in file_checks(&b, seed) {
            let name = format!("{}: {check}", b.input.name);
            match res {
                Ok((true, d)) => {
                    r.verdict(&name, format!("PASS ({d})"), Some(b.window));
                }
                Ok((false, d)) => {
                    ok = false;
                    r.negative(&name, "FAIL", Some(b.window));
                    r.witness(&name, d);
                }
                Err(e) => {
                    ok = false;
                    r.negative(&name, "FAIL", Some(b.window));
                    r.witness(&name, e.to_string());
                }
            }
        }
    }
    r.check(&format!("seed {seed}"));
    Ok((r, ok))
}

fn run(cli: &Cli) -> Result<(Report, bool), CliError> {
    let seed = seed()?;
    let reg = registry();
    let (name, file, opts) = match &cli.command {
        Command::CorpusRun { files } => return corpus_run(files, seed),
        Command::List => unreachable!("handled in main"),
        Command::SelfConsistency { file } => ("self-consistency", file, Options::default()),
        Command::Koszul { file, window } => ("koszul", file, Options { window: *window, ..Default::default() }),
        Command::Dual { file, window } => ("dual", file, Options { window: *window, ..Default::default() }),
        Command::Cohomology { file, window } => {
            ("cohomology", file, Options { window: *window, ..Default::default() })
        }
        Command::EmPages { file, window, rmax } => {
            ("em-pages", file, Options { window: *window, rmax: *rmax, ..Default::default() })
        }
        Command::Massey { file, window, classes } => {
            ("massey", file, Options { window: *window, classes: classes.clone(), ..Default::default() })
        }
        Command::MainTheorem { file, window, rmax } => {
            ("main-theorem", file, Options { window: *window, rmax: *rmax, ..Default::default() })
        }
        Command::CertifyNonformal { file, window } => {
            ("certify-nonformal", file, Options { window: *window, ..Default::default() })
        }
    };
    let input = Input::read(file)?;
    let report = reg.run(name, &input, &Options { seed, ..opts })?;
    Ok((report, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::List = cli.command {
        let reg = registry();
        for name in reg.names() {
            println!("{name:<18} {}", reg.get(name).map(|c| c.about()).unwrap_or(""));
        }
        return ExitCode::from(EXIT_OK as u8);
    }
    match run(&cli) {
        Ok((report, ok)) => {
            let out = if cli.json { report.to_json() } else { report.to_text() };
            print!("{out}");
            ExitCode::from(if ok { EXIT_OK } else { EXIT_INVARIANT } as u8)
        }
        Err(e) => {
            eprintln!("koszulkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
