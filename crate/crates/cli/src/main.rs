//! Batch CLI over the altforms library.
//!
//! Exit codes: 0 success (claims hold on inspected elements), 1 claim
//! violation, 2 parse/usage error, 3 precondition violation, 4 I/O error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use altforms::dependence::{
    annihilator_poly, dependent_via_elim, dependent_via_moore, kernel_of_sigma_poly, moore_matrix,
    MooreMatrix, SigmaPoly,
};
use altforms::export::{build_bundle, render_bundle, ExportBundle};
use altforms::forms::{build_alt_form, rank, GramForm, RankReport};
use altforms::parse::{parse_element, render_element};
use altforms::spaces::{bil_census, rank_census, CensusMode, CensusReport};
use altforms::verify::{verify_tower, CheckResult};
use altforms::{make_tower, Error, FieldElement, TowerField, TowerParams};

/// Default seed; spells "ALTFORMS" in ASCII.
const DEFAULT_SEED: u64 = 0x414C_5446_4F52_4D53;
const DEFAULT_BUDGET: u128 = 1 << 24;

#[derive(Parser)]
#[command(name = "altforms", about = "Exact trace-form algebra over Galois towers")]
struct Cli {
    /// Characteristic of the base field GF(p).
    #[arg(long, global = true, default_value_t = 2)]
    p: u64,
    /// Degree of K over GF(p).
    #[arg(long, global = true, default_value_t = 1)]
    s: usize,
    /// Degree of L over K.
    #[arg(long, global = true, default_value_t = 3)]
    n: usize,
    /// Seed for all randomized machinery.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Cap on elements inspected by exhaustive modes.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Census worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Human-readable text instead of JSON.
    #[arg(long, global = true, default_value_t = false)]
    plain: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CensusKind {
    Alt,
    Bil,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Build f_{b,sigma^i}, compute its rank and compare with the formula.
    Form {
        /// Element b: shorthand like "(u+1)*v^2+1" or JSON coordinates.
        #[arg(long)]
        b: String,
        /// Automorphism index i (sigma^i must not be the identity).
        #[arg(long)]
        i: usize,
    },
    /// Rank census over a direct sum of form subspaces.
    Census {
        /// Comma-separated automorphism indices.
        #[arg(long)]
        indices: String,
        #[arg(long, value_enum, default_value_t = CensusKind::Alt)]
        kind: CensusKind,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        /// Sample count for --mode random.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Run the full per-tower check suite.
    Verify,
    /// Export the subspace decomposition as a reproducible bundle.
    Export {
        /// Comma-separated block filter: any of "alt", "bil".
        #[arg(long, default_value = "alt")]
        what: String,
    },
    /// Moore-matrix dependence test for a tuple of elements.
    Moore {
        /// Elements, each in shorthand or JSON form.
        elements: Vec<String>,
    },
    /// Monic sigma-polynomial annihilating the span of independent elements.
    Annihilator {
        elements: Vec<String>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_) => 2,
        _ => 3,
    }
}

fn parse_any_element(tower: &TowerField, text: &str) -> Result<FieldElement, Error> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let coords: Vec<Vec<u64>> = serde_json::from_str(trimmed)
            .map_err(|e| Error::Parse(format!("element JSON: {e}")))?;
        if coords.len() != tower.n() {
            return Err(Error::Parse(format!(
                "element needs {} coordinates, got {}",
                tower.n(),
                coords.len()
            )));
        }
        let ks = coords
            .iter()
            .map(|c| tower.k_from_coeffs(c))
            .collect::<Result<Vec<_>, _>>()?;
        tower.from_coords(ks)
    } else {
        parse_element(tower, trimmed)
    }
}

fn parse_indices(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("index '{t}': {e}")))
        })
        .collect()
}

fn write_output(out: &Option<std::path::PathBuf>, text: &str) -> Result<(), std::io::Error> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

#[derive(Serialize)]
struct FormOutput {
    gram: GramForm,
    report: RankReport,
}

#[derive(Serialize)]
struct MooreOutput {
    matrix: MooreMatrix,
    dependent: bool,
}

#[derive(Serialize)]
struct AnnihilatorOutput {
    poly: SigmaPoly,
    kernel: Vec<FieldElement>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Output {
    Form(FormOutput),
    Census(CensusReport),
    Verify(Vec<CheckResult>),
    Export(Box<ExportBundle>),
    Moore(MooreOutput),
    Annihilator(AnnihilatorOutput),
}

fn render_plain(tower: &TowerField, out: &Output) -> String {
    match out {
        Output::Form(f) => {
            let mut text = String::new();
            for row in 0..f.gram.n() {
                let cells: Vec<String> = (0..f.gram.n())
                    .map(|col| format!("{:?}", f.gram.entry(row, col).coeffs()))
                    .collect();
                text.push_str(&cells.join(" "));
                text.push('\n');
            }
            text.push_str(&format!("rank {}\n", f.report.rank));
            if let Some(p) = &f.report.predicted {
                text.push_str(&format!("predicted {} ({:?})\n", p.rank, p.branch));
            }
            text
        }
        Output::Census(c) => {
            let mut text = format!("census {}\ninspected {}\n", c.space, c.inspected);
            for (r, count) in &c.ranks {
                text.push_str(&format!("rank {r}: {count}\n"));
            }
            for (r, tuple) in &c.witnesses {
                let rendered: Vec<String> =
                    tuple.iter().map(|x| render_element(tower, x)).collect();
                text.push_str(&format!("witness rank {r}: ({})\n", rendered.join(", ")));
            }
            text
        }
        Output::Verify(checks) => {
            let mut text = String::new();
            for c in checks {
                text.push_str(&format!(
                    "{}: {} ({}){}\n",
                    c.name,
                    if c.passed { "pass" } else { "FAIL" },
                    c.detail,
                    if c.sampled { " [sampled]" } else { "" }
                ));
            }
            text
        }
        Output::Export(bundle) => render_bundle(tower, bundle),
        Output::Moore(m) => {
            let mut text = String::new();
            for row in &m.matrix.rows {
                let cells: Vec<String> = row.iter().map(|x| render_element(tower, x)).collect();
                text.push_str(&cells.join(" | "));
                text.push('\n');
            }
            text.push_str(&format!(
                "{}\n",
                if m.dependent { "dependent" } else { "independent" }
            ));
            text
        }
        Output::Annihilator(a) => {
            let coeffs: Vec<String> = a
                .poly
                .coeffs
                .iter()
                .map(|c| render_element(tower, c))
                .collect();
            let mut text = format!("coefficients (low degree first): {}\n", coeffs.join(", "));
            let ker: Vec<String> = a.kernel.iter().map(|x| render_element(tower, x)).collect();
            text.push_str(&format!("kernel basis: {}\n", ker.join(", ")));
            text
        }
    }
}

/// Returns the output plus the exit code demanded by the claim contract.
fn run(cli: &Cli) -> Result<(Output, u8), Error> {
    let tower = make_tower(
        TowerParams {
            p: cli.p,
            s: cli.s,
            n: cli.n,
        },
        cli.budget.max(altforms::DEFAULT_SIZE_GUARD),
    )?;
    match &cli.command {
        Command::Form { b, i } => {
            let b = parse_any_element(&tower, b)?;
            let gram = build_alt_form(&tower, &b, *i)?;
            let report = rank(&tower, &gram)?;
            let agree = report
                .predicted
                .as_ref()
                .map_or(true, |p| p.rank == report.rank);
            let code = if agree { 0 } else { 1 };
            Ok((Output::Form(FormOutput { gram, report }), code))
        }
        Command::Census {
            indices,
            kind,
            mode,
            samples,
        } => {
            let indices = parse_indices(indices)?;
            let mode = match mode {
                ModeArg::Exhaustive => CensusMode::Exhaustive,
                ModeArg::Random => CensusMode::Random { samples: *samples },
            };
            let report = match kind {
                CensusKind::Alt => rank_census(
                    &tower,
                    &indices,
                    mode,
                    cli.budget,
                    cli.seed,
                    cli.workers,
                )?,
                CensusKind::Bil => bil_census(
                    &tower,
                    &indices,
                    mode,
                    cli.budget,
                    cli.seed,
                    cli.workers,
                )?,
            };
            let n = tower.n();
            // Rank bound certified by the sigma-polynomial degree of the
            // radical condition. A^i = A^{n-i}, so alternating indices fold
            // into [1, n/2]; for indices 1..k this is the n-2k+1 (n odd)
            // or n-2k (n even) bound, with k the largest index involved.
            let bound = match kind {
                CensusKind::Alt => {
                    let m = indices
                        .iter()
                        .map(|&i| (i % n).min(n - i % n))
                        .max()
                        .unwrap_or(0);
                    if n % 2 == 1 {
                        (n + 1).saturating_sub(2 * m)
                    } else {
                        n.saturating_sub(2 * m)
                    }
                }
                // bilinear exponents bound the radical dimension by the
                // largest exponent; for B_1..B_k this is n-k+1
                CensusKind::Bil => n - indices.iter().copied().max().unwrap_or(0),
            };
            let code = match report.min_rank {
                Some(r) if r < bound => 1,
                _ => 0,
            };
            Ok((Output::Census(report), code))
        }
        Command::Verify => {
            let checks = verify_tower(&tower, cli.budget, cli.seed)?;
            let code = if checks.iter().all(|c| c.passed) { 0 } else { 1 };
            Ok((Output::Verify(checks), code))
        }
        Command::Export { what } => {
            let blocks: Vec<&str> = what
                .split(',')
                .map(|t| t.trim())
                .filter(|t| !t.is_empty())
                .collect();
            if blocks.is_empty() {
                return Err(Error::Precondition("empty export filter".into()));
            }
            for b in &blocks {
                if !matches!(*b, "alt" | "bil") {
                    return Err(Error::Parse(format!("unknown export block '{b}'")));
                }
            }
            let mut bundle = build_bundle(&tower, blocks.contains(&"bil"))?;
            if !blocks.contains(&"alt") {
                bundle.alt_spaces.clear();
            }
            Ok((Output::Export(Box::new(bundle)), 0))
        }
        Command::Moore { elements } => {
            if elements.is_empty() {
                return Err(Error::Precondition("moore needs at least one element".into()));
            }
            let xs = elements
                .iter()
                .map(|t| parse_any_element(&tower, t))
                .collect::<Result<Vec<_>, _>>()?;
            let matrix = moore_matrix(&tower, &xs)?;
            let dependent = dependent_via_moore(&tower, &xs)?;
            debug_assert_eq!(dependent, dependent_via_elim(&tower, &xs));
            Ok((Output::Moore(MooreOutput { matrix, dependent }), 0))
        }
        Command::Annihilator { elements } => {
            if elements.is_empty() {
                return Err(Error::Precondition(
                    "annihilator needs at least one element".into(),
                ));
            }
            let xs = elements
                .iter()
                .map(|t| parse_any_element(&tower, t))
                .collect::<Result<Vec<_>, _>>()?;
            let poly = annihilator_poly(&tower, &xs)?;
            let kernel = kernel_of_sigma_poly(&tower, &poly)?;
            Ok((Output::Annihilator(AnnihilatorOutput { poly, kernel }), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (output, code) = match run(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    // Rebuild the tower only for plain rendering of elements.
    let text = if cli.plain {
        let tower = make_tower(
            TowerParams {
                p: cli.p,
                s: cli.s,
                n: cli.n,
            },
            cli.budget.max(altforms::DEFAULT_SIZE_GUARD),
        )
        .expect("tower already built once");
        render_plain(&tower, &output)
    } else {
        let mut s = serde_json::to_string_pretty(&output).expect("output serializes");
        s.push('\n');
        s
    };
    if let Err(e) = write_output(&cli.out, &text) {
        eprintln!("error: {e}");
        return ExitCode::from(4);
    }
    ExitCode::from(code)
}
