//! Batch front end: ingest JSON descriptions, run computations, emit tables
//! or JSON. Exit codes: 0 on success, 1 on verification failure, 2 on input
//! or validation errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use homalg::barcobar::{self, AlgebraData};
use homalg::complexes::GradedGroup;
use homalg::error::HomalgError;
use homalg::exactlin::FgAbGroup;
use homalg::filtered::{piling, DoubleComplex, FilteredComplex};
use homalg::json::{from_json_str, group_to_json, ncpoly_to_json, table_to_json, to_json_string};
use homalg::koszul::{lambda_n, massey_power};
use homalg::specseq;

#[derive(Parser)]
#[command(
    name = "homalg",
    about = "Exact-arithmetic workbench for filtered complexes, spectral sequences and weight-graded dgas over the integers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct IoArgs {
    /// Input file(s); repeat the flag for operations taking two inputs
    #[arg(long)]
    input: Vec<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral sequence of a filtered complex (or of the column filtration
    /// of a double complex)
    Ss {
        #[command(subcommand)]
        cmd: SsCommand,
    },
    /// Total complex and its homology
    Tot(IoArgs),
    /// Day convolution of two filtered complexes
    Day(IoArgs),
    /// Weight-graded free dgas: tower homology, single strands, Massey powers
    Koszul {
        #[command(subcommand)]
        cmd: KoszulCommand,
    },
    /// Bar and cobar constructions
    Barcobar {
        #[command(subcommand)]
        cmd: BarcobarCommand,
    },
    /// Run the acceptance checks
    Verify {
        /// Only run criteria whose name contains this substring
        #[arg(long)]
        only: Option<String>,
        /// Seed for the randomized suites
        #[arg(long, default_value_t = 0xD1CE)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum SsCommand {
    /// Dump pages 1..r_max
    Pages {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 3)]
        r_max: i64,
    },
    /// Emit the décalée filtration as a re-ingestable filtered complex
    Decalage {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Run to the stable page and compare with the filtration on homology
    Converge {
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Subcommand)]
enum KoszulCommand {
    /// Bigraded homology table of the n-stage tower algebra
    Lambda {
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 8)]
        max_weight: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// One strand of the tower algebra, with representatives
    Homology {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        topdeg: i64,
        #[arg(long)]
        weight: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// The n-fold Massey power and its verdicts
    Massey {
        #[arg(long)]
        n: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebraName {
    Unit,
    Exterior,
    Polynomial,
    Lambda2,
}

#[derive(Subcommand)]
enum BarcobarCommand {
    /// Homology table of the bar construction of a named algebra
    Bar {
        #[arg(long, value_enum)]
        alg: AlgebraName,
        #[arg(long, default_value_t = 6)]
        max_weight: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Cobar of the n-skeleton coalgebra, with the tower comparison
    Cobar {
        #[arg(long)]
        n: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Compare homology of Cobar(Bar(A)) against A
    Roundtrip {
        #[arg(long, value_enum)]
        alg: AlgebraName,
        #[arg(long, default_value_t = 5)]
        max_weight: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, HomalgError> {
    std::fs::read_to_string(path)
        .map_err(|e| HomalgError::Input(format!("{}: {e}", path.display())))
}

/// Filtered complexes arrive either directly or as a double complex to pile
/// up; the document shape decides.
fn load_filtered(path: &PathBuf) -> Result<FilteredComplex, HomalgError> {
    let text = read_file(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| HomalgError::Input(format!("{}: {e}", path.display())))?;
    if value.get("ambient").is_some() {
        from_json_str::<FilteredComplex>(&text)
    } else if value.get("columns").is_some() {
        let d: DoubleComplex = from_json_str(&text)?;
        piling(&d)
    } else {
        Err(HomalgError::Input(format!(
            "{}: expected a filtered complex (with \"ambient\") or a double complex (with \"columns\")",
            path.display()
        )))
    }
}

fn one_input(io: &IoArgs) -> Result<&PathBuf, HomalgError> {
    match io.input.as_slice() {
        [p] => Ok(p),
        _ => Err(HomalgError::Input(format!(
            "expected exactly one --input, got {}",
            io.input.len()
        ))),
    }
}

fn group_cell(g: &FgAbGroup) -> String {
    format!("{g}")
}

fn print_graded(h: &GradedGroup) {
    if h.is_trivial() {
        println!("  (trivial)");
        return;
    }
    for (n, g) in h.iter() {
        println!("  H^{n} = {g}");
    }
}

fn run(cli: Cli) -> Result<ExitCode, HomalgError> {
    match cli.command {
        Command::Ss { cmd } => run_ss(cmd)?,
        Command::Tot(io) => {
            let path = one_input(&io)?;
            let text = read_file(path)?;
            let d: DoubleComplex = from_json_str(&text)?;
            let f = piling(&d)?;
            match io.format {
                Format::Json => {
                    let doc = serde_json::json!({
                        "total_complex": f.ambient(),
                        "total_homology": f
                            .ambient()
                            .homology()
                            .iter()
                            .map(|(n, g)| (n.to_string(), group_to_json(g)))
                            .collect::<BTreeMap<String, serde_json::Value>>(),
                    });
                    print!("{}", to_json_string(&doc)?);
                }
                Format::Table => {
                    println!("total homology:");
                    print_graded(&f.ambient().homology());
                }
            }
        }
        Command::Day(io) => {
            let (a, b) = match io.input.as_slice() {
                [a, b] => (a, b),
                _ => {
                    return Err(HomalgError::Input(format!(
                        "day takes exactly two --input files, got {}",
                        io.input.len()
                    )))
                }
            };
            let f = load_filtered(a)?;
            let g = load_filtered(b)?;
            let conv = homalg::filtered::day_convolution(&f, &g)?;
            match io.format {
                Format::Json => print!("{}", to_json_string(&conv)?),
                Format::Table => {
                    println!(
                        "convolution: levels {}..{} on a complex supported in {:?}",
                        conv.p_min(),
                        conv.p_max(),
                        conv.ambient().support()
                    );
                    for p in conv.p_min()..=conv.p_max() {
                        let piece = homalg::filtered::graded_piece(&conv, p)?;
                        println!("gr^{p}:");
                        print_graded(&piece.complex().homology());
                    }
                }
            }
        }
        Command::Koszul { cmd } => run_koszul(cmd)?,
        Command::Barcobar { cmd } => run_barcobar(cmd)?,
        Command::Verify { only, seed } => {
            let reports = homalg::verify::run_all(seed, only.as_deref())?;
            if reports.is_empty() {
                return Err(HomalgError::Input("no criterion matches the filter".into()));
            }
            let mut failed = false;
            for r in &reports {
                let verdict = if r.ok() {
                    "ok  "
                } else {
                    failed = true;
                    "FAIL"
                };
                println!("{verdict}  [{:>2}] {:<32} {} case(s)", r.id, r.name, r.cases);
                if !r.detail.is_empty() {
                    println!("      {}", r.detail);
                }
            }
            if failed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_ss(cmd: SsCommand) -> Result<(), HomalgError> {
    match cmd {
        SsCommand::Pages { io, r_max } => {
            let f = load_filtered(one_input(&io)?)?;
            let pgs = specseq::pages(&f, r_max)?;
            match io.format {
                Format::Json => {
                    print!("{}", to_json_string(&pgs)?);
                }
                Format::Table => {
                    for page in &pgs {
                        println!("page r = {}:", page.r);
                        if page.entries.is_empty() {
                            println!("  (empty)");
                        }
                        for (&(p, q), e) in &page.entries {
                            let arrow = match page.differential(p, q) {
                                Some(_) => "  (nonzero differential out)",
                                None => "",
                            };
                            println!("  E^{{{p},{q}}} = {}{arrow}", group_cell(&e.group));
                        }
                    }
                }
            }
        }
        SsCommand::Decalage { io } => {
            let f = load_filtered(one_input(&io)?)?;
            let dec = specseq::decalage(&f)?;
            match io.format {
                Format::Json => print!("{}", to_json_string(&dec)?),
                Format::Table => {
                    println!(
                        "décalée filtration: levels {}..{}",
                        dec.p_min(),
                        dec.p_max()
                    );
                    for p in dec.p_min()..=dec.p_max() {
                        for n in dec.ambient().degrees() {
                            let lvl = dec.level(p, n);
                            println!("  F^{p} C^{n}: rank {}", lvl.rank());
                        }
                    }
                }
            }
        }
        SsCommand::Converge { io } => {
            let f = load_filtered(one_input(&io)?)?;
            let report = specseq::e_infinity_and_convergence(&f)?;
            match io.format {
                Format::Json => print!("{}", to_json_string(&report)?),
                Format::Table => {
                    println!("stabilized at page {}", report.stabilized_at);
                    for c in &report.comparisons {
                        println!(
                            "  degree {}, p = {}: E_inf = {}, gr H = {}  [{}]",
                            c.total_degree,
                            c.p,
                            c.e_infinity,
                            c.graded_homology,
                            if c.matched { "match" } else { "MISMATCH" }
                        );
                    }
                    println!(
                        "strong convergence: {}",
                        if report.all_match { "holds" } else { "FAILS" }
                    );
                }
            }
        }
    }
    Ok(())
}

fn print_table(table: &BTreeMap<(i64, i64), FgAbGroup>) {
    println!("(topdeg, weight) -> group");
    for (&(t, w), g) in table {
        println!("  ({t}, {w}) -> {g}");
    }
}

fn run_koszul(cmd: KoszulCommand) -> Result<(), HomalgError> {
    match cmd {
        KoszulCommand::Lambda {
            n,
            max_weight,
            format,
        } => {
            let a = lambda_n(n)?;
            let table = a.homology_table(max_weight)?;
            match format {
                Format::Json => print!("{}", to_json_string(&table_to_json(&table))?),
                Format::Table => print_table(&table),
            }
        }
        KoszulCommand::Homology {
            n,
            topdeg,
            weight,
            format,
        } => {
            let a = lambda_n(n)?;
            let strand = a.bigraded_homology(topdeg, weight)?;
            match format {
                Format::Json => {
                    let doc = serde_json::json!({
                        "group": group_to_json(&strand.group),
                        "representatives": strand
                            .representatives
                            .iter()
                            .map(|p| ncpoly_to_json(p, a.generators()))
                            .collect::<Vec<_>>(),
                    });
                    print!("{}", to_json_string(&doc)?);
                }
                Format::Table => {
                    println!("H_({topdeg},{weight}) = {}", strand.group);
                    for rep in &strand.representatives {
                        println!("  generator: {}", rep.display(a.generators()));
                    }
                }
            }
        }
        KoszulCommand::Massey { n, format } => {
            let rep = massey_power(n)?;
            let lower = lambda_n(n - 1)?;
            match format {
                Format::Json => {
                    let doc = serde_json::json!({
                        "n": rep.n,
                        "power": ncpoly_to_json(&rep.power, lower.generators()),
                        "is_cycle": rep.is_cycle,
                        "lower_group": group_to_json(&rep.lower_group),
                        "generates": rep.generates,
                        "vanishes_after_attachment": rep.vanishes_after_attachment,
                    });
                    print!("{}", to_json_string(&doc)?);
                }
                Format::Table => {
                    println!("r_{n} = {}", rep.power.display(lower.generators()));
                    println!("  cycle: {}", rep.is_cycle);
                    println!(
                        "  generates H_({}, {}) = {}: {}",
                        n - 2,
                        n,
                        rep.lower_group,
                        rep.generates
                    );
                    println!("  vanishes one stage up: {}", rep.vanishes_after_attachment);
                }
            }
        }
    }
    Ok(())
}

fn named_algebra(alg: AlgebraName, max_weight: i64) -> Result<AlgebraData, HomalgError> {
    Ok(match alg {
        AlgebraName::Unit => AlgebraData::unit_algebra(max_weight),
        AlgebraName::Exterior => AlgebraData::exterior(max_weight),
        AlgebraName::Polynomial => AlgebraData::free_on_degree_zero_generator(max_weight),
        AlgebraName::Lambda2 => AlgebraData::from_free_dga(&lambda_n(2)?, max_weight)?,
    })
}

fn run_barcobar(cmd: BarcobarCommand) -> Result<(), HomalgError> {
    match cmd {
        BarcobarCommand::Bar {
            alg,
            max_weight,
            format,
        } => {
            let a = named_algebra(alg, max_weight)?;
            let b = barcobar::bar(&a, max_weight)?;
            let table = b.homology_table(max_weight)?;
            match format {
                Format::Json => print!("{}", to_json_string(&table_to_json(&table))?),
                Format::Table => print_table(&table),
            }
        }
        BarcobarCommand::Cobar { n, format } => {
            let c = barcobar::skeleton_coalgebra(n)?;
            let cb = barcobar::cobar(&c)?;
            let matches_tower = if n >= 1 {
                cb.structurally_equal(&lambda_n(n)?)
            } else {
                cb.generators().is_empty()
            };
            match format {
                Format::Json => {
                    let gens: Vec<serde_json::Value> = cb
                        .generators()
                        .iter()
                        .enumerate()
                        .map(|(i, g)| {
                            serde_json::json!({
                                "name": g.name,
                                "topdeg": g.topdeg,
                                "weight": g.weight,
                                "differential": ncpoly_to_json(
                                    cb.generator_differential(i),
                                    cb.generators()
                                ),
                            })
                        })
                        .collect();
                    let doc = serde_json::json!({
                        "generators": gens,
                        "matches_tower_presentation": matches_tower,
                    });
                    print!("{}", to_json_string(&doc)?);
                }
                Format::Table => {
                    for (i, g) in cb.generators().iter().enumerate() {
                        let mut line = String::new();
                        write!(
                            line,
                            "  {} in bidegree ({}, {}): d = {}",
                            g.name,
                            g.topdeg,
                            g.weight,
                            cb.generator_differential(i).display(cb.generators())
                        )
                        .ok();
                        println!("{line}");
                    }
                    println!("matches the tower presentation: {matches_tower}");
                }
            }
        }
        BarcobarCommand::Roundtrip {
            alg,
            max_weight,
            format,
        } => {
            let a = named_algebra(alg, max_weight)?;
            let rep = barcobar::bar_cobar_homology_check(&a, max_weight)?;
            match format {
                Format::Json => {
                    let doc = serde_json::json!({
                        "cutoff": rep.cutoff,
                        "algebra": table_to_json(&rep.algebra_homology),
                        "roundtrip": table_to_json(&rep.roundtrip_homology),
                        "mismatches": rep
                            .mismatches
                            .iter()
                            .map(|&(t, w)| format!("{t},{w}"))
                            .collect::<Vec<_>>(),
                    });
                    print!("{}", to_json_string(&doc)?);
                }
                Format::Table => {
                    println!("algebra homology:");
                    print_table(&rep.algebra_homology);
                    println!("cobar-bar homology:");
                    print_table(&rep.roundtrip_homology);
                    println!(
                        "round trip: {}",
                        if rep.all_match() {
                            "all bidegrees match"
                        } else {
                            "MISMATCHES"
                        }
                    );
                }
            }
        }
    }
    Ok(())
}
