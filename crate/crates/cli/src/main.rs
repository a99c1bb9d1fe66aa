//! Batch command surface over the exact packing-formulation toolkit:
//! idealness certification, vertex reports, circuit search, solver-model
//! export with hint sidecars, lemma verification, instance generation and
//! run summaries. Identical arguments and files always produce identical
//! artifacts, for any worker count.

use clap::{Args, Parser, Subcommand};
use packideal_core::enumerate::{
    check_ideal, enumerate_extreme_points, witness_json, EnumerateOptions, IdealVerdict,
};
use packideal_core::export::{export, ExportFormat};
use packideal_core::formulations::{build, BuildOptions, FormulationKind, PairScope};
use packideal_core::gen::{generate, GenSpec};
use packideal_core::greedy::{greedy_pack, validate_layout};
use packideal_core::iom::{big_m_bound, build_iom, build_separation};
use packideal_core::lemmas::{dependence_covers, verify_lemma, ItemStatus, LemmaId};
use packideal_core::mblp::{compose_relaxation, tight_rows, Point, Relaxation};
use packideal_core::spark::{spark, spark_circuits, SparkOptions};
use packideal_core::spp::{build_spp, CutFamily, SppOptions};
use packideal_core::summarize::{records_from_json, summarize};
use packideal_core::{rat_from_str, rat_to_string, Rat, RatMatrix, RppInstance};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_IDEAL: u8 = 3;

#[derive(Parser)]
#[command(name = "packideal", version, about = "Exact idealness toolkit for rectangle-packing formulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Formulation: su, ru, nu, hu, sbl or sbm.
    #[arg(long)]
    kind: String,
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    /// Build even if the instance is trivial.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Certify or refute pairwise idealness by exhaustive enumeration.
    /// Exits 0 when ideal, 3 with a witness file when not.
    CheckIdeal {
        #[command(flatten)]
        model: ModelArgs,
        /// Worker threads for the subset sweep.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Where to write the fractional witness when one exists.
        #[arg(long, default_value = "witness.json")]
        out: PathBuf,
    },
    /// Emit the full extreme-point report (vertices plus any fractional
    /// witnesses) as JSON.
    Witness {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find all minimal dependent row subsets (circuits) of a tight system,
    /// either from a matrix file or from a witness point on a formulation.
    Circuits {
        /// JSON matrix {"rows": [["p/q", ...], ...]} to search directly.
        #[arg(long, conflicts_with_all = ["kind", "instance", "at"])]
        matrix: Option<PathBuf>,
        #[arg(long, requires = "instance", requires = "at")]
        kind: Option<String>,
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Witness JSON whose tight rows form the system.
        #[arg(long)]
        at: Option<PathBuf>,
        #[arg(long, default_value_t = 24)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also export the circuit-separation MILP for the tight system.
        #[arg(long)]
        emit_separation: Option<PathBuf>,
        /// Big-M for the separation model (defaults to the encoding bound).
        #[arg(long)]
        big_m: Option<String>,
        #[arg(long, default_value = "lp")]
        format: String,
    },
    /// Construct the penalty-maximization MILP over a formulation's
    /// relaxation and export it for an external solver.
    BuildIom {
        #[command(flatten)]
        model: ModelArgs,
        /// Cover source: none, or the verified lemma dependence covers.
        #[arg(long, default_value = "none")]
        covers: String,
        /// Big-M (defaults to the conservative encoding bound).
        #[arg(long)]
        big_m: Option<String>,
        #[arg(long, default_value = "lp")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the dependence-cover lemma items on an instance.
    VerifyLemmas {
        /// L2, L3, L4 or all.
        #[arg(long, default_value = "all")]
        lemma: String,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate seeded strip-packing instances.
    Gen {
        #[arg(long)]
        seed: u64,
        /// Objects per instance.
        #[arg(short = 'n', long)]
        n_objects: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = "100")]
        strip_width: String,
        /// Directory for the instance files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Pack an instance with the greedy row heuristic and validate it.
    Greedy {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the strip-packing model and export it with a hints sidecar.
    Export {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "lp")]
        format: String,
        /// Sequence-pair cuts: spu, spb or none.
        #[arg(long, default_value = "none")]
        cuts: String,
        /// Attach branching priorities to the sidecar.
        #[arg(long)]
        priorities: bool,
        /// Attach the greedy warm start to the sidecar.
        #[arg(long)]
        warm: bool,
        /// Output base path; writes <base>.<format> and <base>.hints.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Render solver run records as an aligned comparison table.
    Summarize {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out_text: Option<PathBuf>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn read_instance(path: &Path) -> Result<RppInstance, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    RppInstance::from_json(&text).map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> Result<FormulationKind, String> {
    s.parse()
}

fn build_from_args(args: &ModelArgs) -> Result<(FormulationKind, RppInstance, packideal_core::MblpModel), String> {
    let kind = parse_kind(&args.kind)?;
    let inst = read_instance(&args.instance)?;
    let model = build(
        kind,
        &inst,
        PairScope::All,
        &BuildOptions {
            force: args.force,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    Ok((kind, inst, model))
}

fn write_out(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn parse_big_m(arg: &Option<String>, model: &packideal_core::MblpModel) -> Result<Rat, String> {
    match arg {
        Some(s) => rat_from_str(s),
        None => Ok(big_m_bound(model)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => fail(msg),
    }
}

fn run(cmd: Command) -> Result<ExitCode, String> {
    match cmd {
        Command::CheckIdeal {
            model,
            threads,
            out,
        } => {
            let (kind, _, m) = build_from_args(&model)?;
            let opts = EnumerateOptions {
                threads,
                ..Default::default()
            };
            let verdict = check_ideal(&m, &opts).map_err(|e| e.to_string())?;
            match verdict {
                IdealVerdict::Ideal => {
                    println!("{kind}: ideal");
                    Ok(ExitCode::from(EXIT_OK))
                }
                IdealVerdict::NotIdeal(w) => {
                    let relax = compose_relaxation(&m);
                    write_out(&out, &witness_json(&w, &relax))?;
                    println!(
                        "{kind}: not ideal, witness written to {} (phi = {})",
                        out.display(),
                        rat_to_string(&w.phi_value)
                    );
                    Ok(ExitCode::from(EXIT_NOT_IDEAL))
                }
            }
        }
        Command::Witness {
            model,
            threads,
            out,
        } => {
            let (_, _, m) = build_from_args(&model)?;
            let relax = compose_relaxation(&m);
            let opts = EnumerateOptions {
                threads,
                ..Default::default()
            };
            let report = enumerate_extreme_points(&relax, &opts).map_err(|e| e.to_string())?;
            let doc = report_json(&report, &relax);
            match out {
                Some(path) => write_out(&path, &doc)?,
                None => print!("{doc}"),
            }
            Ok(ExitCode::from(EXIT_OK))
        }
        Command::Circuits {
            matrix,
            kind,
            instance,
            at,
            cap,
            out,
            emit_separation,
            big_m,
            format,
        } => {
            let (t_aug, labels, source_model) = match (matrix, kind) {
                (Some(path), _) => {
                    let (t, labels) = read_matrix(&path)?;
                    (t, labels, None)
                }
                (None, Some(kind_str)) => {
                    let inst = read_instance(instance.as_deref().ok_or("--instance required")?)?;
                    let at = at.as_deref().ok_or("--at witness file required")?;
                    let (t, labels, model) = tight_system(&kind_str, &inst, at)?;
                    (t, labels, Some(model))
                }
                (None, None) => return Err("pass either --matrix or --kind/--instance/--at".into()),
            };
            let circuits = spark_circuits(&t_aug, &SparkOptions { row_cap: cap })
                .map_err(|e| e.to_string())?;
            let doc = circuits_json(&circuits, &labels);
            match &out {
                Some(path) => write_out(path, &doc)?,
                None => print!("{doc}"),
            }
            if let Some(sep_path) = emit_separation {
                let m_val = match (&big_m, &source_model) {
                    (Some(s), _) => rat_from_str(s)?,
                    (None, Some(model)) => big_m_bound(model),
                    (None, None) => {
                        return Err("--big-m is required with --matrix input".into())
                    }
                };
                let sep = build_separation(&t_aug, m_val).map_err(|e| e.to_string())?;
                let fmt: ExportFormat = format.parse()?;
                write_out(&sep_path, &export(&sep.milp, Some(&sep.objective), fmt))?;
            }
            Ok(ExitCode::from(EXIT_OK))
        }
        Command::BuildIom {
            model,
            covers,
            big_m,
            format,
            out,
        } => {
            let (kind, inst, m) = build_from_args(&model)?;
            let cover_sets = match covers.as_str() {
                "none" => Vec::new(),
                "lemmas" => {
                    let id = match kind {
                        FormulationKind::Su => LemmaId::L2,
                        FormulationKind::Ru => LemmaId::L3,
                        FormulationKind::Sbm => LemmaId::L4,
                        other => {
                            return Err(format!(
                                "no lemma cover family is defined for {other}"
                            ))
                        }
                    };
                    dependence_covers(id, &inst).map_err(|e| e.to_string())?
                }
                other => return Err(format!("unknown cover source {other:?}")),
            };
            let m_val = parse_big_m(&big_m, &m)?;
            let iom = build_iom(&m, &cover_sets, m_val).map_err(|e| e.to_string())?;
            let fmt: ExportFormat = format.parse()?;
            let text = export(&iom.iom, Some(&iom.objective), fmt);
            match out {
                Some(path) => write_out(&path, &text)?,
                None => print!("{text}"),
            }
            eprintln!(
                "covers installed: {}, big-M: {}",
                iom.covers.len(),
                rat_to_string(&iom.big_m)
            );
            Ok(ExitCode::from(EXIT_OK))
        }
        Command::VerifyLemmas {
            lemma,
            instance,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let ids: Vec<LemmaId> = if lemma.eq_ignore_ascii_case("all") {
                vec![LemmaId::L2, LemmaId::L3, LemmaId::L4]
            } else {
                vec![lemma.parse()?]
            };
            let mut all_ok = true;
            let mut docs = Vec::new();
            for id in ids {
                let report = verify_lemma(id, &inst).map_err(|e| e.to_string())?;
                for item in &report.items {
                    let label = match item.status {
                        ItemStatus::Pass => "pass",
                        ItemStatus::Fail => "FAIL",
                        ItemStatus::Skipped => "skipped (hypothesis not met)",
                    };
                    println!("{}: {label}", item.id);
                }
                all_ok &= report.all_passed();
                docs.push(report.to_json());
            }
            if let Some(path) = out {
                write_out(&path, &docs.join(""))?;
            }
            Ok(ExitCode::from(if all_ok { EXIT_OK } else { 1 }))
        }
        Command::Gen {
            seed,
            n_objects,
            count,
            strip_width,
            out_dir,
        } => {
            let mut spec = GenSpec::new(n_objects, seed);
            spec.strip_width = rat_from_str(&strip_width)?;
            let instances = generate(&spec, count);
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;
            for (i, inst) in instances.iter().enumerate() {
                let path = out_dir.join(format!("inst_n{n_objects}_s{seed}_{i}.json"));
                write_out(&path, &inst.to_json())?;
                println!("{}", path.display());
            }
            Ok(ExitCode::from(EXIT_OK))
        }
        Command::Greedy { instance, out } => {
            let inst = read_instance(&instance)?;
            let layout = greedy_pack(&inst).map_err(|e| e.to_string())?;
            let violations = validate_layout(&inst, &layout.centers);
            let doc = layout_json(&layout, violations.len());
            match out {
                Some(path) => write_out(&path, &doc)?,
                None => print!("{doc}"),
            }
            Ok(ExitCode::from(EXIT_OK))
        }
        Command::Export {
            model,
            format,
            cuts,
            priorities,
            warm,
            out,
        } => {
            let kind = parse_kind(&model.kind)?;
            let inst = read_instance(&model.instance)?;
            let options = SppOptions {
                cuts: cuts.parse::<CutFamily>()?,
                priorities,
                warm,
            };
            let built = build_spp(&inst, kind, &options).map_err(|e| e.to_string())?;
            let fmt: ExportFormat = format.parse()?;
            let model_path = out.with_extension(match fmt {
                ExportFormat::Lp => "lp",
                ExportFormat::Mps => "mps",
            });
            write_out(&model_path, &export(&built.model, Some(&built.objective), fmt))?;
            let hints_path = out.with_extension("hints.json");
            write_out(&hints_path, &built.hints.to_json())?;
            println!("{}", model_path.display());
            println!("{}", hints_path.display());
            Ok(ExitCode::from(EXIT_OK))
        }
        Command::Summarize {
            records,
            out_text,
            out_json,
        } => {
            let text = std::fs::read_to_string(&records)
                .map_err(|e| format!("cannot read {}: {e}", records.display()))?;
            let parsed = records_from_json(&text).map_err(|e| e.to_string())?;
            let (table, json) = summarize(&parsed);
            print!("{table}");
            if let Some(path) = out_text {
                write_out(&path, &table)?;
            }
            if let Some(path) = out_json {
                write_out(&path, &json)?;
            }
            Ok(ExitCode::from(EXIT_OK))
        }
    }
}

fn report_json(
    report: &packideal_core::enumerate::VertexReport,
    relax: &Relaxation,
) -> String {
    #[derive(serde::Serialize)]
    struct Doc {
        vertices: Vec<Point>,
        fractional: Vec<serde_json::Value>,
        subsets_examined: String,
        subsets_rank_deficient: String,
    }
    let doc = Doc {
        vertices: report.vertices.clone(),
        fractional: report
            .fractional
            .iter()
            .map(|w| {
                serde_json::from_str(&witness_json(w, relax)).expect("witness json parses")
            })
            .collect(),
        subsets_examined: report.subsets_examined.to_string(),
        subsets_rank_deficient: report.subsets_rank_deficient.to_string(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn circuits_json(circuits: &[packideal_core::spark::Circuit], labels: &[String]) -> String {
    #[derive(serde::Serialize)]
    struct CircuitDoc {
        rows: Vec<String>,
        multipliers: Vec<String>,
    }
    #[derive(serde::Serialize)]
    struct Doc {
        circuits: Vec<CircuitDoc>,
        spark: Option<usize>,
    }
    let doc = Doc {
        circuits: circuits
            .iter()
            .map(|c| CircuitDoc {
                rows: c.rows.iter().map(|&i| labels[i].clone()).collect(),
                multipliers: c.multipliers.iter().map(rat_to_string).collect(),
            })
            .collect(),
        spark: spark(circuits),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("circuits serialize");
    s.push('\n');
    s
}

fn layout_json(layout: &packideal_core::greedy::GreedyLayout, violations: usize) -> String {
    #[derive(serde::Serialize)]
    struct Doc<'a> {
        centers: Vec<[String; 2]>,
        rows: &'a [packideal_core::greedy::RowRecord],
        height: String,
        violations: usize,
    }
    let doc = Doc {
        centers: layout
            .centers
            .iter()
            .map(|(x, y)| [rat_to_string(x), rat_to_string(y)])
            .collect(),
        rows: &layout.rows,
        height: rat_to_string(&layout.height),
        violations,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("layout serializes");
    s.push('\n');
    s
}

fn read_matrix(path: &Path) -> Result<(RatMatrix, Vec<String>), String> {
    #[derive(Deserialize)]
    struct MatrixDoc {
        rows: Vec<Vec<String>>,
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let doc: MatrixDoc = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    if doc.rows.is_empty() {
        return Err("matrix must have at least one row".into());
    }
    let mut rows = Vec::new();
    for r in &doc.rows {
        let row: Result<Vec<Rat>, String> = r.iter().map(|s| rat_from_str(s)).collect();
        rows.push(row?);
    }
    let labels = (0..rows.len()).map(|i| format!("row{i}")).collect();
    Ok((RatMatrix::from_rows(rows), labels))
}

/// Assembles the augmented tight system of a witness point on the chosen
/// formulation's relaxation.
fn tight_system(
    kind_str: &str,
    inst: &RppInstance,
    witness_path: &Path,
) -> Result<(RatMatrix, Vec<String>, packideal_core::MblpModel), String> {
    #[derive(Deserialize)]
    struct WitnessDoc {
        point: PointDoc,
    }
    #[derive(Deserialize)]
    struct PointDoc {
        x: Vec<String>,
        y: Vec<String>,
    }
    let kind = parse_kind(kind_str)?;
    let model = build(kind, inst, PairScope::All, &BuildOptions::default())
        .map_err(|e| e.to_string())?;
    let relax = compose_relaxation(&model);
    let text = std::fs::read_to_string(witness_path)
        .map_err(|e| format!("cannot read {}: {e}", witness_path.display()))?;
    let doc: WitnessDoc = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let x: Result<Vec<Rat>, String> = doc.point.x.iter().map(|s| rat_from_str(s)).collect();
    let y: Result<Vec<Rat>, String> = doc.point.y.iter().map(|s| rat_from_str(s)).collect();
    let point = Point::new(x?, y?);
    let tight = tight_rows(&relax, &point).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for &i in &tight {
        let row = &relax.rows()[i];
        let mut v = row.coeffs.clone();
        v.push(row.rhs.clone());
        rows.push(v);
        labels.push(row.tag.to_string());
    }
    Ok((RatMatrix::from_rows(rows), labels, model))
}
