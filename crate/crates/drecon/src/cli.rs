//! Subcommands. Each returns the text destined for standard output; files
//! are written atomically before it is returned.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use drecon_core::mindrgt::{correct_gene_tree, solve_exact, DEFAULT_EXACT_CAP};
use drecon_core::mindrpgt::{assemble_protein_tree, span_partition, SubtreeFamily};
use drecon_core::reconcile::{reconcile_gene_species, reconcile_protein_gene};
use drecon_core::simulate::{simulate, GroundTruth, SimConfig};
use drecon_core::{CostSpec, LeafMapping, NodeId, PhyloTree, Reconciliation};
use rayon::prelude::*;

use crate::error::CliError;
use crate::io::{
    format_mapping, infer_gene_species, infer_protein_gene, read_forest, read_text, read_tree, resolve_mapping,
    write_atomic,
};
use crate::report::{format_report, parse_buckets, parse_report, summarize, BatchSummary, ReportRow};

pub const SEED_ENV: &str = "DRECON_SEED";
const DEFAULT_BUCKETS: &str = "1-9,10-99,100-199";

#[derive(Debug, Parser)]
#[command(name = "drecon", version, about = "Double reconciliation of protein, gene and species trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Label trees by LCA-reconciliation and report their costs.
    Reconcile(ReconcileArgs),
    /// Correct the gene tree induced by a protein tree.
    Correct(CorrectArgs),
    /// Assemble a protein tree from its maximum creation-free subtrees.
    Assemble(AssembleArgs),
    /// Exhaustive gene tree search for small instances.
    SolveExact(SolveExactArgs),
    /// Generate species, gene and protein trees with their true history.
    Simulate(SimulateArgs),
    /// Summarize correction reports by tree size.
    Stats(StatsArgs),
}

fn parse_cost(s: &str) -> Result<CostSpec, String> {
    s.parse().map_err(|e: drecon_core::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct MappingArgs {
    /// Protein-to-gene mapping TSV.
    #[arg(long)]
    pub pmap: Option<PathBuf>,
    /// Gene-to-species mapping TSV.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Derive missing mapping rows from leaf names such as `a31 -> a3 -> a`.
    #[arg(long)]
    pub infer_map: bool,
}

#[derive(Debug, Args)]
pub struct ReconcileArgs {
    #[arg(long)]
    pub gene: PathBuf,
    #[arg(long)]
    pub species: PathBuf,
    #[arg(long)]
    pub protein: Option<PathBuf>,
    #[command(flatten)]
    pub maps: MappingArgs,
    #[arg(long, default_value = "MM", value_parser = parse_cost)]
    pub cost: CostSpec,
    /// Directory for labelled trees, loss tables and the cost summary.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    #[arg(long, required_unless_present = "dir", conflicts_with = "dir")]
    pub protein: Option<PathBuf>,
    #[arg(long, required_unless_present = "dir", conflicts_with = "dir")]
    pub species: Option<PathBuf>,
    #[command(flatten)]
    pub maps: MappingArgs,
    /// Batch mode: every subdirectory holding P.nwk, S.nwk, pg.tsv and gs.tsv.
    #[arg(long)]
    pub dir: Option<PathBuf>,
    #[arg(long, default_value = "MM", value_parser = parse_cost)]
    pub cost: CostSpec,
    /// Directory for G_opt.nwk and report.tsv (single instance).
    #[arg(long, conflicts_with = "dir")]
    pub out: Option<PathBuf>,
    /// Write `NA` instead of the running time so reports are reproducible.
    #[arg(long)]
    pub omit_timing: bool,
    /// Worker threads in batch mode; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, default_value = DEFAULT_BUCKETS)]
    pub buckets: String,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    /// Newick file with one creation-free subtree per `;`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also print the span partition.
    #[arg(long)]
    pub spans: bool,
}

#[derive(Debug, Args)]
pub struct SolveExactArgs {
    #[arg(long)]
    pub protein: PathBuf,
    #[arg(long)]
    pub species: PathBuf,
    #[command(flatten)]
    pub maps: MappingArgs,
    #[arg(long, default_value = "MM", value_parser = parse_cost)]
    pub cost: CostSpec,
    /// Largest number of genes to enumerate over.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub species: usize,
    #[arg(long, default_value_t = 0.1)]
    pub dup: f64,
    #[arg(long, default_value_t = 0.1)]
    pub loss: f64,
    #[arg(long, default_value_t = 0.1)]
    pub creation: f64,
    #[arg(long, default_value_t = 0.1)]
    pub protein_loss: f64,
    /// Overridden by the DRECON_SEED environment variable.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of instances; more than one goes to numbered subdirectories.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Tsv,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Directory searched recursively for report.tsv files.
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, default_value = DEFAULT_BUCKETS)]
    pub buckets: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the TSV summary here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Reconcile(a) => cmd_reconcile(&a),
        Command::Correct(a) => match &a.dir {
            Some(dir) => cmd_correct_batch(&a, dir),
            None => cmd_correct(&a),
        },
        Command::Assemble(a) => cmd_assemble(&a),
        Command::SolveExact(a) => cmd_solve_exact(&a),
        Command::Simulate(a) => cmd_simulate(&a, std::env::var(SEED_ENV).ok().as_deref()),
        Command::Stats(a) => cmd_stats(&a),
    }
}

/// Sorted leaf names of the clade below `x`, ignoring labels.
fn clade(t: &PhyloTree, x: NodeId) -> String {
    t.subtree(x).canonical_shape()
}

fn loss_table(src: &PhyloTree, dst: &PhyloTree, recon: &Reconciliation) -> String {
    let mut out = String::from("edge\tlost\n");
    for y in src.nodes() {
        for &lost in recon.losses_on(y) {
            let _ = writeln!(out, "{}\t{}", clade(src, y), clade(dst, lost));
        }
    }
    out
}

fn cost_line(tag: &str, event: char, r: &Reconciliation) -> String {
    format!("{tag}\t{event}={} L={} M={}\n", r.event_cost(), r.loss_cost(), r.mutation_cost())
}

fn cmd_reconcile(a: &ReconcileArgs) -> Result<String, CliError> {
    let gene = read_tree(&a.gene)?;
    let species = read_tree(&a.species)?;
    let s = resolve_mapping(
        a.maps.map.as_deref(),
        a.maps.infer_map.then(|| infer_gene_species(gene.leaf_names())),
        "gene-species",
    )?;
    let gs = reconcile_gene_species(&gene, &species, &s)?;
    let mut files = vec![("G.labeled.nwk", gs.labeled_tree(&gene).to_newick() + "\n")];
    files.push(("gs.losses.tsv", loss_table(&gene, &species, &gs)));
    let mut costs = cost_line("G/S", 'D', &gs);

    match (&a.protein, &a.maps.pmap) {
        (Some(path), pmap) => {
            let protein = read_tree(path)?;
            let g = resolve_mapping(
                pmap.as_deref(),
                a.maps.infer_map.then(|| infer_protein_gene(&protein)),
                "protein-gene",
            )?;
            let pg = reconcile_protein_gene(&protein, &gene, &g, &gs)?;
            files.push(("P.labeled.nwk", pg.labeled_tree(&protein).to_newick() + "\n"));
            files.push(("pg.losses.tsv", loss_table(&protein, &gene, &pg)));
            costs += &cost_line("P/G", 'C', &pg);
            let _ = writeln!(costs, "P/G/S\t{}={}", a.cost, a.cost.combine(&pg, &gs));
        }
        (None, Some(_)) => return Err(CliError::Usage("--pmap needs --protein".into())),
        (None, None) => {}
    }
    files.push(("costs.txt", costs.clone()));

    if let Some(dir) = &a.out {
        for (name, text) in &files {
            write_atomic(&dir.join(name), text)?;
        }
    }
    let trees: String = files.iter().filter(|(n, _)| n.ends_with(".nwk")).map(|(_, t)| t.as_str()).collect();
    Ok(trees + &costs)
}

/// One correction problem read from disk.
struct Instance {
    protein: PhyloTree,
    species: PhyloTree,
    g: LeafMapping,
    s: LeafMapping,
}

fn load_instance(
    protein: &Path,
    species: &Path,
    pmap: Option<&Path>,
    map: Option<&Path>,
    infer: bool,
) -> Result<Instance, CliError> {
    let protein = read_tree(protein)?;
    let species = read_tree(species)?;
    let g = resolve_mapping(pmap, infer.then(|| infer_protein_gene(&protein)), "protein-gene")?;
    let s = resolve_mapping(map, infer.then(|| infer_gene_species(g.iter().map(|(_, gene)| gene))), "gene-species")?;
    Ok(Instance { protein, species, g, s })
}

fn correct_instance(inst: &Instance, name: &str, cost: CostSpec, timing: bool) -> Result<(PhyloTree, ReportRow), CliError> {
    let (tree, report) = correct_gene_tree(&inst.protein, &inst.species, &inst.g, &inst.s, cost)?;
    Ok((tree, ReportRow::new(name, cost, &report, timing)))
}

fn cmd_correct(a: &CorrectArgs) -> Result<String, CliError> {
    let (Some(protein), Some(species)) = (&a.protein, &a.species) else {
        return Err(CliError::Usage("--protein and --species are required without --dir".into()));
    };
    let inst = load_instance(protein, species, a.maps.pmap.as_deref(), a.maps.map.as_deref(), a.maps.infer_map)?;
    let name = protein.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned());
    let (tree, row) = correct_instance(&inst, &name, a.cost, !a.omit_timing)?;
    let newick = tree.to_newick() + "\n";
    let report = format_report(&[row]);
    if let Some(dir) = &a.out {
        write_atomic(&dir.join("G_opt.nwk"), &newick)?;
        write_atomic(&dir.join("report.tsv"), &report)?;
    }
    Ok(newick + &report)
}

fn instance_dirs(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut dirs = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.join("P.nwk").is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

fn correct_dir(d: &Path, a: &CorrectArgs) -> Result<ReportRow, CliError> {
    let optional = |name: &str| Some(d.join(name)).filter(|p| p.is_file());
    let (pmap, map) = (optional("pg.tsv"), optional("gs.tsv"));
    let inst = load_instance(&d.join("P.nwk"), &d.join("S.nwk"), pmap.as_deref(), map.as_deref(), a.maps.infer_map)?;
    let name = d.file_name().map_or_else(|| d.display().to_string(), |n| n.to_string_lossy().into_owned());
    let (tree, row) = correct_instance(&inst, &name, a.cost, !a.omit_timing)?;
    write_atomic(&d.join("G_opt.nwk"), &(tree.to_newick() + "\n"))?;
    write_atomic(&d.join("report.tsv"), &format_report(std::slice::from_ref(&row)))?;
    Ok(row)
}

fn cmd_correct_batch(a: &CorrectArgs, dir: &Path) -> Result<String, CliError> {
    let buckets = parse_buckets(&a.buckets)?;
    let dirs = instance_dirs(dir)?;
    if dirs.is_empty() {
        return Err(CliError::Usage(format!("{}: no subdirectory contains P.nwk", dir.display())));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", a.jobs)))?;
    let results: Vec<Result<ReportRow, CliError>> = pool.install(|| dirs.par_iter().map(|d| correct_dir(d, a)).collect());

    let total = results.len();
    let mut rows = Vec::with_capacity(total);
    let mut errors = Vec::new();
    for (d, r) in dirs.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                eprintln!("{}: {e}", d.display());
                errors.push(e);
            }
        }
    }
    let summary = summarize(&rows, &buckets);
    write_atomic(&dir.join("reports.tsv"), &format_report(&rows))?;
    write_atomic(&dir.join("summary.tsv"), &summary.to_tsv())?;
    if !errors.is_empty() {
        let failed = errors.len();
        return Err(CliError::Batch { failed, total, first: Box::new(errors.swap_remove(0)) });
    }
    Ok(summary.to_text())
}

fn cmd_assemble(a: &AssembleArgs) -> Result<String, CliError> {
    let trees = read_forest(&a.input)?;
    let family = SubtreeFamily::new(trees).map_err(|source| CliError::Core { path: a.input.clone(), source })?;
    let tree = assemble_protein_tree(&family)?;
    let newick = tree.to_newick() + "\n";
    if let Some(path) = &a.out {
        write_atomic(path, &newick)?;
    }
    let mut out = newick;
    if a.spans {
        out.push_str("class\tleaves\tspan\n");
        for (i, c) in span_partition(&family)?.classes.iter().enumerate() {
            let span: Vec<String> = c.span.iter().map(|j| (j + 1).to_string()).collect();
            let _ = writeln!(out, "{}\t{}\t{}", i + 1, c.leaves.join(","), span.join(","));
        }
    }
    Ok(out)
}

fn cmd_solve_exact(a: &SolveExactArgs) -> Result<String, CliError> {
    let inst = load_instance(&a.protein, &a.species, a.maps.pmap.as_deref(), a.maps.map.as_deref(), a.maps.infer_map)?;
    let (tree, cost) = solve_exact(&inst.protein, &inst.species, &inst.g, &inst.s, a.cost, a.cap)?;
    let newick = tree.to_newick() + "\n";
    if let Some(path) = &a.out {
        write_atomic(path, &newick)?;
    }
    Ok(format!("optimum {cost}\n{newick}"))
}

fn truth_table(t: &GroundTruth) -> String {
    let mut out = String::from("tree\tnode\tevent\n");
    for (tag, tree) in [("G", &t.gene), ("P", &t.protein)] {
        for x in tree.internal_nodes() {
            let event = tree.label(x).map_or("NA", |e| e.as_str());
            let _ = writeln!(out, "{tag}\t{}\t{event}", clade(tree, x));
        }
    }
    for (tag, tree, losses) in [("S", &t.species, &t.gene_losses), ("G", &t.gene, &t.protein_losses)] {
        for &x in losses {
            let _ = writeln!(out, "{tag}\t{}\tLoss", clade(tree, x));
        }
    }
    out
}

fn write_simulation(dir: &Path, t: &GroundTruth) -> Result<(), CliError> {
    let files = [
        ("S.nwk", t.species.to_newick() + "\n"),
        ("G.nwk", t.gene.without_labels().to_newick() + "\n"),
        ("P.nwk", t.protein.without_labels().to_newick() + "\n"),
        ("gs.tsv", format_mapping(&t.s)),
        ("pg.tsv", format_mapping(&t.g)),
        ("truth.tsv", truth_table(t)),
    ];
    for (name, text) in &files {
        write_atomic(&dir.join(name), text)?;
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, env_seed: Option<&str>) -> Result<String, CliError> {
    let seed = match env_seed {
        Some(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{v}` is not a seed")))?,
        None => a.seed,
    };
    if a.count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    let mut out = String::from("dir\tseed\tspecies\tgenes\tproteins\n");
    for i in 0..a.count {
        let cfg = SimConfig {
            species: a.species,
            duplication: a.dup,
            loss: a.loss,
            creation: a.creation,
            protein_loss: a.protein_loss,
            seed: seed.wrapping_add(i as u64),
        };
        let truth = simulate(&cfg)?;
        let dir = if a.count == 1 { a.out.clone() } else { a.out.join(format!("{i:04}")) };
        write_simulation(&dir, &truth)?;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            dir.display(),
            cfg.seed,
            truth.species.leaf_count(),
            truth.gene.leaf_count(),
            truth.protein.leaf_count()
        );
    }
    Ok(out)
}

fn report_files(dir: &Path, found: &mut Vec<PathBuf>) -> Result<(), CliError> {
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.is_dir() {
            report_files(&path, found)?;
        } else if path.file_name().is_some_and(|n| n == "report.tsv") {
            found.push(path);
        }
    }
    Ok(())
}

fn load_summary(a: &StatsArgs) -> Result<BatchSummary, CliError> {
    let buckets = parse_buckets(&a.buckets)?;
    let mut files = Vec::new();
    report_files(&a.dir, &mut files)?;
    files.sort();
    let mut rows = Vec::new();
    for f in &files {
        rows.extend(parse_report(&read_text(f)?, f)?);
    }
    if rows.is_empty() {
        return Err(CliError::Usage(format!("{}: no correction reports found", a.dir.display())));
    }
    Ok(summarize(&rows, &buckets))
}

fn cmd_stats(a: &StatsArgs) -> Result<String, CliError> {
    let summary = load_summary(a)?;
    if let Some(path) = &a.out {
        write_atomic(path, &summary.to_tsv())?;
    }
    Ok(match a.format {
        Format::Text => summary.to_text(),
        Format::Tsv => summary.to_tsv(),
    })
}
