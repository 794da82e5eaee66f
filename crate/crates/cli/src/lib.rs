//! Command-line front end: JSON inputs in, JSON or DOT reports out.
//!
//! Exit codes: 0 on success, 1 when a verification fails or a fixture does
//! not match, 2 on malformed input.

pub mod fixtures;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mumford_core::examples::BetaExponents;
use mumford_core::maclane::{
    compare_with, inf_closed, infimum, poly_string, principal_candidates, stability_index_bound,
    InfClosure, MacLaneError, MacLaneSpec, MacLaneValuation, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use mumford_core::pline::Mobius;
use mumford_core::schottky::{
    check_descent_condition_c, is_member, sample_disc_images, verify_figure, DescentDatum,
    FigureFile, Membership,
};
use mumford_core::skeleton::{
    annotate, contract_l_only, fundamental_skeleton, galois_orbits, glue_mumford,
    stabilization_bound, stable_contraction, SkeletonGraph,
};
use mumford_core::valtower::{
    build_tower, FieldElement, SubfieldLattice, SubfieldSpec, TowerError, TowerSpec,
};
use mumford_core::FieldPoly;
use serde::Deserialize;
use serde_json::{json, Value};

/// Samples per side in disc-image checks when `--samples` is not given.
pub const DEFAULT_IMAGE_SAMPLES: usize = 100;

#[derive(Parser, Debug)]
#[command(
    name = "mumford",
    version,
    about = "Exact combinatorics of Mumford curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the resulting graph as DOT.
    #[arg(long, global = true, value_name = "FILE")]
    pub dot: Option<PathBuf>,
    /// Also write the JSON report to a file.
    #[arg(long, global = true, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Bound on ping-pong reduction steps.
    #[arg(long, global = true, default_value_t = 8)]
    pub depth: usize,
    /// Seed for randomized oracles.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Samples for randomized oracles.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Number field towers.
    #[command(subcommand)]
    Tower(TowerCmd),
    /// Schottky figures and group membership.
    #[command(subcommand)]
    Schottky(SchottkyCmd),
    /// Skeleta, Galois orbits and stabilization bounds.
    #[command(subcommand)]
    Skeleton(SkeletonCmd),
    /// Inductive valuations.
    #[command(subcommand)]
    Maclane(MaclaneCmd),
    /// Reproduce a built-in example family.
    Examples(ExamplesArgs),
}

#[derive(Subcommand, Debug)]
pub enum TowerCmd {
    /// Build a tower and report degrees, valuations and subfields.
    Check { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum SchottkyCmd {
    /// Check disjointness and the pairing identity of a figure.
    Verify { file: PathBuf },
    /// Decide whether a matrix lies in the group.
    Member {
        file: PathBuf,
        /// A word such as `g1 g2^-1`.
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        word: Option<String>,
        /// A matrix as JSON rows of coordinate vectors.
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Check that every Galois conjugate of a generator lies in the group.
    Descent { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum SkeletonCmd {
    /// Hull of the disc boundary points, with white boundary vertices.
    Fundamental {
        file: PathBuf,
        /// Subdivide over this lattice field (default: the top field).
        #[arg(long, conflicts_with = "plain")]
        subdivide: Option<String>,
        /// Do not subdivide.
        #[arg(long)]
        plain: bool,
    },
    /// The glued skeleton.
    Mumford {
        file: PathBuf,
        #[arg(long)]
        stable: bool,
        /// Contract the vertices defined only over the top field.
        #[arg(long)]
        contract_l: bool,
    },
    /// Galois orbits and faithfulness.
    Orbits {
        file: PathBuf,
        #[arg(long)]
        stable: bool,
    },
    /// Divisor bound for the stabilization index.
    Bound { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum MaclaneCmd {
    /// Evaluate every valuation on every polynomial.
    Eval { file: PathBuf },
    /// Multiplicities of the valuations and their truncations.
    Mult { file: PathBuf },
    /// Pairwise comparison.
    Cmp { file: PathBuf },
    /// Pairwise infima.
    Inf { file: PathBuf },
    /// Principal candidates and the stability index bound.
    Candidates { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    G2p2,
    G2p,
}

#[derive(clap::Args, Debug)]
pub struct ExamplesArgs {
    pub name: ExampleName,
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    /// Print only the mismatching entries.
    #[arg(long)]
    pub diff: bool,
    /// Exponent of β = π_K^a.
    #[arg(long, default_value_t = 4)]
    pub beta: u32,
    /// Exponent of β′ = π_K^b.
    #[arg(long, default_value_t = 5)]
    pub beta_prime: u32,
    /// Export the example as a figure file.
    #[arg(long, value_name = "FILE")]
    pub figure: Option<PathBuf>,
}

/// Exit code and report of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub dot: Option<String>,
}

impl Outcome {
    fn new(ok: bool, report: Value) -> Self {
        Outcome {
            code: if ok { 0 } else { 1 },
            report,
            dot: None,
        }
    }

    fn with_dot(mut self, dot: String) -> Self {
        self.dot = Some(dot);
        self
    }

    fn failed(err: impl std::fmt::Display) -> Self {
        Outcome::new(false, json!({"ok": false, "error": err.to_string()}))
    }
}

/// Malformed input; maps to exit code 2.
#[derive(Debug)]
pub struct InputError(pub anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn load_figure(path: &Path) -> Result<DescentDatum, InputError> {
    let file: FigureFile = read_json(path)?;
    Ok(file
        .load()
        .with_context(|| format!("loading {}", path.display()))?)
}

/// Runs a parsed command line. File outputs (`--json`, `--dot`) are written
/// here; the report is returned for printing.
pub fn run(cli: &Cli) -> Result<Outcome, InputError> {
    let out = match &cli.command {
        Command::Tower(TowerCmd::Check { file }) => tower_check(file)?,
        Command::Schottky(c) => schottky(cli, c)?,
        Command::Skeleton(c) => skeleton(cli, c)?,
        Command::Maclane(c) => maclane(cli, c)?,
        Command::Examples(a) => examples(cli, a)?,
    };
    if let Some(path) = &cli.json {
        fs::write(path, render(&out.report))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let (Some(path), Some(dot)) = (&cli.dot, &out.dot) {
        fs::write(path, dot).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(out)
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TowerInput {
    Wrapped {
        tower: TowerSpec,
        #[serde(default)]
        subfields: Vec<SubfieldSpec>,
    },
    Bare(TowerSpec),
}

fn tower_check(file: &Path) -> Result<Outcome, InputError> {
    let (spec, subfields) = match read_json::<TowerInput>(file)? {
        TowerInput::Wrapped { tower, subfields } => (tower, subfields),
        TowerInput::Bare(t) => (t, Vec::new()),
    };
    let tower = match build_tower(&spec) {
        Ok(t) => t,
        Err(e @ (TowerError::CertificateFailed(_) | TowerError::NotAssociative)) => {
            return Ok(Outcome::failed(e))
        }
        Err(e) => return Err(e.into()),
    };
    let levels: Vec<Value> = tower
        .steps()
        .iter()
        .map(|s| json!({"name": s.name, "degree": s.degree()}))
        .collect();
    let mut valuations = serde_json::Map::new();
    if tower.has_certificate() {
        for name in tower.generator_names() {
            let g = FieldElement::named(&tower, name).expect("own generator");
            valuations.insert(name.to_string(), json!(g.valuation()?.to_string()));
        }
    }
    let mut report = json!({
        "ok": true,
        "prime": tower.prime(),
        "degree": tower.degree(),
        "levels": levels,
        "certificate": tower.has_certificate(),
        "generator_valuations": valuations,
    });
    if !subfields.is_empty() {
        let lat = SubfieldLattice::from_specs(&tower, &subfields)?;
        let fields: Vec<Value> = lat
            .fields()
            .iter()
            .map(|f| {
                json!({
                    "name": f.name(),
                    "degree": f.degree(),
                    "ramification_index": f.ram_index(),
                    "degree_over_base": lat.degree_over_base(f),
                })
            })
            .collect();
        report["subfields"] = json!(fields);
    }
    Ok(Outcome::new(true, report))
}

fn schottky(cli: &Cli, cmd: &SchottkyCmd) -> Result<Outcome, InputError> {
    match cmd {
        SchottkyCmd::Verify { file } => {
            let d = load_figure(file)?;
            let rep = verify_figure(&d.figure);
            let samples = cli.samples.unwrap_or(DEFAULT_IMAGE_SAMPLES);
            let images = sample_disc_images(&d.figure, samples, cli.seed);
            let exceptions: usize = images.iter().map(|s| s.check.exceptions).sum();
            let mut report = serde_json::to_value(&rep)?;
            report["failures"] = json!(rep.failures());
            report["disc_images"] = json!({
                "seed": cli.seed,
                "samples": samples,
                "exceptions": exceptions,
                "checks": images,
            });
            Ok(Outcome::new(rep.ok && exceptions == 0, report))
        }
        SchottkyCmd::Member { file, word, matrix } => {
            let d = load_figure(file)?;
            let fig = &d.figure;
            let g = match (word, matrix) {
                (Some(w), _) => fig.word_matrix(&fig.parse_word(w)?),
                (None, Some(m)) => {
                    let rows: Vec<Vec<Vec<String>>> =
                        serde_json::from_str(m).context("parsing --matrix")?;
                    Mobius::from_spec(fig.tower(), &rows)?
                }
                (None, None) => return Err(anyhow!("one of --word or --matrix is required").into()),
            };
            let report = match is_member(fig, &g, cli.depth) {
                Membership::Yes(w) => {
                    json!({"ok": true, "member": "yes", "word": fig.word_string(&w)})
                }
                Membership::No => json!({"ok": true, "member": "no"}),
                Membership::Inconclusive => {
                    json!({"ok": false, "member": "inconclusive", "depth": cli.depth})
                }
            };
            let ok = report["ok"] == json!(true);
            Ok(Outcome::new(ok, report))
        }
        SchottkyCmd::Descent { file } => {
            let d = load_figure(file)?;
            let rep = check_descent_condition_c(&d, cli.depth);
            let mut report = serde_json::to_value(&rep)?;
            report["lines"] = json!(rep.table.iter().map(|e| e.to_string()).collect::<Vec<_>>());
            Ok(Outcome::new(rep.ok, report))
        }
    }
}

fn graph_summary(g: &SkeletonGraph) -> Value {
    json!({
        "vertices": g.vertices.len(),
        "white": g.vertices.iter().filter(|v| v.boundary).count(),
        "edges": g.edges.len(),
        "betti": g.betti(),
        "loops": g.num_loops(),
        "bridges": g.num_bridges(),
    })
}

fn graph_outcome(g: &SkeletonGraph, name: &str) -> Outcome {
    Outcome::new(
        true,
        json!({"ok": true, "summary": graph_summary(g), "graph": g.to_json()}),
    )
    .with_dot(g.to_dot(name))
}

fn skeleton(cli: &Cli, cmd: &SkeletonCmd) -> Result<Outcome, InputError> {
    let file = match cmd {
        SkeletonCmd::Fundamental { file, .. }
        | SkeletonCmd::Mumford { file, .. }
        | SkeletonCmd::Orbits { file, .. }
        | SkeletonCmd::Bound { file } => file,
    };
    let d = load_figure(file)?;
    let fig = &d.figure;
    let lat = d.lattice.as_ref();
    let glued = || -> Result<SkeletonGraph, mumford_core::skeleton::SkeletonError> {
        let g = glue_mumford(fig, lat)?;
        match lat {
            Some(l) => annotate(&g, l),
            None => Ok(g),
        }
    };
    let res = match cmd {
        SkeletonCmd::Fundamental {
            subdivide, plain, ..
        } => {
            let field = match (subdivide, lat) {
                _ if *plain => None,
                (Some(name), Some(l)) => Some(l.get(name)?),
                (Some(name), None) => {
                    return Err(anyhow!("no lattice to look up `{name}` in").into())
                }
                (None, l) => l.map(|l| l.top()),
            };
            fundamental_skeleton(fig, field)
                .and_then(|g| match lat {
                    Some(l) => annotate(&g, l),
                    None => Ok(g),
                })
                .map(|g| graph_outcome(&g, "fundamental"))
        }
        SkeletonCmd::Mumford {
            stable, contract_l, ..
        } => glued().map(|mut g| {
            if let (true, Some(l)) = (*contract_l, lat) {
                g = contract_l_only(&g, l.top().name());
            }
            if *stable {
                g = stable_contraction(&g);
            }
            graph_outcome(&g, "mumford")
        }),
        SkeletonCmd::Orbits { stable, .. } => glued().and_then(|mut g| {
            if *stable {
                g = stable_contraction(&g);
            }
            let rep = galois_orbits(&g, &d, cli.depth)?;
            let mut report = serde_json::to_value(&rep).expect("serializable");
            report["ok"] = json!(true);
            report["quotient"] = rep.quotient.to_json();
            Ok(Outcome::new(true, report).with_dot(g.to_dot("orbits")))
        }),
        SkeletonCmd::Bound { .. } => {
            let l = lat.ok_or_else(|| anyhow!("the figure file has no subfield lattice"))?;
            glued().and_then(|g| {
                let y2 = contract_l_only(&g, l.top().name());
                let b = stabilization_bound(&y2, l)?;
                let fields: Vec<Value> = y2
                    .vertices
                    .iter()
                    .map(|v| {
                        json!({
                            "vertex": y2.label(v),
                            "field": v.annotations.field_of_definition,
                            "quotient_bound": v.annotations.quotient_bound,
                        })
                    })
                    .collect();
                let report = json!({"ok": b.divides, "bound": b, "vertices": fields, "summary": graph_summary(&y2)});
                Ok(Outcome::new(b.divides, report).with_dot(y2.to_dot("contracted")))
            })
        }
    };
    Ok(res.unwrap_or_else(Outcome::failed))
}

/// Input of the `maclane` subcommands.
#[derive(Deserialize)]
pub struct MacLaneFile {
    pub tower: TowerSpec,
    pub subfields: Vec<SubfieldSpec>,
    pub valuations: Vec<MacLaneSpec>,
    /// Coefficient lists, constant term first.
    #[serde(default)]
    pub polys: Vec<Vec<Vec<String>>>,
}

struct MacLaneInput {
    vals: Vec<MacLaneValuation>,
    polys: Vec<FieldPoly>,
}

fn load_maclane(path: &Path) -> Result<MacLaneInput, InputError> {
    let f: MacLaneFile = read_json(path)?;
    let tower = build_tower(&f.tower)?;
    let lat = SubfieldLattice::from_specs(&tower, &f.subfields)?;
    let vals = f
        .valuations
        .iter()
        .enumerate()
        .map(|(k, s)| {
            MacLaneValuation::from_spec(&lat, s).with_context(|| format!("valuation {k}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let polys = f
        .polys
        .iter()
        .map(|p| {
            p.iter()
                .map(|c| FieldElement::parse_coords(&tower, c))
                .collect::<Result<Vec<_>, _>>()
                .map(FieldPoly::new)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MacLaneInput { vals, polys })
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn maclane(cli: &Cli, cmd: &MaclaneCmd) -> Result<Outcome, InputError> {
    let file = match cmd {
        MaclaneCmd::Eval { file }
        | MaclaneCmd::Mult { file }
        | MaclaneCmd::Cmp { file }
        | MaclaneCmd::Inf { file }
        | MaclaneCmd::Candidates { file } => file,
    };
    let input = load_maclane(file)?;
    let vals = &input.vals;
    let samples = cli.samples.unwrap_or(DEFAULT_SAMPLES);
    let names: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
    let out = match cmd {
        MaclaneCmd::Eval { .. } => {
            let mut ok = true;
            let rows: Vec<Value> = vals
                .iter()
                .zip(&names)
                .map(|(v, name)| {
                    let values: Vec<String> = input
                        .polys
                        .iter()
                        .map(|f| v.evaluate(f).to_string())
                        .collect();
                    let oracle = match v.oracle_check(samples, cli.seed) {
                        Ok(_) => json!("ok"),
                        Err(e) => {
                            ok = false;
                            json!(e.to_string())
                        }
                    };
                    json!({"valuation": name, "values": values, "oracle": oracle})
                })
                .collect();
            let polys: Vec<String> = input.polys.iter().map(poly_string).collect();
            let report = json!({"ok": ok, "seed": cli.seed, "samples": samples, "polys": polys, "valuations": rows});
            Outcome::new(ok, report)
        }
        MaclaneCmd::Mult { .. } => {
            let rows: Vec<Value> = vals
                .iter()
                .zip(&names)
                .map(|(v, name)| {
                    let trunc: Vec<u64> = v.truncations().iter().map(MacLaneValuation::multiplicity).collect();
                    let divides = trunc.windows(2).all(|w| w[1] % w[0] == 0);
                    json!({"valuation": name, "multiplicity": v.multiplicity(), "truncations": trunc, "divides": divides})
                })
                .collect();
            let ok = rows.iter().all(|r| r["divides"] == json!(true));
            Outcome::new(ok, json!({"ok": ok, "valuations": rows}))
        }
        MaclaneCmd::Cmp { .. } => {
            let rows = pairs(vals.len())
                .map(|(i, j)| -> Result<Value, MacLaneError> {
                    let c = compare_with(&vals[i], &vals[j], samples, cli.seed)?;
                    Ok(json!({"left": names[i], "right": names[j], "comparison": c}))
                })
                .collect::<Result<Vec<_>, _>>();
            match rows {
                Ok(rows) => Outcome::new(
                    true,
                    json!({"ok": true, "seed": cli.seed, "samples": samples, "pairs": rows}),
                ),
                Err(e) => Outcome::failed(e),
            }
        }
        MaclaneCmd::Inf { .. } => {
            let rows: Vec<Value> = pairs(vals.len())
                .map(|(i, j)| {
                    let (key, val) = match infimum(&vals[i], &vals[j]) {
                        Ok(m) => ("infimum", json!(m.to_string())),
                        Err(e) => ("error", json!(e.to_string())),
                    };
                    json!({"left": names[i], "right": names[j], key: val})
                })
                .collect();
            Outcome::new(true, json!({"ok": true, "pairs": rows}))
        }
        MaclaneCmd::Candidates { .. } => {
            let cands: Vec<String> = principal_candidates(vals)
                .iter()
                .map(|v| v.to_string())
                .collect();
            let closure = match inf_closed(vals) {
                Ok(InfClosure::Closed) => json!("closed"),
                Ok(InfClosure::NotClosed { pair, infimum }) => {
                    json!({"missing": infimum.to_string(), "of": [names[pair.0].clone(), names[pair.1].clone()]})
                }
                Err(e) => json!({"error": e.to_string()}),
            };
            match stability_index_bound(vals) {
                Ok(m) => Outcome::new(
                    true,
                    json!({"ok": true, "candidates": cands, "inf_closure": closure, "bound": m}),
                ),
                Err(e) => Outcome::new(
                    false,
                    json!({"ok": false, "candidates": cands, "inf_closure": closure, "error": e.to_string()}),
                ),
            }
        }
    };
    Ok(out)
}

fn examples(cli: &Cli, args: &ExamplesArgs) -> Result<Outcome, InputError> {
    let fx = match args.name {
        ExampleName::G2p2 => fixtures::g2p2_fixture(),
        ExampleName::G2p => {
            let beta = BetaExponents {
                beta: args.beta,
                beta_prime: args.beta_prime,
            };
            fixtures::g2p_fixture(args.p, beta)?
        }
    };
    if let Some(path) = &args.figure {
        let file = FigureFile::from_datum(&fx.datum);
        fs::write(path, render(&serde_json::to_value(&file)?))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let observed = match fx.observe(cli.depth) {
        Ok(o) => o,
        Err(e) => return Ok(Outcome::failed(format!("{e:#}"))),
    };
    let diff = fx.diff(&observed);
    let ok = diff.is_empty();
    let report = if args.diff {
        json!({"example": fx.name, "ok": ok, "diff": diff})
    } else {
        let entries: Vec<Value> = fx
            .expectations
            .iter()
            .map(|e| {
                let actual = observed.get(&e.key).cloned().unwrap_or(Value::Null);
                json!({"key": e.key, "citation": e.citation, "expected": e.expected, "actual": actual, "ok": actual == e.expected})
            })
            .collect();
        json!({"example": fx.name, "ok": ok, "entries": entries, "diff": diff})
    };
    let mut out = Outcome::new(ok, report);
    if cli.dot.is_some() {
        if let Some(lat) = fx.datum.lattice.as_ref() {
            if let Ok(g) = glue_mumford(&fx.datum.figure, Some(lat)).and_then(|g| annotate(&g, lat))
            {
                out = out.with_dot(stable_contraction(&g).to_dot(&fx.name));
            }
        }
    }
    Ok(out)
}
