use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use treecell::differential::{diff_tree, verify_d_squared};
use treecell::enumerate::{enumerate_family, enumerate_family_capped};
use treecell::hochschild::{
    check_composition, check_dg_action, check_gerstenhaber_homology, check_stasheff, AInfAlgebra,
    DEFAULT_CAP,
};
use treecell::models::{
    build_model, homology, model_homology, refine, retract_chain, retract_chain_map_failures,
    ModelKind, Refinement,
};
use treecell::operad::{compose_trees, i_inf_chain, pi_inf};
use treecell::polytope::{
    assoc_complex, blowup_stages, boundary_sum_check, bracketing_f_vector, cyclo_complex,
    incidence_check, to_off, Model,
};
use treecell::{CellComplex, ChainElement, Family, Tree};

const SCHEMA: &str = "treecell-report/1";

const EXIT_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "treecell",
    version,
    about = "Black/white trees, their cell complexes and their action on Hochschild cochains"
)]
struct Cli {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Polytope {
    /// Associahedron.
    K,
    /// Cyclohedron.
    W,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebraCheck {
    All,
    Stasheff,
    Dg,
    Composition,
    Gerstenhaber,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeFormat {
    Compact,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Off,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the trees of a family with n labels.
    Enum {
        #[arg(long)]
        family: Option<Family>,
        #[arg(long)]
        n: Option<usize>,
        /// Largest arity of a black vertex.
        #[arg(long)]
        cap: Option<usize>,
        /// Read trees from a JSON file written by `export` instead.
        #[arg(long, conflicts_with_all = ["family", "n", "cap"])]
        import: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "compact")]
        format: TreeFormat,
    },
    /// The differential of one tree.
    Diff {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        tree: String,
    },
    /// Check that the differential squares to zero on every tree.
    D2check {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
    },
    /// The partial composition `tree o_at with`.
    Compose {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        tree: String,
        #[arg(long)]
        at: usize,
        #[arg(long)]
        with: String,
    },
    /// Project a stable tree to bipartite trees.
    Pi {
        #[arg(long)]
        tree: String,
    },
    /// The section from bipartite to stable trees.
    Iinf {
        #[arg(long)]
        tree: String,
    },
    /// The cellular chain complex of a model of the little discs.
    Complex {
        #[arg(long)]
        model: ModelKind,
        #[arg(long)]
        n: usize,
    },
    /// f-vector of an associahedron or a cyclohedron.
    Fvec {
        #[arg(long, value_enum)]
        polytope: Polytope,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "coarse")]
        model: Model,
    },
    /// Incidences of the cubical cyclohedron and the boundary of its oriented sum.
    Incidence {
        #[arg(long)]
        n: usize,
    },
    /// Top cells of the cubical cyclohedron grouped by depth.
    Blowup {
        #[arg(long)]
        n: usize,
    },
    /// Integer homology of one model, or of all three compared.
    Homology {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        model: Option<ModelKind>,
    },
    /// Refine a cell with heights to a stable cell, or check the fibres.
    Refine {
        #[arg(long, required_unless_present = "tree")]
        n: Option<usize>,
        #[arg(long, conflicts_with = "n")]
        tree: Option<String>,
    },
    /// The retraction onto bipartite trees, on one tree or checked on all.
    Retract {
        #[arg(long)]
        family: Family,
        #[arg(long, required_unless_present = "tree")]
        n: Option<usize>,
        #[arg(long, conflicts_with = "n")]
        tree: Option<String>,
    },
    /// Checks on an A-infinity algebra: by name (dual, dga, mu3) or a JSON file.
    HochCheck {
        #[arg(long, default_value = "dual")]
        algebra: String,
        #[arg(long, value_enum, default_value = "all")]
        check: AlgebraCheck,
        /// Number of white vertices for the dg and composition checks.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest arity of cochains.
        #[arg(long, env = "TREECELL_ARITY_CAP", default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Highest Hochschild degree computed.
        #[arg(long, default_value_t = 3)]
        top: usize,
    },
    /// Export a polytope (OFF or JSON) or the trees of a family (JSON).
    Export {
        #[arg(long, value_enum, conflicts_with = "family")]
        polytope: Option<Polytope>,
        #[arg(long, required_unless_present = "polytope")]
        family: Option<Family>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "coarse")]
        model: Model,
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFormat,
        /// Write to a file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// What a command produced and whether its checks passed.
enum Output {
    Report { body: Value, passed: bool },
    Text(String),
}

fn report(body: Value) -> Output {
    Output::Report { body, passed: true }
}

fn checked(body: Value, passed: bool) -> Output {
    Output::Report { body, passed }
}

type Fallible<T> = std::result::Result<T, String>;

fn parse_tree(s: &str) -> Fallible<Tree> {
    if s.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
        Tree::from_json(&v).map_err(|e| e.to_string())
    } else {
        Tree::parse_compact(s).map_err(|e| e.to_string())
    }
}

fn tree_in(family: Family, s: &str) -> Fallible<Tree> {
    let t = parse_tree(s)?;
    if !family.contains(&t) {
        return Err(format!("{t} is not a tree of the family {family}"));
    }
    Ok(t)
}

fn chain(x: &ChainElement) -> Value {
    json!({"text": x.to_string(), "terms": x.to_json()})
}

fn polytope_complex(p: Polytope, n: usize, model: Model) -> treecell::Result<CellComplex> {
    match p {
        Polytope::K => assoc_complex(n, model),
        Polytope::W => cyclo_complex(n, model),
    }
}

fn load_algebra(name: &str, cap: usize) -> Fallible<AInfAlgebra> {
    let mut a = match AInfAlgebra::named(name) {
        Ok(a) => a,
        Err(_) => {
            let text = fs::read_to_string(name).map_err(|e| format!("{name}: {e}"))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| format!("{name}: {e}"))?;
            AInfAlgebra::from_json(&v).map_err(|e| e.to_string())?
        }
    };
    a.cap = cap;
    Ok(a)
}

fn trees_json(trees: &[Tree], format: TreeFormat) -> Vec<Value> {
    match format {
        TreeFormat::Compact => trees.iter().map(|t| json!(t.to_compact())).collect(),
        TreeFormat::Json => trees.iter().map(Tree::to_json).collect(),
    }
}

fn run(command: Command) -> Fallible<Output> {
    let lib = |e: treecell::Error| e.to_string();
    Ok(match command {
        Command::Enum {
            family,
            n,
            cap,
            import,
            format,
        } => {
            let (family, trees) = match import {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let v: Value = serde_json::from_str(&text)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let family = v["family"]
                        .as_str()
                        .map(str::parse::<Family>)
                        .transpose()
                        .map_err(lib)?;
                    let items = v["trees"]
                        .as_array()
                        .ok_or("expected an object with a \"trees\" array")?;
                    let trees = items
                        .iter()
                        .map(|t| Tree::from_json(t).map_err(lib))
                        .collect::<Fallible<Vec<_>>>()?;
                    (family, trees)
                }
                None => {
                    let family = family.ok_or("--family is required")?;
                    let n = n.ok_or("--n is required")?;
                    let trees = match cap {
                        Some(c) => enumerate_family_capped(family, n, c),
                        None => enumerate_family(family, n),
                    }
                    .map_err(lib)?;
                    (Some(family), trees)
                }
            };
            report(json!({
                "family": family.map(Family::name),
                "count": trees.len(),
                "trees": trees_json(&trees, format),
            }))
        }
        Command::Diff { family, tree } => {
            let t = tree_in(family, &tree)?;
            report(
                json!({"family": family.name(), "tree": t.to_compact(), "differential": chain(&diff_tree(family, &t))}),
            )
        }
        Command::D2check { family, n } => {
            let r = verify_d_squared(family, n).map_err(lib)?;
            checked(r.to_json(), r.passed())
        }
        Command::Compose {
            family,
            tree,
            at,
            with,
        } => {
            let a = tree_in(family, &tree)?;
            let b = tree_in(family, &with)?;
            let c = compose_trees(family.parent(), &a, at, &b).map_err(lib)?;
            report(
                json!({"family": family.name(), "tree": a.to_compact(), "at": at, "with": b.to_compact(), "composite": chain(&c)}),
            )
        }
        Command::Pi { tree } => {
            let t = tree_in(Family::Stable, &tree)?;
            report(json!({"tree": t.to_compact(), "projection": chain(&pi_inf(&t))}))
        }
        Command::Iinf { tree } => {
            let t = tree_in(Family::Bipart, &tree)?;
            report(json!({"tree": t.to_compact(), "section": chain(&i_inf_chain(&t))}))
        }
        Command::Complex { model, n } => {
            let c = build_model(model, n).map_err(lib)?;
            let ok = c.d_squared_is_zero();
            checked(c.to_json(), ok)
        }
        Command::Fvec { polytope, n, model } => {
            let c = polytope_complex(polytope, n, model).map_err(lib)?;
            let f = c.f_vector();
            let chi = c.euler_characteristic();
            let oracle = matches!(model, Model::Coarse)
                .then(|| bracketing_f_vector(n, matches!(polytope, Polytope::W)));
            let ok = chi == 1 && oracle.as_ref().is_none_or(|o| *o == f);
            checked(
                json!({"polytope": c.name, "model": model.to_string(), "f_vector": f, "euler_characteristic": chi, "bracketing_oracle": oracle}),
                ok,
            )
        }
        Command::Incidence { n } => {
            let c = cyclo_complex(n, Model::Cubical).map_err(lib)?;
            let inc = incidence_check(&c);
            let sum = boundary_sum_check(&c).map_err(lib)?;
            let ok = inc.passed() && sum.passed();
            checked(
                json!({"incidence": inc.to_json(), "boundary_sum": sum.to_json()}),
                ok,
            )
        }
        Command::Blowup { n } => {
            let stages = blowup_stages(n).map_err(lib)?;
            report(json!({
                "n": n,
                "stages": stages.iter().map(|s| json!({"depth": s.depth, "shape": s.shape.to_string(), "count": s.count})).collect::<Vec<_>>(),
            }))
        }
        Command::Homology { n, model } => match model {
            Some(kind) => {
                let c = build_model(kind, n).map_err(lib)?;
                let h = homology(&c).map_err(lib)?;
                let ok = h.torsion.iter().all(Vec::is_empty);
                checked(
                    json!({"model": kind.name(), "n": n, "homology": h.to_json(), "euler_characteristic": c.euler_characteristic()}),
                    ok,
                )
            }
            None => {
                let h = model_homology(n).map_err(lib)?;
                checked(h.to_json(), h.agree())
            }
        },
        Command::Refine { n, tree } => match tree {
            Some(s) => {
                let t = tree_in(Family::Ht, &s)?;
                report(
                    json!({"tree": t.to_compact(), "refines_to": refine(&t).map_err(lib)?.to_compact()}),
                )
            }
            None => {
                let r = Refinement::new(n.unwrap_or_default())
                    .map_err(lib)?
                    .check()
                    .map_err(lib)?;
                checked(r.to_json(), r.passed())
            }
        },
        Command::Retract { family, n, tree } => match tree {
            Some(s) => {
                let t = tree_in(family, &s)?;
                let x = ChainElement::from_tree(family, t.clone());
                report(
                    json!({"family": family.name(), "tree": t.to_compact(), "retraction": chain(&retract_chain(&x).map_err(lib)?)}),
                )
            }
            None => {
                let n = n.unwrap_or_default();
                let bad = retract_chain_map_failures(family, n).map_err(lib)?;
                let ok = bad.is_empty();
                checked(
                    json!({"family": family.name(), "n": n, "chain_map_failures": bad.iter().map(Tree::to_compact).collect::<Vec<_>>()}),
                    ok,
                )
            }
        },
        Command::HochCheck {
            algebra,
            check,
            n,
            samples,
            seed,
            cap,
            top,
        } => {
            let a = load_algebra(&algebra, cap)?;
            let mut body = serde_json::Map::new();
            let mut ok = true;
            let all = matches!(check, AlgebraCheck::All);
            if all || matches!(check, AlgebraCheck::Stasheff) {
                let r = check_stasheff(&a);
                ok &= r.passed();
                body.insert("stasheff".into(), r.to_json());
            }
            if all || matches!(check, AlgebraCheck::Dg) {
                let r = check_dg_action(&a, n, samples, seed).map_err(lib)?;
                ok &= r.passed();
                body.insert("dg_action".into(), r.to_json());
            }
            if all || matches!(check, AlgebraCheck::Composition) {
                let r = check_composition(&a, n, samples, seed).map_err(lib)?;
                ok &= r.passed();
                body.insert("composition".into(), r.to_json());
            }
            if all && !a.is_associative() {
                body.insert(
                    "gerstenhaber".into(),
                    json!({"skipped": "the algebra has structure maps other than m_2"}),
                );
            } else if all || matches!(check, AlgebraCheck::Gerstenhaber) {
                let r = check_gerstenhaber_homology(&a, top).map_err(lib)?;
                ok &= r.passed();
                body.insert("gerstenhaber".into(), r.to_json());
            }
            body.insert("algebra".into(), json!(algebra));
            checked(Value::Object(body), ok)
        }
        Command::Export {
            polytope,
            family,
            n,
            model,
            format,
            output,
        } => {
            let text = match (polytope, family) {
                (Some(p), _) => {
                    let c = polytope_complex(p, n, model).map_err(lib)?;
                    match format {
                        ExportFormat::Off => to_off(&c).map_err(lib)?,
                        ExportFormat::Json => serde_json::to_string_pretty(&c.to_json()).unwrap(),
                    }
                }
                (None, Some(f)) => {
                    if matches!(format, ExportFormat::Off) {
                        return Err("OFF export needs --polytope".into());
                    }
                    let trees = enumerate_family(f, n).map_err(lib)?;
                    serde_json::to_string_pretty(&json!({"family": f.name(), "n": n, "trees": trees_json(&trees, TreeFormat::Json)})).unwrap()
                }
                (None, None) => return Err("one of --polytope or --family is required".into()),
            };
            match output {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
                    report(json!({"written": path.display().to_string()}))
                }
                None => Output::Text(text),
            }
        }
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Enum { .. } => "enum",
        Command::Diff { .. } => "diff",
        Command::D2check { .. } => "d2check",
        Command::Compose { .. } => "compose",
        Command::Pi { .. } => "pi",
        Command::Iinf { .. } => "iinf",
        Command::Complex { .. } => "complex",
        Command::Fvec { .. } => "fvec",
        Command::Incidence { .. } => "incidence",
        Command::Blowup { .. } => "blowup",
        Command::Homology { .. } => "homology",
        Command::Refine { .. } => "refine",
        Command::Retract { .. } => "retract",
        Command::HochCheck { .. } => "hoch-check",
        Command::Export { .. } => "export",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    match run(cli.command) {
        Ok(Output::Text(text)) => {
            // a closed pipe is not an error of the command
            let _ = write!(
                io::stdout(),
                "{}{}",
                text,
                if text.ends_with('\n') { "" } else { "\n" }
            );
            ExitCode::SUCCESS
        }
        Ok(Output::Report { body, passed }) => {
            let mut out = json!({"schema": SCHEMA, "command": name, "passed": passed});
            if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
                for (k, v) in b {
                    o.entry(k).or_insert(v);
                }
            }
            let text = if cli.pretty {
                serde_json::to_string_pretty(&out)
            } else {
                serde_json::to_string(&out)
            };
            let _ = writeln!(io::stdout(), "{}", text.unwrap());
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Err(msg) => {
            eprintln!("treecell {name}: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
