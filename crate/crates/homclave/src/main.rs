//! Command-line front end: graph parsing/generation, homomorphism I/O, and
//! commands wiring the solvers and oracles. Machine-readable JSON goes to
//! stdout, diagnostics to stderr. Exit codes: 0 success, 1 error, 2 when a
//! search found nothing (and so nothing had to be produced).

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use homclave::graph::{validate_hom, Graph, Homomorphism};
use homclave::io::{emit_dimacs, load_hom, parse_fraction, parse_graph_spec, HomFile};
use homclave::oracle::{enumerate_homs, find_hom, recolor_reachable, EnumerationBudget, Reachability};
use homclave::squarefree::{Side, SplitResult};
use homclave::walk::{primitive_root, reduce, Walk};
use homclave::winding::{delta_phi, winding_number, CircularParams};

#[derive(Parser)]
#[command(
    name = "homclave",
    version,
    about = "Factor-coloring toolkit for graph products: walk reduction, winding numbers, and split solvers",
    after_help = "Graph specs: cycle:n | path:n | clique:n | circ:p/q | petersen | file:PATH\n\
                  Walks are comma-separated vertex lists. HOMCLAVE_SEED is reserved for\n\
                  randomized property commands (all shipped commands are deterministic)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check, find, or enumerate homomorphisms.
    Hom {
        #[command(subcommand)]
        cmd: HomCmd,
    },
    /// Tensor (categorical) product of two graphs.
    Product {
        left: String,
        right: String,
        /// Emit normalized DIMACS instead of JSON.
        #[arg(long)]
        dimacs: bool,
    },
    /// Report whether a graph is square-free.
    Squarefree { graph: String },
    /// Walk reduction and primitive roots.
    Walk {
        #[command(subcommand)]
        cmd: WalkCmd,
    },
    /// Winding data of a walk in the circular clique K_{p/q} (p odd).
    Winding {
        /// Parameters as p/q, e.g. 7/3.
        pq: String,
        /// Walk as a comma-separated vertex list.
        walk: String,
    },
    /// Produce a factor coloring from a product coloring.
    Split {
        left: String,
        right: String,
        /// Codomain: a square-free graph spec, or circ:p/q with 2 <= p/q < 4.
        codomain: String,
        /// Coloring source: a JSON map file, or "search" to brute-force one.
        #[arg(default_value = "search")]
        mu: String,
    },
    /// Recoloring reachability between two colorings.
    Recolor {
        #[command(subcommand)]
        cmd: RecolorCmd,
    },
}

#[derive(Subcommand)]
enum HomCmd {
    /// Validate a map file as a homomorphism.
    Check {
        domain: String,
        codomain: String,
        map: String,
    },
    /// Find one homomorphism by backtracking (exit 2 if none exists).
    Find { domain: String, codomain: String },
    /// Enumerate homomorphisms in lexicographic order, up to a budget.
    Enum {
        domain: String,
        codomain: String,
        #[arg(long, default_value_t = 10_000)]
        max_solutions: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: usize,
    },
}

#[derive(Subcommand)]
enum WalkCmd {
    /// Reduce a walk to its backtrack-free normal form.
    Reduce { graph: String, walk: String },
    /// Primitive-root decomposition of a closed walk.
    Root { graph: String, walk: String },
}

#[derive(Subcommand)]
enum RecolorCmd {
    /// Decide reachability by BFS over single-vertex recolorings.
    Reach {
        graph: String,
        codomain: String,
        from: String,
        to: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: usize,
    },
    /// Like reach, but also print the move sequence.
    Trace {
        graph: String,
        codomain: String,
        from: String,
        to: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: usize,
    },
}

fn main() -> ExitCode {
    if let Ok(seed) = std::env::var("HOMCLAVE_SEED") {
        if seed.parse::<u64>().is_err() {
            eprintln!("error: HOMCLAVE_SEED must be a u64, got '{seed}'");
            return ExitCode::from(1);
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<u8, String> {
    match command {
        Command::Hom { cmd } => run_hom(cmd),
        Command::Product { left, right, dimacs } => {
            let g = parse_graph_spec(&left).map_err(|e| e.to_string())?;
            let h = parse_graph_spec(&right).map_err(|e| e.to_string())?;
            let p = g.tensor_product(&h);
            if dimacs {
                print!("{}", emit_dimacs(&p));
            } else {
                let edges: Vec<[usize; 2]> = p.edges().map(|(u, v)| [u, v]).collect();
                println!(
                    "{}",
                    json!({ "n": p.vertex_count(), "edges": edges })
                );
            }
            Ok(0)
        }
        Command::Squarefree { graph } => {
            let g = parse_graph_spec(&graph).map_err(|e| e.to_string())?;
            println!("{}", json!({ "square_free": g.is_square_free() }));
            Ok(0)
        }
        Command::Walk { cmd } => run_walk(cmd),
        Command::Winding { pq, walk } => {
            let (p, q) =
                parse_fraction(&pq).ok_or_else(|| format!("cannot parse '{pq}' as p/q"))?;
            let params = CircularParams::new(p, q).map_err(|e| e.to_string())?;
            let w = Walk::parse(&walk).map_err(|e| e.to_string())?;
            let value = delta_phi(&w, &params).map_err(|e| e.to_string())?;
            let winding = if w.is_closed() {
                Some(winding_number(&w, &params).map_err(|e| e.to_string())?)
            } else {
                None
            };
            println!(
                "{}",
                json!({ "delta": value.delta, "winding": winding })
            );
            Ok(0)
        }
        Command::Split {
            left,
            right,
            codomain,
            mu,
        } => run_split(&left, &right, &codomain, &mu),
        Command::Recolor { cmd } => run_recolor(cmd),
    }
}

fn run_hom(cmd: HomCmd) -> Result<u8, String> {
    match cmd {
        HomCmd::Check {
            domain,
            codomain,
            map,
        } => {
            let g = parse_graph_spec(&domain).map_err(|e| e.to_string())?;
            let k = parse_graph_spec(&codomain).map_err(|e| e.to_string())?;
            let hom = load_hom(&map).map_err(|e| e.to_string())?;
            let valid = validate_hom(&hom, &g, &k).map_err(|e| e.to_string())?;
            println!("{}", json!({ "valid": valid }));
            Ok(0)
        }
        HomCmd::Find { domain, codomain } => {
            let g = parse_graph_spec(&domain).map_err(|e| e.to_string())?;
            let k = parse_graph_spec(&codomain).map_err(|e| e.to_string())?;
            match find_hom(&g, &k) {
                Some(h) => {
                    println!("{}", json!({ "found": true, "map": h.map() }));
                    Ok(0)
                }
                None => {
                    println!("{}", json!({ "found": false }));
                    Ok(2)
                }
            }
        }
        HomCmd::Enum {
            domain,
            codomain,
            max_solutions,
            max_nodes,
        } => {
            let g = parse_graph_spec(&domain).map_err(|e| e.to_string())?;
            let k = parse_graph_spec(&codomain).map_err(|e| e.to_string())?;
            let budget = EnumerationBudget::new(max_solutions, max_nodes);
            let (maps, complete) = match enumerate_homs(&g, &k, &budget) {
                Ok(v) => (v, true),
                Err(homclave::oracle::OracleError::BudgetExceeded { partial, .. }) => {
                    (partial, false)
                }
            };
            let maps_json: Vec<&[usize]> = maps.iter().map(|h| h.map()).collect();
            println!(
                "{}",
                json!({ "count": maps.len(), "complete": complete, "maps": maps_json })
            );
            Ok(0)
        }
    }
}

fn run_walk(cmd: WalkCmd) -> Result<u8, String> {
    match cmd {
        WalkCmd::Reduce { graph, walk } => {
            let g = parse_graph_spec(&graph).map_err(|e| e.to_string())?;
            let w = Walk::parse(&walk)
                .and_then(|w| Walk::new(&g, w.vertices().to_vec()))
                .map_err(|e| e.to_string())?;
            let r = reduce(&w);
            println!(
                "{}",
                json!({ "input": w.to_string(), "reduced": r.to_string(), "length": r.len() })
            );
            Ok(0)
        }
        WalkCmd::Root { graph, walk } => {
            let g = parse_graph_spec(&graph).map_err(|e| e.to_string())?;
            let w = Walk::parse(&walk)
                .and_then(|w| Walk::new(&g, w.vertices().to_vec()))
                .map_err(|e| e.to_string())?;
            let root = primitive_root(&reduce(&w)).map_err(|e| e.to_string())?;
            println!(
                "{}",
                json!({
                    "conjugator": root.conjugator.to_string(),
                    "core": root.core.to_string(),
                    "exponent": root.exponent,
                })
            );
            Ok(0)
        }
    }
}

fn run_split(left: &str, right: &str, codomain: &str, mu_source: &str) -> Result<u8, String> {
    let g = parse_graph_spec(left).map_err(|e| e.to_string())?;
    let h = parse_graph_spec(right).map_err(|e| e.to_string())?;

    enum Target {
        Circular(usize, usize, Graph),
        SquareFree(Graph),
    }
    let target = if let Some(pq) = codomain.strip_prefix("circ:") {
        let (p, q) =
            parse_fraction(pq).ok_or_else(|| format!("cannot parse '{codomain}' as circ:p/q"))?;
        if q == 0 || p < 2 * q || p >= 4 * q {
            return Err(format!(
                "unsupported codomain: circ:{p}/{q} is outside 2 <= p/q < 4"
            ));
        }
        let k = Graph::circular_clique(p, q).map_err(|e| e.to_string())?;
        Target::Circular(p, q, k)
    } else {
        let k = parse_graph_spec(codomain).map_err(|e| e.to_string())?;
        if !k.is_square_free() {
            return Err(format!(
                "unsupported codomain: '{codomain}' has squares and is not a declared circular clique in range"
            ));
        }
        Target::SquareFree(k)
    };
    let k_graph = match &target {
        Target::Circular(_, _, k) => k,
        Target::SquareFree(k) => k,
    };

    let product = g.tensor_product(&h);
    let mu: Homomorphism = if mu_source == "search" {
        match find_hom(&product, k_graph) {
            Some(m) => m,
            None => {
                println!("{}", json!({ "found": false }));
                return Ok(2);
            }
        }
    } else {
        load_hom(mu_source).map_err(|e| e.to_string())?
    };

    let result: SplitResult = match &target {
        Target::Circular(p, q, _) => {
            homclave::circular::solve_circular(&g, &h, *p, *q, &mu).map_err(|e| e.to_string())?
        }
        Target::SquareFree(k) => {
            homclave::squarefree::solve(&g, &h, k, &mu).map_err(|e| e.to_string())?
        }
    };

    let side = match result.side {
        Side::G => "G",
        Side::H => "H",
    };
    let intermediate = result.intermediate.as_ref().map(|fact| {
        json!({
            "gamma": fact.gamma.map(),
            "delta": fact.delta.map(),
            "cycle_order": fact.delta.domain_order(),
        })
    });
    // The deterministic base: smallest edges of both factors (recorded so
    // traces are reproducible).
    let anchors = json!({
        "g_edge": g.edges().next().map(|(a, b)| [a, b]),
        "h_edge": h.edges().next().map(|(a, b)| [a, b]),
    });
    println!(
        "{}",
        json!({
            "side": side,
            "map": result.hom.map(),
            "trace": result.trace,
            "intermediate": intermediate,
            "anchors": anchors,
            "mu": HomFile::from_hom(&mu),
        })
    );
    Ok(0)
}

fn run_recolor(cmd: RecolorCmd) -> Result<u8, String> {
    let (graph, codomain, from, to, max_nodes, want_trace) = match cmd {
        RecolorCmd::Reach {
            graph,
            codomain,
            from,
            to,
            max_nodes,
        } => (graph, codomain, from, to, max_nodes, false),
        RecolorCmd::Trace {
            graph,
            codomain,
            from,
            to,
            max_nodes,
        } => (graph, codomain, from, to, max_nodes, true),
    };
    let g = parse_graph_spec(&graph).map_err(|e| e.to_string())?;
    let k = parse_graph_spec(&codomain).map_err(|e| e.to_string())?;
    let a = load_hom(&from).map_err(|e| e.to_string())?;
    let b = load_hom(&to).map_err(|e| e.to_string())?;
    for (name, hom) in [("from", &a), ("to", &b)] {
        if !validate_hom(hom, &g, &k).map_err(|e| e.to_string())? {
            return Err(format!("'{name}' map is not a valid coloring"));
        }
    }
    let budget = EnumerationBudget::new(1, max_nodes);
    match recolor_reachable(&a, &b, &g, &k, &budget) {
        Reachability::Reachable(moves) => {
            if want_trace {
                let steps: Vec<_> = moves
                    .iter()
                    .map(|m| json!({ "vertex": m.vertex, "to": m.to }))
                    .collect();
                println!("{}", json!({ "reachable": true, "steps": steps }));
            } else {
                println!("{}", json!({ "reachable": true }));
            }
            Ok(0)
        }
        Reachability::Unreachable => {
            println!("{}", json!({ "reachable": false }));
            Ok(0)
        }
        Reachability::Unknown => {
            println!("{}", json!({ "reachable": null }));
            Ok(0)
        }
    }
}
