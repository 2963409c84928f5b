use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use serde_json::{json, Value};

use augmark::config::Config;
use augmark::experiment::{qi_compare, qi_csv, QiSpec};
use augmark::farey::{Slope, SurfaceKind};
use augmark::format::{ball, ball_dot, ball_graphml, float, resolution_dot};
use augmark::hierarchy::{build_hierarchy, path_of, resolve, restrict_resolution, truncate, validate_hierarchy, validate_resolution};
use augmark::horoball::{gromov_delta_sample, horo_bfs_distance_z, horo_distance_z, preferred_path, HoroPoint};
use augmark::marking::{
    apply_move, bfs_distance, distance_formula_estimate, legal_moves, project_to_annulus, project_to_surface, sound_height_cap,
    AugmentedMarking,
};
use augmark::teich::{embed, kerckhoff_lower_bound, shortest_augmented_marking, teich_distance, TeichPoint};
use augmark::verify::{run_suite, SUITES};

/// Exact computations in the augmented marking graph of the once-punctured
/// torus and the four-punctured sphere.
#[derive(Parser)]
#[command(name = "augmark", version)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Flat key=value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    base_b: Option<u32>,
    #[arg(long, global = true)]
    epsilon0: Option<f64>,
    #[arg(long = "k-threshold", global = true)]
    k_threshold: Option<u64>,
    #[arg(long, global = true)]
    formula_k: Option<u64>,
    #[arg(long, global = true)]
    bfs_cap: Option<u32>,
    #[arg(long, global = true)]
    d_cap_slack: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    metric_scale: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// BFS distance, distance-formula estimate and hierarchy-path length.
    Dist { m1: String, m2: String },
    /// Legal moves from a marking and the markings they lead to.
    Neighbors { marking: String },
    /// Projections of a marking to the surface and to an annulus.
    Project {
        marking: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Slope,
    },
    #[command(subcommand)]
    Hierarchy(HierarchyCmd),
    #[command(subcommand)]
    Horoball(HoroCmd),
    #[command(subcommand)]
    Teich(TeichCmd),
    /// The ball of a given radius about a marking as DOT or GraphML.
    ExportBall {
        marking: String,
        #[arg(long, default_value_t = 2)]
        radius: u32,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
    },
    /// Run invariant suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum HierarchyCmd {
    Build { m1: String, m2: String },
    Resolve {
        m1: String,
        m2: String,
        /// Print the slice graph as DOT instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    Path { m1: String, m2: String },
    Truncate {
        m1: String,
        m2: String,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
}

#[derive(Subcommand)]
enum HoroCmd {
    Dist {
        #[arg(allow_hyphen_values = true)]
        p1: String,
        #[arg(allow_hyphen_values = true)]
        p2: String,
    },
    Path {
        #[arg(allow_hyphen_values = true)]
        p1: String,
        #[arg(allow_hyphen_values = true)]
        p2: String,
    },
    Delta {
        #[arg(long, default_value_t = 32)]
        radius: u64,
        #[arg(long, default_value_t = 6)]
        height: u32,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum TeichCmd {
    /// The point G(m).
    Embed { marking: String },
    /// The shortest augmented marking F(z).
    Marking {
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    Dist {
        #[arg(allow_hyphen_values = true)]
        z1: String,
        #[arg(allow_hyphen_values = true)]
        z2: String,
    },
    Kerckhoff {
        #[arg(allow_hyphen_values = true)]
        z1: String,
        #[arg(allow_hyphen_values = true)]
        z2: String,
        /// Slopes with |p|, q up to this bound.
        #[arg(long, default_value_t = 10)]
        ball: i64,
    },
    /// CSV table comparing marking and Teichmüller distances.
    Compare {
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Suite {
    Farey,
    Horoball,
    Marking,
    Hierarchy,
    Teich,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Graphml,
}

enum Failure {
    Precondition(String),
    Invariant(String),
}

impl From<augmark::Error> for Failure {
    fn from(e: augmark::Error) -> Self {
        Failure::Precondition(e.to_string())
    }
}

type CliResult = Result<String, Failure>;

fn load_config(opts: &GlobalOpts) -> Result<Config, Failure> {
    let mut cfg = Config::default();
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Precondition(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    macro_rules! over {
        ($($f:ident),*) => { $(if let Some(v) = opts.$f { cfg.$f = v; })* };
    }
    over!(base_b, epsilon0, k_threshold, formula_k, bfs_cap, d_cap_slack, seed, metric_scale);
    cfg.validate()?;
    Ok(cfg)
}

/// A marking as JSON or in the compact form `kind:base:transversal:d`.
fn parse_marking(s: &str) -> Result<AugmentedMarking, Failure> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| Failure::Precondition(format!("marking {s:?}: {e}")));
    }
    let parts: Vec<&str> = s.split(':').collect();
    let [kind, base, t, d] = parts[..] else {
        return Err(Failure::Precondition(format!("marking {s:?}: expected kind:base:transversal:d")));
    };
    let bad = |e: String| Failure::Precondition(format!("marking {s:?}: {e}"));
    let kind: SurfaceKind = kind.parse().map_err(|e: augmark::Error| bad(e.to_string()))?;
    let base: Slope = base.parse().map_err(|e: augmark::Error| bad(e.to_string()))?;
    let t: Slope = t.parse().map_err(|e: augmark::Error| bad(e.to_string()))?;
    let d: u32 = d.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
    Ok(AugmentedMarking::new(kind, base, t, d)?)
}

/// A horoball point as JSON or `x,n`.
fn parse_point(s: &str) -> Result<HoroPoint, Failure> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| Failure::Precondition(format!("point {s:?}: {e}")));
    }
    let bad = || Failure::Precondition(format!("point {s:?}: expected x,n"));
    let (x, n) = s.split_once(',').ok_or_else(bad)?;
    let x: BigInt = x.trim().parse().map_err(|_| bad())?;
    Ok(HoroPoint::new(x, n.trim().parse::<u32>().map_err(|_| bad())?))
}

/// A point of the upper half-plane as JSON or `re,im`.
fn parse_teich(s: &str) -> Result<TeichPoint, Failure> {
    let s = s.trim();
    let (re, im) = if s.starts_with('{') {
        let v: Value = serde_json::from_str(s).map_err(|e| Failure::Precondition(format!("point {s:?}: {e}")))?;
        (v["re"].as_f64(), v["im"].as_f64())
    } else {
        let (a, b) = s.split_once(',').unwrap_or((s, ""));
        (a.trim().parse().ok(), b.trim().parse().ok())
    };
    match (re, im) {
        (Some(re), Some(im)) => Ok(TeichPoint::new(re, im)?),
        _ => Err(Failure::Precondition(format!("point {s:?}: expected re,im or {{\"re\":..,\"im\":..}}"))),
    }
}

/// Rounds to the twelve significant digits used in all text output.
fn fixed(x: f64) -> Value {
    json!(float(x).parse::<f64>().expect("formatted float parses"))
}

fn teich_json(z: TeichPoint) -> Value {
    json!({"re": fixed(z.re), "im": fixed(z.im)})
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON value serializes") + "\n"
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("artifact serializes")
}

fn run(cli: Cli) -> CliResult {
    let cfg = load_config(&cli.opts)?;
    let params = cfg.horo();
    let tp = cfg.teich();
    match cli.command {
        Command::Dist { m1, m2 } => {
            let (m1, m2) = (parse_marking(&m1)?, parse_marking(&m2)?);
            let d_cap = sound_height_cap(&m1, &m2, cfg.bfs_cap) + cfg.d_cap_slack;
            let bfs = bfs_distance(&m1, &m2, params, cfg.bfs_cap, Some(d_cap));
            let h = build_hierarchy(&m1, &m2, params)?;
            let res = resolve(&h);
            Ok(pretty(&json!({
                "bfs": bfs,
                "formula": distance_formula_estimate(&m1, &m2, cfg.formula_k, params),
                "path_length": res.len(),
            })))
        }
        Command::Neighbors { marking } => {
            let m = parse_marking(&marking)?;
            let rows: Vec<Value> = legal_moves(&m, params)
                .into_iter()
                .map(|mv| Ok(json!({"move": to_value(&mv), "marking": to_value(&apply_move(&m, mv, params)?)})))
                .collect::<Result<_, Failure>>()?;
            Ok(pretty(&Value::Array(rows)))
        }
        Command::Project { marking, alpha } => {
            let m = parse_marking(&marking)?;
            if alpha != m.base && augmark::farey::intersection(alpha, m.base, m.kind) == 0 {
                return Err(Failure::Precondition(format!("{alpha} is disjoint from the base {}", m.base)));
            }
            Ok(pretty(&json!({
                "surface": to_value(&project_to_surface(&m)),
                "annulus": to_value(&project_to_annulus(&m, alpha)),
            })))
        }
        Command::Hierarchy(cmd) => hierarchy_cmd(cmd, &cfg),
        Command::Horoball(cmd) => match cmd {
            HoroCmd::Dist { p1, p2 } => {
                let (p, q) = (parse_point(&p1)?, parse_point(&p2)?);
                let exact = horo_distance_z(&p, &q, params);
                let bfs = horo_bfs_distance_z(&p, &q, params, exact.max(1));
                if bfs.is_some_and(|b| b != exact) {
                    return Err(Failure::Invariant(format!("exact {exact} disagrees with BFS {bfs:?}")));
                }
                Ok(pretty(&json!({"distance": exact, "bfs": bfs})))
            }
            HoroCmd::Path { p1, p2 } => {
                let (p, q) = (parse_point(&p1)?, parse_point(&p2)?);
                let path = preferred_path(&p, &q, params);
                Ok(pretty(&json!({
                    "length": path.len() - 1,
                    "distance": horo_distance_z(&p, &q, params),
                    "path": to_value(&path),
                })))
            }
            HoroCmd::Delta { radius, height, samples } => {
                if radius == 0 || samples == 0 {
                    return Err(Failure::Precondition("radius and samples must be positive".into()));
                }
                let delta = gromov_delta_sample(radius, height, samples, cfg.seed, params);
                Ok(pretty(&json!({"radius": radius, "height": height, "samples": samples, "seed": cfg.seed, "delta": delta.to_string()})))
            }
        },
        Command::Teich(cmd) => match cmd {
            TeichCmd::Embed { marking } => Ok(pretty(&teich_json(embed(&parse_marking(&marking)?, tp)?))),
            TeichCmd::Marking { z } => Ok(pretty(&to_value(&shortest_augmented_marking(parse_teich(&z)?, tp)))),
            TeichCmd::Dist { z1, z2 } => Ok(format!("{}\n", float(teich_distance(parse_teich(&z1)?, parse_teich(&z2)?, tp)))),
            TeichCmd::Kerckhoff { z1, z2, ball } => {
                if ball <= 0 {
                    return Err(Failure::Precondition("ball must be positive".into()));
                }
                let mut slopes = vec![Slope::INFINITY];
                for q in 1..=ball {
                    for p in -ball..=ball {
                        if p.gcd(&q) == 1 {
                            slopes.push(Slope::new(p, q)?);
                        }
                    }
                }
                let (a, b) = (parse_teich(&z1)?, parse_teich(&z2)?);
                Ok(pretty(&json!({
                    "bound": fixed(kerckhoff_lower_bound(a, b, &slopes, tp)),
                    "distance": fixed(teich_distance(a, b, tp)),
                    "slopes": slopes.len(),
                })))
            }
            TeichCmd::Compare { pairs } => Ok(qi_csv(&qi_compare(&QiSpec::new(pairs, cfg.seed), &cfg), &cfg)),
        },
        Command::ExportBall { marking, radius, format } => {
            let (nodes, edges) = ball(&parse_marking(&marking)?, radius, params);
            Ok(match format {
                GraphFormat::Dot => ball_dot(&nodes, &edges),
                GraphFormat::Graphml => ball_graphml(&nodes, &edges),
            })
        }
        Command::Verify { suite } => {
            let names: Vec<String> = match suite {
                Suite::All => SUITES.iter().map(|s| s.to_string()).collect(),
                other => vec![other.to_possible_value().expect("named variant").get_name().to_string()],
            };
            let mut out = cfg.header("#");
            let mut ok = true;
            for name in names {
                let report = run_suite(&name, &cfg).expect("known suite");
                ok &= report.passed();
                out.push_str(&report.to_string());
            }
            if ok {
                Ok(out)
            } else {
                Err(Failure::Invariant(out))
            }
        }
    }
}

fn hierarchy_cmd(cmd: HierarchyCmd, cfg: &Config) -> CliResult {
    let params = cfg.horo();
    let pair = |m1: &str, m2: &str| -> Result<_, Failure> {
        let (m1, m2) = (parse_marking(m1)?, parse_marking(m2)?);
        let h = build_hierarchy(&m1, &m2, params)?;
        validate_hierarchy(&h).map_err(|e| Failure::Invariant(e.to_string()))?;
        let res = resolve(&h);
        validate_resolution(&h, &res).map_err(|e| Failure::Invariant(e.to_string()))?;
        Ok((h, res))
    };
    match cmd {
        HierarchyCmd::Build { m1, m2 } => {
            let (h, _) = pair(&m1, &m2)?;
            Ok(pretty(&to_value(&h)))
        }
        HierarchyCmd::Resolve { m1, m2, dot } => {
            let (h, res) = pair(&m1, &m2)?;
            if dot {
                Ok(resolution_dot(&res, &path_of(&h, &res)?.markings))
            } else {
                Ok(pretty(&to_value(&res)))
            }
        }
        HierarchyCmd::Path { m1, m2 } => {
            let (h, res) = pair(&m1, &m2)?;
            Ok(pretty(&to_value(&path_of(&h, &res)?)))
        }
        HierarchyCmd::Truncate { m1, m2, from, to } => {
            let (h, res) = pair(&m1, &m2)?;
            let t = truncate(&h, &res, from, to)?;
            validate_hierarchy(&t).map_err(|e| Failure::Invariant(e.to_string()))?;
            validate_resolution(&t, &restrict_resolution(&res, from, to)).map_err(|e| Failure::Invariant(e.to_string()))?;
            Ok(pretty(&to_value(&t)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Invariant(msg)) => {
            eprint!("invariant failure:\n{msg}");
            if !msg.ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(1)
        }
    }
}
