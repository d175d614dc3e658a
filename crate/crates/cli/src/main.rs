//! Command line driver: parse set descriptions, classify branching systems,
//! emit kernels and DOT graphs, and run the order-scale maps.
//!
//! Exit status: 0 on success, 1 on domain errors (printed as
//! `error: <Name>: <detail>`), 2 on usage errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cbtree::{
    back_and_forth, classify, closure_construct, overlay, parse_description, to_dot, truncate,
    CountableOrder, DyadicRational, Error, OverlayRule, TreeAutomaton, Verdict, SAFE_BAND_MARGIN,
};

#[derive(Parser)]
#[command(
    name = "cbtree",
    version,
    about = "Closed subsets of the unit interval as dyadic branching systems: pruning, perfect kernels, and the countable/continuum dichotomy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the set described in FILE as countable or continuum
    Classify {
        file: PathBuf,
        /// Re-run the verdict through the depth-truncated brute-force path
        #[arg(long)]
        oracle: bool,
    },
    /// Print the number of pruning passes needed to reach the perfect kernel
    Rank { file: PathBuf },
    /// Compute the perfect kernel and emit it
    Kernel {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Dot)]
        emit: Emit,
    },
    /// Map a point of the unit interval onto a scale, with a side rule
    MapPoint {
        #[arg(long)]
        scale: String,
        /// The point, written a/2^n
        #[arg(long)]
        point: String,
        #[arg(long, value_enum)]
        rule: Rule,
    },
    /// Print the first elements of a named scale
    Scale {
        #[arg(long)]
        name: String,
        #[arg(long)]
        count: usize,
    },
    /// Run the alternating partial-isomorphism construction between two scales
    BackAndForth {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        n: usize,
    },
    /// Decompose the closure of a countable order into kernel part, gap
    /// endpoints, and densely ordered remainder
    Closure {
        #[arg(long)]
        order: String,
        #[arg(long)]
        depth: usize,
    },
    /// Print the nodes of the branching system down to a depth
    Truncate {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Left,
    Right,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}

fn load_automaton(file: &PathBuf) -> Result<TreeAutomaton, Error> {
    let text = fs::read_to_string(file)
        .map_err(|e| Error::MalformedDescription(format!("{}: {e}", file.display())))?;
    cbtree::build(&parse_description(&text)?)
}

fn named_order(name: &str) -> Result<CountableOrder, Error> {
    match name {
        "D" => Ok(CountableOrder::dyadic_scale()),
        "E" => Ok(CountableOrder::even_scale()),
        "omega" => Ok(CountableOrder::omega()),
        _ => {
            if let Some(list) = name.strip_prefix("finite:") {
                let elements: Result<Vec<DyadicRational>, Error> =
                    list.split(',').map(|s| s.trim().parse()).collect();
                return CountableOrder::finite(elements?);
            }
            Err(Error::MalformedDescription(format!(
                "unknown order {name:?}: expected D, E, omega, or finite:<list>"
            )))
        }
    }
}

fn run(command: Command) -> Result<String, Error> {
    match command {
        Command::Classify { file, oracle } => {
            let t = load_automaton(&file)?;
            let c = classify(&t);
            let mut line = c.render();
            if oracle {
                let depth = 12;
                let truncated_countable = cbtree::oracle::truncated_verdict_is_countable(&t, depth);
                let agree = truncated_countable == (c.verdict == Verdict::Countable);
                let band = depth - SAFE_BAND_MARGIN;
                if !agree {
                    return Err(Error::DepthTooSmall(
                        "truncated verdict disagrees with the pruning verdict".into(),
                    ));
                }
                line.push_str(&format!(" oracle=agree band={band}"));
            }
            Ok(format!("{line}\n"))
        }
        Command::Rank { file } => {
            let t = load_automaton(&file)?;
            let c = classify(&t);
            Ok(format!("rank={}\n", c.rank))
        }
        Command::Kernel { file, emit } => {
            let t = load_automaton(&file)?;
            let c = classify(&t);
            if c.kernel.is_empty() {
                return Err(Error::EmptyKernel);
            }
            match emit {
                Emit::Dot => Ok(to_dot(&c.kernel)),
                Emit::Text => {
                    let mut out = format!("kernel_states={}\n", c.kernel.state_count());
                    for q in c.kernel.states() {
                        let show = |child: Option<usize>| {
                            child.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
                        };
                        let [zero, one] = c.kernel.children(q);
                        out.push_str(&format!("{q}: 0->{} 1->{}\n", show(zero), show(one)));
                    }
                    Ok(out)
                }
            }
        }
        Command::MapPoint { scale, point, rule } => {
            let order = named_order(&scale)?;
            let x: DyadicRational = point.parse()?;
            let rule = match rule {
                Rule::Left => OverlayRule::Left,
                Rule::Right => OverlayRule::Right,
            };
            let image = overlay(&order, &x, rule)?;
            Ok(format!("{}\n", image.render()))
        }
        Command::Scale { name, count } => {
            let order = named_order(&name)?;
            let mut out = String::new();
            for (i, x) in order.prefix(count).iter().enumerate() {
                out.push_str(&format!("{}: {x}\n", i + 1));
            }
            Ok(out)
        }
        Command::BackAndForth { a, b, n } => {
            let left = named_order(&a)?;
            let right = named_order(&b)?;
            let pairs = back_and_forth(&left, &right, n)?;
            let mut out = String::new();
            for (i, (x, y)) in pairs.iter().enumerate() {
                out.push_str(&format!("{}: {x} <-> {y}\n", i + 1));
            }
            Ok(out)
        }
        Command::Closure { order, depth } => {
            let m1 = named_order(&order)?;
            let dec = closure_construct(&m1, depth)?;
            let mut out = String::new();
            let verdict = if dec.kernel_is_empty() {
                "countable-closure"
            } else {
                "continuum"
            };
            out.push_str(&format!(
                "verdict={verdict} rank={} kernel_states={} truncated={}\n",
                dec.rank,
                dec.kernel.state_count(),
                dec.truncated
            ));
            let render = |label: &str, xs: &[DyadicRational]| {
                let mut line = format!("{label}[1..{}]=", xs.len());
                for x in xs {
                    line.push_str(&format!(" {x}"));
                }
                line.push('\n');
                line
            };
            out.push_str(&render("J", &dec.j));
            out.push_str(&render("J1", &dec.j1));
            out.push_str(&render("J2", &dec.j2));
            Ok(out)
        }
        Command::Truncate { file, depth } => {
            let t = load_automaton(&file)?;
            let f = truncate(&t, depth);
            let mut out = format!("depth={} nodes={}\n", depth, f.nodes().len());
            for level in 0..=depth {
                let mut line = format!("{level}:");
                for w in f.nodes().iter().filter(|w| w.len() == level) {
                    line.push_str(&format!(" {w}"));
                }
                line.push('\n');
                out.push_str(&line);
            }
            Ok(out)
        }
    }
}
