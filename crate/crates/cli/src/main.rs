mod input;
mod job;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use job::JobSpec;

#[derive(Parser)]
#[command(
    name = "bredon",
    version,
    about = "Bredon cohomology and cohomological dimension of finite groups relative to families",
    after_help = "Exit codes: 0 pass, 1 verification failure, 2 input error, 3 budget exhausted or indeterminate.\n\
                  Groups are a name (z2, s3, a5, ...), inline JSON {\"degree\":n,\"generators\":[[...]]} or a file path."
)]
struct Cli {
    #[command(flatten)]
    budgets: Budgets,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Budgets {
    /// Largest group order whose subgroup lattice is enumerated.
    #[arg(long, global = true, env = "BREDON_MAX_ORDER")]
    max_order: Option<usize>,
    /// Largest total rank of a resolution stage.
    #[arg(long, global = true, env = "BREDON_MAX_RANK")]
    max_rank: Option<usize>,
    /// Largest number of subgroup classes for family enumeration.
    #[arg(long, global = true, env = "BREDON_MAX_CLASSES")]
    max_classes: Option<usize>,
    /// Wall-clock seconds allowed per job.
    #[arg(long, global = true, env = "BREDON_TIME_LIMIT")]
    time_limit: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct GroupArg {
    /// Group name, inline JSON or path.
    #[arg(long)]
    group: String,
}

#[derive(Args)]
struct GroupFamily {
    #[arg(long)]
    group: String,
    /// all, proper, trivial, or {"type":"generated","seeds":[[perm, ...], ...]}.
    #[arg(long)]
    family: String,
}

#[derive(Args)]
struct ActionArgs {
    /// The group acted on.
    #[arg(long)]
    pi: String,
    /// The acting group.
    #[arg(long)]
    g: String,
    /// trivial, invert, or {"generator_images":{"0":[...], ...}}.
    #[arg(long)]
    action: String,
    /// Subgroup of g (generating permutations, whole or trivial).
    #[arg(long)]
    subgroup: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// List the elements and subgroups of a group.
    Subgroups(GroupArg),
    /// Enumerate the families of subgroups.
    Families(GroupArg),
    /// Describe the orbit category of a family.
    Orbitcat {
        #[command(flatten)]
        gf: GroupFamily,
        /// Keep every subgroup of the family, not one per conjugacy class.
        #[arg(long)]
        full: bool,
    },
    /// Bredon cohomology with coefficients z, z/k or free:<object>.
    Cohomology {
        #[command(flatten)]
        gf: GroupFamily,
        #[arg(long, default_value = "z")]
        coefficients: String,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Cohomological dimension of the group relative to the family.
    Cd {
        #[command(flatten)]
        gf: GroupFamily,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Non-abelian first cohomology of a subgroup of g with values in pi.
    H1(ActionArgs),
    /// Semidirect product and the complement subconjugacy check.
    Semidirect(ActionArgs),
    /// Reduce a poset by removing superfluous elements.
    Ereduce {
        /// chain:N, crown:M,N, or {"elements":[...],"less":[[a,b],...]}.
        #[arg(long, conflicts_with = "group")]
        poset: Option<String>,
        /// Use the subgroup poset of a family of this group.
        #[arg(long, required_unless_present = "poset")]
        group: Option<String>,
        #[arg(long, requires = "group")]
        family: Option<String>,
        /// first, last, depth-one-first or random:<seed>.
        #[arg(long)]
        regime: Option<String>,
    },
    /// Find a crown of maximal subgroups in a non-abelian simple group.
    Crown(GroupArg),
    /// Run a verification suite.
    Verify {
        #[arg(value_parser = ["mainalg", "shapiro", "quotient", "trivial-action", "doublecoset", "crown", "all"])]
        suite: String,
        /// Restrict mainalg or crown to one group.
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Run every job of a JSON manifest.
    Batch { manifest: PathBuf },
}

fn s(v: String) -> Option<Value> {
    Some(Value::String(v))
}

fn spec(command: Command) -> JobSpec {
    let mut j = JobSpec::default();
    match command {
        Command::Subgroups(a) | Command::Families(a) | Command::Crown(a) => j.group = s(a.group),
        Command::Orbitcat { gf, full } => {
            j.group = s(gf.group);
            j.family = s(gf.family);
            j.full = full.then_some(true);
        }
        Command::Cohomology {
            gf,
            coefficients,
            n_max,
        } => {
            j.group = s(gf.group);
            j.family = s(gf.family);
            j.coefficients = Some(coefficients);
            j.n_max = n_max;
        }
        Command::Cd { gf, n_max } => {
            j.group = s(gf.group);
            j.family = s(gf.family);
            j.n_max = n_max;
        }
        Command::H1(a) | Command::Semidirect(a) => {
            j.pi = s(a.pi);
            j.g = s(a.g);
            j.action = s(a.action);
            j.subgroup = a.subgroup.map(Value::String);
        }
        Command::Ereduce {
            poset,
            group,
            family,
            regime,
        } => {
            j.poset = poset.map(Value::String);
            j.group = group.map(Value::String);
            j.family = family.map(Value::String);
            j.regime = regime;
        }
        Command::Verify {
            suite,
            group,
            n_max,
        } => {
            j.suite = Some(suite);
            j.group = group.map(Value::String);
            j.n_max = n_max;
        }
        Command::Batch { .. } => unreachable!("batch is handled separately"),
    }
    j
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Subgroups(_) => "subgroups",
        Command::Families(_) => "families",
        Command::Orbitcat { .. } => "orbitcat",
        Command::Cohomology { .. } => "cohomology",
        Command::Cd { .. } => "cd",
        Command::H1(_) => "h1",
        Command::Semidirect(_) => "semidirect",
        Command::Ereduce { .. } => "ereduce",
        Command::Crown(_) => "crown",
        Command::Verify { .. } => "verify",
        Command::Batch { .. } => "batch",
    }
}

fn text(v: &Value) -> String {
    let mut out = String::new();
    if let Some(jobs) = v.get("jobs").and_then(Value::as_array) {
        for j in jobs {
            out.push_str(&format!(
                "{} {} {}\n",
                j["id"].as_str().unwrap_or("?"),
                j["command"].as_str().unwrap_or("?"),
                j["status"].as_str().unwrap_or("?")
            ));
        }
        out.push_str(&format!("batch {}\n", v["status"].as_str().unwrap_or("?")));
        return out;
    }
    out.push_str(&format!(
        "{} {}\n",
        v["command"].as_str().unwrap_or("?"),
        v["status"].as_str().unwrap_or("?")
    ));
    if let Some(e) = v.get("error") {
        out.push_str(&format!(
            "error: {}\n",
            e["message"].as_str().unwrap_or("?")
        ));
    }
    if let Some(Value::Object(r)) = v.get("report") {
        for (k, x) in r {
            let line = serde_json::to_string(x).unwrap_or_default();
            if line.len() <= 100 {
                out.push_str(&format!("  {k}: {line}\n"));
            } else {
                out.push_str(&format!("  {k}: ({} bytes of JSON)\n", line.len()));
            }
        }
    }
    out
}

fn emit(cli_output: Option<&PathBuf>, format: Format, v: &Value) -> Result<(), String> {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
        Format::Text => text(v),
    };
    match cli_output {
        Some(p) => {
            std::fs::write(p, body).map_err(|e| format!("cannot write {}: {e}", p.display()))
        }
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let b = &cli.budgets;
    let (code, value) = match cli.command {
        Command::Batch { ref manifest } => {
            let text = match std::fs::read_to_string(manifest) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", manifest.display());
                    return ExitCode::from(2);
                }
            };
            match job::batch(&text, |j| {
                j.max_order = j.max_order.or(b.max_order);
                j.max_rank = j.max_rank.or(b.max_rank);
                j.max_classes = j.max_classes.or(b.max_classes);
                j.time_limit = j.time_limit.or(b.time_limit);
            }) {
                Ok(r) => r,
                Err(e) => (
                    2,
                    json!({"command": "batch", "status": "input_error", "exit_code": 2,
                           "error": {"category": e.category(), "message": e.to_string()}}),
                ),
            }
        }
        command => {
            let name = command_name(&command);
            let mut j = spec(command);
            j.command = name.into();
            j.max_order = b.max_order;
            j.max_rank = b.max_rank;
            j.max_classes = b.max_classes;
            j.time_limit = b.time_limit;
            let out = job::run(&j);
            (
                out.exit_code,
                serde_json::to_value(&out).expect("serializable"),
            )
        }
    };
    if let Err(e) = emit(cli.output.as_ref(), cli.format, &value) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
