//! `teamplan` command-line tool.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use teamplan::config::Config;
use teamplan::depgraph::{build_graph, to_dot, to_text, DependencyGraph, GraphError, GraphMode};
use teamplan::mrta::{Constraint, ConstraintSet, Instance, MrtaError};
use teamplan::pddl::{parse_domain, parse_plan, parse_problem, validate_plan, Domain, Plan, Problem, State};
use teamplan::pipeline::{run_pipeline, ExitClass, PipelineSettings};
use teamplan::planner::{search, PlanError};
use teamplan::sim::{execute, load_schedule, metrics, schedule, sequential_baseline, Schedule, SimError, World};

#[derive(Parser)]
#[command(name = "teamplan", version, about = "Plan, decompose and allocate multi-robot tasks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a domain and optionally a problem, printing a summary.
    Parse {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: Option<PathBuf>,
    },
    /// Search for a plan.
    Plan {
        #[command(flatten)]
        task: TaskArgs,
        /// Maximum node expansions.
        #[arg(long)]
        budget: Option<usize>,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check a plan against a problem.
    Validate {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        plan: PathBuf,
    },
    /// Build the dependency graph of a plan.
    Graph {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value = "dag")]
        mode: GraphMode,
        /// `dot` or `text`.
        #[arg(long, default_value = "dot")]
        format: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solve one allocation instance given as JSON.
    Allocate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        pretty: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Allocate every subtask of a plan over time.
    Schedule {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Execute a plan on the grid world and report metrics.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Replay this schedule instead of computing one.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Natural-language command to metrics, end to end.
    Pipeline {
        /// The instruction for the team.
        #[arg(long = "command")]
        text: String,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long)]
        mode: Option<GraphMode>,
        /// Reshuffle robot start cells with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Transition count of a reference plan.
        #[arg(long)]
        ground_truth: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct TaskArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    problem: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    task: TaskArgs,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    world: PathBuf,
    /// JSON array of constraints.
    #[arg(long)]
    constraints: Option<PathBuf>,
    #[arg(long)]
    mode: Option<GraphMode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct OutArgs {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    class: ExitClass,
    error: anyhow::Error,
}

type Outcome = Result<ExitClass, Failure>;

fn fail<E: Into<anyhow::Error>>(class: ExitClass) -> impl FnOnce(E) -> Failure {
    move |e| Failure { class, error: e.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(fail(ExitClass::Usage))
}

fn emit(out: &OutArgs, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())).map_err(fail(ExitClass::Usage)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_domain(path: &Path) -> Result<(Domain, String), Failure> {
    let text = read(path)?;
    let d = parse_domain(&text).with_context(|| path.display().to_string()).map_err(fail(ExitClass::Parse))?;
    Ok((d, text))
}

fn load_task(t: &TaskArgs) -> Result<(Domain, Problem), Failure> {
    let (d, _) = load_domain(&t.domain)?;
    let p = parse_problem(&read(&t.problem)?, &d).with_context(|| t.problem.display().to_string()).map_err(fail(ExitClass::Parse))?;
    Ok((d, p))
}

fn load_plan(path: &Path, d: &Domain, p: &Problem) -> Result<Plan, Failure> {
    parse_plan(&read(path)?, d, p).with_context(|| path.display().to_string()).map_err(fail(ExitClass::Parse))
}

fn load_world(path: &Path) -> Result<World, Failure> {
    World::from_json(&read(path)?).with_context(|| path.display().to_string()).map_err(fail(ExitClass::Parse))
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    match path {
        Some(p) => Config::load(p).map_err(fail(ExitClass::Usage)),
        None => Ok(Config::default()),
    }
}

fn load_constraints(path: Option<&Path>, world: &World) -> Result<ConstraintSet, Failure> {
    let Some(path) = path else { return Ok(ConstraintSet::empty()) };
    let list: Vec<Constraint> = serde_json::from_str(&read(path)?).with_context(|| path.display().to_string()).map_err(fail(ExitClass::Parse))?;
    ConstraintSet::new(list, &world.robot_ids()).with_context(|| path.display().to_string()).map_err(fail(ExitClass::Usage))
}

fn graph_failure(e: GraphError) -> Failure {
    let class = match e {
        GraphError::InvalidPlan { .. } => ExitClass::PlanInvalid,
        _ => ExitClass::Usage,
    };
    fail(class)(e)
}

fn sim_failure(e: SimError) -> Failure {
    let class = match e {
        SimError::InfeasibleSubtask { .. } | SimError::Allocation(MrtaError::ConflictingFixings { .. }) => ExitClass::Infeasible,
        SimError::InvalidPlan(_) => ExitClass::PlanInvalid,
        SimError::ScheduleFormat { .. } => ExitClass::Parse,
        _ => ExitClass::Usage,
    };
    fail(class)(e)
}

/// Everything `schedule` and `simulate` share.
struct Prepared {
    problem: Problem,
    plan: Plan,
    graph: DependencyGraph,
    world: World,
    init: State,
    constraints: ConstraintSet,
    config: Config,
}

fn prepare(run: &RunArgs) -> Result<Prepared, Failure> {
    let config = load_config(run.config.as_deref())?;
    let (domain, problem) = load_task(&run.task)?;
    let plan = load_plan(&run.plan, &domain, &problem)?;
    let graph = build_graph(&plan, &domain, &problem, run.mode.unwrap_or(config.schedule.mode)).map_err(graph_failure)?;
    let mut world = load_world(&run.world)?;
    if let Some(seed) = run.seed {
        world.randomize_robots(seed);
    }
    let constraints = load_constraints(run.constraints.as_deref(), &world)?;
    let init = State::initial(&problem);
    for w in world.inventory_mismatches(&init) {
        eprintln!("warning: {w}");
    }
    Ok(Prepared { problem, plan, graph, world, init, constraints, config })
}

fn compute_schedule(p: &Prepared) -> Result<Schedule, Failure> {
    schedule(&p.graph, &p.world, &p.init, &p.constraints, &p.config.schedule_config()).map_err(sim_failure)
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Parse { domain, problem } => {
            let (d, _) = load_domain(&domain)?;
            println!(
                "domain {} types {} predicates {} functions {} actions {}",
                d.name,
                d.types.len(),
                d.predicates.len(),
                d.functions.len(),
                d.actions.len()
            );
            if let Some(path) = problem {
                let p = parse_problem(&read(&path)?, &d).with_context(|| path.display().to_string()).map_err(fail(ExitClass::Parse))?;
                println!(
                    "problem {} objects {} init {} goal {}",
                    p.name,
                    p.objects.len(),
                    p.init_atoms.len() + p.init_fluents.len(),
                    p.goal.len()
                );
            }
            Ok(ExitClass::Ok)
        }
        Cmd::Plan { task, budget, timeout, config, out } => {
            let mut search_config = load_config(config.as_deref())?.planner;
            if let Some(b) = budget {
                search_config.max_expansions = b;
            }
            if let Some(t) = timeout {
                search_config.timeout = t;
            }
            let (d, p) = load_task(&task)?;
            match search(&d, &p, &search_config) {
                Ok((plan, stats)) => {
                    eprintln!("expansions {} generated {} ground_actions {}", stats.expansions, stats.generated, stats.ground_actions);
                    emit(&out, &plan.to_string())?;
                    Ok(ExitClass::Ok)
                }
                Err(e @ PlanError::InvalidConfig(_)) => Err(fail(ExitClass::Usage)(e)),
                Err(e) => Err(fail(ExitClass::Unsolvable)(e)),
            }
        }
        Cmd::Validate { task, plan } => {
            let (d, p) = load_task(&task)?;
            let plan = load_plan(&plan, &d, &p)?;
            let report = validate_plan(&d, &p, &plan);
            for s in &report.steps {
                match &s.message {
                    None => println!("step {} ok", s.index),
                    Some(m) => println!("step {} failed {m}", s.index),
                }
            }
            println!("goal_fraction={}", report.goal_fraction);
            if report.first_failure.is_some() {
                println!("invalid");
                Ok(ExitClass::PlanInvalid)
            } else if !report.goal_satisfied {
                println!("goal not met");
                Ok(ExitClass::GoalNotMet)
            } else {
                println!("valid");
                Ok(ExitClass::Ok)
            }
        }
        Cmd::Graph { task, plan, mode, format, out } => {
            let (d, p) = load_task(&task)?;
            let plan = load_plan(&plan, &d, &p)?;
            let g = build_graph(&plan, &d, &p, mode).map_err(graph_failure)?;
            let text = match format.as_str() {
                "dot" => to_dot(&g),
                "text" => to_text(&g),
                other => return Err(fail(ExitClass::Usage)(anyhow!("unknown format '{other}', expected dot or text"))),
            };
            emit(&out, &text)?;
            Ok(ExitClass::Ok)
        }
        Cmd::Allocate { instance, pretty, out } => {
            let inst = Instance::from_json(&read(&instance)?).with_context(|| instance.display().to_string()).map_err(fail(ExitClass::Parse))?;
            let a = match inst.solve() {
                Ok(a) => a,
                Err(e @ MrtaError::ConflictingFixings { .. }) => return Err(fail(ExitClass::Infeasible)(e)),
                Err(e) => return Err(fail(ExitClass::Usage)(e)),
            };
            let json = a.to_json();
            let mut text = if pretty { serde_json::to_string_pretty(&json) } else { serde_json::to_string(&json) }.expect("json value serializes");
            text.push('\n');
            emit(&out, &text)?;
            Ok(if a.is_optimal() { ExitClass::Ok } else { ExitClass::Infeasible })
        }
        Cmd::Schedule { run, out } => {
            let p = prepare(&run)?;
            let s = compute_schedule(&p)?;
            emit(&out, &s.to_string())?;
            Ok(ExitClass::Ok)
        }
        Cmd::Simulate { run, schedule: file, out } => {
            let p = prepare(&run)?;
            let s = match file {
                Some(f) => load_schedule(&read(&f)?, &p.graph, &p.world, &p.init).map_err(sim_failure)?,
                None => compute_schedule(&p)?,
            };
            let trace = execute(&s, &p.world, &p.graph, &p.init);
            let m = metrics(&trace, &p.problem.goal, p.plan.len());
            let mut text = format!("makespan={}\n{m}", s.makespan());
            if let Some((robot, d)) = sequential_baseline(&p.graph, &p.world, &p.init).map_err(sim_failure)? {
                text.push_str(&format!("baseline_robot={robot}\nbaseline_travel={d}\n"));
            }
            emit(&out, &text)?;
            Ok(if m.sr { ExitClass::Ok } else { ExitClass::GoalNotMet })
        }
        Cmd::Pipeline { text, domain, world, config, constraints, mode, seed, ground_truth, out } => {
            let cfg = load_config(config.as_deref())?;
            let (d, domain_text) = load_domain(&domain)?;
            let world = load_world(&world)?;
            let constraints = load_constraints(constraints.as_deref(), &world)?;
            let mut generator = cfg.build_generator().map_err(fail(ExitClass::Generator))?;
            let settings = PipelineSettings {
                refine: cfg.loop_config(),
                mode: mode.unwrap_or(cfg.schedule.mode),
                schedule: cfg.schedule_config(),
                seed,
                ground_truth,
            };
            let report = run_pipeline(&text, &d, &domain_text, &world, &constraints, generator.as_mut(), &settings);
            emit(&out, &report.to_string())?;
            Ok(report.exit_class())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(ExitClass::Usage.code() as u8) } else { ExitCode::SUCCESS };
        }
    };
    let class = match run(cli.command) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            f.class
        }
    };
    ExitCode::from(class.code() as u8)
}
