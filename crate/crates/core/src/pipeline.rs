//! End-to-end run: command → problem → plan → graph → schedule → execution
//! → metrics.

use std::fmt;

use crate::bridge::{refine_loop, FailureReport, Generator, GeneratorRequest, LoopConfig, LoopOutcome};
use crate::depgraph::{build_graph, GraphMode};
use crate::mrta::ConstraintSet;
use crate::pddl::{Domain, State};
use crate::sim::{execute, metrics, schedule, MetricsReport, Schedule, ScheduleConfig, World};

/// Process exit classes shared by the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Ok,
    Usage,
    Parse,
    Unsolvable,
    Infeasible,
    Generator,
    PlanInvalid,
    GoalNotMet,
}

impl ExitClass {
    pub fn code(self) -> i32 {
        match self {
            ExitClass::Ok => 0,
            ExitClass::Usage => 1,
            ExitClass::Parse => 2,
            ExitClass::Unsolvable => 3,
            ExitClass::Infeasible => 4,
            ExitClass::Generator => 5,
            ExitClass::PlanInvalid => 6,
            ExitClass::GoalNotMet => 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineSettings {
    pub refine: LoopConfig,
    pub mode: GraphMode,
    pub schedule: ScheduleConfig,
    /// Reshuffles robot start cells before scheduling.
    pub seed: Option<u64>,
    /// Transition count of a reference solution; the plan length if unset.
    pub ground_truth: Option<usize>,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        PipelineSettings { refine: LoopConfig::default(), mode: GraphMode::Dag, schedule: ScheduleConfig::default(), seed: None, ground_truth: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PipelineReport {
    pub command: String,
    pub rounds: usize,
    pub problem: Option<String>,
    pub plan_length: Option<usize>,
    pub graph: Option<(usize, usize, usize)>,
    pub schedule: Option<Schedule>,
    pub metrics: Option<MetricsReport>,
    pub warnings: Vec<String>,
    pub failure: Option<String>,
    pub failure_report: Option<FailureReport>,
    pub exit: Option<ExitClass>,
}

impl PipelineReport {
    pub fn exit_class(&self) -> ExitClass {
        self.exit.unwrap_or(ExitClass::Ok)
    }

    fn fail(mut self, class: ExitClass, message: String) -> Self {
        self.exit = Some(class);
        self.failure = Some(message);
        self
    }
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "command={}", self.command)?;
        writeln!(f, "rounds={}", self.rounds)?;
        if let Some(p) = &self.problem {
            writeln!(f, "problem={p}")?;
        }
        if let Some(n) = self.plan_length {
            writeln!(f, "plan_length={n}")?;
        }
        if let Some((nodes, edges, depth)) = self.graph {
            writeln!(f, "graph_nodes={nodes}\ngraph_edges={edges}\ngraph_depth={depth}")?;
        }
        if let Some(s) = &self.schedule {
            writeln!(f, "schedule_entries={}\nmakespan={}", s.entries.len(), s.makespan())?;
        }
        if let Some(m) = &self.metrics {
            write!(f, "{m}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning={w}")?;
        }
        if let Some(r) = &self.failure_report {
            for line in r.to_string().lines() {
                writeln!(f, "feedback={line}")?;
            }
        }
        if let Some(msg) = &self.failure {
            writeln!(f, "failure={msg}")?;
        }
        writeln!(f, "exit_code={}", self.exit_class().code())
    }
}

/// Runs every stage; the first failing stage sets the exit class and stops
/// the run. A run whose goal is not fully met exits with `GoalNotMet`.
pub fn run_pipeline(
    command: &str,
    domain: &Domain,
    domain_text: &str,
    world: &World,
    constraints: &ConstraintSet,
    generator: &mut dyn Generator,
    settings: &PipelineSettings,
) -> PipelineReport {
    let mut report = PipelineReport { command: command.to_string(), ..Default::default() };
    let mut world = world.clone();
    if let Some(seed) = settings.seed {
        world.randomize_robots(seed);
    }
    let request = GeneratorRequest::new(command, world.describe(), domain_text);
    let solved = match refine_loop(&request, generator, domain, &settings.refine) {
        Err(e) => return report.fail(ExitClass::Generator, e.to_string()),
        Ok(LoopOutcome::Failed(r)) => {
            report.rounds = r.rounds.len();
            report.failure_report = Some(r);
            return report.fail(ExitClass::Generator, format!("no valid problem after {} rounds", settings.refine.rounds));
        }
        Ok(LoopOutcome::Solved(s)) => s,
    };
    report.rounds = solved.round;
    report.problem = Some(solved.problem.name.clone());
    report.plan_length = Some(solved.plan.len());

    let graph = match build_graph(&solved.plan, domain, &solved.problem, settings.mode) {
        Ok(g) => g,
        Err(e) => return report.fail(ExitClass::PlanInvalid, e.to_string()),
    };
    report.graph = Some((graph.len(), graph.edges().len(), graph.depth()));

    let init = State::initial(&solved.problem);
    report.warnings = world.inventory_mismatches(&init);
    let sched = match schedule(&graph, &world, &init, constraints, &settings.schedule) {
        Ok(s) => s,
        Err(e) => return report.fail(ExitClass::Infeasible, e.to_string()),
    };
    let trace = execute(&sched, &world, &graph, &init);
    let m = metrics(&trace, &solved.problem.goal, settings.ground_truth.unwrap_or(solved.plan.len()));
    report.schedule = Some(sched);
    let sr = m.sr;
    report.metrics = Some(m);
    if !sr {
        return report.fail(ExitClass::GoalNotMet, "goal not met after execution".into());
    }
    report
}
