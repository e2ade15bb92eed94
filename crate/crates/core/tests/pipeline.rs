//! End-to-end runs over the bundled warehouse tasks with the mock generator.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use teamplan::bridge::{LoopConfig, MockGenerator};
use teamplan::mrta::{Constraint, ConstraintSet};
use teamplan::pddl::parse_domain;
use teamplan::pipeline::{run_pipeline, ExitClass, PipelineSettings};
use teamplan::sim::World;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn read(rel: &str) -> String {
    std::fs::read_to_string(fixtures().join(rel)).unwrap()
}

#[derive(Deserialize)]
struct Task {
    command: String,
}

fn constraints_for(index: usize, world: &World) -> ConstraintSet {
    let file = fixtures().join(format!("tasks/task{:02}-constraints.json", index + 1));
    if !file.exists() {
        return ConstraintSet::empty();
    }
    let list: Vec<Constraint> = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    ConstraintSet::new(list, &world.robot_ids()).unwrap()
}

fn run(index: usize, command: &str, seed: Option<u64>, rounds: usize) -> teamplan::pipeline::PipelineReport {
    let domain_text = read("domains/warehouse.pddl");
    let domain = parse_domain(&domain_text).unwrap();
    let world = World::from_json(&read("worlds/warehouse.json")).unwrap();
    let mut generator = MockGenerator::from_file(&fixtures().join("mock/warehouse.json")).unwrap();
    let settings = PipelineSettings { seed, refine: LoopConfig { rounds, ..Default::default() }, ..Default::default() };
    run_pipeline(command, &domain, &domain_text, &world, &constraints_for(index, &world), &mut generator, &settings)
}

#[test]
fn every_bundled_task_succeeds() {
    let tasks: Vec<Task> = serde_json::from_str(&read("tasks/warehouse-tasks.json")).unwrap();
    assert_eq!(tasks.len(), 10);
    for (i, task) in tasks.iter().enumerate() {
        let report = run(i, &task.command, Some(7), 4);
        assert_eq!(report.exit_class(), ExitClass::Ok, "task {}:\n{report}", i + 1);
        let m = report.metrics.as_ref().unwrap();
        assert!(m.sr && (m.gcr - 1.0).abs() < 1e-12 && (m.exe - 1.0).abs() < 1e-12, "task {}:\n{report}", i + 1);
        let expected_rounds = if (5..7).contains(&i) { 2 } else { 1 };
        assert_eq!(report.rounds, expected_rounds, "task {}", i + 1);
    }
}

#[test]
fn reports_are_reproducible() {
    let cmd = "There should be 20 product1 in shelf2, 16 product1 in shelf4, 2 product1 in shelf3. But robot 0 should not be used to move product1 from one shelf to another.";
    let a = run(4, cmd, Some(11), 4).to_string();
    let b = run(4, cmd, Some(11), 4).to_string();
    assert_eq!(a, b);
    assert!(a.ends_with("exit_code=0\n"), "{a}");
}

#[test]
fn misspelling_without_retry_is_generator_failure() {
    let report = run(5, "On shelf4, there oughta be 14 prodcut3, 2 prodcut1, and 1 prduct2.", None, 1);
    assert_eq!(report.exit_class(), ExitClass::Generator);
    assert_eq!(report.exit_class().code(), 5);
    let text = report.to_string();
    assert!(text.contains("feedback=round 1 semantic"), "{text}");
}

#[test]
fn unknown_command_fails_cleanly() {
    let report = run(0, "Paint every shelf blue.", None, 4);
    assert_eq!(report.exit_class(), ExitClass::Generator);
    assert!(report.plan_length.is_none());
}
