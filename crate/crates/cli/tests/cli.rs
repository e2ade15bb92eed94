use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(rel).display().to_string()
}

fn teamplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teamplan")).args(args).env_remove("TEAMPLAN_GENERATOR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn graph_dag_on_fridge_plan() {
    let (d, p, plan) = (fixture("domains/kitchen.pddl"), fixture("problems/kitchen-fridges.pddl"), fixture("plans/kitchen-fridges.plan"));
    let o = teamplan(&["graph", "--domain", &d, "--problem", &p, "--plan", &plan, "--mode", "dag", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for edge in ["edge -1 0", "edge -1 1", "edge 0 2", "edge 1 3", "edge 0 4", "edge 2 4", "edge 1 5", "edge 3 5"] {
        assert!(text.lines().any(|l| l == edge), "{edge} missing:\n{text}");
    }
    assert_eq!(text.lines().filter(|l| l.starts_with("edge")).count(), 8);

    let o = teamplan(&["graph", "--domain", &d, "--problem", &p, "--plan", &plan, "--mode", "tree"]);
    let golden = std::fs::read_to_string(fixture("graphs/kitchen-fridges-tree.dot")).unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn allocate_single_robot() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    std::fs::write(&path, r#"{"robots": [{"id": "r0", "skills": {"lift": 2}, "cost": 3.5}], "requirement": {"lift": 1}}"#).unwrap();
    let o = teamplan(&["allocate", "--instance", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "optimal");
    assert_eq!(v["x"]["r0"], 1);
    assert_eq!(v["max_cost"], 3.5);

    std::fs::write(&path, r#"{"robots": [{"id": "r0", "skills": {"lift": 2}, "cost": 3.5}], "requirement": {"lift": 5}}"#).unwrap();
    let o = teamplan(&["allocate", "--instance", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "infeasible");
    assert!(v["max_cost"].is_null());
}

#[test]
fn pipeline_task_one_succeeds() {
    let o = teamplan(&[
        "pipeline",
        "--command",
        "There should be 7 product 1 in shelf 3.",
        "--domain",
        &fixture("domains/warehouse.pddl"),
        "--world",
        &fixture("worlds/warehouse.json"),
        "--config",
        &fixture("config/mock.toml"),
    ]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.lines().any(|l| l == "sr=1"), "{text}");
    assert!(text.ends_with("exit_code=0\n"));
}

#[test]
fn pipeline_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = teamplan(&[
            "pipeline",
            "--command",
            "There should be 20 product1 in shelf2, 16 product1 in shelf4, 2 product1 in shelf3. But robot 0 should not be used to move product1 from one shelf to another.",
            "--domain",
            &fixture("domains/warehouse.pddl"),
            "--world",
            &fixture("worlds/warehouse.json"),
            "--config",
            &fixture("config/mock.toml"),
            "--constraints",
            &fixture("tasks/task05-constraints.json"),
            "--seed",
            "42",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.txt"), run("b.txt"));
}

#[test]
fn exit_codes_by_failure_class() {
    let d = fixture("domains/warehouse.pddl");
    assert_eq!(teamplan(&["plan", "--domain", &d]).status.code(), Some(1));
    assert_eq!(teamplan(&["parse", "--domain", "/nonexistent.pddl"]).status.code(), Some(1));
    let o = teamplan(&["parse", "--domain", &d, "--problem", &fixture("problems/warehouse-task07-misspelled.pddl")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
    let o = teamplan(&["plan", "--domain", &d, "--problem", &fixture("problems/warehouse-task05.pddl"), "--budget", "1"]);
    assert_eq!(o.status.code(), Some(3));
    // the kitchen plan stops short of its goal when truncated
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.plan");
    let full = std::fs::read_to_string(fixture("plans/kitchen-fridges.plan")).unwrap();
    std::fs::write(&short, full.lines().take(2).collect::<Vec<_>>().join("\n")).unwrap();
    let kd = fixture("domains/kitchen.pddl");
    let kp = fixture("problems/kitchen-fridges.pddl");
    assert_eq!(teamplan(&["validate", "--domain", &kd, "--problem", &kp, "--plan", short.to_str().unwrap()]).status.code(), Some(7));
    let swapped: Vec<&str> = full.lines().collect();
    let bad = format!("0.0: {}\n", swapped.iter().find(|l| l.to_lowercase().contains("store")).unwrap().split_once(':').unwrap().1.trim());
    std::fs::write(&short, bad).unwrap();
    assert_eq!(teamplan(&["validate", "--domain", &kd, "--problem", &kp, "--plan", short.to_str().unwrap()]).status.code(), Some(6));
    assert_eq!(teamplan(&["graph", "--domain", &kd, "--problem", &kp, "--plan", short.to_str().unwrap()]).status.code(), Some(6));
    let o = teamplan(&[
        "pipeline",
        "--command",
        "Paint the shelves.",
        "--domain",
        &d,
        "--world",
        &fixture("worlds/warehouse.json"),
        "--config",
        &fixture("config/mock.toml"),
    ]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn simulate_replays_written_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("fleet.schedule");
    let common = [
        "--domain",
        &fixture("domains/warehouse.pddl"),
        "--problem",
        &fixture("problems/warehouse-fleet.pddl"),
        "--plan",
        &fixture("plans/warehouse-fleet.plan"),
        "--world",
        &fixture("worlds/warehouse-fleet.json"),
    ]
    .map(|s| s.to_string());
    let mut args = vec!["schedule".to_string()];
    args.extend(common.iter().cloned());
    args.extend(["--out".into(), sched.display().to_string()]);
    assert_eq!(teamplan(&args.iter().map(String::as_str).collect::<Vec<_>>()).status.code(), Some(0));

    let mut direct = vec!["simulate".to_string()];
    direct.extend(common.iter().cloned());
    let mut replay = direct.clone();
    replay.extend(["--schedule".into(), sched.display().to_string()]);
    let a = teamplan(&direct.iter().map(String::as_str).collect::<Vec<_>>());
    let b = teamplan(&replay.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("sr=1"));
}
