use super::*;
use crate::pddl::{parse_domain, parse_problem, validate_plan, GroundAtom};
use crate::testutil::fixture;
use proptest::prelude::*;

fn warehouse() -> Domain {
    parse_domain(&fixture("domains/warehouse.pddl")).unwrap()
}

fn small_problem(init: &str, goal: &str) -> (Domain, Problem) {
    let d = warehouse();
    let text = format!(
        "(define (problem t) (:domain inventory-management)
           (:objects shelf2 shelf3 - shelf product3 - product magnitude1 magnitude2 magnitude3 magnitude4 magnitude5 magnitude6 - magnitude)
           (:init (different-shelves shelf2 shelf3) (different-shelves shelf3 shelf2)
              (= (value-of magnitude1) 1) (= (value-of magnitude2) 2) (= (value-of magnitude3) 3)
              (= (value-of magnitude4) 4) (= (value-of magnitude5) 5) (= (value-of magnitude6) 6)
              {init})
           (:goal {goal}))"
    );
    let p = parse_problem(&text, &d).unwrap();
    (d, p)
}

#[test]
fn moves_six_units_between_shelves() {
    let (d, p) = small_problem(
        "(= (amount shelf2 product3) 6) (= (amount shelf3 product3) 0) (= (free-space shelf2) 6) (= (free-space shelf3) 12)",
        "(and (= (amount shelf3 product3) 6))",
    );
    let plan = plan(&d, &p, &SearchConfig::default()).unwrap();
    let report = validate_plan(&d, &p, &plan);
    assert!(report.is_valid());
    let moved: f64 = plan
        .actions()
        .map(|a| {
            assert_eq!(a.name, "move-product");
            assert_eq!(&a.args[..3], ["shelf2", "shelf3", "product3"]);
            a.args[3].trim_start_matches("magnitude").parse::<f64>().unwrap()
        })
        .sum();
    assert_eq!(moved, 6.0);
    assert_eq!(plan.steps.iter().map(|s| s.time).collect::<Vec<_>>(), (0..plan.len()).map(|i| i as f64).collect::<Vec<_>>());
}

#[test]
fn satisfied_goal_gives_empty_plan() {
    let (d, p) = small_problem(
        "(= (amount shelf2 product3) 6) (= (amount shelf3 product3) 0) (= (free-space shelf2) 6) (= (free-space shelf3) 12)",
        "(and (= (amount shelf2 product3) 6))",
    );
    assert!(plan(&d, &p, &SearchConfig::default()).unwrap().is_empty());
}

#[test]
fn more_product_than_exists_is_unsolvable() {
    let (d, p) = small_problem(
        "(= (amount shelf2 product3) 6) (= (amount shelf3 product3) 0) (= (free-space shelf2) 6) (= (free-space shelf3) 12)",
        "(and (= (amount shelf3 product3) 7))",
    );
    assert!(matches!(plan(&d, &p, &SearchConfig::default()), Err(PlanError::Unsolvable { .. })));
}

#[test]
fn budget_and_config_errors() {
    let (d, p) = small_problem(
        "(= (amount shelf2 product3) 6) (= (amount shelf3 product3) 0) (= (free-space shelf2) 6) (= (free-space shelf3) 12)",
        "(and (= (amount shelf3 product3) 7))",
    );
    let tight = SearchConfig { max_expansions: 2, ..Default::default() };
    assert_eq!(plan(&d, &p, &tight), Err(PlanError::BudgetExceeded { budget: 2 }));
    let zero = SearchConfig { max_expansions: 0, ..Default::default() };
    assert!(matches!(plan(&d, &p, &zero), Err(PlanError::InvalidConfig(_))));
    let no_time = SearchConfig { timeout: 0.0, ..Default::default() };
    assert!(matches!(plan(&d, &p, &no_time), Err(PlanError::InvalidConfig(_))));
}

#[test]
fn blind_search_also_solves() {
    let (d, p) = small_problem(
        "(= (amount shelf2 product3) 6) (= (amount shelf3 product3) 0) (= (free-space shelf2) 6) (= (free-space shelf3) 12)",
        "(and (= (amount shelf3 product3) 4))",
    );
    let cfg = SearchConfig { heuristic: Heuristic::Blind, ..Default::default() };
    let plan = plan(&d, &p, &cfg).unwrap();
    assert!(validate_plan(&d, &p, &plan).is_valid());
}

#[test]
fn static_pruning_drops_same_shelf_moves() {
    let d = warehouse();
    let p = parse_problem(&fixture("problems/warehouse-fleet.pddl"), &d).unwrap();
    let task = ground::compile(&d, &p);
    // 4 shelves x 3 others x 4 products x 6 magnitudes
    assert_eq!(task.actions.len(), 288);
    assert!(task.actions.iter().all(|a| a.ground.args[0] != a.ground.args[1]));
    assert_eq!(task.scale, 6.0);
}

#[test]
fn kitchen_plan_is_valid() {
    let d = parse_domain(&fixture("domains/kitchen.pddl")).unwrap();
    let p = parse_problem(&fixture("problems/kitchen-fridges.pddl"), &d).unwrap();
    let plan = plan(&d, &p, &SearchConfig::default()).unwrap();
    assert!(validate_plan(&d, &p, &plan).is_valid());
}

#[test]
fn heuristic_examples() {
    let mut s = State::default();
    let p = |n: &str| GroundAtom::ground(n, &[]);
    s.atoms.insert(p("a"));
    s.atoms.insert(p("b"));
    let goal = vec![Condition::Pos(p("a")), Condition::Pos(p("b")), Condition::Pos(p("c"))];
    assert_eq!(heuristic_value(&s, &goal, 1.0), 1);
    assert_eq!(heuristic_value(&s, &goal[..2], 1.0), 0);
    s.fluents.insert(p("amount"), 4.0);
    let numeric = vec![Condition::Cmp(crate::pddl::CmpOp::Eq, crate::pddl::Expr::Fluent(p("amount")), crate::pddl::Expr::Num(10.0))];
    assert_eq!(heuristic_value(&s, &numeric, 6.0), 1);
    assert_eq!(heuristic_value(&s, &numeric, 1.0), 6);
    let missing = vec![Condition::Cmp(crate::pddl::CmpOp::Eq, crate::pddl::Expr::Fluent(p("other")), crate::pddl::Expr::Num(1.0))];
    assert_eq!(heuristic_value(&s, &missing, 1.0), 1);
}

#[test]
fn deterministic_across_runs() {
    let d = warehouse();
    let p = parse_problem(&fixture("problems/warehouse-fleet.pddl"), &d).unwrap();
    let a = plan(&d, &p, &SearchConfig::default()).unwrap();
    let b = plan(&d, &p, &SearchConfig::default()).unwrap();
    assert_eq!(a, b);
    assert!(validate_plan(&d, &p, &a).is_valid());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_heuristic_iff_goal_satisfied(amounts in proptest::collection::vec(0u32..13, 8)) {
        let d = warehouse();
        let p = parse_problem(&fixture("problems/warehouse-fleet.pddl"), &d).unwrap();
        let task = ground::compile(&d, &p);
        let mut s = State::initial(&p);
        let shelves = ["shelf1", "shelf2", "shelf3", "shelf4"];
        for (i, v) in amounts.iter().enumerate() {
            let prod = format!("product{}", i % 4 + 1);
            s.fluents.insert(GroundAtom::ground("amount", &[shelves[i / 2], &prod]), *v as f64);
        }
        let explicit = heuristic_value(&s, &p.goal, task.scale);
        prop_assert_eq!(explicit == 0, s.satisfies_all(&p.goal));
        let compiled = task.goal.goal_count(&task.encode(&s), task.scale);
        prop_assert_eq!(compiled, explicit);
    }
}
