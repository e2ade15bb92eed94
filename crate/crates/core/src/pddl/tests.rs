use super::*;
use crate::testutil::fixture;

fn warehouse() -> Domain {
    parse_domain(&fixture("domains/warehouse.pddl")).unwrap()
}

fn kitchen() -> (Domain, Problem) {
    let d = parse_domain(&fixture("domains/kitchen.pddl")).unwrap();
    let p = parse_problem(&fixture("problems/kitchen-fridges.pddl"), &d).unwrap();
    (d, p)
}

fn fleet() -> (Domain, Problem, Plan) {
    let d = warehouse();
    let p = parse_problem(&fixture("problems/warehouse-fleet.pddl"), &d).unwrap();
    let plan = parse_plan(&fixture("plans/warehouse-fleet.plan"), &d, &p).unwrap();
    (d, p, plan)
}

fn move_action(d: &Domain, p: &Problem, args: &[&str]) -> GroundAction {
    let args: Vec<(String, Pos)> = args.iter().map(|a| (a.to_string(), Pos::default())).collect();
    ground_action(d, p, "move-product", &args, 1).unwrap()
}

fn set(state: &mut State, f: &str, args: &[&str], v: f64) {
    state.fluents.insert(GroundAtom::ground(f, args), v);
}

#[test]
fn warehouse_domain_shape() {
    let d = warehouse();
    assert_eq!(d.name, "inventory-management");
    assert_eq!(d.actions.len(), 1);
    assert_eq!(d.actions[0].name, "move-product");
    let fns: Vec<&str> = d.functions.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(fns, ["amount", "free-space", "value-of"]);
    assert_eq!(d.actions[0].precondition.len(), 4);
    assert_eq!(d.actions[0].effects.len(), 4);
}

#[test]
fn domain_without_actions_is_valid() {
    let d = parse_domain("(define (domain empty) (:requirements :strips) (:predicates (p)))").unwrap();
    assert!(d.actions.is_empty());
}

#[test]
fn action_missing_effect_is_syntax_error() {
    let text = "(define (domain d)\n (:predicates (p))\n (:action a :parameters () :precondition (p)))";
    match parse_domain(text) {
        Err(PddlError::Syntax { pos, expected, .. }) => {
            assert_eq!(pos, Pos::new(3, 2));
            assert_eq!(expected, vec![":effect".to_string()]);
        }
        other => panic!("expected syntax error, got {other:?}"),
    }
}

#[test]
fn unknown_requirement_rejected() {
    let err = parse_domain("(define (domain d) (:requirements :typing :durative-actions))").unwrap_err();
    assert!(matches!(err, PddlError::UnknownRequirement { ref name, .. } if name == ":durative-actions"));
}

#[test]
fn unsupported_constructs_rejected() {
    let durative = "(define (domain d) (:durative-action a :parameters () :duration (= ?duration 1) :condition () :effect ()))";
    assert!(matches!(parse_domain(durative), Err(PddlError::Unsupported { .. })));
    let forall = "(define (domain d) (:types t) (:predicates (p ?x - t)) (:action a :parameters () :effect (forall (?x - t) (p ?x))))";
    assert!(matches!(parse_domain(forall), Err(PddlError::Unsupported { ref construct, .. }) if construct == "forall"));
    let when = "(define (domain d) (:predicates (p) (q)) (:action a :parameters () :effect (when (p) (q))))";
    assert!(matches!(parse_domain(when), Err(PddlError::Unsupported { .. })));
}

#[test]
fn free_variable_rejected() {
    let text = "(define (domain d) (:types t) (:predicates (p ?x - t)) (:action a :parameters (?x - t) :precondition (p ?y) :effect (p ?x)))";
    let err = parse_domain(text).unwrap_err();
    assert!(err.to_string().contains("?y"), "{err}");
}

#[test]
fn undeclared_function_rejected() {
    let text = "(define (domain d) (:functions (f)) (:action a :parameters () :effect (increase (g) 1)))";
    assert!(matches!(parse_domain(text), Err(PddlError::Semantic { .. })));
}

#[test]
fn identifiers_are_case_insensitive() {
    let (d, p) = kitchen();
    assert!(d.action("openobject").is_some());
    let plan = parse_plan("0.0: (OPENOBJECT Fridge1)", &d, &p).unwrap();
    assert_eq!(plan.steps[0].action.to_string(), "(openobject fridge1)");
}

#[test]
fn init_fluent_value_recorded() {
    let d = warehouse();
    let text = "(define (problem p) (:domain inventory-management) (:objects shelf1 - shelf product1 - product) (:init (= (amount shelf1 product1) 5)) (:goal (and)))";
    let p = parse_problem(text, &d).unwrap();
    let s = State::initial(&p);
    assert_eq!(s.value(&GroundAtom::ground("amount", &["shelf1", "product1"])), Some(5.0));
    assert!(p.goal.is_empty());
}

#[test]
fn goal_over_undeclared_object_names_it() {
    let d = warehouse();
    let text = "(define (problem p) (:domain inventory-management)\n (:objects shelf1 - shelf product1 - product)\n (:init)\n (:goal (= (amount shelf1 prodcut3) 7)))";
    match parse_problem(text, &d) {
        Err(PddlError::Semantic { pos, message }) => {
            assert!(message.contains("prodcut3"));
            assert_eq!(pos.line, 4);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn problem_semantic_errors() {
    let d = warehouse();
    let bad_type = "(define (problem p) (:domain inventory-management) (:objects s - crate) (:init) (:goal (and)))";
    assert!(matches!(parse_problem(bad_type, &d), Err(PddlError::Semantic { .. })));
    let arity = "(define (problem p) (:domain inventory-management) (:objects s - shelf) (:init (= (free-space s s) 1)) (:goal (and)))";
    assert!(matches!(parse_problem(arity, &d), Err(PddlError::Semantic { .. })));
    let pred = "(define (problem p) (:domain inventory-management) (:objects s - shelf) (:init) (:goal (stocked s)))";
    assert!(matches!(parse_problem(pred, &d), Err(PddlError::Semantic { .. })));
    let wrong_domain = "(define (problem p) (:domain kitchen) (:objects) (:init) (:goal (and)))";
    assert!(matches!(parse_problem(wrong_domain, &d), Err(PddlError::Semantic { .. })));
}

#[test]
fn plan_parsing() {
    let (d, p, _) = fleet();
    let plan = parse_plan("0.0: (move-product shelf2 shelf3 product3 magnitude6)", &d, &p).unwrap();
    assert_eq!(plan.len(), 1);
    assert_eq!(plan.steps[0].action.args, ["shelf2", "shelf3", "product3", "magnitude6"]);
    assert!(parse_plan("", &d, &p).unwrap().is_empty());
    assert!(parse_plan("; only a comment\n\n", &d, &p).unwrap().is_empty());
    let with_duration = parse_plan("0.000: (move-product shelf2 shelf3 product3 magnitude6) [1.000]", &d, &p).unwrap();
    assert_eq!(with_duration.len(), 1);
}

#[test]
fn plan_errors() {
    let (d, p) = kitchen();
    assert!(matches!(
        parse_plan("1.0: (open fridge1 extra)", &d, &p),
        Err(PddlError::UnknownAction { line: 1, .. })
    ));
    assert!(matches!(
        parse_plan("0.0: (openobject fridge1)\n1.0: (openobject fridge1 extra)", &d, &p),
        Err(PddlError::ArityMismatch { line: 2, expected: 1, found: 2, .. })
    ));
    assert!(matches!(parse_plan("(openobject fridge1)", &d, &p), Err(PddlError::Syntax { .. })));
    assert!(matches!(
        parse_plan("1.0: (openobject fridge1)\n0.5: (openobject fridge2)", &d, &p),
        Err(PddlError::Syntax { .. })
    ));
    assert!(matches!(parse_plan("0.0: (openobject apple)", &d, &p), Err(PddlError::Semantic { .. })));
    assert!(matches!(parse_plan("0.0: (openobject fridge1", &d, &p), Err(PddlError::Syntax { .. })));
}

fn fig5_state(free_to: f64) -> State {
    let mut s = State::default();
    s.atoms.insert(GroundAtom::ground("different-shelves", &["shelf2", "shelf3"]));
    set(&mut s, "amount", &["shelf2", "product3"], 6.0);
    set(&mut s, "amount", &["shelf3", "product3"], 0.0);
    set(&mut s, "free-space", &["shelf3"], free_to);
    set(&mut s, "free-space", &["shelf2"], 4.0);
    set(&mut s, "value-of", &["magnitude6"], 6.0);
    s
}

#[test]
fn move_product_applicability() {
    let (d, p, _) = fleet();
    let a = move_action(&d, &p, &["shelf2", "shelf3", "product3", "magnitude6"]);
    assert!(applicable(&fig5_state(6.0), &a).unwrap());
    assert!(!applicable(&fig5_state(5.0), &a).unwrap());
    let mut missing = fig5_state(6.0);
    missing.fluents.remove(&GroundAtom::ground("value-of", &["magnitude6"]));
    assert!(matches!(applicable(&missing, &a), Err(StateError::MissingFluent(_))));
}

#[test]
fn empty_precondition_and_effect() {
    let d = parse_domain("(define (domain d) (:predicates (p)) (:action noop :parameters () :effect (and)))").unwrap();
    let p = parse_problem("(define (problem q) (:domain d) (:objects) (:init (p)) (:goal (and)))", &d).unwrap();
    let a = ground_action(&d, &p, "noop", &[], 1).unwrap();
    let s = State::initial(&p);
    assert!(applicable(&s, &a).unwrap());
    assert!(applicable(&State::default(), &a).unwrap());
    assert_eq!(apply(&s, &a).unwrap(), s);
}

#[test]
fn move_product_effects() {
    let (d, p, _) = fleet();
    let a = move_action(&d, &p, &["shelf2", "shelf3", "product3", "magnitude6"]);
    let s = fig5_state(6.0);
    let next = apply(&s, &a).unwrap();
    let v = |f: &str, args: &[&str]| next.value(&GroundAtom::ground(f, args)).unwrap();
    assert_eq!(v("amount", &["shelf2", "product3"]), 0.0);
    assert_eq!(v("amount", &["shelf3", "product3"]), 6.0);
    assert_eq!(v("free-space", &["shelf3"]), 0.0);
    assert_eq!(v("free-space", &["shelf2"]), 10.0);
    assert_eq!(next.atoms, s.atoms);
    assert!(matches!(apply(&fig5_state(5.0), &a), Err(StateError::NotApplicable(_))));
}

#[test]
fn increase_then_decrease_restores() {
    let d = parse_domain(
        "(define (domain c) (:requirements :fluents) (:functions (x))
          (:action up :parameters () :effect (increase (x) 2.5))
          (:action down :parameters () :effect (decrease (x) 2.5)))",
    )
    .unwrap();
    let p = parse_problem("(define (problem q) (:domain c) (:objects) (:init (= (x) 1)) (:goal (and)))", &d).unwrap();
    let up = ground_action(&d, &p, "up", &[], 1).unwrap();
    let down = ground_action(&d, &p, "down", &[], 1).unwrap();
    let s = State::initial(&p);
    assert_eq!(apply(&apply(&s, &up).unwrap(), &down).unwrap(), s);
}

#[test]
fn delete_before_add_and_pre_state_reads() {
    let d = parse_domain(
        "(define (domain c) (:requirements :fluents) (:predicates (p)) (:functions (x) (y))
          (:action a :parameters () :precondition (p)
             :effect (and (not (p)) (p) (assign (x) (y)) (assign (y) (x)))))",
    )
    .unwrap();
    let p = parse_problem("(define (problem q) (:domain c) (:objects) (:init (p) (= (x) 1) (= (y) 2)) (:goal (and)))", &d).unwrap();
    let a = ground_action(&d, &p, "a", &[], 1).unwrap();
    let next = apply(&State::initial(&p), &a).unwrap();
    assert!(next.holds(&GroundAtom::ground("p", &[])));
    assert_eq!(next.value(&GroundAtom::ground("x", &[])), Some(2.0));
    assert_eq!(next.value(&GroundAtom::ground("y", &[])), Some(1.0));
}

#[test]
fn fleet_plan_validates() {
    let (d, p, plan) = fleet();
    assert_eq!(plan.len(), 9);
    assert_eq!(plan.steps[8].action.to_string(), "(move-product shelf4 shelf2 product2 magnitude4)");
    let report = validate_plan(&d, &p, &plan);
    assert!(report.steps.iter().all(|s| s.applicable));
    assert_eq!(report.first_failure, None);
    assert!(report.goal_satisfied);
    assert_eq!(report.goal_fraction, 1.0);
}

#[test]
fn empty_plan_with_satisfied_goal() {
    let d = warehouse();
    let text = "(define (problem p) (:domain inventory-management) (:objects shelf1 - shelf product1 - product) (:init (= (amount shelf1 product1) 5)) (:goal (>= (amount shelf1 product1) 5)))";
    let p = parse_problem(text, &d).unwrap();
    let report = validate_plan(&d, &p, &Plan::default());
    assert!(report.is_valid());
    assert_eq!(report.goal_fraction, 1.0);
}

#[test]
fn broken_step_reported() {
    let (d, p, plan) = fleet();
    let mut broken = plan.clone();
    // Third step moves product3 out of shelf4 again, but only 4 units ever exist there.
    broken.steps[2].action = move_action(&d, &p, &["shelf4", "shelf3", "product3", "magnitude6"]);
    let report = validate_plan(&d, &p, &broken);
    assert_eq!(report.first_failure, Some(2));
    assert_eq!(report.steps.len(), 3);
    assert!(!report.goal_satisfied);
    assert!(report.goal_fraction < 1.0);
}

fn all_fixture_texts() -> Vec<(String, Option<String>)> {
    let mut out = Vec::new();
    let dir = crate::testutil::fixture_path("problems");
    let mut entries: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries {
        let text = std::fs::read_to_string(&path).unwrap();
        out.push((text, None));
    }
    out
}

#[test]
fn print_parse_round_trip_on_fixtures() {
    for name in ["domains/warehouse.pddl", "domains/kitchen.pddl"] {
        let d = parse_domain(&fixture(name)).unwrap();
        let again = parse_domain(&d.to_string()).unwrap();
        assert_eq!(d, again, "{name}");
    }
    let wh = warehouse();
    let (kd, _) = kitchen();
    let mut checked = 0;
    for (text, _) in all_fixture_texts() {
        let domain = if text.contains("(:domain kitchen)") { &kd } else { &wh };
        let Ok(p) = parse_problem(&text, domain) else { continue };
        let again = parse_problem(&p.to_string(), domain).unwrap();
        assert_eq!(p, again);
        checked += 1;
    }
    assert!(checked >= 12);
    let (d, p, plan) = fleet();
    assert_eq!(parse_plan(&plan.to_string(), &d, &p).unwrap(), plan);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn random_walk(choices: &[usize]) -> (Problem, Vec<State>) {
        let (d, p, _) = fleet();
        let mut actions = Vec::new();
        let shelves = ["shelf1", "shelf2", "shelf3", "shelf4"];
        let products = ["product1", "product2", "product3", "product4"];
        for from in shelves {
            for to in shelves {
                for prod in products {
                    for m in 1..=6 {
                        let mag = format!("magnitude{m}");
                        actions.push(move_action(&d, &p, &[from, to, prod, &mag]));
                    }
                }
            }
        }
        let mut states = vec![State::initial(&p)];
        for &c in choices {
            let s = states.last().unwrap();
            let options: Vec<&GroundAction> = actions.iter().filter(|a| applicable(s, a).unwrap_or(false)).collect();
            if options.is_empty() {
                break;
            }
            let next = apply(s, options[c % options.len()]).unwrap();
            states.push(next);
        }
        (p, states)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn warehouse_conservation(choices in proptest::collection::vec(0usize..10_000, 0..25)) {
            let (p, states) = random_walk(&choices);
            let init = &states[0];
            let shelves = ["shelf1", "shelf2", "shelf3", "shelf4"];
            let products = ["product1", "product2", "product3", "product4"];
            let amount = |s: &State, sh: &str, pr: &str| s.value(&GroundAtom::ground("amount", &[sh, pr])).unwrap();
            let free = |s: &State, sh: &str| s.value(&GroundAtom::ground("free-space", &[sh])).unwrap();
            for s in &states {
                for pr in products {
                    let total: f64 = shelves.iter().map(|sh| amount(s, sh, pr)).sum();
                    let total0: f64 = shelves.iter().map(|sh| amount(init, sh, pr)).sum();
                    prop_assert_eq!(total, total0);
                }
                for sh in shelves {
                    let used: f64 = products.iter().map(|pr| amount(s, sh, pr)).sum();
                    prop_assert_eq!(free(s, sh) + used, 12.0);
                }
            }
            prop_assert!(p.goal.len() == 4);
        }

        #[test]
        fn apply_is_deterministic_and_framed(choices in proptest::collection::vec(0usize..10_000, 1..10)) {
            let (d, p, _) = fleet();
            let (_, states) = random_walk(&choices);
            let s = states.last().unwrap();
            let a = move_action(&d, &p, &["shelf4", "shelf3", "product3", "magnitude1"]);
            if applicable(s, &a).unwrap() {
                let n1 = apply(s, &a).unwrap();
                let n2 = apply(&s.clone(), &a).unwrap();
                prop_assert_eq!(&n1, &n2);
                let written = a.written_fluents();
                for (k, v) in &s.fluents {
                    if !written.contains(k) {
                        prop_assert_eq!(n1.value(k), Some(*v));
                    }
                }
                prop_assert_eq!(&n1.atoms, &s.atoms);
            }
        }
    }
}
