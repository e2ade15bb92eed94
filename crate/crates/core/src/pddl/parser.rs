//! Conversion from s-expressions to [`Domain`] and [`Problem`] trees.
//!
//! Semantic checks run during conversion so every diagnostic carries the
//! position of the offending token.

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::error::PddlError;
use super::sexpr::{read_one, Pos, SExpr};

type Result<T> = std::result::Result<T, PddlError>;

const UNSUPPORTED_CONDITIONS: &[&str] = &["or", "imply", "exists", "forall", "when"];
const UNSUPPORTED_EFFECTS: &[&str] = &["forall", "when", "scale-up", "scale-down"];

/// Parses domain text.
pub fn parse_domain(text: &str) -> Result<Domain> {
    let root = read_one(text)?;
    let items = expect_list(&root, "(define ...)")?;
    expect_keyword(items.first(), root.pos(), "define")?;
    let header = items.get(1).ok_or_else(|| PddlError::syntax(root.pos(), "missing domain header", &["(domain <name>)"]))?;
    let name = header_name(header, "domain")?;

    let mut domain = Domain {
        name,
        requirements: Vec::new(),
        types: Vec::new(),
        predicates: Vec::new(),
        functions: Vec::new(),
        actions: Vec::new(),
    };
    let mut action_exprs = Vec::new();
    for section in &items[2..] {
        let sec_items = expect_list(section, "(:section ...)")?;
        let key = sec_items.first().and_then(SExpr::as_atom).unwrap_or("");
        match key {
            ":requirements" => {
                for r in &sec_items[1..] {
                    let word = expect_atom(r, "requirement keyword")?;
                    let req = Requirement::from_keyword(word).ok_or_else(|| PddlError::UnknownRequirement {
                        pos: r.pos(),
                        name: word.to_string(),
                    })?;
                    domain.requirements.push(req);
                }
            }
            ":types" => {
                let declared = parse_typed_list(&sec_items[1..], false)?;
                for (t, pos) in declared {
                    if t.name == OBJECT {
                        continue;
                    }
                    if domain.types.iter().any(|d| d.name == t.name) {
                        return Err(PddlError::semantic(pos, format!("type '{}' declared twice", t.name)));
                    }
                    domain.types.push(t);
                }
            }
            ":predicates" => {
                for p in &sec_items[1..] {
                    let sig = parse_signature(p)?;
                    if domain.predicate(&sig.name).is_some() {
                        return Err(PddlError::semantic(p.pos(), format!("predicate '{}' declared twice", sig.name)));
                    }
                    domain.predicates.push(sig);
                }
            }
            ":functions" => {
                let mut rest = &sec_items[1..];
                while let Some((first, tail)) = rest.split_first() {
                    if first.as_atom() == Some("-") {
                        let ty = tail.first().ok_or_else(|| PddlError::syntax(first.pos(), "missing function type", &["number"]))?;
                        if expect_atom(ty, "number")? != "number" {
                            return Err(PddlError::Unsupported { pos: ty.pos(), construct: "object-valued function".into() });
                        }
                        rest = &tail[1..];
                        continue;
                    }
                    let sig = parse_signature(first)?;
                    if domain.function(&sig.name).is_some() || domain.predicate(&sig.name).is_some() {
                        return Err(PddlError::semantic(first.pos(), format!("function '{}' declared twice", sig.name)));
                    }
                    domain.functions.push(sig);
                    rest = tail;
                }
            }
            ":action" => action_exprs.push(section),
            ":durative-action" | ":constants" | ":derived" | ":constraints" => {
                return Err(PddlError::Unsupported { pos: section.pos(), construct: key.to_string() })
            }
            _ => {
                return Err(PddlError::syntax(
                    section.pos(),
                    format!("unknown domain section '{key}'"),
                    &[":requirements", ":types", ":predicates", ":functions", ":action"],
                ))
            }
        }
    }

    for t in &domain.types {
        if !domain.has_type(&t.ty) {
            return Err(PddlError::semantic(Pos::default(), format!("type '{}' has undeclared parent '{}'", t.name, t.ty)));
        }
    }
    if domain.types.iter().any(|t| cyclic(&domain, &t.name)) {
        return Err(PddlError::semantic(Pos::default(), "cyclic type hierarchy"));
    }
    for sig in domain.predicates.iter().chain(&domain.functions) {
        for p in &sig.params {
            if !domain.has_type(&p.ty) {
                return Err(PddlError::semantic(Pos::default(), format!("'{}' uses undeclared type '{}'", sig.name, p.ty)));
            }
        }
    }

    for expr in action_exprs {
        let action = parse_action(expr, &domain)?;
        if domain.action(&action.name).is_some() {
            return Err(PddlError::semantic(expr.pos(), format!("action '{}' declared twice", action.name)));
        }
        domain.actions.push(action);
    }
    Ok(domain)
}

fn cyclic(domain: &Domain, ty: &str) -> bool {
    let mut seen = HashSet::new();
    let mut current = ty;
    while let Some(t) = domain.types.iter().find(|t| t.name == current) {
        if !seen.insert(current) {
            return true;
        }
        current = &t.ty;
    }
    false
}

/// Parses problem text and cross-checks it against `domain`.
pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem> {
    let root = read_one(text)?;
    let items = expect_list(&root, "(define ...)")?;
    expect_keyword(items.first(), root.pos(), "define")?;
    let header = items.get(1).ok_or_else(|| PddlError::syntax(root.pos(), "missing problem header", &["(problem <name>)"]))?;
    let name = header_name(header, "problem")?;

    let mut problem = Problem {
        name,
        domain: String::new(),
        objects: Vec::new(),
        init_atoms: Vec::new(),
        init_fluents: Vec::new(),
        goal: Vec::new(),
        metric: None,
    };
    let mut seen_domain = false;
    let mut init_expr = None;
    let mut goal_expr = None;
    let mut metric_expr = None;
    for section in &items[2..] {
        let sec = expect_list(section, "(:section ...)")?;
        let key = sec.first().and_then(SExpr::as_atom).unwrap_or("");
        match key {
            ":domain" => {
                let d = sec.get(1).ok_or_else(|| PddlError::syntax(section.pos(), "missing domain name", &["<name>"]))?;
                let d_name = expect_atom(d, "domain name")?;
                if d_name != domain.name {
                    return Err(PddlError::semantic(d.pos(), format!("problem targets domain '{d_name}', expected '{}'", domain.name)));
                }
                problem.domain = d_name.to_string();
                seen_domain = true;
            }
            ":objects" => {
                for (obj, pos) in parse_typed_list(&sec[1..], false)? {
                    if !domain.has_type(&obj.ty) {
                        return Err(PddlError::semantic(pos, format!("object '{}' has undeclared type '{}'", obj.name, obj.ty)));
                    }
                    if problem.object_type(&obj.name).is_some() {
                        return Err(PddlError::semantic(pos, format!("object '{}' declared twice", obj.name)));
                    }
                    problem.objects.push(obj);
                }
            }
            ":init" => init_expr = Some(section),
            ":goal" => goal_expr = Some(section),
            ":metric" => metric_expr = Some(section),
            ":requirements" | ":constraints" => {
                return Err(PddlError::Unsupported { pos: section.pos(), construct: key.to_string() })
            }
            _ => {
                return Err(PddlError::syntax(
                    section.pos(),
                    format!("unknown problem section '{key}'"),
                    &[":domain", ":objects", ":init", ":goal", ":metric"],
                ))
            }
        }
    }
    if !seen_domain {
        return Err(PddlError::syntax(root.pos(), "missing (:domain ...) section", &["(:domain <name>)"]));
    }

    let scope = ObjectScope { domain, objects: problem.objects.iter().map(|o| (o.name.as_str(), o.ty.as_str())).collect() };
    if let Some(init) = init_expr {
        let mut atoms = Vec::new();
        let mut fluents: Vec<(GroundAtom, f64)> = Vec::new();
        for fact in &init.as_list().unwrap_or(&[])[1..] {
            let fact_items = expect_list(fact, "init fact")?;
            match fact.head() {
                Some("=") => {
                    if fact_items.len() != 3 {
                        return Err(PddlError::syntax(fact.pos(), "fluent initialisation needs a term and a value", &["(= (f ...) <number>)"]));
                    }
                    let term = parse_fluent_term(&fact_items[1], domain, &scope)?;
                    let value = parse_number(&fact_items[2])?;
                    if fluents.iter().any(|(t, _)| *t == term) {
                        return Err(PddlError::semantic(fact.pos(), format!("fluent {term} initialised twice")));
                    }
                    fluents.push((term, value));
                }
                Some("not") => return Err(PddlError::Unsupported { pos: fact.pos(), construct: "negative initial fact".into() }),
                _ => {
                    let atom = parse_atom(fact, domain, &scope)?;
                    if !atoms.contains(&atom) {
                        atoms.push(atom);
                    }
                }
            }
        }
        problem.init_atoms = atoms;
        problem.init_fluents = fluents;
    } else {
        return Err(PddlError::syntax(root.pos(), "missing (:init ...) section", &["(:init ...)"]));
    }

    let goal = goal_expr.ok_or_else(|| PddlError::syntax(root.pos(), "missing (:goal ...) section", &["(:goal ...)"]))?;
    let goal_items = goal.as_list().unwrap_or(&[]);
    match goal_items.len() {
        1 => {}
        2 => parse_condition(&goal_items[1], domain, &scope, &mut problem.goal)?,
        _ => return Err(PddlError::syntax(goal_items[2].pos(), "goal takes a single formula", &[")"])),
    }

    if let Some(m) = metric_expr {
        let m_items = m.as_list().unwrap_or(&[]);
        if m_items.len() != 3 {
            return Err(PddlError::syntax(m.pos(), "metric needs a direction and an expression", &["minimize", "maximize"]));
        }
        let minimize = match expect_atom(&m_items[1], "minimize")? {
            "minimize" => true,
            "maximize" => false,
            _ => return Err(PddlError::syntax(m_items[1].pos(), "bad metric direction", &["minimize", "maximize"])),
        };
        problem.metric = Some(Metric { minimize, expr: parse_expr(&m_items[2], domain, &scope)? });
    }
    Ok(problem)
}

fn expect_list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr]> {
    e.as_list().ok_or_else(|| PddlError::syntax(e.pos(), format!("expected a list, found '{e}'"), &[what]))
}

fn expect_atom<'a>(e: &'a SExpr, what: &str) -> Result<&'a str> {
    e.as_atom().ok_or_else(|| PddlError::syntax(e.pos(), "expected a symbol, found a list", &[what]))
}

fn expect_keyword(e: Option<&SExpr>, fallback: Pos, word: &str) -> Result<()> {
    match e {
        Some(e) if e.as_atom() == Some(word) => Ok(()),
        Some(e) => Err(PddlError::syntax(e.pos(), format!("expected '{word}'"), &[word])),
        None => Err(PddlError::syntax(fallback, format!("expected '{word}'"), &[word])),
    }
}

fn header_name(header: &SExpr, kind: &str) -> Result<String> {
    let items = expect_list(header, &format!("({kind} <name>)"))?;
    expect_keyword(items.first(), header.pos(), kind)?;
    match items {
        [_, name] => Ok(expect_atom(name, "name")?.to_string()),
        _ => Err(PddlError::syntax(header.pos(), format!("malformed {kind} header"), &[&format!("({kind} <name>)")])),
    }
}

fn is_number(s: &str) -> bool {
    s.parse::<f64>().is_ok() && s.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '.' || c == '+')
}

fn parse_number(e: &SExpr) -> Result<f64> {
    let text = expect_atom(e, "number")?;
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() && is_number(text) => Ok(v),
        _ => Err(PddlError::syntax(e.pos(), format!("'{text}' is not a finite number"), &["number"])),
    }
}

/// Parses `a b - t c - u d` into typed names; untyped names default to `object`.
fn parse_typed_list(items: &[SExpr], variables: bool) -> Result<Vec<(TypedName, Pos)>> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        let text = expect_atom(item, "name")?;
        if text == "-" {
            let ty_expr = items.get(i + 1).ok_or_else(|| PddlError::syntax(item.pos(), "missing type after '-'", &["type name"]))?;
            if ty_expr.head() == Some("either") {
                return Err(PddlError::Unsupported { pos: ty_expr.pos(), construct: "either".into() });
            }
            let ty = expect_atom(ty_expr, "type name")?;
            if pending.is_empty() {
                return Err(PddlError::syntax(item.pos(), "type annotation without names", &["name"]));
            }
            out.extend(pending.drain(..).map(|(n, p)| (TypedName::new(n, ty), p)));
            i += 2;
            continue;
        }
        let name = if variables {
            text.strip_prefix('?')
                .filter(|v| !v.is_empty())
                .ok_or_else(|| PddlError::syntax(item.pos(), format!("expected a variable, found '{text}'"), &["?var"]))?
        } else {
            if text.starts_with('?') || text.starts_with(':') {
                return Err(PddlError::syntax(item.pos(), format!("expected a name, found '{text}'"), &["name"]));
            }
            text
        };
        pending.push((name.to_string(), item.pos()));
        i += 1;
    }
    out.extend(pending.into_iter().map(|(n, p)| (TypedName::new(n, OBJECT), p)));
    Ok(out)
}

fn parse_signature(e: &SExpr) -> Result<Signature> {
    let items = expect_list(e, "(name ?x - type ...)")?;
    let name = expect_atom(items.first().ok_or_else(|| PddlError::syntax(e.pos(), "empty declaration", &["name"]))?, "name")?;
    let params = parse_typed_list(&items[1..], true)?;
    let mut seen = HashSet::new();
    for (p, pos) in &params {
        if !seen.insert(p.name.clone()) {
            return Err(PddlError::semantic(*pos, format!("parameter '?{}' repeated in '{name}'", p.name)));
        }
    }
    Ok(Signature { name: name.to_string(), params: params.into_iter().map(|(p, _)| p).collect() })
}

/// Resolves argument tokens to terms, checking scope and types.
trait Scope {
    type Term: Clone;
    fn resolve(&self, token: &str, pos: Pos, expected_ty: &str) -> Result<Self::Term>;
}

struct ParamScope<'a> {
    domain: &'a Domain,
    params: HashMap<&'a str, &'a str>,
}

impl Scope for ParamScope<'_> {
    type Term = Term;
    fn resolve(&self, token: &str, pos: Pos, expected_ty: &str) -> Result<Term> {
        let Some(var) = token.strip_prefix('?') else {
            return Err(PddlError::semantic(pos, format!("unknown constant '{token}' (domain constants are not supported)")));
        };
        let ty = self
            .params
            .get(var)
            .ok_or_else(|| PddlError::semantic(pos, format!("free variable '?{var}' is not an action parameter")))?;
        if !self.domain.types_compatible(ty, expected_ty) {
            return Err(PddlError::semantic(pos, format!("variable '?{var}' of type '{ty}' used where '{expected_ty}' is expected")));
        }
        Ok(Term::Var(var.to_string()))
    }
}

struct ObjectScope<'a> {
    domain: &'a Domain,
    objects: HashMap<&'a str, &'a str>,
}

impl Scope for ObjectScope<'_> {
    type Term = String;
    fn resolve(&self, token: &str, pos: Pos, expected_ty: &str) -> Result<String> {
        if token.starts_with('?') {
            return Err(PddlError::semantic(pos, format!("variable '{token}' in a ground formula")));
        }
        let ty = self.objects.get(token).ok_or_else(|| PddlError::semantic(pos, format!("undeclared object '{token}'")))?;
        if !self.domain.is_subtype(ty, expected_ty) {
            return Err(PddlError::semantic(pos, format!("object '{token}' of type '{ty}' used where '{expected_ty}' is expected")));
        }
        Ok(token.to_string())
    }
}

fn parse_args<S: Scope>(e: &SExpr, items: &[SExpr], sig: &Signature, scope: &S) -> Result<Vec<S::Term>> {
    if items.len() != sig.params.len() {
        return Err(PddlError::semantic(
            e.pos(),
            format!("'{}' expects {} arguments, found {}", sig.name, sig.params.len(), items.len()),
        ));
    }
    items
        .iter()
        .zip(&sig.params)
        .map(|(arg, p)| scope.resolve(expect_atom(arg, "argument")?, arg.pos(), &p.ty))
        .collect()
}

fn parse_atom<S: Scope>(e: &SExpr, domain: &Domain, scope: &S) -> Result<Atom<S::Term>> {
    let items = expect_list(e, "(predicate args...)")?;
    let head = items.first().ok_or_else(|| PddlError::syntax(e.pos(), "empty atom", &["predicate"]))?;
    let name = expect_atom(head, "predicate")?;
    let sig = domain
        .predicate(name)
        .ok_or_else(|| PddlError::semantic(head.pos(), format!("undeclared predicate '{name}'")))?;
    Ok(Atom::new(name, parse_args(e, &items[1..], sig, scope)?))
}

fn parse_fluent_term<S: Scope>(e: &SExpr, domain: &Domain, scope: &S) -> Result<Atom<S::Term>> {
    let (name, pos, args): (&str, Pos, &[SExpr]) = match e {
        SExpr::Atom { text, pos } => (text, *pos, &[]),
        SExpr::List { items, pos } => {
            let head = items.first().ok_or_else(|| PddlError::syntax(*pos, "empty function term", &["function"]))?;
            (expect_atom(head, "function")?, head.pos(), &items[1..])
        }
    };
    let sig = domain
        .function(name)
        .ok_or_else(|| PddlError::semantic(pos, format!("undeclared function '{name}'")))?;
    Ok(Atom::new(name, parse_args(e, args, sig, scope)?))
}

fn parse_expr<S: Scope>(e: &SExpr, domain: &Domain, scope: &S) -> Result<Expr<S::Term>> {
    match e {
        SExpr::Atom { text, pos } => {
            if is_number(text) {
                parse_number(e).map(Expr::Num)
            } else if domain.function(text).is_some() {
                parse_fluent_term(e, domain, scope).map(Expr::Fluent)
            } else {
                Err(PddlError::semantic(*pos, format!("'{text}' is not a number or a declared function")))
            }
        }
        SExpr::List { items, pos } => {
            let head = items.first().and_then(SExpr::as_atom).unwrap_or("");
            if let Some(op) = ArithOp::from_symbol(head) {
                match (op, &items[1..]) {
                    (ArithOp::Sub, [x]) => Ok(Expr::Neg(Box::new(parse_expr(x, domain, scope)?))),
                    (_, [l, r]) => Ok(Expr::Bin(
                        op,
                        Box::new(parse_expr(l, domain, scope)?),
                        Box::new(parse_expr(r, domain, scope)?),
                    )),
                    _ => Err(PddlError::syntax(*pos, format!("'{head}' takes two operands"), &["(op e1 e2)"])),
                }
            } else {
                parse_fluent_term(e, domain, scope).map(Expr::Fluent)
            }
        }
    }
}

fn parse_condition<S: Scope>(e: &SExpr, domain: &Domain, scope: &S, out: &mut Vec<Condition<S::Term>>) -> Result<()> {
    let items = expect_list(e, "condition")?;
    let Some(head) = items.first() else {
        return Ok(());
    };
    let word = expect_atom(head, "condition head")?;
    match word {
        "and" => {
            for c in &items[1..] {
                parse_condition(c, domain, scope, out)?;
            }
        }
        "not" => {
            let [inner] = &items[1..] else {
                return Err(PddlError::syntax(e.pos(), "'not' takes one formula", &["(not (p ...))"]));
            };
            if inner.head().is_some_and(|h| CmpOp::from_symbol(h).is_some()) {
                return Err(PddlError::Unsupported { pos: inner.pos(), construct: "negated comparison".into() });
            }
            out.push(Condition::Neg(parse_atom(inner, domain, scope)?));
        }
        w if UNSUPPORTED_CONDITIONS.contains(&w) => {
            return Err(PddlError::Unsupported { pos: head.pos(), construct: w.to_string() })
        }
        w => {
            if let Some(op) = CmpOp::from_symbol(w) {
                let [l, r] = &items[1..] else {
                    return Err(PddlError::syntax(e.pos(), format!("'{w}' takes two operands"), &["(op e1 e2)"]));
                };
                let object_term = |x: &SExpr| x.as_atom().is_some_and(|t| !is_number(t) && domain.function(t).is_none());
                if op == CmpOp::Eq && (object_term(l) || object_term(r)) {
                    return Err(PddlError::Unsupported { pos: e.pos(), construct: "object equality".into() });
                }
                out.push(Condition::Cmp(op, parse_expr(l, domain, scope)?, parse_expr(r, domain, scope)?));
            } else {
                out.push(Condition::Pos(parse_atom(e, domain, scope)?));
            }
        }
    }
    Ok(())
}

fn parse_effect(e: &SExpr, domain: &Domain, scope: &ParamScope<'_>, out: &mut Vec<Effect<Term>>) -> Result<()> {
    let items = expect_list(e, "effect")?;
    let Some(head) = items.first() else {
        return Ok(());
    };
    let word = expect_atom(head, "effect head")?;
    match word {
        "and" => {
            for c in &items[1..] {
                parse_effect(c, domain, scope, out)?;
            }
        }
        "not" => {
            let [inner] = &items[1..] else {
                return Err(PddlError::syntax(e.pos(), "'not' takes one atom", &["(not (p ...))"]));
            };
            out.push(Effect::Del(parse_atom(inner, domain, scope)?));
        }
        "increase" | "decrease" | "assign" => {
            let op = match word {
                "increase" => UpdateOp::Increase,
                "decrease" => UpdateOp::Decrease,
                _ => UpdateOp::Assign,
            };
            let [target, value] = &items[1..] else {
                return Err(PddlError::syntax(e.pos(), format!("'{word}' takes a fluent and a value"), &["(op (f ...) e)"]));
            };
            out.push(Effect::Update(op, parse_fluent_term(target, domain, scope)?, parse_expr(value, domain, scope)?));
        }
        w if UNSUPPORTED_EFFECTS.contains(&w) => {
            return Err(PddlError::Unsupported { pos: head.pos(), construct: w.to_string() })
        }
        _ => out.push(Effect::Add(parse_atom(e, domain, scope)?)),
    }
    Ok(())
}

fn parse_action(e: &SExpr, domain: &Domain) -> Result<ActionSchema> {
    let items = e.as_list().unwrap_or(&[]);
    let name_expr = items.get(1).ok_or_else(|| PddlError::syntax(e.pos(), "missing action name", &["name"]))?;
    let name = expect_atom(name_expr, "action name")?.to_string();

    let mut params_expr = None;
    let mut pre_expr = None;
    let mut eff_expr = None;
    let mut i = 2;
    while i < items.len() {
        let key = expect_atom(&items[i], ":parameters | :precondition | :effect")?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| PddlError::syntax(items[i].pos(), format!("'{key}' has no value"), &["(...)"]))?;
        let slot = match key {
            ":parameters" => &mut params_expr,
            ":precondition" => &mut pre_expr,
            ":effect" => &mut eff_expr,
            _ => {
                return Err(PddlError::syntax(
                    items[i].pos(),
                    format!("unexpected '{key}' in action '{name}'"),
                    &[":parameters", ":precondition", ":effect"],
                ))
            }
        };
        if slot.replace(value).is_some() {
            return Err(PddlError::syntax(items[i].pos(), format!("duplicate '{key}' in action '{name}'"), &[")"]));
        }
        i += 2;
    }
    let eff_expr = eff_expr.ok_or_else(|| {
        PddlError::syntax(e.pos(), format!("action '{name}' has no :effect clause"), &[":effect"])
    })?;

    let params = match params_expr {
        Some(p) => {
            let list = expect_list(p, "(?x - type ...)")?;
            let typed = parse_typed_list(list, true)?;
            let mut seen = HashSet::new();
            for (t, pos) in &typed {
                if !domain.has_type(&t.ty) {
                    return Err(PddlError::semantic(*pos, format!("parameter '?{}' has undeclared type '{}'", t.name, t.ty)));
                }
                if !seen.insert(t.name.clone()) {
                    return Err(PddlError::semantic(*pos, format!("parameter '?{}' repeated", t.name)));
                }
            }
            typed.into_iter().map(|(t, _)| t).collect()
        }
        None => Vec::new(),
    };
    let scope = ParamScope {
        domain,
        params: params.iter().map(|p: &TypedName| (p.name.as_str(), p.ty.as_str())).collect(),
    };
    let mut precondition = Vec::new();
    if let Some(p) = pre_expr {
        parse_condition(p, domain, &scope, &mut precondition)?;
    }
    let mut effects = Vec::new();
    parse_effect(eff_expr, domain, &scope, &mut effects)?;
    Ok(ActionSchema { name, params, precondition, effects })
}

/// Parses a single ground action expression like `(move a b)` against the
/// problem's objects; used by the plan reader.
pub(crate) fn split_call(e: &SExpr) -> Result<(String, Vec<(String, Pos)>)> {
    let items = expect_list(e, "(action args...)")?;
    let head = items.first().ok_or_else(|| PddlError::syntax(e.pos(), "empty action", &["action name"]))?;
    let name = expect_atom(head, "action name")?.to_string();
    let args = items[1..]
        .iter()
        .map(|a| Ok((expect_atom(a, "object")?.to_string(), a.pos())))
        .collect::<Result<Vec<_>>>()?;
    Ok((name, args))
}
