//! Ground actions, states and the transition function.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use super::ast::*;
use super::error::StateError;

/// Absolute tolerance used for every numeric comparison.
pub const NUMERIC_TOLERANCE: f64 = 1e-9;

/// Compares two values under [`NUMERIC_TOLERANCE`].
pub fn compare(op: CmpOp, lhs: f64, rhs: f64) -> bool {
    match op {
        CmpOp::Lt => lhs < rhs - NUMERIC_TOLERANCE,
        CmpOp::Le => lhs <= rhs + NUMERIC_TOLERANCE,
        CmpOp::Eq => (lhs - rhs).abs() <= NUMERIC_TOLERANCE,
        CmpOp::Ge => lhs >= rhs - NUMERIC_TOLERANCE,
        CmpOp::Gt => lhs > rhs + NUMERIC_TOLERANCE,
    }
}

/// An action schema with every parameter bound to an object.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    pub precondition: Vec<Condition<String>>,
    pub add: Vec<GroundAtom>,
    pub del: Vec<GroundAtom>,
    pub updates: Vec<(UpdateOp, GroundAtom, Expr<String>)>,
}

impl GroundAction {
    /// Binds `schema` to `args`. Type checking is the caller's concern.
    pub fn instantiate(schema: &ActionSchema, args: &[String]) -> Self {
        let binding: std::collections::HashMap<&str, &str> =
            schema.params.iter().map(|p| p.name.as_str()).zip(args.iter().map(String::as_str)).collect();
        let bind = |t: &Term| match t {
            Term::Var(v) => binding.get(v.as_str()).map(|s| s.to_string()).unwrap_or_else(|| v.clone()),
            Term::Obj(o) => o.clone(),
        };
        let mut add = Vec::new();
        let mut del = Vec::new();
        let mut updates = Vec::new();
        for e in &schema.effects {
            match e.map_terms(&bind) {
                Effect::Add(a) => add.push(a),
                Effect::Del(a) => del.push(a),
                Effect::Update(op, a, x) => updates.push((op, a, x)),
            }
        }
        GroundAction {
            name: schema.name.clone(),
            args: args.to_vec(),
            precondition: schema.precondition.iter().map(|c| c.map_terms(&bind)).collect(),
            add,
            del,
            updates,
        }
    }

    /// Atoms read by the precondition, positive or negative.
    pub fn read_atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.precondition.iter().filter_map(|c| match c {
            Condition::Pos(a) | Condition::Neg(a) => Some(a),
            Condition::Cmp(..) => None,
        })
    }

    pub fn written_atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.add.iter().chain(&self.del)
    }

    /// Fluents read by numeric preconditions or update expressions.
    pub fn read_fluents(&self) -> BTreeSet<&GroundAtom> {
        let mut out = BTreeSet::new();
        for c in &self.precondition {
            if let Condition::Cmp(_, l, r) = c {
                l.for_each_fluent(&mut |a| {
                    out.insert(a);
                });
                r.for_each_fluent(&mut |a| {
                    out.insert(a);
                });
            }
        }
        for (_, _, e) in &self.updates {
            e.for_each_fluent(&mut |a| {
                out.insert(a);
            });
        }
        out
    }

    pub fn written_fluents(&self) -> BTreeSet<&GroundAtom> {
        self.updates.iter().map(|(_, a, _)| a).collect()
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// True atoms plus the fluent store. Values are immutable; transitions build
/// new states.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct State {
    pub atoms: BTreeSet<GroundAtom>,
    pub fluents: BTreeMap<GroundAtom, f64>,
}

// Fluent values are always finite, so equality is reflexive.
impl Eq for State {}

impl Hash for State {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.atoms.hash(state);
        for (k, v) in &self.fluents {
            k.hash(state);
            // -0.0 and 0.0 compare equal and must hash equal.
            (if *v == 0.0 { 0.0f64 } else { *v }).to_bits().hash(state);
        }
    }
}

impl State {
    pub fn initial(problem: &Problem) -> Self {
        State {
            atoms: problem.init_atoms.iter().cloned().collect(),
            fluents: problem.init_fluents.iter().cloned().collect(),
        }
    }

    pub fn holds(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn value(&self, fluent: &GroundAtom) -> Option<f64> {
        self.fluents.get(fluent).copied()
    }

    pub fn eval(&self, expr: &Expr<String>) -> Result<f64, StateError> {
        let v = match expr {
            Expr::Num(n) => *n,
            Expr::Fluent(a) => self.value(a).ok_or_else(|| StateError::MissingFluent(a.to_string()))?,
            Expr::Neg(e) => -self.eval(e)?,
            Expr::Bin(op, l, r) => {
                let (l, r) = (self.eval(l)?, self.eval(r)?);
                match op {
                    ArithOp::Add => l + r,
                    ArithOp::Sub => l - r,
                    ArithOp::Mul => l * r,
                    ArithOp::Div => {
                        if r == 0.0 {
                            return Err(StateError::Arithmetic(format!("division by zero in {expr}")));
                        }
                        l / r
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(StateError::Arithmetic(format!("non-finite value for {expr}")))
        }
    }

    pub fn satisfies(&self, cond: &Condition<String>) -> Result<bool, StateError> {
        Ok(match cond {
            Condition::Pos(a) => self.holds(a),
            Condition::Neg(a) => !self.holds(a),
            Condition::Cmp(op, l, r) => compare(*op, self.eval(l)?, self.eval(r)?),
        })
    }

    /// Number of satisfied conjuncts; missing fluents count as unsatisfied.
    pub fn satisfied_count(&self, goal: &[Condition<String>]) -> usize {
        goal.iter().filter(|c| self.satisfies(c).unwrap_or(false)).count()
    }

    pub fn satisfies_all(&self, goal: &[Condition<String>]) -> bool {
        self.satisfied_count(goal) == goal.len()
    }
}

/// True iff every precondition conjunct holds in `state`.
pub fn applicable(state: &State, action: &GroundAction) -> Result<bool, StateError> {
    for c in &action.precondition {
        if !state.satisfies(c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Successor state: deletes before adds, numeric updates computed from the
/// pre-state and committed together.
pub fn apply(state: &State, action: &GroundAction) -> Result<State, StateError> {
    if !applicable(state, action)? {
        return Err(StateError::NotApplicable(action.to_string()));
    }
    let mut new_values = Vec::with_capacity(action.updates.len());
    for (op, fluent, expr) in &action.updates {
        let amount = state.eval(expr)?;
        let value = match op {
            UpdateOp::Assign => amount,
            UpdateOp::Increase | UpdateOp::Decrease => {
                let current = state.value(fluent).ok_or_else(|| StateError::MissingFluent(fluent.to_string()))?;
                if *op == UpdateOp::Increase {
                    current + amount
                } else {
                    current - amount
                }
            }
        };
        if !value.is_finite() {
            return Err(StateError::Arithmetic(format!("non-finite value for {fluent}")));
        }
        new_values.push((fluent.clone(), value));
    }
    let mut next = state.clone();
    for a in &action.del {
        next.atoms.remove(a);
    }
    for a in &action.add {
        next.atoms.insert(a.clone());
    }
    for (fluent, value) in new_values {
        next.fluents.insert(fluent, value);
    }
    Ok(next)
}
