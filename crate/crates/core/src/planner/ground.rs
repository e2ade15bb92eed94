//! Grounding and compilation into an integer-indexed task.

use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use crate::pddl::{
    compare, ActionSchema, ArithOp, CmpOp, Condition, Domain, Effect, Expr, GroundAction, GroundAtom, Problem, Term, UpdateOp,
    NUMERIC_TOLERANCE,
};

#[derive(Debug, Clone)]
pub(crate) enum CExpr {
    Num(f64),
    Var(usize),
    Neg(Box<CExpr>),
    Bin(ArithOp, Box<CExpr>, Box<CExpr>),
}

impl CExpr {
    /// NaN stands for an undefined value or an arithmetic fault.
    pub(crate) fn eval(&self, vals: &[f64]) -> f64 {
        match self {
            CExpr::Num(n) => *n,
            CExpr::Var(i) => vals[*i],
            CExpr::Neg(e) => -e.eval(vals),
            CExpr::Bin(op, l, r) => {
                let (l, r) = (l.eval(vals), r.eval(vals));
                let v = match op {
                    ArithOp::Add => l + r,
                    ArithOp::Sub => l - r,
                    ArithOp::Mul => l * r,
                    ArithOp::Div if r == 0.0 => f64::NAN,
                    ArithOp::Div => l / r,
                };
                if v.is_finite() {
                    v
                } else {
                    f64::NAN
                }
            }
        }
    }

    fn constant(&self) -> Option<f64> {
        match self {
            CExpr::Num(n) => Some(*n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CCmp {
    pub op: CmpOp,
    pub lhs: CExpr,
    pub rhs: CExpr,
}

impl CCmp {
    pub(crate) fn holds(&self, vals: &[f64]) -> bool {
        let (l, r) = (self.lhs.eval(vals), self.rhs.eval(vals));
        !l.is_nan() && !r.is_nan() && compare(self.op, l, r)
    }

    /// Distance to satisfaction in units of `scale`; 0 when satisfied.
    pub(crate) fn residual(&self, vals: &[f64], scale: f64) -> u64 {
        let (l, r) = (self.lhs.eval(vals), self.rhs.eval(vals));
        if l.is_nan() || r.is_nan() {
            return 1;
        }
        if compare(self.op, l, r) {
            return 0;
        }
        residual_bucket((l - r).abs(), scale)
    }
}

pub(crate) fn residual_bucket(gap: f64, scale: f64) -> u64 {
    let steps = ((gap - NUMERIC_TOLERANCE) / scale).ceil();
    if steps.is_finite() && steps >= 1.0 {
        steps as u64
    } else {
        1
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CAction {
    pub ground: GroundAction,
    pub pre_pos: Vec<usize>,
    pub pre_neg: Vec<usize>,
    pub pre_num: Vec<CCmp>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
    pub updates: Vec<(UpdateOp, usize, CExpr)>,
}

#[derive(Debug, Clone)]
pub(crate) struct CState {
    pub bits: Vec<u64>,
    pub vals: Vec<f64>,
}

impl CState {
    pub(crate) fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, on: bool) {
        if on {
            self.bits[i / 64] |= 1 << (i % 64);
        } else {
            self.bits[i / 64] &= !(1 << (i % 64));
        }
    }

    fn canonical_val(v: f64) -> u64 {
        if v.is_nan() {
            f64::NAN.to_bits()
        } else if v == 0.0 {
            0
        } else {
            v.to_bits()
        }
    }
}

impl PartialEq for CState {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
            && self.vals.len() == other.vals.len()
            && self.vals.iter().zip(&other.vals).all(|(a, b)| CState::canonical_val(*a) == CState::canonical_val(*b))
    }
}

impl Eq for CState {}

impl Hash for CState {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.bits.hash(h);
        for v in &self.vals {
            CState::canonical_val(*v).hash(h);
        }
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct CGoal {
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
    pub num: Vec<CCmp>,
    /// A conjunct over static facts that is false; the goal is unreachable.
    pub statically_false: bool,
}

#[derive(Debug)]
pub(crate) struct Task {
    #[cfg_attr(not(test), allow(dead_code))]
    pub atoms: Vec<GroundAtom>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub fluents: Vec<GroundAtom>,
    pub actions: Vec<CAction>,
    pub init: CState,
    pub goal: CGoal,
    pub scale: f64,
}

impl CAction {
    pub(crate) fn applicable(&self, s: &CState) -> bool {
        self.pre_pos.iter().all(|&i| s.get(i)) && self.pre_neg.iter().all(|&i| !s.get(i)) && self.pre_num.iter().all(|c| c.holds(&s.vals))
    }

    /// Successor under delete-before-add, or `None` if an update is undefined.
    pub(crate) fn apply(&self, s: &CState) -> Option<CState> {
        let mut next = s.clone();
        for (op, idx, expr) in &self.updates {
            let amount = expr.eval(&s.vals);
            let v = match op {
                UpdateOp::Assign => amount,
                UpdateOp::Increase => s.vals[*idx] + amount,
                UpdateOp::Decrease => s.vals[*idx] - amount,
            };
            if !v.is_finite() {
                return None;
            }
            next.vals[*idx] = v;
        }
        for &i in &self.del {
            next.set(i, false);
        }
        for &i in &self.add {
            next.set(i, true);
        }
        Some(next)
    }
}

impl CGoal {
    pub(crate) fn satisfied(&self, s: &CState) -> bool {
        !self.statically_false
            && self.pos.iter().all(|&i| s.get(i))
            && self.neg.iter().all(|&i| !s.get(i))
            && self.num.iter().all(|c| c.holds(&s.vals))
    }

    pub(crate) fn goal_count(&self, s: &CState, scale: f64) -> u64 {
        let mut h = self.pos.iter().filter(|&&i| !s.get(i)).count() as u64;
        h += self.neg.iter().filter(|&&i| s.get(i)).count() as u64;
        h += self.num.iter().map(|c| c.residual(&s.vals, scale)).sum::<u64>();
        h
    }
}

struct Compiler<'a> {
    static_preds: HashSet<&'a str>,
    static_funcs: HashSet<&'a str>,
    init_atoms: HashSet<&'a GroundAtom>,
    init_fluents: HashMap<&'a GroundAtom, f64>,
    atom_index: HashMap<GroundAtom, usize>,
    atoms: Vec<GroundAtom>,
    fluent_index: HashMap<GroundAtom, usize>,
    fluents: Vec<GroundAtom>,
}

enum Folded {
    Keep(CCmp),
    True,
    False,
}

impl<'a> Compiler<'a> {
    fn atom(&mut self, a: &GroundAtom) -> usize {
        if let Some(&i) = self.atom_index.get(a) {
            return i;
        }
        self.atoms.push(a.clone());
        self.atom_index.insert(a.clone(), self.atoms.len() - 1);
        self.atoms.len() - 1
    }

    fn fluent(&mut self, a: &GroundAtom) -> usize {
        if let Some(&i) = self.fluent_index.get(a) {
            return i;
        }
        self.fluents.push(a.clone());
        self.fluent_index.insert(a.clone(), self.fluents.len() - 1);
        self.fluents.len() - 1
    }

    /// `None` when the expression reads an undefined static fluent.
    fn expr(&mut self, e: &Expr<String>) -> Option<CExpr> {
        Some(match e {
            Expr::Num(n) => CExpr::Num(*n),
            Expr::Fluent(a) => {
                if self.static_funcs.contains(a.name.as_str()) {
                    CExpr::Num(*self.init_fluents.get(a)?)
                } else {
                    CExpr::Var(self.fluent(a))
                }
            }
            Expr::Neg(x) => {
                let x = self.expr(x)?;
                match x.constant() {
                    Some(v) => CExpr::Num(-v),
                    None => CExpr::Neg(Box::new(x)),
                }
            }
            Expr::Bin(op, l, r) => {
                let (l, r) = (self.expr(l)?, self.expr(r)?);
                let bin = CExpr::Bin(*op, Box::new(l), Box::new(r));
                match bin {
                    CExpr::Bin(_, ref l, ref r) if l.constant().is_some() && r.constant().is_some() => {
                        let v = bin.eval(&[]);
                        if v.is_nan() {
                            return None;
                        }
                        CExpr::Num(v)
                    }
                    _ => bin,
                }
            }
        })
    }

    fn cmp(&mut self, op: CmpOp, l: &Expr<String>, r: &Expr<String>) -> Folded {
        let (Some(lhs), Some(rhs)) = (self.expr(l), self.expr(r)) else {
            return Folded::False;
        };
        match (lhs.constant(), rhs.constant()) {
            (Some(a), Some(b)) if compare(op, a, b) => Folded::True,
            (Some(_), Some(_)) => Folded::False,
            _ => Folded::Keep(CCmp { op, lhs, rhs }),
        }
    }

    fn is_static_atom(&self, a: &GroundAtom) -> bool {
        self.static_preds.contains(a.name.as_str())
    }

    fn compile_action(&mut self, ground: GroundAction) -> Option<CAction> {
        let mut out = CAction {
            pre_pos: Vec::new(),
            pre_neg: Vec::new(),
            pre_num: Vec::new(),
            add: Vec::new(),
            del: Vec::new(),
            updates: Vec::new(),
            ground: ground.clone(),
        };
        for c in &ground.precondition {
            match c {
                Condition::Pos(a) if self.is_static_atom(a) => {
                    if !self.init_atoms.contains(a) {
                        return None;
                    }
                }
                Condition::Neg(a) if self.is_static_atom(a) => {
                    if self.init_atoms.contains(a) {
                        return None;
                    }
                }
                Condition::Pos(a) => out.pre_pos.push(self.atom(a)),
                Condition::Neg(a) => out.pre_neg.push(self.atom(a)),
                Condition::Cmp(op, l, r) => match self.cmp(*op, l, r) {
                    Folded::Keep(c) => out.pre_num.push(c),
                    Folded::True => {}
                    Folded::False => return None,
                },
            }
        }
        for a in &ground.del {
            out.del.push(self.atom(a));
        }
        for a in &ground.add {
            out.add.push(self.atom(a));
        }
        for (op, f, e) in &ground.updates {
            let e = self.expr(e)?;
            out.updates.push((*op, self.fluent(f), e));
        }
        Some(out)
    }
}

fn enumerate(
    schema: &ActionSchema,
    candidates: &[Vec<&str>],
    prefix: &mut Vec<String>,
    static_ok: &impl Fn(&[String]) -> bool,
    out: &mut Vec<GroundAction>,
) {
    if prefix.len() == candidates.len() {
        out.push(GroundAction::instantiate(schema, prefix));
        return;
    }
    for obj in &candidates[prefix.len()] {
        prefix.push(obj.to_string());
        if static_ok(prefix) {
            enumerate(schema, candidates, prefix, static_ok, out);
        }
        prefix.pop();
    }
}

/// Grounds every schema over typed object tuples and compiles the result.
/// Actions whose static preconditions are false in the initial state are
/// dropped here.
pub(crate) fn compile(domain: &Domain, problem: &Problem) -> Task {
    let mut dynamic_preds = HashSet::new();
    let mut dynamic_funcs = HashSet::new();
    for a in &domain.actions {
        for e in &a.effects {
            match e {
                Effect::Add(x) | Effect::Del(x) => dynamic_preds.insert(x.name.as_str()),
                Effect::Update(_, x, _) => dynamic_funcs.insert(x.name.as_str()),
            };
        }
    }
    let static_preds: HashSet<&str> = domain.predicates.iter().map(|p| p.name.as_str()).filter(|p| !dynamic_preds.contains(p)).collect();
    let static_funcs: HashSet<&str> = domain.functions.iter().map(|f| f.name.as_str()).filter(|f| !dynamic_funcs.contains(f)).collect();
    let mut c = Compiler {
        static_preds,
        static_funcs,
        init_atoms: problem.init_atoms.iter().collect(),
        init_fluents: problem.init_fluents.iter().map(|(a, v)| (a, *v)).collect(),
        atom_index: HashMap::new(),
        atoms: Vec::new(),
        fluent_index: HashMap::new(),
        fluents: Vec::new(),
    };
    for a in &problem.init_atoms {
        if !c.is_static_atom(a) {
            c.atom(a);
        }
    }
    for (f, _) in &problem.init_fluents {
        if !c.static_funcs.contains(f.name.as_str()) {
            c.fluent(f);
        }
    }

    let mut actions = Vec::new();
    for schema in &domain.actions {
        let candidates: Vec<Vec<&str>> = schema.params.iter().map(|p| problem.objects_of(domain, &p.ty).collect()).collect();
        let param_pos: HashMap<&str, usize> = schema.params.iter().enumerate().map(|(i, p)| (p.name.as_str(), i)).collect();
        // Static literals checked as soon as all of their arguments are bound.
        let statics: Vec<(bool, &crate::pddl::Atom<Term>)> = schema
            .precondition
            .iter()
            .filter_map(|cond| match cond {
                Condition::Pos(a) if c.static_preds.contains(a.name.as_str()) => Some((true, a)),
                Condition::Neg(a) if c.static_preds.contains(a.name.as_str()) => Some((false, a)),
                _ => None,
            })
            .collect();
        let init_atoms = &c.init_atoms;
        let static_ok = |prefix: &[String]| {
            statics.iter().all(|(positive, atom)| {
                let mut args = Vec::with_capacity(atom.args.len());
                for t in &atom.args {
                    match t {
                        Term::Obj(o) => args.push(o.clone()),
                        Term::Var(v) => match param_pos.get(v.as_str()) {
                            Some(&i) if i < prefix.len() => args.push(prefix[i].clone()),
                            _ => return true,
                        },
                    }
                }
                init_atoms.contains(&GroundAtom::new(atom.name.clone(), args)) == *positive
            })
        };
        let mut grounded = Vec::new();
        enumerate(schema, &candidates, &mut Vec::new(), &static_ok, &mut grounded);
        for g in grounded {
            if let Some(a) = c.compile_action(g) {
                actions.push(a);
            }
        }
    }

    let mut goal = CGoal::default();
    for cond in &problem.goal {
        match cond {
            Condition::Pos(a) | Condition::Neg(a) if c.is_static_atom(a) => {
                let holds = c.init_atoms.contains(a);
                if holds != matches!(cond, Condition::Pos(_)) {
                    goal.statically_false = true;
                }
            }
            Condition::Pos(a) => goal.pos.push(c.atom(a)),
            Condition::Neg(a) => goal.neg.push(c.atom(a)),
            Condition::Cmp(op, l, r) => match c.cmp(*op, l, r) {
                Folded::Keep(x) => goal.num.push(x),
                Folded::True => {}
                Folded::False => goal.statically_false = true,
            },
        }
    }

    let scale = actions
        .iter()
        .flat_map(|a| a.updates.iter())
        .filter(|(op, _, _)| *op != UpdateOp::Assign)
        .filter_map(|(_, _, e)| e.constant())
        .map(f64::abs)
        .fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };

    let mut init = CState {
        bits: vec![0; c.atoms.len().div_ceil(64).max(1)],
        vals: vec![f64::NAN; c.fluents.len()],
    };
    for a in &problem.init_atoms {
        if let Some(&i) = c.atom_index.get(a) {
            init.set(i, true);
        }
    }
    for (f, v) in &problem.init_fluents {
        if let Some(&i) = c.fluent_index.get(f) {
            init.vals[i] = *v;
        }
    }
    Task {
        atoms: c.atoms,
        fluents: c.fluents,
        actions,
        init,
        goal,
        scale,
    }
}

#[cfg(test)]
impl Task {
    /// Projects an explicit state onto the compiled atoms and fluents.
    pub(crate) fn encode(&self, state: &crate::pddl::State) -> CState {
        let mut s = CState {
            bits: vec![0; self.init.bits.len()],
            vals: self.fluents.iter().map(|f| state.value(f).unwrap_or(f64::NAN)).collect(),
        };
        for (i, a) in self.atoms.iter().enumerate() {
            s.set(i, state.holds(a));
        }
        s
    }
}
