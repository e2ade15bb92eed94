//! Domain and problem syntax trees, with canonical printing.
//!
//! Printing is total and parses back to an equal tree.

use std::fmt::{self, Display, Write as _};

/// Root of the type hierarchy.
pub const OBJECT: &str = "object";

/// A name paired with a type: type declarations (type, parent), typed
/// parameters (variable, type) and objects (object, type).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

impl TypedName {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        TypedName { name: name.into(), ty: ty.into() }
    }
}

/// Argument of a lifted atom. Variables are stored without the leading `?`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Obj(String),
}

impl Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Obj(o) => f.write_str(o),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom<T> {
    pub name: String,
    pub args: Vec<T>,
}

pub type GroundAtom = Atom<String>;

impl<T> Atom<T> {
    pub fn new(name: impl Into<String>, args: Vec<T>) -> Self {
        Atom { name: name.into(), args }
    }
}

impl GroundAtom {
    /// Convenience constructor for ground atoms from string slices.
    pub fn ground(name: &str, args: &[&str]) -> Self {
        Atom { name: name.to_string(), args: args.iter().map(|a| a.to_string()).collect() }
    }
}

impl<T: Display> Display for Atom<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            "=" => CmpOp::Eq,
            ">=" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "+" => ArithOp::Add,
            "-" => ArithOp::Sub,
            "*" => ArithOp::Mul,
            "/" => ArithOp::Div,
            _ => return None,
        })
    }
}

/// Numeric expression over fluents and constants.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T> {
    Num(f64),
    Fluent(Atom<T>),
    Neg(Box<Expr<T>>),
    Bin(ArithOp, Box<Expr<T>>, Box<Expr<T>>),
}

impl<T> Expr<T> {
    /// Visits every fluent term in the expression.
    pub fn for_each_fluent<'a>(&'a self, f: &mut impl FnMut(&'a Atom<T>)) {
        match self {
            Expr::Num(_) => {}
            Expr::Fluent(a) => f(a),
            Expr::Neg(e) => e.for_each_fluent(f),
            Expr::Bin(_, l, r) => {
                l.for_each_fluent(f);
                r.for_each_fluent(f);
            }
        }
    }

    pub fn map_terms<U>(&self, f: &impl Fn(&T) -> U) -> Expr<U> {
        match self {
            Expr::Num(n) => Expr::Num(*n),
            Expr::Fluent(a) => Expr::Fluent(map_atom(a, f)),
            Expr::Neg(e) => Expr::Neg(Box::new(e.map_terms(f))),
            Expr::Bin(op, l, r) => Expr::Bin(*op, Box::new(l.map_terms(f)), Box::new(r.map_terms(f))),
        }
    }
}

pub(crate) fn map_atom<T, U>(a: &Atom<T>, f: &impl Fn(&T) -> U) -> Atom<U> {
    Atom { name: a.name.clone(), args: a.args.iter().map(f).collect() }
}

impl<T: Display> Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Fluent(a) => write!(f, "{a}"),
            Expr::Neg(e) => write!(f, "(- {e})"),
            Expr::Bin(op, l, r) => write!(f, "({} {l} {r})", op.symbol()),
        }
    }
}

/// One conjunct of a precondition or goal.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition<T> {
    Pos(Atom<T>),
    Neg(Atom<T>),
    Cmp(CmpOp, Expr<T>, Expr<T>),
}

impl<T> Condition<T> {
    pub fn map_terms<U>(&self, f: &impl Fn(&T) -> U) -> Condition<U> {
        match self {
            Condition::Pos(a) => Condition::Pos(map_atom(a, f)),
            Condition::Neg(a) => Condition::Neg(map_atom(a, f)),
            Condition::Cmp(op, l, r) => Condition::Cmp(*op, l.map_terms(f), r.map_terms(f)),
        }
    }
}

impl<T: Display> Display for Condition<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Pos(a) => write!(f, "{a}"),
            Condition::Neg(a) => write!(f, "(not {a})"),
            Condition::Cmp(op, l, r) => write!(f, "({} {l} {r})", op.symbol()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateOp {
    Increase,
    Decrease,
    Assign,
}

impl UpdateOp {
    pub fn keyword(self) -> &'static str {
        match self {
            UpdateOp::Increase => "increase",
            UpdateOp::Decrease => "decrease",
            UpdateOp::Assign => "assign",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Effect<T> {
    Add(Atom<T>),
    Del(Atom<T>),
    Update(UpdateOp, Atom<T>, Expr<T>),
}

impl<T> Effect<T> {
    pub fn map_terms<U>(&self, f: &impl Fn(&T) -> U) -> Effect<U> {
        match self {
            Effect::Add(a) => Effect::Add(map_atom(a, f)),
            Effect::Del(a) => Effect::Del(map_atom(a, f)),
            Effect::Update(op, a, e) => Effect::Update(*op, map_atom(a, f), e.map_terms(f)),
        }
    }
}

impl<T: Display> Display for Effect<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Effect::Add(a) => write!(f, "{a}"),
            Effect::Del(a) => write!(f, "(not {a})"),
            Effect::Update(op, a, e) => write!(f, "({} {a} {e})", op.keyword()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Requirement {
    Strips,
    Typing,
    Fluents,
    NumericFluents,
    NegativePreconditions,
}

impl Requirement {
    pub fn keyword(self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::Fluents => ":fluents",
            Requirement::NumericFluents => ":numeric-fluents",
            Requirement::NegativePreconditions => ":negative-preconditions",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            ":strips" => Requirement::Strips,
            ":typing" => Requirement::Typing,
            ":fluents" => Requirement::Fluents,
            ":numeric-fluents" => Requirement::NumericFluents,
            ":negative-preconditions" => Requirement::NegativePreconditions,
            _ => return None,
        })
    }
}

/// Predicate or function declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub precondition: Vec<Condition<Term>>,
    pub effects: Vec<Effect<Term>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<Requirement>,
    /// Declared types with their parent type.
    pub types: Vec<TypedName>,
    pub predicates: Vec<Signature>,
    pub functions: Vec<Signature>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&Signature> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&Signature> {
        self.functions.iter().find(|p| p.name == name)
    }

    pub fn has_type(&self, ty: &str) -> bool {
        ty == OBJECT || self.types.iter().any(|t| t.name == ty)
    }

    fn parent_of(&self, ty: &str) -> Option<&str> {
        self.types.iter().find(|t| t.name == ty).map(|t| t.ty.as_str())
    }

    /// True when `ty` equals `ancestor` or inherits from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == OBJECT {
            return true;
        }
        let mut current = ty;
        // Hierarchy depth is bounded by the number of declared types.
        for _ in 0..=self.types.len() {
            if current == ancestor {
                return true;
            }
            match self.parent_of(current) {
                Some(p) if p != current => current = p,
                _ => return false,
            }
        }
        false
    }

    /// Parameter types are compatible when one inherits from the other.
    pub fn types_compatible(&self, a: &str, b: &str) -> bool {
        self.is_subtype(a, b) || self.is_subtype(b, a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub minimize: bool,
    pub expr: Expr<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init_atoms: Vec<GroundAtom>,
    pub init_fluents: Vec<(GroundAtom, f64)>,
    pub goal: Vec<Condition<String>>,
    pub metric: Option<Metric>,
}

impl Problem {
    pub fn object_type(&self, name: &str) -> Option<&str> {
        self.objects.iter().find(|o| o.name == name).map(|o| o.ty.as_str())
    }

    /// Objects whose type is `ty` or a subtype of it, in declaration order.
    pub fn objects_of<'a>(&'a self, domain: &'a Domain, ty: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.objects
            .iter()
            .filter(move |o| domain.is_subtype(&o.ty, ty))
            .map(|o| o.name.as_str())
    }
}

fn write_typed_list(out: &mut String, items: &[TypedName], var_prefix: &str) {
    let mut i = 0;
    let mut first = true;
    while i < items.len() {
        let ty = &items[i].ty;
        let mut j = i;
        while j < items.len() && &items[j].ty == ty {
            if !first {
                out.push(' ');
            }
            first = false;
            out.push_str(var_prefix);
            out.push_str(&items[j].name);
            j += 1;
        }
        // Untyped trailing names default to `object`, so the suffix is only
        // needed for other types.
        if ty != OBJECT || j < items.len() {
            let _ = write!(out, " - {ty}");
        }
        i = j;
    }
}

fn write_signature(out: &mut String, sig: &Signature) {
    let _ = write!(out, "({}", sig.name);
    if !sig.params.is_empty() {
        out.push(' ');
        write_typed_list(out, &sig.params, "?");
    }
    out.push(')');
}

fn write_conjunction<T: Display>(out: &mut String, items: &[T], indent: &str) {
    out.push_str("(and");
    for item in items {
        let _ = write!(out, "\n{indent}  {item}");
    }
    out.push(')');
}

impl Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "(define (domain {})", self.name);
        if !self.requirements.is_empty() {
            out.push_str("  (:requirements");
            for r in &self.requirements {
                let _ = write!(out, " {}", r.keyword());
            }
            out.push_str(")\n");
        }
        if !self.types.is_empty() {
            out.push_str("  (:types ");
            write_typed_list(&mut out, &self.types, "");
            out.push_str(")\n");
        }
        if !self.predicates.is_empty() {
            out.push_str("  (:predicates");
            for p in &self.predicates {
                out.push_str("\n    ");
                write_signature(&mut out, p);
            }
            out.push_str(")\n");
        }
        if !self.functions.is_empty() {
            out.push_str("  (:functions");
            for p in &self.functions {
                out.push_str("\n    ");
                write_signature(&mut out, p);
            }
            out.push_str(")\n");
        }
        for a in &self.actions {
            let _ = writeln!(out, "  (:action {}", a.name);
            out.push_str("    :parameters (");
            write_typed_list(&mut out, &a.params, "?");
            out.push_str(")\n    :precondition ");
            write_conjunction(&mut out, &a.precondition, "    ");
            out.push_str("\n    :effect ");
            write_conjunction(&mut out, &a.effects, "    ");
            out.push_str(")\n");
        }
        out.push_str(")\n");
        f.write_str(&out)
    }
}

impl Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "(define (problem {})", self.name);
        let _ = writeln!(out, "  (:domain {})", self.domain);
        out.push_str("  (:objects ");
        write_typed_list(&mut out, &self.objects, "");
        out.push_str(")\n  (:init");
        for a in &self.init_atoms {
            let _ = write!(out, "\n    {a}");
        }
        for (a, v) in &self.init_fluents {
            let _ = write!(out, "\n    (= {a} {v})");
        }
        out.push_str(")\n  (:goal ");
        write_conjunction(&mut out, &self.goal, "  ");
        out.push_str(")\n");
        if let Some(m) = &self.metric {
            let _ = writeln!(out, "  (:metric {} {})", if m.minimize { "minimize" } else { "maximize" }, m.expr);
        }
        out.push_str(")\n");
        f.write_str(&out)
    }
}
