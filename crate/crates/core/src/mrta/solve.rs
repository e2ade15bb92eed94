use super::{apply_constraints, Assignment, ConstraintSet, MrtaError, Requirement, SkillMatrix, Status, COST_TOLERANCE};

/// Largest robot count accepted by [`brute_force`].
pub const BRUTE_FORCE_LIMIT: usize = 20;

const EPS: f64 = COST_TOLERANCE;

struct Prepared {
    rows: Vec<Vec<f64>>,
    need: Vec<f64>,
    c: Vec<f64>,
    fixed: Vec<Option<bool>>,
    max_team: Option<usize>,
}

fn prepare(q: &SkillMatrix, y: &Requirement, c: &[f64], constraints: &ConstraintSet, subtask: &str) -> Result<Prepared, MrtaError> {
    let n = q.robots().len();
    if c.len() != n {
        return Err(MrtaError::DimensionMismatch(format!("{} costs for {n} robots", c.len())));
    }
    if let Some(bad) = c.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(MrtaError::InvalidInput(format!("cost {bad} must be finite and non-negative")));
    }
    let (rows, need) = q.aligned(y)?;
    let mut fixed = vec![None; n];
    for f in apply_constraints(constraints, subtask)? {
        let i = q.robot_index(&f.robot).ok_or_else(|| MrtaError::UnknownRobot(f.robot.clone()))?;
        fixed[i] = Some(f.value);
    }
    Ok(Prepared { rows, need, c: c.to_vec(), fixed, max_team: constraints.max_team_size() })
}

fn covers(p: &Prepared, x: &[bool]) -> bool {
    p.rows.iter().zip(&p.need).all(|(row, need)| {
        let got: f64 = row.iter().zip(x).filter(|(_, on)| **on).map(|(v, _)| v).sum();
        got >= need - EPS
    })
}

fn objective(c: &[f64], x: &[bool]) -> (f64, f64) {
    c.iter().zip(x).filter(|(_, on)| **on).fold((0.0, 0.0), |(m, s), (v, _)| (f64::max(m, *v), s + v))
}

fn optimal(robots: &[String], c: &[f64], x: Vec<bool>) -> Assignment {
    let (max_cost, sum_cost) = objective(c, &x);
    Assignment { status: Status::Optimal, robots: robots.to_vec(), x, max_cost, sum_cost }
}

struct Search<'a> {
    p: &'a Prepared,
    allowed: Vec<bool>,
    /// `suffix[i][u]`: skill `u` still obtainable from robots `i..`.
    suffix: Vec<Vec<f64>>,
    req_cost: Vec<f64>,
    req_count: Vec<usize>,
    x: Vec<bool>,
    cover: Vec<f64>,
    best: Option<(f64, Vec<bool>)>,
}

impl Search<'_> {
    fn run(p: &Prepared, allowed: Vec<bool>) -> Option<Vec<bool>> {
        let n = p.c.len();
        let mut suffix = vec![vec![0.0; p.need.len()]; n + 1];
        let mut req_cost = vec![0.0; n + 1];
        let mut req_count = vec![0; n + 1];
        for i in (0..n).rev() {
            for u in 0..p.need.len() {
                suffix[i][u] = suffix[i + 1][u] + if allowed[i] { p.rows[u][i] } else { 0.0 };
            }
            let req = p.fixed[i] == Some(true);
            req_cost[i] = req_cost[i + 1] + if req { p.c[i] } else { 0.0 };
            req_count[i] = req_count[i + 1] + usize::from(req);
        }
        let mut s = Search {
            p,
            allowed,
            suffix,
            req_cost,
            req_count,
            x: vec![false; n],
            cover: vec![0.0; p.need.len()],
            best: None,
        };
        s.go(0, 0.0, 0);
        s.best.map(|(_, x)| x)
    }

    // Branches visit x_i = 0 before x_i = 1, so solutions arrive in
    // lexicographic order and ties keep the first one found.
    fn go(&mut self, i: usize, sum: f64, count: usize) {
        if let Some((best, _)) = &self.best {
            if sum + self.req_cost[i] >= best - EPS {
                return;
            }
        }
        if self.p.max_team.is_some_and(|k| count + self.req_count[i] > k) {
            return;
        }
        let reachable = self.cover.iter().zip(&self.suffix[i]).zip(&self.p.need).all(|((c, s), need)| c + s >= need - EPS);
        if !reachable {
            return;
        }
        if i == self.x.len() {
            self.best = Some((sum, self.x.clone()));
            return;
        }
        let can_skip = self.p.fixed[i] != Some(true);
        let can_take = self.allowed[i];
        if can_skip {
            self.go(i + 1, sum, count);
        }
        if can_take {
            self.x[i] = true;
            for (u, c) in self.cover.iter_mut().enumerate() {
                *c += self.p.rows[u][i];
            }
            self.go(i + 1, sum + self.p.c[i], count + 1);
            for (u, c) in self.cover.iter_mut().enumerate() {
                *c -= self.p.rows[u][i];
            }
            self.x[i] = false;
        }
    }
}

/// Exact lexicographic optimum: the smallest largest-member cost, then the
/// smallest total, then the lexicographically smallest vector in column order.
///
/// Candidate max-cost thresholds are tried in ascending order; the first one
/// whose admissible robots can cover the requirement is optimal for the
/// first objective, and a branch-and-bound over those robots settles the
/// second.
pub fn solve(q: &SkillMatrix, y: &Requirement, c: &[f64], constraints: &ConstraintSet, subtask: &str) -> Result<Assignment, MrtaError> {
    let p = prepare(q, y, c, constraints, subtask)?;
    let floor = p.c.iter().zip(&p.fixed).filter(|(_, f)| **f == Some(true)).map(|(v, _)| *v).fold(0.0, f64::max);
    let mut thresholds: Vec<f64> = std::iter::once(0.0)
        .chain(p.c.iter().zip(&p.fixed).filter(|(_, f)| **f != Some(false)).map(|(v, _)| *v))
        .filter(|t| *t >= floor - EPS)
        .collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup_by(|a, b| (*a - *b).abs() <= EPS);
    for t in thresholds {
        let allowed: Vec<bool> = p.c.iter().zip(&p.fixed).map(|(v, f)| *f != Some(false) && *v <= t + EPS).collect();
        if p.fixed.iter().zip(&allowed).any(|(f, a)| *f == Some(true) && !a) {
            continue;
        }
        if !covers(&p, &allowed) {
            continue;
        }
        if let Some(x) = Search::run(&p, allowed) {
            return Ok(optimal(q.robots(), &p.c, x));
        }
    }
    Ok(Assignment::infeasible(q.robots()))
}

/// Enumerates all `2^N` vectors in lexicographic order. Same contract and
/// tie-break as [`solve`].
pub fn brute_force(q: &SkillMatrix, y: &Requirement, c: &[f64], constraints: &ConstraintSet, subtask: &str) -> Result<Assignment, MrtaError> {
    let n = q.robots().len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(MrtaError::TooLarge { n });
    }
    let p = prepare(q, y, c, constraints, subtask)?;
    let mut best: Option<((f64, f64), Vec<bool>)> = None;
    for m in 0u64..(1u64 << n) {
        let x: Vec<bool> = (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect();
        if x.iter().zip(&p.fixed).any(|(v, f)| f.is_some_and(|f| f != *v)) {
            continue;
        }
        if p.max_team.is_some_and(|k| x.iter().filter(|v| **v).count() > k) {
            continue;
        }
        if !covers(&p, &x) {
            continue;
        }
        let (mx, sm) = objective(&p.c, &x);
        let better = match &best {
            None => true,
            Some(((bm, bs), _)) => mx < bm - EPS || ((mx - bm).abs() <= EPS && sm < bs - EPS),
        };
        if better {
            best = Some(((mx, sm), x));
        }
    }
    Ok(match best {
        Some((_, x)) => optimal(q.robots(), &p.c, x),
        None => Assignment::infeasible(q.robots()),
    })
}
