//! A small dense linear-programming solver with exact primal and dual
//! extraction.
//!
//! Two-phase simplex on a dense tableau with Bland's anti-cycling rule as the
//! deterministic tie-breaker. Problems here are tiny (a few dozen rows), so
//! the tableau is kept dense and the dual vector is recovered at the end by
//! solving `B^T y = c_B` against a saved copy of the equality-form columns.
//! Resolving the identical problem twice yields bit-identical solutions.

use crate::math::pairwise_sum;
use crate::{Error, Result};

/// Feasibility tolerance for residual checks.
pub const FEAS_TOL: f64 = 1e-9;
/// Pivot magnitude below which a column entry counts as zero.
pub const PIVOT_TOL: f64 = 1e-11;

/// Row sense of one constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

/// `minimize c.x  subject to  A x (sense) b,  x >= lower_bounds`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub lower_bounds: Vec<f64>,
}

impl LpProblem {
    /// Problem with the default zero lower bounds.
    pub fn new(objective: Vec<f64>, rows: Vec<Vec<f64>>, senses: Vec<Sense>, rhs: Vec<f64>) -> Self {
        let n = objective.len();
        Self { objective, rows, senses, rhs, lower_bounds: vec![0.0; n] }
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        let m = self.rows.len();
        if self.senses.len() != m || self.rhs.len() != m {
            return Err(Error::Parameter(format!(
                "row count mismatch: {} rows, {} senses, {} rhs entries",
                m,
                self.senses.len(),
                self.rhs.len()
            )));
        }
        if self.lower_bounds.len() != n {
            return Err(Error::Parameter(format!(
                "lower bound count {} does not match {} variables",
                self.lower_bounds.len(),
                n
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parameter(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.len()
                )));
            }
        }
        let finite = self
            .objective
            .iter()
            .chain(self.rhs.iter())
            .chain(self.lower_bounds.iter())
            .chain(self.rows.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Parameter("all problem entries must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output. `primal` and `dual` are empty unless `status == Optimal`;
/// `dual` carries one multiplier per original constraint row.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    fn status_only(status: LpStatus, iterations: usize) -> Self {
        Self { status, primal: Vec::new(), dual: Vec::new(), objective: f64::NAN, iterations }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>, // m x (cols + 1), last entry is rhs
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = 1.0 / self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        // Guard against residue in the pivot column itself.
        self.rows[row][col] = 1.0;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor == 0.0 {
                continue;
            }
            let (pivot_row, target) = if i < row {
                let (head, tail) = self.rows.split_at_mut(row);
                (&tail[0], &mut head[i])
            } else {
                let (head, tail) = self.rows.split_at_mut(i);
                (&head[row], &mut tail[0])
            };
            for (t, p) in target.iter_mut().zip(pivot_row.iter()) {
                *t -= factor * *p;
            }
            target[col] = 0.0;
        }
        self.basis[row] = col;
    }

    fn rhs(&self, row: usize) -> f64 {
        self.rows[row][self.cols]
    }
}

/// Solves the problem. Returns `Err` only for malformed input or numerical
/// breakdown; infeasible and unbounded problems are reported in the status.
pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.objective.len();
    let m = problem.rows.len();

    // Shift x = lb + x' so every variable has a zero lower bound.
    let shifted_rhs: Vec<f64> = (0..m)
        .map(|i| {
            let dot: Vec<f64> = (0..n).map(|j| problem.rows[i][j] * problem.lower_bounds[j]).collect();
            problem.rhs[i] - pairwise_sum(&dot)
        })
        .collect();

    if m == 0 {
        return solve_unconstrained(problem);
    }

    // Normalize to nonnegative rhs, tracking flips for dual recovery.
    let mut rows: Vec<Vec<f64>> = problem.rows.clone();
    let mut senses = problem.senses.clone();
    let mut rhs = shifted_rhs;
    let mut flipped = vec![false; m];
    for i in 0..m {
        if rhs[i] < 0.0 {
            for v in rows[i].iter_mut() {
                *v = -*v;
            }
            rhs[i] = -rhs[i];
            senses[i] = match senses[i] {
                Sense::Ge => Sense::Le,
                Sense::Le => Sense::Ge,
                Sense::Eq => Sense::Eq,
            };
            flipped[i] = true;
        }
    }

    // Equality form: one slack/surplus column per inequality row, then one
    // artificial column per Ge/Eq row.
    let n_slack = senses.iter().filter(|s| **s != Sense::Eq).count();
    let n_art = senses.iter().filter(|s| **s != Sense::Le).count();
    let art_start = n + n_slack;
    let cols = n + n_slack + n_art;

    let mut tab = Tableau {
        rows: vec![vec![0.0; cols + 1]; m],
        basis: vec![usize::MAX; m],
        cols,
    };
    let mut slack_idx = 0;
    let mut art_idx = 0;
    for i in 0..m {
        tab.rows[i][..n].copy_from_slice(&rows[i]);
        tab.rows[i][cols] = rhs[i];
        match senses[i] {
            Sense::Le => {
                tab.rows[i][n + slack_idx] = 1.0;
                tab.basis[i] = n + slack_idx;
                slack_idx += 1;
            }
            Sense::Ge => {
                tab.rows[i][n + slack_idx] = -1.0;
                slack_idx += 1;
                tab.rows[i][art_start + art_idx] = 1.0;
                tab.basis[i] = art_start + art_idx;
                art_idx += 1;
            }
            Sense::Eq => {
                tab.rows[i][art_start + art_idx] = 1.0;
                tab.basis[i] = art_start + art_idx;
                art_idx += 1;
            }
        }
    }
    // Copy of the equality-form matrix for dual extraction at the end.
    let equality_form: Vec<Vec<f64>> = tab.rows.iter().map(|r| r[..cols].to_vec()).collect();

    let cap = 50 * (m + cols);
    let mut iterations = 0usize;

    // Phase 1: minimize the sum of artificial variables.
    let phase1_cost: Vec<f64> = (0..cols).map(|j| if j >= art_start { 1.0 } else { 0.0 }).collect();
    run_simplex(&mut tab, &phase1_cost, cols, cap, &mut iterations)?;
    let phase1_obj: f64 = (0..m)
        .map(|i| if tab.basis[i] >= art_start { tab.rhs(i) } else { 0.0 })
        .sum();
    if phase1_obj > FEAS_TOL {
        return Ok(LpSolution::status_only(LpStatus::Infeasible, iterations));
    }

    // Drive remaining artificials out of the basis where a real pivot exists;
    // rows without one are redundant and keep a zero-valued artificial.
    for i in 0..m {
        if tab.basis[i] >= art_start {
            if let Some(col) = (0..art_start).find(|&j| tab.rows[i][j].abs() > PIVOT_TOL) {
                tab.pivot(i, col);
                iterations += 1;
            }
        }
    }

    // Phase 2 on the real objective; artificial columns are banned.
    let mut phase2_cost = vec![0.0; cols];
    phase2_cost[..n].copy_from_slice(&problem.objective);
    let unbounded = run_simplex(&mut tab, &phase2_cost, art_start, cap, &mut iterations)?;
    if unbounded {
        return Ok(LpSolution::status_only(LpStatus::Unbounded, iterations));
    }

    // Primal in original coordinates.
    let mut primal = problem.lower_bounds.clone();
    for i in 0..m {
        if tab.basis[i] < n {
            primal[tab.basis[i]] += tab.rhs(i);
        }
    }
    let obj_terms: Vec<f64> = (0..n).map(|j| problem.objective[j] * primal[j]).collect();
    let objective = pairwise_sum(&obj_terms);

    // Dual from B^T y = c_B against the saved equality-form columns.
    let mut bt = vec![vec![0.0; m]; m];
    let mut cb = vec![0.0; m];
    for (i, &b) in tab.basis.iter().enumerate() {
        for r in 0..m {
            bt[i][r] = equality_form[r][b];
        }
        cb[i] = phase2_cost[b];
    }
    let mut dual = solve_dense(&mut bt, &mut cb).ok_or_else(|| Error::SolverFailure {
        iterations,
        detail: "singular basis while extracting duals".into(),
    })?;
    for i in 0..m {
        if flipped[i] {
            dual[i] = -dual[i];
        }
    }

    let solution = LpSolution { status: LpStatus::Optimal, primal, dual, objective, iterations };
    verify_optimal(problem, &solution)?;
    Ok(solution)
}

/// Bland's rule simplex loop over the allowed column range. Returns true if
/// the problem is unbounded in the current phase.
fn run_simplex(
    tab: &mut Tableau,
    cost: &[f64],
    allowed_cols: usize,
    cap: usize,
    iterations: &mut usize,
) -> Result<bool> {
    let m = tab.rows.len();
    loop {
        // Reduced costs from scratch: z_j = c_j - c_B . B^{-1} A_j. The
        // tableau body already holds B^{-1} A, so this is a short dot
        // product per column; recomputing avoids drift in a carried z-row.
        let mut entering = None;
        for j in 0..allowed_cols {
            if tab.basis.contains(&j) {
                continue;
            }
            let mut z = cost[j];
            for i in 0..m {
                let cb = cost[tab.basis[i]];
                if cb != 0.0 {
                    z -= cb * tab.rows[i][j];
                }
            }
            if z < -PIVOT_TOL {
                entering = Some(j);
                break; // Bland: first eligible index.
            }
        }
        let Some(col) = entering else {
            return Ok(false);
        };

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = tab.rows[i][col];
            if coef > PIVOT_TOL {
                let ratio = tab.rhs(i) / coef;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - PIVOT_TOL
                            || (ratio < lr + PIVOT_TOL && tab.basis[i] < tab.basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Ok(true);
        };

        tab.pivot(row, col);
        *iterations += 1;
        if *iterations > cap {
            return Err(Error::SolverFailure {
                iterations: *iterations,
                detail: format!("iteration cap {cap} exceeded"),
            });
        }
    }
}

fn solve_unconstrained(problem: &LpProblem) -> Result<LpSolution> {
    if problem.objective.iter().any(|&c| c < -PIVOT_TOL) {
        return Ok(LpSolution::status_only(LpStatus::Unbounded, 0));
    }
    let primal = problem.lower_bounds.clone();
    let terms: Vec<f64> = primal.iter().zip(&problem.objective).map(|(x, c)| x * c).collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual: Vec::new(),
        objective: pairwise_sum(&terms),
        iterations: 0,
    })
}

/// Gaussian elimination with partial pivoting; consumes its inputs.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("finite matrix")
        })?;
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

/// Residual checks promised for optimal solutions: primal feasibility, dual
/// feasibility, complementary slackness, and a matching dual objective.
fn verify_optimal(problem: &LpProblem, sol: &LpSolution) -> Result<()> {
    let n = problem.objective.len();
    let m = problem.rows.len();
    let scale = 1.0 + sol.objective.abs();
    let fail = |what: String| Error::SolverFailure { iterations: sol.iterations, detail: what };

    let mut reduced = problem.objective.clone();
    for i in 0..m {
        for j in 0..n {
            reduced[j] -= sol.dual[i] * problem.rows[i][j];
        }
    }

    for i in 0..m {
        let terms: Vec<f64> = (0..n).map(|j| problem.rows[i][j] * sol.primal[j]).collect();
        let v = pairwise_sum(&terms);
        let slack = v - problem.rhs[i];
        let ok = match problem.senses[i] {
            Sense::Ge => slack >= -FEAS_TOL * scale,
            Sense::Le => slack <= FEAS_TOL * scale,
            Sense::Eq => slack.abs() <= FEAS_TOL * scale,
        };
        if !ok {
            return Err(fail(format!("primal residual {slack:.3e} on row {i}")));
        }
        let sign_ok = match problem.senses[i] {
            Sense::Ge => sol.dual[i] >= -FEAS_TOL * scale,
            Sense::Le => sol.dual[i] <= FEAS_TOL * scale,
            Sense::Eq => true,
        };
        if !sign_ok {
            return Err(fail(format!("dual sign {:.3e} on row {i}", sol.dual[i])));
        }
        if (sol.dual[i] * slack).abs() > FEAS_TOL * scale.max(sol.dual[i].abs()) {
            return Err(fail(format!("complementary slackness gap on row {i}")));
        }
    }
    for j in 0..n {
        if reduced[j] < -FEAS_TOL * scale {
            return Err(fail(format!("dual residual {:.3e} on column {j}", reduced[j])));
        }
        let above = sol.primal[j] - problem.lower_bounds[j];
        if (reduced[j] * above).abs() > FEAS_TOL * scale.max(above.abs()) {
            return Err(fail(format!("complementary slackness gap on column {j}")));
        }
    }

    let dual_terms: Vec<f64> = (0..m)
        .map(|i| problem.rhs[i] * sol.dual[i])
        .chain((0..n).map(|j| reduced[j] * problem.lower_bounds[j]))
        .collect();
    let dual_obj = pairwise_sum(&dual_terms);
    if (dual_obj - sol.objective).abs() > FEAS_TOL * scale {
        return Err(fail(format!(
            "duality gap {:.3e} between {} and {}",
            dual_obj - sol.objective,
            sol.objective,
            dual_obj
        )));
    }
    Ok(())
}

/// Dual objective value of an optimal solution (for duality assertions).
pub fn dual_objective(problem: &LpProblem, sol: &LpSolution) -> f64 {
    let n = problem.objective.len();
    let m = problem.rows.len();
    let mut reduced = problem.objective.clone();
    for i in 0..m {
        for j in 0..n {
            reduced[j] -= sol.dual[i] * problem.rows[i][j];
        }
    }
    let terms: Vec<f64> = (0..m)
        .map(|i| problem.rhs[i] * sol.dual[i])
        .chain((0..n).map(|j| reduced[j] * problem.lower_bounds[j]))
        .collect();
    pairwise_sum(&terms)
}
