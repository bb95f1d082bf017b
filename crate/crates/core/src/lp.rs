//! Dense tableau simplex with primal and dual solutions.
//!
//! Small LPs only: the whole constraint matrix is materialized. Two phases,
//! Dantzig pricing with a switch to Bland's rule after a run of degenerate
//! pivots, deterministic tie-breaking throughout. Duals follow the convention
//! for a minimization problem: `>=` rows get nonnegative duals, `<=` rows
//! nonpositive, equalities free. Maximization flips both the objective and
//! the dual signs.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value in the original sense; meaningful only when optimal.
    pub objective: f64,
    /// Optimal primal point, one entry per original variable.
    pub primal: Vec<f64>,
    /// Optimal duals, one entry per constraint row.
    pub duals: Vec<f64>,
    /// Farkas-style direction: a dual ray over rows when infeasible, a primal
    /// ray over variables when unbounded.
    pub certificate: Option<Vec<f64>>,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("constraint {row} has {got} coefficients, expected {expected}")]
    DimensionMismatch {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("objective has {got} entries, expected {expected}")]
    ObjectiveMismatch { got: usize, expected: usize },
    #[error("non-finite coefficient in {place}")]
    NonFinite { place: String },
    #[error("problem too large: {nonzeros} nonzeros exceeds cap {cap}")]
    TooLarge { nonzeros: usize, cap: usize },
    #[error("numerical cycling: no progress within {0} pivots")]
    Cycling(usize),
}

pub const DEFAULT_NONZERO_CAP: usize = 200_000;
const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;
const REDUCED_COST_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const BLAND_TRIGGER: usize = 1_000;

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_lp_capped(lp, DEFAULT_NONZERO_CAP)
}

pub fn solve_lp_capped(lp: &LinearProgram, nonzero_cap: usize) -> Result<LpSolution, LpError> {
    validate(lp, nonzero_cap)?;
    Tableau::build(lp).solve(lp)
}

fn validate(lp: &LinearProgram, cap: usize) -> Result<(), LpError> {
    let n = lp.bounds.len();
    if lp.objective.len() != n {
        return Err(LpError::ObjectiveMismatch {
            got: lp.objective.len(),
            expected: n,
        });
    }
    if lp.objective.iter().any(|c| !c.is_finite()) {
        return Err(LpError::NonFinite {
            place: "objective".into(),
        });
    }
    let mut nonzeros = 0usize;
    for (row, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(LpError::DimensionMismatch {
                row,
                got: c.coeffs.len(),
                expected: n,
            });
        }
        if c.coeffs.iter().any(|x| !x.is_finite()) || !c.rhs.is_finite() {
            return Err(LpError::NonFinite {
                place: format!("constraint {row}"),
            });
        }
        nonzeros += c.coeffs.iter().filter(|&&x| x != 0.0).count();
    }
    if nonzeros > cap {
        return Err(LpError::TooLarge { nonzeros, cap });
    }
    Ok(())
}

/// Column roles in standard form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Col {
    /// Original variable (positive part).
    Plus(usize),
    /// Negative part of a free original variable.
    Minus(usize),
    /// Slack or surplus of a row.
    Slack(usize),
    /// Artificial of a row.
    Artificial(usize),
}

struct Tableau {
    /// `rows x (cols + 1)`; last column is the rhs.
    a: Vec<Vec<f64>>,
    cols: Vec<Col>,
    basis: Vec<usize>,
    /// Rows whose sign was flipped to make the rhs nonnegative.
    flipped: Vec<bool>,
    /// First artificial column index.
    art_start: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let rows = lp.constraints.len();
        let mut cols = Vec::new();
        for (j, b) in lp.bounds.iter().enumerate() {
            cols.push(Col::Plus(j));
            if *b == VarBound::Free {
                cols.push(Col::Minus(j));
            }
        }
        let mut flipped = vec![false; rows];
        for (i, c) in lp.constraints.iter().enumerate() {
            flipped[i] = c.rhs < 0.0;
            if c.relation != Relation::Eq {
                cols.push(Col::Slack(i));
            }
        }
        let art_start = cols.len();
        for i in 0..rows {
            cols.push(Col::Artificial(i));
        }

        let sign = |i: usize| if flipped[i] { -1.0 } else { 1.0 };
        let mut a = vec![vec![0.0; cols.len() + 1]; rows];
        for (i, c) in lp.constraints.iter().enumerate() {
            for (j, col) in cols.iter().enumerate() {
                a[i][j] = match *col {
                    Col::Plus(v) => sign(i) * c.coeffs[v],
                    Col::Minus(v) => -sign(i) * c.coeffs[v],
                    Col::Slack(r) if r == i => {
                        let s = match c.relation {
                            Relation::Le => 1.0,
                            Relation::Ge => -1.0,
                            Relation::Eq => unreachable!(),
                        };
                        sign(i) * s
                    }
                    Col::Artificial(r) if r == i => 1.0,
                    _ => 0.0,
                };
            }
            let rhs = cols.len();
            a[i][rhs] = sign(i) * c.rhs;
        }

        let basis = (art_start..cols.len()).collect();
        Tableau {
            a,
            cols,
            basis,
            flipped,
            art_start,
        }
    }

    fn rows(&self) -> usize {
        self.a.len()
    }

    fn ncols(&self) -> usize {
        self.cols.len()
    }

    /// Runs the simplex on the current basis for the given column costs.
    /// Returns `None` when optimal, or the unbounded entering column.
    fn run(&mut self, costs: &[f64], pivot_cap: &mut usize) -> Result<Option<usize>, LpError> {
        let rhs = self.ncols();
        let mut degenerate_run = 0usize;
        loop {
            // Reduced costs from the current basis: r = c - y^T A with
            // y^T = c_B B^{-1}, computed densely each pass. The tableau body
            // already stores B^{-1} A, so r_j = c_j - sum_i c_{B_i} a_{ij}.
            let cb: Vec<f64> = self.basis.iter().map(|&j| costs[j]).collect();
            let mut entering = None;
            let mut best = -REDUCED_COST_TOL;
            let bland = degenerate_run >= BLAND_TRIGGER;
            for j in 0..self.ncols() {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = costs[j];
                for i in 0..self.rows() {
                    if cb[i] != 0.0 {
                        r -= cb[i] * self.a[i][j];
                    }
                }
                if bland {
                    if r < -REDUCED_COST_TOL {
                        entering = Some(j);
                        break;
                    }
                } else if r < best {
                    best = r;
                    entering = Some(j);
                }
            }
            let Some(enter) = entering else {
                return Ok(None);
            };

            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.rows() {
                let coef = self.a[i][enter];
                if coef > PIVOT_TOL {
                    let ratio = self.a[i][rhs] / coef;
                    let better = ratio < best_ratio - 1e-12
                        || (ratio < best_ratio + 1e-12
                            && leave.map_or(true, |l| {
                                self.basis[i] < self.basis[l]
                            }));
                    if better {
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(leave) = leave else {
                return Ok(Some(enter));
            };

            if best_ratio.abs() <= DEGENERATE_STEP {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            if *pivot_cap == 0 {
                return Err(LpError::Cycling(self.rows() * self.ncols()));
            }
            *pivot_cap -= 1;
            self.pivot(leave, enter);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let rhs = self.ncols();
        let p = self.a[row][col];
        for j in 0..=rhs {
            self.a[row][j] /= p;
        }
        self.a[row][col] = 1.0;
        for i in 0..self.rows() {
            if i == row {
                continue;
            }
            let f = self.a[i][col];
            if f != 0.0 {
                for j in 0..=rhs {
                    self.a[i][j] -= f * self.a[row][j];
                }
                self.a[i][col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Duals for `costs` at the current basis, one per row, in the flipped
    /// orientation: `y_i = c_B^T B^{-1} e_i`, read off the artificial columns.
    fn duals(&self, costs: &[f64]) -> Vec<f64> {
        let cb: Vec<f64> = self.basis.iter().map(|&j| costs[j]).collect();
        (0..self.rows())
            .map(|i| {
                let col = self.art_start + i;
                (0..self.rows()).map(|k| cb[k] * self.a[k][col]).sum()
            })
            .collect()
    }

    fn solve(mut self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        let rows = self.rows();
        let ncols = self.ncols();
        let pivot_budget = 10 * (rows + ncols) * (rows + ncols);
        let mut budget = pivot_budget;

        // Phase one: minimize the artificial mass.
        let mut phase1 = vec![0.0; ncols];
        for j in self.art_start..ncols {
            phase1[j] = 1.0;
        }
        let unbounded = self.run(&phase1, &mut budget)?;
        debug_assert!(unbounded.is_none(), "phase one is bounded below by zero");
        let infeas: f64 = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &j)| j >= self.art_start)
            .map(|(i, _)| self.a[i][ncols])
            .sum();
        let scale = 1.0 + lp.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max);
        if infeas > FEAS_TOL * scale {
            // The phase-one duals certify infeasibility: y^T b > 0 while
            // y^T A <= 0 over the variable cone.
            let certificate = self.unflip(self.duals(&phase1));
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: f64::NAN,
                primal: vec![],
                duals: vec![],
                certificate: Some(certificate),
            });
        }

        // Pivot lingering artificials out of the basis where possible; rows
        // that cannot be cleared are redundant and stay pinned at zero.
        for i in 0..rows {
            if self.basis[i] < self.art_start {
                continue;
            }
            let pivot_col = (0..self.art_start)
                .find(|&j| !self.basis.contains(&j) && self.a[i][j].abs() > 1e-7);
            if let Some(j) = pivot_col {
                self.pivot(i, j);
            }
        }

        // Phase two on the real objective.
        let sense = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut costs = vec![0.0; ncols];
        for (j, col) in self.cols.iter().enumerate() {
            costs[j] = match *col {
                Col::Plus(v) => sense * lp.objective[v],
                Col::Minus(v) => -sense * lp.objective[v],
                _ => 0.0,
            };
        }
        // Forbid re-entering artificials.
        for j in self.art_start..ncols {
            if !self.basis.contains(&j) {
                costs[j] = f64::INFINITY;
            }
        }
        let verdict = self.run(&costs, &mut budget);
        for c in costs.iter_mut() {
            if !c.is_finite() {
                *c = 0.0;
            }
        }
        match verdict? {
            Some(enter) => {
                let mut ray = vec![0.0; lp.bounds.len()];
                let apply = |ray: &mut Vec<f64>, col: Col, w: f64| match col {
                    Col::Plus(v) => ray[v] += w,
                    Col::Minus(v) => ray[v] -= w,
                    _ => {}
                };
                apply(&mut ray, self.cols[enter], 1.0);
                for i in 0..rows {
                    let w = -self.a[i][enter];
                    if w != 0.0 {
                        apply(&mut ray, self.cols[self.basis[i]], w);
                    }
                }
                Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    objective: match lp.sense {
                        Sense::Minimize => f64::NEG_INFINITY,
                        Sense::Maximize => f64::INFINITY,
                    },
                    primal: vec![],
                    duals: vec![],
                    certificate: Some(ray),
                })
            }
            None => {
                let mut primal = vec![0.0; lp.bounds.len()];
                for (i, &j) in self.basis.iter().enumerate() {
                    let v = self.a[i][ncols];
                    match self.cols[j] {
                        Col::Plus(x) => primal[x] += v,
                        Col::Minus(x) => primal[x] -= v,
                        _ => {}
                    }
                }
                let objective: f64 = lp
                    .objective
                    .iter()
                    .zip(&primal)
                    .map(|(c, x)| c * x)
                    .sum();
                let duals = self.unflip(
                    self.duals(&costs)
                        .into_iter()
                        .map(|y| sense * y)
                        .collect(),
                );
                Ok(LpSolution {
                    status: LpStatus::Optimal,
                    objective,
                    primal,
                    duals,
                    certificate: None,
                })
            }
        }
    }

    /// Maps row values computed in the flipped orientation back to the
    /// caller's row orientation.
    fn unflip(&self, mut values: Vec<f64>) -> Vec<f64> {
        for (i, v) in values.iter_mut().enumerate() {
            if self.flipped[i] {
                *v = -*v;
            }
        }
        values
    }
}

impl LpSolution {
    /// Primal feasibility, dual sign feasibility, and strong duality at the
    /// returned point, with tolerances scaled by the data magnitude.
    pub fn check_certificates(&self, lp: &LinearProgram) -> Result<(), String> {
        if self.status != LpStatus::Optimal {
            return Ok(());
        }
        let xmax = self.primal.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for (i, c) in lp.constraints.iter().enumerate() {
            let lhs: f64 = c.coeffs.iter().zip(&self.primal).map(|(a, x)| a * x).sum();
            let scale: f64 = c.coeffs.iter().map(|a| a.abs()).sum::<f64>() * xmax + c.rhs.abs() + 1.0;
            let residual = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            if residual > 1e-9 * scale {
                return Err(format!("row {i}: residual {residual}"));
            }
            let y = self.duals[i];
            let sense = match lp.sense {
                Sense::Minimize => 1.0,
                Sense::Maximize => -1.0,
            };
            let bad_sign = match c.relation {
                Relation::Le => sense * y > 1e-7 * scale,
                Relation::Ge => sense * y < -1e-7 * scale,
                Relation::Eq => false,
            };
            if bad_sign {
                return Err(format!("row {i}: dual {y} has wrong sign"));
            }
        }
        let dual_obj: f64 = lp
            .constraints
            .iter()
            .zip(&self.duals)
            .map(|(c, y)| c.rhs * y)
            .sum();
        let gap = (dual_obj - self.objective).abs();
        if gap > 1e-7 * (1.0 + self.objective.abs()) {
            return Err(format!(
                "duality gap {gap}: primal {} vs dual {dual_obj}",
                self.objective
            ));
        }
        Ok(())
    }
}
