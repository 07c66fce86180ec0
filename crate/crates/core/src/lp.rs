//! Dense linear programming for the precoder designs.
//!
//! Problems take the form: maximize `cᵀv` subject to `M v ≤ b` and
//! elementwise bounds `lb ≤ v ≤ ub` (entries of the bounds may be infinite).
//! The solver is a two-phase primal simplex that handles the box bounds
//! structurally (no extra rows) and pivots by Bland's smallest-index rule,
//! which guarantees termination and — together with the fixed scan orders —
//! makes every solve bit-for-bit deterministic. Problem sizes in this crate
//! are a few dozen to a few thousand variables, which a dense tableau
//! handles comfortably.
//!
//! Degenerate, infeasible, and unbounded inputs are all reported
//! explicitly; tolerance knobs live in [`SolverSettings`]. When the
//! iteration cap is hit the solver returns a numerical-failure error rather
//! than a silently wrong answer.

pub mod oracle;

use std::io::Write;

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A linear program in inequality form: maximize `objective · v` subject to
/// `ineq_matrix · v ≤ ineq_rhs` and `lower_bounds ≤ v ≤ upper_bounds`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<T> {
    /// Objective coefficients `c`, one per variable.
    pub objective: Array1<T>,
    /// Inequality coefficients `M`, one row per constraint.
    pub ineq_matrix: ndarray::Array2<T>,
    /// Right-hand sides `b`, one per row.
    pub ineq_rhs: Array1<T>,
    /// Per-variable lower bounds; `-inf` leaves a variable open below.
    pub lower_bounds: Array1<T>,
    /// Per-variable upper bounds; `+inf` leaves a variable open above.
    pub upper_bounds: Array1<T>,
}

impl<T: Scalar> LpProblem<T> {
    /// Number of variables.
    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    /// Number of inequality rows.
    pub fn n_rows(&self) -> usize {
        self.ineq_rhs.len()
    }

    /// Checks shapes, finiteness, and bound ordering.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        let m = self.n_rows();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "LP needs at least one variable".into(),
            ));
        }
        if self.ineq_matrix.dim() != (m, n) {
            return Err(Error::Dimension(format!(
                "matrix is {:?}, expected ({m}, {n})",
                self.ineq_matrix.dim()
            )));
        }
        if self.lower_bounds.len() != n || self.upper_bounds.len() != n {
            return Err(Error::Dimension(format!(
                "bounds must have length {n}, got {} and {}",
                self.lower_bounds.len(),
                self.upper_bounds.len()
            )));
        }
        if self.objective.iter().any(|v| !v.is_finite())
            || self.ineq_matrix.iter().any(|v| !v.is_finite())
            || self.ineq_rhs.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument(
                "objective, matrix, and rhs entries must be finite".into(),
            ));
        }
        for j in 0..n {
            let (lo, hi) = (self.lower_bounds[j], self.upper_bounds[j]);
            if lo.is_nan() || hi.is_nan() || lo == T::infinity() || hi == T::neg_infinity() {
                return Err(Error::InvalidArgument(format!(
                    "bounds of variable {j} are not a valid interval"
                )));
            }
            if lo > hi {
                return Err(Error::InvalidArgument(format!(
                    "lower bound {lo} of variable {j} exceeds upper bound {hi}"
                )));
            }
        }
        Ok(())
    }

    /// Streams a plain-text dump: header comments, then one line per row
    /// with the coefficients followed by the right-hand side.
    pub fn write_debug_dump<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "# maximize c.v  subject to  M.v <= b,  lb <= v <= ub")?;
        writeln!(out, "# vars: {}  rows: {}", self.n_vars(), self.n_rows())?;
        writeln!(out, "# c: {}", join_scalars(self.objective.iter()))?;
        writeln!(out, "# lb: {}", join_scalars(self.lower_bounds.iter()))?;
        writeln!(out, "# ub: {}", join_scalars(self.upper_bounds.iter()))?;
        for (row, rhs) in self
            .ineq_matrix
            .rows()
            .into_iter()
            .zip(self.ineq_rhs.iter())
        {
            writeln!(out, "{} {}", join_scalars(row.iter()), rhs)?;
        }
        Ok(())
    }
}

fn join_scalars<'a, T: Scalar>(values: impl Iterator<Item = &'a T>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// A certified optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct LpOptimum<T> {
    /// Optimal variable values.
    pub values: Array1<T>,
    /// Objective at the optimum.
    pub objective_value: T,
    /// One multiplier per inequality row (nonnegative, zero on slack rows).
    pub duals: Array1<T>,
    /// Simplex pivots used across both phases.
    pub iterations: usize,
}

/// Outcome of a solve: every case is explicit, nothing panics on
/// well-formed input.
#[derive(Clone, Debug, PartialEq)]
pub enum LpSolution<T> {
    /// A maximizer was found.
    Optimal(LpOptimum<T>),
    /// No point satisfies rows and bounds together.
    Infeasible,
    /// The objective grows without bound over the feasible set.
    Unbounded,
}

impl<T> LpSolution<T> {
    /// The optimum, if one was found.
    pub fn optimal(&self) -> Option<&LpOptimum<T>> {
        match self {
            LpSolution::Optimal(opt) => Some(opt),
            _ => None,
        }
    }

    /// Unwraps the optimum, mapping the degenerate outcomes to a
    /// numerical-failure error tagged with `context`. Designed for the
    /// precoder LPs, which are feasible and bounded by construction.
    pub fn into_optimal(self, context: &str) -> Result<LpOptimum<T>> {
        match self {
            LpSolution::Optimal(opt) => Ok(opt),
            LpSolution::Infeasible => Err(Error::Numerical(format!(
                "{context}: LP unexpectedly reported infeasible"
            ))),
            LpSolution::Unbounded => Err(Error::Numerical(format!(
                "{context}: LP unexpectedly reported unbounded"
            ))),
        }
    }
}

/// Tolerances and limits for the simplex. Defaults are calibrated for
/// `f64` on the well-scaled problems this crate produces (coefficients of
/// order one).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings<T> {
    /// Absolute slack allowed when classifying a point as feasible.
    pub feasibility_tol: T,
    /// Reduced costs within this of zero do not qualify for entering.
    pub reduced_cost_tol: T,
    /// Tableau entries at or below this magnitude are treated as zero in
    /// ratio tests and pivots.
    pub pivot_floor: T,
    /// Hard pivot cap across both phases; `0` picks an automatic limit.
    ///
    /// The cap is a last-resort guard against tolerance-induced cycling,
    /// not a performance budget: Bland's rule terminates in exact
    /// arithmetic but can legitimately take millions of pivots on highly
    /// degenerate instances (the block-wise design over longer blocks), so
    /// the automatic limit is deliberately generous.
    pub max_iterations: usize,
}

impl<T: Scalar> Default for SolverSettings<T> {
    fn default() -> Self {
        Self {
            feasibility_tol: T::cast(1e-8),
            reduced_cost_tol: T::cast(1e-9),
            pivot_floor: T::cast(1e-11),
            max_iterations: 0,
        }
    }
}

/// Solves with default settings. See [`solve_with`].
pub fn solve<T: Scalar>(problem: &LpProblem<T>) -> Result<LpSolution<T>> {
    solve_with(problem, &SolverSettings::default())
}

/// Solves a linear program by two-phase bounded-variable primal simplex.
///
/// Errors only on malformed input or numerical breakdown (iteration cap,
/// vanishing pivots); infeasibility and unboundedness are ordinary
/// [`LpSolution`] variants.
pub fn solve_with<T: Scalar>(
    problem: &LpProblem<T>,
    settings: &SolverSettings<T>,
) -> Result<LpSolution<T>> {
    problem.validate()?;
    let mut tableau = Tableau::new(problem, settings);
    if !tableau.phase_one()? {
        return Ok(LpSolution::Infeasible);
    }
    match tableau.phase_two(problem)? {
        IterOutcome::Optimal => Ok(LpSolution::Optimal(tableau.extract(problem))),
        IterOutcome::Unbounded => Ok(LpSolution::Unbounded),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    Free,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum IterOutcome {
    Optimal,
    Unbounded,
}

struct Tableau<'a, T> {
    n_struct: usize,
    art_start: usize,
    n_total: usize,
    /// `B⁻¹ A` rows of the extended system (structurals, slacks,
    /// artificials).
    rows: Vec<Vec<T>>,
    /// Current value of every extended variable.
    x: Vec<T>,
    lower: Vec<T>,
    upper: Vec<T>,
    /// Basic variable of each row.
    basis: Vec<usize>,
    state: Vec<VarState>,
    /// Reduced costs of the active phase.
    costs: Vec<T>,
    settings: &'a SolverSettings<T>,
    iterations: usize,
    max_iterations: usize,
}

impl<'a, T: Scalar> Tableau<'a, T> {
    fn new(problem: &LpProblem<T>, settings: &'a SolverSettings<T>) -> Self {
        let m = problem.n_rows();
        let n = problem.n_vars();
        let art_start = n + m;

        let mut lower = Vec::with_capacity(art_start + m);
        let mut upper = Vec::with_capacity(art_start + m);
        lower.extend(problem.lower_bounds.iter().copied());
        upper.extend(problem.upper_bounds.iter().copied());
        // Slacks are nonnegative.
        lower.extend(std::iter::repeat_n(T::zero(), m));
        upper.extend(std::iter::repeat_n(T::infinity(), m));

        // Structural variables start at a bound (lower preferred) or, if
        // free, at zero. Slacks rest at their lower bound of zero until a
        // row adopts one as basic.
        let mut x = vec![T::zero(); art_start];
        let mut state = vec![VarState::AtLower; art_start];
        for j in 0..n {
            if lower[j] > T::neg_infinity() {
                x[j] = lower[j];
            } else if upper[j] < T::infinity() {
                x[j] = upper[j];
                state[j] = VarState::AtUpper;
            } else {
                state[j] = VarState::Free;
            }
        }

        // Residuals decide which rows need an artificial: a slack can only
        // absorb a nonnegative remainder.
        let mut residual = Vec::with_capacity(m);
        for i in 0..m {
            let mut dot = T::zero();
            for (j, &xj) in x.iter().enumerate().take(n) {
                let coeff = problem.ineq_matrix[(i, j)];
                if coeff != T::zero() {
                    dot += coeff * xj;
                }
            }
            residual.push(problem.ineq_rhs[i] - dot);
        }
        let art_rows: Vec<usize> = (0..m).filter(|&i| residual[i] < T::zero()).collect();
        let n_total = art_start + art_rows.len();

        let mut rows = vec![vec![T::zero(); n_total]; m];
        let mut basis = vec![0usize; m];
        x.resize(n_total, T::zero());
        state.resize(n_total, VarState::AtLower);
        lower.extend(std::iter::repeat_n(T::zero(), art_rows.len()));
        upper.extend(std::iter::repeat_n(T::infinity(), art_rows.len()));

        let mut next_art = art_start;
        for i in 0..m {
            for (j, slot) in rows[i].iter_mut().enumerate().take(n) {
                *slot = problem.ineq_matrix[(i, j)];
            }
            rows[i][n + i] = T::one();
            if residual[i] < T::zero() {
                // Flip the row so the artificial enters with +1 and a
                // positive value: -M_i v - s_i + a_i = -b_i.
                for entry in rows[i].iter_mut() {
                    *entry = -*entry;
                }
                rows[i][next_art] = T::one();
                basis[i] = next_art;
                x[next_art] = -residual[i];
                state[next_art] = VarState::Basic;
                // The slack stays nonbasic at zero.
                next_art += 1;
            } else {
                basis[i] = n + i;
                x[n + i] = residual[i];
                state[n + i] = VarState::Basic;
            }
        }

        let max_iterations = if settings.max_iterations > 0 {
            settings.max_iterations
        } else {
            10_000_000.max(50 * (m + n_total) + 1_000)
        };

        Tableau {
            n_struct: n,
            art_start,
            n_total,
            rows,
            x,
            lower,
            upper,
            basis,
            state,
            costs: vec![T::zero(); n_total],
            settings,
            iterations: 0,
            max_iterations,
        }
    }

    /// Runs phase one if artificials exist. Returns `false` when the
    /// problem is infeasible.
    fn phase_one(&mut self) -> Result<bool> {
        if self.n_total == self.art_start {
            return Ok(true);
        }
        let mut base = vec![T::zero(); self.n_total];
        for cost in base.iter_mut().skip(self.art_start) {
            *cost = -T::one();
        }
        self.reduce_costs(&base);
        match self.iterate(Phase::One)? {
            IterOutcome::Optimal => {}
            IterOutcome::Unbounded => {
                // Phase one maximizes -Σ artificials ≤ 0; an unbounded ray
                // here means the arithmetic went off the rails.
                return Err(Error::Numerical(
                    "phase-one objective diverged; problem is badly scaled".into(),
                ));
            }
        }
        let infeasibility = self.x[self.art_start..]
            .iter()
            .fold(T::zero(), |acc, &v| acc + v.max(T::zero()));
        if infeasibility > self.settings.feasibility_tol {
            return Ok(false);
        }
        self.drive_out_artificials();
        Ok(true)
    }

    fn phase_two(&mut self, problem: &LpProblem<T>) -> Result<IterOutcome> {
        let mut base = vec![T::zero(); self.n_total];
        base[..self.n_struct].copy_from_slice(problem.objective.as_slice().expect("contiguous"));
        self.reduce_costs(&base);
        self.iterate(Phase::Two)
    }

    /// Rewrites `costs` as reduced costs of `base` under the current basis.
    fn reduce_costs(&mut self, base: &[T]) {
        self.costs.copy_from_slice(base);
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = base[bv];
            if cb != T::zero() {
                let row = &self.rows[i];
                for (cost, &coeff) in self.costs.iter_mut().zip(row.iter()) {
                    *cost -= cb * coeff;
                }
            }
        }
        for &bv in &self.basis {
            self.costs[bv] = T::zero();
        }
    }

    fn iterate(&mut self, phase: Phase) -> Result<IterOutcome> {
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::Numerical(format!(
                    "simplex hit the iteration cap of {} pivots; the instance is likely too \
                     degenerate for the lowest-index pivot rule at this size (raise \
                     SolverSettings::max_iterations to keep going)",
                    self.max_iterations
                )));
            }
            let Some((entering, go_up)) = self.choose_entering() else {
                return Ok(IterOutcome::Optimal);
            };
            match self.ratio_test(entering, go_up) {
                RatioOutcome::Unbounded => match phase {
                    Phase::One => {
                        return Err(Error::Numerical(
                            "phase-one objective diverged; problem is badly scaled".into(),
                        ));
                    }
                    Phase::Two => return Ok(IterOutcome::Unbounded),
                },
                RatioOutcome::BoundFlip { delta } => self.apply_flip(entering, go_up, delta),
                RatioOutcome::Pivot {
                    row,
                    delta,
                    basic_to_upper,
                } => {
                    self.apply_pivot(entering, go_up, row, delta, basic_to_upper)?;
                }
            }
            self.iterations += 1;
        }
    }

    /// Bland's rule: the eligible nonbasic variable with the smallest
    /// index. Artificial columns never re-enter.
    fn choose_entering(&self) -> Option<(usize, bool)> {
        let tol = self.settings.reduced_cost_tol;
        for j in 0..self.art_start {
            if self.state[j] == VarState::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let d = self.costs[j];
            match self.state[j] {
                VarState::AtLower => {
                    if d > tol {
                        return Some((j, true));
                    }
                }
                VarState::AtUpper => {
                    if d < -tol {
                        return Some((j, false));
                    }
                }
                VarState::Free => {
                    if d > tol {
                        return Some((j, true));
                    }
                    if d < -tol {
                        return Some((j, false));
                    }
                }
                VarState::Basic => unreachable!(),
            }
        }
        None
    }

    /// How far the entering variable can move, and what blocks it first.
    /// Ties between rows break toward the smallest basic-variable index
    /// (the other half of Bland's rule); a tie between a row and the
    /// entering variable's own opposite bound prefers the bound flip.
    fn ratio_test(&self, entering: usize, go_up: bool) -> RatioOutcome<T> {
        let dir = if go_up { T::one() } else { -T::one() };
        let floor = self.settings.pivot_floor;

        let mut row_delta = T::infinity();
        let mut row_choice: Option<(usize, bool)> = None;
        let mut row_var = usize::MAX;
        for (i, row) in self.rows.iter().enumerate() {
            let g = dir * row[entering];
            let bv = self.basis[i];
            let (delta, basic_to_upper) = if g > floor {
                if self.lower[bv] == T::neg_infinity() {
                    continue;
                }
                (((self.x[bv] - self.lower[bv]) / g).max(T::zero()), false)
            } else if g < -floor {
                if self.upper[bv] == T::infinity() {
                    continue;
                }
                (((self.upper[bv] - self.x[bv]) / -g).max(T::zero()), true)
            } else {
                continue;
            };
            if delta < row_delta || (delta == row_delta && bv < row_var) {
                row_delta = delta;
                row_choice = Some((i, basic_to_upper));
                row_var = bv;
            }
        }

        let flip_delta =
            if self.lower[entering] > T::neg_infinity() && self.upper[entering] < T::infinity() {
                self.upper[entering] - self.lower[entering]
            } else {
                T::infinity()
            };

        if flip_delta <= row_delta {
            if flip_delta == T::infinity() {
                RatioOutcome::Unbounded
            } else {
                RatioOutcome::BoundFlip { delta: flip_delta }
            }
        } else {
            let (row, basic_to_upper) = row_choice.expect("finite row delta implies a row");
            RatioOutcome::Pivot {
                row,
                delta: row_delta,
                basic_to_upper,
            }
        }
    }

    /// The entering variable crosses to its opposite bound; the basis is
    /// unchanged.
    fn apply_flip(&mut self, entering: usize, go_up: bool, delta: T) {
        let dir = if go_up { T::one() } else { -T::one() };
        if delta > T::zero() {
            for (i, row) in self.rows.iter().enumerate() {
                let coeff = row[entering];
                if coeff != T::zero() {
                    self.x[self.basis[i]] -= dir * delta * coeff;
                }
            }
        }
        if go_up {
            self.x[entering] = self.upper[entering];
            self.state[entering] = VarState::AtUpper;
        } else {
            self.x[entering] = self.lower[entering];
            self.state[entering] = VarState::AtLower;
        }
    }

    fn apply_pivot(
        &mut self,
        entering: usize,
        go_up: bool,
        row: usize,
        delta: T,
        basic_to_upper: bool,
    ) -> Result<()> {
        let dir = if go_up { T::one() } else { -T::one() };
        if delta > T::zero() {
            for (i, r) in self.rows.iter().enumerate() {
                if i != row {
                    let coeff = r[entering];
                    if coeff != T::zero() {
                        self.x[self.basis[i]] -= dir * delta * coeff;
                    }
                }
            }
            self.x[entering] += dir * delta;
        }
        let leaving = self.basis[row];
        // Snap the leaving variable exactly onto the bound it hit.
        if basic_to_upper {
            self.x[leaving] = self.upper[leaving];
            self.state[leaving] = VarState::AtUpper;
        } else {
            self.x[leaving] = self.lower[leaving];
            self.state[leaving] = VarState::AtLower;
        }

        let pivot = self.rows[row][entering];
        if pivot.abs() <= self.settings.pivot_floor {
            return Err(Error::Numerical(format!(
                "pivot magnitude {pivot} below floor; tableau degenerated"
            )));
        }
        let inv = T::one() / pivot;
        for entry in self.rows[row].iter_mut() {
            *entry *= inv;
        }
        self.rows[row][entering] = T::one();
        let pivot_row = std::mem::take(&mut self.rows[row]);
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[entering];
            if f != T::zero() {
                for (dst, &src) in r.iter_mut().zip(pivot_row.iter()) {
                    *dst -= f * src;
                }
                r[entering] = T::zero();
            }
        }
        let f = self.costs[entering];
        if f != T::zero() {
            for (cost, &src) in self.costs.iter_mut().zip(pivot_row.iter()) {
                *cost -= f * src;
            }
            self.costs[entering] = T::zero();
        }
        self.rows[row] = pivot_row;

        self.basis[row] = entering;
        self.state[entering] = VarState::Basic;
        Ok(())
    }

    /// After phase one, swap still-basic artificials for real columns where
    /// possible (degenerate pivots); rows with no eligible column are
    /// redundant and keep their zero-valued artificial.
    fn drive_out_artificials(&mut self) {
        for row in 0..self.rows.len() {
            if self.basis[row] < self.art_start {
                continue;
            }
            let target = (0..self.art_start).find(|&j| {
                self.state[j] != VarState::Basic
                    && self.lower[j] != self.upper[j]
                    && self.rows[row][j].abs() > self.settings.pivot_floor
            });
            if let Some(j) = target {
                let go_up = self.state[j] != VarState::AtUpper;
                // Degenerate exchange: the artificial sits at zero already.
                self.apply_pivot(j, go_up, row, T::zero(), false)
                    .expect("pivot magnitude checked by the search");
            }
        }
    }

    fn extract(&self, problem: &LpProblem<T>) -> LpOptimum<T> {
        let values = Array1::from_iter(self.x[..self.n_struct].iter().copied());
        let objective_value = problem
            .objective
            .iter()
            .zip(values.iter())
            .fold(T::zero(), |acc, (&c, &v)| acc + c * v);
        let m = self.rows.len();
        let duals = Array1::from_shape_fn(m, |i| -self.costs[self.n_struct + i]);
        LpOptimum {
            values,
            objective_value,
            duals,
            iterations: self.iterations,
        }
    }
}

enum RatioOutcome<T> {
    BoundFlip {
        delta: T,
    },
    Pivot {
        row: usize,
        delta: T,
        basic_to_upper: bool,
    },
    Unbounded,
}
