//! Brute-force LP reference for tiny problems.
//!
//! Enumerates every candidate vertex — each choice of `n` halfspaces from
//! {inequality rows, finite bounds} intersected as equations — checks it
//! against all halfspaces, and keeps the best feasible objective. Infinite
//! bounds are replaced by a huge synthetic box so that problems whose
//! feasible set has no natural vertex still enumerate cleanly; solving
//! again with the box doubled distinguishes a genuine optimum from an
//! unbounded ray. Cost is `C(rows + 2n, n)` Gaussian solves, so this is a
//! test-support tool, deliberately unrelated to the simplex it checks.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::lp::LpProblem;
use crate::scalar::Scalar;

/// Span of the synthetic box standing in for infinite bounds. Vastly larger
/// than any coordinate a real optimum of the test problems can take.
const SYNTHETIC_BOX: f64 = 1e7;

/// What the enumeration concluded.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleOutcome<T> {
    /// Best feasible vertex and its objective.
    Optimal {
        /// Coordinates of the best vertex found.
        values: Array1<T>,
        /// Objective there.
        objective_value: T,
    },
    /// No candidate vertex satisfied every halfspace.
    Infeasible,
    /// Enlarging the synthetic box kept improving the objective.
    Unbounded,
}

/// Solves a small LP by exhaustive vertex enumeration.
///
/// `max_vars` caps the combinatorics; problems with more variables (or a
/// cap above 6) are rejected rather than silently crawling.
pub fn enumerate_vertices_oracle<T: Scalar>(
    problem: &LpProblem<T>,
    max_vars: usize,
) -> Result<OracleOutcome<T>> {
    problem.validate()?;
    if max_vars > 6 {
        return Err(Error::InvalidArgument(format!(
            "vertex enumeration is capped at 6 variables, asked for {max_vars}"
        )));
    }
    if problem.n_vars() > max_vars {
        return Err(Error::InvalidArgument(format!(
            "problem has {} variables, oracle limit is {max_vars}",
            problem.n_vars()
        )));
    }

    let Some((values, objective)) = best_vertex(problem, T::cast(SYNTHETIC_BOX)) else {
        return Ok(OracleOutcome::Infeasible);
    };
    let (_, objective_wide) = best_vertex(problem, T::cast(2.0 * SYNTHETIC_BOX))
        .expect("enlarging the box cannot lose feasibility");
    let growth_tol = T::cast(1e-6) * (T::one() + objective.abs());
    if objective_wide > objective + growth_tol {
        return Ok(OracleOutcome::Unbounded);
    }
    Ok(OracleOutcome::Optimal {
        values,
        objective_value: objective,
    })
}

/// Best feasible vertex of the problem clipped to `[-box_span, box_span]`
/// wherever a bound is infinite. `None` means nothing was feasible.
fn best_vertex<T: Scalar>(problem: &LpProblem<T>, box_span: T) -> Option<(Array1<T>, T)> {
    let n = problem.n_vars();

    // Halfspaces a·v ≤ rhs: the rows, then every (possibly synthetic) bound.
    let mut normals: Vec<Vec<T>> = Vec::new();
    let mut offsets: Vec<T> = Vec::new();
    for (row, &rhs) in problem
        .ineq_matrix
        .rows()
        .into_iter()
        .zip(problem.ineq_rhs.iter())
    {
        normals.push(row.to_vec());
        offsets.push(rhs);
    }
    for j in 0..n {
        let mut up = vec![T::zero(); n];
        up[j] = T::one();
        normals.push(up);
        offsets.push(if problem.upper_bounds[j] < T::infinity() {
            problem.upper_bounds[j]
        } else {
            box_span
        });
        let mut down = vec![T::zero(); n];
        down[j] = -T::one();
        normals.push(down);
        offsets.push(if problem.lower_bounds[j] > T::neg_infinity() {
            -problem.lower_bounds[j]
        } else {
            box_span
        });
    }

    let feas_tol = T::cast(1e-8);
    let mut best: Option<(Array1<T>, T)> = None;
    for_each_combination(normals.len(), n, |subset| {
        let mut matrix = vec![T::zero(); n * n];
        let mut rhs = vec![T::zero(); n];
        for (r, &h) in subset.iter().enumerate() {
            matrix[r * n..(r + 1) * n].copy_from_slice(&normals[h]);
            rhs[r] = offsets[h];
        }
        let Some(vertex) = solve_square(&mut matrix, &mut rhs, n) else {
            return;
        };
        let feasible = normals.iter().zip(offsets.iter()).all(|(a, &b)| {
            let lhs = a
                .iter()
                .zip(vertex.iter())
                .fold(T::zero(), |acc, (&ai, &vi)| acc + ai * vi);
            lhs <= b + feas_tol * (T::one() + b.abs())
        });
        if !feasible {
            return;
        }
        let objective = problem
            .objective
            .iter()
            .zip(vertex.iter())
            .fold(T::zero(), |acc, (&c, &v)| acc + c * v);
        if best
            .as_ref()
            .is_none_or(|(_, incumbent)| objective > *incumbent)
        {
            best = Some((Array1::from_vec(vertex), objective));
        }
    });
    best
}

/// Gaussian elimination with partial pivoting on a row-major `n × n`
/// system. Returns `None` when the subset is (numerically) singular.
fn solve_square<T: Scalar>(matrix: &mut [T], rhs: &mut [T], n: usize) -> Option<Vec<T>> {
    let floor = T::cast(1e-11);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| {
                matrix[a * n + col]
                    .abs()
                    .partial_cmp(&matrix[b * n + col].abs())
                    .expect("finite entries")
            })
            .expect("non-empty range");
        if matrix[pivot_row * n + col].abs() <= floor {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                matrix.swap(col * n + j, pivot_row * n + j);
            }
            rhs.swap(col, pivot_row);
        }
        let inv = T::one() / matrix[col * n + col];
        for row in (col + 1)..n {
            let factor = matrix[row * n + col] * inv;
            if factor != T::zero() {
                for j in col..n {
                    let sub = factor * matrix[col * n + j];
                    matrix[row * n + j] -= sub;
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    let mut solution = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in (row + 1)..n {
            acc -= matrix[row * n + j] * solution[j];
        }
        solution[row] = acc / matrix[row * n + row];
    }
    Some(solution)
}

/// Calls `f` with every size-`choose` index subset of `0..total`, in
/// lexicographic order.
fn for_each_combination(total: usize, choose: usize, mut f: impl FnMut(&[usize])) {
    if choose == 0 || choose > total {
        return;
    }
    let mut idx: Vec<usize> = (0..choose).collect();
    loop {
        f(&idx);
        let mut i = choose - 1;
        while idx[i] == total - choose + i {
            if i == 0 {
                return;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in (i + 1)..choose {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_cover_lexicographic_order() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn square_solve_handles_pivoting_and_singularity() {
        // [[0, 1], [2, 1]] x = [3, 7] → x = [2, 3]; needs the row swap.
        let mut m = vec![0.0_f64, 1.0, 2.0, 1.0];
        let mut b = vec![3.0_f64, 7.0];
        let x = solve_square(&mut m, &mut b, 2).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);

        let mut singular = vec![1.0_f64, 2.0, 2.0, 4.0];
        let mut b = vec![1.0_f64, 2.0];
        assert!(solve_square(&mut singular, &mut b, 2).is_none());
    }
}
