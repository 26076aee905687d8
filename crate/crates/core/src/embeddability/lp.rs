//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `maximize c·x subject to A x = b, x ≥ 0`. An infeasible system
//! comes back with Farkas multipliers `y` such that `yᵀA ≤ 0` and `yᵀb > 0`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, objective: Rational },
    Infeasible { farkas: Vec<Rational> },
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        self.rhs[r] = &self.rhs[r] / &p;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for j in 0..self.rows[i].len() {
                if !self.rows[r][j].is_zero() {
                    let delta = &f * &self.rows[r][j];
                    self.rows[i][j] -= delta;
                }
            }
            let delta = &f * &self.rhs[r];
            self.rhs[i] -= delta;
        }
        self.basis[r] = col;
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        let mut d = cost[j].clone();
        for (k, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.rows[k][j].is_zero() {
                d -= &cost[b] * &self.rows[k][j];
            }
        }
        d
    }

    /// Maximizes `cost` over the columns in `allowed`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| !self.basis.contains(&j) && self.reduced_cost(cost, j).is_positive());
            let Some(col) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][col].is_positive() {
                    let ratio = &self.rhs[r] / &self.rows[r][col];
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }
}

pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    // Flip rows so the right-hand side is nonnegative.
    let signs: Vec<Rational> = b
        .iter()
        .map(|v| if v.is_negative() { -Rational::one() } else { Rational::one() })
        .collect();
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rational> = a[i].iter().map(|v| v * &signs[i]).collect();
        row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        rows.push(row);
    }
    let rhs: Vec<Rational> = b.iter().zip(&signs).map(|(v, s)| v * s).collect();
    let mut t = Tableau { rows, rhs, basis: (n..n + m).collect() };

    // Phase 1: maximize −Σ artificials.
    let mut phase1 = vec![Rational::zero(); n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = -Rational::one();
    }
    t.optimize(&phase1, n + m);
    let infeasibility: Rational = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&bv, _)| bv >= n)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        // y = c_Bᵀ B⁻¹ for the minimization form; B⁻¹ sits in the artificial columns.
        let farkas = (0..m)
            .map(|i| {
                let mut y = Rational::zero();
                for (k, &bv) in t.basis.iter().enumerate() {
                    if bv >= n {
                        y += &t.rows[k][n + i];
                    }
                }
                y * &signs[i]
            })
            .collect();
        return LpOutcome::Infeasible { farkas };
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and dropped.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, col);
                r += 1;
            } else {
                t.rows.remove(r);
                t.rhs.remove(r);
                t.basis.remove(r);
            }
        } else {
            r += 1;
        }
    }

    let mut cost: Vec<Rational> = c.to_vec();
    cost.extend((0..m).map(|_| Rational::zero()));
    if !t.optimize(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (k, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs[k].clone();
        }
    }
    let objective = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { x, objective }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn small_maximization() {
        // max x0 + x1, x0 + 2x1 + s0 = 4, 3x0 + x1 + s1 = 6
        let a = vec![vec![r(1, 1), r(2, 1), r(1, 1), r(0, 1)], vec![r(3, 1), r(1, 1), r(0, 1), r(1, 1)]];
        let b = vec![r(4, 1), r(6, 1)];
        let c = vec![r(1, 1), r(1, 1), r(0, 1), r(0, 1)];
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { objective, .. } => assert_eq!(objective, r(14, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_has_farkas() {
        // x0 + x1 = 1 and x0 + x1 = 2
        let a = vec![vec![r(1, 1), r(1, 1)], vec![r(1, 1), r(1, 1)]];
        let b = vec![r(1, 1), r(2, 1)];
        let LpOutcome::Infeasible { farkas } = maximize(&a, &b, &[r(0, 1), r(0, 1)]) else { panic!() };
        for j in 0..2 {
            let s: Rational = (0..2).map(|i| &farkas[i] * &a[i][j]).sum();
            assert!(!s.is_positive());
        }
        let yb: Rational = farkas.iter().zip(&b).map(|(y, v)| y * v).sum();
        assert!(yb.is_positive());
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        // −x0 = −1 (twice)
        let a = vec![vec![r(-1, 1)], vec![r(-1, 1)]];
        let b = vec![r(-1, 1), r(-1, 1)];
        match maximize(&a, &b, &[r(1, 1)]) {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, vec![r(1, 1)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_unbounded() {
        let a = vec![vec![r(1, 1), r(-1, 1)]];
        let b = vec![r(0, 1)];
        assert_eq!(maximize(&a, &b, &[r(1, 1), r(0, 1)]), LpOutcome::Unbounded);
    }
}
