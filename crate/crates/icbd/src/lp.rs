//! Exact-rational two-phase simplex with Bland's rule.
//!
//! Problems are in equality form: maximize `c·x` subject to `A x = b`,
//! `x ≥ 0`. Sizes here are tiny, so a dense tableau is plenty.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("degenerate linear program: {0}")]
    Degenerate(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lp {
    pub c: Vec<Rational>,
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `m` rows of `ncols` coefficients followed by the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        for v in self.t[row].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let f = line[col].clone();
            for (v, pv) in line.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximize `cost` over columns flagged in `allowed`. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.ncols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut r = cost[j].clone();
                for (i, &bv) in self.basis.iter().enumerate() {
                    if !self.t[i][j].is_zero() {
                        r -= &cost[bv] * &self.t[i][j];
                    }
                }
                r.is_positive()
            });
            let Some(col) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                if self.t[i][col].is_positive() {
                    let ratio = &self.t[i][self.ncols] / &self.t[i][col];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((row, _)) => self.pivot(row, col),
            }
        }
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().enumerate().fold(Rational::zero(), |acc, (i, &bv)| {
            acc + &cost[bv] * &self.t[i][self.ncols]
        })
    }
}

/// Solve an equality-form linear program exactly.
pub fn solve(lp: &Lp) -> Result<LpOutcome, LpError> {
    let n = lp.c.len();
    let m = lp.a.len();
    if lp.b.len() != m || lp.a.iter().any(|r| r.len() != n) {
        return Err(LpError::Malformed("dimension mismatch".into()));
    }
    // phase one: one artificial per row, right-hand sides made nonnegative
    let ncols = n + m;
    let mut t = Vec::with_capacity(m);
    for (i, row) in lp.a.iter().enumerate() {
        let flip = lp.b[i].is_negative();
        let mut line: Vec<Rational> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        line.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        line.push(if flip { -&lp.b[i] } else { lp.b[i].clone() });
        t.push(line);
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        ncols,
    };
    let phase1: Vec<Rational> = (0..ncols)
        .map(|j| if j >= n { -Rational::one() } else { Rational::zero() })
        .collect();
    let all = vec![true; ncols];
    if !tab.optimize(&phase1, &all) {
        return Err(LpError::Degenerate("phase one reported unbounded".into()));
    }
    if tab.value(&phase1).is_negative() {
        return Ok(LpOutcome::Infeasible);
    }
    // drive remaining artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut cost: Vec<Rational> = lp.c.clone();
    cost.extend((0..m).map(|_| Rational::zero()));
    let allowed: Vec<bool> = (0..ncols).map(|j| j < n).collect();
    if !tab.optimize(&cost, &allowed) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.t[i][ncols].clone();
        }
    }
    let value = x
        .iter()
        .zip(&lp.c)
        .fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    Ok(LpOutcome::Optimal { x, value })
}

/// Maximin mixture: maximize `t` over distributions `p` on the rows of
/// `m` subject to `Σ_r p_r m[r][c] ≥ t` for every column `c`.
/// Returns the optimal distribution and value.
pub fn maximin(m: &[Vec<Rational>]) -> Result<(Vec<Rational>, Rational), LpError> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(LpError::Malformed("empty or ragged payoff matrix".into()));
    }
    let (keep_rows, keep_cols) = prune(m);
    let reduced: Vec<Vec<Rational>> = keep_rows
        .iter()
        .map(|&r| keep_cols.iter().map(|&c| m[r][c].clone()).collect())
        .collect();
    let (p, value) = maximin_dense(&reduced)?;
    let mut full = vec![Rational::zero(); rows];
    for (&r, w) in keep_rows.iter().zip(p) {
        full[r] = w;
    }
    Ok((full, value))
}

/// Rows and columns that matter for the maximin value. A column that is
/// entrywise at least another column never binds, and a row that is
/// entrywise at most another row can pass its weight on; among equal
/// vectors the first is kept. Dropping them leaves the optimal value
/// unchanged and keeps at least one optimal mixture.
fn prune(m: &[Vec<Rational>]) -> (Vec<usize>, Vec<usize>) {
    let rows: Vec<usize> = (0..m.len()).collect();
    let col = |c: usize| rows.iter().map(move |&r| &m[r][c]);
    let cols: Vec<usize> = (0..m[0].len())
        .filter(|&c| {
            !(0..m[0].len()).any(|d| {
                d != c && col(d).zip(col(c)).all(|(a, b)| a <= b) && (d < c || col(d).zip(col(c)).any(|(a, b)| a < b))
            })
        })
        .collect();
    let row = |r: usize| cols.iter().map(move |&c| &m[r][c]);
    let rows: Vec<usize> = rows
        .iter()
        .copied()
        .filter(|&r| {
            !(0..m.len()).any(|d| {
                d != r && row(d).zip(row(r)).all(|(a, b)| a >= b) && (d < r || row(d).zip(row(r)).any(|(a, b)| a > b))
            })
        })
        .collect();
    (rows, cols)
}

fn maximin_dense(m: &[Vec<Rational>]) -> Result<(Vec<Rational>, Rational), LpError> {
    let rows = m.len();
    let cols = m[0].len();
    // variables: p_0..p_{rows-1}, t+, t-, slack_0..slack_{cols-1}
    let n = rows + 2 + cols;
    let mut a = Vec::with_capacity(cols + 1);
    let mut b = Vec::with_capacity(cols + 1);
    for c in 0..cols {
        let mut line = vec![Rational::zero(); n];
        for r in 0..rows {
            line[r] = m[r][c].clone();
        }
        line[rows] = -Rational::one();
        line[rows + 1] = Rational::one();
        line[rows + 2 + c] = -Rational::one();
        a.push(line);
        b.push(Rational::zero());
    }
    let mut line = vec![Rational::zero(); n];
    for v in line.iter_mut().take(rows) {
        *v = Rational::one();
    }
    a.push(line);
    b.push(Rational::one());
    let mut c = vec![Rational::zero(); n];
    c[rows] = Rational::one();
    c[rows + 1] = -Rational::one();
    match solve(&Lp { c, a, b })? {
        LpOutcome::Optimal { x, value } => Ok((x[..rows].to_vec(), value)),
        other => Err(LpError::Degenerate(format!("maximin program returned {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn small_program() {
        // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let lp = Lp {
            c: vec![int(1), int(1), int(0), int(0)],
            a: vec![
                vec![int(1), int(2), int(1), int(0)],
                vec![int(3), int(1), int(0), int(1)],
            ],
            b: vec![int(4), int(6)],
        };
        match solve(&lp).unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, ratio(14, 5));
                assert_eq!(x[0], ratio(8, 5));
                assert_eq!(x[1], ratio(6, 5));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = Lp {
            c: vec![int(1)],
            a: vec![vec![int(1)], vec![int(1)]],
            b: vec![int(1), int(2)],
        };
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Infeasible);
        let lp = Lp {
            c: vec![int(1), int(0)],
            a: vec![vec![int(1), int(-1)]],
            b: vec![int(0)],
        };
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn matching_pennies_value() {
        let m = vec![vec![int(1), int(-1)], vec![int(-1), int(1)]];
        let (p, v) = maximin(&m).unwrap();
        assert_eq!(v, int(0));
        assert_eq!(p, vec![ratio(1, 2), ratio(1, 2)]);
    }

    proptest! {
        #[test]
        fn maximin_is_optimal_against_pure_rows(m in prop::collection::vec(prop::collection::vec(-5i64..6, 1..4), 1..4)) {
            let cols = m[0].len();
            let m: Vec<Vec<Rational>> = m.iter().map(|r| (0..cols).map(|c| int(*r.get(c).unwrap_or(&0))).collect()).collect();
            let (p, v) = maximin(&m).unwrap();
            let sum: Rational = p.iter().sum();
            prop_assert_eq!(sum, int(1));
            for c in 0..cols {
                let e: Rational = p.iter().zip(&m).map(|(pr, row)| pr * &row[c]).sum();
                prop_assert!(e >= v);
            }
            for row in &m {
                let worst = row.iter().min().unwrap();
                prop_assert!(*worst <= v);
            }
        }

        #[test]
        fn pruning_keeps_the_value(m in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 1..6)) {
            let m: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
            let (_, pruned) = maximin(&m).unwrap();
            let (_, dense) = maximin_dense(&m).unwrap();
            prop_assert_eq!(pruned, dense);
        }
    }
}
