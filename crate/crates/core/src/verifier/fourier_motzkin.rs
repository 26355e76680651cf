//! Fourier–Motzkin elimination over exact rationals.
//!
//! Decides feasibility of a system `A x <= b` and, when feasible, produces a
//! witness by back-substitution through the intermediate systems. Intended
//! for a handful of variables; the row count can grow quadratically per
//! eliminated variable.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// One row `coeffs . x <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Inequality {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
}

impl Inequality {
    pub fn new(coeffs: Vec<BigRational>, rhs: BigRational) -> Self {
        Inequality { coeffs, rhs }
    }

    /// Scales by a positive factor so the first non-zero coefficient is +-1.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.coeffs {
                *c = &*c / &lead;
            }
            self.rhs = &self.rhs / &lead;
        }
        self
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    vars: usize,
    rows: Vec<Inequality>,
}

impl LinearSystem {
    pub fn new(vars: usize) -> Self {
        LinearSystem { vars, rows: Vec::new() }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    /// Adds `sum(coeff * x[var]) <= rhs`.
    pub fn push_le(&mut self, terms: &[(usize, BigRational)], rhs: BigRational) {
        let mut coeffs = vec![BigRational::zero(); self.vars];
        for (var, c) in terms {
            coeffs[*var] += c;
        }
        self.rows.push(Inequality::new(coeffs, rhs));
    }

    /// Adds `sum(coeff * x[var]) >= rhs`.
    pub fn push_ge(&mut self, terms: &[(usize, BigRational)], rhs: BigRational) {
        let negated: Vec<(usize, BigRational)> = terms.iter().map(|(v, c)| (*v, -c)).collect();
        self.push_le(&negated, -rhs);
    }

    /// Whether `x` satisfies every row.
    pub fn is_satisfied_by(&self, x: &[BigRational]) -> bool {
        self.rows.iter().all(|row| {
            let lhs: BigRational = row.coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
            lhs <= row.rhs
        })
    }

    /// Returns a feasible point, or `None` if the system is infeasible.
    pub fn solve(&self) -> Option<Vec<BigRational>> {
        let mut stages: Vec<Vec<Inequality>> = Vec::with_capacity(self.vars + 1);
        let mut current = dedup(self.rows.iter().cloned().map(Inequality::normalized).collect());
        for var in 0..self.vars {
            if current.iter().any(|r| r.is_constant() && r.rhs.is_negative()) {
                return None;
            }
            let next = eliminate(&current, var);
            stages.push(current);
            current = next;
        }
        if current.iter().any(|r| r.rhs.is_negative()) {
            return None;
        }

        // stages[var] only involves variables var.. ; assign from the last one back.
        let mut x = vec![BigRational::zero(); self.vars];
        for var in (0..self.vars).rev() {
            let mut lower: Option<BigRational> = None;
            let mut upper: Option<BigRational> = None;
            for row in &stages[var] {
                let a = &row.coeffs[var];
                if a.is_zero() {
                    continue;
                }
                let rest: BigRational = (var + 1..self.vars).map(|j| &row.coeffs[j] * &x[j]).sum();
                let bound = (&row.rhs - rest) / a;
                if a.is_positive() {
                    upper = Some(upper.map_or(bound.clone(), |u| u.min(bound)));
                } else {
                    lower = Some(lower.map_or(bound.clone(), |l| l.max(bound)));
                }
            }
            x[var] = match (lower, upper) {
                (_, Some(u)) => u,
                (Some(l), None) => l,
                (None, None) => BigRational::zero(),
            };
        }
        debug_assert!(self.is_satisfied_by(&x));
        Some(x)
    }
}

fn dedup(mut rows: Vec<Inequality>) -> Vec<Inequality> {
    rows.sort();
    rows.dedup();
    rows
}

fn eliminate(rows: &[Inequality], var: usize) -> Vec<Inequality> {
    let mut keep = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for row in rows {
        let c = &row.coeffs[var];
        if c.is_positive() {
            pos.push(row);
        } else if c.is_negative() {
            neg.push(row);
        } else if !row.is_constant() {
            keep.push(row.clone());
        } else if row.rhs.is_negative() {
            // carry the contradiction forward
            keep.push(row.clone());
        }
    }
    for p in &pos {
        for n in &neg {
            let mp = -&n.coeffs[var];
            let mn = p.coeffs[var].clone();
            let coeffs: Vec<BigRational> = p.coeffs.iter().zip(&n.coeffs).map(|(a, b)| a * &mp + b * &mn).collect();
            let rhs = &p.rhs * &mp + &n.rhs * &mn;
            keep.push(Inequality::new(coeffs, rhs).normalized());
        }
    }
    dedup(keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn empty_system_is_feasible() {
        assert_eq!(LinearSystem::new(0).solve(), Some(vec![]));
        assert_eq!(LinearSystem::new(2).solve().map(|x| x.len()), Some(2));
    }

    #[test]
    fn box_and_sum() {
        // 0 <= x, y <= 1, x + y >= 3/2
        let mut s = LinearSystem::new(2);
        for v in 0..2 {
            s.push_ge(&[(v, q(1, 1))], q(0, 1));
            s.push_le(&[(v, q(1, 1))], q(1, 1));
        }
        s.push_ge(&[(0, q(1, 1)), (1, q(1, 1))], q(3, 2));
        let x = s.solve().unwrap();
        assert!(s.is_satisfied_by(&x));
    }

    #[test]
    fn detects_infeasibility() {
        // x + y >= 3 with x, y <= 1
        let mut s = LinearSystem::new(2);
        s.push_le(&[(0, q(1, 1))], q(1, 1));
        s.push_le(&[(1, q(1, 1))], q(1, 1));
        s.push_ge(&[(0, q(1, 1)), (1, q(1, 1))], q(3, 1));
        assert!(s.solve().is_none());
    }

    #[test]
    fn tight_equality_is_found_exactly() {
        // x >= 1/3 and x <= 1/3
        let mut s = LinearSystem::new(1);
        s.push_ge(&[(0, q(1, 1))], q(1, 3));
        s.push_le(&[(0, q(1, 1))], q(1, 3));
        assert_eq!(s.solve(), Some(vec![q(1, 3)]));
    }

    #[test]
    fn constant_contradiction() {
        let mut s = LinearSystem::new(1);
        s.push_le(&[], q(-1, 1));
        assert!(s.solve().is_none());
    }

    #[test]
    fn agrees_with_grid_search_on_small_systems() {
        // Independent check: a feasible rational point on a fine grid implies
        // feasibility; FM must then find one too.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let mut s = LinearSystem::new(2);
            for v in 0..2 {
                s.push_ge(&[(v, q(1, 1))], q(0, 1));
                s.push_le(&[(v, q(1, 1))], q(1, 1));
            }
            for _ in 0..3 {
                let a = rng.gen_range(-4..=4);
                let b = rng.gen_range(-4..=4);
                let c = rng.gen_range(-4..=4);
                s.push_le(&[(0, q(a, 1)), (1, q(b, 1))], q(c, 2));
            }
            let grid_feasible = (0..=24).any(|i| (0..=24).any(|j| s.is_satisfied_by(&[q(i, 24), q(j, 24)])));
            let fm = s.solve();
            if grid_feasible {
                assert!(fm.is_some());
            }
            if let Some(x) = fm {
                assert!(s.is_satisfied_by(&x));
            }
        }
    }
}
