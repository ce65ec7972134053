//! Ground truth by exhaustion: box enumeration of semilinear sets,
//! brute-force minimal solutions, exhaustive subdeterminants, and evaluation
//! of the descriptional-complexity bounds.
//!
//! Nothing here shares a code path with the constructions it checks:
//! enumeration walks period combinations forward from the constants, the
//! brute-force solver scans every point of a box, and subdeterminants are
//! expanded by permutations rather than by elimination.

mod bounds;
pub mod interval;

use std::collections::{BTreeSet, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::diophantine::DiophantineSystem;
use crate::error::{check_dim, Result};
use crate::linalg;
use crate::set::SemilinearSet;
use crate::vector::NatVector;

pub use bounds::{
    bound_report, certify_operation, BoundCheck, BoundReport, OperandInfo, OperationKind, Status,
    DEFAULT_PRECISION, PRECISION_CAP,
};

/// All members of `s` inside `[0, bound]^k`, generated by walking period
/// combinations from each constant.
pub fn enumerate_box(s: &SemilinearSet, bound: u64) -> BTreeSet<NatVector> {
    let mut out: HashSet<Vec<u64>> = HashSet::new();
    for comp in s.components() {
        let periods: Vec<Vec<u64>> = comp
            .periods()
            .iter()
            .filter_map(|p| p.to_u64s())
            .filter(|p| p.iter().all(|&e| e <= bound))
            .collect();
        let mut stack: Vec<Vec<u64>> = comp
            .constants()
            .iter()
            .filter_map(|c| c.to_u64s())
            .filter(|c| c.iter().all(|&e| e <= bound))
            .collect();
        let mut seen: HashSet<Vec<u64>> = stack.iter().cloned().collect();
        while let Some(point) = stack.pop() {
            for p in &periods {
                let next: Option<Vec<u64>> = point
                    .iter()
                    .zip(p)
                    .map(|(a, b)| a.checked_add(*b).filter(|&v| v <= bound))
                    .collect();
                if let Some(next) = next {
                    if seen.insert(next.clone()) {
                        stack.push(next);
                    }
                }
            }
        }
        out.extend(seen);
    }
    out.into_iter().map(|v| NatVector::from_u64s(&v)).collect()
}

/// Every point of `[0, bound]^k` in lexicographic order.
pub fn box_points(dim: usize, bound: u64) -> impl Iterator<Item = Vec<u64>> {
    let mut current: Option<Vec<u64>> = Some(vec![0; dim]);
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = dim;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < bound {
                next[i] += 1;
                for e in &mut next[i + 1..] {
                    *e = 0;
                }
                current = Some(next);
                break;
            }
        }
        Some(out)
    })
}

/// Members of `s` inside the box, found by testing each point with
/// [`SemilinearSet::member`].
pub fn filter_box(s: &SemilinearSet, bound: u64) -> BTreeSet<NatVector> {
    box_points(s.dim(), bound)
        .map(|p| NatVector::from_u64s(&p))
        .filter(|p| s.member(p).expect("dimension matches"))
        .collect()
}

/// Compares two sets on `[0, bound]^k`; on disagreement returns the
/// lexicographically least point in exactly one of them.
pub fn equal_on_box(
    a: &SemilinearSet,
    b: &SemilinearSet,
    bound: u64,
) -> Result<(bool, Option<NatVector>)> {
    check_dim(a.dim(), b.dim())?;
    let ea = enumerate_box(a, bound);
    let eb = enumerate_box(b, bound);
    let witness = ea.symmetric_difference(&eb).min().cloned();
    Ok((witness.is_none(), witness))
}

/// Minimal elements of the solutions of `sys` in `[0, bound]^t`, by a full
/// scan of the box. Substitution records are enforced by filtering.
pub fn brute_minimal_solutions(
    sys: &DiophantineSystem,
    bound: u64,
    exclude_zero: bool,
) -> Vec<NatVector> {
    let t = sys.vars();
    let small: Option<(Vec<Vec<i64>>, Vec<i64>)> = sys
        .matrix()
        .iter()
        .map(|r| {
            r.iter()
                .map(ToPrimitive::to_i64)
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()
        .zip(
            sys.rhs()
                .iter()
                .map(ToPrimitive::to_i64)
                .collect::<Option<Vec<_>>>(),
        );
    let constrained = sys.constraints().iter().any(Option::is_some);

    let shards: Vec<u64> = (0..=bound).collect();
    let mut solutions: Vec<Vec<u64>> = shards
        .par_iter()
        .flat_map_iter(|&first| {
            let mut found = Vec::new();
            match &small {
                Some((a, b)) => scan_small(a, b, t, bound, first, |x| {
                    if !constrained || satisfies_big(sys, x) {
                        found.push(x.to_vec());
                    }
                }),
                None => {
                    for mut rest in box_points(t - 1, bound) {
                        rest.insert(0, first);
                        if satisfies_big(sys, &rest) {
                            found.push(rest);
                        }
                    }
                }
            }
            found
        })
        .collect();
    if exclude_zero {
        solutions.retain(|x| x.iter().any(|&e| e != 0));
    }
    // A dominated point has a strictly smaller coordinate sum, so scanning by
    // sum only needs comparisons against the minimal points kept so far.
    solutions.sort_by_key(|x| (x.iter().sum::<u64>(), x.clone()));
    let mut minimal: Vec<Vec<u64>> = Vec::new();
    for x in solutions {
        if !minimal
            .iter()
            .any(|y| y.iter().zip(&x).all(|(a, b)| a <= b))
        {
            minimal.push(x);
        }
    }
    let mut minimal: Vec<NatVector> = minimal.iter().map(|x| NatVector::from_u64s(x)).collect();
    minimal.sort();
    minimal
}

/// Visits every `x` with `x[0] = first` and `A·x = b`, stepping through the
/// slice like an odometer while keeping `A·x − b` up to date.
fn scan_small(
    a: &[Vec<i64>],
    b: &[i64],
    t: usize,
    bound: u64,
    first: u64,
    mut hit: impl FnMut(&[u64]),
) {
    let cols: Vec<Vec<i128>> = (0..t)
        .map(|j| a.iter().map(|row| i128::from(row[j])).collect())
        .collect();
    let mut residual: Vec<i128> = b
        .iter()
        .zip(&cols[0])
        .map(|(&rhs, &c)| c * i128::from(first) - i128::from(rhs))
        .collect();
    let mut x = vec![0u64; t];
    x[0] = first;
    loop {
        if residual.iter().all(|&r| r == 0) {
            hit(&x);
        }
        let mut j = t - 1;
        loop {
            if j == 0 {
                return;
            }
            if x[j] < bound {
                x[j] += 1;
                residual.iter_mut().zip(&cols[j]).for_each(|(r, c)| *r += c);
                break;
            }
            let back = i128::from(bound);
            residual
                .iter_mut()
                .zip(&cols[j])
                .for_each(|(r, c)| *r -= c * back);
            x[j] = 0;
            j -= 1;
        }
    }
}

fn satisfies_big(sys: &DiophantineSystem, x: &[u64]) -> bool {
    let xs: Vec<BigUint> = x.iter().map(|&e| BigUint::from(e)).collect();
    sys.is_solution(&xs)
}

/// Maximum absolute `r×r` subdeterminant of `(A | b)` with `r = rank(A)`,
/// by enumerating all row and column choices and expanding each minor over
/// permutations. Meant for small systems only.
pub fn max_subdeterminant(sys: &DiophantineSystem) -> BigUint {
    let r = linalg::rank(sys.matrix());
    if r == 0 {
        return BigUint::from(1u8);
    }
    let extended: Vec<Vec<BigInt>> = sys
        .matrix()
        .iter()
        .zip(sys.rhs())
        .map(|(row, b)| {
            let mut row = row.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let mut best = BigUint::zero();
    for rows in combinations(extended.len(), r) {
        for cols in combinations(extended[0].len(), r) {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| extended[i][j].clone()).collect())
                .collect();
            let d = leibniz_determinant(&minor).magnitude().clone();
            if d > best {
                best = d;
            }
        }
    }
    best
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

fn leibniz_determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = BigInt::zero();
    permute(&mut perm, 0, &mut |p| {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count();
        let term: BigInt = (0..n).map(|i| m[i][p[i]].clone()).product();
        if inversions % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    });
    total
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}
