//! Union, intersection and inverse homomorphism.
//!
//! Intersection of two linear sets `L(c₁, {x_r})` and `L(c₂, {y_s})` solves
//! `Σ λ_r x_r − Σ μ_s y_s = c₂ − c₁`; the minimal solutions `C` and the
//! minimal nonzero homogeneous solutions `P` describe the coefficient set as
//! `L(C, P)`, and pushing it through `τ(λ, μ) = Σ λ_r x_r` gives
//! `L(c₁ + τ(C), τ(P))`. The inverse image under `x ↦ H·x` is handled the
//! same way with the block matrix `(H | −y₁ | … | −y_p)`, projecting onto the
//! first `k₁` coordinates.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::diophantine::{solve_lcq, DiophantineSystem};
use crate::error::{check_dim, Error, Result};
use crate::set::{LinearComponent, SemilinearSet};
use crate::vector::NatVector;

/// A rectangular integer matrix, stored by rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl IntegerMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::RaggedMatrix);
        }
        Ok(IntegerMatrix { rows })
    }

    pub fn from_u64(rows: &[&[u64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.rows[0].len()
    }

    pub fn norm(&self) -> BigUint {
        self.rows
            .iter()
            .flatten()
            .map(|x| x.magnitude().clone())
            .max()
            .unwrap_or_default()
    }

    pub fn ensure_nonnegative(&self) -> Result<()> {
        match self.rows.iter().flatten().find(|x| x.is_negative()) {
            Some(x) => Err(Error::NegativeMatrixEntry(x.to_string())),
            None => Ok(()),
        }
    }

    /// `H·x` for a non-negative matrix.
    pub fn apply(&self, x: &NatVector) -> Result<NatVector> {
        check_dim(self.col_count(), x.dim())?;
        let xs = x.to_bigints();
        let image: Vec<BigInt> = self
            .rows
            .iter()
            .map(|row| row.iter().zip(&xs).map(|(a, b)| a * b).sum())
            .collect();
        NatVector::from_bigints(&image)
    }
}

pub fn union(a: &SemilinearSet, b: &SemilinearSet) -> Result<SemilinearSet> {
    check_dim(a.dim(), b.dim())?;
    let comps = a
        .components()
        .iter()
        .chain(b.components())
        .cloned()
        .collect();
    SemilinearSet::new(a.dim(), comps)
}

fn signed(v: &NatVector) -> Vec<BigInt> {
    v.to_bigints()
}

/// `L(c1, p1) ∩ L(c2, p2)`, or `None` when the intersection is empty.
pub fn intersect_linear(
    c1: &NatVector,
    p1: &[NatVector],
    c2: &NatVector,
    p2: &[NatVector],
) -> Result<Option<LinearComponent>> {
    let k = c1.dim();
    check_dim(k, c2.dim())?;
    for p in p1.iter().chain(p2) {
        check_dim(k, p.dim())?;
    }
    let t = p1.len() + p2.len();
    if t == 0 {
        return Ok((c1 == c2).then(|| LinearComponent::from_parts(vec![c1.clone()], vec![])));
    }

    // H = (x_1 | … | x_p | −y_1 | … | −y_q), right-hand side c2 − c1.
    let columns: Vec<Vec<BigInt>> = p1
        .iter()
        .map(signed)
        .chain(
            p2.iter()
                .map(|y| signed(y).into_iter().map(|e| -e).collect()),
        )
        .collect();
    let matrix: Vec<Vec<BigInt>> = (0..k)
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect();
    let rhs: Vec<BigInt> = signed(c2)
        .into_iter()
        .zip(signed(c1))
        .map(|(a, b)| a - b)
        .collect();
    let sys = DiophantineSystem::new(matrix, rhs)?;
    let (constants, periods) = solve_lcq(&sys);
    if constants.is_empty() {
        return Ok(None);
    }

    let tau = |coeffs: &NatVector| -> NatVector {
        let mut acc = NatVector::zero(k);
        for (lambda, x) in coeffs.entries().iter().zip(p1) {
            if !lambda.is_zero() {
                acc = acc.add(&x.scale(lambda));
            }
        }
        acc
    };
    let constants = constants.iter().map(|c| c1.add(&tau(c))).collect();
    let periods = periods.iter().map(tau).collect();
    Ok(Some(LinearComponent::from_parts(constants, periods)))
}

/// Distributes [`intersect_linear`] over all pairs of expanded components.
pub fn intersect(a: &SemilinearSet, b: &SemilinearSet) -> Result<SemilinearSet> {
    check_dim(a.dim(), b.dim())?;
    let ea = a.expand_constants();
    let eb = b.expand_constants();
    let pairs: Vec<(&LinearComponent, &LinearComponent)> = ea
        .components()
        .iter()
        .flat_map(|x| eb.components().iter().map(move |y| (x, y)))
        .collect();
    let parts: Vec<Option<LinearComponent>> = pairs
        .par_iter()
        .map(|(x, y)| {
            intersect_linear(
                &x.constants()[0],
                x.periods(),
                &y.constants()[0],
                y.periods(),
            )
        })
        .collect::<Result<_>>()?;
    Ok(SemilinearSet::from_components(
        a.dim(),
        parts.into_iter().flatten().collect(),
    ))
}

/// Intersection of a non-empty family by balanced pairing: the operands are
/// sorted canonically, adjacent pairs are intersected, and an odd leftover is
/// carried into the next round, for exactly `⌈log₂ |sets|⌉` rounds.
pub fn intersect_many(sets: &[SemilinearSet]) -> Result<SemilinearSet> {
    intersect_many_checked(sets, &|_| Ok(()))
}

pub(crate) fn intersect_many_checked(
    sets: &[SemilinearSet],
    check: &(dyn Fn(&SemilinearSet) -> Result<()> + Sync),
) -> Result<SemilinearSet> {
    let first = sets.first().ok_or(Error::NoOperands)?;
    for s in sets {
        check_dim(first.dim(), s.dim())?;
    }
    let mut round: Vec<SemilinearSet> = sets.to_vec();
    round.sort();
    while round.len() > 1 {
        round = round
            .par_chunks(2)
            .map(|pair| match pair {
                [a, b] => {
                    let r = intersect(a, b)?;
                    check(&r)?;
                    Ok(r)
                }
                [a] => Ok(a.clone()),
                _ => unreachable!("chunks of two"),
            })
            .collect::<Result<_>>()?;
    }
    Ok(round.pop().expect("non-empty"))
}

/// `{ x ∈ ℕ^{k₁} : H·x ∈ S }` for a non-negative `k₂×k₁` matrix `H`.
pub fn preimage(h: &IntegerMatrix, s: &SemilinearSet) -> Result<SemilinearSet> {
    h.ensure_nonnegative()?;
    check_dim(s.dim(), h.row_count())?;
    let k1 = h.col_count();
    let expanded = s.expand_constants();
    let parts: Vec<Option<LinearComponent>> = expanded
        .components()
        .par_iter()
        .map(|comp| preimage_linear(h, &comp.constants()[0], comp.periods()))
        .collect::<Result<_>>()?;
    Ok(SemilinearSet::from_components(
        k1,
        parts.into_iter().flatten().collect(),
    ))
}

fn preimage_linear(
    h: &IntegerMatrix,
    c: &NatVector,
    periods: &[NatVector],
) -> Result<Option<LinearComponent>> {
    let k1 = h.col_count();
    // J = (H | −y_1 | … | −y_p), right-hand side c.
    let matrix: Vec<Vec<BigInt>> = h
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(
                periods
                    .iter()
                    .map(|y| -BigInt::from_biguint(Sign::Plus, y.entries()[i].clone())),
            );
            r
        })
        .collect();
    let sys = DiophantineSystem::new(matrix, c.to_bigints())?;
    let (constants, qs) = solve_lcq(&sys);
    if constants.is_empty() {
        return Ok(None);
    }
    let project = |v: &NatVector| NatVector::new(v.entries()[..k1].to_vec()).expect("k1 ≥ 1");
    Ok(Some(LinearComponent::from_parts(
        constants.iter().map(project).collect(),
        qs.iter().map(project).collect(),
    )))
}
