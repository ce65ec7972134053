//! Minimal non-negative solutions of linear Diophantine systems `A·x = b`.
//!
//! The search is a completion procedure in the style of Contejean and Devie,
//! run on the homogenized system `(A | −b)·(x, y) = 0` with `y ≤ 1`: starting
//! from unit vectors, a candidate `x` is extended by `e_j` only when the step
//! moves `A·x` towards the origin (`⟨A·x, A·e_j⟩ < 0`), and candidates that
//! dominate a solution already found are discarded. Every coordinate is
//! additionally capped by the norm bound `(t+1)·M̂`, where `M̂` is a
//! Hadamard-style overestimate of the largest `r×r` subdeterminant of
//! `(A | b)`; no minimal solution lies outside that box.
//!
//! Per-variable substitutions `x_j = scale·z_j + offset` express positivity
//! (`offset = 1`), divisibility (`scale = Δ`) and congruence
//! (`scale = Δ, offset = r`) constraints. The substitution is strictly
//! monotone per coordinate, so minimal `z`-solutions map exactly onto minimal
//! constrained `x`-solutions.

use std::collections::HashSet;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::vector::NatVector;

/// `x_j = scale·z_j + offset` with `scale ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarConstraint {
    scale: BigUint,
    offset: BigUint,
}

impl VarConstraint {
    pub fn new(scale: BigUint, offset: BigUint) -> Result<Self> {
        if scale.is_zero() {
            return Err(Error::Schema(
                "substitution scale must be at least 1".into(),
            ));
        }
        Ok(VarConstraint { scale, offset })
    }

    /// `x_j ≥ 1`.
    pub fn positive() -> Self {
        VarConstraint {
            scale: BigUint::one(),
            offset: BigUint::one(),
        }
    }

    /// `x_j ≡ residue (mod modulus)`.
    pub fn congruent(modulus: BigUint, residue: BigUint) -> Result<Self> {
        if residue >= modulus {
            return Err(Error::Schema("residue must be below the modulus".into()));
        }
        Self::new(modulus, residue)
    }

    pub fn scale(&self) -> &BigUint {
        &self.scale
    }

    pub fn offset(&self) -> &BigUint {
        &self.offset
    }

    fn admits(&self, x: &BigUint) -> bool {
        x >= &self.offset && ((x - &self.offset) % &self.scale).is_zero()
    }
}

/// An `s×t` system `A·x = b` over ℕ^t with optional substitutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantineSystem {
    matrix: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
    constraints: Vec<Option<VarConstraint>>,
}

impl DiophantineSystem {
    pub fn new(matrix: Vec<Vec<BigInt>>, rhs: Vec<BigInt>) -> Result<Self> {
        let cols = matrix.first().map_or(0, Vec::len);
        if matrix.is_empty() || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::RaggedMatrix);
        }
        if rhs.len() != matrix.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.len(),
                found: rhs.len(),
            });
        }
        Ok(DiophantineSystem {
            constraints: vec![None; cols],
            matrix,
            rhs,
        })
    }

    pub fn from_i64(matrix: &[&[i64]], rhs: &[i64]) -> Result<Self> {
        let m = matrix
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(m, rhs.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn homogeneous(matrix: Vec<Vec<BigInt>>) -> Result<Self> {
        let rows = matrix.len();
        Self::new(matrix, vec![BigInt::zero(); rows])
    }

    pub fn with_constraint(mut self, var: usize, constraint: VarConstraint) -> Result<Self> {
        let t = self.vars();
        let slot = self
            .constraints
            .get_mut(var)
            .ok_or(Error::DimensionMismatch {
                expected: t,
                found: var + 1,
            })?;
        *slot = Some(constraint);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn vars(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[BigInt] {
        &self.rhs
    }

    pub fn constraints(&self) -> &[Option<VarConstraint>] {
        &self.constraints
    }

    /// `b = 0`.
    pub fn is_homogeneous(&self) -> bool {
        self.rhs.iter().all(Zero::is_zero)
    }

    fn scale_of(&self, j: usize) -> BigUint {
        self.constraints[j]
            .as_ref()
            .map_or_else(BigUint::one, |c| c.scale.clone())
    }

    fn offset_of(&self, j: usize) -> BigUint {
        self.constraints[j]
            .as_ref()
            .map_or_else(BigUint::zero, |c| c.offset.clone())
    }

    /// The equivalent unconstrained system over the `z` variables.
    pub fn substituted(&self) -> DiophantineSystem {
        let t = self.vars();
        let scales: Vec<BigInt> = (0..t).map(|j| to_int(&self.scale_of(j))).collect();
        let offsets: Vec<BigInt> = (0..t).map(|j| to_int(&self.offset_of(j))).collect();
        let matrix = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(&scales).map(|(a, s)| a * s).collect())
            .collect();
        let rhs = self
            .matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| b - row.iter().zip(&offsets).map(|(a, o)| a * o).sum::<BigInt>())
            .collect();
        DiophantineSystem {
            matrix,
            rhs,
            constraints: vec![None; t],
        }
    }

    /// Whether `x` satisfies the equations and every substitution record.
    pub fn is_solution(&self, x: &[BigUint]) -> bool {
        if x.len() != self.vars() {
            return false;
        }
        let fits = self
            .constraints
            .iter()
            .zip(x)
            .all(|(c, xj)| c.as_ref().is_none_or(|c| c.admits(xj)));
        fits && self.matrix.iter().zip(&self.rhs).all(|(row, b)| {
            row.iter()
                .zip(x)
                .map(|(a, xj)| a * to_int(xj))
                .sum::<BigInt>()
                == *b
        })
    }

    fn to_x(&self, z: &[BigUint]) -> Vec<BigUint> {
        z.iter()
            .enumerate()
            .map(|(j, zj)| zj * self.scale_of(j) + self.offset_of(j))
            .collect()
    }

    fn to_x_homogeneous(&self, z: &[BigUint]) -> Vec<BigUint> {
        z.iter()
            .enumerate()
            .map(|(j, zj)| zj * self.scale_of(j))
            .collect()
    }
}

/// Minimal solutions together with the per-coordinate box that was searched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalSolutionSet {
    pub solutions: Vec<NatVector>,
    /// Bound on the norm of every reported solution, in original coordinates.
    pub norm_bound_used: BigUint,
}

/// Least integer ≥ `r^{r/2} · ∏` (largest `r` column maxima of `(A|b)`),
/// with `r = rank(A)`, evaluated on the substituted system.
pub fn hadamard_bound(sys: &DiophantineSystem) -> BigUint {
    let sys = sys.substituted();
    let r = linalg::rank(&sys.matrix);
    if r == 0 {
        return BigUint::one();
    }
    let t = sys.vars();
    let mut maxima: Vec<BigUint> = (0..t)
        .map(|j| {
            sys.matrix
                .iter()
                .map(|row| row[j].magnitude().clone())
                .max()
                .unwrap_or_default()
        })
        .collect();
    maxima.push(
        sys.rhs
            .iter()
            .map(|b| b.magnitude().clone())
            .max()
            .unwrap_or_default(),
    );
    maxima.sort_by(|a, b| b.cmp(a));
    let product: BigUint = maxima.iter().take(r).product();
    let r_big = BigUint::from(r);
    if r.is_multiple_of(2) {
        r_big.pow((r / 2) as u32) * product
    } else {
        // ⌈√r · r^{(r−1)/2} · product⌉ = ⌈√(r · X²)⌉
        let x = r_big.pow(((r - 1) / 2) as u32) * product;
        ceil_sqrt(&(&r_big * &x * &x))
    }
}

pub(crate) fn ceil_sqrt(n: &BigUint) -> BigUint {
    let s = n.sqrt();
    if &(&s * &s) == n {
        s
    } else {
        s + 1u8
    }
}

/// `(t+1) · hadamard_bound(sys)`: no minimal solution of the substituted
/// system has a coordinate above this value.
pub fn minimal_norm_bound(sys: &DiophantineSystem) -> BigUint {
    BigUint::from(sys.vars() + 1) * hadamard_bound(sys)
}

/// Minimal elements of `{x : A·x = b}` (without `0` when
/// `homogeneous_exclude_zero` is set), in original coordinates, sorted.
pub fn minimal_solutions(
    sys: &DiophantineSystem,
    homogeneous_exclude_zero: bool,
) -> MinimalSolutionSet {
    let sub = sys.substituted();
    let bound = minimal_norm_bound(sys);
    let offsets_zero = (0..sys.vars()).all(|j| sys.offset_of(j).is_zero());
    let (inhom, hom) = if homogeneous_exclude_zero && offsets_zero && is_zero_vec(&sub.rhs) {
        (Vec::new(), completion(&sub, &bound).1)
    } else {
        (completion(&sub, &bound).0, Vec::new())
    };
    let mut solutions: Vec<NatVector> = inhom
        .iter()
        .chain(&hom)
        .map(|z| NatVector::new(sys.to_x(z)).expect("t ≥ 1"))
        .collect();
    solutions.sort();
    MinimalSolutionSet {
        solutions,
        norm_bound_used: x_bound(sys, &bound),
    }
}

/// Constants `C` (minimal solutions of the constrained system) and periods
/// `Q` (minimal nonzero solutions of the homogeneous substituted system,
/// mapped back with the scales only) such that the constrained solution set
/// is exactly `L(C, Q)`.
pub fn solve_lcq(sys: &DiophantineSystem) -> (Vec<NatVector>, Vec<NatVector>) {
    let sub = sys.substituted();
    let bound = minimal_norm_bound(sys);
    let (inhom, hom) = completion(&sub, &bound);
    let mut constants: Vec<NatVector> = inhom
        .iter()
        .map(|z| NatVector::new(sys.to_x(z)).expect("t ≥ 1"))
        .collect();
    let mut periods: Vec<NatVector> = hom
        .iter()
        .map(|z| NatVector::new(sys.to_x_homogeneous(z)).expect("t ≥ 1"))
        .collect();
    constants.sort();
    periods.sort();
    (constants, periods)
}

fn x_bound(sys: &DiophantineSystem, z_bound: &BigUint) -> BigUint {
    (0..sys.vars())
        .map(|j| z_bound * sys.scale_of(j) + sys.offset_of(j))
        .max()
        .unwrap_or_default()
}

fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn to_int(u: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, u.clone())
}

/// Returns `(minimal solutions of A·z = b, minimal nonzero solutions of
/// A·z = 0)` for an unconstrained system, searching `[0, bound]^t`.
fn completion(sys: &DiophantineSystem, bound: &BigUint) -> (Vec<Vec<BigUint>>, Vec<Vec<BigUint>>) {
    let homogeneous = is_zero_vec(&sys.rhs);
    // Columns of the homogenized matrix (A | −b).
    let mut columns: Vec<Vec<BigInt>> = (0..sys.vars())
        .map(|j| sys.matrix.iter().map(|row| row[j].clone()).collect())
        .collect();
    let mut caps = vec![bound.clone(); sys.vars()];
    if !homogeneous {
        columns.push(sys.rhs.iter().map(|b| -b).collect());
        caps.push(BigUint::one());
    }

    let found = if fits_i128(&columns, &caps) {
        let cols: Vec<Vec<i128>> = columns
            .iter()
            .map(|c| c.iter().map(|x| x.to_i128().expect("checked")).collect())
            .collect();
        let caps: Vec<i128> = caps.iter().map(|c| c.to_i128().expect("checked")).collect();
        run_completion(&cols, &caps)
            .into_iter()
            .map(|v| {
                v.into_iter()
                    .map(|x| BigUint::from(x as u128))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    } else {
        let caps: Vec<BigInt> = caps.iter().map(to_int).collect();
        run_completion(&columns, &caps)
            .into_iter()
            .map(|v| {
                v.into_iter()
                    .map(|x| x.to_biguint().expect("non-negative"))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };

    let t = sys.vars();
    let mut inhom = Vec::new();
    let mut hom = Vec::new();
    for mut v in found {
        if homogeneous {
            hom.push(v);
        } else if v[t].is_one() {
            v.truncate(t);
            inhom.push(v);
        } else {
            v.truncate(t);
            hom.push(v);
        }
    }
    if homogeneous {
        inhom.push(vec![BigUint::zero(); t]);
    }
    (inhom, hom)
}

/// Whether every intermediate quantity of the completion stays well inside
/// the i128 range.
fn fits_i128(columns: &[Vec<BigInt>], caps: &[BigUint]) -> bool {
    let max_entry = columns
        .iter()
        .flatten()
        .map(|x| x.magnitude().clone())
        .max()
        .unwrap_or_default();
    let rows = columns.first().map_or(0, Vec::len);
    // |A·x| ≤ Σ_j cap_j·max_entry, dot products ≤ rows·|A·x|·max_entry.
    let reach: BigUint = caps.iter().map(|c| c * &max_entry).sum();
    let dot = reach * &max_entry * BigUint::from(rows.max(1));
    dot.bits() < 120
}

trait Scalar: Clone + Ord + Hash + Signed {}
impl<T: Clone + Ord + Hash + Signed> Scalar for T {}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn run_completion<T: Scalar>(columns: &[Vec<T>], caps: &[T]) -> Vec<Vec<T>> {
    let t = columns.len();
    let rows = columns.first().map_or(0, Vec::len);
    let mut solutions: Vec<Vec<T>> = Vec::new();
    let mut frontier: Vec<(Vec<T>, Vec<T>)> = Vec::new();

    for j in 0..t {
        if caps[j] < T::one() {
            continue;
        }
        let mut x = vec![T::zero(); t];
        x[j] = T::one();
        let ax = columns[j].clone();
        if ax.iter().all(Zero::is_zero) {
            solutions.push(x);
        } else {
            frontier.push((x, ax));
        }
    }

    while !frontier.is_empty() {
        let mut seen: HashSet<Vec<T>> = HashSet::new();
        let mut next: Vec<(Vec<T>, Vec<T>)> = Vec::new();
        for (x, ax) in &frontier {
            for j in 0..t {
                if x[j] >= caps[j] || !dot(ax, &columns[j]).is_negative() {
                    continue;
                }
                let mut y = x.clone();
                y[j] = y[j].clone() + T::one();
                if solutions.iter().any(|s| dominates(&y, s)) || !seen.insert(y.clone()) {
                    continue;
                }
                let ay: Vec<T> = (0..rows)
                    .map(|i| ax[i].clone() + columns[j][i].clone())
                    .collect();
                next.push((y, ay));
            }
        }
        frontier.clear();
        // Candidates of one level share the same coordinate sum, so the new
        // solutions are pairwise incomparable.
        for (y, ay) in next {
            if ay.iter().all(Zero::is_zero) {
                solutions.push(y);
            } else {
                frontier.push((y, ay));
            }
        }
    }
    solutions
}

fn dominates<T: Scalar>(y: &[T], s: &[T]) -> bool {
    y.iter().zip(s).all(|(a, b)| a >= b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nv(e: &[u64]) -> NatVector {
        NatVector::from_u64s(e)
    }

    #[test]
    fn hadamard_examples() {
        let sys = DiophantineSystem::from_i64(&[&[2, -3]], &[0]).unwrap();
        assert_eq!(hadamard_bound(&sys), BigUint::from(3u8));
        assert_eq!(minimal_norm_bound(&sys), BigUint::from(9u8));

        let id = DiophantineSystem::from_i64(&[&[1, 0], &[0, 1]], &[0, 0]).unwrap();
        assert!(hadamard_bound(&id) >= BigUint::one());

        let sys = DiophantineSystem::from_i64(&[&[1, 1], &[2, 0]], &[0, 0]).unwrap();
        let m = hadamard_bound(&sys);
        // r = 2, top column maxima {2, 1}, 2^{2/2} · 2 · 1 = 4
        assert_eq!(m, BigUint::from(4u8));
        assert_eq!(minimal_norm_bound(&sys), BigUint::from(3u8) * m);

        let one = DiophantineSystem::from_i64(&[&[1]], &[0]).unwrap();
        assert_eq!(minimal_norm_bound(&one), BigUint::from(2u8));
    }

    #[test]
    fn hadamard_odd_rank_rounds_up() {
        // r = 3, maxima {3,3,3}: 3^{3/2}·27 = 140.29… → 141
        let sys =
            DiophantineSystem::from_i64(&[&[3, 0, 0], &[0, 3, 0], &[0, 0, 3]], &[0, 0, 0]).unwrap();
        assert_eq!(hadamard_bound(&sys), BigUint::from(141u16));
    }

    #[test]
    fn minimal_solution_examples() {
        let sys = DiophantineSystem::from_i64(&[&[2, -3]], &[0]).unwrap();
        assert_eq!(minimal_solutions(&sys, true).solutions, vec![nv(&[3, 2])]);
        assert_eq!(minimal_solutions(&sys, false).solutions, vec![nv(&[0, 0])]);

        let sys = DiophantineSystem::from_i64(&[&[2]], &[4]).unwrap();
        assert_eq!(minimal_solutions(&sys, false).solutions, vec![nv(&[2])]);

        let sys = DiophantineSystem::from_i64(&[&[1, -2]], &[0])
            .unwrap()
            .with_constraint(1, VarConstraint::positive())
            .unwrap();
        assert_eq!(minimal_solutions(&sys, false).solutions, vec![nv(&[2, 1])]);

        let sys = DiophantineSystem::from_i64(&[&[1, 1]], &[2]).unwrap();
        assert_eq!(
            minimal_solutions(&sys, false).solutions,
            vec![nv(&[0, 2]), nv(&[1, 1]), nv(&[2, 0])]
        );
    }

    #[test]
    fn lcq_examples() {
        let sys = DiophantineSystem::from_i64(&[&[2, -3]], &[0]).unwrap();
        assert_eq!(solve_lcq(&sys), (vec![nv(&[0, 0])], vec![nv(&[3, 2])]));

        let sys = DiophantineSystem::from_i64(&[&[2]], &[4]).unwrap();
        assert_eq!(solve_lcq(&sys), (vec![nv(&[2])], vec![]));

        let sys = DiophantineSystem::from_i64(&[&[1, -1]], &[1]).unwrap();
        assert_eq!(solve_lcq(&sys), (vec![nv(&[1, 0])], vec![nv(&[1, 1])]));
    }

    #[test]
    fn infeasible_system_is_empty() {
        let sys = DiophantineSystem::from_i64(&[&[2, 4]], &[3]).unwrap();
        assert!(minimal_solutions(&sys, false).solutions.is_empty());
        let sys = DiophantineSystem::from_i64(&[&[1, 1]], &[-1]).unwrap();
        assert!(minimal_solutions(&sys, false).solutions.is_empty());
    }

    #[test]
    fn congruence_constraint() {
        // x − y = 0 with x ≡ 1 (mod 3): minimal (1,1); periods scaled (3,3).
        let sys = DiophantineSystem::from_i64(&[&[1, -1]], &[0])
            .unwrap()
            .with_constraint(0, VarConstraint::congruent(3u8.into(), 1u8.into()).unwrap())
            .unwrap();
        assert_eq!(solve_lcq(&sys), (vec![nv(&[1, 1])], vec![nv(&[3, 3])]));
        assert!(sys.is_solution(&[4u8.into(), 4u8.into()]));
        assert!(!sys.is_solution(&[3u8.into(), 3u8.into()]));
    }

    #[test]
    fn wide_path_matches_narrow_path() {
        let cols: Vec<Vec<i128>> = vec![vec![2, 1], vec![-3, 0], vec![0, -2], vec![1, -1]];
        let caps = vec![12i128; 4];
        let big_cols: Vec<Vec<BigInt>> = cols
            .iter()
            .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let big_caps = vec![BigInt::from(12); 4];
        let mut a: Vec<Vec<BigInt>> = run_completion(&cols, &caps)
            .into_iter()
            .map(|v| v.into_iter().map(BigInt::from).collect())
            .collect();
        let mut b = run_completion(&big_cols, &big_caps);
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }

    #[test]
    fn rejects_malformed_systems() {
        assert_eq!(
            DiophantineSystem::new(vec![], vec![]),
            Err(Error::EmptyMatrix)
        );
        let m = vec![vec![BigInt::one()], vec![BigInt::one(), BigInt::one()]];
        assert_eq!(
            DiophantineSystem::new(m, vec![BigInt::zero(); 2]),
            Err(Error::RaggedMatrix)
        );
        assert!(VarConstraint::new(BigUint::zero(), BigUint::zero()).is_err());
    }
}
