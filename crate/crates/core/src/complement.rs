//! Complement with respect to ℕ^k.
//!
//! The pipeline rewrites every linear component as a union of linear sets
//! with linearly independent periods, complements each of those directly,
//! and intersects the complements (De Morgan).
//!
//! For independent `P = {x_1..x_p}` extended by unit vectors to a basis
//! `x_1..x_k` with `Δ = |det(x_1 | … | x_k)|`, every `y ∈ ℕ^k` has a unique
//! integer expansion `Δ·y = Σ μ_i x_i`, and `y ∈ L(0, P)` exactly when every
//! `μ_i` with `i ≤ p` is a non-negative multiple of `Δ` and the remaining
//! `μ_i` vanish. The complement splits into three families:
//! some `μ_i < 0` (one component per nonempty sign pattern `K`), some
//! extension coefficient `μ_i > 0`, and some `μ_i ≢ 0 (mod Δ)`.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::diophantine::{minimal_solutions, solve_lcq, DiophantineSystem, VarConstraint};
use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::ops::intersect_many_checked;
use crate::oracle::OperationKind;
use crate::set::{LinearComponent, SemilinearSet};
use crate::vector::NatVector;

/// Caps on the size of intermediate and final representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceLimits {
    pub max_components: usize,
    pub max_norm_bits: u64,
}

impl Default for ResourceLimits {
    fn default() -> Self {
        ResourceLimits {
            max_components: 1_000_000,
            max_norm_bits: 4096,
        }
    }
}

impl ResourceLimits {
    pub fn new(max_components: usize, max_norm_bits: u64) -> Result<Self> {
        if max_components == 0 || max_norm_bits == 0 {
            return Err(Error::Schema("resource limits must be positive".into()));
        }
        Ok(ResourceLimits {
            max_components,
            max_norm_bits,
        })
    }

    fn check(&self, stage: &'static str, s: &SemilinearSet) -> Result<()> {
        self.check_count(stage, s.components().len())?;
        self.check_bits(stage, s.max_bits())
    }

    fn check_count(&self, stage: &'static str, count: usize) -> Result<()> {
        if count > self.max_components {
            return Err(Error::ResourceLimit {
                stage,
                metric: "components",
                value: count.to_string(),
                limit: self.max_components.to_string(),
            });
        }
        Ok(())
    }

    fn check_bits(&self, stage: &'static str, bits: u64) -> Result<()> {
        if bits > self.max_norm_bits {
            return Err(Error::ResourceLimit {
                stage,
                metric: "norm_bits",
                value: bits.to_string(),
                limit: self.max_norm_bits.to_string(),
            });
        }
        Ok(())
    }
}

/// Periods extended to a basis of ℚ^k by unit vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentBasis {
    pub original_periods: Vec<NatVector>,
    /// Zero-based indices `i` of the unit vectors `e_i` that were added.
    pub extension: Vec<usize>,
    pub delta: BigUint,
}

impl IndependentBasis {
    /// All basis vectors: the original periods followed by the extension.
    pub fn columns(&self, dim: usize) -> Vec<NatVector> {
        self.original_periods
            .iter()
            .cloned()
            .chain(self.extension.iter().map(|&i| NatVector::unit(dim, i)))
            .collect()
    }
}

fn as_rows(vs: &[NatVector]) -> Vec<Vec<BigInt>> {
    vs.iter().map(NatVector::to_bigints).collect()
}

/// Linear independence over ℚ; the empty set is independent.
pub fn is_independent(periods: &[NatVector]) -> bool {
    periods.is_empty() || linalg::column_rank(&as_rows(periods)) == periods.len()
}

/// Greedily adds `e_1, e_2, …` whenever the rank grows, until rank `dim`.
pub fn extend_to_basis(dim: usize, periods: &[NatVector]) -> Result<IndependentBasis> {
    for p in periods {
        check_dim(dim, p.dim())?;
    }
    if !is_independent(periods) {
        return Err(Error::DependentPeriods);
    }
    let mut columns = periods.to_vec();
    let mut extension = Vec::new();
    for i in 0..dim {
        if columns.len() == dim {
            break;
        }
        columns.push(NatVector::unit(dim, i));
        if is_independent(&columns) {
            extension.push(i);
        } else {
            columns.pop();
        }
    }
    let delta = linalg::abs_determinant_of_columns(&as_rows(&columns))
        .to_biguint()
        .expect("absolute value");
    Ok(IndependentBasis {
        original_periods: periods.to_vec(),
        extension,
        delta,
    })
}

/// Rewrites `L(c, P)` as a union of linear sets with independent periods.
///
/// While the periods are dependent, a minimal nonzero `a` with
/// `Σ_{j∈X} a_j x_j = Σ_{j∉X} a_j x_j` (`|X| ≤ m/2`) shows that every
/// element has some `x_j`, `j ∈ X`, used fewer than `a_j` times; so
/// `L(c, P) = ⋃_{j∈X, a_j>0} ⋃_{λ<a_j} L(c + λ·x_j, P ∖ {x_j})`.
pub fn decompose_independent(
    c: &NatVector,
    periods: &[NatVector],
    limits: &ResourceLimits,
) -> Result<SemilinearSet> {
    let dim = c.dim();
    for p in periods {
        check_dim(dim, p.dim())?;
    }
    let mut sorted: Vec<NatVector> = periods.iter().filter(|p| !p.is_zero()).cloned().collect();
    sorted.sort();
    sorted.dedup();
    let mut out = Vec::new();
    decompose_into(c.clone(), sorted, limits, &mut out)?;
    Ok(SemilinearSet::from_components(dim, out))
}

fn decompose_into(
    c: NatVector,
    periods: Vec<NatVector>,
    limits: &ResourceLimits,
    out: &mut Vec<LinearComponent>,
) -> Result<()> {
    limits.check_bits("decompose_independent", c.max_bits())?;
    if is_independent(&periods) {
        out.push(LinearComponent::from_parts(vec![c], periods));
        return limits.check_count("decompose_independent", out.len());
    }
    let (side, a) = find_dependency(&periods);
    for (pos, &j) in side.iter().enumerate() {
        let count = &a[pos];
        if count.is_zero() {
            continue;
        }
        let rest: Vec<NatVector> = periods
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, p)| p.clone())
            .collect();
        let mut constant = c.clone();
        let mut lambda = BigUint::zero();
        while &lambda < count {
            decompose_into(constant.clone(), rest.clone(), limits, out)?;
            constant = constant.add(&periods[j]);
            lambda += 1u8;
        }
    }
    Ok(())
}

/// First sign partition `X` (by size, then lexicographically) admitting a
/// nonzero solution of `(x_X | −x_Y)·a = 0`; returns `X` and the
/// coefficients of `X` in the least minimal solution.
fn find_dependency(periods: &[NatVector]) -> (Vec<usize>, Vec<BigUint>) {
    let m = periods.len();
    let dim = periods[0].dim();
    for size in 1..=m / 2 {
        for side in index_subsets(m, size) {
            let others: Vec<usize> = (0..m).filter(|i| !side.contains(i)).collect();
            let matrix: Vec<Vec<BigInt>> = (0..dim)
                .map(|row| {
                    side.iter()
                        .map(|&i| to_int(&periods[i].entries()[row]))
                        .chain(others.iter().map(|&i| -to_int(&periods[i].entries()[row])))
                        .collect()
                })
                .collect();
            let sys = DiophantineSystem::homogeneous(matrix).expect("non-empty matrix");
            let sols = minimal_solutions(&sys, true).solutions;
            if let Some(least) = sols.first() {
                return (side.clone(), least.entries()[..size].to_vec());
            }
        }
    }
    unreachable!("dependent periods always admit a dependency with |X| ≤ m/2")
}

fn index_subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

fn to_int(u: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, u.clone())
}

fn project(v: &NatVector, dim: usize) -> NatVector {
    NatVector::new(v.entries()[..dim].to_vec()).expect("dim ≥ 1")
}

/// Builds `(Δ·I | s_1·x_1 | … | s_n·x_n)` over the unknowns `(y, a)`.
fn delta_system(dim: usize, delta: &BigUint, columns: &[(NatVector, bool)]) -> DiophantineSystem {
    let delta = to_int(delta);
    let matrix = (0..dim)
        .map(|row| {
            let mut r: Vec<BigInt> = (0..dim)
                .map(|j| {
                    if j == row {
                        delta.clone()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect();
            r.extend(columns.iter().map(|(x, positive)| {
                let e = to_int(&x.entries()[row]);
                if *positive {
                    e
                } else {
                    -e
                }
            }));
            r
        })
        .collect();
    DiophantineSystem::homogeneous(matrix).expect("non-empty matrix")
}

/// `ℕ^k ∖ L(0, P)` for independent `P`.
pub fn complement_linear_origin(
    dim: usize,
    periods: &[NatVector],
    limits: &ResourceLimits,
) -> Result<SemilinearSet> {
    let basis = extend_to_basis(dim, periods)?;
    let xs = basis.columns(dim);
    let p = periods.len();
    let delta = &basis.delta;
    let mut comps = Vec::new();
    let mut push = |constants: Vec<NatVector>, periods: Vec<NatVector>| {
        if !constants.is_empty() {
            comps.push(LinearComponent::from_parts(
                constants.iter().map(|v| project(v, dim)).collect(),
                periods.iter().map(|v| project(v, dim)).collect(),
            ));
        }
    };

    // Some μ_i < 0: Δ·y + Σ_{i∈K} a_i x_i = Σ_{i∉K} a_i x_i with a_K > 0.
    for mask in 1usize..(1 << dim) {
        let cols: Vec<(NatVector, bool)> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), mask & (1 << i) != 0))
            .collect();
        let mut sys = delta_system(dim, delta, &cols);
        for i in (0..dim).filter(|i| mask & (1 << i) != 0) {
            sys = sys.with_constraint(dim + i, VarConstraint::positive())?;
        }
        let (d, q) = solve_lcq(&sys);
        push(d, q);
    }

    // All μ_i ≥ 0 and some extension coefficient positive.
    let all_negative: Vec<(NatVector, bool)> = xs.iter().map(|x| (x.clone(), false)).collect();
    for i in p..dim {
        let sys = delta_system(dim, delta, &all_negative)
            .with_constraint(dim + i, VarConstraint::positive())?;
        let (d, q) = solve_lcq(&sys);
        push(d, q);
    }

    // μ_i ≢ 0 (mod Δ) for some original period i.
    if delta > &BigUint::one() {
        let own: Vec<(NatVector, bool)> = xs[..p].iter().map(|x| (x.clone(), false)).collect();
        for i in 0..p {
            let mut constants = Vec::new();
            let mut residue = BigUint::one();
            let mut shared_periods = Vec::new();
            while &residue < delta {
                let sys = delta_system(dim, delta, &own).with_constraint(
                    dim + i,
                    VarConstraint::congruent(delta.clone(), residue.clone())?,
                )?;
                let (r, q) = solve_lcq(&sys);
                constants.extend(r);
                shared_periods = q;
                residue += 1u8;
            }
            push(constants, shared_periods);
        }
    }

    let out = SemilinearSet::from_components(dim, comps);
    limits.check("complement_linear_origin", &out)?;
    Ok(out)
}

/// `ℕ^k ∖ L(x0, P)` for independent `P`.
pub fn complement_linear(
    x0: &NatVector,
    periods: &[NatVector],
    limits: &ResourceLimits,
) -> Result<SemilinearSet> {
    let dim = x0.dim();
    let mut comps = Vec::new();
    // Points with y_j < (x0)_j on some axis.
    for j in 0..dim {
        let bound = &x0.entries()[j];
        if bound.is_zero() {
            continue;
        }
        let mut constants = Vec::new();
        let mut y = BigUint::zero();
        while &y < bound {
            let mut v = NatVector::zero(dim).into_entries();
            v[j] = y.clone();
            constants.push(NatVector::new(v).expect("dim ≥ 1"));
            y += 1u8;
        }
        let units = (0..dim)
            .filter(|&i| i != j)
            .map(|i| NatVector::unit(dim, i))
            .collect();
        comps.push(LinearComponent::from_parts(constants, units));
        limits.check_count("complement_linear", comps.len())?;
    }
    let shifted = complement_linear_origin(dim, periods, limits)?;
    for comp in shifted.components() {
        comps.push(LinearComponent::from_parts(
            comp.constants().iter().map(|c| c.add(x0)).collect(),
            comp.periods().to_vec(),
        ));
    }
    let out = SemilinearSet::from_components(dim, comps);
    limits.check("complement_linear", &out)?;
    Ok(out)
}

/// One step of the complement pipeline, kept for certification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRecord {
    pub kind: OperationKind,
    pub inputs: Vec<SemilinearSet>,
    pub output: SemilinearSet,
}

/// `ℕ^k ∖ S`. The complement of ∅ is `L(0, {e_1, …, e_k})`.
pub fn complement(s: &SemilinearSet, limits: &ResourceLimits) -> Result<SemilinearSet> {
    complement_traced(s, limits).map(|(out, _)| out)
}

/// As [`complement`], also returning every intermediate stage.
pub fn complement_traced(
    s: &SemilinearSet,
    limits: &ResourceLimits,
) -> Result<(SemilinearSet, Vec<StageRecord>)> {
    let dim = s.dim();
    if s.is_empty_representation() {
        let out = SemilinearSet::universe(dim);
        let trace = vec![StageRecord {
            kind: OperationKind::Complement,
            inputs: vec![s.clone()],
            output: out.clone(),
        }];
        return Ok((out, trace));
    }
    let mut trace = Vec::new();
    let expanded = s.expand_constants();

    let mut pieces = Vec::new();
    for comp in expanded.components() {
        let single = SemilinearSet::from_components(dim, vec![comp.clone()]);
        let parts = decompose_independent(&comp.constants()[0], comp.periods(), limits)?;
        trace.push(StageRecord {
            kind: OperationKind::Decompose,
            inputs: vec![single],
            output: parts.clone(),
        });
        pieces.extend(parts.components().iter().cloned());
    }
    let independent = SemilinearSet::from_components(dim, pieces);
    limits.check("decompose_independent", &independent)?;

    let mut complements = Vec::with_capacity(independent.components().len());
    for comp in independent.components() {
        let x0 = &comp.constants()[0];
        let single = SemilinearSet::from_components(dim, vec![comp.clone()]);
        let origin = complement_linear_origin(dim, comp.periods(), limits)?;
        trace.push(StageRecord {
            kind: OperationKind::ComplementLinearOrigin,
            inputs: vec![SemilinearSet::from_components(
                dim,
                vec![LinearComponent::from_parts(
                    vec![NatVector::zero(dim)],
                    comp.periods().to_vec(),
                )],
            )],
            output: origin,
        });
        let c = complement_linear(x0, comp.periods(), limits)?;
        trace.push(StageRecord {
            kind: OperationKind::ComplementLinear,
            inputs: vec![single],
            output: c.clone(),
        });
        complements.push(c);
    }

    let check = |r: &SemilinearSet| limits.check("intersect_many", r);
    let out = intersect_many_checked(&complements, &check)?;
    limits.check("complement", &out)?;
    trace.push(StageRecord {
        kind: OperationKind::IntersectMany,
        inputs: complements,
        output: out.clone(),
    });
    trace.push(StageRecord {
        kind: OperationKind::ComplementIndependent,
        inputs: vec![independent],
        output: out.clone(),
    });
    trace.push(StageRecord {
        kind: OperationKind::Complement,
        inputs: vec![s.clone()],
        output: out.clone(),
    });
    Ok((out, trace))
}
