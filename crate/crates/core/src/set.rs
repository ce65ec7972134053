//! Semilinear sets: finite unions of linear components `L(C, P)`.
//!
//! All constructors normalize: zero periods are dropped, duplicate vectors and
//! duplicate components are removed, and everything is kept in canonical
//! (lexicographic) order so that equal representations serialize identically.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::vector::{set_norm, NatVector};

/// One linear component `L(C, P) = { c + Σ λ_i p_i : c ∈ C, λ ∈ ℕ^|P| }`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearComponent {
    constants: Vec<NatVector>,
    periods: Vec<NatVector>,
}

impl LinearComponent {
    pub fn new(constants: Vec<NatVector>, periods: Vec<NatVector>) -> Result<Self> {
        let dim = constants.first().ok_or(Error::EmptyConstants)?.dim();
        for v in constants.iter().chain(&periods) {
            check_dim(dim, v.dim())?;
        }
        Ok(Self::from_parts(constants, periods))
    }

    /// A linear set with a single constant.
    pub fn linear(constant: NatVector, periods: Vec<NatVector>) -> Result<Self> {
        Self::new(vec![constant], periods)
    }

    /// Caller guarantees non-empty constants and a common dimension.
    pub(crate) fn from_parts(mut constants: Vec<NatVector>, mut periods: Vec<NatVector>) -> Self {
        debug_assert!(!constants.is_empty());
        constants.sort();
        constants.dedup();
        periods.retain(|p| !p.is_zero());
        periods.sort();
        periods.dedup();
        LinearComponent { constants, periods }
    }

    pub fn dim(&self) -> usize {
        self.constants[0].dim()
    }

    pub fn constants(&self) -> &[NatVector] {
        &self.constants
    }

    pub fn periods(&self) -> &[NatVector] {
        &self.periods
    }

    pub fn period_norm(&self) -> BigUint {
        set_norm(&self.periods)
    }

    pub fn constant_norm(&self) -> BigUint {
        set_norm(&self.constants)
    }

    pub fn contains(&self, y: &NatVector) -> bool {
        let periods = search_order(&self.periods);
        let support = suffix_support(&periods, y.dim());
        self.constants.iter().any(|c| match y.checked_sub(c) {
            Some(residual) => combination_exists(residual.into_entries(), &periods, &support, 0),
            None => false,
        })
    }
}

/// Periods sorted by decreasing norm; ties broken canonically.
fn search_order(periods: &[NatVector]) -> Vec<&NatVector> {
    let mut order: Vec<&NatVector> = periods.iter().collect();
    order.sort_by(|a, b| b.norm().cmp(&a.norm()).then_with(|| a.cmp(b)));
    order
}

/// `support[i][j]` is true when some period at position ≥ i has a positive
/// j-th entry.
fn suffix_support(periods: &[&NatVector], dim: usize) -> Vec<Vec<bool>> {
    let mut support = vec![vec![false; dim]; periods.len() + 1];
    for i in (0..periods.len()).rev() {
        let (head, tail) = support.split_at_mut(i + 1);
        head[i].copy_from_slice(&tail[0]);
        for (j, e) in periods[i].entries().iter().enumerate() {
            if !e.is_zero() {
                head[i][j] = true;
            }
        }
    }
    support
}

/// Depth-first search for λ ∈ ℕ^{periods} with Σ λ_i p_i = residual.
fn combination_exists(
    residual: Vec<BigUint>,
    periods: &[&NatVector],
    support: &[Vec<bool>],
    idx: usize,
) -> bool {
    if residual.iter().all(Zero::is_zero) {
        return true;
    }
    if residual
        .iter()
        .zip(&support[idx])
        .any(|(r, &covered)| !r.is_zero() && !covered)
    {
        return false;
    }
    // support[idx] covers a nonzero residual, so idx < periods.len().
    let period = periods[idx].entries();
    let mut max_coeff: Option<BigUint> = None;
    for (r, p) in residual.iter().zip(period) {
        if !p.is_zero() {
            let q = r / p;
            max_coeff = Some(match max_coeff {
                Some(m) if m <= q => m,
                _ => q,
            });
        }
    }
    let max_coeff = max_coeff.expect("periods are nonzero");

    if idx + 1 == periods.len() {
        return residual
            .iter()
            .zip(period)
            .all(|(r, p)| *r == &max_coeff * p);
    }

    // Start from the largest coefficient and walk down.
    let mut rest: Vec<BigUint> = residual
        .iter()
        .zip(period)
        .map(|(r, p)| r - &max_coeff * p)
        .collect();
    let mut coeff = max_coeff;
    loop {
        if combination_exists(rest.clone(), periods, support, idx + 1) {
            return true;
        }
        if coeff.is_zero() {
            return false;
        }
        coeff -= 1u8;
        for (r, p) in rest.iter_mut().zip(period) {
            *r += p;
        }
    }
}

/// A finite union of linear components in ℕ^k. Zero components denote ∅.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SemilinearSet {
    dim: usize,
    components: Vec<LinearComponent>,
}

impl SemilinearSet {
    pub fn new(dim: usize, components: Vec<LinearComponent>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for c in &components {
            check_dim(dim, c.dim())?;
        }
        Ok(Self::from_components(dim, components))
    }

    pub(crate) fn from_components(dim: usize, mut components: Vec<LinearComponent>) -> Self {
        components.sort();
        components.dedup();
        SemilinearSet { dim, components }
    }

    pub fn empty(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        SemilinearSet {
            dim,
            components: Vec::new(),
        }
    }

    /// ℕ^k, represented as `L(0, {e_1, …, e_k})`.
    pub fn universe(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        let units = (0..dim).map(|i| NatVector::unit(dim, i)).collect();
        SemilinearSet {
            dim,
            components: vec![LinearComponent::from_parts(
                vec![NatVector::zero(dim)],
                units,
            )],
        }
    }

    /// Convenience for tests and examples: one linear set `L(c, P)`.
    pub fn linear(constant: &[u64], periods: &[&[u64]]) -> Result<Self> {
        let c = NatVector::from_u64s(constant);
        let ps = periods.iter().map(|p| NatVector::from_u64s(p)).collect();
        let comp = LinearComponent::linear(c, ps)?;
        Self::new(comp.dim(), vec![comp])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[LinearComponent] {
        &self.components
    }

    pub fn is_empty_representation(&self) -> bool {
        self.components.is_empty()
    }

    /// Re-applies normalization; already-normalized sets are returned
    /// unchanged.
    pub fn normalize(&self) -> SemilinearSet {
        let comps = self
            .components
            .iter()
            .map(|c| LinearComponent::from_parts(c.constants.clone(), c.periods.clone()))
            .collect();
        Self::from_components(self.dim, comps)
    }

    pub fn metrics(&self) -> Metrics {
        let mut m = Metrics {
            index_size: self.components.len(),
            ..Metrics::default()
        };
        for c in &self.components {
            m.max_period_card = m.max_period_card.max(c.periods.len());
            m.max_period_norm = m.max_period_norm.max(c.period_norm());
            m.max_const_norm = m.max_const_norm.max(c.constant_norm());
        }
        m.nu = m.max_period_norm.clone().max(m.max_const_norm.clone());
        m
    }

    /// Rewrites every `L(C, Q)` as `⋃_{c ∈ C} L(c, Q)`.
    pub fn expand_constants(&self) -> SemilinearSet {
        let comps = self
            .components
            .iter()
            .flat_map(|comp| {
                comp.constants.iter().map(move |c| LinearComponent {
                    constants: vec![c.clone()],
                    periods: comp.periods.clone(),
                })
            })
            .collect();
        Self::from_components(self.dim, comps)
    }

    /// Total number of constants, i.e. the index size after expansion.
    pub fn constant_count(&self) -> usize {
        self.components.iter().map(|c| c.constants.len()).sum()
    }

    /// Exact membership test.
    pub fn member(&self, y: &NatVector) -> Result<bool> {
        check_dim(self.dim, y.dim())?;
        Ok(self.components.iter().any(|c| c.contains(y)))
    }

    /// Largest entry bit length anywhere in the representation.
    pub fn max_bits(&self) -> u64 {
        self.components
            .iter()
            .flat_map(|c| c.constants.iter().chain(&c.periods))
            .map(NatVector::max_bits)
            .max()
            .unwrap_or(0)
    }
}

/// Size parameters of a representation: |I|, m, n, ℓ and ν = max(n, ℓ).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metrics {
    pub index_size: usize,
    pub max_period_card: usize,
    pub max_period_norm: BigUint,
    pub max_const_norm: BigUint,
    pub nu: BigUint,
}

impl Metrics {
    /// Componentwise maximum, used for multi-operand bounds.
    pub fn join(&self, other: &Metrics) -> Metrics {
        Metrics {
            index_size: self.index_size.max(other.index_size),
            max_period_card: self.max_period_card.max(other.max_period_card),
            max_period_norm: (&self.max_period_norm).max(&other.max_period_norm).clone(),
            max_const_norm: (&self.max_const_norm).max(&other.max_const_norm).clone(),
            nu: (&self.nu).max(&other.nu).clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &[u64]) -> NatVector {
        NatVector::from_u64s(e)
    }

    fn even() -> SemilinearSet {
        SemilinearSet::linear(&[0], &[&[2]]).unwrap()
    }

    fn odd() -> SemilinearSet {
        SemilinearSet::linear(&[1], &[&[2]]).unwrap()
    }

    #[test]
    fn construction_examples() {
        let e = even();
        assert_eq!(e.components().len(), 1);
        assert_eq!(e.components()[0].periods(), &[v(&[2])]);

        let empty = SemilinearSet::new(1, vec![]).unwrap();
        assert!(empty.is_empty_representation());

        let comp = LinearComponent::linear(v(&[0, 0]), vec![v(&[0, 0]), v(&[1, 1])]).unwrap();
        assert_eq!(comp.periods(), &[v(&[1, 1])]);
    }

    #[test]
    fn construction_errors() {
        let bad = LinearComponent::linear(v(&[0]), vec![v(&[1, 1])]);
        assert_eq!(
            bad,
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        );
        let comp = LinearComponent::linear(v(&[0]), vec![]).unwrap();
        assert_eq!(
            SemilinearSet::new(2, vec![comp]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            LinearComponent::new(vec![], vec![]),
            Err(Error::EmptyConstants)
        );
        assert_eq!(SemilinearSet::new(0, vec![]), Err(Error::ZeroDimension));
    }

    #[test]
    fn metrics_examples() {
        let even = even();
        let odd = odd();
        let mut comps = even.components().to_vec();
        comps.extend_from_slice(odd.components());
        let s = SemilinearSet::new(1, comps).unwrap();
        let m = s.metrics();
        assert_eq!(m.index_size, 2);
        assert_eq!(m.max_period_card, 1);
        assert_eq!(m.max_period_norm, BigUint::from(2u8));
        assert_eq!(m.max_const_norm, BigUint::from(1u8));
        assert_eq!(m.nu, BigUint::from(2u8));

        assert_eq!(SemilinearSet::empty(3).metrics(), Metrics::default());

        let s = SemilinearSet::linear(&[0, 3], &[&[1, 2], &[2, 0]]).unwrap();
        let m = s.metrics();
        assert_eq!((m.index_size, m.max_period_card), (1, 2));
        assert_eq!(m.max_period_norm, BigUint::from(2u8));
        assert_eq!(m.max_const_norm, BigUint::from(3u8));
        assert_eq!(m.nu, BigUint::from(3u8));
    }

    #[test]
    fn expand_examples() {
        let comp = LinearComponent::new(vec![v(&[0]), v(&[1])], vec![v(&[2])]).unwrap();
        let s = SemilinearSet::new(1, vec![comp]).unwrap();
        let e = s.expand_constants();
        let mut expected = even().components().to_vec();
        expected.extend_from_slice(odd().components());
        assert_eq!(e, SemilinearSet::new(1, expected).unwrap());
        assert_eq!(e.metrics().index_size, s.constant_count());

        assert_eq!(even().expand_constants(), even());
    }

    #[test]
    fn membership_examples() {
        assert!(!even().member(&v(&[7])).unwrap());
        assert!(even().member(&v(&[8])).unwrap());
        let s = SemilinearSet::linear(&[0, 0], &[&[1, 1], &[2, 0]]).unwrap();
        assert!(s.member(&v(&[4, 2])).unwrap());
        assert!(!s.member(&v(&[1, 2])).unwrap());
        assert!(even().member(&v(&[1, 1])).is_err());
    }

    #[test]
    fn membership_matches_coefficient_enumeration() {
        // L(0, {2, 3}) against direct enumeration of λ₁·2 + λ₂·3.
        let s = SemilinearSet::linear(&[0], &[&[2], &[3]]).unwrap();
        for y in 0..=30u64 {
            let brute = (0..=15).any(|a| (0..=10).any(|b| 2 * a + 3 * b == y));
            assert_eq!(s.member(&v(&[y])).unwrap(), brute, "y = {y}");
        }
    }

    #[test]
    fn finite_component_without_periods() {
        let comp = LinearComponent::new(vec![v(&[1, 2]), v(&[3, 0])], vec![]).unwrap();
        let s = SemilinearSet::new(2, vec![comp]).unwrap();
        assert!(s.member(&v(&[3, 0])).unwrap());
        assert!(!s.member(&v(&[0, 0])).unwrap());
    }

    #[test]
    fn normalize_is_idempotent() {
        let comp = LinearComponent::new(
            vec![v(&[2, 1]), v(&[0, 0]), v(&[2, 1])],
            vec![v(&[1, 1]), v(&[0, 0]), v(&[1, 0])],
        )
        .unwrap();
        let s = SemilinearSet::new(2, vec![comp.clone(), comp]).unwrap();
        assert_eq!(s.components().len(), 1);
        assert_eq!(s.normalize(), s);
        assert_eq!(s.normalize().normalize(), s.normalize());
    }
}
