//! Seeded generators for small random instances.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diophantine::DiophantineSystem;
use crate::ops::IntegerMatrix;
use crate::set::{LinearComponent, SemilinearSet};
use crate::vector::NatVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape limits for [`random_set`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetShape {
    pub max_dim: usize,
    pub max_components: usize,
    pub max_periods: usize,
    pub max_entry: u64,
}

impl Default for SetShape {
    fn default() -> Self {
        SetShape {
            max_dim: 2,
            max_components: 2,
            max_periods: 2,
            max_entry: 3,
        }
    }
}

fn vector(rng: &mut impl Rng, dim: usize, max_entry: u64) -> NatVector {
    let v: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..=max_entry)).collect();
    NatVector::from_u64s(&v)
}

/// A union of 1 to `max_components` linear sets in a given dimension.
pub fn random_set_in(rng: &mut impl Rng, dim: usize, shape: &SetShape) -> SemilinearSet {
    let count = rng.gen_range(1..=shape.max_components.max(1));
    let comps = (0..count)
        .map(|_| {
            let c = vector(rng, dim, shape.max_entry);
            let m = rng.gen_range(0..=shape.max_periods);
            let ps = (0..m).map(|_| vector(rng, dim, shape.max_entry)).collect();
            LinearComponent::linear(c, ps).expect("dimensions agree")
        })
        .collect();
    SemilinearSet::new(dim, comps).expect("dimensions agree")
}

pub fn random_set(rng: &mut impl Rng, shape: &SetShape) -> SemilinearSet {
    let dim = rng.gen_range(1..=shape.max_dim.max(1));
    random_set_in(rng, dim, shape)
}

/// `A x = b` with `rows × vars` entries in `[-max_entry, max_entry]` and
/// right-hand side entries in `[-max_rhs, max_rhs]`.
pub fn random_system(
    rng: &mut impl Rng,
    rows: usize,
    vars: usize,
    max_entry: i64,
    max_rhs: i64,
) -> DiophantineSystem {
    let a: Vec<Vec<BigInt>> = (0..rows)
        .map(|_| {
            (0..vars)
                .map(|_| BigInt::from(rng.gen_range(-max_entry..=max_entry)))
                .collect()
        })
        .collect();
    let b: Vec<BigInt> = (0..rows)
        .map(|_| BigInt::from(rng.gen_range(-max_rhs..=max_rhs)))
        .collect();
    DiophantineSystem::new(a, b).expect("well-formed")
}

/// Non-negative `rows × cols` matrix with entries up to `max_entry`.
pub fn random_matrix(
    rng: &mut impl Rng,
    rows: usize,
    cols: usize,
    max_entry: u64,
) -> IntegerMatrix {
    let h: Vec<Vec<BigInt>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| BigInt::from(rng.gen_range(0..=max_entry)))
                .collect()
        })
        .collect();
    IntegerMatrix::new(h).expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let shape = SetShape::default();
        let a = random_set(&mut rng(7), &shape);
        let b = random_set(&mut rng(7), &shape);
        assert_eq!(a, b);
        let s1 = random_system(&mut rng(3), 2, 3, 3, 3);
        let s2 = random_system(&mut rng(3), 2, 3, 3, 3);
        assert_eq!(s1, s2);
    }

    #[test]
    fn respects_shape() {
        let shape = SetShape {
            max_dim: 2,
            max_components: 2,
            max_periods: 2,
            max_entry: 3,
        };
        let mut r = rng(11);
        for _ in 0..50 {
            let s = random_set(&mut r, &shape);
            let m = s.metrics();
            assert!(s.dim() <= 2 && m.index_size <= 2 && m.max_period_card <= 2);
            assert!(m.nu <= 3u8.into());
        }
    }
}
