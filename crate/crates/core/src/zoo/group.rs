//! Rotations of a finite abelian group `G = ℤ_{m₁} × … × ℤ_{m_r}` and their
//! conjugation by automorphisms: `T ∘ R_z ∘ T⁻¹ = R_{Tz}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest group accepted for exhaustive checks.
pub const MAX_GROUP_ORDER: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() || moduli.contains(&0) {
            return Err(Error::InvalidParameter(format!("bad moduli {moduli:?}")));
        }
        let order = moduli.iter().try_fold(1usize, |acc, m| acc.checked_mul(*m as usize));
        match order {
            Some(n) if n <= MAX_GROUP_ORDER => Ok(Self { moduli }),
            _ => Err(Error::SizeGuard {
                what: "|G|",
                value: order.unwrap_or(usize::MAX),
                limit: MAX_GROUP_ORDER,
            }),
        }
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product::<u64>() as usize
    }

    /// Mixed-radix index, first coordinate most significant.
    pub fn index(&self, x: &[u64]) -> usize {
        x.iter().zip(&self.moduli).fold(0, |acc, (xi, m)| acc * *m as usize + *xi as usize)
    }

    pub fn element(&self, mut index: usize) -> Vec<u64> {
        let mut x = vec![0; self.moduli.len()];
        for t in (0..self.moduli.len()).rev() {
            let m = self.moduli[t] as usize;
            x[t] = (index % m) as u64;
            index /= m;
        }
        x
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(y)
            .zip(&self.moduli)
            .map(|((a, b), m)| (a + b) % m)
            .collect()
    }

    fn check(&self, x: &[u64]) -> Result<()> {
        if x.len() != self.moduli.len() || x.iter().zip(&self.moduli).any(|(a, m)| a >= m) {
            return Err(Error::InvalidParameter(format!(
                "{x:?} is not an element of Z_{:?}",
                self.moduli
            )));
        }
        Ok(())
    }
}

/// An endomorphism given by an integer matrix acting on coordinate vectors;
/// entry `(i, j)` is a homomorphism `ℤ_{m_j} → ℤ_{m_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAutomorphism {
    group: FiniteAbelianGroup,
    matrix: Vec<Vec<i64>>,
    images: Vec<usize>,
}

impl GroupAutomorphism {
    /// Checks well-definedness and bijectivity.
    pub fn new(group: FiniteAbelianGroup, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let r = group.moduli.len();
        if matrix.len() != r || matrix.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidParameter(format!("automorphism matrix must be {r}x{r}")));
        }
        for (i, row) in matrix.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                let (mi, mj) = (group.moduli[i] as i64, group.moduli[j] as i64);
                if (a * mj).rem_euclid(mi) != 0 {
                    return Err(Error::NonInvertible(format!(
                        "entry ({i},{j}) = {a} is not a homomorphism Z_{mj} → Z_{mi}"
                    )));
                }
            }
        }
        let mut auto = Self {
            group,
            matrix,
            images: Vec::new(),
        };
        auto.images = auto
            .group
            .elements()
            .map(|x| auto.group.index(&auto.apply_raw(&x)))
            .collect();
        if Permutation::new(auto.images.clone()).is_err() {
            return Err(Error::NonInvertible(format!("{:?} is not bijective", auto.matrix)));
        }
        Ok(auto)
    }

    fn apply_raw(&self, x: &[u64]) -> Vec<u64> {
        self.matrix
            .iter()
            .zip(&self.group.moduli)
            .map(|(row, m)| {
                let s: i64 = row.iter().zip(x).map(|(a, xi)| a * *xi as i64).sum();
                s.rem_euclid(*m as i64) as u64
            })
            .collect()
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.apply_raw(x)
    }
}

/// `T` as a permutation of group elements (mixed-radix indices).
pub fn automorphism_permutation(t: &GroupAutomorphism) -> Permutation {
    Permutation::new(t.images.clone()).expect("validated at construction")
}

/// `R_z : y ↦ y + z` as a permutation of group elements.
pub fn rotation_permutation(g: &FiniteAbelianGroup, z: &[u64]) -> Permutation {
    let images = g.elements().map(|y| g.index(&g.add(&y, z))).collect();
    Permutation::new(images).expect("translations are bijective")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotationConjugation {
    /// `T z`.
    pub image: Vec<u64>,
    /// `T(R_z(T⁻¹ y)) = y + Tz` for every `y ∈ G`.
    pub composite_matches: bool,
}

pub fn group_rotation_conjugation(t: &GroupAutomorphism, z: &[u64]) -> Result<RotationConjugation> {
    let g = &t.group;
    g.check(z)?;
    let image = t.apply(z);
    let forward = automorphism_permutation(t);
    let backward = forward.inverse();
    let composite_matches = g.elements().all(|y| {
        let pre = g.element(backward.apply(g.index(&y)));
        let moved = g.add(&pre, z);
        let out = g.element(forward.apply(g.index(&moved)));
        out == g.add(&y, &image)
    });
    Ok(RotationConjugation {
        image,
        composite_matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_by_two_on_z5() {
        let g = FiniteAbelianGroup::new(vec![5]).unwrap();
        let t = GroupAutomorphism::new(g, vec![vec![2]]).unwrap();
        let res = group_rotation_conjugation(&t, &[1]).unwrap();
        assert_eq!(res.image, vec![2]);
        assert!(res.composite_matches);
        let zero = group_rotation_conjugation(&t, &[0]).unwrap();
        assert_eq!(zero.image, vec![0]);
        assert!(zero.composite_matches);
    }

    #[test]
    fn non_invertible_rejected() {
        let g = FiniteAbelianGroup::new(vec![4]).unwrap();
        assert!(matches!(GroupAutomorphism::new(g.clone(), vec![vec![2]]), Err(Error::NonInvertible(_))));
        let g = FiniteAbelianGroup::new(vec![4, 3]).unwrap();
        // 1: Z_3 → Z_4 is not a homomorphism.
        assert!(GroupAutomorphism::new(g, vec![vec![1, 1], vec![0, 1]]).is_err());
    }

    #[test]
    fn coordinate_permutation_on_z2_cubed() {
        let g = FiniteAbelianGroup::new(vec![2, 2, 2]).unwrap();
        let t = GroupAutomorphism::new(g.clone(), vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        for z in g.elements() {
            let res = group_rotation_conjugation(&t, &z).unwrap();
            assert_eq!(res.image, vec![z[1], z[2], z[0]]);
            assert!(res.composite_matches);
        }
        assert!(group_rotation_conjugation(&t, &[2, 0, 0]).is_err());
    }

    #[test]
    fn indexing_round_trip() {
        let g = FiniteAbelianGroup::new(vec![4, 3]).unwrap();
        for i in 0..g.order() {
            assert_eq!(g.index(&g.element(i)), i);
        }
        assert!(FiniteAbelianGroup::new(vec![]).is_err());
        assert!(FiniteAbelianGroup::new(vec![100, 100]).is_err());
    }
}
