//! Exact arithmetic on the torus `ℝⁿ/ℤⁿ` (`n ≤ 3`) for the skew product
//! `T̄(x, y, z) = (x + α, x + y, x + y + z)` and its action on rotations.

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, Rational, Scalar};

fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// A point with rational coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct TorusPoint {
    coords: Vec<Rational>,
}

impl From<TorusPoint> for Vec<String> {
    fn from(p: TorusPoint) -> Self {
        p.coords.iter().map(format_rational).collect()
    }
}

impl TryFrom<Vec<String>> for TorusPoint {
    type Error = Error;
    fn try_from(raw: Vec<String>) -> Result<Self> {
        Self::new(raw.iter().map(|s| crate::scalar::parse_rational(s)).collect::<Result<_>>()?)
    }
}

impl TorusPoint {
    /// Reduces every coordinate mod 1.
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() || coords.len() > 3 {
            return Err(Error::InvalidParameter(format!(
                "torus points have dimension 1 to 3, got {}",
                coords.len()
            )));
        }
        Ok(Self {
            coords: coords.iter().map(frac).collect(),
        })
    }

    pub fn from_ratios(coords: &[(i64, i64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(n, d)| Rational::ratio(n, d)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> u64 {
        self.coords.iter().fold(1u64, |acc, c| {
            crate::perm::lcm(acc, c.denom().to_u64().unwrap_or(1))
        })
    }
}

/// `W(a, b, c) = (a, a + b, a + b + c)`.
pub fn skew_w_step(t: &TorusPoint) -> Result<TorusPoint> {
    t.check_dim(3)?;
    let [a, b, c] = [&t.coords[0], &t.coords[1], &t.coords[2]];
    TorusPoint::new(vec![a.clone(), a + b, a + b + c])
}

/// `W` restricted to the invariant torus `{a fixed}`: `(b, c) ↦ (b + a, b + c + a)`.
pub fn invariant_torus_step(a: &Rational, bc: &TorusPoint) -> Result<TorusPoint> {
    bc.check_dim(2)?;
    let [b, c] = [&bc.coords[0], &bc.coords[1]];
    TorusPoint::new(vec![b + a, b + c + a])
}

/// `x ↦ A·x + b (mod 1)` with an integer matrix `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineTorusMap {
    pub linear: Vec<Vec<i64>>,
    pub translation: Vec<Rational>,
}

impl AffineTorusMap {
    pub fn translation_by(t: &TorusPoint) -> Self {
        let n = t.dim();
        Self {
            linear: (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect(),
            translation: t.coords.clone(),
        }
    }

    /// The skew product `T̄(x, y, z) = (x + α, x + y, x + y + z)`.
    pub fn skew(alpha: &Rational) -> Self {
        Self {
            linear: vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]],
            translation: vec![alpha.clone(), Rational::zero(), Rational::zero()],
        }
    }

    fn dim(&self) -> usize {
        self.translation.len()
    }

    fn linear_apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.linear
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .fold(Rational::zero(), |acc, (a, xi)| acc + Rational::ratio(*a, 1) * xi)
            })
            .collect()
    }

    pub fn apply(&self, p: &TorusPoint) -> Result<TorusPoint> {
        p.check_dim(self.dim())?;
        let lin = self.linear_apply(&p.coords);
        TorusPoint::new(lin.iter().zip(&self.translation).map(|(x, b)| x + b).collect())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.dim();
        let linear = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|l| self.linear[i][l] * other.linear[l][j]).sum()).collect())
            .collect();
        let shifted = self.linear_apply(&other.translation);
        Self {
            linear,
            translation: shifted.iter().zip(&self.translation).map(|(x, b)| frac(&(x + b))).collect(),
        }
    }

    /// Inverse; the linear part must be unimodular.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim();
        // Gauss-Jordan on [A | I] over the rationals.
        let mut aug: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..2 * n)
                    .map(|j| {
                        if j < n {
                            Rational::ratio(self.linear[i][j], 1)
                        } else {
                            Rational::ratio(i64::from(j - n == i), 1)
                        }
                    })
                    .collect()
            })
            .collect();
        crate::linalg::rref(&mut aug, n);
        if aug.len() < n || (0..n).any(|i| !aug[i][i].is_one()) {
            return Err(Error::NonInvertible("linear part is singular".into()));
        }
        let mut linear = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let v = &aug[i][n + j];
                if !v.is_integer() {
                    return Err(Error::NonInvertible("linear part is not unimodular".into()));
                }
                linear[i][j] = v.to_integer().to_i64().unwrap_or(0);
            }
        }
        let mut inv = Self {
            linear,
            translation: vec![Rational::zero(); n],
        };
        inv.translation = inv.linear_apply(&self.translation).iter().map(|x| frac(&-x)).collect();
        Ok(inv)
    }

    pub fn is_translation(&self) -> bool {
        self.linear
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, a)| *a == i64::from(i == j)))
    }
}

/// Outcome of conjugating the rotation `S_t` by the skew product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkewConjugation {
    /// Translation vector of `T̄ ∘ S_t ∘ T̄⁻¹`, from symbolic composition.
    pub translation: TorusPoint,
    /// The composed linear part is the identity.
    pub symbolic_is_rotation: bool,
    /// Pointwise evaluation at every sample moved it by `translation`.
    pub samples_agree: bool,
}

/// Composes `T̄ ∘ S_t ∘ T̄⁻¹` symbolically and, independently, pointwise on `samples`.
pub fn skew_tbar_conjugation(
    alpha: &Rational,
    t: &TorusPoint,
    samples: &[TorusPoint],
) -> Result<SkewConjugation> {
    t.check_dim(3)?;
    let tbar = AffineTorusMap::skew(alpha);
    let tbar_inv = tbar.inverse()?;
    let rot = AffineTorusMap::translation_by(t);
    let composite = tbar.compose(&rot).compose(&tbar_inv);
    let translation = TorusPoint::new(composite.translation.clone())?;
    let mut samples_agree = true;
    for p in samples {
        let pre = tbar_inv.apply(p)?;
        let moved = tbar.apply(&pre.add(t)?)?;
        if moved.sub(p)? != translation {
            samples_agree = false;
        }
    }
    Ok(SkewConjugation {
        translation,
        symbolic_is_rotation: composite.is_translation(),
        samples_agree,
    })
}
