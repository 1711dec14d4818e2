//! Explicit witnesses that the lens of a Bernoulli shift moves a neighbourhood
//! of `Δ_σ` onto one of `Δ_π`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::coupling::{in_neighborhood, restrict_coupling, CouplingMatrix, NeighborhoodSpec};
use crate::error::{Error, Result};
use crate::lens::lens_step;
use crate::matrix::Matrix;
use crate::partition::{make_uniform_partition, refine};
use crate::perm::Permutation;
use crate::scalar::{Rational, Scalar};
use crate::zoo::bernoulli_system;

/// Largest fine resolution `d^{2L}` the witness is built at.
pub const MAX_WITNESS_CELLS: usize = 1024;

#[derive(Clone, Debug, Serialize)]
pub struct WitnessResult {
    /// Number of lens steps separating the two neighbourhoods.
    pub n: usize,
    pub fine_k: usize,
    #[serde(serialize_with = "coupling_json")]
    pub xi: CouplingMatrix<Rational>,
    /// Restriction of `ξ` lies in `V(α, σ, ε)`.
    pub check_source: bool,
    /// Restriction of `T̃ⁿξ` lies in `V(α, π, ε)`.
    pub check_image: bool,
    /// `max_i |C[i][σ(i)] − 1/k|` for the restricted `ξ`.
    #[serde(serialize_with = "rational_json")]
    pub source_gap: Rational,
    /// `max_s |C[s][π(s)] − 1/k|` for the restricted image.
    #[serde(serialize_with = "rational_json")]
    pub image_gap: Rational,
}

fn coupling_json<S: serde::Serializer>(c: &CouplingMatrix<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&c.to_json(), s)
}

fn rational_json<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&r.to_json(), s)
}

fn diagonal_gap(c: &CouplingMatrix<Rational>, eta: &Permutation) -> Rational {
    let mass = Rational::ratio(1, c.k() as i64);
    (0..c.k())
        .map(|i| (c.get(i, eta.apply(i)) - &mass).abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// Builds the witness for the Bernoulli shift on `d` symbols with base
/// partition into length-`len` cylinders (`k = d^len` cells).
///
/// Fine cell `i·k + s` is `A_i ∩ T^{−len}A_s` (a length-`2·len` cylinder) and
/// `ξ` puts `1/k²` on each `(i·k + s, σ(i)·k + π(s))`. Since the two halves of
/// a cylinder word are independent the memberships are exact at `n = len`.
pub fn transitivity_witness(
    d: usize,
    len: usize,
    sigma: &Permutation,
    pi: &Permutation,
    epsilon: &Rational,
) -> Result<WitnessResult> {
    let fine_k = d
        .checked_pow(2 * len as u32)
        .filter(|&f| f <= MAX_WITNESS_CELLS)
        .ok_or(Error::ResolutionGuard {
            value: d.saturating_pow(2 * len as u32),
            limit: MAX_WITNESS_CELLS,
        })?;
    let fine = bernoulli_system(d, 2 * len)?;
    let k = d.pow(len as u32);
    if sigma.len() != k || pi.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: if sigma.len() != k { sigma.len() } else { pi.len() },
        });
    }
    let mut m = Matrix::zeros(fine_k, fine_k);
    let w = Rational::ratio(1, (k * k) as i64);
    for i in 0..k {
        for s in 0..k {
            m.set(i * k + s, sigma.apply(i) * k + pi.apply(s), w.clone());
        }
    }
    let xi = CouplingMatrix::new(m)?;
    let (_, refinement) = refine(&make_uniform_partition(k)?, k)?;

    let mut image = xi.clone();
    for _ in 0..len {
        image = lens_step(&fine, &image)?;
    }
    let coarse_source = restrict_coupling(&xi, &refinement)?;
    let coarse_image = restrict_coupling(&image, &refinement)?;
    let check_source = in_neighborhood(
        &coarse_source,
        &NeighborhoodSpec::permutation_diagonal(sigma.clone(), epsilon.clone())?,
    )?;
    let check_image = in_neighborhood(
        &coarse_image,
        &NeighborhoodSpec::permutation_diagonal(pi.clone(), epsilon.clone())?,
    )?;
    Ok(WitnessResult {
        n: len,
        fine_k,
        source_gap: diagonal_gap(&coarse_source, sigma),
        image_gap: diagonal_gap(&coarse_image, pi),
        xi,
        check_source,
        check_image,
    })
}
