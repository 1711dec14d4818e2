//! Permutations commuting with a shift or with a power of the odometer, and
//! the periodic lens points they generate.

use serde::Serialize;

use crate::coupling::{graph_coupling, restrict_coupling, CouplingMatrix};
use crate::error::{Error, Result};
use crate::lens::{detect_period, lens_step, self_joining_residual};
use crate::matrix::Matrix;
use crate::partition::{make_uniform_partition, refine, system_power, FiniteSystem};
use crate::perm::Permutation;
use crate::scalar::{format_rational, Rational, Scalar};
use crate::zoo::{bernoulli_system, odometer_system, word_index, word_of, MAX_CELLS};

#[derive(Clone, Debug, Serialize)]
pub struct BernoulliCommuter {
    pub d: usize,
    pub ell: usize,
    pub len: usize,
    pub permutation: Permutation,
    /// `P_S·Q = Q·P_S` on the length-`len` cylinder matrix.
    pub commutes: bool,
    /// `S` maps `{α_0 = i}` onto `{α_0 = i + 1}` for every `i`.
    pub cycles_generator: bool,
    /// `‖T̃Δ_S − Δ_S‖₁`, the lens evaluated through length-`len + 1` cylinders.
    #[serde(serialize_with = "rational_string")]
    pub lens_residual: Rational,
}

fn rational_string<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Alphabet `ℤ_d × ℤ_ell` coded as `α·ell + β`.
fn add_one_to_alpha(d: usize, ell: usize, len: usize) -> Permutation {
    let big = d * ell;
    let k = big.pow(len as u32);
    let images = (0..k)
        .map(|w| {
            let word: Vec<usize> = word_of(big, len, w)
                .into_iter()
                .map(|x| ((x / ell + 1) % d) * ell + x % ell)
                .collect();
            word_index(big, &word)
        })
        .collect();
    Permutation::new(images).expect("symbolwise bijection")
}

/// `P[w][τ(w)] = 1`.
fn permutation_matrix(p: &Permutation) -> Matrix<Rational> {
    let n = p.len();
    let mut m = Matrix::zeros(n, n);
    for w in 0..n {
        m.set(w, p.apply(w), Rational::ratio(1, 1));
    }
    m
}

/// The exact lens residual of a coupling `c` given at length-`len + 1`
/// cylinders: `T⁻¹` of a length-`len` cylinder is a union of length-`len + 1`
/// cylinders, so the lens of the fine system read on the coarse cells is exact.
fn exact_residual(fine_sys: &FiniteSystem, fine: &CouplingMatrix, coarse: &CouplingMatrix, d: usize) -> Result<Rational> {
    let (_, refinement) = refine(&make_uniform_partition(coarse.k())?, d)?;
    let moved = restrict_coupling(&lens_step(fine_sys, fine)?, &refinement)?;
    crate::coupling::coupling_distance(&moved, coarse)
}

/// Adds `1 (mod d)` to the `α`-part of every symbol of a cylinder word over
/// `ℤ_d × ℤ_ell`, and checks the properties used to build periodic points.
pub fn bernoulli_cyclic_commuter(d: usize, ell: usize, len: usize) -> Result<BernoulliCommuter> {
    if d < 2 || ell == 0 || len == 0 {
        return Err(Error::InvalidParameter(format!(
            "need d ≥ 2, ell ≥ 1, L ≥ 1, got d = {d}, ell = {ell}, L = {len}"
        )));
    }
    let big = d * ell;
    // The residual is computed one level finer.
    let fine_cells = (0..=len).try_fold(1usize, |acc, _| acc.checked_mul(big).filter(|k| *k <= MAX_CELLS));
    if fine_cells.is_none() {
        return Err(Error::SizeGuard {
            what: "(d·ell)^(L+1)",
            value: big.saturating_pow(len as u32 + 1),
            limit: MAX_CELLS,
        });
    }
    let sys = bernoulli_system(big, len)?;
    let s = add_one_to_alpha(d, ell, len);
    let p = permutation_matrix(&s);
    let commutes = p.mul(sys.q())? == sys.q().mul(&p)?;

    let first_alpha = |w: usize| word_of(big, len, w)[0] / ell;
    let cycles_generator = (0..s.len()).all(|w| first_alpha(s.apply(w)) == (first_alpha(w) + 1) % d);

    let fine_sys = bernoulli_system(big, len + 1)?;
    let fine_delta = graph_coupling(&add_one_to_alpha(d, ell, len + 1))?;
    let lens_residual = exact_residual(&fine_sys, &fine_delta, &graph_coupling(&s)?, big)?;
    Ok(BernoulliCommuter {
        d,
        ell,
        len,
        permutation: s,
        commutes,
        cycles_generator,
        lens_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OdometerCommuter {
    pub n: u32,
    pub m: u32,
    pub permutation: Permutation,
    /// `S_π ∘ τ^{2ⁿ} = τ^{2ⁿ} ∘ S_π`.
    pub commutes: bool,
    /// `‖T̃^{2ⁿ}Δ_S − Δ_S‖₁`; zero exactly.
    #[serde(serialize_with = "rational_string")]
    pub power_residual: Rational,
    /// Least lens period of `Δ_S` under the level-`m` odometer.
    pub period: Option<usize>,
}

/// `S_π` on level-`m` cells: `π` acts on the first `n` binary digits (the
/// residue `v mod 2ⁿ`), digits `n..m` are kept.
pub fn odometer_commuter(pi: &Permutation, m: u32) -> Result<OdometerCommuter> {
    let size = pi.len();
    if size == 0 || !size.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("π must act on 2ⁿ points, got {size}")));
    }
    let n = size.trailing_zeros();
    if n > m {
        return Err(Error::InvalidParameter(format!("need n ≤ m, got n = {n}, m = {m}")));
    }
    let sys = odometer_system(m)?;
    let k = sys.k();
    let low = size - 1;
    let s = Permutation::new((0..k).map(|v| (v & !low) | pi.apply(v & low)).collect())?;
    let tau = sys.cell_map().ok_or(Error::NotExact)?;
    let tau_pow = tau.pow(size as i64);
    let commutes = s.compose(&tau_pow) == tau_pow.compose(&s);
    let delta = graph_coupling::<Rational>(&s)?;
    let power_residual = self_joining_residual(&system_power(&sys, size as i64)?, &delta)?;
    let period = detect_period(&sys, &delta, size, 0.0)?.period;
    Ok(OdometerCommuter {
        n,
        m,
        permutation: s,
        commutes,
        power_residual,
        period,
    })
}
