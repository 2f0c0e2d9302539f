//! SU(2) irreps labelled by `2j`: dimensions, characters, the Weyl class
//! weight, Clebsch-Gordan multiplicities and the multiplicities of spin-j
//! sectors in the N-qubit tensor power.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{Group, IrrepLabel, IrrepSet};
use crate::error::{Error, Result};

/// Below this value of `|sin(θ/2)|` the character is evaluated from its
/// Taylor series around the nearest removable singularity.
const SINGULAR_THRESHOLD: f64 = 1e-8;

pub fn dim(twice_j: u32) -> usize {
    twice_j as usize + 1
}

/// Reduces an arbitrary rotation angle to `[0, 2π]`.
///
/// Characters are `4π`-periodic and even, so `θ` and `4π - θ` share a class.
pub fn canonical_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(4.0 * PI);
    if t > 2.0 * PI {
        4.0 * PI - t
    } else {
        t
    }
}

/// `χ^j(θ) = sin((2j+1)θ/2) / sin(θ/2)`.
///
/// Angles past `π` are reflected with `χ^j(θ) = (-1)^{2j} χ^j(2π - θ)`, which
/// keeps the quotient well conditioned near `2π`. Near `θ = 0` the quotient is
/// replaced by its series `(2j+1)(1 - j(j+1)θ²/6)`.
pub fn character(twice_j: u32, theta: f64) -> f64 {
    let theta = canonical_angle(theta);
    if theta > PI {
        let sign = if twice_j.is_multiple_of(2) { 1.0 } else { -1.0 };
        return sign * character_near_identity(twice_j, 2.0 * PI - theta);
    }
    character_near_identity(twice_j, theta)
}

fn character_near_identity(twice_j: u32, theta: f64) -> f64 {
    let half = 0.5 * theta;
    let s = half.sin();
    let d = dim(twice_j) as f64;
    if s.abs() < SINGULAR_THRESHOLD {
        let j = 0.5 * twice_j as f64;
        return d * (1.0 - j * (j + 1.0) * theta * theta / 6.0);
    }
    (d * half).sin() / s
}

/// Weyl density of the Haar measure on rotation classes: `sin²(θ/2)/π`.
pub fn class_weight(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    s * s / PI
}

/// Multiplicity of `σ` in `μ ⊗ ν`: the triangle rule with integer total spin.
pub fn cg_multiplicity(twice_mu: u32, twice_nu: u32, twice_sigma: u32) -> u32 {
    let lo = twice_mu.abs_diff(twice_nu);
    let hi = twice_mu + twice_nu;
    let parity_ok = (twice_mu + twice_nu + twice_sigma).is_multiple_of(2);
    u32::from(parity_ok && lo <= twice_sigma && twice_sigma <= hi)
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Multiplicity of spin `j` in the tensor power of `n` spin-½ factors:
/// `m_j = (2j+1)/(n/2+j+1) · C(n, n/2+j)`, evaluated exactly.
pub fn tensor_power_multiplicity(n: u32, twice_j: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Domain("tensor power requires n >= 1".into()));
    }
    if twice_j > n || !(n - twice_j).is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "spin 2j = {twice_j} does not occur in the {n}-fold qubit tensor power"
        )));
    }
    let k = u64::from((n + twice_j) / 2);
    let numerator = binomial(u64::from(n), k) * (u64::from(twice_j) + 1);
    let denominator = BigUint::from(k + 1);
    debug_assert!((&numerator % &denominator).is_zero());
    Ok(numerator / denominator)
}

/// All spin sectors of the `n`-qubit space, lowest spin first.
///
/// With `include_top = false` the totally symmetric sector `j = n/2` is
/// dropped; it is the only one whose multiplicity is smaller than its
/// dimension.
pub fn irrep_set_for_tensor_power(n: u32, include_top: bool) -> Result<IrrepSet> {
    if n == 0 {
        return Err(Error::Domain("tensor power requires n >= 1".into()));
    }
    let top = if include_top { n } else { n.saturating_sub(2) };
    if !include_top && n < 2 {
        return Err(Error::EmptySet(format!(
            "n = {n} without the top spin leaves no sectors"
        )));
    }
    let labels: Vec<u32> = (n % 2..=top).step_by(2).collect();
    let mults = labels
        .iter()
        .map(|&tj| tensor_power_multiplicity(n, tj))
        .collect::<Result<Vec<_>>>()?;
    IrrepSet::new(
        Group::Su2,
        labels.into_iter().map(IrrepLabel::spin_twice).collect(),
        mults,
    )
}

/// Ratio `m / 2^n` as a float, exact up to the final rounding.
pub(crate) fn fraction_of_power_of_two(m: &BigUint, n: u32) -> f64 {
    // Shift so the integer fits comfortably in an f64 mantissa before dividing.
    let bits = m.bits();
    let shift = bits.saturating_sub(60);
    let top = (m >> shift).to_f64().unwrap_or(f64::INFINITY);
    top * 2f64.powi(shift as i32 - n as i32)
}
