//! The cyclic group `Z_M`: one-dimensional irreps `e^{ikφ}` labelled by the
//! residue `k`.

use std::f64::consts::PI;

use num_complex::Complex64;

pub fn character(residue: u32, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, f64::from(residue) * phi)
}

pub fn conjugate(order: u32, residue: u32) -> u32 {
    (order - residue % order) % order
}

/// Multiplicity of `σ` in `μ ⊗ ν`, i.e. whether `σ ≡ μ + ν (mod M)`.
pub fn cg_multiplicity(order: u32, mu: u32, nu: u32, sigma: u32) -> u32 {
    u32::from((mu + nu) % order == sigma % order)
}

/// Angle of the `t`-th group element, `2πt/M`.
pub fn element_angle(order: u32, t: u32) -> f64 {
    2.0 * PI * f64::from(t % order) / f64::from(order)
}
