//! Worked estimation protocols: aligning a Cartesian frame with `N` spins,
//! estimating an unknown two-qubit maximally entangled state from `N`
//! copies, and Holevo phase estimation on `Z_M`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cost::{holevo_phase_cost, maxent_fidelity_cost, refframe_cost};
use crate::error::{Error, Result};
use crate::estimation::{
    average_cost, cost_matrix, optimize_coefficients_with, quadrature_estimate, CoefficientVector,
    Diagnostics, EstimationResult, OptimizeOptions,
};
use crate::group::{su2, ClassPoint, Group, IrrepLabel, IrrepSet, DEFAULT_QUAD_NODES};

/// Largest allowed gap between the matrix route and the closed form for the
/// entangled-state cost.
pub const MAXENT_CLOSED_FORM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolReport {
    /// Number of spins or copies; for phase estimation, the number of labels.
    #[serde(rename = "N")]
    pub n: u32,
    pub result: EstimationResult,
    /// Reference cost the finite-size value is compared against.
    pub asymptote: f64,
    /// `result.min_cost / asymptote`.
    pub ratio: f64,
    /// Independent closed-form value of the cost, where one exists.
    pub closed_form: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct RefframeOptions {
    /// Keep the symmetric sector `j = N/2`, which cannot hold a maximally
    /// entangled block without an external reference.
    pub include_top: bool,
    pub quad_nodes: usize,
}

impl Default for RefframeOptions {
    fn default() -> Self {
        RefframeOptions {
            include_top: false,
            quad_nodes: DEFAULT_QUAD_NODES,
        }
    }
}

/// Asymptotic frame-alignment error `8π²/N²`.
pub fn refframe_asymptote(n: u32) -> f64 {
    8.0 * PI * PI / f64::from(n).powi(2)
}

pub fn refframe_protocol(n: u32) -> Result<ProtocolReport> {
    refframe_protocol_with(n, RefframeOptions::default())
}

/// Optimal transmission of a Cartesian frame with `n` spin-½ particles and
/// the cost `6 - 2χ¹`.
pub fn refframe_protocol_with(n: u32, options: RefframeOptions) -> Result<ProtocolReport> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "frame alignment needs N >= 2, got {n}"
        )));
    }
    let set = su2::irrep_set_for_tensor_power(n, options.include_top)?;
    let result = optimize_coefficients_with(
        &refframe_cost(),
        &set,
        OptimizeOptions {
            quad_nodes: options.quad_nodes,
        },
    )?;
    let asymptote = refframe_asymptote(n);
    Ok(ProtocolReport {
        n,
        ratio: result.min_cost / asymptote,
        asymptote,
        closed_form: None,
        result,
    })
}

/// Weights `√(d_j m_j / 2^N)` of the `N`-copy state `|1⟩⟩^{⊗N}/√2^N` over
/// the spin sectors of `N` qubits. Fixed by the input; nothing is optimized.
pub fn maxent_coefficients(n: u32) -> Result<CoefficientVector> {
    let set = su2::irrep_set_for_tensor_power(n, true)?;
    let values = set
        .dims()
        .iter()
        .zip(set.mults())
        .map(|(&d, m)| su2::fraction_of_power_of_two(&(m * d), n).sqrt())
        .collect();
    CoefficientVector::new(set, values)
}

/// `½(1 - Σ_j c_j c_{j+1})`: the entangled-state cost when every diagonal
/// entry of the cost matrix is `-¼`.
///
/// That holds for odd `N`. For even `N` the singlet sector has no spin-1
/// coupling to itself, so this value undershoots the true cost by `c_0²/4`;
/// see [`maxent_closed_form_cost`].
pub fn maxent_band_approximation(v: &CoefficientVector) -> f64 {
    let overlap: f64 = v.values().windows(2).map(|w| w[0] * w[1]).sum();
    0.5 * (1.0 - overlap)
}

/// Exact closed form of the entangled-state cost for tensor-power
/// coefficients: the band expression plus `c_0²/4` when the singlet is
/// present.
pub fn maxent_closed_form_cost(v: &CoefficientVector) -> f64 {
    let singlet = match v.labels().first() {
        Some(l) if l.is_trivial() => 0.25 * v.values()[0].powi(2),
        _ => 0.0,
    };
    maxent_band_approximation(v) + singlet
}

/// Asymptotic infidelity `3/(4N)`.
pub fn maxent_asymptote(n: u32) -> f64 {
    0.75 / f64::from(n)
}

pub fn maxent_estimation(n: u32) -> Result<ProtocolReport> {
    maxent_estimation_with(n, DEFAULT_QUAD_NODES)
}

/// Optimal fidelity for estimating `|ψ_g⟩⟩^{⊗N}`, computed by the generic
/// matrix route, checked against the closed form and the quadrature route.
pub fn maxent_estimation_with(n: u32, quad_nodes: usize) -> Result<ProtocolReport> {
    let v = maxent_coefficients(n)?;
    let spec = maxent_fidelity_cost();
    let matrix = cost_matrix(&spec, v.set())?;
    let cost = average_cost(&spec, &matrix, &v)?;
    let closed = maxent_closed_form_cost(&v);
    if (cost - closed).abs() > MAXENT_CLOSED_FORM_TOLERANCE {
        return Err(Error::Numerical(format!(
            "matrix route {cost} disagrees with closed form {closed} at N = {n}"
        )));
    }
    let quad = quadrature_estimate(&spec, &v, quad_nodes)?;
    let asymptote = maxent_asymptote(n);
    Ok(ProtocolReport {
        n,
        ratio: cost / asymptote,
        asymptote,
        closed_form: Some(closed),
        result: EstimationResult {
            coefficients: v,
            min_cost: cost,
            fidelity: Some(1.0 - cost),
            matrix_cost: cost,
            quadrature_cost: quad.value,
            diagnostics: Diagnostics {
                eigen: None,
                quadrature_nodes: quad.nodes,
                quadrature_doubling_difference: quad.doubling_difference,
                oracle_difference: (cost - quad.value).abs(),
            },
        },
    })
}

/// Both sides of `⟨Ψ|(U_g ⊗ 1)^{⊗N}|Ψ⟩ = cos^N(θ/2) = Σ_j (c_j²/d_j) χ^j(θ)`.
pub fn maxent_overlap_identity(n: u32, x: ClassPoint) -> Result<(f64, f64)> {
    let v = maxent_coefficients(n)?;
    let direct = (0.5 * x.0).cos().powi(n as i32);
    let sectors = v
        .labels()
        .iter()
        .zip(v.set().dims())
        .zip(v.values())
        .map(|((&l, &d), &c)| c * c / d as f64 * su2::character(l.0, x.0))
        .sum();
    Ok((direct, sectors))
}

/// `1 - cos(π/(n+1))`, the optimum over `n` consecutive phase labels.
pub fn phase_closed_form(n_labels: u32) -> f64 {
    1.0 - (PI / f64::from(n_labels + 1)).cos()
}

/// Holevo phase estimation on `Z_M` with input support `{0, …, n_labels-1}`.
///
/// Requires `M > n_labels + 1` so the label window does not wrap around.
pub fn phase_protocol(order: u32, n_labels: u32) -> Result<ProtocolReport> {
    if n_labels == 0 || order <= n_labels + 1 {
        return Err(Error::Domain(format!(
            "phase estimation needs 1 <= n_labels and M > n_labels + 1, got M = {order}, n = {n_labels}"
        )));
    }
    let group = Group::cyclic(order)?;
    let set = IrrepSet::with_unit_multiplicities(
        group,
        (0..n_labels).map(IrrepLabel::residue).collect(),
    )?;
    let result =
        optimize_coefficients_with(&holevo_phase_cost(order)?, &set, OptimizeOptions::default())?;
    let closed = phase_closed_form(n_labels);
    Ok(ProtocolReport {
        n: n_labels,
        ratio: result.min_cost / closed,
        asymptote: closed,
        closed_form: Some(closed),
        result,
    })
}
