//! Optimal input coefficients and covariant measurements for a Holevo-class
//! cost.
//!
//! For a state `⊕_μ c_μ/√d_μ |W_μ⟩⟩` measured with the covariant POVM seeded
//! by `|η⟩ = ⊕_μ √d_μ |W_μ⟩⟩`, the average cost is the quadratic form
//! `a_σ0 + vᵀ C v` with `v = (|c_μ|)` and
//! `C_μν = Σ_{σ≠σ0} a_σ m_σ^{(μν)}`, where `m_σ^{(μν)}` counts `σ` in
//! `μ ⊗ ν*`. The optimal `v` is the ground state of `C`.
//!
//! The same number is also available by integrating the cost against the
//! outcome density `p(θ) = |Σ_μ v_μ χ^μ(θ)|²`; that route shares no code with
//! the matrix one and serves as its oracle.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::{evaluate_cost, validate_holevo, CostSpec};
use crate::error::{Error, Result};
use crate::group::{ClassPoint, ClassRule, Group, IrrepLabel, IrrepSet, DEFAULT_QUAD_NODES};

/// Tolerance on `Σ v² = 1` for a [`CoefficientVector`].
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Node-doubling tolerance for [`average_cost_quadrature`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;
/// Number of cells in the inverse-CDF table used for sampling.
pub const SAMPLER_TABLE_CELLS: usize = 8192;

/// Eigenvector entries above `-NONNEG_SLACK` count as nonnegative.
const NONNEG_SLACK: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct CostMatrix {
    set: IrrepSet,
    entries: DMatrix<f64>,
}

impl CostMatrix {
    pub fn set(&self) -> &IrrepSet {
        &self.set
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// `vᵀ C v` without a set check.
    fn quadratic_form(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        v.dot(&(&self.entries * &v))
    }
}

/// Builds `C_μν = Σ_{σ≠σ0} a_σ · m_σ(μ ⊗ ν*)` over `set`.
pub fn cost_matrix(spec: &CostSpec, set: &IrrepSet) -> Result<CostMatrix> {
    let group = set.group();
    for &label in spec.coeffs().keys() {
        group.check(label)?;
    }
    let n = set.len();
    let labels = set.labels();
    let entries = DMatrix::from_fn(n, n, |i, j| {
        let nu_bar = group.conjugate(labels[j]);
        spec.coeffs()
            .iter()
            .map(|(&sigma, &a)| a * f64::from(group.cg_multiplicity(labels[i], nu_bar, sigma)))
            .sum()
    });
    Ok(CostMatrix {
        set: set.clone(),
        entries,
    })
}

/// Moduli `|c_μ|` of the input-state coefficients: entrywise nonnegative,
/// unit Euclidean norm.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector {
    set: IrrepSet,
    values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(set: IrrepSet, values: Vec<f64>) -> Result<Self> {
        Self::check_shape(&set, &values)?;
        let norm2: f64 = values.iter().map(|v| v * v).sum();
        if (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidCoefficients(format!(
                "squared norm is {norm2}, expected 1"
            )));
        }
        Ok(CoefficientVector { set, values })
    }

    /// Rescales `values` to unit norm.
    pub fn normalized(set: IrrepSet, values: Vec<f64>) -> Result<Self> {
        Self::check_shape(&set, &values)?;
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidCoefficients("zero vector".into()));
        }
        let values = values.into_iter().map(|v| v / norm).collect();
        Ok(CoefficientVector { set, values })
    }

    /// The vector concentrated on the `index`-th label.
    pub fn basis(set: IrrepSet, index: usize) -> Result<Self> {
        let mut values = vec![0.0; set.len()];
        *values
            .get_mut(index)
            .ok_or_else(|| Error::InvalidCoefficients(format!("index {index} out of range")))? =
            1.0;
        CoefficientVector::new(set, values)
    }

    fn check_shape(set: &IrrepSet, values: &[f64]) -> Result<()> {
        if values.len() != set.len() {
            return Err(Error::InvalidCoefficients(format!(
                "{} values for {} labels",
                values.len(),
                set.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidCoefficients(format!(
                "entries must be finite and nonnegative, found {v}"
            )));
        }
        Ok(())
    }

    pub fn set(&self) -> &IrrepSet {
        &self.set
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[IrrepLabel] {
        self.set.labels()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Serialize for CoefficientVector {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            labels: &'a [IrrepLabel],
            values: &'a [f64],
        }
        Repr {
            labels: self.set.labels(),
            values: &self.values,
        }
        .serialize(serializer)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenDiagnostics {
    pub min_eigenvalue: f64,
    /// `‖C v - λ v‖₂` for the returned eigenpair.
    pub residual: f64,
    /// Dimension of the minimum eigenspace.
    pub multiplicity: usize,
    /// Distance to the next distinct eigenvalue, if there is one.
    pub spectral_gap: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Present when the coefficients came from the eigensolver.
    pub eigen: Option<EigenDiagnostics>,
    pub quadrature_nodes: usize,
    /// `|I(n) - I(2n)|` for the quadrature route; zero for finite groups.
    pub quadrature_doubling_difference: f64,
    /// `|matrix_cost - quadrature_cost|`.
    pub oracle_difference: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimationResult {
    pub coefficients: CoefficientVector,
    pub min_cost: f64,
    pub fidelity: Option<f64>,
    pub matrix_cost: f64,
    pub quadrature_cost: f64,
    pub diagnostics: Diagnostics,
}

/// `constant + vᵀ C v`.
pub fn average_cost(spec: &CostSpec, matrix: &CostMatrix, v: &CoefficientVector) -> Result<f64> {
    if matrix.set != v.set {
        return Err(Error::SetMismatch);
    }
    Ok(spec.constant() + matrix.quadratic_form(&v.values))
}

#[derive(Clone, Copy, Debug)]
pub struct OptimizeOptions {
    /// Gauss-Legendre nodes for the quadrature cross-check (SU(2) only).
    pub quad_nodes: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            quad_nodes: DEFAULT_QUAD_NODES,
        }
    }
}

pub fn optimize_coefficients(spec: &CostSpec, set: &IrrepSet) -> Result<EstimationResult> {
    optimize_coefficients_with(spec, set, OptimizeOptions::default())
}

/// Minimizes the average cost over input coefficients.
///
/// The minimizer is the eigenvector of the smallest eigenvalue of the cost
/// matrix, with its sign chosen so the largest entry is positive. For a
/// Holevo cost `-C` is entrywise nonnegative, so Perron-Frobenius provides a
/// nonnegative minimizer; if the eigensolver cannot produce one the matrix is
/// reducible and [`Error::ReducibleCostMatrix`] is returned.
pub fn optimize_coefficients_with(
    spec: &CostSpec,
    set: &IrrepSet,
    options: OptimizeOptions,
) -> Result<EstimationResult> {
    validate_holevo(spec, set.group()).into_result()?;
    let matrix = cost_matrix(spec, set)?;
    let n = set.len();

    let eigen = SymmetricEigen::new(matrix.entries.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let lambda_min = eigen.eigenvalues[order[0]];
    if !lambda_min.is_finite() {
        return Err(Error::NonFinite("minimum eigenvalue".into()));
    }

    let scale = matrix.entries.amax().max(1.0);
    let degenerate_tol = 1e-10 * scale;
    let multiplicity = order
        .iter()
        .take_while(|&&k| eigen.eigenvalues[k] - lambda_min <= degenerate_tol)
        .count();
    let spectral_gap = order
        .get(multiplicity)
        .map(|&k| eigen.eigenvalues[k] - lambda_min);

    let values = order[..multiplicity]
        .iter()
        .find_map(|&k| nonnegative_canonical(eigen.eigenvectors.column(k).iter().copied()))
        .ok_or(Error::ReducibleCostMatrix)?;
    let coefficients = CoefficientVector::normalized(set.clone(), values)?;

    let v = DVector::from_column_slice(&coefficients.values);
    let eigen_residual = (&matrix.entries * &v - &v * lambda_min).norm();

    let matrix_cost = average_cost(spec, &matrix, &coefficients)?;
    let quad = quadrature_estimate(spec, &coefficients, options.quad_nodes)?;

    Ok(EstimationResult {
        min_cost: spec.constant() + lambda_min,
        fidelity: None,
        matrix_cost,
        quadrature_cost: quad.value,
        diagnostics: Diagnostics {
            eigen: Some(EigenDiagnostics {
                min_eigenvalue: lambda_min,
                residual: eigen_residual,
                multiplicity,
                spectral_gap,
            }),
            quadrature_nodes: quad.nodes,
            quadrature_doubling_difference: quad.doubling_difference,
            oracle_difference: (matrix_cost - quad.value).abs(),
        },
        coefficients,
    })
}

/// Flips the sign so the largest-magnitude entry is positive, then accepts
/// the vector if no entry is meaningfully negative.
fn nonnegative_canonical<I: Iterator<Item = f64>>(column: I) -> Option<Vec<f64>> {
    let mut values: Vec<f64> = column.collect();
    let pivot = values
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))?;
    if pivot < 0.0 {
        values.iter_mut().for_each(|v| *v = -*v);
    }
    if values.iter().any(|&v| v < -NONNEG_SLACK) {
        return None;
    }
    values.iter_mut().for_each(|v| *v = v.max(0.0));
    Some(values)
}

/// Outcome density of the covariant POVM, `|Σ_μ v_μ χ^μ(x)|²`, with respect
/// to the Haar measure. It depends on the input coefficients only, never on
/// the cost.
pub fn likelihood_density(v: &CoefficientVector, x: ClassPoint) -> f64 {
    let group = v.set.group();
    let amp: num_complex::Complex64 = v
        .labels()
        .iter()
        .zip(&v.values)
        .map(|(&l, &c)| group.character(l, x) * c)
        .sum();
    amp.norm_sqr()
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct QuadratureEstimate {
    pub value: f64,
    pub nodes: usize,
    pub doubling_difference: f64,
}

fn integrate_cost(spec: &CostSpec, v: &CoefficientVector, rule: &ClassRule) -> f64 {
    let group = v.set.group();
    rule.integrate(|x| evaluate_cost(spec, group, x) * likelihood_density(v, x))
}

pub(crate) fn quadrature_estimate(
    spec: &CostSpec,
    v: &CoefficientVector,
    nodes: usize,
) -> Result<QuadratureEstimate> {
    let group = v.set.group();
    for &label in spec.coeffs().keys() {
        group.check(label)?;
    }
    match group {
        Group::Su2 => {
            let coarse = integrate_cost(spec, v, &ClassRule::su2(nodes)?);
            let fine = integrate_cost(spec, v, &ClassRule::su2(2 * nodes)?);
            if !coarse.is_finite() || !fine.is_finite() {
                return Err(Error::NonFinite("quadrature of the average cost".into()));
            }
            let difference = (coarse - fine).abs();
            if difference > QUADRATURE_TOLERANCE {
                return Err(Error::QuadratureNotConverged { nodes, difference });
            }
            Ok(QuadratureEstimate {
                value: coarse,
                nodes,
                doubling_difference: difference,
            })
        }
        Group::Cyclic(m) => Ok(QuadratureEstimate {
            value: integrate_cost(spec, v, &ClassRule::cyclic(m)),
            nodes: m as usize,
            doubling_difference: 0.0,
        }),
    }
}

/// Average cost `∫ dg c(g) p(g)` by quadrature over classes.
///
/// SU(2) integrals use `nodes` Gauss-Legendre points and fail if doubling the
/// node count moves the value by more than [`QUADRATURE_TOLERANCE`]. On `Z_M`
/// the sum over the group is exact.
pub fn average_cost_quadrature(
    spec: &CostSpec,
    v: &CoefficientVector,
    nodes: usize,
) -> Result<f64> {
    quadrature_estimate(spec, v, nodes).map(|q| q.value)
}

/// Inverse-CDF sampler for the estimated class `x` under `p(x)·dHaar(x)`.
#[derive(Clone, Debug)]
pub struct LikelihoodSampler {
    /// Left edge of each cell (SU(2)) or the element angle (`Z_M`).
    points: Vec<f64>,
    cumulative: Vec<f64>,
    cell_width: f64,
    continuous: bool,
}

impl LikelihoodSampler {
    pub fn new(v: &CoefficientVector) -> Self {
        match v.set.group() {
            Group::Su2 => Self::su2(v, SAMPLER_TABLE_CELLS),
            Group::Cyclic(m) => Self::cyclic(v, m),
        }
    }

    fn su2(v: &CoefficientVector, cells: usize) -> Self {
        let h = 2.0 * std::f64::consts::PI / cells as f64;
        let q = |theta: f64| {
            likelihood_density(v, ClassPoint(theta)) * crate::group::su2::class_weight(theta)
        };
        let mut points = Vec::with_capacity(cells);
        let mut cumulative = Vec::with_capacity(cells);
        let mut acc = 0.0;
        let mut left = q(0.0);
        for i in 0..cells {
            let a = i as f64 * h;
            let right = q(a + h);
            // Simpson mass of the cell.
            acc += h / 6.0 * (left + 4.0 * q(a + 0.5 * h) + right);
            points.push(a);
            cumulative.push(acc);
            left = right;
        }
        LikelihoodSampler {
            points,
            cumulative,
            cell_width: h,
            continuous: true,
        }
    }

    fn cyclic(v: &CoefficientVector, order: u32) -> Self {
        let mut acc = 0.0;
        let mut points = Vec::with_capacity(order as usize);
        let mut cumulative = Vec::with_capacity(order as usize);
        for t in 0..order {
            let phi = crate::group::cyclic::element_angle(order, t);
            acc += likelihood_density(v, ClassPoint(phi)) / f64::from(order);
            points.push(phi);
            cumulative.push(acc);
        }
        LikelihoodSampler {
            points,
            cumulative,
            cell_width: 0.0,
            continuous: false,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ClassPoint {
        let total = *self.cumulative.last().expect("nonempty table");
        let u = rng.gen::<f64>() * total;
        let i = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        if !self.continuous {
            return ClassPoint(self.points[i]);
        }
        let lo = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        let mass = self.cumulative[i] - lo;
        let frac = if mass > 0.0 {
            ((u - lo) / mass).clamp(0.0, 1.0)
        } else {
            0.5
        };
        ClassPoint(self.points[i] + frac * self.cell_width)
    }
}

/// `count` i.i.d. outcome classes of the optimal covariant POVM, deterministic
/// for a given `seed`.
pub fn sample_estimate_angle(v: &CoefficientVector, seed: u64, count: usize) -> Vec<ClassPoint> {
    let sampler = LikelihoodSampler::new(v);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sampler.sample(&mut rng)).collect()
}
