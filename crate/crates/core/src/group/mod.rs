//! Group models: irrep labels, dimensions, characters, class quadrature and
//! Clebsch-Gordan multiplicities for SU(2) and the cyclic groups `Z_M`.

pub mod cyclic;
pub mod su2;

use std::fmt;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of Gauss-Legendre nodes for SU(2) class integrals.
pub const DEFAULT_QUAD_NODES: usize = 1024;

/// Names an irrep: `2j` for SU(2), the residue `k` for `Z_M`.
///
/// Which one is meant depends on the [`Group`] the label is used with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IrrepLabel(pub u32);

impl IrrepLabel {
    pub const TRIVIAL: IrrepLabel = IrrepLabel(0);

    pub fn spin_twice(twice_j: u32) -> Self {
        IrrepLabel(twice_j)
    }

    pub fn residue(k: u32) -> Self {
        IrrepLabel(k)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// Spin `j` when the label is read as an SU(2) irrep.
    pub fn spin(self) -> f64 {
        0.5 * f64::from(self.0)
    }

    pub fn is_trivial(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point on the space of conjugacy classes.
///
/// For SU(2) this is the rotation angle `θ`; for `Z_M` the angle `2πt/M`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassPoint(pub f64);

impl ClassPoint {
    pub fn angle(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Su2,
    /// `Z_M` with the given order `M ≥ 1`.
    Cyclic(u32),
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Su2 => write!(f, "SU(2)"),
            Group::Cyclic(m) => write!(f, "Z_{m}"),
        }
    }
}

impl Group {
    pub fn cyclic(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("cyclic group order must be positive".into()));
        }
        Ok(Group::Cyclic(order))
    }

    pub fn contains(&self, label: IrrepLabel) -> bool {
        match *self {
            Group::Su2 => true,
            Group::Cyclic(m) => label.0 < m,
        }
    }

    pub fn check(&self, label: IrrepLabel) -> Result<()> {
        if self.contains(label) {
            Ok(())
        } else {
            Err(Error::LabelOutsideGroup {
                label,
                group: *self,
            })
        }
    }

    pub fn dim(&self, label: IrrepLabel) -> usize {
        match self {
            Group::Su2 => su2::dim(label.0),
            Group::Cyclic(_) => 1,
        }
    }

    pub fn conjugate(&self, label: IrrepLabel) -> IrrepLabel {
        match *self {
            Group::Su2 => label,
            Group::Cyclic(m) => IrrepLabel(cyclic::conjugate(m, label.0)),
        }
    }

    /// Character `χ^label(x)`. Real for SU(2).
    pub fn character(&self, label: IrrepLabel, x: ClassPoint) -> Complex64 {
        match self {
            Group::Su2 => Complex64::new(su2::character(label.0, x.0), 0.0),
            Group::Cyclic(_) => cyclic::character(label.0, x.0),
        }
    }

    /// Multiplicity of `sigma` in the tensor product `mu ⊗ nu`.
    pub fn cg_multiplicity(&self, mu: IrrepLabel, nu: IrrepLabel, sigma: IrrepLabel) -> u32 {
        match *self {
            Group::Su2 => su2::cg_multiplicity(mu.0, nu.0, sigma.0),
            Group::Cyclic(m) => cyclic::cg_multiplicity(m, mu.0, nu.0, sigma.0),
        }
    }

    /// Quadrature for Haar integrals of class functions.
    ///
    /// SU(2) uses `nodes` Gauss-Legendre points on `[0, 2π]` with the Weyl
    /// weight folded in; `Z_M` ignores `nodes` and sums over all `M` elements.
    pub fn class_rule(&self, nodes: usize) -> Result<ClassRule> {
        match *self {
            Group::Su2 => ClassRule::su2(nodes),
            Group::Cyclic(m) => Ok(ClassRule::cyclic(m)),
        }
    }
}

/// Nodes and normalized weights for integrating class functions against the
/// Haar measure. The weights sum to one.
#[derive(Clone, Debug)]
pub struct ClassRule {
    points: Vec<ClassPoint>,
    weights: Vec<f64>,
}

impl ClassRule {
    pub fn su2(nodes: usize) -> Result<Self> {
        let degree = NonZeroUsize::new(nodes)
            .ok_or_else(|| Error::Domain("quadrature needs at least one node".into()))?;
        let rule = GaussLegendre::new(degree);
        let half_width = std::f64::consts::PI;
        let (points, weights) = rule
            .iter()
            .map(|(x, w)| {
                let theta = half_width * (x + 1.0);
                (ClassPoint(theta), half_width * w * su2::class_weight(theta))
            })
            .unzip();
        Ok(ClassRule { points, weights })
    }

    pub fn cyclic(order: u32) -> Self {
        let w = 1.0 / f64::from(order);
        ClassRule {
            points: (0..order)
                .map(|t| ClassPoint(cyclic::element_angle(order, t)))
                .collect(),
            weights: vec![w; order as usize],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ClassPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(ClassPoint) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn integrate_complex<F: FnMut(ClassPoint) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }
}

/// An ordered set of irreps with their dimensions and multiplicities.
///
/// Every vector and matrix indexed "over S" uses this ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrepSet {
    group: Group,
    labels: Vec<IrrepLabel>,
    dims: Vec<usize>,
    mults: Vec<BigUint>,
}

impl IrrepSet {
    /// Labels must be strictly increasing, belong to `group` and have
    /// positive multiplicities.
    pub fn new(group: Group, labels: Vec<IrrepLabel>, mults: Vec<BigUint>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySet(
                "an irrep set needs at least one label".into(),
            ));
        }
        if labels.len() != mults.len() {
            return Err(Error::Domain(format!(
                "{} labels but {} multiplicities",
                labels.len(),
                mults.len()
            )));
        }
        for &l in &labels {
            group.check(l)?;
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("labels must be strictly increasing".into()));
        }
        if let Some(pos) = mults.iter().position(Zero::is_zero) {
            return Err(Error::Domain(format!(
                "label {} has zero multiplicity",
                labels[pos]
            )));
        }
        let dims = labels.iter().map(|&l| group.dim(l)).collect();
        Ok(IrrepSet {
            group,
            labels,
            dims,
            mults,
        })
    }

    /// Set with every multiplicity equal to one. Labels are sorted and
    /// deduplicated first.
    pub fn with_unit_multiplicities(group: Group, mut labels: Vec<IrrepLabel>) -> Result<Self> {
        labels.sort_unstable();
        labels.dedup();
        let mults = vec![BigUint::from(1u32); labels.len()];
        IrrepSet::new(group, labels, mults)
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[IrrepLabel] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn mults(&self) -> &[BigUint] {
        &self.mults
    }

    pub fn position(&self, label: IrrepLabel) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn contains(&self, label: IrrepLabel) -> bool {
        self.position(label).is_some()
    }

    /// `Σ_μ d_μ m_μ`, the dimension of the whole space.
    pub fn total_dimension(&self) -> BigUint {
        self.dims.iter().zip(&self.mults).map(|(&d, m)| m * d).sum()
    }

    /// Largest `d_μ / m_μ`: the smallest reference-system dimension that
    /// lets every sector hold a maximally entangled block.
    pub fn min_reference_dimension(&self) -> f64 {
        self.dims
            .iter()
            .zip(&self.mults)
            .map(|(&d, m)| d as f64 / m.to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize)]
struct IrrepSetRepr<'a> {
    group: Group,
    labels: &'a [IrrepLabel],
    dims: &'a [usize],
    mults: Vec<String>,
}

impl Serialize for IrrepSet {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        IrrepSetRepr {
            group: self.group,
            labels: &self.labels,
            dims: &self.dims,
            mults: self.mults.iter().map(ToString::to_string).collect(),
        }
        .serialize(serializer)
    }
}
