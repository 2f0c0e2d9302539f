//! Invariant cost functions in the generalized Holevo class.
//!
//! A cost `c(ĝ, g)` that is invariant under the group action depends only on
//! the class of `ĝ g⁻¹` and expands as `Σ_σ a_σ χ^{σ*}`. A [`CostSpec`] stores
//! the trivial coefficient as `constant` and the rest in `coeffs`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ClassPoint, ClassRule, Group, IrrepLabel, IrrepSet};

/// Expansion coefficients below this magnitude are dropped from the
/// [`CostSpec`] returned by [`expand_class_function`].
pub const EXPANSION_PRUNE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CostSpecRepr", into = "CostSpecRepr")]
pub struct CostSpec {
    constant: f64,
    coeffs: BTreeMap<IrrepLabel, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostSpecRepr {
    constant: f64,
    #[serde(default)]
    coeffs: BTreeMap<IrrepLabel, f64>,
}

impl TryFrom<CostSpecRepr> for CostSpec {
    type Error = Error;

    fn try_from(r: CostSpecRepr) -> Result<Self> {
        CostSpec::new(r.constant, r.coeffs)
    }
}

impl From<CostSpec> for CostSpecRepr {
    fn from(c: CostSpec) -> Self {
        CostSpecRepr {
            constant: c.constant,
            coeffs: c.coeffs,
        }
    }
}

impl CostSpec {
    /// The trivial label may not appear in `coeffs`; its coefficient is
    /// `constant`.
    pub fn new(constant: f64, coeffs: BTreeMap<IrrepLabel, f64>) -> Result<Self> {
        if !constant.is_finite() {
            return Err(Error::InvalidCostSpec("constant is not finite".into()));
        }
        if coeffs.contains_key(&IrrepLabel::TRIVIAL) {
            return Err(Error::InvalidCostSpec(
                "the trivial irrep's coefficient belongs in `constant`".into(),
            ));
        }
        if let Some((l, a)) = coeffs.iter().find(|(_, a)| !a.is_finite()) {
            return Err(Error::InvalidCostSpec(format!(
                "coefficient {a} at label {l} is not finite"
            )));
        }
        Ok(CostSpec { constant, coeffs })
    }

    pub fn constant_only(constant: f64) -> Result<Self> {
        CostSpec::new(constant, BTreeMap::new())
    }

    pub fn from_pairs<I: IntoIterator<Item = (IrrepLabel, f64)>>(
        constant: f64,
        pairs: I,
    ) -> Result<Self> {
        CostSpec::new(constant, pairs.into_iter().collect())
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn coeffs(&self) -> &BTreeMap<IrrepLabel, f64> {
        &self.coeffs
    }

    pub fn coeff(&self, label: IrrepLabel) -> f64 {
        if label.is_trivial() {
            self.constant
        } else {
            self.coeffs.get(&label).copied().unwrap_or(0.0)
        }
    }

    /// Multiplies every coefficient, the constant included, by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        CostSpec::new(
            factor * self.constant,
            self.coeffs.iter().map(|(&l, &a)| (l, factor * a)).collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cost spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidCostSpec(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HolevoViolation {
    /// `a_σ > 0` for a nontrivial `σ`.
    PositiveCoefficient {
        label: IrrepLabel,
        value: f64,
    },
    /// `a_k ≠ a_{M-k}` on `Z_M`.
    ConjugateMismatch {
        label: IrrepLabel,
        partner: IrrepLabel,
        value: f64,
        partner_value: f64,
    },
    OutsideGroup {
        label: IrrepLabel,
    },
}

impl HolevoViolation {
    pub fn label(&self) -> IrrepLabel {
        match *self {
            HolevoViolation::PositiveCoefficient { label, .. }
            | HolevoViolation::ConjugateMismatch { label, .. }
            | HolevoViolation::OutsideGroup { label } => label,
        }
    }
}

impl fmt::Display for HolevoViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HolevoViolation::PositiveCoefficient { label, value } => {
                write!(f, "coefficient at label {label} is positive ({value})")
            }
            HolevoViolation::ConjugateMismatch {
                label,
                partner,
                value,
                partner_value,
            } => write!(
                f,
                "coefficient at label {label} ({value}) differs from its conjugate {partner} ({partner_value})"
            ),
            HolevoViolation::OutsideGroup { label } => {
                write!(f, "label {label} is not an irrep of the group")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HolevoReport {
    pub violations: Vec<HolevoViolation>,
}

impl HolevoReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn offending_labels(&self) -> Vec<IrrepLabel> {
        let mut labels: Vec<_> = self.violations.iter().map(HolevoViolation::label).collect();
        labels.dedup();
        labels
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::NotHolevo {
                labels: self.offending_labels(),
            })
        }
    }
}

/// Checks the sign rule `a_σ ≤ 0` for all nontrivial `σ` and, on `Z_M`, the
/// reality condition `a_k = a_{M-k}`.
pub fn validate_holevo(spec: &CostSpec, group: Group) -> HolevoReport {
    let mut violations = Vec::new();
    for (&label, &value) in &spec.coeffs {
        if !group.contains(label) {
            violations.push(HolevoViolation::OutsideGroup { label });
            continue;
        }
        if value > 0.0 {
            violations.push(HolevoViolation::PositiveCoefficient { label, value });
        }
        let partner = group.conjugate(label);
        let partner_value = spec.coeff(partner);
        if partner != label && (value - partner_value).abs() > 1e-12 * value.abs().max(1.0) {
            violations.push(HolevoViolation::ConjugateMismatch {
                label,
                partner,
                value,
                partner_value,
            });
        }
    }
    HolevoReport { violations }
}

/// Transmission error for Cartesian frames: `6 - 2χ¹`.
pub fn refframe_cost() -> CostSpec {
    CostSpec::from_pairs(6.0, [(IrrepLabel::spin_twice(2), -2.0)]).expect("valid builtin")
}

/// Infidelity between two-qubit maximally entangled states: `(3 - χ¹)/4`,
/// equal to `sin²(θ/2)`.
pub fn maxent_fidelity_cost() -> CostSpec {
    CostSpec::from_pairs(0.75, [(IrrepLabel::spin_twice(2), -0.25)]).expect("valid builtin")
}

/// Negated delta function truncated to the labels of `set`: every
/// coefficient is `-d_σ` and the constant is `-1`.
///
/// The truncation must contain every `σ` that occurs in `μ ⊗ ν*` for labels
/// `μ, ν` of the state being optimized; otherwise the matrix route sees a
/// different cost from the one intended.
pub fn delta_cost(set: &IrrepSet) -> Result<CostSpec> {
    if set.is_empty() {
        return Err(Error::EmptySet("delta cost needs a truncation set".into()));
    }
    let group = set.group();
    CostSpec::new(
        -(group.dim(IrrepLabel::TRIVIAL) as f64),
        set.labels()
            .iter()
            .zip(set.dims())
            .filter(|(l, _)| !l.is_trivial())
            .map(|(&l, &d)| (l, -(d as f64)))
            .collect(),
    )
}

/// Holevo's phase cost `1 - cos(φ̂ - φ)` on `Z_M`.
pub fn holevo_phase_cost(order: u32) -> Result<CostSpec> {
    if order < 3 {
        return Err(Error::Domain(format!(
            "phase cost needs M >= 3 so that k = 1 and k = M - 1 differ, got M = {order}"
        )));
    }
    CostSpec::from_pairs(
        1.0,
        [
            (IrrepLabel::residue(1), -0.5),
            (IrrepLabel::residue(order - 1), -0.5),
        ],
    )
}

/// `constant + Σ_σ a_σ χ^{σ*}(x)`, real part.
pub fn evaluate_cost(spec: &CostSpec, group: Group, x: ClassPoint) -> f64 {
    spec.constant
        + spec
            .coeffs
            .iter()
            .map(|(&l, &a)| a * group.character(l, x).re)
            .sum::<f64>()
}

/// Result of projecting a class function onto characters.
#[derive(Clone, Debug)]
pub struct ClassExpansion {
    /// Pruned coefficients, ready for use as a cost.
    pub spec: CostSpec,
    /// Every computed coefficient, trivial label first.
    pub coefficients: Vec<(IrrepLabel, f64)>,
    /// Haar-weighted L² distance between the function and its truncation.
    pub residual: f64,
}

/// Expands a class function in characters up to `max_label`:
/// `a_σ = ∫ dg f(g) χ^σ(g)`.
///
/// The sign condition is not enforced; run [`validate_holevo`] on the result.
pub fn expand_class_function<F>(
    group: Group,
    f: F,
    max_label: IrrepLabel,
    nodes: usize,
) -> Result<ClassExpansion>
where
    F: Fn(ClassPoint) -> f64,
{
    let rule: ClassRule = group.class_rule(nodes)?;
    let values: Vec<f64> = rule.points().iter().map(|&x| f(x)).collect();
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "class function is not finite at angle {}",
            rule.points()[pos].0
        )));
    }
    let top = match group {
        Group::Su2 => max_label.0,
        Group::Cyclic(m) => max_label.0.min(m - 1),
    };
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));

    let mut coefficients = Vec::with_capacity(top as usize + 1);
    for k in 0..=top {
        let label = IrrepLabel(k);
        let a = rule
            .points()
            .iter()
            .zip(rule.weights())
            .zip(&values)
            .map(|((&x, &w), &v)| group.character(label, x) * (w * v))
            .sum::<num_complex::Complex64>();
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::NonFinite(format!("coefficient at label {label}")));
        }
        if a.im.abs() > 1e-10 * scale {
            return Err(Error::InvalidCostSpec(format!(
                "class function has a complex coefficient at label {label}; it is not real-symmetric"
            )));
        }
        coefficients.push((label, a.re));
    }

    let constant = coefficients[0].1;
    let spec = CostSpec::new(
        constant,
        coefficients[1..]
            .iter()
            .filter(|(_, a)| a.abs() > EXPANSION_PRUNE)
            .copied()
            .collect(),
    )?;

    let residual = rule
        .points()
        .iter()
        .zip(rule.weights())
        .zip(&values)
        .map(|((&x, &w), &v)| {
            let recon: f64 = coefficients
                .iter()
                .map(|&(l, a)| a * group.character(l, x).re)
                .sum();
            w * (v - recon).powi(2)
        })
        .sum::<f64>()
        .sqrt();

    Ok(ClassExpansion {
        spec,
        coefficients,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{su2, DEFAULT_QUAD_NODES};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn l(k: u32) -> IrrepLabel {
        IrrepLabel(k)
    }

    #[test]
    fn holevo_validation() {
        assert!(validate_holevo(&refframe_cost(), Group::Su2).is_ok());
        assert!(validate_holevo(&CostSpec::constant_only(0.0).unwrap(), Group::Su2).is_ok());
        let bad = CostSpec::from_pairs(0.0, [(l(2), 0.5)]).unwrap();
        let report = validate_holevo(&bad, Group::Su2);
        assert_eq!(report.offending_labels(), vec![l(2)]);
        assert!(matches!(report.into_result(), Err(Error::NotHolevo { .. })));
    }

    #[test]
    fn cyclic_pairing_violation() {
        let spec = CostSpec::from_pairs(1.0, [(l(1), -0.5), (l(7), -0.25)]).unwrap();
        let report = validate_holevo(&spec, Group::Cyclic(8));
        assert!(!report.is_ok());
        assert!(report
            .violations
            .iter()
            .all(|v| matches!(v, HolevoViolation::ConjugateMismatch { .. })));
        let outside = CostSpec::from_pairs(1.0, [(l(9), -0.5)]).unwrap();
        assert!(!validate_holevo(&outside, Group::Cyclic(8)).is_ok());
    }

    #[test]
    fn spec_rejects_trivial_in_coeffs() {
        assert!(CostSpec::from_pairs(1.0, [(l(0), -1.0)]).is_err());
        assert!(CostSpec::from_pairs(f64::NAN, []).is_err());
    }

    #[test]
    fn refframe_cost_values() {
        let c = refframe_cost();
        assert_eq!(c.constant(), 6.0);
        assert_eq!(c.coeff(l(2)), -2.0);
        assert_abs_diff_eq!(
            evaluate_cost(&c, Group::Su2, ClassPoint(0.0)),
            0.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            evaluate_cost(&c, Group::Su2, ClassPoint(PI)),
            8.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            evaluate_cost(&c, Group::Su2, ClassPoint(PI / 2.0)),
            4.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn maxent_cost_is_sin_squared() {
        let c = maxent_fidelity_cost();
        assert_abs_diff_eq!(
            evaluate_cost(&c, Group::Su2, ClassPoint(0.0)),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            evaluate_cost(&c, Group::Su2, ClassPoint(PI)),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            evaluate_cost(&c, Group::Su2, ClassPoint(2.0 * PI / 3.0)),
            0.75,
            epsilon = 1e-15
        );
        for k in 0..100 {
            let theta = 2.0 * PI * k as f64 / 99.0;
            let want = (theta / 2.0).sin().powi(2);
            assert_abs_diff_eq!(
                evaluate_cost(&c, Group::Su2, ClassPoint(theta)),
                want,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn delta_cost_examples() {
        let s = IrrepSet::with_unit_multiplicities(Group::Su2, vec![l(0), l(2)]).unwrap();
        let d = delta_cost(&s).unwrap();
        assert_eq!(d, CostSpec::from_pairs(-1.0, [(l(2), -3.0)]).unwrap());

        let s = IrrepSet::with_unit_multiplicities(Group::Su2, vec![l(0)]).unwrap();
        assert_eq!(
            delta_cost(&s).unwrap(),
            CostSpec::constant_only(-1.0).unwrap()
        );

        let s = IrrepSet::with_unit_multiplicities(Group::Su2, vec![l(0), l(1), l(2)]).unwrap();
        let d = delta_cost(&s).unwrap();
        assert_eq!(
            d,
            CostSpec::from_pairs(-1.0, [(l(1), -2.0), (l(2), -3.0)]).unwrap()
        );
        for (i, &lab) in s.labels().iter().enumerate() {
            assert_eq!(d.coeff(lab), -(s.dims()[i] as f64));
        }
        assert!(validate_holevo(&d, Group::Su2).is_ok());
    }

    #[test]
    fn phase_cost() {
        let c = holevo_phase_cost(8).unwrap();
        let g = Group::Cyclic(8);
        assert_abs_diff_eq!(evaluate_cost(&c, g, ClassPoint(0.0)), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(evaluate_cost(&c, g, ClassPoint(PI)), 2.0, epsilon = 1e-15);
        assert_eq!(c.coeff(l(1)), c.coeff(l(7)));
        assert!(validate_holevo(&c, g).is_ok());
        assert!(holevo_phase_cost(2).is_err());
    }

    #[test]
    fn evaluate_at_identity_is_weighted_sum() {
        let s =
            IrrepSet::with_unit_multiplicities(Group::Su2, vec![l(0), l(1), l(2), l(5)]).unwrap();
        let c = delta_cost(&s).unwrap();
        let want = c.constant()
            + c.coeffs()
                .iter()
                .map(|(&lab, &a)| a * su2::dim(lab.0) as f64)
                .sum::<f64>();
        assert_eq!(evaluate_cost(&c, Group::Su2, ClassPoint(0.0)), want);
    }

    #[test]
    fn builtins_nonnegative_and_vanish_only_at_identity() {
        let costs = [refframe_cost(), maxent_fidelity_cost()];
        for c in &costs {
            for k in 0..=10_000 {
                let theta = 2.0 * PI * k as f64 / 10_000.0;
                let v = evaluate_cost(c, Group::Su2, ClassPoint(theta));
                assert!(v >= -1e-14, "negative cost {v} at {theta}");
                // θ = 2π is the identity rotation for integer-spin costs.
                if k > 0 && k < 10_000 {
                    assert!(v > 1e-9, "cost vanishes away from identity at {theta}");
                }
            }
        }
        let phase = holevo_phase_cost(64).unwrap();
        for t in 0..64 {
            let v = evaluate_cost(
                &phase,
                Group::Cyclic(64),
                ClassPoint(2.0 * PI * t as f64 / 64.0),
            );
            assert!(v >= -1e-14);
            assert_eq!(t == 0, v.abs() < 1e-12);
        }
    }

    #[test]
    fn expansion_examples() {
        let e = expand_class_function(
            Group::Su2,
            |x| 4.0 - 4.0 * x.0.cos(),
            l(6),
            DEFAULT_QUAD_NODES,
        )
        .unwrap();
        assert_abs_diff_eq!(e.spec.constant(), 6.0, epsilon = 1e-10);
        assert_abs_diff_eq!(e.spec.coeff(l(2)), -2.0, epsilon = 1e-10);
        assert!(e.residual < 1e-10);
        assert_eq!(e.spec.coeffs().len(), 1);

        let e = expand_class_function(
            Group::Su2,
            |x| (x.0 / 2.0).sin().powi(2),
            l(6),
            DEFAULT_QUAD_NODES,
        )
        .unwrap();
        assert_abs_diff_eq!(e.spec.constant(), 0.75, epsilon = 1e-10);
        assert_abs_diff_eq!(e.spec.coeff(l(2)), -0.25, epsilon = 1e-10);

        let e = expand_class_function(Group::Su2, |_| 1.0, l(4), DEFAULT_QUAD_NODES).unwrap();
        assert_abs_diff_eq!(e.spec.constant(), 1.0, epsilon = 1e-12);
        assert!(e.spec.coeffs().is_empty());
    }

    #[test]
    fn expansion_does_not_enforce_sign_rule() {
        // 4 + 4cosθ = 2 + 2χ¹: positive coefficient survives.
        let e = expand_class_function(Group::Su2, |x| 4.0 + 4.0 * x.0.cos(), l(4), 256).unwrap();
        assert_abs_diff_eq!(e.spec.coeff(l(2)), 2.0, epsilon = 1e-10);
        assert!(!validate_holevo(&e.spec, Group::Su2).is_ok());
    }

    #[test]
    fn expansion_truncation_reports_residual() {
        // sin⁴(θ/2) needs χ² as well; truncating at j = 1 leaves a residual.
        let f = |x: ClassPoint| (x.0 / 2.0).sin().powi(4);
        let full = expand_class_function(Group::Su2, f, l(8), 512).unwrap();
        let cut = expand_class_function(Group::Su2, f, l(2), 512).unwrap();
        assert!(full.residual < 1e-10);
        assert!(cut.residual > 1e-3);
    }

    #[test]
    fn expansion_rejects_non_finite() {
        let r = expand_class_function(Group::Su2, |x| 1.0 / (x.0 - x.0), l(2), 64);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn expansion_roundtrip_builtins() {
        let cases = [
            (Group::Su2, refframe_cost()),
            (Group::Su2, maxent_fidelity_cost()),
            (
                Group::Su2,
                delta_cost(
                    &IrrepSet::with_unit_multiplicities(Group::Su2, (0..=6).map(l).collect())
                        .unwrap(),
                )
                .unwrap(),
            ),
            (Group::Cyclic(16), holevo_phase_cost(16).unwrap()),
        ];
        for (g, c) in cases {
            let e =
                expand_class_function(g, |x| evaluate_cost(&c, g, x), l(15), DEFAULT_QUAD_NODES)
                    .unwrap();
            assert_abs_diff_eq!(e.spec.constant(), c.constant(), epsilon = 1e-9);
            for &(lab, a) in &e.coefficients[1..] {
                assert_abs_diff_eq!(a, c.coeff(lab), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn json_schema() {
        let c = refframe_cost();
        let s = c.to_json();
        assert_eq!(s, r#"{"constant":6.0,"coeffs":{"2":-2.0}}"#);
        assert_eq!(CostSpec::from_json(&s).unwrap(), c);
        assert!(CostSpec::from_json(r#"{"constant":1,"coeffs":{"0":-1}}"#).is_err());
        assert!(CostSpec::from_json(r#"{"constant":1,"coeffs":{"x":-1}}"#).is_err());
        assert!(CostSpec::from_json(r#"{"constant":1,"extra":2}"#).is_err());
        assert_eq!(
            CostSpec::from_json(r#"{"constant":2}"#).unwrap(),
            CostSpec::constant_only(2.0).unwrap()
        );
    }
}
