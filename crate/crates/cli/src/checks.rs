use groupest::cost::{evaluate_cost, maxent_fidelity_cost, refframe_cost};
use groupest::dense::{
    dense_maxent_overlap, schur_decompose, DenseEstimationModel, MAX_MAXENT_COPIES, MAX_POVM_QUBITS,
};
use groupest::estimation::{average_cost_quadrature, likelihood_density, sample_estimate_angle};
use groupest::group::su2;
use groupest::protocols::{
    maxent_estimation, maxent_overlap_identity, phase_closed_form, phase_protocol,
    refframe_protocol,
};
use groupest::{ClassPoint, Group, Result};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const ORACLE_NODES: usize = 2048;
const ORACLE_TOLERANCE: f64 = 1e-8;
const DENSE_PAIRS: usize = 10;
const SCHUR_CAP: u32 = 10;
const PHASE_ORDER: u32 = 64;
const MONTE_CARLO_SAMPLES: usize = 100_000;

#[derive(Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn from_result(name: String, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => CheckOutcome {
                name,
                passed,
                detail,
            },
            Err(e) => CheckOutcome {
                name,
                passed: false,
                detail: e.to_string(),
            },
        }
    }
}

fn within(diff: f64, tol: f64) -> (bool, String) {
    (
        diff < tol,
        format!("difference {diff:.3e} (tolerance {tol:.0e})"),
    )
}

/// Runs every cross-check that is affordable up to `n_max`.
pub fn run_checks(n_max: u32, seed: u64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for n in 2..=n_max {
        let r = refframe_protocol(n).and_then(|rep| {
            let q =
                average_cost_quadrature(&refframe_cost(), &rep.result.coefficients, ORACLE_NODES)?;
            Ok(within((rep.result.matrix_cost - q).abs(), ORACLE_TOLERANCE))
        });
        out.push(CheckOutcome::from_result(
            format!("quadrature/refframe N={n}"),
            r,
        ));
    }
    for n in 1..=n_max {
        let r = maxent_estimation(n).and_then(|rep| {
            let q = average_cost_quadrature(
                &maxent_fidelity_cost(),
                &rep.result.coefficients,
                ORACLE_NODES,
            )?;
            Ok(within((rep.result.matrix_cost - q).abs(), ORACLE_TOLERANCE))
        });
        out.push(CheckOutcome::from_result(
            format!("quadrature/maxent N={n}"),
            r,
        ));
    }

    for n in 1..=n_max.min(SCHUR_CAP) {
        let r = schur_decompose(n).and_then(|basis| {
            let counts = basis.block_counts();
            let set = su2::irrep_set_for_tensor_power(n, true)?;
            let ok = set.labels().len() == counts.len()
                && set
                    .labels()
                    .iter()
                    .zip(set.mults())
                    .all(|(l, m)| counts.get(l).copied() == m.to_usize());
            Ok((ok, format!("{} sectors", counts.len())))
        });
        out.push(CheckOutcome::from_result(format!("schur/blocks N={n}"), r));
    }

    for n in 2..=n_max.min(MAX_POVM_QUBITS) {
        let pairs: Vec<([f64; 3], f64)> = (0..DENSE_PAIRS)
            .map(|_| {
                let axis = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                (axis, rng.gen_range(0.0..4.0 * std::f64::consts::PI))
            })
            .collect();
        let r = refframe_protocol(n).and_then(|rep| {
            let basis = schur_decompose(n)?;
            let model = DenseEstimationModel::new(&basis, &rep.result.coefficients)?;
            let mut worst = 0f64;
            for (axis, angle) in pairs {
                let dense = model.probability(axis, angle)?;
                let closed = likelihood_density(&rep.result.coefficients, ClassPoint(angle));
                worst = worst.max((dense - closed).abs());
            }
            Ok(within(worst, ORACLE_TOLERANCE))
        });
        out.push(CheckOutcome::from_result(format!("dense/povm N={n}"), r));
    }

    for n in 1..=n_max.min(MAX_MAXENT_COPIES) {
        let r = (|| -> Result<(bool, String)> {
            let mut worst = 0f64;
            for k in 0..16 {
                let angle = 0.4 * k as f64;
                let dense = dense_maxent_overlap(n, [0.6, 0.0, 0.8], angle)?;
                let (direct, sectors) = maxent_overlap_identity(n, ClassPoint(angle))?;
                worst = worst
                    .max((dense - direct).abs())
                    .max((dense - sectors).abs());
            }
            Ok(within(worst, ORACLE_TOLERANCE))
        })();
        out.push(CheckOutcome::from_result(
            format!("dense/maxent-overlap N={n}"),
            r,
        ));
    }

    for n in 1..=n_max.min(PHASE_ORDER - 2) {
        let r = phase_protocol(PHASE_ORDER, n)
            .map(|rep| within((rep.result.min_cost - phase_closed_form(n)).abs(), 1e-10));
        out.push(CheckOutcome::from_result(
            format!("phase/closed-form M={PHASE_ORDER} n={n}"),
            r,
        ));
    }

    let mc_n = n_max.clamp(2, MAX_POVM_QUBITS);
    let r = refframe_protocol(mc_n).map(|rep| {
        let spec = refframe_cost();
        let costs: Vec<f64> =
            sample_estimate_angle(&rep.result.coefficients, seed, MONTE_CARLO_SAMPLES)
                .into_iter()
                .map(|x| evaluate_cost(&spec, Group::Su2, x))
                .collect();
        let count = costs.len() as f64;
        let mean = costs.iter().sum::<f64>() / count;
        let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (count - 1.0);
        let se = (var / count).sqrt();
        let z = (mean - rep.result.min_cost).abs() / se;
        (
            z < 4.0,
            format!(
                "mean {mean:.6} vs optimum {:.6}, {z:.2} standard errors",
                rep.result.min_cost
            ),
        )
    });
    out.push(CheckOutcome::from_result(
        format!("monte-carlo/refframe N={mc_n}"),
        r,
    ));

    out
}
