//! Brute-force checks on the explicit `2^N`-dimensional qubit space.
//!
//! Collective spin operators are built directly, the space is split into
//! spin blocks by the highest-weight construction, and optimal states and
//! POVM seeds are assembled as explicit vectors so that measurement
//! probabilities can be computed with the Born rule and compared with the
//! closed-form character expressions.
//!
//! Qubit convention: bit `k` of a basis index is 0 for spin up along `z`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::estimation::CoefficientVector;
use crate::group::{su2, Group, IrrepLabel};

/// Largest qubit count for operator construction and Schur decomposition.
pub const MAX_SCHUR_QUBITS: u32 = 12;
/// Largest qubit count for [`dense_povm_probability`].
pub const MAX_POVM_QUBITS: u32 = 8;
/// Largest number of copies for [`dense_maxent_overlap`].
pub const MAX_MAXENT_COPIES: u32 = 4;

/// Kernel eigenvalues of `J₋J₊` on a weight space are 0; the next ones are at
/// least `2(j+1)`.
const KERNEL_THRESHOLD: f64 = 0.5;

fn check_cap(n: u32, cap: u32, what: &str) -> Result<()> {
    if n == 0 || n > cap {
        return Err(Error::Domain(format!(
            "{what} supports 1 <= N <= {cap}, got {n}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct CollectiveOperators {
    pub j_squared: DMatrix<f64>,
    pub j_z: DMatrix<f64>,
    pub j_minus: DMatrix<f64>,
}

fn weight_of(n: u32, basis: usize) -> f64 {
    0.5 * f64::from(n) - f64::from(basis.count_ones())
}

/// Dense `J²`, `J_z` and `J₋` for `n` spin-½ particles.
pub fn build_collective_operators(n: u32) -> Result<CollectiveOperators> {
    check_cap(n, MAX_SCHUR_QUBITS, "collective operators")?;
    let dim = 1usize << n;
    let j_z = DMatrix::from_fn(dim, dim, |r, c| if r == c { weight_of(n, r) } else { 0.0 });

    let mut j_minus = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        for k in 0..n {
            if b & (1 << k) == 0 {
                j_minus[(b | (1 << k), b)] = 1.0;
            }
        }
    }

    // J² = 3N/4 - N(N-1)/4 + Σ_{k<l} SWAP_kl.
    let nf = f64::from(n);
    let mut j_squared = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        j_squared[(b, b)] += 0.75 * nf - 0.25 * nf * (nf - 1.0);
        for k in 0..n {
            for l in k + 1..n {
                let (bk, bl) = ((b >> k) & 1, (b >> l) & 1);
                let swapped = if bk == bl { b } else { b ^ (1 << k) ^ (1 << l) };
                j_squared[(swapped, b)] += 1.0;
            }
        }
    }
    Ok(CollectiveOperators {
        j_squared,
        j_z,
        j_minus,
    })
}

fn apply_lowering(n: u32, v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for (b, &a) in v.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for k in 0..n {
            if b & (1 << k) == 0 {
                out[b | (1 << k)] += a;
            }
        }
    }
    out
}

/// One copy of the spin-`j` irrep inside the qubit space.
#[derive(Clone, Debug)]
pub struct SchurBlock {
    pub label: IrrepLabel,
    /// Which copy of `label`, in construction order.
    pub multiplicity_index: usize,
    /// `2^N × (2j+1)` columns ordered by `m = j, j-1, …, -j`.
    pub vectors: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct SchurBasis {
    pub n: u32,
    /// Sorted by label, then multiplicity index.
    pub blocks: Vec<SchurBlock>,
}

impl SchurBasis {
    pub fn block_counts(&self) -> BTreeMap<IrrepLabel, usize> {
        let mut counts = BTreeMap::new();
        for b in &self.blocks {
            *counts.entry(b.label).or_insert(0) += 1;
        }
        counts
    }

    pub fn blocks_for(&self, label: IrrepLabel) -> impl Iterator<Item = &SchurBlock> {
        self.blocks.iter().filter(move |b| b.label == label)
    }

    /// All block columns side by side: a `2^N × 2^N` orthogonal matrix.
    pub fn assembled(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        let mut col = 0;
        for b in &self.blocks {
            for c in b.vectors.column_iter() {
                m.set_column(col, &c);
                col += 1;
            }
        }
        m
    }

    /// `Tr[U^{⊗N} Π_j]` for the rotation by `angle` about `axis`.
    pub fn sector_trace(&self, label: IrrepLabel, axis: [f64; 3], angle: f64) -> Result<Complex64> {
        let axis = unit_axis(axis)?;
        let mut total = Complex64::new(0.0, 0.0);
        for b in self.blocks_for(label) {
            for c in b.vectors.column_iter() {
                let psi: Vec<Complex64> = c.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                let rotated = rotate_all(self.n, &psi, axis, angle, |_| true);
                total += c
                    .iter()
                    .zip(&rotated)
                    .map(|(&a, &r)| r * a)
                    .sum::<Complex64>();
            }
        }
        Ok(total)
    }
}

/// Splits the `n`-qubit space into spin blocks.
///
/// Highest-weight vectors of spin `j` span the kernel of `J₊` on the weight-`j`
/// subspace; they are found as the null space of `J₋J₊` there, which is
/// orthonormal by construction. Each block is then filled by repeated
/// normalized lowering.
pub fn schur_decompose(n: u32) -> Result<SchurBasis> {
    check_cap(n, MAX_SCHUR_QUBITS, "Schur decomposition")?;
    let dim = 1usize << n;
    let mut blocks = Vec::new();

    for twice_j in (n % 2..=n).step_by(2) {
        let downs = (n - twice_j) / 2;
        let weight_states: Vec<usize> = (0..dim).filter(|b| b.count_ones() == downs).collect();
        let index: BTreeMap<usize, usize> = weight_states
            .iter()
            .enumerate()
            .map(|(i, &b)| (b, i))
            .collect();

        // J₋J₊ restricted to the weight space: raise one down-spin, lower one up-spin.
        let w = weight_states.len();
        let mut gram = DMatrix::<f64>::zeros(w, w);
        for (col, &b) in weight_states.iter().enumerate() {
            for k in 0..n {
                if b & (1 << k) == 0 {
                    continue;
                }
                let raised = b & !(1 << k);
                for l in 0..n {
                    if raised & (1 << l) == 0 {
                        gram[(index[&(raised | (1 << l))], col)] += 1.0;
                    }
                }
            }
        }

        let eigen = SymmetricEigen::new(gram);
        let kernel: Vec<usize> = (0..w)
            .filter(|&i| eigen.eigenvalues[i] < KERNEL_THRESHOLD)
            .collect();
        let expected = su2::tensor_power_multiplicity(n, twice_j)?
            .to_usize()
            .expect("multiplicity fits in usize at this size");
        if kernel.len() != expected {
            return Err(Error::Numerical(format!(
                "found {} highest-weight vectors for 2j = {twice_j}, expected {expected}",
                kernel.len()
            )));
        }

        let j = 0.5 * f64::from(twice_j);
        for (mult_index, &k) in kernel.iter().enumerate() {
            let d = su2::dim(twice_j);
            let mut vectors = DMatrix::zeros(dim, d);
            let mut current = DVector::zeros(dim);
            for (i, &b) in weight_states.iter().enumerate() {
                current[b] = eigen.eigenvectors[(i, k)];
            }
            vectors.set_column(0, &current);
            for level in 1..d {
                let m = j - (level - 1) as f64;
                let norm = (j * (j + 1.0) - m * (m - 1.0)).sqrt();
                current = apply_lowering(n, &current) / norm;
                vectors.set_column(level, &current);
            }
            blocks.push(SchurBlock {
                label: IrrepLabel::spin_twice(twice_j),
                multiplicity_index: mult_index,
                vectors,
            });
        }
    }
    Ok(SchurBasis { n, blocks })
}

fn unit_axis(axis: [f64; 3]) -> Result<[f64; 3]> {
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::Domain(
            "rotation axis must be a nonzero finite vector".into(),
        ));
    }
    Ok([axis[0] / norm, axis[1] / norm, axis[2] / norm])
}

/// `exp(-i angle n·σ/2)` in the basis (up, down).
pub fn qubit_rotation(axis: [f64; 3], angle: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (0.5 * angle).sin_cos();
    let [nx, ny, nz] = axis;
    let i = Complex64::i();
    [
        [
            Complex64::new(c, 0.0) - i * (s * nz),
            -i * (s * nx) - s * ny,
        ],
        [
            -i * (s * nx) + s * ny,
            Complex64::new(c, 0.0) + i * (s * nz),
        ],
    ]
}

/// Applies the single-qubit rotation to every qubit `k` with `selected(k)`.
fn rotate_all<F: Fn(u32) -> bool>(
    n: u32,
    psi: &[Complex64],
    axis: [f64; 3],
    angle: f64,
    selected: F,
) -> Vec<Complex64> {
    let u = qubit_rotation(axis, angle);
    let mut out = psi.to_vec();
    for k in (0..n).filter(|&k| selected(k)) {
        let bit = 1usize << k;
        for b in 0..out.len() {
            if b & bit != 0 {
                continue;
            }
            let (a0, a1) = (out[b], out[b | bit]);
            out[b] = u[0][0] * a0 + u[0][1] * a1;
            out[b | bit] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
    out
}

/// Explicit optimal input state and POVM seed on `N` qubits.
#[derive(Clone, Debug)]
pub struct DenseEstimationModel {
    pub n: u32,
    pub state: DVector<f64>,
    pub seed: DVector<f64>,
}

impl DenseEstimationModel {
    /// `|Ψ⟩ = Σ_j (v_j/√d_j) Σ_k |j; copy k, level k⟩` and
    /// `|η⟩ = Σ_j √d_j Σ_k |j; copy k, level k⟩`, pairing level `k` of the
    /// representation with the `k`-th copy in construction order.
    pub fn new(basis: &SchurBasis, v: &CoefficientVector) -> Result<Self> {
        if v.set().group() != Group::Su2 {
            return Err(Error::GroupMismatch {
                expected: Group::Su2,
                found: v.set().group(),
            });
        }
        let dim = 1usize << basis.n;
        let mut state = DVector::zeros(dim);
        let mut seed = DVector::zeros(dim);
        for (&label, &c) in v.labels().iter().zip(v.values()) {
            let copies: Vec<&SchurBlock> = basis.blocks_for(label).collect();
            let d = su2::dim(label.0);
            if copies.len() < d {
                return Err(Error::Domain(format!(
                    "spin 2j = {} has multiplicity {} < dimension {d} in {} qubits; \
                     no maximally entangled block fits",
                    label.0,
                    copies.len(),
                    basis.n
                )));
            }
            let df = d as f64;
            for (k, block) in copies.iter().take(d).enumerate() {
                state.axpy(c / df.sqrt(), &block.vectors.column(k), 1.0);
                seed.axpy(df.sqrt(), &block.vectors.column(k), 1.0);
            }
        }
        Ok(DenseEstimationModel {
            n: basis.n,
            state,
            seed,
        })
    }

    /// Born-rule probability density `|⟨η|U_g^{⊗N}|Ψ⟩|²`.
    pub fn probability(&self, axis: [f64; 3], angle: f64) -> Result<f64> {
        let axis = unit_axis(axis)?;
        let psi: Vec<Complex64> = self.state.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let rotated = rotate_all(self.n, &psi, axis, angle, |_| true);
        let amp: Complex64 = self.seed.iter().zip(&rotated).map(|(&e, &r)| r * e).sum();
        Ok(amp.norm_sqr())
    }
}

/// Outcome density of the optimal covariant POVM at the rotation
/// `(axis, angle)`, computed on the explicit qubit space.
pub fn dense_povm_probability(
    n: u32,
    v: &CoefficientVector,
    axis: [f64; 3],
    angle: f64,
) -> Result<f64> {
    check_cap(n, MAX_POVM_QUBITS, "dense POVM probability")?;
    let basis = schur_decompose(n)?;
    DenseEstimationModel::new(&basis, v)?.probability(axis, angle)
}

/// `⟨Ψ|(U_g ⊗ 1)^{⊗N}|Ψ⟩` for `|Ψ⟩ = |1⟩⟩^{⊗N}/√2^N` on `2N` qubits.
pub fn dense_maxent_overlap_complex(n: u32, axis: [f64; 3], angle: f64) -> Result<Complex64> {
    check_cap(n, MAX_MAXENT_COPIES, "dense entangled-state overlap")?;
    let axis = unit_axis(axis)?;
    let qubits = 2 * n;
    let dim = 1usize << qubits;
    // Pair k occupies qubits 2k (rotated) and 2k+1; |1⟩⟩ = |00⟩ + |11⟩.
    let amp = 1.0 / 2f64.powi(n as i32).sqrt();
    let psi: Vec<Complex64> = (0..dim)
        .map(|b| {
            let paired = (0..n).all(|k| ((b >> (2 * k)) & 1) == ((b >> (2 * k + 1)) & 1));
            Complex64::new(if paired { amp } else { 0.0 }, 0.0)
        })
        .collect();
    let rotated = rotate_all(qubits, &psi, axis, angle, |q| q % 2 == 0);
    Ok(psi.iter().zip(&rotated).map(|(a, r)| a.conj() * r).sum())
}

pub fn dense_maxent_overlap(n: u32, axis: [f64; 3], angle: f64) -> Result<f64> {
    dense_maxent_overlap_complex(n, axis, angle).map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ClassPoint;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        a * b - b * a
    }

    #[test]
    fn single_spin_casimir() {
        let ops = build_collective_operators(1).unwrap();
        assert_eq!(ops.j_squared, DMatrix::identity(2, 2) * 0.75);
    }

    #[test]
    fn two_spin_casimir_spectrum() {
        let ops = build_collective_operators(2).unwrap();
        let mut ev: Vec<f64> = SymmetricEigen::new(ops.j_squared)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([0.0, 2.0, 2.0, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn su2_algebra_relations() {
        for n in 1..=5 {
            let ops = build_collective_operators(n).unwrap();
            let c = commutator(&ops.j_z, &ops.j_minus) + &ops.j_minus;
            assert!(c.amax() < 1e-12);
            // J² = J₋J₊ + J_z² + J_z.
            let j_plus = ops.j_minus.transpose();
            let rebuilt = &ops.j_minus * &j_plus + &ops.j_z * &ops.j_z + &ops.j_z;
            assert!((rebuilt - &ops.j_squared).amax() < 1e-12);
        }
    }

    #[test]
    fn operator_cap() {
        assert!(build_collective_operators(0).is_err());
        assert!(build_collective_operators(13).is_err());
        assert!(schur_decompose(13).is_err());
    }

    #[test]
    fn schur_block_counts() {
        let b = schur_decompose(2).unwrap();
        assert_eq!(
            b.block_counts(),
            BTreeMap::from([(IrrepLabel(0), 1), (IrrepLabel(2), 1)])
        );
        let b = schur_decompose(4).unwrap();
        assert_eq!(
            b.block_counts(),
            BTreeMap::from([(IrrepLabel(0), 2), (IrrepLabel(2), 3), (IrrepLabel(4), 1)])
        );
        let b = schur_decompose(6).unwrap();
        assert_eq!(
            b.block_counts(),
            BTreeMap::from([
                (IrrepLabel(0), 5),
                (IrrepLabel(2), 9),
                (IrrepLabel(4), 5),
                (IrrepLabel(6), 1)
            ])
        );
    }

    #[test]
    fn schur_basis_is_orthogonal_and_ladder_consistent() {
        for n in 1..=7 {
            let basis = schur_decompose(n).unwrap();
            let u = basis.assembled();
            let gram = u.transpose() * &u;
            assert!(
                (gram - DMatrix::identity(1 << n, 1 << n)).amax() < 1e-10,
                "n = {n}"
            );

            let ops = build_collective_operators(n).unwrap();
            for block in &basis.blocks {
                let j = block.label.spin();
                for level in 0..block.vectors.ncols() {
                    let m = j - level as f64;
                    let col = block.vectors.column(level).into_owned();
                    assert!((&ops.j_z * &col - &col * m).amax() < 1e-10);
                    assert!((&ops.j_squared * &col - &col * (j * (j + 1.0))).amax() < 1e-10);
                    if level + 1 < block.vectors.ncols() {
                        let next = block.vectors.column(level + 1).into_owned();
                        let coeff = (j * (j + 1.0) - m * (m - 1.0)).sqrt();
                        assert!((&ops.j_minus * &col - next * coeff).amax() < 1e-10);
                    } else {
                        assert!((&ops.j_minus * &col).amax() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_matrix_is_unitary_with_right_trace() {
        let u = qubit_rotation([0.0, 0.6, 0.8], 1.3);
        let tr = u[0][0] + u[1][1];
        assert_abs_diff_eq!(tr.re, su2::character(1, 1.3), epsilon = 1e-15);
        assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-15);
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        assert_abs_diff_eq!(det.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn sector_traces_are_multiplicity_times_character() {
        let basis = schur_decompose(5).unwrap();
        for (axis, angle) in [
            ([1.0, 0.0, 0.0], 0.7),
            ([0.3, -0.2, 0.9], 2.9),
            ([0.0, 0.0, 1.0], 5.5),
        ] {
            for (label, count) in basis.block_counts() {
                let t = basis.sector_trace(label, axis, angle).unwrap();
                assert_abs_diff_eq!(
                    t.re,
                    count as f64 * su2::character(label.0, angle),
                    epsilon = 1e-10
                );
                assert_abs_diff_eq!(t.im, 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn povm_probability_at_identity() {
        let set = su2::irrep_set_for_tensor_power(4, false).unwrap();
        let v = CoefficientVector::normalized(set, vec![0.4, 0.9]).unwrap();
        let p = dense_povm_probability(4, &v, [0.0, 0.0, 1.0], 0.0).unwrap();
        let want: f64 = v
            .values()
            .iter()
            .zip(v.set().dims())
            .map(|(c, &d)| c * d as f64)
            .sum();
        assert_abs_diff_eq!(p, want * want, epsilon = 1e-10);
        let closed = crate::estimation::likelihood_density(&v, ClassPoint(0.0));
        assert_abs_diff_eq!(p, closed, epsilon = 1e-10);
    }

    #[test]
    fn povm_probability_is_axis_independent() {
        let set = su2::irrep_set_for_tensor_power(6, false).unwrap();
        let v = CoefficientVector::normalized(set, vec![0.2, 0.7, 0.5]).unwrap();
        let basis = schur_decompose(6).unwrap();
        let model = DenseEstimationModel::new(&basis, &v).unwrap();
        let angle = 1.1;
        let reference = crate::estimation::likelihood_density(&v, ClassPoint(angle));
        for k in 0..20 {
            let t = k as f64;
            let axis = [
                (0.7 * t).sin(),
                (1.3 * t + 0.2).cos(),
                0.4 + (0.5 * t).sin(),
            ];
            let p = model.probability(axis, angle).unwrap();
            assert_abs_diff_eq!(p, reference, epsilon = 1e-8);
        }
    }

    #[test]
    fn povm_rejects_top_sector() {
        let set = su2::irrep_set_for_tensor_power(4, true).unwrap();
        let v = CoefficientVector::normalized(set, vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            dense_povm_probability(4, &v, [0.0, 0.0, 1.0], 1.0),
            Err(Error::Domain(_))
        ));
        assert!(dense_povm_probability(9, &v, [0.0, 0.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn maxent_overlap_examples() {
        assert_abs_diff_eq!(
            dense_maxent_overlap(3, [1.0, 1.0, 0.0], 0.0).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            dense_maxent_overlap(2, [0.0, 0.0, 1.0], PI).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let want = (PI / 6.0).cos().powi(3);
        for axis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.2, -0.5, 0.8]] {
            let z = dense_maxent_overlap_complex(3, axis, PI / 3.0).unwrap();
            assert_abs_diff_eq!(z.re, want, epsilon = 1e-10);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-10);
        }
        assert!(dense_maxent_overlap(5, [0.0, 0.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn maxent_overlap_matches_sector_decomposition() {
        for n in 1..=4 {
            for k in 0..12 {
                let angle = 0.5 * k as f64;
                let dense = dense_maxent_overlap(n, [0.3, 0.4, 0.5], angle).unwrap();
                let (direct, sectors) =
                    crate::protocols::maxent_overlap_identity(n, ClassPoint(angle)).unwrap();
                assert_abs_diff_eq!(dense, direct, epsilon = 1e-10);
                assert_abs_diff_eq!(dense, sectors, epsilon = 1e-10);
            }
        }
    }
}
