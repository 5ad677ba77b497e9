//! Reduced states and entanglement measures: local entropies and ranks,
//! pairwise and cut concurrences, the 3-tangle, `E_f` and `E_2`.
//!
//! Concurrence is computed from a factor `X` of the two-qubit state,
//! `ρ = X X†`. The square roots of the eigenvalues of `ρρ̃` are then the
//! singular values of the complex-symmetric matrix `Xᵀ (σ_y⊗σ_y) X`; for a
//! pure three-qubit state `X` is just the amplitude tensor reshaped, so no
//! eigen-decomposition (and no square root of a rank-deficient matrix) is
//! needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, re, singular_values, CMatrix, HermitianEig, C64};
use crate::states::PureState;

/// Default relative eigenvalue cutoff for local ranks.
pub const DEFAULT_EPS_RANK: f64 = 1e-9;
/// Tolerance on the density-matrix invariants.
pub const DENSITY_TOL: f64 = 1e-10;
/// Negative 3-tangle round-off above `-TAU_CLAMP` is reported as zero.
pub const TAU_CLAMP: f64 = 1e-9;
/// Eigenvalues of `ρ` below this fraction of the largest are dropped when
/// building the factor for the concurrence.
const FACTOR_CUTOFF: f64 = 1e-14;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidDensity(format!("{}x{} is not square", m.rows(), m.cols())));
        }
        let defect = m.hermitian_defect();
        if defect > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = m.trace();
        if (tr - re(1.0)).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} ≠ 1")));
        }
        let eig = eig_hermitian(&m)?;
        if let Some(&min) = eig.eigenvalues.last() {
            if min < -DENSITY_TOL {
                return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(Self(m))
    }

    /// `|ψ⟩⟨ψ|` of a normalized vector.
    pub fn pure(v: &[C64]) -> Self {
        Self(CMatrix::outer(v, v))
    }

    /// `X X†`; the caller guarantees unit trace.
    pub(crate) fn from_factor(x: &CMatrix) -> Self {
        Self(x * &x.adjoint())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn eig(&self) -> Result<HermitianEig> {
        eig_hermitian(&self.0)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eig()?.eigenvalues)
    }

    /// Closed-form determinant of a qubit state.
    pub fn det2(&self) -> Option<f64> {
        (self.dim() == 2).then(|| {
            let m = &self.0;
            m[(0, 0)].re * m[(1, 1)].re - m[(0, 1)].norm_sqr()
        })
    }
}

/// Partial trace onto the parties in `keep` (ordered as given).
pub fn reduce(psi: &PureState, keep: &[usize]) -> Result<DensityMatrix> {
    let m = psi.matricize(keep)?;
    Ok(DensityMatrix::from_factor(&m))
}

/// von Neumann entropy in bits.
pub fn local_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_bits(&rho.eigenvalues()?))
}

pub fn entropy_bits(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Number of eigenvalues above `eps_rank` times the largest one.
pub fn local_rank(rho: &DensityMatrix, eps_rank: f64) -> Result<usize> {
    Ok(rank_of_spectrum(&rho.eigenvalues()?, eps_rank))
}

pub fn rank_of_spectrum(spectrum: &[f64], eps_rank: f64) -> usize {
    let max = spectrum.iter().copied().fold(0.0, f64::max);
    spectrum.iter().filter(|&&l| l > eps_rank * max).count()
}

/// `h(x) = −x log₂ x − (1−x) log₂(1−x)`
pub fn binary_entropy(x: f64) -> f64 {
    entropy_bits(&[x, 1.0 - x])
}

/// `σ_y ⊗ σ_y`, real in the computational basis.
fn spin_flip() -> CMatrix {
    CMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, -1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[-1.0, 0.0, 0.0, 0.0],
    ])
}

/// Descending square roots of the spectrum of `ρρ̃` for `ρ = X X†`.
pub fn spin_flip_spectrum_from_factor(x: &CMatrix) -> Result<Vec<f64>> {
    if x.rows() != 4 {
        return Err(Error::BadDimension {
            expected: 4,
            found: x.rows(),
        });
    }
    let t = &(&x.transpose() * &spin_flip()) * x;
    singular_values(&t)
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)` from a factor of `ρ`.
pub fn concurrence_from_factor(x: &CMatrix) -> Result<f64> {
    let lam = spin_flip_spectrum_from_factor(x)?;
    let c = lam[0] - lam[1..].iter().sum::<f64>();
    Ok(c.clamp(0.0, 1.0))
}

/// Concurrence of an arbitrary two-qubit density matrix.
pub fn concurrence_mixed(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::BadDimension {
            expected: 4,
            found: rho.dim(),
        });
    }
    let x = rank_revealing_factor(rho)?;
    concurrence_from_factor(&x)
}

/// `X = V √Λ` restricted to the numerically nonzero eigenvalues.
fn rank_revealing_factor(rho: &DensityMatrix) -> Result<CMatrix> {
    let eig = rho.eig()?;
    let max = eig.eigenvalues[0].max(0.0);
    if eig.eigenvalues.last().copied().unwrap_or(0.0) < -DENSITY_TOL {
        return Err(Error::NotPsd {
            eigenvalue: *eig.eigenvalues.last().unwrap(),
        });
    }
    let kept: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k] > FACTOR_CUTOFF * max)
        .collect();
    if kept.is_empty() {
        return Ok(CMatrix::zeros(rho.dim(), 1));
    }
    let cols: Vec<Vec<C64>> = kept
        .iter()
        .map(|&k| {
            let s = eig.eigenvalues[k].sqrt();
            eig.eigenvector(k).into_iter().map(|z| z * s).collect()
        })
        .collect();
    Ok(CMatrix::from_columns(&cols))
}

/// Concurrence of the two-qubit reduction of `psi` onto parties `p`, `q`.
pub fn pair_concurrence(psi: &PureState, p: usize, q: usize) -> Result<f64> {
    if psi.dims().get(p) != Some(&2) || psi.dims().get(q) != Some(&2) {
        return Err(Error::BadSubset(format!("parties {p}, {q} must be qubits")));
    }
    let x = psi.matricize(&[p, q])?;
    if x.cols() <= 4 {
        concurrence_from_factor(&x)
    } else {
        concurrence_mixed(&DensityMatrix::from_factor(&x))
    }
}

/// `det ρ_κ` for a qubit party via Cauchy–Binet on the amplitude matrix,
/// a sum of non-negative terms with no cancellation near rank one.
pub fn qubit_reduced_det(psi: &PureState, party: usize) -> Result<f64> {
    if psi.dims().get(party) != Some(&2) {
        return Err(Error::BadSubset(format!("party {party} is not a qubit")));
    }
    let m = psi.matricize(&[party])?;
    let cols = m.cols();
    let mut det = 0.0;
    for j in 0..cols {
        for k in j + 1..cols {
            det += (m[(0, j)] * m[(1, k)] - m[(0, k)] * m[(1, j)]).norm_sqr();
        }
    }
    Ok(det)
}

/// Spectrum `(λ₁, λ₂)` of a qubit reduced state from its determinant.
pub fn qubit_spectrum(det: f64) -> [f64; 2] {
    let disc = (1.0 - 4.0 * det).max(0.0).sqrt();
    let l1 = 0.5 * (1.0 + disc);
    [l1, det.max(0.0) / l1]
}

/// `C_{κ(μν)} = 2 √(det ρ_κ)`
pub fn cut_concurrence(psi: &PureState, kappa: usize) -> Result<f64> {
    psi.require_three_qubits()?;
    check_party(kappa)?;
    Ok((2.0 * qubit_reduced_det(psi, kappa)?.sqrt()).clamp(0.0, 1.0))
}

fn check_party(p: usize) -> Result<()> {
    if p < 3 {
        Ok(())
    } else {
        Err(Error::BadSubset(format!("party {p} of a three-party state")))
    }
}

fn others(kappa: usize) -> (usize, usize) {
    match kappa {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// `τ = C²_{A(BC)} − C²_{AB} − C²_{AC}`
pub fn three_tangle(psi: &PureState) -> Result<f64> {
    three_tangle_focused(psi, 0)
}

/// The 3-tangle computed with party `kappa` as the focus.
pub fn three_tangle_focused(psi: &PureState, kappa: usize) -> Result<f64> {
    psi.require_three_qubits()?;
    check_party(kappa)?;
    let (mu, nu) = others(kappa);
    let cut2 = 4.0 * qubit_reduced_det(psi, kappa)?;
    let c1 = pair_concurrence(psi, kappa, mu)?;
    let c2 = pair_concurrence(psi, kappa, nu)?;
    Ok(clamp_tau(cut2 - c1 * c1 - c2 * c2))
}

fn clamp_tau(t: f64) -> f64 {
    if (-TAU_CLAMP..0.0).contains(&t) {
        0.0
    } else {
        t.min(1.0)
    }
}

fn check_unit(c: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(Error::OutOfRange {
            value: c,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(c.clamp(0.0, 1.0))
}

/// Entanglement of formation `h(½ + ½√(1−C²))` in bits.
pub fn ent_formation(c: f64) -> Result<f64> {
    let c = check_unit(c)?;
    Ok(binary_entropy(0.5 + 0.5 * (1.0 - c * c).sqrt()))
}

/// `E_2 = ½ − ½√(1−C²)`
pub fn e2_monotone(c: f64) -> Result<f64> {
    let c = check_unit(c)?;
    // (C²/4) / (½ + ½√(1−C²)) avoids cancellation for small C
    Ok(0.25 * c * c / (0.5 + 0.5 * (1.0 - c * c).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub s_a: f64,
    pub s_b: f64,
    pub s_c: f64,
    pub rank_a: usize,
    pub rank_b: usize,
    pub rank_c: usize,
    pub c_ab: f64,
    pub c_ac: f64,
    pub c_bc: f64,
    pub c_a_bc: f64,
    pub c_b_ac: f64,
    pub c_c_ab: f64,
    pub tau: f64,
    pub e_tau: f64,
}

impl MeasureReport {
    /// Fields that are invariant under local unitaries, in a fixed order.
    pub fn invariants(&self) -> [f64; 14] {
        [
            self.s_a,
            self.s_b,
            self.s_c,
            self.rank_a as f64,
            self.rank_b as f64,
            self.rank_c as f64,
            self.c_ab,
            self.c_ac,
            self.c_bc,
            self.c_a_bc,
            self.c_b_ac,
            self.c_c_ab,
            self.tau,
            self.e_tau,
        ]
    }

    /// Largest absolute difference between the invariant fields.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.invariants()
            .iter()
            .zip(other.invariants())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn ranks(&self) -> [usize; 3] {
        [self.rank_a, self.rank_b, self.rank_c]
    }
}

pub fn measure_report(psi: &PureState) -> Result<MeasureReport> {
    measure_report_with(psi, DEFAULT_EPS_RANK)
}

pub fn measure_report_with(psi: &PureState, eps_rank: f64) -> Result<MeasureReport> {
    psi.require_three_qubits()?;
    let dets = [
        qubit_reduced_det(psi, 0)?,
        qubit_reduced_det(psi, 1)?,
        qubit_reduced_det(psi, 2)?,
    ];
    let spectra = dets.map(qubit_spectrum);
    let entropies = spectra.map(|s| entropy_bits(&s));
    let ranks = spectra.map(|s| rank_of_spectrum(&s, eps_rank));
    let c_ab = pair_concurrence(psi, 0, 1)?;
    let c_ac = pair_concurrence(psi, 0, 2)?;
    let c_bc = pair_concurrence(psi, 1, 2)?;
    let cut = dets.map(|d| (2.0 * d.sqrt()).clamp(0.0, 1.0));
    let tau = clamp_tau(4.0 * dets[0] - c_ab * c_ab - c_ac * c_ac);
    Ok(MeasureReport {
        s_a: entropies[0],
        s_b: entropies[1],
        s_c: entropies[2],
        rank_a: ranks[0],
        rank_b: ranks[1],
        rank_c: ranks[2],
        c_ab,
        c_ac,
        c_bc,
        c_a_bc: cut[0],
        c_b_ac: cut[1],
        c_c_ab: cut[2],
        tau,
        e_tau: c_ab * c_ab + c_ac * c_ac + c_bc * c_bc,
    })
}
