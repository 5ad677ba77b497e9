use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::measures::three_tangle;
use crate::rng::haar_unitary;
use crate::states::{apply_party_operator, PureState, ZERO_NORM};

/// Largest allowed `‖A₁†A₁ + A₂†A₂ − 1‖`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Two-outcome POVM `A₁ = U₁ diag(a, b) V`, `A₂ = U₂ diag(√(1−a²), √(1−b²)) V`
/// on a single qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoOutcomePovm {
    pub a: f64,
    pub b: f64,
    pub v: CMatrix,
    pub u1: CMatrix,
    pub u2: CMatrix,
}

impl TwoOutcomePovm {
    pub fn new(a: f64, b: f64, v: CMatrix, u1: CMatrix, u2: CMatrix) -> Result<Self> {
        for (name, x) in [("a", a), ("b", b)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::BadRange(format!("{name} = {x} not in [0, 1]")));
            }
        }
        let p = Self { a, b, v, u1, u2 };
        p.validate()?;
        Ok(p)
    }

    /// Diagonal POVM with trivial unitaries.
    pub fn diagonal(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, CMatrix::identity(2), CMatrix::identity(2), CMatrix::identity(2))
    }

    /// `a, b` uniform on `(0.05, 0.95)`, Haar-random unitaries.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let a = 0.05 + 0.9 * rng.random::<f64>();
        let b = 0.05 + 0.9 * rng.random::<f64>();
        let v = haar_unitary(2, rng);
        let u1 = haar_unitary(2, rng);
        let u2 = haar_unitary(2, rng);
        Self { a, b, v, u1, u2 }
    }

    pub fn a1(&self) -> CMatrix {
        &(&self.u1 * &CMatrix::from_real_diag(&[self.a, self.b])) * &self.v
    }

    pub fn a2(&self) -> CMatrix {
        let d = CMatrix::from_real_diag(&[(1.0 - self.a * self.a).sqrt(), (1.0 - self.b * self.b).sqrt()]);
        &(&self.u2 * &d) * &self.v
    }

    pub fn completeness_residual(&self) -> f64 {
        let (a1, a2) = (self.a1(), self.a2());
        let sum = &(&a1.adjoint() * &a1) + &(&a2.adjoint() * &a2);
        (&sum - &CMatrix::identity(2)).frobenius_norm()
    }

    pub fn validate(&self) -> Result<()> {
        for m in [&self.v, &self.u1, &self.u2] {
            if (m.rows(), m.cols()) != (2, 2) {
                return Err(Error::BadDimension { expected: 2, found: m.rows() });
            }
        }
        let residual = self.completeness_residual();
        if residual.is_nan() || residual > COMPLETENESS_TOL {
            return Err(Error::IncompletePovm { residual });
        }
        Ok(())
    }
}

/// The two post-measurement branches. A branch with vanishing probability
/// has no state.
#[derive(Debug, Clone)]
pub struct PovmOutcome {
    pub branches: [Option<PureState>; 2],
    pub probabilities: [f64; 2],
}

pub fn apply_povm(psi: &PureState, povm: &TwoOutcomePovm, party: usize) -> Result<PovmOutcome> {
    povm.validate()?;
    if psi.dims().get(party) != Some(&2) {
        return Err(Error::BadSubset(format!("party {party} is not a qubit")));
    }
    let mut branches = [None, None];
    let mut probabilities = [0.0; 2];
    for (i, op) in [povm.a1(), povm.a2()].iter().enumerate() {
        let img = apply_party_operator(psi.dims(), psi.amplitudes(), party, op);
        let norm2: f64 = img.iter().map(|z| z.norm_sqr()).sum();
        probabilities[i] = norm2;
        if norm2.sqrt() >= ZERO_NORM {
            branches[i] = Some(PureState::from_amplitudes(psi.dims(), img)?);
        }
    }
    Ok(PovmOutcome {
        branches,
        probabilities,
    })
}

/// Tangles at or below this value are treated as exactly zero by
/// [`tau_pow`]. The 3-tangle carries absolute rounding noise near 1e-16,
/// which `τ^η` would otherwise blow up to about 1e-4 for `η = 1/4`.
pub const TAU_ZERO: f64 = 1e-12;

/// `τ^η`, extended by `0^η = 0`.
pub fn tau_pow(tau: f64, eta: f64) -> f64 {
    if tau <= TAU_ZERO {
        0.0
    } else {
        tau.powf(eta)
    }
}

/// One local measurement and the averaged `τ^η` it produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangleTrial {
    /// `p₁ τ^η(φ₁) + p₂ τ^η(φ₂)`
    pub avg: f64,
    /// `τ^η(ψ)`
    pub base: f64,
    pub tau: f64,
    pub branch_taus: [f64; 2],
    pub probabilities: [f64; 2],
}

pub fn tangle_monotonicity_trial(
    psi: &PureState,
    povm: &TwoOutcomePovm,
    party: usize,
    eta: f64,
) -> Result<TangleTrial> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::OutOfRange { value: eta, lo: 0.0, hi: 1.0 });
    }
    let tau = three_tangle(psi)?;
    let out = apply_povm(psi, povm, party)?;
    let mut branch_taus = [0.0; 2];
    for (t, b) in branch_taus.iter_mut().zip(&out.branches) {
        if let Some(s) = b {
            *t = three_tangle(s)?;
        }
    }
    let avg = out.probabilities[0] * tau_pow(branch_taus[0], eta)
        + out.probabilities[1] * tau_pow(branch_taus[1], eta);
    Ok(TangleTrial {
        avg,
        base: tau_pow(tau, eta),
        tau,
        branch_taus,
        probabilities: out.probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::states::random_pure_with;
    use approx::assert_abs_diff_eq;

    #[test]
    fn random_povms_are_complete() {
        let mut rng = rng_from_seed(31);
        for _ in 0..200 {
            let p = TwoOutcomePovm::random(&mut rng);
            assert!(p.completeness_residual() <= COMPLETENESS_TOL);
            assert!(p.a > 0.05 && p.a < 0.95 && p.b > 0.05 && p.b < 0.95);
        }
    }

    #[test]
    fn incomplete_povm_is_rejected() {
        let mut p = TwoOutcomePovm::diagonal(0.5, 0.5).unwrap();
        p.u1 = CMatrix::from_real_diag(&[1.0, 2.0]);
        assert!(matches!(
            apply_povm(&PureState::w(), &p, 0),
            Err(Error::IncompletePovm { .. })
        ));
    }

    #[test]
    fn unitary_branch_is_deterministic() {
        let mut rng = rng_from_seed(32);
        let psi = random_pure_with(&[2, 2, 2], &mut rng).unwrap();
        let u = haar_unitary(2, &mut rng);
        let p = TwoOutcomePovm::new(1.0, 1.0, u, CMatrix::identity(2), CMatrix::identity(2)).unwrap();
        let out = apply_povm(&psi, &p, 1).unwrap();
        assert_abs_diff_eq!(out.probabilities[0], 1.0, epsilon = 1e-14);
        assert!(out.branches[1].is_none());
        let b = out.branches[0].as_ref().unwrap();
        assert_abs_diff_eq!(three_tangle(b).unwrap(), three_tangle(&psi).unwrap(), epsilon = 1e-13);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = rng_from_seed(33);
        for i in 0..100 {
            let psi = random_pure_with(&[2, 2, 2], &mut rng).unwrap();
            let p = TwoOutcomePovm::random(&mut rng);
            let out = apply_povm(&psi, &p, i % 3).unwrap();
            assert_abs_diff_eq!(out.probabilities.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn equal_singular_values_keep_the_tangle() {
        let mut rng = rng_from_seed(34);
        let psi = random_pure_with(&[2, 2, 2], &mut rng).unwrap();
        let mut p = TwoOutcomePovm::random(&mut rng);
        p.b = p.a;
        let t = tangle_monotonicity_trial(&psi, &p, 0, 0.5).unwrap();
        assert_abs_diff_eq!(t.branch_taus[0], t.tau, epsilon = 1e-12);
        assert_abs_diff_eq!(t.avg, t.base, epsilon = 1e-10);
    }

    #[test]
    fn square_root_average_closed_form() {
        let mut rng = rng_from_seed(35);
        for i in 0..100 {
            let psi = random_pure_with(&[2, 2, 2], &mut rng).unwrap();
            let p = TwoOutcomePovm::random(&mut rng);
            let t = tangle_monotonicity_trial(&psi, &p, i % 3, 0.5).unwrap();
            let factor = p.a * p.b + ((1.0 - p.a * p.a) * (1.0 - p.b * p.b)).sqrt();
            assert_abs_diff_eq!(t.avg, factor * t.base, epsilon = 1e-9);
            // τ(φ₁) p₁² = a² b² τ(ψ)
            let lhs = t.branch_taus[0] * t.probabilities[0].powi(2);
            assert_abs_diff_eq!(lhs, (p.a * p.b).powi(2) * t.tau, epsilon = 1e-10);
        }
    }

    #[test]
    fn w_class_stays_tangle_free() {
        let mut rng = rng_from_seed(36);
        for i in 0..50 {
            let p = TwoOutcomePovm::random(&mut rng);
            let t = tangle_monotonicity_trial(&PureState::w(), &p, i % 3, 0.25).unwrap();
            assert!(t.branch_taus.iter().all(|&x| x.abs() < 1e-9));
            assert_eq!(t.avg, 0.0);
            assert_eq!(t.base, 0.0);
        }
    }

    #[test]
    fn eta_is_checked() {
        let p = TwoOutcomePovm::diagonal(0.5, 0.5).unwrap();
        assert!(tangle_monotonicity_trial(&PureState::ghz(), &p, 0, 0.0).is_err());
        assert!(tangle_monotonicity_trial(&PureState::ghz(), &p, 0, 1.5).is_err());
    }
}
