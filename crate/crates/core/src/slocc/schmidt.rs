use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, C64};
use crate::measures::DEFAULT_EPS_RANK;
use crate::states::{PureState, SchmidtDecomposition};

pub fn schmidt(psi: &PureState) -> Result<SchmidtDecomposition> {
    schmidt_with(psi, DEFAULT_EPS_RANK)
}

/// Schmidt decomposition keeping the squared coefficients above
/// `eps_rank`.
pub fn schmidt_with(psi: &PureState, eps_rank: f64) -> Result<SchmidtDecomposition> {
    if psi.n_parties() != 2 {
        return Err(Error::BadPartyCount {
            expected: "2".into(),
            found: psi.n_parties(),
        });
    }
    let m = psi.matricize(&[0])?;
    let eig = eig_hermitian(&(&m * &m.adjoint()))?;
    let mut coefficients = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= eps_rank {
            break;
        }
        let u = eig.eigenvector(k);
        // v = Mᵀ ū / √λ
        let s = lam.sqrt();
        let v: Vec<C64> = (0..m.cols())
            .map(|j| (0..m.rows()).map(|i| u[i].conj() * m[(i, j)]).sum::<C64>() / s)
            .collect();
        coefficients.push(lam);
        left.push(u);
        right.push(v);
    }
    let schmidt_number = coefficients.len();
    Ok(SchmidtDecomposition {
        coefficients,
        left,
        right,
        schmidt_number,
    })
}

/// Single-copy conversion of a two-qubit state into an EPR pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EprConversion {
    /// The smaller squared Schmidt coefficient `λ₂`.
    pub e2: f64,
    /// Optimal success probability `min(1, 2λ₂)`, attained by the filter
    /// `diag(√(λ₂/λ₁), 1)` in the Schmidt basis.
    pub probability: f64,
}

pub fn epr_conversion_probability(psi: &PureState) -> Result<EprConversion> {
    if psi.dims() != [2, 2] {
        return Err(Error::BadDims(format!("need a two-qubit state, got dims {:?}", psi.dims())));
    }
    let s = schmidt(psi)?;
    if s.schmidt_number < 2 {
        return Err(Error::NotEntangled);
    }
    let l2 = s.coefficients[1];
    Ok(EprConversion {
        e2: l2,
        probability: (2.0 * l2).min(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use crate::slocc::apply_single;
    use crate::linalg::CMatrix;
    use approx::assert_abs_diff_eq;

    fn two_qubit(amps: [f64; 4]) -> PureState {
        PureState::from_amplitudes(&[2, 2], amps.iter().map(|&x| re(x)).collect()).unwrap()
    }

    #[test]
    fn epr_spectrum() {
        let s = schmidt(&PureState::epr()).unwrap();
        assert_eq!(s.schmidt_number, 2);
        for l in &s.coefficients {
            assert_abs_diff_eq!(*l, 0.5, epsilon = 1e-15);
        }
        let rec = s.reconstruct();
        for (a, b) in rec.iter().zip(PureState::epr().amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn product_and_partial() {
        let s = schmidt(&two_qubit([1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(s.coefficients, vec![1.0]);
        let d: f64 = 0.3;
        let s = schmidt(&two_qubit([d.cos(), 0.0, 0.0, d.sin()])).unwrap();
        assert_abs_diff_eq!(s.coefficients[0], d.cos().powi(2), epsilon = 1e-14);
        assert_abs_diff_eq!(s.coefficients[1], d.sin().powi(2), epsilon = 1e-14);
    }

    #[test]
    fn rejects_three_parties() {
        assert!(matches!(
            schmidt(&PureState::w()),
            Err(Error::BadPartyCount { found: 3, .. })
        ));
    }

    #[test]
    fn reconstruction_of_random_qubit_qutrit() {
        let psi = crate::states::random_pure(&[2, 3], 5).unwrap();
        let s = schmidt(&psi).unwrap();
        assert!(s.schmidt_number <= 2);
        assert!(s.coefficients.windows(2).all(|w| w[0] >= w[1]));
        for (a, b) in s.reconstruct().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn epr_conversion() {
        let r = epr_conversion_probability(&PureState::epr()).unwrap();
        assert_abs_diff_eq!(r.probability, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.e2, 0.5, epsilon = 1e-15);

        let psi = two_qubit([0.9f64.sqrt(), 0.0, 0.0, 0.1f64.sqrt()]);
        let r = epr_conversion_probability(&psi).unwrap();
        assert_abs_diff_eq!(r.e2, 0.1, epsilon = 1e-14);
        assert_abs_diff_eq!(r.probability, 0.2, epsilon = 1e-14);
        // the local filter achieves that weight
        let filter = CMatrix::from_real_diag(&[(0.1f64 / 0.9).sqrt(), 1.0]);
        let (out, w) = apply_single(&psi, 0, &filter).unwrap();
        assert_abs_diff_eq!(w, 0.2, epsilon = 1e-14);
        assert!(out.fidelity(&two_qubit([1.0, 0.0, 0.0, 1.0])) > 1.0 - 1e-14);

        assert!(matches!(
            epr_conversion_probability(&two_qubit([1.0, 0.0, 0.0, 0.0])),
            Err(Error::NotEntangled)
        ));
    }
}
