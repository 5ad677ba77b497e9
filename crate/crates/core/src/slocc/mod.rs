//! Local operators acting on multipartite states.
//!
//! Two states are SLOCC-equivalent exactly when an invertible local
//! operator `A ⊗ B ⊗ C` maps one onto the other. This module applies such
//! operators, builds the explicit ones that carry `|GHZ⟩` and `|W⟩` onto
//! every member of their classes, and checks that local ranks never grow
//! under local operations. Schmidt machinery, two-outcome POVMs and the
//! Monte-Carlo verifiers live in the submodules.

mod povm;
mod schmidt;
pub mod trials;

pub use povm::{
    apply_povm, tangle_monotonicity_trial, tau_pow, PovmOutcome, TangleTrial, TwoOutcomePovm, TAU_ZERO,
};
pub use schmidt::{epr_conversion_probability, schmidt, schmidt_with, EprConversion};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{re, CMatrix, C64};
use crate::measures::{local_rank, reduce};
use crate::states::{apply_party_operator, GhzCanonicalParams, PureState, WCanonicalParams};

/// `|det|` threshold, after scaling each operator to unit max entry.
pub const INVERTIBLE_TOL: f64 = 1e-10;

/// One operator per party.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperators {
    ops: Vec<CMatrix>,
    invertible: Vec<bool>,
}

impl LocalOperators {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::BadPartyCount {
                expected: "at least 1".into(),
                found: 0,
            });
        }
        for op in &ops {
            if !op.is_square() {
                return Err(Error::DimensionMismatch(format!(
                    "local operator is {}x{}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        let invertible = ops.iter().map(is_invertible).collect();
        Ok(Self { ops, invertible })
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self::new(dims.iter().map(|&d| CMatrix::identity(d)).collect()).expect("square")
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn invertible(&self) -> &[bool] {
        &self.invertible
    }

    pub fn is_invertible(&self) -> bool {
        self.invertible.iter().all(|&b| b)
    }

    fn check_dims(&self, dims: &[usize]) -> Result<()> {
        let ours: Vec<usize> = self.ops.iter().map(CMatrix::rows).collect();
        if ours != dims {
            return Err(Error::DimensionMismatch(format!(
                "operators act on {ours:?}, state has dims {dims:?}"
            )));
        }
        Ok(())
    }
}

/// Invertibility test on the operator rescaled to unit largest entry.
pub fn is_invertible(op: &CMatrix) -> bool {
    let m = op.max_abs();
    if m == 0.0 {
        return false;
    }
    op.scale(re(1.0 / m)).det().norm() > INVERTIBLE_TOL
}

/// `A ⊗ B ⊗ C |ψ⟩`, normalized, together with the squared norm of the
/// unnormalized image.
pub fn apply_local(psi: &PureState, ops: &LocalOperators) -> Result<(PureState, f64)> {
    ops.check_dims(psi.dims())?;
    let mut amps = psi.amplitudes().to_vec();
    for (k, op) in ops.ops.iter().enumerate() {
        amps = apply_party_operator(psi.dims(), &amps, k, op);
    }
    PureState::from_image(psi.dims(), amps)
}

/// Applies `op` to a single party and leaves the others alone.
pub fn apply_single(psi: &PureState, party: usize, op: &CMatrix) -> Result<(PureState, f64)> {
    if party >= psi.n_parties() {
        return Err(Error::BadSubset(format!("party {party} of {}", psi.n_parties())));
    }
    let mut ops: Vec<CMatrix> = psi.dims().iter().map(|&d| CMatrix::identity(d)).collect();
    ops[party] = op.clone();
    apply_local(psi, &LocalOperators::new(ops)?)
}

/// The invertible operator that maps `|GHZ⟩` to the canonical state with
/// parameters `p`:
/// `√(2K) [[c_δ, s_δ c_α e^{iφ}], [0, s_δ s_α e^{iφ}]] ⊗ [[1, c_β], [0, s_β]] ⊗ [[1, c_γ], [0, s_γ]]`.
pub fn ilo_for_ghz_class(p: &GhzCanonicalParams) -> Result<LocalOperators> {
    p.validate()?;
    let s = (2.0 * p.k).sqrt();
    let ph = |r: f64| C64::from_polar(r, p.phi);
    let a = CMatrix::from_rows(&[
        vec![re(s * p.delta.cos()), ph(s * p.delta.sin() * p.alpha.cos())],
        vec![re(0.0), ph(s * p.delta.sin() * p.alpha.sin())],
    ]);
    let tri = |t: f64| CMatrix::from_real_rows(&[&[1.0, t.cos()], &[0.0, t.sin()]]);
    LocalOperators::new(vec![a, tri(p.beta), tri(p.gamma)])
}

/// The operator mapping `|W⟩` to the canonical W-class state with
/// parameters `q`: `[[√a, √d], [0, √c]] ⊗ diag(√3, √(3b/a)) ⊗ 1`.
pub fn ilo_for_w_class(q: &WCanonicalParams) -> Result<LocalOperators> {
    q.validate()?;
    if !(q.a > 0.0 && q.b > 0.0 && q.c > 0.0) {
        return Err(Error::BadRange(format!(
            "a, b, c must be positive (got {}, {}, {})",
            q.a, q.b, q.c
        )));
    }
    let a = CMatrix::from_real_rows(&[&[q.a.sqrt(), q.d.sqrt()], &[0.0, q.c.sqrt()]]);
    let b = CMatrix::from_real_diag(&[3f64.sqrt(), (3.0 * q.b / q.a).sqrt()]);
    LocalOperators::new(vec![a, b, CMatrix::identity(2)])
}

/// Local ranks before and after a single-party operator.
#[derive(Debug, Clone, Serialize)]
pub struct RankCheck {
    pub before: Vec<usize>,
    pub after: Vec<usize>,
    pub invertible: bool,
    /// Ranks never grew, and stayed equal when the operator is invertible.
    pub holds: bool,
    pub weight: f64,
    #[serde(skip)]
    pub image: PureState,
}

pub fn local_ranks(psi: &PureState, eps_rank: f64) -> Result<Vec<usize>> {
    (0..psi.n_parties())
        .map(|k| local_rank(&reduce(psi, &[k])?, eps_rank))
        .collect()
}

pub fn verify_rank_monotonicity(
    psi: &PureState,
    party: usize,
    op: &CMatrix,
    eps_rank: f64,
) -> Result<RankCheck> {
    let before = local_ranks(psi, eps_rank)?;
    let (image, weight) = apply_single(psi, party, op)?;
    let after = local_ranks(&image, eps_rank)?;
    let invertible = is_invertible(op);
    let holds = before.iter().zip(&after).all(|(b, a)| a <= b) && (!invertible || before == after);
    Ok(RankCheck {
        before,
        after,
        invertible,
        holds,
        weight,
        image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, ClassLabel, Tolerances};
    use crate::rng::{haar_unitary, random_invertible, rng_from_seed};
    use crate::states::{state_from_ghz_params, state_from_w_params};
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_is_harmless() {
        let (s, w) = apply_local(&PureState::w(), &LocalOperators::identity(&[2, 2, 2])).unwrap();
        assert_abs_diff_eq!(w, 1.0, epsilon = 1e-15);
        assert!(s.approx_eq_up_to_phase(&PureState::w(), 1e-15));
    }

    #[test]
    fn dimension_and_annihilation_errors() {
        let ops = LocalOperators::identity(&[2, 2]);
        assert!(matches!(apply_local(&PureState::w(), &ops), Err(Error::DimensionMismatch(_))));
        let p1 = CMatrix::from_real_diag(&[0.0, 1.0]);
        let zero = PureState::basis(&[2, 2, 2], &[0, 0, 0]).unwrap();
        assert!(matches!(apply_single(&zero, 0, &p1), Err(Error::Annihilated { .. })));
    }

    #[test]
    fn ghz_ilo_of_ghz_is_identity() {
        let t = ilo_for_ghz_class(&GhzCanonicalParams::ghz()).unwrap();
        for op in t.ops() {
            assert!(op.approx_eq(&CMatrix::identity(2), 1e-15));
        }
    }

    #[test]
    fn ghz_ilo_reproduces_canonical_states() {
        let mut rng = rng_from_seed(21);
        for _ in 0..100 {
            let p = GhzCanonicalParams::random(&mut rng);
            let t = ilo_for_ghz_class(&p).unwrap();
            assert!(t.is_invertible());
            let (s, w) = apply_local(&PureState::ghz(), &t).unwrap();
            assert_abs_diff_eq!(w, 1.0, epsilon = 1e-12);
            assert!(s.distance_up_to_phase(&state_from_ghz_params(&p).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn w_ilo_reproduces_canonical_states() {
        let t = ilo_for_w_class(&WCanonicalParams::w()).unwrap();
        let third = (1.0f64 / 3.0).sqrt();
        assert!(t.ops()[0].approx_eq(&CMatrix::from_real_diag(&[third, third]), 1e-15));
        let (s, _) = apply_local(&PureState::w(), &t).unwrap();
        assert!(s.approx_eq_up_to_phase(&PureState::w(), 1e-15));

        let mut rng = rng_from_seed(22);
        for _ in 0..100 {
            let q = WCanonicalParams::random(&mut rng);
            let t = ilo_for_w_class(&q).unwrap();
            assert!(t.is_invertible());
            let (s, _) = apply_local(&PureState::w(), &t).unwrap();
            assert!(s.distance_up_to_phase(&state_from_w_params(&q).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn w_ilo_rejects_vanishing_weights() {
        assert!(WCanonicalParams::new(0.5, 0.5, 0.0).is_err());
        let q = WCanonicalParams { a: 0.5, b: 0.5, c: 0.0, d: 0.0 };
        assert!(matches!(ilo_for_w_class(&q), Err(Error::BadRange(_))));
    }

    #[test]
    fn projector_on_ghz_gives_product() {
        let p0 = CMatrix::from_real_diag(&[1.0, 0.0]);
        let r = verify_rank_monotonicity(&PureState::ghz(), 0, &p0, 1e-9).unwrap();
        assert_eq!(r.after, vec![1, 1, 1]);
        assert!(r.holds && !r.invertible);
        assert_abs_diff_eq!(r.weight, 0.5, epsilon = 1e-15);
        let expect = PureState::basis(&[2, 2, 2], &[0, 0, 0]).unwrap();
        assert!(r.image.approx_eq_up_to_phase(&expect, 1e-15));
    }

    #[test]
    fn plus_projector_maps_w_and_ghz_to_a_bc() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CMatrix::outer(&[re(h), re(h)], &[re(h), re(h)]);
        for psi in [PureState::w(), PureState::ghz()] {
            let (img, _) = apply_single(&psi, 0, &plus).unwrap();
            let class = classify(&img, &Tolerances::default()).unwrap();
            assert_eq!(class.label, ClassLabel::SeparableA);
        }
    }

    #[test]
    fn invertible_ops_keep_ranks() {
        let mut rng = rng_from_seed(23);
        for i in 0..100 {
            let psi = crate::states::random_pure_with(&[2, 2, 2], &mut rng).unwrap();
            let op = if i % 2 == 0 {
                random_invertible(2, 50.0, &mut rng)
            } else {
                haar_unitary(2, &mut rng)
            };
            let r = verify_rank_monotonicity(&psi, i % 3, &op, 1e-9).unwrap();
            assert!(r.invertible && r.holds);
            assert_eq!(r.before, r.after);
        }
    }

    #[test]
    fn invertibility_flags() {
        assert!(is_invertible(&CMatrix::identity(2)));
        assert!(!is_invertible(&CMatrix::from_real_diag(&[1.0, 0.0])));
        assert!(!is_invertible(&CMatrix::zeros(2, 2)));
        // scale does not matter
        assert!(is_invertible(&CMatrix::identity(2).scale(re(1e-8))));
    }
}
