//! SLOCC classification of three-qubit pure states.
//!
//! [`classify`] is the practical two-step test: vanishing determinants of
//! the single-qubit reductions pick out the product and biseparable
//! classes, and among states with all local ranks equal to two the
//! 3-tangle separates GHZ from W. [`product_vectors_in_range`] is the
//! structural test: the range of `ρ_BC` contains two product vectors for
//! GHZ-class states and a single one for W-class states. The canonical
//! forms are extracted from that structure.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, inner, normalized, unitary_to_zero, vec_norm, CMatrix, C64,
};
use crate::measures::{qubit_reduced_det, reduce, three_tangle};
use crate::states::{
    apply_party_operator, state_from_ghz_params, state_from_w_params, GhzCanonicalParams, PureState,
    WCanonicalParams,
};

/// Numerical thresholds used by the classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `det ρ_κ ≤ eps_rank` means local rank one.
    pub eps_rank: f64,
    /// `τ > eps_tau` means GHZ class.
    pub eps_tau: f64,
    /// Relative discriminant below which the two product vectors merge.
    pub eps_disc: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_rank: 1e-9,
            eps_tau: 1e-10,
            eps_disc: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_rank", self.eps_rank),
            ("eps_tau", self.eps_tau),
            ("eps_disc", self.eps_disc),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::BadRange(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// Gram matrices of the two product vectors worse than this are rejected.
pub const MAX_GRAM_CONDITION: f64 = 1e8;
/// Allowed residual of the reconstructed decompositions.
const DECOMPOSITION_TOL: f64 = 1e-8;

/// The six SLOCC classes of three qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "A-B-C")]
    Product,
    /// `A-BC`: party A factors out.
    #[serde(rename = "A-BC")]
    SeparableA,
    /// `B-AC`
    #[serde(rename = "B-AC")]
    SeparableB,
    /// `C-AB`
    #[serde(rename = "C-AB")]
    SeparableC,
    #[serde(rename = "W")]
    W,
    #[serde(rename = "GHZ")]
    Ghz,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 6] = [
        ClassLabel::Product,
        ClassLabel::SeparableA,
        ClassLabel::SeparableB,
        ClassLabel::SeparableC,
        ClassLabel::W,
        ClassLabel::Ghz,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Product => "A-B-C",
            Self::SeparableA => "A-BC",
            Self::SeparableB => "B-AC",
            Self::SeparableC => "C-AB",
            Self::W => "W",
            Self::Ghz => "GHZ",
        }
    }

    pub fn local_ranks(&self) -> [usize; 3] {
        match self {
            Self::Product => [1, 1, 1],
            Self::SeparableA => [1, 2, 2],
            Self::SeparableB => [2, 1, 2],
            Self::SeparableC => [2, 2, 1],
            Self::W | Self::Ghz => [2, 2, 2],
        }
    }

    pub fn tensor_rank(&self) -> u8 {
        match self {
            Self::Product => 1,
            Self::W => 3,
            _ => 2,
        }
    }

    /// Whether the 3-tangle of the class is nonzero.
    pub fn has_tangle(&self) -> bool {
        matches!(self, Self::Ghz)
    }

    /// The party that factors out, for the biseparable classes.
    pub fn separable_party(&self) -> Option<usize> {
        match self {
            Self::SeparableA => Some(0),
            Self::SeparableB => Some(1),
            Self::SeparableC => Some(2),
            _ => None,
        }
    }

    /// Whether a (possibly non-invertible) local operator can map a state
    /// of this class into `target` with nonzero probability. Local ranks
    /// can only drop, and W and GHZ are unrelated.
    pub fn can_reach(&self, target: ClassLabel) -> bool {
        if *self == target {
            return true;
        }
        match self {
            Self::Ghz | Self::W => !matches!(target, Self::Ghz | Self::W),
            Self::SeparableA | Self::SeparableB | Self::SeparableC => target == Self::Product,
            Self::Product => false,
        }
    }

    fn from_ranks(ranks: [usize; 3]) -> Option<Self> {
        match ranks {
            [1, 1, 1] => Some(Self::Product),
            [1, 2, 2] => Some(Self::SeparableA),
            [2, 1, 2] => Some(Self::SeparableB),
            [2, 2, 1] => Some(Self::SeparableC),
            _ => None,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase().replace('_', "-");
        Ok(match t.as_str() {
            "A-B-C" | "PRODUCT" => Self::Product,
            "A-BC" => Self::SeparableA,
            "B-AC" => Self::SeparableB,
            "C-AB" | "AB-C" => Self::SeparableC,
            "W" => Self::W,
            "GHZ" => Self::Ghz,
            _ => return Err(Error::BadRange(format!("unknown class label {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SloccClass {
    pub label: ClassLabel,
    pub local_ranks: [usize; 3],
    pub tensor_rank: u8,
}

impl From<ClassLabel> for SloccClass {
    fn from(label: ClassLabel) -> Self {
        Self {
            label,
            local_ranks: label.local_ranks(),
            tensor_rank: label.tensor_rank(),
        }
    }
}

/// Two-step classification: determinants of `ρ_A, ρ_B, ρ_C`, then the
/// 3-tangle when all three are nonzero.
pub fn classify(psi: &PureState, tol: &Tolerances) -> Result<SloccClass> {
    psi.require_three_qubits()?;
    tol.validate()?;
    let mut ranks = [0; 3];
    for (k, rank) in ranks.iter_mut().enumerate() {
        let det = qubit_reduced_det(psi, k)?;
        *rank = if det <= tol.eps_rank {
            1
        } else if det < 10.0 * tol.eps_rank {
            return Err(Error::Inconclusive(format!(
                "det ρ_{} = {det:.3e} lies within a decade of eps_rank",
                ["A", "B", "C"][k]
            )));
        } else {
            2
        };
    }
    let label = if ranks == [2, 2, 2] {
        if three_tangle(psi)? > tol.eps_tau {
            ClassLabel::Ghz
        } else {
            ClassLabel::W
        }
    } else {
        ClassLabel::from_ranks(ranks).ok_or_else(|| {
            Error::Inconclusive(format!("local ranks {ranks:?} are inconsistent for a pure state"))
        })?
    };
    Ok(label.into())
}

/// Product vectors contained in the range of `ρ_BC`.
#[derive(Debug, Clone)]
pub struct ProductVectorSet {
    /// Distinct product vectors (1 or 2).
    pub count: usize,
    /// Unit product vectors in `C² ⊗ C²`.
    pub vectors: Vec<Vec<C64>>,
    /// Roots `(s : t)` of `det(s M₁ + t M₂) = 0`; `t = 0` is the root at
    /// infinity of the affine quadratic in `t/s`.
    pub roots: Vec<(C64, C64)>,
    /// `|c₁² − 4c₀c₂| / max|c_i|²` of the defining quadratic.
    pub relative_discriminant: f64,
    /// Orthonormal basis `{ξ₁, ξ₂}` of the range.
    pub range_basis: [Vec<C64>; 2],
}

fn det_of_reshape(v: &[C64]) -> C64 {
    v[0] * v[3] - v[1] * v[2]
}

/// Finds the product states `|b⟩|c⟩` in `R(ρ_BC)`.
///
/// With `{ξ₁, ξ₂}` spanning the range and `M_i` their 2×2 reshapes, a
/// vector `s ξ₁ + t ξ₂` is a product iff `det(s M₁ + t M₂) = 0`, a binary
/// quadratic form with either two distinct roots or a double root.
pub fn product_vectors_in_range(psi: &PureState, tol: &Tolerances) -> Result<ProductVectorSet> {
    psi.require_three_qubits()?;
    let rho_bc = reduce(psi, &[1, 2])?;
    let eig = eig_hermitian(rho_bc.matrix())?;
    let max = eig.eigenvalues[0];
    let rank = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > tol.eps_rank * max)
        .count();
    if rank < 2 {
        return Err(Error::DegenerateRange { rank });
    }
    let xi1 = eig.eigenvector(0);
    let xi2 = eig.eigenvector(1);

    let c0 = det_of_reshape(&xi1);
    let c2 = det_of_reshape(&xi2);
    let c1 = xi1[0] * xi2[3] + xi2[0] * xi1[3] - xi1[1] * xi2[2] - xi2[1] * xi1[2];
    let scale = c0.norm().max(c1.norm()).max(c2.norm());
    if scale < 1e-12 {
        return Err(Error::Inconclusive(
            "every vector in the range of ρ_BC is a product (r(ρ_B) or r(ρ_C) < 2)".into(),
        ));
    }
    let disc = c1 * c1 - c0 * c2 * 4.0;
    let rel = disc.norm() / (scale * scale);

    let roots: Vec<(C64, C64)> = if rel > tol.eps_disc {
        let mut sq = disc.sqrt();
        if (c1.conj() * sq).re < 0.0 {
            sq = -sq;
        }
        let q = -(c1 + sq) * 0.5;
        if c0.norm() >= c2.norm() {
            // c₀ s² + c₁ s + c₂ = 0 in s = s/t
            vec![(q, c0), (c2, q)]
        } else {
            // c₂ t² + c₁ t + c₀ = 0 in t = t/s
            vec![(c2, q), (q, c0)]
        }
    } else if c0.norm() >= c2.norm() {
        vec![(-c1, c0 * 2.0)]
    } else {
        vec![(c2 * 2.0, -c1)]
    };

    let mut vectors = Vec::with_capacity(roots.len());
    let mut unit_roots = Vec::with_capacity(roots.len());
    for (s, t) in roots {
        let n = (s.norm_sqr() + t.norm_sqr()).sqrt();
        let (s, t) = (s / n, t / n);
        let v: Vec<C64> = xi1.iter().zip(&xi2).map(|(a, b)| a * s + b * t).collect();
        vectors.push(normalized(&v).ok_or_else(|| Error::Inconclusive("vanishing product vector".into()))?);
        unit_roots.push((s, t));
    }
    Ok(ProductVectorSet {
        count: vectors.len(),
        vectors,
        roots: unit_roots,
        relative_discriminant: rel,
        range_basis: [xi1, xi2],
    })
}

/// Splits a unit product vector of `C² ⊗ C²` into unit factors `b ⊗ c`
/// (the phase goes to `c`).
pub fn factor_product(v: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let col0 = [v[0], v[2]];
    let col1 = [v[1], v[3]];
    let b = if vec_norm(&col0) >= vec_norm(&col1) {
        normalized(&col0)
    } else {
        normalized(&col1)
    }
    .expect("nonzero product vector");
    // c_k = Σ_i conj(b_i) M_ik
    let c = vec![
        b[0].conj() * v[0] + b[1].conj() * v[2],
        b[0].conj() * v[1] + b[1].conj() * v[3],
    ];
    (b, c)
}

/// `weight · f_A ⊗ f_B ⊗ f_C` with unit factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    pub weight: f64,
    pub factors: [Vec<C64>; 3],
}

impl ProductTerm {
    /// Normalizes the factors into the weight and moves every phase onto
    /// the first factor.
    fn new(a: Vec<C64>, b: Vec<C64>, c: Vec<C64>) -> Self {
        let (na, nb, nc) = (vec_norm(&a), vec_norm(&b), vec_norm(&c));
        Self {
            weight: na * nb * nc,
            factors: [
                a.iter().map(|z| z / na).collect(),
                b.iter().map(|z| z / nb).collect(),
                c.iter().map(|z| z / nc).collect(),
            ],
        }
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        let [a, b, c] = &self.factors;
        let mut out = Vec::with_capacity(8);
        for x in a {
            for y in b {
                for z in c {
                    out.push(x * y * z * self.weight);
                }
            }
        }
        out
    }
}

/// Sum of the terms as an amplitude vector.
pub fn reconstruct_terms(terms: &[ProductTerm]) -> Vec<C64> {
    let mut out = vec![C64::default(); 8];
    for t in terms {
        for (o, a) in out.iter_mut().zip(t.amplitudes()) {
            *o += a;
        }
    }
    out
}

fn residual(psi: &PureState, terms: &[ProductTerm]) -> f64 {
    let r = reconstruct_terms(terms);
    r.iter()
        .zip(psi.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `(Σ_bc conj(ξ_bc) ψ_{x,bc})_x`, the partial inner product over BC.
fn contract_bc(psi: &PureState, xi: &[C64]) -> Vec<C64> {
    let m = psi.matricize(&[0]).expect("three qubits");
    let xc: Vec<C64> = xi.iter().map(|z| z.conj()).collect();
    m.matvec(&xc)
}

/// The unique two-term decomposition `|a₁b₁c₁⟩ + |a₂b₂c₂⟩` of a
/// GHZ-class state, using the vectors of `R(ρ_BC)` biorthonormal to the
/// two product vectors.
pub fn ghz_decomposition(psi: &PureState, tol: &Tolerances) -> Result<[ProductTerm; 2]> {
    let pv = product_vectors_in_range(psi, tol)?;
    if pv.count != 2 {
        return Err(Error::Inconclusive(format!(
            "range of ρ_BC holds {} product vector(s); expected 2",
            pv.count
        )));
    }
    let (u1, u2) = (&pv.vectors[0], &pv.vectors[1]);
    let gram = CMatrix::from_rows(&[
        vec![inner(u1, u1), inner(u1, u2)],
        vec![inner(u2, u1), inner(u2, u2)],
    ]);
    let cond = gram.condition_number()?;
    if cond > MAX_GRAM_CONDITION {
        return Err(Error::Inconclusive(format!(
            "product vectors nearly parallel (Gram condition {cond:.3e})"
        )));
    }
    let ginv = gram.inverse()?;
    // Ξ = U G⁻¹ satisfies Ξ† U = 1.
    let dual = |i: usize| -> Vec<C64> {
        (0..4)
            .map(|r| u1[r] * ginv[(0, i)] + u2[r] * ginv[(1, i)])
            .collect()
    };
    let mut terms = Vec::with_capacity(2);
    for (i, u) in [u1, u2].into_iter().enumerate() {
        let a = contract_bc(psi, &dual(i));
        let (b, c) = factor_product(u);
        terms.push(ProductTerm::new(a, b, c));
    }
    let terms: [ProductTerm; 2] = terms.try_into().expect("two terms");
    let res = residual(psi, &terms);
    if res > DECOMPOSITION_TOL {
        return Err(Error::Inconclusive(format!("two-term decomposition residual {res:.3e}")));
    }
    Ok(terms)
}

/// Relative geometry of two unit vectors: `⟨x₁|x₂⟩ = cos θ e^{iω}`.
fn pair_angle(x1: &[C64], x2: &[C64]) -> (f64, f64) {
    let ov = inner(x1, x2);
    let perp: Vec<C64> = x2.iter().zip(x1).map(|(b, a)| b - ov * a).collect();
    let theta = vec_norm(&perp).atan2(ov.norm());
    let omega = if ov.norm() > 0.0 { ov.arg() } else { 0.0 };
    (theta, omega)
}

fn wrap_phase(phi: f64) -> f64 {
    let p = phi.rem_euclid(2.0 * PI);
    if p >= 2.0 * PI {
        0.0
    } else {
        p
    }
}

/// Local-unitary canonical form of a GHZ-class state.
pub fn ghz_canonical(psi: &PureState, tol: &Tolerances) -> Result<GhzCanonicalParams> {
    let class = classify(psi, tol)?;
    if class.label != ClassLabel::Ghz {
        return Err(Error::NotGhzClass {
            found: class.label.to_string(),
        });
    }
    let mut terms = ghz_decomposition(psi, tol)?;
    if terms[1].weight > terms[0].weight {
        terms.swap(0, 1);
    }
    let [t1, t2] = &terms;
    let mut angles = [0.0; 3];
    let mut phi = 0.0;
    let mut cos_product = 1.0;
    for (k, angle) in angles.iter_mut().enumerate() {
        let (theta, omega) = pair_angle(&t1.factors[k], &t2.factors[k]);
        *angle = theta;
        phi += omega;
        cos_product *= theta.cos();
    }
    let delta = t2.weight.atan2(t1.weight);
    let tie = (t1.weight - t2.weight).abs() <= 1e-12 * t1.weight;
    let delta = if tie { FRAC_PI_4 } else { delta.min(FRAC_PI_4) };
    // With a vanishing overlap the phase can be absorbed into a |1⟩ state.
    let mut phi = if cos_product <= 1e-12 { 0.0 } else { wrap_phase(phi) };
    // At δ = π/4 swapping the two terms sends φ to −φ; keep φ ∈ [0, π].
    if tie && phi > PI {
        phi = wrap_phase(2.0 * PI - phi);
    }
    GhzCanonicalParams::new(delta, angles[0], angles[1], angles[2], phi)
}

/// Canonical W-class data together with the local unitaries that bring
/// the state into the form `√a|001⟩ + √b|010⟩ + √c|100⟩ + √d|000⟩`.
#[derive(Debug, Clone)]
pub struct WFrame {
    pub params: WCanonicalParams,
    /// `U_A ⊗ U_B ⊗ U_C |ψ⟩` is the canonical state up to phases.
    pub unitaries: [CMatrix; 3],
    /// Canonical state amplitudes before the phases are absorbed.
    pub rotated: Vec<C64>,
}

pub fn w_frame(psi: &PureState, tol: &Tolerances) -> Result<WFrame> {
    let class = classify(psi, tol)?;
    if class.label != ClassLabel::W {
        return Err(Error::NotWClass {
            found: class.label.to_string(),
        });
    }
    let pv = product_vectors_in_range(psi, tol)?;
    if pv.count != 1 {
        return Err(Error::Inconclusive(format!(
            "range of ρ_BC holds {} product vectors; expected 1",
            pv.count
        )));
    }
    let u = &pv.vectors[0];
    let (b1, c1) = factor_product(u);
    let residuals: Vec<Vec<C64>> = pv
        .range_basis
        .iter()
        .map(|xi| {
            let ov = inner(u, xi);
            xi.iter().zip(u).map(|(x, y)| x - ov * y).collect()
        })
        .collect();
    let best = if vec_norm(&residuals[0]) >= vec_norm(&residuals[1]) { 0 } else { 1 };
    let phi_bc = normalized(&residuals[best]).ok_or(Error::DegenerateRange { rank: 1 })?;
    let a2 = contract_bc(psi, &phi_bc);
    let a2 = normalized(&a2).ok_or_else(|| Error::Inconclusive("vanishing |a₂⟩".into()))?;

    let unitaries = [unitary_to_zero(&a2), unitary_to_zero(&b1), unitary_to_zero(&c1)];
    let mut amps = psi.amplitudes().to_vec();
    for (k, u) in unitaries.iter().enumerate() {
        amps = apply_party_operator(psi.dims(), &amps, k, u);
    }
    let stray: f64 = [0b011, 0b101, 0b110, 0b111]
        .iter()
        .map(|&i| amps[i].norm_sqr())
        .sum::<f64>()
        .sqrt();
    if stray > DECOMPOSITION_TOL {
        return Err(Error::Inconclusive(format!(
            "W normal form leaves weight {stray:.3e} outside the canonical support"
        )));
    }
    let a = amps[0b001].norm_sqr();
    let b = amps[0b010].norm_sqr();
    let c = amps[0b100].norm_sqr();
    let d = amps[0b000].norm_sqr();
    let total = a + b + c + d;
    let params = WCanonicalParams::new(a / total, b / total, c / total)?;
    Ok(WFrame {
        params,
        unitaries,
        rotated: amps,
    })
}

/// Local-unitary canonical form of a W-class state.
pub fn w_canonical(psi: &PureState, tol: &Tolerances) -> Result<WCanonicalParams> {
    Ok(w_frame(psi, tol)?.params)
}

/// Tensor rank together with an explicit minimal product decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct TensorRank {
    pub rank: u8,
    pub terms: Vec<ProductTerm>,
}

pub fn tensor_rank(psi: &PureState, tol: &Tolerances) -> Result<TensorRank> {
    let class = classify(psi, tol)?;
    let terms = match class.label {
        ClassLabel::Product => vec![product_term(psi)],
        ClassLabel::SeparableA | ClassLabel::SeparableB | ClassLabel::SeparableC => {
            biseparable_terms(psi, class.label.separable_party().expect("biseparable"))?
        }
        ClassLabel::Ghz => ghz_decomposition(psi, tol)?.to_vec(),
        ClassLabel::W => w_terms(psi, tol)?,
    };
    let res = residual(psi, &terms);
    if res > DECOMPOSITION_TOL {
        return Err(Error::Inconclusive(format!("product decomposition residual {res:.3e}")));
    }
    Ok(TensorRank {
        rank: class.tensor_rank,
        terms,
    })
}

fn product_term(psi: &PureState) -> ProductTerm {
    let amps = psi.amplitudes();
    let (imax, _) = amps
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("nonempty");
    let (i, j, k) = (imax >> 2, (imax >> 1) & 1, imax & 1);
    let pivot = amps[imax];
    let a: Vec<C64> = (0..2).map(|x| amps[(x << 2) | (j << 1) | k] / pivot).collect();
    let b: Vec<C64> = (0..2).map(|y| amps[(i << 2) | (y << 1) | k] / pivot).collect();
    let c: Vec<C64> = (0..2).map(|z| amps[(i << 2) | (j << 1) | z]).collect();
    ProductTerm::new(a, b, c)
}

/// Two Schmidt terms of the entangled pair, tensored with the separable
/// party's state.
fn biseparable_terms(psi: &PureState, sep: usize) -> Result<Vec<ProductTerm>> {
    // Move the separable party to the front.
    let perm: [usize; 3] = match sep {
        0 => [0, 1, 2],
        1 => [1, 0, 2],
        _ => [2, 0, 1],
    };
    let moved = psi.permute_parties(&perm)?;
    let rho = reduce(&moved, &[0])?;
    let eig = rho.eig()?;
    let a = eig.eigenvector(0);
    let pair = contract_first(&moved, &a);
    let (sigma, left, right) = schmidt_2x2(&pair)?;
    let mut terms = Vec::with_capacity(2);
    for i in 0..2 {
        let f = [a.clone(), left[i].clone(), right[i].iter().map(|z| z * sigma[i]).collect()];
        // undo the permutation: factor for original party perm[k] is f[k]
        let mut orig: [Vec<C64>; 3] = Default::default();
        for k in 0..3 {
            orig[perm[k]] = f[k].clone();
        }
        let [x, y, z] = orig;
        terms.push(ProductTerm::new(x, y, z));
    }
    Ok(terms)
}

/// `(⟨a| ⊗ 1)|ψ⟩` as a 4-vector over the last two parties.
fn contract_first(psi: &PureState, a: &[C64]) -> Vec<C64> {
    let m = psi.matricize(&[0]).expect("three qubits");
    let ac: Vec<C64> = a.iter().map(|z| z.conj()).collect();
    m.transpose().matvec(&ac)
}

/// Singular values with left and right vectors.
pub(crate) type Schmidt2 = ([f64; 2], [Vec<C64>; 2], [Vec<C64>; 2]);

/// Schmidt form `Σ σ_i u_i ⊗ v_i` of a (not necessarily unit) 4-vector.
pub(crate) fn schmidt_2x2(v: &[C64]) -> Result<Schmidt2> {
    let n = CMatrix::from_rows(&[vec![v[0], v[1]], vec![v[2], v[3]]]);
    let eig = eig_hermitian(&(&n * &n.adjoint()))?;
    let mut sigma = [0.0; 2];
    let mut us: [Vec<C64>; 2] = Default::default();
    let mut vs: [Vec<C64>; 2] = Default::default();
    for i in 0..2 {
        let u = eig.eigenvector(i);
        // v_iᵀ = u_i† N / σ_i
        let row: Vec<C64> = (0..2)
            .map(|k| u[0].conj() * n[(0, k)] + u[1].conj() * n[(1, k)])
            .collect();
        let s = vec_norm(&row);
        sigma[i] = s;
        vs[i] = if s > 0.0 {
            row.iter().map(|z| z / s).collect()
        } else {
            vec![C64::default(); 2]
        };
        us[i] = u;
    }
    Ok((sigma, us, vs))
}

fn w_terms(psi: &PureState, tol: &Tolerances) -> Result<Vec<ProductTerm>> {
    let frame = w_frame(psi, tol)?;
    let r = &frame.rotated;
    let back: Vec<CMatrix> = frame.unitaries.iter().map(CMatrix::adjoint).collect();
    let e0 = [C64::new(1.0, 0.0), C64::default()];
    let e1 = [C64::default(), C64::new(1.0, 0.0)];
    let lift = |k: usize, v: &[C64]| back[k].matvec(v);
    // (r₀₀₀|0⟩ + r₁₀₀|1⟩)|00⟩ + r₀₀₁|0⟩|01⟩ + r₀₁₀|0⟩|10⟩
    let a_first = vec![r[0b000], r[0b100]];
    Ok(vec![
        ProductTerm::new(lift(0, &a_first), lift(1, &e0), lift(2, &e0)),
        ProductTerm::new(lift(0, &e0).iter().map(|z| z * r[0b001]).collect(), lift(1, &e0), lift(2, &e1)),
        ProductTerm::new(lift(0, &e0).iter().map(|z| z * r[0b010]).collect(), lift(1, &e1), lift(2, &e0)),
    ])
}

/// Smallest `det ρ_κ` (and 3-tangle, for GHZ) accepted by [`random_member`]
/// for the genuinely tripartite classes.
pub const MEMBER_MARGIN: f64 = 1e-3;

/// Draws a state of the requested class: random canonical parameters for
/// GHZ and W, random local factors otherwise, followed by Haar-random local
/// unitaries. GHZ and W draws closer than [`MEMBER_MARGIN`] to a class
/// boundary are redrawn so that the label survives further well-conditioned
/// local operators.
pub fn random_member<R: rand::Rng + ?Sized>(label: ClassLabel, rng: &mut R) -> PureState {
    use crate::rng::{gaussian_vector, haar_unitary};
    let qubit = |rng: &mut R| normalized(&gaussian_vector(2, rng)).expect("nonzero draw");
    let clear = |psi: &PureState, need_tau: bool| {
        (0..3).all(|k| qubit_reduced_det(psi, k).expect("qubit") >= MEMBER_MARGIN)
            && (!need_tau || three_tangle(psi).expect("three qubits") >= MEMBER_MARGIN)
    };
    let amps = match label {
        ClassLabel::Ghz => loop {
            let psi = state_from_ghz_params(&GhzCanonicalParams::random(rng)).expect("valid params");
            if clear(&psi, true) {
                break psi.amplitudes().to_vec();
            }
        },
        ClassLabel::W => loop {
            let psi = state_from_w_params(&WCanonicalParams::random(rng)).expect("valid params");
            if clear(&psi, false) {
                break psi.amplitudes().to_vec();
            }
        },
        ClassLabel::Product => {
            let f = [qubit(rng), qubit(rng), qubit(rng)];
            PureState::product(&f).expect("qubits").amplitudes().to_vec()
        }
        _ => {
            let sep = label.separable_party().expect("biseparable");
            // |det| > 0.05 keeps det ρ of the pair above 2.5e-3
            let pair = loop {
                let v = normalized(&gaussian_vector(4, rng)).expect("nonzero draw");
                if det_of_reshape(&v).norm() > 0.05 {
                    break v;
                }
            };
            let a = qubit(rng);
            let (x, y) = others_of(sep);
            let mut amps = vec![C64::default(); 8];
            for (idx, amp) in amps.iter_mut().enumerate() {
                let d = [idx >> 2, (idx >> 1) & 1, idx & 1];
                *amp = a[d[sep]] * pair[2 * d[x] + d[y]];
            }
            amps
        }
    };
    let mut amps = amps;
    for k in 0..3 {
        amps = apply_party_operator(&[2, 2, 2], &amps, k, &haar_unitary(2, rng));
    }
    PureState::from_amplitudes(&[2, 2, 2], amps).expect("unit image")
}

fn others_of(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Canonical data reported per class.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Canonical {
    Ghz(GhzCanonicalParams),
    W(WCanonicalParams),
    /// `|0⟩ ⊗ (c_δ|00⟩ + s_δ|11⟩)` with the separable party first.
    Biseparable { separable_party: String, delta: f64 },
    Product,
}

pub fn canonical_form(psi: &PureState, tol: &Tolerances) -> Result<Canonical> {
    let class = classify(psi, tol)?;
    Ok(match class.label {
        ClassLabel::Ghz => Canonical::Ghz(ghz_canonical(psi, tol)?),
        ClassLabel::W => Canonical::W(w_canonical(psi, tol)?),
        ClassLabel::Product => Canonical::Product,
        label => {
            let terms = biseparable_terms(psi, label.separable_party().expect("biseparable"))?;
            let delta = terms[1].weight.atan2(terms[0].weight);
            Canonical::Biseparable {
                separable_party: ["A", "B", "C"][label.separable_party().unwrap()].to_string(),
                delta,
            }
        }
    })
}

/// The classification report written by the command-line tool.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub class: ClassLabel,
    pub ranks: [usize; 3],
    pub tau: f64,
    pub tensor_rank: u8,
    pub canonical: Canonical,
}

pub fn classification_report(psi: &PureState, tol: &Tolerances) -> Result<ClassificationReport> {
    let class = classify(psi, tol)?;
    Ok(ClassificationReport {
        class: class.label,
        ranks: class.local_ranks,
        tau: three_tangle(psi)?,
        tensor_rank: class.tensor_rank,
        canonical: canonical_form(psi, tol)?,
    })
}
