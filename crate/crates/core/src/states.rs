//! Pure states, the named states, canonical-form constructors and the JSON
//! state file.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, re, vec_norm, CMatrix, C64};
use crate::rng::{gaussian_vector, rng_from_seed};

/// Slack on the input norm accepted before renormalization.
pub const NORM_TOL: f64 = 1e-6;
/// Norms below this are treated as the zero vector.
pub const ZERO_NORM: f64 = 1e-12;
/// Slack on the boundaries of the canonical parameter ranges.
const RANGE_SLACK: f64 = 1e-12;

/// Normalized pure state on `⊗_k C^{dims[k]}`.
///
/// Amplitudes use mixed-radix indexing with party 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl PureState {
    /// Validates the dimensions and renormalizes any nonzero vector.
    pub fn from_amplitudes(dims: &[usize], amplitudes: Vec<C64>) -> Result<Self> {
        check_dims(dims)?;
        let len: usize = dims.iter().product();
        if amplitudes.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} need {len} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        Self::normalize(dims.to_vec(), amplitudes)
    }

    /// Same as [`from_amplitudes`](Self::from_amplitudes) but rejects norms
    /// farther than [`NORM_TOL`] from one.
    pub fn from_normalized(dims: &[usize], amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalizable { norm });
        }
        Self::from_amplitudes(dims, amplitudes)
    }

    fn normalize(dims: Vec<usize>, mut amps: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amps);
        if !norm.is_finite() || norm < ZERO_NORM {
            return Err(Error::NotNormalizable { norm });
        }
        // already unit up to rounding: dividing would only perturb the last bits
        if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(Self { dims, amps });
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { dims, amps })
    }

    /// Normalizes an image vector, returning it with its squared norm.
    pub(crate) fn from_image(dims: &[usize], amps: Vec<C64>) -> Result<(Self, f64)> {
        let norm = vec_norm(&amps);
        if norm < ZERO_NORM {
            return Err(Error::Annihilated { norm });
        }
        let state = Self::normalize(dims.to_vec(), amps)?;
        Ok((state, norm * norm))
    }

    pub fn basis(dims: &[usize], digits: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        if digits.len() != dims.len() || digits.iter().zip(dims).any(|(q, d)| q >= d) {
            return Err(Error::DimensionMismatch(format!(
                "basis digits {digits:?} for dims {dims:?}"
            )));
        }
        let mut amps = vec![C64::default(); dims.iter().product()];
        amps[index_of(dims, digits)] = re(1.0);
        Ok(Self {
            dims: dims.to_vec(),
            amps,
        })
    }

    /// Tensor product of single-party vectors (each renormalized).
    pub fn product(factors: &[Vec<C64>]) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(Vec::len).collect();
        check_dims(&dims)?;
        let mut amps = vec![re(1.0)];
        for f in factors {
            amps = amps
                .iter()
                .flat_map(|a| f.iter().map(move |b| a * b))
                .collect();
        }
        Self::normalize(dims, amps)
    }

    /// `(|000⟩ + |111⟩)/√2`
    pub fn ghz() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![C64::default(); 8];
        amps[0] = re(h);
        amps[7] = re(h);
        Self {
            dims: vec![2; 3],
            amps,
        }
    }

    /// `(|001⟩ + |010⟩ + |100⟩)/√3`
    pub fn w() -> Self {
        Self::w_n(3).expect("N = 3 is valid")
    }

    /// Symmetric state with a single excitation over `n ≥ 3` qubits.
    pub fn w_n(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::BadPartyCount {
                expected: "at least 3".into(),
                found: n,
            });
        }
        if n >= usize::BITS as usize - 1 {
            return Err(Error::BadDims(format!("W_{n} is too large")));
        }
        let amp = re(1.0 / (n as f64).sqrt());
        let mut amps = vec![C64::default(); 1 << n];
        for k in 0..n {
            amps[1 << k] = amp;
        }
        Ok(Self {
            dims: vec![2; n],
            amps,
        })
    }

    /// `(|00⟩ + |11⟩)/√2`
    pub fn epr() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            dims: vec![2, 2],
            amps: vec![re(h), re(0.0), re(0.0), re(h)],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, digits: &[usize]) -> C64 {
        self.amps[index_of(&self.dims, digits)]
    }

    pub fn is_three_qubit(&self) -> bool {
        self.dims == [2, 2, 2]
    }

    pub(crate) fn require_three_qubits(&self) -> Result<()> {
        if self.is_three_qubit() {
            Ok(())
        } else {
            Err(Error::BadPartyCount {
                expected: "three qubits".into(),
                found: self.dims.len(),
            })
        }
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amps)
    }

    pub fn inner(&self, other: &Self) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `min_θ ‖ψ − e^{iθ}φ‖`
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        let ov = other.inner(self);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { re(1.0) };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.distance_up_to_phase(other) <= tol
    }

    /// Copy with the first non-negligible amplitude made real positive.
    pub fn phase_normalized(&self) -> Self {
        let max = self.amps.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let first = self
            .amps
            .iter()
            .find(|z| z.norm() > 1e-9 * max)
            .copied()
            .unwrap_or(re(1.0));
        let ph = first.conj() / first.norm();
        Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|z| z * ph).collect(),
        }
    }

    /// Amplitudes arranged as a matrix with rows indexed by the parties in
    /// `keep` (in the given order) and columns by the remaining parties.
    /// For a state `ψ`, `ρ_keep = M M†`.
    pub fn matricize(&self, keep: &[usize]) -> Result<CMatrix> {
        let n = self.dims.len();
        check_subset(keep, n)?;
        let env: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&p| self.dims[p]).collect();
        let env_dims: Vec<usize> = env.iter().map(|&p| self.dims[p]).collect();
        let rows: usize = keep_dims.iter().product();
        let cols: usize = env_dims.iter().product::<usize>().max(1);
        let mut m = CMatrix::zeros(rows, cols);
        let mut kd = vec![0; keep.len()];
        let mut ed = vec![0; env.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            let digits = digits_of(&self.dims, idx);
            for (slot, &p) in keep.iter().enumerate() {
                kd[slot] = digits[p];
            }
            for (slot, &p) in env.iter().enumerate() {
                ed[slot] = digits[p];
            }
            let r = index_of(&keep_dims, &kd);
            let c = if env.is_empty() { 0 } else { index_of(&env_dims, &ed) };
            m[(r, c)] = a;
        }
        Ok(m)
    }

    /// Reorders parties: party `k` of the result is party `perm[k]` of `self`.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::BadSubset(format!("{perm:?} is not a permutation of {n} parties")));
        }
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut amps = vec![C64::default(); self.amps.len()];
        let mut new_digits = vec![0; n];
        for (idx, &a) in self.amps.iter().enumerate() {
            let digits = digits_of(&self.dims, idx);
            for (k, &p) in perm.iter().enumerate() {
                new_digits[k] = digits[p];
            }
            amps[index_of(&dims, &new_digits)] = a;
        }
        Ok(Self { dims, amps })
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            dims: self.dims.clone(),
            amplitudes: self.amps.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("state file serializes")
    }
}

/// On-disk state format: `{"dims": [2,2,2], "amplitudes": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn into_state(self) -> Result<PureState> {
        let amps = self.amplitudes.iter().map(|&[r, i]| C64::new(r, i)).collect();
        PureState::from_amplitudes(&self.dims, amps)
    }
}

impl TryFrom<StateFile> for PureState {
    type Error = Error;
    fn try_from(f: StateFile) -> Result<Self> {
        f.into_state()
    }
}

pub fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::BadDims("no parties".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::BadDims(format!("party dimension {d} < 2")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&n| n <= 1 << 24)
        .map(|_| ())
        .ok_or_else(|| Error::BadDims(format!("{dims:?} is too large")))
}

pub(crate) fn check_subset(keep: &[usize], n: usize) -> Result<()> {
    if keep.is_empty() || keep.len() >= n {
        return Err(Error::BadSubset(format!(
            "{keep:?} must be a nonempty proper subset of {n} parties"
        )));
    }
    let mut seen = vec![false; n];
    for &p in keep {
        if p >= n || seen[p] {
            return Err(Error::BadSubset(format!("{keep:?} for {n} parties")));
        }
        seen[p] = true;
    }
    Ok(())
}

pub fn index_of(dims: &[usize], digits: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&q, &d)| acc * d + q)
}

pub fn digits_of(dims: &[usize], mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (slot, &d) in digits.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    digits
}

/// Applies `op` to one party, returning the unnormalized image.
pub fn apply_party_operator(dims: &[usize], amps: &[C64], party: usize, op: &CMatrix) -> Vec<C64> {
    let d = dims[party];
    assert_eq!((op.rows(), op.cols()), (d, d), "operator dimension");
    let stride: usize = dims[party + 1..].iter().product();
    let block = d * stride;
    let mut out = vec![C64::default(); amps.len()];
    for base in (0..amps.len()).step_by(block) {
        for s in 0..stride {
            for i in 0..d {
                let mut acc = C64::default();
                for j in 0..d {
                    acc += op[(i, j)] * amps[base + j * stride + s];
                }
                out[base + i * stride + s] = acc;
            }
        }
    }
    out
}

/// Five-parameter canonical form of a GHZ-class state,
/// `√K (c_δ|000⟩ + s_δ e^{iφ}|φ_A φ_B φ_C⟩)` with `|φ_X⟩ = c_x|0⟩ + s_x|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzCanonicalParams {
    pub k: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
}

impl GhzCanonicalParams {
    /// Validates the angles and fills in the normalization `K`.
    pub fn new(delta: f64, alpha: f64, beta: f64, gamma: f64, phi: f64) -> Result<Self> {
        let p = Self {
            k: normalization_k(delta, alpha, beta, gamma, phi),
            delta,
            alpha,
            beta,
            gamma,
            phi,
        };
        p.validate()?;
        Ok(p)
    }

    /// The parameters of `|GHZ⟩` itself.
    pub fn ghz() -> Self {
        Self::new(FRAC_PI_4, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, 0.0).expect("valid")
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        use crate::rng::uniform_open_closed;
        let delta = uniform_open_closed(FRAC_PI_4, rng);
        let alpha = uniform_open_closed(FRAC_PI_2, rng);
        let beta = uniform_open_closed(FRAC_PI_2, rng);
        let gamma = uniform_open_closed(FRAC_PI_2, rng);
        let phi = 2.0 * PI * rng.random::<f64>();
        Self::new(delta, alpha, beta, gamma, phi).expect("sampled inside the ranges")
    }

    pub fn validate(&self) -> Result<()> {
        let in_open_closed =
            |x: f64, hi: f64| x.is_finite() && x > 0.0 && x <= hi + RANGE_SLACK;
        if !in_open_closed(self.delta, FRAC_PI_4) {
            return Err(Error::BadRange(format!("delta = {} not in (0, π/4]", self.delta)));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !in_open_closed(v, FRAC_PI_2) {
                return Err(Error::BadRange(format!("{name} = {v} not in (0, π/2]")));
            }
        }
        if !(self.phi.is_finite() && self.phi >= 0.0 && self.phi < 2.0 * PI) {
            return Err(Error::BadRange(format!("phi = {} not in [0, 2π)", self.phi)));
        }
        let k = normalization_k(self.delta, self.alpha, self.beta, self.gamma, self.phi);
        if !(self.k > 0.5 && (self.k - k).abs() <= 1e-10 * k.max(1.0)) {
            return Err(Error::BadRange(format!("K = {} inconsistent with angles (expected {k})", self.k)));
        }
        Ok(())
    }

    /// `(2K s_α s_β s_γ s_δ c_δ)²`
    pub fn tangle(&self) -> f64 {
        let t = 2.0
            * self.k
            * self.alpha.sin()
            * self.beta.sin()
            * self.gamma.sin()
            * self.delta.sin()
            * self.delta.cos();
        t * t
    }
}

/// `K = (1 + 2 c_δ s_δ c_α c_β c_γ c_φ)⁻¹`
pub fn normalization_k(delta: f64, alpha: f64, beta: f64, gamma: f64, phi: f64) -> f64 {
    1.0 / (1.0
        + 2.0 * delta.cos() * delta.sin() * alpha.cos() * beta.cos() * gamma.cos() * phi.cos())
}

pub fn state_from_ghz_params(p: &GhzCanonicalParams) -> Result<PureState> {
    p.validate()?;
    let sk = p.k.sqrt();
    let fa = [p.alpha.cos(), p.alpha.sin()];
    let fb = [p.beta.cos(), p.beta.sin()];
    let fc = [p.gamma.cos(), p.gamma.sin()];
    let second = C64::from_polar(p.delta.sin(), p.phi);
    let mut amps = vec![C64::default(); 8];
    for (idx, amp) in amps.iter_mut().enumerate() {
        let (i, j, k) = (idx >> 2, (idx >> 1) & 1, idx & 1);
        *amp = second * (fa[i] * fb[j] * fc[k]);
    }
    amps[0] += re(p.delta.cos());
    for a in &mut amps {
        *a *= sk;
    }
    PureState::from_amplitudes(&[2, 2, 2], amps)
}

/// Three-parameter canonical form of a W-class state,
/// `√a|001⟩ + √b|010⟩ + √c|100⟩ + √d|000⟩` with `d = 1 − a − b − c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WCanonicalParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl WCanonicalParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let d = 1.0 - (a + b + c);
        let p = Self {
            a,
            b,
            c,
            d: if d < 0.0 && d > -1e-12 { 0.0 } else { d },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn w() -> Self {
        let t = 1.0 / 3.0;
        Self { a: t, b: t, c: t, d: 0.0 }
    }

    /// Uniform on the simplex `a + b + c + d = 1`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let e: Vec<f64> = (0..4).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let s: f64 = e.iter().sum();
            if let Ok(p) = Self::new(e[0] / s, e[1] / s, e[2] / s) {
                return p;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::BadRange(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.d.is_finite() && self.d >= 0.0) {
            return Err(Error::BadRange(format!("d = {} must be non-negative", self.d)));
        }
        let sum = self.a + self.b + self.c + self.d;
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::BadRange(format!("a + b + c + d = {sum} ≠ 1")));
        }
        Ok(())
    }

    /// `E_τ = 4(ab + ac + bc)`
    pub fn e_tau(&self) -> f64 {
        4.0 * (self.a * self.b + self.a * self.c + self.b * self.c)
    }
}

pub fn state_from_w_params(p: &WCanonicalParams) -> Result<PureState> {
    p.validate()?;
    let mut amps = vec![C64::default(); 8];
    amps[0b001] = re(p.a.sqrt());
    amps[0b010] = re(p.b.sqrt());
    amps[0b100] = re(p.c.sqrt());
    amps[0b000] = re(p.d.sqrt());
    PureState::from_amplitudes(&[2, 2, 2], amps)
}

/// Haar-random pure state from normalized i.i.d. complex Gaussians.
pub fn random_pure(dims: &[usize], seed: u64) -> Result<PureState> {
    random_pure_with(dims, &mut rng_from_seed(seed))
}

pub fn random_pure_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    check_dims(dims)?;
    let n = dims.iter().product();
    loop {
        let v = gaussian_vector(n, rng);
        if vec_norm(&v) >= ZERO_NORM {
            return PureState::from_amplitudes(dims, v);
        }
    }
}

/// Schmidt decomposition `ψ = Σ_i √λ_i |u_i⟩|v_i⟩` of a bipartite state.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Squared Schmidt coefficients, descending, summing to one.
    pub coefficients: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
    pub schmidt_number: usize,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> Vec<C64> {
        let n = self.left[0].len();
        let m = self.right[0].len();
        let mut out = vec![C64::default(); n * m];
        for ((lam, u), v) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            let s = lam.sqrt();
            for i in 0..n {
                for j in 0..m {
                    out[i * m + j] += u[i] * v[j] * s;
                }
            }
        }
        out
    }
}
