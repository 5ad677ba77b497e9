//! Residual pairwise entanglement and the `N`-party W family.
//!
//! `E_τ = C²_AB + C²_AC + C²_BC` never exceeds 4/3 on three qubits and
//! reaches it only on the W orbit. This module evaluates `E_τ` and the
//! related averages, gives its closed forms on the GHZ and W canonical
//! families, scans the polynomial whose negativity proves the bound, and
//! treats the `W_N` states and the parameter-counting argument for
//! infinitely many classes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{re, CMatrix, C64};
use crate::measures::{
    concurrence_mixed, e2_monotone, ent_formation, measure_report, pair_concurrence, reduce, DensityMatrix,
};
use crate::rng::{gaussian_vector, parallel_map, rng_from_seed, trial_seed, ToolRng};
use crate::states::{random_pure_with, GhzCanonicalParams, PureState};

/// Pairwise entanglement measure used for the averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairMeasure {
    /// Squared concurrence `C²`.
    #[serde(rename = "c2")]
    Concurrence2,
    /// Entanglement of formation in bits.
    #[serde(rename = "ef")]
    Formation,
    #[serde(rename = "e2")]
    E2,
}

impl PairMeasure {
    pub fn of_concurrence(&self, c: f64) -> Result<f64> {
        match self {
            Self::Concurrence2 => Ok(c * c),
            Self::Formation => ent_formation(c),
            Self::E2 => e2_monotone(c),
        }
    }
}

impl fmt::Display for PairMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Concurrence2 => "c2",
            Self::Formation => "ef",
            Self::E2 => "e2",
        })
    }
}

impl FromStr for PairMeasure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c2" | "concurrence2" => Ok(Self::Concurrence2),
            "ef" | "formation" => Ok(Self::Formation),
            "e2" => Ok(Self::E2),
            _ => Err(Error::BadRange(format!("unknown pair measure {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub measure: PairMeasure,
    /// `C_AB, C_AC, C_BC`
    pub pair_concurrences: [f64; 3],
    /// Mean of the pairwise measure over the three pairs.
    pub e_bar: f64,
    /// Smallest pairwise measure.
    pub e_min: f64,
    /// `C²_AB + C²_AC + C²_BC`, whatever the chosen measure.
    pub e_tau: f64,
    pub c2_min: f64,
}

pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

pub fn residual_report(psi: &PureState, measure: PairMeasure) -> Result<ResidualReport> {
    psi.require_three_qubits()?;
    let mut cs = [0.0; 3];
    for (c, &(p, q)) in cs.iter_mut().zip(&PAIRS) {
        *c = pair_concurrence(psi, p, q)?;
    }
    let values: Vec<f64> = cs.iter().map(|&c| measure.of_concurrence(c)).collect::<Result<_>>()?;
    let c2: Vec<f64> = cs.iter().map(|c| c * c).collect();
    Ok(ResidualReport {
        measure,
        pair_concurrences: cs,
        e_bar: values.iter().sum::<f64>() / 3.0,
        e_min: values.iter().copied().fold(f64::INFINITY, f64::min),
        e_tau: c2.iter().sum(),
        c2_min: c2.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Closed-form `E_τ` of the GHZ-class canonical state:
/// `4K² c_δ² s_δ² [(s_α²s_β² + s_α²s_γ² + s_β²s_γ²) − 3 s_α²s_β²s_γ²]`.
pub fn etau_from_ghz_params(p: &GhzCanonicalParams) -> Result<f64> {
    p.validate()?;
    let (sa, sb, sg) = (p.alpha.sin().powi(2), p.beta.sin().powi(2), p.gamma.sin().powi(2));
    let cs = p.delta.cos() * p.delta.sin();
    let bracket = (sa * sb + sa * sg + sb * sg) - 3.0 * sa * sb * sg;
    Ok(4.0 * p.k * p.k * cs * cs * bracket)
}

/// `E_τ` of the GHZ-class family at `δ = π/4, φ = π`, its maximum over
/// those two parameters:
/// `[Σc² − 2Σc²c² + 3c_α²c_β²c_γ²] / (1 − c_α c_β c_γ)²`.
pub fn etau_ghz_phase_maximum(alpha: f64, beta: f64, gamma: f64) -> f64 {
    let (x, y, z) = (alpha.cos(), beta.cos(), gamma.cos());
    let (xx, yy, zz) = (x * x, y * y, z * z);
    let num = (xx + yy + zz) - 2.0 * (xx * yy + xx * zz + yy * zz) + 3.0 * xx * yy * zz;
    let den = 1.0 - x * y * z;
    num / (den * den)
}

/// `f(x,y,z) = 3(x²+y²+z²) − 6(x²y²+x²z²+y²z²) + 5x²y²z² − 4 + 8xyz`.
/// With `x, y, z` the cosines of the GHZ-class angles, `f < 0` is
/// equivalent to [`etau_ghz_phase_maximum`] `< 4/3`.
pub fn etau_gap_polynomial(x: f64, y: f64, z: f64) -> Result<f64> {
    for v in [x, y, z] {
        if !(0.0..1.0).contains(&v) {
            return Err(Error::OutOfRange { value: v, lo: 0.0, hi: 1.0 });
        }
    }
    Ok(gap_poly(x, y, z))
}

fn gap_poly(x: f64, y: f64, z: f64) -> f64 {
    let (xx, yy, zz) = (x * x, y * y, z * z);
    3.0 * (xx + yy + zz) - 6.0 * (xx * yy + xx * zz + yy * zz) + 5.0 * (xx * yy * zz) - 4.0 + 8.0 * x * y * z
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMax {
    pub resolution: usize,
    pub max: f64,
    pub argmax: [f64; 3],
}

/// Maximum of [`etau_gap_polynomial`] over the grid `{i/resolution}³`,
/// `i = 0 … resolution−1`, so the open edge at 1 is approached as
/// `1 − 1/resolution`.
pub fn grid_max_etau_gap(resolution: usize, workers: usize) -> Result<GridMax> {
    if resolution == 0 {
        return Err(Error::BadRange("grid resolution must be positive".into()));
    }
    let h = 1.0 / resolution as f64;
    let rows = parallel_map(resolution, workers, |i| {
        let x = i as f64 * h;
        let mut best = (f64::NEG_INFINITY, [0.0; 3]);
        for j in 0..resolution {
            let y = j as f64 * h;
            for k in 0..resolution {
                let z = k as f64 * h;
                let f = gap_poly(x, y, z);
                if f > best.0 {
                    best = (f, [x, y, z]);
                }
            }
        }
        best
    });
    let (max, argmax) = rows
        .into_iter()
        .fold((f64::NEG_INFINITY, [0.0; 3]), |a, b| if b.0 > a.0 { b } else { a });
    Ok(GridMax {
        resolution,
        max,
        argmax,
    })
}

fn check_wn(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::BadPartyCount {
            expected: "at least 3".into(),
            found: n,
        });
    }
    Ok(())
}

/// Two-party reduction of `W_N`: `(2|Ψ⁺⟩⟨Ψ⁺| + (N−2)|00⟩⟨00|)/N`.
pub fn wn_pair_state(n: usize) -> Result<DensityMatrix> {
    check_wn(n)?;
    let nf = n as f64;
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = re((nf - 2.0) / nf);
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        m[(i, j)] = re(1.0 / nf);
    }
    DensityMatrix::new(m)
}

/// Concurrence of [`wn_pair_state`], which equals `2/N`.
pub fn wn_pair_concurrence(n: usize) -> Result<f64> {
    concurrence_mixed(&wn_pair_state(n)?)
}

/// Concurrence of parties `p, q` of the full `W_N` state.
pub fn wn_pair_concurrence_reduced(n: usize, p: usize, q: usize) -> Result<f64> {
    check_wn(n)?;
    let psi = PureState::w_n(n)?;
    concurrence_mixed(&reduce(&psi, &[p, q])?)
}

/// Mean of `C²` over all pairs of an `N`-qubit state.
pub fn average_squared_concurrence(psi: &PureState) -> Result<f64> {
    let n = psi.n_parties();
    if n < 2 {
        return Err(Error::BadPartyCount {
            expected: "at least 2".into(),
            found: n,
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for p in 0..n {
        for q in p + 1..n {
            sum += pair_concurrence(psi, p, q)?.powi(2);
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Parameter count behind the infinitude of SLOCC classes: states carry
/// `2(Π n_i − 1)` real parameters, local groups remove at most
/// `2Σ(n_i² − 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimCount {
    pub dims: Vec<usize>,
    pub state_params: i128,
    pub group_params: i128,
    /// Positive values force infinitely many classes.
    pub lower_bound: i128,
}

pub fn class_count_lower_bound(dims: &[usize]) -> Result<DimCount> {
    if dims.len() < 2 {
        return Err(Error::BadDims(format!("need at least two parties, got {}", dims.len())));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::BadDims(format!("party dimension {d} < 2")));
    }
    let mut prod: i128 = 1;
    for &d in dims {
        prod = prod
            .checked_mul(d as i128)
            .ok_or_else(|| Error::BadDims("dimension product overflows".into()))?;
    }
    let state_params = 2 * (prod - 1);
    let group_params: i128 = 2 * dims.iter().map(|&d| (d as i128) * (d as i128) - 1).sum::<i128>();
    Ok(DimCount {
        dims: dims.to_vec(),
        state_params,
        group_params,
        lower_bound: state_params - group_params,
    })
}

/// Greedy random walk on the unit sphere that only accepts improvements.
/// With `project` set, every candidate is pushed back onto a constraint
/// surface before it is scored.
fn hill_climb(
    start: &PureState,
    steps: usize,
    rng: &mut ToolRng,
    project: Option<fn(Vec<C64>) -> Vec<C64>>,
    objective: impl Fn(&PureState) -> Result<f64>,
) -> Result<(PureState, f64)> {
    let mut best = start.clone();
    let mut value = objective(&best)?;
    let mut sigma = 0.05;
    let dim = best.amplitudes().len();
    for _ in 0..steps {
        let step = gaussian_vector(dim, rng);
        let mut cand: Vec<_> = best
            .amplitudes()
            .iter()
            .zip(&step)
            .map(|(a, g)| a + g * sigma)
            .collect();
        if let Some(f) = project {
            cand = f(cand);
        }
        let Ok(cand) = PureState::from_amplitudes(best.dims(), cand) else {
            sigma = (sigma * 0.98).max(1e-9);
            continue;
        };
        let v = objective(&cand)?;
        if v > value {
            best = cand;
            value = v;
            sigma = (sigma * 1.5).min(0.5);
        } else {
            sigma = (sigma * 0.9f64.powf(0.25)).max(1e-9);
        }
    }
    Ok((best, value))
}

/// Cayley hyperdeterminant of a three-qubit amplitude vector. The
/// 3-tangle is `4|Det|`.
fn hyperdeterminant(a: &[C64]) -> C64 {
    let d1 = a[0] * a[0] * a[7] * a[7] + a[1] * a[1] * a[6] * a[6] + a[2] * a[2] * a[5] * a[5] + a[4] * a[4] * a[3] * a[3];
    let d2 = a[0] * a[7] * (a[3] * a[4] + a[5] * a[2] + a[6] * a[1])
        + a[3] * a[4] * (a[5] * a[2] + a[6] * a[1])
        + a[5] * a[2] * a[6] * a[1];
    let d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4];
    d1 - 2.0 * d2 + 4.0 * d3
}

/// A few Newton steps toward `Det = 0`, the closure of the W class.
/// `Det` is holomorphic, so the minimal-norm correction is
/// `−Det · conj(∇Det) / ‖∇Det‖²`.
fn project_to_zero_tangle(mut a: Vec<C64>) -> Vec<C64> {
    const H: f64 = 1e-6;
    for _ in 0..12 {
        let f = hyperdeterminant(&a);
        if f.norm() < 1e-15 {
            break;
        }
        let grad: Vec<C64> = (0..a.len())
            .map(|j| {
                let (mut p, mut m) = (a.clone(), a.clone());
                p[j] += H;
                m[j] -= H;
                (hyperdeterminant(&p) - hyperdeterminant(&m)) / (2.0 * H)
            })
            .collect();
        let n2: f64 = grad.iter().map(|z| z.norm_sqr()).sum();
        if n2 < 1e-300 {
            break;
        }
        for (x, g) in a.iter_mut().zip(&grad) {
            *x -= f * g.conj() / n2;
        }
    }
    a
}

/// Largest `E_τ` and `C²_min` over Haar-random states, with a local
/// refinement of the best sample and its distance from the W orbit
/// measured on the LU-invariant report.
#[derive(Debug, Clone, Serialize)]
pub struct EtauSamplingReport {
    pub samples: usize,
    pub max_e_tau: f64,
    pub max_e_tau_seed: u64,
    pub max_c2_min: f64,
    pub max_c2_min_seed: u64,
    pub argmax_distance_to_w: f64,
    pub argmax_distance_to_ghz: f64,
    pub refine_steps: usize,
    pub refined_e_tau: f64,
    pub refined_distance_to_w: f64,
}

impl EtauSamplingReport {
    pub fn within_bounds(&self, tol: f64) -> bool {
        self.max_e_tau <= 4.0 / 3.0 + tol && self.max_c2_min <= 4.0 / 9.0 + tol && self.refined_e_tau <= 4.0 / 3.0 + tol
    }

    /// The best sample's invariants lie closer to `|W⟩` than to `|GHZ⟩`.
    pub fn argmax_nearer_w(&self) -> bool {
        self.argmax_distance_to_w < self.argmax_distance_to_ghz
    }
}

fn e_tau_of(psi: &PureState) -> Result<f64> {
    Ok(residual_report(psi, PairMeasure::Concurrence2)?.e_tau)
}

fn distance_to_w(psi: &PureState) -> Result<f64> {
    Ok(measure_report(psi)?.max_deviation(&measure_report(&PureState::w())?))
}

pub fn etau_haar_sampling(samples: usize, seed: u64, workers: usize, refine_steps: usize) -> Result<EtauSamplingReport> {
    if samples == 0 {
        return Err(Error::BadRange("need at least one sample".into()));
    }
    let rows: Vec<(u64, f64, f64)> = parallel_map(samples, workers, |i| {
        let s = trial_seed(seed, i as u64);
        let psi = random_pure_with(&[2, 2, 2], &mut rng_from_seed(s))?;
        let r = residual_report(&psi, PairMeasure::Concurrence2)?;
        Ok((s, r.e_tau, r.c2_min))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut top = (f64::NEG_INFINITY, 0);
    let mut top_min = (f64::NEG_INFINITY, 0);
    for &(s, e, m) in &rows {
        if e > top.0 {
            top = (e, s);
        }
        if m > top_min.0 {
            top_min = (m, s);
        }
    }
    let argmax = random_pure_with(&[2, 2, 2], &mut rng_from_seed(top.1))?;
    let mut rng = rng_from_seed(trial_seed(seed, u64::MAX));
    // E_τ has a kink where τ vanishes, which stalls a free walk. A third
    // of the budget climbs freely, the rest stays on the τ = 0 surface.
    let free = refine_steps / 3;
    let (loose, _) = hill_climb(&argmax, free, &mut rng, None, e_tau_of)?;
    let (pinned, pinned_e_tau) = hill_climb(&loose, refine_steps - free, &mut rng, Some(project_to_zero_tangle), e_tau_of)?;
    let loose_e_tau = e_tau_of(&loose)?;
    let (refined, refined_e_tau) = if pinned_e_tau >= loose_e_tau {
        (pinned, pinned_e_tau)
    } else {
        (loose, loose_e_tau)
    };
    Ok(EtauSamplingReport {
        samples,
        max_e_tau: top.0,
        max_e_tau_seed: top.1,
        max_c2_min: top_min.0,
        max_c2_min_seed: top_min.1,
        argmax_distance_to_w: distance_to_w(&argmax)?,
        argmax_distance_to_ghz: measure_report(&argmax)?.max_deviation(&measure_report(&PureState::ghz())?),
        refine_steps,
        refined_e_tau,
        refined_distance_to_w: distance_to_w(&refined)?,
    })
}

/// Sampling experiment for the average entanglement of formation. The
/// output is descriptive: no bound is asserted.
#[derive(Debug, Clone, Serialize)]
pub struct FormationSamplingReport {
    pub samples: usize,
    pub max_e_bar: f64,
    pub max_e_bar_seed: u64,
    pub w_e_bar: f64,
    pub argmax_distance_to_w: f64,
    pub refined_e_bar: f64,
    pub refined_distance_to_w: f64,
}

pub fn formation_average_sampling(
    samples: usize,
    seed: u64,
    workers: usize,
    refine_steps: usize,
) -> Result<FormationSamplingReport> {
    if samples == 0 {
        return Err(Error::BadRange("need at least one sample".into()));
    }
    let e_bar = |psi: &PureState| Ok(residual_report(psi, PairMeasure::Formation)?.e_bar);
    let rows: Vec<(u64, f64)> = parallel_map(samples, workers, |i| {
        let s = trial_seed(seed, i as u64);
        let psi = random_pure_with(&[2, 2, 2], &mut rng_from_seed(s))?;
        Ok((s, e_bar(&psi)?))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let top = rows
        .iter()
        .fold((f64::NEG_INFINITY, 0), |a, &(s, v)| if v > a.0 { (v, s) } else { a });
    let argmax = random_pure_with(&[2, 2, 2], &mut rng_from_seed(top.1))?;
    let mut rng = rng_from_seed(trial_seed(seed, u64::MAX));
    let (refined, refined_e_bar) = hill_climb(&argmax, refine_steps, &mut rng, None, e_bar)?;
    Ok(FormationSamplingReport {
        samples,
        max_e_bar: top.0,
        max_e_bar_seed: top.1,
        w_e_bar: e_bar(&PureState::w())?,
        argmax_distance_to_w: distance_to_w(&argmax)?,
        refined_e_bar,
        refined_distance_to_w: distance_to_w(&refined)?,
    })
}

/// Random search for `N`-qubit states whose average squared pair
/// concurrence beats `W_N`'s `4/N²`. For `N = 3` none exists; from
/// `N = 4` on, pairs of Bell states already do better.
#[derive(Debug, Clone, Serialize)]
pub struct WnSearchReport {
    pub n: usize,
    pub samples: usize,
    pub wn_value: f64,
    pub best_value: f64,
    pub best_seed: u64,
    pub refined_value: f64,
    pub exceeded: bool,
}

pub fn wn_conjecture_search(
    n: usize,
    samples: usize,
    seed: u64,
    workers: usize,
    refine_steps: usize,
) -> Result<WnSearchReport> {
    check_wn(n)?;
    if samples == 0 {
        return Err(Error::BadRange("need at least one sample".into()));
    }
    let dims = vec![2; n];
    let rows: Vec<(u64, f64)> = parallel_map(samples, workers, |i| {
        let s = trial_seed(seed, i as u64);
        let psi = random_pure_with(&dims, &mut rng_from_seed(s))?;
        Ok((s, average_squared_concurrence(&psi)?))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let top = rows
        .iter()
        .fold((f64::NEG_INFINITY, 0), |a, &(s, v)| if v > a.0 { (v, s) } else { a });
    let start = random_pure_with(&dims, &mut rng_from_seed(top.1))?;
    let mut rng = rng_from_seed(trial_seed(seed, u64::MAX));
    let (_, refined_value) = hill_climb(&start, refine_steps, &mut rng, None, average_squared_concurrence)?;
    let wn_value = 4.0 / (n * n) as f64;
    Ok(WnSearchReport {
        n,
        samples,
        wn_value,
        best_value: top.0,
        best_seed: top.1,
        refined_value,
        exceeded: top.0.max(refined_value) > wn_value + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{state_from_ghz_params, state_from_w_params, WCanonicalParams};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn random_cube_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
        [rng.random(), rng.random(), rng.random()]
    }

    #[test]
    fn residual_of_named_states() {
        let r = residual_report(&PureState::w(), PairMeasure::Concurrence2).unwrap();
        assert_abs_diff_eq!(r.e_tau, 4.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.e_bar, 4.0 / 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.c2_min, 4.0 / 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.e_min, 4.0 / 9.0, epsilon = 1e-12);

        let r = residual_report(&PureState::ghz(), PairMeasure::Formation).unwrap();
        assert_abs_diff_eq!(r.e_tau, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.e_bar, 0.0, epsilon = 1e-15);

        let zero = PureState::basis(&[2, 2, 2], &[0, 0, 0]).unwrap();
        for m in [PairMeasure::Concurrence2, PairMeasure::Formation, PairMeasure::E2] {
            let r = residual_report(&zero, m).unwrap();
            assert_eq!([r.e_bar, r.e_min, r.e_tau, r.c2_min], [0.0; 4]);
        }
    }

    #[test]
    fn formation_average_of_w() {
        let r = residual_report(&PureState::w(), PairMeasure::Formation).unwrap();
        // E_f at C = 2/3
        let expect = ent_formation(2.0 / 3.0).unwrap();
        assert_abs_diff_eq!(r.e_bar, expect, epsilon = 1e-12);
    }

    #[test]
    fn ghz_closed_form_matches_numeric() {
        assert_abs_diff_eq!(etau_from_ghz_params(&GhzCanonicalParams::ghz()).unwrap(), 0.0, epsilon = 1e-15);
        let mut rng = rng_from_seed(41);
        for _ in 0..200 {
            let p = GhzCanonicalParams::random(&mut rng);
            let closed = etau_from_ghz_params(&p).unwrap();
            let numeric = e_tau_of(&state_from_ghz_params(&p).unwrap()).unwrap();
            assert_abs_diff_eq!(closed, numeric, epsilon = 1e-8);
        }
    }

    #[test]
    fn phase_maximum_dominates() {
        let mut rng = rng_from_seed(42);
        for _ in 0..200 {
            let p = GhzCanonicalParams::random(&mut rng);
            let top = GhzCanonicalParams::new(FRAC_PI_4, p.alpha, p.beta, p.gamma, PI).unwrap();
            let at_top = etau_from_ghz_params(&top).unwrap();
            assert!(etau_from_ghz_params(&p).unwrap() <= at_top + 1e-12);
            assert_abs_diff_eq!(at_top, etau_ghz_phase_maximum(p.alpha, p.beta, p.gamma), epsilon = 1e-9);
            assert!(at_top < 4.0 / 3.0);
        }
    }

    #[test]
    fn gap_polynomial_sign_matches_bound() {
        let mut rng = rng_from_seed(43);
        for _ in 0..1000 {
            let [x, y, z] = random_cube_point(&mut rng);
            let f = etau_gap_polynomial(x, y, z).unwrap();
            let e = etau_ghz_phase_maximum(x.acos(), y.acos(), z.acos());
            // f = 3(1−xyz)² (E − 4/3)
            assert_abs_diff_eq!(f, 3.0 * (1.0 - x * y * z).powi(2) * (e - 4.0 / 3.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn gap_polynomial_values() {
        assert_eq!(etau_gap_polynomial(0.0, 0.0, 0.0).unwrap(), -4.0);
        assert!(etau_gap_polynomial(1.0, 0.5, 0.5).is_err());
        assert!(etau_gap_polynomial(-0.1, 0.5, 0.5).is_err());
        for j in 0..50 {
            for k in 0..50 {
                let (y, z) = (j as f64 / 50.0, k as f64 / 50.0);
                let f = etau_gap_polynomial(0.0, y, z).unwrap();
                assert_abs_diff_eq!(f, 3.0 * (y * y + z * z) - 6.0 * y * y * z * z - 4.0, epsilon = 1e-14);
                assert!(f <= -1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn coarse_grid_is_negative() {
        let g = grid_max_etau_gap(41, 2).unwrap();
        assert!(g.max < 0.0);
        assert_eq!(g, grid_max_etau_gap(41, 1).unwrap());
        assert!(grid_max_etau_gap(0, 1).is_err());
    }

    #[test]
    fn w_class_closed_form() {
        let mut rng = rng_from_seed(44);
        for _ in 0..100 {
            let q = WCanonicalParams::random(&mut rng);
            let e = e_tau_of(&state_from_w_params(&q).unwrap()).unwrap();
            assert_abs_diff_eq!(e, q.e_tau(), epsilon = 1e-8);
        }
    }

    #[test]
    fn wn_pairs() {
        for n in 3..=8 {
            let c = wn_pair_concurrence(n).unwrap();
            assert_abs_diff_eq!(c, 2.0 / n as f64, epsilon = 1e-12);
            let c = wn_pair_concurrence_reduced(n, 0, n - 1).unwrap();
            assert_abs_diff_eq!(c, 2.0 / n as f64, epsilon = 1e-12);
        }
        let rho = wn_pair_state(4).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        let avg = average_squared_concurrence(&PureState::w_n(5).unwrap()).unwrap();
        assert_abs_diff_eq!(avg, 4.0 / 25.0, epsilon = 1e-12);
        assert!(matches!(wn_pair_state(2), Err(Error::BadPartyCount { .. })));
    }

    #[test]
    fn dimension_counts() {
        assert_eq!(class_count_lower_bound(&[2, 2, 2]).unwrap().lower_bound, -4);
        assert_eq!(class_count_lower_bound(&[2, 2, 2, 2]).unwrap().lower_bound, 6);
        let c = class_count_lower_bound(&[2, 2, 3]).unwrap();
        assert_eq!((c.state_params, c.group_params, c.lower_bound), (22, 28, -6));
        for n in 3..12 {
            let c = class_count_lower_bound(&vec![2; n]).unwrap();
            assert_eq!(c.lower_bound, 2 * ((1i128 << n) - 1) - 6 * n as i128);
        }
        assert!(class_count_lower_bound(&[2]).is_err());
        assert!(class_count_lower_bound(&[2, 1]).is_err());
    }

    #[test]
    fn sampling_reports_small() {
        let r = etau_haar_sampling(300, 5, 2, 300).unwrap();
        assert!(r.within_bounds(1e-9));
        assert!(r.refined_e_tau >= r.max_e_tau);
        let f = formation_average_sampling(100, 6, 2, 100).unwrap();
        assert!(f.refined_e_bar >= f.max_e_bar);
        let w = wn_conjecture_search(3, 50, 7, 2, 200).unwrap();
        assert!(!w.exceeded, "{w:?}");
        assert!(w.refined_value >= w.best_value);
    }

    #[test]
    fn two_bell_pairs_beat_w4_on_average() {
        // C²₁₂ = C²₃₄ = 1 and the other four pairs vanish: 2/6 > 4/16
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![re(h), C64::default(), C64::default(), re(h)];
        let amps: Vec<C64> = bell.iter().flat_map(|a| bell.iter().map(move |b| a * b)).collect();
        let pairs = PureState::from_amplitudes(&[2, 2, 2, 2], amps).unwrap();
        assert_abs_diff_eq!(average_squared_concurrence(&pairs).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        let wn = average_squared_concurrence(&PureState::w_n(4).unwrap()).unwrap();
        assert_abs_diff_eq!(wn, 0.25, epsilon = 1e-12);
        let r = wn_conjecture_search(4, 50, 3, 2, 600).unwrap();
        assert!(r.exceeded && r.refined_value > 0.3, "{r:?}");
    }

    #[test]
    fn hyperdeterminant_gives_the_tangle() {
        let mut rng = rng_from_seed(61);
        for _ in 0..50 {
            let psi = random_pure_with(&[2, 2, 2], &mut rng).unwrap();
            let tau = crate::measures::three_tangle(&psi).unwrap();
            assert_abs_diff_eq!(4.0 * hyperdeterminant(psi.amplitudes()).norm(), tau, epsilon = 1e-12);
            let flat = project_to_zero_tangle(psi.amplitudes().to_vec());
            let left = hyperdeterminant(&flat).norm();
            assert!(left < 1e-12, "{left:e}");
        }
    }

    #[test]
    fn refinement_reaches_w() {
        let r = etau_haar_sampling(200, 8, 2, 3000).unwrap();
        assert!(r.argmax_nearer_w());
        assert_abs_diff_eq!(r.refined_e_tau, 4.0 / 3.0, epsilon = 1e-6);
        assert!(r.refined_distance_to_w < 1e-3, "{r:?}");
    }
}
