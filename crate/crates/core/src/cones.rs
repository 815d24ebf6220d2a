//! Reachable-state regions under collisions with a thermal molecule.
//!
//! For a qubit the region is a cone in the Bloch cylinder coordinates
//! `(eta', z')`, shrinking toward the Gibbs point as collisions accumulate.
//! For a qutrit the population cone of a single collision is an interval box
//! with six extreme points, derived here for the β-ordering class V, with a
//! sampling fallback for the other classes. A partial-thermalization search
//! provides an inner bound on the corresponding memoryless-operation region
//! for comparison.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::collision::{BlockChannel, ChannelError};
use crate::spectra::{
    beta_ordering, gibbs, BathSpec, HamiltonianSpec, PopulationVector, SpectraError,
};

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("expected a qutrit population vector, got dimension {0}")]
    NotQutrit(usize),
    #[error("parameters give a negative block entry: {0}")]
    BadParams(String),
    #[error("state is in β-ordering class {found}, closed-form cone needs V")]
    WrongSubset { found: BetaSubset },
    #[error("extreme point {0} not reached by any permutation-block tuple")]
    ExtremeNotReached(usize),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Qubit state in cylinder coordinates: Bloch vector `(eta cos phi, eta sin phi, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub eta: f64,
    pub phi: f64,
    pub z: f64,
}

impl BlochState {
    pub fn new(eta: f64, phi: f64, z: f64) -> Result<Self, ConeError> {
        if !(eta >= 0.0 && eta.is_finite() && phi.is_finite() && z.abs() <= 1.0) {
            return Err(ConeError::BadParams(format!(
                "eta = {eta}, phi = {phi}, z = {z}"
            )));
        }
        if eta * eta + z * z > 1.0 + 1e-12 {
            return Err(ConeError::BadParams(format!(
                "Bloch vector norm {} exceeds 1",
                (eta * eta + z * z).sqrt()
            )));
        }
        Ok(Self { eta, phi, z })
    }
}

/// Effective collision unitary data for a qubit: the modulus of the
/// population-preserving amplitude, the combined relative phase, and the
/// number of collisions. All unitary phases fold into `alpha`; only the
/// modulus below affects the reachable region.
#[derive(Debug, Clone, Copy)]
pub struct QubitCollisionParams {
    pub u00_abs: f64,
    pub alpha: f64,
    pub n: u32,
}

/// Reachable `(z', eta')` region for a qubit after a fixed number of
/// collisions (`lower_scale = z_tau^n`) or under arbitrary thermal
/// operations (`lower_scale = 0`).
///
/// Admissible `z'` interpolate between `z` and the Gibbs component `z_tau`;
/// writing `t = (z' - z_tau)/(z - z_tau)`, the transverse magnitude obeys
/// `eta * lower_scale * sqrt(t) <= eta' <= eta * sqrt(t)`.
#[derive(Debug, Clone, Copy)]
pub struct QubitCone {
    pub eta: f64,
    pub z: f64,
    pub z_tau: f64,
    pub lower_scale: f64,
}

const DEGENERATE_Z_TOL: f64 = 1e-13;

impl QubitCone {
    /// Closed interval of admissible `z'`.
    pub fn z_interval(&self) -> (f64, f64) {
        (self.z.min(self.z_tau), self.z.max(self.z_tau))
    }

    fn ratio(&self, zp: f64) -> Option<f64> {
        if (self.z - self.z_tau).abs() <= DEGENERATE_Z_TOL {
            return ((zp - self.z_tau).abs() <= 1e-9).then_some(1.0);
        }
        let t = (zp - self.z_tau) / (self.z - self.z_tau);
        (-1e-12..=1.0 + 1e-12)
            .contains(&t)
            .then(|| t.clamp(0.0, 1.0))
    }

    /// `(eta'_min, eta'_max)` at the given `z'`, or `None` outside the cone.
    pub fn eta_bounds(&self, zp: f64) -> Option<(f64, f64)> {
        let t = self.ratio(zp)?;
        let hi = self.eta * t.sqrt();
        let lo = if (self.z - self.z_tau).abs() <= DEGENERATE_Z_TOL {
            // at z = z_tau every sub-unital shrink of eta is reachable
            0.0
        } else {
            hi * self.lower_scale
        };
        Some((lo, hi))
    }

    /// Whether `b` lies within sup-norm distance `tol` of the region.
    ///
    /// The transverse bounds are evaluated over the `tol`-window of `b.z`
    /// rather than at `b.z` alone: near `z_tau` the update `z' = z_tau +
    /// t (z - z_tau)` can round onto `z_tau` while `eta'` stays positive,
    /// and a slice at the rounded abscissa would eject that point even
    /// though it sits within one ulp of the region.
    pub fn contains(&self, b: &BlochState, tol: f64) -> bool {
        let (zlo, zhi) = self.z_interval();
        if b.z < zlo - tol || b.z > zhi + tol {
            return false;
        }
        let toward_z = tol.copysign(self.z - self.z_tau);
        let z_near = (b.z + toward_z).clamp(zlo, zhi);
        let z_far = (b.z - toward_z).clamp(zlo, zhi);
        let (_, hi) = self.eta_bounds(z_near).expect("clamped z' is admissible");
        let (lo, _) = self.eta_bounds(z_far).expect("clamped z' is admissible");
        b.eta >= lo - tol && b.eta <= hi + tol
    }

    /// `(z', eta'_min, eta'_max)` sampled on a uniform grid over the
    /// admissible `z'` interval.
    pub fn boundary_points(&self, samples: usize) -> Vec<(f64, f64, f64)> {
        assert!(samples >= 2);
        let (zlo, zhi) = self.z_interval();
        (0..samples)
            .map(|i| {
                let zp = if zhi == zlo {
                    self.z_tau
                } else {
                    zlo + (zhi - zlo) * i as f64 / (samples - 1) as f64
                };
                let (lo, hi) = self.eta_bounds(zp).expect("grid point is admissible");
                (zp, lo, hi)
            })
            .collect()
    }
}

fn z_gibbs(bath: &BathSpec) -> f64 {
    let q = bath.q();
    (1.0 - q) / (1.0 + q)
}

/// Reachable region after exactly `n` collisions.
pub fn qubit_cone(b: &BlochState, bath: &BathSpec, n: u32) -> QubitCone {
    assert!(n >= 1, "at least one collision");
    QubitCone {
        eta: b.eta,
        z: b.z,
        z_tau: z_gibbs(bath),
        lower_scale: z_gibbs(bath).powi(n as i32),
    }
}

/// Limit region of arbitrarily many collisions; also the full
/// thermal-operation cone for a qubit.
pub fn mto_qubit_cone(b: &BlochState, bath: &BathSpec) -> QubitCone {
    QubitCone {
        eta: b.eta,
        z: b.z,
        z_tau: z_gibbs(bath),
        lower_scale: 0.0,
    }
}

/// State after `n` identical collisions with effective parameters `params`.
pub fn qubit_collision_output(
    b: &BlochState,
    params: &QubitCollisionParams,
    bath: &BathSpec,
) -> BlochState {
    assert!(
        (0.0..=1.0).contains(&params.u00_abs),
        "|u00| must lie in [0, 1]"
    );
    let tau0 = 1.0 / (1.0 + bath.q());
    let z_tau = z_gibbs(bath);
    let n = params.n as i32;
    let zp = z_tau + params.u00_abs.powi(2 * n) * (b.z - z_tau);
    let w = Complex::new(
        1.0 - tau0 + tau0 * params.alpha.cos(),
        tau0 * params.alpha.sin(),
    );
    let etap = b.eta * params.u00_abs.powi(n) * w.norm().powi(n);
    BlochState {
        eta: etap,
        phi: b.phi + params.n as f64 * w.arg(),
        z: zp,
    }
}

/// β-ordering classes of a qutrit state: the permutation sorting
/// `p_j exp(beta E_j)` in decreasing order, one label per permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaSubset {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl std::fmt::Display for BetaSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BetaSubset::I => "I",
            BetaSubset::II => "II",
            BetaSubset::III => "III",
            BetaSubset::IV => "IV",
            BetaSubset::V => "V",
            BetaSubset::VI => "VI",
        };
        f.write_str(s)
    }
}

impl BetaSubset {
    pub fn ordering(&self) -> [usize; 3] {
        match self {
            BetaSubset::I => [0, 1, 2],
            BetaSubset::II => [2, 1, 0],
            BetaSubset::III => [1, 0, 2],
            BetaSubset::IV => [2, 0, 1],
            BetaSubset::V => [1, 2, 0],
            BetaSubset::VI => [0, 2, 1],
        }
    }
}

/// Which β-ordering class a qutrit state is in.
pub fn classify_beta_subset(
    p: &PopulationVector,
    bath: &BathSpec,
) -> Result<BetaSubset, ConeError> {
    if p.dim() != 3 {
        return Err(ConeError::NotQutrit(p.dim()));
    }
    let h = HamiltonianSpec::equally_spaced(3).expect("d = 3");
    let order = beta_ordering(p, &h, bath)?;
    let subset = [
        BetaSubset::I,
        BetaSubset::II,
        BetaSubset::III,
        BetaSubset::IV,
        BetaSubset::V,
        BetaSubset::VI,
    ]
    .into_iter()
    .find(|s| s.ordering() == order[..])
    .expect("every permutation of 3 elements has a label");
    Ok(subset)
}

/// Free parameters of a qutrit-molecule collision block structure: the
/// diagonal entries of the two 2x2 blocks and the first two rows of the
/// 3x3 resonance block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritParams {
    pub a1: f64,
    pub a2: f64,
    pub b2: f64,
    pub a2p: f64,
    pub b2p: f64,
    pub a3: f64,
}

impl QutritParams {
    pub const IDENTITY: Self = Self {
        a1: 1.0,
        a2: 1.0,
        b2: 0.0,
        a2p: 0.0,
        b2p: 1.0,
        a3: 1.0,
    };

    /// All nine entries of the middle block plus the 2x2 diagonals, which
    /// must lie in `[0, 1]` for the blocks to be doubly stochastic.
    fn entries(&self) -> [(f64, &'static str); 11] {
        let Self {
            a1,
            a2,
            b2,
            a2p,
            b2p,
            a3,
        } = *self;
        [
            (a1, "a1"),
            (a3, "a3"),
            (a2, "a2"),
            (b2, "b2"),
            (1.0 - a2 - b2, "1-a2-b2"),
            (a2p, "a2'"),
            (b2p, "b2'"),
            (1.0 - a2p - b2p, "1-a2'-b2'"),
            (1.0 - a2 - a2p, "1-a2-a2'"),
            (1.0 - b2 - b2p, "1-b2-b2'"),
            (a2 + b2 + a2p + b2p - 1.0, "a2+b2+a2'+b2'-1"),
        ]
    }

    pub fn validate(&self) -> Result<(), ConeError> {
        for (x, name) in self.entries() {
            if !(-1e-12..=1.0 + 1e-12).contains(&x) {
                return Err(ConeError::BadParams(format!("{name} = {x}")));
            }
        }
        Ok(())
    }

    /// The equivalent block channel on qutrit ⊗ qutrit.
    pub fn channel(&self) -> Result<BlockChannel, ConeError> {
        self.validate()?;
        let h = HamiltonianSpec::equally_spaced(3).expect("d = 3");
        let clamp = |x: f64| x.clamp(0.0, 1.0);
        let g1 = DMatrix::from_row_slice(2, 2, &[self.a1, 1.0 - self.a1, 1.0 - self.a1, self.a1]);
        let g2 = DMatrix::from_row_slice(
            3,
            3,
            &[
                clamp(self.a2),
                clamp(self.b2),
                clamp(1.0 - self.a2 - self.b2),
                clamp(self.a2p),
                clamp(self.b2p),
                clamp(1.0 - self.a2p - self.b2p),
                clamp(1.0 - self.a2 - self.a2p),
                clamp(1.0 - self.b2 - self.b2p),
                clamp(self.a2 + self.b2 + self.a2p + self.b2p - 1.0),
            ],
        );
        let g3 = DMatrix::from_row_slice(2, 2, &[self.a3, 1.0 - self.a3, 1.0 - self.a3, self.a3]);
        Ok(BlockChannel::from_blocks(
            &h,
            &h,
            vec![DMatrix::identity(1, 1), g1, g2, g3, DMatrix::identity(1, 1)],
        )?)
    }
}

/// Output populations of one parametrized collision on a qutrit.
pub fn qutrit_collision_output(
    p: &PopulationVector,
    params: &QutritParams,
    bath: &BathSpec,
) -> Result<PopulationVector, ConeError> {
    if p.dim() != 3 {
        return Err(ConeError::NotQutrit(p.dim()));
    }
    params.validate()?;
    let q = bath.q();
    let tau = gibbs(&HamiltonianSpec::equally_spaced(3).expect("d = 3"), bath);
    let d1 = tau[1] * p[0] - tau[0] * p[1];
    let d2 = tau[1] * p[1] - tau[0] * p[2];
    let QutritParams {
        a1,
        a2,
        b2,
        a2p,
        b2p,
        a3,
    } = *params;
    let p0 = tau[0] + (a1 + q * a2) * d1 + (a2 + b2) * d2;
    let p1 = tau[1] - (a1 - q * a2p) * d1 - (1.0 - a2p - b2p - q * a3) * d2;
    let p2 = tau[2] - q * (a2 + a2p) * d1 - (a2 + b2 + a2p + b2p - 1.0 + q * a3) * d2;
    Ok(PopulationVector::new(vec![p0, p1, p2])?)
}

/// Interval box with its six extreme points; `exact` marks the closed-form
/// class-V region as opposed to a sampled inner approximation.
#[derive(Debug, Clone)]
pub struct QutritCone {
    pub intervals: [(f64, f64); 3],
    pub extreme_points: [PopulationVector; 6],
    pub exact: bool,
}

impl QutritCone {
    pub fn contains(&self, p: &PopulationVector, tol: f64) -> bool {
        p.dim() == 3
            && self
                .intervals
                .iter()
                .enumerate()
                .all(|(j, &(lo, hi))| p[j] >= lo - tol && p[j] <= hi + tol)
    }
}

/// Single-collision population cone for a class-V qutrit state,
/// in closed form.
pub fn qutrit_cone_subset_v(
    p: &PopulationVector,
    bath: &BathSpec,
) -> Result<QutritCone, ConeError> {
    if p.dim() != 3 {
        return Err(ConeError::NotQutrit(p.dim()));
    }
    let tau = gibbs(&HamiltonianSpec::equally_spaced(3).expect("d = 3"), bath);
    let d11 = tau[1] * p[1] - tau[0] * p[2];
    let d20 = tau[0] * p[2] - tau[2] * p[0];
    let slack = 1e-12;
    if d11 < -slack || d20 < -slack {
        return Err(ConeError::WrongSubset {
            found: classify_beta_subset(p, bath)?,
        });
    }
    let d10 = d11 + d20;

    let p0_min = p[0];
    let p0_max = tau[0] + d11;
    let p1_min = tau[1] - d10;
    let p1_max = p[1];
    let p2_min = p[2] - d20;
    let p2_max = tau[2] + d10;

    let point = |a: f64, b: f64, c: f64| {
        PopulationVector::new(vec![a, b, c]).expect("extreme points are distributions")
    };
    let extreme_points = [
        point(p0_min, p1_max, 1.0 - p0_min - p1_max),
        point(p0_min, 1.0 - p0_min - p2_max, p2_max),
        point(1.0 - p1_min - p2_max, p1_min, p2_max),
        point(p0_max, p1_min, 1.0 - p0_max - p1_min),
        point(p0_max, 1.0 - p0_max - p2_min, p2_min),
        point(1.0 - p1_max - p2_min, p1_max, p2_min),
    ];
    Ok(QutritCone {
        intervals: [(p0_min, p0_max), (p1_min, p1_max), (p2_min, p2_max)],
        extreme_points,
        exact: true,
    })
}

/// The 24 tuples whose blocks are permutations: both 2x2 choices times the
/// six permutations of the resonance block.
fn permutation_tuples() -> Vec<QutritParams> {
    let g2_perms = [
        (1.0, 0.0, 0.0, 1.0),
        (0.0, 1.0, 1.0, 0.0),
        (0.0, 0.0, 0.0, 1.0),
        (1.0, 0.0, 0.0, 0.0),
        (0.0, 1.0, 0.0, 0.0),
        (0.0, 0.0, 1.0, 0.0),
    ];
    let mut tuples = Vec::with_capacity(24);
    for &a1 in &[1.0, 0.0] {
        for &(a2, b2, a2p, b2p) in &g2_perms {
            for &a3 in &[1.0, 0.0] {
                tuples.push(QutritParams {
                    a1,
                    a2,
                    b2,
                    a2p,
                    b2p,
                    a3,
                });
            }
        }
    }
    tuples
}

/// Parameter tuple realizing extreme point `which` (0..6) of the class-V cone.
pub fn extreme_point_params(
    p: &PopulationVector,
    bath: &BathSpec,
    which: usize,
) -> Result<QutritParams, ConeError> {
    assert!(which < 6, "six extreme points");
    let cone = qutrit_cone_subset_v(p, bath)?;
    let target = &cone.extreme_points[which];
    permutation_tuples()
        .into_iter()
        .find(|params| {
            qutrit_collision_output(p, params, bath)
                .map(|out| out.linf_distance(target) <= 1e-12)
                .unwrap_or(false)
        })
        .ok_or(ConeError::ExtremeNotReached(which))
}

/// Sampling fallback for states outside class V: interval hull and
/// per-coordinate extremizers over random admissible tuples plus the 24
/// permutation tuples.
pub fn qutrit_cone_sampled(
    p: &PopulationVector,
    bath: &BathSpec,
    samples: usize,
    seed: u64,
) -> Result<QutritCone, ConeError> {
    if p.dim() != 3 {
        return Err(ConeError::NotQutrit(p.dim()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut outputs: Vec<PopulationVector> = Vec::with_capacity(samples + 24);
    for params in permutation_tuples() {
        outputs.push(qutrit_collision_output(p, &params, bath)?);
    }
    for _ in 0..samples {
        let params = random_params(&mut rng);
        outputs.push(qutrit_collision_output(p, &params, bath)?);
    }

    let mut intervals = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    for out in &outputs {
        for j in 0..3 {
            intervals[j].0 = intervals[j].0.min(out[j]);
            intervals[j].1 = intervals[j].1.max(out[j]);
        }
    }
    let argext = |j: usize, max: bool| {
        outputs
            .iter()
            .cloned()
            .reduce(|best, cand| {
                let better = if max {
                    cand[j] > best[j]
                } else {
                    cand[j] < best[j]
                };
                if better {
                    cand
                } else {
                    best
                }
            })
            .expect("outputs non-empty")
    };
    let extreme_points = [
        argext(0, false),
        argext(2, true),
        argext(1, false),
        argext(0, true),
        argext(2, false),
        argext(1, true),
    ];
    Ok(QutritCone {
        intervals,
        extreme_points,
        exact: false,
    })
}

/// Random admissible tuple: a convex mixture of the permutation tuples.
pub fn random_params<R: Rng>(rng: &mut R) -> QutritParams {
    let tuples = permutation_tuples();
    let mut acc = QutritParams {
        a1: 0.0,
        a2: 0.0,
        b2: 0.0,
        a2p: 0.0,
        b2p: 0.0,
        a3: 0.0,
    };
    let weights: Vec<f64> = (0..tuples.len())
        .map(|_| -rng.random::<f64>().ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for (t, w) in tuples.iter().zip(&weights) {
        let w = w / total;
        acc.a1 += w * t.a1;
        acc.a2 += w * t.a2;
        acc.b2 += w * t.b2;
        acc.a2p += w * t.a2p;
        acc.b2p += w * t.b2p;
        acc.a3 += w * t.a3;
    }
    acc
}

/// Cone region in either representation, as consumed by the CLI dump.
#[derive(Debug, Clone)]
pub enum ConeRegion {
    Qubit(QubitCone),
    QutritPopulation(QutritCone),
}

impl ConeRegion {
    /// Tabular dump: interval bounds and extreme points (qutrit) or sampled
    /// boundary rows (qubit).
    pub fn to_table(&self, samples: usize) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        match self {
            ConeRegion::Qubit(cone) => {
                writeln!(out, "zp,eta_min,eta_max").unwrap();
                for (zp, lo, hi) in cone.boundary_points(samples.max(2)) {
                    writeln!(out, "{zp},{lo},{hi}").unwrap();
                }
            }
            ConeRegion::QutritPopulation(cone) => {
                writeln!(out, "coordinate,lower,upper").unwrap();
                for (j, (lo, hi)) in cone.intervals.iter().enumerate() {
                    writeln!(out, "p{j},{lo},{hi}").unwrap();
                }
                writeln!(out, "point,p0,p1,p2").unwrap();
                for (i, pt) in cone.extreme_points.iter().enumerate() {
                    writeln!(out, "A{i},{},{},{}", pt[0], pt[1], pt[2]).unwrap();
                }
            }
        }
        out
    }
}

/// One partial-thermalization step: pull the `(i, j)` pair populations a
/// fraction `lambda` toward their mutual Gibbs ratio.
pub fn partial_thermalize_pair(p: &mut [f64], i: usize, j: usize, lambda: f64, weights: &[f64]) {
    let s = p[i] + p[j];
    let target_i = s * weights[i] / (weights[i] + weights[j]);
    p[i] += lambda * (target_i - p[i]);
    p[j] = s - p[i];
}

const QUTRIT_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Inner bound on the qutrit thermal-operation population region: extreme
/// points (in the `(p0, p1)` projection) of everything reached by sequences
/// of at most `budget` two-level partial thermalizations.
///
/// The search mixes exhaustive full-strength sequences, seeded random
/// sequences, and greedy coordinate pushes; it is deterministic in `seed`.
pub fn mto_qutrit_inner_bound(
    p: &PopulationVector,
    bath: &BathSpec,
    budget: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<PopulationVector>, ConeError> {
    if p.dim() != 3 {
        return Err(ConeError::NotQutrit(p.dim()));
    }
    if budget == 0 {
        return Ok(vec![p.clone()]);
    }
    let weights: Vec<f64> = (0..3).map(|j| bath.weight(j as f64)).collect();
    let mut reached: Vec<[f64; 3]> = Vec::new();
    let start = [p[0], p[1], p[2]];
    reached.push(start);

    // all full-strength sequences up to a shallow depth
    let depth = budget.min(6);
    let mut frontier = vec![start];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * 3);
        for state in &frontier {
            for &(i, j) in &QUTRIT_PAIRS {
                let mut s = *state;
                partial_thermalize_pair(&mut s, i, j, 1.0, &weights);
                next.push(s);
            }
        }
        reached.extend_from_slice(&next);
        frontier = next;
    }

    // seeded random sequences with mixed strengths
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let len = rng.random_range(1..=budget);
        let mut s = start;
        for _ in 0..len {
            let (i, j) = QUTRIT_PAIRS[rng.random_range(0..3)];
            let lambda = if rng.random_bool(0.5) {
                1.0
            } else {
                rng.random::<f64>()
            };
            partial_thermalize_pair(&mut s, i, j, lambda, &weights);
        }
        reached.push(s);
    }

    // greedy pushes on each signed coordinate
    for j in 0..3 {
        for sign in [1.0, -1.0] {
            let mut s = start;
            for _ in 0..budget {
                let mut best = s;
                let mut best_val = sign * s[j];
                for &(a, b) in &QUTRIT_PAIRS {
                    for step in 1..=20 {
                        let mut cand = s;
                        partial_thermalize_pair(&mut cand, a, b, step as f64 / 20.0, &weights);
                        if sign * cand[j] > best_val {
                            best_val = sign * cand[j];
                            best = cand;
                        }
                    }
                }
                s = best;
                reached.push(s);
            }
        }
    }

    let projected: Vec<(f64, f64)> = reached.iter().map(|s| (s[0], s[1])).collect();
    let hull = convex_hull_2d(&projected);
    let vertices = hull
        .into_iter()
        .map(|(p0, p1)| {
            PopulationVector::new(vec![p0, p1, 1.0 - p0 - p1])
                .expect("partial thermalization preserves distributions")
        })
        .collect();
    Ok(vertices)
}

/// Convex hull of 2D points by monotone chain; vertices come back in
/// counter-clockwise order starting from the lexicographic minimum.
pub fn convex_hull_2d(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &pt in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], pt) <= 0.0 {
            lower.pop();
        }
        lower.push(pt);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &pt in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], pt) <= 0.0 {
            upper.pop();
        }
        upper.push(pt);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Whether `pt` lies in the convex hull (vertices in ccw order) within `tol`.
pub fn hull_contains(hull: &[(f64, f64)], pt: (f64, f64), tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => (pt.0 - hull[0].0).hypot(pt.1 - hull[0].1) <= tol,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let len2 = dx * dx + dy * dy;
            let t = (((pt.0 - a.0) * dx + (pt.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
            let (px, py) = (a.0 + t * dx, a.1 + t * dy);
            (pt.0 - px).hypot(pt.1 - py) <= tol
        }
        _ => (0..hull.len()).all(|i| {
            let a = hull[i];
            let b = hull[(i + 1) % hull.len()];
            (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0) >= -tol
        }),
    }
}
