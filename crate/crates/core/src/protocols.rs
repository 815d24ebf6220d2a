//! Multi-round cooling protocols built from a repeating "recharge + collide"
//! cycle.
//!
//! One round acts on a controlled register (either the system alone, or the
//! system together with a small machine register): first a permutation
//! `recharge` re-sorts the register populations, then a single thermalizing
//! collision with a fresh Gibbs molecule is applied. Because both stages are
//! linear in the populations, a round is a column-stochastic matrix, and the
//! protocol's long-run behaviour is the fixed-point structure of that matrix.
//!
//! The module provides:
//! - [`RoundSpec`], the description of one round, plus ready-made builders
//!   for the ladder pump with a qutrit molecule ([`build_protocol_i_qutrit`]),
//!   the paired-level pump for wider molecules ([`build_protocol_i_general`]),
//!   and two machine-assisted variants ([`build_protocol_ii_efficiency`],
//!   [`build_protocol_ii_cooling_limit`]);
//! - [`round_matrix`], [`fixed_point`], [`trajectory`], [`parity_limits`]
//!   for exact analysis of a round;
//! - [`cooling_limit`], the closed-form asymptotic ground population of the
//!   pump protocols, and [`single_round_optima`], the best single-round
//!   ground boost and its work cost for both protocol families.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::collision::{
    apply_collision, decompose_subspaces, BlockChannel, ChannelError, DEGENERACY_TOL,
};
use crate::spectra::{
    composite_of, gibbs, BathSpec, HamiltonianSpec, PopulationVector, SpectraError,
};

/// Tolerance for column sums and entry positivity of a round matrix.
pub const ROUND_STOCHASTIC_TOL: f64 = 1e-12;

/// Residual tolerance accepted when solving for a fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("bad protocol dimensions: {0}")]
    BadDimensions(String),
    #[error("{0:?} is not a permutation position map")]
    NotPermutation(Vec<usize>),
    #[error("matrix is not column-stochastic: {0}")]
    NotStochastic(String),
    #[error("round matrix has a {fixed_space}-dimensional fixed space; no unique fixed point")]
    Reducible { fixed_space: usize },
    #[error("unsupported protocol configuration: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

/// A permutation of register levels, stored as a position map with the same
/// convention as permutation collision blocks: `map[target] = source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(dim: usize) -> Self {
        Self {
            map: (0..dim).collect(),
        }
    }

    /// Builds a permutation from a `map[target] = source` table, rejecting
    /// anything that is not a bijection.
    pub fn from_map(map: Vec<usize>) -> Result<Self, ProtocolError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &s in &map {
            if s >= n || std::mem::replace(&mut seen[s], true) {
                return Err(ProtocolError::NotPermutation(map));
            }
        }
        Ok(Self { map })
    }

    /// Composes disjoint transpositions on `0..dim`.
    pub fn from_swaps(dim: usize, swaps: &[(usize, usize)]) -> Result<Self, ProtocolError> {
        let mut map: Vec<usize> = (0..dim).collect();
        for &(a, b) in swaps {
            if a >= dim || b >= dim || a == b || map[a] != a || map[b] != b {
                return Err(ProtocolError::NotPermutation(map));
            }
            map.swap(a, b);
        }
        Ok(Self { map })
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    /// The underlying `map[target] = source` table.
    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply_slice(&self, input: &[f64]) -> Vec<f64> {
        assert_eq!(input.len(), self.map.len(), "dimension mismatch");
        self.map.iter().map(|&s| input[s]).collect()
    }

    pub fn apply(&self, p: &PopulationVector) -> PopulationVector {
        PopulationVector::new(self.apply_slice(p.as_slice()))
            .expect("permuting a distribution yields a distribution")
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.map.len();
        let mut m = DMatrix::zeros(n, n);
        for (target, &source) in self.map.iter().enumerate() {
            m[(target, source)] = 1.0;
        }
        m
    }
}

// ---------------------------------------------------------------------------
// Round specification
// ---------------------------------------------------------------------------

/// One protocol round: permute the controlled register, then collide it with
/// a fresh Gibbs molecule.
///
/// `controlled` is the register the round acts on. For machine-free
/// protocols it equals `system` and `machine` is `None`; for machine-assisted
/// protocols it is the system-major composite of `system` and `machine`
/// (controlled index `i = s * d_M + m`).
#[derive(Debug, Clone)]
pub struct RoundSpec {
    pub label: String,
    pub system: HamiltonianSpec,
    pub machine: Option<HamiltonianSpec>,
    pub controlled: HamiltonianSpec,
    pub molecule: HamiltonianSpec,
    pub recharge: Permutation,
    pub thermalize: BlockChannel,
}

impl RoundSpec {
    pub fn machine_dim(&self) -> usize {
        self.machine.as_ref().map_or(1, HamiltonianSpec::dim)
    }

    /// Traces out the machine register (a no-op when there is none).
    pub fn system_marginal(&self, p: &PopulationVector) -> PopulationVector {
        let md = self.machine_dim();
        assert_eq!(p.dim(), self.controlled.dim(), "dimension mismatch");
        let sums: Vec<f64> = p
            .as_slice()
            .chunks(md)
            .map(|chunk| chunk.iter().sum())
            .collect();
        PopulationVector::new(sums).expect("marginal of a distribution is a distribution")
    }
}

// ---------------------------------------------------------------------------
// Round matrices
// ---------------------------------------------------------------------------

/// The column-stochastic population action of one protocol round.
#[derive(Debug, Clone)]
pub struct RoundMatrix {
    g: DMatrix<f64>,
}

impl RoundMatrix {
    pub fn new(g: DMatrix<f64>) -> Result<Self, ProtocolError> {
        if !g.is_square() || g.nrows() == 0 {
            return Err(ProtocolError::NotStochastic(format!(
                "expected a non-empty square matrix, got {}x{}",
                g.nrows(),
                g.ncols()
            )));
        }
        for j in 0..g.ncols() {
            let mut sum = 0.0;
            for i in 0..g.nrows() {
                if g[(i, j)] < -ROUND_STOCHASTIC_TOL {
                    return Err(ProtocolError::NotStochastic(format!(
                        "entry ({i},{j}) = {} is negative",
                        g[(i, j)]
                    )));
                }
                sum += g[(i, j)];
            }
            if (sum - 1.0).abs() > ROUND_STOCHASTIC_TOL {
                return Err(ProtocolError::NotStochastic(format!(
                    "column {j} sums to {sum}"
                )));
            }
        }
        Ok(Self { g })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.g[(row, col)]
    }

    pub fn apply(&self, p: &PopulationVector) -> PopulationVector {
        let v = DVector::from_column_slice(p.as_slice());
        let out = &self.g * v;
        PopulationVector::new(out.iter().copied().collect())
            .expect("a stochastic matrix preserves distributions")
    }

    /// Modulus of the second-largest eigenvalue: the asymptotic per-round
    /// contraction rate towards the fixed point.
    pub fn slem(&self) -> f64 {
        let mut moduli: Vec<f64> = self
            .g
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect();
        moduli.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        if moduli.len() > 1 {
            moduli[1]
        } else {
            0.0
        }
    }
}

/// Assembles the round matrix of `spec` column by column: column `k` is the
/// output of recharge-then-collide applied to the point mass on level `k`.
pub fn round_matrix(spec: &RoundSpec, bath: &BathSpec) -> Result<RoundMatrix, ProtocolError> {
    let d = spec.controlled.dim();
    let mut g = DMatrix::zeros(d, d);
    for col in 0..d {
        let start = PopulationVector::point_mass(d, col);
        let recharged = spec.recharge.apply(&start);
        let out = apply_collision(&spec.thermalize, &recharged, bath)?;
        for row in 0..d {
            g[(row, col)] = out[row];
        }
    }
    RoundMatrix::new(g)
}

/// Solves `G p = p`, `sum(p) = 1` directly.
///
/// Fails with [`ProtocolError::Reducible`] when the fixed space is not
/// one-dimensional (the reported dimension comes from a singular-value rank
/// estimate of `G - I`).
pub fn fixed_point(g: &RoundMatrix) -> Result<PopulationVector, ProtocolError> {
    let p = unique_fixed_point(g.matrix())?;
    Ok(PopulationVector::new(p).expect("verified fixed point is a distribution"))
}

fn unique_fixed_point(g: &DMatrix<f64>) -> Result<Vec<f64>, ProtocolError> {
    let d = g.nrows();
    let reducible = || {
        let shifted = g - DMatrix::<f64>::identity(d, d);
        let rank = shifted.svd(false, false).rank(1e-10);
        ProtocolError::Reducible {
            fixed_space: d - rank,
        }
    };

    // (G - I) with the last (redundant) row replaced by the normalization.
    let mut a = g - DMatrix::<f64>::identity(d, d);
    for j in 0..d {
        a[(d - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(d);
    b[d - 1] = 1.0;
    let x = a.lu().solve(&b).ok_or_else(reducible)?;

    let gx = g * &x;
    let residual = (&gx - &x).amax();
    let min = x.min();
    if residual > FIXED_POINT_TOL || min < -1e-9 {
        return Err(reducible());
    }
    Ok(x.iter().map(|&v| v.max(0.0)).collect())
}

/// Rounds `p0` forward `rounds` times, returning all `rounds + 1` states
/// (the initial one included).
pub fn trajectory(
    spec: &RoundSpec,
    p0: &PopulationVector,
    bath: &BathSpec,
    rounds: usize,
) -> Result<Vec<PopulationVector>, ProtocolError> {
    let g = round_matrix(spec, bath)?;
    let mut out = Vec::with_capacity(rounds + 1);
    out.push(p0.clone());
    for _ in 0..rounds {
        let next = g.apply(out.last().expect("non-empty"));
        out.push(next);
    }
    Ok(out)
}

/// Long-run even- and odd-round limits of the protocol started from `p0`.
///
/// A round matrix with period two (the machine-assisted efficiency variant,
/// for example) never converges as-is; its square does. This splits the
/// levels into the closed communicating classes of `G^2`, solves for the
/// fixed point of each class, mixes them with the weight `p0` places on each
/// class, and returns `(lim G^{2k} p0, lim G^{2k+1} p0)`. Aperiodic
/// irreducible rounds degenerate to a single class, making both limits the
/// unique fixed point. Configurations with transient levels are rejected.
pub fn parity_limits(
    spec: &RoundSpec,
    p0: &PopulationVector,
    bath: &BathSpec,
) -> Result<(PopulationVector, PopulationVector), ProtocolError> {
    let g = round_matrix(spec, bath)?;
    let d = g.dim();
    assert_eq!(p0.dim(), d, "dimension mismatch");
    let g2 = g.matrix() * g.matrix();

    // Forward-reachable sets over the support graph of G^2 (edge j -> i
    // whenever level i receives weight from level j in one double round).
    let support_tol = 1e-12;
    let mut reach: Vec<Vec<bool>> = Vec::with_capacity(d);
    for start in 0..d {
        let mut seen = vec![false; d];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(j) = stack.pop() {
            for i in 0..d {
                if !seen[i] && g2[(i, j)] > support_tol {
                    seen[i] = true;
                    stack.push(i);
                }
            }
        }
        reach.push(seen);
    }

    // A level is recurrent iff every level it reaches can reach it back.
    let mut class_of = vec![usize::MAX; d];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..d {
        if class_of[i] != usize::MAX {
            continue;
        }
        let recurrent = (0..d).all(|j| !reach[i][j] || reach[j][i]);
        if !recurrent {
            return Err(ProtocolError::Unsupported(format!(
                "level {i} is transient under the doubled round; \
                 parity limits depend on the full transient decay"
            )));
        }
        let members: Vec<usize> = (0..d).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &members {
            class_of[j] = classes.len();
        }
        classes.push(members);
    }

    // Per-class fixed point of G^2, mixed with the initial class weights.
    let mut even = vec![0.0; d];
    for members in &classes {
        let n = members.len();
        let mut block = DMatrix::zeros(n, n);
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate() {
                block[(a, b)] = g2[(i, j)];
            }
        }
        let pi = unique_fixed_point(&block)?;
        let weight: f64 = members.iter().map(|&i| p0[i]).sum();
        for (a, &i) in members.iter().enumerate() {
            even[i] = weight * pi[a];
        }
    }
    let even = PopulationVector::new(even).expect("class fixed points mix into a distribution");
    let odd = g.apply(&even);
    Ok((even, odd))
}

// ---------------------------------------------------------------------------
// Pump protocols (molecule-only control)
// ---------------------------------------------------------------------------

/// Ladder pump on an equally spaced `d_S`-level system with a qutrit
/// molecule.
///
/// The recharge permutation swaps the two upper levels of each consecutive
/// level triple; the collision then moves one molecule gap of population
/// downward in every three-fold degenerate joint subspace. Repeating the
/// round funnels population to the ground level, with fixed point
/// proportional to `(1, q^2, q^4, ...)`.
pub fn build_protocol_i_qutrit(ds: usize) -> Result<RoundSpec, ProtocolError> {
    if ds < 3 {
        return Err(ProtocolError::BadDimensions(format!(
            "ladder pump needs a system of dimension >= 3, got {ds}"
        )));
    }
    let system = HamiltonianSpec::equally_spaced(ds)?;
    let molecule = HamiltonianSpec::equally_spaced(3)?;

    // Joint subspaces come out ordered by total energy m = 0..=ds+1, with
    // bases sorted by ascending system level:
    //   m = 0 and m = ds+1 are singletons, m = 1 and m = ds are pairs,
    //   everything between is a triple { (m-2,2), (m-1,1), (m,0) }.
    let identity = |n: usize| (0..n).collect::<Vec<usize>>();
    let flip = vec![1, 0];
    let cycle_down = vec![2, 0, 1]; // triple: bottom slot refilled from the top
    let cycle_up = vec![1, 2, 0]; // triple: inverse cycle

    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(ds + 2);
    perms.push(vec![0]);
    for m in 1..=ds {
        let boundary = m == 1 || m == ds;
        let perm = if (ds % 3 == 2 && (m == 1 || m == ds)) || (ds.is_multiple_of(3) && m == ds) {
            flip.clone()
        } else {
            match m % 3 {
                1 if boundary => identity(2),
                _ if boundary => identity(2),
                1 => {
                    if ds % 3 == 2 {
                        cycle_down.clone()
                    } else {
                        identity(3)
                    }
                }
                2 => {
                    if ds % 3 == 2 {
                        cycle_up.clone()
                    } else {
                        cycle_down.clone()
                    }
                }
                _ => {
                    if ds % 3 == 2 {
                        identity(3)
                    } else {
                        cycle_up.clone()
                    }
                }
            }
        };
        perms.push(perm);
    }
    perms.push(vec![0]);

    let thermalize = BlockChannel::permutation_blocks(&system, &molecule, perms)?;

    let mut swaps: Vec<(usize, usize)> = Vec::new();
    match ds % 3 {
        0 | 1 => {
            for t in 0..ds / 3 {
                swaps.push((3 * t + 1, 3 * t + 2));
            }
        }
        _ => {
            swaps.push((0, 1));
            for t in 0..(ds - 2) / 3 {
                swaps.push((3 * t + 3, 3 * t + 4));
            }
        }
    }
    let recharge = Permutation::from_swaps(ds, &swaps)?;

    Ok(RoundSpec {
        label: format!("ladder pump d_S={ds} d_r=3"),
        controlled: system.clone(),
        system,
        machine: None,
        molecule,
        recharge,
        thermalize,
    })
}

/// Collision target of joint label `(k, j)` for the paired-level pump with a
/// `d_r >= 4` molecule (`k` system level, `j` molecule level). Every move
/// stays inside the joint energy subspace `k + j`.
fn paired_pump_target(ds: usize, dr: usize, k: usize, j: usize) -> (usize, usize) {
    debug_assert!(dr >= 4 && ds >= dr && k < ds && j < dr);
    if k == 0 {
        if j == 0 {
            (0, 0)
        } else if j + 1 == dr {
            (2, dr - 3)
        } else {
            (1, j - 1)
        }
    } else if k == 1 {
        if j + 1 == dr {
            (1, j)
        } else {
            (0, j + 1)
        }
    } else if k % 2 == 1 {
        if j + 4 == dr {
            (k - 2, dr - 2)
        } else if j + 1 == dr {
            (k, j)
        } else {
            (k - 1, j + 1)
        }
    } else if k + 1 == ds {
        // Top level of an odd-dimensional system: only one slot drains.
        if j + 3 == dr {
            (k - 1, dr - 2)
        } else {
            (k, j)
        }
    } else if k + 2 == ds {
        // Top pair of an even-dimensional system: everything movable rises.
        if j == 0 {
            (k, 0)
        } else {
            (k + 1, j - 1)
        }
    } else {
        if j == 0 {
            (k, 0)
        } else if j + 1 == dr {
            (k + 2, dr - 3)
        } else {
            (k + 1, j - 1)
        }
    }
}

/// Paired-level pump: system levels are swapped in adjacent pairs, and a
/// molecule with `4 <= d_r <= d_S` levels shuttles population between pairs.
///
/// The asymptotic ground population beats the qutrit ladder pump; pair
/// ratios of the fixed point are `q^{d_r - 1}` inside a pair and `q^3`
/// between pairs.
pub fn build_protocol_i_general(ds: usize, dr: usize) -> Result<RoundSpec, ProtocolError> {
    if dr < 4 || dr > ds {
        return Err(ProtocolError::BadDimensions(format!(
            "paired-level pump needs 4 <= d_r <= d_S, got d_S={ds}, d_r={dr}"
        )));
    }
    let system = HamiltonianSpec::equally_spaced(ds)?;
    let molecule = HamiltonianSpec::equally_spaced(dr)?;

    let subspaces = decompose_subspaces(&system, &molecule, DEGENERACY_TOL);
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(subspaces.len());
    for sub in &subspaces {
        let n = sub.basis.len();
        let mut perm = vec![usize::MAX; n];
        for (source_slot, &(k, j)) in sub.basis.iter().enumerate() {
            let target = paired_pump_target(ds, dr, k, j);
            let target_slot = sub
                .basis
                .iter()
                .position(|&label| label == target)
                .expect("collision targets stay inside their energy subspace");
            assert_eq!(
                perm[target_slot],
                usize::MAX,
                "collision rule must be injective on each subspace"
            );
            perm[target_slot] = source_slot;
        }
        perms.push(perm);
    }
    let thermalize = BlockChannel::permutation_blocks(&system, &molecule, perms)?;

    let swaps: Vec<(usize, usize)> = (0..ds / 2).map(|t| (2 * t, 2 * t + 1)).collect();
    let recharge = Permutation::from_swaps(ds, &swaps)?;

    Ok(RoundSpec {
        label: format!("paired-level pump d_S={ds} d_r={dr}"),
        controlled: system.clone(),
        system,
        machine: None,
        molecule,
        recharge,
        thermalize,
    })
}

/// Closed-form asymptotic ground population of the pump protocols:
/// `d_r = 3` selects the ladder pump, `d_r >= 4` the paired-level pump.
pub fn cooling_limit(ds: usize, dr: usize, bath: &BathSpec) -> Result<f64, ProtocolError> {
    if dr < 3 || dr > ds {
        return Err(ProtocolError::Unsupported(format!(
            "no pump protocol for d_S={ds}, d_r={dr}; need 3 <= d_r <= d_S"
        )));
    }
    let q = bath.q();
    if dr == 3 {
        return Ok((1.0 - q.powi(2)) / (1.0 - q.powi(2 * ds as i32)));
    }
    let step = q.powi(dr as i32 + 2); // weight ratio between adjacent level pairs
    let inner = q.powi(dr as i32 - 1); // weight ratio inside a pair
    let k = ds / 2;
    let paired = (1.0 + inner) * (1.0 - step.powi(k as i32)) / (1.0 - step);
    if ds.is_multiple_of(2) {
        Ok(1.0 / paired)
    } else {
        let top = step.powi(k as i32) / q; // lone top level: q^{(dr+2)k - 1}
        Ok(1.0 / (paired + top))
    }
}

// ---------------------------------------------------------------------------
// Machine-assisted protocols (system + qubit machine)
// ---------------------------------------------------------------------------

/// Builds the shared scaffolding of the machine-assisted variants: a qutrit
/// system tensored with a qubit machine (system-major order, levels
/// 0,1,1,2,2,3), recharged by a machine flip and collided with a qutrit
/// molecule using the given per-subspace permutations.
fn build_machine_assisted(label: &str, perms: Vec<Vec<usize>>) -> Result<RoundSpec, ProtocolError> {
    let system = HamiltonianSpec::equally_spaced(3)?;
    let machine = HamiltonianSpec::qubit();
    let composite = composite_of(&[&system, &machine])?;
    for (i, lbl) in composite.labels().iter().enumerate() {
        assert_eq!(
            lbl.as_slice(),
            &[i / 2, i % 2],
            "composite register must come out system-major"
        );
    }
    let controlled = composite.spec().clone();
    let molecule = HamiltonianSpec::equally_spaced(3)?;
    let thermalize = BlockChannel::permutation_blocks(&controlled, &molecule, perms)?;
    let recharge = Permutation::from_swaps(6, &[(0, 1), (2, 3), (4, 5)])?;
    Ok(RoundSpec {
        label: label.to_string(),
        system,
        machine: Some(machine),
        controlled,
        molecule,
        recharge,
        thermalize,
    })
}

/// Machine-assisted variant tuned for work efficiency.
///
/// The collision swaps exactly one degenerate pair in each of the two
/// five-fold joint subspaces. The round matrix has period two; see
/// [`parity_limits`] for its long-run behaviour (both parity limits share
/// the system marginal `tau(H_S, 2*beta)`).
pub fn build_protocol_ii_efficiency() -> Result<RoundSpec, ProtocolError> {
    // Joint subspaces of the 6-level register with a qutrit molecule have
    // sizes 1,3,5,5,3,1; bases ascend in register level.
    build_machine_assisted(
        "machine-assisted pump, efficiency variant",
        vec![
            vec![0],
            vec![0, 1, 2],
            vec![3, 1, 2, 0, 4],
            vec![0, 4, 2, 3, 1],
            vec![0, 1, 2],
            vec![0],
        ],
    )
}

/// Machine-assisted variant tuned for the lowest asymptotic temperature.
///
/// The collision cycles population downward in every joint subspace; the
/// register fixed point is proportional to `(1, q^2, q^4, ..., q^10)`, so
/// the system marginal thermalizes to inverse temperature `4*beta`.
pub fn build_protocol_ii_cooling_limit() -> Result<RoundSpec, ProtocolError> {
    build_machine_assisted(
        "machine-assisted pump, cooling variant",
        vec![
            vec![0],
            vec![1, 0, 2],
            vec![1, 3, 0, 2, 4],
            vec![0, 2, 4, 1, 3],
            vec![0, 2, 1],
            vec![0],
        ],
    )
}

// ---------------------------------------------------------------------------
// Single-round optima
// ---------------------------------------------------------------------------

/// Best ground-population boost achievable in one round from the system
/// Gibbs state, with the work each realization costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleRoundOptima {
    /// Optimal ground population after one pump round (qutrit system and
    /// molecule, recharge chosen freely).
    pub p1_star_i: f64,
    /// Optimal ground population after one machine-assisted round; equal to
    /// `p1_star_i` — the qubit machine buys no extra cooling in one round.
    pub p1_star_ii: f64,
    /// Work cost of the cheapest pump recharge attaining `p1_star_i`.
    pub w1_i: f64,
    /// Work cost of the machine-assisted recharge attaining `p1_star_ii`;
    /// always below `w1_i`.
    pub w1_ii: f64,
}

/// Single-round optima for a qutrit system at the given bath.
///
/// Both protocol families reach the same optimal ground population
/// `tau_0 + tau_0 (tau_1 - tau_2)`, but the machine-assisted round pays
/// less work: `E (tau_0 - tau_1) q / (1 + q)` against `q E (tau_0 - tau_1)`
/// for the bare pump.
pub fn single_round_optima(bath: &BathSpec) -> SingleRoundOptima {
    let q = bath.q();
    let energy = bath.gap();
    let h3 = HamiltonianSpec::equally_spaced(3).expect("qutrit spectrum is valid");
    let tau = gibbs(&h3, bath);

    let p1_star_i = tau[0] + tau[0] * (tau[1] - tau[2]);
    let p1_star_ii = p1_star_i;
    let w1_i = q * energy * (tau[0] - tau[1]);
    let w1_ii = energy * (tau[0] - tau[1]) * q / (1.0 + q);

    debug_assert!(w1_ii < w1_i);
    debug_assert!(p1_star_ii <= 1.0 / (1.0 + q.powi(3) + q.powi(6)) + 1e-12);
    SingleRoundOptima {
        p1_star_i,
        p1_star_ii,
        w1_i,
        w1_ii,
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
