//! Energy-preserving collision channels at the population level.
//!
//! A collision couples the system to a fresh Gibbs molecule and applies a
//! joint-energy-conserving unitary. On populations this acts as one
//! doubly-stochastic block per degenerate subspace of `H_S + H_r`; blocks are
//! all the structure the protocols and bounds downstream need.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::spectra::{gibbs, BathSpec, HamiltonianSpec, PopulationVector, SpectraError};

/// Default energy tolerance for merging joint levels into one subspace.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Largest subspace size for which a witness permutation is constructed by
/// the optimal-collision search.
pub const SUBSPACE_CAP: usize = 8;

/// Tolerance on block row/column sums.
pub const STOCHASTIC_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("population has dimension {got}, channel system has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("block {index} is malformed: {reason}")]
    MalformedBlock { index: usize, reason: String },
    #[error("expected {expected} blocks, got {got}")]
    BlockCountMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// One degenerate subspace of the joint spectrum: its energy and the joint
/// labels `(k, j)` it contains, in ascending lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceIndex {
    pub energy: f64,
    pub basis: Vec<(usize, usize)>,
}

/// Groups all `d_S * d_r` joint labels by total energy, merging energies
/// within `degeneracy_tol`. Subspaces come out ordered by energy.
pub fn decompose_subspaces(
    hs: &HamiltonianSpec,
    hr: &HamiltonianSpec,
    degeneracy_tol: f64,
) -> Vec<SubspaceIndex> {
    assert!(
        degeneracy_tol > 0.0,
        "degeneracy tolerance must be positive"
    );
    let mut labels: Vec<(f64, (usize, usize))> = Vec::with_capacity(hs.dim() * hr.dim());
    for k in 0..hs.dim() {
        for j in 0..hr.dim() {
            labels.push((hs.level(k) + hr.level(j), (k, j)));
        }
    }
    labels.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite energies")
            .then(a.1.cmp(&b.1))
    });

    let mut subspaces: Vec<SubspaceIndex> = Vec::new();
    for (energy, label) in labels {
        match subspaces.last_mut() {
            Some(s) if (energy - s.energy).abs() <= degeneracy_tol => s.basis.push(label),
            _ => subspaces.push(SubspaceIndex {
                energy,
                basis: vec![label],
            }),
        }
    }
    subspaces
}

/// Population action of an energy-preserving collision unitary: one
/// doubly-stochastic block per joint-energy subspace.
#[derive(Debug, Clone)]
pub struct BlockChannel {
    hs: HamiltonianSpec,
    hr: HamiltonianSpec,
    subspaces: Vec<SubspaceIndex>,
    blocks: Vec<DMatrix<f64>>,
}

impl BlockChannel {
    /// Channel that leaves every subspace untouched.
    pub fn identity(hs: &HamiltonianSpec, hr: &HamiltonianSpec) -> Self {
        let subspaces = decompose_subspaces(hs, hr, DEGENERACY_TOL);
        let blocks = subspaces
            .iter()
            .map(|s| DMatrix::identity(s.basis.len(), s.basis.len()))
            .collect();
        Self {
            hs: hs.clone(),
            hr: hr.clone(),
            subspaces,
            blocks,
        }
    }

    /// Builds a channel from explicit blocks, one per subspace in energy order.
    pub fn from_blocks(
        hs: &HamiltonianSpec,
        hr: &HamiltonianSpec,
        blocks: Vec<DMatrix<f64>>,
    ) -> Result<Self, ChannelError> {
        let subspaces = decompose_subspaces(hs, hr, DEGENERACY_TOL);
        if blocks.len() != subspaces.len() {
            return Err(ChannelError::BlockCountMismatch {
                expected: subspaces.len(),
                got: blocks.len(),
            });
        }
        for (i, (block, sub)) in blocks.iter().zip(&subspaces).enumerate() {
            check_block(block, sub.basis.len())
                .map_err(|reason| ChannelError::MalformedBlock { index: i, reason })?;
        }
        Ok(Self {
            hs: hs.clone(),
            hr: hr.clone(),
            subspaces,
            blocks,
        })
    }

    /// Builds a channel whose blocks are permutations, given per subspace as
    /// `perm[target] = source` position maps.
    pub fn permutation_blocks(
        hs: &HamiltonianSpec,
        hr: &HamiltonianSpec,
        perms: Vec<Vec<usize>>,
    ) -> Result<Self, ChannelError> {
        let subspaces = decompose_subspaces(hs, hr, DEGENERACY_TOL);
        if perms.len() != subspaces.len() {
            return Err(ChannelError::BlockCountMismatch {
                expected: subspaces.len(),
                got: perms.len(),
            });
        }
        let mut blocks = Vec::with_capacity(perms.len());
        for (i, (perm, sub)) in perms.iter().zip(&subspaces).enumerate() {
            let n = sub.basis.len();
            let mut seen = vec![false; n];
            if perm.len() != n
                || perm
                    .iter()
                    .any(|&s| s >= n || std::mem::replace(&mut seen[s], true))
            {
                return Err(ChannelError::MalformedBlock {
                    index: i,
                    reason: format!("{perm:?} is not a permutation of 0..{n}"),
                });
            }
            let mut block = DMatrix::zeros(n, n);
            for (target, &source) in perm.iter().enumerate() {
                block[(target, source)] = 1.0;
            }
            blocks.push(block);
        }
        Ok(Self {
            hs: hs.clone(),
            hr: hr.clone(),
            subspaces,
            blocks,
        })
    }

    pub fn system(&self) -> &HamiltonianSpec {
        &self.hs
    }

    pub fn molecule(&self) -> &HamiltonianSpec {
        &self.hr
    }

    pub fn subspaces(&self) -> &[SubspaceIndex] {
        &self.subspaces
    }

    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    /// Plain-text dump: per subspace, its energy, basis labels, and block rows.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "channel d_S={} d_r={}", self.hs.dim(), self.hr.dim()).unwrap();
        for (sub, block) in self.subspaces.iter().zip(&self.blocks) {
            let basis = sub
                .basis
                .iter()
                .map(|(k, j)| format!("({k},{j})"))
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(out, "subspace energy={} basis={}", sub.energy, basis).unwrap();
            for row in 0..block.nrows() {
                let cells = (0..block.ncols())
                    .map(|c| block[(row, c)].to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                writeln!(out, "  {cells}").unwrap();
            }
        }
        out
    }
}

fn check_block(block: &DMatrix<f64>, size: usize) -> Result<(), String> {
    if block.nrows() != size || block.ncols() != size {
        return Err(format!(
            "block is {}x{}, subspace has size {size}",
            block.nrows(),
            block.ncols()
        ));
    }
    for x in block.iter() {
        if !x.is_finite() || *x < -STOCHASTIC_TOL {
            return Err(format!("entry {x}"));
        }
    }
    for i in 0..size {
        let row: f64 = block.row(i).iter().sum();
        let col: f64 = block.column(i).iter().sum();
        if (row - 1.0).abs() > STOCHASTIC_TOL {
            return Err(format!("row {i} sums to {row}"));
        }
        if (col - 1.0).abs() > STOCHASTIC_TOL {
            return Err(format!("column {i} sums to {col}"));
        }
    }
    Ok(())
}

/// True iff every block is doubly stochastic within [`STOCHASTIC_TOL`] and
/// sized to its subspace. Non-permutation blocks on subspaces of dimension 3+
/// are admissible but only assumed unitarily realizable; those get a warning.
pub fn validate_channel(ch: &BlockChannel) -> bool {
    let mut ok = true;
    for (i, (block, sub)) in ch.blocks.iter().zip(&ch.subspaces).enumerate() {
        if check_block(block, sub.basis.len()).is_err() {
            ok = false;
            continue;
        }
        if sub.basis.len() >= 3 && !is_permutation_block(block) {
            log::warn!(
                "block {i} (energy {}) is bistochastic but not a permutation; \
                 realizability by an energy-preserving unitary is assumed",
                sub.energy
            );
        }
    }
    ok
}

fn is_permutation_block(block: &DMatrix<f64>) -> bool {
    block
        .iter()
        .all(|&x| x.abs() <= STOCHASTIC_TOL || (x - 1.0).abs() <= STOCHASTIC_TOL)
}

/// Joint distribution over `(k, j)` labels, stored row-major in `k`.
#[derive(Debug, Clone)]
pub struct JointPopulation {
    probs: Vec<f64>,
    d_s: usize,
    d_r: usize,
}

impl JointPopulation {
    /// Product state `p ⊗ tau`.
    pub fn product(p: &PopulationVector, tau: &PopulationVector) -> Self {
        let mut probs = Vec::with_capacity(p.dim() * tau.dim());
        for k in 0..p.dim() {
            for j in 0..tau.dim() {
                probs.push(p[k] * tau[j]);
            }
        }
        Self {
            probs,
            d_s: p.dim(),
            d_r: tau.dim(),
        }
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.probs[k * self.d_r + j]
    }

    pub fn system_marginal(&self) -> PopulationVector {
        let sums: Vec<f64> = (0..self.d_s)
            .map(|k| self.probs[k * self.d_r..(k + 1) * self.d_r].iter().sum())
            .collect();
        PopulationVector::normalized(sums).expect("marginal of a normalized joint state")
    }

    pub fn molecule_marginal(&self) -> PopulationVector {
        let mut sums = vec![0.0; self.d_r];
        for row in self.probs.chunks_exact(self.d_r) {
            for (sum, &p) in sums.iter_mut().zip(row) {
                *sum += p;
            }
        }
        PopulationVector::normalized(sums).expect("marginal of a normalized joint state")
    }

    /// Mean joint energy `Σ ξ_kj (E_k + E_j)` in absolute units.
    pub fn mean_energy(&self, hs: &HamiltonianSpec, hr: &HamiltonianSpec, bath: &BathSpec) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.d_s {
            for j in 0..self.d_r {
                acc += self.probs[k * self.d_r + j] * (hs.level(k) + hr.level(j));
            }
        }
        acc * bath.gap()
    }
}

/// Couples `p` to a fresh Gibbs molecule and applies the channel's blocks,
/// returning the full joint output.
pub fn collide_joint(
    ch: &BlockChannel,
    p: &PopulationVector,
    bath: &BathSpec,
) -> Result<JointPopulation, ChannelError> {
    if p.dim() != ch.hs.dim() {
        return Err(ChannelError::DimensionMismatch {
            expected: ch.hs.dim(),
            got: p.dim(),
        });
    }
    let tau = gibbs(&ch.hr, bath);
    let mut joint = JointPopulation::product(p, &tau);
    for (sub, block) in ch.subspaces.iter().zip(&ch.blocks) {
        let x: Vec<f64> = sub
            .basis
            .iter()
            .map(|&(k, j)| joint.probs[k * joint.d_r + j])
            .collect();
        for (t, &(k, j)) in sub.basis.iter().enumerate() {
            let mut acc = 0.0;
            for (s, xs) in x.iter().enumerate() {
                acc += block[(t, s)] * xs;
            }
            joint.probs[k * joint.d_r + j] = acc;
        }
    }
    Ok(joint)
}

/// One collision: joint coupling, block action, marginal over the molecule.
pub fn apply_collision(
    ch: &BlockChannel,
    p: &PopulationVector,
    bath: &BathSpec,
) -> Result<PopulationVector, ChannelError> {
    Ok(collide_joint(ch, p, bath)?.system_marginal())
}

/// `n`-fold repetition of [`apply_collision`], fresh molecule each round.
pub fn iterate_collisions(
    ch: &BlockChannel,
    p: &PopulationVector,
    bath: &BathSpec,
    n: usize,
) -> Result<PopulationVector, ChannelError> {
    let mut state = p.clone();
    for _ in 0..n {
        state = apply_collision(ch, &state, bath)?;
    }
    Ok(state)
}

/// Result of the optimal-collision search: the best reachable target
/// population and, when every choice-bearing subspace is within
/// [`SUBSPACE_CAP`], a permutation channel realizing it.
#[derive(Debug, Clone)]
pub struct OptimalCooling {
    pub p0_star: f64,
    pub witness: Option<BlockChannel>,
}

/// Maximal total population landing on the system levels in `targets` after
/// one collision, over all block channels for `(hs, hr)`.
///
/// Within each subspace the optimum routes the largest joint populations into
/// the target slots, so the value is the per-subspace top-`s` sum where `s`
/// counts target slots there.
pub fn optimal_subset_collision(
    p: &PopulationVector,
    hs: &HamiltonianSpec,
    hr: &HamiltonianSpec,
    bath: &BathSpec,
    targets: &[usize],
    cap: usize,
) -> Result<OptimalCooling, ChannelError> {
    if p.dim() != hs.dim() {
        return Err(ChannelError::DimensionMismatch {
            expected: hs.dim(),
            got: p.dim(),
        });
    }
    let tau = gibbs(hr, bath);
    let joint = JointPopulation::product(p, &tau);
    let subspaces = decompose_subspaces(hs, hr, DEGENERACY_TOL);

    let mut value = 0.0;
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(subspaces.len());
    let mut witness_feasible = true;
    for sub in &subspaces {
        let n = sub.basis.len();
        let xi: Vec<f64> = sub.basis.iter().map(|&(k, j)| joint.get(k, j)).collect();
        let slots: Vec<usize> = (0..n)
            .filter(|&t| targets.contains(&sub.basis[t].0))
            .collect();
        let s = slots.len();
        if s == 0 || s == n {
            value += slots.iter().map(|&t| xi[t]).sum::<f64>();
            perms.push((0..n).collect());
            continue;
        }
        // sources sorted by population, largest first; ties keep basis order
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| xi[b].partial_cmp(&xi[a]).expect("finite populations"));
        value += order[..s].iter().map(|&src| xi[src]).sum::<f64>();
        if n > cap {
            witness_feasible = false;
            continue;
        }
        let mut perm = vec![usize::MAX; n];
        let rest: Vec<usize> = (0..n).filter(|t| !slots.contains(t)).collect();
        for (dest, src) in slots.iter().chain(&rest).zip(&order) {
            perm[*dest] = *src;
        }
        perms.push(perm);
    }

    let witness = if witness_feasible {
        Some(BlockChannel::permutation_blocks(hs, hr, perms)?)
    } else {
        None
    };
    Ok(OptimalCooling {
        p0_star: value,
        witness,
    })
}

/// Maximal ground population after a single collision with a molecule no
/// larger than the system.
pub fn optimal_single_collision(
    p: &PopulationVector,
    hs: &HamiltonianSpec,
    hr: &HamiltonianSpec,
    bath: &BathSpec,
) -> Result<OptimalCooling, ChannelError> {
    optimal_subset_collision(p, hs, hr, bath, &[0], SUBSPACE_CAP)
}
