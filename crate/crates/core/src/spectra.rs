//! Energy spectra, bath parameters, and population vectors.
//!
//! Downstream modules work with classical populations over energy eigenbases.
//! This module fixes the conventions: level energies are stored in units of
//! the reference gap `E`, and the bath is parametrized by the Boltzmann
//! factor `q = exp(-beta * E)` alongside `beta` itself.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest composite dimension accepted by [`composite_hamiltonian`] and friends.
pub const COMPOSITE_DIM_CAP: usize = 4096;

/// Absolute tolerance on probability sums.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Entries at or above this (negative) floor count as floating-point dust and are clamped to zero.
pub const PROB_CLAMP_FLOOR: f64 = -1e-15;

/// Non-strict comparison tolerance for the weighted-population monotonicity check.
pub const R3_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("composite dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("levels must be finite and sorted non-decreasing")]
    MalformedLevels,
    #[error("bath parameters out of range: {0}")]
    BadBath(String),
    #[error("not a probability vector: {0}")]
    BadPopulation(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("bad config: {0}")]
    BadConfig(String),
}

/// Diagonal Hamiltonian given by its energy levels in units of the reference gap.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    levels: Vec<f64>,
    label: String,
}

impl HamiltonianSpec {
    /// Ladder spectrum `0, 1, ..., d-1`.
    pub fn equally_spaced(d: usize) -> Result<Self, SpectraError> {
        if d < 2 {
            return Err(SpectraError::DimensionTooSmall(d));
        }
        Ok(Self {
            levels: (0..d).map(|j| j as f64).collect(),
            label: format!("H^({d})"),
        })
    }

    pub fn qubit() -> Self {
        Self::equally_spaced(2).expect("d = 2 is valid")
    }

    /// Arbitrary spectrum; levels must be finite and sorted non-decreasing.
    pub fn explicit(levels: Vec<f64>, label: impl Into<String>) -> Result<Self, SpectraError> {
        if levels.len() < 2 {
            return Err(SpectraError::DimensionTooSmall(levels.len()));
        }
        if levels.iter().any(|x| !x.is_finite()) || levels.windows(2).any(|w| w[0] > w[1]) {
            return Err(SpectraError::MalformedLevels);
        }
        Ok(Self {
            levels,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> f64 {
        self.levels[j]
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Heat bath at inverse temperature `beta`, with the derived Boltzmann factor
/// `q = exp(-beta * E)` per reference gap `E`. `q` is the canonical parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    beta: f64,
    gap: f64,
    q: f64,
}

impl BathSpec {
    pub fn from_beta(beta: f64, gap: f64) -> Result<Self, SpectraError> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(SpectraError::BadBath(format!("beta = {beta}")));
        }
        check_gap(gap)?;
        Ok(Self {
            beta,
            gap,
            q: (-beta * gap).exp(),
        })
    }

    pub fn from_q(q: f64, gap: f64) -> Result<Self, SpectraError> {
        if !(q.is_finite() && q > 0.0 && q < 1.0) {
            return Err(SpectraError::BadBath(format!("q = {q} not in (0, 1)")));
        }
        check_gap(gap)?;
        Ok(Self {
            beta: -q.ln() / gap,
            gap,
            q,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Reference gap `E` in absolute energy units.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Gibbs weight `q^x` for a level at energy `x` (units of the gap).
    pub fn weight(&self, x: f64) -> f64 {
        (-self.beta * self.gap * x).exp()
    }
}

fn check_gap(gap: f64) -> Result<(), SpectraError> {
    if !(gap.is_finite() && gap > 0.0) {
        return Err(SpectraError::BadBath(format!("gap = {gap}")));
    }
    Ok(())
}

/// Probability distribution over energy levels.
///
/// Entries sum to one within [`PROB_SUM_TOL`]; tiny negative dust (down to
/// [`PROB_CLAMP_FLOOR`]) is clamped to zero on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationVector {
    probs: Vec<f64>,
}

impl PopulationVector {
    pub fn new(mut probs: Vec<f64>) -> Result<Self, SpectraError> {
        if probs.is_empty() {
            return Err(SpectraError::BadPopulation("empty vector".into()));
        }
        for x in probs.iter_mut() {
            if !x.is_finite() {
                return Err(SpectraError::BadPopulation(format!("entry {x}")));
            }
            if *x < 0.0 {
                if *x < PROB_CLAMP_FLOOR {
                    return Err(SpectraError::BadPopulation(format!("negative entry {x}")));
                }
                *x = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(SpectraError::BadPopulation(format!("sum = {sum}")));
        }
        Ok(Self { probs })
    }

    /// Normalizes non-negative weights with a positive sum.
    pub fn normalized(weights: Vec<f64>) -> Result<Self, SpectraError> {
        let sum: f64 = weights.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(SpectraError::BadPopulation(format!("weight sum = {sum}")));
        }
        Self::new(weights.into_iter().map(|x| (x / sum).max(0.0)).collect())
    }

    pub fn point_mass(dim: usize, at: usize) -> Self {
        assert!(at < dim, "point mass index out of range");
        let mut probs = vec![0.0; dim];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.probs.clone()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.probs.iter()
    }

    /// Largest absolute componentwise difference.
    pub fn linf_distance(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for PopulationVector {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.probs[j]
    }
}

/// Thermal state of `h` at the bath temperature.
pub fn gibbs(h: &HamiltonianSpec, bath: &BathSpec) -> PopulationVector {
    let e0 = h.level(0);
    let weights: Vec<f64> = h.levels().iter().map(|&x| bath.weight(x - e0)).collect();
    PopulationVector::normalized(weights).expect("Gibbs weights are positive")
}

/// `p_j * exp(beta * E_j)`, the population of level `j` relative to its Gibbs weight.
pub fn weighted_populations(
    p: &PopulationVector,
    h: &HamiltonianSpec,
    bath: &BathSpec,
) -> Result<Vec<f64>, SpectraError> {
    if p.dim() != h.dim() {
        return Err(SpectraError::DimensionMismatch {
            expected: h.dim(),
            got: p.dim(),
        });
    }
    let e0 = h.level(0);
    Ok(p.iter()
        .zip(h.levels())
        .map(|(&pj, &ej)| pj / bath.weight(ej - e0))
        .collect())
}

/// Permutation `pi` sorting levels by decreasing weighted population,
/// ties broken by ascending level index.
pub fn beta_ordering(
    p: &PopulationVector,
    h: &HamiltonianSpec,
    bath: &BathSpec,
) -> Result<Vec<usize>, SpectraError> {
    let w = weighted_populations(p, h, bath)?;
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].partial_cmp(&w[a]).expect("weights are finite"));
    Ok(order)
}

/// First adjacent pair `(k, k+1)` whose weighted populations decrease, if any.
pub fn r3_witness(
    p: &PopulationVector,
    h: &HamiltonianSpec,
    bath: &BathSpec,
) -> Result<Option<(usize, usize)>, SpectraError> {
    let w = weighted_populations(p, h, bath)?;
    let scale = w.iter().copied().fold(1.0, f64::max);
    Ok(w.windows(2)
        .position(|pair| pair[0] > pair[1] + R3_TOL * scale)
        .map(|k| (k, k + 1)))
}

/// Whether weighted populations are non-decreasing in the level index
/// (tolerance [`R3_TOL`], non-strict).
pub fn satisfies_r3(
    p: &PopulationVector,
    h: &HamiltonianSpec,
    bath: &BathSpec,
) -> Result<bool, SpectraError> {
    Ok(r3_witness(p, h, bath)?.is_none())
}

/// Sorted tensor-power (or mixed tensor-product) spectrum with the map back
/// to product-basis labels.
#[derive(Debug, Clone)]
pub struct CompositeHamiltonian {
    spec: HamiltonianSpec,
    labels: Vec<Vec<usize>>,
}

impl CompositeHamiltonian {
    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Product label of sorted level `i`, one factor index per position.
    pub fn label(&self, i: usize) -> &[usize] {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn label_string(&self, i: usize) -> String {
        self.labels[i]
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("")
    }

    /// Sorted index of a product label.
    pub fn index_of(&self, label: &[usize]) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Tensor product of the given factors, levels sorted by total energy with
/// ties kept in lexicographic label order.
pub fn composite_of(factors: &[&HamiltonianSpec]) -> Result<CompositeHamiltonian, SpectraError> {
    if factors.is_empty() {
        return Err(SpectraError::DimensionTooSmall(0));
    }
    let dim: usize = factors.iter().map(|h| h.dim()).product();
    if dim > COMPOSITE_DIM_CAP {
        return Err(SpectraError::DimensionCap {
            dim,
            cap: COMPOSITE_DIM_CAP,
        });
    }

    let mut entries: Vec<(f64, Vec<usize>)> = Vec::with_capacity(dim);
    let mut label = vec![0usize; factors.len()];
    loop {
        let energy = label
            .iter()
            .zip(factors)
            .fold(0.0, |acc, (&d, h)| acc + h.level(d));
        entries.push((energy, label.clone()));
        // lexicographic increment, most significant digit first
        let mut pos = factors.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            label[pos] += 1;
            if label[pos] < factors[pos].dim() {
                break;
            }
            label[pos] = 0;
        }
        if label.iter().all(|&d| d == 0) {
            break;
        }
    }
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("energies are finite"));

    let levels: Vec<f64> = entries.iter().map(|(e, _)| *e).collect();
    let labels: Vec<Vec<usize>> = entries.into_iter().map(|(_, l)| l).collect();
    let label = factors
        .iter()
        .map(|h| h.label())
        .collect::<Vec<_>>()
        .join(" x ");
    Ok(CompositeHamiltonian {
        spec: HamiltonianSpec::explicit(levels, label)?,
        labels,
    })
}

/// `copies`-fold tensor power of `h`.
pub fn composite_hamiltonian(
    h: &HamiltonianSpec,
    copies: usize,
) -> Result<CompositeHamiltonian, SpectraError> {
    if copies == 0 {
        return Err(SpectraError::DimensionTooSmall(0));
    }
    let factors: Vec<&HamiltonianSpec> = std::iter::repeat_n(h, copies).collect();
    composite_of(&factors)
}

fn default_gap() -> f64 {
    1.0
}

/// Plain-text description of a system and its bath.
///
/// `kind` is one of `"equally_spaced"`, `"explicit"`, or `"composite"`;
/// the bath is given by `beta` or `q` (or both, which must agree).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(rename = "E", default = "default_gap")]
    pub gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copies: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

impl SystemConfig {
    pub fn parse(text: &str) -> Result<Self, SpectraError> {
        toml::from_str(text).map_err(|e| SpectraError::BadConfig(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn for_system(h: &HamiltonianSpec, bath: &BathSpec) -> Self {
        Self {
            kind: "explicit".into(),
            d: None,
            gap: bath.gap(),
            levels: Some(h.levels().to_vec()),
            copies: None,
            beta: Some(bath.beta()),
            q: Some(bath.q()),
        }
    }

    fn base_hamiltonian(&self) -> Result<HamiltonianSpec, SpectraError> {
        match (self.d, &self.levels) {
            (Some(d), None) => HamiltonianSpec::equally_spaced(d),
            (None, Some(levels)) => HamiltonianSpec::explicit(levels.clone(), "config"),
            _ => Err(SpectraError::BadConfig(
                "exactly one of `d` and `levels` must be given".into(),
            )),
        }
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianSpec, SpectraError> {
        match self.kind.as_str() {
            "equally_spaced" | "explicit" => self.base_hamiltonian(),
            "composite" => {
                let copies = self
                    .copies
                    .ok_or_else(|| SpectraError::BadConfig("composite requires `copies`".into()))?;
                Ok(composite_hamiltonian(&self.base_hamiltonian()?, copies)?
                    .spec()
                    .clone())
            }
            other => Err(SpectraError::BadConfig(format!("unknown kind {other:?}"))),
        }
    }

    pub fn bath(&self) -> Result<BathSpec, SpectraError> {
        let bath = match (self.beta, self.q) {
            (Some(beta), None) => BathSpec::from_beta(beta, self.gap)?,
            (None, Some(q)) => BathSpec::from_q(q, self.gap)?,
            (Some(beta), Some(q)) => {
                let bath = BathSpec::from_beta(beta, self.gap)?;
                if (bath.q() - q).abs() > 1e-12 {
                    return Err(SpectraError::BadConfig(format!(
                        "beta and q disagree: exp(-beta E) = {}, q = {q}",
                        bath.q()
                    )));
                }
                bath
            }
            (None, None) => {
                return Err(SpectraError::BadConfig(
                    "one of `beta`, `q` required".into(),
                ))
            }
        };
        Ok(bath)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn qutrit() -> HamiltonianSpec {
        HamiltonianSpec::equally_spaced(3).unwrap()
    }

    fn bath_q(q: f64) -> BathSpec {
        BathSpec::from_q(q, 1.0).unwrap()
    }

    #[test]
    fn gibbs_qutrit_at_half() {
        let tau = gibbs(&qutrit(), &bath_q(0.5));
        assert_abs_diff_eq!(tau[0], 4.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tau[1], 2.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tau[2], 1.0 / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn gibbs_qubit_high_temperature_limit() {
        let bath = BathSpec::from_beta(1e-9, 1.0).unwrap();
        let tau = gibbs(&HamiltonianSpec::qubit(), &bath);
        assert_abs_diff_eq!(tau[0], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(tau[1], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn gibbs_qutrit_at_q03() {
        let tau = gibbs(&qutrit(), &bath_q(0.3));
        assert_abs_diff_eq!(tau[0], 0.719424, epsilon = 1e-6);
        assert_abs_diff_eq!(tau[1], 0.215827, epsilon = 1e-6);
        assert_abs_diff_eq!(tau[2], 0.064748, epsilon = 1e-6);
    }

    #[test]
    fn bath_parametrizations_agree() {
        let b = bath_q(0.5);
        assert_abs_diff_eq!(b.beta(), std::f64::consts::LN_2, epsilon = 1e-15);
        assert!((b.q() - (-b.beta() * b.gap()).exp()).abs() <= 1e-12);
        let b2 = BathSpec::from_beta(0.7, 2.0).unwrap();
        assert!((b2.q() - (-0.7 * 2.0f64).exp()).abs() <= 1e-12);
        assert!(BathSpec::from_q(1.0, 1.0).is_err());
        assert!(BathSpec::from_q(0.5, 0.0).is_err());
        assert!(BathSpec::from_beta(-1.0, 1.0).is_err());
    }

    #[test]
    fn ordering_of_swapped_thermal_pair() {
        let bath = bath_q(0.5);
        let tau = gibbs(&qutrit(), &bath);
        let swapped = PopulationVector::new(vec![tau[1], tau[0], tau[2]]).unwrap();
        assert_eq!(
            beta_ordering(&swapped, &qutrit(), &bath).unwrap(),
            vec![1, 2, 0]
        );
        assert_eq!(
            beta_ordering(&tau, &qutrit(), &bath).unwrap(),
            vec![0, 1, 2]
        );
        let uniform = PopulationVector::new(vec![1.0 / 3.0; 3]).unwrap();
        assert_eq!(
            beta_ordering(&uniform, &qutrit(), &bath).unwrap(),
            vec![2, 1, 0]
        );
    }

    #[test]
    fn monotone_weighted_populations_pass_the_check() {
        let bath = bath_q(0.5);
        let p = PopulationVector::normalized(vec![1.0, 2.0, 4.0]).unwrap();
        assert!(satisfies_r3(&p, &qutrit(), &bath).unwrap());
        // hotter thermal state: weighted populations grow with energy
        let hot = gibbs(&qutrit(), &bath_q(0.7));
        assert!(satisfies_r3(&hot, &qutrit(), &bath).unwrap());
        // bath Gibbs state sits exactly on the boundary
        assert!(satisfies_r3(&gibbs(&qutrit(), &bath), &qutrit(), &bath).unwrap());
        let falling = PopulationVector::new(vec![0.8, 0.15, 0.05]).unwrap();
        assert_eq!(
            r3_witness(&falling, &qutrit(), &bath).unwrap(),
            Some((0, 1))
        );
    }

    #[test]
    fn composite_qubit_cube() {
        let c = composite_hamiltonian(&HamiltonianSpec::qubit(), 3).unwrap();
        assert_eq!(c.spec().levels(), &[0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0]);
        let labels: Vec<String> = (0..8).map(|i| c.label_string(i)).collect();
        assert_eq!(
            labels,
            vec!["000", "001", "010", "100", "011", "101", "110", "111"]
        );
        assert_eq!(c.index_of(&[1, 0, 0]), Some(3));
        assert_eq!(c.index_of(&[0, 1, 1]), Some(4));
    }

    #[test]
    fn composite_qutrit_square_and_cap() {
        let c = composite_hamiltonian(&qutrit(), 2).unwrap();
        assert_eq!(
            c.spec().levels(),
            &[0.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0, 3.0, 4.0]
        );
        assert_eq!(
            composite_hamiltonian(&qutrit(), 1).unwrap().spec(),
            &qutrit()
        );
        let big = HamiltonianSpec::equally_spaced(10).unwrap();
        assert!(matches!(
            composite_hamiltonian(&big, 5),
            Err(SpectraError::DimensionCap { .. })
        ));
    }

    #[test]
    fn population_validation_clamps_dust_and_rejects_garbage() {
        let p = PopulationVector::new(vec![1.0 + 4e-16, -4e-16, 0.0]).unwrap();
        assert_eq!(p[1], 0.0);
        assert!(PopulationVector::new(vec![0.7, 0.2]).is_err());
        assert!(PopulationVector::new(vec![1.2, -0.2]).is_err());
        assert!(PopulationVector::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn config_round_trip() {
        let cfg = SystemConfig {
            kind: "equally_spaced".into(),
            d: Some(3),
            gap: 1.0,
            levels: None,
            copies: None,
            beta: None,
            q: Some(0.3),
        };
        let parsed = SystemConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(parsed, cfg);
        assert_eq!(parsed.hamiltonian().unwrap(), qutrit());
        assert_abs_diff_eq!(parsed.bath().unwrap().q(), 0.3, epsilon = 0.0);

        let comp = SystemConfig {
            kind: "composite".into(),
            d: None,
            gap: 2.0,
            levels: Some(vec![0.0, 1.0]),
            copies: Some(3),
            beta: Some(0.5),
            q: None,
        };
        let parsed = SystemConfig::parse(&comp.to_text()).unwrap();
        assert_eq!(parsed, comp);
        assert_eq!(parsed.hamiltonian().unwrap().dim(), 8);
        assert!((parsed.bath().unwrap().q() - (-1.0f64).exp()).abs() <= 1e-15);
    }

    #[test]
    fn config_rejects_inconsistent_bath() {
        let text = "kind = \"equally_spaced\"\nd = 3\nE = 1.0\nbeta = 1.0\nq = 0.5\n";
        assert!(SystemConfig::parse(text).unwrap().bath().is_err());
        let ok = "kind = \"equally_spaced\"\nd = 3\nE = 1.0\nbeta = 0.6931471805599453\nq = 0.5\n";
        assert!(SystemConfig::parse(ok).unwrap().bath().is_ok());
    }
}
