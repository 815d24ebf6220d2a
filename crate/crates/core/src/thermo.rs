//! Energetic accounting for the cooling protocols: per-round work, system
//! energy reduction, cumulative coefficient of performance, and reference
//! work baselines.
//!
//! Conventions: only the recharge permutation costs or extracts work (the
//! collision is energy-conserving on register + molecule, so its system
//! energy change is balanced by heat in the molecule). Work is positive when
//! the recharge raises the register energy; energy reduction is positive
//! when a round cools the system marginal.

use thiserror::Error;

use crate::collision::{apply_collision, ChannelError};
use crate::protocols::{ProtocolError, RoundSpec};
use crate::spectra::{BathSpec, HamiltonianSpec, PopulationVector};

#[derive(Debug, Error)]
pub enum ThermoError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cumulative work {cumulative_work} is not positive; the CoP is undefined as a ratio")]
    NonPositiveWork { cumulative_work: f64 },
    #[error("round index out of range: {0}")]
    OutOfRange(String),
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Mean energy of a register population, in the bath's energy unit.
pub fn mean_energy(p: &PopulationVector, h: &HamiltonianSpec, bath: &BathSpec) -> f64 {
    assert_eq!(p.dim(), h.dim(), "population does not match the spectrum");
    p.iter()
        .zip(h.levels())
        .map(|(prob, level)| prob * level * bath.gap())
        .sum()
}

/// Work spent by the recharge stage of one round:
/// `(V p - p) . H_controlled`.
pub fn work_per_round(
    spec: &RoundSpec,
    p_before: &PopulationVector,
    bath: &BathSpec,
) -> Result<f64, ThermoError> {
    if p_before.dim() != spec.controlled.dim() {
        return Err(ThermoError::DimensionMismatch(format!(
            "population has dimension {}, controlled register has {}",
            p_before.dim(),
            spec.controlled.dim()
        )));
    }
    let recharged = spec.recharge.apply(p_before);
    Ok(mean_energy(&recharged, &spec.controlled, bath)
        - mean_energy(p_before, &spec.controlled, bath))
}

/// Energy drained from the system marginal over one round:
/// `(p_before - p_after) . H_S`.
pub fn energy_reduction_per_round(
    p_before_s: &PopulationVector,
    p_after_s: &PopulationVector,
    hs: &HamiltonianSpec,
    bath: &BathSpec,
) -> Result<f64, ThermoError> {
    if p_before_s.dim() != hs.dim() || p_after_s.dim() != hs.dim() {
        return Err(ThermoError::DimensionMismatch(format!(
            "populations of dimension {} and {} against a {}-level system",
            p_before_s.dim(),
            p_after_s.dim(),
            hs.dim()
        )));
    }
    Ok(mean_energy(p_before_s, hs, bath) - mean_energy(p_after_s, hs, bath))
}

/// One simulated round in a [`CoolingLedger`].
#[derive(Debug, Clone)]
pub struct RoundRecord {
    /// 1-based round index.
    pub n: usize,
    /// Work spent by the recharge of this round.
    pub work: f64,
    /// Energy reduction of the system marginal over this round.
    pub energy_reduction: f64,
    /// Controlled-register population after this round.
    pub population: PopulationVector,
}

/// Append-only record of a simulated protocol run: per-round work and system
/// energy reduction, plus everything needed to form cumulative series.
#[derive(Debug, Clone)]
pub struct CoolingLedger {
    label: String,
    initial: PopulationVector,
    initial_system_energy: f64,
    records: Vec<RoundRecord>,
}

impl CoolingLedger {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn initial(&self) -> &PopulationVector {
        &self.initial
    }

    /// Mean system energy before the first round.
    pub fn initial_system_energy(&self) -> f64 {
        self.initial_system_energy
    }

    pub fn rounds(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> &[RoundRecord] {
        &self.records
    }

    fn checked_span(&self, n: usize) -> Result<&[RoundRecord], ThermoError> {
        if n == 0 || n > self.records.len() {
            return Err(ThermoError::OutOfRange(format!(
                "round {n} not in the recorded range 1..={}",
                self.records.len()
            )));
        }
        Ok(&self.records[..n])
    }

    /// Total work spent over rounds `1..=n`.
    pub fn cumulative_work(&self, n: usize) -> Result<f64, ThermoError> {
        Ok(self.checked_span(n)?.iter().map(|r| r.work).sum())
    }

    /// Total system energy reduction over rounds `1..=n`.
    pub fn cumulative_reduction(&self, n: usize) -> Result<f64, ThermoError> {
        Ok(self
            .checked_span(n)?
            .iter()
            .map(|r| r.energy_reduction)
            .sum())
    }

    /// Smallest per-round work observed over the whole run.
    pub fn min_round_work(&self) -> Option<f64> {
        self.records
            .iter()
            .map(|r| r.work)
            .min_by(|a, b| a.partial_cmp(b).expect("finite work values"))
    }

    /// The per-round and cumulative series as CSV with header
    /// `n,W_n,dU_n,cumW,cumdU,K_n`. `K_n` is written as `nan` wherever the
    /// cumulative work is not positive.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,W_n,dU_n,cumW,cumdU,K_n\n");
        let mut cum_work = 0.0;
        let mut cum_reduction = 0.0;
        for record in &self.records {
            cum_work += record.work;
            cum_reduction += record.energy_reduction;
            let cop = if cum_work > 0.0 {
                format!("{}", cum_reduction / cum_work)
            } else {
                "nan".to_string()
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                record.n, record.work, record.energy_reduction, cum_work, cum_reduction, cop
            ));
        }
        out
    }
}

/// Cumulative coefficient of performance up to round `n`:
/// `K^(n) = sum(-dU) / sum(W)`.
///
/// Rejects non-positive cumulative work — the ratio is meaningless there;
/// inspect [`CoolingLedger::cumulative_work`] directly instead.
pub fn cumulative_cop(ledger: &CoolingLedger, n: usize) -> Result<f64, ThermoError> {
    let work = ledger.cumulative_work(n)?;
    let reduction = ledger.cumulative_reduction(n)?;
    if work <= 0.0 {
        return Err(ThermoError::NonPositiveWork {
            cumulative_work: work,
        });
    }
    Ok(reduction / work)
}

/// Runs `rounds` rounds of the protocol from `p0`, recording per-round work
/// and system energy reduction.
pub fn simulate_protocol(
    spec: &RoundSpec,
    p0: &PopulationVector,
    bath: &BathSpec,
    rounds: usize,
) -> Result<CoolingLedger, ThermoError> {
    if p0.dim() != spec.controlled.dim() {
        return Err(ThermoError::DimensionMismatch(format!(
            "initial population has dimension {}, controlled register has {}",
            p0.dim(),
            spec.controlled.dim()
        )));
    }
    let initial_system_energy = mean_energy(&spec.system_marginal(p0), &spec.system, bath);
    let mut records = Vec::with_capacity(rounds);
    let mut current = p0.clone();
    let mut cumulative_reduction = 0.0;
    for n in 1..=rounds {
        let work = work_per_round(spec, &current, bath)?;
        let recharged = spec.recharge.apply(&current);
        let next = apply_collision(&spec.thermalize, &recharged, bath)?;
        let energy_reduction = energy_reduction_per_round(
            &spec.system_marginal(&current),
            &spec.system_marginal(&next),
            &spec.system,
            bath,
        )?;
        cumulative_reduction += energy_reduction;
        debug_assert!(
            cumulative_reduction <= initial_system_energy + 1e-10,
            "cannot drain more energy than the system started with"
        );
        records.push(RoundRecord {
            n,
            work,
            energy_reduction,
            population: next.clone(),
        });
        current = next;
    }
    Ok(CoolingLedger {
        label: spec.label.clone(),
        initial: p0.clone(),
        initial_system_energy,
        records,
    })
}

/// First-round work of the exhaustive heat-bath cooling scheme used as a
/// baseline: `(d_S - 1 + 2 d_S q / (1 - q^{d_S}) - 2 q / (1 - q)) E`.
///
/// Grows without bound in `d_S`, in contrast to the pump protocols whose
/// per-round work stays below one molecule gap.
pub fn xhbac_first_round_work(ds: usize, bath: &BathSpec) -> Result<f64, ThermoError> {
    if ds < 2 {
        return Err(ThermoError::BadDimensions(format!(
            "baseline needs a system of dimension >= 2, got {ds}"
        )));
    }
    let q = bath.q();
    let d = ds as f64;
    Ok((d - 1.0 + 2.0 * d * q / (1.0 - q.powi(ds as i32)) - 2.0 * q / (1.0 - q)) * bath.gap())
}
