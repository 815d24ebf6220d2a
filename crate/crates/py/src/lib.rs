//! Python bindings for the collision-model thermalization toolkit.
//!
//! Populations cross the boundary as plain Python lists; spectra, baths,
//! protocols, verdicts, and cooling ledgers are thin class wrappers over
//! the core types. All core errors surface as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use finitherm::collision::optimal_subset_collision;
use finitherm::cones::{
    mto_qubit_cone, mto_qutrit_inner_bound, qubit_collision_output, qubit_cone,
    qutrit_collision_output, qutrit_cone_subset_v, BlochState, QubitCollisionParams, QutritParams,
};
use finitherm::nogo::{counterexample_r2, three_qubit_example, verify_theorem2, verify_theorem3};
use finitherm::protocols::{
    build_protocol_i_general, build_protocol_i_qutrit, build_protocol_ii_cooling_limit,
    build_protocol_ii_efficiency, fixed_point, parity_limits, round_matrix, trajectory, RoundSpec,
};
use finitherm::spectra::{BathSpec, HamiltonianSpec, PopulationVector};
use finitherm::thermo::{cumulative_cop, mean_energy, simulate_protocol, CoolingLedger};

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn population(values: Vec<f64>) -> PyResult<PopulationVector> {
    PopulationVector::new(values).map_err(value_err)
}

/// Heat bath at a fixed inverse temperature, described by the Boltzmann
/// ratio `q = exp(-beta * gap)` of one ladder step.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Bath {
    inner: BathSpec,
}

#[pymethods]
impl Bath {
    #[staticmethod]
    #[pyo3(signature = (q, gap = 1.0))]
    fn from_q(q: f64, gap: f64) -> PyResult<Self> {
        Ok(Self {
            inner: BathSpec::from_q(q, gap).map_err(value_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (beta, gap = 1.0))]
    fn from_beta(beta: f64, gap: f64) -> PyResult<Self> {
        Ok(Self {
            inner: BathSpec::from_beta(beta, gap).map_err(value_err)?,
        })
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    #[getter]
    fn gap(&self) -> f64 {
        self.inner.gap()
    }

    fn __repr__(&self) -> String {
        format!("Bath(q={}, gap={})", self.inner.q(), self.inner.gap())
    }
}

/// Diagonal Hamiltonian given by its sorted energy levels.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Hamiltonian {
    inner: HamiltonianSpec,
}

#[pymethods]
impl Hamiltonian {
    /// Equally spaced `d`-level ladder with unit gap.
    #[staticmethod]
    fn ladder(d: usize) -> PyResult<Self> {
        Ok(Self {
            inner: HamiltonianSpec::equally_spaced(d).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn qubit() -> Self {
        Self {
            inner: HamiltonianSpec::qubit(),
        }
    }

    #[staticmethod]
    fn explicit(levels: Vec<f64>, label: String) -> PyResult<Self> {
        Ok(Self {
            inner: HamiltonianSpec::explicit(levels, label).map_err(value_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn levels(&self) -> Vec<f64> {
        self.inner.levels().to_vec()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Hamiltonian({}, dim={})",
            self.inner.label(),
            self.inner.dim()
        )
    }
}

/// One verdict of the cooling bound: premises, the optimal reachable
/// ground population, and the thermal bound it must respect.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Verdict {
    inner: finitherm::nogo::NoGoVerdict,
}

#[pymethods]
impl Verdict {
    #[getter]
    fn r1(&self) -> bool {
        self.inner.premises.r1
    }

    #[getter]
    fn r2(&self) -> bool {
        self.inner.premises.r2
    }

    #[getter]
    fn r3(&self) -> bool {
        self.inner.premises.r3
    }

    #[getter]
    fn p0_star(&self) -> f64 {
        self.inner.p0_star
    }

    #[getter]
    fn tau0_s(&self) -> f64 {
        self.inner.tau0_s
    }

    #[getter]
    fn margin(&self) -> f64 {
        self.inner.margin()
    }

    #[getter]
    fn bound_holds(&self) -> bool {
        self.inner.bound_holds
    }

    /// Plain-text block description of the optimizing channel, when one
    /// was retained.
    #[getter]
    fn witness(&self) -> Option<String> {
        self.inner.witness.as_ref().map(|w| w.to_text())
    }

    fn __repr__(&self) -> String {
        format!(
            "Verdict(p0_star={}, tau0_s={}, bound_holds={})",
            self.inner.p0_star, self.inner.tau0_s, self.inner.bound_holds
        )
    }
}

/// A repeatable cooling round: recharge permutation followed by a
/// molecule collision on the controlled register.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Protocol {
    inner: RoundSpec,
}

#[pymethods]
impl Protocol {
    /// Machine-free ladder pump on a `d_S`-level system with a
    /// `d_r`-level molecule.
    #[staticmethod]
    #[pyo3(signature = (ds = 3, dr = 3))]
    fn pump(ds: usize, dr: usize) -> PyResult<Self> {
        let inner = if dr == 3 {
            build_protocol_i_qutrit(ds).map_err(value_err)?
        } else {
            build_protocol_i_general(ds, dr).map_err(value_err)?
        };
        Ok(Self { inner })
    }

    /// Qutrit + one-qubit machine variant reaching the quadrupled
    /// inverse temperature.
    #[staticmethod]
    fn machine_cooling() -> PyResult<Self> {
        Ok(Self {
            inner: build_protocol_ii_cooling_limit().map_err(value_err)?,
        })
    }

    /// Qutrit + one-qubit machine variant with the cheaper work bill.
    #[staticmethod]
    fn machine_efficiency() -> PyResult<Self> {
        Ok(Self {
            inner: build_protocol_ii_efficiency().map_err(value_err)?,
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.controlled.dim()
    }

    #[getter]
    fn machine_dim(&self) -> usize {
        self.inner.machine_dim()
    }

    /// Populations of the bare system, traced over the machine.
    fn system_marginal(&self, p: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.system_marginal(&population(p)?).to_vec())
    }

    /// Thermal state of the controlled register.
    fn gibbs(&self, bath: &Bath) -> Vec<f64> {
        finitherm::spectra::gibbs(&self.inner.controlled, &bath.inner).to_vec()
    }

    /// Stationary populations of one round.
    fn fixed_point(&self, bath: &Bath) -> PyResult<Vec<f64>> {
        let g = round_matrix(&self.inner, &bath.inner).map_err(value_err)?;
        Ok(fixed_point(&g).map_err(value_err)?.to_vec())
    }

    /// Second-largest eigenvalue modulus of the round map.
    fn slem(&self, bath: &Bath) -> PyResult<f64> {
        Ok(round_matrix(&self.inner, &bath.inner)
            .map_err(value_err)?
            .slem())
    }

    /// Populations after 0..=rounds applications of the round map.
    fn trajectory(&self, start: Vec<f64>, bath: &Bath, rounds: usize) -> PyResult<Vec<Vec<f64>>> {
        let traj =
            trajectory(&self.inner, &population(start)?, &bath.inner, rounds).map_err(value_err)?;
        Ok(traj.into_iter().map(|p| p.to_vec()).collect())
    }

    /// Even- and odd-round limits of a period-two protocol.
    fn parity_limits(&self, start: Vec<f64>, bath: &Bath) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let (even, odd) =
            parity_limits(&self.inner, &population(start)?, &bath.inner).map_err(value_err)?;
        Ok((even.to_vec(), odd.to_vec()))
    }

    /// Round-by-round work and energy-drain ledger.
    fn simulate(&self, start: Vec<f64>, bath: &Bath, rounds: usize) -> PyResult<Ledger> {
        Ok(Ledger {
            inner: simulate_protocol(&self.inner, &population(start)?, &bath.inner, rounds)
                .map_err(value_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Protocol({})", self.inner.label)
    }
}

/// Work and energy bookkeeping of a simulated protocol run.
#[pyclass(skip_from_py_object)]
struct Ledger {
    inner: CoolingLedger,
}

#[pymethods]
impl Ledger {
    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    #[getter]
    fn rounds(&self) -> usize {
        self.inner.rounds()
    }

    /// List of (round, work, energy_reduction) triples.
    fn records(&self) -> Vec<(usize, f64, f64)> {
        self.inner
            .records()
            .iter()
            .map(|r| (r.n, r.work, r.energy_reduction))
            .collect()
    }

    /// Controlled-register populations after round `n`.
    fn population(&self, n: usize) -> PyResult<Vec<f64>> {
        if n == 0 {
            return Ok(self.inner.initial().to_vec());
        }
        self.inner
            .records()
            .get(n - 1)
            .map(|r| r.population.to_vec())
            .ok_or_else(|| value_err(format!("round {n} beyond the simulated range")))
    }

    fn cumulative_work(&self, n: usize) -> PyResult<f64> {
        self.inner.cumulative_work(n).map_err(value_err)
    }

    fn cumulative_reduction(&self, n: usize) -> PyResult<f64> {
        self.inner.cumulative_reduction(n).map_err(value_err)
    }

    /// Coefficient of performance after `n` rounds.
    fn cumulative_cop(&self, n: usize) -> PyResult<f64> {
        cumulative_cop(&self.inner, n).map_err(value_err)
    }

    fn min_round_work(&self) -> Option<f64> {
        self.inner.min_round_work()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __repr__(&self) -> String {
        format!(
            "Ledger({}, rounds={})",
            self.inner.label(),
            self.inner.rounds()
        )
    }
}

/// Thermal populations of `h` against `bath`.
#[pyfunction(name = "gibbs")]
fn gibbs_py(h: &Hamiltonian, bath: &Bath) -> Vec<f64> {
    finitherm::spectra::gibbs(&h.inner, &bath.inner).to_vec()
}

/// Populations reweighted by inverse Boltzmann factors.
#[pyfunction(name = "weighted_populations")]
fn weighted_populations_py(p: Vec<f64>, h: &Hamiltonian, bath: &Bath) -> PyResult<Vec<f64>> {
    finitherm::spectra::weighted_populations(&population(p)?, &h.inner, &bath.inner)
        .map_err(value_err)
}

/// Level order of decreasing weighted population.
#[pyfunction(name = "beta_ordering")]
fn beta_ordering_py(p: Vec<f64>, h: &Hamiltonian, bath: &Bath) -> PyResult<Vec<usize>> {
    finitherm::spectra::beta_ordering(&population(p)?, &h.inner, &bath.inner).map_err(value_err)
}

/// Whether weighted populations are non-decreasing in the level index.
#[pyfunction(name = "satisfies_r3")]
fn satisfies_r3_py(p: Vec<f64>, h: &Hamiltonian, bath: &Bath) -> PyResult<bool> {
    finitherm::spectra::satisfies_r3(&population(p)?, &h.inner, &bath.inner).map_err(value_err)
}

/// Mean energy of `p` relative to the ground level.
#[pyfunction(name = "mean_energy")]
fn mean_energy_py(p: Vec<f64>, h: &Hamiltonian, bath: &Bath) -> PyResult<f64> {
    Ok(mean_energy(&population(p)?, &h.inner, &bath.inner))
}

/// Best ground population reachable in one collision, with the plain-text
/// description of an optimizing channel when the blocks are small enough
/// to keep.
#[pyfunction(name = "optimal_ground_population")]
#[pyo3(signature = (p, hs, hr, bath, targets = vec![0], cap = 8))]
fn optimal_ground_population_py(
    p: Vec<f64>,
    hs: &Hamiltonian,
    hr: &Hamiltonian,
    bath: &Bath,
    targets: Vec<usize>,
    cap: usize,
) -> PyResult<(f64, Option<String>)> {
    let best = optimal_subset_collision(
        &population(p)?,
        &hs.inner,
        &hr.inner,
        &bath.inner,
        &targets,
        cap,
    )
    .map_err(value_err)?;
    Ok((best.p0_star, best.witness.map(|w| w.to_text())))
}

/// Cooling bound for a molecule sharing the system's spectrum structure.
#[pyfunction(name = "cooling_bound_verdict")]
fn cooling_bound_verdict_py(
    hs: &Hamiltonian,
    hr: &Hamiltonian,
    p: Vec<f64>,
    bath: &Bath,
) -> PyResult<Verdict> {
    Ok(Verdict {
        inner: verify_theorem2(&hs.inner, &hr.inner, &population(p)?, &bath.inner)
            .map_err(value_err)?,
    })
}

/// Cooling bound for `nu` molecule copies against `mu` system copies.
#[pyfunction(name = "composite_cooling_verdict")]
fn composite_cooling_verdict_py(
    h: &Hamiltonian,
    mu: usize,
    nu: usize,
    p: Vec<f64>,
    bath: &Bath,
) -> PyResult<Verdict> {
    Ok(Verdict {
        inner: verify_theorem3(&h.inner, mu, nu, &population(p)?, &bath.inner)
            .map_err(value_err)?,
    })
}

/// Ground population (reached, bound) when the level-spacing premise is
/// dropped: the bound fails.
#[pyfunction(name = "unequal_gap_counterexample")]
fn unequal_gap_counterexample_py(bath: &Bath) -> (f64, f64) {
    counterexample_r2(&bath.inner)
}

/// Ground population (reached, bound) for three identical qubits cooled
/// as one block: the per-copy premise fails and the bound is beaten.
#[pyfunction(name = "three_qubit_counterexample")]
fn three_qubit_counterexample_py(pbar0: f64, bath: &Bath) -> PyResult<(f64, f64)> {
    three_qubit_example(pbar0, &bath.inner).map_err(value_err)
}

/// Reachable-region boundary for a qubit after `n` identical collisions:
/// rows of (z, eta_lower, eta_upper). `mto=True` relaxes to the full
/// thermal-operation cone.
#[pyfunction(name = "qubit_cone_boundary")]
#[pyo3(signature = (eta, phi, z, bath, n = 1, samples = 41, mto = false))]
#[allow(clippy::too_many_arguments)]
fn qubit_cone_boundary_py(
    eta: f64,
    phi: f64,
    z: f64,
    bath: &Bath,
    n: u32,
    samples: usize,
    mto: bool,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let b = BlochState::new(eta, phi, z).map_err(value_err)?;
    let cone = if mto {
        mto_qubit_cone(&b, &bath.inner)
    } else {
        qubit_cone(&b, &bath.inner, n)
    };
    Ok(cone.boundary_points(samples))
}

/// Whether `(eta2, z2)` is reachable from `(eta, phi, z)` within `n`
/// collisions, up to `tol`.
#[pyfunction(name = "qubit_cone_contains")]
#[pyo3(signature = (eta, phi, z, eta2, z2, bath, n = 1, tol = 1e-9))]
#[allow(clippy::too_many_arguments)]
fn qubit_cone_contains_py(
    eta: f64,
    phi: f64,
    z: f64,
    eta2: f64,
    z2: f64,
    bath: &Bath,
    n: u32,
    tol: f64,
) -> PyResult<bool> {
    let b = BlochState::new(eta, phi, z).map_err(value_err)?;
    let target = BlochState::new(eta2, 0.0, z2).map_err(value_err)?;
    Ok(qubit_cone(&b, &bath.inner, n).contains(&target, tol))
}

/// Bloch coordinates after `n` collisions with unitary parameters
/// (|u00|, alpha).
#[pyfunction(name = "qubit_collision")]
#[pyo3(signature = (eta, phi, z, u00_abs, alpha, bath, n = 1))]
#[allow(clippy::too_many_arguments)]
fn qubit_collision_py(
    eta: f64,
    phi: f64,
    z: f64,
    u00_abs: f64,
    alpha: f64,
    bath: &Bath,
    n: u32,
) -> PyResult<(f64, f64, f64)> {
    let b = BlochState::new(eta, phi, z).map_err(value_err)?;
    let params = QubitCollisionParams { u00_abs, alpha, n };
    let out = qubit_collision_output(&b, &params, &bath.inner);
    Ok((out.eta, out.phi, out.z))
}

/// Reachable intervals per coordinate and the six extreme points.
type QutritConeTable = (Vec<(f64, f64)>, Vec<Vec<f64>>);

/// Per-coordinate reachable intervals for a qutrit in the inverted-pair
/// ordering class, plus the six extreme points.
#[pyfunction(name = "qutrit_cone")]
fn qutrit_cone_py(p: Vec<f64>, bath: &Bath) -> PyResult<QutritConeTable> {
    let cone = qutrit_cone_subset_v(&population(p)?, &bath.inner).map_err(value_err)?;
    Ok((
        cone.intervals.to_vec(),
        cone.extreme_points.iter().map(|q| q.to_vec()).collect(),
    ))
}

/// Qutrit populations after one collision with block parameters
/// (a1, a2, b2, a2p, b2p, a3).
#[pyfunction(name = "qutrit_collision")]
fn qutrit_collision_py(
    p: Vec<f64>,
    params: (f64, f64, f64, f64, f64, f64),
    bath: &Bath,
) -> PyResult<Vec<f64>> {
    let params = QutritParams {
        a1: params.0,
        a2: params.1,
        b2: params.2,
        a2p: params.3,
        b2p: params.4,
        a3: params.5,
    };
    Ok(
        qutrit_collision_output(&population(p)?, &params, &bath.inner)
            .map_err(value_err)?
            .to_vec(),
    )
}

/// Hull vertices (p0, p1, p2) of the region reachable by sequences of
/// partial two-level thermal resets.
#[pyfunction(name = "qutrit_reset_hull")]
#[pyo3(signature = (p, bath, budget = 6, samples = 4000, seed = 11))]
fn qutrit_reset_hull_py(
    p: Vec<f64>,
    bath: &Bath,
    budget: usize,
    samples: usize,
    seed: u64,
) -> PyResult<Vec<Vec<f64>>> {
    let hull = mto_qutrit_inner_bound(&population(p)?, &bath.inner, budget, samples, seed)
        .map_err(value_err)?;
    Ok(hull.into_iter().map(|q| q.to_vec()).collect())
}

/// Stationary ground population of the ladder pump with `d_S` system
/// levels and a `d_r`-level molecule.
#[pyfunction(name = "cooling_limit")]
fn cooling_limit_py(ds: usize, dr: usize, bath: &Bath) -> PyResult<f64> {
    finitherm::protocols::cooling_limit(ds, dr, &bath.inner).map_err(value_err)
}

/// Best single-round ground populations and work bills of the two
/// protocols: (p1_star_pump, p1_star_machine, w1_pump, w1_machine).
#[pyfunction(name = "single_round_optima")]
fn single_round_optima_py(bath: &Bath) -> (f64, f64, f64, f64) {
    let o = finitherm::protocols::single_round_optima(&bath.inner);
    (o.p1_star_i, o.p1_star_ii, o.w1_i, o.w1_ii)
}

/// First-round work bill of the unrestricted-thermal-operation scheme.
#[pyfunction(name = "xhbac_first_round_work")]
fn xhbac_first_round_work_py(ds: usize, bath: &Bath) -> PyResult<f64> {
    finitherm::thermo::xhbac_first_round_work(ds, &bath.inner).map_err(value_err)
}

#[pymodule]
fn finitherm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Bath>()?;
    m.add_class::<Hamiltonian>()?;
    m.add_class::<Verdict>()?;
    m.add_class::<Protocol>()?;
    m.add_class::<Ledger>()?;
    m.add_function(wrap_pyfunction!(gibbs_py, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_populations_py, m)?)?;
    m.add_function(wrap_pyfunction!(beta_ordering_py, m)?)?;
    m.add_function(wrap_pyfunction!(satisfies_r3_py, m)?)?;
    m.add_function(wrap_pyfunction!(mean_energy_py, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_ground_population_py, m)?)?;
    m.add_function(wrap_pyfunction!(cooling_bound_verdict_py, m)?)?;
    m.add_function(wrap_pyfunction!(composite_cooling_verdict_py, m)?)?;
    m.add_function(wrap_pyfunction!(unequal_gap_counterexample_py, m)?)?;
    m.add_function(wrap_pyfunction!(three_qubit_counterexample_py, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_cone_boundary_py, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_cone_contains_py, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_collision_py, m)?)?;
    m.add_function(wrap_pyfunction!(qutrit_cone_py, m)?)?;
    m.add_function(wrap_pyfunction!(qutrit_collision_py, m)?)?;
    m.add_function(wrap_pyfunction!(qutrit_reset_hull_py, m)?)?;
    m.add_function(wrap_pyfunction!(cooling_limit_py, m)?)?;
    m.add_function(wrap_pyfunction!(single_round_optima_py, m)?)?;
    m.add_function(wrap_pyfunction!(xhbac_first_round_work_py, m)?)?;
    Ok(())
}
