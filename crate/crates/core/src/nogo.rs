//! Single-collision cooling bounds: premise checking, verdicts against the
//! per-subspace optimum, and the two explicit constructions that beat the
//! bound when a premise fails.
//!
//! The bound states that when the molecule is no larger than the system
//! (R1), shares its lower spectrum (R2), and the initial weighted
//! populations are non-decreasing (R3), no single collision can push the
//! ground population above its Gibbs value.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::collision::{apply_collision, optimal_subset_collision, BlockChannel, ChannelError};
use crate::spectra::{
    composite_hamiltonian, gibbs, r3_witness, satisfies_r3, BathSpec, HamiltonianSpec,
    PopulationVector, SpectraError,
};

/// Tolerance for the bound comparison and for spectrum equality in R2.
pub const BOUND_TOL: f64 = 1e-12;

/// Witness permutations are built for subspaces up to this size; sweep
/// instances stay well below it.
const WITNESS_CAP: usize = 64;

#[derive(Debug, Error)]
pub enum NoGoError {
    #[error("premises not satisfied: R1={} R2={} R3={}", .0.r1, .0.r2, .0.r3)]
    PremisesViolated(NoGoPremises),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// The three requirements gating the single-collision bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoGoPremises {
    /// molecule no larger than the system
    pub r1: bool,
    /// molecule spectrum equals the lower system spectrum
    pub r2: bool,
    /// weighted populations non-decreasing with energy
    pub r3: bool,
}

impl NoGoPremises {
    pub fn all(&self) -> bool {
        self.r1 && self.r2 && self.r3
    }
}

/// Outcome of testing the bound on one instance.
#[derive(Debug, Clone)]
pub struct NoGoVerdict {
    pub premises: NoGoPremises,
    pub p0_star: f64,
    pub tau0_s: f64,
    pub bound_holds: bool,
    pub witness: Option<BlockChannel>,
}

impl NoGoVerdict {
    /// How far below the Gibbs ground population the optimum stays.
    pub fn margin(&self) -> f64 {
        self.tau0_s - self.p0_star
    }

    pub fn report_header() -> &'static str {
        "R1,R2,R3,p0_star,tau0_S,margin,bound_holds"
    }

    pub fn report_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.premises.r1,
            self.premises.r2,
            self.premises.r3,
            self.p0_star,
            self.tau0_s,
            self.margin(),
            self.bound_holds
        )
    }
}

/// Evaluate the three premises for a system/molecule pair and initial state.
pub fn check_premises(
    hs: &HamiltonianSpec,
    hr: &HamiltonianSpec,
    p: &PopulationVector,
    bath: &BathSpec,
) -> Result<NoGoPremises, NoGoError> {
    let r1 = hs.dim() >= hr.dim();
    let r2 = hr.dim() <= hs.dim()
        && (0..hr.dim()).all(|j| (hs.level(j) - hr.level(j)).abs() <= BOUND_TOL);
    let r3 = satisfies_r3(p, hs, bath)?;
    Ok(NoGoPremises { r1, r2, r3 })
}

fn verdict_for(
    hs: &HamiltonianSpec,
    hr: &HamiltonianSpec,
    p: &PopulationVector,
    bath: &BathSpec,
    premises: NoGoPremises,
) -> Result<NoGoVerdict, NoGoError> {
    let optimal = optimal_subset_collision(p, hs, hr, bath, &[0], WITNESS_CAP)?;
    let tau0_s = gibbs(hs, bath)[0];
    Ok(NoGoVerdict {
        premises,
        p0_star: optimal.p0_star,
        tau0_s,
        bound_holds: optimal.p0_star <= tau0_s + BOUND_TOL,
        witness: optimal.witness,
    })
}

/// Test the bound on a system/molecule instance whose premises all hold.
pub fn verify_theorem2(
    hs: &HamiltonianSpec,
    hr: &HamiltonianSpec,
    p: &PopulationVector,
    bath: &BathSpec,
) -> Result<NoGoVerdict, NoGoError> {
    let premises = check_premises(hs, hr, p, bath)?;
    if !premises.all() {
        return Err(NoGoError::PremisesViolated(premises));
    }
    verdict_for(hs, hr, p, bath, premises)
}

/// Test the bound for a system of `mu` independent copies of `h` colliding
/// with `nu` fresh thermal copies; the compared population is that of the
/// all-ground product state.
pub fn verify_theorem3(
    h: &HamiltonianSpec,
    mu: usize,
    nu: usize,
    p: &PopulationVector,
    bath: &BathSpec,
) -> Result<NoGoVerdict, NoGoError> {
    if nu == 0 || nu > mu {
        return Err(NoGoError::Precondition(format!(
            "copy counts must satisfy 1 <= nu <= mu, got mu = {mu}, nu = {nu}"
        )));
    }
    let comp_s = composite_hamiltonian(h, mu)?;
    let comp_r = composite_hamiltonian(h, nu)?;
    let r3 = satisfies_r3(p, comp_s.spec(), bath)?;
    let premises = NoGoPremises {
        r1: true,
        r2: true,
        r3,
    };
    if !r3 {
        return Err(NoGoError::PremisesViolated(premises));
    }
    let ground = comp_s
        .index_of(&vec![0; mu])
        .expect("all-ground label exists");
    let optimal = optimal_subset_collision(
        p,
        comp_s.spec(),
        comp_r.spec(),
        bath,
        &[ground],
        WITNESS_CAP,
    )?;
    let tau0_s = gibbs(comp_s.spec(), bath)[ground];
    Ok(NoGoVerdict {
        premises,
        p0_star: optimal.p0_star,
        tau0_s,
        bound_holds: optimal.p0_star <= tau0_s + BOUND_TOL,
        witness: optimal.witness,
    })
}

/// Cooling beyond the Gibbs ground population when the molecule spectrum
/// differs from the system's (R2 fails): a qutrit colliding with a two-level
/// molecule of double gap, starting from the top level.
///
/// Returns the achieved ground population and the Gibbs ground population it
/// beats.
pub fn counterexample_r2(bath: &BathSpec) -> (f64, f64) {
    let hs = HamiltonianSpec::equally_spaced(3).expect("d = 3");
    let hr = HamiltonianSpec::explicit(vec![0.0, 2.0], "double-gap qubit").expect("two levels");
    // joint energies 0, 1, 2, 2, 3, 4; swap the degenerate pair at 2
    let channel = BlockChannel::permutation_blocks(
        &hs,
        &hr,
        vec![vec![0], vec![0], vec![1, 0], vec![0], vec![0]],
    )
    .expect("valid permutation blocks");
    let p = PopulationVector::point_mass(3, 2);
    let out = apply_collision(&channel, &p, bath).expect("matching dimensions");

    let q = bath.q();
    let closed_form = 1.0 / (1.0 + q * q);
    assert!(
        (out[0] - closed_form).abs() <= 1e-14,
        "swap collision must land the closed-form ground population"
    );
    let tau0_s = gibbs(&hs, bath)[0];
    assert!(out[0] > tau0_s, "counterexample must beat the Gibbs bound");
    (out[0], tau0_s)
}

/// Cooling beyond the Gibbs ground population when the initial state has no
/// effective temperature (R3 fails): three qubits with the first hotter than
/// the bath, colliding with three fresh thermal qubits.
///
/// Returns the best reachable all-ground population and the Gibbs value it
/// beats; the two coincide when `pbar0` equals the thermal qubit population.
pub fn three_qubit_example(pbar0: f64, bath: &BathSpec) -> Result<(f64, f64), NoGoError> {
    let q = bath.q();
    let tau0 = 1.0 / (1.0 + q);
    let tau1 = q / (1.0 + q);
    if !(0.0..=1.0).contains(&pbar0) || pbar0 > tau0 + BOUND_TOL {
        return Err(NoGoError::Precondition(format!(
            "first qubit must be hotter than the bath: pbar0 = {pbar0}, thermal = {tau0}"
        )));
    }

    let qubit = HamiltonianSpec::qubit();
    let comp = composite_hamiltonian(&qubit, 3)?;
    let single = PopulationVector::new(vec![pbar0, 1.0 - pbar0])?;
    let thermal = gibbs(&qubit, bath);
    let mut probs = vec![0.0; comp.spec().dim()];
    for (idx, label) in (0..comp.spec().dim()).map(|i| (i, comp.label(i))) {
        let parts = [&single, &thermal, &thermal];
        probs[idx] = label.iter().zip(parts).map(|(&l, part)| part[l]).product();
    }
    let p = PopulationVector::new(probs)?;
    if pbar0 < tau0 - BOUND_TOL {
        let witness = r3_witness(&p, comp.spec(), bath)?;
        assert_eq!(
            witness,
            Some((3, 4)),
            "weighted populations must first decrease between the one-excitation \
             and two-excitation levels"
        );
    }

    let pbar0_next = tau0 + tau0 * tau1 * (tau0 - pbar0);
    let p_ground_out = pbar0_next * tau0 * tau0;
    let tau0_s = tau0.powi(3);
    assert!(
        p_ground_out + BOUND_TOL >= tau0_s,
        "cooling construction must not fall below the Gibbs value"
    );
    Ok((p_ground_out, tau0_s))
}

/// Random state whose weighted populations are non-decreasing: rejection
/// sampling from the simplex, with a direct construction (sorted weighted
/// populations) once the rejection budget runs out.
pub fn random_r3_state<R: Rng>(
    h: &HamiltonianSpec,
    bath: &BathSpec,
    rng: &mut R,
) -> Result<PopulationVector, NoGoError> {
    let d = h.dim();
    for _ in 0..200 {
        let raw: Vec<f64> = (0..d).map(|_| -rng.random::<f64>().ln()).collect();
        let p = PopulationVector::normalized(raw)?;
        if satisfies_r3(&p, h, bath)? {
            return Ok(p);
        }
    }
    let mut xi: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 1e-6).collect();
    xi.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    let raw: Vec<f64> = xi
        .iter()
        .enumerate()
        .map(|(j, x)| x * bath.weight(h.level(j) - h.level(0)))
        .collect();
    let p = PopulationVector::normalized(raw)?;
    debug_assert!(satisfies_r3(&p, h, bath)?);
    Ok(p)
}

/// Seeded sweep of random instances with all premises holding: random system
/// spectra up to dimension five, molecule spectra truncating them, and
/// random non-decreasing weighted populations.
pub fn sweep_theorem2(
    bath: &BathSpec,
    instances: usize,
    seed: u64,
) -> Result<Vec<NoGoVerdict>, NoGoError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut verdicts = Vec::with_capacity(instances);
    for _ in 0..instances {
        let ds = rng.random_range(2..=5usize);
        let dr = rng.random_range(2..=ds);
        let mut levels = vec![0.0];
        for j in 1..ds {
            levels.push(levels[j - 1] + 0.25 + 1.75 * rng.random::<f64>());
        }
        let hs = HamiltonianSpec::explicit(levels.clone(), "random system")?;
        let hr = HamiltonianSpec::explicit(levels[..dr].to_vec(), "truncated molecule")?;
        let p = random_r3_state(&hs, bath, &mut rng)?;
        verdicts.push(verify_theorem2(&hs, &hr, &p, bath)?);
    }
    Ok(verdicts)
}

/// Seeded sweep over random non-decreasing weighted populations of the
/// `mu`-copy composite, each colliding with `nu` fresh thermal copies.
pub fn sweep_theorem3(
    h: &HamiltonianSpec,
    mu: usize,
    nu: usize,
    bath: &BathSpec,
    instances: usize,
    seed: u64,
) -> Result<Vec<NoGoVerdict>, NoGoError> {
    let comp_s = composite_hamiltonian(h, mu)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut verdicts = Vec::with_capacity(instances);
    for _ in 0..instances {
        let p = random_r3_state(comp_s.spec(), bath, &mut rng)?;
        verdicts.push(verify_theorem3(h, mu, nu, &p, bath)?);
    }
    Ok(verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bath_q(q: f64) -> BathSpec {
        BathSpec::from_q(q, 1.0).unwrap()
    }

    #[test]
    fn premises_on_reference_instances() {
        let bath = bath_q(0.5);
        let h3 = HamiltonianSpec::equally_spaced(3).unwrap();
        let tau = gibbs(&h3, &bath);
        let prem = check_premises(&h3, &h3, &tau, &bath).unwrap();
        assert!(prem.r1 && prem.r2 && prem.r3);

        let doubled = HamiltonianSpec::explicit(vec![0.0, 2.0], "double-gap qubit").unwrap();
        let prem = check_premises(&h3, &doubled, &tau, &bath).unwrap();
        assert!(prem.r1 && !prem.r2);

        let h4 = HamiltonianSpec::equally_spaced(4).unwrap();
        let inverted = PopulationVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let prem = check_premises(&h4, &h3, &inverted, &bath).unwrap();
        assert!(prem.all());
    }

    #[test]
    fn gibbs_input_reaches_the_bound_exactly() {
        let bath = bath_q(0.5);
        let h3 = HamiltonianSpec::equally_spaced(3).unwrap();
        let tau = gibbs(&h3, &bath);
        let verdict = verify_theorem2(&h3, &h3, &tau, &bath).unwrap();
        assert!(verdict.bound_holds);
        assert_abs_diff_eq!(verdict.p0_star, verdict.tau0_s, epsilon = 1e-15);
    }

    #[test]
    fn hotter_gibbs_input_with_equal_dimensions_reaches_the_bound() {
        let bath = bath_q(0.5);
        let hot = bath_q(0.7);
        let h3 = HamiltonianSpec::equally_spaced(3).unwrap();
        let p = gibbs(&h3, &hot);
        let verdict = verify_theorem2(&h3, &h3, &p, &bath).unwrap();
        assert!(verdict.bound_holds);
        assert_abs_diff_eq!(verdict.p0_star, verdict.tau0_s, epsilon = 1e-14);
    }

    #[test]
    fn premise_violation_is_reported_not_evaluated() {
        let bath = bath_q(0.5);
        let h3 = HamiltonianSpec::equally_spaced(3).unwrap();
        let tau = gibbs(&h3, &bath);
        let cold = PopulationVector::new(vec![0.8, 0.15, 0.05]).unwrap();
        assert!(matches!(
            verify_theorem2(&h3, &h3, &cold, &bath),
            Err(NoGoError::PremisesViolated(p)) if p.r1 && p.r2 && !p.r3
        ));
        let doubled = HamiltonianSpec::explicit(vec![0.0, 2.0], "double-gap qubit").unwrap();
        assert!(matches!(
            verify_theorem2(&h3, &doubled, &tau, &bath),
            Err(NoGoError::PremisesViolated(p)) if !p.r2
        ));
    }

    #[test]
    fn sweep_upholds_the_bound_everywhere() {
        let bath = bath_q(0.5);
        let verdicts = sweep_theorem2(&bath, 200, 2024).unwrap();
        assert_eq!(verdicts.len(), 200);
        for v in &verdicts {
            assert!(v.premises.all());
            assert!(v.p0_star - v.tau0_s <= BOUND_TOL, "margin {}", v.margin());
        }
        // the sweep must exercise genuinely non-thermal states too
        assert!(verdicts.iter().any(|v| v.margin() > 1e-3));
    }

    #[test]
    fn composite_sweep_upholds_the_bound() {
        let bath = bath_q(0.5);
        let qubit = HamiltonianSpec::qubit();
        let verdicts = sweep_theorem3(&qubit, 3, 2, &bath, 50, 7).unwrap();
        assert_eq!(verdicts.len(), 50);
        for v in &verdicts {
            assert!(v.p0_star - v.tau0_s <= BOUND_TOL, "margin {}", v.margin());
        }
    }

    #[test]
    fn composite_equal_copies_at_gibbs_reach_equality() {
        let bath = bath_q(0.5);
        let qubit = HamiltonianSpec::qubit();
        let comp = composite_hamiltonian(&qubit, 2).unwrap();
        let tau = gibbs(comp.spec(), &bath);
        let verdict = verify_theorem3(&qubit, 2, 2, &tau, &bath).unwrap();
        assert!(verdict.bound_holds);
        assert_abs_diff_eq!(verdict.p0_star, verdict.tau0_s, epsilon = 1e-15);
    }

    #[test]
    fn composite_hotter_gibbs_stays_strictly_below() {
        let bath = bath_q(0.5);
        let hot = bath_q(0.7);
        let qubit = HamiltonianSpec::qubit();
        let comp = composite_hamiltonian(&qubit, 2).unwrap();
        let tau_hot = gibbs(comp.spec(), &hot);
        let verdict = verify_theorem3(&qubit, 2, 1, &tau_hot, &bath).unwrap();
        assert!(verdict.bound_holds);
        assert!(verdict.margin() > 1e-3);
    }

    #[test]
    fn double_gap_molecule_beats_the_bound() {
        for (q, want_p0, want_tau) in [
            (0.5, 0.8, 0.571429),
            (0.999, 0.50050025, 0.33366678),
            (0.3, 0.917431, 0.719424),
        ] {
            let (p0, tau0) = counterexample_r2(&bath_q(q));
            assert_abs_diff_eq!(p0, want_p0, epsilon = 1e-6);
            assert_abs_diff_eq!(tau0, want_tau, epsilon = 1e-6);
            assert!(p0 > tau0);
        }
    }

    #[test]
    fn hot_first_qubit_beats_the_bound() {
        let bath = bath_q(0.5);
        let (out, tau0_s) = three_qubit_example(0.6, &bath).unwrap();
        assert_abs_diff_eq!(out, 0.302880, epsilon = 1e-6);
        assert_abs_diff_eq!(tau0_s, 0.296296, epsilon = 1e-6);
        assert!(out > tau0_s);

        let tau0 = 1.0 / 1.5;
        let (boundary, tau0_s) = three_qubit_example(tau0, &bath).unwrap();
        assert_abs_diff_eq!(boundary, tau0_s, epsilon = 1e-15);

        assert!(three_qubit_example(0.9, &bath).is_err());
    }

    #[test]
    fn three_qubit_value_matches_the_composite_optimum() {
        let bath = bath_q(0.3);
        let pbar0 = 0.7;
        let (out, tau0_s) = three_qubit_example(pbar0, &bath).unwrap();
        assert!(out > tau0_s);

        let qubit = HamiltonianSpec::qubit();
        let comp = composite_hamiltonian(&qubit, 3).unwrap();
        let single = PopulationVector::new(vec![pbar0, 1.0 - pbar0]).unwrap();
        let thermal = gibbs(&qubit, &bath);
        let mut probs = vec![0.0; 8];
        for (idx, slot) in probs.iter_mut().enumerate() {
            let label = comp.label(idx);
            let parts = [&single, &thermal, &thermal];
            *slot = label.iter().zip(parts).map(|(&l, part)| part[l]).product();
        }
        let p = PopulationVector::new(probs).unwrap();
        let optimal =
            optimal_subset_collision(&p, comp.spec(), comp.spec(), &bath, &[0], WITNESS_CAP)
                .unwrap();
        assert_abs_diff_eq!(optimal.p0_star, out, epsilon = 1e-12);
        let witness = optimal.witness.expect("cap covers all subspaces");
        let realized = apply_collision(&witness, &p, &bath).unwrap();
        assert_abs_diff_eq!(realized[0], out, epsilon = 1e-12);
    }

    #[test]
    fn counterexample_margins_across_the_temperature_grid() {
        for i in 1..=9 {
            let q = 0.1 * i as f64;
            let bath = bath_q(q);
            let (p0, tau0) = counterexample_r2(&bath);
            assert!(p0 - tau0 >= 1e-6, "q = {q}");
            let tau0_bar = 1.0 / (1.0 + q);
            let (out, tau0_s) = three_qubit_example(0.9 * tau0_bar, &bath).unwrap();
            assert!(out - tau0_s >= 1e-6, "q = {q}");
        }
    }

    #[test]
    fn report_rows_are_well_formed() {
        let bath = bath_q(0.5);
        let h3 = HamiltonianSpec::equally_spaced(3).unwrap();
        let tau = gibbs(&h3, &bath);
        let verdict = verify_theorem2(&h3, &h3, &tau, &bath).unwrap();
        assert_eq!(NoGoVerdict::report_header().split(',').count(), 7);
        assert_eq!(verdict.report_row().split(',').count(), 7);
        assert!(verdict.report_row().starts_with("true,true,true,"));
    }
}
