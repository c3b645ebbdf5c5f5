//! Acceptance gate: eleven go/no-go checks covering every layer of the
//! engine, each printing exactly one PASS/FAIL line. Criteria with a
//! runtime budget time the whole campaign and fail when the budget is
//! exceeded, so a regression in either correctness or speed turns the
//! gate red. All checks share one fixed seed; every random case derives
//! its own PRNG stream from (seed, case index) and is replayable alone.

use std::time::{Duration, Instant};

use qpath_core::verify::{
    actclasstraj_campaign, balanced_campaign, covariance_campaign, cv_campaign,
    gauss_exactness_campaign, gauss_extension_campaign, genfun_forms_campaign, kahler_campaign,
    main_disc_campaign, oracle_campaign, recovery_campaign, unitarity_campaign,
    wigner_line_campaign, CampaignOutcome,
};

const SEED: u64 = 7;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate { failures: Vec::new() }
    }

    /// Run one criterion, print its single PASS/FAIL line, and record
    /// the failure detail for the final assertion.
    fn criterion(
        &mut self,
        number: u32,
        description: &str,
        budget: Option<Duration>,
        run: impl FnOnce() -> Vec<CampaignOutcome>,
    ) {
        let start = Instant::now();
        let outcomes = run();
        let elapsed = start.elapsed();
        let mut problems: Vec<String> = Vec::new();
        for outcome in &outcomes {
            for failure in outcome.failures.iter().take(3) {
                problems.push(format!(
                    "{} case {}: {}",
                    outcome.name, failure.case, failure.detail
                ));
            }
            let extra = outcome.failures.len().saturating_sub(3);
            if extra > 0 {
                problems.push(format!("{}: {extra} more failures", outcome.name));
            }
        }
        if let Some(budget) = budget {
            if elapsed > budget {
                problems.push(format!(
                    "runtime {:.1}s exceeds the {:.0}s budget",
                    elapsed.as_secs_f64(),
                    budget.as_secs_f64()
                ));
            }
        }
        let cases: usize = outcomes.iter().map(|o| o.cases).sum();
        if problems.is_empty() {
            println!(
                "PASS: criterion {number} - {description} ({cases} cases, {:.2}s)",
                elapsed.as_secs_f64()
            );
        } else {
            println!(
                "FAIL: criterion {number} - {description} ({cases} cases, {:.2}s): {}",
                elapsed.as_secs_f64(),
                problems.join("; ")
            );
            self.failures
                .push(format!("criterion {number}: {}", problems.join("; ")));
        }
    }
}

#[test]
fn acceptance_gate() {
    let mut gate = Gate::new();

    gate.criterion(
        1,
        "path-sum amplitudes match the dense oracle within 1e-9 \
         (200 circuits, d in {3,5,7}, n <= 3, <= 8 gates, 10 endpoint pairs each)",
        Some(Duration::from_secs(60)),
        || vec![oracle_campaign(SEED, 200)],
    );

    gate.criterion(
        2,
        "quadratic-sum fast path equals enumeration bit-exactly on the same \
         campaign plus d in {11,13} with n <= 2",
        Some(Duration::from_secs(60)),
        || {
            vec![
                gauss_exactness_campaign(SEED, 200),
                gauss_extension_campaign(SEED, 40),
            ]
        },
    );

    gate.criterion(
        3,
        "path-sum phase equals the classical action exactly \
         (100 circuits per d in {3,5,7})",
        Some(Duration::from_secs(30)),
        || vec![main_disc_campaign(SEED, 100)],
    );

    gate.criterion(
        4,
        "reconstructed generating functions match the closed forms \
         q*Q, 2^-1 q(q-1), and 0 exactly for d in {3,5,7,11}",
        None,
        || vec![genfun_forms_campaign()],
    );

    gate.criterion(
        5,
        "action on classical trajectories exceeds the circuit generating \
         function by one additive constant per case (50 circuits, d in {3,5}, \
         n <= 2, all endpoint pairs, exact arithmetic)",
        None,
        || vec![actclasstraj_campaign(SEED, 50)],
    );

    gate.criterion(
        6,
        "Wigner covariance within 1e-10 per generator against 50 random \
         densities (d in {3,5}); Wigner of |q0><q0| is the uniform line \
         1/d^n within 1e-12",
        None,
        || {
            vec![
                covariance_campaign(SEED, 50),
                wigner_line_campaign(),
            ]
        },
    );

    gate.criterion(
        7,
        "phase-space map recovered from the circuit unitary equals the \
         composed per-gate maps (100 circuits, d = 3, n <= 2)",
        None,
        || vec![recovery_campaign(SEED, 100)],
    );

    gate.criterion(
        8,
        "generators and 50 random products are balanced; magnitudes match \
         one 1/sqrt(d) factor per Fourier gate",
        None,
        || vec![balanced_campaign(SEED, 50)],
    );

    gate.criterion(
        9,
        "exterior calculus laws: d(d(form)) = 0 on 1000 random forms, \
         d(omega) = 0, J invertible for d in {3,5,7,11,13}, and \
         integrate(derivative) round-trips 500 constant-free polynomials",
        None,
        || vec![kahler_campaign(SEED)],
    );

    gate.criterion(
        10,
        "continuous layer: generating relation holds symbolically for all \
         six generators, phase equals action on 100 random circuits, and \
         the three-wire worked example reproduces its boundary and phase \
         polynomials verbatim",
        None,
        || vec![cv_campaign(SEED, 100)],
    );

    gate.criterion(
        11,
        "every amplitude row is unit norm within 1e-9 \
         (100 random circuit and input pairs)",
        None,
        || vec![unitarity_campaign(SEED, 100)],
    );

    assert!(
        gate.failures.is_empty(),
        "acceptance gate failed:\n{}",
        gate.failures.join("\n")
    );
}
