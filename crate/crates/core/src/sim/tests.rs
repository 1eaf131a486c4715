use rand::{Rng, SeedableRng};

use super::*;
use crate::analytic::{self, ModelVariant};
use crate::config::{paper_default, scenario_with_link};

const X_P: f64 = 10.0;

fn spec(mode: SimMode, cycles: u64, seed: u64) -> SimSpec {
    SimSpec::new(mode, cycles, seed)
}

fn within(value: f64, target: f64, se: f64, sigmas: f64) -> bool {
    (value - target).abs() <= sigmas * se
}

#[test]
fn deterministic_cycle_is_exact() {
    let config = scenario_with_link(3, 1.0);
    let dev = config.devices[0].clone();
    for seed in [0, 1, 99] {
        let r = simulate_exact(&config, &dev, X_P, &spec(SimMode::ExactSlot, 500, seed)).unwrap();
        assert_eq!(r.avg_aoi_s, 2.5);
        assert_eq!(r.e_s_hat, 4.0);
        assert_eq!(r.e_s2_hat, 16.0);
        assert_eq!(r.p_s_hat, 1.0);
        assert_eq!(r.e_t_hat, 3.0);
        assert_eq!(r.ci_halfwidth_s, 0.0);

        let f = simulate_fast(&config, &dev, X_P, &spec(SimMode::FastRenewal, 500, seed)).unwrap();
        assert_eq!(f.avg_aoi_s, 2.5);
        assert_eq!(f.e_s_hat, 4.0);
    }
}

#[test]
fn same_seed_is_bit_identical() {
    let config = scenario_with_link(7, 0.6);
    let dev = config.devices[0].clone();
    for mode in [SimMode::ExactSlot, SimMode::FastRenewal] {
        let mut s = spec(mode, 2000, 42);
        s.replications = 4;
        let a = simulate(&config, &dev, X_P, &s).unwrap();
        let b = simulate(&config, &dev, X_P, &s).unwrap();
        s.parallel = true;
        let c = simulate(&config, &dev, X_P, &s).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&c).unwrap());
        s.seed = 43;
        assert_ne!(simulate(&config, &dev, X_P, &s).unwrap().avg_aoi_s, a.avg_aoi_s);
    }
}

#[test]
fn rescaled_reference_scenario_matches_corrected_form() {
    let mut config = paper_default();
    config.energy.capacitor_j = 1e-4;
    let dev = config.devices[0].clone();
    let budget = LinkBudget::evaluate(&config, &dev, X_P).unwrap();
    assert_eq!(budget.charge_slots, 2145);
    let analytic = analytic::average_aoi(&budget.renewal(), 1.0, ModelVariant::CorrectedCompound).value();
    let r = simulate_exact(&config, &dev, X_P, &spec(SimMode::ExactSlot, 10_000, 2024)).unwrap();
    let (lo, hi) = r.aoi_ci();
    assert!(lo <= analytic && analytic <= hi, "{analytic} not in [{lo}, {hi}]");
}

#[test]
fn fast_mode_cycle_mean() {
    let link = RenewalParams::new(3, 0.5, 0.5);
    let r = simulate_fast_link(&link, 1.0, &spec(SimMode::FastRenewal, 1_000_000, 5)).unwrap();
    assert!(within(r.e_s_hat, 14.0, r.e_s_se, Z95), "{} +- {}", r.e_s_hat, r.e_s_se);
}

#[test]
fn modes_agree_on_small_scenario() {
    let config = scenario_with_link(5, 0.7);
    let dev = config.devices[0].clone();
    let exact = simulate_exact(&config, &dev, X_P, &spec(SimMode::ExactSlot, 20_000, 1)).unwrap();
    let fast = simulate_fast(&config, &dev, X_P, &spec(SimMode::FastRenewal, 20_000, 2)).unwrap();
    let (a_lo, a_hi) = exact.aoi_ci();
    let (b_lo, b_hi) = fast.aoi_ci();
    assert!(a_lo <= b_hi && b_lo <= a_hi, "[{a_lo}, {a_hi}] vs [{b_lo}, {b_hi}]");
}

#[test]
fn slot_area_equals_cycle_areas() {
    let config = scenario_with_link(4, 0.55);
    let dev = config.devices[0].clone();
    let trace = simulate_exact_trace(&config, &dev, X_P, &spec(SimMode::ExactSlot, 3000, 8), 0).unwrap();
    assert_eq!(trace.cycle_lengths.len(), 3000);
    let area: u128 = trace
        .cycle_lengths
        .iter()
        .map(|&s| u128::from(s) * u128::from(s + 1) / 2)
        .sum();
    let slots: u64 = trace.cycle_lengths.iter().sum();
    assert_eq!(trace.slot_area, area);
    assert_eq!(trace.result.avg_aoi_s, area as f64 / slots as f64);
    assert!(trace.cycle_lengths.iter().all(|&s| s >= 5));
}

#[test]
fn infeasible_and_budget_errors() {
    let mut config = paper_default();
    config.comm.noise_w = 1e-6;
    let dev = config.devices[0].clone();
    for mode in [SimMode::ExactSlot, SimMode::FastRenewal] {
        let err = simulate(&config, &dev, X_P, &spec(mode, 10, 0)).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err:?}");
    }

    let config = scenario_with_link(10, 0.5);
    let dev = config.devices[0].clone();
    for mode in [SimMode::ExactSlot, SimMode::FastRenewal] {
        let mut s = spec(mode, 1000, 0);
        s.max_slots = Some(500);
        assert!(matches!(
            simulate(&config, &dev, X_P, &s),
            Err(Error::BudgetExceeded { max_slots: 500, .. })
        ));
    }

    assert!(simulate(&config, &dev, X_P, &spec(SimMode::FastRenewal, 0, 0)).is_err());
    let zero = RenewalParams::new(3, 0.5, 0.0);
    assert!(matches!(
        simulate_fast_link(&zero, 1.0, &spec(SimMode::FastRenewal, 10, 0)),
        Err(Error::Infeasible(_))
    ));
}

#[test]
fn merge_single_is_identity() {
    let config = scenario_with_link(3, 0.5);
    let dev = config.devices[0].clone();
    let r = simulate_fast(&config, &dev, X_P, &spec(SimMode::FastRenewal, 1000, 3)).unwrap();
    assert_eq!(merge_replications(std::slice::from_ref(&r)).unwrap(), r);
    assert!(merge_replications(&[]).is_err());
}

#[test]
fn merge_equal_weights_averages() {
    let config = scenario_with_link(3, 0.5);
    let dev = config.devices[0].clone();
    let a = simulate_fast(&config, &dev, X_P, &spec(SimMode::FastRenewal, 5000, 3)).unwrap();
    let b = simulate_fast(&config, &dev, X_P, &spec(SimMode::FastRenewal, 5000, 4)).unwrap();
    let m = merge_replications(&[a.clone(), b.clone()]).unwrap();
    assert_eq!(m.cycles, 10_000);
    assert_eq!(m.replications, 2);
    assert!((m.avg_aoi_s - (a.avg_aoi_s + b.avg_aoi_s) / 2.0).abs() <= 1e-12 * m.avg_aoi_s);
    assert!((m.e_s_hat - (a.e_s_hat + b.e_s_hat) / 2.0).abs() <= 1e-12 * m.e_s_hat);
    assert!(m.ci_halfwidth_s <= a.ci_halfwidth_s.max(b.ci_halfwidth_s));
}

#[test]
fn merge_rejects_other_scenarios() {
    let a_cfg = scenario_with_link(3, 0.5);
    let b_cfg = scenario_with_link(4, 0.5);
    let s = spec(SimMode::FastRenewal, 100, 0);
    let a = simulate_fast(&a_cfg, &a_cfg.devices[0], X_P, &s).unwrap();
    let b = simulate_fast(&b_cfg, &b_cfg.devices[0], X_P, &s).unwrap();
    assert!(matches!(merge_replications(&[a, b]), Err(Error::MismatchedScenario(_))));
}

#[test]
fn replications_use_distinct_streams() {
    let config = scenario_with_link(3, 0.5);
    let dev = config.devices[0].clone();
    let mut s = spec(SimMode::ExactSlot, 1000, 77);
    let one = simulate_exact(&config, &dev, X_P, &s).unwrap();
    s.replications = 2;
    let two = simulate_exact(&config, &dev, X_P, &s).unwrap();
    let second = simulate_exact_trace(&config, &dev, X_P, &s, 1).unwrap().result;
    assert_ne!(one.avg_aoi_s, second.avg_aoi_s);
    assert_eq!(two, merge_replications(&[one, second]).unwrap());
}

/// Random small scenarios: K <= 50 and p in [0.3, 1]; the exact simulator has
/// p_s = p, the fast simulator draws p_s independently.
fn random_scenarios(seed: u64, n: usize) -> Vec<(u64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (
                rng.random_range(1..=50),
                rng.random_range(0.3..=1.0),
                rng.random_range(0.3..=1.0),
            )
        })
        .collect()
}

fn adjudicate(r: &SimResult, link: &RenewalParams) -> Option<ModelVariant> {
    let paper = analytic::expected_cycle_sq(link, ModelVariant::PaperClosedForm).value();
    let corrected = analytic::expected_cycle_sq(link, ModelVariant::CorrectedCompound).value();
    let width = 2.0 * 4.0 * r.e_s2_se;
    if paper - corrected <= 2.0 * width {
        return None;
    }
    let hits: Vec<_> = [
        (ModelVariant::PaperClosedForm, paper),
        (ModelVariant::CorrectedCompound, corrected),
    ]
    .into_iter()
    .filter(|(_, v)| within(r.e_s2_hat, *v, r.e_s2_se, 4.0))
    .collect();
    assert_eq!(
        hits.len(),
        1,
        "e_s2_hat {} +- {} vs paper {paper} corrected {corrected}",
        r.e_s2_hat,
        r.e_s2_se
    );
    Some(hits[0].0)
}

fn check_oracles(r: &SimResult, link: &RenewalParams) {
    let et = analytic::expected_charge_slots(link).value();
    let es = analytic::expected_cycle(link).value();
    assert!(
        within(r.e_t_hat, et, r.e_t_se, 4.0),
        "E[T] {} +- {} vs {et}",
        r.e_t_hat,
        r.e_t_se
    );
    assert!(
        within(r.e_s_hat, es, r.e_s_se, 4.0),
        "E[S] {} +- {} vs {es}",
        r.e_s_hat,
        r.e_s_se
    );
    let ps = link.success_prob;
    let ps_se = (ps * (1.0 - ps) / r.attempts as f64).sqrt();
    assert!(within(r.p_s_hat, ps, ps_se, 4.0), "p_s {} vs {ps}", r.p_s_hat);
}

#[test]
fn exact_slot_agrees_with_closed_forms() {
    let mut verdicts = Vec::new();
    for (i, (k, p, _)) in random_scenarios(2025, 20).into_iter().enumerate() {
        let config = scenario_with_link(k, p);
        let dev = config.devices[0].clone();
        let link = LinkBudget::evaluate(&config, &dev, X_P).unwrap().renewal();
        let r = simulate_exact(&config, &dev, X_P, &spec(SimMode::ExactSlot, 100_000, i as u64)).unwrap();
        check_oracles(&r, &link);
        verdicts.extend(adjudicate(&r, &link));
    }
    assert!(!verdicts.is_empty());
    assert!(
        verdicts.iter().all(|v| *v == ModelVariant::CorrectedCompound),
        "{verdicts:?}"
    );
}

#[test]
fn fast_renewal_agrees_with_closed_forms() {
    let mut verdicts = Vec::new();
    for (i, (k, p, ps)) in random_scenarios(4242, 20).into_iter().enumerate() {
        let link = RenewalParams::new(k, p, ps);
        let r = simulate_fast_link(&link, 1.0, &spec(SimMode::FastRenewal, 100_000, i as u64)).unwrap();
        check_oracles(&r, &link);
        verdicts.extend(adjudicate(&r, &link));
    }
    assert!(!verdicts.is_empty());
    assert!(
        verdicts.iter().all(|v| *v == ModelVariant::CorrectedCompound),
        "{verdicts:?}"
    );
}
