//! Sampling oracle against every analytic receiver formula, 10⁷ trials per
//! point, agreement within four binomial standard errors.

use binrx::constellation::{make_bpsk, make_ook, BinaryConstellation};
use binrx::montecarlo::{kennedy_trials, simulate_perr, Estimate, Scheme, TrialConfig};
use binrx::optimizer::parametrize;
use binrx::receivers::{
    generalized_kennedy, perr_bpsk_hom, perr_kennedy, perr_ook_dd, Orientation, ReceiverConfig,
};
use binrx::{ComplexAmplitude, PhaseNoise};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIALS: u64 = 10_000_000;
const HALF_EXP_M4: f64 = 0.009157819444367090146859;
const HALF_ERFC_2: f64 = 0.002338867490523632918966;
/// ⟨½·erfc(2·cos φ)⟩ for φ ~ N(0, 0.45²), mpmath quadrature at 30 digits.
const HOM_NBAR2_SIGMA045: f64 = 0.01039004445188384295;

fn noise(sigma: f64) -> PhaseNoise {
    PhaseNoise::new(sigma).unwrap()
}

fn direct_detection(nbar: f64, sigma: f64, seed: u64) -> Estimate {
    let cfg = ReceiverConfig::new(ComplexAmplitude::ZERO, 0, 1).unwrap();
    simulate_perr(
        &make_ook(nbar).unwrap(),
        &noise(sigma),
        &kennedy_trials(cfg, Orientation::Standard, TRIALS, seed),
    )
    .unwrap()
}

fn homodyne(nbar: f64, sigma: f64, seed: u64) -> Estimate {
    let t = TrialConfig {
        trials: TRIALS,
        seed,
        scheme: Scheme::Homodyne,
    };
    simulate_perr(&make_bpsk(nbar).unwrap(), &noise(sigma), &t).unwrap()
}

fn assert_agrees(label: &str, est: &Estimate, analytic: f64) {
    let z = est.z_score(analytic);
    assert!(
        z.abs() < 4.0,
        "{label}: analytic {analytic:e}, sampled {:e} ± {:e} (z = {z:.2})",
        est.estimate,
        est.std_error
    );
    assert!((0.0..=1.0).contains(&est.estimate) && est.std_error >= 0.0);
}

#[test]
fn direct_detection_ignores_phase_noise() {
    assert_agrees(
        "ook/dd sigma=0.3",
        &direct_detection(2.0, 0.3, 11),
        HALF_EXP_M4,
    );
}

#[test]
fn noiseless_homodyne() {
    assert_agrees("bpsk/hom sigma=0", &homodyne(2.0, 0.0, 12), HALF_ERFC_2);
}

#[test]
fn homodyne_under_strong_phase_noise() {
    let analytic = perr_bpsk_hom(2.0, &noise(0.45)).unwrap();
    assert!(((analytic - HOM_NBAR2_SIGMA045) / HOM_NBAR2_SIGMA045).abs() < 1e-9);
    assert_agrees("bpsk/hom sigma=0.45", &homodyne(2.0, 0.45, 13), analytic);
}

#[test]
fn randomized_battery_over_every_receiver() {
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    for i in 0..3u64 {
        let nbar: f64 = rng.random_range(0.3..=5.0);
        let sigma = rng.random_range(0.0..=0.8);
        let tag = format!("nbar={nbar:.3}, sigma={sigma:.3}");

        assert_agrees(
            &format!("ook/dd {tag}"),
            &direct_detection(nbar, sigma, 100 + i),
            perr_ook_dd(nbar),
        );
        assert_agrees(
            &format!("bpsk/hom {tag}"),
            &homodyne(nbar, sigma, 200 + i),
            perr_bpsk_hom(nbar, &noise(sigma)).unwrap(),
        );

        let bpsk = make_bpsk(nbar).unwrap();
        let nulling = ReceiverConfig::new(-bpsk.alpha0, 0, 1).unwrap();
        let est = simulate_perr(
            &bpsk,
            &noise(sigma),
            &kennedy_trials(nulling, Orientation::Standard, TRIALS, 300 + i),
        )
        .unwrap();
        assert_agrees(
            &format!("kennedy {tag}"),
            &est,
            perr_kennedy(nbar, &noise(sigma)).unwrap(),
        );

        let c: BinaryConstellation = parametrize(rng.random_range(0.0..std::f64::consts::PI), nbar);
        let beta = rng.random_range(-2.0..2.0);
        let k = rng.random_range(0..=3u32);
        let cfg = ReceiverConfig::new(ComplexAmplitude::new(beta, 0.3 * beta), k, 4).unwrap();
        let analytic = generalized_kennedy(&c, &cfg, &noise(sigma)).unwrap();
        for orientation in [Orientation::Standard, Orientation::Swapped] {
            let est = simulate_perr(
                &c,
                &noise(sigma),
                &kennedy_trials(cfg, orientation, TRIALS, 400 + 2 * i + orientation as u64),
            )
            .unwrap();
            let expected = match orientation {
                Orientation::Standard => analytic.perr_standard,
                Orientation::Swapped => 1.0 - analytic.perr_standard,
            };
            assert_agrees(
                &format!("generalized K={k} {orientation} {tag}"),
                &est,
                expected,
            );
        }
    }
}
