//! Seeded property checks. Each returns `Err` with a description of the
//! first violated invariant.

use qswitch::entanglement::{concurrence, phased_phi, BellState};
use qswitch::matquant::{hermitian_expm, kron, partial_trace, ComplexMatrix, DensityMatrix, Ket};
use qswitch::protocol::{evolve_joint, BranchEvaluator};
use qswitch::switch::{
    apply_switch, branch, completeness_residual, switch_kraus, MeasurementBasis, Sign,
};
use rand::Rng;

use super::*;

pub type Law = fn(u64) -> std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_density(rho: &DensityMatrix, what: &str) -> std::result::Result<(), String> {
    let m = rho.matrix();
    ensure(m.hermiticity_deviation() <= 1e-12, || {
        format!("{what}: not Hermitian ({:e})", m.hermiticity_deviation())
    })?;
    ensure((rho.trace() - 1.0).abs() <= 1e-10, || format!("{what}: trace {}", rho.trace()))?;
    let min = rho.eigenvalues().into_iter().fold(f64::MAX, f64::min);
    ensure(min >= -1e-10, || format!("{what}: eigenvalue {min:e}"))
}

/// Random 2-Kraus channels are complete, and so is the switch built from
/// two of them.
pub fn channel_completeness(seed: u64) -> std::result::Result<(), String> {
    let mut rng = rng(seed);
    let m = random_channel(&mut rng, 4);
    let n = random_channel(&mut rng, 4);
    let r = completeness_residual(m.kraus());
    ensure(r <= 1e-10, || format!("channel residual {r:e}"))?;
    let v = switch_kraus(&m, &n).map_err(|e| e.to_string())?;
    let r = completeness_residual(&v);
    ensure(r <= 1e-10, || format!("switch residual {r:e}"))?;
    let rho = random_two_qubit_state(&mut rng);
    check_density(&m.apply(&rho).map_err(|e| e.to_string())?, "channel output")
}

/// `P(+) + P(−) = 1` for random channels, controls and targets, and for the
/// protocol channels at random parameters.
pub fn branch_probabilities_sum_to_one(seed: u64) -> std::result::Result<(), String> {
    let mut rng = rng(seed);
    let m = random_channel(&mut rng, 4);
    let n = random_channel(&mut rng, 4);
    let rank = rng.gen_range(1..=2);
    let control = random_density(&mut rng, 1, rank);
    let target = random_two_qubit_state(&mut rng);
    let v = switch_kraus(&m, &n).map_err(|e| e.to_string())?;
    let out = apply_switch(&control, &target, &v).map_err(|e| e.to_string())?;
    let basis = MeasurementBasis::default();
    let total: f64 = [Sign::Plus, Sign::Minus]
        .iter()
        .map(|&s| branch(&out, &basis, s).unwrap().trace())
        .sum();
    ensure((total - 1.0).abs() <= 1e-10, || format!("random switch: P(+) + P(-) = {total}"))?;

    let params = random_params(&mut rng);
    let out = evolve_joint(&params, &target).map_err(|e| e.to_string())?;
    let total: f64 = [Sign::Plus, Sign::Minus]
        .iter()
        .map(|&s| branch(&out, &basis, s).unwrap().trace())
        .sum();
    ensure((total - 1.0).abs() <= 1e-10, || format!("{params:?}: P(+) + P(-) = {total}"))?;

    let psi = random_ket(&mut rng, 4);
    let eval = BranchEvaluator::new(&params, &psi).map_err(|e| e.to_string())?;
    let t = params.t;
    let total = eval.probability(t, Sign::Plus) + eval.probability(t, Sign::Minus);
    ensure((total - 1.0).abs() <= 1e-10, || format!("pure evaluator: P(+) + P(-) = {total}"))
}

/// Switch outputs and their post-selected branches are valid density matrices.
pub fn density_invariants(seed: u64) -> std::result::Result<(), String> {
    let mut rng = rng(seed);
    let params = random_params(&mut rng);
    let target = random_two_qubit_state(&mut rng);
    let out = evolve_joint(&params, &target).map_err(|e| e.to_string())?;
    check_density(&out, "joint state")?;
    for keep in [vec![0], vec![1, 2], vec![0, 2]] {
        let reduced = partial_trace(&out, &keep).map_err(|e| e.to_string())?;
        check_density(&reduced, &format!("partial trace keep {keep:?}"))?;
    }
    for sign in [Sign::Plus, Sign::Minus] {
        if let Ok(o) = qswitch::switch::postselect(&out, sign) {
            if o.probability > 1e-6 {
                check_density(&o.reduced_state, &format!("{sign} branch"))?;
            }
        }
    }
    Ok(())
}

/// Concurrence lies in `[0, 1]` and is unchanged by local unitaries.
pub fn concurrence_local_invariance(seed: u64) -> std::result::Result<(), String> {
    let mut rng = rng(seed);
    let rho = random_two_qubit_state(&mut rng);
    let c = concurrence(&rho).map_err(|e| e.to_string())?.value;
    ensure((0.0..=1.0 + 1e-12).contains(&c), || format!("concurrence {c} out of range"))?;
    let u = local_unitary(&mut rng);
    let moved = rho.evolve(&u).map_err(|e| e.to_string())?;
    let c2 = concurrence(&moved).map_err(|e| e.to_string())?.value;
    ensure((c - c2).abs() <= 1e-9, || format!("concurrence {c} became {c2}"))
}

/// Kraus operators that all commute give identical orders, so `P(−) = 0`.
pub fn commuting_channels_never_click_minus(seed: u64) -> std::result::Result<(), String> {
    let mut rng = rng(seed);
    let (m, n) = commuting_channels(&mut rng, 4);
    let control = DensityMatrix::from_ket(&Ket::plus()).unwrap();
    let target = random_two_qubit_state(&mut rng);
    let v = switch_kraus(&m, &n).map_err(|e| e.to_string())?;
    let out = apply_switch(&control, &target, &v).map_err(|e| e.to_string())?;
    let p = branch(&out, &MeasurementBasis::default(), Sign::Minus)
        .map_err(|e| e.to_string())?
        .trace();
    ensure(p.abs() <= 1e-10, || format!("P(-) = {p:e} for commuting channels"))
}

pub fn kron_algebra(seed: u64) -> std::result::Result<(), String> {
    let mut rng = rng(seed);
    let a = ComplexMatrix::from_nalgebra(random_complex(&mut rng, 2, 2));
    let b = ComplexMatrix::from_nalgebra(random_complex(&mut rng, 2, 2));
    let c = ComplexMatrix::from_nalgebra(random_complex(&mut rng, 2, 2));
    let d = ComplexMatrix::from_nalgebra(random_complex(&mut rng, 2, 2));
    let assoc = kron(&kron(&a, &b), &c).max_abs_diff(&kron(&a, &kron(&b, &c)));
    ensure(assoc <= 1e-12, || format!("associativity off by {assoc:e}"))?;
    let mixed = (&kron(&a, &b) * &kron(&c, &d)).max_abs_diff(&kron(&(&a * &c), &(&b * &d)));
    ensure(mixed <= 1e-12, || format!("mixed product off by {mixed:e}"))
}

pub fn expm_is_unitary(seed: u64) -> std::result::Result<(), String> {
    let mut rng = rng(seed);
    let h = random_hermitian(&mut rng, 4);
    let s = rng.gen_range(-10.0..=10.0);
    let u = hermitian_expm(&h, s).map_err(|e| e.to_string())?;
    let dev = u.unitarity_deviation();
    ensure(dev <= 1e-10, || format!("exp(-i {s} H) deviates from unitary by {dev:e}"))
}

pub fn partial_trace_preserves_trace(seed: u64) -> std::result::Result<(), String> {
    let mut rng = rng(seed);
    let rank = rng.gen_range(1..=8);
    let rho = random_density(&mut rng, 3, rank);
    for keep in [vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]] {
        let r = partial_trace(&rho, &keep).map_err(|e| e.to_string())?;
        ensure((r.trace() - 1.0).abs() <= 1e-12, || format!("keep {keep:?}: trace {}", r.trace()))?;
    }
    Ok(())
}

pub fn conjugation_preserves_spectrum(seed: u64) -> std::result::Result<(), String> {
    let mut rng = rng(seed);
    let rho = random_density(&mut rng, 2, 4);
    let u = random_unitary(&mut rng, 4);
    let mut before = rho.eigenvalues();
    let mut after = rho.evolve(&u).map_err(|e| e.to_string())?.eigenvalues();
    before.sort_by(f64::total_cmp);
    after.sort_by(f64::total_cmp);
    let gap = before.iter().zip(&after).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ensure(gap <= 1e-12, || format!("spectrum moved by {gap:e}"))
}

/// Bell and phased-Φ states have `C = 1`; product states have `C = 0`.
pub fn concurrence_extremes(seed: u64) -> std::result::Result<(), String> {
    let mut rng = rng(seed);
    let u = local_unitary(&mut rng);
    for bell in BellState::ALL {
        let rho = DensityMatrix::from_ket(&bell.ket()).unwrap().evolve(&u).unwrap();
        let c = concurrence(&rho).map_err(|e| e.to_string())?.value;
        ensure((c - 1.0).abs() <= 1e-10, || format!("{bell:?}: C = {c}"))?;
    }
    let phi = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    for sign in [1.0, -1.0] {
        let rho = DensityMatrix::from_ket(&phased_phi(sign, phi)).unwrap();
        let c = concurrence(&rho).map_err(|e| e.to_string())?.value;
        ensure((c - 1.0).abs() <= 1e-10, || format!("phased phi {sign} {phi}: C = {c}"))?;
    }
    let product = random_ket(&mut rng, 2).kron(&random_ket(&mut rng, 2));
    let c = concurrence(&DensityMatrix::from_ket(&product).unwrap())
        .map_err(|e| e.to_string())?
        .value;
    ensure(c <= 1e-10, || format!("product state: C = {c}"))
}
