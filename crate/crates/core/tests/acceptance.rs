//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test --test acceptance -- 2 7`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use geophase_core::bath::{self, BathSpec};
use geophase_core::gates::{
    self, aa_single, aa_two, dyn_single, dyn_two, propagators_at, sample_times, GateSequence,
};
use geophase_core::metrics::{analytic_pq, average_fidelity, concurrence, f_d_closed_form, fidelity};
use geophase_core::qmath::{self, c, hermitian_eigenvalues, sigma_x, sigma_z, ComplexMatrix};
use geophase_core::redfield::{
    build_generator, closed_form_single_qubit, evolve_trajectory, single_qubit_coupling, two_qubit_couplings,
    BathTopology, CouplingAxis, CouplingSpec,
};
use geophase_core::states::{alpha_state, BellState};
use geophase_core::StateSampler;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const B0: f64 = 10.0;
const JM: f64 = 5.0;
const LAMBDA: f64 = 1e-3;
const SEED: u64 = 20_240_917;
const TIME_SAMPLES: usize = 21;

type Outcome = Result<String, String>;

/// Collects named checks; the criterion fails if any check fails.
#[derive(Default)]
struct Checks {
    passed: Vec<String>,
    failed: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.passed.push(what);
        } else {
            self.failed.push(what);
        }
    }

    fn finish(self) -> Outcome {
        if self.failed.is_empty() {
            Ok(self.passed.join("; "))
        } else {
            let mut parts: Vec<String> = self.failed.iter().map(|f| format!("FAILED {f}")).collect();
            parts.extend(self.passed.iter().map(|p| format!("ok {p}")));
            Err(parts.join("; "))
        }
    }
}

fn single_bath(kt: f64) -> BathSpec {
    BathSpec::new(LAMBDA, 50.0 * B0, kt).unwrap()
}

fn two_bath(kt: f64) -> BathSpec {
    BathSpec::new(LAMBDA, 50.0 * JM, kt).unwrap()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn within_budget(checks: &mut Checks, start: Instant, budget: Duration) {
    let took = start.elapsed();
    checks.check(took < budget, format!("runtime {:.1}s < {}s", took.as_secs_f64(), budget.as_secs()));
}

/// Trace, Hermiticity and positivity extremes over a set of states.
#[derive(Debug, Clone, Copy)]
struct Conservation {
    trace_error: f64,
    hermiticity_error: f64,
    min_eigenvalue: f64,
    states: usize,
}

impl Default for Conservation {
    fn default() -> Self {
        Self { trace_error: 0.0, hermiticity_error: 0.0, min_eigenvalue: f64::INFINITY, states: 0 }
    }
}

impl Conservation {
    fn add(&mut self, rho: &ComplexMatrix) {
        self.trace_error = self.trace_error.max((rho.trace() - Complex64::from(1.0)).norm());
        self.hermiticity_error = self.hermiticity_error.max(qmath::hermiticity_deviation(rho));
        self.min_eigenvalue = self.min_eigenvalue.min(hermitian_eigenvalues(rho)[0]);
        self.states += 1;
    }

    fn merge(&mut self, other: Conservation) {
        self.trace_error = self.trace_error.max(other.trace_error);
        self.hermiticity_error = self.hermiticity_error.max(other.hermiticity_error);
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
        self.states += other.states;
    }
}

/// Every sampled state of `seq` applied to each input.
fn sequence_conservation(seq: &GateSequence, couplings: &[CouplingSpec], inputs: &[ComplexMatrix]) -> Conservation {
    let times = sample_times(seq, TIME_SAMPLES);
    let props = propagators_at(seq, couplings, &times).unwrap();
    let mut out = Conservation::default();
    for rho in inputs {
        for p in &props {
            out.add(&qmath::apply_superoperator(p, rho));
        }
    }
    out
}

fn final_state(seq: &GateSequence, couplings: &[CouplingSpec], rho: &ComplexMatrix) -> ComplexMatrix {
    let sup = gates::sequence_superoperator(seq, couplings).unwrap();
    qmath::apply_superoperator(&sup, rho)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let fields = [
        (10.0, 0.0),
        (0.0, 10.0),
        (7.0, 7.0),
        (-5.0, 3.0),
        (2.0, -9.0),
        (-6.0, -6.0),
        (0.5, 12.0),
        (-10.0, 0.0),
    ];
    let mut worst = 0.0f64;
    for factor in [0.0, 0.05, 0.2] {
        let bath = single_bath(factor * B0);
        let couplings = single_qubit_coupling(CouplingAxis::Z, bath).unwrap();
        for &(bz, bx) in &fields {
            let h = (sigma_z().map(|z| z * bz) + sigma_x().map(|z| z * bx)).map(|z| -z);
            let generic = build_generator(&h, &couplings).unwrap();
            let closed = closed_form_single_qubit(bz, bx, &bath).unwrap();
            worst = worst.max(qmath::max_abs_diff(generic.matrix(), closed.matrix()));
        }
    }
    checks.check(worst < 1e-10, format!("generic vs closed form max entry diff {worst:.2e} < 1e-10"));

    // Pure σ_z field: diagonal in the eigenbasis, populations frozen and
    // coherences decaying at 2μ₊(0) while rotating at ∓2B.
    let mut structure_ok = true;
    let mut worst_rate = 0.0f64;
    for factor in [0.0, 0.05, 0.2] {
        let bath = single_bath(factor * B0);
        let couplings = single_qubit_coupling(CouplingAxis::Z, bath).unwrap();
        let mu0 = bath::mu_plus(0.0, &bath);
        for bz in [10.0, 3.0, -4.0] {
            let generic = build_generator(&sigma_z().map(|z| z * -bz), &couplings).unwrap();
            let m = generic.in_eigenbasis();
            for r in 0..4 {
                for col in 0..4 {
                    if r != col && m[(r, col)] != Complex64::from(0.0) {
                        structure_ok = false;
                    }
                }
            }
            structure_ok &= m[(0, 0)] == Complex64::from(0.0) && m[(3, 3)] == Complex64::from(0.0);
            let gap = generic.energies()[0] - generic.energies()[1];
            let want = c(-2.0 * mu0, -gap);
            worst_rate = worst_rate.max((m[(1, 1)] - want).norm()).max((m[(2, 2)] - want.conj()).norm());
        }
    }
    checks.check(structure_ok, "σ_z-field generator exactly diagonal with zero population entries");
    checks.check(worst_rate < 1e-10, format!("coherence entries -2μ₊(0) ∓ 2iB to {worst_rate:.2e}"));
    within_budget(&mut checks, start, Duration::from_secs(5));
    checks.finish()
}

/// Adaptive Simpson on `[a, b]` for a complex integrand.
fn simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Complex64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (fa + 4.0 * flm + fm) * ((m - a) / 6.0);
        let right = (fm + 4.0 * frm + fb) * ((b - m) / 6.0);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Γ(B) from its defining double integral. Exchanging the order and damping
/// the τ integral with `e^{−ετ}` gives
/// `Γ_ε = ∫₀^Ω J(ω) [n₋(ω)/(ε − i(2B+ω)) + n₊(ω)/(ε − i(2B−ω))] dω`
/// with `n± = (coth(ω/2kT) ± 1)/2`; ε → 0 by Richardson extrapolation.
fn gamma_oracle(b: f64, bath: &BathSpec) -> Complex64 {
    let coth_half = |w: f64| if bath.kt == 0.0 { 1.0 } else { 1.0 / (w / (2.0 * bath.kt)).tanh() };
    let j = |w: f64| bath.lambda * w / (1.0 + (w / bath.omega_c).powi(2));
    let scale = 2.0 * b.abs();
    let eps: Vec<f64> = [0.1, 0.05, 0.025, 0.0125].iter().map(|f| f * scale).collect();
    let values: Vec<Complex64> = eps
        .iter()
        .map(|&e| {
            let integrand = |w: f64| {
                if w == 0.0 {
                    // J(ω) n±(ω) → λ kT as ω → 0
                    let jn = if bath.kt == 0.0 { Complex64::from(0.0) } else { Complex64::from(bath.lambda * bath.kt) };
                    return jn / c(e, -2.0 * b) + jn / c(e, -2.0 * b);
                }
                let ct = coth_half(w);
                let (n_minus, n_plus) = (0.5 * (ct - 1.0), 0.5 * (ct + 1.0));
                j(w) * (n_minus / c(e, -(2.0 * b + w)) + n_plus / c(e, -(2.0 * b - w)))
            };
            let pole = 2.0 * b.abs();
            let mut cuts = vec![0.0, bath.omega_c];
            for k in [-20.0, -3.0, -1.0, 0.0, 1.0, 3.0, 20.0] {
                let p = pole + k * e;
                if p > 0.0 && p < bath.omega_c {
                    cuts.push(p);
                }
            }
            cuts.sort_by(f64::total_cmp);
            cuts.windows(2).map(|w| simpson(&integrand, w[0], w[1], 1e-15)).sum()
        })
        .collect();
    // Neville extrapolation of the cubic through the four points to ε = 0
    let mut p = values.clone();
    for level in 1..p.len() {
        for i in (level..p.len()).rev() {
            let (xi, xj) = (eps[i], eps[i - level]);
            p[i] = (p[i] * xj - p[i - 1] * xi) / (xj - xi);
        }
    }
    p[p.len() - 1]
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let mut worst_mu = 0.0f64;
    for kt in [0.01, 0.1, 0.5, 1.0, 5.0] {
        let bath = single_bath(kt);
        let want = 2.0 * PI * LAMBDA * kt;
        worst_mu = worst_mu.max((bath::mu_plus(0.0, &bath) - want).abs() / want);
    }
    checks.check(worst_mu < 1e-10, format!("μ₊(0) = 2πλkT, max relative error {worst_mu:.1e}"));
    let points = [
        (1.0, BathSpec::new(1e-3, 500.0, 0.5).unwrap()),
        (5.0, BathSpec::new(1e-3, 500.0, 0.0).unwrap()),
        (-1.0, BathSpec::new(1e-3, 500.0, 0.5).unwrap()),
        (0.5, BathSpec::new(1e-3, 50.0, 2.0).unwrap()),
    ];
    let mut worst = 0.0f64;
    for (b, spec) in points {
        let got = bath::gamma(b, &spec).unwrap();
        let want = gamma_oracle(b, &spec);
        worst = worst.max((got - want).norm() / want.norm());
    }
    checks.check(worst < 1e-6, format!("Γ(B) vs double-integral oracle, max relative error {worst:.1e} < 1e-6"));
    within_budget(&mut checks, start, Duration::from_secs(30));
    checks.finish()
}

fn random_phis() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..20).map(|_| rng.random::<f64>() * PI).collect()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let mut worst = 0.0f64;
    let mut same_duration = true;
    for phi in random_phis() {
        let seqs = [aa_single(phi, B0), dyn_single(phi, B0), aa_two(phi, JM), dyn_two(phi, JM)].map(Result::unwrap);
        for seq in &seqs {
            worst = worst.max(gates::target_error(seq));
        }
        same_duration &= seqs[0].total_duration() == seqs[1].total_duration()
            && seqs[0].total_duration() == 4.0 * gates::t1(B0)
            && seqs[2].total_duration() == seqs[3].total_duration()
            && seqs[2].total_duration() == 4.0 * gates::tm1(JM);
    }
    checks.check(worst < 1e-9, format!("λ=0 propagators equal targets up to phase, worst {worst:.1e} < 1e-9"));
    checks.check(same_duration, "AA and dynamical durations equal 4t₁ and 4t_m1 exactly");
    within_budget(&mut checks, start, Duration::from_secs(5));
    checks.finish()
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let alphas = linspace(0.0, FRAC_PI_2, 20);
    let kts = [0.0, 0.25, 0.5, 1.0, 2.0];
    let phis = [0.3, 1.2, 2.5];
    let mut worst_closed = 0.0f64;
    let mut worst_zero = 0.0f64;
    let mut worst_phi_spread = 0.0f64;
    let mut argmin_ok = true;
    for &kt in &kts {
        let bath = single_bath(kt);
        let couplings = single_qubit_coupling(CouplingAxis::Z, bath).unwrap();
        let sups: Vec<_> = phis
            .iter()
            .map(|&phi| {
                let seq = dyn_single(phi, B0).unwrap();
                (gates::sequence_superoperator(&seq, &couplings).unwrap(), seq.target_unitary)
            })
            .collect();
        let mut curve = Vec::new();
        for &alpha in &alphas {
            let psi = alpha_state(alpha);
            let fs: Vec<f64> = sups
                .iter()
                .map(|(sup, u)| fidelity(&psi, u, &qmath::apply_superoperator(sup, &psi.density_matrix())))
                .collect();
            let spread = fs.iter().copied().fold(f64::MIN, f64::max) - fs.iter().copied().fold(f64::MAX, f64::min);
            worst_phi_spread = worst_phi_spread.max(spread);
            worst_closed = worst_closed.max((fs[0] - f_d_closed_form(alpha, phis[0], &bath, B0)).abs());
            if kt == 0.0 {
                worst_zero = worst_zero.max((fs[0] - 1.0).abs());
            }
            curve.push(fs[0]);
        }
        if kt > 0.0 {
            let (k, _) = curve.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
            argmin_ok &= (alphas[k] - FRAC_PI_4).abs() <= alphas[1] - alphas[0];
        }
    }
    checks.check(worst_closed < 1e-8, format!("numeric F_D vs closed form {worst_closed:.1e} < 1e-8"));
    checks.check(worst_zero < 1e-10, format!("F_D(kT=0) = 1 to {worst_zero:.1e}"));
    checks.check(worst_phi_spread < 1e-9, format!("F_D spread over Φ {worst_phi_spread:.1e} < 1e-9"));
    checks.check(argmin_ok, "min over α within one grid step of π/4");
    within_budget(&mut checks, start, Duration::from_secs(60));
    checks.finish()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let couplings = single_qubit_coupling(CouplingAxis::Z, single_bath(0.0)).unwrap();
    let psi = alpha_state(FRAC_PI_4);
    let f_at = |phi: f64| {
        let seq = aa_single(phi, B0).unwrap();
        fidelity(&psi, &seq.target_unitary, &final_state(&seq, &couplings, &psi.density_matrix()))
    };
    let f = f_at(FRAC_PI_2);
    checks.check(f < 1.0 - 1e-6, format!("F_G(π/4, π/2) = {f:.9} < 1 − 1e-6"));
    let values: Vec<f64> = linspace(0.0, PI, 9).into_iter().map(f_at).collect();
    let range = values.iter().copied().fold(f64::MIN, f64::max) - values.iter().copied().fold(f64::MAX, f64::min);
    checks.check(range > 1e-6, format!("F_G varies with Φ by {range:.2e} > 1e-6"));
    within_budget(&mut checks, start, Duration::from_secs(10));
    checks.finish()
}

/// F_G − F_D on the 40×40 (α, Φ) grid over [0, π]².
fn fidelity_gap_grid(kt: f64) -> Vec<(f64, f64, f64, f64)> {
    let couplings = single_qubit_coupling(CouplingAxis::Z, single_bath(kt)).unwrap();
    let grid = linspace(0.0, PI, 40);
    let mut rows = Vec::new();
    for &phi in &grid {
        let aa = aa_single(phi, B0).unwrap();
        let dy = dyn_single(phi, B0).unwrap();
        let s_aa = gates::sequence_superoperator(&aa, &couplings).unwrap();
        let s_dy = gates::sequence_superoperator(&dy, &couplings).unwrap();
        for &alpha in &grid {
            let psi = alpha_state(alpha);
            let rho = psi.density_matrix();
            let f_g = fidelity(&psi, &aa.target_unitary, &qmath::apply_superoperator(&s_aa, &rho));
            let f_d = fidelity(&psi, &dy.target_unitary, &qmath::apply_superoperator(&s_dy, &rho));
            rows.push((alpha, phi, f_g, f_d));
        }
    }
    rows
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let cold = fidelity_gap_grid(0.0);
    let above: Vec<_> = cold.iter().filter(|r| r.3 < r.2).collect();
    let worst = above.iter().map(|r| r.2 - r.3).fold(0.0, f64::max);
    let f_d_dev = cold.iter().map(|r| (r.3 - 1.0).abs()).fold(0.0, f64::max);
    checks.check(f_d_dev < 1e-10, format!("kT=0: F_D = 1 to {f_d_dev:.1e}"));
    checks.check(
        above.is_empty(),
        format!("kT=0: {{F_D < F_G}} has {} of {} points (max F_G − F_D = {worst:.2e})", above.len(), cold.len()),
    );
    let warm = fidelity_gap_grid(0.05 * B0);
    let pos = warm.iter().filter(|r| r.2 > r.3).count();
    let neg = warm.iter().filter(|r| r.2 < r.3).count();
    checks.check(pos > 0 && neg > 0, format!("kT=0.05·B₀: F_G > F_D at {pos} points, F_G < F_D at {neg}"));
    within_budget(&mut checks, start, Duration::from_secs(300));
    checks.finish()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let bath = two_bath(0.0);
    let couplings = two_qubit_couplings(CouplingAxis::Z, BathTopology::Common, bath).unwrap();
    let seq = dyn_two(FRAC_PI_4, JM).unwrap();
    let j = 0.75 * JM;
    let gen = build_generator(&seq.segments[0].hamiltonian(), &couplings).unwrap();
    let psi_plus = BellState::PsiPlus.state().density_matrix();
    let phi_plus = BellState::PhiPlus.state().density_matrix();
    let rate = 8.0 * PI * bath::ohmic_j(2.0 * j, &bath);
    let revival = 6.0 / rate;
    let traj = evolve_trajectory(&gen, &phi_plus, 2.0 * revival, 20).unwrap();
    let (mut worst_rho, mut worst_c) = (0.0f64, 0.0f64);
    let mut concurrences = Vec::new();
    for (t, rho) in traj.iter() {
        let (p, q) = analytic_pq(t, j, &bath).unwrap();
        let model = psi_plus.map(|z| z * p) + phi_plus.map(|z| z * q);
        worst_rho = worst_rho.max(qmath::max_abs_diff(rho, &model));
        let cv = concurrence(rho).unwrap();
        worst_c = worst_c.max((cv - (p - q).abs()).abs());
        concurrences.push((t, cv));
    }
    checks.check(worst_rho < 1e-6, format!("ρ(t) vs P|ψ₊⟩⟨ψ₊| + Q|φ₊⟩⟨φ₊| at 20 times {worst_rho:.1e} < 1e-6"));
    checks.check(worst_c < 1e-5, format!("concurrence vs |P − Q| {worst_c:.1e} < 1e-5"));
    let min_c = concurrences.iter().map(|p| p.1).fold(1.0, f64::min);
    let late = concurrences.iter().filter(|p| p.0 >= revival).map(|p| p.1).fold(1.0, f64::min);
    checks.check(
        min_c < 0.5 && late > 0.99,
        format!("concurrence dips to {min_c:.3} and stays above 0.99 after t = {revival:.1} ns (min {late:.4})"),
    );
    let far = geophase_core::redfield::evolve(&gen, &phi_plus, 40.0 * revival).unwrap();
    let tail = qmath::max_abs_diff(&far, &psi_plus);
    checks.check(tail < 1e-4, format!("ρ(t→∞) → |ψ₊⟩⟨ψ₊| to {tail:.1e} < 1e-4"));
    within_budget(&mut checks, start, Duration::from_secs(30));
    checks.finish()
}

fn is_monotonic(values: &[(f64, f64)], slack: f64) -> bool {
    let up = values.windows(2).all(|w| w[1].0 >= w[0].0 - slack * w[0].1.max(w[1].1));
    let down = values.windows(2).all(|w| w[1].0 <= w[0].0 + slack * w[0].1.max(w[1].1));
    up || down
}

/// An interior point lies below (or above) points on both sides by more
/// than `slack` standard errors.
fn has_interior_extremum(values: &[(f64, f64)], slack: f64) -> bool {
    (1..values.len() - 1).any(|k| {
        let (v, se) = values[k];
        let left = &values[..k];
        let right = &values[k + 1..];
        let dip = |side: &[(f64, f64)]| side.iter().any(|&(w, s)| w - v > slack * se.max(s));
        let peak = |side: &[(f64, f64)]| side.iter().any(|&(w, s)| v - w > slack * se.max(s));
        (dip(left) && dip(right)) || (peak(left) && peak(right))
    })
}

fn average_curve(
    make: fn(f64, f64) -> geophase_core::Result<GateSequence>,
    couplings: &[CouplingSpec],
    sampler: StateSampler,
) -> Vec<(f64, f64)> {
    linspace(0.0, PI, 9)
        .into_iter()
        .map(|phi| {
            let avg = average_fidelity(&make(phi, JM).unwrap(), couplings, 1000, SEED, sampler).unwrap();
            (avg.mean, avg.std_error)
        })
        .collect()
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let bath = two_bath(0.05 * JM);
    let common = two_qubit_couplings(CouplingAxis::Z, BathTopology::Common, bath).unwrap();
    let independent = two_qubit_couplings(CouplingAxis::Z, BathTopology::Independent, bath).unwrap();
    for sampler in [StateSampler::Haar, StateSampler::Parametric] {
        let name = format!("{sampler:?}").to_lowercase();
        let dyn_common = average_curve(dyn_two, &common, sampler);
        let aa_common = average_curve(aa_two, &common, sampler);
        let aa_indep = average_curve(aa_two, &independent, sampler);
        let fmt = |v: &[(f64, f64)]| v.iter().map(|p| format!("{:.4}", p.0)).collect::<Vec<_>>().join(",");
        checks.check(is_monotonic(&dyn_common, 3.0), format!("{name}: dyn-two monotonic [{}]", fmt(&dyn_common)));
        checks.check(
            has_interior_extremum(&aa_common, 3.0),
            format!("{name}: aa-two non-monotonic [{}]", fmt(&aa_common)),
        );
        let wins = aa_indep.iter().zip(&aa_common).filter(|(i, c)| i.0 > c.0).count();
        checks.check(2 * wins > aa_common.len(), format!("{name}: two baths beat one bath at {wins}/9 Φ"));
    }
    within_budget(&mut checks, start, Duration::from_secs(900));
    checks.finish()
}

/// Trajectories of criteria 3–8 sampled on the gate time grid (final states
/// only for the state averages).
fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let mut per: Vec<(&str, Conservation)> = Vec::new();

    let mut c3 = Conservation::default();
    let none_1 = single_qubit_coupling(CouplingAxis::Z, BathSpec::new(0.0, 50.0 * B0, 0.0).unwrap()).unwrap();
    let none_2 =
        two_qubit_couplings(CouplingAxis::Z, BathTopology::Common, BathSpec::new(0.0, 50.0 * JM, 0.0).unwrap())
            .unwrap();
    let singles: Vec<_> = linspace(0.0, PI, 5).iter().map(|&a| alpha_state(a).density_matrix()).collect();
    let bells: Vec<_> = BellState::ALL.iter().map(|b| b.state().density_matrix()).collect();
    for phi in random_phis() {
        c3.merge(sequence_conservation(&aa_single(phi, B0).unwrap(), &none_1, &singles));
        c3.merge(sequence_conservation(&dyn_single(phi, B0).unwrap(), &none_1, &singles));
        c3.merge(sequence_conservation(&aa_two(phi, JM).unwrap(), &none_2, &bells));
        c3.merge(sequence_conservation(&dyn_two(phi, JM).unwrap(), &none_2, &bells));
    }
    per.push(("3", c3));

    let alphas: Vec<_> = linspace(0.0, FRAC_PI_2, 20).iter().map(|&a| alpha_state(a).density_matrix()).collect();
    let mut c4 = Conservation::default();
    for kt in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let couplings = single_qubit_coupling(CouplingAxis::Z, single_bath(kt)).unwrap();
        c4.merge(sequence_conservation(&dyn_single(0.3, B0).unwrap(), &couplings, &alphas));
    }
    per.push(("4", c4));

    let mut c5 = Conservation::default();
    let cold = single_qubit_coupling(CouplingAxis::Z, single_bath(0.0)).unwrap();
    for phi in linspace(0.0, PI, 9) {
        c5.merge(sequence_conservation(&aa_single(phi, B0).unwrap(), &cold, &[alpha_state(FRAC_PI_4).density_matrix()]));
    }
    per.push(("5", c5));

    let mut c6 = Conservation::default();
    let grid = linspace(0.0, PI, 40);
    let grid_states: Vec<_> = grid.iter().map(|&a| alpha_state(a).density_matrix()).collect();
    for kt in [0.0, 0.05 * B0] {
        let couplings = single_qubit_coupling(CouplingAxis::Z, single_bath(kt)).unwrap();
        for &phi in &grid {
            c6.merge(sequence_conservation(&aa_single(phi, B0).unwrap(), &couplings, &grid_states));
            c6.merge(sequence_conservation(&dyn_single(phi, B0).unwrap(), &couplings, &grid_states));
        }
    }
    per.push(("6", c6));

    let mut c7 = Conservation::default();
    let bath = two_bath(0.0);
    let common = two_qubit_couplings(CouplingAxis::Z, BathTopology::Common, bath).unwrap();
    let gen = build_generator(&dyn_two(FRAC_PI_4, JM).unwrap().segments[0].hamiltonian(), &common).unwrap();
    let rate = 8.0 * PI * bath::ohmic_j(1.5 * JM, &bath);
    let traj = evolve_trajectory(&gen, &BellState::PhiPlus.state().density_matrix(), 12.0 / rate, 20).unwrap();
    traj.states.iter().for_each(|r| c7.add(r));
    per.push(("7", c7));

    let mut c8 = Conservation::default();
    let warm = two_bath(0.05 * JM);
    let inputs: Vec<ComplexMatrix> = (0..1000)
        .map(|k| geophase_core::states::sample_state(4, SEED, k, StateSampler::Haar).density_matrix())
        .collect();
    for topology in [BathTopology::Common, BathTopology::Independent] {
        let couplings = two_qubit_couplings(CouplingAxis::Z, topology, warm).unwrap();
        for phi in linspace(0.0, PI, 9) {
            for seq in [aa_two(phi, JM).unwrap(), dyn_two(phi, JM).unwrap()] {
                let sup = gates::sequence_superoperator(&seq, &couplings).unwrap();
                inputs.iter().for_each(|r| c8.add(&qmath::apply_superoperator(&sup, r)));
            }
        }
    }
    per.push(("8", c8));

    for (name, s) in &per {
        checks.check(s.trace_error < 1e-9, format!("c{name}: trace error {:.1e} < 1e-9", s.trace_error));
        checks.check(
            s.hermiticity_error < 1e-9,
            format!("c{name}: Hermiticity error {:.1e} < 1e-9", s.hermiticity_error),
        );
        checks.check(
            s.min_eigenvalue >= -1e-6,
            format!("c{name}: min eigenvalue {:.2e} ≥ −1e-6 over {} states", s.min_eigenvalue, s.states),
        );
    }
    within_budget(&mut checks, start, Duration::from_secs(300));
    checks.finish()
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let none =
        two_qubit_couplings(CouplingAxis::Z, BathTopology::Common, BathSpec::new(0.0, 50.0 * JM, 0.0).unwrap())
            .unwrap();
    let phis = [0.0, 0.4, FRAC_PI_4, FRAC_PI_2, 2.2, PI];
    // (worst deviation from 1 on the whole grid, at segment ends only)
    let worst_along = |make: fn(f64, f64) -> geophase_core::Result<GateSequence>| {
        let (mut all, mut ends) = (0.0f64, 0.0f64);
        for phi in phis {
            let seq = make(phi, JM).unwrap();
            let times = sample_times(&seq, 41);
            let props = propagators_at(&seq, &none, &times).unwrap();
            let boundaries = seq.boundaries();
            for bell in BellState::ALL {
                let rho = bell.state().density_matrix();
                for (t, p) in times.iter().zip(&props) {
                    let dev = (concurrence(&qmath::apply_superoperator(p, &rho)).unwrap() - 1.0).abs();
                    all = all.max(dev);
                    if boundaries.contains(t) {
                        ends = ends.max(dev);
                    }
                }
            }
        }
        (all, ends)
    };
    let (dyn_all, _) = worst_along(dyn_two);
    let (aa_all, aa_ends) = worst_along(aa_two);
    checks.check(dyn_all < 1e-9, format!("dyn-two trajectories stay at 1 to {dyn_all:.1e}"));
    checks.check(aa_ends < 1e-9, format!("aa-two at segment ends stays at 1 to {aa_ends:.1e}"));
    checks.check(aa_all < 1e-9, format!("aa-two whole trajectory deviates from 1 by up to {aa_all:.3}"));
    within_budget(&mut checks, start, Duration::from_secs(30));
    checks.finish()
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "closed-form generator equivalence", criterion_1),
        (2, "bath correlation rates", criterion_2),
        (3, "noiseless gate correctness", criterion_3),
        (4, "dynamical single-qubit fidelity", criterion_4),
        (5, "geometric gate decoheres at kT=0", criterion_5),
        (6, "sign of F_G − F_D", criterion_6),
        (7, "concurrence revival", criterion_7),
        (8, "average fidelity vs Φ", criterion_8),
        (9, "trace, Hermiticity, positivity", criterion_9),
        (10, "noiseless entanglement constancy", criterion_10),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (n, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS [{secs:.1}s] {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {n:>2} FAIL [{secs:.1}s] {name}: {detail}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}

