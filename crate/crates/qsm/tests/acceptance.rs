//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test -p qsm --test acceptance -- --nocapture`).
//! Tolerances are pinned here, not configurable.

use qsm::suites::*;
use qsm::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const ACCEPTANCE_SEED: u64 = 0xA11CE;

fn report_line(criterion: &str, passed: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "{criterion} failed: {detail}");
}

/// Criterion 1: Kantorovich duality on 200 seeded random instances
/// (|X| ≤ 8), dual LP = primal transport within 1e-8, under 10 seconds.
#[test]
fn criterion_01_kantorovich_duality() {
    let t = Instant::now();
    let report = duality_suite(ACCEPTANCE_SEED, 200);
    let elapsed = t.elapsed();
    let worst = report
        .checks
        .iter()
        .find(|c| c.id == "duality.primal_dual")
        .expect("check present");
    let passed = report.passed && worst.worst_residual <= 1e-8 && elapsed.as_secs_f64() < 10.0;
    report_line(
        "criterion 1 (kantorovich duality)",
        passed,
        &format!(
            "worst |dual − primal| = {:.3e} over 200 instances in {elapsed:?}",
            worst.worst_residual
        ),
    );
}

/// Criterion 2: `d(x,y) = ρ(δ_x, δ_y)` exactly (1e-8) on all pairs of 100
/// random instances, including instances with zero-distance pairs.
#[test]
fn criterion_02_point_mass_distances() {
    let report = prop1_suite(ACCEPTANCE_SEED, 100, &SuiteOptions::default());
    let worst = report
        .checks
        .iter()
        .find(|c| c.id == "prop1.i")
        .expect("check present");
    let passed = worst.passed && worst.worst_residual <= 1e-8;
    report_line(
        "criterion 2 (point-mass distances)",
        passed,
        &format!("worst residual {:.3e} over 100 instances", worst.worst_residual),
    );
}

/// Criteria 3 and 4: the full classical pipeline on 100 random families
/// (|X|,|Y|,|Z| ≤ 6): `d₁ = ρ_N(δ_z, δ_{z′})` per pair and `‖·‖_{d₁} ≤ N`
/// on a spanning sample, both within 1e-8, under 60 seconds.
#[test]
fn criterion_03_04_classical_pipeline() {
    let t = Instant::now();
    let report = theorem4_suite(ACCEPTANCE_SEED, 100);
    let elapsed = t.elapsed();
    let eq = report
        .checks
        .iter()
        .find(|c| c.id == "theorem4.i")
        .expect("check present");
    let norm = report
        .checks
        .iter()
        .find(|c| c.id == "theorem4.iii")
        .expect("check present");
    let passed3 =
        report.passed && eq.worst_residual <= 1e-8 && elapsed.as_secs_f64() < 60.0;
    report_line(
        "criterion 3 (induced distances equal the direct formula)",
        passed3,
        &format!(
            "worst residual {:.3e} over 100 families in {elapsed:?}",
            eq.worst_residual
        ),
    );
    let passed4 = norm.passed && norm.worst_residual <= 1e-8;
    report_line(
        "criterion 4 (Lipschitz norm bounded by the induced seminorm)",
        passed4,
        &format!("worst residual {:.3e}", norm.worst_residual),
    );
}

/// Criterion 5: `ρ_{L_d} ≤ d` on all probe pairs across the criterion-3
/// instance family and 50 noncommutative families (blocks ≤ (2,2));
/// tolerance 1e-8 on the exact path, 1e-6 on the iterative path (the suite
/// alternates and bakes those tolerances in).
#[test]
fn criterion_05_rho_below_d() {
    let report = prop2_suite(ACCEPTANCE_SEED, 100, &SuiteOptions::default());
    let iv = report
        .checks
        .iter()
        .find(|c| c.id == "prop2.iv")
        .expect("check present");
    let passed = report.passed && iv.passed;
    report_line(
        "criterion 5 (induced state distances dominate ρ)",
        passed,
        &format!(
            "worst excess {:.3e} over {} instances (50 noncommutative)",
            iv.worst_residual, iv.instances
        ),
    );
}

/// Criterion 6: the slice bound `L_d((μ⊗id)Φ(a)) ≤ L(a)` over ≥ 500 random
/// (μ, a) slices across the corpus; 1e-8 on the exact path and 1e-6 on the
/// iterative path.
#[test]
fn criterion_06_slice_bound() {
    let mut master = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED ^ 0x6c8e_944d);
    let mut total_slices = 0usize;
    let mut worst = 0.0_f64;
    let mut all_passed = true;
    for instance in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        let inner_seed = rng.gen::<u64>();
        let (fam, base, mu_probes, probes_c, a_samples, tol) = if instance % 2 == 0 {
            let cf = random_classical_family(&mut rng);
            let qf = compile_family(&cf).unwrap();
            let base = QSMStructure::build(
                Seminorm::lipschitz(cf.space().clone()).unwrap(),
                8,
                inner_seed,
            )
            .unwrap();
            let mu_probes = build_probes(qf.algebra_b(), 0, 2, inner_seed);
            let probes_c = build_probes(qf.algebra_c(), 0, 0, 0);
            let a_samples: Vec<AlgebraElement> = (0..6)
                .map(|_| random_domain_function(cf.space(), qf.algebra_a(), &mut rng))
                .collect();
            (qf, base, mu_probes, probes_c, a_samples, 1e-8)
        } else {
            let (fam, _) = random_noncommutative_family(&mut rng, inner_seed).unwrap();
            let base = state_metric_base(fam.algebra_a(), &mut rng, inner_seed).unwrap();
            let mu_probes = build_probes(fam.algebra_b(), 2, 2, inner_seed);
            let probes_c = build_probes(fam.algebra_c(), 1, 1, inner_seed ^ 1);
            let mut a_samples: Vec<AlgebraElement> = (0..5)
                .map(|_| fam.algebra_a().random_element(&mut rng))
                .collect();
            a_samples.push(fam.algebra_a().unit());
            (fam, base, mu_probes, probes_c, a_samples, 1e-6)
        };
        let finite_samples = a_samples
            .iter()
            .filter(|a| base.seminorm().eval(a).map(f64::is_finite).unwrap_or(false))
            .count();
        total_slices += mu_probes.len() * finite_samples;
        let report = check_lemma3(
            &fam,
            &base,
            &mu_probes,
            &a_samples,
            &probes_c,
            &InduceOptions {
                seed: inner_seed,
                mu_pure: 6,
                mu_refine_steps: 8,
                ..InduceOptions::default()
            },
            tol,
        )
        .unwrap();
        if let Some(c) = report.find("lemma3.bound") {
            worst = worst.max(c.residual.unwrap_or(0.0));
        }
        all_passed &= report.passed();
    }
    let passed = all_passed && total_slices >= 500;
    report_line(
        "criterion 6 (slice seminorm bound)",
        passed,
        &format!("{total_slices} slices tested, worst excess {worst:.3e}"),
    );
}

/// Criterion 7: the Lipschitz characterization `‖a‖_d ≤ 1 ⟺ pairwise
/// |a(x)−a(x′)| ≤ d(x,x′)` on 1000 random (a, X) pairs, zero counterexamples.
#[test]
fn criterion_07_lipschitz_characterization() {
    let mut rng = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED ^ 0x11aa_22bb);
    let mut counterexamples = 0usize;
    let mut tested = 0usize;
    while tested < 1000 {
        let n = rng.gen_range(2..=7);
        let space = random_semimetric(n, true, &mut rng);
        let l = Seminorm::lipschitz(space.clone()).unwrap();
        let algebra = l.algebra().clone();
        // Mix raw random functions with rescaled ones straddling the
        // threshold, plus domain functions agreeing on zero classes.
        let mut candidates: Vec<AlgebraElement> = Vec::new();
        candidates.push(algebra.random_element(&mut rng));
        let d = random_domain_function(&space, &algebra, &mut rng);
        let e = l.eval(&d).unwrap();
        if e.is_finite() && e > 1e-9 {
            for t in [0.5, 0.999, 1.0, 1.001, 2.0] {
                candidates.push(d.scale(t / e));
            }
        }
        for a in candidates {
            let lhs = l.eval(&a).unwrap() <= 1.0;
            let mut rhs = true;
            for x in 0..n {
                for y in 0..n {
                    if (a.value_at(x) - a.value_at(y)).norm() > space.distance(x, y) {
                        rhs = false;
                    }
                }
            }
            if lhs != rhs {
                counterexamples += 1;
            }
            tested += 1;
        }
    }
    report_line(
        "criterion 7 (Lipschitz characterization)",
        counterexamples == 0,
        &format!("{tested} cases, {counterexamples} counterexamples"),
    );
}

/// Criterion 8: the ratio engine lands within 1% relative error of the LP
/// oracle on 100 commutative instances.
#[test]
fn criterion_08_ratio_engine_vs_lp() {
    let mut master = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let s: u64 = master.gen();
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let n = rng.gen_range(2..=8);
        let space = random_semimetric(n, true, &mut rng);
        let l = Seminorm::lipschitz(space).unwrap();
        let algebra = l.algebra().clone();
        let mu = State::from_distribution(&algebra, &random_distribution(n, &mut rng)).unwrap();
        let nu = State::from_distribution(&algebra, &random_distribution(n, &mut rng)).unwrap();
        let exact = rho_lp_dual(&mu, &nu, &l).unwrap().value;
        let approx = rho_ratio(
            &mu,
            &nu,
            &l,
            &RatioOptions {
                seed: s,
                ..RatioOptions::default()
            },
        )
        .unwrap()
        .value;
        if exact > 1e-12 {
            worst = worst.max((exact - approx).abs() / exact);
        } else {
            assert!(approx.abs() < 1e-9, "engine invented distance {approx}");
        }
    }
    report_line(
        "criterion 8 (ratio engine vs LP oracle)",
        worst <= 0.01,
        &format!("worst relative error {worst:.3e} over 100 instances"),
    );
}

/// Criterion 9: the Pauli conjugation structure on M₂ — ergodicity holds,
/// `L(σ_z) = 2` exactly, the radius is finite, and the induced state
/// distances on a 20-state probe set satisfy the metric axioms within 1e-6.
#[test]
fn criterion_09_pauli_structure() {
    let l = pauli_seminorm().expect("ergodicity validated in the constructor");
    let m2 = l.algebra().clone();

    let sz = {
        let mut z = m2.zero();
        let mats = vec![qsm::linalg::CMat::from_row_slice(
            2,
            2,
            &[
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(-1.0, 0.0),
            ],
        )];
        z = AlgebraElement::new(m2.clone(), mats).unwrap();
        z
    };
    let lz = l.eval(&sz).unwrap();
    assert_eq!(lz, 2.0, "L(σ_z) must be exactly 2");

    let opts = RatioOptions {
        seed: ACCEPTANCE_SEED,
        ..RatioOptions::default()
    };
    let radius = seminorm_radius(&l, &opts).unwrap();
    assert!(radius.certified && radius.value.is_finite());

    let probes = build_probes(&m2, 17, 0, 99);
    assert_eq!(probes.len(), 20);
    let n = probes.len();
    let mut d = vec![vec![0.0_f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let r = rho_ratio(&probes.states()[i], &probes.states()[j], &l, &opts).unwrap();
            d[i][j] = r.value;
            d[j][i] = r.value;
        }
    }
    let mut triangle = 0.0_f64;
    let mut negative = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            negative = negative.min(d[i][j]);
            for k in 0..n {
                triangle = triangle.max(d[i][j] - d[i][k] - d[k][j]);
            }
        }
    }
    let passed = triangle <= 1e-6 && negative >= 0.0;
    report_line(
        "criterion 9 (Pauli action structure)",
        passed,
        &format!(
            "L(σ_z) = {lz}, radius {:.6}, triangle excess {triangle:.3e} on 20 probes",
            radius.value
        ),
    );
}

/// Criterion 10: determinism — identical seeds produce byte-identical suite
/// reports.
#[test]
fn criterion_10_determinism() {
    let a = serde_json::to_string(&duality_suite(ACCEPTANCE_SEED, 5)).unwrap();
    let b = serde_json::to_string(&duality_suite(ACCEPTANCE_SEED, 5)).unwrap();
    let t1 = serde_json::to_string(&theorem4_suite(ACCEPTANCE_SEED, 3)).unwrap();
    let t2 = serde_json::to_string(&theorem4_suite(ACCEPTANCE_SEED, 3)).unwrap();
    let passed = a == b && t1 == t2;
    report_line(
        "criterion 10 (determinism)",
        passed,
        "repeated runs with one seed are byte-identical",
    );
}
