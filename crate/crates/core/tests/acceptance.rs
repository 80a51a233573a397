//! Acceptance criteria 1 to 8. Each test prints one line
//! `criterion N: PASS|FAIL ...` followed by its sub-items, then asserts.
//!
//! Tolerances: numeric checks at q = 1 use 1e-10 (max-norm); everything else
//! is exact. Time budgets are asserted per criterion.

use std::collections::HashMap;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qspinor::cli::suites::{self, SuiteReport};
use qspinor::cli::{parse_poly, print_canonical, run_suite};
use qspinor::model::{Model, Mutation};
use qspinor::ncalg::{specs, NCPoly, Word};
use qspinor::qcoeff::{GaussRat, LaurentScalar};
use qspinor::repr::{self, TildePrefactor};
use qspinor::sigma;
use qspinor::spinor::NCMatrix;

const TOL: f64 = 1e-10;

struct Outcome {
    items: Vec<(String, bool, String)>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { items: Vec::new() }
    }

    fn item(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.items.push((name.into(), pass, detail.into()));
    }

    fn record(&mut self, report: &SuiteReport, ids: &[&str]) {
        for id in ids {
            match report.find(id) {
                Some(c) => self.item(*id, c.pass, c.residual.clone()),
                None => self.item(*id, false, "missing from suite"),
            }
        }
    }

    fn finish(self, n: u32, title: &str, start: Instant, budget: Duration) {
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = in_time && self.items.iter().all(|i| i.1);
        println!(
            "criterion {n}: {} {title} ({:.2}s of {}s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        for (name, ok, detail) in &self.items {
            if *ok {
                println!("    ok   {name}");
            } else {
                println!("    FAIL {name}: {detail}");
            }
        }
        assert!(in_time, "criterion {n} exceeded {budget:?}");
        let failed: Vec<&str> = self.items.iter().filter(|i| !i.1).map(|i| i.0.as_str()).collect();
        assert!(failed.is_empty(), "criterion {n} failed: {failed:?}");
    }
}

#[test]
fn criterion_1_epsilon() {
    let t0 = Instant::now();
    let r = run_suite("epsilon", &Model::standard()).unwrap();
    let mut o = Outcome::new();
    o.record(&r, &["eps_square", "eps_eps_transpose", "raise_lower_delta", "hat_is_minus_transpose"]);
    o.finish(1, "epsilon identities", t0, Duration::from_secs(1));
}

#[test]
fn criterion_2_quantum_determinant() {
    let t0 = Instant::now();
    let r = run_suite("sldet", &Model::standard()).unwrap();
    let mut o = Outcome::new();
    o.record(
        &r,
        &[
            "det_left",
            "det_right",
            "central_a",
            "central_b",
            "central_c",
            "central_d",
            "antipode",
            "transpose_inverse",
        ],
    );
    o.finish(2, "quantum determinant, centrality, antipode", t0, Duration::from_secs(5));
}

#[test]
fn criterion_3_spinor_invariance() {
    let t0 = Instant::now();
    let r = run_suite("spinor", &Model::standard()).unwrap();
    let mut o = Outcome::new();
    o.record(
        &r,
        &[
            "form_invariant_right",
            "form_invariant_left",
            "lowering_covariance",
            "epsilon_invariant",
            "plane_relation",
        ],
    );
    o.finish(3, "spinor invariance", t0, Duration::from_secs(5));
}

#[test]
fn criterion_4_sigma_metric() {
    let t0 = Instant::now();
    let r = run_suite("sigma", &Model::standard()).unwrap();
    let mut o = Outcome::new();
    o.record(
        &r,
        &[
            "bar_sigma_closed_form",
            "contraction_is_metric",
            "completeness_closed_form_inverse",
            "limit_bar_sigma",
            "limit_anticommutator",
            "limit_trace",
            "limit_trace_lowered",
            "limit_completeness",
            "limit_metric",
        ],
    );
    o.finish(4, "sigma matrices and metric", t0, Duration::from_secs(1));
}

#[test]
fn criterion_5_vector_representation() {
    let t0 = Instant::now();
    let model = Model::standard();
    let mut o = Outcome::new();
    let spec = Arc::new(model.sl_with_conjugate());
    let set = sigma::compute_bar_sigma(&model.eps_hat);
    let metric = sigma::eta(&set).unwrap();
    let m = sigma::vector_rep(&NCMatrix::identity(&spec, 2), &set, &metric.lower).unwrap();
    o.item("identity maps to identity", m.is_identity(), m.to_string());
    let s = suites::lorentz_sample(&model, 100, suites::SEED).unwrap();
    o.item("real entries", s.imaginary < TOL, format!("{:e}", s.imaginary));
    o.item("M^t eta M = eta", s.metric < TOL, format!("{:e}", s.metric));
    o.item("homomorphism", s.homomorphism < TOL, format!("{:e}", s.homomorphism));
    let w = sigma::detq_nonconservation_witness().unwrap();
    o.item("witness nonzero", !w.is_zero(), "zero");
    o.item("witness vanishes at q = 1", sigma::vanishes_at_one(&w).unwrap(), "nonzero at q = 1");
    o.finish(5, "vector representation", t0, Duration::from_secs(10));
}

#[test]
fn criterion_6_representations() {
    let t0 = Instant::now();
    let r = run_suite("repr", &Model::standard()).unwrap();
    let mut o = Outcome::new();
    o.record(
        &r,
        &[
            "spin_half",
            "coproduct_j1/2",
            "coproduct_j1",
            "coproduct_j3/2",
            "classical_j0",
            "classical_j1/2",
            "classical_j1",
            "classical_j3/2",
            "classical_j2",
            "formula_j0",
            "formula_j1/2",
            "formula_j1",
            "formula_j3/2",
            "formula_j2",
            "invariant_j0",
            "invariant_j1/2",
            "invariant_j1",
            "invariant_j3/2",
            "plane_lemma",
            "expansion_j0",
            "expansion_j1/2",
            "expansion_j1",
            "expansion_j3/2",
            "expansion_j2",
        ],
    );
    let report = repr::check_expansion(4, TildePrefactor::Printed).unwrap();
    o.item(
        "resolved factorial convention",
        report.resolved().is_some(),
        "no convention closes every grade",
    );
    o.finish(6, "spin-j representations", t0, Duration::from_secs(60));
}

fn caught(m: Mutation, baseline: &SuiteReport) -> (bool, String) {
    let r = run_suite("all", &Model::mutated(m)).unwrap();
    let fresh: Vec<&str> = r
        .failures()
        .filter(|c| baseline.find(&c.id).is_some_and(|b| b.pass))
        .map(|c| c.id.as_str())
        .collect();
    (!fresh.is_empty(), format!("newly failing: {fresh:?}"))
}

#[test]
fn criterion_7_mutation_sensitivity() {
    let t0 = Instant::now();
    let baseline = run_suite("all", &Model::standard()).unwrap();
    let mut o = Outcome::new();
    let (ok, detail) = caught(Mutation::FlipDaRule, &baseline);
    o.item("flipped da rule", ok, detail);
    let r = run_suite("sldet", &Model::mutated(Mutation::FlipDaRule)).unwrap();
    o.item(
        "flipped da rule breaks centrality",
        r.failures().any(|c| c.id.starts_with("central_")),
        "centrality still holds",
    );
    let eps = Model::standard().eps;
    for row in 0..2 {
        for col in 0..2 {
            if eps.at(row, col).is_zero() {
                continue;
            }
            let (ok, detail) = caught(Mutation::FlipEpsilon { row, col }, &baseline);
            o.item(format!("flipped eps[{row}][{col}]"), ok, detail);
        }
    }
    o.finish(7, "mutation sensitivity", t0, Duration::from_secs(30));
}

fn random_scalar(rng: &mut ChaCha8Rng) -> LaurentScalar {
    let mut acc = LaurentScalar::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let re = GaussRat::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        let im = if rng.gen_bool(0.3) {
            GaussRat::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3))
        } else {
            GaussRat::zero()
        };
        let c = &re + &(&im * &GaussRat::i());
        acc = &acc + &LaurentScalar::monomial(c, rng.gen_range(-6..=6));
    }
    acc
}

fn random_poly(rng: &mut ChaCha8Rng, spec: &qspinor::ncalg::AlgebraSpec) -> NCPoly {
    let gens = [spec.index_of("a").unwrap(), spec.index_of("b").unwrap(), spec.index_of("c").unwrap()];
    let mut raw = Vec::new();
    for _ in 0..rng.gen_range(0..=4) {
        let len = rng.gen_range(0..=3);
        let w: Vec<u16> = (0..len).map(|_| gens[rng.gen_range(0..3)]).collect();
        raw.push((Word(w), random_scalar(rng)));
    }
    spec.normal_order_terms(raw).unwrap()
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_qspinor")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_8_parser_and_cli() {
    let t0 = Instant::now();
    let mut o = Outcome::new();
    let spec = specs::slq2();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = Vec::new();
    for k in 0..1000 {
        let p = random_poly(&mut rng, &spec);
        let text = print_canonical(&spec, &p);
        match parse_poly(&spec, &text) {
            Ok(back) if back == p => {}
            _ => bad.push((k, text)),
        }
    }
    o.item("1000 round trips", bad.is_empty(), format!("{} failures, first {:?}", bad.len(), bad.first()));

    let runs: [&[&str]; 4] = [
        &["emit", "dmatrix", "--j", "3/2", "--format", "json"],
        &["emit", "eta", "--q", "1.5"],
        &["verify", "epsilon"],
        &["normalize", "d*a*d", "--spec", "sl", "--reduce"],
    ];
    let mut outputs = HashMap::new();
    for args in runs {
        let first = run_cli(args);
        let second = run_cli(args);
        o.item(format!("deterministic: {}", args.join(" ")), first == second, "outputs differ");
        outputs.insert(args.join(" "), first);
    }
    let (code, _) = run_cli(&["verify", "epsilon"]);
    o.item("verify passing suite exits 0", code == 0, format!("exit {code}"));
    let report = run_suite("all", &Model::standard()).unwrap();
    let (code, _) = run_cli(&["verify", "all"]);
    o.item(
        "verify exit status follows the report",
        code == report.exit_code(),
        format!("exit {code}, report {}", report.exit_code()),
    );
    let (code, _) = run_cli(&["verify", "sldet", "--mutate", "flip-da"]);
    o.item("mutated build exits 1", code == 1, format!("exit {code}"));
    let (code, _) = run_cli(&["verify", "nosuch"]);
    o.item("unknown suite exits 2", code == 2, format!("exit {code}"));
    let (code, _) = run_cli(&["normalize", "a b", "--spec", "sl"]);
    o.item("syntax error exits 2", code == 2, format!("exit {code}"));
    let (code, _) = run_cli(&["emit", "dmatrix", "--j", "1/3"]);
    o.item("invalid spin exits 2", code == 2, format!("exit {code}"));
    o.finish(8, "parser round trip and command line", t0, Duration::from_secs(10));
}
