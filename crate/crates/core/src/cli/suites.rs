//! Identity suites: each check is computed from the model constants, so a
//! mutated model shows up as failures.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::ncalg::{specs, AlgebraSpec, NCPoly};
use crate::qcoeff::LaurentScalar;
use crate::repr::{self, FactorialConvention, ReprConvention, TildePrefactor};
use crate::sigma::{self, SigmaSet};
use crate::spinor::{
    self, antipode, epsilon_image, invariant_form, lower_index, mat2_diag, mat2_identity, mat2_mul, mat2_scale,
    numeric::CMat2, q_det_pair, transform, transpose_inverse, NCMatrix, SpinorExpr, TransformMode,
    Variance,
};

pub const SUITES: [&str; 7] = ["epsilon", "sldet", "spinor", "sigma", "vectorrep", "repr", "all"];

/// Numeric tolerance for the classical-limit checks.
pub const TOLERANCE: f64 = 1e-10;
/// Number of random unimodular matrices in the vector-representation suite.
pub const SAMPLES: usize = 100;
pub const SEED: u64 = 0x5eed_2024;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: String,
    /// Short name of the identity being checked.
    pub tag: String,
    pub pass: bool,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn find(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            write!(f, "{mark} {} [{}]", c.id, c.tag)?;
            if !c.pass {
                write!(f, " residual: {}", c.residual)?;
            }
            writeln!(f)?;
        }
        let failed = self.failures().count();
        writeln!(f, "{}: {} checks, {} failed", self.name, self.checks.len(), failed)
    }
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn new() -> Self {
        Builder { checks: Vec::new() }
    }

    fn push(&mut self, id: &str, tag: &str, outcome: Result<(bool, String)>) {
        let (pass, residual) = match outcome {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(Check {
            id: id.to_string(),
            tag: tag.to_string(),
            pass,
            residual,
        });
    }

    /// Passes when `p` is zero; the residual is its rendering.
    fn zero(&mut self, id: &str, tag: &str, spec: &AlgebraSpec, p: Result<NCPoly>) {
        self.push(id, tag, p.map(|p| (p.is_zero(), spec.render(&p))));
    }

    fn finish(self, name: &str) -> SuiteReport {
        SuiteReport {
            name: name.to_string(),
            checks: self.checks,
        }
    }
}

fn matrix_residual(m: &NCMatrix, target: &NCMatrix) -> Result<(bool, String)> {
    let d = m.sub(target)?;
    Ok((d.is_zero(), d.to_string()))
}

pub fn run_suite(name: &str, model: &Model) -> Result<SuiteReport> {
    let mut b = Builder::new();
    match name {
        "epsilon" => epsilon(&mut b, model),
        "sldet" => sldet(&mut b, model),
        "spinor" => spinor_suite(&mut b, model),
        "sigma" => sigma_suite(&mut b, model),
        "vectorrep" => vectorrep(&mut b, model),
        "repr" => repr_suite(&mut b, model),
        "all" => {
            epsilon(&mut b, model);
            sldet(&mut b, model);
            spinor_suite(&mut b, model);
            sigma_suite(&mut b, model);
            vectorrep(&mut b, model);
            repr_suite(&mut b, model);
        }
        other => return Err(Error::InvalidSpec(format!("unknown suite `{other}`"))),
    }
    Ok(b.finish(name))
}

fn fmt_mat2(m: &spinor::Mat2) -> String {
    format!("[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
}

fn epsilon(b: &mut Builder, model: &Model) {
    let e = model.eps.matrix();
    let et = model.eps.transpose();
    let hat = model.eps_hat.matrix();
    let minus_one = LaurentScalar::from_int(-1);
    let sq = mat2_mul(e, e);
    b.push(
        "eps_square",
        "eps eps = -1",
        Ok((sq == mat2_scale(&mat2_identity(), &minus_one), fmt_mat2(&sq))),
    );
    let eet = mat2_mul(e, &et);
    b.push(
        "eps_eps_transpose",
        "eps eps^t = diag(q^-1, q)",
        Ok((eet == mat2_diag(LaurentScalar::q_pow(-1), LaurentScalar::q()), fmt_mat2(&eet))),
    );
    // eps^{AC} eps_{BC} = (eps^ eps^t)[A][B]
    let raise_lower = mat2_mul(hat, &et);
    b.push(
        "raise_lower_delta",
        "eps^{AC} eps_{BC} = delta",
        Ok((raise_lower == mat2_identity(), fmt_mat2(&raise_lower))),
    );
    let mt = mat2_scale(&et, &minus_one);
    b.push(
        "hat_is_minus_transpose",
        "eps^ = -eps^t",
        Ok((hat == &mt, fmt_mat2(hat))),
    );
}

fn sldet(b: &mut Builder, model: &Model) {
    let spec = Arc::new(model.sl());
    let eps = &model.eps;
    let t = match NCMatrix::generator_matrix(&spec, specs::T_NAMES) {
        Ok(t) => t,
        Err(e) => return b.push("generator_matrix", "T", Err(e)),
    };
    let blk = match specs::t_block(&spec) {
        Ok(x) => x,
        Err(e) => return b.push("unimodular_block", "ad - q bc = 1", Err(e)),
    };
    let delta = specs::q_determinant(&spec, specs::T_NAMES, &LaurentScalar::q());
    match (q_det_pair(&t, eps), delta) {
        (Ok(pair), Ok(delta)) => {
            b.zero("det_left", "T^t eps T = eps (ad - q bc)", &spec, Ok(&pair.from_left - &delta));
            b.zero("det_right", "T eps T^t = eps (ad - q bc)", &spec, Ok(&pair.from_right - &delta));
        }
        (Err(e), _) | (_, Err(e)) => {
            b.push("det_left", "T^t eps T = eps (ad - q bc)", Err(e.clone()));
            b.push("det_right", "T eps T^t = eps (ad - q bc)", Err(e));
        }
    }
    if let Ok(delta) = specs::q_determinant(&spec, specs::T_NAMES, &LaurentScalar::q()) {
        for g in specs::T_NAMES {
            let id = format!("central_{g}");
            let r = spec.gen(g).and_then(|x| spec.commutator(&delta, &x));
            b.zero(&id, "[ad - q bc, g] = 0", &spec, r);
        }
    }
    let one = NCMatrix::identity(&spec, 2);
    let r = antipode(&t).and_then(|s| {
        let ts = t.mul(&s)?.reduce_unimodular(&blk)?;
        let st = s.mul(&t)?.reduce_unimodular(&blk)?;
        let (p1, r1) = matrix_residual(&ts, &one)?;
        let (p2, r2) = matrix_residual(&st, &one)?;
        Ok((p1 && p2, format!("{r1} / {r2}")))
    });
    b.push("antipode", "T S(T) = S(T) T = 1", r);
    let r = transpose_inverse(&t, eps)
        .and_then(|ti| t.transpose().mul(&ti)?.reduce_unimodular(&blk))
        .and_then(|m| matrix_residual(&m, &one));
    b.push("transpose_inverse", "T^t (-eps T eps) = 1", r);
    let conf = spec
        .check_confluence()
        .map(|c| (c.is_empty(), format!("{} unresolved overlaps", c.len())));
    b.push("confluence", "overlap words resolve", conf);
}

fn spinor_suite(b: &mut Builder, model: &Model) {
    let spec = Arc::new(model.spinor(false));
    let eps = &model.eps;
    let setup = || -> Result<_> {
        let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES)?;
        let blk = specs::t_block(&spec)?;
        let xi = SpinorExpr::from_generators(&spec, ["x1", "x2"], Variance::Upper)?;
        let chi = SpinorExpr::from_generators(&spec, ["y1", "y2"], Variance::Upper)?;
        Ok((t, blk, xi, chi))
    };
    let (t, blk, xi, chi) = match setup() {
        Ok(x) => x,
        Err(e) => return b.push("setup", "spinor algebra", Err(e)),
    };
    let before = invariant_form(&spec, &xi, &chi, eps);
    for (mode, id) in [(TransformMode::Right, "form_invariant_right"), (TransformMode::Left, "form_invariant_left")] {
        let r = before.clone().and_then(|before| {
            let xt = transform(&xi, &t, mode, eps)?;
            let ct = transform(&chi, &t, mode, eps)?;
            let after = invariant_form(&spec, &xt, &ct, eps)?;
            spec.reduce_unimodular(&(&after - &before), &blk)
        });
        b.zero(id, "xi' eps chi' = xi eps chi", &spec, r);
    }
    let r = (|| {
        let low = lower_index(&xi, eps, false)?;
        let lt = transform(&low, &t, TransformMode::Covariant, eps)?;
        let ct = transform(&chi, &t, TransformMode::Right, eps)?;
        let xt = transform(&xi, &t, TransformMode::Right, eps)?;
        let lowered_after = lower_index(&xt, eps, false)?;
        let mut acc = spec.reduce_unimodular(
            &(&spinor::contract(&spec, &lt, &ct)? - &spinor::contract(&spec, &low, &chi)?),
            &blk,
        )?;
        for k in 0..2 {
            let d = &lowered_after.components[k] - &lt.components[k];
            acc = &acc + &spec.reduce_unimodular(&d, &blk)?;
        }
        Ok(acc)
    })();
    b.zero("lowering_covariance", "xi'_A chi'^A = xi_A chi^A", &spec, r);
    let r = epsilon_image(&t, eps)
        .and_then(|m| m.reduce_unimodular(&blk))
        .and_then(|m| matrix_residual(&m, &eps.to_ncmatrix(&spec)));
    b.push("epsilon_invariant", "T eps T^t = eps", r);
    let r = spinor::plane_relation_from_form(&spec, ["x1", "x2"], ["y1", "y2"], eps)
        .map(|l| (l == LaurentScalar::q(), l.to_string()));
    b.push("plane_relation", "xi eps xi = 0 => x2 x1 = q x1 x2", r);
}

fn sigma_set(model: &Model) -> SigmaSet {
    sigma::compute_bar_sigma(&model.eps_hat)
}

fn sigma_suite(b: &mut Builder, model: &Model) {
    let set = sigma_set(model);
    let printed = sigma::printed_bar_sigma();
    let bad: Vec<usize> = (0..4).filter(|&m| set.bar_sigma[m] != printed[m]).collect();
    b.push("bar_sigma_closed_form", "raised sigma list", Ok((bad.is_empty(), format!("differs at {bad:?}"))));
    let mism = sigma::eta_mismatches(&set);
    let text = mism
        .iter()
        .map(|(r, c, g, p)| format!("({r},{c}): contraction {g}, closed form {p}"))
        .collect::<Vec<_>>()
        .join("; ");
    b.push("contraction_is_metric", "1/2 Tr(bar_sigma sigma) = eta", Ok((mism.is_empty(), text)));
    let two = BigRational::from_integer(BigInt::from(2));
    let r = sigma::completeness_with_printed_inverse(&set, &two)
        .map(|w| (w.is_zero(), format!("largest residual {w} at q = 2")));
    b.push("completeness_closed_form_inverse", "sigma bar_sigma completeness", r);
    let r = sigma::eta(&set).map(|m| {
        let res = sigma::completeness_residual(&set, &m.lower);
        (sigma::residual_is_zero(&res), "nonzero entries".to_string())
    });
    b.push("completeness_contraction_inverse", "sigma bar_sigma completeness", r);
    match sigma::classical_limits(&set) {
        Ok(l) => {
            for (id, ok) in [
                ("limit_bar_sigma", l.bar_sigma_is_parity),
                ("limit_anticommutator", l.anticommutator),
                ("limit_trace", l.trace),
                ("limit_trace_lowered", l.trace_lowered),
                ("limit_completeness", l.completeness),
                ("limit_metric", l.metric),
            ] {
                b.push(id, "q = 1 limit", Ok((ok, "differs at q = 1".into())));
            }
        }
        Err(e) => b.push("classical_limits", "q = 1 limit", Err(e)),
    }
}

/// Random `[[a, b], [c, d]]` with `ad - bc = 1`.
pub fn random_unimodular(rng: &mut ChaCha8Rng) -> CMat2 {
    let mut draw = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    loop {
        let (a, b, c) = (draw(), draw(), draw());
        if a.norm() > 0.2 {
            return [[a, b], [c, (Complex64::new(1.0, 0.0) + b * c) / a]];
        }
    }
}

fn max_abs4(x: &[[Complex64; 4]; 4], y: &[[Complex64; 4]; 4]) -> f64 {
    let mut m: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            m = m.max((x[r][c] - y[r][c]).norm());
        }
    }
    m
}

fn mul4(x: &[[Complex64; 4]; 4], y: &[[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            for k in 0..4 {
                out[r][c] += x[r][k] * y[k][c];
            }
        }
    }
    out
}

/// Worst deviations over the random sample: imaginary part, metric
/// preservation, homomorphism.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzSample {
    pub imaginary: f64,
    pub metric: f64,
    pub homomorphism: f64,
}

pub fn lorentz_sample(model: &Model, samples: usize, seed: u64) -> Result<LorentzSample> {
    let spec = Arc::new(model.sl_with_conjugate());
    let set = sigma_set(model);
    let metric = sigma::eta(&set)?;
    let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES)?;
    let m = sigma::vector_rep(&t, &set, &metric.lower)?;
    let eta1 = sigma::mat4_at_one(&metric.lower)?;
    let eta: [[Complex64; 4]; 4] = std::array::from_fn(|r| std::array::from_fn(|c| eta1[r][c].to_complex()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = LorentzSample {
        imaginary: 0.0,
        metric: 0.0,
        homomorphism: 0.0,
    };
    let eval = |x: &CMat2| sigma::evaluate4(&m, &sigma::conjugate_pair_assignment(x), 1.0);
    for _ in 0..samples {
        let t1 = random_unimodular(&mut rng);
        let t2 = random_unimodular(&mut rng);
        let m1 = eval(&t1)?;
        let m2 = eval(&t2)?;
        let m12 = eval(&spinor::numeric::mul(&t1, &t2))?;
        for row in &m1 {
            for x in row {
                worst.imaginary = worst.imaginary.max(x.im.abs());
            }
        }
        let mt: [[Complex64; 4]; 4] = std::array::from_fn(|r| std::array::from_fn(|c| m1[c][r]));
        worst.metric = worst.metric.max(max_abs4(&mul4(&mul4(&mt, &eta), &m1), &eta));
        worst.homomorphism = worst.homomorphism.max(max_abs4(&m12, &mul4(&m1, &m2)));
    }
    Ok(worst)
}

fn vectorrep(b: &mut Builder, model: &Model) {
    let spec = Arc::new(model.sl_with_conjugate());
    let set = sigma_set(model);
    let r = sigma::eta(&set).and_then(|metric| {
        let m = sigma::vector_rep(&NCMatrix::identity(&spec, 2), &set, &metric.lower)?;
        Ok((m.is_identity(), m.to_string()))
    });
    b.push("identity", "M(1) = 1", r);
    match lorentz_sample(model, SAMPLES, SEED) {
        Ok(s) => {
            b.push("real", "M real at q = 1", Ok((s.imaginary < TOLERANCE, format!("{:e}", s.imaginary))));
            b.push("lorentz", "M^t eta M = eta at q = 1", Ok((s.metric < TOLERANCE, format!("{:e}", s.metric))));
            b.push(
                "homomorphism",
                "M(T1 T2) = M(T1) M(T2) at q = 1",
                Ok((s.homomorphism < TOLERANCE, format!("{:e}", s.homomorphism))),
            );
        }
        Err(e) => b.push("lorentz", "M^t eta M = eta at q = 1", Err(e)),
    }
    let r = sigma::detq_nonconservation_witness().and_then(|w| {
        let vanishes = sigma::vanishes_at_one(&w)?;
        Ok((!w.is_zero() && vanishes, format!("{} terms, vanishes at q = 1: {vanishes}", w.len())))
    });
    b.push("detq_witness", "det_q(T X T^dagger) != det_q X, equal at q = 1", r);
}

/// Largest entrywise deviation between the derived matrix at `q = 1` and the
/// commutative symmetric power, over a fixed set of sample matrices.
pub fn classical_deviation(j2: i64, samples: usize, seed: u64) -> Result<f64> {
    let d = repr::derive_dmatrix(j2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let t = random_unimodular(&mut rng);
        let assign = spinor::numeric_assignment(specs::T_NAMES, &t);
        let got = repr::evaluate_at_one(&d.entries, &assign)?;
        let want = repr::symmetric_power(j2, &t);
        for (gr, wr) in got.iter().zip(want.iter()) {
            for (g, w) in gr.iter().zip(wr.iter()) {
                worst = worst.max((g - w).norm());
            }
        }
    }
    Ok(worst)
}

fn repr_suite(b: &mut Builder, _model: &Model) {
    let r = repr::derive_dmatrix(1).and_then(|d| {
        let t = NCMatrix::generator_matrix(d.entries.spec(), specs::T_NAMES)?;
        matrix_residual(&d.entries, &t)
    });
    b.push("spin_half", "D(1/2) = T", r);
    for j2 in 1..=3 {
        let id = format!("coproduct_j{}", repr::j_label(j2));
        b.push(&id, "D(T' T'') = D(T') D(T'')", coproduct_residual(j2));
    }
    for j2 in 0..=4 {
        let id = format!("classical_j{}", repr::j_label(j2));
        let r = classical_deviation(j2, 10, SEED).map(|d| (d < TOLERANCE, format!("{d:e}")));
        b.push(&id, "q = 1 symmetric power", r);
    }
    let conv = repr::FormulaConvention::frozen();
    for j2 in 0..=4 {
        let id = format!("formula_j{}", repr::j_label(j2));
        let r = repr::derive_dmatrix(j2).and_then(|d| {
            let f = repr::formula_dmatrix(j2, &conv)?;
            let diff = repr::compare_dmatrices(&d, &f)?;
            Ok((diff.is_empty(), format!("{} entries differ", diff.len())))
        });
        b.push(&id, "closed-form D = derived D", r);
    }
    let expansion = repr::check_expansion(4, TildePrefactor::Printed);
    let resolved = expansion.as_ref().ok().and_then(|r| r.resolved());
    for j2 in 0..=3 {
        let id = format!("invariant_j{}", repr::j_label(j2));
        let r = q_invariance(j2, TildePrefactor::Printed, resolved);
        b.push(&id, "Q(j) invariant", r);
    }
    match &expansion {
        Ok(rep) => {
            b.push("plane_lemma", "c1 c2 . c2 c1 = c2 c1 . c1 c2", Ok((rep.lemma, String::new())));
            for line in &rep.lines {
                let id = format!("expansion_j{}", repr::j_label(line.j2));
                let pass = match resolved {
                    Some(c) => line.closing.contains(&c),
                    None => line.closing.len() == FactorialConvention::ALL.len(),
                };
                let text = if line.closing.is_empty() {
                    "no factorial convention closes".to_string()
                } else {
                    format!("closes under {:?}", line.closing.iter().map(|c| c.name()).collect::<Vec<_>>())
                };
                b.push(&id, "(i chi eps chi)^2j = (2j)! sum Vt V (-q)^m", Ok((pass, text)));
            }
        }
        Err(e) => b.push("expansion", "(i chi eps chi)^2j = (2j)! sum Vt V (-q)^m", Err(e.clone())),
    }
    let r = corrected_reading(4).map(|c| {
        let text = match c {
            Some(c) => format!("closes under {c}"),
            None => "no convention closes".to_string(),
        };
        (c.is_some(), text)
    });
    b.push("inverted_tilde_prefactor", "Vt with eps(q^-1|j-m): expansion and Q(j)", r);
}

/// Passes when the invariance residual vanishes under `resolved`; without a
/// resolved convention it reports which conventions (if any) work.
fn q_invariance(j2: i64, tilde: TildePrefactor, resolved: Option<FactorialConvention>) -> Result<(bool, String)> {
    let mut closing = Vec::new();
    let mut first_residual = None;
    for f in FactorialConvention::ALL {
        let r = repr::q_invariance_residual(j2, &ReprConvention { factorial: f, tilde })?;
        if r.is_zero() {
            closing.push(f);
        } else if first_residual.is_none() {
            first_residual = Some((f, r.len()));
        }
    }
    let pass = match resolved {
        Some(c) => closing.contains(&c),
        None => closing.len() == FactorialConvention::ALL.len(),
    };
    let text = match (closing.is_empty(), first_residual) {
        (true, Some((f, n))) => format!("not invariant under any convention ({n} residual terms under {f})"),
        _ => format!(
            "invariant under {:?}; resolved convention {:?}",
            closing.iter().map(|c| c.name()).collect::<Vec<_>>(),
            resolved.map(|c| c.name())
        ),
    };
    Ok((pass, text))
}

/// `D(T1 T2) - D(T1) D(T2)` in the doubled algebra.
pub fn coproduct_residual(j2: i64) -> Result<(bool, String)> {
    let spec = Arc::new(repr::doubled_repr_spec());
    let t1 = NCMatrix::generator_matrix(&spec, repr::T1)?;
    let t2 = NCMatrix::generator_matrix(&spec, repr::T2)?;
    let lhs = repr::derive_dmatrix_in(&spec, &t1.mul(&t2)?, repr::CHI, j2)?;
    let d1 = repr::derive_dmatrix_in(&spec, &t1, repr::CHI, j2)?;
    let d2 = repr::derive_dmatrix_in(&spec, &t2, repr::CHI, j2)?;
    let rhs = d1.entries.mul(&d2.entries)?;
    matrix_residual(&lhs.entries, &rhs)
}

/// The corrected reading of the tilde prefactor, checked separately: both the
/// expansion and the invariance close under one factorial convention.
pub fn corrected_reading(j2_max: i64) -> Result<Option<FactorialConvention>> {
    let rep = repr::check_expansion(j2_max, TildePrefactor::Inverted)?;
    let Some(conv) = rep.resolved() else { return Ok(None) };
    for j2 in 0..=j2_max.min(3) {
        let r = repr::q_invariance_residual(j2, &ReprConvention { factorial: conv, tilde: TildePrefactor::Inverted })?;
        if !r.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(conv))
}
