//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.

mod oracle;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbiqrr_core::bernoulli::{bernoulli_number, bernoulli_poly, bernoulli_value};
use orbiqrr_core::fockquant::{
    cocycle_formula, commutator_cocycle, darboux_hamiltonian, quantize_formula, quantize_monomial, string_residual,
    Shape,
};
use orbiqrr_core::genus0::{
    check_divisor_shift, check_universal_equation, extract_invariants, hypergeometric_modification, j_closed_form_pn,
    mirror_map, nonequivariant_limit, point_correlator_table, small_expansion, CorrelatorKey, EquationKind,
    InvariantMode, Provenance,
};
use orbiqrr_core::loopops::{
    adjoint_matrix, check_symplectomorphism, class_am, delta_operator, euler_s_values, log_delta, twisted_gram,
};
use orbiqrr_core::orbtarget::builtin::{bmu, bmu_character, point, projective, trivial, wps, wps_line};
use orbiqrr_core::serre::{
    check_dual_am_identity, check_serre_cone, dual_bundle, dual_class_product, dual_s_values, serre_m_operator,
};
use orbiqrr_core::{BundleModel, Error, Matrix, Rational, SValues, Scalar, TargetModel};

use oracle::Q;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn(&mut ChaCha8Rng) -> Outcome,
    /// A sub-claim that cannot hold as stated; its failure is reported but does not abort the run.
    known_gap: Option<fn() -> Outcome>,
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn to_q(r: &Rational) -> Q {
    Q::new(r.numer().clone(), r.denom().clone())
}

fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rational(rng.gen_range(-60..=60), rng.gen_range(1..=25))
}

fn random_s(rng: &mut ChaCha8Rng, smax: usize) -> SValues {
    let s = (0..=smax).map(|_| Scalar::from_rational(random_rational(rng))).collect();
    SValues::from_list(s).with_exp_half_s0(Scalar::lambda())
}

fn random_bundle(rng: &mut ChaCha8Rng, t: &TargetModel, pieces: &[BundleModel]) -> BundleModel {
    let n = rng.gen_range(1..=3);
    let mut f = pieces[rng.gen_range(0..pieces.len())].clone();
    for _ in 1..n {
        f = f.direct_sum(&pieces[rng.gen_range(0..pieces.len())], "F");
    }
    f.validate(t).expect("direct sums of valid bundles are valid");
    f
}

fn bernoulli_suite(rng: &mut ChaCha8Rng) -> Outcome {
    let x = random_rational(rng);
    ensure(bernoulli_number(0) == Rational::one(), || "B_0 ≠ 1".into())?;
    ensure(bernoulli_value(0, &x) == Rational::one(), || "B_0(x) ≠ 1".into())?;
    ensure(bernoulli_value(1, &x) == &x - rational(1, 2), || "B_1(x) ≠ x − 1/2".into())?;
    ensure(bernoulli_value(2, &x) == &x * &x - &x + rational(1, 6), || "B_2(x) ≠ x² − x + 1/6".into())?;
    let reference = oracle::bernoulli_numbers(20);
    for (m, b) in reference.iter().enumerate() {
        ensure(to_q(&bernoulli_number(m)) == *b, || format!("B_{m} differs from the recurrence"))?;
    }
    let polys: Vec<_> = (0..=20).map(bernoulli_poly).collect();
    let mut checks = 0;
    for _ in 0..50 {
        let x = random_rational(rng);
        let reflected = Rational::one() - &x;
        for (m, p) in polys.iter().enumerate() {
            let sign = if m % 2 == 0 { Rational::one() } else { -Rational::one() };
            ensure(p.eval(&reflected) == sign * p.eval(&x), || format!("B_{m}(1 − x) at x = {x}"))?;
            let want = oracle::bernoulli_poly_with(&reference, m, &to_q(&x));
            ensure(to_q(&p.eval(&x)) == want, || format!("B_{m}({x}) vs oracle"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} reflection instances, m ≤ 20"))
}

fn adjointness_suite(rng: &mut ChaCha8Rng) -> Outcome {
    let mut targets: Vec<(TargetModel, Vec<BundleModel>)> = (1..=6)
        .map(|r| {
            let t = bmu(r);
            let chars = (0..r as i64).map(|j| bmu_character(&t, j)).collect();
            (t, chars)
        })
        .collect();
    let w = wps(&[1, 1, 2]).map_err(err)?;
    let lines = (-3..=3).map(|k| wps_line(&w, k)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    targets.push((w, lines));
    let mut checks = 0;
    for (t, pieces) in &targets {
        for _ in 0..3 {
            let f = random_bundle(rng, t, pieces);
            let s = random_s(rng, 9);
            let gt = twisted_gram(t, &f, &s).map_err(err)?;
            let gt_inv = gt.inverse().ok_or("twisted pairing degenerate")?;
            let pairings: [(&str, Box<dyn Fn(&Matrix) -> Matrix>); 2] = [
                ("plain", Box::new(|m: &Matrix| adjoint_matrix(t, m))),
                ("twisted", Box::new(|m: &Matrix| gt_inv.mul(&m.transpose()).mul(&gt))),
            ];
            for m in 1..=9usize {
                let mut a = class_am(t, &f, m);
                if m == 1 {
                    // B_1(0) = −B_1(1) is the one place where reflection breaks
                    a = a.add(&f.invariant_ch(t).scale(&Scalar::frac(1, 2)));
                }
                let op = t.multiplication_matrix(&a);
                let expected = if m % 2 == 0 { op.clone() } else { Matrix::zeros(op.rows(), op.cols()).sub(&op) };
                for (name, adj) in &pairings {
                    ensure(adj(&op) == expected, || format!("A_{m} on {} with {} under the {name} pairing", t.name, f.name))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} adjointness identities on Bμ_1..Bμ_6 and WPS(1,1,2)"))
}

fn symplectic_suite(rng: &mut ChaCha8Rng) -> Outcome {
    let b3 = bmu(3);
    let w = wps(&[1, 1, 2]).map_err(err)?;
    let cases = [
        (b3.clone(), bmu_character(&b3, 1)),
        (b3.clone(), bmu_character(&b3, 1).direct_sum(&bmu_character(&b3, 2), "F")),
        (w.clone(), wps_line(&w, 1).map_err(err)?),
        (w.clone(), wps_line(&w, 3).map_err(err)?),
    ];
    let mut ran = 0;
    for (t, f) in &cases {
        for _ in 0..2 {
            let s = random_s(rng, 3);
            let d = delta_operator(t, f, &s, 6).map_err(err)?;
            let rep = check_symplectomorphism(t, &d, 4).map_err(err)?;
            ensure(rep.passed(), || format!("Δ on {} with {}: {rep:?}", t.name, f.name))?;
            ran += 1;
        }
    }
    Ok(format!("{ran} random Δ with s_0..s_3, residual 0 through z^4"))
}

fn euler_suite(_: &mut ChaCha8Rng) -> Outcome {
    let s = euler_s_values(5, true);
    let p = point();
    let b3 = bmu(3);
    let cases = [
        (p.clone(), trivial(&p, 1), 0usize, Q::zero()),
        (b3.clone(), bmu_character(&b3, 1), 1usize, oracle::q(1, 3)),
    ];
    for (t, f, sector, a) in &cases {
        let ld = log_delta(t, f, &s, 3);
        // z^0: ℓ·(a − 1/2), plus ℓ/2 from √c on an untwisted sector
        let z0 = ld.block(0).get(*sector, *sector).clone();
        let a_r = Rational::new(a.numer().clone(), a.denom().clone());
        let shift = if a.is_zero() { rational(0, 1) } else { rational(-1, 2) };
        ensure(z0 == Scalar::ell().scale(&(&a_r + &shift)), || format!("z^0 on {}: {z0}", t.name))?;
        for n in 1..=3i32 {
            let m = n as usize + 1;
            let c = oracle::stirling_coefficient(m, a);
            let expected = Scalar::lambda_pow(-n).scale(&Rational::new(c.numer().clone(), c.denom().clone()));
            let got = ld.block(n).get(*sector, *sector).clone();
            ensure(got == expected, || format!("z^{n} on {}: {got} vs {expected}", t.name))?;
        }
    }
    let z1 = log_delta(&p, &trivial(&p, 1), &s, 1).block(1).get(0, 0).clone();
    ensure(z1 == Scalar::lambda_pow(-1).scale(&rational(1, 12)), || format!("point z^1: {z1}"))?;
    Ok("point z^1 = 1/(12λ); Bμ_3 sector z^0 = −ℓ/6".into())
}

struct QuinticRun {
    f: Vec<Q>,
    gp: Vec<Q>,
    tau: Vec<Q>,
    gw: Vec<Q>,
    inst: Vec<Q>,
}

fn quintic_pipeline(dmax: u32) -> Result<QuinticRun, String> {
    let p4 = projective(4);
    let o5 = wps_line(&p4, 5).map_err(err)?;
    let j = j_closed_form_pn(&p4, dmax).map_err(err)?;
    let i = nonequivariant_limit(&p4, &hypergeometric_modification(&p4, &o5, &j).map_err(err)?).map_err(err)?;
    let mm = mirror_map(&p4, &i).map_err(err)?;
    mm.check_normal_form(&p4).map_err(err)?;
    let coeffs = |s: &orbiqrr_core::TruncSeries| -> Result<Vec<Q>, String> {
        (0..=dmax).map(|d| s.q(d).as_rational().map(|r| to_q(&r)).ok_or(format!("Q^{d} not rational"))).collect()
    };
    let gp = mm.expansion.g.get(&(0, 1)).cloned().ok_or("no G^p")?;
    let table = extract_invariants(&p4, &o5, &mm, InvariantMode::Quintic).map_err(err)?;
    Ok(QuinticRun {
        f: coeffs(&mm.expansion.f)?,
        gp: coeffs(&gp)?,
        tau: coeffs(&mm.tau_coordinate(0, 1))?,
        gw: table.rows.iter().map(|r| to_q(&r.gw)).collect(),
        inst: table.rows.iter().map(|r| to_q(&r.instanton)).collect(),
    })
}

fn quintic_suite(_: &mut ChaCha8Rng) -> Outcome {
    let dmax = 3;
    let (w0, w1) = oracle::quintic_periods(dmax);
    let tau = w1.mul(&w0.inv());
    let gw = oracle::quintic_gw(dmax);
    let inst = oracle::instantons(&gw);
    let run = quintic_pipeline(dmax as u32)?;
    ensure(run.f == w0.0, || format!("F: {:?} vs {:?}", run.f, w0.0))?;
    ensure(run.gp == w1.0, || format!("G^p: {:?} vs {:?}", run.gp, w1.0))?;
    ensure(run.tau == tau.0, || format!("τ: {:?} vs {:?}", run.tau, tau.0))?;
    ensure(run.gw == gw, || format!("N_d: {:?} vs {:?}", run.gw, gw))?;
    ensure(run.inst == inst, || format!("n_d: {:?} vs {:?}", run.inst, inst))?;
    let int = |n: i64| Q::from_integer(n.into());
    ensure(run.f[1] == int(120) && run.gp[1] == int(770), || "F_1 or G^p_1".into())?;
    ensure(run.gw[0] == int(2875) && run.gw[1] == oracle::q(4876875, 8), || "N_1 or N_2".into())?;
    ensure(run.inst[1] == int(609250), || "n_2".into())?;
    Ok(format!("F, G^p, τ, N_1..N_3 = oracle; n_3 = {}", run.inst[2]))
}

fn quintic_mirror_map_claim() -> Outcome {
    let run = quintic_pipeline(1)?;
    let claimed = oracle::q(77, 12);
    if run.tau[1] == claimed {
        return Ok("τ has Q-coefficient 77/12".into());
    }
    Err(format!(
        "τ = G^p/F has Q-coefficient {} (oracle and pipeline agree); 77/12 is G^p_1/F_1 = {}/{}, a ratio of coefficients, not a coefficient of the mirror map",
        run.tau[1], run.gp[1], run.f[1]
    ))
}

fn random_symplectic(rng: &mut ChaCha8Rng, t: &TargetModel, m: i32) -> Option<Matrix> {
    let n = t.total_dim();
    for _ in 0..8 {
        let mut x = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                x.set(i, j, Scalar::frac(rng.gen_range(-5..=5), rng.gen_range(1..=4)));
            }
        }
        let adj = adjoint_matrix(t, &x);
        let b = if m.rem_euclid(2) == 1 { x.add(&adj) } else { x.sub(&adj) };
        if !b.is_zero() {
            return Some(b);
        }
    }
    None
}

fn quantization_suite(rng: &mut ChaCha8Rng) -> Outcome {
    let k = 5u32;
    let b3 = bmu(3);
    let n = b3.total_dim();
    let (g, ginv) = (b3.gram(), b3.gram().inverse().ok_or("gram")?);
    for m in -2..=2i32 {
        let b = random_symplectic(rng, &b3, m).ok_or("no symplectic B on Bμ_3")?;
        let op = quantize_monomial(&b3, &b, m, k).map_err(err)?;
        ensure(op == darboux_hamiltonian(&b3, &b, m, k).quantize(k, n), || format!("Darboux quantization, m = {m}"))?;
        let (lower, upper) = (g.mul(&b), b.mul(&ginv));
        for ((shape, x, y), c) in &op.terms {
            let key = |u: (u32, usize), v: (u32, usize)| if u <= v { (u, v) } else { (v, u) };
            let mut expected = Scalar::zero();
            match shape {
                Shape::QD => {
                    if y.0 as i32 == x.0 as i32 + m {
                        expected = -b.get(y.1, x.1).clone();
                    }
                }
                Shape::QQ => {
                    for k in 0..(-m).max(0) {
                        let k2 = (-1 - k - m) as u32;
                        let sign = if (k + m).rem_euclid(2) == 0 { 1 } else { -1 };
                        for al in 0..n {
                            for be in 0..n {
                                if key((k as u32, be), (k2, al)) == (*x, *y) {
                                    expected = &expected + &lower.get(al, be).scale(&rational(sign, 2));
                                }
                            }
                        }
                    }
                }
                Shape::DD => {
                    for k in 0..m.max(0) {
                        let k2 = (m - 1 - k) as u32;
                        let sign = if k % 2 == 0 { 1 } else { -1 };
                        for al in 0..n {
                            for be in 0..n {
                                if key((k as u32, be), (k2, al)) == (*x, *y) {
                                    expected = &expected + &upper.get(al, be).scale(&rational(sign, 2));
                                }
                            }
                        }
                    }
                }
            }
            let allowed = match shape {
                Shape::QD => true,
                Shape::QQ => m < 0,
                Shape::DD => m > 0,
            };
            ensure(allowed && *c == expected, || format!("{shape:?} term {c} at {x:?},{y:?} for m = {m}"))?;
        }
    }
    let p = point();
    let one = Matrix::identity(1);
    let pure = quantize_formula(&p, &one, 0, 3);
    ensure(pure.terms.iter().all(|((s, x, y), c)| *s == Shape::QD && x == y && *c == Scalar::from_int(-1)), || {
        "m = 0 is not a pure Σ q_k ∂_{q_k}".into()
    })?;
    let c = commutator_cocycle(&p, (&one, 1), (&one, -1), 6).map_err(err)?;
    let f = cocycle_formula(&darboux_hamiltonian(&p, &one, 1, 6), &darboux_hamiltonian(&p, &one, -1, 6));
    let closed = Scalar::frac(-1, 4).scale(&rational(2, 1));
    ensure(c == Scalar::frac(-1, 2) && f == closed, || format!("[ẑ, (1/z)^] = {c}, formula {f}"))?;
    let targets = [point(), bmu(2), bmu(3)];
    let mut pairs = 0;
    while pairs < 20 {
        let t = &targets[pairs % targets.len()];
        let ms: [i32; 2] = [rng.gen_range(-3..=3), rng.gen_range(-3..=3)];
        // every even-m operator on a point is zero
        let (Some(b0), Some(b1)) = (random_symplectic(rng, t, ms[0]), random_symplectic(rng, t, ms[1])) else {
            continue;
        };
        let k = (ms[0].abs() + ms[1].abs() + 3) as u32;
        let c = commutator_cocycle(t, (&b0, ms[0]), (&b1, ms[1]), k).map_err(err)?;
        let f = cocycle_formula(&darboux_hamiltonian(t, &b0, ms[0], k), &darboux_hamiltonian(t, &b1, ms[1], k));
        ensure(c == f, || format!("cocycle on {} for m = {ms:?}: {c} vs {f}", t.name))?;
        pairs += 1;
    }
    let r = string_residual(&p, &point_correlator_table(7), 6, 6).map_err(err)?;
    ensure(r.is_zero(), || format!("string residual {r:?}"))?;
    Ok("shapes, cocycle −1/2, 20 random pairs, string residual 0 for n ≤ 6".into())
}

fn universal_suite(_: &mut ChaCha8Rng) -> Outcome {
    let p = point();
    let table = point_correlator_table(8);
    let mut instances = 0;
    for kind in [EquationKind::String, EquationKind::Dilaton, EquationKind::Trr] {
        let rep = check_universal_equation(&p, &table, kind).map_err(err)?;
        ensure(rep.passed() && rep.instances > 0, || format!("{kind:?}: {rep:?}"))?;
        instances += rep.instances;
    }
    for n in 1..=3 {
        let t = projective(n);
        let j = j_closed_form_pn(&t, 3).map_err(err)?;
        ensure(check_divisor_shift(&t, &j, 1, 3).map_err(err)?, || format!("divisor shift on P{n}"))?;
    }
    Ok(format!("{instances} point instances; divisor shift on P1..P3"))
}

fn serre_suite(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases: Vec<(TargetModel, BundleModel)> = Vec::new();
    for r in 1..=4 {
        let t = bmu(r);
        for j in 0..r as i64 {
            cases.push((t.clone(), bmu_character(&t, j)));
        }
    }
    let p1 = projective(1);
    for k in [-2, 1, 3] {
        cases.push((p1.clone(), wps_line(&p1, k).map_err(err)?));
    }
    let w = wps(&[1, 1, 2]).map_err(err)?;
    cases.push((w.clone(), wps_line(&w, 3).map_err(err)?));
    for (t, f) in &cases {
        ensure(dual_bundle(t, &dual_bundle(t, f)) == *f, || format!("F^∨∨ ≠ F for {} on {}", f.name, t.name))?;
        let s = random_s(rng, 4);
        ensure(dual_s_values(&dual_s_values(&s)) == s, || "s^∨∨ ≠ s".into())?;
        let prod = dual_class_product(t, f, &s).map_err(err)?;
        ensure(prod == t.identity_class(), || format!("c^∨(F^∨)c(F) = {prod:?} on {}", t.name))?;
    }
    for (t, f) in cases.iter().filter(|(t, _)| t.name.starts_with("B")) {
        check_dual_am_identity(t, f, 8).map_err(err)?;
    }
    let b2 = bmu(2);
    for (t, f) in [(p1.clone(), wps_line(&p1, 1).map_err(err)?), (b2.clone(), bmu_character(&b2, 1))] {
        let s = random_s(rng, 2);
        let rep = check_serre_cone(&t, &f, &s, 3).map_err(err)?;
        ensure(rep.passed(), || format!("cone on {}: {rep:?}", t.name))?;
    }
    let b3 = bmu(3);
    let m = serre_m_operator(&b3, &bmu_character(&b3, 1)).map_err(err)?;
    ensure(m.get(1, 0) == Scalar::root_of_unity(12, 1), || format!("M on the sector: {}", m.get(1, 0)))?;
    Ok(format!("{} bundles; cone residual 0 through z^3; M = ζ_12", cases.len()))
}

fn negative_suite(_: &mut ChaCha8Rng) -> Outcome {
    let p1 = projective(1);
    let o3 = wps_line(&p1, 3).map_err(err)?;
    let i = hypergeometric_modification(&p1, &o3, &j_closed_form_pn(&p1, 2).map_err(err)?).map_err(err)?;
    match small_expansion(&p1, &i) {
        Err(Error::PositivityViolated(_)) => {}
        other => return Err(format!("P1/O(3) gave {other:?}")),
    }
    let p = point();
    let mut table = point_correlator_table(6);
    let key = CorrelatorKey::new(0, vec![(0, 0), (0, 0), (0, 0), (0, 1)]);
    table.set(key.clone(), Scalar::from_int(7), Provenance::Ingested);
    let rep = check_universal_equation(&p, &table, EquationKind::String).map_err(err)?;
    ensure(rep.failures.first().map(|f| &f.0) == Some(&key), || format!("first failure {:?}", rep.failures.first()))?;
    ensure(!string_residual(&p, &table, 6, 6).map_err(err)?.is_zero(), || "string residual missed it".into())?;
    Ok(format!("PositivityViolated; corrupted {} pinpointed", key.display(&p)))
}

fn main() -> ExitCode {
    if let Err(e) = oracle::self_check() {
        println!("FAIL  oracle self-check: {e}");
        return ExitCode::FAILURE;
    }
    let criteria = [
        Criterion { id: 1, name: "Bernoulli", budget: Duration::from_secs(1), run: bernoulli_suite, known_gap: None },
        Criterion { id: 2, name: "adjointness", budget: Duration::from_secs(5), run: adjointness_suite, known_gap: None },
        Criterion { id: 3, name: "symplectomorphism", budget: Duration::from_secs(10), run: symplectic_suite, known_gap: None },
        Criterion { id: 4, name: "Euler γ-factor", budget: Duration::from_secs(5), run: euler_suite, known_gap: None },
        Criterion {
            id: 5,
            name: "quintic",
            budget: Duration::from_secs(30),
            run: quintic_suite,
            known_gap: Some(quintic_mirror_map_claim),
        },
        Criterion { id: 6, name: "quantization", budget: Duration::from_secs(10), run: quantization_suite, known_gap: None },
        Criterion { id: 7, name: "universal equations", budget: Duration::from_secs(10), run: universal_suite, known_gap: None },
        Criterion { id: 8, name: "Serre duality", budget: Duration::from_secs(15), run: serre_suite, known_gap: None },
        Criterion { id: 9, name: "negative controls", budget: Duration::from_secs(5), run: negative_suite, known_gap: None },
    ];
    let mut hard_failures = 0;
    for c in &criteria {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + c.id as u64);
        let start = Instant::now();
        let mut outcome = (c.run)(&mut rng);
        let elapsed = start.elapsed();
        if outcome.is_ok() && elapsed > c.budget {
            outcome = Err(format!("over budget ({:?} > {:?})", elapsed, c.budget));
        }
        let gap = c.known_gap.map(|g| g());
        let ms = elapsed.as_millis();
        match (&outcome, &gap) {
            (Ok(note), None | Some(Ok(_))) => println!("PASS  {} {} ({ms} ms): {note}", c.id, c.name),
            (Ok(note), Some(Err(why))) => {
                println!("FAIL  {} {} ({ms} ms): {note}; unattainable sub-claim: {why}", c.id, c.name)
            }
            (Err(why), _) => {
                hard_failures += 1;
                println!("FAIL  {} {} ({ms} ms): {why}", c.id, c.name);
            }
        }
    }
    if hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
