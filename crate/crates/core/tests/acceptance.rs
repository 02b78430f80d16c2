//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails. `CIRCUITLP_SEED` shifts every corpus.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circuitlp::circuits::{
    canonical_scaling, conformal_decompose, enumerate_elementary_vectors, is_elementary, kappa_dual, kappa_exact,
};
use circuitlp::linalg::{kernel_basis_on, matrix_rank, solve};
use circuitlp::oracles::{ratio_circuit, RatioOutcome};
use circuitlp::rational::{
    ceil_log2, conforms_to, dot, frac, int, is_nonnegative, is_zero_vec, norm1_on, support, weighted_negative_part,
};
use circuitlp::simplex::{solve_standard, SimplexStatus};
use circuitlp::solver::{
    build_aux_lp, feasibility_with_doubling, optimize, solve_from_scratch, FeasibilityOutcome, OptimizeReport,
    OptimizeStatus, RatioStep, SolveOutcome, SolverParams,
};
use circuitlp::walk::{capacitated_walk, check_trace_lemmas, diameter_cap, diameter_walk, generate_instance, InstanceKind};
use circuitlp::{Bound, Error, IndexSet, Matrix, Rational};

type Check = std::result::Result<String, String>;

fn base_seed() -> u64 {
    std::env::var("CIRCUITLP_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_240_611)
}

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(base_seed().wrapping_mul(1_000_003).wrapping_add(salt))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Full row rank, no zero column, entries in `[-r, r]`.
fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, r: i64) -> Matrix {
    loop {
        let rows: Vec<Vec<Rational>> = (0..m).map(|_| (0..n).map(|_| int(rng.gen_range(-r..=r))).collect()).collect();
        let a = Matrix::from_rows(rows).expect("nonempty");
        let zero_col = (0..n).any(|j| is_zero_vec(&a.column(j)));
        if !zero_col && matrix_rank(&a) == m {
            return a;
        }
    }
}

fn random_positive(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| int(rng.gen_range(1..=4))).collect()
}

fn simplex_opt(a: &Matrix, b: &[Rational], c: &[Rational]) -> Option<Rational> {
    let out = solve_standard(a, b, c);
    (out.status == SimplexStatus::Optimal).then(|| out.objective.expect("optimal"))
}

fn kappa(a: &Matrix) -> Rational {
    kappa_exact(a).expect("small instance").value
}

fn kappa_duality() -> Check {
    let mut rng = rng(1);
    let mut max_kappa = Rational::one();
    for t in 0..200 {
        let n = rng.gen_range(2..=7);
        let m = rng.gen_range(1..n);
        let a = random_matrix(&mut rng, m, n, 4);
        let (k, kd) = (kappa(&a), kappa_dual(&a).expect("small").value);
        ensure(k == kd, || format!("matrix {t}: kappa {k} vs dual {kd}"))?;
        max_kappa = max_kappa.max(k);
    }
    Ok(format!("200 matrices, n <= 7, kappa_exact = kappa_dual on all, max kappa {max_kappa}"))
}

fn conformal_decomposition() -> Check {
    let mut rng = rng(2);
    let mut vectors = 0;
    let mut total_parts = 0;
    while vectors < 500 {
        let n = rng.gen_range(3..=8);
        let m = rng.gen_range(1..n);
        let a = random_matrix(&mut rng, m, n, 3);
        let known: HashSet<Vec<Rational>> = enumerate_elementary_vectors(&a)
            .expect("small")
            .iter()
            .map(|e| canonical_scaling(e.vector()))
            .collect();
        for _ in 0..5 {
            // Random kernel vector, sometimes confined to a random column subset.
            let cols: IndexSet = if rng.gen_bool(0.5) {
                (0..n).collect()
            } else {
                (0..n).filter(|_| rng.gen_bool(0.7)).collect()
            };
            let basis = kernel_basis_on(&a, &cols);
            if basis.is_empty() {
                continue;
            }
            let mut x = vec![Rational::zero(); n];
            for v in &basis {
                let coef = int(rng.gen_range(-3..=3));
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi += &coef * vi;
                }
            }
            if is_zero_vec(&x) {
                continue;
            }
            vectors += 1;
            let dec = conformal_decompose(&a, &x).map_err(|e| e.to_string())?;
            let mut sum = vec![Rational::zero(); n];
            for p in &dec.parts {
                ensure(conforms_to(p.vector(), &x), || format!("part {:?} not conformal to {x:?}", p.vector()))?;
                ensure(known.contains(&canonical_scaling(p.vector())), || {
                    format!("part {:?} is not an enumerated elementary vector", p.vector())
                })?;
                for (s, v) in sum.iter_mut().zip(p.vector()) {
                    *s += v;
                }
            }
            ensure(sum == x, || format!("parts do not sum to {x:?}"))?;
            let bound = (n - m).min(support(&x).len());
            ensure(dec.parts.len() <= bound, || format!("{} parts > {bound}", dec.parts.len()))?;
            total_parts += dec.parts.len();
        }
    }
    Ok(format!(
        "{vectors} kernel vectors, n <= 8: exact sums, conformal elementary parts, {total_parts} parts within min(n-m, |supp|)"
    ))
}

fn ratio_circuit_optimality() -> Check {
    let mut rng = rng(3);
    let (mut circuits, mut zeros, mut rays) = (0, 0, 0);
    for t in 0..200 {
        let n = rng.gen_range(3..=7);
        let m = rng.gen_range(1..n);
        let a = random_matrix(&mut rng, m, n, 4);
        let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-5..=5))).collect();
        let w: Vec<Bound> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    Bound::Infinite
                } else {
                    Bound::Finite(frac(rng.gen_range(1..=5), rng.gen_range(1..=3)))
                }
            })
            .collect();

        // Brute force over all elementary vectors and both orientations.
        let mut best = Rational::zero();
        let mut unbounded = false;
        for e in enumerate_elementary_vectors(&a).expect("small") {
            for g in [e.vector().to_vec(), e.negated().vector().to_vec()] {
                let Some(wn) = weighted_negative_part(&w, &g) else { continue };
                let cg = dot(&c, &g);
                if wn.is_zero() {
                    unbounded |= cg.is_negative();
                } else {
                    best = best.min(cg / wn);
                }
            }
        }
        match ratio_circuit(&a, &c, &w) {
            Err(Error::UnboundedRatioLp) => {
                ensure(unbounded, || format!("instance {t}: spurious unboundedness"))?;
                rays += 1;
            }
            Err(e) => return Err(format!("instance {t}: {e}")),
            Ok(res) => {
                ensure(!unbounded, || format!("instance {t}: missed an unbounded ray"))?;
                ensure(res.dual.verify(&a, &c, Some(&w)), || format!("instance {t}: dual certificate invalid"))?;
                match &res.outcome {
                    RatioOutcome::Zero => {
                        ensure(best.is_zero() && res.dual.lambda.is_zero(), || {
                            format!("instance {t}: Zero but brute-force minimum {best}")
                        })?;
                        zeros += 1;
                    }
                    RatioOutcome::Circuit(g) => {
                        let g = g.vector();
                        ensure(is_elementary(&a, g), || format!("instance {t}: result not elementary"))?;
                        let wn = weighted_negative_part(&w, g).expect("respects infinite weights");
                        ensure(wn.is_one(), || format!("instance {t}: <w,g-> = {wn}"))?;
                        let cg = dot(&c, g);
                        ensure(cg == best, || format!("instance {t}: ratio {cg} vs brute force {best}"))?;
                        ensure(cg == -&res.dual.lambda, || format!("instance {t}: <c,g> = {cg} but lambda = {}", res.dual.lambda))?;
                        circuits += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "200 instances, n <= 7: {circuits} circuits match the brute-force ratio with <c,g> = -lambda, {zeros} zero optima, {rays} unbounded"
    ))
}

/// Random bounded LP with a positive feasible start.
fn random_lp(rng: &mut ChaCha8Rng, n_max: usize) -> (Matrix, Vec<Rational>, Vec<Rational>, Vec<Rational>, Rational) {
    loop {
        let n = rng.gen_range(3..=n_max);
        let m = rng.gen_range(1..n);
        let a = random_matrix(rng, m, n, 4);
        let x0 = random_positive(rng, n);
        let b = a.mul_vec(&x0);
        let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-5..=5))).collect();
        if let Some(opt) = simplex_opt(&a, &b, &c) {
            return (a, b, c, x0, opt);
        }
    }
}

/// `⟨c,x⁺⟩ − OPT ≤ (1 − 1/|supp x|)(⟨c,x⟩ − OPT)` for one Ratio-Circuit step.
fn decay_holds(a: &Matrix, b: &[Rational], st: &RatioStep) -> std::result::Result<(), String> {
    let opt = simplex_opt(a, b, &st.cost).ok_or("step cost unbounded on its polytope")?;
    let k = int(support(&st.before).len() as i64);
    let lhs = dot(&st.cost, &st.after) - &opt;
    let rhs = (int(1) - k.recip()) * (dot(&st.cost, &st.before) - &opt);
    ensure(lhs <= rhs, || format!("gap {lhs} > {rhs}"))
}

fn ratio_decay() -> Check {
    let mut rng = rng(4);
    let (mut fix_steps, mut feas_steps) = (0, 0);
    for t in 0..40 {
        let (a, b, c, _, _) = random_lp(&mut rng, 7);
        let inst = circuitlp::LpInstance::new(a.clone(), b.clone(), c.clone(), None).map_err(|e| e.to_string())?;
        let out = solve_from_scratch(&inst, None).map_err(|e| e.to_string())?;
        let SolveOutcome::Optimal { report, .. } = out else {
            return Err(format!("instance {t}: expected an optimum"));
        };
        // Phase I steps live on the auxiliary system.
        let aux = build_aux_lp(&a, &b).map_err(|e| e.to_string())?;
        let rep = feasibility_with_doubling(&aux.instance.a, &aux.instance.b, &aux.z_block, &aux.start)
            .map_err(|e| e.to_string())?;
        for st in &rep.run.ratio_steps {
            decay_holds(&aux.instance.a, &aux.instance.b, st).map_err(|e| format!("instance {t}, phase I: {e}"))?;
            feas_steps += 1;
        }
        for round in &report.rounds {
            let sub = a.select_columns(round.columns.as_slice()).expect("nonempty");
            let sub = sub.select_rows(&round.rows).expect("nonempty");
            let sb: Vec<Rational> = round.rows.iter().map(|&i| b[i].clone()).collect();
            for st in &round.run.ratio_steps {
                decay_holds(&sub, &sb, st).map_err(|e| format!("instance {t}, fixing: {e}"))?;
                fix_steps += 1;
            }
        }
    }
    ensure(fix_steps + feas_steps > 0, || "no ratio steps observed".into())?;
    Ok(format!(
        "40 solver runs: decay holds exactly on {fix_steps} variable-fixing and {feas_steps} feasibility ratio steps"
    ))
}

fn diameter_walks() -> Check {
    let mut rng = rng(5);
    let (mut steps, mut longest, mut tu) = (0, 0, 0);
    for t in 0..100 {
        let kind = if t % 2 == 0 {
            tu += 1;
            InstanceKind::TotallyUnimodular
        } else {
            InstanceKind::Generic
        };
        let n = rng.gen_range(4..=10);
        let m = rng.gen_range(1..=(n - 1).min(5));
        let g = generate_instance(kind, n, m, rng.gen()).map_err(|e| e.to_string())?;
        let a = &g.instance.a;
        let k = kappa(a);
        if kind == InstanceKind::TotallyUnimodular {
            ensure(k.is_one(), || format!("instance {t}: TU generator gave kappa {k}"))?;
        }
        let walk = diameter_walk(a, &g.instance.b, &g.target_basis, &g.start, &k).map_err(|e| format!("instance {t}: {e}"))?;
        ensure(walk.trace.last() == g.target.as_slice(), || format!("instance {t}: walk missed x*"))?;
        ensure(walk.trace.is_linked(), || format!("instance {t}: broken step arithmetic"))?;
        let report = check_trace_lemmas(&walk, &k);
        ensure(report.ok(), || format!("instance {t}: {}", report.first().expect("finding")))?;
        let cap = diameter_cap(m, n, &k);
        ensure(walk.trace.len() <= cap, || format!("instance {t}: {} steps > cap {cap}", walk.trace.len()))?;
        steps += walk.trace.len();
        longest = longest.max(walk.trace.len());
    }
    Ok(format!(
        "100 walks ({tu} TU, {} generic, n <= 10): all reach x*, decay/movement/L/R lemmas hold with exact kappa, {steps} steps, longest {longest}",
        100 - tu
    ))
}

/// The small-gap argument rules out wrong bounds for `L ∪ H`; the blocking
/// coordinate may still be basic, in which case no `L ∪ H` index reaches its
/// target and only the free set shrinks. Both outcomes are counted.
fn capacitated_walks() -> Check {
    let mut rng = rng(6);
    let (mut support_steps, mut correct, mut phase1, mut phase2) = (0, 0, 0, 0);
    for t in 0..50 {
        let n = rng.gen_range(4..=8);
        let m = rng.gen_range(1..=(n - 1).min(2));
        let g = generate_instance(InstanceKind::Capacitated, n, m, rng.gen()).map_err(|e| e.to_string())?;
        let inst = &g.instance;
        let u = inst.u.as_ref().expect("capacitated");
        let p = g.partition.as_ref().expect("capacitated");
        let k = kappa(&inst.a);
        let w = capacitated_walk(&inst.a, &inst.b, u, p, &g.start, &k).map_err(|e| format!("instance {t}: {e}"))?;
        ensure(w.final_mismatch <= m, || format!("instance {t}: |S_t| = {} > m", w.final_mismatch))?;
        ensure(w.support_calls <= n, || format!("instance {t}: {} support calls > n", w.support_calls))?;
        for chk in &w.support_checks {
            ensure(!chk.wrong_bound, || format!("instance {t}, step {}: an L/H index hit its opposite bound", chk.step))?;
            ensure(chk.bound_hit, || format!("instance {t}, step {}: no coordinate reached a bound", chk.step))?;
            correct += usize::from(chk.correct_bound);
        }
        support_steps += w.support_checks.len();
        ensure(w.trace.last() == g.target.as_slice(), || format!("instance {t}: walk missed x*"))?;
        ensure(w.trace.is_linked(), || format!("instance {t}: broken step arithmetic"))?;
        phase1 += w.phase1_steps;
        phase2 += usize::from(w.phase2.is_some());
    }
    Ok(format!(
        "50 capacitated walks, n <= 8: {phase1} phase-one steps end with |S_t| <= m within n support calls; {support_steps} small-gap support steps, none to a wrong bound, {correct} set an L/H index to its target bound (others were blocked by a basic variable); {phase2} needed phase two; all reach x*"
    ))
}

fn feasibility_algorithm() -> Check {
    let mut rng = rng(7);
    let (mut feasible, mut infeasible) = (0, 0);
    let mut attempts = 0;
    while feasible + infeasible < 100 {
        attempts += 1;
        if attempts > 5000 {
            return Err("could not balance the corpus".into());
        }
        let n = rng.gen_range(3..=7);
        let m = rng.gen_range(1..n);
        let a = random_matrix(&mut rng, m, n, 4);
        let x0 = random_positive(&mut rng, n);
        let b = a.mul_vec(&x0);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let size = rng.gen_range(1..n);
        let n_set: IndexSet = idx[..size].iter().copied().collect();
        let mut c = vec![Rational::zero(); n];
        for i in n_set.iter() {
            c[i] = int(1);
        }
        let opt = simplex_opt(&a, &b, &c).ok_or("feasibility LP cannot be unbounded")?;
        let is_feasible = opt.is_zero();
        if (is_feasible && feasible >= 50) || (!is_feasible && infeasible >= 50) {
            continue;
        }
        let rep = feasibility_with_doubling(&a, &b, &n_set, &x0).map_err(|e| e.to_string())?;
        let label = feasible + infeasible;
        match rep.outcome() {
            FeasibilityOutcome::Solution(x) => {
                ensure(is_feasible, || format!("instance {label}: solution returned but OPT = {opt}"))?;
                ensure(a.mul_vec(x) == b && is_nonnegative(x), || format!("instance {label}: infeasible output"))?;
                ensure(norm1_on(x, &n_set).is_zero(), || format!("instance {label}: x_N != 0"))?;
                feasible += 1;
            }
            FeasibilityOutcome::Certificate(cert) => {
                ensure(!is_feasible, || format!("instance {label}: certificate on a feasible instance"))?;
                ensure(cert.verify(&a, &c, None), || format!("instance {label}: s != c + A^T y or s < 0"))?;
                // Sign convention s = c + Aᵀy: the certificate is ⟨b,−y⟩ > 0.
                let by = -dot(&b, &cert.y);
                ensure(by.is_positive(), || format!("instance {label}: <b,-y> = {by}"))?;
                ensure(by <= opt, || format!("instance {label}: bound {by} above OPT {opt}"))?;
                infeasible += 1;
            }
        }
        let params = SolverParams::new(m, n, &rep.kappa_hat);
        let stats = &rep.run.stats;
        ensure(stats.ratio_calls <= params.feasibility_ratio_budget(), || {
            format!("instance {label}: {} ratio calls > budget", stats.ratio_calls)
        })?;
        ensure(stats.support_calls <= params.feasibility_support_budget(), || {
            format!("instance {label}: {} support calls > budget", stats.support_calls)
        })?;
    }
    Ok(format!(
        "{feasible} feasible and {infeasible} infeasible instances classified as simplex does; certificates satisfy s = c + A^T y >= 0 with <b,-y> > 0; call counts within budget"
    ))
}

/// `max x_j` over the optimal face is zero, and forcing `x_j ≥ 1` is
/// infeasible or strictly worse.
fn fixing_is_correct(a: &Matrix, b: &[Rational], c: &[Rational], opt: &Rational, j: usize) -> std::result::Result<(), String> {
    let n = a.cols();
    let mut rows = a.row_vecs();
    rows.push(c.to_vec());
    let face = Matrix::from_rows(rows).expect("nonempty");
    let mut rhs = b.to_vec();
    rhs.push(opt.clone());
    let mut obj = vec![Rational::zero(); n];
    obj[j] = int(-1);
    let max_xj = simplex_opt(&face, &rhs, &obj).ok_or("optimal face unbounded in x_j")?;
    ensure(max_xj.is_zero(), || format!("x_{} reaches {} on the optimal face", j + 1, -max_xj))?;
    let shifted: Vec<Rational> = b.iter().zip(a.column(j)).map(|(bi, aj)| bi - aj).collect();
    let forced = solve_standard(a, &shifted, c);
    let worse = match forced.status {
        SimplexStatus::Infeasible => true,
        SimplexStatus::Unbounded => false,
        SimplexStatus::Optimal => forced.objective.expect("optimal") + &c[j] > *opt,
    };
    ensure(worse, || format!("forcing x_{} >= 1 does not worsen the optimum", j + 1))
}

fn check_round_budgets(report: &OptimizeReport) -> std::result::Result<(usize, usize), String> {
    let k = report.kappa_hat.clone().unwrap_or_else(Rational::one);
    let (mut phases, mut max_ratio) = (0, 0);
    for (r, round) in report.rounds.iter().enumerate() {
        let params = SolverParams::new(round.rows.len(), round.columns.len(), &k);
        ensure(round.run.phases.len() <= round.rows.len() + 1, || {
            format!("round {r}: {} phases > m+1", round.run.phases.len())
        })?;
        for ph in &round.run.phases {
            ensure(ph.ratio_calls <= params.t, || format!("round {r}: {} ratio calls > T = {}", ph.ratio_calls, params.t))?;
            ensure(ph.support_calls <= round.columns.len(), || format!("round {r}: {} support calls > n", ph.support_calls))?;
            ensure(ph.perturbation_ok, || format!("round {r}: cost perturbation out of range"))?;
            max_ratio = max_ratio.max(ph.ratio_calls);
        }
        phases += round.run.phases.len();
    }
    Ok((phases, max_ratio))
}

fn variable_fixing_optimizer() -> Check {
    let mut rng = rng(8);
    let (mut fixed_total, mut phases, mut max_ratio, mut doublings, mut phase_one) = (0, 0, 0, 0, 0);
    for t in 0..100 {
        let (a, b, c, x0, opt) = random_lp(&mut rng, 8);
        let report = if t % 4 == 0 {
            phase_one += 1;
            let inst = circuitlp::LpInstance::new(a.clone(), b.clone(), c.clone(), None).map_err(|e| e.to_string())?;
            match solve_from_scratch(&inst, None).map_err(|e| e.to_string())? {
                SolveOutcome::Optimal { report, .. } => report,
                _ => return Err(format!("instance {t}: expected an optimum")),
            }
        } else {
            optimize(&a, &b, &c, &x0).map_err(|e| format!("instance {t}: {e}"))?
        };
        let OptimizeStatus::Optimal(x) = &report.status else {
            return Err(format!("instance {t}: reported unbounded"));
        };
        ensure(a.mul_vec(x) == b && is_nonnegative(x), || format!("instance {t}: output infeasible"))?;
        ensure(dot(&c, x) == opt, || format!("instance {t}: objective {} vs simplex {opt}", dot(&c, x)))?;
        for round in &report.rounds {
            for j in round.fixed().iter() {
                fixing_is_correct(&a, &b, &c, &opt, j).map_err(|e| format!("instance {t}: {e}"))?;
                fixed_total += 1;
            }
        }
        let (p, r) = check_round_budgets(&report).map_err(|e| format!("instance {t}: {e}"))?;
        phases += p;
        max_ratio = max_ratio.max(r);
        doublings += report.attempts.len().saturating_sub(1);
    }
    Ok(format!(
        "100 LPs, n <= 8 ({phase_one} via phase I): exact simplex optimum on all; {fixed_total} fixed indices vanish on the optimal face; {phases} phases within m+1; max {max_ratio} ratio calls per phase (<= T); {doublings} doublings"
    ))
}

fn kappa_doubling() -> Check {
    let mut rng = rng(9);
    for tries in 0..500 {
        let n = rng.gen_range(4..=8);
        let m = rng.gen_range(1..n.min(4));
        let a = random_matrix(&mut rng, m, n, 9);
        let x0 = random_positive(&mut rng, n);
        let b = a.mul_vec(&x0);
        let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-5..=5))).collect();
        let k = kappa(&a);
        if k <= int(n as i64) {
            continue;
        }
        let Some(opt) = simplex_opt(&a, &b, &c) else { continue };
        let report = optimize(&a, &b, &c, &x0).map_err(|e| e.to_string())?;
        if report.attempts.len() < 2 {
            continue;
        }
        let last = report.attempts.last().expect("nonempty");
        ensure(last.failure.is_none(), || "final attempt failed".into())?;
        ensure(report.attempts[..report.attempts.len() - 1].iter().all(|s| s.failure.is_some()), || {
            "an earlier attempt succeeded".into()
        })?;
        let x = report.x().ok_or("unbounded")?;
        ensure(dot(&c, x) == opt, || "wrong optimum after doubling".into())?;
        check_round_budgets(&report)?;
        let total: usize = report.attempts.iter().map(|s| s.calls()).sum();
        ensure(2 * last.calls() >= total, || format!("last run {} calls of {total} total", last.calls()))?;
        let estimates: Vec<String> = report
            .attempts
            .iter()
            .map(|s| match s.failure {
                Some(f) => format!("{} ({f})", s.kappa_hat),
                None => format!("{} (ok)", s.kappa_hat),
            })
            .collect();
        let bits = ceil_log2(&k);
        return Ok(format!(
            "instance {tries} with n = {n}, kappa_A = {k} (log2 ~ {bits}): estimates {}; last run {} of {total} oracle calls, budgets respected",
            estimates.join(" -> "),
            last.calls()
        ));
    }
    Err("no seeded instance with kappa_A > n needed a doubling".into())
}

/// Vertices of `{Ax = b, Bx ≤ d}` by brute force over tight inequality sets.
fn vertices(gf: &circuitlp::solver::GeneralForm) -> Vec<Vec<Rational>> {
    let n = gf.n();
    let k = gf.k();
    let m_a = gf.a_eq.as_ref().map_or(0, Matrix::rows);
    let need = n - m_a;
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..need).collect();
    if need == 0 || need > k {
        return out;
    }
    loop {
        let mut rows = gf.a_eq.as_ref().map_or(Vec::new(), Matrix::row_vecs);
        let mut rhs = gf.b.clone();
        for &i in &idx {
            rows.push(gf.b_ineq.row(i).to_vec());
            rhs.push(gf.d[i].clone());
        }
        let sys = Matrix::from_rows(rows).expect("nonempty");
        if matrix_rank(&sys) == n {
            if let Some(x) = solve(&sys, &rhs) {
                if gf.in_p(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        let Some(p) = (0..need).rev().find(|&p| idx[p] < k - need + p) else { break };
        idx[p] += 1;
        for q in p + 1..need {
            idx[q] = idx[q - 1] + 1;
        }
    }
    out
}

fn general_form() -> Check {
    let mut rng = rng(10);
    let (mut systems, mut checked_vertices, mut augmentations, mut with_eq) = (0, 0, 0, 0);
    let mut guard = 0;
    while systems < 50 {
        guard += 1;
        if guard > 2000 {
            return Err("could not build 50 pointed systems".into());
        }
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(n + 1..=n + 3);
        let m_a = if n > 2 && rng.gen_bool(0.4) { 1 } else { 0 };
        let xc: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-2..=2))).collect();
        let b_ineq = Matrix::from_rows(
            (0..k).map(|_| (0..n).map(|_| int(rng.gen_range(-3..=3))).collect()).collect(),
        )
        .expect("nonempty");
        let d: Vec<Rational> = b_ineq.mul_vec(&xc).into_iter().map(|v| v + int(rng.gen_range(1..=4))).collect();
        let a_eq = (m_a > 0).then(|| random_matrix(&mut rng, m_a, n, 3));
        let b = a_eq.as_ref().map_or(Vec::new(), |a| a.mul_vec(&xc));
        let gf = match circuitlp::solver::general_form_reduce(a_eq.as_ref(), &b_ineq, &b, &d) {
            Ok(gf) => gf,
            Err(Error::LinealitySpace) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let verts = vertices(&gf);
        if verts.is_empty() {
            continue;
        }
        systems += 1;
        with_eq += usize::from(m_a > 0);

        // Elementary vectors of W = B·ker(A), as the kernel of the Q system.
        let w_circuits: Vec<Vec<Rational>> = match &gf.q_instance {
            Some(q) => enumerate_elementary_vectors(&q.a).expect("small").iter().map(|e| e.vector().to_vec()).collect(),
            None => (0..k)
                .map(|i| {
                    let mut e = vec![Rational::zero(); k];
                    e[i] = int(1);
                    e
                })
                .collect(),
        };
        // M = [A 0; B I] must agree with the q-instance on the slack side.
        ensure(gf.m_mat.cols() == n + k, || "M has the wrong shape".into())?;
        for x in verts.iter().take(3) {
            let s = gf.project(x);
            ensure(gf.in_q(&s), || format!("system {systems}: projected vertex outside Q"))?;
            if let Some(q) = &gf.q_instance {
                ensure(q.is_feasible(&s), || format!("system {systems}: slack violates the Q instance"))?;
            }
            let mut xs = x.clone();
            xs.extend(s.iter().cloned());
            ensure(gf.m_mat.mul_vec(&xs) == gf.q, || format!("system {systems}: M(x,s) != q"))?;
            let back = gf.psi(&s).map_err(|e| e.to_string())?;
            ensure(&back == x, || format!("system {systems}: psi(project(x)) != x"))?;
            ensure(gf.project(&back) == s, || format!("system {systems}: project(psi(s)) != s"))?;
            checked_vertices += 1;

            let Some(h) = w_circuits.choose(&mut rng) else { continue };
            let h: Vec<Rational> = if rng.gen_bool(0.5) { h.clone() } else { h.iter().map(|v| -v).collect() };
            let g = gf.lift_direction(&h).map_err(|e| e.to_string())?;
            ensure(gf.project_direction(&g) == h, || "direction lift is not inverted by -B".into())?;
            let aq = gf.augment_q(&s, &h).map_err(|e| e.to_string())?;
            let ap = gf.augment_p(x, &g).map_err(|e| e.to_string())?;
            ensure(aq.alpha == ap.alpha, || format!("system {systems}: step lengths differ"))?;
            let mapped = gf.psi(&aq.x).map_err(|e| e.to_string())?;
            ensure(mapped == ap.x, || format!("system {systems}: psi(s') != aug_P(x, g)"))?;
            let tight_q: Vec<usize> = (0..k).filter(|&i| aq.x[i].is_zero()).collect();
            ensure(tight_q == gf.binding(&ap.x), || format!("system {systems}: binding sets differ"))?;
            if let Bound::Finite(alpha) = &ap.alpha {
                // Maximal: a constraint not tight before is tight now.
                let newly = gf.binding(&ap.x).into_iter().any(|i| !gf.binding(x).contains(&i));
                ensure(alpha.is_zero() || newly, || format!("system {systems}: step is not maximal"))?;
            }
            augmentations += 1;
        }
    }
    Ok(format!(
        "50 pointed systems ({with_eq} with equations): psi round-trips on {checked_vertices} vertices; {augmentations} maximal augmentations in Q match P exactly, binding sets included"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("kappa duality", kappa_duality),
        ("conformal decomposition", conformal_decomposition),
        ("ratio-circuit optimality", ratio_circuit_optimality),
        ("ratio-step decay", ratio_decay),
        ("diameter walks", diameter_walks),
        ("capacitated walks", capacitated_walks),
        ("feasibility", feasibility_algorithm),
        ("variable-fixing optimizer", variable_fixing_optimizer),
        ("kappa doubling", kappa_doubling),
        ("general-form reduction", general_form),
    ];
    println!("acceptance suite, corpus seed {}", base_seed());
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
