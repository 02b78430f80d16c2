//! Browser bindings. Each exported function takes plain numbers or text and
//! returns a JSON string, so the same code is exercised by native tests.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use circuitlp::circuits::kappa_exact;
use circuitlp::io::parse_instance;
use circuitlp::rational::{dot, norm1, norm1_on, sub, to_f64, Rational};
use circuitlp::solver::{solve_from_scratch, SolveOutcome};
use circuitlp::walk::{capacitated_walk, diameter_walk, generate_instance, InstanceKind, WalkTrace};
use circuitlp::Error;

type Potential = Box<dyn Fn(&[Rational]) -> Rational>;

/// Instances above this size make exact enumeration too slow for a page.
const MAX_N: usize = 12;

#[derive(Serialize)]
struct Point {
    step: usize,
    oracle: String,
    alpha: String,
    value: String,
    value_f64: f64,
}

#[derive(Serialize)]
struct WalkView {
    n: usize,
    m: usize,
    kappa: String,
    potential: &'static str,
    cap: usize,
    start: Vec<String>,
    target: Vec<String>,
    /// Potential after each step: `‖x_N‖₁` with N the target's nonbasic
    /// columns, or `‖x − x*‖₁` for capacitated walks.
    points: Vec<Point>,
}

#[derive(Serialize)]
struct DecayView {
    n: usize,
    m: usize,
    status: String,
    objective: Option<String>,
    kappa_hat: Option<String>,
    attempts: usize,
    /// `⟨c,x⟩ − OPT` after each augmentation of the optimization phase.
    points: Vec<Point>,
}

#[derive(Serialize)]
struct KappaView {
    n: usize,
    m: usize,
    kappa: String,
    kappa_f64: f64,
}

fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn check_size(n: usize, m: usize) -> Result<(), Error> {
    if n > MAX_N {
        return Err(Error::InvalidInput(format!("n is limited to {MAX_N} in the demo")));
    }
    if m == 0 || m >= n {
        return Err(Error::InvalidInput("need 1 <= m < n".into()));
    }
    Ok(())
}

fn to_json<T: Serialize>(r: Result<T, Error>) -> Result<String, String> {
    r.map(|v| serde_json::to_string(&v).expect("views serialize"))
        .map_err(|e| e.to_string())
}

/// Generates an instance of `kind` (`tu`, `generic` or `cap`) and walks
/// from its start vertex to its target vertex.
pub fn walk_json(kind: &str, n: usize, m: usize, seed: u64) -> Result<String, String> {
    let kind: InstanceKind = kind.parse().map_err(|e: Error| e.to_string())?;
    to_json((|| {
        check_size(n, m)?;
        let g = generate_instance(kind, n, m, seed)?;
        let inst = &g.instance;
        let k = kappa_exact(&inst.a)?.value;
        // Capacitated instances walk in the box; the potential there is the
        // distance to the target since `x_N` need not vanish at the end.
        let (trace, potential): (WalkTrace, Potential) = match (&g.partition, &inst.u) {
            (Some(part), Some(u)) => {
                let w = capacitated_walk(&inst.a, &inst.b, u, part, &g.start, &k)?;
                let target = w.trace.target.clone();
                (w.trace, Box::new(move |x| norm1(&sub(x, &target))))
            }
            _ => {
                let w = diameter_walk(&inst.a, &inst.b, &g.target_basis, &g.start, &k)?;
                let nonbasic = w.nonbasic.clone();
                (w.trace, Box::new(move |x| norm1_on(x, &nonbasic)))
            }
        };
        let v0 = potential(&g.start);
        let mut points = vec![Point {
            step: 0,
            oracle: "start".into(),
            alpha: "0".into(),
            value_f64: to_f64(&v0),
            value: v0.to_string(),
        }];
        for (t, st) in trace.steps.iter().enumerate() {
            let v = potential(&st.iterate_after);
            points.push(Point {
                step: t + 1,
                oracle: st.oracle.to_string(),
                alpha: st.alpha.to_string(),
                value: v.to_string(),
                value_f64: to_f64(&v),
            });
        }
        Ok(WalkView {
            n,
            m,
            kappa: k.to_string(),
            potential: if g.partition.is_some() { "|x - x*|" } else { "|x_N|" },
            cap: trace.cap,
            start: strs(&g.start),
            target: strs(&trace.target),
            points,
        })
    })())
}

/// Solves a random box-constrained instance and reports the optimality gap
/// after every augmentation. The box keeps every instance bounded; the
/// solver sees it as `n` extra slack columns and rows.
pub fn decay_json(n: usize, m: usize, seed: u64) -> Result<String, String> {
    to_json((|| {
        check_size(n, m)?;
        let g = generate_instance(InstanceKind::Capacitated, n, m, seed)?;
        let std = g.instance.to_standard_form();
        let inst = &std;
        let start = g.instance.with_slacks(&g.start);
        let out = solve_from_scratch(inst, Some(&start))?;
        let view = match out {
            SolveOutcome::Optimal { objective, report, .. } => {
                let mut points = Vec::new();
                let first = Point {
                    step: 0,
                    oracle: "start".into(),
                    alpha: "0".into(),
                    value: (inst.objective(&start) - &objective).to_string(),
                    value_f64: to_f64(&(inst.objective(&start) - &objective)),
                };
                points.push(first);
                for (t, st) in report.steps.iter().enumerate() {
                    let gap = dot(&inst.c, &st.x_after) - &objective;
                    points.push(Point {
                        step: t + 1,
                        oracle: st.oracle.to_string(),
                        alpha: st.alpha.to_string(),
                        value: gap.to_string(),
                        value_f64: to_f64(&gap),
                    });
                }
                DecayView {
                    n,
                    m,
                    status: "optimal".into(),
                    objective: Some(objective.to_string()),
                    kappa_hat: report.kappa_hat.as_ref().map(ToString::to_string),
                    attempts: report.attempts.len(),
                    points,
                }
            }
            SolveOutcome::Unbounded { report } => DecayView {
                n,
                m,
                status: "unbounded".into(),
                objective: None,
                kappa_hat: report.kappa_hat.as_ref().map(ToString::to_string),
                attempts: report.attempts.len(),
                points: Vec::new(),
            },
            SolveOutcome::Infeasible { .. } => DecayView {
                n,
                m,
                status: "infeasible".into(),
                objective: None,
                kappa_hat: None,
                attempts: 0,
                points: Vec::new(),
            },
        };
        Ok(view)
    })())
}

/// Circuit imbalance of an instance in the text format.
pub fn kappa_json(text: &str) -> Result<String, String> {
    to_json((|| {
        let inst = parse_instance(text)?.standard()?;
        let k = kappa_exact(&inst.a)?.value;
        Ok(KappaView {
            n: inst.n(),
            m: inst.m(),
            kappa_f64: to_f64(&k),
            kappa: k.to_string(),
        })
    })())
}

#[wasm_bindgen]
pub fn walk(kind: &str, n: usize, m: usize, seed: u32) -> Result<String, JsValue> {
    walk_json(kind, n, m, seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn decay(n: usize, m: usize, seed: u32) -> Result<String, JsValue> {
    decay_json(n, m, seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn kappa(text: &str) -> Result<String, JsValue> {
    kappa_json(text).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn walk_ends_at_zero_potential() {
        let v: Value = serde_json::from_str(&walk_json("tu", 7, 3, 5).unwrap()).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.last().unwrap()["value"], "0");
        assert!(pts.len() - 1 <= v["cap"].as_u64().unwrap() as usize);
    }

    #[test]
    fn capacitated_walk_reaches_target() {
        for seed in 0..4 {
            let v: Value = serde_json::from_str(&walk_json("cap", 8, 3, seed).unwrap()).unwrap();
            assert_eq!(v["potential"], "|x - x*|");
            assert_eq!(v["points"].as_array().unwrap().last().unwrap()["value"], "0");
        }
    }

    #[test]
    fn decay_gap_reaches_zero() {
        for seed in 0..5 {
            let v: Value = serde_json::from_str(&decay_json(6, 2, seed).unwrap()).unwrap();
            assert_eq!(v["status"], "optimal", "seed {seed}");
            let pts = v["points"].as_array().unwrap();
            assert_eq!(pts.last().unwrap()["value"], "0", "seed {seed}");
            assert!(pts.iter().all(|p| p["value_f64"].as_f64().unwrap() >= 0.0));
        }
    }

    #[test]
    fn kappa_of_text() {
        let v: Value = serde_json::from_str(&kappa_json("n=3 m=1\nA: 1 2 0\nb: 2\nc: 0 0 0\n").unwrap()).unwrap();
        assert_eq!(v["kappa"], "2");
    }

    #[test]
    fn errors_are_messages() {
        assert!(walk_json("tu", 40, 3, 1).unwrap_err().contains("limited"));
        assert!(walk_json("spiral", 5, 2, 1).is_err());
        assert!(kappa_json("n=2").is_err());
    }
}
