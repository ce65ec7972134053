//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the lines always reach stdout.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;
use semilinear::complement::{complement, complement_traced, ResourceLimits};
use semilinear::diophantine::{minimal_norm_bound, minimal_solutions, DiophantineSystem};
use semilinear::json::{report_to_json, set_to_json, vector_to_json};
use semilinear::ops::{intersect, preimage, IntegerMatrix};
use semilinear::oracle::{
    box_points, brute_minimal_solutions, certify_operation, enumerate_box, equal_on_box,
    max_subdeterminant, BoundReport, OperationKind, Status, DEFAULT_PRECISION,
};
use semilinear::random::{random_matrix, random_set_in, random_system, rng, SetShape};
use semilinear::{NatVector, SemilinearSet};

const SEED: u64 = 20_241_018;
const INTERSECT_PAIRS: usize = 200;
const COMPLEMENTS: usize = 100;
const PREIMAGES: usize = 100;
const SYSTEMS: usize = 300;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Run {
    /// When false only the outputs are produced, for the determinism reruns.
    verify: bool,
    outcomes: Vec<Outcome>,
    reports: Vec<BoundReport>,
    /// Every produced set, solution list and report, one JSON value per line.
    log: String,
}

impl Run {
    fn emit(&mut self, v: serde_json::Value) {
        writeln!(self.log, "{v}").expect("string write");
    }

    fn certify(
        &mut self,
        kind: OperationKind,
        inputs: &[SemilinearSet],
        output: &SemilinearSet,
        h: Option<&IntegerMatrix>,
    ) {
        let r = certify_operation(kind, inputs, output, h, DEFAULT_PRECISION).expect("certify");
        self.emit(report_to_json(&r));
        self.reports.push(r);
    }
}

fn same_dim_pair(r: &mut impl Rng, shape: &SetShape) -> (SemilinearSet, SemilinearSet) {
    let dim = r.gen_range(1..=shape.max_dim);
    (random_set_in(r, dim, shape), random_set_in(r, dim, shape))
}

fn criterion_intersection(run: &mut Run) -> Outcome {
    let start = Instant::now();
    let shape = SetShape {
        max_dim: 2,
        max_components: 2,
        max_periods: 2,
        max_entry: 3,
    };
    let mut r = rng(SEED);
    let mut failures = 0;
    for _ in 0..INTERSECT_PAIRS {
        let (a, b) = same_dim_pair(&mut r, &shape);
        let out = intersect(&a, &b).expect("intersect");
        if run.verify {
            let got = enumerate_box(&out, 25);
            let ea = enumerate_box(&a, 25);
            let eb = enumerate_box(&b, 25);
            let want: BTreeSet<NatVector> = ea.intersection(&eb).cloned().collect();
            if got != want {
                failures += 1;
            }
        }
        run.emit(set_to_json(&out));
        run.certify(OperationKind::Intersect, &[a, b], &out, None);
    }
    let elapsed = start.elapsed();
    Outcome {
        name: "intersection matches box oracle",
        pass: failures == 0 && elapsed < Duration::from_secs(120),
        detail: format!("{INTERSECT_PAIRS} pairs, B=25, {failures} failures"),
    }
}

fn criterion_complement(run: &mut Run) -> Outcome {
    let shape = SetShape {
        max_dim: 2,
        max_components: 2,
        max_periods: 2,
        max_entry: 2,
    };
    let limits = ResourceLimits::default();
    let mut r = rng(SEED + 1);
    let mut failures = 0;
    for _ in 0..COMPLEMENTS {
        let dim = r.gen_range(1..=shape.max_dim);
        let s = random_set_in(&mut r, dim, &shape);
        let (c, stages) = complement_traced(&s, &limits).expect("complement");
        if run.verify {
            let es = enumerate_box(&s, 15);
            let ec = enumerate_box(&c, 15);
            let disjoint = es.is_disjoint(&ec);
            let covered = box_points(dim, 15).all(|p| {
                let p = NatVector::from_u64s(&p);
                es.contains(&p) || ec.contains(&p)
            });
            if !(disjoint && covered) {
                failures += 1;
            }
        }
        run.emit(set_to_json(&c));
        for st in &stages {
            run.certify(st.kind, &st.inputs, &st.output, None);
        }
    }
    Outcome {
        name: "complement is disjoint and covering",
        pass: failures == 0,
        detail: format!("{COMPLEMENTS} sets, B=15, {failures} failures"),
    }
}

fn criterion_preimage(run: &mut Run) -> Outcome {
    let shape = SetShape {
        max_dim: 2,
        max_components: 2,
        max_periods: 2,
        max_entry: 3,
    };
    let mut r = rng(SEED + 2);
    let mut failures = 0;
    for _ in 0..PREIMAGES {
        let k1 = r.gen_range(1..=2);
        let k2 = r.gen_range(1..=2);
        let h = random_matrix(&mut r, k2, k1, 2);
        let s = random_set_in(&mut r, k2, &shape);
        let out = preimage(&h, &s).expect("preimage");
        if run.verify {
            let got = enumerate_box(&out, 12);
            let want: BTreeSet<NatVector> = box_points(k1, 12)
                .map(|p| NatVector::from_u64s(&p))
                .filter(|x| s.member(&h.apply(x).expect("apply")).expect("member"))
                .collect();
            if got != want {
                failures += 1;
            }
        }
        run.emit(set_to_json(&out));
        run.certify(OperationKind::Preimage, &[s], &out, Some(&h));
    }
    Outcome {
        name: "preimage matches pointwise membership",
        pass: failures == 0,
        detail: format!("{PREIMAGES} instances, B=12, {failures} failures"),
    }
}

fn criterion_solver(run: &mut Run) -> Outcome {
    let mut r = rng(SEED + 3);
    let mut failures = 0;
    let mut bound_failures = 0;
    for _ in 0..SYSTEMS {
        let rows = r.gen_range(1..=3);
        let vars = r.gen_range(1..=3);
        let sys: DiophantineSystem = random_system(&mut r, rows, vars, 3, 3);
        let homogeneous = sys.is_homogeneous();
        let got = minimal_solutions(&sys, homogeneous).solutions;
        if run.verify {
            let bound = minimal_norm_bound(&sys);
            let bound = u64::try_from(&bound).expect("desk-scale bound");
            if got != brute_minimal_solutions(&sys, bound, homogeneous) {
                failures += 1;
            }
            let limit = BigUint::from(vars + 1) * max_subdeterminant(&sys);
            if got.iter().any(|x| x.norm() > limit) {
                bound_failures += 1;
            }
        }
        run.emit(serde_json::Value::Array(
            got.iter().map(vector_to_json).collect(),
        ));
    }
    Outcome {
        name: "minimal solutions match brute force",
        pass: failures == 0 && bound_failures == 0,
        detail: format!("{SYSTEMS} systems, {failures} mismatches, {bound_failures} exceed (t+1)M"),
    }
}

fn criterion_bounds(run: &mut Run) -> Outcome {
    let total = run.reports.len();
    let violated = run
        .reports
        .iter()
        .filter(|r| r.status == Status::Violated)
        .count();
    let at_default = run
        .reports
        .iter()
        .filter(|r| r.status == Status::Certified && r.precision == DEFAULT_PRECISION)
        .count();
    let escalated = run
        .reports
        .iter()
        .filter(|r| r.status == Status::Certified && r.precision > DEFAULT_PRECISION)
        .count();
    let inconclusive = total - violated - at_default - escalated;
    let ratio = at_default as f64 / total.max(1) as f64;
    Outcome {
        name: "bound reports never violated",
        pass: violated == 0 && ratio >= 0.95,
        detail: format!(
            "{total} reports, {at_default} certified at default precision ({:.1}%), \
             {escalated} after escalation, {inconclusive} inconclusive, {violated} violated",
            100.0 * ratio
        ),
    }
}

fn criterion_fixed(run: &mut Run) -> Outcome {
    let even = SemilinearSet::linear(&[0], &[&[2]]).unwrap();
    let odd = SemilinearSet::linear(&[1], &[&[2]]).unwrap();
    let mult3 = SemilinearSet::linear(&[0], &[&[3]]).unwrap();
    let limits = ResourceLimits::default();
    let mut failed = Vec::new();

    let i = intersect(&even, &mult3).unwrap();
    let six = SemilinearSet::linear(&[0], &[&[6]]).unwrap();
    if !equal_on_box(&i, &six, 60).unwrap().0 {
        failed.push("Even∩Mult3");
    }
    run.emit(set_to_json(&i));

    let c = complement(&even, &limits).unwrap();
    if !equal_on_box(&c, &odd, 25).unwrap().0 {
        failed.push("complement(Even)");
    }
    run.emit(set_to_json(&c));

    let c = complement(&SemilinearSet::linear(&[1], &[&[1]]).unwrap(), &limits).unwrap();
    let zero = SemilinearSet::linear(&[0], &[]).unwrap();
    if !equal_on_box(&c, &zero, 15).unwrap().0 {
        failed.push("complement(L(1,{1}))");
    }
    run.emit(set_to_json(&c));

    let sum = IntegerMatrix::from_u64(&[&[1, 1]]).unwrap();
    let p = preimage(&sum, &even).unwrap();
    let want: BTreeSet<NatVector> = box_points(2, 10)
        .filter(|v| (v[0] + v[1]) % 2 == 0)
        .map(|v| NatVector::from_u64s(&v))
        .collect();
    if enumerate_box(&p, 10) != want {
        failed.push("sum-map preimage");
    }
    run.emit(set_to_json(&p));

    let sys = DiophantineSystem::from_i64(&[&[2, -3]], &[0]).unwrap();
    let h = minimal_solutions(&sys, true).solutions;
    if h != vec![NatVector::from_u64s(&[3, 2])] {
        failed.push("Hilbert basis of 2x-3y=0");
    }
    run.emit(serde_json::Value::Array(
        h.iter().map(vector_to_json).collect(),
    ));

    Outcome {
        name: "worked fixed cases",
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            "5 cases exact".into()
        } else {
            format!("failed: {}", failed.join(", "))
        },
    }
}

fn run_all(verify: bool) -> Run {
    let mut run = Run {
        verify,
        ..Run::default()
    };
    let steps: [fn(&mut Run) -> Outcome; 6] = [
        criterion_intersection,
        criterion_complement,
        criterion_preimage,
        criterion_solver,
        criterion_bounds,
        criterion_fixed,
    ];
    for step in steps {
        let start = Instant::now();
        let mut o = step(&mut run);
        write!(o.detail, ", {:.1}s", start.elapsed().as_secs_f64()).expect("string write");
        run.outcomes.push(o);
    }
    run
}

fn main() -> ExitCode {
    let first = run_all(true);
    let second = run_all(false);
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool")
        .install(|| run_all(false));
    let identical = first.log == second.log && first.log == single.log;
    let mut outcomes = first.outcomes;
    outcomes.push(Outcome {
        name: "deterministic output",
        pass: identical,
        detail: format!(
            "{} bytes of JSON, repeated run and single-thread run {}",
            first.log.len(),
            if identical { "identical" } else { "differ" }
        ),
    });

    let mut all = true;
    for (i, o) in outcomes.iter().enumerate() {
        all &= o.pass;
        println!(
            "criterion {}: {} - {} ({})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
