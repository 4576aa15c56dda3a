//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

use std::process::Command;
use std::time::{Duration, Instant};

use refcommit::lattice::{
    decode_commit, encode, lattice_mu, LatticeCodeword, Predicate, DEFAULT_ENUMERATION_BUDGET,
};
use refcommit::protocol::Scheme;
use refcommit::security::{
    alpha_grid, best_reveals, binding_search, binding_search_finite_precision, cheat_curve_continuous,
    concealing_bound, concealing_exact, cyclic_twirl_check, four_symbol_analysis, haar_twirl_check,
    soundness_exact, soundness_monte_carlo, BindingAnalysis, ConcealingAnalysis, PayloadBinding,
};
use refcommit::simple::{four_symbol_channel_law, realized_channel_law};
use refcommit::so3::Vec3;
use refcommit::{DLatticeParams, ExactProb, Probability};

fn q(n: u128, d: u128) -> ExactProb {
    ExactProb::ratio(n, d)
}

fn params(d: usize, l: u32, predicate: Predicate) -> DLatticeParams {
    DLatticeParams::with_default_eps(d, l, predicate).expect("valid parameters")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl Into<String>) {
    if !ok {
        failures.push(what.into());
    }
}

fn finish(failures: Vec<String>, summary: String, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let mut failures = failures;
    if let Some(limit) = limit {
        check(
            &mut failures,
            elapsed < limit,
            format!("runtime {:.2}s over the {:.0}s limit", elapsed.as_secs_f64(), limit.as_secs_f64()),
        );
    }
    let time = format!("{:.2}s", elapsed.as_secs_f64());
    if failures.is_empty() {
        Outcome {
            pass: true,
            detail: format!("{summary} [{time}]"),
        }
    } else {
        Outcome {
            pass: false,
            detail: format!("{} [{time}]", failures.join("; ")),
        }
    }
}

fn lattice_soundness() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    for d in 1..=3 {
        for l in [4, 8] {
            let p = params(d, l, Predicate::Lenient);
            let exact: ExactProb = soundness_exact(&p, DEFAULT_ENUMERATION_BUDGET).expect("within budget");
            check(&mut f, exact == q(1, 1), format!("exact soundness {} at d={d} L={l}", exact.render()));
            let e = soundness_monte_carlo(Scheme::Lattice(&p), 10_000, 42);
            check(
                &mut f,
                e.successes == 10_000,
                format!("{}/10000 accepted at d={d} L={l}", e.successes),
            );
        }
    }
    finish(f, "exact 1 and 10000/10000 for d in 1..3, L in {4,8}".into(), start.elapsed(), Some(Duration::from_secs(5)))
}

fn binding() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let mut d5 = Duration::ZERO;
    for d in 2..=5 {
        let t = Instant::now();
        let p = params(d, 8, Predicate::Lenient);
        let lenient: BindingAnalysis<ExactProb> = binding_search(&p, Predicate::Lenient);
        let strict: BindingAnalysis<ExactProb> = binding_search(&p, Predicate::Strict);
        if d == 5 {
            d5 = t.elapsed();
        }
        let (l, s) = (&lenient.flip.probability, &strict.flip.probability);
        check(&mut f, *l == q(1, d as u128), format!("lenient {} at d={d}", l.render()));
        check(&mut f, *s == q(1, 2 * d as u128), format!("strict {} at d={d}", s.render()));
        check(&mut f, l >= s, format!("lenient < strict at d={d}"));
    }
    for d in 1..=3 {
        for l in [2, 3, 4, 5, 8] {
            let p = params(d, l, Predicate::Lenient);
            let a: BindingAnalysis<ExactProb> = binding_search(&p, Predicate::Lenient);
            let b: BindingAnalysis<ExactProb> = binding_search(&p, Predicate::Strict);
            check(&mut f, a.flip.probability >= b.flip.probability, format!("dominance at d={d} L={l}"));
        }
    }
    check(&mut f, d5 < Duration::from_secs(10), format!("d=5 search took {:.2}s", d5.as_secs_f64()));
    finish(
        f,
        format!("lenient 1/d, strict 1/(2d) for d in 2..5 at L=8; d=5 search {:.3}s", d5.as_secs_f64()),
        start.elapsed(),
        None,
    )
}

fn concealing() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let mut values = Vec::new();
    for d in 1..=3 {
        for l in [4u32, 8, 16] {
            let c: ConcealingAnalysis<ExactProb> =
                concealing_exact(&params(d, l, Predicate::Lenient)).expect("within budget");
            let bound: ExactProb = concealing_bound(d, l).expect("bound");
            check(
                &mut f,
                c.distance <= bound,
                format!("eps {} > bound {} at d={d} L={l}", c.distance.render(), bound.render()),
            );
            // regression anchors: 2/L for even L
            check(
                &mut f,
                c.distance == q(2, u128::from(l)),
                format!("eps {} moved from anchor 2/{l} at d={d}", c.distance.render()),
            );
            values.push(format!("({d},{l})={}", c.distance.render()));
        }
    }
    let at = |l| concealing_exact::<f64, ExactProb>(&params(2, l, Predicate::Lenient)).expect("budget").distance;
    check(&mut f, at(16) < at(4), "eps(d=2,L=16) not below eps(d=2,L=4)");
    finish(f, values.join(" "), start.elapsed(), Some(Duration::from_secs(30)))
}

fn continuous() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let rows = cheat_curve_continuous(&alpha_grid(10), Some(10_000), 42).expect("valid grid");
    for r in &rows {
        check(&mut f, r.agrees(3.0), format!("Monte Carlo outside 3 sigma at alpha={}", r.alpha));
        let (p0, p1) = r.closed_form;
        check(&mut f, (p0 + p1 - 1.5).abs() <= 1e-12, format!("p0+p1={} at alpha={}", p0 + p1, r.alpha));
        check(
            &mut f,
            (r.arc.0 - p0).abs() <= 1e-12 && (r.arc.1 - p1).abs() <= 1e-12,
            format!("arc geometry differs from closed form at alpha={}", r.alpha),
        );
    }
    check(&mut f, rows[5].closed_form == (0.75, 0.75), format!("alpha=1/2 gives {:?}", rows[5].closed_form));
    finish(
        f,
        "11 alphas x 2 bits x 10000 sessions within 3 sigma; alpha=1/2 -> (0.75, 0.75)".into(),
        start.elapsed(),
        None,
    )
}

fn four_symbol() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let a = four_symbol_analysis();
    check(&mut f, a.concealing_distance == q(0, 1), format!("concealing {}", a.concealing_distance.render()));
    check(&mut f, a.soundness == q(1, 1), format!("soundness {}", a.soundness.render()));
    check(&mut f, a.binding_flip == q(1, 2), format!("flip {}", a.binding_flip.render()));
    let law = realized_channel_law::<f64>().expect("finite support");
    check(&mut f, law == four_symbol_channel_law(), "rotation realization differs from the symbol channel");
    finish(f, "concealing 0, soundness 1, flip 1/2, channel law exact".into(), start.elapsed(), None)
}

fn twirl() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    for n in [2, 4, 8] {
        let c = cyclic_twirl_check(n).expect("cyclic group");
        check(&mut f, c.passed(), format!("Z_{n} laws differ: {c:?}"));
    }
    let h = haar_twirl_check(100_000, 42).expect("haar");
    let (dc, dk) = (h.channel.max_delta(), h.compiled.max_delta());
    check(&mut f, dc < 0.02 && dk < 0.02, format!("Haar moment deltas {dc} / {dk}"));
    finish(
        f,
        format!("Z_2, Z_4, Z_8 exact; Haar deltas {dc:.4} (channel) {dk:.4} (compiled)"),
        start.elapsed(),
        Some(Duration::from_secs(20)),
    )
}

fn finite_precision() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let p = params(3, 8, Predicate::Lenient);
    let b = p.basis();
    check(&mut f, b.separation() > 2.0 * p.eps_meas(), "min_gap certification failed at d=3 L=8");

    // payloads whose every channel image lies outside every eps-ball, checked by linear scan
    let table = b.table();
    let near = |v: &Vec3<f64>| table.iter().any(|&(a, _)| Vec3::in_plane(a).distance(v) <= p.eps_meas());
    let support = lattice_mu(&p).enumerate_support().expect("finite");
    let (mut far, mut aliased) = (0, 0);
    for i in 0..table.len() - 1 {
        let w = Vec3::in_plane((table[i].0 + table[i + 1].0) / 2.0);
        let pb: PayloadBinding<ExactProb> =
            binding_search_finite_precision(&p, &w, Predicate::Lenient).expect("unit payload");
        if support.iter().any(|(r, _)| near(&r.apply(&w))) {
            aliased += 1;
            check(&mut f, pb.cheat_probability() <= q(1, 3), format!("aliased payload above 1/d at {i}"));
        } else {
            far += 1;
            check(&mut f, pb.best == [q(0, 1), q(0, 1)], format!("far payload accepted at {i}"));
        }
    }

    // near-codeword payloads match the codeword
    for idx in (0..512u64).step_by(7) {
        let a = LatticeCodeword::from_index(idx, 8, 3);
        let v = encode(&p, &a).expect("codeword");
        let w = (v + Vec3::new(-v.y, v.x, 0.0).scale(p.eps_meas() / 2.0)).normalized().expect("unit");
        check(&mut f, decode_commit(&p, &w) == Some(a.clone()), format!("decode of perturbed {a}"));
        for pred in [Predicate::Strict, Predicate::Lenient] {
            let pb: PayloadBinding<ExactProb> = binding_search_finite_precision(&p, &w, pred).expect("unit");
            let lattice: [ExactProb; 2] = best_reveals(&p, &a, pred);
            check(&mut f, pb.best == lattice, format!("perturbed {a} differs under {pred}"));
            check(&mut f, pb.cheat_probability() <= q(1, 3), format!("perturbed {a} above 1/d"));
        }
    }
    finish(
        f,
        format!(
            "certified; {far} far midpoints abort, {aliased} alias after rotation and stay <= 1/d; perturbed codewords match"
        ),
        start.elapsed(),
        None,
    )
}

fn run_cli(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_refcommit"))
        .args(args)
        .output()
        .expect("run refcommit");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let commands: &[&[&str]] = &[
        &["analyze", "--protocol", "lattice", "--d", "3", "--L", "8"],
        &["analyze", "--protocol", "four-symbol"],
        &["analyze", "--protocol", "continuous", "--alpha", "0.5"],
        &["simulate", "--protocol", "lattice", "--trials", "5000", "--seed", "7"],
        &["simulate", "--protocol", "four-symbol", "--trials", "5000"],
        &["simulate", "--protocol", "continuous", "--trials", "2000", "--seed", "9"],
        &["twirl-check", "--group", "z4"],
        &["twirl-check", "--group", "haar", "--samples", "20000", "--seed", "5"],
        &["mingap", "--d", "3", "--L", "8"],
        &["sweep", "--protocol", "lattice", "--d", "1,2", "--L", "4,8", "--mode", "both", "--trials", "2000"],
        &["sweep", "--protocol", "continuous", "--mode", "both", "--trials", "1000"],
    ];
    for args in commands {
        let (a, code_a) = run_cli(args);
        let (b, code_b) = run_cli(args);
        check(&mut f, code_a == 0 && code_b == 0, format!("{args:?} exited {code_a}/{code_b}"));
        check(&mut f, !a.is_empty() && a == b, format!("{args:?} not byte-identical"));
    }
    finish(f, format!("{} commands reproduced byte-identically", commands.len()), start.elapsed(), None)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 lattice soundness", lattice_soundness),
        ("2 binding 1/d", binding),
        ("3 concealing bound", concealing),
        ("4 continuous interpolation", continuous),
        ("5 four-symbol scheme", four_symbol),
        ("6 twirl equivalence", twirl),
        ("7 finite precision", finite_precision),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {name}: {tag} {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
