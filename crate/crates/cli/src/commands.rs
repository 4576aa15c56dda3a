use std::io::Write;
use std::path::Path;

use refcommit::lattice::{LatticeCodeword, Predicate};
use refcommit::protocol::{twirl_compile, Scheme};
use refcommit::scalar::{fmt_exact, fmt_sig};
use refcommit::security::{
    alpha_grid, analyze_lattice, cheat_curve_continuous, continuous_analysis,
    cyclic_twirl_check, four_symbol_analysis, four_symbol_cheat_monte_carlo, haar_twirl_check,
    lattice_cheat_monte_carlo, parallel_flip_exact, parallel_flip_monte_carlo, soundness_monte_carlo,
    CheatRow, Estimate, Report, Section,
};
use refcommit::simple::{four_symbol_channel_law, realized_channel_law};
use refcommit::so3::{Group, MisalignmentDistribution};
use refcommit::{DLatticeParams, ExactProb, Probability};

use crate::config::{
    parse_group, Cli, CliError, Command, LatticeArgs, MingapArgs, Mode, Protocol, RunArgs,
    SweepArgs, TwirlArgs,
};

pub struct Output {
    pub text: String,
    pub exit_code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, exit_code: 0 }
    }

    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        match path {
            Some(p) => std::fs::write(p, &self.text)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(self.text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string())),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Analyze(a) => run_protocol("analyze", a, a.mode.unwrap_or(Mode::Exact), cli.budget),
        Command::Simulate(a) => {
            run_protocol("simulate", a, a.mode.unwrap_or(Mode::MonteCarlo), cli.budget)
        }
        Command::TwirlCheck(a) => twirl_check(a),
        Command::Mingap(a) => mingap(a, cli.budget),
        Command::Sweep(a) => sweep(a, cli.budget),
    }
}

fn lattice_config(s: &mut Section, args: &LatticeArgs, params: &DLatticeParams) {
    s.int("d", params.d() as i128)
        .int("L", params.l())
        .text("eps_meas", fmt_exact(params.eps_meas()))
        .text("eps_source", if args.eps.is_some() { "flag" } else { "default (safe_eps / 4)" })
        .text("predicate", params.predicate().as_str());
}

fn write_estimate(s: &mut Section, e: &Estimate, reference: Option<f64>) {
    let (lo, hi) = e.wilson_99();
    s.int("seed", e.seed)
        .int("trials", e.trials)
        .int("successes", e.successes)
        .real("rate", e.rate())
        .real("wilson99_low", lo)
        .real("wilson99_high", hi);
    if let Some(p) = reference {
        s.real("reference", p).flag("within_3sigma", e.agrees_with(p, 3.0));
    }
}

fn validate_run(args: &RunArgs) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(CliError::Invalid("--trials must be at least 1".into()));
    }
    if args.n == 0 {
        return Err(CliError::Invalid("--n must be at least 1".into()));
    }
    if let Some(a) = args.alpha {
        if !(0.0..=1.0).contains(&a) {
            return Err(CliError::Invalid(format!("--alpha must lie in [0, 1], got {a}")));
        }
    }
    Ok(())
}

fn run_protocol(command: &str, args: &RunArgs, mode: Mode, budget: u128) -> Result<Output, CliError> {
    validate_run(args)?;
    let mut report = Report::new();
    let cfg = report.section("config");
    cfg.text("command", command)
        .text("protocol", args.protocol.as_str())
        .text("mode", mode.as_str())
        .int("trials", args.trials)
        .int("seed", args.seed)
        .text("budget", budget.to_string());
    match args.protocol {
        Protocol::Lattice => {
            let params = args.lattice.params(budget)?;
            lattice_config(cfg, &args.lattice, &params);
            cfg.int("n", args.n as i128);
            lattice_report(&mut report, args, &params, mode, budget)?;
        }
        Protocol::FourSymbol => four_symbol_report(&mut report, args, mode),
        Protocol::Continuous => {
            match args.alpha {
                Some(a) => cfg.real("alpha", a),
                None => cfg.text("alpha", "grid 0:0.1:1"),
            };
            continuous_report(&mut report, args, mode)?;
        }
    }
    Ok(Output::ok(report.render()))
}

fn codebook_section(report: &mut Report, params: &DLatticeParams) {
    let b = params.basis();
    report
        .section("codebook")
        .int("size", b.codebook_len() as i128)
        .real("min_gap", b.min_gap())
        .real("separation", b.separation())
        .real("safe_eps", b.safe_eps())
        .text("eps_meas", fmt_exact(params.eps_meas()))
        .flag("certified", b.separation() > 2.0 * params.eps_meas());
}

fn lattice_report(
    report: &mut Report,
    args: &RunArgs,
    params: &DLatticeParams,
    mode: Mode,
    budget: u128,
) -> Result<(), CliError> {
    codebook_section(report, params);
    let predicate = params.predicate();
    // binding witnesses are needed by the session estimates too
    let analysis = analyze_lattice(params, budget)?;
    let witness = &analysis.binding(predicate).flip;
    let honest = LatticeCodeword::new(vec![params.l() / 2; params.d()]);

    if mode.exact() {
        analysis.write(report, predicate);
        let flip = parallel_flip_exact(params, args.n, &witness.commit, &witness.reveal, &honest, budget)?;
        report
            .section("parallel")
            .text("method", "exact")
            .int("instances", args.n as i128)
            .text("cheat_instance", "0")
            .text("honest_commit", honest.to_string())
            .exact("flip_one", &flip);
    }
    if mode.monte_carlo() {
        let e = soundness_monte_carlo(Scheme::Lattice(params), args.trials, args.seed);
        write_estimate(
            report.section("soundness_mc").text("method", "monte-carlo"),
            &e,
            Some(analysis.soundness.to_f64()),
        );
        let e = lattice_cheat_monte_carlo(params, &witness.commit, &witness.reveal, args.trials, args.seed + 1);
        write_estimate(
            report
                .section("binding_mc")
                .text("method", "monte-carlo")
                .text("predicate", predicate.as_str())
                .text("commit", witness.commit.to_string())
                .text("reveal", witness.reveal.to_string()),
            &e,
            Some(witness.probability.to_f64()),
        );
        let e = parallel_flip_monte_carlo(params, args.n, &witness.commit, &witness.reveal, args.trials, args.seed + 2);
        write_estimate(
            report
                .section("parallel_mc")
                .text("method", "monte-carlo")
                .int("instances", args.n as i128),
            &e,
            Some(witness.probability.to_f64()),
        );
    }
    Ok(())
}

fn four_symbol_report(report: &mut Report, args: &RunArgs, mode: Mode) {
    let a = four_symbol_analysis();
    if mode.exact() {
        let law_ok = realized_channel_law::<f64>().is_ok_and(|l| l == four_symbol_channel_law());
        report
            .section("four_symbol")
            .text("method", "exact")
            .exact("concealing_distance", &a.concealing_distance)
            .exact("soundness", &a.soundness)
            .exact("binding_flip", &a.binding_flip)
            .int("binding_flip_commit_symbol", a.flip_commit)
            .int("binding_flip_reveal_symbol", a.flip_reveal.symbol())
            .exact("binding_sum_max", &a.binding_sum_max)
            .flag("rotation_realizes_channel", law_ok);
    }
    if mode.monte_carlo() {
        let e = soundness_monte_carlo(Scheme::FourSymbol, args.trials, args.seed);
        write_estimate(report.section("soundness_mc").text("method", "monte-carlo"), &e, Some(1.0));
        let e = four_symbol_cheat_monte_carlo(a.flip_commit, a.flip_reveal, args.trials, args.seed + 1);
        write_estimate(
            report.section("binding_mc").text("method", "monte-carlo"),
            &e,
            Some(a.binding_flip.to_f64()),
        );
    }
}

fn write_row(s: &mut Section, row: &CheatRow) {
    let (c0, c1) = row.closed_form;
    s.real("alpha", row.alpha)
        .real("p_accept_0", c0)
        .real("p_accept_1", c1)
        .real("p_sum", c0 + c1)
        .real("p_min", c0.min(c1))
        .real("arc_p_accept_0", row.arc.0)
        .real("arc_p_accept_1", row.arc.1);
    if let Some((e0, e1)) = &row.monte_carlo {
        s.int("seed_0", e0.seed)
            .int("seed_1", e1.seed)
            .int("trials", e0.trials)
            .real("mc_p_accept_0", e0.rate())
            .real("mc_p_accept_1", e1.rate())
            .flag("within_3sigma", row.agrees(3.0));
    }
}

fn continuous_report(report: &mut Report, args: &RunArgs, mode: Mode) -> Result<(), CliError> {
    if mode.exact() {
        let c = continuous_analysis::<f64>();
        let s = report.section("continuous");
        s.text("method", "exact (arc geometry)")
            .real("concealing_distance", c.concealing_distance)
            .real("soundness", c.soundness);
        for b in 0..2 {
            let masses: Vec<String> = c.quarter_mass[b].iter().map(|&m| fmt_sig(m)).collect();
            s.text(&format!("quarter_mass_bit{b}"), masses.join(","));
        }
    }
    let alphas = match args.alpha {
        Some(a) => vec![a],
        None => alpha_grid(10),
    };
    let trials = mode.monte_carlo().then_some(args.trials);
    let rows = cheat_curve_continuous(&alphas, trials, args.seed)?;
    for row in &rows {
        write_row(report.section("interpolation"), row);
    }
    if rows.len() > 1 {
        let best = rows
            .iter()
            .max_by(|a, b| {
                let m = |r: &CheatRow| r.closed_form.0.min(r.closed_form.1);
                m(a).total_cmp(&m(b))
            })
            .expect("nonempty grid");
        report.section("interpolation_summary").real("best_alpha", best.alpha).real(
            "best_min_accept",
            best.closed_form.0.min(best.closed_form.1),
        );
    }
    Ok(())
}

fn twirl_check(args: &TwirlArgs) -> Result<Output, CliError> {
    let mu = parse_group(&args.group, &args.lattice)?;
    let group = twirl_compile(&mu)?.group();
    let mut report = Report::new();
    let cfg = report.section("config");
    cfg.text("command", "twirl-check").text("group", mu.label());
    let mut threshold = None;
    let passed = match (group, &mu) {
        (Group::Cyclic(n), _) => {
            cfg.int("n", n);
            let c = cyclic_twirl_check(n)?;
            report
                .section("relative_frame")
                .text("method", "exact enumeration over G x G")
                .flag("uniform", c.relative_frame_uniform);
            for p in &c.protocols {
                report
                    .section("protocol")
                    .text("name", p.protocol)
                    .int("transcripts", p.support as i128)
                    .flag("compiled_equals_channel", p.compiled_equal)
                    .flag("one_sided_equals_channel", p.one_sided_equal);
            }
            c.passed()
        }
        (Group::Haar, MisalignmentDistribution::HaarSO3) => {
            if args.samples == 0 {
                return Err(CliError::Invalid("--samples must be at least 1".into()));
            }
            cfg.int("samples", args.samples).int("seed", args.seed);
            let h = haar_twirl_check(args.samples, args.seed)?;
            for (name, m, seed) in [("channel", &h.channel, h.seed), ("compiled", &h.compiled, h.seed + 1)] {
                let s = report.section(name);
                s.text("method", "moments").int("seed", seed);
                s.text("mean", m.mean.iter().map(|&x| fmt_sig(x)).collect::<Vec<_>>().join(","));
                for (i, row) in m.second.iter().enumerate() {
                    s.text(
                        &format!("second_moment_row{i}"),
                        row.iter().map(|&x| fmt_sig(x)).collect::<Vec<_>>().join(","),
                    );
                }
                s.real("max_delta", m.max_delta());
            }
            threshold = Some(h.threshold);
            h.passed()
        }
        (g, _) => {
            return Err(CliError::Invalid(format!("twirl-check does not support group {g:?}")));
        }
    };
    let v = report.section("verdict");
    if let Some(t) = threshold {
        v.real("threshold", t);
    }
    v.flag("pass", passed);
    Ok(Output {
        text: report.render(),
        exit_code: if passed { 0 } else { 3 },
    })
}

fn mingap(args: &MingapArgs, budget: u128) -> Result<Output, CliError> {
    let la = &args.lattice;
    la.validate()?;
    let basis = refcommit::DAngleBasis::build_with_budget(la.d, la.l, budget)?;
    let eps = la.eps.unwrap_or(basis.safe_eps() / 4.0);
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(CliError::Invalid("--eps must be finite and nonnegative".into()));
    }
    let pass = basis.separation() > 2.0 * eps;
    let mut report = Report::new();
    report
        .section("config")
        .text("command", "mingap")
        .int("d", la.d as i128)
        .int("L", la.l)
        .text("eps_meas", fmt_exact(eps))
        .text("eps_source", if la.eps.is_some() { "flag" } else { "default (safe_eps / 4)" })
        .text("budget", budget.to_string());
    report
        .section("mingap")
        .int("codebook_size", basis.codebook_len() as i128)
        .text("angles", basis.angles().iter().map(|&x| fmt_exact(x)).collect::<Vec<_>>().join(","))
        .text("min_gap", fmt_exact(basis.min_gap()))
        .real("min_gap_over_pi", basis.min_gap() / std::f64::consts::PI)
        .text("separation", fmt_exact(basis.separation()))
        .text("safe_eps", fmt_exact(basis.safe_eps()))
        .real("twice_eps", 2.0 * eps)
        .flag("pass", pass);
    Ok(Output {
        text: report.render(),
        exit_code: if pass { 0 } else { 3 },
    })
}

fn csv_text(rows: Vec<Vec<String>>, header: &[&str], comment: String) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let body = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(format!("# {comment}\n{}", String::from_utf8(body).expect("csv output is utf-8")))
}

fn sweep(args: &SweepArgs, budget: u128) -> Result<Output, CliError> {
    if args.trials == 0 {
        return Err(CliError::Invalid("--trials must be at least 1".into()));
    }
    let comment = format!(
        "refcommit sweep protocol={} mode={} trials={} seed={} budget={budget}",
        args.protocol.as_str(),
        args.mode.as_str(),
        args.trials,
        args.seed
    );
    match args.protocol {
        Protocol::Lattice => lattice_sweep(args, budget, comment),
        Protocol::Continuous => continuous_sweep(args, comment),
        Protocol::FourSymbol => Err(CliError::Invalid(
            "four-symbol has no parameters to sweep; use analyze".into(),
        )),
    }
}

fn lattice_sweep(args: &SweepArgs, budget: u128, comment: String) -> Result<Output, CliError> {
    let mut header = vec![
        "d", "L", "eps_meas", "min_gap", "soundness", "concealing", "concealing_decimal",
        "bound", "bound_decimal", "bound_holds", "flip_strict", "flip_lenient", "sum_max_lenient",
    ];
    if args.mode.monte_carlo() {
        header.extend(["soundness_mc", "flip_lenient_mc", "flip_lenient_mc_seed"]);
    }
    let mut rows = Vec::new();
    let mut index = 0u64;
    for &d in &args.d {
        for &l in &args.l {
            let la = LatticeArgs {
                d,
                l,
                eps: None,
                predicate: Predicate::Lenient,
            };
            let p = la.params(budget)?;
            let a = analyze_lattice(&p, budget)?;
            let r = |x: &ExactProb| x.render();
            let mut row = vec![
                d.to_string(),
                l.to_string(),
                fmt_exact(p.eps_meas()),
                fmt_exact(p.basis().min_gap()),
                r(&a.soundness),
                r(&a.concealing.distance),
                fmt_sig(a.concealing.distance.to_f64()),
                r(&a.concealing_bound),
                fmt_sig(a.concealing_bound.to_f64()),
                a.bound_holds().to_string(),
                r(&a.binding_strict.flip.probability),
                r(&a.binding_lenient.flip.probability),
                r(&a.binding_lenient.sum_max),
            ];
            if args.mode.monte_carlo() {
                let seed = args.seed + 2 * index;
                let s = soundness_monte_carlo(Scheme::Lattice(&p), args.trials, seed);
                let w = &a.binding_lenient.flip;
                let f = lattice_cheat_monte_carlo(&p, &w.commit, &w.reveal, args.trials, seed + 1);
                row.extend([fmt_sig(s.rate()), fmt_sig(f.rate()), (seed + 1).to_string()]);
            }
            rows.push(row);
            index += 1;
        }
    }
    Ok(Output::ok(csv_text(rows, &header, comment)?))
}

fn continuous_sweep(args: &SweepArgs, comment: String) -> Result<Output, CliError> {
    let alphas = if args.alpha.is_empty() { alpha_grid(10) } else { args.alpha.clone() };
    let trials = args.mode.monte_carlo().then_some(args.trials);
    let rows = cheat_curve_continuous(&alphas, trials, args.seed)?;
    let mut header = vec!["alpha", "p_accept_0", "p_accept_1", "arc_p_accept_0", "arc_p_accept_1"];
    if trials.is_some() {
        header.extend(["mc_p_accept_0", "mc_p_accept_1", "seed_0", "seed_1", "within_3sigma"]);
    }
    let table = rows
        .iter()
        .map(|r| {
            let mut v = vec![
                fmt_sig(r.alpha),
                fmt_sig(r.closed_form.0),
                fmt_sig(r.closed_form.1),
                fmt_sig(r.arc.0),
                fmt_sig(r.arc.1),
            ];
            if let Some((e0, e1)) = &r.monte_carlo {
                v.extend([
                    fmt_sig(e0.rate()),
                    fmt_sig(e1.rate()),
                    e0.seed.to_string(),
                    e1.seed.to_string(),
                    r.agrees(3.0).to_string(),
                ]);
            }
            v
        })
        .collect();
    Ok(Output::ok(csv_text(table, &header, comment)?))
}
