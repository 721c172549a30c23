use std::fmt::Write as _;

use serde_json::json;

use entanglia::boundent::{
    be_family, horodecki_insep, horodecki_state, product_overlap_scores, tiles_upb, unlock, upb_complement,
    upb_unextendibility_score, verify_family, BeLabel, BoundError, MAX_QUBITS,
};
use entanglia::hideproto::run_demo;
use entanglia::locc::{
    assist_plan_max_entangled, classify, coop_construct, find_catalyst_2x2, maj_table, min_assist_3x3, multicopy,
    nielsen, split_two_copies, tensor_power,
};
use entanglia::majorize::{compare, MajVerdict};
use entanglia::measures::{
    concurrence_2q, concurrence_pure, entanglement_entropy, eof_2q, negativity, von_neumann_entropy,
};
use entanglia::noflip::{
    angle_preserving_gadget, angle_sweep, antiunitary_gadget, flip_closed_form, flip_gadget, GadgetResult,
};
use entanglia::numkernel::eigvals_hermitian;
use entanglia::witness::{is_ppt, witness_report};

use crate::input::{load_state, parse_complex, parse_cut, parse_vec, Loaded};
use crate::report::{sig, sig_vec, table, yes_no, Outcome};
use crate::{BoundAction, CliError, Command, HideAction, MeasureKind, RunConfig};

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

fn verdict_name(v: MajVerdict) -> &'static str {
    match v {
        MajVerdict::XPrecY => "first -> second (first is majorized)",
        MajVerdict::YPrecX => "second -> first (second is majorized)",
        MajVerdict::Equal => "Equal",
        MajVerdict::Incomparable => "Incomparable",
    }
}

fn rank(m: &entanglia::numkernel::CMatrix) -> Result<usize, CliError> {
    Ok(eigvals_hermitian(m).map_err(numeric)?.iter().filter(|x| **x > 1e-9).count())
}

/// Runs one command; the flag marks a completed run whose checks failed.
pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<(Outcome, bool), CliError> {
    let ok = |o: Outcome| Ok((o, false));
    match cmd {
        Command::Majorize { x, y } => {
            let (x, y) = (parse_vec(x)?, parse_vec(y)?);
            let v = compare(&x, &y).map_err(numeric)?;
            let t = maj_table(&x, &y).map_err(numeric)?;
            ok(Outcome::new(format!("{}\n{}", verdict_name(v), table(&t)), json!({ "verdict": v, "table": t })))
        }
        Command::Nielsen { a, b } => {
            let (a, b) = (parse_vec(a)?, parse_vec(b)?);
            let conv = nielsen(&a, &b).map_err(numeric)?;
            let t = maj_table(&a, &b).map_err(numeric)?;
            let head = if conv { "convertible by LOCC" } else { "not convertible by LOCC" };
            ok(Outcome::new(format!("{head}\n{}", table(&t)), json!({ "convertible": conv, "table": t })))
        }
        Command::Classify { a, b } => {
            let (a, b) = (parse_vec(a)?, parse_vec(b)?);
            let c = classify(&a, &b).map_err(numeric)?;
            let mut h = format!("{}\n", verdict_name(c.verdict));
            if let Some(p) = c.pattern_3x3 {
                let _ = writeln!(h, "pattern: {p:?}");
            }
            let _ = writeln!(h, "strongly incomparable: {}", yes_no(c.strong));
            let _ = writeln!(h, "catalysis possible: {}", yes_no(c.catalysis_possible));
            let fwd = maj_table(&a, &b).map_err(numeric)?;
            let back = maj_table(&b, &a).map_err(numeric)?;
            let _ = write!(h, "first -> second\n{}\nsecond -> first\n{}", table(&fwd), table(&back));
            ok(Outcome::new(h, json!({ "class": c, "forward": fwd, "backward": back })))
        }
        Command::Catalyst { a, b, step } => {
            let (a, b) = (parse_vec(a)?, parse_vec(b)?);
            if !(*step > 0.0 && *step < 0.5) {
                return Err(CliError::Usage(format!("--step {step} must lie in (0, 0.5)")));
            }
            match find_catalyst_2x2(&a, &b, *step).map_err(numeric)? {
                Some(r) => {
                    let h = format!(
                        "catalyst found: c = {}\ncatalyst {}\nworking interval [{}, {}]\n{}",
                        sig(r.c),
                        sig_vec(&r.catalyst),
                        sig(r.interval.0),
                        sig(r.interval.1),
                        table(&r.table)
                    );
                    ok(Outcome::new(h, json!({ "found": true, "result": r })))
                }
                None => ok(Outcome::new(
                    format!("no two-level catalyst found on a grid of step {}", sig(*step)),
                    json!({ "found": false, "step": step }),
                )),
            }
        }
        Command::Multicopy { a, b, k } => {
            if *k == 0 || *k > cfg.max_copies {
                return Err(CliError::Numeric(format!("copy count {k} outside 1..={}", cfg.max_copies)));
            }
            let (a, b) = (parse_vec(a)?, parse_vec(b)?);
            let conv = multicopy(&a, &b, *k).map_err(numeric)?;
            let t = maj_table(&tensor_power(&a, *k), &tensor_power(&b, *k)).map_err(numeric)?;
            let head = format!("{k} copies: {}", if conv { "convertible" } else { "not convertible" });
            ok(Outcome::new(format!("{head}\n{}", table(&t)), json!({ "copies": k, "convertible": conv, "table": t })))
        }
        Command::Assist { a, b, min } => {
            let (a, b) = (parse_vec(a)?, parse_vec(b)?);
            let p = if *min { min_assist_3x3(&a, &b) } else { assist_plan_max_entangled(&a, &b) }.map_err(numeric)?;
            let mut h = format!("assistance: {:?}\nresource {}\nconsumed: {}\n", p.kind, sig_vec(&p.resource), yes_no(p.consumed));
            if let Some(c0) = p.c0 {
                let _ = writeln!(h, "c0 = {}", sig(c0));
            }
            if let Some(e0) = p.e0 {
                let _ = writeln!(h, "resource entropy = {}", sig(e0));
            }
            h.push_str(&table(&p.table));
            ok(Outcome::new(h, &p))
        }
        Command::Coop { a, b } => {
            let (a, b) = (parse_vec(a)?, parse_vec(b)?);
            let p = coop_construct(&a, &b, cfg.seed).map_err(numeric)?;
            let h = format!(
                "cooperative plan ({})\nchi {}\neta {}\ncross pairs incomparable: {:?}\n{}",
                p.source,
                sig_vec(&p.chi),
                sig_vec(&p.eta),
                p.cross_incomparable,
                table(&p.table)
            );
            ok(Outcome::new(h, &p))
        }
        Command::Split2 { a, b } => {
            let (a, b) = (parse_vec(a)?, parse_vec(b)?);
            let s = split_two_copies(&a, &b).map_err(numeric)?;
            let h = format!(
                "case {:?}\nbound interval [{}, {}]\ncertified [{}, {}]\nmidpoint eta {}\n{}",
                s.case,
                sig(s.bound_interval.0),
                sig(s.bound_interval.1),
                sig(s.certified.0),
                sig(s.certified.1),
                sig_vec(&s.midpoint_eta),
                table(&s.table)
            );
            ok(Outcome::new(h, &s))
        }
        Command::Measure { kind, statefile, cut } => {
            let cut = parse_cut(cut)?;
            let st = load_state(statefile, cfg.max_dim)?;
            let (name, value) = match (kind, &st) {
                (MeasureKind::Entropy, Loaded::Pure(p)) => {
                    ("entanglement entropy", entanglement_entropy(p, &cut).map_err(numeric)?)
                }
                (MeasureKind::Entropy, Loaded::Mixed(m)) => ("von Neumann entropy", von_neumann_entropy(m).map_err(numeric)?),
                (MeasureKind::Concurrence, Loaded::Pure(p)) => ("concurrence", concurrence_pure(p, &cut).map_err(numeric)?),
                (MeasureKind::Concurrence, Loaded::Mixed(m)) => ("concurrence", concurrence_2q(m).map_err(numeric)?),
                (MeasureKind::Eof, Loaded::Pure(p)) => {
                    ("entanglement of formation", entanglement_entropy(p, &cut).map_err(numeric)?)
                }
                (MeasureKind::Eof, Loaded::Mixed(m)) => ("entanglement of formation", eof_2q(m).map_err(numeric)?),
                (MeasureKind::Negativity, s) => ("negativity", negativity(&s.density(), &cut).map_err(numeric)?),
            };
            ok(Outcome::new(format!("{name}: {}", sig(value)), json!({ "measure": name, "cut": cut, "value": value })))
        }
        Command::Witness { statefile, cut } => {
            let cut = parse_cut(cut)?;
            let rho = load_state(statefile, cfg.max_dim)?.density();
            let r = witness_report(&rho, &cut, cfg.seed).map_err(numeric)?;
            let mut h = format!(
                "cut {:?}\nPPT: {} (min eigenvalue {})\nentangled: {}\nreduction violated: {}\n",
                r.cut,
                yes_no(r.ppt),
                sig(r.min_pt_eigenvalue),
                yes_no(r.entangled),
                yes_no(r.reduction_violated)
            );
            if let Some(m) = r.chsh_m {
                let _ = writeln!(h, "CHSH M: {} ({})", sig(m), if m > 1.0 { "violates" } else { "no violation" });
            }
            if let Some(f) = &r.fmax {
                let _ = writeln!(h, "entangled fraction >= {} over {} restarts", sig(f.value), f.restarts);
            }
            for d in &r.distillable_rank2 {
                let _ = writeln!(h, "rank-2 test, k = {}: {} (value {})", d.copies, d.verdict, sig(d.value));
            }
            ok(Outcome::new(h, &r))
        }
        Command::Flip { a, b, c, d, theta, mu, nu } => {
            let r = flip_gadget(*a, *b, *c, *d, *theta, *mu, *nu).map_err(numeric)?;
            let (ca, cb, cbp) = flip_closed_form(*a, *b, *c, *d, *theta);
            let mut h = gadget_text(&r);
            let _ = write!(h, "\nclosed form A = {}, B = {}, B' = {}", sig(ca), sig(cb), sig(cbp));
            ok(Outcome::new(h, json!({ "gadget": r, "closed_form": { "a": ca, "b": cb, "b_prime": cbp } })))
        }
        Command::Antiunitary { theta, alpha, beta } => {
            let r = antiunitary_gadget(*theta, *alpha, *beta).map_err(numeric)?;
            let mut h = gadget_text(&r);
            if let Some(dev) = r.plain_unitary_deviation {
                let _ = write!(h, "\nplain unitary leg deviation {}", sig(dev));
            }
            ok(Outcome::new(h, &r))
        }
        Command::Angle { alpha, beta, sweep, points } => {
            if *sweep {
                if *points == 0 {
                    return Err(CliError::Usage("--points must be at least 1".into()));
                }
                let rows = angle_sweep(*points).map_err(numeric)?;
                let mut h = format!("{:>10}  {:>10}  {:>10}  {:>10}  {:>10}  verdict\n", "t", "alpha", "beta", "A", "B");
                for r in &rows {
                    let _ = writeln!(
                        h,
                        "{:>10}  {:>10}  {:>10}  {:>10}  {:>10}  {:?}",
                        sig(r.t),
                        sig(r.alpha),
                        sig(r.beta),
                        sig(r.a),
                        sig(r.b),
                        r.verdict
                    );
                }
                return ok(Outcome::new(h, &rows));
            }
            let (Some(al), Some(be)) = (alpha, beta) else {
                return Err(CliError::Usage("angle needs ALPHA and BETA unless --sweep is given".into()));
            };
            let r = angle_preserving_gadget(parse_complex(al)?, parse_complex(be)?).map_err(numeric)?;
            ok(Outcome::new(gadget_text(&r), &r))
        }
        Command::Bound { action, n, label, a, trials } => bound(*action, *n, label, *a, *trials, cfg),
        Command::Hide { action: HideAction::Demo, n, trials } => {
            check_qubits(*n, cfg)?;
            let d = run_demo(*n, *trials, cfg.seed).map_err(numeric)?;
            let h = format!(
                "hiding demo: n = {}, trials = {}\nunlock_rate {}\nfamily_leak_rate {}\npm_bit_rate {}\ntrace_security_max {}",
                d.n_qubits,
                d.trials,
                sig(d.unlock_rate),
                sig(d.family_leak_rate),
                sig(d.pm_bit_rate),
                sig(d.trace_security_max)
            );
            ok(Outcome::new(h, &d))
        }
    }
}

fn gadget_text(r: &GadgetResult) -> String {
    format!(
        "verdict: {:?}\ninitial Schmidt {}\nfinal Schmidt {}\nentropy {} -> {}\nA {} -> {}, B {} -> {}\nregion {}\nCardan residual {}",
        r.verdict,
        sig_vec(&r.initial_schmidt),
        sig_vec(&r.final_schmidt),
        sig(r.entropy_initial),
        sig(r.entropy_final),
        sig(r.a_initial),
        sig(r.a_final),
        sig(r.b_initial),
        sig(r.b_final),
        r.region,
        sig(r.cardan_residual)
    )
}

fn check_qubits(n: usize, cfg: &RunConfig) -> Result<(), CliError> {
    if n > MAX_QUBITS || (1usize << n) > cfg.max_dim {
        return Err(numeric(format!("{n} qubits exceed --max-dim {} or the limit of {MAX_QUBITS}", cfg.max_dim)));
    }
    Ok(())
}

fn bound(action: BoundAction, n: usize, label: &str, a: f64, trials: usize, cfg: &RunConfig) -> Result<(Outcome, bool), CliError> {
    match action {
        BoundAction::Build => {
            check_qubits(n, cfg)?;
            let fam = be_family(n).map_err(numeric)?;
            let mut h = format!("bound entangled family on {n} qubits\n");
            let mut members = Vec::new();
            for l in BeLabel::ALL {
                let st = fam.state(l);
                let purity = (st * st).trace().re;
                let r = fam.support_vectors[l.index()].len();
                let _ = writeln!(h, "{:<7} rank {r}, trace {}, purity {}", l.name(), sig(st.trace().re), sig(purity));
                members.push(json!({ "label": l.name(), "rank": r, "trace": st.trace().re, "purity": purity }));
            }
            Ok((Outcome::new(h, json!({ "n_qubits": n, "members": members })), false))
        }
        BoundAction::Verify => {
            check_qubits(n, cfg)?;
            let fam = be_family(n).map_err(numeric)?;
            let r = verify_family(&fam).map_err(numeric)?;
            let pass = r.all_pass();
            let mark = |b: bool| if b { "pass" } else { "FAIL" };
            let h = format!(
                "family report, n = {}\northogonal: {}\npermutation symmetric: {}\neven cuts PPT ({} cuts): {}\n\
                 single cuts NPT ({} cuts): {}\nPauli connected: {}\nsingle-qubit marginals maximally mixed: {}\n\
                 unlock: {}\nall cuts examined: {}\noverall: {}",
                r.n_qubits,
                mark(r.orthogonal),
                mark(r.permutation_symmetric),
                r.even_cuts.len(),
                mark(r.even_cut_ppt),
                r.single_cuts.len(),
                mark(r.single_vs_rest_npt),
                mark(r.pauli_connected),
                mark(r.reduced_max_mixed),
                mark(r.unlock_ok),
                yes_no(r.full),
                if pass { "all checks pass" } else { "FAILED" }
            );
            Ok((Outcome::new(h, json!({ "all_pass": pass, "report": r })), !pass))
        }
        BoundAction::Unlock => {
            check_qubits(n, cfg)?;
            let l = BeLabel::parse(label).map_err(|e: BoundError| CliError::Usage(e.to_string()))?;
            let fam = be_family(n).map_err(numeric)?;
            let u = unlock(&fam, l).map_err(numeric)?;
            let mut h = format!("unlocking {} on {n} qubits\n", l.name());
            for o in &u.outcomes {
                let _ = writeln!(
                    h,
                    "measured {:<7} p = {}  last pair {:?}  fidelity {}",
                    o.measured,
                    sig(o.probability),
                    o.predicted,
                    sig(o.fidelity)
                );
            }
            Ok((Outcome::new(h, &u), false))
        }
        BoundAction::Horodecki => {
            let rho = horodecki_state(a).map_err(numeric)?;
            let pa = is_ppt(&rho, &[0]).map_err(numeric)?;
            let pb = is_ppt(&rho, &[1]).map_err(numeric)?;
            let ins = is_ppt(&horodecki_insep(), &[0]).map_err(numeric)?;
            let r = rank(&rho)?;
            let h = format!(
                "2x4 state at a = {}\nrank {r}\nPPT on first factor: {} (min eigenvalue {})\n\
                 PPT on second factor: {} (min eigenvalue {})\ninseparable part PPT: {} (min eigenvalue {})",
                sig(a),
                yes_no(pa.ppt),
                sig(pa.min_eigenvalue),
                yes_no(pb.ppt),
                sig(pb.min_eigenvalue),
                yes_no(ins.ppt),
                sig(ins.min_eigenvalue)
            );
            Ok((Outcome::new(h, json!({ "a": a, "rank": r, "ppt_first": pa, "ppt_second": pb, "inseparable_part": ins })), false))
        }
        BoundAction::Upb => {
            let set = tiles_upb();
            let comp = upb_complement();
            let r = rank(&comp)?;
            let p = is_ppt(&comp, &[1]).map_err(numeric)?;
            let score = upb_unextendibility_score(trials, cfg.seed).map_err(numeric)?;
            let trunc = *product_overlap_scores(&set[..set.len() - 1], trials, cfg.seed)
                .map_err(numeric)?
                .last()
                .expect("nonempty");
            let h = format!(
                "Tiles set of {} product states\ncomplement rank {r}, PPT: {} (min eigenvalue {})\n\
                 best product weight on complement: {} over {trials} restarts\nwith one state dropped: {}",
                set.len(),
                yes_no(p.ppt),
                sig(p.min_eigenvalue),
                sig(score),
                sig(trunc)
            );
            let data = json!({
                "states": set.len(), "complement_rank": r, "complement_ppt": p,
                "score": score, "truncated_score": trunc, "trials": trials
            });
            Ok((Outcome::new(h, data), false))
        }
    }
}
