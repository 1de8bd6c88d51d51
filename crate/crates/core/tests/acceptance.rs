//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ricci4::special::{Convention, CurvatureFamily};
use ricci4::{
    check_invariants, conserved_quantities, constant_curvature_family, eguchi_hanson_jet, estimate_blowup,
    heisenberg_blowup_time, heisenberg_closed_form, hyperkahler_residuals, integrate, oracle_riemann, radius_grid,
    ratio_relation, ricci_components, run_case, table1_cases, taub_nut_jet, verify_backward_flow,
    verify_modified_flow, verify_ricci_flat, BlowupSearch, CaseRow, Direction, FlowConfig, FlowJet, FlowState,
    FrameMetricJet, Group, IntegratorSettings, Side, SignPattern, Termination,
};

type Outcome = Result<String, String>;

fn settings() -> IntegratorSettings<f64> {
    IntegratorSettings::default().with_tolerances(1e-10, 1e-12)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn table_rows_are_ricci_flat() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let (mut worst, mut worst_oracle) = (0.0f64, 0.0f64);
    for case in table1_cases() {
        for _ in 0..3 {
            let init = FlowState::initial(rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
            let report = run_case(&case, &init, 5.0, &settings(), 50, 1e-8).map_err(err)?;
            if !report.pass {
                return Err(format!("{} from {:?}: max |R| = {:.2e}", case.label(), init.coeffs(), report.max_abs_ricci));
            }
            worst = worst.max(report.max_abs_ricci);
            worst_oracle = worst_oracle.max(report.oracle_max_abs_ricci);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(
        worst < 1e-8 && worst_oracle < 1e-8 && elapsed < 10.0,
        format!("15 runs, max |R| {worst:.1e}, oracle {worst_oracle:.1e}, {elapsed:.2} s"),
    )
}

fn controls_are_not_flat() -> Outcome {
    let init = FlowState::initial(1.0, 2.0, 3.0);
    let e11 = CaseRow::new(Group::E11, Group::E11, SignPattern::ALL_PLUS);
    let traj = integrate(&FlowConfig::new(Group::E11), &init, 5.0, &settings()).map_err(err)?;
    let mut r22_dev = 0.0f64;
    for t in traj.sample_times(50) {
        let ric = ricci_components(&e11, &traj.jet_at(t).map_err(err)?).map_err(err)?;
        r22_dev = r22_dev.max((ric.r22 + 2.0).abs());
    }
    let sl2r = CaseRow::new(Group::SL2R, Group::SL2R, SignPattern::ALL_PLUS);
    let traj = integrate(&FlowConfig::new(Group::SL2R), &init, 5.0, &settings()).map_err(err)?;
    let report = verify_ricci_flat(&sl2r, &traj, 50, 1e-8).map_err(err)?;
    ensure(
        r22_dev < 1e-10 && report.max_abs_ricci > 0.1 && report.pass,
        format!("E(1,1)/+++ |R22 + 2| {r22_dev:.1e}; SL(2,R) own flow max |R| {:.3}", report.max_abs_ricci),
    )
}

fn heisenberg_matches_closed_form() -> Outcome {
    let cfg = FlowConfig::new(Group::H3);
    let mut worst = 0.0f64;
    let mut blowup_err = 0.0f64;
    for init in [FlowState::initial(1.0, 1.0, 1.0), FlowState::initial(1.0, 2.0, 3.0)] {
        let traj = integrate(&cfg, &init, 10.0, &settings()).map_err(err)?;
        for t in traj.sample_times(200) {
            let got = traj.state_at(t).map_err(err)?.coeffs();
            let want = heisenberg_closed_form(&init, t).map_err(err)?.coeffs();
            for i in 0..3 {
                worst = worst.max((got[i] - want[i]).abs() / want[i].abs());
            }
        }
        let expected = heisenberg_blowup_time(&init).map_err(err)?;
        match estimate_blowup(&cfg, &init, Side::Past, 10.0, &settings()).map_err(err)? {
            BlowupSearch::Finite(est) => blowup_err = blowup_err.max((est.time - expected).abs()),
            BlowupSearch::Open { .. } => return Err(format!("no blow-up found from {:?}", init.coeffs())),
        }
    }
    ensure(
        worst < 1e-9 && blowup_err < 1e-6,
        format!("max relative error {worst:.1e}, blow-up time error {blowup_err:.1e}"),
    )
}

fn invariants_are_conserved() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for group in [Group::H3, Group::E11, Group::E2] {
        let traj = integrate(&FlowConfig::new(group), &FlowState::initial(1.0, 2.0, 3.0), 10.0, &settings())
            .map_err(err)?;
        let drift = check_invariants(&traj, &conserved_quantities(group).invariants).map_err(err)?;
        let worst = drift.max_rel_drift();
        ok &= worst < 1e-10 && drift.undefined.is_empty() && traj.terminated == Termination::ReachedEnd;
        parts.push(format!("{group} {worst:.1e}"));
    }
    ensure(ok, format!("relative drift: {}", parts.join(", ")))
}

fn hyperkahler_forms_close() -> Outcome {
    let mut worst = 0.0f64;
    for group in [Group::H3, Group::E2] {
        for init in [FlowState::initial(1.0, 2.0, 3.0), FlowState::initial(2.5, 0.7, 1.3)] {
            let traj = integrate(&FlowConfig::new(group), &init, 5.0, &settings()).map_err(err)?;
            for t in traj.sample_times(50) {
                let res = hyperkahler_residuals(group, &traj.jet_at(t).map_err(err)?).map_err(err)?;
                worst = res.as_array().iter().fold(worst, |m, r| m.max(r.abs()));
            }
        }
    }
    let static_jet = FlowJet::stationary(FlowState::initial(1.7, 2.0, 3.0));
    let r1 = hyperkahler_residuals(Group::H3, &static_jet).map_err(err)?.r1;
    ensure(
        worst < 1e-10 && (r1 - 1.7f64).abs() < 1e-15,
        format!("max residual along flows {worst:.1e}; static H3 jet gives r1 = {r1}"),
    )
}

fn special_metrics_check() -> Outcome {
    let m = 1.0f64;
    let radii = radius_grid(m, 30);
    let backward = Convention { direction: Direction::Backward, scale: 1.0, offset: 0.0 };
    let (mut tn_ricci, mut tn_res, mut eh_ricci) = (0.0f64, 0.0f64, 0.0f64);
    for &r in &radii {
        let tn = taub_nut_jet(m, r).map_err(err)?;
        tn_ricci = tn_ricci.max(tn.ricci_max().map_err(err)?);
        tn_res = backward.residuals(&tn.jet).map_err(err)?.iter().fold(tn_res, |acc: f64, x: &f64| acc.max(x.abs()));
        eh_ricci = eh_ricci.max(eguchi_hanson_jet(m, r).map_err(err)?.ricci_max().map_err(err)?);
    }
    let tn_report = verify_backward_flow(m, &radii, 1e-10).map_err(err)?;
    let eh_report = verify_modified_flow(m, &radii, 1e-10).map_err(err)?;
    let eh_fit = eh_report
        .candidates
        .iter()
        .map(|c| c.max_residual)
        .fold(f64::INFINITY, f64::min);
    let eh_match = eh_report
        .matched_convention
        .map(|c| c.describe())
        .ok_or_else(|| "Eguchi-Hanson matched no convention".to_string())?;
    ensure(
        tn_ricci < 1e-10 && eh_ricci < 1e-10 && tn_res < 1e-12 && eh_fit < 1e-12 && tn_report.pass && eh_report.pass,
        format!(
            "Ricci TN {tn_ricci:.1e} EH {eh_ricci:.1e}; TN backward scale 1 residual {tn_res:.1e}; \
             EH matches {eh_match} ({eh_fit:.1e})"
        ),
    )
}

fn random_jet(rng: &mut ChaCha8Rng) -> FlowJet<f64> {
    let mut draw = |lo: f64, hi: f64| -> [f64; 3] { std::array::from_fn(|_| rng.gen_range(lo..hi)) };
    let f = draw(0.5, 3.0);
    let d1 = draw(-3.0, 3.0);
    let d2 = draw(-3.0, 3.0);
    FlowJet::new(FlowState::from_coeffs(0.0, f), d1, d2)
}

fn printed_formulas_match_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut ricci_err, mut sym_err) = (0.0f64, 0.0f64);
    for signs in [SignPattern::ALL_PLUS, SignPattern::PLUS_MINUS_MINUS, SignPattern::MINUS_MINUS_PLUS] {
        for k in 0..1000 {
            let group = match signs {
                SignPattern::PLUS_MINUS_MINUS => Group::E11,
                SignPattern::MINUS_MINUS_PLUS => Group::SL2R,
                _ => Group::ALL[k % Group::ALL.len()],
            };
            let case = CaseRow::new(group, group, signs);
            let jet = random_jet(&mut rng);
            let printed = ricci_components(&case, &jet).map_err(err)?;
            let riemann = oracle_riemann(&FrameMetricJet::from_flow_jet(group, signs, &jet)).map_err(err)?;
            let oracle = riemann.ricci();
            let diag = printed.diagonal();
            let scale = printed.max_abs().max(1.0);
            for j in 0..4 {
                for l in 0..4 {
                    let want = if j == l { diag[j] } else { 0.0 };
                    ricci_err = ricci_err.max((oracle[j][l] - want).abs() / scale);
                }
            }
            let size = (0..4)
                .flat_map(|i| (0..4).flat_map(move |j| (0..4).flat_map(move |k| (0..4).map(move |l| (i, j, k, l)))))
                .map(|(i, j, k, l)| riemann.lowered(i, j, k, l).abs())
                .fold(1.0f64, f64::max);
            for r in riemann.symmetry_residuals().into_iter().chain(riemann.bianchi_residuals()) {
                sym_err = sym_err.max(r.abs() / size);
            }
        }
    }
    ensure(
        ricci_err < 1e-12 && sym_err < 1e-13,
        format!("3000 jets, Ricci mismatch {ricci_err:.1e}, symmetry and Bianchi {sym_err:.1e}"),
    )
}

fn constant_curvature_families() -> Outcome {
    let mut worst = 0.0f64;
    for family in [CurvatureFamily::Sin, CurvatureFamily::Sinh, CurvatureFamily::Linear] {
        let k: f64 = family.curvature().expect("family has constant curvature");
        for n in 0..20 {
            let t = 0.1 + 2.9 * n as f64 / 19.0;
            let riemann = oracle_riemann(&constant_curvature_family(family, t)).map_err(err)?;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    worst = worst.max((riemann.sectional(i, j) - k).abs());
                }
            }
        }
    }
    ensure(worst < 1e-10, format!("max |K - k| {worst:.1e} over 20 times per family"))
}

/// Checks `b = predicted_b(a/c)` and monotone approach of `a/c` to 1.
fn ratio_check(group: Group, init: FlowState<f64>) -> Result<(f64, bool, f64, f64), String> {
    let relation = ratio_relation(group, &init).map_err(err)?;
    let traj = integrate(&FlowConfig::new(group), &init, 10.0, &settings()).map_err(err)?;
    if traj.terminated != Termination::ReachedEnd {
        return Err(format!("{group} flow stopped early: {:?}", traj.terminated));
    }
    let (mut worst, mut monotone, mut b_max) = (0.0f64, true, 0.0f64);
    let mut prev_gap = (init.a / init.c - 1.0).abs();
    let side = (init.a / init.c - 1.0).signum();
    for t in traj.sample_times(200) {
        let s = traj.state_at(t).map_err(err)?;
        let rho = s.a / s.c;
        worst = worst.max((relation.predicted_b(rho) - s.b).abs() / s.b.abs());
        let gap = (rho - 1.0).abs();
        monotone &= gap <= prev_gap * (1.0 + 1e-12) && (rho - 1.0).signum() == side;
        prev_gap = gap;
        b_max = b_max.max(s.b.abs());
    }
    Ok((worst, monotone, prev_gap, b_max))
}

fn ratio_relations_hold() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for init in [FlowState::initial(1.0, 2.0, 3.0), FlowState::initial(2.0, 1.0, 0.5)] {
        let (err11, mono11, gap11, _) = ratio_check(Group::E11, init)?;
        let (err2, mono2, gap2, bmax2) = ratio_check(Group::E2, init)?;
        let bound = ratio_relation(Group::E2, &init).map_err(err)?.constant / 2.0;
        ok &= err11 < 1e-8 && mono11 && err2 < 1e-8 && mono2 && gap2 < 1e-2 * (init.a / init.c - 1.0).abs() && bmax2 <= bound * (1.0 + 1e-9);
        parts.push(format!(
            "{:?}: E(1,1) {err11:.1e} gap {gap11:.1e}, E(2) {err2:.1e} gap {gap2:.1e} b <= {bmax2:.3}",
            init.coeffs()
        ));
    }
    ensure(ok, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 table rows Ricci-flat along their flows", table_rows_are_ricci_flat),
        ("2 non-flat controls", controls_are_not_flat),
        ("3 Heisenberg closed form and blow-up time", heisenberg_matches_closed_form),
        ("4 conserved quantities", invariants_are_conserved),
        ("5 hyper-Kahler closure", hyperkahler_forms_close),
        ("6 Taub-NUT and Eguchi-Hanson", special_metrics_check),
        ("7 printed curvature vs independent oracle", printed_formulas_match_oracle),
        ("8 constant-curvature families", constant_curvature_families),
        ("9 ratio first integrals", ratio_relations_hold),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
