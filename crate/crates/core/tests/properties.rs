use dccut_core::cutgen::{dc_cut_type1, dc_cut_type2, eval_l, lap_cut, select_fractional_indices};
use dccut_core::dca::{dca_solve, penalized_objective, penalty_p};
use dccut_core::simplex::solve_lp_from;
use dccut_core::verify::{
    audit_cut, audit_run, best_completion, brute_force_solve, compute_t1, enumerate_vertices_with,
    random_instance, Arithmetic, AuditMode, CorpusParams,
};
use dccut_core::*;
use proptest::prelude::*;

fn small() -> CorpusParams {
    CorpusParams {
        max_n: 5,
        max_q: 2,
        max_m: 5,
        coef: 10,
    }
}

fn tiny_instance() -> impl Strategy<Value = MblpInstance> {
    any::<u64>().prop_map(|seed| random_instance(seed, &small()))
}

fn tiny_binary_instance() -> impl Strategy<Value = MblpInstance> {
    any::<u64>().prop_map(|seed| {
        random_instance(
            seed,
            &CorpusParams {
                max_q: 0,
                ..small()
            },
        )
    })
}

/// A point of the box `[0, 1]^n x [0, ybar]` from unit-interval samples.
fn box_point(inst: &MblpInstance, unit: &[f64]) -> Point {
    let n = inst.n();
    let x = unit[..n].to_vec();
    let y = unit[n..n + inst.q()]
        .iter()
        .zip(inst.ybar())
        .map(|(s, hi)| s * hi)
        .collect();
    Point::new(x, y)
}

fn units() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 8)
}

fn relaxation_optimum(state: &PolyState<'_>) -> Option<Point> {
    let inst = state.base();
    let sol = solve_lp(&state.linear_program(inst.cost()))
        .ok()?
        .optimal()?;
    Some(Point::from_stacked(inst.n(), &sol.x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn s_is_inside_k(inst in tiny_instance(), bits in any::<u8>(), unit in units()) {
        let state = PolyState::new(&inst);
        let mut u = box_point(&inst, &unit);
        for (i, x) in u.x.iter_mut().enumerate() {
            *x = f64::from((bits >> i) & 1);
        }
        if state.is_in_s(&u, &Tolerances::default()) {
            prop_assert!(state.is_in_k(&u, Tolerances::default().feas_tol));
        }
    }

    #[test]
    fn cuts_never_enlarge_k(
        inst in tiny_instance(),
        unit in units(),
        coeffs in prop::collection::vec(-5.0f64..5.0, 8),
        rhs in -5.0f64..5.0,
    ) {
        let state = PolyState::new(&inst);
        let u = box_point(&inst, &unit);
        let cut = Cut::new(coeffs[..inst.dim()].to_vec(), rhs, CutKind::Lap, u.clone(), 0);
        let refined = PolyState::with_cuts(&inst, vec![cut], 1);
        if refined.is_in_k(&u, 1e-9) {
            prop_assert!(state.is_in_k(&u, 1e-9));
        }
    }

    #[test]
    fn simplex_matches_vertex_enumeration(
        inst in tiny_instance(),
        obj in prop::collection::vec(-10.0f64..10.0, 7),
    ) {
        let state = PolyState::new(&inst);
        let objective = obj[..inst.dim()].to_vec();
        let lp = state.linear_program(objective.clone());
        let outcome = solve_lp(&lp).unwrap();
        let vs = enumerate_vertices_with(&state, 16, Arithmetic::Float).unwrap();
        match outcome.clone().optimal() {
            Some(sol) => {
                prop_assert!(lp.max_violation(&sol.x) <= 1e-9 * 10.0);
                let best = vs
                    .vertices
                    .iter()
                    .map(|v| v.coords().zip(&objective).map(|(a, b)| a * b).sum::<f64>())
                    .fold(f64::INFINITY, f64::min);
                prop_assert!((best - sol.value).abs() <= 1e-8 * (1.0 + best.abs()), "{best} vs {}", sol.value);
            }
            None => prop_assert!(vs.is_empty()),
        }
        // Deterministic: the same input gives the same basis and point.
        prop_assert_eq!(solve_lp(&lp).unwrap(), outcome);
    }

    #[test]
    fn warm_starts_match_cold_solves(
        inst in tiny_instance(),
        obj in prop::collection::vec(-10.0f64..10.0, 7),
        other in prop::collection::vec(-10.0f64..10.0, 7),
        cut in prop::collection::vec(-5.0f64..5.0, 7),
        rhs in -3.0f64..3.0,
    ) {
        let state = PolyState::new(&inst);
        let dim = inst.dim();
        let lp = state.linear_program(obj[..dim].to_vec());
        let Some(first) = solve_lp(&lp).unwrap().optimal() else { return Ok(()) };
        let opts = SimplexOptions::default();
        let agree = |lp: &LinearProgram| -> Result<(), TestCaseError> {
            let Some(hot) = solve_lp_from(lp, &first, &opts).unwrap() else { return Ok(()) };
            let cold = solve_lp(lp).unwrap();
            match (hot.optimal(), cold.optimal()) {
                (Some(h), Some(c)) => {
                    prop_assert!((h.value - c.value).abs() <= 1e-8 * (1.0 + c.value.abs()), "{} vs {}", h.value, c.value);
                    prop_assert!(lp.max_violation(&h.x) <= 1e-8);
                }
                (h, c) => prop_assert_eq!(h.is_some(), c.is_some()),
            }
            Ok(())
        };
        // New objective: primal restart.
        let mut changed = lp.clone();
        changed.set_objective(other[..dim].to_vec());
        agree(&changed)?;
        // Appended row: dual restart.
        let mut cut_lp = lp.clone();
        cut_lp.add_row(&cut[..dim], rhs);
        agree(&cut_lp)?;
    }

    #[test]
    fn dca_descends_through_vertices(inst in tiny_instance(), unit in units(), t in 0.0f64..50.0) {
        let state = PolyState::new(&inst);
        let u0 = box_point(&inst, &unit);
        let Ok(res) = dca_solve(&state, &u0, &DcaOptions::with_t(t)) else { return Ok(()) };
        let vs = enumerate_vertices_with(&state, 16, Arithmetic::Float).unwrap();
        // Each vertex is visited at most once; the final LP only confirms
        // the fixed point.
        let mut visited: Vec<&Point> = Vec::new();
        for u in &res.iterates[1..] {
            if !visited.iter().any(|v| v.distance(u) <= 1e-7) {
                visited.push(u);
            }
        }
        prop_assert!(visited.len() <= vs.len());
        prop_assert!(res.iterations <= vs.len() + 1);
        let taus: Vec<f64> = res.iterates.iter().map(|u| penalized_objective(&inst, t, u)).collect();
        for w in taus[1..].windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0].abs()), "tau rose: {:?}", taus);
        }
        for u in &res.iterates[1..] {
            prop_assert!(vs.contains(u, 1e-6), "iterate {:?} is not a vertex", u);
        }
    }

    #[test]
    fn dca_with_zero_t_is_one_lp(inst in tiny_binary_instance(), unit in units()) {
        let state = PolyState::new(&inst);
        let u0 = box_point(&inst, &unit);
        let Ok(res) = dca_solve(&state, &u0, &DcaOptions::with_t(0.0)) else { return Ok(()) };
        let lp = relaxation_optimum(&state).unwrap();
        prop_assert!((inst.evaluate_f(&res.point) - inst.evaluate_f(&lp)).abs() <= 1e-9);
        prop_assert!(res.iterations <= 2);
    }

    #[test]
    fn affine_majorant_of_the_penalty(
        a in prop::collection::vec(0.0f64..=1.0, 6),
        b in prop::collection::vec(0.0f64..=1.0, 6),
    ) {
        let star = Point::from_x(a);
        let u = Point::from_x(b);
        prop_assert!((eval_l(&star, &star) - penalty_p(&star)).abs() <= 1e-12);
        prop_assert!(eval_l(&star, &u) >= penalty_p(&u) - 1e-12);
        prop_assert!(penalty_p(&u) >= 0.0);
    }

    #[test]
    fn affine_majorant_on_binary_points(a in any::<u8>(), b in any::<u8>()) {
        let bin = |bits: u8| Point::from_x((0..6).map(|i| f64::from((bits >> i) & 1)).collect());
        let (star, u) = (bin(a), bin(b));
        prop_assert_eq!(eval_l(&star, &star), 0.0);
        if star != u {
            let l = eval_l(&star, &u);
            prop_assert!(l >= 1.0 && l.fract() == 0.0);
        }
    }

    #[test]
    fn lift_and_project_cuts_are_valid(inst in tiny_instance()) {
        let state = PolyState::new(&inst);
        let Some(u) = relaxation_optimum(&state) else { return Ok(()) };
        for j in select_fractional_indices(&u, inst.n()) {
            if let Some(cut) = lap_cut(&state, &u, j, 1e-6).unwrap() {
                prop_assert!(cut.slack(&u) < -1e-6);
                prop_assert!(audit_cut(&state, &cut, AuditMode::Global, 1e-6).unwrap().is_valid());
            }
        }
    }

    #[test]
    fn type_one_cuts_keep_better_points(inst in tiny_instance(), bits in any::<u8>()) {
        let x: Vec<f64> = (0..inst.n()).map(|i| f64::from((bits >> i) & 1)).collect();
        let Some((value, u)) = best_completion(&inst, &x).unwrap() else { return Ok(()) };
        let cut = dc_cut_type1(&u, 1e-6, 0).unwrap();
        let state = PolyState::new(&inst);
        prop_assert!(audit_cut(&state, &cut, AuditMode::BetterThan(value), 1e-6).unwrap().is_valid());
    }

    #[test]
    fn solver_agrees_with_brute_force(inst in tiny_instance()) {
        let report = dccut_solve(&inst, &SolverConfig::default()).unwrap();
        let trace_lb: Vec<f64> = report.trace.iter().map(|r| r.lb).collect();
        for w in trace_lb.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        prop_assert!(dccut::no_duplicate_dc_cuts(&report.cuts));
        if let Some(u) = &report.u_opt {
            prop_assert!(PolyState::new(&inst).is_in_s(u, &Tolerances::default()));
        }
        prop_assert_eq!(dccut_solve(&inst, &SolverConfig::default()).unwrap().trace, report.trace.clone());
        // Exactness is only guaranteed once t clears the penalty threshold.
        let vs = enumerate_vertices_with(&PolyState::new(&inst), 16, Arithmetic::Float).unwrap();
        if vs.is_empty() || compute_t1(&inst, &vs).map_or(true, |b| b.t1 >= 500.0) {
            return Ok(());
        }
        match brute_force_solve(&inst).unwrap().value() {
            Some(v) => prop_assert!((v - report.ub).abs() <= 1e-6, "{v} vs {}", report.ub),
            None => prop_assert_eq!(report.status, SolveStatus::Infeasible),
        }
    }

    #[test]
    fn type_two_cuts_are_valid_above_the_threshold(inst in tiny_instance()) {
        let vs = enumerate_vertices_with(&PolyState::new(&inst), 16, Arithmetic::Float).unwrap();
        let Ok(t1) = compute_t1(&inst, &vs) else { return Ok(()) };
        prop_assume!(t1.t1.is_finite() && t1.t1 < 1e5);
        let cfg = SolverConfig { t: t1.t1 * 1.01 + 1.0, ..SolverConfig::default() };
        let report = dccut_solve(&inst, &cfg).unwrap();
        // Audited against the region each cut was generated on.
        let all = audit_run(&inst, &report.cuts, &vec![AuditMode::Global; report.cuts.len()], 1e-6).unwrap();
        for (cut, verdict) in report.cuts.iter().zip(&all) {
            if cut.kind == CutKind::Dc2 {
                prop_assert!(verdict.is_valid(), "{:?} {:?}", cut, verdict);
            }
        }
    }

    #[test]
    fn type_two_cut_needs_a_fractional_point(a in prop::collection::vec(0.0f64..=1.0, 5)) {
        let u = Point::from_x(a);
        if let Some(cut) = dc_cut_type2(&u, 1e-9, 1e-6, 0) {
            prop_assert!(cut.slack(&u) < 0.0);
            prop_assert!(cut.coeffs.iter().all(|c| c.abs() == 1.0));
        }
    }
}
