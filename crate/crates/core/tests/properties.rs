use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use proptest::prelude::*;

use nls_trains::estimates::{lp_norm, source_h, GridNorm};
use nls_trains::evolution::strichartz::{choose_n1_exponents, StrichartzPair};
use nls_trains::evolution::{free_propagate, Scheme, SplitStep};
use nls_trains::nonlinearity::alpha_max;
use nls_trains::nonlinearity::oracle::young_holds;
use nls_trains::solitons::SolitonParams;
use nls_trains::train::functionals::{check_compete, compute_a, in_ca, NormIndex};
use nls_trains::train::plan::{plan_for, Theorem};
use nls_trains::train::{gen_params, vstar_within, BoundStateCache, Directions, Group, ParamSchedule, PlanRequest, Train};
use nls_trains::{Field, Grid, Nonlinearity, C64};

fn big(n: i64, d: i64) -> BigRational {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

fn violated(theorem: Theorem, req: &PlanRequest) -> BTreeSet<String> {
    plan_for(theorem, req).violated_conditions.into_iter().collect()
}

fn gaussian(grid: &Grid, centre: f64, width: f64, k: f64) -> Field {
    Field::from_fn(grid, 0.0, |x| {
        let r2: f64 = x.iter().take(grid.dim()).map(|c| (c - centre).powi(2)).sum();
        C64::from_polar((-r2 / width).exp(), k * x[0])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn plan_violations_grow_with_alpha2(
        dims in prop_oneof![Just(vec![1]), Just(vec![2]), Just(vec![3]), Just(vec![1, 2]), Just(vec![1, 3]), Just(vec![1, 2, 3])],
        alpha1 in 0.2f64..2.5,
        a2 in 0.0f64..3.0,
        extra in 0.0f64..3.0,
        t0 in 0.0f64..2.0,
    ) {
        let theorems = [Theorem::Single1, Theorem::Single2, Theorem::Mixed0, Theorem::Mixed1, Theorem::Train123];
        let lo = PlanRequest { dims: dims.clone(), alpha1, alpha2: alpha1 + a2, t0, rho_ball: 1.0 };
        let hi = PlanRequest { alpha2: alpha1 + a2 + extra, ..lo.clone() };
        for th in theorems {
            let (v_lo, v_hi) = (violated(th, &lo), violated(th, &hi));
            prop_assert!(v_lo.is_subset(&v_hi), "{th:?}: {v_lo:?} -> {v_hi:?}");
        }
    }

    #[test]
    fn holder_interpolation_on_grid_fields(
        re in prop::collection::vec(-5.0f64..5.0, 64),
        im in prop::collection::vec(-5.0f64..5.0, 64),
        s in 0.3f64..4.0,
        gap in 0.01f64..6.0,
    ) {
        let grid = Grid::uniform(1, 64, 3.0).unwrap();
        let u = Field::new(&grid, 0.0, re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect()).unwrap();
        let r = s + gap;
        let nr = lp_norm(&u, &GridNorm::lp(r)).unwrap();
        let ns = lp_norm(&u, &GridNorm::lp(s)).unwrap();
        let sup = u.sup();
        prop_assert!(nr <= ns.powf(s / r) * sup.powf(1.0 - s / r) * (1.0 + 1e-12));
    }

    #[test]
    fn mixed_norm_of_separable_field_factorises(
        p in prop_oneof![0.5f64..8.0, Just(f64::INFINITY)],
        q in prop_oneof![0.5f64..8.0, Just(f64::INFINITY)],
        wx in 0.5f64..4.0,
        wy in 0.5f64..4.0,
        k in -2.0f64..2.0,
    ) {
        let g2 = Grid::new(vec![32, 16], vec![6.0, 5.0]).unwrap();
        let gx = Grid::uniform(1, 32, 6.0).unwrap();
        let gy = Grid::uniform(1, 16, 5.0).unwrap();
        let fx = |x: f64| C64::from_polar((-x * x / wx).exp(), k * x);
        let fy = |y: f64| (-(y - 0.3).powi(2) / wy).exp() + 0.1;
        let u = Field::from_fn(&g2, 0.0, |x| fx(x[0]) * fy(x[1]));
        let ux = Field::from_fn(&gx, 0.0, |x| fx(x[0]));
        let uy = Field::from_fn(&gy, 0.0, |x| C64::new(fy(x[0]), 0.0));
        let mixed = lp_norm(&u, &GridNorm::mixed(p, q, 1)).unwrap();
        let product = lp_norm(&ux, &GridNorm::lp(p)).unwrap() * lp_norm(&uy, &GridNorm::lp(q)).unwrap();
        prop_assert!((mixed - product).abs() <= 1e-12 * product);
    }

    #[test]
    fn admissible_pairs_scale_exactly(d in 1usize..=3, num in 0i64..=60) {
        // 1/r ranges over [1/r_max, 1/2] in steps of 1/120
        let r_inv = Ratio::new(num, 120);
        let lo = nls_trains::evolution::strichartz::r_max_inv(d);
        prop_assume!(r_inv >= lo && r_inv <= Ratio::new(1, 2) && !(d == 2 && r_inv == lo));
        let pair = StrichartzPair::from_r_inv(d, r_inv).unwrap();
        prop_assert!(pair.is_admissible());
        prop_assert_eq!(Ratio::from_integer(2) * pair.q_inv + Ratio::from_integer(d as i64) * pair.r_inv, Ratio::new(d as i64, 2));
    }

    #[test]
    fn n1_exponents_valid(d in 1usize..=3, frac in 0.001f64..0.999) {
        let m = if d == 3 { frac * alpha_max(3) } else { 8.0 * frac };
        let c = choose_n1_exponents(d, m).unwrap();
        prop_assert!(c.mu > 0.0);
        prop_assert!(c.b1() && c.b2() && c.p_range());
    }

    #[test]
    fn young_step_holds(x in 0.0f64..1e3, y in 0.0f64..1e3, theta in 0.0f64..=1.0) {
        prop_assert!(young_holds(x, y, theta));
    }

    #[test]
    fn wirtinger_matches_finite_differences(
        alpha1 in 0.5f64..3.0,
        alpha2 in 0.5f64..3.0,
        c in 0.0f64..2.0,
        r in 0.2f64..3.0,
        ang in 0.0f64..std::f64::consts::TAU,
    ) {
        let nl = Nonlinearity::new(alpha1.min(alpha2), alpha1.max(alpha2), c, 1).unwrap();
        let z = C64::from_polar(r, ang);
        let w = nl.eval_wirtinger(z);
        let h = 1e-6;
        let dx = (nl.eval_f(z + h) - nl.eval_f(z - h)) / (2.0 * h);
        let dy = (nl.eval_f(z + C64::new(0.0, h)) - nl.eval_f(z - C64::new(0.0, h))) / (2.0 * h);
        let fz = (dx - C64::i() * dy) / 2.0;
        let fzbar = (dx + C64::i() * dy) / 2.0;
        let scale = w.fz.norm() + w.fzbar.norm();
        prop_assert!((fz - w.fz).norm() <= 1e-5 * scale);
        prop_assert!((fzbar - w.fzbar).norm() <= 1e-5 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn compete_holds_on_admissible_draws(
        omegas in prop::collection::vec(0.001f64..1.0, 1..12),
        omega_star in 0.5f64..20.0,
        alpha1 in 0.3f64..3.0,
        d in 1usize..=3,
        p_off in 0.01f64..4.0,
        q_gap in 0.01f64..10.0,
    ) {
        let omegas: Vec<f64> = omegas.iter().map(|w| w * omega_star).collect();
        // smallest p in C_A is d α₁ / 2
        let p = NormIndex::iso(d as f64 * alpha1 / 2.0 + p_off, d);
        let q = NormIndex::iso(p.p + q_gap, d);
        prop_assume!(in_ca(&p, alpha1));
        let r = check_compete(&omegas, None, &p, &q, alpha1, omega_star).unwrap();
        prop_assert!(r.holds, "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn schedule_vstar_exceeds_lambda_exactly(
        rho_den in 2i64..=12,
        root_num in 1i64..=6,
        root_den in 1i64..=6,
        lambda_num in 1i64..=50,
        slack_num in 0i64..=10,
        n in 2usize..=6,
    ) {
        // ω_* = root² ≤ 1 so √ω_j stays rational
        prop_assume!(root_num <= root_den);
        let rho = big(1, rho_den);
        let root = big(root_num, root_den);
        let lambda = big(lambda_num, 1);
        let gamma = big(2, 1) * &lambda / &root + big(slack_num, 10);
        let speeds: Vec<BigRational> = (1..=n as i32)
            .map(|j| (2..=j).fold(big(0, 1), |acc, l| acc + rho.pow(-l)) * &gamma)
            .collect();
        let v: Vec<BigRational> = speeds.iter().enumerate().map(|(j, s)| if j % 2 == 0 { s.clone() } else { -s.clone() }).collect();
        let sqrt_w: Vec<BigRational> = (1..=n as i32).map(|j| &root * rho.pow(j)).collect();
        let one = big(1, 1);
        let mut vstar: Option<BigRational> = None;
        for j in 0..n {
            for k in j + 1..n {
                let m = [one.clone(), sqrt_w[j].clone(), sqrt_w[k].clone()].into_iter().min().unwrap();
                let gap = &v[j] - &v[k];
                let gap = if gap < big(0, 1) { -gap } else { gap };
                let term = big(1, 2) * m * gap;
                vstar = Some(match vstar { Some(x) if x < term => x, _ => term });
            }
        }
        let vstar = vstar.unwrap();
        prop_assert!(vstar >= lambda);

        // the floating-point schedule agrees with the exact value
        let f = |r: &BigRational| r.numer().to_string().parse::<f64>().unwrap() / r.denom().to_string().parse::<f64>().unwrap();
        let sch = ParamSchedule { rho: f(&rho), gamma_speed: f(&gamma), delta: 0.0, n, omega_star: f(&root).powi(2) };
        let sols = gen_params(&sch, 1, &Directions::Alternating).unwrap();
        prop_assert!((vstar_within(&sols) - f(&vstar)).abs() <= 1e-9 * f(&vstar));
    }

    #[test]
    fn a_decreases_with_rho(
        rho in 0.05f64..0.9,
        shrink in 0.1f64..0.95,
        omega_star in 0.1f64..10.0,
        alpha1 in 0.3f64..3.0,
        d in 1usize..=3,
        p_off in 0.01f64..4.0,
        n in 1usize..10,
    ) {
        let p = NormIndex::iso(d as f64 * alpha1 / 2.0 + p_off, d);
        let sch = |rho| ParamSchedule { rho, gamma_speed: 1.0, delta: 0.0, n, omega_star };
        let a_big = compute_a(&sch(rho).omegas(), &p, alpha1);
        let a_small = compute_a(&sch(rho * shrink).omegas(), &p, alpha1);
        prop_assert!(a_big.is_finite() && a_small < a_big);
    }

    #[test]
    fn free_propagation_inverts(width in 0.5f64..4.0, k in -3.0f64..3.0, dt in 0.01f64..2.0, d in 1usize..=2) {
        let grid = Grid::uniform(d, if d == 1 { 256 } else { 32 }, 12.0).unwrap();
        let u = gaussian(&grid, 0.5, width, k);
        let back = free_propagate(&free_propagate(&u, dt).unwrap(), -dt).unwrap();
        prop_assert!(back.sub(&u).unwrap().l2() <= 1e-12 * u.l2().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn split_step_conserves_mass(
        amp in 0.2f64..2.0,
        width in 0.5f64..3.0,
        k in -2.0f64..2.0,
        alpha in 0.5f64..3.0,
        strang in any::<bool>(),
    ) {
        let grid = Grid::uniform(1, 256, 20.0).unwrap();
        let mut u = gaussian(&grid, 0.0, width, k);
        u.data.iter_mut().for_each(|z| *z *= amp);
        let scheme = if strang { Scheme::Strang } else { Scheme::Yoshida4 };
        let ss = SplitStep::new(&grid, Nonlinearity::pure(alpha, 1).unwrap(), scheme);
        let s = ss.evolve(&u, 1e-3, 400, 100, |_, _| Ok(())).unwrap();
        prop_assert!(s.max_mass_drift <= 1e-10);
    }

    #[test]
    fn interaction_peak_falls_with_separation(omega in 0.5f64..2.0, base in 4.0f64..6.0, step in 0.5f64..2.0) {
        let nl = Nonlinearity::pure(2.0, 1).unwrap();
        let cache = BoundStateCache::new(nl, 1e-6);
        let grid = Grid::uniform(1, 2048, 40.0).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..5 {
            let sep = base + step * k as f64;
            let sols = vec![
                SolitonParams::new(omega, vec![0.0], vec![-sep / 2.0], 0.0).unwrap(),
                SolitonParams::new(omega, vec![0.0], vec![sep / 2.0], 0.0).unwrap(),
            ];
            let train = Train::build(&Group { dim: 1, solitons: sols }, &cache).unwrap();
            let peak = source_h(&train, &nl, &grid, 0.0).unwrap().abs().iter().fold(0.0f64, |m, a| m.max(*a));
            prop_assert!(peak < last, "separation {sep}: {peak} >= {last}");
            last = peak;
        }
    }
}
