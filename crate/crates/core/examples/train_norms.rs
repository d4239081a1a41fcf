//! Parameter schedule, frequency sums, separation speed and the construction plan.

use nls_trains::train::functionals::{check_compete, norm_report, NormIndex};
use nls_trains::train::{gen_params, plan_construction, Directions, Group, ParamSchedule, PlanRequest, TrainSpec};

fn main() -> nls_trains::Result<()> {
    let sch = ParamSchedule { rho: 0.25, gamma_speed: 5.0, delta: 0.0, n: 3, omega_star: 16.0 };
    let sols = gen_params(&sch, 1, &Directions::Alternating)?;
    for s in &sols {
        println!("omega {:<10} v {:?}", s.omega, s.v);
    }
    let spec = TrainSpec::new(vec![Group { dim: 1, solitons: sols }], 0.9, 4.0 * 2f64.sqrt(), 16.0)?;
    let idx = [NormIndex::iso(1.0, 1), NormIndex::iso(2.0, 1), NormIndex::iso(f64::INFINITY, 1)];
    let rep = norm_report(&spec, &idx, 2.0)?;
    for e in &rep.a {
        println!("A_{} = {:.6}", e.index.p, e.value);
    }
    println!("v_* = {}", rep.vstar);
    let omegas = sch.omegas();
    let c = check_compete(&omegas, None, &idx[1], &idx[2], 2.0, 16.0)?;
    println!("A_inf = {:.4} < {:.4} = max(1, omega_*)^(1/alpha) A_2: {}", c.lhs, c.rhs, c.holds);

    for (dims, a1, a2) in [(vec![1], 2.0, 2.0), (vec![1, 2], 1.2, 1.2), (vec![1, 2, 3], 1.2, 1.2), (vec![1, 2], 3.0, 3.0)] {
        let plan = plan_construction(&PlanRequest { dims: dims.clone(), alpha1: a1, alpha2: a2, t0: 0.0, rho_ball: 1.0 });
        println!("{dims:?} alpha {a1}: {} admissible {} {:?}", plan.theorem.name(), plan.admissible, plan.violated_conditions);
    }
    Ok(())
}
