mod common;

use common::{client_server_classes, processor_resource, processor_resource_model, Ctmc, MODEL_A};
use gpa_core::analysis::{odes_table, Model, Options};
use gpa_core::lang::ast::OdesParams;
use gpa_core::moments::MomentIndex;
use gpa_core::runner::load_model;
use gpa_core::ssa::{propensities, run_simulation, SimulationConfig};

#[test]
fn uniformization_matches_death_process() {
    let ctmc = Ctmc::explore(vec![5], |x| vec![(vec![x[0] - 1], 0.7 * x[0] as f64)]);
    let times = [0.0, 0.5, 1.0, 3.0];
    for (t, p) in times.iter().zip(ctmc.transient(&times)) {
        let mean = ctmc.expect(&p, |s| s[0] as f64);
        assert!((mean - 5.0 * (-0.7 * t).exp()).abs() < 1e-10);
    }
}

#[test]
fn class_rates_match_hand_built_generator() {
    let model = load_model(&processor_resource_model(3, 2, 2.0, 14.0, 14.0, 2.0)).unwrap();
    let ctmc = processor_resource(3, 2, 2.0, 14.0, 14.0, 2.0);
    assert_eq!(ctmc.states.len(), 12);
    for (i, s) in ctmc.states.iter().enumerate() {
        let mut from_classes: Vec<(Vec<i64>, f64)> = model
            .classes
            .iter()
            .zip(propensities(&model.classes, s))
            .filter(|(_, r)| *r > 0.0)
            .map(|(c, r)| (s.iter().zip(&c.jump).map(|(a, b)| a + b).collect(), r))
            .collect();
        let mut expected: Vec<(Vec<i64>, f64)> = ctmc.transitions[i]
            .iter()
            .map(|(j, r)| (ctmc.states[*j].clone(), *r))
            .collect();
        from_classes.sort_by(|a, b| a.0.cmp(&b.0));
        expected.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(from_classes, expected, "state {s:?}");
    }
}

#[test]
fn client_server_propensities_match_table() {
    let model = load_model(&common::client_server_model(MODEL_A, 3, 2)).unwrap();
    let ctmc = Ctmc::explore(vec![3, 0, 0, 2, 0, 0], |x| {
        let v: Vec<f64> = x.iter().map(|a| *a as f64).collect();
        client_server_classes(MODEL_A, &v)
            .into_iter()
            .map(|(l, r)| (x.iter().zip(l).map(|(a, b)| a + b).collect(), r))
            .collect()
    });
    for s in &ctmc.states {
        let v: Vec<f64> = s.iter().map(|a| *a as f64).collect();
        let hand: Vec<f64> = client_server_classes(MODEL_A, &v).iter().map(|c| c.1).collect();
        assert_eq!(propensities(&model.classes, s), hand, "state {s:?}");
    }
}

#[test]
fn simulated_mean_matches_uniformization() {
    let model = load_model(&processor_resource_model(2, 1, 2.0, 14.0, 14.0, 2.0)).unwrap();
    let ctmc = processor_resource(2, 1, 2.0, 14.0, 14.0, 2.0);
    let reps = 10_000;
    let cfg = SimulationConfig { stop_time: 0.5, step_size: 0.05, replications: reps, seed: 0, threads: None };
    let ds = run_simulation(&model.classes, &model.idx, &cfg, &[MomentIndex::dim(0)]).unwrap();
    let exact = ctmc.transient(&ds.times);
    for (j, p) in exact.iter().enumerate() {
        let mean = ctmc.expect(p, |s| s[0] as f64);
        let var = ctmc.expect(p, |s| (s[0] as f64 - mean).powi(2));
        let se = (var / reps as f64).sqrt();
        let got = ds.columns[0].values[j];
        assert!((got - mean).abs() <= 3.0 * se + 1e-12, "t={} got {got} exact {mean}", ds.times[j]);
    }
}

/// Resources that never change state and always outpace the processors make
/// the min argument ordering uniform, so the closure is exact.
#[test]
fn closure_is_exact_without_switching() {
    let src = "r1 = 2.0; q = 3.0; r2 = 5.0; m = 3; n = 2;
        Processor0 = (acquire, r1).Processor1; Processor1 = (task, q).Processor0;
        Resource0 = (acquire, r2).Resource0;
        Processors{Processor0[m]} <acquire> Resources{Resource0[n]}";
    let model: Model = load_model(src).unwrap();
    let ctmc = Ctmc::explore(vec![3, 0, 2], |x| {
        vec![
            (vec![x[0] - 1, x[1] + 1, x[2]], (2.0 * x[0] as f64).min(5.0 * x[2] as f64)),
            (vec![x[0] + 1, x[1] - 1, x[2]], 3.0 * x[1] as f64),
        ]
    });
    let p = OdesParams { stop_time: 3.0, step_size: 0.1, density: 20 };
    let (_, mut table) = odes_table(&model, &p, 2, &Options::default()).unwrap();
    let exact = ctmc.transient(&table.times.clone());
    let mean = table.get(&MomentIndex::dim(0)).unwrap().to_vec();
    let square = table.get(&MomentIndex::new([(0, 2)])).unwrap().to_vec();
    for (j, pj) in exact.iter().enumerate() {
        let m = ctmc.expect(pj, |s| s[0] as f64);
        let m2 = ctmc.expect(pj, |s| (s[0] * s[0]) as f64);
        assert!((mean[j] - m).abs() < 1e-7, "mean at {j}: {} vs {m}", mean[j]);
        assert!((square[j] - m2).abs() < 1e-6, "square at {j}: {} vs {m2}", square[j]);
    }
}
