use proptest::prelude::*;

use ndcolor::finisher::{finish, FinisherConfig};
use ndcolor::instance::{color_degree, max_member_color_degree, verify_coloring};
use ndcolor::lab::constructions::{random_family, random_linear_hypergraph};
use ndcolor::lab::exact::{exact_expectations, DEFAULT_BUDGET};
use ndcolor::nibble::{nibble_round, RoundMode};
use ndcolor::normalizer::pad_lists;
use ndcolor::pipeline::{line_graph_union, run_pipeline, PipelineConfig};
use ndcolor::schedule::NibbleParams;
use ndcolor::{Assignment, Mode, PartialColoring, UnionInstance};

fn family() -> impl Strategy<Value = UnionInstance> {
    (2usize..=4, 1usize..=3, 0.2f64..0.9, any::<u64>()).prop_map(|(m, k, p, s)| random_family(m, k, p, s).unwrap())
}

fn lists_for(inst: &UnionInstance, extra: usize) -> Assignment {
    let d = max_member_color_degree(inst, &Assignment::uniform(inst, 1, inst.num_vertices().max(1)), Mode::List);
    Assignment::uniform(inst, 1, ((3 * d).div_ceil(2)).max(1) + extra)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pipeline_output_is_proper_and_total(inst in family(), extra in 0usize..3, seed in any::<u64>()) {
        let asg = lists_for(&inst, extra);
        let run = run_pipeline(&inst, &asg, &PipelineConfig { seed, ..PipelineConfig::default() }).unwrap();
        if run.succeeded() {
            prop_assert!(run.coloring.is_total());
            prop_assert!(verify_coloring(&inst, &asg, &run.coloring, Mode::List).is_pass());
        }
    }

    #[test]
    fn practical_round_keeps_the_list_contract(inst in family(), seed in any::<u64>(), p in 0.05f64..1.0) {
        let asg = lists_for(&inst, 1);
        let params = NibbleParams::new(asg.list(0).len() as f64, 1.0, inst.c_bound(), p, 0.5).unwrap();
        let out = nibble_round(&inst, &asg, Mode::List, &params, RoundMode::Practical, seed, 0).unwrap();
        prop_assert!(verify_coloring(&inst, &asg, &out.phi, Mode::List).is_pass());
        for v in 0..inst.num_vertices() {
            if out.in_x[v] {
                continue;
            }
            for &u in inst.neighbors(v) {
                if let Some(c) = out.phi.get(u) {
                    prop_assert!(!out.new_lists[v].contains(&c));
                }
            }
            prop_assert!(out.new_lists[v].iter().all(|c| asg.list(v).contains(c)));
        }
    }

    #[test]
    fn identity_matchings_reproduce_list_rounds(inst in family(), seed in any::<u64>()) {
        let asg = lists_for(&inst, 0);
        let dp = Assignment::identity_matchings(&inst, asg.lists().to_vec()).unwrap();
        let params = NibbleParams::new(asg.list(0).len() as f64, 1.0, inst.c_bound(), 0.3, 0.5).unwrap();
        let a = nibble_round(&inst, &asg, Mode::List, &params, RoundMode::Practical, seed, 0).unwrap();
        let b = nibble_round(&inst, &dp, Mode::Dp, &params, RoundMode::Practical, seed, 0).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pad_lists_keeps_color_degrees(inst in family(), grow in 0usize..4) {
        let asg = lists_for(&inst, 0);
        let target = asg.list(0).len() + grow;
        let padded = pad_lists(&inst, &asg, target).unwrap();
        for v in 0..inst.num_vertices() {
            prop_assert_eq!(padded.list(v).len(), target);
            for &gi in inst.membership(v) {
                for &c in asg.list(v) {
                    prop_assert_eq!(
                        color_degree(&inst, &asg, Mode::List, gi, v, c).unwrap(),
                        color_degree(&inst, &padded, Mode::List, gi, v, c).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn finisher_output_verifies(inst in family(), seed in any::<u64>()) {
        let asg = lists_for(&inst, 2);
        let cfg = FinisherConfig { force: true, ..FinisherConfig::default() };
        let rep = finish(&inst, &asg, Mode::List, &cfg, seed).unwrap();
        if let Some(col) = &rep.coloring {
            prop_assert!(verify_coloring(&inst, &asg, col, Mode::List).is_pass());
        }
    }

    #[test]
    fn enumeration_weights_sum_to_one(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let inst = random_family(2, 2, 0.7, seed).unwrap();
        let asg = Assignment::uniform(&inst, 1, 2);
        if let Ok(r) = exact_expectations(&inst, &asg, Mode::List, p, DEFAULT_BUDGET) {
            prop_assert!((r.weight_sum - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn line_graphs_of_generated_hypergraphs_validate() {
    for seed in 0..100 {
        let k = 2 + (seed as usize % 3);
        let g = random_linear_hypergraph(40, k, 6, seed).unwrap();
        assert!(g.hypergraph.check_linear().is_ok());
        assert!(g.hypergraph.max_degree() <= 6);
        let (inst, _) = line_graph_union(&g.hypergraph).unwrap();
        assert!(inst.validate().is_pass(), "seed {seed}");
        assert!((0..inst.num_vertices()).all(|v| inst.membership(v).len() <= k));
    }
}

#[test]
fn pipeline_is_deterministic_per_seed() {
    let g = random_linear_hypergraph(60, 3, 8, 3).unwrap();
    let (inst, _) = line_graph_union(&g.hypergraph).unwrap();
    let asg = Assignment::uniform(&inst, 1, 12);
    let cfg = PipelineConfig { seed: 11, eps: 0.1, p: 0.05, ..PipelineConfig::default() };
    let a = run_pipeline(&inst, &asg, &cfg).unwrap();
    let b = run_pipeline(&inst, &asg, &cfg).unwrap();
    assert_eq!(a.without_timings(), b.without_timings());
    assert!(a.succeeded());
    let empty = PartialColoring::empty(0);
    assert_ne!(a.coloring, empty);
}
