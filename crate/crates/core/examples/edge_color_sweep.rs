use std::time::Instant;

use ndcolor::lab::random_linear_hypergraph;
use ndcolor::pipeline::{edge_color_hypergraph, PipelineConfig};

fn main() {
    for seed in 0..20 {
        let g = random_linear_hypergraph(200, 3, 20, seed).unwrap();
        let t = Instant::now();
        let cfg = PipelineConfig { seed, ..PipelineConfig::default() };
        let out = edge_color_hypergraph(&g.hypergraph, &cfg).unwrap();
        let r = &out.run;
        println!(
            "seed {seed:2} edges {} D {} ok {} rounds {} capped {} stalled {} finisher {:?} used {}/{} {:.0?}",
            g.hypergraph.num_edges(),
            out.max_degree,
            r.succeeded(),
            r.rounds.len(),
            r.capped,
            r.stalled,
            r.finisher.as_ref().map(|f| (f.status.clone(), f.conflicts_per_pass.len(), f.backtrack_nodes)),
            out.colors_used,
            out.palette,
            t.elapsed()
        );
    }
}
