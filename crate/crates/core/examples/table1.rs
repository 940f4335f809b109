//! Prints desk-scale synthetic benchmark tables for both noise kinds.

use iacm::synth::{run_benchmark, BenchmarkConfig, BenchmarkMethod, NoiseKind};

fn main() {
    let n_models = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    for noise_kind in [NoiseKind::Additive, NoiseKind::Multiplicative] {
        let cfg = BenchmarkConfig {
            ranges: vec![(2, 2), (3, 3), (4, 4), (5, 5), (2, 10), (10, 2), (3, 20), (20, 3)],
            noise_kind,
            n_models,
            n_samples: 1000,
            methods: vec![BenchmarkMethod::iacm(), BenchmarkMethod::iacm_plus()],
            seed: 0,
        };
        let start = std::time::Instant::now();
        let report = run_benchmark(&cfg).expect("benchmark");
        print!("{}", report.to_table());
        println!("# {:.1}s", start.elapsed().as_secs_f64());
    }
}
