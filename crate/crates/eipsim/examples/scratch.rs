use eipsim::montecarlo::*;
use eipsim::protocols::*;
use eipsim::state::ProductEnsemble;
use std::time::Instant;
fn main() {
    for (n, kind, ens) in [
        (32, ProtocolKind::Lambda { lambda: 2 }, ProductEnsemble::rank3(32, 0.9).unwrap()),
        (16, ProtocolKind::Aeip3, ProductEnsemble::rank3(16, 0.95).unwrap()),
        (8, ProtocolKind::TwoAlt, ProductEnsemble::new(8, [0.75,0.25,0.0,0.0]).unwrap()),
        (16, ProtocolKind::Damp, ProductEnsemble::rank2_damped(16, 0.95).unwrap()),
    ] {
        let p = SimulationPoint { workload: Workload::Pairs { ensemble: ens, protocol: kind, block_size: None }, params: ProtocolParams::default() };
        let t = Instant::now();
        let s = run_point(&p, 0, 100_000, 1);
        println!("{n} {:?} {:?} {:.2}s", kind, s.as_ref().map(|s| s.local.mean()).map_err(|e| e.to_string()), t.elapsed().as_secs_f64());
    }
}
