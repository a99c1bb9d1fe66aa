//! Timing survey of the enumeration sweep over the six pairwise
//! formulations on the plain two-square instance.

use packideal_core::enumerate::{enumerate_extreme_points, EnumerateOptions};
use packideal_core::formulations::{build, BuildOptions, FormulationKind, PairScope};
use packideal_core::mblp::compose_relaxation;
use packideal_core::rpp::pair_2x2_10x10;

fn main() {
    for kind in FormulationKind::ALL {
        let m = build(kind, &pair_2x2_10x10(), PairScope::All, &BuildOptions::default()).unwrap();
        let r = compose_relaxation(&m);
        let t = std::time::Instant::now();
        let report = enumerate_extreme_points(&r, &EnumerateOptions::default()).unwrap();
        println!(
            "{kind}: {} vertices, {} fractional, {} subsets examined, {:?}",
            report.vertices.len(),
            report.fractional.len(),
            report.subsets_examined,
            t.elapsed()
        );
    }
}
