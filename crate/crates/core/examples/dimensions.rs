//! Library walkthrough: validate the bundled systems, compute their
//! cohomology dimensions with adjoint coefficients, and report rigidity.
//!
//! Run with `cargo run --release -p mdlts --example dimensions`.

use mdlts::cohomology::cohomology;
use mdlts::deformation::rigidity_report;
use mdlts::fixtures;
use mdlts::lts::adjoint_rep;

fn main() {
    let systems = [
        ("two_dim(3,5,7)", fixtures::two_dim(3, 5, 7)),
        ("two_dim(1,0,1)", fixtures::two_dim(1, 0, 1)),
        ("four_dim(2,[0,0,1,1])", fixtures::four_dim(2, [0, 0, 1, 1])),
        ("abelian(3)", fixtures::abelian(3)),
    ];
    for (name, sys) in systems {
        let valid = sys.validate().is_pass();
        let r = adjoint_rep(&sys.lts, &sys.mdo);
        let h1 = cohomology(&sys.lts, &sys.mdo, &r, 1).unwrap();
        let h3 = cohomology(&sys.lts, &sys.mdo, &r, 3).unwrap();
        let rigidity = rigidity_report(&sys).unwrap();
        println!(
            "{name}: valid={valid} dimH1={} dimH3={} rigid_certified={}",
            h1.dim_cohomology, h3.dim_cohomology, rigidity.rigid_certified
        );
    }
}
