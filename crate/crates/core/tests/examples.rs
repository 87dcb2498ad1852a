// Every cargo example must run to completion.

#[allow(dead_code)]
mod matrix_kernel_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/matrix_kernel.rs"));
}

#[test]
fn matrix_kernel_example_runs() {
    matrix_kernel_example::run_example().expect("matrix_kernel example should run");
}

#[allow(dead_code)]
mod fiber_bundle_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fiber_bundle.rs"));
}

#[test]
fn fiber_bundle_example_runs() {
    fiber_bundle_example::run_example().expect("fiber_bundle example should run");
}

#[allow(dead_code)]
mod lp_norms_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/lp_norms.rs"));
}

#[test]
fn lp_norms_example_runs() {
    lp_norms_example::run_example().expect("lp_norms example should run");
}

#[allow(dead_code)]
mod resolvent_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/resolvent.rs"));
}

#[test]
fn resolvent_example_runs() {
    resolvent_example::run_example().expect("resolvent example should run");
}

#[allow(dead_code)]
mod semigroup_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/semigroup.rs"));
}

#[test]
fn semigroup_example_runs() {
    semigroup_example::run_example().expect("semigroup example should run");
}

#[allow(dead_code)]
mod extrapolation_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/extrapolation.rs"));
}

#[test]
fn extrapolation_example_runs() {
    extrapolation_example::run_example().expect("extrapolation example should run");
}

#[allow(dead_code)]
mod evolution_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/evolution.rs"));
}

#[test]
fn evolution_example_runs() {
    evolution_example::run_example().expect("evolution example should run");
}

#[allow(dead_code)]
mod scenario_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenario.rs"));
}

#[test]
fn scenario_example_runs() {
    scenario_example::run_example().expect("scenario example should run");
}
