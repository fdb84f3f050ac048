//! With the right end `1 + t/(1+2t)` the first benchmark reproduces the
//! reference max nodal errors digit for digit.

#![allow(clippy::needless_range_loop)]

use nonlocal_fem::analysis::ErrorObserver;
use nonlocal_fem::problems::example1_slow;
use nonlocal_fem::{FESpace, Stepper};

#[test]
fn slow_right_end_reproduces_reference_nodal_errors() {
    let problem = example1_slow::<f64>();
    let space = FESpace::uniform_default(4, 5).unwrap();
    let stepper = Stepper::new(&problem, &space, 1e-4).unwrap();
    let mut errors = ErrorObserver::at_times(&stepper, &[0.5, 1.0]);
    stepper.run(&mut [&mut errors]).unwrap();
    let reference = [["1.0564e-9", "1.0907e-9"], ["5.0614e-10", "5.5859e-10"]];
    for (m, row) in errors.measurements.iter().zip(reference) {
        for i in 0..2 {
            assert_eq!(
                format!("{:.4e}", m.max_nodal[i]),
                row[i],
                "t = {}, u{}",
                m.time,
                i + 1
            );
        }
    }
}
