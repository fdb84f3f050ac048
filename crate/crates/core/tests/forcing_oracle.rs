mod common;

use common::reference1 as r;
use nonlocal_fem::problems::example1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn residual(i: usize, x: f64, t: f64) -> f64 {
    r::pde_operator(i, x, t) - example1::forcing::<f64>(i, x, t).unwrap()
}

#[test]
fn exact_solution_satisfies_pde_with_derived_forcing() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let t = rng.gen_range(0.01..2.99);
        let y = rng.gen_range(0.02..0.98);
        let x = r::alpha(t) + (r::beta(t) - r::alpha(t)) * y;
        for i in 0..2 {
            worst = worst.max(residual(i, x, t).abs());
        }
    }
    assert!(worst <= 1e-8, "max residual {worst:e}");
}

#[test]
fn oracle_detects_perturbed_forcing() {
    let (x, t) = (0.4, 1.2);
    let perturbed = example1::forcing::<f64>(0, x, t).unwrap() * (1.0 + 1e-6);
    let r0 = r::pde_operator(0, x, t) - perturbed;
    assert!(r0.abs() > 1e-8);
}

#[test]
fn library_solution_matches_reference() {
    let sys = example1::system::<f64>();
    for n in 0..=30 {
        let t = 0.1 * n as f64;
        for j in 0..=10 {
            let x = r::alpha(t) + (r::beta(t) - r::alpha(t)) * j as f64 / 10.0;
            for i in 0..2 {
                assert!((sys.u(i, x, t).unwrap() - r::u(i, x, t)).abs() < 1e-12);
            }
        }
        let ints = sys.integrals(t).unwrap();
        assert!((ints[0] - r::mass(0, t)).abs() < 1e-12);
        assert!((ints[1] - r::mass(1, t)).abs() < 1e-12);
    }
}
