#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use nonlocal_fem::analysis::{fit_slope, solve_and_measure};
use nonlocal_fem::problems::{DiffusionLaw, Equation};
use nonlocal_fem::{BoundaryMotion, FESpace, ProblemSpec, QuadratureRule};

/// `u_t = u_xx` on `(0, 1)`, `u(x, 0) = sin(pi x)`, zero forcing.
pub fn heat_problem(final_time: f64) -> ProblemSpec {
    let motion = BoundaryMotion::stationary(0.0, 1.0, final_time).unwrap();
    let eq = Equation::new(
        DiffusionLaw::constant(1.0),
        |_, _| 0.0,
        |x: f64| (PI * x).sin(),
    )
    .with_exact(|x: f64, t: f64| (-PI * PI * t).exp() * (PI * x).sin());
    ProblemSpec::new("heat", motion, vec![eq]).unwrap()
}

/// `L2(0, T)` error of the heat problem at `T`.
pub fn heat_error(final_time: f64, nt: usize, k: usize, delta: f64) -> f64 {
    let problem = heat_problem(final_time);
    let space = FESpace::uniform_default(nt, k).unwrap();
    solve_and_measure(&problem, &space, delta)
        .unwrap()
        .measurements[0]
        .l2_moving[0]
}

/// Lagrange basis on `nodes`: value and derivative of every cardinal function at `x`.
pub fn lagrange(nodes: &[f64], x: f64) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let mut values = vec![0.0; n];
    let mut derivs = vec![0.0; n];
    for j in 0..n {
        let denom: f64 = (0..n)
            .filter(|&m| m != j)
            .map(|m| nodes[j] - nodes[m])
            .product();
        values[j] = (0..n)
            .filter(|&m| m != j)
            .map(|m| x - nodes[m])
            .product::<f64>()
            / denom;
        let mut d = 0.0;
        for skip in (0..n).filter(|&m| m != j) {
            d += (0..n)
                .filter(|&m| m != j && m != skip)
                .map(|m| x - nodes[m])
                .product::<f64>();
        }
        derivs[j] = d / denom;
    }
    (values, derivs)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 40)
}

/// Fitted `L2` slope of the interpolation error of `sin(pi y)` for degree `k`.
pub fn interpolation_slope(k: usize, elements: &[usize]) -> f64 {
    let rule = QuadratureRule::gauss_legendre(k + 6).unwrap();
    let points: Vec<(f64, f64)> = elements
        .iter()
        .map(|&nt| {
            let space = FESpace::uniform_default(nt, k).unwrap();
            let coeffs = space.interpolate(|y| (PI * y).sin()).unwrap();
            let sq = space
                .integrate_expansion(&coeffs, &rule, |y, v| (v - (PI * y).sin()).powi(2))
                .unwrap();
            (1.0 / nt as f64, sq.sqrt())
        })
        .collect();
    fit_slope(&points).unwrap().slope
}

const PANELS: usize = 10_000;

pub struct Dense {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub conv_const: DMatrix<f64>,
    pub conv_linear: DMatrix<f64>,
    pub weights: Vec<f64>,
}

/// Composite Simpson assembly with an independent basis, `PANELS` panels in total.
pub fn simpson_operators(nt: usize, k: usize) -> Dense {
    let np = nt * k + 1;
    let mut d = Dense {
        mass: DMatrix::zeros(np, np),
        stiffness: DMatrix::zeros(np, np),
        conv_const: DMatrix::zeros(np, np),
        conv_linear: DMatrix::zeros(np, np),
        weights: vec![0.0; np],
    };
    let per = PANELS / nt;
    for e in 0..nt {
        let (a, b) = (e as f64 / nt as f64, (e + 1) as f64 / nt as f64);
        let nodes: Vec<f64> = (0..=k).map(|m| a + (b - a) * m as f64 / k as f64).collect();
        let hp = (b - a) / per as f64;
        for p in 0..=2 * per {
            let y = a + 0.5 * hp * p as f64;
            let w = hp / 6.0
                * if p == 0 || p == 2 * per {
                    1.0
                } else if p % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
            let (phi, dphi) = lagrange(&nodes, y);
            for li in 0..=k {
                let gi = e * k + li;
                d.weights[gi] += w * phi[li];
                for lj in 0..=k {
                    let gj = e * k + lj;
                    d.mass[(gi, gj)] += w * phi[lj] * phi[li];
                    d.stiffness[(gi, gj)] += w * dphi[lj] * dphi[li];
                    d.conv_const[(gi, gj)] += w * dphi[lj] * phi[li];
                    d.conv_linear[(gi, gj)] += w * y * dphi[lj] * phi[li];
                }
            }
        }
    }
    d
}

/// Closed-form description of the two-equation moving benchmark, written out
/// independently of the library.
pub mod reference1 {
    pub fn alpha(t: f64) -> f64 {
        -t / (1.0 + t)
    }

    pub fn beta(t: f64) -> f64 {
        1.0 + 2.0 * t / (1.0 + t)
    }

    const P1: [f64; 5] = [
        0.0,
        611.0 / 70.0,
        -10513.0 / 210.0,
        646.0 / 7.0,
        -1070.0 / 21.0,
    ];
    const P2: [f64; 5] = [
        0.0,
        2047.0 / 140.0,
        -27701.0 / 420.0,
        691.0 / 7.0,
        -995.0 / 21.0,
    ];

    fn horner(c: &[f64], z: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &a| acc * z + a)
    }

    pub fn u(i: usize, x: f64, t: f64) -> f64 {
        let z = (x - alpha(t)) / (beta(t) - alpha(t));
        match i {
            0 => horner(&P1, z) / (1.0 + t),
            _ => (-t).exp() * horner(&P2, z),
        }
    }

    pub fn a(i: usize, r: f64, s: f64) -> f64 {
        match i {
            0 => 2.0 - 1.0 / (1.0 + r * r) + 1.0 / (1.0 + s * s),
            _ => 3.0 + 2.0 / (1.0 + r * r) - 1.0 / (1.0 + s * s),
        }
    }

    pub fn d_dt(i: usize, x: f64, t: f64) -> f64 {
        let h = 2.5e-4;
        let u = |s: f64| u(i, x, t + s * h);
        (u(-2.0) - 8.0 * u(-1.0) + 8.0 * u(1.0) - u(2.0)) / (12.0 * h)
    }

    pub fn d_xx(i: usize, x: f64, t: f64) -> f64 {
        let h = 1e-2;
        let u = |s: f64| u(i, x + s * h, t);
        (-u(-2.0) + 16.0 * u(-1.0) - 30.0 * u(0.0) + 16.0 * u(1.0) - u(2.0)) / (12.0 * h * h)
    }

    pub fn mass(i: usize, t: f64) -> f64 {
        super::adaptive_simpson(&|x| u(i, x, t), alpha(t), beta(t), 1e-14)
    }

    /// `u_t - a_i(l(u_1), l(u_2)) u_xx` by finite differences and adaptive quadrature.
    pub fn pde_operator(i: usize, x: f64, t: f64) -> f64 {
        d_dt(i, x, t) - a(i, mass(0, t), mass(1, t)) * d_xx(i, x, t)
    }
}
