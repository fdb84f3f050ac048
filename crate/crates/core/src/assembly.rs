//! Galerkin matrices and vectors on the fixed interval `[0, 1]`.
//!
//! With trial index `j` and test index `i`:
//!
//! ```text
//! mass        M_ij  = int phi_j phi_i
//! stiffness   K_ij  = int phi_j' phi_i'
//! conv_const  C0_ij = int phi_j' phi_i
//! conv_linear C1_ij = int y phi_j' phi_i
//! weights     w_j   = int phi_j
//! ```
//!
//! Because `b1(y, t) = alpha'/gamma + (gamma'/gamma) y` is affine in `y`, the
//! convection matrix at any time is `C(t) = (alpha'/gamma) C0 + (gamma'/gamma) C1`.

use crate::banded::BandMatrix;
use crate::error::{Error, Result};
use crate::geometry::BoundaryMotion;
use crate::problems::ProblemSpec;
use crate::scalar::Real;
use crate::space::FESpace;

/// Time-independent Galerkin operators of a space.
#[derive(Debug, Clone)]
pub struct OperatorSet<T> {
    pub mass: BandMatrix<T>,
    pub stiffness: BandMatrix<T>,
    pub conv_const: BandMatrix<T>,
    pub conv_linear: BandMatrix<T>,
    pub nonlocal_weights: Vec<T>,
}

impl<T: Real> OperatorSet<T> {
    /// Assembles all static operators, elements in increasing order.
    pub fn assemble(space: &FESpace<T>) -> Self {
        let np = space.num_dofs();
        let k = space.degree();
        let mut mass = BandMatrix::zeros(np, k, k);
        let mut stiffness = BandMatrix::zeros(np, k, k);
        let mut conv_const = BandMatrix::zeros(np, k, k);
        let mut conv_linear = BandMatrix::zeros(np, k, k);
        let mut weights = vec![T::zero(); np];
        let (values, ref_derivs) = space.shape_tables();
        let rule = space.rule();
        let two = T::lit(2.0);

        for e in 0..space.num_elements() {
            let (a, b) = space.element_bounds(e);
            let half = (b - a) / two;
            let jac = half.recip();
            let dofs: Vec<usize> = space.element_dofs(e).collect();
            for (q, (&xi, &w)) in rule.points().iter().zip(rule.weights()).enumerate() {
                let y = (a + b) / two + half * xi;
                let dw = w * half;
                let phi = &values[q];
                let dphi: Vec<T> = ref_derivs[q].iter().map(|&d| d * jac).collect();
                for (li, &gi) in dofs.iter().enumerate() {
                    weights[gi] = weights[gi] + dw * phi[li];
                    for (lj, &gj) in dofs.iter().enumerate() {
                        // symmetric forms: one product per unordered pair
                        if lj >= li {
                            let m = dw * phi[lj] * phi[li];
                            let k = dw * dphi[lj] * dphi[li];
                            mass.add(gi, gj, m);
                            stiffness.add(gi, gj, k);
                            if lj != li {
                                mass.add(gj, gi, m);
                                stiffness.add(gj, gi, k);
                            }
                        }
                        conv_const.add(gi, gj, dw * dphi[lj] * phi[li]);
                        conv_linear.add(gi, gj, dw * y * dphi[lj] * phi[li]);
                    }
                }
            }
        }
        Self {
            mass,
            stiffness,
            conv_const,
            conv_linear,
            nonlocal_weights: weights,
        }
    }

    /// Convection matrix `int b1(y, t) phi_j' phi_i dy` at time `t`.
    pub fn convection(&self, motion: &BoundaryMotion<T>, t: T) -> Result<BandMatrix<T>> {
        let (c0, c1) = motion.b1_split(t)?;
        Ok(BandMatrix::combination(&[
            (c0, &self.conv_const),
            (c1, &self.conv_linear),
        ]))
    }

    /// `l(V) = gamma(t) int_0^1 V dy`, which equals `int_{alpha(t)}^{beta(t)} u dx`.
    pub fn nonlocal_value(&self, coeffs: &[T], motion: &BoundaryMotion<T>, t: T) -> Result<T> {
        nonlocal_value(&self.nonlocal_weights, coeffs, motion, t)
    }
}

pub fn nonlocal_value<T: Real>(
    weights: &[T],
    coeffs: &[T],
    motion: &BoundaryMotion<T>,
    t: T,
) -> Result<T> {
    if weights.len() != coeffs.len() {
        return Err(Error::Dimension {
            expected: weights.len(),
            got: coeffs.len(),
        });
    }
    let integral = weights
        .iter()
        .zip(coeffs)
        .fold(T::zero(), |acc, (&w, &c)| acc + w * c);
    Ok(motion.gamma(t)? * integral)
}

/// Load vector `G_j = int_0^1 f_i(alpha(t) + gamma(t) y, t) phi_j(y) dy`.
pub fn assemble_load<T: Real>(
    space: &FESpace<T>,
    problem: &ProblemSpec<T>,
    i: usize,
    t: T,
) -> Result<Vec<T>> {
    let forcing = &problem.equation(i)?.forcing;
    let motion = problem.motion();
    let alpha = motion.alpha(t)?;
    let width = motion.gamma(t)?;
    let (values, _) = space.shape_tables();
    let rule = space.rule();
    let two = T::lit(2.0);
    let mut load = vec![T::zero(); space.num_dofs()];
    for e in 0..space.num_elements() {
        let (a, b) = space.element_bounds(e);
        let half = (b - a) / two;
        for (q, (&xi, &w)) in rule.points().iter().zip(rule.weights()).enumerate() {
            let y = (a + b) / two + half * xi;
            let x = alpha + width * y;
            let f = forcing(x, t);
            if !f.is_finite() {
                return Err(Error::NonFinite {
                    what: "forcing",
                    value: f.to_f64_lossy(),
                    location: format!("equation {}, x = {x}, t = {t}", i + 1),
                });
            }
            for (g, &phi) in space.element_dofs(e).zip(&values[q]) {
                load[g] = load[g] + w * half * f * phi;
            }
        }
    }
    Ok(load)
}

/// `a_i(l_1, ..., l_ne)`, checked against the law's declared bounds.
pub fn diffusion_scalar<T: Real>(problem: &ProblemSpec<T>, i: usize, nonlocal: &[T]) -> Result<T> {
    if nonlocal.len() != problem.ne() {
        return Err(Error::Dimension {
            expected: problem.ne(),
            got: nonlocal.len(),
        });
    }
    let law = &problem.equation(i)?.diffusion;
    let value = law.eval(nonlocal);
    let (lower, upper) = law.bounds();
    if !value.is_finite() || value < lower || value > upper {
        return Err(Error::DiffusionBounds {
            equation: i + 1,
            value: value.to_f64_lossy(),
            lower: lower.to_f64_lossy(),
            upper: upper.to_f64_lossy(),
        });
    }
    Ok(value)
}
