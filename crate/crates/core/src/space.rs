//! Continuous piecewise-polynomial Lagrange spaces on a partition of `[0, 1]`.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::scalar::Real;

/// Lagrange finite element space of degree `k` on a partition of `[0, 1]`.
///
/// Degrees of freedom are numbered left to right. Element `e` owns the global
/// dofs `e k ..= e k + k`, at `k + 1` equispaced nodes including both element
/// endpoints, so neighbouring elements share one dof.
#[derive(Debug, Clone)]
pub struct FESpace<T> {
    breakpoints: Vec<T>,
    degree: usize,
    dofs: Vec<T>,
    h: T,
    rule: QuadratureRule<T>,
    reference_nodes: Vec<T>,
    // basis values and reference derivatives at the quadrature points, [point][local]
    shape: Vec<Vec<T>>,
    shape_ref_deriv: Vec<Vec<T>>,
}

impl<T: Real> FESpace<T> {
    /// Uniform partition into `elements` pieces with degree `degree` and a
    /// `quad_points`-point Gauss rule per element.
    pub fn uniform(elements: usize, degree: usize, quad_points: usize) -> Result<Self> {
        if elements == 0 {
            return Err(Error::invalid("nt", "need at least one element"));
        }
        let n = T::from_count(elements);
        let breakpoints = (0..=elements).map(|i| T::from_count(i) / n).collect();
        Self::from_breakpoints(breakpoints, degree, quad_points)
    }

    /// Uniform partition with the default rule of `degree + 2` points.
    pub fn uniform_default(elements: usize, degree: usize) -> Result<Self> {
        Self::uniform(elements, degree, degree + 2)
    }

    pub fn from_breakpoints(
        breakpoints: Vec<T>,
        degree: usize,
        quad_points: usize,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::invalid("k", "degree must be at least 1"));
        }
        if quad_points < degree + 1 {
            return Err(Error::invalid(
                "q",
                format!(
                    "need at least k + 1 = {} quadrature points, got {quad_points}",
                    degree + 1
                ),
            ));
        }
        if breakpoints.len() < 2 {
            return Err(Error::invalid(
                "breakpoints",
                "need at least two breakpoints",
            ));
        }
        if breakpoints[0] != T::zero() || *breakpoints.last().unwrap() != T::one() {
            return Err(Error::invalid(
                "breakpoints",
                "partition must start at 0 and end at 1",
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("breakpoints", "must be strictly increasing"));
        }
        let h = breakpoints
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::zero(), T::max);
        let k = T::from_count(degree);
        let reference_nodes: Vec<T> = (0..=degree)
            .map(|m| -T::one() + T::lit(2.0) * T::from_count(m) / k)
            .collect();

        let mut dofs = Vec::with_capacity((breakpoints.len() - 1) * degree + 1);
        for w in breakpoints.windows(2) {
            for m in 0..degree {
                dofs.push(w[0] + (w[1] - w[0]) * T::from_count(m) / k);
            }
        }
        dofs.push(T::one());

        let rule = QuadratureRule::gauss_legendre(quad_points)?;
        let (shape, shape_ref_deriv) = rule
            .points()
            .iter()
            .map(|&xi| lagrange(&reference_nodes, xi))
            .unzip();

        Ok(Self {
            breakpoints,
            degree,
            dofs,
            h,
            rule,
            reference_nodes,
            shape,
            shape_ref_deriv,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_elements(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Number of global dofs `np = nt k + 1`, boundary included.
    pub fn num_dofs(&self) -> usize {
        self.dofs.len()
    }

    /// Number of dofs left after removing the two Dirichlet endpoints.
    pub fn num_interior(&self) -> usize {
        self.dofs.len() - 2
    }

    pub fn dof_positions(&self) -> &[T] {
        &self.dofs
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// Largest element diameter.
    pub fn h(&self) -> T {
        self.h
    }

    pub fn rule(&self) -> &QuadratureRule<T> {
        &self.rule
    }

    pub fn element_dofs(&self, element: usize) -> Range<usize> {
        element * self.degree..element * self.degree + self.degree + 1
    }

    pub fn element_bounds(&self, element: usize) -> (T, T) {
        (self.breakpoints[element], self.breakpoints[element + 1])
    }

    /// Equispaced local nodes on `[-1, 1]`.
    pub fn reference_nodes(&self) -> &[T] {
        &self.reference_nodes
    }

    /// Cached `(values, d/dxi)` of the local basis at the element quadrature points.
    pub(crate) fn shape_tables(&self) -> (&[Vec<T>], &[Vec<T>]) {
        (&self.shape, &self.shape_ref_deriv)
    }

    /// Local shape functions of `element` at reference point `local_point` in
    /// `[-1, 1]`. Derivatives are with respect to the global coordinate `y`.
    pub fn eval_basis(&self, element: usize, local_point: T) -> Result<(Vec<T>, Vec<T>)> {
        if element >= self.num_elements() {
            return Err(Error::Index {
                index: element,
                len: self.num_elements(),
            });
        }
        if !(local_point >= -T::one() && local_point <= T::one()) {
            return Err(Error::invalid(
                "local_point",
                format!("{local_point} outside the reference element [-1, 1]"),
            ));
        }
        let (a, b) = self.element_bounds(element);
        let jac = T::lit(2.0) / (b - a);
        let (values, mut derivs) = lagrange(&self.reference_nodes, local_point);
        derivs.iter_mut().for_each(|d| *d = *d * jac);
        Ok((values, derivs))
    }

    /// Element containing `y` (the left one at an interior breakpoint).
    pub fn locate(&self, y: T) -> Result<usize> {
        if !(y >= T::zero() && y <= T::one()) {
            return Err(Error::invalid("y", format!("{y} outside [0, 1]")));
        }
        let idx = self.breakpoints.partition_point(|&b| b < y);
        Ok(idx.saturating_sub(1).min(self.num_elements() - 1))
    }

    /// Value of the expansion `sum_j coeffs[j] phi_j` at `y`.
    pub fn evaluate(&self, coeffs: &[T], y: T) -> Result<T> {
        self.check_len(coeffs)?;
        let e = self.locate(y)?;
        let (a, b) = self.element_bounds(e);
        let xi = (T::lit(2.0) * y - a - b) / (b - a);
        let (values, _) = lagrange(&self.reference_nodes, xi.max(-T::one()).min(T::one()));
        Ok(self
            .element_dofs(e)
            .zip(values)
            .fold(T::zero(), |acc, (j, v)| acc + coeffs[j] * v))
    }

    /// Nodal interpolant `I_h u`. Boundary coefficients are set to zero.
    pub fn interpolate(&self, u: impl Fn(T) -> T) -> Result<Vec<T>> {
        let last = self.dofs.len() - 1;
        self.dofs
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                if j == 0 || j == last {
                    return Ok(T::zero());
                }
                let v = u(p);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite {
                        what: "interpolated function",
                        value: v.to_f64_lossy(),
                        location: format!("y = {p}"),
                    })
                }
            })
            .collect()
    }

    /// Like [`interpolate`](Self::interpolate) but keeps the endpoint samples.
    pub fn interpolate_full(&self, u: impl Fn(T) -> T) -> Vec<T> {
        self.dofs.iter().map(|&p| u(p)).collect()
    }

    /// Sums `integrand(y, value, w)` over the quadrature points of `rule` mapped
    /// into every element, where `value` is the expansion at `y` and `w` the
    /// physical weight. Elements are visited in order.
    pub fn integrate_expansion(
        &self,
        coeffs: &[T],
        rule: &QuadratureRule<T>,
        mut integrand: impl FnMut(T, T) -> T,
    ) -> Result<T> {
        self.check_len(coeffs)?;
        let tables: Vec<Vec<T>> = rule
            .points()
            .iter()
            .map(|&xi| lagrange(&self.reference_nodes, xi).0)
            .collect();
        let two = T::lit(2.0);
        let mut total = T::zero();
        for e in 0..self.num_elements() {
            let (a, b) = self.element_bounds(e);
            let half = (b - a) / two;
            let dofs = self.element_dofs(e);
            for ((&xi, &w), phi) in rule.points().iter().zip(rule.weights()).zip(&tables) {
                let y = (a + b) / two + half * xi;
                let value = dofs
                    .clone()
                    .zip(phi)
                    .fold(T::zero(), |acc, (j, &p)| acc + coeffs[j] * p);
                total = total + w * half * integrand(y, value);
            }
        }
        Ok(total)
    }

    /// `L2(0, 1)` norm of the expansion, `sqrt(c^T M c)`.
    pub fn l2_norm(&self, coeffs: &[T]) -> Result<T> {
        Ok(self
            .integrate_expansion(coeffs, &self.rule, |_, v| v * v)?
            .max(T::zero())
            .sqrt())
    }

    pub(crate) fn check_len(&self, coeffs: &[T]) -> Result<()> {
        if coeffs.len() != self.dofs.len() {
            return Err(Error::Dimension {
                expected: self.dofs.len(),
                got: coeffs.len(),
            });
        }
        Ok(())
    }
}

/// Lagrange cardinal functions on `nodes` and their derivatives at `x`.
pub(crate) fn lagrange<T: Real>(nodes: &[T], x: T) -> (Vec<T>, Vec<T>) {
    let n = nodes.len();
    let mut values = vec![T::one(); n];
    let mut derivs = vec![T::zero(); n];
    for m in 0..n {
        for j in 0..n {
            if j != m {
                values[m] = values[m] * (x - nodes[j]) / (nodes[m] - nodes[j]);
            }
        }
        for l in 0..n {
            if l == m {
                continue;
            }
            let mut term = T::one() / (nodes[m] - nodes[l]);
            for j in 0..n {
                if j != m && j != l {
                    term = term * (x - nodes[j]) / (nodes[m] - nodes[j]);
                }
            }
            derivs[m] = derivs[m] + term;
        }
    }
    (values, derivs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dof_counts() {
        let s = FESpace::<f64>::uniform(2, 1, 2).unwrap();
        assert_eq!(s.dof_positions(), &[0.0, 0.5, 1.0]);
        let s = FESpace::<f64>::uniform(4, 2, 3).unwrap();
        assert_eq!(s.num_dofs(), 9);
        assert_eq!(s.h(), 0.25);
        let s = FESpace::<f64>::uniform(4, 5, 6).unwrap();
        assert_eq!(s.num_dofs(), 21);
        assert_eq!(s.num_interior(), 19);
    }

    #[test]
    fn invalid_arguments() {
        assert!(FESpace::<f64>::uniform(0, 1, 2).is_err());
        assert!(FESpace::<f64>::uniform(2, 0, 2).is_err());
        assert!(FESpace::<f64>::uniform(2, 2, 2).is_err());
        assert!(FESpace::<f64>::from_breakpoints(vec![0.0, 0.6, 0.5, 1.0], 1, 2).is_err());
        assert!(FESpace::<f64>::from_breakpoints(vec![0.1, 1.0], 1, 2).is_err());
    }

    #[test]
    fn nonuniform_breakpoints() {
        let s = FESpace::<f64>::from_breakpoints(vec![0.0, 0.1, 0.4, 1.0], 2, 4).unwrap();
        assert_relative_eq!(s.h(), 0.6);
        assert_eq!(s.num_dofs(), 7);
        assert_relative_eq!(s.dof_positions()[3], 0.25);
        assert_eq!(s.locate(0.1).unwrap(), 0);
        assert_eq!(s.locate(0.2).unwrap(), 1);
        assert_eq!(s.locate(1.0).unwrap(), 2);
    }

    #[test]
    fn cardinality_at_nodes() {
        for k in 1..=5 {
            let s = FESpace::<f64>::uniform(3, k, k + 2).unwrap();
            for (m, &node) in s.reference_nodes().iter().enumerate() {
                let (v, _) = s.eval_basis(1, node).unwrap();
                for (i, vi) in v.iter().enumerate() {
                    let expected = if i == m { 1.0 } else { 0.0 };
                    assert!((vi - expected).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn linear_midpoint_and_quadratic_closed_form() {
        let s = FESpace::<f64>::uniform(2, 1, 2).unwrap();
        let (v, d) = s.eval_basis(0, 0.0).unwrap();
        assert_eq!(v, vec![0.5, 0.5]);
        assert_relative_eq!(d[0], -2.0);
        assert_relative_eq!(d[1], 2.0);

        let s = FESpace::<f64>::uniform(1, 2, 3).unwrap();
        for &xi in s.rule().points() {
            let (v, d) = s.eval_basis(0, xi).unwrap();
            let closed = [xi * (xi - 1.0) / 2.0, 1.0 - xi * xi, xi * (xi + 1.0) / 2.0];
            let closed_d = [(2.0 * xi - 1.0) / 2.0, -2.0 * xi, (2.0 * xi + 1.0) / 2.0];
            for m in 0..3 {
                assert_relative_eq!(v[m], closed[m], epsilon = 1e-15);
                // element of length 1 maps [-1, 1] with jacobian 2
                assert_relative_eq!(d[m], 2.0 * closed_d[m], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 1..=5 {
            let s = FESpace::<f64>::uniform(4, k, k + 2).unwrap();
            for e in 0..4 {
                for _ in 0..100 {
                    let xi = rng.gen_range(-1.0..=1.0);
                    let (v, d) = s.eval_basis(e, xi).unwrap();
                    assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-13);
                    assert!(d.iter().sum::<f64>().abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn basis_index_error() {
        let s = FESpace::<f64>::uniform(2, 1, 2).unwrap();
        assert!(matches!(s.eval_basis(2, 0.0), Err(Error::Index { .. })));
        assert!(s.eval_basis(0, 1.5).is_err());
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let s = FESpace::<f64>::uniform(3, 2, 4).unwrap();
        let c = s.interpolate(|y| y * (1.0 - y)).unwrap();
        for i in 0..=50 {
            let y = i as f64 / 50.0;
            assert!((s.evaluate(&c, y).unwrap() - y * (1.0 - y)).abs() < 1e-14);
        }
        let zero = s.interpolate(|_| 0.0).unwrap();
        assert!(zero.iter().all(|&c| c == 0.0));
        assert!(s.interpolate(|y| 1.0 / (y - 0.5)).is_err());
    }

    #[test]
    fn interpolation_forces_boundary_zero() {
        let s = FESpace::<f64>::uniform(2, 2, 4).unwrap();
        let c = s.interpolate(|_| 3.0).unwrap();
        assert_eq!(c[0], 0.0);
        assert_eq!(*c.last().unwrap(), 0.0);
        assert_eq!(c[1], 3.0);
    }

    #[test]
    fn norms() {
        let s = FESpace::<f64>::uniform(5, 1, 2).unwrap();
        assert_eq!(s.l2_norm(&[0.0; 6]).unwrap(), 0.0);
        assert_relative_eq!(s.l2_norm(&[1.0; 6]).unwrap(), 1.0, epsilon = 1e-14);
        let c = s.interpolate_full(|y| y);
        assert_relative_eq!(
            s.l2_norm(&c).unwrap(),
            (1.0f64 / 3.0).sqrt(),
            epsilon = 1e-14
        );
        assert!(matches!(s.l2_norm(&[1.0]), Err(Error::Dimension { .. })));
    }
}
