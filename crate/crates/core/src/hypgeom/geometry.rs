//! Finite-difference derivatives and pointwise geometry of a vertical graph
//! `x_{n+1} = u(x)` in the half-space model.
//!
//! With `p = Du`, `W = √(1 + |p|²)` and the upward Euclidean normal:
//!
//! - `g̃ = I + p pᵀ`, `h̃ = D²u / W`, `ν^{n+1} = 1 / W`;
//! - hyperbolic forms `g = g̃ / u²`, `h = h̃ / u + ν^{n+1} g̃ / u²`;
//! - with `γ = g̃^{-1/2} = I − p pᵀ / (W (1 + W))` the symmetric shape
//!   matrices are `γ h̃ γ` (Euclidean) and `u γ h̃ γ + ν^{n+1} I` (hyperbolic),
//!   so `κ_i = u κ̃_i + ν^{n+1}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use super::grid::{GraphGrid, NodeKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Central,
    Forward,
    Backward,
}

const SIDES: [Side; 3] = [Side::Central, Side::Forward, Side::Backward];

fn first_weights(side: Side) -> &'static [(isize, f64)] {
    match side {
        Side::Central => &[(-1, -0.5), (1, 0.5)],
        Side::Forward => &[(0, -1.5), (1, 2.0), (2, -0.5)],
        Side::Backward => &[(0, 1.5), (-1, -2.0), (-2, 0.5)],
    }
}

fn second_weights(side: Side) -> &'static [(isize, f64)] {
    match side {
        Side::Central => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        Side::Forward => &[(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)],
        Side::Backward => &[(0, 2.0), (-1, -5.0), (-2, 4.0), (-3, -1.0)],
    }
}

/// Gradient and Hessian at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDerivatives {
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
    /// Some component used a one-sided stencil.
    pub one_sided: bool,
}

#[derive(Debug, Clone)]
pub struct DerivativeField {
    pub nodes: Vec<Option<NodeDerivatives>>,
    /// Masked nodes without a usable stencil; excluded from reports.
    pub flagged: Vec<usize>,
}

/// Second-order differences at every masked node: central where the
/// neighbours exist, otherwise one-sided along the affected axis. Mixed
/// derivatives use tensor products of first-derivative stencils and are
/// written symmetrically.
pub fn differentiate(grid: &GraphGrid) -> DerivativeField {
    let nodes: Vec<Option<NodeDerivatives>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            if grid.is_masked(i) {
                node_derivatives(grid, i)
            } else {
                None
            }
        })
        .collect();
    let flagged = (0..grid.len())
        .filter(|&i| grid.is_masked(i) && nodes[i].is_none())
        .collect();
    DerivativeField { nodes, flagged }
}

fn node_derivatives(grid: &GraphGrid, i: usize) -> Option<NodeDerivatives> {
    let n = grid.dim();
    let h = grid.h();
    let value = |delta: &[isize]| -> Option<f64> {
        let j = grid.offset(i, delta)?;
        grid.is_masked(j).then(|| grid.height(j))
    };
    let axis_delta = |axis: usize, step: isize| {
        let mut d = vec![0isize; n];
        d[axis] = step;
        d
    };
    let apply_axis = |axis: usize, weights: &[(isize, f64)]| -> Option<f64> {
        let mut acc = 0.0;
        for &(s, w) in weights {
            acc += w * value(&axis_delta(axis, s))?;
        }
        Some(acc)
    };
    let mut one_sided = false;
    let mut grad = DVector::zeros(n);
    let mut hess = DMatrix::zeros(n, n);
    let mut first_side = vec![Side::Central; n];
    for k in 0..n {
        let (side, d) = SIDES
            .iter()
            .find_map(|&s| apply_axis(k, first_weights(s)).map(|d| (s, d)))?;
        first_side[k] = side;
        one_sided |= side != Side::Central;
        grad[k] = d / h;
        let (side2, d2) = SIDES
            .iter()
            .find_map(|&s| apply_axis(k, second_weights(s)).map(|d| (s, d)))?;
        one_sided |= side2 != Side::Central;
        hess[(k, k)] = d2 / (h * h);
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let mixed = SIDES.iter().find_map(|&sk| {
                SIDES.iter().find_map(|&sl| {
                    let mut acc = 0.0;
                    for &(a, wa) in first_weights(sk) {
                        for &(b, wb) in first_weights(sl) {
                            let mut d = vec![0isize; n];
                            d[k] = a;
                            d[l] = b;
                            acc += wa * wb * value(&d)?;
                        }
                    }
                    Some((sk != Side::Central || sl != Side::Central, acc))
                })
            });
            let (side_flag, acc) = mixed?;
            one_sided |= side_flag;
            let v = acc / (h * h);
            hess[(k, l)] = v;
            hess[(l, k)] = v;
        }
    }
    Some(NodeDerivatives {
        grad,
        hess,
        one_sided,
    })
}

/// Linear-offset central stencil for grids whose nodes of interest have a
/// complete `3^n` block.
#[derive(Debug, Clone)]
pub struct CentralStencil {
    pub dim: usize,
    pub h: f64,
    strides: Vec<isize>,
}

/// Local derivatives `(u, Du, D²u)` at a node.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl CentralStencil {
    pub fn new(grid: &GraphGrid) -> Self {
        let mut strides = vec![1isize; grid.dim()];
        for k in 1..grid.dim() {
            strides[k] = strides[k - 1] * grid.shape()[k - 1] as isize;
        }
        Self {
            dim: grid.dim(),
            h: grid.h(),
            strides,
        }
    }

    fn at(&self, i: usize, k: usize, a: isize) -> usize {
        (i as isize + a * self.strides[k]) as usize
    }

    fn at2(&self, i: usize, k: usize, a: isize, l: usize, b: isize) -> usize {
        (i as isize + a * self.strides[k] + b * self.strides[l]) as usize
    }

    /// Weights of `∂_k u` as `(node, weight)` pairs.
    pub fn first(&self, i: usize, k: usize) -> [(usize, f64); 2] {
        let w = 0.5 / self.h;
        [(self.at(i, k, -1), -w), (self.at(i, k, 1), w)]
    }

    /// Weights of `∂_kk u`.
    pub fn second(&self, i: usize, k: usize) -> [(usize, f64); 3] {
        let w = 1.0 / (self.h * self.h);
        [
            (self.at(i, k, -1), w),
            (i, -2.0 * w),
            (self.at(i, k, 1), w),
        ]
    }

    /// Weights of `∂_kl u`, `k ≠ l`.
    pub fn mixed(&self, i: usize, k: usize, l: usize) -> [(usize, f64); 4] {
        let w = 0.25 / (self.h * self.h);
        [
            (self.at2(i, k, 1, l, 1), w),
            (self.at2(i, k, 1, l, -1), -w),
            (self.at2(i, k, -1, l, 1), -w),
            (self.at2(i, k, -1, l, -1), w),
        ]
    }

    pub fn jet_with(&self, i: usize, get: impl Fn(usize) -> f64) -> Jet {
        let n = self.dim;
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for k in 0..n {
            grad[k] = self.first(i, k).iter().map(|&(j, w)| w * get(j)).sum();
            hess[(k, k)] = self.second(i, k).iter().map(|&(j, w)| w * get(j)).sum();
            for l in (k + 1)..n {
                let v: f64 = self.mixed(i, k, l).iter().map(|&(j, w)| w * get(j)).sum();
                hess[(k, l)] = v;
                hess[(l, k)] = v;
            }
        }
        Jet {
            u: get(i),
            grad,
            hess,
        }
    }

    pub fn jet(&self, values: &[f64], i: usize) -> Jet {
        self.jet_with(i, |j| values[j])
    }
}

/// `γ = g̃^{-1/2} = I − p pᵀ / (W (1 + W))`.
pub fn inverse_sqrt_metric(grad: &DVector<f64>) -> DMatrix<f64> {
    let n = grad.len();
    let w = (1.0 + grad.norm_squared()).sqrt();
    DMatrix::identity(n, n) - grad * grad.transpose() / (w * (1.0 + w))
}

/// Symmetric hyperbolic shape matrix `(u/W) γ D²u γ + I/W`; its eigenvalues
/// are the hyperbolic principal curvatures.
pub fn shape_matrix(u: f64, grad: &DVector<f64>, hess: &DMatrix<f64>) -> DMatrix<f64> {
    let n = grad.len();
    let w = (1.0 + grad.norm_squared()).sqrt();
    let gamma = inverse_sqrt_metric(grad);
    &gamma * hess * &gamma * (u / w) + DMatrix::identity(n, n) / w
}

/// Eigen-decomposition sorted by descending eigenvalue.
pub(crate) fn sorted_eigen(m: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(n, order.iter().map(|&j| eig.eigenvalues[j]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &j) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(j));
    }
    (values, vectors)
}

/// Euclidean first/second fundamental forms and principal data.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanGeometry {
    pub grad: DVector<f64>,
    pub nu: f64,
    pub g_tilde: DMatrix<f64>,
    pub h_tilde: DMatrix<f64>,
    /// Eigenvalues of `g̃^{-1} h̃`, descending.
    pub kappa_tilde: DVector<f64>,
}

pub fn euclidean_geometry(grad: &DVector<f64>, hess: &DMatrix<f64>) -> EuclideanGeometry {
    let n = grad.len();
    let w = (1.0 + grad.norm_squared()).sqrt();
    let g_tilde = DMatrix::identity(n, n) + grad * grad.transpose();
    let h_tilde = hess / w;
    let gamma = inverse_sqrt_metric(grad);
    let (kappa_tilde, _) = sorted_eigen(&gamma * &h_tilde * &gamma);
    EuclideanGeometry {
        grad: grad.clone(),
        nu: 1.0 / w,
        g_tilde,
        h_tilde,
        kappa_tilde,
    }
}

/// Hyperbolic forms, curvatures and principal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicShape {
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    /// Principal curvatures, descending.
    pub kappa: DVector<f64>,
    /// Orthonormal eigenvectors of the symmetric shape matrix, as columns.
    pub frame: DMatrix<f64>,
    /// Coordinate components `w_i = γ e_i` of the Euclidean-unit principal
    /// directions; the hyperbolic-unit direction is `u w_i`.
    pub directions: DMatrix<f64>,
}

/// Shape operator `g^{-1} h = u g̃^{-1} h̃ + ν^{n+1} I`, diagonalised through
/// `g^{-1/2} h g^{-1/2}` with `g^{-1/2} = u γ`.
pub fn hyperbolic_shape(eu: &EuclideanGeometry, u: f64) -> Result<HyperbolicShape> {
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::Domain(format!("height must be > 0, got {u}")));
    }
    let g = &eu.g_tilde / (u * u);
    let h = &eu.h_tilde / u + &eu.g_tilde * (eu.nu / (u * u));
    let root = inverse_sqrt_metric(&eu.grad) * u;
    let sym = &root * &h * &root;
    let sym = (&sym + sym.transpose()) * 0.5;
    let (kappa, frame) = sorted_eigen(sym);
    let directions = &root * &frame / u;
    Ok(HyperbolicShape {
        g,
        h,
        kappa,
        frame,
        directions,
    })
}

/// Full pointwise geometry at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGeometry {
    pub u: f64,
    pub grad_u: DVector<f64>,
    pub hess_u: DMatrix<f64>,
    pub nu: f64,
    pub g_tilde: DMatrix<f64>,
    pub h_tilde: DMatrix<f64>,
    pub kappa_tilde: DVector<f64>,
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub kappa: DVector<f64>,
    pub frame: DMatrix<f64>,
    pub directions: DMatrix<f64>,
}

impl PointGeometry {
    pub fn new(u: f64, grad: &DVector<f64>, hess: &DMatrix<f64>) -> Result<Self> {
        let eu = euclidean_geometry(grad, hess);
        let hy = hyperbolic_shape(&eu, u)?;
        Ok(Self {
            u,
            grad_u: eu.grad,
            hess_u: hess.clone(),
            nu: eu.nu,
            g_tilde: eu.g_tilde,
            h_tilde: eu.h_tilde,
            kappa_tilde: eu.kappa_tilde,
            g: hy.g,
            h: hy.h,
            kappa: hy.kappa,
            frame: hy.frame,
            directions: hy.directions,
        })
    }

    /// Frame components `u_i / u = w_i · Du`.
    pub fn height_ratios(&self) -> DVector<f64> {
        self.directions.transpose() * &self.grad_u
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa[0]
    }

    pub fn kappa_min(&self) -> f64 {
        self.kappa[self.kappa.len() - 1]
    }
}

/// Geometry at every node that has derivatives.
#[derive(Debug, Clone)]
pub struct GeometryField {
    pub nodes: Vec<Option<PointGeometry>>,
}

impl GeometryField {
    pub fn compute(grid: &GraphGrid, derivs: &DerivativeField) -> Result<Self> {
        let nodes = (0..grid.len())
            .into_par_iter()
            .map(|i| match &derivs.nodes[i] {
                Some(d) => PointGeometry::new(grid.height(i), &d.grad, &d.hess).map(Some),
                None => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { nodes })
    }

    pub fn from_grid(grid: &GraphGrid) -> Result<Self> {
        Self::compute(grid, &differentiate(grid))
    }

    pub fn get(&self, i: usize) -> Option<&PointGeometry> {
        self.nodes[i].as_ref()
    }

    /// Interior nodes with geometry.
    pub fn interior<'a>(
        &'a self,
        grid: &'a GraphGrid,
    ) -> impl Iterator<Item = (usize, &'a PointGeometry)> + 'a {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(i, _)| grid.kind(*i) == NodeKind::Interior)
            .filter_map(|(i, g)| g.as_ref().map(|g| (i, g)))
    }
}
