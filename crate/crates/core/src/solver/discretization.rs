use rayon::prelude::*;

use super::problem::PlateauProblem;
use crate::error::{Error, Result};
use crate::hypgeom::{centred_layout, neighbourhood, GraphGrid, NodeKind};

/// Node outside `Ω` whose height is an affine function of the unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct Ghost {
    pub node: usize,
    /// `(unknown index, weight)` pairs.
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

/// Unknowns at the grid nodes strictly inside `Ω` plus extrapolated ghost
/// nodes carrying the Dirichlet condition `u = ε` on `∂Ω`.
///
/// A ghost `G` is filled along the grid direction `δ` best aligned with the
/// inward normal. With `P_k = G − (1 − k) δ` and the boundary crossing at
/// parameter `s ∈ (0, 1]`, the value at `G` is the quadratic through
/// `(s, ε)` and two interior nodes, chosen as `P_0, P_{-1}` when `s ≥ 1/2`
/// and `P_{-1}, P_{-2}` otherwise so the weights stay bounded.
#[derive(Debug, Clone)]
pub struct Discretization {
    template: GraphGrid,
    unknowns: Vec<usize>,
    unknown_of: Vec<Option<usize>>,
    ghosts: Vec<Ghost>,
    ghost_of: Vec<Option<usize>>,
}

fn lagrange_at_one(points: &[f64]) -> Vec<f64> {
    (0..points.len())
        .map(|j| {
            points
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &t)| (1.0 - t) / (points[j] - t))
                .product()
        })
        .collect()
}

impl Discretization {
    pub fn new(prob: &PlateauProblem) -> Result<Self> {
        let dim = prob.dim();
        let h = prob.h;
        let (shape, origin) = centred_layout(&prob.domain, dim, h, 2);
        let len: usize = shape.iter().product();
        let probe = GraphGrid::new(
            dim,
            shape.clone(),
            origin.clone(),
            h,
            vec![NodeKind::Interior; len],
            vec![1.0; len],
        )?;
        let tol = 1e-9 * h;
        let inside: Vec<bool> = (0..len)
            .map(|i| prob.domain.sdf(&probe.coords(i)) < -tol)
            .collect();
        let unknowns: Vec<usize> = (0..len).filter(|&i| inside[i]).collect();
        if unknowns.is_empty() {
            return Err(Error::Domain(format!("no grid nodes inside the domain at h = {h}")));
        }
        let mut unknown_of = vec![None; len];
        for (k, &i) in unknowns.iter().enumerate() {
            unknown_of[i] = Some(k);
        }
        let offsets = neighbourhood(dim);
        let mut is_ghost = vec![false; len];
        for &i in &unknowns {
            for d in &offsets {
                let j = probe.offset(i, d).expect("layout padding covers the stencil");
                if !inside[j] {
                    is_ghost[j] = true;
                }
            }
        }
        let mut ghosts = Vec::new();
        let mut ghost_of = vec![None; len];
        for g in (0..len).filter(|&g| is_ghost[g]) {
            ghost_of[g] = Some(ghosts.len());
            ghosts.push(Self::ghost(prob, &probe, &offsets, &unknown_of, g)?);
        }
        let kinds: Vec<NodeKind> = (0..len)
            .map(|i| {
                if inside[i] {
                    NodeKind::Interior
                } else if is_ghost[i] {
                    NodeKind::Boundary
                } else {
                    NodeKind::Outside
                }
            })
            .collect();
        let template = GraphGrid::new(dim, shape, origin, h, kinds, vec![1.0; len])?;
        Ok(Self {
            template,
            unknowns,
            unknown_of,
            ghosts,
            ghost_of,
        })
    }

    fn ghost(
        prob: &PlateauProblem,
        probe: &GraphGrid,
        offsets: &[Vec<isize>],
        unknown_of: &[Option<usize>],
        g: usize,
    ) -> Result<Ghost> {
        let x = probe.coords(g);
        let fd = 1e-7 * prob.h;
        let normal: Vec<f64> = (0..x.len())
            .map(|k| {
                let mut a = x.clone();
                let mut b = x.clone();
                a[k] += fd;
                b[k] -= fd;
                -(prob.domain.sdf(&a) - prob.domain.sdf(&b)) / (2.0 * fd)
            })
            .collect();
        let mut best: Option<(f64, &Vec<isize>)> = None;
        for d in offsets {
            let back: Vec<isize> = d.iter().map(|v| -v).collect();
            let Some(p0) = probe.offset(g, &back) else { continue };
            if unknown_of[p0].is_none() {
                continue;
            }
            let norm = (d.iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt();
            let align = -d.iter().zip(&normal).map(|(&v, n)| v as f64 * n).sum::<f64>() / norm;
            if best.is_none_or(|(a, _)| align > a + 1e-12) {
                best = Some((align, d));
            }
        }
        let (_, delta) = best.ok_or_else(|| Error::Domain(format!("ghost node {g} has no interior neighbour")))?;
        let along = |k: isize| -> Option<usize> {
            let step: Vec<isize> = delta.iter().map(|v| v * (k - 1)).collect();
            probe.offset(g, &step).and_then(|j| unknown_of[j])
        };
        let p0 = probe.offset(g, &delta.iter().map(|v| -v).collect::<Vec<_>>()).unwrap();
        let t = prob.domain.crossing(&x, &probe.coords(p0));
        let s = (1.0 - t).clamp(1e-12, 1.0);
        let candidates: [&[isize]; 4] = if s >= 0.5 {
            [&[0, -1], &[-1, -2], &[0], &[-1]]
        } else {
            [&[-1, -2], &[0, -1], &[-1], &[0]]
        };
        for nodes in candidates {
            let ids: Option<Vec<usize>> = nodes.iter().map(|&k| along(k)).collect();
            let Some(ids) = ids else { continue };
            let mut points: Vec<f64> = nodes.iter().map(|&k| k as f64).collect();
            points.push(s);
            let w = lagrange_at_one(&points);
            let terms = ids.iter().zip(&w).map(|(&id, &wt)| (id, wt)).collect();
            return Ok(Ghost {
                node: g,
                terms,
                constant: w[nodes.len()] * prob.epsilon,
            });
        }
        Err(Error::Domain(format!("ghost node {g} cannot be extrapolated")))
    }

    /// Layout and node kinds shared by every state of the problem.
    pub fn template(&self) -> &GraphGrid {
        &self.template
    }

    pub fn unknowns(&self) -> &[usize] {
        &self.unknowns
    }

    pub fn n_unknowns(&self) -> usize {
        self.unknowns.len()
    }

    pub fn unknown_of(&self, node: usize) -> Option<usize> {
        self.unknown_of[node]
    }

    pub fn ghosts(&self) -> &[Ghost] {
        &self.ghosts
    }

    pub fn ghost_of(&self, node: usize) -> Option<&Ghost> {
        self.ghost_of[node].map(|k| &self.ghosts[k])
    }

    /// Full nodal heights from the unknowns; outside nodes are 0.
    pub fn fill(&self, x: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.template.len()];
        for (&i, &v) in self.unknowns.iter().zip(x) {
            u[i] = v;
        }
        for g in &self.ghosts {
            u[g.node] = g.constant + g.terms.iter().map(|&(k, w)| w * x[k]).sum::<f64>();
        }
        u
    }

    /// Contribution of unknown values to the height at `node`, as
    /// `(unknown, weight)` pairs.
    pub fn node_terms(&self, node: usize) -> Vec<(usize, f64)> {
        if let Some(k) = self.unknown_of[node] {
            vec![(k, 1.0)]
        } else if let Some(g) = self.ghost_of(node) {
            g.terms.clone()
        } else {
            Vec::new()
        }
    }

    pub fn grid(&self, x: &[f64]) -> Result<GraphGrid> {
        self.template.with_heights(self.fill(x))
    }

    /// Unknowns read from a grid with this layout.
    pub fn unknowns_from(&self, grid: &GraphGrid) -> Result<Vec<f64>> {
        if grid.shape() != self.template.shape()
            || grid.origin() != self.template.origin()
            || grid.h() != self.template.h()
        {
            return Err(Error::Precondition(
                "grid layout does not match the problem discretization".into(),
            ));
        }
        self.unknowns
            .iter()
            .map(|&i| {
                if grid.is_masked(i) {
                    Ok(grid.height(i))
                } else {
                    Err(Error::Precondition(format!("node {i} inside the domain is not masked")))
                }
            })
            .collect()
    }

    /// Unknowns sampled from a height function.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> Vec<f64> {
        self.unknowns
            .par_iter()
            .map(|&i| f(&self.template.coords(i)))
            .collect()
    }
}
