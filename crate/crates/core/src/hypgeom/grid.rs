use serde::{Deserialize, Serialize};

use super::domain::Domain;
use crate::error::{Error, Result};

/// Role of a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Outside = 0,
    Interior = 1,
    /// Carries data fixed by the boundary condition.
    Boundary = 2,
}

impl NodeKind {
    pub fn is_masked(self) -> bool {
        self != NodeKind::Outside
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(NodeKind::Outside),
            1 => Some(NodeKind::Interior),
            2 => Some(NodeKind::Boundary),
            _ => None,
        }
    }
}

/// Positive height function on a uniform grid over a masked domain.
///
/// Nodes are stored with axis 0 varying fastest. Node `i` sits at
/// `origin + h * multi_index(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphGrid {
    dim: usize,
    shape: Vec<usize>,
    strides: Vec<usize>,
    origin: Vec<f64>,
    h: f64,
    kind: Vec<NodeKind>,
    u: Vec<f64>,
}

/// Shape and origin of a grid centred on the origin that covers `domain`
/// with `pad` extra layers of nodes on every side.
pub fn centred_layout(domain: &Domain, dim: usize, h: f64, pad: usize) -> (Vec<usize>, Vec<f64>) {
    let ext = domain.half_extents(dim);
    let mut shape = Vec::with_capacity(dim);
    let mut origin = Vec::with_capacity(dim);
    for e in ext {
        // small slack so nodes lying exactly on ∂Ω are not lost to rounding
        let m = (e / h - 1e-9).ceil().max(0.0) as usize + pad;
        shape.push(2 * m + 1);
        origin.push(-(m as f64) * h);
    }
    (shape, origin)
}

impl GraphGrid {
    pub fn new(
        dim: usize,
        shape: Vec<usize>,
        origin: Vec<f64>,
        h: f64,
        kind: Vec<NodeKind>,
        u: Vec<f64>,
    ) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Domain(format!("grid dimension must be 2 or 3, got {dim}")));
        }
        if shape.len() != dim || origin.len() != dim {
            return Err(Error::Domain("shape/origin length must equal dimension".into()));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Domain(format!("grid spacing must be > 0, got {h}")));
        }
        let len: usize = shape.iter().product();
        if kind.len() != len || u.len() != len {
            return Err(Error::Domain(format!(
                "expected {len} nodes, got {} kinds and {} heights",
                kind.len(),
                u.len()
            )));
        }
        let mut strides = vec![1; dim];
        for k in 1..dim {
            strides[k] = strides[k - 1] * shape[k - 1];
        }
        let grid = Self {
            dim,
            shape,
            strides,
            origin,
            h,
            kind,
            u,
        };
        grid.check_heights()?;
        grid.check_connected()?;
        Ok(grid)
    }

    fn check_heights(&self) -> Result<()> {
        for (i, (&k, &v)) in self.kind.iter().zip(&self.u).enumerate() {
            if k.is_masked() && !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!(
                    "height {v} at node {i} ({:?}) must be finite and > 0",
                    self.coords(i)
                )));
            }
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<()> {
        let Some(start) = self.kind.iter().position(|k| k.is_masked()) else {
            return Err(Error::Domain("mask is empty".into()));
        };
        let mut seen = vec![false; self.len()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for axis in 0..self.dim {
                for step in [-1isize, 1] {
                    let mut delta = [0isize; 3];
                    delta[axis] = step;
                    if let Some(j) = self.offset(i, &delta[..self.dim]) {
                        if !seen[j] && self.kind[j].is_masked() {
                            seen[j] = true;
                            count += 1;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        let masked = self.kind.iter().filter(|k| k.is_masked()).count();
        if count != masked {
            return Err(Error::Domain(format!(
                "mask is not connected ({count} of {masked} nodes reachable)"
            )));
        }
        Ok(())
    }

    /// Replaces the heights, re-checking positivity.
    pub fn with_heights(&self, u: Vec<f64>) -> Result<Self> {
        if u.len() != self.len() {
            return Err(Error::Domain("height vector length mismatch".into()));
        }
        let grid = Self { u, ..self.clone() };
        grid.check_heights()?;
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.kind.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kind.is_empty()
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kind
    }

    pub fn kind(&self, i: usize) -> NodeKind {
        self.kind[i]
    }

    pub fn heights(&self) -> &[f64] {
        &self.u
    }

    pub fn height(&self, i: usize) -> f64 {
        self.u[i]
    }

    pub fn multi_index(&self, i: usize) -> [usize; 3] {
        let mut mi = [0; 3];
        let mut rest = i;
        for k in 0..self.dim {
            mi[k] = rest % self.shape[k];
            rest /= self.shape[k];
        }
        mi
    }

    pub fn index(&self, mi: &[usize]) -> usize {
        mi.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn coords(&self, i: usize) -> Vec<f64> {
        let mi = self.multi_index(i);
        (0..self.dim)
            .map(|k| self.origin[k] + self.h * mi[k] as f64)
            .collect()
    }

    /// Node at `i + delta`, if it lies inside the array.
    pub fn offset(&self, i: usize, delta: &[isize]) -> Option<usize> {
        let mi = self.multi_index(i);
        let mut j = 0;
        for k in 0..self.dim {
            let d = delta.get(k).copied().unwrap_or(0);
            let m = mi[k] as isize + d;
            if m < 0 || m >= self.shape[k] as isize {
                return None;
            }
            j += m as usize * self.strides[k];
        }
        Some(j)
    }

    pub fn is_masked(&self, i: usize) -> bool {
        self.kind[i].is_masked()
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.kind[i] == NodeKind::Interior)
            .collect()
    }

    /// All offsets in `{-1, 0, 1}^dim` except zero.
    pub fn neighbourhood(&self) -> Vec<Vec<isize>> {
        neighbourhood(self.dim)
    }

    /// Whether every node of the `3^dim` block around `i` satisfies `pred`.
    pub fn block_all(&self, i: usize, pred: impl Fn(usize) -> bool) -> bool {
        neighbourhood(self.dim)
            .iter()
            .all(|d| self.offset(i, d).is_some_and(&pred))
    }
}

pub(crate) fn neighbourhood(dim: usize) -> Vec<Vec<isize>> {
    let total = 3usize.pow(dim as u32);
    (0..total)
        .map(|mut code| {
            (0..dim)
                .map(|_| {
                    let d = (code % 3) as isize - 1;
                    code /= 3;
                    d
                })
                .collect::<Vec<_>>()
        })
        .filter(|d: &Vec<isize>| d.iter().any(|&v| v != 0))
        .collect()
}
