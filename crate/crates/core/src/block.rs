//! The weighted direct-sum space over a finite set of quadrature nodes.
//!
//! A node `i` carries a positive mass `μ_i` and a fiber `C^{d_i}`. Elements
//! are lists of fiber vectors with inner product `Σ μ_i <F_i, G_i>`. The map
//! `F ↦ (√μ_i F_i)_i` is an isometry onto plain `C^D`, `D = Σ d_i`; every
//! adjoint in this crate is taken in that flattened picture.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{inner, CVector, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurePoints {
    weights: Vec<f64>,
    block_dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl MeasurePoints {
    pub fn new(weights: Vec<f64>, block_dims: Vec<usize>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::DimensionMismatch("measure needs at least one node".into()));
        }
        if weights.len() != block_dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights but {} block dimensions",
                weights.len(),
                block_dims.len()
            )));
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::NonPositiveWeight { index, weight });
            }
        }
        if let Some(index) = block_dims.iter().position(|&d| d == 0) {
            return Err(Error::ZeroBlockDim { index });
        }
        let mut offsets = Vec::with_capacity(block_dims.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &d in &block_dims {
            acc += d;
            offsets.push(acc);
        }
        Ok(MeasurePoints {
            weights,
            block_dims,
            offsets,
        })
    }

    /// `m` nodes of unit weight, each with fiber dimension `dim`.
    pub fn uniform(m: usize, dim: usize) -> Result<Self> {
        MeasurePoints::new(vec![1.0; m], vec![dim; m])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Dimension of the flattened space.
    pub fn total_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Start of block `i` in the flattened vector.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Same nodes, re-ordered by `perm` (node `perm[k]` becomes node `k`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        MeasurePoints::new(
            perm.iter().map(|&i| self.weights[i]).collect(),
            perm.iter().map(|&i| self.block_dims[i]).collect(),
        )
    }
}

pub(crate) fn same_space(a: &Arc<MeasurePoints>, b: &Arc<MeasurePoints>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    space: Arc<MeasurePoints>,
    blocks: Vec<CVector>,
}

impl BlockVector {
    pub fn new(space: Arc<MeasurePoints>, blocks: Vec<CVector>) -> Result<Self> {
        if blocks.len() != space.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} blocks for {} nodes",
                blocks.len(),
                space.len()
            )));
        }
        for (i, (b, &d)) in blocks.iter().zip(space.block_dims()).enumerate() {
            if b.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "block {i} has length {}, expected {d}",
                    b.len()
                )));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("block {i}")));
            }
        }
        Ok(BlockVector { space, blocks })
    }

    pub fn zeros(space: Arc<MeasurePoints>) -> Self {
        let blocks = space.block_dims().iter().map(|&d| CVector::zeros(d)).collect();
        BlockVector { space, blocks }
    }

    pub fn space(&self) -> &Arc<MeasurePoints> {
        &self.space
    }

    pub fn blocks(&self) -> &[CVector] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CVector {
        &self.blocks[i]
    }

    /// Isometric image in `C^D`: block `i` scaled by `√μ_i`.
    pub fn flatten(&self) -> CVector {
        let mut out = CVector::zeros(self.space.total_dim());
        for (i, b) in self.blocks.iter().enumerate() {
            let s = self.space.weights()[i].sqrt();
            let off = self.space.offset(i);
            for (k, z) in b.iter().enumerate() {
                out[off + k] = z * s;
            }
        }
        out
    }

    /// Inverse of [`BlockVector::flatten`].
    pub fn unflatten(space: Arc<MeasurePoints>, flat: &CVector) -> Result<Self> {
        if flat.len() != space.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "flattened vector has length {}, expected {}",
                flat.len(),
                space.total_dim()
            )));
        }
        let blocks = (0..space.len())
            .map(|i| {
                let s = space.weights()[i].sqrt();
                flat.rows(space.offset(i), space.block_dims()[i]).map(|z| z / s)
            })
            .collect();
        BlockVector::new(space, blocks)
    }

    /// `Σ μ_i <F_i, G_i>`.
    pub fn weighted_inner(&self, other: &BlockVector) -> Result<C64> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .zip(self.space.weights())
            .map(|((a, b), &w)| inner(a, b) * w)
            .sum())
    }

    /// `||F||_2^2`, always real and non-negative.
    pub fn norm_sq(&self) -> f64 {
        self.blocks
            .iter()
            .zip(self.space.weights())
            .map(|(b, &w)| w * b.norm_squared())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(weight: f64) -> Arc<MeasurePoints> {
        Arc::new(MeasurePoints::new(vec![weight], vec![2]).unwrap())
    }

    fn e1(space: &Arc<MeasurePoints>) -> BlockVector {
        BlockVector::new(
            space.clone(),
            vec![CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])],
        )
        .unwrap()
    }

    #[test]
    fn weighted_inner_scales_with_weight() {
        let a = single(1.0);
        assert_eq!(e1(&a).weighted_inner(&e1(&a)).unwrap(), C64::new(1.0, 0.0));
        let b = single(3.0);
        assert_eq!(e1(&b).weighted_inner(&e1(&b)).unwrap(), C64::new(3.0, 0.0));
    }

    #[test]
    fn flatten_scales_by_root_weight() {
        let s = single(4.0);
        let flat = e1(&s).flatten();
        assert_eq!(flat[0], C64::new(2.0, 0.0));
        assert_eq!(flat[1], C64::new(0.0, 0.0));
        assert!(BlockVector::zeros(s).flatten().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn rejects_nonpositive_weights_and_empty_blocks() {
        assert!(matches!(
            MeasurePoints::new(vec![1.0, 0.0], vec![1, 1]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            MeasurePoints::new(vec![-2.0], vec![1]),
            Err(Error::NonPositiveWeight { index: 0, .. })
        ));
        assert!(matches!(
            MeasurePoints::new(vec![1.0], vec![0]),
            Err(Error::ZeroBlockDim { index: 0 })
        ));
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = single(1.0);
        let b = single(2.0);
        assert_eq!(e1(&a).weighted_inner(&e1(&b)), Err(Error::SpaceMismatch));
        // structurally equal spaces are accepted
        let c = single(1.0);
        assert!(e1(&a).weighted_inner(&e1(&c)).is_ok());
    }

    #[test]
    fn block_lengths_are_validated() {
        let s = single(1.0);
        let r = BlockVector::new(s, vec![CVector::zeros(3)]);
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }
}
