//! Cache-sized column chunks for transforms along the third mode.
//!
//! Tensors store frontal slices contiguously, so a transform along mode 3
//! walks each tube with stride `n1·n2`. Workers instead take a run of
//! `CHUNK` spatial positions across all slices, transform it in a local
//! buffer, and write each output row back once.

use crate::tensor::Tensor3;

/// Spatial positions handled per chunk.
pub(crate) const CHUNK: usize = 256;

/// Shared write access to a buffer from parallel chunk workers.
pub(crate) struct RawBlock {
    ptr: *mut f64,
    len: usize,
}

// SAFETY: workers only write through `run`, and the chunk decomposition
// gives every worker a disjoint set of spatial positions.
unsafe impl Send for RawBlock {}
unsafe impl Sync for RawBlock {}

impl RawBlock {
    pub fn new(t: &mut Tensor3) -> Self {
        Self::from_slice(t.as_mut_slice())
    }

    pub fn from_slice(data: &mut [f64]) -> Self {
        RawBlock {
            ptr: data.as_mut_ptr(),
            len: data.len(),
        }
    }

    /// # Safety
    /// No two live runs may overlap, and the source buffer must outlive
    /// every run.
    #[allow(clippy::mut_from_ref)]
    pub unsafe fn run(&self, offset: usize, width: usize) -> &mut [f64] {
        assert!(offset + width <= self.len);
        std::slice::from_raw_parts_mut(self.ptr.add(offset), width)
    }
}

pub(crate) fn chunk_starts(len: usize) -> Vec<usize> {
    (0..len).step_by(CHUNK).collect()
}
