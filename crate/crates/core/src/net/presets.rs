//! Ready-made structures: fully connected, 1-D convolutional (Toeplitz) and
//! binary-tree networks.

use super::activation::ActivationSpec;
use super::arch::{Architecture, EntrySpec, LayerStructure};
use crate::error::{Error, Result};

struct Indexer(usize);

impl Indexer {
    fn next(&mut self) -> EntrySpec {
        self.0 += 1;
        EntrySpec::Free(self.0 - 1)
    }
}

/// Fully connected network with widths `d_0, ..., d_L`; every entry free.
pub fn dense(widths: &[usize], activation: ActivationSpec, radius: f64) -> Result<Architecture> {
    if widths.len() < 2 {
        return Err(Error::Parameter("dense preset needs at least two widths".into()));
    }
    let mut ix = Indexer(0);
    let layers = widths
        .windows(2)
        .map(|w| LayerStructure {
            d_in: w[0],
            d_out: w[1],
            activation: activation.clone(),
            weights: (0..w[1]).map(|_| (0..w[0]).map(|_| ix.next()).collect()).collect(),
            biases: (0..w[1]).map(|_| ix.next()).collect(),
        })
        .collect();
    let output = (0..widths[widths.len() - 1]).map(|_| ix.next()).collect();
    Architecture::new(widths[0], radius, layers, output)
}

/// `depth` convolutional layers of constant width `width`: each weight matrix
/// is banded Toeplitz, `W[i][j] = k_{j-i+h}` for `|j - i| <= h` where
/// `h = kernel / 2`, so each layer has exactly `kernel` free weights.
pub fn toeplitz1d(
    width: usize,
    kernel: usize,
    depth: usize,
    activation: ActivationSpec,
    radius: f64,
) -> Result<Architecture> {
    if kernel == 0 || kernel.is_multiple_of(2) || kernel > 2 * width - 1 {
        return Err(Error::Parameter(format!(
            "kernel width must be odd and at most 2·width - 1, got {kernel}"
        )));
    }
    if depth == 0 {
        return Err(Error::Parameter("depth must be positive".into()));
    }
    let half = kernel / 2;
    let mut ix = Indexer(0);
    let mut layers = Vec::with_capacity(depth);
    for _ in 0..depth {
        let taps: Vec<EntrySpec> = (0..kernel).map(|_| ix.next()).collect();
        let weights = (0..width)
            .map(|i| {
                (0..width)
                    .map(|j| {
                        let offset = j as isize - i as isize + half as isize;
                        if (0..kernel as isize).contains(&offset) {
                            taps[offset as usize]
                        } else {
                            EntrySpec::Fixed(0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        layers.push(LayerStructure {
            d_in: width,
            d_out: width,
            activation: activation.clone(),
            weights,
            biases: (0..width).map(|_| ix.next()).collect(),
        });
    }
    let output = (0..width).map(|_| ix.next()).collect();
    Architecture::new(width, radius, layers, output)
}

/// Binary tree: each layer pairs up neighbouring units, halving the width
/// (rounding up) until one unit remains. Every neuron sees at most two inputs.
pub fn tree(input_dim: usize, activation: ActivationSpec, radius: f64) -> Result<Architecture> {
    if input_dim == 0 {
        return Err(Error::Parameter("input_dim must be positive".into()));
    }
    let mut ix = Indexer(0);
    let mut layers = Vec::new();
    let mut width = input_dim;
    loop {
        let next = width.div_ceil(2);
        let weights = (0..next)
            .map(|i| {
                (0..width)
                    .map(|j| if j / 2 == i { ix.next() } else { EntrySpec::Fixed(0.0) })
                    .collect()
            })
            .collect();
        layers.push(LayerStructure {
            d_in: width,
            d_out: next,
            activation: activation.clone(),
            weights,
            biases: (0..next).map(|_| ix.next()).collect(),
        });
        width = next;
        if width == 1 {
            break;
        }
    }
    let output = vec![ix.next()];
    Architecture::new(input_dim, radius, layers, output)
}
