//! Solution-quality metrics over output distributions and training traces.

use crate::error::{Error, Result};
use crate::simulator::{ShotHistogram, Statevector};

/// Probability mass on proper colorings.
pub fn accuracy_from_probabilities(probs: &[f64], proper: &[bool]) -> Result<f64> {
    if probs.len() != proper.len() {
        return Err(Error::DimensionMismatch {
            expected: proper.len(),
            got: probs.len(),
        });
    }
    Ok(probs.iter().zip(proper).filter(|(_, &ok)| ok).map(|(p, _)| p).sum())
}

/// Exact accuracy of a state.
pub fn accuracy(state: &Statevector, proper: &[bool]) -> Result<f64> {
    accuracy_from_probabilities(&state.probabilities(), proper)
}

/// Fraction of shots landing on proper colorings.
pub fn shot_accuracy(hist: &ShotHistogram, proper: &[bool]) -> Result<f64> {
    let dim = 1usize << hist.n_qubits();
    if dim != proper.len() {
        return Err(Error::DimensionMismatch {
            expected: proper.len(),
            got: dim,
        });
    }
    if hist.total_shots() == 0 {
        return Err(Error::InvalidArgument("empty histogram".into()));
    }
    let good: u64 = hist.iter().filter(|&(b, _)| proper[b]).map(|(_, c)| c).sum();
    Ok(good as f64 / hist.total_shots() as f64)
}

/// Index of the largest probability, ties to the lowest index.
pub fn modal_index(probs: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &p) in probs.iter().enumerate() {
        if best.is_none_or(|b| p > probs[b]) {
            best = Some(i);
        }
    }
    best
}

/// Number of trailing iterations averaged for a trace of length `len`.
pub fn trailing_window(len: usize, trailing_fraction: f64) -> usize {
    ((trailing_fraction * len as f64).ceil() as usize).clamp(1, len.max(1))
}

/// Fraction of the last `⌈fraction·T⌉` iterations whose modal bitstring is a
/// proper coloring.
pub fn most_likely_accuracy(modal_correct: &[bool], trailing_fraction: f64) -> Result<f64> {
    if !(trailing_fraction > 0.0 && trailing_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "trailing fraction {trailing_fraction} outside (0, 1]"
        )));
    }
    if modal_correct.is_empty() {
        return Err(Error::InvalidArgument("empty trace".into()));
    }
    let w = trailing_window(modal_correct.len(), trailing_fraction);
    let hits = modal_correct[modal_correct.len() - w..].iter().filter(|&&c| c).count();
    Ok(hits as f64 / w as f64)
}
