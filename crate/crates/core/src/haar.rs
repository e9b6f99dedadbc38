//! Haar-random pure states: independent complex Gaussian components,
//! normalized.

use crate::error::{Error, Result};
use crate::rng::{RunSeed, SampleStream};
use crate::state::{PureState, StateSet};

pub(crate) fn draw_state(dim: usize, stream: &mut SampleStream) -> PureState {
    loop {
        let v: Vec<_> = (0..dim).map(|_| stream.complex_normal()).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

pub fn haar_random_state(dim: usize, seed: RunSeed) -> Result<PureState> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(draw_state(dim, &mut seed.stream()))
}

/// `count` independent Haar states drawn consecutively from one stream.
pub fn haar_random_state_set(dim: usize, count: usize, seed: RunSeed) -> Result<StateSet> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if count == 0 {
        return Err(Error::InvalidCount(0, 1));
    }
    let mut stream = seed.stream();
    StateSet::new((0..count).map(|_| draw_state(dim, &mut stream)).collect())
}
