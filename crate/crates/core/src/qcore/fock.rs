use std::collections::HashMap;

use crate::error::{invalid, Result};

/// Binomial coefficient as `f64`; exact for the sizes used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Occupation-number basis of `particles` bosons in `modes` modes.
///
/// Tuples are stored in ascending lexicographic order, so for three modes
/// and one particle the order is `(0,0,1), (0,1,0), (1,0,0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockBasis {
    modes: usize,
    particles: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl FockBasis {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[usize] {
        &self.states[i]
    }

    pub fn index_of(&self, occupations: &[usize]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    /// Label such as `(1,0,2)`.
    pub fn label(&self, i: usize) -> String {
        occupation_label(&self.states[i])
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| occupation_label(s)).collect()
    }
}

pub(crate) fn occupation_label(occ: &[usize]) -> String {
    let inner: Vec<String> = occ.iter().map(|n| n.to_string()).collect();
    format!("({})", inner.join(","))
}

pub fn fock_enumerate(modes: usize, particles: usize) -> Result<FockBasis> {
    if modes == 0 {
        return Err(invalid("Fock basis needs at least one mode"));
    }
    let mut states = Vec::with_capacity(binomial(particles + modes - 1, modes - 1) as usize);
    let mut current = vec![0usize; modes];
    fill(&mut states, &mut current, 0, particles);
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(FockBasis {
        modes,
        particles,
        states,
        index,
    })
}

fn fill(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, mode: usize, remaining: usize) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        out.push(current.clone());
        return;
    }
    for n in 0..=remaining {
        current[mode] = n;
        fill(out, current, mode + 1, remaining - n);
    }
    current[mode] = 0;
}
