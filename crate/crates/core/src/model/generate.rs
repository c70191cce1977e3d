use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::wts::Wts;
use crate::{Error, Result};

/// How edge weights of generated systems are chosen. Self-loops draw from
/// the same model as moves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightModel {
    Unit,
    Uniform { lo: f64, hi: f64, seed: u64 },
}

impl Default for WeightModel {
    fn default() -> Self {
        WeightModel::Uniform {
            lo: 1.0,
            hi: 10.0,
            seed: 0,
        }
    }
}

struct WeightSource {
    model: WeightModel,
    rng: ChaCha8Rng,
}

impl WeightSource {
    fn new(model: WeightModel) -> Result<Self> {
        let seed = match model {
            WeightModel::Unit => 0,
            WeightModel::Uniform { lo, hi, seed } => {
                if !(0.0 <= lo && lo <= hi && hi.is_finite()) {
                    return Err(Error::invalid(format!("bad weight range [{lo}, {hi}]")));
                }
                seed
            }
        };
        Ok(Self {
            model,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    fn next(&mut self) -> f64 {
        match self.model {
            WeightModel::Unit => 1.0,
            WeightModel::Uniform { lo, hi, .. } if lo == hi => lo,
            WeightModel::Uniform { lo, hi, .. } => self.rng.gen_range(lo..hi),
        }
    }
}

/// 4-connected `rows × cols` grid with regions numbered row-major from 0.
/// The initial region is 0.
pub fn generate_grid(rows: usize, cols: usize, self_loops: bool, weights: WeightModel) -> Result<Wts> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("grid dimensions must be at least 1"));
    }
    let mut source = WeightSource::new(weights)?;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let q = r * cols + c;
            if self_loops {
                edges.push((q, q, source.next()));
            }
            if r > 0 {
                edges.push((q, q - cols, source.next()));
            }
            if r + 1 < rows {
                edges.push((q, q + cols, source.next()));
            }
            if c > 0 {
                edges.push((q, q - 1, source.next()));
            }
            if c + 1 < cols {
                edges.push((q, q + 1, source.next()));
            }
        }
    }
    Wts::from_indexed(0, rows * cols, 0, edges)
}

/// Random strongly connected system. Every state gets a self-loop and one
/// edge of a random Hamiltonian cycle; further random edges are added until
/// the average out-degree (self-loops included) reaches `avg_degree`.
pub fn generate_random_wts(
    n_states: usize,
    avg_degree: f64,
    seed: u64,
    weight_range: (f64, f64),
) -> Result<Wts> {
    if n_states == 0 {
        return Err(Error::invalid("n_states must be at least 1"));
    }
    if !(avg_degree >= 1.0) {
        return Err(Error::invalid("avg_degree must be at least 1"));
    }
    if avg_degree > n_states as f64 {
        return Err(Error::invalid(format!(
            "avg_degree {avg_degree} exceeds the {n_states} possible successors"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = WeightSource::new(WeightModel::Uniform {
        lo: weight_range.0,
        hi: weight_range.1,
        seed: seed ^ 0x9e37_79b9_7f4a_7c15,
    })?;

    let mut present: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    fn add(present: &mut HashSet<(usize, usize)>, edges: &mut Vec<(usize, usize)>, s: usize, d: usize) {
        if present.insert((s, d)) {
            edges.push((s, d));
        }
    }
    for q in 0..n_states {
        add(&mut present, &mut edges, q, q);
    }
    let mut order: Vec<usize> = (0..n_states).collect();
    order.shuffle(&mut rng);
    for (i, &q) in order.iter().enumerate() {
        add(&mut present, &mut edges, q, order[(i + 1) % n_states]);
    }
    let target = ((avg_degree * n_states as f64).round() as usize).min(n_states * n_states);
    if target > edges.len() {
        let missing = target - edges.len();
        let free = n_states * n_states - edges.len();
        if missing * 3 < free {
            while edges.len() < target {
                let s = rng.gen_range(0..n_states);
                let d = rng.gen_range(0..n_states);
                add(&mut present, &mut edges, s, d);
            }
        } else {
            // dense: draw from the explicit complement
            let mut rest: Vec<(usize, usize)> = (0..n_states)
                .flat_map(|s| (0..n_states).map(move |d| (s, d)))
                .filter(|p| !present.contains(p))
                .collect();
            rest.shuffle(&mut rng);
            for (s, d) in rest.into_iter().take(missing) {
                add(&mut present, &mut edges, s, d);
            }
        }
    }
    edges.sort_unstable();
    let weighted: Vec<_> = edges.into_iter().map(|(s, d)| (s, d, weights.next())).collect();
    Wts::from_indexed(0, n_states, 0, weighted)
}
