//! Seeded random instances: Erdős–Rényi graphs and 4-connected grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Instance;

/// Weights closer to zero than this are redrawn.
pub const MIN_ABS_WEIGHT: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("edge probability must lie in (0,1], got {0}")]
    Probability(f64),
    #[error("weight range [{0}, {1}] is empty or lies inside (-{MIN_ABS_WEIGHT}, {MIN_ABS_WEIGHT})")]
    WeightRange(f64, f64),
    #[error("grid dimensions must be positive with at least 2 nodes")]
    GridSize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology {
    ErdosRenyi { nodes: usize, probability: f64 },
    Grid { width: usize, height: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub topology: Topology,
    pub weight_min: f64,
    pub weight_max: f64,
    pub seed: u64,
}

fn draw_weight(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let w = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
        if w.abs() >= MIN_ABS_WEIGHT {
            return w;
        }
    }
}

pub fn generate_instance(cfg: &GeneratorConfig) -> Result<Instance, GenerateError> {
    let (lo, hi) = (cfg.weight_min, cfg.weight_max);
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() || (lo > -MIN_ABS_WEIGHT && hi < MIN_ABS_WEIGHT) {
        return Err(GenerateError::WeightRange(lo, hi));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = Vec::new();
    let n = match cfg.topology {
        Topology::ErdosRenyi { nodes, probability } => {
            if nodes < 2 {
                return Err(GenerateError::TooFewNodes(nodes));
            }
            if !(probability > 0.0 && probability <= 1.0) {
                return Err(GenerateError::Probability(probability));
            }
            for i in 0..nodes {
                for j in i + 1..nodes {
                    if rng.gen::<f64>() < probability {
                        edges.push((i, j, draw_weight(&mut rng, lo, hi)));
                    }
                }
            }
            nodes
        }
        Topology::Grid { width, height } => {
            if width == 0 || height == 0 || width * height < 2 {
                return Err(GenerateError::GridSize);
            }
            for r in 0..height {
                for c in 0..width {
                    let v = r * width + c;
                    if c + 1 < width {
                        edges.push((v, v + 1, draw_weight(&mut rng, lo, hi)));
                    }
                    if r + 1 < height {
                        edges.push((v, v + width, draw_weight(&mut rng, lo, hi)));
                    }
                }
            }
            width * height
        }
    };
    Ok(Instance::new(n, edges).expect("generated edges are valid"))
}

/// Random graph with weights uniform in `[-1, 1]`.
pub fn random_instance(nodes: usize, probability: f64, seed: u64) -> Result<Instance, GenerateError> {
    generate_instance(&GeneratorConfig {
        topology: Topology::ErdosRenyi { nodes, probability },
        weight_min: -1.0,
        weight_max: 1.0,
        seed,
    })
}

/// Grid with weights uniform in `[-1, 1]`.
pub fn grid_instance(width: usize, height: usize, seed: u64) -> Result<Instance, GenerateError> {
    generate_instance(&GeneratorConfig {
        topology: Topology::Grid { width, height },
        weight_min: -1.0,
        weight_max: 1.0,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::write_instance;

    #[test]
    fn complete_graph_is_deterministic() {
        let a = random_instance(4, 1.0, 7).unwrap();
        let b = random_instance(4, 1.0, 7).unwrap();
        assert_eq!(a.edge_count(), 6);
        assert_eq!(write_instance(&a), write_instance(&b));
        assert!(a.edges().iter().all(|e| e.weight.abs() >= MIN_ABS_WEIGHT && e.weight.abs() <= 1.0));
        let tri = random_instance(3, 1.0, 1).unwrap();
        let pairs: Vec<_> = tri.edges().iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn grid_counts() {
        let g = grid_instance(3, 3, 0).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (9, 12));
        let g = grid_instance(8, 8, 0).unwrap();
        assert_eq!(g.edge_count(), 112);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(random_instance(1, 0.5, 0), Err(GenerateError::TooFewNodes(1)));
        assert_eq!(random_instance(3, 0.0, 0), Err(GenerateError::Probability(0.0)));
        assert!(generate_instance(&GeneratorConfig {
            topology: Topology::Grid { width: 2, height: 2 },
            weight_min: -0.001,
            weight_max: 0.001,
            seed: 0
        })
        .is_err());
        assert_eq!(grid_instance(1, 1, 0), Err(GenerateError::GridSize));
    }
}
