//! Synthetic clouds with known homology.
//!
//! Clusters are centred at `separation / √2 · e_i`, so any two centres are
//! exactly `separation` apart. Cluster noise is an isotropic Gaussian vector
//! with typical norm `sigma`, truncated at norm `3·sigma`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointcloud::{PointCloud, Role};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthSpec {
    /// `n` evenly spaced points on a circle of `radius` in the first two axes,
    /// plus isotropic Gaussian noise of per-axis deviation `sigma`.
    Circle {
        n: usize,
        radius: f64,
        sigma: f64,
        dim: usize,
        seed: u64,
    },
    Clusters {
        k: usize,
        per_cluster: usize,
        separation: f64,
        sigma: f64,
        dim: usize,
        seed: u64,
    },
    /// `n` points uniform on `[low, high]^dim`.
    UniformCube {
        n: usize,
        dim: usize,
        low: f64,
        high: f64,
        seed: u64,
    },
    /// Regular hexagon of circumradius `radius`.
    Hexagon { radius: f64, dim: usize },
    /// Axis-aligned square with corners `(0,0)`, `(side,0)`, `(side,side)`, `(0,side)`.
    Square { side: f64, dim: usize },
    /// Points on the first axis.
    Line { positions: Vec<f64>, dim: usize },
}

impl SynthSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SynthSpec::Circle { .. } => "circle",
            SynthSpec::Clusters { .. } => "clusters",
            SynthSpec::UniformCube { .. } => "uniform_cube",
            SynthSpec::Hexagon { .. } => "hexagon",
            SynthSpec::Square { .. } => "square",
            SynthSpec::Line { .. } => "line",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(format!("{}: {msg}", self.name())));
        match *self {
            SynthSpec::Circle { n, sigma, dim, .. } => {
                if n == 0 || dim < 2 || !(sigma >= 0.0) {
                    return bad("needs n >= 1, dim >= 2, sigma >= 0");
                }
            }
            SynthSpec::Clusters {
                k,
                per_cluster,
                separation,
                sigma,
                dim,
                ..
            } => {
                if k == 0 || per_cluster == 0 || !(separation > 0.0) || !(sigma >= 0.0) || k > dim {
                    return bad("needs k >= 1, per_cluster >= 1, separation > 0, sigma >= 0, k <= dim");
                }
            }
            SynthSpec::UniformCube { n, dim, low, high, .. } => {
                if n == 0 || dim == 0 || !(low <= high) {
                    return bad("needs n >= 1, dim >= 1, low <= high");
                }
            }
            SynthSpec::Hexagon { dim, .. } | SynthSpec::Square { dim, .. } => {
                if dim < 2 {
                    return bad("needs dim >= 2");
                }
            }
            SynthSpec::Line { ref positions, dim } => {
                if positions.is_empty() || dim == 0 {
                    return bad("needs at least one position and dim >= 1");
                }
            }
        }
        Ok(())
    }
}

/// Deterministic cloud for `spec`, tagged with `role`.
pub fn generate(spec: &SynthSpec, role: Role) -> Result<PointCloud> {
    spec.validate()?;
    let source = format!("synth:{}", serde_json::to_string(spec).expect("spec serializes"));
    let planar = |pts: Vec<(f64, f64)>, dim: usize| -> Vec<f64> {
        let mut coords = vec![0.0; pts.len() * dim];
        for (row, (x, y)) in coords.chunks_exact_mut(dim).zip(pts) {
            row[0] = x;
            row[1] = y;
        }
        coords
    };
    let (coords, dim) = match *spec {
        SynthSpec::Circle {
            n,
            radius,
            sigma,
            dim,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ring: Vec<(f64, f64)> = (0..n)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / n as f64;
                    (radius * a.cos(), radius * a.sin())
                })
                .collect();
            let mut coords = planar(ring, dim);
            if sigma > 0.0 {
                for c in &mut coords {
                    *c += sigma * rng.sample::<f64, _>(StandardNormal);
                }
            }
            (coords, dim)
        }
        SynthSpec::Clusters {
            k,
            per_cluster,
            separation,
            sigma,
            dim,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let offset = separation / std::f64::consts::SQRT_2;
            let mut coords = Vec::with_capacity(k * per_cluster * dim);
            let mut noise = vec![0.0; dim];
            for cluster in 0..k {
                for _ in 0..per_cluster {
                    truncated_gaussian(&mut rng, sigma, &mut noise);
                    coords.extend(noise.iter().enumerate().map(
                        |(axis, z)| {
                            if axis == cluster {
                                offset + z
                            } else {
                                *z
                            }
                        },
                    ));
                }
            }
            (coords, dim)
        }
        SynthSpec::UniformCube {
            n,
            dim,
            low,
            high,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coords = (0..n * dim)
                .map(|_| if low == high { low } else { rng.random_range(low..=high) })
                .collect();
            (coords, dim)
        }
        SynthSpec::Hexagon { radius, dim } => {
            let pts = (0..6)
                .map(|i| {
                    let a = std::f64::consts::PI / 3.0 * i as f64;
                    (radius * a.cos(), radius * a.sin())
                })
                .collect();
            (planar(pts, dim), dim)
        }
        SynthSpec::Square { side, dim } => (
            planar(vec![(0.0, 0.0), (side, 0.0), (side, side), (0.0, side)], dim),
            dim,
        ),
        SynthSpec::Line { ref positions, dim } => {
            let mut coords = vec![0.0; positions.len() * dim];
            for (row, &x) in coords.chunks_exact_mut(dim).zip(positions) {
                row[0] = x;
            }
            (coords, dim)
        }
    };
    PointCloud::new(coords, dim, role, source)
}

// isotropic, typical norm `sigma`, norm capped at 3·sigma
fn truncated_gaussian(rng: &mut ChaCha8Rng, sigma: f64, out: &mut [f64]) {
    if sigma == 0.0 {
        out.fill(0.0);
        return;
    }
    let scale = sigma / (out.len() as f64).sqrt();
    for z in out.iter_mut() {
        *z = scale * rng.sample::<f64, _>(StandardNormal);
    }
    let norm = out.iter().map(|z| z * z).sum::<f64>().sqrt();
    if norm > 3.0 * sigma {
        let shrink = 3.0 * sigma / norm;
        out.iter_mut().for_each(|z| *z *= shrink);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointcloud::pairwise_distances;

    #[test]
    fn deterministic() {
        let spec = SynthSpec::Clusters {
            k: 3,
            per_cluster: 10,
            separation: 10.0,
            sigma: 0.5,
            dim: 8,
            seed: 4,
        };
        assert_eq!(
            generate(&spec, Role::Train).unwrap(),
            generate(&spec, Role::Train).unwrap()
        );
    }

    #[test]
    fn cluster_separation_bound() {
        for seed in 0..5 {
            let (k, per, sep, sigma) = (4, 15, 3.0, 0.4);
            let spec = SynthSpec::Clusters {
                k,
                per_cluster: per,
                separation: sep,
                sigma,
                dim: 6,
                seed,
            };
            let c = generate(&spec, Role::Train).unwrap();
            let dm = pairwise_distances(&c);
            for i in 0..c.len() {
                for j in 0..c.len() {
                    if i / per != j / per {
                        assert!(dm.get(i, j) > sep - 6.0 * sigma);
                    }
                }
            }
        }
    }

    #[test]
    fn fixtures_shapes() {
        let hex = generate(&SynthSpec::Hexagon { radius: 1.0, dim: 3 }, Role::Unlabeled).unwrap();
        assert_eq!((hex.len(), hex.dim()), (6, 3));
        assert!(hex
            .points()
            .all(|p| ((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() < 1e-12));
        let sq = generate(&SynthSpec::Square { side: 1.0, dim: 2 }, Role::Unlabeled).unwrap();
        assert_eq!(sq.point(2), &[1.0, 1.0]);
        let line = generate(
            &SynthSpec::Line {
                positions: vec![0.0, 1.0, 3.0],
                dim: 1,
            },
            Role::Unlabeled,
        )
        .unwrap();
        assert_eq!(line.coords(), &[0.0, 1.0, 3.0]);
    }

    #[test]
    fn cube_bounds() {
        let c = generate(
            &SynthSpec::UniformCube {
                n: 200,
                dim: 3,
                low: -1.0,
                high: 2.0,
                seed: 1,
            },
            Role::Ood,
        )
        .unwrap();
        assert!(c.coords().iter().all(|&x| (-1.0..=2.0).contains(&x)));
        assert_eq!(c.role, Role::Ood);
    }

    #[test]
    fn invalid_specs() {
        let too_many = SynthSpec::Clusters {
            k: 5,
            per_cluster: 1,
            separation: 1.0,
            sigma: 0.0,
            dim: 3,
            seed: 0,
        };
        assert!(generate(&too_many, Role::Train).is_err());
        assert!(generate(
            &SynthSpec::Line {
                positions: vec![],
                dim: 1
            },
            Role::Train
        )
        .is_err());
        assert!(generate(&SynthSpec::Hexagon { radius: 1.0, dim: 1 }, Role::Train).is_err());
    }
}
