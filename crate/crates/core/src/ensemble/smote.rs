use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::EnsembleError;
use crate::seeds;
use crate::varfeat::{FeatureMatrix, RowOrigin};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k: usize,
    /// Desired minority / majority count after augmentation.
    pub target_ratio: f64,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig { k: 5, target_ratio: 1.0, seed: 0 }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Appends synthetic minority rows `x + u (x_nn - x)` until the minority
/// reaches `round(target_ratio * n_majority)`. Original rows are kept as-is
/// and in place; synthetic rows record both parents in `origins`.
pub fn smote(m: &FeatureMatrix, cfg: &SmoteConfig) -> Result<FeatureMatrix, EnsembleError> {
    if cfg.k == 0 || !(cfg.target_ratio > 0.0) {
        return Err(EnsembleError::InvalidConfig("k must be >= 1 and target_ratio > 0".into()));
    }
    let [n0, n1] = m.class_counts();
    let (minority, n_min, n_maj) = if n1 < n0 { (1u8, n1, n0) } else { (0u8, n0, n1) };
    let goal = (cfg.target_ratio * n_maj as f64).round() as usize;
    let mut out = m.clone();
    if goal <= n_min {
        return Ok(out);
    }
    if n_min < cfg.k + 1 {
        return Err(EnsembleError::TooFewMinority { have: n_min, need: cfg.k + 1 });
    }
    let members: Vec<usize> = (0..m.n_rows()).filter(|&i| m.labels[i] == minority).collect();
    let neighbors: Vec<Vec<usize>> = members
        .iter()
        .map(|&i| {
            let mut d: Vec<(f64, usize)> = members
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (sq_dist(m.row(i), m.row(j)), j))
                .collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            d.into_iter().take(cfg.k).map(|x| x.1).collect()
        })
        .collect();
    let mut rng = seeds::sub_rng(cfg.seed, 0x5307E);
    let mut row = vec![0.0; m.n_cols()];
    for _ in n_min..goal {
        let a = rng.random_range(0..members.len());
        let nb = neighbors[a][rng.random_range(0..neighbors[a].len())];
        let p = members[a];
        let u = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        };
        for (j, v) in row.iter_mut().enumerate() {
            let x = m.get(p, j);
            *v = x + u * (m.get(nb, j) - x);
        }
        let origin = RowOrigin::Synthetic { parent: m.origins[p].parents()[0], neighbor: m.origins[nb].parents()[0] };
        out.push_row(&row, minority, origin);
    }
    Ok(out)
}
