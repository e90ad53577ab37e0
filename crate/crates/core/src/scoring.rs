//! Dual-window anomaly scores over a series of signature vectors.
//!
//! For each timestep the most recent `w` prior signatures form a context
//! matrix whose top left singular vector summarizes normal behaviour. The raw
//! score is `Z_t = max_w (1 - sigma_t . summary_w)` over the short and long
//! windows, and the final score keeps only increases:
//! `Z*_t = max(Z_t - Z_{t-1}, 0)`.
//!
//! Windows warm-start: while fewer than `w` prior signatures exist, all of
//! them are used. The first timestep has no context and scores zero.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dos::l2_normalize;
use crate::error::{Result, ScpdError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoringConfig {
    pub short_window: usize,
    pub long_window: usize,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig { short_window: 5, long_window: 10 }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<()> {
        if self.short_window < 1 || self.short_window > self.long_window {
            return Err(ScpdError::InvalidConfig(format!(
                "windows must satisfy 1 <= short ({}) <= long ({})",
                self.short_window, self.long_window
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSeries {
    pub timesteps: Vec<usize>,
    pub z: Vec<f64>,
    pub z_star: Vec<f64>,
}

impl ScoreSeries {
    pub fn len(&self) -> usize {
        self.timesteps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timesteps.is_empty()
    }

    /// All timesteps ordered by decreasing `Z*`, earlier timestep first on ties.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.z_star[b].total_cmp(&self.z_star[a]).then(self.timesteps[a].cmp(&self.timesteps[b]))
        });
        idx.into_iter().map(|i| self.timesteps[i]).collect()
    }

    pub fn top_n(&self, n: usize) -> Vec<usize> {
        let mut r = self.ranking();
        r.truncate(n);
        r
    }

    /// Relabel the series with the given timesteps (same length).
    pub fn with_timesteps(mut self, timesteps: Vec<usize>) -> Self {
        assert_eq!(timesteps.len(), self.len());
        self.timesteps = timesteps;
        self
    }
}

/// Top left singular vector of the `k x w` context matrix whose columns are
/// `context`, sign-fixed so it has nonnegative inner product with the
/// column mean.
///
/// Computed by power iteration on the `w x w` Gram matrix started from the
/// uniform combination (the column mean), to a tolerance of `1e-10`. When the
/// top singular value is degenerate the iteration stays on the symmetric
/// combination it started from.
pub fn normal_behavior(context: &[&[f64]]) -> Result<Vec<f64>> {
    let w = context.len();
    if w == 0 {
        return Err(ScpdError::EmptyContext);
    }
    let k = context[0].len();
    let gram: Vec<Vec<f64>> =
        (0..w).map(|i| (0..w).map(|j| dot(context[i], context[j])).collect()).collect();

    let mut u = vec![1.0 / (w as f64).sqrt(); w];
    for _ in 0..10_000 {
        let mut next: Vec<f64> = gram.iter().map(|row| dot(row, &u)).collect();
        let norm = dot(&next, &next).sqrt();
        if norm == 0.0 {
            break;
        }
        next.iter_mut().for_each(|x| *x /= norm);
        let delta = next.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        u = next;
        if delta < 1e-10 {
            break;
        }
    }

    let mut summary = vec![0.0; k];
    for (col, &c) in context.iter().zip(&u) {
        for (s, &x) in summary.iter_mut().zip(col.iter()) {
            *s += c * x;
        }
    }
    let norm = dot(&summary, &summary).sqrt();
    if norm == 0.0 {
        return Ok(summary);
    }
    summary.iter_mut().for_each(|x| *x /= norm);

    let mean_dot: f64 = context.iter().map(|col| dot(col, &summary)).sum();
    if mean_dot < 0.0 {
        summary.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(summary)
}

/// `Z_t = max(1 - sigma . short, 1 - sigma . long)` clamped to `[0, 1]`.
pub fn score_step(sigma: &[f64], short: &[f64], long: &[f64]) -> f64 {
    let z = (1.0 - dot(sigma, short)).max(1.0 - dot(sigma, long));
    z.clamp(0.0, 1.0)
}

/// Score a series of signatures, labelled with timesteps `1..=T`.
/// Inputs are L2-normalized first.
pub fn score_series(signatures: &[Vec<f64>], cfg: &ScoringConfig) -> Result<ScoreSeries> {
    if signatures.len() < 2 {
        return Err(ScpdError::TooFewSignatures { need: 2, got: signatures.len() });
    }
    let present: Vec<Option<Vec<f64>>> = signatures.iter().map(|s| Some(l2_normalize(s))).collect();
    score_optional(&present, cfg)
}

/// Series where some timesteps may lack a signature. An absent signature
/// acts as a zero vector: it adds nothing to later contexts, and a timestep
/// whose own signature is absent or whose context holds nothing scores
/// `Z = 0`.
fn score_optional(series: &[Option<Vec<f64>>], cfg: &ScoringConfig) -> Result<ScoreSeries> {
    cfg.validate()?;
    let t_len = series.len();
    let mut z = vec![0.0; t_len];
    for t in 1..t_len {
        let Some(current) = &series[t] else { continue };
        let window_summary = |w: usize| -> Result<Option<Vec<f64>>> {
            let context: Vec<&[f64]> =
                series[t.saturating_sub(w)..t].iter().flatten().map(|v| v.as_slice()).collect();
            if context.is_empty() {
                return Ok(None);
            }
            normal_behavior(&context).map(Some)
        };
        let (Some(short), Some(long)) = (window_summary(cfg.short_window)?, window_summary(cfg.long_window)?)
        else {
            continue;
        };
        z[t] = score_step(current, &short, &long);
    }
    let mut z_star = vec![0.0; t_len];
    for t in 1..t_len {
        z_star[t] = (z[t] - z[t - 1]).max(0.0);
    }
    Ok(ScoreSeries { timesteps: (1..=t_len).collect(), z, z_star })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeScores {
    pub per_label: BTreeMap<String, ScoreSeries>,
    /// Per-timestep maximum over labels of both `Z` and `Z*`.
    pub aggregated: ScoreSeries,
}

/// Score each label's LDOS series independently and aggregate by maximum.
///
/// The label set is the union over timesteps; a label missing at some
/// timestep follows the absent-signature rule of the base scorer.
pub fn score_attribute_series(
    ldos_per_timestep: &[BTreeMap<String, Vec<f64>>],
    cfg: &ScoringConfig,
) -> Result<AttributeScores> {
    if ldos_per_timestep.len() < 2 {
        return Err(ScpdError::TooFewSignatures { need: 2, got: ldos_per_timestep.len() });
    }
    let labels: BTreeSet<&String> = ldos_per_timestep.iter().flat_map(|m| m.keys()).collect();
    if labels.is_empty() {
        return Err(ScpdError::EmptyLabelSet);
    }
    let t_len = ldos_per_timestep.len();
    let mut per_label = BTreeMap::new();
    for label in labels {
        let series: Vec<Option<Vec<f64>>> =
            ldos_per_timestep.iter().map(|m| m.get(label).map(|v| l2_normalize(v))).collect();
        per_label.insert(label.clone(), score_optional(&series, cfg)?);
    }
    let mut aggregated = ScoreSeries { timesteps: (1..=t_len).collect(), z: vec![0.0; t_len], z_star: vec![0.0; t_len] };
    for s in per_label.values() {
        for t in 0..t_len {
            aggregated.z[t] = aggregated.z[t].max(s.z[t]);
            aggregated.z_star[t] = aggregated.z_star[t].max(s.z_star[t]);
        }
    }
    Ok(AttributeScores { per_label, aggregated })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(k: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        v
    }

    #[test]
    fn identical_context_returns_the_vector() {
        let s = l2_normalize(&[0.2, 0.5, 0.1, 0.7]);
        let ctx: Vec<&[f64]> = vec![&s; 5];
        let out = normal_behavior(&ctx).unwrap();
        for (a, b) in out.iter().zip(&s) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tied_orthonormal_pair_gives_symmetric_combination() {
        let e1 = unit(3, 0);
        let e2 = unit(3, 1);
        let out = normal_behavior(&[&e1, &e2]).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((out[0] - h).abs() < 1e-12 && (out[1] - h).abs() < 1e-12 && out[2] == 0.0);
    }

    #[test]
    fn empty_context_is_an_error() {
        assert!(matches!(normal_behavior(&[]), Err(ScpdError::EmptyContext)));
    }

    #[test]
    fn score_step_cases() {
        let a = unit(2, 0);
        let b = unit(2, 1);
        assert_eq!(score_step(&a, &a, &a), 0.0);
        assert_eq!(score_step(&a, &b, &a), 1.0);
        // dot with short = 0.9, with long = 0.8
        let sigma = vec![1.0, 0.0];
        let short = vec![0.9, (1.0f64 - 0.81).sqrt()];
        let long = vec![0.8, 0.6];
        assert!((score_step(&sigma, &short, &long) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn constant_series_scores_zero() {
        let s = vec![vec![0.3, 0.4, 0.5]; 20];
        let out = score_series(&s, &ScoringConfig::default()).unwrap();
        assert!(out.z_star.iter().all(|&x| x.abs() < 1e-12));
        assert_eq!(out.timesteps, (1..=20).collect::<Vec<_>>());
    }

    #[test]
    fn orthogonal_spike_is_top_ranked() {
        let mut s = vec![unit(4, 0); 60];
        s[29] = unit(4, 1);
        let out = score_series(&s, &ScoringConfig::default()).unwrap();
        assert_eq!(out.top_n(1), vec![30]);
        assert_eq!(out.z_star[0], 0.0);
    }

    #[test]
    fn too_short_series_is_an_error() {
        assert!(score_series(&[vec![1.0]], &ScoringConfig::default()).is_err());
    }

    #[test]
    fn ranking_breaks_ties_by_earlier_timestep() {
        let s = ScoreSeries { timesteps: vec![1, 2, 3, 4], z: vec![0.0; 4], z_star: vec![0.0, 0.5, 0.1, 0.5] };
        assert_eq!(s.ranking(), vec![2, 4, 3, 1]);
    }

    #[test]
    fn single_label_attribute_scores_match_base_scorer() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sigs: Vec<Vec<f64>> = (0..30).map(|_| (0..6).map(|_| rng.random::<f64>()).collect()).collect();
        let maps: Vec<BTreeMap<String, Vec<f64>>> =
            sigs.iter().map(|s| BTreeMap::from([("a".to_string(), s.clone())])).collect();
        let cfg = ScoringConfig::default();
        let attr = score_attribute_series(&maps, &cfg).unwrap();
        let base = score_series(&sigs, &cfg).unwrap();
        assert_eq!(attr.per_label["a"], base);
        assert_eq!(attr.aggregated, base);
    }

    #[test]
    fn anomaly_in_one_label_drives_aggregate() {
        let maps: Vec<BTreeMap<String, Vec<f64>>> = (1..=80)
            .map(|t| {
                let a = if t == 50 { unit(3, 2) } else { unit(3, 0) };
                BTreeMap::from([("A".to_string(), a), ("B".to_string(), unit(3, 1))])
            })
            .collect();
        let out = score_attribute_series(&maps, &ScoringConfig::default()).unwrap();
        assert_eq!(out.aggregated.top_n(1), vec![50]);
    }

    #[test]
    fn labels_missing_at_some_timesteps_are_tolerated() {
        let maps: Vec<BTreeMap<String, Vec<f64>>> = (1..=20)
            .map(|t| {
                let mut m = BTreeMap::from([("A".to_string(), unit(3, 0))]);
                if t > 10 {
                    m.insert("B".to_string(), unit(3, 1));
                }
                m
            })
            .collect();
        let out = score_attribute_series(&maps, &ScoringConfig::default()).unwrap();
        let b = &out.per_label["B"];
        assert!(b.z.iter().all(|&z| z == 0.0));
        assert!(out.aggregated.z_star.iter().all(|&z| z == 0.0));
    }

    #[test]
    fn empty_labels_are_an_error() {
        let maps = vec![BTreeMap::new(), BTreeMap::new()];
        assert!(matches!(
            score_attribute_series(&maps, &ScoringConfig::default()),
            Err(ScpdError::EmptyLabelSet)
        ));
    }

    #[test]
    fn window_validation() {
        assert!(ScoringConfig { short_window: 0, long_window: 3 }.validate().is_err());
        assert!(ScoringConfig { short_window: 4, long_window: 3 }.validate().is_err());
    }
}
