//! Spatio-temporal contrastive loss: within-frame cosine similarity plus
//! across-frame cosine dissimilarity per identity.

use crate::embedding::{cosine_similarity, Embedding};
use crate::error::{Error, Result};

use super::{ContrastiveConfig, LossValue};

/// d cos(a, b) / d a, evaluated with the already computed cosine.
fn cosine_grad_wrt_a(a: &Embedding, b: &Embedding, cos: f64) -> Vec<f64> {
    let na = a.norm();
    let nb = b.norm();
    a.values()
        .iter()
        .zip(b.values())
        .map(|(&av, &bv)| (bv / nb - cos * av / na) / na)
        .collect()
}

fn add_scaled(acc: &mut [f64], inc: &[f64], scale: f64) {
    for (a, i) in acc.iter_mut().zip(inc) {
        *a += scale * i;
    }
}

/// Within-frame similarity: sum of cos(ψ_i, ψ_j) over unordered pairs i < j.
///
/// The ordered-pair reading of the same sum is exactly twice this value and
/// can be absorbed into the weight; the unordered convention is fixed here so
/// fixtures are unambiguous. Gradients cover every embedding entry.
pub fn similarity_loss(embeddings: &[Embedding]) -> Result<LossValue<Vec<Vec<f64>>>> {
    if embeddings.len() < 2 {
        return Err(Error::CountMismatch {
            expected: 2,
            actual: embeddings.len(),
        });
    }
    let dim = embeddings[0].dim();
    let mut value = 0.0;
    let mut grad = vec![vec![0.0; dim]; embeddings.len()];
    for i in 0..embeddings.len() {
        for j in i + 1..embeddings.len() {
            let cos = cosine_similarity(&embeddings[i], &embeddings[j])?;
            value += cos;
            add_scaled(&mut grad[i], &cosine_grad_wrt_a(&embeddings[i], &embeddings[j], cos), 1.0);
            add_scaled(&mut grad[j], &cosine_grad_wrt_a(&embeddings[j], &embeddings[i], cos), 1.0);
        }
    }
    Ok(LossValue {
        value,
        terms: vec![("similarity", value)],
        grad,
    })
}

/// Across-frame dissimilarity: for each identity, sum of 1 - cos over
/// unordered frame pairs of its track window.
///
/// `tracks[i][t]` is identity i's embedding at window position t; every
/// identity must appear in every frame of the window. Gradients are shaped
/// like the input.
pub fn dissimilarity_loss(tracks: &[Vec<Embedding>]) -> Result<LossValue<Vec<Vec<Vec<f64>>>>> {
    if tracks.is_empty() {
        return Err(Error::EmptyInput("dissimilarity loss tracks"));
    }
    let window = tracks[0].len();
    if window < 2 {
        return Err(Error::CountMismatch {
            expected: 2,
            actual: window,
        });
    }
    for (i, track) in tracks.iter().enumerate() {
        if track.len() != window {
            return Err(Error::MissingIdentity {
                frame: track.len() as u64,
                id: i as u32,
            });
        }
    }
    let dim = tracks[0][0].dim();
    let mut value = 0.0;
    let mut grad = vec![vec![vec![0.0; dim]; window]; tracks.len()];
    for (i, track) in tracks.iter().enumerate() {
        for t1 in 0..window {
            for t2 in t1 + 1..window {
                let cos = cosine_similarity(&track[t1], &track[t2])?;
                value += 1.0 - cos;
                add_scaled(&mut grad[i][t1], &cosine_grad_wrt_a(&track[t1], &track[t2], cos), -1.0);
                add_scaled(&mut grad[i][t2], &cosine_grad_wrt_a(&track[t2], &track[t1], cos), -1.0);
            }
        }
    }
    Ok(LossValue {
        value,
        terms: vec![("dissimilarity", value)],
        grad,
    })
}

/// Combined spatio-temporal contrastive loss over a window (or batch) of
/// frames: lambda_s * sum of per-frame similarity + lambda_ds * dissimilarity
/// across the window.
///
/// `frames[t][i]` is identity i's embedding in frame t. The similarity term
/// is summed, not averaged, over frames. When the frames are a batch of K
/// non-consecutive frames, the dissimilarity pairs are exactly the C(K, 2)
/// frame pairs per identity. Gradients are indexed `[frame][identity][dim]`.
pub fn stc_loss(
    frames: &[Vec<Embedding>],
    cfg: &ContrastiveConfig,
) -> Result<LossValue<Vec<Vec<Vec<f64>>>>> {
    cfg.validate()?;
    if frames.len() < 2 {
        return Err(Error::CountMismatch {
            expected: 2,
            actual: frames.len(),
        });
    }
    let n = frames[0].len();
    for frame in frames {
        if frame.len() != n {
            return Err(Error::CountMismatch {
                expected: n,
                actual: frame.len(),
            });
        }
    }
    let dim = frames[0][0].dim();

    let mut sim_total = 0.0;
    let mut grad = vec![vec![vec![0.0; dim]; n]; frames.len()];
    for (t, frame) in frames.iter().enumerate() {
        let sim = similarity_loss(frame)?;
        sim_total += sim.value;
        for (i, g) in sim.grad.iter().enumerate() {
            add_scaled(&mut grad[t][i], g, cfg.lambda_s);
        }
    }

    // Transpose to per-identity tracks for the dissimilarity term.
    let tracks: Vec<Vec<Embedding>> = (0..n)
        .map(|i| frames.iter().map(|f| f[i].clone()).collect())
        .collect();
    let ds = dissimilarity_loss(&tracks)?;
    for (i, track_grad) in ds.grad.iter().enumerate() {
        for (t, g) in track_grad.iter().enumerate() {
            add_scaled(&mut grad[t][i], g, cfg.lambda_ds);
        }
    }

    let sim_term = cfg.lambda_s * sim_total;
    let ds_term = cfg.lambda_ds * ds.value;
    Ok(LossValue {
        value: sim_term + ds_term,
        terms: vec![("similarity", sim_term), ("dissimilarity", ds_term)],
        grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::basis;
    use crate::rng::SplitMix64;

    fn random_embedding(rng: &mut SplitMix64, dim: usize) -> Embedding {
        Embedding::new((0..dim).map(|_| rng.uniform() * 2.0 - 1.0).collect()).unwrap()
    }

    #[test]
    fn similarity_two_orthogonal_is_zero() {
        let embs = vec![basis(4, 0), basis(4, 1)];
        assert_eq!(similarity_loss(&embs).unwrap().value, 0.0);
    }

    #[test]
    fn similarity_two_identical_is_one() {
        let e = basis(4, 2);
        let embs = vec![e.clone(), e];
        assert_eq!(similarity_loss(&embs).unwrap().value, 1.0);
    }

    #[test]
    fn similarity_matches_naive_double_loop() {
        let mut rng = SplitMix64::new(11);
        let embs: Vec<Embedding> = (0..4).map(|_| random_embedding(&mut rng, 6)).collect();
        let got = similarity_loss(&embs).unwrap().value;
        // Naive oracle: direct double loop over unordered pairs.
        let mut expect = 0.0;
        for i in 0..embs.len() {
            for j in i + 1..embs.len() {
                let dot: f64 = embs[i]
                    .values()
                    .iter()
                    .zip(embs[j].values())
                    .map(|(a, b)| a * b)
                    .sum();
                expect += dot / (embs[i].norm() * embs[j].norm());
            }
        }
        assert!((got - expect).abs() <= 1e-12 * expect.abs().max(1.0));
    }

    #[test]
    fn similarity_rejects_single_embedding() {
        assert!(similarity_loss(&[basis(4, 0)]).is_err());
    }

    #[test]
    fn dissimilarity_constant_tracks_is_exactly_zero() {
        let e0 = Embedding::new(vec![0.2, -0.4, 0.9]).unwrap();
        let e1 = Embedding::new(vec![-0.5, 0.1, 0.3]).unwrap();
        let tracks = vec![vec![e0.clone(), e0.clone(), e0], vec![e1.clone(), e1.clone(), e1]];
        assert_eq!(dissimilarity_loss(&tracks).unwrap().value, 0.0);
    }

    #[test]
    fn dissimilarity_opposite_vectors() {
        let a = basis(3, 0);
        let b = Embedding::new(vec![-1.0, 0.0, 0.0]).unwrap();
        let tracks = vec![vec![a, b]];
        assert_eq!(dissimilarity_loss(&tracks).unwrap().value, 2.0);
    }

    #[test]
    fn dissimilarity_matches_naive_triple_loop() {
        let mut rng = SplitMix64::new(23);
        let tracks: Vec<Vec<Embedding>> = (0..3)
            .map(|_| (0..4).map(|_| random_embedding(&mut rng, 5)).collect())
            .collect();
        let got = dissimilarity_loss(&tracks).unwrap().value;
        let mut expect = 0.0;
        for track in &tracks {
            for t1 in 0..track.len() {
                for t2 in t1 + 1..track.len() {
                    let dot: f64 = track[t1]
                        .values()
                        .iter()
                        .zip(track[t2].values())
                        .map(|(a, b)| a * b)
                        .sum();
                    expect += 1.0 - dot / (track[t1].norm() * track[t2].norm());
                }
            }
        }
        assert!((got - expect).abs() <= 1e-12 * expect.abs().max(1.0));
    }

    #[test]
    fn dissimilarity_rejects_ragged_tracks() {
        let e = basis(3, 0);
        let tracks = vec![vec![e.clone(), e.clone()], vec![e]];
        assert!(dissimilarity_loss(&tracks).is_err());
    }

    #[test]
    fn stc_zero_for_constant_orthogonal_embeddings() {
        // Identical over time, orthogonal within frame: both terms vanish.
        let frame: Vec<Embedding> = (0..3).map(|i| basis(4, i)).collect();
        let frames = vec![frame.clone(), frame.clone(), frame];
        let cfg = ContrastiveConfig::default();
        assert_eq!(stc_loss(&frames, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn stc_degenerates_to_dissimilarity_when_lambda_s_zero() {
        let mut rng = SplitMix64::new(5);
        let frames: Vec<Vec<Embedding>> = (0..4)
            .map(|_| (0..3).map(|_| random_embedding(&mut rng, 6)).collect())
            .collect();
        let cfg = ContrastiveConfig {
            lambda_s: 0.0,
            lambda_ds: 1.7,
            ..Default::default()
        };
        let stc = stc_loss(&frames, &cfg).unwrap();
        let tracks: Vec<Vec<Embedding>> = (0..3)
            .map(|i| frames.iter().map(|f| f[i].clone()).collect())
            .collect();
        let ds = dissimilarity_loss(&tracks).unwrap();
        assert_eq!(stc.value, 1.7 * ds.value);
    }

    #[test]
    fn stc_pair_count_is_k_choose_2_per_pig() {
        // Orthogonal embeddings across frames make every pair contribute
        // exactly 1, so the loss counts the pairs.
        for k in 2..=6usize {
            let n = 2;
            let frames: Vec<Vec<Embedding>> =
                (0..k).map(|t| (0..n).map(|_| basis(8, t)).collect()).collect();
            let cfg = ContrastiveConfig {
                lambda_s: 0.0,
                lambda_ds: 1.0,
                ..Default::default()
            };
            let value = stc_loss(&frames, &cfg).unwrap().value;
            let pairs = (k * (k - 1) / 2) as f64;
            assert_eq!(value, n as f64 * pairs);
        }
    }

    #[test]
    fn stc_terms_sum_to_value() {
        let mut rng = SplitMix64::new(99);
        let frames: Vec<Vec<Embedding>> = (0..3)
            .map(|_| (0..4).map(|_| random_embedding(&mut rng, 5)).collect())
            .collect();
        let cfg = ContrastiveConfig {
            lambda_s: 0.3,
            lambda_ds: 2.0,
            ..Default::default()
        };
        let loss = stc_loss(&frames, &cfg).unwrap();
        let sum: f64 = loss.terms.iter().map(|(_, v)| v).sum();
        assert!((sum - loss.value).abs() < 1e-12);
    }

    #[test]
    fn zero_norm_embedding_propagates() {
        let z = Embedding::new(vec![0.0, 0.0]).unwrap();
        let e = basis(2, 0);
        assert!(similarity_loss(&[z.clone(), e.clone()]).is_err());
        assert!(dissimilarity_loss(&[vec![e, z]]).is_err());
    }
}
