//! Citation-topology embedding: random walks over the undirected citation
//! graph followed by skip-gram training with negative sampling.
//!
//! The deterministic mode trains on one thread and is bit-reproducible for a
//! given seed. The parallel mode shares the weight matrices between threads
//! without locking (relaxed atomic loads and stores), so concurrent updates
//! may overwrite each other and results vary from run to run.

use super::{AspectId, AspectVectors, EmbedError, Provenance, Vector};
use crate::corpus::CitationGraph;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainingMode {
    #[default]
    Deterministic,
    /// Lock-free shared updates; `threads == 0` uses every available core.
    Parallel { threads: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopologyParams {
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub window: usize,
    pub dim: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    /// Initial rate; decays linearly to 1e-4 of this value.
    pub learning_rate: f64,
    pub rng_seed: u64,
    /// Return bias of a second-order walk (1.0 = neutral).
    pub return_param: f64,
    /// In/out bias of a second-order walk (1.0 = neutral).
    pub in_out_param: f64,
    pub mode: TrainingMode,
}

impl Default for TopologyParams {
    fn default() -> Self {
        TopologyParams {
            walks_per_node: 10,
            walk_length: 80,
            window: 5,
            dim: 128,
            negative_samples: 5,
            epochs: 5,
            learning_rate: 0.025,
            rng_seed: 42,
            return_param: 1.0,
            in_out_param: 1.0,
            mode: TrainingMode::Deterministic,
        }
    }
}

impl TopologyParams {
    pub fn validate(&self) -> Result<(), EmbedError> {
        let positive = [
            ("walks_per_node", self.walks_per_node),
            ("walk_length", self.walk_length),
            ("window", self.window),
            ("dim", self.dim),
            ("negative_samples", self.negative_samples),
            ("epochs", self.epochs),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(EmbedError::InvalidParams(format!(
                "{name} must be positive"
            )));
        }
        if self.window >= self.walk_length {
            return Err(EmbedError::InvalidParams(
                "window must be shorter than walk_length".into(),
            ));
        }
        for (name, v) in [
            ("learning_rate", self.learning_rate),
            ("return_param", self.return_param),
            ("in_out_param", self.in_out_param),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(EmbedError::InvalidParams(format!(
                    "{name} must be a positive finite number"
                )));
            }
        }
        Ok(())
    }

    fn is_biased(&self) -> bool {
        self.return_param != 1.0 || self.in_out_param != 1.0
    }
}

// Independent RNG streams so that walk generation does not depend on how
// many numbers initialization consumed.
const STREAM_INIT: u64 = 1;
const STREAM_WALKS: u64 = 2;
const STREAM_TRAIN: u64 = 3;

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `walks_per_node` rounds; each round visits the nodes in a freshly
/// shuffled order and starts one walk per node. Isolated nodes yield
/// single-node walks.
pub fn generate_walks(graph: &CitationGraph, params: &TopologyParams) -> Vec<Vec<u32>> {
    let n = graph.node_count();
    let mut rng = seeded(params.rng_seed, STREAM_WALKS);
    let mut order: Vec<usize> = (0..n).collect();
    let mut walks = Vec::with_capacity(n * params.walks_per_node);
    let mut weights = Vec::new();

    for _ in 0..params.walks_per_node {
        order.shuffle(&mut rng);
        for &start in &order {
            let mut walk = Vec::with_capacity(params.walk_length);
            walk.push(start as u32);
            let mut prev: Option<usize> = None;
            let mut cur = start;
            while walk.len() < params.walk_length {
                let nbrs = graph.neighbors(cur);
                if nbrs.is_empty() {
                    break;
                }
                let next = match prev {
                    Some(p) if params.is_biased() => {
                        weights.clear();
                        weights.extend(nbrs.iter().map(|&x| {
                            if x == p {
                                1.0 / params.return_param
                            } else if graph.are_adjacent(p, x) {
                                1.0
                            } else {
                                1.0 / params.in_out_param
                            }
                        }));
                        let total: f64 = weights.iter().sum();
                        let mut target = rng.random::<f64>() * total;
                        let mut pick = nbrs[nbrs.len() - 1];
                        for (&x, &w) in nbrs.iter().zip(&weights) {
                            if target < w {
                                pick = x;
                                break;
                            }
                            target -= w;
                        }
                        pick
                    }
                    _ => nbrs[rng.random_range(0..nbrs.len())],
                };
                walk.push(next as u32);
                prev = Some(cur);
                cur = next;
            }
            walks.push(walk);
        }
    }
    walks
}

/// Scalar parameter storage that can be updated through a shared reference.
trait Weights {
    fn get(&self, i: usize) -> f64;
    fn set(&self, i: usize, v: f64);
}

impl Weights for [Cell<f64>] {
    #[inline]
    fn get(&self, i: usize) -> f64 {
        self[i].get()
    }

    #[inline]
    fn set(&self, i: usize, v: f64) {
        self[i].set(v)
    }
}

impl Weights for [AtomicU64] {
    #[inline]
    fn get(&self, i: usize) -> f64 {
        f64::from_bits(self[i].load(Ordering::Relaxed))
    }

    #[inline]
    fn set(&self, i: usize, v: f64) {
        self[i].store(v.to_bits(), Ordering::Relaxed)
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x.clamp(-30.0, 30.0)).exp())
}

struct Trainer<'a> {
    params: &'a TopologyParams,
    noise: WeightedIndex<f64>,
    total_steps: usize,
}

impl Trainer<'_> {
    fn rate(&self, done: usize) -> f64 {
        let lr = self.params.learning_rate;
        (lr * (1.0 - done as f64 / self.total_steps as f64)).max(lr * 1e-4)
    }

    /// One positive (center, context) update plus negative samples.
    fn update<W: Weights + ?Sized>(
        &self,
        input: &W,
        output: &W,
        center: usize,
        targets: &[(usize, f64)],
        lr: f64,
        grad: &mut [f64],
    ) {
        let dim = self.params.dim;
        let ci = center * dim;
        grad.fill(0.0);
        for &(target, label) in targets {
            let ti = target * dim;
            let mut f = 0.0;
            for k in 0..dim {
                f += input.get(ci + k) * output.get(ti + k);
            }
            let g = (label - sigmoid(f)) * lr;
            for (k, gk) in grad.iter_mut().enumerate() {
                let o = output.get(ti + k);
                *gk += g * o;
                output.set(ti + k, o + g * input.get(ci + k));
            }
        }
        for (k, gk) in grad.iter().enumerate() {
            input.set(ci + k, input.get(ci + k) + gk);
        }
    }

    fn run<W: Weights + ?Sized>(
        &self,
        walks: &[Vec<u32>],
        input: &W,
        output: &W,
        rng: &mut ChaCha8Rng,
        progress: &AtomicUsize,
    ) {
        let p = self.params;
        let mut grad = vec![0.0; p.dim];
        let mut targets: Vec<(usize, f64)> = Vec::with_capacity(p.negative_samples + 1);
        for _ in 0..p.epochs {
            for walk in walks {
                for pos in 0..walk.len() {
                    let lr = self.rate(progress.fetch_add(1, Ordering::Relaxed));
                    let reach = p.window - rng.random_range(0..p.window);
                    let lo = pos.saturating_sub(reach);
                    let hi = (pos + reach).min(walk.len() - 1);
                    let center = walk[pos] as usize;
                    for (c, &context) in walk.iter().enumerate().take(hi + 1).skip(lo) {
                        if c == pos {
                            continue;
                        }
                        let context = context as usize;
                        targets.clear();
                        targets.push((context, 1.0));
                        for _ in 0..p.negative_samples {
                            let neg = self.noise.sample(rng);
                            if neg != context {
                                targets.push((neg, 0.0));
                            }
                        }
                        self.update(input, output, center, &targets, lr, &mut grad);
                    }
                }
            }
        }
    }
}

pub fn embed_topology(
    graph: &CitationGraph,
    params: &TopologyParams,
) -> Result<AspectVectors, EmbedError> {
    params.validate()?;
    let n = graph.node_count();
    let dim = params.dim;

    let mut init_rng = seeded(params.rng_seed, STREAM_INIT);
    let mut input: Vec<f64> = (0..n * dim)
        .map(|_| (init_rng.random::<f64>() - 0.5) / dim as f64)
        .collect();

    if n > 0 {
        let walks = generate_walks(graph, params);
        let mut counts = vec![0.0f64; n];
        for &node in walks.iter().flatten() {
            counts[node as usize] += 1.0;
        }
        let tokens: usize = walks.iter().map(Vec::len).sum();
        let trainer = Trainer {
            params,
            noise: WeightedIndex::new(counts.iter().map(|c| c.powf(0.75)))
                .expect("every node starts a walk"),
            total_steps: (tokens * params.epochs).max(1),
        };
        let progress = AtomicUsize::new(0);

        match params.mode {
            TrainingMode::Deterministic => {
                let mut output = vec![0.0f64; n * dim];
                let inp = Cell::from_mut(input.as_mut_slice()).as_slice_of_cells();
                let out = Cell::from_mut(output.as_mut_slice()).as_slice_of_cells();
                trainer.run(
                    &walks,
                    inp,
                    out,
                    &mut seeded(params.rng_seed, STREAM_TRAIN),
                    &progress,
                );
            }
            TrainingMode::Parallel { threads } => {
                let threads = if threads == 0 {
                    rayon::current_num_threads()
                } else {
                    threads
                }
                .clamp(1, walks.len());
                let shared_in: Vec<AtomicU64> =
                    input.iter().map(|x| AtomicU64::new(x.to_bits())).collect();
                let shared_out: Vec<AtomicU64> = (0..n * dim)
                    .map(|_| AtomicU64::new(0f64.to_bits()))
                    .collect();
                let chunk = walks.len().div_ceil(threads);
                std::thread::scope(|s| {
                    for (t, part) in walks.chunks(chunk).enumerate() {
                        let (trainer, shared_in, shared_out, progress) =
                            (&trainer, &shared_in, &shared_out, &progress);
                        s.spawn(move || {
                            let mut rng = seeded(params.rng_seed, STREAM_TRAIN + 1 + t as u64);
                            trainer.run(
                                part,
                                shared_in.as_slice(),
                                shared_out.as_slice(),
                                &mut rng,
                                progress,
                            );
                        });
                    }
                });
                input = shared_in
                    .iter()
                    .map(|a| f64::from_bits(a.load(Ordering::Relaxed)))
                    .collect();
            }
        }
    }

    let vectors = input
        .chunks(dim.max(1))
        .take(n)
        .map(|row| Vector::Dense(row.to_vec()).normalized())
        .collect();
    let meta = Provenance::builtin(
        [
            ("walks_per_node", params.walks_per_node.into()),
            ("walk_length", params.walk_length.into()),
            ("window", params.window.into()),
            ("dim", params.dim.into()),
            ("negative_samples", params.negative_samples.into()),
            ("epochs", params.epochs.into()),
            ("learning_rate", params.learning_rate.into()),
            ("return_param", params.return_param.into()),
            ("in_out_param", params.in_out_param.into()),
            (
                "mode",
                serde_json::to_value(params.mode).expect("mode serializes"),
            ),
        ],
        Some(params.rng_seed),
    );
    Ok(AspectVectors {
        aspect: AspectId::Topology,
        dim,
        ids: graph.nodes().to_vec(),
        vectors,
        meta,
    })
}
