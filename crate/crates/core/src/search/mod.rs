//! Bounded search for Kripke models and countermodels.
//!
//! Model sizes `(w, d)` are visited in lexicographic order. At each size the
//! accessibility relations of the frame class are enumerated, then the
//! existence maps, then the constant interpretations by backtracking, with
//! every axiom evaluated three-valued on the partial interpretation so that
//! a branch is cut as soon as some axiom is definitely false. Axioms not
//! mentioning any constant are decided before the first constant slot is
//! chosen. The canonical order of models is `(w, d, R, E, slots)`.
//!
//! Every model returned in a verdict is re-checked with the reference
//! evaluator of the kernel.

mod compile;
mod engine;
mod prune;
mod space;
mod verify;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::AtomicUsize;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{EmbedError, Embedder, PredicateMode};
use crate::kernel::{KernelError, KripkeModel, SimpleType, Term, DEFAULT_CEILING};
use crate::parallel::map_ordered;
use crate::syntax::Theory;

use engine::{run_chunk, ChunkOutcome, Control, Goal, Layer, LayerSpec, SigEntry};

pub use prune::{complement_axiom_target, complement_constrained};
pub use space::{access_relations, existence_maps, sizes};
pub use verify::{verify, Verification};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub max_worlds: usize,
    pub max_individuals: usize,
    /// Wall-clock limit for one check; `None` means unlimited.
    pub timeout: Option<Duration>,
    /// Largest denotation space a single quantifier may enumerate.
    pub ceiling: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            max_worlds: 2,
            max_individuals: 2,
            timeout: Some(Duration::from_secs(120)),
            ceiling: DEFAULT_CEILING,
        }
    }
}

impl Bounds {
    pub fn new(max_worlds: usize, max_individuals: usize) -> Self {
        Self {
            max_worlds,
            max_individuals,
            ..Self::default()
        }
    }

    pub fn with_timeout(mut self, timeout: Option<Duration>) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.max_worlds == 0 || self.max_individuals == 0 {
            return Err(SearchError::InvalidBounds(
                "max-worlds and max-individuals must be at least 1".into(),
            ));
        }
        if self.ceiling == 0 {
            return Err(SearchError::InvalidBounds("the ceiling must be positive".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w<={}, d<={}", self.max_worlds, self.max_individuals)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Complete interpretations satisfying all axioms that were inspected.
    pub models_examined: u64,
    /// Search-tree nodes visited.
    pub nodes: u64,
    pub wall_ms: u64,
}

impl SearchStats {
    fn add(&mut self, o: &ChunkOutcome) {
        self.models_examined += o.models;
        self.nodes += o.nodes;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    ModelFound {
        model: KripkeModel,
        /// Number of models at the size of `model`.
        count_at_minimal: u64,
        stats: SearchStats,
    },
    CounterexampleFound {
        model: KripkeModel,
        conjecture: String,
        stats: SearchStats,
    },
    NoCounterexampleUpTo {
        bounds: Bounds,
        stats: SearchStats,
    },
    UnsatisfiableUpTo {
        bounds: Bounds,
        stats: SearchStats,
    },
    TimedOut {
        stats: SearchStats,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerdictKind {
    ModelFound,
    CounterexampleFound,
    NoCounterexampleUpTo,
    UnsatisfiableUpTo,
    TimedOut,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::ModelFound => "ModelFound",
            VerdictKind::CounterexampleFound => "CounterexampleFound",
            VerdictKind::NoCounterexampleUpTo => "NoCounterexampleUpTo",
            VerdictKind::UnsatisfiableUpTo => "UnsatisfiableUpTo",
            VerdictKind::TimedOut => "TimedOut",
        })
    }
}

impl FromStr for VerdictKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "ModelFound" => VerdictKind::ModelFound,
            "CounterexampleFound" => VerdictKind::CounterexampleFound,
            "NoCounterexampleUpTo" => VerdictKind::NoCounterexampleUpTo,
            "UnsatisfiableUpTo" => VerdictKind::UnsatisfiableUpTo,
            "TimedOut" => VerdictKind::TimedOut,
            other => return Err(format!("unknown verdict kind `{other}`")),
        })
    }
}

impl Verdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::ModelFound { .. } => VerdictKind::ModelFound,
            Verdict::CounterexampleFound { .. } => VerdictKind::CounterexampleFound,
            Verdict::NoCounterexampleUpTo { .. } => VerdictKind::NoCounterexampleUpTo,
            Verdict::UnsatisfiableUpTo { .. } => VerdictKind::UnsatisfiableUpTo,
            Verdict::TimedOut { .. } => VerdictKind::TimedOut,
        }
    }

    pub fn model(&self) -> Option<&KripkeModel> {
        match self {
            Verdict::ModelFound { model, .. } | Verdict::CounterexampleFound { model, .. } => Some(model),
            _ => None,
        }
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            Verdict::ModelFound { stats, .. }
            | Verdict::CounterexampleFound { stats, .. }
            | Verdict::NoCounterexampleUpTo { stats, .. }
            | Verdict::UnsatisfiableUpTo { stats, .. }
            | Verdict::TimedOut { stats } => stats,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(
        "the interpretations of `{constant}` at {worlds} worlds and {individuals} individuals number about 2^{log2}, \
         beyond what the search can enumerate; lower --max-worlds or --max-indiv"
    )]
    CandidateOverflow {
        constant: String,
        worlds: usize,
        individuals: usize,
        log2: u32,
    },
    #[error("no statement named `{0}`")]
    UnknownStatement(String),
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("internal error: a model failed independent re-verification ({0})")]
    Unsound(String),
}

/// A theory embedded and compiled for every size within the bounds.
struct Prepared<'t> {
    theory: &'t Theory,
    signature: Vec<(String, SimpleType)>,
    conjecture: Option<String>,
    layers: Vec<Layer>,
}

impl<'t> Prepared<'t> {
    fn new(theory: &'t Theory, conjecture: Option<&str>, bounds: &Bounds) -> Result<Self, SearchError> {
        bounds.validate()?;
        let embedder = Embedder::for_theory(theory);
        let axioms = theory
            .axioms
            .iter()
            .map(|a| embedder.embed_valid(&a.formula))
            .collect::<Result<Vec<Term>, _>>()?;
        let conj_term = match conjecture {
            Some(name) => {
                let s = theory
                    .conjecture(name)
                    .or_else(|| theory.axiom(name))
                    .ok_or_else(|| SearchError::UnknownStatement(name.to_string()))?;
                Some(embedder.embed_valid(&s.formula)?)
            }
            None => None,
        };
        let paired = complement_constrained(theory);
        let sig: Vec<SigEntry> = theory
            .consts
            .iter()
            .map(|c| {
                let rigid = theory.predicates == PredicateMode::Rigid && c.ty.is_predicate();
                (c.name.clone(), c.ty.to_kernel(), rigid, paired.contains(&c.name))
            })
            .collect();
        let spec = LayerSpec {
            signature: &sig,
            axioms: &axioms,
            conjecture: conj_term.as_ref(),
            frame: theory.logic,
            quant: theory.quant,
            ceiling: bounds.ceiling,
        };
        let layers = sizes(bounds.max_worlds, bounds.max_individuals)
            .into_iter()
            .map(|(w, d)| Layer::build(&spec, w, d))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            theory,
            signature: theory.kernel_signature(),
            conjecture: conjecture.map(str::to_string),
            layers,
        })
    }

    fn model(&self, layer: &Layer, chunk: usize, flat: &[u64]) -> KripkeModel {
        layer.model(&layer.chunks[chunk], flat, &self.signature)
    }

    /// Re-checks a model found by the search with the reference evaluator.
    fn reverify(&self, model: &KripkeModel, counterexample: bool, ceiling: u64) -> Result<(), SearchError> {
        let conj = if counterexample { self.conjecture.as_deref() } else { None };
        let v = verify(self.theory, model, conj, ceiling)?;
        let ok = if counterexample { v.is_counterexample() } else { v.is_model() };
        if ok {
            Ok(())
        } else {
            Err(SearchError::Unsound(format!("{v:?}")))
        }
    }
}

fn deadline(start: Instant, bounds: &Bounds) -> Option<Instant> {
    bounds.timeout.map(|t| start + t)
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Finds the first model of the theory in canonical order.
pub fn find_model(theory: &Theory, bounds: &Bounds) -> Result<Verdict, SearchError> {
    let start = Instant::now();
    let prep = Prepared::new(theory, None, bounds)?;
    let control = Control {
        deadline: deadline(start, bounds),
        best: None,
    };
    let mut stats = SearchStats::default();
    for layer in &prep.layers {
        let outcomes = map_ordered(&layer.chunks, |i, _| run_chunk(layer, i, Goal::Count, &control));
        outcomes.iter().for_each(|o| stats.add(o));
        if outcomes.iter().any(|o| o.timed_out) {
            stats.wall_ms = elapsed_ms(start);
            return Ok(Verdict::TimedOut { stats });
        }
        if let Some((i, o)) = outcomes.iter().enumerate().find(|(_, o)| !o.hits.is_empty()) {
            let model = prep.model(layer, i, &o.hits[0]);
            prep.reverify(&model, false, bounds.ceiling)?;
            stats.wall_ms = elapsed_ms(start);
            return Ok(Verdict::ModelFound {
                model,
                count_at_minimal: outcomes.iter().map(|o| o.models).sum(),
                stats,
            });
        }
    }
    stats.wall_ms = elapsed_ms(start);
    Ok(Verdict::UnsatisfiableUpTo {
        bounds: bounds.clone(),
        stats,
    })
}

/// Looks for a model of the axioms on which `conjecture` is not valid.
pub fn check_entailment(theory: &Theory, conjecture: &str, bounds: &Bounds) -> Result<Verdict, SearchError> {
    let start = Instant::now();
    let prep = Prepared::new(theory, Some(conjecture), bounds)?;
    let mut stats = SearchStats::default();
    for layer in &prep.layers {
        let best = AtomicUsize::new(usize::MAX);
        let control = Control {
            deadline: deadline(start, bounds),
            best: Some(&best),
        };
        let outcomes = map_ordered(&layer.chunks, |i, _| run_chunk(layer, i, Goal::Counterexample, &control));
        let winner = outcomes.iter().position(|o| !o.hits.is_empty());
        let considered = winner.map_or(outcomes.len(), |w| w + 1);
        outcomes[..considered].iter().for_each(|o| stats.add(o));
        if outcomes[..considered].iter().any(|o| o.timed_out) {
            stats.wall_ms = elapsed_ms(start);
            return Ok(Verdict::TimedOut { stats });
        }
        if let Some(i) = winner {
            let model = prep.model(layer, i, &outcomes[i].hits[0]);
            prep.reverify(&model, true, bounds.ceiling)?;
            stats.wall_ms = elapsed_ms(start);
            return Ok(Verdict::CounterexampleFound {
                model,
                conjecture: conjecture.to_string(),
                stats,
            });
        }
    }
    stats.wall_ms = elapsed_ms(start);
    Ok(Verdict::NoCounterexampleUpTo {
        bounds: bounds.clone(),
        stats,
    })
}

/// Position in a model stream: size and chunk index within that size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cursor {
    pub worlds: usize,
    pub individuals: usize,
    pub chunk: usize,
}

/// All models of a theory within bounds, in canonical order. Each chunk is
/// searched on demand; the timeout is not applied.
pub struct ModelStream<'t> {
    prep: Prepared<'t>,
    layer: usize,
    chunk: usize,
    buffer: VecDeque<KripkeModel>,
}

impl<'t> ModelStream<'t> {
    /// Where the next chunk will be read from, or `None` at the end.
    pub fn cursor(&self) -> Option<Cursor> {
        let layer = self.prep.layers.get(self.layer)?;
        Some(Cursor {
            worlds: layer.worlds,
            individuals: layer.individuals,
            chunk: self.chunk,
        })
    }

    /// Restarts the stream at a chunk boundary.
    pub fn seek(&mut self, cursor: Cursor) -> bool {
        let Some(layer) = self
            .prep
            .layers
            .iter()
            .position(|l| (l.worlds, l.individuals) == (cursor.worlds, cursor.individuals))
        else {
            return false;
        };
        if cursor.chunk > self.prep.layers[layer].chunks.len() {
            return false;
        }
        self.layer = layer;
        self.chunk = cursor.chunk;
        self.buffer.clear();
        true
    }

    /// Number of chunks at a size.
    pub fn chunk_count(&self, worlds: usize, individuals: usize) -> Option<usize> {
        self.prep
            .layers
            .iter()
            .find(|l| (l.worlds, l.individuals) == (worlds, individuals))
            .map(|l| l.chunks.len())
    }

    /// Models of the chunk under the cursor; advances past it.
    pub fn next_chunk(&mut self) -> Option<Vec<KripkeModel>> {
        self.buffer.clear();
        let layer = self.prep.layers.get(self.layer)?;
        if self.chunk >= layer.chunks.len() {
            self.layer += 1;
            self.chunk = 0;
            return self.next_chunk();
        }
        let control = Control {
            deadline: None,
            best: None,
        };
        let out = run_chunk(layer, self.chunk, Goal::Collect, &control);
        let models = out.hits.iter().map(|f| self.prep.model(layer, self.chunk, f)).collect();
        self.chunk += 1;
        Some(models)
    }
}

impl Iterator for ModelStream<'_> {
    type Item = KripkeModel;

    fn next(&mut self) -> Option<KripkeModel> {
        loop {
            if let Some(m) = self.buffer.pop_front() {
                return Some(m);
            }
            let batch = self.next_chunk()?;
            self.buffer.extend(batch);
        }
    }
}

/// Streams every model of the theory within bounds in canonical order.
pub fn enumerate_models<'t>(theory: &'t Theory, bounds: &Bounds) -> Result<ModelStream<'t>, SearchError> {
    Ok(ModelStream {
        prep: Prepared::new(theory, None, bounds)?,
        layer: 0,
        chunk: 0,
        buffer: VecDeque::new(),
    })
}

/// Interpretations of a constant of type `(i>wo)>wo` that are closed under
/// complement pairs: slot `n-1-i` (the complement of property `i`) always
/// holds the complement of slot `i`. Listed in canonical order.
pub fn complement_pair_candidates(worlds: usize, individuals: usize, predicates: PredicateMode) -> Vec<Vec<u64>> {
    let props = 1usize << (worlds * individuals);
    let top = (1u64 << worlds) - 1;
    let values: Vec<u64> = match predicates {
        PredicateMode::Rigid => vec![0, top],
        PredicateMode::Flexible => (0..=top).collect(),
    };
    let half = props / 2;
    let mut out = Vec::new();
    let mut choice = vec![0usize; half];
    loop {
        let mut slots = vec![0u64; props];
        for (i, &c) in choice.iter().enumerate() {
            slots[i] = values[c];
            slots[props - 1 - i] = top - values[c];
        }
        out.push(slots);
        // Advance the odometer, last position fastest.
        let mut k = half;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < values.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_theory;

    fn theory(src: &str) -> Theory {
        parse_theory(src).unwrap()
    }

    #[test]
    fn bottom_axiom_is_unsatisfiable() {
        let t = theory("theory t\naxiom a : bot\n");
        let v = find_model(&t, &Bounds::new(2, 2)).unwrap();
        assert_eq!(v.kind(), VerdictKind::UnsatisfiableUpTo);
    }

    #[test]
    fn empty_theory_has_two_models_at_one_world() {
        let t = theory("theory t\n");
        let models: Vec<_> = enumerate_models(&t, &Bounds::new(1, 1)).unwrap().collect();
        assert_eq!(models.len(), 2);
        assert!(!models[0].access[0][0]);
        assert!(models[1].access[0][0]);
    }

    #[test]
    fn first_model_is_minimal() {
        let t = theory("theory t\naxiom a : dia top\n");
        let v = find_model(&t, &Bounds::new(2, 2)).unwrap();
        let Verdict::ModelFound { model, count_at_minimal, .. } = v else { panic!() };
        assert_eq!((model.worlds, model.individuals), (1, 1));
        assert!(model.access[0][0]);
        assert_eq!(count_at_minimal, 1);
    }

    #[test]
    fn t_axiom_fails_in_k() {
        let t = theory("theory t\nconjecture T : all s. box s -> s\n");
        let v = check_entailment(&t, "T", &Bounds::new(2, 1)).unwrap();
        let Verdict::CounterexampleFound { model, .. } = v else { panic!("{v:?}") };
        assert_eq!(model.worlds, 1);
        assert!(!model.access[0][0]);
        let kt = t.with_logic(crate::embed::FrameClass::KT);
        assert_eq!(check_entailment(&kt, "T", &Bounds::new(2, 2)).unwrap().kind(), VerdictKind::NoCounterexampleUpTo);
    }

    #[test]
    fn unknown_conjecture() {
        let t = theory("theory t\n");
        assert!(matches!(
            check_entailment(&t, "nope", &Bounds::default()),
            Err(SearchError::UnknownStatement(_))
        ));
    }

    #[test]
    fn oversized_candidate_space_is_rejected_up_front() {
        let t = theory("theory t\nconst P : (i>wo)>wo\naxiom a : top\n");
        let err = find_model(&t, &Bounds::new(3, 2)).unwrap_err();
        assert!(matches!(err, SearchError::CandidateOverflow { log2: 64, .. }), "{err}");
    }

    #[test]
    fn complement_generator_sizes() {
        assert_eq!(complement_pair_candidates(2, 2, PredicateMode::Rigid).len(), 256);
        assert_eq!(complement_pair_candidates(2, 1, PredicateMode::Flexible).len(), 16);
        for c in complement_pair_candidates(1, 2, PredicateMode::Rigid) {
            assert_eq!(c[0] + c[3], 1);
            assert_eq!(c[1] + c[2], 1);
        }
    }
}
