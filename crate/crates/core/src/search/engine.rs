//! Backtracking over constant slots for one model size.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use super::compile::{eval, Compiler, ConstLayout, Node, Val, View};
use super::space::{access_relations, existence_maps};
use super::SearchError;
use crate::embed::{FrameClass, QuantMode};
use crate::kernel::{Denotation, KripkeModel, SimpleType, Term};

/// A fixed accessibility relation and existence map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Chunk {
    pub access: Vec<bool>,
    pub exists: Vec<bool>,
}

/// Everything the search needs at one model size.
pub(crate) struct Layer {
    pub worlds: usize,
    pub individuals: usize,
    pub layouts: Vec<ConstLayout>,
    pub axioms: Vec<Node>,
    pub conjecture: Option<Node>,
    pub env_size: usize,
    /// Per constant: whether slot `i` determines slot `n-1-i`.
    pub paired: Vec<bool>,
    pub chunks: Vec<Chunk>,
}

/// Signature entry: name, kernel type, rigid, complement-paired.
pub(crate) type SigEntry = (String, SimpleType, bool, bool);

pub(crate) struct LayerSpec<'a> {
    pub signature: &'a [SigEntry],
    pub axioms: &'a [Term],
    pub conjecture: Option<&'a Term>,
    pub frame: FrameClass,
    pub quant: QuantMode,
    pub ceiling: u64,
}

impl Layer {
    pub fn build(spec: &LayerSpec, worlds: usize, individuals: usize) -> Result<Layer, SearchError> {
        let mut layouts = Vec::new();
        for (name, ty, rigid, _) in spec.signature {
            let layout = ConstLayout::new(name, ty, *rigid, worlds, individuals, spec.ceiling)?;
            let log2 = layout.slots as f64 * (layout.values.len() as f64).log2();
            if log2 >= 64.0 {
                return Err(SearchError::CandidateOverflow {
                    constant: name.clone(),
                    worlds,
                    individuals,
                    log2: log2.ceil() as u32,
                });
            }
            layouts.push(layout);
        }
        let mut compiler = Compiler::new(worlds, individuals, spec.ceiling, &layouts);
        let axioms = spec
            .axioms
            .iter()
            .map(|t| compiler.compile(t).map(|(n, _)| n))
            .collect::<Result<Vec<_>, _>>()?;
        let conjecture = spec.conjecture.map(|t| compiler.compile(t).map(|(n, _)| n)).transpose()?;
        let env_size = compiler.slots;
        let paired = spec
            .signature
            .iter()
            .zip(&layouts)
            .map(|((_, _, _, p), l)| *p && l.slots % 2 == 0)
            .collect();
        let mut chunks = Vec::new();
        for access in access_relations(worlds, spec.frame) {
            for exists in existence_maps(worlds, individuals, spec.quant) {
                chunks.push(Chunk {
                    access: access.clone(),
                    exists,
                });
            }
        }
        Ok(Layer {
            worlds,
            individuals,
            layouts,
            axioms,
            conjecture,
            env_size,
            paired,
            chunks,
        })
    }

    /// The model for a chunk and a full slot assignment (constants in
    /// declaration order, slots in index order).
    pub fn model(&self, chunk: &Chunk, flat: &[u64], signature: &[(String, SimpleType)]) -> KripkeModel {
        let (w, d) = (self.worlds, self.individuals);
        let access = chunk.access.chunks(w).map(<[bool]>::to_vec).collect();
        let exists = chunk.exists.chunks(d).map(<[bool]>::to_vec).collect();
        let mut interp = std::collections::BTreeMap::new();
        let mut offset = 0;
        for l in &self.layouts {
            let vals = &flat[offset..offset + l.slots];
            offset += l.slots;
            let den = match &l.ty {
                SimpleType::Fun(_, cod) => {
                    Denotation::Table(vals.iter().map(|&v| Denotation::from_index(cod, w, d, v)).collect())
                }
                ty => Denotation::from_index(ty, w, d, vals[0]),
            };
            interp.insert(l.name.clone(), den);
        }
        KripkeModel::new(w, d, access, exists, interp, signature).expect("search builds well-formed models")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    /// Count every model, keep the first.
    Count,
    /// Stop at the first model falsifying the conjecture.
    Counterexample,
    /// Keep every model.
    Collect,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct ChunkOutcome {
    pub nodes: u64,
    /// Complete assignments satisfying every axiom.
    pub models: u64,
    pub hits: Vec<Vec<u64>>,
    pub timed_out: bool,
    /// Abandoned because an earlier chunk already holds the answer.
    pub abandoned: bool,
}

pub(crate) struct Control<'a> {
    pub deadline: Option<Instant>,
    /// Lowest chunk index known to hold a counterexample.
    pub best: Option<&'a AtomicUsize>,
}

struct Dfs<'a> {
    layer: &'a Layer,
    chunk: &'a Chunk,
    index: usize,
    goal: Goal,
    control: &'a Control<'a>,
    slots: Vec<Vec<Option<u64>>>,
    order: Vec<(usize, usize)>,
    env: Vec<Val>,
    out: ChunkOutcome,
}

impl<'a> Dfs<'a> {
    fn eval(&mut self, node: &Node) -> Val {
        let view = View {
            worlds: self.layer.worlds,
            individuals: self.layer.individuals,
            access: &self.chunk.access,
            exists: &self.chunk.exists,
            slots: &self.slots,
            layouts: &self.layer.layouts,
        };
        eval(node, &mut self.env, &view)
    }

    fn interrupted(&mut self) -> bool {
        if !self.out.nodes.is_multiple_of(256) {
            return false;
        }
        if let Some(best) = self.control.best {
            if best.load(Ordering::Relaxed) < self.index {
                self.out.abandoned = true;
                return true;
            }
        }
        if let Some(deadline) = self.control.deadline {
            if Instant::now() >= deadline {
                self.out.timed_out = true;
                return true;
            }
        }
        false
    }

    /// Returns false to stop the whole chunk.
    fn run(&mut self, pos: usize, mut settled: Vec<bool>) -> bool {
        self.out.nodes += 1;
        if self.interrupted() {
            return false;
        }
        let layer = self.layer;
        for (k, node) in layer.axioms.iter().enumerate() {
            if settled[k] {
                continue;
            }
            match self.eval(node) {
                Some(0) => return true,
                Some(_) => settled[k] = true,
                None => {}
            }
        }
        if pos == self.order.len() {
            return self.leaf();
        }
        let (cid, i) = self.order[pos];
        if self.slots[cid][i].is_some() {
            return self.run(pos + 1, settled);
        }
        let layout = &layer.layouts[cid];
        let partner = layer.paired[cid].then(|| layout.slots - 1 - i);
        for &v in &layout.values {
            self.slots[cid][i] = Some(v);
            if let Some(p) = partner {
                self.slots[cid][p] = Some(layout.base - 1 - v);
            }
            if !self.run(pos + 1, settled.clone()) {
                return false;
            }
        }
        self.slots[cid][i] = None;
        if let Some(p) = partner {
            self.slots[cid][p] = None;
        }
        true
    }

    fn flat(&self) -> Vec<u64> {
        self.slots.iter().flatten().map(|v| v.expect("complete assignment")).collect()
    }

    fn leaf(&mut self) -> bool {
        self.out.models += 1;
        match self.goal {
            Goal::Count => {
                if self.out.hits.is_empty() {
                    let f = self.flat();
                    self.out.hits.push(f);
                }
                true
            }
            Goal::Collect => {
                let f = self.flat();
                self.out.hits.push(f);
                true
            }
            Goal::Counterexample => {
                let conj = self.layer.conjecture.as_ref().expect("counterexample search needs a conjecture");
                if self.eval(conj) == Some(0) {
                    let f = self.flat();
                    self.out.hits.push(f);
                    if let Some(best) = self.control.best {
                        best.fetch_min(self.index, Ordering::Relaxed);
                    }
                    false
                } else {
                    true
                }
            }
        }
    }
}

/// Searches one chunk of a layer.
pub(crate) fn run_chunk(layer: &Layer, index: usize, goal: Goal, control: &Control) -> ChunkOutcome {
    if let Some(best) = control.best {
        if best.load(Ordering::Relaxed) < index {
            return ChunkOutcome {
                abandoned: true,
                ..ChunkOutcome::default()
            };
        }
    }
    let slots: Vec<Vec<Option<u64>>> = layer.layouts.iter().map(|l| vec![None; l.slots]).collect();
    let order = layer
        .layouts
        .iter()
        .enumerate()
        .flat_map(|(c, l)| (0..l.slots).map(move |i| (c, i)))
        .collect();
    let mut dfs = Dfs {
        layer,
        chunk: &layer.chunks[index],
        index,
        goal,
        control,
        slots,
        order,
        env: vec![None; layer.env_size],
        out: ChunkOutcome::default(),
    };
    dfs.run(0, vec![false; layer.axioms.len()]);
    dfs.out
}
