//! Canonical enumeration of accessibility relations and existence maps.
//!
//! A relation on `w` worlds is a bitmask over the pairs `(u, v)` in
//! row-major order, the first pair being the most significant bit. Masks
//! are visited in ascending numeric order. Existence maps are handled the
//! same way over `(world, individual)` pairs.

use crate::embed::{FrameClass, QuantMode};

fn unpack(mask: u64, bits: usize) -> Vec<bool> {
    (0..bits).map(|k| mask >> (bits - 1 - k) & 1 == 1).collect()
}

fn satisfies(access: &[bool], w: usize, frame: FrameClass) -> bool {
    let at = |u: usize, v: usize| access[u * w + v];
    let reflexive = || (0..w).all(|u| at(u, u));
    let symmetric = || (0..w).all(|u| (0..w).all(|v| !at(u, v) || at(v, u)));
    let transitive = || {
        (0..w).all(|u| (0..w).all(|v| !at(u, v) || (0..w).all(|t| !at(v, t) || at(u, t))))
    };
    match frame {
        FrameClass::K => true,
        FrameClass::KT => reflexive(),
        FrameClass::KB => symmetric(),
        FrameClass::S5 => reflexive() && symmetric() && transitive(),
    }
}

/// Accessibility relations of the frame class, row-major flattened.
pub fn access_relations(worlds: usize, frame: FrameClass) -> Vec<Vec<bool>> {
    let bits = worlds * worlds;
    (0..1u64 << bits)
        .map(|m| unpack(m, bits))
        .filter(|a| satisfies(a, worlds, frame))
        .collect()
}

/// Existence maps, `worlds x individuals` flattened. Possibilist mode only
/// uses the total map; actualist mode needs a nonempty domain per world.
pub fn existence_maps(worlds: usize, individuals: usize, mode: QuantMode) -> Vec<Vec<bool>> {
    let bits = worlds * individuals;
    match mode {
        QuantMode::Possibilist => vec![vec![true; bits]],
        QuantMode::Actualist => (0..1u64 << bits)
            .map(|m| unpack(m, bits))
            .filter(|e| e.chunks(individuals).all(|row| row.iter().any(|&b| b)))
            .collect(),
    }
}

/// Model sizes in search order.
pub fn sizes(max_worlds: usize, max_individuals: usize) -> Vec<(usize, usize)> {
    (1..=max_worlds)
        .flat_map(|w| (1..=max_individuals).map(move |d| (w, d)))
        .collect()
}
