use std::fmt;

use crate::poly::{Exponents, PolyError, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Lex,
    Grlex,
}

/// A group of variables ranked most significant first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub vars: Vec<String>,
    pub kind: BlockKind,
}

/// Product order over blocks: earlier blocks dominate later ones, each block
/// is compared by its own kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    blocks: Vec<Block>,
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl MonomialOrder {
    /// Lexicographic, `ranking[0]` most significant.
    pub fn lex(ranking: &[&str]) -> Self {
        MonomialOrder {
            blocks: vec![Block {
                vars: owned(ranking),
                kind: BlockKind::Lex,
            }],
        }
    }

    /// Graded lex, ties broken lexicographically by `ranking`.
    pub fn grlex(ranking: &[&str]) -> Self {
        MonomialOrder {
            blocks: vec![Block {
                vars: owned(ranking),
                kind: BlockKind::Grlex,
            }],
        }
    }

    /// Elimination order: any monomial involving `eliminated` beats every
    /// monomial in the `kept` block alone.
    pub fn block(eliminated: MonomialOrder, kept: MonomialOrder) -> Self {
        let mut blocks = eliminated.blocks;
        blocks.extend(kept.blocks);
        MonomialOrder { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// All variables, most significant block first.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.blocks
            .iter()
            .flat_map(|b| b.vars.iter().map(String::as_str))
    }

    pub(crate) fn layout(&self, vars: &VarSet) -> Result<Layout, PolyError> {
        let mut pos = vec![usize::MAX; vars.len()];
        let mut degree_slots = Vec::new();
        let mut next = 0;
        for b in &self.blocks {
            let slot = (b.kind == BlockKind::Grlex).then(|| {
                next += 1;
                next - 1
            });
            let mut members = Vec::new();
            for name in &b.vars {
                let i = vars
                    .index_of(name)
                    .ok_or_else(|| PolyError::UnknownVariable(name.clone()))?;
                if pos[i] != usize::MAX {
                    return Err(PolyError::DuplicateVariable(name.clone()));
                }
                pos[i] = next;
                members.push(next);
                next += 1;
            }
            if let Some(s) = slot {
                degree_slots.push((s, members));
            }
        }
        if let Some(i) = pos.iter().position(|&p| p == usize::MAX) {
            return Err(PolyError::Unsupported(format!(
                "monomial order does not rank `{}`",
                vars.name(i)
            )));
        }
        Ok(Layout {
            pos,
            degree_slots,
            len: next,
        })
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str(" >> ")?;
            }
            let kind = match b.kind {
                BlockKind::Lex => "lex",
                BlockKind::Grlex => "grlex",
            };
            write!(f, "{kind}({})", b.vars.join(">"))?;
        }
        Ok(())
    }
}

/// Monomials as order keys: for each block an optional total-degree entry
/// followed by the block's exponents in rank order. Comparing keys
/// lexicographically compares monomials.
pub(crate) type Key = Vec<u32>;

#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pos: Vec<usize>,
    degree_slots: Vec<(usize, Vec<usize>)>,
    len: usize,
}

impl Layout {
    pub fn key(&self, e: &[u32]) -> Key {
        let mut k = vec![0; self.len];
        for (i, &x) in e.iter().enumerate() {
            k[self.pos[i]] = x;
        }
        self.fix_degrees(&mut k);
        k
    }

    pub fn exponents(&self, k: &[u32]) -> Exponents {
        self.pos.iter().map(|&p| k[p]).collect()
    }

    fn fix_degrees(&self, k: &mut [u32]) {
        for (slot, members) in &self.degree_slots {
            k[*slot] = members.iter().map(|&m| k[m]).sum();
        }
    }

    pub fn lcm(&self, a: &[u32], b: &[u32]) -> Key {
        let mut k: Key = a.iter().zip(b).map(|(x, y)| *x.max(y)).collect();
        self.fix_degrees(&mut k);
        k
    }

    pub fn total_degree(&self, k: &[u32]) -> u32 {
        self.pos.iter().map(|&p| k[p]).sum()
    }

    pub fn coprime(&self, a: &[u32], b: &[u32]) -> bool {
        self.pos.iter().all(|&p| a[p] == 0 || b[p] == 0)
    }
}

pub(crate) fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub(crate) fn mul(a: &[u32], b: &[u32]) -> Key {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn quotient(a: &[u32], b: &[u32]) -> Key {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
