use std::fmt;
use std::sync::Arc;

use super::PolyError;

/// Ordered list of variable names. The order fixes the meaning of exponent
/// vectors and the tie-breaking of graded-lex comparisons (first name is the
/// most significant).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VarSet(Arc<[String]>);

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(PolyError::BadVariableName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(PolyError::DuplicateVariable(n.clone()));
            }
        }
        Ok(VarSet(names.into()))
    }

    /// Panicking constructor for literal variable lists known to be valid.
    pub fn of(names: &[&str]) -> Self {
        Self::new(names.iter().copied()).expect("invalid literal variable list")
    }

    pub fn empty() -> Self {
        VarSet(Arc::from(Vec::<String>::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn is_subset_of(&self, other: &VarSet) -> bool {
        self.0.iter().all(|n| other.contains(n))
    }

    /// `self` followed by the names of `other` not already present.
    pub fn union(&self, other: &VarSet) -> VarSet {
        if other.is_subset_of(self) {
            return self.clone();
        }
        let mut names: Vec<String> = self.0.to_vec();
        names.extend(other.0.iter().filter(|n| !self.contains(n)).cloned());
        VarSet(names.into())
    }

    /// `self` with the listed names appended (existing names are kept once).
    pub fn extended(&self, extra: &[&str]) -> VarSet {
        self.union(&VarSet::new(extra.iter().copied()).expect("invalid variable names"))
    }

    /// A name derived from `base` that does not clash with this set.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.contains(n))
            .unwrap()
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.join(","))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
