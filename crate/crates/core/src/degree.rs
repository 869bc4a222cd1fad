use std::borrow::Borrow;
use std::cmp::Ordering;
use std::fmt;
use std::ops::Index;

/// Per-type degree counts `(d_1, ..., d_N)` of a vertex.
///
/// Hashes and compares like the underlying `[u32]`, so maps keyed by
/// `GeneralizedDegree` can be queried with a borrowed slice.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GeneralizedDegree(Box<[u32]>);

impl GeneralizedDegree {
    pub fn new(counts: impl Into<Box<[u32]>>) -> Self {
        GeneralizedDegree(counts.into())
    }

    pub fn zeros(num_types: usize) -> Self {
        GeneralizedDegree(vec![0; num_types].into_boxed_slice())
    }

    /// The unit vector `e_l` (0-based `l`).
    pub fn unit(num_types: usize, l: usize) -> Self {
        let mut v = vec![0; num_types];
        v[l] = 1;
        GeneralizedDegree(v.into_boxed_slice())
    }

    pub fn num_types(&self) -> usize {
        self.0.len()
    }

    /// Total degree `s(d)`.
    pub fn weight(&self) -> u64 {
        weight(&self.0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// `d - e_l`, or `None` when `d_l == 0`.
    pub fn minus_unit(&self, l: usize) -> Option<Self> {
        let mut v = self.0.clone();
        v[l] = v[l].checked_sub(1)?;
        Some(GeneralizedDegree(v))
    }

    /// Order by total weight, then lexicographically.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        canonical_cmp(&self.0, &other.0)
    }

    /// Applies a type relabelling: component `l` moves to `perm[l]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut v = vec![0; self.0.len()];
        for (l, &c) in self.0.iter().enumerate() {
            v[perm[l]] = c;
        }
        GeneralizedDegree(v.into_boxed_slice())
    }
}

pub fn weight(counts: &[u32]) -> u64 {
    counts.iter().map(|&c| c as u64).sum()
}

pub fn canonical_cmp(a: &[u32], b: &[u32]) -> Ordering {
    weight(a).cmp(&weight(b)).then_with(|| a.cmp(b))
}

impl Borrow<[u32]> for GeneralizedDegree {
    fn borrow(&self) -> &[u32] {
        &self.0
    }
}

impl Index<usize> for GeneralizedDegree {
    type Output = u32;

    fn index(&self, l: usize) -> &u32 {
        &self.0[l]
    }
}

impl From<Vec<u32>> for GeneralizedDegree {
    fn from(v: Vec<u32>) -> Self {
        GeneralizedDegree(v.into_boxed_slice())
    }
}

impl From<&[u32]> for GeneralizedDegree {
    fn from(v: &[u32]) -> Self {
        GeneralizedDegree(v.into())
    }
}

impl fmt::Debug for GeneralizedDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GeneralizedDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All vectors in `N^parts` with the given weight, in lexicographic order.
pub fn compositions(weight: u32, parts: usize) -> Compositions {
    Compositions { parts, weight, current: None, done: parts == 0 && weight != 0 }
}

pub struct Compositions {
    parts: usize,
    weight: u32,
    current: Option<Vec<u32>>,
    done: bool,
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let cur = match self.current.as_mut() {
            None => {
                // Lexicographically smallest: everything in the last slot.
                let mut v = vec![0; self.parts];
                if let Some(last) = v.last_mut() {
                    *last = self.weight;
                }
                if self.parts == 0 {
                    self.done = true;
                }
                self.current = Some(v.clone());
                return Some(v);
            }
            Some(cur) => cur,
        };
        let n = self.parts;
        if n < 2 {
            self.done = true;
            return None;
        }
        // Find the rightmost position i < n-1 that can be incremented: the
        // suffix after it must hold at least one unit.
        let mut suffix = cur[n - 1];
        let mut i = n - 1;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if suffix > 0 {
                break;
            }
            suffix += cur[i];
        }
        cur[i] += 1;
        let rest = suffix - 1;
        for c in cur[i + 1..].iter_mut() {
            *c = 0;
        }
        cur[n - 1] = rest;
        Some(cur.clone())
    }
}
