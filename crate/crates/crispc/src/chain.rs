//! Finite truth chains and their operator algebra.
//!
//! A chain of `n` elements carries the degrees `0, 1/(n-1), ..., 1`,
//! represented throughout as exact integer indices `0..n-1`. The module
//! provides the t-norm families (Gödel, Łukasiewicz, custom tables), the
//! Zadeh operators, and the four frontier sets that drive the reduction:
//! `⊖⁻(d)`, `⊗⁻(d)`, `⊕⁻(d)`, `⇒⁻(d)`.

use thiserror::Error;

/// Index into a chain's ordered degrees; index `i` denotes the value `i/(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree(pub u32);

impl Degree {
    pub const ZERO: Degree = Degree(0);

    pub fn idx(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Operator family interpreting the logical constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Goedel,
    Lukasiewicz,
    Zadeh,
    Custom,
}

impl Family {
    pub fn keyword(self) -> &'static str {
        match self {
            Family::Goedel => "goedel",
            Family::Lukasiewicz => "lukasiewicz",
            Family::Zadeh => "zadeh",
            Family::Custom => "custom",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain must have at least 2 degrees, got {0}")]
    TooSmall(u32),
    #[error("custom table required iff family is custom")]
    TableMismatch,
    #[error("custom table must be {n}x{n} with entries below {n}")]
    TableShape { n: u32 },
    #[error("custom table is not a t-norm: {law} violated at ({x}, {y}, {z})")]
    NotATNorm {
        law: &'static str,
        x: u32,
        y: u32,
        z: u32,
    },
    #[error("succ(1) is undefined")]
    SuccOfTop,
    #[error("pred(0) is undefined")]
    PredOfBottom,
    #[error("operation requires a positive degree")]
    NeedsPositive,
    #[error("operation requires a degree below 1")]
    NeedsBelowTop,
    #[error("degree index {idx} out of range for chain of {n}")]
    OutOfRange { idx: u32, n: u32 },
}

/// A validated finite chain together with its operators.
///
/// Chains are immutable after construction and freely shareable; every
/// operation is pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    n: u32,
    family: Family,
    /// Custom ⊗ table, row-major `n*n`; `None` for the built-in families.
    tnorm_table: Option<Vec<u32>>,
    /// Residuum derived from the custom table at construction.
    residuum_table: Option<Vec<u32>>,
}

/// Constructs and validates a chain; custom tables are checked for the
/// t-norm laws with a witness triple reported on failure.
pub fn mk_chain(n: u32, family: Family, table: Option<Vec<Vec<Degree>>>) -> Result<Chain, ChainError> {
    Chain::new(n, family, table)
}

impl Chain {
    pub fn new(n: u32, family: Family, table: Option<Vec<Vec<Degree>>>) -> Result<Chain, ChainError> {
        if n < 2 {
            return Err(ChainError::TooSmall(n));
        }
        match (family, table) {
            (Family::Custom, Some(rows)) => {
                let mut flat = Vec::with_capacity((n as usize) * (n as usize));
                if rows.len() != n as usize {
                    return Err(ChainError::TableShape { n });
                }
                for row in &rows {
                    if row.len() != n as usize {
                        return Err(ChainError::TableShape { n });
                    }
                    for d in row {
                        if d.0 >= n {
                            return Err(ChainError::TableShape { n });
                        }
                        flat.push(d.0);
                    }
                }
                check_tnorm_laws(n, &flat)?;
                let residuum = derive_residuum(n, &flat);
                Ok(Chain {
                    n,
                    family,
                    tnorm_table: Some(flat),
                    residuum_table: Some(residuum),
                })
            }
            (Family::Custom, None) => Err(ChainError::TableMismatch),
            (_, Some(_)) => Err(ChainError::TableMismatch),
            (_, None) => Ok(Chain {
                n,
                family,
                tnorm_table: None,
                residuum_table: None,
            }),
        }
    }

    pub fn size(&self) -> u32 {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Zadeh's implication is not a residuum; modules that rely on the
    /// residuation law must refuse non-residuated chains.
    pub fn is_residuated(&self) -> bool {
        self.family != Family::Zadeh
    }

    pub fn custom_table(&self) -> Option<&[u32]> {
        self.tnorm_table.as_deref()
    }

    pub fn bot(&self) -> Degree {
        Degree(0)
    }

    pub fn top(&self) -> Degree {
        Degree(self.n - 1)
    }

    pub fn degree(&self, idx: u32) -> Result<Degree, ChainError> {
        if idx < self.n {
            Ok(Degree(idx))
        } else {
            Err(ChainError::OutOfRange { idx, n: self.n })
        }
    }

    pub fn degrees(&self) -> impl DoubleEndedIterator<Item = Degree> {
        (0..self.n).map(Degree)
    }

    pub fn positive_degrees(&self) -> impl DoubleEndedIterator<Item = Degree> {
        (1..self.n).map(Degree)
    }

    /// Exact rational value of a degree, as (numerator, denominator).
    pub fn value(&self, d: Degree) -> (u32, u32) {
        (d.0, self.n - 1)
    }

    pub fn succ(&self, d: Degree) -> Result<Degree, ChainError> {
        if d.0 + 1 < self.n {
            Ok(Degree(d.0 + 1))
        } else {
            Err(ChainError::SuccOfTop)
        }
    }

    pub fn pred(&self, d: Degree) -> Result<Degree, ChainError> {
        if d.0 > 0 {
            Ok(Degree(d.0 - 1))
        } else {
            Err(ChainError::PredOfBottom)
        }
    }

    pub fn tnorm(&self, x: Degree, y: Degree) -> Degree {
        debug_assert!(x.0 < self.n && y.0 < self.n);
        let top = self.n - 1;
        Degree(match self.family {
            Family::Goedel | Family::Zadeh => x.0.min(y.0),
            Family::Lukasiewicz => (x.0 + y.0).saturating_sub(top),
            Family::Custom => self.tnorm_table.as_ref().unwrap()[(x.0 * self.n + y.0) as usize],
        })
    }

    /// De Morgan dual of the t-norm: `x ⊕ y = 1 - ((1-x) ⊗ (1-y))`.
    pub fn tconorm(&self, x: Degree, y: Degree) -> Degree {
        let top = self.n - 1;
        Degree(top - self.tnorm(Degree(top - x.0), Degree(top - y.0)).0)
    }

    /// The residuum for t-norm families; Kleene–Dienes `max(1-x, y)` for Zadeh.
    pub fn residuum(&self, x: Degree, y: Degree) -> Degree {
        debug_assert!(x.0 < self.n && y.0 < self.n);
        let top = self.n - 1;
        Degree(match self.family {
            Family::Goedel => {
                if x.0 <= y.0 {
                    top
                } else {
                    y.0
                }
            }
            Family::Lukasiewicz => top.min(top - x.0 + y.0),
            Family::Zadeh => (top - x.0).max(y.0),
            Family::Custom => self.residuum_table.as_ref().unwrap()[(x.0 * self.n + y.0) as usize],
        })
    }

    /// `⊖x = x ⇒ 0`; for Zadeh this coincides with `1 - x`.
    pub fn neg(&self, x: Degree) -> Degree {
        self.residuum(x, Degree(0))
    }

    /// `⊖⁻(d) = max { d' | ⊖d' ≥ d }`, defined for `d > 0`; always below 1.
    pub fn neg_inv_max(&self, d: Degree) -> Result<Degree, ChainError> {
        if d.is_zero() {
            return Err(ChainError::NeedsPositive);
        }
        // ⊖ is antitone, so the satisfying set is downward closed.
        for idx in (0..self.n).rev() {
            if self.neg(Degree(idx)).0 >= d.0 {
                return Ok(Degree(idx));
            }
        }
        unreachable!("⊖0 = 1 always qualifies")
    }

    /// Least `x` with `⊖x ≤ d`, defined for `d < 1`; rewrites upper bounds on
    /// negated role assertions into lower bounds on the role itself.
    pub fn neg_leq_threshold(&self, d: Degree) -> Result<Degree, ChainError> {
        if d.0 >= self.n - 1 {
            return Err(ChainError::NeedsBelowTop);
        }
        for idx in 0..self.n {
            if self.neg(Degree(idx)).0 <= d.0 {
                return Ok(Degree(idx));
            }
        }
        unreachable!("⊖1 = 0 always qualifies")
    }

    /// `⊗⁻(d)`: Pareto-minimal pairs with `d₁ ⊗ d₂ ≥ d`, in lexicographic
    /// order of indices. Requires `d > 0`.
    pub fn tnorm_frontier(&self, d: Degree) -> Result<Vec<(Degree, Degree)>, ChainError> {
        if d.is_zero() {
            return Err(ChainError::NeedsPositive);
        }
        Ok(self.min_frontier(d, |x, y| self.tnorm(x, y)))
    }

    /// `⊕⁻(d)`: same as [`Chain::tnorm_frontier`] for the t-conorm.
    pub fn tconorm_frontier(&self, d: Degree) -> Result<Vec<(Degree, Degree)>, ChainError> {
        if d.is_zero() {
            return Err(ChainError::NeedsPositive);
        }
        Ok(self.min_frontier(d, |x, y| self.tconorm(x, y)))
    }

    fn min_frontier(&self, d: Degree, op: impl Fn(Degree, Degree) -> Degree) -> Vec<(Degree, Degree)> {
        // For each d₁ the least d₂ reaching the bound; monotonicity makes the
        // per-d₁ minima a staircase, so dominated pairs are exactly those whose
        // d₂ does not strictly drop below every earlier kept pair.
        let mut out: Vec<(Degree, Degree)> = Vec::new();
        for x in 0..self.n {
            let mut best: Option<u32> = None;
            for y in 0..self.n {
                if op(Degree(x), Degree(y)).0 >= d.0 {
                    best = Some(y);
                    break;
                }
            }
            if let Some(y) = best {
                if out.last().is_none_or(|&(_, py)| y < py.0) {
                    out.push((Degree(x), Degree(y)));
                }
            }
        }
        out
    }

    /// `⇒⁻(d)`: pairs with `d₁ ⇒ d₂ < d`, minimized in the first and
    /// maximized in the second component; every returned `d₂` is below 1.
    /// Requires `d > 0`.
    pub fn impl_frontier(&self, d: Degree) -> Result<Vec<(Degree, Degree)>, ChainError> {
        if d.is_zero() {
            return Err(ChainError::NeedsPositive);
        }
        let mut out: Vec<(Degree, Degree)> = Vec::new();
        for x in 0..self.n {
            // ⇒ is monotone in the second argument: the largest failing d₂.
            let mut best: Option<u32> = None;
            for y in (0..self.n).rev() {
                if self.residuum(Degree(x), Degree(y)).0 < d.0 {
                    best = Some(y);
                    break;
                }
            }
            if let Some(y) = best {
                if out.last().is_none_or(|&(_, py)| y > py.0) {
                    out.push((Degree(x), Degree(y)));
                }
            }
        }
        Ok(out)
    }
}

fn check_tnorm_laws(n: u32, t: &[u32]) -> Result<(), ChainError> {
    let at = |x: u32, y: u32| t[(x * n + y) as usize];
    let top = n - 1;
    for x in 0..n {
        if at(x, top) != x {
            return Err(ChainError::NotATNorm {
                law: "identity 1",
                x,
                y: top,
                z: at(x, top),
            });
        }
    }
    for x in 0..n {
        for y in 0..n {
            if at(x, y) != at(y, x) {
                return Err(ChainError::NotATNorm {
                    law: "commutativity",
                    x,
                    y,
                    z: at(x, y),
                });
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for y2 in y + 1..n {
                if at(x, y) > at(x, y2) {
                    return Err(ChainError::NotATNorm {
                        law: "monotonicity",
                        x,
                        y,
                        z: y2,
                    });
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if at(at(x, y), z) != at(x, at(y, z)) {
                    return Err(ChainError::NotATNorm {
                        law: "associativity",
                        x,
                        y,
                        z,
                    });
                }
            }
        }
    }
    Ok(())
}

fn derive_residuum(n: u32, t: &[u32]) -> Vec<u32> {
    // x ⇒ z = max { y | x ⊗ y ≤ z }; well-defined since x ⊗ 0 = 0.
    let at = |x: u32, y: u32| t[(x * n + y) as usize];
    let mut res = vec![0u32; (n * n) as usize];
    for x in 0..n {
        for z in 0..n {
            let mut best = 0;
            for y in (0..n).rev() {
                if at(x, y) <= z {
                    best = y;
                    break;
                }
            }
            res[(x * n + z) as usize] = best;
        }
    }
    res
}
