//! Exact index-level model of a shift-type unitary `T` and the even-index
//! projection `S` on `ℓ²`, showing that `T(Ran S) ⊆ Ran S` and
//! `S*(Ran T) ⊆ Ran T` do not force `TS` to be EP.
//!
//! Every operator here sends each basis vector `ξ_j` either to another basis
//! vector or to zero, so ranges and kernels are spans of index sets and can
//! be computed exactly. Enumeration stops at a cutoff `N`; an index whose
//! path through the factors leaves `[1, N]` is a boundary index and takes no
//! part in any verdict.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, NumericalContext, C64};
use crate::subspace::{kernel_of, range_of, Subspace};

/// Closed-form index rule; total on the positive integers.
pub type IndexRule = fn(u64) -> u64;
/// Index predicate selecting the kept basis vectors of a 0/1 diagonal.
pub type IndexPredicate = fn(u64) -> bool;

#[derive(Clone)]
pub enum IndexMapOperator {
    /// `ξ_j ↦ ξ_{forward(j)}`; `inverse` must undo `forward`.
    Bijection {
        name: String,
        forward: IndexRule,
        inverse: IndexRule,
    },
    /// `ξ_j ↦ ξ_j` when `keep(j)`, else `0`.
    Diagonal01 { name: String, keep: IndexPredicate },
    /// Product of the factors, leftmost first: `[A, B]` is `A∘B`.
    Composite(Vec<IndexMapOperator>),
}

impl fmt::Debug for IndexMapOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl IndexMapOperator {
    pub fn name(&self) -> String {
        match self {
            IndexMapOperator::Bijection { name, .. } | IndexMapOperator::Diagonal01 { name, .. } => {
                name.clone()
            }
            IndexMapOperator::Composite(factors) => factors
                .iter()
                .map(|f| f.name())
                .collect::<Vec<_>>()
                .join(""),
        }
    }

    /// Factors in application order (rightmost first).
    fn steps(&self) -> Vec<&IndexMapOperator> {
        match self {
            IndexMapOperator::Composite(factors) => {
                factors.iter().rev().flat_map(|f| f.steps()).collect()
            }
            atom => vec![atom],
        }
    }

    /// Image of `ξ_j` without any cutoff: `None` when annihilated.
    pub fn apply(&self, j: u64) -> Option<u64> {
        self.steps().into_iter().try_fold(j, |k, step| step_apply(step, k))
    }

    /// Walks `j` through the factors. `Err(())` when an intermediate or final
    /// index leaves `[1, cutoff]`.
    fn trace(&self, j: u64, cutoff: u64) -> std::result::Result<Option<u64>, ()> {
        let mut k = j;
        for step in self.steps() {
            match step_apply(step, k) {
                None => return Ok(None),
                Some(next) if next == 0 || next > cutoff => return Err(()),
                Some(next) => k = next,
            }
        }
        Ok(Some(k))
    }
}

fn step_apply(op: &IndexMapOperator, j: u64) -> Option<u64> {
    match op {
        IndexMapOperator::Bijection { forward, .. } => Some(forward(j)),
        IndexMapOperator::Diagonal01 { keep, .. } => keep(j).then_some(j),
        IndexMapOperator::Composite(_) => op.apply(j),
    }
}

/// `A∘B`.
pub fn compose(a: &IndexMapOperator, b: &IndexMapOperator) -> IndexMapOperator {
    let mut factors = Vec::new();
    for op in [a, b] {
        match op {
            IndexMapOperator::Composite(inner) => factors.extend(inner.iter().cloned()),
            atom => factors.push(atom.clone()),
        }
    }
    IndexMapOperator::Composite(factors)
}

/// Adjoint: inverse map for bijections, itself for 0/1 diagonals, reversed
/// adjoints for composites.
pub fn adjoint_im(a: &IndexMapOperator) -> IndexMapOperator {
    match a {
        IndexMapOperator::Bijection {
            name,
            forward,
            inverse,
        } => IndexMapOperator::Bijection {
            name: adjoint_name(name),
            forward: *inverse,
            inverse: *forward,
        },
        IndexMapOperator::Diagonal01 { .. } => a.clone(),
        IndexMapOperator::Composite(factors) => {
            IndexMapOperator::Composite(factors.iter().rev().map(adjoint_im).collect())
        }
    }
}

fn adjoint_name(name: &str) -> String {
    name.strip_suffix('*')
        .map(str::to_owned)
        .unwrap_or_else(|| format!("{name}*"))
}

/// Sorted, deduplicated basis indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexSet(Vec<u64>);

impl IndexSet {
    pub fn contains(&self, j: u64) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<u64> for IndexSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let set: BTreeSet<u64> = iter.into_iter().collect();
        IndexSet(set.into_iter().collect())
    }
}

/// Interior members of a range or kernel, plus the boundary indices that
/// were excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classified {
    pub members: IndexSet,
    pub boundary: IndexSet,
}

/// `ξ_i ∈ Ran(A)` exactly when the adjoint path keeps `ξ_i` alive.
pub fn classify_range(a: &IndexMapOperator, cutoff: u64) -> Classified {
    let adj = adjoint_im(a);
    let mut members = Vec::new();
    let mut boundary = Vec::new();
    for i in 1..=cutoff {
        match adj.trace(i, cutoff) {
            Ok(Some(_)) => members.push(i),
            Ok(None) => {}
            Err(()) => boundary.push(i),
        }
    }
    Classified {
        members: members.into_iter().collect(),
        boundary: boundary.into_iter().collect(),
    }
}

/// `ξ_j ∈ Ker(A)` exactly when the forward path annihilates `ξ_j`.
pub fn classify_kernel(a: &IndexMapOperator, cutoff: u64) -> Classified {
    let mut members = Vec::new();
    let mut boundary = Vec::new();
    for j in 1..=cutoff {
        match a.trace(j, cutoff) {
            Ok(None) => members.push(j),
            Ok(Some(_)) => {}
            Err(()) => boundary.push(j),
        }
    }
    Classified {
        members: members.into_iter().collect(),
        boundary: boundary.into_iter().collect(),
    }
}

pub fn range_indices(a: &IndexMapOperator, cutoff: u64) -> IndexSet {
    classify_range(a, cutoff).members
}

pub fn kernel_indices(a: &IndexMapOperator, cutoff: u64) -> IndexSet {
    classify_kernel(a, cutoff).members
}

/// EP test in the exact model: on indices that are interior for `A` and
/// `A*`, `Ran A = Ran A*` and every index lies in exactly one of `Ran A`,
/// `Ker A`.
pub fn is_ep_exact(a: &IndexMapOperator, cutoff: u64) -> bool {
    let adj = adjoint_im(a);
    let parts = [
        classify_range(a, cutoff),
        classify_range(&adj, cutoff),
        classify_kernel(a, cutoff),
    ];
    let excluded: BTreeSet<u64> = parts.iter().flat_map(|c| c.boundary.iter()).collect();
    (1..=cutoff).filter(|i| !excluded.contains(i)).all(|i| {
        let in_ran = parts[0].members.contains(i);
        in_ran == parts[1].members.contains(i) && in_ran != parts[2].members.contains(i)
    })
}

fn t_forward(j: u64) -> u64 {
    match j {
        1 => 2,
        j if j % 2 == 0 => j + 2,
        j => j - 2,
    }
}

fn t_inverse(j: u64) -> u64 {
    match j {
        2 => 1,
        j if j % 2 == 0 => j - 2,
        j => j + 2,
    }
}

fn is_even(j: u64) -> bool {
    j.is_multiple_of(2)
}

/// Smallest admissible cutoff for [`build_shift_pair`].
pub const MIN_BUILD_CUTOFF: u64 = 6;
/// Smallest admissible cutoff for [`verify_shift_example`].
pub const MIN_VERIFY_CUTOFF: u64 = 10;

fn check_cutoff(cutoff: u64, min: u64) -> Result<()> {
    if cutoff < min {
        return Err(Error::InvalidCutoff {
            cutoff: cutoff as usize,
            reason: "cutoff is below the minimum",
        });
    }
    if !cutoff.is_multiple_of(2) {
        return Err(Error::InvalidCutoff {
            cutoff: cutoff as usize,
            reason: "cutoff must be even",
        });
    }
    Ok(())
}

/// `T`: `ξ₁ ↦ ξ₂`, `ξ_{2j} ↦ ξ_{2j+2}`, `ξ_{2j+1} ↦ ξ_{2j−1}`, a unitary
/// walking odd indices down to `ξ₁` and then up the evens; `S`: the
/// orthogonal projection onto `span{ξ_{2j}}`.
pub fn build_shift_pair(cutoff: u64) -> Result<(IndexMapOperator, IndexMapOperator)> {
    check_cutoff(cutoff, MIN_BUILD_CUTOFF)?;
    let t = IndexMapOperator::Bijection {
        name: "T".into(),
        forward: t_forward,
        inverse: t_inverse,
    };
    let s = IndexMapOperator::Diagonal01 {
        name: "S".into(),
        keep: is_even,
    };
    // Injectivity on [1, N] and the inverse rule, by enumeration.
    let images: BTreeSet<u64> = (1..=cutoff).map(t_forward).collect();
    assert_eq!(images.len() as u64, cutoff, "T rule must be injective");
    assert!((1..=cutoff).all(|j| t_inverse(t_forward(j)) == j));
    Ok((t, s))
}

/// Exact verdicts on the shift pair at one cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftReport {
    pub cutoff: u64,
    /// `2 ∉ Ran(TS)`.
    pub two_outside_range: bool,
    /// `2 ∉ Ker(TS)`.
    pub two_outside_kernel: bool,
    /// `T` maps even indices to even indices: `T(Ran S) ⊆ Ran S`.
    pub t_preserves_evens: bool,
    /// `S*(Ran T) ⊆ Ran T`.
    pub s_adj_preserves_ran_t: bool,
    pub t_is_ep: bool,
    pub s_is_ep: bool,
    pub ts_is_ep: bool,
    /// `2 ∈ Ran((TS)*)`: the witness that `Ran(TS) ≠ Ran((TS)*)`.
    pub two_in_adjoint_range: bool,
    pub range_ts: IndexSet,
    pub kernel_ts: IndexSet,
    pub boundary_ts: IndexSet,
}

impl ShiftReport {
    /// The claims of the example: both inclusions hold, `T` and `S` are EP,
    /// and `ξ₂` escapes `Ran(TS) ⊕ Ker(TS)`, so `TS` is not EP.
    pub fn passes(&self) -> bool {
        self.two_outside_range
            && self.two_outside_kernel
            && self.t_preserves_evens
            && self.s_adj_preserves_ran_t
            && self.t_is_ep
            && self.s_is_ep
            && !self.ts_is_ep
            && self.two_in_adjoint_range
    }

    /// Cutoff-independent verdicts, for comparing runs at different `N`.
    pub fn verdicts(&self) -> [(&'static str, bool); 8] {
        [
            ("2 not in Ran(TS)", self.two_outside_range),
            ("2 not in Ker(TS)", self.two_outside_kernel),
            ("T(Ran S) in Ran S", self.t_preserves_evens),
            ("S*(Ran T) in Ran T", self.s_adj_preserves_ran_t),
            ("T is EP", self.t_is_ep),
            ("S is EP", self.s_is_ep),
            ("TS is EP", self.ts_is_ep),
            ("2 in Ran((TS)*)", self.two_in_adjoint_range),
        ]
    }
}

pub fn verify_shift_example(cutoff: u64) -> Result<ShiftReport> {
    check_cutoff(cutoff, MIN_VERIFY_CUTOFF)?;
    let (t, s) = build_shift_pair(cutoff)?;
    let ts = compose(&t, &s);
    let range = classify_range(&ts, cutoff);
    let kernel = classify_kernel(&ts, cutoff);
    let adj_range = classify_range(&adjoint_im(&ts), cutoff);

    let evens = range_indices(&s, cutoff);
    let t_preserves_evens = evens
        .iter()
        .filter_map(|j| t.trace(j, cutoff).ok().flatten())
        .all(is_even);

    let ran_t = classify_range(&t, cutoff);
    let s_adj = adjoint_im(&s);
    let s_adj_preserves_ran_t = ran_t.members.iter().all(|i| match s_adj.trace(i, cutoff) {
        Ok(Some(k)) => ran_t.members.contains(k) || ran_t.boundary.contains(k),
        Ok(None) | Err(()) => true,
    });

    let boundary_ts: IndexSet = range
        .boundary
        .iter()
        .chain(kernel.boundary.iter())
        .collect();
    Ok(ShiftReport {
        cutoff,
        two_outside_range: !range.members.contains(2) && !range.boundary.contains(2),
        two_outside_kernel: !kernel.members.contains(2) && !kernel.boundary.contains(2),
        t_preserves_evens,
        s_adj_preserves_ran_t,
        t_is_ep: is_ep_exact(&t, cutoff),
        s_is_ep: is_ep_exact(&s, cutoff),
        ts_is_ep: is_ep_exact(&ts, cutoff),
        two_in_adjoint_range: adj_range.members.contains(2),
        range_ts: range.members,
        kernel_ts: kernel.members,
        boundary_ts,
    })
}

/// `N × N` 0/1 matrix of `A` restricted to `span{ξ₁, …, ξ_N}`.
pub fn truncated_matrix(a: &IndexMapOperator, cutoff: u64) -> ComplexMatrix {
    let n = cutoff as usize;
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 1..=cutoff {
        if let Ok(Some(i)) = a.trace(j, cutoff) {
            m.set(i as usize - 1, j as usize - 1, C64::new(1.0, 0.0));
        }
    }
    m
}

#[derive(Debug, Clone)]
pub struct TruncationCheck {
    /// Interior (operator, index) memberships compared.
    pub compared: usize,
    /// `(operator, index, "range" | "kernel")` disagreements.
    pub mismatches: Vec<(String, u64, &'static str)>,
}

impl TruncationCheck {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn numerically_contains(space: &Subspace, i: u64, tol: f64) -> bool {
    let q = space.basis();
    let mut e = ComplexMatrix::zeros(q.rows(), 1);
    e.set(i as usize - 1, 0, C64::new(1.0, 0.0));
    let projected = q * &(&q.adjoint() * &e);
    projected.distance(&e) <= tol
}

/// Compares the exact model with numerical ranges and kernels of the
/// truncated matrices of `T`, `S` and `TS`, on interior indices only.
pub fn cross_check_truncation(cutoff: u64, ctx: &NumericalContext) -> Result<TruncationCheck> {
    let (t, s) = build_shift_pair(cutoff)?;
    let ts = compose(&t, &s);
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for op in [&t, &s, &ts] {
        let matrix = truncated_matrix(op, cutoff);
        let num_range = range_of(&matrix, ctx)?;
        let num_kernel = kernel_of(&matrix, ctx)?;
        for (kind, exact, numeric) in [
            ("range", classify_range(op, cutoff), &num_range),
            ("kernel", classify_kernel(op, cutoff), &num_kernel),
        ] {
            for i in (1..=cutoff).filter(|i| !exact.boundary.contains(*i)) {
                compared += 1;
                if exact.members.contains(i) != numerically_contains(numeric, i, ctx.eq_tol) {
                    mismatches.push((op.name(), i, kind));
                }
            }
        }
    }
    Ok(TruncationCheck {
        compared,
        mismatches,
    })
}
