//! Explicit finite-model evaluator for fuzzy and classical semantics, and an
//! exhaustive bounded model search.
//!
//! Everything here is the ground truth the rest of the crate is tested
//! against: concept/axiom evaluation follows the semantics tables directly,
//! with suprema and infima realized as maxima and minima over the finite
//! domain. The model search enumerates interpretations in a fixed order
//! (domain sizes ascending, individual placements, then tables in row-major
//! degree-index order) and prunes with sound interval bounds, so it reports
//! the lexicographically first model.

use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chain::{Chain, Degree};
use crate::crispify::CutTable;
use crate::exec;
use crate::model::{Axiom, Cmp, ConceptExpr, CutOrigin, FuzzyOntology, RoleExpr};
use crate::queries::{AtomKind, ClassicalCq, FuzzyCq, ScoringQuery, Term, ThresholdCq, Ucq};

/// Explicit interpretation over a finite domain `0..domain_size`; tables are
/// degree indices on the owning ontology's chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interp {
    pub domain_size: usize,
    pub ind_map: Vec<usize>,
    /// Per concept id, `domain_size` cells.
    pub concepts: Vec<Vec<u32>>,
    /// Per role id, `domain_size²` cells, row-major.
    pub roles: Vec<Vec<u32>>,
}

impl Interp {
    pub fn zeroed(onto: &FuzzyOntology, domain_size: usize) -> Interp {
        Interp {
            domain_size,
            ind_map: vec![0; onto.sig.inds.len()],
            concepts: vec![vec![0; domain_size]; onto.sig.concepts.len()],
            roles: vec![vec![0; domain_size * domain_size]; onto.sig.roles.len()],
        }
    }

    pub fn concept_cell(&self, c: usize, x: usize) -> u32 {
        self.concepts[c][x]
    }

    pub fn role_cell(&self, r: usize, x: usize, y: usize) -> u32 {
        self.roles[r][x * self.domain_size + y]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("query still has distinguished variables; instantiate it first")]
    FreeDistinguished,
    #[error("search budget must be positive")]
    ZeroBudget,
}

/// Lower/upper views of a partially assigned interpretation; `lo == hi`
/// everywhere makes every evaluation exact.
struct Bounds<'a> {
    lo: &'a Interp,
    hi: &'a Interp,
}

fn role_bounds(b: &Bounds, chain: &Chain, r: &RoleExpr, x: usize, y: usize) -> (u32, u32) {
    match r {
        RoleExpr::Name(id) => (
            b.lo.role_cell(id.0 as usize, x, y),
            b.hi.role_cell(id.0 as usize, x, y),
        ),
        RoleExpr::Inverse(id) => (
            b.lo.role_cell(id.0 as usize, y, x),
            b.hi.role_cell(id.0 as usize, y, x),
        ),
        RoleExpr::Universal => {
            let t = chain.top().0;
            (t, t)
        }
    }
}

/// `sup` over pairwise-distinct m-tuples of `min` of per-element values: the
/// m-th largest value, 1 for m = 0 and 0 when the domain is too small.
fn kth_largest(values: &mut [u32], m: usize, top: u32) -> u32 {
    if m == 0 {
        return top;
    }
    if values.len() < m {
        return 0;
    }
    values.sort_unstable_by(|a, b| b.cmp(a));
    values[m - 1]
}

fn concept_bounds(b: &Bounds, chain: &Chain, c: &ConceptExpr, x: usize) -> (u32, u32) {
    let top = chain.top().0;
    let t = |i: u32| Degree(i);
    match c {
        ConceptExpr::Top => (top, top),
        ConceptExpr::Bot => (0, 0),
        ConceptExpr::Name(id) => (
            b.lo.concept_cell(id.0 as usize, x),
            b.hi.concept_cell(id.0 as usize, x),
        ),
        ConceptExpr::Not(inner) => {
            let (lo, hi) = concept_bounds(b, chain, inner, x);
            (chain.neg(t(hi)).0, chain.neg(t(lo)).0)
        }
        ConceptExpr::And(p, q) => {
            let (plo, phi) = concept_bounds(b, chain, p, x);
            let (qlo, qhi) = concept_bounds(b, chain, q, x);
            (chain.tnorm(t(plo), t(qlo)).0, chain.tnorm(t(phi), t(qhi)).0)
        }
        ConceptExpr::Or(p, q) => {
            let (plo, phi) = concept_bounds(b, chain, p, x);
            let (qlo, qhi) = concept_bounds(b, chain, q, x);
            (chain.tconorm(t(plo), t(qlo)).0, chain.tconorm(t(phi), t(qhi)).0)
        }
        ConceptExpr::Exists(r, inner) => {
            let mut lo = 0;
            let mut hi = 0;
            for y in 0..b.lo.domain_size {
                let (rlo, rhi) = role_bounds(b, chain, r, x, y);
                let (clo, chi) = concept_bounds(b, chain, inner, y);
                lo = lo.max(chain.tnorm(t(rlo), t(clo)).0);
                hi = hi.max(chain.tnorm(t(rhi), t(chi)).0);
            }
            (lo, hi)
        }
        ConceptExpr::Forall(r, inner) => {
            let mut lo = top;
            let mut hi = top;
            for y in 0..b.lo.domain_size {
                let (rlo, rhi) = role_bounds(b, chain, r, x, y);
                let (clo, chi) = concept_bounds(b, chain, inner, y);
                lo = lo.min(chain.residuum(t(rhi), t(clo)).0);
                hi = hi.min(chain.residuum(t(rlo), t(chi)).0);
            }
            (lo, hi)
        }
        ConceptExpr::Nominal(entries) => {
            let mut v = 0;
            for (d, o) in entries {
                if b.lo.ind_map[o.0 as usize] == x {
                    v = v.max(d.0);
                }
            }
            (v, v)
        }
        ConceptExpr::AtLeast(m, r) => {
            number_restriction_bounds(b, chain, *m as usize, r, None, x, false)
        }
        ConceptExpr::AtMost(m, r) => number_restriction_bounds(b, chain, *m as usize, r, None, x, true),
        ConceptExpr::AtLeastQ(m, r, inner) => {
            number_restriction_bounds(b, chain, *m as usize, r, Some(inner), x, false)
        }
        ConceptExpr::AtMostQ(m, r, inner) => {
            number_restriction_bounds(b, chain, *m as usize, r, Some(inner), x, true)
        }
        ConceptExpr::SelfLoop(r) => role_bounds(b, chain, r, x, x),
    }
}

fn number_restriction_bounds(
    b: &Bounds,
    chain: &Chain,
    m: usize,
    r: &RoleExpr,
    filler: Option<&ConceptExpr>,
    x: usize,
    at_most: bool,
) -> (u32, u32) {
    let top = chain.top().0;
    let mut vlo = Vec::with_capacity(b.lo.domain_size);
    let mut vhi = Vec::with_capacity(b.lo.domain_size);
    for y in 0..b.lo.domain_size {
        let (rlo, rhi) = role_bounds(b, chain, r, x, y);
        let (clo, chi) = match filler {
            Some(c) => concept_bounds(b, chain, c, y),
            None => (top, top),
        };
        vlo.push(chain.tnorm(Degree(rlo), Degree(clo)).0);
        vhi.push(chain.tnorm(Degree(rhi), Degree(chi)).0);
    }
    if at_most {
        // inf over (m+1)-tuples of ⊖(min …) = ⊖(sup over (m+1)-tuples of min …)
        let lo = chain.neg(Degree(kth_largest(&mut vhi, m + 1, top))).0;
        let hi = chain.neg(Degree(kth_largest(&mut vlo, m + 1, top))).0;
        (lo, hi)
    } else {
        (kth_largest(&mut vlo, m, top), kth_largest(&mut vhi, m, top))
    }
}

pub fn eval_concept(i: &Interp, chain: &Chain, c: &ConceptExpr, x: usize) -> Degree {
    let b = Bounds { lo: i, hi: i };
    let (lo, hi) = concept_bounds(&b, chain, c, x);
    debug_assert_eq!(lo, hi);
    Degree(lo)
}

pub fn eval_role(i: &Interp, chain: &Chain, r: &RoleExpr, x: usize, y: usize) -> Degree {
    let b = Bounds { lo: i, hi: i };
    let (lo, hi) = role_bounds(&b, chain, r, x, y);
    debug_assert_eq!(lo, hi);
    Degree(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    True,
    False,
    Unknown,
}

fn cmp_verdict(lo: u32, hi: u32, cmp: Cmp, d: u32) -> Verdict {
    let (sat_all, viol_all) = match cmp {
        Cmp::Geq => (lo >= d, hi < d),
        Cmp::Gt => (lo > d, hi <= d),
        Cmp::Leq => (hi <= d, lo > d),
        Cmp::Lt => (hi < d, lo >= d),
    };
    if sat_all {
        Verdict::True
    } else if viol_all {
        Verdict::False
    } else {
        Verdict::Unknown
    }
}

/// Bounds of the sup-⊗ composition of a role chain between x and y.
fn chain_composition_bounds(
    b: &Bounds,
    chain: &Chain,
    roles: &[RoleExpr],
    x: usize,
    y: usize,
    lo_side: bool,
) -> u32 {
    let size = b.lo.domain_size;
    let cell = |r: &RoleExpr, s: usize, t: usize| {
        let (lo, hi) = role_bounds(b, chain, r, s, t);
        if lo_side {
            lo
        } else {
            hi
        }
    };
    // reach[z] = best composition value of the prefix ending at z
    let mut reach: Vec<u32> = (0..size)
        .map(|z| if z == x { chain.top().0 } else { 0 })
        .collect();
    for r in roles {
        let mut next = vec![0u32; size];
        for (s, &v) in reach.iter().enumerate() {
            if v == 0 {
                continue;
            }
            for (t, slot) in next.iter_mut().enumerate() {
                *slot = (*slot).max(chain.tnorm(Degree(v), Degree(cell(r, s, t))).0);
            }
        }
        reach = next;
    }
    reach[y]
}

fn axiom_verdict(b: &Bounds, chain: &Chain, ax: &Axiom) -> Verdict {
    let top = chain.top().0;
    let size = b.lo.domain_size;
    let mut all_true = true;
    match ax {
        Axiom::Concept(a) => {
            let x = b.lo.ind_map[a.ind.0 as usize];
            let (lo, hi) = concept_bounds(b, chain, &a.concept, x);
            cmp_verdict(lo, hi, a.cmp, a.degree.0)
        }
        Axiom::Role(a) => {
            let x = b.lo.ind_map[a.from.0 as usize];
            let y = b.lo.ind_map[a.to.0 as usize];
            let (mut lo, mut hi) = role_bounds(b, chain, &a.role, x, y);
            if a.negated {
                let (nlo, nhi) = (chain.neg(Degree(hi)).0, chain.neg(Degree(lo)).0);
                lo = nlo;
                hi = nhi;
            }
            cmp_verdict(lo, hi, a.cmp, a.degree.0)
        }
        Axiom::Eq(a, c) => {
            if b.lo.ind_map[a.0 as usize] == b.lo.ind_map[c.0 as usize] {
                Verdict::True
            } else {
                Verdict::False
            }
        }
        Axiom::Neq(a, c) => {
            if b.lo.ind_map[a.0 as usize] != b.lo.ind_map[c.0 as usize] {
                Verdict::True
            } else {
                Verdict::False
            }
        }
        Axiom::Gci(g) => {
            for x in 0..size {
                let (llo, lhi) = concept_bounds(b, chain, &g.lhs, x);
                let (rlo, rhi) = concept_bounds(b, chain, &g.rhs, x);
                let vlo = chain.residuum(Degree(lhi), Degree(rlo)).0;
                let vhi = chain.residuum(Degree(llo), Degree(rhi)).0;
                match cmp_verdict(vlo, vhi, g.cmp, g.degree.0) {
                    Verdict::False => return Verdict::False,
                    Verdict::Unknown => all_true = false,
                    Verdict::True => {}
                }
            }
            if all_true {
                Verdict::True
            } else {
                Verdict::Unknown
            }
        }
        Axiom::Ria(ria) => {
            for x in 0..size {
                for y in 0..size {
                    let clo = chain_composition_bounds(b, chain, &ria.lhs, x, y, true);
                    let chi = chain_composition_bounds(b, chain, &ria.lhs, x, y, false);
                    let (rlo, rhi) = role_bounds(b, chain, &ria.rhs, x, y);
                    let vlo = chain.residuum(Degree(chi), Degree(rlo)).0;
                    let vhi = chain.residuum(Degree(clo), Degree(rhi)).0;
                    match cmp_verdict(vlo, vhi, ria.cmp, ria.degree.0) {
                        Verdict::False => return Verdict::False,
                        Verdict::Unknown => all_true = false,
                        Verdict::True => {}
                    }
                }
            }
            if all_true {
                Verdict::True
            } else {
                Verdict::Unknown
            }
        }
        Axiom::Trans(r) => {
            for x in 0..size {
                for y in 0..size {
                    for z in 0..size {
                        let (xy_lo, xy_hi) = role_bounds(b, chain, r, x, y);
                        let (yz_lo, yz_hi) = role_bounds(b, chain, r, y, z);
                        let (xz_lo, xz_hi) = role_bounds(b, chain, r, x, z);
                        if chain.tnorm(Degree(xy_lo), Degree(yz_lo)).0 > xz_hi {
                            return Verdict::False;
                        }
                        if chain.tnorm(Degree(xy_hi), Degree(yz_hi)).0 > xz_lo {
                            all_true = false;
                        }
                    }
                }
            }
            if all_true {
                Verdict::True
            } else {
                Verdict::Unknown
            }
        }
        Axiom::Dis(r1, r2) => {
            for x in 0..size {
                for y in 0..size {
                    let (lo1, hi1) = role_bounds(b, chain, r1, x, y);
                    let (lo2, hi2) = role_bounds(b, chain, r2, x, y);
                    if lo1 > 0 && lo2 > 0 {
                        return Verdict::False;
                    }
                    if hi1 > 0 && hi2 > 0 {
                        all_true = false;
                    }
                }
            }
            if all_true {
                Verdict::True
            } else {
                Verdict::Unknown
            }
        }
        Axiom::Ref(r) => {
            for x in 0..size {
                let (lo, hi) = role_bounds(b, chain, r, x, x);
                if hi < top {
                    return Verdict::False;
                }
                if lo < top {
                    all_true = false;
                }
            }
            if all_true {
                Verdict::True
            } else {
                Verdict::Unknown
            }
        }
        Axiom::Irr(r) => {
            for x in 0..size {
                let (lo, hi) = role_bounds(b, chain, r, x, x);
                if lo > 0 {
                    return Verdict::False;
                }
                if hi > 0 {
                    all_true = false;
                }
            }
            if all_true {
                Verdict::True
            } else {
                Verdict::Unknown
            }
        }
        Axiom::Sym(r) => {
            for x in 0..size {
                for y in 0..size {
                    let (lo_xy, hi_xy) = role_bounds(b, chain, r, x, y);
                    let (lo_yx, hi_yx) = role_bounds(b, chain, r, y, x);
                    if lo_xy > hi_yx || lo_yx > hi_xy {
                        return Verdict::False;
                    }
                    if !(hi_xy <= lo_yx && hi_yx <= lo_xy) {
                        all_true = false;
                    }
                }
            }
            if all_true {
                Verdict::True
            } else {
                Verdict::Unknown
            }
        }
        Axiom::Asy(r) => {
            for x in 0..size {
                for y in 0..size {
                    let (lo_xy, hi_xy) = role_bounds(b, chain, r, x, y);
                    let (lo_yx, hi_yx) = role_bounds(b, chain, r, y, x);
                    if lo_xy > 0 && lo_yx > 0 {
                        return Verdict::False;
                    }
                    if hi_xy > 0 && hi_yx > 0 {
                        all_true = false;
                    }
                }
            }
            if all_true {
                Verdict::True
            } else {
                Verdict::Unknown
            }
        }
        Axiom::RoleDisj { sub, disjuncts } => {
            for x in 0..size {
                for y in 0..size {
                    let (slo, shi) = role_bounds(b, chain, sub, x, y);
                    let mut dlo = 0;
                    let mut dhi = 0;
                    for r in disjuncts {
                        let (lo, hi) = role_bounds(b, chain, r, x, y);
                        dlo = dlo.max(lo);
                        dhi = dhi.max(hi);
                    }
                    if slo > dhi {
                        return Verdict::False;
                    }
                    if shi > dlo {
                        all_true = false;
                    }
                }
            }
            if all_true {
                Verdict::True
            } else {
                Verdict::Unknown
            }
        }
    }
}

pub fn satisfies_axiom(i: &Interp, onto: &FuzzyOntology, ax: &Axiom) -> bool {
    let b = Bounds { lo: i, hi: i };
    match axiom_verdict(&b, &onto.chain, ax) {
        Verdict::True => true,
        Verdict::False => false,
        Verdict::Unknown => unreachable!("exact bounds always decide"),
    }
}

pub fn is_model(i: &Interp, onto: &FuzzyOntology) -> bool {
    onto.axioms().all(|ax| satisfies_axiom(i, onto, ax))
}

// ---------------------------------------------------------------------------
// Crispification of interpretations

/// The cut construction: `A_{≥d}^J = {x | A^I(x) ≥ d}`, crisp names keep
/// their single classical image.
pub fn crispify_interp(i: &Interp, cuts: &CutTable) -> Interp {
    let size = i.domain_size;
    let mut concepts = Vec::with_capacity(cuts.concept_origin.len());
    for origin in &cuts.concept_origin {
        let table: Vec<u32> = match origin {
            CutOrigin::ConceptCut(a, d) => (0..size)
                .map(|x| u32::from(i.concepts[a.0 as usize][x] >= d.0))
                .collect(),
            CutOrigin::CrispConcept(a) => (0..size)
                .map(|x| u32::from(i.concepts[a.0 as usize][x] >= 1))
                .collect(),
            _ => unreachable!("concept origins only"),
        };
        concepts.push(table);
    }
    let mut roles = Vec::with_capacity(cuts.role_origin.len());
    for origin in &cuts.role_origin {
        let table: Vec<u32> = match origin {
            CutOrigin::RoleCut(r, d) => (0..size * size)
                .map(|c| u32::from(i.roles[r.0 as usize][c] >= d.0))
                .collect(),
            CutOrigin::CrispRole(r) => (0..size * size)
                .map(|c| u32::from(i.roles[r.0 as usize][c] >= 1))
                .collect(),
            _ => unreachable!("role origins only"),
        };
        roles.push(table);
    }
    Interp {
        domain_size: size,
        ind_map: i.ind_map.clone(),
        concepts,
        roles,
    }
}

/// The inverse construction: `A^I(x) = max{d | x ∈ A_{≥d}^J}`, with the max
/// over the empty set being 0.
pub fn fuzzify_interp(j: &Interp, cuts: &CutTable, fuzzy: &FuzzyOntology) -> Interp {
    let size = j.domain_size;
    let chain = &fuzzy.chain;
    let mut out = Interp::zeroed(fuzzy, size);
    out.ind_map = j.ind_map.clone();
    for id in 0..fuzzy.sig.concepts.len() {
        let table = &mut out.concepts[id];
        if fuzzy.is_crisp_concept(crate::model::ConceptId(id as u32)) {
            let cls = cuts.crisp_concept_image(crate::model::ConceptId(id as u32));
            for (x, cell) in table.iter_mut().enumerate() {
                *cell = if j.concepts[cls.0 as usize][x] != 0 {
                    chain.top().0
                } else {
                    0
                };
            }
        } else {
            for (x, cell) in table.iter_mut().enumerate() {
                let mut best = 0;
                for d in chain.positive_degrees() {
                    let cls = cuts.concept_cut(crate::model::ConceptId(id as u32), d);
                    if j.concepts[cls.0 as usize][x] != 0 {
                        best = best.max(d.0);
                    }
                }
                *cell = best;
            }
        }
    }
    for id in 0..fuzzy.sig.roles.len() {
        let table = &mut out.roles[id];
        if fuzzy.is_crisp_role(crate::model::RoleId(id as u32)) {
            let cls = cuts.crisp_role_image(crate::model::RoleId(id as u32));
            for (c, cell) in table.iter_mut().enumerate() {
                *cell = if j.roles[cls.0 as usize][c] != 0 {
                    chain.top().0
                } else {
                    0
                };
            }
        } else {
            for (c, cell) in table.iter_mut().enumerate() {
                let mut best = 0;
                for d in chain.positive_degrees() {
                    let cls = cuts.role_cut(crate::model::RoleId(id as u32), d);
                    if j.roles[cls.0 as usize][c] != 0 {
                        best = best.max(d.0);
                    }
                }
                *cell = best;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Query evaluation

fn used_vars(atoms: &[AtomKind]) -> Vec<u32> {
    let mut vars = Vec::new();
    for a in atoms {
        for t in a.terms() {
            if let Term::Var(v) = t {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
    }
    vars
}

fn atom_degree(i: &Interp, chain: &Chain, atom: &AtomKind, assign: &[(u32, usize)]) -> u32 {
    let elem = |t: Term| -> usize {
        match t {
            Term::Ind(id) => i.ind_map[id.0 as usize],
            Term::Var(v) => assign.iter().find(|(w, _)| *w == v).expect("assigned").1,
        }
    };
    match atom {
        AtomKind::Concept(c, t) => i.concepts[c.0 as usize][elem(*t)],
        AtomKind::Role(r, s, t) => i.role_cell(r.0 as usize, elem(*s), elem(*t)),
        AtomKind::Eq(s, t) => {
            if elem(*s) == elem(*t) {
                chain.top().0
            } else {
                0
            }
        }
    }
}

fn for_each_assignment(
    domain_size: usize,
    vars: &[u32],
    mut visit: impl FnMut(&[(u32, usize)]) -> bool,
) -> bool {
    let mut assign: Vec<(u32, usize)> = vars.iter().map(|&v| (v, 0)).collect();
    if vars.is_empty() {
        return visit(&assign);
    }
    loop {
        if visit(&assign) {
            return true;
        }
        let mut pos = vars.len();
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            assign[pos].1 += 1;
            if assign[pos].1 < domain_size {
                break;
            }
            assign[pos].1 = 0;
        }
    }
}

/// Boolean threshold-query satisfaction: some assignment meets every bound.
pub fn query_sat(i: &Interp, onto: &FuzzyOntology, q: &ThresholdCq) -> Result<bool, OracleError> {
    if !q.dist.is_empty() {
        return Err(OracleError::FreeDistinguished);
    }
    let atoms: Vec<AtomKind> = q.atoms.iter().map(|a| a.atom).collect();
    let vars = used_vars(&atoms);
    Ok(for_each_assignment(i.domain_size, &vars, |assign| {
        q.atoms
            .iter()
            .all(|a| atom_degree(i, &onto.chain, &a.atom, assign) >= a.bound.0)
    }))
}

/// Classical CQ satisfaction over a (two-valued) interpretation.
pub fn classical_cq_sat(j: &Interp, chain: &Chain, cq: &ClassicalCq) -> bool {
    let top = chain.top().0;
    let vars = used_vars(&cq.atoms);
    for_each_assignment(j.domain_size, &vars, |assign| {
        cq.atoms.iter().all(|a| atom_degree(j, chain, a, assign) >= top)
    })
}

pub fn ucq_sat(j: &Interp, chain: &Chain, u: &Ucq) -> bool {
    u.members.iter().any(|m| classical_cq_sat(j, chain, m))
}

/// Best satisfaction degree of a Boolean fuzzy CQ: the maximum over
/// assignments of the ⊗-combination of atom degrees.
pub fn fuzzy_degree(i: &Interp, onto: &FuzzyOntology, q: &FuzzyCq) -> Result<Degree, OracleError> {
    if !q.dist.is_empty() {
        return Err(OracleError::FreeDistinguished);
    }
    let chain = &onto.chain;
    let vars = used_vars(&q.atoms);
    let mut best = 0;
    for_each_assignment(i.domain_size, &vars, |assign| {
        let mut acc = chain.top().0;
        for a in &q.atoms {
            acc = chain
                .tnorm(Degree(acc), Degree(atom_degree(i, chain, a, assign)))
                .0;
            if acc == 0 {
                break;
            }
        }
        best = best.max(acc);
        best == chain.top().0
    });
    Ok(Degree(best))
}

/// Best score of a Boolean scoring query over all assignments.
pub fn scoring_best(
    i: &Interp,
    onto: &FuzzyOntology,
    q: &ScoringQuery,
) -> Result<Rational64, OracleError> {
    if !q.dist.is_empty() {
        return Err(OracleError::FreeDistinguished);
    }
    let chain = &onto.chain;
    let denom = i64::from(chain.size() - 1);
    let vars = used_vars(&q.atoms);
    let mut best: Option<Rational64> = None;
    for_each_assignment(i.domain_size, &vars, |assign| {
        let degrees: Vec<Rational64> = q
            .atoms
            .iter()
            .map(|a| Rational64::new(i64::from(atom_degree(i, chain, a, assign)), denom))
            .collect();
        let score = q.score.eval(&degrees);
        best = Some(match best {
            None => score,
            Some(b) => b.max(score),
        });
        false
    });
    Ok(best.expect("non-empty domain yields at least one assignment"))
}

// ---------------------------------------------------------------------------
// Model search

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(Interp),
    /// No model over any domain size up to the bound. Not general
    /// inconsistency: a larger domain might still admit one.
    Exhausted,
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub max_domain: usize,
    /// Counts search steps (cell assignments tried); shared across domain
    /// sizes and placements.
    pub budget: u64,
    pub mode: exec::Mode,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            max_domain: 3,
            budget: 10_000_000,
            mode: exec::Mode::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cell {
    Concept(usize, usize),
    Role(usize, usize),
}

enum ShardOutcome {
    Found(Interp),
    Exhausted,
    Cut,
}

struct Searcher<'a> {
    onto: &'a FuzzyOntology,
    cells: Vec<Cell>,
    budget: &'a AtomicU64,
}

impl<'a> Searcher<'a> {
    fn spend(&self) -> bool {
        self.budget
            .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |b| b.checked_sub(1))
            .is_ok()
    }

    fn run(&self, lo: &mut Interp, hi: &mut Interp) -> ShardOutcome {
        let axioms: Vec<&Axiom> = self.onto.axioms().collect();
        let check = |lo: &Interp, hi: &Interp| -> Verdict {
            let b = Bounds { lo, hi };
            let mut verdict = Verdict::True;
            for ax in &axioms {
                match axiom_verdict(&b, &self.onto.chain, ax) {
                    Verdict::False => return Verdict::False,
                    Verdict::Unknown => verdict = Verdict::Unknown,
                    Verdict::True => {}
                }
            }
            verdict
        };
        if check(lo, hi) == Verdict::False {
            return ShardOutcome::Exhausted;
        }
        self.dfs(0, lo, hi, &check)
    }

    fn dfs(
        &self,
        depth: usize,
        lo: &mut Interp,
        hi: &mut Interp,
        check: &impl Fn(&Interp, &Interp) -> Verdict,
    ) -> ShardOutcome {
        if depth == self.cells.len() {
            return ShardOutcome::Found(lo.clone());
        }
        let cell = self.cells[depth];
        let values: Vec<u32> = match cell {
            Cell::Concept(c, _) if self.onto.crisp_concepts.get(c).copied().unwrap_or(false) => {
                vec![0, self.onto.chain.top().0]
            }
            Cell::Role(r, _) if self.onto.crisp_roles.get(r).copied().unwrap_or(false) => {
                vec![0, self.onto.chain.top().0]
            }
            _ => (0..self.onto.chain.size()).collect(),
        };
        for v in values {
            if !self.spend() {
                return ShardOutcome::Cut;
            }
            match cell {
                Cell::Concept(c, x) => {
                    lo.concepts[c][x] = v;
                    hi.concepts[c][x] = v;
                }
                Cell::Role(r, c) => {
                    lo.roles[r][c] = v;
                    hi.roles[r][c] = v;
                }
            }
            if check(lo, hi) != Verdict::False {
                match self.dfs(depth + 1, lo, hi, check) {
                    ShardOutcome::Exhausted => {}
                    other => return other,
                }
            }
        }
        match cell {
            Cell::Concept(c, x) => {
                lo.concepts[c][x] = 0;
                hi.concepts[c][x] = self.onto.chain.top().0;
            }
            Cell::Role(r, c) => {
                lo.roles[r][c] = 0;
                hi.roles[r][c] = self.onto.chain.top().0;
            }
        }
        ShardOutcome::Exhausted
    }
}

fn placements(onto: &FuzzyOntology, size: usize) -> Vec<Vec<usize>> {
    let k = onto.sig.inds.len();
    let mut all = Vec::new();
    let mut cur = vec![0usize; k];
    // Eq/Neq constraints filter placements up front; the axiom check would
    // reject them anyway, this just skips dead table enumerations.
    let consistent = |p: &[usize]| {
        onto.axioms().all(|ax| match ax {
            Axiom::Eq(a, b) => p[a.0 as usize] == p[b.0 as usize],
            Axiom::Neq(a, b) => p[a.0 as usize] != p[b.0 as usize],
            _ => true,
        })
    };
    loop {
        if consistent(&cur) {
            all.push(cur.clone());
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return all;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < size {
                break;
            }
            cur[pos] = 0;
        }
    }
}

/// Bounded exhaustive model search. Domain sizes ascend; within a size,
/// individual placements and then table cells are enumerated in a fixed
/// lexicographic order, so a `Found` result is the first model in that
/// order. `Exhausted` is a bounded verdict, not general inconsistency.
pub fn search_model(onto: &FuzzyOntology, opts: &SearchOptions) -> Result<SearchOutcome, OracleError> {
    if opts.budget == 0 {
        return Err(OracleError::ZeroBudget);
    }
    let budget = AtomicU64::new(opts.budget);
    for size in 1..=opts.max_domain {
        let mut cells = Vec::new();
        for c in 0..onto.sig.concepts.len() {
            for x in 0..size {
                cells.push(Cell::Concept(c, x));
            }
        }
        for r in 0..onto.sig.roles.len() {
            for cix in 0..size * size {
                cells.push(Cell::Role(r, cix));
            }
        }
        let searcher = Searcher {
            onto,
            cells,
            budget: &budget,
        };
        let places = placements(onto, size);

        let run_one = |place: &Vec<usize>| -> ShardOutcome {
            let mut lo = Interp::zeroed(onto, size);
            let mut hi = Interp::zeroed(onto, size);
            for t in hi.concepts.iter_mut().flatten() {
                *t = onto.chain.top().0;
            }
            for t in hi.roles.iter_mut().flatten() {
                *t = onto.chain.top().0;
            }
            lo.ind_map = place.clone();
            hi.ind_map = place.clone();
            searcher.run(&mut lo, &mut hi)
        };

        let outcomes: Vec<ShardOutcome> = match opts.mode {
            exec::Mode::Sequential => {
                let mut acc = Vec::new();
                for place in &places {
                    let out = run_one(place);
                    let stop = !matches!(out, ShardOutcome::Exhausted);
                    acc.push(out);
                    if stop {
                        break;
                    }
                }
                acc
            }
            #[cfg(feature = "parallel")]
            exec::Mode::Parallel => exec::map_ordered(exec::Mode::Parallel, &places, run_one),
        };

        // First budget cut before the first find means the sequential sweep
        // would have stopped there: report the budget, not a later model.
        for out in outcomes {
            match out {
                ShardOutcome::Found(i) => return Ok(SearchOutcome::Found(i)),
                ShardOutcome::Cut => return Ok(SearchOutcome::BudgetExceeded),
                ShardOutcome::Exhausted => {}
            }
        }
    }
    Ok(SearchOutcome::Exhausted)
}

/// Seeded random interpretation; crisp names only take the boundary degrees.
pub fn gen_random_interp(onto: &FuzzyOntology, domain_size: usize, seed: u64) -> Interp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = onto.chain.size();
    let top = onto.chain.top().0;
    let mut i = Interp::zeroed(onto, domain_size);
    for slot in i.ind_map.iter_mut() {
        *slot = rng.gen_range(0..domain_size);
    }
    for (c, table) in i.concepts.iter_mut().enumerate() {
        let crisp = onto.crisp_concepts.get(c).copied().unwrap_or(false);
        for cell in table.iter_mut() {
            *cell = if crisp {
                if rng.gen_bool(0.5) {
                    top
                } else {
                    0
                }
            } else {
                rng.gen_range(0..n)
            };
        }
    }
    for (r, table) in i.roles.iter_mut().enumerate() {
        let crisp = onto.crisp_roles.get(r).copied().unwrap_or(false);
        for cell in table.iter_mut() {
            *cell = if crisp {
                if rng.gen_bool(0.5) {
                    top
                } else {
                    0
                }
            } else {
                rng.gen_range(0..n)
            };
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::textio::{parse_interp, parse_ontology};

    fn example1() -> (FuzzyOntology, Interp) {
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let i = parse_interp(fixtures::EXAMPLE1_INTERP, &o).unwrap();
        (o, i)
    }

    fn concept(o: &FuzzyOntology, name: &str) -> ConceptExpr {
        ConceptExpr::Name(crate::model::ConceptId(o.sig.concepts.lookup(name).unwrap()))
    }

    fn role(o: &FuzzyOntology, name: &str) -> RoleExpr {
        RoleExpr::Name(crate::model::RoleId(o.sig.roles.lookup(name).unwrap()))
    }

    fn elem_of(o: &FuzzyOntology, i: &Interp, ind: &str) -> usize {
        i.ind_map[o.sig.inds.lookup(ind).unwrap() as usize]
    }

    #[test]
    fn example1_fixture_evaluations() {
        let (o, i) = example1();
        let cpu_a = elem_of(&o, &i, "cpuA");
        assert_eq!(
            eval_concept(&i, &o.chain, &concept(&o, "Overused"), cpu_a),
            Degree(4)
        );
        assert_eq!(eval_concept(&i, &o.chain, &ConceptExpr::Top, cpu_a), Degree(5));
        // (∃hasPart.Overused)(serverA) = max(1⊗0.8, 1⊗1) = 1
        let server_a = elem_of(&o, &i, "serverA");
        let some = ConceptExpr::exists(role(&o, "hasPart"), concept(&o, "Overused"));
        assert_eq!(eval_concept(&i, &o.chain, &some, server_a), Degree(5));
    }

    #[test]
    fn example1_fixture_is_a_model() {
        let (o, i) = example1();
        assert!(is_model(&i, &o));
        // Dropping the forced ServerWithLimitedResources degree breaks the GCI.
        let mut broken = i.clone();
        let swlr = o.sig.concepts.lookup("ServerWithLimitedResources").unwrap() as usize;
        broken.concepts[swlr][elem_of(&o, &i, "serverA")] = 0;
        assert!(!is_model(&broken, &o));
    }

    #[test]
    fn example3_cycle_is_a_model() {
        let o = parse_ontology(fixtures::EXAMPLE3).unwrap();
        let text = "\
elem a b c
ind a = a
ind b = b
ind c = c
role r: (a,a)=1 (a,b)=1 (b,a)=1 (b,c)=1 (c,b)=1 (c,c)=1
";
        let i = parse_interp(text, &o).unwrap();
        assert!(is_model(&i, &o));
    }

    #[test]
    fn trans_on_reflexive_constant_role_holds() {
        let mut o = FuzzyOntology::new(Chain::new(4, crate::chain::Family::Lukasiewicz, None).unwrap());
        let r = o.declare_role("r", false);
        o.rbox.push(Axiom::Trans(RoleExpr::Name(r)));
        let mut i = Interp::zeroed(&o, 3);
        for cell in i.roles[0].iter_mut() {
            *cell = 3;
        }
        assert!(is_model(&i, &o));
    }

    #[test]
    fn query_examples_over_example1() {
        let (o, i) = example1();
        // threshold: hasPart(x,y) >= 1, Overused(y) >= 0.9 — no 0.9 on chain 6,
        // use the next degree up (1) against memA, and 0.8 boundary for cpuA.
        let q =
            crate::textio::parse_query("threshold 2\nhasPart(?x1,?x2) >= 1\nOverused(?x2) >= 1\n", &o)
                .unwrap();
        let (mem, cpu, server) = (
            crate::model::IndId(o.sig.inds.lookup("memA").unwrap()),
            crate::model::IndId(o.sig.inds.lookup("cpuA").unwrap()),
            crate::model::IndId(o.sig.inds.lookup("serverA").unwrap()),
        );
        match q {
            crate::queries::Query::Threshold(t) => {
                let yes =
                    crate::queries::instantiate_threshold(&t, &[server, mem], o.chain.top()).unwrap();
                assert!(query_sat(&i, &o, &yes).unwrap());
                let no =
                    crate::queries::instantiate_threshold(&t, &[server, cpu], o.chain.top()).unwrap();
                assert!(!query_sat(&i, &o, &no).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
        // fuzzy degree at (serverA, cpuA) is 0.8
        let q = crate::textio::parse_query(fixtures::QUERY_PARTS_FUZZY, &o).unwrap();
        match q {
            crate::queries::Query::Fuzzy(f) => {
                let b = crate::queries::instantiate_fuzzy(&f, &[server, cpu]).unwrap();
                assert_eq!(fuzzy_degree(&i, &o, &b).unwrap(), Degree(4));
            }
            other => panic!("unexpected {other:?}"),
        }
        // empty-atom Boolean query: degree 1
        let empty = FuzzyCq {
            vars: Default::default(),
            dist: vec![],
            atoms: vec![],
        };
        assert_eq!(fuzzy_degree(&i, &o, &empty).unwrap(), Degree(5));
    }

    #[test]
    fn search_finds_example3_cycle_at_domain_three() {
        let o = parse_ontology(fixtures::EXAMPLE3).unwrap();
        let opts = SearchOptions {
            max_domain: 3,
            ..Default::default()
        };
        match search_model(&o, &opts).unwrap() {
            SearchOutcome::Found(i) => {
                assert_eq!(i.domain_size, 3);
                assert!(is_model(&i, &o));
            }
            other => panic!("expected a model, got {other:?}"),
        }
    }

    #[test]
    fn search_exhausts_on_plain_contradiction() {
        let mut o = FuzzyOntology::new(Chain::new(3, crate::chain::Family::Goedel, None).unwrap());
        let a = o.declare_concept("A", false);
        let x = o.declare_ind("x");
        o.abox.push(Axiom::Concept(crate::model::ConceptAssertion {
            concept: ConceptExpr::Name(a),
            ind: x,
            cmp: Cmp::Geq,
            degree: Degree(2),
        }));
        o.tbox
            .push(Axiom::gci(ConceptExpr::Name(a), ConceptExpr::Bot, Degree(2)));
        let opts = SearchOptions {
            max_domain: 2,
            ..Default::default()
        };
        assert_eq!(search_model(&o, &opts).unwrap(), SearchOutcome::Exhausted);
    }

    #[test]
    fn zero_budget_rejected() {
        let o = parse_ontology(fixtures::EXAMPLE3).unwrap();
        let opts = SearchOptions {
            max_domain: 1,
            budget: 0,
            ..Default::default()
        };
        assert!(matches!(search_model(&o, &opts), Err(OracleError::ZeroBudget)));
    }

    #[test]
    fn random_interp_is_deterministic_and_respects_crispness() {
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let a = gen_random_interp(&o, 4, 7);
        let b = gen_random_interp(&o, 4, 7);
        assert_eq!(a, b);
        let server = o.sig.concepts.lookup("Server").unwrap() as usize;
        assert!(a.concepts[server].iter().all(|&v| v == 0 || v == 5));
        let c2 = parse_ontology("chain 2 goedel\nconcept A\n").unwrap();
        let i2 = gen_random_interp(&c2, 3, 1);
        assert!(i2.concepts[0].iter().all(|&v| v <= 1));
    }

    /// Reference search: plain odometer over all tables, no pruning.
    fn naive_search(onto: &FuzzyOntology, max_domain: usize) -> Option<Interp> {
        for size in 1..=max_domain {
            for place in placements(onto, size) {
                let mut i = Interp::zeroed(onto, size);
                i.ind_map = place;
                let n_cells = onto.sig.concepts.len() * size + onto.sig.roles.len() * size * size;
                let value_count = |cell: usize| -> Vec<u32> {
                    let concept_cells = onto.sig.concepts.len() * size;
                    if cell < concept_cells {
                        let c = cell / size;
                        if onto.crisp_concepts.get(c).copied().unwrap_or(false) {
                            return vec![0, onto.chain.top().0];
                        }
                    } else {
                        let r = (cell - concept_cells) / (size * size);
                        if onto.crisp_roles.get(r).copied().unwrap_or(false) {
                            return vec![0, onto.chain.top().0];
                        }
                    }
                    (0..onto.chain.size()).collect()
                };
                let set = |i: &mut Interp, cell: usize, v: u32| {
                    let concept_cells = onto.sig.concepts.len() * size;
                    if cell < concept_cells {
                        i.concepts[cell / size][cell % size] = v;
                    } else {
                        let rest = cell - concept_cells;
                        i.roles[rest / (size * size)][rest % (size * size)] = v;
                    }
                };
                let mut idx = vec![0usize; n_cells];
                loop {
                    for (cell, &vi) in idx.iter().enumerate() {
                        let vals = value_count(cell);
                        set(&mut i, cell, vals[vi]);
                    }
                    if is_model(&i, onto) {
                        return Some(i);
                    }
                    let mut pos = n_cells;
                    let mut done = n_cells == 0;
                    loop {
                        if pos == 0 {
                            done = true;
                            break;
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] < value_count(pos).len() {
                            break;
                        }
                        idx[pos] = 0;
                    }
                    if done {
                        break;
                    }
                }
                if n_cells == 0 && is_model(&i, onto) {
                    return Some(i);
                }
            }
        }
        None
    }

    #[test]
    fn pruned_search_matches_naive_enumeration() {
        // Random tiny ontologies: the pruned DFS and the plain odometer agree
        // on satisfiability and on the first model found.
        for seed in 0..40u64 {
            let o = crate::randgen::random_ontology(seed, &crate::randgen::Params::tiny());
            let opts = SearchOptions {
                max_domain: 2,
                budget: 50_000_000,
                mode: exec::Mode::Sequential,
            };
            let pruned = search_model(&o, &opts).unwrap();
            let naive = naive_search(&o, 2);
            match (pruned, naive) {
                (SearchOutcome::Found(a), Some(b)) => assert_eq!(a, b, "seed {seed}"),
                (SearchOutcome::Exhausted, None) => {}
                (p, n) => panic!("seed {seed}: pruned {p:?} vs naive {n:?}"),
            }
        }
    }

    #[test]
    fn interval_bounds_contain_exact_values() {
        // Widening one cell to [0, top] must bracket the exact evaluation of
        // every completion.
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let i = gen_random_interp(&o, 3, 11);
        let exprs = [
            ConceptExpr::exists(role(&o, "hasPart"), concept(&o, "Overused")),
            ConceptExpr::forall(
                role(&o, "isConnectedTo"),
                ConceptExpr::not(concept(&o, "Overused")),
            ),
            ConceptExpr::AtMostQ(1, role(&o, "hasPart"), Box::new(concept(&o, "Overused"))),
            ConceptExpr::AtLeast(2, role(&o, "hasPart")),
        ];
        let overused = o.sig.concepts.lookup("Overused").unwrap() as usize;
        let mut lo = i.clone();
        let mut hi = i.clone();
        lo.concepts[overused][1] = 0;
        hi.concepts[overused][1] = o.chain.top().0;
        for expr in &exprs {
            for x in 0..3 {
                let b = Bounds { lo: &lo, hi: &hi };
                let (blo, bhi) = concept_bounds(&b, &o.chain, expr, x);
                for v in 0..o.chain.size() {
                    let mut complete = i.clone();
                    complete.concepts[overused][1] = v;
                    let exact = eval_concept(&complete, &o.chain, expr, x).0;
                    assert!(
                        blo <= exact && exact <= bhi,
                        "{expr:?} at {x}: [{blo},{bhi}] vs {exact}"
                    );
                }
            }
        }
    }
}
