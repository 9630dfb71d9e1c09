//! Reduction of fuzzy ontologies to classical ones over cut names, plus the
//! number-restriction elimination passes.
//!
//! Every fuzzy name contributes one classical name per positive degree
//! (`A_geq_<k>`, `r_geq_<k>`, `k` the degree index); crisp names contribute a
//! single classical name and take no part in the frontier enumeration, which
//! shrinks the output considerably. ρ maps concepts to their cuts, κ maps
//! axioms to classical axiom sets, and linking axioms keep the cuts nested.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::chain::{Chain, Degree};
use crate::exec;
use crate::model::{
    Axiom, ClassicalOntology, Cmp, ConceptAssertion, ConceptExpr, ConceptId, CutOrigin, FuzzyOntology,
    Gci, Ria, RoleAssertion, RoleExpr, RoleId, Section, Signature,
};
use crate::normalize::{self, FreshNamer, NormalizeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrispifyError {
    #[error("the reduction is not correct under Zadeh semantics; use a t-norm based chain")]
    Zadeh,
    #[error("{0}")]
    Normalize(#[from] NormalizeError),
    #[error("qualified number restriction in {section}[{index}]; run a number-restriction elimination pass first")]
    QualifiedRestriction { section: Section, index: usize },
    #[error(
        "qualified at-least on a left-hand side (or at-most on a right-hand side) needs extended mode"
    )]
    QualifiedNeedsExtended,
    #[error(
        "role inclusion in {section}[{index}] has more than two roles on the left; normalize first"
    )]
    RiaTooLong { section: Section, index: usize },
    #[error("generated cut name '{0}' collides with a declared name")]
    NameCollision(String),
    #[error("{0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy)]
pub struct CrispifyOptions {
    pub normalize: bool,
    pub skip_small: bool,
    /// Accept role disjunctions (extended mode outputs) and reduce them cut-wise.
    pub extended_roles: bool,
    /// Reduce simple role inclusions through the composition-with-`u` rule
    /// instead of the pointwise rule.
    pub literal_role_inclusion: bool,
    pub mode: exec::Mode,
}

impl Default for CrispifyOptions {
    fn default() -> CrispifyOptions {
        CrispifyOptions {
            normalize: true,
            skip_small: true,
            extended_roles: false,
            literal_role_inclusion: false,
            mode: exec::Mode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum NameCuts {
    Crisp(u32),
    /// `cuts[k-1]` is the classical id of the cut at degree index `k`.
    Cuts(Vec<u32>),
}

/// Bijection between (fuzzy name, positive degree) and classical cut names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutTable {
    pub classical_sig: Signature,
    pub concept_origin: Vec<CutOrigin>,
    pub role_origin: Vec<CutOrigin>,
    concept_map: Vec<NameCuts>,
    role_map: Vec<NameCuts>,
}

impl CutTable {
    pub fn build(o: &FuzzyOntology) -> Result<CutTable, CrispifyError> {
        let n = o.chain.size();
        let mut sig = Signature::default();
        let mut concept_origin = Vec::new();
        let mut role_origin = Vec::new();
        let mut concept_map = Vec::new();
        let mut role_map = Vec::new();
        for (id, name) in o.sig.concepts.iter() {
            if o.is_crisp_concept(ConceptId(id)) {
                let cid = sig.concepts.intern(name);
                if cid as usize != concept_origin.len() {
                    return Err(CrispifyError::NameCollision(name.to_string()));
                }
                concept_origin.push(CutOrigin::CrispConcept(ConceptId(id)));
                concept_map.push(NameCuts::Crisp(cid));
            } else {
                let mut cuts = Vec::with_capacity(n as usize - 1);
                for k in 1..n {
                    let cut_name = format!("{name}_geq_{k}");
                    let cid = sig.concepts.intern(&cut_name);
                    if cid as usize != concept_origin.len() {
                        return Err(CrispifyError::NameCollision(cut_name));
                    }
                    concept_origin.push(CutOrigin::ConceptCut(ConceptId(id), Degree(k)));
                    cuts.push(cid);
                }
                concept_map.push(NameCuts::Cuts(cuts));
            }
        }
        for (id, name) in o.sig.roles.iter() {
            if o.is_crisp_role(RoleId(id)) {
                let rid = sig.roles.intern(name);
                if rid as usize != role_origin.len() {
                    return Err(CrispifyError::NameCollision(name.to_string()));
                }
                role_origin.push(CutOrigin::CrispRole(RoleId(id)));
                role_map.push(NameCuts::Crisp(rid));
            } else {
                let mut cuts = Vec::with_capacity(n as usize - 1);
                for k in 1..n {
                    let cut_name = format!("{name}_geq_{k}");
                    let rid = sig.roles.intern(&cut_name);
                    if rid as usize != role_origin.len() {
                        return Err(CrispifyError::NameCollision(cut_name));
                    }
                    role_origin.push(CutOrigin::RoleCut(RoleId(id), Degree(k)));
                    cuts.push(rid);
                }
                role_map.push(NameCuts::Cuts(cuts));
            }
        }
        for (_, name) in o.sig.inds.iter() {
            sig.inds.intern(name);
        }
        Ok(CutTable {
            classical_sig: sig,
            concept_origin,
            role_origin,
            concept_map,
            role_map,
        })
    }

    /// Classical name for `A_{≥d}` (`d > 0`); crisp names ignore the degree.
    pub fn concept_cut(&self, id: ConceptId, d: Degree) -> ConceptId {
        debug_assert!(!d.is_zero());
        ConceptId(match &self.concept_map[id.0 as usize] {
            NameCuts::Crisp(c) => *c,
            NameCuts::Cuts(cuts) => cuts[d.idx() - 1],
        })
    }

    pub fn role_cut(&self, id: RoleId, d: Degree) -> RoleId {
        debug_assert!(!d.is_zero());
        RoleId(match &self.role_map[id.0 as usize] {
            NameCuts::Crisp(r) => *r,
            NameCuts::Cuts(cuts) => cuts[d.idx() - 1],
        })
    }

    pub fn crisp_concept_image(&self, id: ConceptId) -> ConceptId {
        match &self.concept_map[id.0 as usize] {
            NameCuts::Crisp(c) => ConceptId(*c),
            NameCuts::Cuts(_) => panic!("concept is not crisp"),
        }
    }

    pub fn crisp_role_image(&self, id: RoleId) -> RoleId {
        match &self.role_map[id.0 as usize] {
            NameCuts::Crisp(r) => RoleId(*r),
            NameCuts::Cuts(_) => panic!("role is not crisp"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FrontKind {
    Conj,
    Disj,
    Impl,
}

/// Frontier pairs with two-valued components collapsed to their boundary
/// cuts and re-minimized. A two-valued side only distinguishes "must be 1"
/// (any positive bound) from "unconstrained" (bound 0), so equivalent pairs
/// fold together and dominated ones drop.
pub(crate) fn collapsed_pairs(
    chain: &Chain,
    d: Degree,
    kind: FrontKind,
    left_two_valued: bool,
    right_two_valued: bool,
) -> Vec<(Degree, Degree)> {
    let raw = match kind {
        FrontKind::Conj => chain.tnorm_frontier(d).expect("positive degree"),
        FrontKind::Disj => chain.tconorm_frontier(d).expect("positive degree"),
        FrontKind::Impl => chain.impl_frontier(d).expect("positive degree"),
    };
    let top = chain.top();
    let map_geq = |x: Degree, tv: bool| if tv && !x.is_zero() { top } else { x };
    // In Impl pairs the second component feeds a strict bound; for a
    // two-valued operand every `> d₂` with `d₂ < 1` means "equals 1".
    let map_snd = |x: Degree, tv: bool| {
        if kind == FrontKind::Impl {
            if tv {
                Degree(0)
            } else {
                x
            }
        } else {
            map_geq(x, tv)
        }
    };
    let mapped: Vec<(Degree, Degree)> = raw
        .into_iter()
        .map(|(a, b)| (map_geq(a, left_two_valued), map_snd(b, right_two_valued)))
        .collect();
    let mut uniq: Vec<(Degree, Degree)> = Vec::new();
    for p in mapped {
        if !uniq.contains(&p) {
            uniq.push(p);
        }
    }
    let dominates = |q: (Degree, Degree), p: (Degree, Degree)| -> bool {
        q != p
            && match kind {
                FrontKind::Conj | FrontKind::Disj => q.0 <= p.0 && q.1 <= p.1,
                FrontKind::Impl => q.0 <= p.0 && q.1 >= p.1,
            }
    };
    let mut kept: Vec<(Degree, Degree)> = uniq
        .iter()
        .copied()
        .filter(|&p| !uniq.iter().any(|&q| dominates(q, p)))
        .collect();
    kept.sort();
    kept
}

/// Frontier triples for a binary role inclusion at bound `d`: `(d₁, d')`
/// from the implication frontier of `d` composed with `(d₂, d₃)` from the
/// frontier of `d'⁺`. Two-valued components collapse exactly as in
/// [`collapsed_pairs`]; dominated triples (weaker premises, stronger
/// conclusion elsewhere in the set) drop.
pub(crate) fn collapsed_ria_triples(
    chain: &Chain,
    d: Degree,
    lhs1_two_valued: bool,
    lhs2_two_valued: bool,
    rhs_two_valued: bool,
) -> Vec<(Degree, Degree, Degree)> {
    let top = chain.top();
    let map_geq = |x: Degree, tv: bool| if tv && !x.is_zero() { top } else { x };
    let map_strict = |x: Degree, tv: bool| if tv { Degree(0) } else { x };
    let mut raw = Vec::new();
    for (d1, dmid) in chain.impl_frontier(d).expect("positive degree") {
        let next = chain.succ(dmid).expect("below 1");
        for (d2, d3) in chain.impl_frontier(next).expect("positive degree") {
            raw.push((
                map_geq(d1, lhs1_two_valued),
                map_geq(d2, lhs2_two_valued),
                map_strict(d3, rhs_two_valued),
            ));
        }
    }
    let mut uniq: Vec<(Degree, Degree, Degree)> = Vec::new();
    for t in raw {
        if !uniq.contains(&t) {
            uniq.push(t);
        }
    }
    let dominates = |q: (Degree, Degree, Degree), p: (Degree, Degree, Degree)| -> bool {
        q != p && q.0 <= p.0 && q.1 <= p.1 && q.2 >= p.2
    };
    let mut kept: Vec<(Degree, Degree, Degree)> = uniq
        .iter()
        .copied()
        .filter(|&p| !uniq.iter().any(|&q| dominates(q, p)))
        .collect();
    kept.sort();
    kept
}

pub(crate) fn flatten_or(c: ConceptExpr, out: &mut Vec<ConceptExpr>) {
    match c {
        ConceptExpr::Or(a, b) => {
            flatten_or(*a, out);
            flatten_or(*b, out);
        }
        other => out.push(other),
    }
}

fn fold_or(mut members: Vec<ConceptExpr>) -> ConceptExpr {
    match members.len() {
        0 => ConceptExpr::Bot,
        1 => members.pop().unwrap(),
        _ => {
            let mut it = members.into_iter();
            let first = it.next().unwrap();
            it.fold(first, ConceptExpr::or)
        }
    }
}

fn fold_and(mut members: Vec<ConceptExpr>) -> ConceptExpr {
    match members.len() {
        0 => ConceptExpr::Top,
        1 => members.pop().unwrap(),
        _ => {
            let mut it = members.into_iter();
            let first = it.next().unwrap();
            it.fold(first, ConceptExpr::and)
        }
    }
}

pub fn rho_role(r: &RoleExpr, d: Degree, cuts: &CutTable) -> RoleExpr {
    match r {
        RoleExpr::Name(id) => RoleExpr::Name(cuts.role_cut(*id, d)),
        RoleExpr::Inverse(id) => RoleExpr::Inverse(cuts.role_cut(*id, d)),
        RoleExpr::Universal => RoleExpr::Universal,
    }
}

/// The cut `ρ(C, ≥ d)` of a concept, `d > 0`. Frontier components at degree
/// 0 constrain nothing and drop out of their conjunction.
pub fn rho_concept(
    c: &ConceptExpr,
    d: Degree,
    o: &FuzzyOntology,
    cuts: &CutTable,
) -> Result<ConceptExpr, CrispifyError> {
    debug_assert!(!d.is_zero());
    let chain = &o.chain;
    match c {
        ConceptExpr::Top => Ok(ConceptExpr::Top),
        ConceptExpr::Bot => Ok(ConceptExpr::Bot),
        ConceptExpr::Name(id) => Ok(ConceptExpr::Name(cuts.concept_cut(*id, d))),
        ConceptExpr::Not(x) => {
            // ρ(¬C, ≥d) = ¬ρ(C, > ⊖⁻(d)); ⊖⁻(d) < 1 keeps the bound definable.
            let frontier = chain.neg_inv_max(d).expect("positive degree");
            let strict = chain.succ(frontier).expect("below 1");
            Ok(ConceptExpr::not(rho_concept(x, strict, o, cuts)?))
        }
        ConceptExpr::And(p, q) | ConceptExpr::Or(p, q) => {
            let kind = if matches!(c, ConceptExpr::And(..)) {
                FrontKind::Conj
            } else {
                FrontKind::Disj
            };
            let pairs = collapsed_pairs(chain, d, kind, o.is_crisp_expr(p), o.is_crisp_expr(q));
            let mut members = Vec::with_capacity(pairs.len());
            for (d1, d2) in pairs {
                let mut parts = Vec::new();
                if !d1.is_zero() {
                    parts.push(rho_concept(p, d1, o, cuts)?);
                }
                if !d2.is_zero() {
                    parts.push(rho_concept(q, d2, o, cuts)?);
                }
                members.push(fold_and(parts));
            }
            Ok(fold_or(members))
        }
        ConceptExpr::Exists(r, x) => {
            let pairs = collapsed_pairs(
                chain,
                d,
                FrontKind::Conj,
                o.is_crisp_role_expr(r),
                o.is_crisp_expr(x),
            );
            let mut members = Vec::with_capacity(pairs.len());
            for (d1, d2) in pairs {
                members.push(ConceptExpr::exists(
                    rho_role(r, d1, cuts),
                    rho_concept(x, d2, o, cuts)?,
                ));
            }
            Ok(fold_or(members))
        }
        ConceptExpr::Forall(r, x) => {
            let pairs = collapsed_pairs(
                chain,
                d,
                FrontKind::Impl,
                o.is_crisp_role_expr(r),
                o.is_crisp_expr(x),
            );
            let mut members = Vec::with_capacity(pairs.len());
            for (d1, d2) in pairs {
                let strict = chain.succ(d2).expect("below 1");
                members.push(ConceptExpr::forall(
                    rho_role(r, d1, cuts),
                    rho_concept(x, strict, o, cuts)?,
                ));
            }
            Ok(fold_and(members))
        }
        ConceptExpr::Nominal(entries) => {
            let kept: Vec<(Degree, crate::model::IndId)> = entries
                .iter()
                .filter(|(di, _)| *di >= d)
                .map(|(_, ind)| (Degree(1), *ind))
                .collect();
            if kept.is_empty() {
                Ok(ConceptExpr::Bot)
            } else {
                Ok(ConceptExpr::Nominal(kept))
            }
        }
        ConceptExpr::AtLeast(m, r) => Ok(ConceptExpr::AtLeast(*m, rho_role(r, d, cuts))),
        ConceptExpr::AtMost(m, r) => {
            let frontier = chain.neg_inv_max(d).expect("positive degree");
            let strict = chain.succ(frontier).expect("below 1");
            Ok(ConceptExpr::AtMost(*m, rho_role(r, strict, cuts)))
        }
        ConceptExpr::SelfLoop(r) => Ok(ConceptExpr::SelfLoop(rho_role(r, d, cuts))),
        ConceptExpr::AtLeastQ(..) | ConceptExpr::AtMostQ(..) => {
            Err(CrispifyError::QualifiedRestriction {
                section: Section::Tbox,
                index: 0,
            })
        }
    }
}

fn inverse_of(r: &RoleExpr) -> RoleExpr {
    match r {
        RoleExpr::Name(id) => RoleExpr::Inverse(*id),
        RoleExpr::Inverse(id) => RoleExpr::Name(*id),
        RoleExpr::Universal => RoleExpr::Universal,
    }
}

const ONE: Degree = Degree(1);

/// κ image of one axiom: classical axioms tagged with their target section.
pub fn kappa_axiom(
    ax: &Axiom,
    o: &FuzzyOntology,
    cuts: &CutTable,
    opts: &CrispifyOptions,
) -> Result<Vec<(Section, Axiom)>, CrispifyError> {
    let chain = &o.chain;
    let top = chain.top();
    let classical_one = Degree(1);
    match ax {
        Axiom::Concept(a) => {
            let concept = match a.cmp {
                Cmp::Geq => rho_concept(&a.concept, a.degree, o, cuts)?,
                Cmp::Leq => {
                    let strict = chain.succ(a.degree).expect("upper bounds stay below 1");
                    ConceptExpr::not(rho_concept(&a.concept, strict, o, cuts)?)
                }
                _ => return Err(CrispifyError::InvalidInput("strict bound not rewritten".into())),
            };
            Ok(vec![(
                Section::Abox,
                Axiom::Concept(ConceptAssertion {
                    concept,
                    ind: a.ind,
                    cmp: Cmp::Geq,
                    degree: classical_one,
                }),
            )])
        }
        Axiom::Role(a) => {
            if a.negated {
                return Err(CrispifyError::InvalidInput(
                    "negated role assertion not rewritten".into(),
                ));
            }
            let (role, negated) = match a.cmp {
                Cmp::Geq => (rho_role(&a.role, a.degree, cuts), false),
                Cmp::Leq => {
                    let strict = chain.succ(a.degree).expect("upper bounds stay below 1");
                    (rho_role(&a.role, strict, cuts), true)
                }
                _ => return Err(CrispifyError::InvalidInput("strict bound not rewritten".into())),
            };
            Ok(vec![(
                Section::Abox,
                Axiom::Role(RoleAssertion {
                    role,
                    negated,
                    from: a.from,
                    to: a.to,
                    cmp: Cmp::Geq,
                    degree: classical_one,
                }),
            )])
        }
        Axiom::Eq(a, b) => Ok(vec![(Section::Abox, Axiom::Eq(*a, *b))]),
        Axiom::Neq(a, b) => Ok(vec![(Section::Abox, Axiom::Neq(*a, *b))]),
        Axiom::Gci(g) => {
            if g.cmp != Cmp::Geq {
                return Err(CrispifyError::InvalidInput("strict bound not rewritten".into()));
            }
            if g.lhs.contains_qualified() || g.rhs.contains_qualified() {
                return Err(CrispifyError::QualifiedRestriction {
                    section: Section::Tbox,
                    index: 0,
                });
            }
            let pairs = collapsed_pairs(
                chain,
                g.degree,
                FrontKind::Impl,
                o.is_crisp_expr(&g.lhs),
                o.is_crisp_expr(&g.rhs),
            );
            let mut out = Vec::new();
            let mut seen = BTreeSet::new();
            for (d1, d2) in pairs {
                let lhs = rho_concept(&g.lhs, d1, o, cuts)?;
                let strict = chain.succ(d2).expect("below 1");
                let rhs = rho_concept(&g.rhs, strict, o, cuts)?;
                // A top-level disjunction on the left splits into one
                // inclusion per disjunct.
                let mut disjuncts = Vec::new();
                flatten_or(lhs, &mut disjuncts);
                for lhs in disjuncts {
                    let gci = Axiom::Gci(Gci {
                        lhs,
                        rhs: rhs.clone(),
                        cmp: Cmp::Geq,
                        degree: classical_one,
                    });
                    if seen.insert(format!("{gci:?}")) {
                        out.push((Section::Tbox, gci));
                    }
                }
            }
            Ok(out)
        }
        Axiom::Ria(r) => {
            if r.cmp != Cmp::Geq {
                return Err(CrispifyError::InvalidInput("strict bound not rewritten".into()));
            }
            match r.lhs.len() {
                1 if !opts.literal_role_inclusion => {
                    // Pointwise rule; the table's composition with `u` is
                    // available behind `literal_role_inclusion` for study.
                    let pairs = collapsed_pairs(
                        chain,
                        r.degree,
                        FrontKind::Impl,
                        o.is_crisp_role_expr(&r.lhs[0]),
                        o.is_crisp_role_expr(&r.rhs),
                    );
                    let mut out = Vec::new();
                    for (d1, d2) in pairs {
                        let strict = chain.succ(d2).expect("below 1");
                        out.push((
                            Section::Rbox,
                            Axiom::Ria(Ria {
                                lhs: vec![rho_role(&r.lhs[0], d1, cuts)],
                                rhs: rho_role(&r.rhs, strict, cuts),
                                cmp: Cmp::Geq,
                                degree: classical_one,
                            }),
                        ));
                    }
                    Ok(out)
                }
                1 => {
                    let padded = Ria {
                        lhs: vec![r.lhs[0].clone(), RoleExpr::Universal],
                        rhs: r.rhs.clone(),
                        cmp: r.cmp,
                        degree: r.degree,
                    };
                    kappa_axiom(&Axiom::Ria(padded), o, cuts, opts)
                }
                2 => {
                    let triples = collapsed_ria_triples(
                        chain,
                        r.degree,
                        o.is_crisp_role_expr(&r.lhs[0]),
                        o.is_crisp_role_expr(&r.lhs[1]),
                        o.is_crisp_role_expr(&r.rhs),
                    );
                    let mut out = Vec::new();
                    for (d1, d2, d3) in triples {
                        let strict = chain.succ(d3).expect("below 1");
                        out.push((
                            Section::Rbox,
                            Axiom::Ria(Ria {
                                lhs: vec![rho_role(&r.lhs[0], d1, cuts), rho_role(&r.lhs[1], d2, cuts)],
                                rhs: rho_role(&r.rhs, strict, cuts),
                                cmp: Cmp::Geq,
                                degree: classical_one,
                            }),
                        ));
                    }
                    Ok(out)
                }
                _ => Err(CrispifyError::RiaTooLong {
                    section: Section::Rbox,
                    index: 0,
                }),
            }
        }
        Axiom::Trans(r) => kappa_axiom(
            &Axiom::Ria(Ria {
                lhs: vec![r.clone(), r.clone()],
                rhs: r.clone(),
                cmp: Cmp::Geq,
                degree: top,
            }),
            o,
            cuts,
            opts,
        ),
        Axiom::Sym(r) => kappa_axiom(
            &Axiom::Ria(Ria {
                lhs: vec![r.clone()],
                rhs: inverse_of(r),
                cmp: Cmp::Geq,
                degree: top,
            }),
            o,
            cuts,
            opts,
        ),
        Axiom::Dis(r1, r2) => Ok(vec![(
            Section::Rbox,
            Axiom::Dis(rho_role(r1, ONE, cuts), rho_role(r2, ONE, cuts)),
        )]),
        Axiom::Ref(r) => Ok(vec![(Section::Rbox, Axiom::Ref(rho_role(r, top, cuts)))]),
        Axiom::Irr(r) => Ok(vec![(Section::Rbox, Axiom::Irr(rho_role(r, ONE, cuts)))]),
        Axiom::Asy(r) => Ok(vec![(Section::Rbox, Axiom::Asy(rho_role(r, ONE, cuts)))]),
        Axiom::RoleDisj { sub, disjuncts } => {
            if !opts.extended_roles {
                return Err(CrispifyError::InvalidInput(
                    "role disjunction axioms need extended mode".into(),
                ));
            }
            // max rᵢ ≥ d iff some rᵢ ≥ d: reduce cut-wise.
            let mut out = Vec::new();
            for d in chain.positive_degrees() {
                out.push((
                    Section::Rbox,
                    Axiom::RoleDisj {
                        sub: rho_role(sub, d, cuts),
                        disjuncts: disjuncts.iter().map(|r| rho_role(r, d, cuts)).collect(),
                    },
                ));
            }
            Ok(out)
        }
    }
}

pub struct CrispifyOutput {
    pub classical: ClassicalOntology,
    pub cuts: CutTable,
    /// One `index<TAB>source` line per output axiom, in global output order
    /// (ABox, then TBox, then RBox).
    pub provenance: Vec<String>,
}

/// Full reduction: cut-linking axioms for every non-crisp name, then the κ
/// image of every axiom, in deterministic order.
pub fn crispify(o: &FuzzyOntology, opts: &CrispifyOptions) -> Result<CrispifyOutput, CrispifyError> {
    if !o.chain.is_residuated() {
        return Err(CrispifyError::Zadeh);
    }
    let prepared;
    let source: &FuzzyOntology = if opts.normalize {
        prepared = normalize::normalize(o, opts.skip_small)?.onto;
        &prepared
    } else {
        o
    };
    for (section, axioms) in source.sections() {
        for (index, ax) in axioms.iter().enumerate() {
            let qualified = match ax {
                Axiom::Concept(a) => a.concept.contains_qualified(),
                Axiom::Gci(g) => g.lhs.contains_qualified() || g.rhs.contains_qualified(),
                _ => false,
            };
            if qualified {
                return Err(CrispifyError::QualifiedRestriction { section, index });
            }
            if let Axiom::Ria(r) = ax {
                if r.lhs.len() > 2 {
                    return Err(CrispifyError::RiaTooLong { section, index });
                }
            }
        }
    }
    let cuts = CutTable::build(source)?;
    let n = source.chain.size();

    let mut abox: Vec<(Axiom, String)> = Vec::new();
    let mut tbox: Vec<(Axiom, String)> = Vec::new();
    let mut rbox: Vec<(Axiom, String)> = Vec::new();

    // Linking axioms first: name order, ascending degree.
    for (id, name) in source.sig.concepts.iter() {
        if source.is_crisp_concept(ConceptId(id)) {
            continue;
        }
        for k in 1..n - 1 {
            let upper = cuts.concept_cut(ConceptId(id), Degree(k + 1));
            let lower = cuts.concept_cut(ConceptId(id), Degree(k));
            tbox.push((
                Axiom::gci(ConceptExpr::Name(upper), ConceptExpr::Name(lower), Degree(1)),
                format!("link:{name}:{k}"),
            ));
        }
    }
    for (id, name) in source.sig.roles.iter() {
        if source.is_crisp_role(RoleId(id)) {
            continue;
        }
        for k in 1..n - 1 {
            let upper = cuts.role_cut(RoleId(id), Degree(k + 1));
            let lower = cuts.role_cut(RoleId(id), Degree(k));
            rbox.push((
                Axiom::Ria(Ria {
                    lhs: vec![RoleExpr::Name(upper)],
                    rhs: RoleExpr::Name(lower),
                    cmp: Cmp::Geq,
                    degree: Degree(1),
                }),
                format!("link:{name}:{k}"),
            ));
        }
    }

    // κ images in source order; the map is pure, so order is preserved
    // regardless of execution strategy.
    for (section, axioms) in source.sections() {
        let images: Vec<Result<Vec<(Section, Axiom)>, CrispifyError>> =
            exec::map_ordered(opts.mode, axioms, |ax| kappa_axiom(ax, source, &cuts, opts));
        for (index, image) in images.into_iter().enumerate() {
            for (target, ax) in image? {
                let tag = format!("{section}[{index}]");
                match target {
                    Section::Abox => abox.push((ax, tag)),
                    Section::Tbox => tbox.push((ax, tag)),
                    Section::Rbox => rbox.push((ax, tag)),
                }
            }
        }
    }

    let chain2 = Chain::new(2, crate::chain::Family::Goedel, None).expect("two-valued chain");
    let mut onto = FuzzyOntology::new(chain2);
    onto.sig = cuts.classical_sig.clone();
    onto.crisp_concepts = vec![false; onto.sig.concepts.len()];
    onto.crisp_roles = vec![false; onto.sig.roles.len()];

    let mut provenance = Vec::new();
    let mut index = 0usize;
    for (ax, tag) in abox {
        onto.abox.push(ax);
        provenance.push(format!("{index}\t{tag}"));
        index += 1;
    }
    for (ax, tag) in tbox {
        onto.tbox.push(ax);
        provenance.push(format!("{index}\t{tag}"));
        index += 1;
    }
    for (ax, tag) in rbox {
        onto.rbox.push(ax);
        provenance.push(format!("{index}\t{tag}"));
        index += 1;
    }

    let classical = ClassicalOntology {
        onto,
        concept_origin: cuts.concept_origin.clone(),
        role_origin: cuts.role_origin.clone(),
    };
    Ok(CrispifyOutput {
        classical,
        cuts,
        provenance,
    })
}

// ---------------------------------------------------------------------------
// Number-restriction passes

/// Rewrites every qualified at-least on a right-hand side into `m` disjoint
/// fresh subroles with existential restrictions. Qualified at-leasts on
/// left-hand sides (equivalently at-mosts on right-hand sides) need
/// `extended`, which additionally emits the role-disjunction cover
/// `r ⊑ r₁ ⊔ … ⊔ r_m`.
fn eliminate_qualified(o: &FuzzyOntology, extended: bool) -> Result<FuzzyOntology, CrispifyError> {
    let mut onto = o.clone();
    let abox_in = std::mem::take(&mut onto.abox);
    let tbox_in = std::mem::take(&mut onto.tbox);
    let rbox_in = std::mem::take(&mut onto.rbox);
    let mut namer = FreshNamer::seeded_from(&onto);
    let top = onto.chain.top();

    struct Pass<'a> {
        onto: &'a mut FuzzyOntology,
        namer: &'a mut FreshNamer,
        extended: bool,
        top: Degree,
    }

    impl<'a> Pass<'a> {
        fn fresh_concept(&mut self) -> ConceptExpr {
            ConceptExpr::Name(self.namer.fresh_plain_concept(self.onto))
        }

        /// Replaces direct operands containing qualified restrictions by
        /// fresh names with polarity-correct definitional axioms. `sub` means
        /// the definitional axiom is `#c ⊑ X`.
        fn extract(&mut self, c: &ConceptExpr, sub: bool, defs: &mut Vec<Axiom>) -> ConceptExpr {
            let operand = |this: &mut Self, x: &ConceptExpr, s: bool, defs: &mut Vec<Axiom>| {
                if !x.contains_qualified() {
                    return x.clone();
                }
                let name = this.fresh_concept();
                defs.push(if s {
                    Axiom::gci(name.clone(), x.clone(), this.top)
                } else {
                    Axiom::gci(x.clone(), name.clone(), this.top)
                });
                name
            };
            match c {
                ConceptExpr::And(p, q) => {
                    let p2 = operand(self, p, sub, defs);
                    let q2 = operand(self, q, sub, defs);
                    ConceptExpr::and(p2, q2)
                }
                ConceptExpr::Or(p, q) => {
                    let p2 = operand(self, p, sub, defs);
                    let q2 = operand(self, q, sub, defs);
                    ConceptExpr::or(p2, q2)
                }
                ConceptExpr::Not(p) => ConceptExpr::not(operand(self, p, !sub, defs)),
                ConceptExpr::Exists(r, p) => ConceptExpr::exists(r.clone(), operand(self, p, sub, defs)),
                ConceptExpr::Forall(r, p) => ConceptExpr::forall(r.clone(), operand(self, p, sub, defs)),
                ConceptExpr::AtLeastQ(m, r, p) => {
                    let t = operand(self, p, sub, defs);
                    ConceptExpr::AtLeastQ(*m, r.clone(), Box::new(t))
                }
                ConceptExpr::AtMostQ(m, r, p) => {
                    let t = operand(self, p, !sub, defs);
                    ConceptExpr::AtMostQ(*m, r.clone(), Box::new(t))
                }
                other => other.clone(),
            }
        }

        fn process(&mut self, ax: Axiom, out: &mut Vec<Axiom>) -> Result<(), CrispifyError> {
            match ax {
                Axiom::Concept(a) if a.concept.contains_qualified() => {
                    let sub = matches!(a.cmp, Cmp::Geq | Cmp::Gt);
                    let name = self.fresh_concept();
                    let def = if sub {
                        Axiom::gci(name.clone(), a.concept.clone(), self.top)
                    } else {
                        Axiom::gci(a.concept.clone(), name.clone(), self.top)
                    };
                    self.process(def, out)?;
                    out.push(Axiom::Concept(ConceptAssertion {
                        concept: name,
                        ind: a.ind,
                        cmp: a.cmp,
                        degree: a.degree,
                    }));
                    Ok(())
                }
                Axiom::Gci(g) if g.lhs.contains_qualified() || g.rhs.contains_qualified() => {
                    self.process_gci(g, out)
                }
                other => {
                    out.push(other);
                    Ok(())
                }
            }
        }

        fn process_gci(&mut self, g: Gci, out: &mut Vec<Axiom>) -> Result<(), CrispifyError> {
            // Right-hand side first: at-least there is the directly
            // expressible case.
            match &g.rhs {
                ConceptExpr::AtLeastQ(m, r, t) => {
                    if t.contains_qualified() {
                        let mut defs = Vec::new();
                        let rewritten = self.extract(&g.rhs, true, &mut defs);
                        for def in defs {
                            self.process(def, out)?;
                        }
                        return self.process_gci(Gci { rhs: rewritten, ..g }, out);
                    }
                    let m = *m;
                    if m == 0 {
                        return Ok(()); // ⟨C ⊑ ⊤⟩ is vacuous
                    }
                    let fresh: Vec<RoleId> =
                        (0..m).map(|_| self.namer.fresh_plain_role(self.onto)).collect();
                    for id in &fresh {
                        out.push(Axiom::Gci(Gci {
                            lhs: g.lhs.clone(),
                            rhs: ConceptExpr::exists(RoleExpr::Name(*id), (**t).clone()),
                            cmp: g.cmp,
                            degree: g.degree,
                        }));
                    }
                    for id in &fresh {
                        out.push(Axiom::Ria(Ria {
                            lhs: vec![RoleExpr::Name(*id)],
                            rhs: r.clone(),
                            cmp: Cmp::Geq,
                            degree: self.top,
                        }));
                    }
                    for j in 0..fresh.len() {
                        for k in j + 1..fresh.len() {
                            out.push(Axiom::Dis(RoleExpr::Name(fresh[j]), RoleExpr::Name(fresh[k])));
                        }
                    }
                    return Ok(());
                }
                ConceptExpr::AtMostQ(m, r, t) => {
                    // ≤m r.C has the semantics of ¬(≥(m+1) r.C).
                    let dual = ConceptExpr::not(ConceptExpr::AtLeastQ(m + 1, r.clone(), t.clone()));
                    return self.process_gci(Gci { rhs: dual, ..g }, out);
                }
                rhs if rhs.contains_qualified() => {
                    let mut defs = Vec::new();
                    let rewritten = self.extract(rhs, true, &mut defs);
                    for def in defs {
                        self.process(def, out)?;
                    }
                    return self.process_gci(Gci { rhs: rewritten, ..g }, out);
                }
                _ => {}
            }
            match &g.lhs {
                ConceptExpr::AtLeastQ(m, r, t) => {
                    if !self.extended {
                        return Err(CrispifyError::QualifiedNeedsExtended);
                    }
                    if t.contains_qualified() {
                        let mut defs = Vec::new();
                        let rewritten = self.extract(&g.lhs, false, &mut defs);
                        for def in defs {
                            self.process(def, out)?;
                        }
                        return self.process_gci(Gci { lhs: rewritten, ..g }, out);
                    }
                    let m = *m;
                    if m == 0 {
                        out.push(Axiom::Gci(Gci {
                            lhs: ConceptExpr::Top,
                            ..g
                        }));
                        return Ok(());
                    }
                    let fresh: Vec<RoleId> =
                        (0..m).map(|_| self.namer.fresh_plain_role(self.onto)).collect();
                    let conj = fold_and(
                        fresh
                            .iter()
                            .map(|id| ConceptExpr::exists(RoleExpr::Name(*id), (**t).clone()))
                            .collect(),
                    );
                    out.push(Axiom::Gci(Gci {
                        lhs: conj,
                        rhs: g.rhs.clone(),
                        cmp: g.cmp,
                        degree: g.degree,
                    }));
                    for id in &fresh {
                        out.push(Axiom::Ria(Ria {
                            lhs: vec![RoleExpr::Name(*id)],
                            rhs: r.clone(),
                            cmp: Cmp::Geq,
                            degree: self.top,
                        }));
                    }
                    for j in 0..fresh.len() {
                        for k in j + 1..fresh.len() {
                            out.push(Axiom::Dis(RoleExpr::Name(fresh[j]), RoleExpr::Name(fresh[k])));
                        }
                    }
                    out.push(Axiom::RoleDisj {
                        sub: r.clone(),
                        disjuncts: fresh.iter().map(|id| RoleExpr::Name(*id)).collect(),
                    });
                    return Ok(());
                }
                ConceptExpr::AtMostQ(m, r, t) => {
                    let dual = ConceptExpr::not(ConceptExpr::AtLeastQ(m + 1, r.clone(), t.clone()));
                    return self.process_gci(Gci { lhs: dual, ..g }, out);
                }
                lhs if lhs.contains_qualified() => {
                    let mut defs = Vec::new();
                    let rewritten = self.extract(lhs, false, &mut defs);
                    for def in defs {
                        self.process(def, out)?;
                    }
                    return self.process_gci(Gci { lhs: rewritten, ..g }, out);
                }
                _ => {}
            }
            out.push(Axiom::Gci(g));
            Ok(())
        }
    }

    let mut pass = Pass {
        onto: &mut onto,
        namer: &mut namer,
        extended,
        top,
    };
    let mut flat = Vec::new();
    for ax in abox_in.into_iter().chain(tbox_in).chain(rbox_in) {
        pass.process(ax, &mut flat)?;
    }
    for ax in flat {
        match &ax {
            Axiom::Concept(_) | Axiom::Role(_) | Axiom::Eq(..) | Axiom::Neq(..) => onto.abox.push(ax),
            Axiom::Gci(_) => onto.tbox.push(ax),
            _ => onto.rbox.push(ax),
        }
    }
    Ok(onto)
}

/// Standard-mode elimination: qualified at-leasts on right-hand sides only.
pub fn eliminate_qualified_atleast_rhs(o: &FuzzyOntology) -> Result<FuzzyOntology, CrispifyError> {
    eliminate_qualified(o, false)
}

/// Extended-mode elimination: also handles left-hand sides, emitting role
/// disjunctions.
pub fn eliminate_qualified_atleast_lhs_extended(
    o: &FuzzyOntology,
) -> Result<FuzzyOntology, CrispifyError> {
    eliminate_qualified(o, true)
}

/// The historical concept-partition replacement of qualified at-leasts. It
/// does not preserve satisfiability (partitioning the successors of two
/// elements can clash); every rewritten or introduced axiom is labeled
/// UNSOUND in the returned notes. Demonstration only.
pub fn legacy_partition_reduction(
    o: &FuzzyOntology,
) -> Result<(FuzzyOntology, Vec<String>), CrispifyError> {
    let mut onto = o.clone();
    let abox_in = std::mem::take(&mut onto.abox);
    let tbox_in = std::mem::take(&mut onto.tbox);
    let rbox_in = std::mem::take(&mut onto.rbox);
    let mut namer = FreshNamer::seeded_from(&onto);
    let top = onto.chain.top();
    let mut notes = Vec::new();
    let mut partition_axioms: Vec<Axiom> = Vec::new();

    fn replace(
        c: &ConceptExpr,
        onto: &mut FuzzyOntology,
        namer: &mut FreshNamer,
        top: Degree,
        partition_axioms: &mut Vec<Axiom>,
        touched: &mut bool,
    ) -> ConceptExpr {
        match c {
            ConceptExpr::AtLeastQ(m, r, t) => {
                *touched = true;
                let t = replace(t, onto, namer, top, partition_axioms, touched);
                if *m == 0 {
                    return ConceptExpr::Top;
                }
                let parts: Vec<ConceptId> = (0..*m).map(|_| namer.fresh_plain_concept(onto)).collect();
                partition_axioms.push(Axiom::gci(
                    ConceptExpr::Top,
                    fold_or(parts.iter().map(|id| ConceptExpr::Name(*id)).collect()),
                    top,
                ));
                for j in 0..parts.len() {
                    for k in j + 1..parts.len() {
                        partition_axioms.push(Axiom::gci(
                            ConceptExpr::and(ConceptExpr::Name(parts[j]), ConceptExpr::Name(parts[k])),
                            ConceptExpr::Bot,
                            top,
                        ));
                    }
                }
                fold_and(
                    parts
                        .iter()
                        .map(|id| {
                            let filler = if t == ConceptExpr::Top {
                                ConceptExpr::Name(*id)
                            } else {
                                ConceptExpr::and(t.clone(), ConceptExpr::Name(*id))
                            };
                            ConceptExpr::exists(r.clone(), filler)
                        })
                        .collect(),
                )
            }
            ConceptExpr::Not(x) => {
                ConceptExpr::not(replace(x, onto, namer, top, partition_axioms, touched))
            }
            ConceptExpr::And(p, q) => ConceptExpr::and(
                replace(p, onto, namer, top, partition_axioms, touched),
                replace(q, onto, namer, top, partition_axioms, touched),
            ),
            ConceptExpr::Or(p, q) => ConceptExpr::or(
                replace(p, onto, namer, top, partition_axioms, touched),
                replace(q, onto, namer, top, partition_axioms, touched),
            ),
            ConceptExpr::Exists(r, x) => {
                ConceptExpr::exists(r.clone(), replace(x, onto, namer, top, partition_axioms, touched))
            }
            ConceptExpr::Forall(r, x) => {
                ConceptExpr::forall(r.clone(), replace(x, onto, namer, top, partition_axioms, touched))
            }
            ConceptExpr::AtMostQ(m, r, t) => ConceptExpr::AtMostQ(
                *m,
                r.clone(),
                Box::new(replace(t, onto, namer, top, partition_axioms, touched)),
            ),
            other => other.clone(),
        }
    }

    let route = |ax: Axiom, onto: &mut FuzzyOntology| match &ax {
        Axiom::Concept(_) | Axiom::Role(_) | Axiom::Eq(..) | Axiom::Neq(..) => onto.abox.push(ax),
        Axiom::Gci(_) => onto.tbox.push(ax),
        _ => onto.rbox.push(ax),
    };

    for (section, axioms) in [
        (Section::Abox, abox_in),
        (Section::Tbox, tbox_in),
        (Section::Rbox, rbox_in),
    ] {
        for (index, ax) in axioms.into_iter().enumerate() {
            let mut touched = false;
            let rewritten = match ax {
                Axiom::Concept(a) => Axiom::Concept(ConceptAssertion {
                    concept: replace(
                        &a.concept,
                        &mut onto,
                        &mut namer,
                        top,
                        &mut partition_axioms,
                        &mut touched,
                    ),
                    ..a
                }),
                Axiom::Gci(g) => Axiom::Gci(Gci {
                    lhs: replace(
                        &g.lhs,
                        &mut onto,
                        &mut namer,
                        top,
                        &mut partition_axioms,
                        &mut touched,
                    ),
                    rhs: replace(
                        &g.rhs,
                        &mut onto,
                        &mut namer,
                        top,
                        &mut partition_axioms,
                        &mut touched,
                    ),
                    cmp: g.cmp,
                    degree: g.degree,
                }),
                other => other,
            };
            if touched {
                notes.push(format!("UNSOUND legacy-partition rewrite of {section}[{index}]"));
            }
            route(rewritten, &mut onto);
        }
    }
    for ax in partition_axioms {
        notes.push("UNSOUND legacy-partition axiom".to_string());
        route(ax, &mut onto);
    }
    Ok((onto, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::textio::{parse_ontology, print_classical};

    fn luka6_ab() -> (FuzzyOntology, CutTable) {
        let o = parse_ontology("chain 6 lukasiewicz\nconcept A\nconcept B\n").unwrap();
        let cuts = CutTable::build(&o).unwrap();
        (o, cuts)
    }

    #[test]
    fn rho_negation_example() {
        // ρ(¬A, ≥ 0.8) on the Łukasiewicz chain of 6 → ¬A_{≥0.4}
        let (o, cuts) = luka6_ab();
        let a = ConceptExpr::Name(ConceptId(0));
        let out = rho_concept(&ConceptExpr::not(a), Degree(4), &o, &cuts).unwrap();
        let want = ConceptExpr::not(ConceptExpr::Name(cuts.concept_cut(ConceptId(0), Degree(2))));
        assert_eq!(out, want);
    }

    #[test]
    fn rho_crisp_conjunct_collapses() {
        // ρ(Overused ⊓ CPU, ≥ d) with CPU crisp keeps a single conjunction.
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let cuts = CutTable::build(&o).unwrap();
        let overused = ConceptId(o.sig.concepts.lookup("Overused").unwrap());
        let cpu = ConceptId(o.sig.concepts.lookup("CPU").unwrap());
        let expr = ConceptExpr::and(ConceptExpr::Name(overused), ConceptExpr::Name(cpu));
        for d in o.chain.positive_degrees() {
            let out = rho_concept(&expr, d, &o, &cuts).unwrap();
            let want = ConceptExpr::and(
                ConceptExpr::Name(cuts.concept_cut(overused, d)),
                ConceptExpr::Name(cuts.crisp_concept_image(cpu)),
            );
            assert_eq!(out, want, "degree {d:?}");
        }
    }

    #[test]
    fn rho_on_two_valued_chain_is_single_cut() {
        let o = parse_ontology("chain 2 goedel\nconcept A\n").unwrap();
        let cuts = CutTable::build(&o).unwrap();
        let out = rho_concept(&ConceptExpr::Name(ConceptId(0)), Degree(1), &o, &cuts).unwrap();
        assert_eq!(out, ConceptExpr::Name(ConceptId(0)));
        assert_eq!(cuts.classical_sig.concept_name(ConceptId(0)), "A_geq_1");
    }

    #[test]
    fn kappa_gci_example() {
        // κ(⟨A ⊑ B ≥ 0.8⟩) on the Łukasiewicz chain of 6.
        let (o, cuts) = luka6_ab();
        let g = Axiom::gci(
            ConceptExpr::Name(ConceptId(0)),
            ConceptExpr::Name(ConceptId(1)),
            Degree(4),
        );
        let out = kappa_axiom(&g, &o, &cuts, &CrispifyOptions::default()).unwrap();
        let pairs: Vec<(u32, u32)> = out
            .iter()
            .map(|(_, ax)| match ax {
                Axiom::Gci(g) => match (&g.lhs, &g.rhs) {
                    (ConceptExpr::Name(l), ConceptExpr::Name(r)) => (l.0, r.0),
                    other => panic!("unexpected {other:?}"),
                },
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        // A cuts are ids 0..4 (indices 1..5), B cuts 5..9.
        let a = |k: u32| k - 1;
        let b = |k: u32| 5 + k - 1;
        assert_eq!(
            pairs,
            vec![(a(2), b(1)), (a(3), b(2)), (a(4), b(3)), (a(5), b(4))]
        );
    }

    #[test]
    fn kappa_assertions_and_inequalities() {
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let cuts = CutTable::build(&o).unwrap();
        let opts = CrispifyOptions::default();
        // κ(Overused(cpuA) ≥ 0.8) = Overused_{≥0.8}(cpuA)
        let out = kappa_axiom(&o.abox[3], &o, &cuts, &opts).unwrap();
        assert_eq!(out.len(), 1);
        match &out[0].1 {
            Axiom::Concept(a) => {
                let name = cuts.classical_sig.concept_name(match a.concept {
                    ConceptExpr::Name(id) => id,
                    _ => panic!(),
                });
                assert_eq!(name, "Overused_geq_4");
            }
            other => panic!("unexpected {other:?}"),
        }
        // κ(a ≠ b) is unchanged
        let neq = Axiom::Neq(crate::model::IndId(0), crate::model::IndId(1));
        let out = kappa_axiom(&neq, &o, &cuts, &opts).unwrap();
        assert_eq!(out[0].1, neq);
    }

    #[test]
    fn crispify_two_valued_chain_is_isomorphic() {
        let text = "\
chain 2 goedel
concept A
role r
individual a
individual b
assert A(a) >= 1
assert r(a,b) >= 1
gci A some(r,A) >= 1
";
        let o = parse_ontology(text).unwrap();
        let out = crispify(&o, &CrispifyOptions::default()).unwrap();
        let c = &out.classical.onto;
        assert_eq!(c.abox.len(), 2);
        assert_eq!(c.tbox.len(), 1);
        assert_eq!(c.rbox.len(), 0);
        assert_eq!(c.sig.concepts.len(), 1);
        assert_eq!(c.sig.roles.len(), 1);
        assert_eq!(c.sig.concepts.name(0), "A_geq_1");
    }

    #[test]
    fn crispify_example1_shape() {
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let out = crispify(&o, &CrispifyOptions::default()).unwrap();
        let c = &out.classical.onto;
        assert_eq!(c.abox.len(), 9);
        // 3 fuzzy concepts × 4 links + 10 GCIs indexed by frontier triples
        assert_eq!(c.tbox.len(), 12 + 10);
        // 1 fuzzy role × 4 links
        assert_eq!(c.rbox.len(), 4);
        assert_eq!(out.provenance.len(), 9 + 22 + 4);
        let printed = print_classical(&out.classical);
        assert!(printed.contains("assert Overused_geq_4(cpuA) >= 1"), "{printed}");
        assert!(printed.contains("assert isConnectedTo_geq_4(serverA,serverB) >= 1"));
    }

    #[test]
    fn zadeh_tbox_reduction_rejected() {
        let o = parse_ontology("chain 3 zadeh\nconcept A\n").unwrap();
        assert!(matches!(
            crispify(&o, &CrispifyOptions::default()),
            Err(CrispifyError::Zadeh)
        ));
    }

    #[test]
    fn eliminate_rhs_example() {
        // ⟨A ⊑ ≥2 r.B ≥ 0.6⟩ over chain 6.
        let text = "\
chain 6 lukasiewicz
concept A
concept B
role r
gci A atleastq(2,r,B) >= 0.6
";
        let o = parse_ontology(text).unwrap();
        let out = eliminate_qualified_atleast_rhs(&o).unwrap();
        assert_eq!(out.tbox.len(), 2);
        assert_eq!(out.rbox.len(), 3); // two inclusions + one disjointness
        let printed = crate::textio::print_ontology(&out);
        assert!(printed.contains("gci A some(#r1,B) >= 0.6"), "{printed}");
        assert!(printed.contains("gci A some(#r2,B) >= 0.6"));
        assert!(printed.contains("ria #r1 -> r >= 1"));
        assert!(printed.contains("dis #r1 #r2"));
    }

    #[test]
    fn eliminate_rhs_m1_has_no_disjointness() {
        let text = "chain 4 goedel\nconcept A\nconcept B\nrole r\ngci A atleastq(1,r,B) >= 1\n";
        let o = parse_ontology(text).unwrap();
        let out = eliminate_qualified_atleast_rhs(&o).unwrap();
        assert_eq!(out.tbox.len(), 1);
        assert_eq!(out.rbox.len(), 1);
    }

    #[test]
    fn lhs_without_extended_mode_errors() {
        let text = "chain 4 goedel\nconcept A\nrole r\ngci atleastq(2,r,top) A >= 1\n";
        let o = parse_ontology(text).unwrap();
        assert!(matches!(
            eliminate_qualified_atleast_rhs(&o),
            Err(CrispifyError::QualifiedNeedsExtended)
        ));
    }

    #[test]
    fn lhs_extended_m1_gives_mutual_inclusion() {
        let text = "chain 4 goedel\nconcept A\nconcept B\nrole r\ngci atleastq(1,r,B) A >= 1\n";
        let o = parse_ontology(text).unwrap();
        let out = eliminate_qualified_atleast_lhs_extended(&o).unwrap();
        let printed = crate::textio::print_ontology(&out);
        assert!(printed.contains("gci some(#r1,B) A >= 1"), "{printed}");
        assert!(printed.contains("ria #r1 -> r >= 1"));
        assert!(printed.contains("rdisj r -> #r1"));
    }

    #[test]
    fn nested_qualified_restriction_is_extracted_first() {
        // ⟨A ⊑ ∃s.(≥2 r.B) ≥ 1⟩: the restriction must surface via a fresh
        // name before the role-partition encoding applies.
        let text = "\
chain 3 lukasiewicz
concept A
concept B
role r
role s
gci A some(s,atleastq(2,r,B)) >= 1
";
        let o = parse_ontology(text).unwrap();
        let out = eliminate_qualified_atleast_rhs(&o).unwrap();
        assert!(out.axioms().all(|ax| match ax {
            Axiom::Concept(a) => !a.concept.contains_qualified(),
            Axiom::Gci(g) => !g.lhs.contains_qualified() && !g.rhs.contains_qualified(),
            _ => true,
        }));
        let printed = crate::textio::print_ontology(&out);
        assert!(printed.contains("gci A some(s,#c1) >= 1"), "{printed}");
        assert!(printed.contains("gci #c1 some(#r1,B) >= 1"), "{printed}");
        assert!(printed.contains("gci #c1 some(#r2,B) >= 1"), "{printed}");
        // Bounded satisfiability agrees between the original and the
        // eliminated ontology.
        let opts = crate::oracle::SearchOptions {
            max_domain: 2,
            budget: 20_000_000,
            ..Default::default()
        };
        let before = crate::oracle::search_model(&o, &opts).unwrap();
        let after = crate::oracle::search_model(&out, &opts).unwrap();
        assert_eq!(
            matches!(before, crate::oracle::SearchOutcome::Found(_)),
            matches!(after, crate::oracle::SearchOutcome::Found(_)),
        );
    }

    #[test]
    fn rhs_elimination_preserves_bounded_satisfiability_both_ways() {
        // The right-hand-side encoding is a genuine equivalence: disjoint
        // subroles force distinct witnesses.
        let cases = [
            "chain 2 goedel\nconcept A\nrole r\nindividual a\nassert A(a) >= 1\ngci A atleastq(2,r,top) >= 1\n",
            "chain 2 goedel\nconcept A\nrole r\nindividual a\nassert A(a) >= 1\ngci A atleastq(2,r,top) >= 1\ngci top atmost(1,r) >= 1\n",
            "chain 3 lukasiewicz\nconcept A\nrole r\nindividual a\nassert A(a) >= 1\ngci A atleastq(1,r,A) >= 0.5\n",
            "chain 2 goedel\nconcept A\nrole r\nindividual a\nassert atleastq(2,r,top)(a) >= 1\ngci top atmost(1,r) >= 1\n",
        ];
        for (ix, text) in cases.iter().enumerate() {
            let o = parse_ontology(text).unwrap();
            let out = eliminate_qualified_atleast_rhs(&o).unwrap();
            let opts = crate::oracle::SearchOptions {
                max_domain: 2,
                budget: 20_000_000,
                ..Default::default()
            };
            let before = crate::oracle::search_model(&o, &opts).unwrap();
            let after = crate::oracle::search_model(&out, &opts).unwrap();
            assert_eq!(
                matches!(before, crate::oracle::SearchOutcome::Found(_)),
                matches!(after, crate::oracle::SearchOutcome::Found(_)),
                "case {ix}"
            );
        }
    }

    #[test]
    fn lhs_partition_encoding_only_preserves_satisfiability_upward() {
        // A fixed role partition cannot see two witnesses funnelled through
        // the same subrole, so the left-hand-side encoding weakens the
        // axiom: the encoded ontology below is satisfiable although the
        // original forces at most one successor and asserts two.
        let text = "\
chain 2 goedel
role r
individual a
individual b
individual c
neq b c
assert r(a,b) >= 1
assert r(a,c) >= 1
gci top atmostq(1,r,top) >= 1
";
        let o = parse_ontology(text).unwrap();
        let out = eliminate_qualified_atleast_lhs_extended(&o).unwrap();
        let opts = crate::oracle::SearchOptions {
            max_domain: 3,
            budget: 20_000_000,
            ..Default::default()
        };
        assert_eq!(
            crate::oracle::search_model(&o, &opts).unwrap(),
            crate::oracle::SearchOutcome::Exhausted
        );
        assert!(matches!(
            crate::oracle::search_model(&out, &opts).unwrap(),
            crate::oracle::SearchOutcome::Found(_)
        ));

        // The upward direction does hold: satisfiable inputs stay
        // satisfiable, as in the six-edge cycle regression.
        let sat = parse_ontology(crate::fixtures::EXAMPLE3).unwrap();
        let sat_out = eliminate_qualified_atleast_lhs_extended(&sat).unwrap();
        assert!(matches!(
            crate::oracle::search_model(&sat_out, &opts).unwrap(),
            crate::oracle::SearchOutcome::Found(_)
        ));
    }

    #[test]
    fn kappa_fuzzy_rejects_zero_degree() {
        let o = parse_ontology(crate::fixtures::EXAMPLE1).unwrap();
        let cuts = CutTable::build(&o).unwrap();
        let crate::queries::Query::Fuzzy(qf) =
            crate::textio::parse_query(crate::fixtures::QUERY_FUZZY, &o).unwrap()
        else {
            panic!("fuzzy query expected")
        };
        assert!(matches!(
            crate::queries::kappa_fuzzy(&qf, Degree(0), &o, &cuts, false),
            Err(crate::queries::QueryError::DegreeZero)
        ));
        assert!(matches!(
            crate::queries::instantiate_fuzzy(&qf, &[crate::model::IndId(0)]),
            Err(crate::queries::QueryError::ArityMismatch { want: 2, got: 1 })
        ));
    }

    #[test]
    fn legacy_reduction_matches_historical_shape() {
        let o = parse_ontology(fixtures::EXAMPLE3).unwrap();
        let (out, notes) = legacy_partition_reduction(&o).unwrap();
        let printed = crate::textio::print_ontology(&out);
        assert!(printed.contains("gci top atmostq(2,r,top) >= 1"), "{printed}");
        assert!(printed.contains("gci top and(some(r,#c1),some(r,#c2)) >= 1"));
        assert!(printed.contains("gci top or(#c1,#c2) >= 1"));
        assert!(printed.contains("gci and(#c1,#c2) bot >= 1"));
        assert!(notes.iter().all(|n| n.contains("UNSOUND")));
        assert!(!notes.is_empty());
    }
}
