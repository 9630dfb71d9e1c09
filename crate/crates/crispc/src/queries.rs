//! Query forms and their translations to classical (U)CQs.
//!
//! Threshold queries translate atom-wise to cut names. Fuzzy and scoring
//! queries translate to unions of CQs, one member per degree tuple reaching
//! the requested bound; by default only Pareto-minimal tuples are kept
//! (subsumed members add nothing), with `all_tuples` restoring the literal
//! definition.

use std::collections::BTreeSet;

use num_rational::Rational64;
use thiserror::Error;

use crate::chain::{Chain, Degree};
use crate::crispify::CutTable;
use crate::model::{ConceptId, FuzzyOntology, IndId, RoleId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(u32),
    Ind(IndId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    Concept(ConceptId, Term),
    Role(RoleId, Term, Term),
    Eq(Term, Term),
}

impl AtomKind {
    pub fn is_eq(&self) -> bool {
        matches!(self, AtomKind::Eq(..))
    }

    pub fn terms(&self) -> Vec<Term> {
        match *self {
            AtomKind::Concept(_, t) => vec![t],
            AtomKind::Role(_, s, t) => vec![s, t],
            AtomKind::Eq(s, t) => vec![s, t],
        }
    }

    fn map_terms(&self, f: impl Fn(Term) -> Term) -> AtomKind {
        match *self {
            AtomKind::Concept(c, t) => AtomKind::Concept(c, f(t)),
            AtomKind::Role(r, s, t) => AtomKind::Role(r, f(s), f(t)),
            AtomKind::Eq(s, t) => AtomKind::Eq(f(s), f(t)),
        }
    }
}

/// Variable names local to one query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryVars {
    pub names: Vec<String>,
}

impl QueryVars {
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return i as u32;
        }
        self.names.push(name.to_string());
        (self.names.len() - 1) as u32
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdAtom {
    pub atom: AtomKind,
    pub bound: Degree,
}

/// Conjunctive query whose atoms carry individual lower-bound degrees;
/// equality atoms carry the implicit bound 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCq {
    pub vars: QueryVars,
    pub dist: Vec<u32>,
    pub atoms: Vec<ThresholdAtom>,
}

/// Degreeless conjunctive query; satisfaction degree is the ⊗-combination of
/// its atoms' degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyCq {
    pub vars: QueryVars,
    pub dist: Vec<u32>,
    pub atoms: Vec<AtomKind>,
}

/// Monotone scoring expression over atom degree placeholders. The grammar
/// (placeholders, non-negative constants, `+`, `*`, `min`, `max`) makes
/// monotonicity structural.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoreExpr {
    Atom(usize),
    Const(Rational64),
    Add(Box<ScoreExpr>, Box<ScoreExpr>),
    Mul(Box<ScoreExpr>, Box<ScoreExpr>),
    Min(Box<ScoreExpr>, Box<ScoreExpr>),
    Max(Box<ScoreExpr>, Box<ScoreExpr>),
}

impl ScoreExpr {
    pub fn eval(&self, degrees: &[Rational64]) -> Rational64 {
        match self {
            ScoreExpr::Atom(i) => degrees[*i],
            ScoreExpr::Const(c) => *c,
            ScoreExpr::Add(a, b) => a.eval(degrees) + b.eval(degrees),
            ScoreExpr::Mul(a, b) => a.eval(degrees) * b.eval(degrees),
            ScoreExpr::Min(a, b) => a.eval(degrees).min(b.eval(degrees)),
            ScoreExpr::Max(a, b) => a.eval(degrees).max(b.eval(degrees)),
        }
    }

    pub fn max_atom_ref(&self) -> Option<usize> {
        match self {
            ScoreExpr::Atom(i) => Some(*i),
            ScoreExpr::Const(_) => None,
            ScoreExpr::Add(a, b)
            | ScoreExpr::Mul(a, b)
            | ScoreExpr::Min(a, b)
            | ScoreExpr::Max(a, b) => a.max_atom_ref().into_iter().chain(b.max_atom_ref()).max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoringQuery {
    pub vars: QueryVars,
    pub dist: Vec<u32>,
    pub atoms: Vec<AtomKind>,
    pub score: ScoreExpr,
}

/// One classical conjunctive query over cut names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassicalCq {
    pub atoms: Vec<AtomKind>,
}

/// Union of classical CQs sharing distinguished variables. An empty member
/// list marks a query unsatisfiable at the requested bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Ucq {
    pub vars: QueryVars,
    pub dist: Vec<u32>,
    pub members: Vec<ClassicalCq>,
}

impl Ucq {
    pub fn single(vars: QueryVars, dist: Vec<u32>, cq: ClassicalCq) -> Ucq {
        Ucq {
            vars,
            dist,
            members: vec![cq],
        }
    }

    pub fn arity(&self) -> usize {
        self.dist.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Threshold(ThresholdCq),
    Fuzzy(FuzzyCq),
    Scoring(ScoringQuery),
    Ucq(Ucq),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("answer tuple has {got} individuals, query expects {want}")]
    ArityMismatch { want: usize, got: usize },
    #[error("fuzzy query translation requires a positive degree")]
    DegreeZero,
    #[error("degree tuple space of {0} combinations exceeds the translation cap")]
    TooManyTuples(u128),
}

const TUPLE_CAP: u128 = 5_000_000;

fn cut_atom(atom: &AtomKind, d: Degree, cuts: &CutTable) -> AtomKind {
    match *atom {
        AtomKind::Concept(c, t) => AtomKind::Concept(cuts.concept_cut(c, d), t),
        AtomKind::Role(r, s, t) => AtomKind::Role(cuts.role_cut(r, d), s, t),
        AtomKind::Eq(s, t) => AtomKind::Eq(s, t),
    }
}

/// Atom-wise cut substitution for threshold queries; equality atoms pass
/// through, crisp names collapse to their single classical image.
pub fn kappa_threshold(q: &ThresholdCq, cuts: &CutTable) -> ClassicalCq {
    ClassicalCq {
        atoms: q.atoms.iter().map(|a| cut_atom(&a.atom, a.bound, cuts)).collect(),
    }
}

/// True when the atom only takes the values 0 and 1, so its degree component
/// collapses to {0, top} during tuple enumeration.
fn atom_is_two_valued(atom: &AtomKind, onto: &FuzzyOntology) -> bool {
    match atom {
        AtomKind::Concept(c, _) => onto.is_crisp_concept(*c),
        AtomKind::Role(r, _, _) => onto.is_crisp_role(*r),
        AtomKind::Eq(..) => true,
    }
}

/// Enumerates degree tuples over the chain, collapses two-valued components,
/// filters by `accept`, and optionally keeps only Pareto-minimal tuples.
/// Tuples come back in lexicographic index order.
fn degree_tuples(
    chain: &Chain,
    two_valued: &[bool],
    include_zero: bool,
    minimal_only: bool,
    accept: impl Fn(&[Degree]) -> bool,
) -> Result<Vec<Vec<Degree>>, QueryError> {
    let k = two_valued.len();
    let base: Vec<Vec<Degree>> = two_valued
        .iter()
        .map(|&tv| {
            let lo = if include_zero { 0 } else { 1 };
            if tv {
                let mut v = Vec::new();
                if include_zero {
                    v.push(Degree(0));
                }
                v.push(chain.top());
                v
            } else {
                (lo..chain.size()).map(Degree).collect()
            }
        })
        .collect();
    let space: u128 = base.iter().map(|v| v.len() as u128).product();
    if space > TUPLE_CAP {
        return Err(QueryError::TooManyTuples(space));
    }

    let mut kept: Vec<Vec<Degree>> = Vec::new();
    let mut idx = vec![0usize; k];
    'outer: loop {
        let tuple: Vec<Degree> = (0..k).map(|i| base[i][idx[i]]).collect();
        if accept(&tuple) {
            // Lexicographic enumeration lists dominators before dominated
            // tuples, so checking against kept tuples suffices.
            let dominated =
                minimal_only && kept.iter().any(|m| m.iter().zip(&tuple).all(|(a, b)| a <= b));
            if !dominated {
                kept.push(tuple);
            }
        }
        for i in (0..k).rev() {
            idx[i] += 1;
            if idx[i] < base[i].len() {
                continue 'outer;
            }
            idx[i] = 0;
            if i == 0 {
                break 'outer;
            }
        }
        if k == 0 {
            break;
        }
    }
    Ok(kept)
}

fn member_from_tuple(atoms: &[AtomKind], tuple: &[Degree], cuts: &CutTable) -> ClassicalCq {
    let mut out = Vec::new();
    for (atom, &d) in atoms.iter().zip(tuple) {
        if d.is_zero() {
            continue; // a zero bound constrains nothing
        }
        out.push(cut_atom(atom, d, cuts));
    }
    ClassicalCq { atoms: out }
}

/// Translates a fuzzy CQ at lower bound `d` into a UCQ: one member per
/// degree tuple whose ⊗-combination reaches `d`. Equality atoms are pinned
/// to 1. For min-based families the minimal frontier is the single tuple
/// `(d, …, d)`.
pub fn kappa_fuzzy(
    q: &FuzzyCq,
    d: Degree,
    onto: &FuzzyOntology,
    cuts: &CutTable,
    all_tuples: bool,
) -> Result<Ucq, QueryError> {
    if d.is_zero() {
        return Err(QueryError::DegreeZero);
    }
    let chain = &onto.chain;
    let two_valued: Vec<bool> = q.atoms.iter().map(|a| atom_is_two_valued(a, onto)).collect();
    let tuples = degree_tuples(chain, &two_valued, false, !all_tuples, |t| {
        let mut acc = chain.top();
        for &x in t {
            acc = chain.tnorm(acc, x);
        }
        acc >= d
    })?;
    let mut seen = BTreeSet::new();
    let mut members = Vec::new();
    for t in tuples {
        let cq = member_from_tuple(&q.atoms, &t, cuts);
        if seen.insert(cq.clone()) {
            members.push(cq);
        }
    }
    Ok(Ucq {
        vars: q.vars.clone(),
        dist: q.dist.clone(),
        members,
    })
}

/// Translates a scoring query at score bound `d`: one member per degree
/// tuple with `f(tuple) ≥ d`; zero components drop their atoms.
pub fn kappa_scoring(
    q: &ScoringQuery,
    d: Rational64,
    onto: &FuzzyOntology,
    cuts: &CutTable,
    all_tuples: bool,
) -> Result<Ucq, QueryError> {
    let chain = &onto.chain;
    let two_valued: Vec<bool> = q.atoms.iter().map(|a| atom_is_two_valued(a, onto)).collect();
    let denom = i64::from(chain.size() - 1);
    let tuples = degree_tuples(chain, &two_valued, true, !all_tuples, |t| {
        let degs: Vec<Rational64> = t.iter().map(|x| Rational64::new(i64::from(x.0), denom)).collect();
        q.score.eval(&degs) >= d
    })?;
    let mut seen = BTreeSet::new();
    let mut members = Vec::new();
    for t in tuples {
        let cq = member_from_tuple(&q.atoms, &t, cuts);
        if seen.insert(cq.clone()) {
            members.push(cq);
        }
    }
    Ok(Ucq {
        vars: q.vars.clone(),
        dist: q.dist.clone(),
        members,
    })
}

type Substitution = (Vec<(u32, IndId)>, Vec<AtomKind>);

/// Substitution of an answer tuple into the distinguished variables. When a
/// repeated distinguished variable meets differing individuals, the first
/// one is substituted and equality atoms link the rest.
fn substitution(vars: &QueryVars, dist: &[u32], tuple: &[IndId]) -> Result<Substitution, QueryError> {
    if dist.len() != tuple.len() {
        return Err(QueryError::ArityMismatch {
            want: dist.len(),
            got: tuple.len(),
        });
    }
    let _ = vars;
    let mut map: Vec<(u32, IndId)> = Vec::new();
    let mut eqs: Vec<AtomKind> = Vec::new();
    for (&v, &ind) in dist.iter().zip(tuple) {
        match map.iter().find(|(w, _)| *w == v) {
            None => map.push((v, ind)),
            Some(&(_, first)) if first == ind => {}
            Some(&(_, first)) => eqs.push(AtomKind::Eq(Term::Ind(first), Term::Ind(ind))),
        }
    }
    Ok((map, eqs))
}

fn apply_subst(atom: &AtomKind, map: &[(u32, IndId)]) -> AtomKind {
    atom.map_terms(|t| match t {
        Term::Var(v) => match map.iter().find(|(w, _)| *w == v) {
            Some(&(_, ind)) => Term::Ind(ind),
            None => Term::Var(v),
        },
        ind => ind,
    })
}

pub fn instantiate_ucq(u: &Ucq, tuple: &[IndId]) -> Result<Ucq, QueryError> {
    let (map, eqs) = substitution(&u.vars, &u.dist, tuple)?;
    let members = u
        .members
        .iter()
        .map(|m| {
            let mut atoms: Vec<AtomKind> = m.atoms.iter().map(|a| apply_subst(a, &map)).collect();
            atoms.extend(eqs.iter().cloned());
            ClassicalCq { atoms }
        })
        .collect();
    Ok(Ucq {
        vars: u.vars.clone(),
        dist: Vec::new(),
        members,
    })
}

pub fn instantiate_threshold(
    q: &ThresholdCq,
    tuple: &[IndId],
    top: Degree,
) -> Result<ThresholdCq, QueryError> {
    let (map, eqs) = substitution(&q.vars, &q.dist, tuple)?;
    let mut atoms: Vec<ThresholdAtom> = q
        .atoms
        .iter()
        .map(|a| ThresholdAtom {
            atom: apply_subst(&a.atom, &map),
            bound: a.bound,
        })
        .collect();
    atoms.extend(eqs.into_iter().map(|atom| ThresholdAtom { atom, bound: top }));
    Ok(ThresholdCq {
        vars: q.vars.clone(),
        dist: Vec::new(),
        atoms,
    })
}

pub fn instantiate_fuzzy(q: &FuzzyCq, tuple: &[IndId]) -> Result<FuzzyCq, QueryError> {
    let (map, eqs) = substitution(&q.vars, &q.dist, tuple)?;
    let mut atoms: Vec<AtomKind> = q.atoms.iter().map(|a| apply_subst(a, &map)).collect();
    atoms.extend(eqs);
    Ok(FuzzyCq {
        vars: q.vars.clone(),
        dist: Vec::new(),
        atoms,
    })
}

/// Scoring instantiation multiplies introduced equality atoms into the
/// score, so a failed identification zeroes the answer out.
pub fn instantiate_scoring(q: &ScoringQuery, tuple: &[IndId]) -> Result<ScoringQuery, QueryError> {
    let (map, eqs) = substitution(&q.vars, &q.dist, tuple)?;
    let mut atoms: Vec<AtomKind> = q.atoms.iter().map(|a| apply_subst(a, &map)).collect();
    let mut score = q.score.clone();
    for eq in eqs {
        atoms.push(eq);
        score = ScoreExpr::Mul(Box::new(score), Box::new(ScoreExpr::Atom(atoms.len() - 1)));
    }
    Ok(ScoringQuery {
        vars: q.vars.clone(),
        dist: Vec::new(),
        atoms,
        score,
    })
}

/// Naive top-k answering: walks the chain from the top degree downwards,
/// translating the fuzzy CQ at each bound and collecting newly entailed
/// candidate tuples until `k` answers accumulate. Each answer reports the
/// largest degree at which it appeared; ties follow candidate-stream order.
pub fn top_k<F>(
    q: &FuzzyCq,
    k: usize,
    onto: &FuzzyOntology,
    cuts: &CutTable,
    candidates: &[Vec<IndId>],
    mut entails: F,
    all_tuples: bool,
) -> Result<Vec<(Vec<IndId>, Degree)>, QueryError>
where
    F: FnMut(&Ucq, &[IndId]) -> bool,
{
    let mut answers: Vec<(Vec<IndId>, Degree)> = Vec::new();
    if k == 0 {
        return Ok(answers);
    }
    for d in onto.chain.positive_degrees().rev() {
        let ucq = kappa_fuzzy(q, d, onto, cuts, all_tuples)?;
        for cand in candidates {
            if answers.iter().any(|(t, _)| t == cand) {
                continue;
            }
            let boolean = instantiate_ucq(&ucq, cand)?;
            if entails(&boolean, cand) {
                answers.push((cand.clone(), d));
                if answers.len() == k {
                    return Ok(answers);
                }
            }
        }
    }
    Ok(answers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Family;

    #[test]
    fn score_expr_exact_rationals() {
        // 3/5 * 1/4 + 2/5 * 3/4 = 9/20
        let e = ScoreExpr::Add(
            Box::new(ScoreExpr::Mul(
                Box::new(ScoreExpr::Const(Rational64::new(3, 5))),
                Box::new(ScoreExpr::Atom(0)),
            )),
            Box::new(ScoreExpr::Mul(
                Box::new(ScoreExpr::Const(Rational64::new(2, 5))),
                Box::new(ScoreExpr::Atom(1)),
            )),
        );
        let v = e.eval(&[Rational64::new(1, 4), Rational64::new(3, 4)]);
        assert_eq!(v, Rational64::new(9, 20));
    }

    #[test]
    fn unreachable_score_gives_empty_union() {
        let o = crate::textio::parse_ontology(crate::fixtures::SCORING_ONTOLOGY).unwrap();
        let cuts = crate::crispify::CutTable::build(&o).unwrap();
        let crate::queries::Query::Scoring(mut q) =
            crate::textio::parse_query(crate::fixtures::QUERY_SCORING, &o).unwrap()
        else {
            panic!("scoring query expected")
        };
        q.score = ScoreExpr::Const(Rational64::new(1, 10));
        let ucq = kappa_scoring(&q, Rational64::new(1, 4), &o, &cuts, false).unwrap();
        assert!(
            ucq.members.is_empty(),
            "constant score below the bound is unsatisfiable"
        );
    }

    #[test]
    fn degree_tuples_minimal_lukasiewicz() {
        let chain = Chain::new(6, Family::Lukasiewicz, None).unwrap();
        // ⊗ of three components ≥ 0.8: minimal tuples are the three
        // permutations of (0.8, 1, 1).
        let tuples = degree_tuples(&chain, &[false, false, false], false, true, |t| {
            let mut acc = chain.top();
            for &x in t {
                acc = chain.tnorm(acc, x);
            }
            acc >= Degree(4)
        })
        .unwrap();
        let want: Vec<Vec<Degree>> = vec![
            vec![Degree(4), Degree(5), Degree(5)],
            vec![Degree(5), Degree(4), Degree(5)],
            vec![Degree(5), Degree(5), Degree(4)],
        ];
        assert_eq!(tuples, want);
    }

    #[test]
    fn degree_tuples_min_family_is_single() {
        let chain = Chain::new(6, Family::Goedel, None).unwrap();
        let tuples = degree_tuples(&chain, &[false, false], false, true, |t| {
            t.iter().map(|d| d.0).min().unwrap_or(5) >= 3
        })
        .unwrap();
        assert_eq!(tuples, vec![vec![Degree(3), Degree(3)]]);
    }
}
