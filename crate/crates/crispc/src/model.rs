//! ASTs for fuzzy and classical ontologies, validity checks, and the
//! occurrence metric.
//!
//! Names are interned integer ids with a side table of source strings, so
//! rewriting passes copy expressions cheaply. Classical ontologies reuse the
//! same axiom shapes over a two-valued chain.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::chain::{Chain, Degree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndId(pub u32);

/// Interned name table for one namespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    names: Vec<String>,
    map: HashMap<String, u32>,
}

impl Interner {
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.map.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.map.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<u32> {
        self.map.get(name).copied()
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

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.names.iter().enumerate().map(|(i, s)| (i as u32, s.as_str()))
    }
}

/// Declared names of an ontology, one interner per namespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: Interner,
    pub roles: Interner,
    pub inds: Interner,
}

impl Signature {
    pub fn concept(&mut self, name: &str) -> ConceptId {
        ConceptId(self.concepts.intern(name))
    }

    pub fn role(&mut self, name: &str) -> RoleId {
        RoleId(self.roles.intern(name))
    }

    pub fn ind(&mut self, name: &str) -> IndId {
        IndId(self.inds.intern(name))
    }

    pub fn concept_name(&self, id: ConceptId) -> &str {
        self.concepts.name(id.0)
    }

    pub fn role_name(&self, id: RoleId) -> &str {
        self.roles.name(id.0)
    }

    pub fn ind_name(&self, id: IndId) -> &str {
        self.inds.name(id.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RoleExpr {
    Name(RoleId),
    /// Inverse of a role name; double inverses are unrepresentable.
    Inverse(RoleId),
    Universal,
}

impl RoleExpr {
    pub fn name_id(&self) -> Option<RoleId> {
        match self {
            RoleExpr::Name(r) | RoleExpr::Inverse(r) => Some(*r),
            RoleExpr::Universal => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptExpr {
    Top,
    Bot,
    Name(ConceptId),
    Not(Box<ConceptExpr>),
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    Or(Box<ConceptExpr>, Box<ConceptExpr>),
    Exists(RoleExpr, Box<ConceptExpr>),
    Forall(RoleExpr, Box<ConceptExpr>),
    /// Fuzzy nominal `{d₁/o₁, …}`; degrees strictly positive.
    Nominal(Vec<(Degree, IndId)>),
    AtLeast(u32, RoleExpr),
    AtMost(u32, RoleExpr),
    /// Qualified restrictions are parseable but only selected pipelines
    /// consume them.
    AtLeastQ(u32, RoleExpr, Box<ConceptExpr>),
    AtMostQ(u32, RoleExpr, Box<ConceptExpr>),
    SelfLoop(RoleExpr),
}

impl ConceptExpr {
    pub fn and(a: ConceptExpr, b: ConceptExpr) -> ConceptExpr {
        ConceptExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ConceptExpr, b: ConceptExpr) -> ConceptExpr {
        ConceptExpr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: ConceptExpr) -> ConceptExpr {
        ConceptExpr::Not(Box::new(a))
    }

    pub fn exists(r: RoleExpr, c: ConceptExpr) -> ConceptExpr {
        ConceptExpr::Exists(r, Box::new(c))
    }

    pub fn forall(r: RoleExpr, c: ConceptExpr) -> ConceptExpr {
        ConceptExpr::Forall(r, Box::new(c))
    }

    pub fn contains_qualified(&self) -> bool {
        match self {
            ConceptExpr::AtLeastQ(..) | ConceptExpr::AtMostQ(..) => true,
            ConceptExpr::Not(c) => c.contains_qualified(),
            ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => {
                a.contains_qualified() || b.contains_qualified()
            }
            ConceptExpr::Exists(_, c) | ConceptExpr::Forall(_, c) => c.contains_qualified(),
            _ => false,
        }
    }
}

/// Comparison carried by degree-annotated axioms. `Gt`/`Lt` exist at parse
/// level only; `rewrite_strict` eliminates them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Geq,
    Gt,
    Leq,
    Lt,
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Geq => ">=",
            Cmp::Gt => ">",
            Cmp::Leq => "<=",
            Cmp::Lt => "<",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConceptAssertion {
    pub concept: ConceptExpr,
    pub ind: IndId,
    pub cmp: Cmp,
    pub degree: Degree,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RoleAssertion {
    pub role: RoleExpr,
    /// Negated role assertions `⟨¬r(a,b) ⋈ d⟩` exist at parse level in fuzzy
    /// input and as `¬ρ(r,>d)(a,b)` facts in classical output.
    pub negated: bool,
    pub from: IndId,
    pub to: IndId,
    pub cmp: Cmp,
    pub degree: Degree,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gci {
    pub lhs: ConceptExpr,
    pub rhs: ConceptExpr,
    pub cmp: Cmp,
    pub degree: Degree,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ria {
    pub lhs: Vec<RoleExpr>,
    pub rhs: RoleExpr,
    pub cmp: Cmp,
    pub degree: Degree,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Axiom {
    Concept(ConceptAssertion),
    Role(RoleAssertion),
    Eq(IndId, IndId),
    Neq(IndId, IndId),
    Gci(Gci),
    Ria(Ria),
    Trans(RoleExpr),
    Dis(RoleExpr, RoleExpr),
    Ref(RoleExpr),
    Irr(RoleExpr),
    Sym(RoleExpr),
    Asy(RoleExpr),
    /// `r ⊑ r₁ ⊔ … ⊔ r_m`, extended mode only; interpreted with the
    /// pointwise maximum of the disjuncts.
    RoleDisj {
        sub: RoleExpr,
        disjuncts: Vec<RoleExpr>,
    },
}

impl Axiom {
    pub fn gci(lhs: ConceptExpr, rhs: ConceptExpr, degree: Degree) -> Axiom {
        Axiom::Gci(Gci {
            lhs,
            rhs,
            cmp: Cmp::Geq,
            degree,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Section {
    Abox,
    Tbox,
    Rbox,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Abox => "abox",
            Section::Tbox => "tbox",
            Section::Rbox => "rbox",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyOntology {
    pub chain: Chain,
    pub sig: Signature,
    pub abox: Vec<Axiom>,
    pub tbox: Vec<Axiom>,
    pub rbox: Vec<Axiom>,
    /// Crispness per concept/role id; crisp names take only the values 0 and 1.
    pub crisp_concepts: Vec<bool>,
    pub crisp_roles: Vec<bool>,
}

impl FuzzyOntology {
    pub fn new(chain: Chain) -> FuzzyOntology {
        FuzzyOntology {
            chain,
            sig: Signature::default(),
            abox: Vec::new(),
            tbox: Vec::new(),
            rbox: Vec::new(),
            crisp_concepts: Vec::new(),
            crisp_roles: Vec::new(),
        }
    }

    pub fn declare_concept(&mut self, name: &str, crisp: bool) -> ConceptId {
        let id = self.sig.concept(name);
        if id.0 as usize >= self.crisp_concepts.len() {
            self.crisp_concepts.resize(id.0 as usize + 1, false);
        }
        self.crisp_concepts[id.0 as usize] |= crisp;
        id
    }

    pub fn declare_role(&mut self, name: &str, crisp: bool) -> RoleId {
        let id = self.sig.role(name);
        if id.0 as usize >= self.crisp_roles.len() {
            self.crisp_roles.resize(id.0 as usize + 1, false);
        }
        self.crisp_roles[id.0 as usize] |= crisp;
        id
    }

    pub fn declare_ind(&mut self, name: &str) -> IndId {
        self.sig.ind(name)
    }

    pub fn is_crisp_concept(&self, id: ConceptId) -> bool {
        self.crisp_concepts.get(id.0 as usize).copied().unwrap_or(false)
    }

    pub fn is_crisp_role(&self, id: RoleId) -> bool {
        self.crisp_roles.get(id.0 as usize).copied().unwrap_or(false)
    }

    pub fn is_crisp_role_expr(&self, r: &RoleExpr) -> bool {
        match r {
            RoleExpr::Name(id) | RoleExpr::Inverse(id) => self.is_crisp_role(*id),
            RoleExpr::Universal => true,
        }
    }

    /// True when the expression can only evaluate to 0 or 1 in any
    /// interpretation that respects the crisp declarations.
    pub fn is_crisp_expr(&self, c: &ConceptExpr) -> bool {
        match c {
            ConceptExpr::Top | ConceptExpr::Bot => true,
            ConceptExpr::Name(id) => self.is_crisp_concept(*id),
            ConceptExpr::Not(x) => self.is_crisp_expr(x),
            ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => {
                self.is_crisp_expr(a) && self.is_crisp_expr(b)
            }
            ConceptExpr::Exists(r, x) | ConceptExpr::Forall(r, x) => {
                self.is_crisp_role_expr(r) && self.is_crisp_expr(x)
            }
            ConceptExpr::Nominal(entries) => entries.iter().all(|(d, _)| *d == self.chain.top()),
            ConceptExpr::AtLeast(_, r) | ConceptExpr::AtMost(_, r) | ConceptExpr::SelfLoop(r) => {
                self.is_crisp_role_expr(r)
            }
            ConceptExpr::AtLeastQ(_, r, x) | ConceptExpr::AtMostQ(_, r, x) => {
                self.is_crisp_role_expr(r) && self.is_crisp_expr(x)
            }
        }
    }

    pub fn sections(&self) -> impl Iterator<Item = (Section, &Vec<Axiom>)> {
        [
            (Section::Abox, &self.abox),
            (Section::Tbox, &self.tbox),
            (Section::Rbox, &self.rbox),
        ]
        .into_iter()
    }

    pub fn axioms(&self) -> impl Iterator<Item = &Axiom> {
        self.abox.iter().chain(self.tbox.iter()).chain(self.rbox.iter())
    }

    pub fn push(&mut self, section: Section, ax: Axiom) {
        match section {
            Section::Abox => self.abox.push(ax),
            Section::Tbox => self.tbox.push(ax),
            Section::Rbox => self.rbox.push(ax),
        }
    }
}

/// What a classical name stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutOrigin {
    /// `A_{≥d}` / `r_{≥d}` of a fuzzy name; the degree index is on the
    /// source chain.
    ConceptCut(ConceptId, Degree),
    RoleCut(RoleId, Degree),
    /// Single classical image of a crisp-declared name.
    CrispConcept(ConceptId),
    CrispRole(RoleId),
}

/// Classical output of the reduction: two-valued axioms over cut names,
/// with a table recording which classical name is which cut.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalOntology {
    pub onto: FuzzyOntology,
    pub concept_origin: Vec<CutOrigin>,
    pub role_origin: Vec<CutOrigin>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub section: Section,
    pub index: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]: {}", self.section, self.index, self.message)
    }
}

fn check_degree(chain: &Chain, d: Degree, what: &str, out: &mut Vec<String>) {
    if d.0 >= chain.size() {
        out.push(format!(
            "degree index {} of {what} not on chain of {}",
            d.0,
            chain.size()
        ));
    }
}

fn check_concept(o: &FuzzyOntology, c: &ConceptExpr, out: &mut Vec<String>) {
    match c {
        ConceptExpr::Top | ConceptExpr::Bot => {}
        ConceptExpr::Name(id) => {
            if id.0 as usize >= o.sig.concepts.len() {
                out.push(format!("undeclared concept id {}", id.0));
            }
        }
        ConceptExpr::Not(x) => check_concept(o, x, out),
        ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => {
            check_concept(o, a, out);
            check_concept(o, b, out);
        }
        ConceptExpr::Exists(r, x) | ConceptExpr::Forall(r, x) => {
            check_role(o, r, out);
            check_concept(o, x, out);
        }
        ConceptExpr::Nominal(entries) => {
            for (d, ind) in entries {
                check_degree(&o.chain, *d, "nominal entry", out);
                if d.is_zero() {
                    out.push("nominal degree must be positive".to_string());
                }
                if ind.0 as usize >= o.sig.inds.len() {
                    out.push(format!("undeclared individual id {}", ind.0));
                }
            }
        }
        ConceptExpr::AtLeast(_, r) | ConceptExpr::AtMost(_, r) | ConceptExpr::SelfLoop(r) => {
            check_role(o, r, out)
        }
        ConceptExpr::AtLeastQ(_, r, x) | ConceptExpr::AtMostQ(_, r, x) => {
            check_role(o, r, out);
            check_concept(o, x, out);
        }
    }
}

fn check_role(o: &FuzzyOntology, r: &RoleExpr, out: &mut Vec<String>) {
    if let Some(id) = r.name_id() {
        if id.0 as usize >= o.sig.roles.len() {
            out.push(format!("undeclared role id {}", id.0));
        }
    }
}

/// Reports every invariant violation; an empty report means the ontology is
/// valid and strictness-free.
pub fn validate(o: &FuzzyOntology) -> Vec<Violation> {
    let mut report = Vec::new();
    let top = o.chain.top();
    for (section, axioms) in o.sections() {
        for (index, ax) in axioms.iter().enumerate() {
            let mut msgs: Vec<String> = Vec::new();
            match ax {
                Axiom::Concept(a) => {
                    check_concept(o, &a.concept, &mut msgs);
                    check_degree(&o.chain, a.degree, "assertion", &mut msgs);
                    match a.cmp {
                        Cmp::Geq if a.degree.is_zero() => {
                            msgs.push("Geq degree must be positive".into())
                        }
                        Cmp::Leq if a.degree == top => msgs.push("Leq degree must be below 1".into()),
                        Cmp::Gt | Cmp::Lt => msgs.push("strict comparison not rewritten".into()),
                        _ => {}
                    }
                    if let ConceptExpr::Name(id) = &a.concept {
                        if o.is_crisp_concept(*id) {
                            match a.cmp {
                                Cmp::Geq if a.degree != top => {
                                    msgs.push("crisp concept assertion must use degree 1".into())
                                }
                                Cmp::Leq if !a.degree.is_zero() => {
                                    msgs.push("crisp concept upper bound must use degree 0".into())
                                }
                                _ => {}
                            }
                        }
                    }
                }
                Axiom::Role(a) => {
                    check_role(o, &a.role, &mut msgs);
                    check_degree(&o.chain, a.degree, "assertion", &mut msgs);
                    if a.negated {
                        msgs.push("negated role assertion not rewritten".into());
                    }
                    match a.cmp {
                        Cmp::Geq if a.degree.is_zero() => {
                            msgs.push("Geq degree must be positive".into())
                        }
                        Cmp::Leq if a.degree == top => msgs.push("Leq degree must be below 1".into()),
                        Cmp::Gt | Cmp::Lt => msgs.push("strict comparison not rewritten".into()),
                        _ => {}
                    }
                    if let Some(id) = a.role.name_id() {
                        if o.is_crisp_role(id) && !a.negated {
                            match a.cmp {
                                Cmp::Geq if a.degree != top => {
                                    msgs.push("crisp role assertion must use degree 1".into())
                                }
                                Cmp::Leq if !a.degree.is_zero() => {
                                    msgs.push("crisp role upper bound must use degree 0".into())
                                }
                                _ => {}
                            }
                        }
                    }
                }
                Axiom::Eq(..) | Axiom::Neq(..) => {}
                Axiom::Gci(g) => {
                    check_concept(o, &g.lhs, &mut msgs);
                    check_concept(o, &g.rhs, &mut msgs);
                    check_degree(&o.chain, g.degree, "GCI", &mut msgs);
                    match g.cmp {
                        Cmp::Geq if g.degree.is_zero() => {
                            msgs.push("GCI degree must be positive".into())
                        }
                        Cmp::Gt => msgs.push("strict comparison not rewritten".into()),
                        Cmp::Leq | Cmp::Lt => msgs.push("GCI only supports lower bounds".into()),
                        _ => {}
                    }
                }
                Axiom::Ria(r) => {
                    for role in &r.lhs {
                        check_role(o, role, &mut msgs);
                    }
                    check_role(o, &r.rhs, &mut msgs);
                    check_degree(&o.chain, r.degree, "RIA", &mut msgs);
                    if r.lhs.is_empty() {
                        msgs.push("RIA needs at least one role on the left".into());
                    }
                    match r.cmp {
                        Cmp::Geq if r.degree.is_zero() => {
                            msgs.push("RIA degree must be positive".into())
                        }
                        Cmp::Gt => msgs.push("strict comparison not rewritten".into()),
                        Cmp::Leq | Cmp::Lt => msgs.push("RIA only supports lower bounds".into()),
                        _ => {}
                    }
                }
                Axiom::Trans(r) | Axiom::Ref(r) | Axiom::Irr(r) | Axiom::Sym(r) | Axiom::Asy(r) => {
                    check_role(o, r, &mut msgs)
                }
                Axiom::Dis(r1, r2) => {
                    check_role(o, r1, &mut msgs);
                    check_role(o, r2, &mut msgs);
                }
                Axiom::RoleDisj { sub, disjuncts } => {
                    check_role(o, sub, &mut msgs);
                    for r in disjuncts {
                        check_role(o, r, &mut msgs);
                    }
                    if disjuncts.is_empty() {
                        msgs.push("role disjunction needs at least one disjunct".into());
                    }
                }
            }
            report.extend(msgs.into_iter().map(|message| Violation {
                section,
                index,
                message,
            }));
        }
    }
    report
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrictError {
    #[error("{section}[{index}]: strict bound {cmp} {boundary} is unsatisfiable")]
    Unsatisfiable {
        section: Section,
        index: usize,
        cmp: Cmp,
        boundary: &'static str,
    },
}

fn rewrite_cmp(
    chain: &Chain,
    cmp: Cmp,
    d: Degree,
    section: Section,
    index: usize,
) -> Result<Option<(Cmp, Degree)>, StrictError> {
    match cmp {
        Cmp::Geq | Cmp::Leq => Ok(Some((cmp, d))),
        Cmp::Gt => match chain.succ(d) {
            Ok(up) => Ok(Some((Cmp::Geq, up))),
            Err(_) => Err(StrictError::Unsatisfiable {
                section,
                index,
                cmp,
                boundary: "1",
            }),
        },
        Cmp::Lt => match chain.pred(d) {
            Ok(down) => Ok(Some((Cmp::Leq, down))),
            Err(_) => Err(StrictError::Unsatisfiable {
                section,
                index,
                cmp,
                boundary: "0",
            }),
        },
    }
}

/// Eliminates strict bounds (`> d` → `≥ d⁺`, `< d` → `≤ pred(d)`) and negated
/// role assertions. Vacuous negated bounds (`⟨¬r(a,b) ≤ 1⟩`, `⟨¬r(a,b) ≥ 0⟩`)
/// are dropped.
pub fn rewrite_strict(o: &FuzzyOntology) -> Result<FuzzyOntology, StrictError> {
    let mut out = o.clone();
    for (section, axioms) in [
        (Section::Abox, &mut out.abox),
        (Section::Tbox, &mut out.tbox),
        (Section::Rbox, &mut out.rbox),
    ] {
        let mut rewritten = Vec::with_capacity(axioms.len());
        for (index, ax) in axioms.drain(..).enumerate() {
            match ax {
                Axiom::Concept(mut a) => {
                    if let Some((cmp, d)) = rewrite_cmp(&o.chain, a.cmp, a.degree, section, index)? {
                        a.cmp = cmp;
                        a.degree = d;
                        rewritten.push(Axiom::Concept(a));
                    }
                }
                Axiom::Role(mut a) => {
                    let Some((cmp, d)) = rewrite_cmp(&o.chain, a.cmp, a.degree, section, index)? else {
                        continue;
                    };
                    a.cmp = cmp;
                    a.degree = d;
                    if !a.negated {
                        rewritten.push(Axiom::Role(a));
                        continue;
                    }
                    // ⊖ is antitone: ⟨¬r(a,b) ≤ d⟩ becomes a lower bound and
                    // ⟨¬r(a,b) ≥ d⟩ an upper bound on r(a,b).
                    match a.cmp {
                        Cmp::Leq => {
                            if a.degree == o.chain.top() {
                                continue; // vacuous
                            }
                            let bound = o.chain.neg_leq_threshold(a.degree).expect("degree below 1");
                            rewritten.push(Axiom::Role(RoleAssertion {
                                role: a.role,
                                negated: false,
                                from: a.from,
                                to: a.to,
                                cmp: Cmp::Geq,
                                degree: bound,
                            }));
                        }
                        Cmp::Geq => {
                            if a.degree.is_zero() {
                                continue; // vacuous
                            }
                            let bound = o.chain.neg_inv_max(a.degree).expect("degree positive");
                            rewritten.push(Axiom::Role(RoleAssertion {
                                role: a.role,
                                negated: false,
                                from: a.from,
                                to: a.to,
                                cmp: Cmp::Leq,
                                degree: bound,
                            }));
                        }
                        _ => unreachable!("strictness already rewritten"),
                    }
                }
                Axiom::Gci(mut g) => {
                    if let Some((cmp, d)) = rewrite_cmp(&o.chain, g.cmp, g.degree, section, index)? {
                        g.cmp = cmp;
                        g.degree = d;
                        rewritten.push(Axiom::Gci(g));
                    }
                }
                Axiom::Ria(mut r) => {
                    if let Some((cmp, d)) = rewrite_cmp(&o.chain, r.cmp, r.degree, section, index)? {
                        r.cmp = cmp;
                        r.degree = d;
                        rewritten.push(Axiom::Ria(r));
                    }
                }
                other => rewritten.push(other),
            }
        }
        *axioms = rewritten;
    }
    Ok(out)
}

fn concept_occurrences(c: &ConceptExpr, count: &mut dyn FnMut(NameRef)) {
    match c {
        ConceptExpr::Top | ConceptExpr::Bot | ConceptExpr::Nominal(_) => {}
        ConceptExpr::Name(id) => count(NameRef::Concept(*id)),
        ConceptExpr::Not(x) => concept_occurrences(x, count),
        ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => {
            concept_occurrences(a, count);
            concept_occurrences(b, count);
        }
        ConceptExpr::Exists(r, x) | ConceptExpr::Forall(r, x) => {
            role_occurrences(r, count);
            concept_occurrences(x, count);
        }
        ConceptExpr::AtLeast(_, r) | ConceptExpr::AtMost(_, r) | ConceptExpr::SelfLoop(r) => {
            role_occurrences(r, count)
        }
        ConceptExpr::AtLeastQ(_, r, x) | ConceptExpr::AtMostQ(_, r, x) => {
            role_occurrences(r, count);
            concept_occurrences(x, count);
        }
    }
}

fn role_occurrences(r: &RoleExpr, count: &mut dyn FnMut(NameRef)) {
    if let Some(id) = r.name_id() {
        count(NameRef::Role(id));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameRef {
    Concept(ConceptId),
    Role(RoleId),
}

pub fn axiom_occurrences(ax: &Axiom, count: &mut dyn FnMut(NameRef)) {
    match ax {
        Axiom::Concept(a) => concept_occurrences(&a.concept, count),
        Axiom::Role(a) => role_occurrences(&a.role, count),
        Axiom::Eq(..) | Axiom::Neq(..) => {}
        Axiom::Gci(g) => {
            concept_occurrences(&g.lhs, count);
            concept_occurrences(&g.rhs, count);
        }
        Axiom::Ria(r) => {
            for role in &r.lhs {
                role_occurrences(role, count);
            }
            role_occurrences(&r.rhs, count);
        }
        Axiom::Trans(r) | Axiom::Ref(r) | Axiom::Irr(r) | Axiom::Sym(r) | Axiom::Asy(r) => {
            role_occurrences(r, count)
        }
        Axiom::Dis(r1, r2) => {
            role_occurrences(r1, count);
            role_occurrences(r2, count);
        }
        Axiom::RoleDisj { sub, disjuncts } => {
            role_occurrences(sub, count);
            for r in disjuncts {
                role_occurrences(r, count);
            }
        }
    }
}

/// Number of concept/role name occurrences across the axioms (the TBox-size
/// metric).
pub fn occurrences(axioms: &[Axiom]) -> u64 {
    let mut n = 0u64;
    for ax in axioms {
        axiom_occurrences(ax, &mut |_| n += 1);
    }
    n
}

/// Occurrences of names not declared crisp.
pub fn fuzzy_occurrences(ax: &Axiom, crisp_concepts: &[bool], crisp_roles: &[bool]) -> u64 {
    let mut n = 0u64;
    axiom_occurrences(ax, &mut |r| match r {
        NameRef::Concept(id) => {
            if !crisp_concepts.get(id.0 as usize).copied().unwrap_or(false) {
                n += 1;
            }
        }
        NameRef::Role(id) => {
            if !crisp_roles.get(id.0 as usize).copied().unwrap_or(false) {
                n += 1;
            }
        }
    });
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Family;
    use crate::textio;

    fn example1() -> FuzzyOntology {
        textio::parse_ontology(crate::fixtures::EXAMPLE1).unwrap()
    }

    #[test]
    fn example1_is_valid() {
        let o = example1();
        assert!(validate(&o).is_empty(), "{:?}", validate(&o));
        assert_eq!(o.abox.len(), 9);
        assert_eq!(o.tbox.len(), 1);
    }

    #[test]
    fn geq_zero_degree_flagged() {
        let mut o = FuzzyOntology::new(Chain::new(6, Family::Lukasiewicz, None).unwrap());
        let a = o.declare_concept("A", false);
        let x = o.declare_ind("x");
        o.abox.push(Axiom::Concept(ConceptAssertion {
            concept: ConceptExpr::Name(a),
            ind: x,
            cmp: Cmp::Geq,
            degree: Degree(0),
        }));
        let report = validate(&o);
        assert_eq!(report.len(), 1);
        assert!(report[0].message.contains("Geq degree must be positive"));
    }

    #[test]
    fn off_chain_degree_flagged() {
        let mut o = FuzzyOntology::new(Chain::new(6, Family::Lukasiewicz, None).unwrap());
        let a = o.declare_concept("A", false);
        let x = o.declare_ind("x");
        o.abox.push(Axiom::Concept(ConceptAssertion {
            concept: ConceptExpr::Name(a),
            ind: x,
            cmp: Cmp::Geq,
            degree: Degree(9),
        }));
        let report = validate(&o);
        assert!(report.iter().any(|v| v.message.contains("not on chain")));
    }

    #[test]
    fn strict_bounds_rewritten() {
        let mut o = FuzzyOntology::new(Chain::new(6, Family::Lukasiewicz, None).unwrap());
        let a = o.declare_concept("A", false);
        let x = o.declare_ind("x");
        o.abox.push(Axiom::Concept(ConceptAssertion {
            concept: ConceptExpr::Name(a),
            ind: x,
            cmp: Cmp::Gt,
            degree: Degree(4),
        }));
        let out = rewrite_strict(&o).unwrap();
        match &out.abox[0] {
            Axiom::Concept(c) => {
                assert_eq!(c.cmp, Cmp::Geq);
                assert_eq!(c.degree, Degree(5));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(validate(&out).is_empty());
    }

    #[test]
    fn strict_above_top_is_unsatisfiable() {
        let mut o = FuzzyOntology::new(Chain::new(6, Family::Lukasiewicz, None).unwrap());
        let a = o.declare_concept("A", false);
        let x = o.declare_ind("x");
        o.abox.push(Axiom::Concept(ConceptAssertion {
            concept: ConceptExpr::Name(a),
            ind: x,
            cmp: Cmp::Gt,
            degree: Degree(5),
        }));
        assert!(rewrite_strict(&o).is_err());
    }

    #[test]
    fn negated_role_assertion_rewritten() {
        // ⟨¬r(a,b) ≤ 0.4⟩ on the Łukasiewicz chain of 6 → ⟨r(a,b) ≥ 0.6⟩
        let mut o = FuzzyOntology::new(Chain::new(6, Family::Lukasiewicz, None).unwrap());
        let r = o.declare_role("r", false);
        let a = o.declare_ind("a");
        let b = o.declare_ind("b");
        o.abox.push(Axiom::Role(RoleAssertion {
            role: RoleExpr::Name(r),
            negated: true,
            from: a,
            to: b,
            cmp: Cmp::Leq,
            degree: Degree(2),
        }));
        let out = rewrite_strict(&o).unwrap();
        match &out.abox[0] {
            Axiom::Role(ra) => {
                assert!(!ra.negated);
                assert_eq!(ra.cmp, Cmp::Geq);
                assert_eq!(ra.degree, Degree(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negated_role_geq_becomes_upper_bound() {
        let mut o = FuzzyOntology::new(Chain::new(6, Family::Goedel, None).unwrap());
        let r = o.declare_role("r", false);
        let a = o.declare_ind("a");
        let b = o.declare_ind("b");
        o.abox.push(Axiom::Role(RoleAssertion {
            role: RoleExpr::Name(r),
            negated: true,
            from: a,
            to: b,
            cmp: Cmp::Geq,
            degree: Degree(1),
        }));
        let out = rewrite_strict(&o).unwrap();
        match &out.abox[0] {
            Axiom::Role(ra) => {
                assert!(!ra.negated);
                assert_eq!(ra.cmp, Cmp::Leq);
                // Gödel: ⊖x ≥ 0.2 forces x = 0
                assert_eq!(ra.degree, Degree(0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn occurrence_metric_on_example1_gci() {
        let o = example1();
        assert_eq!(occurrences(&o.tbox), 8);
        let gci = &o.tbox[0];
        assert_eq!(fuzzy_occurrences(gci, &o.crisp_concepts, &o.crisp_roles), 3);
        assert_eq!(occurrences(&[]), 0);
    }

    #[test]
    fn occurrences_additive_over_concatenation() {
        let o = example1();
        let all: Vec<Axiom> = o.axioms().cloned().collect();
        assert_eq!(
            occurrences(&all),
            occurrences(&o.abox) + occurrences(&o.tbox) + occurrences(&o.rbox)
        );
        for ax in &all {
            assert!(
                fuzzy_occurrences(ax, &o.crisp_concepts, &o.crisp_roles)
                    <= occurrences(std::slice::from_ref(ax))
            );
        }
    }
}
