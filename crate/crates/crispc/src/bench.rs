//! Synthetic workloads and size measurement.
//!
//! The generator mimics a university-domain benchmark statistically (an
//! EL-with-inverses style TBox at degree 1, graded ABox facts, a
//! configurable share of crisp names); absolute sizes from external corpora
//! are out of scope. The nested family exhibits the exponential growth of
//! unnormalized reduction, measured without materializing the output.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{Chain, Degree};
use crate::crispify::{collapsed_pairs, CrispifyError, FrontKind};
use crate::model::{
    Axiom, Cmp, ConceptAssertion, ConceptExpr, ConceptId, FuzzyOntology, Ria, RoleAssertion, RoleExpr,
    Section,
};
use crate::normalize;
use crate::queries::{AtomKind, QueryVars, Term, ThresholdAtom, ThresholdCq};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub universities: u32,
    pub chain_size: u32,
    pub family: crate::chain::Family,
    /// Percentage of all names (concepts and roles) declared crisp.
    pub crisp_pct: u32,
    pub seed: u64,
    pub concept_assertions_per_unit: u32,
    pub role_assertions_per_unit: u32,
    /// Desk-scale divisor applied to both per-unit counts.
    pub divisor: u32,
}

impl Default for BenchConfig {
    fn default() -> BenchConfig {
        BenchConfig {
            universities: 1,
            chain_size: 7,
            family: crate::chain::Family::Lukasiewicz,
            crisp_pct: 0,
            seed: 1,
            concept_assertions_per_unit: 1300,
            role_assertions_per_unit: 2450,
            divisor: 10,
        }
    }
}

const CONCEPTS: &[&str] = &[
    "University",
    "Department",
    "Faculty",
    "Professor",
    "AssociateProfessor",
    "Lecturer",
    "Chair",
    "Person",
    "Student",
    "GraduateStudent",
    "TeachingAssistant",
    "Course",
    "GraduateCourse",
    "Publication",
    "Organization",
];

const ROLES: &[&str] = &[
    "memberOf",
    "subOrganizationOf",
    "worksFor",
    "headOf",
    "teacherOf",
    "takesCourse",
    "advisor",
    "publicationAuthor",
    "degreeFrom",
];

/// University-style ontology: fixed TBox at degree 1, seeded graded ABox.
pub fn gen_ontology(cfg: &BenchConfig) -> FuzzyOntology {
    let chain = Chain::new(cfg.chain_size, cfg.family, None).expect("valid chain size");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut o = FuzzyOntology::new(chain);

    // Seeded crisp selection over the combined name list.
    let total = CONCEPTS.len() + ROLES.len();
    let mut order: Vec<usize> = (0..total).collect();
    for i in (1..total).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let crisp_count = (total * cfg.crisp_pct as usize) / 100;
    let crisp: Vec<bool> = {
        let mut v = vec![false; total];
        for &ix in order.iter().take(crisp_count) {
            v[ix] = true;
        }
        v
    };
    for (i, name) in CONCEPTS.iter().enumerate() {
        o.declare_concept(name, crisp[i]);
    }
    for (i, name) in ROLES.iter().enumerate() {
        o.declare_role(name, crisp[CONCEPTS.len() + i]);
    }

    let c = |o: &FuzzyOntology, name: &str| {
        ConceptExpr::Name(ConceptId(o.sig.concepts.lookup(name).unwrap()))
    };
    let r = |o: &FuzzyOntology, name: &str| {
        RoleExpr::Name(crate::model::RoleId(o.sig.roles.lookup(name).unwrap()))
    };
    let top = o.chain.top();

    let tbox: Vec<Axiom> = vec![
        Axiom::gci(c(&o, "Professor"), c(&o, "Faculty"), top),
        Axiom::gci(c(&o, "AssociateProfessor"), c(&o, "Professor"), top),
        Axiom::gci(c(&o, "Lecturer"), c(&o, "Faculty"), top),
        Axiom::gci(c(&o, "Faculty"), c(&o, "Person"), top),
        Axiom::gci(c(&o, "Student"), c(&o, "Person"), top),
        Axiom::gci(c(&o, "GraduateStudent"), c(&o, "Student"), top),
        Axiom::gci(c(&o, "TeachingAssistant"), c(&o, "Person"), top),
        Axiom::gci(c(&o, "University"), c(&o, "Organization"), top),
        Axiom::gci(c(&o, "Department"), c(&o, "Organization"), top),
        Axiom::gci(c(&o, "GraduateCourse"), c(&o, "Course"), top),
        Axiom::gci(
            c(&o, "Chair"),
            ConceptExpr::exists(r(&o, "headOf"), c(&o, "Department")),
            top,
        ),
        Axiom::gci(
            ConceptExpr::exists(r(&o, "headOf"), c(&o, "Department")),
            c(&o, "Chair"),
            top,
        ),
        Axiom::gci(
            ConceptExpr::exists(r(&o, "teacherOf"), c(&o, "Course")),
            c(&o, "Faculty"),
            top,
        ),
        Axiom::gci(
            ConceptExpr::exists(r(&o, "takesCourse"), c(&o, "Course")),
            c(&o, "Student"),
            top,
        ),
        Axiom::gci(
            c(&o, "GraduateStudent"),
            ConceptExpr::exists(r(&o, "takesCourse"), c(&o, "GraduateCourse")),
            top,
        ),
        Axiom::gci(
            c(&o, "GraduateStudent"),
            ConceptExpr::exists(r(&o, "advisor"), c(&o, "Professor")),
            top,
        ),
        Axiom::gci(
            ConceptExpr::exists(r(&o, "publicationAuthor"), c(&o, "Person")),
            c(&o, "Publication"),
            top,
        ),
        Axiom::gci(
            ConceptExpr::exists(
                r(&o, "headOf"),
                ConceptExpr::exists(r(&o, "subOrganizationOf"), c(&o, "University")),
            ),
            c(&o, "Chair"),
            top,
        ),
    ];
    o.tbox = tbox;
    o.rbox = vec![
        Axiom::Ria(Ria {
            lhs: vec![r(&o, "worksFor")],
            rhs: r(&o, "memberOf"),
            cmp: Cmp::Geq,
            degree: top,
        }),
        Axiom::Ria(Ria {
            lhs: vec![r(&o, "headOf")],
            rhs: r(&o, "worksFor"),
            cmp: Cmp::Geq,
            degree: top,
        }),
        Axiom::Trans(r(&o, "subOrganizationOf")),
    ];

    let c_count = (cfg.concept_assertions_per_unit / cfg.divisor.max(1)).max(1) as usize;
    let r_count = (cfg.role_assertions_per_unit / cfg.divisor.max(1)).max(1) as usize;
    for u in 0..cfg.universities {
        let univ = o.declare_ind(&format!("univ{u}"));
        let depts: Vec<_> = (0..3).map(|d| o.declare_ind(&format!("dept{u}_{d}"))).collect();
        let profs: Vec<_> = (0..(c_count / 8).max(2))
            .map(|i| o.declare_ind(&format!("prof{u}_{i}")))
            .collect();
        let studs: Vec<_> = (0..(c_count / 4).max(4))
            .map(|i| o.declare_ind(&format!("stud{u}_{i}")))
            .collect();
        let courses: Vec<_> = (0..(c_count / 8).max(2))
            .map(|i| o.declare_ind(&format!("course{u}_{i}")))
            .collect();
        let pubs: Vec<_> = (0..(c_count / 10).max(1))
            .map(|i| o.declare_ind(&format!("pub{u}_{i}")))
            .collect();

        let degree = |o: &FuzzyOntology, crisp: bool, rng: &mut ChaCha8Rng| {
            if crisp {
                o.chain.top()
            } else {
                Degree(rng.gen_range(1..o.chain.size()))
            }
        };

        for k in 0..c_count {
            let (name, ind) = match k % 12 {
                0 => ("University", univ),
                1 => ("Department", depts[k % depts.len()]),
                2 => ("Professor", profs[k % profs.len()]),
                3 => ("AssociateProfessor", profs[k % profs.len()]),
                4 => ("Student", studs[k % studs.len()]),
                5 => ("GraduateStudent", studs[k % studs.len()]),
                6 => ("Course", courses[k % courses.len()]),
                7 => ("GraduateCourse", courses[k % courses.len()]),
                8 => ("Publication", pubs[k % pubs.len()]),
                9 => ("Lecturer", profs[k % profs.len()]),
                10 => ("Chair", profs[0]),
                _ => ("TeachingAssistant", studs[k % studs.len()]),
            };
            let id = ConceptId(o.sig.concepts.lookup(name).unwrap());
            let d = degree(&o, o.is_crisp_concept(id), &mut rng);
            o.abox.push(Axiom::Concept(ConceptAssertion {
                concept: ConceptExpr::Name(id),
                ind,
                cmp: Cmp::Geq,
                degree: d,
            }));
        }
        for k in 0..r_count {
            let (name, from, to) = match k % 10 {
                0 => ("memberOf", profs[k % profs.len()], depts[k % depts.len()]),
                1 => ("memberOf", studs[k % studs.len()], depts[k % depts.len()]),
                2 => ("subOrganizationOf", depts[k % depts.len()], univ),
                3 => ("worksFor", profs[k % profs.len()], depts[k % depts.len()]),
                4 => ("headOf", profs[0], depts[0]),
                5 => ("teacherOf", profs[k % profs.len()], courses[k % courses.len()]),
                6 => ("takesCourse", studs[k % studs.len()], courses[k % courses.len()]),
                7 => ("advisor", studs[k % studs.len()], profs[k % profs.len()]),
                8 => ("publicationAuthor", pubs[k % pubs.len()], profs[k % profs.len()]),
                _ => ("degreeFrom", profs[k % profs.len()], univ),
            };
            let id = crate::model::RoleId(o.sig.roles.lookup(name).unwrap());
            let d = degree(&o, o.is_crisp_role(id), &mut rng);
            o.abox.push(Axiom::Role(RoleAssertion {
                role: RoleExpr::Name(id),
                negated: false,
                from,
                to,
                cmp: Cmp::Geq,
                degree: d,
            }));
        }
    }
    o
}

/// One GCI with alternating ⊓/∃ nesting of the given depth over fuzzy names:
/// the unnormalized reduction grows exponentially in the depth, the
/// normalized one linearly.
pub fn gen_nested_family(depth: u32, chain: Chain) -> FuzzyOntology {
    assert!(depth >= 1, "depth must be at least 1");
    let mut o = FuzzyOntology::new(chain);
    let root = o.declare_concept("Root", false);
    let f: Vec<ConceptId> = (0..=depth)
        .map(|i| o.declare_concept(&format!("F{i}"), false))
        .collect();
    let roles: Vec<_> = (0..(depth / 2 + 1))
        .map(|i| o.declare_role(&format!("s{i}"), false))
        .collect();
    let mut cur = ConceptExpr::and(ConceptExpr::Name(f[0]), ConceptExpr::Name(f[1]));
    for k in 2..=depth {
        cur = if k % 2 == 0 {
            ConceptExpr::exists(RoleExpr::Name(roles[(k / 2 - 1) as usize]), cur)
        } else {
            ConceptExpr::and(ConceptExpr::Name(f[(k.div_ceil(2) + 1) as usize]), cur)
        };
    }
    o.tbox
        .push(Axiom::gci(ConceptExpr::Name(root), cur, o.chain.top()));
    o
}

/// Star-, chain-, and triangle-shaped threshold queries with every atom at
/// the chain's smallest positive degree.
pub fn make_threshold_queries(o: &FuzzyOntology) -> Vec<ThresholdCq> {
    let bound = Degree(1);
    let concept = |name: &str| ConceptId(o.sig.concepts.lookup(name).expect("generated signature"));
    let role = |name: &str| crate::model::RoleId(o.sig.roles.lookup(name).expect("generated signature"));
    let mut queries = Vec::new();

    let mut vars = QueryVars::default();
    let (x1, x2) = (vars.intern("x1"), vars.intern("x2"));
    queries.push(ThresholdCq {
        vars,
        dist: vec![x1, x2],
        atoms: vec![
            ThresholdAtom {
                atom: AtomKind::Concept(concept("Student"), Term::Var(x1)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Role(role("takesCourse"), Term::Var(x1), Term::Var(x2)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Concept(concept("Course"), Term::Var(x2)),
                bound,
            },
        ],
    });

    let mut vars = QueryVars::default();
    let (x1, x2, x3) = (vars.intern("x1"), vars.intern("x2"), vars.intern("x3"));
    queries.push(ThresholdCq {
        vars,
        dist: vec![x1, x2, x3],
        atoms: vec![
            ThresholdAtom {
                atom: AtomKind::Concept(concept("Professor"), Term::Var(x1)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Role(role("worksFor"), Term::Var(x1), Term::Var(x2)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Concept(concept("Department"), Term::Var(x2)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Role(role("subOrganizationOf"), Term::Var(x2), Term::Var(x3)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Concept(concept("University"), Term::Var(x3)),
                bound,
            },
        ],
    });

    let mut vars = QueryVars::default();
    let (x1, x2, x3) = (vars.intern("x1"), vars.intern("x2"), vars.intern("x3"));
    queries.push(ThresholdCq {
        vars,
        dist: vec![x1, x2, x3],
        atoms: vec![
            ThresholdAtom {
                atom: AtomKind::Concept(concept("Student"), Term::Var(x1)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Role(role("advisor"), Term::Var(x1), Term::Var(x2)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Concept(concept("Professor"), Term::Var(x2)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Role(role("teacherOf"), Term::Var(x2), Term::Var(x3)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Concept(concept("Course"), Term::Var(x3)),
                bound,
            },
            ThresholdAtom {
                atom: AtomKind::Role(role("takesCourse"), Term::Var(x1), Term::Var(x3)),
                bound,
            },
        ],
    });

    queries
}

// ---------------------------------------------------------------------------
// Size measurement without materialization

/// Name occurrences of the classical output, split by section (linking
/// axioms included). Computed by a memoized recurrence over the reduction
/// rules, so exponential unnormalized outputs are countable without being
/// built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalSizes {
    pub abox: u64,
    pub tbox: u64,
    pub rbox: u64,
}

impl ClassicalSizes {
    pub fn total(&self) -> u64 {
        self.abox + self.tbox + self.rbox
    }
}

struct SizeCounter<'a> {
    o: &'a FuzzyOntology,
    occ_memo: HashMap<(ConceptExpr, Degree), u64>,
    leaves_memo: HashMap<(ConceptExpr, Degree), u64>,
}

fn role_occ(r: &RoleExpr) -> u64 {
    match r {
        RoleExpr::Universal => 0,
        _ => 1,
    }
}

impl<'a> SizeCounter<'a> {
    /// Occurrences in ρ(C, ≥ d).
    fn rho_occ(&mut self, c: &ConceptExpr, d: Degree) -> Result<u64, CrispifyError> {
        if let Some(&v) = self.occ_memo.get(&(c.clone(), d)) {
            return Ok(v);
        }
        let chain = &self.o.chain;
        let v = match c {
            ConceptExpr::Top | ConceptExpr::Bot | ConceptExpr::Nominal(_) => 0,
            ConceptExpr::Name(_) => 1,
            ConceptExpr::Not(x) => {
                let strict = chain
                    .succ(chain.neg_inv_max(d).expect("positive"))
                    .expect("below 1");
                self.rho_occ(x, strict)?
            }
            ConceptExpr::And(p, q) | ConceptExpr::Or(p, q) => {
                let kind = if matches!(c, ConceptExpr::And(..)) {
                    FrontKind::Conj
                } else {
                    FrontKind::Disj
                };
                let pairs =
                    collapsed_pairs(chain, d, kind, self.o.is_crisp_expr(p), self.o.is_crisp_expr(q));
                let mut sum = 0;
                for (d1, d2) in pairs {
                    if !d1.is_zero() {
                        sum += self.rho_occ(p, d1)?;
                    }
                    if !d2.is_zero() {
                        sum += self.rho_occ(q, d2)?;
                    }
                }
                sum
            }
            ConceptExpr::Exists(r, x) => {
                let pairs = collapsed_pairs(
                    chain,
                    d,
                    FrontKind::Conj,
                    self.o.is_crisp_role_expr(r),
                    self.o.is_crisp_expr(x),
                );
                let mut sum = 0;
                for (_, d2) in pairs {
                    sum += role_occ(r) + self.rho_occ(x, d2)?;
                }
                sum
            }
            ConceptExpr::Forall(r, x) => {
                let pairs = collapsed_pairs(
                    chain,
                    d,
                    FrontKind::Impl,
                    self.o.is_crisp_role_expr(r),
                    self.o.is_crisp_expr(x),
                );
                let mut sum = 0;
                for (_, d2) in pairs {
                    let strict = chain.succ(d2).expect("below 1");
                    sum += role_occ(r) + self.rho_occ(x, strict)?;
                }
                sum
            }
            ConceptExpr::AtLeast(_, r) | ConceptExpr::AtMost(_, r) | ConceptExpr::SelfLoop(r) => {
                role_occ(r)
            }
            ConceptExpr::AtLeastQ(..) | ConceptExpr::AtMostQ(..) => {
                return Err(CrispifyError::QualifiedRestriction {
                    section: Section::Tbox,
                    index: 0,
                })
            }
        };
        self.occ_memo.insert((c.clone(), d), v);
        Ok(v)
    }

    /// Number of top-level disjuncts of ρ(C, ≥ d) — the GCI split factor.
    fn rho_leaves(&mut self, c: &ConceptExpr, d: Degree) -> Result<u64, CrispifyError> {
        if let Some(&v) = self.leaves_memo.get(&(c.clone(), d)) {
            return Ok(v);
        }
        let chain = &self.o.chain;
        let v = match c {
            ConceptExpr::And(p, q) | ConceptExpr::Or(p, q) => {
                let kind = if matches!(c, ConceptExpr::And(..)) {
                    FrontKind::Conj
                } else {
                    FrontKind::Disj
                };
                let pairs =
                    collapsed_pairs(chain, d, kind, self.o.is_crisp_expr(p), self.o.is_crisp_expr(q));
                let mut sum = 0;
                for (d1, d2) in pairs {
                    sum += if d1.is_zero() {
                        self.rho_leaves(q, d2)?
                    } else if d2.is_zero() {
                        self.rho_leaves(p, d1)?
                    } else {
                        1
                    };
                }
                sum
            }
            ConceptExpr::Exists(r, x) => collapsed_pairs(
                chain,
                d,
                FrontKind::Conj,
                self.o.is_crisp_role_expr(r),
                self.o.is_crisp_expr(x),
            )
            .len() as u64,
            _ => 1,
        };
        self.leaves_memo.insert((c.clone(), d), v);
        Ok(v)
    }

    fn kappa_sizes(&mut self, ax: &Axiom) -> Result<(Section, u64), CrispifyError> {
        let chain = &self.o.chain;
        match ax {
            Axiom::Concept(a) => {
                let d = match a.cmp {
                    Cmp::Geq => a.degree,
                    _ => chain.succ(a.degree).expect("upper bounds stay below 1"),
                };
                Ok((Section::Abox, self.rho_occ(&a.concept, d)?))
            }
            Axiom::Role(a) => Ok((Section::Abox, role_occ(&a.role))),
            Axiom::Eq(..) | Axiom::Neq(..) => Ok((Section::Abox, 0)),
            Axiom::Gci(g) => {
                let pairs = collapsed_pairs(
                    chain,
                    g.degree,
                    FrontKind::Impl,
                    self.o.is_crisp_expr(&g.lhs),
                    self.o.is_crisp_expr(&g.rhs),
                );
                let mut sum = 0;
                for (d1, d2) in pairs {
                    let strict = chain.succ(d2).expect("below 1");
                    let rhs = self.rho_occ(&g.rhs, strict)?;
                    sum += self.rho_occ(&g.lhs, d1)? + self.rho_leaves(&g.lhs, d1)? * rhs;
                }
                Ok((Section::Tbox, sum))
            }
            Axiom::Ria(r) => match r.lhs.len() {
                1 => {
                    let pairs = collapsed_pairs(
                        chain,
                        r.degree,
                        FrontKind::Impl,
                        self.o.is_crisp_role_expr(&r.lhs[0]),
                        self.o.is_crisp_role_expr(&r.rhs),
                    );
                    Ok((
                        Section::Rbox,
                        pairs.len() as u64 * (role_occ(&r.lhs[0]) + role_occ(&r.rhs)),
                    ))
                }
                2 => {
                    let per = role_occ(&r.lhs[0]) + role_occ(&r.lhs[1]) + role_occ(&r.rhs);
                    let triples = crate::crispify::collapsed_ria_triples(
                        chain,
                        r.degree,
                        self.o.is_crisp_role_expr(&r.lhs[0]),
                        self.o.is_crisp_role_expr(&r.lhs[1]),
                        self.o.is_crisp_role_expr(&r.rhs),
                    );
                    Ok((Section::Rbox, triples.len() as u64 * per))
                }
                _ => Err(CrispifyError::RiaTooLong {
                    section: Section::Rbox,
                    index: 0,
                }),
            },
            Axiom::Trans(r) => {
                let ria = Ria {
                    lhs: vec![r.clone(), r.clone()],
                    rhs: r.clone(),
                    cmp: Cmp::Geq,
                    degree: chain.top(),
                };
                self.kappa_sizes(&Axiom::Ria(ria))
            }
            Axiom::Sym(r) => {
                let ria = Ria {
                    lhs: vec![r.clone()],
                    rhs: r.clone(),
                    cmp: Cmp::Geq,
                    degree: chain.top(),
                };
                self.kappa_sizes(&Axiom::Ria(ria))
            }
            Axiom::Dis(r1, r2) => Ok((Section::Rbox, role_occ(r1) + role_occ(r2))),
            Axiom::Ref(r) | Axiom::Irr(r) | Axiom::Asy(r) => Ok((Section::Rbox, role_occ(r))),
            Axiom::RoleDisj { sub, disjuncts } => {
                let per = role_occ(sub) + disjuncts.iter().map(role_occ).sum::<u64>();
                Ok((Section::Rbox, u64::from(chain.size() - 1) * per))
            }
        }
    }
}

/// Counts the classical output's occurrences without building it. Exact for
/// inputs whose κ images contain no duplicate members (distinct names per
/// operand position), which covers the generated workloads.
pub fn crispified_sizes(o: &FuzzyOntology, normalized: bool) -> Result<ClassicalSizes, CrispifyError> {
    let prepared;
    let source = if normalized {
        prepared = normalize::normalize(o, true)?.onto;
        &prepared
    } else {
        o
    };
    let n = u64::from(source.chain.size());
    let mut sizes = ClassicalSizes {
        abox: 0,
        tbox: 0,
        rbox: 0,
    };
    // Linking chains contribute two occurrences per consecutive cut pair.
    let fuzzy_concepts = source.crisp_concepts.iter().filter(|&&c| !c).count() as u64;
    let fuzzy_roles = source.crisp_roles.iter().filter(|&&c| !c).count() as u64;
    sizes.tbox += fuzzy_concepts * (n - 2) * 2;
    sizes.rbox += fuzzy_roles * (n - 2) * 2;

    let mut counter = SizeCounter {
        o: source,
        occ_memo: HashMap::new(),
        leaves_memo: HashMap::new(),
    };
    for (_, axioms) in source.sections() {
        for ax in axioms {
            let (section, occ) = counter.kappa_sizes(ax)?;
            match section {
                Section::Abox => sizes.abox += occ,
                Section::Tbox => sizes.tbox += occ,
                Section::Rbox => sizes.rbox += occ,
            }
        }
    }
    Ok(sizes)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureRow {
    pub chain: u32,
    pub normalized: bool,
    pub crisp_pct: u32,
    pub tbox_occurrences: u64,
    pub abox_occurrences: u64,
    pub gen_seed: u64,
}

/// Occurrence report for the crispified ontology, normalized and not.
/// The terminological count covers concept and role axioms alike.
pub fn measure(o: &FuzzyOntology, crisp_pct: u32, seed: u64) -> Result<Vec<MeasureRow>, CrispifyError> {
    let mut rows = Vec::new();
    for normalized in [false, true] {
        let sizes = crispified_sizes(o, normalized)?;
        rows.push(MeasureRow {
            chain: o.chain.size(),
            normalized,
            crisp_pct,
            tbox_occurrences: sizes.tbox + sizes.rbox,
            abox_occurrences: sizes.abox,
            gen_seed: seed,
        });
    }
    Ok(rows)
}

pub fn csv_report(rows: &[MeasureRow]) -> String {
    let mut out =
        String::from("chain,normalized,crisp_pct,tbox_occurrences,abox_occurrences,gen_seed\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.chain, r.normalized, r.crisp_pct, r.tbox_occurrences, r.abox_occurrences, r.gen_seed
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Family;
    use crate::crispify::{crispify, CrispifyOptions};
    use crate::model::{occurrences, validate};

    #[test]
    fn generation_is_deterministic() {
        let cfg = BenchConfig {
            chain_size: 3,
            seed: 7,
            ..Default::default()
        };
        let a = gen_ontology(&cfg);
        let b = gen_ontology(&cfg);
        assert_eq!(a, b);
        assert!(validate(&a).is_empty());
    }

    #[test]
    fn chain3_degrees_are_half_or_one() {
        let cfg = BenchConfig {
            chain_size: 3,
            seed: 7,
            ..Default::default()
        };
        let o = gen_ontology(&cfg);
        for ax in &o.abox {
            let d = match ax {
                Axiom::Concept(a) => a.degree,
                Axiom::Role(a) => a.degree,
                _ => continue,
            };
            assert!(d == Degree(1) || d == Degree(2));
        }
    }

    #[test]
    fn fully_crisp_degrees_are_one_and_size_is_chain_independent() {
        let mk = |chain_size| BenchConfig {
            chain_size,
            crisp_pct: 100,
            seed: 3,
            ..Default::default()
        };
        let o3 = gen_ontology(&mk(3));
        for ax in &o3.abox {
            let d = match ax {
                Axiom::Concept(a) => a.degree,
                Axiom::Role(a) => a.degree,
                _ => continue,
            };
            assert_eq!(d, o3.chain.top());
        }
        let o7 = gen_ontology(&mk(7));
        let s3 = crispified_sizes(&o3, true).unwrap();
        let s7 = crispified_sizes(&o7, true).unwrap();
        assert_eq!(s3.tbox + s3.rbox, s7.tbox + s7.rbox);
    }

    #[test]
    fn abox_occurrences_survive_crispification_one_to_one() {
        let cfg = BenchConfig {
            chain_size: 7,
            seed: 5,
            ..Default::default()
        };
        let o = gen_ontology(&cfg);
        let sizes = crispified_sizes(&o, true).unwrap();
        assert_eq!(sizes.abox, occurrences(&o.abox));
        let out = crispify(&o, &CrispifyOptions::default()).unwrap();
        assert_eq!(occurrences(&out.classical.onto.abox), occurrences(&o.abox));
    }

    #[test]
    fn size_counter_matches_materialized_output() {
        let chain = Chain::new(4, Family::Lukasiewicz, None).unwrap();
        for depth in 1..=4 {
            let o = gen_nested_family(depth, chain.clone());
            for normalized in [false, true] {
                let opts = CrispifyOptions {
                    normalize: normalized,
                    ..Default::default()
                };
                let out = crispify(&o, &opts).unwrap();
                let got = crispified_sizes(&o, normalized).unwrap();
                let want_abox = occurrences(&out.classical.onto.abox);
                let want_tbox = occurrences(&out.classical.onto.tbox);
                let want_rbox = occurrences(&out.classical.onto.rbox);
                assert_eq!(got.abox, want_abox, "depth {depth} normalized {normalized}");
                assert_eq!(got.tbox, want_tbox, "depth {depth} normalized {normalized}");
                assert_eq!(got.rbox, want_rbox, "depth {depth} normalized {normalized}");
            }
        }
    }

    #[test]
    fn size_counter_matches_on_generated_workload() {
        let cfg = BenchConfig {
            chain_size: 3,
            seed: 11,
            divisor: 100,
            ..Default::default()
        };
        let o = gen_ontology(&cfg);
        let out = crispify(&o, &CrispifyOptions::default()).unwrap();
        let got = crispified_sizes(&o, true).unwrap();
        assert_eq!(got.abox, occurrences(&out.classical.onto.abox));
        assert_eq!(got.tbox, occurrences(&out.classical.onto.tbox));
        assert_eq!(got.rbox, occurrences(&out.classical.onto.rbox));
    }

    #[test]
    fn nested_family_shows_the_blowup() {
        let chain = Chain::new(6, Family::Lukasiewicz, None).unwrap();
        let mut prev_ratio = 0.0f64;
        for depth in 2..=7 {
            let o = gen_nested_family(depth, chain.clone());
            let un = crispified_sizes(&o, false).unwrap().total() as f64;
            let norm = crispified_sizes(&o, true).unwrap().total() as f64;
            let ratio = un / norm;
            if depth >= 4 {
                assert!(ratio > prev_ratio, "depth {depth}: ratio {ratio} <= {prev_ratio}");
            }
            prev_ratio = ratio;
        }
        // normalized beats unnormalized from moderate depth on
        let o = gen_nested_family(5, chain);
        let un = crispified_sizes(&o, false).unwrap().total();
        let norm = crispified_sizes(&o, true).unwrap().total();
        assert!(norm < un, "normalized {norm} vs unnormalized {un}");
    }

    #[test]
    fn scaling_is_linear_in_units() {
        let mk = |units| BenchConfig {
            universities: units,
            chain_size: 3,
            seed: 2,
            ..Default::default()
        };
        let one = gen_ontology(&mk(1));
        let three = gen_ontology(&mk(3));
        assert_eq!(3 * occurrences(&one.abox), occurrences(&three.abox));
    }

    #[test]
    fn queries_use_smallest_positive_degree() {
        for chain_size in [3, 7, 11] {
            let cfg = BenchConfig {
                chain_size,
                seed: 1,
                ..Default::default()
            };
            let o = gen_ontology(&cfg);
            for q in make_threshold_queries(&o) {
                for atom in &q.atoms {
                    assert_eq!(atom.bound, Degree(1));
                }
            }
        }
    }
}
