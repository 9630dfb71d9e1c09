//! Seeded random ontologies, concepts, and queries for the property suites.
//!
//! All generation is deterministic from the seed, so failures reproduce.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{Chain, Degree, Family};
use crate::model::{
    Axiom, Cmp, ConceptAssertion, ConceptExpr, FuzzyOntology, Gci, Ria, RoleAssertion, RoleExpr, RoleId,
};
use crate::queries::{AtomKind, FuzzyCq, QueryVars, Term, ThresholdAtom, ThresholdCq};

#[derive(Debug, Clone)]
pub struct Params {
    pub concepts: u32,
    pub roles: u32,
    pub inds: u32,
    pub chain_sizes: Vec<u32>,
    pub families: Vec<Family>,
    pub max_axioms: u32,
    pub max_depth: u32,
    pub crisp_prob: f64,
    /// Allow qualified number restrictions (the reduction pipelines refuse
    /// them; the oracle does not).
    pub qualified: bool,
}

impl Params {
    /// Small enough that a naive full enumeration over domain 2 stays cheap.
    pub fn tiny() -> Params {
        Params {
            concepts: 2,
            roles: 1,
            inds: 2,
            chain_sizes: vec![2, 3],
            families: vec![Family::Goedel, Family::Lukasiewicz],
            max_axioms: 4,
            max_depth: 2,
            crisp_prob: 0.3,
            qualified: false,
        }
    }

    /// Default size for the correctness property suites.
    pub fn small() -> Params {
        Params {
            concepts: 3,
            roles: 2,
            inds: 2,
            chain_sizes: vec![2, 3, 4, 5, 6],
            families: vec![Family::Goedel, Family::Lukasiewicz],
            max_axioms: 6,
            max_depth: 3,
            crisp_prob: 0.3,
            qualified: false,
        }
    }
}

pub fn random_role(rng: &mut ChaCha8Rng, roles: u32) -> RoleExpr {
    let id = RoleId(rng.gen_range(0..roles));
    match rng.gen_range(0..10) {
        0 => RoleExpr::Universal,
        1..=3 => RoleExpr::Inverse(id),
        _ => RoleExpr::Name(id),
    }
}

pub fn random_concept(rng: &mut ChaCha8Rng, p: &Params, chain: &Chain, depth: u32) -> ConceptExpr {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        match rng.gen_range(0..12) {
            0 => ConceptExpr::Top,
            1 => ConceptExpr::Bot,
            2 => {
                let k = rng.gen_range(1..=2.min(p.inds));
                let entries = (0..k)
                    .map(|_| {
                        (
                            Degree(rng.gen_range(1..chain.size())),
                            crate::model::IndId(rng.gen_range(0..p.inds)),
                        )
                    })
                    .collect();
                ConceptExpr::Nominal(entries)
            }
            3 => ConceptExpr::AtLeast(rng.gen_range(0..3), random_role(rng, p.roles)),
            4 => ConceptExpr::AtMost(rng.gen_range(0..3), random_role(rng, p.roles)),
            5 => ConceptExpr::SelfLoop(random_role(rng, p.roles)),
            _ => ConceptExpr::Name(crate::model::ConceptId(rng.gen_range(0..p.concepts))),
        }
    } else {
        let sub = |rng: &mut ChaCha8Rng| random_concept(rng, p, chain, depth - 1);
        match rng.gen_range(0..(if p.qualified { 7 } else { 5 })) {
            0 => ConceptExpr::not(sub(rng)),
            1 => {
                let a = sub(rng);
                let b = sub(rng);
                ConceptExpr::and(a, b)
            }
            2 => {
                let a = sub(rng);
                let b = sub(rng);
                ConceptExpr::or(a, b)
            }
            3 => ConceptExpr::exists(random_role(rng, p.roles), sub(rng)),
            4 => ConceptExpr::forall(random_role(rng, p.roles), sub(rng)),
            5 => {
                ConceptExpr::AtLeastQ(rng.gen_range(0..3), random_role(rng, p.roles), Box::new(sub(rng)))
            }
            _ => {
                ConceptExpr::AtMostQ(rng.gen_range(0..3), random_role(rng, p.roles), Box::new(sub(rng)))
            }
        }
    }
}

pub fn random_ontology(seed: u64, p: &Params) -> FuzzyOntology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.chain_sizes[rng.gen_range(0..p.chain_sizes.len())];
    let family = p.families[rng.gen_range(0..p.families.len())];
    let chain = Chain::new(n, family, None).expect("valid size");
    let mut o = FuzzyOntology::new(chain);
    for i in 0..p.concepts {
        o.declare_concept(&format!("C{i}"), rng.gen_bool(p.crisp_prob));
    }
    for i in 0..p.roles {
        o.declare_role(&format!("r{i}"), rng.gen_bool(p.crisp_prob));
    }
    for i in 0..p.inds {
        o.declare_ind(&format!("a{i}"));
    }
    let top = o.chain.top();
    let n_axioms = rng.gen_range(1..=p.max_axioms);
    for _ in 0..n_axioms {
        match rng.gen_range(0..10) {
            0 | 1 => {
                let concept = random_concept(&mut rng, p, &o.chain, p.max_depth);
                let ind = crate::model::IndId(rng.gen_range(0..p.inds));
                let crisp = matches!(&concept, ConceptExpr::Name(id) if o.is_crisp_concept(*id));
                let upper = rng.gen_bool(0.25);
                let (cmp, degree) = if upper {
                    (
                        Cmp::Leq,
                        if crisp {
                            Degree(0)
                        } else {
                            Degree(rng.gen_range(0..o.chain.size() - 1))
                        },
                    )
                } else {
                    (
                        Cmp::Geq,
                        if crisp {
                            top
                        } else {
                            Degree(rng.gen_range(1..o.chain.size()))
                        },
                    )
                };
                o.abox.push(Axiom::Concept(ConceptAssertion {
                    concept,
                    ind,
                    cmp,
                    degree,
                }));
            }
            2 | 3 => {
                let id = RoleId(rng.gen_range(0..p.roles));
                let crisp = o.is_crisp_role(id);
                let upper = rng.gen_bool(0.25);
                let (cmp, degree) = if upper {
                    (
                        Cmp::Leq,
                        if crisp {
                            Degree(0)
                        } else {
                            Degree(rng.gen_range(0..o.chain.size() - 1))
                        },
                    )
                } else {
                    (
                        Cmp::Geq,
                        if crisp {
                            top
                        } else {
                            Degree(rng.gen_range(1..o.chain.size()))
                        },
                    )
                };
                o.abox.push(Axiom::Role(RoleAssertion {
                    role: RoleExpr::Name(id),
                    negated: false,
                    from: crate::model::IndId(rng.gen_range(0..p.inds)),
                    to: crate::model::IndId(rng.gen_range(0..p.inds)),
                    cmp,
                    degree,
                }));
            }
            4 => {
                let a = crate::model::IndId(rng.gen_range(0..p.inds));
                let b = crate::model::IndId(rng.gen_range(0..p.inds));
                o.abox.push(if rng.gen_bool(0.5) {
                    Axiom::Eq(a, b)
                } else {
                    Axiom::Neq(a, b)
                });
            }
            5..=7 => {
                let lhs = random_concept(&mut rng, p, &o.chain, p.max_depth);
                let rhs = random_concept(&mut rng, p, &o.chain, p.max_depth);
                let degree = Degree(rng.gen_range(1..o.chain.size()));
                o.tbox.push(Axiom::Gci(Gci {
                    lhs,
                    rhs,
                    cmp: Cmp::Geq,
                    degree,
                }));
            }
            8 => {
                let k = rng.gen_range(1..=2);
                let lhs = (0..k).map(|_| random_role(&mut rng, p.roles)).collect();
                let rhs = random_role(&mut rng, p.roles);
                let degree = Degree(rng.gen_range(1..o.chain.size()));
                o.rbox.push(Axiom::Ria(Ria {
                    lhs,
                    rhs,
                    cmp: Cmp::Geq,
                    degree,
                }));
            }
            _ => {
                let r = random_role(&mut rng, p.roles);
                o.rbox.push(match rng.gen_range(0..6) {
                    0 => Axiom::Trans(r),
                    1 => Axiom::Dis(r, random_role(&mut rng, p.roles)),
                    2 => Axiom::Ref(r),
                    3 => Axiom::Irr(r),
                    4 => Axiom::Sym(r),
                    _ => Axiom::Asy(r),
                });
            }
        }
    }
    o
}

fn random_term(rng: &mut ChaCha8Rng, vars: &mut QueryVars, n_vars: u32, inds: u32) -> Term {
    if rng.gen_bool(0.8) || inds == 0 {
        let v = rng.gen_range(0..n_vars);
        Term::Var(vars.intern(&format!("v{v}")))
    } else {
        Term::Ind(crate::model::IndId(rng.gen_range(0..inds)))
    }
}

fn random_atoms(
    rng: &mut ChaCha8Rng,
    onto: &FuzzyOntology,
    max_atoms: u32,
) -> (QueryVars, Vec<AtomKind>) {
    let mut vars = QueryVars::default();
    let n_vars = rng.gen_range(1..=3);
    let n_atoms = rng.gen_range(1..=max_atoms);
    let n_concepts = onto.sig.concepts.len() as u32;
    let n_roles = onto.sig.roles.len() as u32;
    let n_inds = onto.sig.inds.len() as u32;
    let mut atoms = Vec::new();
    for _ in 0..n_atoms {
        let atom = match rng.gen_range(0..10) {
            0 => {
                let s = random_term(rng, &mut vars, n_vars, n_inds);
                let t = random_term(rng, &mut vars, n_vars, n_inds);
                AtomKind::Eq(s, t)
            }
            1..=5 if n_roles > 0 => {
                let s = random_term(rng, &mut vars, n_vars, n_inds);
                let t = random_term(rng, &mut vars, n_vars, n_inds);
                AtomKind::Role(RoleId(rng.gen_range(0..n_roles)), s, t)
            }
            _ => {
                let t = random_term(rng, &mut vars, n_vars, n_inds);
                AtomKind::Concept(crate::model::ConceptId(rng.gen_range(0..n_concepts)), t)
            }
        };
        atoms.push(atom);
    }
    (vars, atoms)
}

/// Boolean threshold query with valid crisp bounds (crisp atoms at 1).
pub fn random_threshold_query(seed: u64, onto: &FuzzyOntology, max_atoms: u32) -> ThresholdCq {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (vars, atoms) = random_atoms(&mut rng, onto, max_atoms);
    let top = onto.chain.top();
    let atoms = atoms
        .into_iter()
        .map(|atom| {
            let crisp = match &atom {
                AtomKind::Concept(c, _) => onto.is_crisp_concept(*c),
                AtomKind::Role(r, _, _) => onto.is_crisp_role(*r),
                AtomKind::Eq(..) => true,
            };
            let bound = if crisp {
                top
            } else {
                Degree(rng.gen_range(1..onto.chain.size()))
            };
            ThresholdAtom { atom, bound }
        })
        .collect();
    ThresholdCq {
        vars,
        dist: Vec::new(),
        atoms,
    }
}

/// Boolean fuzzy query.
pub fn random_fuzzy_query(seed: u64, onto: &FuzzyOntology, max_atoms: u32) -> FuzzyCq {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9));
    let (vars, atoms) = random_atoms(&mut rng, onto, max_atoms);
    FuzzyCq {
        vars,
        dist: Vec::new(),
        atoms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn random_ontologies_are_valid_and_deterministic() {
        for seed in 0..50u64 {
            let a = random_ontology(seed, &Params::small());
            let b = random_ontology(seed, &Params::small());
            assert_eq!(a, b);
            assert!(validate(&a).is_empty(), "seed {seed}: {:?}", validate(&a));
        }
    }
}
