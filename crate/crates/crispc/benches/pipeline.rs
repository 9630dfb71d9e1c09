//! Sequential vs parallel throughput of the reduction pipeline and the
//! bounded model search.
//!
//! Desk-scale inputs keep per-axiom κ work tiny, so the parallel reduction
//! only reaches parity on larger ABoxes; search sharding pays off on
//! exhaustive (unsatisfiable) spaces where every placement shard must run.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use crispc::bench::{gen_ontology, BenchConfig};
use crispc::chain::Degree;
use crispc::crispify::{crispify, eliminate_qualified_atleast_lhs_extended, CrispifyOptions};
use crispc::exec::Mode;
use crispc::fixtures;
use crispc::model::{Axiom, ConceptExpr, FuzzyOntology, RoleExpr, RoleId};
use crispc::oracle::{search_model, SearchOptions};
use crispc::textio::parse_ontology;

fn modes() -> Vec<(&'static str, Mode)> {
    let mut v = vec![("sequential", Mode::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Mode::Parallel));
    v
}

fn bench_crispify(c: &mut Criterion) {
    let mut group = c.benchmark_group("crispify");
    for (units, divisor) in [(1u32, 10u32), (4, 1)] {
        let cfg = BenchConfig {
            universities: units,
            chain_size: 11,
            seed: 1,
            divisor,
            ..Default::default()
        };
        let onto = gen_ontology(&cfg);
        let axioms = onto.abox.len() + onto.tbox.len() + onto.rbox.len();
        for (name, mode) in modes() {
            let opts = CrispifyOptions {
                mode,
                ..Default::default()
            };
            group.bench_with_input(BenchmarkId::new(name, axioms), &onto, |b, o| {
                b.iter(|| crispify(o, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn six_edge_extended() -> (FuzzyOntology, FuzzyOntology) {
    let o = parse_ontology(fixtures::EXAMPLE3).unwrap();
    let sat = eliminate_qualified_atleast_lhs_extended(&o).unwrap();
    // Capping successors at one contradicts the asserted edges, forcing an
    // exhaustive sweep of every placement shard.
    let mut unsat = sat.clone();
    unsat.tbox.push(Axiom::gci(
        ConceptExpr::Top,
        ConceptExpr::AtMost(1, RoleExpr::Name(RoleId(0))),
        Degree(1),
    ));
    (sat, unsat)
}

fn bench_search(c: &mut Criterion) {
    let (sat, unsat) = six_edge_extended();
    let mut group = c.benchmark_group("search_model");
    for (tag, onto) in [("found", &sat), ("exhausted", &unsat)] {
        for (name, mode) in modes() {
            let opts = SearchOptions {
                max_domain: 3,
                budget: 100_000_000,
                mode,
            };
            group.bench_with_input(BenchmarkId::new(name, tag), onto, |b, o| {
                b.iter(|| search_model(o, &opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_crispify, bench_search);
criterion_main!(benches);
