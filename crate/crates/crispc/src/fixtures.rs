//! Canonical sample documents shared by the unit, integration, and
//! acceptance suites: a small cloud-monitoring ontology, its explicit
//! interpretation, queries over it, and a number-restriction stress case.

/// Cloud-monitoring ontology: nine ABox facts and one graded GCI over the
/// Łukasiewicz chain of six degrees. `Server`, `CPU`, `Memory`, and
/// `hasPart` are crisp.
pub const EXAMPLE1: &str = "\
chain 6 lukasiewicz
concept Server crisp
concept CPU crisp
concept Memory crisp
concept Overused
concept ServerWithLimitedResources
concept ServerWithAvailableResources
role hasPart crisp
role isConnectedTo
individual serverA
individual serverB
individual cpuA
individual cpuB
individual memA
individual memB
assert Server(serverA) >= 1
assert CPU(cpuA) >= 1
assert Memory(memA) >= 1
assert Overused(cpuA) >= 0.8
assert Overused(memA) >= 1
assert hasPart(serverA,cpuA) >= 1
assert hasPart(serverA,memA) >= 1
assert ServerWithAvailableResources(serverB) >= 0.6
assert isConnectedTo(serverA,serverB) >= 0.8
gci and(and(Server,some(hasPart,and(Overused,CPU))),some(hasPart,and(Overused,Memory))) ServerWithLimitedResources >= 0.8
";

/// The least model of [`EXAMPLE1`]: every table entry is the exact asserted
/// degree; `ServerWithLimitedResources(serverA) = 0.6` is forced by the GCI.
pub const EXAMPLE1_INTERP: &str = "\
elem serverA serverB cpuA cpuB memA memB
ind serverA = serverA
ind serverB = serverB
ind cpuA = cpuA
ind cpuB = cpuB
ind memA = memA
ind memB = memB
concept Server: serverA=1
concept CPU: cpuA=1
concept Memory: memA=1
concept Overused: cpuA=0.8 memA=1
concept ServerWithLimitedResources: serverA=0.6
concept ServerWithAvailableResources: serverB=0.6
role hasPart: (serverA,cpuA)=1 (serverA,memA)=1
role isConnectedTo: (serverA,serverB)=0.8
";

/// Threshold query over connected servers.
pub const QUERY_THRESHOLD: &str = "\
threshold 2
ServerWithLimitedResources(?x1) >= 0.8
isConnectedTo(?x1,?x2) >= 0.6
ServerWithAvailableResources(?x2) >= 0.6
";

/// The same query without thresholds, answered by degree.
pub const QUERY_FUZZY: &str = "\
fuzzy 2
ServerWithLimitedResources(?x1)
isConnectedTo(?x1,?x2)
ServerWithAvailableResources(?x2)
";

/// Part/overuse query used for top-k answering.
pub const QUERY_PARTS_FUZZY: &str = "\
fuzzy 2
hasPart(?x1,?x2)
Overused(?x2)
";

/// Weighted scoring query: servers ranked by a 3:2 blend of CPU and memory
/// overuse.
pub const QUERY_SCORING: &str = "\
scoring 1
Server(?x1)
hasPart(?x1,?y)
CPU(?y)
hasPart(?x1,?z)
Memory(?z)
Overused(?y)
Overused(?z)
score: @1*@2*@3*@4*@5*(3/5*@6+2/5*@7)
";

/// Scoring-query host ontology: the five-degree chain with crisp structure
/// names, as in the weighted-query walkthrough.
pub const SCORING_ONTOLOGY: &str = "\
chain 5 lukasiewicz
concept Server crisp
concept CPU crisp
concept Memory crisp
concept Overused
role hasPart crisp
individual serverA
individual cpuA
individual memA
assert Server(serverA) >= 1
assert CPU(cpuA) >= 1
assert Memory(memA) >= 1
assert hasPart(serverA,cpuA) >= 1
assert hasPart(serverA,memA) >= 1
";

/// Classical six-edge cycle whose satisfiability separates the sound
/// role-partition encoding of number restrictions from the legacy
/// concept-partition one.
pub const EXAMPLE3: &str = "\
chain 2 goedel
role r
individual a
individual b
individual c
assert r(a,a) >= 1
assert r(a,b) >= 1
assert r(b,a) >= 1
assert r(b,c) >= 1
assert r(c,b) >= 1
assert r(c,c) >= 1
neq a b
neq b c
neq a c
gci top atmostq(2,r,top) >= 1
gci top atleastq(2,r,top) >= 1
";
