import pytest

from hsmc import parse_kripke

# two states, p / q, complete transition relation
K2_TEXT = """\
states: v0 v1
init: v0
label v0: p
label v1: q
edges: v0->v0 v0->v1 v1->v0 v1->v1
"""

# four unlabelled states with self loops on v0, v2, v3; the contraction example
FIG4_TEXT = """\
states: v0 v1 v2 v3
init: v0
edges: v0->v0 v0->v1 v0->v2 v1->v2 v1->v3 v2->v1 v2->v2 v2->v3 v3->v2 v3->v3
"""

# round-robin-ish scheduler over three processes; ui is the post-service state
SCHED_TEXT = """\
states: v0 v1 v2 v3 u1 u2 u3
init: v0
label v1: p1
label u1: p1
label v2: p2
label u2: p2
label v3: p3
label u3: p3
edges: v0->v1 v0->v2 v0->v3 v1->u1 v2->u2 v3->u3 u1->v2 u1->v3 u2->v1 u2->v3 u3->v1 u3->v2
"""

# scheduler and two request/execute processes with a faulty joint-grant path
MUTEX_TEXT = """\
states: w0 w1 w2 w3 w4 w5 w6 w7 w8 w9
init: w0
label w0: x0
label w1: r0 x0
label w2: r1
label w3: r0 r1
label w4: r0 r1 e1
label w5: e1
label w6: r0 r1 e0 x0
label w7: e0 x0
label w8: r0 r1 e0 e1
label w9: e0 e1
edges: w0->w0 w0->w1 w0->w2 w1->w1 w1->w3 w1->w6 w2->w2 w2->w3 w2->w4 w3->w4 w3->w6 w3->w8 w4->w5 w5->w0 w6->w7 w7->w0 w8->w9 w9->w0
"""

# the 29-state walk with a triple-level-indistinguishable pair, and the
# shorter walk the unraveller yields in its place
LONG_WALK = (
    "v0 v1 v2 v3 v3 v2 v3 v3 v2 v3 v2 v3 v3 v2 "
    "v3 v2 v1 v3 v2 v3 v2 v1 v2 v1 v3 v2 v2 v3 v2"
)
CONTRACTED_WALK = "v0 v1 v2 v3 v3 v2 v3 v3 v2 v3 v2 v3 v2 v1 v3 v2 v3 v2 v1 v2 v1 v3 v2"


@pytest.fixture(scope="session")
def k2():
    return parse_kripke(K2_TEXT)


@pytest.fixture(scope="session")
def fig4():
    return parse_kripke(FIG4_TEXT)


@pytest.fixture(scope="session")
def sched():
    return parse_kripke(SCHED_TEXT)


@pytest.fixture(scope="session")
def mutex():
    return parse_kripke(MUTEX_TEXT)
