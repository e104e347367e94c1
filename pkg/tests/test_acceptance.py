"""Acceptance criteria 1-8.

Each criterion is a function returning ``(passed, detail)``.  Under pytest the
outcome lines are printed in the terminal summary; running this file directly
prints them as well.
"""
import sys
import time

import numpy as np
import pytest
import scipy.linalg as sla

from conftest import NINE_EDGES
from graphgen import (
    conjugated_algebra,
    gluable_pair,
    random_constant_connection,
    random_graph,
    realize,
)
from oracles import random_circuit, reference_names, simulate
from worked_examples import HG_LEVELS, NINE_EXPR, genus_graph
from transportc.calculus import diagonal_algebra, eval_graph, eval_multitangle, matrix_algebra
from transportc.circuits import QUBIT, UNITARIES, Circuit, Register, apply_circuit, standard_gates
from transportc.composition import (
    compose_multitangles,
    disjoint_union,
    glue,
    sources_unit,
    targets_unit,
)
from transportc.expression import Compose, exprs_equivalent, extract_expr
from transportc.graph_model import ExpressionGraph, find_expression_iso, level_order, sources, targets
from transportc.reduction import is_reduced, reduce
from transportc.transport import (
    ConnectionSpec,
    ConstantConnection,
    ConstantGauge,
    ExpGauge,
    Grid,
    PathSpec,
    ProductGauge,
    PureGaugeConnection,
    gauge_act,
    transport,
)

RESULTS: dict[int, tuple[bool, str]] = {}
TITLES = {
    1: "worked examples reproduced",
    2: "compositionality and unitality",
    3: "monoidality",
    4: "transport numerics",
    5: "gauge suite",
    6: "Frobenius oracle",
    7: "quantum end to end",
    8: "reduction invariants",
}


def exp_of(g):
    return extract_expr(reduce(g))


def cmat(rng, n, scale):
    return scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))


def example_h():
    return ExpressionGraph.build(
        [(10, 13), (11, 12), (10, 14), (12, 14), (12, 15), (13, 15), (13, 16)],
        vertices=[str(i) for i in range(10, 17)],
        source_order=["10", "11"],
        out_orders={"10": ["14", "13"], "11": ["12"], "12": ["14", "15"], "13": ["15", "16"]},
    )


def criterion_1():
    t = time.perf_counter()
    nine = ExpressionGraph.build(NINE_EDGES)
    same = exprs_equivalent(exp_of(nine), NINE_EXPR)
    hg = glue(example_h(), nine)
    levels = level_order(hg).levels
    ids = {v.id for v in hg.vertices}
    merged = "10" not in ids and "11" not in ids and ("8", "13") in hg.edges and ("9", "12") in hg.edges
    dt = time.perf_counter() - t
    ok = same and len(hg.vertices) == 14 and levels == HG_LEVELS and len(levels) == 6 and merged and dt < 1
    return ok, (f"nine-vertex expression equivalent={same}; H*G has {len(hg.vertices)} vertices, "
                f"{len(levels)} levels, 8=10 and 9=11: {merged}; {dt:.2f} s")


def criterion_2(pairs=200):
    t = time.perf_counter()
    rng = np.random.default_rng(2)
    equiv = 0
    worst = 0.0
    units = 0
    for _ in range(pairs):
        h, g = gluable_pair(rng, 12)
        if exprs_equivalent(exp_of(glue(h, g)), Compose((exp_of(g), exp_of(h)))):
            equiv += 1
        left, right = glue(g, sources_unit(g)), glue(targets_unit(h), h)
        if find_expression_iso(left, g) is not None and find_expression_iso(right, h) is not None:
            units += 1
        th, tg = realize(h, rng), realize(g, rng)
        alg = conjugated_algebra(diagonal_algebra(2), rng)
        conn = random_constant_connection(rng, 2)
        f = lambda x: eval_graph(x, conn, alg, steps=100).matrix
        want = f(th) @ f(tg)
        worst = max(worst, np.abs(f(glue(th, tg)) - want).max() / max(1.0, np.abs(want).max()))
    dt = time.perf_counter() - t
    ok = equiv == pairs and units == pairs and worst <= 1e-9 and dt < 30
    return ok, (f"{equiv}/{pairs} expressions equivalent, {units}/{pairs} unit laws, "
                f"max numeric error {worst:.1e}; {dt:.1f} s")


def criterion_3(pairs=100):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(pairs):
        g, h = random_graph(rng, 8), random_graph(rng, 8, prefix="w")
        tg, th = realize(g, rng), realize(h, rng)
        alg = conjugated_algebra(diagonal_algebra(2), rng)
        conn = random_constant_connection(rng, 2)
        f = lambda x: eval_graph(x, conn, alg, steps=100).matrix
        want = np.kron(f(tg), f(th))
        worst = max(worst, np.abs(f(disjoint_union(tg, th)) - want).max() / max(1.0, np.abs(want).max()))
    return worst <= 1e-12, f"{pairs} pairs, max error {worst:.1e}"


class _Wavy(ConnectionSpec):
    """Smooth non-constant connection for the groupoid checks."""

    def __init__(self, p, q):
        self.p, self.q, self.dim = p, q, p.shape[0]

    def evaluate(self, xs, ys):
        xs, ys = np.atleast_1d(xs), np.atleast_1d(ys)
        return np.cos(ys)[:, None, None] * self.p, xs[:, None, None] * self.q


def criterion_4(trials=30):
    rng = np.random.default_rng(4)
    expm_err = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 5))
        c = ConstantConnection(cmat(rng, n, 0.5), cmat(rng, n, 0.5))
        p0, p1 = rng.uniform(0, 1, 2), rng.uniform(0, 1, 2)
        d = p1 - p0
        want = sla.expm(-(c.cx * d[0] + c.cy * d[1]))
        got = transport(c, PathSpec.straight(p0, p1), 1000)
        expm_err = max(expm_err, np.linalg.norm(got - want) / np.linalg.norm(want))

    c = ConstantConnection(cmat(rng, 3, 1.5), cmat(rng, 3, 1.5))
    p = PathSpec.straight((0, 0), (0.8, -0.6))
    want = sla.expm(-(c.cx * 0.8 - c.cy * 0.6))
    steps = np.array([10, 20, 40, 80])
    errs = [np.linalg.norm(transport(c, p, s) - want) for s in steps]
    order = -np.polyfit(np.log(steps), np.log(errs), 1)[0]

    group_err = 0.0
    for _ in range(trials):
        w = _Wavy(cmat(rng, 3, 0.5), cmat(rng, 3, 0.5))
        a = PathSpec.polyline(rng.uniform(0.05, 0.95, size=(3, 2)))
        b = PathSpec.polyline(np.vstack([a.end, rng.uniform(0.05, 0.95, size=(2, 2))]))
        ta, tb = transport(w, a, 1000), transport(w, b, 1000)
        group_err = max(group_err,
                        np.abs(transport(w, a.then(b), 2000) - tb @ ta).max(),
                        np.abs(transport(w, a.reversed(), 1000) @ ta - np.eye(3)).max())

    homotopy_err = 0.0
    for _ in range(trials):
        g = ExpGauge(cmat(rng, 2, 0.6), cmat(rng, 2, 0.6))
        pg = PureGaugeConnection(g)
        a, b = rng.uniform(0, 1, 2), rng.uniform(0, 1, 2)
        direct = transport(pg, PathSpec.straight(a, b), 1000)
        detour = transport(pg, PathSpec.polyline([a, rng.uniform(0, 1, 2), b]), 1000)
        homotopy_err = max(homotopy_err, np.abs(direct - detour).max())

    ok = expm_err <= 1e-8 and 3.5 <= order <= 4.5 and group_err <= 1e-7 and homotopy_err <= 1e-5
    return ok, (f"expm rel error {expm_err:.1e}, observed order {order:.2f}, "
                f"concatenation/reversal {group_err:.1e}, pure-gauge homotopy {homotopy_err:.1e}")


def criterion_5(trials=10):
    rng = np.random.default_rng(5)
    unit = (0.0, 1.0, 0.0, 1.0)
    fix = law = cov = 0.0
    for _ in range(trials):
        c = ConstantConnection(cmat(rng, 2, 0.5), cmat(rng, 2, 0.5))
        d = gauge_act(ConstantGauge(np.eye(2)), c)
        fix = max(fix, np.abs(d.cx - c.cx).max(), np.abs(d.cy - c.cy).max())
        coarse = Grid.over(unit, 41)
        s = gauge_act(ExpGauge(cmat(rng, 2, 0.4), cmat(rng, 2, 0.4)), c, coarse)
        ds = gauge_act(ConstantGauge(np.eye(2)), s)
        fix = max(fix, np.abs(ds.ax - s.ax).max(), np.abs(ds.ay - s.ay).max())

        g1 = ExpGauge(cmat(rng, 2, 0.4), cmat(rng, 2, 0.4))
        g2 = ExpGauge(cmat(rng, 2, 0.4), cmat(rng, 2, 0.4))
        a = gauge_act(g2, gauge_act(g1, c, coarse), coarse)
        b = gauge_act(ProductGauge(g2, g1), c, coarse)
        law = max(law, np.abs(a.ax - b.ax).max(), np.abs(a.ay - b.ay).max())

        c = ConstantConnection(cmat(rng, 2, 0.3), cmat(rng, 2, 0.3))
        g = ExpGauge(cmat(rng, 2, 0.2), cmat(rng, 2, 0.2))
        gc = gauge_act(g, c, Grid.over(unit, 501))
        p = PathSpec.polyline(rng.uniform(0.05, 0.95, size=(3, 2)))
        want = g(*p.end) @ transport(c, p) @ np.linalg.inv(g(*p.start))
        cov = max(cov, np.abs(transport(gc, p) - want).max())
    ok = fix <= 1e-12 and law <= 1e-6 and cov <= 1e-6
    return ok, f"identity fixpoint {fix:.1e}, composition law {law:.1e}, covariance {cov:.1e}"


def criterion_6():
    frob = 0.0
    genus = 0.0
    for n in (2, 3):
        alg = matrix_algebra(n)
        frob = max(frob, np.abs(alg.mult @ alg.comult - n * np.eye(n * n)).max())
        for k in (1, 2, 3):
            m = eval_graph(genus_graph(k), ConstantConnection.zero(n * n), alg).matrix
            genus = max(genus, np.abs(m.reshape(n, n) - n**k * np.eye(n)).max())
    return frob <= 1e-12 and genus <= 1e-10, f"m m^dagger - nI {frob:.1e}, genus-k minus n^k I {genus:.1e}"


def criterion_7(circuits=20):
    t = time.perf_counter()
    lib = standard_gates()
    bell = Circuit(2, ((("H", (0,)),), (("CNOT", (0, 1)),)))
    bell_err = np.abs(apply_circuit(bell, Register.parse("00"), lib)
                      - np.array([1, 0, 0, 1]) / np.sqrt(2)).max()
    rng = np.random.default_rng(7)
    sim_err = 0.0
    for _ in range(circuits):
        c = random_circuit(rng, qubits=4, depth=6)
        bits = [int(b) for b in rng.integers(0, 2, 4)]
        got = apply_circuit(c, Register.parse(bits), lib)
        sim_err = max(sim_err, np.abs(got - simulate(reference_names(c), bits, UNITARIES)).max())
    cn = lib["CNOT"].multitangle()
    sq = eval_multitangle(compose_multitangles(cn, cn), None, QUBIT).matrix
    sq_err = np.abs(sq - np.eye(4)).max()
    dt = time.perf_counter() - t
    ok = bell_err <= 1e-7 and sim_err <= 1e-7 and sq_err <= 1e-8 and dt < 60
    return ok, (f"Bell {bell_err:.1e}, {circuits} random 4-qubit depth-6 circuits {sim_err:.1e}, "
                f"CNOT^2 {sq_err:.1e}; {dt:.1f} s")


def criterion_8(graphs=500):
    rng = np.random.default_rng(8)
    good = 0
    for _ in range(graphs):
        g = random_graph(rng, 20)
        r = reduce(g)
        ok = is_reduced(r.graph)
        ok &= sources(r.graph).ids == sources(g).ids
        last = level_order(r.graph).levels[-1] if r.graph.vertices else ()
        ok &= tuple(r.vertex_origin[v] for v in last) == targets(g).ids
        ok &= find_expression_iso(reduce(r.graph).graph, r.graph) is not None
        good += bool(ok)
    return good == graphs, f"{good}/{graphs} graphs reduced, boundary-preserving and idempotent"


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def line(k: int) -> str:
    ok, detail = RESULTS[k]
    return f"criterion {k} ({TITLES[k]}): {'PASS' if ok else 'FAIL'}: {detail}"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    try:
        RESULTS[k] = CRITERIA[k]()
    except Exception as exc:
        RESULTS[k] = (False, f"raised {type(exc).__name__}: {exc}")
    print(line(k))
    assert RESULTS[k][0], line(k)


if __name__ == "__main__":
    failed = 0
    for k, fn in CRITERIA.items():
        RESULTS[k] = fn()
        print(line(k), flush=True)
        failed += not RESULTS[k][0]
    sys.exit(1 if failed else 0)
