"""Acceptance criteria; each test records one PASS/FAIL line for the summary."""

import math
from itertools import combinations

import numpy as np
from hypothesis import given, settings, strategies as st

from twinwalk import families as F
from twinwalk.dynamics import amplitudes, check_generalized_fr_at, evolve, probability, scan_max
from twinwalk.graph import WeightedGraph, build_hamiltonian, theta_of, twin_sets
from twinwalk.spectral import decompose, residuals
from twinwalk.transfer import EXACT, analyze_pair, fr_between_twins, periodicity, pgst_between_twins, pst_between_twins

from conftest import ACCEPTANCE_LINES
from corpus import CORPUS, taylor_expm

rng = np.random.default_rng(7)


def record(n: int, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def sd_of(g, kind="adjacency"):
    return decompose(build_hamiltonian(g, kind))


def test_criterion_1_complete_graph_closed_form():
    worst_form, worst_max = 0.0, 0.0
    for m in (2, 3, 5, 8):
        for omega, eta in ((0, 1), (2, 3), (-1, "1/2")):
            g = F.complete(m, omega=omega, eta=eta)
            e = float(g.edges[(0, 1)])
            sd = sd_of(g)
            ts = rng.uniform(0, 50, 200)
            p = np.abs(amplitudes(sd, 0, 1, ts)) ** 2
            worst_form = max(worst_form, float(np.max(np.abs(p - 2 / m**2 * (1 - np.cos(m * e * ts))))))
            grid = np.linspace(0, 2 * math.pi / (m * e), 20001)
            pg = np.abs(amplitudes(sd, 0, 1, grid)) ** 2
            i = int(np.argmax(pg))
            worst_max = max(worst_max, abs(pg[i] - 4 / m**2))
            assert abs(grid[i] - math.pi / (m * e)) < 1e-3
    record(1, worst_form < 1e-9 and worst_max < 1e-6, f"K_m closed form err {worst_form:.1e}, peak err {worst_max:.1e}")


def test_criterion_2_pst_examples():
    cases = [
        ("K2", F.complete(2), "adjacency", 0, 1, math.pi / 2),
        ("P3", F.path(3), "adjacency", 0, 2, math.pi / math.sqrt(2)),
        ("C4", F.cycle(4), "adjacency", 0, 2, math.pi / 2),
        ("K4-e (L)", F.complete_minus_edge(4), "laplacian", 1, 2, math.pi / 2),
    ]
    bad = []
    for name, g, kind, u, v, tau in cases:
        r = pst_between_twins(g, kind, u, v)
        p = probability(evolve(sd_of(g, kind), tau), u, v)
        if not (r.holds and r.confidence == EXACT and math.isclose(r.time, tau, rel_tol=1e-12) and p > 1 - 1e-8):
            bad.append(name)
    record(2, not bad, "PST at pi/2, pi/sqrt(2), pi/2, pi/2" + (f"; failed {bad}" if bad else ""))


def test_criterion_3_cocktail_party():
    bad = []
    for m in range(2, 9):
        g = F.cocktail_party(m)
        ra, rl = (analyze_pair(g, k, 0, 1) for k in ("adjacency", "laplacian"))
        pst, per = ra.verdicts["pst"], ra.verdicts["periodic"]
        ok = pst.holds == (m % 2 == 0) and per.holds and math.isclose(per.time, math.pi)
        if pst.holds:
            ok &= math.isclose(pst.time, math.pi / 2)
        for k in ("periodic", "pst", "pgst", "fr"):
            a, b = ra.verdicts[k], rl.verdicts[k]
            ok &= a.holds == b.holds and (a.time is None) == (b.time is None)
            if a.time is not None:
                ok &= math.isclose(a.time, b.time)
        if not ok:
            bad.append(m)
    record(3, not bad, "CP(m), m=2..8: PST iff m even at pi/2, rho = pi, A and L agree" + (f"; failed m={bad}" if bad else ""))


def test_criterion_4_complete_bipartite():
    bad = []
    for n in range(1, 7):
        g = F.complete_bipartite(2, n)
        r = pst_between_twins(g, "adjacency", 0, 1)
        tau = math.pi / math.sqrt(2 * n)
        p = probability(evolve(sd_of(g), tau), 0, 1)
        if not (r.holds and r.confidence == EXACT and math.isclose(r.time, tau, rel_tol=1e-12) and p > 1 - 1e-8):
            bad.append(n)
    record(4, not bad, "K_{2,n}, n=1..6: PST at pi/sqrt(2n)" + (f"; failed n={bad}" if bad else ""))


def test_criterion_5_complete_minus_edge():
    bad = []
    for m in range(4, 9):
        g = F.complete_minus_edge(m)
        ra = analyze_pair(g, "adjacency", 1, 2)
        v = ra.verdicts
        ok = ra.strongly_cospectral and v["periodic"].holds is False and v["periodic"].confidence == EXACT
        ok &= v["pgst"].holds is True and v["pgst"].confidence == EXACT
        ok &= v["fr"].holds is True and v["fr"].fr is not None and v["fr"].fr.gamma_rational is False
        rl = pst_between_twins(g, "laplacian", 1, 2)
        ok &= rl.holds == (m % 4 == 0) and rl.confidence == EXACT
        if not ok:
            bad.append(m)
    record(5, not bad, "K_m minus an edge, m=4..8: A not periodic, PGST, FR with irrational gamma; L PST iff 4|m" + (f"; failed m={bad}" if bad else ""))


def test_criterion_6_pendant_path():
    g = F.figure2()
    pg = pgst_between_twins(g, "adjacency", 0, 1)
    fr = fr_between_twins(g, "adjacency", 0, 1)
    t, p = scan_max(sd_of(g), 0, 1, 1e4, target=0.99)
    ok = pg.holds is True and pg.confidence == EXACT
    ok &= fr.holds is False and fr.certificate["witness"]["ratio"] == "1 + sqrt(2)"
    ok &= p > 0.99 and t < 1e4
    record(6, ok, f"P3 with two pendants (figure2 family): PGST yes, FR no (ratio 1 + sqrt(2)), scan peak {p:.4f} at t={t:.2f}")


def test_criterion_7_twin_invariants():
    worst = 0.0
    bound_ok = True
    for g in CORPUS.values():
        for kind in ("adjacency", "laplacian"):
            sd = sd_of(g, kind)
            worst = max(worst, *residuals(sd).values())
            for ts in twin_sets(g):
                theta = float(theta_of(ts, g, kind))
                others = [w for w in range(g.n) if w not in ts.vertices]
                for t in rng.uniform(-30, 30, 100):
                    U = evolve(sd, t).matrix
                    for u, v in combinations(ts.vertices, 2):
                        errs = [
                            abs(U[u, u] - U[v, v]),
                            float(np.max(np.abs(U[others, u] - U[others, v]), initial=0)),
                            abs(U[u, u] - U[u, v] - np.exp(1j * t * theta)),
                            max(0.0, 1 - abs(U[u, u]) - abs(U[u, v])),
                        ]
                        worst = max(worst, *errs)
                        if g.n >= 3:
                            p, bound = abs(U[u, v]) ** 2, 1 / (len(ts) - 1)
                            bound_ok &= p <= bound + 1e-12 and (len(ts) < 3 or p < bound)
    record(7, worst < 1e-8 and bound_ok, f"twin identities and projector residuals on the corpus, max deviation {worst:.1e}")


def test_criterion_8_star():
    bad = []
    for n in range(2, 6):
        g = F.star(n)
        c, leaf = periodicity(g, "adjacency", 0), periodicity(g, "adjacency", 1)
        ok = c.holds and math.isclose(c.time, math.pi / math.sqrt(n), rel_tol=1e-12)
        ok &= leaf.holds and math.isclose(leaf.time, 2 * math.pi / math.sqrt(n), rel_tol=1e-12)
        fr = check_generalized_fr_at(evolve(sd_of(g), math.pi / math.sqrt(n)), range(1, n + 1))
        ok &= fr.holds and fr.proper
        if not ok:
            bad.append(n)
    record(8, not bad, "K_{1,n}, n=2..5: center pi/sqrt(n), leaves 2pi/sqrt(n), generalized FR at pi/sqrt(n)" + (f"; failed n={bad}" if bad else ""))


_oracle_worst = [0.0]


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 8))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    w = st.integers(-3, 3).filter(bool)
    return WeightedGraph(n, {p: draw(w) for p in chosen}, draw(st.dictionaries(st.integers(0, n - 1), w, max_size=n)))


@settings(max_examples=80, deadline=None)
@given(small_graphs(), st.sampled_from(["adjacency", "laplacian"]), st.floats(-5, 5))
def test_evolution_matches_taylor_oracle(g, kind, t):
    sd = sd_of(g, kind)
    err = float(np.max(np.abs(evolve(sd, t).matrix - taylor_expm(sd.hamiltonian.matrix, t))))
    _oracle_worst[0] = max(_oracle_worst[0], err)
    assert err < 1e-8


def test_criterion_9_taylor_oracle():
    worst = _oracle_worst[0]
    for g in CORPUS.values():
        if g.n > 8:
            continue
        for kind in ("adjacency", "laplacian"):
            sd = sd_of(g, kind)
            for t in np.linspace(-5, 5, 21):
                worst = max(worst, float(np.max(np.abs(evolve(sd, t).matrix - taylor_expm(sd.hamiltonian.matrix, t)))))
    record(9, worst < 1e-8, f"spectral evolution vs Taylor series, n <= 8, |t| <= 5: max err {worst:.1e}")


def test_criterion_10_no_pst_in_complete_graphs():
    bad = []
    grid = np.arange(0, 2 * math.pi, 1e-3)
    for n in range(3, 11):
        amp = float(np.max(np.abs(amplitudes(sd_of(F.complete(n)), 0, 1, grid))))
        if not amp < 1 - 1 / (8 * n**4 * (n - 1) ** 4):
            bad.append(n)
    record(10, not bad, "K_n, n=3..10: grid max |U_uv| below the separation bound" + (f"; failed n={bad}" if bad else ""))
