import json
import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from twinwalk import families as F
from twinwalk.dynamics import (
    amplitudes,
    check_fr_at,
    check_generalized_fr_at,
    check_periodic_at,
    check_pst_at,
    evolve,
    local_uniform_mixing_at,
    mixing_matrix,
    probability,
    scan_max,
    sweep_trace,
    walks_equivalent_at_vertex,
)
from twinwalk.graph import build_hamiltonian, theta_of, twin_sets
from twinwalk.spectral import decompose

from corpus import CORPUS, taylor_expm

rng = np.random.default_rng(20240601)
KINDS = ("adjacency", "laplacian")


def sd_of(g, kind="adjacency"):
    return decompose(build_hamiltonian(g, kind))


def test_taylor_oracle_agrees_with_scipy():
    m = build_hamiltonian(F.figure2(), "adjacency").matrix
    assert np.allclose(taylor_expm(m, 3.7), expm(1j * 3.7 * m), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(CORPUS)), st.sampled_from(KINDS), st.floats(-5, 5))
def test_evolve_matches_taylor_oracle(name, kind, t):
    g = CORPUS[name]
    sd = sd_of(g, kind)
    assert np.max(np.abs(evolve(sd, t).matrix - taylor_expm(sd.hamiltonian.matrix, t))) < 1e-8


def test_unitary_and_symmetric():
    for g in CORPUS.values():
        for kind in KINDS:
            sd = sd_of(g, kind)
            for t in rng.uniform(-50, 50, 50):
                U = evolve(sd, t)
                assert U.unitarity_error() < 1e-9 and U.symmetry_error() < 1e-9


def test_twin_identities_on_corpus():
    for g in CORPUS.values():
        for kind in KINDS:
            sd = sd_of(g, kind)
            for ts in twin_sets(g):
                theta = float(theta_of(ts, g, kind))
                others = [w for w in range(g.n) if w not in ts.vertices]
                for t in rng.uniform(-20, 20, 20):
                    U = evolve(sd, t).matrix
                    for u, v in combinations(ts.vertices, 2):
                        assert abs(U[u, u] - U[v, v]) < 1e-8
                        assert np.max(np.abs(U[others, u] - U[others, v]), initial=0) < 1e-8
                        assert abs(U[u, u] - U[u, v] - np.exp(1j * t * theta)) < 1e-8
                        assert abs(U[u, u]) + abs(U[u, v]) >= 1 - 1e-8
                        # the twin transposition is an automorphism
                        assert abs(U[u, u] - U[v, v]) < 1e-8 and abs(U[u, v] - U[v, u]) < 1e-8
                        if g.n >= 3:
                            bound = 1 / (len(ts) - 1)
                            p = abs(U[u, v]) ** 2
                            assert p <= bound + 1e-12
                            if len(ts) >= 3:
                                assert p < bound


@pytest.mark.parametrize("m", [2, 3, 5])
@pytest.mark.parametrize("omega,eta", [(0, 1), (2, 3), (-1, "1/2")])
def test_complete_graph_closed_form(m, omega, eta):
    g = F.complete(m, omega=omega, eta=eta)
    e = float(g.edges[(0, 1)])
    sd = sd_of(g)
    ts = rng.uniform(0, 20, 50)
    p = np.abs(amplitudes(sd, 0, 1, ts)) ** 2
    assert np.max(np.abs(p - 2 / m**2 * (1 - np.cos(m * e * ts)))) < 1e-9


def test_checks_at_known_times():
    sd = sd_of(F.path(3))
    tau = math.pi / math.sqrt(2)
    U = evolve(sd, tau)
    assert check_pst_at(U, 0, 2).holds
    assert check_periodic_at(evolve(sd, 2 * tau), 0).holds
    fr = check_fr_at(U, 0, 2)
    assert fr.holds and fr.proper and not fr.balanced
    near = check_pst_at(evolve(sd, tau * (1 + 1e-4)), 0, 2)
    assert not near.holds and near.marginal
    with pytest.raises(ValueError):
        check_pst_at(U, 1, 1)
    with pytest.raises(ValueError):
        check_fr_at(U, 1, 1)


def test_balanced_fr_on_cocktail_party():
    sd = sd_of(F.cocktail_party(4))
    r = check_fr_at(evolve(sd, math.pi / 4), 0, 1)
    assert r.holds and r.balanced and r.proper
    assert abs(probability(evolve(sd, math.pi / 4), 0, 1) - 0.5) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_generalized_fr_on_star_leaves(n):
    sd = sd_of(F.star(n))
    leaves = range(1, n + 1)
    r = check_generalized_fr_at(evolve(sd, math.pi / math.sqrt(n)), leaves)
    assert r.holds and r.proper and r.leak < 1e-9
    assert not check_generalized_fr_at(evolve(sd, 1.0), leaves).holds
    with pytest.raises(ValueError):
        check_generalized_fr_at(evolve(sd, 1.0), [])


def test_mixing():
    sd = sd_of(F.complete(3))
    mix = mixing_matrix(sd, 0.7)
    assert np.allclose(mix.sum(axis=0), 1) and np.allclose(mix.sum(axis=1), 1)
    assert local_uniform_mixing_at(evolve(sd, 2 * math.pi / 9), 0)
    assert not local_uniform_mixing_at(evolve(sd, 0.3), 0)
    # regular graphs: A and L walks differ only by a global phase
    assert walks_equivalent_at_vertex(F.cycle(5), 0, np.linspace(0, 5, 11))
    assert not walks_equivalent_at_vertex(F.path(3), 0, np.linspace(0.1, 5, 11))
    with pytest.raises(ValueError):
        walks_equivalent_at_vertex(F.cycle(5), 0, [])


def test_trace_k2_peak_and_exports():
    sd = sd_of(F.complete(2))
    tr = sweep_trace(sd, 0, 1, 0, math.pi, 101)
    i = tr.argmax()
    assert abs(tr.t[i] - math.pi / 2) < 1e-12 and abs(tr.p_uv[i] - 1) < 1e-12
    assert np.allclose(tr.p_uv, np.sin(tr.t) ** 2, atol=1e-12)
    assert tr.to_csv().splitlines()[0] == "t,p_uv,p_uu"
    assert len(json.loads(tr.to_json())["rows"]) == 101
    assert sweep_trace(sd, 0, 1, 0, math.pi, 101).to_csv() == tr.to_csv()
    with pytest.raises(ValueError):
        sweep_trace(sd, 0, 1, 1.0, 1.0, 10)
    with pytest.raises(ValueError):
        sweep_trace(sd, 0, 1, 0, 1, 1)


@pytest.mark.parametrize("m", [3, 4, 6])
def test_trace_complete_graph_max(m):
    sd = sd_of(F.complete(m))
    tr = sweep_trace(sd, 0, 1, 0, 2 * math.pi / m, 2001)
    assert abs(tr.p_uv.max() - 4 / m**2) < 1e-6


def test_scan_max_finds_pst():
    sd = sd_of(F.path(3))
    t, p = scan_max(sd, 0, 2, 5.0)
    assert p > 1 - 1e-9 and abs(t - math.pi / math.sqrt(2)) < 1e-5


def test_monogamy_at_pst_time():
    for g, (u, v), tau in [(F.path(3), (0, 2), math.pi / math.sqrt(2)), (F.cocktail_party(4), (0, 1), math.pi / 2)]:
        U = evolve(sd_of(g), tau)
        for w in range(g.n):
            if w not in (u, v):
                assert probability(U, u, w) < 0.5
