import json
import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from twinwalk import families as F
from twinwalk.dynamics import amplitudes, evolve, probability
from twinwalk.graph import WeightedGraph, are_twins, build_hamiltonian, twin_sets
from twinwalk.numberfield import QuadraticValue
from twinwalk.spectral import decompose, support
from twinwalk.transfer import (
    EXACT,
    INCONCLUSIVE,
    NUMERIC,
    AnalysisOptions,
    ExactTime,
    analyze_pair,
    fr_between_twins,
    min_period,
    periodicity,
    pgst_between_twins,
    pst_between_twins,
    ratio_condition,
    twin_pairs,
)

from corpus import CORPUS

SQ = lambda k: QuadraticValue(0, 2, k)  # noqa: E731  sqrt(k)


# --- exact times ------------------------------------------------------------------


def test_exact_time_strings_and_values():
    t = ExactTime.from_square(1, QuadraticValue.rational(8))
    assert str(t) == "pi/(2*sqrt(2))" and math.isclose(float(t), math.pi / math.sqrt(8))
    assert str(ExactTime.from_square(1, QuadraticValue.rational(4))) == "pi/2"
    assert str(ExactTime.from_square(2, QuadraticValue.rational(2))) == "sqrt(2)*pi"
    assert str(ExactTime.from_square(1, QuadraticValue.rational(Fraction(1, 4)))) == "2*pi"
    nested = ExactTime.from_square(1, QuadraticValue(4, 2, 2))
    assert str(nested) == "pi/sqrt(2 + sqrt(2))"
    assert str(ExactTime.from_square(2, QuadraticValue.rational(6))) == "2*pi/sqrt(6)"
    with pytest.raises(ValueError):
        ExactTime.from_square(1, QuadraticValue.rational(0))


# --- ratio condition and periods -------------------------------------------------


def test_ratio_condition_examples():
    assert ratio_condition([0, SQ(2), -SQ(2)]).status == "holds"
    assert ratio_condition([1, 3, 7]).ratios == (Fraction(3, 2),)
    km = [QuadraticValue(2, 2, 7), 0, QuadraticValue(2, -2, 7)]
    r = ratio_condition(km)
    assert r.status == "fails" and r.confidence == EXACT and len(r.witness["quadruple"]) == 4
    numeric = ratio_condition([math.sqrt(2), 0.0, -math.sqrt(2)])
    assert numeric.status == "holds" and numeric.confidence == NUMERIC
    unknown = ratio_condition([1 + math.sqrt(2), 1.0, 0.0])
    assert unknown.status == "inconclusive" and unknown.holds is None
    with pytest.raises(ValueError):
        ratio_condition([1])


def test_min_period_forms():
    p = min_period([0, SQ(2), -SQ(2)])
    assert p.certificate["delta"] == 2 and p.certificate["g"] == "1"
    assert math.isclose(p.time, 2 * math.pi / math.sqrt(2))
    assert math.isclose(min_period([SQ(6), -SQ(6), 0]).time, 2 * math.pi / math.sqrt(6))
    assert math.isclose(min_period([4, -2, 0]).time, math.pi)
    # gcd form and lcm form agree
    vals = [7, 3, 1, -5]
    rs = [Fraction(7 - x, 4) for x in vals[1:]]
    q = math.lcm(*(r.denominator for r in rs))
    assert math.isclose(min_period(vals).time, 2 * math.pi * q / 4)
    with pytest.raises(ValueError):
        min_period([QuadraticValue(2, 2, 7), 0, QuadraticValue(2, -2, 7)])


@pytest.mark.parametrize("m,n", [(2, 2), (2, 3), (3, 3), (2, 5)])
def test_complete_bipartite_period(m, n):
    v = periodicity(F.complete_bipartite(m, n), "adjacency", 0)
    assert v.holds and v.confidence == EXACT
    assert math.isclose(v.time, 2 * math.pi / math.sqrt(m * n))


def test_periods_cocktail_party_and_star_center():
    for m in range(2, 6):
        assert math.isclose(periodicity(F.cocktail_party(m), "adjacency", 0).time, math.pi)
    for n in range(2, 6):
        assert math.isclose(periodicity(F.star(n), "adjacency", 0).time, math.pi / math.sqrt(n))


def _spot_check_minimal(sd, u, rho):
    ts = np.linspace(rho / 50, 0.99 * rho, 4000)
    return np.all(np.abs(amplitudes(sd, u, u, ts)) ** 2 <= 1 - 1e-6)


def test_periods_verified_and_minimal_on_corpus():
    for g in CORPUS.values():
        for kind in ("adjacency", "laplacian"):
            if not g.connected:
                continue
            sd = decompose(build_hamiltonian(g, kind))
            for u in range(g.n):
                v = periodicity(g, kind, u)
                if v.holds and v.confidence == EXACT:
                    assert abs(evolve(sd, v.time).matrix[u, u]) ** 2 > 1 - 1e-8
                    assert _spot_check_minimal(sd, u, v.time)
                    supp = sd.eigenvalues[list(support(sd, u).support)]
                    if len(supp) >= 3:
                        assert v.time > 2 * math.pi / (supp.max() - supp.min())


# --- PST -----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "g,kind,u,v,tau",
    [
        (F.complete(2), "adjacency", 0, 1, math.pi / 2),
        (F.path(3), "adjacency", 0, 2, math.pi / math.sqrt(2)),
        (F.cycle(4), "adjacency", 0, 2, math.pi / 2),
        (F.complete_minus_edge(4), "laplacian", 1, 2, math.pi / 2),
        (F.complete_bipartite(2, 3), "adjacency", 0, 1, math.pi / math.sqrt(6)),
        (F.cocktail_party(4), "adjacency", 0, 1, math.pi / 2),
    ],
)
def test_pst_examples(g, kind, u, v, tau):
    r = pst_between_twins(g, kind, u, v)
    assert r.holds and r.confidence == EXACT and r.verified
    assert math.isclose(r.time, tau, rel_tol=1e-12)
    sd = decompose(build_hamiltonian(g, kind))
    assert probability(evolve(sd, r.time), u, v) > 1 - 1e-8
    assert all(int(Fraction(m)) % 2 for m in r.certificate["odd_multipliers"])


def test_pst_failures_carry_reasons():
    cp = pst_between_twins(F.cocktail_party(3), "adjacency", 0, 1)
    assert not cp.holds and cp.certificate["nu2"] == [2, 1]
    star = pst_between_twins(F.star(3), "adjacency", 1, 2)
    assert not star.holds and star.certificate["twin_set_size"] == 3
    km = pst_between_twins(F.complete_minus_edge(5), "adjacency", 1, 2)
    assert not km.holds and km.certificate["reason"] == "not periodic"
    with pytest.raises(ValueError):
        pst_between_twins(F.path(4), "adjacency", 0, 1)


def test_pst_implies_periodic_with_double_time_on_corpus():
    for g in CORPUS.values():
        for kind in ("adjacency", "laplacian"):
            for u, v in twin_pairs(g):
                r = analyze_pair(g, kind, u, v)
                pst, per = r.verdicts["pst"], r.verdicts["periodic"]
                if pst.holds:
                    assert per.holds and math.isclose(per.time, 2 * pst.time, rel_tol=1e-12)
                for verdict in r.verdicts.values():
                    if verdict.holds and verdict.time is not None:
                        assert verdict.verified


def test_numeric_path_for_float_weights():
    g = WeightedGraph(3, {(0, 1): 0.5, (1, 2): 0.5})
    r = pst_between_twins(g, "adjacency", 0, 2)
    assert r.holds and r.confidence == NUMERIC and r.exact_time is None
    assert math.isclose(r.time, math.pi / (0.5 * math.sqrt(2)))


def test_inconclusive_pst_reports_scan():
    r = pst_between_twins(F.figure2(), "laplacian", 0, 1, AnalysisOptions(horizon=50))
    assert r.holds is None and r.confidence == INCONCLUSIVE
    assert 0 < r.certificate["scan_max"] < 1 and r.certificate["horizon"] == 50


# --- PGST --------------------------------------------------------------------------


def test_pgst_examples():
    for m in range(4, 9):
        r = pgst_between_twins(F.complete_minus_edge(m), "adjacency", 1, 2)
        assert r.holds and r.confidence == EXACT
    fig = pgst_between_twins(F.figure2(), "adjacency", 0, 1)
    assert fig.holds and fig.confidence == EXACT and len(fig.certificate["kernel_basis"]) == 2
    star = pgst_between_twins(F.star(3), "adjacency", 1, 2)
    assert star.holds is False
    for m in range(2, 9):
        r = pgst_between_twins(F.cocktail_party(m), "adjacency", 0, 1)
        assert r.holds == (m % 2 == 0)
        if not r.holds:
            assert r.certificate["relation_sum"] % 2 == 1


def test_pgst_relations_are_genuine():
    g = F.cocktail_party(3)
    r = pgst_between_twins(g, "adjacency", 0, 1)
    sd = decompose(build_hamiltonian(g, "adjacency"))
    ctx_plus = [j for j in support(sd, 0).support if not math.isclose(sd.eigenvalues[j], 0, abs_tol=1e-9)]
    diffs = [sd.eigenvalues[j] for j in ctx_plus]
    assert abs(sum(l * d for l, d in zip(r.certificate["relation"], diffs))) < 1e-9


def test_pgst_numeric_search_records_bound():
    r = pgst_between_twins(F.figure2(), "laplacian", 0, 1)
    assert r.confidence == NUMERIC and r.certificate["bound"] == 20
    # the trace identity gives a relation with odd coefficient sum
    assert r.holds is False and sum(r.certificate["relation"]) % 2 == 1
    g = WeightedGraph(3, {(0, 1): 0.5, (1, 2): 0.5})
    ok = pgst_between_twins(g, "adjacency", 0, 2, AnalysisOptions(bound=7))
    assert ok.status == "no" or ok.status.startswith("consistent (bound")


def test_pgst_consistent_status_for_independent_numeric_values():
    g = WeightedGraph.from_edges(5, [(0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)])
    r = pgst_between_twins(g, "adjacency", 0, 1, AnalysisOptions(bound=6))
    assert r.holds and r.status == "consistent (bound 6)" and r.confidence == NUMERIC


# --- FR ------------------------------------------------------------------------------


@pytest.mark.parametrize("m", range(2, 9))
def test_fr_cocktail_party(m):
    r = fr_between_twins(F.cocktail_party(m), "adjacency", 0, 1)
    assert r.holds and r.confidence == EXACT and r.verified
    assert math.isclose(r.time, math.pi / m)
    per = periodicity(F.cocktail_party(m), "adjacency", 0)
    if r.fr.balanced:
        assert math.isclose(r.time, per.time / 4)


@pytest.mark.parametrize("m", range(4, 9))
def test_fr_complete_minus_edge_irrational_gamma(m):
    r = fr_between_twins(F.complete_minus_edge(m), "adjacency", 1, 2)
    assert r.holds and r.fr.proper and r.fr.gamma_rational is False
    assert "PGST" in r.fr.downstream
    sd = decompose(build_hamiltonian(F.complete_minus_edge(m), "adjacency"))
    U = evolve(sd, r.time).matrix
    assert abs(U[1, 1] - r.fr.alpha) < 1e-8 and abs(U[1, 2] - r.fr.beta) < 1e-8


def test_fr_figure2_witness():
    r = fr_between_twins(F.figure2(), "adjacency", 0, 1)
    assert r.holds is False and r.confidence == EXACT
    assert r.certificate["witness"]["ratio"] == "1 + sqrt(2)"


def test_fr_parameters_consistent():
    for g in CORPUS.values():
        for kind in ("adjacency", "laplacian"):
            for u, v in twin_pairs(g):
                r = fr_between_twins(g, kind, u, v)
                if r.fr is None:
                    continue
                p = r.fr
                assert abs(abs(p.alpha) ** 2 + abs(p.beta) ** 2 - 1) < 1e-12
                if p.balanced:
                    assert abs(abs(p.alpha) - abs(p.beta)) < 1e-8


def test_no_fr_when_not_strongly_cospectral():
    g = F.join(F.complete(2), F.path(3))
    r = analyze_pair(g, "laplacian", 0, 1)
    assert not r.strongly_cospectral
    assert r.verdicts["pgst"].holds is False and r.verdicts["fr"].holds is False


# --- orchestration ---------------------------------------------------------------------


def test_analyze_pair_bundle_and_json_round_trip():
    r = analyze_pair(F.path(3), "adjacency", 0, 2)
    d = r.to_dict()
    assert d["twin"]["theta"] == "0" and d["delta"] == 2 and d["b_list"] == ["1", "-1"]
    assert d["verdicts"]["pst"]["time_exact"] == "pi/sqrt(2)"
    text = json.dumps(d, sort_keys=True)
    assert json.dumps(json.loads(text), sort_keys=True) == text
    assert json.dumps(analyze_pair(F.path(3), "adjacency", 0, 2).to_dict(), sort_keys=True) == text


def test_non_twin_pairs_are_screened():
    r = analyze_pair(F.path(4), "adjacency", 0, 3)
    assert r.twin is None and any("outside twin theory" in n for n in r.notes)
    assert r.verdicts["pst"].holds is False
    assert r.verdicts["pgst"].status == "screened"


def test_disconnected_graph_per_component():
    g = WeightedGraph.from_edges(5, [(0, 1), (2, 3), (3, 4)])
    same = analyze_pair(g, "adjacency", 0, 1)
    assert same.verdicts["pst"].holds and any("components" in n for n in same.notes)
    apart = analyze_pair(g, "adjacency", 0, 2)
    assert apart.verdicts["pst"].holds is False
    assert apart.verdicts["pst"].certificate["reason"] == "different components"


def test_twin_pairs_listing():
    assert twin_pairs(F.cocktail_party(2)) == [(0, 1), (2, 3)]
    assert len(twin_pairs(F.star(4))) == 6
    with pytest.raises(ValueError):
        analyze_pair(F.path(3), "adjacency", 1, 1)
