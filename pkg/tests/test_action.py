import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from givlattice.action import (
    ActionParams,
    StripTriple2p1,
    action_from_links,
    action_from_strips,
    plaquettes_from_strips,
    strip_triple_from_rep,
)
from givlattice.checks import action_check
from givlattice.giv import GaugeInvariantRep, StripField, extract_giv, reconstruct_links
from givlattice.lattice import BoundaryCondition, LatticeGeometry, bianchi_residual, field_strength, random_links

OPEN = BoundaryCondition.OPEN


def reference_action(links, beta):
    """beta * sum over sites and mu > nu of F^2, plaquette by plaquette."""
    g = links.geometry
    F = field_strength(links)
    total = 0.0
    for idx in itertools.product(range(g.size), repeat=g.dim):
        for mu, nu in itertools.combinations(range(g.dim), 2):
            total += F.values[idx + (nu, mu)] ** 2
    return beta * total


def random_triple(N, rng, b_only=False):
    a = np.zeros((N, N, N))
    c = np.zeros((N, N, N))
    if not b_only:
        a[:-1, :-1, :] = rng.uniform(-np.pi, np.pi, (N - 1, N - 1, N))
        c[:-1, :, :-1] = rng.uniform(-np.pi, np.pi, (N - 1, N, N - 1))
    b = np.zeros((N, N))
    b[:-1, :-1] = rng.uniform(-np.pi, np.pi, (N - 1, N - 1))
    return StripTriple2p1(a, c, b)


def test_params_validation():
    assert ActionParams(0).beta == 0.0
    for bad in (-1.0, float("nan"), float("inf")):
        with pytest.raises(ValueError):
            ActionParams(bad)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_action_from_links_matches_reference(dim):
    g = LatticeGeometry(dim, 3, OPEN)
    links = random_links(g, np.random.default_rng(dim))
    assert action_from_links(links, ActionParams(1.3)) == pytest.approx(reference_action(links, 1.3), rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(N=st.integers(2, 5), beta=st.floats(0.1, 5.0), seed=st.integers(0, 2**32 - 1))
def test_strip_action_equals_link_action(N, beta, seed):
    links = random_links(LatticeGeometry(3, N, OPEN), np.random.default_rng(seed))
    triple = strip_triple_from_rep(extract_giv(links))
    s_links = action_from_links(links, ActionParams(beta))
    s_strips = action_from_strips(triple, ActionParams(beta))
    assert abs(s_strips - s_links) / max(1.0, abs(s_links)) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(N=st.integers(2, 5), seed=st.integers(0, 2**32 - 1))
def test_plaquettes_from_strips_match_links(N, seed):
    links = random_links(LatticeGeometry(3, N, OPEN), np.random.default_rng(seed))
    F = plaquettes_from_strips(strip_triple_from_rep(extract_giv(links)))
    np.testing.assert_allclose(F.values, field_strength(links).values, atol=1e-12, rtol=0)
    assert bianchi_residual(F) <= 1e-12


@pytest.mark.parametrize("N", [2, 3, 4])
def test_arbitrary_strips_give_consistent_plaquettes(N):
    """Any admissible triple is realised by links: its action is the link action."""
    rng = np.random.default_rng(N)
    triple = random_triple(N, rng)
    g = LatticeGeometry(3, N, OPEN)
    rep = extract_giv(random_links(g, rng))
    strips = dict(rep.strips)
    b_full = np.zeros(g.shape)
    b_full[N - 1] = triple.b
    strips[(1, 0)] = StripField(g, 1, 0, triple.a)
    strips[(2, 0)] = StripField(g, 2, 0, triple.c)
    strips[(2, 1)] = StripField(g, 2, 1, b_full)
    links = reconstruct_links(GaugeInvariantRep(g, rep.construction, rep.phi, strips))
    np.testing.assert_allclose(plaquettes_from_strips(triple).values, field_strength(links).values, atol=1e-12)
    assert action_from_strips(triple, ActionParams(1.0)) == pytest.approx(
        action_from_links(links, ActionParams(1.0)), rel=1e-12)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_b_only_action(N):
    triple = random_triple(N, np.random.default_rng(N), b_only=True)
    db = triple.b[:-1, :-1] - triple.b[1:, :-1]
    assert action_from_strips(triple, ActionParams(2.0)) == pytest.approx(2.0 * N * np.sum(db**2), rel=1e-13)


def test_boundary_term_scales_linearly_in_N():
    profile = np.array([[0.4, -1.1], [0.7, 0.2]])
    values = []
    for N in range(3, 9):
        b = np.zeros((N, N))
        b[:2, :2] = profile
        values.append(action_from_strips(StripTriple2p1(np.zeros((N, N, N)), np.zeros((N, N, N)), b),
                                         ActionParams(1.0)))
    per_slice = np.array(values) / np.arange(3, 9)
    np.testing.assert_allclose(per_slice, per_slice[0], rtol=1e-13)
    assert per_slice[0] > 0


def test_zero_coupling():
    r = action_check(3, 0.0, 5, 0)
    assert r.S_links == 0.0 and r.S_strips == 0.0 and r.rel_err == 0.0


def test_action_check_report():
    r = action_check(2, 2.5, 20, 1)
    assert r.rel_err <= 1e-10 and r.plaquette_err <= 1e-12 and r.bianchi <= 1e-12
    assert r.beta == 2.5


def test_strip_triple_validation():
    N = 3
    z3, z2 = np.zeros((N, N, N)), np.zeros((N, N))
    a = z3.copy()
    a[-1, 0, 0] = 1.0
    with pytest.raises(ValueError):
        StripTriple2p1(a, z3, z2)
    c = z3.copy()
    c[0, 0, -1] = 1.0
    with pytest.raises(ValueError):
        StripTriple2p1(z3, c, z2)
    b = z2.copy()
    b[0, -1] = 1.0
    with pytest.raises(ValueError):
        StripTriple2p1(z3, z3, b)
    with pytest.raises(ValueError):
        StripTriple2p1(z3, z3, np.zeros((2, 2)))


def test_strip_triple_needs_open_3d_asymmetric():
    with pytest.raises(ValueError):
        strip_triple_from_rep(extract_giv(random_links(LatticeGeometry(3, 3), np.random.default_rng(0))))
    with pytest.raises(ValueError):
        strip_triple_from_rep(extract_giv(random_links(LatticeGeometry(4, 2, OPEN), np.random.default_rng(0))))


def test_expansion_keeps_mixed_terms():
    """Dropping the a-c cross term or flipping the b coupling breaks equality with the link action."""
    from givlattice.action import _domain, _pieces

    N = 4
    rng = np.random.default_rng(3)
    links = random_links(LatticeGeometry(3, N, OPEN), rng)
    triple = strip_triple_from_rep(extract_giv(links))
    da0, dc0, x, y = _pieces(triple)
    d10, d20, d21 = _domain(N, 0, 1), _domain(N, 0, 2), _domain(N, 1, 2)
    a, c = triple.a, triple.c
    a2 = np.roll(a, -1, 2) * (np.arange(N) < N - 1)
    c1 = np.roll(c, -1, 1) * (np.arange(N)[:, None] < N - 1)
    p, q = (a2 - a)[d21], (c - c1)[d21]
    np.testing.assert_allclose(p + q, x[d21], atol=1e-12)
    exact = action_from_links(links, ActionParams(1.0))
    assert action_from_strips(triple, ActionParams(1.0)) == pytest.approx(exact, rel=1e-12)
    without_cross = exact - 2 * np.sum(p * q)
    flipped = exact - 4 * np.sum(x[d21] * y[d21])
    assert abs(without_cross - exact) > 1e-3 * exact
    assert abs(flipped - exact) > 1e-3 * exact
