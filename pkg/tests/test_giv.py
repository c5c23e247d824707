import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from givlattice.giv import (
    Construction,
    GaugeInvariantRep,
    LoopField,
    StripField,
    TransitionData,
    asym_to_sym_shift,
    count_variables,
    dof_count,
    extract_giv,
    load_rep,
    random_rep,
    reconstruct_links,
    rep_from_json,
    rep_to_json,
    save_rep,
    strip_dependency_residual,
    strip_domain,
    verify_twisted_bc,
)
from givlattice.checks import gauge_orbit_violation, twist_sector
from givlattice.lattice import (
    BoundaryCondition,
    LatticeGeometry,
    LinkField,
    VertexScalarField,
    apply_gauge_transformation,
    field_strength,
    random_links,
)

OPEN, PERIODIC = BoundaryCondition.OPEN, BoundaryCondition.PERIODIC
ASYM, SYM = Construction.ASYMMETRIC, Construction.SYMMETRIC


def path_phi(links):
    """-(sum of links on the path n -> corner, walking direction 0 first, then 1, ...)."""
    g = links.geometry
    N, D = g.size, g.dim
    A = links.values
    phi = np.zeros(g.shape)
    for idx in itertools.product(range(N), repeat=D):
        pos = list(idx)
        total = 0.0
        for ax in range(D):
            while pos[ax] < N - 1:
                total += A[tuple(pos) + (ax,)]
                pos[ax] += 1
        phi[idx] = -total
    return phi


def strip_sum(links, mu, nu):
    """sum_{k >= n_nu} F_{mu nu} along nu, stopping before the last site."""
    F = field_strength(links).values[..., mu, nu]
    N = links.geometry.size
    out = np.zeros_like(F)
    for idx in itertools.product(range(N), repeat=links.geometry.dim):
        s = 0.0
        for k in range(idx[nu], N - 1):
            j = list(idx)
            j[nu] = k
            s += F[tuple(j)]
        out[idx] = s
    return out


def variable_vector(rep):
    parts = [np.delete(rep.phi.values.ravel(), -1)]
    if rep.construction is SYM:
        parts.append(rep.strip(1, 0).values[rep.strip(1, 0).domain])
    else:
        for s in rep.strips.values():
            parts.append(s.values[s.domain])
    for lp in rep.loops.values():
        parts.append(lp.values.ravel())
    return np.concatenate(parts)


GEOMETRIES = [LatticeGeometry(d, n, bc) for d in (2, 3, 4) for n in (2, 3, 4) for bc in (OPEN, PERIODIC)]


@pytest.mark.parametrize("g", GEOMETRIES, ids=str)
def test_phi_matches_path_sum(g):
    links = random_links(g, np.random.default_rng(g.size))
    rep = extract_giv(links)
    np.testing.assert_allclose(rep.phi.values, path_phi(links), atol=1e-12, rtol=0)
    assert rep.phi.values[(g.size - 1,) * g.dim] == 0.0


@pytest.mark.parametrize("g", [g for g in GEOMETRIES if g.size < 4], ids=str)
def test_strips_match_direct_sums(g):
    links = random_links(g, np.random.default_rng(g.dim))
    rep = extract_giv(links)
    for (mu, nu), s in rep.strips.items():
        expected = strip_sum(links, mu, nu)
        dom = s.domain
        np.testing.assert_allclose(s.values[dom], expected[dom], atol=1e-12, rtol=0)
        # pinned: first nu coordinates at N
        assert all(np.all(np.argwhere(dom)[:, ax] == g.size - 1) for ax in range(nu))


def test_loops_are_wilson_lines_without_transition():
    g = LatticeGeometry(3, 3, PERIODIC)
    links = random_links(g, np.random.default_rng(5))
    rep = extract_giv(links)
    for mu in range(3):
        np.testing.assert_allclose(rep.loops[mu].values, links.values[..., mu].sum(axis=mu), atol=1e-13)


@settings(max_examples=60, deadline=None)
@given(dim=st.integers(2, 4), size=st.integers(2, 4), periodic=st.booleans(), sym=st.booleans(),
       seed=st.integers(0, 2**32 - 1))
def test_round_trip_property(dim, size, periodic, sym, seed):
    g = LatticeGeometry(dim, size, PERIODIC if periodic else OPEN)
    construction = SYM if (sym and dim == 2) else ASYM
    links = random_links(g, np.random.default_rng(seed))
    back = reconstruct_links(extract_giv(links, construction))
    assert np.max(np.abs(back.values - links.values)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(dim=st.integers(2, 4), size=st.integers(2, 4), periodic=st.booleans(), sym=st.booleans(),
       seed=st.integers(0, 2**32 - 1))
def test_inverse_round_trip_property(dim, size, periodic, sym, seed):
    """extract(reconstruct(rep)) = rep: the map is onto the free variables too."""
    g = LatticeGeometry(dim, size, PERIODIC if periodic else OPEN)
    construction = SYM if (sym and dim == 2) else ASYM
    rep = random_rep(g, np.random.default_rng(seed), construction)
    again = extract_giv(reconstruct_links(rep), construction)
    np.testing.assert_allclose(again.phi.values, rep.phi.values, atol=1e-12, rtol=0)
    for key, s in rep.strips.items():
        np.testing.assert_allclose(again.strips[key].values, s.values, atol=1e-12, rtol=0)
    for mu, lp in rep.loops.items():
        np.testing.assert_allclose(again.loops[mu].values, lp.values, atol=1e-12, rtol=0)


BIJECTION_CASES = [(LatticeGeometry(d, n, bc), c)
                   for d, n in ((2, 3), (2, 4), (3, 2))
                   for bc in (OPEN, PERIODIC)
                   for c in ((ASYM, SYM) if d == 2 else (ASYM,))]


@pytest.mark.parametrize("g,construction", BIJECTION_CASES, ids=str)
def test_extraction_is_a_linear_bijection(g, construction):
    """Matrix of the linear map physical links -> variables is square and invertible."""
    mask = g.link_mask()
    cols = []
    for pos in np.argwhere(mask):
        v = np.zeros(g.link_shape)
        v[tuple(pos)] = 1.0
        cols.append(variable_vector(extract_giv(LinkField(g, v), construction)))
    M = np.array(cols).T
    assert M.shape == (g.n_links, g.n_links)
    assert np.linalg.matrix_rank(M) == g.n_links


@pytest.mark.parametrize("dim", [2, 3, 4])
@pytest.mark.parametrize("size", [2, 3, 4])
@pytest.mark.parametrize("bc", [OPEN, PERIODIC])
def test_counts_match_closed_forms(dim, size, bc):
    g = LatticeGeometry(dim, size, bc)
    closed = dof_count(g)
    counted = count_variables(extract_giv(random_links(g, np.random.default_rng(0))))
    assert counted == closed
    assert closed.balanced()
    if dim == 2:
        assert count_variables(extract_giv(random_links(g, np.random.default_rng(0)), SYM)) == closed


def test_count_examples():
    c = dof_count(LatticeGeometry(2, 3, OPEN))
    assert (c.n_phi, c.n_strips, c.n_loops, c.n_links) == (8, 4, 0, 12)
    c = dof_count(LatticeGeometry(3, 3, PERIODIC))
    assert (c.n_phi, c.n_strips, c.n_loops, c.total, c.n_links) == (26, 28, 27, 81, 81)
    c = dof_count(LatticeGeometry(4, 2, OPEN))
    assert c.total == c.n_links == 4 * 8


@pytest.mark.parametrize("bc", [OPEN, PERIODIC])
@pytest.mark.parametrize("construction", [ASYM, SYM])
def test_gauge_orbit(bc, construction):
    g = LatticeGeometry(2 if construction is SYM else 3, 3, bc)
    assert gauge_orbit_violation(g, construction, 20, 11) <= 1e-12


def test_gauge_orbit_shifts_phi_by_lambda():
    g = LatticeGeometry(2, 4, PERIODIC)
    rng = np.random.default_rng(2)
    links = random_links(g, rng)
    lam = rng.normal(size=g.shape)
    lam -= lam[-1, -1]
    d = extract_giv(apply_gauge_transformation(links, lam)).phi.values - extract_giv(links).phi.values
    np.testing.assert_allclose(d, lam, atol=1e-12)


def test_symmetric_shift_closed_form():
    """Uniform F_10 = Phi: the symmetric vertex field moves by -Phi/2 (N - n_0)(N - n_1)."""
    N, Phi = 5, 0.37
    g = LatticeGeometry(2, N, OPEN)
    v = np.zeros(g.link_shape)
    i0 = np.arange(N)[:, None] * np.ones((1, N))
    v[..., 1] = np.where(np.arange(N)[None, :] < N - 1, Phi * (N - 1 - i0), 0.0)
    links = LinkField(g, v)
    F = field_strength(links)
    assert np.allclose(F.component(1, 0)[:-1, :-1], Phi)
    asym = extract_giv(links)
    sym = asym_to_sym_shift(asym)
    n0, n1 = g.coordinate_grids()
    np.testing.assert_allclose(sym.phi.values - asym.phi.values, -0.5 * Phi * (N - n0) * (N - n1), atol=1e-12)
    direct = extract_giv(links, SYM)
    np.testing.assert_allclose(direct.phi.values, sym.phi.values, atol=1e-12)
    for key in direct.strips:
        np.testing.assert_allclose(direct.strips[key].values, sym.strips[key].values, atol=1e-12)


@pytest.mark.parametrize("bc", [OPEN, PERIODIC])
def test_symmetric_shift_reconstructs_same_links(bc):
    g = LatticeGeometry(2, 4, bc)
    links = random_links(g, np.random.default_rng(8))
    sym = asym_to_sym_shift(extract_giv(links))
    np.testing.assert_allclose(reconstruct_links(sym).values, links.values, atol=1e-12)
    assert strip_dependency_residual(sym) <= 1e-12


def test_strip_dependency_detects_inconsistency():
    g = LatticeGeometry(2, 4, OPEN)
    sym = extract_giv(random_links(g, np.random.default_rng(1)), SYM)
    bad01 = sym.strip(0, 1).values.copy()
    bad01[1, 1] += 0.1
    broken = GaugeInvariantRep(g, SYM, sym.phi,
                               {(1, 0): sym.strip(1, 0), (0, 1): StripField(g, 0, 1, bad01, False)})
    assert strip_dependency_residual(broken) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        strip_dependency_residual(extract_giv(random_links(g, np.random.default_rng(1))))


@pytest.mark.parametrize("dim", [2, 3, 4])
@pytest.mark.parametrize("alpha", [0.0, 0.3, -1.7])
def test_twisted_sector_round_trip(dim, alpha):
    g = LatticeGeometry(dim, 3, PERIODIC)
    T = twist_sector(g, alpha)
    assert T.cocycle_violation() <= 1e-12
    links = random_links(g, np.random.default_rng(4))
    rep = extract_giv(links, ASYM, T)
    report = verify_twisted_bc(rep)
    assert report.max_violation <= 1e-12
    np.testing.assert_allclose(reconstruct_links(rep).values, links.values, atol=1e-12)
    # loops subtract the transition function at n_mu = 1
    f0 = links.values[..., 0].sum(axis=0)
    np.testing.assert_allclose(rep.loops[1].values, links.values[..., 1].sum(axis=1), atol=1e-12)
    np.testing.assert_allclose(rep.loops[0].values, f0 - T.on_lattice(0)[0], atol=1e-12)


def test_twisted_sector_symmetric():
    g = LatticeGeometry(2, 4, PERIODIC)
    rep = extract_giv(random_links(g, np.random.default_rng(0)), SYM, twist_sector(g, 0.9))
    assert verify_twisted_bc(rep).max_violation <= 1e-12


def test_cocycle_violation_detected():
    g = LatticeGeometry(2, 3, PERIODIC)
    bad = TransitionData.from_functions(g, [lambda n0, n1: 0.5 * n1, 0.0])  # twist left at 0
    assert bad.cocycle_violation() == pytest.approx(1.5)
    with pytest.raises(ValueError, match="cocycle"):
        extract_giv(random_links(g, np.random.default_rng(0)), ASYM, bad)


def test_transition_data_validation():
    with pytest.raises(ValueError):
        TransitionData.zeros(LatticeGeometry(2, 3, OPEN))
    g = LatticeGeometry(2, 3, PERIODIC)
    with pytest.raises(ValueError):
        TransitionData(g, np.zeros((2, 6, 6)), np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(ValueError):
        TransitionData(g, np.zeros((2, 5, 5)), np.zeros((2, 2)))


def test_open_boundary_rejects_transition_data():
    g = LatticeGeometry(2, 3, OPEN)
    with pytest.raises(ValueError):
        extract_giv(LinkField.zeros(g), ASYM, TransitionData.zeros(LatticeGeometry(2, 3, PERIODIC)))
    with pytest.raises(ValueError):
        verify_twisted_bc(extract_giv(LinkField.zeros(g)))


def test_unsupported_symmetric_extraction():
    with pytest.raises(ValueError):
        extract_giv(LinkField.zeros(LatticeGeometry(3, 3, PERIODIC)), SYM)
    with pytest.raises(ValueError):
        extract_giv(LinkField.zeros(LatticeGeometry(2, 3)), "diagonal")


def test_rep_validation():
    g = LatticeGeometry(2, 3, OPEN)
    rep = extract_giv(random_links(g, np.random.default_rng(0)))
    phi = rep.phi.values.copy()
    phi[-1, -1] = 1.0
    with pytest.raises(ValueError, match="phi"):
        GaugeInvariantRep(g, ASYM, VertexScalarField(g, phi), rep.strips)
    with pytest.raises(ValueError):
        GaugeInvariantRep(g, ASYM, rep.phi, {})
    with pytest.raises(ValueError):
        GaugeInvariantRep(g, ASYM, rep.phi, rep.strips, {0: LoopField(g, 0, np.zeros(3))})
    bad = np.zeros(g.shape)
    bad[2, 0] = 1.0  # n_0 = N lies outside the strip domain
    with pytest.raises(ValueError, match="outside"):
        StripField(g, 1, 0, bad)
    p = LatticeGeometry(2, 3, PERIODIC)
    prep = extract_giv(random_links(p, np.random.default_rng(0)))
    with pytest.raises(ValueError):
        GaugeInvariantRep(p, ASYM, prep.phi, prep.strips, {0: prep.loops[0]})


def test_strip_domain_sizes():
    g = LatticeGeometry(4, 3, OPEN)
    total = sum(int(strip_domain(g, mu, nu).sum()) for mu in range(4) for nu in range(mu))
    assert total == dof_count(g).n_strips


@pytest.mark.parametrize("bc", [OPEN, PERIODIC])
@pytest.mark.parametrize("construction", [ASYM, SYM])
def test_rep_json_round_trip(tmp_path, bc, construction):
    g = LatticeGeometry(2, 3, bc)
    transition = twist_sector(g, 0.4) if bc is PERIODIC else None
    rep = extract_giv(random_links(g, np.random.default_rng(2)), construction, transition)
    path = tmp_path / "rep.json"
    save_rep(rep, path)
    back = load_rep(path)
    np.testing.assert_array_equal(reconstruct_links(back).values, reconstruct_links(rep).values)
    doc = rep_to_json(rep)
    assert doc["construction"] == construction.value
    assert set(doc["strips"]) == {f"{mu},{nu}" for mu, nu in rep.strips}
    doc["strips"]["1,0"] = doc["strips"]["1,0"][1:]
    with pytest.raises(ValueError):
        rep_from_json(doc)


def test_literal_strip_relation_does_not_hold():
    """The relation with three F10 terms fails on generic data; the corrected one vanishes."""
    g = LatticeGeometry(2, 5, OPEN)
    sym = extract_giv(random_links(g, np.random.default_rng(11)), SYM)
    f01, f10 = sym.strip(0, 1).values, sym.strip(1, 0).values
    inner = (slice(0, -1), slice(0, -1))
    literal = f01[inner] + f10[1:, :-1] - f10[inner] - f10[:-1, 1:]
    assert np.max(np.abs(literal)) > 1e-3
    assert strip_dependency_residual(sym) <= 1e-12
