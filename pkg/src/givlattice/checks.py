"""Seeded property suites shared by the command line and the test-suite.

Each suite returns the largest violation it observed; the caller compares
it with a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .action import ActionParams, action_from_links, action_from_strips, plaquettes_from_strips, strip_triple_from_rep
from .giv import (
    Construction,
    TransitionData,
    count_variables,
    dof_count,
    extract_giv,
    random_rep,
    reconstruct_links,
    verify_twisted_bc,
)
from .lattice import (
    BoundaryCondition,
    LatticeGeometry,
    apply_gauge_transformation,
    bianchi_residual,
    field_strength,
    random_links,
)

__all__ = [
    "ActionCheck",
    "roundtrip_violation",
    "dof_violation",
    "gauge_orbit_violation",
    "bianchi_violation",
    "action_check",
    "twist_sector",
    "twist_violation",
]


def roundtrip_violation(geometry: LatticeGeometry, construction: Construction | str,
                        trials: int, seed: int) -> float:
    """max |A - reconstruct(extract(A))| over random link configurations."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        links = random_links(geometry, rng)
        back = reconstruct_links(extract_giv(links, construction))
        worst = max(worst, float(np.max(np.abs(back.values - links.values))))
    return worst


def dof_violation(geometry: LatticeGeometry, construction: Construction | str = Construction.ASYMMETRIC) -> int:
    """Integer mismatch between enumerated counts, closed forms and the link count."""
    closed = dof_count(geometry, construction)
    counted = count_variables(extract_giv(random_links(geometry, np.random.default_rng(0)), construction))
    return (abs(closed.n_phi - counted.n_phi) + abs(closed.n_strips - counted.n_strips)
            + abs(closed.n_loops - counted.n_loops) + abs(counted.total - geometry.n_links)
            + abs(closed.n_links - geometry.n_links))


def gauge_orbit_violation(geometry: LatticeGeometry, construction: Construction | str,
                          trials: int, seed: int) -> float:
    """Strips and loops must not move; phi must move by Lambda - Lambda(N, ..., N)."""
    rng = np.random.default_rng(seed)
    corner = (geometry.size - 1,) * geometry.dim
    worst = 0.0
    for _ in range(trials):
        links = random_links(geometry, rng)
        lam = rng.uniform(-np.pi, np.pi, geometry.shape)
        r0 = extract_giv(links, construction)
        r1 = extract_giv(apply_gauge_transformation(links, lam), construction)
        dphi = r1.phi.values - r0.phi.values - (lam - lam[corner])
        worst = max(worst, float(np.max(np.abs(dphi))))
        for key, s in r0.strips.items():
            worst = max(worst, float(np.max(np.abs(r1.strips[key].values - s.values))))
        for mu, lp in r0.loops.items():
            worst = max(worst, float(np.max(np.abs(r1.loops[mu].values - lp.values))))
    return worst


def bianchi_violation(geometry: LatticeGeometry, trials: int, seed: int) -> float:
    """Bianchi residual of links rebuilt from random gauge invariant variables."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        links = reconstruct_links(random_rep(geometry, rng))
        worst = max(worst, bianchi_residual(field_strength(links)))
    return worst


@dataclass(frozen=True)
class ActionCheck:
    beta: float
    S_links: float
    S_strips: float
    rel_err: float
    plaquette_err: float
    bianchi: float


def action_check(size: int, beta: float, trials: int, seed: int) -> ActionCheck:
    """Compare the link and strip forms of the (2+1)d open-boundary action.

    Reports the worst relative error and the action values of that
    configuration, plus the worst plaquette mismatch and Bianchi residual
    of the strip-built plaquettes.
    """
    params = ActionParams(beta)
    geometry = LatticeGeometry(3, size, BoundaryCondition.OPEN)
    rng = np.random.default_rng(seed)
    worst = ActionCheck(params.beta, 0.0, 0.0, 0.0, 0.0, 0.0)
    plaq_err = bianchi = 0.0
    for _ in range(trials):
        links = random_links(geometry, rng)
        triple = strip_triple_from_rep(extract_giv(links))
        s_links = action_from_links(links, params)
        s_strips = action_from_strips(triple, params)
        rel = abs(s_strips - s_links) / max(1.0, abs(s_links))
        F = plaquettes_from_strips(triple)
        plaq_err = max(plaq_err, float(np.max(np.abs(F.values - field_strength(links).values))))
        bianchi = max(bianchi, bianchi_residual(F))
        if rel >= worst.rel_err:
            worst = ActionCheck(params.beta, s_links, s_strips, rel, 0.0, 0.0)
    return ActionCheck(worst.beta, worst.S_links, worst.S_strips, worst.rel_err, plaq_err, bianchi)


def twist_sector(geometry: LatticeGeometry, alpha: float) -> TransitionData:
    """phi_0(n) = alpha n_1 with twist phi_{01} = alpha N; the cocycle holds exactly."""
    if geometry.dim < 2:
        raise ValueError("a twist needs at least two directions")
    D, N = geometry.dim, geometry.size
    funcs = [lambda *c: alpha * c[1]] + [0.0] * (D - 1)
    twist = np.zeros((D, D))
    twist[0, 1], twist[1, 0] = alpha * N, -alpha * N
    return TransitionData.from_functions(geometry, funcs, twist)


def twist_violation(geometry: LatticeGeometry, alpha: float, trials: int, seed: int,
                    construction: Construction | str = Construction.ASYMMETRIC) -> float:
    rng = np.random.default_rng(seed)
    transition = twist_sector(geometry, alpha)
    worst = 0.0
    for _ in range(trials):
        links = random_links(geometry, rng)
        rep = extract_giv(links, construction, transition)
        worst = max(worst, verify_twisted_bc(rep).max_violation)
        worst = max(worst, float(np.max(np.abs(reconstruct_links(rep).values - links.values))))
    return worst
