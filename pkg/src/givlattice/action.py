"""Non-compact pure gauge action in link and (2+1)d strip variables.

Convention: S = beta * sum_n sum_{mu > nu} F_{mu nu}(n)^2, i.e. each
unordered plaquette orientation is counted once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .giv import GaugeInvariantRep, Construction
from .lattice import (
    BoundaryCondition,
    LatticeGeometry,
    LinkField,
    PlaquetteField,
    _readonly,
    field_strength,
)

__all__ = [
    "ActionParams",
    "StripTriple2p1",
    "action_from_links",
    "action_from_strips",
    "plaquettes_from_strips",
    "strip_triple_from_rep",
]


@dataclass(frozen=True)
class ActionParams:
    beta: float = 1.0

    def __post_init__(self):
        b = float(self.beta)
        if not math.isfinite(b) or b < 0:
            raise ValueError(f"beta must be finite and non-negative, got {self.beta}")
        object.__setattr__(self, "beta", b)


def action_from_links(links: LinkField, params: ActionParams) -> float:
    F = field_strength(links).values
    D = links.geometry.dim
    total = 0.0
    for mu in range(D):
        for nu in range(mu):
            total += float(np.sum(F[..., mu, nu] ** 2))
    return params.beta * total


@dataclass(frozen=True)
class StripTriple2p1:
    """Strips of a (2+1)d open lattice.

    a = F̄_10 and c = F̄_20 are site arrays of shape (N, N, N); b = F̄_21
    lives on the n_0 = N plane and has shape (N, N) over (n_1, n_2).
    a vanishes at n_0 = N and n_1 = N, c at n_0 = N and n_2 = N, b at
    n_1 = N and n_2 = N.
    """

    a: np.ndarray
    c: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        c = np.asarray(self.c, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 3 or len(set(a.shape)) != 1 or c.shape != a.shape or b.shape != a.shape[1:]:
            raise ValueError("expected a, c of shape (N, N, N) and b of shape (N, N)")
        if a.shape[0] < 2:
            raise ValueError("lattice size must be at least 2")
        for arr in (a, b, c):
            if not np.all(np.isfinite(arr)):
                raise ValueError("strip values must be finite")
        if np.any(a[-1] != 0) or np.any(a[:, -1] != 0):
            raise ValueError("a must vanish at n_0 = N and n_1 = N")
        if np.any(c[-1] != 0) or np.any(c[:, :, -1] != 0):
            raise ValueError("c must vanish at n_0 = N and n_2 = N")
        if np.any(b[-1] != 0) or np.any(b[:, -1] != 0):
            raise ValueError("b must vanish at n_1 = N and n_2 = N")
        object.__setattr__(self, "a", _readonly(a))
        object.__setattr__(self, "b", _readonly(b))
        object.__setattr__(self, "c", _readonly(c))

    @property
    def size(self) -> int:
        return self.a.shape[0]

    @property
    def geometry(self) -> LatticeGeometry:
        return LatticeGeometry(3, self.size, BoundaryCondition.OPEN)


def _plus(x: np.ndarray, axis: int) -> np.ndarray:
    """x(n + axis-hat), zero past the last site."""
    out = np.zeros_like(x)
    src = [slice(None)] * x.ndim
    dst = [slice(None)] * x.ndim
    src[axis] = slice(1, None)
    dst[axis] = slice(0, -1)
    out[tuple(dst)] = x[tuple(src)]
    return out


def _domain(N: int, i: int, j: int) -> np.ndarray:
    m = np.ones((N, N, N), dtype=bool)
    for ax in (i, j):
        idx = [slice(None)] * 3
        idx[ax] = -1
        m[tuple(idx)] = False
    return m


def _pieces(s: StripTriple2p1):
    a, c = s.a, s.c
    b = np.broadcast_to(s.b, a.shape)
    da0 = a - _plus(a, 0)
    dc0 = c - _plus(c, 0)
    x = _plus(a, 2) - a + c - _plus(c, 1)
    y = b - _plus(b, 1)
    return da0, dc0, x, y


def plaquettes_from_strips(strips: StripTriple2p1) -> PlaquetteField:
    """F_10 = a - a(+0), F_20 = c - c(+0), F_21 = a(+2) - a + c - c(+1) + b - b(+1)."""
    N = strips.size
    da0, dc0, x, y = _pieces(strips)
    F = np.zeros((N, N, N, 3, 3))
    F[..., 1, 0] = np.where(_domain(N, 0, 1), da0, 0.0)
    F[..., 2, 0] = np.where(_domain(N, 0, 2), dc0, 0.0)
    F[..., 2, 1] = np.where(_domain(N, 1, 2), x + y, 0.0)
    for mu in range(3):
        for nu in range(mu):
            F[..., nu, mu] = -F[..., mu, nu]
    return PlaquetteField(strips.geometry, F)


def action_from_strips(strips: StripTriple2p1, params: ActionParams) -> float:
    """Action in strip variables, expanded term by term.

    S = beta [ sum (a - a(+0))^2 + sum (c - c(+0))^2 + sum X^2 ]
        + beta N sum_{n_0=N} (b - b(+1))^2 + 2 beta sum X (b - b(+1)),
    with X = a(+2) - a + c - c(+1).  Each sum runs over the sites where
    the corresponding plaquette exists, so the b term is the same on every
    n_0 slice and picks up the factor N.
    """
    N = strips.size
    da0, dc0, x, y = _pieces(strips)
    d10, d20, d21 = _domain(N, 0, 1), _domain(N, 0, 2), _domain(N, 1, 2)
    yb = strips.b - _plus(strips.b, 0)
    inner = d21[0]
    bulk = np.sum(da0[d10] ** 2) + np.sum(dc0[d20] ** 2) + np.sum(x[d21] ** 2)
    boundary = N * np.sum(yb[inner] ** 2)
    cross = 2.0 * np.sum(x[d21] * y[d21])
    return params.beta * float(bulk + boundary + cross)


def strip_triple_from_rep(rep: GaugeInvariantRep) -> StripTriple2p1:
    g = rep.geometry
    if g.dim != 3 or g.periodic or rep.construction is not Construction.ASYMMETRIC:
        raise ValueError("strip triple needs an asymmetric (2+1)d open-boundary representation")
    return StripTriple2p1(rep.strip(1, 0).values, rep.strip(2, 0).values,
                          rep.strip(2, 1).values[g.size - 1])
