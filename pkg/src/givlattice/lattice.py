"""Hypercubic lattice geometry, link fields and plaquettes.

Sites are addressed with 1-based coordinates ``(n_0, ..., n_d)``, each in
``1..N``.  Arrays are stored 0-based: the link array of a ``LinkField`` has
shape ``(N,) * D + (D,)`` so that ``values.reshape(-1, D)`` is indexed by
(flattened site, direction).  Charge and lattice spacing are set to one.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "BoundaryCondition",
    "LatticeGeometry",
    "LinkField",
    "PlaquetteField",
    "VertexScalarField",
    "field_strength",
    "bianchi_residual",
    "apply_gauge_transformation",
    "wilson_line_sum",
    "wilson_lines",
    "random_links",
    "links_to_json",
    "links_from_json",
    "save_links",
    "load_links",
]


class BoundaryCondition(str, enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class LatticeGeometry:
    """An ``N^D`` hypercube with a single boundary-condition kind."""

    dim: int
    size: int
    bc: BoundaryCondition = BoundaryCondition.PERIODIC

    def __post_init__(self):
        if self.dim not in (2, 3, 4):
            raise ValueError(f"dim must be 2, 3 or 4, got {self.dim}")
        if int(self.size) != self.size or self.size < 2:
            raise ValueError(f"linear size must be an integer >= 2, got {self.size}")
        object.__setattr__(self, "size", int(self.size))
        object.__setattr__(self, "bc", BoundaryCondition(self.bc))

    @property
    def periodic(self) -> bool:
        return self.bc is BoundaryCondition.PERIODIC

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.size,) * self.dim

    @property
    def link_shape(self) -> tuple[int, ...]:
        return self.shape + (self.dim,)

    @property
    def n_sites(self) -> int:
        return self.size**self.dim

    @property
    def n_links(self) -> int:
        """Number of physical links (boundary links excluded for OBC)."""
        N, D = self.size, self.dim
        if self.periodic:
            return D * N**D
        return D * N ** (D - 1) * (N - 1)

    def index(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Convert 1-based coordinates to a 0-based array index."""
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        out = []
        for c in coords:
            c = int(c)
            if self.periodic:
                out.append((c - 1) % self.size)
            elif 1 <= c <= self.size:
                out.append(c - 1)
            else:
                raise IndexError(f"coordinate {c} outside 1..{self.size}")
        return tuple(out)

    def coordinate_grids(self) -> tuple[np.ndarray, ...]:
        """1-based coordinate arrays, one per direction, each of shape ``self.shape``."""
        return tuple(np.indices(self.shape) + 1)

    def link_mask(self) -> np.ndarray:
        """Boolean mask over ``link_shape`` marking physical links."""
        mask = np.ones(self.link_shape, dtype=bool)
        if not self.periodic:
            for mu in range(self.dim):
                mask[_axis_slice(self.dim, mu, self.size - 1) + (mu,)] = False
        return mask

    def plaquette_mask(self) -> np.ndarray:
        """Boolean mask over ``shape + (D, D)``; True where F_{mu nu}(n) exists."""
        D, N = self.dim, self.size
        mask = np.zeros(self.shape + (D, D), dtype=bool)
        for mu in range(D):
            for nu in range(D):
                if mu == nu:
                    continue
                m = np.ones(self.shape, dtype=bool)
                if not self.periodic:
                    m[_axis_slice(D, mu, N - 1)] = False
                    m[_axis_slice(D, nu, N - 1)] = False
                mask[..., mu, nu] = m
        return mask

    def to_dict(self) -> dict:
        return {"dim": self.dim, "size": self.size, "bc": self.bc.value}


def _axis_slice(ndim: int, axis: int, index) -> tuple:
    """Index tuple selecting ``index`` along ``axis`` of an ``ndim`` array."""
    sl = [slice(None)] * ndim
    sl[axis] = index
    return tuple(sl)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class VertexScalarField:
    """A real number on every site (vertex fields, gauge functions)."""

    geometry: LatticeGeometry
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.geometry.shape:
            raise ValueError(f"vertex field shape {v.shape} != {self.geometry.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertex field has non-finite entries")
        object.__setattr__(self, "values", _readonly(v))

    def __call__(self, *coords: int) -> float:
        return float(self.values[self.geometry.index(coords)])


@dataclass(frozen=True)
class LinkField:
    """Real gauge potential A_mu(n) on every directed link.

    Under open boundary conditions the links leaving the lattice
    (``n_mu = N`` in direction mu) are stored and must be exactly zero.
    """

    geometry: LatticeGeometry
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.geometry.link_shape:
            raise ValueError(f"link array shape {v.shape} != {self.geometry.link_shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("link field has non-finite entries")
        if not self.geometry.periodic and np.any(v[~self.geometry.link_mask()] != 0.0):
            raise ValueError("open boundary links (n_mu = N) must be zero")
        object.__setattr__(self, "values", _readonly(v))

    @classmethod
    def zeros(cls, geometry: LatticeGeometry) -> "LinkField":
        return cls(geometry, np.zeros(geometry.link_shape))

    def __call__(self, mu: int, *coords: int) -> float:
        """A_mu at 1-based site ``coords``."""
        return float(self.values[self.geometry.index(coords) + (mu,)])

    def component(self, mu: int) -> np.ndarray:
        return self.values[..., mu]

    def __add__(self, other: "LinkField") -> "LinkField":
        if other.geometry != self.geometry:
            raise ValueError("geometry mismatch")
        return LinkField(self.geometry, self.values + other.values)


@dataclass(frozen=True)
class PlaquetteField:
    """Field strength F_{mu nu}(n), antisymmetric in (mu, nu).

    ``values`` has shape ``shape + (D, D)``.  ``mask`` marks the plaquettes
    that exist; entries outside it are zero and never enter any sum.
    """

    geometry: LatticeGeometry
    values: np.ndarray
    mask: np.ndarray = field(default=None)

    def __post_init__(self):
        g = self.geometry
        v = np.asarray(self.values, dtype=float)
        if v.shape != g.shape + (g.dim, g.dim):
            raise ValueError(f"plaquette array shape {v.shape} is wrong for {g}")
        mask = g.plaquette_mask() if self.mask is None else np.asarray(self.mask, dtype=bool)
        v = np.where(mask, v, 0.0)
        if not np.allclose(v, -np.swapaxes(v, -1, -2), rtol=0, atol=0):
            raise ValueError("plaquette field must be antisymmetric")
        object.__setattr__(self, "values", _readonly(v))
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    def __call__(self, mu: int, nu: int, *coords: int) -> float:
        return float(self.values[self.geometry.index(coords) + (mu, nu)])

    def component(self, mu: int, nu: int) -> np.ndarray:
        return self.values[..., mu, nu]


def _forward(a: np.ndarray, axis: int) -> np.ndarray:
    """a(n + axis-hat), wrapping periodically; callers mask OBC edges."""
    return np.roll(a, -1, axis=axis)


def field_strength(links: LinkField) -> PlaquetteField:
    """F_{mu nu}(n) = A_nu(n+mu) - A_nu(n) - A_mu(n+nu) + A_mu(n).

    Open boundaries: plaquettes that would need a site beyond ``N`` are
    outside the domain (zero, masked), not zero-padded evaluations.
    """
    g = links.geometry
    A = links.values
    F = np.zeros(g.shape + (g.dim, g.dim))
    for mu in range(g.dim):
        for nu in range(mu + 1, g.dim):
            f = _forward(A[..., nu], mu) - A[..., nu] - _forward(A[..., mu], nu) + A[..., mu]
            F[..., mu, nu] = f
            F[..., nu, mu] = -f
    mask = g.plaquette_mask()
    return PlaquetteField(g, np.where(mask, F, 0.0), mask)


def bianchi_residual(plaq: PlaquetteField) -> float:
    """Largest violation of the six-term lattice Bianchi identity.

    Runs over every site and ordered triple of distinct directions whose
    elementary cube lies inside the plaquette domain.
    """
    g = plaq.geometry
    if g.dim < 3:
        raise ValueError("the Bianchi identity needs at least three directions")
    F = plaq.values
    worst = 0.0
    for mu, nu, al in permutations(range(g.dim), 3):
        r = (
            _forward(F[..., mu, nu], al) - F[..., mu, nu]
            + _forward(F[..., al, mu], nu) - F[..., al, mu]
            + _forward(F[..., nu, al], mu) - F[..., nu, al]
        )
        if not g.periodic:
            cube = np.ones(g.shape, dtype=bool)
            for ax in (mu, nu, al):
                cube[_axis_slice(g.dim, ax, g.size - 1)] = False
            r = r[cube]
        if r.size:
            worst = max(worst, float(np.max(np.abs(r))))
    return worst


def apply_gauge_transformation(links: LinkField, lam) -> LinkField:
    """A_mu(n) -> A_mu(n) + lam(n + mu) - lam(n).

    ``lam`` is a ``VertexScalarField`` or an array of shape ``geometry.shape``.
    With open boundaries only physical links change; the links leaving the
    lattice stay zero.
    """
    g = links.geometry
    lam = lam.values if isinstance(lam, VertexScalarField) else np.asarray(lam, dtype=float)
    if lam.shape != g.shape:
        raise ValueError(f"gauge function shape {lam.shape} != {g.shape}")
    if not np.all(np.isfinite(lam)):
        raise ValueError("gauge function has non-finite entries")
    grad = np.stack([_forward(lam, mu) - lam for mu in range(g.dim)], axis=-1)
    if not g.periodic:
        grad = np.where(g.link_mask(), grad, 0.0)
    return LinkField(g, links.values + grad)


def wilson_lines(links: LinkField, mu: int) -> np.ndarray:
    """f_mu for every straight line along mu; axis mu is summed out."""
    if not links.geometry.periodic:
        raise ValueError("Wilson lines are only defined with periodic boundaries")
    return links.values[..., mu].sum(axis=mu)


def wilson_line_sum(links: LinkField, mu: int, transverse: Sequence[int]) -> float:
    """Sum of A_mu along the line at the given 1-based transverse coordinates.

    ``transverse`` lists the coordinates of the other directions in
    increasing direction order.
    """
    g = links.geometry
    if len(transverse) != g.dim - 1:
        raise ValueError(f"expected {g.dim - 1} transverse coordinates")
    idx = tuple((int(c) - 1) % g.size for c in transverse)
    return float(wilson_lines(links, mu)[idx])


def random_links(geometry: LatticeGeometry, rng: np.random.Generator) -> LinkField:
    """Links drawn uniformly from [-pi, pi); OBC boundary links set to zero."""
    v = rng.uniform(-np.pi, np.pi, size=geometry.link_shape)
    if not geometry.periodic:
        v = np.where(geometry.link_mask(), v, 0.0)
    return LinkField(geometry, v)


# ---------------------------------------------------------------------------
# JSON link files

def links_to_json(links: LinkField) -> dict:
    g = links.geometry
    rows = []
    for idx in np.ndindex(*g.shape):
        coords = [i + 1 for i in idx]
        for mu in range(g.dim):
            rows.append(coords + [mu, float(links.values[idx + (mu,)])])
    return {**g.to_dict(), "links": rows}


def links_from_json(doc: dict) -> LinkField:
    g = LatticeGeometry(int(doc["dim"]), int(doc["size"]), BoundaryCondition(doc["bc"]))
    values = np.zeros(g.link_shape)
    seen = np.zeros(g.link_shape, dtype=bool)
    for row in doc["links"]:
        if len(row) != g.dim + 2:
            raise ValueError(f"malformed link entry {row!r}")
        *coords, mu, value = row
        mu = int(mu)
        if not 0 <= mu < g.dim:
            raise ValueError(f"direction {mu} out of range")
        if any(not 1 <= int(c) <= g.size for c in coords):
            raise ValueError(f"site {coords} outside the lattice")
        key = tuple(int(c) - 1 for c in coords) + (mu,)
        if seen[key]:
            raise ValueError(f"duplicate link entry for site {coords}, mu={mu}")
        seen[key] = True
        values[key] = float(value)
    if not seen.all():
        missing = np.argwhere(~seen)[0]
        raise ValueError(f"missing link entry, first at site {list(missing[:-1] + 1)}, mu={missing[-1]}")
    return LinkField(g, values)


def save_links(links: LinkField, path) -> None:
    Path(path).write_text(json.dumps(links_to_json(links)))


def load_links(path) -> LinkField:
    return links_from_json(json.loads(Path(path).read_text()))
