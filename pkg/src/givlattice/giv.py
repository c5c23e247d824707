"""Change of variables A_mu <-> {phi, strips, loops}.

Two constructions are supported:

* asymmetric, any dimension and either boundary condition.  A_0 is a pure
  gradient of the vertex field; every other component picks up the plaquette
  strips F̄_{mu nu} (nu < mu), each living on the hyperplane where the first
  nu coordinates are pinned to N.
* symmetric, in two dimensions (both strip families with weight 1/2), plus
  the uniform-field three-dimensional variant used by the Hofstadter module
  (weights 2/3 and 1/3).

With periodic boundaries the links leaving the fundamental domain are
carried by gauge invariant loop variables f̄_mu, and the sector is fixed by
transition functions and a twist tensor (``TransitionData``).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .lattice import (
    BoundaryCondition,
    LatticeGeometry,
    LinkField,
    VertexScalarField,
    _axis_slice,
    _readonly,
    field_strength,
)

__all__ = [
    "Construction",
    "StripField",
    "LoopField",
    "TransitionData",
    "GaugeInvariantRep",
    "DofCount",
    "TwistReport",
    "strip_domain",
    "extract_giv",
    "reconstruct_links",
    "dof_count",
    "count_variables",
    "asym_to_sym_shift",
    "verify_twisted_bc",
    "strip_dependency_residual",
    "random_rep",
    "rep_to_json",
    "rep_from_json",
]

COCYCLE_TOL = 1e-12


class Construction(str, enum.Enum):
    ASYMMETRIC = "asymmetric"
    SYMMETRIC = "symmetric"


def _check_supported(geometry: LatticeGeometry, construction: Construction, *, extraction: bool):
    if construction is Construction.SYMMETRIC:
        if geometry.dim == 2:
            return
        if geometry.dim == 3 and geometry.periodic and not extraction:
            return
        what = "extraction" if extraction else "reconstruction"
        raise ValueError(f"symmetric {what} is not available for dim={geometry.dim}, bc={geometry.bc.value}")


def strip_keys(dim: int, construction: Construction) -> list[tuple[int, int]]:
    if construction is Construction.ASYMMETRIC:
        return [(mu, nu) for mu in range(dim) for nu in range(mu)]
    if dim == 2:
        return [(1, 0), (0, 1)]
    return [(mu, nu) for mu in range(dim) for nu in range(dim) if mu != nu]


def strip_domain(geometry: LatticeGeometry, mu: int, nu: int, pinned: bool = True) -> np.ndarray:
    """Sites carrying an independent strip value F̄_{mu nu}.

    Requires n_mu < N and n_nu < N.  When ``pinned`` (asymmetric
    construction) the first nu coordinates are additionally fixed to N.
    """
    D, N = geometry.dim, geometry.size
    dom = np.ones(geometry.shape, dtype=bool)
    dom[_axis_slice(D, mu, N - 1)] = False
    dom[_axis_slice(D, nu, N - 1)] = False
    if pinned:
        for ax in range(nu):
            dom[_axis_slice(D, ax, slice(0, N - 1))] = False
    return dom


@dataclass(frozen=True)
class StripField:
    """Plaquette strip F̄_{mu nu}: sum of F_{mu nu} along nu up to the boundary."""

    geometry: LatticeGeometry
    mu: int
    nu: int
    values: np.ndarray
    pinned: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.geometry.shape:
            raise ValueError(f"strip array shape {v.shape} != {self.geometry.shape}")
        if np.any(v[~self.domain] != 0.0):
            raise ValueError(f"strip ({self.mu},{self.nu}) is nonzero outside its domain")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def domain(self) -> np.ndarray:
        return strip_domain(self.geometry, self.mu, self.nu, self.pinned)

    def pinned_values(self) -> np.ndarray:
        """The strip as a function of the unpinned coordinates, broadcast to the full lattice."""
        if not self.pinned:
            return self.values
        sub = self.values[(self.geometry.size - 1,) * self.nu]
        return np.broadcast_to(sub, self.geometry.shape)


@dataclass(frozen=True)
class LoopField:
    """Gauge invariant loop f̄_mu, one value per line along mu.

    ``values`` has shape ``(N,) * (D - 1)``, indexed by the transverse
    coordinates in increasing direction order.
    """

    geometry: LatticeGeometry
    mu: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.geometry.size,) * (self.geometry.dim - 1):
            raise ValueError(f"loop array shape {v.shape} is wrong")
        object.__setattr__(self, "values", _readonly(v))


@dataclass(frozen=True)
class TransitionData:
    """Transition functions phi_nu and twist tensor phi_{mu nu} of a periodic sector.

    ``functions[nu]`` holds phi_nu on the box of 1-based coordinates
    ``1..2N`` in every direction (array shape ``(2N,) * D``), which covers
    every argument ``n + N mu`` with ``n`` in the lattice.  ``twist[a, b]``
    is phi_{ab}.
    """

    geometry: LatticeGeometry
    functions: np.ndarray
    twist: np.ndarray

    def __post_init__(self):
        g = self.geometry
        if not g.periodic:
            raise ValueError("transition data only exists with periodic boundaries")
        f = np.asarray(self.functions, dtype=float)
        if f.shape != (g.dim,) + (2 * g.size,) * g.dim:
            raise ValueError(f"transition function array has shape {f.shape}")
        tw = np.asarray(self.twist, dtype=float)
        if tw.shape != (g.dim, g.dim) or np.any(tw != -tw.T):
            raise ValueError("twist tensor must be an antisymmetric D x D matrix")
        object.__setattr__(self, "functions", _readonly(f))
        object.__setattr__(self, "twist", _readonly(tw))

    @classmethod
    def zeros(cls, geometry: LatticeGeometry) -> "TransitionData":
        D, N = geometry.dim, geometry.size
        return cls(geometry, np.zeros((D,) + (2 * N,) * D), np.zeros((D, D)))

    @classmethod
    def from_functions(cls, geometry: LatticeGeometry,
                       functions: Sequence[Callable | float],
                       twist=None) -> "TransitionData":
        """Tabulate phi_nu from callables of the 1-based coordinate grids.

        Each entry is either a constant or ``f(*coords) -> array``.
        """
        D, N = geometry.dim, geometry.size
        grids = tuple(np.indices((2 * N,) * D) + 1)
        tab = np.zeros((D,) + (2 * N,) * D)
        for nu, f in enumerate(functions):
            tab[nu] = f(*grids) if callable(f) else float(f)
        tw = np.zeros((D, D)) if twist is None else np.asarray(twist, dtype=float)
        return cls(geometry, tab, tw)

    def on_lattice(self, nu: int) -> np.ndarray:
        """phi_nu restricted to the lattice sites 1..N."""
        return self.functions[nu][(slice(0, self.geometry.size),) * self.geometry.dim]

    def cocycle_violation(self) -> float:
        """max |phi_nu(n+N mu) + phi_mu(n) - phi_mu(n+N nu) - phi_nu(n) - phi_{nu mu}|."""
        D, N = self.geometry.dim, self.geometry.size
        worst = 0.0
        for mu in range(D):
            for nu in range(D):
                if mu == nu:
                    continue
                lhs = _shifted(self.functions[nu], mu, N) + self.on_lattice(mu)
                rhs = _shifted(self.functions[mu], nu, N) + self.on_lattice(nu) + self.twist[nu, mu]
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst


def _shifted(table: np.ndarray, axis: int, offset: int, extra_axis: int | None = None,
             extra: int = 0) -> np.ndarray:
    """Lattice-sized window of a ``(2N,)*D`` table, displaced along ``axis``."""
    N = table.shape[0] // 2
    sl = [slice(0, N)] * table.ndim
    sl[axis] = slice(offset, offset + N)
    if extra_axis is not None:
        s = sl[extra_axis]
        sl[extra_axis] = slice(s.start + extra, s.stop + extra)
    return table[tuple(sl)]


@dataclass(frozen=True)
class GaugeInvariantRep:
    """The gauge invariant variables of one link configuration.

    ``phi`` is normalised by phi(N, ..., N) = 0.  ``strips`` maps (mu, nu)
    to ``StripField``; ``loops`` maps mu to ``LoopField`` and is empty for
    open boundaries, as is ``transition``.
    """

    geometry: LatticeGeometry
    construction: Construction
    phi: VertexScalarField
    strips: Mapping[tuple[int, int], StripField]
    loops: Mapping[int, LoopField] = field(default_factory=dict)
    transition: TransitionData | None = None

    def __post_init__(self):
        g = self.geometry
        object.__setattr__(self, "construction", Construction(self.construction))
        _check_supported(g, self.construction, extraction=False)
        if not isinstance(self.phi, VertexScalarField):
            object.__setattr__(self, "phi", VertexScalarField(g, self.phi))
        if self.phi.values[(g.size - 1,) * g.dim] != 0.0:
            raise ValueError("vertex field must satisfy phi(N, ..., N) = 0")
        expected = set(strip_keys(g.dim, self.construction))
        if set(self.strips) != expected:
            raise ValueError(f"strip components {sorted(self.strips)} != {sorted(expected)}")
        pinned = self.construction is Construction.ASYMMETRIC
        for key, s in self.strips.items():
            if (s.mu, s.nu) != key or s.geometry != g or s.pinned != pinned:
                raise ValueError(f"strip {key} is inconsistent with the representation")
        if g.periodic:
            if set(self.loops) != set(range(g.dim)):
                raise ValueError("periodic representation needs one loop field per direction")
            if self.transition is None:
                object.__setattr__(self, "transition", TransitionData.zeros(g))
            if self.transition.cocycle_violation() > COCYCLE_TOL * _scale(self.transition):
                raise ValueError("transition data violates the cocycle condition")
        else:
            if self.loops:
                raise ValueError("open boundaries carry no loop variables")
            if self.transition is not None:
                raise ValueError("transition data is not allowed with open boundaries")

    def strip(self, mu: int, nu: int) -> StripField:
        return self.strips[(mu, nu)]


def _scale(t: TransitionData) -> float:
    return max(1.0, float(np.max(np.abs(t.functions), initial=0.0)), float(np.max(np.abs(t.twist))))


@dataclass(frozen=True)
class DofCount:
    n_phi: int
    n_strips: int
    n_loops: int
    n_links: int

    @property
    def total(self) -> int:
        return self.n_phi + self.n_strips + self.n_loops

    def balanced(self) -> bool:
        return self.total == self.n_links


# ---------------------------------------------------------------------------
# extraction

def _revsum_to_boundary(a: np.ndarray, axis: int) -> np.ndarray:
    """R(i) = sum_{k=i}^{N-2} a(k) along ``axis``; the last slice is excluded."""
    a = np.array(a, copy=True)
    a[_axis_slice(a.ndim, axis, -1)] = 0.0
    return np.flip(np.cumsum(np.flip(a, axis=axis), axis=axis), axis=axis)


def _strips_from_plaquettes(F: np.ndarray, geometry: LatticeGeometry,
                            construction: Construction) -> dict[tuple[int, int], StripField]:
    pinned = construction is Construction.ASYMMETRIC
    out = {}
    for mu, nu in strip_keys(geometry.dim, construction):
        s = _revsum_to_boundary(F[..., mu, nu], nu)
        dom = strip_domain(geometry, mu, nu, pinned)
        out[(mu, nu)] = StripField(geometry, mu, nu, np.where(dom, s, 0.0), pinned)
    return out


def _tree_phi(A: np.ndarray, geometry: LatticeGeometry) -> np.ndarray:
    """Vertex field with A_0 = Δ_0 phi, phi(N..N) = 0.

    phi(n) is minus the sum of links along the path that runs from n to the
    corner first along direction 0, then along 1, and so on.  On each
    hyperplane n_0 = ... = n_{a-1} = N this fixes the residual freedom so that
    the boundary links in direction a are pure gradients.
    """
    D, N = geometry.dim, geometry.size
    phi = np.zeros(())
    for a in range(D - 1, -1, -1):
        # links along a on the hyperplane where directions < a are pinned to N
        comp = A[(N - 1,) * a + (Ellipsis, a)]
        phi = -_revsum_to_boundary(comp, 0) + phi
    return phi


def extract_giv(links: LinkField, construction: Construction | str = Construction.ASYMMETRIC,
                transition: TransitionData | None = None) -> GaugeInvariantRep:
    """Compute {phi, strips, loops} from a link configuration."""
    g = links.geometry
    construction = Construction(construction)
    _check_supported(g, construction, extraction=True)
    if g.periodic:
        transition = TransitionData.zeros(g) if transition is None else transition
        if transition.geometry != g:
            raise ValueError("transition data geometry mismatch")
        if transition.cocycle_violation() > COCYCLE_TOL * _scale(transition):
            raise ValueError("transition data violates the cocycle condition")
    elif transition is not None:
        raise ValueError("transition data is not allowed with open boundaries")

    A = links.values
    F = field_strength(links).values
    phi = _tree_phi(A, g)
    if construction is Construction.SYMMETRIC:
        phi = phi + 0.5 * _double_back_sum(F[..., 0, 1])
    strips = _strips_from_plaquettes(F, g, construction)

    loops = {}
    if g.periodic:
        for mu in range(g.dim):
            f = A[..., mu].sum(axis=mu)
            offset = transition.on_lattice(mu)[_axis_slice(g.dim, mu, 0)]
            loops[mu] = LoopField(g, mu, f - offset)
    return GaugeInvariantRep(g, construction, VertexScalarField(g, phi), strips, loops,
                             transition if g.periodic else None)


def _double_back_sum(f01: np.ndarray) -> np.ndarray:
    """sum_{k=0}^{N-n_0-1} sum_{l=0}^{N-n_1-1} F(n + k 0 + l 1)."""
    return _revsum_to_boundary(_revsum_to_boundary(f01, 0), 1)


# ---------------------------------------------------------------------------
# reconstruction

def _strip_terms(rep: GaugeInvariantRep) -> list[np.ndarray]:
    """Strip contribution to each link component (bulk links only)."""
    g = rep.geometry
    D = g.dim
    terms = [np.zeros(g.shape) for _ in range(D)]
    if rep.construction is Construction.ASYMMETRIC:
        for (mu, nu), s in rep.strips.items():
            terms[mu] = terms[mu] + s.pinned_values()
    elif D == 2:
        terms[0] = 0.5 * rep.strip(0, 1).values
        terms[1] = 0.5 * rep.strip(1, 0).values
    else:
        for mu in range(D):
            prev, nxt = (mu - 1) % D, (mu + 1) % D
            terms[mu] = (2.0 * rep.strip(mu, prev).values + rep.strip(mu, nxt).values) / 3.0
    return terms


def reconstruct_links(rep: GaugeInvariantRep) -> LinkField:
    """Rebuild A_mu from the gauge invariant variables.

    Bulk links: A_mu(n) = strip term + phi(n+mu) - phi(n).  With periodic
    boundaries the link leaving the fundamental domain closes the line sum:
    A_mu(n_mu=N) = f_mu - (bulk strip terms on the line) - phi(N) + phi(1),
    where f_mu = f̄_mu + phi_mu(n_mu = 1).
    """
    g = rep.geometry
    D, N = g.dim, g.size
    phi = rep.phi.values
    terms = _strip_terms(rep)
    A = np.zeros(g.link_shape)
    for mu in range(D):
        a = terms[mu] + np.roll(phi, -1, axis=mu) - phi
        last = _axis_slice(D, mu, N - 1)
        if g.periodic:
            bulk_strip = terms[mu][_axis_slice(D, mu, slice(0, N - 1))].sum(axis=mu)
            f = rep.loops[mu].values + rep.transition.on_lattice(mu)[_axis_slice(D, mu, 0)]
            a[last] = f - bulk_strip - phi[last] + phi[_axis_slice(D, mu, 0)]
        else:
            a[last] = 0.0
        A[..., mu] = a
    return LinkField(g, A)


# ---------------------------------------------------------------------------
# counting

def dof_count(geometry: LatticeGeometry,
              construction: Construction | str = Construction.ASYMMETRIC) -> DofCount:
    """Closed-form counts; identical for both constructions."""
    Construction(construction)
    N, d = geometry.size, geometry.dim - 1
    n_phi = N ** (d + 1) - 1
    n_strips = d * N ** (d + 1) - (d + 1) * N**d + 1
    if geometry.periodic:
        return DofCount(n_phi, n_strips, (d + 1) * N**d, (d + 1) * N ** (d + 1))
    return DofCount(n_phi, n_strips, 0, (d + 1) * N**d * (N - 1))


def count_variables(rep: GaugeInvariantRep) -> DofCount:
    """Enumerate the independent variables stored in ``rep``.

    For the two-dimensional symmetric construction F̄_01 is fixed by F̄_10
    (see ``strip_dependency_residual``), so only the F̄_10 family counts.
    """
    g = rep.geometry
    if rep.construction is Construction.SYMMETRIC:
        if g.dim != 2:
            raise ValueError("the uniform-field symmetric representation has no independent-variable count")
        families = [rep.strip(1, 0)]
    else:
        families = list(rep.strips.values())
    n_phi = int(rep.phi.values.size) - 1
    n_strips = int(sum(np.count_nonzero(s.domain) for s in families))
    n_loops = int(sum(lp.values.size for lp in rep.loops.values()))
    return DofCount(n_phi, n_strips, n_loops, g.n_links)


# ---------------------------------------------------------------------------
# constructions and checks

def asym_to_sym_shift(rep: GaugeInvariantRep) -> GaugeInvariantRep:
    """Gauge shift from the asymmetric to the symmetric 2d representation.

    phi~ = phi + 1/2 sum_k sum_l F_01(n + k 0 + l 1); F̄_01 is rebuilt from
    the plaquettes encoded by F̄_10.
    """
    g = rep.geometry
    if g.dim != 2 or rep.construction is not Construction.ASYMMETRIC:
        raise ValueError("asym_to_sym_shift needs an asymmetric representation in two dimensions")
    s10 = rep.strip(1, 0).values
    interior = strip_domain(g, 1, 0)
    f10 = np.where(interior, s10 - _shift_in(s10, 0), 0.0)
    f01 = -f10
    phi = rep.phi.values + 0.5 * _double_back_sum(f01)
    strips = {
        # nu = 0 strips pin nothing, so only the flag changes
        (1, 0): StripField(g, 1, 0, s10, False),
        (0, 1): StripField(g, 0, 1, np.where(interior, _revsum_to_boundary(f01, 1), 0.0), False),
    }
    return GaugeInvariantRep(g, Construction.SYMMETRIC, VertexScalarField(g, phi), strips,
                             dict(rep.loops), rep.transition)


def _shift_in(a: np.ndarray, axis: int) -> np.ndarray:
    """a(n + axis-hat) with zero beyond the last site."""
    out = np.zeros_like(a)
    src = _axis_slice(a.ndim, axis, slice(1, None))
    dst = _axis_slice(a.ndim, axis, slice(0, -1))
    out[dst] = a[src]
    return out


def strip_dependency_residual(rep: GaugeInvariantRep) -> float:
    """max_n |F̄_01(n) - F̄_01(n+1) + F̄_10(n) - F̄_10(n+0)| over interior sites.

    The two differences are F_01(n) and F_10(n), so the sum vanishes whenever
    both families come from the same links.
    """
    g = rep.geometry
    if rep.construction is not Construction.SYMMETRIC or g.dim != 2:
        raise ValueError("strip dependency is defined for the 2d symmetric construction")
    s01 = rep.strip(0, 1).values
    s10 = rep.strip(1, 0).values
    r = s01 - _shift_in(s01, 1) + s10 - _shift_in(s10, 0)
    interior = strip_domain(g, 1, 0, pinned=False)
    return float(np.max(np.abs(r[interior]), initial=0.0))


@dataclass(frozen=True)
class TwistReport:
    """Per-check maximum violations of the twisted periodic boundary conditions."""

    cocycle: float
    phi_shift: float
    strip_periodicity: float
    loop_twist: float

    @property
    def max_violation(self) -> float:
        return max(self.cocycle, self.phi_shift, self.strip_periodicity, self.loop_twist)

    def as_dict(self) -> dict:
        return {
            "cocycle": self.cocycle,
            "phi_shift": self.phi_shift,
            "strip_periodicity": self.strip_periodicity,
            "loop_twist": self.loop_twist,
        }


def verify_twisted_bc(rep: GaugeInvariantRep) -> TwistReport:
    """Check the periodic sector of ``rep`` against its transition data.

    The links are continued into each neighbouring copy n + N delta with
    A_mu(n + N delta) = A_mu(n) + phi_delta(n + mu) - phi_delta(n).  On that
    copy we check that the bulk links are reproduced by the vertex field
    continued as phi(n + N delta) = phi(n) + phi_delta(n), that the strips
    recomputed there equal the stored ones, and that the loops shift by the
    twist tensor, f̄_mu(n + N delta) = f̄_mu(n) + phi_{delta mu}.
    """
    g = rep.geometry
    if not g.periodic:
        raise ValueError("twisted boundary conditions need periodic boundaries")
    D, N = g.dim, g.size
    T = rep.transition
    A = reconstruct_links(rep).values
    phi = rep.phi.values
    terms = _strip_terms(rep)

    phi_err = strip_err = loop_err = 0.0
    for delta in range(D):
        table = T.functions[delta]
        here = T.on_lattice(delta)
        ext = np.empty_like(A)
        for mu in range(D):
            ext[..., mu] = A[..., mu] + _shifted(table, mu, 1) - here
        # continued vertex field on the copy, valid where n + mu stays inside it
        phi_copy = phi + here
        for mu in range(D):
            pred = terms[mu] + np.roll(phi_copy, -1, axis=mu) - phi_copy
            bulk = _axis_slice(D, mu, slice(0, N - 1))
            phi_err = max(phi_err, float(np.max(np.abs(pred[bulk] - ext[..., mu][bulk]))))
        F = np.zeros(g.shape + (D, D))
        for mu in range(D):
            for nu in range(D):
                if mu != nu:
                    F[..., mu, nu] = (np.roll(ext[..., nu], -1, mu) - ext[..., nu]
                                      - np.roll(ext[..., mu], -1, nu) + ext[..., mu])
        for key, s in _strips_from_plaquettes(F, g, rep.construction).items():
            strip_err = max(strip_err, float(np.max(np.abs(s.values - rep.strips[key].values))))
        for mu in range(D):
            if mu == delta:
                continue
            f_shift = ext[..., mu].sum(axis=mu)
            offset = _shifted(T.functions[mu], delta, N)[_axis_slice(D, mu, 0)]
            expected = rep.loops[mu].values + T.twist[delta, mu]
            loop_err = max(loop_err, float(np.max(np.abs(f_shift - offset - expected))))
    return TwistReport(T.cocycle_violation(), phi_err, strip_err, loop_err)


# ---------------------------------------------------------------------------
# random representations

def random_rep(geometry: LatticeGeometry, rng: np.random.Generator,
               construction: Construction | str = Construction.ASYMMETRIC) -> GaugeInvariantRep:
    """Independent uniform [-pi, pi) values for every free variable."""
    construction = Construction(construction)
    _check_supported(geometry, construction, extraction=True)
    if construction is Construction.SYMMETRIC:
        return asym_to_sym_shift(random_rep(geometry, rng))
    g = geometry
    phi = rng.uniform(-np.pi, np.pi, g.shape)
    phi[(g.size - 1,) * g.dim] = 0.0
    strips = {}
    for mu, nu in strip_keys(g.dim, construction):
        dom = strip_domain(g, mu, nu)
        strips[(mu, nu)] = StripField(g, mu, nu, np.where(dom, rng.uniform(-np.pi, np.pi, g.shape), 0.0))
    loops = {}
    if g.periodic:
        for mu in range(g.dim):
            loops[mu] = LoopField(g, mu, rng.uniform(-np.pi, np.pi, (g.size,) * (g.dim - 1)))
    return GaugeInvariantRep(g, construction, VertexScalarField(g, phi), strips, loops)


# ---------------------------------------------------------------------------
# JSON

def _site_rows(values: np.ndarray, mask: np.ndarray | None = None) -> list:
    rows = []
    for idx in np.ndindex(*values.shape):
        if mask is None or mask[idx]:
            rows.append([i + 1 for i in idx] + [float(values[idx])])
    return rows


def rep_to_json(rep: GaugeInvariantRep) -> dict:
    g = rep.geometry
    doc = {
        **g.to_dict(),
        "construction": rep.construction.value,
        "phi": _site_rows(rep.phi.values),
        "strips": {f"{mu},{nu}": _site_rows(s.values, s.domain) for (mu, nu), s in rep.strips.items()},
        "loops": {str(mu): _site_rows(lp.values) for mu, lp in rep.loops.items()},
        "transition": None,
    }
    if rep.transition is not None:
        doc["transition"] = {
            "functions": rep.transition.functions.tolist(),
            "twist": rep.transition.twist.tolist(),
        }
    return doc


def _fill(shape, rows, what: str) -> np.ndarray:
    out = np.zeros(shape)
    seen = np.zeros(shape, dtype=bool)
    for row in rows:
        idx = tuple(int(c) - 1 for c in row[:-1])
        if len(idx) != len(shape) or any(not 0 <= i < n for i, n in zip(idx, shape)):
            raise ValueError(f"{what}: bad coordinates {row[:-1]}")
        if seen[idx]:
            raise ValueError(f"{what}: duplicate entry {row[:-1]}")
        seen[idx] = True
        out[idx] = float(row[-1])
    return out, seen


def rep_from_json(doc: dict) -> GaugeInvariantRep:
    g = LatticeGeometry(int(doc["dim"]), int(doc["size"]), BoundaryCondition(doc["bc"]))
    construction = Construction(doc["construction"])
    phi, seen = _fill(g.shape, doc["phi"], "phi")
    if not seen.all():
        raise ValueError("phi: missing sites")
    pinned = construction is Construction.ASYMMETRIC
    strips = {}
    for key, rows in doc["strips"].items():
        mu, nu = (int(x) for x in key.split(","))
        vals, seen = _fill(g.shape, rows, f"strip {key}")
        if not np.array_equal(seen, strip_domain(g, mu, nu, pinned)):
            raise ValueError(f"strip {key}: entries do not cover exactly its domain")
        strips[(mu, nu)] = StripField(g, mu, nu, vals, pinned)
    loops = {}
    for key, rows in (doc.get("loops") or {}).items():
        vals, seen = _fill((g.size,) * (g.dim - 1), rows, f"loop {key}")
        if not seen.all():
            raise ValueError(f"loop {key}: missing lines")
        loops[int(key)] = LoopField(g, int(key), vals)
    transition = None
    if doc.get("transition"):
        transition = TransitionData(g, np.array(doc["transition"]["functions"]),
                                    np.array(doc["transition"]["twist"]))
    return GaugeInvariantRep(g, construction, VertexScalarField(g, phi), strips, loops, transition)


def save_rep(rep: GaugeInvariantRep, path) -> None:
    Path(path).write_text(json.dumps(rep_to_json(rep)))


def load_rep(path) -> GaugeInvariantRep:
    return rep_from_json(json.loads(Path(path).read_text()))
