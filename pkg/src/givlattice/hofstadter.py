"""Hofstadter model on 2d/3d periodic lattices.

Real-space Peierls Hamiltonians are built from link configurations; the
uniform flux configuration is produced directly in gauge invariant
variables.  Momentum-space magnetic band matrices exist for the asymmetric
construction (n x n in 2d, n^2 x n^2 in 3d) and the symmetric one
((2n)^2 x (2n)^2 in 2d, (3n)^3 x (3n)^3 in 3d).

Spatial directions x, y, z are lattice directions 0, 1, 2.  The 3d field is
isotropic: F_10 = F_21 = F_02 = Phi.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .eigen import eigh
from .giv import (
    Construction,
    GaugeInvariantRep,
    LoopField,
    StripField,
    reconstruct_links,
    strip_domain,
    strip_keys,
)
from .lattice import (
    BoundaryCondition,
    LatticeGeometry,
    LinkField,
    VertexScalarField,
)

__all__ = [
    "HofstadterParams",
    "RealSpaceHamiltonian",
    "Spectrum",
    "MAX_REAL_SPACE_SITES",
    "uniform_field_giv",
    "real_space_hamiltonian",
    "phase_rotate_basis",
    "band_matrix",
    "band_matrix_order",
    "mbz_grid",
    "spectrum",
    "real_space_spectrum",
    "spectra_coincide",
    "pi_flux_energies",
    "pi_flux_deviation",
    "butterfly",
    "write_spectrum_csv",
    "write_butterfly_csv",
]

MAX_REAL_SPACE_SITES = 4096


def _sym_factor(spatial_dim: int) -> int:
    return 2 if spatial_dim == 2 else 3


@dataclass(frozen=True)
class HofstadterParams:
    """Flux Phi = 2 pi m / n on an N^d periodic lattice with N = kappa * n * j.

    j = 1 for the asymmetric construction, 2 (2d) or 3 (3d) for the
    symmetric one.  ``theta`` holds the loop twists, one per direction.
    """

    spatial_dim: int
    m: int
    n: int
    kappa: int = 1
    t: float = 1.0
    theta: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.spatial_dim not in (2, 3):
            raise ValueError("spatial_dim must be 2 or 3")
        for name in ("m", "n", "kappa"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")
        if math.gcd(self.m, self.n) != 1:
            raise ValueError(f"m={self.m} and n={self.n} are not coprime")
        if not math.isfinite(self.t):
            raise ValueError("hopping t must be finite")
        theta = (0.0,) * self.spatial_dim if self.theta is None else tuple(float(x) for x in self.theta)
        if len(theta) != self.spatial_dim or not all(math.isfinite(x) for x in theta):
            raise ValueError("theta needs one finite value per direction")
        object.__setattr__(self, "theta", theta)

    @property
    def flux(self) -> float:
        return 2 * math.pi * self.m / self.n

    def size(self, construction: Construction | str = Construction.ASYMMETRIC) -> int:
        j = 1 if Construction(construction) is Construction.ASYMMETRIC else _sym_factor(self.spatial_dim)
        return self.kappa * j * self.n

    def geometry(self, construction: Construction | str = Construction.ASYMMETRIC) -> LatticeGeometry:
        return LatticeGeometry(self.spatial_dim, self.size(construction), BoundaryCondition.PERIODIC)

    def sym_numerator(self) -> int:
        """Smallest m* = m (mod n) coprime to j n.

        The symmetric bands are labelled by multiples of Phi/j, which only
        run through all j n residues when m* and j n share no factor.
        """
        jn = _sym_factor(self.spatial_dim) * self.n
        m = self.m
        while math.gcd(m, jn) != 1:
            m += self.n
        return m

    @classmethod
    def for_size(cls, spatial_dim: int, m: int, n: int, size: int,
                 construction: Construction | str = Construction.ASYMMETRIC,
                 t: float = 1.0, theta=None) -> "HofstadterParams":
        j = 1 if Construction(construction) is Construction.ASYMMETRIC else _sym_factor(spatial_dim)
        if size % (j * n):
            raise ValueError(f"N={size} is not a multiple of {j * n} for the {Construction(construction).value} construction")
        return cls(spatial_dim, m, n, size // (j * n), t, theta)


# ---------------------------------------------------------------------------
# uniform field

def uniform_field_giv(params: HofstadterParams,
                      construction: Construction | str = Construction.ASYMMETRIC) -> GaugeInvariantRep:
    """Gauge invariant variables of the uniform flux configuration (phi = 0)."""
    construction = Construction(construction)
    g = params.geometry(construction)
    D, N = g.dim, g.size
    if construction is Construction.ASYMMETRIC:
        phi_flux = params.flux
    else:
        phi_flux = 2 * math.pi * params.sym_numerator() / params.n
    # plaquette value F_{mu nu} of the uniform field
    F = np.zeros((D, D))
    if D == 2:
        F[1, 0] = phi_flux
    else:
        F[1, 0] = F[2, 1] = F[0, 2] = phi_flux
    F -= F.T
    pinned = construction is Construction.ASYMMETRIC
    idx = np.indices(g.shape)
    strips = {}
    for mu, nu in strip_keys(D, construction):
        vals = F[mu, nu] * (N - 1 - idx[nu])
        dom = strip_domain(g, mu, nu, pinned)
        strips[(mu, nu)] = StripField(g, mu, nu, np.where(dom, vals, 0.0), pinned)

    r = np.arange(1, N + 1, dtype=float)
    th = params.theta
    loops = {}
    if D == 2:
        loops[0] = LoopField(g, 0, phi_flux * N * r + th[0])
        loops[1] = LoopField(g, 1, -phi_flux * N * r + th[1])
    else:
        for mu in range(3):
            # transverse axes in increasing order; f̄_mu = Phi N (r_{mu+1} - r_{mu+2})
            a, b = [ax for ax in range(3) if ax != mu]
            ra, rb = np.meshgrid(r, r, indexing="ij")
            coord = {a: ra, b: rb}
            val = phi_flux * N * (coord[(mu + 1) % 3] - coord[(mu + 2) % 3]) + th[mu]
            loops[mu] = LoopField(g, mu, val)
    return GaugeInvariantRep(g, construction, VertexScalarField(g, np.zeros(g.shape)), strips, loops)


# ---------------------------------------------------------------------------
# real space

@dataclass(frozen=True)
class RealSpaceHamiltonian:
    geometry: LatticeGeometry
    matrix: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.matrix, dtype=complex)
        V = self.geometry.n_sites
        if h.shape != (V, V):
            raise ValueError(f"Hamiltonian must be {V}x{V}")
        if np.max(np.abs(h - h.conj().T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(h), initial=0.0)):
            raise ValueError("Hamiltonian is not Hermitian")
        h.setflags(write=False)
        object.__setattr__(self, "matrix", h)

    def eigenvalues(self) -> np.ndarray:
        return eigh(self.matrix).values


def real_space_hamiltonian(links: LinkField, t: float = 1.0) -> RealSpaceHamiltonian:
    """H[r + mu, r] = -t exp(i A_mu(r)) on every link, plus Hermitian conjugates."""
    g = links.geometry
    if not g.periodic:
        raise ValueError("the Hofstadter Hamiltonian needs periodic boundaries")
    if g.n_sites > MAX_REAL_SPACE_SITES:
        raise ValueError(f"{g.n_sites} sites exceeds the dense limit of {MAX_REAL_SPACE_SITES}")
    if not np.all(np.isfinite(links.values)):
        raise ValueError("link values must be finite")
    V = g.n_sites
    site = np.arange(V).reshape(g.shape)
    H = np.zeros((V, V), dtype=complex)
    for mu in range(g.dim):
        src = site.ravel()
        dst = np.roll(site, -1, axis=mu).ravel()
        hop = -t * np.exp(1j * links.values[..., mu].ravel())
        np.add.at(H, (dst, src), hop)
        np.add.at(H, (src, dst), hop.conj())
    return RealSpaceHamiltonian(g, H)


def phase_rotate_basis(H: RealSpaceHamiltonian, phi: VertexScalarField | np.ndarray) -> RealSpaceHamiltonian:
    """H' = U H U^dagger with U = diag(exp(-i phi)), i.e. d = exp(-i phi) c."""
    p = phi.values if isinstance(phi, VertexScalarField) else np.asarray(phi, dtype=float)
    if p.shape != H.geometry.shape:
        raise ValueError("vertex field does not match the Hamiltonian geometry")
    u = np.exp(-1j * p.ravel())
    return RealSpaceHamiltonian(H.geometry, u[:, None] * H.matrix * u.conj()[None, :])


# ---------------------------------------------------------------------------
# momentum space

def band_matrix_order(params: HofstadterParams, construction: Construction | str) -> int:
    n = params.n
    if Construction(construction) is Construction.ASYMMETRIC:
        return n if params.spatial_dim == 2 else n * n
    return (2 * n) ** 2 if params.spatial_dim == 2 else (3 * n) ** 3


def _mbz_widths(params: HofstadterParams, construction: Construction) -> list[int]:
    """Divisor j n_dir of the half-width pi / (j n_dir) per direction (1 = full zone)."""
    n = params.n
    if construction is Construction.ASYMMETRIC:
        return [n, 1] if params.spatial_dim == 2 else [n, n, 1]
    j = _sym_factor(params.spatial_dim)
    return [j * n] * params.spatial_dim


def mbz_grid(params: HofstadterParams, construction: Construction | str) -> list[np.ndarray]:
    """Per-direction lattice momenta 2 pi l / N inside the magnetic Brillouin zone.

    Direction i keeps the l with -N <= 2 w_i l < N, i.e. k in [-pi/w_i, pi/w_i).
    """
    construction = Construction(construction)
    N = params.size(construction)
    out = []
    for w in _mbz_widths(params, construction):
        ls = [l for l in range(-N, N + 1) if -N <= 2 * w * l < N]
        out.append(2 * math.pi * np.array(ls, dtype=float) / N)
    return out


def _check_in_mbz(params: HofstadterParams, construction: Construction, k: Sequence[float]):
    widths = _mbz_widths(params, construction)
    if len(k) != len(widths):
        raise ValueError(f"momentum needs {len(widths)} components")
    for ki, w in zip(k, widths):
        half = math.pi / w
        if not (-half - 1e-12 <= ki < half - 1e-12):
            raise ValueError(f"momentum component {ki} outside [-pi/{w}, pi/{w})")


def _phase(x) -> complex:
    return np.exp(-1j * np.remainder(x, 2 * np.pi))


def band_matrix(params: HofstadterParams, construction: Construction | str, k: Sequence[float]) -> np.ndarray:
    """Magnetic band matrix -t G(k); Hermitian by construction (diag + T + T^dagger).

    Loop twists theta act as a uniform link value theta / N, so G is
    evaluated at the grid momentum shifted by theta / N.
    """
    construction = Construction(construction)
    k = [float(x) for x in k]
    _check_in_mbz(params, construction, k)
    N = params.size(construction)
    k = [ki + th / N for ki, th in zip(k, params.theta)]
    n = params.n
    order = band_matrix_order(params, construction)
    diag = np.zeros(order)
    T = np.zeros((order, order), dtype=complex)
    if construction is Construction.ASYMMETRIC:
        phi = params.flux
        if params.spatial_dim == 2:
            for tau in range(n):
                diag[tau] = 2 * math.cos(math.remainder(k[0] + tau * phi, 2 * math.pi))
                T[tau, (tau + 1) % n] += _phase(k[1])
        else:
            def ix(lam, tau):
                return (lam % n) * n + tau % n
            for lam in range(n):
                for tau in range(n):
                    diag[ix(lam, tau)] = 2 * math.cos(math.remainder(k[0] + lam * phi, 2 * math.pi))
                    T[ix(lam, tau), ix(lam + 1, tau)] += _phase(k[1] + tau * phi)
                    T[ix(lam, tau), ix(lam - 1, tau + 1)] += _phase(k[2])
    else:
        j = _sym_factor(params.spatial_dim)
        L = j * n
        phit = 2 * math.pi * params.sym_numerator() / L
        if params.spatial_dim == 2:
            def ix(tau, lam):
                return (tau % L) * L + lam % L
            for tau in range(L):
                for lam in range(L):
                    T[ix(tau, lam + 1), ix(tau, lam)] += _phase(k[0] + tau * phit)
                    T[ix(tau, lam), ix(tau + 1, lam)] += _phase(k[1] + lam * phit)
        else:
            def ix(tau, eps, lam):
                return ((tau % L) * L + eps % L) * L + lam % L
            for tau in range(L):
                for eps in range(L):
                    for lam in range(L):
                        here = ix(tau, eps, lam)
                        T[ix(tau, eps + 1, lam - 2), here] += _phase(k[0] + tau * phit)
                        T[ix(tau - 2, eps, lam + 1), here] += _phase(k[1] + eps * phit)
                        T[ix(tau + 1, eps - 2, lam), here] += _phase(k[2] + lam * phit)
    G = np.diag(diag).astype(complex) + T + T.conj().T
    return -params.t * G


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with their momentum and band labels, sorted by energy.

    Real-space spectra carry no labels (``momenta`` is empty).
    """

    energies: np.ndarray
    momenta: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    bands: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        order = np.argsort(e, kind="stable")
        object.__setattr__(self, "energies", e[order])
        if len(self.bands):
            object.__setattr__(self, "momenta", np.asarray(self.momenta, dtype=float)[order])
            object.__setattr__(self, "bands", np.asarray(self.bands, dtype=int)[order])

    @property
    def values(self) -> np.ndarray:
        return self.energies

    @property
    def labelled(self) -> bool:
        return len(self.bands) == len(self.energies) and len(self.energies) > 0

    @classmethod
    def from_values(cls, values) -> "Spectrum":
        return cls(np.asarray(values, dtype=float))

    def __len__(self) -> int:
        return len(self.energies)


def spectrum(params: HofstadterParams, construction: Construction | str = Construction.ASYMMETRIC) -> Spectrum:
    """Diagonalise the band matrix at every grid momentum of the MBZ."""
    construction = Construction(construction)
    ks, bands, energies = [], [], []
    for k in itertools.product(*mbz_grid(params, construction)):
        w = eigh(band_matrix(params, construction, k)).values
        ks.extend([k] * len(w))
        bands.extend(range(len(w)))
        energies.extend(w)
    return Spectrum(np.array(energies), np.array(ks), np.array(bands))


def real_space_spectrum(params: HofstadterParams,
                        construction: Construction | str = Construction.ASYMMETRIC) -> Spectrum:
    """Exact diagonalisation of the Peierls Hamiltonian of the uniform flux configuration."""
    links = reconstruct_links(uniform_field_giv(params, construction))
    return Spectrum.from_values(real_space_hamiltonian(links, params.t).eigenvalues())


def spectra_coincide(s1: Spectrum, s2: Spectrum, tol: float = 1e-8) -> dict:
    a, b = np.sort(np.asarray(s1.values)), np.sort(np.asarray(s2.values))
    if a.shape != b.shape:
        return {"size": [int(a.size), int(b.size)], "max_abs_diff": None, "tol": tol, "pass": False}
    diff = float(np.max(np.abs(a - b), initial=0.0))
    return {"size": int(a.size), "max_abs_diff": diff, "tol": tol, "pass": diff <= tol}


def pi_flux_energies(k: np.ndarray, t: float = 1.0) -> np.ndarray:
    """+- 2 t sqrt(sum_i cos^2 k_i), the pi-flux dispersion (last axis of k = direction)."""
    e = 2 * abs(t) * np.sqrt(np.sum(np.cos(np.asarray(k)) ** 2, axis=-1))
    return np.stack([-e, e], axis=-1)


def pi_flux_deviation(spec: Spectrum, t: float = 1.0) -> float:
    """Largest pointwise gap between a labelled spectrum and the pi-flux dispersion.

    At every momentum the bands must be +-E(k), each with the same
    multiplicity.
    """
    if not spec.labelled:
        raise ValueError("pointwise comparison needs a momentum-labelled spectrum")
    ks, inverse = np.unique(spec.momenta, axis=0, return_inverse=True)
    worst = 0.0
    for i, k in enumerate(ks):
        e = np.sort(spec.energies[inverse.ravel() == i])
        exact = np.sort(np.repeat(pi_flux_energies(k, t), len(e) // 2))
        if len(e) % 2:
            return math.inf
        worst = max(worst, float(np.max(np.abs(e - exact))))
    return worst


def butterfly(n_max: int, spatial_dim: int = 2, kappa: int = 1, t: float = 1.0) -> list[tuple[int, int, float]]:
    """(m, n, E) for all coprime 1 <= m <= n <= n_max, asymmetric bands at N = kappa n."""
    if not 1 <= n_max <= 40:
        raise ValueError("n_max must lie in 1..40")
    rows = []
    for n in range(1, n_max + 1):
        for m in range(1, n + 1):
            if math.gcd(m, n) != 1:
                continue
            s = spectrum(HofstadterParams(spatial_dim, m, n, kappa, t))
            rows.extend((m, n, float(e)) for e in s.values)
    return rows


def write_spectrum_csv(spec: Spectrum, path) -> None:
    if not spec.labelled:
        raise ValueError("CSV export needs a momentum-labelled spectrum")
    d = spec.momenta.shape[1]
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"k{i + 1}" for i in range(d)] + ["band", "energy"])
        for k, b, e in zip(spec.momenta, spec.bands, spec.energies):
            w.writerow([f"{x:.17g}" for x in k] + [int(b), f"{e:.17g}"])


def write_butterfly_csv(rows, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "n", "energy"])
        for m, n, e in rows:
            w.writerow([m, n, f"{e:.17g}"])
