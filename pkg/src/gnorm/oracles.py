"""Independent sampling-based references for the conic machinery.

Nothing here touches the solver: members are generated by mixing the stored
interior point with random span directions pushed to the cone boundary by
bisection, and the norm bounds are the elementary sandwich

    max over sampled dual members y of |y^(1/2) x y^(1/2)|_1
        <=  |x|_B  <=
    min over sampled members b of |b^(-1/2) x b^(-1/2)|,

sound for any sample quality.  ``grid_hmin`` brute-forces the conditional
min-entropy of a two-qubit-conditioning system over a Bloch-ball grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .hermitian import HermitianMatrix, trace_pair
from .norms import base_norm_singleton, order_unit_norm_singleton
from .sections import Section, dual_section

BOUNDARY_BACKOFF = 0.98


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Deterministically generated members of one section."""

    section: Section
    points: tuple[HermitianMatrix, ...]
    seed: int


def sample_section(section: Section, n: int, seed: int = 0) -> SampleSet:
    """Draw n members: interior point plus a random in-slice direction,
    scaled by bisection to stay inside the cone, then a random convex pull
    back toward the interior."""
    rng = np.random.default_rng(seed)
    b0 = section.interior_point
    m = section.span_matrix()
    k = m.shape[1]
    # Span directions tangent to the slice: coefficients orthogonal to the
    # pairing row Tr(J_i n).
    pairing = np.array([trace_pair(j, section.normalizer) for j in section.span_basis])
    p_norm2 = float(pairing @ pairing)
    points = []
    for _ in range(n):
        g = rng.normal(size=k)
        if p_norm2 > 0:
            g = g - (g @ pairing) / p_norm2 * pairing
        nrm = float(np.linalg.norm(g))
        if nrm < 1e-14:
            points.append(section.lift(b0))
            continue
        direction = section.from_span_coords(g / nrm)
        t_max = _bisect_to_boundary(b0, direction)
        t = float(rng.uniform(0.0, BOUNDARY_BACKOFF)) * t_max
        points.append(section.lift(b0 + t * direction))
    return SampleSet(section, tuple(points), seed)


def _bisect_to_boundary(b0: HermitianMatrix, direction: HermitianMatrix) -> float:
    def min_eig(t: float) -> float:
        return float(np.linalg.eigvalsh(b0.entries + t * direction.entries)[0])

    hi = 1.0
    for _ in range(60):
        if min_eig(hi) < 0:
            break
        hi *= 2.0
        if hi > 1e12:
            return 1e12
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if min_eig(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return lo


def norm_lower_bound(section: Section, x: HermitianMatrix, dual_samples: SampleSet) -> float:
    """max over sampled dual members y of |y^(1/2) x y^(1/2)|_1; never above
    the true norm."""
    xc = section.compress(x)
    if xc is None:
        return math.inf
    dual = dual_section(section)
    best = 0.0
    for y in dual_samples.points:
        yc = dual.compress(y)
        if yc is None:
            continue
        best = max(best, base_norm_singleton(yc, xc))
    return best


def norm_upper_bound(section: Section, x: HermitianMatrix, samples: SampleSet) -> float:
    """min over sampled members b of |b^(-1/2) x b^(-1/2)|; never below the
    true norm (off-support samples contribute +inf)."""
    xc = section.compress(x)
    if xc is None:
        return math.inf
    best = math.inf
    for b in samples.points:
        bc = section.compress(b)
        if bc is None:
            continue
        best = min(best, order_unit_norm_singleton(bc, xc))
    return best


def grid_hmin(sigma: HermitianMatrix, resolution: int = 200) -> float:
    """Brute-force conditional min-entropy for a qubit conditioning system.

    Scans conditioning states over a Bloch-ball grid (Fibonacci directions x
    radii, center included) and minimizes log2 of the smallest t with
    sigma <= t I (x) rho.  Converges to the entropy from below as the grid
    refines.
    """
    if len(sigma.subsystem_dims) != 2 or sigma.subsystem_dims[1] != 2:
        raise ShapeError("grid_hmin supports only a 2-dimensional conditioning system")
    d_k = sigma.subsystem_dims[0]
    res = int(resolution)
    pauli = np.array(
        [
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ],
        dtype=complex,
    )

    idx = np.arange(res)
    golden = (1 + math.sqrt(5.0)) / 2
    z = 1.0 - 2.0 * (idx + 0.5) / res
    phi = 2.0 * math.pi * idx / golden
    dirs = np.stack(
        [np.sqrt(1 - z**2) * np.cos(phi), np.sqrt(1 - z**2) * np.sin(phi), z], axis=1
    )
    radii = np.linspace(0.0, 1.0 - 1.0 / res, res)

    # rho = (I + r . pauli) / 2 stacked over the whole grid
    vecs = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
    vecs = np.concatenate([np.zeros((1, 3)), vecs])  # exact center
    rho = 0.5 * (np.eye(2)[None, :, :] + np.einsum("nk,kij->nij", vecs, pauli))

    w, u = np.linalg.eigh(rho)
    w = np.clip(w, 1e-300, None)
    rinv = np.einsum("nik,nk,njk->nij", u, 1.0 / np.sqrt(w), u.conj())
    # assemble I_K (x) rho^(-1/2) blockwise over the grid
    n = rho.shape[0]
    lift = np.zeros((n, 2 * d_k, 2 * d_k), dtype=complex)
    for i in range(d_k):
        lift[:, 2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = rinv
    conj = lift @ sigma.entries[None, :, :] @ lift
    tvals = np.linalg.eigvalsh(conj)[:, -1]
    tvals = np.where(tvals <= 0, np.inf, tvals)
    return float(-np.log2(np.min(tvals)))
