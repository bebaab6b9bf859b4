"""Cartan projections, distances to polyhedral cones in the chamber, the
properness criterion and sharpness constants.

Two ambient groups are supported:

* ``SL_n``: chamber = traceless diagonal vectors sorted descending, ``mu(g)``
  is the vector of log singular values.
* ``SL2xSL2`` (the double cover of SO(2,2), our model of AdS^3 symmetry):
  chamber = nonnegative quadrant, ``mu(g1, g2) = (log s1(g1), log s1(g2))``.

The norm on the Cartan subspace is the standard Euclidean one, which is
Weyl-invariant for both kinds. Sharpness constants are relative to it.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog, lsq_linear

from . import kernels
from .errors import DimensionError, InputError, NoDataError

CHAMBER_TOL = 1e-9
DET_TOL = 1e-6
ZERO_MU_TOL = 1e-9
C_FLOOR = 1e-12
PARETO_C_PRIMES = (0.0, 1.0, 2.0, 5.0)


class GroupKind(str, enum.Enum):
    SL_N = "SL_n"
    SL2xSL2 = "SL2xSL2"


@dataclass(frozen=True)
class AmbientGroup:
    kind: GroupKind
    n: int = 2

    def __post_init__(self):
        object.__setattr__(self, "kind", GroupKind(self.kind))
        if self.kind is GroupKind.SL2xSL2:
            object.__setattr__(self, "n", 2)
        elif self.n < 2:
            raise InputError(f"SL_n needs n >= 2, got {self.n}")

    @classmethod
    def sl(cls, n: int) -> "AmbientGroup":
        return cls(GroupKind.SL_N, n)

    @classmethod
    def sl2xsl2(cls) -> "AmbientGroup":
        return cls(GroupKind.SL2xSL2)

    @property
    def chamber_dim(self) -> int:
        return self.n - 1 if self.kind is GroupKind.SL_N else 2

    @property
    def coord_dim(self) -> int:
        """Length of stored coordinates; SL_n vectors are kept in R^n with zero sum."""
        return self.n if self.kind is GroupKind.SL_N else 2

    def in_chamber(self, v, tol: float = CHAMBER_TOL) -> bool:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.coord_dim,):
            return False
        if self.kind is GroupKind.SL2xSL2:
            return bool(np.all(v >= -tol))
        return bool(np.all(np.diff(v) <= tol) and abs(v.sum()) <= tol * max(1.0, np.abs(v).sum()))


SL2xSL2 = AmbientGroup.sl2xsl2()


@dataclass(frozen=True)
class CartanVector:
    coords: np.ndarray
    group: AmbientGroup = SL2xSL2

    def __post_init__(self):
        v = np.array(self.coords, dtype=np.float64)
        if not self.group.in_chamber(v):
            raise InputError(f"{v.tolist()} is not in the closed chamber of {self.group.kind.value}")
        v.setflags(write=False)
        object.__setattr__(self, "coords", v)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


@dataclass(frozen=True)
class ConeSubset:
    """Polyhedral cone of nonnegative combinations of chamber vectors."""

    generators: np.ndarray
    group: AmbientGroup = SL2xSL2

    def __post_init__(self):
        gens = np.array(self.generators, dtype=np.float64).reshape(-1, self.group.coord_dim)
        for gvec in gens:
            if not self.group.in_chamber(gvec):
                raise InputError(f"cone generator {gvec.tolist()} is not in the chamber")
            if np.linalg.norm(gvec) == 0:
                raise InputError("cone generators must be nonzero")
        gens.setflags(write=False)
        object.__setattr__(self, "generators", gens)

    @property
    def dim(self) -> int:
        return self.group.coord_dim

    def __len__(self):
        return self.generators.shape[0]


def diagonal_ray() -> ConeSubset:
    """``mu(H)`` for H = diagonal SL(2,R) in SL(2,R) x SL(2,R) (AdS^3 = G/H)."""
    return ConeSubset([[1.0, 1.0]])


def first_axis_ray() -> ConeSubset:
    """``mu(L)`` for L = SL(2,R) x {e}."""
    return ConeSubset([[1.0, 0.0]])


def full_chamber() -> ConeSubset:
    """``mu(H)`` when H has full real rank: the whole chamber."""
    return ConeSubset([[1.0, 0.0], [0.0, 1.0]])


# -- Cartan projection ------------------------------------------------------


def _check_finite(g):
    if not np.all(np.isfinite(g)):
        raise InputError("group element has non-finite entries")


def _check_det(g, label: str = "g"):
    # det of a product of large matrices carries rounding of order eps*|g|^n
    det = np.linalg.det(g)
    scale = max(1.0, float(np.linalg.norm(g, 2)) ** g.shape[-1]) * 1e3 * np.finfo(float).eps
    if abs(det - 1.0) > max(DET_TOL, scale):
        raise InputError(f"{label} has determinant {det:.12g}, expected 1")


def as_pair(g) -> np.ndarray:
    g = np.array(g, dtype=np.float64)
    if g.shape != (2, 2, 2):
        raise DimensionError(f"SL2xSL2 element must have shape (2, 2, 2), got {g.shape}")
    return g


def cartan_projection(group: AmbientGroup, g) -> CartanVector:
    if group.kind is GroupKind.SL2xSL2:
        g = as_pair(g)
        _check_finite(g)
        _check_det(g[0], "first factor")
        _check_det(g[1], "second factor")
        coords = np.maximum(kernels.top_log_sv2_numpy(g), 0.0)
        return CartanVector(coords, group)
    g = np.array(g, dtype=np.float64)
    if g.shape != (group.n, group.n):
        raise DimensionError(f"SL_{group.n} element must be {group.n}x{group.n}, got {g.shape}")
    _check_finite(g)
    _check_det(g)
    logs = np.log(np.linalg.svd(g, compute_uv=False))
    logs -= logs.mean()
    return CartanVector(np.sort(logs)[::-1].copy(), group)


def cartan_coords(group: AmbientGroup, elems) -> np.ndarray:
    """Chamber coordinates for a stack of group elements, shape ``(N, dim)``.

    No determinant checks: meant for elements built inside the group, such as
    word-ball products.
    """
    elems = np.asarray(elems, dtype=np.float64)
    if group.kind is GroupKind.SL2xSL2:
        if elems.shape[-3:] != (2, 2, 2):
            raise DimensionError(f"expected SL2xSL2 elements, got shape {elems.shape}")
        coords = kernels.top_log_sv2(elems.reshape(-1, 2, 2, 2))
        return np.maximum(coords, 0.0)
    logs = np.log(np.linalg.svd(elems.reshape(-1, group.n, group.n), compute_uv=False))
    logs -= logs.mean(axis=1, keepdims=True)
    return logs


# -- distance to a polyhedral cone -------------------------------------------


def _faces(gens: np.ndarray):
    """Linearly independent generator subsets of size <= dim."""
    k, d = gens.shape
    for size in range(1, min(k, d) + 1):
        for idx in itertools.combinations(range(k), size):
            sub = gens[list(idx)]
            if np.linalg.matrix_rank(sub, tol=1e-12) == size:
                yield sub


def distance_to_cone_many(V, cone: ConeSubset) -> np.ndarray:
    """Euclidean distance from each row of ``V`` to the cone.

    The nearest point of a polyhedral cone is the orthogonal projection onto
    the span of one of its faces with nonnegative coefficients (or the apex),
    so taking the minimum over admissible face projections is exact. Faces are
    spanned by independent generator subsets of size at most ``dim``.
    """
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    if V.shape[1] != cone.dim:
        raise DimensionError(f"vectors have dimension {V.shape[1]}, cone lives in dimension {cone.dim}")
    best = np.linalg.norm(V, axis=1)
    for sub in _faces(cone.generators):
        pinv = np.linalg.pinv(sub.T)
        coef = V @ pinv.T
        ok = np.all(coef >= -1e-14, axis=1)
        if not ok.any():
            continue
        resid = np.linalg.norm(V - coef @ sub, axis=1)
        best = np.where(ok, np.minimum(best, resid), best)
    return best


def distance_to_cone(v, cone: ConeSubset) -> float:
    coords = v.coords if isinstance(v, CartanVector) else np.asarray(v, dtype=np.float64)
    if len(cone) == 0:
        return float(np.linalg.norm(coords))
    return float(distance_to_cone_many(coords[None, :], cone)[0])


def distance_to_cone_nnls(v, cone: ConeSubset) -> float:
    """Same distance via nonnegative least squares (independent route).

    Solved with bounded-variable least squares; ``scipy.optimize.nnls`` in
    scipy 1.15 returns wrong minimizers on some small cones.
    """
    coords = v.coords if isinstance(v, CartanVector) else np.asarray(v, dtype=np.float64)
    if len(cone) == 0:
        return float(np.linalg.norm(coords))
    A = cone.generators.T
    res = lsq_linear(A, coords, bounds=(0.0, np.inf), method="bvls", tol=1e-14)
    return float(np.linalg.norm(A @ res.x - coords))


# -- properness criterion ---------------------------------------------------


class Verdict(str, enum.Enum):
    PROPER = "PROPER"
    NOT_PROPER = "NOT_PROPER"
    BOUNDARY = "BOUNDARY"


@dataclass(frozen=True)
class PropernessResult:
    verdict: Verdict
    witness: np.ndarray | None
    gap: float


def _common_ray(muL: ConeSubset, muH: ConeSubset):
    """LP: find a >= 0, b >= 0 with L a = H b and sum(a) = 1."""
    kL, kH = len(muL), len(muH)
    A_eq = np.zeros((muL.dim + 1, kL + kH))
    A_eq[: muL.dim, :kL] = muL.generators.T
    A_eq[: muL.dim, kL:] = -muH.generators.T
    A_eq[muL.dim, :kL] = 1.0
    b_eq = np.zeros(muL.dim + 1)
    b_eq[-1] = 1.0
    res = linprog(np.zeros(kL + kH), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * (kL + kH), method="highs")
    if res.status != 0:
        return None
    return muL.generators.T @ res.x[:kL]


def _angular_gap(muL: ConeSubset, muH: ConeSubset, probe_count: int) -> float:
    """Smallest distance from a unit vector of one cone to the other cone."""
    rng = np.random.default_rng(0)
    gaps = []
    for A, B in ((muL, muH), (muH, muL)):
        probes = [A.generators]
        if len(A) > 1 and probe_count > 0:
            probes.append(rng.dirichlet(np.ones(len(A)), size=probe_count) @ A.generators)
        P = np.concatenate(probes)
        P = P / np.linalg.norm(P, axis=1, keepdims=True)
        gaps.append(float(np.min(distance_to_cone_many(P, B))))
    return min(gaps)


def properness_check(muL: ConeSubset, muH: ConeSubset, probe_count: int = 64) -> PropernessResult:
    """Decide whether ``mu(L) & mu(H) = {0}``.

    NOT_PROPER when a common nonzero ray exists (checked to 1e-12 after the
    LP), BOUNDARY when the cones come within angular distance 1e-9 without an
    exact common ray, PROPER otherwise.
    """
    if muL.dim != muH.dim:
        raise DimensionError(f"cones live in different chambers ({muL.dim} vs {muH.dim})")
    if len(muL) == 0 or len(muH) == 0:
        return PropernessResult(Verdict.PROPER, None, np.inf)
    gap = _angular_gap(muL, muH, probe_count)
    w = _common_ray(muL, muH)
    if w is not None:
        unit = w / np.linalg.norm(w)
        if distance_to_cone(unit, muH) <= 1e-12:
            w = w / np.max(np.abs(w))
            return PropernessResult(Verdict.NOT_PROPER, w, 0.0)
    if gap <= 1e-9:
        return PropernessResult(Verdict.BOUNDARY, w, gap)
    return PropernessResult(Verdict.PROPER, None, gap)


# -- sharpness --------------------------------------------------------------


@dataclass(frozen=True)
class SharpnessEstimate:
    """Largest ``C`` with ``d(mu(g), mu(H)) >= C |mu(g)| - C'`` on the sample."""

    C: float
    C_prime: float
    word_radius: int | None
    samples: int
    skipped: int = 0
    sharp: bool = True
    pareto: dict = field(default_factory=dict)

    def holds(self, norms, dists, slack: float = 1e-12) -> bool:
        norms = np.asarray(norms)
        dists = np.asarray(dists)
        mask = norms > ZERO_MU_TOL
        return bool(np.all(dists[mask] >= self.C * norms[mask] - self.C_prime - slack * (1.0 + norms[mask])))


def _element_stack(words: Iterable) -> np.ndarray:
    elems = getattr(words, "elements", None)
    if elems is not None:
        return np.asarray(elems)
    return np.array([getattr(w, "element", w) for w in words], dtype=np.float64)


def sharpness_from_coords(
    coords: np.ndarray,
    muH: ConeSubset,
    c_prime_cap: float = 0.0,
    word_radius: int | None = None,
) -> SharpnessEstimate:
    coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
    norms = np.linalg.norm(coords, axis=1)
    keep = norms > ZERO_MU_TOL
    skipped = int(np.sum(~keep))
    if not keep.any():
        raise NoDataError(f"all {coords.shape[0]} elements have zero Cartan projection")
    norms = norms[keep]
    dists = distance_to_cone_many(coords[keep], muH)

    def best_c(cp):
        return float(np.min((dists + cp) / norms))

    raw = best_c(c_prime_cap)
    pareto = {cp: min(max(best_c(cp), C_FLOOR), 1.0) for cp in PARETO_C_PRIMES}
    return SharpnessEstimate(
        C=min(max(raw, C_FLOOR), 1.0),
        C_prime=float(c_prime_cap),
        word_radius=word_radius,
        samples=int(norms.size),
        skipped=skipped,
        sharp=raw > C_FLOOR,
        pareto=pareto,
    )


def estimate_sharpness(
    words: Sequence,
    muH: ConeSubset,
    c_prime_cap: float = 0.0,
    word_radius: int | None = None,
) -> SharpnessEstimate:
    """First sharpness constant of a finite sample of group elements.

    ``C = min (d(mu(g), mu(H)) + C') / |mu(g)|`` over elements with nonzero
    projection, clamped to ``(0, 1]``. Elements with ``mu = 0`` are skipped and
    counted; if the minimum is not positive the estimate is floored and
    flagged ``sharp=False``.
    """
    if c_prime_cap < 0:
        raise InputError(f"c_prime_cap must be >= 0, got {c_prime_cap}")
    elems = _element_stack(words)
    if elems.size == 0:
        raise NoDataError("no words to estimate sharpness from")
    if word_radius is None:
        word_radius = getattr(words, "radius", None)
    return sharpness_from_coords(cartan_coords(muH.group, elems), muH, c_prime_cap, word_radius)
