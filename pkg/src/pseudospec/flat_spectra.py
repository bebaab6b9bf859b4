"""Discrete spectra of flat tori ``R^{p,q} / g Z^n`` and their behaviour under deformation.

The Laplacian of ``R^{p,q}`` acts on the periodic exponentials
``f_m(x) = exp(2 pi i m^T g^{-1} x)`` with eigenvalue ``-4 pi^2 Q(m)`` where
``Q`` is the deformed form ``g^{-1} I_{p,q} g^{-T}``. Everything here is
enumeration of that formula over finite boxes of ``Z^n``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from ._jit import env_budget
from .errors import BudgetError, DimensionError, InputError, SamplingError, WindowTooSmallError
from .quadform import (
    DEFAULT_SEARCH_BOUND,
    IntegerCertificate,
    QuadraticForm,
    Signature,
    as_lattice_point,
    check_invertible,
    deformed_form,
    evaluate,
    integer_proportionality,
)

log = logging.getLogger(__name__)

FOUR_PI_SQ = 4.0 * math.pi**2
DEFAULT_BUDGET = 10**8
DEDUPE_TOL = 1e-9
SINGULAR_DRAW_TOL = 1e-8


@dataclass(frozen=True)
class DeformationParameter:
    """A point ``g`` of GL(n, R), the deformation space of ``Z^n`` in ``R^{p,q}``."""

    g: np.ndarray
    sig: Signature

    def __post_init__(self):
        g = check_invertible(self.g)
        sig = Signature(*self.sig)
        if sig.z != 0:
            raise InputError(f"ambient signature must be nondegenerate, got z={sig.z}")
        if sig.p + sig.q != g.shape[0]:
            raise DimensionError(f"signature ({sig.p},{sig.q}) does not match dimension {g.shape[0]}")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "sig", sig)

    @classmethod
    def of(cls, g, p: int, q: int) -> "DeformationParameter":
        return cls(np.atleast_2d(np.asarray(g, dtype=np.float64)), Signature(p, q, 0))

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def form(self) -> QuadraticForm:
        return deformed_form(self.g, self.sig)


@dataclass(frozen=True)
class SpectrumWindow:
    lambda_min: float
    lambda_max: float
    box_radius: int

    def __post_init__(self):
        if not (math.isfinite(self.lambda_min) and math.isfinite(self.lambda_max)):
            raise InputError("window bounds must be finite")
        if self.lambda_min > self.lambda_max:
            raise InputError(f"window is inverted: lambda_min={self.lambda_min} > lambda_max={self.lambda_max}")
        if int(self.box_radius) != self.box_radius or self.box_radius < 1:
            raise InputError(f"box_radius must be an integer >= 1, got {self.box_radius}")
        object.__setattr__(self, "box_radius", int(self.box_radius))


@dataclass(frozen=True)
class SpectrumEntry:
    """One eigenvalue cluster. ``witnesses`` are sorted lexicographically and
    ``eigenvalue`` is the exact value at the first of them."""

    eigenvalue: float
    witnesses: tuple[tuple[int, ...], ...]

    @property
    def witness(self) -> tuple[int, ...]:
        return self.witnesses[0]

    @property
    def multiplicity(self) -> int:
        return len(self.witnesses)


@dataclass(frozen=True)
class SpectrumSample:
    entries: tuple[SpectrumEntry, ...]
    window: SpectrumWindow
    complete_below_box: bool

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([e.eigenvalue for e in self.entries])

    def __len__(self):
        return len(self.entries)


def eigenvalue_of(g: DeformationParameter, m) -> float:
    m = as_lattice_point(m, g.n)
    return -FOUR_PI_SQ * evaluate(g.form, m)


def _budget_check(n: int, M: int, budget: int | None):
    budget = env_budget(DEFAULT_BUDGET) if budget is None else budget
    points = (2 * M + 1) ** n
    if points > budget:
        raise BudgetError(
            f"box_radius={M} in dimension {n} visits {points} points, over the budget of {budget}; "
            "use a smaller box_radius or raise PSEUDOSPEC_BUDGET"
        )


def _cluster(values: np.ndarray, points: np.ndarray, tol: float) -> list[SpectrumEntry]:
    """Group sorted values into clusters anchored at their smallest member."""
    if values.size == 0:
        return []
    values = values + 0.0  # no negative zeros
    keys = [points[:, k] for k in range(points.shape[1] - 1, -1, -1)]
    order = np.lexsort(keys + [values])
    values = values[order]
    points = points[order]
    starts = [0]
    anchor = values[0]
    for i in range(1, values.size):
        if values[i] - anchor > tol:
            starts.append(i)
            anchor = values[i]
    starts.append(values.size)
    entries = []
    for a, b in zip(starts[:-1], starts[1:]):
        block = points[a:b]
        lex = np.lexsort([block[:, k] for k in range(block.shape[1] - 1, -1, -1)])
        witnesses = tuple(tuple(int(x) for x in block[i]) for i in lex)
        entries.append(SpectrumEntry(float(values[a + lex[0]]), witnesses))
    entries.sort(key=lambda e: (e.eigenvalue, e.witness))
    return entries


def _certifies_window(form: QuadraticForm, sig: Signature, window: SpectrumWindow) -> bool:
    """True if no point outside the box can have an eigenvalue in the window.

    Only definite forms can certify: ``|Q(m)| >= |lambda|_min * |m|_inf^2``.
    """
    if sig.p and sig.q:
        return False
    eig = np.linalg.eigvalsh(form.matrix)
    reach = FOUR_PI_SQ * float(np.min(np.abs(eig))) * (window.box_radius + 1) ** 2
    if sig.q == 0:
        return -reach < window.lambda_min
    return reach > window.lambda_max


def enumerate_spectrum(
    g: DeformationParameter,
    window: SpectrumWindow,
    dedupe_tol: float = DEDUPE_TOL,
    budget: int | None = None,
) -> SpectrumSample:
    """All eigenvalues ``-4 pi^2 Q(m)`` with ``|m|_inf <= M`` inside the window.

    Values closer than ``dedupe_tol`` are merged; multiplicities count
    witnesses inside the box only.
    """
    _budget_check(g.n, window.box_radius, budget)
    form = g.form
    values, points = kernels.scan_box(form.matrix, window.box_radius, window.lambda_min, window.lambda_max, -FOUR_PI_SQ)
    entries = _cluster(values, points, dedupe_tol)
    return SpectrumSample(tuple(entries), window, _certifies_window(form, g.sig, window))


def verify_eigenfunction(g: DeformationParameter, m, grid_points_per_axis: int = 32) -> float:
    """Finite-difference check of the eigenfunction ``f_m``.

    Samples ``f_m`` on a periodic grid over the fundamental domain ``g [0,1)^n``
    (grid in lattice coordinates ``u = g^{-1} x``), applies the second-order
    stencil for ``sum_kl S_kl d_k d_l`` (the flat Laplacian after the chain
    rule) and returns ``max |Delta_h f - lambda f| / |lambda|``. When
    ``lambda == 0`` the absolute residual is returned.
    """
    m = as_lattice_point(m, g.n)
    N = int(grid_points_per_axis)
    if N < 8:
        raise InputError(f"grid_points_per_axis must be >= 8, got {N}")
    n = g.n
    if N**n > 5 * 10**7:
        raise BudgetError(f"grid of {N}^{n} points is too large")
    S = g.form.matrix
    h = 1.0 / N
    axes = [np.arange(N) * h] * n
    u = np.meshgrid(*axes, indexing="ij")
    phase = sum(int(m[k]) * u[k] for k in range(n))
    f = np.exp(2j * np.pi * phase)

    lap = np.zeros_like(f)
    for k in range(n):
        d2 = np.roll(f, -1, axis=k) - 2.0 * f + np.roll(f, 1, axis=k)
        lap += S[k, k] * d2 / h**2
        for l in range(k + 1, n):
            if S[k, l] == 0.0:
                continue
            pp = np.roll(np.roll(f, -1, axis=k), -1, axis=l)
            pm = np.roll(np.roll(f, -1, axis=k), 1, axis=l)
            mp = np.roll(np.roll(f, 1, axis=k), -1, axis=l)
            mm = np.roll(np.roll(f, 1, axis=k), 1, axis=l)
            lap += 2.0 * S[k, l] * (pp - pm - mp + mm) / (4.0 * h * h)

    lam = eigenvalue_of(g, m)
    resid = float(np.max(np.abs(lap - lam * f)))
    return resid / abs(lam) if lam != 0.0 else resid


def _perturbations(g0: DeformationParameter, radius: float, samples: int, rng: np.random.Generator, max_tries: int):
    out = []
    tries = 0
    while len(out) < samples and tries < max_tries:
        tries += 1
        g = g0.g + rng.uniform(-radius, radius, size=g0.g.shape)
        if abs(np.linalg.det(g)) < SINGULAR_DRAW_TOL:
            continue
        out.append(DeformationParameter(g, g0.sig))
    if not out:
        raise SamplingError(f"all {tries} perturbation draws were singular")
    if len(out) < samples:
        log.warning("only %d of %d perturbations were non-singular", len(out), samples)
    return out


def stability_scan(
    g0: DeformationParameter,
    radius: float,
    samples: int,
    window: SpectrumWindow,
    match_tol: float = 1e-6,
    seed: int | np.random.Generator | None = 0,
) -> list[float]:
    """Eigenvalues present in the spectrum of every random perturbation of ``g0``.

    Perturbations are ``g0 + delta`` with ``delta`` uniform in
    ``[-radius, radius]`` entrywise; draws with ``|det| < 1e-8`` are redrawn.
    Returned values are taken from the first sample.
    """
    if not radius > 0:
        raise InputError(f"radius must be positive, got {radius}")
    if samples < 1:
        raise InputError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    draws = _perturbations(g0, radius, samples, rng, max_tries=100 * samples)
    common = enumerate_spectrum(draws[0], window).eigenvalues
    for g in draws[1:]:
        if common.size == 0:
            break
        other = enumerate_spectrum(g, window).eigenvalues
        if other.size == 0:
            return []
        pos = np.searchsorted(other, common)
        below = other[np.clip(pos - 1, 0, other.size - 1)]
        above = other[np.clip(pos, 0, other.size - 1)]
        near = np.minimum(np.abs(below - common), np.abs(above - common))
        common = common[near <= match_tol]
    return [float(v) for v in common]


# -- Oppenheim dichotomy ----------------------------------------------------


class Density(str, enum.Enum):
    DENSE_SUSPECTED = "DENSE_SUSPECTED"
    DISCRETE_SUSPECTED = "DISCRETE_SUSPECTED"
    INCONCLUSIVE = "INCONCLUSIVE"


OPPENHEIM_HYPOTHESES = "n >= 3, p >= 2, q >= 1 (p + q = n)"


@dataclass(frozen=True)
class DensityReport:
    box_radii: tuple[int, ...]
    min_gaps: tuple[float, ...]
    classification: Density
    certificate: IntegerCertificate | None
    shrink_factor: float
    hypotheses_met: bool
    hypotheses: str = OPPENHEIM_HYPOTHESES
    warnings: tuple[str, ...] = field(default=())

    @property
    def gap_ratio(self) -> float:
        return self.min_gaps[0] / self.min_gaps[-1] if self.min_gaps[-1] > 0 else math.inf


def min_gap(values: np.ndarray) -> float:
    if values.size < 2:
        raise WindowTooSmallError(f"need at least 2 distinct eigenvalues in the window, found {values.size}")
    return float(np.min(np.diff(np.sort(values))))


def density_diagnostics(
    g: DeformationParameter,
    windows: Sequence[SpectrumWindow],
    shrink_factor: float = 4.0,
    search_bound: int = DEFAULT_SEARCH_BOUND,
    tol: float = 1e-9,
) -> DensityReport:
    """Heuristic density test for the lattice values of the deformed form.

    Classification: a rational certificate gives DISCRETE_SUSPECTED; no
    certificate plus a gap shrink of at least ``shrink_factor`` between the
    smallest and largest box gives DENSE_SUSPECTED; otherwise INCONCLUSIVE.
    Outside the Oppenheim hypotheses the answer is always INCONCLUSIVE.
    """
    if not windows:
        raise InputError("density_diagnostics needs at least one window")
    radii = [w.box_radius for w in windows]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise InputError(f"window box radii must increase, got {radii}")
    notes = []
    sig = g.sig
    met = g.n >= 3 and sig.p >= 2 and sig.q >= 1
    if not met:
        msg = f"signature ({sig.p},{sig.q}) in dimension {g.n} does not satisfy {OPPENHEIM_HYPOTHESES}"
        log.warning(msg)
        notes.append(msg)
    gaps = tuple(min_gap(enumerate_spectrum(g, w).eigenvalues) for w in windows)
    cert = integer_proportionality(g.form, search_bound=search_bound, tol=tol)
    if not met:
        cls = Density.INCONCLUSIVE
    elif cert is not None:
        cls = Density.DISCRETE_SUSPECTED
    elif gaps[-1] == 0 or gaps[0] / gaps[-1] >= shrink_factor:
        cls = Density.DENSE_SUSPECTED
    else:
        cls = Density.INCONCLUSIVE
    return DensityReport(tuple(radii), gaps, cls, cert, shrink_factor, met, warnings=tuple(notes))

