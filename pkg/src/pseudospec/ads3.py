"""Discrete groups acting on AdS^3 = SO(2,2)/SO(2,1), modelled through
SL(2,R) x SL(2,R) with ``mu(H)`` the diagonal ray.

Groups are free groups given by matrix generators. The word ball, orbit
counts and Poincare partial sums all use the pseudo-ball
``B(o, R) = {g : |mu(g)| <= R}`` at the base point ``o = eH``.

The stable eigenvalue set ``{l(l-2) : l >= 10 C^-3}`` is emitted from the
sharpness constant ``C``. No PDE is solved here: what is checked numerically
is the geometric input (``C``, orbit growth, stability of ``C`` under
deformation), not the spectral containment itself.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.spatial import cKDTree

from . import kernels
from ._jit import env_budget
from .cartan import (
    SL2xSL2,
    ConeSubset,
    SharpnessEstimate,
    cartan_coords,
    diagonal_ray,
    sharpness_from_coords,
)
from .errors import BudgetError, DimensionError, InputError

log = logging.getLogger(__name__)

WORD_BUDGET = 10**7
DEDUPE_TOL = 1e-8
PROPER_C_THRESHOLD = 0.05


class WordCollisionWarning(UserWarning):
    """Two distinct reduced words gave (nearly) the same matrix."""


@dataclass(frozen=True)
class GroupPresentation:
    """Free group on ``generators``, each a pair of unit-determinant 2x2 matrices."""

    generators: np.ndarray

    def __post_init__(self):
        gens = np.array(self.generators, dtype=np.float64)
        if gens.ndim == 3:
            gens = gens[None]
        if gens.ndim != 4 or gens.shape[1:] != (2, 2, 2) or gens.shape[0] < 1:
            raise DimensionError(f"generators must have shape (k, 2, 2, 2), got {gens.shape}")
        if not np.all(np.isfinite(gens)):
            raise InputError("generators have non-finite entries")
        dets = np.linalg.det(gens)
        if np.max(np.abs(dets - 1.0)) > 1e-9:
            raise InputError(f"generator determinants must be 1 per factor, got {dets.tolist()}")
        gens.setflags(write=False)
        object.__setattr__(self, "generators", gens)

    @property
    def free_rank(self) -> int:
        return self.generators.shape[0]

    def letters(self) -> np.ndarray:
        """Matrices for letters ``0..2k-1``: ``2i`` is generator ``i``, ``2i+1`` its inverse."""
        k = self.free_rank
        out = np.empty((2 * k, 2, 2, 2))
        out[0::2] = self.generators
        out[1::2] = np.linalg.inv(self.generators)
        return out

    def conjugate(self, h) -> "GroupPresentation":
        h = np.asarray(h, dtype=np.float64)
        hinv = np.linalg.inv(h)
        return GroupPresentation(np.matmul(np.matmul(h, self.generators), hinv))


@dataclass(frozen=True)
class GroupWord:
    letters: tuple[tuple[int, int], ...]
    element: np.ndarray

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if not self.letters:
            return "e"
        return " ".join(f"g{i}" if e == 1 else f"g{i}^-1" for i, e in self.letters)


@dataclass(frozen=True)
class WordBall:
    """Reduced words of length ``1..radius`` as parallel arrays.

    ``codes[w, :lengths[w]]`` are the letter codes of word ``w`` (``2i`` for
    generator ``i``, ``2i+1`` for its inverse), ``elements[w]`` its matrix pair.
    Iterating yields :class:`GroupWord` objects.
    """

    radius: int
    codes: np.ndarray
    lengths: np.ndarray
    elements: np.ndarray
    raw_counts: tuple[int, ...]
    collisions: int = 0

    def __len__(self):
        return self.lengths.shape[0]

    def __getitem__(self, i) -> GroupWord:
        codes = self.codes[i, : self.lengths[i]]
        letters = tuple((int(c) >> 1, -1 if c & 1 else 1) for c in codes)
        return GroupWord(letters, self.elements[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def mu(self) -> np.ndarray:
        return cartan_coords(SL2xSL2, self.elements)

    def mu_norms(self) -> np.ndarray:
        return np.linalg.norm(self.mu(), axis=1)


def hyperbolic(t: float) -> np.ndarray:
    """``diag(e^t, e^-t)``: moves the base point of H^2 by hyperbolic distance ``2t``."""
    return np.diag([math.exp(t), math.exp(-t)])


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def first_factor(*mats) -> np.ndarray:
    """Embed SL(2,R) matrices as ``(m, e)`` in SL(2,R) x SL(2,R)."""
    return np.array([[m, np.eye(2)] for m in mats], dtype=np.float64)


def standard_presentation(t: float = 2.0) -> GroupPresentation:
    """Rank-2 Schottky group in the first factor.

    ``a = diag(e^t, e^-t)`` and ``b = k a k^-1`` with ``k`` the rotation by
    ``pi/4``; fixed points ``0, inf`` and ``-1, 1`` on the boundary of H^2. For
    ``t = 2`` the disks ``|z| < 1/5``, ``|z| > 5`` and their images under ``k``
    are disjoint and ping-pong applies, so the group is free and discrete.
    """
    a = hyperbolic(t)
    k = rotation(math.pi / 4)
    b = k @ a @ k.T
    return GroupPresentation(first_factor(a, b))


def cyclic_presentation(t: float = 1.0) -> GroupPresentation:
    """Rank 1: powers of ``diag(e^t, e^-t)`` have ``|mu| = |k| t`` exactly."""
    return GroupPresentation(first_factor(hyperbolic(t)))


def reduced_word_count(rank: int, length: int) -> int:
    return 2 * rank * (2 * rank - 1) ** (length - 1)


def _dedupe(codes, lengths, elems, tol):
    flat = elems.reshape(len(elems), -1)
    ident = np.eye(2)[None].repeat(2, axis=0).ravel()
    drop = np.zeros(len(elems), dtype=bool)
    near_id = np.linalg.norm(flat - ident, axis=1) < tol
    drop |= near_id
    tree = cKDTree(flat)
    for _, b in tree.query_pairs(r=tol):
        # a < b and words are stored shortest-first, so the later one goes
        drop[b] = True
    n = int(drop.sum())
    if n:
        warnings.warn(
            f"{n} word(s) collided with a shorter word or the identity within {tol}; "
            "the presentation may not be free or discrete",
            WordCollisionWarning,
            stacklevel=3,
        )
    keep = ~drop
    return codes[keep], lengths[keep], elems[keep], n


def enumerate_ball(
    presentation: GroupPresentation,
    word_radius: int,
    dedupe_tol: float = DEDUPE_TOL,
    budget: int | None = None,
) -> WordBall:
    """All reduced words of length ``1..word_radius`` (identity excluded)."""
    if int(word_radius) != word_radius or word_radius < 1:
        raise InputError(f"word_radius must be an integer >= 1, got {word_radius}")
    word_radius = int(word_radius)
    k = presentation.free_rank
    total = sum(reduced_word_count(k, L) for L in range(1, word_radius + 1))
    budget = env_budget(WORD_BUDGET) if budget is None else budget
    if total > budget:
        raise BudgetError(f"word ball of radius {word_radius} in free rank {k} has {total} words, over the budget of {budget}")

    gens = presentation.letters()
    elems = np.eye(2)[None, None].repeat(2, axis=1)
    last = np.array([-1], dtype=np.int64)
    codes = np.zeros((1, 0), dtype=np.int64)
    all_codes, all_lengths, all_elems, raw = [], [], [], []
    for L in range(1, word_radius + 1):
        elems, last, parent = kernels.extend_words(elems, last, gens)
        codes = np.concatenate([codes[parent], last[:, None]], axis=1)
        raw.append(len(last))
        padded = np.full((len(last), word_radius), -1, dtype=np.int64)
        padded[:, :L] = codes
        all_codes.append(padded)
        all_lengths.append(np.full(len(last), L, dtype=np.int64))
        all_elems.append(elems)
    codes = np.concatenate(all_codes)
    lengths = np.concatenate(all_lengths)
    elements = np.concatenate(all_elems)
    codes, lengths, elements, n = _dedupe(codes, lengths, elements, dedupe_tol)
    for arr in (codes, lengths, elements):
        arr.setflags(write=False)
    return WordBall(word_radius, codes, lengths, elements, tuple(raw), n)


# -- stable spectrum --------------------------------------------------------


@dataclass(frozen=True)
class StableSpectrum:
    C: float
    l_min: int
    l_max: int
    eigenvalues: tuple[int, ...]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(l, l * (l - 2)) for l in range(self.l_min, self.l_max + 1)]


def stable_l_min(C: float) -> int:
    """Smallest integer ``l >= 10 / C^3``, computed exactly from the float ``C``."""
    if not (0 < C <= 1):
        raise InputError(f"sharpness constant must lie in (0, 1], got {C}")
    return math.ceil(10 / Fraction(C) ** 3)


def stable_spectrum(C: float, l_max: int) -> StableSpectrum:
    """``{l(l-2) : l_min <= l <= l_max}`` with ``l_min = ceil(10 C^-3)``."""
    l_min = stable_l_min(C)
    if l_max < l_min:
        raise InputError(f"l_max={l_max} is below l_min={l_min} for C={C}")
    return StableSpectrum(float(C), l_min, int(l_max), tuple(l * (l - 2) for l in range(l_min, l_max + 1)))


# -- orbit counting -----------------------------------------------------------


@dataclass(frozen=True)
class OrbitCount:
    radii: tuple[float, ...]
    counts: tuple[int, ...]
    fitted_slope: float
    word_radius: int
    max_norm: float
    complete_radius: float
    incomplete: bool


def _fit_slope(radii, counts) -> float:
    r = np.asarray(radii, dtype=np.float64)
    c = np.asarray(counts, dtype=np.float64)
    use = c >= 2
    if use.sum() < 2:
        return math.nan
    return float(np.polyfit(r[use], np.log(c[use]), 1)[0])


def orbit_counts_from_norms(norms: np.ndarray, radii: Sequence[float]) -> list[int]:
    s = np.sort(norms)
    return [1 + int(np.searchsorted(s, R, side="right")) for R in radii]


def orbit_count(
    presentation: GroupPresentation,
    word_radius: int,
    radii: Sequence[float],
    complete_only: bool = False,
    ball: WordBall | None = None,
) -> OrbitCount:
    """``N(R) = #{g : |mu(g)| <= R}`` over the word ball plus the identity.

    ``complete_radius`` is the smallest norm on the outer sphere of the word
    ball; below it the counts are taken to be exact. ``incomplete`` is set when
    the largest radius exceeds every norm in the ball. With
    ``complete_only`` the slope fit ignores radii above ``complete_radius``.
    """
    radii = [float(r) for r in radii]
    if not radii or radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise InputError(f"radii must be positive and strictly increasing, got {radii}")
    if ball is None:
        ball = enumerate_ball(presentation, word_radius)
    norms = ball.mu_norms()
    counts = orbit_counts_from_norms(norms, radii)
    outer = norms[ball.lengths == ball.radius]
    complete_radius = float(outer.min()) if outer.size else 0.0
    max_norm = float(norms.max()) if norms.size else 0.0
    incomplete = max_norm < radii[-1]
    if incomplete:
        log.warning("word ball of radius %d reaches |mu| = %.3g < largest radius %.3g; counts are lower bounds", ball.radius, max_norm, radii[-1])
    fit_r, fit_c = radii, counts
    if complete_only:
        sel = [i for i, R in enumerate(radii) if R <= complete_radius]
        fit_r = [radii[i] for i in sel]
        fit_c = [counts[i] for i in sel]
    return OrbitCount(tuple(radii), tuple(counts), _fit_slope(fit_r, fit_c), ball.radius, max_norm, complete_radius, incomplete)


# -- deformations -------------------------------------------------------------


def _unit_det(m: np.ndarray) -> np.ndarray:
    det = np.linalg.det(m)
    return m / np.sqrt(det)[..., None, None]


def perturb(presentation: GroupPresentation, scale: float, rng: np.random.Generator) -> GroupPresentation:
    """Right-multiply every factor of every generator by ``exp(X)``, ``X`` traceless
    with entries uniform in ``[-scale, scale]``."""
    gens = presentation.generators.copy()
    if scale == 0:
        return GroupPresentation(gens)
    for i in range(gens.shape[0]):
        for f in range(2):
            a, b, c = rng.uniform(-scale, scale, size=3)
            X = np.array([[a, b], [c, -a]])
            gens[i, f] = gens[i, f] @ expm(X)
    return GroupPresentation(_unit_det(gens))


@dataclass(frozen=True)
class StabilityReport:
    common_spectrum: tuple[tuple[int, int], ...]
    min_C: float
    all_proper_on_sample: bool
    base_C: float
    sample_C: tuple[float, ...]

    @property
    def relative_drop(self) -> float:
        return (self.base_C - self.min_C) / self.base_C


def sharpness_of(presentation: GroupPresentation, word_radius: int, muH: ConeSubset | None = None) -> SharpnessEstimate:
    ball = enumerate_ball(presentation, word_radius)
    return sharpness_from_coords(ball.mu(), muH or diagonal_ray(), word_radius=word_radius)


def stability_experiment(
    presentation: GroupPresentation,
    perturbation_scale: float = 1e-3,
    samples: int = 20,
    word_radius: int = 6,
    l_max: int = 200,
    seed: int | np.random.Generator | None = 0,
    muH: ConeSubset | None = None,
) -> StabilityReport:
    """Sharpness of random small deformations and the eigenvalues they share.

    ``min_C`` is the smallest sampled sharpness constant; every ``l(l-2)`` with
    ``l >= 10 min_C^-3`` (up to ``l_max``) is common to all samples.
    """
    if perturbation_scale < 0:
        raise InputError(f"perturbation_scale must be >= 0, got {perturbation_scale}")
    if samples < 1:
        raise InputError(f"samples must be >= 1, got {samples}")
    muH = muH or diagonal_ray()
    rng = np.random.default_rng(seed)
    base = sharpness_of(presentation, word_radius, muH).C
    cs = []
    proper = True
    for _ in range(samples):
        est = sharpness_of(perturb(presentation, perturbation_scale, rng), word_radius, muH)
        cs.append(est.C)
        proper &= est.sharp and est.C > PROPER_C_THRESHOLD
    min_c = min(cs)
    common: tuple = ()
    if min_c > 0:
        l_min = stable_l_min(min_c)
        if l_max >= l_min:
            common = tuple(stable_spectrum(min_c, l_max).pairs)
    return StabilityReport(common, min_c, bool(proper), base, tuple(cs))


# -- Poincare series ----------------------------------------------------------


@dataclass(frozen=True)
class PoincareSums:
    rows: tuple[tuple[int, float, float], ...]
    decay_rate: float
    growth_bound: float
    divergence_expected: bool


def poincare_partial_sums(
    presentation: GroupPresentation,
    decay_rate: float,
    word_radius_schedule: Sequence[int],
    muH: ConeSubset | None = None,
) -> PoincareSums:
    """``S_L = sum_{|w| <= L} exp(-decay_rate |mu(w)|)`` (identity included).

    Rows are ``(L, S_L, S_L - S_prev)``, the increment summed directly over
    words with length in ``(L_prev, L]``; the first increment excludes only the
    identity term. ``growth_bound`` is ``1/C`` for the sharpness
    constant of the largest ball; divergence is expected when
    ``decay_rate <= growth_bound`` and is reported, not raised.
    """
    sched = [int(L) for L in word_radius_schedule]
    if not sched or sched[0] < 1 or any(b <= a for a, b in zip(sched, sched[1:])):
        raise InputError(f"word radius schedule must be positive and increasing, got {sched}")
    if decay_rate < 0:
        raise InputError(f"decay_rate must be >= 0, got {decay_rate}")
    ball = enumerate_ball(presentation, sched[-1])
    coords = ball.mu()
    norms = np.linalg.norm(coords, axis=1)
    weights = np.exp(-decay_rate * norms)
    rows = []
    prev = 0
    for L in sched:
        # shells summed on their own so tiny increments are not lost to rounding
        shell = (ball.lengths > prev) & (ball.lengths <= L)
        total = 1.0 + math.fsum(weights[ball.lengths <= L])
        rows.append((L, total, math.fsum(weights[shell])))
        prev = L
    try:
        growth = 1.0 / sharpness_from_coords(coords, muH or diagonal_ray()).C
    except InputError:
        growth = math.inf
    return PoincareSums(tuple(rows), float(decay_rate), growth, decay_rate <= growth)
