"""Indefinite quadratic forms: evaluation, inertia, deformation, rationality."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, InputError, SingularityError

SYMMETRY_TOL = 1e-12
SINGULAR_REL_TOL = 1e-12
# Any real is within ~1/q^2 of a fraction p/q, so a certificate is only
# meaningful when bound^2 * tol << 1.
DEFAULT_SEARCH_BOUND = 1000
DEFAULT_RATIONAL_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Signature(NamedTuple):
    """Inertia counts ``(p, q, z)``: positive, negative and zero eigenvalues."""

    p: int
    q: int
    z: int = 0

    @property
    def dim(self) -> int:
        return self.p + self.q + self.z


@dataclass(frozen=True)
class QuadraticForm:
    """``Q_S(m) = m^T S m`` for a real symmetric ``S``.

    The matrix is symmetrized on construction; inputs that are asymmetric by
    more than ``1e-12`` are rejected since they almost always signal a bug in
    the caller rather than rounding noise.
    """

    matrix: np.ndarray

    def __post_init__(self):
        S = np.array(self.matrix, dtype=np.float64)
        if S.ndim == 0:
            S = S.reshape(1, 1)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] < 1:
            raise DimensionError(f"quadratic form needs a square matrix, got shape {S.shape}")
        if not np.all(np.isfinite(S)):
            raise InputError("quadratic form has non-finite entries")
        if np.max(np.abs(S - S.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(S))):
            raise InputError("quadratic form matrix is not symmetric")
        object.__setattr__(self, "matrix", _frozen(0.5 * (S + S.T)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, m) -> float:
        return evaluate(self, m)

    def __eq__(self, other):
        if not isinstance(other, QuadraticForm):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(np.all(self.matrix == other.matrix))

    def __hash__(self):
        return hash(self.matrix.tobytes())


def standard_form(sig: Signature) -> QuadraticForm:
    """``I_{p,q}`` (with ``z`` trailing zeros if any)."""
    return QuadraticForm(np.diag([1.0] * sig.p + [-1.0] * sig.q + [0.0] * sig.z))


def as_lattice_point(m, dim: int | None = None) -> np.ndarray:
    """Validate an integer vector. Floats are accepted only if integral."""
    arr = np.asarray(m)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionError(f"lattice point must be a vector, got shape {arr.shape}")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise InputError(f"lattice point has non-integer entries: {arr.tolist()}")
        arr = arr.astype(np.int64)
    elif arr.dtype.kind not in "iu":
        raise InputError(f"lattice point must be integer, got dtype {arr.dtype}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"lattice point has dimension {arr.shape[0]}, form has dimension {dim}")
    return arr.astype(np.int64)


def evaluate(form: QuadraticForm, m) -> float:
    """``m^T S m`` with exactly rounded accumulation of the ``n^2`` terms."""
    m = as_lattice_point(m, form.dim)
    S = form.matrix
    mi = [int(x) for x in m]
    terms = [S[i, j] * (mi[i] * mi[j]) for i in range(len(mi)) if mi[i] for j in range(len(mi)) if mi[j]]
    return math.fsum(terms)


def signature(form: QuadraticForm, tol: float = 1e-9) -> Signature:
    if not tol > 0:
        raise InputError(f"signature tolerance must be positive, got {tol}")
    if not np.all(np.isfinite(form.matrix)):
        raise InputError("quadratic form has non-finite entries")
    eig = np.linalg.eigvalsh(form.matrix)
    return Signature(int(np.sum(eig > tol)), int(np.sum(eig < -tol)), int(np.sum(np.abs(eig) <= tol)))


def check_invertible(g) -> np.ndarray:
    """Return ``g`` as a float square matrix, raising on (near) singularity.

    Singular means ``|det g| < 1e-12 * ||g||^n`` with the spectral norm.
    """
    g = np.array(g, dtype=np.float64)
    if g.ndim == 0:
        g = g.reshape(1, 1)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionError(f"deformation parameter must be square, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise InputError("deformation parameter has non-finite entries")
    n = g.shape[0]
    norm = np.linalg.norm(g, 2)
    det = np.linalg.det(g)
    if norm == 0 or abs(det) < SINGULAR_REL_TOL * norm**n:
        raise SingularityError(f"deformation parameter is singular (|det|={abs(det):.3e}, ||g||={norm:.3e})")
    return g


def deformed_form(g, sig: Signature) -> QuadraticForm:
    """``g^{-1} I_{p,q} g^{-T}``, the form whose lattice values give the spectrum at ``g``."""
    g = check_invertible(g)
    if sig.z != 0:
        raise InputError(f"ambient signature must be nondegenerate, got z={sig.z}")
    if sig.p + sig.q != g.shape[0]:
        raise DimensionError(f"signature ({sig.p},{sig.q}) does not match dimension {g.shape[0]}")
    ginv = np.linalg.inv(g)
    eps = np.array([1.0] * sig.p + [-1.0] * sig.q)
    S = (ginv * eps) @ ginv.T
    return QuadraticForm(0.5 * (S + S.T))


def condition_number(g) -> float:
    return float(np.linalg.cond(np.asarray(g, dtype=np.float64)))


# -- rationality -----------------------------------------------------------


def convergents(x: float, max_denominator: int):
    """Continued-fraction convergents ``p/q`` of ``x`` with ``q <= max_denominator``."""
    frac = Fraction(x)
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while True:
        a = math.floor(frac)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > max_denominator:
            return
        yield Fraction(h1, k1)
        rem = frac - a
        if rem == 0:
            return
        frac = 1 / rem


class IntegerCertificate(NamedTuple):
    scale: float
    matrix: np.ndarray

    def residual(self, target) -> float:
        return float(np.max(np.abs(self.scale * self.matrix - np.asarray(target, dtype=np.float64))))


def integer_proportionality(form: QuadraticForm, search_bound: int = DEFAULT_SEARCH_BOUND, tol: float = DEFAULT_RATIONAL_TOL) -> IntegerCertificate | None:
    """Find ``scale > 0`` and an integer matrix ``A`` with ``gcd(A) = 1`` and
    ``max|scale*A - S| <= tol``.

    Each entry is divided by the largest-magnitude entry and the ratio replaced
    by its first continued-fraction convergent that is accurate enough. A
    ``None`` result means no certificate with denominators and entries up to
    ``search_bound``; it is not a proof of irrationality.
    """
    if search_bound < 1:
        raise InputError(f"search_bound must be >= 1, got {search_bound}")
    S = form.matrix
    ref = S.flat[np.argmax(np.abs(S))]
    if ref == 0:
        return None
    ratios = []
    for r in (S / ref).ravel():
        hit = None
        for c in convergents(float(r), search_bound):
            if abs(float(c) - r) * abs(ref) <= 0.5 * tol:
                hit = c
                break
        if hit is None:
            return None
        ratios.append(hit)
    den = math.lcm(*(c.denominator for c in ratios))
    ints = [int(c * den) for c in ratios]
    g = math.gcd(*ints)
    ints = [v // g for v in ints]
    if max(abs(v) for v in ints) > search_bound:
        return None
    A = np.array(ints, dtype=np.int64).reshape(S.shape)
    Af = A.astype(np.float64)
    scale = float(np.sum(Af * S) / np.sum(Af * Af))
    if scale < 0:
        scale, A = -scale, -A
    cert = IntegerCertificate(scale, _frozen(A))
    if cert.residual(S) > tol:
        return None
    return cert

