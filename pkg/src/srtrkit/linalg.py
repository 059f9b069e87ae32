"""Dense linear-algebra kernel: eigenvalues, tolerant rank, stability-region
predicates, PBH tests, and Householder row compression.

Everything here works on plain ``numpy.ndarray`` values and is pure; the rest
of the toolkit builds on these primitives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NonFiniteError, NumericalFailureError

DOMAINS = ("continuous", "discrete")


def check_domain(domain: str) -> str:
    if domain not in DOMAINS:
        raise ValueError(f"domain must be one of {DOMAINS}, got {domain!r}")
    return domain


def as_real_matrix(M, name: str = "matrix") -> np.ndarray:
    """Validate and return a finite real 2-D array of doubles."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {A.shape}")
    if A.size and not np.all(np.isfinite(A)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return A


def eigenvalues(A) -> np.ndarray:
    """Eigenvalues of a square real matrix, with multiplicity.

    Complex values come in conjugate pairs. Raises DimensionError for
    non-square input and NumericalFailureError if the QR iteration does not
    converge.
    """
    A = as_real_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"square matrix required, got {A.shape}")
    if A.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        return np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigenvalue iteration failed: {exc}") from exc


def singular_values(M) -> np.ndarray:
    M = np.asarray(M)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def auto_rank_tol(M) -> float:
    sv = singular_values(M)
    if sv.size == 0:
        return 0.0
    return max(M.shape) * sv[0] * np.finfo(float).eps


def rank_with_tolerance(M, tol: float | None = None) -> int:
    """Number of singular values above ``tol``.

    ``tol=None`` selects the automatic threshold
    ``max(rows, cols) * ||M|| * eps``. Works for real and complex input.
    """
    M = np.asarray(M)
    if M.ndim != 2:
        raise DimensionError(f"matrix required, got shape {M.shape}")
    if M.size and not np.all(np.isfinite(M.real)) or (
        np.iscomplexobj(M) and M.size and not np.all(np.isfinite(M.imag))
    ):
        raise NonFiniteError("rank input contains non-finite entries")
    sv = singular_values(M)
    if tol is None:
        tol = auto_rank_tol(M)
    elif tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return int(np.count_nonzero(sv > tol))


def in_stability_region(lam: complex, domain: str) -> bool:
    """Strict membership: open left half-plane or open unit disk."""
    check_domain(domain)
    if domain == "continuous":
        return lam.real < 0.0
    return abs(lam) < 1.0


def stability_distance(lam: complex, domain: str) -> float:
    """Distance of ``lam`` outside the stability region (0 when inside)."""
    check_domain(domain)
    if domain == "continuous":
        return max(lam.real, 0.0)
    return max(abs(lam) - 1.0, 0.0)


def stability_margin(eigs, domain: str) -> float:
    """How far inside the region the worst eigenvalue sits (negative when
    some eigenvalue is outside)."""
    check_domain(domain)
    eigs = np.atleast_1d(np.asarray(eigs, dtype=complex))
    if eigs.size == 0:
        return np.inf
    if domain == "continuous":
        return float(-np.max(eigs.real))
    return float(1.0 - np.max(np.abs(eigs)))


def is_stable_spectrum(A, domain: str) -> bool:
    """True iff every eigenvalue of A lies strictly inside the region."""
    return all(in_stability_region(lam, domain) for lam in eigenvalues(A))


def pbh_test(A, B_or_C, mode: str, lam: complex) -> bool:
    """Rank test of ``[A - lam I, B]`` (controllability) or its dual.

    mode: "controllable" or "observable".
    """
    A = as_real_matrix(A, "A")
    M = as_real_matrix(B_or_C, "B_or_C")
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise DimensionError("A must be square")
    if mode == "controllable":
        if M.shape[0] != n:
            raise DimensionError(f"B must have {n} rows, got {M.shape}")
        pencil = np.hstack([A - lam * np.eye(n), M])
    elif mode == "observable":
        if M.shape[1] != n:
            raise DimensionError(f"C must have {n} columns, got {M.shape}")
        pencil = np.hstack([A.T - lam * np.eye(n), M.T])
    else:
        raise ValueError(f"mode must be 'controllable' or 'observable', got {mode!r}")
    if n == 0:
        return True
    return rank_with_tolerance(pencil) == n


def structural_property(A, B_or_C, mode: str, domain: str | None = None) -> bool:
    """PBH test at every eigenvalue of A.

    mode "controllable"/"observable" tests the full spectrum;
    "stabilizable"/"detectable" only eigenvalues outside the stability region
    (``domain`` required for those two).
    """
    A = as_real_matrix(A, "A")
    if mode in ("controllable", "observable"):
        points = eigenvalues(A)
        pbh_mode = mode
    elif mode in ("stabilizable", "detectable"):
        if domain is None:
            raise ValueError(f"mode {mode!r} needs a stability domain")
        check_domain(domain)
        points = [lam for lam in eigenvalues(A) if not in_stability_region(lam, domain)]
        pbh_mode = "controllable" if mode == "stabilizable" else "observable"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return all(pbh_test(A, B_or_C, pbh_mode, lam) for lam in points)


@dataclass(frozen=True)
class RowCompression:
    """Orthogonal Q with ``v @ Q.T = ||v|| * e_last``; ``is_zero`` flags a
    zero input row, for which Q is the identity."""

    Q: np.ndarray
    norm: float
    is_zero: bool


def row_compressor(v) -> RowCompression:
    """Compress a row vector onto the last canonical direction.

    Built from a single Householder reflector with the sign chosen for
    numerical safety, then flipped so the surviving entry is ``+||v||``.
    """
    v = np.asarray(v, dtype=float).ravel()
    q = v.size
    if q < 1:
        raise DimensionError("row_compressor needs a vector of length >= 1")
    if not np.all(np.isfinite(v)):
        raise NonFiniteError("row_compressor input contains non-finite entries")
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        return RowCompression(np.eye(q), 0.0, True)
    e = np.zeros(q)
    e[-1] = 1.0
    if v[-1] > 0:
        u = v + nrm * e
        H = np.eye(q) - 2.0 * np.outer(u, u) / (u @ u)
        flip = np.eye(q)
        flip[-1, -1] = -1.0
        Q = flip @ H
    else:
        u = v - nrm * e
        Q = np.eye(q) - 2.0 * np.outer(u, u) / (u @ u)
    return RowCompression(Q, nrm, False)


def sample_complex_points(
    poles,
    count: int,
    seed: int = 0,
    radius: float = 2.0,
    min_distance: float = 0.1,
    max_draws: int = 200,
) -> np.ndarray:
    """Seeded sample points on a complex disk, kept away from given poles.

    The disk is centered at the barycenter of ``poles`` (origin when empty)
    and grows if rejection leaves too few candidates.
    """
    poles = np.atleast_1d(np.asarray(poles, dtype=complex))
    center = poles.mean() if poles.size else 0.0 + 0.0j
    rng = np.random.default_rng(seed)
    picked: list[complex] = []
    r = radius
    draws = 0
    while len(picked) < count:
        if draws >= max_draws:
            r *= 2.0
            draws = 0
            if r > 1e6:
                raise NumericalFailureError(
                    "could not place sample points away from the poles"
                )
        z = center + r * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
        draws += 1
        if poles.size and np.min(np.abs(poles - z)) < min_distance:
            continue
        if picked and min(abs(z - w) for w in picked) < 1e-6:
            continue
        picked.append(z)
    return np.array(picked)
