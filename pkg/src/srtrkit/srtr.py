"""Pair representations of the form G = (lam I - W)^{-1} V.

A gain K on a partitioned realization produces the pair (W, V) with hidden
state dimension n - p; this module constructs the pair, verifies the defining
identity by sampling, extracts the normalized (zero-diagonal) form, reads off
sparsity masks, and certifies coprimeness of [lam I - W, V] through rank
tests on a linear pencil.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DimensionError, NumericalFailureError
from .linalg import (
    as_real_matrix,
    eigenvalues,
    is_stable_spectrum,
    rank_with_tolerance,
    sample_complex_points,
    singular_values,
)
from .rational import RationalFn, realization_entry_numerators
from .systems import PartitionedRealization, StateSpaceSystem, eval_tfm


@dataclass(frozen=True)
class SrtrPair:
    """A realization-level carrier for the pair (W, V).

    The four derived blocks give [W V] the state-space form
    (Aw, [A_K | K B1 + B2], A12, [A11 - A12 K | B1]) with
    Aw = A22 + K A12 and A_K = K A11 - K A12 K + A21 - A22 K.
    """

    base: PartitionedRealization
    K: np.ndarray

    def __post_init__(self):
        K = as_real_matrix(self.K, "K")
        if K.shape != (self.base.q, self.base.p):
            raise DimensionError(
                f"K must be {self.base.q}x{self.base.p}, got {K.shape}"
            )
        object.__setattr__(self, "K", K)

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def q(self) -> int:
        return self.base.q

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def domain(self) -> str:
        return self.base.domain

    @property
    def Aw(self) -> np.ndarray:
        return self.base.A22 + self.K @ self.base.A12

    @property
    def A_K(self) -> np.ndarray:
        b, K = self.base, self.K
        return K @ b.A11 - K @ b.A12 @ K + b.A21 - b.A22 @ K

    @property
    def Bw(self) -> np.ndarray:
        return np.hstack([self.A_K, self.K @ self.base.B1 + self.base.B2])

    @property
    def Cw(self) -> np.ndarray:
        return self.base.A12

    @property
    def Dw(self) -> np.ndarray:
        return np.hstack([self.base.A11 - self.base.A12 @ self.K, self.base.B1])

    def wv_system(self) -> StateSpaceSystem:
        """[W V] as one system: p outputs, p + m inputs, q states."""
        return StateSpaceSystem(self.Aw, self.Bw, self.Cw, self.Dw, self.domain)

    def eval_w(self, lam: complex) -> np.ndarray:
        return eval_tfm(self.wv_system(), lam)[:, : self.p]

    def eval_v(self, lam: complex) -> np.ndarray:
        return eval_tfm(self.wv_system(), lam)[:, self.p :]

    def response(self, lam: complex) -> np.ndarray:
        """G(lam) = (lam I - W(lam))^{-1} V(lam)."""
        wv = eval_tfm(self.wv_system(), lam)
        pencil = lam * np.eye(self.p) - wv[:, : self.p]
        return np.linalg.solve(pencil, wv[:, self.p :])


def srtr_from_k(base: PartitionedRealization, K) -> SrtrPair:
    """Build the pair determined by gain K on the given partitioned base."""
    return SrtrPair(base, K)


def verify_srtr_identity(
    pair: SrtrPair,
    base: PartitionedRealization | None = None,
    n_samples: int = 7,
    seed: int = 0,
) -> float:
    """Max relative sampling residual of G = (lam I - W)^{-1} V.

    ``base`` defaults to the pair's own base; passing a different one checks
    the pair against that system's transfer matrix instead.
    """
    if base is None:
        base = pair.base
    G = base.full_system()
    poles = np.concatenate([eigenvalues(base.A), eigenvalues(pair.Aw)])
    worst = 0.0
    for attempt in range(5):
        points = sample_complex_points(poles, n_samples, seed=seed + attempt)
        try:
            worst = 0.0
            for lam in points:
                g = eval_tfm(G, lam)
                rec = pair.response(lam)
                worst = max(
                    worst,
                    float(np.linalg.norm(g - rec) / (1.0 + np.linalg.norm(g))),
                )
            return worst
        except (np.linalg.LinAlgError, NumericalFailureError):
            continue
    raise NumericalFailureError(
        "could not find sample points clear of the poles"
    )


def srtr_is_stable(pair: SrtrPair) -> bool:
    """Stability of the pair is stability of its hidden dynamics Aw."""
    if pair.q == 0:
        return True
    return is_stable_spectrum(pair.Aw, pair.domain)


@dataclass(frozen=True)
class NrfPair:
    """Normalized form: Phi has an identically zero diagonal and
    G = (I - Phi)^{-1} Gamma. Entries are RationalFn objects."""

    Phi: np.ndarray
    Gamma: np.ndarray
    notes: tuple = ()

    @property
    def p(self) -> int:
        return self.Phi.shape[0]

    @property
    def m(self) -> int:
        return self.Gamma.shape[1]

    def eval_phi(self, lam: complex) -> np.ndarray:
        out = np.zeros((self.p, self.p), dtype=complex)
        for i in range(self.p):
            for j in range(self.p):
                out[i, j] = self.Phi[i, j](lam)
        return out

    def eval_gamma(self, lam: complex) -> np.ndarray:
        out = np.zeros((self.p, self.m), dtype=complex)
        for i in range(self.p):
            for k in range(self.m):
                out[i, k] = self.Gamma[i, k](lam)
        return out

    def response(self, lam: complex) -> np.ndarray:
        """G(lam) = (I - Phi(lam))^{-1} Gamma(lam)."""
        return np.linalg.solve(
            np.eye(self.p) - self.eval_phi(lam), self.eval_gamma(lam)
        )


def _coeff_scale(coeff_arrays) -> float:
    scale = 0.0
    for c in coeff_arrays:
        if c.size:
            scale = max(scale, float(np.max(np.abs(c))))
    return max(scale, 1.0)


def nrf_from_srtr(pair: SrtrPair, cancel_tol: float = 1e-8) -> NrfPair:
    """Normalize the pair row by row.

    Every entry of [W V] shares the denominator chi = det(lam I - Aw), so row
    i of the normalized form divides the off-diagonal numerators by
    lam * chi - num_ii. Numerically coincident numerator/denominator roots
    are cancelled; near-misses are left alone and noted.
    """
    p, m = pair.p, pair.m
    chi, num = realization_entry_numerators(pair.Aw, pair.Bw, pair.Cw, pair.Dw)
    wnum, vnum = num[:, :p, :], num[:, p:, :]
    lam_chi = P.polymulx(chi)
    # root-pairing tolerances must follow the magnitude of the spectrum,
    # not of the characteristic coefficients, which grow combinatorially
    aw_eigs = eigenvalues(pair.Aw)
    root_scale = 1.0 + (float(np.max(np.abs(aw_eigs))) if aw_eigs.size else 0.0)
    tol = cancel_tol * root_scale
    near = 1e-5 * root_scale
    Phi = np.empty((p, p), dtype=object)
    Gamma = np.empty((p, m), dtype=object)
    notes: list[str] = []
    for i in range(p):
        den = P.polysub(lam_chi, wnum[i, i])
        for j in range(p):
            if i == j:
                Phi[i, j] = RationalFn(np.zeros(1), np.ones(1))
                continue
            entry = RationalFn(wnum[i, j], den).reduce(tol)
            Phi[i, j] = entry
            if _has_near_common_root(entry, near):
                notes.append(f"Phi[{i},{j}]: near-common roots left uncancelled")
        for k in range(m):
            entry = RationalFn(vnum[i, k], den).reduce(tol)
            Gamma[i, k] = entry
            if _has_near_common_root(entry, near):
                notes.append(f"Gamma[{i},{k}]: near-common roots left uncancelled")
    return NrfPair(Phi, Gamma, tuple(notes))


def _has_near_common_root(fn: RationalFn, tol: float) -> bool:
    if fn.is_zero() or fn.num_degree == 0 or fn.den_degree == 0:
        return False
    nr = P.polyroots(fn.num)
    dr = P.polyroots(fn.den)
    return bool(np.min(np.abs(nr[:, None] - dr[None, :])) < tol)


@dataclass(eq=False)
class SparsityPattern:
    """Binary masks for the coupling (p x p) and input (p x m) structure."""

    maskW: np.ndarray
    maskV: np.ndarray

    def __post_init__(self):
        self.maskW = np.asarray(self.maskW, dtype=int)
        self.maskV = np.asarray(self.maskV, dtype=int)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsityPattern):
            return NotImplemented
        return bool(
            np.array_equal(self.maskW, other.maskW)
            and np.array_equal(self.maskV, other.maskV)
        )


def sparsity_pattern(obj, tol: float = 1e-9) -> SparsityPattern:
    """Zero/nonzero masks of the pair entries.

    An entry counts as zero when all its numerator coefficients fall below
    ``tol`` times the largest coefficient seen anywhere in the object. The
    coupling mask's diagonal is always 1: it describes the structurally
    nonzero diagonal of (lam I - W), which the normalized form shares through
    its row denominators.
    """
    if isinstance(obj, SrtrPair):
        p, m = obj.p, obj.m
        _, num = realization_entry_numerators(obj.Aw, obj.Bw, obj.Cw, obj.Dw)
        coeffs_w = [num[i, j] for i in range(p) for j in range(p)]
        coeffs_v = [num[i, p + k] for i in range(p) for k in range(m)]
    elif isinstance(obj, NrfPair):
        p, m = obj.p, obj.m
        coeffs_w = [obj.Phi[i, j].num for i in range(p) for j in range(p)]
        coeffs_v = [obj.Gamma[i, k].num for i in range(p) for k in range(m)]
    else:
        raise TypeError(f"expected SrtrPair or NrfPair, got {type(obj).__name__}")
    scale = _coeff_scale([np.asarray(c) for c in coeffs_w + coeffs_v])
    cut = tol * scale
    maskW = np.array(
        [[0 if np.all(np.abs(coeffs_w[i * p + j]) <= cut) else 1 for j in range(p)]
         for i in range(p)]
    )
    maskV = np.array(
        [[0 if np.all(np.abs(coeffs_v[i * m + k]) <= cut) else 1 for k in range(m)]
         for i in range(p)]
    )
    np.fill_diagonal(maskW, 1)
    return SparsityPattern(maskW, maskV)


@dataclass(frozen=True)
class CoprimeReport:
    full_normal_rank: bool
    no_finite_zeros: bool
    no_infinite_zeros: bool
    coprime: bool
    min_singular: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "fullNormalRank": self.full_normal_rank,
            "noFiniteZeros": self.no_finite_zeros,
            "noInfiniteZeros": self.no_infinite_zeros,
            "coprime": self.coprime,
            "minSingular": {k: float(v) for k, v in self.min_singular.items()},
        }


def _flcf_pencil(pair: SrtrPair) -> tuple[np.ndarray, np.ndarray]:
    """Linear pencil S0 + lam S1 whose finite zeros are the common zeros of
    [lam I - W, V]."""
    b, K = pair.base, pair.K
    p, q, m = pair.p, pair.q, pair.m
    rows, cols = q + 2 * p, q + 2 * p + m
    S0 = np.zeros((rows, cols))
    S1 = np.zeros((rows, cols))
    S0[:q, :q] = pair.Aw
    S0[:q, q + p : q + 2 * p] = -pair.A_K
    S0[:q, q + 2 * p :] = K @ b.B1 + b.B2
    S0[q : q + p, q : q + p] = np.eye(p)
    S0[q + p :, :q] = b.A12
    S0[q + p :, q : q + p] = np.eye(p)
    S0[q + p :, q + p : q + 2 * p] = -(b.A11 - b.A12 @ K)
    S0[q + p :, q + 2 * p :] = b.B1
    S1[:q, :q] = -np.eye(q)
    S1[q : q + p, q + p : q + 2 * p] = -np.eye(p)
    return S0, S1


def check_flcf(pair: SrtrPair, probes: int = 20, seed: int = 0) -> CoprimeReport:
    """Certify that [lam I - W, V] has no common zeros, finite or infinite.

    The certificate is a randomized rank test on the associated linear
    pencil: full row rank at every pole candidate (eigenvalues of Aw and of
    the base A) plus seeded random probe points, full row rank of the
    leading structure at infinity, and full normal rank at a generic point.
    Minimum singular values of every tested matrix are reported so the
    margins are auditable.
    """
    S0, S1 = _flcf_pencil(pair)
    rows = S0.shape[0]
    b = pair.base
    candidates = list(eigenvalues(pair.Aw)) + list(eigenvalues(b.A))
    rng = np.random.default_rng(seed)
    spread = 2.0 * (1.0 + max([abs(c) for c in candidates], default=1.0))
    candidates += list(
        spread * (rng.uniform(-1, 1, probes) + 1j * rng.uniform(-1, 1, probes))
    )
    sig_finite = np.inf
    no_finite = True
    for lam in candidates:
        S = S0 + lam * S1
        sv = singular_values(S)
        sig_finite = min(sig_finite, float(sv[rows - 1]))
        if rank_with_tolerance(S) < rows:
            no_finite = False
    S_inf = np.zeros_like(S0)
    q, p = pair.q, pair.p
    S_inf[:q, :q] = np.eye(q)
    S_inf[q : q + p, q + p : q + 2 * p] = np.eye(p)
    S_inf[q + p :, :] = S0[q + p :, :]
    sv_inf = singular_values(S_inf)
    no_infinite = rank_with_tolerance(S_inf) == rows
    generic = sample_complex_points(np.array(candidates), 1, seed=seed + 1)[0]
    sv_gen = singular_values(S0 + generic * S1)
    full_normal = rank_with_tolerance(S0 + generic * S1) == rows
    return CoprimeReport(
        full_normal_rank=full_normal,
        no_finite_zeros=no_finite,
        no_infinite_zeros=no_infinite,
        coprime=bool(full_normal and no_finite and no_infinite),
        min_singular={
            "finite": sig_finite,
            "infinite": float(sv_inf[rows - 1]),
            "normalRank": float(sv_gen[rows - 1]),
        },
    )
