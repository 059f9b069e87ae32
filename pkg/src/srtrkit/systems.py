"""State-space containers and structural operations.

Two containers: a plain (A, B, C, D) system and a partitioned realization
whose state is split so the first block of outputs reads the first block of
states directly (C = [I 0]). The partitioned form is the working
representation for everything downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    PoleEvaluationError,
    RegularityViolationError,
    TrivialCaseError,
    UnsupportedFeedthroughError,
)
from .linalg import (
    as_real_matrix,
    check_domain,
    eigenvalues,
    pbh_test,
    rank_with_tolerance,
    row_compressor,
    structural_property,
)


@dataclass(frozen=True)
class StateSpaceSystem:
    """x' = A x + B u, y = C x + D u (or the shift version when discrete)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    domain: str = "continuous"

    def __post_init__(self):
        A = as_real_matrix(self.A, "A")
        B = as_real_matrix(self.B, "B")
        C = as_real_matrix(self.C, "C")
        D = as_real_matrix(self.D, "D")
        check_domain(self.domain)
        n = A.shape[0]
        if A.shape[1] != n:
            raise DimensionError(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise DimensionError(f"B row count {B.shape[0]} != state dim {n}")
        if C.shape[1] != n:
            raise DimensionError(f"C column count {C.shape[1]} != state dim {n}")
        if D.shape != (C.shape[0], B.shape[1]):
            raise DimensionError(
                f"D must be {C.shape[0]}x{B.shape[1]}, got {D.shape}"
            )
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]

    def poles(self) -> np.ndarray:
        return eigenvalues(self.A)


def eval_tfm(sys: StateSpaceSystem, lam: complex) -> np.ndarray:
    """Transfer matrix C (lam I - A)^{-1} B + D at a single point."""
    n = sys.n
    if n == 0:
        return sys.D.astype(complex)
    pencil = lam * np.eye(n) - sys.A
    try:
        X = np.linalg.solve(pencil, sys.B.astype(complex))
    except np.linalg.LinAlgError as exc:
        raise PoleEvaluationError(f"evaluation point {lam} is a pole") from exc
    cond = np.linalg.cond(pencil)
    if not np.isfinite(cond) or cond > 1e13:
        raise PoleEvaluationError(
            f"evaluation point {lam} is too close to a pole (cond={cond:.2e})"
        )
    return sys.C @ X + sys.D


def apply_transform(sys: StateSpaceSystem, T) -> StateSpaceSystem:
    """Similarity transform z = T x: (T A T^-1, T B, C T^-1, D)."""
    T = as_real_matrix(T, "T")
    if T.shape != (sys.n, sys.n):
        raise DimensionError(f"T must be {sys.n}x{sys.n}, got {T.shape}")
    if sys.n and rank_with_tolerance(T) < sys.n:
        raise RegularityViolationError("transform matrix is singular")
    Tinv = np.linalg.inv(T) if sys.n else T
    return StateSpaceSystem(
        T @ sys.A @ Tinv, T @ sys.B, sys.C @ Tinv, sys.D.copy(), sys.domain
    )


def is_minimal(sys: StateSpaceSystem, tol: float | None = None) -> bool:
    """Controllable and observable at every pole (PBH at the eigenvalues)."""
    if sys.n == 0:
        return True
    return structural_property(sys.A, sys.B, "controllable") and structural_property(
        sys.A, sys.C, "observable"
    )


def _krylov_basis(A: np.ndarray, B: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the controllability subspace via SVD rank cut."""
    n = A.shape[0]
    if n == 0 or B.size == 0:
        return np.zeros((n, 0))
    blocks = [B]
    M = B
    for _ in range(n - 1):
        M = A @ M
        blocks.append(M)
    K = np.hstack(blocks)
    U, s, _ = np.linalg.svd(K, full_matrices=False)
    if tol is None:
        tol = max(K.shape) * (s[0] if s.size else 0.0) * np.finfo(float).eps
    r = int(np.count_nonzero(s > tol))
    return U[:, :r]


def minimal_realization(sys: StateSpaceSystem, tol: float | None = None) -> StateSpaceSystem:
    """Remove uncontrollable then unobservable states (two projection passes)."""
    V = _krylov_basis(sys.A, sys.B, tol)
    A1 = V.T @ sys.A @ V
    B1 = V.T @ sys.B
    C1 = sys.C @ V
    W = _krylov_basis(A1.T, C1.T, tol)
    return StateSpaceSystem(
        W.T @ A1 @ W, W.T @ B1, C1 @ W, sys.D.copy(), sys.domain
    )


@dataclass(frozen=True)
class PartitionedRealization:
    """Realization with C = [I_p 0]: the first p states are the outputs.

    State dimension n = p + q with q >= 0; q = 0 encodes static output
    dynamics (no hidden states).
    """

    A11: np.ndarray
    A12: np.ndarray
    A21: np.ndarray
    A22: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    domain: str = "continuous"

    def __post_init__(self):
        A11 = as_real_matrix(self.A11, "A11")
        A12 = as_real_matrix(self.A12, "A12")
        A21 = as_real_matrix(self.A21, "A21")
        A22 = as_real_matrix(self.A22, "A22")
        B1 = as_real_matrix(self.B1, "B1")
        B2 = as_real_matrix(self.B2, "B2")
        check_domain(self.domain)
        p = A11.shape[0]
        q = A22.shape[0]
        if A11.shape != (p, p):
            raise DimensionError(f"A11 must be square, got {A11.shape}")
        if A22.shape != (q, q):
            raise DimensionError(f"A22 must be square, got {A22.shape}")
        if A12.shape != (p, q):
            raise DimensionError(f"A12 must be {p}x{q}, got {A12.shape}")
        if A21.shape != (q, p):
            raise DimensionError(f"A21 must be {q}x{p}, got {A21.shape}")
        if B1.shape[0] != p:
            raise DimensionError(f"B1 must have {p} rows, got {B1.shape}")
        if B2.shape != (q, B1.shape[1]):
            raise DimensionError(
                f"B2 must be {q}x{B1.shape[1]}, got {B2.shape}"
            )
        if p < 1:
            raise DimensionError("output dimension p must be at least 1")
        for name, M in (("A11", A11), ("A12", A12), ("A21", A21), ("A22", A22),
                        ("B1", B1), ("B2", B2)):
            object.__setattr__(self, name, M)

    @property
    def p(self) -> int:
        return self.A11.shape[0]

    @property
    def q(self) -> int:
        return self.A22.shape[0]

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def m(self) -> int:
        return self.B1.shape[1]

    @property
    def A(self) -> np.ndarray:
        return np.block([[self.A11, self.A12], [self.A21, self.A22]])

    @property
    def B(self) -> np.ndarray:
        return np.vstack([self.B1, self.B2])

    @property
    def C(self) -> np.ndarray:
        return np.hstack([np.eye(self.p), np.zeros((self.p, self.q))])

    def full_system(self) -> StateSpaceSystem:
        return StateSpaceSystem(
            self.A, self.B, self.C, np.zeros((self.p, self.m)), self.domain
        )

    def observable_pair(self) -> bool:
        """PBH observability of (A22, A12): the hidden block must be seen
        through the coupling rows."""
        if self.q == 0:
            return True
        return structural_property(self.A22, self.A12, "observable")


def to_output_normal(sys: StateSpaceSystem, tol: float | None = None) -> tuple[
    PartitionedRealization, np.ndarray
]:
    """Bring a strictly proper system with full-row-rank C into C = [I 0] form.

    Returns the partitioned realization and the state transform T used
    (z = T x). Raises UnsupportedFeedthroughError for D != 0,
    RegularityViolationError when C is row-rank deficient, TrivialCaseError
    when there is no state at all.
    """
    if sys.n == 0:
        raise TrivialCaseError("system has no state to partition")
    if np.any(sys.D != 0.0):
        raise UnsupportedFeedthroughError("nonzero feedthrough is not supported here")
    p = sys.n_outputs
    if p < 1:
        raise DimensionError("at least one output is required")
    if p > sys.n:
        raise RegularityViolationError(
            f"more outputs ({p}) than states ({sys.n})"
        )
    if rank_with_tolerance(sys.C, tol) < p:
        raise RegularityViolationError("output matrix is row-rank deficient")
    # stack C over an orthonormal completion of its row space; the inverse of
    # this T is [C^+, Q2] so C T^{-1} = [I 0] exactly in exact arithmetic
    Q, _ = np.linalg.qr(sys.C.T, mode="complete")
    T = np.vstack([sys.C, Q[:, p:].T])
    moved = apply_transform(sys, T)
    return (
        PartitionedRealization(
            moved.A[:p, :p], moved.A[:p, p:], moved.A[p:, :p], moved.A[p:, p:],
            moved.B[:p], moved.B[p:], sys.domain,
        ),
        T,
    )


@dataclass(frozen=True)
class RingNetwork:
    """Directed-ring interconnection of p identical two-block nodes.

    ``system`` is the flat (A, B, C, D); ``partitioned`` is the same model in
    output-normal coordinates; ``transform`` maps flat states to partitioned
    ones.
    """

    system: StateSpaceSystem
    partitioned: PartitionedRealization
    transform: np.ndarray
    p: int


def ring_shift(p: int) -> np.ndarray:
    """Adjacency of the directed p-cycle: node i listens to node i-1."""
    F = np.zeros((p, p))
    F[0, p - 1] = 1.0
    for i in range(1, p):
        F[i, i - 1] = 1.0
    return F


def build_ring_network(
    p: int,
    phi: StateSpaceSystem,
    gamma: StateSpaceSystem,
    domain: str = "continuous",
) -> RingNetwork:
    """Assemble p nodes on a directed ring.

    Each node i has a local filter ``phi`` driven by the previous node's
    output and an actuation channel ``gamma`` driven by the node's own input;
    the node output is the sum of both block outputs. Both blocks must be
    SISO with D = 0.
    """
    if p < 2:
        raise DimensionError("a ring needs at least 2 nodes")
    for name, blk in (("phi", phi), ("gamma", gamma)):
        if blk.n_inputs != 1 or blk.n_outputs != 1:
            raise DimensionError(f"{name} must be SISO")
        if np.any(blk.D != 0.0):
            raise UnsupportedFeedthroughError(f"{name} must be strictly proper")
    F = ring_shift(p)
    Ip = np.eye(p)
    nf, ng = phi.n, gamma.n
    # phi states see the previous node's total output y_{i-1}
    A = np.block([
        [np.kron(Ip, phi.A) + np.kron(F, phi.B @ phi.C), np.kron(F, phi.B @ gamma.C)],
        [np.zeros((p * ng, p * nf)), np.kron(Ip, gamma.A)],
    ])
    B = np.vstack([np.zeros((p * nf, p)), np.kron(Ip, gamma.B)])
    C = np.hstack([np.kron(Ip, phi.C), np.kron(Ip, gamma.C)])
    flat = StateSpaceSystem(A, B, C, np.zeros((p, p)), domain)
    part, T = to_output_normal(flat)
    return RingNetwork(flat, part, T, p)
