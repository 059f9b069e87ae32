"""Left factorizations with stable factors, and the bridge in both
directions: pair -> factorization through a stable shaping factor Theta, and
factorization -> pair through a right-stabilizing solution of a nonsymmetric
algebraic Riccati equation built from the factor data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg

from .errors import (
    DimensionError,
    InvalidThetaError,
    KontrollerFormError,
    NoSolutionError,
    NumericalFailureError,
    PreconditionError,
)
from .linalg import (
    as_real_matrix,
    check_domain,
    eigenvalues,
    in_stability_region,
    is_stable_spectrum,
    pbh_test,
    rank_with_tolerance,
    sample_complex_points,
)
from .rational import realization_entry_numerators
from .srtr import SparsityPattern, SrtrPair, srtr_is_stable, _coeff_scale
from .systems import (
    PartitionedRealization,
    StateSpaceSystem,
    eval_tfm,
    is_minimal,
    to_output_normal,
)


@dataclass(frozen=True)
class ThetaFactor:
    """Square stable shaping factor Theta(lam) = Cx (lam I - Ax)^{-1} Bx."""

    Ax: np.ndarray
    Bx: np.ndarray
    Cx: np.ndarray
    domain: str = "continuous"

    def __post_init__(self):
        Ax = as_real_matrix(self.Ax, "Ax")
        Bx = as_real_matrix(self.Bx, "Bx")
        Cx = as_real_matrix(self.Cx, "Cx")
        check_domain(self.domain)
        p = Ax.shape[0]
        if Ax.shape != (p, p) or Bx.shape != (p, p) or Cx.shape != (p, p):
            raise DimensionError("Ax, Bx, Cx must all be square of equal size")
        if not is_stable_spectrum(Ax, self.domain):
            raise InvalidThetaError("Ax must have all eigenvalues in the stability region")
        if p and rank_with_tolerance(Bx) < p:
            raise InvalidThetaError("Bx must be invertible")
        if p and rank_with_tolerance(Cx) < p:
            raise InvalidThetaError("Cx must be invertible")
        object.__setattr__(self, "Ax", Ax)
        object.__setattr__(self, "Bx", Bx)
        object.__setattr__(self, "Cx", Cx)

    @property
    def p(self) -> int:
        return self.Ax.shape[0]

    def system(self) -> StateSpaceSystem:
        return StateSpaceSystem(
            self.Ax, self.Bx, self.Cx, np.zeros((self.p, self.p)), self.domain
        )

    def evaluate(self, lam: complex) -> np.ndarray:
        return eval_tfm(self.system(), lam)


def make_theta(Ax, Bx, Cx, domain: str = "continuous") -> ThetaFactor:
    return ThetaFactor(Ax, Bx, Cx, domain)


@dataclass(frozen=True)
class LcfOverS:
    """[M N] in the normalized observer-like form.

    The factor pair is carried by a partitioned block set plus gains:
    [M N](lam) = [U 0] + [U 0](lam I - Ap)^{-1} [[F1, B1], [F2, B2]] with the
    pole matrix Ap = blocks.A + [[F1, 0], [F2, 0]]. Construction validates
    shapes and invertibility of U; stability of Ap is the factories'
    guarantee and verify_lcf's to check.
    """

    blocks: PartitionedRealization
    F1: np.ndarray
    F2: np.ndarray
    U: np.ndarray

    def __post_init__(self):
        F1 = as_real_matrix(self.F1, "F1")
        F2 = as_real_matrix(self.F2, "F2")
        U = as_real_matrix(self.U, "U")
        p, q = self.blocks.p, self.blocks.q
        if F1.shape != (p, p):
            raise DimensionError(f"F1 must be {p}x{p}, got {F1.shape}")
        if F2.shape != (q, p):
            raise DimensionError(f"F2 must be {q}x{p}, got {F2.shape}")
        if U.shape != (p, p):
            raise DimensionError(f"U must be {p}x{p}, got {U.shape}")
        if rank_with_tolerance(U) < p:
            raise KontrollerFormError("a", "U must be invertible")
        object.__setattr__(self, "F1", F1)
        object.__setattr__(self, "F2", F2)
        object.__setattr__(self, "U", U)

    @property
    def p(self) -> int:
        return self.blocks.p

    @property
    def q(self) -> int:
        return self.blocks.q

    @property
    def m(self) -> int:
        return self.blocks.m

    @property
    def domain(self) -> str:
        return self.blocks.domain

    def pole_matrix(self) -> np.ndarray:
        b = self.blocks
        return np.block(
            [[b.A11 + self.F1, b.A12], [b.A21 + self.F2, b.A22]]
        )

    def gain_column(self) -> np.ndarray:
        return np.vstack([self.F1, self.F2])

    def mn_system(self) -> StateSpaceSystem:
        """One system whose transfer matrix is [M(lam) N(lam)]."""
        b = self.blocks
        p = self.p
        Bmn = np.block([[self.F1, b.B1], [self.F2, b.B2]])
        Cmn = np.hstack([self.U, np.zeros((p, self.q))])
        Dmn = np.hstack([self.U, np.zeros((p, self.m))])
        return StateSpaceSystem(self.pole_matrix(), Bmn, Cmn, Dmn, self.domain)

    def eval_mn(self, lam: complex) -> tuple[np.ndarray, np.ndarray]:
        mn = eval_tfm(self.mn_system(), lam)
        return mn[:, : self.p], mn[:, self.p :]

    def response(self, lam: complex) -> np.ndarray:
        """G(lam) = M(lam)^{-1} N(lam)."""
        M, N = self.eval_mn(lam)
        return np.linalg.solve(M, N)


def lcf_from_srtr(pair: SrtrPair, theta: ThetaFactor) -> LcfOverS:
    """Turn a stable pair into a stable left factorization M = Theta (lam I - W),
    N = Theta V.

    The result is stored in the normalized observer-like form; its pole
    matrix is block triangular with spectrum eig(Ax) union eig(Aw), so the
    pair's poles are preserved and stability is inherited.
    """
    if theta.domain != pair.domain:
        raise DimensionError("theta and pair must share the same domain")
    if theta.p != pair.p:
        raise DimensionError(
            f"theta must be {pair.p}x{pair.p}, got {theta.p}x{theta.p}"
        )
    if not srtr_is_stable(pair):
        raise PreconditionError("the pair must be stable (all eig(Aw) in the region)")
    b, K = pair.base, pair.K
    L11 = b.A11 - b.A12 @ K
    blocks = PartitionedRealization(
        A11=L11,
        A12=b.A12,
        A21=pair.A_K,
        A22=pair.Aw,
        B1=b.B1,
        B2=K @ b.B1 + b.B2,
        domain=pair.domain,
    )
    X = np.linalg.solve(theta.Bx, theta.Ax @ theta.Bx)
    return LcfOverS(
        blocks=blocks,
        F1=X - L11,
        F2=-pair.A_K,
        U=theta.Cx @ theta.Bx,
    )


def to_kontroller_form(sys: StateSpaceSystem, F, U) -> LcfOverS:
    """Normalize an observer-form factorization [M N] = [U 0] + U C (lam I - A - F C)^{-1} [F B].

    ``sys`` carries the plant data (A, B, C) with D = 0; F is the output
    injection making A + F C stable; U is the invertible leading coefficient.
    The three admissibility conditions are checked and the failing one is
    named: (a) U invertible, (b) A + F C stable, (c) (A, B, C) minimal.
    """
    F = as_real_matrix(F, "F")
    U = as_real_matrix(U, "U")
    p, n = sys.n_outputs, sys.n
    if F.shape != (n, p):
        raise DimensionError(f"F must be {n}x{p}, got {F.shape}")
    if U.shape != (p, p):
        raise DimensionError(f"U must be {p}x{p}, got {U.shape}")
    if np.any(sys.D != 0.0):
        raise KontrollerFormError("c", "plant feedthrough must be zero")
    if rank_with_tolerance(U) < p:
        raise KontrollerFormError("a", "U must be invertible")
    if not is_stable_spectrum(sys.A + F @ sys.C, sys.domain):
        raise KontrollerFormError("b", "A + F C must be stable")
    if not is_minimal(sys):
        raise KontrollerFormError("c", "(A, B, C) must be minimal")
    part, T = to_output_normal(sys)
    TF = T @ F
    return LcfOverS(blocks=part, F1=TF[:p], F2=TF[p:], U=U)


@dataclass(frozen=True)
class RiccatiSolution:
    """Right-stabilizing solution K of
    K(A11+F1) - K A12 K + (A21+F2) - A22 K = 0."""

    K: np.ndarray
    residual_norm: float
    closed_spectrum: np.ndarray
    subspace_cond: float
    subset: np.ndarray

    def as_dict(self) -> dict:
        return {
            "K": self.K.tolist(),
            "residualNorm": float(self.residual_norm),
            "closedSpectrum": [[z.real, z.imag] for z in self.closed_spectrum],
            "subspaceCond": float(self.subspace_cond),
        }


def _riccati_data(lcf: LcfOverS) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    b = lcf.blocks
    return b.A11 + lcf.F1, b.A12, b.A21 + lcf.F2, b.A22


def riccati_residual(lcf: LcfOverS, K: np.ndarray) -> float:
    Ap11, A12, Ap21, A22 = _riccati_data(lcf)
    R = K @ Ap11 - K @ A12 @ K + Ap21 - A22 @ K
    return float(np.linalg.norm(R))


def _hamiltonian_like(lcf: LcfOverS) -> np.ndarray:
    Ap11, A12, Ap21, A22 = _riccati_data(lcf)
    return np.block([[Ap11, -A12], [-Ap21, A22]])


def _conjugate_groups(w: np.ndarray, tol: float) -> list[list[int]]:
    """Indices of eigenvalues grouped so complex conjugate partners stay
    together; groups have size 1 (real) or 2 (pair)."""
    groups: list[list[int]] = []
    used = np.zeros(w.size, dtype=bool)
    for i in range(w.size):
        if used[i]:
            continue
        used[i] = True
        if abs(w[i].imag) <= tol:
            groups.append([i])
            continue
        partner = None
        for j in range(i + 1, w.size):
            if not used[j] and abs(w[j] - np.conj(w[i])) <= tol:
                partner = j
                break
        if partner is None:
            groups.append([i])
        else:
            used[partner] = True
            groups.append([i, partner])
    return groups


def _real_basis(w: np.ndarray, V: np.ndarray, group_sel: list[list[int]]) -> np.ndarray:
    cols = []
    for g in group_sel:
        if len(g) == 1 and abs(w[g[0]].imag) <= 1e-9 * (1 + abs(w[g[0]])):
            cols.append(np.real(V[:, g[0]]))
        else:
            v = V[:, g[0]]
            cols.append(np.real(v))
            cols.append(np.imag(v))
    return np.column_stack(cols)


def _candidate_from_basis(
    lcf: LcfOverS, basis: np.ndarray, subset: np.ndarray, cond_cap: float = 1e10
):
    p = lcf.p
    Q, _ = np.linalg.qr(basis)
    V1, V2 = Q[:p], Q[p:]
    cond1 = float(np.linalg.cond(V1))
    if not np.isfinite(cond1) or cond1 > cond_cap:
        return None, cond1
    K = V2 @ np.linalg.inv(V1)
    Ap11, A12, _, _ = _riccati_data(lcf)
    closed = eigenvalues(Ap11 - A12 @ K)
    stabilizing = all(in_stability_region(z, lcf.domain) for z in closed)
    if not stabilizing:
        return None, cond1
    return (
        RiccatiSolution(
            K=K,
            residual_norm=riccati_residual(lcf, K),
            closed_spectrum=closed,
            subspace_cond=cond1,
            subset=subset,
        ),
        cond1,
    )


def _schur_candidates(lcf: LcfOverS, Aplus: np.ndarray) -> list[RiccatiSolution]:
    """Fallback for defective spectra: ordered real Schur forms whose leading
    p columns span an invariant subspace."""
    p = lcf.p
    w = eigenvalues(Aplus)
    key = (lambda z: z.real) if lcf.domain == "continuous" else (lambda z: abs(z))
    vals = sorted(key(z) for z in w)
    cuts = []
    for i in range(len(vals) - 1):
        cuts.append(0.5 * (vals[i] + vals[i + 1]))
    cuts += [vals[0] - 1.0, vals[-1] + 1.0]
    out = []
    for cut in cuts:
        def sel(wr, wi, _cut=cut):
            z = complex(wr, wi) if np.isscalar(wr) else wr + 1j * wi
            return key(z) < _cut
        try:
            T, Z, sdim = scipy.linalg.schur(Aplus, output="real", sort=sel)
        except Exception:
            continue
        if sdim != p:
            continue
        subset = np.array(sorted(w, key=key)[:p])
        cand, _ = _candidate_from_basis(lcf, Z[:, :p], subset)
        if cand is not None:
            out.append(cand)
    return out


def solve_ctnare(lcf: LcfOverS, tol: float | None = None) -> RiccatiSolution:
    """Right-stabilizing Riccati solution from a p-dimensional invariant
    subspace of the sign-flipped pole matrix.

    All conjugate-closed p-element eigenvalue subsets are tried; among those
    whose top block V1 is invertible and whose closed spectrum lands in the
    stability region, the best-conditioned V1 wins, with smaller ||K|| as the
    tie-break. Defective spectra fall back to ordered Schur bases.
    """
    p, q = lcf.p, lcf.q
    if tol is None:
        tol = 1e-10 * (1.0 + float(np.linalg.norm(lcf.blocks.A)))
    if q == 0:
        Ap11, _, _, _ = _riccati_data(lcf)
        closed = eigenvalues(Ap11)
        if not all(in_stability_region(z, lcf.domain) for z in closed):
            raise NoSolutionError("empty-K case requires A11 + F1 already stable")
        return RiccatiSolution(
            K=np.zeros((0, p)),
            residual_norm=0.0,
            closed_spectrum=closed,
            subspace_cond=1.0,
            subset=closed,
        )
    Aplus = _hamiltonian_like(lcf)
    w, V = np.linalg.eig(Aplus)
    scale = 1.0 + float(np.max(np.abs(w)))
    groups = _conjugate_groups(w, 1e-9 * scale)
    candidates: list[RiccatiSolution] = []
    best_cond = np.inf
    eig_cond = np.linalg.cond(V)
    if np.isfinite(eig_cond) and eig_cond < 1e8:
        for r in range(len(groups) + 1):
            for sel in combinations(groups, r):
                if sum(len(g) for g in sel) != p:
                    continue
                basis = _real_basis(w, V, list(sel))
                subset = np.array([w[i] for g in sel for i in g])
                cand, cond1 = _candidate_from_basis(lcf, basis, subset)
                best_cond = min(best_cond, cond1)
                if cand is not None:
                    candidates.append(cand)
    if not candidates:
        candidates = _schur_candidates(lcf, Aplus)
    if not candidates:
        raise NoSolutionError(
            "no invariant subspace gave an invertible, stabilizing V1",
            best_cond=None if not np.isfinite(best_cond) else best_cond,
        )
    candidates.sort(
        key=lambda c: (c.subspace_cond, float(np.linalg.norm(c.K)))
    )
    best = candidates[0]
    if best.residual_norm > tol:
        raise NumericalFailureError(
            f"Riccati residual {best.residual_norm:.3e} above tolerance {tol:.3e}"
        )
    return best


def srtr_from_lcf(lcf: LcfOverS, solution: RiccatiSolution | None = None) -> SrtrPair:
    """Recover a stable pair from the factorization.

    A right-stabilizing Riccati solution K turns the stored blocks into the
    pair via the standard gain construction; the result is cross-checked
    against the closed-form recovery
    [W V] = [lam I, 0] + (lam I - Ax) U^{-1} [-M, N] at sample points.
    """
    if solution is None:
        solution = solve_ctnare(lcf)
    K = as_real_matrix(solution.K, "K")
    if K.shape != (lcf.q, lcf.p):
        raise DimensionError(f"K must be {lcf.q}x{lcf.p}, got {K.shape}")
    Ap11, A12, _, _ = _riccati_data(lcf)
    Ax = Ap11 - A12 @ K
    if not is_stable_spectrum(Ax, lcf.domain):
        raise PreconditionError("K is not right stabilizing for this factorization")
    pair = SrtrPair(lcf.blocks, K)
    # closed-form recovery check at a few points clear of all poles involved
    Uinv = np.linalg.inv(lcf.U)
    poles = np.concatenate(
        [eigenvalues(lcf.pole_matrix()), eigenvalues(pair.Aw), eigenvalues(Ax)]
    )
    points = sample_complex_points(poles, 5, seed=11)
    worst = 0.0
    for lam in points:
        M, N = lcf.eval_mn(lam)
        direct = eval_tfm(pair.wv_system(), lam)
        closed_form = np.hstack(
            [lam * np.eye(lcf.p), np.zeros((lcf.p, lcf.m))]
        ) + (lam * np.eye(lcf.p) - Ax) @ Uinv @ np.hstack([-M, N])
        worst = max(
            worst,
            float(
                np.linalg.norm(direct - closed_form)
                / (1.0 + np.linalg.norm(direct))
            ),
        )
    if worst > 1e-8:
        raise NumericalFailureError(
            f"closed-form recovery disagrees with the gain construction "
            f"(residual {worst:.3e})"
        )
    return pair


@dataclass(frozen=True)
class LcfReport:
    stable: bool
    identity_residual: float
    coprime_over_s: bool

    def as_dict(self) -> dict:
        return {
            "stable": self.stable,
            "identityResidual": float(self.identity_residual),
            "coprimeOverS": self.coprime_over_s,
        }


def _closure_probes(domain: str, count: int, seed: int, spread: float) -> list[complex]:
    """Random points in the closed complement of the stability region."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        z = spread * (rng.uniform(0, 1) + 1j * rng.uniform(-1, 1))
        if domain == "continuous":
            pts.append(complex(abs(z.real), z.imag))
        else:
            r = 1.0 + abs(z.real)
            ang = np.pi * z.imag / spread
            pts.append(r * np.exp(1j * ang))
    return pts


def verify_lcf(
    lcf: LcfOverS,
    source=None,
    n_samples: int = 5,
    seed: int = 0,
) -> LcfReport:
    """Three-part certificate: factor stability, M^{-1} N = G at samples, and
    coprimeness over the region's closed complement.

    ``source`` supplies G: a StateSpaceSystem, an SrtrPair, or None for the
    transfer matrix realized by the stored blocks themselves.
    """
    Ap = lcf.pole_matrix()
    spectrum = eigenvalues(Ap)
    stable = all(in_stability_region(z, lcf.domain) for z in spectrum)
    if source is None:
        gsys = lcf.blocks.full_system()
    elif isinstance(source, SrtrPair):
        gsys = None
    elif isinstance(source, StateSpaceSystem):
        gsys = source
    else:
        raise TypeError(f"unsupported source type {type(source).__name__}")
    pole_pool = list(spectrum)
    if gsys is not None:
        pole_pool += list(eigenvalues(gsys.A))
    elif isinstance(source, SrtrPair):
        pole_pool += list(eigenvalues(source.base.A)) + list(eigenvalues(source.Aw))
    worst = 0.0
    for attempt in range(5):
        try:
            points = sample_complex_points(
                np.array(pole_pool), n_samples, seed=seed + attempt
            )
            worst = 0.0
            for lam in points:
                G = (
                    source.response(lam)
                    if isinstance(source, SrtrPair)
                    else eval_tfm(gsys, lam)
                )
                rec = lcf.response(lam)
                worst = max(
                    worst,
                    float(np.linalg.norm(rec - G) / (1.0 + np.linalg.norm(G))),
                )
            break
        except (np.linalg.LinAlgError, NumericalFailureError):
            if attempt == 4:
                raise
            continue
    Bpbh = np.block([[lcf.F1, lcf.blocks.B1], [lcf.F2, lcf.blocks.B2]])
    check_at = [z for z in spectrum if not in_stability_region(z, lcf.domain)]
    spread = 2.0 * (1.0 + float(np.max(np.abs(spectrum)))) if spectrum.size else 2.0
    check_at += _closure_probes(lcf.domain, 10, seed + 7, spread)
    coprime = all(pbh_test(Ap, Bpbh, "controllable", z) for z in check_at)
    return LcfReport(stable=stable, identity_residual=worst, coprime_over_s=coprime)


def mn_sparsity(lcf: LcfOverS, tol: float = 1e-9) -> SparsityPattern:
    """Masks of the factor entries, with the M-part diagonal forced to 1 to
    match the pair convention (lam I - W has a structurally nonzero
    diagonal)."""
    sysmn = lcf.mn_system()
    p, m = lcf.p, lcf.m
    _, num = realization_entry_numerators(sysmn.A, sysmn.B, sysmn.C, sysmn.D)
    coeffs = [num[i, j] for i in range(p) for j in range(p + m)]
    scale = _coeff_scale([np.asarray(c) for c in coeffs])
    cut = tol * scale
    mask = np.array(
        [[0 if np.all(np.abs(num[i, j]) <= cut) else 1 for j in range(p + m)]
         for i in range(p)]
    )
    maskM, maskN = mask[:, :p].copy(), mask[:, p:].copy()
    np.fill_diagonal(maskM, 1)
    return SparsityPattern(maskM, maskN)
