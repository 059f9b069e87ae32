"""Controller realization, row-wise implementation, closed-loop assembly and
simulation.

The controller is the strictly proper block [lam^{-1} W, lam^{-1} V]; it acts
on its own delayed/integrated output u plus a measurement z = r + y and so
never creates an algebraic loop. Rows are implemented one at a time so each
node only carries its own dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AlgebraicLoopError,
    DimensionError,
    NonFiniteError,
    PreconditionError,
)
from .linalg import (
    check_domain,
    eigenvalues,
    in_stability_region,
    is_stable_spectrum,
    structural_property,
)
from .srtr import SrtrPair, srtr_is_stable
from .synthesis import SynthesisSpec, dense_spec, reduce_rows
from .systems import (
    StateSpaceSystem,
    eval_tfm,
    is_minimal,
    minimal_realization,
)


@dataclass(frozen=True)
class KdController:
    """Strictly proper controller realization of [lam^{-1} W, lam^{-1} V]."""

    realization: StateSpaceSystem
    source: SrtrPair

    @property
    def p(self) -> int:
        return self.source.p

    @property
    def m(self) -> int:
        return self.source.m


def kd_from_srtr(pair: SrtrPair) -> KdController:
    """Realize the controller by chaining integrators in front of [W V].

    The p integrator states feed the outputs; the hidden block is the pair's
    own Aw. Feedthrough is identically zero by construction.
    """
    p, q, m = pair.p, pair.q, pair.m
    A = np.block(
        [[np.zeros((p, p)), pair.Cw], [np.zeros((q, p)), pair.Aw]]
    )
    B = np.vstack([pair.Dw, pair.Bw])
    C = np.hstack([np.eye(p), np.zeros((p, q))])
    D = np.zeros((p, p + m))
    return KdController(
        StateSpaceSystem(A, B, C, D, pair.domain), pair
    )


def unstable_pole_count(sys: StateSpaceSystem, domain: str | None = None) -> int:
    """Eigenvalues outside the stability region, counted on the minimal part.

    Non-minimal inputs are pruned first so hidden cancelling modes do not
    inflate the count.
    """
    if domain is None:
        domain = sys.domain
    check_domain(domain)
    work = sys if is_minimal(sys) else minimal_realization(sys)
    return sum(
        0 if in_stability_region(z, domain) else 1 for z in eigenvalues(work.A)
    )


@dataclass(frozen=True)
class RowImplementation:
    """One realization per controller output row; shared input [u + du; z]."""

    rows: tuple
    p: int
    m: int
    domain: str

    @property
    def n_states(self) -> int:
        return sum(r.n for r in self.rows)

    def orders(self) -> tuple:
        return tuple(r.n for r in self.rows)

    def assembled_system(self) -> StateSpaceSystem:
        """Block-diagonal stack of the rows: a single realization of the full
        controller transfer matrix."""
        n = self.n_states
        A = np.zeros((n, n))
        B = np.zeros((n, self.p + self.m))
        C = np.zeros((self.p, n))
        D = np.zeros((self.p, self.p + self.m))
        at = 0
        for i, row in enumerate(self.rows):
            k = row.n
            A[at : at + k, at : at + k] = row.A
            B[at : at + k, :] = row.B
            C[i, at : at + k] = row.C[0]
            D[i, :] = row.D[0]
            at += k
        return StateSpaceSystem(A, B, C, D, self.domain)


def _row_with_integrator(row_wv: StateSpaceSystem) -> StateSpaceSystem:
    """Divide a single-output row of [W V] by lam: one extra leading state."""
    k = row_wv.n
    A = np.zeros((k + 1, k + 1))
    A[0, 1:] = row_wv.C[0]
    A[1:, 1:] = row_wv.A
    B = np.vstack([row_wv.D, row_wv.B])
    C = np.zeros((1, k + 1))
    C[0, 0] = 1.0
    D = np.zeros((1, row_wv.n_inputs))
    return StateSpaceSystem(A, B, C, D, row_wv.domain)


def rowwise_implementation(
    pair: SrtrPair,
    orders=None,
    spec: SynthesisSpec | None = None,
) -> RowImplementation:
    """Split the controller into per-row realizations.

    Without ``orders`` each row keeps the pair's full hidden block and is then
    pruned to its reachable and observable part, which drops the integrator
    from identically zero rows. With ``orders`` (or a full spec) the hidden
    block is first truncated to n_i states per row and one integrator state is
    chained in front.
    """
    if not srtr_is_stable(pair):
        raise PreconditionError("row-wise implementation needs a stable pair")
    p, q, m = pair.p, pair.q, pair.m
    if spec is None and orders is not None:
        spec = dense_spec(p, m, q)
        spec = SynthesisSpec(spec.maskW, spec.maskV, tuple(orders), None)
    if spec is not None:
        wv_rows = reduce_rows(pair.base, pair.K, spec)
        rows = tuple(_row_with_integrator(r) for r in wv_rows)
        return RowImplementation(rows, p, m, pair.domain)
    kd = kd_from_srtr(pair)
    rows = []
    for i in range(p):
        full = StateSpaceSystem(
            kd.realization.A,
            kd.realization.B,
            kd.realization.C[i : i + 1, :],
            kd.realization.D[i : i + 1, :],
            pair.domain,
        )
        pruned = minimal_realization(full)
        rows.append(pruned)
    return RowImplementation(tuple(rows), p, m, pair.domain)


@dataclass(frozen=True)
class ClosedLoopModel:
    """Plant states stacked over controller-row states, every exogenous
    channel mapped in: r (reference), w (input disturbance), zeta
    (measurement noise), du (communication disturbance)."""

    Acl: np.ndarray
    B_r: np.ndarray
    B_w: np.ndarray
    B_zeta: np.ndarray
    B_du: np.ndarray
    Cu: np.ndarray
    Cy: np.ndarray
    E: np.ndarray
    F: np.ndarray
    n_plant: int
    n_ctrl: int
    domain: str

    @property
    def n(self) -> int:
        return self.Acl.shape[0]

    @property
    def p(self) -> int:
        return self.Cu.shape[0]

    @property
    def m(self) -> int:
        return self.Cy.shape[0]

    def outputs(self, x, r, zeta, w):
        """Instantaneous signal values (u, y, z, v) at one time point."""
        u = self.Cu @ x + self.E @ r + self.E @ zeta
        y = self.Cy @ x + self.F @ w + zeta
        z = r + y
        v = u + w
        return u, y, z, v


def assemble_closed_loop(
    plant: StateSpaceSystem, rows: RowImplementation
) -> ClosedLoopModel:
    """Wire plant and controller rows into one autonomous-plus-inputs model.

    Loop equations: v = u + w, y = G v + zeta, z = r + y, and the rows read
    [u + du; z]. The rows' feedthrough onto their own-output channel must be
    zero, which makes direct substitution well posed.
    """
    if plant.domain != rows.domain:
        raise DimensionError("plant and rows must share the same domain")
    p, m = rows.p, rows.m
    if plant.n_inputs != p:
        raise DimensionError(
            f"plant has {plant.n_inputs} inputs but the rows produce {p} signals"
        )
    if plant.n_outputs != m:
        raise DimensionError(
            f"plant has {plant.n_outputs} outputs but the rows expect {m}"
        )
    if not structural_property(plant.A, plant.B, "stabilizable", plant.domain):
        raise PreconditionError("plant must be stabilizable")
    if not structural_property(plant.A, plant.C, "detectable", plant.domain):
        raise PreconditionError("plant must be detectable")
    ctl = rows.assembled_system()
    Du = ctl.D[:, :p]
    if np.any(Du != 0.0):
        raise AlgebraicLoopError(
            "controller rows feed their own output channel through directly"
        )
    E = ctl.D[:, p:]
    F = plant.D
    if np.any(E != 0.0) and np.any(F != 0.0):
        raise AlgebraicLoopError(
            "both controller measurement feedthrough and plant feedthrough "
            "are nonzero; the loop is not solvable by substitution"
        )
    ng, nr = plant.n, ctl.n
    Bu = ctl.B[:, :p]
    Bz = ctl.B[:, p:]
    Cu = np.hstack([E @ plant.C, ctl.C])
    Cy = np.hstack([plant.C, F @ ctl.C])
    Acl = np.block(
        [[plant.A, np.zeros((ng, nr))], [np.zeros((nr, ng)), ctl.A]]
    )
    Acl += np.vstack([plant.B, Bu]) @ Cu
    Acl += np.vstack([np.zeros((ng, m)), Bz]) @ Cy
    B_r = np.vstack([plant.B @ E, Bu @ E + Bz])
    B_w = np.vstack([plant.B, Bz @ F])
    B_zeta = np.vstack([plant.B @ E, Bu @ E + Bz])
    B_du = np.vstack([np.zeros((ng, p)), Bu])
    return ClosedLoopModel(
        Acl=Acl,
        B_r=B_r,
        B_w=B_w,
        B_zeta=B_zeta,
        B_du=B_du,
        Cu=Cu,
        Cy=Cy,
        E=E,
        F=F,
        n_plant=ng,
        n_ctrl=nr,
        domain=plant.domain,
    )


def check_internal_stability(cl: ClosedLoopModel) -> bool:
    return is_stable_spectrum(cl.Acl, cl.domain)


@dataclass
class Trajectory:
    """Uniform-grid record of the loop state and all visible signals."""

    t: np.ndarray
    x: np.ndarray
    r: np.ndarray
    w: np.ndarray
    zeta: np.ndarray
    du: np.ndarray
    u: np.ndarray
    y: np.ndarray
    z: np.ndarray
    v: np.ndarray
    diverged: bool = False

    def to_csv(self) -> str:
        cols = [("t", self.t[:, None])]
        for name, arr in (
            ("x", self.x), ("r", self.r), ("w", self.w), ("zeta", self.zeta),
            ("du", self.du), ("u", self.u), ("y", self.y), ("z", self.z),
            ("v", self.v),
        ):
            cols.append((name, arr))
        header = []
        for name, arr in cols:
            if name == "t":
                header.append("t")
            else:
                header.extend(f"{name}{i}" for i in range(arr.shape[1]))
        data = np.hstack([arr for _, arr in cols])
        lines = [",".join(header)]
        for rowvals in data:
            lines.append(",".join(f"{val:.12g}" for val in rowvals))
        return "\n".join(lines) + "\n"


def _as_signal(fn, dim: int):
    if fn is None:
        return lambda t: np.zeros(dim)

    def wrapped(t):
        out = np.atleast_1d(np.asarray(fn(t), dtype=float)).ravel()
        if out.size == 1 and dim > 1:
            out = np.full(dim, out[0])
        if out.size != dim:
            raise DimensionError(f"signal returned size {out.size}, expected {dim}")
        return out

    return wrapped


def simulate(
    cl: ClosedLoopModel,
    signals: dict | None = None,
    x0=None,
    horizon: float = 20.0,
    dt: float = 1e-3,
) -> Trajectory:
    """Roll the loop forward and record every signal.

    Continuous models use fixed-step fourth-order Runge-Kutta; discrete
    models iterate exactly with t as the step index. A state that leaves
    the finite range marks the trajectory as diverged and stops the roll-out
    instead of raising.
    """
    signals = signals or {}
    p, m, n = cl.p, cl.m, cl.n
    r_fn = _as_signal(signals.get("r"), m)
    w_fn = _as_signal(signals.get("w"), p)
    zeta_fn = _as_signal(signals.get("zeta"), m)
    du_fn = _as_signal(signals.get("du"), p)
    if x0 is None:
        x0 = np.zeros(n)
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.size != n:
        raise DimensionError(f"x0 must have {n} entries, got {x0.size}")
    if not np.all(np.isfinite(x0)):
        raise NonFiniteError("x0 contains non-finite entries")
    if cl.domain == "continuous":
        if dt <= 0:
            raise ValueError("dt must be positive")
        steps = int(round(horizon / dt))
        tgrid = np.arange(steps + 1) * dt
    else:
        steps = int(horizon)
        tgrid = np.arange(steps + 1, dtype=float)

    def drive(t):
        return r_fn(t), w_fn(t), zeta_fn(t), du_fn(t)

    def deriv(t, x):
        r, w, zeta, du = drive(t)
        return (
            cl.Acl @ x + cl.B_r @ r + cl.B_w @ w + cl.B_zeta @ zeta + cl.B_du @ du
        )

    N = steps + 1
    X = np.zeros((N, n))
    R = np.zeros((N, m))
    Wd = np.zeros((N, p))
    Z = np.zeros((N, m))
    Du = np.zeros((N, p))
    U = np.zeros((N, p))
    Y = np.zeros((N, m))
    Zm = np.zeros((N, m))
    V = np.zeros((N, p))
    x = x0.copy()
    diverged = False
    filled = 0
    for k in range(N):
        t = tgrid[k]
        if not np.all(np.isfinite(x)) or np.linalg.norm(x) > 1e12:
            diverged = True
            break
        r, w, zeta, du = drive(t)
        u, y, z, v = cl.outputs(x, r, zeta, w)
        X[k] = x
        R[k], Wd[k], Z[k], Du[k] = r, w, zeta, du
        U[k], Y[k], Zm[k], V[k] = u, y, z, v
        filled = k + 1
        if k == steps:
            break
        if cl.domain == "continuous":
            k1 = deriv(t, x)
            k2 = deriv(t + dt / 2, x + dt / 2 * k1)
            k3 = deriv(t + dt / 2, x + dt / 2 * k2)
            k4 = deriv(t + dt, x + dt * k3)
            x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        else:
            x = deriv(t, x)
    sl = slice(0, filled)
    return Trajectory(
        t=tgrid[sl], x=X[sl], r=R[sl], w=Wd[sl], zeta=Z[sl], du=Du[sl],
        u=U[sl], y=Y[sl], z=Zm[sl], v=V[sl], diverged=diverged,
    )
