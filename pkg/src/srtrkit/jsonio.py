"""JSON serialization for every value the command line reads or writes.

Schemas are plain dicts of nested lists; every reader validates shape and
finiteness and raises InvalidInputError with a usable message instead of
letting numpy errors escape.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import InvalidInputError, SrtrKitError
from .factorization import LcfOverS, ThetaFactor
from .loop import ClosedLoopModel, RowImplementation
from .rational import RationalFn
from .srtr import NrfPair, SparsityPattern, SrtrPair
from .synthesis import SynthesisSpec
from .systems import PartitionedRealization, StateSpaceSystem


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read JSON from {path}: {exc}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _matrix(data, name: str, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    try:
        M = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"field {name!r} is not a numeric matrix") from exc
    if M.size == 0 and rows is not None and cols is not None:
        return np.zeros((rows, cols))
    if M.ndim == 1 and M.size == 0 and rows is not None and cols is not None:
        return np.zeros((rows, cols))
    if M.ndim != 2:
        raise InvalidInputError(f"field {name!r} must be a list of rows")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"field {name!r} contains non-finite values")
    if rows is not None and M.shape[0] != rows:
        raise InvalidInputError(f"field {name!r} must have {rows} rows, got {M.shape[0]}")
    if cols is not None and M.shape[1] != cols:
        raise InvalidInputError(f"field {name!r} must have {cols} columns, got {M.shape[1]}")
    return M


def _need(d: dict, key: str):
    if key not in d:
        raise InvalidInputError(f"missing required field {key!r}")
    return d[key]


def _domain(d: dict) -> str:
    dom = d.get("domain", "continuous")
    if dom not in ("continuous", "discrete"):
        raise InvalidInputError(f"domain must be 'continuous' or 'discrete', got {dom!r}")
    return dom


def system_to_dict(sys: StateSpaceSystem) -> dict:
    return {
        "domain": sys.domain,
        "A": sys.A.tolist(),
        "B": sys.B.tolist(),
        "C": sys.C.tolist(),
        "D": sys.D.tolist(),
    }


def system_from_dict(d: dict) -> StateSpaceSystem:
    A = _matrix(_need(d, "A"), "A")
    n = A.shape[0]
    B = _matrix(_need(d, "B"), "B", rows=n)
    C = _matrix(_need(d, "C"), "C", cols=n)
    D = _matrix(_need(d, "D"), "D", rows=C.shape[0], cols=B.shape[1])
    try:
        return StateSpaceSystem(A, B, C, D, _domain(d))
    except SrtrKitError as exc:
        raise InvalidInputError(str(exc)) from exc


def partitioned_to_dict(base: PartitionedRealization) -> dict:
    return {
        "domain": base.domain,
        "p": base.p,
        "A11": base.A11.tolist(),
        "A12": base.A12.tolist(),
        "A21": base.A21.tolist(),
        "A22": base.A22.tolist(),
        "B1": base.B1.tolist(),
        "B2": base.B2.tolist(),
    }


def partitioned_from_dict(d: dict) -> PartitionedRealization:
    p = int(_need(d, "p"))
    A11 = _matrix(_need(d, "A11"), "A11", rows=p, cols=p)
    A22raw = np.asarray(_need(d, "A22"), dtype=float)
    q = A22raw.shape[0] if A22raw.ndim == 2 else 0
    A12 = _matrix(_need(d, "A12"), "A12", rows=p, cols=q)
    A21 = _matrix(_need(d, "A21"), "A21", rows=q, cols=p)
    A22 = _matrix(_need(d, "A22"), "A22", rows=q, cols=q)
    B1 = _matrix(_need(d, "B1"), "B1", rows=p)
    B2 = _matrix(_need(d, "B2"), "B2", rows=q, cols=B1.shape[1])
    try:
        return PartitionedRealization(A11, A12, A21, A22, B1, B2, _domain(d))
    except SrtrKitError as exc:
        raise InvalidInputError(str(exc)) from exc


def pair_to_dict(pair: SrtrPair) -> dict:
    out = partitioned_to_dict(pair.base)
    out["K"] = pair.K.tolist()
    return out


def pair_from_dict(d: dict) -> SrtrPair:
    base = partitioned_from_dict(d)
    K = _matrix(_need(d, "K"), "K", rows=base.q, cols=base.p)
    try:
        return SrtrPair(base, K)
    except SrtrKitError as exc:
        raise InvalidInputError(str(exc)) from exc


def _rational_to_dict(fn: RationalFn) -> dict:
    return {"num": fn.num.tolist(), "den": fn.den.tolist()}


def _rational_from_dict(d: dict, name: str) -> RationalFn:
    try:
        return RationalFn(np.asarray(_need(d, "num"), dtype=float),
                          np.asarray(_need(d, "den"), dtype=float))
    except (SrtrKitError, ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"bad rational entry {name}: {exc}") from exc


def nrf_to_dict(nrf: NrfPair) -> dict:
    p, m = nrf.p, nrf.m
    return {
        "Phi": [[_rational_to_dict(nrf.Phi[i, j]) for j in range(p)] for i in range(p)],
        "Gamma": [[_rational_to_dict(nrf.Gamma[i, k]) for k in range(m)] for i in range(p)],
        "notes": list(nrf.notes),
    }


def nrf_from_dict(d: dict) -> NrfPair:
    phi_rows = _need(d, "Phi")
    gam_rows = _need(d, "Gamma")
    p = len(phi_rows)
    m = len(gam_rows[0]) if gam_rows and gam_rows[0] else 0
    Phi = np.empty((p, p), dtype=object)
    Gamma = np.empty((p, m), dtype=object)
    for i in range(p):
        for j in range(p):
            Phi[i, j] = _rational_from_dict(phi_rows[i][j], f"Phi[{i}][{j}]")
        for k in range(m):
            Gamma[i, k] = _rational_from_dict(gam_rows[i][k], f"Gamma[{i}][{k}]")
    return NrfPair(Phi, Gamma, tuple(d.get("notes", ())))


def pattern_to_dict(pat: SparsityPattern) -> dict:
    return {"maskW": pat.maskW.tolist(), "maskV": pat.maskV.tolist()}


def lcf_to_dict(lcf: LcfOverS) -> dict:
    out = partitioned_to_dict(lcf.blocks)
    out["F1"] = lcf.F1.tolist()
    out["F2"] = lcf.F2.tolist()
    out["U"] = lcf.U.tolist()
    return out


def lcf_from_dict(d: dict) -> LcfOverS:
    blocks = partitioned_from_dict(d)
    F1 = _matrix(_need(d, "F1"), "F1", rows=blocks.p, cols=blocks.p)
    F2 = _matrix(_need(d, "F2"), "F2", rows=blocks.q, cols=blocks.p)
    U = _matrix(_need(d, "U"), "U", rows=blocks.p, cols=blocks.p)
    try:
        return LcfOverS(blocks, F1, F2, U)
    except SrtrKitError as exc:
        raise InvalidInputError(str(exc)) from exc


def theta_from_dict(d: dict) -> ThetaFactor:
    Ax = _matrix(_need(d, "Ax"), "Ax")
    p = Ax.shape[0]
    Bx = _matrix(_need(d, "Bx"), "Bx", rows=p, cols=p)
    Cx = _matrix(_need(d, "Cx"), "Cx", rows=p, cols=p)
    try:
        return ThetaFactor(Ax, Bx, Cx, _domain(d))
    except SrtrKitError as exc:
        raise InvalidInputError(str(exc)) from exc


def theta_to_dict(theta: ThetaFactor) -> dict:
    return {
        "domain": theta.domain,
        "Ax": theta.Ax.tolist(),
        "Bx": theta.Bx.tolist(),
        "Cx": theta.Cx.tolist(),
    }


def spec_to_dict(spec: SynthesisSpec) -> dict:
    return {
        "maskW": spec.maskW.tolist(),
        "maskV": spec.maskV.tolist(),
        "orders": list(spec.orders),
        "extra": spec.extra,
    }


def spec_from_dict(d: dict) -> SynthesisSpec:
    maskW = _matrix(_need(d, "maskW"), "maskW")
    maskV = _matrix(_need(d, "maskV"), "maskV")
    orders = _need(d, "orders")
    try:
        return SynthesisSpec(maskW, maskV, tuple(orders), d.get("extra"))
    except (SrtrKitError, ValueError) as exc:
        raise InvalidInputError(str(exc)) from exc


def gain_from_dict(d, p: int | None = None, q: int | None = None) -> np.ndarray:
    """Accept either a bare matrix or an object with a "K" field."""
    data = d.get("K") if isinstance(d, dict) else d
    if data is None:
        raise InvalidInputError("expected a gain matrix or an object with a 'K' field")
    return _matrix(data, "K", rows=q, cols=p)


def rows_to_dict(rows: RowImplementation) -> dict:
    return {
        "domain": rows.domain,
        "p": rows.p,
        "rows": [system_to_dict(r) for r in rows.rows],
    }


def rows_from_dict(d: dict) -> RowImplementation:
    sys_rows = [system_from_dict(r) for r in _need(d, "rows")]
    if not sys_rows:
        raise InvalidInputError("rows list is empty")
    p = int(d.get("p", len(sys_rows)))
    if p != len(sys_rows):
        raise InvalidInputError("field 'p' disagrees with the number of rows")
    m = sys_rows[0].n_inputs - p
    if m < 0:
        raise InvalidInputError("rows have fewer inputs than outputs require")
    for r in sys_rows:
        if r.n_outputs != 1 or r.n_inputs != p + m:
            raise InvalidInputError("each row must be 1 x (p+m)")
    return RowImplementation(tuple(sys_rows), p, m, _domain(d))


def closed_loop_to_dict(cl: ClosedLoopModel) -> dict:
    return {
        "domain": cl.domain,
        "Acl": cl.Acl.tolist(),
        "Br": cl.B_r.tolist(),
        "Bw": cl.B_w.tolist(),
        "Bzeta": cl.B_zeta.tolist(),
        "Bdu": cl.B_du.tolist(),
        "Cu": cl.Cu.tolist(),
        "Cy": cl.Cy.tolist(),
        "E": cl.E.tolist(),
        "F": cl.F.tolist(),
        "nPlant": cl.n_plant,
        "nCtrl": cl.n_ctrl,
    }


def closed_loop_from_dict(d: dict) -> ClosedLoopModel:
    Acl = _matrix(_need(d, "Acl"), "Acl")
    n = Acl.shape[0]
    Cu = _matrix(_need(d, "Cu"), "Cu", cols=n)
    Cy = _matrix(_need(d, "Cy"), "Cy", cols=n)
    p, m = Cu.shape[0], Cy.shape[0]
    return ClosedLoopModel(
        Acl=Acl,
        B_r=_matrix(_need(d, "Br"), "Br", rows=n, cols=m),
        B_w=_matrix(_need(d, "Bw"), "Bw", rows=n, cols=p),
        B_zeta=_matrix(_need(d, "Bzeta"), "Bzeta", rows=n, cols=m),
        B_du=_matrix(_need(d, "Bdu"), "Bdu", rows=n, cols=p),
        Cu=Cu,
        Cy=Cy,
        E=_matrix(_need(d, "E"), "E", rows=p, cols=m),
        F=_matrix(_need(d, "F"), "F", rows=m, cols=p),
        n_plant=int(_need(d, "nPlant")),
        n_ctrl=int(_need(d, "nCtrl")),
        domain=_domain(d),
    )
