"""File formats: JSON system input, CSV output, deterministic formatting.

System files carry either plant matrices plus a gain (A, b, k) or the
closed loop directly (A_cl), together with the disturbance map E and the
per-channel amplitude bounds z_max.  Indices in files are 1-based; the
library uses 0-based indices internally.  A "tfc" object may replace the
matrices, in which case the lateral-controller closed loop is built from
(v, k_d, k_theta, z_max, d_max).

All floats are written with ``repr``, the shortest representation that
round-trips to the same binary value, so repeated runs produce
byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InputFormatError
from .oracle import SimulationTrace
from .systems import ClosedLoopSystem, DisturbanceBounds, build_closed_loop
from .tfc import Regime, SafeRegionMap, TfcParams, build_tfc

__all__ = [
    "LoadedInput",
    "load_input",
    "fmt",
    "write_trace_csv",
    "write_sweep_csv",
    "write_json",
]


@dataclass(frozen=True)
class LoadedInput:
    system: ClosedLoopSystem
    z: DisturbanceBounds
    output_index: int                 # 0-based
    tfc: Optional[TfcParams] = None
    kd_range: Optional[tuple[float, float]] = None
    ktheta_range: Optional[tuple[float, float]] = None
    resolution: Optional[int] = None


def _require(cond: bool, msg: str):
    if not cond:
        raise InputFormatError(msg)


def load_input(path) -> LoadedInput:
    """Parse a system/parameter JSON file."""
    p = Path(path)
    if not p.is_file():
        raise InputFormatError(f"input file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise InputFormatError(f"invalid JSON in {p}: {e}") from e
    _require(isinstance(doc, dict), "top-level JSON value must be an object")

    kd_range = tuple(doc["kd_range"]) if "kd_range" in doc else None
    kt_range = tuple(doc["ktheta_range"]) if "ktheta_range" in doc else None
    resolution = int(doc["resolution"]) if "resolution" in doc else None

    if "tfc" in doc:
        t = doc["tfc"]
        _require(isinstance(t, dict), '"tfc" must be an object')
        for key in ("v", "k_d", "k_theta"):
            _require(key in t, f'tfc input needs "{key}"')
        params = TfcParams(
            v=float(t["v"]),
            k_d=float(t["k_d"]),
            k_theta=float(t["k_theta"]),
            z_max=float(t.get("z_max", 0.0)),
            d_max=float(t.get("d_max", np.inf)),
        )
        sys = build_tfc(params)
        z = DisturbanceBounds(np.array([params.z_max]))
        return LoadedInput(
            system=sys,
            z=z,
            output_index=0,
            tfc=params,
            kd_range=kd_range,
            ktheta_range=kt_range,
            resolution=resolution,
        )

    _require("E" in doc, 'system input needs "E"')
    _require("z_max" in doc, 'system input needs "z_max"')
    e = np.asarray(doc["E"], dtype=float)
    z = DisturbanceBounds(np.asarray(doc["z_max"], dtype=float))
    if "A_cl" in doc:
        sys = ClosedLoopSystem(a_cl=np.asarray(doc["A_cl"], dtype=float), e_mat=e)
    else:
        for key in ("A", "b", "k"):
            _require(key in doc, f'system input needs "{key}" (or "A_cl")')
        sys = build_closed_loop(
            np.asarray(doc["A"], dtype=float),
            np.asarray(doc["b"], dtype=float),
            np.asarray(doc["k"], dtype=float),
            e,
        )
    _require(z.n_z == sys.n_z, "z_max length must match the number of E columns")

    k_file = int(doc.get("output_index", 1))
    _require(1 <= k_file <= sys.n_x, f"output_index must be in [1, {sys.n_x}] (1-based)")
    return LoadedInput(
        system=sys,
        z=z,
        output_index=k_file - 1,
        kd_range=kd_range,
        ktheta_range=kt_range,
        resolution=resolution,
    )


def fmt(x: float) -> str:
    """Shortest float representation that round-trips exactly."""
    return repr(float(x))


def write_trace_csv(path, trace: SimulationTrace) -> None:
    """Header t,x1,...,xn,z1,...,zn_z; one row per sample."""
    n_x = trace.states.shape[1]
    n_z = trace.disturbance_values.shape[1]
    header = (
        ["t"]
        + [f"x{i + 1}" for i in range(n_x)]
        + [f"z{j + 1}" for j in range(n_z)]
    )
    lines = [",".join(header)]
    for i, t in enumerate(trace.times):
        row = [fmt(t)]
        row.extend(fmt(v) for v in trace.states[i])
        row.extend(fmt(v) for v in trace.disturbance_values[i])
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_sweep_csv(path, m: SafeRegionMap) -> None:
    """Header k_d,k_theta,bound_m,safe,regime; row-major over the grid."""
    lines = ["k_d,k_theta,bound_m,safe,regime"]
    for i, kd in enumerate(m.kd_grid):
        for j, kt in enumerate(m.ktheta_grid):
            lines.append(
                ",".join(
                    [
                        fmt(kd),
                        fmt(kt),
                        fmt(m.bound[i, j]),
                        "true" if m.safe[i, j] else "false",
                        m.regime[i, j].value,
                    ]
                )
            )
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, allow_nan=True) + "\n")


def regime_name(r: Regime) -> str:
    return r.value
