"""Command-line front end.

Subcommands
-----------
classify   eigenvalue classification report
bound      analytic worst-case bounds (time-independent and per-time)
simulate   worst-case and constant-disturbance trajectories + figure
sweep      gain-plane safe-region map (TFC input) + figure
verify     cross-validation of analytic bounds against the oracle

Exit codes: 0 ok, 2 bad input, 3 unstable system, 4 unsupported eigenvalue
multiplicity, 5 verification failure.  WCBOUND_THREADS caps the worker
pool used by verification.
"""

from __future__ import annotations

import argparse
import math
import os
import sys as _sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import fileio, svgfig
from .bounds import loose_bound, total_bound
from .errors import (
    InputFormatError,
    QuadratureError,
    UnstableSystemError,
    UnsupportedMultiplicityError,
    WcboundError,
)
from .modal import PairingStrategy, modal_coefficients, pair_terms
from .oracle import (
    constant_profile,
    simulate,
    truncation_horizon,
    verify,
    worst_case_disturbance,
)
from .systems import check_hurwitz, eigendecompose_and_classify
from .tfc import overshoot_constant_disturbance, sweep as tfc_sweep

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_UNSTABLE = 3
EXIT_MULTIPLICITY = 4
EXIT_VERIFY_FAILED = 5


def _worker_count() -> int:
    raw = os.environ.get("WCBOUND_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parse_times(spec: Optional[str]) -> list[float]:
    if not spec:
        return []
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as e:
        raise InputFormatError(f"bad --times value {spec!r}: {e}") from e


def _strategy(name: str) -> PairingStrategy:
    return PairingStrategy.OPTIMAL if name == "optimal" else PairingStrategy.DEFAULT


def _default_horizon(sys) -> float:
    return truncation_horizon(sys, 1e-6)


def _default_dt(sys, horizon: float) -> float:
    ev = np.linalg.eigvals(sys.a_cl)
    om = float(np.max(np.abs(ev.imag)))
    dt = min(1e-3, horizon / 2000.0)
    if om > 0.0:
        dt = min(dt, math.pi / (100.0 * om))
    return dt


def _ensure_out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_classify(args) -> int:
    loaded = fileio.load_input(args.input)
    eig = eigendecompose_and_classify(loaded.system)
    rows = []
    for i, e in enumerate(eig.entries):
        rows.append(
            {
                "re": e.value.real,
                "im": e.value.imag,
                "class": e.klass.value,
                "partner": None if e.partner_index is None else e.partner_index + 1,
            }
        )
    doc = {
        "n_x": eig.n_x,
        "n_r": eig.n_r,
        "n_d": eig.n_d,
        "n_c": eig.n_c,
        "eigenvalues": rows,
    }
    out = _ensure_out(args)
    fileio.write_json(out / "classify.json", doc)
    print(f"{'idx':>4} {'re':>14} {'im':>14}  class")
    for i, r in enumerate(rows, start=1):
        print(f"{i:>4} {r['re']:>14.6g} {r['im']:>14.6g}  {r['class']}")
    print(f"counts: n_r={eig.n_r} n_d={eig.n_d} n_c={eig.n_c}")
    return EXIT_OK


def cmd_bound(args) -> int:
    loaded = fileio.load_input(args.input)
    sys_ = loaded.system
    k = loaded.output_index
    strat = _strategy(args.pairing)
    ti = total_bound(sys_, k, loaded.z, None, strat)
    times = _parse_times(args.times)
    per_time = []
    for t in times:
        tb = total_bound(sys_, k, loaded.z, t, strat)
        per_time.append({"t": t, "bound": tb.value})
    eig = eigendecompose_and_classify(sys_)
    loose = 0.0
    for j in range(sys_.n_z):
        paired = pair_terms(modal_coefficients(sys_, k, j, eig=eig), strat)
        loose += loose_bound(paired, float(loaded.z.z_max[j]), None)
    per_group = [
        {
            "channel": res.disturbance_index + 1,
            "groups": [{"group": g, "integral": mu} for g, mu in res.per_group],
            "bound": res.value,
        }
        for res in ti.per_channel
    ]
    doc = {
        "output_index": k + 1,
        "time_independent": ti.value,
        "per_time": per_time,
        "per_group": per_group,
        "loose_bound": loose,
    }
    out = _ensure_out(args)
    fileio.write_json(out / "bound.json", doc)
    print(f"state x{k + 1}: time-independent worst-case bound = {ti.value:.10g}")
    print(f"fully split (loose) bound                 = {loose:.10g}")
    for row in per_time:
        print(f"  t = {row['t']:<10g} bound = {row['bound']:.10g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    loaded = fileio.load_input(args.input)
    sys_ = loaded.system
    k = loaded.output_index
    horizon = args.horizon if args.horizon is not None else _default_horizon(sys_)
    dt = args.dt if args.dt is not None else _default_dt(sys_, horizon)
    profiles_wc = [
        worst_case_disturbance(sys_, k, j, horizon, amplitude=float(loaded.z.z_max[j]))
        for j in range(sys_.n_z)
        if loaded.z.z_max[j] > 0.0
    ]
    profiles_fix = [
        constant_profile(j, float(loaded.z.z_max[j]), horizon)
        for j in range(sys_.n_z)
        if loaded.z.z_max[j] > 0.0
    ]
    trace_wc = simulate(sys_, profiles_wc, horizon, dt)
    trace_fix = simulate(sys_, profiles_fix, horizon, dt)
    bound = total_bound(sys_, k, loaded.z, None).value
    if loaded.tfc is not None:
        fixed_peak = overshoot_constant_disturbance(loaded.tfc)
    else:
        fixed_peak = float(np.max(trace_fix.state(k))) if len(profiles_fix) else None
    out = _ensure_out(args)
    fileio.write_trace_csv(out / "trace_worst.csv", trace_wc)
    fileio.write_trace_csv(out / "trace_fixed.csv", trace_fix)
    svgfig.write_trajectory_svg(
        out / "fig1.svg", trace_wc, trace_fix, k, bound, fixed_peak
    )
    print(f"horizon = {horizon:g} s, dt = {trace_wc.dt:g} s")
    print(f"worst-case peak x{k + 1}   = {float(np.max(trace_wc.state(k))):.10g}")
    print(f"analytic bound         = {bound:.10g}")
    if fixed_peak is not None:
        print(f"constant-input peak    = {fixed_peak:.10g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    loaded = fileio.load_input(args.input)
    if loaded.tfc is None:
        raise InputFormatError('sweep needs a "tfc" parameter object in the input file')
    kd_range = loaded.kd_range or (0.01, 1.5)
    kt_range = loaded.ktheta_range or (0.01, 2.5)
    resolution = loaded.resolution or 200
    m = tfc_sweep(loaded.tfc, kd_range, kt_range, resolution)
    out = _ensure_out(args)
    fileio.write_sweep_csv(out / "sweep.csv", m)
    svgfig.write_sweep_svg(out / "fig2.svg", m)
    n_safe = int(np.count_nonzero(m.safe))
    print(
        f"sweep {resolution}x{resolution}: {n_safe} safe cells of {m.safe.size} "
        f"(d_max = {m.d_max:g} m)"
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    loaded = fileio.load_input(args.input)
    times = _parse_times(args.times)
    report = verify(
        loaded.system,
        loaded.output_index,
        loaded.z,
        t_samples=times,
        rtol=args.tol,
        strategy=_strategy(args.pairing),
        max_workers=_worker_count(),
    )
    out = _ensure_out(args)
    fileio.write_json(out / "verify.json", report.to_dict())
    for e in report.entries:
        h = "inf" if e.horizon is None else f"{e.horizon:g}"
        status = "PASS" if e.passed else "FAIL"
        print(
            f"t={h:<8} analytic={e.analytic:.10g} quadrature={e.quadrature:.10g} "
            f"gap={e.gap_ratio:.8g} {status}"
        )
    print("verification:", "PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wcbound",
        description="Analytical worst-case state bounds for stable LTI systems "
        "under bounded disturbances.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_horizon=False):
        p.add_argument("--input", required=True, help="system/parameter JSON file")
        p.add_argument("--out", default=".", help="output directory (default: cwd)")
        p.add_argument("--times", default=None, help="comma-separated time samples")
        p.add_argument("--tol", type=float, default=1e-8, help="relative tolerance")
        p.add_argument(
            "--pairing",
            choices=["default", "optimal"],
            default="default",
            help="distinct-real pairing strategy",
        )
        if needs_horizon:
            p.add_argument("--horizon", type=float, default=None, help="horizon (s)")
            p.add_argument("--dt", type=float, default=None, help="step (s)")

    p = sub.add_parser("classify", help="classify the closed-loop eigenstructure")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bound", help="compute analytic worst-case bounds")
    common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="simulate worst-case and fixed disturbances")
    common(p, needs_horizon=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="gain-plane safe-region sweep (TFC)")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="cross-validate bounds against the oracle")
    common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except InputFormatError as e:
        print(f"error: {e}", file=_sys.stderr)
        return EXIT_BAD_INPUT
    except UnstableSystemError as e:
        print(f"error: {e}", file=_sys.stderr)
        return EXIT_UNSTABLE
    except UnsupportedMultiplicityError as e:
        print(f"error: {e}", file=_sys.stderr)
        return EXIT_MULTIPLICITY
    except QuadratureError as e:
        print(f"error: {e}", file=_sys.stderr)
        return EXIT_VERIFY_FAILED
    except WcboundError as e:
        print(f"error: {e}", file=_sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    _sys.exit(main())
