"""Hand-emitted SVG figures (no plotting dependency).

Two figure kinds are produced: an overlay of worst-case and constant
disturbance trajectories with dashed bound levels, and a gain-plane
heatmap of worst-case offsets masked by the safe region, with the regime
boundary curve K_theta = 2 sqrt(K_d) drawn on top.  Adjacent same-color
heatmap cells are merged row-wise so the files stay small at fine grids.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .oracle import SimulationTrace
from .tfc import SafeRegionMap

__all__ = ["write_trajectory_svg", "write_sweep_svg"]

_W, _H = 860.0, 520.0
_ML, _MR, _MT, _MB = 70.0, 30.0, 30.0, 55.0


def _axis_ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    first = np.ceil(lo / step) * step
    ticks = []
    x = first
    while x <= hi + 1e-12 * step:
        ticks.append(float(x))
        x += step
    return ticks


class _Canvas:
    def __init__(self, x_lim, y_lim, x_label, y_label, title):
        self.x0, self.x1 = x_lim
        self.y0, self.y1 = y_lim
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W:g}" height="{_H:g}" '
            f'viewBox="0 0 {_W:g} {_H:g}">',
            f'<rect width="{_W:g}" height="{_H:g}" fill="white"/>',
        ]
        self._frame(x_label, y_label, title)

    def px(self, x: float) -> float:
        return _ML + (x - self.x0) / (self.x1 - self.x0) * (_W - _ML - _MR)

    def py(self, y: float) -> float:
        return _H - _MB - (y - self.y0) / (self.y1 - self.y0) * (_H - _MT - _MB)

    def _frame(self, x_label, y_label, title):
        p = self.parts
        p.append(
            f'<rect x="{_ML:g}" y="{_MT:g}" width="{_W - _ML - _MR:g}" '
            f'height="{_H - _MT - _MB:g}" fill="none" stroke="black" stroke-width="1"/>'
        )
        for xt in _axis_ticks(self.x0, self.x1):
            if not self.x0 <= xt <= self.x1:
                continue
            px = self.px(xt)
            p.append(
                f'<line x1="{px:.2f}" y1="{_H - _MB:.2f}" x2="{px:.2f}" '
                f'y2="{_H - _MB + 5:.2f}" stroke="black" stroke-width="1"/>'
            )
            p.append(
                f'<text x="{px:.2f}" y="{_H - _MB + 18:.2f}" font-size="12" '
                f'text-anchor="middle">{xt:g}</text>'
            )
        for yt in _axis_ticks(self.y0, self.y1):
            if not self.y0 <= yt <= self.y1:
                continue
            py = self.py(yt)
            p.append(
                f'<line x1="{_ML - 5:.2f}" y1="{py:.2f}" x2="{_ML:.2f}" '
                f'y2="{py:.2f}" stroke="black" stroke-width="1"/>'
            )
            p.append(
                f'<text x="{_ML - 8:.2f}" y="{py + 4:.2f}" font-size="12" '
                f'text-anchor="end">{yt:g}</text>'
            )
        p.append(
            f'<text x="{(_ML + _W - _MR) / 2:.2f}" y="{_H - 12:.2f}" font-size="13" '
            f'text-anchor="middle">{x_label}</text>'
        )
        p.append(
            f'<text x="16" y="{(_MT + _H - _MB) / 2:.2f}" font-size="13" '
            f'text-anchor="middle" transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.2f})">'
            f"{y_label}</text>"
        )
        p.append(
            f'<text x="{(_ML + _W - _MR) / 2:.2f}" y="20" font-size="14" '
            f'text-anchor="middle">{title}</text>'
        )

    def polyline(self, xs, ys, color: str, width: float = 1.5, dash: str = ""):
        pts = " ".join(
            f"{self.px(float(x)):.2f},{self.py(float(y)):.2f}" for x, y in zip(xs, ys)
        )
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width:g}"{d}/>'
        )

    def hline(self, y: float, color: str, dash: str = "6,4", label: str = ""):
        py = self.py(y)
        self.parts.append(
            f'<line x1="{_ML:.2f}" y1="{py:.2f}" x2="{_W - _MR:.2f}" y2="{py:.2f}" '
            f'stroke="{color}" stroke-width="1.3" stroke-dasharray="{dash}"/>'
        )
        if label:
            self.parts.append(
                f'<text x="{_W - _MR - 4:.2f}" y="{py - 4:.2f}" font-size="11" '
                f'fill="{color}" text-anchor="end">{label}</text>'
            )

    def rect(self, x0, y0, x1, y1, fill: str):
        px0, px1 = self.px(x0), self.px(x1)
        py0, py1 = self.py(y1), self.py(y0)
        self.parts.append(
            f'<rect x="{px0:.2f}" y="{py0:.2f}" width="{px1 - px0 + 0.3:.2f}" '
            f'height="{py1 - py0 + 0.3:.2f}" fill="{fill}" stroke="none"/>'
        )

    def legend(self, items: Sequence[tuple[str, str]]):
        x, y = _ML + 12, _MT + 16
        for text, color in items:
            self.parts.append(
                f'<line x1="{x:.2f}" y1="{y - 4:.2f}" x2="{x + 24:.2f}" '
                f'y2="{y - 4:.2f}" stroke="{color}" stroke-width="2"/>'
            )
            self.parts.append(
                f'<text x="{x + 30:.2f}" y="{y:.2f}" font-size="12">{text}</text>'
            )
            y += 16

    def to_string(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def write_trajectory_svg(
    path,
    worst: SimulationTrace,
    fixed: Optional[SimulationTrace],
    k: int,
    bound_level: float,
    fixed_peak_level: Optional[float] = None,
    title: str = "worst-case vs constant disturbance",
) -> None:
    """Overlay of the tracked state under both disturbances, with dashed
    horizontal lines at the analytic bound and the constant-input peak."""
    ys = [worst.state(k)]
    if fixed is not None:
        ys.append(fixed.state(k))
    y_hi = max(float(np.max(y)) for y in ys)
    y_hi = max(y_hi, bound_level) * 1.12 + 1e-12
    y_lo = min(0.0, min(float(np.min(y)) for y in ys)) * 1.12
    c = _Canvas(
        (0.0, float(worst.times[-1])),
        (y_lo, y_hi),
        "time (s)",
        f"x{k + 1}",
        title,
    )
    # subsample long traces for display
    def _thin(tr: SimulationTrace):
        step = max(1, len(tr.times) // 2400)
        return tr.times[::step], tr.state(k)[::step]

    if fixed is not None:
        c.polyline(*_thin(fixed), color="#1f5fbf")
    c.polyline(*_thin(worst), color="#c23b22")
    c.hline(bound_level, "#c23b22", label=f"worst-case bound {bound_level:.5g}")
    if fixed_peak_level is not None:
        c.hline(fixed_peak_level, "#1f5fbf", label=f"constant-input peak {fixed_peak_level:.5g}")
    items = [("worst-case disturbance", "#c23b22")]
    if fixed is not None:
        items.append(("constant disturbance", "#1f5fbf"))
    c.legend(items)
    Path(path).write_text(c.to_string())


def _heat_color(frac: float) -> str:
    """Blue (small) to yellow (near the limit), quantized to 64 levels."""
    f = min(max(frac, 0.0), 1.0)
    f = round(f * 63) / 63
    r = int(40 + 215 * f)
    g = int(60 + 170 * f)
    b = int(180 - 140 * f)
    return f"#{r:02x}{g:02x}{b:02x}"


def write_sweep_svg(path, m: SafeRegionMap, title: str = "safe gain region") -> None:
    """Heatmap of bound/d_max on the safe cells; unsafe cells stay white.
    The double-real boundary K_theta = 2 sqrt(K_d) is overlaid."""
    kd, kt = m.kd_grid, m.ktheta_grid
    dx = (kd[-1] - kd[0]) / (len(kd) - 1)
    dy = (kt[-1] - kt[0]) / (len(kt) - 1)
    c = _Canvas(
        (kd[0] - dx / 2, kd[-1] + dx / 2),
        (kt[0] - dy / 2, kt[-1] + dy / 2),
        "K_d (1/m^2)",
        "K_theta (1/m)",
        title,
    )
    denom = m.d_max if np.isfinite(m.d_max) and m.d_max > 0 else float(np.max(m.bound))
    denom = denom or 1.0
    # column-wise run-length merge of same-color safe cells
    for i, x in enumerate(kd):
        j = 0
        n = len(kt)
        while j < n:
            if not m.safe[i, j]:
                j += 1
                continue
            color = _heat_color(m.bound[i, j] / denom)
            j0 = j
            while j < n and m.safe[i, j] and _heat_color(m.bound[i, j] / denom) == color:
                j += 1
            c.rect(x - dx / 2, kt[j0] - dy / 2, x + dx / 2, kt[j - 1] + dy / 2, color)
    # regime boundary
    xs = np.linspace(kd[0], kd[-1], 300)
    ys = 2.0 * np.sqrt(xs)
    keep = (ys >= kt[0] - dy) & (ys <= kt[-1] + dy)
    if np.any(keep):
        c.polyline(xs[keep], np.clip(ys[keep], kt[0] - dy / 2, kt[-1] + dy / 2),
                   color="black", width=1.8, dash="5,3")
        c.parts.append(
            f'<text x="{c.px(float(xs[keep][len(xs[keep]) // 2])) + 6:.2f}" '
            f'y="{c.py(float(np.clip(ys[keep][len(xs[keep]) // 2], kt[0], kt[-1]))) - 6:.2f}" '
            f'font-size="11">K_theta^2 = 4 K_d</text>'
        )
    Path(path).write_text(c.to_string())
