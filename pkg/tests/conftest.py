"""Shared helpers: random Hurwitz system construction and an independent
piecewise scipy.integrate.quad referee for the closed-form integrals."""

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import block_diag

from wcbound import ClosedLoopSystem


def random_hurwitz(rng, n, kind="mixed", n_z=1):
    """Random stable system with a controlled spectrum.

    kind: 'distinct'  all simple real eigenvalues
          'complex'   one conjugate pair plus simple reals
          'double'    one Jordan block of size 2 plus simple reals
          'mixed'     random choice of the above
    """
    if kind == "mixed":
        options = ["distinct", "complex"] if n < 2 else ["distinct", "complex", "double"]
        kind = options[int(rng.integers(0, len(options)))]
    blocks = []
    left = n
    if kind == "complex" and n >= 2:
        sg = -float(rng.uniform(0.3, 3.0))
        om = float(rng.uniform(0.5, 8.0))
        blocks.append(np.array([[sg, om], [-om, sg]]))
        left -= 2
    elif kind == "double" and n >= 2:
        lam = -float(rng.uniform(0.5, 4.0))
        blocks.append(np.array([[lam, 1.0], [0.0, lam]]))
        left -= 2
    # well separated simple real eigenvalues
    base = -rng.uniform(0.3, 1.2)
    for m in range(left):
        blocks.append(np.array([[float(base - 1.1 * m - rng.uniform(0.0, 0.5)) - 5.0]]))
    j = block_diag(*blocks)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    d = np.diag(rng.uniform(0.6, 1.7, n))
    t = q @ d
    a = t @ j @ np.linalg.inv(t)
    e = rng.normal(size=(n, n_z))
    return ClosedLoopSystem(a_cl=a, e_mat=e)


def quad_piecewise(f, edges, epsabs=1e-14, epsrel=1e-12, limit=400):
    """scipy.integrate.quad over consecutive [edges[i], edges[i+1]]."""
    total = 0.0
    es = sorted(set(float(x) for x in edges))
    for a, b in zip(es[:-1], es[1:]):
        if b <= a:
            continue
        v, _ = quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
        total += v
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20230817)
