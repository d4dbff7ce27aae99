"""Uniform sampling inside bounded polytopes.

Two samplers: exact i.i.d. rejection sampling from the bounding box, and a
Dikin-walk Markov chain for regions too thin for rejection to be practical.
The integrator picks between them based on the box acceptance rate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .geometry import HPolytope, analytic_center
from .rng import RngStream, as_stream

log = logging.getLogger(__name__)

MAX_CONSECUTIVE_REJECTS = 1_000_000

# Rejection sampling is used above this box acceptance rate, the walk below.
REJECTION_ACCEPTANCE_THRESHOLD = 0.05


class ThinRegionError(Exception):
    """Rejection sampling gave up; use the Dikin walk or reformulate the region."""


@dataclass(frozen=True)
class DikinWalkConfig:
    """Free parameters of the walk. radius=None means 1.5/sqrt(n).

    The Metropolis correction keeps the chain exact for any radius; the
    default radius/thinning pair is tuned so the thinned chain's
    autocorrelation time stays small on desk-scale regions.
    """

    radius: float | None = None
    burn_in: int = 1000
    thinning: int = 10

    def __post_init__(self):
        if self.radius is not None and self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")


def rejection_sample(poly: HPolytope, k: int, rng: "RngStream | int") -> np.ndarray:
    """k i.i.d. uniform points in the polytope, by bounding-box rejection.

    Exact uniformity (no MCMC bias). Aborts with ThinRegionError after 10^6
    consecutive rejected proposals.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    gen = as_stream(rng).generator()
    box = poly.bounding_box
    n = poly.dim
    batch = int(min(max(2 * k, 1024), 262_144))
    out = np.empty((k, n))
    got = 0
    consecutive = 0
    while got < k:
        pts = gen.uniform(box.lower, box.upper, size=(batch, n))
        mask = poly.contains_all(pts)
        hits = pts[mask]
        if hits.shape[0] == 0:
            consecutive += batch
        else:
            idx = np.nonzero(mask)[0]
            consecutive = batch - 1 - int(idx[-1])
            take = min(hits.shape[0], k - got)
            out[got:got + take] = hits[:take]
            got += take
        if consecutive >= MAX_CONSECUTIVE_REJECTS:
            raise ThinRegionError(
                "acceptance rate collapsed; use dikin_walk or reformulate the region"
            )
    return out


def _barrier_cholesky(A: np.ndarray, b: np.ndarray, x: np.ndarray):
    """Cholesky factor and log-determinant of the local barrier Hessian."""
    s = b - A @ x
    if np.any(s <= 0.0):
        raise np.linalg.LinAlgError("state on or outside the boundary")
    W = A / s[:, None]
    H = W.T @ W
    L = np.linalg.cholesky(H)
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    return L, logdet


def dikin_walk(poly: HPolytope, k: int, config: DikinWalkConfig | None = None,
               rng: "RngStream | int" = 0, start: np.ndarray | None = None) -> np.ndarray:
    """k approximately-uniform points from a Dikin-walk Markov chain.

    From state x, propose y uniform in the ellipsoid
    {y : (y-x)^T H(x) (y-x) <= r^2} with H the log-barrier Hessian; accept
    with the Metropolis ratio sqrt(det H(y) / det H(x)) provided y is strictly
    interior and the reverse ellipsoid contains x. Emits every `thinning`-th
    state after `burn_in` steps. Numerical boundary failures restart the
    chain from the analytic center (counted, logged).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    cfg = config or DikinWalkConfig()
    n = poly.dim
    radius = cfg.radius if cfg.radius is not None else 1.5 / math.sqrt(n)
    gen = as_stream(rng).generator()
    A = poly.constraint_matrix
    b = poly.bounds

    center = analytic_center(poly) if start is None else np.asarray(start, dtype=float)
    x = center.copy()
    L, logdet = _barrier_cholesky(A, b, x)

    out = np.empty((k, n))
    got = 0
    step = 0
    restarts = 0
    total_steps = cfg.burn_in + k * cfg.thinning
    inv_n = 1.0 / n
    while step < total_steps:
        u = gen.standard_normal(n)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            step += 1
            continue
        u *= gen.random() ** inv_n / norm
        try:
            y = x + radius * np.linalg.solve(L.T, u)
            sy = b - A @ y
            if np.all(sy > 0.0):
                Ly, logdet_y = _barrier_cholesky(A, b, y)
                d = x - y
                reverse_ok = float(np.sum((Ly.T @ d) ** 2)) <= radius * radius
                if reverse_ok and gen.random() < math.exp(
                    min(0.0, 0.5 * (logdet_y - logdet))
                ):
                    x, L, logdet = y, Ly, logdet_y
        except np.linalg.LinAlgError:
            restarts += 1
            x = center.copy()
            L, logdet = _barrier_cholesky(A, b, x)
        step += 1
        if step > cfg.burn_in and (step - cfg.burn_in) % cfg.thinning == 0:
            out[got] = x
            got += 1
    if restarts:
        log.warning("dikin_walk restarted from the analytic center %d time(s)", restarts)
    return out[:got] if got < k else out
