"""Monte Carlo estimation of region probabilities P(X in R).

The main estimator draws uniform points in the region and scales the mean
density by the region volume; a bounding-box variant folds the volume into
the estimator and serves as an independent cross-check. Both quantify their
uncertainty and converge at the dimension-independent 1/sqrt(k) rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import HPolytope, estimate_volume
from .profiles import QoSProfile
from .rng import RngStream, as_stream
from .sampling import (
    REJECTION_ACCEPTANCE_THRESHOLD,
    DikinWalkConfig,
    dikin_walk,
    rejection_sample,
)

DEFAULT_SAMPLES = 200_000

_CHUNK = 262_144


class SchemaMismatchError(Exception):
    """Region attribute names do not match the profile schema."""


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    std_error: float
    k: int
    method: str  # "uniform-polytope" | "rejection-box"
    volume_used: float | None

    def confidence_interval(self, z: float = 3.0):
        return (self.value - z * self.std_error, self.value + z * self.std_error)


def _check_schema(profile: QoSProfile, region: HPolytope) -> None:
    if region.attribute_names != profile.schema.names:
        raise SchemaMismatchError(
            f"region attributes {region.attribute_names} do not match "
            f"profile schema {profile.schema.names}"
        )


def integrate_uniform(profile: QoSProfile, region: HPolytope, k: int,
                      rng: "RngStream | int",
                      walk_config: DikinWalkConfig | None = None,
                      workers: int = 1) -> IntegralEstimate:
    """Estimate integral of the profile density over the region as V * mean(f).

    The volume comes from the rejection estimator on its own substream; the
    k region points come from rejection sampling when the box acceptance rate
    allows it, otherwise from the Dikin walk. The reported standard error
    combines the density sample variance with the volume estimator's error
    by first-order propagation.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    _check_schema(profile, region)
    stream = as_stream(rng)
    volume, volume_se = estimate_volume(region, k, stream.substream(0), workers=workers)
    if volume == 0.0:
        return IntegralEstimate(0.0, 0.0, k, "uniform-polytope", 0.0)
    acceptance = volume / region.bounding_box.volume
    if acceptance >= REJECTION_ACCEPTANCE_THRESHOLD:
        points = rejection_sample(region, k, stream.substream(1))
    else:
        points = dikin_walk(region, k, walk_config or DikinWalkConfig(),
                            stream.substream(1))
    f = profile.density(points)
    mean_f = float(f.mean())
    var_f = float(f.var(ddof=1))
    value = volume * mean_f
    std_error = float(np.sqrt(volume * volume * var_f / k
                              + mean_f * mean_f * volume_se * volume_se))
    return IntegralEstimate(value, std_error, k, "uniform-polytope", volume)


def integrate_rejection_box(profile: QoSProfile, region: HPolytope, k: int,
                            rng: "RngStream | int",
                            workers: int = 1) -> IntegralEstimate:
    """Variant folding the volume in: Vol(box) * mean(f * 1_R) over box samples."""
    if k < 2:
        raise ValueError("k must be >= 2")
    _check_schema(profile, region)
    stream = as_stream(rng)
    box = region.bounding_box
    vbox = box.volume
    counts = [k // workers + (1 if w < k % workers else 0) for w in range(workers)]
    total = 0.0
    total_sq = 0.0
    for w, kw in enumerate(counts):
        if kw == 0:
            continue
        gen = stream.substream(w).generator()
        done = 0
        while done < kw:
            c = min(_CHUNK, kw - done)
            pts = gen.uniform(box.lower, box.upper, size=(c, region.dim))
            g = profile.density(pts) * region.contains_all(pts)
            total += float(g.sum())
            total_sq += float((g * g).sum())
            done += c
    mean_g = total / k
    var_g = max(total_sq / k - mean_g * mean_g, 0.0) * k / (k - 1)
    value = vbox * mean_g
    std_error = vbox * float(np.sqrt(var_g / k))
    return IntegralEstimate(value, std_error, k, "rejection-box", None)


@dataclass(frozen=True)
class ConvergenceScan:
    """Per-k mean absolute error against a reference truth, plus log-log slope."""

    rows: tuple  # of (k, mean_abs_error)
    slope: float  # nan when any error is exactly zero


def convergence_scan(profile: QoSProfile, region: HPolytope,
                     ks: Sequence[int], seeds: Sequence[int], truth: float,
                     estimator: Callable = integrate_uniform) -> ConvergenceScan:
    """Empirical 1/sqrt(k) convergence check against a supplied truth value."""
    ks = sorted(set(int(k) for k in ks))
    if len(ks) < 3:
        raise ValueError("need at least 3 distinct k values")
    if len(seeds) < 1:
        raise ValueError("need at least one seed")
    rows = []
    for k in ks:
        errs = [abs(estimator(profile, region, k, RngStream(int(s))).value - truth)
                for s in seeds]
        rows.append((k, float(np.mean(errs))))
    maes = np.array([r[1] for r in rows])
    if np.any(maes == 0.0):
        slope = float("nan")
    else:
        slope = float(np.polyfit(np.log(np.array(ks, dtype=float)), np.log(maes), 1)[0])
    return ConvergenceScan(tuple(rows), slope)
