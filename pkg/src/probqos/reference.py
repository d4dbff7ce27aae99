"""Running-example fixtures: the throughput/response-time schema, the two
reference profiles, and the reference regions and requirements used across
the tests and demo scripts.

The diagonal edge of the "good" region (5*TP - RT >= 100) is this
repository's concretization; it is reference geometry, not ground truth from
any external benchmark.
"""

from __future__ import annotations

from .profiles import (
    AttributeSchema,
    CorrelatedTPRT,
    GammaMarginal,
    GaussianMarginal,
    IndependentProduct,
)

__all__ = [
    "SCHEMA",
    "independent_profile",
    "correlated_profile",
    "shifted_profile",
    "bad_profile",
    "R_GOOD_TEXT",
    "R_BAD_TEXT",
    "REQ_CONJUNCTION_TEXT",
    "REQ_TWO_SCENARIO_TEXT",
]

SCHEMA = AttributeSchema(("TP", "RT"))

# Rectangle region of the core accuracy checks: TP in [60,100] x RT in [0,300].
R_BOX_TEXT = "60 <= TP && TP <= 100 && 0 <= RT && RT <= 300"

# "Good" operating region: healthy throughput, bounded response time, and a
# diagonal cut excluding the high-latency/low-throughput corner.
R_GOOD_TEXT = "60 <= TP && TP <= 100 && 0 <= RT && RT <= 300 && 5 * TP - RT >= 100"

# "Bad" operating region: degraded throughput with high response time.
R_BAD_TEXT = "0 <= TP && TP <= 40 && 300 <= RT && RT <= 1000"

# Conjunction requirement: mostly good, rarely bad.
REQ_CONJUNCTION_TEXT = (
    f"P[{R_GOOD_TEXT}] in [0.6, _] && P[{R_BAD_TEXT}] in [_, 0.3]"
)

# Two-scenario requirement: at least one scenario holds, and the
# propositional variables p1/p2 record which.
REQ_TWO_SCENARIO_TEXT = (
    "vars p1 p2 ; "
    f"(P[{R_GOOD_TEXT}] in [0.6, _] || P[{R_BAD_TEXT}] in [0.2, _])"
    f" && (p1 <-> P[{R_GOOD_TEXT}] in [0.6, _])"
    f" && (p2 <-> P[{R_BAD_TEXT}] in [0.2, _])"
)


def independent_profile() -> IndependentProduct:
    """Gaussian(50, 300) throughput x Gamma(3, 0.01) response time."""
    return IndependentProduct(
        SCHEMA, (GaussianMarginal(50.0, 300.0), GammaMarginal(3.0, 0.01))
    )


def correlated_profile() -> CorrelatedTPRT:
    """Same marginal scales, with response time coupled against throughput."""
    return CorrelatedTPRT(50.0, 300.0, 3.0, 0.01, schema=SCHEMA)


def shifted_profile() -> IndependentProduct:
    """A strong service: Gaussian(90, 100) x Gamma(3, 0.02), so most mass
    falls in the good region."""
    return IndependentProduct(
        SCHEMA, (GaussianMarginal(90.0, 100.0), GammaMarginal(3.0, 0.02))
    )


def bad_profile() -> IndependentProduct:
    """A degraded service: Gaussian(25, 100) x Gamma(3, 0.006), so the bad
    region carries most of the mass and the good region almost none."""
    return IndependentProduct(
        SCHEMA, (GaussianMarginal(25.0, 100.0), GammaMarginal(3.0, 0.006))
    )
