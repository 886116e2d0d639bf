import math

import hypothesis
import numpy as np
import pytest

from hwhitney import jets
from hwhitney.gapfill import LemmaParams, branch_test, Branch, default_c_prime

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=60, print_blob=True
)
hypothesis.settings.load_profile("default")


def random_planes(rng: np.random.Generator, n: int, degree: int = 3, scale: float = 1.0):
    """n random (f, g) coefficient pairs of the given degree."""
    return [
        (
            scale * rng.uniform(-1.0, 1.0, degree + 1),
            scale * rng.uniform(-1.0, 1.0, degree + 1),
        )
        for _ in range(n)
    ]


def random_intervals(
    rng: np.random.Generator,
    count: int,
    lo: float = 0.0,
    hi: float = 3.0,
    allow_points: bool = False,
) -> list:
    """`count` disjoint closed intervals inside [lo, hi]."""
    cuts = np.sort(rng.uniform(lo, hi, 2 * count))
    out = []
    for k in range(count):
        a, b = float(cuts[2 * k]), float(cuts[2 * k + 1])
        if b - a < 1e-3:
            b = a + 1e-3
        if allow_points and rng.random() < 0.2:
            b = a
        out.append((a, b))
    cleaned = [out[0]]
    for a, b in out[1:]:
        if a <= cleaned[-1][1] + 1e-3:
            a = cleaned[-1][1] + 1e-3 + 0.05 * rng.random()
            b = max(b, a) if b >= a else a
        cleaned.append((a, b))
    return cleaned


def restriction_jet(
    rng: np.random.Generator,
    n: int = 1,
    count: int = 3,
    degree: int = 3,
    allow_points: bool = False,
):
    planes = random_planes(rng, n, degree)
    intervals = random_intervals(rng, count, allow_points=allow_points)
    return jets.restrict_polynomial_curve(n, planes, intervals, h0=rng.uniform(-1, 1)), planes


def admissible_params(
    rng: np.random.Generator,
    branch: Branch | None = None,
    big_m: float = 10.0,
    eps_range: tuple[float, float] = (1e-6, 0.3),
    max_tries: int = 200,
) -> LemmaParams:
    """Random LemmaParams satisfying the pre-construction bounds.

    When `branch` is given, the chord rate is biased so the requested
    construction branch is selected (with rejection as a safety net).
    """
    lo, hi = eps_range
    for _ in range(max_tries):
        eps = math.exp(rng.uniform(math.log(lo), math.log(hi)))
        delta = eps * rng.uniform(0.05, 0.95)
        root = math.sqrt(eps)
        if branch is Branch.POLYNOMIAL:
            q_lo = 1.1 * (root + 2 * eps) / 7.0
            q_hi = min(big_m - 1.0, 0.95 * eps / delta)
            if q_hi <= q_lo:
                continue
            q = rng.uniform(q_lo, q_hi)
        elif branch is Branch.CIRCLE:
            q_hi = max(0.0, (root - 2 * eps)) / 7.0 * 0.95
            q = rng.uniform(0.0, q_hi) if q_hi > 0 else 0.0
        else:
            q = rng.uniform(0.0, min(big_m - 1.0, 0.95 * eps / delta))
        params = LemmaParams(
            delta=delta,
            ell=q * delta,
            alpha=q + rng.uniform(-0.99, 0.99) * eps,
            beta=q + rng.uniform(-0.99, 0.99) * eps,
            mu=rng.uniform(-0.99, 0.99) * eps,
            nu=rng.uniform(-0.99, 0.99) * eps,
            lam=rng.uniform(-0.99, 0.99) * eps * delta * delta,
            eps=eps,
            big_m=big_m,
            c_prime=default_c_prime(big_m),
        )
        if branch is None or branch_test(params) is branch:
            return params
    raise RuntimeError(f"could not sample admissible params for branch {branch}")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
