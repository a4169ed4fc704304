"""Trajectory generators for the integer-valued stationary processes.

Four kinds are provided:

* ``lazy_walk`` -- i.i.d. increments on (-1, 0, +1) with law (1/4, 1/2, 1/4);
  aperiodic, mean zero, variance 1/2.  Identical in law to the difference of
  two independent fair-bit streams, hence also the exact beta=2 pair process.
* ``heavy_tail_walk`` -- i.i.d. symmetric integer increments with
  ``P(X = +-k) = k**-(1+d) / (2*zeta(1+d))``, ``d`` in (1, 2].
* ``cf_pair`` -- differences of continued-fraction digit streams of two
  independent points drawn from the Gauss measure; digits are computed by an
  interval-arithmetic Gauss map, so every emitted digit is certified exact.
* ``beta_pair`` -- differences of digit streams of two independent orbits of
  ``x -> beta*x mod 1``.  ``beta == 2`` is implemented exactly on bit streams;
  other ``beta`` use floating orbits after a burn-in and are distributional
  proxies only.

Generators are pure functions of ``(spec, seed)``; all randomness flows
through an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from mpmath import iv, mp
from scipy.special import zeta as _zeta

__all__ = [
    "IntTrajectory",
    "PrecisionError",
    "ProcessSpec",
    "SkewProductTrack",
    "beta_digit_orbit",
    "gauss_map_digits",
    "gen_beta_pair",
    "gen_cf_pair",
    "gen_heavy_tail_walk",
    "gen_lazy_walk",
    "generate",
    "heavy_tail_abs_cdf",
    "heavy_tail_half_pmf",
    "skew_product_trajectory",
]

KINDS = ("lazy_walk", "heavy_tail_walk", "cf_pair", "beta_pair")

#: interval-arithmetic bits per requested digit (a Gauss-map step destroys
#: about 3.42 bits on average), plus a fixed floor for short runs.
CF_BITS_PER_DIGIT = 4
CF_BITS_FLOOR = 128

#: burn-in steps before a floating beta orbit is treated as stationary.
BETA_BURN_IN = 1000


class PrecisionError(RuntimeError):
    """The interval around an orbit no longer determines the next digit."""


@dataclass(frozen=True)
class ProcessSpec:
    """Process kind, kind-specific parameters, and the path seed."""

    kind: str
    d: float | None = None
    beta: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "heavy_tail_walk":
            if self.d is None or not 1.0 < self.d <= 2.0:
                raise ValueError(f"heavy_tail_walk needs stability index d in (1, 2], got {self.d}")
        if self.kind == "beta_pair":
            if self.beta is None or self.beta <= 1.0:
                raise ValueError(f"beta_pair needs beta > 1, got {self.beta}")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(int(self.seed) & (2**64 - 1))

    def with_seed(self, seed: int) -> "ProcessSpec":
        return ProcessSpec(self.kind, self.d, self.beta, int(seed))


@dataclass
class IntTrajectory:
    """Integer path: increments ``X_1..X_n`` and partial sums ``S_1..S_n``."""

    increments: np.ndarray
    partial_sums: np.ndarray
    spec: ProcessSpec | None = None

    @property
    def n(self) -> int:
        return len(self.increments)

    def validate(self) -> None:
        if len(self.increments) != len(self.partial_sums):
            raise ValueError("increments and partial sums differ in length")
        if not np.array_equal(np.cumsum(self.increments), self.partial_sums):
            raise ValueError("partial sums are not the running totals of the increments")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("step,increment,partial_sum\n")
            for i, (x, s) in enumerate(zip(self.increments, self.partial_sums), start=1):
                fh.write(f"{i},{int(x)},{int(s)}\n")


def _make_trajectory(increments: np.ndarray, spec: ProcessSpec | None) -> IntTrajectory:
    inc = np.asarray(increments, dtype=np.int64)
    return IntTrajectory(inc, np.cumsum(inc), spec)


# ---------------------------------------------------------------- lazy walk

_LAZY_MAP = np.array([-1, 0, 0, 1], dtype=np.int64)


def gen_lazy_walk(n: int, rng: np.random.Generator, *, spec: ProcessSpec | None = None) -> IntTrajectory:
    """Aperiodic lazy walk: increments (1/4, 1/2, 1/4) on (-1, 0, +1)."""
    if n < 1:
        raise ValueError(f"trajectory length must be >= 1, got {n}")
    inc = _LAZY_MAP[rng.integers(0, 4, size=n)]
    return _make_trajectory(inc, spec or ProcessSpec("lazy_walk"))


# ---------------------------------------------------------- heavy-tail walk

HEAVY_TABLE_CUTOFF = 10**6


def heavy_tail_half_pmf(d: float, k) -> np.ndarray:
    """``P(X = +k) = P(X = -k) = k**-(1+d) / (2*zeta(1+d))`` for ``k >= 1``."""
    k = np.asarray(k, dtype=float)
    return k ** -(1.0 + d) / (2.0 * float(_zeta(1.0 + d)))


def heavy_tail_abs_cdf(d: float, k) -> np.ndarray:
    """Exact CDF of ``|X|``: ``1 - zeta(1+d, k+1)/zeta(1+d)`` (Hurwitz tail)."""
    k = np.asarray(k, dtype=float)
    return 1.0 - _zeta(1.0 + d, k + 1.0) / float(_zeta(1.0 + d))


@lru_cache(maxsize=8)
def _heavy_cdf_table(d: float, cutoff: int = HEAVY_TABLE_CUTOFF) -> np.ndarray:
    ks = np.arange(1, cutoff + 1, dtype=float)
    pmf = ks ** -(1.0 + d) / float(_zeta(1.0 + d))
    return np.cumsum(pmf)


def _heavy_tail_quantile(d: float, u: float, lo: int) -> int:
    """Smallest k > lo with CDF(|X| <= k) >= u, by bisection on the Hurwitz tail."""
    z = float(_zeta(1.0 + d))
    target = (1.0 - u) * z  # want zeta(1+d, k+1) <= target
    hi = 2 * lo
    while float(_zeta(1.0 + d, hi + 1.0)) > target:
        hi *= 2
        if hi > 2**62:
            return hi
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if float(_zeta(1.0 + d, mid + 1.0)) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def gen_heavy_tail_walk(
    n: int, d: float, rng: np.random.Generator, *, spec: ProcessSpec | None = None
) -> IntTrajectory:
    """Symmetric integer walk in the domain of attraction of a stable(d) law.

    Sampling is inverse-CDF over a table of the first 10^6 magnitudes; the
    (tiny) remaining tail is inverted exactly through the Hurwitz zeta
    function, so the law is not truncated.
    """
    if n < 1:
        raise ValueError(f"trajectory length must be >= 1, got {n}")
    if not 1.0 < d <= 2.0:
        raise ValueError(f"stability index must lie in (1, 2], got {d}")
    table = _heavy_cdf_table(d)
    u = rng.random(n)
    mags = np.searchsorted(table, u, side="left") + 1
    beyond = np.flatnonzero(mags > HEAVY_TABLE_CUTOFF)
    for idx in beyond:
        mags[idx] = _heavy_tail_quantile(d, float(u[idx]), HEAVY_TABLE_CUTOFF)
    signs = rng.integers(0, 2, size=n) * 2 - 1
    inc = signs * mags
    return _make_trajectory(inc, spec or ProcessSpec("heavy_tail_walk", d=d))


# ----------------------------------------------------- continued fractions

def gauss_map_digits(x0, n: int, *, prec: int | None = None) -> list[int]:
    """First ``n`` continued-fraction digits of ``x0`` in (0, 1), certified.

    ``x0`` may be anything ``mpmath.iv`` accepts (string, float, ``iv.mpf``).
    The Gauss map ``x -> 1/x - floor(1/x)`` is iterated in interval
    arithmetic; if the enclosing interval ever straddles a digit boundary a
    :class:`PrecisionError` is raised rather than emitting a corrupt digit.

    Not thread-safe: mpmath's interval precision is process-global state.
    """
    old_prec = iv.prec
    iv.prec = prec if prec is not None else CF_BITS_PER_DIGIT * n + CF_BITS_FLOOR
    try:
        x = x0 if isinstance(x0, iv.mpf) else iv.mpf(x0)
        digits: list[int] = []
        for step in range(n):
            inv = 1 / x
            k_lo = int(mp.floor(inv.a))
            k_hi = int(mp.floor(inv.b))
            if k_lo != k_hi:
                raise PrecisionError(
                    f"digit {step + 1} of {n} is ambiguous at working precision "
                    f"{iv.prec} bits; enclosure floor(1/x) spans [{k_lo}, {k_hi}]"
                )
            digits.append(k_lo)
            x = inv - k_lo
        return digits
    finally:
        iv.prec = old_prec


def _draw_dyadic(rng: np.random.Generator, bits: int) -> int:
    """Uniform integer on [0, 2**bits) from whole bytes, top bits discarded."""
    nbytes = (bits + 7) // 8
    v = int.from_bytes(rng.bytes(nbytes), "big")
    return v >> (8 * nbytes - bits)


def _gauss_measure_digits(rng: np.random.Generator, n: int, bits: int) -> list[int]:
    """Digits of a fresh Gauss-distributed point ``x = 2**v - 1``, v uniform."""
    vbits = _draw_dyadic(rng, bits)
    old_prec = iv.prec
    iv.prec = bits + 64
    try:
        v = iv.mpf(vbits) / iv.mpf(2) ** bits
        x = iv.exp(v * iv.log(2)) - 1
    finally:
        iv.prec = old_prec
    return gauss_map_digits(x, n, prec=bits + 64)


def gen_cf_pair(n: int, rng: np.random.Generator, *, spec: ProcessSpec | None = None) -> IntTrajectory:
    """Difference of the digit streams of two independent Gauss-measure points.

    Both points are drawn by the inverse CDF ``x = 2**v - 1`` with ``v``
    uniform dyadic on [0, 1); the working precision is ``4*n + 128`` bits.
    """
    if n < 1:
        raise ValueError(f"trajectory length must be >= 1, got {n}")
    bits = CF_BITS_PER_DIGIT * n + CF_BITS_FLOOR
    dx = _gauss_measure_digits(rng, n, bits)
    dy = _gauss_measure_digits(rng, n, bits)
    inc = np.array(dx, dtype=np.int64) - np.array(dy, dtype=np.int64)
    return _make_trajectory(inc, spec or ProcessSpec("cf_pair"))


# -------------------------------------------------------- beta transformation

def beta_digit_orbit(x0: float, beta: float, n: int, *, burn_in: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Digits ``floor(beta * x_i)`` and the orbit of ``x -> beta*x mod 1``.

    Plain float64 iteration: a distributional proxy, not an exact orbit.
    """
    x = float(x0)
    for _ in range(burn_in):
        x = (beta * x) % 1.0
    digits = np.empty(n, dtype=np.int64)
    orbit = np.empty(n, dtype=float)
    for i in range(n):
        orbit[i] = x
        y = beta * x
        k = int(y)
        digits[i] = k
        x = y - k
    return digits, orbit


def gen_beta_pair(
    n: int, beta: float, rng: np.random.Generator, *, spec: ProcessSpec | None = None
) -> IntTrajectory:
    """Difference of digit streams of two independent beta-map orbits.

    ``beta == 2`` is exact: the digit stream of a uniform point under the
    doubling map is an i.i.d. fair bit stream, so the pair difference is
    drawn directly on bits.  Other ``beta`` iterate float orbits started
    uniformly after a 10^3-step burn-in.
    """
    if n < 1:
        raise ValueError(f"trajectory length must be >= 1, got {n}")
    if beta <= 1.0:
        raise ValueError(f"beta must exceed 1, got {beta}")
    if beta == 2.0:
        bits_x = rng.integers(0, 2, size=n, dtype=np.int64)
        bits_y = rng.integers(0, 2, size=n, dtype=np.int64)
        inc = bits_x - bits_y
    else:
        dx, _ = beta_digit_orbit(rng.random(), beta, n, burn_in=BETA_BURN_IN)
        dy, _ = beta_digit_orbit(rng.random(), beta, n, burn_in=BETA_BURN_IN)
        inc = dx - dy
    return _make_trajectory(inc, spec or ProcessSpec("beta_pair", beta=beta))


# ------------------------------------------------------------------ dispatch

def generate(spec: ProcessSpec, n: int) -> IntTrajectory:
    """Generate a length-``n`` trajectory from a fully specified process."""
    rng = spec.rng()
    if spec.kind == "lazy_walk":
        return gen_lazy_walk(n, rng, spec=spec)
    if spec.kind == "heavy_tail_walk":
        return gen_heavy_tail_walk(n, spec.d, rng, spec=spec)
    if spec.kind == "cf_pair":
        return gen_cf_pair(n, rng, spec=spec)
    if spec.kind == "beta_pair":
        return gen_beta_pair(n, spec.beta, rng, spec=spec)
    raise ValueError(f"unknown process kind {spec.kind!r}")


# ---------------------------------------------------------------- skew product

@dataclass
class SkewProductTrack:
    """Fiber coordinate of the skew product over the shift, started at fiber 0.

    ``fiber[k-1]`` is the integer fiber after k steps (that is, the partial
    sum ``S_k``), and ``visits`` flags the steps that land on the zero fiber.
    The visit total equals the local time at level 0.
    """

    fiber: np.ndarray
    visits: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.visits = self.fiber == 0

    @property
    def visit_count(self) -> int:
        return int(np.count_nonzero(self.visits))

    def visit_counts_prefix(self) -> np.ndarray:
        return np.cumsum(self.visits)


def skew_product_trajectory(traj: IntTrajectory) -> SkewProductTrack:
    """Fiber track of the skew-product orbit of ``traj`` started at fiber 0."""
    return SkewProductTrack(np.asarray(traj.partial_sums))
