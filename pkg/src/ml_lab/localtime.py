"""Local-time profiles, norming sequences, and the exact convolution oracle.

The norming sequence is ``a_n = g0 * sum_{k<=n} 1/B_k`` with
``B_k = c * k**(1/d)``; under it the zero-level occupation count of a walk
with a local limit theorem at zero has a nondegenerate limit.  For i.i.d.
walks an exact dynamic-programming convolution of the increment law provides
ground truth for ``P(S_m = x)`` at small ``|x|``, against which expectation
identities and summability conditions are checked without Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp
from scipy.signal import fftconvolve

from .processes import IntTrajectory, ProcessSpec, heavy_tail_half_pmf
from scipy.special import zeta as _hurwitz

__all__ = [
    "LocalTimeProfile",
    "ScalingScheme",
    "WalkDistribution",
    "exact_walk_distribution",
    "expected_local_time_check",
    "local_time",
    "normalizer",
]

_DENSE_CELL_BUDGET = 10**9
_PREFIX_CACHE_MAX = 1 << 20


class ScalingScheme:
    """Norming data ``(d, c, g0)`` with ``B_n = c * n**(1/d)`` and cached ``a_n``.

    Demands ``d`` in (1, 2] so the exponent ``beta = 1/d`` lies in [1/2, 1)
    and ``a_n`` diverges; ``alpha = 1 - beta`` is the limit-law order.
    Prefix sums of ``k**-beta`` are cached densely up to 2^20 and continued
    by an Euler-Maclaurin expansion pinned to the cached value at the seam,
    so ``a`` is exact-to-float, strictly increasing, and O(1) per query.
    """

    def __init__(self, d: float, scale_c: float, g0: float) -> None:
        if not 1.0 < d <= 2.0:
            raise ValueError(f"need d in (1, 2] so beta = 1/d lies in [1/2, 1); got {d}")
        if scale_c <= 0.0 or g0 <= 0.0:
            raise ValueError("scale constant and density at zero must be positive")
        self.d = float(d)
        self.scale_c = float(scale_c)
        self.g0 = float(g0)
        self.beta_exp = 1.0 / self.d
        self.alpha = 1.0 - self.beta_exp
        self._prefix = np.array([0.0])  # prefix[k] = sum_{j<=k} j**-beta
        self._zeta_beta: float | None = None

    @classmethod
    def for_lazy_walk(cls) -> "ScalingScheme":
        """Exact scheme for the lazy walk: sigma = sqrt(1/2), normal g0."""
        return cls(d=2.0, scale_c=math.sqrt(0.5), g0=1.0 / math.sqrt(2.0 * math.pi))

    def B(self, k):
        return self.scale_c * np.asarray(k, dtype=float) ** self.beta_exp

    def _grow_cache(self, n: int) -> None:
        target = min(_PREFIX_CACHE_MAX, max(n, 2 * (len(self._prefix) - 1), 1024))
        if target <= len(self._prefix) - 1:
            return
        ks = np.arange(1, target + 1, dtype=float)
        self._prefix = np.concatenate([[0.0], np.cumsum(ks**-self.beta_exp)])

    def _prefix_sum(self, n: int) -> float:
        """``sum_{k=1}^{n} k**-beta`` (exact cumsum below the seam, EM above)."""
        if n <= _PREFIX_CACHE_MAX:
            self._grow_cache(n)
            return float(self._prefix[n])
        return self._prefix_sum(_PREFIX_CACHE_MAX) + (
            self._em_tail(n) - self._em_tail(_PREFIX_CACHE_MAX)
        )

    def _em_tail(self, n: int) -> float:
        # Euler-Maclaurin for sum k**-beta; error O(n**-(beta+5)), far below
        # float resolution for n > 2**20.
        b = self.beta_exp
        if self._zeta_beta is None:
            self._zeta_beta = float(mp.zeta(b))
        x = float(n)
        return (
            self._zeta_beta
            + x ** (1.0 - b) / (1.0 - b)
            + 0.5 * x**-b
            - (b / 12.0) * x ** (-b - 1.0)
            + (b * (b + 1.0) * (b + 2.0) / 720.0) * x ** (-b - 3.0)
        )

    def a(self, n: int) -> float:
        """Norming value ``a_n = g0 * sum_{k<=n} 1/B_k``."""
        if n < 1:
            raise ValueError(f"norming sequence index must be >= 1, got {n}")
        return self.g0 / self.scale_c * self._prefix_sum(int(n))

    def a_at(self, u: float) -> float:
        """``a`` at a non-integer argument, by convention ``a_floor(u)``."""
        return self.a(int(math.floor(u)))

    def a_values(self, n: int) -> np.ndarray:
        """Vector ``(a_1, ..., a_n)``; n must fit the dense cache."""
        if n > _PREFIX_CACHE_MAX:
            raise ValueError(f"dense norming vector limited to {_PREFIX_CACHE_MAX} entries")
        self._grow_cache(n)
        return self.g0 / self.scale_c * self._prefix[1 : n + 1]

    def to_dict(self) -> dict:
        return {"d": self.d, "scale_c": self.scale_c, "g0": self.g0}


def normalizer(scheme: ScalingScheme, n) -> float:
    """``a_n`` for integer ``n >= 1``; non-integer arguments take the floor."""
    return scheme.a_at(float(n))


# ------------------------------------------------------------- local time

@dataclass
class LocalTimeProfile:
    """Occupation counts of one level: ``counts[k-1] = #{i <= k : S_i = x}``."""

    level: int
    counts: np.ndarray
    return_times: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("step,count\n")
            for i, c in enumerate(self.counts, start=1):
                fh.write(f"{i},{int(c)}\n")


def local_time(traj: IntTrajectory, x: int) -> LocalTimeProfile:
    """Single-pass occupation profile of level ``x`` (``S_0`` is not a visit)."""
    hits = np.asarray(traj.partial_sums) == x
    counts = np.cumsum(hits)
    return_times = np.flatnonzero(hits).astype(np.int64) + 1
    return LocalTimeProfile(level=int(x), counts=counts, return_times=return_times)


# ------------------------------------------------- exact convolution oracle

@dataclass
class WalkDistribution:
    """Exact table ``P(S_m = x)`` for ``m <= n``, ``|x| <= support_radius``.

    ``escaped_low/high[m]`` hold probability mass that left the tracked state
    window by step ``m`` (identically zero for the lazy walk, whose state
    window is exact).  ``row_total(m)`` returns tracked + escaped mass and
    equals 1 to within 1e-12 for every row.
    """

    spec: ProcessSpec
    n: int
    support_radius: int
    probs: np.ndarray  # shape (n+1, 2*support_radius+1); row 0 is the start
    escaped_low: np.ndarray
    escaped_high: np.ndarray
    tracked_mass: np.ndarray

    def prob(self, m: int, x: int) -> float:
        if not 0 <= m <= self.n:
            raise ValueError(f"time index out of range: {m}")
        if abs(x) > self.support_radius:
            raise ValueError(f"level {x} outside tabulated radius {self.support_radius}")
        return float(self.probs[m, self.support_radius + x])

    @property
    def p_zero(self) -> np.ndarray:
        """``P(S_m = 0)`` for m = 1..n."""
        return self.probs[1:, self.support_radius]

    def level_column(self, x: int) -> np.ndarray:
        if abs(x) > self.support_radius:
            raise ValueError(f"level {x} outside tabulated radius {self.support_radius}")
        return self.probs[1:, self.support_radius + x]

    def row_total(self, m: int) -> float:
        return float(self.tracked_mass[m] + self.escaped_low[m] + self.escaped_high[m])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("m,x,prob\n")
            for m in range(1, self.n + 1):
                for xi in range(-self.support_radius, self.support_radius + 1):
                    fh.write(f"{m},{xi},{self.probs[m, self.support_radius + xi]:.17g}\n")


def _increment_kernel(spec: ProcessSpec, kernel_radius: int) -> tuple[np.ndarray, float]:
    """Dense increment law on [-kernel_radius, kernel_radius] and lost tail mass."""
    if spec.kind == "lazy_walk":
        return np.array([0.25, 0.5, 0.25]), 0.0
    if spec.kind == "heavy_tail_walk":
        half = heavy_tail_half_pmf(spec.d, np.arange(1, kernel_radius + 1))
        kernel = np.zeros(2 * kernel_radius + 1)
        kernel[kernel_radius + 1 :] = half
        kernel[:kernel_radius] = half[::-1]
        lost = float(_hurwitz(1.0 + spec.d, kernel_radius + 1.0)) / float(_hurwitz(1.0 + spec.d))
        return kernel, lost
    raise ValueError(f"no exact convolution oracle for process kind {spec.kind!r}")


def exact_walk_distribution(
    spec: ProcessSpec,
    n: int,
    support_radius: int,
    *,
    state_radius: int | None = None,
    kernel_radius: int = 10**4,
) -> WalkDistribution:
    """Exact dynamic-programming convolution of an i.i.d. walk's increment law.

    The state row spans ``[-state_radius, state_radius]``; mass convected past
    the window (or carried by jumps beyond ``kernel_radius``, heavy-tail kind
    only) is accumulated in two one-way overflow cells so each row still
    accounts for total mass 1.  For the lazy walk the defaults make the table
    exact: unit jumps and ``state_radius = n`` leave nothing to escape.
    """
    if n < 1:
        raise ValueError(f"horizon must be >= 1, got {n}")
    if support_radius < 0:
        raise ValueError("support radius must be nonnegative")
    if n * max(support_radius, 1) > _DENSE_CELL_BUDGET:
        raise ValueError(
            f"dense table of {n} x {2 * support_radius + 1} cells exceeds the "
            f"{_DENSE_CELL_BUDGET}-cell budget"
        )
    if spec.kind == "lazy_walk":
        kernel_radius = 1
        R = n if state_radius is None else state_radius
    else:
        if state_radius is None:
            R = max(2000, int(8.0 * n ** (1.0 / spec.d)))
        else:
            R = state_radius
    R = max(R, support_radius)
    kernel, lost = _increment_kernel(spec, kernel_radius)
    kr = (len(kernel) - 1) // 2

    state = np.zeros(2 * R + 1)
    state[R] = 1.0
    r = support_radius
    probs = np.zeros((n + 1, 2 * r + 1))
    probs[0, r] = 1.0
    esc_lo = np.zeros(n + 1)
    esc_hi = np.zeros(n + 1)
    tracked = np.ones(n + 1)
    use_fft = len(kernel) > 64

    for m in range(1, n + 1):
        lost_now = tracked[m - 1] * lost
        if use_fft:
            full = fftconvolve(state, kernel)
        else:
            full = np.convolve(state, kernel)
        lo_cut = float(full[:kr].sum()) if kr else 0.0
        hi_cut = float(full[len(full) - kr :].sum()) if kr else 0.0
        state = full[kr : len(full) - kr] if kr else full
        esc_lo[m] = esc_lo[m - 1] + lo_cut + 0.5 * lost_now
        esc_hi[m] = esc_hi[m - 1] + hi_cut + 0.5 * lost_now
        tracked[m] = tracked[m - 1] - lo_cut - hi_cut - lost_now
        probs[m] = state[R - r : R + r + 1]

    return WalkDistribution(
        spec=spec,
        n=n,
        support_radius=r,
        probs=probs,
        escaped_low=esc_lo,
        escaped_high=esc_hi,
        tracked_mass=tracked,
    )


# ------------------------------------------- expectation identity check

@dataclass
class ExpectedLocalTimeReport:
    """Exact ``E[l_n] = sum_{i<=n} P(S_i = 0)`` against the norming ``a_n``."""

    checkpoints: np.ndarray
    expected: np.ndarray
    norming: np.ndarray
    ratios: np.ndarray

    @property
    def final_ratio(self) -> float:
        return float(self.ratios[-1])

    def rows(self):
        for c, e, a, q in zip(self.checkpoints, self.expected, self.norming, self.ratios):
            yield {"checkpoint": int(c), "expected_local_time": float(e), "a_n": float(a), "ratio": float(q)}


def expected_local_time_check(
    spec: ProcessSpec,
    scheme: ScalingScheme,
    n: int,
    *,
    dist: WalkDistribution | None = None,
    checkpoint_count: int = 16,
) -> ExpectedLocalTimeReport:
    """Ratio ``E[l_n] / a_n`` along logarithmic checkpoints, from the exact DP."""
    if dist is None:
        dist = exact_walk_distribution(spec, n, support_radius=0)
    if dist.n < n:
        raise ValueError(f"oracle horizon {dist.n} is shorter than requested {n}")
    expected_full = np.cumsum(dist.p_zero[:n])
    ckpts = np.unique(np.geomspace(1, n, checkpoint_count).astype(np.int64))
    expected = expected_full[ckpts - 1]
    norming = np.array([scheme.a(int(c)) for c in ckpts])
    return ExpectedLocalTimeReport(
        checkpoints=ckpts, expected=expected, norming=norming, ratios=expected / norming
    )
