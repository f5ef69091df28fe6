"""Logistic-map amplification of a small answer-qubit weight.

The amplifier works on a scalar: starting from x_0 = p it iterates
g_a(x) = a x (1 - x) and reports the first k with x_k > 1/2.  The density
operator form (I + x sigma_3) / 2 is a thin wrapper around that scalar.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .qsim import QubitDensity

DEFAULT_A = 3.71
THRESHOLD = 0.5


class AmplifierError(ValueError):
    pass


@dataclass(frozen=True)
class AmplifierConfig:
    """``k_max=None`` means a budget of 2n for an n-bit search."""

    a: float = DEFAULT_A
    k_max: int | None = None

    def __post_init__(self):
        if not 0 <= self.a <= 4:
            raise AmplifierError(f"a={self.a} outside [0, 4]")
        if self.k_max is not None and self.k_max < 0:
            raise AmplifierError("k_max must be non-negative")

    def budget(self, n: int) -> int:
        return 2 * n if self.k_max is None else self.k_max


@dataclass(frozen=True)
class AmplifierTrace:
    xs: tuple[float, ...]
    detected: bool
    k: int | None

    @property
    def steps(self) -> int:
        """Channel applications actually performed."""
        return len(self.xs) - 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "x"])
        for k, x in enumerate(self.xs):
            w.writerow([k, f"{x:.17g}"])
        return buf.getvalue()


def logistic_step(x: float, a: float = DEFAULT_A) -> float:
    if not 0 <= a <= 4:
        raise AmplifierError(f"a={a} outside [0, 4]")
    if not 0 <= x <= 1:
        raise AmplifierError(f"x={x} outside [0, 1]")
    return a * x * (1 - x)


def amplifier_input(rho: QubitDensity) -> QubitDensity:
    """Re-encode (1-p)|0><0| + p|1><1| as (I + p sigma_3)/2.

    The channel reads its scalar as tr(rho sigma_3); this maps the
    reduced answer qubit onto that convention so the k-th output is
    (I + g^k(p) sigma_3)/2.
    """
    return lift(rho.p)


def lift(x: float) -> QubitDensity:
    """(I + x sigma_3)/2, remembering x itself."""
    return QubitDensity.diagonal((1 + x) / 2, (1 - x) / 2, bloch_z=x)


def channel_apply(rho: QubitDensity, a: float = DEFAULT_A, tol: float = 1e-12) -> QubitDensity:
    """One application of the amplifier channel: rho -> (I + g_a(x) sigma_3)/2."""
    if rho.coherence > tol:
        raise AmplifierError(f"channel input is not diagonal (|rho01|={rho.coherence:.3g})")
    x = rho.sigma_z()
    # without a recorded bloch_z, (1+x)/2 - (1-x)/2 can land an ulp outside [0, 1]
    if -tol <= x < 0:
        x = 0.0
    elif 1 < x <= 1 + tol:
        x = 1.0
    return lift(logistic_step(x, a))


def detect(p: float, config: AmplifierConfig, n: int | None = None) -> AmplifierTrace:
    """Iterate from x_0 = p until x_k > 1/2 or the budget runs out."""
    if not 0 <= p <= 1:
        raise AmplifierError(f"p={p} outside [0, 1]")
    k_max = config.budget(n) if n is not None else config.k_max
    if k_max is None:
        raise AmplifierError("k_max unset: pass n or configure k_max")
    xs = [p]
    x = p
    for k in range(k_max + 1):
        if x > THRESHOLD:
            return AmplifierTrace(tuple(xs), True, k)
        if k == k_max:
            break
        x = logistic_step(x, config.a)
        xs.append(x)
    return AmplifierTrace(tuple(xs), False, None)


def min_crossing(x0: float, a: float, k_cap: int) -> int | None:
    x = x0
    for k in range(k_cap + 1):
        if x > THRESHOLD:
            return k
        x = logistic_step(x, a)
    return None


# --------------------------------------------------------------------------
# Probing the crossing-time theorems
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoremRow:
    n: int
    x0: float
    k_min: int | None
    bound_2n: int
    bound_eq7: float
    bound_54: int
    thm1_holds: bool
    eq7_as_upper_holds: bool
    eq7_as_stated_holds: bool
    underflow: bool

    COLUMNS = ("n", "x0", "k_min", "bound_2n", "bound_eq7", "bound_54",
               "thm1_holds", "eq7_as_upper_holds", "eq7_as_stated_holds", "underflow")

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in self.COLUMNS}


def growth_bound(n: int, a: float = DEFAULT_A) -> int:
    """Smallest integer strictly above (n-1)/log2(a/2).

    While x <= 1/2, one step multiplies x by at least a/2, so starting from
    2**-n the iterate passes 1/2 no later than this.
    """
    return math.floor((n - 1) / (math.log2(a) - 1)) + 1


def theorem_row(n: int, a: float = DEFAULT_A) -> TheoremRow:
    x0 = 2.0**-n
    k_min = min_crossing(x0, a, 4 * n + 8)
    bound = (n - 1) / (math.log2(DEFAULT_A) - 1)
    bound_54 = math.floor(Fraction(5, 4) * (n - 1)) + 1
    return TheoremRow(
        n=n,
        x0=x0,
        k_min=k_min,
        bound_2n=2 * n,
        bound_eq7=bound,
        bound_54=bound_54,
        thm1_holds=k_min is not None and k_min <= 2 * n,
        eq7_as_upper_holds=k_min is not None and k_min <= growth_bound(n),
        # as written: k > (n-1)/(log2 3.71 - 1) > 5/4 (n-1)
        eq7_as_stated_holds=(k_min is not None and k_min > bound
                             and bound > Fraction(5, 4) * (n - 1)),
        underflow=x0 == 0.0,
    )


def theorem_report(n_lo: int, n_hi: int, a: float = DEFAULT_A) -> list[TheoremRow]:
    if not 1 <= n_lo <= n_hi:
        raise AmplifierError(f"bad range {n_lo}..{n_hi}")
    if not 0 <= a <= 4:
        raise AmplifierError(f"a={a} outside [0, 4]")
    return [theorem_row(n, a) for n in range(n_lo, n_hi + 1)]


def theorem_csv(rows: list[TheoremRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TheoremRow.COLUMNS)
    for r in rows:
        out = []
        for c in TheoremRow.COLUMNS:
            v = getattr(r, c)
            if isinstance(v, bool):
                out.append(str(v).lower())
            elif isinstance(v, float):
                out.append(f"{v:.17g}")
            else:
                out.append("" if v is None else v)
        w.writerow(out)
    return buf.getvalue()


def scalar_orbit(p: float, a: float, k: int) -> np.ndarray:
    xs = np.empty(k + 1)
    xs[0] = p
    for j in range(k):
        xs[j + 1] = logistic_step(xs[j], a)
    return xs
