"""Checkers for rough isometries, Markov rough isometries and related predicates.

Every comparison is exact.  Constants are :class:`~fractions.Fraction` values
and point values are scaled to a common integer grid before any vectorised
scan, so ``D = 1/2`` style constants never meet binary floating point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Sequence

import numpy as np

from ..libs.exceptions import HorizonTooSmallError, PreconditionViolatedError
from ..libs.utils import format_rational, parse_rational
from .pointsets import AnyPointSet, Mapping, Number, PointSet

logger = logging.getLogger(__name__)

_INT64_SAFE = 1 << 62


def _normalise_multiplier(value: Any, family: str) -> Fraction:
    M = parse_rational(value)
    if M <= 0:
        raise ValueError(f"{family}: M must be positive, got {M}")
    if M < 1:
        logger.warning(f"{family}: M={M} < 1 normalised to 1")
        return Fraction(1)
    return M


def _non_negative(value: Any, name: str) -> Fraction:
    parsed = parse_rational(value)
    if parsed < 0:
        raise ValueError(f"{name} must be non-negative, got {parsed}")
    return parsed


@dataclass(frozen=True)
class RiConstants:
    """Rough isometry constants ``(M, D, R)``."""

    M: Fraction
    D: Fraction = Fraction(0)
    R: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "M", _normalise_multiplier(self.M, "RiConstants"))
        object.__setattr__(self, "D", _non_negative(self.D, "D"))
        object.__setattr__(self, "R", _non_negative(self.R, "R"))

    def as_dict(self) -> dict[str, str]:
        return {k: format_rational(getattr(self, k)) for k in ("M", "D", "R")}


@dataclass(frozen=True)
class MarkovConstants:
    """Markov rough isometry constants ``(M, F, R)``."""

    M: Fraction
    F: Fraction = Fraction(0)
    R: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "M", _normalise_multiplier(self.M, "MarkovConstants"))
        object.__setattr__(self, "F", _non_negative(self.F, "F"))
        object.__setattr__(self, "R", _non_negative(self.R, "R"))

    def as_dict(self) -> dict[str, str]:
        return {k: format_rational(getattr(self, k)) for k in ("M", "F", "R")}


class ViolationKind(str, Enum):
    DISTORTION_LOW = "DistortionLow"
    DISTORTION_HIGH = "DistortionHigh"
    DENSITY = "Density"
    NOT_ROOTED = "NotRooted"
    NOT_MONOTONE = "NotMonotone"
    ADJACENCY_DISTORTION = "AdjacencyDistortion"
    FIBER_WIDTH = "FiberWidth"


@dataclass(frozen=True)
class Violation:
    """A failed check together with the values and indices that reproduce it.

    ``indices`` are domain indices, except for ``Density`` where the single
    index points into the codomain.
    """

    kind: ViolationKind
    witness: tuple[Number, ...]
    indices: tuple[int, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict[str, object]:
        return {
            "kind": self.kind.value,
            "witness": [format_rational(Fraction(v)) for v in self.witness],
            "indices": list(self.indices),
        }


# -- integer grid -------------------------------------------------------------


def _common_scale(*groups: Sequence[Number]) -> int:
    scale = 1
    for group in groups:
        for value in group:
            if isinstance(value, Fraction) and value.denominator != 1:
                scale = math.lcm(scale, value.denominator)
    return scale


def _to_grid(values: Sequence[Number], scale: int) -> list[int]:
    if scale == 1:
        return [int(v) for v in values]
    return [int(Fraction(v) * scale) for v in values]


def _array(values: Sequence[int], weight: int) -> np.ndarray:
    """int64 array when products with coefficients up to ``weight`` cannot overflow."""

    peak = max((abs(v) for v in values), default=0)
    if (peak + 1) * max(weight, 1) * 4 < _INT64_SAFE:
        return np.asarray(values, dtype=np.int64)
    return np.asarray(values, dtype=object)


@dataclass
class _Grid:
    scale: int
    x: np.ndarray
    t: np.ndarray
    b: np.ndarray


def _grid(T: Mapping, *factors: int) -> _Grid:
    scale = _common_scale(T.domain, T.image, T.codomain)
    weight = max((abs(f) for f in factors), default=1) * scale
    return _Grid(
        scale,
        _array(_to_grid(T.domain, scale), weight),
        _array(_to_grid(T.image, scale), weight),
        _array(_to_grid(T.codomain, scale), weight),
    )


# -- density ------------------------------------------------------------------


def _density_violation(T: Mapping, R: Fraction) -> Optional[Violation]:
    """Smallest codomain point farther than ``R`` from every image point."""

    if not T.codomain:
        return None
    if not T.image:
        return Violation(ViolationKind.DENSITY, (T.codomain[0],), (0,))
    images = sorted(set(T.image))
    grid = _common_scale(images, T.codomain)
    scale = math.lcm(grid, R.denominator)
    img = _to_grid(images, scale)
    cod = _to_grid(T.codomain, scale)
    radius = int(R * scale)
    img_arr = _array(img, 2)
    cod_arr = _array(cod, 2)
    pos = np.searchsorted(img_arr, cod_arr)
    for index, b in enumerate(cod):
        p = int(pos[index])
        best = None
        if p < len(img):
            best = img[p] - b
        if p > 0:
            below = b - img[p - 1]
            best = below if best is None else min(best, below)
        if best is None or best > radius:
            return Violation(ViolationKind.DENSITY, (T.codomain[index],), (index,))
    return None


# -- rough isometry -----------------------------------------------------------


def _pair_scan(T: Mapping, c: RiConstants) -> Optional[Violation]:
    """Lexicographically first pair ``(i, j)``, ``i < j``, breaking a distortion bound."""

    a, b = c.M.numerator, c.M.denominator
    e, f = c.D.numerator, c.D.denominator
    g = _grid(T, a * f, b * f, e * a, e * b)
    low_slack = e * a * g.scale
    high_slack = e * b * g.scale
    n = len(T.domain)
    for i in range(n - 1):
        d = g.x[i + 1 :] - g.x[i]
        delta = abs(g.t[i + 1 :] - g.t[i])
        low_bad = b * f * d - low_slack > a * f * delta
        high_bad = b * f * delta > a * f * d + high_slack
        bad = np.asarray(low_bad | high_bad, dtype=bool)
        if bad.any():
            k = int(np.argmax(bad))
            j = i + 1 + k
            kind = ViolationKind.DISTORTION_LOW if bool(low_bad[k]) else ViolationKind.DISTORTION_HIGH
            return Violation(kind, (T.domain[i], T.domain[j]), (i, j))
    return None


def _monotone_distortion_ok(T: Mapping, c: RiConstants) -> bool:
    """Linear-time distortion check valid for non-decreasing maps.

    For ``i < j`` and ``M = a/b``, ``D = e/f`` the upper bound reads
    ``f (h_j - h_i) <= e b`` with ``h = b T - a x`` and the lower bound reads
    ``f (k_j - k_i) <= e a`` with ``k = b x - a T``; comparing each term with
    its running prefix minimum covers every pair.
    """

    a, b = c.M.numerator, c.M.denominator
    e, f = c.D.numerator, c.D.denominator
    g = _grid(T, a * f, b * f, e * a, e * b)
    if len(T.domain) < 2:
        return True
    h = b * g.t - a * g.x
    k = b * g.x - a * g.t
    h_min = np.minimum.accumulate(h)[:-1]
    k_min = np.minimum.accumulate(k)[:-1]
    high_ok = f * (h[1:] - h_min) <= e * b * g.scale
    low_ok = f * (k[1:] - k_min) <= e * a * g.scale
    return bool(np.all(np.asarray(high_ok, dtype=bool)) and np.all(np.asarray(low_ok, dtype=bool)))


def verify_rough_isometry(
    A: AnyPointSet, B: AnyPointSet, T: Mapping, c: RiConstants
) -> Optional[Violation]:
    """Return ``None`` when ``T`` is a rough isometry with constants ``c``.

    Distortion violations are reported before density violations; within a
    kind the lexicographically smallest witness wins.
    """

    T.check_against(A, B)
    if T.is_monotone() and _monotone_distortion_ok(T, c):
        violation = None
    else:
        violation = _pair_scan(T, c)
    if violation is not None:
        return violation
    return _density_violation(T, c.R)


def verify_rooted(
    A: AnyPointSet, B: AnyPointSet, T: Mapping, c: RiConstants
) -> Optional[Violation]:
    T.check_against(A, B)
    if not T.domain or T.domain[0] != 0 or T.image[0] != 0:
        witness = (T.domain[0], T.image[0]) if T.domain else ()
        return Violation(ViolationKind.NOT_ROOTED, witness, (0,) if T.domain else ())
    return verify_rough_isometry(A, B, T, c)


def verify_increasing(T: Mapping) -> Optional[Violation]:
    """First descent of the image list, reported at the later index."""

    for index in range(1, len(T.image)):
        if T.image[index] < T.image[index - 1]:
            return Violation(
                ViolationKind.NOT_MONOTONE,
                (T.image[index - 1], T.image[index]),
                (index,),
            )
    return None


def verify_markov(
    A: AnyPointSet, B: AnyPointSet, T: Mapping, mc: MarkovConstants
) -> Optional[Violation]:
    """Linear scan of the five Markov properties, in definition order."""

    T.check_against(A, B)
    if not T.domain or T.domain[0] != 0 or T.image[0] != 0:
        witness = (T.domain[0], T.image[0]) if T.domain else ()
        return Violation(ViolationKind.NOT_ROOTED, witness, (0,) if T.domain else ())
    monotone = verify_increasing(T)
    if monotone is not None:
        return monotone

    a, b = mc.M.numerator, mc.M.denominator
    for i in range(len(T.domain) - 1):
        delta = T.image[i + 1] - T.image[i]
        if delta == 0:
            continue
        d = T.domain[i + 1] - T.domain[i]
        if b * d > a * delta or b * delta > a * d:
            return Violation(
                ViolationKind.ADJACENCY_DISTORTION,
                (T.domain[i], T.domain[i + 1]),
                (i, i + 1),
            )

    start = 0
    for i in range(1, len(T.domain) + 1):
        if i == len(T.domain) or T.image[i] != T.image[start]:
            if T.domain[i - 1] - T.domain[start] > mc.F:
                return Violation(
                    ViolationKind.FIBER_WIDTH,
                    (T.domain[start], T.domain[i - 1]),
                    (start, i - 1),
                )
            start = i

    return _density_violation(T, mc.R)


# -- constant conversions -----------------------------------------------------


def markov_to_increasing_constants(mc: MarkovConstants) -> RiConstants:
    return RiConstants(2 * mc.F + mc.M, Fraction(1, 2), mc.R)


def increasing_to_markov_constants(c: RiConstants) -> MarkovConstants:
    return MarkovConstants(c.M * c.D + c.M + c.D, c.M * c.D, c.R)


# -- cut points and restriction -----------------------------------------------


def find_cut_point(A: AnyPointSet, B: AnyPointSet, T: Mapping) -> Optional[Number]:
    """Smallest domain point after which the map stays on one side of its image."""

    T.check_against(A, B)
    n = len(T.image)
    if n == 0:
        return None
    suffix_min: list[Number] = [0] * n
    suffix_max: list[Number] = [0] * n
    for i in range(n - 2, -1, -1):
        nxt = T.image[i + 1]
        if i == n - 2:
            suffix_min[i] = suffix_max[i] = nxt
        else:
            suffix_min[i] = min(nxt, suffix_min[i + 1])
            suffix_max[i] = max(nxt, suffix_max[i + 1])
    for i in range(n - 1):
        if suffix_min[i] >= T.image[i] or suffix_max[i] <= T.image[i]:
            return T.domain[i]
    return T.domain[n - 1]


def restrict(
    A: PointSet, B: PointSet, T: Mapping, n: int, L: Any, c: RiConstants
) -> tuple[PointSet, PointSet, Mapping, RiConstants]:
    """Restrict ``T`` to the first ``n`` points of ``A``.

    The codomain is cut at the largest image among those points and the
    candidate constants are ``(M, D, L)``; validity is left to the verifiers.
    """

    L = parse_rational(L)
    if L <= c.R:
        raise PreconditionViolatedError(f"restriction radius L={L} must exceed R={c.R}")
    if not 1 <= n <= len(A):
        raise PreconditionViolatedError(f"n={n} outside 1..{len(A)}")
    T.check_against(A, B)
    A_n = A.prefix(n)
    top = max(T.image[:n])
    B_m = B.upto(int(top))
    restricted = Mapping(A_n.points, T.image[:n], B_m.points)
    return A_n, B_m, restricted, RiConstants(c.M, c.D, L)


def window_restriction(
    A: PointSet, B: PointSet, T: Mapping, x: int, y: int
) -> tuple[PointSet, PointSet, Mapping]:
    """Restriction of a monotone map to ``A ∩ [x, y]`` onto ``B ∩ [T(x), T(y)]``.

    Both sides are translated so that ``x`` and ``T(x)`` become the roots.
    """

    T.check_against(A, B)
    tx, ty = T(x), T(y)
    if x > y or tx > ty:
        raise PreconditionViolatedError("window must be ordered in domain and image")
    A_w = A.window(x, y)
    B_w = B.window(int(tx), int(ty))
    start = A.index_of(x)
    stop = A.index_of(y) + 1
    image = tuple(int(v) - int(tx) for v in T.image[start:stop])
    return A_w, B_w, Mapping(A_w.points, image, B_w.points)


# -- big-gap predicates -------------------------------------------------------


def l_min(M: Any, D: Any) -> Fraction:
    """Smallest back-jump size for which the big-gap conclusion is guaranteed."""

    M = parse_rational(M)
    D = parse_rational(D)
    return max(2 * D, 8 * D * M * M)


def exact_horizon(A: PointSet, w: int, M: Any) -> Fraction:
    """Horizon past which no known point can trigger the gap event.

    Points ``z`` with ``z - w > 2 M**2 * max_gap`` need a gap larger than any
    observed after ``w``; the answer is exact on ``A`` when no such gap occurs later.
    """

    M = parse_rational(M)
    start = next((i for i, p in enumerate(A.points) if p > w), len(A))
    gaps = A.gaps[start:]
    biggest = max(gaps, default=0)
    return w + 2 * M * M * biggest


def event_Ew(A: PointSet, w: int, L: Any, M: Any, horizon: int) -> bool:
    """Whether some ``w < z <= horizon`` has ``Gap(z) >= max(L/4M^3, (z-w)/2M^2)``.

    A negative answer is certified only when ``horizon`` reaches
    :func:`exact_horizon`; otherwise :class:`HorizonTooSmallError` is raised.
    """

    L = parse_rational(L)
    M = parse_rational(M)
    if horizon < w:
        raise PreconditionViolatedError(f"horizon {horizon} precedes w={w}")
    if not A.points or horizon >= A.points[-1]:
        raise HorizonTooSmallError(
            f"horizon {horizon} reaches the last known point; its gap is unknown"
        )
    floor_gap = L / (4 * M**3)
    spread = 2 * M * M
    points = A.points
    for index in range(len(points) - 1):
        z = points[index]
        if z <= w:
            continue
        if z > horizon:
            break
        gap = points[index + 1] - z
        if gap >= floor_gap and gap * spread >= z - w:
            return True
    needed = exact_horizon(A, w, M)
    if horizon < needed:
        raise HorizonTooSmallError(f"horizon {horizon} is below the certified horizon {needed}")
    return False


def big_gap_conclusion(
    A: PointSet, T: Mapping, x: int, y: int, c: RiConstants, L: Any
) -> Optional[int]:
    """The point ``z`` of the big-gap argument: largest ``z`` with ``T(z) <= T(x)``.

    Returns ``None`` when ``z`` is the last known point or when the concluded
    inequalities fail, which signals that the hypotheses were not met.
    """

    L = parse_rational(L)
    if not x < y:
        raise PreconditionViolatedError("x must precede y")
    if T(y) > T(x) - L:
        raise PreconditionViolatedError(f"T(y)={T(y)} exceeds T(x)-L={T(x) - L}")
    if L < l_min(c.M, c.D):
        raise PreconditionViolatedError(f"L={L} is below the minimum {l_min(c.M, c.D)}")
    tx = T(x)
    candidates = [i for i, v in enumerate(T.image) if v <= tx]
    index = candidates[-1]
    if index == len(A.points) - 1:
        return None
    z = A.points[index]
    gap = A.points[index + 1] - z
    M = c.M
    if z >= y and 2 * M * (z - x) >= L and 2 * M * M * gap >= z - x:
        return z
    return None
