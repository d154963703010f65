"""
Distribution Assembly Module

Turns a partial-fraction expansion into the density and distribution
function of the weighted sum. Each coefficient c_{k,i} is the weight of a
gamma law with shape order_k - i + 1 and scale 2|w_k|; poles with negative
weight give gamma laws reflected onto the negative half-line, so the result
is defined on the whole real line.

Double-precision expansions evaluate the density as a numpy kernel over the
whole grid and the distribution function with this package's incomplete
gamma routines. Expansions that carry a working precision are evaluated in
mpmath from per-pole polynomials prepared once per expansion: for integer
shapes a,

    sum_a c_a Q(a, y) = e^{-y} sum_k (sum_{a>k} c_a) y^k / k!
    sum_a c_a y^{a-1} e^{-y} / (a-1)!

so each pole costs one exponential and one polynomial per point.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .errors import SpecError
from .model import WeightedSumSpec, mean_variance
from .partial_fractions import ESCALATION_AMPLIFICATION, PartialFractionExpansion, expand
from .special_functions import ln_gamma, regularized_lower_gamma, regularized_upper_gamma


@dataclass(frozen=True)
class GammaComponent:
    """One signed gamma building block of the mixture."""
    shape: int
    scale: float
    sign: int
    coefficient: float  # mpmath.mpf for extended-precision expansions

    @property
    def log_normaliser(self) -> float:
        """log(Gamma(shape) * scale^shape)."""
        return ln_gamma(self.shape) + self.shape * math.log(self.scale)


@dataclass(frozen=True)
class EvaluationTable:
    """Grid of x values with optional pdf / cdf / sf columns."""
    xs: Tuple[float, ...]
    pdf: Optional[Tuple[float, ...]] = None
    cdf: Optional[Tuple[float, ...]] = None
    sf: Optional[Tuple[float, ...]] = None
    ill_conditioned: bool = False

    def columns(self) -> List[str]:
        names = ["x"]
        for name in ("pdf", "cdf", "sf"):
            if getattr(self, name) is not None:
                names.append(name)
        return names


def components(expansion: PartialFractionExpansion) -> List[GammaComponent]:
    """One component per nonzero coefficient: shape = order - index + 1, scale = 2|weight|."""
    out = []
    for group in expansion.groups:
        scale = 2.0 * abs(group.weight)
        sign = 1 if group.weight > 0 else -1
        for index, coeff in enumerate(group.coeffs, start=1):
            if coeff == 0:
                continue
            out.append(GammaComponent(group.exponent(index), scale, sign, coeff))
    return out


@dataclass(frozen=True)
class _PolePolynomials:
    """mpmath data for one pole; polynomials are in y / scale, highest degree first."""
    sign: int
    scale: mpmath.mpf
    total: mpmath.mpf
    density: Tuple
    survival: Tuple


@dataclass(frozen=True)
class _Prepared:
    comps: Tuple[GammaComponent, ...]
    log_normalisers: Tuple[float, ...]
    float_coeffs: Tuple[float, ...]
    # largest |sum c f| at which double evaluation keeps an unescalated expansion's error
    double_limit: float
    working_dps: Optional[int] = None
    poles: Tuple[_PolePolynomials, ...] = ()


def _pole_polynomials(group, working_dps: int) -> _PolePolynomials:
    with mpmath.workdps(working_dps):
        scale = 2 * abs(mpmath.mpf(group.weight))
        by_shape = [mpmath.mpf(0)] * group.order
        for index, coeff in enumerate(group.coeffs, start=1):
            by_shape[group.exponent(index) - 1] = mpmath.mpf(coeff)
        density = [c / (mpmath.factorial(a) * scale) for a, c in enumerate(by_shape)]
        survival, tail = [], mpmath.mpf(0)
        for k in reversed(range(group.order)):
            tail += by_shape[k]
            survival.append(tail / mpmath.factorial(k))
        return _PolePolynomials(
            sign=1 if group.weight > 0 else -1,
            scale=scale,
            total=tail,
            density=tuple(reversed(density)),
            survival=tuple(survival),
        )


@lru_cache(maxsize=64)
def _prepare(expansion: PartialFractionExpansion) -> _Prepared:
    comps = tuple(components(expansion))
    min_scale = min(2.0 * abs(g.weight) for g in expansion.groups)
    prepared = _Prepared(
        comps=comps,
        log_normalisers=tuple(c.log_normaliser for c in comps),
        float_coeffs=tuple(float(c.coefficient) for c in comps),
        double_limit=ESCALATION_AMPLIFICATION / min_scale,
    )
    if expansion.working_dps is None:
        return prepared
    return _Prepared(
        comps=prepared.comps,
        log_normalisers=prepared.log_normalisers,
        float_coeffs=prepared.float_coeffs,
        double_limit=prepared.double_limit,
        working_dps=expansion.working_dps,
        poles=tuple(_pole_polynomials(g, expansion.working_dps) for g in expansion.groups),
    )


def _resolve(spec: WeightedSumSpec, expansion: Optional[PartialFractionExpansion]) -> _Prepared:
    return _prepare(expansion if expansion is not None else expand(spec))


def _density_double(prepared: _Prepared, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Density on a grid and the sum of |component terms| that bounds its rounding error."""
    y = np.abs(xs)
    values = np.zeros_like(xs)
    magnitude = np.zeros_like(xs)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        log_y = np.log(y)
        for comp, log_norm, coeff in zip(prepared.comps, prepared.log_normalisers, prepared.float_coeffs):
            active = xs >= 0 if comp.sign > 0 else xs < 0
            log_density = -y / comp.scale - log_norm
            if comp.shape > 1:
                log_density = log_density + (comp.shape - 1) * log_y
            term = np.where(active, coeff * np.exp(log_density), 0.0)
            values += term
            magnitude += np.abs(term)
    return values, magnitude


def _density_mp(prepared: _Prepared, x: float) -> float:
    side = 1 if x >= 0 else -1
    with mpmath.workdps(prepared.working_dps):
        y = abs(mpmath.mpf(x))
        total = mpmath.fsum(
            mpmath.exp(-y / pole.scale) * mpmath.polyval(pole.density, y / pole.scale)
            for pole in prepared.poles
            if pole.sign == side
        )
        return float(total)


def _density_values(prepared: _Prepared, xs: np.ndarray) -> np.ndarray:
    values, magnitude = _density_double(prepared, xs)
    if prepared.working_dps is None:
        return values
    for i in np.flatnonzero(~(magnitude <= prepared.double_limit)):
        values[i] = _density_mp(prepared, float(xs[i]))
    return values


def pdf(spec: WeightedSumSpec, x: float, expansion: Optional[PartialFractionExpansion] = None) -> float:
    """
    Density of the weighted sum at x.

    Positive-weight components contribute on x >= 0, negative-weight
    components on x < 0. The value is not clamped: conditioning error can
    make it slightly negative. For extended-precision expansions, points
    where the double sum could lose more than an unescalated expansion
    would are recomputed in mpmath.
    """
    prepared = _resolve(spec, expansion)
    return float(_density_values(prepared, np.array([float(x)]))[0])


def _cdf_parts(comp: GammaComponent, x: float, upper: bool) -> float:
    """
    Contribution of one component to F(x) (upper=False) or 1 - F(x) (upper=True),
    before multiplying by its coefficient.
    """
    y = abs(x) / comp.scale
    if comp.sign > 0:
        if x <= 0:
            return 1.0 if upper else 0.0
        return regularized_upper_gamma(comp.shape, y) if upper else regularized_lower_gamma(comp.shape, y)
    if x >= 0:
        return 0.0 if upper else 1.0
    return regularized_lower_gamma(comp.shape, y) if upper else regularized_upper_gamma(comp.shape, y)


def _cumulative_mp(prepared: _Prepared, x: float, upper: bool) -> float:
    with mpmath.workdps(prepared.working_dps):
        xm = mpmath.mpf(x)
        parts = []
        for pole in prepared.poles:
            if pole.sign > 0 and xm <= 0:
                parts.append(pole.total if upper else 0)
                continue
            if pole.sign < 0 and xm >= 0:
                parts.append(0 if upper else pole.total)
                continue
            y = abs(xm) / pole.scale
            # sum of c Q(a, y) over the pole's components
            tail = mpmath.exp(-y) * mpmath.polyval(pole.survival, y)
            want_tail = upper if pole.sign > 0 else not upper
            parts.append(tail if want_tail else pole.total - tail)
        return float(mpmath.fsum(parts))


def _assemble(prepared: _Prepared, x: float, upper: bool) -> float:
    if prepared.working_dps is not None:
        return _cumulative_mp(prepared, x, upper)
    return math.fsum(c.coefficient * _cdf_parts(c, x, upper) for c in prepared.comps)


def cdf(spec: WeightedSumSpec, x: float, expansion: Optional[PartialFractionExpansion] = None) -> float:
    """
    Distribution function F(x) as a coefficient-weighted sum of regularized
    incomplete gammas: P(a, x/scale) for positive poles (0 when x <= 0) and
    Q(a, |x|/scale) for negative poles (1 when x >= 0).

    The raw value is returned; clamping to [0, 1] is left to presentation.
    """
    return _assemble(_resolve(spec, expansion), x, upper=False)


def sf(spec: WeightedSumSpec, x: float, expansion: Optional[PartialFractionExpansion] = None) -> float:
    """Survival function 1 - F(x), assembled from the complementary incomplete gammas."""
    return _assemble(_resolve(spec, expansion), x, upper=True)


def _check_grid(xs: Sequence[float]) -> Tuple[float, ...]:
    xs = tuple(float(x) for x in xs)
    if not xs:
        raise SpecError("evaluation grid is empty")
    if not all(math.isfinite(x) for x in xs):
        raise SpecError("evaluation grid must be finite")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise SpecError("evaluation grid must be strictly increasing")
    return xs


def evaluate_grid(
    spec: WeightedSumSpec,
    xs: Sequence[float],
    want_pdf: bool = True,
    want_cdf: bool = True,
    want_sf: bool = False,
    expansion: Optional[PartialFractionExpansion] = None,
) -> EvaluationTable:
    """
    Evaluate the requested columns on a strictly increasing grid.

    The density kernel is elementwise and the distribution functions are
    evaluated point by point, so a table entry is bitwise equal to the
    matching pdf / cdf / sf call.
    """
    xs = _check_grid(xs)
    expansion = expansion if expansion is not None else expand(spec)
    prepared = _prepare(expansion)
    densities = _density_values(prepared, np.array(xs)) if want_pdf else None
    return EvaluationTable(
        xs=xs,
        pdf=tuple(float(v) for v in densities) if want_pdf else None,
        cdf=tuple(_assemble(prepared, x, upper=False) for x in xs) if want_cdf else None,
        sf=tuple(_assemble(prepared, x, upper=True) for x in xs) if want_sf else None,
        ill_conditioned=expansion.ill_conditioned,
    )


def sigma_grid(spec: WeightedSumSpec, span_sigmas: float, points: int) -> List[float]:
    """Equally spaced grid over mean +/- span_sigmas * sd."""
    if points < 2:
        raise SpecError(f"a grid needs at least 2 points, got {points}")
    mean, variance = mean_variance(spec)
    sd = math.sqrt(variance)
    lo, hi = mean - span_sigmas * sd, mean + span_sigmas * sd
    step = (hi - lo) / (points - 1)
    return [lo + i * step for i in range(points - 1)] + [hi]
