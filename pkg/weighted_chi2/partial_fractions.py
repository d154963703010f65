"""
Partial Fraction Decomposition Module

Rewrites the product MGF prod_k (1 - 2 w_k t)^(-m_k) as the finite sum

    sum_k sum_{i=1..m_k} c_{k,i} (1 - 2 w_k t)^(-(m_k - i + 1))

Three routines produce the coefficients c_{k,i}:

* coefficients_two_term / coefficients_three_term: closed forms for two and
  three terms with a common dof (the Leibniz-rule expansions of the residues);
* coefficients_general: any number of terms and unequal even dofs, from a
  derivative recurrence on the logarithm of the MGF with one factor removed.

Coefficients are carried as (sign, log|c|) pairs and exponentiated at the end,
because intermediate factorials and powers leave the double range for large
pole orders. expand() is the entry point used by the distribution layer: it
merges coincident weights and switches to mpmath arithmetic when the
coefficients are large enough that double-precision sums would cancel.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import mpmath
from scipy.special import logsumexp

from .errors import CoefficientOverflowError, CoincidentPolesError, DomainError, SpecError
from .model import Term, WeightedSumSpec
from .special_functions import ln_gamma

logger = logging.getLogger(__name__)

DEFAULT_MERGE_TOL = 1e-9
ILL_CONDITIONED_SEPARATION = 1e-3
# Above this sum of |coefficients| double-precision evaluation is replaced by mpmath.
ESCALATION_AMPLIFICATION = 1e3

_LOG_DOUBLE_MAX = math.log(1.7976931348623157e308)

# (sign, log|value|); sign 0 encodes an exact zero.
SignedLog = Tuple[int, float]


@dataclass(frozen=True)
class PoleGroup:
    """
    One pole of the MGF and its partial-fraction coefficients.

    coeffs[i - 1] multiplies (1 - 2 weight t)^(-(order - i + 1)), so the first
    coefficient belongs to the highest power. Values are floats, or mpmath
    numbers when the owning expansion has a working precision.
    """
    weight: float
    order: int
    coeffs: Tuple

    def exponent(self, index: int) -> int:
        """Power of (1 - 2 weight t)^-1 multiplied by coefficient `index` (1-based)."""
        return self.order - index + 1


@dataclass(frozen=True)
class PartialFractionExpansion:
    """Pole groups of a decomposed MGF."""
    groups: Tuple[PoleGroup, ...]
    ill_conditioned: bool = False
    working_dps: Optional[int] = None

    @property
    def coefficient_sum(self) -> float:
        """Sum of all coefficients; equals the MGF at t = 0, i.e. 1."""
        if self.working_dps is not None:
            with mpmath.workdps(self.working_dps):
                return float(mpmath.fsum(c for g in self.groups for c in g.coeffs))
        return math.fsum(c for g in self.groups for c in g.coeffs)

    @property
    def amplification(self) -> float:
        """Sum of |coefficients|: how much rounding in each term is magnified."""
        return math.fsum(abs(float(c)) for g in self.groups for c in g.coeffs)

    def rows(self) -> List[Tuple[float, int, int, int, float]]:
        """(group_weight, order, index, exponent, coefficient) per coefficient."""
        return [
            (g.weight, g.order, i, g.exponent(i), float(c))
            for g in self.groups
            for i, c in enumerate(g.coeffs, start=1)
        ]

    def perturbed(self, rel: float) -> "PartialFractionExpansion":
        """Copy with the first coefficient of the first group scaled by (1 + rel)."""
        first = self.groups[0]
        coeffs = (first.coeffs[0] * (1 + rel),) + tuple(first.coeffs[1:])
        return replace(self, groups=(replace(first, coeffs=coeffs),) + self.groups[1:])


def _same_weight(a: float, b: float, rel_tol: float) -> bool:
    return abs(a - b) <= rel_tol * max(abs(a), abs(b))


def min_separation(weights: Sequence[float]) -> float:
    """Smallest |1 - w_i / w_j| over ordered pairs; inf for a single weight."""
    seps = [
        min(abs(1.0 - a / b), abs(1.0 - b / a))
        for a, b in combinations(weights, 2)
    ]
    return min(seps) if seps else math.inf


def merge_weights(spec: WeightedSumSpec, rel_tol: float = DEFAULT_MERGE_TOL) -> WeightedSumSpec:
    """
    Coalesce terms whose weights agree within rel_tol into one term.

    The first term of each cluster supplies the weight; dofs are summed.
    Term order follows first appearance.
    """
    if not rel_tol > 0:
        raise SpecError(f"merge tolerance must be positive, got {rel_tol!r}")
    weights: List[float] = []
    dofs: List[int] = []
    for term in spec.terms:
        for i, w in enumerate(weights):
            if _same_weight(term.weight, w, rel_tol):
                dofs[i] += term.dof
                break
        else:
            weights.append(term.weight)
            dofs.append(term.dof)
    if len(weights) == len(spec.terms):
        return spec
    return WeightedSumSpec(tuple(Term(w, n) for w, n in zip(weights, dofs)))


def _require_distinct(weights: Sequence[float], rel_tol: float = DEFAULT_MERGE_TOL) -> None:
    for a, b in combinations(weights, 2):
        if _same_weight(a, b, rel_tol):
            raise CoincidentPolesError(
                f"weights {a!r} and {b!r} coincide; merge the spec first"
            )


def _is_ill_conditioned(weights: Sequence[float]) -> bool:
    return min_separation(weights) < ILL_CONDITIONED_SEPARATION


def _sign(x: float) -> int:
    return 1 if x > 0 else -1


def _signed_log(x: float) -> SignedLog:
    if x == 0:
        return 0, -math.inf
    return _sign(x), math.log(abs(x))


def _signed_log_sum(parts: Sequence[SignedLog]) -> SignedLog:
    """Sum of signed log-magnitudes without leaving log space."""
    live = [(s, v) for s, v in parts if s != 0]
    if not live:
        return 0, -math.inf
    value, sign = logsumexp([v for _, v in live], b=[s for s, _ in live], return_sign=True)
    if math.isnan(value) or value == math.inf:
        # an input overflowed: the magnitude is unbounded, not zero
        return 1, math.inf
    if sign == 0 or value == -math.inf:
        return 0, -math.inf
    return int(sign), float(value)


def _ln_rising(m: int, s: int) -> float:
    """log of the rising factorial m (m+1) ... (m+s-1)."""
    return ln_gamma(m + s) - ln_gamma(m)


def _ln_binomial(r: int, k: int) -> float:
    return ln_gamma(r + 1) - ln_gamma(k + 1) - ln_gamma(r - k + 1)


def _exponentiate(parts: Sequence[SignedLog]) -> Tuple[float, ...]:
    out = []
    for sign, log_mag in parts:
        if sign == 0:
            out.append(0.0)
            continue
        if not log_mag <= _LOG_DOUBLE_MAX:
            raise CoefficientOverflowError(
                f"coefficient magnitude e^{log_mag:.1f} exceeds the double range"
            )
        out.append(sign * math.exp(log_mag))
    return tuple(out)


def _check_common_dof(spec: WeightedSumSpec, count: int) -> int:
    if len(spec.terms) != count:
        raise SpecError(f"expected exactly {count} terms, got {len(spec.terms)}")
    dof = spec.common_dof
    if dof is None:
        raise SpecError(f"closed form needs a common dof, got {spec.dofs}")
    _require_distinct(spec.weights)
    return dof


def _two_term_logs(own: float, other: float, m: int) -> List[SignedLog]:
    """
    A_i = (w2/w1)^(i-1) / (i-1)! * prod_{j=1}^{i-1} (-m - j + 1) * (1 - w2/w1)^(-m-i+1)
    for i = 1..m, with w1 = own and w2 = other.
    """
    ratio = other / own
    gap = 1.0 - ratio
    logs = []
    for i in range(1, m + 1):
        r = i - 1
        log_mag = (
            r * math.log(abs(ratio))
            - ln_gamma(r + 1)
            + _ln_rising(m, r)
            - (m + r) * math.log(abs(gap))
        )
        sign = _sign(ratio) ** r * (-1) ** r * _sign(gap) ** (m + r)
        logs.append((sign, log_mag))
    return logs


def coefficients_two_term(spec: WeightedSumSpec) -> PartialFractionExpansion:
    """
    Closed-form coefficients for two terms with a common even dof.

    Raises:
        SpecError: wrong term count or unequal dofs.
        CoincidentPolesError: the two weights coincide.
    """
    dof = _check_common_dof(spec, 2)
    m = dof // 2
    w1, w2 = spec.weights
    groups = (
        PoleGroup(w1, m, _exponentiate(_two_term_logs(w1, w2, m))),
        PoleGroup(w2, m, _exponentiate(_two_term_logs(w2, w1, m))),
    )
    return PartialFractionExpansion(groups, ill_conditioned=_is_ill_conditioned(spec.weights))


def _three_term_logs(own: float, p: float, q: float, m: int) -> List[SignedLog]:
    """
    Leibniz-rule closed form for the pole at `own`, the other factors being
    p and q:

        (p/own)^(i-1) / (i-1)! * sum_{k=0}^{i-1} C(i-1, k)
            * prod_{j=1}^{i-1-k} (-m-j+1) * (1 - p/own)^(-m-(i-1-k))
            * prod_{j=1}^{k} (-m-j+1) * (1 - q/own)^(-m-k) * (q/p)^k
    """
    rp, rq, qp = p / own, q / own, q / p
    gap_p, gap_q = 1.0 - rp, 1.0 - rq
    logs = []
    for i in range(1, m + 1):
        r = i - 1
        terms = []
        for k in range(r + 1):
            log_mag = (
                _ln_binomial(r, k)
                + _ln_rising(m, r - k)
                - (m + r - k) * math.log(abs(gap_p))
                + _ln_rising(m, k)
                - (m + k) * math.log(abs(gap_q))
                + k * math.log(abs(qp))
            )
            sign = (-1) ** r * _sign(gap_p) ** (m + r - k) * _sign(gap_q) ** (m + k) * _sign(qp) ** k
            terms.append((sign, log_mag))
        sign, log_sum = _signed_log_sum(terms)
        if sign == 0:
            logs.append((0, -math.inf))
            continue
        logs.append((
            sign * _sign(rp) ** r,
            log_sum + r * math.log(abs(rp)) - ln_gamma(r + 1),
        ))
    return logs


def coefficients_three_term(spec: WeightedSumSpec) -> PartialFractionExpansion:
    """
    Closed-form coefficients for three terms with a common even dof.

    Binomial and rising-factorial factors come from ln_gamma so each summand
    stays in log space; the k-sum is a signed log-sum-exp.
    """
    dof = _check_common_dof(spec, 3)
    m = dof // 2
    w1, w2, w3 = spec.weights
    groups = (
        PoleGroup(w1, m, _exponentiate(_three_term_logs(w1, w2, w3, m))),
        PoleGroup(w2, m, _exponentiate(_three_term_logs(w2, w1, w3, m))),
        PoleGroup(w3, m, _exponentiate(_three_term_logs(w3, w1, w2, m))),
    )
    return PartialFractionExpansion(groups, ill_conditioned=_is_ill_conditioned(spec.weights))


def _taylor_of_exp(power_sums: Sequence, count: int, one) -> List:
    """
    Taylor coefficients h_0..h_{count-1} of exp(L(s)) with L(0) = 0, given
    power_sums[q - 1] = q * [s^q] L.

    This is the Leibniz convolution g^(r) = sum_{s<r} C(r-1, s) L^(r-s) g^(s)
    with every derivative divided by its factorial.
    """
    h = [one]
    for r in range(1, count):
        acc = 0 * one
        for q in range(1, r + 1):
            acc += power_sums[q - 1] * h[r - q]
        h.append(acc / r)
    return h


def _general_group_logs(weights: Sequence[float], orders: Sequence[int], k: int) -> List[SignedLog]:
    """
    Coefficients of the pole at weights[k] in double precision, as signed logs.

    Around the pole put s = 1 - 2 w_k t. Each other factor becomes
    (1 - rho_j)^(-m_j) (1 + c_j s)^(-m_j) with rho_j = w_j / w_k and
    c_j = rho_j / (1 - rho_j), so the remaining product g has

        log g = sum_j -m_j log(1 - rho_j) - m_j log(1 + c_j s)

    whose s^q coefficient times q is sum_j m_j (-c_j)^q. The coefficient of
    s^(-(m_k - r)) is the s^r Taylor coefficient of g, which equals the
    residue formula ((-2 w_k)^(-r) / r!) g^(r)(1 / (2 w_k)). Powers of c are
    rescaled by max|c_j| to keep the recurrence in range.
    """
    own = weights[k]
    m = orders[k]
    log_g0 = 0.0
    sign_g0 = 1
    cs, ms = [], []
    for j, (w, order) in enumerate(zip(weights, orders)):
        if j == k:
            continue
        rho = w / own
        gap = 1.0 - rho
        log_g0 -= order * math.log(abs(gap))
        sign_g0 *= _sign(gap) ** order
        cs.append(rho / gap)
        ms.append(order)
    if m == 1 or not cs:
        return [(sign_g0, log_g0)] + [(0, -math.inf)] * (m - 1)

    scale = max(abs(c) for c in cs)
    log_scale = math.log(scale)
    power_sums = [
        math.fsum(order * (-c / scale) ** q for c, order in zip(cs, ms))
        for q in range(1, m)
    ]
    h = _taylor_of_exp(power_sums, m, 1.0)
    logs = []
    for r, value in enumerate(h):
        if value == 0.0:
            logs.append((0, -math.inf))
        else:
            logs.append((sign_g0 * _sign(value), log_g0 + r * log_scale + math.log(abs(value))))
    return logs


def _general_group_mp(weights: Sequence[float], orders: Sequence[int], k: int) -> Tuple:
    """Same recurrence as _general_group_logs in the current mpmath precision."""
    own = mpmath.mpf(weights[k])
    m = orders[k]
    g0 = mpmath.mpf(1)
    cs, ms = [], []
    for j, (w, order) in enumerate(zip(weights, orders)):
        if j == k:
            continue
        rho = mpmath.mpf(w) / own
        gap = 1 - rho
        g0 *= gap ** (-order)
        cs.append(rho / gap)
        ms.append(order)
    power_sums = [
        mpmath.fsum(order * (-c) ** q for c, order in zip(cs, ms))
        for q in range(1, m)
    ]
    h = _taylor_of_exp(power_sums, m, mpmath.mpf(1))
    return tuple(g0 * value for value in h)


def coefficients_general(spec: WeightedSumSpec, dps: Optional[int] = None) -> PartialFractionExpansion:
    """
    Residue coefficients for any number of terms and unequal even dofs.

    Args:
        spec: A spec whose weights are pairwise distinct (see merge_weights).
        dps: When given, compute in mpmath with this many decimal digits and
            keep the coefficients as mpmath numbers.

    Raises:
        CoincidentPolesError: two weights coincide.
        CoefficientOverflowError: a double-precision coefficient overflows.
    """
    weights = spec.weights
    orders = [t.order for t in spec.terms]
    _require_distinct(weights)
    ill = _is_ill_conditioned(weights)

    if dps is not None:
        with mpmath.workdps(dps):
            groups = tuple(
                PoleGroup(w, m, _general_group_mp(weights, orders, k))
                for k, (w, m) in enumerate(zip(weights, orders))
            )
        return PartialFractionExpansion(groups, ill_conditioned=ill, working_dps=dps)

    groups = tuple(
        PoleGroup(w, m, _exponentiate(_general_group_logs(weights, orders, k)))
        for k, (w, m) in enumerate(zip(weights, orders))
    )
    return PartialFractionExpansion(groups, ill_conditioned=ill)


def _log_amplification(spec: WeightedSumSpec, method: str) -> float:
    """log of sum |c| for the double-precision expansion, computed in log space."""
    weights = spec.weights
    orders = [t.order for t in spec.terms]
    if method == "closed_form":
        m = orders[0]
        if len(weights) == 2:
            w1, w2 = weights
            logs = _two_term_logs(w1, w2, m) + _two_term_logs(w2, w1, m)
        else:
            w1, w2, w3 = weights
            logs = (
                _three_term_logs(w1, w2, w3, m)
                + _three_term_logs(w2, w1, w3, m)
                + _three_term_logs(w3, w1, w2, m)
            )
    else:
        logs = [
            part
            for k in range(len(weights))
            for part in _general_group_logs(weights, orders, k)
        ]
    return _signed_log_sum([(1, v) for s, v in logs if s != 0])[1]


def _log_amplification_mp(spec: WeightedSumSpec, dps: int = 30) -> float:
    """log of sum |c| from the mpmath recurrence, for orders whose double recurrence overflows."""
    weights = spec.weights
    orders = [t.order for t in spec.terms]
    with mpmath.workdps(dps):
        total = mpmath.fsum(
            abs(c)
            for k in range(len(weights))
            for c in _general_group_mp(weights, orders, k)
        )
        return float(mpmath.log(total))


def _resolve_method(spec: WeightedSumSpec, method: str) -> str:
    if method not in ("auto", "closed_form", "general"):
        raise SpecError(f"unknown decomposition method {method!r}")
    closed_ok = len(spec.terms) in (2, 3) and spec.common_dof is not None
    if method == "closed_form" and not closed_ok:
        raise SpecError("closed forms need two or three terms with a common dof")
    if method == "auto":
        return "closed_form" if closed_ok else "general"
    return method


@lru_cache(maxsize=256)
def expand(
    spec: WeightedSumSpec,
    merge_tol: float = DEFAULT_MERGE_TOL,
    method: str = "auto",
) -> PartialFractionExpansion:
    """
    Merge coincident weights and decompose the MGF.

    Uses the closed forms for two or three terms with a common dof and the
    general routine otherwise. When the coefficients' absolute sum exceeds
    ESCALATION_AMPLIFICATION the expansion is recomputed by the general
    routine in mpmath with enough digits to absorb the cancellation, and
    carries that precision in working_dps.
    """
    merged = merge_weights(spec, merge_tol)
    method = _resolve_method(merged, method)
    ill = _is_ill_conditioned(merged.weights)
    if ill:
        logger.warning(
            "weights %s are within %.0e of each other; expansion is ill-conditioned",
            merged.weights, ILL_CONDITIONED_SEPARATION,
        )

    log_amp = _log_amplification(merged, method)
    if log_amp <= math.log(ESCALATION_AMPLIFICATION):
        if method == "closed_form":
            if len(merged.terms) == 2:
                return coefficients_two_term(merged)
            return coefficients_three_term(merged)
        return coefficients_general(merged)

    if not math.isfinite(log_amp):
        log_amp = _log_amplification_mp(merged)
    digits = math.ceil(log_amp / math.log(10.0))
    dps = 20 + 2 * digits
    logger.debug(
        "coefficient magnitudes sum to ~1e%d for %s; evaluating with %d digits",
        digits, merged.weights, dps,
    )
    return coefficients_general(merged, dps=dps)


def reconstruct_mgf(expansion: PartialFractionExpansion, t: float) -> float:
    """
    Right-hand side of the decomposition:
    sum_k sum_i c_{k,i} (1 - 2 w_k t)^(-(order_k - i + 1)).

    Raises:
        DomainError: if some 1 - 2 w_k t <= 0.
    """
    for g in expansion.groups:
        if not 1.0 - 2.0 * g.weight * t > 0.0:
            raise DomainError(f"t={t!r} is at or beyond the pole at weight {g.weight!r}")

    if expansion.working_dps is not None:
        with mpmath.workdps(expansion.working_dps):
            tm = mpmath.mpf(t)
            total = mpmath.fsum(
                c * (1 - 2 * mpmath.mpf(g.weight) * tm) ** (-g.exponent(i))
                for g in expansion.groups
                for i, c in enumerate(g.coeffs, start=1)
            )
            return float(total)

    return math.fsum(
        c * (1.0 - 2.0 * g.weight * t) ** (-g.exponent(i))
        for g in expansion.groups
        for i, c in enumerate(g.coeffs, start=1)
    )
