"""
Weighted Chi-Squared Sum Model

Represents X = sum_j weight_j * chi2(dof_j) for independent central
chi-squared variables with nonzero real weights and even degrees of freedom,
and evaluates its moment generating function, characteristic function,
moments and MGF existence interval.
"""

import json
import math
from dataclasses import dataclass
from numbers import Integral, Real
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, SpecError


@dataclass(frozen=True)
class Term:
    """One weighted chi-squared variate."""
    weight: float
    dof: int

    def __post_init__(self):
        weight = self.weight
        if isinstance(weight, bool) or not isinstance(weight, Real):
            raise SpecError(f"weight must be a real number, got {weight!r}")
        weight = float(weight)
        if not math.isfinite(weight) or weight == 0.0:
            raise SpecError(f"weight must be finite and nonzero, got {weight!r}")

        dof = self.dof
        if isinstance(dof, bool):
            raise SpecError(f"dof must be an integer, got {dof!r}")
        if isinstance(dof, Real) and not isinstance(dof, Integral):
            if not (math.isfinite(dof) and float(dof).is_integer()):
                raise SpecError(f"dof must be an integer, got {dof!r}")
        elif not isinstance(dof, Integral):
            raise SpecError(f"dof must be an integer, got {dof!r}")
        dof = int(dof)
        if dof < 2 or dof % 2:
            raise SpecError(f"dof must be a positive even integer, got {dof}")

        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "dof", dof)

    @property
    def order(self) -> int:
        """Pole order dof / 2 of this term's MGF factor."""
        return self.dof // 2


@dataclass(frozen=True)
class WeightedSumSpec:
    """Ordered, immutable list of terms defining the weighted sum."""
    terms: Tuple[Term, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise SpecError("a weighted sum needs at least one term")
        if not all(isinstance(term, Term) for term in terms):
            raise SpecError("terms must be Term instances")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_pairs(cls, weights: Sequence[float], dofs: Union[int, Sequence[int]]) -> "WeightedSumSpec":
        """
        Build a spec from parallel weight and dof lists.

        Args:
            weights: Term weights.
            dofs: A common dof for every term, or one dof per weight.
        """
        weights = list(weights)
        if isinstance(dofs, (Integral, Real)) and not isinstance(dofs, bool):
            dofs = [dofs] * len(weights)
        dofs = list(dofs)
        if len(dofs) != len(weights):
            raise SpecError(
                f"got {len(weights)} weights but {len(dofs)} degrees of freedom"
            )
        return cls(tuple(Term(w, n) for w, n in zip(weights, dofs)))

    @classmethod
    def from_dict(cls, data: dict) -> "WeightedSumSpec":
        """Create a spec from a {"terms": [{"weight": w, "dof": n}, ...]} mapping."""
        if not isinstance(data, dict) or not isinstance(data.get("terms"), list):
            raise SpecError('spec document must be an object with a "terms" list')
        terms = []
        for i, item in enumerate(data["terms"]):
            if not isinstance(item, dict) or "weight" not in item or "dof" not in item:
                raise SpecError(f'term {i} must have "weight" and "dof" fields')
            terms.append(Term(item["weight"], item["dof"]))
        return cls(tuple(terms))

    @classmethod
    def from_json(cls, path: str) -> "WeightedSumSpec":
        """Load a spec from a JSON file."""
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise SpecError(f"{path}: not valid JSON ({e})") from e
        except UnicodeDecodeError as e:
            raise SpecError(f"{path}: not UTF-8 text ({e.reason} at byte {e.start})") from e
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {"terms": [{"weight": t.weight, "dof": t.dof} for t in self.terms]}

    def to_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)

    @property
    def weights(self) -> List[float]:
        return [t.weight for t in self.terms]

    @property
    def dofs(self) -> List[int]:
        return [t.dof for t in self.terms]

    @property
    def total_order(self) -> int:
        """Sum of dof / 2 over all terms."""
        return sum(t.order for t in self.terms)

    @property
    def common_dof(self) -> Union[int, None]:
        """The shared dof when all terms have the same one, else None."""
        dofs = set(self.dofs)
        return dofs.pop() if len(dofs) == 1 else None


@dataclass(frozen=True)
class MgfDomain:
    """Open interval (lower, upper) of t where every 1 - 2*weight*t > 0."""
    lower: float
    upper: float

    def __contains__(self, t: float) -> bool:
        return self.lower < t < self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


def mgf_domain(spec: WeightedSumSpec) -> MgfDomain:
    """Existence interval of the MGF."""
    positive = [t.weight for t in spec.terms if t.weight > 0]
    negative = [t.weight for t in spec.terms if t.weight < 0]
    upper = min(1.0 / (2.0 * w) for w in positive) if positive else math.inf
    lower = max(1.0 / (2.0 * w) for w in negative) if negative else -math.inf
    return MgfDomain(lower, upper)


def log_mgf(spec: WeightedSumSpec, t: float) -> float:
    """log M(t) = sum_j -(dof_j / 2) * log(1 - 2 weight_j t)."""
    if not math.isfinite(t) or t not in mgf_domain(spec):
        raise DomainError(f"t={t!r} is outside the MGF domain {mgf_domain(spec)}")
    return math.fsum(-term.order * math.log1p(-2.0 * term.weight * t) for term in spec.terms)


def mgf(spec: WeightedSumSpec, t: float) -> float:
    """
    Moment generating function prod_j (1 - 2 weight_j t)^(-dof_j / 2).

    Evaluated in log space and exponentiated once.

    Raises:
        DomainError: if t is not strictly inside mgf_domain(spec).
    """
    return math.exp(log_mgf(spec, t))


def characteristic_function(spec: WeightedSumSpec, u: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    Characteristic function prod_j (1 - 2i weight_j u)^(-dof_j / 2).

    Pole orders are integers, so the principal branch is unambiguous; the
    value is assembled from modulus prod_j (1 + 4 weight_j^2 u^2)^(-dof_j / 4)
    and phase sum_j (dof_j / 2) atan(2 weight_j u). Accepts scalars or arrays.
    """
    u_arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u_arr)):
        raise DomainError("characteristic function argument must be finite")
    log_modulus = np.zeros_like(u_arr)
    phase = np.zeros_like(u_arr)
    for term in spec.terms:
        scaled = 2.0 * term.weight * u_arr
        log_modulus -= 0.5 * term.order * np.log1p(scaled * scaled)
        phase += term.order * np.arctan(scaled)
    value = np.exp(log_modulus) * np.exp(1j * phase)
    if np.ndim(u) == 0:
        return complex(value)
    return value


def mean_variance(spec: WeightedSumSpec) -> Tuple[float, float]:
    """Mean sum(dof * weight) and variance sum(2 * dof * weight^2)."""
    mean = math.fsum(t.dof * t.weight for t in spec.terms)
    variance = math.fsum(2.0 * t.dof * t.weight * t.weight for t in spec.terms)
    return mean, variance


def standard_deviation(spec: WeightedSumSpec) -> float:
    return math.sqrt(mean_variance(spec)[1])


def spec_from_terms(pairs: Iterable[Tuple[float, int]]) -> WeightedSumSpec:
    """Convenience constructor from (weight, dof) pairs."""
    return WeightedSumSpec(tuple(Term(w, n) for w, n in pairs))
