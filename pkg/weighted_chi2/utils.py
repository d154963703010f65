import math
from typing import Iterable, List, Sequence, TextIO, Tuple

from .errors import SpecError


def format_float(value: float) -> str:
    """17 significant digits: enough for a lossless double round trip."""
    return f"{float(value):.17g}"


def clamp_probability(value: float) -> float:
    return min(1.0, max(0.0, value))


def write_csv(header: Sequence[str], rows: Iterable[Sequence], file: TextIO):
    print(",".join(header), file=file)
    for row in rows:
        print(
            ",".join(format_float(v) if isinstance(v, float) else str(v) for v in row),
            file=file,
        )
    file.flush()


def read_csv(file: TextIO) -> Tuple[List[str], List[List[float]]]:
    """Inverse of write_csv for numeric tables; '#' lines are skipped."""
    lines = [line.strip() for line in file if line.strip() and not line.startswith("#")]
    header = lines[0].split(",")
    return header, [[float(v) for v in line.split(",")] for line in lines[1:]]


def parse_float_list(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise SpecError(f"expected comma-separated numbers, got {text!r}") from e
    if not values:
        raise SpecError("expected at least one number")
    return values


def parse_int_list(text: str) -> List[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise SpecError(f"expected comma-separated integers, got {text!r}") from e
    if not values:
        raise SpecError("expected at least one integer")
    return values


def parse_grid(text: str) -> List[float]:
    """'min:max:points' -> equally spaced grid including both ends."""
    parts = text.split(":")
    if len(parts) != 3:
        raise SpecError(f"grid must look like min:max:points, got {text!r}")
    try:
        lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise SpecError(f"grid must look like min:max:points, got {text!r}") from e
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise SpecError(f"grid bounds must be finite with min < max, got {text!r}")
    if points < 2:
        raise SpecError(f"grid needs at least 2 points, got {points}")
    step = (hi - lo) / (points - 1)
    return [lo + i * step for i in range(points - 1)] + [hi]
