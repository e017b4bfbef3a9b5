"""Data model and I/O: hypotheses, p-value vectors, file loading.

Input files come in two shapes. CSV has a header row ``id,p`` or
``id,p,family`` and allows ``#`` comment lines; JSON is an array of objects
with keys ``id``, ``p`` and optional ``family``. Hypotheses without an
explicit family land in the implicit one, DEFAULT_FAMILY.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .combine import COMBINER_NAMES

DEFAULT_FAMILY = "_default"


class ValidationError(ValueError):
    """Bad user input: malformed file, out-of-range value, unknown id."""


@dataclass(frozen=True)
class Hypothesis:
    """One elementary null hypothesis with its observed p-value."""

    id: str
    p: float
    family: str = DEFAULT_FAMILY

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError(f"hypothesis id must be a non-empty string, got {self.id!r}")
        if isinstance(self.p, bool) or not isinstance(self.p, (int, float)):
            raise ValidationError(f"p-value for id {self.id!r} must be a number, got {self.p!r}")
        object.__setattr__(self, "p", float(self.p))
        if math.isnan(self.p) or not (0.0 <= self.p <= 1.0):
            raise ValidationError(f"p-value for id {self.id!r} outside [0, 1]: {self.p!r}")
        if not isinstance(self.family, str) or not self.family:
            raise ValidationError(f"family for id {self.id!r} must be a non-empty string")


@dataclass(frozen=True)
class PValueVector:
    """An ordered collection of hypotheses with unique ids."""

    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        if not self.hypotheses:
            raise ValidationError("need at least one hypothesis")
        seen: set[str] = set()
        for h in self.hypotheses:
            if h.id in seen:
                raise ValidationError(f"duplicate id {h.id!r}")
            seen.add(h.id)

    @property
    def n(self) -> int:
        return len(self.hypotheses)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(h.id for h in self.hypotheses)

    @property
    def ps(self) -> tuple[float, ...]:
        return tuple(h.p for h in self.hypotheses)

    def sorted_hypotheses(self) -> list[Hypothesis]:
        # Ties in p broken by id, ascending, so ranks are deterministic.
        return sorted(self.hypotheses, key=lambda h: (h.p, h.id))

    def sorted_view(self) -> list[tuple[int, Hypothesis]]:
        """Hypotheses in ascending p order, paired with 1-based rank."""
        return list(enumerate(self.sorted_hypotheses(), start=1))

    def sorted_ps(self) -> list[float]:
        return [h.p for h in self.sorted_hypotheses()]

    def subset(self, ids: Sequence[str]) -> "PValueVector":
        """The sub-vector for the given ids, in this vector's order."""
        wanted = set(resolve_selection(self, ids))
        return PValueVector(tuple(h for h in self.hypotheses if h.id in wanted))

    def by_family(self) -> dict[str, "PValueVector"]:
        groups: dict[str, list[Hypothesis]] = {}
        for h in self.hypotheses:
            groups.setdefault(h.family, []).append(h)
        return {fam: PValueVector(tuple(hs)) for fam, hs in groups.items()}


@dataclass(frozen=True)
class AnalysisConfig:
    """Significance level and combining method for one analysis."""

    alpha: float = 0.05
    combiner: str = "fisher"

    def __post_init__(self):
        if isinstance(self.alpha, bool) or not isinstance(self.alpha, (int, float)):
            raise ValidationError(f"alpha must be a number, got {self.alpha!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        if math.isnan(self.alpha) or not (0.0 < self.alpha < 1.0):
            raise ValidationError(f"alpha must be strictly inside (0, 1), got {self.alpha!r}")
        if self.combiner not in COMBINER_NAMES:
            raise ValidationError(
                f"unknown combiner {self.combiner!r}; choose one of {', '.join(COMBINER_NAMES)}"
            )


@dataclass(frozen=True)
class SelectionSet:
    """A non-empty set of hypothesis ids chosen after seeing the data."""

    ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        if not self.ids:
            raise ValidationError("selection must contain at least one id")
        seen: set[str] = set()
        for i in self.ids:
            if not isinstance(i, str) or not i:
                raise ValidationError(f"selection id must be a non-empty string, got {i!r}")
            if i in seen:
                raise ValidationError(f"duplicate id {i!r} in selection")
            seen.add(i)


def resolve_selection(vector: PValueVector, ids: Iterable[str]) -> tuple[str, ...]:
    """Validate that every selected id exists in the vector.

    Returns the ids as a tuple in the order given. Unknown ids raise with
    all offenders named.
    """
    selection = SelectionSet(tuple(ids))
    known = set(vector.ids)
    unknown = [i for i in selection.ids if i not in known]
    if unknown:
        raise ValidationError(f"unknown id(s) in selection: {', '.join(sorted(unknown))}")
    return selection.ids


def _warn_zero_ps(hypotheses: Sequence[Hypothesis]) -> None:
    zero = [h.id for h in hypotheses if h.p == 0.0]
    if zero:
        warnings.warn(
            f"p-value is exactly 0 for: {', '.join(zero)}; "
            "combined values degenerate to 0",
            UserWarning,
            stacklevel=3,
        )


def _load_csv(text: str) -> PValueVector:
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        (fields,) = csv.reader([line])
        rows.append((lineno, [f.strip() for f in fields]))
    if not rows:
        raise ValidationError("no data rows found")
    header_line, header = rows[0]
    lowered = [h.lower() for h in header]
    if lowered not in (["id", "p"], ["id", "p", "family"]):
        raise ValidationError(
            f"line {header_line}: header must be 'id,p' or 'id,p,family', got {','.join(header)!r}"
        )
    width = len(header)
    hypotheses: list[Hypothesis] = []
    for lineno, fields in rows[1:]:
        if len(fields) != width:
            raise ValidationError(
                f"line {lineno}: expected {width} fields, got {len(fields)}"
            )
        hid = fields[0]
        try:
            p = float(fields[1])
        except ValueError:
            raise ValidationError(
                f"line {lineno}: p-value for id {hid!r} is not a number: {fields[1]!r}"
            ) from None
        family = fields[2] if width == 3 else DEFAULT_FAMILY
        try:
            hypotheses.append(Hypothesis(hid, p, family))
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    if not hypotheses:
        raise ValidationError("no data rows found")
    return PValueVector(tuple(hypotheses))


def _load_json(text: str) -> PValueVector:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ValidationError("JSON input must be an array of objects")
    hypotheses: list[Hypothesis] = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise ValidationError(f"entry {i}: expected an object, got {type(entry).__name__}")
        extra = set(entry) - {"id", "p", "family"}
        if extra:
            raise ValidationError(f"entry {i}: unknown key(s): {', '.join(sorted(extra))}")
        if "id" not in entry or "p" not in entry:
            raise ValidationError(f"entry {i}: 'id' and 'p' are required")
        try:
            hypotheses.append(
                Hypothesis(entry["id"], entry["p"], entry.get("family", DEFAULT_FAMILY))
            )
        except ValidationError as exc:
            raise ValidationError(f"entry {i}: {exc}") from None
    if not hypotheses:
        raise ValidationError("JSON input contains no hypotheses")
    return PValueVector(tuple(hypotheses))


def load_pvalues(path: str | Path, fmt: str | None = None) -> PValueVector:
    """Load a p-value vector from a CSV or JSON file.

    The format is inferred from the file suffix unless ``fmt`` is given
    ('csv' | 'json'). Zero p-values are accepted with a warning.
    """
    path = Path(path)
    if fmt is None:
        suffix = path.suffix.lower()
        if suffix == ".json":
            fmt = "json"
        else:
            fmt = "csv"
    if fmt not in ("csv", "json"):
        raise ValidationError(f"unknown format {fmt!r}; choose 'csv' or 'json'")
    text = path.read_text(encoding="utf-8")
    vector = _load_json(text) if fmt == "json" else _load_csv(text)
    _warn_zero_ps(vector.hypotheses)
    return vector


def parse_pvalues(records: Iterable[dict]) -> PValueVector:
    """Build a vector from already-decoded records (the service path)."""
    hypotheses = []
    for i, entry in enumerate(records):
        if not isinstance(entry, dict):
            raise ValidationError(f"entry {i}: expected an object")
        family = entry.get("family")
        if family is None:
            family = DEFAULT_FAMILY
        try:
            hypotheses.append(Hypothesis(entry.get("id"), entry.get("p"), family))
        except ValidationError as exc:
            raise ValidationError(f"entry {i}: {exc}") from None
    if not hypotheses:
        raise ValidationError("need at least one hypothesis")
    vector = PValueVector(tuple(hypotheses))
    _warn_zero_ps(vector.hypotheses)
    return vector


def write_pvalues(vector: PValueVector, path: str | Path) -> None:
    """Write a vector back out as CSV, preserving float round-trip."""
    path = Path(path)
    with_family = any(h.family != DEFAULT_FAMILY for h in vector.hypotheses)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "p", "family"] if with_family else ["id", "p"])
        for h in vector.hypotheses:
            row = [h.id, repr(h.p)]
            if with_family:
                row.append(h.family)
            writer.writerow(row)
