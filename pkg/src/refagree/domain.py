"""Domain model for institution-level research assessment data.

One :class:`SubmissionRecord` holds the peer-review and citation figures of a
single institution submission within one unit of assessment (UoA): the number
of outputs submitted to review, how many were matched in the citation
database, the proportion awarded four stars, and how many matched outputs sit
in the top 10% most cited of their field and year.  Records are grouped per
UoA into :class:`UoaDataset` objects.

All types are immutable after construction and safe to share between workers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, TextIO

from .errors import ValidationError

BASE_COLUMNS = (
    "uoa_id",
    "uoa_name",
    "institution",
    "submission_label",
    "n_outputs",
    "n_matched",
    "pp_4star",
    "n_top10",
)
STAR_COLUMNS = ("pp_3star", "pp_2star", "pp_1star")

# Published star profiles are rounded percentages, so the profile sum may
# exceed 1 by rounding noise.
_PROFILE_SUM_TOL = 1e-6


@dataclass(frozen=True)
class SubmissionRecord:
    """One institution submission in one unit of assessment.

    ``pp_4star`` is kept as the published proportion rather than being
    reconstructed from integer star counts; the total ``pp_4star * n_outputs``
    may therefore be non-integral.  The optional 3*/2*/1* proportions are
    validated but unused by any computation.
    """

    institution: str
    n_outputs: int
    n_matched: int
    pp_4star: float
    n_top10: int
    submission_label: str = ""
    pp_3star: float | None = None
    pp_2star: float | None = None
    pp_1star: float | None = None

    def __post_init__(self) -> None:
        if not self.institution:
            raise ValidationError("institution must be a non-empty string")
        for name in ("n_outputs", "n_matched", "n_top10"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValidationError(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise ValidationError(f"{name} must be nonnegative, got {value}")
        if self.n_matched > self.n_outputs:
            raise ValidationError(
                f"n_matched ({self.n_matched}) exceeds n_outputs ({self.n_outputs})"
            )
        if self.n_top10 > self.n_matched:
            raise ValidationError(
                f"n_top10 ({self.n_top10}) exceeds n_matched ({self.n_matched})"
            )
        if not 0.0 <= self.pp_4star <= 1.0:
            raise ValidationError(f"pp_4star must lie in [0, 1], got {self.pp_4star}")
        profile_sum = self.pp_4star
        for name in STAR_COLUMNS:
            value = getattr(self, name)
            if value is None:
                continue
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {value}")
            profile_sum += value
        if profile_sum > 1.0 + _PROFILE_SUM_TOL:
            raise ValidationError(
                f"star profile proportions sum to {profile_sum}, above 1"
            )

    @property
    def key(self) -> tuple[str, str]:
        return (self.institution, self.submission_label)


@dataclass(frozen=True)
class UoaDataset:
    """All submission records of one unit of assessment."""

    uoa_id: int
    uoa_name: str
    records: tuple[SubmissionRecord, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.uoa_id, int) or self.uoa_id < 1:
            raise ValidationError(f"uoa_id must be a positive integer, got {self.uoa_id!r}")
        object.__setattr__(self, "records", tuple(self.records))
        if not self.records:
            raise ValidationError(f"UoA {self.uoa_id}: dataset has no records")
        seen: set[tuple[str, str]] = set()
        for record in self.records:
            if record.key in seen:
                raise ValidationError(
                    f"UoA {self.uoa_id}: duplicate submission "
                    f"{record.institution!r}/{record.submission_label!r}"
                )
            seen.add(record.key)

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class DerivedQuantities:
    """Headline quantities derived from one record.

    ``pp_top10`` is None exactly when no output was matched; ``p_top10``
    equals ``n_top10`` by construction (the proportion times the matched
    count cancels exactly).
    """

    pp_top10: float | None
    p_4star: float
    p_top10: float
    wos_coverage: float


def derive(record: SubmissionRecord) -> DerivedQuantities:
    """Compute the headline quantities for one record; total and never failing."""
    if record.n_matched > 0:
        pp_top10 = record.n_top10 / record.n_matched
    else:
        pp_top10 = None
    coverage = record.n_matched / record.n_outputs if record.n_outputs > 0 else 0.0
    return DerivedQuantities(
        pp_top10=pp_top10,
        p_4star=record.pp_4star * record.n_outputs,
        p_top10=float(record.n_top10),
        wos_coverage=coverage,
    )


def filter_evaluable(dataset: UoaDataset) -> tuple[UoaDataset, int]:
    """Drop records that carry no citation signal (no matched outputs).

    Returns the filtered dataset and the number of excluded records.  Raises
    :class:`ValidationError` when nothing remains.
    """
    kept = tuple(r for r in dataset.records if r.n_matched > 0 and r.n_outputs > 0)
    excluded = len(dataset.records) - len(kept)
    if not kept:
        raise ValidationError(f"UoA {dataset.uoa_id}: no evaluable records")
    if excluded == 0:
        return dataset, 0
    return replace(dataset, records=kept), excluded


def _parse_int(raw: str, column: str, line_no: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(
            f"row {line_no}: invalid integer for {column}: {raw!r}"
        ) from None


def _parse_float(raw: str, column: str, line_no: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(
            f"row {line_no}: invalid number for {column}: {raw!r}"
        ) from None


def _parse_optional_float(raw: str, column: str, line_no: int) -> float | None:
    if raw == "":
        return None
    return _parse_float(raw, column, line_no)


def read_datasets(stream: Iterable[str]) -> list[UoaDataset]:
    """Parse a CSV stream into one dataset per uoa_id, preserving row order.

    The header must name exactly the base columns, optionally followed by the
    three extra star-profile columns.  Every error message carries the
    physical line number of the offending row (the header is line 1).
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("empty input: missing header row") from None
    if tuple(header) == BASE_COLUMNS:
        with_stars = False
    elif tuple(header) == BASE_COLUMNS + STAR_COLUMNS:
        with_stars = True
    else:
        raise ValidationError(
            f"unexpected header {header!r}; expected {','.join(BASE_COLUMNS)}"
            f"[,{','.join(STAR_COLUMNS)}]"
        )
    expected_len = len(header)

    names: dict[int, str] = {}
    grouped: dict[int, list[SubmissionRecord]] = {}
    seen: set[tuple[int, str, str]] = set()
    for line_no, row in enumerate(reader, start=2):
        if len(row) != expected_len:
            raise ValidationError(
                f"row {line_no}: expected {expected_len} columns, got {len(row)}"
            )
        uoa_id = _parse_int(row[0], "uoa_id", line_no)
        uoa_name = row[1]
        stars: dict[str, float | None] = {}
        if with_stars:
            for offset, column in enumerate(STAR_COLUMNS):
                stars[column] = _parse_optional_float(row[8 + offset], column, line_no)
        try:
            record = SubmissionRecord(
                institution=row[2],
                submission_label=row[3],
                n_outputs=_parse_int(row[4], "n_outputs", line_no),
                n_matched=_parse_int(row[5], "n_matched", line_no),
                pp_4star=_parse_float(row[6], "pp_4star", line_no),
                n_top10=_parse_int(row[7], "n_top10", line_no),
                **stars,
            )
        except ValidationError as exc:
            raise ValidationError(f"row {line_no}: {exc}") from None
        if uoa_id < 1:
            raise ValidationError(f"row {line_no}: uoa_id must be positive")
        if uoa_id in names and names[uoa_id] != uoa_name:
            raise ValidationError(
                f"row {line_no}: uoa_id {uoa_id} renamed from "
                f"{names[uoa_id]!r} to {uoa_name!r}"
            )
        key = (uoa_id, record.institution, record.submission_label)
        if key in seen:
            raise ValidationError(
                f"row {line_no}: duplicate submission "
                f"{record.institution!r}/{record.submission_label!r} in UoA {uoa_id}"
            )
        seen.add(key)
        names.setdefault(uoa_id, uoa_name)
        grouped.setdefault(uoa_id, []).append(record)

    return [
        UoaDataset(uoa_id=uoa_id, uoa_name=names[uoa_id], records=tuple(records))
        for uoa_id, records in grouped.items()
    ]


def parse_dataset(stream: Iterable[str]) -> UoaDataset:
    """Parse a CSV stream that must contain exactly one unit of assessment."""
    datasets = read_datasets(stream)
    if not datasets:
        raise ValidationError("input contains no data rows")
    if len(datasets) > 1:
        ids = ", ".join(str(d.uoa_id) for d in datasets)
        raise ValidationError(f"expected a single UoA, found several: {ids}")
    return datasets[0]


def load_datasets(path: str | Path) -> list[UoaDataset]:
    with open(path, encoding="utf-8", newline="") as handle:
        return read_datasets(handle)


def _format_optional(value: float | None) -> str:
    return "" if value is None else repr(value)


def write_datasets(datasets: Iterable[UoaDataset], stream: TextIO) -> None:
    """Serialize datasets to CSV; floats use repr so parsing round-trips exactly."""
    datasets = list(datasets)
    with_stars = any(
        getattr(record, column) is not None
        for dataset in datasets
        for record in dataset.records
        for column in STAR_COLUMNS
    )
    header = BASE_COLUMNS + STAR_COLUMNS if with_stars else BASE_COLUMNS
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for dataset in datasets:
        for record in dataset.records:
            row = [
                str(dataset.uoa_id),
                dataset.uoa_name,
                record.institution,
                record.submission_label,
                str(record.n_outputs),
                str(record.n_matched),
                repr(record.pp_4star),
                str(record.n_top10),
            ]
            if with_stars:
                row.extend(
                    _format_optional(getattr(record, column)) for column in STAR_COLUMNS
                )
            writer.writerow(row)


def datasets_to_csv(datasets: Iterable[UoaDataset]) -> str:
    import io

    buffer = io.StringIO()
    write_datasets(datasets, buffer)
    return buffer.getvalue()
