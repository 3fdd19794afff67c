"""Dataset loading and report serialisation.

CSV files use dot decimals and no thousands separators. Population columns
on input also accept European grouping, e.g. ``82.221.808``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import re
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

from .fairness import FairnessAssessment, assess
from .game import ConfigurationError, Council, CriterionKind, MemberState, SQRT_SCALE, VotingPowerError, member_weights
from .power import PowerReport
from .sweep import SweepResult, SweepRow, slice_optima

BUILTIN = {"eu27-2008": "eu27_2008.csv"}
DATA_DIR_ENV = "VOTINGPOWER_DATA_DIR"

_PLAIN_INT = re.compile(r"^\d+$")
_GROUPED_INT = re.compile(r"^\d{1,3}(\.\d{3})+$")


class DatasetError(ConfigurationError):
    """Malformed dataset file."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source:
            where += f"{source}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line


class ReportIOError(VotingPowerError, OSError):
    """Writing an output file failed."""


def parse_population(text: str) -> int:
    text = text.strip().replace(" ", "").replace("\u00a0", "")
    if _PLAIN_INT.match(text):
        return int(text)
    if _GROUPED_INT.match(text):
        return int(text.replace(".", ""))
    raise ValueError(f"not an integer population: {text!r}")


def parse_dataset(text: str, source: str = "<string>") -> Council:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [(i, r) for i, r in enumerate(rows, 1) if any(cell.strip() for cell in r)]
    if not rows:
        raise DatasetError("empty dataset", source=source)
    header_line, header = rows[0]
    header = [h.strip().lower() for h in header]
    if header[:3] != ["id", "name", "population"] or len(header) > 4 or (len(header) == 4 and header[3] != "nice_weight"):
        raise DatasetError("header must be id,name,population[,nice_weight]", header_line, source)
    if len(rows) == 1:
        raise DatasetError("dataset has a header but no members", header_line, source)
    members = []
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise DatasetError(f"expected {len(header)} fields, got {len(row)}", line, source)
        mid, name = row[0].strip(), row[1].strip()
        try:
            pop = parse_population(row[2])
        except ValueError as exc:
            raise DatasetError(f"member {mid}: {exc}", line, source) from None
        weight = None
        if len(header) == 4 and row[3].strip():
            try:
                weight = int(row[3].strip())
            except ValueError:
                raise DatasetError(f"member {mid}: bad nice_weight {row[3]!r}", line, source) from None
        try:
            members.append(MemberState(mid, name, pop, weight))
        except ConfigurationError as exc:
            raise DatasetError(str(exc), line, source) from None
    try:
        return Council(tuple(members))
    except ConfigurationError as exc:
        raise DatasetError(str(exc), source=source) from None


def load_dataset(source: Union[str, Path] = "eu27-2008") -> Council:
    """Load a builtin dataset by name, or a CSV file by path.

    Bare names are also looked up as ``<name>.csv`` in ``$VOTINGPOWER_DATA_DIR``.
    """
    name = str(source)
    if name in BUILTIN:
        text = resources.files("votingpower.data").joinpath(BUILTIN[name]).read_text(encoding="utf-8")
        return parse_dataset(text, name)
    path = Path(name)
    if not path.exists() and os.environ.get(DATA_DIR_ENV):
        candidate = Path(os.environ[DATA_DIR_ENV]) / (name if name.endswith(".csv") else f"{name}.csv")
        if candidate.exists():
            path = candidate
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DatasetError(f"no builtin dataset or file named {name!r}") from None
    except OSError as exc:
        raise ReportIOError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_dataset(text, str(path))


def dataset_csv(council: Council) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["id", "name", "population", "nice_weight"])
    for m in council.members:
        writer.writerow([m.id, m.name, m.population, "" if m.nice_weight is None else m.nice_weight])
    return out.getvalue()


# -- rendering --------------------------------------------------------------


def fixed(value: Fraction | float, places: int) -> str:
    """Round-half-even decimal rendering with exactly ``places`` digits."""
    if isinstance(value, Fraction):
        d = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        d = Decimal(repr(float(value)))
    return str(d.quantize(Decimal(1).scaleb(-places)))


def significant(value: Fraction | float, digits: int = 5) -> str:
    """Positional rendering with ``digits`` significant digits (no exponent)."""
    x = Fraction(value)
    if x == 0:
        return "0"
    d = Decimal(x.numerator) / Decimal(x.denominator)
    places = digits - 1 - d.adjusted()
    return fixed(x, max(places, 0))


def _rule_weight_column(report: PowerReport) -> list[str]:
    kinds = [c.kind for c in report.rule.criteria]
    for kind in (CriterionKind.NEGOTIATED_WEIGHT, CriterionKind.SQRT_WEIGHT, CriterionKind.POPULATION):
        if kind in kinds:
            w = member_weights(report.council, kind)
            if kind is CriterionKind.SQRT_WEIGHT:
                return [fixed(Fraction(x, SQRT_SCALE), 4) for x in w]
            return [str(x) for x in w]
    return ["1"] * report.council.n


def power_report_rows(report: PowerReport) -> list[list[str]]:
    rows = [["member_id", "population", "weight", "TB", "NB", "beta_percent"]]
    tb = report.total_banzhaf
    weights = _rule_weight_column(report)
    for i, m in enumerate(report.council.members):
        rows.append(
            [
                m.id,
                str(m.population),
                weights[i],
                str(tb[i]) if tb is not None else "",
                fixed(report.normalized_banzhaf[i], 10),
                fixed(report.banzhaf_index[i] * 100, 6),
            ]
        )
    return rows


def power_report_dict(report: PowerReport) -> dict:
    members = []
    for i, m in enumerate(report.council.members):
        entry = {
            "id": m.id,
            "population": m.population,
            "TB": report.total_banzhaf[i] if report.exact else None,
            "NB": float(report.normalized_banzhaf[i]),
            "beta": float(report.banzhaf_index[i]),
        }
        if report.mc_stderr is not None:
            entry["NB_stderr"] = report.mc_stderr[i]
            entry["beta_stderr"] = report.beta_stderr[i]
        members.append(entry)
    eff = report.efficiency
    d = {
        "rule": report.rule.to_dict(),
        "backend": report.backend.value,
        "efficiency": float(eff),
        "efficiency_exact": f"{eff.numerator}/{eff.denominator}",
        "winning": report.winning,
        "members": members,
    }
    if not report.exact:
        d["samples"] = report.samples
        d["efficiency_stderr"] = report.efficiency_stderr
    return d


def assessment_rows(a: FairnessAssessment) -> list[list[str]]:
    rows = [["member_id", "ideal_percent", "beta_percent", "relative_deviation_percent"]]
    for mid, b0, b, dev in zip(a.member_ids, a.ideal, a.beta, a.relative_deviations):
        rows.append([mid, fixed(b0 * 100, 6), fixed(b * 100, 6), fixed(dev * 100, 4)])
    return rows


def assessment_dict(a: FairnessAssessment) -> dict:
    return {
        "error_rate_sigma2": float(a.error_rate_sigma2),
        "error_rate_permille": significant(a.error_rate_sigma2 * 1000, 5),
        "max_relative_deviation": float(a.max_relative_deviation),
        "max_deviation_percent": fixed(a.max_relative_deviation * 100, 2),
        "max_deviation_member": a.max_deviation_member,
        "members": [
            {"id": mid, "ideal": float(b0), "beta": float(b), "relative_deviation": float(d)}
            for mid, b0, b, d in zip(a.member_ids, a.ideal, a.beta, a.relative_deviations)
        ],
    }


SWEEP_HEADER = [
    "count_quota",
    "weight_quota",
    "pop_quota",
    "sigma2_permille",
    "max_dev_percent",
    "max_dev_member",
    "efficiency_percent",
]


def sweep_row_cells(row: SweepRow) -> list[str]:
    count, weight, pop = row.quota
    return [
        "" if count is None else str(count),
        "" if weight is None else str(weight),
        fixed(pop, 3),
        significant(row.error_rate * 1000, 5),
        fixed(row.max_deviation * 100, 2),
        row.max_deviation_member,
        fixed(row.efficiency * 100, 2),
    ]


def sweep_rows(rows: Iterable[SweepRow]) -> list[list[str]]:
    return [SWEEP_HEADER] + [sweep_row_cells(r) for r in rows]


def appendix_rows(result: SweepResult) -> list[list[str]]:
    """Best population quota for each fixed count (and weight) quota."""
    fixed_dims = {"count": None} if result.family != "nice" else {"count": None, "weight": None}
    if result.family == "jc" and result.rows[0].count is None:
        fixed_dims = {}
    rows = slice_optima(result, fixed_dims) if fixed_dims else [result.argmin_error]
    return sweep_rows(rows)


def plot_rows(result: SweepResult) -> list[list[str]]:
    """Long-format series for plotting: error rate and efficiency against population quota."""
    out = [["series", "pop_quota", "sigma2_permille", "efficiency_percent"]]
    for row in result.rows:
        label = "/".join(str(v) for v in row.quota[:2] if v is not None) or result.family
        out.append([label, fixed(row.pop, 3), significant(row.error_rate * 1000, 5), fixed(row.efficiency * 100, 4)])
    return out


def sweep_dict(result: SweepResult) -> dict:
    best = result.argmin_error
    return {
        "family": result.family,
        "argmin": [None if v is None else (str(v) if isinstance(v, int) else fixed(v, 3)) for v in best.quota],
        "rows": [dict(zip(SWEEP_HEADER, sweep_row_cells(r))) for r in result.rows],
    }


def _csv_text(rows: list[list[str]]) -> str:
    out = io.StringIO()
    csv.writer(out, lineterminator="\n").writerows(rows)
    return out.getvalue()


def render(obj, fmt: str = "csv") -> str:
    if fmt not in ("csv", "json"):
        raise ConfigurationError(f"unknown output format {fmt!r}")
    if isinstance(obj, PowerReport):
        return _csv_text(power_report_rows(obj)) if fmt == "csv" else _json(power_report_dict(obj))
    if isinstance(obj, FairnessAssessment):
        return _csv_text(assessment_rows(obj)) if fmt == "csv" else _json(assessment_dict(obj))
    if isinstance(obj, SweepResult):
        return _csv_text(sweep_rows(obj.rows)) if fmt == "csv" else _json(sweep_dict(obj))
    if isinstance(obj, Council):
        if fmt != "csv":
            return _json({"members": [dataclasses.asdict(m) for m in obj.members]})
        return dataset_csv(obj)
    raise TypeError(f"cannot export {type(obj).__name__}")


def _json(d: dict) -> str:
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


def write_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def export_report(obj, fmt: str, destination: Union[str, Path]) -> Path:
    """Write a report, assessment, sweep or council to ``destination``."""
    return write_text(destination, render(obj, fmt))


def export_analysis(report: PowerReport, fmt: str, directory: Union[str, Path]) -> list[Path]:
    directory = Path(directory)
    assessment = assess(report)
    return [
        export_report(report, fmt, directory / f"power.{fmt}"),
        export_report(assessment, fmt, directory / f"fairness.{fmt}"),
    ]


def export_sweep(result: SweepResult, directory: Union[str, Path], stem: str = "sweep") -> list[Path]:
    directory = Path(directory)
    return [
        write_text(directory / f"{stem}.csv", _csv_text(sweep_rows(result.rows))),
        write_text(directory / f"{stem}_appendix.csv", _csv_text(appendix_rows(result))),
        write_text(directory / f"{stem}_plot.csv", _csv_text(plot_rows(result))),
    ]
