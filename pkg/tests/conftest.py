from __future__ import annotations

import csv
import os
from pathlib import Path

import pytest

from synthaudit import AttributeSchema, Dataset, Kind, Role

QI_NUM = lambda name: AttributeSchema(name, Kind.NUMERICAL, Role.QI)  # noqa: E731
QI_CAT = lambda name: AttributeSchema(name, Kind.CATEGORICAL, Role.QI)  # noqa: E731


@pytest.fixture
def toy_schema():
    return (
        QI_NUM("age"),
        QI_NUM("income"),
        QI_CAT("home"),
        QI_CAT("intent"),
        AttributeSchema("amount", Kind.NUMERICAL, Role.NON_QI),
    )


@pytest.fixture
def toy_dataset(toy_schema):
    return Dataset.from_columns(
        toy_schema,
        {
            "age": [25, 30, 35, 40, 90],
            "income": [30000, 35000, 40000, 45000, 500000],
            "home": ["RENT", "MORTGAGE", "OWN", "RENT", "MORTGAGE"],
            "intent": ["PERSONAL", "MEDICAL", "PERSONAL", "VENTURE", "PERSONAL"],
            "amount": [1000, 2000, 1500, 3000, 25000],
        },
    )


@pytest.fixture
def write_csv(tmp_path):
    """Write rows to a CSV under tmp_path and return the path."""

    def _write(name: str, header: list[str], rows: list[list]) -> Path:
        path = tmp_path / name
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        return path

    return _write


def credit_risk_path() -> Path | None:
    """Locate the Credit Risk file for the dataset-dependent checks, if present."""
    env = os.environ.get("CREDIT_RISK_CSV")
    candidates = [Path(env)] if env else []
    candidates += [
        Path(__file__).resolve().parent.parent / "data" / "credit_risk.csv",
        Path("data/credit_risk.csv"),
    ]
    for path in candidates:
        if path.is_file():
            return path
    return None
