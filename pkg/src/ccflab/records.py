"""Persistent run records: outcome classification, JSONL serialization with a
versioned schema, and the configuration hash used for sweep resumption.

Serialization rules that keep sweeps byte-reproducible:

* JSON is emitted with sorted keys and compact separators; floats serialize
  via repr, which round-trips exactly in both directions.
* wall_time is stored on the record but excluded from the config hash, so a
  re-run of the same cell is recognized regardless of how long it took.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .regularity import DiagnosticsSample

SCHEMA_VERSION = 1


class Outcome(str, Enum):
    """Terminal classification of a run; set exactly once."""

    COMPLETED = "Completed"
    BLOWUP_SUSPECTED = "BlowupSuspected"
    UNDER_RESOLVED = "UnderResolved"
    STEP_COLLAPSE = "StepCollapse"


@dataclass(frozen=True)
class RunRecord:
    """One run: full configuration, diagnostics series, and classification."""

    config: dict
    samples: list[DiagnosticsSample]
    outcome: Outcome
    outcome_detail: str = ""
    t_star_predicted: float | None = None
    t_local_predicted: float | None = None
    wall_time: float = 0.0

    def __post_init__(self) -> None:
        times = [s.t for s in self.samples]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("samples must be time-sorted")

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)


def config_hash(config: dict) -> str:
    """Stable short hash of a config dict (full float precision, sorted keys)."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha1(canon.encode()).hexdigest()[:12]


def _sample_to_dict(s: DiagnosticsSample) -> dict:
    return {
        "t": s.t,
        "l2": s.l2,
        "linf": s.linf,
        "mean": s.mean,
        "hdot_half": s.hdot_half,
        "hdot_three_half": s.hdot_three_half,
        "hdot_mid": s.hdot_mid,
        "holder": {repr(a): v for a, v in s.holder.items()},
        "tail_fraction": s.tail_fraction,
        "min_value": s.min_value,
        "grad_linf": s.grad_linf,
    }


def _sample_from_dict(d: dict) -> DiagnosticsSample:
    return DiagnosticsSample(
        t=d["t"],
        l2=d["l2"],
        linf=d["linf"],
        mean=d["mean"],
        hdot_half=d["hdot_half"],
        hdot_three_half=d["hdot_three_half"],
        hdot_mid=d["hdot_mid"],
        holder={float(a): v for a, v in d["holder"].items()},
        tail_fraction=d["tail_fraction"],
        min_value=d["min_value"],
        grad_linf=d["grad_linf"],
    )


def record_to_dict(record: RunRecord) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": record.config,
        "samples": [_sample_to_dict(s) for s in record.samples],
        "outcome": record.outcome.value,
        "outcome_detail": record.outcome_detail,
        "t_star_predicted": record.t_star_predicted,
        "t_local_predicted": record.t_local_predicted,
        "wall_time": record.wall_time,
    }


def record_from_dict(d: dict) -> RunRecord:
    version = d.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(
            f"unknown record schema_version {version!r}; this build reads version {SCHEMA_VERSION}"
        )
    return RunRecord(
        config=d["config"],
        samples=[_sample_from_dict(s) for s in d["samples"]],
        outcome=Outcome(d["outcome"]),
        outcome_detail=d.get("outcome_detail", ""),
        t_star_predicted=d["t_star_predicted"],
        t_local_predicted=d["t_local_predicted"],
        wall_time=d["wall_time"],
    )


def record_to_json(record: RunRecord) -> str:
    """One JSONL line, deterministic up to the wall_time field."""
    return json.dumps(record_to_dict(record), sort_keys=True, separators=(",", ":"))


def append_record(path: Path, record: RunRecord) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(record_to_json(record) + "\n")


def load_records(path: Path) -> list[RunRecord]:
    """Read a JSONL record file; unknown schema versions are rejected loudly."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
            records.append(record_from_dict(payload))
    return records
