"""Verification entries and reports (JSON and text)."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

STATUSES = ("pass", "fail", "skipped", "inconclusive")


def fmt(x: float) -> str:
    """12 significant digits, the package-wide output precision."""
    return f"{x:.12g}"


def canonical(obj: Any) -> Any:
    """Round floats to 12 significant digits and make containers JSON-safe."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(fmt(x))
    if isinstance(obj, np.ndarray):
        return [canonical(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def config_hash(config: dict) -> str:
    blob = json.dumps(canonical(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class Constant:
    value: float
    provenance: str


@dataclass
class VerificationEntry:
    claim_id: str
    status: str
    lhs: list[float] = field(default_factory=list)
    rhs: list[float] = field(default_factory=list)
    max_ratio: float | None = None
    witness: dict | None = None
    constants: dict[str, Constant] = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    seed: int = 0
    config_hash: str = ""
    runtime: float = 0.0

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}, got {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        # runtime is wall-clock and would break byte-identical reports
        return canonical(
            {
                "claim_id": self.claim_id,
                "status": self.status,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "max_ratio": self.max_ratio,
                "witness": self.witness,
                "constants": {
                    k: {"value": c.value, "provenance": c.provenance}
                    for k, c in sorted(self.constants.items())
                },
                "details": self.details,
                "seed": self.seed,
                "config_hash": self.config_hash,
            }
        )


def entry_from_comparison(
    claim_id: str,
    lhs,
    rhs,
    tol=0.0,
    witness_labels: dict | None = None,
    **kw,
) -> VerificationEntry:
    """Pass iff lhs <= rhs + tol elementwise; records the tightest ratio and its witness."""
    lhs = np.atleast_1d(np.asarray(lhs, float))
    rhs = np.atleast_1d(np.asarray(rhs, float))
    tol = np.broadcast_to(np.asarray(tol, float), lhs.shape)
    ok = lhs <= rhs + tol
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
    j = int(np.argmax(ratio)) if ratio.size else 0
    witness = {"index": j}
    if witness_labels:
        witness.update({k: (v[j] if hasattr(v, "__len__") else v) for k, v in witness_labels.items()})
    return VerificationEntry(
        claim_id=claim_id,
        status="pass" if bool(np.all(ok)) else "fail",
        lhs=lhs.tolist(),
        rhs=rhs.tolist(),
        max_ratio=float(ratio[j]) if ratio.size else 0.0,
        witness=witness,
        **kw,
    )


@dataclass
class VerificationReport:
    suite: str
    config: dict
    entries: list[VerificationEntry] = field(default_factory=list)

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    @property
    def passed(self) -> bool:
        return all(e.status in ("pass", "skipped", "inconclusive") for e in self.entries)

    @property
    def failures(self) -> list[VerificationEntry]:
        return [e for e in self.entries if e.status == "fail"]

    def extend(self, entries) -> None:
        for e in entries:
            e.config_hash = self.config_hash
            self.entries.append(e)

    def sorted_entries(self) -> list[VerificationEntry]:
        return sorted(self.entries, key=lambda e: e.claim_id)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config": canonical(self.config),
            "config_hash": self.config_hash,
            "passed": self.passed,
            "entries": [e.as_dict() for e in self.sorted_entries()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"suite: {self.suite}   config: {self.config_hash}"]
        for e in self.sorted_entries():
            ratio = "-" if e.max_ratio is None else fmt(e.max_ratio)
            lines.append(f"  {e.status.upper():12s} {e.claim_id:40s} max_ratio={ratio}  ({e.runtime:.2f}s)")
        lines.append("PASS" if self.passed else f"FAIL ({len(self.failures)} failing entries)")
        return "\n".join(lines) + "\n"
