"""Residual reports and their JSON / CSV serialization."""

import csv
import json
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


@dataclass
class SubCheck:
    """One named statistic over samples.

    ``kind`` is ``"upper"`` (every value must be <= tol) or ``"lower"``
    (every value must be >= tol). ``residual`` marks minimality residuals,
    which feed the report's max/mean residual fields.
    """

    name: str
    kind: str
    tol: float
    values: List[float]
    residual: bool = False

    def __post_init__(self):
        if self.kind not in ("upper", "lower"):
            raise ValueError(f"unknown check kind {self.kind!r}")
        self.values = [float(v) for v in self.values]

    @property
    def failures(self):
        v = np.asarray(self.values)
        bad = ~(v <= self.tol) if self.kind == "upper" else ~(v >= self.tol)
        return int(np.count_nonzero(bad))

    def stats(self):
        v = np.asarray(self.values)
        if v.size == 0:
            return None, None, None
        return float(v.max()), float(v.mean()), float(v.min())

    def summary_line(self):
        vmax, vmean, vmin = self.stats()
        status = "PASS" if self.failures == 0 else "FAIL"
        rel = "<=" if self.kind == "upper" else ">="
        worst = vmax if self.kind == "upper" else vmin
        return (
            f"[{status}] {self.name}: n={len(self.values)} worst={_fmt(worst)} "
            f"mean={_fmt(vmean)} ({rel} {self.tol:g}) failures={self.failures}"
        )


def _fmt(x):
    return "nan" if x is None else f"{x:.3e}"


@dataclass
class ResidualReport:
    scenario: str
    params: dict
    seed: int
    samples: int
    tol: float
    mode: str
    checks: List[SubCheck] = field(default_factory=list)
    error: Optional[str] = None
    timestamp: str = ""

    def _residual_values(self):
        vals = [v for c in self.checks if c.residual for v in c.values]
        return np.asarray(vals, dtype=float)

    @property
    def max_residual(self):
        v = self._residual_values()
        return float(v.max()) if v.size else None

    @property
    def mean_residual(self):
        v = self._residual_values()
        return float(v.mean()) if v.size else None

    @property
    def failures(self):
        return sum(c.failures for c in self.checks)

    @property
    def verdict(self):
        if self.error is not None or not self.checks:
            return "fail"
        mx = self.max_residual
        ok = self.failures == 0 and (mx is None or mx <= self.tol)
        return "pass" if ok else "fail"

    def to_dict(self):
        out = {
            "scenario": self.scenario,
            "params": dict(self.params),
            "seed": self.seed,
            "samples": self.samples,
            "tol": self.tol,
            "mode": self.mode,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "failures": self.failures,
            "verdict": self.verdict,
            "checks": [],
        }
        for c in self.checks:
            vmax, vmean, vmin = c.stats()
            out["checks"].append(
                {
                    "name": c.name,
                    "kind": c.kind,
                    "residual": c.residual,
                    "tol": c.tol,
                    "count": len(c.values),
                    "max": vmax,
                    "mean": vmean,
                    "min": vmin,
                    "failures": c.failures,
                }
            )
        if self.error is not None:
            out["error"] = self.error
        out["timestamp"] = self.timestamp
        return out

    def to_json(self):
        return dumps(self.to_dict()) + "\n"

    def write_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["check", "index", "value"])
            for c in self.checks:
                for i, v in enumerate(c.values):
                    w.writerow([c.name, i, format(v, ".17g")])


def _float(x):
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def dumps(obj, indent=2, _level=0):
    """JSON text with insertion-ordered keys and 17-significant-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
