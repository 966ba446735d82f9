"""Versioned JSON persistence for fitted models."""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np
from scipy.special import logsumexp

from .baselines import FullBMModel, RBMModel, pattern_bitmask, subset_sums
from .fitting import FitReport
from .model import GibbsModel, SampleSpace

SCHEMA_VERSION = 1


def _report_dict(report: FitReport | None) -> dict | None:
    if report is None:
        return None
    out = asdict(report)
    out["removed_parameters"] = [list(p) for p in report.removed_parameters]
    return out


def _report_from(obj: dict | None) -> FitReport | None:
    if obj is None:
        return None
    kwargs = dict(obj)
    kwargs["removed_parameters"] = tuple(
        tuple(p) for p in kwargs["removed_parameters"]
    )
    return FitReport(**kwargs)


def model_to_dict(
    model: GibbsModel | FullBMModel | RBMModel,
    report: FitReport | None = None,
    meta: dict[str, Any] | None = None,
) -> dict:
    out: dict[str, Any] = {"schema": SCHEMA_VERSION, "meta": meta or {}}
    if isinstance(model, GibbsModel):
        out["kind"] = "tbm"
        out["sample_space"] = [list(x) for x in model.space.outcomes]
        out["domain"] = [list(p) for p in model.domain]
        out["theta"] = [float(v) for v in model.theta]
        out["log_partition"] = model.log_partition
    elif isinstance(model, FullBMModel):
        out["kind"] = "bm"
        out["n_variables"] = model.n_variables
        out["domain"] = [list(p) for p in model.domain]
        out["theta"] = [float(v) for v in model.theta]
        out["log_partition"] = model.log_partition
    elif isinstance(model, RBMModel):
        out["kind"] = "rbm"
        out["n_variables"] = model.n_visible
        out["n_hidden"] = model.n_hidden
        out["visible_bias"] = model.visible_bias.tolist()
        out["hidden_bias"] = model.hidden_bias.tolist()
        out["weights"] = model.weights.tolist()
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    out["fit_report"] = _report_dict(report)
    return out


def model_from_dict(obj: dict) -> tuple[Any, FitReport | None, dict]:
    if obj.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema {obj.get('schema')!r}")
    kind = obj.get("kind")
    report = _report_from(obj.get("fit_report"))
    meta = obj.get("meta", {})
    if kind == "tbm":
        space = SampleSpace.from_patterns(tuple(x) for x in obj["sample_space"])
        model = GibbsModel(
            space,
            [tuple(p) for p in obj["domain"]],
            np.array(obj["theta"], dtype=np.float64),
        )
        return model, report, meta
    if kind == "bm":
        n = int(obj["n_variables"])
        domain = tuple(tuple(p) for p in obj["domain"])
        theta = np.array(obj["theta"], dtype=np.float64)
        dense = np.zeros(1 << n)
        for pattern, value in zip(domain, theta):
            dense[pattern_bitmask(pattern)] += value
        raw = subset_sums(dense, n)
        psi = float(logsumexp(raw))
        model = FullBMModel(
            n_variables=n,
            domain=domain,
            theta=theta,
            log_partition=psi,
            log_probs=raw - psi,
        )
        return model, report, meta
    if kind == "rbm":
        model = RBMModel(
            visible_bias=np.array(obj["visible_bias"], dtype=np.float64),
            hidden_bias=np.array(obj["hidden_bias"], dtype=np.float64),
            weights=np.array(obj["weights"], dtype=np.float64),
        )
        return model, report, meta
    raise ValueError(f"unknown model kind {kind!r}")


def dumps_model(model, report=None, meta=None) -> str:
    return json.dumps(model_to_dict(model, report, meta), indent=2, sort_keys=True) + "\n"


def save_model(path: str | Path, model, report=None, meta=None) -> None:
    Path(path).write_text(dumps_model(model, report, meta))


def load_model(path: str | Path) -> tuple[Any, FitReport | None, dict]:
    return model_from_dict(json.loads(Path(path).read_text()))
