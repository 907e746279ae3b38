"""Seeded embedding campaigns with JSON-lines persistence and parameter sweeps."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import binomtest

from ..embedder import ConstantsPack, RegularityConfig, embed_monochromatic
from ..ensemble import EnsembleSpec, sample_gnp
from ..graph import EdgeColouring, Graph
from .colourings import colour_edges
from .targets import generate_target, maxdegree_target

SCHEMA_VERSION = 1
SWEEP_PARAMS = ("p", "N", "r", "mu")


@dataclass
class ExperimentConfig:
    """One campaign: host ``G(N, p)``, a target class, a colouring strategy,
    embedding constants and the number of trials.

    ``target`` is ``{"kind": "degenerate", "D", "Delta", "n"}`` or
    ``{"kind": "maxdegree", "Delta", "regular_n", "path_n", "k4"}``.
    ``constants`` is a serialized practical ConstantsPack or ``None`` to
    derive one from the target class and ``p = N^(-1/D + mu)``.
    """

    N: int
    p: float
    r: int = 2
    target: dict = field(default_factory=lambda: {"kind": "degenerate", "D": 2, "Delta": 4, "n": 50})
    colouring: dict = field(default_factory=lambda: {"strategy": "random"})
    constants: dict | None = None
    regularity: dict = field(default_factory=dict)
    mode: str = "degenerate"
    trials: int = 20
    master_seed: int = 0
    audit: bool = False
    method: str = "estimate"
    policy: str = "random"
    output: str | None = None
    name: str = "campaign"
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version}")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        if self.mode not in ("degenerate", "maxdegree"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict | str) -> "ExperimentConfig":
        if isinstance(data, str):
            data = json.loads(data)
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config fields {sorted(extra)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)

    @property
    def D(self) -> int:
        t = self.target
        return t["D"] if t["kind"] == "degenerate" else t["Delta"] - 1

    @property
    def Delta(self) -> int:
        return self.target["Delta"]

    def constants_pack(self) -> ConstantsPack:
        if self.constants is not None:
            return ConstantsPack.from_json(self.constants)
        mu = 1 / self.D + math.log(self.p) / math.log(self.N)
        return ConstantsPack.practical(self.D, self.Delta, self.r, round(max(mu, 0.01), 4))

    def regularity_config(self) -> RegularityConfig:
        return RegularityConfig(**self.regularity)


def trial_seeds(master_seed: int, trial: int) -> dict[str, int]:
    """Independent sub-seeds for host, colouring, target and embedding."""
    state = np.random.SeedSequence([int(master_seed), int(trial)]).generate_state(4)
    return dict(zip(("host", "colouring", "target", "embed"), (int(s) for s in state)))


def host_digest(c: EdgeColouring) -> str:
    """SHA-256 over the upper-triangle colour labels (``-1`` for non-edges)."""
    iu = np.triu_indices(c.graph.n, 1)
    h = hashlib.sha256()
    h.update(f"{c.graph.n}:{c.r}:".encode())
    h.update(np.ascontiguousarray(c.labels[iu]).tobytes())
    return h.hexdigest()


def build_trial(config: ExperimentConfig, trial: int) -> tuple[Graph, EdgeColouring, Graph]:
    """Host, colouring and target of one trial; a pure function of
    ``(config, trial)``."""
    seeds = trial_seeds(config.master_seed, trial)
    host = sample_gnp(EnsembleSpec(config.N, config.p, seeds["host"]))
    col = config.colouring
    colouring = colour_edges(host, col.get("strategy", "random"), config.r, seeds["colouring"],
                             **col.get("params", {}))
    t = config.target
    if t["kind"] == "degenerate":
        F = generate_target(t["D"], t["Delta"], t["n"], seeds["target"]).graph
    elif t["kind"] == "maxdegree":
        F = maxdegree_target(t.get("regular_n", 20), t.get("path_n", 10), seeds["target"] % 2**31,
                             k4=t.get("k4", True), Delta=t["Delta"])
    else:
        raise ValueError(f"unknown target kind {t['kind']!r}")
    return host, colouring, F


def run_trial(config: ExperimentConfig, trial: int) -> tuple[dict, dict]:
    """``(record, timings)``; errors become failed records."""
    seeds = trial_seeds(config.master_seed, trial)
    record = {"schema_version": SCHEMA_VERSION, "trial": trial, "seeds": seeds}
    try:
        host, colouring, F = build_trial(config, trial)
        record["host_digest"] = host_digest(colouring)
        record["target"] = {"n": F.n, "edges": [list(e) for e in F.edges()]}
        rep = embed_monochromatic(F, host, colouring, config.constants_pack(), config.p, mode=config.mode,
                                  seed=seeds["embed"], regularity=config.regularity_config(),
                                  method=config.method, audit=config.audit, policy=config.policy)
    except Exception as exc:  # recorded, never fatal to the campaign
        record.update(success=False, stage="error", error=f"{type(exc).__name__}: {exc}",
                      colour=None, embedding=[], embedding_digest=None)
        return record, {}
    emb = [list(pair) for pair in rep.embedding]
    record.update(
        success=rep.success,
        stage=rep.stage,
        error=rep.error,
        colour=rep.colour,
        embedding=emb,
        embedding_digest=hashlib.sha256(json.dumps(emb).encode()).hexdigest() if emb else None,
        steps=rep.trajectory.get("steps", 0),
        components=[{k: c[k] for k in ("kind", "segment") if k in c}
                    for c in rep.diagnostics.get("components", [])],
    )
    return record, rep.diagnostics.get("timings", {})


def _worker(args):
    config_json, trial = args
    return run_trial(ExperimentConfig.from_json(config_json), trial)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RAMSEY_THREADS", "1")))
    except ValueError:
        return 1


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class CampaignResult:
    config: ExperimentConfig
    records: list[dict]

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r["trial"])

    @property
    def aggregate(self) -> dict:
        return aggregate(self.records)

    def to_json(self) -> dict:
        return {"config": self.config.to_json(), "aggregate": self.aggregate}


def aggregate(records: Sequence[dict], confidence: float = 0.95) -> dict:
    """Success rate with a Wilson interval and failure counts per stage."""
    n = len(records)
    k = sum(1 for r in records if r["success"])
    stages: dict[str, int] = {}
    for r in records:
        if not r["success"]:
            stages[r.get("stage") or "unknown"] = stages.get(r.get("stage") or "unknown", 0) + 1
    out = {"trials": n, "successes": k, "rate": None, "ci_low": None, "ci_high": None,
           "failure_stages": dict(sorted(stages.items()))}
    if n:
        ci = binomtest(k, n).proportion_ci(confidence_level=confidence, method="wilson")
        out.update(rate=k / n, ci_low=float(ci.low), ci_high=float(ci.high))
    return out


def read_records(path) -> tuple[dict | None, list[dict]]:
    """Header and trial records of a result file."""
    header, records = None, []
    p = Path(path)
    if not p.exists():
        return None, []
    with open(p) as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("kind") == "header":
                header = obj
            else:
                records.append(obj)
    return header, records


def run_campaign(config: ExperimentConfig, output=None, *, threads: int | None = None) -> CampaignResult:
    """Run the trials not yet present in ``output`` and append one JSON line
    each, in trial order.  Timings go to a ``.timings.jsonl`` sidecar so the
    result file itself is a deterministic function of the config."""
    output = output or config.output
    threads = threads or _threads()
    header = {"kind": "header", "schema_version": SCHEMA_VERSION, "config": config.to_json()}
    done: dict[int, dict] = {}
    if output:
        old_header, old = read_records(output)
        if old_header is not None and old_header["config"] != header["config"]:
            raise ValueError(f"{output} was produced by a different config")
        done = {r["trial"]: r for r in old}
        if old_header is None:
            Path(output).parent.mkdir(parents=True, exist_ok=True)
            with open(output, "w") as fh:
                fh.write(_dump(header) + "\n")
    todo = [t for t in range(config.trials) if t not in done]
    cfg = _dump(config.to_json())
    if threads > 1 and len(todo) > 1:
        pool = ProcessPoolExecutor(max_workers=min(threads, len(todo)))
        results = pool.map(_worker, [(cfg, t) for t in todo])
    else:
        pool = None
        results = (run_trial(config, t) for t in todo)
    try:
        for t, (record, timings) in zip(todo, results):
            done[t] = record
            if output:
                with open(output, "a") as fh:
                    fh.write(_dump(record) + "\n")
                with open(str(output) + ".timings.jsonl", "a") as fh:
                    fh.write(_dump({"trial": t, "timings": timings}) + "\n")
    finally:
        if pool is not None:
            pool.shutdown()
    return CampaignResult(config, list(done.values()))


def with_parameter(config: ExperimentConfig, param: str, value) -> ExperimentConfig:
    data = config.to_json()
    if param == "p":
        data["p"] = float(value)
    elif param == "N":
        data["N"] = int(value)
    elif param == "r":
        data["r"] = int(value)
    elif param == "mu":
        data["p"] = float(config.N ** (-1 / config.D + float(value)))
    else:
        raise ValueError(f"unknown sweep parameter {param!r}; choose from {SWEEP_PARAMS}")
    if param == "r" and data["constants"] is not None:
        data["constants"] = dict(data["constants"], r=int(value))
    data["output"] = None
    return ExperimentConfig.from_json(data)


def sweep(config: ExperimentConfig, param: str, grid: Iterable, *, out_dir=None,
          csv_path=None, threads: int | None = None) -> list[dict]:
    """One campaign per grid value; rows carry the aggregate and the value."""
    grid = list(grid)
    if not grid:
        raise ValueError("grid is empty")
    rows = []
    for value in grid:
        cell = with_parameter(config, param, value)
        output = None
        if out_dir is not None:
            output = Path(out_dir) / f"{config.name}.{param}={value}.jsonl"
        res = run_campaign(cell, output, threads=threads)
        rows.append({"param": param, "value": value, "p": cell.p, "N": cell.N, "r": cell.r,
                     **res.aggregate})
    if csv_path is not None:
        keys = ["param", "value", "p", "N", "r", "trials", "successes", "rate", "ci_low", "ci_high",
                "failure_stages"]
        with open(csv_path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=keys)
            w.writeheader()
            for row in rows:
                w.writerow({k: json.dumps(row[k]) if k == "failure_stages" else row[k] for k in keys})
    return rows
