"""Standalone re-verification of persisted embeddings.

Independent of the embedder: the target comes from the record, the host is
rebuilt from the config and matched against the recorded digest, and the
checks run on networkx graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from .campaign import ExperimentConfig, build_trial, host_digest, read_records


@dataclass
class VerifyReport:
    checked: int = 0
    passed: int = 0
    skipped: int = 0
    problems: dict[int, list[str]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_json(self) -> dict:
        return {"checked": self.checked, "passed": self.passed, "skipped": self.skipped,
                "ok": self.ok, "problems": {str(k): v for k, v in self.problems.items()}}


def check_record(record: dict, labels) -> list[str]:
    """Problems with one successful record against the host colour labels."""
    F = nx.Graph()
    F.add_nodes_from(range(record["target"]["n"]))
    F.add_edges_from(tuple(e) for e in record["target"]["edges"])
    emb = {int(a): int(b) for a, b in record["embedding"]}
    colour = record["colour"]
    out = []
    if set(emb) != set(F.nodes):
        out.append("embedding does not cover the target")
    if len(set(emb.values())) != len(emb):
        out.append("images are not distinct")
    n = labels.shape[0]
    for a, b in F.edges:
        if a not in emb or b not in emb:
            continue
        u, v = emb[a], emb[b]
        if not (0 <= u < n and 0 <= v < n):
            out.append(f"image of {a}-{b} out of range")
        elif int(labels[u, v]) != colour:
            out.append(f"{a}-{b} -> {u}-{v} has label {int(labels[u, v])}, expected {colour}")
    return out


def verify_result(path) -> VerifyReport:
    header, records = read_records(path)
    if header is None:
        raise ValueError(f"{path} has no header line")
    config = ExperimentConfig.from_json(header["config"])
    report = VerifyReport()
    for rec in records:
        if not rec.get("success"):
            report.skipped += 1
            continue
        report.checked += 1
        _, colouring, _ = build_trial(config, rec["trial"])
        problems = []
        if host_digest(colouring) != rec.get("host_digest"):
            problems.append("rebuilt host does not match the recorded digest")
        else:
            problems = check_record(rec, colouring.labels)
        if problems:
            report.problems[rec["trial"]] = problems
        else:
            report.passed += 1
    return report
