"""
Monochromatic embeddings
========================

Embed a random 2-degenerate target into one colour class of a coloured
random graph, check it independently, and then run a small seeded campaign.
"""

import json
import tempfile
from fractions import Fraction
from pathlib import Path

from sparse_ramsey.embedder import ConstantsPack, RegularityConfig, embed_monochromatic, verify_embedding
from sparse_ramsey.ensemble import EnsembleSpec, sample_gnp
from sparse_ramsey.experiments import (
    ExperimentConfig, colour_edges, generate_target, run_campaign, verify_result,
)

host = sample_gnp(EnsembleSpec(1200, 0.3, seed=4))
colouring = colour_edges(host, "clique-hider", 2, seed=4)
F = generate_target(2, 4, 20, seed=1).graph
print("target:", F)

cp = ConstantsPack.practical(2, 4, 2, Fraction(1, 4))
rep = embed_monochromatic(F, host, colouring, cp, 0.3, seed=1,
                          regularity=RegularityConfig(eps=0.3, k0=6, fine_split=2))
print("success", rep.success, "colour", rep.colour)
print("problems found by the checker:", verify_embedding(F, colouring, rep.colour, rep.embedding))
print("candidate set sizes:", rep.trajectory.get("W_sizes", [])[:10], "...")

# a campaign writes one JSON line per trial and can be verified from the file alone
cfg = ExperimentConfig(N=1200, p=0.3, target={"kind": "degenerate", "D": 2, "Delta": 4, "n": 15},
                       colouring={"strategy": "majority-split"}, constants=cp.to_json(),
                       regularity={"eps": 0.3, "k0": 6, "fine_split": 2}, trials=4, master_seed=3)
with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "run.jsonl"
    res = run_campaign(cfg, out)
    print(json.dumps(res.aggregate, indent=2))
    print("independent check:", verify_result(out).to_json())
