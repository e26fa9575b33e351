"""Prune-evaluate sweeps over methods and sparsity ratios.

A sweep scores every layer of a network once per method, builds masks for
each requested ratio, and evaluates the masked network's loss on a fixed
batch. Scoring gradients always come from the batch's stored targets; the
evaluation loss is measured against the dense network's own outputs by
default ("reference": "dense"), so the ratio-0 row reproduces the
baseline exactly and growing sparsity shows up as growing loss. Set
"reference": "targets" to evaluate against the stored targets instead.

Config is a JSON object; unknown keys are rejected so typos fail loudly:

    methods      subset of the scoring methods, default all five
    ratios       list in [0, 1], default [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    granularity  per_layer (default) or per_row
    alpha        gblm_pruner mixing weight, default 100
    grad_norm_order  1 or 2, default 2
    seed         drives network/batch generation, default 0
    net          directory of a saved network (omit to generate)
    inputs, targets  tensor files for the batch (omit to generate)
    generate     {"sizes": [...], "samples": n} for generated assets
    reference    "dense" (default) or "targets"
    figures      render PNGs next to the report, default true
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from . import masking, network, scoring
from .corpus import Report, reports_to_csv, reports_to_json
from .tensorfile import read_tensor

DEFAULT_RATIOS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
DEFAULT_GENERATE = {"sizes": (32, 16, 4), "samples": 8}

_KNOWN_KEYS = {
    "methods", "ratios", "granularity", "alpha", "grad_norm_order", "seed",
    "net", "inputs", "targets", "generate", "reference", "figures", "out_dir",
}


@dataclass
class SweepPlan:
    methods: tuple
    ratios: tuple
    granularity: str
    alpha: float
    grad_norm_order: int
    seed: int
    net: list
    batch: network.CalibrationBatch
    reference: str
    figures: bool


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def resolve_plan(config, base_dir=".") -> SweepPlan:
    unknown = set(config) - _KNOWN_KEYS
    if unknown:
        raise ValueError("unknown config keys: %s" % ", ".join(sorted(unknown)))
    methods = tuple(config.get("methods", scoring.METHODS))
    for m in methods:
        if m not in scoring.METHODS:
            raise ValueError("unknown scoring method %r" % (m,))
    ratios = tuple(float(r) for r in config.get("ratios", DEFAULT_RATIOS))
    for r in ratios:
        if not 0.0 <= r <= 1.0:
            raise ValueError("ratio %r outside [0, 1]" % (r,))
    reference = config.get("reference", "dense")
    if reference not in ("dense", "targets"):
        raise ValueError("reference must be 'dense' or 'targets'")
    seed = int(config.get("seed", 0))

    def _resolve(p):
        return p if os.path.isabs(p) else os.path.join(base_dir, p)

    gen = dict(DEFAULT_GENERATE)
    gen.update(config.get("generate") or {})
    if config.get("net"):
        net = network.load_network(_resolve(config["net"]))
    else:
        net = network.make_network(list(gen["sizes"]), seed=[seed, 0])
    if config.get("inputs") or config.get("targets"):
        if not (config.get("inputs") and config.get("targets")):
            raise ValueError("inputs and targets must be given together")
        batch = network.CalibrationBatch(
            inputs=read_tensor(_resolve(config["inputs"])),
            targets=read_tensor(_resolve(config["targets"])),
        )
    else:
        sizes = [layer.weight.shape[1] for layer in net] + [net[-1].weight.shape[0]]
        batch = network.make_batch(
            int(gen["samples"]), sizes[0], sizes[-1], seed=[seed, 1]
        )
    return SweepPlan(
        methods=methods,
        ratios=ratios,
        granularity=config.get("granularity", "per_layer"),
        alpha=float(config.get("alpha", scoring.DEFAULT_ALPHA)),
        grad_norm_order=int(config.get("grad_norm_order", 2)),
        seed=seed,
        net=net,
        batch=batch,
        reference=reference,
        figures=bool(config.get("figures", True)),
    )


def layer_score_inputs(net, batch, alpha=scoring.DEFAULT_ALPHA, grad_norm_order=2):
    """One ScoreInputs per layer, from genuine activations and gradients."""
    layer_inputs, _ = network.forward(net, batch.inputs)
    grads = network.per_sample_gradients(net, batch)
    out = []
    for layer, x, g in zip(net, layer_inputs, grads):
        out.append(
            scoring.ScoreInputs(
                weight=layer.weight,
                act_norm=network.activation_norms(x),
                grad_norm=network.gradient_norms(g, p=grad_norm_order),
                alpha=alpha,
            )
        )
    return out


def score_network(net, batch, method, alpha=scoring.DEFAULT_ALPHA, grad_norm_order=2):
    """Per-layer score matrices for one method."""
    return [
        scoring.score(method, si)
        for si in layer_score_inputs(net, batch, alpha, grad_norm_order)
    ]


def _masked_net(net, masks):
    pruned = []
    for layer, mask in zip(net, masks):
        pruned.append(
            network.DenseLayer(
                weight=masking.apply_mask(layer.weight, mask), activation=layer.activation
            )
        )
    return pruned


def _pooled_jaccard(masks_a, masks_b) -> float:
    inter = union = 0
    for ma, mb in zip(masks_a, masks_b):
        pa, pb = ~ma.keep, ~mb.keep
        inter += int(np.logical_and(pa, pb).sum())
        union += int(np.logical_or(pa, pb).sum())
    return 1.0 if union == 0 else inter / union


def run_sweep(plan) -> list:
    """Evaluate every (method, ratio) cell; returns Report rows sorted by
    (method, ratio). Mask agreement between methods lands on the row of
    the lexicographically smaller method as jaccard_vs_<other>."""
    inputs_by_layer = layer_score_inputs(
        plan.net, plan.batch, plan.alpha, plan.grad_norm_order
    )
    if plan.reference == "dense":
        _, dense_out = network.forward(plan.net, plan.batch.inputs)
        reference = dense_out
    else:
        reference = plan.batch.targets

    scores = {
        m: [scoring.score(m, si) for si in inputs_by_layer] for m in plan.methods
    }
    masks = {
        (m, r): [masking.build_mask(s, r, plan.granularity) for s in scores[m]]
        for m in plan.methods
        for r in plan.ratios
    }

    total_cells = sum(layer.weight.size for layer in plan.net)
    reports = []
    for method in plan.methods:
        for ratio in plan.ratios:
            cell_masks = masks[(method, ratio)]
            pruned_net = _masked_net(plan.net, cell_masks)
            _, out = network.forward(pruned_net, plan.batch.inputs)
            loss = float(np.mean(network.per_sample_loss(out, reference)))
            pruned_cells = sum(int(m.keep.size - m.keep.sum()) for m in cell_masks)
            metrics = {
                "loss": loss,
                "sparsity_achieved": pruned_cells / total_cells,
            }
            for other in plan.methods:
                if other > method:
                    metrics["jaccard_vs_%s" % other] = _pooled_jaccard(
                        cell_masks, masks[(other, ratio)]
                    )
            reports.append(Report(method=method, sparsity=ratio, metrics=metrics))
    reports.sort(key=lambda rep: (rep.method, rep.sparsity))
    return reports


def write_outputs(reports, out_dir, figures=True) -> dict:
    """Emit report.json, report.csv, and optionally figures. Returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "report_json": os.path.join(out_dir, "report.json"),
        "report_csv": os.path.join(out_dir, "report.csv"),
    }
    with open(paths["report_json"], "w", encoding="utf-8") as fh:
        fh.write(reports_to_json(reports))
    with open(paths["report_csv"], "w", encoding="utf-8") as fh:
        fh.write(reports_to_csv(reports))
    if figures:
        from .figures import render_sweep_figures

        paths["figures"] = render_sweep_figures(reports, out_dir)
    return paths
