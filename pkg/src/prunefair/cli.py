"""Command-line interface.

Exit codes: 0 on success, 2 for usage errors (argparse), and 1 for
runtime failures, which are reported as a single machine-parseable line
on stderr: "error: <ExceptionType>: <message>".
"""

import argparse
import json
import os
import sys

from . import calib, fairness, masking, network, rating, scoring, sweep, textmetrics
from .corpus import Report, read_corpus, report_row_obj, reports_to_csv, reports_to_json
from .tensorfile import read_tensor, write_tensor


def _load_batch(args):
    return network.CalibrationBatch(
        inputs=read_tensor(args.inputs), targets=read_tensor(args.targets)
    )


def cmd_score(args) -> int:
    net = network.load_network(args.net)
    batch = _load_batch(args)
    inputs_by_layer = sweep.layer_score_inputs(net, batch, args.alpha, args.grad_norm_order)
    os.makedirs(args.out, exist_ok=True)
    for idx, score_inputs in enumerate(inputs_by_layer):
        matrix = scoring.score(args.method, score_inputs)
        write_tensor(os.path.join(args.out, "score_layer_%02d.tensor" % idx), matrix.values)
        if args.method == "hgla":
            rescaled = scoring.rescale_gradients(
                score_inputs.weight, score_inputs.act_norm, score_inputs.grad_norm
            )
            write_tensor(os.path.join(args.out, "grad_rescaled_%02d.tensor" % idx), rescaled)
        vals = matrix.values
        print(
            "layer %02d: min=%.6g mean=%.6g max=%.6g"
            % (idx, vals.min(), vals.mean(), vals.max())
        )
    return 0


def cmd_prune(args) -> int:
    net = network.load_network(args.net)
    batch = _load_batch(args)
    matrices = sweep.score_network(net, batch, args.method, args.alpha, args.grad_norm_order)
    masks = [masking.build_mask(m, args.ratio, args.granularity) for m in matrices]
    pruned = []
    os.makedirs(args.out, exist_ok=True)
    for idx, (layer, mask) in enumerate(zip(net, masks)):
        write_tensor(
            os.path.join(args.out, "mask_layer_%02d.tensor" % idx),
            masking.mask_to_tensor(mask),
        )
        pruned.append(
            network.DenseLayer(
                weight=masking.apply_mask(layer.weight, mask),
                activation=layer.activation,
            )
        )
    network.save_network(args.out, pruned)
    total = sum(layer.weight.size for layer in net)
    zeroed = sum(int(m.keep.size - m.keep.sum()) for m in masks)
    print(
        "pruned %d of %d weights (%.4f) with %s at ratio %g"
        % (zeroed, total, zeroed / total, args.method, args.ratio)
    )
    return 0


def cmd_sweep(args) -> int:
    config = sweep.load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.no_figures:
        config["figures"] = False
    out_dir = args.out or config.get("out_dir") or "sweep_out"
    config.pop("out_dir", None)
    plan = sweep.resolve_plan(config, base_dir=os.path.dirname(os.path.abspath(args.config)))
    reports = sweep.run_sweep(plan)
    paths = sweep.write_outputs(reports, out_dir, figures=plan.figures)
    print("wrote %s" % paths["report_json"])
    return 0


def cmd_calib_build(args) -> int:
    corpus = read_corpus(args.corpus)
    seed = args.seed
    if args.kind == "single_sided":
        if args.side is None:
            raise ValueError("--side is required for single_sided")
        cset = calib.build_single_sided(corpus, args.domain, args.side, seed)
    elif args.kind == "fair_input":
        cset = calib.build_fair_input(corpus, args.domain, seed)
    elif args.kind == "mixed_input":
        cset = calib.build_mixed_input(corpus, args.domain, seed)
    elif args.kind == "fairness_testset":
        cset = calib.build_fairness_testset(corpus, args.domain, seed)
    else:
        if args.pool is None:
            raise ValueError("--pool is required for output-conditioned kinds")
        pool = calib.load_spd_pool(args.pool, corpus)
        cset = calib.build_output_conditioned(pool, args.kind, args.tau_spd, seed)
    calib.write_calibration_set(args.out, cset)
    print("wrote %d collections to %s" % (len(cset.collections), args.out))
    return 0


def _default_value_pair(labels):
    known = {
        frozenset(("left", "right")): ("right", "left"),
        frozenset(("pos", "neg")): ("pos", "neg"),
        frozenset(("positive", "negative")): ("positive", "negative"),
    }
    return known.get(frozenset(labels))


def _summary_rows(args):
    cset = calib.read_calibration_set(args.sources)
    with open(args.summaries, "r", encoding="utf-8") as fh:
        summaries = [json.loads(line) for line in fh if line.strip()]
    if len(summaries) != len(cset.collections):
        raise ValueError(
            "%d summaries but %d source collections"
            % (len(summaries), len(cset.collections))
        )
    labels = sorted({d.label for col in cset.collections for d in col.docs})
    if args.value_a and args.value_b:
        pair = (args.value_a, args.value_b)
    else:
        pair = _default_value_pair(labels)
        if pair is None:
            raise ValueError(
                "cannot infer the value pair from labels %s; pass --value-a/--value-b"
                % labels
            )
    value_a, value_b = pair

    rows = []
    pairs = []
    for idx, (summary, col) in enumerate(zip(summaries, cset.collections)):
        sentences = textmetrics.split_sentences(summary["text"])
        channels = None
        if args.channel:
            channels = [
                read_tensor(os.path.join(d, "channel_%03d.tensor" % idx))
                for d in args.channel
            ]
        labeled = fairness.match_labels(sentences, col, channels)
        value_set = set(pair) | {d.label for d in col.docs} | {lbl for _, lbl in labeled.sentences}
        target = fairness.distribution_from_labels([d.label for d in col.docs], value_set)
        generated = fairness.distribution_from_labels(
            [lbl for _, lbl in labeled.sentences], value_set
        )
        errors = fairness.value_errors(target, generated)
        row = {
            "index": idx,
            "spd_source": fairness.first_order_spd(target, value_a, value_b),
            "spd_summary": fairness.first_order_spd(generated, value_a, value_b),
            "spd_second_order": fairness.second_order_spd(labeled, value_a, value_b),
            "uer": fairness.uer(target, generated),
            "sof": fairness.sof(target, generated),
            "max_deviation": max(errors.values()),
        }
        rows.append(row)
        pairs.append((target, generated))
    return rows, pairs


def cmd_fairness(args) -> int:
    rows, pairs = _summary_rows(args)
    bur_value = fairness.bur(pairs, args.tau_fair)
    count = len(rows)
    aggregate = Report(
        method=args.method,
        sparsity=args.sparsity,
        metrics={
            "bur": bur_value,
            "spd_second_order_mean": sum(r["spd_second_order"] for r in rows) / count,
            "uer_mean": sum(r["uer"] for r in rows) / count,
            "sof_mean": sum(r["sof"] for r in rows) / count,
        },
    )
    os.makedirs(args.out, exist_ok=True)
    doc = {"rows": rows, "aggregate": report_row_obj(aggregate)}
    path = os.path.join(args.out, "fairness.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    columns = list(rows[0])
    with open(os.path.join(args.out, "fairness.csv"), "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(repr(row[c]) if c != "index" else str(row[c]) for c in columns) + "\n")
    if not args.no_figures:
        from .figures import render_fairness_figures

        render_fairness_figures(rows, args.out)
    for name in sorted(aggregate.metrics):
        print("%s %.6f" % (name, aggregate.metrics[name]))
    print("wrote %s" % path)
    return 0


def cmd_rouge(args) -> int:
    with open(args.candidates, "r", encoding="utf-8") as fh:
        cands = [line.rstrip("\n") for line in fh]
    with open(args.references, "r", encoding="utf-8") as fh:
        refs = [line.rstrip("\n") for line in fh]
    if len(cands) != len(refs):
        raise ValueError("%d candidates but %d references" % (len(cands), len(refs)))
    if not cands:
        raise ValueError("no summary pairs to score")
    reports = []
    for idx, (cand_text, ref_text) in enumerate(zip(cands, refs)):
        cand = textmetrics.tokenize(cand_text)
        ref = textmetrics.tokenize(ref_text)
        metrics = {}
        for name, (p, r, f1) in (
            ("rouge1", textmetrics.rouge_n(cand, ref, 1)),
            ("rouge2", textmetrics.rouge_n(cand, ref, 2)),
            ("rougeL", textmetrics.rouge_l(cand, ref)),
        ):
            metrics[name + "_precision"] = p
            metrics[name + "_recall"] = r
            metrics[name + "_f1"] = f1
        reports.append(Report(method="pair_%03d" % idx, sparsity=0.0, metrics=metrics))
    means = {
        name: sum(r.metrics[name] for r in reports) / len(reports)
        for name in reports[0].metrics
    }
    for name in ("rouge1_f1", "rouge2_f1", "rougeL_f1"):
        print("%s %.6f" % (name, means[name]))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        reports.append(Report(method="mean", sparsity=0.0, metrics=means))
        with open(os.path.join(args.out, "rouge.json"), "w", encoding="utf-8") as fh:
            fh.write(reports_to_json(reports))
        with open(os.path.join(args.out, "rouge.csv"), "w", encoding="utf-8") as fh:
            fh.write(reports_to_csv(reports))
    return 0


def cmd_elo(args) -> int:
    records = rating.read_comparisons(args.comparisons)
    if not records:
        raise ValueError("no comparisons in %s" % args.comparisons)
    methods = sorted({m for rec in records for m in (rec.method_a, rec.method_b)})
    table = rating.new_table(methods, args.initial, args.k)
    rating.run_comparisons(table, records)
    sys.stdout.write(rating.format_table(table))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        doc = {
            "initial_rating": args.initial,
            "k_factor": args.k,
            "comparisons": table.comparisons_seen,
            "ratings": {m: table.ratings[m] for m in sorted(table.ratings)},
        }
        with open(os.path.join(args.out, "elo.json"), "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_kappa(args) -> int:
    rows = rating.read_vote_counts(args.votes)
    value = rating.fleiss_kappa(rows)
    print("fleiss_kappa %.6f" % value)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prunefair",
        description="Desk-scale pruning scores, calibration sets, and fairness metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_batch_args(p):
        p.add_argument("--net", required=True, help="directory of a saved network")
        p.add_argument("--inputs", required=True, help="batch inputs tensor file")
        p.add_argument("--targets", required=True, help="batch targets tensor file")
        p.add_argument("--alpha", type=float, default=scoring.DEFAULT_ALPHA)
        p.add_argument("--grad-norm-order", type=int, choices=(1, 2), default=2)

    p = sub.add_parser("score", help="write per-layer score tensors")
    add_batch_args(p)
    p.add_argument("--method", required=True, choices=scoring.METHODS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("prune", help="mask a network at one sparsity ratio")
    add_batch_args(p)
    p.add_argument("--method", required=True, choices=scoring.METHODS)
    p.add_argument("--ratio", type=float, required=True)
    p.add_argument("--granularity", choices=masking.GRANULARITIES, default="per_layer")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("sweep", help="evaluate methods across sparsity ratios")
    p.add_argument("--config", required=True, help="JSON sweep configuration")
    p.add_argument("--out", help="output directory (overrides config out_dir)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("calib-build", help="build a calibration set or test set")
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", required=True, choices=calib.KINDS + ("fairness_testset",))
    p.add_argument("--domain", required=True, choices=calib.DOMAINS)
    p.add_argument("--side", help="label for single_sided")
    p.add_argument("--pool", help="spd-indexed pool file for output-conditioned kinds")
    p.add_argument("--tau-spd", type=float, default=calib.DEFAULT_TAU_SPD)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_calib_build)

    p = sub.add_parser("fairness", help="score summaries against source collections")
    p.add_argument("--summaries", required=True, help="JSON lines with a text field")
    p.add_argument("--sources", required=True, help="calibration-set JSON lines")
    p.add_argument(
        "--channel",
        action="append",
        default=[],
        help="directory of channel_NNN.tensor similarity matrices (repeatable)",
    )
    p.add_argument("--value-a", help="label counted positive in SPD")
    p.add_argument("--value-b", help="label counted negative in SPD")
    p.add_argument("--tau-fair", type=float, default=fairness.DEFAULT_TAU_FAIR)
    p.add_argument("--method", default="unpruned", help="method tag for the report row")
    p.add_argument("--sparsity", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_fairness)

    p = sub.add_parser("rouge", help="overlap metrics for paired summary files")
    p.add_argument("--candidates", required=True, help="one summary per line")
    p.add_argument("--references", required=True, help="one reference per line")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rouge)

    p = sub.add_parser("elo", help="aggregate three-vote comparisons into ratings")
    p.add_argument("--comparisons", required=True)
    p.add_argument("--initial", type=float, default=rating.DEFAULT_INITIAL_RATING)
    p.add_argument("--k", type=float, default=rating.DEFAULT_K_FACTOR)
    p.add_argument("--out")
    p.set_defaults(func=cmd_elo)

    p = sub.add_parser("kappa", help="Fleiss' kappa over vote-count rows")
    p.add_argument("--votes", required=True)
    p.set_defaults(func=cmd_kappa)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # runtime failure: one parseable line, exit 1
        sys.stderr.write("error: %s: %s\n" % (type(exc).__name__, exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
