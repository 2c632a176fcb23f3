"""
API callbacks!
One function per CLI command; each returns {"success": bool, "message": str, ...}.
"""
import functools
import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from hierarchynet.modules.buildHcr import build_hcr
from hierarchynet.modules.corpus.converters import convert_corpus
from hierarchynet.modules.corpus.dataset import build_examples, read_jsonl, write_jsonl
from hierarchynet.modules.corpus.preprocess import preprocess_code
from hierarchynet.modules.graph.dependences import EdgeFlags
from hierarchynet.modules.graph.graphExport import graph_to_dot, reduced_tree_to_dot
from hierarchynet.modules.syntax.astNode import tree_to_json
from hierarchynet.modules.model.inputs import prepare_input
from hierarchynet.modules.runStore import get_runs_info, new_run_dir, resolve_run_dir
from hierarchynet.modules.training.ablation import ablation_table, run_ablation
from hierarchynet.modules.training.trainer import evaluate_run, load_run, train as train_run
from hierarchynet.utils.config import resolve_run_config
from hierarchynet.utils.errors import ConfigError, DataError, HierarchyNetError, MissingCheckpoint

logger = logging.getLogger(__name__)

LAYERS = ("ast", "subtrees", "graph", "gates")


def _callback(fn):
    """Library errors become {"success": False, ...} carrying the family exit code."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except HierarchyNetError as e:
            return {"success": False, "message": str(e), "error": type(e).__name__, "exit_code": e.exit_code}
    return wrapper


def _print_json(data) -> None:
    print(json.dumps(data, indent=2, ensure_ascii=False))


def _read_methods(path: Path) -> List[dict]:
    """A .jsonl corpus gives one entry per record; any other file is one method."""
    if path.suffix == ".jsonl":
        return [{"id": ex.id or str(i), "code": ex.code} for i, ex in enumerate(read_jsonl(path))]
    try:
        return [{"id": path.stem, "code": path.read_text(encoding="utf-8")}]
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e


# ======================================================================================

"""
Extract heterogeneous code representations for a whole corpus.
"""
@_callback
def extract(corpus, out, edges: Optional[EdgeFlags] = None, reverse_edges: bool = False,
            max_summary_len: Optional[int] = None, workers: int = 1):
    raw = read_jsonl(corpus)
    prepared, manifest = build_examples(raw, edges, max_summary_len, workers=workers, progress=True,
                                        reverse_edges=reverse_edges)
    records = []
    for ex in prepared:
        rec = {"id": ex.raw.id, "split": ex.split, "code": ex.code, "summary": ex.summary}
        rec.update(ex.bundle.to_record())
        records.append(rec)
    out = Path(out)
    n = write_jsonl(out, records)
    manifest_path = out.with_name(out.stem + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest.to_dict(), indent=2), encoding="utf-8")
    if n == 0:
        logger.warning(f"⚠️ no method of {corpus} could be extracted")
    print(f"✅ {n} records -> {out} ({manifest.n_skipped} skipped, manifest {manifest_path.name})")
    return {"success": True, "message": f"extracted {n} records", "records": n,
            "skipped": manifest.n_skipped, "manifest": str(manifest_path)}

#----------------------------------------

"""
Dump one layer of the representation (or gate scores of a trained run).
"""
@_callback
def inspect(method_file, layer: str = "ast", fmt: Optional[str] = None, run: Optional[str] = None,
            edges: Optional[EdgeFlags] = None):
    if layer not in LAYERS:
        raise ConfigError(f"unknown layer '{layer}'; choose from {LAYERS}")
    methods = _read_methods(Path(method_file))
    if layer == "gates":
        return _inspect_gates(methods, run)

    method = methods[0]
    bundle = build_hcr(preprocess_code(method["code"]), edges)
    if layer == "ast":
        _print_json(tree_to_json(bundle.tree))
    elif layer == "subtrees":
        if fmt == "dot":
            print(reduced_tree_to_dot(bundle.reduced, bundle.subtrees), end="")
        else:
            sizes = [len(st.node_ids) for st in bundle.subtrees]
            _print_json({
                "subtrees": [st.to_dict() for st in bundle.subtrees],
                "reduced_tree": bundle.reduced.to_dict(),
                "partition": {"subtree_sizes": sizes,
                              "reduced_tree_size": len(bundle.reduced.original_ids),
                              "tree_size": bundle.tree.size()},
            })
    else:
        if fmt == "json":
            _print_json(bundle.graph.to_dict())
        else:
            texts = {st.placeholder_id: st.text() for st in bundle.subtrees}
            print(graph_to_dot(bundle.graph, texts), end="")
    return {"success": True, "message": f"{layer} of {method['id']}"}


def _inspect_gates(methods: Sequence[dict], run: Optional[str]):
    if run is None:
        raise MissingCheckpoint("no --run given for --layer gates")
    config, vocabs, model = load_run(resolve_run_dir(run))
    if not config.model.use_subtrees or config.model.decoding == "concat":
        raise ConfigError("this run has no gating layer")
    entries = []
    for method in methods:
        bundle = build_hcr(preprocess_code(method["code"]), config.model.edges)
        inp = prepare_input(bundle, vocabs.source, flags=config.model.edges,
                            reverse_edges=config.model.reverse_edges)
        lam = model.gate_scores(inp)
        if config.model.gating_mode == "scalar":
            entries.append({"id": method["id"], "lambda": float(lam[0])})
        else:
            entries.append({"id": method["id"], "lambda_mean": float(np.mean(lam)),
                            "lambda": [float(x) for x in lam]})
    scores = [e.get("lambda_mean", e["lambda"]) for e in entries]
    _print_json({"mode": config.model.gating_mode, "gates": entries})
    print(f"λ min={min(scores):.4f} mean={float(np.mean(scores)):.4f} max={max(scores):.4f}")
    return {"success": True, "message": f"gate scores for {len(entries)} methods", "gates": entries}

#----------------------------------------

"""
Train a model; outputs land in a fresh run directory unless one is given.
"""
@_callback
def train(corpus, run_dir=None, preset=None, config=None, overrides=None, max_steps=None):
    run_config = resolve_run_config(preset, config, overrides)
    run_config.corpus = str(corpus)
    run_dir = Path(run_dir) if run_dir else new_run_dir(preset or "run")
    raw = read_jsonl(corpus)
    print(f"🔨 training into {run_dir}")
    result = train_run(run_config, raw, run_dir, max_steps=max_steps)
    print(f"✅ best valid BLEU-4 {result.best_bleu:.2f} (epoch {result.best_epoch}) -> {result.checkpoint}")
    return {"success": True, "message": "training finished", **result.to_dict()}

#----------------------------------------

"""
Score a trained run on one split of a corpus.
"""
@_callback
def evaluate(run, corpus, split: str = "test", checkpoint=None, fmt: str = "table"):
    run_dir = resolve_run_dir(run)
    report = evaluate_run(run_dir, corpus, split, checkpoint)
    (run_dir / f"eval_{split}.json").write_text(report.to_json(), encoding="utf-8")
    if fmt == "json":
        print(report.to_json())
    else:
        print(report.to_table(), end="")
    return {"success": True, "message": f"evaluated {report.count} examples",
            "bleu4": report.bleu4, "rouge_l": report.rouge_l, "f1": report.f1}

#----------------------------------------

"""
Train and score the representation ablation rows.
"""
@_callback
def ablate(corpus, rows=None, out_dir=None, preset=None, config=None, overrides=None,
           split=None, max_steps=None):
    base = resolve_run_config(preset, config, overrides)
    base.corpus = str(corpus)
    out_dir = Path(out_dir) if out_dir else new_run_dir("ablation")
    results = run_ablation(base, read_jsonl(corpus), out_dir, rows, split, max_steps)
    (out_dir / "ablation.json").write_text(json.dumps([r.to_dict() for r in results], indent=2),
                                           encoding="utf-8")
    print(ablation_table(results), end="")
    return {"success": True, "message": f"{len(results)} ablation rows", "rows": [r.to_dict() for r in results]}

#----------------------------------------

"""
Convert a public corpus layout into canonical JSONL.
"""
@_callback
def convert(name, directory, out):
    n = convert_corpus(name, directory, out)
    print(f"✅ {n} examples -> {out}")
    return {"success": True, "message": f"converted {n} examples", "records": n}

#----------------------------------------

"""
List run directories.
"""
@_callback
def runs(parent=None):
    info = get_runs_info(parent)
    _print_json(info)
    return {"success": True, "message": f"{len(info['runs'])} runs", **info}

#----------------------------------------

"""
Get version from package metadata
"""
def version():
    try:
        import importlib.metadata
        # Get version from installed package metadata
        v = importlib.metadata.version('hierarchynet')
    except Exception:
        # Fallback if package not installed or other error
        v = "0.1.0"
    print(v)
    return {"success": True, "message": v}
