"""
Representation ablation rows: which layers and edge types each row enables, and a
runner that trains and evaluates every requested row in its own run directory.
"""
import copy
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from hierarchynet.modules.corpus.dataset import RawExample
from hierarchynet.modules.evaluation.metrics import EvalReport
from hierarchynet.modules.graph.dependences import EdgeFlags
from hierarchynet.modules.training.trainer import evaluate_model, load_run, split_inputs, train
from hierarchynet.utils.config import RunConfig
from hierarchynet.utils.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AblationRow:
    row: int
    label: str
    use_subtrees: bool
    use_graph: bool
    edges: Optional[EdgeFlags] = None

    def apply(self, base: RunConfig) -> RunConfig:
        config = copy.deepcopy(base)
        config.model.use_subtrees = self.use_subtrees
        config.model.use_graph = self.use_graph
        if self.edges is not None:
            config.model.edges = EdgeFlags(**self.edges.to_dict())
        return config.validate()


def _graph_row(row: int, label: str, ns: bool, cd: bool, df: bool) -> AblationRow:
    return AblationRow(row, label, True, True, EdgeFlags(use_ast=True, use_ns=ns, use_cd=cd, use_df=df))


ABLATION_ROWS: Dict[int, AblationRow] = {r.row: r for r in (
    AblationRow(1, "tokens", False, False),
    AblationRow(2, "tokens+subtrees", True, False),
    _graph_row(3, "AST", ns=False, cd=False, df=False),
    _graph_row(4, "AST+CD", ns=False, cd=True, df=False),
    _graph_row(5, "AST+DF", ns=False, cd=False, df=True),
    _graph_row(6, "AST+CD+DF", ns=False, cd=True, df=True),
    _graph_row(7, "AST+NS", ns=True, cd=False, df=False),
    _graph_row(8, "AST+NS+CD", ns=True, cd=True, df=False),
    _graph_row(9, "AST+NS+DF", ns=True, cd=False, df=True),
    _graph_row(10, "AST+NS+CD+DF", ns=True, cd=True, df=True),
)}


def ablation_row(row: int) -> AblationRow:
    try:
        return ABLATION_ROWS[row]
    except KeyError:
        raise ConfigError(f"unknown ablation row {row}; rows are 1-{len(ABLATION_ROWS)}") from None


def ablation_config(base: RunConfig, row: int) -> RunConfig:
    return ablation_row(row).apply(base)


@dataclass
class AblationResult:
    row: int
    label: str
    run_dir: str
    report: EvalReport

    def to_dict(self) -> dict:
        return {"row": self.row, "label": self.label, "run_dir": self.run_dir,
                "bleu4": self.report.bleu4, "rouge_l": self.report.rouge_l, "f1": self.report.f1,
                "count": self.report.count}


def run_ablation(base: RunConfig, raw: Sequence[RawExample], out_dir: Union[str, Path],
                 rows: Optional[Sequence[int]] = None, eval_split: Optional[str] = None,
                 max_steps: Optional[int] = None) -> List[AblationResult]:
    """Train each row under `out_dir/row-<n>` and score its best checkpoint on `eval_split`."""
    out_dir = Path(out_dir)
    rows = list(rows) if rows else sorted(ABLATION_ROWS)
    split = eval_split or base.train.eval_split
    results: List[AblationResult] = []
    for row in rows:
        spec = ablation_row(row)
        run_dir = out_dir / f"row-{row}"
        logger.info(f"🔨 ablation row {row} ({spec.label})")
        train(spec.apply(base), raw, run_dir, max_steps=max_steps)
        config, vocabs, model = load_run(run_dir)
        inputs = split_inputs(config, vocabs, raw, split)
        if not inputs:
            logger.warning(f"⚠️ no '{split}' examples; row {row} is scored on the training split")
            inputs = split_inputs(config, vocabs, raw, "train")
        results.append(AblationResult(row, spec.label, str(run_dir), evaluate_model(model, inputs, vocabs)))
    return results


def ablation_table(results: Sequence[AblationResult]) -> str:
    lines = [f"{'row':<5}{'representation':<16}{'BLEU-4':>10}{'ROUGE-L':>10}{'F1':>10}"]
    for r in results:
        lines.append(f"{r.row:<5}{r.label:<16}{r.report.bleu4:>10.2f}{r.report.rouge_l:>10.2f}{r.report.f1:>10.2f}")
    return "\n".join(lines) + "\n"
