"""Method sources and small utilities shared across the test modules."""
from pathlib import Path
from typing import Callable, Dict

import numpy as np

from hierarchynet.modules.numeric.diffArray import DiffArray, mul, no_grad, reduce_sum

MAX_METHOD = "public int max(int a, int b) { int max = a; if (a < b) { max = b; } return max; }"

COLLECT_METHOD = """public void collect(int[] nums, List<Integer> array) {
    int num = 0;
    int size = nums.length;
    for (int i = 0; i < size; i++) {
        if ((num = nums[i]) > 0) {
            array.add(num);
            print(num);
        }
    }
}"""

GRAD_EPS = 1e-5
GRAD_TOL = 1e-4


def unit(bundle, prefix: str) -> int:
    """Placeholder id of the one subtree whose text starts with `prefix`."""
    hits = [st.placeholder_id for st in bundle.subtrees if st.text().startswith(prefix)]
    assert len(hits) == 1, f"{prefix!r} matched {len(hits)} subtrees"
    return hits[0]


def projection(out: DiffArray, seed: int = 7) -> Callable[[DiffArray], DiffArray]:
    """Fixed random weighting that turns any output into a scalar objective."""
    weights = np.random.default_rng(seed).normal(size=out.shape)
    return lambda y: reduce_sum(mul(y, DiffArray(weights)))


def max_gradient_error(objective: Callable[[], DiffArray], params: Dict[str, DiffArray],
                       samples: int = 4, seed: int = 0) -> float:
    """
    Largest relative error between backprop gradients and central differences,
    checked on `samples` random entries of every parameter array.
    """
    for p in params.values():
        p.zero_grad()
    objective().backward()
    analytic = {name: p.grad.copy() for name, p in params.items()}

    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, p in params.items():
        flat = p.values.reshape(-1)
        picks = rng.choice(flat.size, size=min(samples, flat.size), replace=False)
        for i in picks:
            original = flat[i]
            with no_grad():
                flat[i] = original + GRAD_EPS
                up = float(objective().values)
                flat[i] = original - GRAD_EPS
                down = float(objective().values)
            flat[i] = original
            numeric = (up - down) / (2 * GRAD_EPS)
            a = float(analytic[name].reshape(-1)[i])
            err = abs(a - numeric) / max(abs(a) + abs(numeric), 1e-5)
            worst = max(worst, err)
    return worst

TOY_CORPUS = Path(__file__).resolve().parents[1] / "hierarchynet" / "data" / "toy_corpus.jsonl"

# smallest run config the trainer accepts, merged over the toy preset
TINY_RUN = {
    "model": {"d": 8, "heads": 2, "enc_layers": 1, "dec_layers": 1, "hgt_layers": 1, "max_tgt_len": 8},
    "optim": {"lr": 1e-2, "warmup_steps": 5},
    "train": {"epochs": 1, "batch_size": 2, "src_vocab_size": 150, "tgt_vocab_size": 80},
}
