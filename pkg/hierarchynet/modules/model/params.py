"""
Named parameter storage shared by every layer of the model.
"""
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from hierarchynet.modules.numeric.diffArray import DiffArray, get_default_dtype
from hierarchynet.utils.errors import ConfigError


class ParamStore:
    """
    Flat name -> DiffArray map. Names are dotted paths ("enc.0.attn.W_q") and each
    may be registered once.
    """

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)
        self._params: Dict[str, DiffArray] = {}

    def add(self, name: str, shape: Tuple[int, ...], init: str = "xavier",
            scale: Optional[float] = None) -> DiffArray:
        if name in self._params:
            raise ConfigError(f"parameter '{name}' registered twice")
        dtype = get_default_dtype()
        if init == "zeros":
            values = np.zeros(shape, dtype=dtype)
        elif init == "ones":
            values = np.ones(shape, dtype=dtype)
        elif init == "normal":
            values = self.rng.normal(0.0, scale if scale is not None else 0.02, size=shape).astype(dtype)
        elif init == "xavier":
            fan_in, fan_out = shape[-2] if len(shape) > 1 else shape[-1], shape[-1]
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            values = self.rng.uniform(-bound, bound, size=shape).astype(dtype)
        else:
            raise ConfigError(f"unknown init '{init}'")
        param = DiffArray(values, requires_grad=True, name=name)
        self._params[name] = param
        return param

    def __getitem__(self, name: str) -> DiffArray:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def __len__(self) -> int:
        return len(self._params)

    def named(self) -> Dict[str, DiffArray]:
        return self._params

    def grads(self) -> Dict[str, np.ndarray]:
        return {n: p.grad for n, p in self._params.items() if p.grad is not None}

    def zero_grad(self) -> None:
        for p in self._params.values():
            p.zero_grad()

    def count(self) -> int:
        return int(sum(p.size for p in self._params.values()))
