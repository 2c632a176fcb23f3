"""
DiffArray
Dense numpy-backed array that records the operations applied to it so that
`backward()` can fill in exact reverse-mode gradients.
"""
import contextlib
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from hierarchynet.utils.errors import NotScalar, ShapeMismatch

_DEFAULT_DTYPE = np.float64
_GRAD_ENABLED = True


def set_default_dtype(dtype) -> None:
    global _DEFAULT_DTYPE
    dtype = np.dtype(dtype)
    if dtype not in (np.dtype(np.float64), np.dtype(np.float32)):
        raise ValueError(f"unsupported dtype {dtype}")
    _DEFAULT_DTYPE = dtype.type


def get_default_dtype():
    return _DEFAULT_DTYPE


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Operations inside the block record nothing (inference)."""
    global _GRAD_ENABLED
    previous = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = previous


ArrayLike = Union["DiffArray", np.ndarray, float, int, Sequence]


class DiffArray:
    __slots__ = ("values", "grad", "requires_grad", "_parents", "_backward", "op", "name")

    def __init__(self, values, requires_grad: bool = False, parents: Tuple["DiffArray", ...] = (),
                 backward: Optional[Callable[[np.ndarray], None]] = None, op: str = "leaf",
                 name: Optional[str] = None):
        arr = np.asarray(values)
        if arr.dtype.kind != "f" or (op == "leaf" and arr.dtype != _DEFAULT_DTYPE):
            arr = arr.astype(_DEFAULT_DTYPE)
        self.values = arr
        self.requires_grad = requires_grad
        self.grad = np.zeros_like(arr) if (requires_grad and op == "leaf") else None
        self._parents = parents
        self._backward = backward
        self.op = op
        self.name = name

    # -----------------------------------------------------------------------------
    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def is_leaf(self) -> bool:
        return self.op == "leaf"

    def __len__(self) -> int:
        return self.values.shape[0]

    def __repr__(self) -> str:
        name = f" {self.name}" if self.name else ""
        return f"DiffArray{name}(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad})"

    def numpy(self) -> np.ndarray:
        return self.values

    def item(self) -> float:
        return float(self.values.reshape(-1)[0]) if self.values.size == 1 else float("nan")

    def zero_grad(self) -> None:
        if self.requires_grad:
            self.grad = np.zeros_like(self.values)

    def detach(self) -> "DiffArray":
        return DiffArray(self.values.copy())

    # -----------------------------------------------------------------------------
    def backward(self) -> None:
        """Accumulate d(self)/d(leaf) into every requires-grad leaf's `grad`."""
        if self.values.size != 1:
            raise NotScalar(self.shape)
        if not self.requires_grad:
            return
        order = _topological_order(self)
        for node in order:
            if not node.is_leaf:
                node.grad = np.zeros_like(node.values)
        if self.is_leaf:
            self.grad += 1.0
            return
        self.grad = np.ones_like(self.values)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -----------------------------------------------------------------------------
    # operator sugar

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __neg__(self):
        return scale(self, -1.0)

    def __truediv__(self, other):
        if isinstance(other, DiffArray):
            raise TypeError("division by DiffArray is not supported")
        return scale(self, 1.0 / float(other))

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return index_select(self, index)

    @property
    def T(self) -> "DiffArray":
        return transpose(self)

    def sum(self, axis=None, keepdims: bool = False) -> "DiffArray":
        return reduce_sum(self, axis, keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "DiffArray":
        return reduce_mean(self, axis, keepdims)

    def reshape(self, *shape) -> "DiffArray":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)


def _topological_order(root: DiffArray) -> List[DiffArray]:
    order: List[DiffArray] = []
    seen = set()
    stack: List[Tuple[DiffArray, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in seen:
                stack.append((parent, False))
    return order


# ---------------------------------------------------------------------------------------
# construction helpers

def as_diff(x: ArrayLike) -> DiffArray:
    return x if isinstance(x, DiffArray) else DiffArray(np.asarray(x, dtype=_DEFAULT_DTYPE))


def parameter(values, name: Optional[str] = None) -> DiffArray:
    return DiffArray(np.array(values, dtype=_DEFAULT_DTYPE), requires_grad=True, name=name)


def constant(values) -> DiffArray:
    return DiffArray(np.array(values, dtype=_DEFAULT_DTYPE))


def zeros(shape) -> DiffArray:
    return DiffArray(np.zeros(shape, dtype=_DEFAULT_DTYPE))


def _make(values: np.ndarray, parents: Iterable[DiffArray], backward, op: str) -> DiffArray:
    parents = tuple(parents)
    needs = _GRAD_ENABLED and any(p.requires_grad for p in parents)
    return DiffArray(values, requires_grad=needs, parents=parents if needs else (),
                     backward=backward if needs else None, op=op)


def _accumulate(node: DiffArray, grad: np.ndarray) -> None:
    if not node.requires_grad:
        return
    if node.grad is None:
        node.grad = np.zeros_like(node.values)
    node.grad += grad


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_broadcast(op: str, a: DiffArray, b: DiffArray) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeMismatch(op, b.shape, a.shape) from None


# ---------------------------------------------------------------------------------------
# elementwise arithmetic

def add(a: ArrayLike, b: ArrayLike) -> DiffArray:
    a, b = as_diff(a), as_diff(b)
    _check_broadcast("add", a, b)

    def backward(g):
        _accumulate(a, _unbroadcast(g, a.shape))
        _accumulate(b, _unbroadcast(g, b.shape))

    return _make(a.values + b.values, (a, b), backward, "add")


def sub(a: ArrayLike, b: ArrayLike) -> DiffArray:
    a, b = as_diff(a), as_diff(b)
    _check_broadcast("sub", a, b)

    def backward(g):
        _accumulate(a, _unbroadcast(g, a.shape))
        _accumulate(b, _unbroadcast(-g, b.shape))

    return _make(a.values - b.values, (a, b), backward, "sub")


def mul(a: ArrayLike, b: ArrayLike) -> DiffArray:
    a, b = as_diff(a), as_diff(b)
    _check_broadcast("mul", a, b)

    def backward(g):
        _accumulate(a, _unbroadcast(g * b.values, a.shape))
        _accumulate(b, _unbroadcast(g * a.values, b.shape))

    return _make(a.values * b.values, (a, b), backward, "mul")


def scale(a: ArrayLike, c: float) -> DiffArray:
    a = as_diff(a)
    c = float(c)

    def backward(g):
        _accumulate(a, g * c)

    return _make(a.values * c, (a,), backward, "scale")


# ---------------------------------------------------------------------------------------
# linear algebra and shape

def matmul(a: ArrayLike, b: ArrayLike) -> DiffArray:
    a, b = as_diff(a), as_diff(b)
    if a.ndim < 1 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeMismatch("matmul", b.shape, (a.shape[-1] if a.ndim else None, "*"))

    def backward(g):
        av, bv = a.values, b.values
        if av.ndim == 1:
            ga = g @ np.swapaxes(bv, -1, -2)
            gb = np.outer(av, g) if bv.ndim == 2 else av[:, None] * g[..., None, :]
        else:
            ga = g @ np.swapaxes(bv, -1, -2)
            gb = np.swapaxes(av, -1, -2) @ g
        _accumulate(a, _unbroadcast(ga, a.shape))
        _accumulate(b, _unbroadcast(gb, b.shape))

    return _make(a.values @ b.values, (a, b), backward, "matmul")


def transpose(a: ArrayLike, axes: Optional[Sequence[int]] = None) -> DiffArray:
    a = as_diff(a)
    if axes is None:
        axes = tuple(reversed(range(a.ndim)))
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))

    def backward(g):
        _accumulate(a, np.transpose(g, inverse))

    return _make(np.transpose(a.values, axes), (a,), backward, "transpose")


def reshape(a: ArrayLike, shape: Sequence[int]) -> DiffArray:
    a = as_diff(a)
    try:
        out = a.values.reshape(shape)
    except ValueError:
        raise ShapeMismatch("reshape", tuple(shape), a.shape) from None

    def backward(g):
        _accumulate(a, g.reshape(a.shape))

    return _make(out, (a,), backward, "reshape")


def concat(items: Sequence[ArrayLike], axis: int = 0) -> DiffArray:
    items = [as_diff(x) for x in items]
    if not items:
        raise ShapeMismatch("concat", (), "at least one array")
    ref = items[0].shape
    ax = axis % len(ref)
    for x in items[1:]:
        if len(x.shape) != len(ref) or any(x.shape[i] != ref[i] for i in range(len(ref)) if i != ax):
            raise ShapeMismatch("concat", x.shape, ref)
    sizes = [x.shape[ax] for x in items]
    bounds = np.cumsum([0] + sizes)

    def backward(g):
        for x, lo, hi in zip(items, bounds[:-1], bounds[1:]):
            sl = [slice(None)] * g.ndim
            sl[ax] = slice(lo, hi)
            _accumulate(x, g[tuple(sl)])

    return _make(np.concatenate([x.values for x in items], axis=ax), items, backward, "concat")


def index_select(a: ArrayLike, index) -> DiffArray:
    """Basic or fancy indexing (`a[index]`); gradients scatter-add back."""
    a = as_diff(a)
    if isinstance(index, DiffArray):
        raise TypeError("index must be an int, slice or integer array")
    out = a.values[index]

    def backward(g):
        full = np.zeros_like(a.values)
        np.add.at(full, index, g)
        _accumulate(a, full)

    return _make(np.array(out, copy=True), (a,), backward, "slice")


def slice_rows(a: ArrayLike, start: int, stop: int) -> DiffArray:
    return index_select(a, slice(start, stop))


def reduce_sum(a: ArrayLike, axis=None, keepdims: bool = False) -> DiffArray:
    a = as_diff(a)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        _accumulate(a, np.broadcast_to(g, a.shape).copy())

    return _make(np.asarray(a.values.sum(axis=axis, keepdims=keepdims)), (a,), backward, "sum")


def reduce_mean(a: ArrayLike, axis=None, keepdims: bool = False) -> DiffArray:
    a = as_diff(a)
    count = a.values.size if axis is None else np.prod([a.shape[i] for i in np.atleast_1d(axis)])
    return scale(reduce_sum(a, axis, keepdims), 1.0 / float(count))
