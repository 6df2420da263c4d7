"""Reverse-mode automatic differentiation over numpy arrays.

A :class:`Tensor` wraps a float64 ndarray and records the operations that
produced it. Calling :meth:`Tensor.backward` on a scalar result walks the
tape in reverse topological order and accumulates gradients into every
tensor created with ``requires_grad=True``.

Only the operations the trajectory models actually need are implemented:
broadcast arithmetic, (batched) matmul, reshapes, slicing, concatenation,
reductions and a handful of pointwise nonlinearities. Everything is
single-threaded and deterministic for a fixed input.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

DTYPE = np.float64

_GRAD_ENABLED = True


class no_grad:
    """Context manager: skip tape construction for pure inference passes."""

    def __enter__(self):
        global _GRAD_ENABLED
        self._prev = _GRAD_ENABLED
        _GRAD_ENABLED = False
        return self

    def __exit__(self, *exc):
        global _GRAD_ENABLED
        _GRAD_ENABLED = self._prev
        return False


class ShapeError(ValueError):
    """Raised when an operation receives incompatible shapes."""


def _shape_err(op: str, *shapes: tuple) -> ShapeError:
    return ShapeError(f"{op}: incompatible shapes {' vs '.join(str(s) for s in shapes)}")


def unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce ``grad`` back to ``shape`` by summing over broadcast axes."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    if grad.shape != shape:
        raise _shape_err("unbroadcast", grad.shape, shape)
    return grad


class Tensor:
    """A node in the computation graph."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "name")

    # make numpy defer to our reflected operators (ndarray + Tensor etc.)
    __array_ufunc__ = None

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        arr = np.asarray(data, dtype=DTYPE)
        self.data = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None
        self.name = name

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def _node(data: np.ndarray, parents: tuple["Tensor", ...], backward) -> "Tensor":
        out = Tensor(data)
        if _GRAD_ENABLED and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = parents
            out._backward = backward
        return out

    # -- basic properties ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def __repr__(self) -> str:
        tag = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{tag}, grad={'set' if self.grad is not None else 'none'})"

    # -- backward pass ----------------------------------------------------------

    def backward(self, seed: np.ndarray | None = None) -> None:
        """Accumulate gradients of this tensor w.r.t. every grad-requiring leaf.

        ``seed`` defaults to 1 and must match this tensor's shape; the usual
        call site is a scalar loss.
        """
        if not self.requires_grad:
            raise RuntimeError("backward() on a tensor that does not require grad")
        if seed is None:
            if self.size != 1:
                raise RuntimeError("backward() without seed requires a scalar tensor")
            seed = np.ones_like(self.data)
        else:
            seed = np.asarray(seed, dtype=DTYPE)
            if seed.shape != self.shape:
                raise _shape_err("backward seed", seed.shape, self.shape)

        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:  # iterative DFS; graphs can be deep (GRU unroll)
            node, processed = stack.pop()
            if processed:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in seen:
                    stack.append((p, False))

        grads: dict[int, np.ndarray] = {id(self): seed}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is not None:
                for parent, pg in zip(node._parents, node._backward(g)):
                    if pg is None or not parent.requires_grad:
                        continue
                    if id(parent) in grads:
                        grads[id(parent)] = grads[id(parent)] + pg
                    else:
                        grads[id(parent)] = pg
            else:
                # leaf: accumulate into .grad
                if node.grad is None:
                    node.grad = g.copy()
                else:
                    node.grad = node.grad + g

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other):
        other = as_tensor(other)
        a, b = self, other
        data = a.data + b.data
        return Tensor._node(
            data, (a, b),
            lambda g: (unbroadcast(g, a.shape), unbroadcast(g, b.shape)),
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = as_tensor(other)
        a, b = self, other
        data = a.data - b.data
        return Tensor._node(
            data, (a, b),
            lambda g: (unbroadcast(g, a.shape), unbroadcast(-g, b.shape)),
        )

    def __rsub__(self, other):
        return as_tensor(other).__sub__(self)

    def __mul__(self, other):
        other = as_tensor(other)
        a, b = self, other
        data = a.data * b.data
        return Tensor._node(
            data, (a, b),
            lambda g: (unbroadcast(g * b.data, a.shape), unbroadcast(g * a.data, b.shape)),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_tensor(other)
        a, b = self, other
        data = a.data / b.data
        return Tensor._node(
            data, (a, b),
            lambda g: (
                unbroadcast(g / b.data, a.shape),
                unbroadcast(-g * a.data / (b.data * b.data), b.shape),
            ),
        )

    def __rtruediv__(self, other):
        return as_tensor(other).__truediv__(self)

    def __neg__(self):
        a = self
        return Tensor._node(-a.data, (a,), lambda g: (-g,))

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, float)):
            raise TypeError("Tensor ** only supports scalar exponents")
        a, p = self, float(exponent)
        data = a.data ** p
        return Tensor._node(data, (a,), lambda g: (g * p * a.data ** (p - 1.0),))

    def __matmul__(self, other):
        return matmul(self, as_tensor(other))

    def __rmatmul__(self, other):
        return matmul(as_tensor(other), self)

    def __getitem__(self, key):
        a = self
        data = a.data[key]

        def backward(g):
            full = np.zeros_like(a.data)
            np.add.at(full, key, g)
            return (full,)

        return Tensor._node(np.ascontiguousarray(data), (a,), backward)

    # -- shape ops -----------------------------------------------------------------

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        a = self
        orig = a.shape
        return Tensor._node(a.data.reshape(shape), (a,), lambda g: (g.reshape(orig),))

    def transpose(self, axes: Sequence[int]):
        a = self
        axes = tuple(axes)
        inv = tuple(np.argsort(axes))
        return Tensor._node(
            np.ascontiguousarray(a.data.transpose(axes)), (a,),
            lambda g: (g.transpose(inv),),
        )

    def broadcast_to(self, shape):
        a = self
        shape = tuple(shape)
        data = np.broadcast_to(a.data, shape).copy()
        return Tensor._node(data, (a,), lambda g: (unbroadcast(g, a.shape),))

    # -- reductions ------------------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False):
        a = self
        data = a.data.sum(axis=axis, keepdims=keepdims)

        def backward(g):
            if axis is None:
                return (np.broadcast_to(g, a.shape).copy(),)
            ax = axis if isinstance(axis, tuple) else (axis,)
            if not keepdims:
                g = np.expand_dims(g, ax)
            return (np.broadcast_to(g, a.shape).copy(),)

        return Tensor._node(data, (a,), backward)

    def mean(self, axis=None, keepdims: bool = False):
        a = self
        if axis is None:
            count = a.size
        else:
            ax = axis if isinstance(axis, tuple) else (axis,)
            count = int(np.prod([a.shape[i] for i in ax]))
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    # -- pointwise nonlinearities -------------------------------------------------------

    def exp(self):
        a = self
        data = np.exp(a.data)
        return Tensor._node(data, (a,), lambda g: (g * data,))

    def log(self):
        a = self
        return Tensor._node(np.log(a.data), (a,), lambda g: (g / a.data,))

    def sqrt(self):
        a = self
        data = np.sqrt(a.data)
        return Tensor._node(data, (a,), lambda g: (g * 0.5 / data,))

    def tanh(self):
        a = self
        data = np.tanh(a.data)
        return Tensor._node(data, (a,), lambda g: (g * (1.0 - data * data),))

    def sigmoid(self):
        a = self
        data = 1.0 / (1.0 + np.exp(-a.data))
        return Tensor._node(data, (a,), lambda g: (g * data * (1.0 - data),))


def as_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Batched matrix product with numpy broadcasting over leading axes."""
    if a.ndim < 2 or b.ndim < 2:
        raise _shape_err("matmul (needs ndim >= 2)", a.shape, b.shape)
    if a.shape[-1] != b.shape[-2]:
        raise _shape_err("matmul", a.shape, b.shape)
    data = np.matmul(a.data, b.data)

    def backward(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return (unbroadcast(ga, a.shape), unbroadcast(gb, b.shape))

    return Tensor._node(data, (a, b), backward)


def concat(tensors: Iterable[Tensor], axis: int = 0) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    if not parts:
        raise ValueError("concat: empty input")
    data = np.concatenate([p.data for p in parts], axis=axis)
    sizes = [p.shape[axis] for p in parts]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.ascontiguousarray(piece) for piece in np.split(g, splits, axis=axis))

    return Tensor._node(data, tuple(parts), backward)


def stack(tensors: Iterable[Tensor], axis: int = 0) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    data = np.stack([p.data for p in parts], axis=axis)

    def backward(g):
        return tuple(np.ascontiguousarray(s) for s in np.moveaxis(g, axis, 0))

    return Tensor._node(data, tuple(parts), backward)


def relu(x: Tensor) -> Tensor:
    x = as_tensor(x)
    mask = x.data > 0
    return Tensor._node(np.where(mask, x.data, 0.0), (x,), lambda g: (g * mask,))


def zeros(shape, requires_grad: bool = False) -> Tensor:
    return Tensor(np.zeros(shape, dtype=DTYPE), requires_grad=requires_grad)
