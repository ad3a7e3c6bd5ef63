"""Minimal reverse-mode automatic differentiation over numpy arrays.

Just enough machinery for small MLP policies: a Tensor wrapping a float64
ndarray, the handful of ops the PPO loss needs, an Adam optimizer, and a
finite-difference gradient checker.  Broadcasting in forward ops is undone
in the backward pass by summing gradients down to the parent's shape.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    __slots__ = ("data", "grad", "_parents", "_backward")

    def __init__(self, data, parents: tuple = ()):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self._parents = parents
        self._backward: Callable[[], None] | None = None

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(shape={self.data.shape})"

    # -- graph walk ---------------------------------------------------------

    def backward(self) -> None:
        if self.data.size != 1:
            raise ValueError("backward() requires a scalar loss")
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        for node in topo:
            node.grad = np.zeros_like(node.data)
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None:
                node._backward()

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = as_tensor(other)
        out = Tensor(self.data + other.data, (self, other))

        def bw():
            self.grad += _unbroadcast(out.grad, self.data.shape)
            other.grad += _unbroadcast(out.grad, other.data.shape)

        out._backward = bw
        return out

    __radd__ = __add__

    def __mul__(self, other):
        other = as_tensor(other)
        out = Tensor(self.data * other.data, (self, other))

        def bw():
            self.grad += _unbroadcast(out.grad * other.data, self.data.shape)
            other.grad += _unbroadcast(out.grad * self.data, other.data.shape)

        out._backward = bw
        return out

    __rmul__ = __mul__

    def __neg__(self):
        out = Tensor(-self.data, (self,))

        def bw():
            self.grad += -out.grad

        out._backward = bw
        return out

    def __sub__(self, other):
        return self + (-as_tensor(other))

    def __rsub__(self, other):
        return as_tensor(other) + (-self)

    def __truediv__(self, scalar):
        if isinstance(scalar, Tensor):
            raise TypeError("division only supported by python scalars")
        return self * (1.0 / float(scalar))

    def __matmul__(self, other):
        if self.data.ndim != 2 or other.data.ndim != 2:
            raise ValueError("matmul supports 2-D operands only")
        out = Tensor(self.data @ other.data, (self, other))

        def bw():
            self.grad += out.grad @ other.data.T
            other.grad += self.data.T @ out.grad

        out._backward = bw
        return out

    # -- elementwise --------------------------------------------------------

    def tanh(self):
        y = np.tanh(self.data)
        out = Tensor(y, (self,))

        def bw():
            self.grad += out.grad * (1.0 - y * y)

        out._backward = bw
        return out

    def exp(self):
        y = np.exp(self.data)
        out = Tensor(y, (self,))

        def bw():
            self.grad += out.grad * y

        out._backward = bw
        return out

    def clip(self, lo: float, hi: float):
        out = Tensor(np.clip(self.data, lo, hi), (self,))
        mask = (self.data >= lo) & (self.data <= hi)

        def bw():
            self.grad += out.grad * mask

        out._backward = bw
        return out

    # -- shape & reductions --------------------------------------------------

    def reshape(self, *shape):
        out = Tensor(self.data.reshape(*shape), (self,))

        def bw():
            self.grad += out.grad.reshape(self.data.shape)

        out._backward = bw
        return out

    def sum(self, axis=None, keepdims=False):
        out = Tensor(self.data.sum(axis=axis, keepdims=keepdims), (self,))

        def bw():
            g = out.grad
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            self.grad += np.broadcast_to(g, self.data.shape)

        out._backward = bw
        return out

    def mean(self):
        out = Tensor(self.data.mean(), (self,))

        def bw():
            self.grad += out.grad / self.data.size

        out._backward = bw
        return out


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def log_softmax(x: Tensor) -> Tensor:
    """Numerically stable log-softmax over the last axis."""
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    y = shifted - log_z
    out = Tensor(y, (x,))

    def bw():
        g = out.grad
        x.grad += g - np.exp(y) * g.sum(axis=-1, keepdims=True)

    out._backward = bw
    return out


def gather_last(x: Tensor, index: np.ndarray) -> Tensor:
    """Pick one entry along the last axis; index has x's shape minus it."""
    index = np.asarray(index, dtype=np.int64)
    out = Tensor(
        np.take_along_axis(x.data, index[..., None], axis=-1)[..., 0], (x,)
    )

    def bw():
        scattered = np.zeros_like(x.data)
        np.put_along_axis(scattered, index[..., None], out.grad[..., None], axis=-1)
        x.grad += scattered

    out._backward = bw
    return out


def minimum(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise min; gradient follows the smaller operand (ties go to a)."""
    a, b = as_tensor(a), as_tensor(b)
    out = Tensor(np.minimum(a.data, b.data), (a, b))
    take_a = a.data <= b.data

    def bw():
        a.grad += _unbroadcast(out.grad * take_a, a.data.shape)
        b.grad += _unbroadcast(out.grad * ~take_a, b.data.shape)

    out._backward = bw
    return out


class Adam:
    """Adam with bias correction; state can be snapshotted and restored."""

    def __init__(self, params: Sequence[Tensor], lr: float = 3e-4,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def step(self) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for p, m, v in zip(self.params, self.m, self.v):
            g = p.grad
            if g is None:
                continue
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p.data -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)

    def snapshot(self) -> dict:
        return {
            "t": self.t,
            "m": [m.copy() for m in self.m],
            "v": [v.copy() for v in self.v],
            "params": [p.data.copy() for p in self.params],
        }

    def restore(self, snap: dict) -> None:
        self.t = snap["t"]
        for m, src in zip(self.m, snap["m"]):
            m[:] = src
        for v, src in zip(self.v, snap["v"]):
            v[:] = src
        for p, src in zip(self.params, snap["params"]):
            p.data[:] = src


def clip_global_norm(params: Sequence[Tensor], max_norm: float) -> float:
    """Scale all gradients so their joint L2 norm is at most max_norm."""
    total = math.sqrt(
        sum(float((p.grad * p.grad).sum()) for p in params if p.grad is not None)
    )
    if total > max_norm:
        scale = max_norm / (total + 1e-12)
        for p in params:
            if p.grad is not None:
                p.grad *= scale
    return total


def gradient_check(
    build_loss: Callable[[], Tensor],
    params: Sequence[Tensor],
    eps: float = 1e-6,
) -> float:
    """Max relative error between backprop and central finite differences.

    `build_loss` must rebuild the scalar loss from the current parameter
    values on every call.
    """
    loss = build_loss()
    loss.backward()
    analytic = [p.grad.copy() for p in params]
    worst = 0.0
    for p, grad in zip(params, analytic):
        flat = p.data.ravel()
        flat_grad = grad.ravel()
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + eps
            f_plus = build_loss().data.item()
            flat[i] = saved - eps
            f_minus = build_loss().data.item()
            flat[i] = saved
            numeric = (f_plus - f_minus) / (2.0 * eps)
            denom = max(abs(numeric), abs(flat_grad[i]), 1e-8)
            worst = max(worst, abs(numeric - flat_grad[i]) / denom)
    return worst
