"""Minimal reverse-mode differentiation over numpy arrays.

Every operation builds a :class:`Value` that remembers its parents and an
adjoint closure mapping the output gradient to one gradient per parent.
:func:`backward` walks the graph once in reverse topological order,
accumulating gradients additively where a node fans out.

A graph is owned by the thread that built it.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src import grid
from src.constants.constants_numeric import NUMERIC_ERRORS
from src.core.errors import AutodiffError, ShapeMismatchError


class Value:
    """Scalar, grid or feature map taking part in differentiation."""

    __array_priority__ = 1000  # ndarray <op> Value dispatches to Value

    def __init__(self, data, parents=(), adjoint=None, op='leaf', requires_grad=False):
        self.data = np.asarray(data, dtype=np.float64)
        self.parents = tuple(parents)
        self.adjoint = adjoint
        self.op = op
        self.requires_grad = requires_grad or any(p.requires_grad for p in self.parents)
        self.grad = None

    def __repr__(self):
        return f'Value(op={self.op}, shape={self.data.shape})'

    @property
    def shape(self):
        return self.data.shape

    def item(self):
        return float(self.data)

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return mul(self, -1.0)

    def __pow__(self, exponent):
        return power(self, exponent)

    def sum(self):
        return total(self)

    def mean(self):
        return mean(self)


def parameter(data):
    """A leaf whose gradient is wanted."""
    return Value(np.array(data, dtype=np.float64), requires_grad=True)


def as_value(x):
    return x if isinstance(x, Value) else Value(x)


def unwrap(x):
    return x.data if isinstance(x, Value) else np.asarray(x, dtype=np.float64)


def _unbroadcast(grad, shape):
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


def _node(data, parents, adjoint, op):
    return Value(data, parents=parents, adjoint=adjoint, op=op)


# --- elementwise arithmetic -------------------------------------------------

def add(a, b):
    a, b = as_value(a), as_value(b)
    return _node(a.data + b.data, (a, b), lambda g: (g, g), 'add')


def sub(a, b):
    a, b = as_value(a), as_value(b)
    return _node(a.data - b.data, (a, b), lambda g: (g, -g), 'sub')


def mul(a, b):
    a, b = as_value(a), as_value(b)
    return _node(a.data * b.data, (a, b), lambda g: (g * b.data, g * a.data), 'mul')


def power(a, exponent):
    """Elementwise ``a ** exponent`` for a constant real exponent."""
    a = as_value(a)
    exponent = float(exponent)
    out = a.data ** exponent

    def adjoint(g):
        if exponent == 0.0:
            return (np.zeros_like(a.data),)
        return (g * exponent * a.data ** (exponent - 1.0),)

    return _node(out, (a,), adjoint, 'pow')


def div(a, b):
    return mul(a, power(b, -1.0))


# --- elementwise nonlinearities ---------------------------------------------

def stable_sigmoid(x):
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def sigmoid(v):
    v = as_value(v)
    s = stable_sigmoid(v.data)
    return _node(s, (v,), lambda g: (g * s * (1.0 - s),), 'sigmoid')


def softplus(v):
    """log(1 + exp(x)) in the overflow-free form; derivative is sigmoid."""
    v = as_value(v)
    out = np.maximum(v.data, 0.0) + np.log1p(np.exp(-np.abs(v.data)))
    return _node(out, (v,), lambda g: (g * stable_sigmoid(v.data),), 'softplus')


def log(v):
    v = as_value(v)
    return _node(np.log(v.data), (v,), lambda g: (g / v.data,), 'log')


def absolute(v):
    v = as_value(v)
    # np.sign(0) == 0 gives the zero subgradient at the kink
    return _node(np.abs(v.data), (v,), lambda g: (g * np.sign(v.data),), 'abs')


def sqrt(v):
    v = as_value(v)
    out = np.sqrt(v.data)
    return _node(out, (v,), lambda g: (g * 0.5 / out,), 'sqrt')


def clip(v, low, high):
    v = as_value(v)
    inside = (v.data >= low) & (v.data <= high)
    return _node(np.clip(v.data, low, high), (v,), lambda g: (g * inside,), 'clip')


def silu(v):
    return mul(v, sigmoid(v))


# --- reductions and reshaping -----------------------------------------------

def total(v):
    v = as_value(v)
    return _node(v.data.sum(), (v,), lambda g: (np.broadcast_to(g, v.data.shape).copy(),), 'sum')


def mean(v):
    v = as_value(v)
    return mul(total(v), 1.0 / v.data.size)


def reshape(v, shape):
    v = as_value(v)
    return _node(v.data.reshape(shape), (v,), lambda g: (g.reshape(v.data.shape),), 'reshape')


# --- spatial operators --------------------------------------------------------

def conv2d_same(v, kernel):
    v = as_value(v)
    out = grid.conv2d_same(v.data, kernel)
    return _node(out, (v,), lambda g: (grid.conv2d_same_adjoint(g, kernel),), 'conv2d_same')


def avg_pool_same(v, k):
    v = as_value(v)
    out = grid.avg_pool_same(v.data, k)
    return _node(out, (v,), lambda g: (grid.avg_pool_same_adjoint(g, k),), 'avg_pool_same')


def resize_bilinear(v, height, width):
    v = as_value(v)
    src_h, src_w = v.data.shape[-2:]
    out = grid.resize_bilinear(v.data, height, width)
    return _node(out, (v,), lambda g: (grid.resize_bilinear_adjoint(g, src_h, src_w),), 'resize_bilinear')


def conv2d(x, weight, bias=None, stride=1):
    """Learnable multi-channel convolution with zero padding k // 2.

    ``x`` is C_in x H x W, ``weight`` C_out x C_in x kh x kw, ``bias`` C_out.
    """
    x, weight = as_value(x), as_value(weight)
    c_out, c_in, kh, kw = weight.data.shape
    if x.data.shape[0] != c_in:
        raise ShapeMismatchError(NUMERIC_ERRORS.CHANNEL_MISMATCH.format(expected=c_in, actual=x.data.shape[0]))
    ph, pw = kh // 2, kw // 2
    padded = np.pad(x.data, ((0, 0), (ph, ph), (pw, pw)))
    windows = sliding_window_view(padded, (kh, kw), axis=(1, 2))[:, ::stride, ::stride]
    out = np.tensordot(weight.data, windows, axes=([1, 2, 3], [0, 3, 4]))
    parents = [x, weight]
    if bias is not None:
        bias = as_value(bias)
        out = out + bias.data[:, None, None]
        parents.append(bias)

    def adjoint(g):
        grad_w = np.tensordot(g, windows, axes=([1, 2], [1, 2]))
        cols = np.tensordot(weight.data, g, axes=([0], [0]))
        ho, wo = g.shape[1:]
        grad_pad = np.zeros_like(padded)
        for i in range(kh):
            for j in range(kw):
                grad_pad[:, i:i + stride * ho:stride, j:j + stride * wo:stride] += cols[:, i, j]
        grad_x = grad_pad[:, ph:ph + x.data.shape[1], pw:pw + x.data.shape[2]]
        grads = [grad_x, grad_w]
        if bias is not None:
            grads.append(g.sum(axis=(1, 2)))
        return grads

    return _node(out, parents, adjoint, 'conv2d')


def linear(weight, x):
    """Matrix-vector product ``weight @ x``."""
    weight, x = as_value(weight), as_value(x)
    return _node(weight.data @ x.data, (weight, x),
                 lambda g: (np.outer(g, x.data), weight.data.T @ g), 'linear')


# --- reverse pass -----------------------------------------------------------

def _topological_order(root):
    order, visited = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if node in visited:
            continue
        visited.add(node)
        stack.append((node, True))
        for parent in node.parents:
            if parent.requires_grad and parent not in visited:
                stack.append((parent, False))
    return order


def backward(root):
    """Differentiate a scalar root; returns ``{leaf: gradient}``.

    Leaf ``.grad`` attributes are overwritten, never accumulated, so calling
    twice on the same graph yields the same gradients.
    """
    if not isinstance(root, Value) or root.data.size != 1:
        raise AutodiffError(NUMERIC_ERRORS.NON_SCALAR_ROOT.format(shape=np.shape(unwrap(root))))
    grads = {root: np.ones_like(root.data)}
    leaves = {}
    for node in reversed(_topological_order(root)):
        g = grads.get(node)
        if g is None:
            continue
        if not node.parents:
            leaves[node] = g
            continue
        for parent, parent_grad in zip(node.parents, node.adjoint(g)):
            if not parent.requires_grad or parent_grad is None:
                continue
            parent_grad = _unbroadcast(np.asarray(parent_grad, dtype=np.float64), parent.data.shape)
            grads[parent] = grads[parent] + parent_grad if parent in grads else parent_grad
    for leaf, g in leaves.items():
        leaf.grad = g
    return leaves
