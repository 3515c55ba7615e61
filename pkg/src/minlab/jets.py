"""Second-order forward-mode automatic differentiation.

A :class:`Jet` carries the value, gradient and Hessian of a quantity with
respect to ``k`` independent variables. It is the multivariate form of a
hyper-dual number: one pass yields every first and mixed second partial
exactly (to rounding), with no step-size error.

Jets may be array-valued. For a jet with value shape ``S`` the gradient has
shape ``S + (k,)`` and the Hessian ``S + (k, k)``; indexing acts on ``S``.
The helpers :func:`sin`, :func:`cos`, :func:`sqrt`, :func:`exp` and
:func:`stack` accept plain floats/arrays too, so a chart written with them
can be evaluated either on jets or on numbers.
"""

import numpy as np


class Jet:
    __slots__ = ("val", "grad", "hess")
    # make numpy defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, val, grad, hess):
        self.val = np.asarray(val, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    @property
    def nvars(self):
        return self.grad.shape[-1]

    @property
    def shape(self):
        return self.val.shape

    def __len__(self):
        return self.val.shape[0]

    @classmethod
    def variables(cls, x):
        """Independent variables seeded at the point ``x`` (1-d)."""
        x = np.asarray(x, dtype=float)
        k = x.shape[0]
        return cls(x.copy(), np.eye(k), np.zeros((k, k, k)))

    @classmethod
    def constant(cls, c, nvars):
        c = np.asarray(c, dtype=float)
        return cls(c, np.zeros(c.shape + (nvars,)), np.zeros(c.shape + (nvars, nvars)))

    def __getitem__(self, idx):
        return Jet(self.val[idx], self.grad[idx], self.hess[idx])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.nvars)

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.val + other, self.grad, self.hess)
        return Jet(self.val + other.val, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.grad, -self.hess)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            return Jet(self.val * c, self.grad * c[..., None], self.hess * c[..., None, None])
        a, b = self, other
        ga, gb = a.grad, b.grad
        outer = ga[..., :, None] * gb[..., None, :]
        return Jet(
            a.val * b.val,
            a.val[..., None] * gb + ga * b.val[..., None],
            a.val[..., None, None] * b.hess
            + a.hess * b.val[..., None, None]
            + outer
            + np.swapaxes(outer, -1, -2),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            raise TypeError("jet exponents are not supported")
        v = self.val
        if p == 0:
            return Jet.constant(np.ones_like(v), self.nvars)
        if p == 1:
            return self
        if p == 2:
            return self * self
        return _chain(self, v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))

    def sum(self):
        """Sum over all value axes, returning a scalar jet."""
        nd = self.val.ndim
        ax = tuple(range(nd))
        return Jet(self.val.sum(), self.grad.sum(axis=ax), self.hess.sum(axis=ax))

    def __repr__(self):
        return f"Jet(val={self.val!r}, nvars={self.nvars})"


def _chain(u, f, df, d2f):
    g = u.grad
    df = np.asarray(df)
    d2f = np.asarray(d2f)
    return Jet(
        f,
        df[..., None] * g,
        df[..., None, None] * u.hess + d2f[..., None, None] * (g[..., :, None] * g[..., None, :]),
    )


def reciprocal(u):
    if not isinstance(u, Jet):
        return 1.0 / u
    v = u.val
    return _chain(u, 1.0 / v, -1.0 / v**2, 2.0 / v**3)


def sin(u):
    if not isinstance(u, Jet):
        return np.sin(u)
    s, c = np.sin(u.val), np.cos(u.val)
    return _chain(u, s, c, -s)


def cos(u):
    if not isinstance(u, Jet):
        return np.cos(u)
    s, c = np.sin(u.val), np.cos(u.val)
    return _chain(u, c, -s, -c)


def exp(u):
    if not isinstance(u, Jet):
        return np.exp(u)
    e = np.exp(u.val)
    return _chain(u, e, e, e)


def sqrt(u):
    if not isinstance(u, Jet):
        return np.sqrt(u)
    r = np.sqrt(u.val)
    return _chain(u, r, 0.5 / r, -0.25 / (r * u.val))


def stack(items):
    """Stack scalars/jets along a new leading axis.

    Plain numbers are promoted to constant jets if any item is a jet;
    otherwise a float array is returned.
    """
    items = list(items)
    nvars = next((it.nvars for it in items if isinstance(it, Jet)), None)
    if nvars is None:
        return np.array([np.asarray(it, dtype=float) for it in items])
    jets = [it if isinstance(it, Jet) else Jet.constant(it, nvars) for it in items]
    return Jet(
        np.stack([j.val for j in jets]),
        np.stack([j.grad for j in jets]),
        np.stack([j.hess for j in jets]),
    )


def concatenate(parts):
    parts = list(parts)
    nvars = next((p.nvars for p in parts if isinstance(p, Jet)), None)
    if nvars is None:
        return np.concatenate([np.asarray(p, dtype=float) for p in parts])
    jets = [p if isinstance(p, Jet) else Jet.constant(p, nvars) for p in parts]
    return Jet(
        np.concatenate([j.val for j in jets]),
        np.concatenate([j.grad for j in jets]),
        np.concatenate([j.hess for j in jets]),
    )


def jet_of(fn, x):
    """Value, gradient and Hessian of ``fn`` at ``x`` in one forward pass."""
    out = fn(Jet.variables(x))
    if not isinstance(out, Jet):
        x = np.asarray(x, dtype=float)
        out = Jet.constant(out, x.shape[0])
    return out.val, out.grad, out.hess
