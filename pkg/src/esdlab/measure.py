"""Weight distributions and the signed measure that drives the limit equations.

A ``XiSpec`` describes the law of the scalar weights attached to each rank-one
term.  ``measure_from_xi`` turns it (together with the aspect ratio m/n) into
the finitely-atomic signed measure with atoms ``xi`` and weights
``(m/n) * xi * P(xi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class XiSpec:
    """Law of the weights xi.

    ``kind`` is one of ``const``, ``bernoulli``, ``rademacher``, ``atoms``.
    For ``atoms`` the support is given as ``values`` with ``probs``.
    """

    kind: str
    param: float = 0.0
    values: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "const":
            pass
        elif self.kind == "bernoulli":
            if not 0.0 < self.param <= 1.0:
                raise ValueError(f"bernoulli p must lie in (0, 1], got {self.param}")
        elif self.kind == "rademacher":
            if not self.param > 0.0:
                raise ValueError(f"rademacher scale must be positive, got {self.param}")
        elif self.kind == "atoms":
            if len(self.values) == 0 or len(self.values) != len(self.probs):
                raise ValueError("atoms need matching non-empty value and probability lists")
            if any(p <= 0 for p in self.probs):
                raise ValueError("atom probabilities must be positive")
            if abs(math.fsum(self.probs) - 1.0) > _PROB_TOL:
                raise ValueError(f"atom probabilities sum to {math.fsum(self.probs)!r}, not 1")
            if len(set(self.values)) != len(self.values):
                raise ValueError("duplicate atom values")
        else:
            raise ValueError(f"unknown xi kind {self.kind!r}")

    @classmethod
    def const(cls, b: float) -> "XiSpec":
        return cls("const", float(b))

    @classmethod
    def bernoulli(cls, p: float) -> "XiSpec":
        return cls("bernoulli", float(p))

    @classmethod
    def rademacher(cls, s: float) -> "XiSpec":
        return cls("rademacher", float(s))

    @classmethod
    def atoms(cls, pairs) -> "XiSpec":
        pairs = list(pairs)
        return cls("atoms", values=tuple(float(v) for v, _ in pairs),
                   probs=tuple(float(p) for _, p in pairs))

    @classmethod
    def parse(cls, text: str) -> "XiSpec":
        """Parse ``const:<b>``, ``bernoulli:<p>``, ``rademacher:<s>`` or
        ``atoms:<v1>@<p1>,<v2>@<p2>,...``."""
        kind, sep, rest = text.strip().partition(":")
        kind = kind.lower()
        if not sep or not rest:
            raise ValueError(f"cannot parse xi spec {text!r}")
        if kind == "atoms":
            pairs = []
            for item in rest.split(","):
                v, at, p = item.partition("@")
                if not at:
                    raise ValueError(f"atom {item!r} is missing '@<prob>'")
                pairs.append((float(v), float(p)))
            return cls.atoms(pairs)
        if kind in ("const", "bernoulli", "rademacher"):
            return cls(kind, float(rest))
        raise ValueError(f"unknown xi kind {kind!r}")

    def __str__(self) -> str:
        if self.kind == "atoms":
            body = ",".join(f"{v!r}@{p!r}" for v, p in zip(self.values, self.probs))
            return f"atoms:{body}"
        return f"{self.kind}:{self.param!r}"

    def support(self) -> list[tuple[float, float]]:
        """(value, probability) pairs with positive probability."""
        if self.kind == "const":
            return [(self.param, 1.0)]
        if self.kind == "bernoulli":
            out = [(1.0, self.param)]
            if self.param < 1.0:
                out.append((0.0, 1.0 - self.param))
            return out
        if self.kind == "rademacher":
            return [(self.param, 0.5), (-self.param, 0.5)]
        return list(zip(self.values, self.probs))

    def mean(self) -> float:
        return math.fsum(v * p for v, p in self.support())

    def sample(self, rng: np.random.Generator, size=None):
        """Draw from the law; ``size=None`` returns a float."""
        if self.kind == "const":
            out = np.full(size if size is not None else (), self.param)
        elif self.kind == "bernoulli":
            out = np.asarray(rng.random(size) < self.param, dtype=float)
        elif self.kind == "rademacher":
            out = np.where(rng.random(size) < 0.5, self.param, -self.param)
        else:
            idx = rng.choice(len(self.values), size=size, p=np.asarray(self.probs))
            out = np.asarray(self.values)[idx]
        return float(out) if size is None else np.asarray(out, dtype=float)


@dataclass(frozen=True)
class WeightMeasure:
    """Finitely-atomic signed measure: atoms ``xi`` carrying signed ``weights``."""

    xi: tuple[float, ...]
    weights: tuple[float, ...]
    total_mass: float = field(init=False)

    def __post_init__(self):
        if len(self.xi) != len(self.weights):
            raise ValueError("xi and weights differ in length")
        if len(set(self.xi)) != len(self.xi):
            raise ValueError("atoms must have distinct locations")
        object.__setattr__(self, "total_mass", math.fsum(self.weights))

    @classmethod
    def from_pairs(cls, pairs) -> "WeightMeasure":
        pairs = list(pairs)
        return cls(tuple(float(x) for x, _ in pairs), tuple(float(w) for _, w in pairs))

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.xi, self.weights))

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.xi, dtype=float), np.asarray(self.weights, dtype=float)

    def __str__(self) -> str:
        body = ", ".join(f"({x:g}, {w:g})" for x, w in self.atoms)
        return "{" + body + "}"


def measure_from_xi(xi: XiSpec, m: int, n: int) -> WeightMeasure:
    """Signed measure with atoms ``(v, (m/n) v P(xi=v))``; atoms at 0 are dropped."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    ratio = m / n
    return WeightMeasure.from_pairs(
        (v, ratio * v * p) for v, p in xi.support() if v != 0.0)


def moments(measure: WeightMeasure, j_max: int) -> list[float]:
    """``c_j = sum_k w_k xi_k^(j-1)`` for ``j = 1..j_max`` (``c_1`` is the total mass)."""
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    return [math.fsum(w * x ** (j - 1) for x, w in measure.atoms) for j in range(1, j_max + 1)]
