"""Dense tables over finite categorical product domains.

A :class:`CategoricalDomain` is a product ``X_1 x ... x X_n`` of finite
category sets, stored as per-variable cardinalities.  A
:class:`TabularFunction` is a real-valued function on such a domain, held as
a flat float64 vector in row-major order with the *last* variable moving
fastest (NumPy C order).  All values are immutable after construction, so
tables can be shared freely between threads and cached without defensive
copies.

Variable subsets are plain tuples of sorted, duplicate-free 0-based indices;
assignments are plain tuples of category indices.  Use :func:`as_subset` and
``CategoricalDomain.validate_assignment`` to normalize untrusted input.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "CategoricalDomain",
    "TabularFunction",
    "as_subset",
    "complement_subset",
    "flat_index",
    "unindex",
    "substitute",
    "depends_only_on",
]

# Flat indices must fit the platform's array-index type.
_MAX_SIZE = int(np.iinfo(np.intp).max)


def as_subset(variables: Sequence[int], n: int) -> tuple[int, ...]:
    """Normalize ``variables`` to a sorted, duplicate-free tuple in ``range(n)``.

    Raises
    ------
    ValidationError
        If an index is out of range or appears twice.
    """
    out = tuple(sorted(int(v) for v in variables))
    for v in out:
        if not 0 <= v < n:
            raise ValidationError(f"variable index {v} out of range for n={n}")
    if len(set(out)) != len(out):
        raise ValidationError(f"duplicate variable index in {out!r}")
    return out


def complement_subset(subset: Sequence[int], n: int) -> tuple[int, ...]:
    """The sorted complement of ``subset`` within ``range(n)``."""
    inside = set(subset)
    return tuple(i for i in range(n) if i not in inside)


@dataclass(frozen=True)
class CategoricalDomain:
    """Product of finite category sets, one per predictor variable.

    Parameters
    ----------
    cardinalities : tuple of int
        Number of categories of each variable, every entry >= 1.
    labels : tuple of tuple of str, optional
        Human-readable category names, one inner tuple per variable, each
        matching that variable's cardinality.
    """

    cardinalities: tuple[int, ...]
    # labels are presentational only: two domains with equal cardinalities are
    # the same domain, whatever the categories are called
    labels: tuple[tuple[str, ...], ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        cards = tuple(int(c) for c in self.cardinalities)
        object.__setattr__(self, "cardinalities", cards)
        if len(cards) < 1:
            raise ValidationError("domain needs at least one variable")
        if any(c < 1 for c in cards):
            raise ValidationError(f"cardinalities must be >= 1, got {cards}")
        if math.prod(cards) > _MAX_SIZE:
            raise ValidationError(
                f"domain size {math.prod(cards)} exceeds the platform index range"
            )
        if self.labels is not None:
            labels = tuple(tuple(str(s) for s in per_var) for per_var in self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != len(cards):
                raise ValidationError("labels must cover every variable")
            for i, per_var in enumerate(labels):
                if len(per_var) != cards[i]:
                    raise ValidationError(
                        f"variable {i}: {len(per_var)} labels for {cards[i]} categories"
                    )

    @property
    def n(self) -> int:
        """Number of variables."""
        return len(self.cardinalities)

    @property
    def size(self) -> int:
        """Total number of cells."""
        return math.prod(self.cardinalities)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cardinalities

    def validate_assignment(self, x: Sequence[int]) -> tuple[int, ...]:
        out = tuple(int(v) for v in x)
        if len(out) != self.n:
            raise ValidationError(
                f"assignment length {len(out)} does not match n={self.n}"
            )
        for i, v in enumerate(out):
            if not 0 <= v < self.cardinalities[i]:
                raise ValidationError(
                    f"category {v} out of range for variable {i} "
                    f"(cardinality {self.cardinalities[i]})"
                )
        return out

    def flat_index(self, x: Sequence[int]) -> int:
        """Row-major flat index of ``x``; the last variable moves fastest."""
        x = self.validate_assignment(x)
        idx = 0
        for v, c in zip(x, self.cardinalities):
            idx = idx * c + v
        return idx

    def unindex(self, index: int) -> tuple[int, ...]:
        """Inverse of :meth:`flat_index`."""
        index = int(index)
        if not 0 <= index < self.size:
            raise ValidationError(f"flat index {index} out of range 0..{self.size - 1}")
        out = []
        for c in reversed(self.cardinalities):
            index, v = divmod(index, c)
            out.append(v)
        return tuple(reversed(out))

    def assignments(self) -> Iterator[tuple[int, ...]]:
        """All assignments in flat-index order."""
        return itertools.product(*(range(c) for c in self.cardinalities))

    def subset(self, variables: Sequence[int]) -> tuple[int, ...]:
        return as_subset(variables, self.n)

    def subdomain(self, variables: Sequence[int]) -> "CategoricalDomain":
        """Domain of the variables in ``variables`` (sorted order kept)."""
        sub = as_subset(variables, self.n)
        if not sub:
            raise ValidationError("subdomain needs at least one variable")
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[i] for i in sub)
        return CategoricalDomain(tuple(self.cardinalities[i] for i in sub), labels)

    def zero_point(self) -> tuple[int, ...]:
        """The all-zeros assignment, the default base point everywhere."""
        return (0,) * self.n


@dataclass(frozen=True, eq=False)
class TabularFunction:
    """Real-valued function on a :class:`CategoricalDomain`, stored densely.

    ``values`` is flat float64 in the domain's row-major order and is made
    read-only on construction.  All entries must be finite.
    """

    domain: CategoricalDomain
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64).reshape(-1)
        if arr.size != self.domain.size:
            raise ValidationError(
                f"got {arr.size} values for a domain of size {self.domain.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError("table values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, domain: CategoricalDomain) -> "TabularFunction":
        return cls(domain, np.zeros(domain.size))

    @classmethod
    def constant(cls, domain: CategoricalDomain, value: float) -> "TabularFunction":
        return cls(domain, np.full(domain.size, float(value)))

    @classmethod
    def from_nd(cls, domain: CategoricalDomain, array: np.ndarray) -> "TabularFunction":
        arr = np.asarray(array, dtype=np.float64)
        if arr.shape != domain.shape:
            raise ValidationError(
                f"array shape {arr.shape} does not match domain shape {domain.shape}"
            )
        return cls(domain, arr.reshape(-1))

    def as_nd(self) -> np.ndarray:
        """Read-only view shaped like the domain."""
        return self.values.reshape(self.domain.shape)

    def __call__(self, x: Sequence[int]) -> float:
        return float(self.values[self.domain.flat_index(x)])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _same_domain(self, other: "TabularFunction") -> None:
        if self.domain != other.domain:
            raise ValidationError("tables live on different domains")

    def __add__(self, other: "TabularFunction") -> "TabularFunction":
        self._same_domain(other)
        return TabularFunction(self.domain, self.values + other.values)

    def __sub__(self, other: "TabularFunction") -> "TabularFunction":
        self._same_domain(other)
        return TabularFunction(self.domain, self.values - other.values)

    def __neg__(self) -> "TabularFunction":
        return TabularFunction(self.domain, -self.values)

    def __mul__(self, scalar: float) -> "TabularFunction":
        return TabularFunction(self.domain, self.values * float(scalar))

    __rmul__ = __mul__


def flat_index(domain: CategoricalDomain, x: Sequence[int]) -> int:
    return domain.flat_index(x)


def unindex(domain: CategoricalDomain, index: int) -> tuple[int, ...]:
    return domain.unindex(index)


def _sub_values(f: TabularFunction, subset: tuple[int, ...], categories: tuple[int, ...]) -> np.ndarray:
    """nd array of f with ``subset`` pinned to ``categories``, axes kept."""
    picker: list[object] = [slice(None)] * f.domain.n
    for v, c in zip(subset, categories):
        picker[v] = c
    pinned = f.as_nd()[tuple(picker)]
    # re-insert the pinned axes with extent 1 so broadcasting restores them
    return np.expand_dims(pinned, axis=subset) if subset else pinned


def substitute(
    f: TabularFunction, variables: Sequence[int], categories: Sequence[int]
) -> TabularFunction:
    """Pin the variables in ``variables`` to the given categories.

    Returns the table ``g(x) = f(categories on variables, x elsewhere)``,
    still defined on the full domain.  ``categories`` is aligned with the
    sorted ``variables``; an empty subset returns ``f`` unchanged.
    """
    sub = as_subset(variables, f.domain.n)
    cats = tuple(int(c) for c in categories)
    if len(cats) != len(sub):
        raise ValidationError(
            f"{len(cats)} categories for a subset of {len(sub)} variables"
        )
    for v, c in zip(sub, cats):
        if not 0 <= c < f.domain.cardinalities[v]:
            raise ValidationError(
                f"category {c} out of range for variable {v} "
                f"(cardinality {f.domain.cardinalities[v]})"
            )
    if not sub:
        return f
    pinned = _sub_values(f, sub, cats)
    full = np.broadcast_to(pinned, f.domain.shape)
    return TabularFunction(f.domain, full.reshape(-1).copy())


def depends_only_on(
    f: TabularFunction, variables: Sequence[int], tol: float = 0.0
) -> bool:
    """True when ``f`` varies only with the variables in ``variables``.

    Checked as: over every slice that fixes ``variables``, the spread
    (max - min) of ``f`` is at most ``tol``.
    """
    sub = as_subset(variables, f.domain.n)
    comp = complement_subset(sub, f.domain.n)
    if not comp:
        return True
    nd = f.as_nd()
    spread = nd.max(axis=comp) - nd.min(axis=comp)
    return bool(np.all(spread <= tol))
