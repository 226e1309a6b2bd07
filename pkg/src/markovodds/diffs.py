"""Finite difference operators on categorical tables.

For a subset ``A`` of variables and a base point ``x0``, the first
difference of ``f`` is

    (D_A f)(x) = f(x) - f(x0 on A, x elsewhere),

and the second difference over disjoint ``A`` and ``B`` expands to the
four-term closed form

    (D_A D_B f)(x) = f(x) + f(x0 on A|B, x elsewhere)
                   - f(x0 on A, x elsewhere) - f(x0 on B, x elsewhere).

A table is "zero" when its sup norm is within a caller-chosen tolerance;
tolerances are explicit parameters throughout, with exact comparison as the
default so integer-valued tables can be tested without slack.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ConsistencyError, ValidationError
from .tables import TabularFunction, as_subset, substitute

__all__ = [
    "first_difference",
    "second_difference",
    "is_zero",
    "recenter_correction",
]


def _base_categories(
    f: TabularFunction,
    subset: tuple[int, ...],
    base: Sequence[int] | None,
) -> tuple[int, ...]:
    """Slice a full base-point assignment down to ``subset``."""
    if base is None:
        point = f.domain.zero_point()
    else:
        point = f.domain.validate_assignment(base)
    return tuple(point[v] for v in subset)


def first_difference(
    f: TabularFunction,
    variables: Sequence[int],
    base: Sequence[int] | None = None,
) -> TabularFunction:
    """``f`` minus ``f`` with ``variables`` pinned at the base point.

    ``base`` is a full-length assignment (default all zeros); only its
    coordinates inside ``variables`` matter.  An empty subset gives the zero
    table.
    """
    sub = as_subset(variables, f.domain.n)
    return f - substitute(f, sub, _base_categories(f, sub, base))


def second_difference(
    f: TabularFunction,
    vars_a: Sequence[int],
    vars_b: Sequence[int],
    base: Sequence[int] | None = None,
) -> TabularFunction:
    """Second difference over disjoint subsets, via the four-term form.

    Raises
    ------
    ValidationError
        If the two subsets overlap.
    """
    a = as_subset(vars_a, f.domain.n)
    b = as_subset(vars_b, f.domain.n)
    if not a or not b:
        # an empty block would make the result identically zero and every
        # downstream vanishing test silently pass
        raise ValidationError("second difference needs two nonempty subsets")
    if set(a) & set(b):
        raise ValidationError(f"subsets overlap: {a!r} and {b!r}")
    union = as_subset(a + b, f.domain.n)
    f_a = substitute(f, a, _base_categories(f, a, base))
    f_b = substitute(f, b, _base_categories(f, b, base))
    f_ab = substitute(f, union, _base_categories(f, union, base))
    return TabularFunction(
        f.domain, f.values + f_ab.values - f_a.values - f_b.values
    )


def is_zero(f: TabularFunction, tol: float = 0.0) -> bool:
    """True when ``max |f| <= tol``."""
    if tol < 0:
        raise ValidationError("tolerance must be >= 0")
    return f.max_abs() <= tol


def recenter_correction(
    f: TabularFunction,
    variables: Sequence[int],
    base_old: Sequence[int],
    base_new: Sequence[int],
    check_tol: float = 1e-9,
) -> TabularFunction:
    """Difference between the differences taken at two base points.

    Returns ``D_A^new f - D_A^old f`` and cross-checks the identity that
    this correction equals ``D_A^new f`` evaluated with ``A`` pinned at the
    old base point.  The check runs cell by cell within ``check_tol``; a
    violation means floating-point trouble and raises.
    """
    sub = as_subset(variables, f.domain.n)
    d_new = first_difference(f, sub, base_new)
    d_old = first_difference(f, sub, base_old)
    correction = d_new - d_old
    expected = substitute(d_new, sub, _base_categories(f, sub, base_old))
    gap = float(np.max(np.abs(correction.values - expected.values)))
    if gap > check_tol:
        raise ConsistencyError(
            f"base-point change identity violated by {gap:.3e} (tol {check_tol:.3e})"
        )
    return correction
