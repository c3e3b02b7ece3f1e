"""Finite-truncation limits of weighted entry rearrangements.

Corner projections approximate the identity entry by entry, and the
truncated images of the all-ones matrix converge pointwise to the weight
symbol of a null-preserving map.  The growth probe shows why the bare
rearrangement a -> a_rho need not stay bounded across truncation levels:
swapping the diagonal into the first row turns the identity (norm one)
into a row of n ones (norm sqrt(n)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import IndexOutOfRange, MalformedInput, NotBijective, ShapeMismatch
from .linmaps import EntryPermutation
from .matrices import (
    Entry,
    as_matrix,
    matrix_from_json,
    matrix_to_json,
    spectral_norm,
)

# Levels are declared stabilized once they match the limit this closely;
# membership in the covered range makes the match exact in practice.
STABLE_ATOL = 1e-15

SymbolFn = Callable[[int, int], complex]


def _ones_symbol(i: int, j: int) -> complex:
    return 1.0 + 0.0j


def _triangular_symbol(i: int, j: int) -> complex:
    return 1.0 + 0.0j if j <= i else 0.0 + 0.0j


_CLOSED_FORMS: dict[str, SymbolFn] = {
    "ones": _ones_symbol,
    "triangular": _triangular_symbol,
}


@dataclass(frozen=True)
class TruncationScheme:
    """Increasing corner sizes, a weight symbol, and a total grid bijection.

    The symbol may be a closed-form generator (evaluated lazily at 1-based
    indices) or a stored matrix extended by zero.  ``rho`` must be a total
    bijection of the grid at the largest level.
    """

    levels: tuple[int, ...]
    symbol: SymbolFn | np.ndarray
    rho: EntryPermutation

    def __post_init__(self):
        levels = tuple(int(n) for n in self.levels)
        if not levels or any(n < 1 for n in levels):
            raise ShapeMismatch("levels must be positive integers")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ShapeMismatch(f"levels must be strictly increasing, got {levels}")
        object.__setattr__(self, "levels", levels)
        top = levels[-1]
        if self.rho.src_shape != (top, top) or self.rho.dst_shape != (top, top):
            raise ShapeMismatch(
                f"rho must act on the {top}x{top} top grid, got "
                f"{self.rho.src_shape} -> {self.rho.dst_shape}"
            )
        if not self.rho.is_bijection:
            raise NotBijective("rho must be a total bijection of the top grid")
        if not callable(self.symbol):
            object.__setattr__(self, "symbol", as_matrix(self.symbol))

    @property
    def top(self) -> int:
        return self.levels[-1]

    def symbol_value(self, i: int, j: int) -> complex:
        """Weight at the 1-based entry (i, j); stored matrices extend by zero."""
        if callable(self.symbol):
            return complex(self.symbol(i, j))
        m, n = self.symbol.shape
        if 1 <= i <= m and 1 <= j <= n:
            return complex(self.symbol[i - 1, j - 1])
        return 0.0 + 0.0j

    def symbol_matrix(self) -> np.ndarray:
        top = self.top
        out = np.empty((top, top), dtype=complex)
        for i in range(1, top + 1):
            for j in range(1, top + 1):
                out[i - 1, j - 1] = self.symbol_value(i, j)
        return out

    def cover_level(self, idx: Entry) -> int | None:
        """Smallest level whose corner contains the preimage of ``idx``."""
        pre = self.rho.inverse().image_of(idx)
        reach = max(pre)
        for n in self.levels:
            if reach <= n:
                return n
        return None


def corner_project(a, n: int) -> np.ndarray:
    """Zero every entry with a row or column index beyond n.

    This is Schur multiplication by the all-ones n x n corner symbol; it is
    idempotent and the shape is unchanged.
    """
    a = as_matrix(a)
    if n < 1 or n > a.shape[0] or n > a.shape[1]:
        raise IndexOutOfRange(
            f"corner size {n} must lie in [1, min{a.shape}]"
        )
    out = np.zeros_like(a)
    out[:n, :n] = a[:n, :n]
    return out


def truncated_image(scheme: TruncationScheme, n: int) -> np.ndarray:
    """The level-n image of the all-ones matrix under f * (.)_rho.

    Entries carry the symbol value on the rearranged corner
    R_n = rho({1..n} x {1..n}) and vanish elsewhere on the top grid.
    """
    if n not in scheme.levels:
        raise IndexOutOfRange(f"level {n} not in scheme levels {scheme.levels}")
    top = scheme.top
    out = np.zeros((top, top), dtype=complex)
    for (i, j), (k, l) in scheme.rho.mapping.items():
        if i <= n and j <= n:
            out[k - 1, l - 1] = scheme.symbol_value(k, l)
    return out


def level_value(scheme: TruncationScheme, a: np.ndarray, n: int, idx: Entry) -> complex:
    """(f_n * a_rho restricted to the rearranged corner) at a 1-based entry."""
    pre = scheme.rho.inverse().image_of(idx)
    if pre is None:
        return 0.0 + 0.0j
    if pre[0] > n or pre[1] > n:
        return 0.0 + 0.0j
    return complex(scheme.symbol_value(*idx)) * complex(a[pre[0] - 1, pre[1] - 1])


def pointwise_convergence_check(
    scheme: TruncationScheme, a, probes: Sequence[Entry]
) -> list[dict]:
    """Track the truncated images toward the limit f * a_rho at probe entries.

    For each probe the report lists the value at every level, the limit,
    and the first level from which all later values match the limit to
    within ``STABLE_ATOL``.  Values become exact as soon as the corner
    covers the probe's preimage, which is the finite shadow of the
    pointwise convergence of the truncated symbols.
    """
    a = as_matrix(a)
    top = scheme.top
    if a.shape != (top, top):
        raise ShapeMismatch(f"input must be {top}x{top}, got {a.shape}")
    inv = scheme.rho.inverse()
    reports = []
    for probe in probes:
        i, j = int(probe[0]), int(probe[1])
        if not (1 <= i <= top and 1 <= j <= top):
            raise IndexOutOfRange(f"probe {probe} outside the {top}x{top} grid")
        pre = inv.image_of((i, j))
        limit = complex(scheme.symbol_value(i, j)) * complex(a[pre[0] - 1, pre[1] - 1])
        values = [level_value(scheme, a, n, (i, j)) for n in scheme.levels]
        stabilized_at = None
        for pos in range(len(values) - 1, -1, -1):
            if abs(values[pos] - limit) <= STABLE_ATOL:
                stabilized_at = scheme.levels[pos]
            else:
                break
        reports.append(
            {
                "probe": [i, j],
                "levels": [
                    {"n": n, "value": [v.real, v.imag]}
                    for n, v in zip(scheme.levels, values)
                ],
                "limit": [limit.real, limit.imag],
                "stabilized_at": stabilized_at,
                "cover_level": scheme.cover_level((i, j)),
            }
        )
    return reports


def diagonal_row_swap(n: int) -> EntryPermutation:
    """Grid bijection exchanging diagonal cells (k, k) with first-row cells (1, k)."""
    if n < 1:
        raise ShapeMismatch("n must be >= 1")
    mapping: dict[Entry, Entry] = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                mapping[(i, j)] = (1, j)
            elif i == 1:
                mapping[(i, j)] = (j, j)
            else:
                mapping[(i, j)] = (i, j)
    return EntryPermutation((n, n), (n, n), mapping)


def rearrangement_growth_probe(n_values: Sequence[int]) -> list[tuple[int, float]]:
    """Norm inflation of a -> a_rho under the diagonal-to-row swap family.

    At size n the identity matrix (spectral norm one) is rearranged into a
    first row of n ones, so the ratio is sqrt(n); it grows without bound,
    which is the finite-size face of unboundedness of bare rearrangements.
    """
    values = [int(n) for n in n_values]
    if any(b <= a for a, b in zip(values, values[1:])) or any(n < 1 for n in values):
        raise ShapeMismatch(f"n_values must be strictly increasing positives, got {values}")
    out = []
    for n in values:
        rho = diagonal_row_swap(n)
        rearranged = rho.permute(np.eye(n, dtype=complex))
        out.append((n, spectral_norm(rearranged)))
    return out


# --- JSON wire format -------------------------------------------------------
#
# {"levels": [...], "symbol": {"kind": "ones" | "triangular"}
#                         or {"kind": "matrix", "matrix": <matrix JSON>},
#  "rho": <permutation JSON>}


def scheme_to_json(scheme: TruncationScheme) -> dict:
    if callable(scheme.symbol):
        for name, fn in _CLOSED_FORMS.items():
            if scheme.symbol is fn:
                sym = {"kind": name}
                break
        else:
            sym = {"kind": "matrix", "matrix": matrix_to_json(scheme.symbol_matrix())}
    else:
        sym = {"kind": "matrix", "matrix": matrix_to_json(scheme.symbol)}
    return {"levels": list(scheme.levels), "symbol": sym, "rho": scheme.rho.to_json()}


def scheme_from_json(obj) -> TruncationScheme:
    if not isinstance(obj, dict):
        raise MalformedInput("scheme JSON must be an object")
    try:
        levels = [int(n) for n in obj["levels"]]
        sym_spec = obj["symbol"]
        rho = EntryPermutation.from_json(obj["rho"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"invalid scheme JSON: {exc}") from exc
    if not isinstance(sym_spec, dict) or "kind" not in sym_spec:
        raise MalformedInput("scheme symbol must be an object with a 'kind'")
    kind = sym_spec["kind"]
    if kind in _CLOSED_FORMS:
        symbol: SymbolFn | np.ndarray = _CLOSED_FORMS[kind]
    elif kind == "matrix":
        if "matrix" not in sym_spec:
            raise MalformedInput("matrix symbol needs a 'matrix' field")
        symbol = matrix_from_json(sym_spec["matrix"])
    else:
        raise MalformedInput(f"unknown symbol kind {kind!r}")
    try:
        return TruncationScheme(tuple(levels), symbol, rho)
    except (ShapeMismatch, NotBijective) as exc:
        raise MalformedInput(str(exc)) from exc
