"""Dense complex matrix primitives: entrywise products, norms, projections.

Matrices are plain 2-D ``numpy`` arrays of ``complex128`` (or ``float64``
where the imaginary parts are identically zero).  Entry indices exposed at
API boundaries are 1-based pairs ``(i, j)``; internal storage is the usual
0-based row-major layout.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import (
    IndexOutOfRange,
    MalformedInput,
    NonFiniteEntry,
    NotBijective,
    NotHermitian,
    ShapeMismatch,
)

Entry = tuple[int, int]

HERMITIAN_RTOL = 1e-12


def as_matrix(data) -> np.ndarray:
    """Validate and return ``data`` as a 2-D complex matrix.

    Rejects empty shapes and non-finite entries; both are outside every
    contract in this package.
    """
    a = np.asarray(data, dtype=complex)
    if a.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeMismatch(f"matrix dimensions must be positive, got {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise NonFiniteEntry("matrix entries must be finite")
    return a


def check_entry(shape: tuple[int, int], idx: Entry) -> None:
    i, j = idx
    if not (1 <= i <= shape[0] and 1 <= j <= shape[1]):
        raise IndexOutOfRange(f"entry {idx} outside a {shape[0]}x{shape[1]} grid")


def schur_product(a, b) -> np.ndarray:
    """Entrywise (Schur/Hadamard) product of two equal-shape matrices."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {b.shape} differ")
    return a * b


def matrix_unit(rows: int, cols: int, idx: Entry) -> np.ndarray:
    """The ``rows x cols`` matrix with a single 1 at the 1-based index ``idx``."""
    if rows < 1 or cols < 1:
        raise ShapeMismatch(f"matrix dimensions must be positive, got ({rows}, {cols})")
    check_entry((rows, cols), idx)
    u = np.zeros((rows, cols), dtype=complex)
    u[idx[0] - 1, idx[1] - 1] = 1.0
    return u


def all_ones(rows: int, cols: int) -> np.ndarray:
    """The all-ones matrix, the identity for the entrywise product."""
    if rows < 1 or cols < 1:
        raise ShapeMismatch(f"matrix dimensions must be positive, got ({rows}, {cols})")
    return np.ones((rows, cols), dtype=complex)


def spectral_norm(a) -> float:
    """Largest singular value (operator norm from l2 to l2)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got ndim={a.ndim}")
    return float(np.linalg.svd(a, compute_uv=False)[0])


def spectral_norms(batch: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Spectral norms of a stack of matrices, computed in chunks."""
    batch = np.asarray(batch, dtype=complex)
    out = np.empty(batch.shape[0], dtype=float)
    for start in range(0, batch.shape[0], chunk):
        stop = min(start + chunk, batch.shape[0])
        s = np.linalg.svd(batch[start:stop], compute_uv=False)
        out[start:stop] = s[:, 0]
    return out


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def hermitian_part(h: np.ndarray) -> np.ndarray:
    return (h + h.conj().T) / 2


def psd_project(h, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Nearest positive semidefinite matrix in Frobenius distance.

    The input must be Hermitian up to ``rtol`` relative to its Frobenius
    norm: it is symmetrized first and rejected if the anti-Hermitian part
    is larger than that.  Eigenvalues are clipped at zero.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ShapeMismatch(f"psd_project needs a square matrix, got {h.shape}")
    sym = hermitian_part(h)
    anti = np.linalg.norm(h - sym)
    if anti > rtol * max(np.linalg.norm(h), 1.0):
        raise NotHermitian(
            f"anti-Hermitian part {anti:.3e} exceeds tolerance "
            f"{rtol:.1e} * max(||h||_F, 1)"
        )
    w, v = np.linalg.eigh(sym)
    w = np.maximum(w, 0.0)
    out = (v * w) @ v.conj().T
    return hermitian_part(out)


def kronecker(a, b) -> np.ndarray:
    """Kronecker product; the left factor indexes the coarse block grid."""
    return np.kron(as_matrix(a), as_matrix(b))


def permutation_unitary(perm: Sequence[int]) -> np.ndarray:
    """0/1 unitary ``u`` with ``u e_k = e_{perm(k)}`` for a 1-based bijection ``perm``."""
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise NotBijective(f"{list(perm)} is not a permutation of 1..{n}")
    u = np.zeros((n, n), dtype=complex)
    for k, pk in enumerate(perm):
        u[pk - 1, k] = 1.0
    return u


# --- JSON wire format -------------------------------------------------------
#
# {"rows": m, "cols": n, "entries": [[re, im], ...]}  row-major doubles


def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MalformedInput("matrix JSON must be an object")
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"matrix JSON missing/invalid field: {exc}") from exc
    if rows < 1 or cols < 1:
        raise MalformedInput(f"matrix dimensions must be positive, got {rows}x{cols}")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise MalformedInput(
            f"expected {rows * cols} entries for a {rows}x{cols} matrix, "
            f"got {len(entries) if isinstance(entries, list) else type(entries).__name__}"
        )
    flat = np.empty(rows * cols, dtype=complex)
    for k, pair in enumerate(entries):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise MalformedInput(f"entry {k} is not an [re, im] pair")
        flat[k] = complex(float(pair[0]), float(pair[1]))
    try:
        return as_matrix(flat.reshape(rows, cols))
    except NonFiniteEntry as exc:
        raise MalformedInput(str(exc)) from exc
