"""Structural analysis of entrywise-product preservers.

Decides whether a map preserves disjoint supports or the Schur product
itself, reconstructs the weighted-permutation and permutation-conjugation
canonical forms, and produces counterexample witnesses when a multiplicative
grid rearrangement cannot be a contraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DimensionTooSmall,
    ImageNotMonomial,
    NotBijective,
    NotMultiplicative,
    NotNullPreserving,
    ShapeMismatch,
)
from .matrices import Entry, as_matrix, kronecker, matrix_to_json, spectral_norm
from .linmaps import (
    EntryPermutation,
    LinearMatrixMap,
    from_conjugation,
    from_weighted_permutation,
)

# An entry counts as zero when its modulus is below this times (1 + the
# largest modulus in the same image); keeps detection scale-free.
ZERO_RTOL = 1e-12


@dataclass(frozen=True)
class Witness:
    """Unit-spectral-norm input whose image is strictly larger in norm."""

    input: np.ndarray
    ratio: float

    def to_json(self) -> dict:
        return {"input": matrix_to_json(self.input), "ratio": float(self.ratio)}


@dataclass(frozen=True)
class WeightedPermutation:
    """T(a) = weights * (a rearranged by rho); the null-preserver normal form."""

    weights: np.ndarray
    rho: EntryPermutation
    surjective: bool

    def to_map(self) -> LinearMatrixMap:
        return from_weighted_permutation(self.weights, self.rho)

    def to_json(self) -> dict:
        return {
            "form": "weighted_permutation",
            "weights": matrix_to_json(self.weights),
            "rho": self.rho.to_json(),
            "surjective": bool(self.surjective),
        }


@dataclass(frozen=True)
class Conjugation:
    """T(a) = u a v (or u a^t v) for permutation unitaries from pi and sigma."""

    pi: tuple[int, ...]
    sigma: tuple[int, ...]
    transposed: bool

    def to_map(self) -> LinearMatrixMap:
        return from_conjugation(list(self.pi), list(self.sigma), self.transposed)

    def to_json(self) -> dict:
        return {
            "form": "conjugation",
            "pi": list(self.pi),
            "sigma": list(self.sigma),
            "transposed": bool(self.transposed),
        }


@dataclass(frozen=True)
class NotCanonical:
    """No conjugation form exists; carries the certifying input."""

    witness: Witness

    def to_json(self) -> dict:
        return {"form": "not_canonical", "witness": self.witness.to_json()}


CanonicalForm = Union[WeightedPermutation, Conjugation, NotCanonical]


def _support_masks(t_map: LinearMatrixMap) -> np.ndarray:
    """Boolean (m, n, p, q) tensor of per-image nonzero supports."""
    mags = np.abs(t_map.images)
    cutoff = ZERO_RTOL * (1.0 + mags.max(axis=(2, 3), keepdims=True))
    return mags > cutoff


def is_schur_null_preserving(t_map: LinearMatrixMap) -> bool:
    """True iff images of distinct matrix units have pairwise disjoint supports.

    By bilinearity this is equivalent to T(a) * T(b) = 0 whenever a * b = 0.
    Pairwise disjointness holds exactly when no destination cell is in the
    support of two images, so one occupancy count suffices.
    """
    occupancy = _support_masks(t_map).sum(axis=(0, 1))
    return bool(np.all(occupancy <= 1))


def null_preserving_violation(t_map: LinearMatrixMap) -> tuple[Entry, Entry] | None:
    """First (lexicographic) pair of unit indices with overlapping image supports."""
    masks = _support_masks(t_map)
    m, n = t_map.src_shape
    flat = masks.reshape(m * n, -1)
    occupancy = flat.sum(axis=0)
    hot = np.nonzero(occupancy > 1)[0]
    if hot.size == 0:
        return None
    cell = hot[0]
    owners = np.nonzero(flat[:, cell])[0]
    a, b = int(owners[0]), int(owners[1])
    return (a // n + 1, a % n + 1), (b // n + 1, b % n + 1)


def is_schur_multiplicative(t_map: LinearMatrixMap) -> bool:
    """True iff T(a * b) = T(a) * T(b) for all inputs.

    On basis images this reduces to idempotence T(e) * T(e) = T(e) of every
    image (entries 0 or 1) together with pairwise disjoint supports.
    """
    imgs = t_map.images
    scale = (1.0 + np.abs(imgs).max(axis=(2, 3), keepdims=True)) ** 2
    idempotent = np.all(np.abs(imgs * imgs - imgs) <= ZERO_RTOL * scale)
    return bool(idempotent) and is_schur_null_preserving(t_map)


def recover_weighted_permutation(t_map: LinearMatrixMap) -> WeightedPermutation:
    """Read the weighted-permutation form off the basis images.

    Requires every image to be zero or a scalar multiple of a single matrix
    unit, with pairwise disjoint supports.  Kernel units are reported
    unmapped; the weight matrix is the image of the all-ones matrix, so it
    vanishes off the range of the recovered rearrangement.
    """
    masks = _support_masks(t_map)
    m, n = t_map.src_shape
    p, q = t_map.dst_shape
    mapping: dict[Entry, Entry] = {}
    weights = np.zeros((p, q), dtype=complex)
    taken: set[Entry] = set()
    for i in range(m):
        for j in range(n):
            hot = np.argwhere(masks[i, j])
            if hot.shape[0] == 0:
                continue
            if hot.shape[0] > 1:
                raise ImageNotMonomial(
                    f"image of unit {(i + 1, j + 1)} has {hot.shape[0]} nonzero entries"
                )
            k, l = int(hot[0, 0]), int(hot[0, 1])
            if (k + 1, l + 1) in taken:
                raise NotNullPreserving(
                    f"two units map onto destination entry {(k + 1, l + 1)}"
                )
            taken.add((k + 1, l + 1))
            mapping[(i + 1, j + 1)] = (k + 1, l + 1)
            weights[k, l] = t_map.images[i, j, k, l]
    rho = EntryPermutation(t_map.src_shape, t_map.dst_shape, mapping)
    surjective = rho.is_bijection and len(taken) == p * q
    return WeightedPermutation(weights, rho, surjective)


def _factor_direct(rho: EntryPermutation) -> tuple[list[int], list[int]] | None:
    """Try rho(i, j) = (pi(i), sigma(j)); None if rows/cols do not decouple."""
    m, n = rho.src_shape
    pi = [0] * m
    sigma = [0] * n
    for i in range(1, m + 1):
        rows = {rho.mapping[(i, j)][0] for j in range(1, n + 1)}
        if len(rows) != 1:
            return None
        pi[i - 1] = rows.pop()
    for j in range(1, n + 1):
        cols = {rho.mapping[(i, j)][1] for i in range(1, m + 1)}
        if len(cols) != 1:
            return None
        sigma[j - 1] = cols.pop()
    return pi, sigma


def _factor_transposed(rho: EntryPermutation) -> tuple[list[int], list[int]] | None:
    """Try rho(i, j) = (pi(j), sigma(i)) on a square grid."""
    n = rho.src_shape[0]
    pi = [0] * n
    sigma = [0] * n
    for j in range(1, n + 1):
        rows = {rho.mapping[(i, j)][0] for i in range(1, n + 1)}
        if len(rows) != 1:
            return None
        pi[j - 1] = rows.pop()
    for i in range(1, n + 1):
        cols = {rho.mapping[(i, j)][1] for j in range(1, n + 1)}
        if len(cols) != 1:
            return None
        sigma[i - 1] = cols.pop()
    return pi, sigma


def _pigeonhole_witness(t_map: LinearMatrixMap, rho: EntryPermutation) -> Witness:
    """Two units with distinct rows and columns whose images share a line.

    The sum of the units has spectral norm one while its image has two
    entries in one row or column, hence norm sqrt(2).  Search order is
    lexicographic over source pairs; a hit always exists when the grid
    rearrangement does not factor through rows and columns.
    """
    m, n = rho.src_shape
    cells = [(i, j) for i in range(1, m + 1) for j in range(1, n + 1)]
    for x, (a, b) in enumerate(cells):
        ka, la = rho.mapping[(a, b)]
        for (c, d) in cells[x + 1:]:
            if c == a or d == b:
                continue
            kc, lc = rho.mapping[(c, d)]
            if ka == kc or la == lc:
                probe = np.zeros((m, n), dtype=complex)
                probe[a - 1, b - 1] = 1.0
                probe[c - 1, d - 1] = 1.0
                ratio = spectral_norm(t_map.apply(probe))
                return Witness(probe, ratio)
    raise NotBijective("no pigeonhole pair found; the rearrangement factors")


def classify_contraction(t_map: LinearMatrixMap) -> CanonicalForm:
    """Canonical form of a multiplicative bijective grid rearrangement.

    Either the rearrangement factors as rho(i, j) = (pi(i), sigma(j)), or
    (squares only) as rho(i, j) = (pi(j), sigma(i)) giving the transposed
    form, and the reconstruction reproduces T exactly; otherwise no
    contractive form exists and a pigeonhole witness of ratio sqrt(2) is
    returned.
    """
    if not is_schur_multiplicative(t_map):
        raise NotMultiplicative("map is not multiplicative for the Schur product")
    if t_map.src_shape != t_map.dst_shape:
        raise NotBijective(
            f"source grid {t_map.src_shape} and destination grid "
            f"{t_map.dst_shape} differ, so the rearrangement cannot be a bijection"
        )
    recovered = recover_weighted_permutation(t_map)
    if not recovered.rho.is_bijection:
        raise NotBijective("the entry rearrangement is not a total bijection")
    rho = recovered.rho
    direct = _factor_direct(rho)
    if direct is not None:
        return Conjugation(tuple(direct[0]), tuple(direct[1]), transposed=False)
    if t_map.src_shape[0] == t_map.src_shape[1]:
        swapped = _factor_transposed(rho)
        if swapped is not None:
            return Conjugation(tuple(swapped[0]), tuple(swapped[1]), transposed=True)
    return NotCanonical(_pigeonhole_witness(t_map, rho))


def verify_isometry(t_map: LinearMatrixMap, trials: int = 100, seed: int = 0) -> float:
    """Largest observed deviation | ||T(a)|| - ||a|| | over normalized samples."""
    rng = np.random.default_rng(seed)
    m, n = t_map.src_shape
    worst = 0.0
    for _ in range(trials):
        a = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        a /= np.linalg.svd(a, compute_uv=False)[0]
        worst = max(worst, abs(spectral_norm(t_map.apply(a)) - 1.0))
    return worst


def amplification_lower_bound(t_map: LinearMatrixMap, k: int) -> float:
    """Norm ratio of T tensor id_k at the swap-style witness.

    The witness W = sum_{i,j<=k} e_{i,j} (x) e_{j,i} has spectral norm one;
    the value ||(T (x) id_k)(W)|| / ||W|| bounds the k-th amplification norm
    from below.  The transpose map yields k here, which is how the failure
    of complete boundedness shows up at finite truncation.
    """
    if t_map.src_shape != t_map.dst_shape:
        raise ShapeMismatch("amplification probe needs matching source and destination")
    n = t_map.src_shape[0]
    if t_map.src_shape[1] != n:
        raise ShapeMismatch("amplification probe needs a square matrix space")
    if k < 1 or k > n:
        raise DimensionTooSmall(f"need 1 <= k <= {n}, got k={k}")
    witness = np.zeros((n * k, n * k), dtype=complex)
    unit_nk = np.zeros((n, n), dtype=complex)
    for i in range(k):
        for j in range(k):
            unit_nk[:] = 0.0
            unit_nk[i, j] = 1.0
            small = np.zeros((k, k), dtype=complex)
            small[j, i] = 1.0
            witness += kronecker(unit_nk, small)
    # apply T to the coarse-block factor: X = sum e_{ij} (x) B_{ij}
    out = np.zeros_like(witness)
    for i in range(n):
        for j in range(n):
            block = witness[i * k:(i + 1) * k, j * k:(j + 1) * k]
            if np.any(block):
                out += kronecker(t_map.images[i, j], block)
    return spectral_norm(out) / spectral_norm(witness)


def row_column_deletion_map(n: int) -> LinearMatrixMap:
    """Compression of (n+1) x (n+1) matrices that drops row and column 2.

    Output entry (k, l) is the input entry at (s(k), s(l)) with s(1) = 1 and
    s(k) = k + 1 otherwise.  The result is a surjective multiplicative
    contraction which is not injective and fits no conjugation form, which
    is why bijectivity has to be assumed in the classification.
    """
    if n < 2:
        raise DimensionTooSmall("need n >= 2")
    keep = [1] + list(range(3, n + 2))
    images = np.zeros((n + 1, n + 1, n, n), dtype=complex)
    for k, sk in enumerate(keep):
        for l, sl in enumerate(keep):
            images[sk - 1, sl - 1, k, l] = 1.0
    return LinearMatrixMap((n + 1, n + 1), (n, n), images)


def analysis_report(t_map: LinearMatrixMap, trials: int = 100, seed: int = 0) -> dict:
    """Full structure report used by the command-line ``analyze`` verb."""
    null_preserving = is_schur_null_preserving(t_map)
    multiplicative = is_schur_multiplicative(t_map)
    form: CanonicalForm | None = None
    reason = None
    if multiplicative and t_map.src_shape == t_map.dst_shape:
        try:
            form = classify_contraction(t_map)
        except NotBijective:
            form = recover_weighted_permutation(t_map)
    elif null_preserving:
        try:
            form = recover_weighted_permutation(t_map)
        except (ImageNotMonomial, NotNullPreserving) as exc:
            reason = str(exc)
    witness = form.witness if isinstance(form, NotCanonical) else None
    report = {
        "src": list(t_map.src_shape),
        "dst": list(t_map.dst_shape),
        "null_preserving": null_preserving,
        "multiplicative": multiplicative,
        "canonical_form": form.to_json() if form is not None else None,
        "witness": witness.to_json() if witness is not None else None,
        "isometry_max_dev": verify_isometry(t_map, trials=trials, seed=seed),
        "rank": t_map.rank(),
        "injective": t_map.is_injective(),
        "seed": int(seed),
        "trials": int(trials),
    }
    if reason is not None:
        report["note"] = reason
    return report
