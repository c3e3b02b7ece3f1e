"""Linear maps on matrix spaces, stored extensionally by their basis images.

A map T from m x n to p x q matrices is kept as the full table of images
T(e_{i,j}), one per source matrix unit in row-major order.  Every structural
hypothesis used downstream (support disjointness, monomial images, grid
factorization) is decidable from this table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np

from .errors import MalformedInput, NotBijective, ShapeMismatch
from .matrices import (
    Entry,
    as_matrix,
    matrix_from_json,
    matrix_to_json,
    spectral_norms,
)

Shape = tuple[int, int]


def _check_shape(shape: Shape, what: str) -> Shape:
    m, n = int(shape[0]), int(shape[1])
    if m < 1 or n < 1:
        raise ShapeMismatch(f"{what} must have positive dimensions, got {shape}")
    return (m, n)


@dataclass(frozen=True)
class EntryPermutation:
    """Partial injection between entry grids; unmapped source cells form the kernel.

    ``mapping`` sends 1-based source entries to 1-based destination entries.
    A total mapping whose range fills the destination grid is a bijection,
    the situation of the classical canonical form.
    """

    src_shape: Shape
    dst_shape: Shape
    mapping: Mapping[Entry, Entry]

    def __post_init__(self):
        src = _check_shape(self.src_shape, "source shape")
        dst = _check_shape(self.dst_shape, "destination shape")
        object.__setattr__(self, "src_shape", src)
        object.__setattr__(self, "dst_shape", dst)
        object.__setattr__(self, "mapping", dict(self.mapping))
        seen: set[Entry] = set()
        for (i, j), (k, l) in self.mapping.items():
            if not (1 <= i <= src[0] and 1 <= j <= src[1]):
                raise ShapeMismatch(f"source entry {(i, j)} outside {src} grid")
            if not (1 <= k <= dst[0] and 1 <= l <= dst[1]):
                raise ShapeMismatch(f"destination entry {(k, l)} outside {dst} grid")
            if (k, l) in seen:
                raise NotBijective(f"destination entry {(k, l)} hit twice")
            seen.add((k, l))

    @property
    def is_total(self) -> bool:
        return len(self.mapping) == self.src_shape[0] * self.src_shape[1]

    @property
    def is_bijection(self) -> bool:
        return self.is_total and len(self.mapping) == self.dst_shape[0] * self.dst_shape[1]

    def image_of(self, idx: Entry) -> Entry | None:
        return self.mapping.get((int(idx[0]), int(idx[1])))

    def inverse(self) -> "EntryPermutation":
        return EntryPermutation(
            self.dst_shape, self.src_shape, {v: k for k, v in self.mapping.items()}
        )

    def preimage_of(self, idx: Entry) -> Entry | None:
        target = (int(idx[0]), int(idx[1]))
        for k, v in self.mapping.items():
            if v == target:
                return k
        return None

    def permute(self, a) -> np.ndarray:
        """Rearranged matrix with entry (k, l) equal to a at the preimage of (k, l).

        Destination cells outside the range are zero.
        """
        a = as_matrix(a)
        if a.shape != self.src_shape:
            raise ShapeMismatch(f"expected shape {self.src_shape}, got {a.shape}")
        out = np.zeros(self.dst_shape, dtype=complex)
        for (i, j), (k, l) in self.mapping.items():
            out[k - 1, l - 1] = a[i - 1, j - 1]
        return out

    @staticmethod
    def identity(shape: Shape) -> "EntryPermutation":
        m, n = _check_shape(shape, "shape")
        return EntryPermutation(
            (m, n), (m, n), {(i, j): (i, j) for i in range(1, m + 1) for j in range(1, n + 1)}
        )

    @staticmethod
    def transposition(shape: Shape) -> "EntryPermutation":
        """(i, j) -> (j, i), onto the transposed grid."""
        m, n = _check_shape(shape, "shape")
        return EntryPermutation(
            (m, n), (n, m), {(i, j): (j, i) for i in range(1, m + 1) for j in range(1, n + 1)}
        )

    def to_json(self) -> dict:
        return {
            "src": [self.src_shape[0], self.src_shape[1]],
            "dst": [self.dst_shape[0], self.dst_shape[1]],
            "map": sorted([[i, j], [k, l]] for (i, j), (k, l) in self.mapping.items()),
        }

    @staticmethod
    def from_json(obj) -> "EntryPermutation":
        if not isinstance(obj, dict):
            raise MalformedInput("permutation JSON must be an object")
        try:
            src = (int(obj["src"][0]), int(obj["src"][1]))
            dst = (int(obj["dst"][0]), int(obj["dst"][1]))
            pairs = obj["map"]
            mapping = {
                (int(s[0]), int(s[1])): (int(d[0]), int(d[1])) for s, d in pairs
            }
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise MalformedInput(f"invalid permutation JSON: {exc}") from exc
        if len(mapping) != len(pairs):
            raise MalformedInput("permutation JSON repeats a source entry")
        try:
            return EntryPermutation(src, dst, mapping)
        except (ShapeMismatch, NotBijective) as exc:
            raise MalformedInput(str(exc)) from exc


@dataclass
class LinearMatrixMap:
    """Linear map between matrix spaces, given by the images of all matrix units.

    ``images[i, j]`` is the image of the source unit e_{i+1, j+1}; it is a
    destination-shaped matrix.  Values are treated as immutable.
    """

    src_shape: Shape
    dst_shape: Shape
    images: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.src_shape = _check_shape(self.src_shape, "source shape")
        self.dst_shape = _check_shape(self.dst_shape, "destination shape")
        imgs = np.asarray(self.images, dtype=complex)
        expected = self.src_shape + self.dst_shape
        if imgs.shape != expected:
            raise ShapeMismatch(f"images tensor must have shape {expected}, got {imgs.shape}")
        if not np.all(np.isfinite(imgs.view(float))):
            raise ShapeMismatch("images must have finite entries")
        self.images = imgs

    def image_of_unit(self, idx: Entry) -> np.ndarray:
        i, j = idx
        if not (1 <= i <= self.src_shape[0] and 1 <= j <= self.src_shape[1]):
            raise ShapeMismatch(f"unit index {idx} outside {self.src_shape} grid")
        return self.images[i - 1, j - 1]

    def apply(self, a) -> np.ndarray:
        """T(a) as the image-table contraction sum_{ij} a_{ij} T(e_{ij})."""
        a = as_matrix(a)
        if a.shape != self.src_shape:
            raise ShapeMismatch(f"expected input shape {self.src_shape}, got {a.shape}")
        return np.tensordot(a, self.images, axes=([0, 1], [0, 1]))

    def apply_batch(self, batch: np.ndarray) -> np.ndarray:
        """Apply to a stack of source-shaped matrices at once."""
        batch = np.asarray(batch, dtype=complex)
        return np.tensordot(batch, self.images, axes=([1, 2], [0, 1]))

    def as_operator_matrix(self) -> np.ndarray:
        """The (p*q) x (m*n) matrix of T acting on vectorized inputs."""
        m, n = self.src_shape
        p, q = self.dst_shape
        return self.images.reshape(m * n, p * q).T.copy()

    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.as_operator_matrix()))

    def kernel_dimension(self) -> int:
        return self.src_shape[0] * self.src_shape[1] - self.rank()

    def is_injective(self) -> bool:
        return self.kernel_dimension() == 0


def identity_map(shape: Shape) -> LinearMatrixMap:
    m, n = _check_shape(shape, "shape")
    images = np.zeros((m, n, m, n), dtype=complex)
    for i in range(m):
        for j in range(n):
            images[i, j, i, j] = 1.0
    return LinearMatrixMap((m, n), (m, n), images)


def transpose_map(n: int) -> LinearMatrixMap:
    """a -> a^t on square n x n matrices."""
    return from_conjugation(list(range(1, n + 1)), list(range(1, n + 1)), transposed=True)


def scalar_map(shape: Shape, c: complex) -> LinearMatrixMap:
    t = identity_map(shape)
    return LinearMatrixMap(t.src_shape, t.dst_shape, c * t.images)


def from_weighted_permutation(f, rho: EntryPermutation) -> LinearMatrixMap:
    """Build T(a) = f * a_rho from a weight matrix and an entry rearrangement.

    Each mapped unit goes to its destination cell scaled by the weight
    stored there; unmapped units are sent to zero.
    """
    f = as_matrix(f)
    if f.shape != rho.dst_shape:
        raise ShapeMismatch(
            f"weight matrix shape {f.shape} != permutation destination {rho.dst_shape}"
        )
    m, n = rho.src_shape
    p, q = rho.dst_shape
    images = np.zeros((m, n, p, q), dtype=complex)
    for (i, j), (k, l) in rho.mapping.items():
        images[i - 1, j - 1, k - 1, l - 1] = f[k - 1, l - 1]
    return LinearMatrixMap((m, n), (p, q), images)


def from_conjugation(
    pi: list[int], sigma: list[int], transposed: bool = False
) -> LinearMatrixMap:
    """Build T(a) = u a v (or u a^t v) from row/column permutations.

    ``pi`` permutes destination rows and ``sigma`` destination columns; the
    unitaries are u = P(pi) and v = P(sigma)^t, so a plain conjugation sends
    e_{i,j} to e_{pi(i), sigma(j)} and a transposed one sends e_{i,j} to
    e_{pi(j), sigma(i)}.  Transposed maps require a square shape.
    """
    m, n = len(pi), len(sigma)
    if transposed and m != n:
        raise ShapeMismatch("transposed conjugation requires a square shape")
    if sorted(pi) != list(range(1, m + 1)):
        raise NotBijective(f"{list(pi)} is not a permutation of 1..{m}")
    if sorted(sigma) != list(range(1, n + 1)):
        raise NotBijective(f"{list(sigma)} is not a permutation of 1..{n}")
    images = np.zeros((m, n, m, n), dtype=complex)
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if transposed:
                images[i - 1, j - 1, pi[j - 1] - 1, sigma[i - 1] - 1] = 1.0
            else:
                images[i - 1, j - 1, pi[i - 1] - 1, sigma[j - 1] - 1] = 1.0
    return LinearMatrixMap((m, n), (m, n), images)


def _two_unit_pairs(m: int, n: int, max_pairs: int, rng: np.random.Generator):
    """Index pairs ((a,b),(c,d)) with distinct rows and columns, 0-based.

    The full family is enumerated when small, otherwise a deterministic
    subsample is drawn.
    """
    pairs = [
        ((a, b), (c, d))
        for a in range(m)
        for b in range(n)
        for c in range(a + 1, m)
        for d in range(n)
        if d != b
    ]
    if len(pairs) > max_pairs:
        keep = rng.choice(len(pairs), size=max_pairs, replace=False)
        pairs = [pairs[k] for k in sorted(keep)]
    return pairs


def operator_norm_lower_bound(
    t_map: LinearMatrixMap,
    trials: int = 64,
    seed: int = 0,
    max_pairs: int = 20000,
) -> float:
    """Certified lower bound for the operator norm of T (spectral-norm to spectral-norm).

    Maximizes ||T(a)|| over unit-norm probes: every matrix unit, every sum
    of two units with distinct rows and columns (the family behind the
    pigeonhole witnesses), and ``trials`` normalized Gaussian samples.
    Deterministic for a fixed seed.
    """
    if trials < 0:
        raise ValueError("trials must be >= 0")
    rng = np.random.default_rng(seed)
    m, n = t_map.src_shape
    flat = t_map.images.reshape(m * n, *t_map.dst_shape)
    best = float(np.max(spectral_norms(flat)))

    pair_images = []
    for (a, b), (c, d) in _two_unit_pairs(m, n, max_pairs, rng):
        pair_images.append(flat[a * n + b] + flat[c * n + d])
    if pair_images:
        best = max(best, float(np.max(spectral_norms(np.stack(pair_images)))))

    for _ in range(trials):
        a = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        a /= np.linalg.svd(a, compute_uv=False)[0]
        best = max(best, float(np.linalg.svd(t_map.apply(a), compute_uv=False)[0]))
    return best


MapKind = Literal["weighted_perm", "conjugation", "dense"]


def random_map(
    kind: MapKind,
    dims: Shape,
    seed: int = 0,
    kernel_fraction: float = 0.0,
    transposed: bool | None = None,
) -> LinearMatrixMap:
    """Reproducible pseudo-random map of the requested family.

    Weighted-permutation instances use a random total rearrangement of the
    grid with weights of modulus in [0.5, 2] and random phase; a positive
    ``kernel_fraction`` knocks that share of units into the kernel.
    Conjugation instances draw uniform row/column permutations, and the
    transpose flag (squares only) is random unless pinned.
    """
    m, n = _check_shape(dims, "dims")
    rng = np.random.default_rng(seed)
    if kind == "weighted_perm":
        cells = [(i, j) for i in range(1, m + 1) for j in range(1, n + 1)]
        shuffled = [cells[k] for k in rng.permutation(len(cells))]
        mapping = dict(zip(cells, shuffled))
        if kernel_fraction > 0.0:
            drop = rng.random(len(cells)) < kernel_fraction
            mapping = {k: v for (k, v), dead in zip(mapping.items(), drop) if not dead}
        rho = EntryPermutation((m, n), (m, n), mapping)
        mod = rng.uniform(0.5, 2.0, size=(m, n))
        phase = np.exp(2j * np.pi * rng.random((m, n)))
        return from_weighted_permutation(mod * phase, rho)
    if kind == "conjugation":
        pi = list(rng.permutation(m) + 1)
        sigma = list(rng.permutation(n) + 1)
        if transposed is None:
            transposed = bool(m == n and rng.random() < 0.5)
        return from_conjugation([int(x) for x in pi], [int(x) for x in sigma], transposed)
    if kind == "dense":
        images = rng.standard_normal((m, n, m, n)) + 1j * rng.standard_normal((m, n, m, n))
        return LinearMatrixMap((m, n), (m, n), images)
    raise ValueError(f"unknown map kind {kind!r}")


# --- JSON wire format -------------------------------------------------------
#
# {"src": [m, n], "dst": [p, q], "images": [<matrix JSON>, ...]} row-major


def map_to_json(t_map: LinearMatrixMap) -> dict:
    m, n = t_map.src_shape
    return {
        "src": [m, n],
        "dst": [t_map.dst_shape[0], t_map.dst_shape[1]],
        "images": [
            matrix_to_json(t_map.images[i, j]) for i in range(m) for j in range(n)
        ],
    }


def map_from_json(obj) -> LinearMatrixMap:
    if not isinstance(obj, dict):
        raise MalformedInput("map JSON must be an object")
    try:
        src = (int(obj["src"][0]), int(obj["src"][1]))
        dst = (int(obj["dst"][0]), int(obj["dst"][1]))
        raw_images = obj["images"]
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise MalformedInput(f"invalid map JSON: {exc}") from exc
    m, n = src
    if not isinstance(raw_images, list) or len(raw_images) != m * n:
        raise MalformedInput(f"expected {m * n} images, got {len(raw_images)}")
    images = np.zeros((m, n, dst[0], dst[1]), dtype=complex)
    for k, mat in enumerate(raw_images):
        parsed = matrix_from_json(mat)
        if parsed.shape != dst:
            raise MalformedInput(
                f"image {k} has shape {parsed.shape}, expected {dst}"
            )
        images[k // n, k % n] = parsed
    try:
        return LinearMatrixMap(src, dst, images)
    except ShapeMismatch as exc:
        raise MalformedInput(str(exc)) from exc
