"""Periodic lattice graphs used throughout the package.

A :class:`Lattice` is a plain undirected graph: a site count, a canonical
edge list (each edge ``(i, j)`` with ``i < j``, lexicographically sorted)
and optional 2D coordinates that are used only for drawing.  All physics
reads the edge list alone.

Builders are provided for the five regular families (ring, square, kagome,
maple-leaf/Betts, triangular), all with periodic wrapping.  Arbitrary
lattices can be read from / written to a small JSON document, see
:func:`load_lattice` and :func:`save_lattice`.

The canonical edge order defines the gene order of every hopping
chromosome, so it must never change between releases.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Lattice",
    "LatticeError",
    "InvalidSizeError",
    "SelfLoopError",
    "DuplicateEdgeError",
    "SiteIndexError",
    "LatticeFormatError",
    "build_ring",
    "build_square",
    "build_kagome",
    "build_betts",
    "build_triangular",
    "load_lattice",
    "save_lattice",
]


class LatticeError(ValueError):
    """Base class for lattice construction and parsing failures."""


class InvalidSizeError(LatticeError):
    """Requested tiling is too small (or otherwise unrealizable)."""


class SelfLoopError(LatticeError):
    """An edge connects a site to itself."""


class DuplicateEdgeError(LatticeError):
    """The same unordered pair appears twice in the edge list."""


class SiteIndexError(LatticeError):
    """An edge references a site index outside ``0..n_sites-1``."""


class LatticeFormatError(LatticeError):
    """A lattice document is malformed."""


def _canonical_edges(edges, n_sites: int) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise LatticeFormatError("edges must be a sequence of (i, j) pairs")
    if (arr < 0).any() or (arr >= n_sites).any():
        bad = arr[(arr < 0).any(axis=1) | (arr >= n_sites).any(axis=1)][0]
        raise SiteIndexError(f"edge {tuple(bad)} references a site outside 0..{n_sites - 1}")
    if (arr[:, 0] == arr[:, 1]).any():
        bad = arr[arr[:, 0] == arr[:, 1]][0]
        raise SelfLoopError(f"edge {tuple(bad)} is a self-loop")
    arr = np.sort(arr, axis=1)
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    arr = arr[order]
    dup = (np.diff(arr[:, 0]) == 0) & (np.diff(arr[:, 1]) == 0)
    if dup.any():
        k = int(np.flatnonzero(dup)[0])
        raise DuplicateEdgeError(f"edge {tuple(arr[k])} appears more than once")
    return arr


@dataclass(frozen=True, eq=False)
class Lattice:
    """Immutable undirected graph with optional render coordinates.

    Parameters
    ----------
    name : str
        Free-form label ("ring-32", "kagome-4x4", ...).
    n_sites : int
        Number of sites, indexed ``0..n_sites-1``.
    edges : array_like of shape (E, 2)
        Unordered nearest-neighbor pairs.  Stored canonically: each pair
        sorted, pairs lexicographically ordered, no self-loops, no
        duplicates.  Edge *k* of this canonical list is gene *k* of any
        hopping chromosome on this lattice.
    coords : array_like of shape (n_sites, 2), optional
        Dimensionless positions, used only by the SVG renderer.
    """

    name: str
    n_sites: int
    edges: np.ndarray
    coords: np.ndarray | None = None

    def __post_init__(self):
        if not isinstance(self.n_sites, (int, np.integer)) or self.n_sites < 1:
            raise LatticeFormatError("n_sites must be a positive integer")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        edges = _canonical_edges(self.edges, self.n_sites)
        edges.flags.writeable = False
        object.__setattr__(self, "edges", edges)
        if self.coords is not None:
            coords = np.asarray(self.coords, dtype=float)
            if coords.shape != (self.n_sites, 2):
                raise LatticeFormatError(
                    f"coords must have shape ({self.n_sites}, 2), got {coords.shape}"
                )
            coords.flags.writeable = False
            object.__setattr__(self, "coords", coords)

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def degrees(self) -> np.ndarray:
        """Per-site degree vector."""
        return np.bincount(self.edges.ravel(), minlength=self.n_sites)

    def edge_index(self) -> dict[tuple[int, int], int]:
        """Map from canonical pair ``(i, j)``, i < j, to gene index."""
        return {(int(i), int(j)): k for k, (i, j) in enumerate(self.edges)}

    def neighbors(self) -> list[list[int]]:
        """Adjacency lists (sorted)."""
        adj: list[list[int]] = [[] for _ in range(self.n_sites)]
        for i, j in self.edges:
            adj[int(i)].append(int(j))
            adj[int(j)].append(int(i))
        return [sorted(a) for a in adj]

    def is_bipartite(self) -> bool:
        """2-colorability test (BFS)."""
        color = np.full(self.n_sites, -1, dtype=np.int8)
        adj = self.neighbors()
        for start in range(self.n_sites):
            if color[start] != -1:
                continue
            color[start] = 0
            queue = [start]
            while queue:
                u = queue.pop()
                for v in adj[u]:
                    if color[v] == -1:
                        color[v] = 1 - color[u]
                        queue.append(v)
                    elif color[v] == color[u]:
                        return False
        return True

    def triangles(self) -> list[tuple[int, int, int]]:
        """All 3-cycles, as sorted site triples in lexicographic order."""
        adj = [set(a) for a in self.neighbors()]
        tris = []
        for i, j in self.edges:
            for k in sorted(adj[int(i)] & adj[int(j)]):
                if k > j:
                    tris.append((int(i), int(j), int(k)))
        return sorted(tris)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        same_coords = (self.coords is None) == (other.coords is None) and (
            self.coords is None or np.allclose(self.coords, other.coords)
        )
        return (
            self.name == other.name
            and self.n_sites == other.n_sites
            and np.array_equal(self.edges, other.edges)
            and same_coords
        )


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------

def build_ring(n: int) -> Lattice:
    """Periodic chain of ``n >= 3`` sites, coordination number 2."""
    if n < 3:
        raise InvalidSizeError(f"ring needs n >= 3 sites, got {n}")
    edges = [(i, (i + 1) % n) for i in range(n)]
    radius = 0.5 / math.sin(math.pi / n)  # unit bond length
    coords = [
        (radius * math.cos(2 * math.pi * i / n), radius * math.sin(2 * math.pi * i / n))
        for i in range(n)
    ]
    return Lattice(f"ring-{n}", n, edges, coords)


def build_square(lx: int, ly: int, periodic: bool = True) -> Lattice:
    """``lx`` x ``ly`` square lattice.

    Periodic wrapping gives coordination number 4 and ``2*lx*ly`` edges.
    A periodic 2xL strip (L > 2) would create parallel wrap bonds and is
    rejected; the degenerate 2x2 case is allowed, with the doubled wrap
    bonds collapsed to the plain 4-cycle.
    """
    if lx < 2 or ly < 2:
        raise InvalidSizeError(f"square lattice needs lx, ly >= 2, got {lx}x{ly}")
    if periodic and (lx == 2) != (ly == 2):
        raise InvalidSizeError(
            f"periodic {lx}x{ly} square would create parallel wrap bonds"
        )
    idx = lambda x, y: y * lx + x
    edges = set()
    for y in range(ly):
        for x in range(lx):
            if periodic or x + 1 < lx:
                a, b = idx(x, y), idx((x + 1) % lx, y)
                edges.add((min(a, b), max(a, b)))
            if periodic or y + 1 < ly:
                a, b = idx(x, y), idx(x, (y + 1) % ly)
                edges.add((min(a, b), max(a, b)))
    coords = [(float(x), float(y)) for y in range(ly) for x in range(lx)]
    tag = "per" if periodic else "open"
    lat = Lattice(f"square-{lx}x{ly}-{tag}", lx * ly, sorted(edges), coords)
    if periodic and (lx, ly) != (2, 2) and not (lat.degrees() == 4).all():
        raise InvalidSizeError(f"periodic {lx}x{ly} square wraps onto itself")
    return lat


# Kagome: triangular Bravais lattice a1=(2,0), a2=(1,sqrt(3)) with a 3-site
# basis forming corner-sharing up/down triangles.  Basis positions and the
# three inter-cell bonds per cell are fixed tables below.
_KAGOME_BASIS = ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2))
# (basis_from, basis_to, cell offset of the target)
_KAGOME_INTRA = ((0, 1), (0, 2), (1, 2))
_KAGOME_INTER = ((1, 0, (1, 0)), (2, 0, (0, 1)), (2, 1, (-1, 1)))


def build_kagome(cells_x: int, cells_y: int) -> Lattice:
    """Periodic kagome lattice of ``3 * cells_x * cells_y`` sites (z = 4)."""
    if cells_x < 2 or cells_y < 2:
        raise InvalidSizeError(
            f"kagome tiling needs at least 2x2 unit cells, got {cells_x}x{cells_y}"
        )
    a1 = (2.0, 0.0)
    a2 = (1.0, math.sqrt(3))
    idx = lambda cx, cy, b: 3 * ((cy % cells_y) * cells_x + (cx % cells_x)) + b
    edges = []
    coords = [None] * (3 * cells_x * cells_y)
    for cy in range(cells_y):
        for cx in range(cells_x):
            ox = cx * a1[0] + cy * a2[0]
            oy = cx * a1[1] + cy * a2[1]
            for b, (bx, by) in enumerate(_KAGOME_BASIS):
                coords[idx(cx, cy, b)] = (ox + bx, oy + by)
            for ba, bb in _KAGOME_INTRA:
                edges.append((idx(cx, cy, ba), idx(cx, cy, bb)))
            for ba, bb, (dx, dy) in _KAGOME_INTER:
                edges.append((idx(cx, cy, ba), idx(cx + dx, cy + dy, bb)))
    try:
        lat = Lattice(f"kagome-{cells_x}x{cells_y}", 3 * cells_x * cells_y, edges, coords)
    except LatticeError as exc:  # pragma: no cover - guarded by the 2x2 precondition
        raise InvalidSizeError(f"kagome {cells_x}x{cells_y} wraps onto itself: {exc}") from exc
    if not (lat.degrees() == 4).all():  # pragma: no cover
        raise InvalidSizeError(f"kagome {cells_x}x{cells_y} wraps onto itself")
    return lat


# Maple-leaf (Betts) lattice: a 1/7-depleted triangular lattice.  Sites live
# on the triangular lattice n*u1 + m*u2; the class (3n + m) mod 7 == 0 is
# removed, which leaves six sites per supercell, each with coordination 5.
# The supercell Bravais vectors are (2,1) and (-1,3) in (n, m) coordinates.
_BETTS_SUPER = ((2, 1), (-1, 3))
_TRI_NEIGHBOR_OFFSETS = ((1, 0), (0, 1), (1, -1))


def _betts_class(n: int, m: int) -> int:
    return (3 * n + m) % 7


_BETTS_REPS: tuple[tuple[int, int], ...] = tuple(
    sorted(
        {
            _betts_class(n, m): (n, m)
            for m in range(0, 3)
            for n in range(0, 7)
        }.items()
    )[c][1]
    for c in range(7)
)


def build_betts(cells: int) -> Lattice:
    """Periodic maple-leaf (Betts) lattice with ``cells`` 6-site unit cells.

    ``cells`` must factor as cx * cy with cx, cy >= 2 (most-square
    factorization is used); e.g. ``cells=8`` is the 48-site cluster.
    """
    if cells < 4:
        raise InvalidSizeError(f"maple-leaf tiling needs at least 4 unit cells, got {cells}")
    cx = cy = 0
    for a in range(int(math.isqrt(cells)), 1, -1):
        if cells % a == 0 and cells // a >= 2:
            cx, cy = max(cells // a, a), min(cells // a, a)
            break
    if cx < 2:
        raise InvalidSizeError(
            f"maple-leaf tiling with {cells} cells has no cx*cy factorization, cx, cy >= 2"
        )
    s1, s2 = _BETTS_SUPER

    def site_id(n: int, m: int) -> int | None:
        cls = _betts_class(n, m)
        if cls == 0:
            return None
        rn, rm = _BETTS_REPS[cls]
        dn, dm = n - rn, m - rm
        # invert (dn, dm) = s*(2,1) + t*(-1,3); the 2x2 system has det 7
        s = (3 * dn + dm) // 7
        t = (-dn + 2 * dm) // 7
        cell = (t % cy) * cx + (s % cx)
        return 6 * cell + (cls - 1)

    n_sites = 6 * cells
    edges = set()
    coords = [None] * n_sites
    for t in range(cy):
        for s in range(cx):
            for cls in range(1, 7):
                rn, rm = _BETTS_REPS[cls]
                n = rn + s * s1[0] + t * s2[0]
                m = rm + s * s1[1] + t * s2[1]
                i = site_id(n, m)
                coords[i] = (n + 0.5 * m, m * math.sqrt(3) / 2)
                for dn, dm in _TRI_NEIGHBOR_OFFSETS:
                    j = site_id(n + dn, m + dm)
                    if j is not None:
                        edges.add((min(i, j), max(i, j)))
    try:
        lat = Lattice(f"betts-{cells}", n_sites, sorted(edges), coords)
    except LatticeError as exc:  # pragma: no cover
        raise InvalidSizeError(f"maple-leaf tiling with {cells} cells wraps onto itself") from exc
    if not (lat.degrees() == 5).all():
        raise InvalidSizeError(
            f"maple-leaf tiling with {cells} cells wraps onto itself (degree != 5)"
        )
    return lat


def build_triangular(lx: int, ly: int) -> Lattice:
    """Periodic triangular lattice on a rhombic ``lx`` x ``ly`` torus (z = 6)."""
    if lx < 3 or ly < 3:
        raise InvalidSizeError(f"triangular lattice needs lx, ly >= 3, got {lx}x{ly}")
    idx = lambda x, y: (y % ly) * lx + (x % lx)
    edges = set()
    coords = [None] * (lx * ly)
    for y in range(ly):
        for x in range(lx):
            i = idx(x, y)
            coords[i] = (x + 0.5 * y, y * math.sqrt(3) / 2)
            for dx, dy in _TRI_NEIGHBOR_OFFSETS:
                j = idx(x + dx, y + dy)
                edges.add((min(i, j), max(i, j)))
    lat = Lattice(f"triangular-{lx}x{ly}", lx * ly, sorted(edges), coords)
    if not (lat.degrees() == 6).all():  # pragma: no cover - guarded by the 3x3 precondition
        raise InvalidSizeError(f"triangular {lx}x{ly} wraps onto itself")
    return lat


# ---------------------------------------------------------------------------
# Lattice document (JSON)
# ---------------------------------------------------------------------------

_REQUIRED_KEYS = {"name", "n_sites", "edges"}
_ALLOWED_KEYS = _REQUIRED_KEYS | {"coords"}


def load_lattice(text: str) -> Lattice:
    """Parse a lattice document.

    The document is a JSON object with keys ``name`` (string), ``n_sites``
    (positive integer), ``edges`` (array of ``[i, j]`` pairs) and optional
    ``coords`` (array of ``[x, y]`` per site).  Unknown keys are rejected.
    Invariant violations raise the dedicated exceptions
    (:class:`SelfLoopError`, :class:`DuplicateEdgeError`,
    :class:`SiteIndexError`).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LatticeFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise LatticeFormatError("lattice document must be a JSON object")
    missing = _REQUIRED_KEYS - doc.keys()
    if missing:
        raise LatticeFormatError(f"missing required fields: {sorted(missing)}")
    unknown = doc.keys() - _ALLOWED_KEYS
    if unknown:
        raise LatticeFormatError(f"unknown fields: {sorted(unknown)}")
    if not isinstance(doc["name"], str):
        raise LatticeFormatError("name must be a string")
    if not isinstance(doc["n_sites"], int) or isinstance(doc["n_sites"], bool):
        raise LatticeFormatError("n_sites must be an integer")
    edges = doc["edges"]
    if not isinstance(edges, list) or any(
        not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, int) for v in e))
        for e in edges
    ):
        raise LatticeFormatError("edges must be an array of [i, j] integer pairs")
    return Lattice(doc["name"], doc["n_sites"], edges, doc.get("coords"))


def save_lattice(lattice: Lattice) -> str:
    """Serialize a lattice to its canonical (edge-sorted) JSON document."""
    doc: dict = {
        "name": lattice.name,
        "n_sites": lattice.n_sites,
        "edges": [[int(i), int(j)] for i, j in lattice.edges],
    }
    if lattice.coords is not None:
        doc["coords"] = [[float(x), float(y)] for x, y in lattice.coords]
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
