"""Compact symmetric-space models.

Spectra of the normal Jacobi operator are stored as frequency/multiplicity
pairs ``(d, m)`` where ``d = |alpha(a)|`` for a restricted root ``alpha`` and a
unit normal direction ``a``.  Rank-one spaces are normalized so that closed
geodesics have length ``circle_length`` (``2*pi`` by default); under that
normalization the round sphere has ``d = 1`` and the projective spaces have
``d in {1, 1/2}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
MERGE_TOL = 1e-10


class SpaceError(ValueError):
    """Invalid ambient-space parameters or direction."""


class SpaceKind(str, Enum):
    SPHERE = "sphere"
    COMPLEX_PROJECTIVE = "cpn"
    QUATERNION_PROJECTIVE = "hpn"
    CAYLEY_PLANE = "cap2"
    GENERIC = "generic"


@dataclass(frozen=True)
class RootSpectrum:
    """Eigen-data of ``sqrt(R_a)`` on the tangent space of the hypersurface.

    ``entries`` holds ``(d, m)`` pairs sorted by decreasing ``d``; the zero
    eigenvalue block of size ``kernel_mult`` comes last in the adapted frame.
    """

    entries: tuple[tuple[float, int], ...]
    kernel_mult: int = 0
    tangent_dim: int = field(default=-1)

    def __post_init__(self):
        entries = tuple((float(d), int(m)) for d, m in self.entries)
        object.__setattr__(self, "entries", entries)
        total = sum(m for _, m in entries) + self.kernel_mult
        if self.tangent_dim == -1:
            object.__setattr__(self, "tangent_dim", total)
        if self.kernel_mult < 0:
            raise SpaceError("kernel_mult must be nonnegative")
        if total != self.tangent_dim:
            raise SpaceError(
                f"multiplicities sum to {total}, expected tangent_dim={self.tangent_dim}"
            )
        if self.tangent_dim < 1:
            raise SpaceError("tangent_dim must be positive")
        ds = [d for d, _ in entries]
        if any(not d > 0 or not math.isfinite(d) for d in ds):
            raise SpaceError("frequencies d must be finite and strictly positive")
        if any(m < 1 for _, m in entries):
            raise SpaceError("multiplicities must be positive")
        if any(ds[i] <= ds[i + 1] for i in range(len(ds) - 1)):
            raise SpaceError("frequencies must be distinct and sorted descending")
        if len(entries) > self.tangent_dim - self.kernel_mult:
            raise SpaceError("too many distinct frequencies for the tangent dimension")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, int]], kernel_mult: int = 0,
                   tol: float = MERGE_TOL) -> "RootSpectrum":
        """Build a spectrum from unsorted pairs, merging near-equal frequencies.

        Pairs with ``d`` within ``tol`` of zero are folded into the kernel
        block, zero multiplicities are dropped.
        """
        merged: list[list] = []
        for d, m in sorted(((abs(float(d)), int(m)) for d, m in pairs), reverse=True):
            if m == 0:
                continue
            if d <= tol:
                kernel_mult += m
            elif merged and abs(merged[-1][0] - d) <= tol:
                merged[-1][1] += m
            else:
                merged.append([d, m])
        return cls(tuple((d, m) for d, m in merged), kernel_mult)

    @property
    def s(self) -> int:
        return len(self.entries)

    @property
    def rank(self) -> int:
        return self.kernel_mult + 1

    @property
    def beta(self) -> float:
        """Largest frequency, or 0 for a kernel-only spectrum."""
        return self.entries[0][0] if self.entries else 0.0

    def frequencies(self) -> np.ndarray:
        """Per-coordinate frequencies in the adapted frame (kernel last)."""
        parts = [np.full(m, d) for d, m in self.entries]
        parts.append(np.zeros(self.kernel_mult))
        return np.concatenate(parts)

    def blocks(self) -> list[slice]:
        """Index ranges of the eigenblocks, kernel block last (possibly empty)."""
        out, start = [], 0
        for _, m in self.entries:
            out.append(slice(start, start + m))
            start += m
        out.append(slice(start, start + self.kernel_mult))
        return out

    @property
    def frame_tag(self) -> str:
        body = ",".join(f"{d:.12g}x{m}" for d, m in self.entries)
        return f"[{body};0x{self.kernel_mult}]"

    def to_dict(self) -> dict:
        return {
            "entries": [{"d": d, "m": m} for d, m in self.entries],
            "kernel_mult": self.kernel_mult,
            "tangent_dim": self.tangent_dim,
        }


@dataclass(frozen=True)
class Root:
    coeffs: tuple[float, ...]
    mult: int


# (d, m) tables for length-2*pi closed geodesics; m may depend on n.
def _rank_one_table(kind: SpaceKind, n: int) -> list[tuple[float, int]]:
    if kind is SpaceKind.SPHERE:
        return [(1.0, n - 1)]
    if kind is SpaceKind.COMPLEX_PROJECTIVE:
        return [(1.0, 1), (0.5, 2 * n - 2)]
    if kind is SpaceKind.QUATERNION_PROJECTIVE:
        return [(1.0, 3), (0.5, 4 * n - 4)]
    if kind is SpaceKind.CAYLEY_PLANE:
        return [(1.0, 7), (0.5, 8)]
    raise SpaceError(f"no rank-one table for {kind.value}")


@dataclass(frozen=True)
class AmbientSpace:
    """A compact symmetric space ``N`` of dimension ``dim = n + 1``.

    For rank-one kinds ``n_param`` is the index in the usual symbol
    (``S^n``, ``CP^n``, ``HP^n``; 2 for the Cayley plane).
    """

    kind: SpaceKind
    dim: int
    rank: int
    circle_length: float
    beta_sup: float
    n_param: int | None = None
    roots: tuple[Root, ...] = ()

    @property
    def hypersurface_dim(self) -> int:
        return self.dim - 1

    @property
    def label(self) -> str:
        if self.kind is SpaceKind.GENERIC:
            return f"generic(rank={self.rank})"
        if self.kind is SpaceKind.CAYLEY_PLANE:
            return "cap2"
        return f"{self.kind.value}:{self.n_param}"

    def spectrum_at(self, direction: Sequence[float] | None = None) -> RootSpectrum:
        return spectrum_at(self, direction)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind.value,
            "dim": self.dim,
            "rank": self.rank,
            "circle_length": self.circle_length,
            "beta_sup": self.beta_sup,
        }
        if self.n_param is not None:
            out["n"] = self.n_param
        if self.roots:
            out["roots"] = [{"coeffs": list(r.coeffs), "mult": r.mult} for r in self.roots]
        return out


def _check_circle_length(circle_length: float) -> float:
    circle_length = float(circle_length)
    if not (circle_length > 0 and math.isfinite(circle_length)):
        raise SpaceError(f"circle_length must be positive, got {circle_length!r}")
    return circle_length


def make_space(kind: str | SpaceKind, n: int | None = None, *,
               roots: Sequence | None = None, rank: int | None = None,
               circle_length: float = TWO_PI) -> AmbientSpace:
    """Construct an ambient space.

    >>> make_space("sphere", 5).spectrum_at().entries
    ((1.0, 4),)
    """
    try:
        kind = SpaceKind(kind)
    except ValueError:
        raise SpaceError(f"unsupported space kind {kind!r}") from None
    circle_length = _check_circle_length(circle_length)
    scale = TWO_PI / circle_length

    if kind is SpaceKind.GENERIC:
        return _make_generic(roots, rank, circle_length)
    if roots is not None:
        raise SpaceError("roots is only accepted for kind 'generic'")

    if kind is SpaceKind.CAYLEY_PLANE:
        if n not in (None, 2):
            raise SpaceError(f"n: the Cayley plane only exists for n=2, got {n}")
        n, dim = 2, 16
    else:
        if n is None or int(n) != n:
            raise SpaceError(f"n: integer parameter required for {kind.value}")
        n = int(n)
        if kind is SpaceKind.SPHERE:
            if n < 2:
                raise SpaceError(f"n: sphere dimension must be >= 2, got {n}")
            dim = n
        elif kind is SpaceKind.COMPLEX_PROJECTIVE:
            if n < 1:
                raise SpaceError(f"n: CP^n needs n >= 1, got {n}")
            dim = 2 * n
        else:
            if n < 1:
                raise SpaceError(f"n: HP^n needs n >= 1, got {n}")
            dim = 4 * n
    table = [(d * scale, m) for d, m in _rank_one_table(kind, n) if m > 0]
    beta = max(d for d, _ in table)
    return AmbientSpace(kind, dim, 1, circle_length, beta, n_param=n)


def _make_generic(roots, rank, circle_length) -> AmbientSpace:
    if not roots:
        raise SpaceError("roots: generic spaces need a non-empty root table")
    parsed = []
    for i, r in enumerate(roots):
        if isinstance(r, Root):
            coeffs, mult = r.coeffs, r.mult
        elif isinstance(r, dict):
            if "coeffs" not in r or "mult" not in r:
                raise SpaceError(f"roots[{i}]: needs 'coeffs' and 'mult'")
            coeffs, mult = r["coeffs"], r["mult"]
        else:
            coeffs, mult = r
        coeffs = tuple(float(c) for c in coeffs)
        if int(mult) != mult or mult < 1:
            raise SpaceError(f"roots[{i}].mult: positive integer required, got {mult!r}")
        if not all(math.isfinite(c) for c in coeffs) or not any(coeffs):
            raise SpaceError(f"roots[{i}].coeffs: must be finite and nonzero")
        parsed.append(Root(coeffs, int(mult)))
    dims = {len(r.coeffs) for r in parsed}
    if len(dims) != 1:
        raise SpaceError("roots: all coeff vectors must have the same length")
    r_dim = dims.pop()
    if rank is not None and rank != r_dim:
        raise SpaceError(f"rank: declared {rank} but roots have {r_dim} coefficients")
    tangent = r_dim - 1 + sum(r.mult for r in parsed)
    beta = max(float(np.linalg.norm(r.coeffs)) for r in parsed)
    return AmbientSpace(SpaceKind.GENERIC, tangent + 1, r_dim, circle_length, beta,
                        roots=tuple(parsed))


def load_root_table(source: str | Path | dict, circle_length: float = TWO_PI) -> AmbientSpace:
    """Read ``{"rank": r, "roots": [{"coeffs": [...], "mult": m}, ...]}``."""
    if isinstance(source, dict):
        doc = source
    else:
        try:
            doc = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise SpaceError(f"root table: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "roots" not in doc:
        raise SpaceError("root table: missing field 'roots'")
    return make_space(SpaceKind.GENERIC, roots=doc["roots"], rank=doc.get("rank"),
                      circle_length=circle_length)


def spectrum_at(space: AmbientSpace, direction: Sequence[float] | None = None) -> RootSpectrum:
    """Spectrum of the normal Jacobi operator in the unit normal ``direction``.

    Rank-one spaces ignore ``direction``.  Generic spaces need a vector in
    the declared maximal-abelian frame; it is normalized here.
    """
    if space.rank == 1 and space.kind is not SpaceKind.GENERIC:
        scale = TWO_PI / space.circle_length
        table = [(d * scale, m) for d, m in _rank_one_table(space.kind, space.n_param)]
        return RootSpectrum.from_pairs(table)

    if direction is None:
        raise SpaceError("direction: required for generic spaces")
    a = np.asarray(direction, dtype=float).ravel()
    if a.shape != (space.rank,):
        raise SpaceError(f"direction: expected {space.rank} abelian coordinates, got {a.size}")
    norm = np.linalg.norm(a)
    if not (norm > 0 and np.all(np.isfinite(a))):
        raise SpaceError("direction: must be finite and nonzero")
    a = a / norm
    pairs = [(float(np.dot(r.coeffs, a)), r.mult) for r in space.roots]
    return RootSpectrum.from_pairs(pairs, kernel_mult=space.rank - 1)


def focal_lower_bound(space: AmbientSpace) -> float:
    """Universal lower bound on the distance between the focal submanifolds."""
    n, r = space.hypersurface_dim, space.rank
    return math.pi / (space.beta_sup * ((n + 2 - r) * n + 1))


def parse_space(text: str, circle_length: float = TWO_PI) -> AmbientSpace:
    """Parse CLI notation: ``sphere:4``, ``cpn:3``, ``hpn:2``, ``cap2``, ``generic:FILE``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "generic":
        if not arg:
            raise SpaceError("space: generic needs a root-table file, e.g. generic:roots.json")
        return load_root_table(arg, circle_length)
    if kind == "cap2":
        if arg not in ("", "2"):
            raise SpaceError(f"space: the Cayley plane takes no dimension, got {text!r}")
        return make_space(kind, circle_length=circle_length)
    try:
        n = int(arg)
    except ValueError:
        raise SpaceError(f"space: cannot parse dimension in {text!r}") from None
    return make_space(kind, n, circle_length=circle_length)
