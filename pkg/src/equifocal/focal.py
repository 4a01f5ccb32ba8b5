"""Focal points along normal circles and the checks built on them.

A focal parameter is a ``t`` where the end-point differential
``E(t) = D1(t) - D2(t) A`` is singular; its multiplicity is the nullity of
``E(t)``.  ``focal_scan`` finds them numerically for any shape operator,
``focal_scan_adapted`` in closed form when ``A`` commutes with ``R_a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .jacobi import SYMMETRY_TOL, endpoint_differential
from .symspace import TWO_PI, RootSpectrum

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class FocalError(ValueError):
    pass


class FrameMismatch(FocalError):
    pass


class ResolutionError(FocalError):
    """Roots closer than the scan grid can separate."""


class NotCurvatureAdapted(FocalError):
    pass


@dataclass(frozen=True)
class ShapeOperator:
    matrix: np.ndarray
    frame_tag: str | None = None

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise FocalError(f"shape operator must be square, got shape {a.shape}")
        if a.size and np.max(np.abs(a - a.T)) >= SYMMETRY_TOL:
            raise FocalError("shape operator must be symmetric")
        a.flags.writeable = False
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Principal curvatures in decreasing order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    @property
    def kappa(self) -> float:
        return float(self.eigenvalues()[0])

    def conjugate(self, q: np.ndarray) -> "ShapeOperator":
        """``Q^T A Q``, keeping the frame tag."""
        m = q.T @ self.matrix @ q
        return ShapeOperator((m + m.T) / 2, self.frame_tag)

    def to_dict(self) -> dict:
        return {"matrix": self.matrix.tolist(), "frame_tag": self.frame_tag}


@dataclass(frozen=True)
class FocalProfile:
    roots: tuple[tuple[float, int], ...]
    circle_length: float = TWO_PI
    t_max: float | None = None
    g: int | None = None
    theta: float | None = None
    m1: int | None = None
    m2: int | None = None

    def __post_init__(self):
        roots = tuple((float(t), int(m)) for t, m in self.roots)
        object.__setattr__(self, "roots", roots)
        if self.t_max is None:
            object.__setattr__(self, "t_max", float(self.circle_length))
        ts = [t for t, _ in roots]
        if any(t <= 0 for t in ts) or any(m < 1 for _, m in roots):
            raise FocalError("focal roots need t > 0 and multiplicity >= 1")
        if any(ts[i] >= ts[i + 1] for i in range(len(ts) - 1)):
            raise FocalError("focal roots must be strictly increasing")

    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.roots])

    def mults(self) -> list[int]:
        return [m for _, m in self.roots]

    def to_dict(self) -> dict:
        return {
            "l": self.circle_length,
            "t_max": self.t_max,
            "roots": [{"t": t, "mult": m} for t, m in self.roots],
            "g": self.g,
            "theta": self.theta,
            "m1": self.m1,
            "m2": self.m2,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FocalProfile":
        return cls(
            tuple((r["t"], r["mult"]) for r in doc["roots"]),
            doc["l"], doc.get("t_max"), doc.get("g"), doc.get("theta"),
            doc.get("m1"), doc.get("m2"),
        )


@dataclass(frozen=True)
class ScanOptions:
    points_per_half_period: int = 4096
    t_tol: float = 1e-12
    null_tol: float = 1e-7
    det_tol: float = 1e-10
    # refined candidates closer than this are the same root seen from adjacent brackets
    merge_tol: float = 1e-9


def _bind(spectrum: RootSpectrum, A) -> np.ndarray:
    if isinstance(A, ShapeOperator):
        if A.frame_tag is not None and A.frame_tag != spectrum.frame_tag:
            raise FrameMismatch(
                f"shape operator frame {A.frame_tag} does not match spectrum {spectrum.frame_tag}"
            )
        A = A.matrix
    else:
        A = ShapeOperator(A).matrix
    if A.shape != (spectrum.tangent_dim,) * 2:
        raise FrameMismatch(
            f"shape operator is {A.shape[0]}-dimensional, spectrum is {spectrum.tangent_dim}"
        )
    return A


def _nullity(E: np.ndarray, null_tol: float) -> tuple[int, float]:
    sv = np.linalg.svd(E, compute_uv=False)
    thresh = null_tol * max(1.0, sv[0])
    return int(np.sum(sv < thresh)), float(sv[-1])


def _golden_min(f, a: float, b: float, tol: float) -> float:
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (a + b) / 2


def _check_t_max(t_max: float, circle_length: float) -> float:
    t_max = float(t_max)
    if not t_max > 0:
        raise FocalError("t_max must be positive")
    if t_max > circle_length * (1 + 1e-12):
        raise FocalError(f"t_max={t_max} exceeds the circle length {circle_length}")
    return t_max


def focal_scan(spectrum: RootSpectrum, A, t_max: float, opts: ScanOptions | None = None,
               circle_length: float = TWO_PI) -> FocalProfile:
    """Find every ``t in (0, t_max]`` where ``det E(t) = 0``.

    Sign changes of ``det E`` on a uniform grid bracket odd-order roots; grid
    local minima of ``|det E|`` catch even-order ones.  Each bracket is
    refined by golden-section search on the smallest singular value of
    ``E(t)``.  The parity of the nullity at a refined root must match the
    bracket type, otherwise two roots share one grid cell and a
    ``ResolutionError`` asks for a denser grid.
    """
    opts = opts or ScanOptions()
    A = _bind(spectrum, A)
    t_max = _check_t_max(t_max, circle_length)
    n_grid = max(16, math.ceil(opts.points_per_half_period * t_max / (circle_length / 2)))
    grid = np.linspace(0.0, t_max, n_grid + 1)
    h = grid[1] - grid[0]
    Es = endpoint_differential(spectrum, A, grid)
    dets = np.linalg.det(Es)
    absd = np.abs(dets)

    # a determinant whose smallest singular value sits at roundoff has no trustworthy sign
    sv = np.linalg.svd(Es, compute_uv=False)
    noisy = sv[:, -1] <= 64 * A.shape[0] * np.finfo(float).eps * np.maximum(sv[:, 0], 1.0)
    sign = np.where(noisy, 0.0, np.sign(dets))
    # odd: True for a sign change, False for a |det| dip, None when undecidable (zero at t_max)
    brackets: list[tuple[float, float, bool | None]] = []
    for k in range(n_grid):
        if sign[k] * sign[k + 1] < 0:
            brackets.append((grid[k], grid[k + 1], True))
    zeros = np.flatnonzero(sign == 0)
    runs = np.split(zeros, np.flatnonzero(np.diff(zeros) > 1) + 1) if zeros.size else []
    for run in runs:
        lo, hi = int(run[0]), int(run[-1])
        if hi == n_grid:
            brackets.append((grid[max(lo - 1, 0)], grid[hi], None))
        elif lo > 0:
            brackets.append((grid[lo - 1], grid[hi + 1], bool(sign[lo - 1] * sign[hi + 1] < 0)))
    for k in range(1, n_grid + 1):
        right = absd[k + 1] if k < n_grid else np.inf
        if absd[k] <= absd[k - 1] and absd[k] <= right:
            brackets.append((grid[k - 1], grid[min(k + 1, n_grid)], False))

    def sigma_min(t):
        return np.linalg.svd(endpoint_differential(spectrum, A, t), compute_uv=False)[-1]

    found = []  # [t, nullity, sigma, had_sign_change]
    for a, b, odd in brackets:
        t = _golden_min(sigma_min, a, b, opts.t_tol)
        E = endpoint_differential(spectrum, A, t)
        nul, sig = _nullity(E, opts.null_tol)
        if odd is False and (nul == 0 or abs(np.linalg.det(E)) > opts.det_tol):
            continue
        found.append([t, max(nul, 1), sig, odd])

    found.sort(key=lambda r: r[0])
    merged: list[list] = []
    for r in found:
        if merged and r[0] - merged[-1][0] < opts.merge_tol:
            keep = merged[-1]
            if r[2] < keep[2]:
                keep[0], keep[1], keep[2] = r[0], r[1], r[2]
            if keep[3] is None or r[3] is None:
                keep[3] = None
            else:
                keep[3] = keep[3] or r[3]
        else:
            merged.append(list(r))

    for r in merged:
        if r[3] is not None and (r[1] % 2 == 1) != r[3]:
            raise ResolutionError(
                f"root near t={r[0]:.12g} has nullity {r[1]} but the determinant "
                f"{'changes' if r[3] else 'keeps'} sign; increase points_per_half_period"
            )
    for r0, r1 in zip(merged, merged[1:]):
        if r1[0] - r0[0] < h:
            raise ResolutionError(
                f"roots at t={r0[0]:.12g} and t={r1[0]:.12g} are closer than the grid step "
                f"{h:.3g}; increase points_per_half_period"
            )
    roots = tuple((r[0], r[1]) for r in merged if opts.t_tol < r[0] <= t_max)
    return FocalProfile(roots, circle_length, t_max)


@dataclass(frozen=True)
class AdaptedCheck:
    adapted: bool
    residual: float

    def __bool__(self) -> bool:
        return self.adapted


def is_curvature_adapted(spectrum: RootSpectrum, A, tol: float = 1e-8) -> AdaptedCheck:
    """Whether ``A`` commutes with ``R_a = diag(d_i^2)`` in the adapted frame."""
    A = _bind(spectrum, A)
    r = spectrum.frequencies() ** 2
    comm = A * r[None, :] - r[:, None] * A
    residual = float(np.max(np.abs(comm))) if comm.size else 0.0
    return AdaptedCheck(residual < tol, residual)


def focal_scan_adapted(spectrum: RootSpectrum, A, t_max: float,
                       circle_length: float = TWO_PI, t_tol: float = 1e-12,
                       merge_tol: float = 1e-9) -> FocalProfile:
    """Closed-form focal parameters for a curvature-adapted shape operator.

    On a block with frequency ``d`` and ``A``-eigenvalue ``lam`` the roots
    are ``t = (arccot(lam/d) + k pi)/d``; on the kernel block ``t = 1/lam``.
    """
    A = _bind(spectrum, A)
    t_max = _check_t_max(t_max, circle_length)
    check = is_curvature_adapted(spectrum, A)
    if not check:
        raise NotCurvatureAdapted(
            f"shape operator does not commute with R_a (residual {check.residual:.3g}); "
            "use focal_scan instead"
        )
    times = []
    blocks = spectrum.blocks()
    for (d, _), blk in zip(spectrum.entries, blocks):
        for lam in np.linalg.eigvalsh(A[blk, blk]):
            t = (math.pi / 2 - math.atan(lam / d)) / d
            while t <= t_max:
                times.append(t)
                t += math.pi / d
    kblk = blocks[-1]
    if spectrum.kernel_mult:
        for lam in np.linalg.eigvalsh(A[kblk, kblk]):
            if lam > 0 and 1.0 / lam <= t_max:
                times.append(1.0 / lam)

    times.sort()
    roots: list[list] = []
    for t in times:
        if t <= t_tol:
            continue
        if roots and t - roots[-1][0] < merge_tol:
            roots[-1][1] += 1
        else:
            roots.append([t, 1])
    return FocalProfile(tuple((t, m) for t, m in roots), circle_length, t_max)


@dataclass(frozen=True)
class BoundReport:
    count: int
    weighted_count: int
    window: float
    bound: int
    passed: bool
    sphere_bound: int | None = None
    sphere_passed: bool | None = None


def count_and_bound(profile: FocalProfile, spectrum: RootSpectrum,
                    beta: float | None = None) -> BoundReport:
    """Count focal points in ``[0, pi/B)`` and compare with ``(s+1) n``.

    The bound is applied to the count of distinct focal parameters; the
    multiplicity-weighted count is reported alongside.  For sphere spectra
    (a single ``d = 1`` block) the sharper bound ``L <= n`` is checked too.
    """
    beta = spectrum.beta if beta is None else float(beta)
    window = math.pi / beta if beta > 0 else math.inf
    inside = [(t, m) for t, m in profile.roots if t < window]
    count = len(inside)
    n = spectrum.tangent_dim
    bound = (spectrum.s + 1) * n
    sphere = spectrum.kernel_mult == 0 and spectrum.s == 1 and abs(spectrum.entries[0][0] - 1) < 1e-12
    return BoundReport(
        count=count,
        weighted_count=sum(m for _, m in inside),
        window=window,
        bound=bound,
        passed=count <= bound,
        sphere_bound=n if sphere else None,
        sphere_passed=(count <= n) if sphere else None,
    )


@dataclass(frozen=True)
class EquifocalReport:
    passed: bool
    deviation: float
    message: str = ""
    g: int | None = None
    theta: float | None = None
    m1: int | None = None
    m2: int | None = None
    spacing: float | None = None
    focal_distance: float | None = None
    profiles: tuple[FocalProfile, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "deviation": self.deviation,
            "message": self.message,
            "g": self.g,
            "theta": self.theta,
            "m1": self.m1,
            "m2": self.m2,
            "spacing": self.spacing,
            "focal_distance": self.focal_distance,
        }


def verify_equifocal(profiles: Sequence[FocalProfile], tol: float = 1e-6,
                     spacing_tol: float = 1e-8) -> EquifocalReport:
    """Check that focal data agree across sample points and follow the
    pattern ``theta + (j-1) l/(2g)`` with alternating multiplicities."""
    profiles = list(profiles)
    if len(profiles) < 2:
        raise FocalError("verify_equifocal needs at least two profiles")
    ref = profiles[0]
    l = ref.circle_length

    def fail(msg, dev=math.inf):
        return EquifocalReport(False, float(dev), msg, profiles=tuple(profiles))

    if any(abs(p.circle_length - l) > 1e-12 for p in profiles):
        return fail("profiles have different circle lengths")
    ref_t = ref.times()
    deviation = 0.0
    for i, p in enumerate(profiles[1:], start=1):
        if len(p.roots) != len(ref.roots):
            return fail(f"profile {i} has {len(p.roots)} focal points, profile 0 has {len(ref.roots)}")
        if p.mults() != ref.mults():
            return fail(f"profile {i} multiplicities {p.mults()} differ from {ref.mults()}")
        if len(ref_t):
            deviation = max(deviation, float(np.max(np.abs(p.times() - ref_t))))
    if deviation > tol:
        return fail(f"focal parameters differ across samples by {deviation:.3g}", deviation)
    if len(ref_t) < 2:
        return fail("at least two focal points are needed to read off the spacing", deviation)

    gaps = np.diff(ref_t)
    spacing = float(np.mean(gaps))
    g = int(round(l / (2 * spacing)))
    if g < 1 or np.max(np.abs(gaps - spacing)) > spacing_tol or abs(l / (2 * g) - spacing) > spacing_tol:
        return fail(f"focal parameters are not equally spaced by l/(2g) (mean gap {spacing:.12g})",
                    deviation)
    mults = ref.mults()
    m1, m2 = mults[0], mults[1]
    if any(m != (m1 if j % 2 == 0 else m2) for j, m in enumerate(mults)):
        return fail(f"multiplicities {mults} do not alternate", deviation)
    theta = float(ref_t[0])
    if ref.t_max >= l * (1 - 1e-12) and len(ref_t) != 2 * g:
        return fail(f"full circle carries {len(ref_t)} focal points, expected 2g={2 * g}", deviation)
    filled = tuple(replace(p, g=g, theta=float(p.times()[0]), m1=m1, m2=m2) for p in profiles)
    return EquifocalReport(True, deviation, "ok", g, theta, m1, m2, spacing, l / (2 * g), filled)


def _as_shape(s) -> ShapeOperator:
    if isinstance(s, ShapeOperator):
        return s
    inner = getattr(s, "shape", None)  # HypersurfaceSample
    if isinstance(inner, ShapeOperator):
        return inner
    return ShapeOperator(s)


@dataclass(frozen=True)
class ConstancyReport:
    constant: bool
    deviation: float
    per_index: tuple[float, ...]
    mean_curvatures: tuple[float, ...]


def principal_curvature_constancy(samples: Sequence, tol: float = 1e-6) -> ConstancyReport:
    """Compare sorted principal curvatures across sample points."""
    mats = [_as_shape(s) for s in samples]
    if len(mats) < 2:
        raise FocalError("need at least two samples")
    if len({m.dim for m in mats}) != 1:
        raise FocalError("samples have different dimensions")
    eig = np.array([m.eigenvalues() for m in mats])
    per_index = eig.max(axis=0) - eig.min(axis=0)
    dev = float(per_index.max()) if per_index.size else 0.0
    return ConstancyReport(dev < tol, dev, tuple(per_index.tolist()), tuple(eig.mean(axis=0).tolist()))


@dataclass(frozen=True)
class CutFocalReport:
    kappa: float
    e_c: float
    product: float
    passed: bool


def cut_focal_check(profile: FocalProfile, A) -> CutFocalReport:
    """``kappa * e_c <= 1`` with ``e_c`` the first focal parameter."""
    if not profile.roots:
        raise FocalError("cut_focal_check needs a non-empty profile")
    kappa = _as_shape(A).kappa
    e_c = profile.roots[0][0]
    product = kappa * e_c
    return CutFocalReport(kappa, e_c, product, product <= 1 + 1e-9)
