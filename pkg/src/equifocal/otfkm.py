"""OT-FKM isoparametric polynomials from symmetric Clifford systems.

``F(z) = |z|^4 - 2 sum_p <A_p z, z>^2`` on ``R^{2l}``.  Level sets of ``F``
on the unit sphere are isoparametric with four principal curvatures of
multiplicities ``(m, l-m-1)``; ``F^{-1}(+1)`` and ``F^{-1}(-1)`` are the
focal submanifolds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import null_space

from ._util import parallel_map
from .focal import ShapeOperator
from .symspace import RootSpectrum

CLIFFORD_TOL = 1e-12
CLUSTER_GAP = 1e-6


class CliffordError(ValueError):
    pass


class SamplingError(RuntimeError):
    pass


# Dimension of the irreducible Cl_k module carrying k anticommuting complex structures.
_DELTA = [1, 2, 4, 4, 8, 8, 8, 8]


def clifford_module_dim(k: int) -> int:
    if k < 0:
        raise CliffordError("k must be nonnegative")
    q, r = divmod(k, 8)
    return _DELTA[r] * 16 ** q


def _cd_mult(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Cayley-Dickson: (p, q)(r, s) = (pr - s* q, s p + q r*)
    if a.size == 1:
        return a * b
    h = a.size // 2
    p, q, r, s = a[:h], a[h:], b[:h], b[h:]
    return np.concatenate([_cd_mult(p, r) - _cd_mult(_cd_conj(s), q),
                           _cd_mult(s, p) + _cd_mult(q, _cd_conj(r))])


def _cd_conj(a: np.ndarray) -> np.ndarray:
    if a.size == 1:
        return a.copy()
    h = a.size // 2
    return np.concatenate([_cd_conj(a[:h]), -a[h:]])


def _left_mult(i: int, dim: int) -> np.ndarray:
    """Matrix of left multiplication by the unit ``e_i`` in the ``dim``-dimensional
    Cayley-Dickson algebra (complex numbers, quaternions, octonions)."""
    e = np.eye(dim)
    return np.column_stack([_cd_mult(e[i], e[j]) for j in range(dim)])


def skew_clifford(k: int) -> list[np.ndarray]:
    """``k`` skew-symmetric matrices ``E`` with ``E_i E_j + E_j E_i = -2 delta_ij I``
    on ``R^{clifford_module_dim(k)}``."""
    if k == 0:
        return []
    if k < 8:
        dim = clifford_module_dim(k)
        return [_left_mult(i, dim) for i in range(1, k + 1)]
    # Cl_{k} from Cl_{k-8}: G_j (x) I and omega (x) E_i, with omega = G_1...G_8
    octo = [np.eye(8)] + [_left_mult(i, 8) for i in range(1, 8)]
    z8 = np.zeros((8, 8))
    gens = [np.block([[z8, -c.T], [c, z8]]) for c in octo]
    omega = np.linalg.multi_dot(gens)
    inner = skew_clifford(k - 8)
    d = clifford_module_dim(k - 8)
    return [np.kron(g, np.eye(d)) for g in gens] + [np.kron(omega, e) for e in inner]


@dataclass(frozen=True)
class CliffordSystem:
    m: int
    l: int
    A: tuple[np.ndarray, ...]
    E: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        for mat in (*self.A, *self.E):
            mat.flags.writeable = False

    @property
    def dim(self) -> int:
        return 2 * self.l

    @property
    def multiplicities(self) -> tuple[int, int]:
        return self.m, self.l - self.m - 1

    def relation_residual(self) -> float:
        """Largest entrywise violation of the Clifford relations."""
        eye = np.eye(self.dim)
        res = 0.0
        for i, a in enumerate(self.A):
            res = max(res, float(np.max(np.abs(a - a.T))))
            for j, b in enumerate(self.A):
                target = 2 * eye if i == j else 0
                res = max(res, float(np.max(np.abs(a @ b + b @ a - target))))
        eye_l = np.eye(self.l)
        for i, a in enumerate(self.E):
            res = max(res, float(np.max(np.abs(a + a.T))))
            for j, b in enumerate(self.E):
                target = -2 * eye_l if i == j else 0
                res = max(res, float(np.max(np.abs(a @ b + b @ a - target))))
        return res

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "l": self.l,
            "A": [a.tolist() for a in self.A],
            "E": [e.tolist() for e in self.E],
        }


def build_clifford(m: int, l: int) -> CliffordSystem:
    """Symmetric Clifford system ``A_0..A_m`` on ``R^{2l}`` in the block form

    ``A_0 = [[I, 0], [0, -I]]``, ``A_1 = [[0, I], [I, 0]]``,
    ``A_j = [[0, -E_j], [E_j, 0]]`` for ``j >= 2``.
    """
    if int(m) != m or m < 1 or int(l) != l or l < 1:
        raise CliffordError(f"need integers m >= 1, l >= 1, got m={m}, l={l}")
    m, l = int(m), int(l)
    delta = clifford_module_dim(m - 1)
    if l % delta:
        raise CliffordError(
            f"m={m} requires l divisible by {delta} (dimension of a Cl_{m - 1} module), got l={l}"
        )
    eye, zero = np.eye(l), np.zeros((l, l))
    A = [np.block([[eye, zero], [zero, -eye]]), np.block([[zero, eye], [eye, zero]])]
    E = [np.kron(np.eye(l // delta), e) for e in skew_clifford(m - 1)]
    A.extend(np.block([[zero, -e], [e, zero]]) for e in E)
    system = CliffordSystem(m, l, tuple(A), tuple(E))
    res = system.relation_residual()
    if res > CLIFFORD_TOL:
        raise CliffordError(f"Clifford relations violated by {res:.3g}")
    return system


def _vec(system: CliffordSystem, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape != (system.dim,):
        raise ValueError(f"z: expected length {system.dim}, got shape {z.shape}")
    return z


def eval_F(system: CliffordSystem, z) -> float:
    z = _vec(system, z)
    r2 = z @ z
    return float(r2 * r2 - 2 * sum((z @ a @ z) ** 2 for a in system.A))


def grad_F(system: CliffordSystem, z) -> np.ndarray:
    z = _vec(system, z)
    out = 4 * (z @ z) * z
    for a in system.A:
        az = a @ z
        out -= 8 * (z @ az) * az
    return out


def hess_F(system: CliffordSystem, z) -> np.ndarray:
    z = _vec(system, z)
    out = 4 * (z @ z) * np.eye(system.dim) + 8 * np.outer(z, z)
    for a in system.A:
        az = a @ z
        out -= 8 * (2 * np.outer(az, az) + (z @ az) * a)
    return out


def spherical_gradient(system: CliffordSystem, z) -> np.ndarray:
    g = grad_F(system, z)
    return g - (g @ z) * z


def _project_to_level(system, z, c, max_iter, tol):
    for it in range(max_iter):
        resid = eval_F(system, z) - c
        if abs(resid) < tol:
            return z, it, resid
        gs = spherical_gradient(system, z)
        gn2 = gs @ gs
        if gn2 < 1e-16:
            return z, it, resid
        step = -resid * gs / gn2
        alpha = 1.0
        while alpha > 1e-8:
            trial = z + alpha * step
            trial /= np.linalg.norm(trial)
            if abs(eval_F(system, trial) - c) < abs(resid):
                break
            alpha /= 2
        z = trial
    return z, max_iter, eval_F(system, z) - c


def sample_level(system: CliffordSystem, c: float, count: int, seed: int,
                 max_iter: int = 10_000, tol: float = 1e-12) -> list[np.ndarray]:
    """``count`` unit vectors with ``|F(z) - c| < tol``.

    Each point starts from a Gaussian direction drawn from its own child of
    ``SeedSequence(seed)`` and is pulled onto the level set by Newton steps
    along the spherical gradient with backtracking.  Output depends only on
    ``(system, c, seed, index)``.
    """
    if not -1 < c < 1:
        raise SamplingError(f"level c={c} must lie in (-1, 1); focal levels are not sampled")
    if count < 1:
        raise SamplingError("count must be >= 1")
    children = np.random.SeedSequence(seed).spawn(count)

    def one(i):
        rng = np.random.default_rng(children[i])
        last = None
        for _attempt in range(8):
            z = rng.standard_normal(system.dim)
            z /= np.linalg.norm(z)
            z, iters, resid = _project_to_level(system, z, c, max_iter, tol)
            last = (iters, resid)
            gs = np.linalg.norm(spherical_gradient(system, z))
            if abs(resid) < tol and gs > 1e-6:
                return z
        raise SamplingError(
            f"sample {i}: no convergence to level {c} (iterations={last[0]}, residual={last[1]:.3g})"
        )

    return parallel_map(one, range(count))


@dataclass(frozen=True)
class HypersurfaceSample:
    z: np.ndarray
    level: float
    normal: np.ndarray
    shape: ShapeOperator
    curvatures: tuple[tuple[float, int], ...]
    basis: np.ndarray = field(repr=False)

    def focal_times(self) -> list[float]:
        """``arccot`` of each distinct curvature, in ``(0, pi)``."""
        return [math.pi / 2 - math.atan(k) for k, _ in self.curvatures]

    def to_dict(self) -> dict:
        return {
            "z": self.z.tolist(),
            "level": self.level,
            "normal": self.normal.tolist(),
            "curvatures": [{"value": k, "mult": m} for k, m in self.curvatures],
        }


def cluster_eigenvalues(values, gap: float = CLUSTER_GAP) -> tuple[tuple[float, int], ...]:
    """Group sorted-descending eigenvalues whose neighbours differ by < ``gap``."""
    out: list[list] = []
    for v in sorted(values, reverse=True):
        if out and out[-1][2] - v < gap:
            out[-1][0] += v
            out[-1][1] += 1
            out[-1][2] = v
        else:
            out.append([v, 1, v])
    return tuple((float(s / n), n) for s, n, _ in out)


def shape_operator_at(system: CliffordSystem, z) -> HypersurfaceSample:
    """Shape operator of the level set of ``F`` on the sphere through ``z``.

    The unit normal is the normalized spherical gradient, so focal
    parameters along it satisfy ``cot t = curvature``.  With ``Hs`` the
    spherical Hessian ``D^2F - <DF, z> I`` and ``B`` an orthonormal basis of
    ``{z, nu}^perp``, the shape operator is ``-B^T Hs B / |grad_S F|``.
    """
    z = _vec(system, z)
    if abs(np.linalg.norm(z) - 1) > 1e-12:
        raise ValueError("z must be a unit vector")
    level = eval_F(system, z)
    g = grad_F(system, z)
    gs = g - (g @ z) * z
    gnorm = np.linalg.norm(gs)
    if gnorm < 1e-8 or abs(level) >= 1:
        raise SamplingError(f"z lies on a focal submanifold (|grad_S F|={gnorm:.3g}, F={level:.12g})")
    nu = gs / gnorm
    basis = null_space(np.vstack([z, nu]))
    hs = hess_F(system, z) - (g @ z) * np.eye(system.dim)
    s = -basis.T @ hs @ basis / gnorm
    s = (s + s.T) / 2
    tag = RootSpectrum(((1.0, system.dim - 2),)).frame_tag
    shape = ShapeOperator(s, tag)
    return HypersurfaceSample(z, level, nu, shape, cluster_eigenvalues(np.linalg.eigvalsh(s)), basis)


class Membership(str, Enum):
    M_PLUS = "MPlus"
    M_MINUS = "MMinus"
    NEITHER = "Neither"


def focal_membership(system: CliffordSystem, z, tol: float = 1e-9) -> Membership:
    """Classify a unit vector against the focal submanifolds ``F = +1`` / ``F = -1``.

    For ``m = 1`` the explicit descriptions are tested:
    ``M+ = {|x|^2 = |y|^2 = 1/2, <x,y> = 0}``,
    ``M- = {|x|^2 |y|^2 = <x,y>^2}``; other systems fall back on ``F``.
    """
    z = _vec(system, z)
    if abs(z @ z - 1) > 1e-9:
        raise ValueError("z must be a unit vector")
    f = eval_F(system, z)
    if system.m != 1:
        if abs(f - 1) < tol:
            return Membership.M_PLUS
        if abs(f + 1) < tol:
            return Membership.M_MINUS
        return Membership.NEITHER
    x, y = z[: system.l], z[system.l:]
    xx, yy, xy = x @ x, y @ y, x @ y
    if abs(xx - 0.5) < tol and abs(yy - 0.5) < tol and abs(xy) < tol:
        if abs(f - 1) > 10 * tol:
            raise AssertionError(f"M+ conditions hold but F={f!r}")
        return Membership.M_PLUS
    if abs(xx * yy - xy * xy) < tol:
        if abs(f + 1) > 10 * tol:
            raise AssertionError(f"M- conditions hold but F={f!r}")
        return Membership.M_MINUS
    return Membership.NEITHER


def level_theta(sample: HypersurfaceSample) -> float:
    """First focal parameter, ``arccot`` of the largest curvature."""
    return sample.focal_times()[0]
