"""Complex structures, S^1 actions and the Omega_F / alpha invariants for
OT-FKM polynomials with ``m = 1``.

Two complex structures on ``R^{2l} = R^l + R^l``:

* ``J(x, y) = (y, -x)``;
* ``J'(x, y) = (T x, T y)`` for ``l = 2n + 2`` with
  ``T(x_1..x_{2n+2}) = (x_{n+2}..x_{2n+2}, -x_1..-x_{n+1})``.

``F`` is invariant under both circle actions ``cos t z + sin t Jz``; the
alpha-invariant is constant on level sets for ``J`` and not for ``J'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .otfkm import CliffordSystem, Membership, eval_F, focal_membership, grad_F, hess_F, sample_level
from .symspace import AmbientSpace, SpaceKind


class HopfError(ValueError):
    pass


class Label(str, Enum):
    STANDARD = "J"
    TWISTED = "Jprime"


@dataclass(frozen=True)
class ComplexStructure:
    matrix: np.ndarray
    label: Label
    T: np.ndarray | None = None

    def __post_init__(self):
        j = np.asarray(self.matrix, dtype=float)
        eye = np.eye(j.shape[0])
        if np.max(np.abs(j @ j + eye)) > 1e-12 or np.max(np.abs(j + j.T)) > 1e-12:
            raise HopfError("complex structure must satisfy J^2 = -I and J^T = -J")
        if self.T is not None:
            t = np.asarray(self.T, dtype=float)
            if np.max(np.abs(t @ t + np.eye(t.shape[0]))) > 1e-12 or np.max(np.abs(t + t.T)) > 1e-12:
                raise HopfError("T must satisfy T^2 = -I and T^T = -T")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, z) -> np.ndarray:
        return self.matrix @ np.asarray(z, dtype=float)


def make_J(l: int) -> ComplexStructure:
    if l < 1:
        raise HopfError("l must be positive")
    eye, zero = np.eye(l), np.zeros((l, l))
    return ComplexStructure(np.block([[zero, eye], [-eye, zero]]), Label.STANDARD)


def make_T(n: int) -> np.ndarray:
    if n < 1:
        raise HopfError(f"twisted structure needs n >= 1 (l = 2n+2 >= 4), got n={n}")
    k = n + 1
    t = np.zeros((2 * k, 2 * k))
    t[np.arange(k), np.arange(k, 2 * k)] = 1.0
    t[np.arange(k, 2 * k), np.arange(k)] = -1.0
    return t


def make_Jprime(n: int) -> ComplexStructure:
    """``J'`` on ``R^{4n+4}``."""
    t = make_T(n)
    return ComplexStructure(np.kron(np.eye(2), t), Label.TWISTED, t)


def structure_for(label: str | Label, l: int) -> ComplexStructure:
    label = Label(label)
    if label is Label.STANDARD:
        return make_J(l)
    if l % 2:
        raise HopfError(f"J' needs even l = 2n+2, got l={l}")
    return make_Jprime(l // 2 - 1)


def _check(system: CliffordSystem, structure: ComplexStructure):
    if structure.dim != system.dim:
        raise HopfError(f"structure acts on R^{structure.dim}, system on R^{system.dim}")


def s1_orbit(structure: ComplexStructure, theta: float, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return math.cos(theta) * z + math.sin(theta) * structure(z)


def s1_invariance_check(system: CliffordSystem, structure: ComplexStructure,
                        samples: Sequence, n_theta: int = 64) -> float:
    """Max of ``|F(e^{it} z) - F(z)|`` over samples and a uniform theta grid."""
    _check(system, structure)
    thetas = np.linspace(0, 2 * math.pi, n_theta, endpoint=False)
    dev = 0.0
    for z in samples:
        f0 = eval_F(system, z)
        for th in thetas:
            dev = max(dev, abs(eval_F(system, s1_orbit(structure, th, z)) - f0))
    return dev


def omega_matrix(system: CliffordSystem, structure: ComplexStructure, z) -> float:
    """``DF^T J D^2F J DF`` at ``z`` with ambient derivatives."""
    _check(system, structure)
    g = grad_F(system, z)
    j = structure.matrix
    return float(g @ j @ hess_F(system, z) @ j @ g)


def omega_closed_form(system: CliffordSystem, structure: ComplexStructure, z) -> float:
    """``64 (2F^2 - F - 2 + 64 (<A0z,z>^2 + <A1z,z>^2) <x, Ty>^2)`` for ``J'``, ``m = 1``."""
    _check(system, structure)
    if structure.label is not Label.TWISTED or system.m != 1:
        raise HopfError("closed form only holds for J' on an m = 1 system")
    z = np.asarray(z, dtype=float)
    x, y = z[: system.l], z[system.l:]
    f = eval_F(system, z)
    a0, a1 = z @ system.A[0] @ z, z @ system.A[1] @ z
    return float(64 * (2 * f * f - f - 2 + 64 * (a0 * a0 + a1 * a1) * (x @ structure.T @ y) ** 2))


def omega_F(system: CliffordSystem, structure: ComplexStructure, z) -> float:
    value = omega_matrix(system, structure, z)
    if structure.label is Label.TWISTED and system.m == 1:
        closed = omega_closed_form(system, structure, z)
        if abs(value - closed) > 1e-6 * max(1.0, abs(closed)):
            raise AssertionError(
                f"Omega_F matrix form {value!r} disagrees with closed form {closed!r}"
            )
    return value


def alpha_invariant(system: CliffordSystem, structure: ComplexStructure, z,
                    g_degree: float = 4) -> float:
    """``(g^3 F (3 - 2F^2) + Omega_F) / (g^3 (1 - F^2)^{3/2})``.

    ``g_degree`` is the number of distinct principal curvatures (4 for
    OT-FKM families).
    """
    if g_degree <= 0:
        raise HopfError("g_degree must be positive")
    f = eval_F(system, z)
    if abs(f) >= 1 - 1e-6:
        raise HopfError(f"alpha is singular at focal levels (F={f!r})")
    g3 = g_degree ** 3
    return (g3 * f * (3 - 2 * f * f) + omega_F(system, structure, z)) / (g3 * (1 - f * f) ** 1.5)


def anchor_points(n: int) -> tuple[np.ndarray, np.ndarray]:
    """The two level-0 points ``z``, ``zhat`` on ``S^{4n+3}`` where ``Omega_F`` is +-128."""
    l = 2 * n + 2
    big = math.sqrt(0.5 + 1 / (2 * math.sqrt(2)))
    small = math.sqrt(0.5 - 1 / (2 * math.sqrt(2)))
    z = np.zeros(2 * l)
    z[0], z[l + n + 1] = big, small
    zhat = np.zeros(2 * l)
    zhat[0], zhat[l + 1] = big, small
    return z, zhat


@dataclass(frozen=True)
class ProbeReport:
    structure: Label
    level: float
    mean: float
    std: float
    min: float
    max: float
    count: int
    verdict: str
    values: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "invariant": "alpha",
            "structure": self.structure.value,
            "level": self.level,
            "stats": {"mean": self.mean, "std": self.std, "min": self.min,
                      "max": self.max, "count": self.count},
            "verdict": self.verdict,
        }


def homogeneity_probe(system: CliffordSystem, structure: ComplexStructure, level: float,
                      count: int, seed: int, g_degree: float = 4) -> ProbeReport:
    """Statistics of alpha over a sampled level set.

    The anchor points are added whenever they lie on the requested level
    (level 0, ``l`` even, ``m = 1``).
    """
    if count < 1:
        raise HopfError("count must be >= 1")
    _check(system, structure)
    points = list(sample_level(system, level, count, seed))
    if system.m == 1 and system.l % 2 == 0 and system.l >= 4:
        for p in anchor_points(system.l // 2 - 1):
            if abs(eval_F(system, p) - level) < 1e-10:
                points.append(p)
    vals = np.array([alpha_invariant(system, structure, p, g_degree) for p in points])
    mean, std = float(vals.mean()), float(vals.std())
    verdict = "constant" if std < 1e-6 * max(1.0, abs(mean)) else "non-constant"
    return ProbeReport(Label(structure.label), float(level), mean, std, float(vals.min()),
                       float(vals.max()), len(vals), verdict, tuple(vals.tolist()))


def phi_map(phi: float, w) -> np.ndarray:
    """``(cos phi w, sin phi w)``: the double cover of ``M-`` by ``S^1 x S^{l-1}``."""
    w = np.asarray(w, dtype=float)
    if abs(np.linalg.norm(w) - 1) > 1e-12:
        raise HopfError("w must be a unit vector")
    return np.concatenate([math.cos(phi) * w, math.sin(phi) * w])


def phi_preimages(p) -> list[tuple[float, np.ndarray]]:
    """All ``(phi, w)`` with ``phi_map(phi, w) = p``, ``phi in [0, 2 pi)``."""
    p = np.asarray(p, dtype=float)
    l = p.size // 2
    u, v = p[:l], p[l:]
    base = u if np.linalg.norm(u) >= np.linalg.norm(v) else v
    w0 = base / np.linalg.norm(base)
    out = []
    for w in (w0, -w0):
        phi = math.atan2(v @ w, u @ w) % (2 * math.pi)
        out.append((phi, w))
    return out


@dataclass(frozen=True)
class CheckReport:
    name: str
    deviation: float
    passed: bool
    details: dict | None = None


def phi_two_to_one_check(samples: Sequence[tuple[float, np.ndarray]], seed: int = 0,
                         tol: float = 1e-12) -> CheckReport:
    """``Phi(phi, w) = Phi(phi + pi, -w)`` and no other coincidences.

    Every image is inverted explicitly; exactly two preimages must come back.
    Random pairs of unrelated parameters must have distinct images.
    """
    dev = 0.0
    preimage_counts = set()
    for phi, w in samples:
        p = phi_map(phi, w)
        dev = max(dev, float(np.max(np.abs(p - phi_map(phi + math.pi, -np.asarray(w))))))
        pre = phi_preimages(p)
        preimage_counts.add(len(pre))
        for ph, ww in pre:
            dev = max(dev, float(np.max(np.abs(phi_map(ph, ww) - p))))
        ok = any(abs(math.remainder(ph - phi, 2 * math.pi)) < 1e-9 and np.allclose(ww, w, atol=1e-9)
                 for ph, ww in pre)
        if not ok:
            return CheckReport("phi_two_to_one", math.inf, False, {"reason": "sample not recovered"})
    rng = np.random.default_rng(seed)
    min_gap = math.inf
    for (phi1, w1), (phi2, w2) in zip(samples, samples[1:]):
        if rng.random() < 0.5:
            phi2, w2 = phi1 + 1e-3, w1  # nearby unrelated parameter
        related = (abs(math.remainder(phi1 - phi2, 2 * math.pi)) < 1e-12 and np.allclose(w1, w2)) or \
                  (abs(math.remainder(phi1 + math.pi - phi2, 2 * math.pi)) < 1e-12 and np.allclose(w1, -np.asarray(w2)))
        if not related:
            min_gap = min(min_gap, float(np.linalg.norm(phi_map(phi1, w1) - phi_map(phi2, w2))))
    passed = dev <= tol and preimage_counts == {2} and min_gap > 0
    return CheckReport("phi_two_to_one", dev, passed, {"min_gap_unrelated": min_gap})


def phi_isometry_check(samples: Sequence[tuple[float, np.ndarray]]) -> CheckReport:
    """Gram matrix of ``dPhi`` on an orthonormal frame of ``S^1 x S^{l-1}`` vs identity."""
    dev = 0.0
    for phi, w in samples:
        w = np.asarray(w, dtype=float)
        tangent = np.linalg.svd(w[None, :])[2][1:].T  # orthonormal basis of w^perp
        c, s = math.cos(phi), math.sin(phi)
        cols = [np.concatenate([-s * w, c * w])]
        cols += [np.concatenate([c * x, s * x]) for x in tangent.T]
        d = np.column_stack(cols)
        dev = max(dev, float(np.max(np.abs(d.T @ d - np.eye(d.shape[1])))))
    return CheckReport("phi_isometry", dev, dev < 1e-10)


def phi_membership_check(system: CliffordSystem, samples) -> CheckReport:
    wrong = sum(focal_membership(system, phi_map(phi, w)) is not Membership.M_MINUS
                for phi, w in samples)
    return CheckReport("phi_images_in_M_minus", float(wrong), wrong == 0)


def s1_action_on_Mminus_check(structure: ComplexStructure, samples: Sequence[np.ndarray],
                              n_theta: int = 16, n_phi: int = 16) -> CheckReport:
    """Check how the circle action moves ``Phi(phi, w)`` over a ``(theta, phi, w)`` grid.

    ``J``:  ``e^{it} Phi(phi, w) = Phi(phi - t, w)``;
    ``J'``: ``e^{it} Phi(phi, w) = Phi(phi, cos t w + sin t T w)``.
    """
    thetas = np.linspace(0, 2 * math.pi, n_theta, endpoint=False)
    phis = np.linspace(0, 2 * math.pi, n_phi, endpoint=False)
    dev = 0.0
    for w in samples:
        w = np.asarray(w, dtype=float)
        for th in thetas:
            for ph in phis:
                lhs = s1_orbit(structure, th, phi_map(ph, w))
                if structure.label is Label.STANDARD:
                    rhs = phi_map(ph - th, w)
                else:
                    rhs = phi_map(ph, math.cos(th) * w + math.sin(th) * (structure.T @ w))
                dev = max(dev, float(np.max(np.abs(lhs - rhs))))
    return CheckReport(f"s1_action_{structure.label.value}", dev, dev < 1e-12)


# g (m1 + m2) for rank-one spaces, from the index + nullity of a closed normal geodesic
def thorbergsson_product(space: AmbientSpace) -> int:
    if space.rank != 1 or space.kind is SpaceKind.GENERIC:
        raise HopfError("Thorbergsson closed forms are only tabulated for rank-one spaces")
    n = space.n_param
    return {
        SpaceKind.SPHERE: 2 * (n - 1),
        SpaceKind.COMPLEX_PROJECTIVE: 2 * n,
        SpaceKind.QUATERNION_PROJECTIVE: 4 * n + 2,
        SpaceKind.CAYLEY_PLANE: 22,
    }[space.kind]


@dataclass(frozen=True)
class ThorbergssonReport:
    space: str
    required: int
    product: int
    passed: bool
    focal_distance: float
    distance_lower_bound: float


def thorbergsson_check(space: AmbientSpace, g: int, m1: int, m2: int) -> ThorbergssonReport:
    """Compare ``g (m1 + m2)`` with the rank-one closed form.

    With ``2g`` equally spaced focal points on a normal circle of length
    ``l``, the focal submanifolds sit ``l/(2g)`` apart; since
    ``m1 + m2 >= 2`` this is at least ``l / required``.
    """
    if min(g, m1, m2) < 1:
        raise HopfError("g, m1, m2 must be positive integers")
    required = thorbergsson_product(space)
    product = g * (m1 + m2)
    l = space.circle_length
    return ThorbergssonReport(space.label, required, product, product == required,
                              l / (2 * g), l / required)
