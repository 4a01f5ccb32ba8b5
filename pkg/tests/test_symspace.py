import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equifocal import RootSpectrum, SpaceError, make_space, parse_space, spectrum_at
from equifocal.hopf import thorbergsson_product
from equifocal.jacobi import propagate
from equifocal.symspace import focal_lower_bound, load_root_table

TWO_PI = 2 * math.pi


# --- Hopf-model oracle -------------------------------------------------------
# Geodesics of the projective space through [p] are images of great circles
# cos(u) p + sin(u) v with v horizontal.  With closed geodesics of length 2pi the
# metric is 4x the quotient metric, so arclength s = 2u and a variation of v
# gives a Jacobi field whose norm is twice the norm of the horizontal part of
# d/de (cos(s/2) p + sin(s/2) v(e)).


def _quaternion_units(n_coords):
    i = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], float)
    j = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], float)
    k = i @ j
    eye = np.eye(n_coords)
    return [np.kron(eye, u) for u in (i, j, k)]


def _complex_units(n_coords):
    i = np.array([[0, -1], [1, 0]], float)
    return [np.kron(np.eye(n_coords), i)]


def _horizontal(q, units, w):
    basis = np.column_stack([q] + [u @ q for u in units])
    qmat, _ = np.linalg.qr(basis)
    return w - qmat @ (qmat.T @ w)


def _hopf_jacobi_norms(units, p, v, w, s_values):
    def curve(eps, s):
        ve = v + eps * w
        ve = _horizontal(p, units, ve)
        ve /= np.linalg.norm(ve)
        return math.cos(s / 2) * p + math.sin(s / 2) * ve

    h = 1e-6
    out = []
    for s in s_values:
        q = curve(0.0, s)
        dq = (curve(h, s) - curve(-h, s)) / (2 * h)
        out.append(2 * np.linalg.norm(_horizontal(q, units, dq)))
    return np.array(out)


@pytest.mark.parametrize("kind,n", [("cpn", 2), ("cpn", 3), ("hpn", 2), ("hpn", 3)])
def test_projective_spectrum_matches_hopf_model(kind, n):
    rng = np.random.default_rng(7 + n)
    units = _complex_units(n + 1) if kind == "cpn" else _quaternion_units(n + 1)
    dim = units[0].shape[0]
    p = rng.normal(size=dim)
    p /= np.linalg.norm(p)
    v = _horizontal(p, units, rng.normal(size=dim))
    v /= np.linalg.norm(v)
    # w is orthogonal to the geodesic velocity v (a normal Jacobi field)
    w = _horizontal(p, units, rng.normal(size=dim))
    w -= (w @ v) * v
    w /= np.linalg.norm(w)

    # split w' = 2 * (dq/de at s=0)/2 into the v-fibre directions (d=1) and the rest (d=1/2)
    fibre = np.column_stack([u @ v for u in units])
    c_fast = fibre.T @ w
    c_slow = math.sqrt(max(0.0, 1 - c_fast @ c_fast))

    spec = spectrum_at(make_space(kind, n))
    fast = [d for d, _ in spec.entries if abs(d - 1) < 1e-12]
    slow = [d for d, _ in spec.entries if abs(d - 0.5) < 1e-12]
    assert fast and slow

    s_values = np.linspace(0.1, TWO_PI - 0.1, 17)
    oracle = _hopf_jacobi_norms(units, p, v, w, s_values)

    # J(0) = 0, |J'(0)| = 1 split as (c_fast, c_slow) over the d=1 and d=1/2 blocks
    y1 = np.zeros(spec.tangent_dim)
    m_fast = spec.entries[0][1]
    y1[:m_fast] = c_fast
    y1[m_fast] = c_slow
    model = np.array([np.linalg.norm(propagate(spec, np.zeros_like(y1), y1, s).position)
                      for s in s_values])
    np.testing.assert_allclose(model, oracle, atol=1e-7)


# --- index oracle --------------------------------------------------------------
# i + v of a closed geodesic of length 2pi counts conjugate points with
# multiplicity: each frequency d contributes m * #{k >= 1 : k pi / d <= 2 pi}.


def _index_plus_nullity(spec: RootSpectrum) -> int:
    return sum(m * math.floor(2 * d + 1e-9) for d, m in spec.entries)


@pytest.mark.parametrize("kind,n", [("sphere", 3), ("sphere", 9), ("cpn", 1), ("cpn", 4),
                                    ("hpn", 1), ("hpn", 3), ("cap2", None)])
def test_rank_one_tables_agree_with_index_count(kind, n):
    space = make_space(kind, n)
    assert _index_plus_nullity(space.spectrum_at()) == thorbergsson_product(space)


def test_rank_one_tables():
    assert spectrum_at(make_space("sphere", 5)).entries == ((1.0, 4),)
    assert spectrum_at(make_space("cpn", 3)).entries == ((1.0, 1), (0.5, 4))
    assert spectrum_at(make_space("hpn", 2)).entries == ((1.0, 3), (0.5, 4))
    cap = make_space("cap2")
    assert cap.dim == 16 and spectrum_at(cap).entries == ((1.0, 7), (0.5, 8))


def test_circle_length_pi_reproduces_doubled_table():
    space = make_space("cpn", 2, circle_length=math.pi)
    assert spectrum_at(space).entries == ((2.0, 1), (1.0, 2))
    assert space.beta_sup == 2.0
    assert focal_lower_bound(space) == pytest.approx(math.pi / 26)


def test_generic_rank_two_spectrum(tmp_path):
    doc = {"rank": 2, "roots": [{"coeffs": [1, 0], "mult": 1}, {"coeffs": [0, 1], "mult": 1},
                                {"coeffs": [1, 1], "mult": 1}]}
    path = tmp_path / "a2.json"
    path.write_text(json.dumps(doc))
    space = parse_space(f"generic:{path}")
    assert space.rank == 2 and space.dim == 5
    spec = spectrum_at(space, [1, 0])
    assert spec.kernel_mult == 2  # the (0,1) root is singular in this direction
    assert spec.entries == ((1.0, 2),)
    spec = spectrum_at(space, [2, 1])
    assert spec.kernel_mult == 1 and spec.s == 3


def test_generic_errors(tmp_path):
    with pytest.raises(SpaceError, match="direction"):
        spectrum_at(load_root_table({"roots": [{"coeffs": [1, 0], "mult": 1}]}))
    with pytest.raises(SpaceError, match="mult"):
        load_root_table({"roots": [{"coeffs": [1, 0], "mult": 0}]})
    with pytest.raises(SpaceError, match="roots"):
        load_root_table({"rank": 2})
    bad = tmp_path / "bad.json"
    bad.write_text('{"roots": [\n  {"coeffs": [1, 0],, "mult": 1}]}')
    with pytest.raises(SpaceError, match="line 2"):
        load_root_table(bad)


@pytest.mark.parametrize("text", ["sphere:1", "cpn:0", "cpn:x", "torus:3", "cap2:3"])
def test_parse_space_rejects(text):
    with pytest.raises(SpaceError):
        parse_space(text)


@given(st.lists(st.tuples(st.floats(0.0, 5.0), st.integers(0, 4)), min_size=1, max_size=8),
       st.integers(0, 3))
def test_from_pairs_preserves_dimension(pairs, kernel):
    total = sum(m for _, m in pairs) + kernel
    if total == 0:
        return
    spec = RootSpectrum.from_pairs(pairs, kernel)
    assert spec.tangent_dim == total
    ds = [d for d, _ in spec.entries]
    assert ds == sorted(ds, reverse=True)
    assert spec.frequencies().shape == (total,)
    assert sum(b.stop - b.start for b in spec.blocks()) == total


@settings(max_examples=50)
@given(st.sampled_from(["sphere", "cpn", "hpn"]), st.integers(2, 6),
       st.floats(0.5, 20.0))
def test_spectrum_scales_inversely_with_circle_length(kind, n, length):
    base = spectrum_at(make_space(kind, n))
    scaled = spectrum_at(make_space(kind, n, circle_length=length))
    for (d0, m0), (d1, m1) in zip(base.entries, scaled.entries):
        assert m0 == m1
        assert d1 == pytest.approx(d0 * TWO_PI / length)
