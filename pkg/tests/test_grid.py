import math

import numpy as np
import pytest

from hartreelab import disc
from hartreelab.errors import DomainError


def test_ball_volume_exact_on_aligned_radius(lab):
    g = lab.grid(n=3, R=20.0, J=1024, mapping="uniform")
    rho = float(g.edges[512])
    exact = 4.0 / 3.0 * math.pi * rho ** 3
    assert abs(g.ball_volume(rho) - exact) / exact < 1e-12


def test_ball_volume_general_dimension(lab):
    g = lab.grid(n=5, R=10.0, J=512, mapping="uniform")
    rho = float(g.edges[128])
    exact = disc.surface_area(5) * rho ** 5 / 5.0
    assert abs(g.ball_volume(rho) - exact) / exact < 1e-12


def test_minimal_grid_coarse_flagged():
    g = disc.build_grid(3, 20.0, 16, "uniform")
    assert g.coarse
    assert np.all(np.diff(g.nodes) > 0) and np.all(g.weights > 0)
    assert not disc.build_grid(3, 20.0, 512, "uniform").coarse


def test_log_grid_constant_node_ratio(lab):
    g = lab.grid(n=5, R=10.0, J=512, mapping="log")
    ratios = g.nodes[1:] / g.nodes[:-1]
    assert ratios.max() - ratios.min() < 1e-12


@pytest.mark.parametrize("kwargs", [
    dict(n=3, R_max=20.0, J=8),
    dict(n=3, R_max=-1.0, J=64),
    dict(n=2, R_max=20.0, J=64),
    dict(n=3, R_max=20.0, J=64, mapping="sinh"),
])
def test_build_grid_rejects(kwargs):
    with pytest.raises(DomainError):
        disc.build_grid(kwargs.pop("n"), kwargs.pop("R_max"), kwargs.pop("J"),
                        **kwargs)


def test_quadrature_second_order_on_smooth_field():
    vals = {}
    for J in (512, 1024, 2048):
        g = disc.build_grid(3, 20.0, J, "uniform")
        u = disc.gaussian_field(g, 1.0, 1.3)
        vals[J] = disc.mass(u)
    e1 = abs(vals[512] - vals[2048])
    e2 = abs(vals[1024] - vals[2048])
    order = math.log2(e1 / e2)
    assert order > 1.8


def test_field_serialization_roundtrip(tmp_path, lab, rng):
    g = lab.grid(n=3, R=15.0, J=512)
    u = disc.RadialField(g, rng.standard_normal(g.J) + 1j * rng.standard_normal(g.J))
    path = tmp_path / "field.csv"
    disc.write_field_csv(u, path, meta={"t": 0.25})
    v, meta = disc.read_field_csv(path)
    assert meta["t"] == 0.25
    assert np.allclose(v.values, u.values, rtol=0, atol=1e-16)
    assert v.grid.content_hash() == g.content_hash()


def test_field_shape_mismatch_rejected(lab):
    g = lab.grid(n=3, R=15.0, J=512)
    with pytest.raises(DomainError):
        disc.RadialField(g, np.zeros(g.J - 1))
