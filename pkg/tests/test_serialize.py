import pytest

from cjl.incidence import build_config, sample_incidence, sample_plane
from cjl.rng import make_rng
from cjl.serialize import (FormatError, curve_hash, dumps_config, dumps_incidence, loads_config_points,
                           loads_incidence, quintic_hash)


@pytest.fixture(scope="module")
def point():
    return sample_incidence(2, make_rng(3))


def test_incidence_roundtrip(point):
    back = loads_incidence(dumps_incidence(point))
    assert back.curve.components == point.curve.components
    assert back.quintic == point.quintic
    assert curve_hash(back.curve) == curve_hash(point.curve)
    assert quintic_hash(back.quintic) == quintic_hash(point.quintic)


def test_incidence_rejects_bad_files(point):
    text = dumps_incidence(point)
    with pytest.raises(FormatError):
        loads_incidence(text.replace("# cjl incidence v1", "# other"))
    with pytest.raises(FormatError):
        loads_incidence(text.replace("quintic ", "quintic 9"))
    lines = text.splitlines()
    with pytest.raises(FormatError):
        loads_incidence("\n".join(l for l in lines if not l.startswith("curve 3")))


def test_config_roundtrip(point):
    rng = make_rng(4)
    plane, _ = sample_plane(point, rng)
    cfg = build_config(point, plane, rng)
    data = loads_config_points(dumps_config(cfg))
    assert data["degree"] == 2
    assert data["points"] == list(cfg.points)
    assert data["roles"] == list(cfg.roles)
    assert data["delta1"] == cfg.delta1


def test_config_needs_all_points():
    with pytest.raises(FormatError):
        loads_config_points("# cjl config v1\ndegree 1\npoint t1 0.0 1.0\n")
