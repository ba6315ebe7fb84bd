import pytest

import sepvar


def test_jet_roundtrip():
    f = sepvar.jet(1, [{"z": [1], "zbar": [1], "re": "1/2", "im": "0"}])
    assert f == sepvar.Jet.z(1, 0) * sepvar.Jet.zbar(1, 0) * sepvar.jet(1, [{"z": [0], "zbar": [0], "re": "1/2", "im": "0"}])
    assert f.order is None
    assert '"1/2"' in f.to_json()


def test_flat_k_is_exponential_of_k2():
    p = sepvar.preset("flat", 8)
    k = sepvar.solve_k(p.geometry, 4)
    assert k.fiber_order == 4
    assert not k.value.homogeneous(2).is_zero()
    assert k.value.homogeneous(3).is_zero()
    assert k.value.homogeneous(4).is_zero()


def test_disc_k_membership():
    p = sepvar.preset("disc", 14)
    k = sepvar.solve_k(p.geometry, 4)
    assert sepvar.membership_passes(k.value, 3)


def test_star_product_unit_and_flat_bracket():
    sp = sepvar.StarProduct(sepvar.preset("flat", 8).potential, 3)
    z, zb, one = sepvar.Jet.z(1, 0), sepvar.Jet.zbar(1, 0), sepvar.Jet.constant(1, 1)
    assert sp.multiply(one, z)[0] == z
    # z * zbar - zbar * z = nu {z, zbar}
    a, b = sp.multiply(z, zb), sp.multiply(zb, z)
    assert a[0] == b[0]
    assert not (a[1] - b[1]).is_zero()


def test_sigma_y_pipeline_disc():
    p = sepvar.preset("disc", 20)
    rep = sepvar.sigma_y_pipeline(p.potential, 3, 4)
    assert rep.passed
    assert all(ok for _, ok in rep.degree_ok)


def test_berezin_log_symbol():
    p = sepvar.preset("disc", 20)
    sp = sepvar.StarProduct(p.potential, 3)
    x = sepvar.operator_log(sepvar.berezin(sp))
    d = sepvar.h_from_x3(x)
    assert d.base.dim == 1
    assert sepvar.sigma_symbol(x).dim == 1


def test_error_code():
    with pytest.raises(sepvar.SepvarError) as info:
        sepvar.preset("no-such-geometry", 4)
    assert info.value.code


def test_run_bridge():
    ok, doc = sepvar.run("verify", "kset", geometry="flat", fiber_order=4)
    assert ok and doc["pass"]
    assert doc["command"] == "verify"
