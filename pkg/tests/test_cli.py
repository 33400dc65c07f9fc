import json
import os

import pytest

from bracealg.algebra import build_truncated_polynomial
from bracealg.ainfty import MinimalAInfty, gauge_by_central_unit
from bracealg.cli import main, structure_from_json, structure_to_json
from bracealg.models import seeded_minimal_model


@pytest.fixture
def kx2_spec(tmp_path):
    path = tmp_path / "kx2.json"
    path.write_text(json.dumps(build_truncated_polynomial(2).to_json()))
    return str(path)


def run(argv):
    return main(argv)


def test_hh_report(kx2_spec, tmp_path):
    out = str(tmp_path / "hh.json")
    assert run(["hh", kx2_spec, "--cap-p", "5", "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["schema"] == "v1"
    assert rep["hh_dimensions"] == {"0": 2, "1": 1, "2": 1, "3": 1, "4": 1, "5": 1}


def test_hh_all_zero_for_k(tmp_path):
    path = tmp_path / "k.json"
    path.write_text(json.dumps(build_truncated_polynomial(1).to_json()))
    out = str(tmp_path / "hh.json")
    assert run(["hh", str(path), "--cap-p", "4", "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["hh_dimensions"] == {"0": 1, "1": 0, "2": 0, "3": 0, "4": 0}


def test_malformed_spec_exit_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim": 2, "labels": ["1", "x"], "unit": ["1", "0"], "mult": [[0, 0, ["1"]]]}))
    assert run(["hh", str(path)]) == 2


def test_cap_exceeded_exit_3(kx2_spec):
    assert run(["hh", kx2_spec, "--cap-p", "12"]) == 3


def test_transfer_21_formal(tmp_path):
    out = str(tmp_path / "tr.json")
    assert run(["transfer", "--n", "2", "--a", "1", "--cap-n", "8", "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["formality"] == "FORMAL"
    assert rep["h0_dim"] == 1
    assert rep["mc_residual_digest"]["nonzero_arities"] == []


def test_transfer_consumes_model_dump(tmp_path):
    path = tmp_path / "dg.json"
    assert run(["model", "--n", "4", "--a", "2", "--out", str(path)]) == 0
    data = json.loads(open(path).read())["dga"]
    good = tmp_path / "dga.json"
    good.write_text(json.dumps(data))
    out = str(tmp_path / "tr.json")
    assert run(["transfer", str(good), "--cap-n", "6", "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["h0_dim"] == 2
    assert rep["mc_residual_digest"]["nonzero_arities"] == []


def test_transfer_corrupted_dg_spec_exit_2(tmp_path):
    path = tmp_path / "dg.json"
    assert run(["model", "--n", "4", "--a", "2", "--out", str(path)]) == 0
    data = json.loads(open(path).read())["dga"]
    data["diff"]["0"][0][0] = "1"  # break d^2 = 0 / Leibniz
    bad = tmp_path / "bad_dg.json"
    bad.write_text(json.dumps(data))
    assert run(["transfer", str(bad), "--cap-n", "6"]) == 2


def test_massey_42(tmp_path):
    out = str(tmp_path / "ma.json")
    assert run(["massey", "--n", "4", "--a", "2", "--cap-n", "8", "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["tate_unit"] is True
    assert rep["restricted_class"]["is_zero"] is False
    assert rep["omega4_stable_iso_certificate"] is True


def test_massey_semisimple_flag(tmp_path):
    out = str(tmp_path / "ma.json")
    assert run(["massey", "--n", "2", "--a", "1", "--cap-n", "8", "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["restricted_class"]["is_zero"] is True
    assert rep["tate_unit"] is True and rep["separable_coefficient"] is True


def test_compare_pipeline(tmp_path):
    m = seeded_minimal_model(4, 2, cap=8)
    mp = gauge_by_central_unit(m, m.algebra.element_from([1, 1]))
    zero = MinimalAInfty(m.laurent, {}, 8)
    pm, pmp, pz = (tmp_path / n for n in ("m.json", "mp.json", "z.json"))
    pm.write_text(json.dumps(structure_to_json(m)))
    pmp.write_text(json.dumps(structure_to_json(mp)))
    pz.write_text(json.dumps(structure_to_json(zero)))
    out = str(tmp_path / "cmp.json")
    assert run(["compare", str(pm), str(pmp), "--cap-n", "8", "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["result"] == "isomorphism"
    assert rep["residual_digest"]["nonzero_arities"] == []
    # mismatched classes -> exit 4
    assert run(["compare", str(pm), str(pz), "--cap-n", "8", "--out", out]) == 4
    # self-compare -> identity (no higher components)
    assert run(["compare", str(pm), str(pm), "--cap-n", "8", "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["morphism"]["components"] == {}


def test_structure_dump_roundtrip():
    m = seeded_minimal_model(4, 2, cap=8)
    m2 = structure_from_json(structure_to_json(m))
    assert all((m2.op(n) - m.op(n)).is_zero() for n in (4, 6, 8))


def test_model_report(tmp_path):
    out = str(tmp_path / "model.json")
    assert run(["model", "--n", "4", "--a", "2", "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["h0_dim"] == 2
    assert rep["rigid"] is False
    assert rep["stable_end_dim"] == 2


def test_reports_byte_identical_across_threads(kx2_spec, tmp_path):
    outs = []
    for i, threads in enumerate(("1", "1", "4")):
        out = str(tmp_path / ("h%d.json" % i))
        assert run(["hh", kx2_spec, "--cap-p", "5", "--threads", threads, "--out", out]) == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1] == outs[2]


def test_field_option_fp(kx2_spec, tmp_path):
    out = str(tmp_path / "hh.json")
    assert run(["hh", kx2_spec, "--cap-p", "4", "--field", "fp:23", "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["hh_dimensions"]["0"] == 2
    # p must exceed 2 * cap
    assert run(["hh", kx2_spec, "--cap-p", "4", "--field", "fp:5"]) == 2


def test_caps_validated():
    assert run(["transfer", "--n", "2", "--a", "1", "--cap-n", "3"]) == 2
