import json

import pytest

from spinlab import cache
from spinlab.cli import main
from spinlab.errors import CacheError
from spinlab.field_core import FieldParams

from conftest import REFERENCE_FIELDS, field, gram, star_table


def entry_for(n, ell):
    return cache.CacheEntry.from_objects(field(n, ell), gram(n, ell), star_table(n, ell))


@pytest.mark.parametrize("n,ell", REFERENCE_FIELDS)
def test_cache_round_trip(n, ell, tmp_path):
    e = entry_for(n, ell)
    path = cache.save(e, tmp_path)
    loaded = cache.load(FieldParams(n, ell), tmp_path)
    assert loaded == e
    assert loaded.checksum() == e.checksum()
    assert loaded.gram_provenance == ("oracle" if n <= 7 else "formula")
    assert not [p for p in tmp_path.iterdir() if p.name.endswith(".tmp")]
    assert path.exists()


def test_cache_integers_are_strings(tmp_path):
    path = cache.save(entry_for(3, 7), tmp_path)
    doc = json.loads(path.read_text())
    assert doc["payload"]["minpoly"] == ["-1", "-2", "1", "1"]
    assert doc["payload"]["mult_table"][0][0] == ["-2", "-2", "-1"]
    assert doc["payload"]["m_K"] == "1"


def test_cache_detects_tampering(tmp_path):
    path = cache.save(entry_for(3, 7), tmp_path)
    doc = json.loads(path.read_text())
    doc["payload"]["m_K"] = "2"
    path.write_text(json.dumps(doc))
    with pytest.raises(CacheError, match="checksum"):
        cache.load(FieldParams(3, 7), tmp_path)
    path.write_text("{not json")
    with pytest.raises(CacheError):
        cache.load(FieldParams(3, 7), tmp_path)


def test_cache_missing_returns_none(tmp_path):
    assert cache.load(FieldParams(5, 11), tmp_path) is None


def test_cache_env_location(tmp_path, monkeypatch):
    monkeypatch.setenv("SPINLAB_CACHE", str(tmp_path / "x"))
    assert cache.cache_dir() == tmp_path / "x"


# ---------------------------------------------------------------- CLI


def test_field_info(capsys):
    assert main(["field-info", "--n", "3", "--ell", "7"]) == 0
    assert "x^3 + x^2 - 2x - 1" in capsys.readouterr().out


def test_field_info_json(capsys):
    assert main(["field-info", "--n", "3", "--ell", "7", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["minpoly"] == ["-1", "-2", "1", "1"]
    assert doc["subgroup_H"] == ["1", "6"]


def test_invalid_params_exit_2(capsys):
    assert main(["field-info", "--n", "5", "--ell", "7"]) == 2
    assert "n does not divide ell-1" in capsys.readouterr().err
    assert main(["no-such-command"]) == 2


@pytest.mark.parametrize("n,ell,m,d", [(3, 7, "1", "1/2"), (13, 53, "5", "1893/4096"), (17, 103, "17", "30849/65536")])
def test_starlight_command(n, ell, m, d, capsys):
    assert main(["starlight", "--n", str(n), "--ell", str(ell), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["m_K"] == m and doc["D_K"] == d
    # second call reads the cache
    assert main(["starlight", "--n", str(n), "--ell", str(ell), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["D_K"] == d


def test_table1_command(capsys):
    assert main(["table1", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"]
    assert [r["provenance"] for r in doc["rows"]] == ["oracle"] * 3 + ["formula"] * 4


def test_validate_hilbert_exhaustive(capsys):
    assert main(["validate-hilbert", "--n", "3", "--exhaustive"]) == 0
    assert "laws PASS" in capsys.readouterr().out


def test_sample_command_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sample", "--n", "3", "--ell", "7", "--bound", "3000", "--csv", str(a)]) == 0
    assert main(["sample", "--n", "3", "--ell", "7", "--bound", "3000", "--jobs", "2", "--csv", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "p,f,class_bits,star,spins,generator"
    assert lines[1].startswith("3,3,")
    summary = json.loads((tmp_path / "a.summary.json").read_text())
    assert summary["passed"] and summary["stats"]["flagship_violations"] == 0
    assert summary["targets"]["D_K"] == "1/2"
