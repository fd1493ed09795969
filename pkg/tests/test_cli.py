import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from cohere import serialize
from cohere.channels import SchurMap, channels_equal
from cohere.cli import run
from cohere.demos import DEMOS
from cohere.families import erasing_map
from cohere.structure import extremal_nonunitary_example
from cohere.states import plus_state, pure, random_density

SCHEMA = json.loads(resources.files("cohere").joinpath("schema.json").read_text())


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(serialize.dumps(obj))
    return str(path)


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    return {
        "plus2": write(tmp_path, "plus2.json", serialize.state_to_json(plus_state(2))),
        "plus3": write(tmp_path, "plus3.json", serialize.state_to_json(plus_state(3))),
        "rho": write(tmp_path, "rho.json", serialize.state_to_json(random_density(3, seed=0))),
        "erasing": write(tmp_path, "erasing.json", serialize.channel_to_json(erasing_map())),
        "schur": write(tmp_path, "schur.json", serialize.channel_to_json(SchurMap(np.array([[1, 0.5], [0.5, 1]])))),
        "extremal": write(tmp_path, "extremal.json", serialize.channel_to_json(extremal_nonunitary_example(4))),
        "rank2": write(tmp_path, "rank2.json", serialize.state_to_json(pure(np.sqrt([2 / 3, 1 / 3, 0])))),
        "bad": write(tmp_path, "bad.json", {"dim": 2, "rho": [[[2, 0], [0, 0]], [[0, 0], [0, 0]]]}),
        "broken": str(tmp_path / "broken.json"),
        "tmp": tmp_path,
    }


class TestSerialize:
    def test_complex_round_trip(self, rng):
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert np.allclose(serialize.matrix_from_json(serialize.matrix_to_json(m)), m)

    def test_state_round_trip(self):
        rho = random_density(3, seed=2)
        back = serialize.state_from_json(json.loads(serialize.dumps(serialize.state_to_json(rho))))
        assert np.allclose(back.mat, rho.mat)
        psi = serialize.state_from_json(serialize.state_to_json(plus_state(3)))
        assert np.allclose(psi.amplitudes, plus_state(3).amplitudes)

    def test_channel_round_trip(self):
        ch = erasing_map(3)
        assert channels_equal(serialize.channel_from_json(serialize.channel_to_json(ch)), ch)

    def test_dim_checked(self):
        blob = serialize.state_to_json(plus_state(2))
        blob["dim"] = 3
        with pytest.raises(ValueError):
            serialize.state_from_json(blob)

    def test_bare_real_accepted(self):
        # bare reals are accepted as complex numbers with zero imaginary part
        assert serialize.complex_from_json(0.5) == 0.5


class TestCommands:
    def test_measure_cr(self, capsys, files):
        code, out, _ = invoke(capsys, "measure", "--state", files["plus2"], "--measure", "cr")
        blob = json.loads(out)
        assert code == 0 and blob["value"] == pytest.approx(1.0, abs=1e-12)
        jsonschema.validate(blob, SCHEMA)

    @pytest.mark.parametrize("m", ["l1", "dephase", "mindist", "wy"])
    def test_other_measures(self, capsys, files, m):
        code, out, _ = invoke(capsys, "measure", "--state", files["rho"], "--measure", m, "--p", "2")
        assert code == 0
        jsonschema.validate(json.loads(out), SCHEMA)

    def test_wy_with_h(self, capsys, files):
        code, out, _ = invoke(capsys, "measure", "--state", files["plus2"], "--measure", "wy", "--h", "0", "1")
        assert code == 0 and json.loads(out)["value"] == pytest.approx(0.25)

    def test_classify_erasing(self, capsys, files):
        code, out, _ = invoke(capsys, "classify", "--channel", files["erasing"])
        blob = json.loads(out)
        assert code == 0
        assert blob["verdicts"]["FIO"] == "Yes" and blob["verdicts"]["GIO"] == "No"
        jsonschema.validate(blob, SCHEMA)

    def test_convert_fio(self, capsys, files):
        code, out, _ = invoke(capsys, "convert", "--from", files["plus3"], "--to", files["rank2"], "--family", "fio")
        blob = json.loads(out)
        assert code == 0 and blob["verdict"] == "Feasible"
        jsonschema.validate(blob, SCHEMA)

    def test_convert_gio_infeasible(self, capsys, files):
        code, out, _ = invoke(capsys, "convert", "--from", files["plus3"], "--to", files["rank2"], "--family", "gio")
        assert code == 0 and json.loads(out)["verdict"] == "Infeasible"

    def test_convert_stochastic(self, capsys, files):
        code, out, _ = invoke(
            capsys, "convert", "--from", files["plus3"], "--to", files["rank2"], "--family", "gio", "--stochastic"
        )
        blob = json.loads(out)
        assert code == 0 and blob["probability"] == pytest.approx(0.5)

    def test_convert_mixed(self, capsys, files):
        code, out, _ = invoke(capsys, "convert", "--from", files["rho"], "--to", files["rho"], "--family", "gio")
        assert code == 0 and json.loads(out)["verdict"] == "Feasible"

    def test_decompose(self, capsys, files):
        code, out, _ = invoke(capsys, "decompose", "--channel", files["schur"], "--mixed-unitary")
        blob = json.loads(out)
        assert code == 0 and blob["success"] and blob["terms"] == 2
        jsonschema.validate(blob, SCHEMA)

    @pytest.mark.slow
    def test_decompose_failure(self, capsys, files):
        code, out, _ = invoke(capsys, "decompose", "--channel", files["extremal"], "--mixed-unitary", "--restarts", "3")
        blob = json.loads(out)
        assert code == 0 and not blob["success"]
        jsonschema.validate(blob, SCHEMA)

    def test_output_file(self, capsys, files):
        target = files["tmp"] / "out.json"
        code, out, _ = invoke(capsys, "measure", "--state", files["plus2"], "--measure", "l1", "-o", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["value"] == pytest.approx(1)


class TestDemos:
    @pytest.mark.parametrize("name", sorted(set(DEMOS) - {"extremal-d4", "plus3-reachable"}))
    def test_fast_demos(self, capsys, name):
        code, out, _ = invoke(capsys, "demo", name)
        blob = json.loads(out)
        assert code == 0 and blob["passed"], blob["checks"]
        jsonschema.validate(blob, SCHEMA)

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["extremal-d4", "plus3-reachable"])
    def test_slow_demos(self, capsys, name):
        code, out, _ = invoke(capsys, "demo", name)
        assert code == 0 and json.loads(out)["passed"]

    def test_names(self):
        assert set(DEMOS) == {
            "hadamard-kraus", "erasing", "pauli-mix", "gio-not-pio",
            "plus3-reachable", "activation", "extremal-d4", "appendix-c",
        }


class TestErrors:
    def test_no_subcommand(self, capsys):
        assert invoke(capsys)[0] == 2

    def test_unknown_subcommand(self, capsys):
        assert invoke(capsys, "frobnicate")[0] == 2

    def test_unknown_flag(self, capsys, files):
        assert invoke(capsys, "measure", "--state", files["plus2"], "--measure", "cr", "--bogus")[0] == 2

    def test_missing_file(self, capsys, files):
        code, _, err = invoke(capsys, "measure", "--state", files["broken"], "--measure", "cr")
        assert code == 2 and "not found" in err

    def test_invalid_state(self, capsys, files):
        code, _, err = invoke(capsys, "measure", "--state", files["bad"], "--measure", "cr")
        assert code == 2 and "invalid state" in err

    def test_not_json(self, capsys, files):
        path = files["tmp"] / "junk.json"
        path.write_text("{not json")
        assert invoke(capsys, "classify", "--channel", str(path))[0] == 2

    def test_nonpositive_tolerance(self, capsys, files):
        assert invoke(capsys, "measure", "--state", files["plus2"], "--measure", "cr", "--eq-tol", "0")[0] == 2

    def test_p_below_one(self, capsys, files):
        assert invoke(capsys, "measure", "--state", files["plus2"], "--measure", "dephase", "--p", "0.5")[0] == 2

    def test_degenerate_h(self, capsys, files):
        assert invoke(capsys, "classify", "--channel", files["erasing"], "--h", "1", "1")[0] == 2

    def test_dimension_mismatch(self, capsys, files):
        code = invoke(capsys, "convert", "--from", files["plus2"], "--to", files["plus3"], "--family", "gio")[0]
        assert code == 2

    def test_bad_seed_env(self, capsys, files, monkeypatch):
        monkeypatch.setenv("COHERE_SEED", "abc")
        assert invoke(capsys, "demo", "erasing")[0] == 2


class TestDeterminism:
    def test_byte_identical(self, capsys, files):
        argv = ("decompose", "--channel", files["schur"], "--mixed-unitary", "--seed", "7")
        first = invoke(capsys, *argv)[1]
        assert invoke(capsys, *argv)[1] == first

    def test_seed_env_fallback(self, capsys, files, monkeypatch):
        rand = write(files["tmp"], "rs.json", serialize.channel_to_json(SchurMap(np.eye(4))))
        argv = ("decompose", "--channel", rand, "--mixed-unitary")
        monkeypatch.setenv("COHERE_SEED", "5")
        via_env = invoke(capsys, *argv)[1]
        monkeypatch.delenv("COHERE_SEED")
        via_flag = invoke(capsys, *argv, "--seed", "5")[1]
        assert via_env == via_flag

    def test_subprocess_entry(self, files):
        proc = subprocess.run(
            [sys.executable, "-m", "cohere.cli", "measure", "--state", files["plus2"], "--measure", "cr"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["value"] == pytest.approx(1)
