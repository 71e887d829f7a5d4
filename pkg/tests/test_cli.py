import json

import numpy as np
import pytest

from gybo.cli import main, read_state, write_state
from gybo.slocc import w_state
from gybo.tensor_core import PureState, basis_state


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_u3_json(capsys):
    code, out, _ = run(capsys, "verify", "--case", "U3", "--format", "json")
    assert code == 0
    rep = json.loads(out)[0]
    assert rep["checks"]["gybe_residual"] < 1e-10
    assert rep["checks"]["unitarity_deviation"] < 1e-12
    c = {tuple(cl["value"]): cl["algebraic"] for cl in rep["checks"]["eigen_clusters"]}
    want = (np.sqrt(5) + 1j * np.sqrt(3)) / (2 * np.sqrt(2))
    assert any(abs(complex(*v) - want) < 1e-9 and k == 16 for v, k in c.items())
    assert any(abs(complex(*v) - want.conjugate()) < 1e-9 and k == 16 for v, k in c.items())


def test_verify_all_exits_zero(capsys):
    code, _, err = run(capsys, "verify", "--all")
    assert code == 0, err


def test_unknown_case_is_usage_error(capsys):
    code, out, err = run(capsys, "verify", "--case", "NOPE")
    assert code == 2 and out == "" and "NOPE" in err


def test_bad_param_is_usage_error(capsys):
    assert run(capsys, "verify", "--case", "5B", "--param", "zz=1")[0] == 2
    assert run(capsys, "verify", "--case", "5B", "--param", "junk")[0] == 2
    assert run(capsys, "verify", "--case", "5B", "--tol", "nope=1")[0] == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--format", "xml"])
    assert exc.value.code == 2


def test_param_override_and_csv(capsys):
    code, out, _ = run(capsys, "verify", "--case", "6C", "--param", "k=1", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0].startswith("case,")
    assert lines[1].startswith("6C,") and ",False," in lines[1]


def test_markdown_lists_mismatches(capsys):
    code, out, err = run(capsys, "verify", "--case", "6A")
    assert code == 1
    assert "| 6A |" in out and "w_class_output" in err


def test_determinism_and_jobs(capsys):
    args = ["verify", "--case", "5B", "--case", "P1", "--format", "json", "--seed", "7"]
    a = run(capsys, *args)[1]
    b = run(capsys, *args, "--jobs", "2")[1]
    assert a == b
    assert [r["case_id"] for r in json.loads(a)] == ["5B", "P1"]


@pytest.mark.parametrize("state,cls", [(w_state(3), "W"),
                                       (PureState(3, np.eye(8)[0] + np.eye(8)[7]).normalize(),
                                        "GHZ"),
                                       (basis_state("000"), "product")])
def test_classify_files(tmp_path, capsys, state, cls):
    path = tmp_path / "s.json"
    write_state(state, path)
    code, out, _ = run(capsys, "classify", str(path))
    assert code == 0 and json.loads(out)["class"] == cls
    assert np.allclose(read_state(path).amplitudes, state.amplitudes)


def test_classify_schema_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"num_qubits": 1,\n "amplitudes": [[1, 0],\n [0]]}')
    code, _, err = run(capsys, "classify", str(bad))
    assert code == 3 and "line 3" in err
    bad.write_text('{"num_qubits": 1,\n "amplitudes": [[1, 0], ')
    code, _, err = run(capsys, "classify", str(bad))
    assert code == 3 and "line 2" in err
    assert run(capsys, "classify", str(tmp_path / "missing.json"))[0] == 3


def test_search_command(capsys):
    code, out, err = run(capsys, "search", "U3sym", "--start", "0.3")
    assert code == 0 and "U3sym" in err
    alpha = json.loads(out)["params"][0][0]
    assert abs(alpha - 1 / np.sqrt(5)) < 1e-6
    code, out, _ = run(capsys, "search", "ansatz242", "--start", "0.3", "--max-iter", "3")
    assert code == 4
    assert run(capsys, "search", "bogus")[0] == 2


def test_powers_command(capsys):
    code, out, _ = run(capsys, "powers", "+", "--nmax", "12")
    assert code == 0 and json.loads(out)["max_deviation"] < 1e-10
    assert run(capsys, "powers", "x")[0] == 2


def test_spectrum_command(capsys):
    code, out, _ = run(capsys, "spectrum", "6C", "--param", "k=2")
    d = json.loads(out)
    got = sorted((round(c["value"][0] / d["scale"][0]), c["algebraic"]) for c in d["clusters"])
    assert code == 0 and got == [(-7, 4), (1, 8), (7, 4)]


def test_cases_and_probe(capsys):
    code, out, _ = run(capsys, "cases")
    assert code == 0 and len(json.loads(out)) == 16
    code, out, _ = run(capsys, "probe", "P2", "--samples", "10")
    assert json.loads(out)["pass_fraction"] == 1.0
