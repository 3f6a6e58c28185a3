import json

import numpy as np
import pytest

from spectrumkit import MatrixTuple, make_unit, w_tensor
from spectrumkit import serialize as ser
from spectrumkit.cli import main


@pytest.fixture()
def files(tmp_path):
    paths = {}
    for name, t in (("unit3", make_unit(3, 3)), ("w", w_tensor()), ("unit2", make_unit(2, 3))):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(ser.tensor_to_json_dict(t)))
        paths[name] = str(p)
    e = np.zeros((2, 2, 2), dtype=complex)
    e[0, 0, 0] = 1.0
    e[1, 0, 1] = 1.0
    p = tmp_path / "row_pencil.json"
    p.write_text(json.dumps(ser.matrix_tuple_to_json_dict(MatrixTuple(e))))
    paths["row_pencil"] = str(p)
    z = tmp_path / "zero.json"
    z.write_text(json.dumps({"dims": [2, 2, 2], "entries": []}))
    paths["zero"] = str(z)
    b = tmp_path / "broken.json"
    b.write_text('{"dims": [2, 2, 2], "entries": [{"idx": [1, 1]}]}')
    paths["broken"] = str(b)
    return paths


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_quantum_unit3(files, capsys):
    code, out = run(capsys, "functional", "quantum", files["unit3"], "--theta", "1/3,1/3,1/3")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["value"] - 3.0) <= 1e-6
    assert payload["converged"] is True


def test_support_w(files, capsys):
    code, out = run(
        capsys, "functional", "support", files["w"], "--theta", "1/3,1/3,1/3",
        "--restarts", "5",
    )
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["value"] - 1.8899) <= 1e-3
    assert abs(payload["gap"]) <= 1e-3


def test_zero_tensor_exit_1(files, capsys):
    code, _ = run(capsys, "functional", "quantum", files["zero"], "--theta", "1/3,1/3,1/3")
    assert code == 1


def test_malformed_entry_names_field(files, capsys):
    code = main(["functional", "quantum", files["broken"], "--theta", "1/3,1/3,1/3"])
    captured = capsys.readouterr()
    assert code == 1
    assert "idx" in captured.err


def test_bad_theta_exit_1(files, capsys):
    code, _ = run(capsys, "functional", "quantum", files["unit3"], "--theta", "1/2,1/2,1/2")
    assert code == 1


def test_rank_slice_w(files, capsys):
    code, out = run(
        capsys, "rank", "slice", files["w"], "--xi", "1,1,1", "--restarts", "4",
    )
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["value"] - 1.8899) <= 2e-3


def test_rank_ncrank_pencil(files, capsys):
    code, out = run(capsys, "rank", "ncrank", files["row_pencil"])
    assert code == 0
    payload = json.loads(out)
    assert payload["routes"]["fortin_reutenauer"] == 1
    assert payload["routes"]["moment_l1"]["rounded"] == 1


def test_rank_gstable_w(files, capsys):
    code, out = run(capsys, "rank", "gstable", files["w"], "--alpha", "1,1,1", "--restarts", "4")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["value"] - 1.5) <= 1e-3


def test_check_minimax_w(files, capsys):
    code, out = run(
        capsys, "check-minimax", files["w"], "--objective", "neg-entropy:1/3,1/3,1/3",
        "--restarts", "4",
    )
    assert code == 0
    assert abs(json.loads(out)["gap"]) <= 1e-3


def test_check_minimax_unit2_linf(files, capsys):
    code, out = run(
        capsys, "check-minimax", files["unit2"], "--objective", "linf:1,1,1",
        "--restarts", "4", "--bound", "1e-6",
    )
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["lhs"] - 0.5) <= 1e-6
    assert abs(payload["gap"]) <= 1e-6


def test_output_deterministic(files, tmp_path, capsys):
    args = [
        "functional", "support", files["w"], "--theta", "1/3,1/3,1/3",
        "--restarts", "5", "--seed", "42",
    ]
    _, out1 = run(capsys, *args)
    _, out2 = run(capsys, *args)
    assert out1 == out2


def test_out_file_and_table(files, tmp_path, capsys):
    dest = tmp_path / "res.json"
    code, out = run(
        capsys, "functional", "quantum", files["unit3"], "--theta", "1/3,1/3,1/3",
        "--out", str(dest),
    )
    assert code == 0 and out == ""
    assert abs(json.loads(dest.read_text())["value"] - 3.0) <= 1e-6
    code, out = run(
        capsys, "functional", "quantum", files["unit3"], "--theta", "1/3,1/3,1/3",
        "--format", "table",
    )
    assert code == 0 and "value" in out


def test_eta_flag_changes_support(files, capsys, tmp_path):
    # a tensor with one large and one tiny entry: eta decides the support
    d = {
        "dims": [2, 2, 2],
        "entries": [
            {"idx": [1, 1, 1], "re": 1.0},
            {"idx": [2, 2, 2], "re": 1e-12},
        ],
    }
    p = tmp_path / "tiny.json"
    p.write_text(json.dumps(d))
    _, out_default = run(capsys, "functional", "support", str(p), "--theta", "1/3,1/3,1/3", "--restarts", "0")
    _, out_zero = run(
        capsys, "functional", "support", str(p), "--theta", "1/3,1/3,1/3",
        "--restarts", "0", "--eta", "0",
    )
    v_default = json.loads(out_default)["value"]
    v_zero = json.loads(out_zero)["value"]
    assert abs(v_default - 1.0) <= 1e-9  # tiny entry pruned
    assert v_zero >= 1.9  # exact support keeps both diagonal points
