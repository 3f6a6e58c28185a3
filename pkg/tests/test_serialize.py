import numpy as np
import pytest

from spectrumkit import InvalidArgumentError, MatrixTuple, Tensor, w_tensor
from spectrumkit.hypergraphs import Hypergraph
from spectrumkit import serialize as ser


def test_tensor_round_trip():
    rng = np.random.default_rng(0)
    t = Tensor(rng.standard_normal((2, 3, 2)) + 1j * rng.standard_normal((2, 3, 2)))
    t2 = ser.tensor_from_json_dict(ser.tensor_to_json_dict(t))
    assert np.allclose(t.entries, t2.entries)


def test_tensor_sparse_semantics():
    d = {"dims": [2, 2], "entries": [{"idx": [2, 1], "re": 3.0}]}
    t = ser.tensor_from_json_dict(d)
    assert t.entries[1, 0] == 3.0
    assert np.count_nonzero(t.entries) == 1


def test_tensor_errors_name_offending_field():
    with pytest.raises(InvalidArgumentError, match="dims"):
        ser.tensor_from_json_dict({"entries": []})
    with pytest.raises(InvalidArgumentError, match="entries"):
        ser.tensor_from_json_dict({"dims": [2, 2]})
    with pytest.raises(InvalidArgumentError, match=r"idx\[1\]"):
        ser.tensor_from_json_dict(
            {"dims": [2, 2], "entries": [{"idx": [1, 3], "re": 1.0}]}
        )
    with pytest.raises(InvalidArgumentError, match="idx"):
        ser.tensor_from_json_dict({"dims": [2, 2], "entries": [{"re": 1.0}]})


def test_matrix_tuple_round_trip():
    rng = np.random.default_rng(1)
    a = MatrixTuple(rng.standard_normal((2, 3, 3)) + 1j * rng.standard_normal((2, 3, 3)))
    a2 = ser.matrix_tuple_from_json_dict(ser.matrix_tuple_to_json_dict(a))
    assert np.allclose(a.mats, a2.mats)


def test_matrix_tuple_errors():
    with pytest.raises(InvalidArgumentError, match="'n'"):
        ser.matrix_tuple_from_json_dict({"mats": [[[[1, 0]]]]})
    with pytest.raises(InvalidArgumentError, match="rows"):
        ser.matrix_tuple_from_json_dict({"n": 2, "mats": [[[[1, 0], [0, 0]]]]})


def test_hypergraph_round_trip():
    h = Hypergraph((2, 2, 2), ((1, 0, 0), (0, 1, 0)))
    d = ser.hypergraph_to_json_dict(h)
    assert d["edges"] == [[1, 2, 1], [2, 1, 1]]
    assert ser.hypergraph_from_json_dict(d) == h


def test_dumps_deterministic():
    t = w_tensor()
    a = ser.dumps(ser.tensor_to_json_dict(t))
    b = ser.dumps(ser.tensor_to_json_dict(w_tensor()))
    assert a == b
