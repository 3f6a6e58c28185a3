import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spectrumkit import Tensor, make_unit, matmul_tensor, w_tensor
from spectrumkit.tensors import direct_sum, random_tensor

H13_BITS = 0.9182958340544896  # binary entropy of 1/3
F_W = 1.8898815748423097  # 2 ** H13_BITS


@pytest.fixture(scope="session")
def w():
    return w_tensor()


@pytest.fixture(scope="session")
def matmul222():
    return matmul_tensor(2, 2, 2)


@pytest.fixture(scope="session")
def unit_sum21():
    return direct_sum(make_unit(2, 3), make_unit(1, 3))


def corpus_tensors(n_small: int = 10, n_mixed: int = 10) -> list[tuple[str, Tensor]]:
    """The shared evaluation corpus: named tensors plus seeded random ones."""
    out = [
        ("w", w_tensor()),
        ("matmul222", matmul_tensor(2, 2, 2)),
        ("unit2+unit1", direct_sum(make_unit(2, 3), make_unit(1, 3))),
    ]
    rng = np.random.default_rng(20260810)
    for k in range(n_small):
        out.append((f"rand222-{k}", random_tensor((2, 2, 2), rng)))
    for k in range(n_mixed):
        out.append((f"rand234-{k}", random_tensor((2, 3, 4), rng)))
    return out


def symmetric_corpus() -> list[tuple[str, Tensor]]:
    rng = np.random.default_rng(4711)

    def sym3(n: int) -> Tensor:
        a = rng.standard_normal((n,) * 3) + 1j * rng.standard_normal((n,) * 3)
        perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
        s = sum(a.transpose(p) for p in perms) / 6.0
        return Tensor(s).unit()

    return [
        ("w", w_tensor()),
        ("unit2", make_unit(2, 3)),
        ("unit3", make_unit(3, 3)),
        ("sym222", sym3(2)),
        ("sym333", sym3(3)),
    ]
