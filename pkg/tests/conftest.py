import pytest

from app.core.schemas import Instance
from app.prefgen.service import build_folklore_original, build_master_list
from app.shared.seeding import SeedStream


def head_first(head: list[int], size: int) -> tuple[int, ...]:
    return tuple(head) + tuple(i for i in range(size) if i not in head)


@pytest.fixture
def stream():
    return SeedStream(20240601).trial(0)


@pytest.fixture
def folklore3() -> Instance:
    return build_folklore_original(3).instance


@pytest.fixture
def master4() -> Instance:
    return build_master_list(4, 4).instance


@pytest.fixture
def tiny() -> Instance:
    """Both men prefer w0, both women prefer m0."""
    return Instance(men=((0, 1), (0, 1)), women=((0, 1), (0, 1)))


@pytest.fixture
def two_block_instance() -> Instance:
    """
    Ten couples, every man's first choice is w_i so the man-optimal matching is
    the identity. Women above their husband: w0 <- m1, w2/w3 <- m4, w4 <- m6,
    w5 <- m6, m0, m7 and w8 <- m9. The block around w5 is (2, 8] with x = 1.
    """
    N = 10
    men = tuple(head_first([i], N) for i in range(N))
    heads = {0: [1, 0], 2: [4, 2], 3: [4, 3], 4: [6, 4], 5: [6, 0, 7, 5], 8: [9, 8]}
    women = tuple(head_first(heads.get(w, [w]), N) for w in range(N))
    return Instance(men=men, women=women)
