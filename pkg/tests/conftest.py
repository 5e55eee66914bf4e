import numpy as np
import pytest

from quantclock import rng as qrng


@pytest.fixture
def rng(request):
    # per-test deterministic stream: hash the test id into a seed
    seed = abs(hash(request.node.nodeid)) % (2**32)
    return qrng.master(seed)


@pytest.fixture
def fixed_rng():
    return qrng.master(20240811)


def ks_ok(result, level=1e-3):
    __tracebackhide__ = True
    assert result.p_value > level, f"KS rejected: D={result.statistic}, p={result.p_value}"


@pytest.fixture
def assert_ks():
    return ks_ok
