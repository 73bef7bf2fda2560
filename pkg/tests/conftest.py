import numpy as np
import pytest

from relex.autodiff import Parameter
from relex.autodiff.gradcheck import check_parameters
from relex.synthetic import generate


def fd_params(build, arrays, kinds=None):
    """Wrap ``arrays`` as parameters and finite-difference ``build(g, nodes)``.

    ``build`` returns a scalar node; returns the worst relative error.
    """
    from relex.autodiff import Graph

    params = [Parameter(f"p{k}", np.array(a, dtype=np.float64)) for k, a in enumerate(arrays)]

    def loss(backward):
        g = Graph()
        out = build(g, [g.param(p) for p in params], params)
        if backward:
            g.backward(out)
        return float(out.value)

    return max(r.max_rel_err for r in check_parameters(loss, params))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def synth20():
    return generate(20, 42)
