import numpy as np
import pytest

from delaybandit import kernels


@pytest.mark.skipif(not kernels.USE_NUMBA, reason="numba path disabled by env flag")
class TestPathAgreement:
    @pytest.mark.parametrize("depth,width,dim", [(2, 4, 6), (3, 8, 4), (4, 5, 3)])
    def test_forward_paths_agree(self, depth, width, dim):
        rng = np.random.default_rng(depth * 100 + width)
        w1 = rng.standard_normal((width, dim))
        wh = rng.standard_normal((depth - 2, width, width))
        wl = rng.standard_normal(width)
        xs = rng.standard_normal((10, dim))
        np_out = kernels.forward_batch_np(w1, wh, wl, xs)
        nb_out = kernels.forward_batch_nb(w1, wh, wl, xs)
        assert np_out == pytest.approx(nb_out, rel=1e-12, abs=1e-14)

    @pytest.mark.parametrize("depth,width,dim", [(2, 4, 6), (3, 8, 4), (4, 5, 3)])
    def test_grad_paths_agree(self, depth, width, dim):
        rng = np.random.default_rng(depth * 10 + width)
        w1 = rng.standard_normal((width, dim))
        wh = rng.standard_normal((depth - 2, width, width))
        wl = rng.standard_normal(width)
        xs = rng.standard_normal((7, dim))
        np_g, np_f = kernels.grad_batch_np(w1, wh, wl, xs)
        nb_g, nb_f = kernels.grad_batch_nb(w1, wh, wl, xs)
        assert np_f == pytest.approx(nb_f, rel=1e-12, abs=1e-14)
        assert np.max(np.abs(np_g - nb_g)) <= 1e-12 * max(1.0, np.max(np.abs(np_g)))
