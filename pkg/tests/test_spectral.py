import math

import numpy as np
import pytest
from scipy import linalg

from fujita_lab.spectral import (
    EigenProblem,
    SpectralVerdict,
    annulus_scaling,
    assemble,
    inverse_square,
    principal_eigenpair,
    spectral_blowup_criterion,
)


@pytest.mark.parametrize("N", [1.0, 3.0])
def test_pi_squared(N):
    # N = 3 on (1, 2): u = r φ solves the 1-D problem, so λ0 = π² as for N = 1
    pair = principal_eigenpair(EigenProblem(N=N, interval=(1.0, 2.0), grid_points=2001))
    assert pair.lambda0 == pytest.approx(math.pi**2, rel=1e-6)


def test_eigenfunction_positive_and_normalized():
    pair = principal_eigenpair(EigenProblem(N=2.5, interval=(1.0, 3.0), grid_points=801))
    assert np.all(pair.phi[1:-1] > 0)
    assert pair.phi[0] == pair.phi[-1] == 0.0
    assert np.trapezoid(pair.phi * pair.r**1.5, pair.r) == pytest.approx(1.0, abs=1e-12)
    assert pair.rayleigh == pytest.approx(pair.lambda0, rel=1e-9)


def test_matches_dense_solver():
    prob = EigenProblem(N=2.5, interval=(0.5, 4.0), potential=inverse_square(0.7), grid_points=301)
    d, e, _, _ = assemble(prob)
    ref = linalg.eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))[0]
    # both are backward stable: agreement to roundoff in the matrix norm
    assert principal_eigenpair(prob).lambda0 == pytest.approx(ref, abs=1e-14 * np.max(np.abs(d)))


def test_ball_limit_n5():
    # the unit ball in 5-D has λ0 = j²_{3/2,1}; a hole of radius 1e-3 has capacity ~1e-9
    pair = principal_eigenpair(EigenProblem(N=5.0, interval=(1e-3, 1.0), grid_points=4001))
    assert pair.lambda0 == pytest.approx(4.493409457909064**2, rel=1e-4)


@pytest.mark.parametrize("N", [1.0, 2.5, 3.0])
def test_annulus_scaling(N):
    vals = [v for _, v in annulus_scaling(N, [10.0, 20.0, 40.0], grid_points=2001)]
    assert max(vals) / min(vals) - 1 < 0.05


def test_hardy_sign():
    neg = spectral_blowup_criterion(3, inverse_square(-0.5), (0.01, 100.0), a_inf=1.0)
    pos = spectral_blowup_criterion(3, inverse_square(-0.2), (0.01, 100.0), a_inf=1.0)
    assert neg.lambda0 < 0 and neg.verdict is SpectralVerdict.BLOWUP_FOR_ALL_P
    assert pos.lambda0 >= -1e-8 and pos.verdict is SpectralVerdict.INCONCLUSIVE


def test_validation():
    with pytest.raises(ValueError):
        EigenProblem(N=3.0, interval=(2.0, 1.0))
    with pytest.raises(ValueError):
        spectral_blowup_criterion(3, inverse_square(0.0), (1.0, 2.0), a_inf=0.0)
    with pytest.raises(ValueError):
        annulus_scaling(3.0, [10.0])
