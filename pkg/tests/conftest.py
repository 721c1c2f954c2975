import pytest

from extreme_fpt import model_1d_point, model_1d_robin, model_3d_sphere


@pytest.fixture(scope="session")
def point():
    return model_1d_point(1.0, 1.0)


@pytest.fixture(scope="session")
def robin():
    return model_1d_robin(1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def sphere():
    return model_3d_sphere(1.0, 1.0)


@pytest.fixture(scope="session")
def builtin_models(point, robin, sphere):
    return {"point1d": point, "robin1d": robin, "sphere3d": sphere}


def fd_derivative(model, t, h_rel=1e-7):
    """Central finite difference of S, on whichever path resolves at t."""
    h = h_rel * t
    if model.survival(t) > 0.5:
        return -(model.one_minus_survival(t + h)
                 - model.one_minus_survival(t - h)) / (2.0 * h)
    return (model.survival(t + h) - model.survival(t - h)) / (2.0 * h)
