import numpy as np
import pytest

from thetalab.skewform import SkewMatrix, rotation_block
from thetalab.twistcal import GridField, GridGeometry


def interior_bump(geom, center, width, cutoff=None):
    """Gaussian bump hard-truncated well inside the box, so that shifted
    copies never wrap: phase-law identities then hold to rounding."""
    center = np.asarray(center, dtype=float)
    cutoff = geom.L / 2 if cutoff is None else cutoff

    def fn(pts):
        v = np.exp(-np.sum((pts - center) ** 2, axis=1) / (2.0 * width**2))
        v[np.max(np.abs(pts - center), axis=1) > cutoff] = 0.0
        return v

    return GridField.from_function(geom, fn)


def gaussian_field(geom, center, width, amp=1.0):
    center = np.asarray(center, dtype=float)
    return GridField.from_function(
        geom,
        lambda pts: amp * np.exp(-np.sum((pts - center) ** 2, axis=1) / (2.0 * width**2)),
    )


@pytest.fixture(scope="session")
def theta_rot():
    return SkewMatrix.from_array(rotation_block(1.0))


@pytest.fixture(scope="session")
def theta_rot2():
    return SkewMatrix.from_array(rotation_block(2.0))


@pytest.fixture(scope="session")
def theta_zero2():
    return SkewMatrix.zero(2)


@pytest.fixture(autouse=True)
def _silence_boundary_warnings():
    import warnings

    from thetalab.twistcal import BoundaryMassWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryMassWarning)
        yield
