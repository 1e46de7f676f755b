"""Input validation helpers; fitted-state checks come from scikit-learn."""
import numpy as np
from sklearn.exceptions import NotFittedError  # noqa: F401
from sklearn.utils.validation import check_is_fitted  # noqa: F401


def check_distribution(p, axis=-1, atol=1e-6, name="distribution"):
    """Return ``p`` as a float array after checking it is a probability vector."""
    p = np.asarray(p, dtype=np.float64)
    if p.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError(f"{name} has negative or non-finite entries")
    s = p.sum(axis=axis)
    if not np.allclose(s, 1.0, atol=atol):
        raise ValueError(f"{name} does not sum to one (sum={np.ravel(s)[:3]})")
    return p


def check_unit_interval(x, name):
    x = np.asarray(x, dtype=np.float64)
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise ValueError(f"{name} must lie in [0, 1]")
    return x


def check_pixels(pixels):
    """Validate a 2-D intensity raster in [0, 1]; returns a read-only float64 copy."""
    a = np.array(pixels, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D raster, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or a.min() < 0.0 or a.max() > 1.0:
        raise ValueError("pixel intensities must lie in [0, 1]")
    a.setflags(write=False)
    return a


def check_random_state(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
