import numpy as np

from hilbert_lab.geometry.domain.base import ConvexDomain
from hilbert_lab.utils.errors import InvalidSpecError


class Lens(ConvexDomain):
    """Asymmetric planar lens ``{(u, y) : 0 < u < L, |y| < c u^a (L - u)^(1-a)}``.

    The profile is a weighted geometric mean of ``u`` and ``L - u``, hence
    strictly concave, so the body is strictly convex with a C¹ boundary.
    Near the axis endpoint ``(0, 0)`` the boundary behaves like ``|y| ≍ u^a``
    and near ``(L, 0)`` like ``|y| ≍ (L - u)^(1-a)``.
    """

    kind = "lens"

    def __init__(self, a: float = 0.25, c: float = 1.0, length: float = 2.0) -> None:
        """Initialize the lens.

        Parameters
        ----------
        a : float
            Exponent at the left endpoint, in (0, 1).
        c : float
            Width scale, positive.
        length : float
            Axis length L, positive.

        """
        if not 0 < a < 1 or c <= 0 or length <= 0:
            msg = f"lens needs 0 < a < 1, c > 0 and length > 0, got a={a}, c={c}, length={length}"
            raise InvalidSpecError(msg)
        super().__init__(2, np.array([length / 2, 0.0]))
        self.a = float(a)
        self.c = float(c)
        self.length = float(length)

    @property
    def endpoints(self) -> tuple:
        return np.array([0.0, 0.0]), np.array([self.length, 0.0])

    def profile(self, u: np.ndarray) -> np.ndarray:
        u = np.clip(u, 0.0, self.length)
        return self.c * u**self.a * (self.length - u) ** (1 - self.a)

    def _implicit(self, points: np.ndarray) -> np.ndarray:
        u, y = points[:, 0], points[:, 1]
        return np.maximum.reduce([np.abs(y) - self.profile(u), -u, u - self.length])

    def _gradient(self, points: np.ndarray) -> np.ndarray:
        u, y = points[:, 0], points[:, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = self.profile(u) * (self.a / u - (1 - self.a) / (self.length - u))
        grads = np.column_stack([-slope, np.where(y >= 0, 1.0, -1.0)])
        grads[u <= 0] = [-1.0, 0.0]
        grads[u >= self.length] = [1.0, 0.0]
        return grads
