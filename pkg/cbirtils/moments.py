from __future__ import absolute_import
from cbirtils import DegenerateImageError, ImageTooSmallError, InvalidParameterError
from cbirtils.io import GrayImage
import logging

import numpy as np
from skimage import measure


logger = logging.getLogger(__name__)

ORDERS = [(p, q) for p in range(4) for q in range(4) if p + q <= 3]


def _as_table(values):
    # skimage indexes [row power, column power], so (p, q) sits at [q, p]
    table = np.zeros((4, 4), dtype=np.float64)
    for (p, q), value in values.items():
        table[q, p] = value
    return table


class CentralMoments(object):

    """
    Central moments ``mu[(p, q)]`` for every ``p + q <= 3``, taken about the intensity centroid. Pixel \
    coordinates are 0-based grid indices (``x`` = column, ``y`` = row) and intensity is used as mass.

    :param mu: Moments keyed by ``(p, q)``
    :type mu: dict
    :param centroid: ``(x_bar, y_bar)``
    :type centroid: tuple
    """

    def __init__(self, mu, centroid):
        self.mu = dict(mu)
        self.centroid = centroid

    @property
    def mu00(self):
        return self.mu[(0, 0)]

    def __getitem__(self, key):
        return self.mu[key]

    def normalized(self):
        """
        Scale-normalised moments ``eta_pq = mu_pq / mu00 ** (1 + (p + q) / 2)``.

        :rtype: dict
        """
        nu = measure.moments_normalized(_as_table(self.mu), order=3)
        eta = {}
        for p, q in ORDERS:
            if p + q < 2:
                eta[(p, q)] = self.mu[(p, q)] / self.mu00 ** (1.0 + (p + q) / 2.0)
            else:
                eta[(p, q)] = float(nu[q, p])
        return eta

    def __repr__(self):
        return "CentralMoments(mu00={}, centroid={})".format(self.mu00, self.centroid)


class HuVector(object):

    """
    The seven Hu moment invariants ``M1..M7``.
    """

    def __init__(self, m):
        self.m = np.asarray(m, dtype=np.float64)
        if self.m.shape != (7,) or not np.all(np.isfinite(self.m)):
            raise DegenerateImageError("Hu invariants must be seven finite values")

    def __getitem__(self, i):
        return self.m[i]

    def __len__(self):
        return 7

    def __repr__(self):
        return "HuVector({})".format(", ".join("{:.6g}".format(v) for v in self.m))


class MomentMap(object):

    """
    Local moments ``M_mn(x, y)`` over a ``(2*w1 + 1) x (2*w2 + 1)`` window, for every pixel the window fits \
    around. ``values`` has ``height - 2*w2`` rows and ``width - 2*w1`` columns; ``values[0, 0]`` belongs to \
    pixel ``(w1, w2)``.
    """

    def __init__(self, order, window, values):
        self.order = order
        self.window = window
        self.values = values

    @property
    def shape(self):
        return self.values.shape

    def __repr__(self):
        return "MomentMap(order={}, window={}, shape={})".format(
            self.order, self.window, self.values.shape
        )


def central_moments(image):

    """
    Central moments of the whole image up to third order, accumulated in double precision.

    :param image: The image
    :type image: :py:class:`cbirtils.io.GrayImage`
    :rtype: :py:class:`cbirtils.moments.CentralMoments`

    Usage::

        import numpy as np
        from cbirtils.io import GrayImage
        from cbirtils.moments import central_moments

        >>> impulse = np.zeros((5, 5)); impulse[2, 3] = 1
        >>> m = central_moments(GrayImage(impulse))
        >>> m.mu00, m.centroid, m[(2, 0)]
        (1.0, (3.0, 2.0), 0.0)
    """

    mass = image.pixels.astype(np.float64)
    raw = measure.moments(mass, order=1)
    m00 = float(raw[0, 0])
    if m00 <= 0:
        raise DegenerateImageError("an all-zero image has no centroid")
    y_bar = float(raw[1, 0] / m00)
    x_bar = float(raw[0, 1] / m00)

    table = measure.moments_central(mass, center=(y_bar, x_bar), order=3)
    mu = {(p, q): float(table[q, p]) for p, q in ORDERS}
    mu[(0, 0)] = m00
    return CentralMoments(mu, (x_bar, y_bar))


def normalized_moments(image):
    """
    Scale-normalised central moments ``eta[(p, q)]`` of an image.

    :rtype: dict
    """
    return central_moments(image).normalized()


def hu_invariants(eta):

    """
    The seven Hu invariants from a table of normalised moments, in their standard forms (the \
    third-order ones, ``M3``, ``M5`` and ``M7``, are often misprinted). Only the second- and \
    third-order entries are read.

    :param eta: Normalised moments keyed by ``(p, q)``
    :type eta: dict
    :rtype: :py:class:`numpy.ndarray`
    """

    nu = np.zeros((4, 4), dtype=np.float64)
    for p, q in ORDERS:
        if p + q >= 2:
            nu[p, q] = eta[(p, q)]
    # x-first [p, q] layout; the transposed one would flip the sign of M7
    return np.asarray(measure.moments_hu(nu), dtype=np.float64)


def hu_moments(image):

    """
    Hu moment invariants of an image, computed from scale-normalised central moments so they are \
    invariant to translation, scale and rotation. A horizontal mirror flips the sign of ``M7`` only.

    :param image: A non-degenerate image
    :type image: :py:class:`cbirtils.io.GrayImage`
    :rtype: :py:class:`cbirtils.moments.HuVector`
    """

    return HuVector(hu_invariants(normalized_moments(image)))


def _check_window(image, w1, w2):
    if int(w1) != w1 or int(w2) != w2 or w1 < 0 or w2 < 0:
        raise InvalidParameterError(
            "window half-widths must be non-negative integers, got ({}, {})".format(w1, w2)
        )
    if image.width < 2 * w1 + 1 or image.height < 2 * w2 + 1:
        raise ImageTooSmallError(
            "a {}x{} window doesn't fit in a {}x{} image".format(
                2 * w1 + 1, 2 * w2 + 1, image.width, image.height
            )
        )


def local_moments(image, m, n, w1=1, w2=1):

    """
    Windowed geometric moments ``M_mn(x, y) = sum_u sum_v I(x + u, y + v) * u**m * v**n`` with ``u`` in \
    ``[-w1, w1]`` along columns and ``v`` in ``[-w2, w2]`` along rows. Setting ``w2 = 0, n = 0`` gives the \
    one-dimensional moment along each row. Integer sums, so the values are exact.

    :param image: The image
    :type image: :py:class:`cbirtils.io.GrayImage`
    :param m: Order in ``x``
    :type m: int
    :param n: Order in ``y``
    :type n: int
    :param w1: Window half-width along ``x``
    :type w1: int
    :param w2: Window half-width along ``y``
    :type w2: int
    :rtype: :py:class:`cbirtils.moments.MomentMap`
    """

    if m < 0 or n < 0 or m + n > 3:
        raise InvalidParameterError(
            "moment order ({}, {}) must satisfy 0 <= m + n <= 3".format(m, n)
        )
    _check_window(image, w1, w2)

    pixels = image.pixels.astype(np.int64)
    h, w = pixels.shape
    values = np.zeros((h - 2 * w2, w - 2 * w1), dtype=np.int64)
    for v in range(-w2, w2 + 1):
        for u in range(-w1, w1 + 1):
            weight = u ** m * v ** n
            if weight:
                values += weight * pixels[w2 + v : h - w2 + v, w1 + u : w - w1 + u]
    return MomentMap((m, n), (w1, w2), values.astype(np.float64))


def moment_edge_map(image, w1=1, w2=1, threshold_factor=1.0):

    """
    Edge map from first-order local moments. The gradient magnitude is \
    ``G = sqrt(M10**2 + M01**2)`` and a pixel is an edge when ``G > threshold_factor * mean(G)``.

    :param image: The image
    :type image: :py:class:`cbirtils.io.GrayImage`
    :param w1: Window half-width along ``x``
    :type w1: int
    :param w2: Window half-width along ``y``
    :type w2: int
    :param threshold_factor: Multiple of the mean gradient an edge must exceed
    :type threshold_factor: float
    :return: Boolean grid aligned like :py:class:`cbirtils.moments.MomentMap`
    :rtype: :py:class:`numpy.ndarray`
    """

    if threshold_factor < 0:
        raise InvalidParameterError("threshold_factor must be non-negative")
    gx = local_moments(image, 1, 0, w1, w2).values
    gy = local_moments(image, 0, 1, w1, w2).values
    gradient = np.sqrt(gx ** 2 + gy ** 2)
    edges = gradient > threshold_factor * gradient.mean()
    logger.debug("%d of %d pixels are edges", int(edges.sum()), edges.size)
    return edges


def edge_map_image(edges):
    """
    Renders an edge map as an image: 255 for edges, 0 elsewhere.

    :rtype: :py:class:`cbirtils.io.GrayImage`
    """
    return GrayImage(np.where(edges, 255, 0).astype(np.uint8))
