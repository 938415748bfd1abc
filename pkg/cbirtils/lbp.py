from __future__ import absolute_import
from cbirtils import BoundaryError, ImageTooSmallError, InvalidParameterError
import functools
import logging
import math

import numpy as np


logger = logging.getLogger(__name__)

NEIGHBOR_WEIGHTS = np.array([[8, 4, 2], [16, 0, 1], [32, 64, 128]], dtype=np.int64)
"""
Bit weights of the classic 3x3 operator, laid out over the window. The centre carries no weight.
"""

RASTER_TO_WEIGHT_ORDER = (3, 2, 1, 4, 0, 5, 6, 7)
"""
``RASTER_TO_WEIGHT_ORDER[j]`` is the bit of :py:data:`NEIGHBOR_WEIGHTS` occupied by the ``j``-th neighbour in raster \
order (skipping the centre). It maps the centre-threshold GMLBP code onto :py:func:`lbp_code_3x3`.
"""

METHODS = ("classic", "circular", "rotation_invariant")

_SNAP = 1e-9

# raster offsets (dy, dx) of a 3x3 window
_WINDOW = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1)]


class LbpParams(object):

    """
    Neighbourhood of the circular operator: ``P`` samples on a circle of radius ``R``.

    :param neighbors: Number of samples ``P``, between 4 and 16
    :type neighbors: int
    :param radius: Circle radius ``R`` in pixels, at least 1.0
    :type radius: float
    """

    def __init__(self, neighbors=8, radius=1.0):
        if int(neighbors) != neighbors or not 4 <= neighbors <= 16:
            raise InvalidParameterError(
                "P must be an integer between 4 and 16, got {}".format(neighbors)
            )
        radius = float(radius)
        if not math.isfinite(radius) or radius < 1.0:
            raise InvalidParameterError("R must be at least 1.0, got {}".format(radius))
        self.neighbors = int(neighbors)
        self.radius = radius

    @property
    def bins(self):
        return 2 ** self.neighbors

    @property
    def is_classic(self):
        return self.neighbors == 8 and self.radius == 1.0

    @property
    def margin(self):
        """
        Width of the border the operator can't be centred on.
        """
        return int(math.ceil(self.radius - _SNAP))

    def __eq__(self, other):
        return (
            isinstance(other, LbpParams)
            and self.neighbors == other.neighbors
            and self.radius == other.radius
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.neighbors, self.radius))

    def __repr__(self):
        return "LbpParams(neighbors={}, radius={})".format(self.neighbors, self.radius)


class LbpHistogram(object):

    """
    Distribution of LBP codes over an image.

    :param bins: One count (or frequency) per code
    :type bins: :py:class:`numpy.ndarray`
    :param normalized: Whether the bins sum to 1
    :type normalized: bool
    """

    def __init__(self, bins, normalized=False):
        self.bins = np.asarray(bins)
        self.normalized = normalized

    @property
    def total(self):
        return self.bins.sum()

    def normalize(self):
        """
        :return: A copy whose bins sum to 1 (L1 normalisation)
        :rtype: :py:class:`cbirtils.lbp.LbpHistogram`
        """
        if self.normalized:
            return self
        total = self.bins.sum()
        if total <= 0:
            raise ImageTooSmallError("can't normalise an empty histogram")
        return LbpHistogram(self.bins.astype(np.float64) / float(total), normalized=True)

    def __len__(self):
        return len(self.bins)

    def __eq__(self, other):
        return (
            isinstance(other, LbpHistogram)
            and self.normalized == other.normalized
            and np.array_equal(self.bins, other.bins)
        )

    def __repr__(self):
        return "LbpHistogram(bins={}, total={}, normalized={})".format(
            len(self.bins), self.total, self.normalized
        )


def _as_window(window):
    window = np.asarray(window, dtype=np.int64)
    if window.shape != (3, 3):
        raise InvalidParameterError(
            "expected a 3x3 window, got shape {}".format(window.shape)
        )
    return window


def lbp_code_3x3(window):

    """
    The classic LBP operator on a 3x3 window. Each neighbour that is greater than or equal to the centre \
    contributes its weight from :py:data:`NEIGHBOR_WEIGHTS`.

    :param window: A 3x3 grid of intensities
    :type window: list or :py:class:`numpy.ndarray`
    :return: The code, in ``[0, 255]``
    :rtype: int

    Usage::

        from cbirtils.lbp import lbp_code_3x3

        >>> lbp_code_3x3([[6, 5, 2], [7, 6, 1], [9, 8, 7]])
        248
    """

    window = _as_window(window)
    return int(((window >= window[1, 1]) * NEIGHBOR_WEIGHTS).sum())


def _classic_codes(pixels):
    h, w = pixels.shape
    center = pixels[1 : h - 1, 1 : w - 1]
    codes = np.zeros(center.shape, dtype=np.int64)
    for dy, dx in _WINDOW:
        weight = NEIGHBOR_WEIGHTS[dy + 1, dx + 1]
        if weight:
            neighbor = pixels[1 + dy : h - 1 + dy, 1 + dx : w - 1 + dx]
            codes += (neighbor >= center) * weight
    return codes


def _snap(value):
    nearest = round(value)
    if abs(value - nearest) < _SNAP:
        return float(nearest)
    # identical positions for symmetric samples (cos and sin differ in the last bit)
    return round(value, 12)


@functools.lru_cache(maxsize=None)
def _sample_terms(neighbors, radius):
    """
    Bilinear interpolation terms ``(dy, dx, weight)`` for each of the ``P`` samples.
    """
    samples = []
    for i in range(neighbors):
        angle = 2.0 * math.pi * i / neighbors
        x = _snap(radius * math.cos(angle))
        y = _snap(-radius * math.sin(angle))
        x0, y0 = int(math.floor(x)), int(math.floor(y))
        fx, fy = x - x0, y - y0
        terms = []
        for ty, wy in ((0, 1.0 - fy), (1, fy)):
            for tx, wx in ((0, 1.0 - fx), (1, fx)):
                weight = wy * wx
                if weight > 0.0:
                    terms.append((y0 + ty, x0 + tx, weight))
        samples.append(tuple(terms))
    return tuple(samples)


def _circular_codes(pixels, params):
    m = params.margin
    h, w = pixels.shape
    if h < 2 * m + 1 or w < 2 * m + 1:
        raise ImageTooSmallError(
            "a {}x{} image has no pixel {} away from the border".format(w, h, m)
        )
    values = pixels.astype(np.int64)
    center = values[m : h - m, m : w - m]
    codes = np.zeros(center.shape, dtype=np.int64)
    for i, terms in enumerate(_sample_terms(params.neighbors, params.radius)):
        # interpolating neighbour - centre keeps the code independent of gray offsets
        diff = np.zeros(center.shape, dtype=np.float64)
        for dy, dx, weight in terms:
            neighbor = values[m + dy : h - m + dy, m + dx : w - m + dx]
            diff += weight * (neighbor - center)
        codes += (diff >= 0) * (1 << i)
    return codes


def lbp_code_circular(image, x, y, params=None):

    """
    The circular LBP operator at one pixel. Sample ``i`` sits at angle ``2*pi*i/P`` counter-clockwise from \
    ``(x + R, y)`` (rows grow downwards, so the first quarter turn points up) and carries weight ``2**i``. \
    Off-grid samples are bilinearly interpolated; positions within 1e-9 of the grid snap to it.

    :param image: The image
    :type image: :py:class:`cbirtils.io.GrayImage`
    :param x: Column of the centre pixel
    :type x: int
    :param y: Row of the centre pixel
    :type y: int
    :param params: Neighbourhood, ``LbpParams(8, 1.0)`` by default
    :type params: :py:class:`cbirtils.lbp.LbpParams`
    :return: The code, in ``[0, 2**P - 1]``
    :rtype: int

    .. note:: With this orientation the weights of the eight ``(8, 1)`` samples coincide with \
        :py:data:`NEIGHBOR_WEIGHTS`; the codes differ from :py:func:`lbp_code_3x3` only where interpolating \
        a diagonal sample moves it across the threshold.
    """

    params = params or LbpParams()
    m = params.margin
    if not (m <= x < image.width - m and m <= y < image.height - m):
        raise BoundaryError(
            "a radius-{} circle around ({}, {}) leaves the {}x{} image".format(
                params.radius, x, y, image.width, image.height
            )
        )
    window = image.pixels[y - m : y + m + 1, x - m : x + m + 1]
    return int(_circular_codes(window, params)[0, 0])


def rotate_code(code, amount, neighbors=8):
    """
    Circularly rotates the low ``neighbors`` bits of ``code`` right by ``amount``.
    """
    amount %= neighbors
    mask = (1 << neighbors) - 1
    return ((code >> amount) | (code << (neighbors - amount))) & mask


def rotation_invariant(code, neighbors=8):

    """
    Maps a code to the smallest value reachable by circularly rotating its bits.

    :param code: An LBP code below ``2**neighbors``
    :type code: int
    :param neighbors: Number of bits ``P``
    :type neighbors: int
    :rtype: int

    Usage::

        from cbirtils.lbp import rotation_invariant

        >>> rotation_invariant(124, 8)
        31
    """

    if not 0 <= code < (1 << neighbors):
        raise InvalidParameterError(
            "code {} doesn't fit in {} bits".format(code, neighbors)
        )
    return min(rotate_code(code, k, neighbors) for k in range(neighbors))


@functools.lru_cache(maxsize=None)
def rotation_invariant_map(neighbors=8):
    """
    Lookup table from every ``P``-bit code to its rotation-invariant code.

    :rtype: :py:class:`numpy.ndarray`
    """
    table = np.array(
        [rotation_invariant(c, neighbors) for c in range(1 << neighbors)],
        dtype=np.int64,
    )
    table.setflags(write=False)
    return table


def gmlbp_patterns(window):

    """
    The nine codes of a 3x3 window, one per choice of threshold pixel. For window position ``k`` (raster \
    order, 0-8), the other eight pixels, also in raster order, are compared against pixel ``k`` and \
    weighted ``1, 2, 4, ..., 128``.

    :param window: A 3x3 grid of intensities
    :type window: list or :py:class:`numpy.ndarray`
    :return: Nine codes
    :rtype: list

    Usage::

        from cbirtils.lbp import gmlbp_patterns, raster_to_weight_order

        >>> codes = gmlbp_patterns([[6, 5, 2], [7, 6, 1], [9, 8, 7]])
        >>> codes[4]
        233
        >>> raster_to_weight_order(codes[4])
        248
    """

    flat = _as_window(window).ravel()
    codes = []
    for k in range(9):
        others = [flat[j] for j in range(9) if j != k]
        codes.append(sum(1 << b for b, v in enumerate(others) if v >= flat[k]))
    return codes


def _gmlbp_codes(pixels):
    h, w = pixels.shape
    if h < 3 or w < 3:
        raise ImageTooSmallError("GMLBP needs at least a 3x3 image, got {}x{}".format(w, h))
    shifted = [pixels[1 + dy : h - 1 + dy, 1 + dx : w - 1 + dx] for dy, dx in _WINDOW]
    codes = np.zeros((9,) + shifted[0].shape, dtype=np.int64)
    for k in range(9):
        bit = 0
        for j in range(9):
            if j == k:
                continue
            codes[k] += (shifted[j] >= shifted[k]) * (1 << bit)
            bit += 1
    return codes


def raster_to_weight_order(code):
    """
    Re-orders the bits of a centre-threshold GMLBP code into the :py:data:`NEIGHBOR_WEIGHTS` convention.
    """
    return sum(1 << RASTER_TO_WEIGHT_ORDER[j] for j in range(8) if code & (1 << j))


def permute_histogram(histogram):
    """
    Applies :py:func:`raster_to_weight_order` to the bin indices of a 256-bin histogram.

    :rtype: :py:class:`cbirtils.lbp.LbpHistogram`
    """
    bins = np.zeros_like(histogram.bins)
    for code in range(len(histogram.bins)):
        bins[raster_to_weight_order(code)] = histogram.bins[code]
    return LbpHistogram(bins, normalized=histogram.normalized)


def lbp_codes(image, method="classic", params=None):

    """
    LBP codes of every pixel whose neighbourhood fits inside the image. Border pixels are skipped, \
    never padded.

    :param image: The image
    :type image: :py:class:`cbirtils.io.GrayImage`
    :param method: ``classic`` (3x3, :py:data:`NEIGHBOR_WEIGHTS`), ``circular`` or ``rotation_invariant``
    :type method: str
    :param params: Neighbourhood for the circular methods
    :type params: :py:class:`cbirtils.lbp.LbpParams`
    :return: A grid of codes aligned to the scanned interior
    :rtype: :py:class:`numpy.ndarray`
    """

    params = params or LbpParams()
    if method == "classic":
        if image.width < 3 or image.height < 3:
            raise ImageTooSmallError(
                "the 3x3 operator needs at least a 3x3 image, got {}x{}".format(
                    image.width, image.height
                )
            )
        return _classic_codes(image.pixels)
    elif method == "circular":
        return _circular_codes(image.pixels, params)
    elif method == "rotation_invariant":
        codes = _circular_codes(image.pixels, params)
        return rotation_invariant_map(params.neighbors)[codes]
    raise InvalidParameterError(
        "unknown LBP method '{}', expected one of {}".format(method, ", ".join(METHODS))
    )


def lbp_histogram(image, method="classic", params=None, normalize=False):

    """
    Accumulates :py:func:`lbp_codes` into a histogram of ``2**P`` bins (256 for ``classic``). Unnormalised \
    counts sum to the number of pixels scanned.

    :param image: The image
    :type image: :py:class:`cbirtils.io.GrayImage`
    :param method: ``classic``, ``circular`` or ``rotation_invariant``
    :type method: str
    :param params: Neighbourhood for the circular methods
    :type params: :py:class:`cbirtils.lbp.LbpParams`
    :param normalize: Return frequencies summing to 1 instead of counts
    :type normalize: bool
    :rtype: :py:class:`cbirtils.lbp.LbpHistogram`

    Usage::

        import numpy as np
        from cbirtils.io import GrayImage
        from cbirtils.lbp import lbp_histogram

        >>> hist = lbp_histogram(GrayImage(np.full((8, 8), 7)))
        >>> hist.bins[255], hist.total
        (36, 36)
    """

    params = params or LbpParams()
    codes = lbp_codes(image, method=method, params=params)
    size = 256 if method == "classic" else params.bins
    hist = LbpHistogram(np.bincount(codes.ravel(), minlength=size))
    logger.debug("%s LBP histogram: %d bins over %d pixels", method, size, codes.size)
    return hist.normalize() if normalize else hist


def gmlbp_histograms(image, normalize=False):

    """
    Nine histograms, one per threshold position of :py:func:`gmlbp_patterns`, accumulated over every \
    interior pixel. All nine have the same total.

    :param image: The image, at least 3x3
    :type image: :py:class:`cbirtils.io.GrayImage`
    :param normalize: Return frequencies summing to 1 instead of counts
    :type normalize: bool
    :rtype: list
    """

    codes = _gmlbp_codes(image.pixels)
    hists = [LbpHistogram(np.bincount(c.ravel(), minlength=256)) for c in codes]
    if normalize:
        hists = [h.normalize() for h in hists]
    return hists
