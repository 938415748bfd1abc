from __future__ import absolute_import
from cbirtils import (
    FeatureFormatError,
    InvalidParameterError,
    format_float,
    parse_float,
)
from cbirtils.lbp import LbpParams, gmlbp_histograms, lbp_histogram
from cbirtils.moments import hu_moments
import logging

import numpy as np


logger = logging.getLogger(__name__)

MODES = ("lbp", "gmlbp", "hu", "combined")

HU_SCALE = 1e7
"""
Hu values are compressed with ``sign(h) * log10(1 + |h| * HU_SCALE)``.
"""


def expected_dim(mode, params=None):

    """
    Length of the feature vector a mode produces.

    :param mode: One of :py:data:`MODES`
    :type mode: str
    :param params: LBP neighbourhood
    :type params: :py:class:`cbirtils.lbp.LbpParams`
    :rtype: int

    Usage::

        from cbirtils.features import expected_dim

        >>> expected_dim("combined")
        2311
    """

    params = params or LbpParams()
    if mode == "lbp":
        return params.bins
    elif mode == "gmlbp":
        return 9 * params.bins
    elif mode == "hu":
        return 7
    elif mode == "combined":
        return 9 * params.bins + 7
    raise InvalidParameterError(
        "unknown feature mode '{}', expected one of {}".format(mode, ", ".join(MODES))
    )


def check_mode(mode, params=None):
    """
    Refuses a mode and neighbourhood that can't be extracted together.

    :return: The feature dimension, as :py:func:`expected_dim`
    :rtype: int
    """
    params = params or LbpParams()
    dim = expected_dim(mode, params)
    if mode in ("gmlbp", "combined") and params.neighbors != 8:
        raise InvalidParameterError(
            "'{}' mode compares the eight pixels of a 3x3 window and needs P=8, got P={}".format(
                mode, params.neighbors
            )
        )
    return dim


def _dim_fits_mode(mode, dim):
    def power_of_two(value):
        return value >= 16 and value <= 2 ** 16 and value & (value - 1) == 0

    if mode == "lbp":
        return power_of_two(dim)
    elif mode == "gmlbp":
        return dim % 9 == 0 and power_of_two(dim // 9)
    elif mode == "hu":
        return dim == 7
    elif mode == "combined":
        return (dim - 7) % 9 == 0 and power_of_two((dim - 7) // 9)
    return False


class FeatureVector(object):

    """
    A flat descriptor of one image, tagged with the mode that produced it.

    :param mode: One of :py:data:`MODES`
    :type mode: str
    :param values: The descriptor
    :type values: list or :py:class:`numpy.ndarray`
    """

    def __init__(self, mode, values):
        if mode not in MODES:
            raise InvalidParameterError(
                "unknown feature mode '{}', expected one of {}".format(
                    mode, ", ".join(MODES)
                )
            )
        values = np.array(values, dtype=np.float64).ravel()
        if values.size == 0:
            raise FeatureFormatError("a feature vector can't be empty")
        if not np.all(np.isfinite(values)):
            raise FeatureFormatError("feature values must be finite")
        if not _dim_fits_mode(mode, values.size):
            raise FeatureFormatError(
                "{} values don't form a '{}' feature vector".format(values.size, mode)
            )
        values.setflags(write=False)
        self.mode = mode
        self.values = values

    @property
    def dim(self):
        return int(self.values.size)

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        return (
            isinstance(other, FeatureVector)
            and self.mode == other.mode
            and self.values.shape == other.values.shape
            and self.values.tobytes() == other.values.tobytes()
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return "FeatureVector(mode={!r}, dim={})".format(self.mode, self.dim)


def compress_hu(values):
    """
    ``sign(h) * log10(1 + |h| * HU_SCALE)``: odd, monotone, and zero at zero.
    """
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.log10(1.0 + np.abs(values) * HU_SCALE)


def _gmlbp_segment(image):
    return np.concatenate([h.bins for h in gmlbp_histograms(image, normalize=True)])


def extract(image, mode="gmlbp", params=None, hu_weight=1.0):

    """
    Describes an image.

    - ``lbp``: one L1-normalised LBP histogram; the 3x3 operator when ``P=8, R=1``, the circular one otherwise.
    - ``gmlbp``: the nine L1-normalised GMLBP histograms, concatenated in threshold-position order.
    - ``hu``: the seven Hu invariants, log-compressed with :py:func:`compress_hu`.
    - ``combined``: the ``gmlbp`` segment followed by the ``hu`` segment times ``hu_weight``. The Hu \
      part is taken over the same interior the GMLBP scan covers (the image minus a one-pixel border).

    :param image: The image
    :type image: :py:class:`cbirtils.io.GrayImage`
    :param mode: One of :py:data:`MODES`
    :type mode: str
    :param params: LBP neighbourhood; ``gmlbp`` and ``combined`` need ``P=8``
    :type params: :py:class:`cbirtils.lbp.LbpParams`
    :param hu_weight: Weight of the Hu segment in ``combined`` mode
    :type hu_weight: float
    :rtype: :py:class:`cbirtils.features.FeatureVector`

    Usage::

        import numpy as np
        from cbirtils.io import GrayImage
        from cbirtils.features import extract

        >>> extract(GrayImage(np.full((8, 8), 50)), mode="gmlbp").dim
        2304
    """

    params = params or LbpParams()
    check_mode(mode, params)

    if mode == "lbp":
        method = "classic" if params.is_classic else "circular"
        values = lbp_histogram(image, method=method, params=params, normalize=True).bins
    elif mode == "gmlbp":
        values = _gmlbp_segment(image)
    elif mode == "hu":
        values = compress_hu(hu_moments(image).m)
    else:
        texture = _gmlbp_segment(image)
        shape = compress_hu(hu_moments(image.crop(1)).m) * float(hu_weight)
        values = np.concatenate([texture, shape])

    logger.debug("extracted %s feature, dim %d", mode, len(values))
    return FeatureVector(mode, values)


def serialize(fv):

    """
    Writes a feature vector as one line: ``<mode> <dim> <v1> ... <vdim>``, each value as the shortest \
    decimal that reads back to the same float.

    :param fv: The feature vector
    :type fv: :py:class:`cbirtils.features.FeatureVector`
    :rtype: str

    Usage::

        from cbirtils.features import FeatureVector, serialize

        >>> serialize(FeatureVector("hu", [0] * 7))
        'hu 7 0 0 0 0 0 0 0'
    """

    return " ".join([fv.mode, str(fv.dim)] + [format_float(v) for v in fv.values])


def deserialize(text):

    """
    Reads a record written by :py:func:`serialize`. ``deserialize(serialize(fv)) == fv`` bit for bit.

    :param text: One feature record
    :type text: str
    :rtype: :py:class:`cbirtils.features.FeatureVector`
    """

    tokens = text.split()
    if len(tokens) < 2:
        raise FeatureFormatError("a feature record needs a mode and a dimension")
    mode, dim = tokens[0], tokens[1]
    if mode not in MODES:
        raise FeatureFormatError("unknown feature mode '{}'".format(mode))
    if not dim.isdigit():
        raise FeatureFormatError("dimension '{}' is not a number".format(dim))
    values = tokens[2:]
    if len(values) != int(dim):
        raise FeatureFormatError(
            "record declares {} values but holds {}".format(dim, len(values))
        )
    return FeatureVector(mode, [parse_float(v) for v in values])
