from __future__ import absolute_import
from cbirtils import InvalidParameterError
from cbirtils.io import DatasetManifest, FileHandler, GrayImage, ManifestEntry, format_manifest
import logging

import numpy as np


logger = logging.getLogger(__name__)


def checkerboard(size, cell, low, high, offset=0):
    """
    A ``size x size`` checkerboard of ``cell``-pixel squares, ``high`` in the top-left square, with \
    ``offset`` added to every pixel.

    :rtype: :py:class:`cbirtils.io.GrayImage`
    """
    rows, cols = np.indices((size, size))
    board = np.where((rows // cell + cols // cell) % 2 == 0, high, low)
    return GrayImage(board + offset)


def checkerboard_dataset(cell_sizes=(2, 3, 4, 5), per_group=10, size=32, low=40, high=160, step=5):

    """
    Generates a dataset whose groups are perfectly separable by texture: one group per checkerboard cell \
    size, with the members of a group differing only by a constant gray offset (``j * step`` for the \
    ``j``-th member). LBP codes only see differences from the center pixel, so the ``lbp`` and ``gmlbp`` \
    descriptors of a group are identical and every one of its queries ranks the whole group first.

    :param cell_sizes: Checkerboard square sizes, one group each
    :type cell_sizes: list
    :param per_group: Images per group
    :type per_group: int
    :param size: Image width and height
    :type size: int
    :param low: Dark square intensity
    :type low: int
    :param high: Light square intensity
    :type high: int
    :param step: Gray offset between consecutive members of a group
    :type step: int
    :return: ``(image_id, group_label, image)`` triples, group by group
    :rtype: list

    Usage::

        from cbirtils.synthetic import checkerboard_dataset

        >>> dataset = checkerboard_dataset()
        >>> len(dataset), dataset[0][:2], dataset[-1][:2]
        (40, ('c2_00', 'checker2'), ('c5_09', 'checker5'))
    """

    if len(set(cell_sizes)) != len(cell_sizes) or any(c < 1 for c in cell_sizes):
        raise InvalidParameterError("cell sizes must be distinct positive integers")
    if per_group < 1 or size < 3:
        raise InvalidParameterError("need at least one image per group and 3x3 images")
    if not 0 <= low < high or step < 0:
        raise InvalidParameterError("need 0 <= low < high and a non-negative step")
    if high + (per_group - 1) * step > 255:
        raise InvalidParameterError(
            "the brightest member would clip: {} + {} * {} > 255".format(
                high, per_group - 1, step
            )
        )

    dataset = []
    for cell in cell_sizes:
        for j in range(per_group):
            image_id = "c{}_{:02d}".format(cell, j)
            image = checkerboard(size, cell, low, high, offset=j * step)
            dataset.append((image_id, "checker{}".format(cell), image))
    return dataset


def write_dataset(dataset, folder):

    """
    Writes a generated dataset as binary PGM files plus a ``manifest.txt`` listing them.

    :param dataset: Output of :py:func:`checkerboard_dataset`
    :type dataset: list
    :param folder: Destination folder, created if missing
    :type folder: str
    :return: The manifest, rooted at ``folder``
    :rtype: :py:class:`cbirtils.io.DatasetManifest`
    """

    handler = FileHandler(folder)
    entries = []
    for image_id, group, image in dataset:
        handler.write(image_id, image, format="pgm")
        entries.append(ManifestEntry(image_id, "{}.pgm".format(image_id), group))
    manifest = DatasetManifest(entries, root=folder)
    handler.write("manifest", format_manifest(manifest), format="txt")
    logger.info("wrote %d images to %s", len(entries), folder)
    return manifest
