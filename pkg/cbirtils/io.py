from __future__ import absolute_import
from collections import OrderedDict
from cbirtils import (
    InvalidParameterError,
    MalformedHeaderError,
    MalformedSampleError,
    ManifestError,
    TruncatedDataError,
    UnknownFormatError,
    UnsupportedMaxvalError,
)
import io
import logging
import os
import re

import numpy as np
import pandas as pd


logger = logging.getLogger(__name__)

_WHITESPACE = b" \t\n\r\x0b\x0c"
_COMMENT_REGEX = re.compile(rb"#[^\r\n]*")
_MAGIC = {b"P2": (False, 1), b"P3": (False, 3), b"P5": (True, 1), b"P6": (True, 3)}


class GrayImage(object):

    """
    A grid of 8-bit intensity samples. Pixels are held as a ``(height, width)`` :py:class:`numpy.ndarray` \
    of ``uint8``, row-major, so ``image.pixels[y, x]`` is the sample at column ``x`` of row ``y``.

    :param pixels: A 2D array or nested list of integers in ``[0, 255]``
    :type pixels: :py:class:`numpy.ndarray` or list

    Usage::

        from cbirtils.io import GrayImage

        >>> img = GrayImage([[0, 255], [128, 64]])
        >>> img.width, img.height
        (2, 2)
        >>> img.to_list()
        [0, 255, 128, 64]
    """

    def __init__(self, pixels):
        values = np.asarray(pixels)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise InvalidParameterError(
                "pixels must be a non-empty 2D grid, got shape {}".format(values.shape)
            )
        if values.dtype != np.uint8:
            if values.dtype.kind not in "iu" and not np.all(
                np.equal(np.mod(values, 1), 0)
            ):
                raise InvalidParameterError("pixel values must be integers")
            if values.min() < 0 or values.max() > 255:
                raise InvalidParameterError("pixel values must lie in [0, 255]")
            values = values.astype(np.uint8)
        self.pixels = np.ascontiguousarray(values)
        self.pixels.setflags(write=False)

    @classmethod
    def from_sequence(cls, width, height, values):
        """
        Builds an image from a flat row-major sequence of samples.

        :param width: Columns
        :type width: int
        :param height: Rows
        :type height: int
        :param values: ``width * height`` samples
        :type values: list
        :rtype: :py:class:`cbirtils.io.GrayImage`
        """
        values = np.asarray(values)
        if width < 1 or height < 1 or values.size != width * height:
            raise InvalidParameterError(
                "{} samples can't fill a {}x{} image".format(values.size, width, height)
            )
        return cls(values.reshape(height, width))

    @property
    def width(self):
        return int(self.pixels.shape[1])

    @property
    def height(self):
        return int(self.pixels.shape[0])

    def to_list(self):
        return [int(v) for v in self.pixels.ravel()]

    def crop(self, margin):
        """
        Returns the image with ``margin`` pixels removed from every side.
        """
        if self.width <= 2 * margin or self.height <= 2 * margin:
            raise InvalidParameterError(
                "can't remove a {}-pixel border from a {}x{} image".format(
                    margin, self.width, self.height
                )
            )
        if margin == 0:
            return self
        return GrayImage(self.pixels[margin:-margin, margin:-margin])

    def __eq__(self, other):
        return (
            isinstance(other, GrayImage)
            and self.pixels.shape == other.pixels.shape
            and np.array_equal(self.pixels, other.pixels)
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return "GrayImage(width={}, height={})".format(self.width, self.height)


def _read_header(data, count):

    pos = 2
    tokens = []
    while len(tokens) < count:
        if pos >= len(data):
            raise MalformedHeaderError(
                "header ends after {} of {} fields".format(len(tokens), count)
            )
        char = data[pos : pos + 1]
        if char == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif char in _WHITESPACE:
            pos += 1
        else:
            start = pos
            while (
                pos < len(data)
                and data[pos : pos + 1] not in _WHITESPACE
                and data[pos : pos + 1] != b"#"
            ):
                pos += 1
            token = data[start:pos]
            if not token.isdigit():
                raise MalformedHeaderError(
                    "header field {!r} is not a positive integer".format(token)
                )
            tokens.append(int(token))
    return tokens, pos


def _scale_samples(samples, maxval):
    samples = samples.astype(np.int64)
    if samples.size and samples.max() > maxval:
        raise MalformedSampleError(
            "sample {} exceeds maxval {}".format(int(samples.max()), maxval)
        )
    if maxval != 255:
        # round-half-up of v * 255 / maxval
        samples = (samples * 510 + maxval) // (2 * maxval)
    return samples


def decode_image(data):

    """
    Decodes a PGM (``P2``/``P5``) or PPM (``P3``/``P6``) file into a :py:class:`cbirtils.io.GrayImage`. Color \
    samples are converted with the Rec. 601 luma weights ``0.299 R + 0.587 G + 0.114 B``, rounded half up. \
    Files with a maxval other than 255 are rescaled to the 0-255 range; 16-bit files are refused.

    :param data: The raw file contents
    :type data: bytes
    :return: The decoded image
    :rtype: :py:class:`cbirtils.io.GrayImage`

    .. note:: Every failure is a subclass of :py:class:`cbirtils.ImageFormatError`: \
        :py:class:`cbirtils.UnknownFormatError`, :py:class:`cbirtils.MalformedHeaderError`, \
        :py:class:`cbirtils.UnsupportedMaxvalError`, :py:class:`cbirtils.TruncatedDataError` or \
        :py:class:`cbirtils.MalformedSampleError`. A partial image is never returned.

    Usage::

        from cbirtils.io import decode_image

        >>> decode_image(b"P2 2 2 255 0 255 128 64").to_list()
        [0, 255, 128, 64]
        >>> decode_image(b"P3 1 1 255 100 50 200").to_list()
        [82]
    """

    data = bytes(data)
    magic = data[:2]
    if magic not in _MAGIC:
        raise UnknownFormatError("unknown magic number {!r}".format(magic))
    binary, channels = _MAGIC[magic]

    (width, height, maxval), pos = _read_header(data, 3)
    if width < 1 or height < 1:
        raise MalformedHeaderError("image size {}x{} is empty".format(width, height))
    if maxval < 1:
        raise MalformedHeaderError("maxval must be at least 1")
    if maxval > 255:
        raise UnsupportedMaxvalError(
            "maxval {} needs 16-bit samples, which aren't supported".format(maxval)
        )

    count = width * height * channels
    if binary:
        if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
            raise MalformedHeaderError("missing whitespace after maxval")
        start = pos + 1
        if len(data) - start < count:
            raise TruncatedDataError(
                "expected {} samples, found {}".format(count, len(data) - start)
            )
        samples = np.frombuffer(data, dtype=np.uint8, count=count, offset=start)
    else:
        tokens = _COMMENT_REGEX.sub(b"", data[pos:]).split()
        if len(tokens) < count:
            raise TruncatedDataError(
                "expected {} samples, found {}".format(count, len(tokens))
            )
        for token in tokens[:count]:
            if not token.isdigit():
                raise MalformedSampleError(
                    "sample {!r} is not a plain decimal integer".format(token.decode("latin-1"))
                )
        samples = np.array([int(t) for t in tokens[:count]], dtype=np.int64)

    samples = _scale_samples(samples, maxval)
    if channels == 3:
        rgb = samples.reshape(-1, 3)
        samples = (299 * rgb[:, 0] + 587 * rgb[:, 1] + 114 * rgb[:, 2] + 500) // 1000

    return GrayImage(samples.reshape(height, width).astype(np.uint8))


def encode_pgm(image):

    """
    Encodes an image as a binary PGM (``P5``, maxval 255). ``decode_image(encode_pgm(img)) == img`` for \
    every image.

    :param image: The image to write
    :type image: :py:class:`cbirtils.io.GrayImage`
    :rtype: bytes
    """

    header = "P5\n{} {}\n255\n".format(image.width, image.height).encode("ascii")
    return header + image.pixels.tobytes()


def read_image(path):

    """
    Reads and decodes an image file.

    :param path: Path to a PGM or PPM file
    :type path: str
    :rtype: :py:class:`cbirtils.io.GrayImage`
    """

    with open(path, "rb") as infile:
        return decode_image(infile.read())


class ManifestEntry(object):
    def __init__(self, image_id, path, group_label):
        self.image_id = image_id
        self.path = path
        self.group_label = group_label

    def __eq__(self, other):
        return isinstance(other, ManifestEntry) and (
            self.image_id,
            self.path,
            self.group_label,
        ) == (other.image_id, other.path, other.group_label)

    def __repr__(self):
        return "ManifestEntry({!r}, {!r}, {!r})".format(
            self.image_id, self.path, self.group_label
        )


class DatasetManifest(object):

    """
    An ordered list of images with the group each one belongs to. Groups define relevance during \
    evaluation: an image is relevant to a query when both share a group label.

    :param entries: :py:class:`cbirtils.io.ManifestEntry` objects, in order
    :type entries: list
    :param root: Folder that relative image paths are resolved against (default: current directory)
    :type root: str
    """

    def __init__(self, entries=None, root=None):
        self.entries = list(entries or [])
        self.root = root
        seen = set()
        for entry in self.entries:
            if entry.image_id in seen:
                raise ManifestError("duplicate image id '{}'".format(entry.image_id))
            if not entry.group_label:
                raise ManifestError(
                    "image '{}' has an empty group label".format(entry.image_id)
                )
            seen.add(entry.image_id)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def groups(self):
        """
        Group labels mapped to their image ids, both in manifest order.

        :rtype: :py:class:`collections.OrderedDict`
        """
        groups = OrderedDict()
        for entry in self.entries:
            groups.setdefault(entry.group_label, []).append(entry.image_id)
        return groups

    @property
    def group_sizes(self):
        return OrderedDict((label, len(ids)) for label, ids in self.groups.items())

    def resolve(self, path):
        if self.root and not os.path.isabs(path):
            return os.path.join(self.root, path)
        return path

    def to_frame(self):
        """
        :return: One row per entry with ``image_id``, ``path`` and ``group_label`` columns
        :rtype: :py:class:`pandas.DataFrame`
        """
        return pd.DataFrame(
            [
                {"image_id": e.image_id, "path": e.path, "group_label": e.group_label}
                for e in self.entries
            ],
            columns=["image_id", "path", "group_label"],
        )


def image_id_from_path(path):
    name = path.replace("\\", "/").split("/")[-1]
    return os.path.splitext(name)[0]


def load_manifest(text, root=None):

    """
    Parses a dataset manifest. Each non-empty line that doesn't start with ``#`` reads \
    ``path,group_label``; the image id is the file name without directory or extension.

    :param text: The manifest contents
    :type text: str
    :param root: Folder that relative paths are resolved against
    :type root: str
    :return: The parsed manifest
    :rtype: :py:class:`cbirtils.io.DatasetManifest`

    Usage::

        from cbirtils.io import load_manifest

        >>> manifest = load_manifest("a/dog1.pgm,dogs\\na/dog2.pgm,dogs")
        >>> [e.image_id for e in manifest]
        ['dog1', 'dog2']
        >>> manifest.group_sizes
        OrderedDict([('dogs', 2)])
    """

    entries = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "," not in line:
            raise ManifestError(
                "line {}: expected 'path,group_label', got '{}'".format(number, line)
            )
        path, label = line.rsplit(",", 1)
        path, label = path.strip(), label.strip()
        if not path:
            raise ManifestError("line {}: empty path".format(number))
        if not label:
            raise ManifestError("line {}: empty group label".format(number))
        entries.append(ManifestEntry(image_id_from_path(path), path, label))

    return DatasetManifest(entries, root=root)


def load_manifest_file(path):

    """
    Reads a manifest from disk. Relative image paths are resolved against the manifest's own folder.

    :param path: Path to the manifest
    :type path: str
    :rtype: :py:class:`cbirtils.io.DatasetManifest`
    """

    try:
        with io.open(path, "r", encoding="utf-8-sig", newline="") as infile:
            text = infile.read()
    except UnicodeDecodeError as e:
        raise ManifestError("{} is not valid UTF-8: {}".format(path, e))
    return load_manifest(text, root=os.path.dirname(os.path.abspath(path)))


def format_manifest(manifest):
    lines = ["{},{}".format(e.path, e.group_label) for e in manifest]
    return "\n".join(lines) + ("\n" if lines else "")


def encode_artifact(data, format="csv", **io_kwargs):

    """
    Serialises an artifact to the bytes :py:class:`cbirtils.io.FileHandler` writes.

    :param data: A :py:class:`pandas.DataFrame` for ``csv``, a string for ``txt``, a \
    :py:class:`cbirtils.io.GrayImage` for ``pgm`` or a matplotlib figure for ``png``
    :param format: One of ``csv``, ``txt``, ``pgm``, ``png``
    :type format: str
    :param io_kwargs: Extra arguments for :py:meth:`pandas.DataFrame.to_csv` or ``Figure.savefig``
    :rtype: bytes
    """

    format = format.strip(".")
    if format == "csv":
        io_kwargs.setdefault("index", False)
        return data.to_csv(**io_kwargs).replace("\r\n", "\n").encode("utf8")
    elif format == "txt":
        return data.encode("utf8")
    elif format == "pgm":
        return encode_pgm(data)
    elif format == "png":
        buffer = io.BytesIO()
        data.savefig(buffer, format="png", **io_kwargs)
        return buffer.getvalue()
    raise InvalidParameterError("unsupported format '{}'".format(format))


def write_artifact(path, data, format="csv", **io_kwargs):

    """
    Writes an artifact to exactly ``path``, whatever its suffix, creating the parent folder if needed.

    :param path: Where to write
    :type path: str
    :param data: See :py:func:`encode_artifact`
    :param format: One of ``csv``, ``txt``, ``pgm``, ``png``
    :type format: str
    :return: The path written
    :rtype: str
    """

    output = encode_artifact(data, format, **io_kwargs)
    folder = os.path.dirname(path)
    if folder and not os.path.exists(folder):
        os.makedirs(folder)
    with open(path, "wb") as outfile:
        outfile.write(output)
    logger.debug("wrote %s (%d bytes)", path, len(output))
    return path


class FileHandler(object):

    """
    Read/write output artifacts in a local folder: CSV tables, text reports, PGM images and PNG figures. \
    Everything is written as bytes so repeated runs produce byte-identical files.

    :param path: The folder to read from and write to; created if it doesn't exist
    :type path: str

    Usage::

        from cbirtils.io import FileHandler

        >>> h = FileHandler("results")
        >>> h.write("eval", report.summary, format="csv")
        >>> h.read("eval", format="csv")
           n  arp_percent  arr
        0  1        100.0  0.1
    """

    def __init__(self, path):
        self.path = path
        if not os.path.exists(self.path):
            os.makedirs(self.path)

    def iterate_path(self):

        """
        Iterates over the folder and yields file names, sorted.

        :rtype: iterable
        """

        for name in sorted(os.listdir(self.path)):
            yield name

    def clear_file(self, key, format="csv"):
        """
        Deletes a specific file.

        .. warning:: This is a destructive function, use with caution!

        :param key: The name of the file to delete (without a suffix)
        :type key: str
        :param format: The file extension
        :type format: str
        """

        os.unlink(self.get_path(key, format=format))

    def get_path(self, key, format="csv"):
        return os.path.join(self.path, "{}.{}".format(key, format.strip(".")))

    def write(self, key, data, format="csv", **io_kwargs):

        """
        Writes an artifact.

        :param key: The name of the file (without a suffix!)
        :type key: str
        :param data: A :py:class:`pandas.DataFrame` for ``csv``, a string for ``txt``, a \
        :py:class:`cbirtils.io.GrayImage` for ``pgm`` or a matplotlib figure for ``png``
        :param format: One of ``csv``, ``txt``, ``pgm``, ``png``
        :type format: str
        :param io_kwargs: Extra arguments for :py:meth:`pandas.DataFrame.to_csv` or ``Figure.savefig``
        :return: The path written
        :rtype: str
        """

        return write_artifact(self.get_path(key, format=format), data, format, **io_kwargs)

    def read(self, key, format="csv", **io_kwargs):

        """
        Reads an artifact back, or returns ``None`` if the file doesn't exist.

        :param key: The name of the file to read (without a suffix!)
        :type key: str
        :param format: One of ``csv``, ``txt``, ``pgm``
        :type format: str
        :param io_kwargs: Extra arguments for :py:func:`pandas.read_csv`
        """

        format = format.strip(".")
        path = self.get_path(key, format=format)
        if not os.path.exists(path):
            return None

        with open(path, "rb") as infile:
            data = infile.read()

        if format == "csv":
            return pd.read_csv(io.BytesIO(data), **io_kwargs)
        elif format == "txt":
            return data.decode("utf8")
        elif format == "pgm":
            return decode_image(data)
        raise InvalidParameterError("can't read format '{}'".format(format))
