from __future__ import absolute_import
import hashlib
import logging
import math
import multiprocessing
import time


logger = logging.getLogger(__name__)


class CbirError(Exception):

    """
    Base class for every error raised by ``cbirtils``.
    """


class UsageError(CbirError):

    """
    The caller asked for something that can't be done with the parameters given. The command line \
    reports these with exit status 1.
    """


class InvalidParameterError(UsageError, ValueError):
    pass


class DataError(CbirError):

    """
    The input data (an image, a manifest, a feature record or an index file) is unusable. The command \
    line reports these with exit status 2.
    """


class ImageFormatError(DataError):
    pass


class UnknownFormatError(ImageFormatError):
    pass


class MalformedHeaderError(ImageFormatError):
    pass


class UnsupportedMaxvalError(ImageFormatError):
    pass


class TruncatedDataError(ImageFormatError):
    pass


class MalformedSampleError(ImageFormatError):
    pass


class ManifestError(DataError):
    pass


class ImageTooSmallError(DataError):
    pass


class BoundaryError(DataError):
    pass


class DegenerateImageError(DataError):
    pass


class FeatureFormatError(DataError):
    pass


class FeatureMismatchError(DataError):
    pass


class IndexFormatError(DataError):
    pass


class IndexVersionError(IndexFormatError):
    pass


class ChecksumError(IndexFormatError):
    pass


class MalformedRecordError(IndexFormatError):
    pass


class IndexBuildError(DataError):

    """
    Raised when an image listed in a manifest can't be decoded or described.

    :param path: The manifest path of the offending image
    :type path: str
    :param cause: The underlying error
    :type cause: Exception
    """

    def __init__(self, path, cause):
        self.path = path
        self.cause = cause
        super(IndexBuildError, self).__init__("{}: {}".format(path, cause))

    def __reduce__(self):
        # rebuilt with both arguments when raised inside a worker process
        return (self.__class__, (self.path, self.cause))


class EvaluationError(DataError):
    pass


def format_float(value):

    """
    Formats a float as the shortest decimal string that reads back to the identical value. Integral \
    values drop their trailing ``.0``.

    :param value: The number to format
    :type value: float
    :return: The formatted number
    :rtype: str

    Usage::

        from cbirtils import format_float

        >>> format_float(0.0)
        '0'
        >>> format_float(0.1)
        '0.1'
        >>> format_float(1e-20)
        '1e-20'
    """

    text = repr(float(value))
    if text.endswith(".0"):
        text = text[:-2]
    return text


def parse_float(text):

    """
    Reads a number written by :py:func:`cbirtils.format_float`, refusing anything that isn't finite.

    :param text: The token to parse
    :type text: str
    :return: The parsed number
    :rtype: float
    """

    try:
        value = float(text)
    except ValueError:
        raise FeatureFormatError("'{}' is not a number".format(text))
    if not math.isfinite(value):
        raise FeatureFormatError("non-finite value '{}'".format(text))
    return value


def get_hash(text, hash_function="sha224"):

    """
    Generates a hex digest of a string or bytes. Used to checksum index files.

    :param text: The value to hash; strings are encoded as UTF-8
    :type text: str or bytes
    :param hash_function: ``'sha224'`` (default) or ``'md5'``
    :type hash_function: str
    :return: A hex digest
    :rtype: str

    Usage::

        from cbirtils import get_hash

        >>> get_hash("temp")
        'c51bf90ccb22befa316b7a561fe9d5fd9650180b14421fc6d71bcd57'
    """

    if not isinstance(text, bytes):
        text = str(text).encode("utf8")
    if hash_function == "md5":
        return hashlib.md5(text).hexdigest()
    elif hash_function == "sha224":
        return hashlib.sha224(text).hexdigest()
    raise InvalidParameterError("unknown hash function '{}'".format(hash_function))


def chunk_list(seq, size):

    """
    Takes a sequence and groups values into smaller lists based on the specified size.

    :param seq: List or a list-like iterable
    :type seq: list or iterable
    :param size: Desired size of each sublist
    :type size: int
    :return: A generator of lists
    :rtype: generator

    Usage::

        from cbirtils import chunk_list

        >>> list(chunk_list([1, 2, 3, 4, 5, 6, 7, 8, 9, 10], 3))
        [[1, 2, 3], [4, 5, 6], [7, 8, 9], [10]]
    """

    return (seq[pos : (pos + size)] for pos in range(0, len(seq), size))


def _apply_chunk(func, chunk):
    return [func(item) for item in chunk]


def multiprocess_map(func, items, processes=None):

    """
    Maps a function over a list using a pool of worker processes. The list is split into one contiguous \
    chunk per worker and the results are stitched back together in the original order, so the output \
    never depends on which worker finished first.

    :param func: A picklable, module-level function of one argument
    :type func: function
    :param items: The values to map over
    :type items: list
    :param processes: Number of worker processes; ``None`` or 1 maps in the current process
    :type processes: int
    :return: ``[func(item) for item in items]``
    :rtype: list

    Usage::

        from cbirtils import multiprocess_map

        >>> multiprocess_map(abs, [-1, -2, 3], processes=2)
        [1, 2, 3]
    """

    items = list(items)
    if not processes or processes <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    processes = min(processes, len(items), multiprocessing.cpu_count())
    size = int(math.ceil(len(items) / float(processes)))
    results = []
    pool = multiprocessing.Pool(processes=processes)
    try:
        for chunk in chunk_list(items, size):
            results.append(pool.apply_async(_apply_chunk, (func, chunk)))
        pool.close()
        pool.join()
        results = [r.get() for r in results]
    finally:
        pool.terminate()

    return [value for chunk in results for value in chunk]


class PrintExecutionTime(object):

    """
    Simple context manager to report the time it takes for a block of code to execute. The time goes to \
    the ``cbirtils`` logger at INFO level, never to data outputs.

    :param label: A label to print alongside the execution time
    :param log: The logger to report through (the package logger by default)

    Usage::

        from cbirtils import PrintExecutionTime

        >>> with PrintExecutionTime(label="index"): build()
        INFO:cbirtils:index: 0.41 seconds

    """

    def __init__(self, label=None, log=None):
        self.start_time = None
        self.end_time = None
        self.label = label
        self.log = log if log is not None else logger

    @property
    def elapsed(self):
        if self.start_time is None:
            return None
        end = self.end_time if self.end_time is not None else time.time()
        return end - self.start_time

    def __enter__(self):
        self.start_time = time.time()
        return self

    def __exit__(self, exc_type, exc_value, exc_traceback):
        self.end_time = time.time()
        if self.label:
            self.log.info("%s: %.3f seconds", self.label, self.elapsed)
        else:
            self.log.info("%.3f seconds", self.elapsed)
