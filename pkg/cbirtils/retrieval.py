from __future__ import absolute_import
from cbirtils import (
    CbirError,
    ChecksumError,
    DataError,
    FeatureMismatchError,
    IndexBuildError,
    IndexFormatError,
    IndexVersionError,
    InvalidParameterError,
    MalformedRecordError,
    PrintExecutionTime,
    format_float,
    get_hash,
    multiprocess_map,
    parse_float,
)
from cbirtils.features import MODES, FeatureVector, check_mode, expected_dim, extract
from cbirtils.io import read_image
from cbirtils.lbp import LbpParams
import io
import logging

import numpy as np
import pandas as pd


logger = logging.getLogger(__name__)

INDEX_MAGIC = "CBIRIDX"
INDEX_VERSION = 1


def _d1_terms(f_i, f_q):
    numerator = f_i - f_q
    # 1 + (f_i + f_q) is symmetric in its arguments bit for bit
    denominator = 1.0 + (f_i + f_q)
    safe = np.where(denominator == 0, 1.0, denominator)
    return np.abs(numerator / safe)


def d1_distance(q, t):

    """
    The d1 distance ``sum_i |(t_i - q_i) / (1 + t_i + q_i)|``. It is symmetric, zero for identical vectors \
    and non-negative; it is not a metric (no triangle inequality). A zero denominator, which only the \
    signed Hu segment can produce, contributes ``|t_i - q_i|``.

    :param q: Query descriptor
    :type q: :py:class:`cbirtils.features.FeatureVector`
    :param t: Database descriptor
    :type t: :py:class:`cbirtils.features.FeatureVector`
    :rtype: float

    Usage::

        from cbirtils.features import FeatureVector
        from cbirtils.retrieval import d1_distance

        >>> d1_distance(FeatureVector("hu", [1, 0, 0, 0, 0, 0, 0]), FeatureVector("hu", [0, 1, 0, 0, 0, 0, 0]))
        1.0
    """

    if q.mode != t.mode or q.dim != t.dim:
        raise FeatureMismatchError(
            "can't compare a {}-dim '{}' vector with a {}-dim '{}' vector".format(
                q.dim, q.mode, t.dim, t.mode
            )
        )
    return float(_d1_terms(t.values, q.values).sum())


class IndexEntry(object):
    def __init__(self, image_id, group_label, vector):
        self.image_id = image_id
        self.group_label = group_label
        self.vector = vector

    def __eq__(self, other):
        return (
            isinstance(other, IndexEntry)
            and self.image_id == other.image_id
            and self.group_label == other.group_label
            and self.vector == other.vector
        )

    def __repr__(self):
        return "IndexEntry({!r}, {!r}, {!r})".format(
            self.image_id, self.group_label, self.vector
        )


class FeatureIndex(object):

    """
    An immutable database of descriptors that share one mode and one LBP neighbourhood.

    :param mode: Feature mode of every entry
    :type mode: str
    :param params: LBP neighbourhood used for extraction
    :type params: :py:class:`cbirtils.lbp.LbpParams`
    :param entries: :py:class:`cbirtils.retrieval.IndexEntry` objects, in manifest order
    :type entries: list
    """

    def __init__(self, mode, params, entries=None):
        self.mode = mode
        self.params = params
        self.dim = expected_dim(mode, params)
        self._entries = tuple(entries or [])
        seen = set()
        for entry in self._entries:
            if entry.image_id in seen:
                raise IndexFormatError("duplicate image id '{}'".format(entry.image_id))
            seen.add(entry.image_id)
            if entry.vector.mode != mode or entry.vector.dim != self.dim:
                raise FeatureMismatchError(
                    "entry '{}' is a {}-dim '{}' vector, the index holds {}-dim '{}'".format(
                        entry.image_id, entry.vector.dim, entry.vector.mode, self.dim, mode
                    )
                )
        if self._entries:
            self._matrix = np.vstack([e.vector.values for e in self._entries])
        else:
            self._matrix = np.zeros((0, self.dim), dtype=np.float64)
        self._matrix.setflags(write=False)

    @property
    def entries(self):
        return self._entries

    @property
    def matrix(self):
        """
        All descriptors stacked into a read-only ``(len(index), dim)`` array.
        """
        return self._matrix

    @property
    def group_sizes(self):
        sizes = {}
        for entry in self._entries:
            sizes[entry.group_label] = sizes.get(entry.group_label, 0) + 1
        return sizes

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __eq__(self, other):
        return (
            isinstance(other, FeatureIndex)
            and self.mode == other.mode
            and self.params == other.params
            and self._entries == other._entries
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return "FeatureIndex(mode={!r}, params={!r}, entries={})".format(
            self.mode, self.params, len(self)
        )


class RankedResult(object):

    """
    A ranked retrieval answer: ``(image_id, group_label, distance)`` triples ordered by distance.
    """

    def __init__(self, items):
        self.items = list(items)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def image_ids(self):
        return [item[0] for item in self.items]

    @property
    def groups(self):
        return [item[1] for item in self.items]

    def to_frame(self):
        """
        :return: Columns ``rank``, ``image_id``, ``group_label``, ``distance``
        :rtype: :py:class:`pandas.DataFrame`
        """
        return pd.DataFrame(
            [
                {"rank": rank, "image_id": i, "group_label": g, "distance": d}
                for rank, (i, g, d) in enumerate(self.items, start=1)
            ],
            columns=["rank", "image_id", "group_label", "distance"],
        )

    def __repr__(self):
        return "RankedResult({} items)".format(len(self.items))


def _describe_entry(task):
    entry, path, mode, params, hu_weight = task
    try:
        vector = extract(read_image(path), mode=mode, params=params, hu_weight=hu_weight)
    except (DataError, OSError) as e:
        raise IndexBuildError(entry.path, e)
    return IndexEntry(entry.image_id, entry.group_label, vector)


def build_index(manifest, mode="gmlbp", params=None, hu_weight=1.0, processes=None):

    """
    Describes every image of a manifest. Entries keep manifest order whatever the number of workers.

    :param manifest: The dataset
    :type manifest: :py:class:`cbirtils.io.DatasetManifest`
    :param mode: Feature mode
    :type mode: str
    :param params: LBP neighbourhood
    :type params: :py:class:`cbirtils.lbp.LbpParams`
    :param hu_weight: Weight of the Hu segment in ``combined`` mode
    :type hu_weight: float
    :param processes: Worker processes for extraction (``None`` extracts in this process)
    :type processes: int
    :rtype: :py:class:`cbirtils.retrieval.FeatureIndex`

    .. note:: The first image that can't be read or described aborts the build with an \
        :py:class:`cbirtils.IndexBuildError` naming its manifest path.
    """

    params = params or LbpParams()
    check_mode(mode, params)
    tasks = [
        (entry, manifest.resolve(entry.path), mode, params, hu_weight)
        for entry in manifest
    ]
    with PrintExecutionTime(label="extracted {} images".format(len(tasks)), log=logger):
        entries = multiprocess_map(_describe_entry, tasks, processes=processes)
    return FeatureIndex(mode, params, entries)


def query(index, q, k=10, query_id=None):

    """
    Ranks the whole index against a query by :py:func:`d1_distance` and keeps the top ``k``. Ties are \
    broken by ascending image id, except that the entry named ``query_id`` (the query's own entry, when \
    it is in the index) goes first among equals.

    :param index: The database
    :type index: :py:class:`cbirtils.retrieval.FeatureIndex`
    :param q: Query descriptor
    :type q: :py:class:`cbirtils.features.FeatureVector`
    :param k: Number of results, at least 1
    :type k: int
    :param query_id: Id of the query's own entry, if any
    :type query_id: str
    :rtype: :py:class:`cbirtils.retrieval.RankedResult`
    """

    if int(k) != k or k < 1:
        raise InvalidParameterError("k must be a positive integer, got {}".format(k))
    if q.mode != index.mode or q.dim != index.dim:
        raise FeatureMismatchError(
            "a {}-dim '{}' query doesn't fit a {}-dim '{}' index".format(
                q.dim, q.mode, index.dim, index.mode
            )
        )

    distances = _d1_terms(index.matrix, q.values[np.newaxis, :]).sum(axis=1)
    ranked = sorted(
        (
            (float(d), e.image_id != query_id, e.image_id, e.group_label)
            for d, e in zip(distances, index.entries)
        )
    )
    return RankedResult(
        (image_id, group, distance) for distance, _, image_id, group in ranked[: int(k)]
    )


def query_image(index, image, k=10, hu_weight=1.0, query_id=None):

    """
    Describes an image the way the index was built and queries with it.

    :rtype: :py:class:`cbirtils.retrieval.RankedResult`
    """

    q = extract(image, mode=index.mode, params=index.params, hu_weight=hu_weight)
    return query(index, q, k=k, query_id=query_id)


def dumps_index(index):

    """
    Serialises an index. The header line reads ``CBIRIDX 1 <mode> <P> <R> <dim> <count>``, then one \
    ``<image_id>\\t<group_label>\\t<v1> ... <vdim>`` line per entry, then a trailer \
    ``END <count> <sha224>`` whose digest covers every preceding byte.

    :param index: The index
    :type index: :py:class:`cbirtils.retrieval.FeatureIndex`
    :rtype: str
    """

    lines = [
        " ".join(
            [
                INDEX_MAGIC,
                str(INDEX_VERSION),
                index.mode,
                str(index.params.neighbors),
                format_float(index.params.radius),
                str(index.dim),
                str(len(index)),
            ]
        )
    ]
    for entry in index:
        if any(c in entry.image_id + entry.group_label for c in "\t\n\r"):
            raise InvalidParameterError(
                "ids and labels can't contain tabs or newlines: '{}'".format(entry.image_id)
            )
        values = " ".join(format_float(v) for v in entry.vector.values)
        lines.append("\t".join([entry.image_id, entry.group_label, values]))
    body = "".join(line + "\n" for line in lines)
    return body + "END {} {}\n".format(len(index), get_hash(body))


def loads_index(text):

    """
    Parses the output of :py:func:`dumps_index`.

    :param text: The index file contents
    :type text: str
    :rtype: :py:class:`cbirtils.retrieval.FeatureIndex`

    .. note:: A wrong magic or an unparsable header raises :py:class:`cbirtils.IndexFormatError`, a \
        version other than 1 :py:class:`cbirtils.IndexVersionError`, a missing trailer or bad entry \
        :py:class:`cbirtils.MalformedRecordError`, and a digest mismatch :py:class:`cbirtils.ChecksumError`.
    """

    lines = text.split("\n")
    header = lines[0].split(" ")
    if len(header) < 2 or header[0] != INDEX_MAGIC:
        raise IndexFormatError("not a feature index file")
    if header[1] != str(INDEX_VERSION):
        raise IndexVersionError(
            "index format version {} isn't supported (expected {})".format(
                header[1], INDEX_VERSION
            )
        )
    if len(header) != 7:
        raise MalformedRecordError("header has {} fields, expected 7".format(len(header)))
    _, _, mode, neighbors, radius, dim, count = header
    if mode not in MODES:
        raise MalformedRecordError("unknown feature mode '{}'".format(mode))
    try:
        params = LbpParams(int(neighbors), float(radius))
        dim, count = int(dim), int(count)
    except (ValueError, CbirError) as e:
        raise MalformedRecordError("bad header: {}".format(e))
    try:
        wanted = check_mode(mode, params)
    except CbirError as e:
        raise MalformedRecordError("bad header: {}".format(e))
    if dim != wanted:
        raise MalformedRecordError(
            "header declares dimension {} but '{}' with P={} gives {}".format(
                dim, mode, params.neighbors, wanted
            )
        )

    # count entries, the trailer, and the empty string after the final newline
    if len(lines) < count + 3 or lines[-1] != "" or not lines[count + 1].startswith("END "):
        raise MalformedRecordError(
            "index is truncated: expected {} entries and a trailer".format(count)
        )
    trailer = lines[count + 1].split(" ")
    if len(trailer) != 3 or trailer[1] != str(count) or len(lines) != count + 3:
        raise MalformedRecordError("trailer doesn't match the declared entry count")
    body = "".join(line + "\n" for line in lines[: count + 1])
    if get_hash(body) != trailer[2]:
        raise ChecksumError("index checksum doesn't match its contents")

    entries = []
    for number, line in enumerate(lines[1 : count + 1], start=2):
        fields = line.split("\t")
        if len(fields) != 3:
            raise MalformedRecordError("line {}: expected 3 tab-separated fields".format(number))
        image_id, group_label, values = fields
        try:
            values = [parse_float(v) for v in values.split(" ")]
            vector = FeatureVector(mode, values)
        except CbirError as e:
            raise MalformedRecordError("line {}: {}".format(number, e))
        if vector.dim != dim:
            raise MalformedRecordError(
                "line {}: {} values, header declares {}".format(number, vector.dim, dim)
            )
        entries.append(IndexEntry(image_id, group_label, vector))

    try:
        return FeatureIndex(mode, params, entries)
    except CbirError as e:
        raise MalformedRecordError(str(e))


def save_index(index, sink):

    """
    Writes an index as UTF-8 with LF line endings.

    :param index: The index
    :type index: :py:class:`cbirtils.retrieval.FeatureIndex`
    :param sink: A path, or a binary file object
    """

    data = dumps_index(index).encode("utf8")
    if hasattr(sink, "write"):
        sink.write(data)
    else:
        with open(sink, "wb") as outfile:
            outfile.write(data)
    logger.info("saved %d entries", len(index))


def load_index(source):

    """
    Reads an index written by :py:func:`save_index`.

    :param source: A path, or a binary file object
    :rtype: :py:class:`cbirtils.retrieval.FeatureIndex`
    """

    if hasattr(source, "read"):
        data = source.read()
    else:
        with io.open(source, "rb") as infile:
            data = infile.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf8")
        except UnicodeDecodeError:
            raise IndexFormatError("index file is not UTF-8 text")
    return loads_index(data)
