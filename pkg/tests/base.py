import unittest


class BaseTests(unittest.TestCase):

    """
    To test, navigate to cbirtils root folder and run `python -m unittest tests`.
    To assess unit test coverage, run `coverage run -m unittest tests` and then `coverage report -m`.
    """

    def setUp(self):
        pass

    def test_format_float(self):
        from cbirtils import format_float

        self.assertEqual(format_float(0.0), "0")
        self.assertEqual(format_float(3), "3")
        self.assertEqual(format_float(-2.0), "-2")
        self.assertEqual(format_float(0.1), "0.1")
        self.assertEqual(format_float(1e-20), "1e-20")
        self.assertEqual(format_float(1.0 / 3), "0.3333333333333333")

    def test_parse_float(self):
        from cbirtils import FeatureFormatError, format_float, parse_float

        for value in [0.0, 0.1, 1.0 / 3, 1e-300, 123456.789, -5e-7]:
            self.assertEqual(parse_float(format_float(value)), value)
        for bad in ["abc", "nan", "inf", "-inf", ""]:
            with self.assertRaises(FeatureFormatError):
                parse_float(bad)

    def test_error_hierarchy(self):
        from cbirtils import (
            ChecksumError,
            DataError,
            IndexBuildError,
            IndexFormatError,
            InvalidParameterError,
            TruncatedDataError,
            ImageFormatError,
            UsageError,
        )

        self.assertTrue(issubclass(InvalidParameterError, UsageError))
        self.assertTrue(issubclass(InvalidParameterError, ValueError))
        self.assertTrue(issubclass(TruncatedDataError, ImageFormatError))
        self.assertTrue(issubclass(ImageFormatError, DataError))
        self.assertTrue(issubclass(ChecksumError, IndexFormatError))
        self.assertFalse(issubclass(DataError, UsageError))
        error = IndexBuildError("images/a.pgm", TruncatedDataError("expected 9 samples, found 4"))
        self.assertEqual(str(error), "images/a.pgm: expected 9 samples, found 4")
        self.assertIsInstance(error, DataError)

    def test_index_build_error_pickles(self):
        import pickle
        from cbirtils import IndexBuildError, TruncatedDataError

        error = IndexBuildError("a.pgm", TruncatedDataError("short"))
        copy = pickle.loads(pickle.dumps(error))
        self.assertEqual(copy.path, "a.pgm")
        self.assertEqual(str(copy), str(error))

    def test_get_hash(self):
        from cbirtils import InvalidParameterError, get_hash

        for text, method, expected_value in [
            ("test_string", "md5", "3474851a3410906697ec77337df7aae4"),
            (
                "test_string",
                "sha224",
                "6fc3bce832fca2985847bce34080da3d55c50aa849d9f12b0ad4f64c",
            ),
            ("temp", "sha224", "c51bf90ccb22befa316b7a561fe9d5fd9650180b14421fc6d71bcd57"),
            (b"temp", "sha224", "c51bf90ccb22befa316b7a561fe9d5fd9650180b14421fc6d71bcd57"),
        ]:
            hash = get_hash(text, hash_function=method)
            self.assertEqual(hash, expected_value)
        with self.assertRaises(InvalidParameterError):
            get_hash("temp", hash_function="nilsimsa")

    def test_chunk_list(self):
        from cbirtils import chunk_list

        test = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
        chunked = [c for c in chunk_list(test, 3)]
        self.assertEqual(len(chunked), 4)
        self.assertEqual(chunked[-1], [10])

    def test_multiprocess_map(self):
        from cbirtils import multiprocess_map

        values = list(range(-20, 20))
        expected = [abs(v) for v in values]
        self.assertEqual(multiprocess_map(abs, values), expected)
        self.assertEqual(multiprocess_map(abs, values, processes=1), expected)
        self.assertEqual(multiprocess_map(abs, values, processes=3), expected)
        self.assertEqual(multiprocess_map(abs, [], processes=3), [])

    def test_print_execution_time(self):
        import re
        from cbirtils import PrintExecutionTime

        with self.assertLogs("cbirtils", level="INFO") as logs:
            with PrintExecutionTime(label="my function") as timer:
                sum(range(1000))
        self.assertGreaterEqual(timer.elapsed, 0)
        self.assertEqual(len(logs.output), 1)
        self.assertIsNotNone(
            re.match(r"INFO:cbirtils:my function: [0-9]+\.[0-9]{3} seconds", logs.output[0])
        )

    def tearDown(self):
        pass
