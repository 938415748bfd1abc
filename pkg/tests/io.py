import unittest
import os
import shutil
import tempfile


class IOTests(unittest.TestCase):
    """
    To test, navigate to cbirtils root folder and run `python -m unittest tests`
    """

    def setUp(self):
        import pandas as pd

        self.test_df = pd.DataFrame(
            [{"test": 1}, {"test": 2}, {"test": 3}, {"test": 4}]
        )
        self.temp = tempfile.mkdtemp()

    def test_gray_image(self):
        import numpy as np
        from cbirtils import InvalidParameterError
        from cbirtils.io import GrayImage

        img = GrayImage([[0, 255], [128, 64]])
        self.assertEqual((img.width, img.height), (2, 2))
        self.assertEqual(img.to_list(), [0, 255, 128, 64])
        self.assertEqual(img.pixels.dtype, np.uint8)
        self.assertEqual(img, GrayImage.from_sequence(2, 2, [0, 255, 128, 64]))
        self.assertNotEqual(img, GrayImage([[0, 255, 128, 64]]))
        with self.assertRaises(ValueError):
            img.pixels[0, 0] = 1

        for bad in [[1, 2, 3], [[256]], [[-1]], [[1.5]], [[]]]:
            with self.assertRaises(InvalidParameterError):
                GrayImage(bad)
        with self.assertRaises(InvalidParameterError):
            GrayImage.from_sequence(3, 3, [0] * 8)

    def test_crop(self):
        import numpy as np
        from cbirtils import InvalidParameterError
        from cbirtils.io import GrayImage

        img = GrayImage(np.arange(25).reshape(5, 5))
        self.assertEqual(img.crop(0), img)
        self.assertEqual(img.crop(1).to_list(), [6, 7, 8, 11, 12, 13, 16, 17, 18])
        self.assertEqual(img.crop(2).to_list(), [12])
        with self.assertRaises(InvalidParameterError):
            img.crop(3)

    def test_decode_ascii_gray(self):
        from cbirtils.io import decode_image, read_image

        self.assertEqual(
            decode_image(b"P2 2 2 255 0 255 128 64").to_list(), [0, 255, 128, 64]
        )
        img = read_image("tests/files/window.pgm")
        self.assertEqual((img.width, img.height), (3, 3))
        self.assertEqual(img.pixels.tolist(), [[6, 5, 2], [7, 6, 1], [9, 8, 7]])
        # comments may split header tokens and sit between samples
        img = decode_image(b"P2#c\n3#c\n1 255 1 #x\n 2 3\n")
        self.assertEqual(img.to_list(), [1, 2, 3])

    def test_decode_binary_gray(self):
        from cbirtils.io import read_image

        img = read_image("tests/files/ramp.pgm")
        self.assertEqual((img.width, img.height), (4, 2))
        self.assertEqual(img.to_list(), [0, 16, 32, 48, 64, 80, 96, 112])

    def test_decode_color(self):
        from cbirtils.io import decode_image, read_image

        self.assertEqual(decode_image(b"P3 1 1 255 100 50 200").to_list(), [82])
        self.assertEqual(read_image("tests/files/color.ppm").to_list(), [82, 0])
        self.assertEqual(decode_image(b"P6 1 1 255\n\xff\xff\xff").to_list(), [255])
        self.assertEqual(decode_image(b"P3 1 1 255 255 0 0").to_list(), [76])

    def test_decode_rescales_maxval(self):
        from cbirtils.io import decode_image, read_image

        self.assertEqual(read_image("tests/files/low_maxval.pgm").to_list(), [0, 119, 255])
        # 1 * 255 / 2 = 127.5 rounds up
        self.assertEqual(decode_image(b"P2 3 1 2 0 1 2").to_list(), [0, 128, 255])

    def test_decode_errors(self):
        from cbirtils import (
            ImageFormatError,
            MalformedHeaderError,
            MalformedSampleError,
            TruncatedDataError,
            UnknownFormatError,
            UnsupportedMaxvalError,
        )
        from cbirtils.io import decode_image

        for data, error in [
            (b"", UnknownFormatError),
            (b"P7 1 1 255 0", UnknownFormatError),
            (b"\x89PNG\r\n", UnknownFormatError),
            (b"P2 3 x 255 0 0 0", MalformedHeaderError),
            (b"P2 3 -1 255", MalformedHeaderError),
            (b"P2 3 3", MalformedHeaderError),
            (b"P2 0 3 255", MalformedHeaderError),
            (b"P2 1 1 0 0", MalformedHeaderError),
            (b"P5 1 1 255", MalformedHeaderError),
            (b"P2 1 1 65535 0", UnsupportedMaxvalError),
            (b"P5 2 2 255 \x00\x01", TruncatedDataError),
            (b"P2 2 2 255 0 1 2", TruncatedDataError),
            (b"P6 1 1 255 \x00\x01", TruncatedDataError),
            (b"P2 1 1 10 11", MalformedSampleError),
            (b"P2 1 1 255 abc", MalformedSampleError),
            (b"P2 1 1 255 -3", MalformedSampleError),
            (b"P2 1 1 255 1_0", MalformedSampleError),
            (b"P2 1 1 255 +5", MalformedSampleError),
            (b"P2 2 1 255 7 \xd9\xa3", MalformedSampleError),
        ]:
            with self.assertRaises(error):
                decode_image(data)
            with self.assertRaises(ImageFormatError):
                decode_image(data)

    def test_encode_pgm(self):
        import numpy as np
        from cbirtils.io import GrayImage, decode_image, encode_pgm

        self.assertEqual(encode_pgm(GrayImage([[1, 2]])), b"P5\n2 1\n255\n\x01\x02")
        rng = np.random.RandomState(7)
        for shape in [(1, 1), (3, 5), (16, 9)]:
            img = GrayImage(rng.randint(0, 256, size=shape))
            self.assertEqual(decode_image(encode_pgm(img)), img)

    def test_load_manifest(self):
        from cbirtils.io import load_manifest

        manifest = load_manifest(
            "# header\na/dog1.pgm,dogs\n\n  b\\cat.ppm , cats \nodd,name.pgm,dogs\n"
        )
        self.assertEqual(
            [(e.image_id, e.path, e.group_label) for e in manifest],
            [
                ("dog1", "a/dog1.pgm", "dogs"),
                ("cat", "b\\cat.ppm", "cats"),
                ("name", "odd,name.pgm", "dogs"),
            ],
        )
        self.assertEqual(list(manifest.groups.items()), [("dogs", ["dog1", "name"]), ("cats", ["cat"])])
        self.assertEqual(dict(manifest.group_sizes), {"dogs": 2, "cats": 1})
        df = manifest.to_frame()
        self.assertEqual(list(df.columns), ["image_id", "path", "group_label"])
        self.assertEqual(len(df), 3)
        self.assertEqual(len(load_manifest("")), 0)

    def test_load_manifest_errors(self):
        from cbirtils import ManifestError
        from cbirtils.io import load_manifest

        for text in ["a.pgm", "a.pgm,", ",dogs", "a/x.pgm,g\nb/x.pgm,g"]:
            with self.assertRaises(ManifestError):
                load_manifest(text)

    def test_load_manifest_file(self):
        from cbirtils.io import format_manifest, load_manifest, load_manifest_file, read_image

        manifest = load_manifest_file("tests/files/manifest.txt")
        self.assertEqual([e.image_id for e in manifest], ["window", "ramp"])
        self.assertEqual(manifest.root, os.path.abspath("tests/files"))
        resolved = manifest.resolve(manifest.entries[1].path)
        self.assertEqual(read_image(resolved).width, 4)
        self.assertEqual(manifest.resolve("/abs/a.pgm"), "/abs/a.pgm")
        self.assertEqual(format_manifest(manifest), "window.pgm,window\nramp.pgm,ramp\n")
        again = load_manifest(format_manifest(manifest))
        self.assertEqual(again.entries, manifest.entries)

        with open(os.path.join(self.temp, "bom.txt"), "wb") as outfile:
            outfile.write(u"\ufeffx.pgm,g\r\n".encode("utf8"))
        manifest = load_manifest_file(os.path.join(self.temp, "bom.txt"))
        self.assertEqual(manifest.entries[0].path, "x.pgm")

    def test_load_manifest_file_encoding(self):
        from cbirtils import DataError, ManifestError
        from cbirtils.io import load_manifest_file

        path = os.path.join(self.temp, "latin1.txt")
        with open(path, "wb") as outfile:
            outfile.write(b"caf\xe9.pgm,g\n")
        with self.assertRaises(ManifestError):
            load_manifest_file(path)
        with self.assertRaises(DataError):
            load_manifest_file(path)

    def test_filehandler_iterate_path(self):
        from cbirtils.io import FileHandler

        h = FileHandler(os.path.join(self.temp, "out"))
        self.assertTrue(os.path.isdir(os.path.join(self.temp, "out")))
        for key in ["b", "a", "c"]:
            h.write(key, key, format="txt")
        self.assertEqual(list(h.iterate_path()), ["a.txt", "b.txt", "c.txt"])

    def test_filehandler_read_write(self):
        from cbirtils.io import FileHandler, GrayImage

        h = FileHandler(self.temp)
        path = h.write("temp", self.test_df, format="csv")
        self.assertEqual(path, os.path.join(self.temp, "temp.csv"))
        with open(path, "rb") as infile:
            self.assertEqual(infile.read(), b"test\n1\n2\n3\n4\n")
        read = h.read("temp", format="csv")
        self.assertEqual(len(read), len(self.test_df))
        self.assertEqual(list(read["test"]), [1, 2, 3, 4])

        h.write("temp", "hello\nworld", format=".txt")
        self.assertEqual(h.read("temp", format="txt"), "hello\nworld")

        img = GrayImage([[0, 10], [20, 255]])
        h.write("temp", img, format="pgm")
        self.assertEqual(h.read("temp", format="pgm"), img)

        self.assertIsNone(h.read("missing", format="csv"))

    def test_filehandler_png(self):
        from matplotlib.figure import Figure
        from cbirtils.io import FileHandler

        fig = Figure()
        fig.add_subplot(111).plot([1, 2], [3, 4])
        path = FileHandler(self.temp).write("figure", fig, format="png")
        with open(path, "rb") as infile:
            self.assertEqual(infile.read(8), b"\x89PNG\r\n\x1a\n")

    def test_filehandler_errors(self):
        from cbirtils import InvalidParameterError
        from cbirtils.io import FileHandler

        h = FileHandler(self.temp)
        with self.assertRaises(InvalidParameterError):
            h.write("temp", "x", format="json")
        with open(os.path.join(self.temp, "temp.json"), "wb") as outfile:
            outfile.write(b"{}")
        with self.assertRaises(InvalidParameterError):
            h.read("temp", format="json")

    def test_clear_file(self):
        from cbirtils.io import FileHandler

        h = FileHandler(self.temp)
        h.write("temp", "test", format="txt")
        h.clear_file("temp", format="txt")
        files = list(h.iterate_path())
        self.assertNotIn("temp.txt", files)
        self.assertEqual(len(files), 0)

    def tearDown(self):
        shutil.rmtree(self.temp, ignore_errors=True)
