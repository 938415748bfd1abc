import unittest
import os
import shutil
import tempfile


class SyntheticTests(unittest.TestCase):

    """
    To test, navigate to cbirtils root folder and run `python -m unittest tests`
    """

    def setUp(self):
        self.temp = tempfile.mkdtemp()

    def test_checkerboard(self):
        from cbirtils.synthetic import checkerboard

        board = checkerboard(4, 2, 10, 50, offset=5)
        self.assertEqual(
            board.pixels.tolist(),
            [[55, 55, 15, 15], [55, 55, 15, 15], [15, 15, 55, 55], [15, 15, 55, 55]],
        )

    def test_checkerboard_dataset(self):
        import numpy as np
        from cbirtils.synthetic import checkerboard_dataset

        dataset = checkerboard_dataset()
        self.assertEqual(len(dataset), 40)
        self.assertEqual(dataset[0][:2], ("c2_00", "checker2"))
        self.assertEqual(dataset[-1][:2], ("c5_09", "checker5"))
        self.assertEqual(len(set(image_id for image_id, _, _ in dataset)), 40)
        for image_id, group, image in dataset:
            self.assertEqual((image.width, image.height), (32, 32))
            self.assertLessEqual(image.pixels.max(), 255)
        first, second = dataset[0][2], dataset[3][2]
        difference = second.pixels.astype(int) - first.pixels.astype(int)
        self.assertTrue((difference == 15).all())
        self.assertFalse(np.array_equal(dataset[0][2].pixels, dataset[10][2].pixels))

    def test_checkerboard_dataset_errors(self):
        from cbirtils import InvalidParameterError
        from cbirtils.synthetic import checkerboard_dataset

        for kwargs in [
            {"cell_sizes": (2, 2)},
            {"cell_sizes": (0, 2)},
            {"per_group": 0},
            {"size": 2},
            {"low": 160, "high": 40},
            {"step": -1},
            {"per_group": 30},
        ]:
            with self.assertRaises(InvalidParameterError):
                checkerboard_dataset(**kwargs)

    def test_write_dataset(self):
        from cbirtils.io import load_manifest_file, read_image
        from cbirtils.synthetic import checkerboard_dataset, write_dataset

        dataset = checkerboard_dataset(cell_sizes=(3, 4), per_group=2, size=8)
        folder = os.path.join(self.temp, "synth")
        manifest = write_dataset(dataset, folder)
        self.assertEqual(
            sorted(os.listdir(folder)),
            ["c3_00.pgm", "c3_01.pgm", "c4_00.pgm", "c4_01.pgm", "manifest.txt"],
        )
        loaded = load_manifest_file(os.path.join(folder, "manifest.txt"))
        self.assertEqual(loaded.entries, manifest.entries)
        self.assertEqual(dict(loaded.group_sizes), {"checker3": 2, "checker4": 2})
        for (image_id, _, image), entry in zip(dataset, loaded):
            self.assertEqual(entry.image_id, image_id)
            self.assertEqual(read_image(loaded.resolve(entry.path)), image)

    def tearDown(self):
        shutil.rmtree(self.temp, ignore_errors=True)
