import hashlib
import os
import struct
import tempfile
import unittest
import numpy as np
import torch
import torch_testing as tt
from slimreg.core import ConfigError, DatasetError, IdxCountMismatchError, IdxMagicError, IdxTruncatedError
from slimreg.experiments import (
    DatasetDescriptor,
    ImageDataset,
    SynthSpec,
    load_config,
    load_idx_dataset,
    parse_config,
    read_idx_images,
    run_experiment,
    split_low_data,
    synth_ceiling,
    synth_dataset,
    synth_pixels,
    write_idx,
)

PIXELS = bytes(range(0, 160, 10))
LABELS = bytes([0, 1, 2, 1])


class TestIdx(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def write(self, name, data):
        path = os.path.join(self.directory.name, name)
        with open(path, 'wb') as f:
            f.write(data)
        return path

    def fixture(self, images=None, labels=None):
        images = images if images is not None else struct.pack('>IIII', 0x803, 4, 2, 2) + PIXELS
        labels = labels if labels is not None else struct.pack('>II', 0x801, 4) + LABELS
        return DatasetDescriptor(self.write('images.idx', images), self.write('labels.idx', labels),
                                 num_classes=3, mean=(0.,), std=(1.,))

    def test_hand_written_fixture(self):
        data = load_idx_dataset(self.fixture(), dtype=torch.float64)
        expected = torch.tensor(list(PIXELS), dtype=torch.float64).view(4, 1, 2, 2) / 255.
        tt.assert_equal(data.images, expected)
        tt.assert_equal(data.labels, torch.tensor([0, 1, 2, 1]))
        self.assertEqual(data.num_classes, 3)

    def test_channels_extension(self):
        images = struct.pack('>IIIII', 0x804, 2, 2, 2, 2) + PIXELS
        labels = struct.pack('>II', 0x801, 2) + LABELS[:2]
        data = load_idx_dataset(self.fixture(images, labels))
        self.assertEqual(tuple(data.images.shape), (2, 2, 2, 2))

    def test_wrong_magic(self):
        with self.assertRaises(IdxMagicError):
            load_idx_dataset(self.fixture(images=struct.pack('>IIII', 0x801, 4, 2, 2) + PIXELS))
        with self.assertRaises(IdxMagicError):
            load_idx_dataset(self.fixture(labels=struct.pack('>II', 0x803, 4) + LABELS))

    def test_truncated(self):
        with self.assertRaises(IdxTruncatedError):
            load_idx_dataset(self.fixture(images=struct.pack('>IIII', 0x803, 4, 2, 2) + PIXELS[:-1]))
        with self.assertRaises(IdxTruncatedError):
            load_idx_dataset(self.fixture(images=struct.pack('>II', 0x803, 4)))

    def test_count_mismatch(self):
        with self.assertRaises(IdxCountMismatchError):
            load_idx_dataset(self.fixture(labels=struct.pack('>II', 0x801, 3) + LABELS[:3]))

    def test_errors_are_dataset_errors(self):
        for error in (IdxMagicError, IdxTruncatedError, IdxCountMismatchError):
            self.assertTrue(issubclass(error, DatasetError))

    def test_write_idx(self):
        pixels = np.arange(24, dtype=np.uint8).reshape(2, 3, 2, 2)
        path = os.path.join(self.directory.name, 'out.idx')
        write_idx(path, pixels)
        with open(path, 'rb') as f:
            self.assertEqual(f.read(4), b'\x00\x00\x08\x04')
        np.testing.assert_equal(read_idx_images(path), pixels)

    def test_write_idx_rejects_floats(self):
        with self.assertRaises(DatasetError):
            write_idx(os.path.join(self.directory.name, 'bad.idx'), np.zeros((2, 2, 2)))

    def test_synthetic_export_is_stable(self):
        digests = []
        for name in ('first.idx', 'second.idx'):
            path = os.path.join(self.directory.name, name)
            write_idx(path, synth_pixels(SynthSpec(n=1000, height=8, width=8, seed=3))[0])
            with open(path, 'rb') as f:
                digests.append(hashlib.sha256(f.read()).hexdigest())
        self.assertEqual(digests[0], digests[1])


class TestSynthDataset(unittest.TestCase):
    def test_same_seed_same_bytes(self):
        first, first_labels = synth_pixels(SynthSpec(n=50, height=8, width=8, seed=1))
        second, second_labels = synth_pixels(SynthSpec(n=50, height=8, width=8, seed=1))
        self.assertEqual(first.tobytes(), second.tobytes())
        np.testing.assert_equal(first_labels, second_labels)

    def test_different_seed(self):
        first, _ = synth_pixels(SynthSpec(n=20, height=8, width=8, seed=1))
        second, _ = synth_pixels(SynthSpec(n=20, height=8, width=8, seed=2))
        self.assertNotEqual(first.tobytes(), second.tobytes())

    def test_balanced(self):
        _, labels = synth_pixels(SynthSpec(n=1003, height=4, width=4))
        counts = np.bincount(labels, minlength=10)
        self.assertLessEqual(counts.max() - counts.min(), 1)

    def test_dataset(self):
        data = synth_dataset(SynthSpec(classes=4, n=40, height=6, width=6, channels=2))
        self.assertEqual(tuple(data.images.shape), (40, 2, 6, 6))
        self.assertEqual(data.num_classes, 4)
        np.testing.assert_allclose(data.images.mean(dim=(0, 2, 3)).numpy(), np.zeros(2), atol=1e-5)

    def test_ceiling(self):
        self.assertEqual(synth_ceiling(SynthSpec(n=1000, confusion=0.)), 100.)
        ceiling = synth_ceiling(SynthSpec(n=1000))
        self.assertLess(ceiling, 100.)
        self.assertGreater(ceiling, 94.)
        self.assertEqual(synth_ceiling(SynthSpec(classes=1, n=50)), 100.)

    def test_ceiling_keeps_labels(self):
        _, labels = synth_pixels(SynthSpec(n=30, height=4, width=4, confusion=0.))
        _, confused = synth_pixels(SynthSpec(n=30, height=4, width=4, confusion=0.5))
        np.testing.assert_equal(labels, confused)

    def test_noise_changes_pixels(self):
        quiet, _ = synth_pixels(SynthSpec(n=20, height=8, width=8, noise=0.))
        noisy, _ = synth_pixels(SynthSpec(n=20, height=8, width=8))
        self.assertNotEqual(quiet.tobytes(), noisy.tobytes())

    def test_invalid(self):
        for changes in (dict(classes=0), dict(n=-1), dict(noise=-0.1), dict(distractor=1.), dict(confusion=1.)):
            with self.assertRaises(ConfigError, msg=str(changes)):
                SynthSpec(**changes)


CONFIGS = os.path.join(os.path.dirname(__file__), '..', '..', 'configs')


class TestSynthLearnability(unittest.TestCase):
    '''The default synthetic problem is learnable in a few epochs but not saturated.'''
    @classmethod
    def setUpClass(cls):
        cls.directory = tempfile.TemporaryDirectory()
        settings = dict(synth_train=4000, synth_test=1000, epochs=10, checkpoint=False, quiet=True,
                        write_loss=False)
        cls.full = run_experiment(parse_config(dict(
            settings, kind='baseline', out=os.path.join(cls.directory.name, 'full'))))
        cls.low = run_experiment(parse_config(dict(
            settings, kind='lowdata_baseline', label_budget=250, out=os.path.join(cls.directory.name, 'low'))))

    @classmethod
    def tearDownClass(cls):
        cls.directory.cleanup()

    def top1(self, summary, kind):
        self.assertFalse(summary.failed, summary.failures)
        return summary.runs[kind][0]['top1']

    def test_learnable_within_ten_epochs(self):
        self.assertGreaterEqual(self.top1(self.full, 'baseline'), 90.)

    def test_below_ceiling(self):
        ceiling = synth_ceiling(SynthSpec(n=1000, seed=1))
        top1 = self.top1(self.full, 'baseline')
        self.assertLess(top1, 100.)
        self.assertLessEqual(top1, ceiling + 1.)

    def test_low_data_is_harder(self):
        self.assertLess(self.top1(self.low, 'lowdata_baseline'), self.top1(self.full, 'baseline') - 5.)


@unittest.skipUnless(os.environ.get('SLIMREG_SLOW'), "set SLIMREG_SLOW=1 to train the shipped configurations")
class TestScaleWidthOrdering(unittest.TestCase):
    '''GradAug beats its random-scale and random-width ablations, which do not hurt the baseline.'''
    def test_ordering(self):
        with tempfile.TemporaryDirectory() as directory:
            means = {}
            for kind in ('baseline', 'rand_scale', 'rand_width', 'gradaug'):
                config = load_config(os.path.join(CONFIGS, kind + '.toml'), out=directory, quiet=True,
                                     checkpoint=False)
                summary = run_experiment(config)
                self.assertFalse(summary.failed, summary.failures)
                means[kind] = summary.statistics(kind)['top1']['mean']
        ablations = max(means['rand_scale'], means['rand_width'])
        self.assertGreaterEqual(means['gradaug'], ablations, means)
        self.assertGreaterEqual(ablations, means['baseline'] - 0.3, means)
        self.assertGreaterEqual(means['gradaug'] - means['baseline'], 0.5, means)


class TestImageDataset(unittest.TestCase):
    def setUp(self):
        pixels = np.random.default_rng(0).integers(0, 256, size=(10, 3, 4, 4), dtype=np.uint8)
        self.data = ImageDataset.from_pixels(pixels, np.arange(10) % 2, mean=(0.5, 0.4, 0.3), std=(0.2, 0.2, 0.25),
                                             dtype=torch.float64)
        self.pixels = torch.from_numpy(pixels.astype(np.float64) / 255.)

    def test_denormalize(self):
        tt.assert_almost_equal(self.data.denormalize(self.data.images), self.pixels, decimal=12)
        tt.assert_almost_equal(self.data.normalize(self.pixels), self.data.images, decimal=12)

    def test_valid_range(self):
        lo, hi = self.data.valid_range
        np.testing.assert_allclose(lo, (-2.5, -2., -1.2))
        np.testing.assert_allclose(hi, (2.5, 3., 2.8))

    def test_batches(self):
        batches = list(self.data.batches(4, np.random.default_rng(0)))
        self.assertEqual([len(y) for _, y in batches], [4, 4, 2])
        seen = torch.cat([x for x, _ in batches])
        self.assertEqual(sorted(seen.sum(dim=(1, 2, 3)).tolist()), sorted(self.data.images.sum(dim=(1, 2, 3)).tolist()))

    def test_label_range(self):
        with self.assertRaises(DatasetError):
            ImageDataset(torch.zeros(2, 1, 2, 2), torch.tensor([0, 3]), 3, (0.,), (1.,))


class TestSplitLowData(unittest.TestCase):
    def setUp(self):
        self.train = synth_dataset(SynthSpec(n=1000, height=4, width=4, channels=1))
        self.test = synth_dataset(SynthSpec(n=20, height=4, width=4, channels=1, seed=1))

    def test_class_uniform(self):
        labeled, unlabeled, test = split_low_data(self.train, self.test, 250, seed=0)
        self.assertEqual(len(labeled), 250)
        np.testing.assert_equal(np.bincount(labeled.labels.numpy(), minlength=10), [25] * 10)
        self.assertEqual(len(unlabeled), 750)
        self.assertIs(test, self.test)

    def test_disjoint(self):
        labeled, unlabeled, _ = split_low_data(self.train, self.test, 100, seed=0)
        all_images = torch.cat([labeled.images, unlabeled.images]).flatten(1)
        self.assertEqual(len({tuple(row.tolist()) for row in all_images}), len({
            tuple(row.tolist()) for row in self.train.images.flatten(1)}))
        self.assertEqual(len(labeled) + len(unlabeled), len(self.train))

    def test_seeds_differ(self):
        splits = {tuple(split_low_data(self.train, self.test, 40, seed)[0].images.flatten().tolist())
                  for seed in range(5)}
        self.assertEqual(len(splits), 5)

    def test_budget_too_large(self):
        with self.assertRaises(ConfigError):
            split_low_data(self.train, self.test, 1001, seed=0)


if __name__ == '__main__':
    unittest.main()
