import os
import tempfile
import unittest
from slimreg.core import ConfigError
from slimreg.experiments import ExperimentConfig, load_config, parse_config


class TestLoadConfig(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def write(self, text):
        path = os.path.join(self.directory.name, 'experiment.toml')
        with open(path, 'w') as f:
            f.write(text)
        return path

    def test_load(self):
        path = self.write(
            'kind = "gradaug_cutmix"\n'
            'subnets = 2\n'
            'seeds = [1, 2]\n'
            'suite = ["clean", "fgsm"]\n'
            'model_options = { widths = [8, 16, 16] }\n'
        )
        config = load_config(path)
        self.assertEqual(config.kind, 'gradaug_cutmix')
        self.assertEqual(config.train.subnets, 2)
        self.assertEqual(config.train.mix, 'cutmix')
        self.assertEqual(config.train.mix_prob, 0.5)
        self.assertEqual(config.seeds, (1, 2))
        self.assertEqual(config.suite, ('clean', 'fgsm'))
        self.assertEqual(config.model_options, {'widths': [8, 16, 16]})

    def test_unknown_key(self):
        with self.assertRaises(ConfigError):
            load_config(self.write('kind = "gradaug"\nsubnet = 2\n'))

    def test_tables_rejected(self):
        with self.assertRaises(ConfigError):
            load_config(self.write('[train]\nsubnets = 2\n'))

    def test_invalid_toml(self):
        with self.assertRaises(ConfigError):
            load_config(self.write('kind = \n'))

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_config(os.path.join(self.directory.name, 'missing.toml'))

    def test_overrides(self):
        config = load_config(self.write('kind = "baseline"\nseeds = [1, 2]\n'), seeds=[7])
        self.assertEqual(config.seeds, (7,))
        self.assertEqual(config.train.subnets, 0)


class TestShippedConfigs(unittest.TestCase):
    def test_every_config_loads(self):
        directory = os.path.join(os.path.dirname(__file__), '..', '..', 'configs')
        names = sorted(name for name in os.listdir(directory) if name.endswith('.toml'))
        self.assertIn('gradaug.toml', names)
        for name in names:
            with self.subTest(config=name):
                config = load_config(os.path.join(directory, name))
                self.assertEqual(len(config.seeds), 3)


class TestExperimentConfig(unittest.TestCase):
    def test_defaults(self):
        config = ExperimentConfig()
        self.assertEqual(config.kind, 'gradaug')
        self.assertEqual(config.train.subnets, 3)
        self.assertEqual(config.train.lower_bound, 0.8)
        self.assertFalse(config.semi_supervised)
        self.assertTrue(ExperimentConfig(kind='gradaug_semi').semi_supervised)
        self.assertFalse(config.wall_time)
        self.assertEqual(config.synth_spec().confusion, 0.03)

    def test_synthetic_difficulty(self):
        spec = parse_config(dict(synth_noise=0., synth_distractor=0.2, synth_confusion=0.)).synth_spec()
        self.assertEqual((spec.noise, spec.distractor, spec.confusion), (0., 0.2, 0.))

    def test_unlabeled_batch_follows_batch_size(self):
        config = parse_config(dict(kind='gradaug_semi', batch_size=20))
        self.assertEqual(config.train.unlabeled_batch_size, 20)
        config = parse_config(dict(kind='gradaug_semi', batch_size=20, unlabeled_batch_size=5))
        self.assertEqual(config.train.unlabeled_batch_size, 5)

    def test_invalid(self):
        for settings in (
                dict(kind='gradmix'),
                dict(seeds=[]),
                dict(suite=['pgd']),
                dict(dataset='idx'),
                dict(model='resnet50'),
                dict(label_budget=-1),
                dict(label_budget=5000),
                dict(epsilons=[-0.1]),
                dict(severities=[6]),
                dict(lower_bound=0.),
                dict(synth_noise=-0.1),
                dict(synth_distractor=1.),
                dict(synth_confusion=1.5),
        ):
            with self.assertRaises(ConfigError, msg=str(settings)):
                parse_config(settings)

    def test_sweeps(self):
        config = parse_config(dict(sweep_subnets=[1, 2], sweep_lower_bound=[0.5]))
        runs = config.runs()
        self.assertEqual([label for label, _ in runs], ['gradaug_n1_a0.5', 'gradaug_n2_a0.5'])
        self.assertEqual([(cfg.subnets, cfg.lower_bound) for _, cfg in runs], [(1, 0.5), (2, 0.5)])

    def test_single_run(self):
        runs = parse_config(dict(kind='baseline')).runs()
        self.assertEqual(len(runs), 1)
        self.assertEqual(runs[0][0], 'baseline')


if __name__ == '__main__':
    unittest.main()
