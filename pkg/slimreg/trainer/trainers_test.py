import unittest
import numpy as np
import torch
from slimreg.nn import build_model
from slimreg.optim import build_optimizer
from slimreg.trainer import (
    GradAugTrainer,
    SemiSupervisedTrainer,
    StandardTrainer,
    TrainConfig,
    build_trainer,
)


class TestTrainers(unittest.TestCase):
    def setUp(self):
        torch.manual_seed(0)
        self.model = build_model('small_cnn', num_classes=3, widths=(4, 8, 8))
        self.optimizer = build_optimizer(self.model)
        self.batches = [(torch.randn(4, 3, 8, 8), torch.tensor([0, 1, 2, 0])) for _ in range(3)]

    def test_build_trainer(self):
        rng = np.random.default_rng(0)
        self.assertIsInstance(build_trainer(self.model, self.optimizer, TrainConfig(subnets=0), rng),
                              StandardTrainer)
        self.assertIsInstance(build_trainer(self.model, self.optimizer, TrainConfig(), rng), GradAugTrainer)
        self.assertIsInstance(
            build_trainer(self.model, self.optimizer, TrainConfig(), rng, unlabeled=torch.randn(5, 3, 8, 8)),
            SemiSupervisedTrainer
        )

    def test_gradaug_epoch(self):
        trainer = GradAugTrainer(self.model, self.optimizer, TrainConfig(subnets=2, lower_bound=0.5),
                                 np.random.default_rng(1))
        loss_f, loss_sub = trainer.train_epoch(self.batches)
        self.assertGreater(loss_f, 0.)
        self.assertGreater(loss_sub, 0.)

    def test_standard_epoch(self):
        trainer = StandardTrainer(self.model, self.optimizer, TrainConfig(subnets=0), np.random.default_rng(2))
        loss_f, loss_sub = trainer.train_epoch(self.batches)
        self.assertGreater(loss_f, 0.)
        self.assertEqual(loss_sub, 0.)

    def test_semi_supervised_epoch(self):
        cfg = TrainConfig(subnets=1, unlabeled_batch_size=3)
        trainer = SemiSupervisedTrainer(self.model, self.optimizer, cfg, np.random.default_rng(3),
                                        torch.randn(10, 3, 8, 8))
        self.assertEqual(len(trainer._unlabeled_batch()), 3)  # pylint: disable=protected-access
        loss_f, loss_sub = trainer.train_epoch(self.batches)
        self.assertGreater(loss_f, 0.)
        self.assertGreater(loss_sub, 0.)

    def test_empty_epoch(self):
        trainer = StandardTrainer(self.model, self.optimizer, TrainConfig(subnets=0), np.random.default_rng(4))
        self.assertEqual(trainer.train_epoch([]), (0., 0.))


if __name__ == '__main__':
    unittest.main()
