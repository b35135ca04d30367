import unittest
import torch
import torch_testing as tt
from slimreg.core import ConfigError
from slimreg.nn import build_model
from slimreg.evaluation import fgsm_attack, fgsm_eval
from slimreg.evaluation.accuracy_test import dataset, pooled_linear

DOUBLE = torch.float64


class TestFgsmAttack(unittest.TestCase):
    def setUp(self):
        torch.manual_seed(0)
        self.model = build_model('small_cnn', dtype=DOUBLE, num_classes=3, widths=(4, 8, 8))
        self.x = torch.rand(6, 3, 8, 8, dtype=DOUBLE)
        self.y = torch.arange(6) % 3

    def test_zero_epsilon(self):
        tt.assert_equal(fgsm_attack(self.model, self.x, self.y, 0.), self.x)

    def test_box_constraint(self):
        for epsilon in (0.01, 0.1, 0.5):
            adversarial = fgsm_attack(self.model, self.x, self.y, epsilon)
            self.assertLessEqual((adversarial - self.x).abs().max().item(), epsilon + 1e-12)
            self.assertGreaterEqual(adversarial.min().item(), 0.)
            self.assertLessEqual(adversarial.max().item(), 1.)

    def test_per_channel_range(self):
        lo, hi = (0., 0.1, 0.2), (0.5, 0.6, 0.7)
        x = torch.full((2, 3, 4, 4), 0.3, dtype=DOUBLE)
        adversarial = fgsm_attack(self.model, x, torch.tensor([0, 1]), 1., valid_range=(lo, hi))
        for c in range(3):
            self.assertGreaterEqual(adversarial[:, c].min().item(), lo[c])
            self.assertLessEqual(adversarial[:, c].max().item(), hi[c])

    def test_leaves_parameter_gradients(self):
        fgsm_attack(self.model, self.x, self.y, 0.1)
        for param in self.model.parameters():
            self.assertIsNone(param.grad)

    def test_negative_epsilon(self):
        with self.assertRaises(ConfigError):
            fgsm_attack(self.model, self.x, self.y, -0.1)


class TestFgsmEval(unittest.TestCase):
    def test_accuracy_does_not_increase(self):
        torch.manual_seed(1)
        model = pooled_linear(3, 2)
        images = torch.randn(200, 3, 4, 4, dtype=DOUBLE) * 0.1
        labels = (images.mean(dim=(1, 2, 3)) > 0).long()
        with torch.no_grad():
            model.layers[1].weight.copy_(torch.tensor([[-1., -1., -1.], [1., 1., 1.]], dtype=DOUBLE))
            model.layers[1].bias.zero_()
        data = dataset(images, labels, 2)
        results = fgsm_eval(model, data, valid_range=(-10., 10.))
        accuracies = [results[epsilon] for epsilon in sorted(results)]
        self.assertEqual(sorted(results), [0., 0.05, 0.10, 0.15])
        self.assertEqual(accuracies[0], 100.)
        for before, after in zip(accuracies, accuracies[1:]):
            self.assertLessEqual(after, before)
        self.assertLess(accuracies[-1], accuracies[0])


if __name__ == '__main__':
    unittest.main()
