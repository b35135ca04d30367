import unittest
import torch
from slimreg.core import (
    BNMode,
    BatchNormState,
    batchnorm,
    conv2d,
    global_avg_pool,
    grad_check,
    linear,
    relu,
    softmax_cross_entropy,
)

DOUBLE = torch.float64


class TestGradCheck(unittest.TestCase):
    def setUp(self):
        torch.manual_seed(0)
        self.x = torch.randn(4, 2, 6, 6, dtype=DOUBLE)
        self.labels = torch.tensor([0, 1, 2, 1])
        self.params = {
            'conv.weight': torch.randn(3, 2, 3, 3, dtype=DOUBLE, requires_grad=True),
            'conv.bias': torch.randn(3, dtype=DOUBLE, requires_grad=True),
            'bn.weight': (1 + 0.1 * torch.randn(3, dtype=DOUBLE)).requires_grad_(),
            'bn.bias': (0.1 * torch.randn(3, dtype=DOUBLE)).requires_grad_(),
            'fc.weight': torch.randn(3, 3, dtype=DOUBLE, requires_grad=True),
            'fc.bias': torch.randn(3, dtype=DOUBLE, requires_grad=True),
        }
        self.state = BatchNormState(torch.zeros(3, dtype=DOUBLE), torch.ones(3, dtype=DOUBLE))

    def loss(self, mode):
        p = self.params
        out = conv2d(self.x, p['conv.weight'], p['conv.bias'], padding=1)
        out = relu(batchnorm(out, p['bn.weight'], p['bn.bias'], self.state, mode))
        return softmax_cross_entropy(linear(global_avg_pool(out), p['fc.weight'], p['fc.bias']), self.labels)

    def test_composite(self):
        report = grad_check(lambda: self.loss(BNMode.TRAIN_TRACKING), self.params)
        self.assertEqual(len(report), 6)
        self.assertTrue(report.passed(1e-4), report)

    def test_frozen_stats_affine_only(self):
        affine = {k: v for k, v in self.params.items() if k.startswith('bn.')}
        mean_before = self.state.running_mean.clone()
        report = grad_check(lambda: self.loss(BNMode.TRAIN_FROZEN_STATS), affine)
        self.assertEqual(set(report), {'bn.weight', 'bn.bias'})
        self.assertTrue(report.passed(1e-4), report)
        self.assertTrue(torch.equal(self.state.running_mean, mean_before))

    def test_no_parameters(self):
        report = grad_check(lambda: torch.tensor(0.), {})
        self.assertEqual(len(report), 0)
        self.assertEqual(report.max_error, 0.)


if __name__ == '__main__':
    unittest.main()
