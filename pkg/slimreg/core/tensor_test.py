import math
import unittest
import numpy as np
import torch
import torch_testing as tt
from torch.nn import functional as F
from slimreg.core import (
    BNMode,
    BatchNormState,
    BackwardError,
    DimensionError,
    DistributionError,
    LabelError,
    backward,
    batchnorm,
    conv2d,
    global_avg_pool,
    grad_check,
    linear,
    relu,
    soft_target_loss,
    softmax_cross_entropy,
)

DOUBLE = torch.float64


def naive_conv2d(x, weight, bias, stride, padding):
    x = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    n, c_in, h, w = x.shape
    c_out, _, k, _ = weight.shape
    h_out = (h - k) // stride + 1
    w_out = (w - k) // stride + 1
    out = np.zeros((n, c_out, h_out, w_out))
    for b in range(n):
        for o in range(c_out):
            for i in range(h_out):
                for j in range(w_out):
                    total = bias[o]
                    for c in range(c_in):
                        for u in range(k):
                            for v in range(k):
                                total += x[b, c, i * stride + u, j * stride + v] * weight[o, c, u, v]
                    out[b, o, i, j] = total
    return out


def bn_state(channels):
    return BatchNormState(torch.zeros(channels, dtype=DOUBLE), torch.ones(channels, dtype=DOUBLE))


class TestConv2d(unittest.TestCase):
    def setUp(self):
        torch.manual_seed(0)

    def test_all_ones(self):
        x = torch.ones(1, 1, 3, 3, dtype=DOUBLE)
        weight = torch.ones(1, 1, 3, 3, dtype=DOUBLE)
        out = conv2d(x, weight, torch.zeros(1, dtype=DOUBLE), stride=1, padding=1)
        self.assertEqual(out.shape, (1, 1, 3, 3))
        self.assertEqual(out[0, 0, 1, 1].item(), 9.)

    def test_identity_kernel(self):
        x = torch.randn(2, 1, 4, 4, dtype=DOUBLE)
        out = conv2d(x, torch.ones(1, 1, 1, 1, dtype=DOUBLE), torch.zeros(1, dtype=DOUBLE))
        tt.assert_equal(out, x)

    def test_matches_naive_oracle(self):
        x = torch.randn(2, 3, 5, 5, dtype=DOUBLE)
        weight = torch.randn(4, 3, 3, 3, dtype=DOUBLE)
        bias = torch.randn(4, dtype=DOUBLE)
        for stride, padding in ((1, 1), (2, 1), (1, 0)):
            out = conv2d(x, weight, bias, stride=stride, padding=padding)
            expected = naive_conv2d(x.numpy(), weight.numpy(), bias.numpy(), stride, padding)
            np.testing.assert_allclose(out.numpy(), expected, rtol=0, atol=1e-10)

    def test_channel_mismatch(self):
        with self.assertRaises(DimensionError):
            conv2d(torch.randn(1, 2, 4, 4), torch.randn(3, 3, 3, 3))

    def test_exact_stride(self):
        x = torch.randn(1, 1, 4, 4)
        weight = torch.randn(1, 1, 3, 3)
        self.assertEqual(conv2d(x, weight, stride=2).shape, (1, 1, 1, 1))
        with self.assertRaises(DimensionError):
            conv2d(x, weight, stride=2, exact=True)


class TestBatchNorm(unittest.TestCase):
    def setUp(self):
        torch.manual_seed(1)

    def test_zero_variance_channel(self):
        x = torch.full((4, 1, 2, 2), 3., dtype=DOUBLE)
        out = batchnorm(x, torch.ones(1, dtype=DOUBLE), torch.zeros(1, dtype=DOUBLE),
                        bn_state(1), BNMode.TRAIN_TRACKING)
        self.assertTrue(torch.isfinite(out).all())
        tt.assert_almost_equal(out, torch.zeros_like(out))

    def test_frozen_stats_leaves_buffers(self):
        state = bn_state(3)
        state.running_mean.uniform_()
        mean_before = state.running_mean.clone()
        var_before = state.running_var.clone()
        gamma = torch.ones(3, dtype=DOUBLE, requires_grad=True)
        beta = torch.zeros(3, dtype=DOUBLE, requires_grad=True)
        for _ in range(5):
            x = torch.randn(8, 3, 4, 4, dtype=DOUBLE) * 5 + 2
            out = batchnorm(x, gamma, beta, state, BNMode.TRAIN_FROZEN_STATS)
            backward((out * x).sum())
        tt.assert_equal(state.running_mean, mean_before)
        tt.assert_equal(state.running_var, var_before)
        self.assertIsNotNone(gamma.grad)
        self.assertIsNotNone(beta.grad)

    def test_tracking_ema(self):
        state = bn_state(2)
        state.running_mean.copy_(torch.tensor([1., -1.], dtype=DOUBLE))
        x = torch.randn(6, 2, 3, 3, dtype=DOUBLE)
        batch_mean = x.mean(dim=(0, 2, 3))
        batchnorm(x, torch.ones(2, dtype=DOUBLE), torch.zeros(2, dtype=DOUBLE), state, BNMode.TRAIN_TRACKING)
        expected = 0.9 * torch.tensor([1., -1.], dtype=DOUBLE) + 0.1 * batch_mean
        tt.assert_almost_equal(state.running_mean, expected, decimal=12)

    def test_eval_defined_before_training(self):
        x = torch.randn(2, 2, 3, 3, dtype=DOUBLE)
        out = batchnorm(x, torch.ones(2, dtype=DOUBLE), torch.zeros(2, dtype=DOUBLE), bn_state(2), BNMode.EVAL)
        tt.assert_almost_equal(out, x / math.sqrt(1 + 1e-5), decimal=12)

    def test_channel_mismatch(self):
        with self.assertRaises(DimensionError):
            batchnorm(torch.randn(2, 3, 2, 2), torch.ones(2), torch.zeros(2), bn_state(2), BNMode.EVAL)


class TestLinear(unittest.TestCase):
    def test_identity(self):
        x = torch.randn(3, 4, dtype=DOUBLE)
        tt.assert_equal(linear(x, torch.eye(4, dtype=DOUBLE), torch.zeros(4, dtype=DOUBLE)), x)

    def test_hand_computed(self):
        out = linear(torch.tensor([[1., 2.]]), torch.tensor([[3., 4.]]), torch.tensor([5.]))
        tt.assert_equal(out, torch.tensor([[16.]]))

    def test_matches_naive_matmul(self):
        torch.manual_seed(2)
        x = torch.randn(5, 7, dtype=DOUBLE)
        weight = torch.randn(3, 7, dtype=DOUBLE)
        bias = torch.randn(3, dtype=DOUBLE)
        expected = np.zeros((5, 3))
        for n in range(5):
            for o in range(3):
                expected[n, o] = bias[o].item() + sum(x[n, i].item() * weight[o, i].item() for i in range(7))
        np.testing.assert_allclose(linear(x, weight, bias).numpy(), expected, rtol=0, atol=1e-12)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            linear(torch.randn(2, 3), torch.randn(4, 2))


class TestActivations(unittest.TestCase):
    def test_relu(self):
        x = torch.tensor([-1., 0., 2.], requires_grad=True)
        out = relu(x)
        tt.assert_equal(out, torch.tensor([0., 0., 2.]))
        backward(out.sum())
        tt.assert_equal(x.grad, torch.tensor([0., 0., 1.]))

    def test_pool_constant(self):
        x = torch.full((2, 3, 4, 5), 1.5)
        tt.assert_equal(global_avg_pool(x), torch.full((2, 3), 1.5))

    def test_pool_gradient(self):
        torch.manual_seed(3)
        x = torch.randn(2, 3, 4, 4, dtype=DOUBLE, requires_grad=True)
        weights = torch.randn(2, 3, dtype=DOUBLE)
        report = grad_check(lambda: (global_avg_pool(x) * weights).sum(), {'x': x})
        self.assertLess(report['x'], 1e-6)
        tt.assert_almost_equal(x.grad, weights[:, :, None, None].expand(2, 3, 4, 4) / 16, decimal=12)


class TestLosses(unittest.TestCase):
    def setUp(self):
        torch.manual_seed(4)

    def test_uniform_logits(self):
        loss = softmax_cross_entropy(torch.zeros(4, 10, dtype=DOUBLE), torch.tensor([0, 3, 5, 9]))
        self.assertAlmostEqual(loss.item(), math.log(10), places=6)

    def test_confident_logits(self):
        logits = torch.zeros(2, 3, dtype=DOUBLE)
        logits[0, 1] = 1000
        logits[1, 2] = 1000
        loss = softmax_cross_entropy(logits, torch.tensor([1, 2]))
        self.assertAlmostEqual(loss.item(), 0., places=10)

    def test_cross_entropy_direct_formula(self):
        logits = torch.randn(6, 5, dtype=DOUBLE)
        labels = torch.tensor([0, 1, 2, 3, 4, 0])
        expected = np.mean([
            -logits[i, labels[i]].item() + math.log(sum(math.exp(v) for v in logits[i].tolist()))
            for i in range(6)
        ])
        self.assertAlmostEqual(softmax_cross_entropy(logits, labels).item(), expected, delta=1e-10)

    def test_label_out_of_range(self):
        with self.assertRaises(LabelError):
            softmax_cross_entropy(torch.zeros(2, 3), torch.tensor([0, 3]))
        with self.assertRaises(LabelError):
            softmax_cross_entropy(torch.zeros(2, 3), torch.tensor([-1, 0]))

    def test_softmax_rows(self):
        probs = F.softmax(torch.randn(10, 7, dtype=DOUBLE) * 30, dim=1)
        self.assertTrue((probs >= 0).all())
        np.testing.assert_allclose(probs.sum(dim=1).numpy(), np.ones(10), atol=1e-6)

    def test_soft_target_entropy_at_equality(self):
        logits = torch.randn(4, 6, dtype=DOUBLE)
        probs = F.softmax(logits, dim=1)
        entropy = -(probs * probs.log()).sum(dim=1).mean()
        self.assertAlmostEqual(soft_target_loss(logits, probs).item(), entropy.item(), delta=1e-12)

    def test_soft_target_one_hot(self):
        logits = torch.randn(5, 4, dtype=DOUBLE)
        labels = torch.tensor([0, 3, 1, 1, 2])
        target = F.one_hot(labels, 4).to(DOUBLE)
        self.assertAlmostEqual(
            soft_target_loss(logits, target).item(),
            softmax_cross_entropy(logits, labels).item(),
            delta=1e-12
        )

    def test_soft_target_direct_formula(self):
        logits = torch.randn(3, 4, dtype=DOUBLE)
        target = F.softmax(torch.randn(3, 4, dtype=DOUBLE), dim=1)
        expected = 0.
        for i in range(3):
            norm = math.log(sum(math.exp(v) for v in logits[i].tolist()))
            expected -= sum(target[i, k].item() * (logits[i, k].item() - norm) for k in range(4))
        self.assertAlmostEqual(soft_target_loss(logits, target).item(), expected / 3, delta=1e-10)

    def test_soft_target_detaches_targets(self):
        target_logits = torch.randn(3, 4, dtype=DOUBLE, requires_grad=True)
        student = torch.randn(3, 4, dtype=DOUBLE, requires_grad=True)
        backward(soft_target_loss(student, F.softmax(target_logits, dim=1)))
        self.assertIsNone(target_logits.grad)
        self.assertIsNotNone(student.grad)

    def test_soft_target_rejects_unnormalized(self):
        with self.assertRaises(DistributionError):
            soft_target_loss(torch.zeros(2, 3), torch.full((2, 3), 0.5))


class TestBackward(unittest.TestCase):
    def setUp(self):
        torch.manual_seed(5)

    def test_sum(self):
        x = torch.randn(3, 4, dtype=DOUBLE, requires_grad=True)
        backward(x.sum())
        tt.assert_equal(x.grad, torch.ones(3, 4, dtype=DOUBLE))

    def test_twice_doubles(self):
        x = torch.randn(5, dtype=DOUBLE, requires_grad=True)
        loss = (x ** 3).sum()
        backward(loss, retain_graph=True)
        once = x.grad.clone()
        backward(loss)
        tt.assert_equal(x.grad, 2 * once)

    def test_non_scalar(self):
        x = torch.randn(3, requires_grad=True)
        with self.assertRaises(BackwardError):
            backward(x * 2)

    def test_additive_accumulation(self):
        x = torch.randn(4, 3, dtype=DOUBLE)
        weight = torch.randn(2, 3, dtype=DOUBLE, requires_grad=True)
        first = lambda: linear(x, weight).pow(2).sum()
        second = lambda: linear(x, weight).tanh().sum()
        backward(first())
        backward(second())
        accumulated = weight.grad.clone()
        weight.grad = None
        backward(first() + second())
        np.testing.assert_allclose(accumulated.numpy(), weight.grad.numpy(), rtol=1e-6)

    def test_mlp_finite_differences(self):
        x = torch.randn(6, 4, dtype=DOUBLE)
        labels = torch.tensor([0, 1, 2, 0, 1, 2])
        params = {
            'w1': torch.randn(5, 4, dtype=DOUBLE, requires_grad=True),
            'b1': torch.randn(5, dtype=DOUBLE, requires_grad=True),
            'w2': torch.randn(3, 5, dtype=DOUBLE, requires_grad=True),
            'b2': torch.randn(3, dtype=DOUBLE, requires_grad=True),
        }

        def loss_fn():
            hidden = relu(linear(x, params['w1'], params['b1']))
            return softmax_cross_entropy(linear(hidden, params['w2'], params['b2']), labels)

        report = grad_check(loss_fn, params)
        self.assertEqual(set(report), set(params))
        self.assertTrue(report.passed(1e-4), report)


if __name__ == '__main__':
    unittest.main()
