from abc import ABC, abstractmethod
import numpy as np
import torch
from slimreg.logging import DummyWriter
from .steps import gradaug_step, pseudo_label_step, standard_step


class Trainer(ABC):
    '''
    Owns a model, its optimizer and the random stream of a training run.

    A Trainer turns labeled batches into optimizer steps. Subclasses decide
    what a step is; ``train_epoch`` runs one pass over a sequence of batches
    and reports the mean losses.

    Args:
        model (SlimmableNetwork): The model to train.
        optimizer (torch.optim.Optimizer): Optimizer over the model's parameters.
        cfg (TrainConfig): Training configuration.
        rng (numpy.random.Generator): Source of all step randomness.
        writer (Writer): Used for logging.
    '''
    def __init__(self, model, optimizer, cfg, rng, writer=DummyWriter()):
        self.model = model
        self.optimizer = optimizer
        self.cfg = cfg
        self.rng = rng
        self.writer = writer
        self.steps = 0

    @abstractmethod
    def step(self, x, y):
        '''
        Perform one optimizer step.

        Args:
            x (torch.Tensor): [N, C, H, W] images.
            y (torch.Tensor): [N] labels.

        Returns:
            (float, float): loss_f and the mean sub-network loss (0 without sub-networks).
        '''

    def train_epoch(self, batches):
        self.model.train()
        losses = []
        for x, y in batches:
            losses.append(self.step(x, y))
            self.steps += 1
        losses = np.array(losses).reshape(-1, 2)
        if len(losses) == 0:
            return 0., 0.
        return float(losses[:, 0].mean()), float(losses[:, 1].mean())


class StandardTrainer(Trainer):
    '''Trains the full network alone.'''
    def step(self, x, y):
        return standard_step(self.model, self.optimizer, x, y, self.cfg, self.rng, self.writer), 0.


class GradAugTrainer(Trainer):
    '''Trains the full network together with cfg.subnets sub-networks per step.'''
    def step(self, x, y):
        _, metrics = gradaug_step(self.model, self.optimizer, x, y, self.cfg, self.rng, self.writer)
        return metrics.loss_f, metrics.mean_loss_sub


class SemiSupervisedTrainer(Trainer):
    '''
    GradAug with pseudo-labels: every step also draws
    cfg.unlabeled_batch_size images from an unlabeled pool.

    Args:
        unlabeled (torch.Tensor): [M, C, H, W] pool of unlabeled images.
    '''
    def __init__(self, model, optimizer, cfg, rng, unlabeled, writer=DummyWriter()):
        super().__init__(model, optimizer, cfg, rng, writer=writer)
        self.unlabeled = unlabeled

    def _unlabeled_batch(self):
        size = min(self.cfg.unlabeled_batch_size, len(self.unlabeled))
        if size == 0:
            return self.unlabeled[:0]
        indices = np.sort(self.rng.choice(len(self.unlabeled), size=size, replace=False))
        return self.unlabeled[torch.as_tensor(indices)]

    def step(self, x, y):
        unlabeled = self._unlabeled_batch()
        _, metrics = pseudo_label_step(self.model, self.optimizer, x, y, unlabeled, self.cfg, self.rng, self.writer)
        return metrics.loss_f, metrics.mean_loss_sub


def build_trainer(model, optimizer, cfg, rng, unlabeled=None, writer=DummyWriter()):
    '''Pick the trainer for a configuration: semi-supervised if an unlabeled pool is given.'''
    if unlabeled is not None:
        return SemiSupervisedTrainer(model, optimizer, cfg, rng, unlabeled, writer=writer)
    if cfg.subnets == 0:
        return StandardTrainer(model, optimizer, cfg, rng, writer=writer)
    return GradAugTrainer(model, optimizer, cfg, rng, writer=writer)
