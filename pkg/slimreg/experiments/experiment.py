from timeit import default_timer as timer
import os
import numpy as np
import torch
from slimreg.core import set_precision
from slimreg.evaluation import corruption_eval, evaluate, fgsm_eval
from slimreg.nn import DummyCheckpointer, EpochCheckpointer, build_model
from slimreg.optim import EpochScheduler, build_optimizer
from slimreg.trainer import MetricsRecord, build_trainer
from .metrics import mean_std
from .writer import ExperimentWriter


class Experiment:
    '''
    Trains one model with one TrainConfig and seed, then evaluates it.

    Args:
        label (str): Name of the run, used in console output.
        cfg (TrainConfig): Training configuration; ``cfg.seed`` seeds the run.
        train_set (ImageDataset): Labeled training data.
        test_set (ImageDataset): Evaluation data.
        log_dir (str): Directory for logs, metrics and checkpoints.
        model (str): Architecture preset.
        model_options (dict): Extra arguments of the architecture preset.
        unlabeled (ImageDataset, optional): Pool for semi-supervised training.
        checkpoint (bool): Save a checkpoint after every epoch.
        quiet (bool): If False, print a line per epoch.
        write_loss (bool): Log training losses and schedules.
        wall_time (bool): Store the epoch duration in the metrics records. Off,
            the records hold 0. so reruns write identical files; tensorboard
            always gets the measured time.

    The default tensor dtype follows cfg.precision until close() restores it.
    '''
    def __init__(
            self,
            label,
            cfg,
            train_set,
            test_set,
            log_dir,
            model='small_cnn',
            model_options=None,
            unlabeled=None,
            checkpoint=True,
            quiet=False,
            write_loss=True,
            wall_time=False,
    ):
        self.label = label
        self.cfg = cfg
        self.log_dir = log_dir
        self._quiet = quiet
        self._wall_time = wall_time
        self._epoch = 0
        self._default_dtype = torch.get_default_dtype()
        dtype = set_precision(cfg.precision)
        self._writer = self._make_writer(log_dir, write_loss)
        self.train_set = train_set.to(dtype)
        self.test_set = test_set.to(dtype)
        self.rng = np.random.default_rng(cfg.seed)
        self.model = build_model(
            model,
            dtype=dtype,
            num_classes=train_set.num_classes,
            in_channels=train_set.channels,
            **(model_options or {})
        )
        self.optimizer = build_optimizer(
            self.model,
            cfg.optimizer,
            lr=cfg.lr,
            momentum=cfg.momentum,
            weight_decay=cfg.weight_decay,
            decay_norm=cfg.decay_norm,
        )
        self.scheduler = EpochScheduler(self.optimizer, cfg.lr_schedule, cfg.epochs, writer=self._writer)
        self.trainer = build_trainer(
            self.model,
            self.optimizer,
            cfg,
            self.rng,
            unlabeled=None if unlabeled is None else unlabeled.to(dtype).images,
            writer=self._writer,
        )
        self.checkpointer = EpochCheckpointer() if checkpoint else DummyCheckpointer()
        self.checkpointer.init(self.model, log_dir)

    @property
    def epoch(self):
        return self._epoch

    @property
    def step(self):
        return self.trainer.steps

    def train(self, epochs=None):
        '''
        Train for ``epochs`` (default cfg.epochs) passes over the training set,
        evaluating on the test set after each.

        Returns:
            list(MetricsRecord): One test record per epoch.
        '''
        records = []
        for _ in range(self.cfg.epochs if epochs is None else epochs):
            start_time = timer()
            lr = self.scheduler.lr
            loss_f, loss_sub = self.trainer.train_epoch(self.train_set.batches(self.cfg.batch_size, self.rng))
            self.scheduler.step()
            top1, top5 = evaluate(self.model, self.test_set)
            elapsed = timer() - start_time
            record = MetricsRecord(self._epoch, 'test', top1, top5, loss_f, loss_sub, lr,
                                   elapsed if self._wall_time else 0.)
            self._log_epoch(record)
            self._writer.add_scalar('wall_time', elapsed, step="epoch")
            self.checkpointer({'label': self.label, 'seed': self.cfg.seed, 'epoch': self._epoch})
            records.append(record)
            self._epoch += 1
        return records

    def test(self, suite=('clean',), epsilons=None, corruptions=None, severities=None):
        '''
        Run the final evaluations.

        Returns:
            dict: "top1"/"top5" always; "fgsm" maps epsilon to accuracy and
            "corruption" holds the clean error, the mean error and one error per
            kind and severity, when requested.
        '''
        top1, top5 = evaluate(self.model, self.test_set)
        results = {'top1': top1, 'top5': top5}
        if 'fgsm' in suite:
            kwargs = {} if epsilons is None else {'epsilons': epsilons}
            results['fgsm'] = fgsm_eval(self.model, self.test_set, **kwargs)
            for epsilon, accuracy in results['fgsm'].items():
                self._writer.add_evaluation('fgsm/{}'.format(epsilon), accuracy)
        if 'corruption' in suite:
            kwargs = {}
            if corruptions is not None:
                kwargs['kinds'] = corruptions
            if severities is not None:
                kwargs['severities'] = severities
            report = corruption_eval(self.model, self.test_set, rng=np.random.default_rng(self.cfg.seed), **kwargs)
            report.write_csv(os.path.join(self.log_dir, 'corruption.csv'))
            self._writer.add_evaluation('corruption/mean_error', report.mean_error)
            for kind in report.kinds:
                mean, std = mean_std([error for (k, _), error in report.errors.items() if k == kind])
                self._writer.add_summary('corruption/' + kind, mean, std)
            results['corruption'] = {
                'clean_error': report.clean_error,
                'mean_error': report.mean_error,
                'errors': {'{}/{}'.format(kind, severity): error for (kind, severity), error in report.errors.items()},
            }
        self._log_test(results)
        return results

    def close(self):
        torch.set_default_dtype(self._default_dtype)
        close = getattr(self._writer, 'close', None)
        if close is not None:
            close()

    def _log_epoch(self, record):
        if not self._quiet:
            print('{} seed: {}, epoch: {}, top1: {:.2f}, top5: {:.2f}, loss_f: {:.4f}, loss_sub: {:.4f}, lr: {:.5f}'
                  .format(self.label, self.cfg.seed, record.epoch, record.top1, record.top5, record.loss_f,
                          record.mean_loss_sub, record.lr))
        self._writer.add_record(record)
        self._writer.add_evaluation('top1', record.top1, step="epoch")
        self._writer.add_evaluation('top5', record.top5, step="epoch")

    def _log_test(self, results):
        if not self._quiet:
            print('{} seed: {}, test top1: {:.2f}, top5: {:.2f}'.format(
                self.label, self.cfg.seed, results['top1'], results['top5']))

    def _make_writer(self, log_dir, write_loss):
        return ExperimentWriter(self, log_dir, loss=write_loss)
