'''
Logging interface shared by trainers, evaluators and experiments.

Every component that reports numbers takes a ``writer`` argument defaulting to
a DummyWriter, so library code never needs to know where the numbers go.
Steps are either the name of a counter kept by the writer ("step" for
optimizer updates, "epoch" for passes over the data) or an explicit integer.
'''
from abc import ABC, abstractmethod


class Writer(ABC):
    log_dir = "runs"

    @abstractmethod
    def add_loss(self, name, value, step="step"):
        '''Log a training loss under ``loss/<name>``.'''

    @abstractmethod
    def add_evaluation(self, name, value, step="epoch"):
        '''Log an evaluation metric (accuracy, error) under ``evaluation/<name>``.'''

    @abstractmethod
    def add_scalar(self, name, value, step="step"):
        '''
        Log an arbitrary scalar.

        Args:
            name (str): The tag to associate with the scalar.
            value (number): The value at the current step.
            step (str or int, optional): Counter name or explicit step.
        '''

    @abstractmethod
    def add_schedule(self, name, value, step="step"):
        '''Log the current value of a scheduled hyperparameter, e.g. the learning rate.'''

    @abstractmethod
    def add_summary(self, name, mean, std, step="epoch"):
        '''Log the mean and standard deviation of a statistic over seeds or samples.'''

    @abstractmethod
    def add_record(self, record):
        '''
        Store one MetricsRecord row.

        Args:
            record (slimreg.trainer.MetricsRecord): Per-epoch metrics for one split.
        '''


class DummyWriter(Writer):
    '''Discards everything.'''

    def add_loss(self, name, value, step="step"):
        pass

    def add_evaluation(self, name, value, step="epoch"):
        pass

    def add_scalar(self, name, value, step="step"):
        pass

    def add_schedule(self, name, value, step="step"):
        pass

    def add_summary(self, name, mean, std, step="epoch"):
        pass

    def add_record(self, record):
        pass


__all__ = ['Writer', 'DummyWriter']
