from .config import SUBNET_MODES, METRICS_FIELDS, GradReport, MetricsRecord, StepMetrics, TrainConfig
from .steps import gradaug_backward, gradaug_step, pseudo_label_step, sample_subnets, standard_step
from .decompose import gradient_decompose
from .trainers import GradAugTrainer, SemiSupervisedTrainer, StandardTrainer, Trainer, build_trainer

__all__ = [
    'SUBNET_MODES',
    'METRICS_FIELDS',
    'GradReport',
    'MetricsRecord',
    'StepMetrics',
    'TrainConfig',
    'gradaug_backward',
    'gradaug_step',
    'pseudo_label_step',
    'sample_subnets',
    'standard_step',
    'gradient_decompose',
    'GradAugTrainer',
    'SemiSupervisedTrainer',
    'StandardTrainer',
    'Trainer',
    'build_trainer',
]
