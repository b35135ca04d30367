from .accuracy import evaluate, predict, topk_correct
from .attacks import DEFAULT_EPSILONS, AttackConfig, fgsm_attack, fgsm_eval
from .corruption import SEVERITIES, CorruptionReport, corruption_eval

__all__ = [
    'evaluate',
    'predict',
    'topk_correct',
    'DEFAULT_EPSILONS',
    'AttackConfig',
    'fgsm_attack',
    'fgsm_eval',
    'SEVERITIES',
    'CorruptionReport',
    'corruption_eval',
]
