import csv
from dataclasses import dataclass, field
import numpy as np
from slimreg.transforms import CORRUPTIONS, corrupt
from .accuracy import evaluate

SEVERITIES = (1, 2, 3, 4, 5)


@dataclass
class CorruptionReport:
    '''
    Top-1 errors (percent) of a model on corrupted copies of a test set.

    ``errors`` maps (kind, severity) to an error. ``mean_error`` is the
    unweighted mean over kinds of the per-kind error averaged over severities,
    without normalization by a reference model.
    '''
    clean_error: float
    errors: dict = field(default_factory=dict)

    @property
    def kinds(self):
        return sorted({kind for kind, _ in self.errors})

    def kind_error(self, kind):
        return float(np.mean([error for (k, _), error in self.errors.items() if k == kind]))

    @property
    def mean_error(self):
        if not self.errors:
            return 0.
        return float(np.mean([self.kind_error(kind) for kind in self.kinds]))

    def write_csv(self, path):
        with open(path, 'w', newline='') as csvfile:
            writer = csv.writer(csvfile)
            writer.writerow(['kind', 'severity', 'error'])
            writer.writerow(['clean', 0, self.clean_error])
            for (kind, severity), error in sorted(self.errors.items()):
                writer.writerow([kind, severity, error])
            writer.writerow(['mean', '', self.mean_error])


def corruption_eval(model, dataset, kinds=CORRUPTIONS, severities=SEVERITIES, rng=None, batch_size=256):
    '''
    Evaluate ``model`` on corrupted copies of ``dataset``.

    Images are mapped back to [0, 1] pixel space, corrupted, and normalized
    again. Severity 0 evaluates the clean images themselves. The dataset is not
    modified.

    Args:
        model (SlimmableNetwork): The model to evaluate.
        dataset (ImageDataset): Clean, normalized test images.
        kinds (tuple): Corruption kinds.
        severities (tuple): Severities in 0..5.
        rng (numpy.random.Generator, optional): Noise source; seeded with 0 if omitted.
        batch_size (int): Images per forward pass.

    Returns:
        CorruptionReport: Clean error and one error per (kind, severity).
    '''
    rng = np.random.default_rng(0) if rng is None else rng
    report = CorruptionReport(clean_error=100. - evaluate(model, dataset, batch_size=batch_size)[0])
    pixels = dataset.denormalize(dataset.images)
    for kind in kinds:
        for severity in severities:
            if severity == 0:
                report.errors[(kind, severity)] = report.clean_error
                continue
            images = dataset.normalize(corrupt(pixels, kind, severity, rng))
            report.errors[(kind, severity)] = 100. - evaluate(model, dataset, batch_size=batch_size,
                                                              images=images)[0]
    return report
