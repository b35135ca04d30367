import torch
from slimreg.core import BNMode
from slimreg.nn import Width


def topk_correct(logits, labels, k):
    '''
    Number of samples whose label is among the k largest logits.

    Classes are ranked by a stable descending sort, so among equal logits the
    lower class index ranks first.
    '''
    k = min(k, logits.shape[1])
    ranked = torch.sort(logits, dim=1, descending=True, stable=True).indices[:, :k]
    return int((ranked == labels.view(-1, 1)).any(dim=1).sum().item())


def predict(model, images, width=1., batch_size=256):
    '''Eval-mode logits of the sub-network at ``width`` for every image.'''
    with torch.no_grad():
        outputs = [
            model(images[start:start + batch_size], subnet=Width(width), bn_mode=BNMode.EVAL)
            for start in range(0, len(images), batch_size)
        ]
    return torch.cat(outputs) if outputs else torch.zeros(0, model.spec.num_classes)


def evaluate(model, dataset, width=1., batch_size=256, images=None):
    '''
    Top-1 and top-5 accuracy (in percent) of a sub-network.

    Batch norm uses its running statistics and no parameter or buffer is
    changed.

    Args:
        model (SlimmableNetwork): The model to evaluate.
        dataset (ImageDataset): Provides ``images`` and ``labels``.
        width (float): Width of the evaluated sub-network.
        batch_size (int): Images per forward pass.
        images (torch.Tensor, optional): Replaces ``dataset.images``, e.g. by a
            corrupted or attacked copy.

    Returns:
        (float, float): top1 and top5.
    '''
    images = dataset.images if images is None else images
    labels = dataset.labels
    if len(labels) == 0:
        return 0., 0.
    logits = predict(model, images, width, batch_size)
    top1 = topk_correct(logits, labels, 1)
    top5 = topk_correct(logits, labels, 5)
    return 100. * top1 / len(labels), 100. * top5 / len(labels)
