'''
Checkpoints as a JSON manifest plus one raw little-endian blob per tensor.

The manifest records the ModelSpec and, for each entry of the model's
state_dict (named by layer path), the blob file, dtype and shape. Saving and
loading round-trips every parameter and buffer bit-exactly.
'''
import json
import os
from abc import ABC, abstractmethod
import numpy as np
import torch
from slimreg.core import CheckpointError
from .slimmable import ModelSpec, SlimmableNetwork

MANIFEST = 'manifest.json'
FORMAT = 'slimreg-checkpoint'
VERSION = 1


def save_checkpoint(model, directory, metadata=None):
    os.makedirs(directory, exist_ok=True)
    entries = []
    for name, value in model.state_dict().items():
        array = value.detach().cpu().numpy()
        dtype = array.dtype.newbyteorder('<')
        filename = name + '.bin'
        with open(os.path.join(directory, filename), 'wb') as blob:
            blob.write(np.ascontiguousarray(array, dtype=dtype).tobytes())
        entries.append({
            'name': name,
            'file': filename,
            'dtype': dtype.str,
            'shape': list(array.shape),
        })
    manifest = {
        'format': FORMAT,
        'version': VERSION,
        'model': model.spec.to_dict(),
        'tensors': entries,
        'metadata': metadata or {},
    }
    with open(os.path.join(directory, MANIFEST), 'w') as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    return directory


def read_manifest(directory):
    path = os.path.join(directory, MANIFEST)
    try:
        with open(path) as f:
            manifest = json.load(f)
    except (OSError, ValueError) as error:
        raise CheckpointError("cannot read checkpoint manifest {}: {}".format(path, error)) from error
    if manifest.get('format') != FORMAT:
        raise CheckpointError("{} is not a slimreg checkpoint".format(path))
    return manifest


def load_checkpoint(directory):
    '''
    Rebuild a model from a checkpoint directory.

    Returns:
        (SlimmableNetwork, dict): The model and the metadata stored with it.
    '''
    manifest = read_manifest(directory)
    state = {}
    for entry in manifest['tensors']:
        dtype = np.dtype(entry['dtype'])
        path = os.path.join(directory, entry['file'])
        try:
            with open(path, 'rb') as blob:
                data = blob.read()
        except OSError as error:
            raise CheckpointError("missing tensor blob " + path) from error
        expected = int(np.prod(entry['shape'], dtype=np.int64)) * dtype.itemsize
        if len(data) != expected:
            raise CheckpointError("{} holds {} bytes, expected {}".format(path, len(data), expected))
        array = np.frombuffer(data, dtype=dtype).reshape(entry['shape'])
        state[entry['name']] = torch.from_numpy(array.astype(dtype.newbyteorder('=')))

    floats = [value.dtype for value in state.values() if value.is_floating_point()]
    model = SlimmableNetwork(ModelSpec.from_dict(manifest['model']), dtype=floats[0] if floats else None)
    try:
        model.load_state_dict(state)
    except RuntimeError as error:
        raise CheckpointError("checkpoint does not match its model spec: {}".format(error)) from error
    return model, manifest['metadata']


class Checkpointer(ABC):
    @abstractmethod
    def init(self, model, directory):
        pass

    @abstractmethod
    def __call__(self, metadata=None):
        pass


class DummyCheckpointer(Checkpointer):
    def init(self, *inputs):
        pass

    def __call__(self, metadata=None):
        pass


class EpochCheckpointer(Checkpointer):
    '''Saves the model into ``<directory>/checkpoint`` once every ``frequency`` epochs.'''
    def __init__(self, frequency=1):
        self.frequency = frequency
        self._epochs = 1
        self._model = None
        self._directory = None

    def init(self, model, directory):
        self._model = model
        self._directory = os.path.join(directory, 'checkpoint')

    def __call__(self, metadata=None):
        if self._epochs % self.frequency == 0:
            save_checkpoint(self._model, self._directory, metadata)
        self._epochs += 1
