# Copyright 2026 The hashner Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

"""Python bindings for the hashner C++ core."""

import json

from . import _hashner
from ._hashner import (
    IoError,
    SizeError,
    StateError,
    ValidationError,
    biluo_decode,
    biluo_encode,
    bucket_indices,
    collision_probability,
    expected_collisions,
    extract_features,
    murmurhash3_x64_128,
    signature_collision_probability,
)

__all__ = [
    "IoError",
    "Model",
    "SizeError",
    "StateError",
    "ValidationError",
    "biluo_decode",
    "biluo_encode",
    "bucket_indices",
    "collision_probability",
    "collision_report",
    "expected_collisions",
    "extract_features",
    "generate_synthetic",
    "murmurhash3_x64_128",
    "read_corpus",
    "score",
    "signature_collision_probability",
    "simulate_collisions",
    "write_corpus",
]


def _loads_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _dumps_lines(docs):
    return "".join(json.dumps(d) + "\n" for d in docs)


def read_corpus(path, scheme="auto"):
    """Reads JSON lines or CoNLL into a list of document dicts."""
    return _loads_lines(_hashner.read_corpus(str(path), scheme))


def write_corpus(path, docs):
    _hashner.write_corpus(str(path), _dumps_lines(docs))


def generate_synthetic(sentences=5000, seed=0):
    return _loads_lines(_hashner.generate_synthetic(sentences, seed))


def score(gold, predicted, train=None):
    """Micro P/R/F1 of `predicted` span lists against gold documents.

    With `train`, the report also has seen and unseen scores.
    """
    predicted = [[tuple(s) for s in spans] for spans in predicted]
    train_text = None if train is None else _dumps_lines(train)
    return json.loads(_hashner.score(_dumps_lines(gold), predicted, train_text))


def simulate_collisions(n, k, vocab_size, trials, seed=0):
    return json.loads(_hashner.simulate_collisions(n, k, vocab_size, trials, seed))


def collision_report(n, k, vocab_size, trials=0, seed=0):
    return json.loads(_hashner.collision_report(n, k, vocab_size, trials, seed))


class Model:
    """A trained tagger."""

    def __init__(self, native):
        self._native = native

    @classmethod
    def load(cls, directory):
        return cls(_hashner.Model.load(str(directory)))

    @classmethod
    def train(cls, config, train=None, dev=None, seed=None, max_steps=None):
        native = _hashner.Model.train(
            str(config),
            None if train is None else str(train),
            None if dev is None else str(dev),
            seed,
            max_steps,
        )
        return cls(native)

    def save(self, directory):
        self._native.save(str(directory))

    def predict(self, sentences):
        """Entity spans (start, end, label) for each token list."""
        return self._native.predict([list(s) for s in sentences])

    def evaluate(self, docs, train=None):
        train_text = None if train is None else _dumps_lines(train)
        return json.loads(self._native.evaluate_jsonl(_dumps_lines(docs), train_text))

    @property
    def labels(self):
        return self._native.labels

    @property
    def parameter_count(self):
        return self._native.parameter_count

    @property
    def config_toml(self):
        return self._native.config_toml

    @property
    def history(self):
        return _loads_lines(self._native.history_jsonl)
