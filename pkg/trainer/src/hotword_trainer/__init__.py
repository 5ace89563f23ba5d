"""Siamese training pipeline for the hotword engine.

Builds labeled spectrogram pairs from a dataset manifest, trains the base
network with binary cross-entropy on a distance-derived similarity score,
and exports weights in the engine's EWN1 format with parity fixtures.
"""

from .export import export_parity_fixture, export_weights
from .fixtures import make_tone_corpus
from .losses import bce_loss, pair_accuracy, similarity_head, triplet_loss
from .model import BaseNetwork
from .pairs import PairSet, build_pairs, read_manifest
from .phonemes import WordPool, filter_word_pool, lcs_length, parse_lexicon, phoneme_similarity
from .train import History, TrainConfig, finetune, fit

__version__ = "0.1.0"
