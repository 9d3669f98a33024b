"""
Estimator-style front end: ``fit`` learns the source letter law and draws
an encoder, ``transform`` encodes source blocks to channel inputs, and
``predict`` decodes received blocks.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .algebra import as_generator
from .codes import CodeEnsemble, LinearCode
from .errors import UsageError
from .scheme import (
    ChannelModel,
    SchemeInstance,
    SourceModel,
    block_digits,
    map_decisions,
    preset_quantization,
    realize_encoder,
    threshold_decisions,
)
from .validation import check_gf_array, check_probability_vector

_CHANNELS = ("bsc", "bec", "qsc", "noiseless", "pure-noise")


class LinearJSCC(TransformerMixin, BaseEstimator):
    """
    Randomized linear-code joint source-channel coder over GF(q).

    Parameters
    ----------
    q, n, l, m : int
        Field size, source block length, code length, channel block length.
    code : "uniform" or array of shape (n, l)
        Draw the generator matrix uniformly at ``fit`` time, or fix it.
    quantization : str
        Quantization preset name.
    channel : str
        One of ``bsc``, ``bec``, ``qsc``, ``noiseless``, ``pure-noise``.
    channel_param : float
        Crossover or erasure probability where applicable.
    gamma : float
        Threshold slack of the threshold decoder.
    decoder : {"map", "threshold"}
    source_p : sequence of float, optional
        Source letter law; estimated from the training blocks when omitted.
    mix : float
        Strength of the source-correlated quantization preset.
    random_state : int, Generator or None
        Seed for the encoder draw.
    """

    def __init__(
        self,
        q=2,
        n=4,
        l=4,
        m=4,
        code="uniform",
        quantization="jscc-default",
        channel="bsc",
        channel_param=0.05,
        gamma=0.1,
        decoder="map",
        source_p=None,
        mix=0.5,
        random_state=None,
    ):
        self.q = q
        self.n = n
        self.l = l
        self.m = m
        self.code = code
        self.quantization = quantization
        self.channel = channel
        self.channel_param = channel_param
        self.gamma = gamma
        self.decoder = decoder
        self.source_p = source_p
        self.mix = mix
        self.random_state = random_state

    def _channel_model(self) -> ChannelModel:
        if self.channel == "bsc":
            return ChannelModel.bsc(self.channel_param, self.m)
        if self.channel == "bec":
            return ChannelModel.bec(self.channel_param, self.m, self.q)
        if self.channel == "qsc":
            return ChannelModel.qsc(self.q, self.channel_param, self.m)
        if self.channel == "noiseless":
            return ChannelModel.noiseless(self.q, self.m)
        if self.channel == "pure-noise":
            return ChannelModel.pure_noise(self.q, self.m)
        raise UsageError(f"channel must be one of {_CHANNELS}, got {self.channel!r}")

    def _code(self):
        if isinstance(self.code, str):
            if self.code != "uniform":
                raise UsageError(f"code must be 'uniform' or a matrix, got {self.code!r}")
            return CodeEnsemble.uniform(self.n, self.l, self.q)
        return LinearCode.from_array(np.asarray(self.code), self.q)

    def fit(self, X, y=None):
        """
        Estimate the source letter law from the blocks ``X`` (unless
        ``source_p`` is given) and draw one encoder.
        """
        if self.decoder not in ("map", "threshold"):
            raise UsageError(f"decoder must be 'map' or 'threshold', got {self.decoder!r}")
        X = check_gf_array(X, self.q, self.n)
        if self.source_p is None:
            # add-one smoothing keeps every letter possible
            counts = np.bincount(X.ravel(), minlength=self.q) + 1
            p = tuple(counts / counts.sum())
        else:
            p = check_probability_vector(self.source_p, self.q, "source_p")
        self.source_p_ = np.array(p)
        self.instance_ = SchemeInstance(
            SourceModel.iid(p, self.n),
            self._code(),
            preset_quantization(self.quantization, self.n, self.l, self.q, self.m, p, self.mix),
            self._channel_model(),
            gamma=self.gamma,
        )
        self.encoder_ = realize_encoder(self.instance_, as_generator(self.random_state))
        self.n_features_in_ = self.n
        return self

    def transform(self, X):
        """Channel input blocks, shape ``(n_blocks, m)``."""
        check_is_fitted(self, "encoder_")
        X = check_gf_array(X, self.q, self.n)
        idx = X @ (self.q ** np.arange(self.n - 1, -1, -1))
        return block_digits(self.encoder_.table[idx], self.m, self.instance_.channel.n_in)

    def transmit(self, X_channel, random_state=None):
        """Pass channel input blocks through the configured channel."""
        check_is_fitted(self, "encoder_")
        ch = self.instance_.channel
        X_channel = check_gf_array(X_channel, ch.n_in, self.m, "X_channel")
        return ch.sample(X_channel, as_generator(random_state))

    def predict(self, Y):
        """Decoded source blocks, shape ``(n_blocks, n)``."""
        check_is_fitted(self, "encoder_")
        ch = self.instance_.channel
        Y = check_gf_array(Y, ch.n_out, self.m, "Y")
        tables = np.broadcast_to(self.encoder_.table, (len(Y), self.instance_.n_blocks))
        decide = map_decisions if self.decoder == "map" else threshold_decisions
        return block_digits(decide(self.instance_, tables, Y), self.n, self.q)

    def score(self, X, Y):
        """Fraction of received blocks ``Y`` decoded back to the source blocks ``X``."""
        X = check_gf_array(X, self.q, self.n)
        return float(np.mean(np.all(self.predict(Y) == X, axis=1)))
