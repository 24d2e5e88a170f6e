"""Sample containers shared by all estimators."""

from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import DegenerateSampleError, InvalidArgumentError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SampleMeta:
    density: object = "external"  # catalog id or "external"
    seed: object = None
    replicate: object = None


@dataclass(frozen=True)
class Sample:
    values: np.ndarray
    meta: SampleMeta = field(default_factory=SampleMeta)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size < 2:
            raise InvalidArgumentError("a sample needs at least two observations")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("sample contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.size

    def __len__(self):
        return self.values.size

    def require_distinct(self):
        if np.all(self.values == self.values[0]):
            raise DegenerateSampleError("all sample values are identical")


def as_sample(x):
    return x if isinstance(x, Sample) else Sample(x)


@dataclass(frozen=True)
class CircularSample:
    angles: np.ndarray

    def __post_init__(self):
        a = np.array(self.angles, dtype=float).ravel()
        if a.size < 2:
            raise InvalidArgumentError("a circular sample needs at least two angles")
        if not np.all(np.isfinite(a)):
            raise InvalidArgumentError("angles must be finite")
        a = np.mod(a, TWO_PI)
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    @property
    def n(self):
        return self.angles.size
