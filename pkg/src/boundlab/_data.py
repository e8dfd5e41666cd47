import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np


@lru_cache(maxsize=None)
def load(name: str):
    with resources.files("boundlab.data").joinpath(name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


def radical(entry) -> float:
    """[num, den, radicand] -> num/den * sqrt(radicand); radicand may be 'p/q'."""
    num, den, rad = entry
    return float(Fraction(num, den)) * float(np.sqrt(float(Fraction(rad))))


def radical_matrix(rows) -> np.ndarray:
    return np.array([[radical(e) for e in row] for row in rows])


def complex_columns(cols) -> np.ndarray:
    """List of columns of [re, im] pairs -> matrix with those columns."""
    return np.array([[complex(re, im) for re, im in col] for col in cols]).T
