"""
ElimPy Utilities

Provides a collection of commonly used utility objects, functions and classes
shared by the engine modules and the experiments. Boilerplate = bad.
"""

import asyncio
import math
from collections import abc
from concurrent.futures import ThreadPoolExecutor
from enum import IntEnum
from pathlib import Path

import numpy as np

path = Path(__file__).parent
ENGINE_VERSION = "0.3.0"


class ElimPyError(Exception):
    """
    Root of every error raised by the engine. Modules define their own
    subclasses next to the code that raises them.
    """


# Enums

class ExitStatus(IntEnum):
    OK = 0
    ROW_FAILURES = 1
    CONFIG_ERROR = 2


# Useful things

def recursive_dictionary_update(d, u):
    """
    Given two dictionaries, update the first one with new values provided by
    the second. Works for nested dictionary sets.

    :param d: First Dictionary, to base off of.
    :param u: Second Dictionary, to provide updated values.
    :return: Dictionary. Merged dictionary with bias towards the second.
    """
    for k, v in u.items():
        if isinstance(v, abc.Mapping):
            r = recursive_dictionary_update(d.get(k, {}), v)
            d[k] = r
        else:
            d[k] = u[k]
    return d


class DotDict(dict):
    """
    Custom dictionary format that allows member access by using dot notation:
    eg - config.numerics.rtol
    """

    def __init__(self, d, **kwargs):
        super().__init__(**kwargs)
        for k, v in d.items():
            if isinstance(v, abc.Mapping):
                v = DotDict(v)
            self[k] = v

    def __getattr__(self, item):
        try:
            return super().__getitem__(item)
        except KeyError as e:
            raise AttributeError(str(e)) from None

    def __setattr__(self, key, value):
        if isinstance(value, abc.Mapping):
            value = DotDict(value)
        super().__setitem__(key, value)

    __delattr__ = dict.__delitem__


def to_plain(obj):
    """
    Convert DotDicts, numpy scalars and arrays into plain JSON-serializable
    Python objects.
    """
    if isinstance(obj, abc.Mapping):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def format_number(value):
    """
    Render a number for result files: 17 significant digits, so that a value
    read back is bit-identical. None and NaN become an empty cell.
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return format(value, ".17g")


def parameter_tag(**params):
    """
    Build a file-name friendly tag from keyword parameters, eg
    parameter_tag(w=0.5, g=0.1) -> "w0.5_g0.1".
    """
    return "_".join("{}{}".format(k, format(float(v), "g"))
                    for k, v in params.items())


async def run_points(fn, points, threads=1):
    """
    Run fn over every point on a bounded worker pool and gather the results
    in input order. Each point runs sequentially inside one worker.

    :param fn: Callable taking a single point.
    :param points: Iterable of points.
    :param threads: Worker pool size.
    :return: List of results, ordered like points.
    """
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        futures = [loop.run_in_executor(pool, fn, point) for point in points]
        return await asyncio.gather(*futures)
