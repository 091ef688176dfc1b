"""Input checks shared by the estimator-style wrappers."""

from collections.abc import Iterable


def check_texts(X, name="X", allow_empty=True):
    """Return ``X`` as a list of str, rejecting a bare string and non-str items."""
    if isinstance(X, (str, bytes)):
        raise TypeError(f"{name} must be an iterable of strings, not a single {type(X).__name__}")
    if not isinstance(X, Iterable):
        raise TypeError(f"{name} must be an iterable of strings")
    X = list(X)
    for i, item in enumerate(X):
        if not isinstance(item, str):
            raise TypeError(f"{name}[{i}] is {type(item).__name__}, expected str")
    if not allow_empty and not X:
        raise ValueError(f"{name} is empty")
    return X


def check_labels(y, n, name="y"):
    if isinstance(y, str):
        raise TypeError(f"{name} must be a sequence of labels")
    y = list(y)
    if len(y) != n:
        raise ValueError(f"{name} has {len(y)} labels for {n} samples")
    return y
