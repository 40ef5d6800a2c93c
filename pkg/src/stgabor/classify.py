"""Nearest-neighbor classification with seeded, stratified cross-validation.

Predictions use the single closest training vector. Distance ties are broken
deterministically by the lowest source identifier. Fold assignment is driven
entirely by the seed, so a report is reproducible run to run.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleFeaturesError, InvalidParameterError
from .features import FeatureVector

METRICS = ("euclidean", "manhattan")


@dataclass(eq=False)
class LabeledDataset:
    """Feature vectors with class labels and per-item source identifiers.

    All vectors must come from one bank configuration; at least two classes
    are required. Source identifiers must be unique (they are the
    tie-breaking key).
    """

    items: tuple  # of (FeatureVector, label, source)

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise InvalidParameterError("dataset must not be empty")
        fingerprints = {fv.config_fingerprint for fv, _, _ in items}
        if len(fingerprints) != 1:
            raise IncompatibleFeaturesError(
                f"dataset mixes feature configurations: {sorted(fingerprints)}"
            )
        lengths = {len(fv) for fv, _, _ in items}
        if len(lengths) != 1:
            raise IncompatibleFeaturesError(
                f"dataset mixes feature lengths: {sorted(lengths)}"
            )
        labels = [str(label) for _, label, _ in items]
        if len(set(labels)) < 2:
            raise InvalidParameterError("dataset needs at least 2 classes")
        sources = [str(src) for _, _, src in items]
        if len(set(sources)) != len(sources):
            raise InvalidParameterError("source identifiers must be unique")
        object.__setattr__(self, "items", items)
        matrix = np.stack([fv.values for fv, _, _ in items])
        matrix.setflags(write=False)
        self._matrix = matrix
        self._labels = tuple(labels)
        self._sources = tuple(sources)

    def __len__(self) -> int:
        return len(self.items)

    @property
    def fingerprint(self) -> str:
        return self.items[0][0].config_fingerprint

    @property
    def matrix(self) -> np.ndarray:
        """Feature matrix, one row per item."""
        return self._matrix

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def sources(self) -> tuple[str, ...]:
        return self._sources

    @property
    def classes(self) -> tuple[str, ...]:
        """Distinct labels in sorted order."""
        return tuple(sorted(set(self._labels)))


@dataclass(frozen=True)
class CvReport:
    """Per-fold accuracies plus the aggregate confusion matrix.

    ``confusion[i, j]`` counts items of true class ``class_labels[i]``
    predicted as ``class_labels[j]``, summed over all folds. ``std_dev`` is
    the population standard deviation of the fold accuracies.
    """

    fold_accuracies: tuple[float, ...]
    mean_accuracy: float
    std_dev: float
    confusion: np.ndarray
    class_labels: tuple[str, ...]
    seed: int
    stratified: bool
    metric: str
    zscore: bool


def _distances(matrix: np.ndarray, query: np.ndarray, metric: str) -> np.ndarray:
    diff = matrix - query
    if metric == "euclidean":
        # Squared distances order identically to true distances.
        return np.einsum("ij,ij->i", diff, diff)
    return np.sum(np.abs(diff), axis=1)


def _nearest(matrix: np.ndarray, sources, query: np.ndarray, metric: str) -> int:
    dist = _distances(matrix, query, metric)
    best = dist.min()
    candidates = np.flatnonzero(dist == best)
    if len(candidates) == 1:
        return int(candidates[0])
    return int(min(candidates, key=lambda i: sources[i]))


def knn_predict(train: LabeledDataset, query: FeatureVector,
                metric: str = "euclidean") -> str:
    """Label of the training vector closest to ``query``."""
    if metric not in METRICS:
        raise InvalidParameterError(f"metric must be one of {METRICS}, got {metric!r}")
    if query.config_fingerprint != train.fingerprint:
        raise IncompatibleFeaturesError(
            f"query fingerprint {query.config_fingerprint} does not match "
            f"training set fingerprint {train.fingerprint}"
        )
    index = _nearest(train.matrix, train.sources, query.values, metric)
    return train.labels[index]


def _fold_assignment(data: LabeledDataset, folds: int,
                     rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    labels = np.asarray(data.labels)
    counts = {c: int(np.sum(labels == c)) for c in data.classes}
    assignment = np.empty(len(data), dtype=np.intp)
    if min(counts.values()) >= folds:
        # Deal each class's shuffled items round-robin, carrying the fold
        # pointer across classes so global fold sizes stay within one item.
        pointer = 0
        for cls in data.classes:
            indices = np.flatnonzero(labels == cls)
            for idx in rng.permutation(indices):
                assignment[idx] = pointer % folds
                pointer += 1
        return assignment, True
    warnings.warn(
        "some class has fewer items than folds; falling back to "
        "unstratified fold assignment",
        stacklevel=3,
    )
    for position, idx in enumerate(rng.permutation(len(data))):
        assignment[idx] = position % folds
    return assignment, False


def cross_validate(data: LabeledDataset, folds: int = 10, seed: int = 0,
                   metric: str = "euclidean", zscore: bool = False) -> CvReport:
    """K-fold cross-validated nearest-neighbor accuracy.

    Folds are stratified when every class has at least ``folds`` items.
    ``zscore`` standardizes each feature dimension using statistics fitted
    on the training folds only.
    """
    if metric not in METRICS:
        raise InvalidParameterError(f"metric must be one of {METRICS}, got {metric!r}")
    if folds < 2 or folds > len(data):
        raise InvalidParameterError(
            f"folds must lie in [2, {len(data)}], got {folds}"
        )
    rng = np.random.default_rng(seed)
    assignment, stratified = _fold_assignment(data, folds, rng)

    classes = data.classes
    class_index = {c: i for i, c in enumerate(classes)}
    labels = data.labels
    sources = data.sources
    matrix = data.matrix

    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    accuracies = []
    for fold in range(folds):
        test_idx = np.flatnonzero(assignment == fold)
        train_idx = np.flatnonzero(assignment != fold)
        train_m = matrix[train_idx]
        test_m = matrix[test_idx]
        if zscore:
            mean = train_m.mean(axis=0)
            std = train_m.std(axis=0)
            std[std == 0.0] = 1.0
            train_m = (train_m - mean) / std
            test_m = (test_m - mean) / std
        train_sources = [sources[i] for i in train_idx]
        correct = 0
        for row, idx in zip(test_m, test_idx):
            nearest = _nearest(train_m, train_sources, row, metric)
            predicted = labels[train_idx[nearest]]
            confusion[class_index[labels[idx]], class_index[predicted]] += 1
            correct += predicted == labels[idx]
        accuracies.append(correct / len(test_idx) if len(test_idx) else 0.0)

    accuracies = tuple(float(a) for a in accuracies)
    confusion.setflags(write=False)
    return CvReport(
        fold_accuracies=accuracies,
        mean_accuracy=float(np.mean(accuracies)),
        std_dev=float(np.std(accuracies)),
        confusion=confusion,
        class_labels=classes,
        seed=int(seed),
        stratified=stratified,
        metric=metric,
        zscore=bool(zscore),
    )
