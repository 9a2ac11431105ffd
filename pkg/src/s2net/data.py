"""Raw tables, preprocessing, and the assembled labeled/unlabeled dataset.

Preprocessing is fit on labeled rows only: categorical columns are dummy
coded against their lexicographically first level, columns that are
constant on the labeled data are dropped, and the survivors are centered
(and by default scaled, sd with ddof=1) by labeled statistics. The exact
same affine map is replayed onto unlabeled rows and any later table, and
building a dataset routes the labeled table through that replay path, so
rebuilding is bit-for-bit reproducible.

Linear-family labels are centered by their mean (the mean is kept and
restored at prediction time); logistic labels must be 0/1 and are kept
as-is with their mean recorded.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

CONSTANT_COLUMN_RTOL = 1e-12
MISSING_TOKENS = frozenset({"", "NA", "na", "NaN", "nan", "NULL", "null"})
KINDS = ("numeric", "categorical")
RESPONSES = ("linear", "logistic")
UNSEEN_POLICIES = ("error", "reference")


@dataclass
class RawTable:
    """Column-oriented table: numeric columns as float arrays, categorical
    as string arrays. Missing values are rejected at construction."""

    names: list[str]
    columns: list[np.ndarray]
    kinds: list[str]

    def __post_init__(self):
        if not (len(self.names) == len(self.columns) == len(self.kinds)):
            raise DataError("names, columns and kinds must align")
        if len(set(self.names)) != len(self.names):
            raise DataError("column names must be unique")
        if not self.names:
            raise DataError("table needs at least one column")
        lengths = {len(c) for c in self.columns}
        if len(lengths) > 1:
            raise DataError(f"columns have unequal lengths {sorted(lengths)}")
        for name, col, kind in zip(self.names, self.columns, self.kinds):
            if kind not in KINDS:
                raise DataError(f"column {name!r}: unknown kind {kind!r}")
            if kind == "numeric":
                if not np.all(np.isfinite(col)):
                    raise DataError(f"column {name!r} has missing or non-finite values")
            else:
                for i, v in enumerate(col):
                    if v == "":
                        raise DataError(f"column {name!r} row {i + 1}: empty value")

    @property
    def n_rows(self):
        return len(self.columns[0])

    def column(self, name):
        try:
            idx = self.names.index(name)
        except ValueError:
            raise DataError(f"no column named {name!r}") from None
        return self.columns[idx], self.kinds[idx]

    @classmethod
    def from_matrix(cls, m, names=None):
        """Wrap an all-numeric matrix; default names are x1..xp."""
        m = np.asarray(m, dtype=float)
        if m.ndim != 2:
            raise DataError("matrix must be 2-d")
        if names is None:
            names = [f"x{j + 1}" for j in range(m.shape[1])]
        return cls(
            names=list(names),
            columns=[np.array(m[:, j], dtype=float) for j in range(m.shape[1])],
            kinds=["numeric"] * m.shape[1],
        )


def read_csv(path, hints=None):
    """Read a CSV file with a header row into a RawTable.

    Leading lines starting with '#' are skipped (files written by this
    package carry one such metadata line). A column whose every cell parses
    as a finite float is numeric, anything else categorical; hints maps
    column names to "numeric" or "categorical" to force the choice. Empty
    cells and non-finite numerics are rejected with row/column diagnostics.
    """
    hints = dict(hints or {})
    for name, kind in hints.items():
        if kind not in KINDS:
            raise DataError(f"hint for {name!r}: unknown kind {kind!r}")
    try:
        fh = open(path, newline="")
    except OSError as err:
        raise DataError(f"cannot read {path}: {err}") from None
    with fh:
        rows = []
        for line_no, line in enumerate(fh, start=1):
            if not rows and line.startswith("#"):
                continue
            rows.append((line_no, line))
        parsed = list(csv.reader(r[1] for r in rows))
    if not parsed:
        raise DataError(f"{path}: empty file, expected a header row")
    if len(parsed) < 2:
        raise DataError(f"{path}: no data rows after the header")
    header = [h.strip() for h in parsed[0]]
    body = parsed[1:]
    n_cols = len(header)
    cells = []
    for k, row in enumerate(body):
        line_no = rows[k + 1][0]
        if len(row) != n_cols:
            raise DataError(
                f"{path} line {line_no}: expected {n_cols} fields, got {len(row)}"
            )
        cells.append([c.strip() for c in row])

    names, columns, kinds = [], [], []
    for j, name in enumerate(header):
        raw = [row[j] for row in cells]
        for k, v in enumerate(raw):
            if v in MISSING_TOKENS:
                line_no = rows[k + 1][0]
                raise DataError(
                    f"{path} line {line_no}: column {name!r} has missing value {v!r}"
                )
        kind = hints.get(name)
        values = None
        if kind in (None, "numeric"):
            try:
                values = np.array([float(v) for v in raw], dtype=float)
            except ValueError:
                values = None
            if values is not None and not np.all(np.isfinite(values)):
                values = None
            if values is None and kind == "numeric":
                bad = next(
                    k for k, v in enumerate(raw)
                    if not _is_finite_float(v)
                )
                raise DataError(
                    f"{path} line {rows[bad + 1][0]}: column {name!r} value "
                    f"{raw[bad]!r} is not numeric"
                )
        if values is not None and kind != "categorical":
            names.append(name)
            columns.append(values)
            kinds.append("numeric")
        else:
            names.append(name)
            columns.append(np.array(raw, dtype=object))
            kinds.append("categorical")
    return RawTable(names=names, columns=columns, kinds=kinds)


def _is_finite_float(text):
    try:
        return bool(np.isfinite(float(text)))
    except ValueError:
        return False


def split_label(table, label_col):
    """Pull one numeric column out as the response; returns (y, rest)."""
    col, kind = table.column(label_col)
    if kind != "numeric":
        raise DataError(f"label column {label_col!r} must be numeric")
    keep = [i for i, n in enumerate(table.names) if n != label_col]
    if not keep:
        raise DataError("table has no feature columns besides the label")
    rest = RawTable(
        names=[table.names[i] for i in keep],
        columns=[table.columns[i] for i in keep],
        kinds=[table.kinds[i] for i in keep],
    )
    return np.array(col, dtype=float), rest


@dataclass
class ColumnEncoding:
    """How one original column expands into model-matrix columns.

    Numeric columns pass through (levels is None). Categorical columns emit
    one indicator per level except the first (lexicographic reference level,
    dropped when drop_first is set).
    """

    name: str
    kind: str
    levels: list[str] | None = None
    drop_first: bool = True


@dataclass
class Preprocess:
    """Frozen preprocessing recipe; replay applies it to any raw table."""

    encodings: list[ColumnEncoding]
    kept_columns: list[int]
    center: np.ndarray
    scale: np.ndarray | None
    labels_center: float
    response_kind: str
    feature_names: list[str]
    unseen_policy: str = "error"

    @property
    def n_features(self):
        return len(self.kept_columns)


def _encoded_width(enc):
    if enc.kind == "numeric":
        return 1
    drop = 1 if enc.drop_first else 0
    return max(len(enc.levels) - drop, 0)


def _expand(encodings, table, unseen_policy):
    """Dummy-code a raw table into the full (pre-drop) model matrix."""
    blocks = []
    names = []
    for enc in encodings:
        col, kind = table.column(enc.name)
        if kind != enc.kind:
            raise DataError(
                f"column {enc.name!r} is {kind}, expected {enc.kind} "
                "(pass schema hints when reading the file)"
            )
        if enc.kind == "numeric":
            blocks.append(np.asarray(col, dtype=float).reshape(-1, 1))
            names.append(enc.name)
        else:
            level_set = set(enc.levels)
            emit = enc.levels[1:] if enc.drop_first else enc.levels
            if unseen_policy == "error":
                for i, v in enumerate(col):
                    if v not in level_set:
                        raise DataError(
                            f"column {enc.name!r} row {i + 1}: unseen level {v!r}"
                        )
            block = np.zeros((len(col), len(emit)))
            for j, level in enumerate(emit):
                block[:, j] = (col == level).astype(float)
            blocks.append(block)
            names.extend(f"{enc.name}={level}" for level in emit)
    if blocks:
        return np.concatenate(blocks, axis=1), names
    return np.zeros((table.n_rows, 0)), names


def replay(pre, table):
    """Apply a stored preprocessing recipe to a raw table.

    Same expansion, same kept columns, same centering and scaling as at
    build time; the result is bit-for-bit identical for identical input.
    """
    full, _ = _expand(pre.encodings, table, pre.unseen_policy)
    x = full[:, pre.kept_columns]
    x = x - pre.center
    if pre.scale is not None:
        x = x / pre.scale
    return x


def build_dataset(labeled, y, unlabeled=None, response="linear", scale=True,
                  unseen_policy="error"):
    """Fit preprocessing on the labeled table and assemble a Dataset.

    Level sets, constant-column removal, centers and scales all come from
    the labeled rows; the unlabeled table (optional) is mapped through the
    identical recipe. Linear labels are centered, logistic labels must be
    0/1; either way the label mean is recorded.
    """
    if response not in RESPONSES:
        raise DataError(f"response must be one of {RESPONSES}, got {response!r}")
    if unseen_policy not in UNSEEN_POLICIES:
        raise DataError(
            f"unseen_policy must be one of {UNSEEN_POLICIES}, got {unseen_policy!r}"
        )
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != labeled.n_rows:
        raise DataError("y must be 1-d with one entry per labeled row")
    if labeled.n_rows < 1:
        raise DataError("need at least one labeled row")
    if not np.all(np.isfinite(y)):
        raise DataError("labels contain missing or non-finite values")
    if response == "logistic" and not np.all((y == 0.0) | (y == 1.0)):
        raise DataError("logistic labels must be coded 0/1")

    encodings = []
    for name, col, kind in zip(labeled.names, labeled.columns, labeled.kinds):
        if kind == "numeric":
            encodings.append(ColumnEncoding(name=name, kind="numeric"))
        else:
            levels = sorted(set(str(v) for v in col))
            encodings.append(
                ColumnEncoding(name=name, kind="categorical", levels=levels)
            )

    full, full_names = _expand(encodings, labeled, unseen_policy)
    kept = []
    for j in range(full.shape[1]):
        col = full[:, j]
        hi, lo = float(col.max()), float(col.min())
        if hi - lo > CONSTANT_COLUMN_RTOL * (1.0 + abs(hi)):
            kept.append(j)
    if not kept:
        raise DataError("all feature columns are constant on the labeled data")

    center = full[:, kept].mean(axis=0)
    if scale:
        sd = full[:, kept].std(axis=0, ddof=1)
        scale_vec = np.asarray(sd, dtype=float)
    else:
        scale_vec = None

    labels_center = float(y.mean())
    yl = y - labels_center if response == "linear" else y.copy()

    pre = Preprocess(
        encodings=encodings,
        kept_columns=kept,
        center=center,
        scale=scale_vec,
        labels_center=labels_center,
        response_kind=response,
        feature_names=[full_names[j] for j in kept],
        unseen_policy=unseen_policy,
    )
    xl = replay(pre, labeled)
    if unlabeled is None:
        xu = np.zeros((0, pre.n_features))
    else:
        xu = replay(pre, unlabeled)
    return Dataset(xl=xl, yl=yl, xu=xu, response_kind=response, preprocess=pre)


@dataclass
class Dataset:
    """Preprocessed labeled block, labels, and unlabeled block."""

    xl: np.ndarray
    yl: np.ndarray
    xu: np.ndarray
    response_kind: str
    preprocess: Preprocess

    def __post_init__(self):
        if self.xl.ndim != 2 or self.xu.ndim != 2:
            raise DataError("feature blocks must be 2-d")
        if self.xl.shape[1] != self.xu.shape[1]:
            raise DataError("labeled and unlabeled blocks must share columns")
        if self.yl.shape != (self.xl.shape[0],):
            raise DataError("labels must align with labeled rows")

    @property
    def n_labeled(self):
        return self.xl.shape[0]

    @property
    def n_unlabeled(self):
        return self.xu.shape[0]

    @property
    def n_features(self):
        return self.xl.shape[1]


def preprocess_to_dict(pre):
    return {
        "encodings": [
            {
                "name": e.name,
                "kind": e.kind,
                "levels": list(e.levels) if e.levels is not None else None,
                "drop_first": e.drop_first,
            }
            for e in pre.encodings
        ],
        "kept_columns": [int(j) for j in pre.kept_columns],
        "center": [float(v) for v in pre.center],
        "scale": [float(v) for v in pre.scale] if pre.scale is not None else None,
        "labels_center": float(pre.labels_center),
        "response": pre.response_kind,
        "feature_names": list(pre.feature_names),
        "unseen_policy": pre.unseen_policy,
    }


def preprocess_from_dict(d):
    try:
        return Preprocess(
            encodings=[
                ColumnEncoding(
                    name=e["name"],
                    kind=e["kind"],
                    levels=list(e["levels"]) if e["levels"] is not None else None,
                    drop_first=bool(e["drop_first"]),
                )
                for e in d["encodings"]
            ],
            kept_columns=[int(j) for j in d["kept_columns"]],
            center=np.array(d["center"], dtype=float),
            scale=(np.array(d["scale"], dtype=float)
                   if d["scale"] is not None else None),
            labels_center=float(d["labels_center"]),
            response_kind=d["response"],
            feature_names=list(d["feature_names"]),
            unseen_policy=d.get("unseen_policy", "error"),
        )
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed preprocessing record: {exc}") from exc
