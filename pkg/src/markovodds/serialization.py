"""File formats: canonical JSON for the core objects, CSV for datasets.

Canonical JSON is sorted-key, two-space indented, newline terminated, with
floats written by Python's shortest round-trip repr, so the decimal text
always parses back to the identical double and saving the same object twice
gives identical bytes.

Datasets travel as CSV with a header row; one column carries the class as
"+1"/"-1" (or "1"/"0" with ``class_coding="01"``).  Predictor categories map
to indices in first-appearance order unless a labels file pins the category
lists per column: ``{"columns": {"name": ["cat0", "cat1", ...]}}``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import FormatError, MarkovOddsError, ValidationError
from .factorize import CliqueFactorization
from .complexity import DecisionFunction
from .graphs import Dag, UndirectedGraph
from .ipf import Dataset
from .models import GenerativeClassifier
from .tables import CategoricalDomain, TabularFunction

__all__ = [
    "canonical_dumps",
    "load_function",
    "save_function",
    "load_graph",
    "save_graph",
    "load_dag",
    "save_dag",
    "load_model",
    "save_model",
    "load_decision",
    "save_decision",
    "load_factorization",
    "save_factorization",
    "load_dataset",
    "save_dataset",
    "function_to_obj",
    "graph_to_obj",
    "model_to_obj",
    "decision_to_obj",
    "factorization_to_obj",
]


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _read_json(path: str | Path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text)


def _require(obj: Mapping, key: str, where: str):
    if not isinstance(obj, Mapping):
        raise FormatError(f"{where}: expected a JSON object")
    if key not in obj:
        raise FormatError(f"{where}: missing required key {key!r}")
    return obj[key]


def _int_list(value, where: str) -> list[int]:
    if not isinstance(value, list):
        raise FormatError(f"{where}: expected a list")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, int):
            raise FormatError(f"{where}: expected integers, found {v!r}")
        out.append(v)
    return out


def _num_list(value, where: str) -> list[float]:
    if not isinstance(value, list):
        raise FormatError(f"{where}: expected a list")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise FormatError(f"{where}: expected numbers, found {v!r}")
        out.append(float(v))
    return out


def _domain_from_obj(obj: Mapping, where: str) -> CategoricalDomain:
    cards = _int_list(_require(obj, "cardinalities", where), f"{where}: cardinalities")
    labels = None
    if obj.get("labels") is not None:
        raw = obj["labels"]
        if not isinstance(raw, list) or not all(isinstance(l, list) for l in raw):
            raise FormatError(f"{where}: labels must be a list of lists")
        labels = tuple(tuple(str(s) for s in per_var) for per_var in raw)
    try:
        return CategoricalDomain(tuple(cards), labels)
    except ValidationError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def _domain_obj_fields(domain: CategoricalDomain) -> dict:
    out: dict = {"cardinalities": list(domain.cardinalities)}
    if domain.labels is not None:
        out["labels"] = [list(per_var) for per_var in domain.labels]
    return out


# -- tabular functions -------------------------------------------------------

def function_from_obj(obj, where: str = "function") -> TabularFunction:
    domain = _domain_from_obj(obj, where)
    values = _num_list(_require(obj, "values", where), f"{where}: values")
    try:
        return TabularFunction(domain, np.asarray(values))
    except ValidationError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def function_to_obj(f: TabularFunction) -> dict:
    out = _domain_obj_fields(f.domain)
    out["values"] = [float(v) for v in f.values]
    return out


def load_function(path: str | Path) -> TabularFunction:
    return function_from_obj(_read_json(path), str(path))


def save_function(path: str | Path, f: TabularFunction) -> None:
    _write_text(path, canonical_dumps(function_to_obj(f)))


# -- graphs and DAGs ---------------------------------------------------------

def graph_from_obj(obj, where: str = "graph") -> UndirectedGraph:
    n = _require(obj, "n", where)
    if isinstance(n, bool) or not isinstance(n, int):
        raise FormatError(f"{where}: n must be an integer")
    edges_raw = _require(obj, "edges", where)
    if not isinstance(edges_raw, list):
        raise FormatError(f"{where}: edges must be a list")
    edges = [_int_list(e, f"{where}: edge") for e in edges_raw]
    try:
        return UndirectedGraph.from_edges(n, edges)
    except ValidationError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def graph_to_obj(graph: UndirectedGraph) -> dict:
    return {"n": graph.n, "edges": [list(e) for e in graph.sorted_edges()]}


def load_graph(path: str | Path) -> UndirectedGraph:
    return graph_from_obj(_read_json(path), str(path))


def save_graph(path: str | Path, graph: UndirectedGraph) -> None:
    _write_text(path, canonical_dumps(graph_to_obj(graph)))


def dag_from_obj(obj, where: str = "dag") -> Dag:
    n = _require(obj, "n", where)
    if isinstance(n, bool) or not isinstance(n, int):
        raise FormatError(f"{where}: n must be an integer")
    parents_raw = _require(obj, "parents", where)
    if not isinstance(parents_raw, list):
        raise FormatError(f"{where}: parents must be a list of lists")
    parents = tuple(
        tuple(_int_list(p, f"{where}: parents[{i}]")) for i, p in enumerate(parents_raw)
    )
    try:
        return Dag(n, parents)
    except ValidationError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def load_dag(path: str | Path) -> Dag:
    return dag_from_obj(_read_json(path), str(path))


def save_dag(path: str | Path, dag: Dag) -> None:
    obj = {"n": dag.n, "parents": [list(p) for p in dag.parents]}
    _write_text(path, canonical_dumps(obj))


# -- classifiers -------------------------------------------------------------

def model_from_obj(obj, where: str = "model") -> GenerativeClassifier:
    domain = _domain_from_obj(obj, where)
    p_plus = _num_list(_require(obj, "p_plus", where), f"{where}: p_plus")
    p_minus = _num_list(_require(obj, "p_minus", where), f"{where}: p_minus")
    try:
        return GenerativeClassifier(domain, np.asarray(p_plus), np.asarray(p_minus))
    except ValidationError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def model_to_obj(model: GenerativeClassifier) -> dict:
    out = _domain_obj_fields(model.domain)
    out["p_plus"] = [float(v) for v in model.p_plus]
    out["p_minus"] = [float(v) for v in model.p_minus]
    return out


def load_model(path: str | Path) -> GenerativeClassifier:
    return model_from_obj(_read_json(path), str(path))


def save_model(path: str | Path, model: GenerativeClassifier) -> None:
    _write_text(path, canonical_dumps(model_to_obj(model)))


# -- decisions ----------------------------------------------------------------

def decision_from_obj(obj, where: str = "decision") -> DecisionFunction:
    domain = _domain_from_obj(obj, where)
    signs = _int_list(_require(obj, "signs", where), f"{where}: signs")
    try:
        return DecisionFunction(domain, np.asarray(signs))
    except ValidationError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def decision_to_obj(phi: DecisionFunction) -> dict:
    out = _domain_obj_fields(phi.domain)
    out["signs"] = [int(s) for s in phi.signs]
    return out


def load_decision(path: str | Path) -> DecisionFunction:
    return decision_from_obj(_read_json(path), str(path))


def save_decision(path: str | Path, phi: DecisionFunction) -> None:
    _write_text(path, canonical_dumps(decision_to_obj(phi)))


# -- factorizations ------------------------------------------------------------

def factorization_to_obj(fac: CliqueFactorization) -> dict:
    terms = [{"vars": [], "values": [float(fac.constant)]}]
    for subset in fac.subsets():
        terms.append(
            {
                "vars": list(subset),
                "values": [float(v) for v in fac.terms[subset].values],
            }
        )
    out = _domain_obj_fields(fac.domain)
    out["base"] = list(fac.base)
    out["terms"] = terms
    return out


def factorization_from_obj(obj, where: str = "factorization") -> CliqueFactorization:
    domain = _domain_from_obj(obj, where)
    base = _int_list(_require(obj, "base", where), f"{where}: base")
    terms_raw = _require(obj, "terms", where)
    if not isinstance(terms_raw, list):
        raise FormatError(f"{where}: terms must be a list")
    constant = 0.0
    terms = {}
    try:
        for k, entry in enumerate(terms_raw):
            variables = _int_list(_require(entry, "vars", f"{where}: terms[{k}]"), f"{where}: terms[{k}].vars")
            values = _num_list(_require(entry, "values", f"{where}: terms[{k}]"), f"{where}: terms[{k}].values")
            if not variables:
                if len(values) != 1:
                    raise FormatError(f"{where}: terms[{k}]: the constant takes one value")
                constant = values[0]
                continue
            sub = tuple(variables)
            terms[sub] = TabularFunction(domain.subdomain(sub), np.asarray(values))
        return CliqueFactorization(domain, tuple(base), constant, terms)
    except ValidationError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def load_factorization(path: str | Path) -> CliqueFactorization:
    return factorization_from_obj(_read_json(path), str(path))


def save_factorization(path: str | Path, fac: CliqueFactorization) -> None:
    _write_text(path, canonical_dumps(factorization_to_obj(fac)))


# -- datasets -------------------------------------------------------------------

_CLASS_CODINGS = {
    "pm1": {"+1": 1, "-1": -1},
    "01": {"1": 1, "0": -1},
}


def _load_labels_file(path: str | Path) -> dict[str, list[str]]:
    obj = _read_json(path)
    columns = _require(obj, "columns", str(path))
    if not isinstance(columns, Mapping):
        raise FormatError(f"{path}: columns must be an object")
    out = {}
    for name, cats in columns.items():
        if not isinstance(cats, list) or not cats:
            raise FormatError(f"{path}: column {name!r} needs a nonempty category list")
        cat_list = [str(c) for c in cats]
        if len(set(cat_list)) != len(cat_list):
            raise FormatError(f"{path}: column {name!r} repeats a category")
        out[str(name)] = cat_list
    return out


def load_dataset(
    path: str | Path,
    class_col: str = "class",
    labels_path: str | Path | None = None,
    class_coding: str = "pm1",
) -> Dataset:
    """Read a CSV of categorical records into a :class:`Dataset`.

    Predictor columns keep their header order.  Categories become indices by
    first appearance, or by the order pinned in ``labels_path``; with a
    labels file an unlisted category is an error.  The resulting domain
    carries the category names as labels either way.
    """
    if class_coding not in _CLASS_CODINGS:
        raise FormatError(f"unknown class coding {class_coding!r}")
    coding = _CLASS_CODINGS[class_coding]
    path = Path(path)
    fixed = _load_labels_file(labels_path) if labels_path is not None else None
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError(f"{path}: empty file") from None
    header = [h.strip() for h in header]
    if class_col not in header:
        raise FormatError(f"{path}: missing class column {class_col!r}")
    class_pos = header.index(class_col)
    predictors = [h for h in header if h != class_col]
    if not predictors:
        raise FormatError(f"{path}: no predictor columns")
    if len(set(header)) != len(header):
        raise FormatError(f"{path}: repeated column name")
    mapping: list[dict[str, int]] = []
    growable: list[bool] = []
    for name in predictors:
        if fixed is not None:
            if name not in fixed:
                raise FormatError(f"{path}: labels file misses column {name!r}")
            mapping.append({c: i for i, c in enumerate(fixed[name])})
            growable.append(False)
        else:
            mapping.append({})
            growable.append(True)
    rows: list[list[int]] = []
    ys: list[int] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise FormatError(
                f"{path}: line {lineno}: {len(row)} fields, expected {len(header)}"
            )
        cls = row[class_pos].strip()
        if cls not in coding:
            raise FormatError(
                f"{path}: line {lineno}: bad class value {cls!r} for coding {class_coding!r}"
            )
        ys.append(coding[cls])
        record = []
        k = 0
        for pos, cell in enumerate(row):
            if pos == class_pos:
                continue
            value = cell.strip()
            table = mapping[k]
            if value not in table:
                if not growable[k]:
                    raise FormatError(
                        f"{path}: line {lineno}: unknown category {value!r} "
                        f"in column {predictors[k]!r}"
                    )
                table[value] = len(table)
            record.append(table[value])
            k += 1
        rows.append(record)
    if not rows:
        raise FormatError(f"{path}: no records")
    cards = tuple(len(t) for t in mapping)
    labels = tuple(
        tuple(sorted(t, key=t.get)) for t in mapping
    )
    try:
        domain = CategoricalDomain(cards, labels)
        return Dataset(domain, np.asarray(rows, dtype=np.int64), np.asarray(ys, dtype=np.int64))
    except ValidationError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def save_dataset(
    path: str | Path, data: Dataset, class_col: str = "class", class_coding: str = "pm1"
) -> None:
    """Write a dataset back to CSV, inventing x0..x{n-1} names if unlabeled."""
    if class_coding not in _CLASS_CODINGS:
        raise FormatError(f"unknown class coding {class_coding!r}")
    back = {v: k for k, v in _CLASS_CODINGS[class_coding].items()}
    names = [f"x{i}" for i in range(data.domain.n)]
    labels = data.domain.labels
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names + [class_col])
        for record, label in zip(data.x, data.y):
            cells = [
                labels[i][v] if labels is not None else str(int(v))
                for i, v in enumerate(record)
            ]
            writer.writerow(cells + [back[int(label)]])
