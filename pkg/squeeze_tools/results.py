"""Run results: everything a command emits is written as one of these."""

from __future__ import annotations

import csv
from io import StringIO
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterable, List, Mapping, Optional, Type, Union

import numpy as np

from ._compat import json_dumps
from .analysis import SqueezingCurve
from .constants import FRAME_SUFFIX
from .imaging import ImageFrame

if TYPE_CHECKING:
    from .types import TJSON, TFloatArray


class Result:
    """A base class for the files of a run.

    :param content: The file body
    :type content: str | bytes
    :param name: The file name without a suffix
    :type name: str
    """

    suffix: str = ".txt"
    name: str = "result"

    def __init__(self, content, *, name: Optional[str] = None):
        self.content = self.process_content(content)
        if name is not None:
            self.name = name

    def __str__(self) -> str:
        return self.filename

    def __repr__(self) -> str:
        return f"<{ self.__class__.__name__ } '{ self }'>"

    @property
    def filename(self) -> str:
        return f"{self.name}{self.suffix}"

    @staticmethod
    def process_content(content) -> bytes:
        if not isinstance(content, bytes):
            return str(content).encode("utf-8")
        return content

    def write(self, directory: Union[str, Path]) -> Path:
        """Write the content into `directory` and return the path."""
        path = Path(directory) / self.filename
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.content)
        return path


class ResultText(Result):
    """Plain text results."""


class ResultJSON(Result):
    """JSON records, through the fastest available json library."""

    suffix = ".json"

    @staticmethod
    def process_content(content: TJSON) -> bytes:
        return json_dumps(content)


def format_value(value: Any) -> str:
    """Format a table cell, floats are written exactly."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


class ResultCSV(Result):
    """A table of named columns.

    Accepts a mapping of equally long columns or anything with a
    ``columns()`` method returning one (e.g. :class:`SqueezingCurve`).
    """

    suffix = ".csv"

    @staticmethod
    def process_content(content) -> bytes:
        if isinstance(content, (bytes, str)):
            return Result.process_content(content)

        columns: Mapping[str, TFloatArray] = (
            content.columns() if hasattr(content, "columns") else content
        )
        return render_table(columns.keys(), zip(*columns.values()))


def render_table(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> bytes:
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([format_value(value) for value in row] for row in rows)
    return buffer.getvalue().encode("utf-8")


class ResultFrame(Result):
    """A binary frame raster."""

    suffix = FRAME_SUFFIX

    @staticmethod
    def process_content(content) -> bytes:
        if isinstance(content, ImageFrame):
            return content.to_bytes()
        return Result.process_content(content)


CAST_RESULT: Mapping[Type, Type[Result]] = {
    bytes: Result,
    dict: ResultJSON,
    list: ResultJSON,
    str: ResultText,
    ImageFrame: ResultFrame,
    SqueezingCurve: ResultCSV,
}


def parse_result(result, name: Optional[str] = None) -> Result:
    """Convert the given object into a :class:`Result`."""
    if isinstance(result, Result):
        if name is not None:
            result.name = name
        return result

    result_type = CAST_RESULT.get(type(result))
    if result_type:
        return result_type(result, name=name)

    return ResultText(str(result), name=name)


def parse_results(results) -> List[Result]:
    """Normalize a command's return value into a list of results."""
    if results is None:
        return []

    if isinstance(results, tuple):
        return [parse_result(result) for result in results]

    return [parse_result(results)]
