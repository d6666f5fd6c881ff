from __future__ import annotations

from typing import TYPE_CHECKING, Any, Callable, Mapping, Tuple, TypeVar, Union

import numpy as np
import numpy.typing as npt

if TYPE_CHECKING:
    from .app import Invocation

TFloatArray = npt.NDArray[np.float64]
TIntArray = npt.NDArray[np.int64]
TBoolArray = npt.NDArray[np.bool_]
TComplexArray = npt.NDArray[np.complex128]

TDims = Tuple[int, int, int]

TEstimator = Callable[[TFloatArray], Union[float, TFloatArray]]
TCommand = Callable[["Invocation"], Any]
TErrorHandler = Callable[["Invocation", BaseException], int]
TJSON = Union[None, bool, int, float, str, list, Mapping[str, Any]]

TVCommand = TypeVar("TVCommand", bound=TCommand)
TVErrorHandler = TypeVar("TVErrorHandler", bound=TErrorHandler)
