"""Float64 tensors with gradient slots, and named parameter stores."""

from __future__ import annotations

import numpy as np


class ShapeError(ValueError):
    """Raised when operand dimensions do not line up."""


class Tensor:
    """A dense float64 array plus an optional same-shape gradient array."""

    __slots__ = ("values", "grad")

    def __init__(self, values):
        self.values = np.ascontiguousarray(values, dtype=np.float64)
        self.grad: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def ensure_grad(self) -> np.ndarray:
        if self.grad is None:
            self.grad = np.zeros_like(self.values)
        return self.grad

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.values.shape})"


class ParamStore:
    """Ordered name -> Tensor map with per-parameter trainable flags."""

    def __init__(self):
        self._params: dict[str, Tensor] = {}
        self._trainable: dict[str, bool] = {}

    def add(self, name: str, values, trainable: bool = True) -> Tensor:
        if name in self._params:
            raise ValueError(f"duplicate parameter {name!r}")
        t = Tensor(values)
        self._params[name] = t
        self._trainable[name] = bool(trainable)
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> list[str]:
        return list(self._params)

    def is_trainable(self, name: str) -> bool:
        return self._trainable[name]

    def set_trainable(self, name: str, flag: bool) -> None:
        if name not in self._params:
            raise KeyError(name)
        self._trainable[name] = bool(flag)

    def freeze_prefix(self, prefix: str) -> list[str]:
        """Mark every parameter whose name starts with prefix as frozen."""
        hit = [n for n in self._params if n.startswith(prefix)]
        for n in hit:
            self._trainable[n] = False
        return hit

    def zero_grads(self) -> None:
        for t in self._params.values():
            t.grad = None

    def state_dict(self) -> dict[str, np.ndarray]:
        return {n: t.values.copy() for n, t in self._params.items()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        for n, arr in state.items():
            t = self._params[n]
            if t.values.shape != arr.shape:
                raise ShapeError(f"{n}: stored {arr.shape} vs live {t.values.shape}")
            t.values[...] = arr

    def num_values(self) -> int:
        return sum(t.values.size for t in self._params.values())
