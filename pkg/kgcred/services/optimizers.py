"""Sparse-row optimizers for embedding parameters."""

from typing import Dict

import numpy as np

from ..models.parameters import ModelParameters, Gradient
from ..models.training import TrainingConfig
from ..utils.errors import TrainingDivergedError, KGCredError

DENSE_SLOTS = ('filters', 'bias', 'dense')


class Optimizer:
    """
    Base optimizer. Only rows present in the gradient are updated; state of
    untouched rows is left unchanged.
    """

    def __init__(self, lr: float):
        if not lr > 0:
            raise KGCredError(f"learning rate must be positive, got {lr}")
        self.lr = lr
        self.state: Dict[str, Dict[str, np.ndarray]] = {}

    def _slot_state(self, slot: str, name: str, shape: tuple, dtype=np.float64) -> np.ndarray:
        slot_state = self.state.setdefault(slot, {})
        if name not in slot_state:
            slot_state[name] = np.zeros(shape, dtype=dtype)
        return slot_state[name]

    def _delta(self, slot: str, shape: tuple, ids: np.ndarray, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _apply(self, slot: str, tensor: np.ndarray, ids: np.ndarray, grad: np.ndarray) -> None:
        if len(ids) == 0:
            return
        tensor[ids] = tensor[ids] - self._delta(slot, tensor.shape, ids, grad)

    def step(self, params: ModelParameters, grad: Gradient) -> None:
        """
        Apply one update in place.

        Raises:
            TrainingDivergedError: if the gradient holds non-finite values
        """
        if not grad.is_finite():
            raise TrainingDivergedError("non-finite gradient")
        self._apply('entities', params.entities, grad.entity_ids, grad.entity_rows)
        self._apply('relations', params.relations, grad.relation_ids, grad.relation_rows)
        for slot in DENSE_SLOTS:
            values = getattr(grad, slot)
            tensor = getattr(params, slot)
            if values is not None and tensor is not None:
                self._apply(slot, tensor, np.arange(tensor.shape[0]), values)


class SGD(Optimizer):
    """theta <- theta - lr * g."""

    def _delta(self, slot, shape, ids, grad):
        return self.lr * grad


class Adagrad(Optimizer):
    """Accumulated squared gradients scale each coordinate's step."""

    def __init__(self, lr: float, epsilon: float = 1e-8):
        super().__init__(lr)
        self.epsilon = epsilon

    def _delta(self, slot, shape, ids, grad):
        accumulator = self._slot_state(slot, 'accumulator', shape)
        accumulator[ids] += grad * grad
        return self.lr * grad / (np.sqrt(accumulator[ids]) + self.epsilon)


class Adam(Optimizer):
    """First/second moment estimates with per-row bias correction."""

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        super().__init__(lr)
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon

    def _delta(self, slot, shape, ids, grad):
        first = self._slot_state(slot, 'first_moment', shape)
        second = self._slot_state(slot, 'second_moment', shape)
        steps = self._slot_state(slot, 'steps', (shape[0],), dtype=np.int64)

        steps[ids] += 1
        first[ids] = self.beta1 * first[ids] + (1 - self.beta1) * grad
        second[ids] = self.beta2 * second[ids] + (1 - self.beta2) * grad * grad
        t = steps[ids].reshape((-1,) + (1,) * (len(shape) - 1)).astype(np.float64)
        first_hat = first[ids] / (1 - self.beta1 ** t)
        second_hat = second[ids] / (1 - self.beta2 ** t)
        return self.lr * first_hat / (np.sqrt(second_hat) + self.epsilon)


class Momentum(Optimizer):
    """Heavy-ball velocity: v <- mu * v + g; theta <- theta - lr * v."""

    def __init__(self, lr: float, momentum: float = 0.9):
        super().__init__(lr)
        self.momentum = momentum

    def _delta(self, slot, shape, ids, grad):
        velocity = self._slot_state(slot, 'velocity', shape)
        velocity[ids] = self.momentum * velocity[ids] + grad
        return self.lr * velocity[ids]


def make_optimizer(config: TrainingConfig) -> Optimizer:
    """Instantiate the optimizer a training config names."""
    if config.optimizer == 'sgd':
        return SGD(config.lr)
    if config.optimizer == 'adagrad':
        return Adagrad(config.lr, epsilon=config.epsilon)
    if config.optimizer == 'adam':
        return Adam(config.lr, beta1=config.beta1, beta2=config.beta2, epsilon=config.epsilon)
    if config.optimizer == 'momentum':
        return Momentum(config.lr, momentum=config.momentum)
    raise KGCredError(f"unknown optimizer {config.optimizer!r}")
