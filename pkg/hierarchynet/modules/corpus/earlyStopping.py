from dataclasses import dataclass, field
from typing import List, Optional


@dataclass
class EarlyStopping:
    """
    Stops once the validation metric (higher is better) has not improved for
    `patience` consecutive epochs. With patience 0 the first non-improving epoch stops.
    """
    patience: int = 20
    history: List[float] = field(default_factory=list)
    best: Optional[float] = None
    best_epoch: int = -1
    stale: int = 0

    def update(self, metric: float) -> bool:
        """Record one epoch; True when this epoch is the new best."""
        self.history.append(metric)
        if self.best is None or metric > self.best:
            self.best = metric
            self.best_epoch = len(self.history) - 1
            self.stale = 0
            return True
        self.stale += 1
        return False

    @property
    def should_stop(self) -> bool:
        if self.patience <= 0:
            return self.stale > 0
        return self.stale >= self.patience

    def to_dict(self) -> dict:
        return {"patience": self.patience, "best": self.best, "best_epoch": self.best_epoch,
                "history": list(self.history)}


def early_stopping(history: List[float], patience: int) -> bool:
    """Whether training would have stopped after the last epoch of `history`."""
    stopper = EarlyStopping(patience)
    for value in history:
        stopper.update(value)
        if stopper.should_stop:
            return True
    return False
