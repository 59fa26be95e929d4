"""Configuration and report types for the surrogate trainer."""

from dataclasses import dataclass

from ._errors import is_int, require

INPUT_ROWS = 128
INPUT_COLS = 32
TOKEN_COUNT = 64
TOKEN_LENGTH = 64
TARGET_ROWS = 15
TARGET_COLS = 32
MAX_ELEMENTS = 16


@dataclass(frozen=True)
class SurrogateConfig:
    """Hyperparameters for the encoder-regression surrogate.

    Attributes
    ----------
    encoder_layers : int
        Number of stacked encoder blocks.
    heads : int
        Attention heads per block; must divide `model_width`.
    model_width : int
        Embedding width carried through the encoder.
    token_count, token_length : int
        Token grid for the input reshape. The input is always a 128x32
        matrix split into consecutive row pairs, so both are pinned at 64.
    coarse_lr, coarse_epochs, weight_decay : float, int, float
        First training phase (AdamW).
    fine_lr, fine_momentum, fine_epochs : float, float, int
        Second training phase (momentum SGD).
    batch_size : int
        Records per optimizer step.
    val_fraction : float
        Fraction of records held out for validation by the seeded split.
    seed : int
        Seeds both the split and the torch parameter/shuffle RNG.
    """

    encoder_layers: int = 16
    heads: int = 8
    model_width: int = 256
    token_count: int = TOKEN_COUNT
    token_length: int = TOKEN_LENGTH
    coarse_lr: float = 1e-5
    coarse_epochs: int = 200
    weight_decay: float = 0.01
    fine_lr: float = 1e-7
    fine_momentum: float = 0.1
    fine_epochs: int = 300
    batch_size: int = 32
    val_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for field in ("encoder_layers", "heads", "model_width",
                      "coarse_epochs", "fine_epochs", "batch_size"):
            require(is_int(getattr(self, field)) and getattr(self, field) >= 1,
                    f"config.{field}", "must be a positive integer")
        require(self.model_width % self.heads == 0,
                "config.model_width", "must be divisible by heads")
        require(self.token_count == TOKEN_COUNT,
                "config.token_count", f"must be {TOKEN_COUNT} (row-pair tokens)")
        require(self.token_length == TOKEN_LENGTH,
                "config.token_length", f"must be {TOKEN_LENGTH} (row-pair tokens)")
        for field in ("coarse_lr", "fine_lr"):
            value = getattr(self, field)
            require(isinstance(value, (int, float)) and not isinstance(value, bool)
                    and value > 0, f"config.{field}", "must be > 0")
        require(isinstance(self.weight_decay, (int, float))
                and self.weight_decay >= 0, "config.weight_decay", "must be >= 0")
        require(isinstance(self.fine_momentum, (int, float))
                and 0 <= self.fine_momentum < 1,
                "config.fine_momentum", "must be in [0, 1)")
        require(isinstance(self.val_fraction, float) and 0 < self.val_fraction < 1,
                "config.val_fraction", "must be strictly between 0 and 1")
        require(is_int(self.seed) and self.seed >= 0,
                "config.seed", "must be a non-negative integer")


@dataclass(frozen=True)
class EvalReport:
    """Held-out metrics: masked-entry MAE and averaged per-record cosine."""

    mae: float
    cosine_similarity: float
    train_size: int
    val_size: int

    def __post_init__(self):
        require(self.mae >= 0, "report.mae", "must be >= 0")
        require(-1.0 <= self.cosine_similarity <= 1.0,
                "report.cosine_similarity", "must lie in [-1, 1]")
        require(is_int(self.train_size) and self.train_size >= 0,
                "report.train_size", "must be a non-negative integer")
        require(is_int(self.val_size) and self.val_size >= 0,
                "report.val_size", "must be a non-negative integer")
