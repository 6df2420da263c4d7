"""Model configuration shared by builders, checkpoints and the service."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..motion import control_offsets

KINDS = ("lin_ext", "mlp", "simple_gru", "gru_encdec", "red_style", "autoreg_cnn", "granma")
CONDITIONABLE = ("mlp", "granma")

# models whose raw output is one position per future step; sparse training
# selects control steps from those outputs instead of shrinking the head
DENSE_EMITTERS = ("lin_ext", "simple_gru", "autoreg_cnn")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    """Architecture configuration for one predictor.

    ``output_stride`` is in steps; a stride above ``horizon`` is capped to a
    single control point. ``order`` is the motion order used to densify
    sparse outputs. ``decoder_hidden`` defaults to 2048 for the MLP
    baseline and to ``embedding_width`` otherwise.
    """

    kind: str
    horizon: int = 40
    input_len: int = 10
    output_stride: int = 1
    order: int = 2
    conditioned: bool = False
    embedding_width: int = 128
    decoder_hidden: int | None = None
    heads: int = 4

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}")
        if self.horizon < 1 or self.input_len < 2:
            raise ConfigError(f"bad horizon/input_len {self.horizon}/{self.input_len}")
        if self.output_stride < 1:
            raise ConfigError(f"output_stride must be >= 1, got {self.output_stride}")
        if self.output_stride > self.horizon:
            object.__setattr__(self, "output_stride", self.horizon)
        if not 1 <= self.order <= 4:
            raise ConfigError(f"motion order must be 1..4, got {self.order}")
        if self.conditioned and self.kind not in CONDITIONABLE:
            raise ConfigError(
                f"full-trajectory conditioning is only supported for {CONDITIONABLE}, "
                f"not {self.kind!r}")
        if self.input_len < self.order:
            raise ConfigError(
                f"input_len {self.input_len} too short for order-{self.order} anchor derivatives")
        if self.kind == "granma" and self.embedding_width % self.heads != 0:
            raise ConfigError(
                f"embedding_width {self.embedding_width} not divisible by {self.heads} heads")

    @property
    def hidden_width(self) -> int:
        if self.decoder_hidden is not None:
            return self.decoder_hidden
        return 2048 if self.kind == "mlp" else self.embedding_width

    @property
    def offsets(self) -> list[int]:
        return control_offsets(self.horizon, self.output_stride)

    @property
    def n_controls(self) -> int:
        return len(self.offsets)

    @property
    def window_len(self) -> int:
        return self.input_len + self.horizon

    @property
    def emits_dense(self) -> bool:
        return self.kind in DENSE_EMITTERS

    @property
    def n_out_agents(self) -> int:
        return 11 if self.conditioned else 23

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "ModelSpec":
        allowed = {f for f in ModelSpec.__dataclass_fields__}
        return ModelSpec(**{k: v for k, v in d.items() if k in allowed})
