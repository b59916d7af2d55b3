from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import TreeShapeError


class LambdaBeta(BaseModel):
    """Beta(a, b) measure driving the multiple-merger coalescent. Beta(1, 1) is Bolthausen-Sznitman."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(default=1.0, gt=0)
    b: float = Field(default=1.0, gt=0)

    @classmethod
    def from_alpha(cls, alpha: float) -> "LambdaBeta":
        """The Beta(2 - alpha, alpha) family; alpha = 1 is Beta(1, 1)."""
        if not 0 < alpha < 2:
            raise TreeShapeError(f"alpha must lie in (0, 2), got {alpha}")
        return cls(a=2.0 - alpha, b=alpha)
