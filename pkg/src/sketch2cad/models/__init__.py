from .primitive import (
    PrimitiveModelConfig,
    PrimitiveNet,
    PrimitiveOutputs,
    SampleOutputs,
    extract_patches,
    primitive_batch_loss,
    primitive_loss,
)
from .constraint import (
    ConstraintModelConfig,
    ConstraintNet,
    ConstraintOutputs,
    ConstraintSampleOutputs,
    constraint_batch_loss,
    constraint_loss,
    pointer,
)
from .training import (
    OptimConfig,
    checkpoint_id,
    load_checkpoint_config,
    load_model,
    train_constraint,
    train_primitive,
)

__all__ = [
    "ConstraintModelConfig",
    "ConstraintNet",
    "ConstraintOutputs",
    "ConstraintSampleOutputs",
    "OptimConfig",
    "PrimitiveModelConfig",
    "PrimitiveNet",
    "PrimitiveOutputs",
    "SampleOutputs",
    "checkpoint_id",
    "constraint_batch_loss",
    "constraint_loss",
    "extract_patches",
    "load_checkpoint_config",
    "load_model",
    "pointer",
    "primitive_batch_loss",
    "primitive_loss",
    "train_constraint",
    "train_primitive",
]
