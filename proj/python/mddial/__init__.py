"""Multi-dimensional statistical dialogue management lab."""

try:
    from ._mddial import (
        Database,
        compute_returns,
        enumerate_combinations,
        informable_slots,
        parse_act,
        requestable_slots,
        serialize_act,
        slot_values,
        train,
    )
except ImportError:  # running against a build tree: the module is top-level
    from _mddial import (
        Database,
        compute_returns,
        enumerate_combinations,
        informable_slots,
        parse_act,
        requestable_slots,
        serialize_act,
        slot_values,
        train,
    )

__all__ = [
    "Database",
    "compute_returns",
    "enumerate_combinations",
    "informable_slots",
    "parse_act",
    "requestable_slots",
    "serialize_act",
    "slot_values",
    "train",
]
