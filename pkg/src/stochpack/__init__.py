"""Online bin packing under i.i.d. and random-order arrivals."""

__version__ = "0.1.0"
