"""Dataclass configuration for the emulated two-spin device.

DeviceConfig captures the fixed molecular and pulse calibration values of
the emulated machine; NoiseSpec captures the thermal-relaxation parameters
attached to gate execution. Both serialize to small flat JSON objects.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Any, Mapping


@dataclass(frozen=True)
class DeviceConfig:
    """Calibration of the emulated two-spin register.

    Qubit 1 is the proton, qubit 2 the phosphorus nucleus. j_coupling_hz
    is the scalar coupling between them; t90 values are the calibrated
    90-degree pulse durations per spin; t1/t2 are per-spin relaxation
    times used by the pseudo-pure-state preparation.
    """

    j_coupling_hz: float = 697.4
    larmor_1_mhz: float = 42.6
    larmor_2_mhz: float = 17.2
    t90_1_s: float = 10e-6
    t90_2_s: float = 20e-6
    t1_1_s: float = 4.0
    t1_2_s: float = 7.2
    t2_1_s: float = 0.3
    t2_2_s: float = 0.5

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not (value > 0):
                raise ValueError(f"DeviceConfig field {name} must be positive, got {value}")

    def t90(self, spin: int) -> float:
        return self._per_spin(spin, self.t90_1_s, self.t90_2_s)

    def t1(self, spin: int) -> float:
        return self._per_spin(spin, self.t1_1_s, self.t1_2_s)

    def t2(self, spin: int) -> float:
        return self._per_spin(spin, self.t2_1_s, self.t2_2_s)

    def larmor_mhz(self, spin: int) -> float:
        return self._per_spin(spin, self.larmor_1_mhz, self.larmor_2_mhz)

    @staticmethod
    def _per_spin(spin: int, first: float, second: float) -> float:
        if spin == 1:
            return first
        if spin == 2:
            return second
        raise ValueError(f"spin must be 1 or 2, got {spin}")


@dataclass(frozen=True)
class NoiseSpec:
    """Thermal-relaxation noise attached to gate execution.

    t1_s and t2_star_s are the shared relaxation and effective dephasing
    times; t_1q_s and t_2q_s are the durations charged to single- and
    two-qubit gates. The spec requires t2_star <= 2 t1 so the derived
    dephasing probability stays well defined.
    """

    t1_s: float = 5.6
    t2_star_s: float = 0.025
    t_1q_s: float = 25e-6
    t_2q_s: float = 800e-6

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not (value > 0):
                raise ValueError(f"NoiseSpec field {name} must be positive, got {value}")
        if self.t2_star_s > 2.0 * self.t1_s:
            raise ValueError(
                f"t2_star_s={self.t2_star_s} exceeds 2*t1_s={2.0 * self.t1_s}; "
                "dephasing probability would be negative"
            )

    def to_payload(self) -> dict[str, float]:
        return {
            "t1_s": self.t1_s,
            "t2_star_s": self.t2_star_s,
            "t_1q_s": self.t_1q_s,
            "t_2q_s": self.t_2q_s,
        }

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any]) -> "NoiseSpec":
        required = ("t1_s", "t2_star_s", "t_1q_s", "t_2q_s")
        unknown = set(payload) - set(required)
        if unknown:
            raise ValueError(f"unknown NoiseSpec fields: {sorted(unknown)}")
        values = {}
        for key in required:
            if key not in payload:
                raise ValueError(f"NoiseSpec payload missing field {key!r}")
            value = payload[key]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"NoiseSpec field {key!r} must be a number")
            values[key] = float(value)
        return cls(**values)
