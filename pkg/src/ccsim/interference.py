"""Cache-aided transmitter cooperation.

K_T independent transmitters, each caching a fraction gamma_T = M_T/N of the
library, jointly emulate L = K_T * L_T * gamma_T transmit antennas: for any
given subfile, exactly the transmitters that cache its file precode it, with
no data exchanged between transmitters. Placement is the consecutive modular
rule, so every file lands on exactly K_T * gamma_T transmitters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .formulas import subpacketization_grouped
from .delivery import DeliveryReport, run_grouped_delivery
from .placement import build_placement


@dataclass(frozen=True)
class TransmitterPlacement:
    """Which transmitter holds which whole files, plus antenna bookkeeping.

    Antenna (m, l) of transmitter m maps to global index (m-1)*L_T + l; the
    active antennas of a file are the ordered concatenation over its caching
    transmitters.
    """

    K_T: int
    M_T: int
    N: int
    L_T: int
    per_tx_files: tuple[frozenset[int], ...]

    @property
    def gamma_T(self) -> Fraction:
        return Fraction(self.M_T, self.N)

    @property
    def redundancy(self) -> int:
        """Transmitters caching each file: K_T * gamma_T."""
        return self.K_T * self.M_T // self.N

    @property
    def emulated_antennas(self) -> int:
        """Antennas jointly serving each subfile: K_T * L_T * gamma_T."""
        return self.redundancy * self.L_T

    @property
    def total_antennas(self) -> int:
        return self.K_T * self.L_T

    def caching_transmitters(self, file_id: int) -> tuple[int, ...]:
        if not 1 <= file_id <= self.N:
            raise ParameterError(f"file {file_id} outside 1..{self.N}")
        return tuple(m for m in range(1, self.K_T + 1)
                     if file_id in self.per_tx_files[m - 1])

    def antenna_indices(self, file_id: int) -> np.ndarray:
        """Global (0-based) indices of the antennas allowed to carry the file."""
        idx = [(m - 1) * self.L_T + l
               for m in self.caching_transmitters(file_id)
               for l in range(self.L_T)]
        return np.asarray(idx, dtype=np.intp)

    def to_text(self) -> str:
        lines = [
            f"K_T: {self.K_T}",
            f"M_T: {self.M_T}",
            f"N: {self.N}",
            f"L_T: {self.L_T}",
            f"gamma_T: {self.gamma_T}",
            f"redundancy: {self.redundancy}",
            f"emulated_antennas: {self.emulated_antennas}",
        ]
        for m, files in enumerate(self.per_tx_files, start=1):
            lines.append(f"tx {m}: " + " ".join(map(str, sorted(files))))
        return "\n".join(lines) + "\n"


def build_transmitter_caches(K_T: int, M_T: int, N: int,
                             L_T: int = 1) -> TransmitterPlacement:
    """Consecutive modular placement: transmitter m caches files
    1+(n-1) mod N for n in (m-1)*M_T+1 .. m*M_T.

    Needs M_T <= N and N | K_T*M_T so the per-file redundancy is an integer.
    """
    if min(K_T, M_T, N, L_T) < 1:
        raise ParameterError("K_T, M_T, N and L_T must all be >= 1")
    if M_T > N:
        raise ParameterError(f"M_T={M_T} cannot exceed the library size N={N}")
    if (K_T * M_T) % N:
        raise ParameterError(
            f"per-file redundancy K_T*M_T/N = {K_T * M_T}/{N} must be an "
            "integer")
    per_tx = tuple(
        frozenset(1 + (n - 1) % N
                  for n in range(1 + (m - 1) * M_T, m * M_T + 1))
        for m in range(1, K_T + 1))
    placement = TransmitterPlacement(K_T=K_T, M_T=M_T, N=N, L_T=L_T,
                                     per_tx_files=per_tx)
    want = placement.redundancy
    for file_id in range(1, N + 1):
        copies = sum(file_id in files for files in per_tx)
        if copies != want:
            raise ParameterError(
                f"modular placement broke redundancy for file {file_id}: "
                f"{copies} != {want}")
    return placement


def ic_subpacketization(K: int, t: int, K_T: int, gamma_T: Fraction,
                        L_T: int = 1) -> int:
    """Subfiles per file in the interference scenario:
    C(K / (K_T*L_T*gamma_T), t / (K_T*L_T*gamma_T)) with t = K*gamma."""
    emulated = Fraction(K_T) * Fraction(gamma_T) * L_T
    if emulated.denominator != 1 or emulated < 1:
        raise ParameterError(
            f"emulated antenna count K_T*L_T*gamma_T = {emulated} must be a "
            "positive integer")
    return subpacketization_grouped(K, int(emulated), t)


def run_ic_delivery(K: int, gamma: Fraction,
                    tx_placement: TransmitterPlacement,
                    requests: Sequence[int], seed: int,
                    **options) -> DeliveryReport:
    """Simulate delivery with distributed cache-aided transmitters.

    Groups hold L = emulated_antennas users; per subfile only the antennas of
    its caching transmitters carry energy, and the zero-forcing precoders are
    computed from the square channel between those antennas and the target
    group. Reports follow the same contract as the broadcast runner, with
    K_T=1, gamma_T=1, L_T=L reproducing it bit for bit on matched seeds.
    """
    requests = tuple(int(r) for r in requests)
    if any(not 1 <= r <= tx_placement.N for r in requests):
        raise ParameterError(
            f"requests must name files in 1..{tx_placement.N}")
    L = tx_placement.emulated_antennas
    layout = build_placement(K, L, Fraction(gamma), tx_placement.N,
                             options.get("algorithm"))
    active = {user: tx_placement.antenna_indices(requests[user - 1])
              for user in range(1, K + 1)}
    return run_grouped_delivery(layout, requests, seed,
                                transmit_antennas=tx_placement.total_antennas,
                                active_antennas=active, **options)
