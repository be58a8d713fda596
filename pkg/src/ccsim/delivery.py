"""Physical-layer simulation of the grouped multicast delivery.

Per transmission slot the simulator draws (or reuses) a fading realization,
builds one zero-forcing precoder per served user from the normalized inverse
of that user's group channel, superposes all precoded subfile symbols into a
single transmit vector, and runs the two-stage receiver: cache-out of every
out-of-group term, then nulling of the in-group interference.

Payload model: one unit-magnitude complex symbol per (file, subfile) pair,
with uniformly drawn argument. DoF-level verification only needs the linear
independence structure, so file sizes in bits are abstracted away.

Randomness: every draw derives from ``SeedSequence((seed, stream, *key))``.
Stream 0 feeds the payload symbols, stream 1 the channel (keyed by the
1-based clique counter, or 0 when the channel is frozen, plus the redraw
attempt), stream 2 the additive noise (keyed by the clique counter). Repeat
runs with equal seeds are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import DecodeError, NumericalDegeneracyError, ParameterError
from .formulas import SystemParams
from .placement import (Clique, MNAlgorithm, PlacementLayout, SingleStreamAlgorithm,
                        SubfileIndex, build_placement)

ZF_TOLERANCE = 1e-10        # allowed |h^T v| per nulled cross term, relative to |h|
CONDITION_LIMIT = 1e8       # group-channel condition number that triggers a redraw
GAIN_FLOOR = 1e-6           # minimum |h^T v| of the desired stream
RETRY_CAP = 8

_PAYLOAD_STREAM = 0
_CHANNEL_STREAM = 1
_NOISE_STREAM = 2


def _rng(seed: int, stream: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, stream) + key))


def _check_seed(seed: int) -> int:
    if seed < 0:
        raise ParameterError(f"seed must be nonnegative, got {seed}")
    return int(seed)


@dataclass(frozen=True)
class ChannelRealization:
    """One fading realization. Row k-1 of H is the channel of user k; entries
    are i.i.d. circularly-symmetric complex Gaussian with unit variance."""

    H: np.ndarray
    noise_power: float
    seed: int
    snr_db: float | None = None


def draw_channel(K: int, L: int, seed: int, noise_power: float = 0.0,
                 snr_db: float | None = None,
                 subkey: tuple[int, ...] = ()) -> ChannelRealization:
    """Draw a K x L channel matrix, reproducible from the seed.

    snr_db, when given, overrides noise_power with 10**(-snr_db/10), the
    noise variance matching unit-power payload symbols. subkey extends the
    seed derivation for per-clique draws.
    """
    if K < 1 or L < 1:
        raise ParameterError(f"need K, L >= 1, got K={K}, L={L}")
    if noise_power < 0:
        raise ParameterError(f"noise_power must be >= 0, got {noise_power}")
    rng = _rng(_check_seed(seed), _CHANNEL_STREAM, *subkey)
    H = (rng.standard_normal((K, L)) + 1j * rng.standard_normal((K, L)))
    H /= math.sqrt(2)
    H.flags.writeable = False
    if snr_db is not None:
        noise_power = 10.0 ** (-snr_db / 10.0)
    return ChannelRealization(H=H, noise_power=float(noise_power),
                              seed=seed, snr_db=snr_db)


def draw_payloads(num_files: int, num_subfiles: int, seed: int) -> np.ndarray:
    """Unit-magnitude symbol per (file, subfile), argument uniform in [0, 2pi)."""
    rng = _rng(_check_seed(seed), _PAYLOAD_STREAM)
    phases = rng.random((num_files, num_subfiles))
    return np.exp(2j * np.pi * phases)


@dataclass(frozen=True)
class PrecoderSet:
    """Unit-norm per-user precoders. vector(g, k) is supported on user k's
    active antennas and lies in the null space of the channels of the other
    members of group g."""

    vectors: Mapping[tuple[int, int], np.ndarray]

    @property
    def transmit_antennas(self) -> int:
        return next(iter(self.vectors.values())).shape[0]

    def vector(self, group: int, user: int) -> np.ndarray:
        return self.vectors[(group, user)]


def compute_precoders(channel: ChannelRealization,
                      groups: Sequence[Sequence[int]], *,
                      active_antennas: Mapping[int, np.ndarray] | None = None,
                      zf_tolerance: float = ZF_TOLERANCE,
                      condition_limit: float = CONDITION_LIMIT) -> PrecoderSet:
    """Zero-forcing precoders: the k-th normalized column of the inverse of
    each group's square channel submatrix.

    active_antennas restricts, per user, which transmit antennas may carry
    that user's subfile (cache-aided transmitter constraint). Every active
    set must have exactly as many antennas as the group has members; with
    None all antennas are active. Single-member groups need no nulling and
    use the trivial precoder 1.

    Raises NumericalDegeneracyError when a submatrix condition estimate
    (Frobenius norm product) exceeds condition_limit or a nulling residual
    exceeds zf_tolerance * |h|; callers redraw.
    """
    H = channel.H
    n_tx = H.shape[1]
    full = np.arange(n_tx)
    row_norms = np.linalg.norm(H, axis=1)
    vectors: dict[tuple[int, int], np.ndarray] = {}
    for g, members in enumerate(groups, start=1):
        rows = np.asarray(members, dtype=np.intp) - 1
        L = rows.size
        inverses: dict[bytes, tuple[np.ndarray, np.ndarray]] = {}
        for pos, user in enumerate(members):
            active = full if active_antennas is None else \
                np.asarray(active_antennas[user], dtype=np.intp)
            if active.size != L:
                raise ParameterError(
                    f"user {user}: {active.size} active antennas for a "
                    f"group of {L} members")
            v = np.zeros(n_tx, dtype=complex)
            if L == 1:
                v[active] = 1.0
            else:
                key = active.tobytes()
                if key not in inverses:
                    sub = H[np.ix_(rows, active)]
                    try:
                        inv = np.linalg.inv(sub)
                    except np.linalg.LinAlgError as exc:
                        raise NumericalDegeneracyError(
                            f"group {g} channel is singular") from exc
                    if np.linalg.norm(sub) * np.linalg.norm(inv) > condition_limit:
                        raise NumericalDegeneracyError(
                            f"group {g} channel condition estimate above "
                            f"{condition_limit:g}")
                    inverses[key] = (sub, inv)
                sub, inv = inverses[key]
                column = inv[:, pos]
                v[active] = column / np.linalg.norm(column)
                residual = np.abs(sub @ v[active])
                residual[pos] = 0.0
                if np.any(residual > zf_tolerance * row_norms[rows]):
                    raise NumericalDegeneracyError(
                        f"nulling residual for group {g} exceeds tolerance")
            v.flags.writeable = False
            vectors[(g, user)] = v
    return PrecoderSet(vectors)


def build_transmission(clique: Clique, layout: PlacementLayout,
                       requests: Sequence[int], payloads: np.ndarray,
                       precoders: PrecoderSet) -> np.ndarray:
    """Superpose the precoded subfile symbols of every user served in the
    clique into one transmit vector."""
    x = np.zeros(precoders.transmit_antennas, dtype=complex)
    for group, tau in zip(clique.groups, clique.subfiles):
        tau_index = layout.tau_family.index_of(tau)
        for user in layout.group_members(group):
            symbol = payloads[requests[user - 1] - 1, tau_index]
            x += symbol * precoders.vector(group, user)
    return x


def cache_out_terms(user: int, clique: Clique, layout: PlacementLayout,
                    precoders: PrecoderSet,
                    channel: ChannelRealization) -> dict[tuple[int, int, int], complex]:
    """Stage-one decode plan at a served user: for every out-of-group summand
    of the clique, the coefficient the receiver reproduces from its channel
    and precoder knowledge. Keys are (group, user, tau_index)."""
    own = layout.group_of(user)
    h = channel.H[user - 1]
    terms: dict[tuple[int, int, int], complex] = {}
    for group, tau in zip(clique.groups, clique.subfiles):
        if group == own:
            continue
        tau_index = layout.tau_family.index_of(tau)
        for j in layout.group_members(group):
            terms[(group, j, tau_index)] = complex(h @ precoders.vector(group, j))
    return terms


def receive_and_decode(user: int, y: complex, channel: ChannelRealization,
                       layout: PlacementLayout, precoders: PrecoderSet,
                       payloads: np.ndarray, requests: Sequence[int],
                       clique: Clique, *, gain_floor: float = GAIN_FLOOR) -> complex:
    """Recover the subfile symbol meant for a served user.

    Stage one subtracts every out-of-group term using cached payloads (those
    subsets all contain the user's own group, so the payloads are in cache).
    Stage two leaves the in-group interference to the zero-forcing structure
    and divides by the desired stream's gain.
    """
    own = layout.group_of(user)
    if own not in clique.groups:
        raise ParameterError(f"user {user} is not served in this clique")
    residual = complex(y)
    for (_, j, tau_index), coeff in cache_out_terms(
            user, clique, layout, precoders, channel).items():
        residual -= payloads[requests[j - 1] - 1, tau_index] * coeff
    gain = complex(channel.H[user - 1] @ precoders.vector(own, user))
    if abs(gain) < gain_floor:
        raise NumericalDegeneracyError(
            f"stream gain {abs(gain):.3e} for user {user} below {gain_floor:g}")
    return residual / gain


def verify_clique_symbolically(clique: Clique, layout: PlacementLayout,
                               requests: Sequence[int],
                               channel: ChannelRealization,
                               precoders: PrecoderSet,
                               x: np.ndarray | None = None,
                               payloads: np.ndarray | None = None, *,
                               zf_tolerance: float = ZF_TOLERANCE,
                               gain_floor: float = GAIN_FLOOR) -> None:
    """Coefficient bookkeeping oracle for one clique.

    For every served receiver, rebuilds the transmitter-side coefficient of
    each summand and checks that (a) the decoder's cache-out plan names
    exactly the out-of-group terms with bit-identical coefficients, so the
    subtraction is exact rather than approximate, (b) in-group cross
    coefficients sit below the nulling tolerance, (c) the desired stream gain
    is bounded away from zero, and (d), when the transmit vector and payloads
    are supplied, the tabulated terms reproduce the actually received signal.
    """
    family = layout.tau_family
    for group, tau in zip(clique.groups, clique.subfiles):
        for user in layout.group_members(group):
            h = channel.H[user - 1]
            tx_terms: dict[tuple[int, int, int], complex] = {}
            for g2, tau2 in zip(clique.groups, clique.subfiles):
                tau2_index = family.index_of(tau2)
                for j in layout.group_members(g2):
                    tx_terms[(g2, j, tau2_index)] = complex(
                        h @ precoders.vector(g2, j))
            decoder = cache_out_terms(user, clique, layout, precoders, channel)
            out_keys = {k for k in tx_terms if k[0] != group}
            if set(decoder) != out_keys:
                raise DecodeError(
                    f"user {user}: cache-out plan names the wrong terms")
            for key in out_keys:
                if tx_terms[key] - decoder[key] != 0:
                    raise DecodeError(
                        f"user {user}: cache-out not exact for term {key}")
            h_norm = float(np.linalg.norm(h))
            for (g2, j, _), coeff in tx_terms.items():
                if g2 == group and j != user and abs(coeff) > zf_tolerance * h_norm:
                    raise DecodeError(
                        f"user {user}: nulling leakage {abs(coeff):.3e} from "
                        f"user {j}")
            own_gain = tx_terms[(group, user, family.index_of(tau))]
            if abs(own_gain) < gain_floor:
                raise DecodeError(f"user {user}: vanishing stream gain")
            if x is not None and payloads is not None:
                recon = sum(payloads[requests[j - 1] - 1, ti] * c
                            for (_, j, ti), c in tx_terms.items())
                scale = max(abs(complex(h @ x)), 1.0)
                if abs(recon - complex(h @ x)) > 1e-9 * scale:
                    raise DecodeError(
                        f"user {user}: coefficient table does not reproduce "
                        "the received signal")


@dataclass(frozen=True)
class DecodedSubfile:
    """One recovered subfile at one user, with its end-to-end symbol error."""

    user: int
    subfile: SubfileIndex
    recovered: complex
    reference: complex
    error: float


@dataclass(frozen=True)
class DeliveryReport:
    """Outcome of a full delivery run.

    measured_delay is transmissions / subpacketization in file units, and
    achieved_dof = K(1-gamma) / measured_delay; both are exact rationals.
    """

    K: int
    L: int
    transmit_antennas: int
    gamma: Fraction
    seed: int
    noise_power: float
    snr_db: float | None
    freeze_channel: bool
    requests: tuple[int, ...]
    transmissions: int
    subpacketization: int
    measured_delay: Fraction
    achieved_dof: Fraction
    max_error: float
    decoded: tuple[DecodedSubfile, ...]

    def per_user(self) -> dict[int, list[DecodedSubfile]]:
        out: dict[int, list[DecodedSubfile]] = {u: [] for u in range(1, self.K + 1)}
        for record in self.decoded:
            out[record.user].append(record)
        return out

    def delivered_indices(self, user: int) -> frozenset[int]:
        return frozenset(r.subfile.tau_index for r in self.decoded
                         if r.user == user)

    def to_text(self) -> str:
        lines = [
            f"K: {self.K}",
            f"L: {self.L}",
            f"transmit_antennas: {self.transmit_antennas}",
            f"gamma: {self.gamma}",
            f"seed: {self.seed}",
            f"noise_power: {self.noise_power!r}",
            f"snr_db: {self.snr_db!r}",
            f"freeze_channel: {self.freeze_channel}",
            f"transmissions: {self.transmissions}",
            f"subpacketization: {self.subpacketization}",
            f"measured_delay: {self.measured_delay}",
            f"achieved_dof: {self.achieved_dof}",
            f"max_error: {self.max_error!r}",
        ]
        return "\n".join(lines) + "\n"

    def csv_rows(self) -> list[list[str]]:
        """One row per user: requested file, subfiles recovered, max error."""
        rows = [["user", "requested_file", "subfiles_recovered", "max_error"]]
        per_user = self.per_user()
        for user in range(1, self.K + 1):
            records = per_user[user]
            worst = max((r.error for r in records), default=0.0)
            rows.append([str(user), str(self.requests[user - 1]),
                         str(len(records)), repr(worst)])
        return rows


def _draw_working_channel(K: int, n_tx: int, seed: int, noise_power: float,
                          snr_db: float | None, groups, active_antennas,
                          clique_key: int, retry_cap: int,
                          zf_tolerance: float, condition_limit: float):
    for attempt in range(retry_cap):
        channel = draw_channel(K, n_tx, seed, noise_power, snr_db,
                               subkey=(clique_key, attempt))
        try:
            precoders = compute_precoders(
                channel, groups, active_antennas=active_antennas,
                zf_tolerance=zf_tolerance, condition_limit=condition_limit)
        except NumericalDegeneracyError:
            continue
        return channel, precoders
    raise DecodeError(
        f"no well-conditioned channel within {retry_cap} redraws")


def run_grouped_delivery(layout: PlacementLayout, requests: Sequence[int],
                         seed: int, *,
                         transmit_antennas: int | None = None,
                         active_antennas: Mapping[int, np.ndarray] | None = None,
                         noise_power: float = 0.0,
                         snr_db: float | None = None,
                         freeze_channel: bool = False,
                         symbolic_check: bool = False,
                         algorithm: SingleStreamAlgorithm | None = None,
                         retry_cap: int = RETRY_CAP,
                         zf_tolerance: float = ZF_TOLERANCE,
                         condition_limit: float = CONDITION_LIMIT,
                         gain_floor: float = GAIN_FLOOR) -> DeliveryReport:
    """Delivery engine shared by the broadcast and the cache-aided
    interference front ends; see run_delivery for the common entry point."""
    requests = tuple(int(r) for r in requests)
    if len(requests) != layout.K:
        raise ParameterError(
            f"need one request per user, got {len(requests)} for K={layout.K}")
    if any(not 1 <= r <= layout.N for r in requests):
        raise ParameterError(f"requests must name files in 1..{layout.N}")
    seed = _check_seed(seed)
    if snr_db is not None:
        noise_power = 10.0 ** (-snr_db / 10.0)
    n_tx = layout.L if transmit_antennas is None else transmit_antennas
    algorithm = algorithm if algorithm is not None else MNAlgorithm()
    family = layout.tau_family
    payloads = draw_payloads(layout.N, len(family), seed)

    frozen = None
    if freeze_channel:
        frozen = _draw_working_channel(
            layout.K, n_tx, seed, noise_power, snr_db, layout.groups,
            active_antennas, 0, retry_cap, zf_tolerance, condition_limit)

    decoded: list[DecodedSubfile] = []
    delivered: dict[int, set[int]] = {u: set() for u in range(1, layout.K + 1)}
    max_error = 0.0
    transmissions = 0
    for counter, clique in enumerate(algorithm.iter_cliques(family), start=1):
        if frozen is not None:
            channel, precoders = frozen
        else:
            channel, precoders = _draw_working_channel(
                layout.K, n_tx, seed, noise_power, snr_db, layout.groups,
                active_antennas, counter, retry_cap, zf_tolerance,
                condition_limit)
        x = build_transmission(clique, layout, requests, payloads, precoders)
        if symbolic_check:
            verify_clique_symbolically(
                clique, layout, requests, channel, precoders, x, payloads,
                zf_tolerance=zf_tolerance, gain_floor=gain_floor)
            if active_antennas is not None:
                _verify_support(x, clique, layout, requests,
                                active_antennas, precoders)
        noise_rng = _rng(seed, _NOISE_STREAM, counter) if noise_power > 0 else None
        for group, tau in zip(clique.groups, clique.subfiles):
            tau_index = family.index_of(tau)
            for user in layout.group_members(group):
                y = complex(channel.H[user - 1] @ x)
                if noise_rng is not None:
                    y += math.sqrt(noise_power / 2) * complex(
                        noise_rng.standard_normal(),
                        noise_rng.standard_normal())
                recovered = receive_and_decode(
                    user, y, channel, layout, precoders, payloads,
                    requests, clique, gain_floor=gain_floor)
                reference = complex(payloads[requests[user - 1] - 1, tau_index])
                error = abs(recovered - reference)
                decoded.append(DecodedSubfile(
                    user=user,
                    subfile=SubfileIndex(requests[user - 1], tau_index),
                    recovered=complex(recovered), reference=reference,
                    error=float(error)))
                if tau_index in delivered[user]:
                    raise DecodeError(
                        f"subfile {tau_index} delivered twice to user {user}")
                delivered[user].add(tau_index)
                max_error = max(max_error, float(error))
        transmissions += 1

    for user in range(1, layout.K + 1):
        expected = layout.non_cached(user)
        if delivered[user] != expected:
            raise DecodeError(
                f"user {user} received {len(delivered[user])} subfiles, "
                f"expected {len(expected)}")

    measured_delay = Fraction(transmissions, len(family))
    remaining = layout.K - int(layout.K * layout.gamma)
    achieved_dof = (Fraction(remaining) / measured_delay
                    if measured_delay else Fraction(0))
    return DeliveryReport(
        K=layout.K, L=layout.L, transmit_antennas=n_tx, gamma=layout.gamma,
        seed=seed, noise_power=float(noise_power), snr_db=snr_db,
        freeze_channel=freeze_channel, requests=requests,
        transmissions=transmissions, subpacketization=len(family),
        measured_delay=measured_delay, achieved_dof=achieved_dof,
        max_error=max_error, decoded=tuple(decoded))


def _verify_support(x: np.ndarray, clique: Clique, layout: PlacementLayout,
                    requests: Sequence[int], active_antennas, precoders) -> None:
    """Antennas whose transmitters cache none of the clique's subfiles must
    carry exactly zero energy."""
    allowed = np.zeros(x.shape[0], dtype=bool)
    for group in clique.groups:
        for user in layout.group_members(group):
            v = precoders.vector(group, user)
            mask = np.zeros(x.shape[0], dtype=bool)
            mask[np.asarray(active_antennas[user], dtype=np.intp)] = True
            if np.any(v[~mask] != 0):
                raise DecodeError(
                    f"precoder for user {user} leaks outside its antennas")
            allowed |= mask
    if np.any(x[~allowed] != 0):
        raise DecodeError("transmit vector carries energy on idle antennas")


def run_delivery(params: SystemParams, requests: Sequence[int], seed: int,
                 *, num_files: int | None = None,
                 **options) -> DeliveryReport:
    """Simulate the full delivery phase on the multi-antenna broadcast system.

    requests[k-1] names the file of user k; the library size defaults to the
    largest requested file. Remaining keyword options are those of
    run_grouped_delivery (noise_power, snr_db, freeze_channel,
    symbolic_check, algorithm, retry caps and tolerances).
    """
    requests = tuple(int(r) for r in requests)
    if not requests:
        raise ParameterError("requests must not be empty")
    library = num_files if num_files is not None else max(requests)
    layout = build_placement(params.K, params.L, params.gamma, library,
                             options.get("algorithm"))
    return run_grouped_delivery(layout, requests, seed,
                                transmit_antennas=params.L, **options)
