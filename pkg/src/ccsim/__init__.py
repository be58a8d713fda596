"""Grouped coded caching toolkit.

Exact planning formulas (subpacketization, delay, DoF, effective gains under
a subpacketization cap), cache placement and clique scheduling, a seeded
zero-forcing delivery simulator with numeric and coefficient-bookkeeping
verification, memory sharing for arbitrary parameters, and the cache-aided
multi-transmitter extension.
"""

from .combinatorics import Rational, SubsetFamily, binomial, enumerate_subsets, iter_subsets
from .delivery import (ChannelRealization, DecodedSubfile, DeliveryReport,
                       PrecoderSet, build_transmission, cache_out_terms,
                       compute_precoders, draw_channel, draw_payloads,
                       receive_and_decode, run_delivery, run_grouped_delivery,
                       verify_clique_symbolically)
from .errors import (DecodeError, DivisibilityError, NumericalDegeneracyError,
                     ParameterError)
from .formulas import (GainReport, SystemParams, dof_multiplier_subpacketization,
                       effective_K, effective_gain, min_gamma_for_gain,
                       pd_lc_elevated_gain, pd_lc_subpacketization,
                       subpacketization_grouped, subpacketization_single,
                       theoretical_performance)
from .interference import (TransmitterPlacement, build_transmitter_caches,
                           ic_subpacketization, run_ic_delivery)
from .memory_sharing import (MemorySharingPlan, dof_gap_bound,
                             memory_sharing_delay, plan_memory_sharing)
from .placement import (Clique, MNAlgorithm, PlacementLayout,
                        SingleStreamAlgorithm, SubfileIndex, build_groups,
                        build_placement, mn_delivery_cliques)

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization", "Clique", "DecodeError", "DecodedSubfile",
    "DeliveryReport", "DivisibilityError", "GainReport", "MNAlgorithm",
    "MemorySharingPlan", "NumericalDegeneracyError", "ParameterError",
    "PlacementLayout", "PrecoderSet", "Rational", "SingleStreamAlgorithm",
    "SubfileIndex", "SubsetFamily", "SystemParams", "TransmitterPlacement",
    "binomial", "build_groups", "build_placement", "build_transmission",
    "build_transmitter_caches", "cache_out_terms", "compute_precoders",
    "dof_gap_bound", "dof_multiplier_subpacketization", "draw_channel",
    "draw_payloads", "effective_K", "effective_gain", "enumerate_subsets",
    "ic_subpacketization", "iter_subsets", "memory_sharing_delay",
    "min_gamma_for_gain", "mn_delivery_cliques", "pd_lc_elevated_gain",
    "pd_lc_subpacketization", "plan_memory_sharing", "receive_and_decode",
    "run_delivery", "run_grouped_delivery", "run_ic_delivery",
    "subpacketization_grouped", "subpacketization_single",
    "theoretical_performance", "verify_clique_symbolically",
]
