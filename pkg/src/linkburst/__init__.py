"""Link-creation dynamics of growing social graphs: degree acceleration
phases, bursty inter-event fits and synthetic traces."""

__version__ = "0.1.0"

from .interevent import (FitResult, InterEventSample, extract_gaps, fit_exponential,
                         fit_pareto_cutoff, ks_test, select_model)
from .phases import Phase, PhaseConfig, classify_phases, compute_timelines, degree_acceleration
from .powerlaw import PowerLawFitResult, ccdf, collect_magnitudes, fit_powerlaw
from .shares import aggregate_shares, node_shares, phase_shares
from .synth import NodeGroup, NodeProcessSpec, SynthConfig, gen_event_times, gen_trace
from .trace import EdgeEvent, Trace, build_node_series, parse_trace, read_trace, write_trace
