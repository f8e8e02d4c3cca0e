from acidlab.engine.acid import (ABLATIONS, AcidConfig, AcidHistory, AcidIterator, AcidRecon, IterationRecord,
                                 NormalizationRecord, acid_ablate, acid_run)
from acidlab.engine.contraction import (GeometricFit, RangeProjector, SyntheticRecon, contraction_probe,
                                        fit_geometric_rate, terminal_bound)
from acidlab.engine.sweep import SweepRow, data_sweep, sweep_trend

__all__ = [
    "ABLATIONS", "AcidConfig", "AcidHistory", "AcidIterator", "AcidRecon", "IterationRecord",
    "NormalizationRecord", "acid_ablate", "acid_run",
    "GeometricFit", "RangeProjector", "SyntheticRecon", "contraction_probe", "fit_geometric_rate",
    "terminal_bound",
    "SweepRow", "data_sweep", "sweep_trend",
]
