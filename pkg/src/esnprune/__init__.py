"""Echo state networks with centrality-guided reservoir pruning."""

__version__ = "0.1.0"

from .centrality import MEASURES, centrality, rank_nodes, signed_strengths
from .data import SeriesDataset, load_csv, mackey_glass, make_splits, normalize, synth_load
from .evaluation import aggregate, nrmse
from .pruning import PruneConfig, PruneCurve, prune_sweep, remove_nodes
from .readout import TrainedEsn, harvest, predict_free_run, predict_teacher_forced, train_readout
from .reservoir import HyperParams, ReservoirWeights, generate_reservoir, scale_to_radius, update_state
from .task import ForecastTask
