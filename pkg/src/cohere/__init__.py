"""Resource theory of genuine and full quantum incoherence at desk scale."""
from .channels import (
    ChoiMatrix,
    KrausChannel,
    SchurMap,
    apply,
    canonical_kraus,
    channels_equal,
    choi_of,
    kraus_from_choi,
    schur_to_kraus,
)
from .families import ClassificationReport, Verdict, classification_report, is_dio, is_fio, is_gio, is_mio, is_sgio, is_tio
from .measures import (
    MeasureResult,
    dephasing_distance,
    l1_coherence,
    min_distance_coherence,
    rel_entropy_coherence,
    wigner_yanase,
)
from .numerics import DEFAULT_TOL, Tolerance
from .states import DensityMatrix, PureState, dephase, plus_state, pure
from .structure import MixedUnitaryDecomposition, is_extremal_gio, mixed_unitary_decompose
from .transforms import PlanVerdict, TransformPlan

__version__ = "0.1.0"
