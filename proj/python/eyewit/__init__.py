"""Click-detector g2 witnesses and sequential certification statistics."""

from ._eyewit import (
    Cell,
    ClassicalStrategy,
    ClickStats,
    DetectorModel,
    EyewitError,
    Plan,
    PreparationParams,
    __version__,
    chain_cell,
    click_prob_coherent,
    click_prob_fock,
    coherent_stats,
    conditional_state,
    displaced_fock_amplitude,
    find_g2_crossing,
    herald_rate,
    minimize,
    run_cli,
    superposition_g2_scan,
    variance_ratio,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
