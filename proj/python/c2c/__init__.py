"""CT body-composition analysis: spine trabecular ROI and tissue metrics."""

try:
    from ._core import (  # installed package layout
        C2CError,
        analyze_spine,
        compare_spine_masks,
        process_slice,
        resample_volume,
        run_2d,
        run_3d,
        spline_eval,
        write_phantom_fixture,
    )
except ImportError:  # development layout: _core next to the CMake build tree
    from _core import (
        C2CError,
        analyze_spine,
        compare_spine_masks,
        process_slice,
        resample_volume,
        run_2d,
        run_3d,
        spline_eval,
        write_phantom_fixture,
    )

__all__ = [
    "C2CError",
    "analyze_spine",
    "compare_spine_masks",
    "process_slice",
    "resample_volume",
    "run_2d",
    "run_3d",
    "spline_eval",
    "write_phantom_fixture",
]
