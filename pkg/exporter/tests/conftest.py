import csv

import pytest

HEADER = (
    "id",
    "system",
    "subsystem",
    "component",
    "failure_mode",
    "failure_reason",
    "failure_effect",
    "emergency_measure",
)

# three records; the first two share a failure_mode on purpose
ROWS = [
    (
        "11010101",
        "Target and Obstacle Perception System",
        "Sonar System",
        "Array Transducer",
        "signal dropout",
        "transducer crystal aging",
        "obstacle returns fade below the detection threshold near the bow sector",
        "inspect the transducer array and replace aged crystal elements",
    ),
    (
        "11010202",
        "Target and Obstacle Perception System",
        "Sonar System",
        "Beamformer Card",
        "signal dropout",
        "gain stage drift in humid conditions",
        "phantom echoes crowd the obstacle track list and mask real contacts",
        "adjust receiver gain and restart the beamformer card",
    ),
    (
        "21010601",
        "Ship-to-Shore Communication System",
        "Satellite Link",
        "Antenna Pedestal",
        "pointing loss",
        "pedestal servo wear",
        "shore link drops during turns and telemetry gaps appear",
        "service the pedestal servo and recalibrate antenna pointing",
    ),
]


def _write_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        writer.writerows(rows)
    return path


@pytest.fixture
def records_csv(tmp_path):
    return str(_write_csv(tmp_path / "records.csv", ROWS))


@pytest.fixture
def records_with_empty(tmp_path):
    """Same fixture but the middle record has no failure_effect text."""
    rows = [list(r) for r in ROWS]
    rows[1][6] = "   "
    return str(_write_csv(tmp_path / "records_empty.csv", rows))
